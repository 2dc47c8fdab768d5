//! Track file format: CSV with header `frame,id,x,y,w,h,score`, one
//! record per line, frames 1-based, coordinates in pixels. Files must
//! be sorted by frame then id; duplicate (frame, id) pairs are
//! rejected. Parse errors carry 1-based line numbers.

use std::path::Path;

use pentrack_core::geometry::BoundingBox;
use pentrack_core::mot::{TrackRecord, TrackSet};

use crate::error::{CliError, CliResult};

pub const HEADER: [&str; 7] = ["frame", "id", "x", "y", "w", "h", "score"];

pub fn read_track_set(path: &Path) -> CliResult<TrackSet> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| CliError::input(format!("{}: {e}", path.display())))?;
    {
        let headers = reader
            .headers()
            .map_err(|e| CliError::input(format!("{}: {e}", path.display())))?;
        let got: Vec<&str> = headers.iter().collect();
        if got != HEADER {
            return Err(CliError::input(format!(
                "{}: line 1: expected header {}, got {}",
                path.display(),
                HEADER.join(","),
                got.join(",")
            )));
        }
    }

    let mut records = Vec::new();
    let mut last_key: Option<(u64, u64)> = None;
    for row in reader.records() {
        let row = row.map_err(|e| CliError::input(format!("{}: {e}", path.display())))?;
        let line = row.position().map_or(0, |p| p.line());
        let fail = |what: &str| CliError::input(format!("{}: line {line}: {what}", path.display()));
        if row.len() != 7 {
            return Err(fail(&format!("expected 7 fields, got {}", row.len())));
        }
        let frame: u64 = row[0].parse().map_err(|_| fail("bad frame index"))?;
        let id: u64 = row[1].parse().map_err(|_| fail("bad identity id"))?;
        let mut nums = [0.0_f64; 5];
        for (slot, field) in nums.iter_mut().zip(row.iter().skip(2)) {
            *slot = field.parse().map_err(|_| fail("bad numeric field"))?;
        }
        let [x, y, w, h, score] = nums;
        let key = (frame, id);
        match last_key {
            Some(prev) if prev == key => {
                return Err(fail(&format!(
                    "duplicate record for frame {frame}, id {id}"
                )));
            }
            Some(prev) if prev > key => {
                return Err(fail("file not sorted by frame then id"));
            }
            _ => {}
        }
        last_key = Some(key);
        let bbox = BoundingBox::new(x, y, w, h).map_err(|e| fail(&e.to_string()))?;
        records.push(TrackRecord::new(frame, id, bbox, score).map_err(|e| fail(&e.to_string()))?);
    }
    // Sortedness was checked line by line; this only re-checks duplicates.
    TrackSet::from_records(records).map_err(CliError::from)
}

pub fn write_track_set(path: &Path, tracks: &TrackSet) -> CliResult<()> {
    let mut writer = csv::Writer::from_path(path)
        .map_err(|e| CliError::input(format!("{}: {e}", path.display())))?;
    writer
        .write_record(HEADER)
        .map_err(|e| CliError::input(e.to_string()))?;
    for r in tracks.records() {
        writer
            .write_record(&[
                r.frame_index.to_string(),
                r.identity_id.to_string(),
                r.bbox.x_left.to_string(),
                r.bbox.y_top.to_string(),
                r.bbox.width.to_string(),
                r.bbox.height.to_string(),
                r.confidence.to_string(),
            ])
            .map_err(|e| CliError::input(e.to_string()))?;
    }
    writer.flush()?;
    Ok(())
}
