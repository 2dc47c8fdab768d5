//! Confusion-matrix file: CSV whose first row is
//! `true\pred,<label...>` and whose subsequent rows are
//! `<label>,<counts...>`. Row labels must repeat the header labels in
//! order.

use std::path::Path;

use pentrack_core::cls::ConfusionMatrix;

use crate::error::{CliError, CliResult};

pub const CORNER: &str = "true\\pred";

pub fn read_confusion_matrix(path: &Path) -> CliResult<ConfusionMatrix> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| CliError::input(format!("{}: {e}", path.display())))?;
    let mut rows = reader.records();
    let header = rows
        .next()
        .ok_or_else(|| CliError::input(format!("{}: empty file", path.display())))?
        .map_err(|e| CliError::input(format!("{}: {e}", path.display())))?;
    if header.get(0) != Some(CORNER) {
        return Err(CliError::input(format!(
            "{}: line 1: first cell must be `{CORNER}`",
            path.display()
        )));
    }
    let labels: Vec<String> = header.iter().skip(1).map(str::to_string).collect();
    if labels.is_empty() {
        return Err(CliError::input(format!(
            "{}: header names no classes",
            path.display()
        )));
    }

    let mut counts = Vec::with_capacity(labels.len());
    for (i, row) in rows.enumerate() {
        let row = row.map_err(|e| CliError::input(format!("{}: {e}", path.display())))?;
        let line = row.position().map_or(0, |p| p.line());
        if row.len() != labels.len() + 1 {
            return Err(CliError::input(format!(
                "{}: line {line}: expected {} fields",
                path.display(),
                labels.len() + 1
            )));
        }
        if row.get(0) != Some(labels[i].as_str()) {
            return Err(CliError::input(format!(
                "{}: line {line}: row label `{}` does not match header order (`{}`)",
                path.display(),
                row.get(0).unwrap_or(""),
                labels[i]
            )));
        }
        let parsed: Result<Vec<u64>, _> = row.iter().skip(1).map(str::parse).collect();
        counts.push(
            parsed.map_err(|_| {
                CliError::input(format!("{}: line {line}: bad count", path.display()))
            })?,
        );
    }
    if counts.len() != labels.len() {
        return Err(CliError::input(format!(
            "{}: expected {} data rows, got {}",
            path.display(),
            labels.len(),
            counts.len()
        )));
    }
    ConfusionMatrix::new(labels, counts).map_err(CliError::from)
}

pub fn write_confusion_matrix(path: &Path, cm: &ConfusionMatrix) -> CliResult<()> {
    let mut writer = csv::Writer::from_path(path)
        .map_err(|e| CliError::input(format!("{}: {e}", path.display())))?;
    let mut header = vec![CORNER.to_string()];
    header.extend(cm.class_names.iter().cloned());
    writer
        .write_record(&header)
        .map_err(|e| CliError::input(e.to_string()))?;
    for (label, row) in cm.class_names.iter().zip(&cm.counts) {
        let mut record = vec![label.clone()];
        record.extend(row.iter().map(u64::to_string));
        writer
            .write_record(&record)
            .map_err(|e| CliError::input(e.to_string()))?;
    }
    writer.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    #[test]
    fn round_trip_and_validation() {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        write!(f, "true\\pred,a,b\na,5,1\nb,0,7\n").unwrap();
        let cm = read_confusion_matrix(f.path()).unwrap();
        assert_eq!(cm.counts[0][1], 1);
        let out = tempfile::NamedTempFile::new().unwrap();
        write_confusion_matrix(out.path(), &cm).unwrap();
        assert_eq!(read_confusion_matrix(out.path()).unwrap(), cm);

        let mut bad = tempfile::NamedTempFile::new().unwrap();
        write!(bad, "true\\pred,a,b\nb,5,1\na,0,7\n").unwrap();
        assert!(read_confusion_matrix(bad.path())
            .unwrap_err()
            .message
            .contains("header order"));
    }
}
