//! Bank persistence: one JSON document per identity, entries carrying a
//! timestamp, a base64 little-endian embedding payload in the tagged
//! precision, and the behaviour histogram.

use std::path::Path;

use base64::prelude::{Engine, BASE64_STANDARD};
use half::f16;
use pentrack_core::reid::{
    BankEntry, EmbeddingBank, EmbeddingVector, Precision, BEHAVIOUR_CLASSES,
};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};

#[derive(Debug, Serialize, Deserialize)]
struct EntryDoc {
    timestamp: f64,
    dim: usize,
    precision: Precision,
    embedding_b64: String,
    histogram: Vec<f64>,
}

#[derive(Debug, Serialize, Deserialize)]
struct BankDoc {
    identity_id: u64,
    last_update: f64,
    entries: Vec<EntryDoc>,
}

fn encode_embedding(e: &EmbeddingVector) -> String {
    let mut bytes = Vec::with_capacity(e.byte_size() as usize);
    for &v in &e.values {
        match e.precision {
            Precision::Half16 => bytes.extend_from_slice(&f16::from_f64(v).to_bits().to_le_bytes()),
            Precision::Single32 => bytes.extend_from_slice(&(v as f32).to_le_bytes()),
        }
    }
    BASE64_STANDARD.encode(bytes)
}

fn decode_embedding(doc: &EntryDoc) -> CliResult<EmbeddingVector> {
    let bytes = BASE64_STANDARD
        .decode(&doc.embedding_b64)
        .map_err(|e| CliError::input(format!("bad embedding payload: {e}")))?;
    let width = doc.precision.bytes_per_component() as usize;
    if bytes.len() != doc.dim * width {
        return Err(CliError::input(format!(
            "embedding payload holds {} bytes, expected {}",
            bytes.len(),
            doc.dim * width
        )));
    }
    let values: Vec<f64> = bytes
        .chunks_exact(width)
        .map(|chunk| match doc.precision {
            Precision::Half16 => f16::from_bits(u16::from_le_bytes([chunk[0], chunk[1]])).to_f64(),
            Precision::Single32 => {
                f32::from_le_bytes([chunk[0], chunk[1], chunk[2], chunk[3]]) as f64
            }
        })
        .collect();
    EmbeddingVector::new(values, doc.precision).map_err(CliError::from)
}

pub fn save_bank(path: &Path, bank: &EmbeddingBank) -> CliResult<()> {
    let doc = BankDoc {
        identity_id: bank.identity_id,
        last_update: bank.last_update,
        entries: bank
            .entries()
            .iter()
            .map(|entry| EntryDoc {
                timestamp: entry.timestamp,
                dim: entry.embedding.dim(),
                precision: entry.embedding.precision,
                embedding_b64: encode_embedding(&entry.embedding),
                histogram: entry.behaviour_histogram.to_vec(),
            })
            .collect(),
    };
    std::fs::write(path, serde_json::to_string_pretty(&doc)? + "\n")?;
    Ok(())
}

pub fn load_bank(path: &Path) -> CliResult<EmbeddingBank> {
    let doc: BankDoc = serde_json::from_str(
        &std::fs::read_to_string(path)
            .map_err(|e| CliError::input(format!("{}: {e}", path.display())))?,
    )?;
    let mut bank = EmbeddingBank::new(doc.identity_id);
    for entry in &doc.entries {
        if entry.histogram.len() != BEHAVIOUR_CLASSES {
            return Err(CliError::input(format!(
                "histogram must have {BEHAVIOUR_CLASSES} bins, got {}",
                entry.histogram.len()
            )));
        }
        let mut histogram = [0.0; BEHAVIOUR_CLASSES];
        histogram.copy_from_slice(&entry.histogram);
        bank.push(BankEntry::new(
            entry.timestamp,
            decode_embedding(entry)?,
            histogram,
        )?)?;
    }
    Ok(bank)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_preserves_half_precision_payload() {
        let mut bank = EmbeddingBank::new(3);
        for t in 0..4 {
            // Values on the quarter grid survive the f16 narrowing.
            let values: Vec<f64> = (0..6).map(|j| (t * 6 + j) as f64 * 0.25 - 2.0).collect();
            let e = EmbeddingVector::new(values, Precision::Half16).unwrap();
            bank.push(BankEntry::new(t as f64, e, BankEntry::uniform_histogram()).unwrap())
                .unwrap();
        }
        let f = tempfile::NamedTempFile::new().unwrap();
        save_bank(f.path(), &bank).unwrap();
        let back = load_bank(f.path()).unwrap();
        assert_eq!(back.identity_id, 3);
        assert_eq!(back.len(), 4);
        for (a, b) in bank.entries().iter().zip(back.entries()) {
            assert_eq!(a.timestamp, b.timestamp);
            assert_eq!(a.embedding.values, b.embedding.values);
        }
    }
}
