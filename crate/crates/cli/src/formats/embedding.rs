//! Embedding stream file.
//!
//! Layout: magic `EMB1`, u32 LE count, u32 LE dim, one dtype byte
//! (0 = single precision, 1 = half precision), then count x dim values
//! little-endian row-major.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use byteorder::{LittleEndian, ReadBytesExt, WriteBytesExt};
use half::f16;
use pentrack_core::reid::{EmbeddingVector, Precision};

use crate::error::{CliError, CliResult};

pub const MAGIC: &[u8; 4] = b"EMB1";

fn dtype_byte(precision: Precision) -> u8 {
    match precision {
        Precision::Single32 => 0,
        Precision::Half16 => 1,
    }
}

pub fn read_embeddings(path: &Path) -> CliResult<Vec<EmbeddingVector>> {
    let file = File::open(path).map_err(|e| CliError::input(format!("{}: {e}", path.display())))?;
    let mut reader = BufReader::new(file);
    let fail = |what: String| CliError::input(format!("{}: {what}", path.display()));

    let mut magic = [0_u8; 4];
    reader
        .read_exact(&mut magic)
        .map_err(|e| fail(format!("short magic: {e}")))?;
    if &magic != MAGIC {
        return Err(fail("bad magic, expected EMB1".to_string()));
    }
    let count = reader
        .read_u32::<LittleEndian>()
        .map_err(|e| fail(e.to_string()))? as usize;
    let dim = reader
        .read_u32::<LittleEndian>()
        .map_err(|e| fail(e.to_string()))? as usize;
    let dtype = reader.read_u8().map_err(|e| fail(e.to_string()))?;
    let precision = match dtype {
        0 => Precision::Single32,
        1 => Precision::Half16,
        other => return Err(fail(format!("unknown dtype byte {other}"))),
    };
    let mut out = Vec::with_capacity(count);
    for _ in 0..count {
        let mut values = Vec::with_capacity(dim);
        for _ in 0..dim {
            let v = match precision {
                Precision::Single32 => reader
                    .read_f32::<LittleEndian>()
                    .map_err(|e| fail(format!("truncated payload: {e}")))?
                    as f64,
                Precision::Half16 => f16::from_bits(
                    reader
                        .read_u16::<LittleEndian>()
                        .map_err(|e| fail(format!("truncated payload: {e}")))?,
                )
                .to_f64(),
            };
            values.push(v);
        }
        out.push(EmbeddingVector::new(values, precision)?);
    }
    let mut trailing = [0_u8; 1];
    if reader
        .read(&mut trailing)
        .map_err(|e| fail(e.to_string()))?
        != 0
    {
        return Err(fail("trailing bytes after payload".to_string()));
    }
    Ok(out)
}

pub fn write_embeddings(
    path: &Path,
    embeddings: &[EmbeddingVector],
    precision: Precision,
) -> CliResult<()> {
    let dim = match embeddings.first() {
        Some(e) => e.dim(),
        None => {
            return Err(CliError::input(
                "refusing to write an empty embedding stream",
            ))
        }
    };
    if embeddings.iter().any(|e| e.dim() != dim) {
        return Err(CliError::input("embedding stream has mixed dimensions"));
    }
    let file =
        File::create(path).map_err(|e| CliError::input(format!("{}: {e}", path.display())))?;
    let mut writer = BufWriter::new(file);
    writer.write_all(MAGIC)?;
    writer.write_u32::<LittleEndian>(embeddings.len() as u32)?;
    writer.write_u32::<LittleEndian>(dim as u32)?;
    writer.write_u8(dtype_byte(precision))?;
    for e in embeddings {
        for &v in &e.values {
            match precision {
                Precision::Single32 => writer.write_f32::<LittleEndian>(v as f32)?,
                Precision::Half16 => {
                    writer.write_u16::<LittleEndian>(f16::from_f64(v).to_bits())?
                }
            }
        }
    }
    writer.flush()?;
    Ok(())
}
