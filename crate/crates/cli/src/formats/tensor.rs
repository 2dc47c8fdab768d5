//! Dense tensor files.
//!
//! Layout: magic `DTN1` (single precision) or `DTNH` (half precision),
//! then u32 LE rank (must be 4), four u32 LE dims, then B*C*H*W values
//! little-endian in row-major order. The loader widens everything to
//! f64; writers narrow from f64 to the file precision.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use byteorder::{LittleEndian, ReadBytesExt, WriteBytesExt};
use half::f16;
use pentrack_core::distill::FeatureTensor;

use crate::error::{CliError, CliResult};

pub const MAGIC_F32: &[u8; 4] = b"DTN1";
pub const MAGIC_F16: &[u8; 4] = b"DTNH";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TensorPrecision {
    F32,
    F16,
}

pub fn read_tensor(path: &Path) -> CliResult<FeatureTensor> {
    let file = File::open(path).map_err(|e| CliError::input(format!("{}: {e}", path.display())))?;
    let mut reader = BufReader::new(file);
    let fail = |what: String| CliError::input(format!("{}: {what}", path.display()));

    let mut magic = [0_u8; 4];
    reader
        .read_exact(&mut magic)
        .map_err(|e| fail(format!("short magic: {e}")))?;
    let precision = match &magic {
        m if m == MAGIC_F32 => TensorPrecision::F32,
        m if m == MAGIC_F16 => TensorPrecision::F16,
        other => {
            return Err(fail(format!(
                "bad magic {:?}, expected DTN1 or DTNH",
                String::from_utf8_lossy(other)
            )))
        }
    };
    let rank = reader
        .read_u32::<LittleEndian>()
        .map_err(|e| fail(e.to_string()))?;
    if rank != 4 {
        return Err(fail(format!("rank must be 4, got {rank}")));
    }
    let mut dims = [0_usize; 4];
    for d in dims.iter_mut() {
        *d = reader
            .read_u32::<LittleEndian>()
            .map_err(|e| fail(e.to_string()))? as usize;
    }
    let count: usize = dims.iter().product();
    let mut values = Vec::with_capacity(count);
    match precision {
        TensorPrecision::F32 => {
            for _ in 0..count {
                values.push(
                    reader
                        .read_f32::<LittleEndian>()
                        .map_err(|e| fail(format!("truncated payload: {e}")))?
                        as f64,
                );
            }
        }
        TensorPrecision::F16 => {
            for _ in 0..count {
                let bits = reader
                    .read_u16::<LittleEndian>()
                    .map_err(|e| fail(format!("truncated payload: {e}")))?;
                values.push(f16::from_bits(bits).to_f64());
            }
        }
    }
    let mut trailing = [0_u8; 1];
    if reader
        .read(&mut trailing)
        .map_err(|e| fail(e.to_string()))?
        != 0
    {
        return Err(fail("trailing bytes after payload".to_string()));
    }
    FeatureTensor::from_vec(dims, values).map_err(CliError::from)
}

pub fn write_tensor(
    path: &Path,
    tensor: &FeatureTensor,
    precision: TensorPrecision,
) -> CliResult<()> {
    let file =
        File::create(path).map_err(|e| CliError::input(format!("{}: {e}", path.display())))?;
    let mut writer = BufWriter::new(file);
    let magic = match precision {
        TensorPrecision::F32 => MAGIC_F32,
        TensorPrecision::F16 => MAGIC_F16,
    };
    writer.write_all(magic)?;
    writer.write_u32::<LittleEndian>(4)?;
    for d in tensor.dims() {
        writer.write_u32::<LittleEndian>(d as u32)?;
    }
    for &v in tensor.values() {
        match precision {
            TensorPrecision::F32 => writer.write_f32::<LittleEndian>(v as f32)?,
            TensorPrecision::F16 => writer.write_u16::<LittleEndian>(f16::from_f64(v).to_bits())?,
        }
    }
    writer.flush()?;
    Ok(())
}
