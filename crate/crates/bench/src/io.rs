//! Matrix file I/O.
//!
//! Two formats:
//! * CSV — one matrix row per line, comma-separated decimal floats printed
//!   with 17 significant digits (round-trips f64 exactly);
//! * BIN — magic `FRSM`, then `rows` and `cols` as little-endian u64, then
//!   `rows * cols` little-endian f64 values in column-major order
//!   (bit-exact round trip).

use std::fmt;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::Path;

use frsvt_core::Matrix;

const MAGIC: &[u8; 4] = b"FRSM";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MatrixFormat {
    Csv,
    Bin,
}

impl std::str::FromStr for MatrixFormat {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "csv" => Ok(MatrixFormat::Csv),
            "bin" => Ok(MatrixFormat::Bin),
            other => Err(format!("unknown matrix format '{other}' (csv|bin)")),
        }
    }
}

#[derive(Debug)]
pub enum IoError {
    Io(std::io::Error),
    /// Malformed content, with the byte offset where parsing stopped.
    Parse {
        offset: u64,
        message: String,
    },
}

impl fmt::Display for IoError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            IoError::Io(e) => write!(f, "i/o error: {e}"),
            IoError::Parse { offset, message } => {
                write!(f, "parse error at byte {offset}: {message}")
            }
        }
    }
}

impl std::error::Error for IoError {}

impl From<std::io::Error> for IoError {
    fn from(e: std::io::Error) -> Self {
        IoError::Io(e)
    }
}

fn parse_err<T>(offset: u64, message: impl Into<String>) -> Result<T, IoError> {
    Err(IoError::Parse {
        offset,
        message: message.into(),
    })
}

pub fn write_matrix(path: &Path, a: &Matrix, format: MatrixFormat) -> Result<(), IoError> {
    let mut out = BufWriter::new(File::create(path)?);
    match format {
        MatrixFormat::Csv => {
            for i in 0..a.rows() {
                for j in 0..a.cols() {
                    if j > 0 {
                        out.write_all(b",")?;
                    }
                    write!(out, "{:.16e}", a.get(i, j))?;
                }
                out.write_all(b"\n")?;
            }
        }
        MatrixFormat::Bin => {
            out.write_all(MAGIC)?;
            out.write_all(&(a.rows() as u64).to_le_bytes())?;
            out.write_all(&(a.cols() as u64).to_le_bytes())?;
            for v in a.data() {
                out.write_all(&v.to_le_bytes())?;
            }
        }
    }
    out.flush()?;
    Ok(())
}

pub fn read_matrix(path: &Path, format: MatrixFormat) -> Result<Matrix, IoError> {
    match format {
        MatrixFormat::Csv => read_csv(path),
        MatrixFormat::Bin => read_bin(path),
    }
}

fn read_csv(path: &Path) -> Result<Matrix, IoError> {
    let reader = BufReader::new(File::open(path)?);
    let mut rows: Vec<Vec<f64>> = Vec::new();
    let mut offset: u64 = 0;
    for line in reader.lines() {
        let line = line?;
        let line_start = offset;
        offset += line.len() as u64 + 1;
        if line.trim().is_empty() {
            continue;
        }
        let mut row = Vec::new();
        let mut field_offset = line_start;
        for field in line.split(',') {
            let trimmed = field.trim();
            match trimmed.parse::<f64>() {
                Ok(v) if v.is_finite() => row.push(v),
                Ok(_) => return parse_err(field_offset, "non-finite value"),
                Err(_) => {
                    return parse_err(field_offset, format!("invalid float '{trimmed}'"));
                }
            }
            field_offset += field.len() as u64 + 1;
        }
        if let Some(first) = rows.first() {
            if row.len() != first.len() {
                return parse_err(
                    line_start,
                    format!("row has {} fields, expected {}", row.len(), first.len()),
                );
            }
        }
        rows.push(row);
    }
    if rows.is_empty() {
        return parse_err(0, "empty file");
    }
    let (m, n) = (rows.len(), rows[0].len());
    Ok(Matrix::from_fn(m, n, |i, j| rows[i][j]))
}

fn read_bin(path: &Path) -> Result<Matrix, IoError> {
    let mut reader = BufReader::new(File::open(path)?);
    let mut magic = [0u8; 4];
    if reader.read_exact(&mut magic).is_err() {
        return parse_err(0, "file too short for magic");
    }
    if &magic != MAGIC {
        return parse_err(0, "bad magic (expected FRSM)");
    }
    let mut dims = [0u8; 16];
    if reader.read_exact(&mut dims).is_err() {
        return parse_err(4, "file too short for dimensions");
    }
    let rows = u64::from_le_bytes(dims[..8].try_into().unwrap()) as usize;
    let cols = u64::from_le_bytes(dims[8..].try_into().unwrap()) as usize;
    let count = rows.checked_mul(cols).ok_or(IoError::Parse {
        offset: 4,
        message: "dimension overflow".into(),
    })?;
    let mut data = Vec::with_capacity(count);
    let mut buf = [0u8; 8];
    for idx in 0..count {
        if reader.read_exact(&mut buf).is_err() {
            return parse_err(
                20 + 8 * idx as u64,
                format!("expected {count} values, got {idx}"),
            );
        }
        data.push(f64::from_le_bytes(buf));
    }
    let mut trailing = [0u8; 1];
    if reader.read_exact(&mut trailing).is_ok() {
        return parse_err(20 + 8 * count as u64, "trailing bytes after matrix data");
    }
    Matrix::from_vec(rows, cols, data).map_err(|e| IoError::Parse {
        offset: 20,
        message: e.to_string(),
    })
}
