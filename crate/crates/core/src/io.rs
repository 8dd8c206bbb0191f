//! File formats: plain CSV (one value per line, row-major cell order)
//! and a self-describing binary layout with a 16-byte header.

use std::fs;
use std::io::{Read as _, Write as _};
use std::path::Path;

use crate::error::{Error, Result};

/// Magic bytes of the binary cell-data format.
pub const MAGIC: &[u8; 4] = b"OSCL";

fn io_err(path: &Path, e: std::io::Error) -> Error {
    Error::Io { path: path.display().to_string(), message: e.to_string() }
}

/// Reads one f64 per line; empty lines allowed, anything else is a parse
/// error carrying the 1-based line number.
pub fn read_csv(path: &Path) -> Result<Vec<f64>> {
    let text = fs::read_to_string(path).map_err(|e| io_err(path, e))?;
    let mut out = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        let trimmed = line.trim();
        if trimmed.is_empty() {
            continue;
        }
        let v: f64 = trimmed.parse().map_err(|_| Error::Parse {
            line: idx + 1,
            message: format!("expected a number, got {trimmed:?}"),
        })?;
        out.push(v);
    }
    if out.is_empty() {
        return Err(Error::Parse { line: 1, message: "no values in file".into() });
    }
    Ok(out)
}

pub fn write_csv(path: &Path, values: &[f64]) -> Result<()> {
    let mut text = String::with_capacity(values.len() * 20);
    for v in values {
        text.push_str(&format!("{v}\n"));
    }
    fs::write(path, text).map_err(|e| io_err(path, e))
}

/// Writes rows of equal width as comma-separated lines, with an optional
/// header line.
pub fn write_rows_csv(path: &Path, header: Option<&str>, rows: &[Vec<f64>]) -> Result<()> {
    let mut text = String::new();
    if let Some(h) = header {
        text.push_str(h);
        text.push('\n');
    }
    for row in rows {
        let line: Vec<String> = row.iter().map(|v| format!("{v}")).collect();
        text.push_str(&line.join(","));
        text.push('\n');
    }
    fs::write(path, text).map_err(|e| io_err(path, e))
}

/// Self-described cell data: grid shape plus row-major values.
#[derive(Debug, Clone, PartialEq)]
pub struct CellData {
    pub dim: u32,
    pub depth: u32,
    pub values: Vec<f64>,
}

/// Binary layout: 4 magic bytes, then dim, depth and a reserved word as
/// little-endian u32, then `2^(dim·depth)` little-endian f64 values in
/// row-major cell order.
pub fn write_binary(path: &Path, data: &CellData) -> Result<()> {
    let mut file = fs::File::create(path).map_err(|e| io_err(path, e))?;
    let mut buf = Vec::with_capacity(16 + data.values.len() * 8);
    buf.extend_from_slice(MAGIC);
    buf.extend_from_slice(&data.dim.to_le_bytes());
    buf.extend_from_slice(&data.depth.to_le_bytes());
    buf.extend_from_slice(&0u32.to_le_bytes());
    for v in &data.values {
        buf.extend_from_slice(&v.to_le_bytes());
    }
    file.write_all(&buf).map_err(|e| io_err(path, e))
}

pub fn read_binary(path: &Path) -> Result<CellData> {
    let mut file = fs::File::open(path).map_err(|e| io_err(path, e))?;
    let mut buf = Vec::new();
    file.read_to_end(&mut buf).map_err(|e| io_err(path, e))?;
    if buf.len() < 16 || &buf[0..4] != MAGIC {
        return Err(Error::Parse { line: 1, message: "missing binary magic header".into() });
    }
    let dim = u32::from_le_bytes(buf[4..8].try_into().unwrap());
    let depth = u32::from_le_bytes(buf[8..12].try_into().unwrap());
    if dim == 0 || dim > 16 || (dim as u64) * (depth as u64) > 40 {
        return Err(Error::Parse {
            line: 1,
            message: format!("implausible header: dim = {dim}, depth = {depth}"),
        });
    }
    let count = 1usize << (dim * depth);
    if buf.len() != 16 + count * 8 {
        return Err(Error::Parse {
            line: 1,
            message: format!("payload length {} does not match {count} cells", buf.len() - 16),
        });
    }
    let values = buf[16..]
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
        .collect();
    Ok(CellData { dim, depth, values })
}

/// Loads either format, sniffing the magic bytes. CSV input needs the
/// grid shape supplied by the caller.
pub fn read_cell_data(path: &Path, csv_shape: Option<(u32, u32)>) -> Result<CellData> {
    let mut head = [0u8; 4];
    {
        let mut file = fs::File::open(path).map_err(|e| io_err(path, e))?;
        let n = file.read(&mut head).map_err(|e| io_err(path, e))?;
        if n == 4 && &head == MAGIC {
            return read_binary(path);
        }
    }
    let values = read_csv(path)?;
    let (dim, depth) = match csv_shape {
        Some(shape) => shape,
        None => {
            // infer a 1D power-of-two grid from the value count
            let n = values.len();
            if !n.is_power_of_two() {
                return Err(Error::Parse {
                    line: 1,
                    message: format!("{n} values: not a power of two; pass the grid shape"),
                });
            }
            (1, n.trailing_zeros())
        }
    };
    let expect = 1usize << (dim * depth);
    if values.len() != expect {
        return Err(Error::Parse {
            line: 1,
            message: format!("{} values, expected {expect} for the given shape", values.len()),
        });
    }
    Ok(CellData { dim, depth, values })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn binary_roundtrip() {
        let dir = std::env::temp_dir().join("oscillab-io-test");
        fs::create_dir_all(&dir).unwrap();
        let path = dir.join("roundtrip.bin");
        let data = CellData { dim: 1, depth: 3, values: (0..8).map(|i| i as f64 * 0.5).collect() };
        write_binary(&path, &data).unwrap();
        assert_eq!(read_binary(&path).unwrap(), data);
        // sniffing picks the binary branch
        assert_eq!(read_cell_data(&path, None).unwrap(), data);
    }

    #[test]
    fn csv_roundtrip_and_errors() {
        let dir = std::env::temp_dir().join("oscillab-io-test");
        fs::create_dir_all(&dir).unwrap();
        let path = dir.join("values.csv");
        write_csv(&path, &[1.0, -2.5, 3.0, 0.125]).unwrap();
        assert_eq!(read_csv(&path).unwrap(), vec![1.0, -2.5, 3.0, 0.125]);
        let data = read_cell_data(&path, None).unwrap();
        assert_eq!((data.dim, data.depth), (1, 2));

        let bad = dir.join("bad.csv");
        fs::write(&bad, "1.0\nnot-a-number\n2.0\n").unwrap();
        match read_csv(&bad) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 2),
            other => panic!("expected a parse error, got {other:?}"),
        }
    }
}
