//! On-disk formats used by the command-line tool.
//!
//! Matrices are stored either in a binary container (8-byte magic, `u32` LE
//! rows, `u32` LE cols, then `rows * cols` `f64` LE values in row-major
//! order) or as text (a `rows cols` line followed by the values, whitespace
//! separated). Messages use the same container with one column. Gains,
//! signals and presence masks are text, one entry per line.

use std::path::Path;

use crate::error::{Error, Result};
use crate::key_schedule::MeasurementMatrix;

pub const MAGIC: &[u8; 8] = b"CSAUTHF1";
const HEADER_LEN: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum MatrixFormat {
    #[default]
    Binary,
    Text,
}

fn malformed(path: &Path, reason: impl Into<String>) -> Error {
    Error::Format {
        path: path.to_path_buf(),
        reason: reason.into(),
    }
}

pub fn matrix_to_bytes(phi: &MeasurementMatrix) -> Vec<u8> {
    let mut out = Vec::with_capacity(HEADER_LEN + 8 * phi.rows() * phi.cols());
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&(phi.rows() as u32).to_le_bytes());
    out.extend_from_slice(&(phi.cols() as u32).to_le_bytes());
    for v in phi.to_row_major() {
        out.extend_from_slice(&v.to_le_bytes());
    }
    out
}

pub fn matrix_to_text(phi: &MeasurementMatrix) -> String {
    let mut out = format!("{} {}\n", phi.rows(), phi.cols());
    for r in 0..phi.rows() {
        let line: Vec<String> = (0..phi.cols()).map(|c| phi.get(r, c).to_string()).collect();
        out.push_str(&line.join(" "));
        out.push('\n');
    }
    out
}

fn parse_binary(path: &Path, bytes: &[u8]) -> Result<MeasurementMatrix> {
    if bytes.len() < HEADER_LEN {
        return Err(malformed(path, "truncated header"));
    }
    let word =
        |at: usize| u32::from_le_bytes(bytes[at..at + 4].try_into().expect("4 bytes")) as usize;
    let (rows, cols) = (word(8), word(12));
    let body = &bytes[HEADER_LEN..];
    if rows.checked_mul(cols).and_then(|n| n.checked_mul(8)) != Some(body.len()) {
        return Err(malformed(
            path,
            format!("{rows}x{cols} header but {} payload bytes", body.len()),
        ));
    }
    let values: Vec<f64> = body
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().expect("8 bytes")))
        .collect();
    MeasurementMatrix::from_row_major(rows, cols, &values)
}

fn parse_text(path: &Path, text: &str) -> Result<MeasurementMatrix> {
    let mut tokens = text.split_whitespace();
    let mut dim = || -> Result<usize> {
        tokens
            .next()
            .ok_or_else(|| malformed(path, "missing dimensions"))?
            .parse()
            .map_err(|_| malformed(path, "bad dimensions"))
    };
    let (rows, cols) = (dim()?, dim()?);
    let values = tokens
        .map(|t| {
            t.parse::<f64>()
                .map_err(|_| malformed(path, format!("bad value {t:?}")))
        })
        .collect::<Result<Vec<_>>>()?;
    if values.len() != rows * cols {
        return Err(malformed(
            path,
            format!("expected {} values, found {}", rows * cols, values.len()),
        ));
    }
    MeasurementMatrix::from_row_major(rows, cols, &values)
}

pub fn write_matrix(path: &Path, phi: &MeasurementMatrix, format: MatrixFormat) -> Result<()> {
    let bytes = match format {
        MatrixFormat::Binary => matrix_to_bytes(phi),
        MatrixFormat::Text => matrix_to_text(phi).into_bytes(),
    };
    std::fs::write(path, bytes).map_err(|e| Error::io(path, e))
}

/// Reads either format, picking by the magic bytes.
pub fn read_matrix(path: &Path) -> Result<MeasurementMatrix> {
    let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
    if bytes.starts_with(MAGIC) {
        parse_binary(path, &bytes)
    } else {
        let text = std::str::from_utf8(&bytes).map_err(|_| malformed(path, "not UTF-8 text"))?;
        parse_text(path, text)
    }
}

/// Writes a vector as an `len x 1` container.
pub fn write_vector(path: &Path, values: &[f64], format: MatrixFormat) -> Result<()> {
    write_matrix(
        path,
        &MeasurementMatrix::from_row_major(values.len(), 1, values)?,
        format,
    )
}

/// Reads a container holding a single row or column.
pub fn read_vector(path: &Path) -> Result<Vec<f64>> {
    let m = read_matrix(path)?;
    if m.rows() != 1 && m.cols() != 1 {
        return Err(malformed(
            path,
            format!("{}x{} is not a vector", m.rows(), m.cols()),
        ));
    }
    Ok(m.to_row_major())
}

fn lines(path: &Path) -> Result<Vec<(usize, String)>> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    Ok(text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim().to_string()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
        .collect())
}

/// One decimal per line; blank lines and `#` comments are skipped.
pub fn read_values(path: &Path) -> Result<Vec<f64>> {
    lines(path)?
        .into_iter()
        .map(|(n, l)| {
            l.parse::<f64>()
                .map_err(|_| malformed(path, format!("line {n}: bad number {l:?}")))
        })
        .collect()
}

/// Writes values in shortest round-trip form, one per line.
pub fn write_values(path: &Path, values: &[f64]) -> Result<()> {
    let text: String = values.iter().map(|v| format!("{v}\n")).collect();
    std::fs::write(path, text).map_err(|e| Error::io(path, e))
}

/// `1` for a present entry, `0` for an erased one.
pub fn read_mask(path: &Path) -> Result<Vec<bool>> {
    lines(path)?
        .into_iter()
        .map(|(n, l)| match l.as_str() {
            "1" => Ok(true),
            "0" => Ok(false),
            _ => Err(malformed(path, format!("line {n}: expected 0 or 1"))),
        })
        .collect()
}

pub fn write_mask(path: &Path, mask: &[bool]) -> Result<()> {
    let text: String = mask
        .iter()
        .map(|&b| if b { "1\n" } else { "0\n" })
        .collect();
    std::fs::write(path, text).map_err(|e| Error::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> MeasurementMatrix {
        MeasurementMatrix::from_row_major(2, 3, &[0.0, 0.25, 1.0, 1.0 / 3.0, 0.5, 0.1]).unwrap()
    }

    #[test]
    fn binary_and_text_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        for (name, fmt) in [
            ("m.bin", MatrixFormat::Binary),
            ("m.txt", MatrixFormat::Text),
        ] {
            let path = dir.path().join(name);
            write_matrix(&path, &sample(), fmt).unwrap();
            assert_eq!(read_matrix(&path).unwrap(), sample());
        }
    }

    #[test]
    fn binary_header_layout() {
        let bytes = matrix_to_bytes(&sample());
        assert_eq!(&bytes[..8], MAGIC);
        assert_eq!(&bytes[8..12], &2u32.to_le_bytes());
        assert_eq!(&bytes[12..16], &3u32.to_le_bytes());
        assert_eq!(bytes.len(), 16 + 6 * 8);
        assert_eq!(&bytes[24..32], &0.25f64.to_le_bytes());
    }

    #[test]
    fn truncated_files_are_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("bad.bin");
        let mut bytes = matrix_to_bytes(&sample());
        bytes.pop();
        std::fs::write(&path, &bytes).unwrap();
        assert!(matches!(read_matrix(&path), Err(Error::Format { .. })));
        std::fs::write(&path, "2 2\n1 2 3\n").unwrap();
        assert!(matches!(read_matrix(&path), Err(Error::Format { .. })));
    }

    #[test]
    fn vectors_use_the_matrix_container() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("s.bin");
        write_vector(&path, &[1.5, -0.25, 3.0], MatrixFormat::Binary).unwrap();
        assert_eq!(
            &std::fs::read(&path).unwrap()[8..16],
            &[3, 0, 0, 0, 1, 0, 0, 0]
        );
        assert_eq!(read_vector(&path).unwrap(), vec![1.5, -0.25, 3.0]);
        write_matrix(&path, &sample(), MatrixFormat::Binary).unwrap();
        assert!(read_vector(&path).is_err());
    }

    #[test]
    fn values_and_masks() {
        let dir = tempfile::tempdir().unwrap();
        let vpath = dir.path().join("v.txt");
        let values = [0.1, -2.5e-7, 1.0 / 3.0];
        write_values(&vpath, &values).unwrap();
        assert_eq!(read_values(&vpath).unwrap(), values);
        std::fs::write(&vpath, "# gains\n0.5\n\n1.5\nx\n").unwrap();
        assert!(read_values(&vpath).is_err());

        let mpath = dir.path().join("mask.txt");
        write_mask(&mpath, &[true, false, true]).unwrap();
        assert_eq!(read_mask(&mpath).unwrap(), vec![true, false, true]);
        std::fs::write(&mpath, "1\n2\n").unwrap();
        assert!(read_mask(&mpath).is_err());
    }
}
