//! Binary snapshot files.
//!
//! Layout, all little-endian:
//!
//! | offset | size | content                       |
//! |--------|------|-------------------------------|
//! | 0      | 4    | magic `NLSA`                  |
//! | 4      | 4    | format version (u32)          |
//! | 8      | 8    | n_points (u64)                |
//! | 16     | 8    | box length (f64)              |
//! | 24     | 8    | time t (f64)                  |
//! | 32     | 16n  | (re, im) f64 pairs per node   |

use std::fs;
use std::path::Path;

use num_complex::Complex64;

use crate::error::{NlsError, Result};
use crate::field::ComplexField;
use crate::grid::Grid;

pub const MAGIC: &[u8; 4] = b"NLSA";
pub const VERSION: u32 = 1;
pub const HEADER_BYTES: usize = 32;

pub fn snapshot_size(n_points: usize) -> usize {
    HEADER_BYTES + 16 * n_points
}

pub fn encode_snapshot(field: &ComplexField, t: f64) -> Vec<u8> {
    let grid = field.grid();
    let mut buf = Vec::with_capacity(snapshot_size(grid.n_points()));
    buf.extend_from_slice(MAGIC);
    buf.extend_from_slice(&VERSION.to_le_bytes());
    buf.extend_from_slice(&(grid.n_points() as u64).to_le_bytes());
    buf.extend_from_slice(&grid.length().to_le_bytes());
    buf.extend_from_slice(&t.to_le_bytes());
    for z in field.values() {
        buf.extend_from_slice(&z.re.to_le_bytes());
        buf.extend_from_slice(&z.im.to_le_bytes());
    }
    buf
}

fn le_u32(b: &[u8]) -> u32 {
    u32::from_le_bytes(b.try_into().expect("4 bytes"))
}

fn le_u64(b: &[u8]) -> u64 {
    u64::from_le_bytes(b.try_into().expect("8 bytes"))
}

fn le_f64(b: &[u8]) -> f64 {
    f64::from_le_bytes(b.try_into().expect("8 bytes"))
}

pub fn decode_snapshot(bytes: &[u8]) -> Result<(ComplexField, f64)> {
    if bytes.len() < 4 || &bytes[..4] != MAGIC {
        return Err(NlsError::BadMagic);
    }
    if bytes.len() < HEADER_BYTES {
        return Err(NlsError::Truncated {
            expected: HEADER_BYTES as u64,
            found: bytes.len() as u64,
        });
    }
    let version = le_u32(&bytes[4..8]);
    if version != VERSION {
        return Err(NlsError::BadVersion(version));
    }
    let n_points = le_u64(&bytes[8..16]);
    let length = le_f64(&bytes[16..24]);
    let t = le_f64(&bytes[24..32]);
    let expected = (HEADER_BYTES as u64).saturating_add(n_points.saturating_mul(16));
    if bytes.len() as u64 != expected {
        return Err(NlsError::Truncated {
            expected,
            found: bytes.len() as u64,
        });
    }
    let grid = Grid::new(n_points as usize, length)?;
    let values = bytes[HEADER_BYTES..]
        .chunks_exact(16)
        .map(|c| Complex64::new(le_f64(&c[..8]), le_f64(&c[8..])))
        .collect();
    Ok((ComplexField::new(grid, values)?, t))
}

pub fn write_snapshot(field: &ComplexField, t: f64, path: &Path) -> Result<()> {
    fs::write(path, encode_snapshot(field, t)).map_err(|e| NlsError::io(path, e))
}

pub fn read_snapshot(path: &Path) -> Result<(ComplexField, f64)> {
    let bytes = fs::read(path).map_err(|e| NlsError::io(path, e))?;
    decode_snapshot(&bytes)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::{random_smooth_field, Lcg};

    #[test]
    fn zero_field_size() {
        let g = Grid::new(8, 1.0).unwrap();
        assert_eq!(encode_snapshot(&ComplexField::zeros(g), 0.0).len(), 160);
    }

    #[test]
    fn round_trip_is_bit_exact() {
        let g = Grid::new(64, 12.5).unwrap();
        let u = random_smooth_field(g, &mut Lcg::new(99), 2.0);
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("u.nlsa");
        write_snapshot(&u, 3.25, &path).unwrap();
        let (v, t) = read_snapshot(&path).unwrap();
        assert_eq!(t.to_bits(), 3.25f64.to_bits());
        assert_eq!(v.grid().length().to_bits(), 12.5f64.to_bits());
        for (a, b) in u.values().iter().zip(v.values()) {
            assert_eq!(a.re.to_bits(), b.re.to_bits());
            assert_eq!(a.im.to_bits(), b.im.to_bits());
        }
    }

    #[test]
    fn rejects_bad_magic_version_and_truncation() {
        let g = Grid::new(8, 1.0).unwrap();
        let good = encode_snapshot(&ComplexField::zeros(g), 0.0);

        let mut bad = good.clone();
        bad[0] = b'X';
        assert_eq!(decode_snapshot(&bad).unwrap_err().to_string(), "not a NLSA snapshot");

        let mut bad = good.clone();
        bad[4] = 2;
        assert!(matches!(decode_snapshot(&bad), Err(NlsError::BadVersion(2))));

        assert!(matches!(
            decode_snapshot(&good[..good.len() - 1]),
            Err(NlsError::Truncated { .. })
        ));
        assert!(matches!(decode_snapshot(&good[..20]), Err(NlsError::Truncated { .. })));
    }
}
