//! Run-length encoded recurrence raster.
//!
//! Little-endian layout:
//!
//! ```text
//! magic   b"CHXR"
//! version u32 (= 1)
//! n_rows  u32
//! n_boxes u32
//! a, b    f64, f64          partition of [a, b]
//! n_rows times:
//!   lambda  f64
//!   n_runs  u32
//!   n_runs times: start u32, len u32
//! ```

use std::io::{self, Read, Write};

use chainrec_core::chain_graph::ChainSetApprox;
use thiserror::Error;

pub const MAGIC: [u8; 4] = *b"CHXR";
pub const VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum RasterError {
    #[error("not a raster file (bad magic)")]
    BadMagic,
    #[error("unsupported raster version {0}")]
    BadVersion(u32),
    #[error("unexpected EOF in raster")]
    UnexpectedEof,
    #[error("corrupt raster: {0}")]
    Corrupt(String),
    #[error("raster io: {0}")]
    Io(io::Error),
}

impl From<io::Error> for RasterError {
    fn from(e: io::Error) -> Self {
        if e.kind() == io::ErrorKind::UnexpectedEof {
            RasterError::UnexpectedEof
        } else {
            RasterError::Io(e)
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RasterRow {
    pub lambda: f64,
    /// `(start, len)` runs of recurrent boxes, increasing and disjoint.
    pub runs: Vec<(u32, u32)>,
}

impl RasterRow {
    pub fn from_covering(lambda: f64, c: &ChainSetApprox) -> Self {
        RasterRow { lambda, runs: c.runs() }
    }

    pub fn boxes(&self) -> impl Iterator<Item = u32> + '_ {
        self.runs.iter().flat_map(|&(s, l)| s..s + l)
    }

    pub fn count(&self) -> u64 {
        self.runs.iter().map(|&(_, l)| l as u64).sum()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Raster {
    pub n_boxes: u32,
    pub a: f64,
    pub b: f64,
    pub rows: Vec<RasterRow>,
}

impl Raster {
    pub fn box_bounds(&self, i: u32) -> (f64, f64) {
        let h = (self.b - self.a) / self.n_boxes as f64;
        (self.a + i as f64 * h, self.a + (i + 1) as f64 * h)
    }

    pub fn write_to<W: Write>(&self, w: &mut W) -> io::Result<()> {
        w.write_all(&MAGIC)?;
        w.write_all(&VERSION.to_le_bytes())?;
        w.write_all(&(self.rows.len() as u32).to_le_bytes())?;
        w.write_all(&self.n_boxes.to_le_bytes())?;
        w.write_all(&self.a.to_le_bytes())?;
        w.write_all(&self.b.to_le_bytes())?;
        for row in &self.rows {
            w.write_all(&row.lambda.to_le_bytes())?;
            w.write_all(&(row.runs.len() as u32).to_le_bytes())?;
            for &(s, l) in &row.runs {
                w.write_all(&s.to_le_bytes())?;
                w.write_all(&l.to_le_bytes())?;
            }
        }
        Ok(())
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut v = Vec::new();
        self.write_to(&mut v).expect("write to Vec");
        v
    }

    pub fn read_from<R: Read>(r: &mut R) -> Result<Self, RasterError> {
        let mut magic = [0u8; 4];
        r.read_exact(&mut magic)?;
        if magic != MAGIC {
            return Err(RasterError::BadMagic);
        }
        let version = read_u32(r)?;
        if version != VERSION {
            return Err(RasterError::BadVersion(version));
        }
        let n_rows = read_u32(r)?;
        let n_boxes = read_u32(r)?;
        let a = read_f64(r)?;
        let b = read_f64(r)?;
        if n_boxes == 0 || !(a < b) {
            return Err(RasterError::Corrupt("empty partition".into()));
        }
        let mut rows = Vec::new();
        for _ in 0..n_rows {
            let lambda = read_f64(r)?;
            let n_runs = read_u32(r)?;
            let mut runs = Vec::new();
            let mut end = 0u64;
            for _ in 0..n_runs {
                let s = read_u32(r)?;
                let l = read_u32(r)?;
                if l == 0 || (s as u64) < end || s as u64 + l as u64 > n_boxes as u64 {
                    return Err(RasterError::Corrupt(format!("bad run ({s}, {l}) at lambda {lambda}")));
                }
                end = s as u64 + l as u64;
                runs.push((s, l));
            }
            rows.push(RasterRow { lambda, runs });
        }
        let mut tail = [0u8; 1];
        if r.read(&mut tail)? != 0 {
            return Err(RasterError::Corrupt("trailing bytes".into()));
        }
        Ok(Raster { n_boxes, a, b, rows })
    }

    pub fn from_bytes(mut bytes: &[u8]) -> Result<Self, RasterError> {
        Self::read_from(&mut bytes)
    }
}

fn read_u32<R: Read>(r: &mut R) -> Result<u32, RasterError> {
    let mut b = [0u8; 4];
    r.read_exact(&mut b)?;
    Ok(u32::from_le_bytes(b))
}

fn read_f64<R: Read>(r: &mut R) -> Result<f64, RasterError> {
    let mut b = [0u8; 8];
    r.read_exact(&mut b)?;
    Ok(f64::from_le_bytes(b))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> Raster {
        Raster {
            n_boxes: 16,
            a: 0.0,
            b: 1.0,
            rows: vec![
                RasterRow { lambda: 3.8, runs: vec![(0, 2), (5, 3)] },
                RasterRow { lambda: 3.9, runs: vec![] },
                RasterRow { lambda: 4.0, runs: vec![(0, 16)] },
            ],
        }
    }

    #[test]
    fn round_trip() {
        let r = sample();
        assert_eq!(Raster::from_bytes(&r.to_bytes()).unwrap(), r);
    }

    #[test]
    fn truncation_is_eof() {
        let bytes = sample().to_bytes();
        for cut in [3, 10, 30, bytes.len() - 1] {
            let e = Raster::from_bytes(&bytes[..cut]).unwrap_err();
            assert_eq!(e.to_string(), "unexpected EOF in raster");
        }
    }

    #[test]
    fn header_checks() {
        let mut bytes = sample().to_bytes();
        bytes[4] = 2;
        assert!(matches!(Raster::from_bytes(&bytes), Err(RasterError::BadVersion(2))));
        bytes[0] = b'X';
        assert!(matches!(Raster::from_bytes(&bytes), Err(RasterError::BadMagic)));
    }

    #[test]
    fn overlapping_runs_rejected() {
        let mut r = sample();
        r.rows[0].runs = vec![(0, 3), (2, 1)];
        assert!(matches!(Raster::from_bytes(&r.to_bytes()), Err(RasterError::Corrupt(_))));
    }
}
