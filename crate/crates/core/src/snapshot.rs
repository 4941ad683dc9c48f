//! Flat binary state snapshots.
//!
//! Layout, all little-endian: `d: u64`, `n: u64`, then `L, s, λ, ε, t` as
//! `f64`, followed by `n^d` interleaved `(re, im)` `f64` pairs in row-major
//! grid order.

use std::io::{Read, Write};
use std::sync::Arc;

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::grid::{ComplexField, Grid};
use crate::scalar::Real;

pub const HEADER_BYTES: usize = 7 * 8;

#[derive(Clone, Debug, PartialEq)]
pub struct Snapshot {
    pub dim: u64,
    pub n: u64,
    pub length: f64,
    pub s: f64,
    pub lambda: f64,
    pub eps: f64,
    pub t: f64,
    pub values: Vec<Complex<f64>>,
}

impl Snapshot {
    pub fn from_field<T: Real>(u: &ComplexField<T>, s: T, lambda: T, eps: T, t: T) -> Self {
        let g = u.grid();
        Snapshot {
            dim: g.dim() as u64,
            n: g.n() as u64,
            length: g.length().to_f64_lossy(),
            s: s.to_f64_lossy(),
            lambda: lambda.to_f64_lossy(),
            eps: eps.to_f64_lossy(),
            t: t.to_f64_lossy(),
            values: u
                .values()
                .iter()
                .map(|v| Complex::new(v.re.to_f64_lossy(), v.im.to_f64_lossy()))
                .collect(),
        }
    }

    pub fn to_field(&self) -> Result<ComplexField<f64>> {
        let grid: Arc<Grid<f64>> = Grid::new(self.dim as usize, self.n as usize, self.length)?;
        ComplexField::new(grid, self.values.clone())
    }

    pub fn write_to<W: Write>(&self, mut w: W) -> Result<()> {
        w.write_all(&self.dim.to_le_bytes())?;
        w.write_all(&self.n.to_le_bytes())?;
        for x in [self.length, self.s, self.lambda, self.eps, self.t] {
            w.write_all(&x.to_le_bytes())?;
        }
        for v in &self.values {
            w.write_all(&v.re.to_le_bytes())?;
            w.write_all(&v.im.to_le_bytes())?;
        }
        Ok(())
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(HEADER_BYTES + 16 * self.values.len());
        self.write_to(&mut out).expect("writing to a Vec cannot fail");
        out
    }

    pub fn read_from<R: Read>(mut r: R) -> Result<Self> {
        let mut word = [0u8; 8];
        let mut next = |r: &mut R| -> Result<[u8; 8]> {
            r.read_exact(&mut word)
                .map_err(|e| Error::Snapshot(format!("truncated snapshot: {e}")))?;
            Ok(word)
        };
        let dim = u64::from_le_bytes(next(&mut r)?);
        let n = u64::from_le_bytes(next(&mut r)?);
        if !(dim == 1 || dim == 2) || n == 0 || n > (1 << 20) {
            return Err(Error::Snapshot(format!("implausible header d = {dim}, n = {n}")));
        }
        let mut f = [0.0; 5];
        for x in f.iter_mut() {
            *x = f64::from_le_bytes(next(&mut r)?);
        }
        let count = n.pow(dim as u32) as usize;
        let mut values = Vec::with_capacity(count);
        for _ in 0..count {
            let re = f64::from_le_bytes(next(&mut r)?);
            let im = f64::from_le_bytes(next(&mut r)?);
            values.push(Complex::new(re, im));
        }
        let mut rest = [0u8; 1];
        if r.read(&mut rest)? != 0 {
            return Err(Error::Snapshot("trailing bytes after snapshot".to_string()));
        }
        Ok(Snapshot {
            dim,
            n,
            length: f[0],
            s: f[1],
            lambda: f[2],
            eps: f[3],
            t: f[4],
            values,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn layout_is_bit_exact() {
        let g = Grid::<f64>::new(1, 8, 8.0).unwrap();
        let u = ComplexField::sample(g, |x| Complex::new(x[0], -x[0])).unwrap();
        let snap = Snapshot::from_field(&u, 0.5, -1.0, 0.1, 0.25);
        let bytes = snap.to_bytes();
        assert_eq!(bytes.len(), HEADER_BYTES + 8 * 16);
        assert_eq!(&bytes[0..8], &1u64.to_le_bytes());
        assert_eq!(&bytes[8..16], &8u64.to_le_bytes());
        assert_eq!(&bytes[16..24], &8.0f64.to_le_bytes());
        assert_eq!(&bytes[48..56], &0.25f64.to_le_bytes());
        // first point x = -4: (re, im) = (-4, 4)
        assert_eq!(&bytes[56..64], &(-4.0f64).to_le_bytes());
        assert_eq!(&bytes[64..72], &4.0f64.to_le_bytes());
    }

    #[test]
    fn rejects_truncated_and_padded_input() {
        let g = Grid::<f64>::new(1, 8, 8.0).unwrap();
        let snap = Snapshot::from_field(&ComplexField::zeros(g), 0.5, 1.0, 0.0, 0.0);
        let bytes = snap.to_bytes();
        assert!(Snapshot::read_from(&bytes[..bytes.len() - 1]).is_err());
        let mut longer = bytes.clone();
        longer.push(0);
        assert!(Snapshot::read_from(&longer[..]).is_err());
    }

    proptest! {
        #[test]
        fn round_trip(vals in proptest::collection::vec((-1e3f64..1e3, -1e3f64..1e3), 64), t in 0.0f64..10.0) {
            let g = Grid::<f64>::new(2, 8, 3.0).unwrap();
            let u = ComplexField::new(g, vals.iter().map(|&(a, b)| Complex::new(a, b)).collect()).unwrap();
            let snap = Snapshot::from_field(&u, 0.3, 2.0, 0.01, t);
            let back = Snapshot::read_from(&snap.to_bytes()[..]).unwrap();
            prop_assert_eq!(&back, &snap);
            let field = back.to_field().unwrap();
            prop_assert_eq!(field.values(), u.values());
        }
    }
}
