//! Envelope (variable-band) LDLᵀ factorization without pivoting.
//!
//! For grid operators numbered column by column the envelope of row `i`
//! reaches back roughly one grid column, so fill-in stays inside it. The
//! factorization is used for two things: the signs of the pivots give the
//! inertia of `A − s·I` (Sylvester's law), and the factors apply
//! `(A − s·I)⁻¹` inside shift-invert Lanczos.

use crate::error::{Error, Result};
use crate::sparse::SymCsr;

/// Pivots smaller than this times the row norm count as breakdown.
const BREAKDOWN_RATIO: f64 = 1e-14;

#[derive(Debug, Clone)]
pub struct EnvelopeLdlt {
    shift: f64,
    first: Vec<usize>,
    offset: Vec<usize>,
    lower: Vec<f64>,
    pivots: Vec<f64>,
    negative: usize,
}

impl EnvelopeLdlt {
    /// Factor `a − shift·I`.
    pub fn factor(a: &SymCsr, shift: f64) -> Result<Self> {
        let n = a.dim();
        let mut first = Vec::with_capacity(n);
        let mut offset = Vec::with_capacity(n + 1);
        offset.push(0);
        for i in 0..n {
            let (cols, _) = a.row(i);
            let f = cols.first().copied().unwrap_or(i).min(i);
            first.push(f);
            offset.push(offset[i] + (i - f));
        }
        let mut lower = vec![0.0; offset[n]];
        let mut pivots = vec![0.0; n];
        let mut negative = 0;

        for i in 0..n {
            let fi = first[i];
            let (cols, vals) = a.row(i);
            let mut diag = -shift;
            let mut row_norm = shift.abs();
            let (done, rest) = lower.split_at_mut(offset[i]);
            let row = &mut rest[..i - fi];
            for (&j, &v) in cols.iter().zip(vals) {
                row_norm += v.abs();
                if j < i {
                    row[j - fi] = v;
                } else if j == i {
                    diag += v;
                }
            }
            // row[k - fi] holds t_k = l_ik·d_k once k has been processed
            for j in fi..i {
                let fj = first[j];
                let k0 = fi.max(fj);
                let lj = &done[offset[j]..offset[j] + (j - fj)];
                let dot: f64 = row[k0 - fi..j - fi]
                    .iter()
                    .zip(&lj[k0 - fj..])
                    .map(|(t, l)| t * l)
                    .sum();
                row[j - fi] -= dot;
            }
            let mut d = diag;
            for j in fi..i {
                let t = row[j - fi];
                let l = t / pivots[j];
                d -= t * l;
                row[j - fi] = l;
            }
            if !(d.abs() > BREAKDOWN_RATIO * row_norm) {
                return Err(Error::FactorizationBreakdown { shift, row: i, pivot: d });
            }
            if d < 0.0 {
                negative += 1;
            }
            pivots[i] = d;
        }
        Ok(EnvelopeLdlt {
            shift,
            first,
            offset,
            lower,
            pivots,
            negative,
        })
    }

    pub fn dim(&self) -> usize {
        self.pivots.len()
    }

    pub fn shift(&self) -> f64 {
        self.shift
    }

    /// Number of eigenvalues of the factored matrix below the shift.
    pub fn negative_pivots(&self) -> usize {
        self.negative
    }

    /// Stored entries of L.
    pub fn envelope_size(&self) -> usize {
        self.lower.len()
    }

    /// Overwrite `b` with `(A − shift·I)⁻¹ b`.
    pub fn solve_in_place(&self, b: &mut [f64]) {
        let n = self.dim();
        for i in 0..n {
            let fi = self.first[i];
            let row = &self.lower[self.offset[i]..self.offset[i + 1]];
            let s: f64 = row.iter().zip(&b[fi..i]).map(|(l, y)| l * y).sum();
            b[i] -= s;
        }
        for (x, d) in b.iter_mut().zip(&self.pivots) {
            *x /= d;
        }
        for i in (0..n).rev() {
            let fi = self.first[i];
            let xi = b[i];
            let row = &self.lower[self.offset[i]..self.offset[i + 1]];
            for (bj, l) in b[fi..i].iter_mut().zip(row) {
                *bj -= l * xi;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn laplacian_2d(nx: usize, ny: usize) -> SymCsr {
        let idx = |i: usize, j: usize| i * ny + j;
        let mut t = Vec::new();
        for i in 0..nx {
            for j in 0..ny {
                t.push((idx(i, j), idx(i, j), 4.0));
                if i + 1 < nx {
                    t.push((idx(i, j), idx(i + 1, j), -1.0));
                    t.push((idx(i + 1, j), idx(i, j), -1.0));
                }
                if j + 1 < ny {
                    t.push((idx(i, j), idx(i, j + 1), -1.0));
                    t.push((idx(i, j + 1), idx(i, j), -1.0));
                }
            }
        }
        SymCsr::from_triplets(nx * ny, &t).unwrap()
    }

    #[test]
    fn inertia_matches_closed_form() {
        let (nx, ny) = (9, 6);
        let a = laplacian_2d(nx, ny);
        let mut eig: Vec<f64> = Vec::new();
        for p in 1..=nx {
            for q in 1..=ny {
                let s = |k: usize, n: usize| 4.0 * (k as f64 * std::f64::consts::PI / (2.0 * (n as f64 + 1.0))).sin().powi(2);
                eig.push(s(p, nx) + s(q, ny));
            }
        }
        for &shift in &[0.3, 1.234, 2.9, 5.5, 7.7] {
            let f = EnvelopeLdlt::factor(&a, shift).unwrap();
            assert_eq!(f.negative_pivots(), eig.iter().filter(|&&e| e < shift).count());
        }
    }

    #[test]
    fn solve_matches_dense() {
        let a = laplacian_2d(7, 5);
        let f = EnvelopeLdlt::factor(&a, 1.1).unwrap();
        let n = a.dim();
        let x: Vec<f64> = (0..n).map(|i| ((i * 7 % 11) as f64) - 5.0).collect();
        let mut b = vec![0.0; n];
        a.shifted(-1.1).matvec(&x, &mut b);
        f.solve_in_place(&mut b);
        for (u, v) in b.iter().zip(&x) {
            assert!((u - v).abs() < 1e-10);
        }
    }

    #[test]
    fn singular_shift_breaks_down() {
        let a = SymCsr::from_diagonal(&[1.0, 2.0, 3.0]);
        let err = EnvelopeLdlt::factor(&a, 2.0).unwrap_err();
        assert!(matches!(err, Error::FactorizationBreakdown { row: 1, .. }));
    }
}
