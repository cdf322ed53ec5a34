//! Compressed-row storage for symmetric matrices (both triangles stored).

use std::io::Write;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct SymCsr {
    n: usize,
    row_ptr: Vec<usize>,
    col_idx: Vec<usize>,
    values: Vec<f64>,
}

impl SymCsr {
    /// Build from `(row, col, value)` triplets; duplicates are summed. Every
    /// off-diagonal entry must be supplied for both triangles with the same
    /// value bit for bit.
    pub fn from_triplets(n: usize, triplets: &[(usize, usize, f64)]) -> Result<Self> {
        let mut sorted: Vec<(usize, usize, f64)> = triplets.to_vec();
        if sorted.iter().any(|&(r, c, v)| r >= n || c >= n || !v.is_finite()) {
            return Err(Error::invalid("sparse matrix", "entry out of bounds or not finite"));
        }
        sorted.sort_by(|a, b| (a.0, a.1).cmp(&(b.0, b.1)));
        let mut row_ptr = vec![0usize; n + 1];
        let mut col_idx = Vec::with_capacity(sorted.len());
        let mut values: Vec<f64> = Vec::with_capacity(sorted.len());
        let mut last: Option<(usize, usize)> = None;
        for (r, c, v) in sorted {
            if last == Some((r, c)) {
                *values.last_mut().expect("previous entry exists") += v;
            } else {
                col_idx.push(c);
                values.push(v);
                row_ptr[r + 1] += 1;
                last = Some((r, c));
            }
        }
        for i in 0..n {
            row_ptr[i + 1] += row_ptr[i];
        }
        let m = SymCsr {
            n,
            row_ptr,
            col_idx,
            values,
        };
        if !m.is_exactly_symmetric() {
            return Err(Error::invalid("sparse matrix", "entries are not exactly symmetric"));
        }
        Ok(m)
    }

    pub fn from_diagonal(d: &[f64]) -> Self {
        SymCsr {
            n: d.len(),
            row_ptr: (0..=d.len()).collect(),
            col_idx: (0..d.len()).collect(),
            values: d.to_vec(),
        }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    /// Column indices and values of row `i`, sorted by column.
    pub fn row(&self, i: usize) -> (&[usize], &[f64]) {
        let r = self.row_ptr[i]..self.row_ptr[i + 1];
        (&self.col_idx[r.clone()], &self.values[r])
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        let (cols, vals) = self.row(i);
        match cols.binary_search(&j) {
            Ok(k) => vals[k],
            Err(_) => 0.0,
        }
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.get(i, i)).collect()
    }

    pub fn entries(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        (0..self.n).flat_map(move |i| {
            let (c, v) = self.row(i);
            c.iter().zip(v).map(move |(&j, &x)| (i, j, x))
        })
    }

    pub fn is_exactly_symmetric(&self) -> bool {
        self.entries().all(|(i, j, v)| self.get(j, i).to_bits() == v.to_bits())
    }

    pub fn matvec(&self, x: &[f64], y: &mut [f64]) {
        for (i, yi) in y.iter_mut().enumerate().take(self.n) {
            let (c, v) = self.row(i);
            *yi = c.iter().zip(v).map(|(&j, &a)| a * x[j]).sum();
        }
    }

    /// Smallest and largest Gershgorin disc endpoints.
    pub fn gershgorin_bounds(&self) -> (f64, f64) {
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for i in 0..self.n {
            let (c, v) = self.row(i);
            let mut d = 0.0;
            let mut r = 0.0;
            for (&j, &a) in c.iter().zip(v) {
                if j == i {
                    d = a;
                } else {
                    r += a.abs();
                }
            }
            lo = lo.min(d - r);
            hi = hi.max(d + r);
        }
        (lo, hi)
    }

    /// Largest `i - j` over nonzeros.
    pub fn bandwidth(&self) -> usize {
        self.entries().map(|(i, j, _)| i.saturating_sub(j)).max().unwrap_or(0)
    }

    pub fn to_dense(&self) -> nalgebra::DMatrix<f64> {
        let mut m = nalgebra::DMatrix::zeros(self.n, self.n);
        for (i, j, v) in self.entries() {
            m[(i, j)] = v;
        }
        m
    }

    /// `self + c·I`.
    pub fn shifted(&self, c: f64) -> SymCsr {
        let mut t: Vec<(usize, usize, f64)> = self.entries().collect();
        t.extend((0..self.n).map(|i| (i, i, c)));
        SymCsr::from_triplets(self.n, &t).expect("shift preserves symmetry")
    }

    /// `self · s` for a scalar s.
    pub fn scaled(&self, s: f64) -> SymCsr {
        SymCsr {
            values: self.values.iter().map(|v| v * s).collect(),
            ..self.clone()
        }
    }

    /// One `row col value` line per stored entry, zero-based indices, 17
    /// significant digits.
    pub fn write_coo<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "% {} {} {}", self.n, self.n, self.nnz())?;
        for (i, j, v) in self.entries() {
            writeln!(w, "{i} {j} {v:.16e}")?;
        }
        Ok(())
    }
}
