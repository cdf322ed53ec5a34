//! Symmetric tridiagonal matrices: Sturm counts and bisection.

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct Tridiagonal {
    diag: Vec<f64>,
    off: Vec<f64>,
}

impl Tridiagonal {
    /// `off[i]` couples rows `i` and `i + 1`.
    pub fn new(diag: Vec<f64>, off: Vec<f64>) -> Result<Self> {
        if diag.is_empty() || off.len() + 1 != diag.len() {
            return Err(Error::invalid(
                "tridiagonal matrix",
                format!("{} diagonal and {} off-diagonal entries", diag.len(), off.len()),
            ));
        }
        Ok(Tridiagonal { diag, off })
    }

    pub fn len(&self) -> usize {
        self.diag.len()
    }

    pub fn is_empty(&self) -> bool {
        self.diag.is_empty()
    }

    pub fn diag(&self) -> &[f64] {
        &self.diag
    }

    pub fn off(&self) -> &[f64] {
        &self.off
    }

    pub fn gershgorin_bounds(&self) -> (f64, f64) {
        let n = self.len();
        (0..n)
            .map(|i| {
                let left = if i > 0 { self.off[i - 1].abs() } else { 0.0 };
                let right = if i + 1 < n { self.off[i].abs() } else { 0.0 };
                (self.diag[i] - left - right, self.diag[i] + left + right)
            })
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), (a, b)| (lo.min(a), hi.max(b)))
    }

    /// All eigenvalues strictly below `threshold`, ascending, each located by
    /// bisection to a few ulps.
    pub fn eigenvalues_below(&self, threshold: f64) -> Vec<f64> {
        let count = sturm_count(self, threshold);
        (0..count).map(|k| self.kth_eigenvalue(k)).collect()
    }

    /// The `k`-th smallest eigenvalue (0-based).
    pub fn kth_eigenvalue(&self, k: usize) -> f64 {
        let (mut lo, mut hi) = self.gershgorin_bounds();
        let pad = f64::EPSILON * (lo.abs().max(hi.abs()) + 1.0);
        lo -= pad;
        hi += pad;
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if sturm_count(self, mid) > k {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        0.5 * (lo + hi)
    }

    pub fn smallest_eigenvalue(&self) -> f64 {
        self.kth_eigenvalue(0)
    }
}

/// Number of eigenvalues of `t` strictly below `x`.
///
/// Pivots of the LDLᵀ factorization of `t − x` are tracked; an exactly zero
/// (or underflowing) pivot is replaced by a tiny positive one so that an
/// eigenvalue equal to `x` is not counted.
pub fn sturm_count(t: &Tridiagonal, x: f64) -> usize {
    let max_e2 = t.off.iter().map(|e| e * e).fold(1.0, f64::max);
    let pivmin = f64::MIN_POSITIVE * max_e2;
    let mut count = 0;
    let mut q = t.diag[0] - x;
    if q.abs() < pivmin {
        q = pivmin;
    }
    if q < 0.0 {
        count += 1;
    }
    for i in 1..t.diag.len() {
        let e = t.off[i - 1];
        q = t.diag[i] - x - e * e / q;
        if q.abs() < pivmin {
            q = pivmin;
        }
        if q < 0.0 {
            count += 1;
        }
    }
    count
}
