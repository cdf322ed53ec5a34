//! All eigenvalues of a sparse symmetric operator below a threshold.
//!
//! The number of such eigenvalues is certified first, by the inertia of an
//! LDLᵀ factorization of `A − threshold·I`. The eigenvalues themselves then
//! come from a dense solve (small problems) or shift-invert Lanczos, and the
//! result is rejected unless both counts agree.

mod lanczos;
mod ldlt;
mod tridiag;

use nalgebra::SymmetricEigen;
use serde::{Deserialize, Serialize};

pub use ldlt::EnvelopeLdlt;
pub use tridiag::{sturm_count, Tridiagonal};

use crate::discretize::SparseSymOperator;
use crate::error::{Error, Result};
use crate::sparse::SymCsr;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SolverMethod {
    /// Dense below `dense_cutoff`, shift-invert Lanczos above.
    Auto,
    Dense,
    Sparse,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct EigenOptions {
    /// Residual tolerance relative to |threshold|.
    pub tol: f64,
    pub method: SolverMethod,
    pub dense_cutoff: usize,
    pub max_restarts: usize,
    pub seed: u64,
}

impl Default for EigenOptions {
    fn default() -> Self {
        Self {
            tol: 1e-9,
            method: SolverMethod::Auto,
            dense_cutoff: 2000,
            max_restarts: 50,
            seed: 0x5eed_1a2c,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct SolveDiagnostics {
    pub dimension: usize,
    pub method: String,
    pub factorizations: usize,
    pub envelope_size: usize,
    pub lanczos_steps: usize,
    pub restarts: usize,
    pub lanczos_shift: Option<f64>,
}

/// Eigenvalues Λ_j of an operator below a threshold.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Spectrum {
    pub threshold: f64,
    /// Ascending, repeated according to multiplicity.
    pub eigenvalues: Vec<f64>,
    /// ‖Av − λv‖/‖v‖ for each eigenvalue.
    pub residuals: Vec<f64>,
    pub certified_count: usize,
    pub diagnostics: SolveDiagnostics,
}

impl Spectrum {
    pub fn empty(threshold: f64, dimension: usize) -> Self {
        Spectrum {
            threshold,
            eigenvalues: Vec::new(),
            residuals: Vec::new(),
            certified_count: 0,
            diagnostics: SolveDiagnostics {
                dimension,
                method: "none".into(),
                ..Default::default()
            },
        }
    }

    pub fn len(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eigenvalues.is_empty()
    }

    /// Eigenvalues closer than `1e-8·|threshold|` merged into
    /// `(mean value, multiplicity)` pairs.
    pub fn clusters(&self) -> Vec<(f64, usize)> {
        let gap = 1e-8 * self.threshold.abs().max(f64::MIN_POSITIVE);
        let mut out: Vec<(f64, usize, f64)> = Vec::new();
        for &v in &self.eigenvalues {
            match out.last_mut() {
                Some((sum, m, last)) if v - *last <= gap => {
                    *sum += v;
                    *m += 1;
                    *last = v;
                }
                _ => out.push((v, 1, v)),
            }
        }
        out.into_iter().map(|(s, m, _)| (s / m as f64, m)).collect()
    }

    pub fn max_residual(&self) -> f64 {
        self.residuals.iter().copied().fold(0.0, f64::max)
    }
}

/// Every eigenvalue of `op` strictly below `threshold`.
pub fn eigen_below(op: &SparseSymOperator, threshold: f64, opts: &EigenOptions) -> Result<Spectrum> {
    eigen_below_matrix(op.matrix(), threshold, op.spectral_lower_bound(), opts)
}

/// As [`eigen_below`], for a bare matrix. `lower_bound`, when known, must not
/// exceed the smallest eigenvalue; it only places the Lanczos shift.
pub fn eigen_below_matrix(a: &SymCsr, threshold: f64, lower_bound: Option<f64>, opts: &EigenOptions) -> Result<Spectrum> {
    let n = a.dim();
    if !threshold.is_finite() {
        return Err(Error::invalid("threshold", format!("{threshold}")));
    }
    let (g_lo, _) = a.gershgorin_bounds();
    if n == 0 || threshold <= g_lo {
        return Ok(Spectrum::empty(threshold, n));
    }
    let certify = EnvelopeLdlt::factor(a, threshold)?;
    let count = certify.negative_pivots();
    let mut diag = SolveDiagnostics {
        dimension: n,
        factorizations: 1,
        envelope_size: certify.envelope_size(),
        ..Default::default()
    };
    drop(certify);
    if count == 0 {
        diag.method = "inertia".into();
        return Ok(Spectrum {
            diagnostics: diag,
            ..Spectrum::empty(threshold, n)
        });
    }
    let tol = opts.tol * threshold.abs().max(1.0);
    let dense = match opts.method {
        SolverMethod::Dense => true,
        SolverMethod::Sparse => false,
        SolverMethod::Auto => n <= opts.dense_cutoff,
    };
    let (eigenvalues, residuals) = if dense {
        diag.method = "dense".into();
        dense_lowest(a, count)
    } else {
        diag.method = "shift-invert-lanczos".into();
        let floor = lower_bound.map_or(g_lo, |b| b.max(g_lo));
        let margin = 1e-3 * (threshold - floor).abs().max(tol);
        let mut shift = floor - margin;
        let mut factor = EnvelopeLdlt::factor(a, shift);
        diag.factorizations += 1;
        if !matches!(&factor, Ok(f) if f.negative_pivots() == 0) {
            // hint was not a lower bound after all
            shift = g_lo - margin;
            factor = EnvelopeLdlt::factor(a, shift);
            diag.factorizations += 1;
        }
        let factor = factor?;
        diag.lanczos_shift = Some(shift);
        let res = lanczos::lowest_eigenpairs(
            a,
            &factor,
            lanczos::LanczosParams {
                wanted: count,
                threshold,
                tol,
                max_restarts: opts.max_restarts,
                seed: opts.seed,
            },
        )?;
        diag.lanczos_steps = res.steps;
        diag.restarts = res.restarts;
        let mut pairs: Vec<(f64, f64)> = res.values.into_iter().zip(res.residuals).collect();
        pairs.sort_by(|x, y| x.0.total_cmp(&y.0));
        pairs.into_iter().unzip()
    };
    if eigenvalues.len() != count || eigenvalues.iter().any(|&v| v >= threshold + tol) {
        return Err(Error::InertiaMismatch {
            threshold,
            certified: count,
            found: eigenvalues.iter().filter(|&&v| v < threshold).count(),
        });
    }
    if let Some(r) = residuals.iter().find(|&&r| r > tol) {
        return Err(Error::NoConvergence(format!("residual {r:e} exceeds tolerance {tol:e}")));
    }
    Ok(Spectrum {
        threshold,
        eigenvalues,
        residuals,
        certified_count: count,
        diagnostics: diag,
    })
}

fn dense_lowest(a: &SymCsr, count: usize) -> (Vec<f64>, Vec<f64>) {
    let m = a.to_dense();
    let eig = SymmetricEigen::new(m.clone());
    let mut order: Vec<usize> = (0..a.dim()).collect();
    order.sort_by(|&x, &y| eig.eigenvalues[x].total_cmp(&eig.eigenvalues[y]));
    order
        .into_iter()
        .take(count)
        .map(|k| {
            let v = eig.eigenvectors.column(k);
            let lambda = eig.eigenvalues[k];
            let r = (&m * v - v * lambda).norm() / v.norm();
            (lambda, r)
        })
        .unzip()
}

/// All eigenvalues of a small dense symmetric matrix, ascending.
pub fn dense_eigenvalues(a: &SymCsr) -> Vec<f64> {
    let mut v: Vec<f64> = SymmetricEigen::new(a.to_dense()).eigenvalues.iter().copied().collect();
    v.sort_by(f64::total_cmp);
    v
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dirichlet_1d(n: usize, h: f64) -> SymCsr {
        let s = 1.0 / (h * h);
        let mut t = Vec::new();
        for i in 0..n {
            t.push((i, i, 2.0 * s));
            if i + 1 < n {
                t.push((i, i + 1, -s));
                t.push((i + 1, i, -s));
            }
        }
        SymCsr::from_triplets(n, &t).unwrap()
    }

    #[test]
    fn second_difference_two_eigenvalues() {
        let a = dirichlet_1d(999, 1e-3);
        let fd = |k: f64| 4e6 * (k * std::f64::consts::PI * 5e-4).sin().powi(2);
        for method in [SolverMethod::Dense, SolverMethod::Sparse] {
            let opts = EigenOptions { method, ..Default::default() };
            let s = eigen_below_matrix(&a, 50.0, None, &opts).unwrap();
            assert_eq!(s.certified_count, 2);
            assert_eq!(s.len(), 2);
            assert!((s.eigenvalues[0] - fd(1.0)).abs() < 1e-8);
            assert!((s.eigenvalues[1] - fd(2.0)).abs() < 1e-8);
            assert!(s.max_residual() <= 1e-9 * 50.0);
        }
    }

    #[test]
    fn below_gershgorin_is_empty() {
        let a = dirichlet_1d(50, 0.02);
        let (lo, _) = a.gershgorin_bounds();
        let s = eigen_below_matrix(&a, lo - 1.0, None, &EigenOptions::default()).unwrap();
        assert!(s.is_empty());
        assert_eq!(s.certified_count, 0);
    }

    #[test]
    fn diagonal_matrix() {
        let a = SymCsr::from_diagonal(&(1..=10).map(f64::from).collect::<Vec<_>>());
        for method in [SolverMethod::Dense, SolverMethod::Sparse] {
            let s = eigen_below_matrix(&a, 4.5, None, &EigenOptions { method, ..Default::default() }).unwrap();
            assert_eq!(s.certified_count, 4);
            for (k, v) in s.eigenvalues.iter().enumerate() {
                assert!((v - (k + 1) as f64).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn exact_degeneracy_is_found_by_restarting() {
        let a = SymCsr::from_diagonal(&[2.0, 1.0, 1.0, 1.0, 5.0, 6.0, 7.0, 8.0]);
        let s = eigen_below_matrix(&a, 3.0, Some(0.5), &EigenOptions { method: SolverMethod::Sparse, ..Default::default() }).unwrap();
        assert_eq!(s.eigenvalues.len(), 4);
        assert_eq!(s.clusters().len(), 2);
        assert_eq!(s.clusters()[0].1, 3);
    }

    #[test]
    fn threshold_on_eigenvalue_breaks_down() {
        let a = SymCsr::from_diagonal(&[1.0, 2.0, 3.0]);
        let err = eigen_below_matrix(&a, 2.0, None, &EigenOptions::default()).unwrap_err();
        assert!(matches!(err, Error::FactorizationBreakdown { .. }));
        let s = eigen_below_matrix(&a, 2.0 * (1.0 - 1e-9), None, &EigenOptions::default()).unwrap();
        assert_eq!(s.certified_count, 1);
    }
}
