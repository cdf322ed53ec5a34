//! Shift-invert Lanczos with full reorthogonalisation, locking and explicit
//! restarts.
//!
//! The operator is `B = (A − μ)⁻¹` with μ below the spectrum of `A`, so the
//! wanted eigenvalues of `A` (the lowest ones) are the largest of `B`.

use nalgebra::{DMatrix, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::ldlt::EnvelopeLdlt;
use crate::error::{Error, Result};
use crate::sparse::SymCsr;

#[derive(Debug, Clone, Copy)]
pub(crate) struct LanczosParams {
    /// Number of eigenvalues below `threshold` (from the inertia count).
    pub wanted: usize,
    pub threshold: f64,
    /// Absolute residual tolerance ‖Ax − λx‖.
    pub tol: f64,
    pub max_restarts: usize,
    pub seed: u64,
}

#[derive(Debug, Clone, Default)]
pub(crate) struct LanczosOutcome {
    pub values: Vec<f64>,
    pub residuals: Vec<f64>,
    pub steps: usize,
    pub restarts: usize,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn axpy(alpha: f64, x: &[f64], y: &mut [f64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// Two passes of classical Gram–Schmidt against `basis`.
fn orthogonalize(w: &mut [f64], basis: &[Vec<f64>]) {
    for _ in 0..2 {
        for v in basis {
            let c = dot(v, w);
            axpy(-c, v, w);
        }
    }
}

pub(crate) fn lowest_eigenpairs(a: &SymCsr, factor: &EnvelopeLdlt, p: LanczosParams) -> Result<LanczosOutcome> {
    let n = a.dim();
    let mu = factor.shift();
    let mut rng = ChaCha8Rng::seed_from_u64(p.seed);
    let mut locked: Vec<Vec<f64>> = Vec::new();
    let mut out = LanczosOutcome::default();
    let mut start: Vec<f64> = (0..n).map(|_| rng.gen::<f64>() - 0.5).collect();
    let mut scratch = vec![0.0; n];

    while locked.len() < p.wanted {
        if out.restarts > p.max_restarts {
            return Err(Error::NoConvergence(format!(
                "{} of {} eigenvalues below {} after {} Lanczos steps and {} restarts",
                locked.len(),
                p.wanted,
                p.threshold,
                out.steps,
                out.restarts
            )));
        }
        let remaining = p.wanted - locked.len();
        let max_dim = (2 * remaining + 40).max(60).min(n - locked.len());
        orthogonalize(&mut start, &locked);
        let nrm = norm(&start);
        if nrm == 0.0 {
            return Err(Error::NoConvergence("start vector lies in the locked subspace".into()));
        }
        let mut basis: Vec<Vec<f64>> = vec![start.iter().map(|x| x / nrm).collect()];
        let mut alpha: Vec<f64> = Vec::new();
        let mut beta: Vec<f64> = Vec::new();
        let mut converged: Vec<Vec<f64>> = Vec::new();
        let mut restart_vec: Option<Vec<f64>> = None;

        loop {
            let j = basis.len() - 1;
            let mut w = basis[j].clone();
            factor.solve_in_place(&mut w);
            out.steps += 1;
            let a_j = dot(&basis[j], &w);
            alpha.push(a_j);
            orthogonalize(&mut w, &locked);
            orthogonalize(&mut w, &basis);
            let b_j = norm(&w);
            let dim = alpha.len();
            let exhausted = b_j <= 1e-12 * a_j.abs().max(f64::MIN_POSITIVE);
            let full = dim >= max_dim;
            if dim % 5 == 0 || exhausted || full || dim >= remaining {
                // Ritz analysis of the projected tridiagonal matrix
                let mut t = DMatrix::<f64>::zeros(dim, dim);
                for k in 0..dim {
                    t[(k, k)] = alpha[k];
                    if k + 1 < dim {
                        t[(k, k + 1)] = beta[k];
                        t[(k + 1, k)] = beta[k];
                    }
                }
                let eig = SymmetricEigen::new(t);
                let mut order: Vec<usize> = (0..dim).collect();
                order.sort_by(|&x, &y| eig.eigenvalues[y].total_cmp(&eig.eigenvalues[x]));

                // ‖(A − μ) v_{j+1}‖ turns the Lanczos residual into an A-residual
                let next_scale = if exhausted {
                    0.0
                } else {
                    let v: Vec<f64> = w.iter().map(|x| x / b_j).collect();
                    a.matvec(&v, &mut scratch);
                    axpy(-mu, &v, &mut scratch);
                    norm(&scratch)
                };
                let mut good = Vec::new();
                let mut pending = Vec::new();
                for &k in order.iter().take(remaining) {
                    let nu = eig.eigenvalues[k];
                    if nu <= 0.0 {
                        continue;
                    }
                    let lambda = mu + 1.0 / nu;
                    let res = (b_j * eig.eigenvectors[(dim - 1, k)]).abs() / nu * next_scale;
                    if lambda >= p.threshold + p.tol {
                        continue;
                    }
                    if res <= p.tol {
                        good.push(k);
                    } else {
                        pending.push(k);
                    }
                }
                let done = good.len() == remaining || ((exhausted || full) && !good.is_empty());
                if done || exhausted || full {
                    let ritz = |k: usize| -> Vec<f64> {
                        let mut x = vec![0.0; n];
                        for (i, v) in basis.iter().enumerate() {
                            axpy(eig.eigenvectors[(i, k)], v, &mut x);
                        }
                        x
                    };
                    for &k in &good {
                        converged.push(ritz(k));
                    }
                    if !pending.is_empty() {
                        let mut r = vec![0.0; n];
                        for &k in &pending {
                            axpy(1.0, &ritz(k), &mut r);
                        }
                        restart_vec = Some(r);
                    }
                    break;
                }
            }
            beta.push(b_j);
            basis.push(w.iter().map(|x| x / b_j).collect());
        }

        for mut x in converged {
            orthogonalize(&mut x, &locked);
            let nx = norm(&x);
            if nx < 0.5 {
                // direction already captured by a locked vector
                continue;
            }
            x.iter_mut().for_each(|v| *v /= nx);
            a.matvec(&x, &mut scratch);
            let rq = dot(&x, &scratch);
            axpy(-rq, &x, &mut scratch);
            let res = norm(&scratch);
            if res > p.tol {
                // residual estimate was optimistic; keep refining this direction
                let r = restart_vec.get_or_insert_with(|| vec![0.0; n]);
                axpy(1.0, &x, r);
                continue;
            }
            out.values.push(rq);
            out.residuals.push(res);
            locked.push(x);
        }
        if locked.len() < p.wanted {
            out.restarts += 1;
            let mut fresh: Vec<f64> = (0..n).map(|_| rng.gen::<f64>() - 0.5).collect();
            if let Some(r) = restart_vec {
                let scale = norm(&r).max(f64::MIN_POSITIVE);
                let fn_ = norm(&fresh);
                for (f, ri) in fresh.iter_mut().zip(&r) {
                    *f = ri / scale + 1e-2 * *f / fn_;
                }
            }
            start = fresh;
        }
    }
    Ok(out)
}
