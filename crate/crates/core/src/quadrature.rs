//! Globally adaptive Gauss–Legendre quadrature for piecewise smooth integrands.
//!
//! The caller supplies breakpoints (jumps, kinks, mode-entry points); every
//! piece between consecutive breakpoints is integrated separately and the
//! piece with the largest error estimate is bisected until the summed
//! estimate drops below the absolute tolerance.

use std::collections::BinaryHeap;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Points per panel.
pub const GAUSS_ORDER: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct QuadratureConfig {
    pub abs_tol: f64,
    pub max_intervals: usize,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        Self {
            abs_tol: 1e-10,
            max_intervals: 20_000,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Integral {
    pub value: f64,
    pub error_estimate: f64,
    pub intervals: usize,
}

/// Nodes and weights of the `n`-point Gauss–Legendre rule on [-1, 1].
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(n, x);
        if d != 0.0 {
            dp = d;
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

fn rule() -> &'static (Vec<f64>, Vec<f64>) {
    static RULE: OnceLock<(Vec<f64>, Vec<f64>)> = OnceLock::new();
    RULE.get_or_init(|| gauss_legendre(GAUSS_ORDER))
}

fn panel<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> f64 {
    let (x, w) = rule();
    let c = 0.5 * (a + b);
    let r = 0.5 * (b - a);
    x.iter().zip(w).map(|(xi, wi)| wi * f(c + r * xi)).sum::<f64>() * r
}

struct Piece {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl Piece {
    fn new<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> Self {
        let whole = panel(f, a, b);
        let m = 0.5 * (a + b);
        let halves = panel(f, a, m) + panel(f, m, b);
        Piece {
            a,
            b,
            value: halves,
            error: (whole - halves).abs(),
        }
    }
}

impl PartialEq for Piece {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == std::cmp::Ordering::Equal
    }
}
impl Eq for Piece {}
impl PartialOrd for Piece {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Piece {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.error
            .total_cmp(&other.error)
            .then_with(|| other.a.total_cmp(&self.a))
    }
}

/// Integrate `f` over `[breakpoints[0], breakpoints[last]]`.
///
/// Breakpoints must be sorted; duplicates and empty pieces are skipped.
pub fn integrate<F: Fn(f64) -> f64>(
    f: F,
    breakpoints: &[f64],
    cfg: &QuadratureConfig,
) -> Result<Integral> {
    if breakpoints.len() < 2 {
        return Ok(Integral {
            value: 0.0,
            error_estimate: 0.0,
            intervals: 0,
        });
    }
    if breakpoints.windows(2).any(|w| w[1] < w[0]) || breakpoints.iter().any(|x| !x.is_finite()) {
        return Err(Error::invalid(
            "breakpoints",
            "must be finite and sorted ascending",
        ));
    }
    let mut heap: BinaryHeap<Piece> = breakpoints
        .windows(2)
        .filter(|w| w[1] > w[0])
        .map(|w| Piece::new(&f, w[0], w[1]))
        .collect();
    loop {
        let total_err: f64 = heap.iter().map(|p| p.error).sum();
        if total_err <= cfg.abs_tol {
            break;
        }
        if heap.len() >= cfg.max_intervals {
            return Err(Error::Quadrature {
                intervals: heap.len(),
                estimate: total_err,
            });
        }
        let worst = heap.pop().expect("non-empty while error is positive");
        let m = 0.5 * (worst.a + worst.b);
        if m <= worst.a || m >= worst.b {
            // interval exhausted at machine resolution; accept what we have
            heap.push(Piece { error: 0.0, ..worst });
            continue;
        }
        heap.push(Piece::new(&f, worst.a, m));
        heap.push(Piece::new(&f, m, worst.b));
    }
    // sum in a fixed order so results do not depend on heap layout
    let mut pieces = heap.into_vec();
    pieces.sort_by(|p, q| p.a.total_cmp(&q.a));
    Ok(Integral {
        value: pieces.iter().map(|p| p.value).sum(),
        error_estimate: pieces.iter().map(|p| p.error).sum(),
        intervals: pieces.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn rule_integrates_polynomials_exactly() {
        let (x, w) = gauss_legendre(GAUSS_ORDER);
        assert_relative_eq!(w.iter().sum::<f64>(), 2.0, epsilon = 1e-14);
        // degree 30 is within the 2n-1 exactness range
        let s: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(30)).sum();
        assert_relative_eq!(s, 2.0 / 31.0, epsilon = 1e-14);
    }

    #[test]
    fn kink_and_jump() {
        let cfg = QuadratureConfig::default();
        let r = integrate(|x: f64| x.abs(), &[-1.0, 0.0, 2.0], &cfg).unwrap();
        assert_relative_eq!(r.value, 2.5, epsilon = 1e-13);
        let r = integrate(|x: f64| if x < 0.3 { 1.0 } else { 3.0 }, &[0.0, 0.3, 1.0], &cfg).unwrap();
        assert_relative_eq!(r.value, 0.3 + 2.1, epsilon = 1e-13);
    }

    #[test]
    fn endpoint_power_singularity() {
        // sqrt behaviour at a mode-entry point
        let cfg = QuadratureConfig::default();
        let r = integrate(|x: f64| x.max(0.0).powf(1.5), &[0.0, 1.0], &cfg).unwrap();
        assert!((r.value - 0.4).abs() < 1e-10);
        let r = integrate(|x: f64| x.max(0.0).sqrt(), &[0.0, 1.0], &cfg).unwrap();
        assert!((r.value - 2.0 / 3.0).abs() < 1e-10);
    }

    #[test]
    fn cap_is_reported() {
        let cfg = QuadratureConfig {
            abs_tol: 0.0,
            max_intervals: 8,
        };
        let err = integrate(|x: f64| x.sin(), &[0.0, 100.0], &cfg).unwrap_err();
        assert!(matches!(err, Error::Quadrature { .. }));
    }
}
