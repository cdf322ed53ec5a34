//! The bound side of the Lieb–Thirring-type inequality
//!
//! ```text
//! tr H₋^σ ≤ r(σ,1) · L^cl_{σ,1} · I,   I = ∫ Σ_j (λ₁(ω₀) − λ_j(ω(ξ)))₊^{σ+1/2} dξ
//! ```
//!
//! together with the closed forms it is compared against: Riesz means,
//! weak-coupling expansions and Dirichlet/Neumann bracketing sums.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::eigensolve::Spectrum;
use crate::error::{Error, Result};
use crate::geometry::WaveguideGeometry;
use crate::quadrature::{integrate, Integral, QuadratureConfig};
use crate::special::{j01, ln_gamma};
use crate::transverse::{cross_section_spectrum, ground_level};

/// Riesz order σ, axial dimension d and threshold λ₁(ω₀).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundSpec {
    pub sigma: f64,
    pub dimension: usize,
    pub threshold: f64,
}

impl BoundSpec {
    /// σ ≥ 1/2 and d = 1, the range in which the inequality holds.
    pub fn new(sigma: f64, threshold: f64) -> Result<Self> {
        if !(sigma >= 0.5 && sigma.is_finite()) {
            return Err(Error::invalid("Riesz order", format!("σ = {sigma} must be at least 1/2")));
        }
        if !threshold.is_finite() {
            return Err(Error::invalid("threshold", format!("{threshold}")));
        }
        Ok(BoundSpec {
            sigma,
            dimension: 1,
            threshold,
        })
    }

    /// Spec with the exact λ₁(ω₀) of `geom` as threshold.
    pub fn for_geometry(sigma: f64, geom: &WaveguideGeometry) -> Result<Self> {
        BoundSpec::new(sigma, ground_level(&geom.asymptotic_cross_section())?)
    }
}

/// Everything needed to audit one comparison.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ReportDiagnostics {
    pub quadrature_intervals: usize,
    pub quadrature_error: f64,
    /// Axial positions where a transverse level crosses the threshold.
    pub mode_entry_points: Vec<f64>,
    /// Maximal number of sub-threshold transverse levels over ξ.
    pub max_transverse_modes: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub solve: Option<SolveSummary>,
}

/// Discrete side of a report.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct SolveSummary {
    pub cells_per_width: usize,
    pub h_xi: f64,
    pub h_eta: f64,
    pub axial_extent: (f64, f64),
    pub unknowns: usize,
    /// Discrete λ₁(ω₀) used as the threshold of the Riesz mean.
    pub discrete_threshold: f64,
    pub eigenvalues: Vec<f64>,
    pub certified_count: usize,
    pub max_residual: f64,
    /// Relative discretization error of the Riesz mean (Richardson).
    pub eps_disc: Option<f64>,
    pub observed_order: Option<f64>,
    /// Riesz mean extrapolated to zero grid step.
    pub extrapolated_riesz_mean: Option<f64>,
    /// Fractional Dirichlet cuts and Neumann/crack nodes in the finest grid.
    pub fractional_cuts: usize,
    pub neumann_nodes: usize,
    pub crack_copies: usize,
}

/// One σ of one scenario. Field names are part of the output format.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub sigma: f64,
    /// Excess factor r(σ, 1).
    pub r: f64,
    /// Classical constant L^cl_{σ,1}.
    #[serde(rename = "Lcl")]
    pub lcl: f64,
    pub integral: f64,
    pub bound: f64,
    /// tr H₋^σ; absent when only the bound side was evaluated.
    pub riesz_mean: Option<f64>,
    pub slack_ratio: Option<f64>,
    pub diagnostics: ReportDiagnostics,
}

impl BoundReport {
    /// Attach the discrete side. A zero bound with a zero Riesz mean has
    /// slack 0.
    pub fn with_riesz_mean(mut self, riesz_mean: f64, solve: SolveSummary) -> Self {
        self.riesz_mean = Some(riesz_mean);
        self.slack_ratio = Some(if self.bound > 0.0 {
            riesz_mean / self.bound
        } else if riesz_mean == 0.0 {
            0.0
        } else {
            f64::INFINITY
        });
        self.diagnostics.solve = Some(solve);
        self
    }

    /// Whether `riesz_mean ≤ bound·(1 + eps)`.
    pub fn holds_within(&self, eps: f64) -> bool {
        self.slack_ratio.is_none_or(|s| s <= 1.0 + eps)
    }
}

/// `L^cl_{σ,d} = Γ(σ+1) / (2^d π^{d/2} Γ(σ + d/2 + 1))`.
pub fn classical_constant(sigma: f64, d: usize) -> f64 {
    let d = d as f64;
    (ln_gamma(sigma + 1.0) - d * std::f64::consts::LN_2 - 0.5 * d * PI.ln() - ln_gamma(sigma + 0.5 * d + 1.0)).exp()
}

/// Best known excess factor r(σ, d) over the classical constant: 1 for
/// σ ≥ 3/2, 2 for 1 ≤ σ < 3/2, and for 1/2 ≤ σ < 1 2 in d = 1, 4 in d ≥ 2.
pub fn excess_factor(sigma: f64, d: usize) -> Result<f64> {
    if d == 0 {
        return Err(Error::invalid("dimension", "d must be at least 1"));
    }
    if !(sigma >= 0.5) {
        return Err(Error::out_of_range("Riesz order", format!("no excess factor for σ = {sigma} < 1/2")));
    }
    Ok(if sigma >= 1.5 {
        1.0
    } else if sigma >= 1.0 || d == 1 {
        2.0
    } else {
        4.0
    })
}

/// `Σ_j (threshold − Λ_j)₊^σ` over a list of eigenvalues.
pub fn riesz_sum(eigenvalues: &[f64], threshold: f64, sigma: f64) -> f64 {
    eigenvalues
        .iter()
        .map(|&v| threshold - v)
        .filter(|&g| g > 0.0)
        .fold(0.0, |acc, g| acc + g.powf(sigma))
}

/// tr H₋^σ for the eigenvalues in `eigs`, measured from `spec.threshold`.
pub fn riesz_mean(eigs: &Spectrum, spec: &BoundSpec) -> f64 {
    riesz_sum(&eigs.eigenvalues, spec.threshold, spec.sigma)
}

/// Transverse gap sum `Σ_j (threshold − λ_j(ω(ξ)))₊^p`.
fn gap_sum(geom: &WaveguideGeometry, xi: f64, threshold: f64, p: f64) -> Result<(f64, usize)> {
    let s = cross_section_spectrum(&geom.cross_section_at(xi), threshold)?;
    Ok((riesz_sum(&s.eigenvalues, threshold, p), s.len()))
}

fn mode_count(geom: &WaveguideGeometry, xi: f64, threshold: f64) -> Result<usize> {
    Ok(cross_section_spectrum(&geom.cross_section_at(xi), threshold)?.len())
}

/// Points in `(a, b)` where the number of sub-threshold transverse levels
/// changes, located by sampling and bisection.
fn mode_entry_points(geom: &WaveguideGeometry, a: f64, b: f64, threshold: f64) -> Result<Vec<f64>> {
    const SAMPLES: usize = 256;
    let mut out = Vec::new();
    let xs: Vec<f64> = (0..=SAMPLES).map(|k| a + (b - a) * k as f64 / SAMPLES as f64).collect();
    let mut counts = Vec::with_capacity(xs.len());
    for &x in &xs {
        counts.push(mode_count(geom, x, threshold)?);
    }
    for k in 0..SAMPLES {
        if counts[k] == counts[k + 1] {
            continue;
        }
        let (mut lo, mut hi) = (xs[k], xs[k + 1]);
        let c_lo = counts[k];
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if mode_count(geom, mid, threshold)? == c_lo {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        out.push(0.5 * (lo + hi));
    }
    Ok(out)
}

/// Breakpoints for the bound integrand: geometry breakpoints plus
/// mode-entry points, clipped to the support.
fn integrand_breakpoints(geom: &WaveguideGeometry, threshold: f64) -> Result<(Vec<f64>, Vec<f64>)> {
    let (lo, hi) = geom.support();
    let mut bp: Vec<f64> = geom.breakpoints().into_iter().filter(|x| *x >= lo && *x <= hi).collect();
    bp.push(lo);
    bp.push(hi);
    bp.sort_by(f64::total_cmp);
    bp.dedup();
    let mut entries = Vec::new();
    for w in bp.windows(2) {
        if w[1] > w[0] {
            entries.extend(mode_entry_points(geom, w[0], w[1], threshold)?);
        }
    }
    bp.extend(entries.iter().copied());
    bp.sort_by(f64::total_cmp);
    bp.dedup();
    Ok((bp, entries))
}

/// `I = ∫ Σ_j (threshold − λ_j(ω(ξ)))₊^{σ+1/2} dξ` over all sub-threshold
/// transverse levels.
pub fn bound_integral(geom: &WaveguideGeometry, spec: &BoundSpec, cfg: &QuadratureConfig) -> Result<Integral> {
    bound_integral_with_points(geom, spec, cfg).map(|(i, _, _)| i)
}

fn bound_integral_with_points(geom: &WaveguideGeometry, spec: &BoundSpec, cfg: &QuadratureConfig) -> Result<(Integral, Vec<f64>, usize)> {
    if !(spec.sigma >= 0.5) {
        return Err(Error::invalid("Riesz order", format!("σ = {} must be at least 1/2", spec.sigma)));
    }
    geom.validate()?;
    let (bp, entries) = integrand_breakpoints(geom, spec.threshold)?;
    let p = spec.sigma + 0.5;
    let first_error = std::cell::RefCell::new(None);
    let max_modes = std::cell::Cell::new(0usize);
    let f = |x: f64| match gap_sum(geom, x, spec.threshold, p) {
        Ok((v, n)) => {
            max_modes.set(max_modes.get().max(n));
            v
        }
        Err(e) => {
            first_error.borrow_mut().get_or_insert(e);
            0.0
        }
    };
    let integral = integrate(f, &bp, cfg)?;
    if let Some(e) = first_error.into_inner() {
        return Err(e);
    }
    Ok((integral, entries, max_modes.get()))
}

/// Bound side of the inequality: `r(σ,1)·L^cl_{σ,1}·I`.
pub fn lt_bound(geom: &WaveguideGeometry, spec: &BoundSpec, cfg: &QuadratureConfig) -> Result<BoundReport> {
    let (integral, entries, modes) = bound_integral_with_points(geom, spec, cfg)?;
    let r = excess_factor(spec.sigma, spec.dimension)?;
    let lcl = classical_constant(spec.sigma, spec.dimension);
    Ok(BoundReport {
        sigma: spec.sigma,
        r,
        lcl,
        integral: integral.value,
        bound: r * lcl * integral.value,
        riesz_mean: None,
        slack_ratio: None,
        diagnostics: ReportDiagnostics {
            quadrature_intervals: integral.intervals,
            quadrature_error: integral.error_estimate,
            mode_entry_points: entries,
            max_transverse_modes: modes,
            solve: None,
        },
    })
}

/// Tube integral through Faber–Krahn:
/// `∫ (πj₀₁²/A₀ − πj₀₁²/A(ξ))₊^{σ+1/2} dξ`, with A₀ the asymptotic area.
/// Only valid while `A(ξ) ≤ 2A₀`, where `λ₂(ω) ≥ 2πj₀₁²/A ≥ λ₁(ω₀)` rules
/// out a second sub-threshold level; larger areas are rejected.
pub fn faber_krahn_integral<F: Fn(f64) -> f64>(
    area: F,
    breakpoints: &[f64],
    asymptotic_area: f64,
    spec: &BoundSpec,
    cfg: &QuadratureConfig,
) -> Result<Integral> {
    if !(spec.sigma >= 0.5) {
        return Err(Error::invalid("Riesz order", format!("σ = {} must be at least 1/2", spec.sigma)));
    }
    if !(asymptotic_area > 0.0) {
        return Err(Error::invalid("cross-section area", format!("{asymptotic_area} must be positive")));
    }
    let c = PI * j01() * j01();
    let p = spec.sigma + 0.5;
    let too_big = std::cell::Cell::new(None::<f64>);
    let f = |x: f64| {
        let a = area(x);
        if a > 2.0 * asymptotic_area * (1.0 + 1e-12) {
            too_big.set(Some(a));
        }
        (c / asymptotic_area - c / a).max(0.0).powf(p)
    };
    let out = integrate(f, breakpoints, cfg)?;
    if let Some(a) = too_big.get() {
        return Err(Error::invalid(
            "cross-section area",
            format!(
                "A = {a} exceeds 2·A(ω₀) = {}; the second level may drop below threshold (λ₂ ≥ 2πj₀₁²/A fails to certify a single mode)",
                2.0 * asymptotic_area
            ),
        ));
    }
    Ok(out)
}

/// [`faber_krahn_integral`] for a radial tube, with `A(ξ) = π r(ξ)²`.
pub fn faber_krahn_bound_integral(geom: &WaveguideGeometry, spec: &BoundSpec, cfg: &QuadratureConfig) -> Result<Integral> {
    match geom {
        WaveguideGeometry::TubeRadial { radius, .. } => {
            let (lo, hi) = geom.support();
            let mut bp: Vec<f64> = geom.breakpoints().into_iter().filter(|x| *x >= lo && *x <= hi).collect();
            bp.extend([lo, hi]);
            bp.sort_by(f64::total_cmp);
            bp.dedup();
            faber_krahn_integral(|x| geom.cross_section_at(x).area(), &bp, PI * radius * radius, spec, cfg)
        }
        _ => Err(Error::invalid("geometry", "Faber–Krahn route needs a tube")),
    }
}

/// Lower bound on the single strip eigenvalue for the bump αf, from the
/// σ = 1/2 inequality expanded in α:
/// `π² − π⁴F₁²α² + 3π⁴F₁F₂α³ − (9/4 F₂² + 4F₁F₃)π⁴α⁴`, truncated after
/// `order` (2, 3 or 4). `moments` are `F_n = ∫ fⁿ`.
pub fn weak_coupling_lower(moments: &[f64], alpha: f64, order: usize) -> Result<f64> {
    if !(2..=4).contains(&order) {
        return Err(Error::invalid("expansion order", format!("{order} must be 2, 3 or 4")));
    }
    if moments.len() < order - 1 {
        return Err(Error::invalid("moments", format!("order {order} needs F₁..F_{}", order - 1)));
    }
    if !(alpha >= 0.0) {
        return Err(Error::invalid("coupling", format!("α = {alpha} must be nonnegative")));
    }
    let pi2 = PI * PI;
    let pi4 = pi2 * pi2;
    let f1 = moments[0];
    let mut v = pi2 - pi4 * f1 * f1 * alpha.powi(2);
    if order >= 3 {
        v += 3.0 * pi4 * f1 * moments[1] * alpha.powi(3);
    }
    if order >= 4 {
        v -= (2.25 * moments[1] * moments[1] + 4.0 * f1 * moments[2]) * pi4 * alpha.powi(4);
    }
    Ok(v)
}

/// Leading weak-coupling asymptote `π² − π⁴F₁²α²` of the bound state.
pub fn weak_coupling_asymptote(f1: f64, alpha: f64) -> f64 {
    let pi2 = PI * PI;
    pi2 - pi2 * pi2 * f1 * f1 * alpha * alpha
}

/// Bracketing of tr H₋^σ for the unit strip with a boundary Neumann window
/// of length α: `Σ_{n≥n₀} (3π²/4 − n²π²/α²)₊^σ` with `n₀ = 1` (Dirichlet
/// bracket, lower) and `n₀ = 0` (Neumann bracket, upper).
pub fn bracket_bounds(alpha: f64, spec: &BoundSpec) -> Result<(f64, f64)> {
    if !(alpha > 0.0 && alpha.is_finite()) {
        return Err(Error::invalid("window length", format!("α = {alpha} must be positive")));
    }
    let pi2 = PI * PI;
    let top = 0.75 * pi2;
    let mut lower = 0.0;
    for n in 1.. {
        let g = top - (n * n) as f64 * pi2 / (alpha * alpha);
        if g <= 0.0 {
            break;
        }
        lower += g.powf(spec.sigma);
    }
    Ok((lower, lower + top.powf(spec.sigma)))
}

/// Strong-coupling slope `L^cl_{σ,1}·(3π²/4)^{σ+1/2}` of tr H₋^σ / α for
/// the boundary window.
pub fn strong_coupling_slope(sigma: f64) -> f64 {
    classical_constant(sigma, 1) * (0.75 * PI * PI).powf(sigma + 0.5)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Profile;
    use approx::assert_relative_eq;

    fn pi2() -> f64 {
        PI * PI
    }

    #[test]
    fn classical_constants() {
        assert_relative_eq!(classical_constant(0.5, 1), 0.25, max_relative = 1e-13);
        assert_relative_eq!(classical_constant(1.5, 1), 0.1875, max_relative = 1e-13);
        assert_relative_eq!(classical_constant(1.0, 2), 1.0 / (8.0 * PI), max_relative = 1e-13);
    }

    #[test]
    fn excess_factors() {
        assert_eq!(excess_factor(2.0, 3).unwrap(), 1.0);
        assert_eq!(excess_factor(0.5, 1).unwrap(), 2.0);
        assert_eq!(excess_factor(0.7, 2).unwrap(), 4.0);
        assert_eq!(excess_factor(1.2, 3).unwrap(), 2.0);
        assert!(excess_factor(0.4, 1).is_err());
    }

    #[test]
    fn riesz_mean_examples() {
        let t = pi2();
        assert!((riesz_sum(&[8.0, 9.0], t, 0.5) - 2.2998).abs() < 1e-4);
        assert_eq!(riesz_sum(&[], t, 0.5), 0.0);
        assert_relative_eq!(riesz_sum(&[t - 1.0], t, 1.0), 1.0, max_relative = 1e-15);
    }

    #[test]
    fn window_integral_is_exact() {
        let g = WaveguideGeometry::neumann_window(1.0, 0.0, 1.0, 1.0).unwrap();
        let spec = BoundSpec::for_geometry(0.5, &g).unwrap();
        let i = bound_integral(&g, &spec, &QuadratureConfig::default()).unwrap();
        assert_relative_eq!(i.value, 0.75 * pi2(), max_relative = 1e-12);
        let rep = lt_bound(&g, &spec, &QuadratureConfig::default()).unwrap();
        assert_relative_eq!(rep.bound, 3.0 * pi2() / 8.0, max_relative = 1e-12);
        for (alpha, b, sigma) in [(2.5, 0.75, 1.0), (0.7, 0.9, 1.5)] {
            let g = WaveguideGeometry::neumann_window(1.0, -1.0, alpha, b).unwrap();
            let spec = BoundSpec::for_geometry(sigma, &g).unwrap();
            let i = bound_integral(&g, &spec, &QuadratureConfig::default()).unwrap();
            let exact = alpha * (pi2() - pi2() / (4.0 * b * b)).powf(sigma + 0.5);
            assert_relative_eq!(i.value, exact, max_relative = 1e-12);
        }
    }

    #[test]
    fn rectangular_bump_integral() {
        let g = WaveguideGeometry::strip_bump(1.0, Profile::rectangular(0.0, 1.0, 1.0).unwrap()).unwrap();
        let spec = BoundSpec::for_geometry(0.5, &g).unwrap();
        let rep = lt_bound(&g, &spec, &QuadratureConfig::default()).unwrap();
        assert_relative_eq!(rep.integral, 0.75 * pi2(), max_relative = 1e-12);
        assert_relative_eq!(rep.bound, 3.0 * pi2() / 8.0, max_relative = 1e-12);
        assert_eq!(rep.diagnostics.max_transverse_modes, 1);
    }

    #[test]
    fn multimode_bump_sums_all_levels() {
        // width 2.5: levels π²/6.25 and 4π²/6.25 are below π²
        let g = WaveguideGeometry::strip_bump(1.0, Profile::rectangular(0.0, 2.0, 1.5).unwrap()).unwrap();
        let spec = BoundSpec::for_geometry(1.0, &g).unwrap();
        let i = bound_integral(&g, &spec, &QuadratureConfig::default()).unwrap();
        let exact = 2.0 * ((pi2() - pi2() / 6.25).powf(1.5) + (pi2() - 4.0 * pi2() / 6.25).powf(1.5));
        assert_relative_eq!(i.value, exact, max_relative = 1e-12);
    }

    #[test]
    fn smooth_multimode_bump_has_entry_points() {
        let g = WaveguideGeometry::strip_bump(1.0, Profile::smooth_bump(-1.0, 1.0, 1.5).unwrap()).unwrap();
        let spec = BoundSpec::for_geometry(0.5, &g).unwrap();
        let rep = lt_bound(&g, &spec, &QuadratureConfig::default()).unwrap();
        // second level enters where 1 + f = 2, i.e. cos²(πξ/2) = 2/3
        let x = (2.0_f64 / 3.0).sqrt().acos() * 2.0 / PI;
        let pts = &rep.diagnostics.mode_entry_points;
        assert!(pts.iter().any(|p| (p + x).abs() < 1e-12));
        assert!(pts.iter().any(|p| (p - x).abs() < 1e-12));
        assert_eq!(rep.diagnostics.max_transverse_modes, 2);
    }

    #[test]
    fn unperturbed_integral_vanishes() {
        let g = WaveguideGeometry::strip_bump(1.0, Profile::rectangular(0.0, 1.0, 0.0).unwrap()).unwrap();
        let spec = BoundSpec::for_geometry(0.5, &g).unwrap();
        let rep = lt_bound(&g, &spec, &QuadratureConfig::default()).unwrap();
        assert_eq!(rep.integral, 0.0);
        assert_eq!(rep.bound, 0.0);
    }

    #[test]
    fn tube_routes_agree() {
        let g = WaveguideGeometry::tube(1.0, Profile::rectangular(0.0, 2.0, 0.2).unwrap()).unwrap();
        let spec = BoundSpec::for_geometry(0.5, &g).unwrap();
        let cfg = QuadratureConfig::default();
        let exact = bound_integral(&g, &spec, &cfg).unwrap().value;
        let fk = faber_krahn_bound_integral(&g, &spec, &cfg).unwrap().value;
        let closed = 2.0 * j01() * j01() * (1.0 - 1.0 / 1.44);
        assert_relative_eq!(exact, closed, max_relative = 1e-12);
        assert_relative_eq!(fk, exact, max_relative = 1e-10);
        assert!((closed - 3.534169).abs() < 1e-6);
        let rep = lt_bound(&g, &spec, &cfg).unwrap();
        assert!((rep.bound - 1.767085).abs() < 1e-6);
    }

    #[test]
    fn faber_krahn_examples() {
        let spec = BoundSpec::new(0.5, j01() * j01()).unwrap();
        let cfg = QuadratureConfig::default();
        let flat = faber_krahn_integral(|_| PI, &[0.0, 1.0], PI, &spec, &cfg).unwrap();
        assert_eq!(flat.value, 0.0);
        let double = faber_krahn_integral(|_| 2.0 * PI, &[0.0, 1.0], PI, &spec, &cfg).unwrap();
        assert_relative_eq!(double.value, 0.5 * j01() * j01(), max_relative = 1e-13);
        assert!((double.value - 2.8916).abs() < 1e-4);
        assert!(faber_krahn_integral(|_| 2.1 * PI, &[0.0, 1.0], PI, &spec, &cfg).is_err());
    }

    #[test]
    fn weak_coupling_examples() {
        let p4 = pi2() * pi2();
        let v = weak_coupling_lower(&[1.0, 1.0, 1.0], 0.1, 2).unwrap();
        assert!((v - 8.8955).abs() < 1e-4);
        assert_eq!(weak_coupling_lower(&[1.0, 0.75, 0.625], 0.0, 4).unwrap(), pi2());
        let v3 = weak_coupling_lower(&[1.0, 0.75], 0.1, 3).unwrap();
        assert_relative_eq!(v3, pi2() - p4 * 0.01 + 3.0 * p4 * 0.75 * 0.001, max_relative = 1e-14);
        assert!((v3 - 9.1147).abs() < 1e-4);
        assert!(weak_coupling_lower(&[1.0], 0.1, 3).is_err());
        assert_relative_eq!(weak_coupling_asymptote(1.0, 0.1), pi2() - p4 * 0.01, max_relative = 1e-15);
    }

    #[test]
    fn bracket_examples() {
        let spec = BoundSpec::new(0.5, pi2()).unwrap();
        let (lo, hi) = bracket_bounds(4.0, &spec).unwrap();
        assert!((lo - 6.186).abs() < 1e-3);
        assert_relative_eq!(hi - lo, (0.75 * pi2()).sqrt(), max_relative = 1e-12);
        let (lo, _) = bracket_bounds(2.0 / 3.0_f64.sqrt() * 0.999, &spec).unwrap();
        assert_eq!(lo, 0.0);
        let (lo, _) = bracket_bounds(2.0 / 3.0_f64.sqrt() * 1.001, &spec).unwrap();
        assert!(lo > 0.0);
        assert!((strong_coupling_slope(0.5) - 1.850).abs() < 1e-3);
    }

    #[test]
    fn sigma_below_half_rejected() {
        assert!(BoundSpec::new(0.4, 1.0).is_err());
    }
}
