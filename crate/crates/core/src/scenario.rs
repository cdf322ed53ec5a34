//! End-to-end verification runs: assemble, solve, compare with the bound.
//!
//! A scenario is solved on a ladder of grids refined by a constant integer
//! ratio. The Riesz means of consecutive levels give a Richardson estimate
//! of the discretization error, which becomes the tolerance `ε_disc` of the
//! comparison `riesz_mean ≤ bound·(1 + ε_disc)`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::discretize::{assemble_strip, assemble_tube_axisym, GridSpec, SparseSymOperator};
use crate::eigensolve::{eigen_below, EigenOptions, Spectrum};
use crate::error::{Error, Result};
use crate::geometry::{domain_truncation, profile_moments, Profile, WaveguideGeometry};
use crate::ltbound::{
    bracket_bounds, lt_bound, riesz_sum, weak_coupling_asymptote, weak_coupling_lower, BoundReport, BoundSpec, SolveSummary,
};
use crate::quadrature::QuadratureConfig;
use crate::special::MAX_BESSEL_ORDER;
use crate::transverse::{cross_section_spectrum, ground_level};

/// Grid ladder and axial truncation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GridConfig {
    /// Transverse cells on the finest level.
    pub cells_per_width: usize,
    /// Number of levels, each coarser one dividing the cell count by
    /// `refinement_ratio`.
    pub levels: usize,
    pub refinement_ratio: usize,
    pub axial_ratio: f64,
    /// Relative size at which a bound state is considered decayed.
    pub truncation_tol: f64,
    /// Upper limit on the automatic padding, in units of the asymptotic
    /// width or radius.
    pub max_padding: f64,
    /// Fixed padding on each side of the perturbation (skips the automatic
    /// choice).
    pub padding: Option<f64>,
    /// Fixed axial domain (skips padding altogether).
    pub axial_extent: Option<(f64, f64)>,
}

impl Default for GridConfig {
    fn default() -> Self {
        Self {
            cells_per_width: 100,
            levels: 3,
            refinement_ratio: 2,
            axial_ratio: 1.0,
            truncation_tol: 1e-6,
            max_padding: 30.0,
            padding: None,
            axial_extent: None,
        }
    }
}

impl GridConfig {
    /// Cell counts of the levels, coarsest first.
    pub fn ladder(&self) -> Result<Vec<usize>> {
        if self.levels == 0 || self.refinement_ratio < 2 {
            return Err(Error::invalid(
                "grid ladder",
                format!("{} levels with ratio {}", self.levels, self.refinement_ratio),
            ));
        }
        let q = self.refinement_ratio;
        let mut out = vec![self.cells_per_width];
        for _ in 1..self.levels {
            let last = *out.last().unwrap_or(&0);
            if last % q != 0 || last / q < 2 {
                return Err(Error::invalid(
                    "grid ladder",
                    format!("{} cells cannot be coarsened {} times by {q}", self.cells_per_width, self.levels - 1),
                ));
            }
            out.push(last / q);
        }
        out.reverse();
        Ok(out)
    }

    fn validate(&self) -> Result<()> {
        self.ladder()?;
        if !(self.axial_ratio.is_finite() && self.axial_ratio > 0.0) {
            return Err(Error::invalid("axial ratio", format!("{} must be positive", self.axial_ratio)));
        }
        if !(self.truncation_tol > 0.0 && self.truncation_tol < 1.0) {
            return Err(Error::invalid("truncation tolerance", format!("{} must lie in (0, 1)", self.truncation_tol)));
        }
        if !(self.max_padding > 0.0) {
            return Err(Error::invalid("maximal padding", format!("{} must be positive", self.max_padding)));
        }
        if let Some(p) = self.padding {
            if !(p > 0.0 && p.is_finite()) {
                return Err(Error::invalid("padding", format!("{p} must be positive")));
            }
        }
        if let Some((a, b)) = self.axial_extent {
            if !(a < b && a.is_finite() && b.is_finite()) {
                return Err(Error::invalid("axial extent", format!("[{a}, {b}] is not an interval")));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputConfig {
    /// Also dump the finest operator in coordinate format.
    pub write_matrix: bool,
}

/// One verification run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub name: String,
    pub geometry: WaveguideGeometry,
    #[serde(default = "default_sigma")]
    pub sigma: Vec<f64>,
    #[serde(default)]
    pub grid: GridConfig,
    #[serde(default)]
    pub quadrature: QuadratureConfig,
    #[serde(default)]
    pub eigen: EigenOptions,
    #[serde(default)]
    pub output: OutputConfig,
}

fn default_sigma() -> Vec<f64> {
    vec![0.5]
}

impl Scenario {
    pub fn new(name: impl Into<String>, geometry: WaveguideGeometry) -> Self {
        Scenario {
            name: name.into(),
            geometry,
            sigma: default_sigma(),
            grid: GridConfig::default(),
            quadrature: QuadratureConfig::default(),
            eigen: EigenOptions::default(),
            output: OutputConfig::default(),
        }
    }

    /// Unit strip with a Neumann window of length `alpha` at height `b`,
    /// starting at ξ = 0.
    pub fn corollary1(alpha: f64, b: f64) -> Result<Self> {
        Ok(Scenario::new("corollary1", WaveguideGeometry::neumann_window(1.0, 0.0, alpha, b)?))
    }

    /// Unit strip with a rectangular bulge of height `amplitude` on
    /// `[0, width]`.
    pub fn corollary2(amplitude: f64, width: f64) -> Result<Self> {
        let profile = Profile::rectangular(0.0, width, amplitude)?;
        Ok(Scenario::new("corollary2", WaveguideGeometry::strip_bump(1.0, profile)?))
    }

    /// Unit tube widened to radius `r` on `[0, width]`.
    pub fn corollary3(r: f64, width: f64) -> Result<Self> {
        let profile = Profile::rectangular(0.0, width, r - 1.0)?;
        Ok(Scenario::new("corollary3", WaveguideGeometry::tube(1.0, profile)?))
    }

    pub fn validate(&self) -> Result<()> {
        if self.name.is_empty() || self.name.chars().any(|c| !(c.is_ascii_alphanumeric() || "-_.".contains(c))) {
            return Err(Error::invalid("scenario name", format!("{:?} must be a nonempty file-name stem", self.name)));
        }
        self.geometry.validate()?;
        if self.sigma.is_empty() {
            return Err(Error::invalid("Riesz orders", "the σ list is empty"));
        }
        for &s in &self.sigma {
            BoundSpec::new(s, 1.0)?;
        }
        self.grid.validate()
    }
}

/// Asymptotic cross-section size: strip width or tube radius.
pub fn asymptotic_size(geom: &WaveguideGeometry) -> f64 {
    match geom {
        WaveguideGeometry::StripBump { width, .. } | WaveguideGeometry::StripNeumannWindow { width, .. } => *width,
        WaveguideGeometry::TubeRadial { radius, .. } => *radius,
    }
}

/// Decay scale of the deepest bound state: the largest transverse gap
/// `max V`, where `V(ξ) = (λ₁(ω₀) − λ₁(ω(ξ)))₊`, but no more than the 1D
/// weak-coupling value `(∫V)²/4`, so shallow wells get long domains.
fn transverse_gap_scale(geom: &WaveguideGeometry, threshold: f64) -> Result<f64> {
    const SAMPLES: usize = 512;
    let (a, b) = geom.support();
    let dx = (b - a) / SAMPLES as f64;
    let mut max_gap: f64 = 0.0;
    let mut integral = 0.0;
    for k in 0..SAMPLES {
        // midpoint rule: never samples exactly on a breakpoint
        let x = a + (k as f64 + 0.5) * dx;
        if let Some(l) = cross_section_spectrum(&geom.cross_section_at(x), threshold)?.lowest() {
            let v = threshold - l;
            max_gap = max_gap.max(v);
            integral += v * dx;
        }
    }
    Ok(max_gap.min(0.25 * integral * integral))
}

/// Solution of one grid level.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LevelSolve {
    pub grid: GridSpec,
    pub h_xi: f64,
    pub h_eta: f64,
    pub unknowns: usize,
    /// Discrete λ₁(ω₀) of this grid; the Riesz means are measured from it.
    pub discrete_threshold: f64,
    /// Ascending, with multiplicity (angular modes m ≥ 1 of a tube count
    /// twice).
    pub eigenvalues: Vec<f64>,
    /// Angular index of each eigenvalue (tubes only).
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub angular_indices: Vec<usize>,
    pub certified_count: usize,
    pub max_residual: f64,
    pub fractional_cuts: usize,
    pub neumann_nodes: usize,
    pub crack_copies: usize,
    /// Times the threshold sat on an eigenvalue and was nudged down.
    pub breakdown_retries: usize,
}

impl LevelSolve {
    pub fn riesz_mean(&self, sigma: f64) -> f64 {
        riesz_sum(&self.eigenvalues, self.discrete_threshold, sigma)
    }

    fn summary(&self) -> SolveSummary {
        SolveSummary {
            cells_per_width: self.grid.cells_per_width,
            h_xi: self.h_xi,
            h_eta: self.h_eta,
            axial_extent: self.grid.axial_extent,
            unknowns: self.unknowns,
            discrete_threshold: self.discrete_threshold,
            eigenvalues: self.eigenvalues.clone(),
            certified_count: self.certified_count,
            max_residual: self.max_residual,
            fractional_cuts: self.fractional_cuts,
            neumann_nodes: self.neumann_nodes,
            crack_copies: self.crack_copies,
            ..Default::default()
        }
    }
}

/// [`eigen_below`] that nudges the threshold down by a relative `1e-9`
/// when it coincides with an eigenvalue.
fn eigen_below_nudged(op: &SparseSymOperator, threshold: f64, opts: &EigenOptions, retries: &mut usize) -> Result<Spectrum> {
    match eigen_below(op, threshold, opts) {
        Err(Error::FactorizationBreakdown { .. }) => {
            *retries += 1;
            eigen_below(op, threshold * (1.0 - 1e-9), opts)
        }
        other => other,
    }
}

/// All eigenvalues of the guide below its discrete threshold on one grid.
pub fn solve_level(geom: &WaveguideGeometry, grid: &GridSpec, opts: &EigenOptions) -> Result<LevelSolve> {
    let l0 = asymptotic_size(geom);
    let (h_xi, h_eta) = grid.steps(l0);
    let mut retries = 0;
    let mut eigenvalues = Vec::new();
    let mut angular = Vec::new();
    let mut certified = 0;
    let mut max_residual: f64 = 0.0;
    let first = if geom.is_tube() {
        assemble_tube_axisym(geom, 0, grid)?
    } else {
        assemble_strip(geom, grid)?
    };
    let threshold = first.threshold_shift();
    let (unknowns, diag) = (first.dim(), first.diagnostics().clone());

    if geom.is_tube() {
        // m²/ρ² ≥ m²/r_max² bounds every mode with m > MAX_BESSEL_ORDER from below
        let (a, b) = geom.support();
        let r_max = (0..=512)
            .map(|k| {
                let x = a + (b - a) * k as f64 / 512.0;
                match geom.cross_section_at(x) {
                    crate::geometry::CrossSection::Disk { radius } => radius,
                    _ => l0,
                }
            })
            .fold(l0, f64::max)
            + h_eta;
        let m_next = (MAX_BESSEL_ORDER + 1) as f64;
        if m_next * m_next / (r_max * r_max) < threshold {
            return Err(Error::out_of_range(
                "tube bulge",
                format!("radius {r_max} admits angular modes beyond m = {MAX_BESSEL_ORDER}"),
            ));
        }
        let mut pairs: Vec<(f64, usize)> = Vec::new();
        for m in 0..=MAX_BESSEL_ORDER {
            let op = if m == 0 { first.clone() } else { assemble_tube_axisym(geom, m, grid)? };
            if op.spectral_lower_bound().is_some_and(|lb| lb >= threshold) {
                continue;
            }
            let s = eigen_below_nudged(&op, threshold, opts, &mut retries)?;
            let mult = if m == 0 { 1 } else { 2 };
            certified += mult * s.certified_count;
            max_residual = max_residual.max(s.max_residual());
            for &v in &s.eigenvalues {
                for _ in 0..mult {
                    pairs.push((v, m));
                }
            }
        }
        pairs.sort_by(|x, y| x.0.total_cmp(&y.0).then(x.1.cmp(&y.1)));
        for (v, m) in pairs {
            eigenvalues.push(v);
            angular.push(m);
        }
    } else {
        let s = eigen_below_nudged(&first, threshold, opts, &mut retries)?;
        certified = s.certified_count;
        max_residual = s.max_residual();
        eigenvalues = s.eigenvalues;
    }
    Ok(LevelSolve {
        grid: *grid,
        h_xi,
        h_eta,
        unknowns,
        discrete_threshold: threshold,
        eigenvalues,
        angular_indices: angular,
        certified_count: certified,
        max_residual,
        fractional_cuts: diag.fractional_cuts,
        neumann_nodes: diag.neumann_nodes,
        crack_copies: diag.crack_copies,
        breakdown_retries: retries,
    })
}

/// How the axial domain was chosen.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TruncationPlan {
    pub axial_extent: (f64, f64),
    /// Padding on each side of the perturbation (before alignment).
    pub padding: f64,
    /// Binding energy that set the padding, if any.
    pub decay_gap: Option<f64>,
    /// Whether the padding hit `max_padding`.
    pub capped: bool,
}

/// Axial domain of a scenario, aligned to the coarsest axial step.
///
/// The padding is `domain_truncation(gap)` in two passes: first with a
/// transverse estimate of the deepest binding energy, then with the
/// smallest binding energy found on the coarsest grid.
pub fn plan_truncation(geom: &WaveguideGeometry, grid: &GridConfig, opts: &EigenOptions) -> Result<TruncationPlan> {
    grid.validate()?;
    let l0 = asymptotic_size(geom);
    let coarsest = grid.ladder()?[0];
    let align = grid.axial_ratio * l0 / coarsest as f64;
    if let Some(extent) = grid.axial_extent {
        return Ok(TruncationPlan {
            axial_extent: extent,
            padding: f64::NAN,
            decay_gap: None,
            capped: false,
        });
    }
    let max_pad = grid.max_padding * l0;
    let fixed = |padding: f64, gap: Option<f64>, capped: bool| {
        let spec = GridSpec::around(geom, coarsest, grid.axial_ratio, padding, align);
        TruncationPlan {
            axial_extent: spec.axial_extent,
            padding,
            decay_gap: gap,
            capped,
        }
    };
    if let Some(p) = grid.padding {
        return Ok(fixed(p, None, false));
    }
    let threshold = ground_level(&geom.asymptotic_cross_section())?;
    let fallback = (5.0 * l0).min(max_pad);
    let first_gap = transverse_gap_scale(geom, threshold)?;
    let first = match domain_truncation(first_gap, grid.truncation_tol) {
        Ok(p) => p.min(max_pad),
        Err(Error::NoDecayScale { .. }) => return Ok(fixed(fallback, None, false)),
        Err(e) => return Err(e),
    };
    let trial = fixed(first, Some(first_gap), first >= max_pad);
    let spec = GridSpec {
        cells_per_width: coarsest,
        axial_ratio: grid.axial_ratio,
        axial_extent: trial.axial_extent,
    };
    let level = solve_level(geom, &spec, opts)?;
    let Some(&top) = level.eigenvalues.last() else {
        return Ok(fixed(first.max(fallback), None, false));
    };
    let gap = level.discrete_threshold - top;
    let second = match domain_truncation(gap, grid.truncation_tol) {
        Ok(p) => p,
        Err(Error::NoDecayScale { .. }) => f64::INFINITY,
        Err(e) => return Err(e),
    };
    let padding = first.max(second);
    Ok(fixed(padding.min(max_pad), Some(gap), padding >= max_pad))
}

/// Richardson extrapolation of a sequence computed on grids refined by a
/// constant ratio.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Richardson {
    pub limit: f64,
    /// Order estimated from the last three values, if available.
    pub observed_order: Option<f64>,
    /// Order used for the extrapolation: the observed one clamped to [1, 2],
    /// or 1 when it cannot be observed.
    pub order_used: f64,
    /// `|f_fine − f_coarse| / (q^p − 1)`.
    pub error_estimate: f64,
}

pub fn richardson(values: &[f64], ratio: f64) -> Option<Richardson> {
    let n = values.len();
    if n < 2 {
        return None;
    }
    let d2 = values[n - 1] - values[n - 2];
    let observed = (n >= 3).then(|| {
        let d1 = values[n - 2] - values[n - 3];
        (d1 / d2).ln() / ratio.ln()
    });
    let observed = observed.filter(|p| p.is_finite());
    let order_used = observed.map_or(1.0, |p| p.clamp(1.0, 2.0));
    let error_estimate = d2.abs() / (ratio.powf(order_used) - 1.0);
    Some(Richardson {
        limit: values[n - 1] + d2 / (ratio.powf(order_used) - 1.0),
        observed_order: observed,
        order_used,
        error_estimate,
    })
}

/// Result of [`run_scenario`] or [`bound_only`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioOutcome {
    pub name: String,
    pub geometry: WaveguideGeometry,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub truncation: Option<TruncationPlan>,
    /// Solves from coarsest to finest (empty for bound-only runs).
    pub levels: Vec<LevelSolve>,
    pub reports: Vec<BoundReport>,
    /// Reports with `slack_ratio > 1 + ε_disc`.
    pub violations: usize,
}

impl ScenarioOutcome {
    pub fn holds(&self) -> bool {
        self.violations == 0
    }

    pub fn finest(&self) -> Option<&LevelSolve> {
        self.levels.last()
    }

    /// One flat row per σ, in the fixed CSV column order.
    pub fn rows(&self) -> Vec<ReportRow> {
        self.reports
            .iter()
            .map(|r| {
                let solve = r.diagnostics.solve.as_ref();
                ReportRow {
                    name: self.name.clone(),
                    sigma: r.sigma,
                    r: r.r,
                    lcl: r.lcl,
                    integral: r.integral,
                    bound: r.bound,
                    riesz_mean: r.riesz_mean,
                    slack_ratio: r.slack_ratio,
                    eps_disc: solve.and_then(|s| s.eps_disc),
                    eigen_count: solve.map(|s| s.eigenvalues.len()),
                    cells_per_width: solve.map(|s| s.cells_per_width),
                }
            })
            .collect()
    }
}

/// Flat form of a [`BoundReport`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportRow {
    pub name: String,
    pub sigma: f64,
    pub r: f64,
    #[serde(rename = "Lcl")]
    pub lcl: f64,
    pub integral: f64,
    pub bound: f64,
    pub riesz_mean: Option<f64>,
    pub slack_ratio: Option<f64>,
    pub eps_disc: Option<f64>,
    pub eigen_count: Option<usize>,
    pub cells_per_width: Option<usize>,
}

/// Bound side only: no discretization, no eigensolve.
pub fn bound_only(s: &Scenario) -> Result<ScenarioOutcome> {
    s.validate()?;
    let reports = s
        .sigma
        .iter()
        .map(|&sigma| lt_bound(&s.geometry, &BoundSpec::for_geometry(sigma, &s.geometry)?, &s.quadrature))
        .collect::<Result<Vec<_>>>()?;
    Ok(ScenarioOutcome {
        name: s.name.clone(),
        geometry: s.geometry.clone(),
        truncation: None,
        levels: Vec::new(),
        reports,
        violations: 0,
    })
}

fn grids(s: &Scenario, plan: &TruncationPlan) -> Result<Vec<GridSpec>> {
    Ok(s.grid
        .ladder()?
        .into_iter()
        .map(|n| GridSpec {
            cells_per_width: n,
            axial_ratio: s.grid.axial_ratio,
            axial_extent: plan.axial_extent,
        })
        .collect())
}

/// For every σ: solve on each level, take the Riesz mean from the finest
/// level, its Richardson error over the bound as `ε_disc`, and compare with
/// the bound.
pub fn run_scenario(s: &Scenario) -> Result<ScenarioOutcome> {
    s.validate()?;
    let plan = plan_truncation(&s.geometry, &s.grid, &s.eigen)?;
    let levels = grids(s, &plan)?
        .iter()
        .map(|g| solve_level(&s.geometry, g, &s.eigen))
        .collect::<Result<Vec<_>>>()?;
    let finest = levels.last().ok_or_else(|| Error::invalid("grid ladder", "no levels"))?;
    let ratio = s.grid.refinement_ratio as f64;
    let mut reports = Vec::with_capacity(s.sigma.len());
    let mut violations = 0;
    for &sigma in &s.sigma {
        let spec = BoundSpec::for_geometry(sigma, &s.geometry)?;
        let base = lt_bound(&s.geometry, &spec, &s.quadrature)?;
        let means: Vec<f64> = levels.iter().map(|l| l.riesz_mean(sigma)).collect();
        let rich = richardson(&means, ratio);
        let mut summary = finest.summary();
        summary.eps_disc = rich.map(|r| if base.bound > 0.0 { r.error_estimate / base.bound } else { 0.0 });
        summary.observed_order = rich.and_then(|r| r.observed_order);
        summary.extrapolated_riesz_mean = rich.map(|r| r.limit);
        let eps = summary.eps_disc.unwrap_or(0.0);
        let report = base.with_riesz_mean(*means.last().unwrap_or(&0.0), summary);
        if !report.holds_within(eps) {
            violations += 1;
        }
        reports.push(report);
    }
    Ok(ScenarioOutcome {
        name: s.name.clone(),
        geometry: s.geometry.clone(),
        truncation: Some(plan),
        levels,
        reports,
        violations,
    })
}

/// Grid dependence of one scenario.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceLevel {
    pub cells_per_width: usize,
    pub h_eta: f64,
    pub unknowns: usize,
    pub discrete_threshold: f64,
    /// Lowest eigenvalue of the truncated guide (bound state or not).
    pub ground: f64,
    /// Eigenvalues below the discrete threshold.
    pub bound_states: Vec<f64>,
    /// `(σ, tr H₋^σ)` pairs.
    pub riesz_means: Vec<(f64, f64)>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceTable {
    pub name: String,
    pub axial_extent: (f64, f64),
    pub refinement_ratio: usize,
    pub levels: Vec<ConvergenceLevel>,
    pub threshold: Richardson,
    pub ground: Richardson,
    /// `(σ, extrapolation of tr H₋^σ)` pairs.
    pub riesz_means: Vec<(f64, Richardson)>,
}

/// Lowest eigenvalue of `op`, searching upward from the threshold.
fn ground_state(op: &SparseSymOperator, extent: f64, opts: &EigenOptions) -> Result<f64> {
    let mut excess = 1.5 * (PI / extent).powi(2);
    let mut retries = 0;
    for _ in 0..40 {
        let s = eigen_below_nudged(op, op.threshold_shift() + excess, opts, &mut retries)?;
        if let Some(&v) = s.eigenvalues.first() {
            return Ok(v);
        }
        excess *= 2.0;
    }
    Err(Error::NoConvergence("no eigenvalue found above the threshold".into()))
}

/// Solve the scenario on every level (at least three) and extrapolate the
/// threshold, the lowest eigenvalue and the Riesz means.
pub fn run_convergence(s: &Scenario) -> Result<ConvergenceTable> {
    s.validate()?;
    if s.grid.levels < 3 {
        return Err(Error::invalid("grid ladder", format!("convergence needs at least 3 levels, got {}", s.grid.levels)));
    }
    let plan = plan_truncation(&s.geometry, &s.grid, &s.eigen)?;
    let extent = plan.axial_extent.1 - plan.axial_extent.0;
    let mut levels = Vec::new();
    for g in grids(s, &plan)? {
        let solve = solve_level(&s.geometry, &g, &s.eigen)?;
        let op = if s.geometry.is_tube() {
            assemble_tube_axisym(&s.geometry, 0, &g)?
        } else {
            assemble_strip(&s.geometry, &g)?
        };
        let ground = match solve.eigenvalues.first() {
            Some(&v) => v,
            None => ground_state(&op, extent, &s.eigen)?,
        };
        levels.push(ConvergenceLevel {
            cells_per_width: g.cells_per_width,
            h_eta: solve.h_eta,
            unknowns: solve.unknowns,
            discrete_threshold: solve.discrete_threshold,
            ground,
            riesz_means: s.sigma.iter().map(|&sg| (sg, solve.riesz_mean(sg))).collect(),
            bound_states: solve.eigenvalues,
        });
    }
    let q = s.grid.refinement_ratio as f64;
    let extrapolate = |f: &dyn Fn(&ConvergenceLevel) -> f64| {
        let v: Vec<f64> = levels.iter().map(f).collect();
        richardson(&v, q).ok_or_else(|| Error::invalid("grid ladder", "too few levels"))
    };
    let threshold = extrapolate(&|l| l.discrete_threshold)?;
    let ground = extrapolate(&|l| l.ground)?;
    let riesz_means = s
        .sigma
        .iter()
        .enumerate()
        .map(|(k, &sg)| Ok((sg, extrapolate(&|l| l.riesz_means[k].1)?)))
        .collect::<Result<Vec<_>>>()?;
    Ok(ConvergenceTable {
        name: s.name.clone(),
        axial_extent: plan.axial_extent,
        refinement_ratio: s.grid.refinement_ratio,
        levels,
        threshold,
        ground,
        riesz_means,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Family {
    /// Strip with the bump `α·cos²(πξ/2)` on [−1, 1].
    Weak,
    /// Unit strip with a Neumann window of length α on its upper boundary.
    Strong,
}

impl std::str::FromStr for Family {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "weak" => Ok(Family::Weak),
            "strong" => Ok(Family::Strong),
            _ => Err(Error::invalid("asymptotic family", format!("{s:?} is neither weak nor strong"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct AsymptoticsConfig {
    pub family: Family,
    pub alphas: Vec<f64>,
    /// Riesz order of the strong family.
    pub sigma: f64,
    pub grid: GridConfig,
    pub quadrature: QuadratureConfig,
    pub eigen: EigenOptions,
}

impl Default for AsymptoticsConfig {
    fn default() -> Self {
        Self {
            family: Family::Weak,
            alphas: vec![0.05, 0.1, 0.2],
            sigma: 0.5,
            grid: GridConfig {
                truncation_tol: 1e-8,
                ..GridConfig::default()
            },
            quadrature: QuadratureConfig::default(),
            eigen: EigenOptions::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeakRow {
    pub alpha: f64,
    /// Extrapolated ground state; absent at α = 0.
    pub lambda: Option<f64>,
    /// `(π² − Λ)/α²`, to be compared with `π⁴F₁²`.
    pub scaled_gap: Option<f64>,
    /// `π² − π⁴F₁²α²`.
    pub asymptote: f64,
    /// Fourth-order lower bound on Λ.
    pub lower_bound: f64,
    /// `Λ ≥ lower_bound`.
    pub satisfied: bool,
    pub richardson_error: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StrongRow {
    pub alpha: f64,
    /// Extrapolated tr H₋^σ.
    pub trace: f64,
    pub bracket_lower: f64,
    pub bracket_upper: f64,
    pub lt_bound: f64,
    /// `bracket_lower ≤ trace ≤ min(bracket_upper, lt_bound)`.
    pub within: bool,
    pub bound_states: usize,
    pub richardson_error: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "kebab-case")]
pub enum AsymptoticsTable {
    Weak {
        /// F₁, F₂, F₃ of the unit-amplitude bump.
        moments: Vec<f64>,
        rows: Vec<WeakRow>,
    },
    Strong { sigma: f64, rows: Vec<StrongRow> },
}

/// Grid ladder of a family member: automatic padding unless the config
/// fixes the domain.
fn family_levels(geom: &WaveguideGeometry, cfg: &AsymptoticsConfig) -> Result<Vec<LevelSolve>> {
    let mut s = Scenario::new("family", geom.clone());
    s.grid = cfg.grid.clone();
    s.eigen = cfg.eigen;
    s.validate()?;
    let plan = plan_truncation(geom, &s.grid, &s.eigen)?;
    grids(&s, &plan)?.iter().map(|g| solve_level(geom, g, &s.eigen)).collect()
}

/// Weak- or strong-coupling table over `cfg.alphas`.
pub fn run_asymptotics(cfg: &AsymptoticsConfig) -> Result<AsymptoticsTable> {
    let q = cfg.grid.refinement_ratio as f64;
    for &a in &cfg.alphas {
        if !(a >= 0.0 && a.is_finite()) {
            return Err(Error::invalid("coupling parameter", format!("α = {a} must be nonnegative")));
        }
    }
    match cfg.family {
        Family::Weak => {
            let unit = Profile::smooth_bump(-1.0, 1.0, 1.0)?;
            let moments = profile_moments(&unit, 3, &cfg.quadrature)?;
            let pi2 = PI * PI;
            let mut rows = Vec::new();
            for &alpha in &cfg.alphas {
                let asymptote = weak_coupling_asymptote(moments[0], alpha);
                let lower_bound = weak_coupling_lower(&moments, alpha, 4)?;
                if alpha == 0.0 {
                    rows.push(WeakRow {
                        alpha,
                        lambda: None,
                        scaled_gap: None,
                        asymptote,
                        lower_bound,
                        satisfied: true,
                        richardson_error: None,
                    });
                    continue;
                }
                let geom = WaveguideGeometry::strip_bump(1.0, Profile::smooth_bump(-1.0, 1.0, alpha)?)?;
                let levels = family_levels(&geom, cfg)?;
                let gaps = levels
                    .iter()
                    .map(|l| {
                        l.eigenvalues
                            .first()
                            .map(|&v| l.discrete_threshold - v)
                            .ok_or_else(|| Error::NoConvergence(format!("no bound state at α = {alpha}, {} cells", l.grid.cells_per_width)))
                    })
                    .collect::<Result<Vec<f64>>>()?;
                let rich = richardson(&gaps, q);
                let gap = rich.map_or(gaps[gaps.len() - 1], |r| r.limit);
                let lambda = pi2 - gap;
                rows.push(WeakRow {
                    alpha,
                    lambda: Some(lambda),
                    scaled_gap: Some(gap / (alpha * alpha)),
                    asymptote,
                    lower_bound,
                    satisfied: lambda >= lower_bound,
                    richardson_error: rich.map(|r| r.error_estimate),
                });
            }
            Ok(AsymptoticsTable::Weak { moments, rows })
        }
        Family::Strong => {
            let spec = BoundSpec::new(cfg.sigma, PI * PI)?;
            let mut rows = Vec::new();
            for &alpha in &cfg.alphas {
                let geom = WaveguideGeometry::neumann_window(1.0, 0.0, alpha, 1.0)?;
                let (bracket_lower, bracket_upper) = bracket_bounds(alpha, &spec)?;
                let bound = lt_bound(&geom, &spec, &cfg.quadrature)?.bound;
                let levels = family_levels(&geom, cfg)?;
                let traces: Vec<f64> = levels.iter().map(|l| l.riesz_mean(cfg.sigma)).collect();
                let rich = richardson(&traces, q);
                let trace = rich.map_or(traces[traces.len() - 1], |r| r.limit);
                rows.push(StrongRow {
                    alpha,
                    trace,
                    bracket_lower,
                    bracket_upper,
                    lt_bound: bound,
                    within: bracket_lower <= trace && trace <= bracket_upper.min(bound),
                    bound_states: levels.last().map_or(0, |l| l.eigenvalues.len()),
                    richardson_error: rich.map_or(f64::NAN, |r| r.error_estimate),
                });
            }
            Ok(AsymptoticsTable::Strong { sigma: cfg.sigma, rows })
        }
    }
}
