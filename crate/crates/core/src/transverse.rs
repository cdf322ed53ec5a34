//! Spectra of the cross-section operators −Δ on ω(ξ) with Neumann part γ(ξ).

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::eigensolve::Tridiagonal;
use crate::error::{Error, Result};
use crate::geometry::CrossSection;
use crate::special::{bessel_zero, j01, MAX_BESSEL_ORDER, MAX_BESSEL_ZERO_INDEX};

/// Values within this relative distance of the threshold count as equal to
/// it and are excluded.
const THRESHOLD_GUARD: f64 = 8.0 * f64::EPSILON;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SpectrumSource {
    Analytic,
    Numeric,
}

/// Sub-threshold eigenvalues λ_j of a cross section, ascending and repeated
/// according to multiplicity.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TransverseSpectrum {
    pub eigenvalues: Vec<f64>,
    pub threshold: f64,
    pub source: SpectrumSource,
}

impl TransverseSpectrum {
    fn analytic(mut eigenvalues: Vec<f64>, threshold: f64) -> Self {
        eigenvalues.sort_by(f64::total_cmp);
        TransverseSpectrum {
            eigenvalues,
            threshold,
            source: SpectrumSource::Analytic,
        }
    }

    pub fn len(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eigenvalues.is_empty()
    }

    pub fn lowest(&self) -> Option<f64> {
        self.eigenvalues.first().copied()
    }
}

fn below(v: f64, threshold: f64) -> bool {
    v < threshold - THRESHOLD_GUARD * threshold.abs()
}

/// `{(kπ/len)² < threshold}` for k ≥ 1, with `offset = 0` (Dirichlet ends)
/// or `offset = 1/2` (Dirichlet at one end, Neumann at the other).
fn sine_modes(len: f64, offset: f64, threshold: f64) -> Vec<f64> {
    let mut out = Vec::new();
    for k in 1.. {
        let v = ((k as f64 - offset) * PI / len).powi(2);
        if !below(v, threshold) {
            break;
        }
        out.push(v);
    }
    out
}

fn positive_length(what: &'static str, v: f64) -> Result<()> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(Error::invalid(what, format!("{v} must be positive")))
    }
}

/// Dirichlet eigenvalues `(nπ/L)²` of `(0, L)` below `threshold`.
pub fn interval_dirichlet_spectrum(length: f64, threshold: f64) -> Result<TransverseSpectrum> {
    positive_length("interval length", length)?;
    Ok(TransverseSpectrum::analytic(sine_modes(length, 0.0, threshold), threshold))
}

/// `(0, L)` with Dirichlet ends and a Neumann point at `b`. The point
/// decouples `(0, b)` and `(b, L)`, each Dirichlet–Neumann.
///
/// `b = L/2` is accepted: its lowest level `(π/L)²` equals the unperturbed
/// threshold, so the sub-threshold part is empty for that threshold.
pub fn mixed_interval_spectrum(length: f64, b: f64, threshold: f64) -> Result<TransverseSpectrum> {
    positive_length("interval length", length)?;
    if !(b >= 0.5 * length && b <= length) {
        return Err(Error::invalid(
            "Neumann point",
            format!("b = {b} must lie in [L/2, L] = [{}, {length}]", 0.5 * length),
        ));
    }
    let mut ev = Vec::new();
    ev.extend(sine_modes(b, 0.5, threshold));
    if b < length {
        ev.extend(sine_modes(length - b, 0.5, threshold));
    }
    Ok(TransverseSpectrum::analytic(ev, threshold))
}

/// Largest `threshold·r²` for which the Bessel zero table provably contains
/// every level of the disk: `j_{6,1} > 6 + 1.8557·6^{1/3}` bounds the first
/// untabulated order, and `j_{0,20}` the first untabulated index.
fn disk_coverage() -> f64 {
    let nu = (MAX_BESSEL_ORDER + 1) as f64;
    let order_bound = nu + 1.855_757 * nu.cbrt();
    let index_bound = bessel_zero(0, MAX_BESSEL_ZERO_INDEX).expect("tabulated");
    (order_bound * order_bound).min(index_bound * index_bound)
}

/// Dirichlet eigenvalues `j_{m,k}²/r²` of the disk of radius `r` below
/// `threshold`, each `m ≥ 1` level listed twice.
pub fn disk_spectrum(radius: f64, threshold: f64) -> Result<TransverseSpectrum> {
    positive_length("disk radius", radius)?;
    if threshold * radius * radius >= disk_coverage() {
        return Err(Error::out_of_range(
            "disk spectrum",
            format!("threshold·r² = {} exceeds the tabulated Bessel zeros", threshold * radius * radius),
        ));
    }
    let mut ev = Vec::new();
    for m in 0..=MAX_BESSEL_ORDER {
        for k in 1..=MAX_BESSEL_ZERO_INDEX {
            let v = (bessel_zero(m, k)? / radius).powi(2);
            if !below(v, threshold) {
                break;
            }
            ev.push(v);
            if m > 0 {
                ev.push(v);
            }
        }
    }
    Ok(TransverseSpectrum::analytic(ev, threshold))
}

/// Sub-threshold Dirichlet levels `j_{m,k}²/r²` for a single angular index `m`.
pub fn disk_levels_for_order(radius: f64, m: usize, threshold: f64) -> Result<Vec<f64>> {
    positive_length("disk radius", radius)?;
    let mut out = Vec::new();
    for k in 1..=MAX_BESSEL_ZERO_INDEX {
        let v = (bessel_zero(m, k)? / radius).powi(2);
        if !below(v, threshold) {
            return Ok(out);
        }
        out.push(v);
    }
    Err(Error::out_of_range("disk spectrum", format!("more than {MAX_BESSEL_ZERO_INDEX} levels for m = {m}")))
}

/// Faber–Krahn: `λ₁(ω) ≥ π j_{0,1}²/A(ω)` for every planar ω of area A.
pub fn faber_krahn_lower(area: f64) -> Result<f64> {
    positive_length("cross-section area", area)?;
    Ok(PI * j01() * j01() / area)
}

/// `λ₂(ω) ≥ 2π j_{0,1}²/A(ω)`; at most one level lies below `j_{0,1}²`
/// whenever `A ≤ 2π`.
pub fn second_eigenvalue_lower(area: f64) -> Result<f64> {
    positive_length("cross-section area", area)?;
    Ok(2.0 * PI * j01() * j01() / area)
}

/// Lowest level λ₁(ω) of the cross section.
pub fn ground_level(cs: &CrossSection) -> Result<f64> {
    match *cs {
        CrossSection::Interval {
            length,
            neumann_point: None,
        } => {
            positive_length("interval length", length)?;
            Ok((PI / length).powi(2))
        }
        CrossSection::Interval {
            length,
            neumann_point: Some(b),
        } => {
            // the lowest level never exceeds (π/L)² since b ≥ L/2
            let s = mixed_interval_spectrum(length, b, 1.5 * (PI / length).powi(2))?;
            s.lowest().ok_or_else(|| Error::invalid("cross section", "no level found"))
        }
        CrossSection::Disk { radius } => {
            positive_length("disk radius", radius)?;
            Ok((j01() / radius).powi(2))
        }
    }
}

/// Sub-threshold spectrum of any supported cross section.
pub fn cross_section_spectrum(cs: &CrossSection, threshold: f64) -> Result<TransverseSpectrum> {
    match *cs {
        CrossSection::Interval {
            length,
            neumann_point: None,
        } => interval_dirichlet_spectrum(length, threshold),
        CrossSection::Interval {
            length,
            neumann_point: Some(b),
        } => mixed_interval_spectrum(length, b, threshold),
        CrossSection::Disk { radius } => disk_spectrum(radius, threshold),
    }
}

/// Finite-difference spectrum of an interval cross section on `cells`
/// uniform cells (`h = L/cells`), Dirichlet ends, found by Sturm bisection.
///
/// A Neumann point must sit on a grid node. At `b = L` the end node becomes
/// an unknown with the mirror stencil; at `b < L` the node is split into two
/// uncoupled one-sided copies. Both carry half the cell volume, which keeps
/// the matrix symmetric and the scheme second order.
pub fn numeric_interval_spectrum(cs: &CrossSection, threshold: f64, cells: usize) -> Result<TransverseSpectrum> {
    let (length, b) = match *cs {
        CrossSection::Interval { length, neumann_point } => (length, neumann_point),
        CrossSection::Disk { .. } => return Err(Error::invalid("cross section", "numeric solver handles intervals only")),
    };
    positive_length("interval length", length)?;
    if cells < 16 {
        return Err(Error::GridTooCoarse(format!("{cells} cells; at least 16 required")));
    }
    let h = length / cells as f64;
    if threshold > 2.0 / (h * h) {
        return Err(Error::GridTooCoarse(format!(
            "threshold {threshold} exceeds the resolved range 2/h² = {}",
            2.0 / (h * h)
        )));
    }
    let t = interval_fd_matrix(length, b, cells)?;
    let eigenvalues = t.eigenvalues_below(threshold);
    Ok(TransverseSpectrum {
        eigenvalues,
        threshold,
        source: SpectrumSource::Numeric,
    })
}

/// The symmetric tridiagonal matrix behind [`numeric_interval_spectrum`].
pub fn interval_fd_matrix(length: f64, neumann_point: Option<f64>, cells: usize) -> Result<Tridiagonal> {
    let h = length / cells as f64;
    let inv = 1.0 / (h * h);
    let split = match neumann_point {
        None => None,
        Some(b) => {
            let pos = b / h;
            let node = pos.round();
            if !(b > 0.0 && b <= length) || (pos - node).abs() > 1e-9 * pos.max(1.0) {
                return Err(Error::invalid(
                    "Neumann point",
                    format!("b = {b} must lie in (0, L] on a grid node (h = {h})"),
                ));
            }
            Some(node as usize)
        }
    };
    let half = std::f64::consts::FRAC_1_SQRT_2;
    let mut diag = Vec::with_capacity(cells + 1);
    let mut off = Vec::with_capacity(cells);
    match split {
        None => {
            diag.resize(cells - 1, 2.0 * inv);
            off.resize(cells - 2, -inv);
        }
        Some(s) if s == cells => {
            diag.resize(cells, 2.0 * inv);
            off.resize(cells - 1, -inv);
            off[cells - 2] = -inv * 2.0 * half;
        }
        Some(s) => {
            // nodes 1..s-1, lower copy, upper copy, nodes s+1..cells-1
            for _ in 1..s {
                diag.push(2.0 * inv);
                off.push(-inv);
            }
            if let Some(last) = off.last_mut() {
                *last = -inv * 2.0 * half;
            }
            diag.push(2.0 * inv);
            off.push(0.0);
            diag.push(2.0 * inv);
            off.push(-inv * 2.0 * half);
            for _ in s + 1..cells {
                diag.push(2.0 * inv);
                off.push(-inv);
            }
            off.pop();
        }
    }
    Tridiagonal::new(diag, off)
}
