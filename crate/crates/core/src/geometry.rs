//! Locally perturbed straight waveguides: strips with bulges or Neumann
//! windows, and circular tubes with radial bulges.
//!
//! Coordinates are `(ξ, η)`: ξ runs along the guide axis, η across it. All
//! perturbations have compact support in ξ.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quadrature::{integrate, QuadratureConfig};

/// A compactly supported, nonnegative, piecewise continuous function of ξ.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Profile {
    /// `amplitude` on the open interval `(start, end)`, zero elsewhere.
    Rectangular { start: f64, end: f64, amplitude: f64 },
    /// `amplitude · cos²(π(ξ − c)/w)` on `[start, end]`, with `c` the midpoint
    /// and `w = end − start`.
    SmoothBump { start: f64, end: f64, amplitude: f64 },
    /// Piecewise linear through `(ξ, value)` samples, zero outside the first
    /// and last abscissa.
    Tabulated { samples: Vec<(f64, f64)> },
}

impl Profile {
    pub fn rectangular(start: f64, end: f64, amplitude: f64) -> Result<Self> {
        let p = Profile::Rectangular { start, end, amplitude };
        p.validate()?;
        Ok(p)
    }

    pub fn smooth_bump(start: f64, end: f64, amplitude: f64) -> Result<Self> {
        let p = Profile::SmoothBump { start, end, amplitude };
        p.validate()?;
        Ok(p)
    }

    pub fn tabulated(samples: Vec<(f64, f64)>) -> Result<Self> {
        let p = Profile::Tabulated { samples };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            Profile::Rectangular { start, end, amplitude }
            | Profile::SmoothBump { start, end, amplitude } => {
                if !(start.is_finite() && end.is_finite() && start <= end) {
                    return Err(Error::invalid("profile", format!("support [{start}, {end}] is not an interval")));
                }
                if !(amplitude.is_finite() && *amplitude >= 0.0) {
                    return Err(Error::invalid("profile", format!("amplitude {amplitude} must be finite and ≥ 0")));
                }
            }
            Profile::Tabulated { samples } => {
                if samples.len() < 2 {
                    return Err(Error::invalid("profile", "tabulated profile needs at least 2 samples"));
                }
                if samples.windows(2).any(|w| !(w[1].0 > w[0].0)) {
                    return Err(Error::invalid("profile", "sample abscissae must increase strictly"));
                }
                if samples.iter().any(|&(x, v)| !x.is_finite() || !v.is_finite() || v < 0.0) {
                    return Err(Error::invalid("profile", "samples must be finite with nonnegative values"));
                }
            }
        }
        Ok(())
    }

    pub fn value(&self, xi: f64) -> f64 {
        match self {
            Profile::Rectangular { start, end, amplitude } => {
                if xi > *start && xi < *end {
                    *amplitude
                } else {
                    0.0
                }
            }
            Profile::SmoothBump { start, end, amplitude } => {
                if xi < *start || xi > *end || end <= start {
                    return 0.0;
                }
                let w = end - start;
                let c = 0.5 * (start + end);
                let s = (std::f64::consts::PI * (xi - c) / w).cos();
                amplitude * s * s
            }
            Profile::Tabulated { samples } => {
                let first = samples[0].0;
                let last = samples[samples.len() - 1].0;
                if xi < first || xi > last {
                    return 0.0;
                }
                let k = samples.partition_point(|s| s.0 <= xi);
                if k >= samples.len() {
                    return samples[samples.len() - 1].1;
                }
                let (x0, v0) = samples[k - 1];
                let (x1, v1) = samples[k];
                v0 + (v1 - v0) * (xi - x0) / (x1 - x0)
            }
        }
    }

    pub fn support(&self) -> (f64, f64) {
        match self {
            Profile::Rectangular { start, end, .. } | Profile::SmoothBump { start, end, .. } => (*start, *end),
            Profile::Tabulated { samples } => (samples[0].0, samples[samples.len() - 1].0),
        }
    }

    /// Maximum of the profile.
    pub fn amplitude(&self) -> f64 {
        match self {
            Profile::Rectangular { amplitude, .. } | Profile::SmoothBump { amplitude, .. } => *amplitude,
            Profile::Tabulated { samples } => samples.iter().map(|s| s.1).fold(0.0, f64::max),
        }
    }

    /// Points where the profile may be discontinuous or non-smooth, sorted.
    pub fn breakpoints(&self) -> Vec<f64> {
        match self {
            Profile::Rectangular { start, end, .. } | Profile::SmoothBump { start, end, .. } => vec![*start, *end],
            Profile::Tabulated { samples } => samples.iter().map(|s| s.0).collect(),
        }
    }

    /// Same shape with values multiplied by `factor` (the αf family).
    pub fn with_amplitude_scaled(&self, factor: f64) -> Profile {
        match self {
            Profile::Rectangular { start, end, amplitude } => Profile::Rectangular {
                start: *start,
                end: *end,
                amplitude: amplitude * factor,
            },
            Profile::SmoothBump { start, end, amplitude } => Profile::SmoothBump {
                start: *start,
                end: *end,
                amplitude: amplitude * factor,
            },
            Profile::Tabulated { samples } => Profile::Tabulated {
                samples: samples.iter().map(|&(x, v)| (x, v * factor)).collect(),
            },
        }
    }

    /// Profile of the geometry dilated by `s`: both ξ and values scale.
    pub fn dilated(&self, s: f64) -> Profile {
        match self {
            Profile::Rectangular { start, end, amplitude } => Profile::Rectangular {
                start: s * start,
                end: s * end,
                amplitude: s * amplitude,
            },
            Profile::SmoothBump { start, end, amplitude } => Profile::SmoothBump {
                start: s * start,
                end: s * end,
                amplitude: s * amplitude,
            },
            Profile::Tabulated { samples } => Profile::Tabulated {
                samples: samples.iter().map(|&(x, v)| (s * x, s * v)).collect(),
            },
        }
    }
}

/// Cross section ω(ξ) together with the Neumann part γ(ξ).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "shape", rename_all = "kebab-case")]
pub enum CrossSection {
    /// `(0, length)` with Dirichlet ends; `neumann_point = Some(b)` places a
    /// Neumann condition at η = b (b = length: boundary window, b < length:
    /// one-sided crack splitting the interval).
    Interval { length: f64, neumann_point: Option<f64> },
    Disk { radius: f64 },
}

impl CrossSection {
    pub fn area(&self) -> f64 {
        match self {
            CrossSection::Interval { length, .. } => *length,
            CrossSection::Disk { radius } => std::f64::consts::PI * radius * radius,
        }
    }
}

/// The supported waveguide families. Ω is the guide, Γ its Neumann set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "kebab-case")]
pub enum WaveguideGeometry {
    /// `{0 < η < width + f(ξ)}` with Dirichlet boundary.
    StripBump { width: f64, profile: Profile },
    /// Straight strip of the given width with a Neumann segment
    /// `[start, start + length] × {height}`.
    StripNeumannWindow {
        width: f64,
        start: f64,
        length: f64,
        height: f64,
    },
    /// Circular tube in ℝ³ with radius `radius + deviation(ξ)`.
    TubeRadial { radius: f64, deviation: Profile },
}

impl WaveguideGeometry {
    pub fn strip_bump(width: f64, profile: Profile) -> Result<Self> {
        let g = WaveguideGeometry::StripBump { width, profile };
        g.validate()?;
        Ok(g)
    }

    pub fn neumann_window(width: f64, start: f64, length: f64, height: f64) -> Result<Self> {
        let g = WaveguideGeometry::StripNeumannWindow {
            width,
            start,
            length,
            height,
        };
        g.validate()?;
        Ok(g)
    }

    pub fn tube(radius: f64, deviation: Profile) -> Result<Self> {
        let g = WaveguideGeometry::TubeRadial { radius, deviation };
        g.validate()?;
        Ok(g)
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            WaveguideGeometry::StripBump { width, profile } => {
                positive("strip width", *width)?;
                profile.validate()
            }
            WaveguideGeometry::StripNeumannWindow {
                width,
                start,
                length,
                height,
            } => {
                positive("strip width", *width)?;
                if !(start.is_finite() && length.is_finite() && *length >= 0.0) {
                    return Err(Error::invalid("Neumann window", format!("[{start}, {start} + {length}] is not an interval")));
                }
                if !(*height >= 0.5 * width && height <= width) {
                    return Err(Error::invalid(
                        "Neumann window",
                        format!("height {height} must lie in [width/2, width] = [{}, {width}]", 0.5 * width),
                    ));
                }
                Ok(())
            }
            WaveguideGeometry::TubeRadial { radius, deviation } => {
                positive("tube radius", *radius)?;
                deviation.validate()
            }
        }
    }

    pub fn is_tube(&self) -> bool {
        matches!(self, WaveguideGeometry::TubeRadial { .. })
    }

    /// ω₀, the cross section far from the perturbation.
    pub fn asymptotic_cross_section(&self) -> CrossSection {
        match self {
            WaveguideGeometry::StripBump { width, .. } | WaveguideGeometry::StripNeumannWindow { width, .. } => {
                CrossSection::Interval {
                    length: *width,
                    neumann_point: None,
                }
            }
            WaveguideGeometry::TubeRadial { radius, .. } => CrossSection::Disk { radius: *radius },
        }
    }

    /// Interval `[ξ₋, ξ₊]` outside of which the guide is straight.
    pub fn support(&self) -> (f64, f64) {
        match self {
            WaveguideGeometry::StripBump { profile, .. } => profile.support(),
            WaveguideGeometry::StripNeumannWindow { start, length, .. } => (*start, start + length),
            WaveguideGeometry::TubeRadial { deviation, .. } => deviation.support(),
        }
    }

    /// R with ω(ξ) = ω₀ for all |ξ| > R.
    pub fn perturbation_half_width(&self) -> f64 {
        let (a, b) = self.support();
        a.abs().max(b.abs())
    }

    /// Points in ξ where the cross section may change non-smoothly.
    pub fn breakpoints(&self) -> Vec<f64> {
        match self {
            WaveguideGeometry::StripBump { profile, .. } => profile.breakpoints(),
            WaveguideGeometry::StripNeumannWindow { start, length, .. } => vec![*start, start + length],
            WaveguideGeometry::TubeRadial { deviation, .. } => deviation.breakpoints(),
        }
    }

    pub fn cross_section_at(&self, xi: f64) -> CrossSection {
        match self {
            WaveguideGeometry::StripBump { width, profile } => CrossSection::Interval {
                length: width + profile.value(xi),
                neumann_point: None,
            },
            WaveguideGeometry::StripNeumannWindow {
                width,
                start,
                length,
                height,
            } => {
                let inside = xi >= *start && xi <= start + length && *length > 0.0;
                CrossSection::Interval {
                    length: *width,
                    neumann_point: inside.then_some(*height),
                }
            }
            WaveguideGeometry::TubeRadial { radius, deviation } => CrossSection::Disk {
                radius: radius + deviation.value(xi),
            },
        }
    }

    /// The same guide with every length multiplied by `s`.
    pub fn dilated(&self, s: f64) -> WaveguideGeometry {
        match self {
            WaveguideGeometry::StripBump { width, profile } => WaveguideGeometry::StripBump {
                width: s * width,
                profile: profile.dilated(s),
            },
            WaveguideGeometry::StripNeumannWindow {
                width,
                start,
                length,
                height,
            } => WaveguideGeometry::StripNeumannWindow {
                width: s * width,
                start: s * start,
                length: s * length,
                height: s * height,
            },
            WaveguideGeometry::TubeRadial { radius, deviation } => WaveguideGeometry::TubeRadial {
                radius: s * radius,
                deviation: deviation.dilated(s),
            },
        }
    }
}

fn positive(what: &'static str, v: f64) -> Result<()> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(Error::invalid(what, format!("{v} must be positive")))
    }
}

/// F_n = ∫ f(ξ)ⁿ dξ for n = 1..=n_max.
pub fn profile_moments(profile: &Profile, n_max: usize, cfg: &QuadratureConfig) -> Result<Vec<f64>> {
    if n_max == 0 {
        return Err(Error::invalid("moment order", "n_max must be at least 1"));
    }
    profile.validate()?;
    let bp = profile.breakpoints();
    (1..=n_max)
        .map(|n| integrate(|x| profile.value(x).powi(n as i32), &bp, cfg).map(|r| r.value))
        .collect()
}

/// Axial padding beyond the perturbation after which a bound state with
/// binding energy `gap` has decayed to relative size `tol`:
/// `ln(1/tol) / (2√gap)`.
pub fn domain_truncation(gap_estimate: f64, tol: f64) -> Result<f64> {
    if !(gap_estimate.is_finite() && gap_estimate > 0.0) {
        return Err(Error::NoDecayScale { gap: gap_estimate });
    }
    if !(tol > 0.0 && tol < 1.0) {
        return Err(Error::invalid("truncation tolerance", format!("{tol} must lie in (0, 1)")));
    }
    Ok((1.0 / tol).ln() / (2.0 * gap_estimate.sqrt()))
}
