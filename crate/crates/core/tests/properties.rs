//! Invariants of the geometry, discretization, eigensolver and bound layers,
//! checked on random instances.

use std::f64::consts::PI;

use proptest::prelude::*;

use waveguide_core::eigensolve::{dense_eigenvalues, eigen_below_matrix, SolverMethod};
use waveguide_core::ltbound::{bound_integral, bracket_bounds, classical_constant, excess_factor, weak_coupling_lower};
use waveguide_core::special::j01;
use waveguide_core::sparse::SymCsr;
use waveguide_core::transverse::{faber_krahn_lower, ground_level};
use waveguide_core::{
    assemble_strip, bound_only, lt_bound, profile_moments, run_scenario, BoundSpec, CrossSection, EigenOptions, GridConfig,
    GridSpec, Profile, QuadratureConfig, Scenario, WaveguideGeometry,
};

fn cases(n: u32) -> ProptestConfig {
    ProptestConfig {
        cases: n,
        ..ProptestConfig::default()
    }
}

fn bump(kind: bool, start: f64, width: f64, amplitude: f64) -> Profile {
    if kind {
        Profile::rectangular(start, start + width, amplitude).unwrap()
    } else {
        Profile::smooth_bump(start, start + width, amplitude).unwrap()
    }
}

fn small_grid(n: usize, extent: (f64, f64)) -> GridSpec {
    GridSpec {
        cells_per_width: n,
        axial_ratio: 1.0,
        axial_extent: extent,
    }
}

fn max_entry_gap(a: &SymCsr, b: &SymCsr, scale: f64) -> f64 {
    assert_eq!(a.dim(), b.dim());
    let mut worst: f64 = 0.0;
    for (i, j, v) in a.entries() {
        worst = worst.max((v * scale - b.get(i, j)).abs() / v.abs().max(1.0));
    }
    for (i, j, v) in b.entries() {
        worst = worst.max((a.get(i, j) * scale - v).abs() / v.abs().max(1.0));
    }
    worst
}

proptest! {
    #![proptest_config(cases(64))]

    #[test]
    fn rectangular_profile_is_piecewise_constant(start in -2.0..2.0_f64, width in 0.1..3.0_f64, a in 0.0..2.0_f64, t in 0.0..1.0_f64) {
        let p = bump(true, start, width, a);
        let inside = start + width * (0.001 + 0.998 * t);
        prop_assert_eq!(p.value(inside), a);
        prop_assert_eq!(p.value(start - 1e-9), 0.0);
        prop_assert_eq!(p.value(start + width + 1e-9), 0.0);
    }

    #[test]
    fn smooth_profile_is_lipschitz(start in -2.0..2.0_f64, width in 0.1..3.0_f64, a in 0.0..2.0_f64, x in -3.0..6.0_f64, dx in 1e-6..1e-2_f64) {
        let p = bump(false, start, width, a);
        // |d/dξ a·cos²(πξ/w)| ≤ aπ/w
        let lip = a * PI / width;
        prop_assert!((p.value(x + dx) - p.value(x)).abs() <= lip * dx * (1.0 + 1e-9) + 1e-15);
    }

    #[test]
    fn dilation_scales_cross_sections(kind: bool, a in 0.0..1.5_f64, width in 0.2..2.0_f64, s in 0.25..4.0_f64, x in -1.0..3.0_f64) {
        let g = WaveguideGeometry::strip_bump(1.0, bump(kind, 0.0, width, a)).unwrap();
        let d = g.dilated(s);
        let lhs = d.cross_section_at(s * x).area();
        let rhs = s * g.cross_section_at(x).area();
        prop_assert!((lhs - rhs).abs() <= 1e-12 * rhs);
    }

    #[test]
    fn moments_are_ordered(kind: bool, a in 0.0..2.0_f64, width in 0.2..3.0_f64) {
        let p = bump(kind, -0.5, width, a);
        let m = profile_moments(&p, 4, &QuadratureConfig::default()).unwrap();
        for n in 0..m.len() {
            prop_assert!(m[n] >= 0.0);
            if n + 1 < m.len() {
                prop_assert!(m[n + 1] <= a * m[n] * (1.0 + 1e-10) + 1e-14);
            }
        }
    }

    #[test]
    fn transverse_ground_level_decreases_with_domain(l in 0.2..3.0_f64, grow in 1.0..2.0_f64) {
        let small = ground_level(&CrossSection::Interval { length: l, neumann_point: None }).unwrap();
        let large = ground_level(&CrossSection::Interval { length: l * grow, neumann_point: None }).unwrap();
        prop_assert!(large <= small);
        let ds = ground_level(&CrossSection::Disk { radius: l }).unwrap();
        let dl = ground_level(&CrossSection::Disk { radius: l * grow }).unwrap();
        prop_assert!(dl <= ds);
    }

    #[test]
    fn neumann_point_lowers_the_ground_level(l in 0.2..3.0_f64, t in 0.5..1.0_f64) {
        // a Neumann point at b ≥ L/2 gives λ₁ = π²/(4b²) ≤ (π/L)²
        let b = t * l;
        let mixed = ground_level(&CrossSection::Interval { length: l, neumann_point: Some(b) }).unwrap();
        let dirichlet = (PI / l).powi(2);
        prop_assert!(mixed <= dirichlet * (1.0 + 1e-12));
        prop_assert!((mixed - PI * PI / (4.0 * b * b)).abs() <= 1e-10 * mixed);
    }

    #[test]
    fn disk_meets_faber_krahn_with_equality(r in 0.1..5.0_f64) {
        let disk = ground_level(&CrossSection::Disk { radius: r }).unwrap();
        let fk = faber_krahn_lower(PI * r * r).unwrap();
        prop_assert!((disk - fk).abs() <= 1e-12 * disk);
        prop_assert!((disk * r * r - j01() * j01()).abs() <= 1e-12 * disk * r * r);
    }

    #[test]
    fn bracket_difference_is_one_term(alpha in 0.1..50.0_f64, sigma in 0.5..3.0_f64) {
        let spec = BoundSpec::new(sigma, PI * PI).unwrap();
        let (lo, hi) = bracket_bounds(alpha, &spec).unwrap();
        prop_assert!(lo >= 0.0);
        let top = (0.75 * PI * PI).powf(sigma);
        prop_assert!((hi - lo - top).abs() <= 1e-12 * hi.max(1.0));
    }

    #[test]
    fn window_bound_is_exact(alpha in 0.01..20.0_f64, sigma in 0.5..3.0_f64, b_frac in 0.5..1.0_f64) {
        // constant integrand (π² − π²/4b²)^{σ+1/2} on the window
        let g = WaveguideGeometry::neumann_window(1.0, -0.3, alpha, b_frac).unwrap();
        let spec = BoundSpec::new(sigma, PI * PI).unwrap();
        let rep = lt_bound(&g, &spec, &QuadratureConfig::default()).unwrap();
        let gap = PI * PI - PI * PI / (4.0 * b_frac * b_frac);
        let exact = excess_factor(sigma, 1).unwrap() * classical_constant(sigma, 1) * alpha * gap.powf(sigma + 0.5);
        prop_assert!((rep.bound - exact).abs() <= 1e-10 * exact.max(1e-300));
    }
}

proptest! {
    #![proptest_config(cases(24))]

    #[test]
    fn bound_integral_scales(kind: bool, a in 0.1..1.5_f64, width in 0.3..2.0_f64, s in 0.3..3.0_f64, sigma in 0.5..2.0_f64) {
        let g = WaveguideGeometry::strip_bump(1.0, bump(kind, 0.0, width, a)).unwrap();
        let cfg = QuadratureConfig::default();
        let i1 = bound_integral(&g, &BoundSpec::new(sigma, PI * PI).unwrap(), &cfg).unwrap().value;
        let is = bound_integral(&g.dilated(s), &BoundSpec::new(sigma, PI * PI / (s * s)).unwrap(), &cfg).unwrap().value;
        prop_assert!((is - s.powf(-2.0 * sigma) * i1).abs() <= 1e-9 * is);
    }

    #[test]
    fn bound_grows_with_amplitude(kind: bool, a in 0.05..1.5_f64, grow in 1.01..2.0_f64, sigma in 0.5..2.0_f64) {
        let spec = BoundSpec::new(sigma, PI * PI).unwrap();
        let cfg = QuadratureConfig::default();
        let g1 = WaveguideGeometry::strip_bump(1.0, bump(kind, 0.0, 1.0, a)).unwrap();
        let g2 = WaveguideGeometry::strip_bump(1.0, bump(kind, 0.0, 1.0, a * grow)).unwrap();
        prop_assert!(lt_bound(&g1, &spec, &cfg).unwrap().bound < lt_bound(&g2, &spec, &cfg).unwrap().bound);
    }

    #[test]
    fn strip_operator_is_symmetric(kind: bool, a in 0.0..1.5_f64, start in -1.0..0.0_f64, width in 0.2..1.5_f64) {
        let g = WaveguideGeometry::strip_bump(1.0, bump(kind, start, width, a)).unwrap();
        let op = assemble_strip(&g, &small_grid(8, (-2.0, 2.5))).unwrap();
        prop_assert!(op.matrix().is_exactly_symmetric());
    }

    #[test]
    fn window_operator_is_symmetric(start in -8_i32..0, len in 0_i32..12, b in 4_i32..=8) {
        let h = 0.125;
        let g = WaveguideGeometry::neumann_window(1.0, start as f64 * h, len as f64 * h, b as f64 * h).unwrap();
        let op = assemble_strip(&g, &small_grid(8, (-1.5, 2.0))).unwrap();
        prop_assert!(op.matrix().is_exactly_symmetric());
    }

    #[test]
    fn dilation_scales_the_matrix(kind: bool, a in 0.0..1.5_f64, width in 0.2..1.5_f64, s in 0.25..4.0_f64) {
        let g = WaveguideGeometry::strip_bump(1.0, bump(kind, -0.4, width, a)).unwrap();
        let op1 = assemble_strip(&g, &small_grid(8, (-2.0, 2.0))).unwrap();
        let ops = assemble_strip(&g.dilated(s), &small_grid(8, (-2.0 * s, 2.0 * s))).unwrap();
        prop_assert!(max_entry_gap(op1.matrix(), ops.matrix(), 1.0 / (s * s)) <= 1e-11);
        prop_assert!((ops.threshold_shift() * s * s - op1.threshold_shift()).abs() <= 1e-11 * op1.threshold_shift());
    }

    #[test]
    fn zero_length_window_is_the_straight_strip(start in -8_i32..8, b in 4_i32..=8) {
        let h = 0.125;
        let grid = small_grid(8, (-1.5, 1.5));
        let w = WaveguideGeometry::neumann_window(1.0, start as f64 * h * 0.5, 0.0, b as f64 * h).unwrap();
        let straight = WaveguideGeometry::strip_bump(1.0, Profile::rectangular(0.0, 1.0, 0.0).unwrap()).unwrap();
        let a = assemble_strip(&w, &grid).unwrap();
        let z = assemble_strip(&straight, &grid).unwrap();
        prop_assert_eq!(max_entry_gap(a.matrix(), z.matrix(), 1.0), 0.0);
    }

    #[test]
    fn lowest_discrete_level_decreases_with_amplitude(kind: bool, a in 0.0..1.0_f64, grow in 0.0..0.5_f64) {
        let grid = small_grid(6, (-1.5, 2.0));
        let low = |amp: f64| {
            let g = WaveguideGeometry::strip_bump(1.0, bump(kind, -0.5, 1.0, amp)).unwrap();
            dense_eigenvalues(assemble_strip(&g, &grid).unwrap().matrix())[0]
        };
        prop_assert!(low(a + grow) <= low(a) * (1.0 + 1e-12));
    }

    #[test]
    fn inertia_matches_the_dense_count(kind: bool, a in 0.2..1.5_f64, width in 0.3..1.5_f64) {
        let g = WaveguideGeometry::strip_bump(1.0, bump(kind, 0.0, width, a)).unwrap();
        let op = assemble_strip(&g, &small_grid(8, (-1.5, 2.5))).unwrap();
        let thr = op.threshold_shift();
        let spec = eigen_below_matrix(op.matrix(), thr, op.spectral_lower_bound(), &EigenOptions::default()).unwrap();
        let dense = dense_eigenvalues(op.matrix());
        prop_assert_eq!(spec.certified_count, spec.eigenvalues.len());
        prop_assert_eq!(spec.eigenvalues.len(), dense.iter().filter(|&&v| v < thr).count());
    }

    #[test]
    fn eigenvalues_shift_with_the_matrix(kind: bool, a in 0.2..1.5_f64, c in -50.0..50.0_f64) {
        let g = WaveguideGeometry::strip_bump(1.0, bump(kind, 0.0, 1.0, a)).unwrap();
        let op = assemble_strip(&g, &small_grid(6, (-1.0, 2.0))).unwrap();
        let thr = op.threshold_shift();
        let opts = EigenOptions::default();
        let base = eigen_below_matrix(op.matrix(), thr, None, &opts).unwrap();
        let moved = eigen_below_matrix(&op.matrix().shifted(c), thr + c, None, &opts).unwrap();
        prop_assert_eq!(base.eigenvalues.len(), moved.eigenvalues.len());
        for (x, y) in base.eigenvalues.iter().zip(&moved.eigenvalues) {
            prop_assert!((x + c - y).abs() <= 1e-9 * thr);
        }
    }

    #[test]
    fn dense_and_sparse_solvers_agree(kind: bool, a in 0.3..1.5_f64, width in 0.5..1.5_f64) {
        let g = WaveguideGeometry::strip_bump(1.0, bump(kind, 0.0, width, a)).unwrap();
        let op = assemble_strip(&g, &small_grid(8, (-2.0, 3.0))).unwrap();
        prop_assume!(op.dim() <= 500);
        let thr = op.threshold_shift();
        let run = |method| {
            let opts = EigenOptions { method, tol: 1e-12, ..EigenOptions::default() };
            eigen_below_matrix(op.matrix(), thr, op.spectral_lower_bound(), &opts).unwrap().eigenvalues
        };
        let d = run(SolverMethod::Dense);
        let s = run(SolverMethod::Sparse);
        prop_assert_eq!(d.len(), s.len());
        for (x, y) in d.iter().zip(&s) {
            prop_assert!((x - y).abs() <= 1e-10 * thr);
        }
    }
}

/// The σ = 1/2 bound squared reproduces the fourth-order weak-coupling
/// expansion: the remainder shrinks like α⁵.
#[test]
fn weak_coupling_expansion_matches_the_bound() {
    let profile = Profile::smooth_bump(-1.0, 1.0, 1.0).unwrap();
    let cfg = QuadratureConfig {
        abs_tol: 1e-14,
        ..QuadratureConfig::default()
    };
    let moments = profile_moments(&profile, 3, &cfg).unwrap();
    let spec = BoundSpec::new(0.5, PI * PI).unwrap();
    let remainder = |alpha: f64| {
        let g = WaveguideGeometry::strip_bump(1.0, profile.with_amplitude_scaled(alpha)).unwrap();
        let b = lt_bound(&g, &spec, &cfg).unwrap().bound;
        PI * PI - b * b - weak_coupling_lower(&moments, alpha, 4).unwrap()
    };
    let (r1, r2) = (remainder(0.01), remainder(0.02));
    let order = (r2 / r1).abs().log2();
    assert!((order - 5.0).abs() < 0.1, "remainder order {order} ({r1:e}, {r2:e})");
}

#[test]
fn scenario_runs_are_deterministic() {
    let mut s = Scenario::corollary1(1.0, 1.0).unwrap();
    s.sigma = vec![0.5, 1.0];
    s.grid = GridConfig {
        cells_per_width: 16,
        padding: Some(3.0),
        ..GridConfig::default()
    };
    let a = serde_json::to_string(&run_scenario(&s).unwrap()).unwrap();
    let b = serde_json::to_string(&run_scenario(&s).unwrap()).unwrap();
    assert_eq!(a, b);
    let c = serde_json::to_string(&bound_only(&s).unwrap()).unwrap();
    let d = serde_json::to_string(&bound_only(&s).unwrap()).unwrap();
    assert_eq!(c, d);
}
