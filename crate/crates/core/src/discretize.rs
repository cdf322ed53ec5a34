//! Finite-difference operators for the whole guide.
//!
//! Both families are assembled from the same finite-volume description: every
//! unknown carries a mass (cell volume), every pair of neighbouring unknowns
//! an edge weight (face size), and every Dirichlet boundary crossing a
//! weighted cut at fractional distance θ ∈ (0, 1] of a grid step. The matrix
//! is the mass-symmetrized stiffness
//!
//! ```text
//! A_ab = −w_ab / (h² √(m_a m_b)),   A_aa = (Σ_b w_ab/h² + Σ_cuts w/(θ h²) + V_a) / m_a
//! ```
//!
//! which is exactly symmetric, keeps the 5-point pattern and places curved
//! Dirichlet boundaries to second order without stair-casing.
//!
//! Unknowns are numbered column by column (ξ outer, η inner), so the matrix
//! bandwidth is about one column height.

use std::f64::consts::PI;
use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::eigensolve::Tridiagonal;
use crate::error::{Error, Result};
use crate::geometry::WaveguideGeometry;
use crate::sparse::SymCsr;
use crate::special::{j01, MAX_BESSEL_ORDER};

/// Smallest admissible boundary fraction θ.
const MIN_THETA: f64 = 1e-8;
/// Relative distance below which a boundary counts as lying on a node.
const SNAP: f64 = 1e-9;

/// Discretization parameters for one refinement level.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    /// Transverse cells across the asymptotic cross section (width or
    /// radius): `h_η = L₀ / cells_per_width`.
    pub cells_per_width: usize,
    /// `h_ξ = axial_ratio · h_η`.
    pub axial_ratio: f64,
    /// Axial domain `[ξ_min, ξ_max]` with Dirichlet ends. Both ends must be
    /// integer multiples of `h_ξ`.
    pub axial_extent: (f64, f64),
}

impl GridSpec {
    /// Transverse and axial steps for asymptotic cross-section size `l0`.
    pub fn steps(&self, l0: f64) -> (f64, f64) {
        let h_eta = l0 / self.cells_per_width as f64;
        (self.axial_ratio * h_eta, h_eta)
    }

    /// The support of `geom` plus `padding` on each side, widened outward to
    /// multiples of `align` (normally the coarsest axial step of a study).
    pub fn around(geom: &WaveguideGeometry, cells_per_width: usize, axial_ratio: f64, padding: f64, align: f64) -> GridSpec {
        let (a, b) = geom.support();
        let lo = ((a - padding) / align).floor() * align;
        let hi = ((b + padding) / align).ceil() * align;
        GridSpec {
            cells_per_width,
            axial_ratio,
            axial_extent: (lo, hi),
        }
    }

    /// Axial step of the grid with the same extent and ratio on
    /// `cells_per_width` cells.
    pub fn axial_step(&self, l0: f64) -> f64 {
        self.steps(l0).0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum NodeKind {
    Interior,
    /// On a Neumann boundary segment (half cell).
    Neumann,
    /// Below an interior Neumann crack (half cell).
    CrackLower,
    /// Above an interior Neumann crack (half cell).
    CrackUpper,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Node {
    pub column: usize,
    pub row: usize,
    pub kind: NodeKind,
}

/// Node layout of an assembled operator.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Grid2D {
    pub xi_min: f64,
    pub xi_max: f64,
    pub h_xi: f64,
    pub h_eta: f64,
    /// Transverse coordinate of row `j` is `(j − eta_offset)·h_η`.
    pub eta_offset: f64,
    /// Matrix index of the first unknown of each column, plus the total.
    pub column_start: Vec<usize>,
    pub nodes: Vec<Node>,
    /// Index of the axial node left of the first column.
    first_index: i64,
}

impl Grid2D {
    pub fn columns(&self) -> usize {
        self.column_start.len() - 1
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn xi(&self, column: usize) -> f64 {
        (self.first_index + 1 + column as i64) as f64 * self.h_xi
    }

    pub fn eta(&self, row: usize) -> f64 {
        (row as f64 - self.eta_offset) * self.h_eta
    }

    /// `(ξ, η)` of unknown `idx`.
    pub fn position(&self, idx: usize) -> (f64, f64) {
        let n = self.nodes[idx];
        (self.xi(n.column), self.eta(n.row))
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct AssemblyDiagnostics {
    pub unknowns: usize,
    pub columns: usize,
    pub nonzeros: usize,
    pub bandwidth: usize,
    /// Dirichlet cuts with θ < 1 (boundary between grid nodes).
    pub fractional_cuts: usize,
    pub min_theta: f64,
    pub neumann_nodes: usize,
    pub crack_copies: usize,
    /// Distance the Neumann segment was moved to reach the nearest grid row.
    pub neumann_height_shift: f64,
    /// Window ends that do not coincide with axial nodes.
    pub window_misaligned_ends: usize,
}

/// A discretized −Δ on Ω with Neumann part Γ, plus the threshold λ₁(ω₀)
/// that forms `H = −Δ − λ₁(ω₀)`. The shift is kept as metadata; matrix
/// entries are the unshifted operator.
#[derive(Debug, Clone)]
pub struct SparseSymOperator {
    matrix: SymCsr,
    grid: Grid2D,
    threshold_shift: f64,
    exact_threshold: f64,
    lower_bound: f64,
    angular_index: Option<usize>,
    diagnostics: AssemblyDiagnostics,
}

impl SparseSymOperator {
    pub fn matrix(&self) -> &SymCsr {
        &self.matrix
    }

    pub fn grid(&self) -> &Grid2D {
        &self.grid
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    /// λ₁(ω₀) of the discrete straight cross section on the same transverse
    /// grid: the bottom of the essential spectrum of the discrete guide.
    pub fn threshold_shift(&self) -> f64 {
        self.threshold_shift
    }

    /// λ₁(ω₀) of the continuous cross section.
    pub fn exact_threshold(&self) -> f64 {
        self.exact_threshold
    }

    /// A guaranteed lower bound on the smallest eigenvalue: the least column
    /// (transverse-only) eigenvalue, since the axial part is positive
    /// semidefinite.
    pub fn spectral_lower_bound(&self) -> Option<f64> {
        Some(self.lower_bound)
    }

    pub fn angular_index(&self) -> Option<usize> {
        self.angular_index
    }

    pub fn diagnostics(&self) -> &AssemblyDiagnostics {
        &self.diagnostics
    }

    /// Coordinate-format dump: header `% n n nnz`, then `row col value`.
    pub fn write_coo<W: Write>(&self, w: W) -> std::io::Result<()> {
        self.matrix.write_coo(w)
    }
}

/// Vertical layout of one grid column.
struct Column {
    /// Active rows, ascending; crack rows appear twice (lower, upper).
    nodes: Vec<(usize, NodeKind)>,
    /// Boundary position in row units: rows `j < top` are inside.
    top: f64,
}

/// Scheme coefficients shared by both families.
trait Scheme {
    fn mass(&self, row: usize, kind: NodeKind) -> f64;
    /// Weight of the vertical face between rows `row` and `row + 1`, or
    /// between row `row` and a boundary at `row + θ`.
    fn vertical_weight(&self, row: usize, theta: f64) -> f64;
    fn horizontal_weight(&self, row: usize, kind: NodeKind) -> f64;
    fn potential(&self, row: usize) -> f64;
    /// Boundary height in row units at axial position ξ.
    fn top_at(&self, xi: f64) -> f64;
}

struct StripScheme<'a> {
    width: f64,
    profile: Option<&'a crate::geometry::Profile>,
    h_eta: f64,
}

impl Scheme for StripScheme<'_> {
    fn mass(&self, _row: usize, kind: NodeKind) -> f64 {
        if kind == NodeKind::Interior {
            1.0
        } else {
            0.5
        }
    }
    fn vertical_weight(&self, _row: usize, _theta: f64) -> f64 {
        1.0
    }
    fn horizontal_weight(&self, _row: usize, kind: NodeKind) -> f64 {
        self.mass(0, kind)
    }
    fn potential(&self, _row: usize) -> f64 {
        0.0
    }
    fn top_at(&self, xi: f64) -> f64 {
        let f = self.profile.map_or(0.0, |p| p.value(xi));
        (self.width + f) / self.h_eta
    }
}

struct TubeScheme<'a> {
    radius: f64,
    deviation: &'a crate::geometry::Profile,
    h: f64,
    m: usize,
}

impl TubeScheme<'_> {
    fn rho(&self, row: usize) -> f64 {
        (row as f64 - 0.5) * self.h
    }
}

impl Scheme for TubeScheme<'_> {
    fn mass(&self, row: usize, _kind: NodeKind) -> f64 {
        self.rho(row)
    }
    fn vertical_weight(&self, row: usize, theta: f64) -> f64 {
        // face midway between the node and its neighbour (or the boundary)
        self.rho(row) + 0.5 * theta * self.h
    }
    fn horizontal_weight(&self, row: usize, _kind: NodeKind) -> f64 {
        self.rho(row)
    }
    fn potential(&self, row: usize) -> f64 {
        (self.m * self.m) as f64 / self.rho(row)
    }
    fn top_at(&self, xi: f64) -> f64 {
        (self.radius + self.deviation.value(xi)) / self.h + 0.5
    }
}

/// Rows `1..=J` strictly below `top`, with θ of the top cut.
fn active_rows(top: f64) -> (usize, f64) {
    let k = top.round();
    if k >= 1.0 && (top - k).abs() <= SNAP * top.max(1.0) {
        return (k as usize - 1, 1.0);
    }
    if top <= 1.0 {
        return (0, 1.0);
    }
    let j = top.floor();
    (j as usize, (top - j).max(MIN_THETA))
}

fn row_inside(row: usize, top: f64) -> bool {
    (row as f64) < top - SNAP * top.max(1.0)
}

/// Fraction of the step from `xi` towards `xi + dir·h` at which row `row`
/// leaves the domain.
fn horizontal_theta(scheme: &dyn Scheme, xi: f64, dir: f64, h: f64, row: usize) -> f64 {
    let (mut lo, mut hi) = (0.0_f64, 1.0_f64);
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        if row_inside(row, scheme.top_at(xi + dir * mid * h)) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    if hi >= 1.0 - SNAP {
        1.0
    } else {
        hi.max(MIN_THETA)
    }
}

/// Neumann segment `[xi_lo, xi_hi] × {row}` placed on the grid.
struct Window {
    row: usize,
    xi_lo: f64,
    xi_hi: f64,
    /// true when the row is the top boundary (b = width).
    boundary: bool,
}

struct Assembly {
    triplets: Vec<(usize, usize, f64)>,
    /// Transverse-only diagonal per unknown (vertical faces, cuts, potential).
    transverse_diag: Vec<f64>,
    /// Vertical coupling to the next unknown in the same column.
    vertical_off: Vec<f64>,
    diag: AssemblyDiagnostics,
}

fn build(scheme: &dyn Scheme, spec: &GridSpec, h_xi: f64, h_eta: f64, eta_offset: f64, window: Option<Window>) -> Result<(Grid2D, Assembly)> {
    let (xa, xb) = spec.axial_extent;
    let (fa, fb) = (xa / h_xi, xb / h_xi);
    let (ka, kb) = (fa.round(), fb.round());
    if !(xa < xb) || (fa - ka).abs() > 1e-6 || (fb - kb).abs() > 1e-6 {
        return Err(Error::invalid(
            "axial extent",
            format!("[{xa}, {xb}] must be increasing with ends on multiples of h_ξ = {h_xi}"),
        ));
    }
    let (ka, kb) = (ka as i64, kb as i64);
    if kb - ka < 2 {
        return Err(Error::GridTooCoarse("no interior axial nodes".into()));
    }
    let ncols = (kb - ka - 1) as usize;
    let xi_of = |c: usize| (ka + 1 + c as i64) as f64 * h_xi;
    let in_window = |xi: f64| {
        window
            .as_ref()
            .is_some_and(|w| xi > w.xi_lo + SNAP * h_xi && xi < w.xi_hi - SNAP * h_xi)
    };

    let mut diag = AssemblyDiagnostics {
        min_theta: 1.0,
        ..Default::default()
    };

    // vertical layout
    let mut columns = Vec::with_capacity(ncols);
    for c in 0..ncols {
        let xi = xi_of(c);
        let top = scheme.top_at(xi);
        let (rows, _) = active_rows(top);
        let mut nodes: Vec<(usize, NodeKind)> = (1..=rows).map(|j| (j, NodeKind::Interior)).collect();
        if let (Some(w), true) = (&window, in_window(xi)) {
            if w.boundary {
                nodes.push((w.row, NodeKind::Neumann));
                diag.neumann_nodes += 1;
            } else if let Some(pos) = nodes.iter().position(|&(j, _)| j == w.row) {
                nodes[pos].1 = NodeKind::CrackLower;
                nodes.insert(pos + 1, (w.row, NodeKind::CrackUpper));
                diag.crack_copies += 2;
            }
        }
        columns.push(Column { nodes, top });
    }
    let mut column_start = Vec::with_capacity(ncols + 1);
    let mut all_nodes = Vec::new();
    column_start.push(0);
    for (c, col) in columns.iter().enumerate() {
        all_nodes.extend(col.nodes.iter().map(|&(row, kind)| Node { column: c, row, kind }));
        column_start.push(all_nodes.len());
    }
    let n = all_nodes.len();
    let ih_xi = 1.0 / (h_xi * h_xi);
    let ih_eta = 1.0 / (h_eta * h_eta);

    // stiffness split into axial and transverse diagonal parts, plus edges
    let mut axial_diag = vec![0.0; n];
    let mut trans_diag = vec![0.0; n];
    let mut vertical_w = vec![0.0; n];
    let mut edges: Vec<(usize, usize, f64)> = Vec::new();
    let note_cut = |diag: &mut AssemblyDiagnostics, theta: f64| {
        diag.min_theta = diag.min_theta.min(theta);
        if theta < 1.0 {
            diag.fractional_cuts += 1;
        }
    };

    for (c, col) in columns.iter().enumerate() {
        let base = column_start[c];
        let xi = xi_of(c);
        let (_, top_theta) = active_rows(col.top);
        for (k, &(row, kind)) in col.nodes.iter().enumerate() {
            let a = base + k;
            trans_diag[a] += scheme.potential(row);
            if k == 0 {
                // strip floor; on the tube axis the face weight vanishes
                trans_diag[a] += scheme.vertical_weight(row - 1, 1.0) * ih_eta;
            }
            match col.nodes.get(k + 1) {
                Some(&(_, NodeKind::CrackUpper)) if kind == NodeKind::CrackLower => {}
                Some(_) => {
                    let w = scheme.vertical_weight(row, 1.0) * ih_eta;
                    trans_diag[a] += w;
                    trans_diag[a + 1] += w;
                    vertical_w[a] = w;
                    edges.push((a, a + 1, w));
                }
                None if kind == NodeKind::Neumann => {}
                None => {
                    let theta = if kind == NodeKind::Interior { top_theta } else { 1.0 };
                    note_cut(&mut diag, theta);
                    trans_diag[a] += scheme.vertical_weight(row, theta) * ih_eta / theta;
                }
            }

            let w_self = scheme.horizontal_weight(row, kind);
            for (dir, nb) in [(-1.0, c.checked_sub(1)), (1.0, (c + 1 < ncols).then_some(c + 1))] {
                let partners: Vec<(usize, NodeKind)> = nb
                    .map(|c2| {
                        columns[c2]
                            .nodes
                            .iter()
                            .enumerate()
                            .filter(|(_, &(r2, k2))| r2 == row && compatible(kind, k2))
                            .map(|(k2, &(_, k2kind))| (column_start[c2] + k2, k2kind))
                            .collect()
                    })
                    .unwrap_or_default();
                if partners.is_empty() {
                    // axial end, wall of a bulge, or end of a Neumann line
                    let theta = match nb {
                        Some(_) if kind == NodeKind::Interior => horizontal_theta(scheme, xi, dir, h_xi, row),
                        _ => 1.0,
                    };
                    note_cut(&mut diag, theta);
                    axial_diag[a] += w_self * ih_xi / theta;
                } else if dir > 0.0 {
                    for (b, kind_b) in partners {
                        let w = w_self.min(scheme.horizontal_weight(row, kind_b)) * ih_xi;
                        axial_diag[a] += w;
                        axial_diag[b] += w;
                        edges.push((a, b, w));
                    }
                }
            }
        }
    }

    let masses: Vec<f64> = all_nodes.iter().map(|nd| scheme.mass(nd.row, nd.kind)).collect();
    let mut triplets = Vec::with_capacity(n + 2 * edges.len());
    for a in 0..n {
        triplets.push((a, a, (axial_diag[a] + trans_diag[a]) / masses[a]));
    }
    for &(a, b, w) in &edges {
        let v = -w / (masses[a] * masses[b]).sqrt();
        triplets.push((a, b, v));
        triplets.push((b, a, v));
    }
    let transverse_diag = (0..n).map(|a| trans_diag[a] / masses[a]).collect();
    let vertical_off = (0..n)
        .map(|a| {
            if vertical_w[a] == 0.0 {
                0.0
            } else {
                -vertical_w[a] / (masses[a] * masses[a + 1]).sqrt()
            }
        })
        .collect();
    diag.unknowns = n;
    diag.columns = ncols;
    let grid = Grid2D {
        xi_min: ka as f64 * h_xi,
        xi_max: kb as f64 * h_xi,
        h_xi,
        h_eta,
        eta_offset,
        column_start,
        nodes: all_nodes,
        first_index: ka,
    };
    Ok((
        grid,
        Assembly {
            triplets,
            transverse_diag,
            vertical_off,
            diag,
        },
    ))
}

/// Whether a node of kind `a` couples horizontally to one of kind `b` on the
/// same row. Crack copies couple to copies of their own side and to plain
/// nodes at the ends of the crack.
fn compatible(a: NodeKind, b: NodeKind) -> bool {
    use NodeKind::*;
    !matches!((a, b), (CrackLower, CrackUpper) | (CrackUpper, CrackLower))
}

fn finish(grid: Grid2D, asm: Assembly, threshold: f64, exact: f64, m: Option<usize>) -> Result<SparseSymOperator> {
    let matrix = SymCsr::from_triplets(grid.len(), &asm.triplets)?;
    let mut lower_bound = f64::INFINITY;
    for c in 0..grid.columns() {
        let (s, e) = (grid.column_start[c], grid.column_start[c + 1]);
        if s == e {
            continue;
        }
        let t = Tridiagonal::new(asm.transverse_diag[s..e].to_vec(), asm.vertical_off[s..e - 1].to_vec())?;
        lower_bound = lower_bound.min(t.smallest_eigenvalue());
    }
    let mut diagnostics = asm.diag;
    diagnostics.nonzeros = matrix.nnz();
    diagnostics.bandwidth = matrix.bandwidth();
    Ok(SparseSymOperator {
        matrix,
        grid,
        threshold_shift: threshold,
        exact_threshold: exact,
        lower_bound,
        angular_index: m,
        diagnostics,
    })
}

/// Smallest eigenvalue of the transverse operator of a straight column.
fn straight_column_level(scheme: &dyn Scheme, top: f64, ih_eta: f64) -> Result<f64> {
    let (rows, theta) = active_rows(top);
    if rows == 0 {
        return Err(Error::GridTooCoarse("straight cross section has no interior nodes".into()));
    }
    let mass: Vec<f64> = (1..=rows).map(|j| scheme.mass(j, NodeKind::Interior)).collect();
    let mut d: Vec<f64> = (1..=rows).map(|j| scheme.potential(j) + scheme.vertical_weight(j - 1, 1.0) * ih_eta).collect();
    let mut off = Vec::with_capacity(rows - 1);
    for j in 1..rows {
        let w = scheme.vertical_weight(j, 1.0) * ih_eta;
        d[j - 1] += w;
        off.push(-w / (mass[j - 1] * mass[j]).sqrt());
    }
    d[rows - 1] += scheme.vertical_weight(rows, theta) * ih_eta / theta;
    for (v, m) in d.iter_mut().zip(&mass) {
        *v /= m;
    }
    Ok(Tridiagonal::new(d, off)?.smallest_eigenvalue())
}

/// Operator of a strip with a bump or a Neumann window.
///
/// A Neumann segment at the top boundary turns the boundary nodes strictly
/// inside the window into unknowns with half cells (mirror stencil). A
/// segment at interior height splits the nodes strictly inside the window
/// into a lower and an upper copy with no coupling across the crack; nodes at
/// the ends of the window couple to both copies with half weight, so a
/// window containing no node reproduces the straight strip exactly.
pub fn assemble_strip(geom: &WaveguideGeometry, grid: &GridSpec) -> Result<SparseSymOperator> {
    geom.validate()?;
    check_grid(grid)?;
    let width = match geom {
        WaveguideGeometry::StripBump { width, .. } | WaveguideGeometry::StripNeumannWindow { width, .. } => *width,
        WaveguideGeometry::TubeRadial { .. } => {
            return Err(Error::invalid("geometry", "strip assembly needs a strip family"));
        }
    };
    let (h_xi, h_eta) = grid.steps(width);
    let scheme = StripScheme {
        width,
        profile: match geom {
            WaveguideGeometry::StripBump { profile, .. } => Some(profile),
            _ => None,
        },
        h_eta,
    };
    let mut height_shift = 0.0;
    let mut misaligned = 0;
    let window = match *geom {
        WaveguideGeometry::StripNeumannWindow { start, length, height, .. } => {
            let n = grid.cells_per_width;
            let row_f = height / h_eta;
            let row = (row_f.round() as usize).clamp(1, n);
            height_shift = (row as f64 - row_f) * h_eta;
            for e in [start / h_xi, (start + length) / h_xi] {
                if (e - e.round()).abs() > SNAP * e.abs().max(1.0) {
                    misaligned += 1;
                }
            }
            Some(Window {
                row,
                xi_lo: start,
                xi_hi: start + length,
                boundary: row == n,
            })
        }
        _ => None,
    };
    let (grid2d, mut asm) = build(&scheme, grid, h_xi, h_eta, 0.0, window)?;
    asm.diag.neumann_height_shift = height_shift;
    asm.diag.window_misaligned_ends = misaligned;
    let threshold = discrete_threshold(geom, grid)?;
    finish(grid2d, asm, threshold, (PI / width).powi(2), None)
}

fn check_grid(grid: &GridSpec) -> Result<()> {
    if grid.cells_per_width < 2 || !(grid.axial_ratio.is_finite() && grid.axial_ratio > 0.0) {
        return Err(Error::GridTooCoarse(format!(
            "{} transverse cells with axial ratio {}",
            grid.cells_per_width, grid.axial_ratio
        )));
    }
    Ok(())
}

/// Operator of the tube restricted to angular index `m`:
/// `−∂²_ξ − ρ⁻¹∂_ρ(ρ∂_ρ) + m²/ρ²` on `0 < ρ < r(ξ)` in conservative form
/// with mass ρ on the half-offset grid `ρ_j = (j − 1/2)h`. Symmetrizing by
/// `√ρ` is built into the mass scaling; the axis needs no boundary row
/// because the face at ρ = 0 has zero weight.
pub fn assemble_tube_axisym(geom: &WaveguideGeometry, m: usize, grid: &GridSpec) -> Result<SparseSymOperator> {
    geom.validate()?;
    let (radius, deviation) = match geom {
        WaveguideGeometry::TubeRadial { radius, deviation } => (*radius, deviation),
        _ => return Err(Error::invalid("geometry", "assemble_tube_axisym needs a tube")),
    };
    if m > MAX_BESSEL_ORDER {
        return Err(Error::out_of_range("angular index", format!("m = {m} exceeds {MAX_BESSEL_ORDER}")));
    }
    check_grid(grid)?;
    let (h_xi, h) = grid.steps(radius);
    let scheme = TubeScheme { radius, deviation, h, m };
    let (grid2d, asm) = build(&scheme, grid, h_xi, h, 0.5, None)?;
    let threshold = discrete_threshold(geom, grid)?;
    finish(grid2d, asm, threshold, (j01() / radius).powi(2), Some(m))
}

/// Discrete λ₁(ω₀) for the given geometry on the transverse grid of `grid`.
pub fn discrete_threshold(geom: &WaveguideGeometry, grid: &GridSpec) -> Result<f64> {
    match geom {
        WaveguideGeometry::StripBump { width, .. } | WaveguideGeometry::StripNeumannWindow { width, .. } => {
            let (_, h) = grid.steps(*width);
            let scheme = StripScheme { width: *width, profile: None, h_eta: h };
            straight_column_level(&scheme, width / h, 1.0 / (h * h))
        }
        WaveguideGeometry::TubeRadial { radius, deviation } => {
            let (_, h) = grid.steps(*radius);
            let scheme = TubeScheme { radius: *radius, deviation, h, m: 0 };
            straight_column_level(&scheme, radius / h + 0.5, 1.0 / (h * h))
        }
    }
}

/// Assemble any supported geometry; tubes use angular index `m`.
pub fn assemble_geometry(geom: &WaveguideGeometry, m: usize, grid: &GridSpec) -> Result<SparseSymOperator> {
    if geom.is_tube() {
        assemble_tube_axisym(geom, m, grid)
    } else {
        assemble_strip(geom, grid)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eigensolve::{dense_eigenvalues, eigen_below, EigenOptions};
    use crate::geometry::Profile;

    fn straight() -> WaveguideGeometry {
        WaveguideGeometry::strip_bump(1.0, Profile::rectangular(0.0, 0.0, 0.0).unwrap()).unwrap()
    }

    fn spec(n: usize, a: f64, b: f64) -> GridSpec {
        GridSpec {
            cells_per_width: n,
            axial_ratio: 1.0,
            axial_extent: (a, b),
        }
    }

    #[test]
    fn straight_strip_is_separable() {
        let op = assemble_strip(&straight(), &spec(20, -5.0, 5.0)).unwrap();
        let h: f64 = 0.05;
        let fd = |k: f64, len: f64| 4.0 / (h * h) * (k * PI * h / (2.0 * len)).sin().powi(2);
        let s = eigen_below(&op, 10.5, &EigenOptions::default()).unwrap();
        assert_eq!(s.len(), 2);
        assert!((s.eigenvalues[0] - (fd(1.0, 1.0) + fd(1.0, 10.0))).abs() < 1e-8);
        assert!((s.eigenvalues[1] - (fd(1.0, 1.0) + fd(2.0, 10.0))).abs() < 1e-8);
        assert!((op.threshold_shift() - fd(1.0, 1.0)).abs() < 1e-10);
        assert!(op.spectral_lower_bound().unwrap() <= s.eigenvalues[0]);
        assert_eq!(op.diagnostics().fractional_cuts, 0);
    }

    #[test]
    fn interior_row_sums_vanish() {
        let op = assemble_strip(&straight(), &spec(10, -2.0, 2.0)).unwrap();
        let g = op.grid();
        let idx = g.column_start[20] + 4;
        let (_, vals) = op.matrix().row(idx);
        assert_eq!(vals.len(), 5);
        assert!(vals.iter().sum::<f64>().abs() < 1e-9);
    }

    #[test]
    fn dirichlet_operator_invariants() {
        let geom = WaveguideGeometry::strip_bump(1.0, Profile::smooth_bump(-1.0, 1.0, 0.37).unwrap()).unwrap();
        let op = assemble_strip(&geom, &spec(10, -3.0, 3.0)).unwrap();
        assert!(op.matrix().is_exactly_symmetric());
        assert!(op.matrix().diagonal().iter().all(|&d| d > 0.0));
        assert!(op.matrix().gershgorin_bounds().0 >= 0.0);
        assert!(op.diagnostics().fractional_cuts > 0);
        assert!(op.matrix().bandwidth() <= 2 * 14);
    }

    #[test]
    fn window_creates_bound_state() {
        let geom = WaveguideGeometry::neumann_window(1.0, 0.0, 2.0, 1.0).unwrap();
        let op = assemble_strip(&geom, &spec(16, -4.0, 6.0)).unwrap();
        assert_eq!(op.diagnostics().neumann_nodes, 31);
        let s = eigen_below(&op, PI * PI, &EigenOptions::default()).unwrap();
        assert!(!s.is_empty());
        assert!(s.eigenvalues[0] < PI * PI);
        // the operator stays positive definite
        let e = dense_eigenvalues(op.matrix());
        assert!(e[0] > 0.0);
    }

    #[test]
    fn empty_window_equals_straight_strip() {
        let g = spec(12, -3.0, 3.0);
        let plain = assemble_strip(&straight(), &g).unwrap();
        for (b, len) in [(0.75, 0.0), (1.0, 0.0), (0.75, 0.05)] {
            let win = WaveguideGeometry::neumann_window(1.0, 0.51, len, b).unwrap();
            let cracked = assemble_strip(&win, &g).unwrap();
            assert_eq!(cracked.matrix(), plain.matrix());
        }
    }

    #[test]
    fn crack_duplicates_nodes() {
        let win = WaveguideGeometry::neumann_window(1.0, 0.0, 1.0, 0.75).unwrap();
        let op = assemble_strip(&win, &spec(8, -2.0, 3.0)).unwrap();
        // window (0, 1) holds 7 axial nodes; each crack node appears twice
        assert_eq!(op.diagnostics().crack_copies, 14);
        let plain = assemble_strip(&straight(), &spec(8, -2.0, 3.0)).unwrap();
        assert_eq!(op.dim(), plain.dim() + 7);
        assert!(op.matrix().is_exactly_symmetric());
        let lo = dense_eigenvalues(op.matrix())[0];
        let lo_plain = dense_eigenvalues(plain.matrix())[0];
        assert!(lo < lo_plain);
    }

    #[test]
    fn larger_bump_lowers_ground_state() {
        let g = spec(8, -3.0, 4.0);
        let mut last = f64::INFINITY;
        for a in [0.0, 0.25, 0.5, 1.0] {
            let geom = WaveguideGeometry::strip_bump(1.0, Profile::rectangular(0.0, 1.0, a).unwrap()).unwrap();
            let e = dense_eigenvalues(assemble_strip(&geom, &g).unwrap().matrix())[0];
            assert!(e <= last);
            last = e;
        }
    }

    #[test]
    fn dilation_scales_entries_exactly() {
        let geom = WaveguideGeometry::strip_bump(1.0, Profile::smooth_bump(-1.0, 1.0, 0.6).unwrap()).unwrap();
        let a = assemble_strip(&geom, &spec(8, -2.0, 2.0)).unwrap();
        let b = assemble_strip(&geom.dilated(2.0), &spec(8, -4.0, 4.0)).unwrap();
        assert_eq!(a.matrix().scaled(0.25), *b.matrix());
    }

    #[test]
    fn tube_transverse_levels_converge_at_second_order() {
        let j01 = crate::special::j01();
        let j11 = crate::special::bessel_zero(1, 1).unwrap();
        let tube = WaveguideGeometry::tube(1.0, Profile::rectangular(0.0, 0.0, 0.0).unwrap()).unwrap();
        for (m, exact) in [(0, j01 * j01), (1, j11 * j11)] {
            let levels: Vec<f64> = [10, 20, 40]
                .iter()
                .map(|&n| {
                    assemble_tube_axisym(&tube, m, &spec(n, -1.0, 1.0))
                        .unwrap()
                        .spectral_lower_bound()
                        .unwrap()
                })
                .collect();
            let p = ((levels[0] - levels[1]) / (levels[1] - levels[2])).log2();
            assert!((1.8..=2.2).contains(&p), "m = {m}: order {p}");
            assert!((levels[2] - exact).abs() < 2e-2 * exact);
        }
        let op = assemble_tube_axisym(&tube, 0, &spec(20, -1.0, 1.0)).unwrap();
        assert_eq!(op.threshold_shift(), op.spectral_lower_bound().unwrap());
        assert!(assemble_tube_axisym(&tube, 6, &spec(20, -1.0, 1.0)).is_err());
    }

    #[test]
    fn straight_tube_is_separable() {
        let tube = WaveguideGeometry::tube(1.0, Profile::rectangular(0.0, 0.0, 0.0).unwrap()).unwrap();
        let op = assemble_tube_axisym(&tube, 0, &spec(12, -3.0, 3.0)).unwrap();
        let h = 1.0 / 12.0;
        let axial = 4.0 / (h * h) * (PI * h / 12.0).sin().powi(2);
        let e = eigen_below(&op, op.threshold_shift() + 2.0 * axial, &EigenOptions::default()).unwrap();
        assert_eq!(e.len(), 1);
        assert!((e.eigenvalues[0] - (op.threshold_shift() + axial)).abs() < 1e-8);
        let j01 = crate::special::j01();
        assert!((e.eigenvalues[0] - (j01 * j01 + (PI / 6.0).powi(2))).abs() < 0.05);
    }

    #[test]
    fn tube_bulge_has_one_bound_state() {
        let tube = WaveguideGeometry::tube(1.0, Profile::rectangular(0.0, 2.0, 0.2).unwrap()).unwrap();
        let g = spec(10, -3.0, 5.0);
        let op0 = assemble_tube_axisym(&tube, 0, &g).unwrap();
        let s0 = eigen_below(&op0, op0.threshold_shift(), &EigenOptions::default()).unwrap();
        assert_eq!(s0.certified_count, 1);
        let op1 = assemble_tube_axisym(&tube, 1, &g).unwrap();
        let s1 = eigen_below(&op1, op0.threshold_shift(), &EigenOptions::default()).unwrap();
        assert_eq!(s1.certified_count, 0);
    }

    #[test]
    fn misaligned_extent_rejected() {
        assert!(assemble_strip(&straight(), &spec(10, -1.05, 1.0)).is_err());
    }

    #[test]
    fn coo_dump_roundtrips() {
        let op = assemble_strip(&straight(), &spec(4, -0.5, 0.5)).unwrap();
        let mut out = Vec::new();
        op.write_coo(&mut out).unwrap();
        let text = String::from_utf8(out).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next().unwrap(), format!("% {0} {0} {1}", op.dim(), op.matrix().nnz()));
        for line in lines {
            let parts: Vec<&str> = line.split(' ').collect();
            let (i, j, v): (usize, usize, f64) = (parts[0].parse().unwrap(), parts[1].parse().unwrap(), parts[2].parse().unwrap());
            assert_eq!(v, op.matrix().get(i, j));
        }
    }
}
