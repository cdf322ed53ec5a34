//! Fixtures shared by the benchmarks in `benches/`.

use waveguide_core::{assemble_strip, GridSpec, Profile, SparseSymOperator, WaveguideGeometry};

/// Unit strip with a cos² bump of height 1/2 on [−1, 1].
pub fn bump_strip() -> WaveguideGeometry {
    WaveguideGeometry::strip_bump(1.0, Profile::smooth_bump(-1.0, 1.0, 0.5).expect("valid profile")).expect("valid strip")
}

/// Unit tube widened to radius 1.2 on [0, 2].
pub fn bulged_tube() -> WaveguideGeometry {
    WaveguideGeometry::tube(1.0, Profile::rectangular(0.0, 2.0, 0.2).expect("valid profile")).expect("valid tube")
}

/// The bump strip on [−4, 4] with `cells` transverse cells.
pub fn bump_operator(cells: usize) -> SparseSymOperator {
    let grid = GridSpec {
        cells_per_width: cells,
        axial_ratio: 1.0,
        axial_extent: (-4.0, 4.0),
    };
    assemble_strip(&bump_strip(), &grid).expect("assembles")
}
