//! Fixtures shared by the benchmarks.

use stressforge::fea::{Face, LoadSite};
use stressforge::{CaseSpec, ConstraintSet, GridMesh, LoadPatch};

/// Square plate clamped on the left edge with a unit downward traction on
/// the right edge.
pub fn cantilever(m: usize) -> CaseSpec {
    let mesh = GridMesh::all_solid(m, 1.0);
    let mut constraints = ConstraintSet::free(m);
    for i in 0..=m {
        constraints.fix(i, 0, true, true);
    }
    let sites: Vec<LoadSite> = (0..m)
        .map(|row| LoadSite {
            row,
            col: m - 1,
            face: Face::Right,
        })
        .collect();
    CaseSpec::new(mesh, constraints, vec![LoadPatch::new(sites, 0.0, -1.0)])
}
