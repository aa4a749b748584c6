//! Linear plane-stress finite elements on regular quadrilateral grids.

mod assembly;
mod banded;
mod element;
mod error;
mod loads;
mod material;
mod mesh;
mod sparse;
mod stress;

pub use assembly::{
    assemble, solve_displacements, DisplacementField, FactoredStiffness, MeshSystem, StiffnessSystem,
    RESIDUAL_TOLERANCE,
};
pub use banded::{BandedCholesky, SingularPivot};
pub use element::{element_stiffness, strain_displacement, ElementMatrix, StrainDisplacement};
pub use error::{FeaError, Result};
pub use loads::{LoadField, LoadPatch, LoadSite};
pub use material::{Material, VOID_STIFFNESS_FACTOR};
pub use mesh::{ConstraintSet, Face, GridMesh};
pub use sparse::CsrMatrix;
pub use stress::{recover_stress, von_mises, StressField};

use crate::case::CaseSpec;

/// Nodal loads of a case under the given material thickness.
pub fn case_loads(case: &CaseSpec, material: &Material) -> Result<LoadField> {
    LoadField::from_patches(&case.mesh, material.thickness, &case.loads)
}

/// Assembles, solves and recovers stresses for one case.
pub fn solve_case(case: &CaseSpec, material: &Material) -> Result<StressField> {
    case.validate()?;
    let factored = StiffnessSystem::assemble(&case.mesh, material, &case.constraints)?.factorize()?;
    solve_case_with(&factored, case)
}

/// Solves a case against an already factored stiffness. The case must share
/// the factored system's mesh and constraints; the result is bit-identical to
/// [`solve_case`].
pub fn solve_case_with(factored: &FactoredStiffness, case: &CaseSpec) -> Result<StressField> {
    let system = factored.system();
    if system.mesh() != case.mesh.as_ref() || system.constraints() != case.constraints.as_ref() {
        return Err(FeaError::InvalidMesh(
            "case does not match the factored stiffness system".into(),
        ));
    }
    let loads = case_loads(case, system.material())?;
    let q = factored.solve(&loads)?;
    recover_stress(system.mesh(), system.material(), &q)
}
