//! Global stiffness assembly, constraint reduction and the linear solve.

use super::banded::BandedCholesky;
use super::element::{element_stiffness, ElementMatrix};
use super::error::{FeaError, Result};
use super::loads::LoadField;
use super::material::{Material, VOID_STIFFNESS_FACTOR};
use super::mesh::{ConstraintSet, GridMesh};
use super::sparse::CsrMatrix;

/// Relative residual `‖K·Q − F‖ / ‖F‖` every accepted solution satisfies.
pub const RESIDUAL_TOLERANCE: f64 = 1e-10;

const MAX_REFINEMENT_STEPS: usize = 5;

/// Nodal displacements (mm), one pair per grid node.
#[derive(Debug, Clone, PartialEq)]
pub struct DisplacementField {
    m: usize,
    ux: Vec<f64>,
    uy: Vec<f64>,
}

impl DisplacementField {
    pub fn zeros(m: usize) -> Self {
        let n = (m + 1) * (m + 1);
        Self {
            m,
            ux: vec![0.0; n],
            uy: vec![0.0; n],
        }
    }

    /// Splits an interleaved `[ux0, uy0, ux1, …]` vector.
    pub fn from_dof_vector(m: usize, q: &[f64]) -> Result<Self> {
        let n = (m + 1) * (m + 1);
        if q.len() != 2 * n {
            return Err(FeaError::Shape {
                expected: 2 * n,
                found: q.len(),
            });
        }
        Ok(Self {
            m,
            ux: q.iter().step_by(2).copied().collect(),
            uy: q.iter().skip(1).step_by(2).copied().collect(),
        })
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn ux(&self) -> &[f64] {
        &self.ux
    }

    pub fn uy(&self) -> &[f64] {
        &self.uy
    }

    pub fn to_dof_vector(&self) -> Vec<f64> {
        self.ux
            .iter()
            .zip(&self.uy)
            .flat_map(|(&x, &y)| [x, y])
            .collect()
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            m: self.m,
            ux: self.ux.iter().map(|v| v * factor).collect(),
            uy: self.uy.iter().map(|v| v * factor).collect(),
        }
    }
}

/// Element-to-global DOF map for element `(row, col)`.
fn element_dofs(mesh: &GridMesh, row: usize, col: usize) -> [usize; 8] {
    let nodes = mesh.element_nodes(row, col);
    let mut dofs = [0; 8];
    for (a, &n) in nodes.iter().enumerate() {
        dofs[2 * a] = 2 * n;
        dofs[2 * a + 1] = 2 * n + 1;
    }
    dofs
}

/// Sparsity pattern of the grid: each DOF couples with both DOFs of the
/// nodes in its 3×3 node neighbourhood.
fn grid_pattern(m: usize) -> Vec<Vec<usize>> {
    let nn = m + 1;
    let mut rows = Vec::with_capacity(2 * nn * nn);
    for i in 0..nn {
        for j in 0..nn {
            let mut cols = Vec::with_capacity(18);
            for ni in i.saturating_sub(1)..(i + 2).min(nn) {
                for nj in j.saturating_sub(1)..(j + 2).min(nn) {
                    let node = ni * nn + nj;
                    cols.push(2 * node);
                    cols.push(2 * node + 1);
                }
            }
            rows.push(cols.clone());
            rows.push(cols);
        }
    }
    rows
}

/// Stiffness part of a problem: geometry, material and constraints, but no
/// loads. One of these can be factored once and reused for many load cases.
#[derive(Debug, Clone)]
pub struct StiffnessSystem {
    mesh: GridMesh,
    material: Material,
    constraints: ConstraintSet,
    global: CsrMatrix,
    reduced: CsrMatrix,
    free_dofs: Vec<usize>,
}

impl StiffnessSystem {
    pub fn assemble(mesh: &GridMesh, material: &Material, constraints: &ConstraintSet) -> Result<Self> {
        material.validate()?;
        if constraints.m() != mesh.m() {
            return Err(FeaError::Shape {
                expected: mesh.m(),
                found: constraints.m(),
            });
        }
        constraints.check_rigid_body_support()?;

        let solid_k = element_stiffness(material, mesh.element_size())?;
        let mut void_k: ElementMatrix = solid_k;
        for row in void_k.iter_mut() {
            for v in row.iter_mut() {
                *v *= VOID_STIFFNESS_FACTOR;
            }
        }

        let m = mesh.m();
        let mut global = CsrMatrix::from_pattern(mesh.dof_count(), &grid_pattern(m));
        for row in 0..m {
            for col in 0..m {
                let k = if mesh.is_solid(row, col) {
                    &solid_k
                } else {
                    &void_k
                };
                let dofs = element_dofs(mesh, row, col);
                for (a, &ga) in dofs.iter().enumerate() {
                    for (b, &gb) in dofs.iter().enumerate() {
                        global.add(ga, gb, k[a][b]);
                    }
                }
            }
        }

        let free_dofs: Vec<usize> = (0..mesh.dof_count())
            .filter(|&d| !constraints.is_dof_fixed(d))
            .collect();
        let reduced = global.submatrix(&free_dofs);
        Ok(Self {
            mesh: mesh.clone(),
            material: *material,
            constraints: constraints.clone(),
            global,
            reduced,
            free_dofs,
        })
    }

    pub fn mesh(&self) -> &GridMesh {
        &self.mesh
    }

    pub fn material(&self) -> &Material {
        &self.material
    }

    pub fn constraints(&self) -> &ConstraintSet {
        &self.constraints
    }

    /// Full `2(m+1)² × 2(m+1)²` stiffness matrix before constraint removal.
    pub fn global_stiffness(&self) -> &CsrMatrix {
        &self.global
    }

    /// Stiffness restricted to the free DOFs.
    pub fn reduced_stiffness(&self) -> &CsrMatrix {
        &self.reduced
    }

    /// Global indices of the unconstrained DOFs, ascending.
    pub fn free_dofs(&self) -> &[usize] {
        &self.free_dofs
    }

    pub fn reduce_loads(&self, loads: &LoadField) -> Result<Vec<f64>> {
        if loads.node_count() != self.mesh.node_count() {
            return Err(FeaError::Shape {
                expected: self.mesh.node_count(),
                found: loads.node_count(),
            });
        }
        let f = loads.to_dof_vector();
        Ok(self.free_dofs.iter().map(|&d| f[d]).collect())
    }

    pub fn factorize(self) -> Result<FactoredStiffness> {
        let chol = BandedCholesky::factor(&self.reduced).map_err(|p| {
            let dof = self.free_dofs[p.index];
            FeaError::UnderConstrained(format!(
                "stiffness is singular at dof {dof} (node {}, axis {}), pivot ratio {:e}",
                dof / 2,
                if dof.is_multiple_of(2) { 'x' } else { 'y' },
                p.ratio
            ))
        })?;
        Ok(FactoredStiffness { system: self, chol })
    }
}

/// A factored stiffness system ready to solve any number of load cases.
#[derive(Debug, Clone)]
pub struct FactoredStiffness {
    system: StiffnessSystem,
    chol: BandedCholesky,
}

impl FactoredStiffness {
    pub fn system(&self) -> &StiffnessSystem {
        &self.system
    }

    /// Solves for the displacements under `loads`. Constrained DOFs come
    /// back as exact zeros.
    pub fn solve(&self, loads: &LoadField) -> Result<DisplacementField> {
        let f = self.system.reduce_loads(loads)?;
        let q = self.solve_reduced(&f)?;
        let mut full = vec![0.0; self.system.mesh.dof_count()];
        for (&d, &v) in self.system.free_dofs.iter().zip(&q) {
            full[d] = v;
        }
        DisplacementField::from_dof_vector(self.system.mesh.m(), &full)
    }

    /// Solves the reduced system with residual-checked iterative refinement.
    pub fn solve_reduced(&self, f: &[f64]) -> Result<Vec<f64>> {
        let f_norm = norm(f);
        if f_norm == 0.0 {
            return Ok(vec![0.0; f.len()]);
        }
        let k = &self.system.reduced;
        let mut q = self.chol.solve(f);
        let mut residual = residual_vector(k, &q, f);
        let mut rel = norm(&residual) / f_norm;
        let mut steps = 0;
        while rel > RESIDUAL_TOLERANCE && steps < MAX_REFINEMENT_STEPS {
            let dq = self.chol.solve(&residual);
            for (qi, di) in q.iter_mut().zip(&dq) {
                *qi += di;
            }
            residual = residual_vector(k, &q, f);
            rel = norm(&residual) / f_norm;
            steps += 1;
        }
        if !(rel <= RESIDUAL_TOLERANCE) {
            return Err(FeaError::Numerical { residual: rel });
        }
        Ok(q)
    }
}

fn residual_vector(k: &CsrMatrix, q: &[f64], f: &[f64]) -> Vec<f64> {
    k.mul_vec(q).iter().zip(f).map(|(kq, fi)| fi - kq).collect()
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// An assembled problem: stiffness, constraints and loads.
#[derive(Debug, Clone)]
pub struct MeshSystem {
    stiffness: StiffnessSystem,
    loads: LoadField,
    reduced_loads: Vec<f64>,
}

impl MeshSystem {
    pub fn stiffness(&self) -> &StiffnessSystem {
        &self.stiffness
    }

    pub fn global_stiffness(&self) -> &CsrMatrix {
        self.stiffness.global_stiffness()
    }

    pub fn loads(&self) -> &LoadField {
        &self.loads
    }

    /// Load vector restricted to the free DOFs.
    pub fn reduced_loads(&self) -> &[f64] {
        &self.reduced_loads
    }
}

pub fn assemble(
    mesh: &GridMesh,
    material: &Material,
    loads: &LoadField,
    constraints: &ConstraintSet,
) -> Result<MeshSystem> {
    let stiffness = StiffnessSystem::assemble(mesh, material, constraints)?;
    let reduced_loads = stiffness.reduce_loads(loads)?;
    Ok(MeshSystem {
        stiffness,
        loads: loads.clone(),
        reduced_loads,
    })
}

pub fn solve_displacements(system: &MeshSystem) -> Result<DisplacementField> {
    system.stiffness.clone().factorize()?.solve(&system.loads)
}
