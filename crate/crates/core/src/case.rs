//! Problem instances shared by the solver, the encoder and the dataset
//! generator.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::fea::{ConstraintSet, FeaError, GridMesh, LoadPatch};

/// Where a case came from inside a generated dataset.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct CaseTags {
    pub geometry_id: u32,
    pub bc_id: u32,
    pub load_id: u32,
    /// Load direction, counter-clockwise from +x, in `[0, 360)`.
    pub orientation_deg: f64,
    /// Load magnitude before any normalization (N/mm² for the fine family,
    /// total N for the coarse family).
    pub magnitude: f64,
}

/// One problem: geometry, nodal constraints and traction patches.
///
/// Mesh and constraints sit behind `Arc` because a dataset enumerates many
/// cases over the same geometry and boundary pattern.
#[derive(Debug, Clone, PartialEq)]
pub struct CaseSpec {
    pub mesh: Arc<GridMesh>,
    pub constraints: Arc<ConstraintSet>,
    pub loads: Vec<LoadPatch>,
    pub tags: CaseTags,
}

impl CaseSpec {
    pub fn new(mesh: GridMesh, constraints: ConstraintSet, loads: Vec<LoadPatch>) -> Self {
        Self {
            mesh: Arc::new(mesh),
            constraints: Arc::new(constraints),
            loads,
            tags: CaseTags::default(),
        }
    }

    pub fn with_tags(mut self, tags: CaseTags) -> Self {
        self.tags = tags;
        self
    }

    pub fn m(&self) -> usize {
        self.mesh.m()
    }

    pub fn validate(&self) -> Result<(), FeaError> {
        let m = self.mesh.m();
        if self.constraints.m() != m {
            return Err(FeaError::Shape {
                expected: m,
                found: self.constraints.m(),
            });
        }
        let theta = self.tags.orientation_deg;
        if !(0.0..360.0).contains(&theta) {
            return Err(FeaError::InvalidLoad(format!(
                "orientation {theta} outside [0, 360)"
            )));
        }
        for patch in &self.loads {
            if !(patch.q_x.is_finite() && patch.q_y.is_finite()) {
                return Err(FeaError::InvalidLoad("non-finite traction".into()));
            }
            for site in patch.sites.iter() {
                if site.row >= m || site.col >= m || !self.mesh.is_solid(site.row, site.col) {
                    return Err(FeaError::InvalidLoad(format!(
                        "load site ({}, {}) is not a solid element",
                        site.row, site.col
                    )));
                }
            }
        }
        Ok(())
    }

    /// Same case with every traction multiplied by `factor`.
    pub fn scaled_loads(&self, factor: f64) -> Self {
        Self {
            loads: self.loads.iter().map(|p| p.scaled(factor)).collect(),
            ..self.clone()
        }
    }
}

/// Unit direction for an angle in degrees, exact on the axes and diagonals.
pub fn direction(theta_deg: f64) -> (f64, f64) {
    let t = theta_deg.rem_euclid(360.0);
    let r = std::f64::consts::FRAC_1_SQRT_2;
    match t {
        0.0 => (1.0, 0.0),
        45.0 => (r, r),
        90.0 => (0.0, 1.0),
        135.0 => (-r, r),
        180.0 => (-1.0, 0.0),
        225.0 => (-r, -r),
        270.0 => (0.0, -1.0),
        315.0 => (r, -r),
        t => {
            let rad = t.to_radians();
            (rad.cos(), rad.sin())
        }
    }
}
