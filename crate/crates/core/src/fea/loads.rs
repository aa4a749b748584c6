use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::error::{FeaError, Result};
use super::mesh::{Face, GridMesh};

/// One loaded element face.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct LoadSite {
    pub row: usize,
    pub col: usize,
    pub face: Face,
}

/// A uniform traction `(q_x, q_y)` in N/mm² acting on a set of element faces.
#[derive(Debug, Clone, PartialEq)]
pub struct LoadPatch {
    pub sites: Arc<[LoadSite]>,
    pub q_x: f64,
    pub q_y: f64,
}

impl LoadPatch {
    pub fn new(sites: impl Into<Arc<[LoadSite]>>, q_x: f64, q_y: f64) -> Self {
        Self {
            sites: sites.into(),
            q_x,
            q_y,
        }
    }

    pub fn magnitude(&self) -> f64 {
        self.q_x.hypot(self.q_y)
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            sites: Arc::clone(&self.sites),
            q_x: self.q_x * factor,
            q_y: self.q_y * factor,
        }
    }
}

/// Consistent nodal forces (N) on every node of the grid.
#[derive(Debug, Clone, PartialEq)]
pub struct LoadField {
    fx: Vec<f64>,
    fy: Vec<f64>,
}

impl LoadField {
    pub fn zeros(node_count: usize) -> Self {
        Self {
            fx: vec![0.0; node_count],
            fy: vec![0.0; node_count],
        }
    }

    /// Lumps each face traction onto the face's two nodes: every node gets
    /// half of `q · h · t`.
    pub fn from_patches(mesh: &GridMesh, thickness: f64, patches: &[LoadPatch]) -> Result<Self> {
        let mut field = Self::zeros(mesh.node_count());
        let m = mesh.m();
        let half = 0.5 * mesh.element_size() * thickness;
        for patch in patches {
            if !(patch.q_x.is_finite() && patch.q_y.is_finite()) {
                return Err(FeaError::InvalidLoad("non-finite traction".into()));
            }
            for site in patch.sites.iter() {
                if site.row >= m || site.col >= m {
                    return Err(FeaError::InvalidLoad(format!(
                        "load site ({}, {}) outside {m}x{m} grid",
                        site.row, site.col
                    )));
                }
                if !mesh.is_solid(site.row, site.col) {
                    return Err(FeaError::InvalidLoad(format!(
                        "load site ({}, {}) is a void element",
                        site.row, site.col
                    )));
                }
                for node in mesh.face_nodes(site.row, site.col, site.face) {
                    field.fx[node] += patch.q_x * half;
                    field.fy[node] += patch.q_y * half;
                }
            }
        }
        Ok(field)
    }

    pub fn from_components(fx: Vec<f64>, fy: Vec<f64>) -> Result<Self> {
        if fx.len() != fy.len() {
            return Err(FeaError::Shape {
                expected: fx.len(),
                found: fy.len(),
            });
        }
        Ok(Self { fx, fy })
    }

    pub fn node_count(&self) -> usize {
        self.fx.len()
    }

    pub fn fx(&self) -> &[f64] {
        &self.fx
    }

    pub fn fy(&self) -> &[f64] {
        &self.fy
    }

    /// Interleaved global force vector `[fx0, fy0, fx1, fy1, …]`.
    pub fn to_dof_vector(&self) -> Vec<f64> {
        self.fx
            .iter()
            .zip(&self.fy)
            .flat_map(|(&x, &y)| [x, y])
            .collect()
    }

    pub fn is_zero(&self) -> bool {
        self.fx.iter().chain(&self.fy).all(|&v| v == 0.0)
    }
}
