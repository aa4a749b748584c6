use serde::{Deserialize, Serialize};

use super::error::{DatasetError, Result};
use super::patterns::BcPattern;
use crate::fea::Material;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    /// Multiple structures on 128×128 grids with varied supports and loads.
    Fine,
    /// Cantilever beams on 32×32 grids, clamped left and loaded at the right end.
    Coarse,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Normalization {
    /// Every nonzero traction patch is rescaled to unit magnitude.
    Unit,
    /// Tractions are stored at their generated magnitude.
    Passthrough,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GenerationConfig {
    pub family: Family,
    pub mesh_size: usize,
    pub element_size: f64,
    pub material: Material,
    pub geometry_count: usize,
    /// Number of built-in constraint patterns used, taken in order.
    pub bc_pattern_count: usize,
    /// Extra constraint patterns appended after the built-in ones.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub custom_bc_patterns: Vec<BcPattern>,
    pub load_pattern_count: usize,
    pub orientations_deg: Vec<f64>,
    /// Fine family: traction in N/mm². Coarse family: total force in N.
    pub magnitudes: Vec<f64>,
    pub normalization: Normalization,
    pub seed: u64,
    /// Keep only the first `limit` cases of the enumeration.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub limit: Option<usize>,
}

pub const FINE_BC_PATTERNS: usize = 8;
pub const FINE_LOAD_PATTERNS: usize = 10;
pub const FINE_GEOMETRIES: usize = 60;
pub const COARSE_GEOMETRIES: usize = 80;

fn stepped(start: f64, step: f64, count: usize) -> Vec<f64> {
    (0..count).map(|k| start + step * k as f64).collect()
}

impl GenerationConfig {
    /// 60 geometries × 8 supports × 10 load positions × 8 orientations, unit loads.
    pub fn fine(seed: u64) -> Self {
        Self {
            family: Family::Fine,
            mesh_size: 128,
            element_size: 1.0,
            material: Material::default(),
            geometry_count: FINE_GEOMETRIES,
            bc_pattern_count: FINE_BC_PATTERNS,
            custom_bc_patterns: Vec::new(),
            load_pattern_count: FINE_LOAD_PATTERNS,
            orientations_deg: stepped(0.0, 45.0, 8),
            magnitudes: vec![1.0],
            normalization: Normalization::Unit,
            seed,
            limit: None,
        }
    }

    /// 80 beams × 72 orientations × 21 magnitudes (0–100 N).
    pub fn coarse(seed: u64) -> Self {
        Self {
            family: Family::Coarse,
            mesh_size: 32,
            element_size: 1.0,
            material: Material::default(),
            geometry_count: COARSE_GEOMETRIES,
            bc_pattern_count: 1,
            custom_bc_patterns: Vec::new(),
            load_pattern_count: 1,
            orientations_deg: stepped(0.0, 5.0, 72),
            magnitudes: stepped(0.0, 5.0, 21),
            normalization: Normalization::Passthrough,
            seed,
            limit: None,
        }
    }

    pub fn for_family(family: Family, seed: u64) -> Self {
        match family {
            Family::Fine => Self::fine(seed),
            Family::Coarse => Self::coarse(seed),
        }
    }

    pub fn bc_count(&self) -> usize {
        self.bc_pattern_count + self.custom_bc_patterns.len()
    }

    /// Size of the full Cartesian product, before `limit`.
    pub fn product_count(&self) -> usize {
        self.geometry_count
            * self.bc_count()
            * self.load_pattern_count
            * self.orientations_deg.len()
            * self.magnitudes.len()
    }

    pub fn case_count(&self) -> usize {
        let n = self.product_count();
        self.limit.map_or(n, |l| l.min(n))
    }

    pub fn validate(&self) -> Result<()> {
        let err = |msg: String| Err(DatasetError::Config(msg));
        if self.mesh_size < 8 {
            return err(format!("mesh size {} is below the minimum of 8", self.mesh_size));
        }
        if !(self.element_size.is_finite() && self.element_size > 0.0) {
            return err(format!("element size {} must be positive", self.element_size));
        }
        self.material.validate()?;
        if self.geometry_count == 0 || self.bc_count() == 0 || self.load_pattern_count == 0 {
            return err("geometry, constraint and load pattern counts must be positive".into());
        }
        let (max_bc, max_load) = match self.family {
            Family::Fine => (FINE_BC_PATTERNS, FINE_LOAD_PATTERNS),
            Family::Coarse => (1, 1),
        };
        if self.bc_pattern_count > max_bc || self.load_pattern_count > max_load {
            return err(format!(
                "{:?} family offers {max_bc} constraint and {max_load} load patterns",
                self.family
            ));
        }
        if self.orientations_deg.is_empty() || self.magnitudes.is_empty() {
            return err("orientation and magnitude sets must be non-empty".into());
        }
        if let Some(t) = self
            .orientations_deg
            .iter()
            .find(|t| !(0.0..360.0).contains(*t))
        {
            return err(format!("orientation {t} outside [0, 360)"));
        }
        if let Some(f) = self.magnitudes.iter().find(|f| !(f.is_finite() && **f >= 0.0)) {
            return err(format!("magnitude {f} must be finite and non-negative"));
        }
        if self.limit == Some(0) {
            return err("limit must be positive".into());
        }
        Ok(())
    }
}
