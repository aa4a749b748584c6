use serde::{Deserialize, Serialize};

use super::error::{FeaError, Result};

/// Stiffness of void elements relative to solid material.
pub const VOID_STIFFNESS_FACTOR: f64 = 1e-6;

/// Isotropic linear-elastic material in plane stress (units: MPa, mm).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Material {
    pub youngs_modulus: f64,
    pub poissons_ratio: f64,
    pub thickness: f64,
}

impl Default for Material {
    fn default() -> Self {
        Self {
            youngs_modulus: 200_000.0,
            poissons_ratio: 0.3,
            thickness: 1.0,
        }
    }
}

impl Material {
    pub fn new(youngs_modulus: f64, poissons_ratio: f64, thickness: f64) -> Result<Self> {
        let material = Self {
            youngs_modulus,
            poissons_ratio,
            thickness,
        };
        material.validate()?;
        Ok(material)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.youngs_modulus.is_finite() && self.youngs_modulus > 0.0) {
            return Err(FeaError::InvalidMaterial(format!(
                "youngs_modulus must be positive, got {}",
                self.youngs_modulus
            )));
        }
        if !(0.0..0.5).contains(&self.poissons_ratio) {
            return Err(FeaError::InvalidMaterial(format!(
                "poissons_ratio must lie in [0, 0.5), got {}",
                self.poissons_ratio
            )));
        }
        if !(self.thickness.is_finite() && self.thickness > 0.0) {
            return Err(FeaError::InvalidMaterial(format!(
                "thickness must be positive, got {}",
                self.thickness
            )));
        }
        Ok(())
    }

    /// Plane-stress constitutive matrix mapping (εx, εy, γxy) to (σx, σy, τxy).
    pub fn constitutive(&self) -> [[f64; 3]; 3] {
        let nu = self.poissons_ratio;
        let c = self.youngs_modulus / (1.0 - nu * nu);
        [
            [c, c * nu, 0.0],
            [c * nu, c, 0.0],
            [0.0, 0.0, c * (1.0 - nu) / 2.0],
        ]
    }

    pub fn with_youngs_modulus(mut self, youngs_modulus: f64) -> Self {
        self.youngs_modulus = youngs_modulus;
        self
    }
}
