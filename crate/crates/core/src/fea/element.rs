//! Bilinear 4-node square element in plane stress.

use super::error::{FeaError, Result};
use super::material::Material;

pub type ElementMatrix = [[f64; 8]; 8];
pub type StrainDisplacement = [[f64; 8]; 3];

/// Natural coordinates of the element corners, counter-clockwise from the
/// bottom-left node.
const CORNERS: [(f64, f64); 4] = [(-1.0, -1.0), (1.0, -1.0), (1.0, 1.0), (-1.0, 1.0)];

/// Strain/displacement matrix of a square element of side `size`, evaluated
/// at natural coordinates `(xi, eta)`.
pub fn strain_displacement(size: f64, xi: f64, eta: f64) -> StrainDisplacement {
    // x = (ξ+1)·h/2, so ∂/∂x = (2/h)·∂/∂ξ; same for y.
    let scale = 2.0 / size;
    let mut b = [[0.0; 8]; 3];
    for (a, &(xa, ea)) in CORNERS.iter().enumerate() {
        let dn_dx = 0.25 * xa * (1.0 + ea * eta) * scale;
        let dn_dy = 0.25 * ea * (1.0 + xa * xi) * scale;
        b[0][2 * a] = dn_dx;
        b[1][2 * a + 1] = dn_dy;
        b[2][2 * a] = dn_dy;
        b[2][2 * a + 1] = dn_dx;
    }
    b
}

/// Element stiffness `t·∫ Bᵀ D B dA` with 2×2 Gauss quadrature.
pub fn element_stiffness(material: &Material, size: f64) -> Result<ElementMatrix> {
    material.validate()?;
    if !(size.is_finite() && size > 0.0) {
        return Err(FeaError::InvalidMesh(format!(
            "element size must be positive, got {size}"
        )));
    }
    let d = material.constitutive();
    let g = 1.0 / 3f64.sqrt();
    // unit weights; Jacobian determinant of the square map is h²/4
    let weight = material.thickness * size * size / 4.0;
    let mut k = [[0.0; 8]; 8];
    for &xi in &[-g, g] {
        for &eta in &[-g, g] {
            let b = strain_displacement(size, xi, eta);
            let mut db = [[0.0; 8]; 3];
            for r in 0..3 {
                for c in 0..8 {
                    db[r][c] = (0..3).map(|s| d[r][s] * b[s][c]).sum();
                }
            }
            for i in 0..8 {
                for j in 0..8 {
                    let v: f64 = (0..3).map(|s| b[s][i] * db[s][j]).sum();
                    k[i][j] += weight * v;
                }
            }
        }
    }
    // enforce exact symmetry against summation-order round-off
    for i in 0..8 {
        for j in i + 1..8 {
            let avg = 0.5 * (k[i][j] + k[j][i]);
            k[i][j] = avg;
            k[j][i] = avg;
        }
    }
    Ok(k)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn symmetric_and_rows_sum_to_zero() {
        let k = element_stiffness(&Material::default(), 1.0).unwrap();
        let scale = k[0][0];
        for i in 0..8 {
            for j in 0..8 {
                assert_eq!(k[i][j], k[j][i]);
            }
            // translation is a zero-energy mode
            let sx: f64 = (0..4).map(|a| k[i][2 * a]).sum();
            let sy: f64 = (0..4).map(|a| k[i][2 * a + 1]).sum();
            assert!(sx.abs() < 1e-10 * scale && sy.abs() < 1e-10 * scale);
        }
    }

    #[test]
    fn linear_in_youngs_modulus() {
        let base = Material::default();
        let k1 = element_stiffness(&base, 1.0).unwrap();
        let k2 = element_stiffness(&base.with_youngs_modulus(2.0 * base.youngs_modulus), 1.0).unwrap();
        for i in 0..8 {
            for j in 0..8 {
                assert_eq!(k2[i][j], 2.0 * k1[i][j]);
            }
        }
    }

    #[test]
    fn independent_of_element_size_in_plane_stress() {
        // k_e of a square bilinear element scales with t only, not with h
        let m = Material::default();
        let k1 = element_stiffness(&m, 1.0).unwrap();
        let k3 = element_stiffness(&m, 3.0).unwrap();
        for i in 0..8 {
            for j in 0..8 {
                assert!((k1[i][j] - k3[i][j]).abs() <= 1e-9 * k1[0][0]);
            }
        }
    }

    #[test]
    fn matches_closed_form_for_unit_square() {
        // Standard closed-form entries for the bilinear square element with
        // E = 1, t = 1: k11 = (1/2 − ν/6)/(1−ν²), k12 = (1/8 + ν/8)/(1−ν²).
        let nu = 0.3;
        let material = Material::new(1.0, nu, 1.0).unwrap();
        let k = element_stiffness(&material, 1.0).unwrap();
        let c = 1.0 / (1.0 - nu * nu);
        assert!((k[0][0] - c * (0.5 - nu / 6.0)).abs() < 1e-14);
        assert!((k[0][1] - c * (0.125 + nu / 8.0)).abs() < 1e-14);
        // opposite corner, same axis: −1/4 + ν/12
        assert!((k[0][4] - c * (-0.25 + nu / 12.0)).abs() < 1e-14);
    }

    #[test]
    fn rejects_invalid_input() {
        let bad = Material {
            youngs_modulus: -1.0,
            ..Material::default()
        };
        assert!(element_stiffness(&bad, 1.0).is_err());
        assert!(element_stiffness(&Material::default(), 0.0).is_err());
    }
}
