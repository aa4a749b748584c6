use super::assembly::DisplacementField;
use super::element::strain_displacement;
use super::error::{FeaError, Result};
use super::material::Material;
use super::mesh::GridMesh;

/// Equivalent stress `sqrt(σx² + σy² − σx·σy + 3τxy²)`.
#[inline]
pub fn von_mises(sigma_x: f64, sigma_y: f64, tau_xy: f64) -> f64 {
    (sigma_x * sigma_x + sigma_y * sigma_y - sigma_x * sigma_y + 3.0 * tau_xy * tau_xy)
        .max(0.0)
        .sqrt()
}

/// Per-element stress tensor and von Mises stress (MPa), row-major `m×m`.
#[derive(Debug, Clone, PartialEq)]
pub struct StressField {
    m: usize,
    sigma_x: Vec<f64>,
    sigma_y: Vec<f64>,
    tau_xy: Vec<f64>,
    von_mises: Vec<f64>,
}

impl StressField {
    pub fn zeros(m: usize) -> Self {
        Self {
            m,
            sigma_x: vec![0.0; m * m],
            sigma_y: vec![0.0; m * m],
            tau_xy: vec![0.0; m * m],
            von_mises: vec![0.0; m * m],
        }
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn sigma_x(&self) -> &[f64] {
        &self.sigma_x
    }

    pub fn sigma_y(&self) -> &[f64] {
        &self.sigma_y
    }

    pub fn tau_xy(&self) -> &[f64] {
        &self.tau_xy
    }

    pub fn von_mises(&self) -> &[f64] {
        &self.von_mises
    }
}

/// Recovers `σ = D·B·q` at each element centroid. Void elements report an
/// exactly zero tensor.
pub fn recover_stress(
    mesh: &GridMesh,
    material: &Material,
    displacements: &DisplacementField,
) -> Result<StressField> {
    material.validate()?;
    if displacements.m() != mesh.m() {
        return Err(FeaError::Shape {
            expected: mesh.node_count(),
            found: (displacements.m() + 1) * (displacements.m() + 1),
        });
    }
    let m = mesh.m();
    let d = material.constitutive();
    let b = strain_displacement(mesh.element_size(), 0.0, 0.0);
    let mut db = [[0.0; 8]; 3];
    for r in 0..3 {
        for c in 0..8 {
            db[r][c] = (0..3).map(|s| d[r][s] * b[s][c]).sum();
        }
    }
    let (ux, uy) = (displacements.ux(), displacements.uy());
    let mut field = StressField::zeros(m);
    for row in 0..m {
        for col in 0..m {
            if !mesh.is_solid(row, col) {
                continue;
            }
            let mut q = [0.0; 8];
            for (a, &n) in mesh.element_nodes(row, col).iter().enumerate() {
                q[2 * a] = ux[n];
                q[2 * a + 1] = uy[n];
            }
            let mut sigma = [0.0; 3];
            for (s, db_row) in sigma.iter_mut().zip(&db) {
                *s = db_row.iter().zip(&q).map(|(a, b)| a * b).sum();
            }
            let e = row * m + col;
            field.sigma_x[e] = sigma[0];
            field.sigma_y[e] = sigma[1];
            field.tau_xy[e] = sigma[2];
            field.von_mises[e] = von_mises(sigma[0], sigma[1], sigma[2]);
        }
    }
    Ok(field)
}
