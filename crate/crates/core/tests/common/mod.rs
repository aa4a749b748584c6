//! Independent reference implementations shared by the integration tests.
//!
//! Nothing here calls into the production element, assembly, load or
//! stress code: the oracle builds its own shape-function derivatives in
//! physical coordinates, integrates with a 3×3 rule, assembles a dense
//! matrix and solves it with nalgebra.

#![allow(dead_code)]

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use stressforge::fea::{Face, LoadSite};
use stressforge::{CaseSpec, ConstraintSet, GridMesh, LoadPatch, Material};

pub const VOID_FACTOR: f64 = 1e-6;

pub struct OracleSolution {
    /// Nodal displacements, `[ux0, uy0, ux1, uy1, ...]`.
    pub q: Vec<f64>,
    /// Per-element centroid stresses `(σx, σy, τxy, von Mises)`; zero on void.
    pub stress: Vec<[f64; 4]>,
}

fn constitutive(e: f64, nu: f64) -> [[f64; 3]; 3] {
    let c = e / (1.0 - nu * nu);
    [
        [c, c * nu, 0.0],
        [c * nu, c, 0.0],
        [0.0, 0.0, c * (1.0 - nu) / 2.0],
    ]
}

/// Corner coordinates of element (row, col) in the order bottom-left,
/// bottom-right, top-right, top-left, and the matching (i, j) node pairs.
fn corners(m: usize, h: f64, row: usize, col: usize) -> ([(f64, f64); 4], [(usize, usize); 4]) {
    let x0 = col as f64 * h;
    let y0 = (m - 1 - row) as f64 * h;
    (
        [(x0, y0), (x0 + h, y0), (x0 + h, y0 + h), (x0, y0 + h)],
        [(row + 1, col), (row + 1, col + 1), (row, col + 1), (row, col)],
    )
}

/// Strain-displacement rows at a physical point inside a square element with
/// lower-left corner (x0, y0), from bilinear shape functions written directly
/// in x and y.
fn b_matrix(x0: f64, y0: f64, h: f64, x: f64, y: f64) -> [[f64; 8]; 3] {
    let (a, b) = ((x - x0) / h, (y - y0) / h);
    // N1 = (1-a)(1-b), N2 = a(1-b), N3 = ab, N4 = (1-a)b
    let dndx = [-(1.0 - b) / h, (1.0 - b) / h, b / h, -b / h];
    let dndy = [-(1.0 - a) / h, -a / h, a / h, (1.0 - a) / h];
    let mut bm = [[0.0; 8]; 3];
    for k in 0..4 {
        bm[0][2 * k] = dndx[k];
        bm[1][2 * k + 1] = dndy[k];
        bm[2][2 * k] = dndy[k];
        bm[2][2 * k + 1] = dndx[k];
    }
    bm
}

pub fn oracle_element_stiffness(e: f64, nu: f64, t: f64, h: f64) -> DMatrix<f64> {
    let d = constitutive(e, nu);
    let g = [(-(0.6f64).sqrt(), 5.0 / 9.0), (0.0, 8.0 / 9.0), ((0.6f64).sqrt(), 5.0 / 9.0)];
    let mut k = DMatrix::zeros(8, 8);
    for &(gx, wx) in &g {
        for &(gy, wy) in &g {
            let x = h * (1.0 + gx) / 2.0;
            let y = h * (1.0 + gy) / 2.0;
            let bm = b_matrix(0.0, 0.0, h, x, y);
            let w = wx * wy * h * h / 4.0 * t;
            for i in 0..8 {
                for j in 0..8 {
                    let mut s = 0.0;
                    for p in 0..3 {
                        for q in 0..3 {
                            s += bm[p][i] * d[p][q] * bm[q][j];
                        }
                    }
                    k[(i, j)] += w * s;
                }
            }
        }
    }
    k
}

fn face_node_pairs(row: usize, col: usize, face: Face) -> [(usize, usize); 2] {
    match face {
        Face::Right => [(row + 1, col + 1), (row, col + 1)],
        Face::Top => [(row, col), (row, col + 1)],
        Face::Left => [(row, col), (row + 1, col)],
        Face::Bottom => [(row + 1, col), (row + 1, col + 1)],
    }
}

/// Consistent nodal loads of uniform tractions: half the face resultant at
/// each end node.
pub fn oracle_loads(m: usize, h: f64, t: f64, loads: &[LoadPatch]) -> Vec<f64> {
    let nn = m + 1;
    let mut f = vec![0.0; 2 * nn * nn];
    for p in loads {
        for s in p.sites.iter() {
            for (i, j) in face_node_pairs(s.row, s.col, s.face) {
                let n = i * nn + j;
                f[2 * n] += p.q_x * h * t / 2.0;
                f[2 * n + 1] += p.q_y * h * t / 2.0;
            }
        }
    }
    f
}

pub fn oracle_solve(case: &CaseSpec, material: &Material) -> OracleSolution {
    let mesh = case.mesh.as_ref();
    let m = mesh.m();
    let h = mesh.element_size();
    let nn = m + 1;
    let ndof = 2 * nn * nn;
    let Material {
        youngs_modulus: e,
        poissons_ratio: nu,
        thickness: t,
    } = *material;
    let k_solid = oracle_element_stiffness(e, nu, t, h);
    let k_void = oracle_element_stiffness(e * VOID_FACTOR, nu, t, h);

    let mut k = DMatrix::<f64>::zeros(ndof, ndof);
    for row in 0..m {
        for col in 0..m {
            let ke = if mesh.is_solid(row, col) { &k_solid } else { &k_void };
            let (_, nodes) = corners(m, h, row, col);
            let dofs: Vec<usize> = nodes
                .iter()
                .flat_map(|&(i, j)| [2 * (i * nn + j), 2 * (i * nn + j) + 1])
                .collect();
            for a in 0..8 {
                for b in 0..8 {
                    k[(dofs[a], dofs[b])] += ke[(a, b)];
                }
            }
        }
    }
    let f = oracle_loads(m, h, t, &case.loads);

    let free: Vec<usize> = (0..ndof)
        .filter(|&d| {
            let n = d / 2;
            if d % 2 == 0 {
                !case.constraints.fixed_x(n)
            } else {
                !case.constraints.fixed_y(n)
            }
        })
        .collect();
    let kr = DMatrix::from_fn(free.len(), free.len(), |a, b| k[(free[a], free[b])]);
    let fr = DVector::from_iterator(free.len(), free.iter().map(|&d| f[d]));
    let lu = kr.clone().lu();
    let mut x = lu.solve(&fr).expect("oracle system is singular");
    // one refinement step keeps the oracle's own error well below the
    // comparison tolerance despite the soft void elements
    let r = &fr - &kr * &x;
    x += lu.solve(&r).unwrap();

    let mut q = vec![0.0; ndof];
    for (a, &d) in free.iter().enumerate() {
        q[d] = x[a];
    }

    let d = constitutive(e, nu);
    let mut stress = vec![[0.0; 4]; m * m];
    for row in 0..m {
        for col in 0..m {
            if !mesh.is_solid(row, col) {
                continue;
            }
            let (xy, nodes) = corners(m, h, row, col);
            let (x0, y0) = xy[0];
            let bm = b_matrix(x0, y0, h, x0 + h / 2.0, y0 + h / 2.0);
            let qe: Vec<f64> = nodes
                .iter()
                .flat_map(|&(i, j)| [q[2 * (i * nn + j)], q[2 * (i * nn + j) + 1]])
                .collect();
            let mut strain = [0.0; 3];
            for p in 0..3 {
                strain[p] = (0..8).map(|k| bm[p][k] * qe[k]).sum();
            }
            let mut s = [0.0; 3];
            for p in 0..3 {
                s[p] = (0..3).map(|k| d[p][k] * strain[k]).sum();
            }
            let vm = (s[0] * s[0] + s[1] * s[1] - s[0] * s[1] + 3.0 * s[2] * s[2]).sqrt();
            stress[row * m + col] = [s[0], s[1], s[2], vm];
        }
    }
    OracleSolution { q, stress }
}

/// `max|a - b| / max|b|`, or the absolute difference when `b` is all zero.
pub fn rel_err(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len());
    let scale = b.iter().fold(0.0f64, |s, v| s.max(v.abs()));
    let diff = a.iter().zip(b).fold(0.0f64, |s, (x, y)| s.max((x - y).abs()));
    if scale > 0.0 {
        diff / scale
    } else {
        diff
    }
}

pub fn random_mesh(rng: &mut ChaCha8Rng, m: usize, h: f64) -> GridMesh {
    loop {
        let holes = rng.random_range(0..=m * m / 6);
        let mut mask = vec![true; m * m];
        for _ in 0..holes {
            mask[rng.random_range(0..m * m)] = false;
        }
        if let Ok(mesh) = GridMesh::new(m, h, mask) {
            return mesh;
        }
    }
}

pub fn random_material(rng: &mut ChaCha8Rng) -> Material {
    Material::new(
        rng.random_range(1e3..3e5),
        rng.random_range(0.0..0.45),
        rng.random_range(0.5..2.0),
    )
    .unwrap()
}

pub fn random_patches(rng: &mut ChaCha8Rng, mesh: &GridMesh) -> Vec<LoadPatch> {
    let m = mesh.m();
    let solid: Vec<(usize, usize)> = (0..m * m)
        .map(|i| (i / m, i % m))
        .filter(|&(r, c)| mesh.is_solid(r, c))
        .collect();
    (0..rng.random_range(1..=3))
        .map(|_| {
            let sites: Vec<LoadSite> = (0..rng.random_range(1..=4))
                .map(|_| {
                    let (row, col) = solid[rng.random_range(0..solid.len())];
                    LoadSite {
                        row,
                        col,
                        face: Face::ALL[rng.random_range(0..4)],
                    }
                })
                .collect();
            LoadPatch::new(sites, rng.random_range(-5.0..5.0), rng.random_range(-5.0..5.0))
        })
        .collect()
}

/// Left edge clamped, plus a few random single-axis fixings.
pub fn random_constraints(rng: &mut ChaCha8Rng, m: usize) -> ConstraintSet {
    let mut c = ConstraintSet::free(m);
    for i in 0..=m {
        c.fix(i, 0, true, true);
    }
    for _ in 0..rng.random_range(0..4) {
        let (i, j) = (rng.random_range(0..=m), rng.random_range(0..=m));
        c.fix(i, j, rng.random_bool(0.5), rng.random_bool(0.5));
    }
    c
}

pub fn random_case(rng: &mut ChaCha8Rng, m: usize) -> (CaseSpec, Material) {
    let h = rng.random_range(0.5..2.0);
    let mesh = random_mesh(rng, m, h);
    let loads = random_patches(rng, &mesh);
    let constraints = random_constraints(rng, m);
    (CaseSpec::new(mesh, constraints, loads), random_material(rng))
}

/// Plate under uniform tension `q` on its right edge, held by x-rollers on
/// the left edge and one y-fixing at the bottom-left corner.
pub fn patch_test_case(m: usize, q: f64) -> CaseSpec {
    let mesh = GridMesh::all_solid(m, 1.0);
    let mut c = ConstraintSet::free(m);
    for i in 0..=m {
        c.fix(i, 0, true, false);
    }
    c.fix(m, 0, false, true);
    let sites: Vec<LoadSite> = (0..m)
        .map(|row| LoadSite {
            row,
            col: m - 1,
            face: Face::Right,
        })
        .collect();
    CaseSpec::new(mesh, c, vec![LoadPatch::new(sites, q, 0.0)])
}

/// Straight-loop metric definitions used as the metrics oracle.
pub mod brute {
    pub fn mse(y: &[f64], p: &[f64]) -> f64 {
        let mut s = 0.0;
        for i in 0..y.len() {
            s += (y[i] - p[i]) * (y[i] - p[i]);
        }
        s / y.len() as f64
    }

    pub fn mae(y: &[f64], p: &[f64]) -> f64 {
        let mut s = 0.0;
        for i in 0..y.len() {
            s += (y[i] - p[i]).abs();
        }
        s / y.len() as f64
    }

    fn max(v: &[f64]) -> f64 {
        let mut best = v[0];
        for &x in v {
            if x > best {
                best = x;
            }
        }
        best
    }

    fn min(v: &[f64]) -> f64 {
        let mut best = v[0];
        for &x in v {
            if x < best {
                best = x;
            }
        }
        best
    }

    pub fn pmae(y: &[f64], p: &[f64]) -> f64 {
        mae(y, p) / (max(y) - min(y)) * 100.0
    }

    pub fn pae(y: &[f64], p: &[f64]) -> f64 {
        (max(y) - max(p)).abs()
    }

    pub fn ppae(y: &[f64], p: &[f64]) -> f64 {
        pae(y, p) / max(y) * 100.0
    }
}
