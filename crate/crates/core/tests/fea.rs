mod common;

use std::time::Instant;

use nalgebra::{DMatrix, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use common::*;
use stressforge::fea::{Face, FeaError, LoadSite};
use stressforge::{
    assemble, element_stiffness, solve_case, solve_displacements, CaseSpec, ConstraintSet,
    GridMesh, LoadField, LoadPatch, Material,
};

fn production_displacements(case: &CaseSpec, material: &Material) -> Vec<f64> {
    let loads = LoadField::from_patches(&case.mesh, material.thickness, &case.loads).unwrap();
    let system = assemble(&case.mesh, material, &loads, &case.constraints).unwrap();
    solve_displacements(&system).unwrap().to_dof_vector()
}

#[test]
fn element_matrix_matches_oracle_quadrature() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for _ in 0..10 {
        let mat = random_material(&mut rng);
        let h = rng.random_range(0.25..4.0);
        let k = element_stiffness(&mat, h).unwrap();
        let o = oracle_element_stiffness(mat.youngs_modulus, mat.poissons_ratio, mat.thickness, h);
        let prod: Vec<f64> = k.iter().flatten().copied().collect();
        let oracle: Vec<f64> = o.transpose().iter().copied().collect();
        assert!(rel_err(&prod, &oracle) < 1e-13);
    }
}

#[test]
fn element_matrix_has_three_rigid_modes() {
    let k = element_stiffness(&Material::default(), 1.0).unwrap();
    let km = DMatrix::from_fn(8, 8, |i, j| k[i][j]);
    let eig = SymmetricEigen::new(km).eigenvalues;
    let top = eig.iter().fold(0.0f64, |a, v| a.max(v.abs()));
    let zero = eig.iter().filter(|v| v.abs() < 1e-10 * top).count();
    let positive = eig.iter().filter(|&&v| v > 1e-10 * top).count();
    assert_eq!((zero, positive), (3, 5));
}

#[test]
fn random_cases_match_dense_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    for n in 0..20 {
        let (case, mat) = random_case(&mut rng, 8);
        let oracle = oracle_solve(&case, &mat);
        let q = production_displacements(&case, &mat);
        let eq = rel_err(&q, &oracle.q);
        assert!(eq < 1e-9, "case {n}: displacement error {eq:e}");
        let field = solve_case(&case, &mat).unwrap();
        let comps: [&[f64]; 4] = [field.sigma_x(), field.sigma_y(), field.tau_xy(), field.von_mises()];
        for (k, comp) in comps.iter().enumerate() {
            let truth: Vec<f64> = oracle.stress.iter().map(|s| s[k]).collect();
            let es = rel_err(comp, &truth);
            assert!(es < 1e-8, "case {n}: stress component {k} error {es:e}");
        }
    }
}

fn check_patch(m: usize) {
    let q = 7.5;
    for nu in [0.0, 0.3] {
        let mat = Material::new(200_000.0, nu, 1.0).unwrap();
        let field = solve_case(&patch_test_case(m, q), &mat).unwrap();
        for e in 0..m * m {
            assert!((field.sigma_x()[e] - q).abs() <= 1e-8 * q);
            assert!((field.von_mises()[e] - q).abs() <= 1e-8 * q);
            assert!(field.sigma_y()[e].abs() <= 1e-8 * q);
            assert!(field.tau_xy()[e].abs() <= 1e-8 * q);
        }
    }
}

#[test]
fn patch_test_small() {
    check_patch(8);
}

#[test]
fn patch_test_fine_grid_is_fast() {
    let start = Instant::now();
    check_patch(128);
    assert!(start.elapsed().as_secs_f64() < 10.0);
}

#[test]
fn patch_test_displacements_are_linear() {
    // ν = 0, unit traction: u_x = x / E exactly
    let m = 8;
    let mat = Material::new(1000.0, 0.0, 1.0).unwrap();
    let q = production_displacements(&patch_test_case(m, 1.0), &mat);
    for i in 0..=m {
        for j in 0..=m {
            let n = i * (m + 1) + j;
            assert!((q[2 * n] - j as f64 / 1000.0).abs() < 1e-12);
            assert!(q[2 * n + 1].abs() < 1e-12);
        }
    }
}

fn tensor(case: &CaseSpec, mat: &Material) -> [Vec<f64>; 4] {
    let f = solve_case(case, mat).unwrap();
    [
        f.sigma_x().to_vec(),
        f.sigma_y().to_vec(),
        f.tau_xy().to_vec(),
        f.von_mises().to_vec(),
    ]
}

#[test]
fn linearity_suite() {
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    for _ in 0..10 {
        let (case, mat) = random_case(&mut rng, 8);
        let other = random_patches(&mut rng, &case.mesh);
        let base = tensor(&case, &mat);

        // superposition on the stress tensor
        let mut both = case.clone();
        both.loads.extend(other.iter().cloned());
        let b = CaseSpec {
            loads: other,
            ..case.clone()
        };
        let (sum, part) = (tensor(&both, &mat), tensor(&b, &mat));
        for k in 0..3 {
            let expect: Vec<f64> = base[k].iter().zip(&part[k]).map(|(x, y)| x + y).collect();
            assert!(rel_err(&sum[k], &expect) < 1e-10);
        }

        // scaling and negation
        let alpha = rng.random_range(0.1..20.0);
        let scaled = tensor(&case.scaled_loads(alpha), &mat);
        for k in 0..4 {
            let expect: Vec<f64> = base[k].iter().map(|v| v * alpha).collect();
            assert!(rel_err(&scaled[k], &expect) < 1e-10);
        }
        let neg = tensor(&case.scaled_loads(-1.0), &mat);
        assert!(rel_err(&neg[3], &base[3]) < 1e-10);

        // stiffness scaling leaves stresses unchanged
        let stiff = mat.with_youngs_modulus(mat.youngs_modulus * rng.random_range(0.01..100.0));
        let s = tensor(&case, &stiff);
        for k in 0..4 {
            assert!(rel_err(&s[k], &base[k]) < 1e-10);
        }
    }
}

#[test]
fn strain_energy_grows_under_refinement() {
    // 16 mm square cantilever, 1 N/mm shear on the free end
    let length = 16.0;
    let mat = Material::default();
    let mut energies = Vec::new();
    for m in [16, 32, 64] {
        let h = length / m as f64;
        let mesh = GridMesh::all_solid(m, h);
        let mut c = ConstraintSet::free(m);
        for i in 0..=m {
            c.fix(i, 0, true, true);
        }
        let sites: Vec<LoadSite> = (0..m)
            .map(|row| LoadSite {
                row,
                col: m - 1,
                face: Face::Right,
            })
            .collect();
        let case = CaseSpec::new(mesh, c, vec![LoadPatch::new(sites, 0.0, -1.0)]);
        let loads = LoadField::from_patches(&case.mesh, mat.thickness, &case.loads).unwrap();
        let q = production_displacements(&case, &mat);
        let f = loads.to_dof_vector();
        energies.push(0.5 * f.iter().zip(&q).map(|(a, b)| a * b).sum::<f64>());
    }
    assert!(energies[0] < energies[1] && energies[1] < energies[2], "{energies:?}");
}

#[test]
fn missing_supports_are_reported() {
    let mut case = patch_test_case(4, 1.0);
    case.constraints = ConstraintSet::free(4).into();
    assert!(matches!(
        solve_case(&case, &Material::default()),
        Err(FeaError::UnderConstrained(_))
    ));
}

#[test]
fn unloaded_case_gives_zero_field() {
    let mut case = patch_test_case(8, 1.0);
    case.loads.clear();
    let f = solve_case(&case, &Material::default()).unwrap();
    assert!(f.von_mises().iter().all(|&v| v == 0.0));
}
