//! Image encoding of cases: one geometry/constraint code map, two load maps
//! and the von Mises target, all `m×m` and row-major with row 0 on top.
//!
//! Constraint codes live on elements while constraints live on nodes. An
//! element carries the strongest code among its four nodes, where a node
//! fixed in x contributes "horizontal", fixed in y "vertical", and an
//! element that sees both (on one node or on two different nodes) is coded
//! as fixed in both directions.

use std::collections::HashMap;
use std::sync::Arc;

use thiserror::Error;

use crate::case::{CaseSpec, CaseTags};
use crate::fea::{ConstraintSet, Face, FeaError, GridMesh, LoadPatch, LoadSite, StressField};

pub const CODE_VOID: u8 = 0;
pub const CODE_FREE: u8 = 1;
pub const CODE_FIXED_X: u8 = 2;
pub const CODE_FIXED_Y: u8 = 3;
pub const CODE_FIXED_BOTH: u8 = 4;

/// Element size assumed when a case is rebuilt from images alone.
pub const DEFAULT_ELEMENT_SIZE: f64 = 1.0;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EncodingError {
    #[error("invalid channel stack: {0}")]
    Invalid(String),
    #[error("shape mismatch: expected {expected} values, found {found}")]
    Shape { expected: usize, found: usize },
    #[error(transparent)]
    Case(#[from] FeaError),
}

pub type Result<T> = std::result::Result<T, EncodingError>;

/// Input images of one case plus its (optional) von Mises target.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelStack {
    pub m: usize,
    pub geom_bc: Vec<u8>,
    pub load_x: Vec<f32>,
    pub load_y: Vec<f32>,
    pub von_mises: Option<Vec<f32>>,
}

impl ChannelStack {
    pub fn validate(&self) -> Result<()> {
        let n = self.m * self.m;
        let lens = [
            Some(self.geom_bc.len()),
            Some(self.load_x.len()),
            Some(self.load_y.len()),
            self.von_mises.as_ref().map(Vec::len),
        ];
        for len in lens.into_iter().flatten() {
            if len != n {
                return Err(EncodingError::Shape {
                    expected: n,
                    found: len,
                });
            }
        }
        if let Some((idx, code)) = self
            .geom_bc
            .iter()
            .enumerate()
            .find(|(_, &c)| c > CODE_FIXED_BOTH)
        {
            return Err(EncodingError::Invalid(format!(
                "illegal code {code} at pixel {idx}"
            )));
        }
        for idx in 0..n {
            let void = self.geom_bc[idx] == CODE_VOID;
            let target = self.von_mises.as_ref().map_or(0.0, |t| t[idx]);
            if void && (self.load_x[idx] != 0.0 || self.load_y[idx] != 0.0 || target != 0.0) {
                return Err(EncodingError::Invalid(format!(
                    "nonzero load or stress on void pixel {idx}"
                )));
            }
        }
        Ok(())
    }

    pub fn without_target(&self) -> Self {
        Self {
            von_mises: None,
            ..self.clone()
        }
    }
}

fn element_code(fixed_x: bool, fixed_y: bool) -> u8 {
    match (fixed_x, fixed_y) {
        (true, true) => CODE_FIXED_BOTH,
        (false, true) => CODE_FIXED_Y,
        (true, false) => CODE_FIXED_X,
        (false, false) => CODE_FREE,
    }
}

fn code_map(mesh: &GridMesh, constraints: &ConstraintSet) -> Vec<u8> {
    let m = mesh.m();
    let mut codes = vec![CODE_VOID; m * m];
    for row in 0..m {
        for col in 0..m {
            if !mesh.is_solid(row, col) {
                continue;
            }
            let nodes = mesh.element_nodes(row, col);
            let fx = nodes.iter().any(|&n| constraints.fixed_x(n));
            let fy = nodes.iter().any(|&n| constraints.fixed_y(n));
            codes[row * m + col] = element_code(fx, fy);
        }
    }
    codes
}

/// Encodes the geometry, constraints and loads of a case.
pub fn encode_input(case: &CaseSpec) -> Result<ChannelStack> {
    case.validate()?;
    let mesh = case.mesh.as_ref();
    let m = mesh.m();
    let mut qx = vec![0.0f64; m * m];
    let mut qy = vec![0.0f64; m * m];
    for patch in &case.loads {
        for site in patch.sites.iter() {
            let idx = site.row * m + site.col;
            qx[idx] += patch.q_x;
            qy[idx] += patch.q_y;
        }
    }
    Ok(ChannelStack {
        m,
        geom_bc: code_map(mesh, &case.constraints),
        load_x: qx.into_iter().map(|v| v as f32).collect(),
        load_y: qy.into_iter().map(|v| v as f32).collect(),
        von_mises: None,
    })
}

/// Copies the per-element von Mises stress into a target image, with void
/// pixels forced to zero.
pub fn encode_target(field: &StressField, mesh: &GridMesh) -> Result<Vec<f32>> {
    if field.m() != mesh.m() {
        return Err(EncodingError::Shape {
            expected: mesh.element_count(),
            found: field.m() * field.m(),
        });
    }
    Ok(field
        .von_mises()
        .iter()
        .zip(mesh.solid_mask())
        .map(|(&v, &solid)| if solid { v as f32 } else { 0.0 })
        .collect())
}

/// Encodes input channels and the solved target together.
pub fn encode_case(case: &CaseSpec, field: &StressField) -> Result<ChannelStack> {
    let mut stack = encode_input(case)?;
    stack.von_mises = Some(encode_target(field, &case.mesh)?);
    Ok(stack)
}

/// Face a decoded load is applied to: the first exposed face in the order
/// right, top, left, bottom, or the top face for fully embedded elements.
fn decoded_face(mesh: &GridMesh, row: usize, col: usize) -> Face {
    Face::ALL
        .into_iter()
        .find(|&f| mesh.face_exposed(row, col, f))
        .unwrap_or(Face::Top)
}

pub fn decode_input(stack: &ChannelStack) -> Result<CaseSpec> {
    decode_input_with_size(stack, DEFAULT_ELEMENT_SIZE)
}

/// Rebuilds a case from its images.
///
/// Every node receives the largest constraint consistent with the codes of
/// all solid elements around it, which reproduces the code map of any stack
/// produced by [`encode_input`]. Loads come back as one patch per distinct
/// traction value and face.
pub fn decode_input_with_size(stack: &ChannelStack, element_size: f64) -> Result<CaseSpec> {
    stack.validate()?;
    let m = stack.m;
    let mask: Vec<bool> = stack.geom_bc.iter().map(|&c| c != CODE_VOID).collect();
    let mesh = GridMesh::new(m, element_size, mask)?;

    let mut constraints = ConstraintSet::free(m);
    for i in 0..=m {
        for j in 0..=m {
            let mut touches = false;
            let mut all_x = true;
            let mut all_y = true;
            for (r, c) in mesh.elements_around_node(i, j) {
                let code = stack.geom_bc[r * m + c];
                if code == CODE_VOID {
                    continue;
                }
                touches = true;
                all_x &= matches!(code, CODE_FIXED_X | CODE_FIXED_BOTH);
                all_y &= matches!(code, CODE_FIXED_Y | CODE_FIXED_BOTH);
            }
            if touches && (all_x || all_y) {
                constraints.fix(i, j, all_x, all_y);
            }
        }
    }
    if code_map(&mesh, &constraints) != stack.geom_bc {
        return Err(EncodingError::Invalid(
            "constraint codes are not realizable by any nodal constraint set".into(),
        ));
    }

    let mut groups: Vec<(f32, f32, Face, Vec<LoadSite>)> = Vec::new();
    let mut index: HashMap<(u32, u32, Face), usize> = HashMap::new();
    for row in 0..m {
        for col in 0..m {
            let idx = row * m + col;
            let (lx, ly) = (stack.load_x[idx], stack.load_y[idx]);
            if lx == 0.0 && ly == 0.0 {
                continue;
            }
            let face = decoded_face(&mesh, row, col);
            let key = (lx.to_bits(), ly.to_bits(), face);
            let g = *index.entry(key).or_insert_with(|| {
                groups.push((lx, ly, face, Vec::new()));
                groups.len() - 1
            });
            groups[g].3.push(LoadSite { row, col, face });
        }
    }
    let loads = groups
        .into_iter()
        .map(|(lx, ly, _, sites)| LoadPatch::new(sites, f64::from(lx), f64::from(ly)))
        .collect();

    Ok(CaseSpec {
        mesh: Arc::new(mesh),
        constraints: Arc::new(constraints),
        loads,
        tags: CaseTags::default(),
    })
}
