//! Regular quadrilateral grids and nodal constraints.
//!
//! Elements are addressed as `(row, col)` in image order: row 0 is the top
//! row of the picture. The physical `y` axis points up, so element
//! `(row, col)` spans `x ∈ [col·h, (col+1)·h]` and
//! `y ∈ [(m-1-row)·h, (m-row)·h]`. Nodes live on an `(m+1)×(m+1)` grid
//! indexed the same way; node `(i, j)` sits at `(j·h, (m-i)·h)`.

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use super::error::{FeaError, Result};

/// One of the four sides of an element (or of the whole domain).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Face {
    Right,
    Top,
    Left,
    Bottom,
}

impl Face {
    pub const ALL: [Face; 4] = [Face::Right, Face::Top, Face::Left, Face::Bottom];

    /// Step from an element to its neighbour across this face, in (row, col).
    pub fn offset(self) -> (isize, isize) {
        match self {
            Face::Right => (0, 1),
            Face::Top => (-1, 0),
            Face::Left => (0, -1),
            Face::Bottom => (1, 0),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GridMesh {
    m: usize,
    element_size: f64,
    solid: Vec<bool>,
}

impl GridMesh {
    /// Builds a mesh from a row-major solid mask, checking that the solid
    /// region is non-empty and 4-connected.
    pub fn new(m: usize, element_size: f64, solid: Vec<bool>) -> Result<Self> {
        if m == 0 {
            return Err(FeaError::InvalidMesh("mesh size must be positive".into()));
        }
        if !(element_size.is_finite() && element_size > 0.0) {
            return Err(FeaError::InvalidMesh(format!(
                "element size must be positive, got {element_size}"
            )));
        }
        if solid.len() != m * m {
            return Err(FeaError::Shape {
                expected: m * m,
                found: solid.len(),
            });
        }
        let mesh = Self {
            m,
            element_size,
            solid,
        };
        match mesh.solid_components() {
            0 => Err(FeaError::InvalidMesh("no solid element".into())),
            1 => Ok(mesh),
            n => Err(FeaError::InvalidMesh(format!(
                "solid region has {n} disconnected components"
            ))),
        }
    }

    pub fn all_solid(m: usize, element_size: f64) -> Self {
        Self::new(m, element_size, vec![true; m * m]).expect("full grid is always valid")
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn element_size(&self) -> f64 {
        self.element_size
    }

    pub fn solid_mask(&self) -> &[bool] {
        &self.solid
    }

    pub fn element_count(&self) -> usize {
        self.m * self.m
    }

    pub fn node_count(&self) -> usize {
        (self.m + 1) * (self.m + 1)
    }

    pub fn dof_count(&self) -> usize {
        2 * self.node_count()
    }

    #[inline]
    pub fn is_solid(&self, row: usize, col: usize) -> bool {
        self.solid[row * self.m + col]
    }

    /// Solid test that treats out-of-grid positions as void.
    pub fn is_solid_at(&self, row: isize, col: isize) -> bool {
        let m = self.m as isize;
        row >= 0 && col >= 0 && row < m && col < m && self.is_solid(row as usize, col as usize)
    }

    #[inline]
    pub fn node_index(&self, i: usize, j: usize) -> usize {
        i * (self.m + 1) + j
    }

    /// Node indices of element `(row, col)`, counter-clockwise from the
    /// bottom-left corner.
    #[inline]
    pub fn element_nodes(&self, row: usize, col: usize) -> [usize; 4] {
        [
            self.node_index(row + 1, col),
            self.node_index(row + 1, col + 1),
            self.node_index(row, col + 1),
            self.node_index(row, col),
        ]
    }

    /// The two node indices on one face of element `(row, col)`.
    pub fn face_nodes(&self, row: usize, col: usize, face: Face) -> [usize; 2] {
        let [bl, br, tr, tl] = self.element_nodes(row, col);
        match face {
            Face::Right => [br, tr],
            Face::Top => [tr, tl],
            Face::Left => [tl, bl],
            Face::Bottom => [bl, br],
        }
    }

    /// Whether the face borders void or the domain boundary.
    pub fn face_exposed(&self, row: usize, col: usize, face: Face) -> bool {
        let (dr, dc) = face.offset();
        !self.is_solid_at(row as isize + dr, col as isize + dc)
    }

    /// Whether node `(i, j)` belongs to at least one solid element.
    pub fn node_touches_solid(&self, i: usize, j: usize) -> bool {
        self.elements_around_node(i, j)
            .any(|(r, c)| self.is_solid(r, c))
    }

    /// Elements sharing node `(i, j)`.
    pub fn elements_around_node(&self, i: usize, j: usize) -> impl Iterator<Item = (usize, usize)> + '_ {
        let m = self.m;
        [(i.wrapping_sub(1), j.wrapping_sub(1)), (i.wrapping_sub(1), j), (i, j.wrapping_sub(1)), (i, j)]
            .into_iter()
            .filter(move |&(r, c)| r < m && c < m)
    }

    fn solid_components(&self) -> usize {
        let m = self.m;
        let mut seen = vec![false; m * m];
        let mut components = 0;
        let mut queue = VecDeque::new();
        for start in 0..m * m {
            if !self.solid[start] || seen[start] {
                continue;
            }
            components += 1;
            seen[start] = true;
            queue.push_back(start);
            while let Some(idx) = queue.pop_front() {
                let (r, c) = (idx / m, idx % m);
                for face in Face::ALL {
                    let (dr, dc) = face.offset();
                    let (nr, nc) = (r as isize + dr, c as isize + dc);
                    if self.is_solid_at(nr, nc) {
                        let n = nr as usize * m + nc as usize;
                        if !seen[n] {
                            seen[n] = true;
                            queue.push_back(n);
                        }
                    }
                }
            }
        }
        components
    }
}

/// Per-node axis fixings over the `(m+1)×(m+1)` node grid.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConstraintSet {
    m: usize,
    fix_x: Vec<bool>,
    fix_y: Vec<bool>,
}

impl ConstraintSet {
    pub fn free(m: usize) -> Self {
        let n = (m + 1) * (m + 1);
        Self {
            m,
            fix_x: vec![false; n],
            fix_y: vec![false; n],
        }
    }

    pub fn from_flags(m: usize, fix_x: Vec<bool>, fix_y: Vec<bool>) -> Result<Self> {
        let n = (m + 1) * (m + 1);
        for flags in [&fix_x, &fix_y] {
            if flags.len() != n {
                return Err(FeaError::Shape {
                    expected: n,
                    found: flags.len(),
                });
            }
        }
        Ok(Self { m, fix_x, fix_y })
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn fix(&mut self, i: usize, j: usize, fix_x: bool, fix_y: bool) {
        let n = i * (self.m + 1) + j;
        self.fix_x[n] |= fix_x;
        self.fix_y[n] |= fix_y;
    }

    #[inline]
    pub fn fixed_x(&self, node: usize) -> bool {
        self.fix_x[node]
    }

    #[inline]
    pub fn fixed_y(&self, node: usize) -> bool {
        self.fix_y[node]
    }

    pub fn fix_x_flags(&self) -> &[bool] {
        &self.fix_x
    }

    pub fn fix_y_flags(&self) -> &[bool] {
        &self.fix_y
    }

    /// Whether global DOF `2·node + axis` is fixed.
    #[inline]
    pub fn is_dof_fixed(&self, dof: usize) -> bool {
        if dof.is_multiple_of(2) {
            self.fix_x[dof / 2]
        } else {
            self.fix_y[dof / 2]
        }
    }

    pub fn fixed_dof_count(&self) -> usize {
        self.fix_x.iter().chain(&self.fix_y).filter(|&&f| f).count()
    }

    /// Cheap necessary condition for removing the three planar rigid-body
    /// modes: at least one x fixing, one y fixing and three fixings overall.
    /// Geometric degeneracy beyond this is caught during factorization.
    pub fn check_rigid_body_support(&self) -> Result<()> {
        let nx = self.fix_x.iter().filter(|&&f| f).count();
        let ny = self.fix_y.iter().filter(|&&f| f).count();
        if nx == 0 || ny == 0 || nx + ny < 3 {
            return Err(FeaError::UnderConstrained(format!(
                "{nx} x-fixings and {ny} y-fixings cannot suppress rigid-body motion"
            )));
        }
        Ok(())
    }
}
