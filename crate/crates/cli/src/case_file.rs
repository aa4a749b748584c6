//! JSON description of a single case for `stressforge solve`.
//!
//! ```json
//! {
//!   "m": 8,
//!   "element_size": 1.0,
//!   "material": { "youngs_modulus": 200000, "poissons_ratio": 0.3, "thickness": 1 },
//!   "solid_rows": ["########", "..."],
//!   "constraints": [ { "rows": [0, 8], "cols": [0, 0], "fix_x": true, "fix_y": true } ],
//!   "loads": [ { "rows": [0, 7], "cols": [7, 7], "face": "right", "q_x": 1.0, "q_y": 0.0 } ]
//! }
//! ```
//!
//! `material`, `element_size` and `solid_rows` are optional (defaults: the
//! standard steel, 1 mm, all solid). Constraint ranges address nodes
//! (`0..=m`), load ranges address elements (`0..m`); both are inclusive,
//! with row 0 at the top. Tractions are in N/mm² on the given element face.

use anyhow::{bail, Context, Result};
use serde::Deserialize;

use stressforge::fea::{Face, LoadSite};
use stressforge::{CaseSpec, ConstraintSet, GridMesh, LoadPatch, Material};

fn default_element_size() -> f64 {
    1.0
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConstraintEntry {
    pub rows: [usize; 2],
    pub cols: [usize; 2],
    #[serde(default)]
    pub fix_x: bool,
    #[serde(default)]
    pub fix_y: bool,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LoadEntry {
    pub rows: [usize; 2],
    pub cols: [usize; 2],
    pub face: Face,
    pub q_x: f64,
    pub q_y: f64,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CaseFile {
    pub m: usize,
    #[serde(default = "default_element_size")]
    pub element_size: f64,
    #[serde(default)]
    pub material: Material,
    #[serde(default)]
    pub solid_rows: Option<Vec<String>>,
    #[serde(default)]
    pub constraints: Vec<ConstraintEntry>,
    #[serde(default)]
    pub loads: Vec<LoadEntry>,
}

fn span(range: [usize; 2], limit: usize, what: &str) -> Result<std::ops::RangeInclusive<usize>> {
    let [a, b] = range;
    if a > b || b > limit {
        bail!("{what} range [{a}, {b}] outside 0..={limit}");
    }
    Ok(a..=b)
}

impl CaseFile {
    pub fn parse(text: &str) -> Result<Self> {
        serde_json::from_str(text).context("invalid case description")
    }

    pub fn to_case(&self) -> Result<(CaseSpec, Material)> {
        let m = self.m;
        let solid = match &self.solid_rows {
            None => vec![true; m * m],
            Some(rows) => {
                if rows.len() != m {
                    bail!("solid_rows has {} rows, expected {m}", rows.len());
                }
                let mut mask = Vec::with_capacity(m * m);
                for (r, row) in rows.iter().enumerate() {
                    if row.chars().count() != m {
                        bail!("solid_rows[{r}] has {} cells, expected {m}", row.chars().count());
                    }
                    for ch in row.chars() {
                        mask.push(match ch {
                            '#' => true,
                            '.' => false,
                            other => bail!("solid_rows[{r}]: unexpected {other:?}, use '#' or '.'"),
                        });
                    }
                }
                mask
            }
        };
        let mesh = GridMesh::new(m, self.element_size, solid)?;
        let mut constraints = ConstraintSet::free(m);
        for c in &self.constraints {
            for i in span(c.rows, m, "constraint row")? {
                for j in span(c.cols, m, "constraint column")? {
                    constraints.fix(i, j, c.fix_x, c.fix_y);
                }
            }
        }
        let mut loads = Vec::new();
        for l in &self.loads {
            let mut sites = Vec::new();
            for row in span(l.rows, m - 1, "load row")? {
                for col in span(l.cols, m - 1, "load column")? {
                    sites.push(LoadSite { row, col, face: l.face });
                }
            }
            loads.push(LoadPatch::new(sites, l.q_x, l.q_y));
        }
        self.material.validate()?;
        Ok((CaseSpec::new(mesh, constraints, loads), self.material))
    }
}
