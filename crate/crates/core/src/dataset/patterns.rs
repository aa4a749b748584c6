//! Constraint and load-position patterns, defined relative to the outline of
//! whatever geometry they are applied to.
//!
//! A side rule selects, for every grid line crossing a fraction of one domain
//! side, the outermost solid element in that direction and its outward face.
//! On a full plate that is the domain edge; on tapered or notched shapes it
//! follows the contour.

use serde::{Deserialize, Serialize};

use crate::fea::{ConstraintSet, Face, GridMesh, LoadSite};

/// A span `[from, to]` along one side, as fractions of the side length.
/// Left/right sides are measured from the bottom, top/bottom from the left.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SideSpan {
    pub side: Face,
    pub from: f64,
    pub to: f64,
    /// Keep only elements on the domain boundary instead of following the
    /// contour inwards.
    #[serde(default)]
    pub domain_edge: bool,
}

impl SideSpan {
    pub const fn full(side: Face) -> Self {
        Self {
            side,
            from: 0.0,
            to: 1.0,
            domain_edge: false,
        }
    }

    pub const fn new(side: Face, from: f64, to: f64) -> Self {
        Self {
            side,
            from,
            to,
            domain_edge: false,
        }
    }

    /// The whole side, restricted to elements on the domain boundary.
    pub const fn domain_edge(side: Face) -> Self {
        Self {
            side,
            from: 0.0,
            to: 1.0,
            domain_edge: true,
        }
    }

    /// Outermost solid element faces along the span.
    pub fn sites(&self, mesh: &GridMesh) -> Vec<LoadSite> {
        let m = mesh.m();
        let position = |line: usize| -> f64 {
            let p = (line as f64 + 0.5) / m as f64;
            match self.side {
                // rows run top to bottom, positions bottom to top
                Face::Left | Face::Right => 1.0 - p,
                Face::Top | Face::Bottom => p,
            }
        };
        let mut lines: Vec<usize> = (0..m)
            .filter(|&l| {
                let p = position(l);
                p >= self.from && p <= self.to
            })
            .collect();
        if lines.is_empty() {
            let centre = 0.5 * (self.from + self.to);
            let nearest = (0..m)
                .min_by(|&a, &b| {
                    (position(a) - centre)
                        .abs()
                        .total_cmp(&(position(b) - centre).abs())
                })
                .expect("mesh has at least one line");
            lines.push(nearest);
        }
        let mut sites = Vec::with_capacity(lines.len());
        for line in lines {
            let cell = match self.side {
                Face::Left => (0..m).find(|&c| mesh.is_solid(line, c)).map(|c| (line, c)),
                Face::Right => (0..m).rev().find(|&c| mesh.is_solid(line, c)).map(|c| (line, c)),
                Face::Top => (0..m).find(|&r| mesh.is_solid(r, line)).map(|r| (r, line)),
                Face::Bottom => (0..m).rev().find(|&r| mesh.is_solid(r, line)).map(|r| (r, line)),
            };
            let on_edge = |(row, col): (usize, usize)| match self.side {
                Face::Left => col == 0,
                Face::Right => col == m - 1,
                Face::Top => row == 0,
                Face::Bottom => row == m - 1,
            };
            if let Some((row, col)) = cell.filter(|&rc| !self.domain_edge || on_edge(rc)) {
                sites.push(LoadSite {
                    row,
                    col,
                    face: self.side,
                });
            }
        }
        sites
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SideRule {
    pub span: SideSpan,
    pub fix_x: bool,
    pub fix_y: bool,
}

/// A named set of side fixings.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BcPattern {
    pub name: String,
    pub rules: Vec<SideRule>,
}

impl BcPattern {
    pub fn new(name: &str, rules: Vec<SideRule>) -> Self {
        Self {
            name: name.to_string(),
            rules,
        }
    }

    pub fn constraints(&self, mesh: &GridMesh) -> ConstraintSet {
        let mut set = ConstraintSet::free(mesh.m());
        let nn = mesh.m() + 1;
        for rule in &self.rules {
            for site in rule.span.sites(mesh) {
                for node in mesh.face_nodes(site.row, site.col, site.face) {
                    set.fix(node / nn, node % nn, rule.fix_x, rule.fix_y);
                }
            }
        }
        set
    }
}

fn clamp(span: SideSpan) -> SideRule {
    SideRule {
        span,
        fix_x: true,
        fix_y: true,
    }
}

fn roller(span: SideSpan, fix_x: bool, fix_y: bool) -> SideRule {
    SideRule { span, fix_x, fix_y }
}

/// The eight fine-family support patterns: edge clamps, corner pins,
/// partial-edge clamps and mixed-axis rollers. All act on the left and
/// bottom sides so they never coincide with the load positions.
pub fn fine_bc_patterns() -> Vec<BcPattern> {
    use Face::{Bottom, Left};
    vec![
        BcPattern::new("clamped-left", vec![clamp(SideSpan::full(Left))]),
        BcPattern::new("clamped-bottom", vec![clamp(SideSpan::full(Bottom))]),
        BcPattern::new(
            "clamped-left-bottom",
            vec![clamp(SideSpan::full(Left)), clamp(SideSpan::full(Bottom))],
        ),
        BcPattern::new(
            "pinned-bottom-corners",
            vec![
                clamp(SideSpan::new(Bottom, 0.0, 0.1)),
                clamp(SideSpan::new(Bottom, 0.9, 1.0)),
            ],
        ),
        BcPattern::new("clamped-left-lower-half", vec![clamp(SideSpan::new(Left, 0.0, 0.5))]),
        BcPattern::new(
            "rollers-left-bottom",
            vec![
                roller(SideSpan::full(Left), true, false),
                roller(SideSpan::full(Bottom), false, true),
            ],
        ),
        BcPattern::new("clamped-left-upper-half", vec![clamp(SideSpan::new(Left, 0.5, 1.0))]),
        BcPattern::new(
            "roller-bottom-pinned-corner",
            vec![
                roller(SideSpan::full(Bottom), false, true),
                roller(SideSpan::new(Left, 0.0, 0.1), true, false),
            ],
        ),
    ]
}

/// Coarse beams: the whole left end is clamped.
pub fn coarse_bc_pattern() -> BcPattern {
    BcPattern::new("clamped-left-end", vec![clamp(SideSpan::domain_edge(Face::Left))])
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum LoadPattern {
    /// Outward faces along part of one side.
    Edge { span: SideSpan },
    /// Solid elements within a square window centred at `(x, y)` (fractions
    /// of the domain, `y` up), loaded on their top faces.
    Interior { x: f64, y: f64, half_width: f64 },
}

impl LoadPattern {
    pub fn sites(&self, mesh: &GridMesh) -> Vec<LoadSite> {
        match *self {
            LoadPattern::Edge { span } => span.sites(mesh),
            LoadPattern::Interior { x, y, half_width } => {
                let m = mesh.m();
                let centre = |r: usize, c: usize| {
                    ((c as f64 + 0.5) / m as f64, 1.0 - (r as f64 + 0.5) / m as f64)
                };
                let mut sites = Vec::new();
                for r in 0..m {
                    for c in 0..m {
                        let (cx, cy) = centre(r, c);
                        if mesh.is_solid(r, c) && (cx - x).abs() <= half_width && (cy - y).abs() <= half_width {
                            sites.push(LoadSite {
                                row: r,
                                col: c,
                                face: Face::Top,
                            });
                        }
                    }
                }
                if sites.is_empty() {
                    // window fell into a hole: use the nearest solid element
                    let nearest = (0..m * m)
                        .filter(|&i| mesh.is_solid(i / m, i % m))
                        .min_by(|&a, &b| {
                            let d = |i: usize| {
                                let (cx, cy) = centre(i / m, i % m);
                                (cx - x).powi(2) + (cy - y).powi(2)
                            };
                            d(a).total_cmp(&d(b))
                        })
                        .expect("mesh has a solid element");
                    sites.push(LoadSite {
                        row: nearest / m,
                        col: nearest % m,
                        face: Face::Top,
                    });
                }
                sites
            }
        }
    }
}

/// The ten fine-family load positions on the right and top contours and in
/// the interior.
pub fn fine_load_patterns() -> Vec<LoadPattern> {
    use Face::{Right, Top};
    let edge = |side, from, to| LoadPattern::Edge {
        span: SideSpan::new(side, from, to),
    };
    let interior = |x, y| LoadPattern::Interior {
        x,
        y,
        half_width: 0.05,
    };
    vec![
        edge(Right, 0.0, 1.0),
        edge(Right, 0.5, 1.0),
        edge(Right, 0.0, 0.25),
        edge(Top, 0.0, 1.0),
        edge(Top, 0.4, 0.6),
        edge(Top, 0.67, 1.0),
        edge(Top, 0.0, 0.25),
        interior(0.5, 0.5),
        interior(0.7, 0.35),
        interior(0.3, 0.7),
    ]
}

/// Coarse beams: the whole right end is loaded.
pub fn coarse_load_pattern() -> LoadPattern {
    LoadPattern::Edge {
        span: SideSpan::domain_edge(Face::Right),
    }
}
