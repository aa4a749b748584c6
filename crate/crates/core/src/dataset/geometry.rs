//! Seeded procedural geometry generators for both dataset families.
//!
//! Shapes are defined on the unit square (`y` up) and rasterized by testing
//! element centres, so the same seed yields comparable shapes at any grid
//! size.

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::config::{Family, GenerationConfig};
use super::error::{DatasetError, Result};
use super::patterns::{
    coarse_bc_pattern, coarse_load_pattern, fine_bc_patterns, fine_load_patterns, BcPattern,
    LoadPattern,
};
use crate::fea::{ConstraintSet, GridMesh, LoadSite};

const MAX_ATTEMPTS: u64 = 32;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GeometryCategory {
    // fine family
    PlateRectHoles,
    PlateCircularHoles,
    LShape,
    TaperedPlate,
    SlottedPlate,
    // coarse family
    RectangularBeam,
    RectangularBeamOpening,
    TrapezoidalBeam,
    TrapezoidalBeamOpening,
    ParabolicBeam,
    ParabolicBeamOpening,
}

impl GeometryCategory {
    pub const FINE: [GeometryCategory; 5] = [
        GeometryCategory::PlateRectHoles,
        GeometryCategory::PlateCircularHoles,
        GeometryCategory::LShape,
        GeometryCategory::TaperedPlate,
        GeometryCategory::SlottedPlate,
    ];

    pub const COARSE: [GeometryCategory; 6] = [
        GeometryCategory::RectangularBeam,
        GeometryCategory::RectangularBeamOpening,
        GeometryCategory::TrapezoidalBeam,
        GeometryCategory::TrapezoidalBeamOpening,
        GeometryCategory::ParabolicBeam,
        GeometryCategory::ParabolicBeamOpening,
    ];

    pub fn has_opening(self) -> bool {
        matches!(
            self,
            GeometryCategory::RectangularBeamOpening
                | GeometryCategory::TrapezoidalBeamOpening
                | GeometryCategory::ParabolicBeamOpening
        )
    }

    pub fn is_parabolic(self) -> bool {
        matches!(
            self,
            GeometryCategory::ParabolicBeam | GeometryCategory::ParabolicBeamOpening
        )
    }
}

/// Splits `count` items over `bins` categories as evenly as possible, larger
/// bins first.
pub fn category_sizes(count: usize, bins: usize) -> Vec<usize> {
    (0..bins)
        .map(|i| count / bins + usize::from(i < count % bins))
        .collect()
}

fn category_of(index: usize, sizes: &[usize], categories: &[GeometryCategory]) -> GeometryCategory {
    let mut acc = 0;
    for (size, &cat) in sizes.iter().zip(categories) {
        acc += size;
        if index < acc {
            return cat;
        }
    }
    unreachable!("index beyond category table")
}

/// A generated geometry together with its constraint sets and load
/// positions, one per pattern.
#[derive(Debug, Clone)]
pub struct Geometry {
    pub id: u32,
    pub category: GeometryCategory,
    pub mesh: Arc<GridMesh>,
    pub constraints: Vec<Arc<ConstraintSet>>,
    pub load_sites: Vec<Arc<[LoadSite]>>,
}

#[derive(Debug, Clone)]
pub struct GeometryLibrary {
    pub family: Family,
    pub geometries: Vec<Geometry>,
    pub bc_patterns: Vec<BcPattern>,
    pub load_patterns: Vec<LoadPattern>,
}

struct Circle {
    x: f64,
    y: f64,
    r: f64,
}

impl Circle {
    fn contains(&self, x: f64, y: f64) -> bool {
        (x - self.x).powi(2) + (y - self.y).powi(2) <= self.r * self.r
    }
}

struct Rect {
    x0: f64,
    x1: f64,
    y0: f64,
    y1: f64,
}

impl Rect {
    fn contains(&self, x: f64, y: f64) -> bool {
        x >= self.x0 && x <= self.x1 && y >= self.y0 && y <= self.y1
    }
}

fn rasterize(m: usize, solid: impl Fn(f64, f64) -> bool) -> Vec<bool> {
    let mut mask = Vec::with_capacity(m * m);
    for r in 0..m {
        for c in 0..m {
            let x = (c as f64 + 0.5) / m as f64;
            let y = 1.0 - (r as f64 + 0.5) / m as f64;
            mask.push(solid(x, y));
        }
    }
    mask
}

fn fine_mask(category: GeometryCategory, m: usize, rng: &mut ChaCha8Rng) -> Vec<bool> {
    match category {
        GeometryCategory::PlateRectHoles => {
            let n = rng.random_range(1..=3);
            let holes: Vec<Rect> = (0..n)
                .map(|_| {
                    let (cx, cy) = (rng.random_range(0.25..0.75), rng.random_range(0.25..0.75));
                    let (hw, hh) = (rng.random_range(0.04..0.12), rng.random_range(0.04..0.12));
                    Rect {
                        x0: cx - hw,
                        x1: cx + hw,
                        y0: cy - hh,
                        y1: cy + hh,
                    }
                })
                .collect();
            rasterize(m, |x, y| !holes.iter().any(|h| h.contains(x, y)))
        }
        GeometryCategory::PlateCircularHoles => {
            let n = rng.random_range(1..=3);
            let holes: Vec<Circle> = (0..n)
                .map(|_| Circle {
                    x: rng.random_range(0.25..0.75),
                    y: rng.random_range(0.25..0.75),
                    r: rng.random_range(0.06..0.14),
                })
                .collect();
            rasterize(m, |x, y| !holes.iter().any(|h| h.contains(x, y)))
        }
        GeometryCategory::LShape => {
            let w = rng.random_range(0.3..0.6);
            let h = rng.random_range(0.3..0.6);
            let hole = rng.random_bool(0.5).then(|| Circle {
                x: rng.random_range(0.22..0.35),
                y: rng.random_range(0.22..0.35),
                r: rng.random_range(0.05..0.1),
            });
            rasterize(m, |x, y| {
                !(x > 1.0 - w && y > 1.0 - h) && !hole.as_ref().is_some_and(|c| c.contains(x, y))
            })
        }
        GeometryCategory::TaperedPlate => {
            let right = rng.random_range(0.3..0.7);
            let hole = rng.random_bool(0.5).then(|| Circle {
                x: rng.random_range(0.25..0.4),
                y: rng.random_range(0.25..0.4),
                r: rng.random_range(0.05..0.1),
            });
            rasterize(m, |x, y| {
                y <= 1.0 - (1.0 - right) * x && !hole.as_ref().is_some_and(|c| c.contains(x, y))
            })
        }
        GeometryCategory::SlottedPlate => {
            let cx = rng.random_range(0.35..0.65);
            let half = rng.random_range(0.06..0.15);
            let depth = rng.random_range(0.2..0.5);
            let hole = rng.random_bool(0.5).then(|| Circle {
                x: rng.random_range(0.4..0.6),
                y: rng.random_range(0.18..0.3),
                r: rng.random_range(0.05..0.1),
            });
            rasterize(m, |x, y| {
                !((x - cx).abs() <= half && y >= 1.0 - depth)
                    && !hole.as_ref().is_some_and(|c| c.contains(x, y))
            })
        }
        _ => unreachable!("coarse category in fine generator"),
    }
}

fn coarse_mask(category: GeometryCategory, m: usize, rng: &mut ChaCha8Rng) -> Vec<bool> {
    // half-height of the beam as a function of x; the beam is centred on y = 0.5
    let profile: Box<dyn Fn(f64) -> f64> = match category {
        GeometryCategory::RectangularBeam | GeometryCategory::RectangularBeamOpening => {
            let hh = rng.random_range(0.15..0.45);
            Box::new(move |_| hh)
        }
        GeometryCategory::TrapezoidalBeam | GeometryCategory::TrapezoidalBeamOpening => {
            let left = rng.random_range(0.3..0.46);
            let right = rng.random_range(0.12..0.26);
            Box::new(move |x| left + (right - left) * x)
        }
        GeometryCategory::ParabolicBeam | GeometryCategory::ParabolicBeamOpening => {
            let mid = rng.random_range(0.14..0.26);
            let end = rng.random_range(0.32..0.46);
            let (mid, end) = if rng.random_bool(0.5) { (mid, end) } else { (end, mid) };
            Box::new(move |x| mid + (end - mid) * (2.0 * x - 1.0).powi(2))
        }
        _ => unreachable!("fine category in coarse generator"),
    };
    let opening = category.has_opening().then(|| {
        let x = rng.random_range(0.3..0.7);
        let local = profile(x);
        Circle {
            x,
            y: 0.5,
            r: local * rng.random_range(0.35..0.6),
        }
    });
    rasterize(m, |x, y| {
        (y - 0.5).abs() <= profile(x) && !opening.as_ref().is_some_and(|c| c.contains(x, y))
    })
}

/// Builds the geometry library for a configuration: the masks plus every
/// pattern evaluated on every mask.
///
/// A mask that comes out disconnected is regenerated from the next sub-seed,
/// up to a fixed number of attempts.
pub fn generate_geometries(config: &GenerationConfig) -> Result<GeometryLibrary> {
    config.validate()?;
    let m = config.mesh_size;
    let (categories, mut bc_patterns, load_patterns): (&[GeometryCategory], _, _) = match config.family {
        Family::Fine => (
            &GeometryCategory::FINE,
            fine_bc_patterns(),
            fine_load_patterns(),
        ),
        Family::Coarse => (
            &GeometryCategory::COARSE,
            vec![coarse_bc_pattern()],
            vec![coarse_load_pattern()],
        ),
    };
    bc_patterns.truncate(config.bc_pattern_count);
    bc_patterns.extend(config.custom_bc_patterns.iter().cloned());
    let load_patterns: Vec<LoadPattern> = load_patterns
        .into_iter()
        .take(config.load_pattern_count)
        .collect();
    let sizes = category_sizes(config.geometry_count, categories.len());

    let mut geometries = Vec::with_capacity(config.geometry_count);
    for index in 0..config.geometry_count {
        let category = category_of(index, &sizes, categories);
        let mut mesh = None;
        for attempt in 0..MAX_ATTEMPTS {
            let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
            rng.set_stream(index as u64 * MAX_ATTEMPTS + attempt);
            let mask = match config.family {
                Family::Fine => fine_mask(category, m, &mut rng),
                Family::Coarse => coarse_mask(category, m, &mut rng),
            };
            if let Ok(g) = GridMesh::new(m, config.element_size, mask) {
                mesh = Some(g);
                break;
            }
        }
        let mesh = mesh.ok_or_else(|| {
            DatasetError::Generation(format!(
                "geometry {index} ({category:?}) stayed disconnected after {MAX_ATTEMPTS} attempts"
            ))
        })?;
        let constraints = bc_patterns
            .iter()
            .map(|p| Arc::new(p.constraints(&mesh)))
            .collect();
        let load_sites = load_patterns
            .iter()
            .map(|p| Arc::from(p.sites(&mesh)))
            .collect();
        geometries.push(Geometry {
            id: index as u32,
            category,
            mesh: Arc::new(mesh),
            constraints,
            load_sites,
        });
    }
    Ok(GeometryLibrary {
        family: config.family,
        geometries,
        bc_patterns,
        load_patterns,
    })
}
