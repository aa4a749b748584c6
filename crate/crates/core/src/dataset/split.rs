use std::collections::{BTreeSet, HashMap};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::config::{Family, Normalization};
use super::error::{DatasetError, Result};
use super::geometry::GeometryCategory;
use super::manifest::DatasetManifest;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GeneralizationMode {
    /// Train on rectangular and trapezoidal beams, test on parabolic ones.
    CrossContour,
    /// Train on beams without openings, test on beams with one.
    CrossOpening,
    /// Train on three orientation quadrants, test on the fourth.
    CrossOrientation,
}

/// Case ids on each side of a split, ascending. `excluded` holds cases that
/// belong to neither side: failed solves, and for generalization splits the
/// magnitude duplicates that collapse under load normalization.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SplitAssignment {
    pub method: String,
    pub train: Vec<u64>,
    pub test: Vec<u64>,
    #[serde(default)]
    pub excluded: Vec<u64>,
}

impl SplitAssignment {
    /// True when both assignments put the same ids on the same sides.
    pub fn same_content(&self, other: &SplitAssignment) -> bool {
        self.train == other.train && self.test == other.test && self.excluded == other.excluded
    }

    pub fn total(&self) -> usize {
        self.train.len() + self.test.len() + self.excluded.len()
    }
}

/// Seeded uniform shuffle of all successfully generated cases; the first
/// `round(ratio·N)` go to training.
pub fn split_random(manifest: &DatasetManifest, ratio: f64, seed: u64) -> Result<SplitAssignment> {
    if !(ratio > 0.0 && ratio < 1.0) {
        return Err(DatasetError::Config(format!("split ratio {ratio} outside (0, 1)")));
    }
    let failed = manifest.failed_ids();
    let mut pool: Vec<u64> = manifest
        .cases
        .iter()
        .map(|c| c.case_id)
        .filter(|id| !failed.contains(id))
        .collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    pool.shuffle(&mut rng);
    let n_train = (ratio * pool.len() as f64).round() as usize;
    let mut train = pool[..n_train].to_vec();
    let mut test = pool[n_train..].to_vec();
    train.sort_unstable();
    test.sort_unstable();
    Ok(SplitAssignment {
        method: format!("random ratio={ratio} seed={seed}"),
        train,
        test,
        excluded: failed.into_iter().collect(),
    })
}

/// Orientation quadrant `0..4`, quadrant `k` covering `[90k, 90(k+1))`.
pub fn quadrant(orientation_deg: f64) -> usize {
    ((orientation_deg.rem_euclid(360.0) / 90.0).floor() as usize).min(3)
}

/// Category or orientation split of a coarse dataset.
///
/// With normalized loads every nonzero magnitude of a (geometry, bc, load,
/// orientation) tuple is the same case, so one representative is kept (the
/// lowest case id with a nonzero magnitude) and the rest, along with the
/// zero-load cases, are excluded. The orientation mode draws the test
/// quadrant from `seed`; the category modes ignore it.
pub fn split_generalization(
    manifest: &DatasetManifest,
    mode: GeneralizationMode,
    seed: u64,
) -> Result<SplitAssignment> {
    if manifest.family != Family::Coarse {
        return Err(DatasetError::Config(
            "generalization splits need a coarse-family manifest".into(),
        ));
    }
    if manifest.normalization != Normalization::Unit {
        log::warn!("generalization split on a manifest without unit load normalization");
    }
    let categories: HashMap<u32, GeometryCategory> =
        manifest.geometries.iter().map(|g| (g.id, g.category)).collect();
    let test_quadrant = ChaCha8Rng::seed_from_u64(seed).random_range(0..4usize);
    let failed = manifest.failed_ids();

    let mut seen = BTreeSet::new();
    let (mut train, mut test, mut excluded) = (Vec::new(), Vec::new(), Vec::new());
    for case in &manifest.cases {
        let key = (
            case.geometry_id,
            case.bc_id,
            case.load_id,
            case.orientation_deg.to_bits(),
        );
        if failed.contains(&case.case_id) || case.magnitude <= 0.0 || !seen.insert(key) {
            excluded.push(case.case_id);
            continue;
        }
        let category = *categories.get(&case.geometry_id).ok_or_else(|| {
            DatasetError::Manifest(format!(
                "case {} refers to unknown geometry {}",
                case.case_id, case.geometry_id
            ))
        })?;
        let is_test = match mode {
            GeneralizationMode::CrossContour => category.is_parabolic(),
            GeneralizationMode::CrossOpening => category.has_opening(),
            GeneralizationMode::CrossOrientation => quadrant(case.orientation_deg) == test_quadrant,
        };
        if is_test {
            test.push(case.case_id);
        } else {
            train.push(case.case_id);
        }
    }
    let method = match mode {
        GeneralizationMode::CrossContour => "cross-contour".to_string(),
        GeneralizationMode::CrossOpening => "cross-opening".to_string(),
        GeneralizationMode::CrossOrientation => {
            format!("cross-orientation seed={seed} test-quadrant={}", test_quadrant + 1)
        }
    };
    Ok(SplitAssignment {
        method,
        train,
        test,
        excluded,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quadrants() {
        assert_eq!(quadrant(0.0), 0);
        assert_eq!(quadrant(85.0), 0);
        assert_eq!(quadrant(90.0), 1);
        assert_eq!(quadrant(270.0), 3);
        assert_eq!(quadrant(355.0), 3);
    }
}
