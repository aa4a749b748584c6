use crate::case::{direction, CaseSpec, CaseTags};
use crate::fea::LoadPatch;

use super::config::{Family, GenerationConfig, Normalization};
use super::error::{DatasetError, Result};
use super::geometry::GeometryLibrary;

/// Rescales every nonzero traction patch to unit magnitude in unit mode.
/// Zero patches and passthrough mode leave the case unchanged; tags are kept.
pub fn normalize_loads(case: &CaseSpec, mode: Normalization) -> CaseSpec {
    match mode {
        Normalization::Passthrough => case.clone(),
        Normalization::Unit => CaseSpec {
            loads: case
                .loads
                .iter()
                .map(|p| {
                    let mag = p.magnitude();
                    if mag > 0.0 {
                        LoadPatch::new(p.sites.clone(), p.q_x / mag, p.q_y / mag)
                    } else {
                        p.clone()
                    }
                })
                .collect(),
            ..case.clone()
        },
    }
}

/// Every case of the configuration in (geometry, bc, load, orientation,
/// magnitude) order; the position in the returned vector is the case id.
pub fn enumerate_cases(config: &GenerationConfig, library: &GeometryLibrary) -> Result<Vec<CaseSpec>> {
    config.validate()?;
    if library.family != config.family
        || library.geometries.len() != config.geometry_count
        || library.bc_patterns.len() != config.bc_count()
        || library.load_patterns.len() != config.load_pattern_count
    {
        return Err(DatasetError::Config(
            "geometry library was generated from a different configuration".into(),
        ));
    }
    let limit = config.case_count();
    let mut cases = Vec::with_capacity(limit);
    'outer: for g in &library.geometries {
        for (bc_id, constraints) in g.constraints.iter().enumerate() {
            for (load_id, sites) in g.load_sites.iter().enumerate() {
                for &theta in &config.orientations_deg {
                    let (dx, dy) = direction(theta);
                    for &magnitude in &config.magnitudes {
                        if cases.len() == limit {
                            break 'outer;
                        }
                        let q = match config.family {
                            Family::Fine => magnitude,
                            // total force spread over the loaded faces
                            Family::Coarse => {
                                magnitude
                                    / (sites.len() as f64
                                        * config.element_size
                                        * config.material.thickness)
                            }
                        };
                        let case = CaseSpec {
                            mesh: g.mesh.clone(),
                            constraints: constraints.clone(),
                            loads: vec![LoadPatch::new(sites.clone(), q * dx, q * dy)],
                            tags: CaseTags {
                                geometry_id: g.id,
                                bc_id: bc_id as u32,
                                load_id: load_id as u32,
                                orientation_deg: theta,
                                magnitude,
                            },
                        };
                        cases.push(normalize_loads(&case, config.normalization));
                    }
                }
            }
        }
    }
    Ok(cases)
}
