use std::io::{Seek, Write};
use std::path::Path;
use std::sync::Arc;
use std::time::{Duration, Instant};

use rayon::prelude::*;

use crate::case::CaseSpec;
use crate::encoding::encode_case;
use crate::fea::{solve_case_with, Material, StiffnessSystem};

use super::config::GenerationConfig;
use super::enumerate::enumerate_cases;
use super::error::{DatasetError, Result};
use super::format::{DatasetWriter, Record, DATASET_CHANNELS};
use super::geometry::generate_geometries;
use super::manifest::{manifest_path, records_path, DatasetManifest, FailureEntry};

#[derive(Debug, Clone, PartialEq)]
pub struct SolveSummary {
    pub total: usize,
    pub written: usize,
    pub failures: Vec<FailureEntry>,
    pub elapsed: Duration,
}

/// Runs of consecutive cases sharing one mesh and one constraint set, so a
/// single factorization serves the whole run.
fn groups(cases: &[CaseSpec]) -> Vec<std::ops::Range<usize>> {
    let mut out = Vec::new();
    let mut start = 0;
    for i in 1..=cases.len() {
        let split = i == cases.len()
            || !Arc::ptr_eq(&cases[i].mesh, &cases[start].mesh)
            || !Arc::ptr_eq(&cases[i].constraints, &cases[start].constraints);
        if split {
            out.push(start..i);
            start = i;
        }
    }
    out
}

type Outcome = std::result::Result<Record, FailureEntry>;

fn solve_group(cases: &[CaseSpec], first_id: u64, material: &Material) -> Vec<Outcome> {
    let fail = |id: u64, reason: String| FailureEntry { case_id: id, reason };
    let factored = cases[0]
        .validate()
        .map_err(DatasetError::from)
        .and_then(|_| {
            Ok(StiffnessSystem::assemble(&cases[0].mesh, material, &cases[0].constraints)?.factorize()?)
        });
    let factored = match factored {
        Ok(f) => f,
        Err(e) => {
            let reason = e.to_string();
            return (0..cases.len())
                .map(|k| Err(fail(first_id + k as u64, reason.clone())))
                .collect();
        }
    };
    cases
        .iter()
        .enumerate()
        .map(|(k, case)| {
            let id = first_id + k as u64;
            let record = case
                .validate()
                .map_err(DatasetError::from)
                .and_then(|_| Ok(solve_case_with(&factored, case)?))
                .and_then(|field| Ok(encode_case(case, &field)?))
                .and_then(|stack| Record::from_stack(id, &stack));
            record.map_err(|e| fail(id, e.to_string()))
        })
        .collect()
}

/// Solves every case and streams the records to `writer` in case-id order.
///
/// Case ids are positions in `cases`. Failures are collected, not fatal, and
/// their cases are left out of the record file. Output bytes do not depend on
/// `workers`.
pub fn solve_all<W: Write + Seek>(
    cases: &[CaseSpec],
    material: &Material,
    workers: usize,
    writer: &mut DatasetWriter<W>,
) -> Result<SolveSummary> {
    let started = Instant::now();
    let workers = workers.max(1);
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| DatasetError::Config(format!("worker pool: {e}")))?;
    let groups = groups(cases);
    let mut failures = Vec::new();
    let mut written = 0;
    let mut done = 0;
    for batch in groups.chunks(workers) {
        let outcomes: Vec<Vec<Outcome>> = pool.install(|| {
            batch
                .par_iter()
                .map(|r| solve_group(&cases[r.clone()], r.start as u64, material))
                .collect()
        });
        for outcome in outcomes.into_iter().flatten() {
            match outcome {
                Ok(record) => {
                    writer.write(&record)?;
                    written += 1;
                }
                Err(f) => {
                    log::warn!("case {} failed: {}", f.case_id, f.reason);
                    failures.push(f);
                }
            }
        }
        done += batch.iter().map(|r| r.len()).sum::<usize>();
        log::info!("solved {done}/{} cases", cases.len());
    }
    Ok(SolveSummary {
        total: cases.len(),
        written,
        failures,
        elapsed: started.elapsed(),
    })
}

/// Generates, solves and writes a complete dataset into `dir`.
///
/// With `solve == false` only the manifest is written, which is enough for
/// counting and splitting.
pub fn generate_dataset(
    config: &GenerationConfig,
    name: &str,
    dir: &Path,
    workers: usize,
    solve: bool,
) -> Result<(DatasetManifest, SolveSummary)> {
    let started = Instant::now();
    let library = generate_geometries(config)?;
    let cases = enumerate_cases(config, &library)?;
    let mut manifest = DatasetManifest::new(name, config, &library, &cases);
    std::fs::create_dir_all(dir)?;
    let summary = if solve {
        let mut writer = DatasetWriter::create(&records_path(dir), config.mesh_size, DATASET_CHANNELS)?;
        let mut summary = solve_all(&cases, &config.material, workers, &mut writer)?;
        writer.finish()?;
        manifest.failures = summary.failures.clone();
        summary.elapsed = started.elapsed();
        summary
    } else {
        SolveSummary {
            total: cases.len(),
            written: 0,
            failures: Vec::new(),
            elapsed: started.elapsed(),
        }
    };
    manifest.save(&manifest_path(dir))?;
    Ok((manifest, summary))
}
