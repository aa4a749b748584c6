use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::path::Path;

use anyhow::{bail, Context, Result};

use stressforge::dataset::{
    generate_dataset, manifest_path, read_dataset, records_path, split_generalization, split_random,
    DatasetManifest, DatasetReader, DatasetWriter, Family, GeneralizationMode, GenerationConfig,
    Normalization, Record, DATASET_CHANNELS, PREDICTION_CHANNELS,
};
use stressforge::encoding::encode_case;
use stressforge::metrics::{aggregate, evaluate_case};
use stressforge::{solve_case, FeaError};

use crate::args::{
    ChannelArg, EvaluateArgs, FamilyArg, GenerateArgs, NormalizeArg, RenderArgs, RenderOptions,
    SolveArgs, SplitArgs, SplitModeArg,
};
use crate::case_file::CaseFile;
use crate::render::write_heatmap;

pub const EXIT_USAGE: u8 = 1;
pub const EXIT_PARTIAL: u8 = 2;
pub const EXIT_SOLVER: u8 = 3;
pub const EXIT_SPLIT_CONFLICT: u8 = 4;
pub const EXIT_ALIGNMENT: u8 = 5;

/// An error that carries its process exit code.
#[derive(Debug)]
pub struct Exit {
    pub code: u8,
    pub message: String,
}

impl fmt::Display for Exit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

impl std::error::Error for Exit {}

fn exit(code: u8, message: impl Into<String>) -> anyhow::Error {
    Exit {
        code,
        message: message.into(),
    }
    .into()
}

fn default_workers() -> usize {
    std::thread::available_parallelism().map_or(1, |n| n.get())
}

pub fn generate(args: GenerateArgs) -> Result<()> {
    let family = match args.family {
        FamilyArg::Fine => Family::Fine,
        FamilyArg::Coarse => Family::Coarse,
    };
    let mut config = GenerationConfig::for_family(family, args.seed);
    if let Some(n) = args.normalize {
        config.normalization = match n {
            NormalizeArg::Unit => Normalization::Unit,
            NormalizeArg::Passthrough => Normalization::Passthrough,
        };
    }
    config.limit = args.limit;
    if let Some(m) = args.mesh_size {
        config.mesh_size = m;
    }
    if let Some(n) = args.geometries {
        config.geometry_count = n;
    }
    if let Some(n) = args.bc_patterns {
        config.bc_pattern_count = n;
    }
    if let Some(n) = args.load_patterns {
        config.load_pattern_count = n;
    }
    config.validate()?;
    for existing in [manifest_path(&args.out), records_path(&args.out)] {
        if existing.exists() {
            bail!("{} already exists; refusing to overwrite a dataset", existing.display());
        }
    }
    let name = args.name.unwrap_or_else(|| match family {
        Family::Fine => "fine".to_string(),
        Family::Coarse => "coarse".to_string(),
    });
    let workers = args.workers.unwrap_or_else(default_workers).max(1);
    let (manifest, summary) =
        generate_dataset(&config, &name, &args.out, workers, !args.manifest_only)?;
    println!(
        "cases: {}  written: {}  failures: {}  wall time: {:.2} s",
        manifest.total_cases,
        summary.written,
        summary.failures.len(),
        summary.elapsed.as_secs_f64()
    );
    if !summary.failures.is_empty() {
        for f in &summary.failures {
            eprintln!("case {} failed: {}", f.case_id, f.reason);
        }
        return Err(exit(
            EXIT_PARTIAL,
            format!("{} of {} cases failed", summary.failures.len(), summary.total),
        ));
    }
    Ok(())
}

fn render_record(record: &Record, m: usize, channels: &[ChannelArg], dir: &Path, opts: &RenderOptions) -> Result<()> {
    std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    for &ch in channels {
        let stem = format!("case{}_{}", record.case_id, ch.file_stem());
        write_heatmap(dir, &stem, record.channel(m, ch.index()), m, opts.colormap, opts.scale)?;
    }
    Ok(())
}

pub fn solve(args: SolveArgs) -> Result<()> {
    let text = std::fs::read_to_string(&args.case)
        .with_context(|| format!("reading {}", args.case.display()))?;
    let (case, material) = CaseFile::parse(&text)?.to_case()?;
    if args.out.exists() {
        bail!("{} already exists; refusing to overwrite", args.out.display());
    }
    let field = match solve_case(&case, &material) {
        Ok(f) => f,
        Err(e @ (FeaError::UnderConstrained(_) | FeaError::Numerical { .. })) => {
            return Err(exit(EXIT_SOLVER, format!("solver failure: {e}")));
        }
        Err(e) => return Err(e.into()),
    };
    let stack = encode_case(&case, &field)?;
    let record = Record::from_stack(args.case_id, &stack)?;
    let mut writer = DatasetWriter::create(&args.out, case.m(), DATASET_CHANNELS)
        .with_context(|| format!("creating {}", args.out.display()))?;
    writer.write(&record)?;
    writer.finish()?;
    let peak = field.von_mises().iter().copied().fold(0.0, f64::max);
    println!("solved {}×{} case, peak von Mises {peak:.6} MPa", case.m(), case.m());
    if let Some(dir) = &args.render {
        render_record(&record, case.m(), &ChannelArg::ALL, dir, &args.render_options)?;
    }
    Ok(())
}

pub fn split(args: SplitArgs) -> Result<()> {
    let path = manifest_path(&args.dataset);
    let mut manifest =
        DatasetManifest::load(&path).with_context(|| format!("reading {}", path.display()))?;
    let assignment = match args.mode {
        SplitModeArg::Random => split_random(&manifest, args.ratio, args.seed)?,
        SplitModeArg::CrossContour => {
            split_generalization(&manifest, GeneralizationMode::CrossContour, args.seed)?
        }
        SplitModeArg::CrossOpening => {
            split_generalization(&manifest, GeneralizationMode::CrossOpening, args.seed)?
        }
        SplitModeArg::CrossOrientation => {
            split_generalization(&manifest, GeneralizationMode::CrossOrientation, args.seed)?
        }
    };
    let (train, test, excluded) = (
        assignment.train.len(),
        assignment.test.len(),
        assignment.excluded.len(),
    );
    match manifest.add_split(&args.name, assignment) {
        Ok(()) => {}
        Err(stressforge::dataset::DatasetError::SplitConflict { name }) => {
            return Err(exit(
                EXIT_SPLIT_CONFLICT,
                format!("split {name:?} already exists with different content"),
            ));
        }
        Err(e) => return Err(e.into()),
    }
    manifest.save(&path)?;
    println!("split {}: train {train}  test {test}  excluded {excluded}", args.name);
    Ok(())
}

pub fn evaluate(args: EvaluateArgs) -> Result<()> {
    let (manifest, records) = read_dataset(&args.dataset)
        .with_context(|| format!("opening dataset {}", args.dataset.display()))?;
    let wanted: BTreeSet<u64> = match &args.split {
        Some(name) => {
            let split = manifest
                .splits
                .get(name)
                .with_context(|| format!("manifest has no split {name:?}"))?;
            split.test.iter().copied().collect()
        }
        None => {
            let failed = manifest.failed_ids();
            manifest
                .cases
                .iter()
                .map(|c| c.case_id)
                .filter(|id| !failed.contains(id))
                .collect()
        }
    };

    let reader = DatasetReader::open(&args.predictions)
        .with_context(|| format!("opening {}", args.predictions.display()))?;
    let h = reader.header();
    if h.channels != PREDICTION_CHANNELS || h.m as usize != manifest.m {
        bail!(
            "prediction file holds {}×{} records with {} channels, expected {}×{} with {PREDICTION_CHANNELS}",
            h.m, h.m, h.channels, manifest.m, manifest.m
        );
    }
    let mut predictions = HashMap::new();
    for r in reader {
        let r = r?;
        if wanted.contains(&r.case_id) {
            predictions.insert(r.case_id, r.data);
        }
    }
    let missing: Vec<u64> = wanted
        .iter()
        .copied()
        .filter(|id| !predictions.contains_key(id))
        .collect();
    if !missing.is_empty() {
        let list: Vec<String> = missing.iter().map(u64::to_string).collect();
        return Err(exit(
            EXIT_ALIGNMENT,
            format!("{} cases have no prediction: {}", missing.len(), list.join(", ")),
        ));
    }

    let m = manifest.m;
    let mut cases = Vec::with_capacity(wanted.len());
    for r in records {
        let r = r?;
        if let Some(pred) = predictions.get(&r.case_id) {
            let truth: Vec<f64> = r.channel(m, 3).iter().map(|&v| v as f64).collect();
            let pred: Vec<f64> = pred.iter().map(|&v| v as f64).collect();
            cases.push(evaluate_case(r.case_id, &truth, &pred)?);
        }
    }
    if cases.len() != wanted.len() {
        let found: BTreeSet<u64> = cases.iter().map(|c| c.case_id).collect();
        let absent: Vec<String> = wanted.difference(&found).map(u64::to_string).collect();
        return Err(exit(
            EXIT_ALIGNMENT,
            format!("{} cases are not in the record file: {}", absent.len(), absent.join(", ")),
        ));
    }
    let report = aggregate(cases)?;
    std::fs::create_dir_all(&args.out)?;
    report.write_files(&args.out.join("metrics.json"), &args.out.join("metrics.csv"))?;
    let a = &report.aggregate;
    let pct = |v: Option<f64>| v.map_or("undefined".to_string(), |x| format!("{x:.6}%"));
    println!(
        "cases {}  MSE {:.6}  MAE {:.6}  PMAE {}  PAE {:.6}  PPAE {}  (percent metrics skipped on {} cases)",
        report.cases.len(),
        a.mse,
        a.mae,
        pct(a.pmae_percent),
        a.pae,
        pct(a.ppae_percent),
        report.excluded_cases()
    );
    Ok(())
}

pub fn render(args: RenderArgs) -> Result<()> {
    let reader = DatasetReader::open(&args.records)
        .with_context(|| format!("opening {}", args.records.display()))?;
    let h = reader.header();
    let available: Vec<ChannelArg> = if h.channels == DATASET_CHANNELS {
        ChannelArg::ALL.to_vec()
    } else if h.channels == PREDICTION_CHANNELS {
        vec![ChannelArg::VonMises]
    } else {
        bail!("cannot render records with {} channels", h.channels);
    };
    let channels = if args.channels.is_empty() {
        available.clone()
    } else {
        args.channels.clone()
    };
    if let Some(c) = channels.iter().find(|c| !available.contains(c)) {
        bail!("channel {} is not present in this file", c.file_stem());
    }
    let mut found = None;
    for r in reader {
        let r = r?;
        if r.case_id == args.case_id {
            found = Some(r);
            break;
        }
    }
    let record = found.with_context(|| format!("case {} not found", args.case_id))?;
    let m = h.m as usize;
    std::fs::create_dir_all(&args.out).with_context(|| format!("creating {}", args.out.display()))?;
    for ch in channels {
        // prediction files hold their single channel at index 0
        let k = if h.channels == PREDICTION_CHANNELS { 0 } else { ch.index() };
        let stem = format!("case{}_{}", record.case_id, ch.file_stem());
        write_heatmap(
            &args.out,
            &stem,
            record.channel(m, k),
            m,
            args.render_options.colormap,
            args.render_options.scale,
        )?;
    }
    Ok(())
}
