//! Field-comparison metrics: MSE, MAE, PMAE, PAE and PPAE.
//!
//! All metrics compare a ground-truth field `Y` with a prediction `Ŷ` over
//! every pixel of the image, void pixels included.

use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MetricError {
    #[error("shape mismatch: truth has {truth} values, prediction has {pred}")]
    Shape { truth: usize, pred: usize },
    #[error("empty field")]
    EmptyField,
    #[error("undefined {metric}: {reason}")]
    UndefinedDenominator { metric: &'static str, reason: String },
    #[error("no cases to aggregate")]
    EmptyInput,
    #[error("report output failed: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, MetricError>;

fn check_shapes(truth: &[f64], pred: &[f64]) -> Result<()> {
    if truth.len() != pred.len() {
        return Err(MetricError::Shape {
            truth: truth.len(),
            pred: pred.len(),
        });
    }
    if truth.is_empty() {
        return Err(MetricError::EmptyField);
    }
    Ok(())
}

fn max_of(values: &[f64]) -> f64 {
    values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
}

fn min_of(values: &[f64]) -> f64 {
    values.iter().copied().fold(f64::INFINITY, f64::min)
}

/// Mean squared error, MPa².
pub fn mse(truth: &[f64], pred: &[f64]) -> Result<f64> {
    check_shapes(truth, pred)?;
    let sum: f64 = truth.iter().zip(pred).map(|(y, p)| (y - p) * (y - p)).sum();
    Ok(sum / truth.len() as f64)
}

/// Mean absolute error, MPa.
pub fn mae(truth: &[f64], pred: &[f64]) -> Result<f64> {
    check_shapes(truth, pred)?;
    let sum: f64 = truth.iter().zip(pred).map(|(y, p)| (y - p).abs()).sum();
    Ok(sum / truth.len() as f64)
}

/// MAE as a percentage of the truth's value range.
pub fn pmae(truth: &[f64], pred: &[f64]) -> Result<f64> {
    let err = mae(truth, pred)?;
    let range = max_of(truth) - min_of(truth);
    if !(range > 0.0) {
        return Err(MetricError::UndefinedDenominator {
            metric: "PMAE",
            reason: "ground truth is constant".into(),
        });
    }
    Ok(err / range * 100.0)
}

/// Absolute difference between the truth and prediction maxima, MPa.
pub fn pae(truth: &[f64], pred: &[f64]) -> Result<f64> {
    check_shapes(truth, pred)?;
    Ok((max_of(truth) - max_of(pred)).abs())
}

/// PAE as a percentage of the truth maximum.
pub fn ppae(truth: &[f64], pred: &[f64]) -> Result<f64> {
    let err = pae(truth, pred)?;
    let peak = max_of(truth);
    if !(peak > 0.0) {
        return Err(MetricError::UndefinedDenominator {
            metric: "PPAE",
            reason: format!("ground truth maximum is {peak}"),
        });
    }
    Ok(err / peak * 100.0)
}

/// Metrics of one case. Percent metrics are `None` when their denominator is
/// degenerate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CaseMetrics {
    pub case_id: u64,
    pub mse: f64,
    pub mae: f64,
    pub pmae_percent: Option<f64>,
    pub pae: f64,
    pub ppae_percent: Option<f64>,
}

fn defined(r: Result<f64>) -> Result<Option<f64>> {
    match r {
        Ok(v) => Ok(Some(v)),
        Err(MetricError::UndefinedDenominator { .. }) => Ok(None),
        Err(e) => Err(e),
    }
}

pub fn evaluate_case(case_id: u64, truth: &[f64], pred: &[f64]) -> Result<CaseMetrics> {
    Ok(CaseMetrics {
        case_id,
        mse: mse(truth, pred)?,
        mae: mae(truth, pred)?,
        pmae_percent: defined(pmae(truth, pred))?,
        pae: pae(truth, pred)?,
        ppae_percent: defined(ppae(truth, pred))?,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AggregateMetrics {
    pub mse: f64,
    pub mae: f64,
    pub pmae_percent: Option<f64>,
    pub pae: f64,
    pub ppae_percent: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricReport {
    pub cases: Vec<CaseMetrics>,
    pub aggregate: AggregateMetrics,
    /// Cases whose PMAE was undefined and left out of its mean.
    pub pmae_excluded: usize,
    /// Cases whose PPAE was undefined and left out of its mean.
    pub ppae_excluded: usize,
}

impl MetricReport {
    /// Number of cases with at least one undefined metric.
    pub fn excluded_cases(&self) -> usize {
        self.cases
            .iter()
            .filter(|c| c.pmae_percent.is_none() || c.ppae_percent.is_none())
            .count()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("metric report serializes")
    }

    /// CSV with one row per case followed by a `mean` footer row.
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let io = |e: csv::Error| MetricError::Io(e.to_string());
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(["case_id", "mse", "mae", "pmae_percent", "pae", "ppae_percent"])
            .map_err(io)?;
        let opt = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
        for c in &self.cases {
            w.write_record([
                c.case_id.to_string(),
                c.mse.to_string(),
                c.mae.to_string(),
                opt(c.pmae_percent),
                c.pae.to_string(),
                opt(c.ppae_percent),
            ])
            .map_err(io)?;
        }
        let a = &self.aggregate;
        w.write_record([
            "mean".to_string(),
            a.mse.to_string(),
            a.mae.to_string(),
            opt(a.pmae_percent),
            a.pae.to_string(),
            opt(a.ppae_percent),
        ])
        .map_err(io)?;
        w.flush().map_err(|e| MetricError::Io(e.to_string()))
    }

    pub fn write_files(&self, json_path: &Path, csv_path: &Path) -> Result<()> {
        std::fs::write(json_path, self.to_json()).map_err(|e| MetricError::Io(e.to_string()))?;
        let file = std::fs::File::create(csv_path).map_err(|e| MetricError::Io(e.to_string()))?;
        self.write_csv(std::io::BufWriter::new(file))
    }
}

fn mean(values: impl Iterator<Item = f64>) -> Option<f64> {
    let (sum, n) = values.fold((0.0, 0usize), |(s, n), v| (s + v, n + 1));
    (n > 0).then(|| sum / n as f64)
}

/// Per-case-then-mean aggregation.
pub fn aggregate(cases: Vec<CaseMetrics>) -> Result<MetricReport> {
    if cases.is_empty() {
        return Err(MetricError::EmptyInput);
    }
    let aggregate = AggregateMetrics {
        mse: mean(cases.iter().map(|c| c.mse)).unwrap(),
        mae: mean(cases.iter().map(|c| c.mae)).unwrap(),
        pmae_percent: mean(cases.iter().filter_map(|c| c.pmae_percent)),
        pae: mean(cases.iter().map(|c| c.pae)).unwrap(),
        ppae_percent: mean(cases.iter().filter_map(|c| c.ppae_percent)),
    };
    let pmae_excluded = cases.iter().filter(|c| c.pmae_percent.is_none()).count();
    let ppae_excluded = cases.iter().filter(|c| c.ppae_percent.is_none()).count();
    Ok(MetricReport {
        cases,
        aggregate,
        pmae_excluded,
        ppae_excluded,
    })
}
