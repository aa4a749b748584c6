use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::case::CaseSpec;
use crate::fea::Material;

use super::config::{Family, GenerationConfig, Normalization};
use super::error::{DatasetError, Result};
use super::format::{DatasetReader, DatasetWriter, Record, DATASET_CHANNELS, FORMAT_VERSION};
use super::geometry::{GeometryCategory, GeometryLibrary};
use super::patterns::{BcPattern, LoadPattern};
use super::split::SplitAssignment;

pub const MANIFEST_FILE: &str = "manifest.json";
pub const RECORDS_FILE: &str = "records.sgf";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeometryEntry {
    pub id: u32,
    pub category: GeometryCategory,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CaseEntry {
    pub case_id: u64,
    pub geometry_id: u32,
    pub bc_id: u32,
    pub load_id: u32,
    pub orientation_deg: f64,
    pub magnitude: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FailureEntry {
    pub case_id: u64,
    pub reason: String,
}

/// JSON sidecar describing a record file: how it was generated, what every
/// case is, which cases failed and the named splits.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetManifest {
    pub format_version: u32,
    pub name: String,
    pub family: Family,
    pub m: usize,
    pub element_size: f64,
    pub material: Material,
    pub normalization: Normalization,
    pub seed: u64,
    pub config: GenerationConfig,
    pub total_cases: usize,
    pub geometries: Vec<GeometryEntry>,
    pub bc_patterns: Vec<BcPattern>,
    pub load_patterns: Vec<LoadPattern>,
    pub cases: Vec<CaseEntry>,
    #[serde(default)]
    pub failures: Vec<FailureEntry>,
    #[serde(default)]
    pub splits: BTreeMap<String, SplitAssignment>,
}

impl DatasetManifest {
    pub fn new(
        name: &str,
        config: &GenerationConfig,
        library: &GeometryLibrary,
        cases: &[CaseSpec],
    ) -> Self {
        Self {
            format_version: FORMAT_VERSION,
            name: name.to_string(),
            family: config.family,
            m: config.mesh_size,
            element_size: config.element_size,
            material: config.material,
            normalization: config.normalization,
            seed: config.seed,
            config: config.clone(),
            total_cases: cases.len(),
            geometries: library
                .geometries
                .iter()
                .map(|g| GeometryEntry {
                    id: g.id,
                    category: g.category,
                })
                .collect(),
            bc_patterns: library.bc_patterns.clone(),
            load_patterns: library.load_patterns.clone(),
            cases: cases
                .iter()
                .enumerate()
                .map(|(i, c)| CaseEntry {
                    case_id: i as u64,
                    geometry_id: c.tags.geometry_id,
                    bc_id: c.tags.bc_id,
                    load_id: c.tags.load_id,
                    orientation_deg: c.tags.orientation_deg,
                    magnitude: c.tags.magnitude,
                })
                .collect(),
            failures: Vec::new(),
            splits: BTreeMap::new(),
        }
    }

    pub fn failed_ids(&self) -> BTreeSet<u64> {
        self.failures.iter().map(|f| f.case_id).collect()
    }

    /// Number of records the record file holds.
    pub fn record_count(&self) -> usize {
        self.total_cases - self.failures.len()
    }

    pub fn category_of(&self, geometry_id: u32) -> Option<GeometryCategory> {
        self.geometries
            .iter()
            .find(|g| g.id == geometry_id)
            .map(|g| g.category)
    }

    /// Adds a named split. Re-adding identical content is a no-op; different
    /// content under an existing name is refused.
    pub fn add_split(&mut self, name: &str, split: SplitAssignment) -> Result<()> {
        self.check_split(&split)?;
        match self.splits.get(name) {
            Some(existing) if existing.same_content(&split) => Ok(()),
            Some(_) => Err(DatasetError::SplitConflict {
                name: name.to_string(),
            }),
            None => {
                self.splits.insert(name.to_string(), split);
                Ok(())
            }
        }
    }

    fn check_split(&self, split: &SplitAssignment) -> Result<()> {
        let mut seen = vec![false; self.total_cases];
        for &id in split.train.iter().chain(&split.test).chain(&split.excluded) {
            let slot = seen.get_mut(id as usize).ok_or_else(|| {
                DatasetError::Manifest(format!("split refers to unknown case {id}"))
            })?;
            if *slot {
                return Err(DatasetError::Manifest(format!("case {id} appears twice in a split")));
            }
            *slot = true;
        }
        if let Some(missing) = seen.iter().position(|s| !s) {
            return Err(DatasetError::Manifest(format!("split does not place case {missing}")));
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        if self.format_version != FORMAT_VERSION {
            return Err(DatasetError::UnsupportedVersion {
                found: self.format_version,
                supported: FORMAT_VERSION,
            });
        }
        if self.total_cases != self.cases.len() || self.total_cases != self.config.case_count() {
            return Err(DatasetError::Manifest(format!(
                "total_cases {} disagrees with {} entries and a configured count of {}",
                self.total_cases,
                self.cases.len(),
                self.config.case_count()
            )));
        }
        if let Some((i, c)) = self
            .cases
            .iter()
            .enumerate()
            .find(|(i, c)| c.case_id != *i as u64)
        {
            return Err(DatasetError::Manifest(format!(
                "case entry {i} carries id {}",
                c.case_id
            )));
        }
        if let Some(f) = self.failures.iter().find(|f| f.case_id as usize >= self.total_cases) {
            return Err(DatasetError::Manifest(format!("failure for unknown case {}", f.case_id)));
        }
        for split in self.splits.values() {
            self.check_split(split)?;
        }
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self> {
        let manifest: Self = serde_json::from_slice(&fs::read(path)?)?;
        manifest.validate()?;
        Ok(manifest)
    }

    /// Writes the manifest through a temporary file and a rename.
    pub fn save(&self, path: &Path) -> Result<()> {
        let mut json = serde_json::to_vec_pretty(self)?;
        json.push(b'\n');
        let tmp = path.with_extension("json.tmp");
        fs::write(&tmp, json)?;
        fs::rename(&tmp, path)?;
        Ok(())
    }
}

pub fn manifest_path(dir: &Path) -> PathBuf {
    dir.join(MANIFEST_FILE)
}

pub fn records_path(dir: &Path) -> PathBuf {
    dir.join(RECORDS_FILE)
}

/// Writes a manifest and its records into `dir`, which is created if needed.
/// Refuses to replace an existing record file.
pub fn write_dataset(
    dir: &Path,
    manifest: &DatasetManifest,
    records: impl IntoIterator<Item = Record>,
) -> Result<()> {
    manifest.validate()?;
    fs::create_dir_all(dir)?;
    let mut writer = DatasetWriter::create(&records_path(dir), manifest.m, DATASET_CHANNELS)?;
    for r in records {
        writer.write(&r)?;
    }
    let written = writer.written() as usize;
    writer.finish()?;
    if written != manifest.record_count() {
        return Err(DatasetError::Manifest(format!(
            "wrote {written} records but the manifest expects {}",
            manifest.record_count()
        )));
    }
    manifest.save(&manifest_path(dir))
}

/// Opens a dataset directory, checking that the record header agrees with
/// the manifest.
pub fn read_dataset(
    dir: &Path,
) -> Result<(DatasetManifest, DatasetReader<std::io::BufReader<fs::File>>)> {
    let manifest = DatasetManifest::load(&manifest_path(dir))?;
    let reader = DatasetReader::open(&records_path(dir))?;
    let h = reader.header();
    if h.m as usize != manifest.m
        || h.channels != DATASET_CHANNELS
        || h.case_count as usize != manifest.record_count()
    {
        return Err(DatasetError::Manifest(format!(
            "record file holds {} records of {}×{} with {} channels, manifest expects {} of {}×{} with {DATASET_CHANNELS}",
            h.case_count, h.m, h.m, h.channels, manifest.record_count(), manifest.m, manifest.m
        )));
    }
    Ok((manifest, reader))
}
