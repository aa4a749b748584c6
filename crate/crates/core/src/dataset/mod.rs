//! Dataset generation, splitting and persistence.

mod config;
mod enumerate;
mod error;
mod format;
mod geometry;
mod manifest;
mod patterns;
mod pipeline;
mod split;

pub use config::{
    Family, GenerationConfig, Normalization, COARSE_GEOMETRIES, FINE_BC_PATTERNS, FINE_GEOMETRIES,
    FINE_LOAD_PATTERNS,
};
pub use enumerate::{enumerate_cases, normalize_loads};
pub use error::{DatasetError, Result};
pub use format::{
    read_records, DatasetReader, DatasetWriter, Header, Record, DATASET_CHANNELS, FORMAT_VERSION,
    HEADER_LEN, MAGIC, PREDICTION_CHANNELS,
};
pub use geometry::{category_sizes, generate_geometries, Geometry, GeometryCategory, GeometryLibrary};
pub use manifest::{
    manifest_path, read_dataset, records_path, write_dataset, CaseEntry, DatasetManifest,
    FailureEntry, GeometryEntry, MANIFEST_FILE, RECORDS_FILE,
};
pub use patterns::{
    coarse_bc_pattern, coarse_load_pattern, fine_bc_patterns, fine_load_patterns, BcPattern,
    LoadPattern, SideRule, SideSpan,
};
pub use pipeline::{generate_dataset, solve_all, SolveSummary};
pub use split::{quadrant, split_generalization, split_random, GeneralizationMode, SplitAssignment};
