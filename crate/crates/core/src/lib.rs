//! Von Mises stress-field datasets on regular grids.
//!
//! * [`fea`] solves linear plane-stress problems on `m×m` quadrilateral grids.
//! * [`encoding`] turns a [`CaseSpec`] and its solution into image channels.
//! * [`dataset`] generates the two dataset families, splits them and reads
//!   and writes the binary record format.
//! * [`metrics`] scores predicted fields against ground truth.

pub mod case;
pub mod dataset;
pub mod encoding;
pub mod fea;
pub mod metrics;

pub use case::{CaseSpec, CaseTags};
pub use encoding::{decode_input, encode_input, encode_target, ChannelStack};
pub use fea::{
    assemble, element_stiffness, recover_stress, solve_case, solve_displacements, von_mises,
    ConstraintSet, DisplacementField, FeaError, GridMesh, LoadField, LoadPatch, LoadSite, Material,
    MeshSystem, StressField,
};
pub use metrics::{MetricReport, MetricError};
