//! File formats, experiment harness and command line for `pivotree-core`.

pub mod cache;
pub mod config;
pub mod error;
pub mod harness;
pub mod instance;
pub mod mps;
pub mod parallel;
pub mod report;
pub mod standard;

pub use error::HarnessError;
pub use instance::{GenDims, Instance, InstanceSource};
pub use mps::{parse_mps, MpsError, ObjSense, RawLP};
pub use standard::{to_standard_form, StandardInstance};
