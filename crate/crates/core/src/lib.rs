//! Design and analysis toolchain for printed flexure joints.
//!
//! Turns declarative descriptions of laminated flexures, jamming joint limits,
//! tendon-driven limbs and quadruped gaits into predicted stiffness, jam
//! angles, foot trajectories, speed curves, printable STL geometry and
//! print-process reports. Library quantities are SI unless stated otherwise;
//! design documents and output files use millimeters.

// `!(x > 0.0)` is used deliberately so NaN fails validation.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod design;
pub mod error;
pub mod fsutil;
pub mod gait;
pub mod geometry;
pub mod joint_limits;
pub mod limb;
pub mod material;
pub mod process;
pub mod stiffness;
pub mod sweep;
pub mod units;

pub use design::{parse_design, parse_design_with_overrides, DesignDoc, MaterialOverrides};
pub use error::{Error, Result};
