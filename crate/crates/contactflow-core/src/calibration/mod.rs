//! Boundary-adapted gradient-flow calibrations: a normal extension `xi`, a
//! velocity extension `B` and a transported sign weight `theta` built from a
//! sharp-interface snapshot, plus a sampling checker for every condition the
//! triple must satisfy.

pub mod check;
pub mod contact;
pub mod cutoffs;
pub mod field;
pub mod wedges;

pub use check::{check_calibration, CheckReport, ConditionStat, SamplePlan};
pub use contact::{build_contact_frame, build_gamma_table, ContactFrame, GammaTable};
pub use field::{CalibrationConfig, CalibrationField, FieldValue, Scales, SnapshotFrame, Weights};
pub use wedges::{Sector, WedgeDecomposition};
