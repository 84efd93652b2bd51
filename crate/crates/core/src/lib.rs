//! Numerical laboratory for the quaternionic Heisenberg group, its
//! Carnot–Carathéodory forms, and the induced metric family `g_a` on ℍⁿ.
//!
//! The crate is organized bottom-up:
//!
//! * [`quatlib`] quaternion algebra, Sp(n) sampling, Sp(1) → SO(3);
//! * [`heisenberg`] the group ℳ = ℝ³ × ℍⁿ, its euclidean group and the solvable actions;
//! * [`forms`] the contact forms ω, η, their derivatives and the distribution 𝖣;
//! * [`metric`] the metric `g_a`, twist maps, descended 2-forms;
//! * [`diffgeo`] metric-agnostic curvature, transport, geodesics, exterior derivative;
//! * [`quotients`] ℳ/ℝ² and the complex Heisenberg group 𝒩;
//! * [`audits`] reproducible claim audits producing [`audits::AuditReport`] values.

pub mod audits;
pub mod diffgeo;
pub mod dual;
pub mod error;
pub mod forms;
pub mod heisenberg;
pub mod metric;
pub mod quatlib;
pub mod quotients;
pub mod sampling;

pub use audits::{
    exit_code, run_audits, AuditClass, AuditConfig, AuditName, AuditReport, AuditStatus,
    BackendChoice, CCBound,
};
pub use diffgeo::{Backend, MetricField};
pub use dual::{Dual, Dual2, Real};
pub use error::{Error, Result};
pub use heisenberg::{EMElement, MPoint, MTangent, SolvableIndex};
pub use metric::GaMetric;
pub use quatlib::{QMatrix, QVector, Quaternion, UnitQuaternion};
