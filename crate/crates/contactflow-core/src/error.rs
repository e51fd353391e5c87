//! Error type shared by the core modules.

use crate::vec2::Vec2;
use alloc::string::String;
use core::fmt;

#[derive(Debug, Clone, PartialEq)]
pub enum CoreError {
    /// A potential or boundary density violates one of its defining
    /// conditions; carries the condition name and the failing sample.
    Validation {
        what: &'static str,
        at: f64,
        value: f64,
    },
    /// Closest-point iteration failed to converge.
    Projection {
        target: &'static str,
        point: Vec2,
        iterations: u32,
        residual: f64,
    },
    /// Front-tracking step produced a self-intersecting or collapsed curve.
    Evolution { what: &'static str, detail: String },
    /// Interface and boundary frames are too close to tangential.
    DegenerateAngle { dot: f64 },
    /// Local normal extension lost its length bound; retry with a smaller
    /// contact-ball radius.
    RadiusTooLarge { r_hat: f64, xi_norm_sq: f64 },
    /// The scale hierarchy of the calibration cannot be satisfied for this
    /// geometry; carries the violated inequality in human-readable form.
    ScaleInfeasible { inequality: String },
    /// Mesh generation produced an inverted or degenerate element.
    Mesh { triangle: usize, area: f64 },
    /// Variational step failed (line search exhausted).
    Step { halvings: u32, energy: f64 },
    /// Interpolation weight queried at the wedge vertex.
    UndefinedAtVertex,
    /// Generic precondition violation.
    Precondition(&'static str),
}

impl fmt::Display for CoreError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CoreError::Validation { what, at, value } => {
                write!(f, "validation failed: {what} at {at} (value {value})")
            }
            CoreError::Projection {
                target,
                point,
                iterations,
                residual,
            } => write!(
                f,
                "projection onto {target} did not converge at ({}, {}) after {iterations} iterations (residual {residual:e})",
                point.x, point.y
            ),
            CoreError::Evolution { what, detail } => write!(f, "evolution failed: {what}: {detail}"),
            CoreError::DegenerateAngle { dot } => {
                write!(f, "degenerate contact angle: |tau_boundary . n_interface| = {dot:e}")
            }
            CoreError::RadiusTooLarge { r_hat, xi_norm_sq } => write!(
                f,
                "contact-ball radius {r_hat} too large: |xi|^2 = {xi_norm_sq} left [1/4, 2]"
            ),
            CoreError::ScaleInfeasible { inequality } => {
                write!(f, "calibration scales infeasible: {inequality}")
            }
            CoreError::Mesh { triangle, area } => {
                write!(f, "mesh error: triangle {triangle} has area {area:e}")
            }
            CoreError::Step { halvings, energy } => write!(
                f,
                "variational step failed after {halvings} line-search halvings (energy {energy})"
            ),
            CoreError::UndefinedAtVertex => write!(f, "interpolation weight undefined at wedge vertex"),
            CoreError::Precondition(msg) => write!(f, "precondition violated: {msg}"),
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for CoreError {}

pub type Result<T> = core::result::Result<T, CoreError>;
