//! Numerical core for planar mean curvature flow with a prescribed constant
//! contact angle and its phase-field (Allen-Cahn) approximation.
//!
//! The crate is organized around one pipeline:
//!
//! 1. [`potentials`] builds the double-well potential `W`, the optimal 1D
//!    transition profile, the surface tension constant and boundary energy
//!    densities compatible with a contact angle `alpha`.
//! 2. [`geometry`] provides the domain boundary, interface curves (splined
//!    polylines with two contact endpoints), signed distances, projections,
//!    frames and curvatures.
//! 3. [`sharp_mcf`] is a front-tracking solver producing reference evolutions
//!    that meet the domain boundary at the prescribed angle.
//! 4. [`calibration`] turns a sharp-interface snapshot into a global triple
//!    `(xi, B, theta)`: a unit-length-bounded normal extension, a velocity
//!    extension and a transported sign weight, glued from local constructions
//!    at the two contact points, the bulk interface and the domain boundary.
//!    A sampling checker measures every defining condition.
//! 5. [`mesh`], [`sparse`] and [`phase_field`] implement a P1 finite-element
//!    Allen-Cahn solver on a triangulated disk, time-stepped by minimizing
//!    movements (each step minimizes energy plus a proximal penalty).
//! 6. [`functionals`] evaluates the relative energy, the bulk error, their
//!    coercivity diagnostics and the L1 phase error against a calibration.
//! 7. [`initial_data`] constructs well-prepared initial phase fields from a
//!    sharp-interface snapshot and measures their preparedness scaling.
//!
//! The crate is `no_std`-compatible (with `alloc`); enable the `libm` feature
//! instead of `std` for builds without the standard library. All heavy lifting
//! is pure computation: IO, configuration and experiment drivers live in the
//! companion `contactflow` crate.

#![cfg_attr(not(feature = "std"), no_std)]

#[cfg(all(not(feature = "std"), not(feature = "libm")))]
compile_error!("contactflow-core requires either the `std` or the `libm` feature");

extern crate alloc;

pub mod calibration;
pub mod error;
pub mod fmath;
pub mod functionals;
pub mod geometry;
pub mod initial_data;
pub mod mesh;
pub mod phase_field;
pub mod potentials;
pub mod rng;
pub mod sharp_mcf;
pub mod sparse;
pub mod vec2;

pub use error::CoreError;
pub use vec2::{Mat2, Vec2};
