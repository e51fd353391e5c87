//! Relative energy, bulk error, coercivity diagnostics and the L1 phase
//! error of a phase-field state against a calibration field.
//!
//! Volume integrals use the edge-midpoint rule on each triangle (exact for
//! quadratics); the calibration triple is evaluated directly at quadrature
//! points. Boundary integrals use the nodal (trapezoid) rule, matching the
//! solver's boundary quadrature.

use crate::calibration::field::CalibrationField;
use crate::error::{CoreError, Result};
use crate::fmath;
use crate::phase_field::{FemSystem, PhaseState};
use crate::potentials::{BoundaryDensity, DoubleWell, ProfileTable};
use crate::vec2::Vec2;
use alloc::vec::Vec;

/// Nodal curvature-like quantity `H_eps = -eps lap_h u + W'(u)/eps`, where
/// the discrete Laplacian carries the Robin boundary term:
/// `lap_h u = -M_l^{-1} (K u + (1/eps) M_b sigma'(u))`.
pub fn phase_descriptors(
    sys: &FemSystem,
    well: &DoubleWell,
    sigma: &BoundaryDensity,
    state: &PhaseState,
) -> Vec<f64> {
    let n = sys.n_nodes();
    let mut ku = alloc::vec![0.0; n];
    sys.ops.stiffness.matvec(&state.u, &mut ku);
    let mut h_eps = alloc::vec![0.0; n];
    for i in 0..n {
        let mut flux = ku[i];
        let mb = sys.ops.boundary_mass_lumped[i];
        if mb > 0.0 {
            flux += mb * sigma.deriv(state.u[i]) / state.eps;
        }
        let lap = -flux / sys.ops.mass_lumped[i];
        h_eps[i] = -state.eps * lap + well.deriv(state.u[i]) / state.eps;
    }
    h_eps
}

/// The unit "normal" of the phase field at a quadrature point, with the
/// fixed fallback direction for vanishing gradients.
#[inline]
pub fn phase_normal(grad_u: Vec2) -> Vec2 {
    if grad_u.norm() < 1e-14 {
        Vec2::new(1.0, 0.0)
    } else {
        grad_u / grad_u.norm()
    }
}

/// Relative energy and its coercivity diagnostics at one time.
#[derive(Debug, Clone, Copy, Default)]
pub struct RelativeEnergy {
    pub value: f64,
    /// Alternative representation (equipartition square + tilt + boundary).
    pub alt: f64,
    /// Equipartition defect integral (bounded by the relative energy).
    pub equipartition: f64,
    /// Tilt integral `(1 - n . xi) |grad psi|`.
    pub tilt: f64,
    /// Boundary excess `sigma - psi cos(alpha)`.
    pub boundary: f64,
    /// `min(1, d^2) |grad psi|`.
    pub weighted_psi: f64,
    /// `|n - xi|^2 |grad psi|`.
    pub tilt_sq_psi: f64,
    /// `|n - xi|^2 eps |grad u|^2`.
    pub tilt_sq_diffuse: f64,
    /// `min(1, d^2) eps |grad u|^2`.
    pub weighted_diffuse: f64,
    /// Sharpest length-shortfall constant observed at the quadrature points.
    pub c_quad: f64,
}

/// Evaluate the relative energy against the calibration field.
///
/// Fails when the state and field times disagree.
pub fn relative_energy(
    sys: &FemSystem,
    well: &DoubleWell,
    profile: &ProfileTable,
    sigma: &BoundaryDensity,
    state: &PhaseState,
    field: &CalibrationField,
) -> Result<RelativeEnergy> {
    if fmath::abs(state.time - field.time) > 1e-9 * (1.0 + fmath::abs(state.time)) {
        return Err(CoreError::Precondition("state and calibration field times differ"));
    }
    let eps = state.eps;
    let cos_alpha = fmath::cos(field.cfg.alpha);
    let mut out = RelativeEnergy {
        c_quad: f64::INFINITY,
        ..Default::default()
    };
    for t in &sys.mesh.triangles {
        let (i, j, k) = (t[0] as usize, t[1] as usize, t[2] as usize);
        let (a, b, c) = (sys.mesh.nodes[i], sys.mesh.nodes[j], sys.mesh.nodes[k]);
        let area = 0.5 * (b - a).cross(c - a);
        let w_q = area / 3.0;
        let grad = ((c - b).rot_ccw() * state.u[i]
            + (a - c).rot_ccw() * state.u[j]
            + (b - a).rot_ccw() * state.u[k])
            / (2.0 * area);
        let g2 = grad.norm_sq();
        let gn = fmath::sqrt(g2);
        let n_eps = phase_normal(grad);
        for (p, q) in [(i, j), (j, k), (k, i)] {
            let x_q = (sys.mesh.nodes[p] + sys.mesh.nodes[q]) * 0.5;
            let u_q = 0.5 * (state.u[p] + state.u[q]);
            let s2w = well.sqrt_2w(u_q);
            let grad_psi_n = s2w * gn;
            let v = field.eval(x_q)?;
            let equi = 0.5 * (fmath::sqrt(eps) * gn - s2w / fmath::sqrt(eps))
                * (fmath::sqrt(eps) * gn - s2w / fmath::sqrt(eps));
            let tilt = (1.0 - n_eps.dot(v.xi)) * grad_psi_n;
            out.equipartition += w_q * equi;
            out.tilt += w_q * tilt;
            out.value += w_q * (0.5 * eps * g2 + well.eval(u_q) / eps - s2w * grad.dot(v.xi));
            let d = field.dist_interface(x_q);
            let w2 = (d * d).min(1.0);
            out.weighted_psi += w_q * w2 * grad_psi_n;
            let tilt_sq = (n_eps - v.xi).norm_sq();
            out.tilt_sq_psi += w_q * tilt_sq * grad_psi_n;
            out.tilt_sq_diffuse += w_q * tilt_sq * eps * g2;
            out.weighted_diffuse += w_q * w2 * eps * g2;
            if w2 >= 1e-6 {
                out.c_quad = out.c_quad.min((1.0 - v.xi.norm()) / w2);
            }
        }
    }
    for i in 0..sys.n_nodes() {
        let mb = sys.ops.boundary_mass_lumped[i];
        if mb > 0.0 {
            out.boundary += mb * (sigma.eval(state.u[i]) - cos_alpha * profile.psi.eval(state.u[i]));
        }
    }
    out.value += out.boundary;
    out.alt = out.equipartition + out.tilt + out.boundary;
    Ok(out)
}

/// Bulk error `int (psi_eps - c0 chi) theta`, the plain L1 distance and
/// their coercivity ratio `l1^2 / bulk`.
#[derive(Debug, Clone, Copy, Default)]
pub struct BulkError {
    pub value: f64,
    pub l1: f64,
    pub l1_sq_over_bulk: f64,
}

pub fn bulk_error(
    sys: &FemSystem,
    profile: &ProfileTable,
    state: &PhaseState,
    field: &CalibrationField,
) -> Result<BulkError> {
    let c0 = profile.c0();
    let mut out = BulkError::default();
    for t in &sys.mesh.triangles {
        let (i, j, k) = (t[0] as usize, t[1] as usize, t[2] as usize);
        let (a, b, c) = (sys.mesh.nodes[i], sys.mesh.nodes[j], sys.mesh.nodes[k]);
        let area = 0.5 * (b - a).cross(c - a);
        let w_q = area / 3.0;
        for (p, q) in [(i, j), (j, k), (k, i)] {
            let x_q = (sys.mesh.nodes[p] + sys.mesh.nodes[q]) * 0.5;
            let u_q = 0.5 * (state.u[p] + state.u[q]);
            let psi_q = profile.psi.eval(u_q);
            let chi = if field.in_phase_a(x_q) { 1.0 } else { 0.0 };
            let diff = psi_q - c0 * chi;
            let theta = field.eval(x_q)?.theta;
            out.value += w_q * diff * theta;
            out.l1 += w_q * fmath::abs(diff);
        }
    }
    out.l1_sq_over_bulk = if out.value > 1e-300 {
        out.l1 * out.l1 / out.value
    } else {
        0.0
    };
    Ok(out)
}

/// Plain L1 distance between `psi(u)` and `c0 chi` against a reference
/// curve's phase indicator (no calibration field needed).
pub fn l1_phase_error(
    sys: &FemSystem,
    profile: &ProfileTable,
    state: &PhaseState,
    ext: &crate::initial_data::ExtendedDistance,
) -> f64 {
    let c0 = profile.c0();
    let mut l1 = 0.0;
    for t in &sys.mesh.triangles {
        let (i, j, k) = (t[0] as usize, t[1] as usize, t[2] as usize);
        let (a, b, c) = (sys.mesh.nodes[i], sys.mesh.nodes[j], sys.mesh.nodes[k]);
        let area = 0.5 * (b - a).cross(c - a);
        let w_q = area / 3.0;
        for (p, q) in [(i, j), (j, k), (k, i)] {
            let x_q = (sys.mesh.nodes[p] + sys.mesh.nodes[q]) * 0.5;
            let u_q = 0.5 * (state.u[p] + state.u[q]);
            let chi = if ext.eval(x_q) > 0.0 { 1.0 } else { 0.0 };
            l1 += w_q * fmath::abs(profile.psi.eval(u_q) - c0 * chi);
        }
    }
    l1
}

/// The two squared dissipation integrands of the stability estimate,
/// `D1 = int (1/eps)(H_eps + (div xi) sqrt(2W))^2` and
/// `D2 = int (1/eps)(H_eps - (B . xi) eps |grad u|)^2` (monitoring only).
pub fn dissipation_diagnostics(
    sys: &FemSystem,
    well: &DoubleWell,
    sigma: &BoundaryDensity,
    state: &PhaseState,
    field: &CalibrationField,
) -> Result<(f64, f64)> {
    let eps = state.eps;
    let h_eps = phase_descriptors(sys, well, sigma, state);
    let h = field.cfg.h_fd;
    let (mut d1, mut d2) = (0.0, 0.0);
    for t in &sys.mesh.triangles {
        let (i, j, k) = (t[0] as usize, t[1] as usize, t[2] as usize);
        let (a, b, c) = (sys.mesh.nodes[i], sys.mesh.nodes[j], sys.mesh.nodes[k]);
        let area = 0.5 * (b - a).cross(c - a);
        let w_q = area / 3.0;
        let grad = ((c - b).rot_ccw() * state.u[i]
            + (a - c).rot_ccw() * state.u[j]
            + (b - a).rot_ccw() * state.u[k])
            / (2.0 * area);
        let gn = grad.norm();
        for (p, q) in [(i, j), (j, k), (k, i)] {
            let x_q = (sys.mesh.nodes[p] + sys.mesh.nodes[q]) * 0.5;
            let u_q = 0.5 * (state.u[p] + state.u[q]);
            let h_q = 0.5 * (h_eps[p] + h_eps[q]);
            let v = field.eval(x_q)?;
            // second-order divergence: enough for a monitoring quantity
            let xp = field.eval(x_q + Vec2::new(h, 0.0))?.xi;
            let xm = field.eval(x_q - Vec2::new(h, 0.0))?.xi;
            let yp = field.eval(x_q + Vec2::new(0.0, h))?.xi;
            let ym = field.eval(x_q - Vec2::new(0.0, h))?.xi;
            let div_xi = (xp.x - xm.x + yp.y - ym.y) / (2.0 * h);
            let t1 = h_q + div_xi * well.sqrt_2w(u_q);
            let t2 = h_q - v.b.dot(v.xi) * eps * gn;
            d1 += w_q * t1 * t1 / eps;
            d2 += w_q * t2 * t2 / eps;
        }
    }
    Ok((d1, d2))
}

/// Least-squares slope and intercept of `ln y` against `ln x`.
pub fn fit_loglog(xs: &[f64], ys: &[f64]) -> (f64, f64) {
    assert!(xs.len() == ys.len() && xs.len() >= 2);
    let n = xs.len() as f64;
    let (mut sx, mut sy, mut sxx, mut sxy) = (0.0, 0.0, 0.0, 0.0);
    for (&x, &y) in xs.iter().zip(ys) {
        let lx = fmath::ln(x.max(1e-300));
        let ly = fmath::ln(y.max(1e-300));
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    let slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    let intercept = (sy - slope * sx) / n;
    (slope, intercept)
}

/// Gronwall witness: the smallest exponent bounding growth of the series
/// relative to its initial value, `max_t ln((E(t)+f)/(E(0)+f)) / t`.
pub fn gronwall_exponent(times: &[f64], values: &[f64], floor: f64) -> f64 {
    let base = values[0] + floor;
    let mut c_hat = f64::NEG_INFINITY;
    for (&t, &v) in times.iter().zip(values).skip(1) {
        if t > 1e-14 {
            c_hat = c_hat.max(fmath::ln((v + floor) / base) / t);
        }
    }
    c_hat
}
