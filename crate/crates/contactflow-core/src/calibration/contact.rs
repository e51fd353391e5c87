//! Local normal/velocity candidates at a contact point.
//!
//! In the interface tube the candidates are built from the interface frame
//! with a constant tilt coefficient `beta_i` and a quadratic length
//! correction; in the boundary tube from the rotated boundary frame with
//! coefficient `beta_b`. The velocity candidates carry tangential parts with
//! coefficients `gamma`, `rho` chosen so both gradients are skew on their
//! feature and the two candidates agree to first order at the contact point.

use crate::error::{CoreError, Result};
use crate::fmath;
use crate::geometry::{project_to_boundary, DomainBoundary, Frame, SplinedCurve};
use crate::vec2::{Mat2, Vec2};
use alloc::vec::Vec;

/// Per-contact-point geometric data and calibration coefficients.
#[derive(Debug, Clone)]
pub struct ContactFrame {
    /// 0 = curve start, 1 = curve end.
    pub endpoint: usize,
    pub p: Vec2,
    /// Interface frame at the contact point.
    pub interface: Frame,
    /// `tau_I . grad H` at the contact point (arclength derivative).
    pub dh_ds: f64,
    /// Boundary frame at the contact point.
    pub boundary: Frame,
    pub boundary_theta: f64,
    /// Rotation with `R n_b = n_I` (hence `R tau_b = tau_I`).
    pub rot: Mat2,
    pub dpdt: Vec2,
    pub beta_i: f64,
    pub beta_b: f64,
    /// `gamma_I` at the contact point (`dpdt . tau_I`).
    pub gamma_i0: f64,
    /// `gamma_b` (space-independent along the boundary).
    pub gamma_b: f64,
    /// `rho_I` at the contact point.
    pub rho_i0: f64,
    /// `rho_b` at the contact point (`-gamma_b H_b`).
    pub rho_b0: f64,
    /// Arclength of the contact point (0 or the total length).
    pub s_end: f64,
}

/// Coefficient tables along the curve for one contact point:
/// `gamma_I(s) = gamma_I(s_end) + int_{s_end}^{s} H^2`, sampled densely and
/// interpolated with a cubic Hermite (the derivative `H^2` is known).
#[derive(Debug, Clone)]
pub struct GammaTable {
    s0: f64,
    ds: f64,
    vals: Vec<f64>,
    derivs: Vec<f64>,
}

impl GammaTable {
    fn build(curve: &SplinedCurve, gamma_at: f64, s_end: f64) -> GammaTable {
        let l = curve.total_arc();
        let n = 16 * 64;
        let ds = l / n as f64;
        // cumulative integral of H^2 by Simpson over interval pairs
        let mut derivs = Vec::with_capacity(n + 1);
        for k in 0..=n {
            let h = curve.frame_at_arc(ds * k as f64).curvature;
            derivs.push(h * h);
        }
        let mut cum = Vec::with_capacity(n + 1);
        cum.push(0.0);
        for k in 1..=n {
            let s_prev = ds * (k - 1) as f64;
            let mid = {
                let h = curve.frame_at_arc(s_prev + 0.5 * ds).curvature;
                h * h
            };
            let last = *cum.last().unwrap();
            cum.push(last + ds / 6.0 * (derivs[k - 1] + 4.0 * mid + derivs[k]));
        }
        let at_end = {
            let t = (s_end / ds).clamp(0.0, n as f64);
            let k = (t as usize).min(n - 1);
            let frac = t - k as f64;
            cum[k] * (1.0 - frac) + cum[k + 1] * frac
        };
        let vals = cum.iter().map(|c| gamma_at + c - at_end).collect();
        GammaTable {
            s0: 0.0,
            ds,
            vals,
            derivs,
        }
    }

    /// `gamma_I` at arclength `s` (clamped to the table).
    pub fn eval(&self, s: f64) -> f64 {
        let t = ((s - self.s0) / self.ds).clamp(0.0, (self.vals.len() - 1) as f64);
        let k = (t as usize).min(self.vals.len() - 2);
        let u = t - k as f64;
        let (v0, v1) = (self.vals[k], self.vals[k + 1]);
        let (d0, d1) = (self.derivs[k] * self.ds, self.derivs[k + 1] * self.ds);
        let u2 = u * u;
        let u3 = u2 * u;
        v0 * (2.0 * u3 - 3.0 * u2 + 1.0)
            + d0 * (u3 - 2.0 * u2 + u)
            + v1 * (-2.0 * u3 + 3.0 * u2)
            + d1 * (u3 - u2)
    }
}

/// Build the contact frame at one endpoint; requires the discrete angle
/// condition to hold within `tol_angle`.
pub fn build_contact_frame(
    curve: &SplinedCurve,
    domain: &DomainBoundary,
    alpha: f64,
    endpoint: usize,
    tol_angle: f64,
) -> Result<ContactFrame> {
    let s_end = if endpoint == 0 { 0.0 } else { curve.total_arc() };
    let fi = curve.frame_at_arc(s_end);
    let (theta, _) = project_to_boundary(domain, fi.point)?;
    let fb = domain.frame(theta);
    let cos_defect = fi.normal.dot(fb.normal) - fmath::cos(alpha);
    if fmath::abs(cos_defect) > tol_angle {
        return Err(CoreError::Precondition(
            "contact angle condition violated at the endpoint",
        ));
    }
    let denom = fb.normal.dot(fi.tangent);
    if fmath::abs(denom) < 1e-6 {
        return Err(CoreError::DegenerateAngle { dot: denom });
    }
    let dh_ds = curve.curvature_deriv_at_arc(s_end);
    let beta_b = (-fi.curvature + fb.curvature * fb.tangent.dot(fi.tangent)) / denom;
    let beta_i = -fb.curvature * fb.tangent.dot(fi.normal) + beta_b * fb.normal.dot(fi.normal);
    let tb_ni = fb.tangent.dot(fi.normal);
    if fmath::abs(tb_ni) < 1e-6 {
        return Err(CoreError::DegenerateAngle { dot: tb_ni });
    }
    let dpdt = fb.tangent * (fi.curvature / tb_ni);
    let gamma_i0 = dpdt.dot(fi.tangent);
    let gamma_b = dpdt.dot(fb.tangent);
    let rho_i0 = -dh_ds - gamma_i0 * fi.curvature;
    let rho_b0 = -gamma_b * fb.curvature;
    let angle = fmath::atan2(fb.normal.cross(fi.normal), fb.normal.dot(fi.normal));
    let rot = Mat2::rotation(angle);
    Ok(ContactFrame {
        endpoint,
        p: fi.point,
        interface: fi,
        dh_ds,
        boundary: fb,
        boundary_theta: theta,
        rot,
        dpdt,
        beta_i,
        beta_b,
        gamma_i0,
        gamma_b,
        rho_i0,
        rho_b0,
        s_end,
    })
}

pub fn build_gamma_table(curve: &SplinedCurve, frame: &ContactFrame) -> GammaTable {
    GammaTable::build(curve, frame.gamma_i0, frame.s_end)
}

/// Interface-tube candidate
/// `xi = n + s beta tau - (s beta)^2 / 2 n` at `x`, frames evaluated at the
/// (tangent-extended) projection.
pub fn xi_interface_tilde(curve: &SplinedCurve, frame: &ContactFrame, x: Vec2) -> Vec2 {
    let (s_arc, s_i) = curve.project_extended(x);
    let fr = curve.frame_at_arc_extended(s_arc);
    let sb = s_i * frame.beta_i;
    fr.normal + fr.tangent * sb - fr.normal * (0.5 * sb * sb)
}

/// Boundary-tube candidate `xi = R [n_b + s beta tau_b - (s beta)^2/2 n_b]`.
pub fn xi_boundary_tilde(
    domain: &DomainBoundary,
    frame: &ContactFrame,
    x: Vec2,
) -> Result<Vec2> {
    let (theta, s_b) = project_to_boundary(domain, x)?;
    let fb = domain.frame(theta);
    let sb = s_b * frame.beta_b;
    let v = fb.normal + fb.tangent * sb - fb.normal * (0.5 * sb * sb);
    Ok(frame.rot.apply(v))
}

/// Interface-tube velocity candidate `B = H n + (gamma + s rho) tau`.
pub fn b_interface_tilde(curve: &SplinedCurve, gamma: &GammaTable, x: Vec2) -> Vec2 {
    let (s_arc, s_i) = curve.project_extended(x);
    let l = curve.total_arc();
    let s_clamped = s_arc.clamp(0.0, l);
    let fr = curve.frame_at_arc_extended(s_arc);
    let g = gamma.eval(s_clamped);
    // the pointwise spline derivative keeps the gradient of this candidate
    // antisymmetric on the interface under differentiation
    let dh = curve.curvature_deriv_pointwise(s_clamped);
    let rho = -dh - g * fr.curvature;
    fr.normal * fr.curvature + fr.tangent * (g + s_i * rho)
}

/// Boundary-tube velocity candidate `B = (gamma_b + s rho_b) tau_b` with
/// `rho_b = -gamma_b H_b` at the projection.
pub fn b_boundary_tilde(domain: &DomainBoundary, frame: &ContactFrame, x: Vec2) -> Result<Vec2> {
    let (theta, s_b) = project_to_boundary(domain, x)?;
    let fb = domain.frame(theta);
    let rho_b = -frame.gamma_b * fb.curvature;
    Ok(fb.tangent * (frame.gamma_b + s_b * rho_b))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::InterfaceCurve;
    use approx::assert_abs_diff_eq;
    use core::f64::consts::{FRAC_PI_2, FRAC_PI_3};

    fn diameter(n: usize) -> SplinedCurve {
        let nodes = (0..n)
            .map(|k| Vec2::new(-1.0 + 2.0 * k as f64 / (n - 1) as f64, 0.0))
            .collect();
        SplinedCurve::new(&InterfaceCurve::new(nodes, 0.0))
    }

    #[test]
    fn diameter_contact_coefficients() {
        // stationary diameter at p = (1, 0), alpha = pi/2:
        // beta_i = -H_b = -1, beta_b = -H_I = 0, gammas and rhos vanish
        let disk = DomainBoundary::unit_disk();
        let c = diameter(81);
        let f = build_contact_frame(&c, &disk, FRAC_PI_2, 1, 1e-6).unwrap();
        assert_abs_diff_eq!(f.beta_i, -1.0, epsilon = 1e-6);
        assert!(fmath::abs(f.beta_b) < 1e-6);
        assert!(f.dpdt.norm() < 1e-8);
        assert!(fmath::abs(f.gamma_i0) < 1e-8);
        assert!(fmath::abs(f.gamma_b) < 1e-8);
        assert!(fmath::abs(f.rho_i0) < 1e-6);
        assert!(fmath::abs(f.rho_b0) < 1e-8);
    }

    #[test]
    fn rotation_aligns_frames() {
        let disk = DomainBoundary::unit_disk();
        let c = crate::sharp_mcf::arc_chord_curve(FRAC_PI_3, 1.3, 161);
        let spl = SplinedCurve::new(&c);
        for e in [0, 1] {
            let f = build_contact_frame(&spl, &disk, FRAC_PI_3, e, 1e-3).unwrap();
            assert!((f.rot.apply(f.boundary.normal) - f.interface.normal).norm() < 1e-10);
            assert!((f.rot.apply(f.boundary.tangent) - f.interface.tangent).norm() < 1e-10);
        }
    }

    #[test]
    fn rho_gap_matches_compatibility_residual() {
        // (rho_b - rho_i) (n_b . tau_I) equals the third-order compatibility
        // residual up to sign
        let disk = DomainBoundary::unit_disk();
        let c = crate::sharp_mcf::arc_chord_curve(FRAC_PI_3, 1.3, 161);
        let spl = SplinedCurve::new(&c);
        for e in [0, 1] {
            let f = build_contact_frame(&spl, &disk, FRAC_PI_3, e, 1e-3).unwrap();
            let gap = (f.rho_b0 - f.rho_i0) * f.boundary.normal.dot(f.interface.tangent);
            let res = crate::sharp_mcf::check_third_order_compat(&spl, &disk, e).unwrap();
            assert_abs_diff_eq!(fmath::abs(gap), res, epsilon = 1e-9 * (1.0 + res));
        }
    }

    #[test]
    fn gamma_table_closed_form_on_circle_arc() {
        // constant curvature 1/R: gamma(s) = gamma0 + s / R^2 measured from
        // the start contact point
        let alpha = FRAC_PI_2;
        let c = crate::sharp_mcf::arc_chord_curve(alpha, 1.25, 201);
        let disk = DomainBoundary::unit_disk();
        let spl = SplinedCurve::new(&c);
        let f = build_contact_frame(&spl, &disk, alpha, 0, 1e-3).unwrap();
        let table = build_gamma_table(&spl, &f);
        let h = spl.frame_at_arc(0.5 * spl.total_arc()).curvature;
        for frac in [0.25, 0.5, 0.75] {
            let s = spl.total_arc() * frac;
            let expect = f.gamma_i0 + s * h * h;
            assert_abs_diff_eq!(table.eval(s), expect, epsilon = 3e-4 * (1.0 + expect.abs()));
        }
        // zero-curvature curve: gamma constant
        let d = diameter(81);
        let fd = build_contact_frame(&d, &disk, FRAC_PI_2, 0, 1e-6).unwrap();
        let td = build_gamma_table(&d, &fd);
        for s in [0.0, 0.7, 1.9] {
            assert_abs_diff_eq!(td.eval(s), fd.gamma_i0, epsilon = 1e-10);
        }
    }

    #[test]
    fn candidate_values_on_features() {
        let disk = DomainBoundary::unit_disk();
        let alpha = FRAC_PI_3;
        let c = crate::sharp_mcf::arc_chord_curve(alpha, 1.3, 201);
        let spl = SplinedCurve::new(&c);
        let f = build_contact_frame(&spl, &disk, alpha, 1, 1e-3).unwrap();
        let gam = build_gamma_table(&spl, &f);
        // on the interface: xi = n_I, B . n_I = H
        let s = spl.total_arc() * 0.9;
        let fr = spl.frame_at_arc(s);
        let xi = xi_interface_tilde(&spl, &f, fr.point);
        assert!((xi - fr.normal).norm() < 1e-9);
        let b = b_interface_tilde(&spl, &gam, fr.point);
        assert_abs_diff_eq!(b.dot(fr.normal), fr.curvature, epsilon = 1e-9);
        // on the boundary: xi . n_b = cos(alpha), B . n_b = 0, |xi| = 1
        let th = f.boundary_theta + 0.05;
        let q = disk.position(th);
        let xi_b = xi_boundary_tilde(&disk, &f, q).unwrap();
        let nb = disk.frame(th).normal;
        assert_abs_diff_eq!(xi_b.dot(nb), fmath::cos(alpha), epsilon = 1e-7);
        assert_abs_diff_eq!(xi_b.norm(), 1.0, epsilon = 1e-12);
        let bb = b_boundary_tilde(&disk, &f, q).unwrap();
        assert!(fmath::abs(bb.dot(nb)) < 1e-12);
        // unit-length defect off the interface: direct evaluation of the
        // candidate gives |xi|^2 = (1 - (beta s)^2/2)^2 + (beta s)^2
        //                        = 1 + (beta s)^4 / 4
        let x = fr.point + fr.normal * 0.07;
        let xi_off = xi_interface_tilde(&spl, &f, x);
        let sb = 0.07 * f.beta_i;
        assert_abs_diff_eq!(
            xi_off.norm_sq(),
            1.0 + 0.25 * sb * sb * sb * sb,
            epsilon = 1e-10
        );
        // candidates agree at the contact point
        let xi_i = xi_interface_tilde(&spl, &f, f.p);
        let xi_b = xi_boundary_tilde(&disk, &f, f.p).unwrap();
        assert!((xi_i - xi_b).norm() < 1e-8);
        let b_i = b_interface_tilde(&spl, &gam, f.p);
        let b_b = b_boundary_tilde(&disk, &f, f.p).unwrap();
        assert!((b_i - f.dpdt).norm() < 1e-8);
        assert!((b_b - f.dpdt).norm() < 1e-8);
    }
}
