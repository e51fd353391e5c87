//! Wedge decomposition of a ball around a contact point and the
//! interpolation weight on the two blending wedges.
//!
//! Five sectors: the interface cone `W_I` around the departing interface
//! direction, a double wedge `W_B` around the boundary tangent line, two
//! interpolation wedges between them inside the domain, and an outer wedge
//! beyond the boundary. Cone half-angles are a quarter of the angular gaps
//! between the interface direction and the two boundary rays; the outer
//! margin of the double wedge is a quarter of the smaller gap.

use crate::calibration::cutoffs::{smoothstep, smoothstep_d1};
use crate::error::{CoreError, Result};
use crate::fmath;
use crate::vec2::Vec2;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Sector {
    Interface,
    Boundary,
    /// Interpolation wedge; `a_side` is true when the wedge lies in phase A.
    Interp { first: bool, a_side: bool },
    Outer,
}

/// Time-frozen cone geometry at one contact point. The half-angle layout is
/// resolved once (at the reference snapshot) and reused for the probe
/// snapshot; only the axis directions evolve.
#[derive(Debug, Clone)]
pub struct WedgeDecomposition {
    pub p: Vec2,
    /// Boundary tangent at `p` (the angular reference axis).
    pub tau_b: Vec2,
    /// Inward boundary normal at `p`.
    pub n_b: Vec2,
    /// Relative angle of the interface departure direction, in `(0, pi)`.
    pub psi_i: f64,
    /// Quarter gaps on the two sides of the interface direction.
    pub q1: f64,
    pub q2: f64,
    /// Exterior angular margin of the boundary double wedge.
    pub w_ext: f64,
    /// Classification radius (the contact-field domain).
    pub radius: f64,
    /// Phase-A flags of the two interpolation wedges.
    pub first_is_a: bool,
}

/// Frozen angular layout shared by the snapshot pair.
#[derive(Debug, Clone, Copy)]
pub struct WedgeAngles {
    pub psi_i: f64,
    pub q1: f64,
    pub q2: f64,
    pub w_ext: f64,
}

impl WedgeDecomposition {
    /// Build from the contact frames. `d_i` is the unit interface direction
    /// at `p` pointing into the domain, `n_i` the interface normal (into
    /// phase A). When `frozen` is given, its angular layout is reused.
    pub fn new(
        p: Vec2,
        tau_b: Vec2,
        n_b: Vec2,
        d_i: Vec2,
        n_i: Vec2,
        radius: f64,
        frozen: Option<WedgeAngles>,
    ) -> Result<WedgeDecomposition> {
        let psi_now = fmath::atan2(d_i.dot(n_b), d_i.dot(tau_b));
        if !(psi_now > 1e-6 && psi_now < core::f64::consts::PI - 1e-6) {
            return Err(CoreError::DegenerateAngle { dot: d_i.dot(n_b) });
        }
        let (psi_i, q1, q2, w_ext) = match frozen {
            Some(a) => (a.psi_i, a.q1, a.q2, a.w_ext),
            None => {
                let g1 = psi_now;
                let g2 = core::f64::consts::PI - psi_now;
                (psi_now, 0.25 * g1, 0.25 * g2, 0.25 * g1.min(g2))
            }
        };
        // phase-A side of the first interpolation wedge (between the +tau_b
        // ray and the interface cone): its mid direction against n_i
        let mid1 = 0.5 * (q1 + (psi_i - q1));
        let u1 = tau_b * fmath::cos(mid1) + n_b * fmath::sin(mid1);
        Ok(WedgeDecomposition {
            p,
            tau_b,
            n_b,
            psi_i,
            q1,
            q2,
            w_ext,
            radius,
            first_is_a: u1.dot(n_i) > 0.0,
        })
    }

    pub fn angles(&self) -> WedgeAngles {
        WedgeAngles {
            psi_i: self.psi_i,
            q1: self.q1,
            q2: self.q2,
            w_ext: self.w_ext,
        }
    }

    /// Relative angle of `x - p` in `[0, 2 pi)` measured from `tau_b`
    /// counter-clockwise (interior side is `(0, pi)`).
    pub fn relative_angle(&self, x: Vec2) -> f64 {
        let v = x - self.p;
        let ang = fmath::atan2(v.dot(self.n_b), v.dot(self.tau_b));
        if ang < 0.0 {
            ang + 2.0 * core::f64::consts::PI
        } else {
            ang
        }
    }

    /// Sector containing `x` (valid for `0 < |x - p| <= radius`).
    pub fn classify(&self, x: Vec2) -> Sector {
        let pi = core::f64::consts::PI;
        let psi = self.relative_angle(x);
        let a1 = self.q1;
        let a2 = self.psi_i - self.q1;
        let a3 = self.psi_i + self.q2;
        let a4 = pi - self.q2;
        if psi >= a2 && psi <= a3 {
            Sector::Interface
        } else if psi > a1 && psi < a2 {
            Sector::Interp {
                first: true,
                a_side: self.first_is_a,
            }
        } else if psi > a3 && psi < a4 {
            Sector::Interp {
                first: false,
                a_side: !self.first_is_a,
            }
        } else if psi <= a1 || psi >= 2.0 * pi - self.w_ext || (psi >= a4 && psi <= pi + self.w_ext) {
            Sector::Boundary
        } else {
            Sector::Outer
        }
    }

    /// Interpolation weight on a blending wedge: 1 on the interface-cone
    /// edge, 0 on the boundary-wedge edge, quintic in the angle. Returns the
    /// weight and its spatial gradient. Errors at the vertex.
    pub fn lambda(&self, x: Vec2) -> Result<(f64, Vec2)> {
        let v = x - self.p;
        let r2 = v.norm_sq();
        if r2 < 1e-28 {
            return Err(CoreError::UndefinedAtVertex);
        }
        let pi = core::f64::consts::PI;
        let psi = self.relative_angle(x);
        let a1 = self.q1;
        let a2 = self.psi_i - self.q1;
        let a3 = self.psi_i + self.q2;
        let a4 = pi - self.q2;
        // grad of the angular coordinate
        let grad_psi = v.rot_ccw() / r2;
        if psi >= a1 && psi <= a2 {
            let w = a2 - a1;
            let s = (psi - a1) / w;
            Ok((smoothstep(s), grad_psi * (smoothstep_d1(s) / w)))
        } else if psi >= a3 && psi <= a4 {
            let w = a4 - a3;
            let s = (a4 - psi) / w;
            Ok((smoothstep(s), grad_psi * (-smoothstep_d1(s) / w)))
        } else if psi > a2 && psi < a3 {
            Ok((1.0, Vec2::ZERO))
        } else {
            Ok((0.0, Vec2::ZERO))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use core::f64::consts::{FRAC_PI_2, PI};

    fn right_angle_wedges() -> WedgeDecomposition {
        // contact at (1, 0) of the unit disk, diameter along the x-axis with
        // phase A above: tau_b = (0,1), n_b = (-1,0), interface departs
        // along -x, n_i = (0,1)
        WedgeDecomposition::new(
            Vec2::new(1.0, 0.0),
            Vec2::new(0.0, 1.0),
            Vec2::new(-1.0, 0.0),
            Vec2::new(-1.0, 0.0),
            Vec2::new(0.0, 1.0),
            0.25,
            None,
        )
        .unwrap()
    }

    #[test]
    fn sectors_cover_and_classify() {
        let w = right_angle_wedges();
        assert_abs_diff_eq!(w.psi_i, FRAC_PI_2, epsilon = 1e-12);
        // interface direction is in the interface cone
        let x = w.p + Vec2::new(-0.1, 0.0);
        assert_eq!(w.classify(x), Sector::Interface);
        // boundary directions are in the double wedge
        for dir in [Vec2::new(0.0, 0.1), Vec2::new(0.0, -0.1)] {
            assert_eq!(w.classify(w.p + dir), Sector::Boundary);
        }
        // outward normal direction is in the outer wedge
        assert_eq!(w.classify(w.p + Vec2::new(0.1, 0.0)), Sector::Outer);
        // midway directions are interpolation wedges with the A side above
        let up = w.classify(w.p + Vec2::new(-0.07, 0.07));
        match up {
            Sector::Interp { a_side, .. } => assert!(a_side),
            s => panic!("expected interpolation wedge, got {s:?}"),
        }
        let down = w.classify(w.p + Vec2::new(-0.07, -0.07));
        match down {
            Sector::Interp { a_side, .. } => assert!(!a_side),
            s => panic!("expected interpolation wedge, got {s:?}"),
        }
    }

    #[test]
    fn lambda_endpoints_and_gradient_blowup() {
        let w = right_angle_wedges();
        // wedge edges: lambda = 1 at the interface cone edge, 0 at the
        // boundary wedge edge, gradient vanishing at both
        let a1 = w.q1;
        let a2 = w.psi_i - w.q1;
        for (ang, expect) in [(a1, 0.0), (a2, 1.0)] {
            let x = w.p + (w.tau_b * fmath::cos(ang) + w.n_b * fmath::sin(ang)) * 0.1;
            let (l, g) = w.lambda(x).unwrap();
            assert_abs_diff_eq!(l, expect, epsilon = 1e-12);
            assert!(g.norm() < 1e-10);
        }
        // |grad lambda| <= C / |x - p| with a stable constant over dyadic radii
        let mid = 0.5 * (a1 + a2);
        let dir = w.tau_b * fmath::cos(mid) + w.n_b * fmath::sin(mid);
        let mut consts = alloc::vec::Vec::new();
        for k in 0..4 {
            let r = 0.1 * fmath::powi(0.5, k);
            let (_, g) = w.lambda(w.p + dir * r).unwrap();
            consts.push(g.norm() * r);
        }
        for c in &consts {
            assert!((c - consts[0]).abs() < 1e-9 * (1.0 + consts[0]), "constant drifted: {consts:?}");
        }
        // gradient matches finite differences
        let x = w.p + dir * 0.08;
        let h = 1e-7;
        let l = |x: Vec2| w.lambda(x).unwrap().0;
        let fd = Vec2::new(
            (l(x + Vec2::new(h, 0.0)) - l(x - Vec2::new(h, 0.0))) / (2.0 * h),
            (l(x + Vec2::new(0.0, h)) - l(x - Vec2::new(0.0, h))) / (2.0 * h),
        );
        let (_, g) = w.lambda(x).unwrap();
        assert!((fd - g).norm() < 1e-6 * (1.0 + g.norm()));
    }

    #[test]
    fn vertex_is_rejected() {
        let w = right_angle_wedges();
        assert!(matches!(w.lambda(w.p), Err(CoreError::UndefinedAtVertex)));
    }

    #[test]
    fn closure_covers_ball() {
        let w = right_angle_wedges();
        // every direction classifies into some sector (no gaps): count
        // transitions around the circle
        let mut prev = w.classify(w.p + Vec2::new(0.1, 1e-6));
        let mut changes = 0;
        for k in 1..=4000 {
            let a = 2.0 * PI * k as f64 / 4000.0;
            let s = w.classify(w.p + Vec2::new(0.1 * fmath::cos(a), 0.1 * fmath::sin(a)));
            if s != prev {
                changes += 1;
                prev = s;
            }
        }
        assert!(changes >= 6 && changes <= 10, "unexpected sector layout: {changes} transitions");
    }
}
