//! Property tests for the geometric kernel.

use contactflow_core::calibration::cutoffs::{weight_profile, zeta, zeta_tilde};
use contactflow_core::geometry::{project_to_boundary, DomainBoundary, Projection, SplinedCurve};
use contactflow_core::sharp_mcf::arc_chord_curve;
use contactflow_core::vec2::Vec2;
use proptest::prelude::*;

proptest! {
    #[test]
    fn boundary_projection_idempotent_and_signed(x in -1.5f64..1.5, y in -1.5f64..1.5, a in 1.0f64..1.4) {
        let el = DomainBoundary::Ellipse { a, b: 1.0 };
        let p = Vec2::new(x, y);
        // keep away from the medial axis where the projection is ambiguous
        prop_assume!(p.norm() > 0.55 * a);
        let (theta, s) = project_to_boundary(&el, p).unwrap();
        let foot = el.position(theta);
        prop_assert!((p.dist(foot) - s.abs()).abs() < 1e-9);
        let (_, s_foot) = project_to_boundary(&el, foot).unwrap();
        prop_assert!(s_foot.abs() < 1e-9);
        // sign convention: positive strictly inside
        let inside = (p.x / a) * (p.x / a) + p.y * p.y < 1.0;
        if s.abs() > 1e-9 {
            prop_assert_eq!(s > 0.0, inside);
        }
    }

    #[test]
    fn interface_projection_unit_gradient(frac in 0.15f64..0.85, off in -0.15f64..0.15) {
        let curve = arc_chord_curve(core::f64::consts::FRAC_PI_2, 1.25, 161);
        let spl = SplinedCurve::new(&curve);
        let fr = spl.frame_at_arc(spl.total_arc() * frac);
        let x = fr.point + fr.normal * off;
        match spl.project(x) {
            Projection::Interior { dist, .. } => {
                prop_assert!((dist - off).abs() < 1e-6);
                let d = 1e-4;
                let sd = |p: Vec2| match spl.project(p) {
                    Projection::Interior { dist, .. } => dist,
                    Projection::Endpoint { dist, .. } => dist,
                };
                let g = (sd(x + fr.normal * d) - sd(x - fr.normal * d)) / (2.0 * d);
                prop_assert!((g - 1.0).abs() < 5e-3);
            }
            Projection::Endpoint { .. } => prop_assert!(false, "interior point fell off the curve"),
        }
    }

    #[test]
    fn cutoffs_stay_in_range(s in -3.0f64..3.0) {
        prop_assert!((0.0..=1.0).contains(&zeta(s)));
        prop_assert!((0.0..=1.0).contains(&zeta_tilde(s)));
        prop_assert!((-1.0..=1.0).contains(&weight_profile(s)));
        // supports
        if s.abs() >= 1.0 { prop_assert_eq!(zeta(s), 0.0); }
        if s.abs() >= core::f64::consts::SQRT_2 { prop_assert_eq!(zeta_tilde(s), 0.0); }
        if s.abs() <= 1.0 { prop_assert_eq!(zeta_tilde(s), 1.0); }
    }
}
