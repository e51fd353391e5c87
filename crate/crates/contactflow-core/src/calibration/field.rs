//! Global calibration triple `(xi, B, theta)` glued from the local
//! constructions by a localization family, with an automatically resolved
//! scale hierarchy.
//!
//! The field is built from a pair of sharp-interface snapshots a short probe
//! interval apart; time derivatives are one-sided differences across the
//! pair at a fixed spatial point. All scale parameters are frozen from the
//! reference snapshot so the two snapshots share one localization geometry.

use crate::calibration::contact::{
    b_boundary_tilde, b_interface_tilde, build_contact_frame, build_gamma_table, xi_boundary_tilde,
    xi_interface_tilde, ContactFrame, GammaTable,
};
use crate::calibration::cutoffs;
use crate::calibration::wedges::{Sector, WedgeAngles, WedgeDecomposition};
use crate::error::{CoreError, Result};
use crate::fmath;
use crate::geometry::{project_to_boundary, tubular_radii, DomainBoundary, InterfaceCurve, SplinedCurve};
use crate::initial_data::ExtendedDistance;
use crate::vec2::Vec2;
use alloc::format;

/// Tunables of the construction; the defaults match the documented choices.
#[derive(Debug, Clone, Copy)]
pub struct CalibrationConfig {
    pub alpha: f64,
    /// Tolerance on the discrete contact-angle condition of the input curve.
    pub tol_angle: f64,
    /// Finite-difference step for internal normal derivatives.
    pub h_fd: f64,
    /// Upper bound for the tube-width fraction `delta`.
    pub delta_max: f64,
    /// Upper bound for the contact cutoff fraction `c_bar`.
    pub c_bar_max: f64,
}

impl CalibrationConfig {
    pub fn new(alpha: f64) -> CalibrationConfig {
        CalibrationConfig {
            alpha,
            tol_angle: 1e-3,
            h_fd: 1e-4,
            delta_max: 0.45,
            c_bar_max: 0.6,
        }
    }
}

/// Resolved localization scales.
#[derive(Debug, Clone)]
pub struct Scales {
    /// Wedge localization radius per contact point.
    pub r_p: [f64; 2],
    /// Contact-field radius per contact point (unit-length window holds).
    pub r_hat: [f64; 2],
    /// `min(r_hat_+, r_hat_-, dist(p_+, p_-) / 3)`.
    pub r_hat_min: f64,
    /// Gluing ball radius `r_hat_min / 2`.
    pub r_bar: f64,
    /// Interface tube fraction: interface cutoffs live on
    /// `|s_I| <~ delta_i r_bar`.
    pub delta_i: f64,
    /// Boundary tube fraction (usually smaller: the boundary curves into
    /// its own wedge and eats clearance at the gluing sphere).
    pub delta_b: f64,
    /// Contact cutoff fraction along the boundary.
    pub c_bar: f64,
    pub wedge_angles: [WedgeAngles; 2],
}

/// All per-snapshot geometry the evaluators need.
pub struct SnapshotFrame {
    pub curve: SplinedCurve,
    pub contacts: [ContactFrame; 2],
    pub wedges: [WedgeDecomposition; 2],
    pub gammas: [GammaTable; 2],
    pub ext: ExtendedDistance,
}

/// Value of the calibration triple at a point.
#[derive(Debug, Clone, Copy, Default)]
pub struct FieldValue {
    pub xi: Vec2,
    pub b: Vec2,
    pub theta: f64,
}

/// Localization weights at a point: `[interface, contact 0, contact 1,
/// boundary]`, plain and wide (tilde) families.
#[derive(Debug, Clone, Copy, Default)]
pub struct Weights {
    pub eta: [f64; 4],
    pub eta_tilde: [f64; 4],
}

/// Evaluator for the boundary-adapted triple built from a snapshot pair.
pub struct CalibrationField {
    pub domain: DomainBoundary,
    pub cfg: CalibrationConfig,
    pub scales: Scales,
    frames: [SnapshotFrame; 2],
    /// Probe interval; zero for a static build.
    pub dt_probe: f64,
    /// Snapshot time of the reference frame.
    pub time: f64,
}

fn interface_direction(frame: &ContactFrame) -> Vec2 {
    if frame.endpoint == 0 {
        frame.interface.tangent
    } else {
        -frame.interface.tangent
    }
}

fn build_snapshot(
    curve: &InterfaceCurve,
    domain: &DomainBoundary,
    cfg: &CalibrationConfig,
    scales: Option<&Scales>,
    fallback_r: f64,
) -> Result<SnapshotFrame> {
    let spl = SplinedCurve::new(curve);
    let c0 = build_contact_frame(&spl, domain, cfg.alpha, 0, cfg.tol_angle)?;
    let c1 = build_contact_frame(&spl, domain, cfg.alpha, 1, cfg.tol_angle)?;
    let mk_wedge = |cf: &ContactFrame, idx: usize| -> Result<WedgeDecomposition> {
        let (radius, frozen) = match scales {
            Some(s) => (s.r_hat[idx], Some(s.wedge_angles[idx])),
            None => (fallback_r, None),
        };
        WedgeDecomposition::new(
            cf.p,
            cf.boundary.tangent,
            cf.boundary.normal,
            interface_direction(cf),
            cf.interface.normal,
            radius,
            frozen,
        )
    };
    let w0 = mk_wedge(&c0, 0)?;
    let w1 = mk_wedge(&c1, 1)?;
    let g0 = build_gamma_table(&spl, &c0);
    let g1 = build_gamma_table(&spl, &c1);
    let r_ext = match scales {
        Some(s) => s.r_bar,
        None => fallback_r,
    };
    let ext = ExtendedDistance::new(curve, domain, r_ext)?;
    Ok(SnapshotFrame {
        curve: spl,
        contacts: [c0, c1],
        wedges: [w0, w1],
        gammas: [g0, g1],
        ext,
    })
}

impl SnapshotFrame {
    /// Contact-point candidate pair at `x`: wedge-selected, blended and
    /// normalized normal extension plus the velocity extension.
    pub fn contact_field(
        &self,
        c: usize,
        domain: &DomainBoundary,
        r_hat: f64,
        x: Vec2,
    ) -> Result<(Vec2, Vec2)> {
        let w = &self.wedges[c];
        let cf = &self.contacts[c];
        let sector = if x.dist(cf.p) < 1e-13 {
            Sector::Interface
        } else {
            w.classify(x)
        };
        let (xi_hat, b) = match sector {
            Sector::Interface => (
                xi_interface_tilde(&self.curve, cf, x),
                b_interface_tilde(&self.curve, &self.gammas[c], x),
            ),
            Sector::Boundary | Sector::Outer => (
                xi_boundary_tilde(domain, cf, x)?,
                b_boundary_tilde(domain, cf, x)?,
            ),
            Sector::Interp { .. } => {
                let (lam, _) = w.lambda(x)?;
                let xi_i = xi_interface_tilde(&self.curve, cf, x);
                let xi_b = xi_boundary_tilde(domain, cf, x)?;
                let b_i = b_interface_tilde(&self.curve, &self.gammas[c], x);
                let b_b = b_boundary_tilde(domain, cf, x)?;
                (xi_i * lam + xi_b * (1.0 - lam), b_i * lam + b_b * (1.0 - lam))
            }
        };
        let n2 = xi_hat.norm_sq();
        if !(0.25..=2.0).contains(&n2) {
            return Err(CoreError::RadiusTooLarge {
                r_hat,
                xi_norm_sq: n2,
            });
        }
        Ok((xi_hat * (1.0 / fmath::sqrt(n2)), b))
    }

    /// Tangential correction `gamma~(x)`: plateau-windowed tangential parts
    /// of the contact velocities.
    fn gamma_tilde(&self, domain: &DomainBoundary, r_hat_min: f64, r_hat: &[f64; 2], x: Vec2) -> Result<f64> {
        let mut acc = 0.0;
        for c in 0..2 {
            let d = x.dist(self.contacts[c].p);
            let t = cutoffs::plateau(d / r_hat_min);
            if t > 0.0 {
                let (s_arc, _) = self.curve.project_extended(x);
                let tau = self.curve.frame_at_arc_extended(s_arc).tangent;
                let (_, bc) = self.contact_field(c, domain, r_hat[c], x)?;
                acc += t * tau.dot(bc);
            }
        }
        Ok(acc)
    }

    /// Velocity extension in the interface tube:
    /// `B = H n + (gamma~ + rho~ s) tau` with
    /// `rho~ = -(n . grad) gamma~ - H gamma~ - tau . grad H`.
    pub fn b_bulk(
        &self,
        domain: &DomainBoundary,
        r_hat_min: f64,
        r_hat: &[f64; 2],
        h_fd: f64,
        x: Vec2,
    ) -> Result<Vec2> {
        let (s_arc, s_i) = self.curve.project_extended(x);
        let fr = self.curve.frame_at_arc_extended(s_arc);
        let s_cl = s_arc.clamp(0.0, self.curve.total_arc());
        let g0 = self.gamma_tilde(domain, r_hat_min, r_hat, x)?;
        let rho = if g0 == 0.0 && self.near_contacts(x, r_hat_min + 2.0 * h_fd).is_none() {
            // away from both contact windows the correction vanishes
            -self.curve.curvature_deriv_pointwise(s_cl)
        } else {
            let gp = self.gamma_tilde(domain, r_hat_min, r_hat, x + fr.normal * h_fd)?;
            let gm = self.gamma_tilde(domain, r_hat_min, r_hat, x - fr.normal * h_fd)?;
            -(gp - gm) / (2.0 * h_fd) - fr.curvature * g0 - self.curve.curvature_deriv_pointwise(s_cl)
        };
        Ok(fr.normal * fr.curvature + fr.tangent * (g0 + rho * s_i))
    }

    fn near_contacts(&self, x: Vec2, radius: f64) -> Option<usize> {
        (0..2).find(|&c| x.dist(self.contacts[c].p) <= radius)
    }
}

impl CalibrationField {
    /// Build from a snapshot and a probe snapshot `dt` later (`dt > 0`); the
    /// probe supplies the one-sided time derivatives.
    pub fn build(
        curve_t: &InterfaceCurve,
        curve_probe: &InterfaceCurve,
        domain: &DomainBoundary,
        cfg: CalibrationConfig,
    ) -> Result<CalibrationField> {
        let dt = curve_probe.time - curve_t.time;
        if dt < 0.0 {
            return Err(CoreError::Precondition("probe snapshot must not precede the reference"));
        }
        Self::build_inner(curve_t, curve_probe, domain, cfg, dt)
    }

    /// Build a static field from a single snapshot (time derivatives zero).
    pub fn build_static(
        curve: &InterfaceCurve,
        domain: &DomainBoundary,
        cfg: CalibrationConfig,
    ) -> Result<CalibrationField> {
        Self::build_inner(curve, curve, domain, cfg, 0.0)
    }

    fn build_inner(
        curve_t: &InterfaceCurve,
        curve_probe: &InterfaceCurve,
        domain: &DomainBoundary,
        cfg: CalibrationConfig,
        dt: f64,
    ) -> Result<CalibrationField> {
        let scales = resolve_scales(curve_t, curve_probe, domain, &cfg)?;
        let f0 = build_snapshot(curve_t, domain, &cfg, Some(&scales), 0.0)?;
        let f1 = build_snapshot(curve_probe, domain, &cfg, Some(&scales), 0.0)?;
        let mut field = CalibrationField {
            domain: *domain,
            cfg,
            scales,
            frames: [f0, f1],
            dt_probe: dt,
            time: curve_t.time,
        };
        // back off the tube fractions until the piecewise weight definitions
        // match across the gluing spheres; the boundary fraction is usually
        // the binding one (curvature sag), so shrink it first
        let mut tries = 0;
        while let Err(e) = field.validate_sphere_continuity() {
            tries += 1;
            if tries > 40 {
                return Err(e);
            }
            if tries % 3 == 0 {
                field.scales.delta_i *= 0.85;
            } else {
                field.scales.delta_b *= 0.85;
            }
        }
        Ok(field)
    }

    pub fn frame(&self, k: usize) -> &SnapshotFrame {
        &self.frames[k]
    }

    /// Localization weights of snapshot `k` at `x`. `ball_override` forces
    /// the in-ball/out-of-ball branch (used by the continuity validation).
    pub fn weights_at(&self, k: usize, x: Vec2, ball_override: Option<Option<usize>>) -> Result<Weights> {
        let f = &self.frames[k];
        let sc = &self.scales;
        let d_ri = sc.delta_i * sc.r_bar;
        let d_rb = sc.delta_b * sc.r_bar;
        let (theta_b, s_b) = project_to_boundary(&self.domain, x)?;
        let (s_arc, s_i) = f.curve.project_extended(x);
        let in_arc = (0.0..=f.curve.total_arc()).contains(&s_arc);
        let ball = match ball_override {
            Some(b) => b,
            None => f.near_contacts(x, sc.r_bar),
        };
        let zi = cutoffs::zeta(s_i / d_ri);
        let zi_t = cutoffs::zeta_tilde(s_i / d_ri);
        let zb = cutoffs::zeta(s_b / d_rb);
        let zb_t = cutoffs::zeta_tilde(s_b / d_rb);
        let mut w = Weights::default();
        match ball {
            None => {
                if in_arc {
                    w.eta[0] = zi;
                    w.eta_tilde[0] = zi_t;
                }
                w.eta[3] = zb;
                w.eta_tilde[3] = zb_t;
            }
            Some(c) => {
                let wd = &f.wedges[c];
                let pc = 1 + c;
                let foot = self.domain.position(theta_b);
                let dp = foot.dist(f.contacts[c].p);
                let zp = cutoffs::zeta(dp / (sc.c_bar * sc.r_bar));
                let zp_t = cutoffs::zeta_tilde(dp / (sc.c_bar * sc.r_bar));
                let sector = if x.dist(f.contacts[c].p) < 1e-13 {
                    Sector::Interface
                } else {
                    wd.classify(x)
                };
                match sector {
                    Sector::Interface => {
                        w.eta[0] = (1.0 - zb) * zi;
                        w.eta[pc] = zb * zi;
                        w.eta_tilde[0] = (1.0 - zb_t) * zi_t;
                        w.eta_tilde[pc] = zb_t * zi_t;
                    }
                    Sector::Boundary | Sector::Outer => {
                        w.eta[3] = (1.0 - zp) * zb;
                        w.eta[pc] = zp * zb;
                        w.eta_tilde[3] = (1.0 - zp_t) * zb_t;
                        w.eta_tilde[pc] = zp_t * zb_t;
                    }
                    Sector::Interp { .. } => {
                        let (lam, _) = wd.lambda(x)?;
                        w.eta[0] = lam * (1.0 - zb) * zi;
                        w.eta[3] = (1.0 - lam) * (1.0 - zp) * zb;
                        w.eta[pc] = lam * zb * zi + (1.0 - lam) * zp * zb;
                        w.eta_tilde[0] = lam * (1.0 - zb_t) * zi_t;
                        w.eta_tilde[3] = (1.0 - lam) * (1.0 - zp_t) * zb_t;
                        w.eta_tilde[pc] = lam * zb_t * zi_t + (1.0 - lam) * zp_t * zb_t;
                    }
                }
            }
        }
        Ok(w)
    }

    /// Evaluate the triple of snapshot `k` at `x`.
    pub fn eval_at(&self, k: usize, x: Vec2) -> Result<FieldValue> {
        let f = &self.frames[k];
        let sc = &self.scales;
        let w = self.weights_at(k, x, None)?;
        let cos_alpha = fmath::cos(self.cfg.alpha);
        let mut xi = Vec2::ZERO;
        let mut b = Vec2::ZERO;
        if w.eta[0] > 0.0 || w.eta_tilde[0] > 0.0 {
            let (s_arc, _) = f.curve.project_extended(x);
            let fr = f.curve.frame_at_arc_extended(s_arc);
            if w.eta[0] > 0.0 {
                xi += fr.normal * w.eta[0];
            }
            if w.eta_tilde[0] > 0.0 {
                b += f.b_bulk(&self.domain, sc.r_hat_min, &sc.r_hat, self.cfg.h_fd, x)? * w.eta_tilde[0];
            }
        }
        for c in 0..2 {
            if w.eta[1 + c] > 0.0 || w.eta_tilde[1 + c] > 0.0 {
                let (xc, bc) = f.contact_field(c, &self.domain, sc.r_hat[c], x)?;
                xi += xc * w.eta[1 + c];
                b += bc * w.eta_tilde[1 + c];
            }
        }
        if w.eta[3] > 0.0 {
            let (theta_b, _) = project_to_boundary(&self.domain, x)?;
            xi += self.domain.frame(theta_b).normal * (cos_alpha * w.eta[3]);
        }
        let theta = self.theta_weight(k, x)?;
        Ok(FieldValue { xi, b, theta })
    }

    /// Evaluate at the reference snapshot.
    pub fn eval(&self, x: Vec2) -> Result<FieldValue> {
        self.eval_at(0, x)
    }

    /// One-sided time derivatives `(d xi/dt, d B/dt, d theta/dt)` across the
    /// snapshot pair; zero for a static build.
    pub fn eval_dt(&self, x: Vec2) -> Result<(Vec2, Vec2, f64)> {
        if self.dt_probe == 0.0 {
            return Ok((Vec2::ZERO, Vec2::ZERO, 0.0));
        }
        let a = self.eval_at(0, x)?;
        let b = self.eval_at(1, x)?;
        let inv = 1.0 / self.dt_probe;
        Ok((
            (b.xi - a.xi) * inv,
            (b.b - a.b) * inv,
            (b.theta - a.theta) * inv,
        ))
    }

    /// Transported weight at `x` for snapshot `k`.
    fn theta_weight(&self, k: usize, x: Vec2) -> Result<f64> {
        let f = &self.frames[k];
        let sc = &self.scales;
        let d_ri = sc.delta_i * sc.r_bar;
        let d_rb = sc.delta_b * sc.r_bar;
        let (s_arc, s_i) = f.curve.project_extended(x);
        let in_arc = (0.0..=f.curve.total_arc()).contains(&s_arc);
        let (_, s_b) = project_to_boundary(&self.domain, x)?;
        let th_i = cutoffs::weight_profile(s_i / d_ri);
        let th_b = cutoffs::weight_profile(s_b / d_rb);
        let a_sign = |x: Vec2| if f.ext.eval(x) > 0.0 { 1.0 } else { -1.0 };
        match f.near_contacts(x, sc.r_bar) {
            Some(c) => {
                let wd = &f.wedges[c];
                let sector = if x.dist(f.contacts[c].p) < 1e-13 {
                    Sector::Interface
                } else {
                    wd.classify(x)
                };
                match sector {
                    Sector::Interface => Ok(th_i),
                    Sector::Boundary | Sector::Outer => Ok(a_sign(x) * th_b),
                    Sector::Interp { a_side, .. } => {
                        let (lam, _) = wd.lambda(x)?;
                        let sgn = if a_side { 1.0 } else { -1.0 };
                        Ok(lam * th_i + sgn * (1.0 - lam) * th_b)
                    }
                }
            }
            None => {
                if in_arc && fmath::abs(s_i) < d_ri {
                    Ok(th_i)
                } else if fmath::abs(s_b) < d_rb {
                    Ok(a_sign(x) * th_b)
                } else {
                    Ok(-a_sign(x))
                }
            }
        }
    }

    /// Interpolation weight at contact `c` with spatial gradient and the
    /// probe-pair time derivative.
    pub fn lambda_full(&self, c: usize, x: Vec2) -> Result<(f64, Vec2, f64)> {
        let (l0, g0) = self.frames[0].wedges[c].lambda(x)?;
        let dt = if self.dt_probe == 0.0 {
            0.0
        } else {
            let (l1, _) = self.frames[1].wedges[c].lambda(x)?;
            (l1 - l0) / self.dt_probe
        };
        Ok((l0, g0, dt))
    }

    /// Whether `x` lies in phase `A` of the reference snapshot.
    pub fn in_phase_a(&self, x: Vec2) -> bool {
        self.frames[0].ext.eval(x) > 0.0
    }

    /// Distance to the closed reference interface.
    pub fn dist_interface(&self, x: Vec2) -> f64 {
        self.frames[0].curve.distance_to_curve(x)
    }

    fn validate_sphere_continuity(&self) -> Result<()> {
        // the piecewise weight definitions must agree across the gluing ball
        // spheres; mismatches mean the tube fraction delta is too large for
        // this geometry (resolve_scales should have shrunk it)
        for k in 0..2 {
            let f = &self.frames[k];
            for c in 0..2 {
                let p = f.contacts[c].p;
                for j in 0..256 {
                    let a = 2.0 * core::f64::consts::PI * j as f64 / 256.0;
                    let x = p + Vec2::new(fmath::cos(a), fmath::sin(a)) * self.scales.r_bar;
                    let w_in = self.weights_at(k, x, Some(Some(c)))?;
                    let w_out = self.weights_at(k, x, Some(None))?;
                    for i in 0..4 {
                        let gap = fmath::abs(w_in.eta[i] - w_out.eta[i])
                            .max(fmath::abs(w_in.eta_tilde[i] - w_out.eta_tilde[i]));
                        if gap > 1e-10 {
                            return Err(CoreError::ScaleInfeasible {
                                inequality: format!(
                                    "localization discontinuity {gap:e} at the gluing sphere (contact {c}, angle {a:.3})"
                                ),
                            });
                        }
                    }
                }
            }
        }
        Ok(())
    }
}

/// Resolve the scale hierarchy from the snapshot pair.
pub fn resolve_scales(
    curve_t: &InterfaceCurve,
    curve_probe: &InterfaceCurve,
    domain: &DomainBoundary,
    cfg: &CalibrationConfig,
) -> Result<Scales> {
    let spl = SplinedCurve::new(curve_t);
    let (r_i, r_b) = tubular_radii(&spl, domain);
    let contacts = [
        build_contact_frame(&spl, domain, cfg.alpha, 0, cfg.tol_angle)?,
        build_contact_frame(&spl, domain, cfg.alpha, 1, cfg.tol_angle)?,
    ];
    // wedge radii: shrink until the sampled interface and boundary stay in
    // their cones
    let mut r_p = [r_i.min(r_b), r_i.min(r_b)];
    let mut wedge_angles = [WedgeAngles {
        psi_i: 0.0,
        q1: 0.0,
        q2: 0.0,
        w_ext: 0.0,
    }; 2];
    for c in 0..2 {
        let cf = &contacts[c];
        let wd = WedgeDecomposition::new(
            cf.p,
            cf.boundary.tangent,
            cf.boundary.normal,
            interface_direction(cf),
            cf.interface.normal,
            r_p[c],
            None,
        )?;
        wedge_angles[c] = wd.angles();
        let mut ok = false;
        for _ in 0..40 {
            if wedge_containment_holds(&wd, &spl, domain, cf, r_p[c]) {
                ok = true;
                break;
            }
            r_p[c] *= 0.8;
        }
        if !ok {
            return Err(CoreError::ScaleInfeasible {
                inequality: format!("no wedge radius contains the features at contact {c}"),
            });
        }
    }
    // contact-field radii: unit-length window by sampling
    let frame0 = build_snapshot_bare(&spl, curve_t, domain, cfg, &wedge_angles, r_p)?;
    let mut r_hat = r_p;
    for c in 0..2 {
        let mut ok = false;
        for _ in 0..40 {
            if xi_window_holds(&frame0, domain, c, r_hat[c]) {
                ok = true;
                break;
            }
            r_hat[c] *= 0.8;
        }
        if !ok {
            return Err(CoreError::ScaleInfeasible {
                inequality: format!("|xi|^2 window unattainable at contact {c}"),
            });
        }
    }
    let spl_probe = SplinedCurve::new(curve_probe);
    let sep = spl
        .start_point()
        .dist(spl.end_point())
        .min(spl_probe.start_point().dist(spl_probe.end_point()));
    let r_hat_min = r_hat[0].min(r_hat[1]).min(sep / 3.0);
    let r_bar = 0.5 * r_hat_min;
    // tube fractions: the wide cutoff supports sqrt(2) delta r_bar must stay
    // inside the wedge cones at the gluing sphere (the sphere-continuity
    // validation refines this with the exact geometry), plus tube separation
    // away from the balls
    let min_gap = wedge_angles
        .iter()
        .map(|a| a.q1.min(a.q2))
        .fold(f64::INFINITY, f64::min);
    let cap = cfg.delta_max.min(0.95 * fmath::sin(min_gap) / fmath::sqrt(2.0));
    let mut delta_i = cap;
    let mut delta_b = cap;
    let probe_contacts = contacts_of(&spl_probe, domain, cfg)?;
    let mut ok = false;
    for _ in 0..40 {
        if tube_separation_holds(&spl, domain, &contacts, r_bar, delta_i, delta_b)
            && tube_separation_holds(&spl_probe, domain, &probe_contacts, r_bar, delta_i, delta_b)
        {
            ok = true;
            break;
        }
        delta_i *= 0.85;
        delta_b *= 0.85;
    }
    if !ok {
        return Err(CoreError::ScaleInfeasible {
            inequality: format!(
                "interface and boundary tubes of widths {delta_i}/{delta_b} r_bar overlap away from the contact balls"
            ),
        });
    }
    let c_bar = cfg.c_bar_max.min(0.65);
    Ok(Scales {
        r_p,
        r_hat,
        r_hat_min,
        r_bar,
        delta_i,
        delta_b,
        c_bar,
        wedge_angles,
    })
}

fn contacts_of(
    spl: &SplinedCurve,
    domain: &DomainBoundary,
    cfg: &CalibrationConfig,
) -> Result<[ContactFrame; 2]> {
    Ok([
        build_contact_frame(spl, domain, cfg.alpha, 0, cfg.tol_angle)?,
        build_contact_frame(spl, domain, cfg.alpha, 1, cfg.tol_angle)?,
    ])
}

fn build_snapshot_bare(
    spl: &SplinedCurve,
    curve: &InterfaceCurve,
    domain: &DomainBoundary,
    cfg: &CalibrationConfig,
    angles: &[WedgeAngles; 2],
    r_p: [f64; 2],
) -> Result<SnapshotFrame> {
    let c0 = build_contact_frame(spl, domain, cfg.alpha, 0, cfg.tol_angle)?;
    let c1 = build_contact_frame(spl, domain, cfg.alpha, 1, cfg.tol_angle)?;
    let w0 = WedgeDecomposition::new(
        c0.p,
        c0.boundary.tangent,
        c0.boundary.normal,
        interface_direction(&c0),
        c0.interface.normal,
        r_p[0],
        Some(angles[0]),
    )?;
    let w1 = WedgeDecomposition::new(
        c1.p,
        c1.boundary.tangent,
        c1.boundary.normal,
        interface_direction(&c1),
        c1.interface.normal,
        r_p[1],
        Some(angles[1]),
    )?;
    let g0 = build_gamma_table(spl, &c0);
    let g1 = build_gamma_table(spl, &c1);
    let ext = ExtendedDistance::new(curve, domain, 0.5 * r_p[0].min(r_p[1]))?;
    Ok(SnapshotFrame {
        curve: SplinedCurve::new(curve),
        contacts: [c0, c1],
        wedges: [w0, w1],
        gammas: [g0, g1],
        ext,
    })
}

fn wedge_containment_holds(
    wd: &WedgeDecomposition,
    curve: &SplinedCurve,
    domain: &DomainBoundary,
    cf: &ContactFrame,
    radius: f64,
) -> bool {
    // interface samples inside the ball must classify Interface
    let l = curve.total_arc();
    for k in 1..=60 {
        let ds = radius * k as f64 / 60.0;
        let s = if cf.endpoint == 0 { ds } else { l - ds };
        if !(0.0..=l).contains(&s) {
            break;
        }
        let q = curve.frame_at_arc(s).point;
        if q.dist(cf.p) > radius {
            continue;
        }
        if q.dist(cf.p) < 1e-12 {
            continue;
        }
        if wd.classify(q) != Sector::Interface {
            return false;
        }
    }
    // boundary samples inside the ball must classify Boundary
    let speed = domain.derivative(cf.boundary_theta).norm();
    for dir in [-1.0, 1.0] {
        for k in 1..=60 {
            let dth = dir * radius * k as f64 / (60.0 * speed);
            let q = domain.position(cf.boundary_theta + dth);
            if q.dist(cf.p) > radius || q.dist(cf.p) < 1e-12 {
                continue;
            }
            if wd.classify(q) != Sector::Boundary {
                return false;
            }
        }
    }
    true
}

fn xi_window_holds(frame: &SnapshotFrame, domain: &DomainBoundary, c: usize, r_hat: f64) -> bool {
    let p = frame.contacts[c].p;
    for ir in 1..=6 {
        let r = r_hat * ir as f64 / 6.0;
        for ia in 0..48 {
            let a = 2.0 * core::f64::consts::PI * ia as f64 / 48.0;
            let x = p + Vec2::new(fmath::cos(a), fmath::sin(a)) * r;
            let w = &frame.wedges[c];
            let sector = w.classify(x);
            let xi_hat = match sector {
                Sector::Interface => xi_interface_tilde(&frame.curve, &frame.contacts[c], x),
                Sector::Boundary | Sector::Outer => {
                    match xi_boundary_tilde(domain, &frame.contacts[c], x) {
                        Ok(v) => v,
                        Err(_) => return false,
                    }
                }
                Sector::Interp { .. } => {
                    let lam = match w.lambda(x) {
                        Ok((l, _)) => l,
                        Err(_) => return false,
                    };
                    let xb = match xi_boundary_tilde(domain, &frame.contacts[c], x) {
                        Ok(v) => v,
                        Err(_) => return false,
                    };
                    xi_interface_tilde(&frame.curve, &frame.contacts[c], x) * lam + xb * (1.0 - lam)
                }
            };
            let n2 = xi_hat.norm_sq();
            if !(0.5..=1.5).contains(&n2) {
                return false;
            }
        }
    }
    true
}

fn tube_separation_holds(
    curve: &SplinedCurve,
    domain: &DomainBoundary,
    contacts: &[ContactFrame; 2],
    r_bar: f64,
    delta_i: f64,
    delta_b: f64,
) -> bool {
    let l = curve.total_arc();
    let margin = 1.5 * (delta_i + delta_b) * r_bar;
    for k in 0..=400 {
        let s = l * k as f64 / 400.0;
        let q = curve.frame_at_arc(s).point;
        if q.dist(contacts[0].p) >= r_bar && q.dist(contacts[1].p) >= r_bar {
            match project_to_boundary(domain, q) {
                Ok((_, sd)) => {
                    if fmath::abs(sd) < margin {
                        return false;
                    }
                }
                Err(_) => return false,
            }
        }
    }
    true
}
