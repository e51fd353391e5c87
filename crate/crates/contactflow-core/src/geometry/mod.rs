//! Domain boundary, interface curves, signed distances, projections, frames
//! and curvatures.
//!
//! Conventions used throughout the crate (`J` is the counter-clockwise
//! rotation by 90 degrees):
//!
//! * the domain boundary is parametrized counter-clockwise, its unit normal
//!   `n` points into the domain, the tangent is `tau = J^T n`, and the
//!   curvature is oriented by `n` (unit circle: `H = +1`);
//! * an interface curve travels with the phase `A` on its left, so the unit
//!   normal `n = J tau` points into `A`; signed distances are positive on
//!   the side the normal points to (`|grad s| = 1` in the tube).

pub mod spline;

use crate::error::{CoreError, Result};
use crate::fmath;
use crate::vec2::Vec2;
use alloc::vec::Vec;
use spline::CurveSpline;

/// Orthonormal frame with curvature at a point of a curve.
#[derive(Debug, Clone, Copy)]
pub struct Frame {
    pub point: Vec2,
    /// Unit normal (`n = J tangent`).
    pub normal: Vec2,
    /// Unit tangent (`tangent = J^T normal`).
    pub tangent: Vec2,
    /// Curvature oriented with respect to `normal`.
    pub curvature: f64,
}

/// Smooth closed domain boundary, parametrized counter-clockwise on
/// `[0, 2 pi)` with the interior on the left.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DomainBoundary {
    Circle { radius: f64 },
    Ellipse { a: f64, b: f64 },
}

impl DomainBoundary {
    pub fn unit_disk() -> DomainBoundary {
        DomainBoundary::Circle { radius: 1.0 }
    }

    pub fn position(&self, theta: f64) -> Vec2 {
        match *self {
            DomainBoundary::Circle { radius } => {
                Vec2::new(radius * fmath::cos(theta), radius * fmath::sin(theta))
            }
            DomainBoundary::Ellipse { a, b } => {
                Vec2::new(a * fmath::cos(theta), b * fmath::sin(theta))
            }
        }
    }

    pub fn derivative(&self, theta: f64) -> Vec2 {
        match *self {
            DomainBoundary::Circle { radius } => {
                Vec2::new(-radius * fmath::sin(theta), radius * fmath::cos(theta))
            }
            DomainBoundary::Ellipse { a, b } => {
                Vec2::new(-a * fmath::sin(theta), b * fmath::cos(theta))
            }
        }
    }

    pub fn second_derivative(&self, theta: f64) -> Vec2 {
        -1.0 * match *self {
            DomainBoundary::Circle { radius } => {
                Vec2::new(radius * fmath::cos(theta), radius * fmath::sin(theta))
            }
            DomainBoundary::Ellipse { a, b } => {
                Vec2::new(a * fmath::cos(theta), b * fmath::sin(theta))
            }
        }
    }

    /// Closedness and regularity, sampled.
    pub fn validate(&self) -> Result<()> {
        let two_pi = 2.0 * core::f64::consts::PI;
        for f in [
            Self::position as fn(&Self, f64) -> Vec2,
            Self::derivative,
            Self::second_derivative,
        ] {
            if f(self, 0.0).dist(f(self, two_pi)) > 1e-10 {
                return Err(CoreError::Precondition("boundary parametrization not closed"));
            }
        }
        for k in 0..2000 {
            let th = two_pi * k as f64 / 2000.0;
            if self.derivative(th).norm() < 1e-8 {
                return Err(CoreError::Precondition("boundary parametrization not regular"));
            }
        }
        Ok(())
    }

    /// Maximum absolute boundary curvature (sampled).
    pub fn max_curvature(&self) -> f64 {
        let mut h_max: f64 = 0.0;
        for k in 0..720 {
            let th = 2.0 * core::f64::consts::PI * k as f64 / 720.0;
            h_max = h_max.max(fmath::abs(self.frame(th).curvature));
        }
        h_max
    }
}

/// Frame of the domain boundary at parameter `theta`; normal points inward.
pub fn boundary_frame(domain: &DomainBoundary, theta: f64) -> Frame {
    let p = domain.position(theta);
    let d1 = domain.derivative(theta);
    let d2 = domain.second_derivative(theta);
    let speed = d1.norm();
    let tangent = d1 / speed;
    let normal = tangent.rot_ccw();
    let curvature = d1.cross(d2) / (speed * speed * speed);
    Frame {
        point: p,
        normal,
        tangent,
        curvature,
    }
}

impl DomainBoundary {
    pub fn frame(&self, theta: f64) -> Frame {
        boundary_frame(self, theta)
    }
}

/// Orthogonal projection onto the domain boundary.
///
/// Returns `(theta_star, signed_distance)`, the signed distance positive
/// inside the domain. Damped Newton on the stationarity condition, seeded
/// from a scaled angular guess plus a coarse scan fallback.
pub fn project_to_boundary(domain: &DomainBoundary, x: Vec2) -> Result<(f64, f64)> {
    let mut theta = match *domain {
        DomainBoundary::Circle { .. } => fmath::atan2(x.y, x.x),
        DomainBoundary::Ellipse { a, b } => fmath::atan2(x.y / b, x.x / a),
    };
    if !theta.is_finite() {
        theta = 0.0;
    }
    let g = |th: f64| (x - domain.position(th)).dot(domain.derivative(th));
    let mut best = theta;
    let mut best_dist = x.dist(domain.position(theta));
    // coarse scan guards against a bad seed for eccentric shapes
    if matches!(domain, DomainBoundary::Ellipse { .. }) {
        for k in 0..32 {
            let th = 2.0 * core::f64::consts::PI * k as f64 / 32.0;
            let d = x.dist(domain.position(th));
            if d < best_dist {
                best_dist = d;
                best = th;
            }
        }
        theta = best;
    }
    let mut gv = g(theta);
    for _ in 0..50 {
        let scale = domain.derivative(theta).norm_sq();
        if fmath::abs(gv) <= 1e-14 * (1.0 + scale) {
            let foot = domain.position(theta);
            let n = domain.frame(theta).normal;
            return Ok((normalize_angle(theta), (x - foot).dot(n)));
        }
        let d1 = domain.derivative(theta);
        let d2 = domain.second_derivative(theta);
        let dg = -d1.norm_sq() + (x - domain.position(theta)).dot(d2);
        if fmath::abs(dg) < 1e-300 {
            break;
        }
        let mut step = -gv / dg;
        // damping: halve while the residual grows
        let mut accepted = false;
        for _ in 0..30 {
            let cand = theta + step;
            let gc = g(cand);
            if fmath::abs(gc) <= fmath::abs(gv) || fmath::abs(step) < 1e-16 {
                theta = cand;
                gv = gc;
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        if !accepted {
            break;
        }
    }
    let scale = domain.derivative(theta).norm_sq();
    if fmath::abs(gv) <= 1e-12 * (1.0 + scale) {
        let foot = domain.position(theta);
        let n = domain.frame(theta).normal;
        return Ok((normalize_angle(theta), (x - foot).dot(n)));
    }
    Err(CoreError::Projection {
        target: "domain boundary",
        point: x,
        iterations: 50,
        residual: fmath::abs(gv),
    })
}

fn normalize_angle(theta: f64) -> f64 {
    let two_pi = 2.0 * core::f64::consts::PI;
    let mut t = theta % two_pi;
    if t < 0.0 {
        t += two_pi;
    }
    t
}

/// Arclength-ordered polyline for an evolving interface, both endpoints on
/// the domain boundary, phase `A` on the left of the travel direction.
#[derive(Debug, Clone)]
pub struct InterfaceCurve {
    pub nodes: Vec<Vec2>,
    /// Snapshot time in seconds.
    pub time: f64,
}

impl InterfaceCurve {
    pub fn new(nodes: Vec<Vec2>, time: f64) -> InterfaceCurve {
        InterfaceCurve { nodes, time }
    }

    /// Flip the travel direction (moves `A` to the other side).
    pub fn reversed(mut self) -> InterfaceCurve {
        self.nodes.reverse();
        self
    }

    /// Reorder (if needed) so that the witness point lies in phase `A`,
    /// i.e. on the left of the travel direction.
    pub fn oriented_with_witness(self, witness: Vec2) -> InterfaceCurve {
        // side of the witness relative to the nearest segment
        let mut best = (f64::INFINITY, 0usize);
        for i in 0..self.nodes.len() - 1 {
            let m = (self.nodes[i] + self.nodes[i + 1]) * 0.5;
            let d = m.dist(witness);
            if d < best.0 {
                best = (d, i);
            }
        }
        let i = best.1;
        let tau = self.nodes[i + 1] - self.nodes[i];
        let side = tau.cross(witness - self.nodes[i]);
        if side < 0.0 {
            self.reversed()
        } else {
            self
        }
    }

    /// Snap both endpoints exactly onto the domain boundary.
    pub fn snap_endpoints(&mut self, domain: &DomainBoundary) -> Result<()> {
        let n = self.nodes.len();
        for idx in [0, n - 1] {
            let (theta, _) = project_to_boundary(domain, self.nodes[idx])?;
            self.nodes[idx] = domain.position(theta);
        }
        Ok(())
    }

    /// Endpoint residuals, spacing bounds and pairwise segment intersection.
    pub fn validate(&self, domain: &DomainBoundary) -> Result<()> {
        let n = self.nodes.len();
        if n < 4 {
            return Err(CoreError::Precondition("interface curve needs at least 4 nodes"));
        }
        for idx in [0, n - 1] {
            let (_, s) = project_to_boundary(domain, self.nodes[idx])?;
            if fmath::abs(s) > 1e-8 {
                return Err(CoreError::Evolution {
                    what: "contact point off the boundary",
                    detail: alloc::format!("node {idx} signed distance {s:e}"),
                });
            }
        }
        let mut min_h = f64::INFINITY;
        let mut max_h: f64 = 0.0;
        for i in 0..n - 1 {
            let h = self.nodes[i].dist(self.nodes[i + 1]);
            min_h = min_h.min(h);
            max_h = max_h.max(h);
        }
        if min_h < 1e-12 || max_h / min_h > 20.0 {
            return Err(CoreError::Evolution {
                what: "node spacing out of bounds",
                detail: alloc::format!("min {min_h:e}, max {max_h:e}"),
            });
        }
        if self.has_self_intersection() {
            return Err(CoreError::Evolution {
                what: "self-intersection",
                detail: alloc::format!("{n} nodes at t = {}", self.time),
            });
        }
        Ok(())
    }

    /// Proper segment-pair intersection test (adjacent segments excluded).
    pub fn has_self_intersection(&self) -> bool {
        let n = self.nodes.len();
        for i in 0..n - 1 {
            for j in i + 2..n - 1 {
                if segments_intersect(
                    self.nodes[i],
                    self.nodes[i + 1],
                    self.nodes[j],
                    self.nodes[j + 1],
                ) {
                    return true;
                }
            }
        }
        false
    }
}

fn segments_intersect(a: Vec2, b: Vec2, c: Vec2, d: Vec2) -> bool {
    let orient = |p: Vec2, q: Vec2, r: Vec2| (q - p).cross(r - p);
    let (o1, o2) = (orient(a, b, c), orient(a, b, d));
    let (o3, o4) = (orient(c, d, a), orient(c, d, b));
    o1 * o2 < 0.0 && o3 * o4 < 0.0
}

/// Result of projecting a point onto an interface curve.
#[derive(Debug, Clone, Copy)]
pub enum Projection {
    /// Foot point in the curve interior: arclength, signed distance, foot.
    Interior { s_arc: f64, dist: f64, foot: Vec2 },
    /// Nearest point is an endpoint (`0` start, `1` end); unsigned distance.
    Endpoint { which: usize, dist: f64 },
}

/// Uniform-grid accelerator over curve segments for nearest-segment seeds.
#[derive(Debug, Clone)]
struct SegmentGrid {
    min: Vec2,
    cell: f64,
    nx: usize,
    ny: usize,
    cells: Vec<Vec<u32>>,
}

impl SegmentGrid {
    fn build(nodes: &[Vec2]) -> SegmentGrid {
        let mut min = Vec2::new(f64::INFINITY, f64::INFINITY);
        let mut max = Vec2::new(f64::NEG_INFINITY, f64::NEG_INFINITY);
        let mut max_seg: f64 = 0.0;
        for w in nodes.windows(2) {
            max_seg = max_seg.max(w[0].dist(w[1]));
        }
        for p in nodes {
            min.x = min.x.min(p.x);
            min.y = min.y.min(p.y);
            max.x = max.x.max(p.x);
            max.y = max.y.max(p.y);
        }
        let pad = max_seg.max(1e-6);
        min = min - Vec2::new(pad, pad);
        max = max + Vec2::new(pad, pad);
        let cell = (2.0 * max_seg).max(1e-6);
        let nx = (((max.x - min.x) / cell) as usize + 1).min(4096);
        let ny = (((max.y - min.y) / cell) as usize + 1).min(4096);
        let mut cells = alloc::vec![Vec::new(); nx * ny];
        for (i, w) in nodes.windows(2).enumerate() {
            let lo_x = ((w[0].x.min(w[1].x) - min.x) / cell) as usize;
            let hi_x = ((w[0].x.max(w[1].x) - min.x) / cell) as usize;
            let lo_y = ((w[0].y.min(w[1].y) - min.y) / cell) as usize;
            let hi_y = ((w[0].y.max(w[1].y) - min.y) / cell) as usize;
            for cx in lo_x..=hi_x.min(nx - 1) {
                for cy in lo_y..=hi_y.min(ny - 1) {
                    cells[cy * nx + cx].push(i as u32);
                }
            }
        }
        SegmentGrid {
            min,
            cell,
            nx,
            ny,
            cells,
        }
    }

    /// Index of the segment nearest to `x` (expanding ring search).
    fn nearest_segment(&self, nodes: &[Vec2], x: Vec2) -> usize {
        let cx = (((x.x - self.min.x) / self.cell) as isize).clamp(0, self.nx as isize - 1);
        let cy = (((x.y - self.min.y) / self.cell) as isize).clamp(0, self.ny as isize - 1);
        let mut best = (f64::INFINITY, 0usize);
        let max_ring = self.nx.max(self.ny) as isize;
        let mut found_ring: Option<isize> = None;
        for ring in 0..=max_ring {
            if let Some(fr) = found_ring {
                // one extra ring to be safe against diagonal cells
                if ring > fr + 1 {
                    break;
                }
            }
            let mut any = false;
            for dx in -ring..=ring {
                for dy in -ring..=ring {
                    if dx.abs() != ring && dy.abs() != ring {
                        continue;
                    }
                    let (gx, gy) = (cx + dx, cy + dy);
                    if gx < 0 || gy < 0 || gx >= self.nx as isize || gy >= self.ny as isize {
                        continue;
                    }
                    for &si in &self.cells[gy as usize * self.nx + gx as usize] {
                        any = true;
                        let i = si as usize;
                        let d = point_segment_distance(x, nodes[i], nodes[i + 1]);
                        if d < best.0 {
                            best = (d, i);
                        }
                    }
                }
            }
            if any && found_ring.is_none() {
                found_ring = Some(ring);
            }
        }
        best.1
    }
}

fn point_segment_distance(x: Vec2, a: Vec2, b: Vec2) -> f64 {
    let ab = b - a;
    let t = ((x - a).dot(ab) / ab.norm_sq()).clamp(0.0, 1.0);
    x.dist(a + ab * t)
}

/// Immutable splined geometry of an interface curve: frames, projections,
/// signed distances and curvature derivatives.
pub struct SplinedCurve {
    pub spline: CurveSpline,
    grid: SegmentGrid,
    nodes: Vec<Vec2>,
    pub time: f64,
}

impl SplinedCurve {
    pub fn new(curve: &InterfaceCurve) -> SplinedCurve {
        SplinedCurve {
            spline: CurveSpline::new(&curve.nodes),
            grid: SegmentGrid::build(&curve.nodes),
            nodes: curve.nodes.clone(),
            time: curve.time,
        }
    }

    pub fn total_arc(&self) -> f64 {
        self.spline.total_arc()
    }

    pub fn start_point(&self) -> Vec2 {
        self.nodes[0]
    }

    pub fn end_point(&self) -> Vec2 {
        *self.nodes.last().unwrap()
    }

    /// Frame at arclength `s` (normal points into phase `A`).
    pub fn frame_at_arc(&self, s: f64) -> Frame {
        let t = self.spline.param_at_arc(s);
        self.frame_at_param(t)
    }

    pub fn frame_at_param(&self, t: f64) -> Frame {
        let (p, d1, d2) = self.spline.eval(t);
        let speed = d1.norm();
        let tangent = d1 / speed;
        let normal = tangent.rot_ccw();
        let curvature = d1.cross(d2) / (speed * speed * speed);
        Frame {
            point: p,
            normal,
            tangent,
            curvature,
        }
    }

    /// Pointwise arclength derivative of the spline curvature (from the
    /// spline's own third derivative).
    ///
    /// An order less accurate than the smoothed estimate and noisy at the
    /// node scale, but exactly consistent with the spline the evaluators
    /// differentiate; field constructions must use this one so their
    /// gradients keep the intended algebraic structure under finite
    /// differences.
    pub fn curvature_deriv_pointwise(&self, s: f64) -> f64 {
        let l = self.total_arc();
        let t = self.spline.param_at_arc(s.clamp(0.0, l));
        let (_, d1, d2) = self.spline.eval(t);
        let d3 = self.spline.third(t);
        let speed = d1.norm();
        let h = d1.cross(d2) / (speed * speed * speed);
        let dh_dt = d1.cross(d3) / (speed * speed * speed) - 3.0 * h * d1.dot(d2) / (speed * speed);
        dh_dt / speed
    }

    /// Arclength derivative of the curvature at arclength `s`.
    ///
    /// Finite differences of the spline curvature with a step aligned to the
    /// node spacing; the spline's interpolation error is near-periodic per
    /// segment, so aligned sampling cancels it instead of amplifying it (the
    /// raw spline third derivative is an order less accurate).
    pub fn curvature_deriv_at_arc(&self, s: f64) -> f64 {
        let l = self.total_arc();
        let n_seg = (self.nodes.len() - 1).max(1);
        let step = 2.0 * l / n_seg as f64;
        let kappa = |s: f64| self.frame_at_arc(s.clamp(0.0, l)).curvature;
        let central = |s: f64| {
            (kappa(s - 2.0 * step) - kappa(s + 2.0 * step)
                + 8.0 * (kappa(s + step) - kappa(s - step)))
                / (12.0 * step)
        };
        if s >= 2.0 * step && s <= l - 2.0 * step {
            central(s)
        } else {
            // near an endpoint the spline curvature itself is biased; sample
            // the derivative at two interior stations and extrapolate back
            let (s1, s2) = if s < 2.0 * step {
                (2.0 * step, 4.0 * step)
            } else {
                (l - 2.0 * step, l - 4.0 * step)
            };
            let (d1, d2) = (central(s1), central(s2));
            d1 + (d1 - d2) * ((s - s1) / (s2 - s1)).abs()
        }
    }

    /// Orthogonal projection of `x` onto the curve.
    ///
    /// Signed distance is positive on the side of `A` (the normal side).
    /// Projections falling beyond an endpoint report the endpoint instead.
    pub fn project(&self, x: Vec2) -> Projection {
        let seg = self.grid.nearest_segment(&self.nodes, x);
        let (t_lo, t_hi) = self.spline.param_range();
        // seed: parameter of the closest point on the polyline segment
        let a = self.nodes[seg];
        let b = self.nodes[seg + 1];
        let frac = ((x - a).dot(b - a) / (b - a).norm_sq()).clamp(0.0, 1.0);
        let mut t = self.spline.knots[seg] * (1.0 - frac) + self.spline.knots[seg + 1] * frac;
        let mut g;
        let mut iter = 0;
        loop {
            let (p, d1, d2) = self.spline.eval(t);
            g = (x - p).dot(d1);
            let dg = -d1.norm_sq() + (x - p).dot(d2);
            if fmath::abs(dg) < 1e-300 {
                break;
            }
            let step = -g / dg;
            t += step;
            iter += 1;
            if t < t_lo - 0.5 * (t_hi - t_lo) || t > t_hi + 0.5 * (t_hi - t_lo) {
                break;
            }
            if fmath::abs(step) < 1e-14 * (1.0 + fmath::abs(t)) || iter >= 30 {
                break;
            }
        }
        if t <= t_lo {
            let d_start = x.dist(self.nodes[0]);
            return Projection::Endpoint {
                which: 0,
                dist: d_start,
            };
        }
        if t >= t_hi {
            let d_end = x.dist(self.end_point());
            return Projection::Endpoint {
                which: 1,
                dist: d_end,
            };
        }
        let (p, d1, _) = self.spline.eval(t);
        let tangent = d1 / d1.norm();
        let normal = tangent.rot_ccw();
        let s_signed = (x - p).dot(normal);
        Projection::Interior {
            s_arc: self.spline.arc_at_param(t),
            dist: s_signed,
            foot: p,
        }
    }

    /// Projection where the curve is extended by straight tangent rays at
    /// both endpoints; the frame is frozen at the endpoint on the extension.
    ///
    /// Returns `(s_arc, signed_dist)`, with `s_arc < 0` before the start and
    /// `s_arc > L` past the end.
    pub fn project_extended(&self, x: Vec2) -> (f64, f64) {
        match self.project(x) {
            Projection::Interior { s_arc, dist, .. } => (s_arc, dist),
            Projection::Endpoint { which, .. } => {
                let (s_end, fr) = if which == 0 {
                    (0.0, self.frame_at_arc(0.0))
                } else {
                    (self.total_arc(), self.frame_at_arc(self.total_arc()))
                };
                let along = (x - fr.point).dot(fr.tangent);
                let dist = (x - fr.point).dot(fr.normal);
                (s_end + along, dist)
            }
        }
    }

    /// Distance to the closed curve (endpoints included, no extension).
    pub fn distance_to_curve(&self, x: Vec2) -> f64 {
        match self.project(x) {
            Projection::Interior { dist, .. } => fmath::abs(dist),
            Projection::Endpoint { dist, .. } => dist,
        }
    }

    /// Frame at extended arclength (frozen endpoint frame on the rays).
    pub fn frame_at_arc_extended(&self, s: f64) -> Frame {
        let l = self.total_arc();
        if s < 0.0 {
            let fr = self.frame_at_arc(0.0);
            return Frame {
                point: fr.point + fr.tangent * s,
                ..fr
            };
        }
        if s > l {
            let fr = self.frame_at_arc(l);
            return Frame {
                point: fr.point + fr.tangent * (s - l),
                ..fr
            };
        }
        self.frame_at_arc(s)
    }

    /// Resample to `n` nodes at uniform arclength.
    pub fn resample_uniform(&self, n: usize) -> InterfaceCurve {
        let l = self.total_arc();
        let mut nodes = Vec::with_capacity(n);
        for k in 0..n {
            let s = l * k as f64 / (n - 1) as f64;
            let t = self.spline.param_at_arc(s);
            nodes.push(self.spline.eval(t).0);
        }
        InterfaceCurve {
            nodes,
            time: self.time,
        }
    }
}

/// Arclength derivative of the interface curvature; with the normal
/// extension the full curvature gradient is `(tau . grad H) tau`.
pub fn interface_derivatives(curve: &SplinedCurve, s_arc: f64) -> f64 {
    curve.curvature_deriv_at_arc(s_arc)
}

/// Tubular radii for the interface and the boundary.
///
/// One admissible choice: a fixed fraction of the curvature reach, capped by
/// the contact-point separation. Chosen as large as projections stay unique;
/// the calibration scale resolution shrinks further where its own sampled
/// feasibility checks demand it (a generous tube matters because the cutoff
/// widths derived from it control how much of a diffuse interface the
/// calibration captures at laboratory widths).
pub fn tubular_radii(curve: &SplinedCurve, domain: &DomainBoundary) -> (f64, f64) {
    let l = curve.total_arc();
    let n_samp = 200;
    let mut max_h: f64 = 0.0;
    for k in 0..=n_samp {
        let s = l * k as f64 / n_samp as f64;
        max_h = max_h.max(fmath::abs(curve.frame_at_arc(s).curvature));
    }
    let contact_sep = curve.start_point().dist(curve.end_point());
    let r_i = (0.7 / max_h.max(1e-9)).min(0.45 * contact_sep).min(1.0);
    let r_b = (0.7 / domain.max_curvature().max(1e-9))
        .min(0.45 * contact_sep)
        .min(1.0);
    (r_i, r_b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use core::f64::consts::{FRAC_PI_2, PI};

    fn diameter(n: usize) -> InterfaceCurve {
        // from (-1,0) to (1,0); A = upper half (left of travel)
        let nodes = (0..n)
            .map(|k| Vec2::new(-1.0 + 2.0 * k as f64 / (n - 1) as f64, 0.0))
            .collect();
        InterfaceCurve::new(nodes, 0.0)
    }

    #[test]
    fn unit_circle_frame() {
        let disk = DomainBoundary::unit_disk();
        let f = boundary_frame(&disk, 0.0);
        assert!((f.point - Vec2::new(1.0, 0.0)).norm() < 1e-15);
        assert!((f.normal - Vec2::new(-1.0, 0.0)).norm() < 1e-15);
        assert_abs_diff_eq!(f.curvature, 1.0, epsilon = 1e-14);
        // frame invariants at arbitrary angles
        for k in 0..17 {
            let f = boundary_frame(&disk, 2.0 * PI * k as f64 / 17.0);
            assert_abs_diff_eq!(f.normal.norm(), 1.0, epsilon = 1e-14);
            assert_abs_diff_eq!(f.tangent.dot(f.normal), 0.0, epsilon = 1e-14);
            assert!((f.tangent - f.normal.rot_cw()).norm() < 1e-14);
        }
    }

    #[test]
    fn curvature_radial_oracle() {
        // H = -lap(signed distance): for the unit circle s = 1 - |x|,
        // lap s = -1/|x|, so H = 1 on the boundary; check by radial FD
        let disk = DomainBoundary::unit_disk();
        let s = |x: Vec2| 1.0 - x.norm();
        let h = 1e-4;
        let p = Vec2::new(1.0, 0.0);
        let lap = (s(p + Vec2::new(h, 0.0)) + s(p - Vec2::new(h, 0.0)) + s(p + Vec2::new(0.0, h))
            + s(p - Vec2::new(0.0, h))
            - 4.0 * s(p))
            / (h * h);
        assert_abs_diff_eq!(-lap, boundary_frame(&disk, 0.0).curvature, epsilon = 1e-3);
    }

    #[test]
    fn ellipse_curvature_classical_formula() {
        let (a, b) = (1.2, 1.0);
        let el = DomainBoundary::Ellipse { a, b };
        // classical: kappa(theta) = a b / (a^2 sin^2 + b^2 cos^2)^{3/2}
        let kappa = |th: f64| {
            let s = fmath::sin(th);
            let c = fmath::cos(th);
            a * b / fmath::powf(a * a * s * s + b * b * c * c, 1.5)
        };
        for th in [0.0, 0.7, FRAC_PI_2, 2.9] {
            assert_abs_diff_eq!(el.frame(th).curvature, kappa(th), epsilon = 1e-12);
        }
    }

    #[test]
    fn boundary_projection_radial() {
        let disk = DomainBoundary::unit_disk();
        let (th, s) = project_to_boundary(&disk, Vec2::new(0.5, 0.0)).unwrap();
        assert_abs_diff_eq!(th, 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(s, 0.5, epsilon = 1e-12);
        let (_, s) = project_to_boundary(&disk, Vec2::new(0.0, 0.9)).unwrap();
        assert_abs_diff_eq!(s, 0.1, epsilon = 1e-12);
    }

    #[test]
    fn ellipse_projection_tangency_residual() {
        let el = DomainBoundary::Ellipse { a: 1.2, b: 1.0 };
        let mut rng = crate::rng::SplitMix64::new(7);
        for _ in 0..200 {
            let th = rng.uniform(0.0, 2.0 * PI);
            let off = rng.uniform(-0.2, 0.2);
            let f = el.frame(th);
            let x = f.point + f.normal * off;
            let (th_star, s) = project_to_boundary(&el, x).unwrap();
            let foot = el.position(th_star);
            let tau = el.frame(th_star).tangent;
            assert!(fmath::abs((x - foot).dot(tau)) < 1e-10);
            assert_abs_diff_eq!(s, off, epsilon = 1e-9);
        }
    }

    #[test]
    fn diameter_frames_and_projection() {
        let c = SplinedCurve::new(&diameter(41));
        for s in [0.3, 1.0, 1.7] {
            let f = c.frame_at_arc(s);
            assert_abs_diff_eq!(f.curvature, 0.0, epsilon = 1e-12);
            assert!((f.normal - Vec2::new(0.0, 1.0)).norm() < 1e-12);
        }
        match c.project(Vec2::new(0.3, 0.2)) {
            Projection::Interior { dist, .. } => assert_abs_diff_eq!(dist, 0.2, epsilon = 1e-12),
            _ => panic!("expected interior projection"),
        }
        match c.project(Vec2::new(0.3, -0.2)) {
            Projection::Interior { dist, .. } => assert_abs_diff_eq!(dist, -0.2, epsilon = 1e-12),
            _ => panic!("expected interior projection"),
        }
    }

    #[test]
    fn arc_curvature_spline_accuracy() {
        // half circle of radius R traversed so the center is on the left:
        // curvature +1/R with 200 nodes to 1e-4
        let r = 0.7;
        let n = 200;
        let nodes: Vec<Vec2> = (0..=n)
            .map(|k| {
                let a = PI * k as f64 / n as f64;
                Vec2::new(r * fmath::cos(a), r * fmath::sin(a))
            })
            .collect();
        let c = SplinedCurve::new(&InterfaceCurve::new(nodes, 0.0));
        for frac in [0.2, 0.5, 0.8] {
            let f = c.frame_at_arc(c.total_arc() * frac);
            assert_abs_diff_eq!(f.curvature, 1.0 / r, epsilon = 1e-4);
            // constant curvature: arclength derivative should be ~0
            assert!(fmath::abs(c.curvature_deriv_at_arc(c.total_arc() * frac)) < 5e-3);
        }
    }

    #[test]
    fn curvature_deriv_matches_fd_on_sine_graph() {
        // graph curve (x, 0.1 sin x): compare spline dH/ds against 4th-order
        // finite differences of the nodal curvature in arclength
        let n = 400;
        let nodes: Vec<Vec2> = (0..=n)
            .map(|k| {
                let x = -1.5 + 3.0 * k as f64 / n as f64;
                Vec2::new(x, 0.1 * fmath::sin(x))
            })
            .collect();
        let c = SplinedCurve::new(&InterfaceCurve::new(nodes, 0.0));
        let l = c.total_arc();
        let h = l / 600.0;
        for frac in [0.3, 0.5, 0.7] {
            let s = l * frac;
            let k = |s: f64| c.frame_at_arc(s).curvature;
            let fd = (-k(s + 2.0 * h) + 8.0 * k(s + h) - 8.0 * k(s - h) + k(s - 2.0 * h)) / (12.0 * h);
            assert_abs_diff_eq!(c.curvature_deriv_at_arc(s), fd, epsilon = 1e-3);
        }
    }

    #[test]
    fn projection_idempotent_and_gradient_unit() {
        let r = 0.8;
        let n = 240;
        let nodes: Vec<Vec2> = (0..=n)
            .map(|k| {
                let a = 0.3 + 2.0 * k as f64 / n as f64;
                Vec2::new(r * fmath::cos(a), r * fmath::sin(a))
            })
            .collect();
        let c = SplinedCurve::new(&InterfaceCurve::new(nodes, 0.0));
        let mut rng = crate::rng::SplitMix64::new(3);
        for _ in 0..100 {
            let s = rng.uniform(0.2, c.total_arc() - 0.2);
            let off = rng.uniform(-0.1, 0.1);
            let f = c.frame_at_arc(s);
            let x = f.point + f.normal * off;
            match c.project(x) {
                Projection::Interior { dist, foot, .. } => {
                    assert_abs_diff_eq!(dist, off, epsilon = 1e-8);
                    // idempotence
                    match c.project(foot) {
                        Projection::Interior { dist: d2, .. } => {
                            assert!(fmath::abs(d2) < 1e-10)
                        }
                        _ => panic!("foot point must project to itself"),
                    }
                    // frame consistency: normal agrees with the offset sign
                    if off.abs() > 1e-4 {
                        let dir = (x - foot) / (x - foot).norm();
                        let sgn = if off > 0.0 { 1.0 } else { -1.0 };
                        assert!((f.normal * sgn - dir).norm() < 1e-4);
                    }
                }
                _ => panic!("expected interior projection"),
            }
            // |grad s| = 1 by centered differences along the normal
            let delta = 1e-4;
            let sd = |p: Vec2| match c.project(p) {
                Projection::Interior { dist, .. } => dist,
                Projection::Endpoint { dist, .. } => dist,
            };
            let g = (sd(x + f.normal * delta) - sd(x - f.normal * delta)) / (2.0 * delta);
            assert_abs_diff_eq!(g, 1.0, epsilon = 5e-3);
        }
    }

    #[test]
    fn witness_orientation() {
        let c = diameter(21).oriented_with_witness(Vec2::new(0.0, 0.5));
        // A = upper half: travel +x, normal +y
        assert!(c.nodes[0].x < c.nodes[20].x);
        let c2 = diameter(21).oriented_with_witness(Vec2::new(0.0, -0.5));
        assert!(c2.nodes[0].x > c2.nodes[20].x);
    }

    #[test]
    fn extended_projection_past_endpoints() {
        let c = SplinedCurve::new(&diameter(41));
        let (s, d) = c.project_extended(Vec2::new(1.3, 0.1));
        assert_abs_diff_eq!(s, 2.3, epsilon = 1e-10);
        assert_abs_diff_eq!(d, 0.1, epsilon = 1e-10);
        let (s, d) = c.project_extended(Vec2::new(-1.2, -0.05));
        assert_abs_diff_eq!(s, -0.2, epsilon = 1e-10);
        assert_abs_diff_eq!(d, -0.05, epsilon = 1e-10);
    }

    #[test]
    fn self_intersection_detection() {
        let good = diameter(11);
        assert!(!good.has_self_intersection());
        let bad = InterfaceCurve::new(
            alloc::vec![
                Vec2::new(-1.0, 0.0),
                Vec2::new(1.0, 0.1),
                Vec2::new(0.8, 0.3),
                Vec2::new(-0.9, 0.05),
                Vec2::new(0.9, -0.4),
            ],
            0.0,
        );
        assert!(bad.has_self_intersection());
    }
}
