//! Clamped cubic splines for planar curves.

use crate::vec2::Vec2;
use alloc::vec::Vec;

/// Scalar cubic spline on a strictly increasing knot vector.
///
/// Stored in second-derivative form; clamped end conditions (prescribed end
/// slopes) so that contact-point tangents are controlled one-sidedly.
#[derive(Debug, Clone)]
pub struct CubicSpline {
    t: Vec<f64>,
    y: Vec<f64>,
    m: Vec<f64>, // second derivatives at knots
}

impl CubicSpline {
    /// Clamped spline with prescribed end slopes `d0`, `dn`.
    pub fn clamped(t: &[f64], y: &[f64], d0: f64, dn: f64) -> CubicSpline {
        let n = t.len();
        assert!(n >= 2 && y.len() == n);
        if n == 2 {
            // single cubic: solve the 2x2 clamped system
            // [h/3, h/6; h/6, h/3] [m0; m1] = [sec - d0; dn - sec]
            let h = t[1] - t[0];
            let sec = (y[1] - y[0]) / h;
            let a = h / 3.0;
            let b = h / 6.0;
            let det = a * a - b * b;
            let r0 = sec - d0;
            let r1 = dn - sec;
            return CubicSpline {
                t: t.to_vec(),
                y: y.to_vec(),
                m: alloc::vec![(a * r0 - b * r1) / det, (-b * r0 + a * r1) / det],
            };
        }
        // tridiagonal system for second derivatives, clamped rows at the ends
        let mut sub = alloc::vec![0.0; n];
        let mut diag = alloc::vec![0.0; n];
        let mut sup = alloc::vec![0.0; n];
        let mut rhs = alloc::vec![0.0; n];
        let h0 = t[1] - t[0];
        diag[0] = h0 / 3.0;
        sup[0] = h0 / 6.0;
        rhs[0] = (y[1] - y[0]) / h0 - d0;
        for i in 1..n - 1 {
            let hl = t[i] - t[i - 1];
            let hr = t[i + 1] - t[i];
            sub[i] = hl / 6.0;
            diag[i] = (hl + hr) / 3.0;
            sup[i] = hr / 6.0;
            rhs[i] = (y[i + 1] - y[i]) / hr - (y[i] - y[i - 1]) / hl;
        }
        let hn = t[n - 1] - t[n - 2];
        sub[n - 1] = hn / 6.0;
        diag[n - 1] = hn / 3.0;
        rhs[n - 1] = dn - (y[n - 1] - y[n - 2]) / hn;
        // Thomas algorithm
        let mut m = alloc::vec![0.0; n];
        for i in 1..n {
            let w = sub[i] / diag[i - 1];
            diag[i] -= w * sup[i - 1];
            rhs[i] -= w * rhs[i - 1];
        }
        m[n - 1] = rhs[n - 1] / diag[n - 1];
        for i in (0..n - 1).rev() {
            m[i] = (rhs[i] - sup[i] * m[i + 1]) / diag[i];
        }
        CubicSpline {
            t: t.to_vec(),
            y: y.to_vec(),
            m,
        }
    }

    #[inline]
    fn segment(&self, x: f64) -> usize {
        // binary search for the interval containing x, clamped to the range
        let n = self.t.len();
        if x <= self.t[0] {
            return 0;
        }
        if x >= self.t[n - 1] {
            return n - 2;
        }
        let mut lo = 0usize;
        let mut hi = n - 1;
        while hi - lo > 1 {
            let mid = (lo + hi) / 2;
            if self.t[mid] <= x {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        lo
    }

    /// Value, first and second derivative at `x` (extrapolates the end cubics).
    pub fn eval2(&self, x: f64) -> (f64, f64, f64) {
        let i = self.segment(x);
        let (t0, t1) = (self.t[i], self.t[i + 1]);
        let h = t1 - t0;
        let a = (t1 - x) / h;
        let b = (x - t0) / h;
        let (y0, y1) = (self.y[i], self.y[i + 1]);
        let (m0, m1) = (self.m[i], self.m[i + 1]);
        let v = a * y0 + b * y1 + ((a * a * a - a) * m0 + (b * b * b - b) * m1) * h * h / 6.0;
        let d = (y1 - y0) / h - (3.0 * a * a - 1.0) / 6.0 * h * m0 + (3.0 * b * b - 1.0) / 6.0 * h * m1;
        let dd = a * m0 + b * m1;
        (v, d, dd)
    }

    /// Third derivative (piecewise constant).
    pub fn third_deriv(&self, x: f64) -> f64 {
        let i = self.segment(x);
        (self.m[i + 1] - self.m[i]) / (self.t[i + 1] - self.t[i])
    }
}

/// A planar curve as a pair of clamped scalar splines over chord-length knots,
/// with an accurate arclength table.
#[derive(Debug, Clone)]
pub struct CurveSpline {
    pub knots: Vec<f64>,
    sx: CubicSpline,
    sy: CubicSpline,
    /// Arclength at each knot.
    pub arc: Vec<f64>,
}

impl CurveSpline {
    pub fn new(points: &[Vec2]) -> CurveSpline {
        let n = points.len();
        assert!(n >= 3, "curve spline needs at least 3 points");
        let mut knots = Vec::with_capacity(n);
        knots.push(0.0);
        for i in 1..n {
            let d = points[i].dist(points[i - 1]);
            knots.push(knots[i - 1] + d);
        }
        // one-sided end tangents from a 3-point parabola fit
        let end_tangent = |i0: usize, i1: usize, i2: usize| -> Vec2 {
            let (t0, t1, t2) = (knots[i0], knots[i1], knots[i2]);
            let (p0, p1, p2) = (points[i0], points[i1], points[i2]);
            // derivative of the Lagrange parabola at t0
            let d0 = (2.0 * t0 - t1 - t2) / ((t0 - t1) * (t0 - t2));
            let d1 = (2.0 * t0 - t0 - t2) / ((t1 - t0) * (t1 - t2));
            let d2 = (2.0 * t0 - t0 - t1) / ((t2 - t0) * (t2 - t1));
            p0 * d0 + p1 * d1 + p2 * d2
        };
        let tan_start = end_tangent(0, 1, 2);
        let tan_end = end_tangent(n - 1, n - 2, n - 3);
        let xs: Vec<f64> = points.iter().map(|p| p.x).collect();
        let ys: Vec<f64> = points.iter().map(|p| p.y).collect();
        let sx = CubicSpline::clamped(&knots, &xs, tan_start.x, tan_end.x);
        let sy = CubicSpline::clamped(&knots, &ys, tan_start.y, tan_end.y);
        // arclength per segment by 3-point Gauss-Legendre on |c'|
        let mut arc = Vec::with_capacity(n);
        arc.push(0.0);
        let gauss = [
            (0.5 - 0.5 * crate::fmath::sqrt(0.6), 5.0 / 18.0),
            (0.5, 8.0 / 18.0),
            (0.5 + 0.5 * crate::fmath::sqrt(0.6), 5.0 / 18.0),
        ];
        for i in 1..n {
            let (a, b) = (knots[i - 1], knots[i]);
            let mut len = 0.0;
            for (q, w) in gauss {
                let t = a + (b - a) * q;
                let dx = sx.eval2(t).1;
                let dy = sy.eval2(t).1;
                len += w * crate::fmath::hypot(dx, dy);
            }
            arc.push(arc[i - 1] + len * (b - a));
        }
        CurveSpline { knots, sx, sy, arc }
    }

    pub fn total_arc(&self) -> f64 {
        *self.arc.last().unwrap()
    }

    pub fn param_range(&self) -> (f64, f64) {
        (self.knots[0], *self.knots.last().unwrap())
    }

    /// Position, velocity and acceleration in the chord parameter.
    pub fn eval(&self, t: f64) -> (Vec2, Vec2, Vec2) {
        let (x, dx, ddx) = self.sx.eval2(t);
        let (y, dy, ddy) = self.sy.eval2(t);
        (Vec2::new(x, y), Vec2::new(dx, dy), Vec2::new(ddx, ddy))
    }

    pub fn third(&self, t: f64) -> Vec2 {
        Vec2::new(self.sx.third_deriv(t), self.sy.third_deriv(t))
    }

    /// Chord parameter at a given arclength (monotone inversion).
    pub fn param_at_arc(&self, s: f64) -> f64 {
        let n = self.arc.len();
        let s = s.clamp(0.0, self.total_arc());
        // locate segment
        let mut lo = 0usize;
        let mut hi = n - 1;
        while hi - lo > 1 {
            let mid = (lo + hi) / 2;
            if self.arc[mid] <= s {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        // Newton on s(t) within the segment, seeded by linear interpolation
        let (s0, s1) = (self.arc[lo], self.arc[lo + 1]);
        let (t0, t1) = (self.knots[lo], self.knots[lo + 1]);
        let mut t = if s1 > s0 {
            t0 + (t1 - t0) * (s - s0) / (s1 - s0)
        } else {
            t0
        };
        for _ in 0..4 {
            let ds = self.arc_at_param_local(lo, t) - s;
            let speed = {
                let (_, d, _) = self.eval(t);
                d.norm()
            };
            if speed < 1e-14 {
                break;
            }
            t -= ds / speed;
            t = t.clamp(t0, t1);
        }
        t
    }

    /// Arclength at chord parameter `t` within segment `seg` (local Gauss).
    fn arc_at_param_local(&self, seg: usize, t: f64) -> f64 {
        let a = self.knots[seg];
        let gauss = [
            (0.5 - 0.5 * crate::fmath::sqrt(0.6), 5.0 / 18.0),
            (0.5, 8.0 / 18.0),
            (0.5 + 0.5 * crate::fmath::sqrt(0.6), 5.0 / 18.0),
        ];
        let mut len = 0.0;
        for (q, w) in gauss {
            let tt = a + (t - a) * q;
            let (_, d, _) = self.eval(tt);
            len += w * d.norm();
        }
        self.arc[seg] + len * (t - a)
    }

    /// Arclength at an arbitrary chord parameter.
    pub fn arc_at_param(&self, t: f64) -> f64 {
        let n = self.knots.len();
        let t = t.clamp(self.knots[0], self.knots[n - 1]);
        let mut lo = 0usize;
        let mut hi = n - 1;
        while hi - lo > 1 {
            let mid = (lo + hi) / 2;
            if self.knots[mid] <= t {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        self.arc_at_param_local(lo, t)
    }
}
