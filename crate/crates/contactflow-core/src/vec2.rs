//! Plane vectors and 2x2 matrices.

use crate::fmath;
use core::ops::{Add, AddAssign, Div, Mul, Neg, Sub, SubAssign};

/// A point or vector in the plane.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Vec2 {
    pub x: f64,
    pub y: f64,
}

impl Vec2 {
    pub const ZERO: Vec2 = Vec2 { x: 0.0, y: 0.0 };

    #[inline(always)]
    pub const fn new(x: f64, y: f64) -> Self {
        Vec2 { x, y }
    }

    #[inline(always)]
    pub fn dot(self, o: Vec2) -> f64 {
        self.x * o.x + self.y * o.y
    }

    /// z-component of the 3D cross product.
    #[inline(always)]
    pub fn cross(self, o: Vec2) -> f64 {
        self.x * o.y - self.y * o.x
    }

    #[inline(always)]
    pub fn norm_sq(self) -> f64 {
        self.dot(self)
    }

    #[inline(always)]
    pub fn norm(self) -> f64 {
        fmath::hypot(self.x, self.y)
    }

    #[inline(always)]
    pub fn dist(self, o: Vec2) -> f64 {
        (self - o).norm()
    }

    /// Unit vector in the same direction; returns `None` for near-zero input.
    pub fn normalized(self) -> Option<Vec2> {
        let n = self.norm();
        if n < 1e-300 {
            None
        } else {
            Some(self / n)
        }
    }

    /// Counter-clockwise rotation by 90 degrees (the constant rotation `J`).
    #[inline(always)]
    pub fn rot_ccw(self) -> Vec2 {
        Vec2::new(-self.y, self.x)
    }

    /// Clockwise rotation by 90 degrees (`J` transposed).
    #[inline(always)]
    pub fn rot_cw(self) -> Vec2 {
        Vec2::new(self.y, -self.x)
    }

    #[inline(always)]
    pub fn angle(self) -> f64 {
        fmath::atan2(self.y, self.x)
    }

    /// Outer product `self * o^T`.
    #[inline(always)]
    pub fn outer(self, o: Vec2) -> Mat2 {
        Mat2 {
            a: self.x * o.x,
            b: self.x * o.y,
            c: self.y * o.x,
            d: self.y * o.y,
        }
    }
}

impl Add for Vec2 {
    type Output = Vec2;
    #[inline(always)]
    fn add(self, o: Vec2) -> Vec2 {
        Vec2::new(self.x + o.x, self.y + o.y)
    }
}
impl Sub for Vec2 {
    type Output = Vec2;
    #[inline(always)]
    fn sub(self, o: Vec2) -> Vec2 {
        Vec2::new(self.x - o.x, self.y - o.y)
    }
}
impl Mul<f64> for Vec2 {
    type Output = Vec2;
    #[inline(always)]
    fn mul(self, s: f64) -> Vec2 {
        Vec2::new(self.x * s, self.y * s)
    }
}
impl Mul<Vec2> for f64 {
    type Output = Vec2;
    #[inline(always)]
    fn mul(self, v: Vec2) -> Vec2 {
        v * self
    }
}
impl Div<f64> for Vec2 {
    type Output = Vec2;
    #[inline(always)]
    fn div(self, s: f64) -> Vec2 {
        Vec2::new(self.x / s, self.y / s)
    }
}
impl Neg for Vec2 {
    type Output = Vec2;
    #[inline(always)]
    fn neg(self) -> Vec2 {
        Vec2::new(-self.x, -self.y)
    }
}
impl AddAssign for Vec2 {
    #[inline(always)]
    fn add_assign(&mut self, o: Vec2) {
        self.x += o.x;
        self.y += o.y;
    }
}
impl SubAssign for Vec2 {
    #[inline(always)]
    fn sub_assign(&mut self, o: Vec2) {
        self.x -= o.x;
        self.y -= o.y;
    }
}

/// Row-major 2x2 matrix `[[a, b], [c, d]]`.
///
/// Used as a Jacobian with the convention `M[i][j] = d F_i / d x_j`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Mat2 {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
}

impl Mat2 {
    pub const ZERO: Mat2 = Mat2 {
        a: 0.0,
        b: 0.0,
        c: 0.0,
        d: 0.0,
    };
    pub const IDENTITY: Mat2 = Mat2 {
        a: 1.0,
        b: 0.0,
        c: 0.0,
        d: 1.0,
    };

    /// Rotation by `angle` (counter-clockwise).
    pub fn rotation(angle: f64) -> Mat2 {
        let (s, c) = (fmath::sin(angle), fmath::cos(angle));
        Mat2 {
            a: c,
            b: -s,
            c: s,
            d: c,
        }
    }

    #[inline(always)]
    pub fn apply(self, v: Vec2) -> Vec2 {
        Vec2::new(self.a * v.x + self.b * v.y, self.c * v.x + self.d * v.y)
    }

    /// `M^T v`.
    #[inline(always)]
    pub fn apply_transposed(self, v: Vec2) -> Vec2 {
        Vec2::new(self.a * v.x + self.c * v.y, self.b * v.x + self.d * v.y)
    }

    #[inline(always)]
    pub fn transpose(self) -> Mat2 {
        Mat2 {
            a: self.a,
            b: self.c,
            c: self.b,
            d: self.d,
        }
    }

    #[inline(always)]
    pub fn trace(self) -> f64 {
        self.a + self.d
    }

    /// Symmetric part `(M + M^T)/2`.
    #[inline(always)]
    pub fn sym(self) -> Mat2 {
        let off = 0.5 * (self.b + self.c);
        Mat2 {
            a: self.a,
            b: off,
            c: off,
            d: self.d,
        }
    }

    /// Frobenius norm.
    pub fn norm(self) -> f64 {
        fmath::sqrt(self.a * self.a + self.b * self.b + self.c * self.c + self.d * self.d)
    }

    /// Double contraction `A : B`.
    #[inline(always)]
    pub fn ddot(self, o: Mat2) -> f64 {
        self.a * o.a + self.b * o.b + self.c * o.c + self.d * o.d
    }
}

impl Add for Mat2 {
    type Output = Mat2;
    fn add(self, o: Mat2) -> Mat2 {
        Mat2 {
            a: self.a + o.a,
            b: self.b + o.b,
            c: self.c + o.c,
            d: self.d + o.d,
        }
    }
}
impl Sub for Mat2 {
    type Output = Mat2;
    fn sub(self, o: Mat2) -> Mat2 {
        Mat2 {
            a: self.a - o.a,
            b: self.b - o.b,
            c: self.c - o.c,
            d: self.d - o.d,
        }
    }
}
impl Mul<f64> for Mat2 {
    type Output = Mat2;
    fn mul(self, s: f64) -> Mat2 {
        Mat2 {
            a: self.a * s,
            b: self.b * s,
            c: self.c * s,
            d: self.d * s,
        }
    }
}
impl Mul<Mat2> for Mat2 {
    type Output = Mat2;
    fn mul(self, o: Mat2) -> Mat2 {
        Mat2 {
            a: self.a * o.a + self.b * o.c,
            b: self.a * o.b + self.b * o.d,
            c: self.c * o.a + self.d * o.c,
            d: self.c * o.b + self.d * o.d,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rotations_are_quarter_turns() {
        let v = Vec2::new(1.0, 2.0);
        assert_eq!(v.rot_ccw(), Vec2::new(-2.0, 1.0));
        assert_eq!(v.rot_cw(), Vec2::new(2.0, -1.0));
        assert_eq!(v.rot_ccw().rot_cw(), v);
    }

    #[test]
    fn rotation_matrix_maps_unit_vectors() {
        let r = Mat2::rotation(core::f64::consts::FRAC_PI_2);
        let e = r.apply(Vec2::new(1.0, 0.0));
        assert!((e - Vec2::new(0.0, 1.0)).norm() < 1e-15);
    }

    #[test]
    fn sym_and_trace() {
        let m = Mat2 {
            a: 1.0,
            b: 2.0,
            c: 4.0,
            d: 3.0,
        };
        let s = m.sym();
        assert_eq!(s.b, 3.0);
        assert_eq!(s.c, 3.0);
        assert_eq!(m.trace(), 4.0);
    }
}
