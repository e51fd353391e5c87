//! Scalar cutoff profiles used by the localization family and the weight.

use crate::fmath;

/// Quintic smoothstep `s^3 (10 - 15 s + 6 s^2)` clamped to `[0, 1]`;
/// value, first and second derivative vanish at both ends.
#[inline]
pub fn smoothstep(s: f64) -> f64 {
    if s <= 0.0 {
        0.0
    } else if s >= 1.0 {
        1.0
    } else {
        s * s * s * (10.0 - 15.0 * s + 6.0 * s * s)
    }
}

#[inline]
pub fn smoothstep_d1(s: f64) -> f64 {
    if s <= 0.0 || s >= 1.0 {
        0.0
    } else {
        30.0 * s * s * (1.0 - s) * (1.0 - s)
    }
}

#[inline]
pub fn smoothstep_d2(s: f64) -> f64 {
    if s <= 0.0 || s >= 1.0 {
        0.0
    } else {
        60.0 * s * (1.0 - s) * (1.0 - 2.0 * s)
    }
}

/// Plateau cutoff: 1 on `[-1/2, 1/2]`, 0 outside `(-1, 1)`, C^2 bridges.
#[inline]
pub fn plateau(u: f64) -> f64 {
    let a = fmath::abs(u);
    if a <= 0.5 {
        1.0
    } else if a >= 1.0 {
        0.0
    } else {
        1.0 - smoothstep(2.0 * (a - 0.5))
    }
}

/// Wide plateau: 1 on `[-3/2, 3/2]`, 0 outside `(-2, 2)`.
#[inline]
pub fn plateau_wide(u: f64) -> f64 {
    let a = fmath::abs(u);
    if a <= 1.5 {
        1.0
    } else if a >= 2.0 {
        0.0
    } else {
        1.0 - smoothstep(2.0 * (a - 1.5))
    }
}

/// Quadratic cutoff `zeta(s) = plateau(s^2) (1 - s^2)`: equals `1 - s^2`
/// near 0, supported in `(-1, 1)`, values in `[0, 1]`.
#[inline]
pub fn zeta(s: f64) -> f64 {
    let s2 = s * s;
    if s2 >= 1.0 {
        0.0
    } else {
        plateau(s2) * (1.0 - s2)
    }
}

/// Companion cutoff with a plateau: 1 on `[-1, 1]`, `1 - (|s| - 1)^2` just
/// outside, supported in `(-sqrt 2, sqrt 2)`.
#[inline]
pub fn zeta_tilde(s: f64) -> f64 {
    let a = fmath::abs(s);
    if a <= 1.0 {
        return 1.0;
    }
    let s2 = s * s;
    if s2 >= 2.0 {
        return 0.0;
    }
    let q = 1.0 - (a - 1.0) * (a - 1.0);
    plateau_wide(s2) * q
}

/// C^2 monotone odd truncation of the negated identity: `-s` on
/// `[-1/2, 1/2]`, `-1` for `s >= 1`, `+1` for `s <= -1`.
///
/// The bridge is the quintic `t + 4 t^3 - 7 t^4 + 3 t^5` (monotone on
/// `[0, 1]` with unit slope and zero curvature at 0, zero slope and
/// curvature at 1).
#[inline]
pub fn weight_profile(s: f64) -> f64 {
    let a = fmath::abs(s);
    let v = if a <= 0.5 {
        a
    } else if a >= 1.0 {
        1.0
    } else {
        let t = 2.0 * a - 1.0;
        let g = t + 4.0 * t * t * t - 7.0 * t * t * t * t + 3.0 * t * t * t * t * t;
        0.5 + 0.5 * g
    };
    -fmath::copysign(v, s)
}
