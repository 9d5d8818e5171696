//! The circle ℝ/ℤ: canonical residues, distance to the nearest integer, and
//! the additive character `e(x) = exp(2πix)`.

use num_complex::Complex64;

use crate::dd::Dd;

/// Largest `f64` strictly below one.
pub const BELOW_ONE: f64 = 1.0 - f64::EPSILON / 2.0;

/// Maps a value that should lie in `[0, 1)` but may have rounded up to
/// `1.0` onto the predecessor of one.
#[inline]
pub fn unit_interval(u: f64) -> f64 {
    if u >= 1.0 {
        BELOW_ONE
    } else {
        u
    }
}

/// `x - floor(x)`.
#[inline]
pub fn frac(x: f64) -> f64 {
    unit_interval(x - x.floor())
}

/// `‖x‖_{ℝ/ℤ} = min(u, 1 - u)` with `u = frac(x)`.
#[inline]
pub fn circle_norm(x: f64) -> f64 {
    let u = frac(x);
    u.min(1.0 - u)
}

pub fn circle_norm_dd(x: Dd) -> f64 {
    let u = x.frac();
    u.to_f64().min((Dd::ONE - u).to_f64()).max(0.0)
}

/// `e(x) = exp(2πi x)`, reducing `x` mod 1 first.
#[inline]
pub fn e(x: f64) -> Complex64 {
    Complex64::cis(std::f64::consts::TAU * frac(x))
}

#[inline]
pub fn e_dd(x: Dd) -> Complex64 {
    Complex64::cis(std::f64::consts::TAU * x.frac().to_f64())
}
