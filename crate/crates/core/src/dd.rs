//! Double-double ("compensated") reals: an unevaluated sum `hi + lo` with
//! `|lo| <= ulp(hi)/2`, giving roughly 106 bits of significand.
//!
//! Used wherever a phase like `n^2 * alpha * beta` must be reduced mod 1
//! for `n` up to `10^6`; plain `f64` keeps only a few fractional digits there.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, Neg, Sub};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Dd {
    pub hi: f64,
    pub lo: f64,
}

#[inline]
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    (s, (a - (s - bb)) + (b - bb))
}

#[inline]
fn quick_two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    (s, b - (s - a))
}

#[inline]
fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    (p, a.mul_add(b, -p))
}

impl Dd {
    pub const ZERO: Dd = Dd { hi: 0.0, lo: 0.0 };
    pub const ONE: Dd = Dd { hi: 1.0, lo: 0.0 };

    #[inline]
    pub const fn from_f64(x: f64) -> Dd {
        Dd { hi: x, lo: 0.0 }
    }

    pub fn from_i64(n: i64) -> Dd {
        Self::from_i128(n as i128)
    }

    /// Exact for `|n| < 2^106`.
    pub fn from_i128(n: i128) -> Dd {
        let hi = n as f64;
        let rest = n - hi as i128;
        let (hi, lo) = quick_two_sum(hi, rest as f64);
        Dd { hi, lo }
    }

    #[inline]
    pub fn to_f64(self) -> f64 {
        self.hi + self.lo
    }

    pub fn is_finite(self) -> bool {
        self.hi.is_finite() && self.lo.is_finite()
    }

    pub fn abs(self) -> Dd {
        if self.hi < 0.0 || (self.hi == 0.0 && self.lo < 0.0) {
            -self
        } else {
            self
        }
    }

    pub fn floor(self) -> Dd {
        let fh = self.hi.floor();
        if fh == self.hi {
            let (hi, lo) = quick_two_sum(fh, self.lo.floor());
            Dd { hi, lo }
        } else {
            Dd { hi: fh, lo: 0.0 }
        }
    }

    /// `x - floor(x)`, in `[0, 1)` up to double-double rounding.
    pub fn frac(self) -> Dd {
        self - self.floor()
    }

    /// Fractional part rounded to `f64`, never returning `1.0`.
    pub fn frac_f64(self) -> f64 {
        crate::circle::unit_interval(self.frac().to_f64())
    }

    pub fn sqrt(self) -> Dd {
        if self.hi <= 0.0 {
            return Dd::ZERO;
        }
        let q = Dd::from_f64(self.hi.sqrt());
        q + (self - q * q) / (q * Dd::from_f64(2.0))
    }

    pub fn cbrt(self) -> Dd {
        if self.hi == 0.0 {
            return Dd::ZERO;
        }
        let mut x = Dd::from_f64(self.hi.cbrt());
        for _ in 0..2 {
            let x2 = x * x;
            x = x - (x2 * x - self) / (x2 * Dd::from_f64(3.0));
        }
        x
    }

    pub fn recip(self) -> Dd {
        Dd::ONE / self
    }
}

impl From<f64> for Dd {
    fn from(x: f64) -> Dd {
        Dd::from_f64(x)
    }
}

impl From<i64> for Dd {
    fn from(n: i64) -> Dd {
        Dd::from_i64(n)
    }
}

impl Add for Dd {
    type Output = Dd;
    #[inline]
    fn add(self, b: Dd) -> Dd {
        let (s, e) = two_sum(self.hi, b.hi);
        let (t, f) = two_sum(self.lo, b.lo);
        let (s, e) = quick_two_sum(s, e + t);
        let (hi, lo) = quick_two_sum(s, e + f);
        Dd { hi, lo }
    }
}

impl AddAssign for Dd {
    fn add_assign(&mut self, b: Dd) {
        *self = *self + b;
    }
}

impl Neg for Dd {
    type Output = Dd;
    #[inline]
    fn neg(self) -> Dd {
        Dd {
            hi: -self.hi,
            lo: -self.lo,
        }
    }
}

impl Sub for Dd {
    type Output = Dd;
    #[inline]
    fn sub(self, b: Dd) -> Dd {
        self + (-b)
    }
}

impl Mul for Dd {
    type Output = Dd;
    #[inline]
    fn mul(self, b: Dd) -> Dd {
        let (p, e) = two_prod(self.hi, b.hi);
        let e = e + (self.hi * b.lo + self.lo * b.hi);
        let (hi, lo) = quick_two_sum(p, e);
        Dd { hi, lo }
    }
}

impl Div for Dd {
    type Output = Dd;
    fn div(self, b: Dd) -> Dd {
        let q1 = self.hi / b.hi;
        let r = self - b * Dd::from_f64(q1);
        let q2 = r.hi / b.hi;
        let r = r - b * Dd::from_f64(q2);
        let q3 = r.hi / b.hi;
        let (hi, lo) = quick_two_sum(q1, q2);
        Dd { hi, lo } + Dd::from_f64(q3)
    }
}

impl PartialOrd for Dd {
    fn partial_cmp(&self, other: &Dd) -> Option<Ordering> {
        match self.hi.partial_cmp(&other.hi) {
            Some(Ordering::Equal) => self.lo.partial_cmp(&other.lo),
            o => o,
        }
    }
}

impl fmt::Display for Dd {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.lo == 0.0 {
            write!(f, "{}", self.hi)
        } else {
            write!(f, "{}{:+e}", self.hi, self.lo)
        }
    }
}

/// Parses a plain decimal (`-12.5e-3`) with double-double precision.
///
/// Mantissas up to 31 significant digits and exponents up to 44 in
/// magnitude are converted without intermediate `f64` rounding.
impl FromStr for Dd {
    type Err = crate::Error;

    fn from_str(s: &str) -> crate::Result<Dd> {
        let bad = || crate::Error::Format(format!("not a decimal number: {s:?}"));
        let t = s.trim();
        let (neg, body) = match t.strip_prefix('-') {
            Some(r) => (true, r),
            None => (false, t.strip_prefix('+').unwrap_or(t)),
        };
        let (mant, exp) = match body.find(['e', 'E']) {
            Some(i) => (&body[..i], body[i + 1..].parse::<i32>().map_err(|_| bad())?),
            None => (body, 0),
        };
        let (int_part, frac_part) = match mant.find('.') {
            Some(i) => (&mant[..i], &mant[i + 1..]),
            None => (mant, ""),
        };
        if int_part.is_empty() && frac_part.is_empty() {
            return Err(bad());
        }
        if !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit()) {
            return Err(bad());
        }
        let digits: String = format!("{int_part}{frac_part}");
        let digits = digits.trim_start_matches('0');
        let exp10 = exp - frac_part.len() as i32;
        let value = if digits.len() <= 31 && exp10.abs() <= 44 {
            let m: i128 = if digits.is_empty() { 0 } else { digits.parse().map_err(|_| bad())? };
            let m = Dd::from_i128(m);
            let p = pow10(exp10.unsigned_abs());
            if exp10 >= 0 {
                m * p
            } else {
                m / p
            }
        } else {
            Dd::from_f64(body.parse::<f64>().map_err(|_| bad())?)
        };
        Ok(if neg { -value } else { value })
    }
}

fn pow10(k: u32) -> Dd {
    // 10^k = 2^k * 5^k and 5^44 < 2^106, so this is exact.
    Dd::from_i128(5i128.pow(k)) * Dd::from_f64(2f64.powi(k as i32))
}
