//! Test functions `Ψ: [0, 1) → ℂ` applied to orbit coordinates.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::circle::{circle_norm, e};
use crate::error::{Error, Result};

pub const MIN_TABLE_KNOTS: usize = 1024;

const BUMP_FLOOR: f64 = -3.0 / 7.0;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Psi {
    /// `Ψ ≡ 1`.
    One,
    /// `e(x)`.
    Exp,
    /// `1 - 4|x - 1/2|`, mean zero on `[0, 1)`.
    Tent,
    /// Equal to 1 within circle distance 1/10 of zero, falling linearly to
    /// `-3/7` at distance 1/5 and constant beyond; mean zero.
    Bump,
    /// Values at equally spaced knots `0, 1/(m-1), …, 1`, linearly
    /// interpolated.
    Table(Vec<f64>),
}

impl Psi {
    pub fn table(knots: Vec<f64>) -> Result<Psi> {
        if knots.len() < MIN_TABLE_KNOTS {
            return Err(Error::arg(format!(
                "sampled test function needs at least {MIN_TABLE_KNOTS} knots, got {}",
                knots.len()
            )));
        }
        if knots.iter().any(|v| !v.is_finite()) {
            return Err(Error::arg("sampled test function has non-finite values"));
        }
        Ok(Psi::Table(knots))
    }

    pub fn eval(&self, x: f64) -> Complex64 {
        match self {
            Psi::One => Complex64::new(1.0, 0.0),
            Psi::Exp => e(x),
            Psi::Tent => Complex64::new(1.0 - 4.0 * (x - 0.5).abs(), 0.0),
            Psi::Bump => {
                let d = circle_norm(x);
                let v = if d <= 0.1 {
                    1.0
                } else if d <= 0.2 {
                    1.0 + (d - 0.1) / 0.1 * (BUMP_FLOOR - 1.0)
                } else {
                    BUMP_FLOOR
                };
                Complex64::new(v, 0.0)
            }
            Psi::Table(knots) => {
                let m = knots.len() - 1;
                let t = x.clamp(0.0, 1.0) * m as f64;
                let i = (t.floor() as usize).min(m - 1);
                let frac = t - i as f64;
                Complex64::new(knots[i] + frac * (knots[i + 1] - knots[i]), 0.0)
            }
        }
    }

    pub fn sup_norm(&self) -> f64 {
        match self {
            Psi::One | Psi::Exp | Psi::Tent | Psi::Bump => 1.0,
            Psi::Table(k) => k.iter().fold(0.0, |a, v| a.max(v.abs())),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Psi::One => "one",
            Psi::Exp => "exp",
            Psi::Tent => "tent",
            Psi::Bump => "bump",
            Psi::Table(_) => "table",
        }
    }
}
