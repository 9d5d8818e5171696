//! Real parameters given as symbolic tokens, decimals or fractions.

use std::str::FromStr;

use crate::dd::Dd;
use crate::error::{Error, Result};
use crate::polyseq::TorusPolynomial;

#[derive(Clone, Debug, PartialEq)]
pub struct Param {
    pub token: String,
    pub value: Dd,
    /// `(num, den)` for `a/b` and integer input.
    pub rational: Option<(i64, i64)>,
}

impl Param {
    /// `n ↦ value·n` on the torus, exact for rational input.
    pub fn linear_phase(&self) -> TorusPolynomial {
        match self.rational {
            Some((a, b)) => TorusPolynomial::linear_rational(a, b),
            None => TorusPolynomial::linear(self.value),
        }
    }
}

/// Accepts `sqrt2`, `sqrt3`, `sqrt5`, `cbrt2`, `golden`, `sqrtN` for any
/// positive integer `N`, fractions `a/b`, and decimals.
pub fn parse_param(token: &str) -> Result<Param> {
    let t = token.trim();
    let bad = || Error::arg(format!("cannot parse parameter `{t}`"));
    let (value, rational) = if let Some(rest) = t.strip_prefix("sqrt") {
        let n: u64 = rest.parse().map_err(|_| bad())?;
        (Dd::from_i64(n as i64).sqrt(), None)
    } else if let Some(rest) = t.strip_prefix("cbrt") {
        let n: i64 = rest.parse().map_err(|_| bad())?;
        (Dd::from_i64(n).cbrt(), None)
    } else if t == "golden" {
        ((Dd::ONE + Dd::from_i64(5).sqrt()) * Dd::from_f64(0.5), None)
    } else if let Some((a, b)) = t.split_once('/') {
        let a: i64 = a.trim().parse().map_err(|_| bad())?;
        let b: i64 = b.trim().parse().map_err(|_| bad())?;
        if b == 0 {
            return Err(Error::arg(format!("zero denominator in `{t}`")));
        }
        (Dd::from_i64(a) / Dd::from_i64(b), Some((a, b)))
    } else if let Ok(n) = t.parse::<i64>() {
        (Dd::from_i64(n), Some((n, 1)))
    } else {
        (Dd::from_str(t).map_err(|_| bad())?, None)
    };
    Ok(Param {
        token: t.to_string(),
        value,
        rational,
    })
}

/// Parses `1e3,1e4,10000` style integer lists.
pub fn parse_ladder(s: &str) -> Result<Vec<u64>> {
    s.split(',')
        .map(|p| parse_count(p.trim()))
        .collect()
}

/// An integer written plainly or as `AeB`.
pub fn parse_count(s: &str) -> Result<u64> {
    if let Ok(n) = s.parse::<u64>() {
        return Ok(n);
    }
    let bad = || Error::arg(format!("`{s}` is not a nonnegative integer"));
    let (m, e) = s.split_once(['e', 'E']).ok_or_else(bad)?;
    let m: u64 = m.parse().map_err(|_| bad())?;
    let e: u32 = e.parse().map_err(|_| bad())?;
    10u64.checked_pow(e).and_then(|p| p.checked_mul(m)).ok_or_else(bad)
}
