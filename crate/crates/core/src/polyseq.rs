//! Polynomials `ℤ → ℝ/ℤ` in binomial-coefficient form
//! `p(n) = α_0 + α_1·C(n,1) + … + α_d·C(n,d)`, their `C^∞[N]` norms, and the
//! coefficient-clearing, Waring-counting and strong-recurrence tools used to
//! pass from smoothness of `p` to rationality of its monomial coefficients.

use std::collections::BTreeMap;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::circle::{circle_norm_dd, unit_interval};
use crate::dd::Dd;
use crate::error::{Error, Result};

/// Degree limit for exact conversions (keeps `d!` inside `u64`).
pub const MAX_EXACT_DEGREE: usize = 20;

/// Bucket limit for [`waring_representation_count`].
pub const MAX_WARING_BUCKETS: u64 = 100_000_000;

pub fn rational(num: i64, den: i64) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

/// `r - floor(r)`.
pub fn frac_rational(r: &BigRational) -> BigRational {
    r - r.floor()
}

/// `‖r‖_{ℝ/ℤ}` computed exactly.
pub fn circle_norm_rational(r: &BigRational) -> BigRational {
    let u = frac_rational(r);
    let v = BigRational::one() - &u;
    if u < v {
        u
    } else {
        v
    }
}

/// Double-double approximation of a rational.
pub fn rational_to_dd(r: &BigRational) -> Dd {
    let fl = r.floor();
    let int_part = fl.to_integer();
    let u = r - &fl;
    // 2^104 · u < 2^104 fits an i128 exactly.
    let scaled = (u.numer() << 104usize) / u.denom();
    let f = Dd::from_i128(scaled.to_i128().unwrap_or(0)) * Dd::from_f64(2f64.powi(-104));
    let ip = match int_part.to_i128() {
        Some(v) if v.unsigned_abs() < 1u128 << 106 => Dd::from_i128(v),
        _ => Dd::from_f64(int_part.to_f64().unwrap_or(f64::NAN)),
    };
    ip + f
}

/// `C(n, j)` for any integer `n` (the integer-valued polynomial).
fn binom_i128(n: i64, j: usize) -> Option<i128> {
    let mut c: i128 = 1;
    for i in 0..j {
        c = c.checked_mul(n as i128 - i as i128)? / (i as i128 + 1);
    }
    Some(c)
}

fn binom_big(n: i64, j: usize) -> BigInt {
    let mut c = BigInt::one();
    for i in 0..j {
        c = c * BigInt::from(n as i128 - i as i128) / BigInt::from(i + 1);
    }
    c
}

fn binom_dd(n: i64, j: usize) -> Dd {
    match binom_i128(n, j) {
        Some(c) if c.unsigned_abs() < 1u128 << 106 => Dd::from_i128(c),
        _ => {
            let mut c = Dd::ONE;
            for i in 0..j {
                c = c * Dd::from_i64(n - i as i64) / Dd::from_i64(i as i64 + 1);
            }
            c
        }
    }
}

/// Signed Stirling numbers of the first kind `s(i, j)`, `0 ≤ j ≤ i ≤ d`:
/// `n(n-1)…(n-i+1) = Σ_j s(i,j) n^j`.
pub fn stirling_first(d: usize) -> Vec<Vec<BigInt>> {
    let mut s = vec![vec![BigInt::zero(); d + 1]; d + 1];
    s[0][0] = BigInt::one();
    for i in 1..=d {
        for j in 1..=i {
            s[i][j] = &s[i - 1][j - 1] - BigInt::from(i - 1) * &s[i - 1][j];
        }
    }
    s
}

/// Stirling numbers of the second kind `S(i, j)`: `n^i = Σ_j S(i,j) j! C(n,j)`.
pub fn stirling_second(d: usize) -> Vec<Vec<BigInt>> {
    let mut s = vec![vec![BigInt::zero(); d + 1]; d + 1];
    s[0][0] = BigInt::one();
    for i in 1..=d {
        for j in 1..=i {
            s[i][j] = BigInt::from(j) * &s[i - 1][j] + &s[i - 1][j - 1];
        }
    }
    s
}

fn factorial(n: usize) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, k| acc * BigInt::from(k))
}

/// `β_j = Σ_{i ≥ j} α_i s(i,j) / i!`, exact and not reduced mod 1.
pub fn binomial_coeffs_to_monomial(alpha: &[BigRational]) -> Vec<BigRational> {
    let d = alpha.len().saturating_sub(1);
    let s = stirling_first(d);
    (0..alpha.len())
        .map(|j| {
            (j..alpha.len()).fold(BigRational::zero(), |acc, i| {
                acc + &alpha[i] * BigRational::new(s[i][j].clone(), factorial(i))
            })
        })
        .collect()
}

/// `α_j = Σ_{i ≥ j} β_i S(i,j) j!`, the exact inverse of
/// [`binomial_coeffs_to_monomial`].
pub fn monomial_coeffs_to_binomial(beta: &[BigRational]) -> Vec<BigRational> {
    let d = beta.len().saturating_sub(1);
    let s = stirling_second(d);
    (0..beta.len())
        .map(|j| {
            let jf = factorial(j);
            (j..beta.len()).fold(BigRational::zero(), |acc, i| {
                acc + &beta[i] * BigRational::from_integer(&s[i][j] * &jf)
            })
        })
        .collect()
}

/// A polynomial sequence into ℝ/ℤ stored by its binomial coefficients
/// reduced into `[0, 1)`; rational input additionally keeps the exact values.
#[derive(Clone, Debug, PartialEq)]
pub struct TorusPolynomial {
    alpha: Vec<Dd>,
    exact: Option<Vec<BigRational>>,
}

/// JSON form: `{"alpha_num": [...], "alpha_den": [...]}` or `{"alpha_real": [...]}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PolynomialJson {
    Exact { alpha_num: Vec<i64>, alpha_den: Vec<i64> },
    Real { alpha_real: Vec<f64> },
}

impl TorusPolynomial {
    pub fn from_dd(alpha: Vec<Dd>) -> TorusPolynomial {
        let alpha = if alpha.is_empty() { vec![Dd::ZERO] } else { alpha };
        TorusPolynomial {
            alpha: alpha.into_iter().map(Dd::frac).collect(),
            exact: None,
        }
    }

    pub fn from_reals(alpha: &[f64]) -> TorusPolynomial {
        Self::from_dd(alpha.iter().map(|&a| Dd::from_f64(a)).collect())
    }

    pub fn from_rationals(alpha: Vec<BigRational>) -> TorusPolynomial {
        let alpha = if alpha.is_empty() { vec![BigRational::zero()] } else { alpha };
        let exact: Vec<BigRational> = alpha.iter().map(frac_rational).collect();
        TorusPolynomial {
            alpha: exact.iter().map(rational_to_dd).collect(),
            exact: Some(exact),
        }
    }

    /// The polynomial with the given monomial coefficients `β_0..β_d`.
    pub fn from_monomial_rationals(beta: &[BigRational]) -> TorusPolynomial {
        Self::from_rationals(monomial_coeffs_to_binomial(beta))
    }

    /// `n ↦ θ n`.
    pub fn linear(theta: Dd) -> TorusPolynomial {
        Self::from_dd(vec![Dd::ZERO, theta])
    }

    pub fn linear_rational(num: i64, den: i64) -> TorusPolynomial {
        Self::from_rationals(vec![BigRational::zero(), rational(num, den)])
    }

    pub fn degree(&self) -> usize {
        self.alpha.len() - 1
    }

    pub fn alpha(&self) -> &[Dd] {
        &self.alpha
    }

    pub fn alpha_f64(&self) -> Vec<f64> {
        self.alpha.iter().map(|a| unit_interval(a.to_f64())).collect()
    }

    pub fn exact(&self) -> Option<&[BigRational]> {
        self.exact.as_deref()
    }

    /// `Σ_i k_i p_i`. Exact when every input is.
    pub fn combine(polys: &[TorusPolynomial], k: &[i64]) -> TorusPolynomial {
        assert_eq!(polys.len(), k.len(), "one multiplier per component");
        let d = polys.iter().map(|p| p.degree()).max().unwrap_or(0);
        if polys.iter().all(|p| p.exact.is_some()) {
            let mut acc = vec![BigRational::zero(); d + 1];
            for (p, &ki) in polys.iter().zip(k) {
                for (a, c) in acc.iter_mut().zip(p.exact.as_ref().unwrap()) {
                    *a += c * BigRational::from_integer(BigInt::from(ki));
                }
            }
            Self::from_rationals(acc)
        } else {
            let mut acc = vec![Dd::ZERO; d + 1];
            for (p, &ki) in polys.iter().zip(k) {
                for (a, c) in acc.iter_mut().zip(&p.alpha) {
                    *a += (*c * Dd::from_i64(ki)).frac();
                }
            }
            Self::from_dd(acc)
        }
    }

    pub fn scale(&self, k: i64) -> TorusPolynomial {
        Self::combine(std::slice::from_ref(self), &[k])
    }

    /// `p(n) mod 1` as a double-double in `[0, 1)`.
    pub fn eval_dd(&self, n: i64) -> Dd {
        if let Some(exact) = &self.exact {
            if let Some(v) = self.eval_exact_fast(exact, n) {
                return v;
            }
            return rational_to_dd(&self.eval_exact(n).expect("exact coefficients present"));
        }
        self.alpha
            .iter()
            .enumerate()
            .fold(Dd::ZERO, |acc, (j, a)| acc + (*a * binom_dd(n, j)).frac())
            .frac()
    }

    /// `p(n) mod 1` in `[0, 1)`.
    pub fn eval(&self, n: i64) -> f64 {
        self.eval_dd(n).frac_f64()
    }

    /// Exact `p(n) mod 1` for rational coefficients.
    pub fn eval_exact(&self, n: i64) -> Option<BigRational> {
        let exact = self.exact.as_ref()?;
        let mut acc = BigRational::zero();
        for (j, a) in exact.iter().enumerate() {
            let c = binom_big(n, j);
            let num = (a.numer() * c).mod_floor(a.denom());
            acc += BigRational::new(num, a.denom().clone());
        }
        Some(frac_rational(&acc))
    }

    fn eval_exact_fast(&self, exact: &[BigRational], n: i64) -> Option<Dd> {
        let mut acc = Dd::ZERO;
        for (j, a) in exact.iter().enumerate() {
            let num = a.numer().to_i64()? as i128;
            let den = a.denom().to_i64()? as i128;
            let c = binom_i128(n, j)?.rem_euclid(den);
            let t = (num * c).rem_euclid(den);
            acc += Dd::from_i128(t) / Dd::from_i128(den);
        }
        Some(acc.frac())
    }

    pub fn to_json(&self) -> PolynomialJson {
        match &self.exact {
            Some(ex) if ex.iter().all(|r| r.numer().to_i64().is_some() && r.denom().to_i64().is_some()) => {
                PolynomialJson::Exact {
                    alpha_num: ex.iter().map(|r| r.numer().to_i64().unwrap()).collect(),
                    alpha_den: ex.iter().map(|r| r.denom().to_i64().unwrap()).collect(),
                }
            }
            _ => PolynomialJson::Real {
                alpha_real: self.alpha_f64(),
            },
        }
    }

    pub fn from_json(j: &PolynomialJson) -> Result<TorusPolynomial> {
        match j {
            PolynomialJson::Exact { alpha_num, alpha_den } => {
                if alpha_num.len() != alpha_den.len() {
                    return Err(Error::Format("alpha_num and alpha_den differ in length".into()));
                }
                if alpha_den.contains(&0) {
                    return Err(Error::Format("zero denominator".into()));
                }
                Ok(Self::from_rationals(
                    alpha_num.iter().zip(alpha_den).map(|(&n, &d)| rational(n, d)).collect(),
                ))
            }
            PolynomialJson::Real { alpha_real } => Ok(Self::from_reals(alpha_real)),
        }
    }
}

/// `‖p‖_{C^∞[N]} = sup_{1 ≤ j ≤ d} N^j ‖α_j‖_{ℝ/ℤ}` with the index attaining it.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SmoothnessNorm {
    pub value: f64,
    pub n: u64,
    pub argmax_j: usize,
}

pub fn smoothness_norm(p: &TorusPolynomial, n: u64) -> SmoothnessNorm {
    let mut best = SmoothnessNorm {
        value: 0.0,
        n,
        argmax_j: usize::from(p.degree() >= 1),
    };
    for j in 1..=p.degree() {
        let dist = match p.exact() {
            Some(ex) => circle_norm_rational(&ex[j]).to_f64().unwrap_or(f64::NAN),
            None => circle_norm_dd(p.alpha[j]),
        };
        let v = (n as f64).powi(j as i32) * dist;
        if v > best.value {
            best.value = v;
            best.argmax_j = j;
        }
    }
    best
}

/// Exact `‖p‖_{C^∞[N]}` for rational polynomials.
pub fn smoothness_norm_exact(p: &TorusPolynomial, n: u64) -> Option<BigRational> {
    let ex = p.exact()?;
    let nn = BigRational::from_integer(BigInt::from(n));
    let mut best = BigRational::zero();
    let mut pow = BigRational::one();
    for a in ex.iter().skip(1) {
        pow = &pow * &nn;
        let v = &pow * circle_norm_rational(a);
        if v > best {
            best = v;
        }
    }
    Some(best)
}

/// Monomial coefficients of a rational torus polynomial together with the
/// clearing multiplier `q`.
#[derive(Clone, Debug, PartialEq)]
pub struct MonomialForm {
    pub beta: Vec<BigRational>,
    /// Least common denominator of the conversion entries `s(i,j)/i!` over the
    /// rows `i` with `α_i ≠ 0`; `q·β_j` is then an integer combination of the
    /// `α_i`, so its denominator divides theirs.
    pub q: u64,
    /// `C_j = Σ_{i ≥ j, α_i ≠ 0} |q s(i,j) / i!|`, giving
    /// `‖q β_j‖ ≤ C_j N^{-j} ‖p‖_{C^∞[N]}` for every `N ≥ 1`.
    pub constants: Vec<BigRational>,
}

pub fn binomial_to_monomial(p: &TorusPolynomial) -> Result<MonomialForm> {
    let alpha = p
        .exact()
        .ok_or_else(|| Error::arg("binomial_to_monomial needs exact rational coefficients"))?;
    let d = p.degree();
    if d > MAX_EXACT_DEGREE {
        return Err(Error::arg(format!("degree {d} exceeds {MAX_EXACT_DEGREE}")));
    }
    let beta = binomial_coeffs_to_monomial(alpha);
    let s = stirling_first(d);
    let mut q = BigInt::one();
    for (i, a) in alpha.iter().enumerate() {
        if a.is_zero() {
            continue;
        }
        let fi = factorial(i);
        for sij in s[i].iter().take(i + 1) {
            let entry = BigRational::new(sij.clone(), fi.clone());
            q = q.lcm(entry.denom());
        }
    }
    let qr = BigRational::from_integer(q.clone());
    let constants = (0..=d)
        .map(|j| {
            (j..=d)
                .filter(|&i| !alpha[i].is_zero())
                .fold(BigRational::zero(), |acc, i| {
                    acc + (&qr * BigRational::new(s[i][j].clone(), factorial(i))).abs()
                })
        })
        .collect();
    Ok(MonomialForm {
        beta,
        q: q.to_u64().expect("q divides d! which fits u64"),
        constants,
    })
}

/// Inverse of [`binomial_to_monomial`]: the torus polynomial with monomial
/// coefficients `beta`.
pub fn monomial_to_binomial(beta: &[BigRational]) -> TorusPolynomial {
    TorusPolynomial::from_monomial_rationals(beta)
}

/// An arc `[start, start + len)` of ℝ/ℤ.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ArcInterval {
    pub start: f64,
    pub len: f64,
}

impl ArcInterval {
    pub fn centered(center: f64, len: f64) -> ArcInterval {
        ArcInterval {
            start: center - len / 2.0,
            len,
        }
    }

    pub fn contains(&self, x: Dd) -> bool {
        (x - Dd::from_f64(self.start)).frac().to_f64() < self.len
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Recurrence {
    pub k: i64,
    pub knorm: f64,
}

/// Default acceptance exponent `C₀` for [`strong_recurrence_finder`].
pub const DEFAULT_RECURRENCE_EXPONENT: f64 = 3.0;

/// Given that `α n` lands in `interval` for at least `σN` of the `n ∈ [N]`,
/// searches `0 < k ≤ k_max` for the `k` minimising `‖kα‖` (negative `k` give
/// the same norms). Returns `None` unless `‖kα‖ ≤ μ k_max^{C₀} / N`.
pub fn strong_recurrence_finder(
    alpha: Dd,
    n: u64,
    sigma: f64,
    mu: f64,
    interval: ArcInterval,
    k_max: u64,
    c0: f64,
) -> Result<Option<Recurrence>> {
    if n == 0 || k_max == 0 {
        return Err(Error::arg("N and k_max must be positive"));
    }
    if !(sigma > 0.0 && sigma < 0.5) {
        return Err(Error::arg(format!("sigma = {sigma} must lie in (0, 1/2)")));
    }
    if !(mu > 0.0 && mu <= sigma / 2.0) {
        return Err(Error::arg(format!("mu = {mu} must lie in (0, sigma/2]")));
    }
    if (interval.len - mu).abs() > 1e-12 * mu.max(1.0) {
        return Err(Error::arg(format!(
            "interval length {} differs from mu = {mu}",
            interval.len
        )));
    }
    let hits = (1..=n)
        .filter(|&m| interval.contains(alpha * Dd::from_i64(m as i64)))
        .count();
    let density = hits as f64 / n as f64;
    if density < sigma {
        return Err(Error::arg(format!(
            "measured density {density} of returns to the interval is below sigma = {sigma}"
        )));
    }
    let mut best = Recurrence {
        k: 1,
        knorm: circle_norm_dd(alpha),
    };
    for k in 2..=k_max as i64 {
        let v = circle_norm_dd(alpha * Dd::from_i64(k));
        if v < best.knorm {
            best = Recurrence { k, knorm: v };
        }
    }
    let bound = mu * (k_max as f64).powf(c0) / n as f64;
    Ok((best.knorm <= bound).then_some(best))
}

/// Representation counts `r(n) = #{(k_1..k_t) ∈ S^t : Σ k_i^j = n}`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct WaringCount {
    /// Number of `n ∈ [t K^j]` with `r(n) > 0`.
    pub representable_count: u64,
    /// `n ↦ r(n)` over representable `n`.
    pub histogram: BTreeMap<u64, u64>,
    /// `t < 2^j + 1`, outside the regime where the uniform bound on
    /// representation counts is available.
    pub below_lemma_regime: bool,
}

impl WaringCount {
    /// `(Σ r(n))² ≤ |tX| · Σ r(n)²`, checked in exact integers.
    pub fn cauchy_schwarz_holds(&self) -> bool {
        let total: BigUint = self.histogram.values().map(|&r| BigUint::from(r)).sum();
        let squares: BigUint = self
            .histogram
            .values()
            .map(|&r| BigUint::from(r) * BigUint::from(r))
            .sum();
        &total * &total <= BigUint::from(self.representable_count) * squares
    }
}

pub fn waring_representation_count(s: &[u64], j: u32, t: u32) -> Result<WaringCount> {
    if s.is_empty() {
        return Err(Error::arg("S must be nonempty"));
    }
    if j == 0 || t == 0 {
        return Err(Error::arg("j and t must be positive"));
    }
    if s.contains(&0) {
        return Err(Error::arg("S must lie in [K] = {1, …, K}"));
    }
    let mut set: Vec<u64> = s.to_vec();
    set.sort_unstable();
    set.dedup();
    let k = *set.last().unwrap();
    let too_big = || Error::resource(format!("t·K^j buckets exceed {MAX_WARING_BUCKETS}"));
    let kj = k.checked_pow(j).ok_or_else(too_big)?;
    let top = kj.checked_mul(t as u64).ok_or_else(too_big)?;
    if top + 1 > MAX_WARING_BUCKETS {
        return Err(too_big());
    }
    let below = (t as u64) < (1u64 << j.min(63)) + 1;
    if below {
        log::warn!("t = {t} < 2^{j} + 1: outside the Waring lemma regime");
    }
    let powers: Vec<u64> = set.iter().map(|&x| x.pow(j)).collect();
    let mut r = vec![0u64; top as usize + 1];
    r[0] = 1;
    let mut reach = 0u64;
    for _ in 0..t {
        let new_reach = reach + kj;
        for n in (0..=new_reach).rev() {
            let mut acc = 0u64;
            for &x in &powers {
                if x <= n && n - x <= reach {
                    acc = acc
                        .checked_add(r[(n - x) as usize])
                        .ok_or_else(|| Error::resource("representation count overflows u64"))?;
                }
            }
            r[n as usize] = acc;
        }
        reach = new_reach;
    }
    let histogram: BTreeMap<u64, u64> = r
        .iter()
        .enumerate()
        .filter(|(_, &c)| c > 0)
        .map(|(n, &c)| (n as u64, c))
        .collect();
    Ok(WaringCount {
        representable_count: histogram.len() as u64,
        histogram,
        below_lemma_regime: below,
    })
}
