//! Correlations of the Möbius and Liouville functions with nilsequences and
//! bracket polynomials, the Type I/II bilinear statistics, arc
//! classification, and W-tricked averages along primes.

use std::collections::BTreeMap;

use num_complex::Complex64;
use num_integer::Integer;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::arith::{euler_phi, sieve_range, ArithTable};
use crate::dd::Dd;
use crate::equidist::{half_space_frequencies, torus_dichotomy, Verdict};
use crate::error::{Error, Result};
use crate::heisenberg::bracket_value;
use crate::polyseq::{smoothness_norm, TorusPolynomial};
use crate::psi::Psi;
use crate::sum::{sum_range, tree_sum};

/// Magnitudes below this are left out of exponent fits.
pub const FIT_FLOOR: f64 = 1e-12;

pub const DEFAULT_TYPE_THRESHOLD: f64 = 0.1;

/// Largest primorial modulus accepted by [`prime_orbit_average`].
pub const MAX_PRIMORIAL: u64 = 1_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Weight {
    Mobius,
    Liouville,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FitMode {
    /// Slope of `log|E|` against `log log N`.
    LogPower,
    /// Slope of `log|E|` against `log N`.
    Power,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CorrelationSeries {
    pub weight: Weight,
    pub ns: Vec<u64>,
    /// `Σ_{n ≤ N} w(n) F(n)`.
    pub raw: Vec<Complex64>,
    /// `raw / N`.
    pub normalized: Vec<Complex64>,
    /// `None` when fewer than two rungs clear [`FIT_FLOOR`].
    pub fitted_exponent: Option<f64>,
    pub fit_mode: FitMode,
}

/// Least-squares slope of `log|z|` against `log N` or `log log N`.
pub fn fit_exponent(ns: &[u64], values: &[Complex64], mode: FitMode) -> Option<f64> {
    let pts: Vec<(f64, f64)> = ns
        .iter()
        .zip(values)
        .filter(|(&n, z)| z.norm() >= FIT_FLOOR && n >= 3)
        .map(|(&n, z)| {
            let x = match mode {
                FitMode::Power => (n as f64).ln(),
                FitMode::LogPower => (n as f64).ln().ln(),
            };
            (x, z.norm().ln())
        })
        .collect();
    if pts.len() < 2 {
        return None;
    }
    let m = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / m;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / m;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}

pub fn check_ladder(ns: &[u64], limit: u64) -> Result<()> {
    if ns.is_empty() {
        return Err(Error::arg("ladder is empty"));
    }
    if ns[0] == 0 || ns.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::arg("ladder must be positive and strictly ascending"));
    }
    let top = *ns.last().unwrap();
    if top > limit {
        return Err(Error::arg(format!("ladder reaches {top} but values cover only {limit}")));
    }
    Ok(())
}

/// `w(1), …, w(n_max)` for the chosen weight.
pub fn weight_table(weight: Weight, n_max: u64) -> Result<Vec<i8>> {
    let t = sieve_range(1, n_max + 1)?;
    Ok(match weight {
        Weight::Mobius => t.mu_slice().to_vec(),
        Weight::Liouville => t.lambda_slice().to_vec(),
    })
}

/// Series over `ns` with precomputed weights `weights[n - 1] = w(n)`.
pub fn correlate_with_weights<F>(
    weights: &[i8],
    weight: Weight,
    f: F,
    ns: &[u64],
    fit_mode: FitMode,
) -> Result<CorrelationSeries>
where
    F: Fn(u64) -> Complex64 + Sync,
{
    check_ladder(ns, weights.len() as u64)?;
    let raw: Vec<Complex64> = ns
        .iter()
        .map(|&n| {
            sum_range(1, n + 1, |m| {
                let w = weights[m as usize - 1];
                if w == 0 {
                    Complex64::new(0.0, 0.0)
                } else {
                    f(m) * w as f64
                }
            })
        })
        .collect();
    let normalized: Vec<Complex64> = raw.iter().zip(ns).map(|(r, &n)| r / n as f64).collect();
    Ok(CorrelationSeries {
        weight,
        ns: ns.to_vec(),
        fitted_exponent: fit_exponent(ns, &normalized, fit_mode),
        raw,
        normalized,
        fit_mode,
    })
}

/// `E_{n ≤ N} w(n) F(n)` over the ladder for a closure `F`.
pub fn correlate_fn<F>(f: F, ns: &[u64], weight: Weight, fit_mode: FitMode) -> Result<CorrelationSeries>
where
    F: Fn(u64) -> Complex64 + Sync,
{
    check_ladder(ns, u64::MAX)?;
    let weights = weight_table(weight, *ns.last().unwrap())?;
    correlate_with_weights(&weights, weight, f, ns, fit_mode)
}

/// `E_{n ≤ N} w(n) F(g(n)Γ)` with `values[n - 1] = F(g(n)Γ)`.
pub fn mobius_nilsequence_correlation(
    values: &[Complex64],
    ns: &[u64],
    weight: Weight,
    fit_mode: FitMode,
) -> Result<CorrelationSeries> {
    check_ladder(ns, values.len() as u64)?;
    correlate_fn(|n| values[n as usize - 1], ns, weight, fit_mode)
}

/// `Σ_{n ≤ N} λ(n) F(n)` through `λ(n) = Σ_{r² | n} μ(n / r²)`, i.e.
/// `Σ_{r² ≤ N} Σ_{m ≤ N/r²} μ(m) F(r² m)`.
pub fn liouville_sum_via_mobius(values: &[Complex64], mu: &[i8], n: u64) -> Result<Complex64> {
    if n as usize > values.len() || n as usize > mu.len() {
        return Err(Error::arg("values and mu must cover [N]"));
    }
    let terms: Vec<Complex64> = (1..)
        .take_while(|r: &u64| r * r <= n)
        .map(|r| {
            let sq = r * r;
            sum_range(1, n / sq + 1, |m| values[(sq * m) as usize - 1] * mu[m as usize - 1] as f64)
        })
        .collect();
    Ok(tree_sum(&terms))
}

/// `E_{n ≤ N} w(n) Ψ({nβ⌊nα⌋})` over the ladder, fitted in power mode.
pub fn bracket_correlation(alpha: Dd, beta: Dd, psi: &Psi, ns: &[u64], weight: Weight) -> Result<CorrelationSeries> {
    correlate_fn(
        |n| psi.eval(bracket_value(alpha, beta, n as i64)),
        ns,
        weight,
        FitMode::Power,
    )
}

/// `|E_{N/k < w ≤ 2N/k} f(kw)|` for each `k ∈ (K, 2K]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TypeIStatistic {
    pub n_scale: u64,
    pub k_floor: u64,
    pub per_k: BTreeMap<u64, f64>,
    /// `k` whose `w`-range is empty.
    pub empty_ks: Vec<u64>,
    /// `K` lies outside `[1, N^{2/3}]`.
    pub outside_range: bool,
}

impl TypeIStatistic {
    /// Largest value and the `k` attaining it.
    pub fn max(&self) -> Option<(u64, f64)> {
        self.per_k
            .iter()
            .fold(None, |acc: Option<(u64, f64)>, (&k, &v)| match acc {
                Some((_, best)) if best >= v => acc,
                _ => Some((k, v)),
            })
    }

    /// Median over `k`: the statistic is large for many `k` exactly when this
    /// is large.
    pub fn median(&self) -> Option<f64> {
        let mut v: Vec<f64> = self.per_k.values().copied().collect();
        if v.is_empty() {
            return None;
        }
        v.sort_by(f64::total_cmp);
        let m = v.len();
        Some(if m % 2 == 1 { v[m / 2] } else { 0.5 * (v[m / 2 - 1] + v[m / 2]) })
    }

    pub fn mean(&self) -> Option<f64> {
        (!self.per_k.is_empty()).then(|| self.per_k.values().sum::<f64>() / self.per_k.len() as f64)
    }
}

/// `f[m - 1] = f(m)` must cover `[2N]`.
pub fn type_i_statistic(f: &[Complex64], n_scale: u64, k_floor: u64) -> Result<TypeIStatistic> {
    if n_scale == 0 || k_floor == 0 {
        return Err(Error::arg("N and K must be positive"));
    }
    if (f.len() as u64) < 2 * n_scale {
        return Err(Error::arg(format!("f covers {} terms but [2N] = [{}] is needed", f.len(), 2 * n_scale)));
    }
    let outside_range = (k_floor as f64) > (n_scale as f64).powf(2.0 / 3.0);
    if outside_range {
        log::warn!("Type I: K = {k_floor} exceeds N^(2/3) for N = {n_scale}");
    }
    let rows: Vec<(u64, Option<f64>)> = (k_floor + 1..=2 * k_floor)
        .into_par_iter()
        .map(|k| {
            let (lo, hi) = (n_scale / k + 1, 2 * n_scale / k);
            if lo > hi {
                return (k, None);
            }
            let s = (lo..=hi).fold(Complex64::new(0.0, 0.0), |acc, w| acc + f[(k * w) as usize - 1]);
            (k, Some(s.norm() / (hi - lo + 1) as f64))
        })
        .collect();
    let mut per_k = BTreeMap::new();
    let mut empty_ks = Vec::new();
    for (k, v) in rows {
        match v {
            Some(v) => {
                per_k.insert(k, v);
            }
            None => empty_ks.push(k),
        }
    }
    Ok(TypeIStatistic {
        n_scale,
        k_floor,
        per_k,
        empty_ks,
        outside_range,
    })
}

/// `½N^{1/3} ≤ K ≤ 4N^{2/3}` and `N/4 ≤ KW ≤ 4N`.
pub fn type_ii_in_range(n_scale: u64, k: u64, w: u64) -> bool {
    let n = n_scale as f64;
    let (kf, kw) = (k as f64, (k * w) as f64);
    0.5 * n.cbrt() <= kf && kf <= 4.0 * n.powf(2.0 / 3.0) && n / 4.0 <= kw && kw <= 4.0 * n
}

/// `E_{K < k, k' ≤ 2K} |E_{W ≤ w < 2W} f(kw) f̄(k'w)|²`, with `f[m - 1] = f(m)`.
pub fn type_ii_statistic(f: &[Complex64], n_scale: u64, k: u64, w: u64) -> Result<f64> {
    if k == 0 || w == 0 {
        return Err(Error::arg("K and W must be positive"));
    }
    let top = (2 * k)
        .checked_mul(2 * w - 1)
        .ok_or_else(|| Error::arg("index 2K(2W - 1) overflows"))?;
    if top > f.len() as u64 {
        return Err(Error::arg(format!("index {top} runs past the {} supplied values", f.len())));
    }
    if !type_ii_in_range(n_scale, k, w) {
        log::warn!("Type II: (K, W) = ({k}, {w}) outside the bilinear range for N = {n_scale}");
    }
    let rows: Vec<Vec<Complex64>> = (k + 1..=2 * k)
        .map(|kk| (w..2 * w).map(|ww| f[(kk * ww) as usize - 1]).collect())
        .collect();
    let wf = w as f64;
    let row_sums: Vec<f64> = (0..rows.len())
        .into_par_iter()
        .map(|i| {
            let a = &rows[i];
            let mut acc = 0.0;
            for (j, b) in rows.iter().enumerate().skip(i) {
                let inner = a
                    .iter()
                    .zip(b)
                    .fold(Complex64::new(0.0, 0.0), |s, (x, y)| s + x * y.conj())
                    / wf;
                acc += if j == i { inner.norm_sqr() } else { 2.0 * inner.norm_sqr() };
            }
            acc
        })
        .collect();
    Ok(tree_sum(&row_sums) / (k * k) as f64)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TypeClassification {
    TypeILarge,
    TypeIILarge,
    BothSmall,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TypeIIReport {
    pub n_scale: u64,
    pub k: u64,
    pub w: u64,
    pub type1: TypeIStatistic,
    pub median_type1: f64,
    pub max_type1: f64,
    pub type2: f64,
    pub in_range: bool,
    pub classification: TypeClassification,
    pub threshold_type1: f64,
    pub threshold_type2: f64,
}

/// Type I and Type II statistics at one `(K, W)`; Type I counts as large when
/// its median over `k` reaches `threshold_type1`.
pub fn type_sums_report(
    f: &[Complex64],
    n_scale: u64,
    k: u64,
    w: u64,
    threshold_type1: f64,
    threshold_type2: f64,
) -> Result<TypeIIReport> {
    let type1 = type_i_statistic(f, n_scale, k)?;
    let type2 = type_ii_statistic(f, n_scale, k, w)?;
    let median_type1 = type1.median().unwrap_or(0.0);
    let max_type1 = type1.max().map_or(0.0, |m| m.1);
    let classification = if median_type1 >= threshold_type1 {
        TypeClassification::TypeILarge
    } else if type2 >= threshold_type2 {
        TypeClassification::TypeIILarge
    } else {
        TypeClassification::BothSmall
    };
    Ok(TypeIIReport {
        n_scale,
        k,
        w,
        type1,
        median_type1,
        max_type1,
        type2,
        in_range: type_ii_in_range(n_scale, k, w),
        classification,
        threshold_type1,
        threshold_type2,
    })
}

/// Dyadic `K = 2^j ≤ N^{2/3}`.
pub fn type_i_ladder(n_scale: u64) -> Vec<u64> {
    let cap = (n_scale as f64).powf(2.0 / 3.0);
    (0..63).map(|j| 1u64 << j).take_while(|&k| k as f64 <= cap).collect()
}

/// Dyadic `K` with `W = ⌊N/K⌋` inside the bilinear range and both `K` and
/// `W` at least `½N^{1/3}`.
pub fn type_ii_ladder(n_scale: u64) -> Vec<(u64, u64)> {
    let floor = 0.5 * (n_scale as f64).cbrt();
    (0..63)
        .map(|j| 1u64 << j)
        .take_while(|&k| k <= n_scale)
        .map(|k| (k, n_scale / k))
        .filter(|&(k, w)| w as f64 >= floor && type_ii_in_range(n_scale, k, w))
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ArcClass {
    MajorArc,
    MinorArc,
}

fn integer_rank(rows: &[Vec<i64>]) -> usize {
    let mut m: Vec<Vec<i128>> = rows.iter().map(|r| r.iter().map(|&v| v as i128).collect()).collect();
    let cols = m.first().map_or(0, Vec::len);
    let mut rank = 0;
    for c in 0..cols {
        let Some(p) = (rank..m.len()).find(|&i| m[i][c] != 0) else {
            continue;
        };
        m.swap(rank, p);
        for i in rank + 1..m.len() {
            if m[i][c] != 0 {
                let (a, b) = (m[rank][c], m[i][c]);
                let pivot = m[rank].clone();
                for (v, &w) in m[i].iter_mut().zip(&pivot).take(cols) {
                    *v = *v * a - w * b;
                }
                let g = m[i].iter().fold(0i128, |g, &v| g.gcd(&v));
                if g > 1 {
                    m[i].iter_mut().for_each(|v| *v /= g);
                }
            }
        }
        rank += 1;
    }
    rank
}

/// Major arc when the frequencies `k` with `‖k·g‖_{C^∞[N]} ≤ threshold`
/// span all of `ℚ^m`, so every direction of `g` is smooth plus rational.
pub fn classify_arcs(g: &[TorusPolynomial], n: u64, k_max: i64, threshold: f64) -> Result<ArcClass> {
    let cert = torus_dichotomy(g, n, k_max, threshold)?;
    if cert.verdict != Verdict::Obstructed {
        return Ok(ArcClass::MinorArc);
    }
    let small: Vec<Vec<i64>> = half_space_frequencies(g.len(), k_max)
        .into_iter()
        .filter(|k| smoothness_norm(&TorusPolynomial::combine(g, k), n).value <= threshold)
        .collect();
    Ok(if integer_rank(&small) == g.len() {
        ArcClass::MajorArc
    } else {
        ArcClass::MinorArc
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PrimeMode {
    NthPrime,
    LambdaWeighted,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PrimeOrbitAverage {
    pub mode: PrimeMode,
    pub n: u64,
    pub w: u64,
    /// `W = ∏_{p ≤ w} p`.
    pub modulus: u64,
    /// `φ(W)/W`.
    pub phi_ratio: f64,
    pub average: Complex64,
    /// `b ↦ (φ(W)/W) E_{n ≤ N} Λ'(Wn + b) F(Wn + b)` for `(b, W) = 1`.
    pub per_residue: BTreeMap<u64, Complex64>,
    /// `b ↦ E_{n ≤ N} (φ(W)/W Λ'(Wn + b) - 1) F(Wn + b)`.
    pub deviation: BTreeMap<u64, Complex64>,
}

pub fn primorial(w: u64) -> Result<u64> {
    let mut m = 1u64;
    for p in crate::arith::primes_up_to(w) {
        m = m
            .checked_mul(p)
            .filter(|&v| v <= MAX_PRIMORIAL)
            .ok_or_else(|| Error::resource(format!("primorial of {w} exceeds {MAX_PRIMORIAL}")))?;
    }
    Ok(m)
}

/// Upper bound for the `n`-th prime.
pub fn nth_prime_bound(n: u64) -> u64 {
    if n < 6 {
        return 13;
    }
    let x = n as f64;
    (x * (x.ln() + x.ln().ln())).ceil() as u64 + 1
}

/// Averages of `F` along primes. `table` must start at 1 and cover
/// `p_N` (nth-prime mode) or `W(N + 1)` (lambda-weighted mode).
pub fn prime_orbit_average<F>(table: &ArithTable, f: F, mode: PrimeMode, n: u64, w: u64) -> Result<PrimeOrbitAverage>
where
    F: Fn(u64) -> Complex64 + Sync,
{
    if n == 0 {
        return Err(Error::arg("N must be positive"));
    }
    if table.lo() != 1 {
        return Err(Error::arg("prime averages need a table starting at 1"));
    }
    let modulus = primorial(w)?;
    let phi_ratio = euler_phi(modulus) as f64 / modulus as f64;
    let mut per_residue = BTreeMap::new();
    let mut deviation = BTreeMap::new();
    let average = match mode {
        PrimeMode::NthPrime => {
            let primes = table.first_primes(n as usize)?;
            let s: Complex64 = sum_range(0, n, |i| f(primes[i as usize]));
            s / n as f64
        }
        PrimeMode::LambdaWeighted => {
            let top = modulus
                .checked_mul(n + 1)
                .ok_or_else(|| Error::resource("W(N + 1) overflows"))?;
            table.require(1, top)?;
            let residues: Vec<u64> = (1..=modulus).filter(|b| b.gcd(&modulus) == 1).collect();
            let mut avgs = Vec::with_capacity(residues.len());
            for &b in &residues {
                let weighted: Complex64 = sum_range(1, n + 1, |m| {
                    let x = modulus * m + b;
                    let l = table.lambda_prime(x);
                    if l == 0.0 {
                        Complex64::new(0.0, 0.0)
                    } else {
                        f(x) * l
                    }
                });
                let plain: Complex64 = sum_range(1, n + 1, |m| f(modulus * m + b));
                let avg = weighted * phi_ratio / n as f64;
                per_residue.insert(b % modulus, avg);
                deviation.insert(b % modulus, avg - plain / n as f64);
                avgs.push(avg);
            }
            tree_sum(&avgs) / avgs.len() as f64
        }
    };
    Ok(PrimeOrbitAverage {
        mode,
        n,
        w,
        modulus,
        phi_ratio,
        average,
        per_residue,
        deviation,
    })
}
