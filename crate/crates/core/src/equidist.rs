//! Equidistribution diagnostics: Weyl sums, star discrepancy, progression
//! scans for total equidistribution, and the torus obstruction search.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::circle::e_dd;
use crate::dd::Dd;
use crate::error::{Error, Result};
use crate::polyseq::{smoothness_norm, TorusPolynomial};
use crate::sum::sum_range;

pub const DEFAULT_THRESHOLD: f64 = 0.1;
pub const DEFAULT_K_MAX: i64 = 20;

/// Residue classes at most this long are scanned over every window.
pub const EXHAUSTIVE_CLASS_LEN: usize = 2048;

/// `E_{n ∈ [N]} e(p(n))`.
pub fn weyl_sum(p: &TorusPolynomial, n: u64) -> Result<Complex64> {
    if n == 0 {
        return Err(Error::arg("weyl_sum needs N >= 1"));
    }
    let s: Complex64 = sum_range(1, n + 1, |m| e_dd(p.eval_dd(m as i64)));
    Ok(s / n as f64)
}

/// `D* = max_i max(i/N - u_(i), u_(i) - (i-1)/N)` over the sorted points.
pub fn star_discrepancy(points: &[f64]) -> Result<f64> {
    if points.is_empty() {
        return Err(Error::arg("star_discrepancy needs at least one point"));
    }
    if points.iter().any(|u| !(0.0..1.0).contains(u)) {
        return Err(Error::arg("points must lie in [0, 1)"));
    }
    let mut u = points.to_vec();
    u.par_sort_unstable_by(f64::total_cmp);
    let n = u.len() as f64;
    Ok(u
        .iter()
        .enumerate()
        .map(|(i, &x)| ((i + 1) as f64 / n - x).max(x - i as f64 / n))
        .fold(0.0, f64::max))
}

/// `{start, start + step, …}` with `length` terms, indices in `[N]`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Progression {
    pub start: u64,
    pub step: u64,
    pub length: u64,
}

impl Progression {
    pub fn indices(&self) -> impl Iterator<Item = u64> + '_ {
        (0..self.length).map(move |i| self.start + i * self.step)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TestFamily {
    Characters,
    SuppliedFunction,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ScanMode {
    /// Every window of every residue class was tested.
    Exhaustive,
    /// Some classes were only scanned on dyadic windows; the best witness
    /// may be up to a factor 2 shorter than the optimum.
    Dyadic,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EquidistributionReport {
    pub delta_hat: f64,
    pub witness: Progression,
    pub tested_progressions: u64,
    pub test_family: TestFamily,
    pub scan: ScanMode,
    pub min_frac: f64,
    pub q_max: u64,
    /// Frequency of the character attaining `delta_hat`, for character scans.
    pub frequency: Option<Vec<i64>>,
}

struct ClassBest {
    value: f64,
    witness: Progression,
    tested: u64,
    exhaustive: bool,
}

fn better(candidate: f64, current: f64) -> bool {
    candidate > current
}

fn scan_class(class: &[Complex64], start: u64, step: u64, min_len: usize) -> ClassBest {
    let m = class.len();
    let mut best = ClassBest {
        value: -1.0,
        witness: Progression { start, step, length: 0 },
        tested: 0,
        exhaustive: m <= EXHAUSTIVE_CLASS_LEN,
    };
    if m < min_len {
        return best;
    }
    let mut consider = |i: usize, len: usize, s: Complex64| {
        let v = s.norm() / len as f64;
        best.tested += 1;
        if better(v, best.value) {
            best.value = v;
            best.witness = Progression {
                start: start + i as u64 * step,
                step,
                length: len as u64,
            };
        }
    };
    if m <= EXHAUSTIVE_CLASS_LEN {
        for i in 0..m {
            let mut s = Complex64::new(0.0, 0.0);
            for (j, v) in class[i..].iter().enumerate() {
                s += v;
                if j + 1 >= min_len {
                    consider(i, j + 1, s);
                }
            }
        }
    } else {
        let mut prefix = Vec::with_capacity(m + 1);
        prefix.push(Complex64::new(0.0, 0.0));
        for v in class {
            let last = *prefix.last().unwrap();
            prefix.push(last + v);
        }
        let mut lengths = vec![min_len];
        let mut l = min_len.next_power_of_two();
        while l < m {
            if l > min_len {
                lengths.push(l);
            }
            l *= 2;
        }
        lengths.push(m);
        lengths.dedup();
        for len in lengths {
            let hop = (len / 2).max(1);
            let mut i = 0;
            loop {
                consider(i, len, prefix[i + len] - prefix[i]);
                if i + len == m {
                    break;
                }
                i = (i + hop).min(m - len);
            }
        }
    }
    best
}

/// Largest `|E_{n ∈ P} F(x_n)| / ‖F‖` over progressions `P ⊆ [N]` of step
/// `q ≤ q_max` and length at least `min_frac·N/q`, where `values[n - 1]`
/// holds `F(x_n)`.
pub fn total_equidistribution_estimate(
    values: &[Complex64],
    f_norm: f64,
    q_max: u64,
    min_frac: f64,
) -> Result<EquidistributionReport> {
    if values.is_empty() {
        return Err(Error::arg("values must be nonempty"));
    }
    if f_norm.is_nan() || f_norm <= 0.0 {
        return Err(Error::arg("F_norm must be positive"));
    }
    if q_max == 0 {
        return Err(Error::arg("Q_max must be at least 1"));
    }
    if !(min_frac > 0.0 && min_frac <= 1.0) {
        return Err(Error::arg("min_frac must lie in (0, 1]"));
    }
    let n = values.len() as u64;
    let q_top = q_max.min(n);
    let per_q: Vec<ClassBest> = (1..=q_top)
        .into_par_iter()
        .flat_map_iter(|q| {
            let min_len = ((min_frac * n as f64 / q as f64).ceil() as usize).max(1);
            (1..=q).map(move |a| {
                let class: Vec<Complex64> = (a..=n).step_by(q as usize).map(|i| values[i as usize - 1]).collect();
                scan_class(&class, a, q, min_len)
            })
        })
        .collect();
    let mut tested = 0;
    let mut exhaustive = true;
    let mut best: Option<&ClassBest> = None;
    for c in &per_q {
        tested += c.tested;
        exhaustive &= c.exhaustive;
        if c.tested > 0 && best.is_none_or(|b| better(c.value, b.value)) {
            best = Some(c);
        }
    }
    let best = best.ok_or_else(|| Error::arg("no progression satisfies the length floor"))?;
    Ok(EquidistributionReport {
        delta_hat: best.value / f_norm,
        witness: best.witness,
        tested_progressions: tested,
        test_family: TestFamily::SuppliedFunction,
        scan: if exhaustive { ScanMode::Exhaustive } else { ScanMode::Dyadic },
        min_frac,
        q_max,
        frequency: None,
    })
}

/// Nonzero `k ∈ ℤ^m` with `|k|_∞ ≤ k_max` and first nonzero entry positive,
/// ordered by `|k|_∞` and then lexicographically.
pub fn half_space_frequencies(m: usize, k_max: i64) -> Vec<Vec<i64>> {
    let mut out = Vec::new();
    for r in 1..=k_max {
        let side = (2 * r + 1) as usize;
        let total = side.pow(m as u32);
        for idx in 0..total {
            let mut rest = idx;
            let mut k = vec![0i64; m];
            for slot in k.iter_mut().rev() {
                *slot = (rest % side) as i64 - r;
                rest /= side;
            }
            let sup = k.iter().map(|v| v.abs()).max().unwrap_or(0);
            let first = k.iter().find(|&&v| v != 0).copied().unwrap_or(0);
            if sup == r && first > 0 {
                out.push(k);
            }
        }
    }
    out
}

/// Runs [`total_equidistribution_estimate`] on `e(k·x_n)` for every
/// frequency in [`half_space_frequencies`] and keeps the worst.
pub fn character_family_estimate(
    points: &[Vec<f64>],
    k_max: i64,
    q_max: u64,
    min_frac: f64,
) -> Result<EquidistributionReport> {
    let m = points.first().map(Vec::len).ok_or_else(|| Error::arg("points must be nonempty"))?;
    if m == 0 || points.iter().any(|p| p.len() != m) {
        return Err(Error::arg("points must share a positive dimension"));
    }
    let mut best: Option<EquidistributionReport> = None;
    let mut tested = 0;
    let mut dyadic = false;
    for k in half_space_frequencies(m, k_max) {
        let values: Vec<Complex64> = points
            .iter()
            .map(|x| {
                let phase = x.iter().zip(&k).fold(Dd::ZERO, |acc, (&xi, &ki)| {
                    acc + Dd::from_f64(xi) * Dd::from_i64(ki)
                });
                e_dd(phase)
            })
            .collect();
        let mut r = total_equidistribution_estimate(&values, 1.0, q_max, min_frac)?;
        tested += r.tested_progressions;
        dyadic |= r.scan == ScanMode::Dyadic;
        r.frequency = Some(k);
        r.test_family = TestFamily::Characters;
        if best.as_ref().is_none_or(|b| better(r.delta_hat, b.delta_hat)) {
            best = Some(r);
        }
    }
    if let Some(b) = best.as_mut() {
        b.tested_progressions = tested;
        if dyadic {
            b.scan = ScanMode::Dyadic;
        }
    }
    best.ok_or_else(|| Error::arg("k_max must be at least 1"))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    EquidistributedAtScale,
    Obstructed,
    /// No frequency has small norm, yet some Weyl sum reaches the threshold.
    Inconclusive,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ObstructionCertificate {
    /// Minimising frequency when obstructed; otherwise the frequency with the
    /// largest Weyl sum.
    pub k: Vec<i64>,
    /// `‖k·g‖_{C^∞[N]}`.
    pub norm: f64,
    pub verdict: Verdict,
    /// Largest `|E e(k·g(n))|` when Weyl sums were computed.
    pub max_weyl: Option<f64>,
    pub tested_frequencies: usize,
}

pub fn torus_dichotomy(g: &[TorusPolynomial], n: u64, k_max: i64, threshold: f64) -> Result<ObstructionCertificate> {
    if g.is_empty() {
        return Err(Error::arg("g needs at least one component"));
    }
    if k_max < 1 || n == 0 {
        return Err(Error::arg("K_max and N must be positive"));
    }
    let freqs = half_space_frequencies(g.len(), k_max);
    let combined: Vec<TorusPolynomial> = freqs.iter().map(|k| TorusPolynomial::combine(g, k)).collect();
    let norms: Vec<f64> = combined.iter().map(|p| smoothness_norm(p, n).value).collect();
    let mut arg = 0;
    for (i, &v) in norms.iter().enumerate() {
        if v < norms[arg] {
            arg = i;
        }
    }
    if norms[arg] <= threshold {
        return Ok(ObstructionCertificate {
            k: freqs[arg].clone(),
            norm: norms[arg],
            verdict: Verdict::Obstructed,
            max_weyl: None,
            tested_frequencies: freqs.len(),
        });
    }
    let sums = combined
        .iter()
        .map(|p| weyl_sum(p, n).map(|z| z.norm()))
        .collect::<Result<Vec<f64>>>()?;
    let mut arg = 0;
    for (i, &v) in sums.iter().enumerate() {
        if v > sums[arg] {
            arg = i;
        }
    }
    Ok(ObstructionCertificate {
        k: freqs[arg].clone(),
        norm: norms[arg],
        verdict: if sums[arg] < threshold {
            Verdict::EquidistributedAtScale
        } else {
            Verdict::Inconclusive
        },
        max_weyl: Some(sums[arg]),
        tested_frequencies: freqs.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn weyl_examples() {
        let zero = TorusPolynomial::from_reals(&[0.0]);
        assert_eq!(weyl_sum(&zero, 100).unwrap(), Complex64::new(1.0, 0.0));
        let half = TorusPolynomial::linear_rational(1, 2);
        assert!(weyl_sum(&half, 1000).unwrap().norm() < 1e-13);
        assert!(weyl_sum(&half, 0).is_err());
    }

    #[test]
    fn discrepancy_examples() {
        let n = 64;
        let grid: Vec<f64> = (1..=n).map(|i| (2 * i - 1) as f64 / (2 * n) as f64).collect();
        assert!((star_discrepancy(&grid).unwrap() - 1.0 / 128.0).abs() < 1e-15);
        assert_eq!(star_discrepancy(&[0.5]).unwrap(), 0.5);
        assert!(star_discrepancy(&[]).is_err());
    }

    #[test]
    fn parity_progression() {
        let v: Vec<Complex64> = (1..=200).map(|n| Complex64::new(if n % 2 == 0 { 1.0 } else { -1.0 }, 0.0)).collect();
        let r = total_equidistribution_estimate(&v, 1.0, 3, 0.5).unwrap();
        assert_eq!(r.delta_hat, 1.0);
        assert_eq!(r.witness.step, 2);
        let zeros = vec![Complex64::new(0.0, 0.0); 50];
        assert_eq!(total_equidistribution_estimate(&zeros, 1.0, 5, 0.2).unwrap().delta_hat, 0.0);
        assert!(total_equidistribution_estimate(&[], 1.0, 5, 0.2).is_err());
    }

    #[test]
    fn dyadic_scan_on_long_classes() {
        let sqrt2 = Dd::from_f64(2.0).sqrt();
        let v: Vec<Complex64> = (1..=10_000).map(|n| e_dd(sqrt2 * Dd::from_i64(n))).collect();
        let r = total_equidistribution_estimate(&v, 1.0, 20, 0.5).unwrap();
        assert_eq!(r.scan, ScanMode::Dyadic);
        assert!(r.delta_hat < 0.05, "{}", r.delta_hat);
    }

    #[test]
    fn frequencies_cover_half_space() {
        let f = half_space_frequencies(2, 2);
        assert_eq!(f.len(), (25 - 1) / 2);
        assert_eq!(f[0], vec![0, 1]);
        assert_eq!(half_space_frequencies(1, 3), vec![vec![1], vec![2], vec![3]]);
    }

    #[test]
    fn dichotomy_examples() {
        let half = TorusPolynomial::linear_rational(1, 2);
        let c = torus_dichotomy(&[half], 10_000, 20, 0.1).unwrap();
        assert_eq!((c.k.as_slice(), c.norm, c.verdict), (&[2][..], 0.0, Verdict::Obstructed));
        let sqrt2 = TorusPolynomial::linear(Dd::from_f64(2.0).sqrt());
        let c = torus_dichotomy(std::slice::from_ref(&sqrt2), 10_000, 10, 0.1).unwrap();
        assert_eq!(c.verdict, Verdict::EquidistributedAtScale);
        let sqrt3 = TorusPolynomial::linear(Dd::from_f64(3.0).sqrt());
        let c = torus_dichotomy(&[sqrt2, sqrt3], 10_000, 5, 0.1).unwrap();
        assert_eq!(c.verdict, Verdict::EquidistributedAtScale);
    }
}
