//! Brute-force reference computations shared by the integration targets.

#![allow(dead_code)]

use nilcorr::dd::Dd;
use num_complex::Complex64;

/// μ on `[0, n]` (index 0 unused) by a plain Eratosthenes pass.
pub fn naive_mobius(n: usize) -> Vec<i8> {
    let mut mu = vec![1i8; n + 1];
    let mut composite = vec![false; n + 1];
    for p in 2..=n {
        if composite[p] {
            continue;
        }
        for m in (p..=n).step_by(p) {
            if m > p {
                composite[m] = true;
            }
            mu[m] = -mu[m];
        }
        if let Some(sq) = p.checked_mul(p).filter(|&s| s <= n) {
            for m in (sq..=n).step_by(sq) {
                mu[m] = 0;
            }
        }
    }
    mu
}

/// `e(nθ)` with the phase reduced in double-double.
pub fn linear_phase(theta: Dd, n: u64) -> Complex64 {
    let x = (theta * Dd::from_i64(n as i64)).frac_f64();
    Complex64::cis(std::f64::consts::TAU * x)
}

pub fn sqrt2_phase(n: u64) -> Complex64 {
    linear_phase(Dd::from_f64(2.0).sqrt(), n)
}

/// `|E_{N/k < w ≤ 2N/k} f(kw)|` by scanning every `w`; `None` for an empty range.
pub fn literal_type_i(f: &[Complex64], n: u64, k: u64) -> Option<f64> {
    let mut s = Complex64::new(0.0, 0.0);
    let mut count = 0;
    for w in 1..=2 * n {
        if n < k * w && k * w <= 2 * n {
            s += f[(k * w) as usize - 1];
            count += 1;
        }
    }
    (count > 0).then(|| s.norm() / count as f64)
}

/// The four-index average `E f(kw) f̄(k'w) f̄(kw') f(k'w')`.
pub fn literal_type_ii(f: &[Complex64], k: u64, w: u64) -> f64 {
    let g = |m: u64| f[m as usize - 1];
    let mut total = 0.0;
    for k1 in k + 1..=2 * k {
        for k2 in k + 1..=2 * k {
            let mut s = Complex64::new(0.0, 0.0);
            for w1 in w..2 * w {
                for w2 in w..2 * w {
                    s += g(k1 * w1) * g(k2 * w1).conj() * g(k1 * w2).conj() * g(k2 * w2);
                }
            }
            total += s.re / (w * w) as f64;
        }
    }
    total / (k * k) as f64
}

/// Every progression of step `q ≤ q_max` and admissible length, summed from
/// scratch. Returns the best normalised magnitude and the number tested.
pub fn exhaustive_scan(values: &[Complex64], q_max: u64, min_frac: f64) -> (f64, u64) {
    let n = values.len() as u64;
    let mut best: f64 = 0.0;
    let mut tested = 0;
    for q in 1..=q_max.min(n) {
        let min_len = ((min_frac * n as f64 / q as f64).ceil() as u64).max(1);
        for a in 1..=n {
            let max_len = (n - a) / q + 1;
            for len in min_len..=max_len {
                let mut s = Complex64::new(0.0, 0.0);
                for i in 0..len {
                    s += values[(a + i * q) as usize - 1];
                }
                tested += 1;
                best = best.max(s.norm() / len as f64);
            }
        }
    }
    (best, tested)
}
