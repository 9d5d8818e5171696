//! Exact-identity suites exercising every module, used by the `selftest`
//! command.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::arith::{liouville_from_mobius, mertens, sieve_range};
use crate::circle::e;
use crate::dd::Dd;
use crate::dirichlet::{
    fourier_expand, inversion_defect, mobius_periodic_correlation_paths, orthogonality_defect, plancherel_defect,
    unit_group,
};
use crate::error::Result;
use crate::heisenberg::{bracket_value, case2_suborbit, orbit_point, reduce};
use crate::polyseq::{binomial_coeffs_to_monomial, monomial_coeffs_to_binomial, rational};

#[derive(Clone, Debug, Serialize)]
pub struct SuiteResult {
    pub name: &'static str,
    pub passed: u64,
    pub total: u64,
    /// First few failing cases.
    pub failures: Vec<String>,
}

impl SuiteResult {
    fn new(name: &'static str) -> Self {
        SuiteResult {
            name,
            passed: 0,
            total: 0,
            failures: Vec::new(),
        }
    }

    fn check(&mut self, ok: bool, what: impl FnOnce() -> String) {
        self.total += 1;
        if ok {
            self.passed += 1;
        } else if self.failures.len() < 5 {
            self.failures.push(what());
        }
    }

    pub fn ok(&self) -> bool {
        self.passed == self.total
    }
}

fn circ_gap(a: f64, b: f64) -> f64 {
    let d = (a - b).abs();
    d.min(1.0 - d)
}

/// Runs every suite at scale `n` (sieve identities up to `n`, orbit
/// identities up to `min(n, 10⁴)`).
pub fn run_all(n: u64, seed: u64) -> Result<Vec<SuiteResult>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let table = sieve_range(1, n + 1)?;
    let mu = table.mu_slice();

    let mut inversion = SuiteResult::new("mobius-inversion");
    let mut acc = vec![0i64; n as usize + 1];
    for d in 1..=n {
        let m = mu[d as usize - 1] as i64;
        if m != 0 {
            for k in (d..=n).step_by(d as usize) {
                acc[k as usize] += m;
            }
        }
    }
    for k in 1..=n {
        inversion.check(acc[k as usize] == i64::from(k == 1), || format!("n = {k}"));
    }

    let mut liouville = SuiteResult::new("liouville-square-divisor");
    let via = liouville_from_mobius(mu);
    for (i, (&a, &b)) in table.lambda_slice().iter().zip(&via).enumerate() {
        liouville.check(a == b, || format!("n = {}", i + 1));
    }

    let mut mertens_suite = SuiteResult::new("mertens-streamed");
    let mut running = 0i64;
    let mut checkpoint = 1u64;
    for k in 1..=n {
        running += mu[k as usize - 1] as i64;
        if k == checkpoint || k == n {
            let m = mertens(k)?;
            mertens_suite.check(m == running, || format!("M({k}) = {m}, table gives {running}"));
            checkpoint *= 10;
        }
    }

    let mut characters = SuiteResult::new("characters");
    for q in 1..=100u64 {
        let g = unit_group(q)?;
        let orth = orthogonality_defect(&g);
        characters.check(orth < 1e-12, || format!("orthogonality q = {q}: {orth:e}"));
        let f: Vec<Complex64> = (0..q)
            .map(|r| {
                if g.is_unit(r) {
                    Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
                } else {
                    Complex64::new(0.0, 0.0)
                }
            })
            .collect();
        let ex = fourier_expand(&g, &f)?;
        let p = plancherel_defect(&g, &f, &ex);
        let inv = inversion_defect(&g, &f, &ex);
        characters.check(p < 1e-12, || format!("Plancherel q = {q}: {p:e}"));
        characters.check(inv < 1e-12, || format!("inversion q = {q}: {inv:e}"));
    }

    let mut periodic = SuiteResult::new("periodic-split");
    let span = &mu[..mu.len().min(10_000)];
    for _ in 0..20 {
        let q = rng.gen_range(1..=30usize);
        let f: Vec<Complex64> = (0..q).map(|_| e(rng.gen::<f64>())).collect();
        let p = mobius_periodic_correlation_paths(&f, span)?;
        let gap = (p.direct - p.split).norm();
        periodic.check(gap < 1e-10, || format!("q = {q}: {gap:e}"));
    }

    let orbit_n = n.min(10_000) as i64;
    let mut bracket = SuiteResult::new("bracket-identity");
    let mut pairs = vec![(Dd::from_f64(2.0).sqrt(), Dd::from_f64(3.0).sqrt())];
    pairs.extend((0..20).map(|_| (Dd::from_f64(rng.gen_range(0.0..10.0)), Dd::from_f64(rng.gen_range(0.0..10.0)))));
    for (a, b) in &pairs {
        for k in 1..=orbit_n {
            let gap = circ_gap(bracket_value(*a, *b, k), reduce(&orbit_point(*a, *b, k)).tau3());
            bracket.check(gap < 1e-9, || format!("alpha = {a}, beta = {b}, n = {k}: {gap:e}"));
        }
    }

    let mut case2 = SuiteResult::new("case2-segments");
    let sqrt2 = Dd::from_f64(2.0).sqrt();
    for k in 0..=orbit_n {
        let r = case2_suborbit(sqrt2, k);
        case2.check(r.is_ok(), || format!("n = {k}"));
    }

    let mut stirling = SuiteResult::new("stirling-round-trip");
    for _ in 0..50 {
        let d = rng.gen_range(0..8usize);
        let beta: Vec<_> = (0..=d)
            .map(|_| rational(rng.gen_range(-50..50), rng.gen_range(1..30)))
            .collect();
        let back = binomial_coeffs_to_monomial(&monomial_coeffs_to_binomial(&beta));
        stirling.check(back == beta, || format!("degree {d}"));
    }

    Ok(vec![
        inversion,
        liouville,
        mertens_suite,
        characters,
        periodic,
        bracket,
        case2,
        stirling,
    ])
}
