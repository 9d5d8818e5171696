use std::fs;
use std::path::PathBuf;

use nilcorr::arith::{sieve_range, sieve_range_cached};
use nilcorr::circle::e_dd;
use nilcorr::correlator::{
    bracket_correlation, classify_arcs, correlate_fn, fit_exponent, nth_prime_bound, prime_orbit_average,
    type_ii_ladder, type_sums_report, CorrelationSeries, FitMode, PrimeMode, Weight,
};
use nilcorr::dd::Dd;
use nilcorr::dirichlet::{
    fourier_expand, inversion_defect, mobius_character_correlation_with, orthogonality_defect, plancherel_defect,
    unit_group,
};
use nilcorr::equidist::{character_family_estimate, star_discrepancy, torus_dichotomy};
use nilcorr::heisenberg::{orbit_point, reduce};
use nilcorr::param::{parse_count, parse_ladder, parse_param, Param};
use nilcorr::polyseq::{PolynomialJson, TorusPolynomial};
use nilcorr::psi::Psi;
use nilcorr::selftest::run_all;
use nilcorr::{Error, Result};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::json;

use crate::output::{num, series_rows, Sink, SERIES_HEADER};
use crate::{
    CharArgs, CorrelateArgs, DichotomyArgs, EquidistArgs, FitArg, PrimeModeArg, PrimeOrbitArgs, PsiArg, SelftestArgs,
    SieveArgs, TypesumsArgs, WeightArg,
};

pub const CACHE_ENV: &str = "NILCORR_CACHE_DIR";

fn pair(s: &str) -> Result<(Param, Param)> {
    let (a, b) = s
        .split_once(',')
        .ok_or_else(|| Error::Argument(format!("expected `alpha,beta`, got `{s}`")))?;
    Ok((parse_param(a)?, parse_param(b)?))
}

fn psi_from(kind: PsiArg, table: Option<&PathBuf>) -> Result<Psi> {
    if let Some(path) = table {
        let text = fs::read_to_string(path)?;
        let knots = text
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty())
            .map(|l| l.parse::<f64>().map_err(|_| Error::Format(format!("bad knot value `{l}` in {}", path.display()))))
            .collect::<Result<Vec<f64>>>()?;
        return Psi::table(knots);
    }
    Ok(match kind {
        PsiArg::One => Psi::One,
        PsiArg::Exp => Psi::Exp,
        PsiArg::Tent => Psi::Tent,
        PsiArg::Bump => Psi::Bump,
    })
}

fn weight_of(w: WeightArg) -> Weight {
    match w {
        WeightArg::Mobius => Weight::Mobius,
        WeightArg::Liouville => Weight::Liouville,
    }
}

fn fit_of(f: FitArg) -> FitMode {
    match f {
        FitArg::Power => FitMode::Power,
        FitArg::LogPower => FitMode::LogPower,
    }
}

pub fn sieve(sink: &mut Sink, a: &SieveArgs) -> Result<()> {
    let lo = parse_count(&a.lo)?;
    let hi = parse_count(&a.hi)?;
    let cache = std::env::var_os(CACHE_ENV).map(PathBuf::from);
    let t = sieve_range_cached(lo, hi, cache.as_deref())?;
    let mu_sum: i64 = t.mu_slice().iter().map(|&m| m as i64).sum();
    let lambda_sum: i64 = t.lambda_slice().iter().map(|&m| m as i64).sum();
    let prime_count = t.primes().count();
    let params = json!({ "lo": lo, "hi": hi });
    if a.summary {
        let summary = json!({ "mu_sum": mu_sum, "lambda_sum": lambda_sum, "prime_count": prime_count });
        let row = vec![lo.to_string(), hi.to_string(), mu_sum.to_string(), lambda_sum.to_string(), prime_count.to_string()];
        return sink.emit("sieve", params, &summary, &["lo", "hi", "mu_sum", "lambda_sum", "prime_count"], &[row]);
    }
    #[derive(Serialize)]
    struct Row {
        n: u64,
        mu: i8,
        lambda: i8,
        lambda_prime: f64,
    }
    let rows: Vec<Row> = (lo..hi)
        .map(|n| Row {
            n,
            mu: t.mu(n),
            lambda: t.lambda(n),
            lambda_prime: t.lambda_prime(n),
        })
        .collect();
    let cells: Vec<Vec<String>> = rows
        .iter()
        .map(|r| vec![r.n.to_string(), r.mu.to_string(), r.lambda.to_string(), num(r.lambda_prime)])
        .collect();
    sink.emit("sieve", params, &rows, &["n", "mu", "lambda", "lambda_prime"], &cells)
}

pub fn correlate(sink: &mut Sink, a: &CorrelateArgs) -> Result<()> {
    let ns = parse_ladder(&a.ladder)?;
    let weight = weight_of(a.weight);
    let fit = fit_of(a.fit);
    let psi = psi_from(a.psi, a.psi_table.as_ref())?;
    let (kind, series, params): (&str, CorrelationSeries, _) = if let Some(tok) = &a.phase {
        let alpha = parse_param(tok)?.value;
        let s = correlate_fn(|n| e_dd(alpha * Dd::from_i64(n as i64)), &ns, weight, fit)?;
        ("davenport", s, json!({ "phase": tok }))
    } else if let Some(p) = &a.bracket {
        let (x, y) = pair(p)?;
        let mut s = bracket_correlation(x.value, y.value, &psi, &ns, weight)?;
        s.fit_mode = fit;
        s.fitted_exponent = fit_exponent(&s.ns, &s.normalized, fit);
        ("bracket", s, json!({ "alpha": x.token, "beta": y.token, "psi": psi.name() }))
    } else if let Some(p) = &a.nil {
        let (x, y) = pair(p)?;
        let (al, be) = (x.value, y.value);
        let s = correlate_fn(|n| psi.eval(reduce(&orbit_point(al, be, n as i64)).tau3()), &ns, weight, fit)?;
        ("nilsequence", s, json!({ "alpha": x.token, "beta": y.token, "psi": psi.name() }))
    } else {
        return Err(Error::Argument("correlate needs one of --phase, --bracket or --nil".into()));
    };
    let mut params = params;
    params["kind"] = json!(kind);
    params["weight"] = json!(weight);
    params["ladder"] = json!(ns);
    params["fit"] = json!(fit);
    sink.emit("correlate", params, &series, &SERIES_HEADER, &series_rows(&series))
}

pub fn typesums(sink: &mut Sink, a: &TypesumsArgs) -> Result<()> {
    let alpha = parse_param(&a.phase)?.value;
    let n = parse_count(&a.n)?;
    let pairs = match a.k {
        Some(k) if k > 0 => vec![(k, a.w.unwrap_or(n / k).max(1))],
        Some(_) => return Err(Error::Argument("K must be positive".into())),
        None => type_ii_ladder(n),
    };
    let top = pairs.iter().map(|&(k, w)| 2 * k * (2 * w)).max().unwrap_or(0).max(2 * n);
    let f: Vec<Complex64> = (1..=top).map(|m| e_dd(alpha * Dd::from_i64(m as i64))).collect();
    let reports = pairs
        .iter()
        .map(|&(k, w)| type_sums_report(&f, n, k, w, a.threshold_type1, a.threshold_type2))
        .collect::<Result<Vec<_>>>()?;
    let rows: Vec<Vec<String>> = reports
        .iter()
        .map(|r| {
            vec![
                r.k.to_string(),
                r.w.to_string(),
                num(r.median_type1),
                num(r.max_type1),
                num(r.type2),
                r.in_range.to_string(),
                serde_json::to_value(r.classification).unwrap().as_str().unwrap_or("").to_string(),
            ]
        })
        .collect();
    let params = json!({ "phase": a.phase, "n": n, "threshold_type1": a.threshold_type1, "threshold_type2": a.threshold_type2 });
    sink.emit(
        "typesums",
        params,
        &reports,
        &["K", "W", "type1_median", "type1_max", "type2", "in_range", "classification"],
        &rows,
    )
}

pub fn equidist(sink: &mut Sink, a: &EquidistArgs) -> Result<()> {
    let alphas = a.phase.iter().map(|t| parse_param(t).map(|p| p.value)).collect::<Result<Vec<Dd>>>()?;
    let n = parse_count(&a.n)?;
    let points: Vec<Vec<f64>> = (1..=n)
        .map(|m| alphas.iter().map(|&al| (al * Dd::from_i64(m as i64)).frac_f64()).collect())
        .collect();
    let r = character_family_estimate(&points, a.k_max, a.q_max, a.min_frac)?;
    let freq = r
        .frequency
        .as_ref()
        .map(|k| k.iter().map(i64::to_string).collect::<Vec<_>>().join(" "))
        .unwrap_or_default();
    let row = vec![
        num(r.delta_hat),
        r.witness.start.to_string(),
        r.witness.step.to_string(),
        r.witness.length.to_string(),
        r.tested_progressions.to_string(),
        serde_json::to_value(r.scan).unwrap().as_str().unwrap_or("").to_string(),
        freq,
    ];
    let params = json!({ "phase": a.phase, "n": n, "q_max": a.q_max, "min_frac": a.min_frac, "k_max": a.k_max });
    sink.emit(
        "equidist",
        params,
        &r,
        &["delta_hat", "start", "step", "length", "tested_progressions", "scan", "frequency"],
        &[row],
    )
}

pub fn dichotomy(sink: &mut Sink, a: &DichotomyArgs) -> Result<()> {
    let polys: Vec<TorusPolynomial> = if let Some(path) = &a.poly {
        let text = fs::read_to_string(path)?;
        let value: serde_json::Value = serde_json::from_str(&text).map_err(|e| Error::Format(e.to_string()))?;
        let items = match value {
            serde_json::Value::Array(v) => v,
            other => vec![other],
        };
        items
            .into_iter()
            .map(|v| {
                let j: PolynomialJson = serde_json::from_value(v).map_err(|e| Error::Format(e.to_string()))?;
                TorusPolynomial::from_json(&j)
            })
            .collect::<Result<_>>()?
    } else {
        a.phase.iter().map(|t| parse_param(t).map(|p| p.linear_phase())).collect::<Result<_>>()?
    };
    if polys.is_empty() {
        return Err(Error::Argument("dichotomy needs --phase or --poly".into()));
    }
    let n = parse_count(&a.n)?;
    let cert = torus_dichotomy(&polys, n, a.k_max, a.threshold)?;
    let arcs = classify_arcs(&polys, n, a.k_max, a.threshold)?;
    let k = cert.k.iter().map(i64::to_string).collect::<Vec<_>>().join(" ");
    let verdict = serde_json::to_value(cert.verdict).unwrap().as_str().unwrap_or("").to_string();
    let arc = serde_json::to_value(arcs).unwrap().as_str().unwrap_or("").to_string();
    let row = vec![k, num(cert.norm), verdict, cert.max_weyl.map_or(String::new(), num), arc];
    let params = json!({ "n": n, "k_max": a.k_max, "threshold": a.threshold, "phase": a.phase });
    let result = json!({ "certificate": cert, "arc_class": arcs });
    sink.emit("dichotomy", params, &result, &["k", "norm", "verdict", "max_weyl", "arc_class"], &[row])
}

pub fn characters(sink: &mut Sink, a: &CharArgs) -> Result<()> {
    let g = unit_group(a.q)?;
    let params = json!({ "q": a.q, "plancherel": a.plancherel, "correlate": a.correlate });
    if a.plancherel {
        let mut rng = ChaCha8Rng::seed_from_u64(sink.seed);
        let f: Vec<Complex64> = (0..a.q)
            .map(|r| {
                if g.is_unit(r) {
                    Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
                } else {
                    Complex64::new(0.0, 0.0)
                }
            })
            .collect();
        let ex = fourier_expand(&g, &f)?;
        let defects = json!({
            "orthogonality_defect": orthogonality_defect(&g),
            "plancherel_defect": plancherel_defect(&g, &f, &ex),
            "inversion_defect": inversion_defect(&g, &f, &ex),
        });
        let rows: Vec<Vec<String>> = ["orthogonality_defect", "plancherel_defect", "inversion_defect"]
            .iter()
            .map(|k| vec![k.to_string(), num(defects[k].as_f64().unwrap_or(f64::NAN))])
            .collect();
        return sink.emit("char", params, &defects, &["metric", "value"], &rows);
    }
    let mu = match &a.correlate {
        Some(s) => {
            let n = parse_count(s)?;
            Some(sieve_range(1, n + 1)?)
        }
        None => None,
    };
    #[derive(Serialize)]
    struct Entry {
        exponents: Vec<u64>,
        correlation: Option<Complex64>,
    }
    let mut entries = Vec::new();
    for chi in g.characters() {
        let correlation = match &mu {
            Some(t) => Some(mobius_character_correlation_with(&g, &chi, t.mu_slice())?),
            None => None,
        };
        entries.push(Entry {
            exponents: chi.exponents,
            correlation,
        });
    }
    let rows: Vec<Vec<String>> = entries
        .iter()
        .enumerate()
        .map(|(i, e)| {
            let exps = e.exponents.iter().map(u64::to_string).collect::<Vec<_>>().join(" ");
            match e.correlation {
                Some(z) => vec![i.to_string(), exps, num(z.re), num(z.im), num(z.norm())],
                None => vec![i.to_string(), exps, String::new(), String::new(), String::new()],
            }
        })
        .collect();
    let result = json!({ "generators": g.generators(), "phi": g.phi(), "characters": entries });
    sink.emit("char", params, &result, &["index", "exponents", "re", "im", "abs"], &rows)
}

pub fn prime_orbit(sink: &mut Sink, a: &PrimeOrbitArgs) -> Result<()> {
    let alpha = parse_param(&a.phase)?.value;
    let n = parse_count(&a.n)?;
    let mode = match a.mode {
        PrimeModeArg::NthPrime => PrimeMode::NthPrime,
        PrimeModeArg::LambdaWeighted => PrimeMode::LambdaWeighted,
    };
    let bound = match mode {
        PrimeMode::NthPrime => nth_prime_bound(n),
        PrimeMode::LambdaWeighted => nilcorr::correlator::primorial(a.w)?.saturating_mul(n + 1),
    };
    let table = sieve_range(1, bound + 1)?;
    let r = prime_orbit_average(&table, |m| e_dd(alpha * Dd::from_i64(m as i64)), mode, n, a.w)?;
    let discrepancy = match mode {
        PrimeMode::NthPrime => {
            let pts: Vec<f64> = table
                .first_primes(n as usize)?
                .iter()
                .map(|&p| (alpha * Dd::from_i64(p as i64)).frac_f64())
                .collect();
            Some(star_discrepancy(&pts)?)
        }
        PrimeMode::LambdaWeighted => None,
    };
    let z = |c: Complex64| vec![num(c.re), num(c.im), num(c.norm())];
    let mut rows = vec![[vec!["average".to_string()], z(r.average)].concat()];
    for (b, v) in &r.per_residue {
        rows.push([vec![format!("b={b}")], z(*v)].concat());
    }
    if let Some(d) = discrepancy {
        rows.push(vec!["star_discrepancy".into(), String::new(), String::new(), num(d)]);
    }
    let params = json!({ "phase": a.phase, "n": n, "mode": mode, "w": a.w });
    let result = json!({ "orbit": r, "star_discrepancy": discrepancy });
    sink.emit("prime-orbit", params, &result, &["quantity", "re", "im", "abs"], &rows)
}

pub fn selftest(sink: &mut Sink, a: &SelftestArgs) -> Result<()> {
    let n = parse_count(&a.n)?;
    let suites = run_all(n, sink.seed)?;
    match sink.format {
        crate::output::Format::Json => sink.json("selftest", json!({ "n": n }), &suites)?,
        crate::output::Format::Csv => {
            for s in &suites {
                sink.text(&format!(
                    "{:<26} {:>9}/{:<9} {}",
                    s.name,
                    s.passed,
                    s.total,
                    if s.ok() { "ok" } else { "FAILED" }
                ))?;
                for f in &s.failures {
                    sink.text(&format!("    {f}"))?;
                }
            }
        }
    }
    match suites.iter().find(|s| !s.ok()) {
        Some(s) => Err(Error::InternalConsistency {
            identity: s.name.to_string(),
            detail: format!("{} of {} cases failed", s.total - s.passed, s.total),
        }),
        None => Ok(()),
    }
}
