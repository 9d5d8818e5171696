//! Invariants checked on random inputs.

use nilcorr::arith::{sieve_range, liouville_from_mobius};
use nilcorr::correlator::{classify_arcs, type_ii_statistic};
use nilcorr::dd::Dd;
use nilcorr::dirichlet::{fourier_expand, inversion_defect, plancherel_defect, unit_group};
use nilcorr::equidist::{star_discrepancy, torus_dichotomy, weyl_sum, Verdict};
use nilcorr::heisenberg::{reduce, ExactPoint, HeisenbergPoint};
use nilcorr::polyseq::{
    binomial_coeffs_to_monomial, binomial_to_monomial, circle_norm_rational, monomial_coeffs_to_binomial, rational,
    smoothness_norm, smoothness_norm_exact, TorusPolynomial,
};
use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_integer::Integer;
use proptest::prelude::*;

fn small() -> impl Strategy<Value = f64> {
    -10.0f64..10.0
}

fn point() -> impl Strategy<Value = HeisenbergPoint<f64>> {
    (small(), small(), small()).prop_map(|(x, y, z)| HeisenbergPoint::new(x, y, z))
}

fn exact_point() -> impl Strategy<Value = ExactPoint> {
    prop::array::uniform6(-40i64..40).prop_map(|v| {
        ExactPoint::new(
            rational(v[0], v[1].abs() + 1),
            rational(v[2], v[3].abs() + 1),
            rational(v[4], v[5].abs() + 1),
        )
    })
}

fn rationals(len: std::ops::RangeInclusive<usize>) -> impl Strategy<Value = Vec<BigRational>> {
    prop::collection::vec((-60i64..60, 1i64..40), len).prop_map(|v| v.into_iter().map(|(a, b)| rational(a, b)).collect())
}

proptest! {
    #[test]
    fn associativity_float(a in point(), b in point(), c in point()) {
        let l = &(&a * &b) * &c;
        let r = &a * &(&b * &c);
        prop_assert!((l.x - r.x).abs() < 1e-12 && (l.y - r.y).abs() < 1e-12 && (l.z - r.z).abs() < 1e-12);
    }

    #[test]
    fn associativity_and_inverse_exact(a in exact_point(), b in exact_point(), c in exact_point()) {
        prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
        prop_assert_eq!(&a * &a.inverse(), ExactPoint::identity());
    }

    #[test]
    fn reduce_is_invariant_and_idempotent(
        x in small(), y in small(), z in small(),
        gamma in prop::array::uniform3(-20i64..20),
    ) {
        let g = HeisenbergPoint::new(Dd::from_f64(x), Dd::from_f64(y), Dd::from_f64(z));
        let gm = HeisenbergPoint::new(Dd::from_i64(gamma[0]), Dd::from_i64(gamma[1]), Dd::from_i64(gamma[2]));
        let a = reduce(&g);
        let b = reduce(&(&g * &gm));
        for i in 0..3 {
            let d = (a.coords[i] - b.coords[i]).abs();
            prop_assert!(d.min(1.0 - d) < 1e-12);
            prop_assert!((0.0..1.0).contains(&a.coords[i]));
        }
        let again = reduce(&a.embed());
        for i in 0..3 {
            let d = (again.coords[i] - a.coords[i]).abs();
            prop_assert!(d.min(1.0 - d) < 1e-14);
        }
    }

    #[test]
    fn stirling_conversions_invert(beta in rationals(1..=9)) {
        let alpha = monomial_coeffs_to_binomial(&beta);
        prop_assert_eq!(binomial_coeffs_to_monomial(&alpha), beta);
    }

    #[test]
    fn clearing_bound_holds(alpha in rationals(2..=7), n in 1u64..5000) {
        let p = TorusPolynomial::from_rationals(alpha);
        let m = binomial_to_monomial(&p).unwrap();
        let norm = smoothness_norm_exact(&p, n).unwrap();
        let q = BigRational::from_integer(BigInt::from(m.q));
        let nn = BigRational::from_integer(BigInt::from(n));
        for j in 1..m.beta.len() {
            let lhs = circle_norm_rational(&(&q * &m.beta[j]));
            let rhs = &m.constants[j] * &norm / num_traits::pow(nn.clone(), j);
            prop_assert!(lhs <= rhs, "j = {}: {} > {}", j, lhs, rhs);
        }
        let lcm = p.exact().unwrap().iter().fold(BigInt::from(1), |acc, a| acc.lcm(a.denom()));
        for b in &m.beta {
            prop_assert!((&q * b * BigRational::from_integer(lcm.clone())).is_integer());
        }
    }

    #[test]
    fn integer_shifts_do_not_change_polynomials(
        alpha in prop::collection::vec(0.0f64..1.0, 1..5),
        shift in prop::collection::vec(-5i64..5, 5),
        n in 1u64..300,
    ) {
        let shifted: Vec<f64> = alpha.iter().zip(&shift).map(|(a, s)| a + *s as f64).collect();
        let p = TorusPolynomial::from_reals(&alpha);
        let q = TorusPolynomial::from_reals(&shifted);
        prop_assert!((smoothness_norm(&p, n).value - smoothness_norm(&q, n).value).abs() < 1e-9 * (n as f64).powi(4));
        let a = weyl_sum(&p, n).unwrap();
        prop_assert!(a.norm() <= 1.0 + 1e-12);
        let b = weyl_sum(&q, n).unwrap();
        prop_assert!((a - b).norm() < 1e-9);
    }

    #[test]
    fn rational_weyl_shift_is_exact(a in -30i64..30, b in 1i64..30, s in -5i64..5) {
        let p = TorusPolynomial::from_rationals(vec![rational(0, 1), rational(a, b)]);
        let q = TorusPolynomial::from_rationals(vec![rational(s, 1), rational(a + s * b, b)]);
        prop_assert_eq!(weyl_sum(&p, 97).unwrap(), weyl_sum(&q, 97).unwrap());
    }

    #[test]
    fn discrepancy_bounds_and_symmetry(mut pts in prop::collection::vec(0.0f64..1.0, 1..200)) {
        let d = star_discrepancy(&pts).unwrap();
        let n = pts.len() as f64;
        prop_assert!(d >= 0.5 / n - 1e-15 && d <= 1.0);
        pts.reverse();
        prop_assert_eq!(star_discrepancy(&pts).unwrap(), d);
    }

    #[test]
    fn type_ii_is_nonnegative(
        phases in prop::collection::vec(0.0f64..1.0, 400),
        k in 1u64..8, w in 1u64..12,
    ) {
        let f: Vec<Complex64> = phases.iter().map(|&x| Complex64::cis(std::f64::consts::TAU * x)).collect();
        let v = type_ii_statistic(&f, 100, k, w).unwrap();
        prop_assert!(v >= -1e-12);
    }

    #[test]
    fn fourier_plancherel_and_inversion(q in 1u64..200, seed in any::<u64>()) {
        let g = unit_group(q).unwrap();
        let mut s = seed;
        let f: Vec<Complex64> = (0..q).map(|r| {
            s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            let v = (s >> 11) as f64 / (1u64 << 53) as f64;
            if g.is_unit(r) { Complex64::cis(std::f64::consts::TAU * v) * v } else { Complex64::new(0.0, 0.0) }
        }).collect();
        let ex = fourier_expand(&g, &f).unwrap();
        prop_assert!(plancherel_defect(&g, &f, &ex) < 1e-12);
        prop_assert!(inversion_defect(&g, &f, &ex) < 1e-12);
        let sum: Complex64 = ex.coefficients.iter().sum();
        let l2: f64 = ex.coefficients.iter().map(|c| c.norm_sqr()).sum();
        prop_assert!(sum.norm() <= (g.phi() as f64).sqrt() * l2.sqrt() + 1e-12);
    }

    #[test]
    fn arc_class_ignores_integer_shifts(a in 0.0f64..1.0, s in -4i64..4) {
        let p = TorusPolynomial::linear(Dd::from_f64(a));
        let q = TorusPolynomial::linear(Dd::from_f64(a) + Dd::from_i64(s));
        prop_assert_eq!(classify_arcs(&[p], 1000, 20, 0.1).unwrap(), classify_arcs(&[q], 1000, 20, 0.1).unwrap());
    }
}

#[test]
fn characters_are_completely_multiplicative() {
    for q in 1..=50u64 {
        let g = unit_group(q).unwrap();
        let units = g.units();
        for chi in g.characters() {
            let v = g.values(&chi);
            for &m in &units {
                for &n in &units {
                    let lhs = v[(m * n % q) as usize];
                    assert!((lhs - v[m as usize] * v[n as usize]).norm() < 1e-12, "q = {q}");
                }
            }
        }
    }
}

#[test]
fn rational_phases_are_obstructed_by_their_denominator() {
    for q in 1..=20i64 {
        for a in 0..q {
            let g = TorusPolynomial::linear_rational(a, q);
            let c = torus_dichotomy(&[g], 10_000, 20, 0.1).unwrap();
            assert_eq!(c.verdict, Verdict::Obstructed);
            assert!(c.k[0].abs() <= q, "a/q = {a}/{q}: k = {:?}", c.k);
        }
    }
}

#[test]
fn liouville_identity_on_a_window() {
    let t = sieve_range(1, 100_001).unwrap();
    assert_eq!(liouville_from_mobius(t.mu_slice()), t.lambda_slice());
}
