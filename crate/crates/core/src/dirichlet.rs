//! Dirichlet characters modulo `q` via a cyclic decomposition of
//! `(ℤ/qℤ)^×`, Fourier expansion on the unit group, and Möbius correlations
//! with characters and periodic sequences.

use num_complex::Complex64;
use num_integer::Integer;
use serde::{Deserialize, Serialize};

use crate::arith::{factorize, mobius_of, sieve_range};
use crate::error::{Error, Result};
use crate::sum::sum_range;

/// Largest modulus for which discrete-log tables are built.
pub const MAX_MODULUS: u64 = 1_000_000;

const NON_UNIT: u32 = u32::MAX;

fn pow_mod(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut r = 1 % m;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            r = (r as u128 * b as u128 % m as u128) as u64;
        }
        b = (b as u128 * b as u128 % m as u128) as u64;
        e >>= 1;
    }
    r
}

fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    (a as u128 * b as u128 % m as u128) as u64
}

fn primitive_root_prime_power(p: u64, k: u32) -> u64 {
    let pk = p.pow(k);
    let factors: Vec<u64> = factorize(p - 1).into_iter().map(|(r, _)| r).collect();
    let g = (2..p)
        .find(|&g| factors.iter().all(|&r| pow_mod(g, (p - 1) / r, p) != 1))
        .unwrap_or(1);
    if k >= 2 && pow_mod(g, p - 1, p * p) == 1 {
        (g + p) % pk
    } else {
        g
    }
}

/// The residue `≡ a (mod m)` and `≡ 1 (mod q/m)`.
fn crt_lift(a: u64, m: u64, q: u64) -> u64 {
    let rest = q / m;
    (0..m).map(|t| 1 + t * rest).find(|&x| x % m == a % m).unwrap_or(1) % q
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Generator {
    pub residue: u64,
    pub order: u64,
}

/// `(ℤ/qℤ)^× ≅ ∏ ℤ/order_i` with a discrete-log table.
#[derive(Clone, Debug)]
pub struct UnitGroup {
    q: u64,
    generators: Vec<Generator>,
    /// `dlog[n]` is the mixed-radix index `Σ e_i stride_i` of a unit `n`.
    dlog: Vec<u32>,
    strides: Vec<u64>,
    exponent: u64,
    roots: Vec<Complex64>,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct DirichletCharacter {
    pub q: u64,
    pub exponents: Vec<u64>,
}

impl DirichletCharacter {
    pub fn is_principal(&self) -> bool {
        self.exponents.iter().all(|&e| e == 0)
    }
}

pub fn unit_group(q: u64) -> Result<UnitGroup> {
    if q == 0 {
        return Err(Error::arg("modulus must be at least 1"));
    }
    if q > MAX_MODULUS {
        return Err(Error::resource(format!("modulus {q} exceeds table cap {MAX_MODULUS}")));
    }
    let mut generators = Vec::new();
    for (p, k) in factorize(q) {
        let pk = p.pow(k);
        let local: Vec<(u64, u64)> = if p == 2 {
            match k {
                1 => vec![],
                2 => vec![(3, 2)],
                _ => vec![(pk - 1, 2), (5, pk / 4)],
            }
        } else {
            vec![(primitive_root_prime_power(p, k), pk / p * (p - 1))]
        };
        for (g, order) in local {
            generators.push(Generator {
                residue: crt_lift(g, pk, q),
                order,
            });
        }
    }
    let mut strides = Vec::with_capacity(generators.len());
    let mut vals: Vec<u64> = vec![1 % q];
    for g in &generators {
        strides.push(vals.len() as u64);
        let mut next = Vec::with_capacity(vals.len() * g.order as usize);
        let mut power = 1 % q;
        for _ in 0..g.order {
            next.extend(vals.iter().map(|&v| mul_mod(v, power, q)));
            power = mul_mod(power, g.residue, q);
        }
        vals = next;
    }
    let mut dlog = vec![NON_UNIT; q as usize];
    for (idx, &v) in vals.iter().enumerate() {
        if dlog[v as usize] != NON_UNIT {
            return Err(Error::consistency(
                "unit group decomposition",
                format!("residue {v} mod {q} reached twice"),
            ));
        }
        dlog[v as usize] = idx as u32;
    }
    let exponent = generators.iter().fold(1u64, |acc, g| acc.lcm(&g.order));
    let roots = (0..exponent)
        .map(|t| Complex64::cis(std::f64::consts::TAU * t as f64 / exponent as f64))
        .collect();
    Ok(UnitGroup {
        q,
        generators,
        dlog,
        strides,
        exponent,
        roots,
    })
}

impl UnitGroup {
    pub fn q(&self) -> u64 {
        self.q
    }

    pub fn generators(&self) -> &[Generator] {
        &self.generators
    }

    pub fn phi(&self) -> u64 {
        self.generators.iter().map(|g| g.order).product()
    }

    /// Least common multiple of the generator orders.
    pub fn exponent(&self) -> u64 {
        self.exponent
    }

    pub fn is_unit(&self, n: u64) -> bool {
        self.dlog[(n % self.q) as usize] != NON_UNIT
    }

    pub fn units(&self) -> Vec<u64> {
        (0..self.q).filter(|&n| self.is_unit(n)).collect()
    }

    /// Exponent vector of `n` with respect to the generators.
    pub fn dlog(&self, n: u64) -> Option<Vec<u64>> {
        let idx = self.dlog[(n % self.q) as usize];
        (idx != NON_UNIT).then(|| {
            self.generators
                .iter()
                .zip(&self.strides)
                .map(|(g, &s)| (idx as u64 / s) % g.order)
                .collect()
        })
    }

    pub fn principal(&self) -> DirichletCharacter {
        DirichletCharacter {
            q: self.q,
            exponents: vec![0; self.generators.len()],
        }
    }

    /// All `φ(q)` characters in mixed-radix order.
    pub fn characters(&self) -> Vec<DirichletCharacter> {
        (0..self.phi())
            .map(|idx| DirichletCharacter {
                q: self.q,
                exponents: self
                    .generators
                    .iter()
                    .zip(&self.strides)
                    .map(|(g, &s)| (idx / s) % g.order)
                    .collect(),
            })
            .collect()
    }

    pub fn check_character(&self, chi: &DirichletCharacter) -> Result<()> {
        if chi.q != self.q || chi.exponents.len() != self.generators.len() {
            return Err(Error::arg(format!(
                "character mod {} with {} exponents does not match the group mod {}",
                chi.q,
                chi.exponents.len(),
                self.q
            )));
        }
        Ok(())
    }

    /// `χ(n)`, zero off the units.
    pub fn chi(&self, chi: &DirichletCharacter, n: u64) -> Complex64 {
        match self.dlog(n) {
            None => Complex64::new(0.0, 0.0),
            Some(e) => {
                let r = self
                    .generators
                    .iter()
                    .zip(&e)
                    .zip(&chi.exponents)
                    .fold(0u64, |acc, ((g, &ei), &ci)| {
                        let scaled = (ci % g.order) * ei % g.order * (self.exponent / g.order);
                        (acc + scaled) % self.exponent
                    });
                self.roots[r as usize]
            }
        }
    }

    /// `χ(0), …, χ(q - 1)`.
    pub fn values(&self, chi: &DirichletCharacter) -> Vec<Complex64> {
        (0..self.q).map(|n| self.chi(chi, n)).collect()
    }
}

#[derive(Clone, Debug)]
pub struct FourierExpansion {
    pub characters: Vec<DirichletCharacter>,
    /// `f̂(χ) = E_{n ∈ (ℤ/qℤ)^×} f(n) χ̄(n)`, aligned with `characters`.
    pub coefficients: Vec<Complex64>,
    /// Some non-unit residue carried a nonzero value, which was ignored.
    pub nonunit_ignored: bool,
}

impl FourierExpansion {
    /// `Σ_χ f̂(χ) χ(n)`.
    pub fn evaluate(&self, group: &UnitGroup, n: u64) -> Complex64 {
        self.characters
            .iter()
            .zip(&self.coefficients)
            .map(|(chi, c)| c * group.chi(chi, n))
            .sum()
    }
}

/// Expansion of `f: ℤ/qℤ → ℂ` (given as `f[0..q]`) over the characters.
pub fn fourier_expand(group: &UnitGroup, f: &[Complex64]) -> Result<FourierExpansion> {
    if f.len() as u64 != group.q {
        return Err(Error::arg(format!("f has length {} but q = {}", f.len(), group.q)));
    }
    let units = group.units();
    let nonunit_ignored = (0..group.q).any(|n| !group.is_unit(n) && f[n as usize] != Complex64::new(0.0, 0.0));
    if nonunit_ignored {
        log::warn!("fourier_expand: ignoring values of f on non-units mod {}", group.q);
    }
    let characters = group.characters();
    let phi = units.len() as f64;
    let coefficients = characters
        .iter()
        .map(|chi| {
            units
                .iter()
                .map(|&n| f[n as usize] * group.chi(chi, n).conj())
                .sum::<Complex64>()
                / phi
        })
        .collect();
    Ok(FourierExpansion {
        characters,
        coefficients,
        nonunit_ignored,
    })
}

/// `|Σ_χ |f̂(χ)|² - E_{units} |f(n)|²|`.
pub fn plancherel_defect(group: &UnitGroup, f: &[Complex64], expansion: &FourierExpansion) -> f64 {
    let units = group.units();
    let lhs: f64 = expansion.coefficients.iter().map(|c| c.norm_sqr()).sum();
    let rhs: f64 = units.iter().map(|&n| f[n as usize].norm_sqr()).sum::<f64>() / units.len() as f64;
    (lhs - rhs).abs()
}

/// `max_{units} |f(n) - Σ_χ f̂(χ)χ(n)|`.
pub fn inversion_defect(group: &UnitGroup, f: &[Complex64], expansion: &FourierExpansion) -> f64 {
    group
        .units()
        .iter()
        .map(|&n| (f[n as usize] - expansion.evaluate(group, n)).norm())
        .fold(0.0, f64::max)
}

/// `max_{χ, χ'} |E_{units} χ(n)χ̄'(n) - [χ = χ']|`.
pub fn orthogonality_defect(group: &UnitGroup) -> f64 {
    let tables: Vec<Vec<Complex64>> = group.characters().iter().map(|c| group.values(c)).collect();
    let units = group.units();
    let phi = units.len() as f64;
    let mut worst: f64 = 0.0;
    for (i, a) in tables.iter().enumerate() {
        for (j, b) in tables.iter().enumerate() {
            let s: Complex64 = units.iter().map(|&n| a[n as usize] * b[n as usize].conj()).sum::<Complex64>() / phi;
            let want = if i == j { 1.0 } else { 0.0 };
            worst = worst.max((s - want).norm());
        }
    }
    worst
}

/// `E_{n ∈ [N]} μ(n) χ̄(n)` with `mu[n - 1] = μ(n)`.
pub fn mobius_character_correlation_with(group: &UnitGroup, chi: &DirichletCharacter, mu: &[i8]) -> Result<Complex64> {
    group.check_character(chi)?;
    if mu.is_empty() {
        return Err(Error::arg("N must be at least 1"));
    }
    let conj: Vec<Complex64> = group.values(chi).iter().map(|z| z.conj()).collect();
    let s: Complex64 = sum_range(1, mu.len() as u64 + 1, |n| conj[(n % group.q) as usize] * mu[n as usize - 1] as f64);
    Ok(s / mu.len() as f64)
}

pub fn mobius_character_correlation(group: &UnitGroup, chi: &DirichletCharacter, n: u64) -> Result<Complex64> {
    if n == 0 {
        return Err(Error::arg("N must be at least 1"));
    }
    let table = sieve_range(1, n + 1)?;
    mobius_character_correlation_with(group, chi, table.mu_slice())
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PeriodicCorrelation {
    pub direct: Complex64,
    /// Through `n = dm` with `d = (n, q)`:
    /// `Σ_{d | q} μ(d) Σ_{m ≤ N/d, (m,q)=1} μ(m) f̄(dm)`, normalised by `N`.
    pub split: Complex64,
}

pub const PERIODIC_TOLERANCE: f64 = 1e-10;

pub fn mobius_periodic_correlation_paths(f: &[Complex64], mu: &[i8]) -> Result<PeriodicCorrelation> {
    if f.is_empty() {
        return Err(Error::arg("f needs at least one period entry"));
    }
    if mu.is_empty() {
        return Err(Error::arg("N must be at least 1"));
    }
    if f.iter().any(|z| z.norm() > 1.0 + 1e-12) {
        return Err(Error::arg("f must satisfy |f| <= 1"));
    }
    let q = f.len() as u64;
    let n = mu.len() as u64;
    let conj: Vec<Complex64> = f.iter().map(|z| z.conj()).collect();
    let direct: Complex64 = sum_range(1, n + 1, |m| conj[(m % q) as usize] * mu[m as usize - 1] as f64);
    let mut split = Complex64::new(0.0, 0.0);
    for d in (1..=q).filter(|&d| q.is_multiple_of(d)) {
        let mu_d = mobius_of(d);
        if mu_d == 0 || d > n {
            continue;
        }
        let inner: Complex64 = sum_range(1, n / d + 1, |m| {
            if m.gcd(&q) == 1 {
                conj[(d * m % q) as usize] * mu[m as usize - 1] as f64
            } else {
                Complex64::new(0.0, 0.0)
            }
        });
        split += inner * mu_d as f64;
    }
    Ok(PeriodicCorrelation {
        direct: direct / n as f64,
        split: split / n as f64,
    })
}

/// `E_{n ∈ [N]} μ(n) f̄(n mod q)`, checked against the `d = (n, q)` split.
pub fn mobius_periodic_correlation_with(f: &[Complex64], mu: &[i8]) -> Result<Complex64> {
    let p = mobius_periodic_correlation_paths(f, mu)?;
    let gap = (p.direct - p.split).norm();
    if gap > PERIODIC_TOLERANCE {
        return Err(Error::consistency(
            "periodic correlation split by d = (n, q)",
            format!("direct {} vs split {} differ by {gap:e}", p.direct, p.split),
        ));
    }
    Ok(p.direct)
}

pub fn mobius_periodic_correlation(f: &[Complex64], n: u64) -> Result<Complex64> {
    if n == 0 {
        return Err(Error::arg("N must be at least 1"));
    }
    let table = sieve_range(1, n + 1)?;
    mobius_periodic_correlation_with(f, table.mu_slice())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn small_groups() {
        let g4 = unit_group(4).unwrap();
        assert_eq!(g4.generators(), &[Generator { residue: 3, order: 2 }]);
        assert_eq!(g4.phi(), 2);
        let g8 = unit_group(8).unwrap();
        assert_eq!(
            g8.generators(),
            &[Generator { residue: 7, order: 2 }, Generator { residue: 5, order: 2 }]
        );
        let g1 = unit_group(1).unwrap();
        assert_eq!(g1.phi(), 1);
        assert_eq!(g1.chi(&g1.principal(), 7), c(1.0));
        assert!(matches!(unit_group(0), Err(Error::Argument(_))));
    }

    #[test]
    fn dlog_reexponentiates() {
        for q in [15u64, 16, 27, 50, 98, 360] {
            let g = unit_group(q).unwrap();
            assert_eq!(g.phi(), crate::arith::euler_phi(q));
            for n in g.units() {
                let e = g.dlog(n).unwrap();
                let back = g
                    .generators()
                    .iter()
                    .zip(&e)
                    .fold(1 % q, |acc, (gen, &ei)| mul_mod(acc, pow_mod(gen.residue, ei, q), q));
                assert_eq!(back, n, "q = {q}");
            }
            for (i, gen) in g.generators().iter().enumerate() {
                let mut unit = vec![0; g.generators().len()];
                unit[i] = 1 % gen.order;
                assert_eq!(g.dlog(gen.residue).unwrap(), unit);
            }
        }
    }

    #[test]
    fn orthogonality_small() {
        for q in 1..=40 {
            assert!(orthogonality_defect(&unit_group(q).unwrap()) < 1e-12, "q = {q}");
        }
    }

    #[test]
    fn expansion_of_characters() {
        let g = unit_group(15).unwrap();
        for (i, chi) in g.characters().iter().enumerate() {
            let e = fourier_expand(&g, &g.values(chi)).unwrap();
            assert!(!e.nonunit_ignored);
            for (j, coef) in e.coefficients.iter().enumerate() {
                let want = if i == j { 1.0 } else { 0.0 };
                assert!((coef - want).norm() < 1e-12);
            }
        }
        let mut f = vec![c(0.0); 15];
        f[5] = c(1.0);
        assert!(fourier_expand(&g, &f).unwrap().nonunit_ignored);
    }

    #[test]
    fn character_correlation_examples() {
        let g1 = unit_group(1).unwrap();
        let z = mobius_character_correlation(&g1, &g1.principal(), 10).unwrap();
        assert!((z - c(-0.1)).norm() < 1e-15);
        let g4 = unit_group(4).unwrap();
        for chi in g4.characters() {
            assert_eq!(mobius_character_correlation(&g4, &chi, 1).unwrap(), c(1.0));
        }
    }

    #[test]
    fn periodic_examples() {
        let z = mobius_periodic_correlation(&[c(1.0)], 100).unwrap();
        assert!((z - c(1.0 / 100.0)).norm() < 1e-15);
        let z = mobius_periodic_correlation(&[c(1.0), c(0.0)], 10).unwrap();
        assert!((z - c(0.1)).norm() < 1e-15);
    }
}
