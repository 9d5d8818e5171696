//! Segmented sieving of μ, λ, Λ′ and primality.
//!
//! Each segment keeps, per entry, the product of the small prime factors found
//! so far (with multiplicity), the running Ω(n) and the running μ(n). After all
//! primes `p ≤ √(hi-1)` have been applied, an entry whose product falls short
//! of `n` has exactly one remaining prime factor above `√(hi-1)`.

use std::io::{Read, Write};
use std::path::Path;

use bitvec::prelude::*;
use num_integer::Roots;
use rayon::prelude::*;

use crate::error::{Error, Result};

/// Entries per sieve segment.
pub const SEGMENT_LEN: u64 = 1 << 20;
/// Largest table that [`sieve_range`] will build in one piece.
pub const MAX_TABLE_LEN: u64 = 1 << 28;
/// Largest base prime bound (`√hi`) the sieve will generate.
pub const MAX_BASE_PRIME: u64 = 1 << 28;

const CACHE_MAGIC: &[u8; 4] = b"NCAR";
const CACHE_VERSION: u32 = 1;

/// Sieved arithmetic functions on `[lo, hi)`. Immutable once built.
#[derive(Clone, Debug, PartialEq)]
pub struct ArithTable {
    lo: u64,
    hi: u64,
    mu: Vec<i8>,
    lambda: Vec<i8>,
    lambda_prime: Vec<f64>,
    is_prime: BitVec,
}

impl ArithTable {
    pub fn lo(&self) -> u64 {
        self.lo
    }

    pub fn hi(&self) -> u64 {
        self.hi
    }

    pub fn len(&self) -> usize {
        self.mu.len()
    }

    pub fn is_empty(&self) -> bool {
        self.mu.is_empty()
    }

    pub fn contains(&self, n: u64) -> bool {
        self.lo <= n && n < self.hi
    }

    /// Checks that `[a, b]` lies inside the table.
    pub fn require(&self, a: u64, b: u64) -> Result<()> {
        if a < self.lo || b >= self.hi {
            return Err(Error::resource(format!(
                "need arithmetic data on [{a}, {b}] but the table covers [{}, {})",
                self.lo, self.hi
            )));
        }
        Ok(())
    }

    #[inline]
    fn idx(&self, n: u64) -> usize {
        debug_assert!(self.contains(n), "{n} outside [{}, {})", self.lo, self.hi);
        (n - self.lo) as usize
    }

    #[inline]
    pub fn mu(&self, n: u64) -> i8 {
        self.mu[self.idx(n)]
    }

    #[inline]
    pub fn lambda(&self, n: u64) -> i8 {
        self.lambda[self.idx(n)]
    }

    #[inline]
    pub fn lambda_prime(&self, n: u64) -> f64 {
        self.lambda_prime[self.idx(n)]
    }

    #[inline]
    pub fn is_prime(&self, n: u64) -> bool {
        self.is_prime[self.idx(n)]
    }

    /// μ on `[lo, hi)`; entry `i` is μ(lo + i).
    pub fn mu_slice(&self) -> &[i8] {
        &self.mu
    }

    pub fn lambda_slice(&self) -> &[i8] {
        &self.lambda
    }

    pub fn lambda_prime_slice(&self) -> &[f64] {
        &self.lambda_prime
    }

    pub fn primes(&self) -> impl Iterator<Item = u64> + '_ {
        self.is_prime.iter_ones().map(move |i| self.lo + i as u64)
    }

    /// The first `count` primes of the table, or a resource error.
    pub fn first_primes(&self, count: usize) -> Result<Vec<u64>> {
        let ps: Vec<u64> = self.primes().take(count).collect();
        if ps.len() < count {
            return Err(Error::resource(format!(
                "only {} primes sieved in [{}, {}), {count} requested",
                ps.len(),
                self.lo,
                self.hi
            )));
        }
        Ok(ps)
    }

    /// Writes the binary cache form: `"NCAR"`, version `u32`, `lo u64`,
    /// `hi u64` (all little-endian), then the raw μ and λ bytes.
    pub fn write_cache<W: Write>(&self, mut w: W) -> Result<()> {
        w.write_all(CACHE_MAGIC)?;
        w.write_all(&CACHE_VERSION.to_le_bytes())?;
        w.write_all(&self.lo.to_le_bytes())?;
        w.write_all(&self.hi.to_le_bytes())?;
        w.write_all(&as_bytes(&self.mu))?;
        w.write_all(&as_bytes(&self.lambda))?;
        w.flush()?;
        Ok(())
    }

    /// Reads a cache written by [`ArithTable::write_cache`]. Primality and Λ′
    /// are not stored and are recomputed.
    pub fn read_cache<R: Read>(mut r: R) -> Result<ArithTable> {
        let mut header = [0u8; 24];
        r.read_exact(&mut header)?;
        if &header[0..4] != CACHE_MAGIC {
            return Err(Error::Format("bad cache magic".into()));
        }
        let version = u32::from_le_bytes(header[4..8].try_into().unwrap());
        if version != CACHE_VERSION {
            return Err(Error::Format(format!("unsupported cache version {version}")));
        }
        let lo = u64::from_le_bytes(header[8..16].try_into().unwrap());
        let hi = u64::from_le_bytes(header[16..24].try_into().unwrap());
        check_range(lo, hi)?;
        let len = (hi - lo) as usize;
        let mut mu = vec![0u8; len];
        let mut lambda = vec![0u8; len];
        r.read_exact(&mut mu)?;
        r.read_exact(&mut lambda)?;
        let mu: Vec<i8> = mu.into_iter().map(|b| b as i8).collect();
        let lambda: Vec<i8> = lambda.into_iter().map(|b| b as i8).collect();
        if mu.iter().any(|&m| !(-1..=1).contains(&m)) || lambda.iter().any(|&l| l != 1 && l != -1) {
            return Err(Error::Format("cache holds values outside μ/λ ranges".into()));
        }
        let is_prime = prime_bits(lo, hi)?;
        let lambda_prime = lambda_prime_from_bits(lo, &is_prime);
        Ok(ArithTable {
            lo,
            hi,
            mu,
            lambda,
            lambda_prime,
            is_prime,
        })
    }
}

fn as_bytes(xs: &[i8]) -> Vec<u8> {
    xs.iter().map(|&x| x as u8).collect()
}

fn check_range(lo: u64, hi: u64) -> Result<()> {
    if lo == 0 {
        return Err(Error::arg("range must start at 1 or later"));
    }
    if lo >= hi {
        return Err(Error::arg(format!("empty range [{lo}, {hi})")));
    }
    if hi > 1 << 63 {
        return Err(Error::arg(format!("hi = {hi} exceeds 2^63")));
    }
    if hi - lo > MAX_TABLE_LEN {
        return Err(Error::resource(format!(
            "range of {} entries exceeds the table limit {MAX_TABLE_LEN}",
            hi - lo
        )));
    }
    if (hi - 1).sqrt() > MAX_BASE_PRIME {
        return Err(Error::resource(format!(
            "hi = {hi} needs base primes beyond {MAX_BASE_PRIME}"
        )));
    }
    Ok(())
}

/// Primes `p ≤ n` by the sieve of Eratosthenes.
pub fn primes_up_to(n: u64) -> Vec<u64> {
    if n < 2 {
        return Vec::new();
    }
    let mut composite = bitvec![0; n as usize + 1];
    let mut p = 2u64;
    while p * p <= n {
        if !composite[p as usize] {
            let mut m = p * p;
            while m <= n {
                composite.set(m as usize, true);
                m += p;
            }
        }
        p += 1;
    }
    (2..=n).filter(|&k| !composite[k as usize]).collect()
}

struct Segment {
    mu: Vec<i8>,
    lambda: Vec<i8>,
    is_prime: BitVec,
}

fn sieve_segment(lo: u64, hi: u64, primes: &[u64]) -> Segment {
    let len = (hi - lo) as usize;
    let mut prod = vec![1u64; len];
    let mut omega = vec![0u8; len];
    let mut mu = vec![1i8; len];
    for &p in primes {
        let first = lo.div_ceil(p) * p;
        let mut m = first;
        while m < hi {
            let i = (m - lo) as usize;
            mu[i] = -mu[i];
            prod[i] *= p;
            omega[i] += 1;
            m += p;
        }
        let mut pk = p * p;
        while pk < hi {
            let mut m = lo.div_ceil(pk) * pk;
            while m < hi {
                let i = (m - lo) as usize;
                mu[i] = 0;
                prod[i] *= p;
                omega[i] += 1;
                m += pk;
            }
            pk = match pk.checked_mul(p) {
                Some(v) => v,
                None => break,
            };
        }
    }
    let mut lambda = vec![1i8; len];
    let mut is_prime = bitvec![0; len];
    for i in 0..len {
        let n = lo + i as u64;
        if prod[i] != n {
            mu[i] = -mu[i];
            omega[i] += 1;
        }
        if omega[i] % 2 == 1 {
            lambda[i] = -1;
        }
        if omega[i] == 1 {
            is_prime.set(i, true);
        }
    }
    Segment { mu, lambda, is_prime }
}

fn segment_bounds(lo: u64, hi: u64) -> Vec<(u64, u64)> {
    let mut out = Vec::new();
    let mut s = lo;
    while s < hi {
        let e = (s + SEGMENT_LEN).min(hi);
        out.push((s, e));
        s = e;
    }
    out
}

fn lambda_prime_from_bits(lo: u64, is_prime: &BitSlice) -> Vec<f64> {
    let mut lp = vec![0.0; is_prime.len()];
    for i in is_prime.iter_ones() {
        lp[i] = ((lo + i as u64) as f64).ln();
    }
    lp
}

/// Primality bitset for `[lo, hi)`.
fn prime_bits(lo: u64, hi: u64) -> Result<BitVec> {
    check_range(lo, hi)?;
    let base = primes_up_to((hi - 1).sqrt());
    let len = (hi - lo) as usize;
    let mut bits = bitvec![1; len];
    for n in lo..hi.min(2) {
        bits.set((n - lo) as usize, false);
    }
    for &p in &base {
        let mut m = (lo.div_ceil(p) * p).max(p * p);
        while m < hi {
            bits.set((m - lo) as usize, false);
            m += p;
        }
    }
    Ok(bits)
}

/// Sieves μ, λ, Λ′ and primality on `[lo, hi)`.
pub fn sieve_range(lo: u64, hi: u64) -> Result<ArithTable> {
    check_range(lo, hi)?;
    let primes = primes_up_to((hi - 1).sqrt());
    let segments: Vec<Segment> = segment_bounds(lo, hi)
        .into_par_iter()
        .map(|(s, e)| sieve_segment(s, e, &primes))
        .collect();
    let len = (hi - lo) as usize;
    let mut mu = Vec::with_capacity(len);
    let mut lambda = Vec::with_capacity(len);
    let mut is_prime = BitVec::with_capacity(len);
    for seg in segments {
        mu.extend_from_slice(&seg.mu);
        lambda.extend_from_slice(&seg.lambda);
        is_prime.extend_from_bitslice(&seg.is_prime);
    }
    let lambda_prime = lambda_prime_from_bits(lo, &is_prime);
    Ok(ArithTable {
        lo,
        hi,
        mu,
        lambda,
        lambda_prime,
        is_prime,
    })
}

/// Like [`sieve_range`], but reads/writes `dir/ncar-{lo}-{hi}.bin` when a
/// cache directory is given.
pub fn sieve_range_cached(lo: u64, hi: u64, dir: Option<&Path>) -> Result<ArithTable> {
    let Some(dir) = dir else {
        return sieve_range(lo, hi);
    };
    let path = dir.join(format!("ncar-{lo}-{hi}.bin"));
    if path.exists() {
        let f = std::fs::File::open(&path)?;
        return ArithTable::read_cache(std::io::BufReader::new(f));
    }
    let table = sieve_range(lo, hi)?;
    std::fs::create_dir_all(dir)?;
    let f = std::fs::File::create(&path)?;
    table.write_cache(std::io::BufWriter::new(f))?;
    Ok(table)
}

/// The Mertens function `M(N) = Σ_{n ≤ N} μ(n)`, streamed segment by segment.
pub fn mertens(n: u64) -> Result<i64> {
    if n == 0 {
        return Err(Error::arg("mertens needs N ≥ 1"));
    }
    let hi = n + 1;
    if n >= 1 << 63 || n.sqrt() > MAX_BASE_PRIME {
        return Err(Error::resource(format!("N = {n} needs base primes beyond {MAX_BASE_PRIME}")));
    }
    let primes = primes_up_to(n.sqrt());
    let parts: Vec<i64> = segment_bounds(1, hi)
        .into_par_iter()
        .map(|(s, e)| sieve_segment(s, e, &primes).mu.iter().map(|&m| m as i64).sum())
        .collect();
    Ok(parts.iter().sum())
}

/// λ(1..=N) computed only from μ through `λ(n) = Σ_{r² | n} μ(n / r²)`.
///
/// `mu[i]` must hold μ(i + 1).
pub fn liouville_from_mobius(mu: &[i8]) -> Vec<i8> {
    let n = mu.len();
    let mut lambda = vec![0i8; n];
    let mut r = 1usize;
    while r * r <= n {
        let sq = r * r;
        for m in 1..=n / sq {
            lambda[m * sq - 1] += mu[m - 1];
        }
        r += 1;
    }
    lambda
}

/// Sieves μ on `[1, N]` and applies [`liouville_from_mobius`].
pub fn liouville_from_mobius_upto(n: u64) -> Result<Vec<i8>> {
    let table = sieve_range(1, n + 1)?;
    Ok(liouville_from_mobius(table.mu_slice()))
}

/// Prime factorisation by trial division, for small moduli.
pub fn factorize(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut p = 2u64;
    while p * p <= n {
        if n.is_multiple_of(p) {
            let mut e = 0;
            while n.is_multiple_of(p) {
                n /= p;
                e += 1;
            }
            out.push((p, e));
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

pub fn euler_phi(n: u64) -> u64 {
    factorize(n)
        .into_iter()
        .fold(n, |acc, (p, _)| acc / p * (p - 1))
}

/// μ(n) by trial division.
pub fn mobius_of(n: u64) -> i8 {
    let f = factorize(n);
    if f.iter().any(|&(_, e)| e > 1) {
        0
    } else if f.len().is_multiple_of(2) {
        1
    } else {
        -1
    }
}
