//! The Heisenberg group of upper unitriangular 3×3 matrices, its quotient by
//! the integer lattice Γ, polynomial orbits `n ↦ g(n)Γ`, and bracket
//! polynomials read off from the orbit coordinates.

use std::fmt::Debug;
use std::io::Write;
use std::ops::{Add, Mul, Neg, Sub};

use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::circle::{circle_norm_dd, unit_interval};
use crate::dd::Dd;
use crate::error::{Error, Result};

/// Coordinate ring for [`HeisenbergPoint`]: `f64`, [`Dd`], or exact
/// [`BigRational`].
pub trait Scalar:
    Clone + PartialEq + Debug + Add<Output = Self> + Sub<Output = Self> + Mul<Output = Self> + Neg<Output = Self>
{
    fn zero() -> Self;
    fn floor(&self) -> Self;
    fn to_dd(&self) -> Dd;
}

impl Scalar for f64 {
    fn zero() -> Self {
        0.0
    }
    fn floor(&self) -> Self {
        f64::floor(*self)
    }
    fn to_dd(&self) -> Dd {
        Dd::from_f64(*self)
    }
}

impl Scalar for Dd {
    fn zero() -> Self {
        Dd::ZERO
    }
    fn floor(&self) -> Self {
        Dd::floor(*self)
    }
    fn to_dd(&self) -> Dd {
        *self
    }
}

impl Scalar for BigRational {
    fn zero() -> Self {
        Zero::zero()
    }
    fn floor(&self) -> Self {
        BigRational::floor(self)
    }
    fn to_dd(&self) -> Dd {
        crate::polyseq::rational_to_dd(self)
    }
}

/// The matrix `[[1, x, z], [0, 1, y], [0, 0, 1]]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HeisenbergPoint<T = f64> {
    pub x: T,
    pub y: T,
    pub z: T,
}

pub type ExactPoint = HeisenbergPoint<BigRational>;

impl<T: Scalar> HeisenbergPoint<T> {
    pub fn new(x: T, y: T, z: T) -> Self {
        HeisenbergPoint { x, y, z }
    }

    pub fn identity() -> Self {
        HeisenbergPoint::new(T::zero(), T::zero(), T::zero())
    }

    pub fn inverse(&self) -> Self {
        HeisenbergPoint::new(
            -self.x.clone(),
            -self.y.clone(),
            self.x.clone() * self.y.clone() - self.z.clone(),
        )
    }

    /// Mal'cev coordinates `(x, y, z - xy)`.
    pub fn malcev(&self) -> [T; 3] {
        [
            self.x.clone(),
            self.y.clone(),
            self.z.clone() - self.x.clone() * self.y.clone(),
        ]
    }
}

impl<T: Scalar> Mul for &HeisenbergPoint<T> {
    type Output = HeisenbergPoint<T>;

    fn mul(self, rhs: &HeisenbergPoint<T>) -> HeisenbergPoint<T> {
        HeisenbergPoint::new(
            self.x.clone() + rhs.x.clone(),
            self.y.clone() + rhs.y.clone(),
            self.z.clone() + rhs.z.clone() + self.x.clone() * rhs.y.clone(),
        )
    }
}

impl<T: Scalar> Mul for HeisenbergPoint<T> {
    type Output = HeisenbergPoint<T>;

    fn mul(self, rhs: HeisenbergPoint<T>) -> HeisenbergPoint<T> {
        &self * &rhs
    }
}

/// Coordinates `(τ₁, τ₂, τ₃) ∈ [0, 1)³` of the fundamental-domain
/// representative of `gΓ`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReducedPoint {
    pub coords: [f64; 3],
}

impl ReducedPoint {
    pub fn tau1(&self) -> f64 {
        self.coords[0]
    }
    pub fn tau2(&self) -> f64 {
        self.coords[1]
    }
    pub fn tau3(&self) -> f64 {
        self.coords[2]
    }

    /// The matrix with Mal'cev coordinates `coords`.
    pub fn embed(&self) -> HeisenbergPoint<Dd> {
        let [a, b, c] = self.coords.map(Dd::from_f64);
        HeisenbergPoint::new(a, b, c + a * b)
    }
}

/// `({x}, {y}, {z - xy + ⌊x⌋y})` in double-double.
pub fn reduce_dd<T: Scalar>(g: &HeisenbergPoint<T>) -> [Dd; 3] {
    let fx = g.x.clone() - g.x.floor();
    let fy = g.y.clone() - g.y.floor();
    let w = g.z.clone() - g.x.clone() * g.y.clone() + g.x.floor() * g.y.clone();
    [fx.to_dd().frac(), fy.to_dd().frac(), w.to_dd().frac()]
}

/// Fundamental-domain representative of `gΓ`; right multiplication of `g`
/// by any lattice element leaves the result unchanged.
pub fn reduce<T: Scalar>(g: &HeisenbergPoint<T>) -> ReducedPoint {
    ReducedPoint {
        coords: reduce_dd(g).map(|c| unit_interval(c.to_f64())),
    }
}

/// `g(n) = (nα, nβ, n²αβ)`.
pub fn orbit_point(alpha: Dd, beta: Dd, n: i64) -> HeisenbergPoint<Dd> {
    let nn = Dd::from_i64(n);
    HeisenbergPoint::new(nn * alpha, nn * beta, nn * nn * (alpha * beta))
}

/// The increment with `g(n + 1) = g(n) · step(n)`.
pub fn orbit_step(alpha: Dd, beta: Dd, n: i64) -> HeisenbergPoint<Dd> {
    HeisenbergPoint::new(alpha, beta, Dd::from_i64(n + 1) * (alpha * beta))
}

/// `{nβ ⌊nα⌋}` evaluated directly.
pub fn bracket_value(alpha: Dd, beta: Dd, n: i64) -> f64 {
    let nn = Dd::from_i64(n);
    ((nn * alpha).floor() * (nn * beta)).frac_f64()
}

/// The two curves making up the closure of the `α = β` orbit when `α²` is an
/// integer.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Segment {
    /// Matrix entries `(x, x, x²/2)`: `τ₃ = {-τ₁²/2}`.
    Half,
    /// Matrix entries `(x, x, (1 + x²)/2)`: `τ₃ = {(1 - τ₁²)/2}`.
    ShiftedHalf,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Case2Point {
    pub point: ReducedPoint,
    pub segment: Segment,
    /// Circle distance from `τ₃` to the chosen segment.
    pub distance: f64,
}

pub const SEGMENT_TOLERANCE: f64 = 1e-9;

/// Reduces `g(n) = (nα, nα, n²α²)` and locates it on one of the two segments.
pub fn case2_suborbit(alpha: Dd, n: i64) -> Result<Case2Point> {
    let [u, _, t3] = reduce_dd(&orbit_point(alpha, alpha, n));
    let half_sq = u * u * Dd::from_f64(0.5);
    let d_half = circle_norm_dd(t3 + half_sq);
    let d_shift = circle_norm_dd(t3 - Dd::from_f64(0.5) + half_sq);
    let (segment, distance) = if d_half <= d_shift {
        (Segment::Half, d_half)
    } else {
        (Segment::ShiftedHalf, d_shift)
    };
    if distance > SEGMENT_TOLERANCE {
        return Err(Error::consistency(
            "case-2 two-segment containment",
            format!("n = {n}: τ₃ is {distance:e} from both segments"),
        ));
    }
    Ok(Case2Point {
        point: ReducedPoint {
            coords: [u, u, t3].map(|c| unit_interval(c.to_f64())),
        },
        segment,
        distance,
    })
}

/// CSV with columns `n,tau1,tau2,tau3` for `n = 0..=n_max`.
pub fn write_orbit_csv<W: Write>(out: &mut W, alpha: Dd, beta: Dd, n_max: i64) -> Result<()> {
    writeln!(out, "n,tau1,tau2,tau3")?;
    for n in 0..=n_max {
        let [a, b, c] = reduce(&orbit_point(alpha, beta, n)).coords;
        writeln!(out, "{n},{a:?},{b:?},{c:?}")?;
    }
    Ok(())
}

/// `true` when every coordinate of `g` is an integer.
pub fn in_lattice(g: &ExactPoint) -> bool {
    g.x.is_integer() && g.y.is_integer() && g.z.is_integer()
}

/// Float view of an exact point.
pub fn exact_to_f64(g: &ExactPoint) -> HeisenbergPoint<f64> {
    let f = |r: &BigRational| r.to_f64().unwrap_or(f64::NAN);
    HeisenbergPoint::new(f(&g.x), f(&g.y), f(&g.z))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polyseq::rational;

    fn sqrt(v: f64) -> Dd {
        Dd::from_f64(v).sqrt()
    }

    #[test]
    fn reduce_examples() {
        assert_eq!(reduce(&HeisenbergPoint::<f64>::identity()).coords, [0.0; 3]);
        assert_eq!(reduce(&HeisenbergPoint::new(1.5, 0.5, 0.25)).coords, [0.5, 0.5, 0.0]);
    }

    #[test]
    fn reduce_is_coset_invariant() {
        let g = HeisenbergPoint::new(Dd::from_f64(3.7), Dd::from_f64(-1.2), Dd::from_f64(0.45));
        let gamma = HeisenbergPoint::new(Dd::from_f64(2.0), Dd::from_f64(-3.0), Dd::from_f64(5.0));
        let a = reduce(&g).coords;
        let b = reduce(&(&g * &gamma)).coords;
        for i in 0..3 {
            assert!((a[i] - b[i]).abs() < 1e-14, "{a:?} vs {b:?}");
        }
    }

    #[test]
    fn exact_inverse() {
        let g = ExactPoint::new(rational(3, 7), rational(-5, 2), rational(11, 13));
        assert_eq!(&g * &g.inverse(), ExactPoint::identity());
        assert_eq!(&g.inverse() * &g, ExactPoint::identity());
        assert!(in_lattice(&ExactPoint::identity()));
    }

    #[test]
    fn orbit_examples() {
        let g = orbit_point(sqrt(2.0), sqrt(3.0), 1);
        assert!((g.x.to_f64() - std::f64::consts::SQRT_2).abs() < 1e-15);
        assert!((g.y.to_f64() - 1.7320508075688772).abs() < 1e-15);
        assert!((g.z.to_f64() - 2.449489742783178).abs() < 1e-15);
        assert_eq!(orbit_point(sqrt(2.0), sqrt(3.0), 0), HeisenbergPoint::identity());
    }

    #[test]
    fn orbit_recurrence() {
        let (a, b) = (sqrt(2.0), sqrt(3.0));
        for n in 0..1000 {
            let lhs = orbit_point(a, b, n + 1);
            let rhs = &orbit_point(a, b, n) * &orbit_step(a, b, n);
            assert!((lhs.z - rhs.z).abs().to_f64() < 1e-10);
            assert!((lhs.x - rhs.x).abs().to_f64() < 1e-12);
        }
    }

    #[test]
    fn bracket_examples() {
        let (a, b) = (sqrt(2.0), sqrt(3.0));
        assert_eq!(bracket_value(a, b, 0), 0.0);
        assert!((bracket_value(a, b, 1) - 0.7320508075688772).abs() < 1e-15);
        for n in 1..2000 {
            let t3 = reduce(&orbit_point(a, b, n)).tau3();
            let d = (bracket_value(a, b, n) - t3).abs();
            assert!(d.min(1.0 - d) < 1e-9, "n = {n}");
        }
    }

    #[test]
    fn case2_sqrt2_on_segments() {
        let a = sqrt(2.0);
        assert_eq!(case2_suborbit(a, 0).unwrap().segment, Segment::Half);
        let p = case2_suborbit(a, 1).unwrap();
        // ({√2}, {√2}, {2 - 2 + √2}) = (√2 - 1, √2 - 1, √2 - 1).
        assert!((p.point.tau3() - 0.41421356237309515).abs() < 1e-15);
        assert_eq!(p.segment, Segment::ShiftedHalf);
        for n in 0..2000 {
            case2_suborbit(a, n).unwrap();
        }
    }

    #[test]
    fn case2_cbrt2_leaves_segments() {
        let a = Dd::from_f64(2.0).cbrt();
        let off = (1..200).filter(|&n| case2_suborbit(a, n).is_err()).count();
        assert!(off > 100);
    }

    #[test]
    fn embed_round_trip() {
        let p = reduce(&orbit_point(sqrt(5.0), sqrt(7.0), 123));
        assert_eq!(reduce(&p.embed()), p);
    }
}
