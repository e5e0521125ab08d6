//! Exact arithmetic in `ℚ(√d)` and the cyclic order on the projective line.
//!
//! Every boundary coordinate handled by the circle model is either rational
//! or a fixed point of an integer Möbius map, so degree two is enough.
//! Values are kept in a canonical form, which makes `==` structural.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::Error;

pub type Rational = BigRational;

/// Trial division bound used when extracting square factors from a radicand.
const SQUAREFREE_TRIAL_LIMIT: u64 = 100_000;

/// `a + b·√d` with `d` square-free (up to the trial-division bound), and
/// `b = 0 ⇔ d = 1`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct QuadraticNumber {
    a: Rational,
    b: Rational,
    d: BigInt,
}

fn rat(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Sign of `p + q·√m` for rationals `p, q` and a non-negative integer `m`.
/// `m` need not be square-free.
fn sign_of_surd(p: &Rational, q: &Rational, m: &BigInt) -> Ordering {
    let sp = p.cmp(&Rational::zero());
    let sq = if m.is_zero() { Ordering::Equal } else { q.cmp(&Rational::zero()) };
    if sq == Ordering::Equal {
        return sp;
    }
    if sp == Ordering::Equal || sp == sq {
        return sq;
    }
    let lhs = p * p;
    let rhs = q * q * Rational::from_integer(m.clone());
    match lhs.cmp(&rhs) {
        Ordering::Greater => sp,
        Ordering::Less => sq,
        Ordering::Equal => Ordering::Equal,
    }
}

/// Splits `n > 0` into `(s, f)` with `n = s²·f`, removing square factors of
/// primes below the trial bound and any perfect-square cofactor.
fn split_square(n: &BigInt) -> (BigInt, BigInt) {
    let mut f = n.clone();
    let mut s = BigInt::one();
    let mut p: u64 = 2;
    while p <= SQUAREFREE_TRIAL_LIMIT {
        let pb = BigInt::from(p);
        let p2 = &pb * &pb;
        if p2 > f {
            break;
        }
        while (&f % &p2).is_zero() {
            f /= &p2;
            s *= &pb;
        }
        p += if p == 2 { 1 } else { 2 };
    }
    let r = f.sqrt();
    if &r * &r == f {
        s *= r;
        f = BigInt::one();
    }
    (s, f)
}

impl QuadraticNumber {
    pub fn new(a: Rational, b: Rational, d: BigInt) -> Result<Self, Error> {
        if d.is_negative() {
            return Err(Error::Parse(format!("negative radicand {d}")));
        }
        if b.is_zero() || d.is_zero() {
            return Ok(Self::rational(a));
        }
        let (s, f) = split_square(&d);
        let b = b * Rational::from_integer(s);
        if f.is_one() {
            return Ok(Self::rational(a + b));
        }
        Ok(Self { a, b, d: f })
    }

    pub fn rational(a: Rational) -> Self {
        Self { a, b: Rational::zero(), d: BigInt::one() }
    }

    pub fn integer(n: i64) -> Self {
        Self::rational(rat(n))
    }

    pub fn zero() -> Self {
        Self::integer(0)
    }

    pub fn rational_part(&self) -> &Rational {
        &self.a
    }

    pub fn irrational_part(&self) -> &Rational {
        &self.b
    }

    pub fn radicand(&self) -> &BigInt {
        &self.d
    }

    pub fn is_rational(&self) -> bool {
        self.b.is_zero()
    }

    pub fn as_rational(&self) -> Option<&Rational> {
        self.is_rational().then_some(&self.a)
    }

    pub fn is_zero(&self) -> bool {
        self.is_rational() && self.a.is_zero()
    }

    fn common_radicand(&self, other: &Self) -> Option<BigInt> {
        if self.is_rational() {
            Some(other.d.clone())
        } else if other.is_rational() || self.d == other.d {
            Some(self.d.clone())
        } else {
            None
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self, Error> {
        let d = self.common_radicand(other).ok_or(Error::CrossFieldArithmetic)?;
        Self::new(&self.a + &other.a, &self.b + &other.b, d)
    }

    pub fn sub(&self, other: &Self) -> Result<Self, Error> {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        Self { a: -&self.a, b: -&self.b, d: self.d.clone() }
    }

    pub fn mul(&self, other: &Self) -> Result<Self, Error> {
        let d = self.common_radicand(other).ok_or(Error::CrossFieldArithmetic)?;
        let dr = Rational::from_integer(d.clone());
        let a = &self.a * &other.a + &self.b * &other.b * dr;
        let b = &self.a * &other.b + &self.b * &other.a;
        Self::new(a, b, d)
    }

    pub fn inv(&self) -> Result<Self, Error> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let norm = &self.a * &self.a - &self.b * &self.b * Rational::from_integer(self.d.clone());
        Self::new(&self.a / &norm, -&self.b / &norm, self.d.clone())
    }

    pub fn div(&self, other: &Self) -> Result<Self, Error> {
        self.mul(&other.inv()?)
    }

    pub fn scale(&self, q: &Rational) -> Self {
        Self::new(&self.a * q, &self.b * q, self.d.clone()).expect("scaling keeps the radicand")
    }

    pub fn add_rational(&self, q: &Rational) -> Self {
        Self { a: &self.a + q, b: self.b.clone(), d: self.d.clone() }
    }

    pub fn signum(&self) -> Ordering {
        sign_of_surd(&self.a, &self.b, &self.d)
    }

    /// Exact comparison; both operands must share a field unless one is rational.
    pub fn compare(&self, other: &Self) -> Result<Ordering, Error> {
        if self.common_radicand(other).is_none() {
            return Err(Error::CrossFieldComparison);
        }
        Ok(self.total_cmp(other))
    }

    /// Exact comparison that also handles two different quadratic fields.
    pub fn total_cmp(&self, other: &Self) -> Ordering {
        if self.common_radicand(other).is_some() {
            return self.sub(other).expect("same field").signum();
        }
        // sign(A + B√d + C√f), d ≠ f
        let a = &self.a - &other.a;
        let (b, d) = (&self.b, &self.d);
        let c = -&other.b;
        let f = &other.d;
        let irr = {
            let sb = b.cmp(&Rational::zero());
            let sc = c.cmp(&Rational::zero());
            if sb == sc {
                sb
            } else {
                let lhs = b * b * Rational::from_integer(d.clone());
                let rhs = &c * &c * Rational::from_integer(f.clone());
                match lhs.cmp(&rhs) {
                    Ordering::Greater => sb,
                    Ordering::Less => sc,
                    Ordering::Equal => Ordering::Equal,
                }
            }
        };
        let sa = a.cmp(&Rational::zero());
        if irr == Ordering::Equal || sa == Ordering::Equal || irr == sa {
            return if irr == Ordering::Equal && sa == Ordering::Equal {
                Ordering::Equal
            } else if sa == Ordering::Equal {
                irr
            } else {
                sa
            };
        }
        // compare A² with (B√d + C√f)² = B²d + C²f + 2BC√(df)
        let dr = Rational::from_integer(d.clone());
        let fr = Rational::from_integer(f.clone());
        let p = &a * &a - b * b * dr - &c * &c * fr;
        let q = -(rat(2) * b * &c);
        match sign_of_surd(&p, &q, &(d * f)) {
            Ordering::Greater => sa,
            Ordering::Less => irr,
            Ordering::Equal => Ordering::Equal,
        }
    }

    /// Greatest integer not exceeding the value.
    pub fn floor(&self) -> BigInt {
        if self.is_rational() {
            return self.a.floor().to_integer();
        }
        let n = self.b.numer().abs();
        let m = self.b.denom().clone();
        let root = (&n * &n * &self.d).sqrt();
        let approx = if self.b.is_positive() {
            &self.a + Rational::new(root, m)
        } else {
            &self.a - Rational::new(root, m)
        };
        let mut g = approx.floor().to_integer();
        while self.total_cmp(&Self::rational(Rational::from_integer(g.clone()))) == Ordering::Less {
            g -= 1;
        }
        while self.total_cmp(&Self::rational(Rational::from_integer(&g + 1))) != Ordering::Less {
            g += 1;
        }
        g
    }

    /// Rational `q` with `q ≤ self < q + 2^-bits`.
    pub fn lower_dyadic(&self, bits: u32) -> Rational {
        let scale = BigInt::one() << bits;
        let scaled = self.scale(&Rational::from_integer(scale.clone()));
        Rational::new(scaled.floor(), scale)
    }

    pub fn to_f64(&self) -> f64 {
        let a = self.a.to_f64().unwrap_or(f64::NAN);
        if self.is_rational() {
            return a;
        }
        a + self.b.to_f64().unwrap_or(f64::NAN) * self.d.to_f64().unwrap_or(f64::NAN).sqrt()
    }
}

impl fmt::Display for QuadraticNumber {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_rational() {
            write!(f, "{}", self.a)
        } else {
            write!(f, "({} + {}√{})", self.a, self.b, self.d)
        }
    }
}

impl fmt::Debug for QuadraticNumber {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

pub fn parse_rational(s: &str) -> Result<Rational, Error> {
    let s = s.trim();
    let bad = || Error::Parse(format!("bad rational {s:?}"));
    match s.split_once('/') {
        Some((n, d)) => {
            let n = BigInt::from_str(n.trim()).map_err(|_| bad())?;
            let d = BigInt::from_str(d.trim()).map_err(|_| bad())?;
            if d.is_zero() {
                return Err(bad());
            }
            Ok(Rational::new(n, d))
        }
        None => Ok(Rational::from_integer(BigInt::from_str(s).map_err(|_| bad())?)),
    }
}

impl FromStr for QuadraticNumber {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        let t = s.trim();
        let Some(inner) = t.strip_prefix('(').and_then(|r| r.strip_suffix(')')) else {
            return Ok(Self::rational(parse_rational(t)?));
        };
        let bad = || Error::Parse(format!("bad quadratic number {s:?}"));
        let (a, rest) = inner.split_once(" + ").ok_or_else(bad)?;
        let (b, d) = rest
            .split_once('√')
            .or_else(|| rest.split_once("sqrt"))
            .ok_or_else(bad)?;
        let d = BigInt::from_str(d.trim()).map_err(|_| bad())?;
        Self::new(parse_rational(a)?, parse_rational(b)?, d)
    }
}

/// A point of `ℝP¹`: an affine coordinate or the point at infinity.
#[derive(Clone, PartialEq, Eq, Hash)]
pub enum ProjectivePoint {
    Finite(QuadraticNumber),
    Infinity,
}

impl ProjectivePoint {
    pub fn rational(q: Rational) -> Self {
        Self::Finite(QuadraticNumber::rational(q))
    }

    pub fn integer(n: i64) -> Self {
        Self::Finite(QuadraticNumber::integer(n))
    }

    pub fn ratio(n: i64, d: i64) -> Self {
        Self::rational(Rational::new(BigInt::from(n), BigInt::from(d)))
    }

    pub fn finite(&self) -> Option<&QuadraticNumber> {
        match self {
            Self::Finite(x) => Some(x),
            Self::Infinity => None,
        }
    }

    pub fn is_rational(&self) -> bool {
        match self {
            Self::Finite(x) => x.is_rational(),
            Self::Infinity => true,
        }
    }

    pub fn is_infinity(&self) -> bool {
        matches!(self, Self::Infinity)
    }
}

impl fmt::Display for ProjectivePoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Finite(x) => write!(f, "{x}"),
            Self::Infinity => f.write_str("∞"),
        }
    }
}

impl fmt::Debug for ProjectivePoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for ProjectivePoint {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        match s.trim() {
            "∞" | "inf" | "infinity" | "oo" => Ok(Self::Infinity),
            t => Ok(Self::Finite(t.parse()?)),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Orientation {
    Ccw,
    Cw,
    Degenerate,
}

/// Position of `x` on the walk that starts just after `base` and moves in the
/// increasing direction, wrapping through ∞.
fn walk_key(base: &ProjectivePoint, x: &ProjectivePoint) -> (u8, Option<QuadraticNumber>) {
    match (base, x) {
        (_, ProjectivePoint::Infinity) => (1, None),
        (ProjectivePoint::Infinity, ProjectivePoint::Finite(v)) => (0, Some(v.clone())),
        (ProjectivePoint::Finite(b), ProjectivePoint::Finite(v)) => {
            if v.total_cmp(b) == Ordering::Greater {
                (0, Some(v.clone()))
            } else {
                (2, Some(v.clone()))
            }
        }
    }
}

/// Orders `x` and `y` by their position on the counterclockwise walk from
/// `base`; `base` itself comes first.
pub fn cyclic_cmp(base: &ProjectivePoint, x: &ProjectivePoint, y: &ProjectivePoint) -> Ordering {
    if x == y {
        return Ordering::Equal;
    }
    if x == base {
        return Ordering::Less;
    }
    if y == base {
        return Ordering::Greater;
    }
    let (gx, vx) = walk_key(base, x);
    let (gy, vy) = walk_key(base, y);
    gx.cmp(&gy).then_with(|| match (vx, vy) {
        (Some(a), Some(b)) => a.total_cmp(&b),
        _ => Ordering::Equal,
    })
}

/// Cyclic orientation of three points of `ℝP¹`.
pub fn ccw(p: &ProjectivePoint, q: &ProjectivePoint, r: &ProjectivePoint) -> Orientation {
    if p == q || q == r || p == r {
        return Orientation::Degenerate;
    }
    match cyclic_cmp(p, q, r) {
        Ordering::Less => Orientation::Ccw,
        _ => Orientation::Cw,
    }
}

pub(crate) fn is_perfect_square(n: &BigInt) -> bool {
    !n.is_negative() && {
        let r = n.sqrt();
        &r * &r == *n
    }
}

pub(crate) fn gcd_all(xs: &[&BigInt]) -> BigInt {
    xs.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x))
}
