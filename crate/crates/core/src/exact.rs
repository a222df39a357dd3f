//! Exact scalar arithmetic: rationals, real quadratic surds, spectrum values.
//!
//! Exceptional-weight coincidence is a knife-edge condition, so every value
//! that can be kept exact is kept exact: eigenvalues of the analytic link
//! families are `BigRational`, weights are elements `a + b*sqrt(d)` of a real
//! quadratic field with exact ordering. Mesh spectra are the only floating
//! point citizens and carry that flag everywhere they go.

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{FromPrimitive, One, Signed, ToPrimitive, Zero};
use serde::de::Error as DeError;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use std::cmp::Ordering;
use std::fmt;

use crate::error::{Error, Result};

/// Exact rational scalar.
pub type Rat = BigRational;

/// Shorthand for small rational constants.
pub fn rat_i64(n: i64) -> Rat {
    Rat::from_integer(BigInt::from(n))
}

/// Rational `p/q` from machine integers.
pub fn rat_frac(p: i64, q: i64) -> Rat {
    Rat::new(BigInt::from(p), BigInt::from(q))
}

/// Exact conversion of a finite `f64` to a rational (every finite float is one).
pub fn rat_from_f64(x: f64) -> Result<Rat> {
    Rat::from_f64(x).ok_or_else(|| Error::Domain(format!("non-finite value {x}")))
}

/// Parse `"p/q"` or a plain integer string.
pub fn parse_rational(s: &str) -> Result<Rat> {
    let s = s.trim();
    let parse_int = |t: &str| -> Result<BigInt> {
        t.trim()
            .parse::<BigInt>()
            .map_err(|_| Error::Structural(format!("invalid rational '{s}'")))
    };
    match s.split_once('/') {
        Some((p, q)) => {
            let den = parse_int(q)?;
            if den.is_zero() {
                return Err(Error::Structural(format!("zero denominator in '{s}'")));
            }
            Ok(Rat::new(parse_int(p)?, den))
        }
        None => Ok(Rat::from_integer(parse_int(s)?)),
    }
}

/// Render a rational as `"n"` or `"p/q"`.
pub fn rational_string(r: &Rat) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

pub fn rat_to_f64(r: &Rat) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

fn is_square(n: &BigUint) -> bool {
    let s = n.sqrt();
    &s * &s == *n
}

/// Split `n = s^2 * d` with `d` square-reduced.
///
/// Trial division runs up to 10^5; a leftover cofactor is tested for being a
/// perfect square. Radicands in this crate are `(m-2)^2 q^2 + 4 p q` for
/// small spectra, far below the bound, so `d` is genuinely squarefree here.
fn extract_square(n: &BigUint) -> (BigUint, BigUint) {
    if n.is_zero() || n.is_one() {
        return (BigUint::one(), n.clone());
    }
    let mut rem = n.clone();
    let mut s = BigUint::one();
    let mut d = BigUint::one();
    let mut p = BigUint::from(2u32);
    let bound = BigUint::from(100_000u32);
    while &p * &p <= rem && p <= bound {
        let mut count = 0u32;
        while (&rem % &p).is_zero() {
            rem /= &p;
            count += 1;
        }
        if count > 0 {
            s *= p.pow(count / 2);
            if count % 2 == 1 {
                d *= &p;
            }
        }
        p += if p == BigUint::from(2u32) {
            BigUint::one()
        } else {
            BigUint::from(2u32)
        };
    }
    if !rem.is_one() {
        if is_square(&rem) {
            s *= rem.sqrt();
        } else {
            d *= rem;
        }
    }
    (s, d)
}

/// Floor/ceil bounds on `sqrt(d)` with `bits` binary digits of precision.
fn sqrt_bounds(d: &BigUint, bits: u32) -> (Rat, Rat) {
    let scale = BigUint::one() << bits;
    let lo = (d * &scale * &scale).sqrt();
    let hi = &lo + BigUint::one();
    let den = BigInt::from(scale);
    (
        Rat::new(BigInt::from(lo), den.clone()),
        Rat::new(BigInt::from(hi), den),
    )
}

/// Element `rat + coef * sqrt(root)` of a real quadratic field.
///
/// `root` is a square-reduced nonnegative integer; `root <= 1` forces
/// `coef == 0`, so plain rationals have a unique representation. Equality
/// and ordering are decided exactly.
#[derive(Clone, Debug)]
pub struct QuadExt {
    rat: Rat,
    coef: Rat,
    root: BigUint,
}

impl QuadExt {
    pub fn from_rat(r: Rat) -> Self {
        QuadExt {
            rat: r,
            coef: Rat::zero(),
            root: BigUint::one(),
        }
    }

    /// Build `rat + coef*sqrt(root)`, normalizing the radicand.
    pub fn new(rat: Rat, coef: Rat, root: BigUint) -> Self {
        if coef.is_zero() || root.is_zero() {
            return Self::from_rat(rat);
        }
        let (s, d) = extract_square(&root);
        if d.is_one() {
            Self::from_rat(rat + coef * Rat::from_integer(BigInt::from(s)))
        } else {
            QuadExt {
                rat,
                coef: coef * Rat::from_integer(BigInt::from(s)),
                root: d,
            }
        }
    }

    pub fn is_rational(&self) -> bool {
        self.coef.is_zero()
    }

    pub fn as_rational(&self) -> Option<&Rat> {
        self.is_rational().then_some(&self.rat)
    }

    pub fn rational_part(&self) -> &Rat {
        &self.rat
    }

    pub fn to_f64(&self) -> f64 {
        if self.is_rational() {
            rat_to_f64(&self.rat)
        } else {
            rat_to_f64(&self.rat)
                + rat_to_f64(&self.coef) * self.root.to_f64().unwrap_or(f64::NAN).sqrt()
        }
    }

    pub fn neg(&self) -> Self {
        QuadExt {
            rat: -self.rat.clone(),
            coef: -self.coef.clone(),
            root: self.root.clone(),
        }
    }

    pub fn add_rat(&self, r: &Rat) -> Self {
        QuadExt {
            rat: &self.rat + r,
            coef: self.coef.clone(),
            root: self.root.clone(),
        }
    }

    pub fn sub_rat(&self, r: &Rat) -> Self {
        QuadExt {
            rat: &self.rat - r,
            coef: self.coef.clone(),
            root: self.root.clone(),
        }
    }

    pub fn abs(&self) -> Self {
        if self.cmp_rat(&Rat::zero()) == Ordering::Less {
            self.neg()
        } else {
            self.clone()
        }
    }

    /// Exact equality. Does not assume the radicands are squarefree: with
    /// both irrational parts present and distinct square classes the values
    /// are automatically distinct.
    pub fn eq_exact(&self, other: &Self) -> bool {
        match (self.is_rational(), other.is_rational()) {
            (true, true) => self.rat == other.rat,
            (true, false) => rational_eq_surd(&self.rat, other),
            (false, true) => rational_eq_surd(&other.rat, self),
            (false, false) => {
                let u = &self.rat - &other.rat;
                if u.is_zero() {
                    self.coef.is_positive() == other.coef.is_positive()
                        && coef_sq_times_root(&self.coef, &self.root)
                            == coef_sq_times_root(&other.coef, &other.root)
                } else {
                    // u + b1*sqrt(d1) - b2*sqrt(d2) = 0 with u != 0 forces the
                    // radicals to cancel the rational part, impossible whether
                    // sqrt(d1), sqrt(d2) are dependent over Q or not.
                    false
                }
            }
        }
    }

    /// Exact ordering via structural equality plus interval refinement.
    pub fn cmp_exact(&self, other: &Self) -> Ordering {
        if self.eq_exact(other) {
            return Ordering::Equal;
        }
        let mut bits = 16u32;
        loop {
            let (alo, ahi) = self.bounds(bits);
            let (blo, bhi) = other.bounds(bits);
            if ahi < blo {
                return Ordering::Less;
            }
            if alo > bhi {
                return Ordering::Greater;
            }
            bits *= 2;
            assert!(
                bits <= 1 << 14,
                "interval refinement failed to separate distinct quadratic surds"
            );
        }
    }

    pub fn cmp_rat(&self, r: &Rat) -> Ordering {
        if self.is_rational() {
            return self.rat.cmp(r);
        }
        // rat + coef*sqrt(d) vs r  <=>  coef*sqrt(d) vs r - rat
        let rhs = r - &self.rat;
        let coef_pos = self.coef.is_positive();
        if rhs.is_zero() {
            return if coef_pos {
                Ordering::Greater
            } else {
                Ordering::Less
            };
        }
        if coef_pos != rhs.is_positive() {
            return if coef_pos {
                Ordering::Greater
            } else {
                Ordering::Less
            };
        }
        // same sign: compare squares, flip for the negative branch
        let lhs_sq = coef_sq_times_root(&self.coef, &self.root);
        let rhs_sq = &rhs * &rhs;
        let cmp = lhs_sq.cmp(&rhs_sq);
        if coef_pos {
            cmp
        } else {
            cmp.reverse()
        }
    }

    fn bounds(&self, bits: u32) -> (Rat, Rat) {
        if self.is_rational() {
            return (self.rat.clone(), self.rat.clone());
        }
        let (slo, shi) = sqrt_bounds(&self.root, bits);
        if self.coef.is_positive() {
            (&self.rat + &self.coef * slo, &self.rat + &self.coef * shi)
        } else {
            (&self.rat + &self.coef * shi, &self.rat + &self.coef * slo)
        }
    }

    /// Canonical `(p + q*sqrt(d))/r` data with integer `p`, `q`, `r > 0`.
    pub fn canonical_parts(&self) -> Option<(BigInt, BigInt, BigUint, BigInt)> {
        if self.is_rational() {
            return None;
        }
        let r = self.rat.denom().lcm(self.coef.denom());
        let p = self.rat.numer() * (&r / self.rat.denom());
        let q = self.coef.numer() * (&r / self.coef.denom());
        Some((p, q, self.root.clone(), r))
    }

    /// Symbolic rendering: `"p/q"` for rationals, `"(p+q*sqrt(d))/r"` otherwise.
    pub fn symbol(&self) -> String {
        match self.canonical_parts() {
            None => rational_string(&self.rat),
            Some((p, q, d, r)) => {
                let sign = if q.is_negative() { "-" } else { "+" };
                let qa = q.abs();
                format!("({p}{sign}{qa}*sqrt({d}))/{r}")
            }
        }
    }
}

fn coef_sq_times_root(coef: &Rat, root: &BigUint) -> Rat {
    coef * coef * Rat::from_integer(BigInt::from(root.clone()))
}

fn rational_eq_surd(r: &Rat, s: &QuadExt) -> bool {
    // r == s.rat + s.coef*sqrt(d): t := (r - s.rat) must equal s.coef*sqrt(d)
    let t = r - &s.rat;
    if t.is_zero() || (t.is_positive() != s.coef.is_positive()) {
        return false;
    }
    &t * &t == coef_sq_times_root(&s.coef, &s.root)
}

impl PartialEq for QuadExt {
    fn eq(&self, other: &Self) -> bool {
        self.eq_exact(other)
    }
}
impl Eq for QuadExt {}

impl PartialOrd for QuadExt {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for QuadExt {
    fn cmp(&self, other: &Self) -> Ordering {
        self.cmp_exact(other)
    }
}

impl fmt::Display for QuadExt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.symbol())
    }
}

/// A spectrum value: exact rational or floating point with tolerance.
#[derive(Clone, Debug)]
pub enum Scalar {
    Exact(Rat),
    Approx(f64),
}

impl Scalar {
    pub fn zero() -> Self {
        Scalar::Exact(Rat::zero())
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, Scalar::Exact(_))
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            Scalar::Exact(r) => rat_to_f64(r),
            Scalar::Approx(x) => *x,
        }
    }

    pub fn as_exact(&self) -> Option<&Rat> {
        match self {
            Scalar::Exact(r) => Some(r),
            Scalar::Approx(_) => None,
        }
    }

    /// Total order; exact vs exact compares exactly, anything involving an
    /// approximate value compares through `f64`.
    pub fn cmp_scalar(&self, other: &Scalar) -> Ordering {
        match (self, other) {
            (Scalar::Exact(a), Scalar::Exact(b)) => a.cmp(b),
            _ => self
                .to_f64()
                .partial_cmp(&other.to_f64())
                .expect("non-finite spectrum value"),
        }
    }

    pub fn cmp_rat(&self, r: &Rat) -> Ordering {
        match self {
            Scalar::Exact(a) => a.cmp(r),
            Scalar::Approx(x) => x
                .partial_cmp(&rat_to_f64(r))
                .expect("non-finite spectrum value"),
        }
    }

    pub fn display_string(&self) -> String {
        match self {
            Scalar::Exact(r) => rational_string(r),
            Scalar::Approx(x) => format!("{x}"),
        }
    }
}

impl PartialEq for Scalar {
    fn eq(&self, other: &Self) -> bool {
        self.cmp_scalar(other) == Ordering::Equal
    }
}

impl Serialize for Scalar {
    fn serialize<S: Serializer>(&self, ser: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Scalar::Exact(r) => ser.serialize_str(&rational_string(r)),
            Scalar::Approx(x) => ser.serialize_f64(*x),
        }
    }
}

impl<'de> Deserialize<'de> for Scalar {
    fn deserialize<D: Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        let v = serde_json::Value::deserialize(de)?;
        scalar_from_value(&v).map_err(D::Error::custom)
    }
}

/// JSON convention: strings and integer literals are exact, non-integer
/// numbers are floating point.
pub fn scalar_from_value(v: &serde_json::Value) -> Result<Scalar> {
    match v {
        serde_json::Value::String(s) => Ok(Scalar::Exact(parse_rational(s)?)),
        serde_json::Value::Number(n) => {
            if let Some(i) = n.as_i64() {
                Ok(Scalar::Exact(rat_i64(i)))
            } else if let Some(x) = n.as_f64() {
                Ok(Scalar::Approx(x))
            } else {
                Err(Error::Structural(format!("unrepresentable number {n}")))
            }
        }
        other => Err(Error::Structural(format!(
            "expected number or rational string, found {other}"
        ))),
    }
}

/// Guaranteed-completeness bound of a spectrum.
#[derive(Clone, Debug, PartialEq)]
pub enum Cutoff {
    At(Scalar),
    Unbounded,
}

impl Cutoff {
    pub fn exact(r: Rat) -> Self {
        Cutoff::At(Scalar::Exact(r))
    }

    /// Does the cutoff certify that every eigenvalue `<= x` is present?
    pub fn covers(&self, x: &Scalar) -> bool {
        match self {
            Cutoff::Unbounded => true,
            Cutoff::At(c) => c.cmp_scalar(x) != Ordering::Less,
        }
    }

    pub fn covers_rat(&self, x: &Rat) -> bool {
        self.covers(&Scalar::Exact(x.clone()))
    }

    pub fn display_string(&self) -> String {
        match self {
            Cutoff::Unbounded => "inf".to_string(),
            Cutoff::At(s) => s.display_string(),
        }
    }
}

impl Serialize for Cutoff {
    fn serialize<S: Serializer>(&self, ser: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Cutoff::Unbounded => ser.serialize_str("inf"),
            Cutoff::At(s) => s.serialize(ser),
        }
    }
}

impl<'de> Deserialize<'de> for Cutoff {
    fn deserialize<D: Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        let v = serde_json::Value::deserialize(de)?;
        if let serde_json::Value::String(s) = &v {
            if s.trim() == "inf" || s.trim() == "unbounded" {
                return Ok(Cutoff::Unbounded);
            }
        }
        scalar_from_value(&v).map(Cutoff::At).map_err(D::Error::custom)
    }
}
