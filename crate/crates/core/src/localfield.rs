//! Truncated `Q_p` arithmetic and the quadratic algebra `E = F + F sigma`.
//!
//! [`FieldElem`] stores `p^v * u` with `u` a unit known modulo `p^N`.
//! Multiplication keeps `N`; addition can lose digits when leading terms
//! cancel, and the loss is tracked. [`QuadExtData`] records the five-way
//! classification of `E` with its structural constants, and [`QuadElem`] is
//! an element `x + y sigma` of `E`.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::laurent::{qi, AmbientParams, LaurentPoly, Q};

/// Default number of `p`-adic digits carried by every element.
pub const DEFAULT_PRECISION: u32 = 8;

/// Name of the environment variable that overrides [`DEFAULT_PRECISION`].
pub const PRECISION_ENV: &str = "SKBESSEL_PRECISION";

const EXACT_ZERO: i64 = i64::MAX / 4;
const MAX_MODULUS: u128 = 1 << 62;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FieldError {
    #[error("precision exhausted: {0}")]
    PrecisionExhausted(String),
    #[error("element is not invertible at available precision")]
    NotInvertible,
    #[error("p^N = {p}^{n} does not fit the 62-bit residue model")]
    ModulusTooLarge { p: u64, n: u32 },
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("inconsistent classification input: {0}")]
    Inconsistent(String),
    #[error("enumeration of {0} elements exceeds the size bound")]
    TooLarge(u128),
    #[error("unsupported: {0}")]
    Unsupported(String),
}

/// Working precision: `SKBESSEL_PRECISION` if set and parseable, otherwise
/// [`DEFAULT_PRECISION`].
pub fn working_precision() -> u32 {
    std::env::var(PRECISION_ENV)
        .ok()
        .and_then(|s| s.trim().parse::<u32>().ok())
        .filter(|&n| n >= 2)
        .unwrap_or(DEFAULT_PRECISION)
}

pub fn is_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= p {
        if p % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

fn pow_u128(p: u64, n: u32) -> u128 {
    (p as u128).pow(n)
}

fn modulus(p: u64, n: u32) -> u64 {
    pow_u128(p, n) as u64
}

fn check_modulus(p: u64, n: u32) -> Result<(), FieldError> {
    if pow_u128(p, n) >= MAX_MODULUS {
        Err(FieldError::ModulusTooLarge { p, n })
    } else {
        Ok(())
    }
}

fn inv_mod(a: u64, m: u64) -> Option<u64> {
    let e = (a as i128).extended_gcd(&(m as i128));
    if e.gcd != 1 {
        return None;
    }
    Some(e.x.rem_euclid(m as i128) as u64)
}

/// A truncated element `p^val * unit` of `Q_p`.
#[derive(Clone, Copy)]
pub struct FieldElem {
    p: u64,
    val: i64,
    unit: u64,
    /// Relative precision. `0` marks a zero known modulo `p^val`.
    prec: u32,
}

impl FieldElem {
    /// The exact zero.
    pub fn zero(p: u64) -> Self {
        FieldElem { p, val: EXACT_ZERO, unit: 0, prec: 0 }
    }

    /// Zero known only modulo `p^abs`.
    pub fn zero_mod(p: u64, abs: i64) -> Self {
        FieldElem { p, val: abs.min(EXACT_ZERO), unit: 0, prec: 0 }
    }

    pub fn one(p: u64, prec: u32) -> Self {
        FieldElem { p, val: 0, unit: 1 % modulus(p, prec), prec }
    }

    pub fn from_i64(p: u64, prec: u32, n: i64) -> Self {
        Self::from_bigint(p, prec, &BigInt::from(n))
    }

    pub fn from_bigint(p: u64, prec: u32, n: &BigInt) -> Self {
        if n.is_zero() {
            return Self::zero(p);
        }
        let pb = BigInt::from(p);
        let mut n = n.clone();
        let mut v = 0i64;
        while (&n % &pb).is_zero() {
            n /= &pb;
            v += 1;
        }
        let m = BigInt::from(modulus(p, prec));
        let u = n.mod_floor(&m).to_u64().expect("residue fits u64");
        FieldElem { p, val: v, unit: u, prec }
    }

    /// Image of an exact rational.
    pub fn from_q(p: u64, prec: u32, r: &Q) -> Self {
        if r.is_zero() {
            return Self::zero(p);
        }
        let n = Self::from_bigint(p, prec, r.numer());
        let d = Self::from_bigint(p, prec, r.denom());
        n.div(&d).expect("nonzero denominator")
    }

    /// `p^k` at the given precision.
    pub fn p_power(p: u64, prec: u32, k: i64) -> Self {
        FieldElem { p, val: k, unit: 1 % modulus(p, prec), prec }
    }

    pub fn prime(&self) -> u64 {
        self.p
    }

    pub fn is_zero(&self) -> bool {
        self.prec == 0
    }

    pub fn is_exact_zero(&self) -> bool {
        self.prec == 0 && self.val >= EXACT_ZERO
    }

    /// `None` for zero.
    pub fn valuation(&self) -> Option<i64> {
        (!self.is_zero()).then_some(self.val)
    }

    /// Valuation with zero mapped to `+inf` (as `i64::MAX / 4`).
    pub fn val_or_inf(&self) -> i64 {
        if self.is_zero() {
            EXACT_ZERO
        } else {
            self.val
        }
    }

    /// The element is known modulo `p^abs_precision`.
    pub fn abs_precision(&self) -> i64 {
        if self.is_zero() {
            self.val
        } else {
            self.val.saturating_add(self.prec as i64)
        }
    }

    pub fn rel_precision(&self) -> u32 {
        self.prec
    }

    pub fn unit_part(&self) -> u64 {
        self.unit
    }

    pub fn is_unit(&self) -> bool {
        !self.is_zero() && self.val == 0
    }

    /// Certainly in `o`: nonzero with `v >= 0`, or a zero known mod `p^k`, `k >= 0`.
    pub fn is_integral(&self) -> Result<bool, FieldError> {
        if self.is_zero() {
            if self.val >= 0 {
                Ok(true)
            } else {
                Err(FieldError::PrecisionExhausted(format!(
                    "zero known only modulo {}^{}",
                    self.p, self.val
                )))
            }
        } else {
            Ok(self.val >= 0)
        }
    }

    /// Drop digits below `p^abs`.
    pub fn truncate_abs(&self, abs: i64) -> Self {
        if self.is_zero() {
            return Self::zero_mod(self.p, self.val.min(abs));
        }
        if abs <= self.val {
            return Self::zero_mod(self.p, abs);
        }
        let prec = (abs - self.val).min(self.prec as i64) as u32;
        FieldElem { p: self.p, val: self.val, unit: self.unit % modulus(self.p, prec), prec }
    }

    pub fn neg(&self) -> Self {
        if self.is_zero() {
            return *self;
        }
        let m = modulus(self.p, self.prec);
        FieldElem { unit: (m - self.unit) % m, ..*self }
    }

    pub fn add(&self, other: &Self) -> Self {
        debug_assert_eq!(self.p, other.p);
        let p = self.p;
        if self.is_zero() {
            return other.truncate_abs(self.val);
        }
        if other.is_zero() {
            return self.truncate_abs(other.val);
        }
        let (x, y) = if self.val <= other.val { (self, other) } else { (other, self) };
        let abs = x.abs_precision().min(y.abs_precision());
        let r = (abs - x.val) as u32;
        let m = modulus(p, r) as u128;
        let d = y.val - x.val;
        let mut s = x.unit as u128 % m;
        if (d as u64) < r as u64 {
            let shifted = (y.unit as u128 % m) * pow_u128(p, d as u32) % m;
            s = (s + shifted) % m;
        }
        if s == 0 {
            return Self::zero_mod(p, abs);
        }
        let mut k = 0u32;
        while s % p as u128 == 0 {
            s /= p as u128;
            k += 1;
        }
        FieldElem { p, val: x.val + k as i64, unit: s as u64, prec: r - k }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Self) -> Self {
        let p = self.p;
        if self.is_zero() || other.is_zero() {
            return Self::zero_mod(p, self.val.saturating_add(other.val));
        }
        let prec = self.prec.min(other.prec);
        let m = modulus(p, prec) as u128;
        let u = (self.unit as u128 % m) * (other.unit as u128 % m) % m;
        FieldElem { p, val: self.val + other.val, unit: u as u64, prec }
    }

    pub fn inv(&self) -> Result<Self, FieldError> {
        if self.is_zero() {
            return Err(FieldError::NotInvertible);
        }
        let m = modulus(self.p, self.prec);
        let u = inv_mod(self.unit, m).ok_or(FieldError::NotInvertible)?;
        Ok(FieldElem { p: self.p, val: -self.val, unit: u, prec: self.prec })
    }

    pub fn div(&self, other: &Self) -> Result<Self, FieldError> {
        Ok(self.mul(&other.inv()?))
    }

    pub fn pow(&self, k: i64) -> Result<Self, FieldError> {
        let base = if k < 0 { self.inv()? } else { *self };
        let mut out = FieldElem::one(self.p, self.prec.max(1));
        if self.is_zero() && k == 0 {
            return Ok(out);
        }
        for _ in 0..k.unsigned_abs() {
            out = out.mul(&base);
        }
        Ok(out)
    }

    /// Multiply by `p^k`.
    pub fn shift(&self, k: i64) -> Self {
        FieldElem { val: self.val.saturating_add(k).min(EXACT_ZERO), ..*self }
    }

    /// A rational lift `p^v * u` with `0 <= u < p^N`.
    pub fn to_q(&self) -> Q {
        if self.is_zero() {
            return Q::zero();
        }
        let pq = qi(self.p as i64);
        crate::laurent::qpow(&pq, self.val) * qi(self.unit as i64)
    }

    /// Residue of an integral element modulo `p^k` as an integer in `[0, p^k)`.
    pub fn residue(&self, k: u32) -> Result<u64, FieldError> {
        if !self.is_integral()? {
            return Err(FieldError::Inconsistent("residue of a non-integral element".into()));
        }
        if self.is_zero() || self.val >= k as i64 {
            if self.abs_precision() < k as i64 {
                return Err(FieldError::PrecisionExhausted("residue below known digits".into()));
            }
            return Ok(0);
        }
        if self.abs_precision() < k as i64 {
            return Err(FieldError::PrecisionExhausted("residue below known digits".into()));
        }
        let m = pow_u128(self.p, k);
        Ok(((self.unit as u128 * pow_u128(self.p, self.val as u32)) % m) as u64)
    }
}

impl PartialEq for FieldElem {
    fn eq(&self, other: &Self) -> bool {
        match (self.is_zero(), other.is_zero()) {
            (true, true) => true,
            (false, false) => {
                if self.val != other.val {
                    return false;
                }
                let m = modulus(self.p, self.prec.min(other.prec));
                self.unit % m == other.unit % m
            }
            _ => false,
        }
    }
}

impl fmt::Display for FieldElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            f.write_str("0")
        } else {
            write!(f, "{}^{} * {}", self.p, self.val, self.unit)
        }
    }
}

impl fmt::Debug for FieldElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            if self.is_exact_zero() {
                f.write_str("0")
            } else {
                write!(f, "O({}^{})", self.p, self.val)
            }
        } else {
            write!(f, "{}^{}*{} (+O({}^{}))", self.p, self.val, self.unit, self.p, self.abs_precision())
        }
    }
}

// ---------------------------------------------------------------------------
// Classification of E

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum QuadCase {
    Split,
    #[serde(rename = "U-i")]
    UI,
    #[serde(rename = "U-ii")]
    UII,
    #[serde(rename = "R-i")]
    RI,
    #[serde(rename = "R-ii")]
    RII,
}

impl QuadCase {
    pub fn name(self) -> &'static str {
        match self {
            QuadCase::Split => "Split",
            QuadCase::UI => "U-i",
            QuadCase::UII => "U-ii",
            QuadCase::RI => "R-i",
            QuadCase::RII => "R-ii",
        }
    }

    pub fn is_unramified_field(self) -> bool {
        matches!(self, QuadCase::UI | QuadCase::UII)
    }

    pub fn is_ramified(self) -> bool {
        matches!(self, QuadCase::RI | QuadCase::RII)
    }
}

impl std::str::FromStr for QuadCase {
    type Err = FieldError;
    fn from_str(s: &str) -> Result<Self, FieldError> {
        match s {
            "Split" | "split" => Ok(QuadCase::Split),
            "U-i" | "u-i" => Ok(QuadCase::UI),
            "U-ii" | "u-ii" => Ok(QuadCase::UII),
            "R-i" | "r-i" => Ok(QuadCase::RI),
            "R-ii" | "r-ii" => Ok(QuadCase::RII),
            other => Err(FieldError::Inconsistent(format!("unknown case {other:?}"))),
        }
    }
}

impl fmt::Display for QuadCase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// How the defining element `e = sigma^2` is chosen.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EDescriptor {
    /// Unramified field: odd `p` gives U-i, `p = 2` gives U-ii.
    NonsquareUnit,
    /// `e = p`, ramified (R-i).
    Uniformizer,
    /// `p = 2`, `e = -1`, ramified with `alpha = 1` (R-ii).
    UnitTwoAdic,
    /// `e = 1`, `E = F + F`.
    Split,
}

impl EDescriptor {
    pub fn for_case(case: QuadCase) -> Self {
        match case {
            QuadCase::Split => EDescriptor::Split,
            QuadCase::UI | QuadCase::UII => EDescriptor::NonsquareUnit,
            QuadCase::RI => EDescriptor::Uniformizer,
            QuadCase::RII => EDescriptor::UnitTwoAdic,
        }
    }
}

/// The algebra `E_sigma` with its structural constants.
#[derive(Debug, Clone, Serialize)]
pub struct QuadExtData {
    pub p: u64,
    pub case: QuadCase,
    /// Residue degree.
    pub f: u32,
    /// `2` in case U-ii, else `1`.
    pub dv: u32,
    pub m0: u32,
    /// Exponent of the relative different.
    pub diff_exp: u32,
    #[serde(skip)]
    pub e: Q,
    #[serde(skip)]
    pub alpha: Option<Q>,
    #[serde(skip)]
    pub b: Option<Q>,
    #[serde(skip)]
    pub prec: u32,
}

impl PartialEq for QuadExtData {
    fn eq(&self, other: &Self) -> bool {
        self.p == other.p && self.case == other.case && self.prec == other.prec
    }
}

fn smallest_nonresidue(p: u64) -> u64 {
    (2..p)
        .find(|&a| {
            let mut r = 1u128;
            let mut b = a as u128;
            let mut k = (p - 1) / 2;
            while k > 0 {
                if k & 1 == 1 {
                    r = r * b % p as u128;
                }
                b = b * b % p as u128;
                k >>= 1;
            }
            r == (p - 1) as u128
        })
        .expect("odd prime has a nonresidue")
}

/// Classify at the working precision.
pub fn classify(p: u64, desc: EDescriptor) -> Result<QuadExtData, FieldError> {
    classify_with_precision(p, desc, working_precision())
}

pub fn classify_with_precision(
    p: u64,
    desc: EDescriptor,
    prec: u32,
) -> Result<QuadExtData, FieldError> {
    if !is_prime(p) {
        return Err(FieldError::NotPrime(p));
    }
    check_modulus(p, prec)?;
    let (case, e, alpha, b) = match (desc, p == 2) {
        (EDescriptor::Split, _) => (QuadCase::Split, qi(1), None, None),
        (EDescriptor::NonsquareUnit, false) => {
            (QuadCase::UI, qi(smallest_nonresidue(p) as i64), None, None)
        }
        (EDescriptor::NonsquareUnit, true) => (QuadCase::UII, qi(5), None, Some(qi(1))),
        (EDescriptor::Uniformizer, _) => (QuadCase::RI, qi(p as i64), None, None),
        (EDescriptor::UnitTwoAdic, true) => (QuadCase::RII, qi(-1), Some(qi(1)), None),
        (EDescriptor::UnitTwoAdic, false) => {
            return Err(FieldError::Inconsistent(
                "the 2-adic unit descriptor needs p = 2".into(),
            ))
        }
    };
    let (f, dv, m0) = match case {
        QuadCase::Split => (1, 1, 1),
        QuadCase::UI => (2, 1, 1),
        QuadCase::UII => (2, 2, 1),
        QuadCase::RI | QuadCase::RII => (1, 1, 2),
    };
    let mut data = QuadExtData { p, case, f, dv, m0, diff_exp: 0, e, alpha, b, prec };
    if case.is_ramified() {
        let rho = data.uniformizer();
        let t = rho.trace(&data);
        let n = rho.norm(&data);
        let disc = t.mul(&t).sub(&n.mul(&data.int(4)));
        data.diff_exp = disc.valuation().expect("ramified discriminant is nonzero") as u32;
    }
    Ok(data)
}

/// Classify from the case name, choosing the canonical `e` for that case.
pub fn classify_case(p: u64, case: QuadCase) -> Result<QuadExtData, FieldError> {
    classify_case_with_precision(p, case, working_precision())
}

pub fn classify_case_with_precision(
    p: u64,
    case: QuadCase,
    prec: u32,
) -> Result<QuadExtData, FieldError> {
    match (case, p == 2) {
        (QuadCase::UI, true) => return Err(FieldError::Inconsistent("U-i needs odd p".into())),
        (QuadCase::UII, false) => return Err(FieldError::Inconsistent("U-ii needs p = 2".into())),
        (QuadCase::RII, false) => return Err(FieldError::Inconsistent("R-ii needs p = 2".into())),
        _ => {}
    }
    classify_with_precision(p, EDescriptor::for_case(case), prec)
}

impl QuadExtData {
    pub fn with_precision(&self, prec: u32) -> Result<Self, FieldError> {
        check_modulus(self.p, prec)?;
        Ok(QuadExtData { prec, ..self.clone() })
    }

    pub fn q(&self) -> u64 {
        self.p
    }

    /// `q^f`, the size of the residue field of `E`.
    pub fn residue_size(&self) -> u64 {
        self.p.pow(self.f)
    }

    pub fn params(&self) -> AmbientParams {
        AmbientParams::from_int(self.p as i64).expect("p > 1")
    }

    pub fn elem(&self, r: &Q) -> FieldElem {
        FieldElem::from_q(self.p, self.prec, r)
    }

    pub fn int(&self, n: i64) -> FieldElem {
        FieldElem::from_i64(self.p, self.prec, n)
    }

    pub fn zero(&self) -> FieldElem {
        FieldElem::zero(self.p)
    }

    pub fn one(&self) -> FieldElem {
        FieldElem::one(self.p, self.prec)
    }

    /// `varpi^k`.
    pub fn varpi_pow(&self, k: i64) -> FieldElem {
        FieldElem::p_power(self.p, self.prec, k)
    }

    pub fn e_elem(&self) -> FieldElem {
        self.elem(&self.e)
    }

    pub fn quad(&self, x: FieldElem, y: FieldElem) -> QuadElem {
        QuadElem { x, y }
    }

    pub fn quad_q(&self, x: &Q, y: &Q) -> QuadElem {
        QuadElem { x: self.elem(x), y: self.elem(y) }
    }

    pub fn quad_one(&self) -> QuadElem {
        self.quad(self.one(), self.zero())
    }

    pub fn sigma(&self) -> QuadElem {
        self.quad(self.zero(), self.one())
    }

    /// Second `o`-basis vector of the maximal order: `sigma`, or
    /// `(1 + b sigma)/2` in case U-ii.
    pub fn omega(&self) -> QuadElem {
        match self.case {
            QuadCase::UII => {
                let b = self.b.clone().expect("U-ii carries b");
                self.quad_q(&crate::laurent::q(1, 2), &(b / qi(2)))
            }
            _ => self.sigma(),
        }
    }

    /// The fixed uniformizer `rho` of `E`.
    pub fn uniformizer(&self) -> QuadElem {
        match self.case {
            QuadCase::UI | QuadCase::UII => self.quad(self.varpi_pow(1), self.zero()),
            QuadCase::RI => self.sigma(),
            QuadCase::RII => {
                let a = self.alpha.clone().expect("R-ii carries alpha");
                self.quad_q(&a, &qi(1))
            }
            QuadCase::Split => {
                let p = qi(self.p as i64);
                self.quad_q(&((&p + qi(1)) / qi(2)), &((&p - qi(1)) / qi(2)))
            }
        }
    }

    /// `rho^k` for any integer `k`.
    pub fn uniformizer_pow(&self, k: i64) -> Result<QuadElem, FieldError> {
        self.uniformizer().pow(k, self)
    }

    /// Coordinates of `z` in the `o`-basis `{1, omega}` of the maximal order.
    pub fn ring_coords(&self, z: &QuadElem) -> (FieldElem, FieldElem) {
        match self.case {
            QuadCase::UII => {
                let b = self.elem(self.b.as_ref().expect("U-ii carries b"));
                let c = z.y.mul(&self.int(2)).div(&b).expect("b is a unit");
                let a = z.x.sub(&c.div(&self.int(2)).expect("2 != 0"));
                (a, c)
            }
            _ => (z.x, z.y),
        }
    }

    /// `z` lies in the maximal order.
    pub fn in_ring(&self, z: &QuadElem) -> Result<bool, FieldError> {
        let (a, c) = self.ring_coords(z);
        Ok(a.is_integral()? && c.is_integral()?)
    }

    /// `z` lies in `P^k = rho^k O`.
    pub fn in_prime_power(&self, z: &QuadElem, k: i64) -> Result<bool, FieldError> {
        let r = self.uniformizer_pow(-k)?;
        self.in_ring(&r.mul(z, self))
    }

    /// Split algebras need odd `p` for the `{1, sigma}` model of `O`.
    pub fn check_supported(&self) -> Result<(), FieldError> {
        if self.case == QuadCase::Split && self.p == 2 {
            return Err(FieldError::Unsupported("split algebra at p = 2".into()));
        }
        Ok(())
    }
}

/// An element `x + y sigma` of `E`, with `sigma^2 = e`.
#[derive(Clone, Copy, PartialEq)]
pub struct QuadElem {
    pub x: FieldElem,
    pub y: FieldElem,
}

impl fmt::Debug for QuadElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({:?}) + ({:?})s", self.x, self.y)
    }
}

impl QuadElem {
    pub fn add(&self, o: &QuadElem) -> QuadElem {
        QuadElem { x: self.x.add(&o.x), y: self.y.add(&o.y) }
    }

    pub fn sub(&self, o: &QuadElem) -> QuadElem {
        QuadElem { x: self.x.sub(&o.x), y: self.y.sub(&o.y) }
    }

    pub fn neg(&self) -> QuadElem {
        QuadElem { x: self.x.neg(), y: self.y.neg() }
    }

    pub fn mul(&self, o: &QuadElem, ctx: &QuadExtData) -> QuadElem {
        let e = ctx.e_elem();
        QuadElem {
            x: self.x.mul(&o.x).add(&e.mul(&self.y.mul(&o.y))),
            y: self.x.mul(&o.y).add(&self.y.mul(&o.x)),
        }
    }

    pub fn scale(&self, c: &FieldElem) -> QuadElem {
        QuadElem { x: self.x.mul(c), y: self.y.mul(c) }
    }

    pub fn conj(&self) -> QuadElem {
        QuadElem { x: self.x, y: self.y.neg() }
    }

    pub fn norm(&self, ctx: &QuadExtData) -> FieldElem {
        self.x.mul(&self.x).sub(&ctx.e_elem().mul(&self.y.mul(&self.y)))
    }

    pub fn trace(&self, _ctx: &QuadExtData) -> FieldElem {
        self.x.add(&self.x)
    }

    pub fn inv(&self, ctx: &QuadExtData) -> Result<QuadElem, FieldError> {
        let n = self.norm(ctx);
        if n.is_zero() {
            return Err(FieldError::NotInvertible);
        }
        let ninv = n.inv()?;
        Ok(self.conj().scale(&ninv))
    }

    pub fn pow(&self, k: i64, ctx: &QuadExtData) -> Result<QuadElem, FieldError> {
        let base = if k < 0 { self.inv(ctx)? } else { *self };
        let mut out = ctx.quad_one();
        for _ in 0..k.unsigned_abs() {
            out = out.mul(&base, ctx);
        }
        Ok(out)
    }

    pub fn is_zero(&self) -> bool {
        self.x.is_zero() && self.y.is_zero()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QuadOp {
    Add,
    Mul,
    Conj,
    Norm,
    Trace,
    Inv,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum QuadValue {
    Elem(QuadElem),
    Scalar(FieldElem),
}

/// Arithmetic in `E`. Unary operations ignore `w`.
pub fn quad_arith(
    ctx: &QuadExtData,
    z: &QuadElem,
    w: &QuadElem,
    op: QuadOp,
) -> Result<QuadValue, FieldError> {
    Ok(match op {
        QuadOp::Add => QuadValue::Elem(z.add(w)),
        QuadOp::Mul => QuadValue::Elem(z.mul(w, ctx)),
        QuadOp::Conj => QuadValue::Elem(z.conj()),
        QuadOp::Norm => QuadValue::Scalar(z.norm(ctx)),
        QuadOp::Trace => QuadValue::Scalar(z.trace(ctx)),
        QuadOp::Inv => QuadValue::Elem(z.inv(ctx)?),
    })
}

/// Upper bound on enumerated residue systems.
pub const RESIDUE_BOUND: u128 = 1 << 20;

/// Representatives of `O / P^k`, `q^{f k}` of them.
pub fn residue_reps(ctx: &QuadExtData, k: u32) -> Result<Vec<QuadElem>, FieldError> {
    ctx.check_supported()?;
    let size = pow_u128(ctx.p, ctx.f * k);
    if size > RESIDUE_BOUND {
        return Err(FieldError::TooLarge(size));
    }
    let p = ctx.p as i64;
    let mut out = Vec::with_capacity(size as usize);
    match ctx.case {
        QuadCase::UI | QuadCase::UII => {
            let m = p.pow(k);
            let omega = ctx.omega();
            for a in 0..m {
                for c in 0..m {
                    out.push(ctx.quad(ctx.int(a), ctx.zero()).add(&omega.scale(&ctx.int(c))));
                }
            }
        }
        QuadCase::RI | QuadCase::RII => {
            let rho = ctx.uniformizer();
            let (ka, kc) = (k.div_ceil(2), k / 2);
            for a in 0..p.pow(ka) {
                for c in 0..p.pow(kc) {
                    out.push(ctx.quad(ctx.int(a), ctx.zero()).add(&rho.scale(&ctx.int(c))));
                }
            }
        }
        QuadCase::Split => {
            for a in 0..p.pow(k) {
                out.push(ctx.quad(ctx.int(a), ctx.zero()));
            }
        }
    }
    Ok(out)
}

/// `zeta_E(s + 1/2)^{-1}` as a polynomial in `X`.
pub fn zeta_e_inverse(ctx: &QuadExtData, params: &AmbientParams) -> LaurentPoly {
    let one = LaurentPoly::one();
    let xp = params.xp();
    match ctx.case {
        QuadCase::Split => (&one - &xp).pow(2),
        QuadCase::UI | QuadCase::UII => &one - &xp.pow(2),
        QuadCase::RI | QuadCase::RII => &one - &xp,
    }
}
