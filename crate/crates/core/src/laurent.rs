//! Laurent polynomials and rational functions in one variable `X` over `Q`.
//!
//! Every zeta integral, L-factor and zeta polynomial lives here. The second
//! variable `X' = X/q` is never independent: [`AmbientParams::xp`] builds it
//! from `X` and the residue size `q`.
//!
//! Text form is a signed monomial list in ascending exponent,
//! `1 - 1/3*X + X^2`, and `(num)/(den)` for quotients. [`std::str::FromStr`]
//! parses exactly what [`std::fmt::Display`] prints.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

/// Exact rational scalar.
pub type Q = BigRational;

/// Builds the rational `n/d`. Panics on `d == 0`.
pub fn q(n: i64, d: i64) -> Q {
    Q::new(BigInt::from(n), BigInt::from(d))
}

/// Builds the integer `n` as a rational.
pub fn qi(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LaurentError {
    #[error("undefined diameter: zero polynomial")]
    UndefinedDiameter,
    #[error("denominator is identically zero")]
    ZeroDenominator,
    #[error("not divisible in the Laurent ring")]
    NotDivisible,
    #[error("parse error: {0}")]
    Parse(String),
    #[error("invalid ambient parameters: {0}")]
    Params(String),
}

/// A sign `±1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Sign {
    #[serde(rename = "+")]
    Plus,
    #[serde(rename = "-")]
    Minus,
}

impl Sign {
    pub fn from_i64(v: i64) -> Option<Sign> {
        match v {
            1 => Some(Sign::Plus),
            -1 => Some(Sign::Minus),
            _ => None,
        }
    }

    pub fn as_i64(self) -> i64 {
        match self {
            Sign::Plus => 1,
            Sign::Minus => -1,
        }
    }

    pub fn as_q(self) -> Q {
        qi(self.as_i64())
    }

    pub fn flip(self) -> Sign {
        match self {
            Sign::Plus => Sign::Minus,
            Sign::Minus => Sign::Plus,
        }
    }

    pub fn symbol(self) -> &'static str {
        match self {
            Sign::Plus => "+",
            Sign::Minus => "-",
        }
    }
}

impl Mul for Sign {
    type Output = Sign;
    fn mul(self, rhs: Sign) -> Sign {
        if self == rhs {
            Sign::Plus
        } else {
            Sign::Minus
        }
    }
}

impl fmt::Display for Sign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.symbol())
    }
}

/// Residue size `q`, optional Satake parameter `a`, and the additive
/// character normalization flag.
#[derive(Debug, Clone, PartialEq)]
pub struct AmbientParams {
    pub q: Q,
    pub a: Option<Q>,
    /// `psi` is trivial on the integers and nontrivial on `p^-1`. This is a
    /// convention marker only; no character is ever evaluated.
    pub psi_unramified: bool,
}

impl AmbientParams {
    pub fn new(q: Q) -> Result<Self, LaurentError> {
        if q <= Q::one() {
            return Err(LaurentError::Params(format!("q must exceed 1, got {q}")));
        }
        Ok(AmbientParams { q, a: None, psi_unramified: true })
    }

    pub fn from_int(q: i64) -> Result<Self, LaurentError> {
        Self::new(qi(q))
    }

    pub fn with_satake(mut self, a: Q) -> Result<Self, LaurentError> {
        if a.is_zero() {
            return Err(LaurentError::Params("Satake parameter must be nonzero".into()));
        }
        self.a = Some(a);
        Ok(self)
    }

    /// `X`.
    pub fn x(&self) -> LaurentPoly {
        LaurentPoly::x()
    }

    /// `X' = X/q`.
    pub fn xp(&self) -> LaurentPoly {
        LaurentPoly::monomial(self.q.recip(), 1)
    }

    /// `q^k` for any integer `k`.
    pub fn q_pow(&self, k: i64) -> Q {
        qpow(&self.q, k)
    }
}

pub(crate) fn qpow(base: &Q, k: i64) -> Q {
    if k >= 0 {
        num_traits::pow(base.clone(), k as usize)
    } else {
        num_traits::pow(base.recip(), (-k) as usize)
    }
}

/// Finitely supported map from exponent to nonzero rational coefficient.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct LaurentPoly {
    coeffs: BTreeMap<i64, Q>,
}

impl LaurentPoly {
    pub fn zero() -> Self {
        LaurentPoly { coeffs: BTreeMap::new() }
    }

    pub fn one() -> Self {
        Self::constant(Q::one())
    }

    pub fn constant(c: Q) -> Self {
        Self::monomial(c, 0)
    }

    pub fn x() -> Self {
        Self::monomial(Q::one(), 1)
    }

    pub fn monomial(c: Q, e: i64) -> Self {
        let mut coeffs = BTreeMap::new();
        if !c.is_zero() {
            coeffs.insert(e, c);
        }
        LaurentPoly { coeffs }
    }

    pub fn from_terms<I: IntoIterator<Item = (i64, Q)>>(terms: I) -> Self {
        let mut p = Self::zero();
        for (e, c) in terms {
            p.add_term(e, c);
        }
        p
    }

    /// Dense coefficients `c_0 + c_1 X + ...`.
    pub fn from_dense(cs: &[Q]) -> Self {
        Self::from_terms(cs.iter().cloned().enumerate().map(|(i, c)| (i as i64, c)))
    }

    fn add_term(&mut self, e: i64, c: Q) {
        if c.is_zero() {
            return;
        }
        let entry = self.coeffs.entry(e).or_insert_with(Q::zero);
        *entry += c;
        if entry.is_zero() {
            self.coeffs.remove(&e);
        }
    }

    pub fn coeff(&self, e: i64) -> Q {
        self.coeffs.get(&e).cloned().unwrap_or_else(Q::zero)
    }

    pub fn terms(&self) -> impl Iterator<Item = (i64, &Q)> + '_ {
        self.coeffs.iter().map(|(e, c)| (*e, c))
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn min_exp(&self) -> Option<i64> {
        self.coeffs.keys().next().copied()
    }

    pub fn max_exp(&self) -> Option<i64> {
        self.coeffs.keys().next_back().copied()
    }

    /// Coefficient of the lowest-order term.
    pub fn low_coeff(&self) -> Option<&Q> {
        self.coeffs.values().next()
    }

    pub fn is_constant(&self) -> bool {
        self.is_zero() || (self.len() == 1 && self.min_exp() == Some(0))
    }

    pub fn is_monomial(&self) -> bool {
        self.len() == 1
    }

    pub fn scale(&self, c: &Q) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        LaurentPoly { coeffs: self.coeffs.iter().map(|(e, v)| (*e, v * c)).collect() }
    }

    /// Multiply by `X^k`.
    pub fn shift(&self, k: i64) -> Self {
        LaurentPoly { coeffs: self.coeffs.iter().map(|(e, v)| (e + k, v.clone())).collect() }
    }

    /// Substitute `X -> X^k` for `k != 0`.
    pub fn compose_power(&self, k: i64) -> Self {
        assert!(k != 0, "compose_power needs a nonzero exponent");
        Self::from_terms(self.coeffs.iter().map(|(e, v)| (e * k, v.clone())))
    }

    pub fn invert_variable(&self) -> Self {
        self.compose_power(-1)
    }

    pub fn pow(&self, n: u32) -> Self {
        let mut out = Self::one();
        for _ in 0..n {
            out = &out * self;
        }
        out
    }

    pub fn eval(&self, x: &Q) -> Q {
        self.coeffs.iter().fold(Q::zero(), |acc, (e, c)| acc + c * qpow(x, *e))
    }

    /// `max + min` exponent: the `d` with `X^d p(1/X)` supported like `p`.
    pub fn reflection_degree(&self) -> Option<i64> {
        Some(self.min_exp()? + self.max_exp()?)
    }

    /// The ± with `X^{max+min} p(1/X) = ± p(X)`, if any.
    pub fn palindromic_sign(&self) -> Option<Sign> {
        let d = self.reflection_degree()?;
        let refl = self.invert_variable().shift(d);
        if refl == *self {
            Some(Sign::Plus)
        } else if refl == -self {
            Some(Sign::Minus)
        } else {
            None
        }
    }

    /// Split `p = X^k p0` with `p0(0) != 0`; returns `(k, dense p0)`.
    fn split_dense(&self) -> (i64, Vec<Q>) {
        match (self.min_exp(), self.max_exp()) {
            (Some(lo), Some(hi)) => {
                let mut v = vec![Q::zero(); (hi - lo + 1) as usize];
                for (e, c) in &self.coeffs {
                    v[(e - lo) as usize] = c.clone();
                }
                (lo, v)
            }
            _ => (0, Vec::new()),
        }
    }

    /// Exact quotient in `Q[X, 1/X]`, or `None`.
    pub fn div_exact(&self, d: &LaurentPoly) -> Option<LaurentPoly> {
        if d.is_zero() {
            return None;
        }
        if self.is_zero() {
            return Some(Self::zero());
        }
        let (nk, n) = self.split_dense();
        let (dk, dd) = d.split_dense();
        let (quot, rem) = dense_divmod(&n, &dd);
        if rem.iter().any(|c| !c.is_zero()) {
            return None;
        }
        Some(Self::from_dense(&quot).shift(nk - dk))
    }

    /// Substitute `X -> c X`.
    pub fn rescale_variable(&self, c: &Q) -> Self {
        Self::from_terms(self.coeffs.iter().map(|(e, v)| (*e, v * qpow(c, *e))))
    }
}

fn trim(v: &mut Vec<Q>) {
    while v.last().is_some_and(|c| c.is_zero()) {
        v.pop();
    }
}

/// Polynomial long division on ascending dense vectors.
fn dense_divmod(n: &[Q], d: &[Q]) -> (Vec<Q>, Vec<Q>) {
    let mut r = n.to_vec();
    let mut d = d.to_vec();
    trim(&mut r);
    trim(&mut d);
    assert!(!d.is_empty(), "division by zero polynomial");
    if r.len() < d.len() {
        return (Vec::new(), r);
    }
    let dl = d.len() - 1;
    let lead = d[dl].clone();
    let mut quot = vec![Q::zero(); r.len() - dl];
    for i in (0..quot.len()).rev() {
        let c = &r[i + dl] / &lead;
        if !c.is_zero() {
            for (j, dj) in d.iter().enumerate() {
                r[i + j] -= &c * dj;
            }
        }
        quot[i] = c;
    }
    r.truncate(dl);
    trim(&mut r);
    (quot, r)
}

fn dense_gcd(a: &[Q], b: &[Q]) -> Vec<Q> {
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    trim(&mut a);
    trim(&mut b);
    while !b.is_empty() {
        let (_, r) = dense_divmod(&a, &b);
        a = b;
        b = r;
    }
    if let Some(lead) = a.last().cloned() {
        for c in a.iter_mut() {
            *c = &*c / &lead;
        }
    }
    a
}

impl Neg for LaurentPoly {
    type Output = LaurentPoly;
    fn neg(self) -> LaurentPoly {
        -&self
    }
}

impl Neg for &LaurentPoly {
    type Output = LaurentPoly;
    fn neg(self) -> LaurentPoly {
        LaurentPoly { coeffs: self.coeffs.iter().map(|(e, c)| (*e, -c)).collect() }
    }
}

impl Add for &LaurentPoly {
    type Output = LaurentPoly;
    fn add(self, rhs: &LaurentPoly) -> LaurentPoly {
        let mut out = self.clone();
        for (e, c) in &rhs.coeffs {
            out.add_term(*e, c.clone());
        }
        out
    }
}

impl Sub for &LaurentPoly {
    type Output = LaurentPoly;
    fn sub(self, rhs: &LaurentPoly) -> LaurentPoly {
        let mut out = self.clone();
        for (e, c) in &rhs.coeffs {
            out.add_term(*e, -c);
        }
        out
    }
}

impl Mul for &LaurentPoly {
    type Output = LaurentPoly;
    fn mul(self, rhs: &LaurentPoly) -> LaurentPoly {
        let mut out = LaurentPoly::zero();
        for (e1, c1) in &self.coeffs {
            for (e2, c2) in &rhs.coeffs {
                out.add_term(e1 + e2, c1 * c2);
            }
        }
        out
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident, $t:ty) => {
        impl $tr<$t> for $t {
            type Output = $t;
            fn $m(self, rhs: $t) -> $t {
                (&self).$m(&rhs)
            }
        }
        impl $tr<&$t> for $t {
            type Output = $t;
            fn $m(self, rhs: &$t) -> $t {
                (&self).$m(rhs)
            }
        }
        impl $tr<$t> for &$t {
            type Output = $t;
            fn $m(self, rhs: $t) -> $t {
                self.$m(&rhs)
            }
        }
    };
}

forward_owned!(Add, add, LaurentPoly);
forward_owned!(Sub, sub, LaurentPoly);
forward_owned!(Mul, mul, LaurentPoly);

impl From<Q> for LaurentPoly {
    fn from(c: Q) -> Self {
        LaurentPoly::constant(c)
    }
}

impl From<i64> for LaurentPoly {
    fn from(c: i64) -> Self {
        LaurentPoly::constant(qi(c))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LpOp {
    Add,
    Sub,
    Mul,
}

pub fn lp_arith(p: &LaurentPoly, r: &LaurentPoly, op: LpOp) -> LaurentPoly {
    match op {
        LpOp::Add => p + r,
        LpOp::Sub => p - r,
        LpOp::Mul => p * r,
    }
}

pub fn invert_variable(p: &LaurentPoly) -> LaurentPoly {
    p.invert_variable()
}

/// `(max - min, sign)` where the sign is the ± of
/// `X^{max+min} p(1/X) = ± p(X)`. Shifting `p` by a power of `X` changes
/// neither value.
pub fn diameter_and_sign(p: &LaurentPoly) -> Result<(i64, Option<Sign>), LaurentError> {
    match (p.min_exp(), p.max_exp()) {
        (Some(lo), Some(hi)) => Ok((hi - lo, p.palindromic_sign())),
        _ => Err(LaurentError::UndefinedDiameter),
    }
}

// ---------------------------------------------------------------------------
// Text form

fn fmt_q(c: &Q) -> String {
    if c.is_integer() {
        c.numer().to_string()
    } else {
        format!("{}/{}", c.numer(), c.denom())
    }
}

impl fmt::Display for LaurentPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        for (i, (e, c)) in self.coeffs.iter().enumerate() {
            let neg = c.is_negative();
            let abs = c.abs();
            match (i, neg) {
                (0, true) => f.write_str("-")?,
                (0, false) => {}
                (_, true) => f.write_str(" - ")?,
                (_, false) => f.write_str(" + ")?,
            }
            let var = match *e {
                0 => String::new(),
                1 => "X".to_string(),
                k => format!("X^{k}"),
            };
            if *e == 0 {
                f.write_str(&fmt_q(&abs))?;
            } else if abs.is_one() {
                f.write_str(&var)?;
            } else {
                write!(f, "{}*{}", fmt_q(&abs), var)?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for LaurentPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "LaurentPoly({self})")
    }
}

struct Lexer<'a> {
    s: &'a [u8],
    i: usize,
}

impl<'a> Lexer<'a> {
    fn skip_ws(&mut self) {
        while self.i < self.s.len() && self.s[self.i].is_ascii_whitespace() {
            self.i += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.s.get(self.i).copied()
    }

    fn eat(&mut self, b: u8) -> bool {
        if self.peek() == Some(b) {
            self.i += 1;
            true
        } else {
            false
        }
    }

    fn err(&self, what: &str) -> LaurentError {
        LaurentError::Parse(format!("{what} at byte {}", self.i))
    }

    fn uint(&mut self) -> Result<BigInt, LaurentError> {
        self.skip_ws();
        let start = self.i;
        while self.i < self.s.len() && self.s[self.i].is_ascii_digit() {
            self.i += 1;
        }
        if start == self.i {
            return Err(self.err("expected digits"));
        }
        let txt = std::str::from_utf8(&self.s[start..self.i]).map_err(|_| self.err("utf8"))?;
        txt.parse::<BigInt>().map_err(|_| self.err("bad integer"))
    }

    fn exponent(&mut self) -> Result<i64, LaurentError> {
        let close = if self.eat(b'{') {
            Some(b'}')
        } else if self.eat(b'(') {
            Some(b')')
        } else {
            None
        };
        let neg = self.eat(b'-');
        let v = self.uint()?;
        let v: i64 = v.try_into().map_err(|_| self.err("exponent overflow"))?;
        if let Some(c) = close {
            if !self.eat(c) {
                return Err(self.err("unclosed exponent"));
            }
        }
        Ok(if neg { -v } else { v })
    }

    /// One unsigned term: `c`, `c*X^e`, `X^e`.
    fn term(&mut self) -> Result<(i64, Q), LaurentError> {
        let mut coef = Q::one();
        let mut has_coef = false;
        if self.peek().is_some_and(|b| b.is_ascii_digit()) {
            let n = self.uint()?;
            let d = if self.eat(b'/') { self.uint()? } else { BigInt::one() };
            if d.is_zero() {
                return Err(self.err("zero denominator"));
            }
            coef = Q::new(n, d);
            has_coef = true;
            if !self.eat(b'*') {
                return Ok((0, coef));
            }
        }
        if self.eat(b'X') {
            let e = if self.eat(b'^') { self.exponent()? } else { 1 };
            Ok((e, coef))
        } else if has_coef {
            Err(self.err("expected X after '*'"))
        } else {
            Err(self.err("expected term"))
        }
    }

    fn poly(&mut self) -> Result<LaurentPoly, LaurentError> {
        let mut out = LaurentPoly::zero();
        let mut neg = self.eat(b'-');
        if !neg {
            self.eat(b'+');
        }
        loop {
            let (e, c) = self.term()?;
            out.add_term(e, if neg { -c } else { c });
            if self.eat(b'+') {
                neg = false;
            } else if self.eat(b'-') {
                neg = true;
            } else {
                return Ok(out);
            }
        }
    }
}

impl FromStr for LaurentPoly {
    type Err = LaurentError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut lx = Lexer { s: s.as_bytes(), i: 0 };
        let p = lx.poly()?;
        if lx.peek().is_some() {
            return Err(lx.err("trailing input"));
        }
        Ok(p)
    }
}

impl Serialize for LaurentPoly {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for LaurentPoly {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

// ---------------------------------------------------------------------------
// Rational functions

/// `numerator / denominator` with a nonzero denominator.
#[derive(Clone)]
pub struct RationalFn {
    num: LaurentPoly,
    den: LaurentPoly,
}

impl RationalFn {
    pub fn new(num: LaurentPoly, den: LaurentPoly) -> Result<Self, LaurentError> {
        if den.is_zero() {
            return Err(LaurentError::ZeroDenominator);
        }
        Ok(RationalFn { num, den })
    }

    pub fn from_poly(p: LaurentPoly) -> Self {
        RationalFn { num: p, den: LaurentPoly::one() }
    }

    pub fn zero() -> Self {
        Self::from_poly(LaurentPoly::zero())
    }

    pub fn one() -> Self {
        Self::from_poly(LaurentPoly::one())
    }

    pub fn constant(c: Q) -> Self {
        Self::from_poly(LaurentPoly::constant(c))
    }

    /// `1/p`.
    pub fn recip_poly(p: LaurentPoly) -> Result<Self, LaurentError> {
        Self::new(LaurentPoly::one(), p)
    }

    pub fn numerator(&self) -> &LaurentPoly {
        &self.num
    }

    pub fn denominator(&self) -> &LaurentPoly {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn recip(&self) -> Result<Self, LaurentError> {
        Self::new(self.den.clone(), self.num.clone())
    }

    pub fn scale(&self, c: &Q) -> Self {
        RationalFn { num: self.num.scale(c), den: self.den.clone() }
    }

    pub fn shift(&self, k: i64) -> Self {
        RationalFn { num: self.num.shift(k), den: self.den.clone() }
    }

    pub fn invert_variable(&self) -> Self {
        RationalFn { num: self.num.invert_variable(), den: self.den.invert_variable() }
    }

    pub fn compose_power(&self, k: i64) -> Self {
        RationalFn { num: self.num.compose_power(k), den: self.den.compose_power(k) }
    }

    /// Cancel common factors and fix the unit: the denominator becomes a
    /// polynomial with constant term 1. Equal values normalize identically.
    pub fn normalize(&self) -> Self {
        if self.num.is_zero() {
            return Self::zero();
        }
        let (nk, n) = self.num.split_dense();
        let (dk, d) = self.den.split_dense();
        let g = dense_gcd(&n, &d);
        let (n, _) = dense_divmod(&n, &g);
        let (d, _) = dense_divmod(&d, &g);
        let c0 = d[0].clone();
        let num = LaurentPoly::from_dense(&n).scale(&c0.recip()).shift(nk - dk);
        let den = LaurentPoly::from_dense(&d).scale(&c0.recip());
        RationalFn { num, den }
    }

    /// The Laurent polynomial this equals, if it is one.
    pub fn as_laurent(&self) -> Option<LaurentPoly> {
        self.num.div_exact(&self.den)
    }

    /// `c` with `self = c * other`, if the ratio is a nonzero constant.
    pub fn scalar_ratio(&self, other: &RationalFn) -> Option<Q> {
        let (c, k) = self.monomial_ratio(other)?;
        (k == 0).then_some(c)
    }

    /// `(c, k)` with `self = c X^k other`, if the ratio is a monomial.
    pub fn monomial_ratio(&self, other: &RationalFn) -> Option<(Q, i64)> {
        if self.is_zero() || other.is_zero() {
            return None;
        }
        let r = (self / other).normalize();
        if r.den.is_one_poly() && r.num.is_monomial() {
            let (e, c) = r.num.terms().next()?;
            Some((c.clone(), e))
        } else {
            None
        }
    }

    /// Equal up to a nonzero scalar. Both zero also counts.
    pub fn proportional(&self, other: &RationalFn) -> bool {
        match (self.is_zero(), other.is_zero()) {
            (true, true) => true,
            (false, false) => self.scalar_ratio(other).is_some(),
            _ => false,
        }
    }

    pub fn eval(&self, x: &Q) -> Option<Q> {
        let d = self.den.eval(x);
        if d.is_zero() {
            None
        } else {
            Some(self.num.eval(x) / d)
        }
    }
}

impl LaurentPoly {
    fn is_one_poly(&self) -> bool {
        self.len() == 1 && self.coeff(0).is_one()
    }
}

/// Power-series coefficients of `r` around `X = 0`.
///
/// Returns `(start, [c_0..=c_order])` with `r = X^start (c_0 + c_1 X + ...)`.
pub fn series_expand(r: &RationalFn, order: usize) -> Result<(i64, Vec<Q>), LaurentError> {
    if r.den.is_zero() {
        return Err(LaurentError::ZeroDenominator);
    }
    if r.num.is_zero() {
        return Ok((0, vec![Q::zero(); order + 1]));
    }
    let (nk, n) = r.num.split_dense();
    let (dk, d) = r.den.split_dense();
    let d0 = d[0].clone();
    let mut out: Vec<Q> = Vec::with_capacity(order + 1);
    for k in 0..=order {
        let mut acc = n.get(k).cloned().unwrap_or_else(Q::zero);
        for j in 1..d.len().min(k + 1) {
            acc -= &d[j] * &out[k - j];
        }
        out.push(acc / &d0);
    }
    Ok((nk - dk, out))
}

impl PartialEq for RationalFn {
    fn eq(&self, other: &Self) -> bool {
        &self.num * &other.den == &other.num * &self.den
    }
}

impl Eq for RationalFn {}

impl Neg for &RationalFn {
    type Output = RationalFn;
    fn neg(self) -> RationalFn {
        RationalFn { num: -&self.num, den: self.den.clone() }
    }
}

impl Neg for RationalFn {
    type Output = RationalFn;
    fn neg(self) -> RationalFn {
        -&self
    }
}

impl Add for &RationalFn {
    type Output = RationalFn;
    fn add(self, rhs: &RationalFn) -> RationalFn {
        if self.den == rhs.den {
            return RationalFn { num: &self.num + &rhs.num, den: self.den.clone() };
        }
        RationalFn {
            num: &self.num * &rhs.den + &rhs.num * &self.den,
            den: &self.den * &rhs.den,
        }
        .normalize()
    }
}

impl Sub for &RationalFn {
    type Output = RationalFn;
    fn sub(self, rhs: &RationalFn) -> RationalFn {
        self + &(-rhs)
    }
}

impl Mul for &RationalFn {
    type Output = RationalFn;
    fn mul(self, rhs: &RationalFn) -> RationalFn {
        RationalFn { num: &self.num * &rhs.num, den: &self.den * &rhs.den }.normalize()
    }
}

impl Div for &RationalFn {
    type Output = RationalFn;
    /// Panics when `rhs` is zero.
    fn div(self, rhs: &RationalFn) -> RationalFn {
        assert!(!rhs.is_zero(), "division by the zero rational function");
        RationalFn { num: &self.num * &rhs.den, den: &self.den * &rhs.num }.normalize()
    }
}

forward_owned!(Add, add, RationalFn);
forward_owned!(Sub, sub, RationalFn);
forward_owned!(Mul, mul, RationalFn);
forward_owned!(Div, div, RationalFn);

impl From<LaurentPoly> for RationalFn {
    fn from(p: LaurentPoly) -> Self {
        RationalFn::from_poly(p)
    }
}

impl fmt::Display for RationalFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({})/({})", self.num, self.den)
    }
}

impl fmt::Debug for RationalFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "RationalFn({self})")
    }
}

impl FromStr for RationalFn {
    type Err = LaurentError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut lx = Lexer { s: s.as_bytes(), i: 0 };
        if lx.peek() != Some(b'(') {
            let p = lx.poly()?;
            if lx.peek().is_some() {
                return Err(lx.err("trailing input"));
            }
            return Ok(RationalFn::from_poly(p));
        }
        lx.eat(b'(');
        let num = lx.poly()?;
        if !lx.eat(b')') {
            return Err(lx.err("expected ')'"));
        }
        let den = if lx.eat(b'/') {
            if !lx.eat(b'(') {
                return Err(lx.err("expected '('"));
            }
            let d = lx.poly()?;
            if !lx.eat(b')') {
                return Err(lx.err("expected ')'"));
            }
            d
        } else {
            LaurentPoly::one()
        };
        if lx.peek().is_some() {
            return Err(lx.err("trailing input"));
        }
        RationalFn::new(num, den)
    }
}

impl Serialize for RationalFn {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("RationalFn", 2)?;
        st.serialize_field("numerator", &self.num.to_string())?;
        st.serialize_field("denominator", &self.den.to_string())?;
        st.end()
    }
}

impl<'de> Deserialize<'de> for RationalFn {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Raw {
            numerator: LaurentPoly,
            denominator: LaurentPoly,
        }
        let raw = Raw::deserialize(d)?;
        RationalFn::new(raw.numerator, raw.denominator).map_err(serde::de::Error::custom)
    }
}


/// Serde adapter for `Q` as a `"n/d"` string.
pub mod serde_q {
    use super::Q;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &Q, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&v.to_string())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Q, D::Error> {
        let s = String::deserialize(d)?;
        s.trim().parse::<Q>().map_err(serde::de::Error::custom)
    }
}
