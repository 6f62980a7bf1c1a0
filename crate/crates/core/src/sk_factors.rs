//! Local Saito-Kurokawa data: Bessel model existence, minimal paramodular
//! level and sign, Langlands factors, regular L-factor and newform zetas.
//!
//! Convention: `L(s, St)^{-1} = 1 - X'` and `L(s, St^JL)^{-1} = 1 - X'`.
//! `chi St` with `chi` unramified quadratic has `L^{-1} = 1 + X'`.

use std::fmt;
use std::str::FromStr;

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::laurent::{AmbientParams, LaurentError, LaurentPoly, RationalFn, Sign, Q};
use crate::localfield::{QuadCase, QuadExtData};
use crate::paramodular::Flavor;
use crate::zeta_engine::{
    ps_zeta, raise_level, solve_recursion_r, solve_recursion_u, zeta_polynomial, LevelOp,
    ZetaError, ZetaPolynomial, ZetaProfile,
};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SkError {
    #[error("invalid local type: {0}")]
    InvalidTau(String),
    #[error("SK(tau^JL) needs a discrete series tau")]
    NotDiscrete,
    #[error("the Bessel model is zero")]
    NoModel,
    #[error("not determined: {0}")]
    NotDetermined(String),
    #[error("N_pi = {n} is not divisible by f = {f}")]
    NonIntegral { n: i64, f: i64 },
    #[error(transparent)]
    Zeta(#[from] ZetaError),
    #[error(transparent)]
    Laurent(#[from] LaurentError),
    #[error("internal consistency failure: {0}")]
    Internal(String),
}

type Result<T> = std::result::Result<T, SkError>;

/// Local component `tau` of `PGL(2)`; conductor and root number are inputs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TauLocalType {
    UnramifiedPrincipal {
        #[serde(with = "crate::laurent::serde_q")]
        a: Q,
    },
    RamifiedPrincipal { n_tau: u32, eps_tau: Sign },
    Steinberg,
    /// `chi_L St` for the quadratic field `L` of case `chi_case`.
    TwistedSteinberg { chi_case: QuadCase, n_tau: u32, eps_tau: Sign },
    Supercuspidal { n_tau: u32, eps_tau: Sign },
}

impl TauLocalType {
    pub fn validate(&self) -> Result<()> {
        match self {
            TauLocalType::UnramifiedPrincipal { a } if a.is_zero() => {
                Err(SkError::InvalidTau("Satake parameter must be nonzero".into()))
            }
            TauLocalType::RamifiedPrincipal { n_tau, .. } | TauLocalType::Supercuspidal { n_tau, .. }
                if *n_tau < 2 =>
            {
                Err(SkError::InvalidTau(format!("n_tau = {n_tau} < 2")))
            }
            TauLocalType::TwistedSteinberg { chi_case, n_tau, eps_tau } => {
                if chi_case.is_unramified_field() {
                    if *n_tau != 1 || *eps_tau != Sign::Plus {
                        return Err(SkError::InvalidTau("unramified chi St has n_tau = 1, eps_tau = +".into()));
                    }
                } else if chi_case.is_ramified() {
                    if *n_tau < 2 || n_tau % 2 != 0 {
                        return Err(SkError::InvalidTau(format!("ramified chi St has even n_tau >= 2, got {n_tau}")));
                    }
                } else {
                    return Err(SkError::InvalidTau("chi_L needs a quadratic field L".into()));
                }
                Ok(())
            }
            _ => Ok(()),
        }
    }

    pub fn n_tau(&self) -> u32 {
        match self {
            TauLocalType::UnramifiedPrincipal { .. } => 0,
            TauLocalType::Steinberg => 1,
            TauLocalType::RamifiedPrincipal { n_tau, .. }
            | TauLocalType::TwistedSteinberg { n_tau, .. }
            | TauLocalType::Supercuspidal { n_tau, .. } => *n_tau,
        }
    }

    pub fn eps_tau(&self) -> Sign {
        match self {
            TauLocalType::UnramifiedPrincipal { .. } => Sign::Plus,
            TauLocalType::Steinberg => Sign::Minus,
            TauLocalType::RamifiedPrincipal { eps_tau, .. }
            | TauLocalType::TwistedSteinberg { eps_tau, .. }
            | TauLocalType::Supercuspidal { eps_tau, .. } => *eps_tau,
        }
    }

    pub fn is_discrete(&self) -> bool {
        matches!(
            self,
            TauLocalType::Steinberg | TauLocalType::TwistedSteinberg { .. } | TauLocalType::Supercuspidal { .. }
        )
    }

    /// `L(s, tau)^{-1}`.
    pub fn l_inverse(&self, params: &AmbientParams) -> LaurentPoly {
        let one = LaurentPoly::one();
        match self {
            TauLocalType::UnramifiedPrincipal { a } => {
                let l1 = &one - &params.x().scale(a);
                let l2 = &one - &params.xp().scale(&a.recip());
                &l1 * &l2
            }
            TauLocalType::Steinberg => &one - &params.xp(),
            TauLocalType::TwistedSteinberg { chi_case, .. } if chi_case.is_unramified_field() => &one + &params.xp(),
            _ => one,
        }
    }

    pub fn label(&self) -> &'static str {
        match self {
            TauLocalType::UnramifiedPrincipal { .. } => "unramified principal series",
            TauLocalType::RamifiedPrincipal { .. } => "ramified principal series",
            TauLocalType::Steinberg => "Steinberg",
            TauLocalType::TwistedSteinberg { .. } => "twisted Steinberg",
            TauLocalType::Supercuspidal { .. } => "supercuspidal",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Member {
    #[serde(rename = "sk")]
    SkTau,
    #[serde(rename = "jl")]
    SkTauJl,
}

impl fmt::Display for Member {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Member::SkTau => "sk",
            Member::SkTauJl => "jl",
        })
    }
}

impl FromStr for Member {
    type Err = SkError;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "sk" | "SK_tau" => Ok(Member::SkTau),
            "jl" | "SK_tauJL" => Ok(Member::SkTauJl),
            _ => Err(SkError::InvalidTau(format!("unknown member {s}"))),
        }
    }
}

/// Three-valued existence answer.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "status", content = "reason", rename_all = "snake_case")]
pub enum Existence {
    Exists,
    NotExists,
    NotDetermined(String),
}

impl Existence {
    pub fn as_bool(&self) -> Option<bool> {
        match self {
            Existence::Exists => Some(true),
            Existence::NotExists => Some(false),
            Existence::NotDetermined(_) => None,
        }
    }
}

/// One local configuration `(tau, member, E)`.
#[derive(Debug, Clone)]
pub struct LocalSKData {
    pub tau: TauLocalType,
    pub member: Member,
    pub bessel: QuadExtData,
    /// Whether `tau` itself (rather than `tau^JL`) has a nonzero `E^x`-period.
    /// Only consulted in case R for discrete `tau` with `n_tau >= 2`.
    pub tau_has_period: Option<bool>,
    pub assume_dyadic_gamma: bool,
}

impl LocalSKData {
    pub fn new(tau: TauLocalType, member: Member, bessel: QuadExtData) -> Result<Self> {
        tau.validate()?;
        if member == Member::SkTauJl && !tau.is_discrete() {
            return Err(SkError::NotDiscrete);
        }
        Ok(LocalSKData { tau, member, bessel, tau_has_period: None, assume_dyadic_gamma: true })
    }

    pub fn with_period(mut self, bit: Option<bool>) -> Self {
        self.tau_has_period = bit;
        self
    }

    pub fn with_dyadic_gamma(mut self, on: bool) -> Self {
        self.assume_dyadic_gamma = on;
        self
    }

    fn f(&self) -> i64 {
        self.bessel.f as i64
    }

    fn is_split(&self) -> bool {
        self.bessel.case == QuadCase::Split
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LanglandsFactors {
    #[serde(rename = "L_phi_inverse")]
    pub l_phi_inverse: LaurentPoly,
    #[serde(rename = "N_pi")]
    pub n_pi: i64,
    #[serde(rename = "E_pi")]
    pub e_pi: Sign,
}

/// `L(s, phi_pi)^{-1}`, the conductor exponent `N_pi` and root number `E_pi`.
pub fn langlands_factors(tau: &TauLocalType, member: Member, params: &AmbientParams) -> Result<LanglandsFactors> {
    tau.validate()?;
    let one = LaurentPoly::one();
    let lt = tau.l_inverse(params);
    let xp = &one - &params.xp();
    let n = tau.n_tau() as i64;
    match member {
        Member::SkTau => {
            let x = &one - &params.x();
            Ok(LanglandsFactors { l_phi_inverse: &(&lt * &xp) * &x, n_pi: n, e_pi: tau.eps_tau() })
        }
        Member::SkTauJl => {
            if !tau.is_discrete() {
                return Err(SkError::NotDiscrete);
            }
            Ok(LanglandsFactors { l_phi_inverse: &lt * &xp, n_pi: n + 1, e_pi: tau.eps_tau().flip() })
        }
    }
}

/// Existence of a nonzero Bessel model for the member of the packet.
pub fn bessel_exists(data: &LocalSKData) -> Existence {
    let case = data.bessel.case;
    let n = data.tau.n_tau();
    let jl = data.member == Member::SkTauJl;
    if let TauLocalType::TwistedSteinberg { chi_case, .. } = &data.tau {
        if data.is_split() || *chi_case != case {
            return Existence::NotDetermined("chi_L St with L different from E".into());
        }
    }
    if jl && data.bessel.p == 2 && !data.assume_dyadic_gamma {
        return Existence::NotDetermined("dyadic gamma-factor assumption is off".into());
    }
    if data.is_split() {
        return if jl { Existence::NotExists } else { Existence::Exists };
    }
    if n == 0 {
        return Existence::Exists;
    }
    if !jl && n == 1 {
        return Existence::NotExists;
    }
    if case.is_unramified_field() {
        let even = n % 2 == 0;
        return if even != jl { Existence::Exists } else { Existence::NotExists };
    }
    match (&data.tau, jl) {
        (TauLocalType::RamifiedPrincipal { .. }, _) => Existence::Exists,
        (TauLocalType::Steinberg, true) => Existence::Exists,
        _ => match data.tau_has_period {
            Some(bit) => {
                if bit != jl {
                    Existence::Exists
                } else {
                    Existence::NotExists
                }
            }
            None => Existence::NotDetermined("case R dichotomy bit not supplied".into()),
        },
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MinimalLevel {
    #[serde(rename = "M_pi")]
    pub m_pi: i64,
    pub eps_pi: Sign,
    pub strict_space: String,
}

/// Group and zeta data of the strict newform, before the PS assembly.
struct StrictShape {
    flavor: Flavor,
    level_m: u32,
    kappa: Option<Sign>,
}

fn strict_shape(data: &LocalSKData) -> Result<StrictShape> {
    let n = data.tau.n_tau();
    let case = data.bessel.case;
    let kappa = case.is_unramified_field().then_some(Sign::Plus);
    let s = |flavor, level_m, kappa| Ok(StrictShape { flavor, level_m, kappa });
    if data.is_split() {
        return s(Flavor::Complete, n, None);
    }
    match (data.member, &data.tau) {
        (Member::SkTau, _) if n == 0 => s(Flavor::Complete, 0, None),
        (Member::SkTau, _) if case.is_unramified_field() => s(Flavor::Sharp, n / 2 - 1, kappa),
        (Member::SkTau, _) => s(Flavor::Sharp, n - 1, None),
        (Member::SkTauJl, TauLocalType::Steinberg) => s(Flavor::Plain, if kappa.is_some() { 0 } else { 1 }, kappa),
        (Member::SkTauJl, TauLocalType::TwistedSteinberg { .. }) if case.is_unramified_field() => {
            s(Flavor::Complete, 1, None)
        }
        (Member::SkTauJl, _) if case.is_unramified_field() => s(Flavor::Plain, (n - 1) / 2, kappa),
        (Member::SkTauJl, _) => s(Flavor::Plain, n, None),
    }
}

fn space_tag(shape: &StrictShape, eps: Sign) -> String {
    let index = match shape.flavor {
        Flavor::Complete => 2 * shape.level_m,
        _ => 2 * shape.level_m + 1,
    };
    let kappa = shape.kappa.filter(|_| shape.flavor != Flavor::Complete).map(|k| format!(",{}", k.symbol()));
    let sharp = if shape.flavor == Flavor::Sharp { "sharp," } else { "" };
    format!("B_{{{index}{}}}^{{{sharp}{}}}", kappa.unwrap_or_default(), eps.symbol())
}

fn require_exists(data: &LocalSKData) -> Result<()> {
    match bessel_exists(data) {
        Existence::Exists => Ok(()),
        Existence::NotExists => Err(SkError::NoModel),
        Existence::NotDetermined(r) => Err(SkError::NotDetermined(r)),
    }
}

/// `M_pi = N_pi / f`, the sign of the newform and its strict space.
pub fn minimal_level(data: &LocalSKData) -> Result<MinimalLevel> {
    require_exists(data)?;
    let lf = langlands_factors(&data.tau, data.member, &data.bessel.params())?;
    let f = data.f();
    if lf.n_pi % f != 0 {
        return Err(SkError::NonIntegral { n: lf.n_pi, f });
    }
    let eps_pi = match data.member {
        Member::SkTau => data.tau.eps_tau(),
        Member::SkTauJl => data.tau.eps_tau().flip(),
    };
    let shape = strict_shape(data)?;
    Ok(MinimalLevel { m_pi: lf.n_pi / f, eps_pi, strict_space: space_tag(&shape, eps_pi) })
}

/// `L^reg(s, pi)`.
pub fn regular_l(data: &LocalSKData) -> RationalFn {
    let params = data.bessel.params();
    let one = LaurentPoly::one();
    let x = &one - &params.x();
    let xp = &one - &params.xp();
    let lt = data.tau.l_inverse(&params);
    match data.member {
        Member::SkTau if data.is_split() => RationalFn::new(xp, &lt * &x).expect("nonzero"),
        Member::SkTau => RationalFn::recip_poly(&lt * &x).expect("nonzero"),
        Member::SkTauJl => match data.tau {
            TauLocalType::Steinberg => RationalFn::recip_poly(xp).expect("nonzero"),
            _ => RationalFn::one(),
        },
    }
}

/// Strict newform: its zetas, the PS zeta at `M_pi` and `P_{M_pi}`.
#[derive(Debug, Clone, Serialize)]
pub struct Newform {
    pub profile: ZetaProfile,
    pub level: MinimalLevel,
    pub factors: LanglandsFactors,
    #[serde(rename = "PS_zeta")]
    pub ps_zeta: RationalFn,
    pub poly: ZetaPolynomial,
}

fn zeta_shape(data: &LocalSKData, shape: &StrictShape) -> Result<(RationalFn, Option<RationalFn>)> {
    let params = data.bessel.params();
    let q = params.q.clone();
    let q2 = &q * &q;
    let lreg = regular_l(data);
    let one = LaurentPoly::one();
    if data.is_split() || shape.flavor == Flavor::Complete {
        let z = if !data.is_split() && data.member == Member::SkTau && data.bessel.case.is_unramified_field() {
            &lreg * &RationalFn::from_poly(&one + &params.xp())
        } else {
            lreg
        };
        return Ok((z, None));
    }
    let u = data.bessel.case.is_unramified_field();
    let two_q2 = &q2 * Q::from_integer(2.into());
    match (data.member, &data.tau) {
        (Member::SkTau, _) if u => {
            Ok((solve_recursion_u(&params, &(&q2 + &q), &Q::one(), &q.recip()), None))
        }
        (Member::SkTau, _) => {
            let sol = solve_recursion_r(&params, &two_q2, &Q::one(), &q.recip(), &Q::one(), &q.recip())?;
            Ok((sol.zeta, Some(sol.zeta_star)))
        }
        (Member::SkTauJl, TauLocalType::Steinberg) if u => {
            Ok((solve_recursion_u(&params, &(&q2 + &q), &Q::one(), &q2.recip()), None))
        }
        (Member::SkTauJl, TauLocalType::Steinberg) => {
            let sol = solve_recursion_r(&params, &two_q2, &Q::one(), &q2.recip(), &q, &q.recip())?;
            Ok((sol.zeta, Some(sol.zeta_star)))
        }
        (Member::SkTauJl, _) if u => Ok((RationalFn::one(), None)),
        (Member::SkTauJl, _) => {
            let zs = RationalFn::new(LaurentPoly::one(), LaurentPoly::monomial(q, 1))?;
            Ok((RationalFn::one(), Some(zs)))
        }
    }
}

/// Zetas of the strict newform, checked against `L(s, phi_pi)`.
pub fn newform_profile(data: &LocalSKData) -> Result<Newform> {
    let level = minimal_level(data)?;
    let params = data.bessel.params();
    let factors = langlands_factors(&data.tau, data.member, &params)?;
    let shape = strict_shape(data)?;
    let (zeta, zeta_star) = zeta_shape(data, &shape)?;
    let profile = ZetaProfile {
        zeta,
        zeta_star,
        flavor: shape.flavor,
        level_m: shape.level_m,
        sign_eps: level.eps_pi,
        kappa: shape.kappa,
    };
    let n = if shape.flavor == Flavor::Complete { shape.level_m as i64 } else { shape.level_m as i64 + 1 };
    if n != level.m_pi {
        return Err(SkError::Internal(format!("PS index {n} differs from M_pi = {}", level.m_pi)));
    }
    let ps = ps_zeta(&profile, n, &data.bessel)?;
    let l = RationalFn::recip_poly(factors.l_phi_inverse.clone())?;
    let poly = zeta_polynomial(&ps, &l, n)?;
    if !poly.poly.is_constant() || poly.poly.is_zero() {
        return Err(SkError::Internal(format!("P_M = {} is not a nonzero constant", poly.poly)));
    }
    let poly = ZetaPolynomial::new(poly.poly.scale(&poly.poly.coeff(0).recip()), n);
    Ok(Newform { profile, level, factors, ps_zeta: ps, poly })
}

/// Zeta polynomials of the oldforms `eta^a e^b beta` with `2a + b = k`.
pub fn oldform_polys(data: &LocalSKData, k: u32) -> Result<Vec<ZetaPolynomial>> {
    let nf = newform_profile(data)?;
    let params = data.bessel.params();
    let f = data.f();
    Ok((0..=k / 2)
        .map(|a| {
            let mut p = nf.poly.clone();
            for _ in 0..k - 2 * a {
                p = raise_level(&p, LevelOp::E, f, &params);
            }
            for _ in 0..a {
                p = raise_level(&p, LevelOp::Eta, f, &params);
            }
            p
        })
        .collect())
}

/// `dim B_{f (M_pi + k)} = floor(k / 2) + 1`.
pub fn oldform_dimension(data: &LocalSKData, k: u32) -> Result<usize> {
    require_exists(data)?;
    Ok(k as usize / 2 + 1)
}
