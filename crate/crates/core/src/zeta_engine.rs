//! Hecke recursions solved as rational functions in `X`, the canonical
//! Piatetski-Shapiro zetas built from them, zeta polynomials, and the
//! level raising operators.
//!
//! Coefficients follow `c_i = beta(u^(varpi)^i)`; the one-variable zeta is
//! `Z = sum q^i c_i X^i`, and likewise `Z* = sum_{i >= -1} q^i c*_i X^i`.

use std::collections::BTreeMap;

use num_traits::{One, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::laurent::{
    diameter_and_sign, series_expand, AmbientParams, LaurentError, LaurentPoly, RationalFn, Sign, Q,
};
use crate::localfield::{zeta_e_inverse, QuadExtData};
use crate::paramodular::Flavor;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ZetaError {
    #[error(transparent)]
    Laurent(#[from] LaurentError),
    #[error("Z* is required for the {0} flavor")]
    MissingZstar(Flavor),
    #[error("PS zeta index {n} is neither m = {m} nor m + 1")]
    BadIndex { n: i64, m: i64 },
    #[error("Z_n / L is not a Laurent polynomial: {0}")]
    NotLaurent(String),
    #[error("the coupled system is degenerate")]
    Degenerate,
}

type Result<T> = std::result::Result<T, ZetaError>;

/// Zetas of a paramodular form together with the group it is fixed by.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ZetaProfile {
    #[serde(rename = "Z")]
    pub zeta: RationalFn,
    #[serde(rename = "Zstar")]
    pub zeta_star: Option<RationalFn>,
    pub flavor: Flavor,
    pub level_m: u32,
    pub sign_eps: Sign,
    pub kappa: Option<Sign>,
}

impl ZetaProfile {
    pub fn complete(zeta: RationalFn, level_m: u32, sign_eps: Sign) -> Self {
        ZetaProfile { zeta, zeta_star: None, flavor: Flavor::Complete, level_m, sign_eps, kappa: None }
    }

    /// A flat-flavor strict newform: `Z* = -q^{-f} Z`.
    pub fn flat(zeta: RationalFn, level_m: u32, sign_eps: Sign, ctx: &QuadExtData) -> Self {
        let qf = Q::from_integer(ctx.residue_size().into());
        let zs = zeta.scale(&-qf.recip());
        ZetaProfile { zeta, zeta_star: Some(zs), flavor: Flavor::Flat, level_m, sign_eps, kappa: None }
    }

    /// `Z*` as used by the PS assembly: `Z` itself for complete groups.
    pub fn star(&self) -> Result<RationalFn> {
        match (&self.zeta_star, self.flavor) {
            (Some(z), _) => Ok(z.clone()),
            (None, Flavor::Complete) => Ok(self.zeta.clone()),
            (None, f) => Err(ZetaError::MissingZstar(f)),
        }
    }

    /// Lowest exponents allowed in the expansions of `Z` and `Z*`.
    pub fn expansion_floor(&self) -> (i64, i64) {
        match self.flavor {
            Flavor::Complete | Flavor::Flat => (0, 0),
            _ => (0, -1),
        }
    }
}

/// `P_m = Z_m / L` with its index.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ZetaPolynomial {
    #[serde(rename = "P")]
    pub poly: LaurentPoly,
    pub index_m: i64,
}

impl ZetaPolynomial {
    pub fn new(poly: LaurentPoly, index_m: i64) -> Self {
        ZetaPolynomial { poly, index_m }
    }

    pub fn diameter_and_sign(&self) -> Result<(i64, Option<Sign>)> {
        Ok(diameter_and_sign(&self.poly)?)
    }
}

fn lp(terms: &[(i64, Q)]) -> LaurentPoly {
    LaurentPoly::from_terms(terms.iter().cloned())
}

fn qpow(q: &Q, k: i64) -> Q {
    let r = num_traits::pow(q.clone(), k.unsigned_abs() as usize);
    if k < 0 {
        r.recip()
    } else {
        r
    }
}

fn qq(params: &AmbientParams) -> Q {
    params.q.clone()
}

/// `f_lambda(X) = 1 - lambda X / q^2 + X^2 / q`.
pub fn f_lambda(params: &AmbientParams, lambda: &Q) -> LaurentPoly {
    let q = qq(params);
    lp(&[(0, Q::one()), (1, -lambda / (&q * &q)), (2, q.recip())])
}

/// Solution of `lambda_kappa c_i = q^3 c_{i+1} + c_{i-1}` (`i >= 1`):
/// `(c_0 + (q c_1 - lambda_kappa c_0 / q^2) X) / f_{lambda_kappa}(X)`.
pub fn solve_recursion_u(params: &AmbientParams, lambda_kappa: &Q, c0: &Q, c1: &Q) -> RationalFn {
    let q = qq(params);
    let num = lp(&[(0, c0.clone()), (1, &q * c1 - lambda_kappa * c0 / (&q * &q))]);
    RationalFn::new(num, f_lambda(params, lambda_kappa)).expect("f_lambda has constant term 1").normalize()
}

/// `c_0 / (1 - mu X / q^2)`, the solution of `q^3 c_{i+1} = mu c_i`.
pub fn solve_first_order(params: &AmbientParams, mu: &Q, c0: &Q) -> RationalFn {
    let q = qq(params);
    let den = lp(&[(0, Q::one()), (1, -mu / (&q * &q))]);
    RationalFn::new(LaurentPoly::constant(c0.clone()), den).expect("nonzero").normalize()
}

/// Unreduced pieces of the case R system: `Z = Q / Delta`,
/// `Z* = R / (X Delta)`.
#[derive(Debug, Clone)]
pub struct CoupledSolution {
    pub q_num: LaurentPoly,
    pub r_num: LaurentPoly,
    pub delta: LaurentPoly,
    pub zeta: RationalFn,
    pub zeta_star: RationalFn,
}

/// Solve
/// `[[f, aX], [a X / q^2, f]] (Z, Z*) = (r_1, r_2)` with `a = q - 1`.
pub fn solve_recursion_r(
    params: &AmbientParams,
    lambda: &Q,
    c0: &Q,
    c1: &Q,
    cstar_m1: &Q,
    cstar_0: &Q,
) -> Result<CoupledSolution> {
    let q = qq(params);
    let a = &q - Q::one();
    let q2 = &q * &q;
    let q3 = &q2 * &q;
    let f = f_lambda(params, lambda);
    let r1 = lp(&[
        (0, c0 + &a * cstar_m1 / &q),
        (1, &a * cstar_0 - lambda * c0 / &q2 + &q * c1),
    ]);
    let r2 = lp(&[(0, cstar_0 - lambda * cstar_m1 / &q3), (-1, cstar_m1 / &q)]);
    let ax = LaurentPoly::monomial(a.clone(), 1);
    let ax_q2 = LaurentPoly::monomial(&a / &q2, 1);
    let delta = &(&f * &f) - &LaurentPoly::monomial(&a * &a / &q2, 2);
    if delta.is_zero() {
        return Err(ZetaError::Degenerate);
    }
    let q_num = &(&f * &r1) - &(&ax * &r2);
    let r_num = (&(&f * &r2) - &(&ax_q2 * &r1)).shift(1);
    let zeta = RationalFn::new(q_num.clone(), delta.clone())?.normalize();
    let zeta_star = RationalFn::new(r_num.clone(), delta.shift(1))?.normalize();
    Ok(CoupledSolution { q_num, r_num, delta, zeta, zeta_star })
}

/// Coefficients `c_i` (`i` from the expansion start) recovered from `Z`.
pub fn coefficients(params: &AmbientParams, z: &RationalFn, order: usize) -> Result<BTreeMap<i64, Q>> {
    let (start, cs) = series_expand(z, order)?;
    let q = qq(params);
    Ok(cs
        .into_iter()
        .enumerate()
        .map(|(k, c)| {
            let i = start + k as i64;
            (i, c / qpow(&q, i))
        })
        .collect())
}

fn at(m: &BTreeMap<i64, Q>, i: i64) -> Q {
    m.get(&i).cloned().unwrap_or_else(Q::zero)
}

/// `lambda_kappa c_i = q^3 c_{i+1} + c_{i-1}` for `1 <= i < order`.
pub fn check_recursion_u(params: &AmbientParams, z: &RationalFn, lambda_kappa: &Q, order: usize) -> Result<bool> {
    let c = coefficients(params, z, order + 1)?;
    let q3 = qpow(&qq(params), 3);
    Ok((1..order as i64).all(|i| lambda_kappa * at(&c, i) == &q3 * at(&c, i + 1) + at(&c, i - 1)))
}

/// Both coupled recursions of case R up to `order`.
pub fn check_recursion_r(
    params: &AmbientParams,
    z: &RationalFn,
    zs: &RationalFn,
    lambda: &Q,
    order: usize,
) -> Result<bool> {
    let c = coefficients(params, z, order + 2)?;
    let cs = coefficients(params, zs, order + 2)?;
    if c.keys().any(|&i| i < 0 && !at(&c, i).is_zero()) || cs.keys().any(|&i| i < -1 && !at(&cs, i).is_zero()) {
        return Ok(false);
    }
    let q = qq(params);
    let a = &q - Q::one();
    let q3 = qpow(&q, 3);
    let q2a = &q * &q * &a;
    let first = (1..order as i64)
        .all(|i| lambda * at(&c, i) == &q3 * at(&c, i + 1) + at(&c, i - 1) + &q2a * at(&cs, i));
    let second = (0..order as i64)
        .all(|i| lambda * at(&cs, i) == &q3 * at(&cs, i + 1) + at(&cs, i - 1) + &a * at(&c, i));
    Ok(first && second)
}

/// `zeta_E(s + 1/2)`.
pub fn zeta_e(ctx: &QuadExtData) -> RationalFn {
    RationalFn::recip_poly(zeta_e_inverse(ctx, &ctx.params())).expect("nonzero")
}

/// Canonical PS zeta `Z_n(s, beta)` for `n` in `{m, m + 1}`.
pub fn ps_zeta(profile: &ZetaProfile, n: i64, ctx: &QuadExtData) -> Result<RationalFn> {
    let m = profile.level_m as i64;
    if n != m && n != m + 1 {
        return Err(ZetaError::BadIndex { n, m });
    }
    let params = ctx.params();
    let q = qq(&params);
    let f = ctx.f as i64;
    let qf = qpow(&q, f);
    let one_plus_qf = &qf + Q::one();
    let ze = zeta_e(ctx);
    let z = &profile.zeta;
    if profile.flavor == Flavor::Complete {
        return Ok(if n == m {
            &ze * z
        } else {
            let raise = RationalFn::from_poly(lp(&[(0, Q::one()), (f, Q::one())])).scale(&one_plus_qf.recip());
            &(&ze * z) * &raise
        });
    }
    if let (Some(kappa), true) = (profile.kappa, ctx.case.is_unramified_field()) {
        let k = kappa.as_q();
        let den = if n == m {
            // 1 - kappa q X^{-1}
            lp(&[(0, Q::one()), (-1, -&k * &q)])
        } else {
            lp(&[(0, Q::one()), (1, -&k / &q)])
        };
        let q2 = &q * &q + Q::one();
        return Ok((z / &RationalFn::from_poly(den)).scale(&q2.recip()));
    }
    let zs = profile.star()?;
    let mixed = if n == m { &zs.scale(&qf) + z } else { &zs.shift(f) + z };
    Ok((&ze * &mixed).scale(&one_plus_qf.recip()))
}

/// `P_n = Z_n / L` as a Laurent polynomial.
pub fn zeta_polynomial(zn: &RationalFn, l: &RationalFn, n: i64) -> Result<ZetaPolynomial> {
    if l.is_zero() {
        return Err(ZetaError::NotLaurent("L is zero".into()));
    }
    let ratio = zn / l;
    match ratio.as_laurent() {
        Some(p) => Ok(ZetaPolynomial::new(p, n)),
        None => Err(ZetaError::NotLaurent(ratio.to_string())),
    }
}

/// `P(X^{-1}) = eps eps_pi X^{n_pi - f m} P(X)`.
pub fn check_functional_equation(p: &ZetaPolynomial, eps: Sign, eps_pi: Sign, n_pi: i64, f: i64) -> bool {
    let lhs = p.poly.invert_variable();
    let rhs = p.poly.shift(n_pi - f * p.index_m).scale(&(eps * eps_pi).as_q());
    lhs == rhs
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum LevelOp {
    /// `e_m`: multiply by `q^f (1 + X^f)`, index `+1`.
    E,
    /// `eta`: multiply by `(q X)^f`, index `+2`.
    Eta,
}

pub fn raise_level(p: &ZetaPolynomial, op: LevelOp, f: i64, params: &AmbientParams) -> ZetaPolynomial {
    let qf = params.q_pow(f);
    match op {
        LevelOp::E => {
            let factor = lp(&[(0, qf.clone()), (f, qf)]);
            ZetaPolynomial::new(&p.poly * &factor, p.index_m + 1)
        }
        LevelOp::Eta => ZetaPolynomial::new(p.poly.shift(f).scale(&qf), p.index_m + 2),
    }
}

/// Rank over `Q` of a family of Laurent polynomials.
pub fn laurent_rank(polys: &[LaurentPoly]) -> usize {
    let mut rows: Vec<BTreeMap<i64, Q>> =
        polys.iter().map(|p| p.terms().map(|(e, c)| (e, c.clone())).collect()).collect();
    let mut rank = 0;
    let mut used = vec![false; rows.len()];
    let exps: Vec<i64> = {
        let mut v: Vec<i64> = rows.iter().flat_map(|r| r.keys().copied()).collect();
        v.sort_unstable();
        v.dedup();
        v
    };
    for e in exps {
        let Some(piv) = (0..rows.len()).find(|&i| !used[i] && rows[i].get(&e).is_some_and(|c| !c.is_zero())) else {
            continue;
        };
        used[piv] = true;
        rank += 1;
        let prow = rows[piv].clone();
        let pc = prow[&e].clone();
        for (i, row) in rows.iter_mut().enumerate() {
            if i == piv {
                continue;
            }
            let Some(c) = row.get(&e).cloned() else { continue };
            if c.is_zero() {
                continue;
            }
            let factor = c / &pc;
            for (k, v) in &prow {
                let entry = row.entry(*k).or_insert_with(Q::zero);
                *entry -= &factor * v;
            }
        }
    }
    rank
}

/// Rank of `{eta^a e^b P_M : 2a + b = k}` with `P_M = 1`. Every member must
/// have reflection degree `f k` and sign `+`; otherwise the rank is `0`.
pub fn oldform_basis_rank(m: i64, k: u32, f: i64, params: &AmbientParams) -> usize {
    let base = ZetaPolynomial::new(LaurentPoly::one(), m);
    let mut family = Vec::new();
    for a in 0..=k / 2 {
        let b = k - 2 * a;
        let mut p = base.clone();
        for _ in 0..b {
            p = raise_level(&p, LevelOp::E, f, params);
        }
        for _ in 0..a {
            p = raise_level(&p, LevelOp::Eta, f, params);
        }
        let ok = p.index_m == m + k as i64
            && p.poly.reflection_degree() == Some(f * k as i64)
            && p.poly.palindromic_sign() == Some(Sign::Plus);
        if !ok {
            return 0;
        }
        family.push(p.poly);
    }
    laurent_rank(&family)
}

/// Compare `sum_i w_i (X^i + (1 - 1/q) sum_{j > i} X^j)` with the expansion
/// of `L (1 - X') / (1 - X)` up to `order`.
pub fn split_zeta_identity(l_tau: &RationalFn, params: &AmbientParams, order: usize) -> Result<bool> {
    let (start, w) = series_expand(l_tau, order)?;
    if l_tau.is_zero() {
        return Ok(true);
    }
    if start < 0 {
        return Err(LaurentError::NotDivisible.into());
    }
    let q = qq(params);
    let tail = Q::one() - q.recip();
    let mut omega = vec![Q::zero(); order + 1];
    for (k, c) in w.into_iter().enumerate() {
        let i = start as usize + k;
        if i <= order {
            omega[i] = c;
        }
    }
    let mut lhs = vec![Q::zero(); order + 1];
    let mut prefix = Q::zero();
    for j in 0..=order {
        lhs[j] = &omega[j] + &tail * &prefix;
        prefix += &omega[j];
    }
    let factor = RationalFn::new(
        lp(&[(0, Q::one()), (1, -q.recip())]),
        lp(&[(0, Q::one()), (1, -Q::one())]),
    )?;
    let (rs, rc) = series_expand(&(l_tau * &factor), order)?;
    let mut rhs = vec![Q::zero(); order + 1];
    for (k, c) in rc.into_iter().enumerate() {
        let i = rs + k as i64;
        if (0..=order as i64).contains(&i) {
            rhs[i as usize] = c;
        }
    }
    Ok(lhs == rhs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::laurent::{q, qi};
    use crate::localfield::{classify_case, QuadCase};
    use proptest::prelude::*;

    fn params(n: i64) -> AmbientParams {
        AmbientParams::from_int(n).unwrap()
    }

    fn rf(s: &str) -> RationalFn {
        s.parse().unwrap()
    }

    #[test]
    fn recursion_u_examples() {
        let p = params(3);
        let z = solve_recursion_u(&p, &qi(12), &qi(1), &q(1, 3));
        assert_eq!(z, rf("(1)/(1 - X)"));
        assert!(check_recursion_u(&p, &z, &qi(12), 20).unwrap());
        assert_eq!(solve_recursion_u(&p, &qi(0), &qi(1), &qi(0)), rf("(1)/(1 + 1/3*X^2)"));
        assert!(solve_recursion_u(&p, &qi(5), &qi(0), &qi(0)).is_zero());
    }

    #[test]
    fn recursion_r_examples() {
        for qv in [2, 3, 5] {
            let p = params(qv);
            let qq = qi(qv);
            let lam = &qq * &qq * qi(2);
            let sol = solve_recursion_r(&p, &lam, &qi(1), &qq.recip(), &qi(1), &qq.recip()).unwrap();
            assert!(sol.zeta.proportional(&rf("(1)/(1 - X)")));
            let expect_star = RationalFn::new(LaurentPoly::one(), lp(&[(1, qq.clone()), (2, -qq.clone())])).unwrap();
            assert!(sol.zeta_star.proportional(&expect_star));
            assert!(sol.zeta.scalar_ratio(&rf("(1)/(1 - X)")) == sol.zeta_star.scalar_ratio(&expect_star));
            assert!(check_recursion_r(&p, &sol.zeta, &sol.zeta_star, &lam, 20).unwrap());

            let vib = solve_recursion_r(&p, &lam, &qi(1), &(&qq * &qq).recip(), &qq, &qq.recip()).unwrap();
            let xp = lp(&[(0, Q::one()), (1, -qq.recip())]);
            assert!(vib.zeta.proportional(&RationalFn::recip_poly(xp.clone()).unwrap()));
            assert!(vib.zeta_star.proportional(&RationalFn::recip_poly(xp.shift(1)).unwrap()));
            assert!(check_recursion_r(&p, &vib.zeta, &vib.zeta_star, &lam, 20).unwrap());
        }
        let zero = solve_recursion_r(&params(3), &qi(4), &qi(0), &qi(0), &qi(0), &qi(0)).unwrap();
        assert!(zero.zeta.is_zero() && zero.zeta_star.is_zero());
    }

    #[test]
    fn ps_zeta_complete_shapes() {
        let c = classify_case(3, QuadCase::UI).unwrap();
        let prof = ZetaProfile::complete(RationalFn::one(), 1, Sign::Plus);
        assert!(ps_zeta(&prof, 1, &c).unwrap().proportional(&rf("(1)/(1 - 1/9*X^2)")));
        assert!(ps_zeta(&prof, 2, &c).unwrap().proportional(&rf("(1 + X^2)/(1 - 1/9*X^2)")));
        assert!(matches!(ps_zeta(&prof, 3, &c), Err(ZetaError::BadIndex { .. })));
        let plain = ZetaProfile { flavor: Flavor::Plain, ..prof.clone() };
        assert!(matches!(ps_zeta(&plain, 1, &c), Err(ZetaError::MissingZstar(Flavor::Plain))));
    }

    #[test]
    fn flat_vanishes_at_m() {
        for case in [QuadCase::UI, QuadCase::RI] {
            let c = classify_case(3, case).unwrap();
            let prof = ZetaProfile::flat(rf("(1)/(1 - X)"), 2, Sign::Minus, &c);
            assert!(ps_zeta(&prof, 2, &c).unwrap().is_zero());
            let qf = qi(c.residue_size() as i64);
            let expect = prof.zeta.scale(&(qf + qi(1)).recip());
            assert_eq!(ps_zeta(&prof, 3, &c).unwrap(), expect);
        }
    }

    #[test]
    fn zeta_polynomial_examples() {
        let l = rf("(1)/(1 - X)");
        assert_eq!(zeta_polynomial(&l, &l, 0).unwrap().poly, LaurentPoly::one());
        let z = &l * &rf("1 + X^2");
        assert_eq!(zeta_polynomial(&z, &l, 0).unwrap().poly, "1 + X^2".parse().unwrap());
        let z = &l * &rf("X^-1");
        assert_eq!(zeta_polynomial(&z, &l, 0).unwrap().poly, "X^-1".parse().unwrap());
        assert!(zeta_polynomial(&rf("(1)/(1 - X^2)"), &l, 0).is_err());
    }

    #[test]
    fn functional_equation_examples() {
        let p = |s: &str, m| ZetaPolynomial::new(s.parse().unwrap(), m);
        assert!(check_functional_equation(&p("1", 2), Sign::Plus, Sign::Plus, 4, 2));
        assert!(check_functional_equation(&p("1 - X", 2), Sign::Minus, Sign::Plus, 1, 1));
        assert!(check_functional_equation(&p("1 + X^2", 2), Sign::Plus, Sign::Plus, 0, 1));
        assert!(!check_functional_equation(&p("1 + X^2", 2), Sign::Minus, Sign::Plus, 0, 1));
    }

    #[test]
    fn level_raising_examples() {
        let p3 = params(3);
        let one = ZetaPolynomial::new(LaurentPoly::one(), 0);
        let e = raise_level(&one, LevelOp::E, 1, &p3);
        assert_eq!(e, ZetaPolynomial::new("3 + 3*X".parse().unwrap(), 1));
        let eta = raise_level(&one, LevelOp::Eta, 2, &p3);
        assert_eq!(eta, ZetaPolynomial::new("9*X^2".parse().unwrap(), 2));
        for f in [1, 2] {
            let a = raise_level(&raise_level(&one, LevelOp::E, f, &p3), LevelOp::Eta, f, &p3);
            let b = raise_level(&raise_level(&one, LevelOp::Eta, f, &p3), LevelOp::E, f, &p3);
            assert_eq!(a, b);
        }
    }

    #[test]
    fn oldform_rank_examples() {
        let p = params(3);
        assert_eq!(oldform_basis_rank(1, 0, 2, &p), 1);
        assert_eq!(oldform_basis_rank(1, 3, 2, &p), 2);
        assert_eq!(oldform_basis_rank(1, 4, 1, &p), 3);
    }

    #[test]
    fn split_identity_examples() {
        let p = params(3);
        assert!(split_zeta_identity(&RationalFn::one(), &p, 10).unwrap());
        assert!(split_zeta_identity(&rf("(1)/(1 - 2*X)"), &p, 20).unwrap());
        assert!(split_zeta_identity(&RationalFn::zero(), &p, 5).unwrap());
        let (_, s) = series_expand(&(&RationalFn::one() * &rf("(1 - 1/3*X)/(1 - X)")), 3).unwrap();
        assert_eq!(s, vec![qi(1), q(2, 3), q(2, 3), q(2, 3)]);
    }

    fn small_q() -> impl Strategy<Value = Q> {
        (-20i64..20, 1i64..6).prop_map(|(n, d)| q(n, d))
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(50))]

        #[test]
        fn recursion_u_closed_form(lk in small_q(), c0 in small_q(), c1 in small_q(), qv in prop::sample::select(vec![2i64, 3, 5])) {
            let p = params(qv);
            let z = solve_recursion_u(&p, &lk, &c0, &c1);
            prop_assert!(check_recursion_u(&p, &z, &lk, 20).unwrap());
            let c = coefficients(&p, &z, 2).unwrap();
            prop_assert_eq!(at(&c, 0), c0);
            prop_assert_eq!(at(&c, 1), c1);
        }

        #[test]
        fn recursion_r_closed_form(l in small_q(), c0 in small_q(), c1 in small_q(), s1 in small_q(), s0 in small_q()) {
            let p = params(3);
            let sol = solve_recursion_r(&p, &l, &c0, &c1, &s1, &s0).unwrap();
            prop_assert!(sol.q_num.max_exp().unwrap_or(0) <= 3 && sol.q_num.min_exp().unwrap_or(0) >= 0);
            prop_assert!(sol.r_num.max_exp().unwrap_or(0) <= 3 && sol.r_num.min_exp().unwrap_or(0) >= 0);
            prop_assert_eq!(sol.delta.max_exp(), Some(4));
            prop_assert!(check_recursion_r(&p, &sol.zeta, &sol.zeta_star, &l, 20).unwrap());
            let cs = coefficients(&p, &sol.zeta_star, 2).unwrap();
            prop_assert_eq!(at(&cs, -1), s1);
            prop_assert_eq!(at(&cs, 0), s0);
        }
    }
}
