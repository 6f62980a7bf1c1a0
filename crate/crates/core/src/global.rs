//! Global assembly over `Q`: matching imaginary quadratic fields to sign
//! sets, the archimedean factor, the global root number, and the formal
//! Dirichlet coefficients of the Fourier coefficients `F(n sigma')`.
//!
//! Coefficients `b_n` are taken in the variables `X_p = p^{-s + 1/2}`:
//! `sum_n b_n prod_p X_p^{ord_p n} = prod_p L(s + 1/2, chi_E,p) L(s, tau_p)
//! prod_{p not in S} (1 - X_p)^{-1}`. Since `prod_p X_p^{ord_p n} = n^{-s+1/2}`,
//! the normalized Fourier coefficient is `F(n sigma') / F(sigma') = n^kappa b_n`.

use std::collections::{BTreeMap, BTreeSet};

use num_integer::Integer;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::laurent::{series_expand, AmbientParams, LaurentError, LaurentPoly, RationalFn, Sign, Q};
use crate::localfield::is_prime;
use crate::sk_factors::{SkError, TauLocalType};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GlobalError {
    #[error("no local data for p = {0}")]
    MissingPrime(u64),
    #[error("missing dichotomy data at p = {0}")]
    MissingDichotomy(u64),
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("p = {0} in S but tau_p is not discrete")]
    NotInSTau(u64),
    #[error("level {given} differs from the conductor {expected}")]
    LevelMismatch { given: u64, expected: u64 },
    #[error("parity inconsistency: (-1)^|S| = {s_sign} but -eps(1/2, tau) = {needed}")]
    ParityInconsistent { s_sign: Sign, needed: Sign },
    #[error("weight kappa must be >= 1")]
    BadWeight,
    #[error("d = {0} is not a positive squarefree integer")]
    BadDiscriminant(u64),
    #[error(transparent)]
    Local(#[from] SkError),
    #[error(transparent)]
    Laurent(#[from] LaurentError),
}

type Result<T> = std::result::Result<T, GlobalError>;

/// Global `tau` through its local components at the primes that matter.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GlobalTauData {
    pub primes: BTreeMap<u64, TauLocalType>,
    pub weight_kappa: u32,
    pub level_n: u64,
}

impl GlobalTauData {
    pub fn validate(&self) -> Result<()> {
        if self.weight_kappa == 0 {
            return Err(GlobalError::BadWeight);
        }
        let mut conductor = 1u64;
        for (&p, tau) in &self.primes {
            if !is_prime(p) {
                return Err(GlobalError::NotPrime(p));
            }
            tau.validate()?;
            conductor = conductor.saturating_mul(p.saturating_pow(tau.n_tau()));
        }
        if conductor != self.level_n {
            return Err(GlobalError::LevelMismatch { given: self.level_n, expected: conductor });
        }
        Ok(())
    }

    /// Primes where `tau_p` is discrete.
    pub fn s_tau(&self) -> BTreeSet<u64> {
        self.primes.iter().filter(|(_, t)| t.is_discrete()).map(|(&p, _)| p).collect()
    }

    /// `eps(1/2, tau) = prod_p eps_p * (-1)^kappa`.
    pub fn global_root(&self) -> Sign {
        let finite = self.primes.values().fold(Sign::Plus, |acc, t| acc * t.eps_tau());
        finite * parity_sign(self.weight_kappa as usize)
    }
}

fn parity_sign(n: usize) -> Sign {
    if n % 2 == 0 {
        Sign::Plus
    } else {
        Sign::Minus
    }
}

/// Sign set `S` and the field `E = Q(sqrt(-d))`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PacketChoice {
    pub s: BTreeSet<u64>,
    pub d: u64,
}

impl PacketChoice {
    pub fn validate(&self, tau: &GlobalTauData) -> Result<()> {
        if !is_squarefree(self.d) {
            return Err(GlobalError::BadDiscriminant(self.d));
        }
        let st = tau.s_tau();
        if let Some(&p) = self.s.iter().find(|p| !st.contains(p)) {
            return Err(GlobalError::NotInSTau(p));
        }
        let s_sign = parity_sign(self.s.len());
        let needed = tau.global_root().flip();
        if s_sign != needed {
            return Err(GlobalError::ParityInconsistent { s_sign, needed });
        }
        Ok(())
    }
}

/// External local inputs at `p` in `S_tau`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct LocalDichotomy {
    /// `eps(1/2, tau_p) eps(1/2, tau_p x chi_E,p)`.
    pub eps_product: Sign,
    /// `chi_E,p(-1)`.
    pub chi_minus_one: Sign,
}

/// Whether `E` matches `S`: the product equals `chi(-1)` on `S` and
/// `-chi(-1)` on `S_tau - S`.
pub fn match_field(
    choice: &PacketChoice,
    tau: &GlobalTauData,
    dichotomy: &BTreeMap<u64, LocalDichotomy>,
) -> Result<bool> {
    let mut ok = true;
    for p in tau.s_tau() {
        let dd = dichotomy.get(&p).ok_or(GlobalError::MissingDichotomy(p))?;
        let target = if choice.s.contains(&p) { dd.chi_minus_one } else { dd.chi_minus_one.flip() };
        ok &= dd.eps_product == target;
    }
    Ok(ok)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ArchFactor {
    /// `Gamma(s + t)` shifts, as fractions.
    pub gamma_shifts: [String; 2],
    pub power_of_2pi: String,
    pub fe_sign: Sign,
}

pub fn arch_factor(kappa: u32) -> Result<ArchFactor> {
    if kappa == 0 {
        return Err(GlobalError::BadWeight);
    }
    let shift = Q::new((2 * kappa as i64 - 1).into(), 2.into());
    Ok(ArchFactor {
        gamma_shifts: ["1/2".into(), shift.to_string()],
        power_of_2pi: format!("-2s-{kappa}"),
        fe_sign: parity_sign(kappa as usize + 1),
    })
}

/// Product of the local root numbers `E_pi` over all places; `+1` exactly
/// when the packet choice is consistent.
pub fn global_root_number(tau: &GlobalTauData, choice: &PacketChoice) -> Result<Sign> {
    tau.validate()?;
    choice.validate(tau)?;
    let finite = tau.primes.iter().fold(Sign::Plus, |acc, (p, t)| {
        let local = if choice.s.contains(p) { t.eps_tau().flip() } else { t.eps_tau() };
        acc * local
    });
    Ok(finite * arch_factor(tau.weight_kappa)?.fe_sign)
}

fn is_squarefree(d: u64) -> bool {
    if d == 0 {
        return false;
    }
    let mut n = d;
    let mut k = 2u64;
    while k * k <= n {
        if n % (k * k) == 0 {
            return false;
        }
        if n % k == 0 {
            n /= k;
        }
        k += 1;
    }
    true
}

fn pow_mod(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut r = 1u64 % m;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            r = ((r as u128 * b as u128) % m as u128) as u64;
        }
        b = ((b as u128 * b as u128) % m as u128) as u64;
        e >>= 1;
    }
    r
}

/// Fundamental discriminant of `Q(sqrt(-d))`.
pub fn field_discriminant(d: u64) -> i64 {
    let neg = -(d as i64);
    if neg.rem_euclid(4) == 1 {
        neg
    } else {
        4 * neg
    }
}

/// `chi_E(p)` for `E = Q(sqrt(-d))`: the Kronecker symbol `(D / p)`.
pub fn chi_e(d: u64, p: u64) -> i64 {
    let disc = field_discriminant(d);
    if p == 2 {
        return match disc.rem_euclid(8) {
            1 | 7 => 1,
            3 | 5 => -1,
            _ => 0,
        };
    }
    let r = disc.rem_euclid(p as i64) as u64;
    if r == 0 {
        return 0;
    }
    if pow_mod(r, (p - 1) / 2, p) == 1 {
        1
    } else {
        -1
    }
}

/// Local Euler factor at `p` as a rational function of `X_p`.
pub fn local_euler_factor(tau_p: &TauLocalType, chi: i64, in_s: bool, p: u64) -> Result<RationalFn> {
    let params = AmbientParams::from_int(p as i64)?;
    let one = LaurentPoly::one();
    let chi_part = &one - &params.xp().scale(&Q::from_integer(chi.into()));
    let mut den = &chi_part * &tau_p.l_inverse(&params);
    if !in_s {
        den = &den * &(&one - &params.x());
    }
    Ok(RationalFn::recip_poly(den)?)
}

fn primes_up_to(n: usize) -> Vec<u64> {
    let mut sieve = vec![true; n + 1];
    let mut out = Vec::new();
    for i in 2..=n {
        if sieve[i] {
            out.push(i as u64);
            let mut j = i * i;
            while j <= n {
                sieve[j] = false;
                j += i;
            }
        }
    }
    out
}

/// Per-prime power series `b_{p^k}`, `p^k <= n_max`.
pub fn local_series(
    tau: &GlobalTauData,
    choice: &PacketChoice,
    n_max: u64,
) -> Result<BTreeMap<u64, Vec<Q>>> {
    let mut out = BTreeMap::new();
    for p in primes_up_to(n_max as usize) {
        let tau_p = tau.primes.get(&p).ok_or(GlobalError::MissingPrime(p))?;
        let r = local_euler_factor(tau_p, chi_e(choice.d, p), choice.s.contains(&p), p)?;
        let mut k = 0usize;
        let mut pk = p;
        while pk <= n_max {
            k += 1;
            pk = pk.saturating_mul(p);
        }
        let (start, cs) = series_expand(&r, k)?;
        debug_assert_eq!(start, 0);
        out.insert(p, cs);
    }
    Ok(out)
}

/// `b_1 .. b_{n_max}` from the Euler product (index 0 holds `b_1`).
pub fn fourier_dirichlet(tau: &GlobalTauData, choice: &PacketChoice, n_max: u64) -> Result<Vec<Q>> {
    tau.validate()?;
    choice.validate(tau)?;
    let series = local_series(tau, choice, n_max)?;
    let n = n_max as usize;
    // smallest prime factor sieve
    let mut spf = vec![0usize; n + 1];
    for i in 2..=n {
        if spf[i] == 0 {
            let mut j = i;
            while j <= n {
                if spf[j] == 0 {
                    spf[j] = i;
                }
                j += i;
            }
        }
    }
    let mut b = vec![Q::zero(); n + 1];
    if n >= 1 {
        b[1] = Q::one();
    }
    for m in 2..=n {
        let p = spf[m];
        let mut rest = m;
        let mut k = 0;
        while rest % p == 0 {
            rest /= p;
            k += 1;
        }
        let local = series[&(p as u64)].get(k).cloned().unwrap_or_else(Q::zero);
        b[m] = &b[rest] * &local;
    }
    b.remove(0);
    Ok(b)
}

/// `F(n sigma') / F(sigma') = n^kappa b_n`.
pub fn fourier_ratio(n: u64, b_n: &Q, kappa: u32) -> Q {
    b_n * Q::from_integer(num_bigint::BigInt::from(n).pow(kappa))
}

/// `gcd` helper for callers checking multiplicativity.
pub fn coprime(a: u64, b: u64) -> bool {
    a.gcd(&b) == 1
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::laurent::{q, qi};

    fn unr(a: Q) -> TauLocalType {
        TauLocalType::UnramifiedPrincipal { a }
    }

    fn data_all_unr(n_max: u64, kappa: u32) -> GlobalTauData {
        let primes = primes_up_to(n_max as usize).into_iter().map(|p| (p, unr(qi(1)))).collect();
        GlobalTauData { primes, weight_kappa: kappa, level_n: 1 }
    }

    #[test]
    fn arch_examples() {
        let a1 = arch_factor(1).unwrap();
        assert_eq!(a1.gamma_shifts, ["1/2".to_string(), "1/2".to_string()]);
        assert_eq!(a1.fe_sign, Sign::Plus);
        let a2 = arch_factor(2).unwrap();
        assert_eq!(a2.gamma_shifts[1], "3/2");
        assert_eq!(a2.fe_sign, Sign::Minus);
        assert_eq!(arch_factor(10).unwrap().fe_sign, Sign::Minus);
        for k in 1..20 {
            assert_eq!(arch_factor(k).unwrap().fe_sign, arch_factor(k + 2).unwrap().fe_sign);
        }
    }

    #[test]
    fn kronecker_values() {
        // E = Q(i): D = -4
        assert_eq!((chi_e(1, 2), chi_e(1, 3), chi_e(1, 5)), (0, -1, 1));
        // E = Q(sqrt(-7)): D = -7
        assert_eq!((chi_e(7, 2), chi_e(7, 3), chi_e(7, 7), chi_e(7, 11)), (1, -1, 0, 1));
    }

    #[test]
    fn match_field_examples() {
        let tau = data_all_unr(3, 1);
        let choice = PacketChoice { s: BTreeSet::new(), d: 1 };
        assert!(match_field(&choice, &tau, &BTreeMap::new()).unwrap());
        let mut t = tau.clone();
        t.primes.insert(5, TauLocalType::Steinberg);
        t.level_n = 5;
        let dd = LocalDichotomy { eps_product: Sign::Minus, chi_minus_one: Sign::Minus };
        let with_s = PacketChoice { s: [5].into(), d: 1 };
        assert!(match_field(&with_s, &t, &[(5, dd)].into()).unwrap());
        let dd2 = LocalDichotomy { eps_product: Sign::Minus, chi_minus_one: Sign::Minus };
        assert!(!match_field(&choice, &t, &[(5, dd2)].into()).unwrap());
        assert_eq!(match_field(&choice, &t, &BTreeMap::new()), Err(GlobalError::MissingDichotomy(5)));
    }

    #[test]
    fn root_number_examples() {
        // kappa = 1: eps_infty = -1; one Steinberg prime gives eps(1/2) = +1 so |S| = 1
        let mut t = data_all_unr(3, 1);
        t.primes.insert(5, TauLocalType::Steinberg);
        t.level_n = 5;
        let choice = PacketChoice { s: [5].into(), d: 1 };
        assert_eq!(global_root_number(&t, &choice).unwrap(), Sign::Plus);
        assert!(matches!(
            global_root_number(&t, &PacketChoice { s: BTreeSet::new(), d: 1 }),
            Err(GlobalError::ParityInconsistent { .. })
        ));
        // all unramified, kappa odd: eps(1/2) = -1, S empty
        let t = data_all_unr(7, 3);
        assert_eq!(global_root_number(&t, &PacketChoice { s: BTreeSet::new(), d: 2 }).unwrap(), Sign::Plus);
        // two Steinberg primes in S
        let mut t = data_all_unr(3, 1);
        t.primes.insert(5, TauLocalType::Steinberg);
        t.primes.insert(7, TauLocalType::Steinberg);
        t.level_n = 35;
        let c = PacketChoice { s: [5, 7].into(), d: 1 };
        let mut reordered = t.clone();
        reordered.primes = t.primes.clone().into_iter().rev().collect();
        assert_eq!(global_root_number(&t, &c).unwrap(), Sign::Plus);
        assert_eq!(global_root_number(&reordered, &c).unwrap(), Sign::Plus);
    }

    #[test]
    fn dirichlet_small() {
        let t = data_all_unr(30, 1);
        let choice = PacketChoice { s: BTreeSet::new(), d: 1 };
        let b = fourier_dirichlet(&t, &choice, 30).unwrap();
        assert_eq!(b[0], qi(1));
        assert_eq!(b[5], &b[1] * &b[2]);
        // p = 3, a = 1, chi(3) = -1: X + X/3 - X/3 + X = ... via the series
        let f = local_euler_factor(&unr(qi(1)), -1, false, 3).unwrap();
        let (_, s) = series_expand(&f, 1).unwrap();
        assert_eq!(b[2], s[1]);
        assert_eq!(s[1], qi(1) - q(1, 3) + q(1, 3) + qi(1));
        let mut missing = t.clone();
        missing.primes.remove(&29);
        assert_eq!(fourier_dirichlet(&missing, &choice, 30), Err(GlobalError::MissingPrime(29)));
    }

    #[test]
    fn level_checks() {
        let mut t = data_all_unr(3, 1);
        t.level_n = 2;
        assert!(matches!(t.validate(), Err(GlobalError::LevelMismatch { .. })));
        assert!(!is_squarefree(12) && is_squarefree(30));
        assert_eq!(fourier_ratio(2, &q(1, 2), 3), qi(4));
        assert!(coprime(4, 9));
    }
}
