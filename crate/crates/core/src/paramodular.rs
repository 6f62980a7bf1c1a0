//! `GSp(4)` over the truncated field, the embedding of `GL_2(E)^{det in F}`,
//! and the nonsplit paramodular families built from the orders `R_m`.
//!
//! The defining form is `J = [[0, -j], [j, 0]]` with `j = [[0, 1], [1, 0]]`,
//! so `n_y` lies in `G` exactly when `y` has equal diagonal entries.

use std::collections::VecDeque;
use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::localfield::{residue_reps, FieldElem, FieldError, QuadCase, QuadElem, QuadExtData};
use crate::orders::{build_rm, hankel_part, Lattice2, OrderError, PadicMat2};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ParamodularError {
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error(transparent)]
    Order(#[from] OrderError),
    #[error("{flavor} paramodular group is not defined at level m = {m}")]
    Inadmissible { flavor: Flavor, m: u32 },
    #[error("special element {name} is not defined in case {case}")]
    NameMismatch { name: String, case: QuadCase },
    #[error("determinant is not in F^x at available precision")]
    NotRational,
    #[error("{0} is only defined over a quadratic field; E is split")]
    SplitLevel(String),
    #[error("decomposition is not available for {0}")]
    OutOfRange(String),
    #[error("enumeration of {0} cosets exceeds the bound")]
    TooLarge(usize),
    #[error("unknown flavor '{0}'")]
    UnknownFlavor(String),
}

type Result<T> = std::result::Result<T, ParamodularError>;

/// A 4x4 similitude matrix with its multiplier.
#[derive(Clone, Copy, PartialEq)]
pub struct GSp4Elem {
    pub mat: [[FieldElem; 4]; 4],
    pub similitude: FieldElem,
}

impl fmt::Debug for GSp4Elem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "mu = {:?}", self.similitude)?;
        for row in &self.mat {
            writeln!(f, "  {:?}", row)?;
        }
        Ok(())
    }
}

#[derive(Serialize)]
struct GSp4Json {
    mat: Vec<Vec<String>>,
    similitude: String,
}

impl Serialize for GSp4Elem {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        GSp4Json {
            mat: self.mat.iter().map(|r| r.iter().map(|v| v.to_string()).collect()).collect(),
            similitude: self.similitude.to_string(),
        }
        .serialize(s)
    }
}

fn approx_eq(a: &FieldElem, b: &FieldElem) -> bool {
    a.sub(b).is_zero()
}

impl GSp4Elem {
    fn raw(ctx: &QuadExtData, mat: [[FieldElem; 4]; 4]) -> Self {
        let mut g = GSp4Elem { mat, similitude: ctx.one() };
        g.similitude = g.gram()[3][0];
        g
    }

    /// From a plain integer-free 4x4 array; the multiplier is read off
    /// `tg J g`.
    pub fn from_matrix(ctx: &QuadExtData, mat: [[FieldElem; 4]; 4]) -> Result<Self> {
        let g = Self::raw(ctx, mat);
        if g.similitude.is_zero() || !g.is_symplectic() {
            return Err(ParamodularError::NotRational);
        }
        Ok(g)
    }

    pub fn from_blocks(
        ctx: &QuadExtData,
        a: &PadicMat2,
        b: &PadicMat2,
        c: &PadicMat2,
        d: &PadicMat2,
    ) -> Self {
        let mut m = [[ctx.zero(); 4]; 4];
        for (bi, bj, blk) in [(0, 0, a), (0, 1, b), (1, 0, c), (1, 1, d)] {
            for i in 0..2 {
                for j in 0..2 {
                    m[2 * bi + i][2 * bj + j] = blk.a[i][j];
                }
            }
        }
        Self::raw(ctx, m)
    }

    pub fn block(&self, bi: usize, bj: usize) -> PadicMat2 {
        let m = &self.mat;
        PadicMat2::new(
            m[2 * bi][2 * bj],
            m[2 * bi][2 * bj + 1],
            m[2 * bi + 1][2 * bj],
            m[2 * bi + 1][2 * bj + 1],
        )
    }

    pub fn identity(ctx: &QuadExtData) -> Self {
        let i = PadicMat2::identity(ctx);
        let z = PadicMat2::zero(ctx);
        Self::from_blocks(ctx, &i, &z, &z, &i)
    }

    /// `J`.
    pub fn form(ctx: &QuadExtData) -> [[FieldElem; 4]; 4] {
        let mut m = [[ctx.zero(); 4]; 4];
        m[0][3] = ctx.int(-1);
        m[1][2] = ctx.int(-1);
        m[2][1] = ctx.one();
        m[3][0] = ctx.one();
        m
    }

    fn p(&self) -> u64 {
        self.similitude.prime()
    }

    fn matmul(x: &[[FieldElem; 4]; 4], y: &[[FieldElem; 4]; 4]) -> [[FieldElem; 4]; 4] {
        let p = x[0][0].prime();
        std::array::from_fn(|i| {
            std::array::from_fn(|k| {
                (0..4).fold(FieldElem::zero(p), |acc, j| {
                    if x[i][j].is_exact_zero() || y[j][k].is_exact_zero() {
                        acc
                    } else {
                        acc.add(&x[i][j].mul(&y[j][k]))
                    }
                })
            })
        })
    }

    fn transpose(x: &[[FieldElem; 4]; 4]) -> [[FieldElem; 4]; 4] {
        std::array::from_fn(|i| std::array::from_fn(|j| x[j][i]))
    }

    /// `tg J g`.
    fn gram(&self) -> [[FieldElem; 4]; 4] {
        let mut jm = [[FieldElem::zero(self.p()); 4]; 4];
        let one = FieldElem::one(self.p(), self.similitude.rel_precision().max(1));
        jm[0][3] = one.neg();
        jm[1][2] = one.neg();
        jm[2][1] = one;
        jm[3][0] = one;
        Self::matmul(&Self::matmul(&Self::transpose(&self.mat), &jm), &self.mat)
    }

    /// `tg J g = mu J` at tracked precision.
    pub fn is_symplectic(&self) -> bool {
        let g = self.gram();
        let mu = self.similitude;
        for i in 0..4 {
            for j in 0..4 {
                let expect = match (i, j) {
                    (0, 3) | (1, 2) => mu.neg(),
                    (2, 1) | (3, 0) => mu,
                    _ => FieldElem::zero(self.p()),
                };
                if !approx_eq(&g[i][j], &expect) {
                    return false;
                }
            }
        }
        true
    }

    pub fn mul(&self, o: &Self) -> Self {
        GSp4Elem { mat: Self::matmul(&self.mat, &o.mat), similitude: self.similitude.mul(&o.similitude) }
    }

    /// `g^{-1} = -mu^{-1} J tg J`.
    pub fn inv(&self) -> Result<Self> {
        let mu_inv = self.similitude.inv()?;
        let t = Self::transpose(&self.mat);
        // J x J for J = antidiag(-1, -1, 1, 1): entry (i, j) -> s_i s_j x[3-i][3-j]
        let s = |i: usize| if i < 2 { -1i64 } else { 1 };
        let mat = std::array::from_fn(|i| {
            std::array::from_fn(|j| {
                let v = t[3 - i][3 - j].mul(&mu_inv);
                // J x J picks up s_i * s_{3-j}; then the overall minus sign
                if -s(i) * s(3 - j) < 0 {
                    v.neg()
                } else {
                    v
                }
            })
        });
        Ok(GSp4Elem { mat, similitude: mu_inv })
    }

    /// `x^{-1} g x`.
    pub fn conj_by(&self, x: &Self) -> Result<Self> {
        Ok(x.inv()?.mul(self).mul(x))
    }

    pub fn approx_eq(&self, o: &Self) -> bool {
        (0..4).all(|i| (0..4).all(|j| approx_eq(&self.mat[i][j], &o.mat[i][j])))
            && approx_eq(&self.similitude, &o.similitude)
    }

    pub fn is_identity(&self) -> bool {
        (0..4).all(|i| {
            (0..4).all(|j| {
                let v = self.mat[i][j];
                if i == j {
                    approx_eq(&v, &FieldElem::one(self.p(), v.rel_precision().max(1)))
                } else {
                    v.is_zero()
                }
            })
        })
    }
}

/// `n_y = [[1, y], [0, 1]]`, `y` with equal diagonal.
pub fn n_elem(ctx: &QuadExtData, y: &PadicMat2) -> GSp4Elem {
    let i = PadicMat2::identity(ctx);
    GSp4Elem::from_blocks(ctx, &i, y, &PadicMat2::zero(ctx), &i)
}

/// `nbar_y = [[1, 0], [y, 1]]`.
pub fn nbar_elem(ctx: &QuadExtData, y: &PadicMat2) -> GSp4Elem {
    let i = PadicMat2::identity(ctx);
    GSp4Elem::from_blocks(ctx, &i, &PadicMat2::zero(ctx), y, &i)
}

/// `a_h = diag(h, h^dag)` with `h^dag = iota h iota`.
pub fn a_elem(ctx: &QuadExtData, h: &PadicMat2) -> GSp4Elem {
    let z = PadicMat2::zero(ctx);
    GSp4Elem::from_blocks(ctx, h, &z, &z, &h.iota_conj())
}

/// `u^ = diag(u, u, 1, 1)`.
pub fn u_hat(ctx: &QuadExtData, u: &FieldElem) -> GSp4Elem {
    let z = PadicMat2::zero(ctx);
    GSp4Elem::from_blocks(ctx, &PadicMat2::scalar(ctx, *u), &z, &z, &PadicMat2::identity(ctx))
}

/// `diag(a, a^c)` for `a` in `E^x`.
pub fn torus_elem(ctx: &QuadExtData, a: &QuadElem) -> GSp4Elem {
    let z = PadicMat2::zero(ctx);
    GSp4Elem::from_blocks(ctx, &PadicMat2::embed(ctx, a), &z, &z, &PadicMat2::embed(ctx, &a.conj()))
}

/// A 2x2 matrix over `E`.
pub type GammaElem = [[QuadElem; 2]; 2];

fn quad_det(ctx: &QuadExtData, g: &GammaElem) -> QuadElem {
    g[0][0].mul(&g[1][1], ctx).sub(&g[0][1].mul(&g[1][0], ctx))
}

/// Embed `g` in `GSp(4)`.
///
/// Nonsplit: `[[x, y], [z, w]] -> [[x, y sigma^{-1}/2], [2 sigma z, w]]`.
/// Split: the components `g_1, g_2` along `E = F + F` go to the
/// checkerboard pattern.
pub fn embed_gamma(ctx: &QuadExtData, g: &GammaElem) -> Result<GSp4Elem> {
    let det = quad_det(ctx, g);
    if !det.y.is_zero() || det.x.is_zero() {
        return Err(ParamodularError::NotRational);
    }
    if ctx.case == QuadCase::Split {
        // x + y sigma -> (x + y, x - y)
        let comp = |z: &QuadElem, s: i64| if s > 0 { z.x.add(&z.y) } else { z.x.sub(&z.y) };
        let g1 = [[comp(&g[0][0], 1), comp(&g[0][1], 1)], [comp(&g[1][0], 1), comp(&g[1][1], 1)]];
        let g2 = [[comp(&g[0][0], -1), comp(&g[0][1], -1)], [comp(&g[1][0], -1), comp(&g[1][1], -1)]];
        return embed_split_pair(ctx, &g1, &g2);
    }
    let sigma_inv_half = ctx.sigma().inv(ctx)?.scale(&ctx.int(2).inv()?);
    let two_sigma = ctx.sigma().scale(&ctx.int(2));
    let a = PadicMat2::embed(ctx, &g[0][0]);
    let b = PadicMat2::embed(ctx, &g[0][1].mul(&sigma_inv_half, ctx));
    let c = PadicMat2::embed(ctx, &two_sigma.mul(&g[1][0], ctx));
    let d = PadicMat2::embed(ctx, &g[1][1]);
    Ok(GSp4Elem::from_blocks(ctx, &a, &b, &c, &d))
}

/// `(g_1, g_2)` with equal determinants, placed as
/// `[[a1,0,0,b1],[0,a2,b2,0],[0,c2,d2,0],[c1,0,0,d1]]`.
pub fn embed_split_pair(
    ctx: &QuadExtData,
    g1: &[[FieldElem; 2]; 2],
    g2: &[[FieldElem; 2]; 2],
) -> Result<GSp4Elem> {
    let d1 = g1[0][0].mul(&g1[1][1]).sub(&g1[0][1].mul(&g1[1][0]));
    let d2 = g2[0][0].mul(&g2[1][1]).sub(&g2[0][1].mul(&g2[1][0]));
    if d1.is_zero() || !approx_eq(&d1, &d2) {
        return Err(ParamodularError::NotRational);
    }
    let z = ctx.zero();
    let m = [
        [g1[0][0], z, z, g1[0][1]],
        [z, g2[0][0], g2[0][1], z],
        [z, g2[1][0], g2[1][1], z],
        [g1[1][0], z, z, g1[1][1]],
    ];
    Ok(GSp4Elem::raw(ctx, m))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Flavor {
    Complete,
    Flat,
    Plain,
    Sharp,
}

impl fmt::Display for Flavor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Flavor::Complete => "complete",
            Flavor::Flat => "flat",
            Flavor::Plain => "plain",
            Flavor::Sharp => "sharp",
        })
    }
}

impl FromStr for Flavor {
    type Err = ParamodularError;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "complete" => Ok(Flavor::Complete),
            "flat" => Ok(Flavor::Flat),
            "plain" => Ok(Flavor::Plain),
            "sharp" => Ok(Flavor::Sharp),
            _ => Err(ParamodularError::UnknownFlavor(s.into())),
        }
    }
}

/// One member of the family `K_{2m}`, `K_{2m+1}^flat`, `K_{2m+1}`,
/// `K_{2m+1}^sharp`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ParamodularSpec {
    pub level_m: u32,
    pub flavor: Flavor,
    #[serde(skip)]
    pub ctx: QuadExtData,
}

impl ParamodularSpec {
    pub fn new(ctx: &QuadExtData, level_m: u32, flavor: Flavor) -> Result<Self> {
        ctx.check_supported()?;
        let min = match flavor {
            Flavor::Complete => 0,
            Flavor::Flat => 1,
            Flavor::Plain | Flavor::Sharp => u32::from(ctx.case.is_ramified()),
        };
        if level_m < min {
            return Err(ParamodularError::Inadmissible { flavor, m: level_m });
        }
        let spec = ParamodularSpec { level_m, flavor, ctx: ctx.clone() };
        // The block display needs rho to normalize R_m, which fails for
        // every rho in E = F + F of norm varpi. Only K_0 survives.
        if ctx.case == QuadCase::Split && (level_m, flavor) != (0, Flavor::Complete) {
            return Err(ParamodularError::SplitLevel(spec.tag()));
        }
        Ok(spec)
    }

    /// Index `2m` or `2m + 1` of the group.
    pub fn index(&self) -> u32 {
        match self.flavor {
            Flavor::Complete => 2 * self.level_m,
            _ => 2 * self.level_m + 1,
        }
    }

    pub fn tag(&self) -> String {
        let n = self.index();
        match self.flavor {
            Flavor::Complete | Flavor::Plain => format!("K_{n}"),
            Flavor::Flat => format!("K_{n}^flat"),
            Flavor::Sharp => format!("K_{n}^sharp"),
        }
    }

    /// Range where the `N A Nbar` (possibly with one Weyl cell)
    /// decomposition holds.
    pub fn decomposition_in_range(&self) -> bool {
        match self.flavor {
            Flavor::Complete => {
                let min = match self.ctx.case {
                    QuadCase::UII => 0,
                    QuadCase::UI => 1,
                    _ => 2,
                };
                self.level_m >= min
            }
            Flavor::Flat => !(self.ctx.case.is_ramified() && self.level_m == 1),
            _ => true,
        }
    }
}

/// A paramodular group with its block lattices precomputed.
#[derive(Debug, Clone)]
pub struct ParamodularGroup {
    pub spec: ParamodularSpec,
    diag_lat: Lattice2,
    b_lat: Lattice2,
    c_lat: Lattice2,
    /// `dv rho^m`, premultiplied onto the upper right block.
    b_scale: PadicMat2,
    /// Inverse of the lower left scaling.
    c_unscale: PadicMat2,
    n_lat: Lattice2,
    nbar_lat: Lattice2,
}

impl ParamodularGroup {
    pub fn new(spec: &ParamodularSpec) -> Result<Self> {
        let ctx = &spec.ctx;
        let m = spec.level_m as i64;
        let dv = ctx.int(ctx.dv as i64);
        let rho = |k: i64| -> Result<PadicMat2> { Ok(PadicMat2::embed(ctx, &ctx.uniformizer_pow(k)?)) };
        let rm = build_rm(ctx, m)?;
        let diag_lat = if spec.flavor == Flavor::Sharp { build_rm(ctx, m + 1)? } else { rm.clone() };
        let b_scale = rho(m)?.scale(&dv);
        let (c_exp, c_base) = match spec.flavor {
            Flavor::Complete => (m, rm.clone()),
            Flavor::Flat => (m + 1, build_rm(ctx, m - 1)?),
            Flavor::Plain | Flavor::Sharp => (m + 1, rm.clone()),
        };
        let c_scale = rho(c_exp)?.scale(&dv);
        let c_unscale = c_scale.inv()?;
        let b_full = rm.left_mul(&b_scale.inv()?)?;
        let c_full = c_base.left_mul(&c_scale)?;
        Ok(ParamodularGroup {
            spec: spec.clone(),
            n_lat: hankel_part(&b_full)?,
            nbar_lat: hankel_part(&c_full)?,
            diag_lat,
            b_lat: rm,
            c_lat: c_base,
            b_scale,
            c_unscale,
        })
    }

    pub fn ctx(&self) -> &QuadExtData {
        &self.spec.ctx
    }

    /// Lattice of `y` with `n_y` in the group.
    pub fn n_lattice(&self) -> &Lattice2 {
        &self.n_lat
    }

    /// Lattice of `z` with `nbar_z` in the group.
    pub fn nbar_lattice(&self) -> &Lattice2 {
        &self.nbar_lat
    }

    /// `mu(g)` a unit and every block in its lattice.
    pub fn contains(&self, g: &GSp4Elem) -> Result<bool> {
        if !g.similitude.is_unit() {
            return Ok(false);
        }
        if !self.diag_lat.contains(&g.block(0, 0))? || !self.diag_lat.contains(&g.block(1, 1))? {
            return Ok(false);
        }
        if !self.b_lat.contains(&self.b_scale.mul(&g.block(0, 1)))? {
            return Ok(false);
        }
        Ok(self.c_lat.contains(&self.c_unscale.mul(&g.block(1, 0)))?)
    }

    pub fn weyl(&self) -> Result<GSp4Elem> {
        special_element(&self.spec.ctx, SpecialName::Weyl(self.spec.level_m as i64))
    }
}

/// Names accepted by [`special_element`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SpecialName {
    AtkinLehner,
    Weyl(i64),
    WeylPrime(i64),
    Sp,
    UAlpha,
    HatWpi(i64),
}

impl fmt::Display for SpecialName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SpecialName::AtkinLehner => write!(f, "atkin_lehner"),
            SpecialName::Weyl(m) => write!(f, "weyl({m})"),
            SpecialName::WeylPrime(m) => write!(f, "weyl_prime({m})"),
            SpecialName::Sp => write!(f, "s_p"),
            SpecialName::UAlpha => write!(f, "u_alpha"),
            SpecialName::HatWpi(i) => write!(f, "hat_wpi({i})"),
        }
    }
}

fn int_matrix(ctx: &QuadExtData, entries: &[(usize, usize, FieldElem)]) -> GSp4Elem {
    let mut m = [[ctx.zero(); 4]; 4];
    for &(i, j, v) in entries {
        m[i][j] = v;
    }
    GSp4Elem::raw(ctx, m)
}

pub fn special_element(ctx: &QuadExtData, name: SpecialName) -> Result<GSp4Elem> {
    let mismatch = || ParamodularError::NameMismatch { name: name.to_string(), case: ctx.case };
    let z = PadicMat2::zero(ctx);
    let dv = ctx.int(ctx.dv as i64);
    Ok(match name {
        SpecialName::AtkinLehner => {
            let one = ctx.one();
            if ctx.case == QuadCase::Split {
                int_matrix(ctx, &[(0, 1, one), (1, 0, one), (2, 3, one), (3, 2, one)])
            } else {
                let i = PadicMat2::iota(ctx);
                GSp4Elem::from_blocks(ctx, &i, &z, &z, &i.neg())
            }
        }
        SpecialName::Weyl(m) => {
            let r = PadicMat2::embed(ctx, &ctx.uniformizer_pow(m)?).scale(&dv);
            GSp4Elem::from_blocks(ctx, &z, &r.inv()?.neg(), &r, &z)
        }
        SpecialName::WeylPrime(m) => {
            let b = PadicMat2::scalar(ctx, ctx.varpi_pow(-m).div(&dv)?.neg());
            let c = PadicMat2::scalar(ctx, ctx.varpi_pow(m + 1).mul(&dv));
            GSp4Elem::from_blocks(ctx, &z, &b, &c, &z)
        }
        SpecialName::Sp => {
            if !ctx.case.is_ramified() {
                return Err(mismatch());
            }
            let one = ctx.one();
            int_matrix(
                ctx,
                &[(0, 0, one), (1, 2, ctx.varpi_pow(-1).neg()), (2, 1, ctx.varpi_pow(1)), (3, 3, one)],
            )
        }
        SpecialName::UAlpha => {
            if ctx.case != QuadCase::RII {
                return Err(mismatch());
            }
            let one = ctx.one();
            let alpha = ctx.elem(ctx.alpha.as_ref().expect("R-ii carries alpha"));
            int_matrix(
                ctx,
                &[(0, 0, one), (0, 1, alpha), (1, 1, one), (2, 2, one), (2, 3, alpha.neg()), (3, 3, one)],
            )
        }
        SpecialName::HatWpi(i) => u_hat(ctx, &ctx.varpi_pow(i)),
    })
}

/// `K = N_K A_K Nbar_K`, possibly behind one Weyl element.
#[derive(Debug, Clone)]
pub struct Factorization {
    pub weyl: bool,
    pub y: PadicMat2,
    pub levi: GSp4Elem,
    pub z: PadicMat2,
}

impl Factorization {
    pub fn product(&self, group: &ParamodularGroup) -> Result<GSp4Elem> {
        let ctx = group.ctx();
        let core = n_elem(ctx, &self.y).mul(&self.levi).mul(&nbar_elem(ctx, &self.z));
        Ok(if self.weyl { group.weyl()?.mul(&core) } else { core })
    }
}

fn try_factor(group: &ParamodularGroup, k: &GSp4Elem, weyl: bool) -> Result<Option<Factorization>> {
    let ctx = group.ctx();
    let (a, b, c, d) = (k.block(0, 0), k.block(0, 1), k.block(1, 0), k.block(1, 1));
    if d.det().is_zero() {
        return Ok(None);
    }
    let di = d.inv()?;
    let y = b.mul(&di);
    let z = di.mul(&c);
    let z2 = PadicMat2::zero(ctx);
    let levi = GSp4Elem::from_blocks(ctx, &a.sub(&y.mul(&c)), &z2, &z2, &d);
    if !y.is_hankel() || !z.is_hankel() {
        return Ok(None);
    }
    if group.contains(&n_elem(ctx, &y))? && group.contains(&nbar_elem(ctx, &z))? && group.contains(&levi)? {
        Ok(Some(Factorization { weyl, y, levi, z }))
    } else {
        Ok(None)
    }
}

/// Factor `k` as `n_y a nbar_z`, or `w_m n_y a nbar_z` for complete groups.
pub fn factor_element(group: &ParamodularGroup, k: &GSp4Elem) -> Result<Option<Factorization>> {
    if let Some(f) = try_factor(group, k, false)? {
        return Ok(Some(f));
    }
    if group.spec.flavor == Flavor::Complete {
        let w = group.weyl()?;
        return try_factor(group, &w.inv()?.mul(k), true);
    }
    Ok(None)
}

/// Seeded random words in generators of a paramodular group.
pub struct GroupSampler {
    group: ParamodularGroup,
    rng: ChaCha8Rng,
    pub word_length: usize,
}

impl GroupSampler {
    pub fn new(group: &ParamodularGroup, seed: u64) -> Self {
        GroupSampler { group: group.clone(), rng: ChaCha8Rng::seed_from_u64(seed), word_length: 6 }
    }

    fn coeff(&mut self) -> FieldElem {
        let ctx = self.group.ctx();
        let bound = (ctx.p as i64).pow(3);
        ctx.int(self.rng.gen_range(0..bound))
    }

    fn lattice_elem(&mut self, l: &Lattice2) -> PadicMat2 {
        let ctx = self.group.ctx().clone();
        let mut acc = PadicMat2::zero(&ctx);
        for b in l.basis() {
            acc = acc.add(&b.scale(&self.coeff()));
        }
        acc
    }

    fn unit(&mut self) -> FieldElem {
        loop {
            let c = self.coeff();
            if c.is_unit() {
                return c;
            }
        }
    }

    /// `a_h u^` with `h` a random unit of the diagonal order.
    fn levi(&mut self) -> GSp4Elem {
        let ctx = self.group.ctx().clone();
        let lat = self.group.diag_lat.clone();
        loop {
            let h = self.lattice_elem(&lat);
            if h.det().is_unit() {
                let u = self.unit();
                return u_hat(&ctx, &u).mul(&a_elem(&ctx, &h));
            }
        }
    }

    fn generator(&mut self) -> GSp4Elem {
        let ctx = self.group.ctx().clone();
        let choices = if self.group.spec.flavor == Flavor::Complete { 4 } else { 3 };
        match self.rng.gen_range(0..choices) {
            0 => {
                let l = self.group.n_lat.clone();
                n_elem(&ctx, &self.lattice_elem(&l))
            }
            1 => {
                let l = self.group.nbar_lat.clone();
                nbar_elem(&ctx, &self.lattice_elem(&l))
            }
            2 => self.levi(),
            _ => self.group.weyl().expect("Weyl element of a complete group"),
        }
    }

    pub fn sample(&mut self) -> GSp4Elem {
        let mut g = self.generator();
        for _ in 1..self.word_length {
            g = g.mul(&self.generator());
        }
        g
    }
}

/// Outcome of sampled factorization.
#[derive(Debug, Clone, Serialize)]
pub struct DecompositionReport {
    pub group: String,
    pub samples: usize,
    pub seed: u64,
    pub weyl_cell: usize,
    pub failures: Vec<String>,
}

impl DecompositionReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Factor `samples` random elements plus the identity.
pub fn verify_decomposition(spec: &ParamodularSpec, samples: usize, seed: u64) -> Result<DecompositionReport> {
    if !spec.decomposition_in_range() {
        return Err(ParamodularError::OutOfRange(spec.tag()));
    }
    let group = ParamodularGroup::new(spec)?;
    let mut sampler = GroupSampler::new(&group, seed);
    let mut report =
        DecompositionReport { group: spec.tag(), samples, seed, weyl_cell: 0, failures: Vec::new() };
    let mut elems = vec![GSp4Elem::identity(&spec.ctx)];
    elems.extend((0..samples).map(|_| sampler.sample()));
    for (i, k) in elems.iter().enumerate() {
        let outcome = match factor_element(&group, k) {
            Ok(Some(f)) => match f.product(&group) {
                Ok(prod) if prod.approx_eq(k) => {
                    report.weyl_cell += usize::from(f.weyl);
                    None
                }
                Ok(_) => Some("factors do not multiply back".to_string()),
                Err(e) => Some(e.to_string()),
            },
            Ok(None) => Some("no factorization".to_string()),
            Err(e) => Some(e.to_string()),
        };
        if let Some(why) = outcome {
            report.failures.push(format!("sample {i}: {why}"));
        }
    }
    Ok(report)
}

/// Sampled closure: products and inverses stay in the group.
#[derive(Debug, Clone, Serialize)]
pub struct ClosureReport {
    pub group: String,
    pub checks: usize,
    pub seed: u64,
    pub failures: usize,
}

pub fn verify_closure(spec: &ParamodularSpec, checks: usize, seed: u64) -> Result<ClosureReport> {
    let group = ParamodularGroup::new(spec)?;
    let mut sampler = GroupSampler::new(&group, seed);
    let mut failures = 0;
    for _ in 0..checks {
        let (k1, k2) = (sampler.sample(), sampler.sample());
        let ok = group.contains(&k1)? && group.contains(&k1.mul(&k2))? && group.contains(&k1.inv()?)?;
        failures += usize::from(!ok);
    }
    Ok(ClosureReport { group: spec.tag(), checks, seed, failures })
}

/// Left coset representatives `g H` inside a parent group.
#[derive(Debug, Clone, Serialize)]
pub struct CosetFamily {
    pub parent: ParamodularSpec,
    pub sub: String,
    pub reps: Vec<GSp4Elem>,
}

impl CosetFamily {
    pub fn len(&self) -> usize {
        self.reps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.reps.is_empty()
    }
}

/// `K_{2m+2} ∩ K_{2m+1}^sharp`.
pub struct EmSubgroup {
    pub big: ParamodularGroup,
    pub sharp: ParamodularGroup,
}

impl EmSubgroup {
    pub fn new(ctx: &QuadExtData, m: u32) -> Result<Self> {
        Ok(EmSubgroup {
            big: ParamodularGroup::new(&ParamodularSpec::new(ctx, m + 1, Flavor::Complete)?)?,
            sharp: ParamodularGroup::new(&ParamodularSpec::new(ctx, m, Flavor::Sharp)?)?,
        })
    }

    pub fn contains(&self, g: &GSp4Elem) -> Result<bool> {
        Ok(self.big.contains(g)? && self.sharp.contains(g)?)
    }

    /// Index of the representative whose coset contains `g`.
    pub fn locate(&self, reps: &[GSp4Elem], g: &GSp4Elem) -> Result<Vec<usize>> {
        let mut hits = Vec::new();
        for (i, r) in reps.iter().enumerate() {
            if self.contains(&r.inv()?.mul(g))? {
                hits.push(i);
            }
        }
        Ok(hits)
    }
}

/// `{w_{m+1}} ∪ {n_y : y = dv^{-1} x rho^{-(m+1)}, x in O/P}` for
/// `K_{2m+2} / (K_{2m+2} ∩ K_{2m+1}^sharp)`.
pub fn coset_reps_em(ctx: &QuadExtData, m: u32) -> Result<CosetFamily> {
    let parent = ParamodularSpec::new(ctx, m + 1, Flavor::Complete)?;
    ParamodularSpec::new(ctx, m, Flavor::Sharp)?;
    let mut reps = vec![special_element(ctx, SpecialName::Weyl(m as i64 + 1))?];
    let shift = ctx.uniformizer_pow(-(m as i64 + 1))?.scale(&ctx.int(ctx.dv as i64).inv()?);
    for x in residue_reps(ctx, 1)? {
        reps.push(n_elem(ctx, &PadicMat2::embed(ctx, &x.mul(&shift, ctx))));
    }
    Ok(CosetFamily { parent, sub: format!("K_{} ∩ K_{}^sharp", 2 * m + 2, 2 * m + 1), reps })
}

/// Cosets reached from the identity coset under `gens`, as representative
/// indices. Errors if a reached coset has no representative.
pub fn orbit_closure(sub: &EmSubgroup, reps: &[GSp4Elem], gens: &[GSp4Elem]) -> Result<Vec<usize>> {
    let start = sub.locate(reps, &GSp4Elem::identity(sub.big.ctx()))?;
    let Some(&s) = start.first() else {
        return Err(ParamodularError::TooLarge(0));
    };
    let mut seen = vec![false; reps.len()];
    seen[s] = true;
    let mut queue = VecDeque::from([s]);
    while let Some(i) = queue.pop_front() {
        for g in gens {
            let hits = sub.locate(reps, &g.mul(&reps[i]))?;
            if hits.len() != 1 {
                return Err(ParamodularError::TooLarge(hits.len()));
            }
            if !seen[hits[0]] {
                seen[hits[0]] = true;
                queue.push_back(hits[0]);
            }
        }
    }
    Ok((0..reps.len()).filter(|&i| seen[i]).collect())
}

/// Generators of `K_{2m+2}` used for orbit checks: lattice bases of
/// `N_K`, `Nbar_K`, torus and Levi units, and the Weyl element.
pub fn em_generators(sub: &EmSubgroup) -> Result<Vec<GSp4Elem>> {
    let g = &sub.big;
    let ctx = g.ctx();
    let mut gens = Vec::new();
    for b in g.n_lat.basis() {
        gens.push(n_elem(ctx, b));
        gens.push(n_elem(ctx, &b.neg()));
    }
    for b in g.nbar_lat.basis() {
        gens.push(nbar_elem(ctx, b));
        gens.push(nbar_elem(ctx, &b.neg()));
    }
    for t in residue_reps(ctx, 1)? {
        if t.norm(ctx).is_unit() {
            gens.push(torus_elem(ctx, &t));
        }
    }
    for b in g.diag_lat.basis() {
        let h = PadicMat2::identity(ctx).add(b);
        if h.det().is_unit() {
            gens.push(a_elem(ctx, &h));
        }
    }
    gens.push(u_hat(ctx, &ctx.int(-1)));
    gens.push(g.weyl()?);
    Ok(gens)
}

/// Partition check of `coset_reps_em`.
#[derive(Debug, Clone, Serialize)]
pub struct CosetReport {
    pub group: String,
    pub count: usize,
    pub orbit: usize,
    pub distinct: bool,
    pub samples: usize,
    pub misplaced: usize,
}

impl CosetReport {
    pub fn passed(&self) -> bool {
        self.orbit == self.count && self.distinct && self.misplaced == 0
    }
}

/// Orbit closure under generators of `K_{2m+2}`, pairwise distinctness, and
/// `samples` random elements each landing in exactly one coset.
pub fn verify_em_cosets(ctx: &QuadExtData, m: u32, samples: usize, seed: u64) -> Result<CosetReport> {
    let fam = coset_reps_em(ctx, m)?;
    let sub = EmSubgroup::new(ctx, m)?;
    let gens = em_generators(&sub)?;
    let orbit = orbit_closure(&sub, &fam.reps, &gens)?.len();
    let mut distinct = true;
    for (i, a) in fam.reps.iter().enumerate() {
        let ai = a.inv()?;
        for b in &fam.reps[i + 1..] {
            distinct &= !sub.contains(&ai.mul(b))?;
        }
    }
    let mut sampler = GroupSampler::new(&sub.big, seed);
    let mut misplaced = 0;
    for _ in 0..samples {
        misplaced += usize::from(sub.locate(&fam.reps, &sampler.sample())?.len() != 1);
    }
    Ok(CosetReport { group: fam.parent.tag(), count: fam.len(), orbit, distinct, samples, misplaced })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum HeckeDirection {
    #[serde(rename = "+")]
    Plus,
    #[serde(rename = "-")]
    Minus,
}

/// Plus: `n_y u^(varpi)` for `y` in `L_N / varpi L_N`.
/// Minus: `nbar_z u^(varpi)^{-1}` for `z` in `L_Nbar / varpi L_Nbar`.
pub fn hecke_coset_reps(spec: &ParamodularSpec, dir: HeckeDirection) -> Result<CosetFamily> {
    let group = ParamodularGroup::new(spec)?;
    let ctx = &spec.ctx;
    let (lat, w) = match dir {
        HeckeDirection::Plus => (group.n_lat.clone(), u_hat(ctx, &ctx.varpi_pow(1))),
        HeckeDirection::Minus => (group.nbar_lat.clone(), u_hat(ctx, &ctx.varpi_pow(-1))),
    };
    let p = ctx.p as i64;
    let basis = lat.basis();
    let mut reps = Vec::new();
    for idx in 0..p.pow(basis.len() as u32) {
        let mut rest = idx;
        let mut y = PadicMat2::zero(ctx);
        for b in basis {
            y = y.add(&b.scale(&ctx.int(rest % p)));
            rest /= p;
        }
        let n = match dir {
            HeckeDirection::Plus => n_elem(ctx, &y),
            HeckeDirection::Minus => nbar_elem(ctx, &y),
        };
        reps.push(n.mul(&w));
    }
    let sub = match dir {
        HeckeDirection::Plus => format!("{} u^(varpi) {} / {}", spec.tag(), spec.tag(), spec.tag()),
        HeckeDirection::Minus => format!("{} u^(varpi)^-1 {} / {}", spec.tag(), spec.tag(), spec.tag()),
    };
    Ok(CosetFamily { parent: spec.clone(), sub, reps })
}

/// No two representatives share a coset of `group`.
pub fn pairwise_distinct(group: &ParamodularGroup, reps: &[GSp4Elem]) -> Result<bool> {
    for (i, a) in reps.iter().enumerate() {
        let ai = a.inv()?;
        for b in &reps[i + 1..] {
            if group.contains(&ai.mul(b))? {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::localfield::classify_case_with_precision;

    fn ctx(p: u64, case: QuadCase) -> QuadExtData {
        classify_case_with_precision(p, case, 16).unwrap()
    }

    fn group(c: &QuadExtData, m: u32, f: Flavor) -> ParamodularGroup {
        ParamodularGroup::new(&ParamodularSpec::new(c, m, f).unwrap()).unwrap()
    }

    #[test]
    fn special_elements_are_symplectic() {
        for case in [QuadCase::UI, QuadCase::RI, QuadCase::Split] {
            let c = ctx(3, case);
            let mut names = vec![SpecialName::AtkinLehner, SpecialName::Weyl(0), SpecialName::Weyl(2)];
            names.extend([SpecialName::WeylPrime(1), SpecialName::HatWpi(1)]);
            if case.is_ramified() {
                names.push(SpecialName::Sp);
            }
            for n in names {
                let g = special_element(&c, n).unwrap();
                assert!(g.is_symplectic(), "{case} {n}");
            }
        }
        let c = ctx(2, QuadCase::RII);
        assert!(special_element(&c, SpecialName::UAlpha).unwrap().is_symplectic());
        assert!(special_element(&ctx(3, QuadCase::UI), SpecialName::Sp).is_err());
        assert!(special_element(&ctx(3, QuadCase::RI), SpecialName::UAlpha).is_err());
    }

    #[test]
    fn special_element_shapes() {
        let c = ctx(3, QuadCase::UI);
        let w0 = special_element(&c, SpecialName::Weyl(0)).unwrap();
        let expect = int_matrix(&c, &[(0, 2, c.int(-1)), (1, 3, c.int(-1)), (2, 0, c.one()), (3, 1, c.one())]);
        assert!(w0.approx_eq(&expect));
        assert_eq!(w0.similitude, c.one());
        let al = special_element(&c, SpecialName::AtkinLehner).unwrap();
        let expect = int_matrix(&c, &[(0, 0, c.one()), (1, 1, c.int(-1)), (2, 2, c.int(-1)), (3, 3, c.one())]);
        assert!(al.approx_eq(&expect));
        let u = special_element(&c, SpecialName::HatWpi(1)).unwrap();
        assert_eq!(u.mat[0][0], c.int(3));
        assert_eq!(u.mat[2][2], c.one());
        assert_eq!(u.similitude, c.int(3));
        let wp = special_element(&c, SpecialName::WeylPrime(1)).unwrap();
        assert_eq!(wp.similitude, c.int(3));
    }

    #[test]
    fn inverse_and_identity() {
        let c = ctx(3, QuadCase::RI);
        let g = group(&c, 1, Flavor::Complete);
        let mut s = GroupSampler::new(&g, 7);
        for _ in 0..20 {
            let k = s.sample();
            assert!(k.is_symplectic());
            assert!(k.mul(&k.inv().unwrap()).is_identity());
        }
    }

    #[test]
    fn embed_gamma_torus_and_identity() {
        for case in [QuadCase::UI, QuadCase::RI, QuadCase::RII, QuadCase::Split] {
            let c = ctx(if case == QuadCase::RII { 2 } else { 3 }, case);
            let one = c.quad_one();
            let zero = c.quad(c.zero(), c.zero());
            let id = embed_gamma(&c, &[[one, zero], [zero, one]]).unwrap();
            assert!(id.is_identity());
            let a = c.quad(c.int(2), c.int(1));
            let t = embed_gamma(&c, &[[a, zero], [zero, a.conj()]]).unwrap();
            assert!(t.is_symplectic());
            assert_eq!(t.similitude, a.norm(&c));
            if case != QuadCase::Split {
                assert!(t.approx_eq(&torus_elem(&c, &a)));
            }
            let bad = embed_gamma(&c, &[[a, zero], [zero, one]]);
            assert!(matches!(bad, Err(ParamodularError::NotRational)));
        }
    }

    #[test]
    fn atkin_lehner_conjugates_gamma() {
        for case in [QuadCase::UI, QuadCase::RI] {
            let c = ctx(3, case);
            let io = special_element(&c, SpecialName::AtkinLehner).unwrap();
            let x = c.quad(c.int(2), c.int(1));
            let y = c.quad(c.int(1), c.int(4));
            let z = c.quad(c.int(5), c.int(-1));
            // w chosen so that x w - y z lies in F
            let yz = y.mul(&z, &c);
            let w = x.inv(&c).unwrap().mul(&yz.add(&c.quad(c.int(7), c.zero())), &c);
            let g = [[x, y], [z, w]];
            let gc = [[x.conj(), y.conj()], [z.conj(), w.conj()]];
            let lhs = embed_gamma(&c, &g).unwrap().conj_by(&io).unwrap();
            assert!(lhs.approx_eq(&embed_gamma(&c, &gc).unwrap()));
        }
    }

    #[test]
    fn weyl_elements_in_complete_groups() {
        for case in [QuadCase::UI, QuadCase::RI, QuadCase::Split] {
            let c = ctx(3, case);
            let top = if case == QuadCase::Split { 1 } else { 3 };
            for m in 0..top {
                let g = group(&c, m, Flavor::Complete);
                assert!(g.contains(&g.weyl().unwrap()).unwrap());
            }
        }
    }

    #[test]
    fn flavors_shrink_along_the_chain() {
        let c = ctx(3, QuadCase::UI);
        for m in 1..3 {
            let chain: Vec<_> =
                [Flavor::Complete, Flavor::Flat, Flavor::Plain, Flavor::Sharp].iter().map(|&f| group(&c, m, f)).collect();
            for i in 0..4 {
                let mut s = GroupSampler::new(&chain[i], 11 + i as u64);
                for _ in 0..30 {
                    let k = s.sample();
                    for g in &chain[..=i] {
                        assert!(g.contains(&k).unwrap());
                    }
                }
            }
            assert!(!chain[3].contains(&chain[0].weyl().unwrap()).unwrap());
        }
    }

    #[test]
    fn normalized_by_iota_and_torus() {
        for case in [QuadCase::UI, QuadCase::RI] {
            let c = ctx(3, case);
            let io = special_element(&c, SpecialName::AtkinLehner).unwrap();
            let t = torus_elem(&c, &c.quad(c.int(1), c.int(1)));
            for f in [Flavor::Complete, Flavor::Plain, Flavor::Sharp] {
                let g = group(&c, 1, f);
                let mut s = GroupSampler::new(&g, 5);
                for _ in 0..50 {
                    let k = s.sample();
                    assert!(g.contains(&k.conj_by(&io).unwrap()).unwrap());
                    assert!(g.contains(&k.conj_by(&t).unwrap()).unwrap());
                }
            }
        }
    }

    #[test]
    fn weyl_prime_normalizes_odd_levels_in_case_u() {
        let c = ctx(3, QuadCase::UI);
        for m in 0..3 {
            let wp = special_element(&c, SpecialName::WeylPrime(m as i64)).unwrap();
            for f in [Flavor::Plain, Flavor::Sharp] {
                let g = group(&c, m, f);
                let mut s = GroupSampler::new(&g, 17);
                for _ in 0..30 {
                    let k = s.sample();
                    assert!(g.contains(&k.conj_by(&wp).unwrap()).unwrap());
                }
            }
        }
    }

    fn pattern_member(k: &GSp4Elem, pat: [[i64; 4]; 4]) -> bool {
        k.similitude.is_unit()
            && (0..4).all(|i| (0..4).all(|j| k.mat[i][j].val_or_inf() >= pat[i][j]))
    }

    #[test]
    fn k1_is_hecke_subgroup_in_u_i() {
        let c = ctx(3, QuadCase::UI);
        let k1 = group(&c, 0, Flavor::Plain);
        let pat = [[0, 0, 0, 0], [0, 0, 0, 0], [1, 1, 0, 0], [1, 1, 0, 0]];
        let mut s = GroupSampler::new(&k1, 3);
        for _ in 0..200 {
            assert!(pattern_member(&s.sample(), pat));
        }
        // the other direction, from integral generators of the Hecke subgroup
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let mut rnd = |lo: i64| c.int(rng.gen_range(0..27) * 3i64.pow(lo as u32));
        for _ in 0..200 {
            let y = PadicMat2::new(rnd(0), rnd(0), rnd(0), c.zero());
            let y = PadicMat2::new(y.a[0][0], y.a[0][1], y.a[1][0], y.a[0][0]);
            let z = PadicMat2::new(rnd(1), rnd(1), rnd(1), c.zero());
            let z = PadicMat2::new(z.a[0][0], z.a[0][1], z.a[1][0], z.a[0][0]);
            let h = loop {
                let h = PadicMat2::new(rnd(0), rnd(0), rnd(0), rnd(0));
                if h.det().is_unit() {
                    break h;
                }
            };
            let k = n_elem(&c, &y).mul(&a_elem(&c, &h)).mul(&nbar_elem(&c, &z));
            assert!(pattern_member(&k, pat));
            assert!(k1.contains(&k).unwrap());
        }
    }

    #[test]
    fn r_i_low_levels_match_block_patterns() {
        let c = ctx(3, QuadCase::RI);
        let k2 = group(&c, 1, Flavor::Complete);
        let k3f = group(&c, 1, Flavor::Flat);
        let p2 = [[0, 1, 0, 0], [0, 0, -1, 0], [1, 1, 0, 1], [0, 1, 0, 0]];
        let p3 = [[0, 1, 0, 0], [0, 0, -1, 0], [1, 1, 0, 1], [1, 1, 0, 0]];
        for (g, pat) in [(&k2, p2), (&k3f, p3)] {
            let mut s = GroupSampler::new(g, 9);
            for _ in 0..100 {
                assert!(pattern_member(&s.sample(), pat));
            }
            let sp = special_element(&c, SpecialName::Sp).unwrap();
            assert!(g.contains(&sp).unwrap());
        }
    }

    #[test]
    fn sp_twisted_by_u_alpha_in_r_ii() {
        let c = ctx(2, QuadCase::RII);
        let sp = special_element(&c, SpecialName::Sp).unwrap();
        let ua = special_element(&c, SpecialName::UAlpha).unwrap();
        let x = sp.conj_by(&ua).unwrap();
        assert!(group(&c, 1, Flavor::Complete).contains(&x).unwrap());
        assert!(group(&c, 1, Flavor::Flat).contains(&x).unwrap());
    }

    #[test]
    fn closure_small() {
        let c = ctx(3, QuadCase::RI);
        let spec = ParamodularSpec::new(&c, 2, Flavor::Sharp).unwrap();
        let r = verify_closure(&spec, 50, 1).unwrap();
        assert_eq!(r.failures, 0);
    }

    #[test]
    fn decomposition_small() {
        let c = ctx(3, QuadCase::UI);
        for f in [Flavor::Complete, Flavor::Flat, Flavor::Plain, Flavor::Sharp] {
            let spec = ParamodularSpec::new(&c, 1, f).unwrap();
            let r = verify_decomposition(&spec, 50, 2).unwrap();
            assert!(r.passed(), "{:?}", r.failures);
            if f != Flavor::Complete {
                assert_eq!(r.weyl_cell, 0);
            }
        }
        let below = ParamodularSpec::new(&c, 0, Flavor::Complete).unwrap();
        assert!(verify_decomposition(&below, 1, 0).is_err());
    }

    #[test]
    fn admissibility() {
        let u = ctx(3, QuadCase::UI);
        let r = ctx(3, QuadCase::RI);
        assert!(ParamodularSpec::new(&u, 0, Flavor::Flat).is_err());
        assert!(ParamodularSpec::new(&u, 0, Flavor::Sharp).is_ok());
        assert!(ParamodularSpec::new(&r, 0, Flavor::Plain).is_err());
        assert!(ParamodularSpec::new(&r, 1, Flavor::Plain).is_ok());
        assert_eq!(ParamodularSpec::new(&r, 1, Flavor::Flat).unwrap().tag(), "K_3^flat");
    }

    #[test]
    fn hecke_counts() {
        let u = ctx(3, QuadCase::UI);
        let spec = ParamodularSpec::new(&u, 0, Flavor::Sharp).unwrap();
        let g = ParamodularGroup::new(&spec).unwrap();
        for d in [HeckeDirection::Plus, HeckeDirection::Minus] {
            let fam = hecke_coset_reps(&spec, d).unwrap();
            assert_eq!(fam.len(), 27);
            assert!(pairwise_distinct(&g, &fam.reps).unwrap());
        }
        let r = ctx(3, QuadCase::RI);
        let spec = ParamodularSpec::new(&r, 1, Flavor::Sharp).unwrap();
        let fam = hecke_coset_reps(&spec, HeckeDirection::Minus).unwrap();
        assert_eq!(fam.len(), 27);
        assert!(pairwise_distinct(&ParamodularGroup::new(&spec).unwrap(), &fam.reps).unwrap());
    }

    #[test]
    fn em_cosets_small() {
        let c = ctx(3, QuadCase::RI);
        let fam = coset_reps_em(&c, 1).unwrap();
        assert_eq!(fam.len(), 4);
        let sub = EmSubgroup::new(&c, 1).unwrap();
        let gens = em_generators(&sub).unwrap();
        let orbit = orbit_closure(&sub, &fam.reps, &gens).unwrap();
        assert_eq!(orbit.len(), 4);
    }

    #[test]
    fn split_positive_levels_rejected() {
        let c = ctx(3, QuadCase::Split);
        assert!(ParamodularSpec::new(&c, 0, Flavor::Complete).is_ok());
        for f in [Flavor::Complete, Flavor::Flat, Flavor::Plain, Flavor::Sharp] {
            assert!(matches!(ParamodularSpec::new(&c, 1, f), Err(ParamodularError::SplitLevel(_))));
        }
        // the display itself is not closed under products at m = 1
        let spec = ParamodularSpec { level_m: 1, flavor: Flavor::Complete, ctx: c };
        assert!(verify_closure(&spec, 50, 1).unwrap().failures > 0);
    }
}
