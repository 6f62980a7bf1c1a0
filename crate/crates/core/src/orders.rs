//! `M_2(F)` with its embedded copy of `E`, the orders `R_m`, their Hankel
//! parts, duals, and unit quotients.
//!
//! `E` sits in `M_2(F)` through `x + y sigma -> [[x, e y], [y, x]]`. The
//! nilpotent `h = [[0, 1], [0, 0]]` and `iota = diag(1, -1)` complete the
//! picture: `M_2(F) = E + E h`, and conjugation by `iota` is the Galois
//! involution on `E`.

use serde::ser::{Serialize, SerializeSeq, Serializer};
use thiserror::Error;

use crate::localfield::{residue_reps, FieldElem, FieldError, QuadCase, QuadElem, QuadExtData};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum OrderError {
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error("degenerate basis or Gram matrix")]
    Degenerate,
    #[error("level {m} is below the admissible range (needs m >= {min})")]
    BelowRange { m: i64, min: i64 },
}

/// A 2x2 matrix over the truncated field.
#[derive(Clone, Copy, PartialEq)]
pub struct PadicMat2 {
    pub a: [[FieldElem; 2]; 2],
}

impl std::fmt::Debug for PadicMat2 {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "[[{:?}, {:?}], [{:?}, {:?}]]", self.a[0][0], self.a[0][1], self.a[1][0], self.a[1][1])
    }
}

impl PadicMat2 {
    pub fn new(a11: FieldElem, a12: FieldElem, a21: FieldElem, a22: FieldElem) -> Self {
        PadicMat2 { a: [[a11, a12], [a21, a22]] }
    }

    pub fn from_ints(ctx: &QuadExtData, v: [[i64; 2]; 2]) -> Self {
        Self::new(ctx.int(v[0][0]), ctx.int(v[0][1]), ctx.int(v[1][0]), ctx.int(v[1][1]))
    }

    pub fn zero(ctx: &QuadExtData) -> Self {
        let z = ctx.zero();
        Self::new(z, z, z, z)
    }

    pub fn identity(ctx: &QuadExtData) -> Self {
        Self::scalar(ctx, ctx.one())
    }

    pub fn scalar(ctx: &QuadExtData, c: FieldElem) -> Self {
        let z = ctx.zero();
        Self::new(c, z, z, c)
    }

    /// `h = [[0, 1], [0, 0]]`.
    pub fn h(ctx: &QuadExtData) -> Self {
        let z = ctx.zero();
        Self::new(z, ctx.one(), z, z)
    }

    /// `iota = diag(1, -1)`.
    pub fn iota(ctx: &QuadExtData) -> Self {
        let z = ctx.zero();
        Self::new(ctx.one(), z, z, ctx.one().neg())
    }

    /// `j = [[0, 1], [1, 0]]`.
    pub fn j(ctx: &QuadExtData) -> Self {
        let z = ctx.zero();
        Self::new(z, ctx.one(), ctx.one(), z)
    }

    /// Image of `x + y sigma`.
    pub fn embed(ctx: &QuadExtData, z: &QuadElem) -> Self {
        Self::new(z.x, ctx.e_elem().mul(&z.y), z.y, z.x)
    }

    pub fn entries(&self) -> [FieldElem; 4] {
        [self.a[0][0], self.a[0][1], self.a[1][0], self.a[1][1]]
    }

    pub fn from_entries(v: [FieldElem; 4]) -> Self {
        Self::new(v[0], v[1], v[2], v[3])
    }

    pub fn add(&self, o: &Self) -> Self {
        let (x, y) = (self.entries(), o.entries());
        Self::from_entries(std::array::from_fn(|i| x[i].add(&y[i])))
    }

    pub fn sub(&self, o: &Self) -> Self {
        let (x, y) = (self.entries(), o.entries());
        Self::from_entries(std::array::from_fn(|i| x[i].sub(&y[i])))
    }

    pub fn neg(&self) -> Self {
        Self::from_entries(self.entries().map(|v| v.neg()))
    }

    pub fn scale(&self, c: &FieldElem) -> Self {
        Self::from_entries(self.entries().map(|v| v.mul(c)))
    }

    pub fn mul(&self, o: &Self) -> Self {
        let a = &self.a;
        let b = &o.a;
        let cell = |i: usize, k: usize| a[i][0].mul(&b[0][k]).add(&a[i][1].mul(&b[1][k]));
        Self::new(cell(0, 0), cell(0, 1), cell(1, 0), cell(1, 1))
    }

    pub fn det(&self) -> FieldElem {
        self.a[0][0].mul(&self.a[1][1]).sub(&self.a[0][1].mul(&self.a[1][0]))
    }

    pub fn trace(&self) -> FieldElem {
        self.a[0][0].add(&self.a[1][1])
    }

    /// Main involution `x* = adj(x)`, so that `x x* = det(x)`.
    pub fn adj(&self) -> Self {
        Self::new(self.a[1][1], self.a[0][1].neg(), self.a[1][0].neg(), self.a[0][0])
    }

    pub fn transpose(&self) -> Self {
        Self::new(self.a[0][0], self.a[1][0], self.a[0][1], self.a[1][1])
    }

    pub fn inv(&self) -> Result<Self, FieldError> {
        let d = self.det();
        if d.is_zero() {
            return Err(FieldError::NotInvertible);
        }
        Ok(self.adj().scale(&d.inv()?))
    }

    /// `iota x iota`.
    pub fn iota_conj(&self) -> Self {
        Self::new(self.a[0][0], self.a[0][1].neg(), self.a[1][0].neg(), self.a[1][1])
    }

    /// Equal diagonal entries: the span of `1, sigma, h`.
    pub fn is_hankel(&self) -> bool {
        self.a[0][0] == self.a[1][1]
    }

    pub fn min_valuation(&self) -> i64 {
        self.entries().iter().map(|v| v.val_or_inf()).min().expect("four entries")
    }
}

fn mat_to_strings(m: &PadicMat2) -> [[String; 2]; 2] {
    [
        [m.a[0][0].to_string(), m.a[0][1].to_string()],
        [m.a[1][0].to_string(), m.a[1][1].to_string()],
    ]
}

/// Solve `sum c_i b_i = t` for coordinates `c`; `Ok(None)` if `t` is not in
/// the span. Pivots on minimal valuation.
fn solve_coords(
    basis: &[[FieldElem; 4]],
    target: &[FieldElem; 4],
) -> Result<Option<Vec<FieldElem>>, FieldError> {
    let r = basis.len();
    // rows = 4 entry positions, columns = basis vectors, last = target
    let mut m: Vec<Vec<FieldElem>> = (0..4)
        .map(|row| {
            let mut v: Vec<FieldElem> = basis.iter().map(|b| b[row]).collect();
            v.push(target[row]);
            v
        })
        .collect();
    let mut row = 0;
    for col in 0..r {
        let best = (row..4)
            .filter(|&i| !m[i][col].is_zero())
            .min_by_key(|&i| m[i][col].val_or_inf());
        let Some(best) = best else {
            return Err(FieldError::PrecisionExhausted("basis lost rank".into()));
        };
        m.swap(row, best);
        let piv_inv = m[row][col].inv()?;
        for c in col..=r {
            m[row][c] = m[row][c].mul(&piv_inv);
        }
        for i in 0..4 {
            if i != row && !m[i][col].is_exact_zero() {
                let factor = m[i][col];
                for c in col..=r {
                    let t = factor.mul(&m[row][c]);
                    m[i][c] = m[i][c].sub(&t);
                }
            }
        }
        row += 1;
    }
    for leftover in m.iter().skip(r) {
        if !leftover[r].is_zero() {
            return Ok(None);
        }
    }
    Ok(Some((0..r).map(|i| m[i][r]).collect()))
}

/// An `o`-lattice in `M_2(F)` of rank 3 or 4, given by a basis.
#[derive(Clone)]
pub struct Lattice2 {
    basis: Vec<PadicMat2>,
    /// Coordinate map for full-rank lattices.
    inv: Option<[[FieldElem; 4]; 4]>,
    pub ctx: QuadExtData,
}

impl std::fmt::Debug for Lattice2 {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_list().entries(self.basis.iter()).finish()
    }
}

impl Serialize for Lattice2 {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(self.basis.len()))?;
        for b in &self.basis {
            seq.serialize_element(&mat_to_strings(b))?;
        }
        seq.end()
    }
}

fn invert4(m: [[FieldElem; 4]; 4], one: FieldElem) -> Result<[[FieldElem; 4]; 4], FieldError> {
    let z = FieldElem::zero(one.prime());
    let mut a: Vec<Vec<FieldElem>> = (0..4)
        .map(|i| {
            let mut row = m[i].to_vec();
            row.extend((0..4).map(|j| if i == j { one } else { z }));
            row
        })
        .collect();
    for col in 0..4 {
        let best = (col..4)
            .filter(|&i| !a[i][col].is_zero())
            .min_by_key(|&i| a[i][col].val_or_inf())
            .ok_or(FieldError::NotInvertible)?;
        a.swap(col, best);
        let pinv = a[col][col].inv()?;
        for c in 0..8 {
            a[col][c] = a[col][c].mul(&pinv);
        }
        for i in 0..4 {
            if i != col && !a[i][col].is_exact_zero() {
                let factor = a[i][col];
                for c in 0..8 {
                    let t = factor.mul(&a[col][c]);
                    a[i][c] = a[i][c].sub(&t);
                }
            }
        }
    }
    Ok(std::array::from_fn(|i| std::array::from_fn(|j| a[i][j + 4])))
}

impl Lattice2 {
    pub fn new(ctx: &QuadExtData, basis: Vec<PadicMat2>) -> Result<Self, OrderError> {
        if !(3..=4).contains(&basis.len()) {
            return Err(OrderError::Degenerate);
        }
        let inv = if basis.len() == 4 {
            // columns of the coordinate matrix are the basis vectors
            let cols: Vec<[FieldElem; 4]> = basis.iter().map(|b| b.entries()).collect();
            let m: [[FieldElem; 4]; 4] = std::array::from_fn(|i| std::array::from_fn(|j| cols[j][i]));
            Some(invert4(m, ctx.one()).map_err(|_| OrderError::Degenerate)?)
        } else {
            None
        };
        Ok(Lattice2 { basis, inv, ctx: ctx.clone() })
    }

    pub fn basis(&self) -> &[PadicMat2] {
        &self.basis
    }

    pub fn rank(&self) -> usize {
        self.basis.len()
    }

    /// Coordinates of `m` in the basis, if `m` is in the `F`-span.
    pub fn coords(&self, m: &PadicMat2) -> Result<Option<Vec<FieldElem>>, FieldError> {
        let t = m.entries();
        if let Some(inv) = &self.inv {
            let c = (0..4)
                .map(|i| (0..4).fold(self.ctx.zero(), |acc, j| acc.add(&inv[i][j].mul(&t[j]))))
                .collect();
            return Ok(Some(c));
        }
        let b: Vec<[FieldElem; 4]> = self.basis.iter().map(|b| b.entries()).collect();
        solve_coords(&b, &t)
    }

    /// Membership: all coordinates integral, with certified precision.
    pub fn contains(&self, m: &PadicMat2) -> Result<bool, FieldError> {
        match self.coords(m)? {
            None => Ok(false),
            Some(c) => {
                for v in c {
                    if !v.is_integral()? {
                        return Ok(false);
                    }
                }
                Ok(true)
            }
        }
    }

    /// `other` is contained in `self`.
    pub fn contains_lattice(&self, other: &Lattice2) -> Result<bool, FieldError> {
        for b in &other.basis {
            if !self.contains(b)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    pub fn same_as(&self, other: &Lattice2) -> Result<bool, FieldError> {
        Ok(self.contains_lattice(other)? && other.contains_lattice(self)?)
    }

    /// `{ s x : x in L }`.
    pub fn left_mul(&self, s: &PadicMat2) -> Result<Lattice2, OrderError> {
        Lattice2::new(&self.ctx, self.basis.iter().map(|b| s.mul(b)).collect())
    }

    /// `{ x s : x in L }`.
    pub fn right_mul(&self, s: &PadicMat2) -> Result<Lattice2, OrderError> {
        Lattice2::new(&self.ctx, self.basis.iter().map(|b| b.mul(s)).collect())
    }

    pub fn scale(&self, c: &FieldElem) -> Result<Lattice2, OrderError> {
        Lattice2::new(&self.ctx, self.basis.iter().map(|b| b.scale(c)).collect())
    }

    /// Closed under products of basis elements and contains `1`.
    pub fn is_order(&self) -> Result<bool, FieldError> {
        if !self.contains(&PadicMat2::identity(&self.ctx))? {
            return Ok(false);
        }
        for a in &self.basis {
            for b in &self.basis {
                if !self.contains(&a.mul(b))? {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }

    /// `log_p [self : sub]` for a full-rank sublattice.
    pub fn index_exponent(&self, sub: &Lattice2) -> Result<i64, OrderError> {
        if self.rank() != 4 || sub.rank() != 4 {
            return Err(OrderError::Degenerate);
        }
        let mut cols = Vec::new();
        for b in &sub.basis {
            let c = self.coords(b)?.ok_or(OrderError::Degenerate)?;
            cols.push(c);
        }
        let m: [[FieldElem; 4]; 4] = std::array::from_fn(|i| std::array::from_fn(|j| cols[j][i]));
        let d = det4(&m);
        d.valuation().ok_or(OrderError::Degenerate)
    }
}

fn det4(m: &[[FieldElem; 4]; 4]) -> FieldElem {
    fn minor(m: &[Vec<FieldElem>]) -> FieldElem {
        let n = m.len();
        if n == 1 {
            return m[0][0];
        }
        let p = m[0][0].prime();
        let mut acc = FieldElem::zero(p);
        for c in 0..n {
            let sub: Vec<Vec<FieldElem>> = m[1..]
                .iter()
                .map(|row| row.iter().enumerate().filter(|(j, _)| *j != c).map(|(_, v)| *v).collect())
                .collect();
            let term = m[0][c].mul(&minor(&sub));
            acc = if c % 2 == 0 { acc.add(&term) } else { acc.sub(&term) };
        }
        acc
    }
    let rows: Vec<Vec<FieldElem>> = m.iter().map(|r| r.to_vec()).collect();
    minor(&rows)
}

/// `R = O + dv O h`.
pub fn build_r(ctx: &QuadExtData) -> Result<Lattice2, OrderError> {
    build_rm(ctx, 0)
}

/// `R_m = O + rho^m R`; for `m < 0` this is the lattice `rho^m R`.
pub fn build_rm(ctx: &QuadExtData, m: i64) -> Result<Lattice2, OrderError> {
    ctx.check_supported()?;
    let one = PadicMat2::identity(ctx);
    let omega = PadicMat2::embed(ctx, &ctx.omega());
    let h = PadicMat2::h(ctx);
    let dv = ctx.int(ctx.dv as i64);
    if m >= 0 {
        let rho_m = PadicMat2::embed(ctx, &ctx.uniformizer_pow(m)?).scale(&dv);
        let t = rho_m.mul(&h);
        let basis = vec![one, omega, t, omega.mul(&t)];
        Lattice2::new(ctx, basis)
    } else {
        let r = build_rm(ctx, 0)?;
        let rho_m = PadicMat2::embed(ctx, &ctx.uniformizer_pow(m)?);
        r.left_mul(&rho_m)
    }
}

/// `R^rho`: `R` in case U, `R_1` in case R.
pub fn build_r_rho(ctx: &QuadExtData) -> Result<Lattice2, OrderError> {
    if ctx.case.is_ramified() {
        build_rm(ctx, 1)
    } else {
        build_r(ctx)
    }
}

/// `L ∩ H_2`, the part with equal diagonal entries.
pub fn hankel_part(l: &Lattice2) -> Result<Lattice2, OrderError> {
    let lam: Vec<FieldElem> = l.basis.iter().map(|b| b.a[0][0].sub(&b.a[1][1])).collect();
    let j = (0..lam.len())
        .filter(|&i| !lam[i].is_zero())
        .min_by_key(|&i| lam[i].val_or_inf());
    let Some(j) = j else {
        return Err(OrderError::Degenerate);
    };
    let lj_inv = lam[j].inv()?;
    let mut basis = Vec::new();
    for (i, b) in l.basis.iter().enumerate() {
        if i == j {
            continue;
        }
        let c = lam[i].mul(&lj_inv);
        basis.push(b.sub(&l.basis[j].scale(&c)));
    }
    Lattice2::new(&l.ctx, basis)
}

/// `<x, y> = Tr(x* y) / 2`.
pub fn trace_pairing(ctx: &QuadExtData, x: &PadicMat2, y: &PadicMat2) -> FieldElem {
    x.adj().mul(y).trace().div(&ctx.int(2)).expect("2 is nonzero")
}

/// Dual lattice under [`trace_pairing`].
pub fn dual_lattice(l: &Lattice2) -> Result<Lattice2, OrderError> {
    if l.rank() != 4 {
        return Err(OrderError::Degenerate);
    }
    let ctx = &l.ctx;
    let g: [[FieldElem; 4]; 4] =
        std::array::from_fn(|i| std::array::from_fn(|j| trace_pairing(ctx, &l.basis[i], &l.basis[j])));
    let gi = invert4(g, ctx.one()).map_err(|_| OrderError::Degenerate)?;
    let basis = (0..4)
        .map(|i| {
            (0..4).fold(PadicMat2::zero(ctx), |acc, j| acc.add(&l.basis[j].scale(&gi[i][j])))
        })
        .collect();
    Lattice2::new(ctx, basis)
}

/// `L_m = varpi^{f m} R_m^# (+) R_m`, kept as its two summands.
#[derive(Debug, Clone)]
pub struct LmLattice {
    pub m: i64,
    pub sharp_part: Lattice2,
    pub order_part: Lattice2,
}

pub fn build_lm(ctx: &QuadExtData, m: i64) -> Result<LmLattice, OrderError> {
    if m < 0 {
        return Err(OrderError::BelowRange { m, min: 0 });
    }
    let rm = build_rm(ctx, m)?;
    let sharp = dual_lattice(&rm)?.scale(&ctx.varpi_pow(ctx.f as i64 * m))?;
    Ok(LmLattice { m, sharp_part: sharp, order_part: rm })
}

/// Representatives of `R_m^x / R_{m+1}^x`.
///
/// For `m >= m0` these are `1 + s dv rho^m h` with `s` over residues of
/// `O/P`. For `m = m0 - 1` they are the `1 + s dv rho^m h` with unit
/// determinant.
pub fn unit_quotient_reps(ctx: &QuadExtData, m: i64) -> Result<Vec<PadicMat2>, OrderError> {
    let min = ctx.m0 as i64 - 1;
    if m < min {
        return Err(OrderError::BelowRange { m, min });
    }
    let one = PadicMat2::identity(ctx);
    let t = PadicMat2::embed(ctx, &ctx.uniformizer_pow(m)?)
        .scale(&ctx.int(ctx.dv as i64))
        .mul(&PadicMat2::h(ctx));
    let mut out = Vec::new();
    for s in residue_reps(ctx, 1)? {
        let r = one.add(&PadicMat2::embed(ctx, &s).mul(&t));
        if m >= ctx.m0 as i64 || r.det().is_unit() {
            out.push(r);
        }
    }
    Ok(out)
}

/// `a` and `b` are in the same coset of `R_{m+1}^x`: `a^{-1} b` and its
/// inverse lie in `R_{m+1}`.
pub fn same_unit_coset(next: &Lattice2, a: &PadicMat2, b: &PadicMat2) -> Result<bool, FieldError> {
    let x = a.inv()?.mul(b);
    Ok(next.contains(&x)? && next.contains(&x.inv()?)?)
}

/// Cases where the `{1, sigma}` model of the orders is available.
pub fn supported_case(ctx: &QuadExtData) -> bool {
    !(ctx.case == QuadCase::Split && ctx.p == 2)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::localfield::{classify_case_with_precision, QuadCase};

    fn ctx(p: u64, case: QuadCase) -> QuadExtData {
        classify_case_with_precision(p, case, 12).unwrap()
    }

    fn m2o(c: &QuadExtData) -> Lattice2 {
        let e = |v| PadicMat2::from_ints(c, v);
        Lattice2::new(c, vec![e([[1, 0], [0, 0]]), e([[0, 1], [0, 0]]), e([[0, 0], [1, 0]]), e([[0, 0], [0, 1]])])
            .unwrap()
    }

    fn lat(c: &QuadExtData, vs: &[[[i64; 2]; 2]]) -> Lattice2 {
        Lattice2::new(c, vs.iter().map(|v| PadicMat2::from_ints(c, *v)).collect()).unwrap()
    }

    #[test]
    fn r_is_m2o_outside_u_ii() {
        for (p, case) in [(3, QuadCase::UI), (3, QuadCase::RI), (5, QuadCase::Split), (2, QuadCase::RII)] {
            let c = ctx(p, case);
            assert!(build_r(&c).unwrap().same_as(&m2o(&c)).unwrap(), "{case}");
        }
        let c = ctx(2, QuadCase::UII);
        assert!(!build_r(&c).unwrap().same_as(&m2o(&c)).unwrap());
    }

    #[test]
    fn r_rho_case_r() {
        let c = ctx(3, QuadCase::RI);
        let expect = lat(&c, &[[[1, 0], [0, 0]], [[0, 3], [0, 0]], [[0, 0], [1, 0]], [[0, 0], [0, 1]]]);
        assert!(build_rm(&c, 1).unwrap().same_as(&expect).unwrap());
        assert!(build_r_rho(&c).unwrap().same_as(&expect).unwrap());
        assert!(build_rm(&c, 0).unwrap().same_as(&build_r(&c).unwrap()).unwrap());
    }

    #[test]
    fn hankel_examples() {
        let c = ctx(3, QuadCase::UI);
        let r = build_r(&c).unwrap();
        let expect = |k: i64, kh: i64| {
            let cc = &c;
            Lattice2::new(
                cc,
                vec![
                    PadicMat2::identity(cc).scale(&cc.int(k)),
                    PadicMat2::embed(cc, &cc.sigma()).scale(&cc.int(k)),
                    PadicMat2::h(cc).scale(&cc.int(kh)),
                ],
            )
            .unwrap()
        };
        let hr = hankel_part(&r).unwrap();
        assert_eq!(hr.rank(), 3);
        assert!(hr.same_as(&expect(1, 1)).unwrap());
        let rho = PadicMat2::embed(&c, &c.uniformizer());
        let hrr = hankel_part(&r.left_mul(&rho).unwrap()).unwrap();
        assert!(hrr.same_as(&expect(3, 3)).unwrap());
        let cr = ctx(3, QuadCase::RI);
        let expect_r = Lattice2::new(
            &cr,
            vec![
                PadicMat2::identity(&cr),
                PadicMat2::embed(&cr, &cr.sigma()),
                PadicMat2::h(&cr).scale(&cr.int(3)),
            ],
        )
        .unwrap();
        assert!(hankel_part(&build_r_rho(&cr).unwrap()).unwrap().same_as(&expect_r).unwrap());
    }

    #[test]
    fn m2o_is_self_dual() {
        let c = ctx(3, QuadCase::UI);
        assert!(dual_lattice(&m2o(&c)).unwrap().same_as(&m2o(&c)).unwrap());
        let l0 = build_lm(&c, 0).unwrap();
        assert!(l0.sharp_part.same_as(&dual_lattice(&build_rm(&c, 0).unwrap()).unwrap()).unwrap());
        let l2 = build_lm(&c, 2).unwrap();
        let expect = dual_lattice(&build_rm(&c, 2).unwrap()).unwrap().scale(&c.int(81)).unwrap();
        assert!(l2.sharp_part.same_as(&expect).unwrap());
    }

    #[test]
    fn orders_are_closed_and_filtered() {
        for (p, case) in [(3, QuadCase::UI), (3, QuadCase::RI), (2, QuadCase::UII), (2, QuadCase::RII), (5, QuadCase::Split)] {
            let c = ctx(p, case);
            for m in 0..=4 {
                let rm = build_rm(&c, m).unwrap();
                assert!(rm.is_order().unwrap(), "{case} m={m}");
                let next = build_rm(&c, m + 1).unwrap();
                assert!(rm.contains_lattice(&next).unwrap());
            }
        }
    }

    #[test]
    fn units_of_e_normalize_rm() {
        for case in [QuadCase::UI, QuadCase::RI] {
            let c = ctx(3, case);
            for t in residue_reps(&c, 1).unwrap() {
                let t = t.add(&c.uniformizer().scale(&c.int(7)));
                if !t.norm(&c).is_unit() {
                    continue;
                }
                let tm = PadicMat2::embed(&c, &t);
                let ti = tm.inv().unwrap();
                for m in 0..3 {
                    let rm = build_rm(&c, m).unwrap();
                    let conj = rm.left_mul(&tm).unwrap().right_mul(&ti).unwrap();
                    assert!(conj.same_as(&rm).unwrap());
                }
            }
        }
    }

    #[test]
    fn h_sits_between_r_rho_and_its_inverse_scaling() {
        let c = ctx(3, QuadCase::RI);
        let rr = build_r_rho(&c).unwrap();
        let h = PadicMat2::h(&c);
        assert!(!rr.contains(&h).unwrap());
        let rho = PadicMat2::embed(&c, &c.uniformizer());
        assert!(rr.contains(&rho.mul(&h)).unwrap());
    }

    #[test]
    fn consecutive_index_is_q_to_f() {
        for (p, case) in [(3, QuadCase::UI), (3, QuadCase::RI), (5, QuadCase::UI), (2, QuadCase::UII)] {
            let c = ctx(p, case);
            for m in c.m0 as i64..=4 {
                let e = build_rm(&c, m).unwrap().index_exponent(&build_rm(&c, m + 1).unwrap()).unwrap();
                assert_eq!(e, c.f as i64, "{case} m={m}");
            }
        }
    }

    #[test]
    fn unit_reps_examples() {
        let u = ctx(3, QuadCase::UI);
        assert_eq!(unit_quotient_reps(&u, 1).unwrap().len(), 9);
        assert_eq!(unit_quotient_reps(&u, 0).unwrap().len(), 6);
        let r = ctx(3, QuadCase::RI);
        assert_eq!(unit_quotient_reps(&r, 2).unwrap().len(), 3);
        assert_eq!(unit_quotient_reps(&r, 1).unwrap().len(), 2);
        assert!(matches!(unit_quotient_reps(&r, 0), Err(OrderError::BelowRange { .. })));
        for (c, m) in [(&u, 0), (&u, 1), (&u, 3), (&r, 1), (&r, 2), (&r, 4)] {
            let reps = unit_quotient_reps(c, m).unwrap();
            let rm = build_rm(c, m).unwrap();
            let next = build_rm(c, m + 1).unwrap();
            for (i, a) in reps.iter().enumerate() {
                assert!(rm.contains(a).unwrap() && rm.contains(&a.inv().unwrap()).unwrap());
                for b in &reps[i + 1..] {
                    assert!(!same_unit_coset(&next, a, b).unwrap());
                }
            }
        }
    }

    #[test]
    fn lattice_json() {
        let c = ctx(3, QuadCase::RI);
        let j = serde_json::to_value(build_rm(&c, 1).unwrap()).unwrap();
        assert_eq!(j[0][0][0], "3^0 * 1");
        assert_eq!(j.as_array().unwrap().len(), 4);
    }
}
