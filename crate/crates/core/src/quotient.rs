//! The quotient `R/RH(x^n)` for an admissible tuple: reduction, the F-weight,
//! CRT splitting, matrix realizations and inversion of units.

use crate::central::{validate_admissible, AdmissibleTuple};
use crate::error::{Error, Result};
use crate::ftower::TowerContext;
use crate::gf::{Elem, Gf};
use crate::linalg::{Echelon, Matrix};
use crate::poly::Poly;
use crate::skew::{SkewPoly, SkewRing};
use serde::{Deserialize, Serialize};
use std::sync::Arc;

/// A class of `R/RH(x^n)`, held by its representative of degree `< nst`.
pub type QuotElem = SkewPoly;

/// Seed used for divisor searches when the caller does not supply one.
pub const DEFAULT_SEED: u64 = 0x5eed;

/// The ring `R/RH(x^n)`.
#[derive(Clone, Debug)]
pub struct QuotCtx {
    ring: SkewRing,
    tuple: AdmissibleTuple,
    hinf: SkewPoly,
    factors: Vec<SkewPoly>,
}

impl QuotCtx {
    /// Validates the tuple (including the lclm check) and builds the context.
    pub fn new(tower: Arc<TowerContext>, tuple: AdmissibleTuple) -> Result<QuotCtx> {
        let ring = SkewRing::new(tower);
        if tuple.s != ring.tower().s() as usize {
            return Err(Error::InvalidArgument(format!(
                "tuple degree {} differs from the tower's s = {}",
                tuple.s,
                ring.tower().s()
            )));
        }
        validate_admissible(ring.tower().k(), &tuple, Some(&ring))?;
        let hinf = ring.inflate(&tuple.h);
        let factors = tuple.polys.iter().map(|f| ring.inflate(f)).collect();
        Ok(QuotCtx { ring, tuple, hinf, factors })
    }

    pub fn ring(&self) -> &SkewRing {
        &self.ring
    }

    pub fn tower(&self) -> &Arc<TowerContext> {
        self.ring.tower()
    }

    pub fn tuple(&self) -> &AdmissibleTuple {
        &self.tuple
    }

    pub fn hinf(&self) -> &SkewPoly {
        &self.hinf
    }

    /// `F_i(x^n)`.
    pub fn factor(&self, i: usize) -> &SkewPoly {
        &self.factors[i]
    }

    pub fn t(&self) -> usize {
        self.tuple.t()
    }

    pub fn n(&self) -> usize {
        self.ring.n()
    }

    pub fn s(&self) -> usize {
        self.tuple.s
    }

    /// `n·s·t`, the degree of `H(x^n)`.
    pub fn nst(&self) -> usize {
        self.n() * self.s() * self.t()
    }

    /// Dimension of the quotient over `F_p`.
    pub fn fp_dim(&self) -> usize {
        self.nst() * self.ring.tower().l().degree() as usize
    }

    pub fn reduce(&self, a: &SkewPoly) -> QuotElem {
        if a.degree().is_none_or(|d| d < self.nst()) {
            return a.clone();
        }
        self.ring.right_rem(a, &self.hinf).expect("H is nonzero")
    }

    pub fn add(&self, a: &QuotElem, b: &QuotElem) -> QuotElem {
        self.ring.add(a, b)
    }

    pub fn sub(&self, a: &QuotElem, b: &QuotElem) -> QuotElem {
        self.ring.sub(a, b)
    }

    pub fn mul(&self, a: &QuotElem, b: &QuotElem) -> QuotElem {
        self.reduce(&self.ring.mul(a, b))
    }

    /// `tn − deg gcrd(a, H(x^n)) / s`; zero for the zero class.
    pub fn f_weight(&self, a: &QuotElem) -> usize {
        if a.is_zero() {
            return 0;
        }
        let d = self.ring.gcrd_degree(a, &self.hinf);
        self.t() * self.n() - d / self.s()
    }

    /// `d_F(a, b) = wt_F(a − b)`.
    pub fn f_distance(&self, a: &QuotElem, b: &QuotElem) -> usize {
        self.f_weight(&self.sub(a, b))
    }

    /// Residues modulo each `F_i(x^n)`.
    pub fn crt_split(&self, a: &QuotElem) -> Vec<SkewPoly> {
        self.factors
            .iter()
            .map(|f| self.ring.right_rem(a, f).expect("factor is nonzero"))
            .collect()
    }

    /// Two-sided inverse of a full-weight class.
    pub fn invert_unit(&self, a: &QuotElem) -> Result<QuotElem> {
        if a.is_zero() {
            return Err(Error::NotUnit);
        }
        let (d, u, _) = self.ring.gcrd_ext(a, &self.hinf)?;
        if d != SkewPoly::one() {
            return Err(Error::NotUnit);
        }
        let b = self.reduce(&u);
        if self.mul(&b, a) != SkewPoly::one() || self.mul(a, &b) != SkewPoly::one() {
            return Err(Error::NotUnit);
        }
        Ok(b)
    }

    /// Coordinates over `F_p`: coefficient `i`, digit `l` at index `i·ne + l`.
    pub fn to_fp(&self, a: &QuotElem) -> Vec<Elem> {
        let l = self.ring.tower().l();
        let mut v = Vec::with_capacity(self.fp_dim());
        for i in 0..self.nst() {
            v.extend(l.digits(a.coeff(i)).into_iter().map(Elem));
        }
        v
    }

    pub fn from_fp(&self, v: &[Elem]) -> QuotElem {
        let l = self.ring.tower().l();
        let ne = l.degree() as usize;
        SkewPoly::new(
            v.chunks(ne)
                .map(|c| {
                    let d: Vec<u32> = c.iter().map(|x| x.0).collect();
                    l.from_digits(&d).expect("reduced digits")
                })
                .collect(),
        )
    }

    /// The `F_p`-basis element with index `i·ne + l`: `y^l · x^i`.
    pub fn fp_basis(&self, idx: usize) -> QuotElem {
        let ne = self.ring.tower().l().degree() as usize;
        let p = self.ring.tower().p();
        SkewPoly::monomial(Elem(p.pow((idx % ne) as u32)), idx / ne)
    }

    /// Matrix over `F_p` of `g ↦ a·g` (`left = true`) or `g ↦ g·a`.
    pub fn mult_matrix(&self, a: &QuotElem, left: bool) -> Matrix {
        let cols: Vec<Vec<Elem>> = (0..self.fp_dim())
            .map(|j| {
                let b = self.fp_basis(j);
                let prod = if left { self.mul(a, &b) } else { self.mul(&b, a) };
                self.to_fp(&prod)
            })
            .collect();
        Matrix::from_cols(&cols)
    }

    pub fn prime(&self) -> &Gf {
        self.ring.tower().prime()
    }
}

/// A `t`-tuple of `n×n` matrices over `E = F_{q^s}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BlockMatrixTuple {
    pub n: usize,
    pub blocks: Vec<Matrix>,
}

/// JSON form of a [`BlockMatrixTuple`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BlockMatrixDoc {
    pub t: usize,
    pub n: usize,
    pub alphabet: String,
    pub blocks: Vec<Vec<Vec<Vec<u32>>>>,
}

impl BlockMatrixTuple {
    pub fn sum_rank(&self, e: &Gf) -> usize {
        self.blocks.iter().map(|m| m.rank(e)).sum()
    }

    pub fn mul(&self, e: &Gf, other: &BlockMatrixTuple) -> BlockMatrixTuple {
        BlockMatrixTuple {
            n: self.n,
            blocks: self.blocks.iter().zip(&other.blocks).map(|(a, b)| a.mul(e, b)).collect(),
        }
    }

    pub fn to_doc(&self, e: &Gf, q: u32, s: u32) -> BlockMatrixDoc {
        BlockMatrixDoc {
            t: self.blocks.len(),
            n: self.n,
            alphabet: format!("F_{{{q}^{s}}}"),
            blocks: self
                .blocks
                .iter()
                .map(|m| {
                    m.to_rows()
                        .iter()
                        .map(|row| row.iter().map(|&c| e.digits(c)).collect())
                        .collect()
                })
                .collect(),
        }
    }
}

/// Which realization of `R/RH(x^n) ≅ ⊕ M_n(F_{q^s})` to use.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum RealizationMode {
    /// The closed form for `n = s = 3` on a λ-scaled tuple.
    Explicit3x3,
    /// Left multiplication on `R/Rf_i` in a computed basis.
    Generic,
}

#[derive(Clone, Debug)]
enum Block {
    Explicit { xi: Elem, alpha_inv: Elem },
    Generic(GenericBlock),
}

#[derive(Clone, Debug)]
struct GenericBlock {
    f: SkewPoly,
    basis: Vec<SkewPoly>,
    /// Inverse of the matrix whose columns are the `F_p`-coordinates of the
    /// `F_p`-basis `b_j κ_l x^{nr}` of `R/Rf`.
    coord_inv: Matrix,
    /// `κ_l θ^r` in `E`, indexed `r·e + l`.
    scalars: Vec<Elem>,
}

/// A precomputed realization map.
#[derive(Clone, Debug)]
pub struct Realization {
    mode: RealizationMode,
    blocks: Vec<Block>,
}

/// Parameters used by the closed-form realization.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExplicitData {
    pub xi: Elem,
    pub base: Poly,
    pub alphas: Vec<Elem>,
}

impl Realization {
    pub fn new(ctx: &QuotCtx, mode: RealizationMode, seed: u64) -> Result<Realization> {
        let blocks = match mode {
            RealizationMode::Explicit3x3 => {
                let data = explicit_data(ctx)?;
                let l = ctx.tower().l();
                data.alphas
                    .iter()
                    .map(|&a| Block::Explicit { xi: data.xi, alpha_inv: l.inv(a).unwrap() })
                    .collect()
            }
            RealizationMode::Generic => (0..ctx.t())
                .map(|i| generic_block(ctx, i, seed.wrapping_add(i as u64)).map(Block::Generic))
                .collect::<Result<Vec<_>>>()?,
        };
        Ok(Realization { mode, blocks })
    }

    pub fn mode(&self) -> RealizationMode {
        self.mode
    }

    pub fn apply(&self, ctx: &QuotCtx, a: &QuotElem) -> BlockMatrixTuple {
        let blocks = self
            .blocks
            .iter()
            .map(|b| match b {
                Block::Explicit { xi, alpha_inv } => {
                    let shifted = ctx.ring().shift_scale(a, *alpha_inv).expect("nonzero shift");
                    explicit_phi(ctx.tower(), *xi, &shifted)
                }
                Block::Generic(g) => generic_apply(ctx, g, a),
            })
            .collect();
        BlockMatrixTuple { n: ctx.n(), blocks }
    }
}

/// One-shot realization.
pub fn realize_matrices(
    ctx: &QuotCtx,
    a: &QuotElem,
    mode: RealizationMode,
) -> Result<BlockMatrixTuple> {
    Ok(Realization::new(ctx, mode, DEFAULT_SEED)?.apply(ctx, a))
}

/// `ξ`, the base polynomial and the shifts `α_i` with `N(α_i) = λ_i`
/// (`1` for `λ_i = 1`, then `ξ` when its norm fits, else the smallest preimage).
pub fn explicit_data(ctx: &QuotCtx) -> Result<ExplicitData> {
    let tower = ctx.tower();
    if tower.n() != 3 || tower.s() != 3 {
        return Err(Error::Precondition("explicit realization needs n = s = 3".into()));
    }
    let l = tower.l();
    let k = tower.k();
    let root = l.root();
    let xi = if tower.l_to_k(root).is_none() { root } else { l.generator() };
    let base = min_poly_in_l(tower, xi);
    let tuple = ctx.tuple();
    let lambdas: Vec<Elem> = if tuple.lambdas.is_empty() { vec![Elem::ONE] } else { tuple.lambdas.clone() };
    if lambdas.len() != tuple.t() {
        return Err(Error::Precondition("tuple provenance does not cover every block".into()));
    }
    for (i, (&lam, f)) in lambdas.iter().zip(&tuple.polys).enumerate() {
        let linv_s = k.pow(k.inv(lam).ok_or(Error::NotUnit)?, 3);
        let expected = base.scale_variable(k, lam).scale(k, linv_s);
        if &expected != f {
            return Err(Error::Precondition(format!(
                "F_{} is not the λ-scaling of the minimal polynomial of ξ",
                i + 1
            )));
        }
    }
    let alphas = lambdas
        .iter()
        .map(|&lam| {
            if lam == Elem::ONE {
                Elem::ONE
            } else if tower.norm_l_k(xi) == lam {
                xi
            } else {
                let target = tower.k_to_l(lam);
                l.elements()
                    .find(|&u| !u.is_zero() && tower.k_to_l(tower.norm_l_k(u)) == target)
                    .expect("norm is surjective")
            }
        })
        .collect();
    Ok(ExplicitData { xi, base, alphas })
}

/// Minimal polynomial over `K` of an element of `L`.
pub fn min_poly_in_l(tower: &TowerContext, a: Elem) -> Poly {
    let l = tower.l();
    let mut conj = vec![a];
    loop {
        let next = tower.sigma_pow(*conj.last().unwrap(), 1);
        if next == a {
            break;
        }
        conj.push(next);
    }
    let prod = conj.iter().fold(Poly::one(), |acc, &c| acc.mul(l, &Poly::linear(l, c)));
    Poly::new(prod.coeffs.iter().map(|&c| tower.l_to_k(c).expect("coefficients in K")).collect())
}

/// `Σ_j D(a_j) X^j` with `D(a) = diag(a, σ²a, σa)` and `X` the companion-like
/// matrix with rows `(0,0,ξ), (1,0,0), (0,1,0)`.
fn explicit_phi(tower: &TowerContext, xi: Elem, a: &SkewPoly) -> Matrix {
    let l = tower.l();
    let mut x = Matrix::zeros(3, 3);
    x.set(0, 2, xi);
    x.set(1, 0, Elem::ONE);
    x.set(2, 1, Elem::ONE);
    let mut out = Matrix::zeros(3, 3);
    let mut xp = Matrix::identity(3);
    for &c in &a.coeffs {
        if !c.is_zero() {
            let mut d = Matrix::zeros(3, 3);
            d.set(0, 0, c);
            d.set(1, 1, tower.sigma_pow(c, 2));
            d.set(2, 2, tower.sigma_pow(c, 1));
            out = out.add(l, &d.mul(l, &xp));
        }
        xp = xp.mul(l, &x);
    }
    out
}

fn generic_block(ctx: &QuotCtx, i: usize, seed: u64) -> Result<GenericBlock> {
    let tower = ctx.tower();
    let ring = ctx.ring();
    let fpoly = &ctx.tuple().polys[i];
    let (f, _) = ring.irr_right_divisor(fpoly, seed, 1 << 20)?;
    let n = ctx.n();
    let s = ctx.s();
    let e = tower.e() as usize;
    let ne = n * e;
    let ef = tower.e_field();
    let theta = ef
        .elements()
        .find(|&b| fpoly.eval_embedded(ef, tower.k_to_e_table(), b).is_zero())
        .expect("F_i splits in E");
    // central scalars κ_l x^{nr} acting on R/Rf
    let central: Vec<SkewPoly> = (0..s)
        .flat_map(|r| {
            tower
                .k_basis_in_l()
                .into_iter()
                .map(move |kl| SkewPoly::monomial(kl, n * r))
        })
        .collect();
    let scalars: Vec<Elem> = (0..s)
        .flat_map(|r| {
            let th = ef.pow(theta, r as u64);
            (0..e).map(move |l| (th, l))
        })
        .map(|(th, l)| ef.mul(th, tower.k_to_e(Elem(tower.p().pow(l as u32)))))
        .collect();
    let flat = |g: &SkewPoly| -> Vec<Elem> {
        let r = ring.right_rem(g, &f).expect("f nonzero");
        (0..s).flat_map(|j| tower.l().digits(r.coeff(j)).into_iter().map(Elem)).collect()
    };
    let prime = tower.prime();
    let mut ech = Echelon::new();
    let mut basis = Vec::new();
    let mut cols = Vec::new();
    let candidates = (0..ne as u32)
        .flat_map(|b| (0..n).map(move |j| SkewPoly::monomial(Elem(tower.p().pow(b)), j)));
    for cand in candidates {
        if basis.len() == n {
            break;
        }
        let span: Vec<Vec<Elem>> = central.iter().map(|c| flat(&ring.mul(c, &cand))).collect();
        let mut trial = ech.clone();
        if span.iter().all(|v| trial.insert(prime, v).is_ok()) {
            ech = trial;
            basis.push(cand);
            cols.extend(span);
        }
    }
    if basis.len() != n {
        return Err(Error::Precondition("no E-basis of R/Rf found".into()));
    }
    let coord_inv = Matrix::from_cols(&cols).inverse(prime).expect("basis is independent");
    Ok(GenericBlock { f, basis, coord_inv, scalars })
}

fn generic_apply(ctx: &QuotCtx, g: &GenericBlock, a: &QuotElem) -> Matrix {
    let tower = ctx.tower();
    let ring = ctx.ring();
    let ef = tower.e_field();
    let n = ctx.n();
    let s = ctx.s();
    let per = g.scalars.len();
    let mut out = Matrix::zeros(n, n);
    for (j, b) in g.basis.iter().enumerate() {
        let img = ring.right_rem(&ring.mul(a, b), &g.f).expect("f nonzero");
        let v: Vec<Elem> =
            (0..s).flat_map(|c| tower.l().digits(img.coeff(c)).into_iter().map(Elem)).collect();
        let coords = g.coord_inv.mul_vec(tower.prime(), &v);
        for i in 0..n {
            let z = coords[i * per..(i + 1) * per]
                .iter()
                .zip(&g.scalars)
                .fold(Elem::ZERO, |acc, (&c, &sc)| {
                    ef.add(acc, ef.mul(ef.from_int(c.0 as i64), sc))
                });
            out.set(i, j, z);
        }
    }
    out
}
