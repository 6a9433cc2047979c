//! Polynomials over `K = F_q`: admissible tuples, the sets `X_s` and `X_{T,s}`,
//! evaluation sets, and the Möbius counting formulas.

use crate::error::{Error, Result};
use crate::ftower::TowerContext;
use crate::gf::{Elem, Gf};
use crate::poly::Poly;
use crate::skew::SkewRing;
use num_integer::Integer;
use serde::{Deserialize, Serialize};
use std::collections::HashMap;

/// Default bound on `q^s` for enumerations.
pub const DEFAULT_ENUM_CAP: u64 = 1 << 20;

/// Möbius function.
pub fn mobius(n: u64) -> i64 {
    assert!(n > 0);
    let mut m = n;
    let mut sign = 1;
    let mut d = 2;
    while d * d <= m {
        if m.is_multiple_of(d) {
            m /= d;
            if m.is_multiple_of(d) {
                return 0;
            }
            sign = -sign;
        }
        d += 1;
    }
    if m > 1 {
        sign = -sign;
    }
    sign
}

pub fn divisors(n: u64) -> Vec<u64> {
    (1..=n).filter(|d| n.is_multiple_of(*d)).collect()
}

/// The multiplicative subgroup `T ⊆ F_{q0}^*` of the given order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SubgroupSpec {
    pub q0: u64,
    pub order: u64,
}

impl SubgroupSpec {
    /// Whole group `F_{q0}^*`.
    pub fn full(q0: u64) -> SubgroupSpec {
        SubgroupSpec { q0, order: q0 - 1 }
    }

    /// Nonzero squares of `F_q`, `q` odd.
    pub fn squares(q: u64) -> SubgroupSpec {
        SubgroupSpec { q0: q, order: (q - 1) / 2 }
    }

    /// Validates against `q` and returns `r` with `q = q0^r`.
    pub fn check(&self, q: u64) -> Result<u32> {
        let r = subfield_index(q, self.q0)
            .ok_or_else(|| Error::InvalidArgument(format!("q = {q} is not a power of q0 = {}", self.q0)))?;
        if self.order == 0 || !(self.q0 - 1).is_multiple_of(self.order) {
            return Err(Error::InvalidArgument(format!(
                "subgroup order {} does not divide q0 - 1 = {}",
                self.order,
                self.q0 - 1
            )));
        }
        Ok(r)
    }

    /// Membership of `a ∈ K` (the elements with `a^order = 1` automatically lie in `F_{q0}`).
    pub fn contains(&self, k: &Gf, a: Elem) -> bool {
        !a.is_zero() && k.pow(a, self.order) == Elem::ONE
    }
}

/// `r` with `q = q0^r`, if any.
pub fn subfield_index(q: u64, q0: u64) -> Option<u32> {
    if q0 < 2 {
        return None;
    }
    let mut acc = q0;
    let mut r = 1;
    while acc < q {
        acc *= q0;
        r += 1;
    }
    (acc == q).then_some(r)
}

/// Which counting formula to evaluate.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum CountKind {
    Xs,
    XTs,
    MaxS,
    MaxD,
}

/// `|X_s| = (1/s) Σ_{d|s} μ(s/d) q^d`.
pub fn count_xs(q: u64, s: u64) -> u64 {
    let total: i128 = divisors(s)
        .into_iter()
        .map(|d| mobius(s / d) as i128 * (q as i128).pow(d as u32))
        .sum();
    (total / s as i128) as u64
}

/// `|X_{T,s}| = |T|/(s(q0-1)) Σ_{d|s} μ(s/d)(q^d-1) gcd(s/d, (q0-1)/|T|)`.
pub fn count_xts(q: u64, s: u64, t: SubgroupSpec) -> Result<u64> {
    t.check(q)?;
    let idx = (t.q0 - 1) / t.order;
    let total: i128 = divisors(s)
        .into_iter()
        .map(|d| {
            mobius(s / d) as i128 * ((q as i128).pow(d as u32) - 1) * (s / d).gcd(&idx) as i128
        })
        .sum();
    let num = total * t.order as i128;
    let den = (s * (t.q0 - 1)) as i128;
    debug_assert_eq!(num % den, 0);
    Ok((num / den) as u64)
}

/// Counting front end; `t` is required for `XTs`/`MaxS`.
pub fn count(kind: CountKind, q: u64, s: u64, t: Option<SubgroupSpec>) -> Result<u64> {
    if s == 0 {
        return Err(Error::InvalidArgument("s must be positive".into()));
    }
    match kind {
        CountKind::Xs => Ok(count_xs(q, s)),
        CountKind::XTs | CountKind::MaxS => {
            let t = t.ok_or_else(|| Error::InvalidArgument("subgroup required".into()))?;
            count_xts(q, s, t)
        }
        CountKind::MaxD => {
            if q.is_multiple_of(2) {
                return Err(Error::InvalidArgument("maxD needs q odd".into()));
            }
            count_xts(q, s, SubgroupSpec::squares(q))
        }
    }
}

pub fn is_irreducible(k: &Gf, f: &Poly) -> bool {
    f.is_irreducible(k)
}

/// Monic polynomial of degree `s` at position `rank` of the canonical order
/// (constant coefficient most significant).
fn monic_by_rank(k: &Gf, s: usize, mut rank: u64) -> Poly {
    let q = k.order() as u64;
    let mut c = vec![Elem::ZERO; s + 1];
    for i in (0..s).rev() {
        c[i] = k.unrank((rank % q) as u32);
        rank /= q;
    }
    c[s] = Elem::ONE;
    Poly::new(c)
}

/// `X_{T,s}` in canonical order.
pub fn enumerate_xts(k: &Gf, s: usize, t: SubgroupSpec, cap: u64) -> Result<Vec<Poly>> {
    let q = k.order() as u64;
    t.check(q)?;
    let total = q.checked_pow(s as u32).unwrap_or(u64::MAX);
    if total > cap {
        return Err(Error::CapExceeded { size: total as u128, cap: cap as u128 });
    }
    let e0 = k.degree() / subfield_index(q, t.q0).unwrap();
    let sign = if s.is_multiple_of(2) { Elem::ONE } else { k.neg(Elem::ONE) };
    Ok((0..total)
        .map(|r| monic_by_rank(k, s, r))
        .filter(|f| {
            let c = k.mul(sign, f.coeff(0));
            t.contains(k, k.norm_to_subfield(c, e0)) && f.is_irreducible(k)
        })
        .collect())
}

/// Provenance of a tuple built by λ-scaling.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Provenance {
    pub base: Vec<Vec<u32>>,
    pub lambdas: Vec<Vec<u32>>,
}

/// `t` distinct monic irreducible degree-`s` polynomials over `K` and their product.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AdmissibleTuple {
    pub s: usize,
    pub polys: Vec<Poly>,
    pub h: Poly,
    pub provenance: Option<Provenance>,
    pub lambdas: Vec<Elem>,
}

/// JSON form of a tuple.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TupleDoc {
    pub s: usize,
    pub t: usize,
    pub polys: Vec<Vec<Vec<u32>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub provenance: Option<Provenance>,
}

impl AdmissibleTuple {
    /// Unchecked constructor; see [`validate_admissible`].
    pub fn new(k: &Gf, polys: Vec<Poly>) -> AdmissibleTuple {
        let s = polys.first().and_then(|f| f.degree()).unwrap_or(0);
        let h = polys.iter().fold(Poly::one(), |acc, f| acc.mul(k, f));
        AdmissibleTuple { s, polys, h, provenance: None, lambdas: Vec::new() }
    }

    pub fn t(&self) -> usize {
        self.polys.len()
    }

    pub fn to_doc(&self, k: &Gf) -> TupleDoc {
        TupleDoc {
            s: self.s,
            t: self.t(),
            polys: self.polys.iter().map(|f| f.to_digits(k)).collect(),
            provenance: self.provenance.clone(),
        }
    }

    pub fn from_doc(k: &Gf, doc: &TupleDoc) -> Result<AdmissibleTuple> {
        let polys = doc.polys.iter().map(|p| Poly::from_digits(k, p)).collect::<Result<Vec<_>>>()?;
        let mut tuple = AdmissibleTuple::new(k, polys);
        if let Some(prov) = &doc.provenance {
            tuple.lambdas =
                prov.lambdas.iter().map(|d| k.from_digits(d)).collect::<Result<Vec<_>>>()?;
            tuple.provenance = Some(prov.clone());
        }
        if tuple.t() != doc.t || (tuple.t() > 0 && tuple.s != doc.s) {
            return Err(Error::Parse("tuple header does not match its polynomials".into()));
        }
        Ok(tuple)
    }
}

/// `F_i(y) = λ_i^{-s} F(λ_i y)`.
pub fn make_tuple(k: &Gf, f: &Poly, lambdas: &[Elem]) -> Result<AdmissibleTuple> {
    let s = f.degree().unwrap_or(0);
    if s == 0 || !f.is_monic() || !f.is_irreducible(k) {
        return Err(Error::Reducible(f.display(k)));
    }
    if f.coeff(0).is_zero() {
        return Err(Error::InvalidArgument("base polynomial is y".into()));
    }
    if lambdas.is_empty() {
        return Err(Error::InvalidArgument("empty scalar list".into()));
    }
    let mut seen: Vec<Elem> = Vec::new();
    let mut polys = Vec::new();
    for (i, &l) in lambdas.iter().enumerate() {
        let inv = k.inv(l).ok_or(Error::InvalidTuple { index: i, reason: "lambda is zero".into() })?;
        let ls = k.pow(l, s as u64);
        if seen.contains(&ls) {
            return Err(Error::InvalidTuple { index: i, reason: "lambda^s repeats".into() });
        }
        seen.push(ls);
        polys.push(f.scale_variable(k, l).scale(k, k.pow(inv, s as u64)));
    }
    let mut tuple = AdmissibleTuple::new(k, polys);
    tuple.provenance = Some(Provenance {
        base: f.to_digits(k),
        lambdas: lambdas.iter().map(|&l| k.digits(l)).collect(),
    });
    tuple.lambdas = lambdas.to_vec();
    Ok(tuple)
}

/// What [`validate_admissible`] established.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AdmissibleCertificate {
    pub t: usize,
    pub s: usize,
    pub irreducible: bool,
    pub distinct: bool,
    pub nonzero_constants: bool,
    /// `None` when the lclm check was skipped.
    pub lclm_matches: Option<bool>,
}

/// Checks the admissibility conditions; with `ring`, also `lclm(F_i(x^n)) = H(x^n)`.
pub fn validate_admissible(
    k: &Gf,
    tuple: &AdmissibleTuple,
    ring: Option<&SkewRing>,
) -> Result<AdmissibleCertificate> {
    if tuple.polys.is_empty() {
        return Err(Error::InvalidArgument("empty tuple".into()));
    }
    let s = tuple.s;
    for (i, f) in tuple.polys.iter().enumerate() {
        let bad = |reason: &str| Error::InvalidTuple { index: i, reason: reason.into() };
        if f.degree() != Some(s) || s == 0 {
            return Err(bad("degree differs from s"));
        }
        if !f.is_monic() {
            return Err(bad("not monic"));
        }
        if f.coeff(0).is_zero() {
            return Err(bad("equals y or has zero constant term"));
        }
        if !f.is_irreducible(k) {
            return Err(bad("reducible"));
        }
        if tuple.polys[..i].contains(f) {
            return Err(bad("repeated polynomial"));
        }
    }
    let product = tuple.polys.iter().fold(Poly::one(), |acc, f| acc.mul(k, f));
    if product != tuple.h {
        return Err(Error::InvalidArgument("stored product is wrong".into()));
    }
    let lclm_matches = match ring {
        Some(r) => {
            let inflations: Vec<_> = tuple.polys.iter().map(|f| r.inflate(f)).collect();
            let ok = r.lclm_many(&inflations)? == r.inflate(&tuple.h);
            if !ok {
                return Err(Error::InvalidTuple { index: 0, reason: "lclm differs from H".into() });
            }
            Some(true)
        }
        None => None,
    };
    Ok(AdmissibleCertificate {
        t: tuple.t(),
        s,
        irreducible: true,
        distinct: true,
        nonzero_constants: true,
        lclm_matches,
    })
}

/// Evaluation-set flavour.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum EvalKind {
    /// One root per element of `X_{T,s}`.
    A,
    /// One root per element of `Z_{T,s}`, `T` the squares of `F_q`.
    B,
}

/// Minimal polynomial over `K` of `b ∈ E`, as a polynomial over `K`.
pub fn min_poly_over_k(tower: &TowerContext, b: Elem) -> Poly {
    let e = tower.e_field();
    let q_deg = tower.k().degree();
    let mut conj = vec![b];
    loop {
        let next = e.frobenius(*conj.last().unwrap(), q_deg);
        if next == b {
            break;
        }
        conj.push(next);
    }
    let prod = conj.iter().fold(Poly::one(), |acc, &c| acc.mul(e, &Poly::linear(e, c)));
    Poly::new(
        prod.coeffs
            .iter()
            .map(|&c| tower.e_to_k(c).expect("minimal polynomial has coefficients in K"))
            .collect(),
    )
}

/// Evaluation points in `E = F_{q^s}`, one smallest root per polynomial, in the
/// order of the polynomial enumeration. `t` is ignored for [`EvalKind::B`].
pub fn eval_set(tower: &TowerContext, kind: EvalKind, t: SubgroupSpec, cap: u64) -> Result<Vec<Elem>> {
    let k = tower.k();
    let s = tower.s() as usize;
    let q = k.order() as u64;
    let subgroup = match kind {
        EvalKind::A => t,
        EvalKind::B => {
            if q.is_multiple_of(2) || !k.degree().is_multiple_of(2) {
                return Err(Error::InvalidArgument("B sets need q = q0^2 with q odd".into()));
            }
            SubgroupSpec::squares(q)
        }
    };
    let polys = enumerate_xts(k, s, subgroup, cap)?;
    let index: HashMap<&Poly, usize> = polys.iter().enumerate().map(|(i, f)| (f, i)).collect();
    let mut roots = vec![None; polys.len()];
    let mut found = 0;
    for b in tower.e_field().elements() {
        if found == polys.len() {
            break;
        }
        let m = min_poly_over_k(tower, b);
        if let Some(&i) = index.get(&m) {
            if roots[i].is_none() {
                roots[i] = Some(b);
                found += 1;
            }
        }
    }
    Ok(roots.into_iter().map(|r| r.expect("every polynomial has a root in E")).collect())
}

/// First `t` polynomials of `X_{T,s}` (with `q0 = q`) for the smallest subgroup order
/// that provides at least `t` of them.
pub fn default_tuple(k: &Gf, s: usize, t: usize, cap: u64) -> Result<AdmissibleTuple> {
    let q = k.order() as u64;
    for order in divisors(q - 1) {
        let polys = enumerate_xts(k, s, SubgroupSpec { q0: q, order }, cap)?;
        if polys.len() >= t {
            return Ok(AdmissibleTuple::new(k, polys.into_iter().take(t).collect()));
        }
    }
    Err(Error::InvalidArgument(format!(
        "only {} irreducible polynomials of degree {s} with nonzero constant term, asked for {t}",
        count_xts(q, s as u64, SubgroupSpec::full(q))?
    )))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ftower::{build_tower, FieldSpec};

    fn p(c: &[u32]) -> Poly {
        Poly::new(c.iter().map(|&x| Elem(x)).collect())
    }

    #[test]
    fn mobius_values_and_sum() {
        assert_eq!(
            (1..=10).map(mobius).collect::<Vec<_>>(),
            vec![1, -1, -1, 0, -1, 1, -1, 0, 0, 1]
        );
        for s in 2..=12u64 {
            assert_eq!(divisors(s).into_iter().map(|d| mobius(s / d)).sum::<i64>(), 0);
        }
    }

    #[test]
    fn reference_counts() {
        assert_eq!(count(CountKind::Xs, 3, 3, None).unwrap(), 8);
        assert_eq!(count(CountKind::XTs, 3, 3, Some(SubgroupSpec { q0: 3, order: 1 })).unwrap(), 4);
        assert_eq!(count(CountKind::MaxD, 9, 2, None).unwrap(), 16);
        assert!(count(CountKind::MaxD, 4, 2, None).is_err());
        assert!(count_xts(9, 2, SubgroupSpec { q0: 3, order: 3 }).is_err());
        assert!(count_xts(9, 2, SubgroupSpec { q0: 5, order: 2 }).is_err());
    }

    #[test]
    fn cubics_over_f3() {
        let k = Gf::new(3, 1).unwrap();
        let all = enumerate_xts(&k, 3, SubgroupSpec::full(3), DEFAULT_ENUM_CAP).unwrap();
        let listed = [
            p(&[1, 2, 0, 1]),
            p(&[1, 0, 2, 1]),
            p(&[1, 2, 1, 1]),
            p(&[1, 1, 2, 1]),
            p(&[2, 0, 1, 1]),
            p(&[2, 2, 0, 1]),
            p(&[2, 1, 1, 1]),
            p(&[2, 2, 2, 1]),
        ];
        assert_eq!(all.len(), 8);
        for f in &listed {
            assert!(all.contains(f));
        }
        let trivial = enumerate_xts(&k, 3, SubgroupSpec { q0: 3, order: 1 }, DEFAULT_ENUM_CAP).unwrap();
        assert_eq!(trivial.len(), 4);
        // (-1)^3 F(0) = 1 forces F(0) = 2; the listed polynomials are the images under y -> -y.
        assert!(trivial.iter().all(|f| f.coeff(0) == Elem(2)));
        let negated: Vec<Poly> = listed[..4]
            .iter()
            .map(|f| f.scale_variable(&k, Elem(2)).scale(&k, Elem(2)))
            .collect();
        for f in &negated {
            assert!(trivial.contains(f), "{}", f.display(&k));
        }
    }

    #[test]
    fn enumeration_matches_formula_small() {
        for (pp, e) in [(2, 1), (3, 1), (2, 2), (5, 1)] {
            let k = Gf::new(pp, e).unwrap();
            let q = k.order() as u64;
            for s in 1..=3 {
                for order in divisors(q - 1) {
                    let t = SubgroupSpec { q0: q, order };
                    let n = enumerate_xts(&k, s, t, DEFAULT_ENUM_CAP).unwrap().len() as u64;
                    assert_eq!(n, count_xts(q, s as u64, t).unwrap());
                }
            }
        }
    }

    #[test]
    fn cap_is_enforced() {
        let k = Gf::new(3, 1).unwrap();
        assert!(matches!(
            enumerate_xts(&k, 5, SubgroupSpec::full(3), 100),
            Err(Error::CapExceeded { .. })
        ));
    }

    #[test]
    fn make_tuple_scaling() {
        let k = Gf::new(5, 1).unwrap();
        let f = p(&[3, 3, 0, 1]);
        let tuple = make_tuple(&k, &f, &[Elem(1), Elem(2)]).unwrap();
        assert_eq!(tuple.polys[0], f);
        // 2^{-3} F(2y) = y^3 + (6/8) y + 3/8
        let inv8 = k.inv(Elem(3)).unwrap();
        assert_eq!(tuple.polys[1].coeff(0), k.mul(Elem(3), inv8));
        for (fi, &l) in tuple.polys.iter().zip(&tuple.lambdas) {
            let ls = k.pow(k.inv(l).unwrap(), 3);
            assert_eq!(fi.coeff(0), k.mul(ls, f.coeff(0)));
        }
        assert!(validate_admissible(&k, &tuple, None).is_ok());
        assert!(make_tuple(&k, &f, &[Elem(1)]).unwrap().polys == vec![f.clone()]);
        // F_7 has nontrivial cube roots of unity, so lambda^3 can collide
        let k7 = Gf::new(7, 1).unwrap();
        let g = k7.exp(2);
        let f7 = enumerate_xts(&k7, 3, SubgroupSpec::full(7), DEFAULT_ENUM_CAP).unwrap()[0].clone();
        assert!(matches!(
            make_tuple(&k7, &f7, &[Elem(1), g]),
            Err(Error::InvalidTuple { index: 1, .. })
        ));
        assert!(make_tuple(&k, &f, &[Elem(0)]).is_err());
    }

    #[test]
    fn validation_failures() {
        let k = Gf::new(3, 1).unwrap();
        let with_y = AdmissibleTuple::new(&k, vec![Poly::y(), p(&[1, 1])]);
        assert!(matches!(
            validate_admissible(&k, &with_y, None),
            Err(Error::InvalidTuple { index: 0, .. })
        ));
        let reducible = AdmissibleTuple::new(&k, vec![p(&[2, 0, 1])]);
        assert!(validate_admissible(&k, &reducible, None).is_err());
        let repeated = AdmissibleTuple::new(&k, vec![p(&[1, 1]), p(&[1, 1])]);
        assert!(matches!(
            validate_admissible(&k, &repeated, None),
            Err(Error::InvalidTuple { index: 1, .. })
        ));
    }

    #[test]
    fn lclm_equals_product() {
        for (pp, e, n, s) in [(3, 1, 2, 1), (2, 1, 3, 2), (3, 1, 2, 2), (2, 2, 2, 1), (5, 1, 3, 1)] {
            let tower = build_tower(&FieldSpec::new(pp, e, n, s)).unwrap();
            let ring = SkewRing::new(tower.clone());
            let k = tower.k();
            let all = enumerate_xts(k, s as usize, SubgroupSpec::full(k.order() as u64), DEFAULT_ENUM_CAP)
                .unwrap();
            for t in 1..=all.len().min(4) {
                if (n * s) as usize * t > 24 {
                    break;
                }
                let tuple = AdmissibleTuple::new(k, all[..t].to_vec());
                let cert = validate_admissible(k, &tuple, Some(&ring)).unwrap();
                assert_eq!(cert.lclm_matches, Some(true));
            }
        }
    }

    #[test]
    fn eval_sets() {
        let tower = build_tower(&FieldSpec::new(3, 1, 1, 3).with_reference_moduli()).unwrap();
        let a = eval_set(&tower, EvalKind::A, SubgroupSpec::full(3), DEFAULT_ENUM_CAP).unwrap();
        assert_eq!(a.len(), 8);
        assert_eq!(a, eval_set(&tower, EvalKind::A, SubgroupSpec::full(3), DEFAULT_ENUM_CAP).unwrap());
        let e = tower.e_field();
        for &b in &a {
            assert_eq!(min_poly_over_k(&tower, b).degree(), Some(3));
            assert!(!e.in_subfield(b, 1));
        }
        let tower9 = build_tower(&FieldSpec::new(3, 2, 1, 2).with_reference_moduli()).unwrap();
        let b = eval_set(&tower9, EvalKind::B, SubgroupSpec::squares(9), DEFAULT_ENUM_CAP).unwrap();
        assert_eq!(b.len(), 16);
    }

    #[test]
    fn default_tuple_prefers_small_subgroups() {
        let k = Gf::new(3, 1).unwrap();
        let tuple = default_tuple(&k, 1, 2, DEFAULT_ENUM_CAP).unwrap();
        assert_eq!(tuple.polys, vec![p(&[1, 1]), p(&[2, 1])]);
        assert!(default_tuple(&k, 1, 3, DEFAULT_ENUM_CAP).is_err());
    }
}
