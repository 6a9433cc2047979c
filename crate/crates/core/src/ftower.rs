//! The tower `F_p ⊆ K = F_q ⊆ L = F_{q^n}` together with the block alphabet
//! `E = F_{q^s}`, Frobenius automorphisms, norms and truncated norms.

use crate::error::{Error, Result};
use crate::gf::{Elem, Gf};
use crate::linalg::Matrix;
use num_integer::Integer;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::sync::Arc;

const NONE: u32 = u32::MAX;

/// Parameters of a tower. `modulus_override` maps a degree over `F_p`
/// (as a decimal string) to an explicit monic modulus, little-endian.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FieldSpec {
    pub p: u32,
    pub e: u32,
    pub n: u32,
    pub s: u32,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub modulus_override: BTreeMap<String, Vec<u32>>,
}

impl FieldSpec {
    pub fn new(p: u32, e: u32, n: u32, s: u32) -> FieldSpec {
        FieldSpec { p, e, n, s, modulus_override: BTreeMap::new() }
    }

    /// Builds a spec from `q = p^e`.
    pub fn from_q(q: u32, n: u32, s: u32) -> Result<FieldSpec> {
        let (p, e) = prime_power(q)
            .ok_or_else(|| Error::InvalidField(format!("{q} is not a prime power")))?;
        Ok(FieldSpec::new(p, e, n, s))
    }

    pub fn with_override(mut self, degree: u32, modulus: &[u32]) -> FieldSpec {
        self.modulus_override.insert(degree.to_string(), modulus.to_vec());
        self
    }

    /// Overrides reproducing the fields used in the worked examples:
    /// `α² = α + 1` in `F_9`, `ξ³ = ξ + 2` in `F_27`, `ξ⁴ = ξ³ + 1` in `F_81`,
    /// and `ξ` a root of `y³ + 3y + 3` in `F_125`.
    pub fn with_reference_moduli(mut self) -> FieldSpec {
        let table: &[(u32, u32, &[u32])] = &[
            (3, 2, &[2, 2, 1]),
            (3, 3, &[1, 2, 0, 1]),
            (3, 4, &[2, 0, 0, 2, 1]),
            (5, 3, &[3, 3, 0, 1]),
        ];
        for &(p, d, m) in table {
            if p == self.p {
                self.modulus_override.entry(d.to_string()).or_insert_with(|| m.to_vec());
            }
        }
        self
    }

    pub fn q(&self) -> u64 {
        (self.p as u64).pow(self.e)
    }
}

/// `(p, e)` with `q = p^e`, if `q` is a prime power.
pub fn prime_power(q: u32) -> Option<(u32, u32)> {
    if q < 2 {
        return None;
    }
    let p = (2..=q).find(|d| q.is_multiple_of(*d))?;
    let mut e = 0;
    let mut r = q;
    while r.is_multiple_of(p) {
        r /= p;
        e += 1;
    }
    (r == 1).then_some((p, e))
}

/// Named fields of the tower.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Level {
    Prime,
    K,
    L,
    E,
}

/// The automorphism `y ↦ y^{p^h}` of `L`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AutSpec {
    pub h: u32,
}

/// Immutable tower context shared by all algebra layers.
#[derive(Debug)]
pub struct TowerContext {
    spec: FieldSpec,
    prime: Arc<Gf>,
    k: Arc<Gf>,
    l: Arc<Gf>,
    e: Arc<Gf>,
    k_to_l: Vec<Elem>,
    k_to_e: Vec<Elem>,
    l_to_k: Vec<u32>,
    e_to_k: Vec<u32>,
    sigma: Vec<Vec<Elem>>,
    kcoord: Matrix,
}

/// Builds the tower described by `spec`.
pub fn build_tower(spec: &FieldSpec) -> Result<Arc<TowerContext>> {
    TowerContext::new(spec).map(Arc::new)
}

impl TowerContext {
    pub fn new(spec: &FieldSpec) -> Result<TowerContext> {
        if spec.e == 0 || spec.n == 0 || spec.s == 0 {
            return Err(Error::InvalidField("degrees e, n, s must be positive".into()));
        }
        let mut fields: BTreeMap<u32, Arc<Gf>> = BTreeMap::new();
        for d in [1, spec.e, spec.e * spec.n, spec.e * spec.s] {
            if fields.contains_key(&d) {
                continue;
            }
            let gf = match spec.modulus_override.get(&d.to_string()) {
                Some(m) => {
                    if m.len() as u32 != d + 1 {
                        return Err(Error::InvalidField(format!(
                            "override for degree {d} has {} coefficients",
                            m.len()
                        )));
                    }
                    Gf::with_modulus(spec.p, m)?
                }
                None => Gf::new(spec.p, d)?,
            };
            fields.insert(d, Arc::new(gf));
        }
        let prime = fields[&1].clone();
        let k = fields[&spec.e].clone();
        let l = fields[&(spec.e * spec.n)].clone();
        let e = fields[&(spec.e * spec.s)].clone();
        let k_to_l = embedding(&k, &l);
        let k_to_e = embedding(&k, &e);
        let l_to_k = inverse_table(&k_to_l, l.order());
        let e_to_k = inverse_table(&k_to_e, e.order());
        let sigma = (0..spec.n)
            .map(|i| (0..l.order()).map(|c| l.frobenius(Elem(c), spec.e * i)).collect())
            .collect();
        let kcoord = kcoord_matrix(&prime, &k, &l, &k_to_l, spec.n);
        Ok(TowerContext {
            spec: spec.clone(),
            prime,
            k,
            l,
            e,
            k_to_l,
            k_to_e,
            l_to_k,
            e_to_k,
            sigma,
            kcoord,
        })
    }

    pub fn spec(&self) -> &FieldSpec {
        &self.spec
    }

    pub fn p(&self) -> u32 {
        self.spec.p
    }

    pub fn e(&self) -> u32 {
        self.spec.e
    }

    pub fn n(&self) -> u32 {
        self.spec.n
    }

    pub fn s(&self) -> u32 {
        self.spec.s
    }

    pub fn q(&self) -> u32 {
        self.k.order()
    }

    pub fn prime(&self) -> &Gf {
        &self.prime
    }

    pub fn k(&self) -> &Gf {
        &self.k
    }

    pub fn l(&self) -> &Gf {
        &self.l
    }

    /// The block alphabet `F_{q^s}`.
    pub fn e_field(&self) -> &Gf {
        &self.e
    }

    pub fn field(&self, level: Level) -> &Gf {
        match level {
            Level::Prime => &self.prime,
            Level::K => &self.k,
            Level::L => &self.l,
            Level::E => &self.e,
        }
    }

    /// The Galois generator `σ`: the `q`-power map.
    pub fn sigma(&self) -> AutSpec {
        AutSpec { h: self.spec.e % (self.spec.e * self.spec.n) }
    }

    pub fn k_to_l(&self, a: Elem) -> Elem {
        self.k_to_l[a.0 as usize]
    }

    pub fn k_to_e(&self, a: Elem) -> Elem {
        self.k_to_e[a.0 as usize]
    }

    pub fn k_to_l_table(&self) -> &[Elem] {
        &self.k_to_l
    }

    pub fn k_to_e_table(&self) -> &[Elem] {
        &self.k_to_e
    }

    /// Inverse of the embedding `K ↪ L` on its image.
    pub fn l_to_k(&self, a: Elem) -> Option<Elem> {
        let v = self.l_to_k[a.0 as usize];
        (v != NONE).then_some(Elem(v))
    }

    pub fn e_to_k(&self, a: Elem) -> Option<Elem> {
        let v = self.e_to_k[a.0 as usize];
        (v != NONE).then_some(Elem(v))
    }

    /// `σ^i(a)` for `a ∈ L`.
    #[inline]
    pub fn sigma_pow(&self, a: Elem, i: usize) -> Elem {
        self.sigma[i % self.sigma.len()][a.0 as usize]
    }

    /// `a^{p^{h·j mod ne}}` for `a ∈ L`.
    pub fn frobenius_apply(&self, a: Elem, j: i64, aut: AutSpec) -> Elem {
        let ne = (self.spec.e * self.spec.n) as i64;
        let m = (aut.h as i64 * j).rem_euclid(ne);
        self.l.frobenius(a, m as u32)
    }

    /// Degree over `F_p` of the fixed field of `aut` inside `L`.
    pub fn fixed_field_degree(&self, aut: AutSpec) -> u32 {
        let ne = self.spec.e * self.spec.n;
        if aut.h.is_multiple_of(ne) {
            ne
        } else {
            ne.gcd(&aut.h)
        }
    }

    /// Relative norm from `sup` down to `sub`, returned as an element of `sub`.
    pub fn norm_between(&self, a: Elem, sub: Level, sup: Level) -> Result<Elem> {
        if sub == sup {
            return Ok(a);
        }
        let nested = matches!(
            (sub, sup),
            (Level::Prime, _) | (Level::K, Level::L) | (Level::K, Level::E)
        );
        if !nested {
            return Err(Error::NotNested(format!("{sub:?} is not below {sup:?}")));
        }
        let big = self.field(sup);
        let sub_deg = self.field(sub).degree();
        let v = big.norm_to_subfield(a, sub_deg);
        match (sub, sup) {
            (Level::Prime, _) => Ok(v),
            (Level::K, Level::L) => Ok(self.l_to_k(v).expect("norm lands in K")),
            (Level::K, Level::E) => Ok(self.e_to_k(v).expect("norm lands in K")),
            _ => unreachable!(),
        }
    }

    /// `N_{L/K}(a)` as an element of `K`.
    pub fn norm_l_k(&self, a: Elem) -> Elem {
        self.l_to_k(self.l.norm_to_subfield(a, self.spec.e)).expect("norm lands in K")
    }

    /// `∏_{j<i} σ^j(a)`.
    pub fn truncated_norm(&self, a: Elem, i: usize) -> Elem {
        if i == 0 {
            return Elem::ONE;
        }
        if a.is_zero() {
            return Elem::ZERO;
        }
        let l = &self.l;
        let m = (l.order() - 1) as u64;
        let q = self.q() as u64 % m.max(1);
        let mut exp_sum = 0u64;
        let mut qj = 1u64 % m.max(1);
        for _ in 0..i {
            exp_sum = (exp_sum + qj) % m.max(1);
            qj = qj * q % m.max(1);
        }
        l.pow(a, exp_sum)
    }

    /// Squareness in the given level with a flag set in characteristic 2.
    pub fn is_square(&self, a: Elem, level: Level) -> SquareTest {
        let gf = self.field(level);
        SquareTest { square: gf.is_square(a), char_two: gf.p() == 2 }
    }

    /// Coordinates of `a ∈ L` in the fixed `K`-basis `1, ω, …, ω^{n-1}` of `L`
    /// (`ω` the generator of `L`).
    pub fn k_coords(&self, a: Elem) -> Vec<Elem> {
        let digits: Vec<Elem> = self.l.digits(a).into_iter().map(Elem).collect();
        let v = self.kcoord.mul_vec(&self.prime, &digits);
        let e = self.spec.e as usize;
        v.chunks(e)
            .map(|c| {
                let d: Vec<u32> = c.iter().map(|x| x.0).collect();
                self.k.from_digits(&d).expect("reduced digits")
            })
            .collect()
    }

    /// Inverse of [`TowerContext::k_coords`].
    pub fn from_k_coords(&self, coords: &[Elem]) -> Elem {
        let omega = self.l.generator();
        let mut acc = Elem::ZERO;
        let mut pw = Elem::ONE;
        for &c in coords {
            acc = self.l.add(acc, self.l.mul(self.k_to_l(c), pw));
            pw = self.l.mul(pw, omega);
        }
        acc
    }

    /// An `F_p`-basis of `K`, embedded in `L`.
    pub fn k_basis_in_l(&self) -> Vec<Elem> {
        (0..self.spec.e).map(|i| self.k_to_l(Elem(self.spec.p.pow(i)))).collect()
    }

    /// An `F_p`-basis of `L` (the polynomial basis).
    pub fn l_basis(&self) -> Vec<Elem> {
        (0..self.spec.e * self.spec.n).map(|i| Elem(self.spec.p.pow(i))).collect()
    }

    /// Serialises an element of a level as little-endian `F_p` coefficients.
    pub fn elem_to_digits(&self, a: Elem, level: Level) -> Vec<u32> {
        self.field(level).digits(a)
    }

    pub fn elem_from_digits(&self, digits: &[u32], level: Level) -> Result<Elem> {
        self.field(level).from_digits(digits)
    }
}

/// Outcome of a squareness query.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct SquareTest {
    pub square: bool,
    pub char_two: bool,
}

/// Embedding `sub ↪ sup` sending the root of `sub`'s modulus to its canonically
/// smallest root in `sup`; the identity when both are the same field.
fn embedding(sub: &Gf, sup: &Gf) -> Vec<Elem> {
    if sub == sup {
        return (0..sub.order()).map(Elem).collect();
    }
    let r = sup
        .elements()
        .find(|&x| sup.eval_prime_poly(sub.modulus(), x).is_zero())
        .expect("subfield modulus splits in the extension");
    let powers: Vec<Elem> = (0..sub.degree()).map(|i| sup.pow(r, i as u64)).collect();
    (0..sub.order())
        .map(|c| {
            sub.digits(Elem(c))
                .iter()
                .zip(&powers)
                .fold(Elem::ZERO, |acc, (&d, &pw)| sup.add(acc, sup.mul(Elem(d), pw)))
        })
        .collect()
}

fn inverse_table(embed: &[Elem], sup_order: u32) -> Vec<u32> {
    let mut t = vec![NONE; sup_order as usize];
    for (i, &x) in embed.iter().enumerate() {
        t[x.0 as usize] = i as u32;
    }
    t
}

fn kcoord_matrix(prime: &Gf, k: &Gf, l: &Gf, k_to_l: &[Elem], n: u32) -> Matrix {
    let e = k.degree();
    let p = k.p();
    let omega = l.generator();
    let mut cols = Vec::new();
    let mut pw = Elem::ONE;
    for _ in 0..n {
        for i in 0..e {
            let kappa = k_to_l[p.pow(i) as usize];
            let v = l.mul(kappa, pw);
            cols.push(l.digits(v).into_iter().map(Elem).collect::<Vec<_>>());
        }
        pw = l.mul(pw, omega);
    }
    Matrix::from_cols(&cols).inverse(prime).expect("powers of a generator span L over K")
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn f9_over_f3() -> TowerContext {
        TowerContext::new(&FieldSpec::new(3, 1, 2, 2).with_reference_moduli()).unwrap()
    }

    #[test]
    fn degenerate_tower() {
        let t = TowerContext::new(&FieldSpec::new(3, 1, 1, 1)).unwrap();
        assert_eq!(t.l().order(), 3);
        assert_eq!(t.e_field().order(), 3);
        assert_eq!(t.sigma_pow(Elem(2), 1), Elem(2));
    }

    #[test]
    fn reference_fields() {
        let t = TowerContext::new(&FieldSpec::new(3, 2, 2, 2).with_reference_moduli()).unwrap();
        let k = t.k();
        let a = k.generator();
        assert_eq!(k.mul(a, a), k.add(a, Elem::ONE));
        let t = TowerContext::new(&FieldSpec::new(5, 1, 3, 3).with_reference_moduli()).unwrap();
        let l = t.l();
        let xi = l.root();
        let v = l.add(l.add(l.pow(xi, 3), l.mul(Elem(3), xi)), Elem(3));
        assert!(v.is_zero());
        assert_eq!(l.generator(), l.unrank(l.rank(l.generator())));
        assert_eq!(l.log(xi).map(|g| num_integer::gcd(g, 124)), Some(1));
    }

    #[test]
    fn frobenius_in_f9() {
        let t = f9_over_f3();
        let l = t.l();
        let alpha = l.root();
        // α³ by repeated squaring
        let cube = l.mul(l.mul(alpha, alpha), alpha);
        let expected = l.add(l.mul(Elem(2), alpha), Elem::ONE);
        assert_eq!(cube, expected);
        assert_eq!(t.frobenius_apply(alpha, 1, t.sigma()), expected);
        assert_eq!(t.frobenius_apply(alpha, 0, t.sigma()), alpha);
        assert_eq!(t.norm_between(alpha, Level::K, Level::L).unwrap(), Elem(2));
        assert_eq!(t.truncated_norm(alpha, 2), Elem(2));
        assert_eq!(t.truncated_norm(alpha, 0), Elem::ONE);
    }

    #[test]
    fn norms_and_truncated_norms() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for spec in [FieldSpec::new(2, 2, 3, 2), FieldSpec::new(3, 2, 2, 3), FieldSpec::new(5, 1, 3, 2)]
        {
            let t = TowerContext::new(&spec).unwrap();
            let l = t.l();
            for _ in 0..100 {
                let a = l.random(&mut rng);
                assert_eq!(t.frobenius_apply(a, spec.n as i64, t.sigma()), a);
                let nk = t.norm_between(a, Level::K, Level::L).unwrap();
                let np = t.norm_between(a, Level::Prime, Level::L).unwrap();
                assert_eq!(t.norm_between(nk, Level::Prime, Level::K).unwrap(), np);
                for j in 1..=3usize {
                    let tn = t.truncated_norm(a, j * spec.n as usize);
                    assert_eq!(tn, t.k_to_l(t.k().pow(nk, j as u64)));
                }
                for i in 0..=(2 * spec.n as usize) {
                    assert_eq!(
                        t.truncated_norm(a, i + 1),
                        l.mul(t.truncated_norm(a, i), t.sigma_pow(a, i))
                    );
                }
            }
        }
    }

    #[test]
    fn sigma_fixed_field_is_k() {
        for spec in [FieldSpec::new(2, 2, 3, 1), FieldSpec::new(3, 1, 4, 1), FieldSpec::new(5, 1, 2, 1)] {
            let t = TowerContext::new(&spec).unwrap();
            let fixed: Vec<Elem> =
                t.l().elements().filter(|&a| t.sigma_pow(a, 1) == a).collect();
            assert_eq!(fixed.len() as u32, t.q());
            assert!(fixed.iter().all(|&a| t.l_to_k(a).is_some()));
            let order = (1..=spec.n as usize)
                .find(|&i| t.l().elements().all(|a| t.sigma_pow(a, i) == a))
                .unwrap();
            assert_eq!(order, spec.n as usize);
        }
    }

    #[test]
    fn norm_fibers_are_uniform() {
        let t = TowerContext::new(&FieldSpec::new(2, 2, 3, 1)).unwrap();
        let mut counts = vec![0u32; t.q() as usize];
        for a in t.l().elements().skip(1) {
            counts[t.norm_l_k(a).0 as usize] += 1;
        }
        let fiber = (t.l().order() - 1) / (t.q() - 1);
        assert_eq!(counts[0], 0);
        assert!(counts[1..].iter().all(|&c| c == fiber));
    }

    #[test]
    fn k_coordinates_roundtrip() {
        let t = TowerContext::new(&FieldSpec::new(2, 2, 3, 1)).unwrap();
        for a in t.l().elements() {
            assert_eq!(t.from_k_coords(&t.k_coords(a)), a);
        }
    }

    #[test]
    fn squares_in_f9() {
        let t = TowerContext::new(&FieldSpec::new(3, 2, 1, 1).with_reference_moduli()).unwrap();
        let k = t.k();
        let a = k.generator();
        for j in [0, 2, 4, 6] {
            assert!(t.is_square(k.pow(a, j), Level::K).square);
        }
        assert!(!t.is_square(a, Level::K).square);
        assert!(t.is_square(Elem::ONE, Level::K).square);
    }

    #[test]
    fn rejects_bad_specs() {
        assert!(TowerContext::new(&FieldSpec::new(4, 1, 1, 1)).is_err());
        assert!(TowerContext::new(&FieldSpec::new(3, 0, 1, 1)).is_err());
        let t = TowerContext::new(&FieldSpec::new(3, 1, 2, 3)).unwrap();
        assert!(t.norm_between(Elem::ONE, Level::L, Level::E).is_err());
    }
}
