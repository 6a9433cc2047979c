//! Finite fields `F_{p^d}` in a polynomial basis with log/exp tables.
//!
//! An element is stored as its integer code `c_0 + c_1 p + ... + c_{d-1} p^{d-1}`
//! where `c_i` is the coefficient of `y^i` modulo the field's defining polynomial.
//! The *canonical order* compares coefficient sequences lexicographically starting
//! from `c_0`; it drives every "smallest element" choice in the crate.

use crate::error::{Error, Result};
use rand::Rng;
use serde::{Deserialize, Serialize};

/// Largest field order for which tables are built.
pub const MAX_FIELD_ORDER: u64 = 1 << 22;

const NONE: u32 = u32::MAX;

/// A field element, identified by its polynomial-basis code.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Elem(pub u32);

impl Elem {
    pub const ZERO: Elem = Elem(0);
    pub const ONE: Elem = Elem(1);

    pub fn is_zero(self) -> bool {
        self.0 == 0
    }
}

/// A finite field with precomputed discrete-log tables.
#[derive(Clone, Debug)]
pub struct Gf {
    p: u32,
    degree: u32,
    order: u32,
    modulus: Vec<u32>,
    generator: Elem,
    exp: Vec<u32>,
    log: Vec<u32>,
    zech: Vec<u32>,
    neg_one_log: u32,
}

impl PartialEq for Gf {
    fn eq(&self, other: &Self) -> bool {
        self.p == other.p && self.modulus == other.modulus
    }
}

impl Eq for Gf {}

impl Gf {
    /// Field of order `p^degree` defined by the canonically smallest irreducible modulus.
    pub fn new(p: u32, degree: u32) -> Result<Gf> {
        check_prime(p)?;
        if degree == 0 {
            return Err(Error::InvalidField("field degree must be positive".into()));
        }
        check_order(p, degree)?;
        let modulus = smallest_irreducible(p, degree);
        Gf::build(p, modulus)
    }

    /// Field defined by an explicit monic modulus, little-endian over `F_p`.
    pub fn with_modulus(p: u32, modulus: &[u32]) -> Result<Gf> {
        check_prime(p)?;
        if modulus.len() < 2 || *modulus.last().unwrap() != 1 {
            return Err(Error::InvalidField("modulus must be monic of positive degree".into()));
        }
        if modulus.iter().any(|&c| c >= p) {
            return Err(Error::InvalidField(format!("modulus coefficients must be below {p}")));
        }
        check_order(p, modulus.len() as u32 - 1)?;
        if !fp::is_irreducible(p, modulus) {
            return Err(Error::Reducible(format!("modulus {modulus:?} over F_{p}")));
        }
        Gf::build(p, modulus.to_vec())
    }

    fn build(p: u32, modulus: Vec<u32>) -> Result<Gf> {
        let degree = modulus.len() as u32 - 1;
        let order = p.pow(degree);
        let m = (order - 1) as usize;
        let factors = prime_factors(order as u64 - 1);
        let generator = (1..order)
            .map(|k| unrank_code(p, degree, k))
            .find(|&c| {
                factors
                    .iter()
                    .all(|&r| fp::pow_code(p, &modulus, c, (order as u64 - 1) / r) != 1)
            })
            .expect("multiplicative group is cyclic");
        let mut exp = vec![0u32; 2 * m.max(1)];
        let mut log = vec![NONE; order as usize];
        let mut cur = 1u32;
        for (i, slot) in exp.iter_mut().take(m).enumerate() {
            *slot = cur;
            log[cur as usize] = i as u32;
            cur = fp::mul_code(p, &modulus, cur, generator);
        }
        for i in m..2 * m {
            exp[i] = exp[i - m];
        }
        if m == 0 {
            exp[0] = 1;
        }
        let mut zech = vec![NONE; m.max(1)];
        for (k, z) in zech.iter_mut().enumerate().take(m) {
            let c = exp[k];
            let bumped = c - c % p + (c % p + 1) % p;
            if bumped != 0 {
                *z = log[bumped as usize];
            }
        }
        let neg_one_log = if p == 2 { 0 } else { log[(p - 1) as usize] };
        Ok(Gf {
            p,
            degree,
            order,
            modulus,
            generator: Elem(generator),
            exp,
            log,
            zech,
            neg_one_log,
        })
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    /// Degree over the prime field.
    pub fn degree(&self) -> u32 {
        self.degree
    }

    /// Number of elements.
    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn modulus(&self) -> &[u32] {
        &self.modulus
    }

    /// Smallest primitive element in canonical order.
    pub fn generator(&self) -> Elem {
        self.generator
    }

    /// Class of `y`, the root of the defining modulus.
    pub fn root(&self) -> Elem {
        if self.degree == 1 {
            Elem((self.p - self.modulus[0]) % self.p)
        } else {
            Elem(self.p)
        }
    }

    fn group_order(&self) -> u32 {
        self.order - 1
    }

    pub fn add(&self, a: Elem, b: Elem) -> Elem {
        if self.p == 2 {
            return Elem(a.0 ^ b.0);
        }
        if self.degree == 1 {
            return Elem((a.0 + b.0) % self.p);
        }
        if a.0 == 0 {
            return b;
        }
        if b.0 == 0 {
            return a;
        }
        let la = self.log[a.0 as usize];
        let lb = self.log[b.0 as usize];
        let m = self.group_order();
        let k = if lb >= la { lb - la } else { lb + m - la };
        let z = self.zech[k as usize];
        if z == NONE {
            Elem::ZERO
        } else {
            Elem(self.exp[(la + z) as usize])
        }
    }

    pub fn neg(&self, a: Elem) -> Elem {
        if self.p == 2 || a.0 == 0 {
            return a;
        }
        if self.degree == 1 {
            return Elem(self.p - a.0);
        }
        let l = self.log[a.0 as usize] + self.neg_one_log;
        Elem(self.exp[l as usize])
    }

    pub fn sub(&self, a: Elem, b: Elem) -> Elem {
        self.add(a, self.neg(b))
    }

    pub fn mul(&self, a: Elem, b: Elem) -> Elem {
        if a.0 == 0 || b.0 == 0 {
            return Elem::ZERO;
        }
        let l = self.log[a.0 as usize] + self.log[b.0 as usize];
        Elem(self.exp[l as usize])
    }

    /// Multiplicative inverse; `None` for zero.
    pub fn inv(&self, a: Elem) -> Option<Elem> {
        if a.0 == 0 {
            return None;
        }
        let l = self.log[a.0 as usize];
        let m = self.group_order();
        Some(Elem(self.exp[((m - l) % m.max(1)) as usize]))
    }

    pub fn div(&self, a: Elem, b: Elem) -> Result<Elem> {
        let bi = self.inv(b).ok_or(Error::DivisionByZero)?;
        Ok(self.mul(a, bi))
    }

    pub fn pow(&self, a: Elem, e: u64) -> Elem {
        if e == 0 {
            return Elem::ONE;
        }
        if a.0 == 0 {
            return Elem::ZERO;
        }
        let m = self.group_order() as u64;
        let l = (self.log[a.0 as usize] as u64 * (e % m)) % m;
        Elem(self.exp[l as usize])
    }

    /// Signed power, inverting for negative exponents.
    pub fn powi(&self, a: Elem, e: i64) -> Result<Elem> {
        if e >= 0 {
            Ok(self.pow(a, e as u64))
        } else {
            let ai = self.inv(a).ok_or(Error::DivisionByZero)?;
            Ok(self.pow(ai, e.unsigned_abs()))
        }
    }

    /// Discrete logarithm to the base of [`Gf::generator`].
    pub fn log(&self, a: Elem) -> Option<u32> {
        if a.0 == 0 {
            None
        } else {
            Some(self.log[a.0 as usize])
        }
    }

    /// `g^i` for the field generator `g`.
    pub fn exp(&self, i: u64) -> Elem {
        Elem(self.exp[(i % self.group_order().max(1) as u64) as usize])
    }

    /// Embeds an integer into the prime field.
    pub fn from_int(&self, v: i64) -> Elem {
        Elem(v.rem_euclid(self.p as i64) as u32)
    }

    /// `a^{p^m}`.
    pub fn frobenius(&self, a: Elem, m: u32) -> Elem {
        if a.0 == 0 {
            return a;
        }
        let g = self.group_order() as u64;
        let e = mod_pow(self.p as u64, m as u64, g.max(1));
        let l = (self.log[a.0 as usize] as u64 * e) % g.max(1);
        Elem(self.exp[l as usize])
    }

    /// Whether `a` lies in the subfield of order `p^d`.
    pub fn in_subfield(&self, a: Elem, d: u32) -> bool {
        if a.0 == 0 {
            return true;
        }
        let c = self.group_order() / (self.p.pow(d) - 1);
        self.log[a.0 as usize].is_multiple_of(c)
    }

    /// Norm onto the subfield of order `p^d`, as an element of this field.
    pub fn norm_to_subfield(&self, a: Elem, d: u32) -> Elem {
        let c = (self.group_order() / (self.p.pow(d) - 1)) as u64;
        self.pow(a, c)
    }

    /// Primitive element of the subfield of order `p^d`.
    pub fn subfield_generator(&self, d: u32) -> Elem {
        let c = (self.group_order() / (self.p.pow(d) - 1)) as u64;
        self.exp(c)
    }

    /// Quadratic residuosity; every element counts as a square in characteristic 2.
    pub fn is_square(&self, a: Elem) -> bool {
        if self.p == 2 || a.0 == 0 {
            return true;
        }
        self.log[a.0 as usize].is_multiple_of(2)
    }

    /// Coefficients over `F_p`, little-endian, length `degree`.
    pub fn digits(&self, a: Elem) -> Vec<u32> {
        let mut out = Vec::with_capacity(self.degree as usize);
        let mut c = a.0;
        for _ in 0..self.degree {
            out.push(c % self.p);
            c /= self.p;
        }
        out
    }

    pub fn from_digits(&self, digits: &[u32]) -> Result<Elem> {
        if digits.len() != self.degree as usize {
            return Err(Error::Parse(format!(
                "expected {} coefficients, got {}",
                self.degree,
                digits.len()
            )));
        }
        let mut c = 0u32;
        for &d in digits.iter().rev() {
            if d >= self.p {
                return Err(Error::Parse(format!("coefficient {d} not reduced mod {}", self.p)));
            }
            c = c * self.p + d;
        }
        Ok(Elem(c))
    }

    /// Position of `a` in the canonical order.
    pub fn rank(&self, a: Elem) -> u32 {
        let mut c = a.0;
        let mut k = 0;
        for _ in 0..self.degree {
            k = k * self.p + c % self.p;
            c /= self.p;
        }
        k
    }

    /// Element at position `k` of the canonical order.
    pub fn unrank(&self, k: u32) -> Elem {
        Elem(unrank_code(self.p, self.degree, k))
    }

    /// All elements in canonical order.
    pub fn elements(&self) -> impl Iterator<Item = Elem> + '_ {
        (0..self.order).map(move |k| self.unrank(k))
    }

    pub fn random<R: Rng + ?Sized>(&self, rng: &mut R) -> Elem {
        Elem(rng.gen_range(0..self.order))
    }

    pub fn random_nonzero<R: Rng + ?Sized>(&self, rng: &mut R) -> Elem {
        Elem(rng.gen_range(1..self.order))
    }

    /// Evaluates a polynomial with coefficients in `F_p` at `a`.
    pub fn eval_prime_poly(&self, coeffs: &[u32], a: Elem) -> Elem {
        coeffs
            .iter()
            .rev()
            .fold(Elem::ZERO, |acc, &c| self.add(self.mul(acc, a), Elem(c)))
    }
}

fn check_prime(p: u32) -> Result<()> {
    if p < 2 || (2..p).take_while(|d| d * d <= p).any(|d| p.is_multiple_of(d)) {
        return Err(Error::InvalidField(format!("{p} is not prime")));
    }
    Ok(())
}

fn check_order(p: u32, degree: u32) -> Result<()> {
    let order = (p as u64).checked_pow(degree).unwrap_or(u64::MAX);
    if order > MAX_FIELD_ORDER {
        return Err(Error::InvalidField(format!(
            "field of order {p}^{degree} exceeds the table limit {MAX_FIELD_ORDER}"
        )));
    }
    Ok(())
}

fn unrank_code(p: u32, degree: u32, k: u32) -> u32 {
    let mut k = k;
    let mut c = 0;
    let mut place = 1;
    let top = p.pow(degree.saturating_sub(1));
    for _ in 0..degree {
        c += (k / top.max(1) % p) * place;
        k = (k % top.max(1)) * p;
        place *= p;
    }
    c
}

pub(crate) fn mod_pow(base: u64, exp: u64, m: u64) -> u64 {
    if m == 1 {
        return 0;
    }
    let mut r = 1u128;
    let mut b = base as u128 % m as u128;
    let mut e = exp;
    while e > 0 {
        if e & 1 == 1 {
            r = r * b % m as u128;
        }
        b = b * b % m as u128;
        e >>= 1;
    }
    r as u64
}

pub(crate) fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            out.push(d);
            while n.is_multiple_of(d) {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

/// Canonically smallest monic irreducible polynomial of the given degree over `F_p`.
pub fn smallest_irreducible(p: u32, degree: u32) -> Vec<u32> {
    let count = p.pow(degree);
    (0..count)
        .map(|k| {
            let mut m: Vec<u32> = fp::digits_from_rank(p, degree, k);
            m.push(1);
            m
        })
        .find(|m| fp::is_irreducible(p, m))
        .expect("irreducible polynomials exist in every degree")
}

/// Dense polynomial arithmetic over `F_p` used while bootstrapping tables.
mod fp {
    pub fn digits_from_rank(p: u32, degree: u32, k: u32) -> Vec<u32> {
        let mut out = vec![0; degree as usize];
        let mut k = k;
        for i in (0..degree as usize).rev() {
            out[i] = k % p;
            k /= p;
        }
        out
    }

    fn trim(v: &mut Vec<u32>) {
        while v.last() == Some(&0) {
            v.pop();
        }
    }

    fn inv_mod(a: u32, p: u32) -> u32 {
        let mut r = 1u64;
        let mut b = a as u64;
        let mut e = p - 2;
        while e > 0 {
            if e & 1 == 1 {
                r = r * b % p as u64;
            }
            b = b * b % p as u64;
            e >>= 1;
        }
        r as u32
    }

    fn rem(a: &[u32], m: &[u32], p: u32) -> Vec<u32> {
        let mut r = a.to_vec();
        trim(&mut r);
        let dm = m.len() - 1;
        let lead_inv = inv_mod(m[dm], p) as u64;
        while r.len() > dm {
            let top = r.len() - 1;
            let c = (r[top] as u64 * lead_inv % p as u64) as u32;
            if c != 0 {
                for (j, &mj) in m.iter().enumerate() {
                    let idx = top - dm + j;
                    r[idx] = (r[idx] + p - (c as u64 * mj as u64 % p as u64) as u32) % p;
                }
            }
            r.pop();
            trim(&mut r);
        }
        r
    }

    fn mul(a: &[u32], b: &[u32], p: u32) -> Vec<u32> {
        if a.is_empty() || b.is_empty() {
            return Vec::new();
        }
        let mut out = vec![0u64; a.len() + b.len() - 1];
        for (i, &x) in a.iter().enumerate() {
            for (j, &y) in b.iter().enumerate() {
                out[i + j] += x as u64 * y as u64;
            }
        }
        let mut v: Vec<u32> = out.into_iter().map(|c| (c % p as u64) as u32).collect();
        trim(&mut v);
        v
    }

    fn mulmod(a: &[u32], b: &[u32], m: &[u32], p: u32) -> Vec<u32> {
        rem(&mul(a, b, p), m, p)
    }

    fn powmod(base: &[u32], mut e: u64, m: &[u32], p: u32) -> Vec<u32> {
        let mut r = vec![1];
        let mut b = rem(base, m, p);
        while e > 0 {
            if e & 1 == 1 {
                r = mulmod(&r, &b, m, p);
            }
            b = mulmod(&b, &b, m, p);
            e >>= 1;
        }
        r
    }

    fn gcd(a: &[u32], b: &[u32], p: u32) -> Vec<u32> {
        let mut a = a.to_vec();
        let mut b = b.to_vec();
        trim(&mut a);
        trim(&mut b);
        while !b.is_empty() {
            let r = rem(&a, &b, p);
            a = b;
            b = r;
        }
        a
    }

    fn sub(a: &[u32], b: &[u32], p: u32) -> Vec<u32> {
        let n = a.len().max(b.len());
        let mut v: Vec<u32> = (0..n)
            .map(|i| {
                let x = a.get(i).copied().unwrap_or(0);
                let y = b.get(i).copied().unwrap_or(0);
                (x + p - y) % p
            })
            .collect();
        trim(&mut v);
        v
    }

    /// Rabin's irreducibility test.
    pub fn is_irreducible(p: u32, m: &[u32]) -> bool {
        let d = m.len() as u64 - 1;
        if d == 0 {
            return false;
        }
        if d == 1 {
            return true;
        }
        let y = vec![0, 1];
        let frob = |k: u64| {
            let mut cur = y.clone();
            for _ in 0..k {
                cur = powmod(&cur, p as u64, m, p);
            }
            cur
        };
        if !sub(&frob(d), &y, p).is_empty() {
            return false;
        }
        super::prime_factors(d).into_iter().all(|r| {
            let g = gcd(&sub(&frob(d / r), &y, p), m, p);
            g.len() == 1
        })
    }

    fn code_to_poly(p: u32, mut c: u32) -> Vec<u32> {
        let mut v = Vec::new();
        while c > 0 {
            v.push(c % p);
            c /= p;
        }
        v
    }

    fn poly_to_code(p: u32, v: &[u32]) -> u32 {
        v.iter().rev().fold(0, |acc, &d| acc * p + d)
    }

    pub fn mul_code(p: u32, m: &[u32], a: u32, b: u32) -> u32 {
        let r = mulmod(&code_to_poly(p, a), &code_to_poly(p, b), m, p);
        poly_to_code(p, &r)
    }

    pub fn pow_code(p: u32, m: &[u32], a: u32, e: u64) -> u32 {
        poly_to_code(p, &powmod(&code_to_poly(p, a), e, m, p))
    }
}
