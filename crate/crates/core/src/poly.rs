//! Dense univariate polynomials over a [`Gf`], little-endian in degree.

use crate::error::{Error, Result};
use crate::gf::{Elem, Gf};
use serde::{Deserialize, Serialize};

/// A polynomial in `y` with coefficients in a finite field; trailing zeros trimmed.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Poly {
    pub coeffs: Vec<Elem>,
}

impl Poly {
    pub fn new(mut coeffs: Vec<Elem>) -> Poly {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        Poly { coeffs }
    }

    pub fn zero() -> Poly {
        Poly { coeffs: Vec::new() }
    }

    pub fn one() -> Poly {
        Poly { coeffs: vec![Elem::ONE] }
    }

    pub fn constant(c: Elem) -> Poly {
        Poly::new(vec![c])
    }

    /// The monomial `y`.
    pub fn y() -> Poly {
        Poly { coeffs: vec![Elem::ZERO, Elem::ONE] }
    }

    /// `y - c` over `gf`.
    pub fn linear(gf: &Gf, c: Elem) -> Poly {
        Poly::new(vec![gf.neg(c), Elem::ONE])
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree, `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn coeff(&self, i: usize) -> Elem {
        self.coeffs.get(i).copied().unwrap_or(Elem::ZERO)
    }

    pub fn lead(&self) -> Elem {
        self.coeffs.last().copied().unwrap_or(Elem::ZERO)
    }

    pub fn is_monic(&self) -> bool {
        self.lead() == Elem::ONE
    }

    pub fn add(&self, gf: &Gf, other: &Poly) -> Poly {
        let n = self.coeffs.len().max(other.coeffs.len());
        Poly::new((0..n).map(|i| gf.add(self.coeff(i), other.coeff(i))).collect())
    }

    pub fn sub(&self, gf: &Gf, other: &Poly) -> Poly {
        let n = self.coeffs.len().max(other.coeffs.len());
        Poly::new((0..n).map(|i| gf.sub(self.coeff(i), other.coeff(i))).collect())
    }

    pub fn scale(&self, gf: &Gf, c: Elem) -> Poly {
        Poly::new(self.coeffs.iter().map(|&a| gf.mul(a, c)).collect())
    }

    pub fn mul(&self, gf: &Gf, other: &Poly) -> Poly {
        if self.is_zero() || other.is_zero() {
            return Poly::zero();
        }
        let mut out = vec![Elem::ZERO; self.coeffs.len() + other.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, &b) in other.coeffs.iter().enumerate() {
                out[i + j] = gf.add(out[i + j], gf.mul(a, b));
            }
        }
        Poly::new(out)
    }

    pub fn divmod(&self, gf: &Gf, d: &Poly) -> Result<(Poly, Poly)> {
        let dd = d.degree().ok_or(Error::DivisionByZero)?;
        let lead_inv = gf.inv(d.lead()).expect("nonzero leading coefficient");
        let mut r = self.coeffs.clone();
        if r.len() <= dd {
            return Ok((Poly::zero(), self.clone()));
        }
        let mut q = vec![Elem::ZERO; r.len() - dd];
        for top in (dd..r.len()).rev() {
            let c = gf.mul(r[top], lead_inv);
            if c.is_zero() {
                continue;
            }
            q[top - dd] = c;
            for (j, &dj) in d.coeffs.iter().enumerate() {
                let idx = top - dd + j;
                r[idx] = gf.sub(r[idx], gf.mul(c, dj));
            }
        }
        r.truncate(dd);
        Ok((Poly::new(q), Poly::new(r)))
    }

    pub fn rem(&self, gf: &Gf, d: &Poly) -> Result<Poly> {
        Ok(self.divmod(gf, d)?.1)
    }

    pub fn monic(&self, gf: &Gf) -> Poly {
        match gf.inv(self.lead()) {
            Some(i) => self.scale(gf, i),
            None => Poly::zero(),
        }
    }

    /// Monic greatest common divisor.
    pub fn gcd(&self, gf: &Gf, other: &Poly) -> Poly {
        let mut a = self.clone();
        let mut b = other.clone();
        while !b.is_zero() {
            let r = a.rem(gf, &b).expect("nonzero divisor");
            a = b;
            b = r;
        }
        a.monic(gf)
    }

    pub fn mulmod(&self, gf: &Gf, other: &Poly, m: &Poly) -> Poly {
        self.mul(gf, other).rem(gf, m).expect("nonzero modulus")
    }

    pub fn powmod(&self, gf: &Gf, mut e: u64, m: &Poly) -> Poly {
        let mut r = Poly::one().rem(gf, m).expect("nonzero modulus");
        let mut b = self.rem(gf, m).expect("nonzero modulus");
        while e > 0 {
            if e & 1 == 1 {
                r = r.mulmod(gf, &b, m);
            }
            b = b.mulmod(gf, &b, m);
            e >>= 1;
        }
        r
    }

    /// Horner evaluation in the coefficient field.
    pub fn eval(&self, gf: &Gf, a: Elem) -> Elem {
        self.coeffs
            .iter()
            .rev()
            .fold(Elem::ZERO, |acc, &c| gf.add(gf.mul(acc, a), c))
    }

    /// Evaluation at an element of an extension, through a coefficient embedding.
    pub fn eval_embedded(&self, ext: &Gf, embed: &[Elem], a: Elem) -> Elem {
        self.coeffs
            .iter()
            .rev()
            .fold(Elem::ZERO, |acc, &c| ext.add(ext.mul(acc, a), embed[c.0 as usize]))
    }

    /// `F(λ y)`.
    pub fn scale_variable(&self, gf: &Gf, lambda: Elem) -> Poly {
        let mut pw = Elem::ONE;
        let mut out = Vec::with_capacity(self.coeffs.len());
        for &c in &self.coeffs {
            out.push(gf.mul(c, pw));
            pw = gf.mul(pw, lambda);
        }
        Poly::new(out)
    }

    /// Irreducibility over the coefficient field (Rabin's test over `F_q`).
    pub fn is_irreducible(&self, gf: &Gf) -> bool {
        let Some(d) = self.degree() else {
            return false;
        };
        if d == 0 {
            return false;
        }
        if d == 1 {
            return true;
        }
        let f = self.monic(gf);
        let q = gf.order() as u64;
        let y = Poly::y();
        let frob = |k: usize| {
            let mut cur = y.clone();
            for _ in 0..k {
                cur = cur.powmod(gf, q, &f);
            }
            cur
        };
        if !frob(d).sub(gf, &y).is_zero() {
            return false;
        }
        crate::gf::prime_factors(d as u64).into_iter().all(|r| {
            let g = frob(d / r as usize).sub(gf, &y).gcd(gf, &f);
            g.degree() == Some(0)
        })
    }

    /// Coefficients as `F_p` digit arrays.
    pub fn to_digits(&self, gf: &Gf) -> Vec<Vec<u32>> {
        self.coeffs.iter().map(|&c| gf.digits(c)).collect()
    }

    pub fn from_digits(gf: &Gf, rows: &[Vec<u32>]) -> Result<Poly> {
        let coeffs = rows.iter().map(|r| gf.from_digits(r)).collect::<Result<Vec<_>>>()?;
        Ok(Poly::new(coeffs))
    }

    /// Human-readable form such as `y^3 + 2y + 1` (prime field) or with digit arrays.
    pub fn display(&self, gf: &Gf) -> String {
        if self.is_zero() {
            return "0".into();
        }
        let mut terms = Vec::new();
        for (i, &c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let cs = if gf.degree() == 1 {
                format!("{}", c.0)
            } else {
                format!("{:?}", gf.digits(c))
            };
            let term = match (i, c == Elem::ONE) {
                (0, _) => cs,
                (1, true) => "y".into(),
                (1, false) => format!("{cs}y"),
                (_, true) => format!("y^{i}"),
                (_, false) => format!("{cs}y^{i}"),
            };
            terms.push(term);
        }
        terms.join(" + ")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fp_poly(_gf: &Gf, c: &[u32]) -> Poly {
        Poly::new(c.iter().map(|&x| Elem(x)).collect())
    }

    #[test]
    fn division_identity() {
        let gf = Gf::new(5, 1).unwrap();
        let a = fp_poly(&gf, &[1, 2, 3, 4, 1]);
        let b = fp_poly(&gf, &[2, 0, 1]);
        let (q, r) = a.divmod(&gf, &b).unwrap();
        assert_eq!(q.mul(&gf, &b).add(&gf, &r), a);
        assert!(r.degree().unwrap_or(0) < 2);
    }

    #[test]
    fn irreducibility_known_cases() {
        let f5 = Gf::new(5, 1).unwrap();
        assert!(fp_poly(&f5, &[3, 3, 0, 1]).is_irreducible(&f5));
        let f3 = Gf::new(3, 1).unwrap();
        assert!(Poly::y().is_irreducible(&f3));
        assert!(!fp_poly(&f3, &[0, 0, 1]).is_irreducible(&f3));
    }

    #[test]
    fn irreducibility_matches_trial_division() {
        for (p, e) in [(2, 1), (3, 1), (2, 2), (5, 1)] {
            let gf = Gf::new(p, e).unwrap();
            let q = gf.order();
            for deg in 1..=4usize {
                if (q as u64).pow(deg as u32) > 4096 {
                    continue;
                }
                let monics = |d: usize| -> Vec<Poly> {
                    (0..q.pow(d as u32))
                        .map(|mut k| {
                            let mut c = Vec::new();
                            for _ in 0..d {
                                c.push(Elem(k % q));
                                k /= q;
                            }
                            c.push(Elem::ONE);
                            Poly::new(c)
                        })
                        .collect()
                };
                for f in monics(deg) {
                    let trial = (1..=deg / 2)
                        .flat_map(&monics)
                        .any(|g| f.rem(&gf, &g).unwrap().is_zero());
                    assert_eq!(f.is_irreducible(&gf), !trial, "{}", f.display(&gf));
                }
            }
        }
    }
}
