//! Dense linear algebra over a finite field.

use crate::gf::{Elem, Gf};

/// Row-major matrix over a [`Gf`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Matrix {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<Elem>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Matrix {
        Matrix { rows, cols, data: vec![Elem::ZERO; rows * cols] }
    }

    pub fn identity(n: usize) -> Matrix {
        let mut m = Matrix::zeros(n, n);
        for i in 0..n {
            m.set(i, i, Elem::ONE);
        }
        m
    }

    pub fn from_rows(rows: &[Vec<Elem>]) -> Matrix {
        let cols = rows.first().map_or(0, |r| r.len());
        let mut data = Vec::with_capacity(rows.len() * cols);
        for r in rows {
            assert_eq!(r.len(), cols, "ragged rows");
            data.extend_from_slice(r);
        }
        Matrix { rows: rows.len(), cols, data }
    }

    pub fn from_cols(cols: &[Vec<Elem>]) -> Matrix {
        Matrix::from_rows(cols).transpose()
    }

    pub fn get(&self, i: usize, j: usize) -> Elem {
        self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Elem) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[Elem] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn to_rows(&self) -> Vec<Vec<Elem>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn transpose(&self) -> Matrix {
        let mut t = Matrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.set(j, i, self.get(i, j));
            }
        }
        t
    }

    pub fn add(&self, gf: &Gf, other: &Matrix) -> Matrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(&a, &b)| gf.add(a, b)).collect(),
        }
    }

    pub fn sub(&self, gf: &Gf, other: &Matrix) -> Matrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(&a, &b)| gf.sub(a, b)).collect(),
        }
    }

    pub fn mul(&self, gf: &Gf, other: &Matrix) -> Matrix {
        assert_eq!(self.cols, other.rows);
        let mut out = Matrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let idx = i * out.cols + j;
                    out.data[idx] = gf.add(out.data[idx], gf.mul(a, other.get(k, j)));
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, gf: &Gf, v: &[Elem]) -> Vec<Elem> {
        assert_eq!(self.cols, v.len());
        (0..self.rows)
            .map(|i| {
                self.row(i)
                    .iter()
                    .zip(v)
                    .fold(Elem::ZERO, |acc, (&a, &b)| gf.add(acc, gf.mul(a, b)))
            })
            .collect()
    }

    /// Reduced row echelon form in place; returns pivot columns.
    pub fn rref(&mut self, gf: &Gf) -> Vec<usize> {
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..self.cols {
            if r == self.rows {
                break;
            }
            let Some(pr) = (r..self.rows).find(|&i| !self.get(i, c).is_zero()) else {
                continue;
            };
            if pr != r {
                for j in 0..self.cols {
                    self.data.swap(pr * self.cols + j, r * self.cols + j);
                }
            }
            let inv = gf.inv(self.get(r, c)).expect("pivot is nonzero");
            for j in c..self.cols {
                let v = gf.mul(self.get(r, j), inv);
                self.set(r, j, v);
            }
            for i in 0..self.rows {
                if i == r {
                    continue;
                }
                let f = self.get(i, c);
                if f.is_zero() {
                    continue;
                }
                for j in c..self.cols {
                    let v = gf.sub(self.get(i, j), gf.mul(f, self.get(r, j)));
                    self.set(i, j, v);
                }
            }
            pivots.push(c);
            r += 1;
        }
        pivots
    }

    pub fn rank(&self, gf: &Gf) -> usize {
        self.clone().rref(gf).len()
    }

    /// Basis of the right null space `{v : M v = 0}`.
    pub fn kernel(&self, gf: &Gf) -> Vec<Vec<Elem>> {
        let mut m = self.clone();
        let pivots = m.rref(gf);
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivots.contains(c)).collect();
        free.iter()
            .map(|&f| {
                let mut v = vec![Elem::ZERO; self.cols];
                v[f] = Elem::ONE;
                for (r, &pc) in pivots.iter().enumerate() {
                    v[pc] = gf.neg(m.get(r, f));
                }
                v
            })
            .collect()
    }

    pub fn inverse(&self, gf: &Gf) -> Option<Matrix> {
        assert_eq!(self.rows, self.cols);
        let n = self.rows;
        let mut aug = Matrix::zeros(n, 2 * n);
        for i in 0..n {
            for j in 0..n {
                aug.set(i, j, self.get(i, j));
            }
            aug.set(i, n + i, Elem::ONE);
        }
        let pivots = aug.rref(gf);
        if pivots.len() < n || pivots[n - 1] != n - 1 {
            return None;
        }
        let mut inv = Matrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                inv.set(i, j, aug.get(i, n + j));
            }
        }
        Some(inv)
    }

    /// Some solution of `M v = b`, if the system is consistent.
    pub fn solve(&self, gf: &Gf, b: &[Elem]) -> Option<Vec<Elem>> {
        assert_eq!(b.len(), self.rows);
        let mut aug = Matrix::zeros(self.rows, self.cols + 1);
        for (i, &bi) in b.iter().enumerate() {
            for j in 0..self.cols {
                aug.set(i, j, self.get(i, j));
            }
            aug.set(i, self.cols, bi);
        }
        let pivots = aug.rref(gf);
        if pivots.last() == Some(&self.cols) {
            return None;
        }
        let mut v = vec![Elem::ZERO; self.cols];
        for (r, &pc) in pivots.iter().enumerate() {
            v[pc] = aug.get(r, self.cols);
        }
        Some(v)
    }
}

/// Incrementally built echelon basis of a subspace, remembering how each
/// stored row was formed from the inserted vectors.
#[derive(Clone, Debug, Default)]
pub struct Echelon {
    rows: Vec<Vec<Elem>>,
    pivots: Vec<usize>,
    combos: Vec<Vec<Elem>>,
    inserted: usize,
}

impl Echelon {
    pub fn new() -> Echelon {
        Echelon::default()
    }

    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    /// Reduces `v` against the stored rows; returns the residual and the combination
    /// of previously inserted vectors that was subtracted.
    pub fn reduce(&self, gf: &Gf, v: &[Elem]) -> (Vec<Elem>, Vec<Elem>) {
        let mut r = v.to_vec();
        let mut combo = vec![Elem::ZERO; self.inserted];
        for ((row, &pc), rc) in self.rows.iter().zip(&self.pivots).zip(&self.combos) {
            let f = r[pc];
            if f.is_zero() {
                continue;
            }
            for (x, &y) in r.iter_mut().zip(row) {
                *x = gf.sub(*x, gf.mul(f, y));
            }
            for (x, &y) in combo.iter_mut().zip(rc) {
                *x = gf.add(*x, gf.mul(f, y));
            }
        }
        (r, combo)
    }

    pub fn contains(&self, gf: &Gf, v: &[Elem]) -> bool {
        self.reduce(gf, v).0.iter().all(|c| c.is_zero())
    }

    /// Inserts `v`. On dependence returns `Err(c)` with `v = Σ c_i v_i` over earlier inserts.
    pub fn insert(&mut self, gf: &Gf, v: &[Elem]) -> Result<(), Vec<Elem>> {
        let (mut r, combo) = self.reduce(gf, v);
        let Some(pc) = r.iter().position(|c| !c.is_zero()) else {
            return Err(combo);
        };
        let inv = gf.inv(r[pc]).expect("nonzero pivot");
        for x in r.iter_mut() {
            *x = gf.mul(*x, inv);
        }
        let mut own: Vec<Elem> = combo.iter().map(|&c| gf.neg(gf.mul(c, inv))).collect();
        own.push(inv);
        for c in self.combos.iter_mut() {
            c.push(Elem::ZERO);
        }
        for (row, rc) in self.rows.iter_mut().zip(self.combos.iter_mut()) {
            let f = row[pc];
            if f.is_zero() {
                continue;
            }
            for (x, &y) in row.iter_mut().zip(&r) {
                *x = gf.sub(*x, gf.mul(f, y));
            }
            for (x, &y) in rc.iter_mut().zip(&own) {
                *x = gf.sub(*x, gf.mul(f, y));
            }
        }
        self.rows.push(r);
        self.pivots.push(pc);
        self.combos.push(own);
        self.inserted += 1;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn inverse_and_kernel() {
        let gf = Gf::new(3, 2).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..50 {
            let n = 4;
            let rows: Vec<Vec<Elem>> =
                (0..n).map(|_| (0..n).map(|_| gf.random(&mut rng)).collect()).collect();
            let m = Matrix::from_rows(&rows);
            match m.inverse(&gf) {
                Some(inv) => assert_eq!(m.mul(&gf, &inv), Matrix::identity(n)),
                None => {
                    let k = m.kernel(&gf);
                    assert!(!k.is_empty());
                    for v in k {
                        assert!(m.mul_vec(&gf, &v).iter().all(|c| c.is_zero()));
                    }
                }
            }
        }
    }

    #[test]
    fn echelon_dependency_coefficients() {
        let gf = Gf::new(5, 1).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let mut ech = Echelon::new();
        let mut inserted: Vec<Vec<Elem>> = Vec::new();
        for _ in 0..3 {
            let v: Vec<Elem> = (0..5).map(|_| gf.random(&mut rng)).collect();
            if ech.insert(&gf, &v).is_ok() {
                inserted.push(v);
            }
        }
        let a = gf.from_int(2);
        let b = gf.from_int(3);
        let target: Vec<Elem> = (0..5)
            .map(|j| gf.add(gf.mul(a, inserted[0][j]), gf.mul(b, inserted[1][j])))
            .collect();
        let combo = ech.insert(&gf, &target).unwrap_err();
        let rebuilt: Vec<Elem> = (0..5)
            .map(|j| {
                combo
                    .iter()
                    .zip(&inserted)
                    .fold(Elem::ZERO, |acc, (&c, v)| gf.add(acc, gf.mul(c, v[j])))
            })
            .collect();
        assert_eq!(rebuilt, target);
    }
}
