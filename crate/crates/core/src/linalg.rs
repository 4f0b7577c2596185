//! Dense exact linear algebra over the base field: incremental row echelon
//! for rank tracking, plus rref-based nullspace and solving. Pivoting is
//! deterministic (first nonzero entry), never numerical.

use crate::field::{BaseField, Coeff};

/// Incrementally built echelon basis of a subspace of `k^n`.
pub struct Echelon {
    field: BaseField,
    ncols: usize,
    /// `(pivot column, row)`; each row has 1 at its pivot and zeros at the
    /// pivots of all rows inserted before it.
    rows: Vec<(usize, Vec<Coeff>)>,
}

impl Echelon {
    pub fn new(field: BaseField, ncols: usize) -> Self {
        Echelon { field, ncols, rows: Vec::new() }
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    /// Residue of `v` after eliminating all current pivots.
    pub fn reduce(&self, mut v: Vec<Coeff>) -> Vec<Coeff> {
        assert_eq!(v.len(), self.ncols);
        for (p, row) in &self.rows {
            if v[*p].is_zero() {
                continue;
            }
            let c = v[*p].clone();
            for (j, r) in row.iter().enumerate() {
                if !r.is_zero() {
                    let delta = self.field.mul(&c, r);
                    v[j] = self.field.sub(&v[j], &delta);
                }
            }
        }
        v
    }

    /// Insert `v` if independent of the current span; returns whether the
    /// rank grew.
    pub fn insert(&mut self, v: Vec<Coeff>) -> bool {
        let v = self.reduce(v);
        match v.iter().position(|c| !c.is_zero()) {
            None => false,
            Some(p) => {
                let inv = self.field.inv(&v[p]);
                let row: Vec<Coeff> = v.iter().map(|c| self.field.mul(c, &inv)).collect();
                self.rows.push((p, row));
                true
            }
        }
    }

    pub fn contains(&self, v: Vec<Coeff>) -> bool {
        self.reduce(v).iter().all(|c| c.is_zero())
    }
}

/// Row-major dense matrix over the base field.
#[derive(Clone)]
pub struct KMat {
    pub field: BaseField,
    pub nrows: usize,
    pub ncols: usize,
    data: Vec<Coeff>,
}

impl KMat {
    pub fn zero(field: BaseField, nrows: usize, ncols: usize) -> Self {
        let data = vec![field.zero(); nrows * ncols];
        KMat { field, nrows, ncols, data }
    }

    pub fn from_rows(field: BaseField, rows: Vec<Vec<Coeff>>) -> Self {
        let nrows = rows.len();
        let ncols = rows.first().map(|r| r.len()).unwrap_or(0);
        let mut data = Vec::with_capacity(nrows * ncols);
        for r in rows {
            assert_eq!(r.len(), ncols, "ragged rows");
            data.extend(r);
        }
        KMat { field, nrows, ncols, data }
    }

    pub fn at(&self, i: usize, j: usize) -> &Coeff {
        &self.data[i * self.ncols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, c: Coeff) {
        self.data[i * self.ncols + j] = c;
    }

    pub fn row(&self, i: usize) -> &[Coeff] {
        &self.data[i * self.ncols..(i + 1) * self.ncols]
    }

    /// Reduced row echelon form in place; returns the pivot columns.
    pub fn rref(&mut self) -> Vec<usize> {
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..self.ncols {
            if r >= self.nrows {
                break;
            }
            let Some(pr) = (r..self.nrows).find(|&i| !self.at(i, c).is_zero()) else {
                continue;
            };
            self.swap_rows(r, pr);
            let inv = self.field.inv(self.at(r, c));
            for j in c..self.ncols {
                let v = self.field.mul(self.at(r, j), &inv);
                self.set(r, j, v);
            }
            for i in 0..self.nrows {
                if i != r && !self.at(i, c).is_zero() {
                    let f = self.at(i, c).clone();
                    for j in c..self.ncols {
                        let v = self.field.sub(self.at(i, j), &self.field.mul(&f, self.at(r, j)));
                        self.set(i, j, v);
                    }
                }
            }
            pivots.push(c);
            r += 1;
        }
        pivots
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.ncols {
            self.data.swap(a * self.ncols + j, b * self.ncols + j);
        }
    }

    pub fn rank(&self) -> usize {
        let mut m = self.clone();
        m.rref().len()
    }

    pub fn nullity(&self) -> usize {
        self.ncols - self.rank()
    }

    /// Basis of `{x : A x = 0}`, one vector per free column, deterministic.
    pub fn nullspace(&self) -> Vec<Vec<Coeff>> {
        let mut m = self.clone();
        let pivots = m.rref();
        let is_pivot: Vec<bool> = {
            let mut v = vec![false; self.ncols];
            for &p in &pivots {
                v[p] = true;
            }
            v
        };
        let mut basis = Vec::new();
        for free in 0..self.ncols {
            if is_pivot[free] {
                continue;
            }
            let mut x = vec![self.field.zero(); self.ncols];
            x[free] = self.field.one();
            for (row_idx, &p) in pivots.iter().enumerate() {
                // Row says x[p] + sum_{j>p} m[row,j] x[j] = 0.
                x[p] = self.field.neg(m.at(row_idx, free));
            }
            basis.push(x);
        }
        basis
    }

    /// One solution of `A x = b`, if any.
    pub fn solve(&self, b: &[Coeff]) -> Option<Vec<Coeff>> {
        assert_eq!(b.len(), self.nrows);
        let mut aug = KMat::zero(self.field.clone(), self.nrows, self.ncols + 1);
        for i in 0..self.nrows {
            for j in 0..self.ncols {
                aug.set(i, j, self.at(i, j).clone());
            }
            aug.set(i, self.ncols, b[i].clone());
        }
        let pivots = aug.rref();
        if pivots.contains(&self.ncols) {
            return None; // inconsistent
        }
        let mut x = vec![self.field.zero(); self.ncols];
        for (row_idx, &p) in pivots.iter().enumerate() {
            x[p] = aug.at(row_idx, self.ncols).clone();
        }
        Some(x)
    }

    pub fn mat_vec(&self, x: &[Coeff]) -> Vec<Coeff> {
        assert_eq!(x.len(), self.ncols);
        (0..self.nrows)
            .map(|i| {
                let mut acc = self.field.zero();
                for j in 0..self.ncols {
                    if !self.at(i, j).is_zero() && !x[j].is_zero() {
                        acc = self.field.add(&acc, &self.field.mul(self.at(i, j), &x[j]));
                    }
                }
                acc
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f5() -> BaseField {
        BaseField::prime(5).unwrap()
    }

    fn mat(field: &BaseField, rows: &[&[i64]]) -> KMat {
        KMat::from_rows(
            field.clone(),
            rows.iter()
                .map(|r| r.iter().map(|&v| field.from_i64(v)).collect())
                .collect(),
        )
    }

    #[test]
    fn rank_and_nullspace() {
        let f = f5();
        let a = mat(&f, &[&[1, 2, 3], &[2, 4, 6], &[0, 1, 1]]);
        assert_eq!(a.rank(), 2);
        let ns = a.nullspace();
        assert_eq!(ns.len(), 1);
        for x in &ns {
            assert!(a.mat_vec(x).iter().all(|c| c.is_zero()));
        }
    }

    #[test]
    fn solve_consistent_and_inconsistent() {
        let f = BaseField::Rationals;
        let a = mat(&f, &[&[1, 1], &[0, 1]]);
        let b = vec![f.from_i64(3), f.from_i64(1)];
        let x = a.solve(&b).unwrap();
        assert_eq!(a.mat_vec(&x), b);
        let sing = mat(&f, &[&[1, 1], &[1, 1]]);
        assert!(sing.solve(&[f.from_i64(0), f.from_i64(1)]).is_none());
    }

    #[test]
    fn echelon_tracks_rank_incrementally() {
        let f = f5();
        let mut e = Echelon::new(f.clone(), 3);
        assert!(e.insert(vec![f.from_i64(1), f.from_i64(2), f.from_i64(0)]));
        assert!(e.insert(vec![f.from_i64(0), f.from_i64(1), f.from_i64(1)]));
        // Dependent on the first two.
        assert!(!e.insert(vec![f.from_i64(1), f.from_i64(3), f.from_i64(1)]));
        assert_eq!(e.rank(), 2);
        assert!(e.contains(vec![f.from_i64(2), f.from_i64(4), f.from_i64(0)]));
        assert!(!e.contains(vec![f.from_i64(0), f.from_i64(0), f.from_i64(1)]));
    }

    #[test]
    fn nullspace_vectors_satisfy_back_substitution() {
        let f = BaseField::Rationals;
        let a = mat(&f, &[&[1, 2, 0, 1], &[0, 0, 1, 1]]);
        let ns = a.nullspace();
        assert_eq!(ns.len(), 2);
        for x in &ns {
            assert!(a.mat_vec(x).iter().all(|c| c.is_zero()));
        }
    }
}
