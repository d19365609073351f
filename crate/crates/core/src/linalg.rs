//! Dense linear algebra over `F_p`.

use std::collections::BTreeMap;

use crate::fock::{Monomial, SparseVector};
use crate::scalars::{Fp, Prime};

/// A dense matrix with entries stored as residues.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    entries: Vec<u32>,
    prime: Prime,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize, prime: Prime) -> Self {
        Matrix {
            rows,
            cols,
            entries: vec![0; rows * cols],
            prime,
        }
    }

    pub fn from_rows(rows: &[Vec<Fp>], cols: usize, prime: Prime) -> Self {
        let mut m = Matrix::zeros(rows.len(), cols, prime);
        for (i, row) in rows.iter().enumerate() {
            assert_eq!(row.len(), cols, "ragged row");
            for (j, x) in row.iter().enumerate() {
                m.set(i, j, *x);
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> Fp {
        Fp::new(self.entries[i * self.cols + j] as i64, self.prime)
    }

    pub fn set(&mut self, i: usize, j: usize, x: Fp) {
        self.entries[i * self.cols + j] = x.residue();
    }

    /// Reduced row echelon form in place; returns the pivot columns.
    pub fn row_reduce(&mut self) -> Vec<usize> {
        let p = self.prime.get() as u64;
        let cols = self.cols;
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..cols {
            if r == self.rows {
                break;
            }
            let Some(k) = (r..self.rows).find(|&k| self.entries[k * cols + c] != 0) else {
                continue;
            };
            if k != r {
                for j in 0..cols {
                    self.entries.swap(k * cols + j, r * cols + j);
                }
            }
            let inv = self.get(r, c).inv().expect("nonzero pivot").residue() as u64;
            for j in c..cols {
                let x = &mut self.entries[r * cols + j];
                *x = (*x as u64 * inv % p) as u32;
            }
            let (head, tail) = self.entries.split_at_mut(r * cols);
            let (pivot_row, rest) = tail.split_at_mut(cols);
            for row in head.chunks_mut(cols).chain(rest.chunks_mut(cols)) {
                let f = row[c] as u64;
                if f == 0 {
                    continue;
                }
                for j in c..cols {
                    row[j] = ((row[j] as u64 + (p - f) * pivot_row[j] as u64) % p) as u32;
                }
            }
            pivots.push(c);
            r += 1;
        }
        pivots
    }

    pub fn rank(&self) -> usize {
        self.clone().row_reduce().len()
    }

    /// A basis of `{v : M v = 0}`.
    pub fn kernel(&self) -> Vec<Vec<Fp>> {
        let mut m = self.clone();
        let pivots = m.row_reduce();
        let zero = Fp::new(0, self.prime);
        let mut out = Vec::new();
        for free in (0..self.cols).filter(|c| !pivots.contains(c)) {
            let mut v = vec![zero; self.cols];
            v[free] = Fp::new(1, self.prime);
            for (r, &pc) in pivots.iter().enumerate() {
                v[pc] = -m.get(r, free);
            }
            out.push(v);
        }
        out
    }

    pub fn mul_vec(&self, v: &[Fp]) -> Vec<Fp> {
        (0..self.rows)
            .map(|i| {
                (0..self.cols).fold(Fp::new(0, self.prime), |acc, j| acc + self.get(i, j) * v[j])
            })
            .collect()
    }
}

/// Kernel of the linear map sending basis vector `j` to the tuple
/// `images[j]`; each kernel element is given by its coordinates.
pub fn kernel_of_images(images: &[Vec<SparseVector<Fp>>], prime: Prime) -> Vec<Vec<Fp>> {
    let mut rows: BTreeMap<(usize, &Monomial), usize> = BTreeMap::new();
    for tuple in images {
        for (k, v) in tuple.iter().enumerate() {
            for (m, _) in v.iter() {
                let next = rows.len();
                rows.entry((k, m)).or_insert(next);
            }
        }
    }
    let mut m = Matrix::zeros(rows.len(), images.len(), prime);
    for (j, tuple) in images.iter().enumerate() {
        for (k, v) in tuple.iter().enumerate() {
            for (mono, c) in v.iter() {
                m.set(rows[&(k, mono)], j, *c);
            }
        }
    }
    m.kernel()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn p(n: u32) -> Prime {
        Prime::new(n).unwrap()
    }

    #[test]
    fn small_kernel() {
        let q = p(5);
        let f = |x| Fp::new(x, q);
        let m = Matrix::from_rows(&[vec![f(1), f(2), f(3)], vec![f(2), f(4), f(6)]], 3, q);
        assert_eq!(m.rank(), 1);
        let k = m.kernel();
        assert_eq!(k.len(), 2);
        for v in &k {
            assert!(m.mul_vec(v).iter().all(|x| x.residue() == 0));
        }
    }

    #[test]
    fn characteristic_matters() {
        // [[1,1],[1,-1]] is singular only in characteristic 2.
        for (n, rank) in [(2, 1), (3, 2)] {
            let q = p(n);
            let m = Matrix::from_rows(
                &[
                    vec![Fp::new(1, q), Fp::new(1, q)],
                    vec![Fp::new(1, q), Fp::new(-1, q)],
                ],
                2,
                q,
            );
            assert_eq!(m.rank(), rank);
        }
    }

    proptest! {
        #[test]
        fn rank_nullity(rows in 1usize..6, cols in 1usize..6, seed in proptest::collection::vec(0i64..7, 36)) {
            let q = p(7);
            let data: Vec<Vec<Fp>> = (0..rows).map(|i| (0..cols).map(|j| Fp::new(seed[i * 6 + j], q)).collect()).collect();
            let m = Matrix::from_rows(&data, cols, q);
            let k = m.kernel();
            prop_assert_eq!(m.rank() + k.len(), cols);
            for v in &k {
                prop_assert!(m.mul_vec(v).iter().all(|x| x.residue() == 0));
            }
        }
    }
}
