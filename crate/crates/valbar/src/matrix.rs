//! Dense matrices over a truncated DVR.
//!
//! Entries are stored row-major as canonical residues. The elementary
//! row/column operations used by the normal-form routines are provided as
//! named primitives so transform bookkeeping stays readable. Shape mismatches
//! in arithmetic are programming errors and panic; only genuinely data-driven
//! failures (inverting a singular matrix) surface as [`Error`].

use std::fmt;

use num_bigint::BigUint;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::ring::{DvrElement, Ring, Valuation};

#[derive(Clone, PartialEq, Eq)]
pub struct DvrMatrix {
    ring: Ring,
    rows: usize,
    cols: usize,
    data: Vec<BigUint>,
}

impl DvrMatrix {
    pub fn zeros(ring: &Ring, rows: usize, cols: usize) -> DvrMatrix {
        DvrMatrix {
            ring: ring.clone(),
            rows,
            cols,
            data: vec![BigUint::zero(); rows * cols],
        }
    }

    pub fn identity(ring: &Ring, n: usize) -> DvrMatrix {
        let mut m = Self::zeros(ring, n, n);
        for i in 0..n {
            m.set_u64(i, i, 1);
        }
        m
    }

    /// Build from signed integer rows; entries are reduced into the ring.
    /// Panics if the rows are ragged.
    pub fn from_i64_rows(ring: &Ring, rows: &[Vec<i64>]) -> DvrMatrix {
        let ncols = rows.first().map_or(0, Vec::len);
        let mut m = Self::zeros(ring, rows.len(), ncols);
        for (i, row) in rows.iter().enumerate() {
            assert_eq!(row.len(), ncols, "ragged rows");
            for (j, &x) in row.iter().enumerate() {
                m.set(i, j, ring.from_i64(x));
            }
        }
        m
    }

    pub fn ring(&self) -> &Ring {
        &self.ring
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    fn idx(&self, i: usize, j: usize) -> usize {
        debug_assert!(i < self.rows && j < self.cols);
        i * self.cols + j
    }

    pub fn get(&self, i: usize, j: usize) -> DvrElement {
        self.ring
            .from_biguint(self.data[self.idx(i, j)].clone())
    }

    pub(crate) fn raw(&self, i: usize, j: usize) -> &BigUint {
        &self.data[self.idx(i, j)]
    }

    pub fn set(&mut self, i: usize, j: usize, x: DvrElement) {
        assert_eq!(x.ring(), &self.ring, "entry from a different ring");
        let k = self.idx(i, j);
        self.data[k] = x.value().clone();
    }

    pub fn set_u64(&mut self, i: usize, j: usize, x: u64) {
        let x = self.ring.from_u64(x);
        self.set(i, j, x);
    }

    pub fn set_i64(&mut self, i: usize, j: usize, x: i64) {
        let x = self.ring.from_i64(x);
        self.set(i, j, x);
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Zero::is_zero)
    }

    pub fn valuation(&self, i: usize, j: usize) -> Valuation {
        self.ring.val_raw(&self.data[self.idx(i, j)])
    }

    /// Minimum entrywise valuation; `Censored` for the zero matrix.
    pub fn min_valuation(&self) -> Valuation {
        self.data
            .iter()
            .map(|x| self.ring.val_raw(x))
            .min()
            .unwrap_or(Valuation::Censored(self.ring.precision()))
    }

    // ---- elementary operations ---------------------------------------------

    /// `row_i += c * row_t` (requires `i != t`).
    pub fn row_addmul(&mut self, i: usize, t: usize, c: &DvrElement) {
        assert_ne!(i, t, "row_addmul with identical rows is not elementary");
        for j in 0..self.cols {
            let term = self.ring.mul_raw(c.value(), &self.data[self.idx(t, j)]);
            let k = self.idx(i, j);
            self.data[k] = self.ring.add_raw(&self.data[k], &term);
        }
    }

    /// `col_j += c * col_t` (requires `j != t`).
    pub fn col_addmul(&mut self, j: usize, t: usize, c: &DvrElement) {
        assert_ne!(j, t, "col_addmul with identical columns is not elementary");
        for i in 0..self.rows {
            let term = self.ring.mul_raw(c.value(), &self.data[self.idx(i, t)]);
            let k = self.idx(i, j);
            self.data[k] = self.ring.add_raw(&self.data[k], &term);
        }
    }

    pub fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            let (x, y) = (self.idx(a, j), self.idx(b, j));
            self.data.swap(x, y);
        }
    }

    pub fn swap_cols(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for i in 0..self.rows {
            let (x, y) = (self.idx(i, a), self.idx(i, b));
            self.data.swap(x, y);
        }
    }

    // ---- whole-matrix operations ---------------------------------------------

    pub fn scale(&self, c: &DvrElement) -> DvrMatrix {
        assert_eq!(c.ring(), &self.ring, "scalar from a different ring");
        let data = self
            .data
            .iter()
            .map(|x| self.ring.mul_raw(c.value(), x))
            .collect();
        DvrMatrix {
            ring: self.ring.clone(),
            rows: self.rows,
            cols: self.cols,
            data,
        }
    }

    pub fn transpose(&self) -> DvrMatrix {
        let mut out = Self::zeros(&self.ring, self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.data[j * self.rows + i] = self.data[self.idx(i, j)].clone();
            }
        }
        out
    }

    /// Entrywise reduction into the precision-`k` slice of the ring.
    pub fn reduce_mod(&self, k: u32) -> Result<DvrMatrix> {
        let slice = self.ring.slice(k)?;
        let modulus = slice.modulus().clone();
        let data = self.data.iter().map(|x| x % &modulus).collect();
        Ok(DvrMatrix {
            ring: slice,
            rows: self.rows,
            cols: self.cols,
            data,
        })
    }

    /// `self | other` side by side.
    pub fn hstack(&self, other: &DvrMatrix) -> DvrMatrix {
        assert_eq!(self.ring, other.ring, "hstack across rings");
        assert_eq!(self.rows, other.rows, "hstack with different row counts");
        let mut out = Self::zeros(&self.ring, self.rows, self.cols + other.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.data[i * out.cols + j] = self.data[self.idx(i, j)].clone();
            }
            for j in 0..other.cols {
                out.data[i * out.cols + self.cols + j] = other.data[other.idx(i, j)].clone();
            }
        }
        out
    }

    /// Entrywise `self[i0.., j0..] += block`.
    pub fn add_block(&mut self, i0: usize, j0: usize, block: &DvrMatrix) {
        assert_eq!(self.ring, block.ring, "block from a different ring");
        assert!(i0 + block.rows <= self.rows && j0 + block.cols <= self.cols);
        for i in 0..block.rows {
            for j in 0..block.cols {
                let k = self.idx(i0 + i, j0 + j);
                self.data[k] = self.ring.add_raw(&self.data[k], &block.data[block.idx(i, j)]);
            }
        }
    }

    pub fn col(&self, j: usize) -> DvrMatrix {
        self.select(&(0..self.rows).collect::<Vec<_>>(), &[j])
    }

    /// Submatrix on the given row and column index sets (in the given order).
    pub fn select(&self, rows: &[usize], cols: &[usize]) -> DvrMatrix {
        let mut out = Self::zeros(&self.ring, rows.len(), cols.len());
        for (a, &i) in rows.iter().enumerate() {
            for (b, &j) in cols.iter().enumerate() {
                out.data[a * cols.len() + b] = self.data[self.idx(i, j)].clone();
            }
        }
        out
    }

    /// Inverse of a square matrix, when it exists. Over a local ring a matrix
    /// is invertible exactly when elimination finds a unit pivot in every
    /// column; otherwise this returns [`Error::NotInvertible`].
    pub fn inverse(&self) -> Result<DvrMatrix> {
        assert_eq!(self.rows, self.cols, "inverse of a non-square matrix");
        let n = self.rows;
        let mut work = self.clone();
        let mut inv = Self::identity(&self.ring, n);
        for t in 0..n {
            let pivot_row = (t..n)
                .find(|&i| work.valuation(i, t) == Valuation::Finite(0))
                .ok_or(Error::NotInvertible)?;
            work.swap_rows(t, pivot_row);
            inv.swap_rows(t, pivot_row);
            let pivot_inv = work.get(t, t).invert().expect("unit pivot");
            // Normalize the pivot row to 1, then clear the whole column.
            for j in 0..n {
                let k = work.idx(t, j);
                work.data[k] = self.ring.mul_raw(pivot_inv.value(), &work.data[k]);
                let k = inv.idx(t, j);
                inv.data[k] = self.ring.mul_raw(pivot_inv.value(), &inv.data[k]);
            }
            for i in 0..n {
                if i == t {
                    continue;
                }
                let c = -work.get(i, t);
                if c.is_zero() {
                    continue;
                }
                work.row_addmul(i, t, &c);
                inv.row_addmul(i, t, &c);
            }
        }
        debug_assert_eq!(work, Self::identity(&self.ring, n));
        Ok(inv)
    }
}

impl fmt::Display for DvrMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{}x{} over {}", self.rows, self.cols, self.ring)?;
        for i in 0..self.rows {
            let row: Vec<String> = (0..self.cols)
                .map(|j| self.data[self.idx(i, j)].to_string())
                .collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        Ok(())
    }
}

impl fmt::Debug for DvrMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl std::ops::Add for &DvrMatrix {
    type Output = DvrMatrix;
    fn add(self, rhs: &DvrMatrix) -> DvrMatrix {
        assert_eq!(self.ring, rhs.ring, "matrix addition across rings");
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols), "shape mismatch");
        let data = self
            .data
            .iter()
            .zip(&rhs.data)
            .map(|(a, b)| self.ring.add_raw(a, b))
            .collect();
        DvrMatrix {
            ring: self.ring.clone(),
            rows: self.rows,
            cols: self.cols,
            data,
        }
    }
}

impl std::ops::Sub for &DvrMatrix {
    type Output = DvrMatrix;
    fn sub(self, rhs: &DvrMatrix) -> DvrMatrix {
        self + &(-rhs)
    }
}

impl std::ops::Neg for &DvrMatrix {
    type Output = DvrMatrix;
    fn neg(self) -> DvrMatrix {
        let data = self.data.iter().map(|x| self.ring.neg_raw(x)).collect();
        DvrMatrix {
            ring: self.ring.clone(),
            rows: self.rows,
            cols: self.cols,
            data,
        }
    }
}

impl std::ops::Mul for &DvrMatrix {
    type Output = DvrMatrix;
    fn mul(self, rhs: &DvrMatrix) -> DvrMatrix {
        assert_eq!(self.ring, rhs.ring, "matrix product across rings");
        assert_eq!(self.cols, rhs.rows, "inner dimensions disagree");
        let mut out = DvrMatrix::zeros(&self.ring, self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self.data[self.idx(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..rhs.cols {
                    let term = self.ring.mul_raw(a, &rhs.data[rhs.idx(k, j)]);
                    let o = i * out.cols + j;
                    out.data[o] = self.ring.add_raw(&out.data[o], &term);
                }
            }
        }
        out
    }
}
