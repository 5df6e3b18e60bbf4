//! Dense exact-rational matrices and the rank-revealing pieces the pipeline
//! needs: symmetric LDL^T with diagonal pivoting (doubling as a PSD
//! certificate), kernels, and solves modulo a Gram kernel.

use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::rational::{format_q, Q};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Q>,
}

impl QMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        QMatrix { rows, cols, data: vec![Q::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = Q::one();
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<Q>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|row| row.len() == c), "ragged rows");
        QMatrix { rows: r, cols: c, data: rows.into_iter().flatten().collect() }
    }

    pub fn diagonal(values: &[Q]) -> Self {
        let mut m = Self::zeros(values.len(), values.len());
        for (i, v) in values.iter().enumerate() {
            m.set(i, i, v.clone());
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> &Q {
        &self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: Q) {
        self.data[r * self.cols + c] = v;
    }

    pub fn row(&self, r: usize) -> &[Q] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn column(&self, c: usize) -> Vec<Q> {
        (0..self.rows).map(|r| self.get(r, c).clone()).collect()
    }

    pub fn set_column(&mut self, c: usize, v: &[Q]) {
        for (r, x) in v.iter().enumerate() {
            self.set(r, c, x.clone());
        }
    }

    pub fn to_rows(&self) -> Vec<Vec<Q>> {
        (0..self.rows).map(|r| self.row(r).to_vec()).collect()
    }

    pub fn to_string_rows(&self) -> Vec<Vec<String>> {
        (0..self.rows)
            .map(|r| self.row(r).iter().map(format_q).collect())
            .collect()
    }

    pub fn transpose(&self) -> QMatrix {
        let mut t = QMatrix::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                t.set(c, r, self.get(r, c).clone());
            }
        }
        t
    }

    pub fn mul(&self, other: &QMatrix) -> QMatrix {
        assert_eq!(self.cols, other.rows, "matrix product shape mismatch");
        let mut out = QMatrix::zeros(self.rows, other.cols);
        for r in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(r, k);
                if a.is_zero() {
                    continue;
                }
                for c in 0..other.cols {
                    let b = other.get(k, c);
                    if !b.is_zero() {
                        let cell = &mut out.data[r * other.cols + c];
                        *cell += a * b;
                    }
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[Q]) -> Vec<Q> {
        assert_eq!(self.cols, v.len(), "matrix-vector shape mismatch");
        (0..self.rows)
            .map(|r| {
                self.row(r)
                    .iter()
                    .zip(v)
                    .filter(|(a, b)| !a.is_zero() && !b.is_zero())
                    .fold(Q::zero(), |acc, (a, b)| acc + a * b)
            })
            .collect()
    }

    pub fn add(&self, other: &QMatrix) -> QMatrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        QMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect(),
        }
    }

    pub fn sub(&self, other: &QMatrix) -> QMatrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        QMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect(),
        }
    }

    pub fn scale(&self, s: &Q) -> QMatrix {
        QMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|a| a * s).collect(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Zero::is_zero)
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn is_symmetric(&self) -> bool {
        self.is_square()
            && (0..self.rows).all(|r| (r + 1..self.cols).all(|c| self.get(r, c) == self.get(c, r)))
    }

    pub fn is_diagonal(&self) -> bool {
        (0..self.rows).all(|r| (0..self.cols).all(|c| r == c || self.get(r, c).is_zero()))
    }

    pub fn diag(&self) -> Vec<Q> {
        (0..self.rows.min(self.cols)).map(|i| self.get(i, i).clone()).collect()
    }

    /// Sub-matrix on the given row and column index sets.
    pub fn select(&self, rows: &[usize], cols: &[usize]) -> QMatrix {
        let mut m = QMatrix::zeros(rows.len(), cols.len());
        for (i, &r) in rows.iter().enumerate() {
            for (j, &c) in cols.iter().enumerate() {
                m.set(i, j, self.get(r, c).clone());
            }
        }
        m
    }

    /// Exact inverse of a nonsingular square matrix.
    pub fn inverse(&self) -> Option<QMatrix> {
        let n = self.rows;
        assert!(self.is_square());
        self.solve(&QMatrix::identity(n))
    }

    /// Solves `self * X = rhs` for nonsingular square `self`.
    pub fn solve(&self, rhs: &QMatrix) -> Option<QMatrix> {
        let n = self.rows;
        assert!(self.is_square() && rhs.rows == n);
        let mut a = self.clone();
        let mut b = rhs.clone();
        for col in 0..n {
            let pivot = (col..n).find(|&r| !a.get(r, col).is_zero())?;
            if pivot != col {
                a.swap_rows(pivot, col);
                b.swap_rows(pivot, col);
            }
            let inv = a.get(col, col).recip();
            for r in 0..n {
                if r == col {
                    continue;
                }
                let f = a.get(r, col) * &inv;
                if f.is_zero() {
                    continue;
                }
                for c in col..n {
                    let v = a.get(col, c) * &f;
                    a.data[r * n + c] -= v;
                }
                for c in 0..b.cols {
                    let v = b.get(col, c) * &f;
                    b.data[r * b.cols + c] -= v;
                }
            }
        }
        for r in 0..n {
            let inv = a.get(r, r).recip();
            for c in 0..b.cols {
                let v = b.get(r, c) * &inv;
                b.set(r, c, v);
            }
        }
        Some(b)
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        for c in 0..self.cols {
            self.data.swap(a * self.cols + c, b * self.cols + c);
        }
    }
}

/// Symmetric LDL^T factorization with diagonal pivoting:
/// `A = sum_k d_k l_k l_k^T` with `d_k > 0` for a PSD input.
///
/// The pivots are the positions chosen, in order; they index a nonsingular
/// principal block `A[S,S]` of size `rank`. The remaining indices form the
/// null mask used throughout the pipeline.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Ldl {
    pub pivots: Vec<usize>,
    pub d: Vec<Q>,
    /// `n x rank`; column `k` has a one at `pivots[k]`.
    pub l: QMatrix,
}

impl Ldl {
    pub fn rank(&self) -> usize {
        self.pivots.len()
    }

    pub fn dim(&self) -> usize {
        self.l.rows()
    }

    /// Indices outside the pivot set.
    pub fn null_indices(&self) -> Vec<usize> {
        (0..self.dim()).filter(|i| !self.pivots.contains(i)).collect()
    }

    pub fn null_mask(&self) -> Vec<bool> {
        (0..self.dim()).map(|i| !self.pivots.contains(&i)).collect()
    }

    /// `sum_k d_k l_k l_k^T`, for certificate checks.
    pub fn reconstruct(&self) -> QMatrix {
        let dl = {
            let mut m = self.l.clone();
            for k in 0..self.rank() {
                for r in 0..m.rows() {
                    let v = m.get(r, k) * &self.d[k];
                    m.set(r, k, v);
                }
            }
            m
        };
        dl.mul(&self.l.transpose())
    }
}

/// Rank-revealing LDL^T of a symmetric matrix, failing with a certificate
/// message if the matrix is not positive semidefinite.
pub fn ldl_psd(a: &QMatrix) -> Result<Ldl> {
    assert!(a.is_square(), "ldl of a non-square matrix");
    let n = a.rows();
    if !a.is_symmetric() {
        return Err(Error::NotAState("Gram matrix is not symmetric".into()));
    }
    let mut work = a.clone();
    let mut remaining: Vec<usize> = (0..n).collect();
    let mut pivots = Vec::new();
    let mut ds = Vec::new();
    let mut cols: Vec<Vec<Q>> = Vec::new();
    loop {
        if let Some(&neg) = remaining.iter().find(|&&i| work.get(i, i).is_negative()) {
            return Err(Error::NotAState(format!(
                "negative pivot {} at index {neg}",
                format_q(work.get(neg, neg))
            )));
        }
        let Some(pos) = remaining.iter().position(|&i| work.get(i, i).is_positive()) else {
            for &i in &remaining {
                for &k in &remaining {
                    if !work.get(i, k).is_zero() {
                        return Err(Error::NotAState(format!(
                            "zero diagonal with nonzero coupling at ({i},{k})"
                        )));
                    }
                }
            }
            break;
        };
        let p = remaining.remove(pos);
        let dp = work.get(p, p).clone();
        let mut col = vec![Q::zero(); n];
        col[p] = Q::one();
        for &i in &remaining {
            col[i] = work.get(i, p) / &dp;
        }
        for &i in &remaining {
            if col[i].is_zero() {
                continue;
            }
            for &k in &remaining {
                let v = &col[i] * work.get(p, k);
                if !v.is_zero() {
                    work.data[i * n + k] -= v;
                }
            }
        }
        pivots.push(p);
        ds.push(dp);
        cols.push(col);
    }
    let mut l = QMatrix::zeros(n, pivots.len());
    for (k, col) in cols.iter().enumerate() {
        l.set_column(k, col);
    }
    Ok(Ldl { pivots, d: ds, l })
}

/// Solves `A X = rhs` for symmetric PSD `A` modulo `ker A`.
///
/// The returned `X` is supported on the pivot rows of `ldl`; rows on null
/// indices are zero. Fails with [`Error::Representation`] when `rhs` is not in
/// the column space of `A`.
pub fn solve_modulo_kernel(a: &QMatrix, ldl: &Ldl, rhs: &QMatrix) -> Result<QMatrix> {
    let n = a.rows();
    let s = &ldl.pivots;
    let mut x = QMatrix::zeros(n, rhs.cols());
    if !s.is_empty() {
        let a_ss = a.select(s, s);
        let all: Vec<usize> = (0..rhs.cols()).collect();
        let rhs_s = rhs.select(s, &all);
        let x_s = a_ss
            .solve(&rhs_s)
            .ok_or_else(|| Error::InternalConsistency("pivot block is singular".into()))?;
        for (i, &r) in s.iter().enumerate() {
            for c in 0..rhs.cols() {
                x.set(r, c, x_s.get(i, c).clone());
            }
        }
    }
    if &a.mul(&x) != rhs {
        return Err(Error::Representation(
            "right-hand side has a component outside the range of the Gram matrix".into(),
        ));
    }
    Ok(x)
}

/// A basis of `ker A` for symmetric PSD `A`, one vector per null index.
pub fn kernel_basis(a: &QMatrix, ldl: &Ldl) -> Vec<Vec<Q>> {
    let s = &ldl.pivots;
    let n = a.rows();
    let a_ss = a.select(s, s);
    ldl.null_indices()
        .into_iter()
        .map(|k| {
            let mut v = vec![Q::zero(); n];
            v[k] = Q::one();
            if !s.is_empty() {
                let b = a.select(s, &[k]);
                let y = a_ss.solve(&b).expect("pivot block is nonsingular");
                for (i, &r) in s.iter().enumerate() {
                    v[r] = -y.get(i, 0).clone();
                }
            }
            v
        })
        .collect()
}

pub fn dot(a: &[Q], b: &[Q]) -> Q {
    a.iter()
        .zip(b)
        .filter(|(x, y)| !x.is_zero() && !y.is_zero())
        .fold(Q::zero(), |acc, (x, y)| acc + x * y)
}
