//! Small dense linear algebra kernel: row-major matrices, pivoted LU
//! factorization for solves/determinants, and a cyclic Jacobi eigensolver
//! for symmetric matrices.
//!
//! Everything here targets desk-scale problems (n up to a few thousand);
//! no blocking, no SIMD, no sparsity.

use std::ops::{Index, IndexMut};

use thiserror::Error;

/// Off-diagonal Frobenius tolerance for the Jacobi eigensolver, relative to
/// the Frobenius norm of the input.
pub const JACOBI_OFF_TOLERANCE: f64 = 1e-12;

/// Maximum number of full sweeps before the Jacobi eigensolver gives up.
pub const JACOBI_MAX_SWEEPS: usize = 100;

#[derive(Debug, Error)]
pub enum LinalgError {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("matrix is singular or numerically degenerate")]
    Singular,
    #[error("matrix is not symmetric: |m[{row},{col}] - m[{col},{row}]| = {delta:e}")]
    NotSymmetric { row: usize, col: usize, delta: f64 },
    #[error("Jacobi eigensolver did not converge within {0} sweeps")]
    NoConvergence(usize),
}

/// Dense row-major matrix of `f64`.
#[derive(Clone, Debug, PartialEq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Matrix::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = 1.0;
        }
        m
    }

    /// Build from explicit rows; all rows must have equal length.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self, LinalgError> {
        if rows.is_empty() {
            return Err(LinalgError::DimensionMismatch("no rows given".into()));
        }
        let cols = rows[0].len();
        if cols == 0 {
            return Err(LinalgError::DimensionMismatch("empty rows".into()));
        }
        let mut data = Vec::with_capacity(rows.len() * cols);
        for (i, r) in rows.iter().enumerate() {
            if r.len() != cols {
                return Err(LinalgError::DimensionMismatch(format!(
                    "row {i} has {} entries, expected {cols}",
                    r.len()
                )));
            }
            data.extend_from_slice(r);
        }
        Ok(Matrix {
            rows: rows.len(),
            cols,
            data,
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn transpose(&self) -> Matrix {
        let mut t = Matrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)];
            }
        }
        t
    }

    pub fn matmul(&self, other: &Matrix) -> Result<Matrix, LinalgError> {
        if self.cols != other.rows {
            return Err(LinalgError::DimensionMismatch(format!(
                "{}x{} * {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = Matrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == 0.0 {
                    continue;
                }
                for j in 0..other.cols {
                    out[(i, j)] += a * other[(k, j)];
                }
            }
        }
        Ok(out)
    }

    pub fn matvec(&self, v: &[f64]) -> Result<Vec<f64>, LinalgError> {
        if v.len() != self.cols {
            return Err(LinalgError::DimensionMismatch(format!(
                "matrix has {} columns, vector has {} entries",
                self.cols,
                v.len()
            )));
        }
        let mut out = vec![0.0; self.rows];
        for i in 0..self.rows {
            let row = self.row(i);
            out[i] = row.iter().zip(v).map(|(a, b)| a * b).sum();
        }
        Ok(out)
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|x| x * x).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0_f64, |m, x| m.max(x.abs()))
    }

    /// Largest symmetry violation, if any entry pair differs by more than `tol`.
    pub fn symmetry_violation(&self, tol: f64) -> Option<(usize, usize, f64)> {
        if !self.is_square() {
            return Some((0, 0, f64::INFINITY));
        }
        let mut worst: Option<(usize, usize, f64)> = None;
        for i in 0..self.rows {
            for j in (i + 1)..self.cols {
                let delta = (self[(i, j)] - self[(j, i)]).abs();
                if delta > tol && worst.is_none_or(|(_, _, w)| delta > w) {
                    worst = Some((i, j, delta));
                }
            }
        }
        worst
    }
}

impl Index<(usize, usize)> for Matrix {
    type Output = f64;

    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for Matrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        &mut self.data[i * self.cols + j]
    }
}

/// LU factorization with partial pivoting, stored in place.
struct Lu {
    lu: Matrix,
    perm: Vec<usize>,
    sign: f64,
}

fn lu_factor(m: &Matrix) -> Result<Lu, LinalgError> {
    if !m.is_square() {
        return Err(LinalgError::DimensionMismatch(format!(
            "LU needs a square matrix, got {}x{}",
            m.rows, m.cols
        )));
    }
    let n = m.rows;
    let mut lu = m.clone();
    let mut perm: Vec<usize> = (0..n).collect();
    let mut sign = 1.0;
    for k in 0..n {
        let mut pivot = k;
        let mut pmax = lu[(k, k)].abs();
        for i in (k + 1)..n {
            let v = lu[(i, k)].abs();
            if v > pmax {
                pmax = v;
                pivot = i;
            }
        }
        if pivot != k {
            for j in 0..n {
                let tmp = lu[(k, j)];
                lu[(k, j)] = lu[(pivot, j)];
                lu[(pivot, j)] = tmp;
            }
            perm.swap(k, pivot);
            sign = -sign;
        }
        let pk = lu[(k, k)];
        if pk == 0.0 {
            // Singular to working precision; determinant is exactly zero and
            // solves must fail. Leave the zero pivot in place.
            continue;
        }
        for i in (k + 1)..n {
            let f = lu[(i, k)] / pk;
            lu[(i, k)] = f;
            for j in (k + 1)..n {
                let sub = f * lu[(k, j)];
                lu[(i, j)] -= sub;
            }
        }
    }
    Ok(Lu { lu, perm, sign })
}

/// Determinant via pivoted LU. Exactly singular matrices return 0.
pub fn lu_det(m: &Matrix) -> Result<f64, LinalgError> {
    let f = lu_factor(m)?;
    let mut det = f.sign;
    for k in 0..f.lu.rows {
        det *= f.lu[(k, k)];
    }
    Ok(det)
}

fn lu_solve_factored(f: &Lu, rhs: &[f64]) -> Result<Vec<f64>, LinalgError> {
    let n = f.lu.rows;
    if rhs.len() != n {
        return Err(LinalgError::DimensionMismatch(format!(
            "rhs has {} entries, expected {n}",
            rhs.len()
        )));
    }
    for k in 0..n {
        if f.lu[(k, k)] == 0.0 {
            return Err(LinalgError::Singular);
        }
    }
    // forward substitution on the permuted rhs
    let mut y = vec![0.0; n];
    for i in 0..n {
        let mut acc = rhs[f.perm[i]];
        for j in 0..i {
            acc -= f.lu[(i, j)] * y[j];
        }
        y[i] = acc;
    }
    // back substitution
    let mut x = vec![0.0; n];
    for i in (0..n).rev() {
        let mut acc = y[i];
        for j in (i + 1)..n {
            acc -= f.lu[(i, j)] * x[j];
        }
        x[i] = acc / f.lu[(i, i)];
    }
    Ok(x)
}

/// Solve `m x = rhs` by pivoted LU.
pub fn lu_solve(m: &Matrix, rhs: &[f64]) -> Result<Vec<f64>, LinalgError> {
    let f = lu_factor(m)?;
    lu_solve_factored(&f, rhs)
}

/// Inverse via column-by-column LU solves. Only used on small matrices.
pub fn lu_inverse(m: &Matrix) -> Result<Matrix, LinalgError> {
    let n = m.rows;
    let f = lu_factor(m)?;
    let mut inv = Matrix::zeros(n, n);
    let mut e = vec![0.0; n];
    for j in 0..n {
        e[j] = 1.0;
        let col = lu_solve_factored(&f, &e)?;
        e[j] = 0.0;
        for i in 0..n {
            inv[(i, j)] = col[i];
        }
    }
    Ok(inv)
}

/// Eigendecomposition of a symmetric matrix. `values` are ascending and
/// `vectors` holds the matching eigenvectors as columns.
#[derive(Clone, Debug)]
pub struct Eigen {
    pub values: Vec<f64>,
    pub vectors: Matrix,
}

fn off_diagonal_frobenius(m: &Matrix) -> f64 {
    let n = m.rows;
    let mut acc = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                acc += m[(i, j)] * m[(i, j)];
            }
        }
    }
    acc.sqrt()
}

/// Cyclic Jacobi eigensolver for symmetric matrices.
///
/// Sweeps row by row, annihilating each off-diagonal entry with a plane
/// rotation, until the off-diagonal Frobenius norm drops below
/// `JACOBI_OFF_TOLERANCE` relative to the Frobenius norm of the input.
pub fn jacobi_eigen(m: &Matrix, max_sweeps: usize) -> Result<Eigen, LinalgError> {
    if let Some((row, col, delta)) = m.symmetry_violation(0.0) {
        if delta > 1e-12 * m.max_abs().max(1.0) {
            return Err(LinalgError::NotSymmetric { row, col, delta });
        }
    }
    let n = m.rows;
    let mut a = m.clone();
    // symmetrize exactly so rounding asymmetries cannot accumulate
    for i in 0..n {
        for j in (i + 1)..n {
            let avg = 0.5 * (a[(i, j)] + a[(j, i)]);
            a[(i, j)] = avg;
            a[(j, i)] = avg;
        }
    }
    let mut v = Matrix::identity(n);
    let scale = a.frobenius_norm().max(f64::MIN_POSITIVE);
    let target = JACOBI_OFF_TOLERANCE * scale;

    let mut converged = false;
    for _sweep in 0..max_sweeps {
        if off_diagonal_frobenius(&a) <= target {
            converged = true;
            break;
        }
        for p in 0..n.saturating_sub(1) {
            for q in (p + 1)..n {
                let apq = a[(p, q)];
                if apq.abs() <= f64::MIN_POSITIVE {
                    continue;
                }
                let app = a[(p, p)];
                let aqq = a[(q, q)];
                let theta = (aqq - app) / (2.0 * apq);
                let t = if theta >= 0.0 {
                    1.0 / (theta + (1.0 + theta * theta).sqrt())
                } else {
                    -1.0 / (-theta + (1.0 + theta * theta).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;

                a[(p, p)] = app - t * apq;
                a[(q, q)] = aqq + t * apq;
                a[(p, q)] = 0.0;
                a[(q, p)] = 0.0;
                for k in 0..n {
                    if k != p && k != q {
                        let akp = a[(k, p)];
                        let akq = a[(k, q)];
                        a[(k, p)] = c * akp - s * akq;
                        a[(p, k)] = a[(k, p)];
                        a[(k, q)] = s * akp + c * akq;
                        a[(q, k)] = a[(k, q)];
                    }
                }
                for k in 0..n {
                    let vkp = v[(k, p)];
                    let vkq = v[(k, q)];
                    v[(k, p)] = c * vkp - s * vkq;
                    v[(k, q)] = s * vkp + c * vkq;
                }
            }
        }
    }
    if !converged && off_diagonal_frobenius(&a) > target {
        return Err(LinalgError::NoConvergence(max_sweeps));
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(i, i)].partial_cmp(&a[(j, j)]).unwrap());
    let values: Vec<f64> = order.iter().map(|&i| a[(i, i)]).collect();
    let mut vectors = Matrix::zeros(n, n);
    for (new_col, &old_col) in order.iter().enumerate() {
        for row in 0..n {
            vectors[(row, new_col)] = v[(row, old_col)];
        }
    }
    Ok(Eigen { values, vectors })
}
