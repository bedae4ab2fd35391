//! Dense real matrices and vectors, least-squares solves and rank checks.
//!
//! Two independent routes to the least-squares solution live here:
//! [`pseudo_inverse`] forms `(BᵀB)⁻¹Bᵀ` literally through a Cholesky
//! factorization of the normal equations, while [`least_squares`] and
//! [`QrLeastSquares`] use Householder QR with column pivoting. The two are
//! cross-checked in tests.

use std::fmt;
use std::ops::Index;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Numerical cutoffs used by rank checks and solve cross-checks.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    /// Relative cutoff on pivot magnitudes (smallest / largest).
    pub rank_threshold: f64,
    /// Agreement bound between the two least-squares routes.
    pub solve_tolerance: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            rank_threshold: 1e-10,
            solve_tolerance: 1e-8,
        }
    }
}

impl Tolerances {
    pub fn new(rank_threshold: f64, solve_tolerance: f64) -> Result<Self> {
        if !(rank_threshold > 0.0 && rank_threshold.is_finite()) {
            return Err(Error::InvalidSpec(format!(
                "rank_threshold must be positive, got {rank_threshold}"
            )));
        }
        if !(solve_tolerance > 0.0 && solve_tolerance.is_finite()) {
            return Err(Error::InvalidSpec(format!(
                "solve_tolerance must be positive, got {solve_tolerance}"
            )));
        }
        Ok(Tolerances {
            rank_threshold,
            solve_tolerance,
        })
    }
}

fn check_finite(values: &[f64], what: &str) -> Result<()> {
    match values.iter().position(|v| !v.is_finite()) {
        Some(i) => Err(Error::NonFinite {
            location: format!("{what}[{i}]"),
            value: values[i],
        }),
        None => Ok(()),
    }
}

/// A dense real vector with finite entries.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct Vector(Vec<f64>);

impl Vector {
    pub fn new(entries: Vec<f64>) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::dims("vector", "at least one entry", 0));
        }
        check_finite(&entries, "vector")?;
        Ok(Vector(entries))
    }

    pub fn zeros(len: usize) -> Self {
        Vector(vec![0.0; len])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn iter(&self) -> std::slice::Iter<'_, f64> {
        self.0.iter()
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.0
    }

    /// Entrywise `self - other`.
    pub fn sub(&self, other: &Vector) -> Result<Vector> {
        if self.len() != other.len() {
            return Err(Error::dims("vector subtraction", self.len(), other.len()));
        }
        Ok(Vector(
            self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect(),
        ))
    }

    pub fn max_abs(&self) -> f64 {
        self.0.iter().fold(0.0_f64, |m, v| m.max(v.abs()))
    }
}

impl TryFrom<Vec<f64>> for Vector {
    type Error = Error;

    fn try_from(value: Vec<f64>) -> Result<Self> {
        Vector::new(value)
    }
}

impl From<Vector> for Vec<f64> {
    fn from(v: Vector) -> Self {
        v.0
    }
}

impl Index<usize> for Vector {
    type Output = f64;

    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}

/// A dense real matrix, row-major, with finite entries.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn new(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::dims("matrix shape", "positive dimensions", format!("{rows}x{cols}")));
        }
        if data.len() != rows * cols {
            return Err(Error::dims("matrix entries", rows * cols, data.len()));
        }
        check_finite(&data, "matrix")?;
        Ok(Matrix { rows, cols, data })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let ncols = rows.first().map_or(0, Vec::len);
        if let Some((r, row)) = rows.iter().enumerate().find(|(_, row)| row.len() != ncols) {
            return Err(Error::dims(
                "matrix row length",
                ncols,
                format!("{} (row {})", row.len(), r + 1),
            ));
        }
        Matrix::new(rows.len(), ncols, rows.concat())
    }

    pub fn from_columns(columns: &[Vector]) -> Result<Self> {
        let rows = columns.first().map_or(0, Vector::len);
        if let Some(c) = columns.iter().find(|c| c.len() != rows) {
            return Err(Error::dims("matrix column length", rows, c.len()));
        }
        let mut data = Vec::with_capacity(rows * columns.len());
        for r in 0..rows {
            data.extend(columns.iter().map(|c| c[r]));
        }
        Matrix::new(rows, columns.len(), data)
    }

    pub fn identity(n: usize) -> Self {
        let mut data = vec![0.0; n * n];
        for i in 0..n {
            data[i * n + i] = 1.0;
        }
        Matrix {
            rows: n,
            cols: n,
            data,
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> f64 {
        self.data[r * self.cols + c]
    }

    pub fn row(&self, r: usize) -> &[f64] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn column(&self, c: usize) -> Vector {
        Vector((0..self.rows).map(|r| self.get(r, c)).collect())
    }

    /// Columns `start..cols` as a new matrix.
    pub fn trailing_columns(&self, start: usize) -> Result<Matrix> {
        if start >= self.cols {
            return Err(Error::dims("trailing columns", format!("start < {}", self.cols), start));
        }
        let data = (0..self.rows)
            .flat_map(|r| self.row(r)[start..].iter().copied())
            .collect();
        Ok(Matrix {
            rows: self.rows,
            cols: self.cols - start,
            data,
        })
    }

    pub fn transpose(&self) -> Matrix {
        let mut data = Vec::with_capacity(self.data.len());
        for c in 0..self.cols {
            data.extend((0..self.rows).map(|r| self.get(r, c)));
        }
        Matrix {
            rows: self.cols,
            cols: self.rows,
            data,
        }
    }

    pub fn matmul(&self, other: &Matrix) -> Result<Matrix> {
        if self.cols != other.rows {
            return Err(Error::dims(
                "matrix product",
                format!("{} rows on the right", self.cols),
                other.rows,
            ));
        }
        let mut data = vec![0.0; self.rows * other.cols];
        for r in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(r, k);
                let out = &mut data[r * other.cols..(r + 1) * other.cols];
                for (o, b) in out.iter_mut().zip(other.row(k)) {
                    *o += a * b;
                }
            }
        }
        Ok(Matrix {
            rows: self.rows,
            cols: other.cols,
            data,
        })
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0_f64, |m, v| m.max(v.abs()))
    }
}

impl fmt::Display for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for r in 0..self.rows {
            let row: Vec<String> = self.row(r).iter().map(|v| format!("{v:>12.6}")).collect();
            writeln!(f, "{}", row.join(" "))?;
        }
        Ok(())
    }
}

/// `M · v`.
pub fn matvec(m: &Matrix, v: &Vector) -> Result<Vector> {
    if m.cols != v.len() {
        return Err(Error::dims(
            "matvec",
            format!("vector of length {} (matrix is {}x{})", m.cols, m.rows, m.cols),
            v.len(),
        ));
    }
    Ok(Vector(
        (0..m.rows)
            .map(|r| m.row(r).iter().zip(v.iter()).map(|(a, b)| a * b).sum())
            .collect(),
    ))
}

/// Sum of squared entries.
pub fn sse(v: &Vector) -> f64 {
    sse_slice(v.as_slice())
}

pub(crate) fn sse_slice(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum()
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Householder QR with column pivoting of a tall matrix, kept around so the
/// same factorization can solve several right-hand sides.
#[derive(Debug, Clone)]
pub struct QrLeastSquares {
    rows: usize,
    cols: usize,
    /// Householder vectors, `reflectors[k]` acts on entries `k..rows`.
    reflectors: Vec<Vec<f64>>,
    /// `v·v` for each reflector; zero means the reflector is the identity.
    betas: Vec<f64>,
    /// Upper triangle of R, row-major `cols x cols`.
    r: Vec<f64>,
    perm: Vec<usize>,
}

impl QrLeastSquares {
    pub fn new(b: &Matrix, tol: &Tolerances) -> Result<Self> {
        let qr = Self::factor(b)?;
        let (pivot, largest) = qr.pivot_extremes();
        if !(largest > 0.0 && pivot > tol.rank_threshold * largest) {
            return Err(Error::RankDeficient { pivot, largest });
        }
        Ok(qr)
    }

    fn factor(b: &Matrix) -> Result<Self> {
        let (m, n) = (b.rows, b.cols);
        if m < n {
            return Err(Error::dims("least squares", format!("rows >= {n}"), m));
        }
        // column-major working copy
        let mut cols: Vec<Vec<f64>> = (0..n).map(|c| b.column(c).into_vec()).collect();
        let mut perm: Vec<usize> = (0..n).collect();
        let mut reflectors = Vec::with_capacity(n);
        let mut betas = Vec::with_capacity(n);
        let mut r = vec![0.0; n * n];

        for k in 0..n {
            let p = (k..n)
                .max_by(|&i, &j| {
                    sse_slice(&cols[i][k..]).total_cmp(&sse_slice(&cols[j][k..]))
                })
                .unwrap_or(k);
            cols.swap(k, p);
            perm.swap(k, p);
            for i in 0..k {
                r.swap(i * n + k, i * n + p);
            }

            let x = &cols[k][k..];
            let norm = sse_slice(x).sqrt();
            let alpha = if x[0] >= 0.0 { -norm } else { norm };
            let mut v = x.to_vec();
            v[0] -= alpha;
            let beta = sse_slice(&v);
            if beta > 0.0 {
                for col in cols.iter_mut().skip(k + 1) {
                    let seg = &mut col[k..];
                    let scale = 2.0 * dot(&v, seg) / beta;
                    for (s, vi) in seg.iter_mut().zip(&v) {
                        *s -= scale * vi;
                    }
                }
            }
            r[k * n + k] = alpha;
            for j in k + 1..n {
                r[k * n + j] = cols[j][k];
            }
            reflectors.push(v);
            betas.push(beta);
        }
        Ok(QrLeastSquares {
            rows: m,
            cols: n,
            reflectors,
            betas,
            r,
            perm,
        })
    }

    /// Smallest and largest |R_kk|.
    fn pivot_extremes(&self) -> (f64, f64) {
        (0..self.cols)
            .map(|k| self.r[k * self.cols + k].abs())
            .fold((f64::INFINITY, 0.0_f64), |(lo, hi), d| (lo.min(d), hi.max(d)))
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    /// Minimizer of `‖B x − s‖₂` over real `x`.
    pub fn solve(&self, s: &Vector) -> Result<Vector> {
        if s.len() != self.rows {
            return Err(Error::dims("least squares right-hand side", self.rows, s.len()));
        }
        let n = self.cols;
        let mut y = s.as_slice().to_vec();
        for (k, (v, &beta)) in self.reflectors.iter().zip(&self.betas).enumerate() {
            if beta > 0.0 {
                let seg = &mut y[k..];
                let scale = 2.0 * dot(v, seg) / beta;
                for (s, vi) in seg.iter_mut().zip(v) {
                    *s -= scale * vi;
                }
            }
        }
        let mut z = vec![0.0; n];
        for k in (0..n).rev() {
            let tail: f64 = (k + 1..n).map(|j| self.r[k * n + j] * z[j]).sum();
            z[k] = (y[k] - tail) / self.r[k * n + k];
        }
        let mut x = vec![0.0; n];
        for (k, &p) in self.perm.iter().enumerate() {
            x[p] = z[k];
        }
        Vector::new(x)
    }
}

/// True when the smallest pivot of a column-pivoted QR of `a` exceeds
/// `rank_threshold` times the largest.
pub fn check_full_column_rank(a: &Matrix, tol: &Tolerances) -> bool {
    if a.rows < a.cols {
        return false;
    }
    match QrLeastSquares::factor(a) {
        Ok(qr) => {
            let (pivot, largest) = qr.pivot_extremes();
            largest > 0.0 && pivot > tol.rank_threshold * largest
        }
        Err(_) => false,
    }
}

/// Left pseudo-inverse `(BᵀB)⁻¹Bᵀ` of a full-column-rank matrix, formed
/// from a Cholesky factorization of the normal equations.
pub fn pseudo_inverse(b: &Matrix, tol: &Tolerances) -> Result<Matrix> {
    // rank verdict comes from the pivoted QR, not from the squared system
    QrLeastSquares::new(b, tol)?;

    let bt = b.transpose();
    let gram = bt.matmul(b)?;
    let n = gram.cols;
    let mut l = vec![0.0; n * n];
    for j in 0..n {
        let d = gram.get(j, j) - (0..j).map(|k| l[j * n + k] * l[j * n + k]).sum::<f64>();
        if d <= 0.0 {
            return Err(Error::RankDeficient {
                pivot: d.max(0.0).sqrt(),
                largest: gram.max_abs().sqrt(),
            });
        }
        let ljj = d.sqrt();
        l[j * n + j] = ljj;
        for i in j + 1..n {
            let s = gram.get(i, j) - (0..j).map(|k| l[i * n + k] * l[j * n + k]).sum::<f64>();
            l[i * n + j] = s / ljj;
        }
    }

    // solve L Lᵀ P = Bᵀ one column of Bᵀ at a time
    let m = b.rows;
    let mut p = vec![0.0; n * m];
    let mut y = vec![0.0; n];
    for c in 0..m {
        for i in 0..n {
            let s: f64 = (0..i).map(|k| l[i * n + k] * y[k]).sum();
            y[i] = (bt.get(i, c) - s) / l[i * n + i];
        }
        for i in (0..n).rev() {
            let s: f64 = (i + 1..n).map(|k| l[k * n + i] * p[k * m + c]).sum();
            p[i * m + c] = (y[i] - s) / l[i * n + i];
        }
    }
    Matrix::new(n, m, p)
}

/// Real-valued minimizer of `‖B x − s‖₂`.
pub fn least_squares(b: &Matrix, s: &Vector, tol: &Tolerances) -> Result<Vector> {
    if b.rows != s.len() {
        return Err(Error::dims("least squares right-hand side", b.rows, s.len()));
    }
    QrLeastSquares::new(b, tol)?.solve(s)
}

#[cfg(test)]
pub(crate) mod fixtures {
    use super::*;
    use std::f64::consts::PI;

    /// Example 1 matrix from the closed-form sample values, normalized per column.
    pub fn example1() -> Matrix {
        let raw: Vec<[f64; 3]> = (1..=10)
            .map(|k| {
                let phase = 2.0 * PI * k as f64 / 10.0;
                [phase.sin() + 1.0, phase.cos() + 1.0, (2.0 * phase).cos() + 1.0]
            })
            .collect();
        let maxes: Vec<f64> = (0..3)
            .map(|c| raw.iter().fold(0.0_f64, |m, r| m.max(r[c].abs())))
            .collect();
        let rows: Vec<Vec<f64>> = raw
            .iter()
            .map(|r| (0..3).map(|c| r[c] / maxes[c]).collect())
            .collect();
        Matrix::from_rows(&rows).unwrap()
    }

    pub fn example1_rhs() -> Vector {
        matvec(&example1(), &Vector::new(vec![1.0, 0.0, 1.0]).unwrap()).unwrap()
    }
}
