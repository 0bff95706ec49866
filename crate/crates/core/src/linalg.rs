//! Dense complex linear algebra at desk scale.
//!
//! Everything here works on [`ComplexMatrix`], a row-major matrix of
//! `Complex64`. Hermitian spectra come from cyclic Jacobi rotations and
//! singular values from one-sided (Hestenes) Jacobi, both of which are slow
//! but accurate to a few ulps of the largest eigen/singular value. Every
//! threshold is relative to the largest singular value or eigenvalue.

use std::fmt;
use std::ops::{Index, IndexMut};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// Default relative threshold below which a singular value counts as zero.
pub const DEFAULT_RANK_TOL: f64 = 1e-10;

const HERMITIAN_TOL: f64 = 1e-10;
const MAX_SWEEPS: usize = 64;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum LinalgError {
    #[error("matrix is not Hermitian (relative asymmetry {asymmetry:e})")]
    NotHermitian { asymmetry: f64 },
    #[error("matrix is not positive definite (eigenvalue {eigenvalue:e} relative to {largest:e})")]
    NotPositiveDefinite { eigenvalue: f64, largest: f64 },
    #[error("Jacobi iteration did not converge after {sweeps} sweeps")]
    NoConvergence { sweeps: usize },
    #[error("matrix must be square, got {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },
    #[error("dimension mismatch: {left:?} vs {right:?}")]
    DimensionMismatch {
        left: (usize, usize),
        right: (usize, usize),
    },
    #[error("data length {got} does not match {rows}x{cols}")]
    InvalidData { rows: usize, cols: usize, got: usize },
    #[error("matrix entry ({row}, {col}) is not finite")]
    NonFinite { row: usize, col: usize },
    #[error("matrix is singular")]
    Singular,
}

pub type Result<T> = std::result::Result<T, LinalgError>;

/// Row-major dense complex matrix.
#[derive(Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "MatrixRepr", into = "MatrixRepr")]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

#[derive(Serialize, Deserialize)]
struct MatrixRepr {
    rows: usize,
    cols: usize,
    data: Vec<[f64; 2]>,
}

impl TryFrom<MatrixRepr> for ComplexMatrix {
    type Error = LinalgError;

    fn try_from(repr: MatrixRepr) -> Result<Self> {
        let data = repr
            .data
            .into_iter()
            .map(|[re, im]| Complex64::new(re, im))
            .collect();
        ComplexMatrix::new(repr.rows, repr.cols, data)
    }
}

impl From<ComplexMatrix> for MatrixRepr {
    fn from(m: ComplexMatrix) -> Self {
        MatrixRepr {
            rows: m.rows,
            cols: m.cols,
            data: m.data.iter().map(|z| [z.re, z.im]).collect(),
        }
    }
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexMatrix {}x{} [", self.rows, self.cols)?;
        for r in 0..self.rows {
            write!(f, "  ")?;
            for c in 0..self.cols {
                let z = self[(r, c)];
                write!(f, "{:+.6e}{:+.6e}i  ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = Complex64;

    fn index(&self, (r, c): (usize, usize)) -> &Complex64 {
        debug_assert!(r < self.rows && c < self.cols);
        &self.data[r * self.cols + c]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut Complex64 {
        debug_assert!(r < self.rows && c < self.cols);
        &mut self.data[r * self.cols + c]
    }
}

impl ComplexMatrix {
    /// Builds a matrix from row-major data, rejecting length mismatches and
    /// non-finite entries.
    pub fn new(rows: usize, cols: usize, data: Vec<Complex64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(LinalgError::InvalidData {
                rows,
                cols,
                got: data.len(),
            });
        }
        if let Some(k) = data.iter().position(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(LinalgError::NonFinite {
                row: k / cols.max(1),
                col: k % cols.max(1),
            });
        }
        Ok(Self { rows, cols, data })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![Complex64::new(0.0, 0.0); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Complex64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_diag(diag: &[Complex64]) -> Self {
        let mut m = Self::zeros(diag.len(), diag.len());
        for (i, &z) in diag.iter().enumerate() {
            m[(i, i)] = z;
        }
        m
    }

    pub fn from_real_diag(diag: &[f64]) -> Self {
        let diag: Vec<Complex64> = diag.iter().map(|&x| Complex64::new(x, 0.0)).collect();
        Self::from_diag(&diag)
    }

    /// Builds a matrix from equal-length rows.
    ///
    /// # Panics
    /// Panics if the rows are ragged or contain non-finite entries.
    pub fn from_rows(rows: &[Vec<Complex64>]) -> Self {
        let cols = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|r| r.len() == cols), "ragged rows");
        let data = rows.iter().flatten().copied().collect();
        Self::new(rows.len(), cols, data).expect("finite entries")
    }

    pub fn from_real_rows(rows: &[&[f64]]) -> Self {
        let rows: Vec<Vec<Complex64>> = rows
            .iter()
            .map(|r| r.iter().map(|&x| Complex64::new(x, 0.0)).collect())
            .collect();
        Self::from_rows(&rows)
    }

    /// Matrix whose columns are the given vectors.
    pub fn from_columns(columns: &[Vec<Complex64>]) -> Self {
        let rows = columns.first().map_or(0, Vec::len);
        let mut m = Self::zeros(rows, columns.len());
        for (c, col) in columns.iter().enumerate() {
            assert_eq!(col.len(), rows, "ragged columns");
            for (r, &z) in col.iter().enumerate() {
                m[(r, c)] = z;
            }
        }
        m
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn data(&self) -> &[Complex64] {
        &self.data
    }

    pub fn row(&self, r: usize) -> &[Complex64] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn column(&self, c: usize) -> Vec<Complex64> {
        (0..self.rows).map(|r| self[(r, c)]).collect()
    }

    pub fn diagonal(&self) -> Vec<Complex64> {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).collect()
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        let mut out = Self::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                out[(c, r)] = self[(r, c)].conj();
            }
        }
        out
    }

    pub fn transpose(&self) -> Self {
        let mut out = Self::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                out[(c, r)] = self[(r, c)];
            }
        }
        out
    }

    pub fn matmul(&self, other: &Self) -> Result<Self> {
        if self.cols != other.rows {
            return Err(LinalgError::DimensionMismatch {
                left: self.shape(),
                right: other.shape(),
            });
        }
        let mut out = Self::zeros(self.rows, other.cols);
        for r in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(r, k)];
                if a == Complex64::new(0.0, 0.0) {
                    continue;
                }
                for c in 0..other.cols {
                    out[(r, c)] += a * other[(k, c)];
                }
            }
        }
        Ok(out)
    }

    /// Matrix product for shapes the caller has already checked.
    pub(crate) fn mul(&self, other: &Self) -> Self {
        self.matmul(other).expect("conformable shapes")
    }

    pub fn apply(&self, v: &[Complex64]) -> Result<Vec<Complex64>> {
        if v.len() != self.cols {
            return Err(LinalgError::DimensionMismatch {
                left: self.shape(),
                right: (v.len(), 1),
            });
        }
        Ok((0..self.rows)
            .map(|r| self.row(r).iter().zip(v).map(|(a, b)| a * b).sum())
            .collect())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a - b)
    }

    fn zip_with(&self, other: &Self, f: impl Fn(Complex64, Complex64) -> Complex64) -> Result<Self> {
        if self.shape() != other.shape() {
            return Err(LinalgError::DimensionMismatch {
                left: self.shape(),
                right: other.shape(),
            });
        }
        Ok(Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(&a, &b)| f(a, b)).collect(),
        })
    }

    pub fn scale(&self, s: Complex64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&z| z * s).collect(),
        }
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn trace(&self) -> Complex64 {
        self.diagonal().into_iter().sum()
    }

    /// `‖A − A*‖_F / ‖A‖_F` (zero for the zero matrix).
    pub fn hermitian_defect(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        let scale = self.frobenius_norm();
        if scale == 0.0 {
            return 0.0;
        }
        let mut acc = 0.0;
        for r in 0..self.rows {
            for c in 0..self.cols {
                acc += (self[(r, c)] - self[(c, r)].conj()).norm_sqr();
            }
        }
        acc.sqrt() / scale
    }

    /// `(A + A*)/2`, used to scrub rounding asymmetry from computed Hermitian products.
    pub fn hermitian_part(&self) -> Self {
        let mut out = self.clone();
        for r in 0..self.rows {
            for c in 0..self.cols {
                out[(r, c)] = (self[(r, c)] + self[(c, r)].conj()) * 0.5;
            }
        }
        out
    }

    fn require_square(&self) -> Result<usize> {
        if self.is_square() {
            Ok(self.rows)
        } else {
            Err(LinalgError::NotSquare {
                rows: self.rows,
                cols: self.cols,
            })
        }
    }
}

/// Eigen-decomposition `A = U Λ U*` of a Hermitian matrix.
#[derive(Debug, Clone)]
pub struct SpectralData {
    /// Real eigenvalues, descending.
    pub eigenvalues: Vec<f64>,
    /// Unitary matrix whose columns are the matching eigenvectors.
    pub eigenvectors: ComplexMatrix,
}

impl SpectralData {
    pub fn largest(&self) -> f64 {
        self.eigenvalues.first().copied().unwrap_or(0.0)
    }

    pub fn smallest(&self) -> f64 {
        self.eigenvalues.last().copied().unwrap_or(0.0)
    }

    /// `U f(Λ) U*`.
    pub fn reconstruct_with(&self, f: impl Fn(f64) -> f64) -> ComplexMatrix {
        let n = self.eigenvalues.len();
        let u = &self.eigenvectors;
        let mut out = ComplexMatrix::zeros(n, n);
        for (k, &lambda) in self.eigenvalues.iter().enumerate() {
            let w = f(lambda);
            if w == 0.0 {
                continue;
            }
            for r in 0..n {
                let ur = u[(r, k)] * w;
                for c in 0..n {
                    out[(r, c)] += ur * u[(c, k)].conj();
                }
            }
        }
        out
    }

    pub fn reconstruct(&self) -> ComplexMatrix {
        self.reconstruct_with(|x| x)
    }
}

/// Thin singular value decomposition `A = U Σ V*`.
#[derive(Debug, Clone)]
pub struct SvdData {
    /// Nonnegative, descending; length `min(rows, cols)`.
    pub singular_values: Vec<f64>,
    /// `rows × k` with orthonormal columns.
    pub left: ComplexMatrix,
    /// `cols × k` with orthonormal columns.
    pub right: ComplexMatrix,
}

impl SvdData {
    pub fn largest(&self) -> f64 {
        self.singular_values.first().copied().unwrap_or(0.0)
    }

    /// Number of singular values above `tol · σ₁`.
    pub fn rank(&self, tol: f64) -> usize {
        let s1 = self.largest();
        if s1 <= 0.0 {
            return 0;
        }
        self.singular_values.iter().filter(|&&s| s > tol * s1).count()
    }

    /// Smallest singular value that survives the rank threshold.
    pub fn smallest_nonzero(&self, tol: f64) -> Option<f64> {
        let r = self.rank(tol);
        (r > 0).then(|| self.singular_values[r - 1])
    }

    pub fn reconstruct(&self) -> ComplexMatrix {
        let sigma = ComplexMatrix::from_real_diag(&self.singular_values);
        self.left.mul(&sigma).mul(&self.right.adjoint())
    }
}

/// Unitary 2×2 rotation acting on indices `(p, q)` that diagonalises the
/// Hermitian block `[[app, apq], [conj(apq), aqq]]` under `J* · J`.
#[derive(Clone, Copy)]
struct Rotation {
    p: usize,
    q: usize,
    jpp: Complex64,
    jpq: Complex64,
    jqp: Complex64,
    jqq: Complex64,
}

impl Rotation {
    fn new(p: usize, q: usize, app: f64, aqq: f64, apq: Complex64) -> Self {
        let mag = apq.norm();
        let w = apq / mag;
        let theta = (aqq - app) / (2.0 * mag);
        let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
        let c = 1.0 / (t * t + 1.0).sqrt();
        let s = t * c;
        Self {
            p,
            q,
            jpp: Complex64::new(c, 0.0),
            jpq: Complex64::new(s, 0.0),
            jqp: -w.conj() * s,
            jqq: w.conj() * c,
        }
    }

    /// `M ← M J` on columns p, q.
    fn apply_right(&self, m: &mut ComplexMatrix) {
        for k in 0..m.rows {
            let a = m[(k, self.p)];
            let b = m[(k, self.q)];
            m[(k, self.p)] = a * self.jpp + b * self.jqp;
            m[(k, self.q)] = a * self.jpq + b * self.jqq;
        }
    }

    /// `M ← J* M` on rows p, q.
    fn apply_left_adjoint(&self, m: &mut ComplexMatrix) {
        for k in 0..m.cols {
            let a = m[(self.p, k)];
            let b = m[(self.q, k)];
            m[(self.p, k)] = self.jpp.conj() * a + self.jqp.conj() * b;
            m[(self.q, k)] = self.jpq.conj() * a + self.jqq.conj() * b;
        }
    }
}

fn off_diagonal_norm(a: &ComplexMatrix) -> f64 {
    let n = a.rows;
    let mut acc = 0.0;
    for r in 0..n {
        for c in 0..n {
            if r != c {
                acc += a[(r, c)].norm_sqr();
            }
        }
    }
    acc.sqrt()
}

/// Eigen-decomposition of a Hermitian matrix by cyclic Jacobi rotations.
pub fn spectral_decompose_hermitian(a: &ComplexMatrix) -> Result<SpectralData> {
    let n = a.require_square()?;
    let asymmetry = a.hermitian_defect();
    if asymmetry > HERMITIAN_TOL {
        return Err(LinalgError::NotHermitian { asymmetry });
    }
    let mut work = a.hermitian_part();
    for i in 0..n {
        work[(i, i)] = Complex64::new(work[(i, i)].re, 0.0);
    }
    let mut vectors = ComplexMatrix::identity(n);
    let scale = work.frobenius_norm();

    let mut converged = scale == 0.0 || n < 2;
    let mut sweeps = 0;
    while !converged {
        if sweeps == MAX_SWEEPS {
            return Err(LinalgError::NoConvergence { sweeps });
        }
        sweeps += 1;
        let mut rotated = false;
        for p in 0..n - 1 {
            for q in p + 1..n {
                let apq = work[(p, q)];
                let app = work[(p, p)].re;
                let aqq = work[(q, q)].re;
                // Skip entries already negligible against both diagonals.
                if apq.norm() <= 0.5 * f64::EPSILON * (app.abs() * aqq.abs()).sqrt()
                    || apq.norm() <= f64::MIN_POSITIVE / f64::EPSILON
                {
                    work[(p, q)] = Complex64::new(0.0, 0.0);
                    work[(q, p)] = Complex64::new(0.0, 0.0);
                    continue;
                }
                rotated = true;
                let rot = Rotation::new(p, q, app, aqq, apq);
                rot.apply_right(&mut work);
                rot.apply_left_adjoint(&mut work);
                work[(p, q)] = Complex64::new(0.0, 0.0);
                work[(q, p)] = Complex64::new(0.0, 0.0);
                work[(p, p)] = Complex64::new(work[(p, p)].re, 0.0);
                work[(q, q)] = Complex64::new(work[(q, q)].re, 0.0);
                rot.apply_right(&mut vectors);
            }
        }
        converged = !rotated || off_diagonal_norm(&work) <= f64::EPSILON * 1e-2 * scale;
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| work[(j, j)].re.total_cmp(&work[(i, i)].re));
    let eigenvalues = order.iter().map(|&i| work[(i, i)].re).collect();
    let columns: Vec<Vec<Complex64>> = order.iter().map(|&i| vectors.column(i)).collect();
    Ok(SpectralData {
        eigenvalues,
        eigenvectors: ComplexMatrix::from_columns(&columns),
    })
}

/// Eigenvalues only, descending.
pub fn hermitian_eigenvalues(a: &ComplexMatrix) -> Result<Vec<f64>> {
    spectral_decompose_hermitian(a).map(|s| s.eigenvalues)
}

/// Singular value decomposition by one-sided Jacobi on the columns.
pub fn svd(a: &ComplexMatrix) -> Result<SvdData> {
    if a.rows < a.cols {
        let t = svd(&a.adjoint())?;
        return Ok(SvdData {
            singular_values: t.singular_values,
            left: t.right,
            right: t.left,
        });
    }
    let (m, n) = a.shape();
    let mut u = a.clone();
    let mut v = ComplexMatrix::identity(n);
    let scale = a.frobenius_norm();

    let mut sweeps = 0;
    loop {
        if n < 2 || scale == 0.0 {
            break;
        }
        if sweeps == MAX_SWEEPS {
            return Err(LinalgError::NoConvergence { sweeps });
        }
        sweeps += 1;
        let mut rotated = false;
        for p in 0..n - 1 {
            for q in p + 1..n {
                let mut alpha = 0.0;
                let mut beta = 0.0;
                let mut gamma = Complex64::new(0.0, 0.0);
                for k in 0..m {
                    let up = u[(k, p)];
                    let uq = u[(k, q)];
                    alpha += up.norm_sqr();
                    beta += uq.norm_sqr();
                    gamma += up.conj() * uq;
                }
                if gamma.norm() <= (m as f64) * f64::EPSILON * (alpha * beta).sqrt()
                    || gamma.norm() <= f64::MIN_POSITIVE / f64::EPSILON
                {
                    continue;
                }
                rotated = true;
                let rot = Rotation::new(p, q, alpha, beta, gamma);
                rot.apply_right(&mut u);
                rot.apply_right(&mut v);
            }
        }
        if !rotated {
            break;
        }
    }

    let norms: Vec<f64> = (0..n)
        .map(|c| (0..m).map(|r| u[(r, c)].norm_sqr()).sum::<f64>().sqrt())
        .collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| norms[j].total_cmp(&norms[i]));

    let singular_values: Vec<f64> = order.iter().map(|&i| norms[i]).collect();
    let s1 = singular_values.first().copied().unwrap_or(0.0);
    let mut left_cols: Vec<Vec<Complex64>> = Vec::with_capacity(n);
    let mut right_cols: Vec<Vec<Complex64>> = Vec::with_capacity(n);
    for (&i, &s) in order.iter().zip(&singular_values) {
        right_cols.push(v.column(i));
        if s > f64::EPSILON * s1 && s > 0.0 {
            left_cols.push(u.column(i).into_iter().map(|z| z / s).collect());
        } else {
            left_cols.push(Vec::new());
        }
    }
    complete_orthonormal(&mut left_cols, m);
    Ok(SvdData {
        singular_values,
        left: ComplexMatrix::from_columns(&left_cols),
        right: ComplexMatrix::from_columns(&right_cols),
    })
}

/// Fills empty slots with unit vectors orthogonal to everything else, by
/// Gram–Schmidt against the standard basis.
fn complete_orthonormal(columns: &mut [Vec<Complex64>], dim: usize) {
    let mut candidate = 0;
    for slot in 0..columns.len() {
        if !columns[slot].is_empty() {
            continue;
        }
        while candidate < dim {
            let mut e = vec![Complex64::new(0.0, 0.0); dim];
            e[candidate] = Complex64::new(1.0, 0.0);
            candidate += 1;
            for _ in 0..2 {
                for other in columns.iter().filter(|c| !c.is_empty()) {
                    let proj: Complex64 = other.iter().zip(&e).map(|(o, x)| o.conj() * x).sum();
                    for (x, o) in e.iter_mut().zip(other) {
                        *x -= proj * o;
                    }
                }
            }
            let norm = e.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            if norm > 1e-6 {
                columns[slot] = e.into_iter().map(|z| z / norm).collect();
                break;
            }
        }
    }
}

/// Largest singular value.
pub fn operator_norm(a: &ComplexMatrix) -> Result<f64> {
    svd(a).map(|s| s.largest())
}

pub fn rank(a: &ComplexMatrix, tol: f64) -> Result<usize> {
    svd(a).map(|s| s.rank(tol))
}

/// Moore–Penrose pseudo-inverse; singular values at or below `tol · σ₁` are
/// treated as zero.
pub fn pseudo_inverse(a: &ComplexMatrix, tol: f64) -> Result<ComplexMatrix> {
    let s = svd(a)?;
    Ok(pseudo_inverse_from_svd(&s, tol))
}

pub fn pseudo_inverse_from_svd(s: &SvdData, tol: f64) -> ComplexMatrix {
    let r = s.rank(tol);
    let (rows, cols) = (s.right.rows(), s.left.rows());
    let mut out = ComplexMatrix::zeros(rows, cols);
    for k in 0..r {
        let inv = 1.0 / s.singular_values[k];
        for i in 0..rows {
            let vik = s.right[(i, k)] * inv;
            for j in 0..cols {
                out[(i, j)] += vik * s.left[(j, k)].conj();
            }
        }
    }
    out
}

/// Residuals of the four Penrose identities, each divided by `σ₁(A)` (or 1
/// for the zero matrix).
pub fn penrose_residuals(a: &ComplexMatrix, pinv: &ComplexMatrix) -> Result<[f64; 4]> {
    let scale = operator_norm(a)?.max(1.0);
    let a_p = a.matmul(pinv)?;
    let p_a = pinv.matmul(a)?;
    let r1 = a_p.matmul(a)?.sub(a)?.frobenius_norm();
    let r2 = p_a.matmul(pinv)?.sub(pinv)?.frobenius_norm();
    let r3 = a_p.sub(&a_p.adjoint())?.frobenius_norm();
    let r4 = p_a.sub(&p_a.adjoint())?.frobenius_norm();
    Ok([r1 / scale, r2 / scale, r3 / scale, r4 / scale])
}

/// Full row rank: `σ_rows > tol · σ₁` and `σ₁ > 0`. For square matrices this
/// is invertibility.
pub fn is_surjective(a: &ComplexMatrix, tol: f64) -> Result<bool> {
    if a.rows > a.cols {
        return Ok(false);
    }
    if a.rows == 0 {
        return Ok(true);
    }
    let s = svd(a)?;
    Ok(s.rank(tol) == a.rows)
}

/// Full column rank, i.e. bounded below.
pub fn is_injective(a: &ComplexMatrix, tol: f64) -> Result<bool> {
    if a.cols > a.rows {
        return Ok(false);
    }
    let s = svd(a)?;
    Ok(s.rank(tol) == a.cols)
}

pub fn is_invertible(a: &ComplexMatrix, tol: f64) -> Result<bool> {
    Ok(a.is_square() && is_surjective(a, tol)?)
}

/// Inverse of a square matrix, refusing numerically singular input.
pub fn inverse(a: &ComplexMatrix, tol: f64) -> Result<ComplexMatrix> {
    a.require_square()?;
    let s = svd(a)?;
    if s.rank(tol) < a.rows {
        return Err(LinalgError::Singular);
    }
    Ok(pseudo_inverse_from_svd(&s, tol))
}

/// `A^α = U diag(λ^α) U*` for Hermitian positive-definite `A`.
pub fn hermitian_power(a: &ComplexMatrix, alpha: f64) -> Result<ComplexMatrix> {
    hermitian_power_with_tol(a, alpha, DEFAULT_RANK_TOL)
}

pub fn hermitian_power_with_tol(a: &ComplexMatrix, alpha: f64, tol: f64) -> Result<ComplexMatrix> {
    let spec = spectral_decompose_hermitian(a)?;
    let largest = spec.largest();
    let smallest = spec.smallest();
    if largest <= 0.0 || smallest <= tol * largest {
        return Err(LinalgError::NotPositiveDefinite {
            eigenvalue: smallest,
            largest,
        });
    }
    if alpha == 0.0 {
        return Ok(ComplexMatrix::identity(a.rows()));
    }
    Ok(spec.reconstruct_with(|l| l.powf(alpha)).hermitian_part())
}

/// Standard inner product `⟨u, v⟩ = Σ u_k conj(v_k)`, linear in the first slot.
pub fn inner(u: &[Complex64], v: &[Complex64]) -> Complex64 {
    u.iter().zip(v).map(|(a, b)| a * b.conj()).sum()
}

pub fn norm_sq(u: &[Complex64]) -> f64 {
    u.iter().map(|z| z.norm_sqr()).sum()
}
