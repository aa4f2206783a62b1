//! Dense real matrices and the symmetric eigen-machinery the rest of the
//! crate is built on.

mod eigen;

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use core::ops::{Index, IndexMut};

use crate::math::sqrt;
use crate::{Error, Result};

pub use eigen::{sym_eigen, sym_eigenvalues, top_k_eigenpairs, top_k_eigenpairs_signed, EigenDecomposition};

/// Relative asymmetry accepted (and averaged away) by [`SymMatrix::new`].
pub const SYMMETRY_TOLERANCE: f64 = 1e-10;

/// Tolerance on `‖UᵀU − I‖_F` accepted by [`subspace_distance`].
pub const ORTHONORMAL_TOLERANCE: f64 = 1e-8;

/// Dense row-major `rows × cols` matrix of `f64`.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![0.0; rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = 1.0;
        }
        m
    }

    pub fn from_vec(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::Dimension {
                what: "Matrix::from_vec",
                detail: format!("{} values for a {rows}x{cols} matrix", data.len()),
            });
        }
        Ok(Self { rows, cols, data })
    }

    /// Builds a matrix from equally long rows.
    pub fn from_rows<R: AsRef<[f64]>>(rows: &[R]) -> Result<Self> {
        let cols = rows.first().map_or(0, |r| r.as_ref().len());
        let mut data = Vec::with_capacity(rows.len() * cols);
        for (i, r) in rows.iter().enumerate() {
            let r = r.as_ref();
            if r.len() != cols {
                return Err(Error::Dimension {
                    what: "Matrix::from_rows",
                    detail: format!("row {i} has {} entries, expected {cols}", r.len()),
                });
            }
            data.extend_from_slice(r);
        }
        Ok(Self { rows: rows.len(), cols, data })
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    pub fn diagonal(values: &[f64]) -> Self {
        let mut m = Self::zeros(values.len(), values.len());
        for (i, &v) in values.iter().enumerate() {
            m[(i, i)] = v;
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

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    #[inline]
    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    #[inline]
    pub fn as_mut_slice(&mut self) -> &mut [f64] {
        &mut self.data
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    #[inline]
    pub fn row_mut(&mut self, i: usize) -> &mut [f64] {
        &mut self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|x| x.is_finite())
    }

    pub fn ensure_finite(&self, what: &'static str) -> Result<()> {
        if self.is_finite() {
            Ok(())
        } else {
            Err(Error::NonFinite { what })
        }
    }

    pub fn transpose(&self) -> Matrix {
        Matrix::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    /// Dense product `self · rhs`.
    pub fn matmul(&self, rhs: &Matrix) -> Result<Matrix> {
        if self.cols != rhs.rows {
            return Err(Error::Dimension {
                what: "matmul",
                detail: format!("{}x{} times {}x{}", self.rows, self.cols, rhs.rows, rhs.cols),
            });
        }
        let mut out = Matrix::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            let out_row = &mut out.data[i * rhs.cols..(i + 1) * rhs.cols];
            for (k, &a) in self.row(i).iter().enumerate() {
                if a == 0.0 {
                    continue;
                }
                for (o, &b) in out_row.iter_mut().zip(rhs.row(k)) {
                    *o += a * b;
                }
            }
        }
        Ok(out)
    }

    /// `self · selfᵀ`, exactly symmetric by construction.
    pub fn gram_rows(&self) -> SymMatrix {
        let n = self.rows;
        let mut out = Matrix::zeros(n, n);
        for i in 0..n {
            for j in i..n {
                let v = dot(self.row(i), self.row(j));
                out[(i, j)] = v;
                out[(j, i)] = v;
            }
        }
        SymMatrix(out)
    }

    /// `selfᵀ · self`, exactly symmetric by construction.
    pub fn gram_cols(&self) -> SymMatrix {
        let m = self.cols;
        let mut out = Matrix::zeros(m, m);
        for r in 0..self.rows {
            let row = self.row(r);
            for i in 0..m {
                let a = row[i];
                if a == 0.0 {
                    continue;
                }
                for j in i..m {
                    out.data[i * m + j] += a * row[j];
                }
            }
        }
        for i in 0..m {
            for j in (i + 1)..m {
                out.data[j * m + i] = out.data[i * m + j];
            }
        }
        SymMatrix(out)
    }

    pub fn scaled(&self, s: f64) -> Matrix {
        Matrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(|x| x * s).collect() }
    }

    pub fn add(&self, rhs: &Matrix) -> Result<Matrix> {
        self.zip_with(rhs, "add", |a, b| a + b)
    }

    pub fn sub(&self, rhs: &Matrix) -> Result<Matrix> {
        self.zip_with(rhs, "sub", |a, b| a - b)
    }

    fn zip_with(&self, rhs: &Matrix, what: &'static str, f: impl Fn(f64, f64) -> f64) -> Result<Matrix> {
        self.ensure_same_shape(rhs, what)?;
        let data = self.data.iter().zip(&rhs.data).map(|(&a, &b)| f(a, b)).collect();
        Ok(Matrix { rows: self.rows, cols: self.cols, data })
    }

    pub(crate) fn ensure_same_shape(&self, rhs: &Matrix, what: &'static str) -> Result<()> {
        if self.rows != rhs.rows || self.cols != rhs.cols {
            return Err(Error::Dimension {
                what,
                detail: format!("{}x{} vs {}x{}", self.rows, self.cols, rhs.rows, rhs.cols),
            });
        }
        Ok(())
    }

    pub(crate) fn add_assign(&mut self, rhs: &Matrix) {
        debug_assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        for (a, b) in self.data.iter_mut().zip(&rhs.data) {
            *a += b;
        }
    }

    pub fn frobenius_norm(&self) -> f64 {
        sqrt(self.data.iter().map(|x| x * x).sum())
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, x| m.max(x.abs()))
    }

    /// Largest entrywise absolute difference; `None` on shape mismatch.
    pub fn max_abs_diff(&self, rhs: &Matrix) -> Option<f64> {
        if self.rows != rhs.rows || self.cols != rhs.cols {
            return None;
        }
        Some(self.data.iter().zip(&rhs.data).fold(0.0, |m, (a, b)| m.max((a - b).abs())))
    }

    /// Largest `|M_ij − M_ji|` of a square matrix.
    pub fn max_asymmetry(&self) -> f64 {
        let n = self.rows;
        let mut worst: f64 = 0.0;
        for i in 0..n {
            for j in (i + 1)..n {
                worst = worst.max((self[(i, j)] - self[(j, i)]).abs());
            }
        }
        worst
    }

    /// Largest Euclidean norm over rows (`‖·‖_{2,∞}`).
    pub fn max_row_norm(&self) -> f64 {
        (0..self.rows).map(|i| norm(self.row(i))).fold(0.0, f64::max)
    }

    /// Largest Euclidean norm over columns.
    pub fn max_col_norm(&self) -> f64 {
        let mut sq = vec![0.0; self.cols];
        for i in 0..self.rows {
            for (s, x) in sq.iter_mut().zip(self.row(i)) {
                *s += x * x;
            }
        }
        sq.into_iter().map(sqrt).fold(0.0, f64::max)
    }

    /// Copies the listed columns into a new matrix.
    pub fn select_columns(&self, cols: &[usize]) -> Matrix {
        Matrix::from_fn(self.rows, cols.len(), |i, j| self[(i, cols[j])])
    }
}

impl Index<(usize, usize)> for Matrix {
    type Output = f64;
    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for Matrix {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.data[i * self.cols + j]
    }
}

/// Square symmetric matrix with finite entries.
#[derive(Debug, Clone, PartialEq)]
pub struct SymMatrix(Matrix);

impl SymMatrix {
    /// Validates `m` as symmetric.
    ///
    /// Asymmetry up to [`SYMMETRY_TOLERANCE`]` · ‖M‖_F` is treated as
    /// floating-point drift and averaged away via `(M + Mᵀ)/2`; anything larger
    /// is rejected.
    pub fn new(mut m: Matrix) -> Result<Self> {
        if !m.is_square() {
            return Err(Error::Dimension {
                what: "SymMatrix::new",
                detail: format!("{}x{} is not square", m.rows, m.cols),
            });
        }
        m.ensure_finite("symmetric matrix")?;
        let asymmetry = m.max_asymmetry();
        if asymmetry > 0.0 {
            let tolerance = SYMMETRY_TOLERANCE * m.frobenius_norm();
            if asymmetry > tolerance {
                return Err(Error::Asymmetric { asymmetry, tolerance });
            }
            let n = m.rows;
            for i in 0..n {
                for j in (i + 1)..n {
                    let avg = 0.5 * (m[(i, j)] + m[(j, i)]);
                    m[(i, j)] = avg;
                    m[(j, i)] = avg;
                }
            }
        }
        Ok(Self(m))
    }

    /// Wraps a matrix the caller has built symmetric and finite.
    pub(crate) fn from_exact(m: Matrix) -> Self {
        debug_assert!(m.is_square() && m.max_asymmetry() == 0.0);
        Self(m)
    }

    pub fn zeros(n: usize) -> Self {
        Self(Matrix::zeros(n, n))
    }

    pub fn identity(n: usize) -> Self {
        Self(Matrix::identity(n))
    }

    pub fn diagonal(values: &[f64]) -> Result<Self> {
        Self::new(Matrix::diagonal(values))
    }

    /// Builds from the upper triangle (`i ≤ j`), mirroring to the lower one.
    pub fn from_upper(n: usize, mut f: impl FnMut(usize, usize) -> f64) -> Result<Self> {
        let mut m = Matrix::zeros(n, n);
        for i in 0..n {
            for j in i..n {
                let v = f(i, j);
                m[(i, j)] = v;
                m[(j, i)] = v;
            }
        }
        m.ensure_finite("symmetric matrix")?;
        Ok(Self(m))
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.0.rows
    }

    #[inline]
    pub fn as_matrix(&self) -> &Matrix {
        &self.0
    }

    pub fn into_matrix(self) -> Matrix {
        self.0
    }

    pub fn trace(&self) -> f64 {
        (0..self.n()).map(|i| self.0[(i, i)]).sum()
    }

    pub fn diag(&self) -> Vec<f64> {
        (0..self.n()).map(|i| self.0[(i, i)]).collect()
    }

    /// Copy with the diagonal set to zero.
    pub fn without_diagonal(&self) -> SymMatrix {
        let mut m = self.0.clone();
        for i in 0..self.n() {
            m[(i, i)] = 0.0;
        }
        SymMatrix(m)
    }

    /// `P · self · Pᵀ` for the permutation sending node `i` to `perm[i]`.
    pub fn permuted(&self, perm: &[usize]) -> SymMatrix {
        let n = self.n();
        let mut m = Matrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                m[(perm[i], perm[j])] = self.0[(i, j)];
            }
        }
        SymMatrix(m)
    }

    pub fn add(&self, rhs: &SymMatrix) -> Result<SymMatrix> {
        Ok(SymMatrix(self.0.add(&rhs.0)?))
    }
}

impl Index<(usize, usize)> for SymMatrix {
    type Output = f64;
    #[inline]
    fn index(&self, idx: (usize, usize)) -> &f64 {
        &self.0[idx]
    }
}

#[inline]
pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[inline]
pub(crate) fn norm(a: &[f64]) -> f64 {
    sqrt(dot(a, a))
}

/// Order in which eigenpairs are taken by magnitude: largest `|λ|` first,
/// ties broken by larger signed value, then by position in `values`.
pub fn magnitude_order(values: &[f64]) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..values.len()).collect();
    idx.sort_by(|&a, &b| {
        let (x, y) = (values[a], values[b]);
        y.abs().total_cmp(&x.abs()).then(y.total_cmp(&x)).then(a.cmp(&b))
    });
    idx
}

fn check_k(what: &'static str, k: usize, limit: usize) -> Result<()> {
    if k == 0 || k > limit {
        return Err(Error::Dimension { what, detail: format!("K = {k} must lie in 1..={limit}") });
    }
    Ok(())
}

/// The `K` eigenvectors whose eigenvalues are largest in absolute value, as
/// the columns of an `n × K` matrix (see [`magnitude_order`] for ties).
pub fn top_k_by_magnitude(decomp: &EigenDecomposition, k: usize) -> Result<Matrix> {
    check_k("top_k_by_magnitude", k, decomp.values.len())?;
    let order = magnitude_order(&decomp.values);
    Ok(decomp.vectors.select_columns(&order[..k]))
}

/// Largest singular value.
///
/// Symmetric input uses `max |λ|` directly; anything else uses the smaller of
/// the two Gram matrices.
pub fn operator_norm(m: &Matrix) -> Result<f64> {
    m.ensure_finite("operator_norm input")?;
    if m.rows == 0 || m.cols == 0 {
        return Ok(0.0);
    }
    if m.is_square() && m.max_asymmetry() == 0.0 {
        return sym_operator_norm(&SymMatrix(m.clone()));
    }
    let gram = if m.rows <= m.cols { m.gram_rows() } else { m.gram_cols() };
    let top = sym_eigenvalues(&gram)?[0];
    Ok(sqrt(top.max(0.0)))
}

/// `max |λ|` of a symmetric matrix.
pub fn sym_operator_norm(m: &SymMatrix) -> Result<f64> {
    let values = sym_eigenvalues(m)?;
    Ok(values.first().map_or(0.0, |v| v.abs()).max(values.last().map_or(0.0, |v| v.abs())))
}

/// The symmetric dilation `[[0, A], [Aᵀ, 0]]` of an `n × m` matrix.
pub fn symmetric_dilation(a: &Matrix) -> Result<SymMatrix> {
    a.ensure_finite("symmetric_dilation input")?;
    let (n, m) = (a.rows, a.cols);
    let mut out = Matrix::zeros(n + m, n + m);
    for i in 0..n {
        for j in 0..m {
            out[(i, n + j)] = a[(i, j)];
            out[(n + j, i)] = a[(i, j)];
        }
    }
    Ok(SymMatrix(out))
}

/// Leading left singular pairs of a matrix, given its row Gram `M·Mᵀ`.
#[derive(Debug, Clone)]
pub struct SingularPairs {
    /// Singular values, descending.
    pub values: Vec<f64>,
    /// `n × K`, column `j` paired with `values[j]`.
    pub vectors: Matrix,
}

/// Top-`K` left singular vectors of `M` (eigenvectors of `M·Mᵀ`, eigenvalues
/// descending), each column signed so its largest-magnitude entry is positive.
pub fn left_singular_vectors(m: &Matrix, k: usize) -> Result<Matrix> {
    Ok(left_singular_pairs(m, k)?.vectors)
}

pub fn left_singular_pairs(m: &Matrix, k: usize) -> Result<SingularPairs> {
    m.ensure_finite("left_singular_vectors input")?;
    check_k("left_singular_vectors", k, m.rows.min(m.cols))?;
    left_singular_from_gram(&m.gram_rows(), k)
}

/// Same as [`left_singular_pairs`] when the Gram matrix is already at hand.
pub fn left_singular_from_gram(gram: &SymMatrix, k: usize) -> Result<SingularPairs> {
    check_k("left_singular_from_gram", k, gram.n())?;
    let (values, vectors) = eigen::top_k_eigenpairs_by(gram, k, eigen::Selection::Descending)?;
    Ok(SingularPairs { values: values.into_iter().map(|v| sqrt(v.max(0.0))).collect(), vectors })
}

/// `‖UᵀU − I‖_F`.
pub fn orthonormality_defect(u: &Matrix) -> f64 {
    let g = u.gram_cols();
    let k = u.cols;
    let mut s = 0.0;
    for i in 0..k {
        for j in 0..k {
            let target = if i == j { 1.0 } else { 0.0 };
            let d = g[(i, j)] - target;
            s += d * d;
        }
    }
    sqrt(s)
}

/// Frobenius sin-Θ distance `‖UUᵀ − VVᵀ‖_F / √2` between the column spaces
/// of two `n × K` orthonormal matrices.
pub fn subspace_distance(u: &Matrix, v: &Matrix) -> Result<f64> {
    u.ensure_same_shape(v, "subspace_distance")?;
    for (what, m) in [("U", u), ("V", v)] {
        let deviation = orthonormality_defect(m);
        if !(deviation <= ORTHONORMAL_TOLERANCE) {
            return Err(Error::NotOrthonormal { what, deviation });
        }
    }
    let n = u.rows;
    let mut s = 0.0;
    for i in 0..n {
        for j in 0..n {
            let d = dot(u.row(i), u.row(j)) - dot(v.row(i), v.row(j));
            s += d * d;
        }
    }
    Ok(sqrt(s / 2.0))
}

/// Flips `v` so that its largest-magnitude entry is positive; near-ties
/// (within a relative 1e-10) resolve to the lowest index.
pub(crate) fn fix_sign(v: &mut [f64]) {
    let max = v.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    if max == 0.0 {
        return;
    }
    let lead = v.iter().position(|x| x.abs() >= max * (1.0 - 1e-10)).unwrap_or(0);
    if v[lead] < 0.0 {
        v.iter_mut().for_each(|x| *x = -*x);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::SplitMix64;

    fn random_matrix(rows: usize, cols: usize, rng: &mut SplitMix64) -> Matrix {
        Matrix::from_fn(rows, cols, |_, _| 2.0 * rng.next_f64() - 1.0)
    }

    #[test]
    fn symmetrizes_small_drift_and_rejects_large() {
        let m = Matrix::from_rows(&[[1.0, 2.0], [2.0 + 1e-14, 3.0]]).unwrap();
        let s = SymMatrix::new(m).unwrap();
        assert_eq!(s[(0, 1)], s[(1, 0)]);
        let bad = Matrix::from_rows(&[[1.0, 2.0], [2.5, 3.0]]).unwrap();
        assert!(matches!(SymMatrix::new(bad), Err(Error::Asymmetric { .. })));
        let nan = Matrix::from_rows(&[[f64::NAN]]).unwrap();
        assert!(matches!(SymMatrix::new(nan), Err(Error::NonFinite { .. })));
    }

    #[test]
    fn operator_norm_examples() {
        let d = Matrix::diagonal(&[3.0, -5.0]);
        assert!((operator_norm(&d).unwrap() - 5.0).abs() < 1e-12);
        assert_eq!(operator_norm(&Matrix::zeros(3, 4)).unwrap(), 0.0);
        // e·aᵀ with ‖e‖ = 2, ‖a‖ = 3.
        let e = [2.0, 0.0];
        let a = [0.0, 3.0, 0.0];
        let rank_one = Matrix::from_fn(2, 3, |i, j| e[i] * a[j]);
        assert!((operator_norm(&rank_one).unwrap() - 6.0).abs() < 1e-12);
        let dil = symmetric_dilation(&rank_one).unwrap();
        let vals = sym_eigenvalues(&dil).unwrap();
        assert!((vals[0] - 6.0).abs() < 1e-12 && (vals[4] + 6.0).abs() < 1e-12);
        assert!(operator_norm(&Matrix::from_rows(&[[f64::INFINITY]]).unwrap()).is_err());
    }

    #[test]
    fn dilation_examples() {
        let c = Matrix::from_rows(&[[2.5]]).unwrap();
        let d = symmetric_dilation(&c).unwrap();
        assert_eq!(d.as_matrix(), &Matrix::from_rows(&[[0.0, 2.5], [2.5, 0.0]]).unwrap());
        let vals = sym_eigenvalues(&d).unwrap();
        assert!((vals[0] - 2.5).abs() < 1e-14 && (vals[1] + 2.5).abs() < 1e-14);
        let z = symmetric_dilation(&Matrix::zeros(2, 3)).unwrap();
        assert_eq!(z.as_matrix(), &Matrix::zeros(5, 5));
    }

    #[test]
    fn dilation_norm_matches_gram_singular_value() {
        let mut rng = SplitMix64::new(11);
        for _ in 0..50 {
            let a = random_matrix(3, 2, &mut rng);
            // Oracle: σ_max² is the larger root of the 2x2 Gram's characteristic
            // polynomial.
            let g = a.gram_cols();
            let (p, q, r) = (g[(0, 0)], g[(0, 1)], g[(1, 1)]);
            let top = 0.5 * (p + r) + crate::math::sqrt(0.25 * (p - r) * (p - r) + q * q);
            let oracle = crate::math::sqrt(top);
            let via_dilation = operator_norm(symmetric_dilation(&a).unwrap().as_matrix()).unwrap();
            assert!((via_dilation - oracle).abs() < 1e-10);
            assert!((operator_norm(&a).unwrap() - oracle).abs() < 1e-10);
        }
    }

    #[test]
    fn top_k_examples() {
        let d = SymMatrix::diagonal(&[5.0, -7.0, 1.0]).unwrap();
        let top = top_k_by_magnitude(&sym_eigen(&d).unwrap(), 2).unwrap();
        assert_eq!(top.column(0), [0.0, 1.0, 0.0]);
        assert_eq!(top.column(1), [1.0, 0.0, 0.0]);

        let tie = SymMatrix::diagonal(&[3.0, 3.0, 0.0]).unwrap();
        let top = top_k_by_magnitude(&sym_eigen(&tie).unwrap(), 2).unwrap();
        assert_eq!(top.column(0), [1.0, 0.0, 0.0]);
        assert_eq!(top.column(1), [0.0, 1.0, 0.0]);

        let jmi = SymMatrix::from_upper(3, |i, j| if i == j { 0.0 } else { 1.0 }).unwrap();
        let top = top_k_by_magnitude(&sym_eigen(&jmi).unwrap(), 1).unwrap();
        let s = 1.0 / crate::math::sqrt(3.0);
        for x in top.column(0) {
            assert!((x - s).abs() < 1e-12);
        }
        assert!(top_k_by_magnitude(&sym_eigen(&jmi).unwrap(), 4).is_err());
    }

    #[test]
    fn magnitude_order_tie_breaks() {
        assert_eq!(magnitude_order(&[2.0, -2.0, 1.0]), [0, 1, 2]);
        assert_eq!(magnitude_order(&[-2.0, 2.0, 1.0]), [1, 0, 2]);
        assert_eq!(magnitude_order(&[3.0, 3.0, 0.0]), [0, 1, 2]);
    }

    #[test]
    fn left_singular_examples() {
        let u = left_singular_vectors(&Matrix::identity(3), 2).unwrap();
        let e12 = Matrix::from_rows(&[[1.0, 0.0], [0.0, 1.0], [0.0, 0.0]]).unwrap();
        assert!(subspace_distance(&u, &e12).unwrap() < 1e-12);

        // Orthogonal rows with norms 3, 2, 1.
        let m = Matrix::from_rows(&[[0.0, 2.0, 0.0, 0.0], [3.0, 0.0, 0.0, 0.0], [0.0, 0.0, 0.0, 1.0]]).unwrap();
        let u = left_singular_pairs(&m, 1).unwrap();
        assert!((u.values[0] - 3.0).abs() < 1e-12);
        assert_eq!(u.vectors.column(0), [0.0, 1.0, 0.0]);
        assert!(left_singular_vectors(&m, 4).is_err());
    }

    #[test]
    fn subspace_distance_examples() {
        let mut rng = SplitMix64::new(5);
        let q = sym_eigen(&SymMatrix::new(random_matrix(6, 6, &mut rng).gram_rows().into_matrix()).unwrap())
            .unwrap()
            .vectors;
        let u = q.select_columns(&[0, 1]);
        assert!(subspace_distance(&u, &u).unwrap() < 1e-12);
        let (c, s) = (libm::cos(0.7), libm::sin(0.7));
        let r = Matrix::from_rows(&[[c, -s], [s, c]]).unwrap();
        let v = u.matmul(&r).unwrap();
        assert!(subspace_distance(&u, &v).unwrap() < 1e-10);

        let e1 = Matrix::from_rows(&[[1.0], [0.0]]).unwrap();
        let e2 = Matrix::from_rows(&[[0.0], [1.0]]).unwrap();
        assert!((subspace_distance(&e1, &e2).unwrap() - 1.0).abs() < 1e-15);
        let bad = Matrix::from_rows(&[[2.0], [0.0]]).unwrap();
        assert!(matches!(subspace_distance(&e1, &bad), Err(Error::NotOrthonormal { .. })));
    }
}
