//! Symmetric eigensolver: Householder reduction to tridiagonal form followed
//! by implicit-shift QL iteration.
//!
//! Two drivers share the reduction. [`sym_eigen`] accumulates every rotation
//! and returns the full spectrum with eigenvectors. [`top_k_eigenpairs`] runs
//! QL on the eigenvalues alone, recovers only the selected eigenvectors by
//! inverse iteration on the tridiagonal matrix, and maps them back through the
//! stored reflectors. That costs `O(n³)` for the reduction plus `O(n²K)`
//! instead of the `O(n³)` rotation accumulation, which matters for the
//! experiment sweeps.

use alloc::vec;
use alloc::vec::Vec;

use super::{dot, fix_sign, magnitude_order, Matrix, SymMatrix};
use crate::math::{hypot, sqrt};
use crate::rng::SplitMix64;
use crate::{Error, Result};

/// QL sweeps allowed per eigenvalue before giving up.
const MAX_QL_ITERATIONS: usize = 60;

/// Below this size [`top_k_eigenpairs`] uses the full decomposition, which
/// is cheap there and resolves exactly degenerate eigenspaces to stable
/// coordinate-aligned bases.
const FULL_DECOMPOSITION_CUTOFF: usize = 96;

/// Eigenvalues in descending order with matching orthonormal eigenvectors.
#[derive(Debug, Clone)]
pub struct EigenDecomposition {
    /// Non-increasing.
    pub values: Vec<f64>,
    /// `n × n`; column `j` pairs with `values[j]` and has its largest-magnitude
    /// entry positive.
    pub vectors: Matrix,
}

impl EigenDecomposition {
    /// Largest `‖M·vⱼ − λⱼ·vⱼ‖₂` over all pairs.
    pub fn max_residual(&self, m: &SymMatrix) -> f64 {
        let n = self.values.len();
        let mut worst: f64 = 0.0;
        for j in 0..n {
            let v = self.vectors.column(j);
            let mut r = 0.0;
            for i in 0..n {
                let mv = dot(m.as_matrix().row(i), &v);
                let d = mv - self.values[j] * v[i];
                r += d * d;
            }
            worst = worst.max(sqrt(r));
        }
        worst
    }
}

struct Tridiagonal {
    diag: Vec<f64>,
    /// `off[k]` couples `k` and `k + 1`; one extra trailing zero.
    off: Vec<f64>,
    /// Householder vectors: reflector `k` acts on indices `k+1..n`.
    reflectors: Vec<(f64, Vec<f64>)>,
}

fn tridiagonalize(m: &SymMatrix) -> Tridiagonal {
    let n = m.n();
    let mut a = m.as_matrix().clone();
    let mut off = vec![0.0; n];
    let mut reflectors = Vec::with_capacity(n.saturating_sub(1));
    let mut p = vec![0.0; n];

    for k in 0..n.saturating_sub(1) {
        let len = n - k - 1;
        let mut v: Vec<f64> = (k + 1..n).map(|i| a[(i, k)]).collect();
        let tail: f64 = v[1..].iter().map(|x| x * x).sum();
        if tail == 0.0 {
            off[k] = v[0];
            reflectors.push((0.0, Vec::new()));
            continue;
        }
        let norm_x = sqrt(v[0] * v[0] + tail);
        let alpha = if v[0] > 0.0 { -norm_x } else { norm_x };
        v[0] -= alpha;
        let vtv = v[0] * v[0] + tail;
        let tau = 2.0 / vtv;
        off[k] = alpha;

        // Trailing block update A ← H A H with H = I − τ v vᵀ:
        // p = τ A v, w = p − (τ/2)(pᵀv) v, A ← A − v wᵀ − w vᵀ.
        let p = &mut p[..len];
        for (r, pr) in p.iter_mut().enumerate() {
            let row = &a.row(k + 1 + r)[k + 1..];
            *pr = tau * dot(row, &v);
        }
        let kappa = 0.5 * tau * dot(p, &v);
        for (pr, vr) in p.iter_mut().zip(&v) {
            *pr -= kappa * vr;
        }
        for r in 0..len {
            let (vr, wr) = (v[r], p[r]);
            let row = &mut a.row_mut(k + 1 + r)[k + 1..];
            for ((x, &vc), &wc) in row.iter_mut().zip(&v).zip(p.iter()) {
                *x -= vr * wc + wr * vc;
            }
        }
        reflectors.push((tau, v));
    }
    let diag = (0..n).map(|i| a[(i, i)]).collect();
    Tridiagonal { diag, off, reflectors }
}

impl Tridiagonal {
    /// `Q z` where `A = Q T Qᵀ`.
    fn back_transform(&self, z: &mut [f64]) {
        for (k, (tau, v)) in self.reflectors.iter().enumerate().rev() {
            if *tau == 0.0 {
                continue;
            }
            let seg = &mut z[k + 1..];
            let s = tau * dot(seg, v);
            for (x, vi) in seg.iter_mut().zip(v) {
                *x -= s * vi;
            }
        }
    }

    /// Rows of `Qᵀ`, i.e. row `j` of the result is column `j` of `Q`.
    fn q_transposed(&self) -> Matrix {
        let n = self.diag.len();
        let mut qt = Matrix::identity(n);
        for j in 0..n {
            self.back_transform(qt.row_mut(j));
        }
        qt
    }
}

/// Implicit-shift QL on a symmetric tridiagonal matrix (EISPACK `tql2`).
/// When `zt` is given, rotations are applied to its rows, so on exit row `j`
/// holds the eigenvector for `d[j]`.
fn ql_implicit(d: &mut [f64], e: &mut [f64], mut zt: Option<&mut Matrix>) -> Result<()> {
    let n = d.len();
    if n == 0 {
        return Ok(());
    }
    let eps = f64::EPSILON;
    let mut f = 0.0;
    let mut tst1: f64 = 0.0;
    for l in 0..n {
        tst1 = tst1.max(d[l].abs() + e[l].abs());
        let mut m = l;
        while m < n - 1 && e[m].abs() > eps * tst1 {
            m += 1;
        }
        if m > l {
            let mut iter = 0;
            loop {
                iter += 1;
                if iter > MAX_QL_ITERATIONS {
                    return Err(Error::NoConvergence { n });
                }
                let g = d[l];
                let mut p = (d[l + 1] - g) / (2.0 * e[l]);
                let mut r = hypot(p, 1.0);
                if p < 0.0 {
                    r = -r;
                }
                d[l] = e[l] / (p + r);
                d[l + 1] = e[l] * (p + r);
                let dl1 = d[l + 1];
                let mut h = g - d[l];
                for di in d.iter_mut().skip(l + 2) {
                    *di -= h;
                }
                f += h;

                p = d[m];
                let (mut c, mut c2, mut c3) = (1.0, 1.0, 1.0);
                let el1 = e[l + 1];
                let (mut s, mut s2) = (0.0, 0.0);
                for i in (l..m).rev() {
                    c3 = c2;
                    c2 = c;
                    s2 = s;
                    let g = c * e[i];
                    h = c * p;
                    r = hypot(p, e[i]);
                    e[i + 1] = s * r;
                    s = e[i] / r;
                    c = p / r;
                    p = c * d[i] - s * g;
                    d[i + 1] = h + s * (c * g + s * d[i]);
                    if let Some(z) = zt.as_deref_mut() {
                        let cols = z.cols();
                        let data = z.as_mut_slice();
                        let (lo, hi) = data.split_at_mut((i + 1) * cols);
                        let row_i = &mut lo[i * cols..];
                        let row_next = &mut hi[..cols];
                        for (a, b) in row_i.iter_mut().zip(row_next.iter_mut()) {
                            let hb = *b;
                            *b = s * *a + c * hb;
                            *a = c * *a - s * hb;
                        }
                    }
                }
                p = -s * s2 * c3 * el1 * e[l] / dl1;
                e[l] = s * p;
                d[l] = c * p;
                if e[l].abs() <= eps * tst1 {
                    break;
                }
            }
        }
        d[l] += f;
        e[l] = 0.0;
    }
    Ok(())
}

fn descending_order(values: &[f64]) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..values.len()).collect();
    idx.sort_by(|&a, &b| values[b].total_cmp(&values[a]).then(a.cmp(&b)));
    idx
}

fn ensure_nonempty(m: &SymMatrix) -> Result<()> {
    if m.n() == 0 {
        return Err(Error::Dimension { what: "sym_eigen", detail: "empty matrix".into() });
    }
    Ok(())
}

/// Full eigendecomposition of a symmetric matrix.
pub fn sym_eigen(m: &SymMatrix) -> Result<EigenDecomposition> {
    ensure_nonempty(m)?;
    let n = m.n();
    let mut tri = tridiagonalize(m);
    let mut zt = tri.q_transposed();
    ql_implicit(&mut tri.diag, &mut tri.off, Some(&mut zt))?;
    let order = descending_order(&tri.diag);
    let values = order.iter().map(|&i| tri.diag[i]).collect();
    let mut vectors = Matrix::zeros(n, n);
    for (col, &src) in order.iter().enumerate() {
        let mut v = zt.row(src).to_vec();
        fix_sign(&mut v);
        for (i, x) in v.into_iter().enumerate() {
            vectors[(i, col)] = x;
        }
    }
    Ok(EigenDecomposition { values, vectors })
}

/// Eigenvalues only, descending.
pub fn sym_eigenvalues(m: &SymMatrix) -> Result<Vec<f64>> {
    ensure_nonempty(m)?;
    let mut tri = tridiagonalize(m);
    ql_implicit(&mut tri.diag, &mut tri.off, None)?;
    let mut values = tri.diag;
    values.sort_by(|a, b| b.total_cmp(a));
    Ok(values)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Selection {
    /// Largest `|λ|` first (see [`magnitude_order`]).
    Magnitude,
    /// Largest signed value first.
    Descending,
}

/// The `K` eigenpairs with largest `|λ|`, in [`magnitude_order`]. Returns the
/// selected eigenvalues (signed) and an `n × K` matrix of eigenvectors.
pub fn top_k_eigenpairs(m: &SymMatrix, k: usize) -> Result<(Vec<f64>, Matrix)> {
    top_k_eigenpairs_by(m, k, Selection::Magnitude)
}

/// The `K` largest eigenpairs by signed value, descending.
pub fn top_k_eigenpairs_signed(m: &SymMatrix, k: usize) -> Result<(Vec<f64>, Matrix)> {
    top_k_eigenpairs_by(m, k, Selection::Descending)
}

pub(crate) fn top_k_eigenpairs_by(m: &SymMatrix, k: usize, selection: Selection) -> Result<(Vec<f64>, Matrix)> {
    ensure_nonempty(m)?;
    if k == 0 || k > m.n() {
        return Err(Error::Dimension {
            what: "top_k_eigenpairs",
            detail: alloc::format!("K = {k} must lie in 1..={}", m.n()),
        });
    }
    if m.n() <= FULL_DECOMPOSITION_CUTOFF {
        let full = sym_eigen(m)?;
        let order = select(&full.values, selection);
        let picked = &order[..k];
        return Ok((picked.iter().map(|&i| full.values[i]).collect(), full.vectors.select_columns(picked)));
    }
    partial_top_k(m, k, selection)
}

fn select(values: &[f64], selection: Selection) -> Vec<usize> {
    match selection {
        Selection::Magnitude => magnitude_order(values),
        Selection::Descending => (0..values.len()).collect(),
    }
}

pub(crate) fn partial_top_k(m: &SymMatrix, k: usize, selection: Selection) -> Result<(Vec<f64>, Matrix)> {
    let n = m.n();
    let tri = tridiagonalize(m);
    let mut d = tri.diag.clone();
    let mut e = tri.off.clone();
    ql_implicit(&mut d, &mut e, None)?;
    d.sort_by(|a, b| b.total_cmp(a));
    let picked: Vec<usize> = select(&d, selection).into_iter().take(k).collect();

    let tnorm = tri
        .diag
        .iter()
        .zip(&tri.off)
        .fold(0.0f64, |acc, (a, b)| acc.max(a.abs() + 2.0 * b.abs()))
        .max(f64::MIN_POSITIVE);
    let cluster_tol = 1e-3 * tnorm;

    // Solve in ascending eigenvalue order so near-degenerate clusters are
    // processed contiguously and can be re-orthogonalized against each other.
    let mut solve_order: Vec<usize> = (0..k).collect();
    solve_order.sort_by(|&a, &b| d[picked[a]].total_cmp(&d[picked[b]]).then(a.cmp(&b)));

    let mut tri_vectors: Vec<Option<Vec<f64>>> = vec![None; k];
    let mut done: Vec<usize> = Vec::with_capacity(k);
    for &slot in &solve_order {
        let lambda = d[picked[slot]];
        let cluster: Vec<&[f64]> = done
            .iter()
            .filter(|&&o| (d[picked[o]] - lambda).abs() <= cluster_tol)
            .map(|&o| tri_vectors[o].as_deref().unwrap())
            .collect();
        let z = inverse_iteration(&tri.diag, &tri.off, lambda, tnorm, &cluster, slot as u64);
        tri_vectors[slot] = Some(z);
        done.push(slot);
    }

    let mut vectors = Matrix::zeros(n, k);
    for (col, z) in tri_vectors.into_iter().enumerate() {
        let mut z = z.unwrap();
        tri.back_transform(&mut z);
        fix_sign(&mut z);
        for (i, x) in z.into_iter().enumerate() {
            vectors[(i, col)] = x;
        }
    }
    Ok((picked.iter().map(|&i| d[i]).collect(), vectors))
}

/// LU factorization with partial pivoting of the tridiagonal `T − λI`
/// (LAPACK `dgttrf` layout). Pivots smaller than `pert` are replaced by it.
struct ShiftedLu {
    dl: Vec<f64>,
    dd: Vec<f64>,
    du: Vec<f64>,
    du2: Vec<f64>,
    swapped: Vec<bool>,
}

impl ShiftedLu {
    fn new(diag: &[f64], off: &[f64], lambda: f64, pert: f64) -> Self {
        let n = diag.len();
        let mut dd: Vec<f64> = diag.iter().map(|x| x - lambda).collect();
        let mut du: Vec<f64> = off[..n.saturating_sub(1)].to_vec();
        let mut dl = du.clone();
        let mut du2 = vec![0.0; n.saturating_sub(2)];
        let mut swapped = vec![false; n.saturating_sub(1)];
        let guard = |x: f64| {
            if x.abs() < pert {
                if x < 0.0 {
                    -pert
                } else {
                    pert
                }
            } else {
                x
            }
        };
        for i in 0..n.saturating_sub(1) {
            if dd[i].abs() >= dl[i].abs() {
                dd[i] = guard(dd[i]);
                let fact = dl[i] / dd[i];
                dl[i] = fact;
                dd[i + 1] -= fact * du[i];
            } else {
                let fact = dd[i] / dl[i];
                dd[i] = dl[i];
                dl[i] = fact;
                let temp = du[i];
                du[i] = dd[i + 1];
                dd[i + 1] = temp - fact * dd[i + 1];
                if i + 2 < n {
                    du2[i] = du[i + 1];
                    du[i + 1] *= -fact;
                }
                swapped[i] = true;
            }
        }
        if n > 0 {
            dd[n - 1] = guard(dd[n - 1]);
        }
        Self { dl, dd, du, du2, swapped }
    }

    fn solve(&self, b: &mut [f64]) {
        let n = b.len();
        for i in 0..n.saturating_sub(1) {
            if self.swapped[i] {
                let t = b[i];
                b[i] = b[i + 1];
                b[i + 1] = t - self.dl[i] * b[i];
            } else {
                b[i + 1] -= self.dl[i] * b[i];
            }
        }
        for i in (0..n).rev() {
            let mut x = b[i];
            if i + 1 < n {
                x -= self.du[i] * b[i + 1];
            }
            if i + 2 < n {
                x -= self.du2[i] * b[i + 2];
            }
            b[i] = x / self.dd[i];
        }
    }
}

fn tridiagonal_residual(diag: &[f64], off: &[f64], lambda: f64, z: &[f64]) -> f64 {
    let n = diag.len();
    let mut r = 0.0;
    for i in 0..n {
        let mut t = (diag[i] - lambda) * z[i];
        if i > 0 {
            t += off[i - 1] * z[i - 1];
        }
        if i + 1 < n {
            t += off[i] * z[i + 1];
        }
        r += t * t;
    }
    sqrt(r)
}

fn inverse_iteration(diag: &[f64], off: &[f64], lambda: f64, tnorm: f64, cluster: &[&[f64]], salt: u64) -> Vec<f64> {
    let n = diag.len();
    let eps = f64::EPSILON;
    let lu = ShiftedLu::new(diag, off, lambda, eps * tnorm);
    let mut rng = SplitMix64::new(crate::rng::substream(0x5EED_1E57, &[salt]));
    let mut z: Vec<f64> = (0..n).map(|_| rng.next_f64() - 0.5).collect();
    let target = 8.0 * (n as f64) * eps * tnorm;
    let mut extra = 0;
    for _ in 0..24 {
        for q in cluster {
            let s = dot(&z, q);
            for (x, qi) in z.iter_mut().zip(q.iter()) {
                *x -= s * qi;
            }
        }
        let nz = sqrt(dot(&z, &z));
        z.iter_mut().for_each(|x| *x /= nz);
        lu.solve(&mut z);
        for q in cluster {
            let s = dot(&z, q);
            for (x, qi) in z.iter_mut().zip(q.iter()) {
                *x -= s * qi;
            }
        }
        let nz = sqrt(dot(&z, &z));
        z.iter_mut().for_each(|x| *x /= nz);
        if tridiagonal_residual(diag, off, lambda, &z) <= target {
            extra += 1;
            if extra >= 2 {
                break;
            }
        }
    }
    z
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{orthonormality_defect, subspace_distance};

    fn random_sym(n: usize, rng: &mut SplitMix64) -> SymMatrix {
        SymMatrix::from_upper(n, |_, _| 2.0 * rng.next_f64() - 1.0).unwrap()
    }

    #[test]
    fn identity_and_complete_graph() {
        let e = sym_eigen(&SymMatrix::identity(3)).unwrap();
        assert_eq!(e.values, [1.0, 1.0, 1.0]);
        assert_eq!(e.vectors, Matrix::identity(3));

        let jmi = SymMatrix::from_upper(3, |i, j| if i == j { 0.0 } else { 1.0 }).unwrap();
        let e = sym_eigen(&jmi).unwrap();
        for (v, want) in e.values.iter().zip([2.0, -1.0, -1.0]) {
            assert!((v - want).abs() < 1e-12);
        }
    }

    #[test]
    fn prescribed_spectrum_through_orthogonal_basis() {
        let r = core::f64::consts::FRAC_1_SQRT_2;
        let w = Matrix::from_rows(&[[0.5, 0.5, -r], [0.5, 0.5, r], [r, -r, 0.0]]).unwrap();
        let b = w.matmul(&Matrix::diagonal(&[1.5, 0.2, 0.4])).unwrap().matmul(&w.transpose()).unwrap();
        let e = sym_eigen(&SymMatrix::new(b).unwrap()).unwrap();
        for (v, want) in e.values.iter().zip([1.5, 0.4, 0.2]) {
            assert!((v - want).abs() < 1e-12);
        }
    }

    #[test]
    fn random_residuals_orthonormality_and_trace() {
        let mut rng = SplitMix64::new(99);
        for n in [1, 2, 3, 5, 8, 13, 21, 40] {
            let m = random_sym(n, &mut rng);
            let e = sym_eigen(&m).unwrap();
            let fro = m.as_matrix().frobenius_norm();
            assert!(e.max_residual(&m) <= 1e-9 * (1.0 + fro));
            assert!(orthonormality_defect(&e.vectors) <= 1e-9);
            assert!(e.values.windows(2).all(|w| w[0] >= w[1]));
            let tr = m.trace();
            let sum: f64 = e.values.iter().sum();
            assert!((sum - tr).abs() <= 1e-8 * (1.0 + tr.abs()));
        }
    }

    #[test]
    fn values_only_matches_full() {
        let mut rng = SplitMix64::new(3);
        let m = random_sym(30, &mut rng);
        let full = sym_eigen(&m).unwrap();
        let vals = sym_eigenvalues(&m).unwrap();
        for (a, b) in full.values.iter().zip(&vals) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn partial_path_agrees_with_full_decomposition() {
        let mut rng = SplitMix64::new(17);
        for n in [5, 12, 40, 120] {
            let m = random_sym(n, &mut rng);
            let full = sym_eigen(&m).unwrap();
            for selection in [Selection::Magnitude, Selection::Descending] {
                for k in [1, 2, 3] {
                    let (vals, vecs) = partial_top_k(&m, k, selection).unwrap();
                    let order = select(&full.values, selection);
                    let want = full.vectors.select_columns(&order[..k]);
                    for (j, &o) in order[..k].iter().enumerate() {
                        assert!((vals[j] - full.values[o]).abs() < 1e-12);
                    }
                    assert!(orthonormality_defect(&vecs) < 1e-10);
                    assert!(subspace_distance(&vecs, &want).unwrap() < 1e-8);
                }
            }
        }
    }

    #[test]
    fn partial_path_handles_degenerate_clusters() {
        // Block-structured matrix with an exactly repeated eigenvalue.
        let n = 150;
        let m = SymMatrix::from_upper(n, |i, j| {
            let same = (i < 50) == (j < 50) && (i < 100) == (j < 100);
            if i == j {
                4.0
            } else if same {
                1.0
            } else {
                0.0
            }
        })
        .unwrap();
        let (vals, vecs) = partial_top_k(&m, 3, Selection::Magnitude).unwrap();
        for v in &vals {
            assert!((v - 53.0).abs() < 1e-9);
        }
        assert!(orthonormality_defect(&vecs) < 1e-10);
        let blocks = Matrix::from_fn(n, 3, |i, j| if i / 50 == j { 1.0 / crate::math::sqrt(50.0) } else { 0.0 });
        assert!(subspace_distance(&vecs, &blocks).unwrap() < 1e-8);
    }

    #[test]
    fn deterministic() {
        let mut rng = SplitMix64::new(1);
        let m = random_sym(110, &mut rng);
        let a = top_k_eigenpairs(&m, 3).unwrap();
        let b = top_k_eigenpairs(&m, 3).unwrap();
        assert_eq!(a.0, b.0);
        assert_eq!(a.1, b.1);
    }
}
