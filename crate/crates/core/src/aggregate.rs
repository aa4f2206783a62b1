//! Layer aggregation (sum, sum of squares, bias-adjusted sum of squares,
//! matricization) and the population and noise diagnostics built around
//! `Σℓ Aℓ²`.
//!
//! Products of adjacency matrices are accumulated from neighbor lists rather
//! than by dense multiplication: `(A²)ᵢⱼ` counts common neighbors, so each
//! node `k` adds one to every ordered pair of its neighbors. All counts are
//! integers below 2⁵³ and therefore exact in `f64`.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::linalg::{sym_eigenvalues, Matrix, SymMatrix};
use crate::sbm::{population_matrices, AdjacencyMatrix, ModelSpec, MultiLayerGraph};
use crate::{Error, Result};

/// `Σℓ Aℓ`.
pub fn sum_adjacency(g: &MultiLayerGraph) -> SymMatrix {
    let n = g.n();
    let mut out = Matrix::zeros(n, n);
    for a in g.layers() {
        for i in 0..n {
            let row = out.row_mut(i);
            for &j in a.neighbors(i) {
                row[j as usize] += 1.0;
            }
        }
    }
    SymMatrix::from_exact(out)
}

fn add_square(out: &mut Matrix, a: &AdjacencyMatrix) {
    for k in 0..a.n() {
        let nb = a.neighbors(k);
        for &i in nb {
            let row = out.row_mut(i as usize);
            for &j in nb {
                row[j as usize] += 1.0;
            }
        }
    }
}

/// `Σℓ Aℓ²`; the diagonal holds the total degrees `Σℓ dℓ,ᵢ`.
pub fn sum_of_squares(g: &MultiLayerGraph) -> SymMatrix {
    let n = g.n();
    let mut out = Matrix::zeros(n, n);
    for a in g.layers() {
        add_square(&mut out, a);
    }
    SymMatrix::from_exact(out)
}

/// `S₀ = Σℓ (Aℓ² − Dℓ)`, i.e. [`sum_of_squares`] with its diagonal removed.
pub fn bias_adjusted_sos(g: &MultiLayerGraph) -> SymMatrix {
    sum_of_squares(g).without_diagonal()
}

/// The `n × Ln` matrix `[A₁ A₂ … A_L]`.
pub fn matricize(g: &MultiLayerGraph) -> Matrix {
    let n = g.n();
    let l = g.num_layers();
    let mut out = Matrix::zeros(n, n * l);
    for (layer, a) in g.layers().iter().enumerate() {
        for i in 0..n {
            let row = &mut out.row_mut(i)[layer * n..(layer + 1) * n];
            for &j in a.neighbors(i) {
                row[j as usize] = 1.0;
            }
        }
    }
    out
}

/// Total degree `Σℓ dℓ,ᵢ` of every node.
pub fn total_degrees(g: &MultiLayerGraph) -> Vec<usize> {
    let mut d = vec![0; g.n()];
    for a in g.layers() {
        for (i, di) in d.iter_mut().enumerate() {
            *di += a.degree(i);
        }
    }
    d
}

/// Per-layer `K × K` tables from which the population products are read off:
/// node `i` in community `a` and node `j` in `b` give entry `(a, b)`.
struct BlockTables {
    /// `Σℓ (Pℓ²)` off the diagonal.
    offdiag: Matrix,
    /// `Σℓ (Pℓ²)ᵢᵢ`.
    sq_diag: Vec<f64>,
    /// `Σℓ Σⱼ P_{ℓ,ij}`.
    row_sums: Vec<f64>,
}

/// With `Pℓ = Qℓ − diag(qℓ)`, `Qℓ = ρΘBℓΘᵀ` and `N = diag(n_k)`:
/// `(Pℓ²)ᵢⱼ = ρ²[(BNB)_{ab} − B_{ab}(B_{aa} + B_{bb})] + δᵢⱼ ρ² B_{aa}²`.
fn block_tables(spec: &ModelSpec) -> BlockTables {
    let k = spec.k();
    let sizes: Vec<f64> = spec.theta().sizes().into_iter().map(|s| s as f64).collect();
    let rho = spec.rho();
    let mut offdiag = Matrix::zeros(k, k);
    let mut sq_diag = vec![0.0; k];
    let mut row_sums = vec![0.0; k];
    for b in spec.layers() {
        for a in 0..k {
            for c in a..k {
                let bnb: f64 = (0..k).map(|m| b[(a, m)] * sizes[m] * b[(m, c)]).sum();
                let v = rho * rho * (bnb - b[(a, c)] * (b[(a, a)] + b[(c, c)]));
                offdiag[(a, c)] += v;
                if c != a {
                    offdiag[(c, a)] += v;
                }
            }
            let bnb_aa: f64 = (0..k).map(|m| b[(a, m)] * sizes[m] * b[(m, a)]).sum();
            sq_diag[a] += rho * rho * (bnb_aa - b[(a, a)] * b[(a, a)]);
            let row: f64 = (0..k).map(|m| b[(a, m)] * sizes[m]).sum();
            row_sums[a] += rho * (row - b[(a, a)]);
        }
    }
    BlockTables { offdiag, sq_diag, row_sums }
}

fn expand(spec: &ModelSpec, t: &BlockTables, with_degrees: bool) -> SymMatrix {
    let theta = spec.theta().labels();
    let n = spec.n();
    let mut m = Matrix::from_fn(n, n, |i, j| t.offdiag[(theta[i], theta[j])]);
    for i in 0..n {
        let a = theta[i];
        m[(i, i)] = t.sq_diag[a] + if with_degrees { t.row_sums[a] } else { 0.0 };
    }
    SymMatrix::from_exact(m)
}

/// `Σℓ Pℓ²`, the signal term of the decomposition of `Σℓ Aℓ²`.
pub fn population_signal(spec: &ModelSpec) -> SymMatrix {
    expand(spec, &block_tables(spec), false)
}

/// `Σℓ (Pℓ² + D̃ℓ)` with `D̃ℓ = diag(Σⱼ P_{ℓ,ij})`, the expectation of
/// `Σℓ Aℓ²`, together with its spectrum.
#[derive(Debug, Clone)]
pub struct PopulationSos {
    pub matrix: SymMatrix,
    /// All eigenvalues, descending.
    pub values: Vec<f64>,
}

/// The `K`-th eigengap of a spectrum, in both normalizations.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Eigengap {
    /// `(λ_K − λ_{K+1}) / λ_K`.
    pub over_kth: f64,
    /// `(λ_K − λ_{K+1}) / λ_{K+1}`; `None` when `λ_{K+1} = 0`.
    pub over_next: Option<f64>,
}

impl PopulationSos {
    pub fn gap(&self, k: usize) -> Result<Eigengap> {
        eigengap(&self.values, k)
    }
}

/// Gap statistics between the `K`-th and `(K+1)`-th largest eigenvalues of
/// a descending spectrum. Undefined when `λ_K` is not positive.
pub fn eigengap(values: &[f64], k: usize) -> Result<Eigengap> {
    if k == 0 || k >= values.len() {
        return Err(Error::Dimension { what: "eigengap", detail: format!("K = {k} needs 1 ≤ K < {}", values.len()) });
    }
    let (a, b) = (values[k - 1], values[k]);
    if !(a > 0.0) {
        return Err(Error::Undefined("eigengap of a spectrum whose K-th eigenvalue is not positive"));
    }
    Ok(Eigengap { over_kth: (a - b) / a, over_next: (b != 0.0).then(|| (a - b) / b) })
}

pub fn population_sos_with_bias(spec: &ModelSpec) -> Result<PopulationSos> {
    let matrix = expand(spec, &block_tables(spec), true);
    let values = sym_eigenvalues(&matrix)?;
    Ok(PopulationSos { matrix, values })
}

/// `Σℓ Aℓ² = Σℓ Pℓ² + Σℓ (XℓPℓ + PℓXℓ) + S` with `Xℓ = Aℓ − Pℓ` and
/// `S = Σℓ Xℓ²`.
#[derive(Debug, Clone)]
pub struct NoiseDecomposition {
    pub signal: SymMatrix,
    pub linear: SymMatrix,
    pub quadratic: SymMatrix,
}

impl NoiseDecomposition {
    /// `(S₁, S₂)`: the off-diagonal and diagonal parts of the quadratic term.
    pub fn quadratic_split(&self) -> (SymMatrix, SymMatrix) {
        let s1 = self.quadratic.without_diagonal();
        let s2 = SymMatrix::from_exact(Matrix::diagonal(&self.quadratic.diag()));
        (s1, s2)
    }

    /// Entrywise `signal + linear + quadratic`.
    pub fn reconstruct(&self) -> SymMatrix {
        let m = self.signal.as_matrix().add(self.linear.as_matrix()).expect("same shape");
        let m = m.add(self.quadratic.as_matrix()).expect("same shape");
        SymMatrix::from_exact(m)
    }
}

/// `Σℓ AℓPℓ`.
///
/// Since `P` has a zero diagonal, `(AP)ᵢⱼ = Σ_{k ∈ N(i), k ≠ j} ρB_{θₖθⱼ}`,
/// which is `ρ (CB)_{i,θⱼ} − ρ A_{ij} B_{θⱼθⱼ}` with `C_{ic}` the number of
/// neighbors of `i` in community `c`.
pub(crate) fn sum_ap(g: &MultiLayerGraph, spec: &ModelSpec) -> Matrix {
    let n = g.n();
    let k = spec.k();
    let theta = spec.theta().labels();
    let rho = spec.rho();
    let mut ap = Matrix::zeros(n, n);
    let mut cb = vec![0.0; k];
    let mut counts = vec![0.0; k];
    for (a, b) in g.layers().iter().zip(spec.layers()) {
        for i in 0..n {
            counts.iter_mut().for_each(|c| *c = 0.0);
            for &m in a.neighbors(i) {
                counts[theta[m as usize]] += 1.0;
            }
            for (c, out) in cb.iter_mut().enumerate() {
                *out = rho * (0..k).map(|m| counts[m] * b[(m, c)]).sum::<f64>();
            }
            let row = ap.row_mut(i);
            for (x, &t) in row.iter_mut().zip(theta) {
                *x += cb[t];
            }
            for &j in a.neighbors(i) {
                let t = theta[j as usize];
                row[j as usize] -= rho * b[(t, t)];
            }
        }
    }
    ap
}

fn sum_ap_pa(g: &MultiLayerGraph, spec: &ModelSpec) -> Matrix {
    let ap = sum_ap(g, spec);
    ap.add(&ap.transpose()).expect("square")
}

pub fn noise_decomposition(g: &MultiLayerGraph, spec: &ModelSpec) -> Result<NoiseDecomposition> {
    if g.n() != spec.n() || g.num_layers() != spec.num_layers() {
        return Err(Error::Dimension {
            what: "noise_decomposition",
            detail: format!(
                "graph has n = {}, L = {}; model has n = {}, L = {}",
                g.n(),
                g.num_layers(),
                spec.n(),
                spec.num_layers()
            ),
        });
    }
    let signal = population_signal(spec);
    let cross = sum_ap_pa(g, spec);
    let sos = sum_of_squares(g);
    let two_signal = signal.as_matrix().scaled(2.0);
    let linear = cross.sub(&two_signal)?;
    let quadratic = sos.as_matrix().sub(&cross)?.add(signal.as_matrix())?;
    Ok(NoiseDecomposition { linear: SymMatrix::new(linear)?, quadratic: SymMatrix::new(quadratic)?, signal })
}

/// Dense reference computations shared by the unit and integration tests.
#[doc(hidden)]
pub mod dense {
    use super::*;

    pub fn layers(g: &MultiLayerGraph) -> Vec<Matrix> {
        g.layers().iter().map(AdjacencyMatrix::to_dense).collect()
    }

    pub fn sum_of_squares(g: &MultiLayerGraph) -> Matrix {
        let n = g.n();
        layers(g).iter().fold(Matrix::zeros(n, n), |acc, a| acc.add(&a.matmul(a).unwrap()).unwrap())
    }

    /// `(Σ P², Σ (XP + PX), Σ X²)` by explicit dense products.
    pub fn decomposition(g: &MultiLayerGraph, spec: &ModelSpec) -> (Matrix, Matrix, Matrix) {
        let n = g.n();
        let (mut s, mut lin, mut q) = (Matrix::zeros(n, n), Matrix::zeros(n, n), Matrix::zeros(n, n));
        for (a, p) in layers(g).iter().zip(population_matrices(spec)) {
            let p = p.as_matrix();
            let x = a.sub(p).unwrap();
            s.add_assign(&p.matmul(p).unwrap());
            lin.add_assign(&x.matmul(p).unwrap().add(&p.matmul(&x).unwrap()).unwrap());
            q.add_assign(&x.matmul(&x).unwrap());
        }
        (s, lin, q)
    }
}
