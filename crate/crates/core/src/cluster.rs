//! Spectral embedding, k-means, the misclustering distance and the
//! end-to-end community estimator.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use crate::aggregate::{bias_adjusted_sos, sum_adjacency, sum_of_squares};
use crate::linalg::{left_singular_from_gram, top_k_eigenpairs, top_k_eigenpairs_signed, Matrix, SymMatrix};
use crate::rng::{substream, SplitMix64};
use crate::sbm::{Membership, MultiLayerGraph};
use crate::{Error, Result};

/// How layers are aggregated before the spectral step.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Method {
    /// Eigenvectors of `Σℓ Aℓ`.
    Sum,
    /// Eigenvectors of `Σℓ Aℓ²`.
    Sos,
    /// Eigenvectors of `Σℓ (Aℓ² − Dℓ)`.
    SosDebias,
    /// Left singular vectors of `[A₁ … A_L]`.
    Matricize,
}

impl Method {
    pub const ALL: [Method; 4] = [Method::Sum, Method::Sos, Method::SosDebias, Method::Matricize];

    pub fn name(self) -> &'static str {
        match self {
            Method::Sum => "sum",
            Method::Sos => "sos",
            Method::SosDebias => "sos_debias",
            Method::Matricize => "matricize",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Method::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| Error::Invalid(format!("unknown method `{s}` (expected sum, sos, sos_debias or matricize)")))
    }
}

/// Which `K` eigenpairs of a symmetric aggregate span the embedding.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum EigenOrder {
    /// Largest `|λ|`.
    #[default]
    Magnitude,
    /// Largest signed `λ`.
    Signed,
}

impl EigenOrder {
    pub fn name(self) -> &'static str {
        match self {
            EigenOrder::Magnitude => "magnitude",
            EigenOrder::Signed => "signed",
        }
    }
}

impl fmt::Display for EigenOrder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for EigenOrder {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "magnitude" => Ok(EigenOrder::Magnitude),
            "signed" => Ok(EigenOrder::Signed),
            _ => Err(Error::Invalid(format!("unknown eigen order `{s}` (expected magnitude or signed)"))),
        }
    }
}

/// Rows of `coords` are the embedded nodes.
#[derive(Debug, Clone)]
pub struct EmbeddingResult {
    /// `n × K`. Unweighted columns are orthonormal; weighted column `j` is
    /// the unweighted one times `|weights[j]|`.
    pub coords: Matrix,
    /// Eigenvalues (signed) or singular values behind each column, in
    /// selection order.
    pub weights: Vec<f64>,
    pub weighted: bool,
}

fn finish(mut coords: Matrix, weights: Vec<f64>, weighted: bool) -> EmbeddingResult {
    if weighted {
        for i in 0..coords.rows() {
            for (x, w) in coords.row_mut(i).iter_mut().zip(&weights) {
                *x *= w.abs();
            }
        }
    }
    EmbeddingResult { coords, weights, weighted }
}

/// Leading-`K` eigenvectors by `|λ|`.
pub fn spectral_embed(m: &SymMatrix, k: usize, weighted: bool) -> Result<EmbeddingResult> {
    spectral_embed_ordered(m, k, weighted, EigenOrder::Magnitude)
}

pub fn spectral_embed_ordered(m: &SymMatrix, k: usize, weighted: bool, order: EigenOrder) -> Result<EmbeddingResult> {
    let (values, vectors) = match order {
        EigenOrder::Magnitude => top_k_eigenpairs(m, k)?,
        EigenOrder::Signed => top_k_eigenpairs_signed(m, k)?,
    };
    Ok(finish(vectors, values, weighted))
}

/// Leading-`K` left singular vectors of a rectangular matrix.
pub fn spectral_embed_rect(m: &Matrix, k: usize, weighted: bool) -> Result<EmbeddingResult> {
    m.ensure_finite("spectral_embed input")?;
    if k == 0 || k > m.rows().min(m.cols()) {
        return Err(Error::Dimension {
            what: "spectral_embed",
            detail: format!("K = {k} exceeds the rank bound of a {}x{} matrix", m.rows(), m.cols()),
        });
    }
    spectral_embed_gram(&m.gram_rows(), k, weighted)
}

/// [`spectral_embed_rect`] for a matrix known only through its row Gram
/// matrix `M·Mᵀ`.
pub fn spectral_embed_gram(gram: &SymMatrix, k: usize, weighted: bool) -> Result<EmbeddingResult> {
    let pairs = left_singular_from_gram(gram, k)?;
    Ok(finish(pairs.vectors, pairs.values, weighted))
}

/// Embedding used by [`estimate_communities`] for each method. The
/// matricized embedding uses `[A₁ … A_L][A₁ … A_L]ᵀ = Σℓ Aℓ²`.
pub fn embed(g: &MultiLayerGraph, k: usize, method: Method, weighted: bool) -> Result<EmbeddingResult> {
    embed_ordered(g, k, method, weighted, EigenOrder::Magnitude)
}

/// [`embed`] with an explicit eigen order. Singular values are nonnegative,
/// so the order does not affect [`Method::Matricize`].
pub fn embed_ordered(
    g: &MultiLayerGraph,
    k: usize,
    method: Method,
    weighted: bool,
    order: EigenOrder,
) -> Result<EmbeddingResult> {
    match method {
        Method::Sum => spectral_embed_ordered(&sum_adjacency(g), k, weighted, order),
        Method::Sos => spectral_embed_ordered(&sum_of_squares(g), k, weighted, order),
        Method::SosDebias => spectral_embed_ordered(&bias_adjusted_sos(g), k, weighted, order),
        Method::Matricize => spectral_embed_gram(&sum_of_squares(g), k, weighted),
    }
}

/// Outcome of the best k-means restart.
#[derive(Debug, Clone)]
pub struct KMeansResult {
    pub labels: Membership,
    /// `K × d`.
    pub centers: Matrix,
    pub sse: f64,
    /// Index of the winning restart.
    pub restart: usize,
    /// Empty-cluster repairs performed in the winning restart.
    pub repairs: usize,
    /// SSE after each Lloyd iteration of the winning restart; non-increasing.
    pub sse_trace: Vec<f64>,
}

/// Lloyd stops once no center moves farther than this.
pub const KMEANS_TOLERANCE: f64 = 1e-8;
pub const KMEANS_MAX_ITERATIONS: usize = 100;
pub const DEFAULT_RESTARTS: usize = 10;

#[inline]
fn sq_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// Best of `restarts` runs of Lloyd's algorithm, each seeded by D²
/// sampling. Restart `r` draws from `substream(seed, [r])`; the minimum SSE
/// wins, ties going to the lower restart index.
pub fn kmeans(points: &Matrix, k: usize, restarts: usize, seed: u64) -> Result<KMeansResult> {
    let n = points.rows();
    if k == 0 || n < k {
        return Err(Error::Infeasible { points: n, clusters: k });
    }
    if restarts == 0 {
        return Err(Error::Invalid("k-means needs at least one restart".into()));
    }
    points.ensure_finite("k-means input")?;
    let mut best: Option<KMeansResult> = None;
    for r in 0..restarts {
        let mut rng = SplitMix64::new(substream(seed, &[r as u64]));
        let run = lloyd(points, seed_centers(points, k, &mut rng), r);
        if best.as_ref().map_or(true, |b| run.sse < b.sse) {
            best = Some(run);
        }
    }
    Ok(best.expect("restarts ≥ 1"))
}

fn seed_centers(points: &Matrix, k: usize, rng: &mut SplitMix64) -> Matrix {
    let (n, d) = (points.rows(), points.cols());
    let mut centers = Matrix::zeros(k, d);
    let first = rng.below(n as u64) as usize;
    centers.row_mut(0).copy_from_slice(points.row(first));
    let mut dist: Vec<f64> = (0..n).map(|i| sq_dist(points.row(i), centers.row(0))).collect();
    for c in 1..k {
        let total: f64 = dist.iter().sum();
        let pick = if total > 0.0 {
            let target = rng.next_f64() * total;
            let mut acc = 0.0;
            let mut pick = n - 1;
            for (i, &w) in dist.iter().enumerate() {
                acc += w;
                if acc > target && w > 0.0 {
                    pick = i;
                    break;
                }
            }
            pick
        } else {
            rng.below(n as u64) as usize
        };
        centers.row_mut(c).copy_from_slice(points.row(pick));
        for (i, di) in dist.iter_mut().enumerate() {
            *di = di.min(sq_dist(points.row(i), centers.row(c)));
        }
    }
    centers
}

fn lloyd(points: &Matrix, mut centers: Matrix, restart: usize) -> KMeansResult {
    let (n, d, k) = (points.rows(), points.cols(), centers.rows());
    let mut labels = vec![0usize; n];
    let mut dist = vec![0.0; n];
    let mut repairs = 0;
    let mut sse_trace = Vec::new();
    let mut sums = Matrix::zeros(k, d);
    let mut counts = vec![0usize; k];
    for _ in 0..KMEANS_MAX_ITERATIONS {
        for i in 0..n {
            let p = points.row(i);
            let (mut bc, mut bd) = (0, f64::INFINITY);
            for c in 0..k {
                let dc = sq_dist(p, centers.row(c));
                if dc < bd {
                    bc = c;
                    bd = dc;
                }
            }
            labels[i] = bc;
            dist[i] = bd;
        }
        counts.iter_mut().for_each(|c| *c = 0);
        for &l in &labels {
            counts[l] += 1;
        }
        // Each empty cluster takes the point farthest from its center among
        // clusters that can spare one.
        while let Some(empty) = counts.iter().position(|&c| c == 0) {
            let far = (0..n)
                .filter(|&i| counts[labels[i]] > 1)
                .fold(None, |acc: Option<usize>, i| match acc {
                    Some(j) if dist[j] >= dist[i] => Some(j),
                    _ => Some(i),
                })
                .expect("n ≥ K leaves a cluster with two points");
            counts[labels[far]] -= 1;
            labels[far] = empty;
            counts[empty] = 1;
            dist[far] = 0.0;
            repairs += 1;
        }

        sums.as_mut_slice().iter_mut().for_each(|x| *x = 0.0);
        for i in 0..n {
            for (s, x) in sums.row_mut(labels[i]).iter_mut().zip(points.row(i)) {
                *s += x;
            }
        }
        let mut movement: f64 = 0.0;
        for c in 0..k {
            let inv = 1.0 / counts[c] as f64;
            let mut shift = 0.0;
            for (ctr, s) in centers.row_mut(c).iter_mut().zip(sums.row(c)) {
                let new = s * inv;
                shift += (new - *ctr) * (new - *ctr);
                *ctr = new;
            }
            movement = movement.max(crate::math::sqrt(shift));
        }
        sse_trace.push((0..n).map(|i| sq_dist(points.row(i), centers.row(labels[i]))).sum());
        if movement < KMEANS_TOLERANCE {
            break;
        }
    }
    let sse = *sse_trace.last().expect("at least one iteration");
    KMeansResult { labels: Membership::new(labels, k).expect("labels < k"), centers, sse, restart, repairs, sse_trace }
}

/// `min_π Σᵢ 1(θᵢ ≠ π(θ̂ᵢ))` and that count divided by `n`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Misclustering {
    pub count: usize,
    pub rate: f64,
}

/// Largest `K` handled by permutation enumeration in [`misclustering`].
pub const EXHAUSTIVE_PERMUTATION_MAX_K: usize = 8;

fn confusion(theta_hat: &Membership, theta: &Membership) -> Result<Vec<Vec<i64>>> {
    if theta_hat.n() != theta.n() {
        return Err(Error::InvalidLabels(format!("{} estimated labels for {} nodes", theta_hat.n(), theta.n())));
    }
    if theta_hat.k() != theta.k() {
        return Err(Error::InvalidLabels(format!(
            "estimate has K = {}, reference has K = {}",
            theta_hat.k(),
            theta.k()
        )));
    }
    let k = theta.k();
    let mut c = vec![vec![0i64; k]; k];
    for (&a, &b) in theta_hat.labels().iter().zip(theta.labels()) {
        c[a][b] += 1;
    }
    Ok(c)
}

fn result(n: usize, agree: i64) -> Misclustering {
    let count = n - agree as usize;
    Misclustering { count, rate: if n == 0 { 0.0 } else { count as f64 / n as f64 } }
}

/// Enumerates permutations for `K ≤ 8` and solves the assignment problem on
/// the confusion matrix otherwise; both give the same optimum.
pub fn misclustering(theta_hat: &Membership, theta: &Membership) -> Result<Misclustering> {
    if theta.k() <= EXHAUSTIVE_PERMUTATION_MAX_K {
        misclustering_exhaustive(theta_hat, theta)
    } else {
        misclustering_matching(theta_hat, theta)
    }
}

/// All `K!` relabelings of `θ̂` (Heap's algorithm).
pub fn misclustering_exhaustive(theta_hat: &Membership, theta: &Membership) -> Result<Misclustering> {
    let c = confusion(theta_hat, theta)?;
    let k = c.len();
    if k > 10 {
        return Err(Error::TooLarge { what: "permutation enumeration K", value: k, cap: 10 });
    }
    let score = |p: &[usize]| (0..k).map(|a| c[a][p[a]]).sum::<i64>();
    let mut perm: Vec<usize> = (0..k).collect();
    let mut best = score(&perm);
    let mut stack = vec![0usize; k];
    let mut i = 1;
    while i < k {
        if stack[i] < i {
            if i % 2 == 0 {
                perm.swap(0, i);
            } else {
                perm.swap(stack[i], i);
            }
            best = best.max(score(&perm));
            stack[i] += 1;
            i = 1;
        } else {
            stack[i] = 0;
            i += 1;
        }
    }
    Ok(result(theta.n(), best))
}

/// Maximum-weight matching on the confusion matrix (Hungarian algorithm).
pub fn misclustering_matching(theta_hat: &Membership, theta: &Membership) -> Result<Misclustering> {
    let c = confusion(theta_hat, theta)?;
    let cost: Vec<Vec<i64>> = c.iter().map(|row| row.iter().map(|&x| -x).collect()).collect();
    let assignment = hungarian(&cost);
    Ok(result(theta.n(), assignment.iter().enumerate().map(|(a, &b)| c[a][b]).sum()))
}

/// Minimum-cost perfect assignment of a square cost matrix via shortest
/// augmenting paths with potentials; returns the column of each row.
pub fn hungarian(cost: &[Vec<i64>]) -> Vec<usize> {
    let n = cost.len();
    const INF: i64 = i64::MAX / 4;
    // 1-based internally; column 0 is the virtual source.
    let mut u = vec![0i64; n + 1];
    let mut v = vec![0i64; n + 1];
    let mut row_of = vec![0usize; n + 1];
    let mut way = vec![0usize; n + 1];
    for i in 1..=n {
        row_of[0] = i;
        let mut j0 = 0;
        let mut minv = vec![INF; n + 1];
        let mut used = vec![false; n + 1];
        loop {
            used[j0] = true;
            let i0 = row_of[j0];
            let mut delta = INF;
            let mut j1 = 0;
            for j in 1..=n {
                if !used[j] {
                    let cur = cost[i0 - 1][j - 1] - u[i0] - v[j];
                    if cur < minv[j] {
                        minv[j] = cur;
                        way[j] = j0;
                    }
                    if minv[j] < delta {
                        delta = minv[j];
                        j1 = j;
                    }
                }
            }
            for j in 0..=n {
                if used[j] {
                    u[row_of[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
            if row_of[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            row_of[j0] = row_of[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }
    let mut col_of = vec![0usize; n];
    for j in 1..=n {
        if row_of[j] > 0 {
            col_of[row_of[j] - 1] = j - 1;
        }
    }
    col_of
}

/// Aggregate, embed, then k-means on the embedded rows.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Estimator {
    pub k: usize,
    pub method: Method,
    pub weighted: bool,
    pub restarts: usize,
    pub order: EigenOrder,
}

impl Estimator {
    pub fn new(k: usize, method: Method) -> Self {
        Self { k, method, weighted: false, restarts: DEFAULT_RESTARTS, order: EigenOrder::Magnitude }
    }

    pub fn order(mut self, order: EigenOrder) -> Self {
        self.order = order;
        self
    }

    pub fn weighted(mut self, weighted: bool) -> Self {
        self.weighted = weighted;
        self
    }

    pub fn restarts(mut self, restarts: usize) -> Self {
        self.restarts = restarts;
        self
    }

    pub fn estimate(&self, g: &MultiLayerGraph, seed: u64) -> Result<Membership> {
        Ok(self.estimate_full(g, seed)?.1.labels)
    }

    /// The embedding together with the k-means outcome.
    pub fn estimate_full(&self, g: &MultiLayerGraph, seed: u64) -> Result<(EmbeddingResult, KMeansResult)> {
        if self.k == 0 || self.k > g.n() {
            return Err(Error::Infeasible { points: g.n(), clusters: self.k });
        }
        let e = embed_ordered(g, self.k, self.method, self.weighted, self.order)?;
        let km = kmeans(&e.coords, self.k, self.restarts, seed)?;
        Ok((e, km))
    }
}

/// [`Estimator`] with the default of ten k-means restarts.
pub fn estimate_communities(
    g: &MultiLayerGraph,
    k: usize,
    method: Method,
    weighted: bool,
    seed: u64,
) -> Result<Membership> {
    Estimator::new(k, method).weighted(weighted).estimate(g, seed)
}
