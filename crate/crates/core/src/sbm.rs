//! Multi-layer stochastic block models: specification, seeded sampling,
//! population quantities and the brute-force least-squares estimator.
//!
//! Community labels are 0-based (`0..K`) throughout; use
//! [`Membership::from_one_based`] and [`Membership::to_one_based`] at the
//! boundaries where 1-based labels are conventional.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::linalg::{Matrix, SymMatrix};
use crate::rng::SplitMix64;
use crate::{Error, Result};

/// Node-to-community assignment.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Membership {
    labels: Vec<usize>,
    k: usize,
}

impl Membership {
    /// `labels[i] ∈ 0..k` for every node.
    pub fn new(labels: Vec<usize>, k: usize) -> Result<Self> {
        if k == 0 {
            return Err(Error::InvalidLabels("K must be positive".into()));
        }
        if let Some((i, &l)) = labels.iter().enumerate().find(|(_, &l)| l >= k) {
            return Err(Error::InvalidLabels(format!("node {i} has label {l}, expected 0..{k}")));
        }
        Ok(Self { labels, k })
    }

    /// Accepts labels in `1..=k`.
    pub fn from_one_based(labels: &[usize], k: usize) -> Result<Self> {
        if let Some((i, _)) = labels.iter().enumerate().find(|(_, &l)| l == 0) {
            return Err(Error::InvalidLabels(format!("node {i} has label 0, expected 1..={k}")));
        }
        Self::new(labels.iter().map(|l| l - 1).collect(), k)
    }

    /// Contiguous blocks: the first `sizes[0]` nodes in community 0, and so on.
    pub fn from_sizes(sizes: &[usize]) -> Result<Self> {
        let labels = sizes.iter().enumerate().flat_map(|(c, &s)| core::iter::repeat(c).take(s)).collect();
        Self::new(labels, sizes.len())
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.labels.len()
    }

    #[inline]
    pub fn k(&self) -> usize {
        self.k
    }

    #[inline]
    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    #[inline]
    pub fn label(&self, i: usize) -> usize {
        self.labels[i]
    }

    pub fn to_one_based(&self) -> Vec<usize> {
        self.labels.iter().map(|l| l + 1).collect()
    }

    /// Community sizes `n_k`.
    pub fn sizes(&self) -> Vec<usize> {
        let mut s = vec![0; self.k];
        for &l in &self.labels {
            s[l] += 1;
        }
        s
    }

    /// Nodes of community `c`, ascending.
    pub fn members(&self, c: usize) -> Vec<usize> {
        self.labels.iter().enumerate().filter(|(_, &l)| l == c).map(|(i, _)| i).collect()
    }

    /// Relabels nodes: node `i` becomes node `perm[i]`.
    pub fn permuted(&self, perm: &[usize]) -> Membership {
        let mut labels = vec![0; self.n()];
        for (i, &p) in perm.iter().enumerate() {
            labels[p] = self.labels[i];
        }
        Membership { labels, k: self.k }
    }
}

/// A multi-layer SBM: `A_{ℓ,ij} ~ Bernoulli(ρ · B_{ℓ,θᵢθⱼ})` independently for
/// `i < j`.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelSpec {
    theta: Membership,
    rho: f64,
    layers: Vec<SymMatrix>,
}

impl ModelSpec {
    /// Checks `L ≥ 1`, `K × K` layers with finite non-negative entries,
    /// `ρ ∈ [0, 1]`, and `ρ · B_{ℓ,kl} ≤ 1` everywhere.
    pub fn new(theta: Membership, rho: f64, layers: Vec<SymMatrix>) -> Result<Self> {
        if layers.is_empty() {
            return Err(Error::Invalid("a model needs at least one layer".into()));
        }
        if !(0.0..=1.0).contains(&rho) {
            return Err(Error::OutOfRange { what: "rho", value: rho });
        }
        let k = theta.k();
        for (l, b) in layers.iter().enumerate() {
            if b.n() != k {
                return Err(Error::Dimension {
                    what: "ModelSpec::new",
                    detail: format!("layer {l} is {0}x{0}, expected {k}x{k}", b.n()),
                });
            }
            for &v in b.as_matrix().as_slice() {
                if !(v >= 0.0) || rho * v > 1.0 {
                    return Err(Error::InvalidProbability { layer: l, value: rho * v });
                }
            }
        }
        Ok(Self { theta, rho, layers })
    }

    pub fn with_rho(&self, rho: f64) -> Result<Self> {
        Self::new(self.theta.clone(), rho, self.layers.clone())
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.theta.n()
    }

    #[inline]
    pub fn k(&self) -> usize {
        self.theta.k()
    }

    #[inline]
    pub fn num_layers(&self) -> usize {
        self.layers.len()
    }

    #[inline]
    pub fn rho(&self) -> f64 {
        self.rho
    }

    #[inline]
    pub fn theta(&self) -> &Membership {
        &self.theta
    }

    /// The connectivity matrices `Bℓ` (before scaling by `ρ`).
    #[inline]
    pub fn layers(&self) -> &[SymMatrix] {
        &self.layers
    }

    /// `ρ · B_{ℓ,θᵢθⱼ}`.
    #[inline]
    pub fn edge_probability(&self, layer: usize, i: usize, j: usize) -> f64 {
        self.rho * self.layers[layer][(self.theta.label(i), self.theta.label(j))]
    }
}

/// Simple undirected graph stored as sorted neighbor lists.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AdjacencyMatrix {
    offsets: Vec<usize>,
    neighbors: Vec<u32>,
}

impl AdjacencyMatrix {
    fn from_lists(lists: Vec<Vec<u32>>) -> Self {
        let mut offsets = Vec::with_capacity(lists.len() + 1);
        offsets.push(0);
        let mut neighbors = Vec::with_capacity(lists.iter().map(Vec::len).sum());
        for list in lists {
            neighbors.extend_from_slice(&list);
            offsets.push(neighbors.len());
        }
        Self { offsets, neighbors }
    }

    pub fn empty(n: usize) -> Self {
        Self { offsets: vec![0; n + 1], neighbors: Vec::new() }
    }

    /// Builds from an undirected edge list; duplicates and either orientation
    /// are accepted, self-loops and out-of-range endpoints are not.
    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        if n > u32::MAX as usize {
            return Err(Error::TooLarge { what: "node count", value: n, cap: u32::MAX as usize });
        }
        let mut lists = vec![Vec::new(); n];
        for &(i, j) in edges {
            if i >= n || j >= n {
                return Err(Error::Dimension {
                    what: "AdjacencyMatrix::from_edges",
                    detail: format!("edge ({i}, {j}) outside 0..{n}"),
                });
            }
            if i == j {
                return Err(Error::Invalid(format!("self-loop at node {i}")));
            }
            lists[i].push(j as u32);
            lists[j].push(i as u32);
        }
        for list in &mut lists {
            list.sort_unstable();
            list.dedup();
        }
        Ok(Self::from_lists(lists))
    }

    /// Accepts a symmetric 0/1 matrix with zero diagonal.
    pub fn from_dense(m: &Matrix) -> Result<Self> {
        if !m.is_square() {
            return Err(Error::Dimension {
                what: "AdjacencyMatrix::from_dense",
                detail: format!("{}x{} is not square", m.rows(), m.cols()),
            });
        }
        let n = m.rows();
        let mut lists = vec![Vec::new(); n];
        for i in 0..n {
            for j in 0..n {
                let v = m[(i, j)];
                if v != 0.0 && v != 1.0 {
                    return Err(Error::Invalid(format!("entry ({i}, {j}) = {v} is not binary")));
                }
                if v != m[(j, i)] {
                    return Err(Error::Asymmetric { asymmetry: 1.0, tolerance: 0.0 });
                }
                if v == 1.0 {
                    if i == j {
                        return Err(Error::Invalid(format!("self-loop at node {i}")));
                    }
                    lists[i].push(j as u32);
                }
            }
        }
        Ok(Self::from_lists(lists))
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.offsets.len() - 1
    }

    #[inline]
    pub fn neighbors(&self, i: usize) -> &[u32] {
        &self.neighbors[self.offsets[i]..self.offsets[i + 1]]
    }

    #[inline]
    pub fn degree(&self, i: usize) -> usize {
        self.offsets[i + 1] - self.offsets[i]
    }

    pub fn degrees(&self) -> Vec<usize> {
        (0..self.n()).map(|i| self.degree(i)).collect()
    }

    pub fn edge_count(&self) -> usize {
        self.neighbors.len() / 2
    }

    pub fn has_edge(&self, i: usize, j: usize) -> bool {
        self.neighbors(i).binary_search(&(j as u32)).is_ok()
    }

    /// Edges `(i, j)` with `i < j`, in row-major order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.n()).flat_map(move |i| {
            self.neighbors(i).iter().map(|&j| j as usize).filter(move |&j| j > i).map(move |j| (i, j))
        })
    }

    pub fn to_dense(&self) -> Matrix {
        let n = self.n();
        let mut m = Matrix::zeros(n, n);
        for i in 0..n {
            for &j in self.neighbors(i) {
                m[(i, j as usize)] = 1.0;
            }
        }
        m
    }

    /// Node `i` becomes node `perm[i]`.
    pub fn permuted(&self, perm: &[usize]) -> AdjacencyMatrix {
        let n = self.n();
        let mut lists = vec![Vec::new(); n];
        for i in 0..n {
            lists[perm[i]] = self.neighbors(i).iter().map(|&j| perm[j as usize] as u32).collect();
        }
        for list in &mut lists {
            list.sort_unstable();
        }
        Self::from_lists(lists)
    }

    /// Subgraph on `nodes` (ascending, distinct), reindexed `0..nodes.len()`.
    pub fn induced(&self, nodes: &[usize]) -> AdjacencyMatrix {
        let mut index = vec![u32::MAX; self.n()];
        for (new, &old) in nodes.iter().enumerate() {
            index[old] = new as u32;
        }
        let lists = nodes
            .iter()
            .map(|&old| {
                let mut l: Vec<u32> =
                    self.neighbors(old).iter().map(|&j| index[j as usize]).filter(|&j| j != u32::MAX).collect();
                l.sort_unstable();
                l
            })
            .collect();
        Self::from_lists(lists)
    }
}

/// `L ≥ 1` adjacency matrices on a shared node set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MultiLayerGraph {
    layers: Vec<AdjacencyMatrix>,
}

impl MultiLayerGraph {
    pub fn new(layers: Vec<AdjacencyMatrix>) -> Result<Self> {
        let Some(first) = layers.first() else {
            return Err(Error::Invalid("a multi-layer graph needs at least one layer".into()));
        };
        let n = first.n();
        if let Some((l, a)) = layers.iter().enumerate().find(|(_, a)| a.n() != n) {
            return Err(Error::Dimension {
                what: "MultiLayerGraph::new",
                detail: format!("layer {l} has {} nodes, layer 0 has {n}", a.n()),
            });
        }
        Ok(Self { layers })
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.layers[0].n()
    }

    #[inline]
    pub fn num_layers(&self) -> usize {
        self.layers.len()
    }

    #[inline]
    pub fn layers(&self) -> &[AdjacencyMatrix] {
        &self.layers
    }

    #[inline]
    pub fn layer(&self, l: usize) -> &AdjacencyMatrix {
        &self.layers[l]
    }

    pub fn permuted(&self, perm: &[usize]) -> MultiLayerGraph {
        MultiLayerGraph { layers: self.layers.iter().map(|a| a.permuted(perm)).collect() }
    }
}

/// Draws one multi-layer graph.
///
/// A single [`SplitMix64`] stream seeded with `seed` is consumed layer by
/// layer, and within a layer over `i < j` in row-major order; edge `(i, j)` is
/// present when the uniform draw is below `ρ · B_{ℓ,θᵢθⱼ}`.
pub fn sample(spec: &ModelSpec, seed: u64) -> MultiLayerGraph {
    let n = spec.n();
    let theta = spec.theta.labels();
    let mut rng = SplitMix64::new(seed);
    let layers = spec
        .layers
        .iter()
        .map(|b| {
            let k = b.n();
            let probs: Vec<f64> = b.as_matrix().as_slice().iter().map(|v| spec.rho * v).collect();
            // Row i's list receives j > i in ascending order after all of its
            // j < i entries, so the lists come out sorted.
            let mut lists: Vec<Vec<u32>> = vec![Vec::new(); n];
            for i in 0..n {
                let row = &probs[theta[i] * k..(theta[i] + 1) * k];
                for j in (i + 1)..n {
                    if rng.next_f64() < row[theta[j]] {
                        lists[i].push(j as u32);
                        lists[j].push(i as u32);
                    }
                }
            }
            AdjacencyMatrix::from_lists(lists)
        })
        .collect();
    MultiLayerGraph { layers }
}

/// `Pℓ = ρ Θ Bℓ Θᵀ` with the diagonal zeroed, one per layer.
pub fn population_matrices(spec: &ModelSpec) -> Vec<SymMatrix> {
    population_impl(spec, false)
}

/// `Qℓ = ρ Θ Bℓ Θᵀ`, diagonal kept.
pub fn population_q(spec: &ModelSpec) -> Vec<SymMatrix> {
    population_impl(spec, true)
}

fn population_impl(spec: &ModelSpec, keep_diagonal: bool) -> Vec<SymMatrix> {
    let n = spec.n();
    let theta = spec.theta.labels();
    spec.layers
        .iter()
        .map(|b| {
            let m =
                Matrix::from_fn(
                    n,
                    n,
                    |i, j| {
                        if i == j && !keep_diagonal {
                            0.0
                        } else {
                            spec.rho * b[(theta[i], theta[j])]
                        }
                    },
                );
            SymMatrix::from_exact(m)
        })
        .collect()
}

/// Expected degree `Σⱼ P_{ℓ,ij}` of a node in each community, per layer.
pub fn expected_degrees_by_layer(spec: &ModelSpec) -> Vec<Vec<f64>> {
    let sizes = spec.theta.sizes();
    spec.layers
        .iter()
        .map(|b| {
            (0..spec.k())
                .map(|c| {
                    let row: f64 = (0..spec.k()).map(|d| b[(c, d)] * sizes[d] as f64).sum();
                    spec.rho * (row - b[(c, c)])
                })
                .collect()
        })
        .collect()
}

/// Expected degree of a node in each community, averaged over layers.
pub fn expected_degrees(spec: &ModelSpec) -> Vec<f64> {
    let per_layer = expected_degrees_by_layer(spec);
    let l = per_layer.len() as f64;
    (0..spec.k()).map(|c| per_layer.iter().map(|d| d[c]).sum::<f64>() / l).collect()
}

fn ensure_same_n(g: &MultiLayerGraph, psi: &Membership) -> Result<()> {
    if g.n() != psi.n() {
        return Err(Error::Dimension { what: "membership", detail: format!("{} labels for {} nodes", psi.n(), g.n()) });
    }
    Ok(())
}

/// Per-layer edge counts between communities: `counts[ℓ][a·K + b]` for
/// `a ≤ b`, each undirected edge counted once.
fn block_edge_counts(g: &MultiLayerGraph, labels: &[usize], k: usize) -> Vec<Vec<u64>> {
    g.layers
        .iter()
        .map(|a| {
            let mut c = vec![0u64; k * k];
            for (i, j) in a.edges() {
                let (x, y) = (labels[i].min(labels[j]), labels[i].max(labels[j]));
                c[x * k + y] += 1;
            }
            c
        })
        .collect()
}

/// Number of node pairs `{i, j}`, `i ≠ j`, falling in block `(a, b)`.
#[inline]
fn block_pairs(sizes: &[usize], a: usize, b: usize) -> u64 {
    let (na, nb) = (sizes[a] as u64, sizes[b] as u64);
    if a == b {
        na * na.saturating_sub(1) / 2
    } else {
        na * nb
    }
}

fn check_partition(psi: &Membership) -> Result<Vec<usize>> {
    let sizes = psi.sizes();
    if let Some((c, &s)) = sizes.iter().enumerate().find(|(_, &s)| s < 2) {
        return Err(Error::DegeneratePartition { community: c, size: s });
    }
    Ok(sizes)
}

/// Sample block means `B̂ℓ(ψ)`: edge density between two communities, or
/// within one (over its `n_k(n_k − 1)/2` pairs).
pub fn block_means(g: &MultiLayerGraph, psi: &Membership) -> Result<Vec<Matrix>> {
    ensure_same_n(g, psi)?;
    let sizes = check_partition(psi)?;
    let k = psi.k();
    Ok(block_edge_counts(g, psi.labels(), k)
        .into_iter()
        .map(|c| {
            let mut m = Matrix::zeros(k, k);
            for a in 0..k {
                for b in a..k {
                    let v = c[a * k + b] as f64 / block_pairs(&sizes, a, b) as f64;
                    m[(a, b)] = v;
                    m[(b, a)] = v;
                }
            }
            m
        })
        .collect())
}

/// `Σℓ Σ_{i<j} (A_{ℓ,ij} − B̂_{ℓ,ψᵢψⱼ}(ψ))²`.
pub fn least_squares_objective(g: &MultiLayerGraph, psi: &Membership) -> Result<f64> {
    ensure_same_n(g, psi)?;
    let sizes = check_partition(psi)?;
    Ok(objective_from_counts(&block_edge_counts(g, psi.labels(), psi.k()), &sizes, psi.k()))
}

/// With binary entries a block of `c` pairs holding `s` edges contributes
/// `s − s²/c = s(c − s)/c`; blocks without pairs contribute nothing.
fn objective_from_counts(counts: &[Vec<u64>], sizes: &[usize], k: usize) -> f64 {
    let mut total = 0.0;
    for c in counts {
        for a in 0..k {
            for b in a..k {
                let pairs = block_pairs(sizes, a, b);
                if pairs == 0 {
                    continue;
                }
                let s = c[a * k + b];
                total += (s * (pairs - s)) as f64 / pairs as f64;
            }
        }
    }
    total
}

/// Largest `n` accepted by [`exhaustive_least_squares`].
pub const EXHAUSTIVE_MAX_NODES: usize = 16;
/// Largest `K` accepted by [`exhaustive_least_squares`].
pub const EXHAUSTIVE_MAX_COMMUNITIES: usize = 4;

/// Exact least-squares estimate by enumeration.
///
/// Only labelings in canonical form are visited (labels first appear in the
/// order `0, 1, 2, …`), which enumerates each partition exactly once and, in
/// lexicographic order, reaches the lexicographically smallest member of the
/// best class first. Every community must be nonempty; singleton communities
/// are allowed and their (pair-free) diagonal blocks contribute zero.
pub fn exhaustive_least_squares(g: &MultiLayerGraph, k: usize) -> Result<Membership> {
    let n = g.n();
    if n > EXHAUSTIVE_MAX_NODES {
        return Err(Error::TooLarge { what: "exhaustive search node count", value: n, cap: EXHAUSTIVE_MAX_NODES });
    }
    if k > EXHAUSTIVE_MAX_COMMUNITIES {
        return Err(Error::TooLarge {
            what: "exhaustive search community count",
            value: k,
            cap: EXHAUSTIVE_MAX_COMMUNITIES,
        });
    }
    if k == 0 || k > n {
        return Err(Error::Infeasible { points: n, clusters: k });
    }

    let edges: Vec<Vec<(usize, usize)>> = g.layers.iter().map(|a| a.edges().collect()).collect();
    let mut labels = vec![0usize; n];
    let mut best: Option<(f64, Vec<usize>)> = None;
    let mut counts = vec![vec![0u64; k * k]; edges.len()];
    let mut sizes = vec![0usize; k];

    // Canonical labelings in lexicographic order, via an odometer over
    // positions 1..n where position i may use labels up to 1 + max(prefix).
    loop {
        let used = labels.iter().max().map_or(0, |m| m + 1);
        if used == k {
            sizes.iter_mut().for_each(|s| *s = 0);
            for &l in &labels {
                sizes[l] += 1;
            }
            for (c, layer) in counts.iter_mut().zip(&edges) {
                c.iter_mut().for_each(|x| *x = 0);
                for &(i, j) in layer {
                    let (x, y) = (labels[i].min(labels[j]), labels[i].max(labels[j]));
                    c[x * k + y] += 1;
                }
            }
            let obj = objective_from_counts(&counts, &sizes, k);
            if best.as_ref().map_or(true, |(b, _)| obj < b - 1e-12 * (1.0 + b.abs())) {
                best = Some((obj, labels.clone()));
            }
        }
        // Advance.
        let mut pos = n;
        loop {
            if pos <= 1 {
                let (_, labels) = best.expect("k ≤ n guarantees a feasible labeling");
                return Membership::new(labels, k);
            }
            pos -= 1;
            let cap = labels[..pos].iter().max().map_or(0, |m| m + 1).min(k - 1);
            if labels[pos] < cap {
                labels[pos] += 1;
                labels[pos + 1..].iter_mut().for_each(|l| *l = 0);
                break;
            }
        }
    }
}

/// Preset models with the constants of the reference experiments.
pub mod presets {
    use super::*;
    use crate::math::sqrt;

    /// The two connectivity matrices of the two-community demonstration.
    pub fn fig2_matrices() -> [SymMatrix; 2] {
        let r3 = sqrt(3.0);
        let b1 = [[0.75, r3 / 8.0], [r3 / 8.0, 0.5]];
        let b2 = [[0.875, 3.0 * r3 / 8.0], [3.0 * r3 / 8.0, 0.125]];
        [sym(&b1), sym(&b2)]
    }

    /// Two communities of 100 nodes, 30 layers, each layer's `B` drawn
    /// uniformly from [`fig2_matrices`] with the given seed.
    pub fn fig2demo(rho: f64, layer_seed: u64) -> Result<ModelSpec> {
        fig2demo_with(200, 30, rho, layer_seed)
    }

    /// [`fig2demo`] with `n` nodes split evenly and `L` layers.
    pub fn fig2demo_with(n: usize, layers: usize, rho: f64, layer_seed: u64) -> Result<ModelSpec> {
        let [b1, b2] = fig2_matrices();
        let mut rng = SplitMix64::new(layer_seed);
        let layers = (0..layers).map(|_| if rng.below(2) == 0 { b1.clone() } else { b2.clone() }).collect();
        ModelSpec::new(Membership::from_sizes(&[n / 2, n - n / 2])?, rho, layers)
    }

    /// The orthogonal eigenbasis shared by the two layer types of [`fig3`].
    pub fn fig3_basis() -> Matrix {
        let r = core::f64::consts::FRAC_1_SQRT_2;
        Matrix::from_rows(&[[0.5, 0.5, -r], [0.5, 0.5, r], [r, -r, 0.0]]).expect("3x3")
    }

    /// `W · diag(1.5, 0.2, third) · Wᵀ`.
    pub fn fig3_matrix(third: f64) -> SymMatrix {
        let w = fig3_basis();
        let b = w.matmul(&Matrix::diagonal(&[1.5, 0.2, third])).and_then(|m| m.matmul(&w.transpose())).expect("3x3");
        SymMatrix::new(b).expect("symmetric by construction")
    }

    /// Both layer types of [`fig3`]: third eigenvalue `+0.4`, then `−0.4`.
    pub fn fig3_matrices() -> [SymMatrix; 2] {
        [fig3_matrix(0.4), fig3_matrix(-0.4)]
    }

    /// Three communities of 200, 50 and 250 nodes; 100 layers, the first 50
    /// of the first type and the rest of the second.
    pub fn fig3(rho: f64) -> Result<ModelSpec> {
        fig3_with_sizes(&[200, 50, 250], 100, rho)
    }

    /// [`fig3`] scaled to `n` nodes (proportions 0.4, 0.1, 0.5) and `L` layers.
    pub fn fig3_scaled(n: usize, layers: usize, rho: f64) -> Result<ModelSpec> {
        let a = (n * 2) / 5;
        let b = n / 10;
        fig3_with_sizes(&[a, b, n - a - b], layers, rho)
    }

    fn fig3_with_sizes(sizes: &[usize], layers: usize, rho: f64) -> Result<ModelSpec> {
        let [b1, b2] = fig3_matrices();
        let half = layers / 2;
        let layers = (0..layers).map(|l| if l < half { b1.clone() } else { b2.clone() }).collect();
        ModelSpec::new(Membership::from_sizes(sizes)?, rho, layers)
    }

    fn sym(rows: &[[f64; 2]; 2]) -> SymMatrix {
        SymMatrix::new(Matrix::from_rows(rows).expect("2x2")).expect("symmetric")
    }
}
