//! Expression data to multi-layer network: per-layer Pearson correlation,
//! hard thresholding, a single-pass total-degree filter, and the network
//! diagnostics (components, degree summaries, power-law statistic, scree).

use alloc::collections::BTreeMap;
use alloc::collections::BTreeSet;
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::aggregate::total_degrees;
use crate::linalg::{sym_eigenvalues, Matrix, SymMatrix};
use crate::math::{ln, pearson, sqrt};
use crate::sbm::{AdjacencyMatrix, MultiLayerGraph};
use crate::{Error, Result};

/// Threshold used when none is given.
pub const DEFAULT_TAU: f64 = 0.72;
/// Minimum total degree used when none is given.
pub const DEFAULT_MIN_TOTAL_DEGREE: usize = 90;

/// One layer of expression data: `s` samples (rows) by `g` genes (columns).
#[derive(Debug, Clone, PartialEq)]
pub struct ExpressionLayer {
    gene_ids: Vec<String>,
    samples: Matrix,
}

impl ExpressionLayer {
    /// Requires `s ≥ 3`, unique gene ids matching the column count, and
    /// finite values.
    pub fn new(gene_ids: Vec<String>, samples: Matrix) -> Result<Self> {
        if samples.rows() < 3 {
            return Err(Error::Invalid(format!("need at least 3 samples per layer, got {}", samples.rows())));
        }
        if gene_ids.len() != samples.cols() {
            return Err(Error::Dimension {
                what: "ExpressionLayer",
                detail: format!("{} gene ids for {} columns", gene_ids.len(), samples.cols()),
            });
        }
        let mut seen = BTreeSet::new();
        if let Some(dup) = gene_ids.iter().find(|g| !seen.insert(g.as_str())) {
            return Err(Error::Invalid(format!("duplicate gene id `{dup}`")));
        }
        samples.ensure_finite("expression values")?;
        Ok(Self { gene_ids, samples })
    }

    pub fn gene_ids(&self) -> &[String] {
        &self.gene_ids
    }

    pub fn samples(&self) -> &Matrix {
        &self.samples
    }

    pub fn num_genes(&self) -> usize {
        self.gene_ids.len()
    }

    pub fn num_samples(&self) -> usize {
        self.samples.rows()
    }
}

/// Gene-by-gene Pearson correlation with an exact unit diagonal.
pub fn pearson_correlation(layer: &ExpressionLayer) -> Result<SymMatrix> {
    let x = layer.samples();
    let (s, g) = (x.rows(), x.cols());
    // Columns centered and scaled to unit norm, stored gene-major.
    let mut z = vec![0.0; s * g];
    for j in 0..g {
        let mean = (0..s).map(|i| x[(i, j)]).sum::<f64>() / s as f64;
        let col = &mut z[j * s..(j + 1) * s];
        for (i, c) in col.iter_mut().enumerate() {
            *c = x[(i, j)] - mean;
        }
        let norm = sqrt(col.iter().map(|v| v * v).sum());
        if norm == 0.0 {
            return Err(Error::ZeroVariance { gene: layer.gene_ids()[j].clone() });
        }
        col.iter_mut().for_each(|v| *v /= norm);
    }
    SymMatrix::from_upper(g, |a, b| {
        if a == b {
            1.0
        } else {
            let (za, zb) = (&z[a * s..(a + 1) * s], &z[b * s..(b + 1) * s]);
            za.iter().zip(zb).map(|(p, q)| p * q).sum::<f64>().clamp(-1.0, 1.0)
        }
    })
}

/// Edge `{i, j}` iff `i ≠ j` and `|corr_ij| ≥ tau` (or `> tau` when not
/// `inclusive`).
pub fn threshold_adjacency_with(corr: &SymMatrix, tau: f64, inclusive: bool) -> Result<AdjacencyMatrix> {
    if !(tau > 0.0 && tau <= 1.0) {
        return Err(Error::OutOfRange { what: "threshold tau (must lie in (0, 1])", value: tau });
    }
    let m = corr.as_matrix();
    m.ensure_finite("correlation matrix")?;
    if let Some(&v) = m.as_slice().iter().find(|v| v.abs() > 1.0) {
        return Err(Error::OutOfRange { what: "correlation entry", value: v });
    }
    let n = corr.n();
    let mut edges = Vec::new();
    for i in 0..n {
        for j in (i + 1)..n {
            let a = m[(i, j)].abs();
            if a > tau || (inclusive && a == tau) {
                edges.push((i, j));
            }
        }
    }
    AdjacencyMatrix::from_edges(n, &edges)
}

pub fn threshold_adjacency(corr: &SymMatrix, tau: f64) -> Result<AdjacencyMatrix> {
    threshold_adjacency_with(corr, tau, true)
}

/// Keeps nodes whose total degree across layers is at least `min_total`,
/// computed once on the input; returns the kept original indices (ascending)
/// and every layer restricted to them.
pub fn total_degree_filter(g: &MultiLayerGraph, min_total: usize) -> Result<(Vec<usize>, MultiLayerGraph)> {
    let kept: Vec<usize> =
        total_degrees(g).into_iter().enumerate().filter(|&(_, d)| d >= min_total).map(|(i, _)| i).collect();
    if kept.is_empty() {
        return Err(Error::EmptyResult);
    }
    let layers = g.layers().iter().map(|a| a.induced(&kept)).collect();
    Ok((kept, MultiLayerGraph::new(layers)?))
}

/// Component count and sizes, the latter ordered by each component's
/// smallest node.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Components {
    pub count: usize,
    pub sizes: Vec<usize>,
}

struct UnionFind {
    parent: Vec<usize>,
    rank: Vec<u8>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        Self { parent: (0..n).collect(), rank: vec![0; n] }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return;
        }
        match self.rank[ra].cmp(&self.rank[rb]) {
            core::cmp::Ordering::Less => self.parent[ra] = rb,
            core::cmp::Ordering::Greater => self.parent[rb] = ra,
            core::cmp::Ordering::Equal => {
                self.parent[rb] = ra;
                self.rank[ra] += 1;
            }
        }
    }
}

pub fn connected_components(a: &AdjacencyMatrix) -> Components {
    let n = a.n();
    let mut uf = UnionFind::new(n);
    for (i, j) in a.edges() {
        uf.union(i, j);
    }
    let mut slot = vec![usize::MAX; n];
    let mut sizes = Vec::new();
    for i in 0..n {
        let r = uf.find(i);
        if slot[r] == usize::MAX {
            slot[r] = sizes.len();
            sizes.push(0);
        }
        sizes[slot[r]] += 1;
    }
    Components { count: sizes.len(), sizes }
}

/// `−cor(log p(k), log k)` over the support `{k ≥ 1 : p(k) > 0}`, given
/// `(k, p(k))` pairs.
pub fn powerlaw_stat_from_frequencies(freq: &[(usize, f64)]) -> Result<f64> {
    let support: Vec<(f64, f64)> =
        freq.iter().filter(|&&(k, p)| k >= 1 && p > 0.0).map(|&(k, p)| (ln(k as f64), ln(p))).collect();
    if support.len() < 2 {
        return Err(Error::Undefined("power-law statistic needs at least two positive degrees"));
    }
    let (lk, lp): (Vec<f64>, Vec<f64>) = support.into_iter().unzip();
    pearson(&lp, &lk).map(|r| -r).ok_or(Error::Undefined("degree frequencies are constant on the support"))
}

/// Empirical degree frequencies `p(k) = #{i : dᵢ = k} / n`, without binning.
pub fn degree_frequencies(degrees: &[usize]) -> Vec<(usize, f64)> {
    let mut counts = BTreeMap::new();
    for &d in degrees {
        *counts.entry(d).or_insert(0usize) += 1;
    }
    let n = degrees.len() as f64;
    counts.into_iter().map(|(k, c)| (k, c as f64 / n)).collect()
}

pub fn powerlaw_fit_stat(degrees: &[usize]) -> Result<f64> {
    powerlaw_stat_from_frequencies(&degree_frequencies(degrees))
}

/// Top `max_k` singular values in descending order; for exactly symmetric
/// square input these are the largest `|λ|`.
pub fn scree(m: &Matrix, max_k: usize) -> Result<Vec<f64>> {
    let limit = m.rows().min(m.cols());
    if max_k > limit {
        return Err(Error::Dimension { what: "scree", detail: format!("max_k = {max_k} exceeds {limit}") });
    }
    if max_k == 0 {
        return Ok(Vec::new());
    }
    if m.is_square() && m.max_asymmetry() == 0.0 {
        return scree_sym(&SymMatrix::new(m.clone())?, max_k);
    }
    let gram = if m.rows() <= m.cols() { m.gram_rows() } else { m.gram_cols() };
    let values = sym_eigenvalues(&gram)?;
    Ok(values.into_iter().take(max_k).map(|v| sqrt(v.max(0.0))).collect())
}

pub fn scree_sym(m: &SymMatrix, max_k: usize) -> Result<Vec<f64>> {
    if max_k > m.n() {
        return Err(Error::Dimension { what: "scree", detail: format!("max_k = {max_k} exceeds {}", m.n()) });
    }
    if max_k == 0 {
        return Ok(Vec::new());
    }
    let mut values: Vec<f64> = sym_eigenvalues(m)?.into_iter().map(f64::abs).collect();
    values.sort_by(|a, b| b.total_cmp(a));
    values.truncate(max_k);
    Ok(values)
}

/// Per-layer network summary.
#[derive(Debug, Clone, PartialEq)]
pub struct LayerDiagnostics {
    pub layer: usize,
    pub nodes: usize,
    pub edges: usize,
    pub components: usize,
    pub max_degree: usize,
    /// Mean of the two middle degrees when `nodes` is even.
    pub median_degree: f64,
    /// `None` when the statistic is undefined for this layer.
    pub powerlaw_stat: Option<f64>,
}

pub fn median(sorted: &[usize]) -> f64 {
    match sorted.len() {
        0 => f64::NAN,
        n if n % 2 == 1 => sorted[n / 2] as f64,
        n => 0.5 * (sorted[n / 2 - 1] + sorted[n / 2]) as f64,
    }
}

pub fn layer_diagnostics(layer: usize, a: &AdjacencyMatrix) -> LayerDiagnostics {
    let mut degrees = a.degrees();
    let powerlaw_stat = powerlaw_fit_stat(&degrees).ok();
    degrees.sort_unstable();
    LayerDiagnostics {
        layer,
        nodes: a.n(),
        edges: a.edge_count(),
        components: connected_components(a).count,
        max_degree: degrees.last().copied().unwrap_or(0),
        median_degree: median(&degrees),
        powerlaw_stat,
    }
}

pub fn diagnostics(g: &MultiLayerGraph) -> Vec<LayerDiagnostics> {
    g.layers().iter().enumerate().map(|(l, a)| layer_diagnostics(l, a)).collect()
}
