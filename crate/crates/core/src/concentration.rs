//! Concentration of linear and quadratic matrix forms in independent noise:
//! σ-profiles, Bernstein parameters, the `S₁/S₂` split of `Σℓ XℓGℓXℓᵀ`,
//! evaluation of the tail and norm bounds, Monte-Carlo operator-norm studies
//! and the degree counting checks.
//!
//! Theorem constants are never fixed here; every bound takes `C` explicitly.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use crate::aggregate::{population_signal, sum_adjacency, sum_ap, sum_of_squares, total_degrees};
use crate::linalg::{operator_norm, sym_operator_norm, Matrix, SymMatrix};
use crate::math::{exp, ln, sqrt};
use crate::rng::substream;
use crate::sbm::{sample, Membership, ModelSpec, MultiLayerGraph};
use crate::{Error, Result};

/// `Y` is `(v, R)`-Bernstein when `E|Y|ᵏ ≤ (v/2)·k!·R^{k−2}` for all `k ≥ 2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BernsteinParams {
    pub v: f64,
    pub r: f64,
}

impl BernsteinParams {
    pub fn new(v: f64, r: f64) -> Result<Self> {
        for (what, x) in [("Bernstein v", v), ("Bernstein R", r)] {
            if !(x >= 0.0) || !x.is_finite() {
                return Err(Error::OutOfRange { what, value: x });
            }
        }
        Ok(Self { v, r })
    }

    pub const ZERO: BernsteinParams = BernsteinParams { v: 0.0, r: 0.0 };

    /// `(v/2)·k!·R^{k−2}`.
    pub fn moment_bound(&self, k: u32) -> f64 {
        let mut fact = 1.0;
        for i in 2..=k {
            fact *= i as f64;
        }
        0.5 * self.v * fact * crate::math::powi(self.r, k - 2)
    }
}

/// Bernstein parameters of a centered Bernoulli(`p`) entry `Y`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BernoulliBernstein {
    /// For `Y`.
    pub linear: BernsteinParams,
    /// For `Y²`.
    pub squared: BernsteinParams,
    /// For `Y·Ỹ` with `Ỹ` an independent copy.
    pub product: BernsteinParams,
}

/// `(2p, 1)`, `(2p, 1)` and `(2p², 1)` for `p ≤ 1/2`.
pub fn bernoulli_bernstein(p: f64) -> Result<BernoulliBernstein> {
    if !(0.0..=0.5).contains(&p) {
        return Err(Error::OutOfRange { what: "Bernoulli parameter (must lie in [0, 1/2])", value: p });
    }
    Ok(BernoulliBernstein {
        linear: BernsteinParams { v: 2.0 * p, r: 1.0 },
        squared: BernsteinParams { v: 2.0 * p, r: 1.0 },
        product: BernsteinParams { v: 2.0 * p * p, r: 1.0 },
    })
}

/// `E|Y|ᵏ = p(1−p)ᵏ + (1−p)pᵏ` for `Y = B − p`, `B ~ Bernoulli(p)`.
pub fn centered_bernoulli_abs_moment(p: f64, k: u32) -> f64 {
    use crate::math::powi;
    p * powi(1.0 - p, k) + (1.0 - p) * powi(p, k)
}

/// Outcome of [`verify_bernstein`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BernsteinCheck {
    pub passed: bool,
    /// Smallest `k` with `E|Y|ᵏ` above the bound.
    pub first_violation: Option<u32>,
}

/// Checks the Bernstein moment inequality for `k = 2..=k_max`, given exact
/// absolute moments `k ↦ E|Y|ᵏ`. A relative slack of `1e-12` absorbs rounding
/// at equality.
pub fn verify_bernstein(moments: impl Fn(u32) -> f64, params: BernsteinParams, k_max: u32) -> Result<BernsteinCheck> {
    if k_max < 2 {
        return Err(Error::OutOfRange { what: "k_max (must be at least 2)", value: k_max as f64 });
    }
    for k in 2..=k_max {
        let m = moments(k);
        if !m.is_finite() {
            return Err(Error::NonFinite { what: "moment" });
        }
        let bound = params.moment_bound(k);
        if m > bound * (1.0 + 1e-12) {
            return Ok(BernsteinCheck { passed: false, first_violation: Some(k) });
        }
    }
    Ok(BernsteinCheck { passed: true, first_violation: None })
}

/// Norm summaries of a coefficient sequence `G₁ … G_L`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SigmaProfile {
    /// `(Σℓ ‖Gℓ‖²)^{1/2}`.
    pub sigma1: f64,
    /// `maxℓ max(‖Gℓ‖_{2,∞}, ‖Gℓᵀ‖_{2,∞})`.
    pub sigma2: f64,
    /// `(Σℓ Σⱼ G²ℓ,jj)^{1/2}`.
    pub sigma2_prime: f64,
    /// `maxℓ maxᵢⱼ |Gℓ,ij|`.
    pub sigma3: f64,
    /// `(Σℓ ‖Gℓ‖_F²)^{1/2}`.
    pub sigma1_prime: f64,
}

fn ensure_shapes(what: &'static str, ms: &[Matrix], rows: usize, cols: usize) -> Result<()> {
    if let Some((l, m)) = ms.iter().enumerate().find(|(_, m)| m.rows() != rows || m.cols() != cols) {
        return Err(Error::Dimension {
            what,
            detail: format!("matrix {l} is {}x{}, expected {rows}x{cols}", m.rows(), m.cols()),
        });
    }
    Ok(())
}

fn nonempty<'a>(what: &'static str, ms: &'a [Matrix]) -> Result<&'a Matrix> {
    ms.first().ok_or_else(|| Error::Dimension { what, detail: "empty sequence".into() })
}

pub fn sigma_profile(gs: &[Matrix]) -> Result<SigmaProfile> {
    let first = nonempty("sigma_profile", gs)?;
    ensure_shapes("sigma_profile", gs, first.rows(), first.cols())?;
    let (mut s1, mut s2, mut s2p, mut s3, mut s1p) = (0.0, 0.0f64, 0.0, 0.0f64, 0.0);
    for g in gs {
        let op = operator_norm(g)?;
        s1 += op * op;
        s2 = s2.max(g.max_row_norm()).max(g.max_col_norm());
        for j in 0..g.rows().min(g.cols()) {
            s2p += g[(j, j)] * g[(j, j)];
        }
        s3 = s3.max(g.max_abs());
        s1p += g.as_slice().iter().map(|x| x * x).sum::<f64>();
    }
    Ok(SigmaProfile { sigma1: sqrt(s1), sigma2: s2, sigma2_prime: sqrt(s2p), sigma3: s3, sigma1_prime: sqrt(s1p) })
}

/// `S = Σℓ XℓGℓXℓᵀ = S₁ + S₂`.
#[derive(Debug, Clone)]
pub struct QuadraticSplit {
    pub s: Matrix,
    /// Mean-zero cross terms.
    pub s1: Matrix,
    /// Terms pairing an entry with itself (or its mirror image).
    pub s2: Matrix,
}

fn sum_xgy(xs: &[Matrix], gs: &[Matrix], ys: &[Matrix]) -> Result<Matrix> {
    let n = xs[0].rows();
    let mut s = Matrix::zeros(n, n);
    for ((x, g), y) in xs.iter().zip(gs).zip(ys) {
        s.add_assign(&x.matmul(g)?.matmul(&y.transpose())?);
    }
    Ok(s)
}

fn check_pair(what: &'static str, xs: &[Matrix], gs: &[Matrix]) -> Result<(usize, usize)> {
    let x0 = nonempty(what, xs)?;
    if xs.len() != gs.len() {
        return Err(Error::Dimension { what, detail: format!("{} X matrices but {} G matrices", xs.len(), gs.len()) });
    }
    let (n, r) = (x0.rows(), x0.cols());
    ensure_shapes(what, xs, n, r)?;
    ensure_shapes(what, gs, r, r)?;
    Ok((n, r))
}

/// Symmetric noise: `S₂` collects, for every `i < j`, the four terms in
/// which `X_ij` meets itself or its mirror `X_ji`, plus `X²ᵢᵢ eᵢeᵢᵀ Gᵢᵢ`.
/// `xtilde` replaces the second factor (decoupling); `None` means `X` itself.
fn split_sym(xs: &[Matrix], xtilde: Option<&[Matrix]>, gs: &[Matrix]) -> Result<QuadraticSplit> {
    let (n, r) = check_pair("quadratic_split_sym", xs, gs)?;
    if n != r {
        return Err(Error::Dimension { what: "quadratic_split_sym", detail: format!("X is {n}x{r}, not square") });
    }
    for x in xs.iter().chain(xtilde.unwrap_or(&[]).iter()) {
        let asym = x.max_asymmetry();
        if asym != 0.0 {
            return Err(Error::Asymmetric { asymmetry: asym, tolerance: 0.0 });
        }
    }
    let ys = xtilde.unwrap_or(xs);
    ensure_shapes("quadratic_split_sym", ys, n, n)?;
    if ys.len() != xs.len() {
        return Err(Error::Dimension { what: "decoupled_stat", detail: "X and X̃ differ in length".into() });
    }
    let s = sum_xgy(xs, gs, ys)?;
    let mut s2 = Matrix::zeros(n, n);
    for ((x, y), g) in xs.iter().zip(ys).zip(gs) {
        for i in 0..n {
            s2[(i, i)] += x[(i, i)] * y[(i, i)] * g[(i, i)];
            for j in (i + 1)..n {
                let w = x[(i, j)] * y[(i, j)];
                if w == 0.0 {
                    continue;
                }
                s2[(i, i)] += w * g[(j, j)];
                s2[(j, j)] += w * g[(i, i)];
                s2[(i, j)] += w * g[(j, i)];
                s2[(j, i)] += w * g[(i, j)];
            }
        }
    }
    let s1 = s.sub(&s2)?;
    Ok(QuadraticSplit { s, s1, s2 })
}

/// Asymmetric `n × r` noise: `S₂ = Σℓ Σᵢⱼ X²ℓ,ij eᵢeᵢᵀ Gℓ,jj`.
fn split_asym(xs: &[Matrix], xtilde: Option<&[Matrix]>, gs: &[Matrix]) -> Result<QuadraticSplit> {
    let (n, r) = check_pair("quadratic_split_asym", xs, gs)?;
    let ys = xtilde.unwrap_or(xs);
    ensure_shapes("quadratic_split_asym", ys, n, r)?;
    if ys.len() != xs.len() {
        return Err(Error::Dimension { what: "decoupled_stat", detail: "X and X̃ differ in length".into() });
    }
    let s = sum_xgy(xs, gs, ys)?;
    let mut s2 = Matrix::zeros(n, n);
    for ((x, y), g) in xs.iter().zip(ys).zip(gs) {
        for i in 0..n {
            s2[(i, i)] += (0..r).map(|j| x[(i, j)] * y[(i, j)] * g[(j, j)]).sum::<f64>();
        }
    }
    let s1 = s.sub(&s2)?;
    Ok(QuadraticSplit { s, s1, s2 })
}

pub fn quadratic_split_sym(xs: &[Matrix], gs: &[Matrix]) -> Result<QuadraticSplit> {
    split_sym(xs, None, gs)
}

pub fn quadratic_split_asym(xs: &[Matrix], gs: &[Matrix]) -> Result<QuadraticSplit> {
    split_asym(xs, None, gs)
}

/// `S̃ = Σℓ XℓGℓX̃ℓᵀ` split as in the quadratic case with `X²` replaced by
/// the entrywise product `X·X̃`.
pub fn decoupled_stat(xs: &[Matrix], xtilde: &[Matrix], gs: &[Matrix], symmetric: bool) -> Result<QuadraticSplit> {
    if symmetric {
        split_sym(xs, Some(xtilde), gs)
    } else {
        split_asym(xs, Some(xtilde), gs)
    }
}

/// Norm summaries of `H₁ … H_L` entering the linear tail bound.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinearStats {
    /// `‖Σℓ HℓᵀHℓ‖`.
    pub opnorm_sum_hth: f64,
    /// `Σℓ ‖Hℓ‖_F²`.
    pub frob_sq_sum: f64,
    /// `maxℓ ‖Hℓ‖_{2,∞}`.
    pub max_row_norm: f64,
}

pub fn linear_bound_stats(hs: &[Matrix]) -> Result<LinearStats> {
    let first = nonempty("linear_bound_stats", hs)?;
    ensure_shapes("linear_bound_stats", hs, first.rows(), first.cols())?;
    let m = first.cols();
    let mut hth = Matrix::zeros(m, m);
    let (mut frob, mut row) = (0.0, 0.0f64);
    for h in hs {
        hth.add_assign(h.gram_cols().as_matrix());
        frob += h.as_slice().iter().map(|x| x * x).sum::<f64>();
        row = row.max(h.max_row_norm());
    }
    Ok(LinearStats { opnorm_sum_hth: sym_operator_norm(&SymMatrix::new(hth)?)?, frob_sq_sum: frob, max_row_norm: row })
}

fn linear_tail(t: f64, n: usize, stats: &LinearStats, p: BernsteinParams, num: f64, pre: f64) -> Result<f64> {
    if !(t > 0.0) {
        return Err(Error::OutOfRange { what: "t (must be positive)", value: t });
    }
    let var = p.v * (n as f64 * stats.opnorm_sum_hth).max(stats.frob_sq_sum);
    let denom = var + p.r * stats.max_row_norm * t;
    let e = if denom == 0.0 { 0.0 } else { exp(-(t * t / num) / denom) };
    Ok(pre * e)
}

/// `P(‖Σℓ XℓHℓ‖ ≥ t)` bound for independent `n × r` noise and `r × m`
/// coefficients: `2(m+n)·exp(−(t²/2)/(v·max(n‖ΣHᵀH‖, Σ‖H‖_F²) + R·max‖H‖_{2,∞}·t))`.
pub fn bound_linear(t: f64, n: usize, m: usize, params: BernsteinParams, stats: &LinearStats) -> Result<f64> {
    linear_tail(t, n, stats, params, 2.0, 2.0 * (m + n) as f64)
}

/// The symmetric-noise variant: `t²/8` in place of `t²/2` and prefactor
/// `4(m+n)`.
pub fn bound_linear_symmetric(t: f64, n: usize, m: usize, params: BernsteinParams, stats: &LinearStats) -> Result<f64> {
    linear_tail(t, n, stats, params, 8.0, 4.0 * (m + n) as f64)
}

/// `C·L^{1/2}·ρ·n·log^{1/2}(L + n)`.
pub fn bound_s1_sparse(l: usize, n: usize, rho: f64, c: f64) -> f64 {
    c * sqrt(l as f64) * rho * n as f64 * sqrt(ln((l + n) as f64))
}

/// Bernstein parameters of the noise entries.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseParams {
    /// `(v₁, R₁)` for the entries themselves.
    pub first: BernsteinParams,
    /// `(v₂, R₂)` for their squares.
    pub squared: BernsteinParams,
    /// `(v₂′, R₂′)` for products with an independent copy.
    pub product: BernsteinParams,
}

impl NoiseParams {
    pub fn bernoulli(p: f64) -> Result<Self> {
        let b = bernoulli_bernstein(p)?;
        Ok(Self { first: b.linear, squared: b.squared, product: b.product })
    }
}

/// The right-hand sides of the quadratic-form bounds, and the individual
/// terms of the `S₁` bound (each already multiplied by `C`).
#[derive(Debug, Clone, PartialEq)]
pub struct QuadraticBounds {
    pub s1: f64,
    pub s2: f64,
    pub total: f64,
    pub s1_terms: Vec<f64>,
}

/// Symmetric `n × n` noise, with `log = ln(L + n)`:
///
/// * `‖S₁‖ ≤ C[v₁n·log·σ₁ + √v₁R₁√(Ln)·log^{3/2}·σ₂ + √v₂′·log·(√Lσ₂ + σ₂′) + (R₁² + R₂′)·log²·σ₃]`
/// * `‖S₂ − ES₂‖ ≤ C[√v₂·log·(√Lσ₂ + σ₂′) + R₂·log·σ₃]`
/// * `‖S − ES‖ ≤ C[v₁n·log·σ₁ + √v₁R₁√(Ln)·log^{3/2}·σ₂ + √(v₂′+v₂)·log·(√Lσ₂ + σ₂′) + (R₁² + R₂ + R₂′)·log²·σ₃]`
pub fn bound_quadratic_sym(l: usize, n: usize, p: &NoiseParams, s: &SigmaProfile, c: f64) -> QuadraticBounds {
    let (lf, nf) = (l as f64, n as f64);
    let lg = ln(lf + nf);
    let (v1, r1) = (p.first.v, p.first.r);
    let (v2, r2) = (p.squared.v, p.squared.r);
    let (v2p, r2p) = (p.product.v, p.product.r);
    let spread = sqrt(lf) * s.sigma2 + s.sigma2_prime;
    let s1_terms = vec![
        c * v1 * nf * lg * s.sigma1,
        c * sqrt(v1) * r1 * sqrt(lf * nf) * lg * sqrt(lg) * s.sigma2,
        c * sqrt(v2p) * lg * spread,
        c * (r1 * r1 + r2p) * lg * lg * s.sigma3,
    ];
    let s2 = c * (sqrt(v2) * lg * spread + r2 * lg * s.sigma3);
    let total =
        s1_terms[0] + s1_terms[1] + c * sqrt(v2p + v2) * lg * spread + c * (r1 * r1 + r2 + r2p) * lg * lg * s.sigma3;
    QuadraticBounds { s1: s1_terms.iter().sum(), s2, total, s1_terms }
}

/// Asymmetric `n × r` noise:
///
/// * `‖S₁‖ ≤ C[v₁n·log·σ₁ + v₁√n·log·σ₁′ + √v₁R₁√(nL)·log^{3/2}·σ₂ + √v₂′·log·σ₂′ + (R₁² + R₂′)·log²·σ₃]`
/// * `‖S₂ − ES₂‖ ≤ C[√(v₂·log)·σ₂′ + R₂·log·σ₃]`
///
/// `total` is the sum of the two.
pub fn bound_quadratic_asym(l: usize, n: usize, p: &NoiseParams, s: &SigmaProfile, c: f64) -> QuadraticBounds {
    let (lf, nf) = (l as f64, n as f64);
    let lg = ln(lf + nf);
    let (v1, r1) = (p.first.v, p.first.r);
    let (v2, r2) = (p.squared.v, p.squared.r);
    let (v2p, r2p) = (p.product.v, p.product.r);
    let s1_terms = vec![
        c * v1 * nf * lg * s.sigma1,
        c * v1 * sqrt(nf) * lg * s.sigma1_prime,
        c * sqrt(v1) * r1 * sqrt(nf * lf) * lg * sqrt(lg) * s.sigma2,
        c * sqrt(v2p) * lg * s.sigma2_prime,
        c * (r1 * r1 + r2p) * lg * lg * s.sigma3,
    ];
    let s1: f64 = s1_terms.iter().sum();
    let s2 = c * (sqrt(v2 * lg) * s.sigma2_prime + r2 * lg * s.sigma3);
    QuadraticBounds { s1, s2, total: s1 + s2, s1_terms }
}

/// Monte-Carlo statistics of symmetric Erdős–Rényi noise `Xℓ = Aℓ − ρ(J − I)`
/// with `Gℓ = I`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Statistic {
    /// `‖S₁‖`.
    S1,
    /// `‖S₂ − ES₂‖`.
    S2Centered,
    /// `‖Σℓ XℓPℓ‖`.
    Linear,
    /// `‖S̃₁‖` with an independent copy `X̃ℓ`.
    DecoupledS1,
}

impl Statistic {
    pub const ALL: [Statistic; 4] = [Statistic::S1, Statistic::S2Centered, Statistic::Linear, Statistic::DecoupledS1];

    pub fn name(self) -> &'static str {
        match self {
            Statistic::S1 => "s1",
            Statistic::S2Centered => "s2_centered",
            Statistic::Linear => "linear",
            Statistic::DecoupledS1 => "decoupled_s1",
        }
    }
}

impl fmt::Display for Statistic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Statistic {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Statistic::ALL.into_iter().find(|x| x.name() == s).ok_or_else(|| {
            Error::Invalid(format!("unknown statistic `{s}` (expected s1, s2_centered, linear or decoupled_s1)"))
        })
    }
}

/// `L` independent Erdős–Rényi(`ρ`) layers on `n` nodes.
pub fn erdos_renyi_spec(n: usize, l: usize, rho: f64) -> Result<ModelSpec> {
    ModelSpec::new(Membership::from_sizes(&[n])?, rho, vec![SymMatrix::identity(1); l])
}

/// `Lρ²((n−2)J + I) = Σℓ P²` for `P = ρ(J − I)`.
#[inline]
fn p_squared(n: usize, l: usize, rho: f64, i: usize, j: usize) -> f64 {
    let base = l as f64 * rho * rho * (n as f64 - 2.0);
    if i == j {
        base + l as f64 * rho * rho
    } else {
        base
    }
}

/// `Σℓ Xℓ²` for `Xℓ = Aℓ − ρ(J − I)`:
/// `ΣA² − ρ(d1ᵀ + 1dᵀ − 2ΣA) + Lρ²((n−2)J + I)` with `d` the total degrees.
pub fn er_quadratic(g: &MultiLayerGraph, rho: f64) -> Matrix {
    let n = g.n();
    let l = g.num_layers();
    let sos = sum_of_squares(g);
    let sa = sum_adjacency(g);
    let d: Vec<f64> = total_degrees(g).into_iter().map(|x| x as f64).collect();
    Matrix::from_fn(n, n, |i, j| sos[(i, j)] - rho * (d[i] + d[j] - 2.0 * sa[(i, j)]) + p_squared(n, l, rho, i, j))
}

/// `Σℓ XℓP` for `P = ρ(J − I)`: `ρ(d1ᵀ − ΣA) − Lρ²((n−2)J + I)`.
pub fn er_linear(g: &MultiLayerGraph, rho: f64) -> Matrix {
    let n = g.n();
    let l = g.num_layers();
    let sa = sum_adjacency(g);
    let d: Vec<f64> = total_degrees(g).into_iter().map(|x| x as f64).collect();
    Matrix::from_fn(n, n, |i, j| rho * (d[i] - sa[(i, j)]) - p_squared(n, l, rho, i, j))
}

/// `Σℓ XℓX̃ℓ` with `X̃ℓ = Ãℓ − ρ(J − I)` from an independent graph:
/// `ΣAÃ − ρ(d1ᵀ − ΣA) − ρ(1d̃ᵀ − ΣÃ) + Lρ²((n−2)J + I)`.
pub fn er_decoupled(g: &MultiLayerGraph, h: &MultiLayerGraph, rho: f64) -> Matrix {
    let n = g.n();
    let l = g.num_layers();
    let mut prod = Matrix::zeros(n, n);
    for (a, b) in g.layers().iter().zip(h.layers()) {
        for k in 0..n {
            for &i in a.neighbors(k) {
                let row = prod.row_mut(i as usize);
                for &j in b.neighbors(k) {
                    row[j as usize] += 1.0;
                }
            }
        }
    }
    let (sa, sb) = (sum_adjacency(g), sum_adjacency(h));
    let d: Vec<f64> = total_degrees(g).into_iter().map(|x| x as f64).collect();
    let e: Vec<f64> = total_degrees(h).into_iter().map(|x| x as f64).collect();
    Matrix::from_fn(n, n, |i, j| {
        prod[(i, j)] - rho * (d[i] - sa[(i, j)]) - rho * (e[j] - sb[(i, j)]) + p_squared(n, l, rho, i, j)
    })
}

/// `(ES₂)ᵢᵢ = Σℓ Σⱼ p_{ℓ,ij}(1 − p_{ℓ,ij})` for `Gℓ = I` and independent
/// Bernoulli entries with the given means.
pub fn expected_s2_identity(populations: &[SymMatrix]) -> Vec<f64> {
    let n = populations.first().map_or(0, SymMatrix::n);
    let mut out = vec![0.0; n];
    for p in populations {
        for (i, o) in out.iter_mut().enumerate() {
            *o += p.as_matrix().row(i).iter().map(|q| q * (1.0 - q)).sum::<f64>();
        }
    }
    out
}

fn without_diagonal(mut m: Matrix) -> Matrix {
    for i in 0..m.rows().min(m.cols()) {
        m[(i, i)] = 0.0;
    }
    m
}

/// One replicate of `statistic` on `n` nodes and `L` layers at density `ρ`.
/// The noise is drawn from `seed`; the decoupled copy from `substream(seed, [1])`.
pub fn mc_replicate(statistic: Statistic, n: usize, l: usize, rho: f64, seed: u64) -> Result<f64> {
    let spec = erdos_renyi_spec(n, l, rho)?;
    let g = sample(&spec, seed);
    match statistic {
        Statistic::S1 => sym_operator_norm(&SymMatrix::new(without_diagonal(er_quadratic(&g, rho)))?),
        Statistic::S2Centered => {
            let s = er_quadratic(&g, rho);
            let mean = l as f64 * (n as f64 - 1.0) * rho * (1.0 - rho);
            Ok((0..n).map(|i| (s[(i, i)] - mean).abs()).fold(0.0, f64::max))
        }
        Statistic::Linear => operator_norm(&er_linear(&g, rho)),
        Statistic::DecoupledS1 => {
            let h = sample(&spec, substream(seed, &[1]));
            operator_norm(&without_diagonal(er_decoupled(&g, &h, rho)))
        }
    }
}

/// Grid and replicate counts of a Monte-Carlo study.
#[derive(Debug, Clone, PartialEq)]
pub struct McConfig {
    pub statistic: Statistic,
    pub n: usize,
    pub l_grid: Vec<usize>,
    pub rho_grid: Vec<f64>,
    pub reps: usize,
    pub seed: u64,
}

impl McConfig {
    pub fn validate(&self) -> Result<()> {
        if self.reps == 0 {
            return Err(Error::Invalid("reps must be at least 1".into()));
        }
        if self.n < 2 {
            return Err(Error::Invalid("n must be at least 2".into()));
        }
        if self.l_grid.is_empty() || self.l_grid.contains(&0) {
            return Err(Error::Invalid("L grid must be nonempty with positive entries".into()));
        }
        if self.rho_grid.is_empty() {
            return Err(Error::Invalid("rho grid must be nonempty".into()));
        }
        if let Some(&r) = self.rho_grid.iter().find(|r| !(0.0..=0.5).contains(*r)) {
            return Err(Error::OutOfRange { what: "rho (must lie in [0, 1/2])", value: r });
        }
        Ok(())
    }

    /// Seed of replicate `rep` at grid point `(l_idx, rho_idx)`.
    pub fn replicate_seed(&self, l_idx: usize, rho_idx: usize, rep: usize) -> u64 {
        substream(self.seed, &[l_idx as u64, rho_idx as u64, rep as u64])
    }

    /// Every `(l_idx, rho_idx, rep)` in output order.
    pub fn cells(&self) -> impl Iterator<Item = (usize, usize, usize)> + '_ {
        (0..self.rho_grid.len())
            .flat_map(move |r| (0..self.l_grid.len()).flat_map(move |l| (0..self.reps).map(move |rep| (l, r, rep))))
    }
}

/// One replicate's value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McSample {
    pub statistic: Statistic,
    pub n: usize,
    pub l: usize,
    pub rho: f64,
    pub rep: usize,
    pub seed: u64,
    pub value: f64,
}

/// Quantiles of one grid point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McPoint {
    pub l: usize,
    pub rho: f64,
    pub q10: f64,
    pub median: f64,
    pub q90: f64,
    pub mean: f64,
}

/// Samples, per-point summaries, and for each `ρ` the least-squares slope of
/// `ln(median)` against `ln L` (absent when fewer than two `L` values or a
/// median is zero).
#[derive(Debug, Clone, PartialEq)]
pub struct McStudy {
    pub samples: Vec<McSample>,
    pub points: Vec<McPoint>,
    pub slopes: Vec<(f64, Option<f64>)>,
}

/// Runs every replicate sequentially; see [`summarize_mc`] to aggregate
/// samples computed elsewhere (e.g. in parallel).
pub fn mc_opnorm_study(config: &McConfig) -> Result<McStudy> {
    config.validate()?;
    let mut samples = Vec::with_capacity(config.l_grid.len() * config.rho_grid.len() * config.reps);
    for (li, ri, rep) in config.cells() {
        samples.push(mc_sample(config, li, ri, rep)?);
    }
    Ok(summarize_mc(config, samples))
}

pub fn mc_sample(config: &McConfig, l_idx: usize, rho_idx: usize, rep: usize) -> Result<McSample> {
    let (l, rho) = (config.l_grid[l_idx], config.rho_grid[rho_idx]);
    let seed = config.replicate_seed(l_idx, rho_idx, rep);
    let value = mc_replicate(config.statistic, config.n, l, rho, seed)?;
    Ok(McSample { statistic: config.statistic, n: config.n, l, rho, rep, seed, value })
}

/// Type-7 (linear interpolation) quantile of sorted data.
pub fn quantile_sorted(sorted: &[f64], q: f64) -> f64 {
    if sorted.is_empty() {
        return f64::NAN;
    }
    let h = (sorted.len() - 1) as f64 * q;
    let lo = h as usize;
    let hi = (lo + 1).min(sorted.len() - 1);
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

/// Least-squares slope of `y` on `x`.
pub fn ols_slope(x: &[f64], y: &[f64]) -> Option<f64> {
    if x.len() < 2 || x.len() != y.len() {
        return None;
    }
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}

pub fn summarize_mc(config: &McConfig, samples: Vec<McSample>) -> McStudy {
    let mut points = Vec::new();
    let mut slopes = Vec::new();
    for &rho in &config.rho_grid {
        let mut xs = Vec::new();
        let mut ys = Vec::new();
        let mut defined = true;
        for &l in &config.l_grid {
            let mut v: Vec<f64> = samples.iter().filter(|s| s.l == l && s.rho == rho).map(|s| s.value).collect();
            v.sort_by(f64::total_cmp);
            let median = quantile_sorted(&v, 0.5);
            let mean = v.iter().sum::<f64>() / v.len() as f64;
            points.push(McPoint { l, rho, q10: quantile_sorted(&v, 0.1), median, q90: quantile_sorted(&v, 0.9), mean });
            if median > 0.0 {
                xs.push(ln(l as f64));
                ys.push(ln(median));
            } else {
                defined = false;
            }
        }
        slopes.push((rho, if defined { ols_slope(&xs, &ys) } else { None }));
    }
    McStudy { samples, points, slopes }
}

/// Observed degree and norm statistics next to their reference scales.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CountingStats {
    /// `maxℓ,ᵢ dℓ,ᵢ`, scale `log(L + n)`.
    pub max_layer_degree: f64,
    /// `maxᵢ Σℓ dℓ,ᵢ`, scale `Lnρ`.
    pub max_total_degree: f64,
    /// `Σℓ,ᵢ dℓ,ᵢ`, scale `Ln²ρ`.
    pub degree_sum: f64,
    /// `‖Σℓ Aℓ²‖`, scale `Lnρ`.
    pub sos_norm: f64,
    /// Reference scales in the same order.
    pub scales: [f64; 4],
}

impl CountingStats {
    pub fn values(&self) -> [f64; 4] {
        [self.max_layer_degree, self.max_total_degree, self.degree_sum, self.sos_norm]
    }

    /// Each statistic divided by its scale.
    pub fn ratios(&self) -> [f64; 4] {
        let v = self.values();
        core::array::from_fn(|i| v[i] / self.scales[i])
    }
}

pub fn counting_checks(g: &MultiLayerGraph, rho: f64) -> Result<CountingStats> {
    let (n, l) = (g.n() as f64, g.num_layers() as f64);
    let max_layer_degree =
        g.layers().iter().flat_map(|a| (0..a.n()).map(move |i| a.degree(i))).max().unwrap_or(0) as f64;
    let totals = total_degrees(g);
    let max_total_degree = totals.iter().copied().max().unwrap_or(0) as f64;
    let degree_sum = totals.iter().sum::<usize>() as f64;
    let sos_norm = sym_operator_norm(&sum_of_squares(g))?;
    Ok(CountingStats {
        max_layer_degree,
        max_total_degree,
        degree_sum,
        sos_norm,
        scales: [ln(l + n), l * n * rho, l * n * n * rho, l * n * rho],
    })
}

/// `Σℓ XℓPℓ` for an SBM sample, `Xℓ = Aℓ − Pℓ`.
pub fn sbm_linear_noise(g: &MultiLayerGraph, spec: &ModelSpec) -> Result<Matrix> {
    if g.n() != spec.n() || g.num_layers() != spec.num_layers() {
        return Err(Error::Dimension { what: "sbm_linear_noise", detail: "graph and model disagree in n or L".into() });
    }
    sum_ap(g, spec).sub(population_signal(spec).as_matrix())
}
