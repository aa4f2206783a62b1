//! Flat `key = value` configuration files.
//!
//! Lines are `key = value`; `#` starts a comment; blank lines are ignored.
//! Lists are comma-separated, `linspace(a, b, m)` expands to `m` equally
//! spaced values from `a` to `b`, and matrices are written row by row with
//! rows separated by `;` (for example `0.75,0.2;0.2,0.5`).

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use mlsbm_core::cluster::{EigenOrder, Method, DEFAULT_RESTARTS};
use mlsbm_core::concentration::{McConfig, Statistic};
use mlsbm_core::linalg::{Matrix, SymMatrix};
use mlsbm_core::rng::SplitMix64;
use mlsbm_core::sbm::{presets, Membership, ModelSpec};

use crate::error::{bail, Error, Result};

/// Named experiment setups.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Preset {
    /// Two communities of 100, 30 layers each drawing one of two matrices
    /// uniformly at random.
    Fig2demo,
    /// Communities of 200, 50 and 250, 100 layers, the first half on the
    /// positive-definite matrix and the second half on its indefinite twin.
    Fig3,
    /// The [`Preset::Fig3`] model at `ρ = 0.15`.
    Fig4,
    /// The [`Preset::Fig3`] model at `ρ ∈ {0.025, 0.2}`.
    Fig5,
    /// [`Preset::Fig3`] with the weighted embedding.
    Fig6weighted,
}

impl Preset {
    pub const ALL: [Preset; 5] = [Preset::Fig2demo, Preset::Fig3, Preset::Fig4, Preset::Fig5, Preset::Fig6weighted];

    pub fn name(self) -> &'static str {
        match self {
            Preset::Fig2demo => "fig2demo",
            Preset::Fig3 => "fig3",
            Preset::Fig4 => "fig4",
            Preset::Fig5 => "fig5",
            Preset::Fig6weighted => "fig6weighted",
        }
    }
}

impl fmt::Display for Preset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Preset {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match Preset::ALL.into_iter().find(|p| p.name() == s) {
            Some(p) => Ok(p),
            None => bail!("unknown preset `{s}` (expected fig2demo, fig3, fig4, fig5 or fig6weighted)"),
        }
    }
}

/// How layers are assigned to the connectivity matrices `B1 … Bm`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum LayerAssignment {
    /// Contiguous runs: layer `ℓ` uses the `j`-th matrix for
    /// `⌊jL/m⌋ ≤ ℓ < ⌊(j+1)L/m⌋`.
    Blocks,
    /// Each layer draws a matrix uniformly at random, independently per trial.
    Random,
}

impl FromStr for LayerAssignment {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "blocks" => Ok(LayerAssignment::Blocks),
            "random" => Ok(LayerAssignment::Random),
            _ => bail!("unknown layer assignment `{s}` (expected blocks or random)"),
        }
    }
}

impl fmt::Display for LayerAssignment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            LayerAssignment::Blocks => "blocks",
            LayerAssignment::Random => "random",
        })
    }
}

/// A validated experiment grid.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub preset: Option<Preset>,
    /// Community sizes; `n` is their sum and `K` their count.
    pub sizes: Vec<usize>,
    pub layers: usize,
    pub matrices: Vec<SymMatrix>,
    pub assignment: LayerAssignment,
    /// Strictly ascending, within `(0, 1]`.
    pub rho_grid: Vec<f64>,
    pub trials: usize,
    pub methods: Vec<Method>,
    pub weighted: bool,
    pub base_seed: u64,
    pub restarts: usize,
    pub order: EigenOrder,
}

pub const DEFAULT_TRIALS: usize = 100;
pub const DEFAULT_SEED: u64 = 20240601;

/// `m` equally spaced values from `a` to `b` inclusive.
pub fn linspace(a: f64, b: f64, m: usize) -> Vec<f64> {
    match m {
        0 => Vec::new(),
        1 => vec![a],
        _ => (0..m)
            .map(|i| {
                let t = i as f64 / (m - 1) as f64;
                // Fifteen significant digits drop representation noise, so
                // grid points print as typed.
                format!("{:.14e}", a * (1.0 - t) + b * t).parse().expect("formatted float")
            })
            .collect(),
    }
}

impl ExperimentConfig {
    pub fn preset(p: Preset) -> Self {
        let fig3 = ExperimentConfig {
            preset: Some(p),
            sizes: vec![200, 50, 250],
            layers: 100,
            matrices: presets::fig3_matrices().to_vec(),
            assignment: LayerAssignment::Blocks,
            rho_grid: linspace(0.025, 0.2, 15),
            trials: DEFAULT_TRIALS,
            methods: Method::ALL.to_vec(),
            weighted: false,
            base_seed: DEFAULT_SEED,
            restarts: DEFAULT_RESTARTS,
            order: EigenOrder::Magnitude,
        };
        match p {
            Preset::Fig2demo => ExperimentConfig {
                sizes: vec![100, 100],
                layers: 30,
                matrices: presets::fig2_matrices().to_vec(),
                assignment: LayerAssignment::Random,
                rho_grid: vec![0.02, 0.03, 0.04, 0.05, 0.06],
                methods: vec![Method::Sum, Method::Sos, Method::SosDebias],
                ..fig3
            },
            Preset::Fig3 => fig3,
            Preset::Fig4 => ExperimentConfig { rho_grid: vec![0.15], ..fig3 },
            Preset::Fig5 => ExperimentConfig { rho_grid: vec![0.025, 0.2], ..fig3 },
            Preset::Fig6weighted => ExperimentConfig { weighted: true, ..fig3 },
        }
    }

    pub fn n(&self) -> usize {
        self.sizes.iter().sum()
    }

    pub fn k(&self) -> usize {
        self.sizes.len()
    }

    /// Matrix index of every layer; `layer_seed` drives random assignment.
    pub fn layer_matrices(&self, layer_seed: u64) -> Vec<usize> {
        let m = self.matrices.len();
        match self.assignment {
            LayerAssignment::Blocks => {
                (0..self.layers).map(|l| (1..m).filter(|&j| j * self.layers / m <= l).count()).collect()
            }
            LayerAssignment::Random => {
                let mut rng = SplitMix64::new(layer_seed);
                (0..self.layers).map(|_| rng.below(m as u64) as usize).collect()
            }
        }
    }

    pub fn model(&self, rho: f64, layer_seed: u64) -> Result<ModelSpec> {
        let theta = Membership::from_sizes(&self.sizes)?;
        let layers = self.layer_matrices(layer_seed).into_iter().map(|j| self.matrices[j].clone()).collect();
        Ok(ModelSpec::new(theta, rho, layers)?)
    }

    /// Rejects infeasible grids before any sampling.
    pub fn validate(&self) -> Result<()> {
        if self.sizes.is_empty() || self.sizes.contains(&0) {
            bail!("community sizes must be positive, got {:?}", self.sizes);
        }
        if self.k() > self.n() {
            bail!("K = {} exceeds n = {}", self.k(), self.n());
        }
        if self.layers == 0 {
            bail!("L must be at least 1");
        }
        if self.trials == 0 {
            bail!("trials must be at least 1");
        }
        if self.restarts == 0 {
            bail!("restarts must be at least 1");
        }
        if self.methods.is_empty() {
            bail!("at least one method is required");
        }
        if self.matrices.is_empty() {
            bail!("at least one connectivity matrix is required");
        }
        if let Some(b) = self.matrices.iter().find(|b| b.n() != self.k()) {
            bail!("connectivity matrix is {0}x{0} but K = {1}", b.n(), self.k());
        }
        if self.rho_grid.is_empty() {
            bail!("rho_grid must not be empty");
        }
        if let Some(r) = self.rho_grid.iter().find(|r| !(**r > 0.0 && **r <= 1.0)) {
            bail!("rho {r} lies outside (0, 1]");
        }
        if self.rho_grid.windows(2).any(|w| w[0] >= w[1]) {
            bail!("rho_grid must be strictly ascending");
        }
        let rho_max = *self.rho_grid.last().expect("nonempty");
        for (j, b) in self.matrices.iter().enumerate() {
            let theta = Membership::from_sizes(&self.sizes)?;
            ModelSpec::new(theta, rho_max, vec![b.clone()])
                .map_err(Error::invalid(format!("matrix B{} at rho = {rho_max}", j + 1)))?;
        }
        Ok(())
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut kv = KeyValues::parse(text)?;
        let preset = kv.take("preset").map(|v| v.parse::<Preset>()).transpose()?;
        let mut c = match preset {
            Some(p) => ExperimentConfig::preset(p),
            None => ExperimentConfig {
                preset: None,
                sizes: Vec::new(),
                layers: 0,
                matrices: Vec::new(),
                assignment: LayerAssignment::Blocks,
                rho_grid: Vec::new(),
                trials: DEFAULT_TRIALS,
                methods: Method::ALL.to_vec(),
                weighted: false,
                base_seed: DEFAULT_SEED,
                restarts: DEFAULT_RESTARTS,
                order: EigenOrder::Magnitude,
            },
        };
        let n = kv.take("n").map(|v| parse_num::<usize>("n", &v)).transpose()?;
        let k = kv.take("K").map(|v| parse_num::<usize>("K", &v)).transpose()?;
        match (kv.take("sizes"), n, k) {
            (Some(v), n, k) => {
                c.sizes = parse_list::<usize>("sizes", &v)?;
                if n.is_some_and(|n| n != c.n()) || k.is_some_and(|k| k != c.k()) {
                    bail!("sizes {:?} disagree with the given n or K", c.sizes);
                }
            }
            (None, Some(n), Some(k)) => c.sizes = equal_sizes(n, k)?,
            (None, Some(n), None) if !c.sizes.is_empty() => c.sizes = equal_sizes(n, c.k())?,
            (None, None, Some(k)) if !c.sizes.is_empty() => c.sizes = equal_sizes(c.n(), k)?,
            (None, None, None) if !c.sizes.is_empty() => {}
            _ => bail!("community structure missing: give `sizes`, or both `n` and `K`"),
        }
        if let Some(v) = kv.take("L") {
            c.layers = parse_num("L", &v)?;
        }
        let single = kv.take("B");
        let mut numbered = Vec::new();
        while let Some(v) = kv.take(&format!("B{}", numbered.len() + 1)) {
            numbered.push(v);
        }
        match (single, numbered.is_empty()) {
            (Some(_), false) => bail!("give either `B` or `B1`, `B2`, ..., not both"),
            (Some(v), true) => c.matrices = vec![parse_matrix("B", &v)?],
            (None, false) => {
                c.matrices = numbered
                    .iter()
                    .enumerate()
                    .map(|(j, v)| parse_matrix(&format!("B{}", j + 1), v))
                    .collect::<Result<_>>()?;
            }
            (None, true) => {}
        }
        if let Some(v) = kv.take("layer_assignment") {
            c.assignment = v.parse()?;
        }
        if let Some(v) = kv.take("rho_grid") {
            c.rho_grid = parse_grid("rho_grid", &v)?;
        }
        if let Some(v) = kv.take("trials") {
            c.trials = parse_num("trials", &v)?;
        }
        if let Some(v) = kv.take("methods") {
            c.methods = v
                .split(',')
                .map(|m| m.trim().parse::<Method>().map_err(Error::invalid("methods")))
                .collect::<Result<_>>()?;
        }
        if let Some(v) = kv.take("weighted") {
            c.weighted = parse_bool("weighted", &v)?;
        }
        if let Some(v) = kv.take("base_seed") {
            c.base_seed = parse_seed("base_seed", &v)?;
        }
        if let Some(v) = kv.take("restarts") {
            c.restarts = parse_num("restarts", &v)?;
        }
        if let Some(v) = kv.take("eigen_order") {
            c.order = v.parse().map_err(Error::invalid("eigen_order"))?;
        }
        kv.finish()?;
        c.validate()?;
        Ok(c)
    }
}

/// `k` sizes summing to `n`, the first `n mod k` one larger.
pub fn equal_sizes(n: usize, k: usize) -> Result<Vec<usize>> {
    if k == 0 || k > n {
        bail!("cannot split n = {n} nodes into K = {k} nonempty communities");
    }
    Ok((0..k).map(|i| n / k + usize::from(i < n % k)).collect())
}

/// Monte-Carlo configuration: `statistic`, `n`, `L_grid`, `rho_grid`,
/// `reps`, `seed`.
pub fn parse_mc_config(text: &str) -> Result<McConfig> {
    let mut kv = KeyValues::parse(text)?;
    let statistic: Statistic = kv.require("statistic")?.parse().map_err(Error::invalid("statistic"))?;
    let n = parse_num("n", &kv.require("n")?)?;
    let l_grid = parse_list("L_grid", &kv.require("L_grid")?)?;
    let rho_grid = parse_grid("rho_grid", &kv.require("rho_grid")?)?;
    let reps = parse_num("reps", &kv.require("reps")?)?;
    let seed = kv.take("seed").map(|v| parse_seed("seed", &v)).transpose()?.unwrap_or(DEFAULT_SEED);
    kv.finish()?;
    let c = McConfig { statistic, n, l_grid, rho_grid, reps, seed };
    c.validate().map_err(Error::invalid("concentration config"))?;
    Ok(c)
}

struct KeyValues {
    entries: BTreeMap<String, (usize, String)>,
}

impl KeyValues {
    fn parse(text: &str) -> Result<Self> {
        let mut entries = BTreeMap::new();
        for (no, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                bail!("line {}: expected `key = value`, got `{line}`", no + 1);
            };
            let key = key.trim();
            if key.is_empty() {
                bail!("line {}: empty key", no + 1);
            }
            if let Some((first, _)) = entries.insert(key.to_string(), (no + 1, value.trim().to_string())) {
                bail!("line {}: key `{key}` already set on line {first}", no + 1);
            }
        }
        Ok(Self { entries })
    }

    fn take(&mut self, key: &str) -> Option<String> {
        self.entries.remove(key).map(|(_, v)| v)
    }

    fn require(&mut self, key: &str) -> Result<String> {
        match self.take(key) {
            Some(v) => Ok(v),
            None => bail!("missing required key `{key}`"),
        }
    }

    fn finish(self) -> Result<()> {
        if let Some((key, (line, _))) = self.entries.into_iter().next() {
            bail!("line {line}: unknown key `{key}`");
        }
        Ok(())
    }
}

fn parse_num<T: FromStr>(key: &str, v: &str) -> Result<T> {
    match v.trim().parse() {
        Ok(x) => Ok(x),
        Err(_) => bail!("`{key}`: cannot parse `{v}`"),
    }
}

fn parse_list<T: FromStr>(key: &str, v: &str) -> Result<Vec<T>> {
    v.split(',').filter(|s| !s.trim().is_empty()).map(|s| parse_num(key, s)).collect()
}

fn parse_bool(key: &str, v: &str) -> Result<bool> {
    match v {
        "true" => Ok(true),
        "false" => Ok(false),
        _ => bail!("`{key}`: expected true or false, got `{v}`"),
    }
}

/// Decimal or `0x`-prefixed hexadecimal.
fn parse_seed(key: &str, v: &str) -> Result<u64> {
    let parsed = match v.strip_prefix("0x").or_else(|| v.strip_prefix("0X")) {
        Some(hex) => u64::from_str_radix(&hex.replace('_', ""), 16).ok(),
        None => v.replace('_', "").parse().ok(),
    };
    match parsed {
        Some(s) => Ok(s),
        None => bail!("`{key}`: cannot parse seed `{v}`"),
    }
}

fn parse_grid(key: &str, v: &str) -> Result<Vec<f64>> {
    if let Some(inner) = v.strip_prefix("linspace(").and_then(|s| s.strip_suffix(')')) {
        let parts: Vec<&str> = inner.split(',').collect();
        if parts.len() != 3 {
            bail!("`{key}`: linspace takes (start, stop, count)");
        }
        let m: usize = parse_num(key, parts[2])?;
        return Ok(linspace(parse_num(key, parts[0])?, parse_num(key, parts[1])?, m));
    }
    parse_list(key, v)
}

fn parse_matrix(key: &str, v: &str) -> Result<SymMatrix> {
    let rows: Vec<Vec<f64>> = v.split(';').map(|r| parse_list(key, r)).collect::<Result<_>>()?;
    let m = Matrix::from_rows(&rows).map_err(Error::invalid(format!("`{key}`")))?;
    SymMatrix::new(m).map_err(Error::invalid(format!("`{key}`")))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn presets_reproduce_core_models() {
        let c = ExperimentConfig::preset(Preset::Fig3);
        c.validate().unwrap();
        let a = c.model(0.1, 0).unwrap();
        let b = presets::fig3(0.1).unwrap();
        assert_eq!(a, b);
        let c = ExperimentConfig::preset(Preset::Fig2demo);
        for seed in 0..5 {
            assert_eq!(c.model(0.04, seed).unwrap(), presets::fig2demo(0.04, seed).unwrap());
        }
    }

    #[test]
    fn fig3_grid() {
        let g = ExperimentConfig::preset(Preset::Fig3).rho_grid;
        assert_eq!(g.len(), 15);
        assert_eq!((g[0], g[14]), (0.025, 0.2));
        assert!((g[10] - 0.15).abs() < 1e-15);
    }

    #[test]
    fn block_assignment() {
        let mut c = ExperimentConfig::preset(Preset::Fig3);
        c.layers = 5;
        assert_eq!(c.layer_matrices(0), [0, 0, 1, 1, 1]);
        c.matrices.push(c.matrices[0].clone());
        c.layers = 7;
        assert_eq!(c.layer_matrices(0), [0, 0, 1, 1, 2, 2, 2]);
    }

    #[test]
    fn explicit_config() {
        let text = "# two blocks\nn = 10\nK = 2\nL = 3\nB = 0.9,0.1;0.1,0.9\nrho_grid = 0.5, 1.0\ntrials = 2\nmethods = sos_debias\nweighted = true\nbase_seed = 0x10\n";
        let c = ExperimentConfig::parse(text).unwrap();
        assert_eq!(c.sizes, [5, 5]);
        assert_eq!((c.layers, c.trials, c.base_seed, c.weighted), (3, 2, 16, true));
        assert_eq!(c.methods, [Method::SosDebias]);
        assert_eq!(c.rho_grid, [0.5, 1.0]);
    }

    #[test]
    fn preset_with_overrides() {
        let c = ExperimentConfig::parse("preset = fig2demo\ntrials = 3\nrho_grid = linspace(0.02, 0.06, 3)\n").unwrap();
        assert_eq!(c.trials, 3);
        assert_eq!(c.rho_grid, [0.02, 0.04, 0.06]);
        assert_eq!(c.layers, 30);
        let c = ExperimentConfig::parse("preset = fig3\nn = 50\n").unwrap();
        assert_eq!(c.sizes, [17, 17, 16]);
    }

    #[test]
    fn rejections() {
        let bad = [
            "n = 10\nK = 2\nL = 1\nB = 0.5,0;0,0.5\nrho_grid = 0.5\nbogus = 1\n",
            "n = 10\nK = 2\nL = 1\nB = 0.5,0;0,0.5\nrho_grid = 0.5, 0.4\n",
            "n = 10\nK = 2\nL = 1\nB = 0.5,0;0,0.5\nrho_grid = 0\n",
            "n = 10\nK = 2\nL = 1\nB = 3,0;0,0.5\nrho_grid = 0.5\n",
            "n = 2\nK = 3\nL = 1\nB = 1\nrho_grid = 0.5\n",
            "n = 10\nK = 2\nL = 1\nB = 0.5,0;0,0.5\nrho_grid = 0.5\ntrials = 0\n",
            "n = 10\nK = 2\nL = 1\nB = 0.5,0;0,0.5\nrho_grid = 0.5\nmethods = \n",
            "n = 10\nK = 2\nL = 1\nB = 0.5,0.1;0,0.5\nrho_grid = 0.5\n",
            "n = 10\nn = 11\n",
            "preset = fig9\n",
            "n = 10\nK = 2\nL = 1\nrho_grid = 0.5\n",
        ];
        for text in bad {
            let e = ExperimentConfig::parse(text).unwrap_err();
            assert_eq!(e.exit_code(), 1, "{text}: {e}");
        }
    }

    #[test]
    fn mc_config() {
        let c = parse_mc_config("statistic = s1\nn = 50\nL_grid = 2,4\nrho_grid = 0.1\nreps = 3\n").unwrap();
        assert_eq!(c.statistic, Statistic::S1);
        assert_eq!(c.l_grid, [2, 4]);
        assert!(parse_mc_config("statistic = s3\nn = 50\nL_grid = 2\nrho_grid = 0.1\nreps = 3\n").is_err());
        assert!(parse_mc_config("statistic = s1\nn = 50\nL_grid = 2\nrho_grid = 0.1\nreps = 0\n").is_err());
    }
}
