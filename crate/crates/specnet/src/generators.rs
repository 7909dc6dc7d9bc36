//! Random-network generation: ER and link-cut BA topologies plus random
//! link weights.
//!
//! Everything here is a pure function of its configuration and seed. The
//! generator is ChaCha8 (`rand_chacha::ChaCha8Rng`), a portable, explicitly
//! specified stream cipher RNG with 64-bit seeding, so the same seed yields
//! the same network on every platform. Independent trials use the stream
//! `seed + trial_index`; when a draw is rejected (disconnected outcome) the
//! retry uses `seed + attempt * 2^48`.

use rand::Rng;
use rand::SeedableRng;

use crate::error::{Error, Result};
use crate::graph::WeightedGraph;

/// The RNG used everywhere results must be reproducible.
pub type Rng64 = rand_chacha::ChaCha8Rng;

/// Creates the ChaCha8 stream for a 64-bit seed.
pub fn rng_from_seed(seed: u64) -> Rng64 {
    Rng64::seed_from_u64(seed)
}

/// Seed for retry `attempt` of a base stream. Attempts are spaced far apart
/// so they do not collide with neighbouring trial streams.
pub fn attempt_seed(base: u64, attempt: usize) -> u64 {
    base.wrapping_add((attempt as u64) << 48)
}

/// Link-weight law. All three kinds share the mean `w_mean`:
/// constant is exactly `w_mean`, uniform is on `[w_mean/2, 3 w_mean/2]`,
/// exponential has rate `1/w_mean`.
#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct WeightDistribution {
    pub kind: WeightKind,
    pub w_mean: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum WeightKind {
    Constant,
    Uniform,
    Exponential,
}

impl std::fmt::Display for WeightKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            WeightKind::Constant => "constant",
            WeightKind::Uniform => "uniform",
            WeightKind::Exponential => "exponential",
        };
        f.write_str(s)
    }
}

impl std::str::FromStr for WeightKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "constant" => Ok(WeightKind::Constant),
            "uniform" => Ok(WeightKind::Uniform),
            "exponential" => Ok(WeightKind::Exponential),
            other => Err(Error::Config(format!("unknown weight distribution {other:?}"))),
        }
    }
}

impl WeightDistribution {
    pub fn new(kind: WeightKind, w_mean: f64) -> Result<Self> {
        if !(w_mean > 0.0) {
            return Err(Error::Config(format!(
                "mean link weight must be positive, got {w_mean}"
            )));
        }
        Ok(WeightDistribution { kind, w_mean })
    }

    /// Draws one weight; always strictly positive (exponential zeros are
    /// resampled, the uniform lower bound is `w_mean/2`).
    pub fn sample<R: Rng>(&self, rng: &mut R) -> f64 {
        match self.kind {
            WeightKind::Constant => self.w_mean,
            WeightKind::Uniform => self.w_mean / 2.0 + self.w_mean * rng.random::<f64>(),
            WeightKind::Exponential => loop {
                let u: f64 = rng.random();
                let w = -self.w_mean * (1.0 - u).ln();
                if w > 0.0 {
                    break w;
                }
            },
        }
    }
}

/// Topology model.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Model {
    Er,
    Ba,
}

impl std::fmt::Display for Model {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Model::Er => "er",
            Model::Ba => "ba",
        })
    }
}

impl std::str::FromStr for Model {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "er" => Ok(Model::Er),
            "ba" => Ok(Model::Ba),
            other => Err(Error::Config(format!("unknown model {other:?}"))),
        }
    }
}

/// One topology draw: model, size, target mean link count, BA cut
/// probability and the base seed.
#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct GenConfig {
    pub model: Model,
    pub n: usize,
    pub k_ave: f64,
    /// Cut probability, BA only; must satisfy `0 <= q < 1`.
    pub q: f64,
    pub seed: u64,
}

impl GenConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n < 2 {
            return Err(Error::Config(format!("n must be >= 2, got {}", self.n)));
        }
        if !(self.k_ave >= 1.0) {
            return Err(Error::Config(format!(
                "k_ave must be >= 1, got {}",
                self.k_ave
            )));
        }
        match self.model {
            Model::Er => {
                let p = self.k_ave / (self.n - 1) as f64;
                if p > 1.0 {
                    return Err(Error::Config(format!(
                        "ER link probability k_ave/(n-1) = {p} exceeds 1"
                    )));
                }
            }
            Model::Ba => {
                if !(0.0..1.0).contains(&self.q) {
                    return Err(Error::Config(format!(
                        "cut probability must be in [0, 1), got {}",
                        self.q
                    )));
                }
                let n_a = ba_attachment_count(self.k_ave, self.q)?;
                if n_a >= self.n {
                    return Err(Error::Config(format!(
                        "attachment count {n_a} must be below n = {}",
                        self.n
                    )));
                }
            }
        }
        Ok(())
    }
}

/// ER topology: every one of the n(n-1)/2 pairs is linked independently
/// with probability p = k_ave/(n-1), unit weights.
pub fn gen_er<R: Rng>(n: usize, k_ave: f64, rng: &mut R) -> Result<WeightedGraph> {
    GenConfig {
        model: Model::Er,
        n,
        k_ave,
        q: 0.0,
        seed: 0,
    }
    .validate()?;
    let p = k_ave / (n - 1) as f64;
    let mut links = Vec::with_capacity((p * (n * (n - 1) / 2) as f64 * 1.1) as usize);
    for i in 0..n {
        for j in (i + 1)..n {
            if rng.random::<f64>() < p {
                links.push((i, j));
            }
        }
    }
    WeightedGraph::from_links(n, links)
}

/// Number of links each new BA node attaches. Chosen so the cut network
/// comes out with mean link count k_ave: pre-cut mean degree is about
/// 2 n_a, the cut keeps a (1-q) fraction.
pub fn ba_attachment_count(k_ave: f64, q: f64) -> Result<usize> {
    let n_a = (k_ave / (2.0 * (1.0 - q))).round() as usize;
    if n_a < 1 {
        return Err(Error::Config(format!(
            "k_ave = {k_ave}, q = {q} gives attachment count 0"
        )));
    }
    Ok(n_a)
}

/// Plain preferential-attachment network, unit weights: a complete graph on
/// the first n_a nodes, then each new node attaches n_a links to distinct
/// existing nodes picked with probability proportional to current degree.
pub fn gen_ba<R: Rng>(n: usize, n_a: usize, rng: &mut R) -> Result<WeightedGraph> {
    if n_a < 1 || n_a >= n {
        return Err(Error::Config(format!(
            "attachment count {n_a} must be in [1, n) for n = {n}"
        )));
    }
    let n0 = n_a;
    let mut links: Vec<(usize, usize)> = Vec::with_capacity(n0 * (n0 - 1) / 2 + n_a * (n - n0));
    // One entry per link endpoint; uniform draws from this list realize
    // degree-proportional selection.
    let mut endpoints: Vec<u32> = Vec::with_capacity(2 * links.capacity());
    for i in 0..n0 {
        for j in (i + 1)..n0 {
            links.push((i, j));
            endpoints.push(i as u32);
            endpoints.push(j as u32);
        }
    }
    let mut targets: Vec<u32> = Vec::with_capacity(n_a);
    for v in n0..n {
        targets.clear();
        while targets.len() < n_a {
            let t = endpoints[rng.random_range(0..endpoints.len())];
            if !targets.contains(&t) {
                targets.push(t);
            }
        }
        for &t in &targets {
            links.push((t as usize, v));
            endpoints.push(t);
            endpoints.push(v as u32);
        }
    }
    WeightedGraph::from_links(n, links)
}

/// BA topology followed by independent link deletion with probability q,
/// unit weights. With q = 0 the network is returned uncut.
pub fn gen_ba_cut<R: Rng>(n: usize, k_ave: f64, q: f64, rng: &mut R) -> Result<WeightedGraph> {
    GenConfig {
        model: Model::Ba,
        n,
        k_ave,
        q,
        seed: 0,
    }
    .validate()?;
    let n_a = ba_attachment_count(k_ave, q)?;
    let full = gen_ba(n, n_a, rng)?;
    if q == 0.0 {
        return Ok(full);
    }
    let kept = full
        .edges()
        .iter()
        .filter(|_| rng.random::<f64>() >= q)
        .map(|e| (e.i as usize, e.j as usize))
        .collect::<Vec<_>>();
    WeightedGraph::from_links(n, kept)
}

/// Draws one topology according to the configuration (single attempt, no
/// connectivity check).
pub fn generate<R: Rng>(config: &GenConfig, rng: &mut R) -> Result<WeightedGraph> {
    match config.model {
        Model::Er => gen_er(config.n, config.k_ave, rng),
        Model::Ba => gen_ba_cut(config.n, config.k_ave, config.q, rng),
    }
}

/// Replaces every unit weight with an independent draw from `dist`. The
/// topology is untouched; one sample per undirected edge keeps the matrix
/// symmetric.
pub fn assign_weights<R: Rng>(
    g: &WeightedGraph,
    dist: &WeightDistribution,
    rng: &mut R,
) -> Result<WeightedGraph> {
    if g.edges().iter().any(|e| e.w != 1.0) {
        return Err(Error::Config(
            "assign_weights expects a unit-weight graph".into(),
        ));
    }
    let edges = g
        .edges()
        .iter()
        .map(|e| (e.i as usize, e.j as usize, dist.sample(rng)))
        .collect::<Vec<_>>();
    WeightedGraph::from_edges(g.node_count(), edges)
}

/// Default retry budget for [`generate_connected`].
pub const DEFAULT_MAX_ATTEMPTS: usize = 200;

/// Draws topologies until one is connected (which also rules out isolated
/// nodes), then assigns weights from the same stream. Returns the graph and
/// the number of rejected draws. Retry `a` reseeds with
/// [`attempt_seed`]`(config.seed, a)`.
pub fn generate_connected(
    config: &GenConfig,
    dist: &WeightDistribution,
    max_attempts: usize,
) -> Result<(WeightedGraph, usize)> {
    config.validate()?;
    for attempt in 0..max_attempts {
        let mut rng = rng_from_seed(attempt_seed(config.seed, attempt));
        let g = generate(config, &mut rng)?;
        if !g.is_connected() {
            continue;
        }
        let weighted = assign_weights(&g, dist, &mut rng)?;
        return Ok((weighted, attempt));
    }
    Err(Error::GenerationFailed {
        attempts: max_attempts,
        n: config.n,
        k_ave: config.k_ave,
    })
}

/// Distribution of link counts as (degree, probability) pairs, ascending,
/// probabilities summing to 1.
pub fn degree_histogram(g: &WeightedGraph) -> Vec<(usize, f64)> {
    let mut counts: std::collections::BTreeMap<usize, usize> = std::collections::BTreeMap::new();
    for &k in g.link_counts() {
        *counts.entry(k as usize).or_insert(0) += 1;
    }
    let n = g.node_count() as f64;
    counts
        .into_iter()
        .map(|(k, c)| (k, c as f64 / n))
        .collect()
}

/// Least-squares slope of log p vs log k over entries with k >= k_low and
/// p > 0. Needs at least three such degrees.
pub fn tail_exponent(hist: &[(usize, f64)], k_low: usize) -> Result<f64> {
    if k_low < 1 {
        return Err(Error::Config("k_low must be >= 1".into()));
    }
    let pts: Vec<(f64, f64)> = hist
        .iter()
        .filter(|&&(k, p)| k >= k_low && p > 0.0)
        .map(|&(k, p)| ((k as f64).ln(), p.ln()))
        .collect();
    if pts.len() < 3 {
        return Err(Error::TailFit {
            k_low,
            found: pts.len(),
        });
    }
    let n = pts.len() as f64;
    let sx: f64 = pts.iter().map(|p| p.0).sum();
    let sy: f64 = pts.iter().map(|p| p.1).sum();
    let sxx: f64 = pts.iter().map(|p| p.0 * p.0).sum();
    let sxy: f64 = pts.iter().map(|p| p.0 * p.1).sum();
    Ok((n * sxy - sx * sy) / (n * sxx - sx * sx))
}
