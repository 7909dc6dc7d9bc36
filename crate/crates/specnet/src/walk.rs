//! Random-walk propagation metrics: spectral first-arrival times, their
//! expectation m over the stationary target distribution, the semicircle
//! closed form for m, and a Monte Carlo estimator used as an independent
//! oracle.
//!
//! The walk is non-lazy: from node i the next node j is drawn with
//! probability w_ij / d_i. Time is a dimensionless step count.

use rand::Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::generators::rng_from_seed;
use crate::graph::WeightedGraph;
use crate::spectral::{SemicircleFit, SpectralDecomposition};

/// One step of the arrival-probability recursion: y_i = sum over neighbors
/// j of (w_ji / d_j) x_j. Preserves the total mass.
pub fn transition_step(g: &WeightedGraph, x: &[f64]) -> Vec<f64> {
    let n = g.node_count();
    assert_eq!(x.len(), n, "probability vector length must equal node count");
    let d = g.degrees();
    let mut y = vec![0.0; n];
    for j in 0..n {
        if x[j] == 0.0 {
            continue;
        }
        let share = x[j] / d[j];
        for &(i, w) in g.neighbors(j) {
            y[i as usize] += w * share;
        }
    }
    y
}

/// Expected first-arrival times from source `a` to every node, via the
/// spectral formula: f_i = vol(G) * sum_{l>=2} (1/lambda_l)
/// (q_l(i)^2 / d_i - q_l(a) q_l(i) / sqrt(d_a d_i)).
pub fn arrival_times(
    dec: &SpectralDecomposition,
    g: &WeightedGraph,
    a: usize,
) -> Result<Vec<f64>> {
    dec.require_connected()?;
    let n = g.node_count();
    if a >= n {
        return Err(Error::NodeOutOfRange { id: a, n });
    }
    let d = g.degrees();
    let vol = g.volume();
    let sqrt_da = d[a].sqrt();
    let mut f = vec![0.0f64; n];
    for l in 1..n {
        let inv_lambda = 1.0 / dec.lambdas[l];
        let qa = dec.vectors[[a, l]];
        for (i, fi) in f.iter_mut().enumerate() {
            let qi = dec.vectors[[i, l]];
            *fi += inv_lambda * (qi * qi / d[i] - qa * qi / (sqrt_da * d[i].sqrt()));
        }
    }
    for fi in &mut f {
        *fi *= vol;
    }
    Ok(f)
}

/// Single-pair variant of [`arrival_times`].
pub fn first_arrival_spectral(
    dec: &SpectralDecomposition,
    g: &WeightedGraph,
    a: usize,
    i: usize,
) -> Result<f64> {
    dec.require_connected()?;
    let n = g.node_count();
    if a >= n {
        return Err(Error::NodeOutOfRange { id: a, n });
    }
    if i >= n {
        return Err(Error::NodeOutOfRange { id: i, n });
    }
    let d = g.degrees();
    let denom = (d[a] * d[i]).sqrt();
    let mut acc = 0.0;
    for l in 1..n {
        let qa = dec.vectors[[a, l]];
        let qi = dec.vectors[[i, l]];
        acc += (qi * qi / d[i] - qa * qi / denom) / dec.lambdas[l];
    }
    Ok(g.volume() * acc)
}

/// Expected first-arrival time under the stationary target distribution:
/// m = sum_{l>=2} 1/lambda_l. Independent of the starting node.
pub fn mean_first_arrival(dec: &SpectralDecomposition) -> Result<f64> {
    dec.require_connected()?;
    Ok(dec.lambdas[1..].iter().map(|&l| 1.0 / l).sum())
}

/// Semicircle closed form for m: 2(n-1)/r^2 (1 - sqrt(1 - r^2)), evaluated
/// as 2(n-1) / (1 + sqrt(1 - r^2)) which is the same expression without the
/// cancellation at small r. Strictly increasing in r, between n-1 and
/// 2(n-1) on 0 < r < 1.
pub fn m_tilde(n: usize, r: f64) -> Result<f64> {
    if n < 2 {
        return Err(Error::Config(format!("n must be >= 2, got {n}")));
    }
    if !(r > 0.0 && r < 1.0) {
        return Err(Error::RadiusOutOfRange(r));
    }
    Ok(2.0 * (n - 1) as f64 / (1.0 + (1.0 - r * r).sqrt()))
}

/// |m_tilde - m| / m.
pub fn relative_error_m(m: f64, m_tilde: f64) -> f64 {
    assert!(m > 0.0, "m must be positive");
    (m_tilde - m).abs() / m
}

/// Numerical evaluation of the integral behind [`m_tilde`]:
/// (2(n-1)/(pi r^2)) times the integral of sqrt(r^2 - (lambda-1)^2)/lambda
/// over (1-r, 1+r). The substitution lambda = 1 + r cos(theta) removes the
/// square-root endpoints; adaptive Simpson does the rest. Serves as an
/// executable check of the closed form.
pub fn m_tilde_quadrature(n: usize, r: f64) -> Result<f64> {
    if n < 2 {
        return Err(Error::Config(format!("n must be >= 2, got {n}")));
    }
    if !(r > 0.0 && r < 1.0) {
        return Err(Error::RadiusOutOfRange(r));
    }
    let integrand = |theta: f64| {
        let s = theta.sin();
        s * s / (1.0 + r * theta.cos())
    };
    let integral = adaptive_simpson(&integrand, 0.0, std::f64::consts::PI, 1e-13, 60)?;
    Ok(2.0 * (n - 1) as f64 / std::f64::consts::PI * integral)
}

fn adaptive_simpson(
    f: &impl Fn(f64) -> f64,
    a: f64,
    b: f64,
    tol: f64,
    max_depth: usize,
) -> Result<f64> {
    fn simpson(fa: f64, fm: f64, fb: f64, h: f64) -> f64 {
        h / 6.0 * (fa + 4.0 * fm + fb)
    }
    #[allow(clippy::too_many_arguments)]
    fn recurse(
        f: &impl Fn(f64) -> f64,
        a: f64,
        b: f64,
        fa: f64,
        fm: f64,
        fb: f64,
        whole: f64,
        tol: f64,
        depth: usize,
    ) -> Option<f64> {
        let m = 0.5 * (a + b);
        let lm = 0.5 * (a + m);
        let rm = 0.5 * (m + b);
        let flm = f(lm);
        let frm = f(rm);
        let left = simpson(fa, flm, fm, m - a);
        let right = simpson(fm, frm, fb, b - m);
        let delta = left + right - whole;
        if delta.abs() <= 15.0 * tol {
            return Some(left + right + delta / 15.0);
        }
        if depth == 0 {
            return None;
        }
        let l = recurse(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1)?;
        let r = recurse(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1)?;
        Some(l + r)
    }
    let m = 0.5 * (a + b);
    let (fa, fm, fb) = (f(a), f(m), f(b));
    let whole = simpson(fa, fm, fb, b - a);
    recurse(f, a, b, fa, fm, fb, whole, tol, max_depth).ok_or(Error::QuadratureFailed(max_depth))
}

/// Default step cap for the Monte Carlo walker, far beyond the cover time
/// at the densities of interest.
pub fn default_t_max(n: usize) -> usize {
    ((100.0 * n as f64 * (n as f64).ln()).ceil() as usize).max(1000)
}

/// Monte Carlo first-arrival estimates from one source.
#[derive(Clone, Debug)]
pub struct McEstimate {
    /// Per-node mean first-arrival step.
    pub mean: Vec<f64>,
    /// Per-node standard error of the mean.
    pub stderr: Vec<f64>,
    pub runs: usize,
    pub t_max: usize,
}

/// Simulates `runs` independent walks from `a`; each records the first step
/// at which every node is reached. Runs use the ChaCha8 streams
/// `seed + run_index` and execute in parallel; the accumulators are integer
/// sums, so the result does not depend on scheduling. Errors out if any run
/// fails to cover the graph within `t_max` steps.
pub fn mc_first_arrival(
    g: &WeightedGraph,
    a: usize,
    runs: usize,
    t_max: usize,
    seed: u64,
) -> Result<McEstimate> {
    let n = g.node_count();
    if a >= n {
        return Err(Error::NodeOutOfRange { id: a, n });
    }
    if runs == 0 {
        return Err(Error::Config("runs must be >= 1".into()));
    }
    if !g.is_connected() {
        return Err(Error::Disconnected { gap: 0.0, tol: 0.0 });
    }

    // Cumulative neighbor weights for inverse-CDF sampling.
    let cum: Vec<Vec<f64>> = (0..n)
        .map(|i| {
            let mut acc = 0.0;
            g.neighbors(i)
                .iter()
                .map(|&(_, w)| {
                    acc += w;
                    acc
                })
                .collect()
        })
        .collect();

    let walk_once = |run: usize| -> Result<Vec<u64>> {
        let mut rng = rng_from_seed(seed.wrapping_add(run as u64));
        let mut first = vec![u64::MAX; n];
        first[a] = 0;
        let mut unvisited = n - 1;
        let mut pos = a;
        let mut t: u64 = 0;
        while unvisited > 0 {
            if t as usize >= t_max {
                let node = first.iter().position(|&x| x == u64::MAX).unwrap();
                return Err(Error::CensoredEstimate { node, t_max });
            }
            t += 1;
            let c = &cum[pos];
            let total = *c.last().unwrap();
            let u: f64 = rng.random::<f64>() * total;
            let k = c.partition_point(|&x| x <= u).min(c.len() - 1);
            pos = g.neighbors(pos)[k].0 as usize;
            if first[pos] == u64::MAX {
                first[pos] = t;
                unvisited -= 1;
            }
        }
        Ok(first)
    };

    let (sum, sumsq) = (0..runs)
        .into_par_iter()
        .map(walk_once)
        .try_fold(
            || (vec![0u64; n], vec![0u128; n]),
            |(mut s, mut sq), first| -> Result<(Vec<u64>, Vec<u128>)> {
                let first = first?;
                for i in 0..n {
                    s[i] += first[i];
                    sq[i] += (first[i] as u128) * (first[i] as u128);
                }
                Ok((s, sq))
            },
        )
        .try_reduce(
            || (vec![0u64; n], vec![0u128; n]),
            |(mut s1, mut q1), (s2, q2)| {
                for i in 0..n {
                    s1[i] += s2[i];
                    q1[i] += q2[i];
                }
                Ok((s1, q1))
            },
        )?;

    let runs_f = runs as f64;
    let mean: Vec<f64> = sum.iter().map(|&s| s as f64 / runs_f).collect();
    let stderr: Vec<f64> = (0..n)
        .map(|i| {
            if runs < 2 {
                return 0.0;
            }
            let mu = mean[i];
            let var = (sumsq[i] as f64 / runs_f - mu * mu) * runs_f / (runs_f - 1.0);
            (var.max(0.0) / runs_f).sqrt()
        })
        .collect();

    Ok(McEstimate {
        mean,
        stderr,
        runs,
        t_max,
    })
}

/// Spectral arrival summary from one source, with the semicircle
/// approximation and its relative error.
#[derive(Clone, Debug, serde::Serialize)]
pub struct ArrivalReport {
    pub source: usize,
    /// `f[i]` is the expected first-arrival time from `source` to node i.
    pub f: Vec<f64>,
    pub m: f64,
    pub m_tilde: f64,
    pub eps_m: f64,
}

impl ArrivalReport {
    pub fn new(
        dec: &SpectralDecomposition,
        g: &WeightedGraph,
        source: usize,
        fit: &SemicircleFit,
    ) -> Result<Self> {
        let f = arrival_times(dec, g, source)?;
        let m = mean_first_arrival(dec)?;
        let mt = m_tilde(dec.n(), fit.r)?;
        Ok(ArrivalReport {
            source,
            f,
            m,
            m_tilde: mt,
            eps_m: relative_error_m(m, mt),
        })
    }
}
