//! Normalized Laplacian spectra and their comparison against the semicircle
//! distribution.
//!
//! The pipeline: build N = D^{-1/2} (D - A) D^{-1/2}, take its full
//! eigendecomposition, histogram the bulk eigenvalues over [lambda_2,
//! lambda_n], fit a semicircle of radius r centered at 1, and score the fit
//! with the mean relative deviation per bin.

use ndarray::Array2;

use crate::eigen::{self, EigOptions};
use crate::error::{Error, Result};
use crate::graph::WeightedGraph;

/// Absolute tolerance below which the spectral gap counts as zero, i.e. the
/// graph counts as disconnected.
pub const SPECTRAL_GAP_TOL: f64 = 1e-9;

/// N = D^{-1/2} L D^{-1/2}: unit diagonal, -w_ij / sqrt(d_i d_j) on linked
/// pairs, exactly symmetric by construction. Every node must have positive
/// degree.
pub fn normalized_laplacian(g: &WeightedGraph) -> Result<Array2<f64>> {
    let n = g.node_count();
    let d = g.degrees();
    if let Some(i) = d.iter().position(|&x| x <= 0.0) {
        return Err(Error::ZeroDegree(i));
    }
    let inv_sqrt: Vec<f64> = d.iter().map(|&x| 1.0 / x.sqrt()).collect();
    let mut m = Array2::<f64>::zeros((n, n));
    for i in 0..n {
        m[[i, i]] = 1.0;
    }
    for e in g.edges() {
        let (i, j) = (e.i as usize, e.j as usize);
        let v = -e.w * inv_sqrt[i] * inv_sqrt[j];
        m[[i, j]] = v;
        m[[j, i]] = v;
    }
    Ok(m)
}

/// Full eigendecomposition of a symmetric matrix, eigenvalues ascending.
///
/// Contract (checked by the test suite, with the matrix size measured in
/// the Frobenius norm): eigenvector columns are orthonormal to 1e-8 and
/// every residual ||N q_l - lambda_l q_l|| stays below 1e-8 ||N||.
#[derive(Clone, Debug)]
pub struct SpectralDecomposition {
    /// lambda_1 <= ... <= lambda_n.
    pub lambdas: Vec<f64>,
    /// Column l is the orthonormal eigenvector q_l of lambda_l.
    pub vectors: Array2<f64>,
}

impl SpectralDecomposition {
    pub fn n(&self) -> usize {
        self.lambdas.len()
    }

    /// Second-smallest eigenvalue (the spectral gap for connected graphs).
    pub fn lambda2(&self) -> f64 {
        self.lambdas[1]
    }

    pub fn lambda_max(&self) -> f64 {
        *self.lambdas.last().unwrap()
    }

    /// Errors out when the gap is numerically zero.
    pub fn require_connected(&self) -> Result<()> {
        if self.n() < 2 || self.lambda2() <= SPECTRAL_GAP_TOL {
            return Err(Error::Disconnected {
                gap: if self.n() < 2 { 0.0 } else { self.lambda2() },
                tol: SPECTRAL_GAP_TOL,
            });
        }
        Ok(())
    }

    pub fn fit_radius(&self, mode: RadiusMode) -> Result<SemicircleFit> {
        SemicircleFit::from_spectrum(self.lambda2(), self.lambda_max(), mode)
    }
}

/// Symmetric eigendecomposition. The input must be symmetric to within
/// 1e-12 entrywise; eigenvalues come back ascending, ties ordered
/// deterministically for a fixed input.
pub fn eig_sym(matrix: &Array2<f64>, opts: &EigOptions) -> Result<SpectralDecomposition> {
    let n = matrix.nrows();
    if matrix.ncols() != n {
        return Err(Error::Config(format!(
            "matrix must be square, got {}x{}",
            n,
            matrix.ncols()
        )));
    }
    for i in 0..n {
        for j in (i + 1)..n {
            let delta = (matrix[[i, j]] - matrix[[j, i]]).abs();
            if delta > 1e-12 {
                return Err(Error::NotSymmetric { i, j, delta });
            }
        }
    }
    let mut flat: Vec<f64> = Vec::with_capacity(n * n);
    flat.extend(matrix.iter());
    let lambdas = eigen::sym_eigen_in_place(&mut flat, n, opts)?;
    let vectors = Array2::from_shape_vec((n, n), flat).expect("shape matches");
    Ok(SpectralDecomposition { lambdas, vectors })
}

/// Convenience: normalized Laplacian then [`eig_sym`] with default options.
pub fn decompose(g: &WeightedGraph) -> Result<SpectralDecomposition> {
    let n = normalized_laplacian(g)?;
    eig_sym(&n, &EigOptions::default())
}

/// How the semicircle radius is read off the spectrum. The density is
/// centered at 1, so `Low` uses 1 - lambda_2, `High` uses lambda_n - 1,
/// `Mean` splits the difference (the histogram range and the support then
/// have equal width), `Max` takes the larger of the two so the support
/// always covers the histogram range.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RadiusMode {
    Low,
    High,
    Mean,
    Max,
}

impl std::fmt::Display for RadiusMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            RadiusMode::Low => "low",
            RadiusMode::High => "high",
            RadiusMode::Mean => "mean",
            RadiusMode::Max => "max",
        })
    }
}

impl std::str::FromStr for RadiusMode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "low" => Ok(RadiusMode::Low),
            "high" => Ok(RadiusMode::High),
            "mean" => Ok(RadiusMode::Mean),
            "max" => Ok(RadiusMode::Max),
            other => Err(Error::Config(format!("unknown radius mode {other:?}"))),
        }
    }
}

/// Semicircle of radius `r` centered at lambda = 1.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SemicircleFit {
    pub r: f64,
    pub mode: RadiusMode,
}

impl SemicircleFit {
    /// Validates 0 < r < 1.
    pub fn new(r: f64, mode: RadiusMode) -> Result<Self> {
        if !(r > 0.0 && r < 1.0) {
            return Err(Error::RadiusOutOfRange(r));
        }
        Ok(SemicircleFit { r, mode })
    }

    pub fn from_spectrum(lambda2: f64, lambda_n: f64, mode: RadiusMode) -> Result<Self> {
        let low = 1.0 - lambda2;
        let high = lambda_n - 1.0;
        let r = match mode {
            RadiusMode::Low => low,
            RadiusMode::High => high,
            RadiusMode::Mean => 0.5 * (lambda_n - lambda2),
            RadiusMode::Max => low.max(high),
        };
        Self::new(r, mode)
    }
}

/// Semicircle density 2/(pi r^2) sqrt(r^2 - (lambda-1)^2) on (1-r, 1+r),
/// zero outside.
pub fn semicircle_density(lambda: f64, fit: &SemicircleFit) -> f64 {
    let x = lambda - 1.0;
    let r = fit.r;
    if x.abs() >= r {
        return 0.0;
    }
    // (r - x)(r + x) instead of r^2 - x^2: exact near the support edges.
    2.0 / (std::f64::consts::PI * r * r) * ((r - x) * (r + x)).sqrt()
}

/// Classical Wigner density (1/(2 pi sigma^2)) sqrt(4 sigma^2 - lambda^2)
/// for |lambda| < 2 sigma, zero outside.
pub fn wigner_density(lambda: f64, sigma: f64) -> f64 {
    assert!(sigma > 0.0, "sigma must be positive");
    let bound = 2.0 * sigma;
    if lambda.abs() >= bound {
        return 0.0;
    }
    (bound * bound - lambda * lambda).sqrt() / (2.0 * std::f64::consts::PI * sigma * sigma)
}

/// Antiderivative of the semicircle density at offset x = lambda - 1:
/// (asin(u) + u sqrt(1 - u^2)) / pi with u = x/r. Written in u with
/// (1-u)(1+u) so edge bins do not lose digits to cancellation.
fn semicircle_cdf_part(x: f64, r: f64) -> f64 {
    let u = (x / r).clamp(-1.0, 1.0);
    (u.asin() + u * ((1.0 - u) * (1.0 + u)).sqrt()) / std::f64::consts::PI
}

/// Probability mass the fitted semicircle assigns to the bin
/// [theta - h_b/2, theta + h_b/2], by the closed-form antiderivative with
/// the integration limits clipped to the support.
pub fn bin_probability(theta: f64, h_b: f64, fit: &SemicircleFit) -> f64 {
    let lo = theta - 1.0 - h_b / 2.0;
    let hi = theta - 1.0 + h_b / 2.0;
    if hi <= -fit.r || lo >= fit.r {
        return 0.0;
    }
    semicircle_cdf_part(hi, fit.r) - semicircle_cdf_part(lo, fit.r)
}

/// Frequency histogram of the bulk eigenvalues lambda_2..lambda_n. The
/// smallest eigenvalue is dropped (it is the theoretical zero). Bins are
/// half-open with the last bin closed above; frequencies are counts over
/// n - 1, so they sum to one exactly in rational terms.
#[derive(Clone, Debug)]
pub struct EigenHistogram {
    pub n_h: usize,
    pub h_b: f64,
    /// Bin centers theta_i = lambda_2 + (i - 1/2) h_b.
    pub theta: Vec<f64>,
    pub counts: Vec<u32>,
    /// Normalized frequencies `counts[i] / (n - 1)`.
    pub f: Vec<f64>,
}

impl EigenHistogram {
    pub fn from_decomposition(dec: &SpectralDecomposition, n_h: usize) -> Result<Self> {
        let n = dec.n();
        if n < 3 {
            return Err(Error::Config(format!(
                "histogram needs at least 3 eigenvalues, got {n}"
            )));
        }
        if n_h < 2 {
            return Err(Error::Config(format!("n_h must be >= 2, got {n_h}")));
        }
        let bulk = &dec.lambdas[1..];
        let lo = bulk[0];
        let hi = *bulk.last().unwrap();
        // Numerically flat bulk (e.g. complete graphs) cannot be binned.
        if hi - lo <= 1e-12 * (1.0 + hi.abs()) {
            return Err(Error::DegenerateSpectrum(lo));
        }
        let h_b = (hi - lo) / n_h as f64;
        let mut counts = vec![0u32; n_h];
        for &lam in bulk {
            let idx = (((lam - lo) / h_b).floor() as usize).min(n_h - 1);
            counts[idx] += 1;
        }
        let denom = (n - 1) as f64;
        let theta = (0..n_h)
            .map(|i| lo + (i as f64 + 0.5) * h_b)
            .collect::<Vec<_>>();
        let f = counts.iter().map(|&c| c as f64 / denom).collect();
        Ok(EigenHistogram {
            n_h,
            h_b,
            theta,
            counts,
            f,
        })
    }

    /// Mean relative deviation between the histogram and the fitted
    /// semicircle: (1/n_h) sum |f_i - P_i| / P_i. Every bin must receive
    /// positive semicircle probability.
    pub fn semicircle_relative_error(&self, fit: &SemicircleFit) -> Result<f64> {
        let mut acc = 0.0;
        for i in 0..self.n_h {
            let p = bin_probability(self.theta[i], self.h_b, fit);
            if p <= 0.0 {
                return Err(Error::ZeroBinProbability {
                    index: i,
                    theta: self.theta[i],
                });
            }
            acc += (self.f[i] - p).abs() / p;
        }
        Ok(acc / self.n_h as f64)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::{self, rng_from_seed, WeightDistribution, WeightKind};
    use crate::graph::WeightedGraph;

    fn k_complete(n: usize) -> WeightedGraph {
        let mut links = Vec::new();
        for i in 0..n {
            for j in (i + 1)..n {
                links.push((i, j));
            }
        }
        WeightedGraph::from_links(n, links).unwrap()
    }

    #[test]
    fn laplacian_of_triangle() {
        let g = k_complete(3);
        let m = normalized_laplacian(&g).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                let expect = if i == j { 1.0 } else { -0.5 };
                assert!((m[[i, j]] - expect).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn laplacian_single_edge_weight_independent() {
        for w in [0.1, 1.0, 42.0] {
            let g = WeightedGraph::from_edges(2, [(0, 1, w)]).unwrap();
            let m = normalized_laplacian(&g).unwrap();
            assert!((m[[0, 0]] - 1.0).abs() < 1e-15);
            assert!((m[[0, 1]] + 1.0).abs() < 1e-15);
            assert!((m[[1, 0]] + 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn laplacian_weighted_path_hand_values() {
        // Path 0-1-2 with w01 = 1, w12 = 4: d = (1, 5, 4),
        // N01 = -1/sqrt(5), N12 = -4/sqrt(20) = -2/sqrt(5).
        let g = WeightedGraph::from_edges(3, [(0, 1, 1.0), (1, 2, 4.0)]).unwrap();
        let m = normalized_laplacian(&g).unwrap();
        assert!((m[[0, 1]] + 1.0 / 5.0f64.sqrt()).abs() < 1e-14);
        assert!((m[[1, 2]] + 2.0 / 5.0f64.sqrt()).abs() < 1e-14);
        assert_eq!(m[[0, 2]], 0.0);
    }

    #[test]
    fn laplacian_rejects_isolated_node() {
        let g = WeightedGraph::from_links(3, [(0, 1)]).unwrap();
        assert!(matches!(
            normalized_laplacian(&g),
            Err(Error::ZeroDegree(2))
        ));
    }

    #[test]
    fn complete_graph_spectra() {
        // K_n has eigenvalue 0 once and n/(n-1) with multiplicity n-1.
        for n in [3usize, 4, 7] {
            let dec = decompose(&k_complete(n)).unwrap();
            assert!(dec.lambdas[0].abs() < 1e-12);
            let expect = n as f64 / (n - 1) as f64;
            for l in 1..n {
                assert!(
                    (dec.lambdas[l] - expect).abs() < 1e-12,
                    "K{n} lambda_{l} = {}",
                    dec.lambdas[l]
                );
            }
        }
    }

    #[test]
    fn eig_rejects_asymmetric_input() {
        let mut m = Array2::<f64>::zeros((2, 2));
        m[[0, 1]] = 1.0;
        assert!(matches!(
            eig_sym(&m, &EigOptions::default()),
            Err(Error::NotSymmetric { .. })
        ));
    }

    #[test]
    fn random_graph_spectrum_reconstructs() {
        let g = generators::gen_er(50, 10.0, &mut rng_from_seed(4)).unwrap();
        let dist = WeightDistribution::new(WeightKind::Uniform, 1.0).unwrap();
        let g = generators::assign_weights(&g, &dist, &mut rng_from_seed(5)).unwrap();
        if !g.has_positive_degrees() {
            panic!("seed produced an isolated node; pick another seed");
        }
        let m = normalized_laplacian(&g).unwrap();
        let dec = eig_sym(&m, &EigOptions::default()).unwrap();
        let n = dec.n();
        let mut worst = 0.0f64;
        for i in 0..n {
            for j in 0..n {
                let mut acc = 0.0;
                for l in 0..n {
                    acc += dec.lambdas[l] * dec.vectors[[i, l]] * dec.vectors[[j, l]];
                }
                worst = worst.max((acc - m[[i, j]]).abs());
            }
        }
        assert!(worst < 1e-8, "reconstruction residual {worst}");
        let trace: f64 = dec.lambdas.iter().sum();
        assert!((trace - n as f64).abs() < 1e-8 * n as f64);
    }

    #[test]
    fn histogram_rejects_flat_bulk() {
        let dec = SpectralDecomposition {
            lambdas: vec![0.0, 1.0, 1.0, 1.0],
            vectors: Array2::eye(4),
        };
        assert!(matches!(
            EigenHistogram::from_decomposition(&dec, 2),
            Err(Error::DegenerateSpectrum(_))
        ));
        // Same for a computed flat bulk (complete graph).
        let dec = decompose(&k_complete(4)).unwrap();
        assert!(matches!(
            EigenHistogram::from_decomposition(&dec, 2),
            Err(Error::DegenerateSpectrum(_))
        ));
    }

    #[test]
    fn histogram_small_example() {
        // Eigenvalues {0, 0.5, 1.5} with two bins: one eigenvalue each.
        let dec = SpectralDecomposition {
            lambdas: vec![0.0, 0.5, 1.5],
            vectors: Array2::eye(3),
        };
        let h = EigenHistogram::from_decomposition(&dec, 2).unwrap();
        assert_eq!(h.counts, vec![1, 1]);
        assert_eq!(h.f, vec![0.5, 0.5]);
        assert_eq!(h.theta, vec![0.75, 1.25]);
        let total: u32 = h.counts.iter().sum();
        assert_eq!(total as usize, dec.n() - 1);
        // The unweighted path has spectrum {0, 1, 2}: both ends land in the
        // outer bins, the last bin is closed above.
        let path = WeightedGraph::from_links(3, [(0, 1), (1, 2)]).unwrap();
        let dec = decompose(&path).unwrap();
        let h = EigenHistogram::from_decomposition(&dec, 2).unwrap();
        assert_eq!(h.counts, vec![1, 1]);
    }

    #[test]
    fn semicircle_density_values() {
        let fit = SemicircleFit::new(0.5, RadiusMode::Mean).unwrap();
        // Peak 2/(pi r) at the center.
        assert!((semicircle_density(1.0, &fit) - 4.0 / std::f64::consts::PI).abs() < 1e-14);
        assert_eq!(semicircle_density(1.5, &fit), 0.0);
        assert_eq!(semicircle_density(0.5, &fit), 0.0);
    }

    #[test]
    fn wigner_density_values() {
        assert!((wigner_density(0.0, 1.0) - 1.0 / std::f64::consts::PI).abs() < 1e-14);
        assert_eq!(wigner_density(2.0, 1.0), 0.0);
        assert_eq!(wigner_density(-2.0, 1.0), 0.0);
    }

    /// Recursive Simpson oracle with interval bisection, independent of the
    /// closed forms it checks. Handles the square-root endpoints by plain
    /// refinement.
    fn simpson_oracle(f: &impl Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
        #[allow(clippy::too_many_arguments)]
        fn rec(
            f: &impl Fn(f64) -> f64,
            a: f64,
            b: f64,
            fa: f64,
            fm: f64,
            fb: f64,
            whole: f64,
            tol: f64,
            depth: usize,
        ) -> f64 {
            let m = 0.5 * (a + b);
            let lm = 0.5 * (a + m);
            let rm = 0.5 * (m + b);
            let (flm, frm) = (f(lm), f(rm));
            let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
            let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
            if depth == 0 || (left + right - whole).abs() <= 15.0 * tol {
                return left + right + (left + right - whole) / 15.0;
            }
            rec(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1)
                + rec(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1)
        }
        let m = 0.5 * (a + b);
        let (fa, fm, fb) = (f(a), f(m), f(b));
        let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
        rec(f, a, b, fa, fm, fb, whole, tol, 52)
    }

    #[test]
    fn semicircle_density_integrates_to_one() {
        let fit = SemicircleFit::new(0.37, RadiusMode::Mean).unwrap();
        let total = simpson_oracle(
            &|x| semicircle_density(x, &fit),
            1.0 - fit.r,
            1.0 + fit.r,
            1e-12,
        );
        assert!((total - 1.0).abs() < 1e-10, "integral {total}");
    }

    #[test]
    fn wigner_density_integrates_to_one() {
        let sigma = 0.8;
        let total = simpson_oracle(&|x| wigner_density(x, sigma), -1.6, 1.6, 1e-12);
        assert!((total - 1.0).abs() < 1e-10, "integral {total}");
    }

    #[test]
    fn bin_probability_whole_support_and_outside() {
        let fit = SemicircleFit::new(0.4, RadiusMode::Mean).unwrap();
        assert!((bin_probability(1.0, 2.0, &fit) - 1.0).abs() < 1e-14);
        assert_eq!(bin_probability(2.0, 0.5, &fit), 0.0);
        assert_eq!(bin_probability(0.0, 0.5, &fit), 0.0);
    }

    #[test]
    fn bin_probability_matches_quadrature() {
        let fit = SemicircleFit::new(0.5, RadiusMode::Mean).unwrap();
        for (theta, h) in [(1.0, 0.1), (0.62, 0.07), (1.48, 0.09), (0.78, 0.25)] {
            let direct = bin_probability(theta, h, &fit);
            let quad = simpson_oracle(
                &|x| semicircle_density(x, &fit),
                (theta - h / 2.0).max(1.0 - fit.r),
                (theta + h / 2.0).min(1.0 + fit.r),
                1e-14,
            );
            assert!(
                (direct - quad).abs() < 1e-12,
                "theta {theta}: {direct} vs {quad}"
            );
        }
    }

    #[test]
    fn bin_probabilities_tile_support() {
        let fit = SemicircleFit::new(0.61, RadiusMode::Mean).unwrap();
        let n_h = 37;
        let h = 2.0 * fit.r / n_h as f64;
        let total: f64 = (0..n_h)
            .map(|i| bin_probability(1.0 - fit.r + (i as f64 + 0.5) * h, h, &fit))
            .sum();
        assert!((total - 1.0).abs() < 1e-10, "sum {total}");
    }

    #[test]
    fn relative_error_zero_when_exact() {
        let fit = SemicircleFit::new(0.5, RadiusMode::Mean).unwrap();
        let n_h = 10;
        let h_b = 2.0 * fit.r / n_h as f64;
        let theta: Vec<f64> = (0..n_h)
            .map(|i| 1.0 - fit.r + (i as f64 + 0.5) * h_b)
            .collect();
        let f: Vec<f64> = theta
            .iter()
            .map(|&t| bin_probability(t, h_b, &fit))
            .collect();
        let hist = EigenHistogram {
            n_h,
            h_b,
            theta,
            counts: vec![0; n_h],
            f,
        };
        let eps = hist.semicircle_relative_error(&fit).unwrap();
        assert!(eps < 1e-14);
    }

    #[test]
    fn relative_error_reports_empty_bins() {
        // A fit whose support misses the first bin.
        let hist = EigenHistogram {
            n_h: 2,
            h_b: 0.1,
            theta: vec![0.1, 1.0],
            counts: vec![1, 1],
            f: vec![0.5, 0.5],
        };
        let fit = SemicircleFit::new(0.3, RadiusMode::Mean).unwrap();
        assert!(matches!(
            hist.semicircle_relative_error(&fit),
            Err(Error::ZeroBinProbability { index: 0, .. })
        ));
    }

    #[test]
    fn radius_modes() {
        let fit = SemicircleFit::from_spectrum(0.4, 1.5, RadiusMode::Low).unwrap();
        assert!((fit.r - 0.6).abs() < 1e-15);
        let fit = SemicircleFit::from_spectrum(0.4, 1.5, RadiusMode::High).unwrap();
        assert!((fit.r - 0.5).abs() < 1e-15);
        let fit = SemicircleFit::from_spectrum(0.4, 1.5, RadiusMode::Mean).unwrap();
        assert!((fit.r - 0.55).abs() < 1e-15);
        let fit = SemicircleFit::from_spectrum(0.4, 1.5, RadiusMode::Max).unwrap();
        assert!((fit.r - 0.6).abs() < 1e-15);
        assert!(SemicircleFit::from_spectrum(1.0, 1.0, RadiusMode::Mean).is_err());
    }
}
