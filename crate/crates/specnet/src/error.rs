use thiserror::Error;

/// Errors produced anywhere in the crate.
///
/// The CLI maps these onto process exit codes: configuration problems exit
/// with 1, everything that goes wrong while generating or computing (bad
/// input data, numerics, I/O) exits with 2.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("{path}:{line}: {msg}")]
    Parse {
        path: String,
        line: usize,
        msg: String,
    },

    #[error("self-loop at node {0}")]
    SelfLoop(usize),

    #[error("duplicate edge ({0}, {1})")]
    DuplicateEdge(usize, usize),

    #[error("edge ({i}, {j}) has non-positive weight {w}")]
    NonPositiveWeight { i: usize, j: usize, w: f64 },

    #[error("node id {id} out of range for {n} nodes")]
    NodeOutOfRange { id: usize, n: usize },

    #[error("node {0} has zero degree")]
    ZeroDegree(usize),

    #[error("graph is not connected (spectral gap {gap:.3e} <= {tol:.1e})")]
    Disconnected { gap: f64, tol: f64 },

    #[error("matrix is not symmetric: |a[{i},{j}] - a[{j},{i}]| = {delta:.3e}")]
    NotSymmetric { i: usize, j: usize, delta: f64 },

    #[error("eigensolver did not converge within {0} iterations")]
    NoConvergence(usize),

    #[error("degenerate spectrum: all bulk eigenvalues equal {0}")]
    DegenerateSpectrum(f64),

    #[error("semicircle radius {0} outside (0, 1)")]
    RadiusOutOfRange(f64),

    #[error("bin {index} (theta = {theta}) has zero semicircle probability")]
    ZeroBinProbability { index: usize, theta: f64 },

    #[error("quadrature did not converge (depth {0})")]
    QuadratureFailed(usize),

    #[error("walker never reached node {node} within {t_max} steps")]
    CensoredEstimate { node: usize, t_max: usize },

    #[error("no connected graph after {attempts} attempts (n = {n}, k_ave = {k_ave})")]
    GenerationFailed { attempts: usize, n: usize, k_ave: f64 },

    #[error("{failed} sweep row(s) failed; see messages above")]
    SweepRowsFailed { failed: usize },

    #[error("tail fit needs >= 3 distinct degrees above {k_low}, found {found}")]
    TailFit { k_low: usize, found: usize },

    #[error("trial {trial} (k_ave = {k_ave}): {source}")]
    Trial {
        trial: usize,
        k_ave: f64,
        #[source]
        source: Box<Error>,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Process exit code the CLI uses for this error.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_) => 1,
            Error::Trial { source, .. } => source.exit_code(),
            _ => 2,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
