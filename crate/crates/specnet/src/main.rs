//! Command-line experiment driver.

use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use specnet::error::{Error, Result};
use specnet::generators::{generate_connected, DEFAULT_MAX_ATTEMPTS};
use specnet::graph::{read_edge_list_path, WeightedGraph};
use specnet::harness::{
    emit_figure, parse_config, run_sweep_rows, write_config_echo, write_json,
    write_sweep_csv, ExperimentConfig, FigureId,
};
use specnet::spectral::{bin_probability, decompose, EigenHistogram};
use specnet::walk::{self, mc_first_arrival, ArrivalReport};

#[derive(Parser)]
#[command(
    name = "specnet",
    version,
    about = "Spectral analysis of randomly weighted random networks"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
enum Format {
    Csv,
    Json,
}

/// Flags shared by all subcommands; unset flags fall back to the config
/// file (if any), then to the defaults.
#[derive(Args)]
struct CommonOpts {
    /// Topology model: er | ba
    #[arg(long)]
    model: Option<specnet::Model>,

    /// Number of nodes
    #[arg(long)]
    n: Option<usize>,

    /// Target mean link count; repeat the flag for a sweep list
    #[arg(long = "k-ave")]
    k_ave: Vec<f64>,

    /// BA link-cut probability (0 <= q < 1)
    #[arg(long)]
    q: Option<f64>,

    /// Link-weight law: constant | uniform | exponential
    #[arg(long)]
    weights: Option<specnet::WeightKind>,

    /// Mean link weight
    #[arg(long = "w-mean")]
    w_mean: Option<f64>,

    /// Number of histogram bins
    #[arg(long = "n-h")]
    n_h: Option<usize>,

    /// Trials per configuration
    #[arg(long)]
    trials: Option<usize>,

    /// Base RNG seed (trial t uses seed + t)
    #[arg(long)]
    seed: Option<u64>,

    /// Semicircle radius mode: low | high | mean | max
    #[arg(long = "r-mode")]
    r_mode: Option<specnet::RadiusMode>,

    /// Flat key = value config file; explicit flags override it
    #[arg(long)]
    config: Option<PathBuf>,

    /// Output path (stdout when omitted)
    #[arg(long)]
    out: Option<PathBuf>,

    /// Output format for tabular results
    #[arg(long, value_enum, default_value = "csv")]
    format: Format,
}

#[derive(Subcommand)]
enum Command {
    /// Generate one connected weighted network and write its edge list
    Generate {
        #[command(flatten)]
        common: CommonOpts,
    },
    /// Eigenvalues of the normalized Laplacian
    Spectrum {
        #[command(flatten)]
        common: CommonOpts,
        /// Read the graph from an edge-list file instead of generating
        #[arg(long)]
        input: Option<PathBuf>,
    },
    /// Eigenvalue frequency histogram with the fitted semicircle
    Hist {
        #[command(flatten)]
        common: CommonOpts,
        #[arg(long)]
        input: Option<PathBuf>,
    },
    /// First-arrival report: spectral times vs Monte Carlo
    Walk {
        #[command(flatten)]
        common: CommonOpts,
        #[arg(long)]
        input: Option<PathBuf>,
        /// Source node of the walk
        #[arg(long, default_value_t = 0)]
        source: usize,
        /// Monte Carlo runs
        #[arg(long, default_value_t = 1000)]
        runs: usize,
        /// Step cap per run (default 100 n ln n)
        #[arg(long = "t-max")]
        t_max: Option<usize>,
        /// Where to write the summary JSON (default <out>.summary.json)
        #[arg(long)]
        summary: Option<PathBuf>,
    },
    /// Sweep k_ave, aggregating trials per value
    Sweep {
        #[command(flatten)]
        common: CommonOpts,
    },
    /// Emit plot-ready data for one figure (fig1..fig7)
    Figure {
        #[command(flatten)]
        common: CommonOpts,
        /// Figure id: fig1..fig7
        #[arg(long)]
        fig: FigureId,
    },
}

/// Merges config file and flags into the experiment configuration.
fn resolve_config(common: &CommonOpts) -> Result<ExperimentConfig> {
    let mut cfg = match &common.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)?;
            parse_config(&text)
                .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?
        }
        None => ExperimentConfig::default(),
    };
    if let Some(m) = common.model {
        cfg.model = m;
    }
    if let Some(n) = common.n {
        cfg.n = n;
    }
    if !common.k_ave.is_empty() {
        cfg.k_ave = common.k_ave.clone();
    }
    if let Some(q) = common.q {
        cfg.q = q;
    }
    if let Some(wk) = common.weights {
        cfg.weights = wk;
    }
    if let Some(wm) = common.w_mean {
        cfg.w_mean = wm;
    }
    if let Some(nh) = common.n_h {
        cfg.n_h = nh;
    }
    if let Some(t) = common.trials {
        cfg.trials = t;
    }
    if let Some(s) = common.seed {
        cfg.seed = s;
    }
    if let Some(rm) = common.r_mode {
        cfg.r_mode = rm;
    }
    Ok(cfg)
}

/// Single-k commands use one k_ave: the flag value if given, 20 otherwise.
fn resolve_single_k(common: &CommonOpts, cfg: &mut ExperimentConfig) -> Result<f64> {
    if common.k_ave.len() > 1 {
        return Err(Error::Config(
            "this command takes a single --k-ave value".into(),
        ));
    }
    let k = match common.k_ave.first() {
        Some(&k) => k,
        None if common.config.is_some() => {
            if cfg.k_ave.len() != 1 {
                return Err(Error::Config(format!(
                    "config file lists {} k_ave values; this command takes one \
                     (pass --k-ave)",
                    cfg.k_ave.len()
                )));
            }
            cfg.k_ave[0]
        }
        None => 20.0,
    };
    cfg.k_ave = vec![k];
    Ok(k)
}

fn open_out(path: &Option<PathBuf>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(std::io::BufWriter::new(std::fs::File::create(p)?)),
        None => Box::new(std::io::BufWriter::new(std::io::stdout())),
    })
}

/// Loads the input graph or generates one from the configuration.
fn load_or_generate(
    input: &Option<PathBuf>,
    cfg: &ExperimentConfig,
    k_ave: f64,
) -> Result<(WeightedGraph, String)> {
    match input {
        Some(path) => {
            let g = read_edge_list_path(path)?;
            Ok((g, path.display().to_string()))
        }
        None => {
            let dist = cfg.distribution()?;
            let gen_cfg = cfg.gen_config(k_ave, cfg.seed);
            gen_cfg.validate()?;
            let (g, _) = generate_connected(&gen_cfg, &dist, DEFAULT_MAX_ATTEMPTS)?;
            Ok((g, "generated".to_string()))
        }
    }
}

fn cmd_generate(common: CommonOpts) -> Result<()> {
    let mut cfg = resolve_config(&common)?;
    let k = resolve_single_k(&common, &mut cfg)?;
    let dist = cfg.distribution()?;
    let gen_cfg = cfg.gen_config(k, cfg.seed);
    gen_cfg.validate()?;
    let (g, _) = generate_connected(&gen_cfg, &dist, DEFAULT_MAX_ATTEMPTS)?;
    let mut out = open_out(&common.out)?;
    g.write_edge_list(&mut out)?;
    Ok(())
}

fn cmd_spectrum(common: CommonOpts, input: Option<PathBuf>) -> Result<()> {
    let mut cfg = resolve_config(&common)?;
    let k = resolve_single_k(&common, &mut cfg)?;
    let (g, source) = load_or_generate(&input, &cfg, k)?;
    let dec = decompose(&g)?;
    let mut out = open_out(&common.out)?;
    match common.format {
        Format::Csv => {
            write_config_echo(
                &mut out,
                &cfg,
                &[
                    ("input", source),
                    ("lambda2", dec.lambda2().to_string()),
                    ("lambda_n", dec.lambda_max().to_string()),
                ],
            )?;
            writeln!(out, "index,lambda")?;
            for (i, l) in dec.lambdas.iter().enumerate() {
                writeln!(out, "{},{}", i + 1, l)?;
            }
        }
        Format::Json => {
            write_json(&mut out, &cfg, "lambdas", &dec.lambdas)?;
        }
    }
    Ok(())
}

fn cmd_hist(common: CommonOpts, input: Option<PathBuf>) -> Result<()> {
    let mut cfg = resolve_config(&common)?;
    let k = resolve_single_k(&common, &mut cfg)?;
    let (g, source) = load_or_generate(&input, &cfg, k)?;
    let dec = decompose(&g)?;
    let hist = EigenHistogram::from_decomposition(&dec, cfg.n_h)?;
    let fit = dec.fit_radius(cfg.r_mode)?;
    let mut out = open_out(&common.out)?;
    match common.format {
        Format::Csv => {
            write_config_echo(&mut out, &cfg, &[("input", source), ("r", fit.r.to_string())])?;
            writeln!(out, "theta,f_N,P")?;
            for i in 0..hist.n_h {
                let p = bin_probability(hist.theta[i], hist.h_b, &fit);
                writeln!(out, "{},{},{}", hist.theta[i], hist.f[i], p)?;
            }
        }
        Format::Json => {
            let payload = serde_json::json!({
                "r": fit.r,
                "h_b": hist.h_b,
                "theta": hist.theta,
                "f": hist.f,
                "P": hist
                    .theta
                    .iter()
                    .map(|&t| bin_probability(t, hist.h_b, &fit))
                    .collect::<Vec<_>>(),
            });
            write_json(&mut out, &cfg, "histogram", &payload)?;
        }
    }
    Ok(())
}

fn cmd_walk(
    common: CommonOpts,
    input: Option<PathBuf>,
    source: usize,
    runs: usize,
    t_max: Option<usize>,
    summary: Option<PathBuf>,
) -> Result<()> {
    let mut cfg = resolve_config(&common)?;
    let k = resolve_single_k(&common, &mut cfg)?;
    let (g, origin) = load_or_generate(&input, &cfg, k)?;
    let dec = decompose(&g)?;
    let fit = dec.fit_radius(cfg.r_mode)?;
    let report = ArrivalReport::new(&dec, &g, source, &fit)?;
    let t_max = t_max.unwrap_or_else(|| walk::default_t_max(g.node_count()));
    let mc = mc_first_arrival(&g, source, runs, t_max, cfg.seed)?;

    let summary_doc = serde_json::json!({
        "source": source,
        "runs": runs,
        "t_max": t_max,
        "m": report.m,
        "m_tilde": report.m_tilde,
        "eps_m": report.eps_m,
        "r": fit.r,
        "lambda2": dec.lambda2(),
        "lambda_n": dec.lambda_max(),
    });

    let mut out = open_out(&common.out)?;
    match common.format {
        Format::Csv => {
            write_config_echo(
                &mut out,
                &cfg,
                &[
                    ("input", origin),
                    ("source", source.to_string()),
                    ("runs", runs.to_string()),
                    ("t_max", t_max.to_string()),
                ],
            )?;
            writeln!(out, "node,f_spectral,mc_mean,mc_stderr")?;
            for i in 0..g.node_count() {
                writeln!(
                    out,
                    "{},{},{},{}",
                    i, report.f[i], mc.mean[i], mc.stderr[i]
                )?;
            }
        }
        Format::Json => {
            let payload = serde_json::json!({
                "summary": summary_doc,
                "f_spectral": report.f,
                "mc_mean": mc.mean,
                "mc_stderr": mc.stderr,
            });
            write_json(&mut out, &cfg, "walk", &payload)?;
        }
    }
    drop(out);

    // The CSV path also writes the summary JSON next to the report.
    if common.format == Format::Csv {
        let summary_path = summary.or_else(|| {
            common
                .out
                .as_ref()
                .map(|p| PathBuf::from(format!("{}.summary.json", p.display())))
        });
        if let Some(path) = summary_path {
            let mut f = std::io::BufWriter::new(std::fs::File::create(&path)?);
            serde_json::to_writer_pretty(&mut f, &summary_doc)
                .map_err(|e| Error::Config(format!("json encoding failed: {e}")))?;
            writeln!(f)?;
        }
    }
    Ok(())
}

fn cmd_sweep(common: CommonOpts) -> Result<()> {
    let cfg = resolve_config(&common)?;
    cfg.validate()?;
    let rows = run_sweep_rows(&cfg);
    let mut ok_rows = Vec::new();
    let mut failed = 0usize;
    for (k, row) in rows {
        match row {
            Ok(r) => ok_rows.push(r),
            Err(e) => {
                failed += 1;
                eprintln!("sweep row k_ave = {k} failed: {e}");
            }
        }
    }
    let mut out = open_out(&common.out)?;
    match common.format {
        Format::Csv => write_sweep_csv(&mut out, &cfg, &ok_rows)?,
        Format::Json => write_json(&mut out, &cfg, "rows", &ok_rows)?,
    }
    drop(out);
    if failed > 0 {
        return Err(Error::SweepRowsFailed { failed });
    }
    Ok(())
}

fn cmd_figure(common: CommonOpts, fig: FigureId) -> Result<()> {
    let mut cfg = resolve_config(&common)?;
    // Per-figure k_ave defaults when no flag was given: single-network
    // figures use 20, histogram panels use {8, 36}, sweeps keep the grid.
    if common.k_ave.is_empty() && common.config.is_none() {
        match fig {
            FigureId::Fig1 => cfg.k_ave = vec![20.0],
            FigureId::Fig3 | FigureId::Fig4 => cfg.k_ave = vec![8.0, 36.0],
            _ => {}
        }
    }
    let mut out = open_out(&common.out)?;
    emit_figure(fig, &cfg, &mut out)
}

fn run() -> Result<()> {
    let cli = Cli::parse();
    match cli.command {
        Command::Generate { common } => cmd_generate(common),
        Command::Spectrum { common, input } => cmd_spectrum(common, input),
        Command::Hist { common, input } => cmd_hist(common, input),
        Command::Walk {
            common,
            input,
            source,
            runs,
            t_max,
            summary,
        } => cmd_walk(common, input, source, runs, t_max, summary),
        Command::Sweep { common } => cmd_sweep(common),
        Command::Figure { common, fig } => cmd_figure(common, fig),
    }
}

fn main() -> std::process::ExitCode {
    match run() {
        Ok(()) => std::process::ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            let mut source = std::error::Error::source(&e);
            while let Some(s) = source {
                eprintln!("  caused by: {s}");
                source = s.source();
            }
            std::process::ExitCode::from(e.exit_code() as u8)
        }
    }
}
