use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use spac::attack::ApproxParams;
use spac::gcn::{train_gcn, GcnConfig, DEFAULT_RETRAIN_EVERY};
use spac::laplacian::laplacian_of;
use spac::spectral::eigenvalues;
use spac_bench::experiment::{attack_once, default_beta, DatasetSource, ExperimentError, ExperimentSpec};
use spac_bench::report::{edge_bands_csv, fmt6, read_report, write_report_tables};
use spac_bench::synthetic::{SyntheticKind, SyntheticOptions};
use spac_bench::{run_experiment, AttackKind, Stage};

#[derive(Parser)]
#[command(name = "spac", version, about = "Spectral structural attacks on graphs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one attack and write its result as JSON.
    Attack(AttackArgs),
    /// Run a grid of attacks, budgets and seeds and write report files.
    Experiment(ExperimentArgs),
    /// Write the clean spectrum and band-limited edge reconstructions.
    Spectra(SpectraArgs),
    /// Regenerate the CSV tables from an existing report.json.
    Report(ReportArgs),
}

#[derive(Args)]
struct DatasetArgs {
    /// Directory holding edges.tsv and optionally features.csv, labels.csv, split.json.
    #[arg(long, conflicts_with = "synthetic", required_unless_present = "synthetic")]
    dataset: Option<PathBuf>,
    /// karate, sbm:<sizes>:<p_in>:<p_out> or rgg:<n>:<radius>.
    #[arg(long)]
    synthetic: Option<SyntheticKind>,
    /// Seed of the synthetic generator.
    #[arg(long, default_value_t = 0)]
    graph_seed: u64,
    #[arg(long, default_value_t = 16)]
    feature_dim: usize,
    #[arg(long, default_value_t = 1.0)]
    feature_signal: f64,
    #[arg(long, default_value_t = 1.0)]
    feature_noise: f64,
}

impl DatasetArgs {
    fn source(&self) -> DatasetSource {
        match (&self.dataset, &self.synthetic) {
            (Some(dir), _) => DatasetSource::Files(dir.clone()),
            (None, Some(kind)) => DatasetSource::Synthetic {
                kind: kind.clone(),
                seed: self.graph_seed,
                options: SyntheticOptions {
                    feature_dim: self.feature_dim,
                    feature_signal: self.feature_signal,
                    feature_noise: self.feature_noise,
                    ..SyntheticOptions::default()
                },
            },
            (None, None) => unreachable!("clap requires one of --dataset/--synthetic"),
        }
    }
}

#[derive(Args)]
struct AttackParams {
    #[arg(long, default_value_t = 100)]
    steps: usize,
    /// Spectral weight for white-box attacks (default depends on the dataset).
    #[arg(long)]
    beta: Option<f64>,
    #[arg(long, default_value_t = 128)]
    k1: usize,
    #[arg(long, default_value_t = 64)]
    k2: usize,
    #[arg(long, default_value_t = 10)]
    m: usize,
    /// C&W confidence.
    #[arg(long, default_value_t = 0.0)]
    kappa: f64,
    #[arg(long, value_parser = |s: &str| s.parse::<Stage>(), default_value = "evasion")]
    stage: Stage,
    #[arg(long, default_value_t = 200)]
    epochs: usize,
    #[arg(long, default_value_t = 0.01)]
    learning_rate: f64,
}

#[derive(Args)]
struct AttackArgs {
    #[command(flatten)]
    data: DatasetArgs,
    #[arg(long, value_parser = |s: &str| s.parse::<AttackKind>(), default_value = "SPAC")]
    attack: AttackKind,
    #[arg(long, default_value_t = 0.05)]
    epsilon: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[command(flatten)]
    params: AttackParams,
    /// Output JSON file (stdout when omitted).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ExperimentArgs {
    #[command(flatten)]
    data: DatasetArgs,
    /// Comma-separated attack names.
    #[arg(long, value_delimiter = ',', value_parser = |s: &str| s.parse::<AttackKind>(), default_value = "SPAC,Random")]
    attack: Vec<AttackKind>,
    /// Comma-separated budgets ε.
    #[arg(long, value_delimiter = ',', default_value = "0.05")]
    epsilon: Vec<f64>,
    /// Comma-separated seeds.
    #[arg(long, value_delimiter = ',', default_value = "0,1,2,3,4")]
    seed: Vec<u64>,
    #[command(flatten)]
    params: AttackParams,
    /// Components per band in edge_bands.csv.
    #[arg(long)]
    band_k: Option<usize>,
    #[arg(long, default_value = "spac-out")]
    out: PathBuf,
}

#[derive(Args)]
struct SpectraArgs {
    #[command(flatten)]
    data: DatasetArgs,
    /// Components per band.
    #[arg(long)]
    k: Option<usize>,
    #[arg(long, default_value = "spac-out")]
    out: PathBuf,
}

#[derive(Args)]
struct ReportArgs {
    /// report.json written by `spac experiment`.
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    out: PathBuf,
}

fn gcn_config(p: &AttackParams, seed: u64) -> GcnConfig {
    GcnConfig { epochs: p.epochs, learning_rate: p.learning_rate, seed, ..GcnConfig::default() }
}

fn run(cli: Cli) -> Result<(), ExperimentError> {
    match cli.command {
        Command::Attack(a) => {
            let source = a.data.source();
            let g = source.load()?;
            let beta = a.params.beta.unwrap_or_else(|| default_beta(&source.name(), g.density()));
            let gcn = gcn_config(&a.params, a.seed);
            let victim = if a.attack.is_white_box() { Some(train_gcn(&g, &gcn)?) } else { None };
            let cfg = spac::attack::AttackConfig {
                budget_ratio: a.epsilon,
                steps: a.params.steps,
                beta,
                seed: a.seed,
                ..Default::default()
            };
            let approx = ApproxParams { k1: a.params.k1, k2: a.params.k2, m: a.params.m };
            let result = attack_once(
                &g,
                a.attack,
                a.params.stage,
                &cfg,
                approx,
                a.params.kappa,
                victim.as_ref(),
                &gcn,
                DEFAULT_RETRAIN_EVERY,
            )?;
            let json = serde_json::to_string_pretty(&result).map_err(std::io::Error::other)?;
            match a.out {
                Some(path) => fs::write(path, json)?,
                None => {
                    let mut out = std::io::stdout().lock();
                    match writeln!(out, "{json}") {
                        Err(e) if e.kind() == std::io::ErrorKind::BrokenPipe => {}
                        other => other?,
                    }
                }
            }
        }
        Command::Experiment(e) => {
            let mut spec = ExperimentSpec::new(e.data.source(), e.attack, e.params.stage, e.epsilon, e.seed);
            spec.output_dir = Some(e.out.clone());
            spec.steps = e.params.steps;
            spec.beta = e.params.beta;
            spec.approx = ApproxParams { k1: e.params.k1, k2: e.params.k2, m: e.params.m };
            spec.kappa = e.params.kappa;
            spec.gcn = gcn_config(&e.params, 0);
            spec.band_k = e.band_k;
            let outcome = run_experiment(&spec)?;
            eprintln!("{} cells written to {}", outcome.report.cells.len(), e.out.display());
        }
        Command::Spectra(s) => {
            let g = s.data.source().load()?;
            fs::create_dir_all(&s.out)?;
            let eigs = eigenvalues(laplacian_of(g.adjacency())?.view())?;
            let mut csv = String::from("rank,eigenvalue\n");
            for (i, v) in eigs.iter().enumerate() {
                csv.push_str(&format!("{i},{}\n", fmt6(*v)));
            }
            fs::write(s.out.join("eigenvalues.csv"), csv)?;
            let k = s.k.unwrap_or_else(|| g.n().div_ceil(10)).min(g.n());
            fs::write(s.out.join("edge_bands.csv"), edge_bands_csv(&g, k)?)?;
        }
        Command::Report(r) => {
            let report = read_report(&r.input)?;
            write_report_tables(&r.out, &report)?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    tracing_subscriber::fmt()
        .with_env_filter(tracing_subscriber::EnvFilter::try_from_default_env().unwrap_or_else(|_| "warn".into()))
        .with_writer(std::io::stderr)
        .init();
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
