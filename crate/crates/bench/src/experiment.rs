//! Experiment orchestration: every (attack, ε, seed) cell trains or reuses a
//! victim, attacks, and scores the result.

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;
use std::time::Instant;

use ndarray::Array2;
use serde::{Deserialize, Serialize};
use spac::attack::{pgd_spectral_attack, ApproxParams, AttackConfig, AttackResult};
use spac::baselines::{dice_attack, random_attack};
use spac::gcn::{
    evaluate_misclassification, run_white_box_attack, train_gcn, AttackLossKind, AttackObjectiveSpec, AttackStage,
    GcnConfig, GcnModel, DEFAULT_RETRAIN_EVERY,
};
use spac::graph::Graph;
use spac::laplacian::{laplacian_of, laplacian_of_lenient};
use spac::perturbation::FlipSet;
use spac::spectral::{eigenvalues, spectral_distance};
use spac::SpacError;
use thiserror::Error;

use crate::io::{load_dataset, DatasetPaths, LoadError};
use crate::report::{sig6, write_outputs, Timing};
use crate::spectra::{flip_counts, FlipCounts};
use crate::synthetic::{generate, SyntheticKind, SyntheticOptions};

#[derive(Debug, Error)]
pub enum ExperimentError {
    #[error(transparent)]
    Load(#[from] LoadError),
    #[error(transparent)]
    Spac(#[from] SpacError),
    #[error("{0}")]
    Invalid(String),
    #[error("writing outputs: {0}")]
    Output(#[from] std::io::Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum AttackKind {
    #[serde(rename = "SPAC")]
    Spac,
    #[serde(rename = "SPAC-approx")]
    SpacApprox,
    #[serde(rename = "SPAC-CE")]
    SpacCe,
    #[serde(rename = "SPAC-C&W")]
    SpacCw,
    #[serde(rename = "SPAC-Min")]
    SpacMin,
    #[serde(rename = "PGD-CE")]
    PgdCe,
    #[serde(rename = "PGD-C&W")]
    PgdCw,
    #[serde(rename = "Max-Min")]
    MaxMin,
    Random,
    #[serde(rename = "DICE")]
    Dice,
}

impl AttackKind {
    pub const ALL: [AttackKind; 10] = [
        Self::Spac,
        Self::SpacApprox,
        Self::SpacCe,
        Self::SpacCw,
        Self::SpacMin,
        Self::PgdCe,
        Self::PgdCw,
        Self::MaxMin,
        Self::Random,
        Self::Dice,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Self::Spac => "SPAC",
            Self::SpacApprox => "SPAC-approx",
            Self::SpacCe => "SPAC-CE",
            Self::SpacCw => "SPAC-C&W",
            Self::SpacMin => "SPAC-Min",
            Self::PgdCe => "PGD-CE",
            Self::PgdCw => "PGD-C&W",
            Self::MaxMin => "Max-Min",
            Self::Random => "Random",
            Self::Dice => "DICE",
        }
    }

    /// Whether the attack needs a trained model.
    pub fn is_white_box(self) -> bool {
        matches!(self, Self::SpacCe | Self::SpacCw | Self::SpacMin | Self::PgdCe | Self::PgdCw | Self::MaxMin)
    }
}

impl fmt::Display for AttackKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for AttackKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let key = s.trim().to_ascii_lowercase().replace(['_', ' '], "-");
        Self::ALL
            .into_iter()
            .find(|k| k.name().to_ascii_lowercase() == key || (key == "spac-cw" && *k == Self::SpacCw) || (key == "pgd-cw" && *k == Self::PgdCw))
            .ok_or_else(|| {
                let names: Vec<&str> = Self::ALL.iter().map(|k| k.name()).collect();
                format!("unknown attack {s:?}; expected one of {}", names.join(", "))
            })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Stage {
    Evasion,
    Poison,
}

impl FromStr for Stage {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "evasion" => Ok(Self::Evasion),
            "poison" | "poisoning" => Ok(Self::Poison),
            _ => Err(format!("unknown stage {s:?}; expected evasion or poison")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum DatasetSource {
    Files(PathBuf),
    Synthetic { kind: SyntheticKind, seed: u64, options: SyntheticOptions },
}

impl DatasetSource {
    pub fn name(&self) -> String {
        match self {
            Self::Files(dir) => dir.file_name().map_or_else(|| dir.display().to_string(), |f| f.to_string_lossy().into_owned()),
            Self::Synthetic { kind, .. } => kind.to_string(),
        }
    }

    pub fn load(&self) -> Result<Graph<f64>, ExperimentError> {
        Ok(match self {
            Self::Files(dir) => load_dataset(&DatasetPaths::in_dir(dir))?.graph,
            Self::Synthetic { kind, seed, options } => generate(kind, *seed, options)?.graph,
        })
    }
}

/// Default spectral weight: fixed values for the citation and social
/// benchmarks, `100 × density` otherwise.
pub fn default_beta(dataset: &str, density: f64) -> f64 {
    match dataset.to_ascii_lowercase().as_str() {
        "cora" => 1.4,
        "citeseer" => 0.8,
        "blogcatalog" => 13.0,
        "polblogs" => 15.0,
        _ => 100.0 * density,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentSpec {
    pub dataset: DatasetSource,
    pub attacks: Vec<AttackKind>,
    pub stage: Stage,
    pub budgets: Vec<f64>,
    pub seeds: Vec<u64>,
    pub output_dir: Option<PathBuf>,
    pub steps: usize,
    /// `None` picks [`default_beta`].
    pub beta: Option<f64>,
    pub approx: ApproxParams,
    /// C&W confidence.
    pub kappa: f64,
    pub gcn: GcnConfig,
    pub retrain_every: usize,
    /// Number of components in each band of `edge_bands.csv`; `None` uses ⌈n/10⌉.
    pub band_k: Option<usize>,
}

impl ExperimentSpec {
    pub fn new(dataset: DatasetSource, attacks: Vec<AttackKind>, stage: Stage, budgets: Vec<f64>, seeds: Vec<u64>) -> Self {
        Self {
            dataset,
            attacks,
            stage,
            budgets,
            seeds,
            output_dir: None,
            steps: 100,
            beta: None,
            approx: ApproxParams::default(),
            kappa: 0.0,
            gcn: GcnConfig::default(),
            retrain_every: DEFAULT_RETRAIN_EVERY,
            band_k: None,
        }
    }

    pub fn validate(&self) -> Result<(), ExperimentError> {
        if self.seeds.is_empty() {
            return Err(ExperimentError::Invalid("at least one seed is required".into()));
        }
        if self.attacks.is_empty() {
            return Err(ExperimentError::Invalid("at least one attack is required".into()));
        }
        if let Some(eps) = self.budgets.iter().find(|e| !(**e > 0.0 && **e <= 1.0)) {
            return Err(ExperimentError::Invalid(format!("budget {eps} outside (0, 1]")));
        }
        if self.budgets.is_empty() {
            return Err(ExperimentError::Invalid("at least one budget is required".into()));
        }
        if self.kappa < 0.0 {
            return Err(ExperimentError::Invalid("kappa must be non-negative".into()));
        }
        Ok(())
    }

    /// Attack configuration shared by the spectral attacks of one cell.
    pub fn attack_config(&self, epsilon: f64, seed: u64, beta: f64) -> AttackConfig<f64> {
        AttackConfig { budget_ratio: epsilon, steps: self.steps, beta, seed, ..AttackConfig::default() }
    }
}

/// `k1`/`k2` shrunk to fit a graph with `n` nodes.
pub fn fit_approx(ap: ApproxParams, n: usize) -> ApproxParams {
    if ap.k1 + ap.k2 <= n {
        return ap;
    }
    let k2 = ap.k2.min(n / 3);
    ApproxParams { k1: ap.k1.min(n - k2), k2, m: ap.m }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CleanCell {
    pub seed: u64,
    pub misclassification: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Cell {
    pub attack: AttackKind,
    pub epsilon: f64,
    pub seed: u64,
    pub flip_budget: usize,
    pub flips_used: usize,
    pub misclassification: f64,
    pub spectral_distance: f64,
    pub flip_counts: Option<FlipCounts>,
    /// `λ(perturbed) - λ(clean)` paired by rank.
    pub eigenvalue_difference: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub dataset: String,
    pub n: usize,
    pub num_edges: usize,
    pub stage: Stage,
    pub steps: usize,
    pub beta: f64,
    /// Clean eigenvalues, the x-axis of the eigenvalue differences.
    pub clean_eigenvalues: Vec<f64>,
    pub clean: Vec<CleanCell>,
    pub cells: Vec<Cell>,
}

#[derive(Debug, Clone)]
pub struct ExperimentOutcome {
    pub report: Report,
    pub timings: Vec<Timing>,
}

/// Runs one attack against `g`. `victim` is required for white-box attacks.
#[allow(clippy::too_many_arguments)]
pub fn attack_once(
    g: &Graph<f64>,
    kind: AttackKind,
    stage: Stage,
    cfg: &AttackConfig<f64>,
    approx: ApproxParams,
    kappa: f64,
    victim: Option<&GcnModel<f64>>,
    gcn: &GcnConfig,
    retrain_every: usize,
) -> Result<AttackResult<f64>, ExperimentError> {
    let started = Instant::now();
    let budget = cfg.flip_budget(g.num_edges());
    let baseline = |flips: FlipSet| -> Result<AttackResult<f64>, ExperimentError> {
        let perturbed = flips.apply(g)?.adjacency().to_owned();
        Ok(AttackResult {
            flips_used: flips.len(),
            flips,
            perturbed_adjacency: perturbed,
            relaxed: Array2::zeros((0, 0)),
            objective_trace: Vec::new(),
            mass_trace: Vec::new(),
            flip_budget: budget,
            wall_time_secs: started.elapsed().as_secs_f64(),
        })
    };
    if budget == 0 {
        return Err(SpacError::BudgetTooSmall(cfg.budget(g.num_edges())).into());
    }
    let task_stage = match stage {
        Stage::Evasion => AttackStage::Evasion,
        Stage::Poison => AttackStage::Poison,
    };
    let white_box = |loss: AttackLossKind<f64>, stage: AttackStage, beta: f64| -> Result<AttackResult<f64>, ExperimentError> {
        let model = victim.ok_or_else(|| ExperimentError::Invalid(format!("{kind} needs a trained model")))?;
        let spec = AttackObjectiveSpec::new(loss, stage)?;
        let cfg = AttackConfig { beta, ..cfg.clone() };
        Ok(run_white_box_attack(g, &cfg, spec, model, gcn, retrain_every)?)
    };
    match kind {
        AttackKind::Random => baseline(random_attack(g, budget, cfg.seed)?),
        AttackKind::Dice => baseline(dice_attack(g, budget, cfg.seed)?),
        AttackKind::Spac => Ok(pgd_spectral_attack(g, cfg)?),
        AttackKind::SpacApprox => {
            let cfg = AttackConfig { approx: Some(fit_approx(approx, g.n())), ..cfg.clone() };
            Ok(pgd_spectral_attack(g, &cfg)?)
        }
        AttackKind::SpacCe => white_box(AttackLossKind::CrossEntropyTest, task_stage, cfg.beta),
        AttackKind::SpacCw => white_box(AttackLossKind::NegativeCW(kappa), task_stage, cfg.beta),
        AttackKind::SpacMin => white_box(AttackLossKind::CrossEntropyTrain, AttackStage::Poison, cfg.beta),
        AttackKind::PgdCe => white_box(AttackLossKind::CrossEntropyTest, task_stage, 0.0),
        AttackKind::PgdCw => white_box(AttackLossKind::NegativeCW(kappa), task_stage, 0.0),
        AttackKind::MaxMin => white_box(AttackLossKind::CrossEntropyTrain, AttackStage::Poison, 0.0),
    }
}

/// Runs every cell of `spec`, writing outputs to `spec.output_dir` when set.
/// If a cell fails, the cells finished so far are written before the error
/// is returned.
pub fn run_experiment(spec: &ExperimentSpec) -> Result<ExperimentOutcome, ExperimentError> {
    spec.validate()?;
    let g = spec.dataset.load()?;
    let name = spec.dataset.name();
    let beta = spec.beta.unwrap_or_else(|| default_beta(&name, g.density()));
    let clean_eigs = eigenvalues(laplacian_of(g.adjacency())?.view())?;
    let test = g.split().ok_or(SpacError::MissingSplit)?.test.clone();

    let mut report = Report {
        dataset: name,
        n: g.n(),
        num_edges: g.num_edges(),
        stage: spec.stage,
        steps: spec.steps,
        beta: sig6(beta),
        clean_eigenvalues: clean_eigs.iter().map(|&v| sig6(v)).collect(),
        clean: Vec::new(),
        cells: Vec::new(),
    };
    let mut timings = Vec::new();

    let result = run_cells(spec, &g, beta, &clean_eigs, &test, &mut report, &mut timings);
    if let Some(dir) = &spec.output_dir {
        write_outputs(dir, &report, &timings, &g, spec.band_k)?;
    }
    result?;
    Ok(ExperimentOutcome { report, timings })
}

fn run_cells(
    spec: &ExperimentSpec,
    g: &Graph<f64>,
    beta: f64,
    clean_eigs: &ndarray::Array1<f64>,
    test: &[usize],
    report: &mut Report,
    timings: &mut Vec<Timing>,
) -> Result<(), ExperimentError> {
    for &seed in &spec.seeds {
        let gcn = GcnConfig { seed, ..spec.gcn };
        let victim = train_gcn(g, &gcn)?;
        report.clean.push(CleanCell { seed, misclassification: sig6(evaluate_misclassification(&victim, g, test)?) });

        for &kind in &spec.attacks {
            for &epsilon in &spec.budgets {
                let cfg = spec.attack_config(epsilon, seed, beta);
                let started = Instant::now();
                let result = attack_once(g, kind, spec.stage, &cfg, spec.approx, spec.kappa, Some(&victim), &gcn, spec.retrain_every)?;
                let wall = started.elapsed().as_secs_f64();
                timings.push(Timing { attack: kind, epsilon, seed, wall_time_secs: wall });

                let perturbed = g.with_adjacency(result.perturbed_adjacency.clone())?;
                let misclassification = match spec.stage {
                    Stage::Evasion => evaluate_misclassification(&victim, &perturbed, test)?,
                    Stage::Poison => {
                        let poisoned_victim = train_gcn(&perturbed, &gcn)?;
                        evaluate_misclassification(&poisoned_victim, g, test)?
                    }
                };
                let perturbed_eigs = eigenvalues(laplacian_of_lenient(perturbed.adjacency()).view())?;
                let distance = spectral_distance(clean_eigs.view(), perturbed_eigs.view())?;
                let counts = match flip_counts(g, &result.flips) {
                    Ok(c) => Some(c),
                    Err(SpacError::MissingLabels) => None,
                    Err(e) => return Err(e.into()),
                };
                tracing::info!(attack = %kind, epsilon, seed, misclassification, flips = result.flips_used, "cell done");
                report.cells.push(Cell {
                    attack: kind,
                    epsilon,
                    seed,
                    flip_budget: result.flip_budget,
                    flips_used: result.flips_used,
                    misclassification: sig6(misclassification),
                    spectral_distance: sig6(distance),
                    flip_counts: counts,
                    eigenvalue_difference: (&perturbed_eigs - clean_eigs).iter().map(|&v| sig6(v)).collect(),
                });
            }
        }
    }
    Ok(())
}
