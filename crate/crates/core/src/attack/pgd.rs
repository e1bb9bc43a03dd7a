use std::time::Instant;

use ndarray::{Array2, ArrayView2};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::config::{step_size, AttackConfig};
use super::objective::{ObjectiveMode, SpectralObjective};
use super::projection::project_feasible;
use super::sampling::sample_binary;
use crate::error::Result;
use crate::graph::Graph;
use crate::perturbation::{apply_with, pair_mass, FlipSet, LegalOps};
use crate::scalar::Scalar;

const NOISE_STREAM: u64 = 1;
const SAMPLING_STREAM: u64 = 2;

/// A differentiable task loss that can be combined with the spectral term.
///
/// The attack maximizes `task + β · spectral`.
pub trait TaskLoss<T: Scalar> {
    /// Called once per step (1-based) before the gradient is taken, e.g. to
    /// retrain a surrogate model on the current `A'`.
    fn prepare(&mut self, _step: usize, _a_prime: ArrayView2<'_, T>) -> Result<()> {
        Ok(())
    }

    /// Loss at `A'` and its gradient with respect to Δ (symmetric, per pair).
    fn loss_and_grad(&mut self, legal: &LegalOps<T>, a_prime: ArrayView2<'_, T>) -> Result<(T, Array2<T>)>;

    /// Loss at `A'`, used to score binary candidates.
    fn loss(&mut self, a_prime: ArrayView2<'_, T>) -> Result<T>;
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct AttackResult<T> {
    pub flips: FlipSet,
    #[serde(skip)]
    pub perturbed_adjacency: Array2<T>,
    /// Final relaxed perturbation Δ_T.
    #[serde(skip)]
    pub relaxed: Array2<T>,
    /// Objective at Δ_0 .. Δ_T (`steps + 1` values, noise-free).
    pub objective_trace: Vec<T>,
    /// `Σ_{i<j} Δ_ij` after each projection.
    pub mass_trace: Vec<T>,
    pub flips_used: usize,
    pub flip_budget: usize,
    pub wall_time_secs: f64,
}

/// Maximizes the spectral distance of `g` under the configured budget.
pub fn pgd_spectral_attack<T: Scalar>(g: &Graph<T>, cfg: &AttackConfig<T>) -> Result<AttackResult<T>> {
    run_attack(g, cfg, None)
}

/// Projected gradient ascent on `task + β · spectral` followed by randomized
/// rounding. Without a task loss the spectral term has weight one; with
/// `β = 0` the spectral term is not evaluated at all.
pub fn run_attack<T: Scalar>(
    g: &Graph<T>,
    cfg: &AttackConfig<T>,
    mut task: Option<&mut dyn TaskLoss<T>>,
) -> Result<AttackResult<T>> {
    let started = Instant::now();
    let num_edges = g.num_edges();
    cfg.validate(g.n(), num_edges)?;
    let n = g.n();
    let budget = cfg.budget(num_edges);
    let flip_budget = cfg.flip_budget(num_edges);
    let legal = LegalOps::new(g);

    let spectral_weight = if task.is_some() { cfg.beta } else { T::one() };
    let mut spectral = if spectral_weight > T::zero() {
        let mode = cfg.approx.map_or(ObjectiveMode::Exact, ObjectiveMode::Selective);
        Some(SpectralObjective::new(g, mode)?)
    } else {
        None
    };

    let mut noise_rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    noise_rng.set_stream(NOISE_STREAM);

    let init = Array2::from_shape_fn((n, n), |(i, j)| if i == j { T::zero() } else { cfg.init_value });
    let mut delta = project_feasible(init.view(), budget);
    let mut objective_trace = Vec::with_capacity(cfg.steps + 1);
    let mut mass_trace = Vec::with_capacity(cfg.steps);

    for t in 1..=cfg.steps {
        let a_prime = apply_with(g.adjacency(), &legal, delta.view())?;
        let mut value = T::zero();
        let mut grad = Array2::zeros((n, n));
        if let Some(task) = task.as_deref_mut() {
            task.prepare(t, a_prime.view())?;
            let (v, gr) = task.loss_and_grad(&legal, a_prime.view())?;
            value += v;
            grad += &gr;
        }
        if let Some(obj) = spectral.as_mut() {
            let (v, gr) = obj.value_and_grad(&legal, a_prime.view(), cfg.noise_scale, &mut noise_rng)?;
            value += spectral_weight * v;
            grad.scaled_add(spectral_weight, &gr);
        }
        objective_trace.push(value);

        let eta = step_size(t, cfg);
        delta.scaled_add(eta, &grad);
        delta = project_feasible(delta.view(), budget);
        mass_trace.push(pair_mass(delta.view()));
        tracing::debug!(step = t, objective = %value, mass = %mass_trace[t - 1], "attack step");
    }

    let a_final = apply_with(g.adjacency(), &legal, delta.view())?;
    let mut final_value = T::zero();
    if let Some(task) = task.as_deref_mut() {
        final_value += task.loss(a_final.view())?;
    }
    if let Some(obj) = spectral.as_ref() {
        final_value += spectral_weight * obj.tracked_value(a_final.view())?;
    }
    objective_trace.push(final_value);

    let mut sampling_rng_seed = ChaCha8Rng::seed_from_u64(cfg.seed);
    sampling_rng_seed.set_stream(SAMPLING_STREAM);
    let sampling_seed = rand::RngCore::next_u64(&mut sampling_rng_seed);
    let flips = sample_binary(delta.view(), flip_budget, cfg.sample_trials, sampling_seed, |candidate| {
        let a_b = flip_adjacency(g.adjacency(), candidate);
        let mut score = T::zero();
        if let Some(task) = task.as_deref_mut() {
            score += task.loss(a_b.view())?;
        }
        if let Some(obj) = spectral.as_ref() {
            score += spectral_weight * obj.value(a_b.view())?;
        }
        Ok(score)
    })?;

    let perturbed_adjacency = flip_adjacency(g.adjacency(), &flips);
    Ok(AttackResult {
        flips_used: flips.len(),
        flips,
        perturbed_adjacency,
        relaxed: delta,
        objective_trace,
        mass_trace,
        flip_budget,
        wall_time_secs: started.elapsed().as_secs_f64(),
    })
}

fn flip_adjacency<T: Scalar>(adjacency: ArrayView2<'_, T>, flips: &FlipSet) -> Array2<T> {
    let mut a = adjacency.to_owned();
    for &(i, j) in flips.pairs() {
        let v = T::one() - a[[i, j]];
        a[[i, j]] = v;
        a[[j, i]] = v;
    }
    a
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::attack::config::StepSchedule;
    use crate::error::SpacError;

    fn small_graph() -> Graph<f64> {
        Graph::from_edges(8, &[(0, 1), (1, 2), (2, 3), (3, 0), (4, 5), (5, 6), (6, 7), (7, 4), (0, 4), (2, 6)]).unwrap()
    }

    #[test]
    fn budget_too_small() {
        let cfg = AttackConfig { budget_ratio: 0.05, ..Default::default() };
        assert!(matches!(pgd_spectral_attack(&small_graph(), &cfg), Err(SpacError::BudgetTooSmall(_))));
    }

    #[test]
    fn respects_budget_and_records_traces() {
        let cfg = AttackConfig { budget_ratio: 0.2, steps: 15, ..Default::default() };
        let r = pgd_spectral_attack(&small_graph(), &cfg).unwrap();
        assert_eq!(r.flip_budget, 2);
        assert!(r.flips_used <= 2);
        assert_eq!(r.objective_trace.len(), 16);
        assert_eq!(r.mass_trace.len(), 15);
        assert!(r.mass_trace.iter().all(|&m| m <= 2.0 + 1e-9));
        assert_eq!(r.perturbed_adjacency, r.perturbed_adjacency.t());
    }

    #[test]
    fn frozen_zero_start_rounds_to_nothing() {
        let cfg = AttackConfig {
            budget_ratio: 0.2,
            steps: 1,
            step_size: StepSchedule::Constant(0.0),
            init_value: 0.0,
            ..Default::default()
        };
        let r = pgd_spectral_attack(&small_graph(), &cfg).unwrap();
        assert!(r.flips.is_empty());
        assert_eq!(r.objective_trace, vec![0.0, 0.0]);
    }

    #[test]
    fn result_serializes_without_matrices() {
        let cfg = AttackConfig { budget_ratio: 0.2, steps: 3, ..Default::default() };
        let r = pgd_spectral_attack(&small_graph(), &cfg).unwrap();
        let json = serde_json::to_value(&r).unwrap();
        assert!(json.get("perturbed_adjacency").is_none());
        assert_eq!(json["flips_used"], r.flips_used);
        let back: AttackResult<f64> = serde_json::from_value(json).unwrap();
        assert_eq!(back.flips, r.flips);
    }
}
