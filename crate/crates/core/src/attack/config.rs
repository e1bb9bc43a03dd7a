use serde::{Deserialize, Serialize};

use crate::error::{Result, SpacError};
use crate::scalar::Scalar;

/// Step-size rule for projected gradient ascent.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum StepSchedule<T> {
    /// `η_t = T ε / √t`.
    Adaptive,
    Constant(T),
}

/// Selective-spectrum approximation: `k1` lowest and `k2` highest eigenvalues,
/// exact recomputation every `m` steps.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ApproxParams {
    pub k1: usize,
    pub k2: usize,
    pub m: usize,
}

impl Default for ApproxParams {
    fn default() -> Self {
        Self { k1: 128, k2: 64, m: 10 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AttackConfig<T> {
    /// ε: fraction of |E| that may be flipped.
    pub budget_ratio: T,
    /// T: number of gradient steps.
    pub steps: usize,
    pub step_size: StepSchedule<T>,
    /// Weight of the spectral term when a task loss is attached.
    pub beta: T,
    pub approx: Option<ApproxParams>,
    /// Scale of the symmetric noise used to separate repeated eigenvalues.
    pub noise_scale: T,
    /// Number of Bernoulli draws when rounding Δ to a binary perturbation.
    pub sample_trials: usize,
    pub seed: u64,
    /// Initial value of Δ on every pair (before the first projection).
    pub init_value: T,
}

impl<T: Scalar> Default for AttackConfig<T> {
    fn default() -> Self {
        Self {
            budget_ratio: T::of(0.05),
            steps: 100,
            step_size: StepSchedule::Adaptive,
            beta: T::one(),
            approx: None,
            noise_scale: T::of(1e-5),
            sample_trials: 20,
            seed: 0,
            init_value: T::of(1e-3),
        }
    }
}

impl<T: Scalar> AttackConfig<T> {
    /// Continuous L1 budget `ε |E|`.
    pub fn budget(&self, num_edges: usize) -> T {
        self.budget_ratio * T::of_usize(num_edges)
    }

    /// Integer flip budget `⌊ε |E|⌋`; a relative slack of 1e-9 absorbs
    /// rounding in ratios such as `1/|E|`.
    pub fn flip_budget(&self, num_edges: usize) -> usize {
        let b = self.budget(num_edges).to_f64_lossy();
        (b * (1.0 + 1e-9)).floor().max(0.0) as usize
    }

    /// Sets ε so that exactly `flips` pairs may be flipped.
    pub fn with_flip_budget(mut self, flips: usize, num_edges: usize) -> Self {
        self.budget_ratio = T::of_usize(flips) / T::of_usize(num_edges.max(1));
        self
    }

    pub fn validate(&self, n: usize, num_edges: usize) -> Result<()> {
        if self.steps == 0 {
            return Err(SpacError::InvalidConfig("steps must be at least 1".into()));
        }
        if !(self.budget_ratio > T::zero() && self.budget_ratio <= T::one()) {
            return Err(SpacError::InvalidConfig(format!("budget ratio {} outside (0, 1]", self.budget_ratio)));
        }
        if self.beta < T::zero() {
            return Err(SpacError::InvalidConfig("beta must be non-negative".into()));
        }
        if self.sample_trials == 0 {
            return Err(SpacError::InvalidConfig("sample_trials must be at least 1".into()));
        }
        if !(self.noise_scale >= T::zero()) || !(self.init_value >= T::zero() && self.init_value <= T::one()) {
            return Err(SpacError::InvalidConfig("noise scale and initial value must lie in [0, 1]".into()));
        }
        if let Some(ap) = self.approx {
            if ap.k1 + ap.k2 > n || ap.k1 + ap.k2 == 0 {
                return Err(SpacError::InvalidConfig(format!("k1 + k2 = {} must lie in [1, {n}]", ap.k1 + ap.k2)));
            }
            if ap.m == 0 {
                return Err(SpacError::InvalidConfig("m must be at least 1".into()));
            }
        }
        if self.flip_budget(num_edges) == 0 {
            return Err(SpacError::BudgetTooSmall(self.budget(num_edges).to_f64_lossy()));
        }
        Ok(())
    }
}

/// Step size at 1-based step `t`.
pub fn step_size<T: Scalar>(t: usize, cfg: &AttackConfig<T>) -> T {
    match cfg.step_size {
        StepSchedule::Adaptive => T::of_usize(cfg.steps) * cfg.budget_ratio / T::of_usize(t.max(1)).sqrt(),
        StepSchedule::Constant(eta) => eta,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg() -> AttackConfig<f64> {
        AttackConfig { steps: 100, budget_ratio: 0.05, ..Default::default() }
    }

    #[test]
    fn adaptive_schedule_values() {
        assert!((step_size(1, &cfg()) - 5.0).abs() < 1e-12);
        assert!((step_size(100, &cfg()) - 0.5).abs() < 1e-12);
        assert!((step_size(4, &cfg()) - step_size(1, &cfg()) / 2.0).abs() < 1e-15);
    }

    #[test]
    fn constant_schedule() {
        let c = AttackConfig { step_size: StepSchedule::Constant(0.3), ..cfg() };
        assert_eq!(step_size(17, &c), 0.3);
    }

    #[test]
    fn budget_floors_and_validates() {
        let c = cfg();
        assert_eq!(c.flip_budget(78), 3);
        assert_eq!(c.clone().with_flip_budget(1, 78).flip_budget(78), 1);
        assert_eq!(c.validate(34, 10), Err(SpacError::BudgetTooSmall(0.5)));
        assert!(c.validate(34, 78).is_ok());
    }

    #[test]
    fn rejects_bad_approx_params() {
        let c = AttackConfig { approx: Some(ApproxParams { k1: 30, k2: 10, m: 1 }), ..cfg() };
        assert!(c.validate(34, 78).is_err());
        let c = AttackConfig { approx: Some(ApproxParams { k1: 3, k2: 3, m: 0 }), ..cfg() };
        assert!(c.validate(34, 78).is_err());
        let c = AttackConfig { steps: 0, ..cfg() };
        assert!(c.validate(34, 78).is_err());
    }
}
