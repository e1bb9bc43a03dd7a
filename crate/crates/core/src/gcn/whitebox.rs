use ndarray::{Array2, ArrayView2};

use super::loss::{attack_loss, attack_loss_grad_at, target_nodes, AttackObjectiveSpec, AttackStage};
use super::model::GcnModel;
use super::train::{train_on, GcnConfig};
use crate::attack::{run_attack, AttackConfig, AttackResult, TaskLoss};
use crate::error::{Result, SpacError};
use crate::graph::Graph;
use crate::perturbation::LegalOps;
use crate::scalar::Scalar;

/// Surrogate retraining cadence (in PGD steps) for poisoning attacks.
pub const DEFAULT_RETRAIN_EVERY: usize = 20;

/// GCN task loss plugged into the PGD attack.
pub struct GcnTaskLoss<'a, T: Scalar> {
    spec: AttackObjectiveSpec<T>,
    model: std::borrow::Cow<'a, GcnModel<T>>,
    features: ArrayView2<'a, T>,
    targets: Vec<(usize, usize)>,
    train_targets: Vec<(usize, usize)>,
    num_classes: usize,
    train_cfg: GcnConfig,
    retrain_every: usize,
    retrains: usize,
}

impl<'a, T: Scalar> GcnTaskLoss<'a, T> {
    pub fn new(
        g: &'a Graph<T>,
        model: &'a GcnModel<T>,
        spec: AttackObjectiveSpec<T>,
        train_cfg: GcnConfig,
        retrain_every: usize,
    ) -> Result<Self> {
        let features = g.features().ok_or(SpacError::MissingFeatures)?;
        let labels = g.labels().ok_or(SpacError::MissingLabels)?;
        let targets = target_nodes(g, spec.kind)?;
        let train_targets = match spec.stage {
            AttackStage::Poison => {
                let split = g.split().ok_or(SpacError::MissingSplit)?;
                super::loss::labeled_targets(g, &split.train)?
            }
            AttackStage::Evasion => Vec::new(),
        };
        if retrain_every == 0 {
            return Err(SpacError::InvalidConfig("retraining cadence must be at least 1".into()));
        }
        Ok(Self {
            spec,
            model: std::borrow::Cow::Borrowed(model),
            features,
            targets,
            train_targets,
            num_classes: labels.num_classes(),
            train_cfg,
            retrain_every,
            retrains: 0,
        })
    }

    /// Number of surrogate retrainings performed so far.
    pub fn retrains(&self) -> usize {
        self.retrains
    }

    pub fn model(&self) -> &GcnModel<T> {
        &self.model
    }
}

impl<T: Scalar> TaskLoss<T> for GcnTaskLoss<'_, T> {
    fn prepare(&mut self, step: usize, a_prime: ArrayView2<'_, T>) -> Result<()> {
        if self.spec.stage == AttackStage::Poison && step > 1 && (step - 1) % self.retrain_every == 0 {
            let surrogate = train_on(a_prime, self.features, &self.train_targets, self.num_classes, &self.train_cfg)?;
            self.model = std::borrow::Cow::Owned(surrogate);
            self.retrains += 1;
        }
        Ok(())
    }

    fn loss_and_grad(&mut self, legal: &LegalOps<T>, a_prime: ArrayView2<'_, T>) -> Result<(T, Array2<T>)> {
        attack_loss_grad_at(&self.model, self.features, legal, a_prime, self.spec.kind, &self.targets)
    }

    fn loss(&mut self, a_prime: ArrayView2<'_, T>) -> Result<T> {
        attack_loss(&self.model, self.features, a_prime, self.spec.kind, &self.targets)
    }
}

/// Maximizes `task + β · spectral` against `model`.
///
/// For evasion the model stays fixed. For poisoning, `model` (trained on the
/// clean graph) is the first surrogate; a fresh surrogate is retrained from
/// scratch on the current relaxed graph every `retrain_every` steps.
pub fn run_white_box_attack<T: Scalar>(
    g: &Graph<T>,
    cfg: &AttackConfig<T>,
    spec: AttackObjectiveSpec<T>,
    model: &GcnModel<T>,
    train_cfg: &GcnConfig,
    retrain_every: usize,
) -> Result<AttackResult<T>> {
    let mut task = GcnTaskLoss::new(g, model, spec, *train_cfg, retrain_every)?;
    run_attack(g, cfg, Some(&mut task))
}
