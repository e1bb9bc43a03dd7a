use ndarray::{Array2, ArrayView2, Zip};
use serde::{Deserialize, Serialize};

use super::loss::{cross_entropy, labeled_targets};
use super::model::GcnModel;
use crate::error::{Result, SpacError};
use crate::graph::Graph;
use crate::laplacian::propagator_of;
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Optimizer {
    /// Full-batch gradient descent.
    GradientDescent,
    Adam { beta1: f64, beta2: f64, eps: f64 },
}

impl Optimizer {
    pub fn adam() -> Self {
        Self::Adam { beta1: 0.9, beta2: 0.999, eps: 1e-8 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GcnConfig {
    pub hidden: usize,
    pub epochs: usize,
    pub learning_rate: f64,
    /// L2 penalty on the first-layer weights.
    pub weight_decay: f64,
    pub optimizer: Optimizer,
    pub seed: u64,
}

impl Default for GcnConfig {
    fn default() -> Self {
        Self { hidden: 64, epochs: 200, learning_rate: 0.01, weight_decay: 5e-4, optimizer: Optimizer::adam(), seed: 0 }
    }
}

/// Mean training cross-entropy and its gradients with respect to `(Θ0, Θ1)`.
/// The weight-decay term is not included.
pub fn loss_and_weight_grads<T: Scalar>(
    model: &GcnModel<T>,
    propagator: ArrayView2<'_, T>,
    features: ArrayView2<'_, T>,
    targets: &[(usize, usize)],
) -> Result<(T, Array2<T>, Array2<T>)> {
    let fwd = model.forward_full(propagator, features)?;
    let (loss, d_logits) = cross_entropy(fwd.logits.view(), targets);
    let back = propagator.t().dot(&d_logits);
    let d_theta1 = fwd.hidden.t().dot(&back);
    let mut d_pre = back.dot(&model.theta1.t());
    Zip::from(&mut d_pre).and(&fwd.pre).for_each(|d, &p| {
        if p <= T::zero() {
            *d = T::zero();
        }
    });
    let d_theta0 = features.t().dot(&propagator.t().dot(&d_pre));
    Ok((loss, d_theta0, d_theta1))
}

struct AdamState<T> {
    m: Array2<T>,
    v: Array2<T>,
}

impl<T: Scalar> AdamState<T> {
    fn new(shape: (usize, usize)) -> Self {
        Self { m: Array2::zeros(shape), v: Array2::zeros(shape) }
    }
}

fn apply_update<T: Scalar>(
    param: &mut Array2<T>,
    grad: &Array2<T>,
    state: &mut AdamState<T>,
    cfg: &GcnConfig,
    step: i32,
) {
    let lr = T::of(cfg.learning_rate);
    match cfg.optimizer {
        Optimizer::GradientDescent => param.scaled_add(-lr, grad),
        Optimizer::Adam { beta1, beta2, eps } => {
            let (b1, b2) = (T::of(beta1), T::of(beta2));
            let c1 = T::one() - T::of(beta1.powi(step));
            let c2 = T::one() - T::of(beta2.powi(step));
            let eps = T::of(eps);
            Zip::from(param).and(grad).and(&mut state.m).and(&mut state.v).for_each(|p, &g, m, v| {
                *m = b1 * *m + (T::one() - b1) * g;
                *v = b2 * *v + (T::one() - b2) * g * g;
                *p -= lr * (*m / c1) / ((*v / c2).sqrt() + eps);
            });
        }
    }
}

/// Trains from a Glorot initialization on an arbitrary (possibly weighted)
/// adjacency, minimizing mean cross-entropy on `targets` plus weight decay.
pub fn train_on<T: Scalar>(
    adjacency: ArrayView2<'_, T>,
    features: ArrayView2<'_, T>,
    targets: &[(usize, usize)],
    num_classes: usize,
    cfg: &GcnConfig,
) -> Result<GcnModel<T>> {
    if cfg.hidden == 0 || num_classes == 0 {
        return Err(SpacError::InvalidConfig("hidden width and class count must be positive".into()));
    }
    let mut model = GcnModel::glorot(features.ncols(), cfg.hidden, num_classes, cfg.seed);
    let prop = propagator_of(adjacency);
    let mut s0 = AdamState::new(model.theta0.dim());
    let mut s1 = AdamState::new(model.theta1.dim());
    let wd = T::of(cfg.weight_decay);
    for epoch in 1..=cfg.epochs {
        let (loss, mut g0, g1) = loss_and_weight_grads(&model, prop.view(), features, targets)?;
        g0.scaled_add(wd, &model.theta0);
        let step = i32::try_from(epoch).unwrap_or(i32::MAX);
        apply_update(&mut model.theta0, &g0, &mut s0, cfg, step);
        apply_update(&mut model.theta1, &g1, &mut s1, cfg, step);
        tracing::trace!(epoch, loss = %loss, "gcn epoch");
    }
    Ok(model)
}

/// Trains a victim on `g`'s training split.
pub fn train_gcn<T: Scalar>(g: &Graph<T>, cfg: &GcnConfig) -> Result<GcnModel<T>> {
    let features = g.features().ok_or(SpacError::MissingFeatures)?;
    let labels = g.labels().ok_or(SpacError::MissingLabels)?;
    let split = g.split().ok_or(SpacError::MissingSplit)?;
    let targets = labeled_targets(g, &split.train)?;
    train_on(g.adjacency(), features, &targets, labels.num_classes(), cfg)
}

/// Mean training cross-entropy of `model` on `g`.
pub fn training_loss<T: Scalar>(model: &GcnModel<T>, g: &Graph<T>) -> Result<T> {
    let features = g.features().ok_or(SpacError::MissingFeatures)?;
    let split = g.split().ok_or(SpacError::MissingSplit)?;
    let targets = labeled_targets(g, &split.train)?;
    let logits = model.forward(propagator_of(g.adjacency()).view(), features)?;
    Ok(cross_entropy(logits.view(), &targets).0)
}
