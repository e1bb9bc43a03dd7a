use ndarray::{Array2, ArrayView2, Zip};
use serde::{Deserialize, Serialize};

use super::model::{argmax, softmax, GcnModel};
use crate::error::{Result, SpacError};
use crate::graph::Graph;
use crate::laplacian::{normalized_adjacency_pullback, propagator_of, self_loop_inverse_sqrt};
use crate::perturbation::LegalOps;
use crate::scalar::Scalar;

/// Task loss maximized by a white-box attack.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum AttackLossKind<T> {
    /// Cross-entropy on the test nodes.
    CrossEntropyTest,
    /// Negated C&W hinge `max(Z_y - max_{c≠y} Z_c - κ, 0)` on the test nodes.
    NegativeCW(T),
    /// Cross-entropy on the training nodes (max-min poisoning).
    CrossEntropyTrain,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum AttackStage {
    Evasion,
    Poison,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AttackObjectiveSpec<T> {
    pub kind: AttackLossKind<T>,
    pub stage: AttackStage,
}

impl<T: Scalar> AttackObjectiveSpec<T> {
    pub fn new(kind: AttackLossKind<T>, stage: AttackStage) -> Result<Self> {
        if let AttackLossKind::NegativeCW(kappa) = kind {
            if !(kappa >= T::zero()) {
                return Err(SpacError::InvalidConfig(format!("C&W confidence must be non-negative, got {kappa}")));
            }
        }
        Ok(Self { kind, stage })
    }
}

/// `(node, label)` pairs the loss is evaluated on.
pub fn labeled_targets<T: Scalar>(g: &Graph<T>, nodes: &[usize]) -> Result<Vec<(usize, usize)>> {
    let labels = g.labels().ok_or(SpacError::MissingLabels)?;
    nodes.iter().map(|&v| labels.get(v).map(|y| (v, y)).ok_or(SpacError::UnlabeledTarget(v))).collect()
}

pub(crate) fn target_nodes<T: Scalar>(g: &Graph<T>, kind: AttackLossKind<T>) -> Result<Vec<(usize, usize)>> {
    let split = g.split().ok_or(SpacError::MissingSplit)?;
    match kind {
        AttackLossKind::CrossEntropyTrain => labeled_targets(g, &split.train),
        _ => labeled_targets(g, &split.test),
    }
}

/// Mean cross-entropy over `targets` and its gradient with respect to the logits.
pub fn cross_entropy<T: Scalar>(logits: ArrayView2<'_, T>, targets: &[(usize, usize)]) -> (T, Array2<T>) {
    let probs = softmax(logits);
    let mut grad = Array2::zeros(logits.raw_dim());
    if targets.is_empty() {
        return (T::zero(), grad);
    }
    let scale = T::one() / T::of_usize(targets.len());
    let mut loss = T::zero();
    for &(v, y) in targets {
        let row = logits.row(v);
        let max = row.iter().copied().fold(T::neg_infinity(), T::max);
        let lse = max + row.iter().map(|&z| (z - max).exp()).sum::<T>().ln();
        loss += lse - row[y];
        let mut g = grad.row_mut(v);
        g.scaled_add(scale, &probs.row(v));
        g[y] -= scale;
    }
    (loss * scale, grad)
}

/// Per-node C&W hinge `max(Z_y - max_{c≠y} Z_c - κ, 0)`.
pub fn cw_hinges<T: Scalar>(logits: ArrayView2<'_, T>, targets: &[(usize, usize)], kappa: T) -> Vec<(T, usize)> {
    targets
        .iter()
        .map(|&(v, y)| {
            let row = logits.row(v);
            let mut rival = if y == 0 { 1 } else { 0 };
            for c in 0..row.len() {
                if c != y && row[c] > row[rival] {
                    rival = c;
                }
            }
            ((row[y] - row[rival] - kappa).max(T::zero()), rival)
        })
        .collect()
}

/// Mean negated C&W hinge and its gradient with respect to the logits.
pub fn negative_cw<T: Scalar>(logits: ArrayView2<'_, T>, targets: &[(usize, usize)], kappa: T) -> (T, Array2<T>) {
    let mut grad = Array2::zeros(logits.raw_dim());
    if targets.is_empty() {
        return (T::zero(), grad);
    }
    let scale = T::one() / T::of_usize(targets.len());
    let mut loss = T::zero();
    for (&(v, y), (hinge, rival)) in targets.iter().zip(cw_hinges(logits, targets, kappa)) {
        loss -= hinge;
        if hinge > T::zero() {
            grad[[v, y]] -= scale;
            grad[[v, rival]] += scale;
        }
    }
    (loss * scale, grad)
}

fn loss_head<T: Scalar>(
    kind: AttackLossKind<T>,
    logits: ArrayView2<'_, T>,
    targets: &[(usize, usize)],
) -> (T, Array2<T>) {
    match kind {
        AttackLossKind::CrossEntropyTest | AttackLossKind::CrossEntropyTrain => cross_entropy(logits, targets),
        AttackLossKind::NegativeCW(kappa) => negative_cw(logits, targets, kappa),
    }
}

/// Task loss of `model` on a (weighted) adjacency `a_prime`.
pub fn attack_loss<T: Scalar>(
    model: &GcnModel<T>,
    features: ArrayView2<'_, T>,
    a_prime: ArrayView2<'_, T>,
    kind: AttackLossKind<T>,
    targets: &[(usize, usize)],
) -> Result<T> {
    let logits = model.forward(propagator_of(a_prime).view(), features)?;
    Ok(loss_head(kind, logits.view(), targets).0)
}

/// Task loss at `a_prime` and its gradient with respect to Δ per symmetric
/// pair. The propagator's degrees are differentiated as functions of Δ.
pub fn attack_loss_grad_at<T: Scalar>(
    model: &GcnModel<T>,
    features: ArrayView2<'_, T>,
    legal: &LegalOps<T>,
    a_prime: ArrayView2<'_, T>,
    kind: AttackLossKind<T>,
    targets: &[(usize, usize)],
) -> Result<(T, Array2<T>)> {
    let n = a_prime.nrows();
    let prop = propagator_of(a_prime);
    let fwd = model.forward_full(prop.view(), features)?;
    let (loss, d_logits) = loss_head(kind, fwd.logits.view(), targets);

    // Z = L~ (H Θ1): dF/dL~ gets dZ (HΘ1)^T; through H = ReLU(L~ X Θ0) it gets
    // dP (XΘ0)^T with dP = (L~ dZ Θ1^T) ∘ 1[P > 0].
    let mut d_pre = prop.dot(&d_logits.dot(&model.theta1.t()));
    Zip::from(&mut d_pre).and(&fwd.pre).for_each(|d, &p| {
        if p <= T::zero() {
            *d = T::zero();
        }
    });
    let m = d_logits.dot(&fwd.hw.t()) + d_pre.dot(&fwd.xw.t());
    let msym = &m + &m.t();

    let mut weights = a_prime.to_owned();
    for i in 0..n {
        weights[[i, i]] += T::one();
    }
    let s = self_loop_inverse_sqrt(a_prime);
    let mut grad = normalized_adjacency_pullback(msym.view(), weights.view(), &s);
    Zip::from(&mut grad).and(legal.matrix()).for_each(|g, &c| *g *= c);
    Ok((loss, grad))
}

/// [`attack_loss_grad_at`] for a relaxed perturbation of `g`.
pub fn attack_loss_and_grad<T: Scalar>(
    model: &GcnModel<T>,
    g: &Graph<T>,
    delta: ArrayView2<'_, T>,
    kind: AttackLossKind<T>,
) -> Result<(T, Array2<T>)> {
    let features = g.features().ok_or(SpacError::MissingFeatures)?;
    let targets = target_nodes(g, kind)?;
    let legal = LegalOps::new(g);
    let a_prime = crate::perturbation::apply_with(g.adjacency(), &legal, delta)?;
    attack_loss_grad_at(model, features, &legal, a_prime.view(), kind, &targets)
}

/// Fraction of `nodes` whose arg-max logit differs from the label.
pub fn evaluate_misclassification<T: Scalar>(model: &GcnModel<T>, g: &Graph<T>, nodes: &[usize]) -> Result<f64> {
    let targets = labeled_targets(g, nodes)?;
    if targets.is_empty() {
        return Ok(0.0);
    }
    let logits = model.predict_logits(g)?;
    Ok(misclassification_rate(logits.view(), &targets))
}

pub fn misclassification_rate<T: Scalar>(logits: ArrayView2<'_, T>, targets: &[(usize, usize)]) -> f64 {
    if targets.is_empty() {
        return 0.0;
    }
    let wrong = targets.iter().filter(|&&(v, y)| argmax(logits.row(v)) != y).count();
    wrong as f64 / targets.len() as f64
}
