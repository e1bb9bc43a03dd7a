//! Two-layer GCN victim: forward pass, training, white-box attack losses with
//! gradients through the propagator, and evasion/poisoning orchestration.

mod loss;
mod model;
mod train;
mod whitebox;

pub use loss::{
    attack_loss, attack_loss_and_grad, attack_loss_grad_at, cross_entropy, cw_hinges, evaluate_misclassification,
    labeled_targets, misclassification_rate, negative_cw, AttackLossKind, AttackObjectiveSpec, AttackStage,
};
pub use model::{argmax, softmax, Forward, GcnModel};
pub use train::{loss_and_weight_grads, train_gcn, train_on, training_loss, GcnConfig, Optimizer};
pub use whitebox::{run_white_box_attack, GcnTaskLoss, DEFAULT_RETRAIN_EVERY};
