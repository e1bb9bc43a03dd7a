mod common;

use common::{random_connected, two_communities};
use ndarray::Array2;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use spac::attack::{
    pgd_spectral_attack, project_feasible, run_attack, step_size, AttackConfig, BernoulliRounding, StepSchedule,
};
use spac::gcn::{
    attack_loss_grad_at, labeled_targets, run_white_box_attack, train_gcn, AttackLossKind, AttackObjectiveSpec,
    AttackStage, GcnConfig, GcnTaskLoss,
};
use spac::perturbation::{apply_with, LegalOps};

#[test]
fn rounding_marginals_match_relaxation() {
    let mut delta = Array2::<f64>::zeros((5, 5));
    let probs = [((0, 1), 0.1), ((0, 4), 0.5), ((2, 3), 0.85), ((1, 3), 0.02)];
    for &((i, j), p) in &probs {
        delta[[i, j]] = p;
        delta[[j, i]] = p;
    }
    let rounding = BernoulliRounding::new(delta.view());
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let trials = 20_000;
    let mut hits = [0usize; 4];
    for _ in 0..trials {
        let draw = rounding.draw(&mut rng);
        for (k, &(pair, _)) in probs.iter().enumerate() {
            hits[k] += usize::from(draw.pairs().contains(&pair));
        }
    }
    for (k, &(_, p)) in probs.iter().enumerate() {
        let freq = hits[k] as f64 / trials as f64;
        let sigma = (p * (1.0 - p) / trials as f64).sqrt();
        assert!((freq - p).abs() < 5.0 * sigma, "pair {k}: {freq} vs {p}");
    }
}

#[test]
fn spectral_attack_respects_budget_and_improves() {
    let mut improved = 0;
    for seed in 0..10 {
        let g = random_connected(20, 0.2, seed);
        let cfg = AttackConfig { budget_ratio: 0.1, steps: 30, seed, ..Default::default() };
        let r = pgd_spectral_attack(&g, &cfg).unwrap();
        assert!(r.flips.len() <= r.flip_budget);
        assert_eq!(r.objective_trace.len(), 31);
        assert!(r.mass_trace.iter().all(|&m| m <= cfg.budget(g.num_edges()) + 1e-9));
        if r.objective_trace.last() >= r.objective_trace.first() {
            improved += 1;
        }
    }
    assert!(improved >= 9, "objective improved in {improved}/10 runs");
}

#[test]
fn attack_is_deterministic() {
    let g = random_connected(18, 0.25, 2);
    let cfg = AttackConfig { budget_ratio: 0.1, steps: 15, seed: 3, ..Default::default() };
    let a = pgd_spectral_attack(&g, &cfg).unwrap();
    let b = pgd_spectral_attack(&g, &cfg).unwrap();
    assert_eq!(a.flips, b.flips);
    assert_eq!(a.objective_trace, b.objective_trace);
    assert_eq!(a.relaxed, b.relaxed);
}

#[test]
fn zero_beta_is_plain_pgd() {
    let g = two_communities(6, 1);
    let model = train_gcn(&g, &GcnConfig { hidden: 8, epochs: 50, ..Default::default() }).unwrap();
    let cfg = AttackConfig { budget_ratio: 0.2, steps: 12, beta: 0.0, seed: 4, ..Default::default() };
    let spec = AttackObjectiveSpec::new(AttackLossKind::CrossEntropyTest, AttackStage::Evasion).unwrap();
    let result = run_white_box_attack(&g, &cfg, spec, &model, &GcnConfig::default(), 20).unwrap();

    let n = g.n();
    let legal = LegalOps::new(&g);
    let targets = labeled_targets(&g, &g.split().unwrap().test).unwrap();
    let budget = cfg.budget(g.num_edges());
    let init = Array2::from_shape_fn((n, n), |(i, j)| if i == j { 0.0 } else { cfg.init_value });
    let mut delta = project_feasible(init.view(), budget);
    let mut trace = Vec::new();
    for t in 1..=cfg.steps {
        let a_prime = apply_with(g.adjacency(), &legal, delta.view()).unwrap();
        let (v, grad) = attack_loss_grad_at(
            &model,
            g.features().unwrap(),
            &legal,
            a_prime.view(),
            AttackLossKind::CrossEntropyTest,
            &targets,
        )
        .unwrap();
        trace.push(v);
        delta.scaled_add(step_size(t, &cfg), &grad);
        delta = project_feasible(delta.view(), budget);
    }
    assert_eq!(result.relaxed, delta);
    assert_eq!(&result.objective_trace[..cfg.steps], &trace[..]);
}

#[test]
fn evasion_keeps_the_victim_and_poisoning_retrains() {
    let g = two_communities(6, 2);
    let train_cfg = GcnConfig { hidden: 8, epochs: 30, ..Default::default() };
    let model = train_gcn(&g, &train_cfg).unwrap();
    let cfg = AttackConfig { budget_ratio: 0.2, steps: 41, beta: 1.0, seed: 1, ..Default::default() };

    let spec = AttackObjectiveSpec::new(AttackLossKind::CrossEntropyTest, AttackStage::Evasion).unwrap();
    let mut task = GcnTaskLoss::new(&g, &model, spec, train_cfg, 20).unwrap();
    run_attack(&g, &cfg, Some(&mut task)).unwrap();
    assert_eq!(task.retrains(), 0);
    assert_eq!(task.model(), &model);

    let spec = AttackObjectiveSpec::new(AttackLossKind::CrossEntropyTrain, AttackStage::Poison).unwrap();
    let mut task = GcnTaskLoss::new(&g, &model, spec, train_cfg, 20).unwrap();
    run_attack(&g, &cfg, Some(&mut task)).unwrap();
    assert_eq!(task.retrains(), 2);
    assert_ne!(task.model(), &model);
}

#[test]
fn constant_schedule_is_constant() {
    let cfg = AttackConfig::<f64> { step_size: StepSchedule::Constant(0.3), ..Default::default() };
    assert_eq!(step_size(1, &cfg), 0.3);
    assert_eq!(step_size(77, &cfg), 0.3);
}
