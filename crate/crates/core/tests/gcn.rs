mod common;

use common::two_communities;
use ndarray::Array2;
use spac::gcn::{evaluate_misclassification, train_gcn, training_loss, GcnConfig, GcnModel, Optimizer};
use spac::laplacian::self_loop_propagator;

/// `L~ relu(L~ X Θ0) Θ1` with explicit loops.
fn forward_oracle(p: &Array2<f64>, x: &Array2<f64>, m: &GcnModel<f64>) -> Array2<f64> {
    let n = p.nrows();
    let matmul = |a: &Array2<f64>, b: &Array2<f64>| {
        let mut c = Array2::zeros((a.nrows(), b.ncols()));
        for i in 0..a.nrows() {
            for j in 0..b.ncols() {
                for k in 0..a.ncols() {
                    c[[i, j]] += a[[i, k]] * b[[k, j]];
                }
            }
        }
        c
    };
    let hidden = matmul(&matmul(p, x), &m.theta0).mapv(|v| v.max(0.0));
    let out = matmul(&matmul(p, &hidden), &m.theta1);
    assert_eq!(out.nrows(), n);
    out
}

/// `(D + I)^{-1/2} (A + I) (D + I)^{-1/2}` from the definition.
fn propagator_oracle(a: &Array2<f64>) -> Array2<f64> {
    let n = a.nrows();
    let d: Vec<f64> = (0..n).map(|i| a.row(i).sum() + 1.0).collect();
    Array2::from_shape_fn((n, n), |(i, j)| (a[[i, j]] + f64::from(u8::from(i == j))) / (d[i] * d[j]).sqrt())
}

#[test]
fn forward_matches_loop_oracle() {
    let g = two_communities(7, 3);
    let model = GcnModel::<f64>::glorot(4, 6, 2, 9);
    let p = self_loop_propagator(&g);
    let oracle_p = propagator_oracle(&g.adjacency().to_owned());
    for (a, b) in p.iter().zip(oracle_p.iter()) {
        assert!((a - b).abs() < 1e-14);
    }
    let logits = model.predict_logits(&g).unwrap();
    let expected = forward_oracle(&oracle_p, &g.features().unwrap().to_owned(), &model);
    for (a, b) in logits.iter().zip(expected.iter()) {
        assert!((a - b).abs() < 1e-12);
    }
}

#[test]
fn training_fits_separable_communities() {
    for optimizer in [Optimizer::adam(), Optimizer::GradientDescent] {
        let g = two_communities(15, 1);
        let cfg = GcnConfig {
            hidden: 16,
            learning_rate: if optimizer == Optimizer::GradientDescent { 0.5 } else { 0.01 },
            optimizer,
            ..Default::default()
        };
        let untrained = GcnModel::<f64>::glorot(4, 16, 2, cfg.seed);
        let before = training_loss(&untrained, &g).unwrap();
        let model = train_gcn(&g, &cfg).unwrap();
        let after = training_loss(&model, &g).unwrap();
        assert!(after <= 0.5 * before, "{optimizer:?}: loss {before} -> {after}");
        let err = evaluate_misclassification(&model, &g, &g.split().unwrap().test).unwrap();
        assert!(err <= 0.05, "{optimizer:?}: test error {err}");
    }
}

#[test]
fn checkpoint_file_round_trip() {
    let g = two_communities(5, 0);
    let model = train_gcn(&g, &GcnConfig { hidden: 4, epochs: 10, ..Default::default() }).unwrap();
    let path = std::env::temp_dir().join(format!("spac-gcn-{}.bin", std::process::id()));
    model.write_to(std::fs::File::create(&path).unwrap()).unwrap();
    let back = GcnModel::<f64>::read_from(std::fs::File::open(&path).unwrap()).unwrap();
    std::fs::remove_file(&path).unwrap();
    assert_eq!(back, model);
    assert_eq!(back.predict_logits(&g).unwrap(), model.predict_logits(&g).unwrap());
}

#[test]
fn training_is_deterministic() {
    let g = two_communities(6, 4);
    let cfg = GcnConfig { hidden: 8, epochs: 20, seed: 5, ..Default::default() };
    assert_eq!(train_gcn::<f64>(&g, &cfg).unwrap(), train_gcn::<f64>(&g, &cfg).unwrap());
}
