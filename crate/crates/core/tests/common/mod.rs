#![allow(dead_code)]

use ndarray::Array2;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use spac::graph::{Graph, Labels, Split};

/// Connected random graph: a random spanning tree plus independent extra
/// edges with probability `p`.
pub fn random_connected(n: usize, p: f64, seed: u64) -> Graph<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut edges = Vec::new();
    for v in 1..n {
        edges.push((rng.gen_range(0..v), v));
    }
    for i in 0..n {
        for j in (i + 1)..n {
            if rng.gen::<f64>() < p && !edges.contains(&(i, j)) {
                edges.push((i, j));
            }
        }
    }
    Graph::from_edges(n, &edges).unwrap()
}

/// Symmetric relaxed perturbation with entries uniform in `[0, scale)`.
pub fn random_delta(n: usize, scale: f64, seed: u64) -> Array2<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut d = Array2::zeros((n, n));
    for i in 0..n {
        for j in (i + 1)..n {
            let v = scale * rng.gen::<f64>();
            d[[i, j]] = v;
            d[[j, i]] = v;
        }
    }
    d
}

/// Two communities of `half` nodes with class-revealing features, a
/// balanced train split and the rest as test nodes.
pub fn two_communities(half: usize, seed: u64) -> Graph<f64> {
    let n = 2 * half;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut edges = Vec::new();
    for i in 0..n {
        for j in (i + 1)..n {
            let same = (i < half) == (j < half);
            let p = if same { 0.4 } else { 0.05 };
            if rng.gen::<f64>() < p || j == i + 1 {
                edges.push((i, j));
            }
        }
    }
    let labels: Vec<usize> = (0..n).map(|i| usize::from(i >= half)).collect();
    let features = Array2::from_shape_fn((n, 4), |(i, f)| {
        let signal = if f % 2 == labels[i] { 1.0 } else { 0.0 };
        signal + 0.3 * (rng.gen::<f64>() - 0.5)
    });
    let train: Vec<usize> = (0..n).filter(|i| i % half < 3).collect();
    let test: Vec<usize> = (0..n).filter(|i| i % half >= 3).collect();
    Graph::from_edges(n, &edges)
        .unwrap()
        .with_features(features)
        .unwrap()
        .with_labels(Labels::dense(labels))
        .unwrap()
        .with_split(Split { train, test })
        .unwrap()
}

/// Fourth-order central difference of `f` along the symmetric pair `(i, j)`.
pub fn pair_derivative(delta: &Array2<f64>, i: usize, j: usize, h: f64, mut f: impl FnMut(&Array2<f64>) -> f64) -> f64 {
    let mut at = |step: f64| {
        let mut d = delta.clone();
        d[[i, j]] += step;
        d[[j, i]] += step;
        f(&d)
    };
    (-at(2.0 * h) + 8.0 * at(h) - 8.0 * at(-h) + at(-2.0 * h)) / (12.0 * h)
}

/// `|a - b| / max(|a|, |b|)`, or the absolute difference when both are tiny.
pub fn mismatch(analytic: f64, numeric: f64, floor: f64) -> f64 {
    let scale = analytic.abs().max(numeric.abs());
    if scale < floor {
        (analytic - numeric).abs()
    } else {
        (analytic - numeric).abs() / scale
    }
}
