//! Black-box comparison attacks: uniform random flips and DICE.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Result, SpacError};
use crate::graph::Graph;
use crate::perturbation::FlipSet;
use crate::scalar::Scalar;

/// Flips `budget` distinct unordered pairs chosen uniformly at random.
pub fn random_attack<T: Scalar>(g: &Graph<T>, budget: usize, seed: u64) -> Result<FlipSet> {
    let n = g.n();
    let available = n * n.saturating_sub(1) / 2;
    if budget > available {
        return Err(SpacError::BudgetTooLarge { budget, available });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let picked = rand::seq::index::sample(&mut rng, available, budget);
    Ok(FlipSet::new(picked.into_iter().map(|k| pair_from_index(k, n))))
}

/// Maps `0 .. n(n-1)/2` onto the pairs `i < j` in row-major order.
fn pair_from_index(mut k: usize, n: usize) -> (usize, usize) {
    let mut i = 0;
    loop {
        let row = n - 1 - i;
        if k < row {
            return (i, i + 1 + k);
        }
        k -= row;
        i += 1;
    }
}

/// DICE: each flip deletes a random intra-class edge or adds a random
/// inter-class non-edge with equal probability, falling back to the other
/// action when its pool is empty.
pub fn dice_attack<T: Scalar>(g: &Graph<T>, budget: usize, seed: u64) -> Result<FlipSet> {
    let labels = g.labels().ok_or(SpacError::MissingLabels)?;
    let n = g.n();
    let mut deletions = Vec::new();
    let mut additions = Vec::new();
    for i in 0..n {
        for j in (i + 1)..n {
            match (labels.get(i), labels.get(j)) {
                (Some(a), Some(b)) if a == b && g.has_edge(i, j) => deletions.push((i, j)),
                (Some(a), Some(b)) if a != b && !g.has_edge(i, j) => additions.push((i, j)),
                _ => {}
            }
        }
    }
    let available = deletions.len() + additions.len();
    if budget > available {
        return Err(SpacError::BudgetTooLarge { budget, available });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    deletions.shuffle(&mut rng);
    additions.shuffle(&mut rng);
    let mut flips = Vec::with_capacity(budget);
    for _ in 0..budget {
        let delete = rng.gen_bool(0.5);
        let pool = match (delete, deletions.is_empty(), additions.is_empty()) {
            (true, false, _) | (false, false, true) => &mut deletions,
            _ => &mut additions,
        };
        flips.push(pool.pop().expect("pool sizes checked against budget"));
    }
    Ok(FlipSet::new(flips))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::Labels;

    fn two_blocks() -> Graph<f64> {
        let edges = [(0, 1), (1, 2), (0, 2), (3, 4), (4, 5), (3, 5), (2, 3)];
        Graph::from_edges(6, &edges).unwrap().with_labels(Labels::dense(vec![0, 0, 0, 1, 1, 1])).unwrap()
    }

    #[test]
    fn pair_index_covers_upper_triangle() {
        let n = 5;
        let all: Vec<_> = (0..10).map(|k| pair_from_index(k, n)).collect();
        let expected: Vec<_> = (0..n).flat_map(|i| ((i + 1)..n).map(move |j| (i, j))).collect();
        assert_eq!(all, expected);
    }

    #[test]
    fn random_flips_exact_count_and_deterministic() {
        let g = two_blocks();
        let a = random_attack(&g, 7, 3).unwrap();
        assert_eq!(a.len(), 7);
        assert_eq!(a, random_attack(&g, 7, 3).unwrap());
        assert!(random_attack(&g, 0, 3).unwrap().is_empty());
        assert_eq!(random_attack(&g, 16, 3), Err(SpacError::BudgetTooLarge { budget: 16, available: 15 }));
    }

    #[test]
    fn dice_respects_classes() {
        let g = two_blocks();
        for seed in 0..20 {
            let b = dice_attack(&g, 5, seed).unwrap();
            assert_eq!(b.len(), 5);
            for &(i, j) in b.pairs() {
                let same = g.labels().unwrap().get(i) == g.labels().unwrap().get(j);
                assert_eq!(same, g.has_edge(i, j), "({i}, {j})");
            }
        }
    }

    #[test]
    fn dice_without_intra_edges_only_adds() {
        let g = Graph::<f64>::from_edges(4, &[(0, 2), (1, 3)]).unwrap().with_labels(Labels::dense(vec![0, 0, 1, 1])).unwrap();
        let b = dice_attack(&g, 2, 0).unwrap();
        assert!(b.pairs().iter().all(|&(i, j)| !g.has_edge(i, j)));
        assert!(matches!(dice_attack(&g, 3, 0), Err(SpacError::BudgetTooLarge { .. })));
    }

    #[test]
    fn dice_needs_labels() {
        let g = Graph::<f64>::from_edges(3, &[(0, 1)]).unwrap();
        assert_eq!(dice_attack(&g, 1, 0), Err(SpacError::MissingLabels));
    }
}
