use std::collections::HashMap;

use ndarray::ArrayView2;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::Result;
use crate::perturbation::FlipSet;
use crate::scalar::Scalar;

/// Independent Bernoulli rounding of a relaxed perturbation: pair `(i, j)` is
/// flipped with probability `Δ_ij`.
#[derive(Debug, Clone)]
pub struct BernoulliRounding<T> {
    pairs: Vec<(usize, usize)>,
    probs: Vec<T>,
}

impl<T: Scalar> BernoulliRounding<T> {
    /// Collects the pairs `i < j` with `Δ_ij > 0`.
    pub fn new(delta: ArrayView2<'_, T>) -> Self {
        let n = delta.nrows();
        let mut pairs = Vec::new();
        let mut probs = Vec::new();
        for i in 0..n {
            for j in (i + 1)..n {
                let p = delta[[i, j]];
                if p > T::zero() {
                    pairs.push((i, j));
                    probs.push(p.min(T::one()));
                }
            }
        }
        Self { pairs, probs }
    }

    /// Number of pairs with non-zero probability.
    pub fn support(&self) -> usize {
        self.pairs.len()
    }

    pub fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> FlipSet {
        let picked = self
            .pairs
            .iter()
            .zip(&self.probs)
            .filter(|(_, &p)| T::of(rng.gen::<f64>()) < p)
            .map(|(&pair, _)| pair);
        FlipSet::new(picked)
    }

    /// Keeps the `cap` flips of `draw` with the largest `Δ`; ties go to the
    /// lexicographically smaller pair.
    pub fn truncate(&self, draw: &FlipSet, cap: usize) -> FlipSet {
        let prob: HashMap<(usize, usize), T> = self.pairs.iter().copied().zip(self.probs.iter().copied()).collect();
        let mut ranked: Vec<(usize, usize)> = draw.pairs().to_vec();
        ranked.sort_by(|a, b| {
            let pa = prob.get(a).copied().unwrap_or_else(T::zero);
            let pb = prob.get(b).copied().unwrap_or_else(T::zero);
            pb.partial_cmp(&pa).unwrap_or(std::cmp::Ordering::Equal).then(a.cmp(b))
        });
        ranked.truncate(cap);
        FlipSet::new(ranked)
    }
}

/// Rounds Δ to a binary perturbation with at most `max_flips` flips.
///
/// Draws `trials` Bernoulli samples, discards those over budget, and returns
/// the admissible sample with the highest `score` (first one wins ties). When
/// no sample is admissible, the smallest sample is truncated to its
/// `max_flips` most probable pairs.
pub fn sample_binary<T, F>(
    delta: ArrayView2<'_, T>,
    max_flips: usize,
    trials: usize,
    seed: u64,
    mut score: F,
) -> Result<FlipSet>
where
    T: Scalar,
    F: FnMut(&FlipSet) -> Result<T>,
{
    let rounding = BernoulliRounding::new(delta);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut seen: HashMap<FlipSet, T> = HashMap::new();
    let mut best: Option<(FlipSet, T)> = None;
    let mut smallest: Option<FlipSet> = None;

    for _ in 0..trials {
        let draw = rounding.draw(&mut rng);
        if draw.len() > max_flips {
            if smallest.as_ref().map_or(true, |s| draw.len() < s.len()) {
                smallest = Some(draw);
            }
            continue;
        }
        let value = match seen.get(&draw) {
            Some(&v) => v,
            None => {
                let v = score(&draw)?;
                seen.insert(draw.clone(), v);
                v
            }
        };
        if best.as_ref().map_or(true, |(_, b)| value > *b) {
            best = Some((draw, value));
        }
    }

    Ok(match (best, smallest) {
        (Some((flips, _)), _) => flips,
        (None, Some(draw)) => rounding.truncate(&draw, max_flips),
        (None, None) => FlipSet::default(),
    })
}
