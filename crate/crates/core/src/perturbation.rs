//! Edge-flip algebra: `A' = A + C ∘ P` with `C = Ā - A`.

use ndarray::{Array2, ArrayView2, Zip};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Result, SpacError};
use crate::graph::Graph;
use crate::scalar::Scalar;

/// `C = Ā - A`: +1 where an edge may be added, -1 where one may be removed,
/// 0 on the diagonal.
#[derive(Debug, Clone, PartialEq)]
pub struct LegalOps<T> {
    c: Array2<T>,
}

impl<T: Scalar> LegalOps<T> {
    pub fn new(g: &Graph<T>) -> Self {
        let c = Array2::from_shape_fn(g.adjacency().dim(), |(i, j)| {
            if i == j {
                T::zero()
            } else {
                T::one() - T::of(2.0) * g.adjacency()[[i, j]]
            }
        });
        Self { c }
    }

    pub fn matrix(&self) -> ArrayView2<'_, T> {
        self.c.view()
    }

    pub fn n(&self) -> usize {
        self.c.nrows()
    }

    /// Whether flipping `(i, j)` adds an edge.
    pub fn is_addition(&self, i: usize, j: usize) -> bool {
        self.c[[i, j]] > T::zero()
    }

    /// Number of legal unordered pairs, `n (n - 1) / 2`.
    pub fn num_pairs(&self) -> usize {
        let n = self.n();
        n * n.saturating_sub(1) / 2
    }
}

/// Relaxed perturbation `Δ ∈ [0,1]^{n×n}` with its L1 budget over unordered pairs.
#[derive(Debug, Clone, PartialEq)]
pub struct PerturbationState<T> {
    pub delta: Array2<T>,
    pub budget: T,
}

impl<T: Scalar> PerturbationState<T> {
    /// `value` on every off-diagonal pair.
    pub fn uniform(n: usize, value: T, budget: T) -> Self {
        let delta = Array2::from_shape_fn((n, n), |(i, j)| if i == j { T::zero() } else { value });
        Self { delta, budget }
    }

    pub fn zeros(n: usize, budget: T) -> Self {
        Self { delta: Array2::zeros((n, n)), budget }
    }

    /// L1 mass with each unordered pair counted once.
    pub fn mass(&self) -> T {
        pair_mass(self.delta.view())
    }

    pub fn is_feasible(&self, tol: T) -> bool {
        let n = self.delta.nrows();
        for i in 0..n {
            if self.delta[[i, i]] != T::zero() {
                return false;
            }
            for j in (i + 1)..n {
                let v = self.delta[[i, j]];
                if v != self.delta[[j, i]] || v < -tol || v > T::one() + tol {
                    return false;
                }
            }
        }
        self.mass() <= self.budget + tol
    }
}

/// Sum over `i < j`.
pub fn pair_mass<T: Scalar>(m: ArrayView2<'_, T>) -> T {
    let n = m.nrows();
    let mut acc = T::zero();
    for i in 0..n {
        for j in (i + 1)..n {
            acc += m[[i, j]];
        }
    }
    acc
}

/// A binary perturbation as its sorted list of flipped unordered pairs `(i < j)`.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FlipSet {
    pairs: Vec<(usize, usize)>,
}

impl FlipSet {
    pub fn new(pairs: impl IntoIterator<Item = (usize, usize)>) -> Self {
        let mut pairs: Vec<_> = pairs.into_iter().map(|(i, j)| if i < j { (i, j) } else { (j, i) }).collect();
        pairs.sort_unstable();
        pairs.dedup();
        Self { pairs }
    }

    /// Reads the upper triangle of a 0/1 matrix.
    pub fn from_matrix<T: Scalar>(b: ArrayView2<'_, T>) -> Self {
        let n = b.nrows();
        let mut pairs = Vec::new();
        for i in 0..n {
            for j in (i + 1)..n {
                if b[[i, j]] != T::zero() {
                    pairs.push((i, j));
                }
            }
        }
        Self { pairs }
    }

    pub fn pairs(&self) -> &[(usize, usize)] {
        &self.pairs
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn to_matrix<T: Scalar>(&self, n: usize) -> Array2<T> {
        let mut b = Array2::zeros((n, n));
        for &(i, j) in &self.pairs {
            b[[i, j]] = T::one();
            b[[j, i]] = T::one();
        }
        b
    }

    /// Applies the flips to `g`, returning the perturbed graph with the same
    /// attributes.
    pub fn apply<T: Scalar>(&self, g: &Graph<T>) -> Result<Graph<T>> {
        let mut a = g.adjacency().to_owned();
        for &(i, j) in &self.pairs {
            if i >= g.n() || j >= g.n() || i == j {
                return Err(SpacError::DomainError(format!("illegal flip ({i}, {j})")));
            }
            let v = T::one() - a[[i, j]];
            a[[i, j]] = v;
            a[[j, i]] = v;
        }
        g.with_adjacency(a)
    }
}

/// `A' = A + C ∘ p` for continuous or binary `p`.
pub fn apply_perturbation<T: Scalar>(g: &Graph<T>, p: ArrayView2<'_, T>) -> Result<Array2<T>> {
    let legal = LegalOps::new(g);
    apply_with(g.adjacency(), &legal, p)
}

/// [`apply_perturbation`] with a precomputed `C`.
pub fn apply_with<T: Scalar>(
    adjacency: ArrayView2<'_, T>,
    legal: &LegalOps<T>,
    p: ArrayView2<'_, T>,
) -> Result<Array2<T>> {
    if p.dim() != adjacency.dim() {
        return Err(SpacError::ShapeMismatch { expected: adjacency.dim(), found: p.dim() });
    }
    if let Some(bad) = p.iter().find(|v| !(**v >= T::zero() && **v <= T::one())) {
        return Err(SpacError::DomainError(format!("perturbation entry {bad} outside [0, 1]")));
    }
    let mut out = adjacency.to_owned();
    Zip::from(&mut out).and(legal.matrix()).and(p).for_each(|a, &c, &p| *a += c * p);
    Ok(out)
}

/// `A' + scale · (N + N^T) / 2` with `N_ij ~ U(0,1)` drawn from `rng`.
pub fn add_symmetry_noise_with<T: Scalar, R: Rng + ?Sized>(
    a_prime: ArrayView2<'_, T>,
    noise_scale: T,
    rng: &mut R,
) -> Array2<T> {
    let n = a_prime.nrows();
    let raw = Array2::from_shape_fn((n, n), |_| T::of(rng.gen::<f64>()));
    let half = T::of(0.5) * noise_scale;
    let mut out = a_prime.to_owned();
    Zip::indexed(&mut out).for_each(|(i, j), v| *v += half * (raw[[i, j]] + raw[[j, i]]));
    out
}

/// Seeded form of [`add_symmetry_noise_with`].
pub fn add_symmetry_noise<T: Scalar>(a_prime: ArrayView2<'_, T>, noise_scale: T, seed: u64) -> Array2<T> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    add_symmetry_noise_with(a_prime, noise_scale, &mut rng)
}
