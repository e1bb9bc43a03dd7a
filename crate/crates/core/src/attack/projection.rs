use ndarray::{Array2, ArrayView2};

use crate::scalar::Scalar;

const BISECTION_ITERS: usize = 60;

/// Euclidean projection of a symmetric Δ onto
/// `{Δ : 0 ≤ Δ ≤ 1, Σ_{i<j} Δ_ij ≤ budget}`.
///
/// Only the strict upper triangle is read; the result is mirrored and has a
/// zero diagonal. When clipping alone violates the budget, the multiplier `μ`
/// of the budget constraint is found by bisection and `clip(Δ - μ, 0, 1)` is
/// returned from the feasible side of the bracket.
pub fn project_feasible<T: Scalar>(delta: ArrayView2<'_, T>, budget: T) -> Array2<T> {
    let n = delta.nrows();
    let clip = |v: T| v.max(T::zero()).min(T::one());
    let upper: Vec<T> = (0..n).flat_map(|i| ((i + 1)..n).map(move |j| (i, j))).map(|(i, j)| delta[[i, j]]).collect();

    let clipped_mass: T = upper.iter().map(|&v| clip(v)).sum();
    let shift = if clipped_mass <= budget {
        T::zero()
    } else {
        let active: Vec<T> = upper.iter().copied().filter(|&v| v > T::zero()).collect();
        let mass_at = |mu: T| active.iter().map(|&v| clip(v - mu)).sum::<T>();
        let mut lo = T::zero();
        let mut hi = active.iter().copied().fold(T::zero(), T::max);
        for _ in 0..BISECTION_ITERS {
            let mid = (lo + hi) * T::of(0.5);
            if mass_at(mid) > budget {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        hi
    };

    let mut out = Array2::zeros((n, n));
    let mut k = 0;
    for i in 0..n {
        for j in (i + 1)..n {
            let v = clip(upper[k] - shift);
            out[[i, j]] = v;
            out[[j, i]] = v;
            k += 1;
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::perturbation::pair_mass;

    #[test]
    fn equal_entries_shrink_equally() {
        let mut d = Array2::<f64>::zeros((3, 3));
        for (i, j) in [(0, 1), (0, 2), (1, 2)] {
            d[[i, j]] = 0.5;
            d[[j, i]] = 0.5;
        }
        let p = project_feasible(d.view(), 1.0);
        for (i, j) in [(0, 1), (0, 2), (1, 2)] {
            assert!((p[[i, j]] - 1.0 / 3.0).abs() < 1e-12);
            assert_eq!(p[[i, j]], p[[j, i]]);
        }
    }

    #[test]
    fn feasible_input_is_unchanged() {
        let d = Array2::from_shape_fn((4, 4), |(i, j)| if i == j { 0.0 } else { 0.1 });
        assert_eq!(project_feasible(d.view(), 1.0), d);
    }

    #[test]
    fn clips_to_box_first() {
        let d = Array2::from_shape_fn((3, 3), |(i, j)| if i == j { 0.0 } else if i + j == 1 { 2.0 } else { -1.0 });
        let p = project_feasible(d.view(), 5.0);
        assert_eq!(p[[0, 1]], 1.0);
        assert_eq!(p[[0, 2]], 0.0);
    }

    #[test]
    fn budget_binds_when_violated() {
        let d = Array2::from_shape_fn((6, 6), |(i, j)| if i == j { 0.0 } else { 0.1 * ((i + j) % 5) as f64 + 0.3 });
        let p = project_feasible(d.view(), 2.0);
        assert!((pair_mass(p.view()) - 2.0).abs() < 1e-9);
        assert!(pair_mass(p.view()) <= 2.0 + 1e-12);
    }
}
