use ndarray::{Array1, ArrayView1, ArrayView2};

use super::basis::SpectralBasis;
use crate::error::{Result, SpacError};
use crate::scalar::Scalar;

/// Euclidean distance between two ascending eigenvalue vectors, paired by rank.
pub fn spectral_distance<T: Scalar>(reference: ArrayView1<'_, T>, current: ArrayView1<'_, T>) -> Result<T> {
    if reference.len() != current.len() {
        return Err(SpacError::LengthMismatch(reference.len(), current.len()));
    }
    Ok(reference.iter().zip(current.iter()).map(|(&a, &b)| (a - b) * (a - b)).sum::<T>().sqrt())
}

/// Distance restricted to the index set held by a selective reference basis.
/// `current` must list the perturbed eigenvalues at the same indices.
pub fn spectral_distance_approx<T: Scalar>(reference: &SpectralBasis<T>, current: ArrayView1<'_, T>) -> Result<T> {
    spectral_distance(reference.eigenvalues(), current)
}

/// First-order eigenvalue shift `u^T (∇L - λ diag(∇L 1)) u`.
///
/// This is the generalized-eigenproblem form: it is first-order exact when
/// `(λ, u)` solves `L u = λ M u` with `M = diag(L 1)` and `u^T M u = 1`. For
/// the normalized Laplacian use [`laplacian_shift_estimate`], which supplies
/// the matching pencil.
pub fn eigenvalue_shift_estimate<T: Scalar>(grad_l: ArrayView2<'_, T>, lambda: T, u: ArrayView1<'_, T>) -> T {
    let n = u.len();
    let mut quad = T::zero();
    let mut diag_term = T::zero();
    for p in 0..n {
        let row = grad_l.row(p);
        let mut row_dot = T::zero();
        let mut row_sum = T::zero();
        for q in 0..n {
            row_dot += row[q] * u[q];
            row_sum += row[q];
        }
        quad += u[p] * row_dot;
        diag_term += u[p] * u[p] * row_sum;
    }
    quad - lambda * diag_term
}

/// Shift of a normalized-Laplacian eigenvalue when the adjacency moves by
/// `adjacency_change`.
///
/// The eigenpairs of `I - D^{-1/2} A D^{-1/2}` correspond to the pencil
/// `A v = μ D v` with `μ = 1 - λ` and `v = D^{-1/2} u`; here `D = diag(A 1)`,
/// so the pencil is exactly of the form [`eigenvalue_shift_estimate`] expects,
/// with `∇A` in place of `∇L`. The Laplacian eigenvalue moves by `-∇μ`.
pub fn laplacian_shift_estimate<T: Scalar>(
    adjacency_change: ArrayView2<'_, T>,
    lambda: T,
    u: ArrayView1<'_, T>,
    degrees: ArrayView1<'_, T>,
) -> T {
    let v: Array1<T> = u.iter().zip(degrees.iter()).map(|(&u, &d)| u / d.sqrt()).collect();
    -eigenvalue_shift_estimate(adjacency_change, T::one() - lambda, v.view())
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::{array, Array2};

    #[test]
    fn identical_vectors_have_zero_distance() {
        let a = array![0.0, 0.5, 1.5];
        assert_eq!(spectral_distance(a.view(), a.view()).unwrap(), 0.0);
    }

    #[test]
    fn single_coordinate_difference() {
        let a = array![0.0, 1.0, 2.0];
        let b = array![0.0, 1.0, 1.0];
        assert_eq!(spectral_distance(a.view(), b.view()).unwrap(), 1.0);
    }

    #[test]
    fn length_mismatch() {
        let a = array![0.0, 1.0];
        let b = array![0.0];
        assert_eq!(spectral_distance(a.view(), b.view()), Err(SpacError::LengthMismatch(2, 1)));
    }

    #[test]
    fn zero_change_zero_shift() {
        let u = array![0.6, 0.8];
        assert_eq!(eigenvalue_shift_estimate(Array2::<f64>::zeros((2, 2)).view(), 1.3, u.view()), 0.0);
    }

    #[test]
    fn zero_eigenvalue_drops_degree_term() {
        let g = array![[0.1, -0.2, 0.0], [-0.2, 0.3, 0.05], [0.0, 0.05, -0.4]];
        let u = array![1.0, 1.0, 1.0] / 3f64.sqrt();
        let quad = u.dot(&g.dot(&u));
        assert!((eigenvalue_shift_estimate(g.view(), 0.0, u.view()) - quad).abs() < 1e-15);
    }
}
