//! Analytic gradient of the spectral distance with respect to the relaxed
//! perturbation.
//!
//! The chain is `Δ -> A' = A + C∘Δ -> L' = I - D'^{-1/2} A' D'^{-1/2} -> λ'`.
//! `∂λ'_k/∂L' = u'_k u'_k^T` collapses the eigenvalue layer into a single
//! matrix `G = Σ_k w_k u'_k u'_k^T` with `w_k = (λ'_k - λ_k) / ‖Λ - Λ'‖`; the
//! Laplacian layer is then pulled back onto symmetric pair increments, where
//! each degree is a function of Δ as well.

use ndarray::{Array1, Array2, ArrayView1, ArrayView2, Axis, Zip};

use super::basis::SpectralBasis;
use crate::error::{Result, SpacError};
use crate::laplacian::{inverse_sqrt, normalized_adjacency_pullback};
use crate::perturbation::LegalOps;
use crate::scalar::Scalar;

/// What to do when two used eigenvalues coincide (gap below 1e-10).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum DegeneracyPolicy {
    /// Fail with [`SpacError::DegenerateEigenvalues`].
    #[default]
    Strict,
    /// Give every member of a cluster the cluster's mean weight, which turns
    /// its contribution into the weighted projector onto the eigenspace.
    MergeClusters,
}

/// `∂ ‖Λ - Λ'‖₂ / ∂Δ` per symmetric pair (symmetric, zero diagonal).
///
/// `weighted_adj` is the matrix whose Laplacian produced `basis` (typically
/// `A'` plus symmetry noise); `reference` holds the clean eigenvalues at the
/// basis indices.
pub fn grad_spectral_distance<T: Scalar>(
    legal: &LegalOps<T>,
    weighted_adj: ArrayView2<'_, T>,
    basis: &SpectralBasis<T>,
    reference: ArrayView1<'_, T>,
    policy: DegeneracyPolicy,
) -> Result<Array2<T>> {
    let current = basis.eigenvalues();
    if current.len() != reference.len() {
        return Err(SpacError::LengthMismatch(reference.len(), current.len()));
    }
    let diff: Array1<T> = &current - &reference;
    let dist = diff.dot(&diff).sqrt();
    if !(dist >= T::of(1e-12)) {
        return Err(SpacError::ZeroDistance);
    }
    let weights = eigenvalue_weights(current, diff.mapv(|d| d / dist), policy)?;
    let g = weighted_projector(basis.eigenvectors(), weights.view());
    Ok(laplacian_pullback(legal, weighted_adj, g.view()))
}

/// Cluster-aware weights for `Σ_k w_k u_k u_k^T`.
pub fn eigenvalue_weights<T: Scalar>(
    eigenvalues: ArrayView1<'_, T>,
    mut weights: Array1<T>,
    policy: DegeneracyPolicy,
) -> Result<Array1<T>> {
    let gap = T::tol(1e-10);
    let n = eigenvalues.len();
    let mut start = 0;
    while start < n {
        let mut end = start + 1;
        while end < n && (eigenvalues[end] - eigenvalues[end - 1]).abs() < gap {
            end += 1;
        }
        if end - start > 1 {
            match policy {
                DegeneracyPolicy::Strict => {
                    return Err(SpacError::DegenerateEigenvalues {
                        value: eigenvalues[start].to_f64_lossy(),
                        multiplicity: end - start,
                    });
                }
                DegeneracyPolicy::MergeClusters => {
                    let mean = weights.slice(ndarray::s![start..end]).sum() / T::of_usize(end - start);
                    weights.slice_mut(ndarray::s![start..end]).fill(mean);
                }
            }
        }
        start = end;
    }
    Ok(weights)
}

/// `U diag(w) U^T`.
pub fn weighted_projector<T: Scalar>(vectors: ArrayView2<'_, T>, weights: ArrayView1<'_, T>) -> Array2<T> {
    let scaled = &vectors * &weights.view().insert_axis(Axis(0));
    scaled.dot(&vectors.t())
}

/// Given `G = ∂F/∂L'` (symmetric) for `L'` the normalized Laplacian of
/// `weighted_adj`, returns `∂F/∂Δ` per symmetric pair.
pub fn laplacian_pullback<T: Scalar>(
    legal: &LegalOps<T>,
    weighted_adj: ArrayView2<'_, T>,
    g: ArrayView2<'_, T>,
) -> Array2<T> {
    // L' = I - N, so ∂F/∂N = -G and its symmetrization is -2G.
    let msym = g.mapv(|v| -(v + v));
    let s = inverse_sqrt(&weighted_adj.sum_axis(Axis(1)));
    let mut out = normalized_adjacency_pullback(msym.view(), weighted_adj, &s);
    Zip::from(&mut out).and(legal.matrix()).for_each(|o, &c| *o *= c);
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::Graph;
    use crate::laplacian::laplacian_of;
    use crate::perturbation::apply_with;
    use crate::spectral::basis::{eig_full, eigenvalues};

    #[test]
    fn unperturbed_graph_has_zero_distance() {
        let g = Graph::<f64>::from_edges(4, &[(0, 1), (1, 2), (2, 3), (3, 0), (0, 2)]).unwrap();
        let legal = LegalOps::new(&g);
        let l = laplacian_of(g.adjacency()).unwrap();
        let basis = eig_full(l.view()).unwrap();
        let reference = basis.eigenvalues().to_owned();
        let err = grad_spectral_distance(&legal, g.adjacency(), &basis, reference.view(), DegeneracyPolicy::Strict);
        assert_eq!(err, Err(SpacError::ZeroDistance));
    }

    #[test]
    fn strict_policy_reports_multiplicity() {
        let eig = Array1::<f64>::from(vec![0.0, 1.0, 1.0, 2.0]);
        let w = Array1::<f64>::from(vec![0.1, 0.2, 0.3, 0.4]);
        assert!(matches!(
            eigenvalue_weights(eig.view(), w.clone(), DegeneracyPolicy::Strict),
            Err(SpacError::DegenerateEigenvalues { multiplicity: 2, .. })
        ));
        let merged = eigenvalue_weights(eig.view(), w, DegeneracyPolicy::MergeClusters).unwrap();
        assert!((merged[1] - 0.25).abs() < 1e-15 && (merged[2] - 0.25).abs() < 1e-15);
    }

    #[test]
    fn gradient_is_symmetric_with_zero_diagonal() {
        let g = Graph::<f64>::from_edges(6, &[(0, 1), (1, 2), (2, 3), (3, 4), (4, 5), (5, 0), (1, 4)]).unwrap();
        let legal = LegalOps::new(&g);
        let delta = Array2::from_shape_fn((6, 6), |(i, j)| if i == j { 0.0 } else { 0.05 + 0.01 * ((i + j) % 4) as f64 });
        let a_prime = apply_with(g.adjacency(), &legal, delta.view()).unwrap();
        let reference = eigenvalues(laplacian_of(g.adjacency()).unwrap().view()).unwrap();
        let basis = eig_full(laplacian_of(a_prime.view()).unwrap().view()).unwrap();
        let grad = grad_spectral_distance(&legal, a_prime.view(), &basis, reference.view(), DegeneracyPolicy::MergeClusters)
            .unwrap();
        for i in 0..6 {
            assert_eq!(grad[[i, i]], 0.0);
            for j in 0..6 {
                assert!((grad[[i, j]] - grad[[j, i]]).abs() < 1e-14);
            }
        }
    }
}
