//! Laplacian spectra: decompositions, spectral distance, first-order
//! eigenvalue shifts and the distance gradient.

mod basis;
mod distance;
mod gradient;

pub use basis::{eig_full, eig_selective, eigenvalues, restrict, selection_indices, Selection, SpectralBasis};
pub use distance::{eigenvalue_shift_estimate, laplacian_shift_estimate, spectral_distance, spectral_distance_approx};
pub use gradient::{
    eigenvalue_weights, grad_spectral_distance, laplacian_pullback, weighted_projector, DegeneracyPolicy,
};
