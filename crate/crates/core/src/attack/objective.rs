//! The spectral term of the attack objective and its gradient.
//!
//! In exact mode every step decomposes the (noise-separated) Laplacian of the
//! current `A'`. In selective mode only `k1` lowest and `k2` highest
//! eigenvalues are tracked; they are recomputed exactly every `m` steps and
//! extrapolated to first order in between.

use ndarray::{Array1, Array2, ArrayView1, ArrayView2, Axis, Zip};
use rand::Rng;

use super::config::ApproxParams;
use crate::error::{Result, SpacError};
use crate::graph::Graph;
use crate::laplacian::{inverse_sqrt, laplacian_of, laplacian_of_lenient};
use crate::perturbation::{add_symmetry_noise_with, LegalOps};
use crate::scalar::Scalar;
use crate::spectral::{
    eig_full, eig_selective, eigenvalue_weights, eigenvalues, grad_spectral_distance, spectral_distance,
    DegeneracyPolicy,
};

/// Which eigenvalues the objective compares.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ObjectiveMode {
    Exact,
    Selective(ApproxParams),
}

/// Exact selective eigenpairs of the last refresh point, in the form used to
/// extrapolate: `v_k = D^{-1/2} u_k` and `μ_k = 1 - λ_k`.
#[derive(Debug, Clone)]
struct Anchor<T> {
    adjacency: Array2<T>,
    values: Array1<T>,
    pencil: Array2<T>,
    mu: Array1<T>,
}

impl<T: Scalar> Anchor<T> {
    fn at(a_prime: ArrayView2<'_, T>, k1: usize, k2: usize) -> Result<Self> {
        let basis = eig_selective(laplacian_of_lenient(a_prime).view(), k1, k2)?;
        let s = inverse_sqrt(&a_prime.sum_axis(Axis(1)));
        let pencil = &basis.eigenvectors() * &s.view().insert_axis(Axis(1));
        let values = basis.eigenvalues().to_owned();
        let mu = values.mapv(|l| T::one() - l);
        Ok(Self { adjacency: a_prime.to_owned(), values, pencil, mu })
    }

    /// `λ_k(A') ≈ λ_k - [v_k^T ΔA v_k - μ_k Σ_p v_kp² (ΔA 1)_p]`.
    fn extrapolate(&self, a_prime: ArrayView2<'_, T>) -> Array1<T> {
        let change = &a_prime - &self.adjacency;
        let moved = change.dot(&self.pencil);
        let quad = (&moved * &self.pencil).sum_axis(Axis(0));
        let row_sums = change.sum_axis(Axis(1));
        let diag = self.pencil.mapv(|v| v * v).t().dot(&row_sums);
        Zip::from(&self.values)
            .and(&quad)
            .and(&diag)
            .and(&self.mu)
            .map_collect(|&l, &q, &d, &mu| l - (q - mu * d))
    }

    /// Gradient of `Σ_k w_k λ_k(A')` for the extrapolated eigenvalues, per
    /// symmetric pair: `-C_pq [2 M_pq - r_p - r_q]` with `M = V diag(w) V^T`
    /// and `r_p = Σ_k w_k μ_k v_kp²`.
    fn gradient(&self, legal: &LegalOps<T>, weights: ArrayView1<'_, T>) -> Array2<T> {
        let scaled = &self.pencil * &weights.insert_axis(Axis(0));
        let m = scaled.dot(&self.pencil.t());
        let wm = Zip::from(&weights).and(&self.mu).map_collect(|&w, &mu| w * mu);
        let r = self.pencil.mapv(|v| v * v).dot(&wm);
        let two = T::of(2.0);
        let mut out = Array2::zeros(m.raw_dim());
        Zip::indexed(&mut out).and(&m).and(legal.matrix()).for_each(|(p, q), o, &mpq, &c| {
            if p != q {
                *o = -c * (two * mpq - r[p] - r[q]);
            }
        });
        out
    }
}

/// Spectral distance to the clean graph, as a stateful objective.
#[derive(Debug, Clone)]
pub struct SpectralObjective<T> {
    mode: ObjectiveMode,
    reference: Array1<T>,
    step: usize,
    anchor: Option<Anchor<T>>,
}

impl<T: Scalar> SpectralObjective<T> {
    /// Decomposes the clean Laplacian of `g`, which must have no isolated nodes.
    pub fn new(g: &Graph<T>, mode: ObjectiveMode) -> Result<Self> {
        let l = laplacian_of(g.adjacency())?;
        let reference = match mode {
            ObjectiveMode::Exact => eigenvalues(l.view())?,
            ObjectiveMode::Selective(ap) => {
                if ap.m == 0 {
                    return Err(SpacError::InvalidConfig("m must be at least 1".into()));
                }
                eig_selective(l.view(), ap.k1, ap.k2)?.eigenvalues().to_owned()
            }
        };
        Ok(Self { mode, reference, step: 0, anchor: None })
    }

    pub fn mode(&self) -> ObjectiveMode {
        self.mode
    }

    /// Clean eigenvalues the objective compares against.
    pub fn reference(&self) -> ArrayView1<'_, T> {
        self.reference.view()
    }

    /// Exactly computed eigenvalues of `A'` at the tracked indices.
    pub fn eigenvalues_of(&self, a_prime: ArrayView2<'_, T>) -> Result<Array1<T>> {
        let l = laplacian_of_lenient(a_prime);
        match self.mode {
            ObjectiveMode::Exact => eigenvalues(l.view()),
            ObjectiveMode::Selective(ap) => Ok(eig_selective(l.view(), ap.k1, ap.k2)?.eigenvalues().to_owned()),
        }
    }

    /// Exact (noise-free) distance at `A'`.
    pub fn value(&self, a_prime: ArrayView2<'_, T>) -> Result<T> {
        spectral_distance(self.reference.view(), self.eigenvalues_of(a_prime)?.view())
    }

    /// Distance the optimizer currently sees at `A'`: exact in exact mode,
    /// extrapolated from the last refresh point in selective mode. Does not
    /// advance the refresh schedule.
    pub fn tracked_value(&self, a_prime: ArrayView2<'_, T>) -> Result<T> {
        match (&self.mode, &self.anchor) {
            (ObjectiveMode::Selective(_), Some(anchor)) => {
                spectral_distance(self.reference.view(), anchor.extrapolate(a_prime).view())
            }
            _ => self.value(a_prime),
        }
    }

    /// One gradient evaluation: returns the noise-free distance at `A'` and
    /// its gradient with respect to Δ. When the distance is zero the gradient
    /// is undefined and a zero matrix is returned instead.
    pub fn value_and_grad<R: Rng + ?Sized>(
        &mut self,
        legal: &LegalOps<T>,
        a_prime: ArrayView2<'_, T>,
        noise_scale: T,
        rng: &mut R,
    ) -> Result<(T, Array2<T>)> {
        let n = a_prime.nrows();
        match self.mode {
            ObjectiveMode::Exact => {
                let noisy = add_symmetry_noise_with(a_prime, noise_scale, rng);
                let basis = eig_full(laplacian_of_lenient(noisy.view()).view())?;
                let value = self.value(a_prime)?;
                let grad = match grad_spectral_distance(
                    legal,
                    noisy.view(),
                    &basis,
                    self.reference.view(),
                    DegeneracyPolicy::MergeClusters,
                ) {
                    Ok(g) => g,
                    Err(SpacError::ZeroDistance) => Array2::zeros((n, n)),
                    Err(e) => return Err(e),
                };
                Ok((value, grad))
            }
            ObjectiveMode::Selective(ap) => {
                if self.step % ap.m == 0 || self.anchor.is_none() {
                    self.anchor = Some(Anchor::at(a_prime, ap.k1, ap.k2)?);
                }
                self.step += 1;
                let anchor = self.anchor.as_ref().expect("anchor set above");
                let current = anchor.extrapolate(a_prime);
                let diff = &current - &self.reference;
                let value = diff.dot(&diff).sqrt();
                if !(value >= T::of(1e-12)) {
                    return Ok((value, Array2::zeros((n, n))));
                }
                let weights = eigenvalue_weights(
                    anchor.values.view(),
                    diff.mapv(|d| d / value),
                    DegeneracyPolicy::MergeClusters,
                )?;
                Ok((value, anchor.gradient(legal, weights.view())))
            }
        }
    }
}
