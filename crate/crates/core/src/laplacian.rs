//! Normalized Laplacian and the self-loop GCN propagator.
//!
//! Both operators accept weighted adjacency matrices so that the same code
//! serves clean graphs, relaxed perturbations and noise-augmented matrices.

use ndarray::{Array1, Array2, ArrayView2, Axis, Zip};

use crate::error::{Result, SpacError};
use crate::graph::Graph;
use crate::scalar::Scalar;

/// `L = I - D^{-1/2} A D^{-1/2}` of a graph without isolated nodes.
pub fn normalized_laplacian<T: Scalar>(g: &Graph<T>) -> Result<Array2<T>> {
    laplacian_of(g.adjacency())
}

/// Normalized Laplacian of a weighted adjacency; zero-degree nodes are an error.
pub fn laplacian_of<T: Scalar>(adj: ArrayView2<'_, T>) -> Result<Array2<T>> {
    let degrees = adj.sum_axis(Axis(1));
    if let Some((i, _)) = degrees.iter().enumerate().find(|(_, d)| **d <= T::zero()) {
        return Err(SpacError::IsolatedNode(i));
    }
    Ok(assemble_laplacian(adj, &inverse_sqrt(&degrees)))
}

/// Normalized Laplacian where a zero-degree node gets `D^{-1/2}_ii = 0`, i.e. an
/// isolated node contributes an eigenvalue of exactly 1. Used to score
/// perturbed graphs, which may isolate nodes.
pub fn laplacian_of_lenient<T: Scalar>(adj: ArrayView2<'_, T>) -> Array2<T> {
    let degrees = adj.sum_axis(Axis(1));
    assemble_laplacian(adj, &inverse_sqrt(&degrees))
}

/// `d^{-1/2}` entrywise, with 0 for non-positive degrees.
pub fn inverse_sqrt<T: Scalar>(degrees: &Array1<T>) -> Array1<T> {
    degrees.mapv(|d| if d > T::zero() { d.sqrt().recip() } else { T::zero() })
}

fn assemble_laplacian<T: Scalar>(adj: ArrayView2<'_, T>, s: &Array1<T>) -> Array2<T> {
    let n = adj.nrows();
    let mut l = Array2::zeros((n, n));
    Zip::indexed(&mut l).and(&adj).for_each(|(i, j), l, &a| {
        let identity = if i == j { T::one() } else { T::zero() };
        *l = identity - a * s[i] * s[j];
    });
    l
}

/// `L~ = D~^{-1/2} (A + I) D~^{-1/2}` with `D~ = D + I`.
pub fn self_loop_propagator<T: Scalar>(g: &Graph<T>) -> Array2<T> {
    propagator_of(g.adjacency())
}

pub fn propagator_of<T: Scalar>(adj: ArrayView2<'_, T>) -> Array2<T> {
    let n = adj.nrows();
    let s = self_loop_inverse_sqrt(adj);
    let mut p = Array2::zeros((n, n));
    Zip::indexed(&mut p).and(&adj).for_each(|(i, j), p, &a| {
        let a = if i == j { a + T::one() } else { a };
        *p = a * s[i] * s[j];
    });
    p
}

/// `(d_i + 1)^{-1/2}` for the self-loop augmented graph.
pub fn self_loop_inverse_sqrt<T: Scalar>(adj: ArrayView2<'_, T>) -> Array1<T> {
    adj.sum_axis(Axis(1)).mapv(|d| (d + T::one()).sqrt().recip())
}

/// Pulls a gradient on a degree-normalized adjacency `N = S W S`,
/// `S = diag(s)`, `s_r = deg_r^{-1/2}` with `deg = W 1 + offset`, back onto
/// symmetric pair increments of `W`.
///
/// `msym` must be `dF/dN + (dF/dN)^T`. Entry `(p, q)` of the result is the
/// derivative of `F` when `W_pq` and `W_qp` both grow by the same amount (which
/// also raises `deg_p` and `deg_q`). The diagonal is left at zero.
pub fn normalized_adjacency_pullback<T: Scalar>(
    msym: ArrayView2<'_, T>,
    weights: ArrayView2<'_, T>,
    s: &Array1<T>,
) -> Array2<T> {
    let n = weights.nrows();
    // h_r = sum_s msym_rs W_rs s_s
    let mut h = Array1::zeros(n);
    Zip::from(&mut h).and(msym.rows()).and(weights.rows()).for_each(|h, m, w| {
        *h = m.iter().zip(w.iter()).zip(s.iter()).fold(T::zero(), |acc, ((&m, &w), &s)| acc + m * w * s);
    });
    let half = T::of(0.5);
    let corr: Array1<T> = Zip::from(&h).and(s).map_collect(|&h, &s| half * s * s * s * h);
    let mut out = Array2::zeros((n, n));
    Zip::indexed(&mut out).and(&msym).for_each(|(p, q), o, &m| {
        if p != q {
            *o = m * s[p] * s[q] - corr[p] - corr[q];
        }
    });
    out
}
