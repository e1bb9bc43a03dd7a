//! Spectral analyses of clean and perturbed graphs: band-limited edge
//! reconstruction and rank-paired eigenvalue differences.

use ndarray::{Array1, Array2, Axis};
use serde::{Deserialize, Serialize};
use spac::graph::Graph;
use spac::laplacian::{laplacian_of, laplacian_of_lenient};
use spac::perturbation::FlipSet;
use spac::spectral::{eig_full, eigenvalues};
use spac::{Result, SpacError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Band {
    Lowest(usize),
    Highest(usize),
}

/// `R = Σ_{i ∈ band} (1 - λ_i) u_i u_i^T` of the clean Laplacian.
pub fn band_filter_response(g: &Graph<f64>, band: Band) -> Result<Array2<f64>> {
    let n = g.n();
    let k = match band {
        Band::Lowest(k) | Band::Highest(k) => k,
    };
    if k > n {
        return Err(SpacError::InvalidConfig(format!("band of {k} components exceeds n = {n}")));
    }
    let basis = eig_full(laplacian_of(g.adjacency())?.view())?;
    let range = match band {
        Band::Lowest(k) => 0..k,
        Band::Highest(k) => (n - k)..n,
    };
    let u = basis.eigenvectors().slice(ndarray::s![.., range.clone()]).to_owned();
    let filter: Array1<f64> = basis.eigenvalues().slice(ndarray::s![range]).mapv(|l| 1.0 - l);
    let scaled = &u * &filter.view().insert_axis(Axis(0));
    Ok(scaled.dot(&u.t()))
}

/// `R_uv` for every edge `u < v` of `g`, in [`Graph::edges`] order.
pub fn frequency_band_reconstruction(g: &Graph<f64>, band: Band) -> Result<Vec<((usize, usize), f64)>> {
    let r = band_filter_response(g, band)?;
    Ok(g.edges().into_iter().map(|(u, v)| ((u, v), r[[u, v]])).collect())
}

/// Flip counts split by direction and by whether the endpoints share a label.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct FlipCounts {
    pub added_inter: usize,
    pub added_intra: usize,
    pub removed_inter: usize,
    pub removed_intra: usize,
}

impl FlipCounts {
    pub fn total(&self) -> usize {
        self.added_inter + self.added_intra + self.removed_inter + self.removed_intra
    }

    /// Inter-cluster additions minus inter-cluster removals.
    pub fn net_inter(&self) -> i64 {
        self.added_inter as i64 - self.removed_inter as i64
    }
}

pub fn flip_counts(g: &Graph<f64>, flips: &FlipSet) -> Result<FlipCounts> {
    let labels = g.labels().ok_or(SpacError::MissingLabels)?;
    let mut c = FlipCounts::default();
    for &(i, j) in flips.pairs() {
        let (li, lj) = (labels.get(i).ok_or(SpacError::UnlabeledTarget(i))?, labels.get(j).ok_or(SpacError::UnlabeledTarget(j))?);
        match (g.has_edge(i, j), li == lj) {
            (true, true) => c.removed_intra += 1,
            (true, false) => c.removed_inter += 1,
            (false, true) => c.added_intra += 1,
            (false, false) => c.added_inter += 1,
        }
    }
    Ok(c)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumShift {
    /// Clean eigenvalues (the x-axis).
    pub clean: Vec<f64>,
    /// `λ(A ⊕ b1) - λ(A ⊕ b2)`, paired by rank.
    pub difference: Vec<f64>,
    /// `None` when the graph has no labels.
    pub counts: Option<(FlipCounts, FlipCounts)>,
}

/// Eigenvalues of the normalized Laplacian after applying `flips` (isolated
/// nodes contribute an eigenvalue of one).
pub fn perturbed_eigenvalues(g: &Graph<f64>, flips: &FlipSet) -> Result<Array1<f64>> {
    let perturbed = flips.apply(g)?;
    eigenvalues(laplacian_of_lenient(perturbed.adjacency()).view())
}

pub fn spectrum_shift_report(g: &Graph<f64>, b1: &FlipSet, b2: &FlipSet) -> Result<SpectrumShift> {
    let clean = eigenvalues(laplacian_of(g.adjacency())?.view())?;
    let e1 = perturbed_eigenvalues(g, b1)?;
    let e2 = perturbed_eigenvalues(g, b2)?;
    let counts = match (flip_counts(g, b1), flip_counts(g, b2)) {
        (Ok(c1), Ok(c2)) => Some((c1, c2)),
        (Err(SpacError::MissingLabels), _) | (_, Err(SpacError::MissingLabels)) => None,
        (Err(e), _) | (_, Err(e)) => return Err(e),
    };
    Ok(SpectrumShift { clean: clean.to_vec(), difference: (&e1 - &e2).to_vec(), counts })
}

#[cfg(test)]
mod tests {
    use super::*;
    use spac::graph::Labels;

    fn two_cliques() -> Graph<f64> {
        let mut edges = Vec::new();
        for base in [0, 4] {
            for i in 0..4 {
                for j in (i + 1)..4 {
                    edges.push((base + i, base + j));
                }
            }
        }
        Graph::from_edges(8, &edges).unwrap().with_labels(Labels::dense(vec![0, 0, 0, 0, 1, 1, 1, 1])).unwrap()
    }

    #[test]
    fn full_band_is_normalized_adjacency() {
        let g = spac::Graph64::from_edges(5, &[(0, 1), (1, 2), (2, 3), (3, 4), (0, 2)]).unwrap();
        let d = g.degrees();
        for ((u, v), r) in frequency_band_reconstruction(&g, Band::Lowest(5)).unwrap() {
            assert!((r - 1.0 / (d[u] * d[v]).sqrt()).abs() < 1e-12);
        }
    }

    #[test]
    fn single_edge_bands() {
        // λ = 2 flips the sign of the filter, but u_0 u_1 = -1/2 flips it back.
        let g = spac::Graph64::from_edges(2, &[(0, 1)]).unwrap();
        let high = frequency_band_reconstruction(&g, Band::Highest(1)).unwrap();
        let low = frequency_band_reconstruction(&g, Band::Lowest(1)).unwrap();
        assert!((high[0].1 - 0.5).abs() < 1e-12);
        assert!((low[0].1 + high[0].1 - 1.0).abs() < 1e-12);
        let r = band_filter_response(&g, Band::Highest(1)).unwrap();
        assert!((r[[0, 0]] + 0.5).abs() < 1e-12);
    }

    #[test]
    fn identical_flips_have_zero_difference() {
        let g = two_cliques();
        let b = FlipSet::new([(0, 5)]);
        let s = spectrum_shift_report(&g, &b, &b).unwrap();
        assert!(s.difference.iter().all(|&d| d == 0.0));
        let s = spectrum_shift_report(&g, &b, &FlipSet::default()).unwrap();
        let (c1, c2) = s.counts.unwrap();
        assert_eq!(c1, FlipCounts { added_inter: 1, ..Default::default() });
        assert_eq!(c2, FlipCounts::default());
    }

    #[test]
    fn unlabeled_graph_still_reports_spectrum() {
        let g = spac::Graph64::from_edges(4, &[(0, 1), (1, 2), (2, 3)]).unwrap();
        let s = spectrum_shift_report(&g, &FlipSet::new([(0, 3)]), &FlipSet::default()).unwrap();
        assert!(s.counts.is_none());
        assert_eq!(s.difference.len(), 4);
    }
}
