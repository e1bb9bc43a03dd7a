//! Undirected graph with optional node attributes.

use std::collections::BTreeSet;

use ndarray::{Array1, Array2, ArrayView2, Axis};
use serde::{Deserialize, Serialize};

use crate::error::{Result, SpacError};
use crate::scalar::Scalar;

/// Disjoint train/test node sets.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Split {
    pub train: Vec<usize>,
    pub test: Vec<usize>,
}

/// Per-node class ids; `None` marks an unlabeled node.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Labels {
    ids: Vec<Option<usize>>,
    num_classes: usize,
}

impl Labels {
    pub fn new(ids: Vec<Option<usize>>, num_classes: usize) -> Result<Self> {
        if let Some((node, &Some(c))) = ids.iter().enumerate().find(|(_, c)| matches!(c, Some(c) if *c >= num_classes)) {
            return Err(SpacError::InvalidGraph(format!(
                "node {node} has class {c} but only {num_classes} classes"
            )));
        }
        Ok(Self { ids, num_classes })
    }

    /// Fully labeled nodes; the class count is `max + 1`.
    pub fn dense(ids: Vec<usize>) -> Self {
        let num_classes = ids.iter().max().map_or(0, |m| m + 1);
        Self { ids: ids.into_iter().map(Some).collect(), num_classes }
    }

    pub fn get(&self, node: usize) -> Option<usize> {
        self.ids.get(node).copied().flatten()
    }

    pub fn num_classes(&self) -> usize {
        self.num_classes
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn as_slice(&self) -> &[Option<usize>] {
        &self.ids
    }
}

/// Simple undirected graph stored as a dense symmetric 0/1 adjacency matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Graph<T> {
    adjacency: Array2<T>,
    features: Option<Array2<T>>,
    labels: Option<Labels>,
    split: Option<Split>,
}

impl<T: Scalar> Graph<T> {
    /// Builds a graph from undirected edges. Self-loops are rejected; repeated
    /// pairs collapse to one edge.
    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let mut adjacency = Array2::zeros((n, n));
        for &(u, v) in edges {
            if u >= n || v >= n {
                return Err(SpacError::InvalidGraph(format!("edge ({u}, {v}) out of range for {n} nodes")));
            }
            if u == v {
                return Err(SpacError::InvalidGraph(format!("self-loop on node {u}")));
            }
            adjacency[[u, v]] = T::one();
            adjacency[[v, u]] = T::one();
        }
        Ok(Self { adjacency, features: None, labels: None, split: None })
    }

    /// Wraps an existing adjacency matrix after checking it is binary,
    /// symmetric and loop-free.
    pub fn from_adjacency(adjacency: Array2<T>) -> Result<Self> {
        let (r, c) = adjacency.dim();
        if r != c {
            return Err(SpacError::ShapeMismatch { expected: (r, r), found: (r, c) });
        }
        for i in 0..r {
            if adjacency[[i, i]] != T::zero() {
                return Err(SpacError::InvalidGraph(format!("nonzero diagonal at node {i}")));
            }
            for j in (i + 1)..r {
                let a = adjacency[[i, j]];
                if a != adjacency[[j, i]] {
                    return Err(SpacError::InvalidGraph(format!("asymmetric entry ({i}, {j})")));
                }
                if a != T::zero() && a != T::one() {
                    return Err(SpacError::InvalidGraph(format!("non-binary entry ({i}, {j}) = {a}")));
                }
            }
        }
        Ok(Self { adjacency, features: None, labels: None, split: None })
    }

    pub fn with_features(mut self, features: Array2<T>) -> Result<Self> {
        if features.nrows() != self.n() {
            return Err(SpacError::ShapeMismatch {
                expected: (self.n(), features.ncols()),
                found: features.dim(),
            });
        }
        self.features = Some(features);
        Ok(self)
    }

    pub fn with_labels(mut self, labels: Labels) -> Result<Self> {
        if labels.len() != self.n() {
            return Err(SpacError::InvalidGraph(format!(
                "{} labels for {} nodes",
                labels.len(),
                self.n()
            )));
        }
        self.labels = Some(labels);
        Ok(self)
    }

    pub fn with_split(mut self, split: Split) -> Result<Self> {
        let n = self.n();
        let train: BTreeSet<_> = split.train.iter().copied().collect();
        if let Some(bad) = split.train.iter().chain(&split.test).find(|&&v| v >= n) {
            return Err(SpacError::InvalidGraph(format!("split node {bad} out of range")));
        }
        if let Some(both) = split.test.iter().find(|v| train.contains(v)) {
            return Err(SpacError::InvalidGraph(format!("node {both} is in both train and test")));
        }
        self.split = Some(split);
        Ok(self)
    }

    /// Same attributes, different structure. The adjacency must be binary.
    pub fn with_adjacency(&self, adjacency: Array2<T>) -> Result<Self> {
        let mut g = Self::from_adjacency(adjacency)?;
        if g.n() != self.n() {
            return Err(SpacError::ShapeMismatch { expected: self.adjacency.dim(), found: g.adjacency.dim() });
        }
        g.features = self.features.clone();
        g.labels = self.labels.clone();
        g.split = self.split.clone();
        Ok(g)
    }

    pub fn n(&self) -> usize {
        self.adjacency.nrows()
    }

    pub fn adjacency(&self) -> ArrayView2<'_, T> {
        self.adjacency.view()
    }

    pub fn features(&self) -> Option<ArrayView2<'_, T>> {
        self.features.as_ref().map(|f| f.view())
    }

    pub fn labels(&self) -> Option<&Labels> {
        self.labels.as_ref()
    }

    pub fn split(&self) -> Option<&Split> {
        self.split.as_ref()
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.adjacency[[u, v]] != T::zero()
    }

    pub fn degrees(&self) -> Array1<T> {
        self.adjacency.sum_axis(Axis(1))
    }

    /// Undirected edges as `(u, v)` with `u < v`, in row-major order.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let n = self.n();
        let mut out = Vec::new();
        for i in 0..n {
            for j in (i + 1)..n {
                if self.adjacency[[i, j]] != T::zero() {
                    out.push((i, j));
                }
            }
        }
        out
    }

    /// |E|, each undirected edge counted once.
    pub fn num_edges(&self) -> usize {
        let n = self.n();
        (0..n).map(|i| ((i + 1)..n).filter(|&j| self.adjacency[[i, j]] != T::zero()).count()).sum()
    }

    /// Edge density 2|E| / (n (n - 1)).
    pub fn density(&self) -> f64 {
        let n = self.n() as f64;
        if n < 2.0 {
            return 0.0;
        }
        2.0 * self.num_edges() as f64 / (n * (n - 1.0))
    }

    pub fn isolated_nodes(&self) -> Vec<usize> {
        self.degrees().iter().enumerate().filter(|(_, d)| **d == T::zero()).map(|(i, _)| i).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;

    #[test]
    fn from_edges_is_symmetric_and_deduplicated() {
        let g = Graph::<f64>::from_edges(4, &[(0, 1), (1, 0), (2, 3)]).unwrap();
        assert_eq!(g.num_edges(), 2);
        assert_eq!(g.edges(), vec![(0, 1), (2, 3)]);
        assert_eq!(g.adjacency(), g.adjacency().t());
    }

    #[test]
    fn rejects_loops_and_bad_matrices() {
        assert!(Graph::<f64>::from_edges(2, &[(1, 1)]).is_err());
        assert!(Graph::<f64>::from_adjacency(array![[0.0, 1.0], [0.0, 0.0]]).is_err());
        assert!(Graph::<f64>::from_adjacency(array![[1.0, 0.0], [0.0, 0.0]]).is_err());
        assert!(Graph::<f64>::from_adjacency(array![[0.0, 0.5], [0.5, 0.0]]).is_err());
    }

    #[test]
    fn split_must_be_disjoint() {
        let g = Graph::<f64>::from_edges(3, &[(0, 1)]).unwrap();
        assert!(g.clone().with_split(Split { train: vec![0], test: vec![0, 1] }).is_err());
        assert!(g.clone().with_split(Split { train: vec![0], test: vec![5] }).is_err());
        assert!(g.with_split(Split { train: vec![0], test: vec![1, 2] }).is_ok());
    }

    #[test]
    fn labels_bounded_by_class_count() {
        assert!(Labels::new(vec![Some(0), Some(2)], 2).is_err());
        let l = Labels::new(vec![Some(0), None], 2).unwrap();
        assert_eq!(l.get(1), None);
        assert_eq!(Labels::dense(vec![0, 3]).num_classes(), 4);
    }

    #[test]
    fn density_of_complete_graph_is_one() {
        let g = Graph::<f64>::from_edges(3, &[(0, 1), (1, 2), (0, 2)]).unwrap();
        assert_eq!(g.density(), 1.0);
    }
}
