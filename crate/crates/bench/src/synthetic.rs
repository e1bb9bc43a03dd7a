//! Seeded synthetic graphs with labels, features and a train/test split.

use std::fmt;
use std::str::FromStr;

use ndarray::Array2;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};
use spac::graph::{Graph, Labels, Split};
use spac::SpacError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum SyntheticKind {
    /// Stochastic block model; labels are block ids.
    Sbm { sizes: Vec<usize>, p_in: f64, p_out: f64 },
    /// Points in the unit square joined within `radius`; labels are quadrants.
    RandomGeometric { n: usize, radius: f64 },
    /// Zachary's karate club; labels are the two factions.
    Karate,
}

/// Feature and split settings shared by all generators.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SyntheticOptions {
    pub feature_dim: usize,
    /// Scale of the class prototype in each feature vector.
    pub feature_signal: f64,
    /// Standard deviation of the Gaussian feature noise.
    pub feature_noise: f64,
    pub train_per_class: usize,
}

impl Default for SyntheticOptions {
    fn default() -> Self {
        Self { feature_dim: 16, feature_signal: 1.0, feature_noise: 1.0, train_per_class: 20 }
    }
}

#[derive(Debug, Clone)]
pub struct SyntheticGraph {
    pub graph: Graph<f64>,
    pub warnings: Vec<String>,
}

pub const KARATE_EDGES: [(usize, usize); 78] = [
    (0, 1), (0, 2), (0, 3), (0, 4), (0, 5), (0, 6), (0, 7), (0, 8), (0, 10), (0, 11), (0, 12), (0, 13), (0, 17),
    (0, 19), (0, 21), (0, 31), (1, 2), (1, 3), (1, 7), (1, 13), (1, 17), (1, 19), (1, 21), (1, 30), (2, 3), (2, 7),
    (2, 8), (2, 9), (2, 13), (2, 27), (2, 28), (2, 32), (3, 7), (3, 12), (3, 13), (4, 6), (4, 10), (5, 6), (5, 10),
    (5, 16), (6, 16), (8, 30), (8, 32), (8, 33), (9, 33), (13, 33), (14, 32), (14, 33), (15, 32), (15, 33), (18, 32),
    (18, 33), (19, 33), (20, 32), (20, 33), (22, 32), (22, 33), (23, 25), (23, 27), (23, 29), (23, 32), (23, 33),
    (24, 25), (24, 27), (24, 31), (25, 31), (26, 29), (26, 33), (27, 33), (28, 31), (28, 33), (29, 32), (29, 33),
    (30, 32), (30, 33), (31, 32), (31, 33), (32, 33),
];

pub const KARATE_CLUBS: [usize; 34] =
    [0, 0, 0, 0, 0, 0, 0, 0, 0, 1, 0, 0, 0, 0, 1, 1, 0, 0, 1, 0, 1, 0, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1];

/// The bare karate club graph.
pub fn karate() -> Graph<f64> {
    Graph::from_edges(34, &KARATE_EDGES).expect("fixture is a simple graph")
}

pub fn generate(kind: &SyntheticKind, seed: u64, opts: &SyntheticOptions) -> Result<SyntheticGraph, SpacError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut warnings = Vec::new();
    let (n, mut edges, labels) = match kind {
        SyntheticKind::Sbm { sizes, p_in, p_out } => {
            if sizes.is_empty() || !(0.0..=1.0).contains(p_in) || !(0.0..=1.0).contains(p_out) {
                return Err(SpacError::InvalidConfig(format!("invalid SBM parameters {kind}")));
            }
            let labels: Vec<usize> = sizes.iter().enumerate().flat_map(|(b, &s)| std::iter::repeat(b).take(s)).collect();
            let n = labels.len();
            let mut edges = Vec::new();
            for i in 0..n {
                for j in (i + 1)..n {
                    let p = if labels[i] == labels[j] { *p_in } else { *p_out };
                    if rng.gen::<f64>() < p {
                        edges.push((i, j));
                    }
                }
            }
            let isolated = isolated(n, &edges);
            for v in isolated {
                let partner = (0..n).find(|&u| u != v && labels[u] == labels[v]).or((0..n).find(|&u| u != v));
                if let Some(u) = partner {
                    warnings.push(format!("disconnected output: node {v} joined to block mate {u}"));
                    edges.push((u.min(v), u.max(v)));
                }
            }
            (n, edges, labels)
        }
        SyntheticKind::RandomGeometric { n, radius } => {
            let n = *n;
            if !(*radius >= 0.0) {
                return Err(SpacError::InvalidConfig(format!("negative radius {radius}")));
            }
            let pts: Vec<(f64, f64)> = (0..n).map(|_| (rng.gen(), rng.gen())).collect();
            let dist = |a: usize, b: usize| ((pts[a].0 - pts[b].0).powi(2) + (pts[a].1 - pts[b].1).powi(2)).sqrt();
            let mut edges = Vec::new();
            for i in 0..n {
                for j in (i + 1)..n {
                    if dist(i, j) <= *radius {
                        edges.push((i, j));
                    }
                }
            }
            for v in isolated(n, &edges) {
                let nearest = (0..n).filter(|&u| u != v).min_by(|&a, &b| dist(v, a).total_cmp(&dist(v, b)).then(a.cmp(&b)));
                if let Some(u) = nearest {
                    let pair = (u.min(v), u.max(v));
                    if !edges.contains(&pair) {
                        warnings.push(format!("disconnected output: node {v} joined to nearest neighbour {u}"));
                        edges.push(pair);
                    }
                }
            }
            let labels = pts.iter().map(|&(x, y)| usize::from(x >= 0.5) + 2 * usize::from(y >= 0.5)).collect();
            (n, edges, labels)
        }
        SyntheticKind::Karate => (34, KARATE_EDGES.to_vec(), KARATE_CLUBS.to_vec()),
    };
    edges.sort_unstable();
    edges.dedup();
    for w in &warnings {
        tracing::warn!("{w}");
    }

    let num_classes = labels.iter().max().map_or(0, |m| m + 1);
    let features = block_features(&labels, num_classes, opts, &mut rng);
    let split = per_class_split(&labels, num_classes, opts.train_per_class, &mut rng);
    let graph = Graph::from_edges(n, &edges)?
        .with_features(features)?
        .with_labels(Labels::new(labels.into_iter().map(Some).collect(), num_classes)?)?
        .with_split(split)?;
    Ok(SyntheticGraph { graph, warnings })
}

fn isolated(n: usize, edges: &[(usize, usize)]) -> Vec<usize> {
    let mut deg = vec![0usize; n];
    for &(u, v) in edges {
        deg[u] += 1;
        deg[v] += 1;
    }
    (0..n).filter(|&v| deg[v] == 0).collect()
}

/// `signal · prototype[label] + noise · N(0, 1)` with random 0/1 prototypes.
fn block_features<R: Rng>(labels: &[usize], classes: usize, opts: &SyntheticOptions, rng: &mut R) -> Array2<f64> {
    let d = opts.feature_dim;
    let prototypes = Array2::from_shape_simple_fn((classes, d), || if rng.gen_bool(0.5) { 1.0 } else { 0.0 });
    Array2::from_shape_fn((labels.len(), d), |(v, k)| {
        let noise: f64 = rng.sample(StandardNormal);
        opts.feature_signal * prototypes[[labels[v], k]] + opts.feature_noise * noise
    })
}

/// `per_class` random training nodes per class; every other node is a test node.
fn per_class_split<R: Rng>(labels: &[usize], classes: usize, per_class: usize, rng: &mut R) -> Split {
    let mut train = Vec::new();
    for c in 0..classes {
        let mut members: Vec<usize> = (0..labels.len()).filter(|&v| labels[v] == c).collect();
        members.shuffle(rng);
        // Leave at least one test node per class.
        let take = per_class.min(members.len().saturating_sub(1));
        train.extend_from_slice(&members[..take]);
    }
    train.sort_unstable();
    let test = (0..labels.len()).filter(|v| train.binary_search(v).is_err()).collect();
    Split { train, test }
}

impl fmt::Display for SyntheticKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SyntheticKind::Sbm { sizes, p_in, p_out } => {
                let sizes: Vec<String> = sizes.iter().map(ToString::to_string).collect();
                write!(f, "sbm:{}:{p_in}:{p_out}", sizes.join(","))
            }
            SyntheticKind::RandomGeometric { n, radius } => write!(f, "rgg:{n}:{radius}"),
            SyntheticKind::Karate => write!(f, "karate"),
        }
    }
}

/// `karate`, `sbm:<size,size,...>:<p_in>:<p_out>` or `rgg:<n>:<radius>`.
impl FromStr for SyntheticKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let parts: Vec<&str> = s.split(':').collect();
        let num = |x: &str| x.parse::<f64>().map_err(|_| format!("invalid number {x:?} in {s:?}"));
        let count = |x: &str| x.parse::<usize>().map_err(|_| format!("invalid count {x:?} in {s:?}"));
        match parts.as_slice() {
            ["karate"] => Ok(Self::Karate),
            ["sbm", sizes, p_in, p_out] => Ok(Self::Sbm {
                sizes: sizes.split(',').map(count).collect::<Result<_, _>>()?,
                p_in: num(p_in)?,
                p_out: num(p_out)?,
            }),
            ["rgg", n, radius] => Ok(Self::RandomGeometric { n: count(n)?, radius: num(radius)? }),
            _ => Err(format!("unknown synthetic graph {s:?}; expected karate, sbm:<sizes>:<p_in>:<p_out> or rgg:<n>:<radius>")),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn karate_is_canonical() {
        let g = generate(&SyntheticKind::Karate, 0, &SyntheticOptions::default()).unwrap().graph;
        assert_eq!(g.n(), 34);
        assert_eq!(g.num_edges(), 78);
        assert_eq!(g.degrees()[33], 17.0);
        assert_eq!(g.degrees()[0], 16.0);
    }

    #[test]
    fn sbm_is_reproducible() {
        let kind = SyntheticKind::Sbm { sizes: vec![20, 20], p_in: 0.5, p_out: 0.05 };
        let a = generate(&kind, 7, &SyntheticOptions::default()).unwrap().graph;
        let b = generate(&kind, 7, &SyntheticOptions::default()).unwrap().graph;
        assert_eq!(a.adjacency(), b.adjacency());
        assert_eq!(a.features(), b.features());
        assert_eq!(a.split(), b.split());
        assert_eq!(a.labels().unwrap().get(25), Some(1));
    }

    #[test]
    fn zero_radius_connects_everything() {
        let out = generate(&SyntheticKind::RandomGeometric { n: 12, radius: 0.0 }, 1, &SyntheticOptions::default()).unwrap();
        assert!(out.graph.isolated_nodes().is_empty());
        assert!(!out.warnings.is_empty());
    }

    #[test]
    fn parses_ids() {
        assert_eq!("karate".parse::<SyntheticKind>().unwrap(), SyntheticKind::Karate);
        let sbm: SyntheticKind = "sbm:100,50:0.2:0.01".parse().unwrap();
        assert_eq!(sbm, SyntheticKind::Sbm { sizes: vec![100, 50], p_in: 0.2, p_out: 0.01 });
        assert_eq!(sbm.to_string().parse::<SyntheticKind>().unwrap(), sbm);
        assert!("sbm:1".parse::<SyntheticKind>().is_err());
    }

    #[test]
    fn split_keeps_a_test_node_per_class() {
        let kind = SyntheticKind::Sbm { sizes: vec![5, 30], p_in: 0.6, p_out: 0.1 };
        let g = generate(&kind, 3, &SyntheticOptions::default()).unwrap().graph;
        let split = g.split().unwrap();
        assert_eq!(split.train.len(), 4 + 20);
        assert_eq!(split.train.len() + split.test.len(), 35);
    }
}
