use std::io::{Read, Write};

use ndarray::{Array2, ArrayView2};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Result, SpacError};
use crate::graph::Graph;
use crate::laplacian::propagator_of;
use crate::scalar::Scalar;

const MAGIC: &[u8; 8] = b"SPACGCN1";

/// Two-layer GCN `Z = L~ ReLU(L~ X Θ0) Θ1`.
#[derive(Debug, Clone, PartialEq)]
pub struct GcnModel<T> {
    pub theta0: Array2<T>,
    pub theta1: Array2<T>,
}

/// Intermediate products of one forward pass.
#[derive(Debug, Clone)]
pub struct Forward<T> {
    /// `X Θ0`
    pub xw: Array2<T>,
    /// `L~ X Θ0`
    pub pre: Array2<T>,
    /// `ReLU(pre)`
    pub hidden: Array2<T>,
    /// `H Θ1`
    pub hw: Array2<T>,
    pub logits: Array2<T>,
}

impl<T: Scalar> GcnModel<T> {
    pub fn zeros(features: usize, hidden: usize, classes: usize) -> Self {
        Self { theta0: Array2::zeros((features, hidden)), theta1: Array2::zeros((hidden, classes)) }
    }

    /// Glorot-uniform initialization.
    pub fn glorot(features: usize, hidden: usize, classes: usize, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut layer = |rows: usize, cols: usize| {
            let limit = (6.0 / (rows + cols) as f64).sqrt();
            Array2::from_shape_simple_fn((rows, cols), || T::of(rng.gen_range(-limit..limit)))
        };
        let theta0 = layer(features, hidden);
        let theta1 = layer(hidden, classes);
        Self { theta0, theta1 }
    }

    pub fn num_features(&self) -> usize {
        self.theta0.nrows()
    }

    pub fn hidden(&self) -> usize {
        self.theta0.ncols()
    }

    pub fn num_classes(&self) -> usize {
        self.theta1.ncols()
    }

    pub fn forward_full(&self, propagator: ArrayView2<'_, T>, features: ArrayView2<'_, T>) -> Result<Forward<T>> {
        let n = propagator.nrows();
        if propagator.ncols() != n {
            return Err(SpacError::ShapeMismatch { expected: (n, n), found: propagator.dim() });
        }
        if features.dim() != (n, self.num_features()) {
            return Err(SpacError::ShapeMismatch { expected: (n, self.num_features()), found: features.dim() });
        }
        if self.theta1.nrows() != self.hidden() {
            return Err(SpacError::ShapeMismatch {
                expected: (self.hidden(), self.num_classes()),
                found: self.theta1.dim(),
            });
        }
        let xw = features.dot(&self.theta0);
        let pre = propagator.dot(&xw);
        let hidden = pre.mapv(|v| v.max(T::zero()));
        let hw = hidden.dot(&self.theta1);
        let logits = propagator.dot(&hw);
        Ok(Forward { xw, pre, hidden, hw, logits })
    }

    /// Logits for a propagator and feature matrix.
    pub fn forward(&self, propagator: ArrayView2<'_, T>, features: ArrayView2<'_, T>) -> Result<Array2<T>> {
        Ok(self.forward_full(propagator, features)?.logits)
    }

    /// Logits on `g` with its own self-loop propagator.
    pub fn predict_logits(&self, g: &Graph<T>) -> Result<Array2<T>> {
        let x = g.features().ok_or(SpacError::MissingFeatures)?;
        self.forward(propagator_of(g.adjacency()).view(), x)
    }

    /// Binary checkpoint: magic, scalar width in bytes, `d`, `h`, `K` as
    /// little-endian u64, then Θ0 and Θ1 row-major in little-endian.
    pub fn write_to<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        let width = std::mem::size_of::<T>() as u8;
        w.write_all(MAGIC)?;
        w.write_all(&[width])?;
        for dim in [self.num_features(), self.hidden(), self.num_classes()] {
            w.write_all(&(dim as u64).to_le_bytes())?;
        }
        for &v in self.theta0.iter().chain(self.theta1.iter()) {
            if width == 4 {
                w.write_all(&v.to_f32().expect("f32 scalar").to_le_bytes())?;
            } else {
                w.write_all(&v.to_f64_lossy().to_le_bytes())?;
            }
        }
        Ok(())
    }

    pub fn read_from<R: Read>(mut r: R) -> Result<Self> {
        let io = |e: std::io::Error| SpacError::Checkpoint(e.to_string());
        let mut magic = [0u8; 8];
        r.read_exact(&mut magic).map_err(io)?;
        if &magic != MAGIC {
            return Err(SpacError::Checkpoint("not a GCN checkpoint".into()));
        }
        let mut width = [0u8; 1];
        r.read_exact(&mut width).map_err(io)?;
        if width[0] as usize != std::mem::size_of::<T>() {
            return Err(SpacError::Checkpoint(format!(
                "checkpoint holds {}-byte scalars, expected {}",
                width[0],
                std::mem::size_of::<T>()
            )));
        }
        let mut dims = [0usize; 3];
        for d in &mut dims {
            let mut b = [0u8; 8];
            r.read_exact(&mut b).map_err(io)?;
            *d = usize::try_from(u64::from_le_bytes(b)).map_err(|_| SpacError::Checkpoint("dimension overflow".into()))?;
        }
        let [d, h, k] = dims;
        let mut read_matrix = |rows: usize, cols: usize| -> Result<Array2<T>> {
            let mut vals = Vec::with_capacity(rows * cols);
            for _ in 0..rows * cols {
                let v = if width[0] == 4 {
                    let mut b = [0u8; 4];
                    r.read_exact(&mut b).map_err(io)?;
                    T::from(f32::from_le_bytes(b)).expect("f32 scalar")
                } else {
                    let mut b = [0u8; 8];
                    r.read_exact(&mut b).map_err(io)?;
                    T::of(f64::from_le_bytes(b))
                };
                vals.push(v);
            }
            Array2::from_shape_vec((rows, cols), vals).map_err(|e| SpacError::Checkpoint(e.to_string()))
        };
        let theta0 = read_matrix(d, h)?;
        let theta1 = read_matrix(h, k)?;
        Ok(Self { theta0, theta1 })
    }
}

/// Row-wise softmax, stabilized by the row maximum.
pub fn softmax<T: Scalar>(logits: ArrayView2<'_, T>) -> Array2<T> {
    let mut out = logits.to_owned();
    for mut row in out.rows_mut() {
        let max = row.iter().copied().fold(T::neg_infinity(), T::max);
        row.mapv_inplace(|v| (v - max).exp());
        let sum = row.sum();
        row.mapv_inplace(|v| v / sum);
    }
    out
}

/// Index of the largest entry; ties go to the lowest index.
pub fn argmax<T: Scalar>(row: ndarray::ArrayView1<'_, T>) -> usize {
    let mut best = 0;
    for (c, &v) in row.iter().enumerate() {
        if v > row[best] {
            best = c;
        }
    }
    best
}
