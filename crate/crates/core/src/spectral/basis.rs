use ndarray::{Array1, Array2, ArrayView1, ArrayView2, ShapeBuilder};
use serde::{Deserialize, Serialize};
use tracing::warn;

use crate::error::{Result, SpacError};
use crate::linalg::{EigenWindow, LapackInfo};
use crate::scalar::Scalar;

/// Which part of the spectrum a basis holds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Selection {
    Full,
    /// The `k1` smallest and `k2` largest eigenpairs.
    Selective { k1: usize, k2: usize },
}

/// Ascending eigenvalues with matching orthonormal eigenvectors (as columns).
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralBasis<T> {
    n: usize,
    eigenvalues: Array1<T>,
    eigenvectors: Array2<T>,
    selection: Selection,
    degenerate_boundary: bool,
}

impl<T: Scalar> SpectralBasis<T> {
    /// Assembles a basis from parts; columns are sign-normalized.
    pub fn from_parts(eigenvalues: Array1<T>, mut eigenvectors: Array2<T>, selection: Selection) -> Result<Self> {
        if eigenvectors.ncols() != eigenvalues.len() {
            return Err(SpacError::LengthMismatch(eigenvectors.ncols(), eigenvalues.len()));
        }
        normalize_signs(&mut eigenvectors);
        Ok(Self { n: eigenvectors.nrows(), eigenvalues, eigenvectors, selection, degenerate_boundary: false })
    }

    /// Matrix dimension (not the number of stored pairs).
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eigenvalues.is_empty()
    }

    pub fn eigenvalues(&self) -> ArrayView1<'_, T> {
        self.eigenvalues.view()
    }

    pub fn eigenvectors(&self) -> ArrayView2<'_, T> {
        self.eigenvectors.view()
    }

    pub fn vector(&self, k: usize) -> ArrayView1<'_, T> {
        self.eigenvectors.column(k)
    }

    pub fn selection(&self) -> Selection {
        self.selection
    }

    /// Set when a selective window boundary cuts through a repeated eigenvalue.
    pub fn degenerate_boundary(&self) -> bool {
        self.degenerate_boundary
    }

    /// Positions of the stored pairs within the full ascending spectrum.
    pub fn indices(&self) -> Vec<usize> {
        selection_indices(self.n, self.selection)
    }
}

/// Index set `S` for a selection over an `n`-dimensional spectrum.
pub fn selection_indices(n: usize, selection: Selection) -> Vec<usize> {
    match selection {
        Selection::Full => (0..n).collect(),
        Selection::Selective { k1, k2 } => (0..k1).chain(n - k2..n).collect(),
    }
}

/// Picks the entries of a full ascending spectrum that a selection keeps.
pub fn restrict<T: Scalar>(full: ArrayView1<'_, T>, selection: Selection) -> Array1<T> {
    selection_indices(full.len(), selection).into_iter().map(|i| full[i]).collect()
}

/// Makes the largest-magnitude entry of every column positive (first one on ties).
fn normalize_signs<T: Scalar>(vectors: &mut Array2<T>) {
    for mut col in vectors.columns_mut() {
        let mut best = 0;
        let mut best_abs = T::neg_infinity();
        for (i, v) in col.iter().enumerate() {
            if v.abs() > best_abs {
                best_abs = v.abs();
                best = i;
            }
        }
        if col.len() > 0 && col[best] < T::zero() {
            col.mapv_inplace(|v| -v);
        }
    }
}

fn check_square_symmetric<T: Scalar>(l: ArrayView2<'_, T>) -> Result<(T, T)> {
    let (r, c) = l.dim();
    if r != c {
        return Err(SpacError::ShapeMismatch { expected: (r, r), found: (r, c) });
    }
    let mut max_abs = T::zero();
    let mut asym = T::zero();
    for i in 0..r {
        for j in 0..r {
            max_abs = max_abs.max(l[[i, j]].abs());
            if j > i {
                asym = asym.max((l[[i, j]] - l[[j, i]]).abs());
            }
        }
    }
    if !(asym <= T::tol(1e-10) * max_abs.max(T::one())) {
        return Err(SpacError::NotSymmetric(asym.to_f64_lossy()));
    }
    Ok((max_abs, asym))
}

fn convergence_failure<T: Scalar>(info: LapackInfo, n: usize, diag: (T, T)) -> SpacError {
    SpacError::ConvergenceFailure {
        info: info.0,
        n,
        max_abs: diag.0.to_f64_lossy(),
        asymmetry: diag.1.to_f64_lossy(),
    }
}

/// Full eigendecomposition of a symmetric matrix.
pub fn eig_full<T: Scalar>(l: ArrayView2<'_, T>) -> Result<SpectralBasis<T>> {
    let diag = check_square_symmetric(l)?;
    let n = l.nrows();
    let mut buf: Vec<T> = l.iter().copied().collect();
    let mut w = vec![T::zero(); n];
    T::eigh_dense(n, &mut buf, &mut w, true).map_err(|e| convergence_failure(e, n, diag))?;
    let vectors = Array2::from_shape_vec((n, n).f(), buf).expect("n*n buffer");
    SpectralBasis::from_parts(Array1::from(w), vectors, Selection::Full)
}

fn dense_windows<T: Scalar>(l: ArrayView2<'_, T>, windows: &[(usize, usize)]) -> Result<Vec<EigenWindow<T>>> {
    let full = eig_full(l)?;
    Ok(windows
        .iter()
        .map(|&(lo, hi)| EigenWindow {
            values: full.eigenvalues().slice(ndarray::s![lo..=hi]).to_vec(),
            vectors: full.eigenvectors().slice(ndarray::s![.., lo..=hi]).t().iter().copied().collect(),
        })
        .collect())
}

/// Ascending eigenvalues only.
pub fn eigenvalues<T: Scalar>(l: ArrayView2<'_, T>) -> Result<Array1<T>> {
    let diag = check_square_symmetric(l)?;
    let n = l.nrows();
    let mut buf: Vec<T> = l.iter().copied().collect();
    let mut w = vec![T::zero(); n];
    T::eigh_dense(n, &mut buf, &mut w, false).map_err(|e| convergence_failure(e, n, diag))?;
    Ok(Array1::from(w))
}

/// The `k1` smallest and `k2` largest eigenpairs.
///
/// One Householder tridiagonalization is shared by both windows; each window
/// is then solved independently, so the cost beyond the reduction scales with
/// `(k1 + k2) n`. When a window edge falls inside a repeated eigenvalue the
/// returned vectors span only part of that eigenspace; this is reported via
/// [`SpectralBasis::degenerate_boundary`] and a warning.
pub fn eig_selective<T: Scalar>(l: ArrayView2<'_, T>, k1: usize, k2: usize) -> Result<SpectralBasis<T>> {
    check_square_symmetric(l)?;
    let n = l.nrows();
    if k1 + k2 > n {
        return Err(SpacError::InvalidConfig(format!("k1 + k2 = {} exceeds n = {n}", k1 + k2)));
    }
    // Each window is widened by one pair (when available) to detect repeated
    // eigenvalues across the cut.
    let lower = if k1 > 0 { Some((0, (k1).min(n - 1))) } else { None };
    let upper = if k2 > 0 { Some(((n - k2).saturating_sub(1), n - 1)) } else { None };
    let windows: Vec<(usize, usize)> = lower.into_iter().chain(upper).collect();
    let mut buf: Vec<T> = l.iter().copied().collect();
    let solved = match T::eigh_windows(n, &mut buf, &windows) {
        Ok(solved) => solved,
        Err(info) => {
            // MRRR occasionally gives up when a window edge splits a tight
            // cluster; the divide-and-conquer solver does not.
            warn!(info = info.0, n, "windowed eigensolver failed, falling back to a full decomposition");
            dense_windows(l, &windows)?
        }
    };

    let gap = T::tol(1e-10);
    let mut degenerate = false;
    let mut values = Vec::with_capacity(k1 + k2);
    let mut columns: Vec<T> = Vec::with_capacity(n * (k1 + k2));
    let mut it = solved.into_iter();
    if let Some((lo, hi)) = lower {
        let win = it.next().expect("lower window");
        let keep = k1;
        if hi - lo + 1 > keep && k1 < n - k2 && (win.values[keep] - win.values[keep - 1]).abs() <= gap {
            degenerate = true;
        }
        values.extend_from_slice(&win.values[..keep]);
        columns.extend_from_slice(&win.vectors[..keep * n]);
    }
    if let Some((lo, hi)) = upper {
        let win = it.next().expect("upper window");
        let extra = (hi - lo + 1) - k2;
        if extra == 1 && lo >= k1 && (win.values[1] - win.values[0]).abs() <= gap {
            degenerate = true;
        }
        values.extend_from_slice(&win.values[extra..]);
        columns.extend_from_slice(&win.vectors[extra * n..]);
    }
    if degenerate {
        warn!(k1, k2, "selective eigendecomposition boundary cuts a repeated eigenvalue");
    }
    let count = values.len();
    let vectors = Array2::from_shape_vec((n, count).f(), columns).expect("n*count buffer");
    let mut basis = SpectralBasis::from_parts(Array1::from(values), vectors, Selection::Selective { k1, k2 })?;
    basis.degenerate_boundary = degenerate;
    Ok(basis)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::Graph;
    use crate::laplacian::normalized_laplacian;

    #[test]
    fn path_p3_spectrum() {
        let g = Graph::<f64>::from_edges(3, &[(0, 1), (1, 2)]).unwrap();
        let b = eig_full(normalized_laplacian(&g).unwrap().view()).unwrap();
        for (got, want) in b.eigenvalues().iter().zip([0.0, 1.0, 2.0]) {
            assert!((got - want).abs() < 1e-12);
        }
    }

    #[test]
    fn complete_k4_spectrum() {
        let g = Graph::<f64>::from_edges(4, &[(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]).unwrap();
        let b = eig_full(normalized_laplacian(&g).unwrap().view()).unwrap();
        let want = [0.0, 4.0 / 3.0, 4.0 / 3.0, 4.0 / 3.0];
        assert!(b.eigenvalues().iter().zip(want).all(|(a, b)| (a - b).abs() < 1e-12));
    }

    #[test]
    fn star_selective_ends() {
        let g = Graph::<f64>::from_edges(5, &[(0, 1), (0, 2), (0, 3), (0, 4)]).unwrap();
        let l = normalized_laplacian(&g).unwrap();
        let b = eig_selective(l.view(), 1, 1).unwrap();
        assert!(b.eigenvalues()[0].abs() < 1e-12);
        assert!((b.eigenvalues()[1] - 2.0).abs() < 1e-12);
        assert_eq!(b.indices(), vec![0, 4]);
        assert!(!b.degenerate_boundary());
        // the middle eigenvalue 1 has multiplicity 3
        let b = eig_selective(l.view(), 2, 0).unwrap();
        assert!(b.degenerate_boundary());
    }

    #[test]
    fn rejects_asymmetric_input() {
        let m = ndarray::array![[1.0, 0.5], [0.0, 1.0]];
        assert!(matches!(eig_full(m.view()), Err(SpacError::NotSymmetric(_))));
    }

    #[test]
    fn sign_convention_largest_entry_positive() {
        let g = Graph::<f64>::from_edges(4, &[(0, 1), (1, 2), (2, 3)]).unwrap();
        let b = eig_full(normalized_laplacian(&g).unwrap().view()).unwrap();
        for col in b.eigenvectors().columns() {
            let (mut idx, mut best) = (0, -1.0);
            for (i, v) in col.iter().enumerate() {
                if v.abs() > best {
                    best = v.abs();
                    idx = i;
                }
            }
            assert!(col[idx] > 0.0);
        }
    }

    #[test]
    fn selective_rejects_oversized_request() {
        let l = Array2::<f64>::eye(3);
        assert!(eig_selective(l.view(), 2, 2).is_err());
    }

    #[test]
    fn restrict_picks_ends() {
        let full = Array1::from(vec![0.0, 1.0, 2.0, 3.0, 4.0]);
        assert_eq!(restrict(full.view(), Selection::Selective { k1: 2, k2: 1 }).to_vec(), vec![0.0, 1.0, 4.0]);
    }
}
