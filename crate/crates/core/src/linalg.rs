//! Thin LAPACK dispatch for dense symmetric eigenproblems.
//!
//! Matrices are passed as contiguous column-major buffers. A row-major
//! symmetric matrix is its own column-major image, so callers can hand over
//! `ndarray` storage directly.

/// LAPACK `info` code returned on failure.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LapackInfo(pub i32);

/// Eigenvalues (ascending) and column-major eigenvectors for one index window.
#[derive(Debug, Clone)]
pub struct EigenWindow<T> {
    pub values: Vec<T>,
    pub vectors: Vec<T>,
}

pub trait SymmetricEigenKernel: Sized + Copy {
    /// Full decomposition (divide and conquer). On success `a` holds the
    /// eigenvectors column by column when `vectors` is set.
    fn eigh_dense(n: usize, a: &mut [Self], w: &mut [Self], vectors: bool) -> Result<(), LapackInfo>;

    /// Selected eigenpairs by 0-based inclusive index windows. The matrix is
    /// reduced to tridiagonal form once; each window is then solved with MRRR
    /// and back-transformed. `a` is destroyed.
    fn eigh_windows(
        n: usize,
        a: &mut [Self],
        windows: &[(usize, usize)],
    ) -> Result<Vec<EigenWindow<Self>>, LapackInfo>;
}

macro_rules! impl_kernel {
    ($t:ty, $syevd:ident, $sytrd:ident, $stemr:ident, $ormtr:ident) => {
        impl SymmetricEigenKernel for $t {
            fn eigh_dense(
                n: usize,
                a: &mut [$t],
                w: &mut [$t],
                vectors: bool,
            ) -> Result<(), LapackInfo> {
                if n == 0 {
                    return Ok(());
                }
                let jobz = if vectors { b'V' } else { b'N' };
                let ni = n as i32;
                let mut info = 0;
                let mut work = vec![0.0 as $t; 1];
                let mut iwork = vec![0i32; 1];
                unsafe {
                    lapack::$syevd(jobz, b'U', ni, a, ni, w, &mut work, -1, &mut iwork, -1, &mut info);
                }
                if info != 0 {
                    return Err(LapackInfo(info));
                }
                let lwork = work[0] as usize;
                let liwork = iwork[0].max(1) as usize;
                work = vec![0.0; lwork.max(1)];
                iwork = vec![0; liwork];
                unsafe {
                    lapack::$syevd(
                        jobz,
                        b'U',
                        ni,
                        a,
                        ni,
                        w,
                        &mut work,
                        lwork as i32,
                        &mut iwork,
                        liwork as i32,
                        &mut info,
                    );
                }
                if info != 0 {
                    return Err(LapackInfo(info));
                }
                Ok(())
            }

            fn eigh_windows(
                n: usize,
                a: &mut [$t],
                windows: &[(usize, usize)],
            ) -> Result<Vec<EigenWindow<$t>>, LapackInfo> {
                if n == 0 {
                    return Ok(windows.iter().map(|_| EigenWindow { values: vec![], vectors: vec![] }).collect());
                }
                let ni = n as i32;
                let mut info = 0;
                let mut diag = vec![0.0 as $t; n];
                let mut off = vec![0.0 as $t; n.max(2) - 1];
                let mut tau = vec![0.0 as $t; n.max(2) - 1];
                let mut work = vec![0.0 as $t; 1];
                unsafe {
                    lapack::$sytrd(b'U', ni, a, ni, &mut diag, &mut off, &mut tau, &mut work, -1, &mut info);
                }
                if info != 0 {
                    return Err(LapackInfo(info));
                }
                let lwork = (work[0] as usize).max(1);
                work = vec![0.0; lwork];
                unsafe {
                    lapack::$sytrd(
                        b'U', ni, a, ni, &mut diag, &mut off, &mut tau, &mut work, lwork as i32, &mut info,
                    );
                }
                if info != 0 {
                    return Err(LapackInfo(info));
                }

                let mut out = Vec::with_capacity(windows.len());
                for &(lo, hi) in windows {
                    if hi < lo {
                        out.push(EigenWindow { values: vec![], vectors: vec![] });
                        continue;
                    }
                    let count = hi - lo + 1;
                    let mut d = diag.clone();
                    let mut e = vec![0.0 as $t; n];
                    e[..n - 1].copy_from_slice(&off[..n - 1]);
                    let mut m = 0i32;
                    let mut w = vec![0.0 as $t; n];
                    let mut z = vec![0.0 as $t; n * count];
                    let nzc = [count as i32];
                    let mut isuppz = vec![0i32; 2 * count];
                    let mut tryrac = 1i32;
                    let mut swork = vec![0.0 as $t; 1];
                    let mut siwork = vec![0i32; 1];
                    unsafe {
                        lapack::$stemr(
                            b'V', b'I', ni, &mut d, &mut e, 0.0, 0.0, lo as i32 + 1, hi as i32 + 1, &mut m,
                            &mut w, &mut z, ni, &nzc, &mut isuppz, &mut tryrac, &mut swork, -1, &mut siwork,
                            -1, &mut info,
                        );
                    }
                    if info != 0 {
                        return Err(LapackInfo(info));
                    }
                    let slwork = (swork[0] as usize).max(1);
                    let sliwork = (siwork[0] as usize).max(1);
                    swork = vec![0.0; slwork];
                    siwork = vec![0; sliwork];
                    unsafe {
                        lapack::$stemr(
                            b'V', b'I', ni, &mut d, &mut e, 0.0, 0.0, lo as i32 + 1, hi as i32 + 1, &mut m,
                            &mut w, &mut z, ni, &nzc, &mut isuppz, &mut tryrac, &mut swork, slwork as i32,
                            &mut siwork, sliwork as i32, &mut info,
                        );
                    }
                    if info != 0 || m as usize != count {
                        return Err(LapackInfo(if info != 0 { info } else { -1000 - m }));
                    }

                    let mut owork = vec![0.0 as $t; 1];
                    unsafe {
                        lapack::$ormtr(
                            b'L', b'U', b'N', ni, count as i32, a, ni, &tau, &mut z, ni, &mut owork, -1,
                            &mut info,
                        );
                    }
                    if info != 0 {
                        return Err(LapackInfo(info));
                    }
                    let olwork = (owork[0] as usize).max(1);
                    owork = vec![0.0; olwork];
                    unsafe {
                        lapack::$ormtr(
                            b'L', b'U', b'N', ni, count as i32, a, ni, &tau, &mut z, ni, &mut owork,
                            olwork as i32, &mut info,
                        );
                    }
                    if info != 0 {
                        return Err(LapackInfo(info));
                    }
                    w.truncate(count);
                    out.push(EigenWindow { values: w, vectors: z });
                }
                Ok(out)
            }
        }
    };
}

impl_kernel!(f64, dsyevd, dsytrd, dstemr, dormtr);
impl_kernel!(f32, ssyevd, ssytrd, sstemr, sormtr);

#[cfg(test)]
mod tests {
    use super::*;

    // 2x2 [[2,1],[1,2]] has eigenpairs 1 -> (1,-1)/sqrt2 and 3 -> (1,1)/sqrt2.
    #[test]
    fn dense_two_by_two() {
        let mut a = vec![2.0f64, 1.0, 1.0, 2.0];
        let mut w = vec![0.0; 2];
        f64::eigh_dense(2, &mut a, &mut w, true).unwrap();
        assert!((w[0] - 1.0).abs() < 1e-14 && (w[1] - 3.0).abs() < 1e-14);
        assert!((a[0].abs() - 0.5f64.sqrt()).abs() < 1e-14);
    }

    #[test]
    fn windows_match_dense() {
        let n = 6;
        let mut a = vec![0.0f64; n * n];
        for i in 0..n {
            for j in 0..n {
                a[i * n + j] = 1.0 / (1.0 + (i + j) as f64) + if i == j { i as f64 } else { 0.0 };
            }
        }
        let mut dense = a.clone();
        let mut w = vec![0.0; n];
        f64::eigh_dense(n, &mut dense, &mut w, false).unwrap();
        let win = f64::eigh_windows(n, &mut a, &[(0, 1), (4, 5)]).unwrap();
        assert!((win[0].values[0] - w[0]).abs() < 1e-12);
        assert!((win[0].values[1] - w[1]).abs() < 1e-12);
        assert!((win[1].values[0] - w[4]).abs() < 1e-12);
        assert!((win[1].values[1] - w[5]).abs() < 1e-12);
        assert_eq!(win[1].vectors.len(), 2 * n);
    }
}
