//! Thin wrappers over the LAPACK symmetric/Hermitian eigensolvers.
//!
//! Matrices go in and come out as ndarray arrays; eigenvectors are the
//! columns of the returned matrix and eigenvalues are ascending.

use lapack::{dstev, dsyevd, zheevd};
use ndarray::{Array1, Array2, ShapeBuilder};
use num_complex::Complex64 as C64;
use num_traits::Zero;

use crate::error::{Error, Result};

fn to_fortran<T: Clone + Zero>(a: &Array2<T>) -> Vec<T> {
    let mut f = Array2::<T>::zeros(a.raw_dim().f());
    f.assign(a);
    f.into_raw_vec()
}

fn check_square(rows: usize, cols: usize) -> Result<()> {
    if rows != cols {
        return Err(Error::DimensionMismatch {
            expected: rows,
            got: cols,
        });
    }
    Ok(())
}

/// Real symmetric eigendecomposition (divide and conquer). Only the lower
/// triangle of `a` is read.
pub fn eigh_real(a: &Array2<f64>, vectors: bool) -> Result<(Array1<f64>, Option<Array2<f64>>)> {
    check_square(a.nrows(), a.ncols())?;
    let n = a.nrows();
    let mut buf = to_fortran(a);
    let mut w = vec![0.0; n];
    let jobz = if vectors { b'V' } else { b'N' };
    let mut info = 0;
    let mut work = vec![0.0; 1];
    let mut iwork = vec![0i32; 1];
    let ni = n as i32;
    unsafe {
        dsyevd(
            jobz,
            b'L',
            ni,
            &mut buf,
            ni.max(1),
            &mut w,
            &mut work,
            -1,
            &mut iwork,
            -1,
            &mut info,
        );
    }
    if info != 0 {
        return Err(Error::Lapack {
            routine: "dsyevd",
            info,
        });
    }
    let lwork = work[0] as usize;
    let liwork = iwork[0] as usize;
    let mut work = vec![0.0; lwork.max(1)];
    let mut iwork = vec![0i32; liwork.max(1)];
    unsafe {
        dsyevd(
            jobz,
            b'L',
            ni,
            &mut buf,
            ni.max(1),
            &mut w,
            &mut work,
            lwork as i32,
            &mut iwork,
            liwork as i32,
            &mut info,
        );
    }
    if info != 0 {
        return Err(Error::Lapack {
            routine: "dsyevd",
            info,
        });
    }
    let vecs = if vectors {
        Some(Array2::from_shape_vec((n, n).f(), buf).expect("shape matches buffer"))
    } else {
        None
    };
    Ok((Array1::from(w), vecs))
}

/// Complex Hermitian eigendecomposition (divide and conquer). Only the lower
/// triangle of `a` is read.
pub fn eigh_complex(a: &Array2<C64>, vectors: bool) -> Result<(Array1<f64>, Option<Array2<C64>>)> {
    check_square(a.nrows(), a.ncols())?;
    let n = a.nrows();
    let mut buf = to_fortran(a);
    let mut w = vec![0.0; n];
    let jobz = if vectors { b'V' } else { b'N' };
    let ni = n as i32;
    let mut info = 0;
    let mut work = vec![C64::new(0.0, 0.0); 1];
    let mut rwork = vec![0.0; 1];
    let mut iwork = vec![0i32; 1];
    unsafe {
        zheevd(
            jobz,
            b'L',
            ni,
            &mut buf,
            ni.max(1),
            &mut w,
            &mut work,
            -1,
            &mut rwork,
            -1,
            &mut iwork,
            -1,
            &mut info,
        );
    }
    if info != 0 {
        return Err(Error::Lapack {
            routine: "zheevd",
            info,
        });
    }
    let lwork = work[0].re as usize;
    let lrwork = rwork[0] as usize;
    let liwork = iwork[0] as usize;
    let mut work = vec![C64::new(0.0, 0.0); lwork.max(1)];
    let mut rwork = vec![0.0; lrwork.max(1)];
    let mut iwork = vec![0i32; liwork.max(1)];
    unsafe {
        zheevd(
            jobz,
            b'L',
            ni,
            &mut buf,
            ni.max(1),
            &mut w,
            &mut work,
            lwork as i32,
            &mut rwork,
            lrwork as i32,
            &mut iwork,
            liwork as i32,
            &mut info,
        );
    }
    if info != 0 {
        return Err(Error::Lapack {
            routine: "zheevd",
            info,
        });
    }
    let vecs = if vectors {
        Some(Array2::from_shape_vec((n, n).f(), buf).expect("shape matches buffer"))
    } else {
        None
    };
    Ok((Array1::from(w), vecs))
}

/// Eigendecomposition of the real symmetric tridiagonal matrix with main
/// diagonal `diag` and sub-diagonal `off` (`off.len() == diag.len() - 1`).
pub fn eigh_tridiagonal(diag: &[f64], off: &[f64]) -> Result<(Vec<f64>, Array2<f64>)> {
    let n = diag.len();
    if n == 0 || off.len() + 1 != n {
        return Err(Error::InvalidDimension(format!(
            "tridiagonal with {} diagonal and {} off-diagonal entries",
            n,
            off.len()
        )));
    }
    let mut d = diag.to_vec();
    // dstev wants an e of length max(1, n-1); it is overwritten.
    let mut e = off.to_vec();
    if e.is_empty() {
        e.push(0.0);
    }
    let mut z = vec![0.0; n * n];
    let mut work = vec![0.0; (2 * n).saturating_sub(2).max(1)];
    let mut info = 0;
    unsafe {
        dstev(b'V', n as i32, &mut d, &mut e, &mut z, n as i32, &mut work, &mut info);
    }
    if info != 0 {
        return Err(Error::Lapack { routine: "dstev", info });
    }
    Ok((d, Array2::from_shape_vec((n, n).f(), z).expect("shape matches buffer")))
}
