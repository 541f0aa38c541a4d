//! Small dense complex linear algebra.
//!
//! Dimensions in this crate stay desk-scale (`2^N` with `N <= 10`), so a
//! cyclic Jacobi eigensolver for Hermitian matrices is accurate and fast
//! enough, and keeps the crate free of native LAPACK/BLAS backends.

use ndarray::Array2;
use num_complex::Complex64;

pub type CMat = Array2<Complex64>;

pub const C_ZERO: Complex64 = Complex64::new(0.0, 0.0);
pub const C_ONE: Complex64 = Complex64::new(1.0, 0.0);

#[inline]
pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn identity(dim: usize) -> CMat {
    Array2::eye(dim)
}

pub fn kron(a: &CMat, b: &CMat) -> CMat {
    ndarray::linalg::kron(a, b)
}

pub fn dagger(m: &CMat) -> CMat {
    m.t().mapv(|v| v.conj())
}

pub fn trace(m: &CMat) -> Complex64 {
    m.diag().sum()
}

pub fn max_abs(m: &CMat) -> f64 {
    m.iter().map(|v| v.norm()).fold(0.0, f64::max)
}

pub fn frobenius(m: &CMat) -> f64 {
    m.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt()
}

pub fn is_hermitian(m: &CMat, tol: f64) -> bool {
    let (r, c_) = m.dim();
    if r != c_ {
        return false;
    }
    for i in 0..r {
        for j in i..r {
            if (m[(i, j)] - m[(j, i)].conj()).norm() > tol {
                return false;
            }
        }
    }
    true
}

/// Eigendecomposition of a Hermitian matrix by cyclic Jacobi rotations.
///
/// Returns `(eigenvalues, eigenvectors)` with eigenvalues ascending and the
/// k-th column of the returned matrix the eigenvector of the k-th eigenvalue,
/// so that `m = V diag(w) V^dagger`.
pub fn hermitian_eigen(m: &CMat) -> (Vec<f64>, CMat) {
    let n = m.nrows();
    assert_eq!(n, m.ncols(), "hermitian_eigen needs a square matrix");
    debug_assert!(
        is_hermitian(m, 1e-9),
        "hermitian_eigen needs a Hermitian matrix"
    );

    let mut a = m.clone();
    let mut v = identity(n);
    let scale = frobenius(&a).max(1.0);
    let tol = 1e-15 * scale;

    for _sweep in 0..100 {
        let mut off = 0.0f64;
        for p in 0..n {
            for q in (p + 1)..n {
                off += a[(p, q)].norm_sqr();
            }
        }
        if off.sqrt() <= tol {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let g = a[(p, q)];
                let gn = g.norm();
                if gn <= tol / (n as f64) {
                    continue;
                }
                // Phase that makes the (p,q) entry real, then a real Jacobi
                // rotation on the resulting symmetric 2x2 block.
                let phase = g / gn;
                let app = a[(p, p)].re;
                let aqq = a[(q, q)].re;
                let theta = (aqq - app) / (2.0 * gn);
                let t = if theta >= 0.0 {
                    1.0 / (theta + (1.0 + theta * theta).sqrt())
                } else {
                    -1.0 / (-theta + (1.0 + theta * theta).sqrt())
                };
                let cos = 1.0 / (1.0 + t * t).sqrt();
                let sin = t * cos;

                // R[p,p] = cos, R[p,q] = sin,
                // R[q,p] = -sin * conj(phase), R[q,q] = cos * conj(phase).
                let rqp = -sin * phase.conj();
                let rqq = cos * phase.conj();

                // A <- R^dagger A R, applied as column then row updates.
                for i in 0..n {
                    let aip = a[(i, p)];
                    let aiq = a[(i, q)];
                    a[(i, p)] = aip * cos + aiq * rqp;
                    a[(i, q)] = aip * sin + aiq * rqq;
                }
                for j in 0..n {
                    let apj = a[(p, j)];
                    let aqj = a[(q, j)];
                    a[(p, j)] = apj * cos + aqj * rqp.conj();
                    a[(q, j)] = apj * sin + aqj * rqq.conj();
                }
                for i in 0..n {
                    let vip = v[(i, p)];
                    let viq = v[(i, q)];
                    v[(i, p)] = vip * cos + viq * rqp;
                    v[(i, q)] = vip * sin + viq * rqq;
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    let diag: Vec<f64> = (0..n).map(|i| a[(i, i)].re).collect();
    order.sort_by(|&i, &j| diag[i].partial_cmp(&diag[j]).unwrap());

    let eigvals: Vec<f64> = order.iter().map(|&i| diag[i]).collect();
    let mut vecs = Array2::zeros((n, n));
    for (k, &i) in order.iter().enumerate() {
        for r in 0..n {
            vecs[(r, k)] = v[(r, i)];
        }
    }
    (eigvals, vecs)
}

/// `exp(scale * m)` for Hermitian `m`, via spectral decomposition.
pub fn expm_hermitian(m: &CMat, scale: Complex64) -> CMat {
    let (w, v) = hermitian_eigen(m);
    let n = m.nrows();
    let mut scaled = v.clone();
    for (k, &wk) in w.iter().enumerate() {
        let e = (scale * wk).exp();
        for r in 0..n {
            scaled[(r, k)] *= e;
        }
    }
    scaled.dot(&dagger(&v))
}

/// Trace norm (sum of absolute eigenvalues) of a Hermitian matrix.
pub fn trace_norm_hermitian(m: &CMat) -> f64 {
    let (w, _) = hermitian_eigen(m);
    w.iter().map(|x| x.abs()).sum()
}

/// Operator (spectral) norm of an arbitrary matrix.
pub fn operator_norm(m: &CMat) -> f64 {
    let gram = dagger(m).dot(m);
    let (w, _) = hermitian_eigen(&gram);
    w.last().copied().unwrap_or(0.0).max(0.0).sqrt()
}
