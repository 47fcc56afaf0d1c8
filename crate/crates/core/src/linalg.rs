//! Dense complex linear-algebra helpers shared by every module.
//!
//! Everything here works on plain `nalgebra` matrices; the validated wrapper
//! types live in [`crate::operator`].

use nalgebra::{DMatrix, DVector, SymmetricEigen, SVD};
use num_complex::Complex64;

pub type CMat = DMatrix<Complex64>;
pub type CVec = DVector<Complex64>;

/// Relative cut-off below which singular values are treated as zero in
/// pseudo-inverses.
pub const PINV_RTOL: f64 = 1e-12;

pub const ZERO: Complex64 = Complex64::new(0.0, 0.0);
pub const ONE: Complex64 = Complex64::new(1.0, 0.0);
pub const I: Complex64 = Complex64::new(0.0, 1.0);

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn real(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

pub fn identity(n: usize) -> CMat {
    CMat::identity(n, n)
}

pub fn zeros(r: usize, c: usize) -> CMat {
    CMat::zeros(r, c)
}

pub fn from_real_diagonal(d: &[f64]) -> CMat {
    let n = d.len();
    let mut m = zeros(n, n);
    for (i, &x) in d.iter().enumerate() {
        m[(i, i)] = real(x);
    }
    m
}

pub fn trace(m: &CMat) -> Complex64 {
    m.diagonal().iter().sum()
}

pub fn max_abs(m: &CMat) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

pub fn max_abs_diff(a: &CMat, b: &CMat) -> f64 {
    assert_eq!(a.shape(), b.shape());
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

pub fn frobenius(m: &CMat) -> f64 {
    m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

pub fn hermitian_deviation(m: &CMat) -> f64 {
    max_abs_diff(m, &m.adjoint())
}

pub fn hermitian_part(m: &CMat) -> CMat {
    (m + m.adjoint()) * real(0.5)
}

/// Kronecker product, first factor major.
pub fn kron(a: &CMat, b: &CMat) -> CMat {
    a.kronecker(b)
}

pub fn kron_vec(a: &CVec, b: &CVec) -> CVec {
    a.kronecker(b)
}

/// Partial trace over the second factor of a `da*db` square matrix.
pub fn partial_trace_second(m: &CMat, da: usize, db: usize) -> CMat {
    assert_eq!(m.nrows(), da * db);
    let mut out = zeros(da, da);
    for i in 0..da {
        for j in 0..da {
            let mut s = ZERO;
            for b in 0..db {
                s += m[(i * db + b, j * db + b)];
            }
            out[(i, j)] = s;
        }
    }
    out
}

/// Partial trace over the first factor of a `da*db` square matrix.
pub fn partial_trace_first(m: &CMat, da: usize, db: usize) -> CMat {
    assert_eq!(m.nrows(), da * db);
    let mut out = zeros(db, db);
    for i in 0..db {
        for j in 0..db {
            let mut s = ZERO;
            for a in 0..da {
                s += m[(a * db + i, a * db + j)];
            }
            out[(i, j)] = s;
        }
    }
    out
}

pub fn outer(u: &CVec, v: &CVec) -> CMat {
    u * v.adjoint()
}

pub fn projector_onto(v: &CVec) -> CMat {
    outer(v, v)
}

/// Eigendecomposition of a Hermitian matrix, eigenvalues in non-increasing
/// order with eigenvectors as the matching columns.
pub fn eigh(m: &CMat) -> (Vec<f64>, CMat) {
    let n = m.nrows();
    if n == 0 {
        return (Vec::new(), zeros(0, 0));
    }
    let eig = SymmetricEigen::new(hermitian_part(m));
    let mut idx: Vec<usize> = (0..n).collect();
    idx.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
    let vals = idx.iter().map(|&i| eig.eigenvalues[i]).collect();
    let mut vecs = zeros(n, n);
    for (col, &i) in idx.iter().enumerate() {
        vecs.set_column(col, &eig.eigenvectors.column(i));
    }
    (vals, vecs)
}

pub fn eigvalsh(m: &CMat) -> Vec<f64> {
    eigh(m).0
}

/// Applies a real function to the spectrum of a Hermitian matrix.
pub fn hermitian_fn(m: &CMat, f: impl Fn(f64) -> f64) -> CMat {
    let (vals, vecs) = eigh(m);
    let d: Vec<f64> = vals.into_iter().map(f).collect();
    &vecs * from_real_diagonal(&d) * vecs.adjoint()
}

/// Square root of a positive semidefinite matrix; negative eigenvalue dust is
/// clipped.
pub fn sqrt_psd(m: &CMat) -> CMat {
    hermitian_fn(m, |x| x.max(0.0).sqrt())
}

/// Pseudo-inverse of `√m`, with the cut applied to the eigenvalues of `m`
/// itself so rounding dust in `m` is not amplified.
pub fn inv_sqrt_psd(m: &CMat) -> CMat {
    let (vals, _) = eigh(m);
    let top = vals.first().copied().unwrap_or(0.0).max(0.0);
    let cut = PINV_RTOL * top;
    hermitian_fn(m, |x| if x > cut && x > 0.0 { 1.0 / x.sqrt() } else { 0.0 })
}

/// Moore-Penrose pseudo-inverse of a Hermitian positive semidefinite matrix.
pub fn pinv_psd(m: &CMat) -> CMat {
    let (vals, _) = eigh(m);
    let top = vals.first().copied().unwrap_or(0.0).max(0.0);
    let cut = PINV_RTOL * top;
    hermitian_fn(m, |x| if x > cut && x > 0.0 { 1.0 / x } else { 0.0 })
}

/// Singular value decomposition with values sorted non-increasingly:
/// `m = u * diag(s) * v_adj`.
pub struct SortedSvd {
    pub u: CMat,
    pub s: Vec<f64>,
    pub v_adj: CMat,
}

pub fn svd(m: &CMat) -> SortedSvd {
    let (r, cdim) = m.shape();
    let k = r.min(cdim);
    if k == 0 {
        return SortedSvd {
            u: zeros(r, 0),
            s: Vec::new(),
            v_adj: zeros(0, cdim),
        };
    }
    let dec = SVD::new(m.clone(), true, true);
    let u0 = dec.u.expect("u requested");
    let vt0 = dec.v_t.expect("v_t requested");
    let mut idx: Vec<usize> = (0..k).collect();
    idx.sort_by(|&a, &b| dec.singular_values[b].total_cmp(&dec.singular_values[a]));
    let mut u = zeros(r, k);
    let mut v_adj = zeros(k, cdim);
    let mut s = Vec::with_capacity(k);
    for (pos, &i) in idx.iter().enumerate() {
        u.set_column(pos, &u0.column(i));
        v_adj.set_row(pos, &vt0.row(i));
        s.push(dec.singular_values[i].max(0.0));
    }
    SortedSvd { u, s, v_adj }
}

pub fn singular_values(m: &CMat) -> Vec<f64> {
    svd(m).s
}

pub fn trace_norm(m: &CMat) -> f64 {
    singular_values(m).iter().sum()
}

pub fn operator_norm(m: &CMat) -> f64 {
    singular_values(m).first().copied().unwrap_or(0.0)
}

pub fn unitary_deviation(u: &CMat) -> f64 {
    max_abs_diff(&(u.adjoint() * u), &identity(u.ncols()))
}

/// Completes the orthonormal columns of `q` (n x m, m <= n) to an n x n
/// unitary.
pub fn complete_unitary(q: &CMat) -> CMat {
    let n = q.nrows();
    let mut cols: Vec<CVec> = (0..q.ncols()).map(|j| q.column(j).into_owned()).collect();
    for e in 0..n {
        if cols.len() == n {
            break;
        }
        let mut v = CVec::zeros(n);
        v[e] = ONE;
        for _ in 0..2 {
            for b in &cols {
                let proj = b.dotc(&v);
                v -= b * proj;
            }
        }
        let nv = v.norm();
        if nv > 1e-8 {
            cols.push(v / real(nv));
        }
    }
    CMat::from_columns(&cols)
}

/// Orthonormalizes the columns of `m` with a QR factorization whose `R` has a
/// non-negative real diagonal (the canonical QR retraction).
pub fn qr_orthonormalize(m: &CMat) -> CMat {
    let qr = m.clone().qr();
    let mut q = qr.q();
    let r = qr.r();
    for j in 0..q.ncols().min(r.nrows()) {
        let d = r[(j, j)];
        let n = d.norm();
        if n > 0.0 {
            let phase = d / real(n);
            let mut col = q.column_mut(j);
            col *= phase;
        }
    }
    q
}

/// Hermitian matrix exponential `exp(i * h)` for Hermitian `h`.
pub fn expi_hermitian(h: &CMat) -> CMat {
    let (vals, vecs) = eigh(h);
    let n = vals.len();
    let mut d = zeros(n, n);
    for (i, v) in vals.iter().enumerate() {
        d[(i, i)] = Complex64::from_polar(1.0, *v);
    }
    &vecs * d * vecs.adjoint()
}

/// `x ln x` with the `0 ln 0 = 0` convention; negative dust counts as zero.
pub fn xlnx(x: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else {
        x * x.ln()
    }
}

/// Shannon entropy in nats.
pub fn shannon(p: &[f64]) -> f64 {
    -p.iter().map(|&x| xlnx(x)).sum::<f64>()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn svd_is_sorted_and_reconstructs() {
        let m = CMat::from_row_slice(
            3,
            2,
            &[c(1.0, 0.5), c(0.0, 2.0), c(-1.0, 0.0), c(0.3, 0.0), c(0.0, 0.0), c(4.0, 1.0)],
        );
        let d = svd(&m);
        assert!(d.s.windows(2).all(|w| w[0] >= w[1]));
        let mut sd = zeros(d.s.len(), d.s.len());
        for (i, s) in d.s.iter().enumerate() {
            sd[(i, i)] = real(*s);
        }
        let back = &d.u * sd * &d.v_adj;
        assert!(max_abs_diff(&back, &m) < 1e-12);
    }

    #[test]
    fn partial_traces_of_product() {
        let a = from_real_diagonal(&[0.25, 0.75]);
        let b = from_real_diagonal(&[0.1, 0.2, 0.7]);
        let ab = kron(&a, &b);
        assert!(max_abs_diff(&partial_trace_second(&ab, 2, 3), &a) < 1e-15);
        assert!(max_abs_diff(&partial_trace_first(&ab, 2, 3), &b) < 1e-15);
    }

    #[test]
    fn pinv_of_rank_deficient() {
        let m = from_real_diagonal(&[2.0, 0.0, 1e-20]);
        let p = pinv_psd(&m);
        assert_abs_diff_eq!(p[(0, 0)].re, 0.5, epsilon = 1e-14);
        assert_abs_diff_eq!(p[(1, 1)].re, 0.0);
        assert_abs_diff_eq!(p[(2, 2)].re, 0.0);
    }

    #[test]
    fn completion_is_unitary() {
        let mut q = zeros(3, 1);
        q[(0, 0)] = real(0.6);
        q[(2, 0)] = c(0.0, 0.8);
        let u = complete_unitary(&q);
        assert!(unitary_deviation(&u) < 1e-12);
        assert!(max_abs_diff(&u.columns(0, 1).into_owned(), &q) < 1e-15);
    }

    #[test]
    fn xlnx_convention() {
        assert_eq!(xlnx(0.0), 0.0);
        assert_eq!(xlnx(-1e-18), 0.0);
        assert_abs_diff_eq!(shannon(&[0.5, 0.5]), 2f64.ln(), epsilon = 1e-15);
    }
}
