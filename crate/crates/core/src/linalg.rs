//! Dense Hermitian helpers on top of nalgebra.

use nalgebra::{Cholesky, DMatrix, DVector};
use num_complex::Complex64;

pub type CMatrix = DMatrix<Complex64>;
pub type CVector = DVector<Complex64>;

/// Eigenvalues in ascending order with matching eigenvector columns.
pub fn hermitian_eigen(m: &CMatrix) -> (Vec<f64>, CMatrix) {
    let eig = m.clone().symmetric_eigen();
    let n = eig.eigenvalues.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = CMatrix::from_fn(n, n, |r, c| eig.eigenvectors[(r, order[c])]);
    (values, vectors)
}

pub fn hermitian_eigenvalues(m: &CMatrix) -> Vec<f64> {
    let mut v: Vec<f64> = m.clone().symmetric_eigenvalues().iter().copied().collect();
    v.sort_by(f64::total_cmp);
    v
}

/// `max |m - m^*| / max |m|`.
pub fn hermitian_defect(m: &CMatrix) -> f64 {
    let scale = m.iter().map(|z| z.norm()).fold(0.0, f64::max);
    if scale == 0.0 {
        return 0.0;
    }
    let mut worst: f64 = 0.0;
    for r in 0..m.nrows() {
        for c in 0..m.ncols() {
            worst = worst.max((m[(r, c)] - m[(c, r)].conj()).norm());
        }
    }
    worst / scale
}

/// Cholesky factorisation that fails when the smallest pivot falls below
/// `floor` times the largest diagonal entry. Returns the failing ratio on error.
pub fn cholesky_checked(m: &CMatrix, floor: f64) -> Result<Cholesky<Complex64, nalgebra::Dyn>, f64> {
    let diag_max = (0..m.nrows()).map(|i| m[(i, i)].re).fold(0.0, f64::max);
    if diag_max <= 0.0 {
        return Err(0.0);
    }
    let chol = Cholesky::new(m.clone()).ok_or(f64::NAN)?;
    let l = chol.l_dirty();
    let pivot_min = (0..m.nrows()).map(|i| l[(i, i)].norm_sqr()).fold(f64::INFINITY, f64::min);
    let ratio = pivot_min / diag_max;
    if ratio < floor {
        return Err(ratio);
    }
    Ok(chol)
}

/// `f(M) = V f(Λ) V^*` for Hermitian `M`, with eigenvalues clamped below at `floor`.
///
/// Returns the matrix and the number of eigenvalues that hit the floor.
pub fn hermitian_function(m: &CMatrix, floor: f64, f: impl Fn(f64) -> f64) -> (CMatrix, usize) {
    let (values, vectors) = hermitian_eigen(m);
    let mut hits = 0;
    let scaled: Vec<f64> = values
        .iter()
        .map(|&v| {
            if v < floor {
                hits += 1;
                f(floor)
            } else {
                f(v)
            }
        })
        .collect();
    let n = values.len();
    let mut out = CMatrix::zeros(n, n);
    for k in 0..n {
        let s = scaled[k];
        for c in 0..n {
            let vc = vectors[(c, k)].conj() * s;
            for r in 0..n {
                out[(r, c)] += vectors[(r, k)] * vc;
            }
        }
    }
    (out, hits)
}
