
use crate::CMatrix;

pub(crate) fn is_hermitian(m: &CMatrix, tol: f64) -> bool {
    if !m.is_square() {
        return false;
    }
    let n = m.nrows();
    let scale = m.iter().fold(1.0_f64, |acc, z| acc.max(z.norm()));
    for i in 0..n {
        for j in i..n {
            if (m[(i, j)] - m[(j, i)].conj()).norm() > tol * scale {
                return false;
            }
        }
    }
    true
}

pub(crate) fn hermitize(m: &CMatrix) -> CMatrix {
    (m + m.adjoint()).scale(0.5)
}

/// Eigenvalues of the Hermitian part of `m`, ascending.
pub(crate) fn hermitian_eigenvalues(m: &CMatrix) -> Vec<f64> {
    if m.nrows() == 0 {
        return Vec::new();
    }
    let mut ev: Vec<f64> = hermitize(m).symmetric_eigenvalues().iter().copied().collect();
    ev.sort_by(f64::total_cmp);
    ev
}

pub(crate) fn min_eigenvalue(m: &CMatrix) -> f64 {
    hermitian_eigenvalues(m).first().copied().unwrap_or(0.0)
}

/// PSD up to `-tol * max(1, largest eigenvalue)`.
pub(crate) fn is_psd(m: &CMatrix, tol: f64) -> bool {
    let ev = hermitian_eigenvalues(m);
    match (ev.first(), ev.last()) {
        (Some(&lo), Some(&hi)) => lo >= -tol * hi.max(1.0),
        _ => true,
    }
}

pub(crate) fn submatrix(m: &CMatrix, rows: &[usize], cols: &[usize]) -> CMatrix {
    CMatrix::from_fn(rows.len(), cols.len(), |r, c| m[(rows[r], cols[c])])
}

/// A factor `F` with `m = F Fᴴ` for Hermitian PSD `m`. Uses Cholesky on the
/// rows with nonzero diagonal when possible and an eigendecomposition (with
/// negative eigenvalues clamped to zero) otherwise.
pub(crate) fn psd_factor(m: &CMatrix) -> CMatrix {
    let n = m.nrows();
    let live: Vec<usize> = (0..n).filter(|&i| m[(i, i)].re > 0.0).collect();
    if let Some(chol) = hermitize(&submatrix(m, &live, &live)).cholesky() {
        let l = chol.l();
        let mut f = CMatrix::zeros(n, n);
        for (r, &i) in live.iter().enumerate() {
            for (c, &j) in live.iter().enumerate() {
                f[(i, j)] = l[(r, c)];
            }
        }
        return f;
    }
    let eig = hermitize(m).symmetric_eigen();
    let mut f = eig.eigenvectors;
    for (c, &lambda) in eig.eigenvalues.iter().enumerate() {
        let s = lambda.max(0.0).sqrt();
        f.column_mut(c).scale_mut(s);
    }
    f
}
