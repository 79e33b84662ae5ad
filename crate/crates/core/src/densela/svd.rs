use num_complex::Complex64;

use super::hermitian::tridiagonal_ql;
use super::householder::reflector;
use super::matrix::ComplexMatrix;
use crate::error::{Error, Result};

/// Singular values of a square matrix, ascending.
///
/// Golub–Kahan bidiagonalization, then the eigenvalues of the zero-diagonal
/// tridiagonal (Jordan–Wielandt) form of the bidiagonal. Small singular
/// values come out with absolute accuracy of order `ε‖m‖`, which is what
/// forming `m†m` would lose.
pub fn singular_values(m: &ComplexMatrix) -> Result<Vec<f64>> {
    if !m.is_square() {
        return Err(Error::Dimension(format!("{}x{} matrix is not square", m.rows(), m.cols())));
    }
    let n = m.rows();
    if n == 0 {
        return Ok(Vec::new());
    }
    let (d, e) = bidiagonalize(m);
    let mut diag = vec![0.0; 2 * n];
    let mut offdiag = vec![0.0; 2 * n];
    for k in 0..n {
        offdiag[2 * k] = d[k];
        if k + 1 < n {
            offdiag[2 * k + 1] = e[k];
        }
    }
    tridiagonal_ql(&mut diag, &mut offdiag)?;
    diag.sort_by(f64::total_cmp);
    let mut sv: Vec<f64> = diag[n..].iter().map(|x| x.abs()).collect();
    sv.sort_by(f64::total_cmp);
    Ok(sv)
}

/// Upper bidiagonal form: returns the real diagonal and superdiagonal.
fn bidiagonalize(m: &ComplexMatrix) -> (Vec<f64>, Vec<f64>) {
    let n = m.rows();
    let zero = Complex64::new(0.0, 0.0);
    let mut a = m.as_slice().to_vec();
    let mut d = vec![0.0; n];
    let mut e = vec![0.0; n.saturating_sub(1)];
    let mut v = vec![zero; n];
    let mut w = vec![zero; n];

    for k in 0..n {
        // Left reflector on column k.
        let len = n - k;
        let col = &mut v[..len];
        for (i, vi) in col.iter_mut().enumerate() {
            *vi = a[(k + i) * n + k];
        }
        let (tau, beta) = reflector(col);
        d[k] = beta;
        if tau != zero {
            // A ← A − τ̄ v (v† A) on columns k+1..
            let wv = &mut w[..n - k - 1];
            wv.fill(zero);
            for (i, vi) in col.iter().enumerate() {
                let row = &a[(k + i) * n + k + 1..(k + i + 1) * n];
                let c = vi.conj();
                for (wj, &aij) in wv.iter_mut().zip(row) {
                    *wj += c * aij;
                }
            }
            let tc = tau.conj();
            for (i, &vi) in col.iter().enumerate() {
                let s = tc * vi;
                let row = &mut a[(k + i) * n + k + 1..(k + i + 1) * n];
                for (aij, &wj) in row.iter_mut().zip(wv.iter()) {
                    *aij -= s * wj;
                }
            }
        }
        if k + 1 >= n {
            break;
        }

        // Right reflector on row k: with x = conj(row), A·H has row βe₁ᵀ.
        let len = n - k - 1;
        let row = &mut v[..len];
        for (j, vj) in row.iter_mut().enumerate() {
            *vj = a[k * n + k + 1 + j].conj();
        }
        let (tau, beta) = reflector(row);
        e[k] = beta;
        if tau != zero {
            // A ← A − τ (A v) v† on rows k+1.., columns k+1..
            for i in k + 1..n {
                let r = &mut a[i * n + k + 1..(i + 1) * n];
                let av: Complex64 = r.iter().zip(row.iter()).map(|(x, y)| x * y).sum();
                let s = tau * av;
                for (x, y) in r.iter_mut().zip(row.iter()) {
                    *x -= s * y.conj();
                }
            }
        }
    }
    (d, e)
}
