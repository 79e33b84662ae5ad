use num_complex::Complex64;

use super::householder::reflector;
use super::matrix::ComplexMatrix;
use crate::error::{Error, Result};

/// Allowed `‖m − m†‖_max` before a matrix is rejected as non-Hermitian.
pub const HERMITIAN_TOL: f64 = 1e-10;

/// All eigenvalues of a Hermitian matrix, ascending.
///
/// Householder reduction to a real symmetric tridiagonal matrix followed by
/// implicit QL with Wilkinson shifts. The input is checked, not symmetrized.
pub fn herm_eigvals(m: &ComplexMatrix) -> Result<Vec<f64>> {
    if !m.is_square() {
        return Err(Error::Dimension(format!("{}x{} matrix is not square", m.rows(), m.cols())));
    }
    let deviation = m.hermiticity_deviation();
    if deviation > HERMITIAN_TOL {
        return Err(Error::NotHermitian { deviation });
    }
    let (mut diag, mut offdiag) = tridiagonalize(m);
    tridiagonal_ql(&mut diag, &mut offdiag)?;
    diag.sort_by(f64::total_cmp);
    Ok(diag)
}

/// Returns the diagonal and subdiagonal of a real tridiagonal matrix unitarily
/// similar to `m`. Only the lower triangle of the working copy is updated.
fn tridiagonalize(m: &ComplexMatrix) -> (Vec<f64>, Vec<f64>) {
    let n = m.rows();
    let mut a = m.as_slice().to_vec();
    let mut diag = vec![0.0; n];
    let mut offdiag = vec![0.0; n];
    let zero = Complex64::new(0.0, 0.0);
    let mut v = vec![zero; n];
    let mut p = vec![zero; n];

    for k in 0..n.saturating_sub(1) {
        let len = n - k - 1;
        let v = &mut v[..len];
        for (i, vi) in v.iter_mut().enumerate() {
            *vi = a[(k + 1 + i) * n + k];
        }
        let (tau, beta) = reflector(v);
        diag[k] = a[k * n + k].re;
        offdiag[k] = beta;
        if tau == zero {
            continue;
        }

        // p = B v for the trailing block B, reading only its lower triangle.
        let p = &mut p[..len];
        p.fill(zero);
        for i in 0..len {
            let row = &a[(k + 1 + i) * n + k + 1..(k + 1 + i) * n + k + 1 + i + 1];
            let vi = v[i];
            let mut acc = zero;
            for j in 0..i {
                acc += row[j] * v[j];
                p[j] += row[j].conj() * vi;
            }
            p[i] += acc + Complex64::new(row[i].re, 0.0) * vi;
        }

        let alpha: Complex64 = v.iter().zip(p.iter()).map(|(vi, pi)| vi.conj() * pi).sum();
        let half = 0.5 * tau.norm_sqr() * alpha;
        for (pi, vi) in p.iter_mut().zip(v.iter()) {
            *pi = tau * *pi - half * vi;
        }
        let w = &*p;

        // B -= w v† + v w† on the lower triangle.
        for i in 0..len {
            let (wi, vi) = (w[i], v[i]);
            let row = &mut a[(k + 1 + i) * n + k + 1..(k + 1 + i) * n + k + 1 + i + 1];
            for j in 0..=i {
                row[j] -= wi * v[j].conj() + vi * w[j].conj();
            }
        }
    }
    diag[n - 1] = a[(n - 1) * n + n - 1].re;
    offdiag[n - 1] = 0.0;
    (diag, offdiag)
}

/// Implicit QL on a symmetric tridiagonal matrix; `offdiag[i]` couples `i` and
/// `i + 1`. Eigenvalues are left in `diag`, unsorted.
pub(super) fn tridiagonal_ql(diag: &mut [f64], offdiag: &mut [f64]) -> Result<()> {
    let n = diag.len();
    let max_iter = 30 * n.max(1);
    for l in 0..n {
        let mut iter = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = diag[m].abs() + diag[m + 1].abs();
                if offdiag[m].abs() <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            if iter > max_iter {
                return Err(Error::NoConvergence { index: l });
            }
            let mut g = (diag[l + 1] - diag[l]) / (2.0 * offdiag[l]);
            let mut r = g.hypot(1.0);
            g = diag[m] - diag[l] + offdiag[l] / (g + r.copysign(g));
            let (mut s, mut c, mut p) = (1.0, 1.0, 0.0);
            let mut underflow = false;
            let mut i = m;
            while i > l {
                i -= 1;
                let f = s * offdiag[i];
                let b = c * offdiag[i];
                r = f.hypot(g);
                offdiag[i + 1] = r;
                if r == 0.0 {
                    diag[i + 1] -= p;
                    offdiag[m] = 0.0;
                    underflow = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = diag[i + 1] - p;
                r = (diag[i] - g) * s + 2.0 * c * b;
                p = s * r;
                diag[i + 1] = g + p;
                g = c * r - b;
            }
            if underflow {
                continue;
            }
            diag[l] -= p;
            offdiag[l] = g;
            offdiag[m] = 0.0;
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::densela::lu::lu_logdet;
    use rand::{Rng, SeedableRng};

    fn random_hermitian(n: usize, seed: u64) -> ComplexMatrix {
        let mut rng = rand::rngs::StdRng::seed_from_u64(seed);
        let mut m = ComplexMatrix::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Complex64::new(rng.gen_range(-1.0..1.0), 0.0);
            for j in 0..i {
                let z = Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
                m[(i, j)] = z;
                m[(j, i)] = z.conj();
            }
        }
        m
    }

    #[test]
    fn one_by_one() {
        let m = ComplexMatrix::from_real_rows(&[&[0.5]]).unwrap();
        assert_eq!(herm_eigvals(&m).unwrap(), vec![0.5]);
    }

    #[test]
    fn pauli_x() {
        let m = ComplexMatrix::from_real_rows(&[&[0.0, 1.0], &[1.0, 0.0]]).unwrap();
        let ev = herm_eigvals(&m).unwrap();
        assert!((ev[0] + 1.0).abs() < 1e-15 && (ev[1] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn pauli_y_needs_complex_phase() {
        let i = Complex64::i();
        let m = ComplexMatrix::from_rows(&[vec![Complex64::new(0.0, 0.0), -i], vec![i, Complex64::new(0.0, 0.0)]])
            .unwrap();
        let ev = herm_eigvals(&m).unwrap();
        assert!((ev[0] + 1.0).abs() < 1e-15 && (ev[1] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn rejects_non_square_and_non_hermitian() {
        assert!(matches!(herm_eigvals(&ComplexMatrix::zeros(2, 3)), Err(Error::Dimension(_))));
        let m = ComplexMatrix::from_real_rows(&[&[0.0, 1.0], &[0.9, 0.0]]).unwrap();
        match herm_eigvals(&m) {
            Err(Error::NotHermitian { deviation }) => assert!((deviation - 0.1).abs() < 1e-12),
            other => panic!("unexpected {other:?}"),
        }
    }

    /// Each eigenvalue is bracketed by a sign change of Re det(λI − H) on a
    /// fine λ-grid, with the determinant evaluated through LU.
    #[test]
    fn matches_characteristic_polynomial_roots() {
        let h = random_hermitian(8, 7);
        let ev = herm_eigvals(&h).unwrap();
        let char_sign = |lambda: f64| {
            let shifted = ComplexMatrix::identity(8).scaled(Complex64::new(lambda, 0.0)).sub(&h).unwrap();
            match lu_logdet(&shifted) {
                Ok(ld) => (ld.im.cos()).signum(),
                Err(_) => 0.0,
            }
        };
        for &lam in &ev {
            let (mut lo, mut hi) = (lam - 1e-3, lam + 1e-3);
            assert_ne!(char_sign(lo), char_sign(hi), "no sign change around {lam}");
            for _ in 0..60 {
                let mid = 0.5 * (lo + hi);
                if char_sign(mid) == char_sign(lo) {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            assert!((0.5 * (lo + hi) - lam).abs() < 1e-10);
        }
    }

    #[test]
    fn trace_and_frobenius_sums() {
        for (n, seed) in [(5, 1), (33, 2), (120, 3)] {
            let h = random_hermitian(n, seed);
            let ev = herm_eigvals(&h).unwrap();
            let tr = h.trace().re;
            let sum: f64 = ev.iter().sum();
            assert!((sum - tr).abs() <= 1e-9 * tr.abs().max(1.0));
            let fro = h.frobenius_norm().powi(2);
            let sq: f64 = ev.iter().map(|x| x * x).sum();
            assert!((sq - fro).abs() <= 1e-9 * fro);
            assert!(ev.windows(2).all(|w| w[0] <= w[1]));
        }
    }

    #[test]
    fn degenerate_spectrum() {
        let mut m = ComplexMatrix::identity(6).scaled(Complex64::new(2.0, 0.0));
        m[(0, 0)] = Complex64::new(-1.0, 0.0);
        let ev = herm_eigvals(&m).unwrap();
        assert!((ev[0] + 1.0).abs() < 1e-14);
        assert!(ev[1..].iter().all(|x| (x - 2.0).abs() < 1e-14));
    }
}
