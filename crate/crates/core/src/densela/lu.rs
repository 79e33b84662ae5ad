use std::f64::consts::PI;

use num_complex::Complex64;

use super::matrix::ComplexMatrix;
use crate::error::{Error, Result};

/// Pivots at or below this modulus are treated as exact zeros.
pub const PIVOT_FLOOR: f64 = 1e-300;

/// LU factorization with partial pivoting, `P A = L U`.
#[derive(Debug, Clone)]
pub struct Lu {
    n: usize,
    lu: Vec<Complex64>,
    /// Row swapped with row `k` at step `k`.
    swaps: Vec<usize>,
}

impl Lu {
    pub fn factor(m: &ComplexMatrix) -> Result<Self> {
        if !m.is_square() {
            return Err(Error::Dimension(format!("{}x{} matrix is not square", m.rows(), m.cols())));
        }
        let n = m.rows();
        let mut a = m.clone().into_vec();
        let mut swaps = Vec::with_capacity(n);
        for k in 0..n {
            let mut p = k;
            let mut best = a[k * n + k].norm();
            for i in k + 1..n {
                let v = a[i * n + k].norm();
                if v > best {
                    best = v;
                    p = i;
                }
            }
            if best <= PIVOT_FLOOR {
                return Err(Error::Singular { index: k });
            }
            if p != k {
                for j in 0..n {
                    a.swap(k * n + j, p * n + j);
                }
            }
            swaps.push(p);
            let inv = a[k * n + k].inv();
            let (top, bottom) = a.split_at_mut((k + 1) * n);
            let pivot_row = &top[k * n + k + 1..(k + 1) * n];
            for row in bottom.chunks_exact_mut(n) {
                let l = row[k] * inv;
                row[k] = l;
                if l == Complex64::new(0.0, 0.0) {
                    continue;
                }
                for (x, &u) in row[k + 1..].iter_mut().zip(pivot_row) {
                    *x -= l * u;
                }
            }
        }
        Ok(Self { n, lu: a, swaps })
    }

    /// `ln det`, imaginary part reduced to `(−π, π]`.
    pub fn logdet(&self) -> Complex64 {
        let n = self.n;
        let mut total = Complex64::new(0.0, 0.0);
        for k in 0..n {
            total += self.lu[k * n + k].ln();
        }
        let parity = self.swaps.iter().enumerate().filter(|(k, &p)| *k != p).count() % 2;
        if parity == 1 {
            total.im += PI;
        }
        total.im = wrap_phase(total.im);
        total
    }

    /// Solves `A X = B` for a matrix right-hand side.
    pub fn solve(&self, b: &ComplexMatrix) -> Result<ComplexMatrix> {
        let n = self.n;
        if b.rows() != n {
            return Err(Error::Dimension(format!("right-hand side has {} rows, expected {n}", b.rows())));
        }
        let w = b.cols();
        let mut x = b.clone();
        let data = x.as_mut_slice();
        for (k, &p) in self.swaps.iter().enumerate() {
            if p != k {
                for j in 0..w {
                    data.swap(k * w + j, p * w + j);
                }
            }
        }
        for i in 1..n {
            let (done, rest) = data.split_at_mut(i * w);
            let row = &mut rest[..w];
            for k in 0..i {
                let l = self.lu[i * n + k];
                if l == Complex64::new(0.0, 0.0) {
                    continue;
                }
                for (x, &y) in row.iter_mut().zip(&done[k * w..(k + 1) * w]) {
                    *x -= l * y;
                }
            }
        }
        for i in (0..n).rev() {
            let (head, tail) = data.split_at_mut((i + 1) * w);
            let row = &mut head[i * w..];
            for k in i + 1..n {
                let u = self.lu[i * n + k];
                if u == Complex64::new(0.0, 0.0) {
                    continue;
                }
                let other = &tail[(k - i - 1) * w..(k - i) * w];
                for (x, &y) in row.iter_mut().zip(other) {
                    *x -= u * y;
                }
            }
            let inv = self.lu[i * n + i].inv();
            for x in row.iter_mut() {
                *x *= inv;
            }
        }
        Ok(x)
    }
}

/// Reduces an angle to `(−π, π]`.
pub fn wrap_phase(theta: f64) -> f64 {
    let t = (theta + PI).rem_euclid(2.0 * PI) - PI;
    if t == -PI {
        PI
    } else {
        t
    }
}

/// `ln det m` via LU with partial pivoting. The real part is `ln|det m|`; the
/// imaginary part is the phase in `(−π, π]`.
pub fn lu_logdet(m: &ComplexMatrix) -> Result<Complex64> {
    Ok(Lu::factor(m)?.logdet())
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn cofactor_det(m: &[Vec<Complex64>]) -> Complex64 {
        let n = m.len();
        if n == 1 {
            return m[0][0];
        }
        let mut total = c(0.0, 0.0);
        for col in 0..n {
            let minor: Vec<Vec<Complex64>> = m[1..]
                .iter()
                .map(|row| row.iter().enumerate().filter(|(j, _)| *j != col).map(|(_, &z)| z).collect())
                .collect();
            let sign = if col % 2 == 0 { 1.0 } else { -1.0 };
            total += sign * m[0][col] * cofactor_det(&minor);
        }
        total
    }

    fn random_rows(n: usize, seed: u64) -> Vec<Vec<Complex64>> {
        let mut rng = rand::rngs::StdRng::seed_from_u64(seed);
        (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| {
                        let diag = if i == j { 2.0 } else { 0.0 };
                        c(rng.gen_range(-1.0..1.0) + diag, rng.gen_range(-1.0..1.0))
                    })
                    .collect()
            })
            .collect()
    }

    #[test]
    fn identity_and_diagonal() {
        assert_eq!(lu_logdet(&ComplexMatrix::identity(5)).unwrap(), c(0.0, 0.0));
        let d = ComplexMatrix::from_real_rows(&[&[2.0, 0.0], &[0.0, 3.0]]).unwrap();
        let ld = lu_logdet(&d).unwrap();
        assert!((ld.re - 6f64.ln()).abs() < 1e-15 && ld.im == 0.0);
    }

    #[test]
    fn permutation_sign() {
        let swap = ComplexMatrix::from_real_rows(&[&[0.0, 1.0], &[1.0, 0.0]]).unwrap();
        let ld = lu_logdet(&swap).unwrap();
        assert!(ld.re.abs() < 1e-15 && (ld.im - PI).abs() < 1e-15);
    }

    #[test]
    fn matches_cofactor_expansion() {
        for (n, seed) in [(3, 1), (7, 2), (10, 3)] {
            let rows = random_rows(n, seed);
            let m = ComplexMatrix::from_rows(&rows).unwrap();
            let det = lu_logdet(&m).unwrap().exp();
            let oracle = cofactor_det(&rows);
            assert!((det - oracle).norm() <= 1e-8 * oracle.norm(), "{det} vs {oracle}");
        }
    }

    #[test]
    fn singular_pivot_reported() {
        let m = ComplexMatrix::from_real_rows(&[&[1.0, 2.0], &[2.0, 4.0]]).unwrap();
        assert_eq!(lu_logdet(&m), Err(Error::Singular { index: 1 }));
    }

    #[test]
    fn product_rule_modulo_two_pi() {
        let a = ComplexMatrix::from_rows(&random_rows(12, 4)).unwrap();
        let b = ComplexMatrix::from_rows(&random_rows(12, 5)).unwrap();
        let ab = a.matmul(&b).unwrap();
        let lhs = lu_logdet(&ab).unwrap();
        let rhs = lu_logdet(&a).unwrap() + lu_logdet(&b).unwrap();
        assert!((lhs.re - rhs.re).abs() < 1e-10);
        assert!(wrap_phase(lhs.im - rhs.im).abs() < 1e-10);
    }

    #[test]
    fn solve_recovers_rhs() {
        let a = ComplexMatrix::from_rows(&random_rows(9, 6)).unwrap();
        let b = ComplexMatrix::from_rows(&random_rows(9, 7)).unwrap().submatrix(0..9, 0..4);
        let x = Lu::factor(&a).unwrap().solve(&b).unwrap();
        let back = a.matmul(&x).unwrap().sub(&b).unwrap();
        assert!(back.frobenius_norm() < 1e-12);
    }

    #[test]
    fn wrap_phase_range() {
        assert_eq!(wrap_phase(PI), PI);
        assert_eq!(wrap_phase(-PI), PI);
        assert!((wrap_phase(3.0 * PI + 0.1) - (-PI + 0.1)).abs() < 1e-12);
    }
}
