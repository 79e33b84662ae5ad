use num_complex::Complex64;

use super::householder::reflector;
use super::matrix::ComplexMatrix;
use crate::error::{Error, Result};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// QR sweeps allowed per unit of dimension before giving up.
pub const QR_SWEEPS_PER_DIM: usize = 30;

/// All eigenvalues of a general complex matrix, with multiplicity, in no
/// particular order.
pub fn gen_eigvals(m: &ComplexMatrix) -> Result<Vec<Complex64>> {
    if !m.is_square() {
        return Err(Error::Dimension(format!("{}x{} matrix is not square", m.rows(), m.cols())));
    }
    let n = m.rows();
    let mut h = m.as_slice().to_vec();
    reduce_to_hessenberg(&mut h, n);
    hessenberg_eigvals(&mut h, n, QR_SWEEPS_PER_DIM * n.max(10))
}

fn cabs1(z: Complex64) -> f64 {
    z.re.abs() + z.im.abs()
}

/// In-place unitary similarity to upper Hessenberg form. Entries below the
/// subdiagonal are zeroed; no transformation is accumulated.
fn reduce_to_hessenberg(a: &mut [Complex64], n: usize) {
    let mut v = vec![ZERO; n];
    let mut work = vec![ZERO; n];
    for k in 0..n.saturating_sub(2) {
        let len = n - k - 1;
        let v = &mut v[..len];
        for (i, vi) in v.iter_mut().enumerate() {
            *vi = a[(k + 1 + i) * n + k];
        }
        let (tau, beta) = reflector(v);
        a[(k + 1) * n + k] = Complex64::new(beta, 0.0);
        for i in k + 2..n {
            a[i * n + k] = ZERO;
        }
        if tau == ZERO {
            continue;
        }
        let c0 = k + 1;

        // Left: rows c0.., A := (I − τ̄ v v†) A on columns c0..
        let y = &mut work[..n - c0];
        y.fill(ZERO);
        for (i, &vi) in v.iter().enumerate() {
            let vc = vi.conj();
            let row = &a[(c0 + i) * n + c0..(c0 + i + 1) * n];
            for (yj, &aij) in y.iter_mut().zip(row) {
                *yj += vc * aij;
            }
        }
        let tc = tau.conj();
        for (i, &vi) in v.iter().enumerate() {
            let f = tc * vi;
            let row = &mut a[(c0 + i) * n + c0..(c0 + i + 1) * n];
            for (aij, &yj) in row.iter_mut().zip(y.iter()) {
                *aij -= f * yj;
            }
        }

        // Right: all rows, A := A (I − τ v v†) on columns c0..
        for r in 0..n {
            let row = &mut a[r * n + c0..(r + 1) * n];
            let z: Complex64 = row.iter().zip(v.iter()).map(|(&x, &vj)| x * vj).sum();
            let f = tau * z;
            for (x, &vj) in row.iter_mut().zip(v.iter()) {
                *x -= f * vj.conj();
            }
        }
    }
}

/// Rotation `[[c, s], [−s̄, c]]` mapping `(x, y)` to `(r, 0)`.
fn givens(x: Complex64, y: Complex64) -> (f64, Complex64, Complex64) {
    if y == ZERO {
        return (1.0, ZERO, x);
    }
    let ax = x.norm();
    let norm = ax.hypot(y.norm());
    if ax == 0.0 {
        let s = y.conj() / norm;
        return (0.0, s, Complex64::new(norm, 0.0));
    }
    let phase = x / ax;
    let c = ax / norm;
    let s = phase * y.conj() / norm;
    (c, s, phase * norm)
}

/// Eigenvalue of the 2x2 block `[[a, b], [c, d]]` nearest `d`, and the other one.
fn two_by_two(a: Complex64, b: Complex64, c: Complex64, d: Complex64) -> (Complex64, Complex64) {
    let s = 0.5 * (a - d);
    let bc = b * c;
    let mut disc = (s * s + bc).sqrt();
    if (s + disc).norm() < (s - disc).norm() {
        disc = -disc;
    }
    let denom = s + disc;
    let near = if denom == ZERO { d } else { d - bc / denom };
    (near, a + d - near)
}

/// Single-shift implicit QR on an upper Hessenberg matrix, eigenvalues only.
fn hessenberg_eigvals(h: &mut [Complex64], n: usize, max_sweeps: usize) -> Result<Vec<Complex64>> {
    let mut eig = vec![ZERO; n];
    let at = |i: usize, j: usize| i * n + j;
    let small = f64::MIN_POSITIVE * (n as f64) / f64::EPSILON;
    let mut sweeps = 0;
    let mut since_deflation = 0;
    let mut remaining = n;

    while remaining > 0 {
        let hi = remaining - 1;
        let mut l = hi;
        while l > 0 {
            let sub = cabs1(h[at(l, l - 1)]);
            let scale = cabs1(h[at(l - 1, l - 1)]) + cabs1(h[at(l, l)]);
            if sub <= small || sub <= f64::EPSILON * scale {
                h[at(l, l - 1)] = ZERO;
                break;
            }
            l -= 1;
        }
        if l == hi {
            eig[hi] = h[at(hi, hi)];
            remaining -= 1;
            since_deflation = 0;
            continue;
        }
        if l + 1 == hi {
            let (near, far) = two_by_two(h[at(l, l)], h[at(l, hi)], h[at(hi, l)], h[at(hi, hi)]);
            eig[hi] = near;
            eig[l] = far;
            remaining -= 2;
            since_deflation = 0;
            continue;
        }

        sweeps += 1;
        since_deflation += 1;
        if sweeps > max_sweeps {
            return Err(Error::NoConvergence { index: hi });
        }
        let shift = if since_deflation % 10 == 0 {
            h[at(hi, hi)] + 0.75 * cabs1(h[at(hi, hi - 1)])
        } else {
            two_by_two(h[at(hi - 1, hi - 1)], h[at(hi - 1, hi)], h[at(hi, hi - 1)], h[at(hi, hi)]).0
        };

        for k in l..hi {
            let (x, y) = if k == l {
                (h[at(l, l)] - shift, h[at(l + 1, l)])
            } else {
                (h[at(k, k - 1)], h[at(k + 1, k - 1)])
            };
            let (c, s, r) = givens(x, y);
            if k > l {
                h[at(k, k - 1)] = r;
                h[at(k + 1, k - 1)] = ZERO;
            }
            let sc = s.conj();
            let (top, bottom) = h.split_at_mut(at(k + 1, 0));
            let row_k = &mut top[at(k, k)..at(k, hi + 1)];
            let row_k1 = &mut bottom[k..=hi];
            for (p, q) in row_k.iter_mut().zip(row_k1.iter_mut()) {
                let (a, b) = (*p, *q);
                *p = c * a + s * b;
                *q = c * b - sc * a;
            }
            for i in l..=(k + 2).min(hi) {
                let (a, b) = (h[at(i, k)], h[at(i, k + 1)]);
                h[at(i, k)] = c * a + sc * b;
                h[at(i, k + 1)] = c * b - s * a;
            }
        }
    }
    Ok(eig)
}
