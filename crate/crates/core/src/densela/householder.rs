use num_complex::Complex64;

/// Elementary reflector `H = I − τ v v†` with `H† x = β e₁`, `β` real.
///
/// On return `x` holds `v` (with `v[0] = 1`). When `x` is already a real
/// multiple of `e₁`, `τ = 0`.
pub(crate) fn reflector(x: &mut [Complex64]) -> (Complex64, f64) {
    let zero = Complex64::new(0.0, 0.0);
    let alpha = x[0];
    let tail_norm = x[1..].iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    if tail_norm == 0.0 && alpha.im == 0.0 {
        x[0] = Complex64::new(1.0, 0.0);
        return (zero, alpha.re);
    }
    let beta = -alpha.norm().hypot(tail_norm).copysign(alpha.re);
    let tau = Complex64::new((beta - alpha.re) / beta, -alpha.im / beta);
    let scale = (alpha - beta).inv();
    for z in &mut x[1..] {
        *z *= scale;
    }
    x[0] = Complex64::new(1.0, 0.0);
    (tau, beta)
}
