//! Entropies, mutual information and negativities from correlation matrices.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::correlation::CorrelationMatrix;
use crate::densela::{gen_eigvals, herm_eigvals, singular_values, wrap_phase, ComplexMatrix, Lu};
use crate::error::{Error, Result};

/// Eigenvalues this far outside `[0, 1]` are rejected rather than clamped.
pub const SPECTRUM_TOL: f64 = 1e-6;
/// Eigenvalues within this distance of 0 or 1 count as pure in the von
/// Neumann entropy.
pub const VN_CLAMP: f64 = 1e-12;
/// Largest discarded imaginary part accepted for a real measure.
pub const IMAG_TOL: f64 = 1e-6;

/// A real measure plus numerical diagnostics.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeasureResult {
    pub value: f64,
    /// Magnitude of the imaginary part dropped from a nominally real result.
    pub imag_residual: f64,
    /// Eigenvalues nudged back into `[0, 1]`.
    pub clamped_count: usize,
}

impl MeasureResult {
    fn real(value: f64, clamped_count: usize) -> Self {
        Self { value, imag_residual: 0.0, clamped_count }
    }
}

/// Rényi index or the von Neumann limit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EntropyOrder {
    VonNeumann,
    Renyi(f64),
}

/// Eigenvalues of `c`, clamped into `[0, 1]`.
pub fn occupation_spectrum(c: &ComplexMatrix) -> Result<(Vec<f64>, usize)> {
    let mut ev = herm_eigvals(c)?;
    let mut clamped = 0;
    for x in &mut ev {
        if *x < -SPECTRUM_TOL || *x > 1.0 + SPECTRUM_TOL {
            return Err(Error::Spectrum { value: *x });
        }
        if *x < 0.0 || *x > 1.0 {
            clamped += 1;
            *x = x.clamp(0.0, 1.0);
        }
    }
    Ok((ev, clamped))
}

/// `ln(λⁿ + (1−λ)ⁿ)` without cancellation near `λ ∈ {0, 1}`.
pub fn renyi_log_term(lambda: f64, n: f64) -> f64 {
    let small = lambda.min(1.0 - lambda);
    if small <= 0.0 {
        return 0.0;
    }
    // ln((1−s)ⁿ (1 + (s/(1−s))ⁿ))
    n * (-small).ln_1p() + (small / (1.0 - small)).powf(n).ln_1p()
}

/// Binary entropy `−λ ln λ − (1−λ) ln(1−λ)`.
pub fn binary_entropy(lambda: f64) -> f64 {
    let small = lambda.min(1.0 - lambda);
    if small <= VN_CLAMP {
        return 0.0;
    }
    -small * small.ln() + (1.0 - small) * -(-small).ln_1p()
}

fn check_order(n: f64) -> Result<()> {
    if !(n > 0.0) || n == 1.0 || !n.is_finite() {
        return Err(Error::Domain(format!("Rényi index {n} must be positive and different from 1")));
    }
    Ok(())
}

/// `S⁽ⁿ⁾ = (1/(1−n)) Σ ln(λⁿ + (1−λ)ⁿ)`.
pub fn renyi_entropy(c: &CorrelationMatrix, n: f64) -> Result<MeasureResult> {
    check_order(n)?;
    let (ev, clamped) = occupation_spectrum(&c.matrix)?;
    let sum: f64 = ev.iter().map(|&l| renyi_log_term(l, n)).sum();
    Ok(MeasureResult::real(sum / (1.0 - n), clamped))
}

/// Von Neumann entropy `Σ [−λ ln λ − (1−λ) ln(1−λ)]`.
pub fn vn_entropy(c: &CorrelationMatrix) -> Result<MeasureResult> {
    let (ev, clamped) = occupation_spectrum(&c.matrix)?;
    Ok(MeasureResult::real(ev.iter().map(|&l| binary_entropy(l)).sum(), clamped))
}

pub fn entropy(c: &CorrelationMatrix, order: EntropyOrder) -> Result<MeasureResult> {
    match order {
        EntropyOrder::VonNeumann => vn_entropy(c),
        EntropyOrder::Renyi(n) => renyi_entropy(c, n),
    }
}

/// `S_L + S_R − S_A`.
pub fn mutual_information(
    left: &CorrelationMatrix,
    right: &CorrelationMatrix,
    both: &CorrelationMatrix,
    order: EntropyOrder,
) -> Result<MeasureResult> {
    if both.dim() != left.dim() + right.dim() {
        return Err(Error::Dimension(format!(
            "joint matrix has dimension {}, expected {} + {}",
            both.dim(),
            left.dim(),
            right.dim()
        )));
    }
    let (l, r, a) = (entropy(left, order)?, entropy(right, order)?, entropy(both, order)?);
    Ok(MeasureResult::real(l.value + r.value - a.value, l.clamped_count + r.clamped_count + a.clamped_count))
}

/// Convenience: MI from the joint matrix and its two diagonal blocks.
pub fn mutual_information_joint(both: &CorrelationMatrix, order: EntropyOrder) -> Result<MeasureResult> {
    use crate::model::Subsystem;
    mutual_information(&both.restrict(Subsystem::Left), &both.restrict(Subsystem::Right), both, order)
}

fn check_split(c: &ComplexMatrix, size_left: usize) -> Result<()> {
    if !c.is_square() {
        return Err(Error::Dimension("correlation matrix is not square".into()));
    }
    if size_left > c.rows() {
        return Err(Error::Dimension(format!("left block size {size_left} exceeds dimension {}", c.rows())));
    }
    Ok(())
}

/// Transformed correlation matrix `C_Ξ = ½[I − (I + Γ₊Γ₋)⁻¹(Γ₊ + Γ₋)]` with
/// `Γ± = D±(I − 2C)D±` and `D± = diag(±i·I_left, I_right)`.
pub fn build_c_xi(c: &ComplexMatrix, size_left: usize) -> Result<ComplexMatrix> {
    check_split(c, size_left)?;
    let n = c.rows();
    let g = ComplexMatrix::identity(n).sub(&c.scaled(Complex64::new(2.0, 0.0)))?;
    let phase_plus: Vec<Complex64> =
        (0..n).map(|i| if i < size_left { Complex64::i() } else { Complex64::new(1.0, 0.0) }).collect();
    // D₊D₋ = I, hence Γ₊Γ₋ = D₊ G² D₋.
    let g2 = g.matmul(&g)?;
    let denom = ComplexMatrix::from_fn(n, n, |i, j| {
        let delta = if i == j { 1.0 } else { 0.0 };
        Complex64::new(delta, 0.0) + phase_plus[i] * g2[(i, j)] * phase_plus[j].conj()
    });
    // Γ₊ + Γ₋ is 2G on the right block, −2G on the left block, zero across.
    let sum = ComplexMatrix::from_fn(n, n, |i, j| match (i < size_left, j < size_left) {
        (true, true) => -2.0 * g[(i, j)],
        (false, false) => 2.0 * g[(i, j)],
        _ => Complex64::new(0.0, 0.0),
    });
    let solved = Lu::factor(&denom)?.solve(&sum)?;
    Ok(ComplexMatrix::identity(n).sub(&solved)?.scaled(Complex64::new(0.5, 0.0)))
}

fn accept(total: Complex64, clamped: usize) -> Result<MeasureResult> {
    let residual = total.im.abs();
    if residual > IMAG_TOL {
        return Err(Error::Branch(format!("imaginary residual {residual:.3e} exceeds {IMAG_TOL:.0e}")));
    }
    Ok(MeasureResult { value: total.re, imag_residual: residual, clamped_count: clamped })
}

/// `Σ_ξ ln(ξ^p + (1−ξ)^p) + p Σ_λ ln(λ² + (1−λ)²)` over the eigenvalues ξ of
/// `C_Ξ` on principal branches.
pub fn negativity_spectral(c: &CorrelationMatrix, half_n: f64) -> Result<MeasureResult> {
    check_split(&c.matrix, c.size_left)?;
    let (ev, clamped) = occupation_spectrum(&c.matrix)?;
    let xi = gen_eigvals(&build_c_xi(&c.matrix, c.size_left)?)?;
    let one = Complex64::new(1.0, 0.0);
    let integer = half_n.fract() == 0.0;
    let mut total = Complex64::new(0.0, 0.0);
    for z in xi {
        let term = if integer {
            z.powi(half_n as i32) + (one - z).powi(half_n as i32)
        } else {
            z.powf(half_n) + (one - z).powf(half_n)
        };
        total += term.ln();
    }
    let pure: f64 = ev.iter().map(|&l| renyi_log_term(l, 2.0)).sum();
    total += half_n * pure;
    accept(total, clamped)
}

/// Fermionic (logarithmic) negativity between the first `size_left` sites and
/// the rest.
///
/// The eigenvalues ξ of `C_Ξ` are real, and `ln(√ξ + √(1−ξ)) = ½ ln(1 + σ)`
/// with `σ = 2√(ξ(1−ξ))` the singular values of `(I−Γ₊)†(I+Γ₊Γ₊†)⁻¹(I+Γ₊)`.
/// Taking σ from an SVD avoids the square root of a rounded ξ, which costs
/// about 1e-8 per nearly pure mode.
pub fn fermionic_negativity(c: &CorrelationMatrix) -> Result<MeasureResult> {
    check_split(&c.matrix, c.size_left)?;
    let (ev, clamped) = occupation_spectrum(&c.matrix)?;
    let sigma = singular_values(&negativity_kernel(&c.matrix, c.size_left)?)?;
    let xi_part: f64 = sigma.iter().map(|s| 0.5 * s.ln_1p()).sum();
    let pure: f64 = ev.iter().map(|&l| renyi_log_term(l, 2.0)).sum();
    Ok(MeasureResult::real(xi_part + 0.5 * pure, clamped))
}

/// `(I−Γ₊)†(I+Γ₊Γ₊†)⁻¹(I+Γ₊)`, using `Γ₋ = Γ₊†`.
fn negativity_kernel(c: &ComplexMatrix, size_left: usize) -> Result<ComplexMatrix> {
    let n = c.rows();
    let gamma = ComplexMatrix::from_fn(n, n, |i, j| {
        let delta = if i == j { 1.0 } else { 0.0 };
        let g = Complex64::new(delta, 0.0) - 2.0 * c[(i, j)];
        match (i < size_left, j < size_left) {
            (true, true) => -g,
            (false, false) => g,
            _ => Complex64::i() * g,
        }
    });
    let id = ComplexMatrix::identity(n);
    let denom = id.add(&gamma.matmul(&gamma.adjoint())?)?;
    let right = Lu::factor(&denom)?.solve(&id.add(&gamma)?)?;
    id.sub(&gamma)?.adjoint().matmul(&right)
}

fn check_even(n: u32) -> Result<()> {
    if n < 2 || n % 2 != 0 {
        return Err(Error::Domain(format!("Rényi negativity index {n} must be an even integer >= 2")));
    }
    Ok(())
}

/// Rényi negativity `ℰ_n` from the spectrum of `C_Ξ`.
pub fn renyi_negativity_eig(c: &CorrelationMatrix, n: u32) -> Result<MeasureResult> {
    check_even(n)?;
    negativity_spectral(c, n as f64 / 2.0)
}

/// Replica values `γ = −(n−1)/2, …, (n−1)/2`.
pub fn gamma_values(n: u32) -> Vec<f64> {
    (0..n).map(|j| j as f64 - (n as f64 - 1.0) / 2.0).collect()
}

/// Rényi negativity `ℰ_n = Σ_γ ln det(I − C_γ)` with
/// `C_γ = diag((1 − e^{2πiγ/n}) I_L, (1 + e^{−2πiγ/n}) I_R) C`.
pub fn renyi_negativity_det(c: &CorrelationMatrix, n: u32) -> Result<MeasureResult> {
    check_even(n)?;
    check_split(&c.matrix, c.size_left)?;
    let dim = c.dim();
    let mut total = Complex64::new(0.0, 0.0);
    for gamma in gamma_values(n) {
        let phase = Complex64::from_polar(1.0, 2.0 * PI * gamma / n as f64);
        let left = Complex64::new(1.0, 0.0) - phase;
        let right = Complex64::new(1.0, 0.0) + phase.conj();
        let factor = ComplexMatrix::from_fn(dim, dim, |i, j| {
            let scale = if i < c.size_left { left } else { right };
            let delta = if i == j { 1.0 } else { 0.0 };
            Complex64::new(delta, 0.0) - scale * c.matrix[(i, j)]
        });
        let lu = Lu::factor(&factor).map_err(|e| match e {
            Error::Singular { .. } => Error::SingularFactor { gamma },
            other => other,
        })?;
        total += lu.logdet();
    }
    total.im = wrap_phase(total.im);
    accept(total, 0)
}
