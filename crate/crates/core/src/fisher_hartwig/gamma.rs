use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::symbol::{mi_symbol, JumpWindows, WindowCase};
use crate::asymptotics::{q_n, q_tilde_n};
use crate::error::{Error, Result};
use crate::measures::gamma_values;
use crate::model::Subsystem;

/// Replica indices `γ = −(n−1)/2, …, (n−1)/2` and the roots of
/// `p_n(z) = zⁿ + (1−z)ⁿ` and, for even `n`, of `z^{n/2} + (1−z)^{n/2}`.
#[derive(Debug, Clone, PartialEq)]
pub struct GammaSet {
    n: u32,
    gammas: Vec<f64>,
}

impl GammaSet {
    pub fn new(n: u32) -> Result<Self> {
        if n < 2 {
            return Err(Error::Domain(format!("replica index {n} must be at least 2")));
        }
        Ok(Self { n, gammas: gamma_values(n) })
    }

    pub fn order(&self) -> u32 {
        self.n
    }

    pub fn gammas(&self) -> &[f64] {
        &self.gammas
    }

    /// `e^{2πiγ/n}`.
    pub fn phase(&self, gamma: f64) -> Complex64 {
        Complex64::from_polar(1.0, 2.0 * PI * gamma / self.n as f64)
    }

    /// `1/z_γ = 1 − e^{2πiγ/n}` for every γ; zero for the missing root at γ = 0.
    pub fn inverse_roots(&self) -> Vec<Complex64> {
        self.gammas.iter().map(|&g| 1.0 - self.phase(g)).collect()
    }

    /// The finite roots `z_γ`.
    pub fn roots(&self) -> Vec<Complex64> {
        self.inverse_roots().into_iter().filter(|w| w.norm() > 1e-12).map(|w| w.inv()).collect()
    }

    fn require_even(&self) -> Result<()> {
        if self.n % 2 == 0 {
            Ok(())
        } else {
            Err(Error::Domain(format!("replica index {} must be even", self.n)))
        }
    }

    /// `1/z̃_γ = (e^{2πiγ/n} + e^{−2πiγ/n})/e^{2πiγ/n}` for `γ = ½, …, (n−1)/2`.
    pub fn tilde_inverse_roots(&self) -> Result<Vec<Complex64>> {
        self.require_even()?;
        Ok(self
            .gammas
            .iter()
            .filter(|&&g| g > 0.0)
            .map(|&g| {
                let e = self.phase(g);
                (e + e.conj()) / e
            })
            .collect())
    }

    pub fn tilde_roots(&self) -> Result<Vec<Complex64>> {
        Ok(self.tilde_inverse_roots()?.into_iter().filter(|w| w.norm() > 1e-12).map(|w| w.inv()).collect())
    }

    /// `p_n(z) = zⁿ + (1−z)ⁿ`.
    pub fn polynomial(&self, z: Complex64) -> Complex64 {
        z.powu(self.n) + (1.0 - z).powu(self.n)
    }

    /// `Π_γ (1 − z/z_γ)`.
    pub fn product_form(&self, z: Complex64) -> Complex64 {
        self.inverse_roots().iter().map(|w| 1.0 - z * w).product()
    }

    /// `z^{n/2} + (1−z)^{n/2}`.
    pub fn tilde_polynomial(&self, z: Complex64) -> Result<Complex64> {
        self.require_even()?;
        Ok(z.powu(self.n / 2) + (1.0 - z).powu(self.n / 2))
    }

    pub fn tilde_product_form(&self, z: Complex64) -> Result<Complex64> {
        Ok(self.tilde_inverse_roots()?.iter().map(|w| 1.0 - z * w).product())
    }

    /// `Σ_γ γ²`, computed by summation.
    pub fn square_sum(&self) -> f64 {
        self.gammas.iter().map(|g| g * g).sum()
    }
}

/// `(n³ − n)/12`.
pub fn square_sum_closed(n: u32) -> f64 {
    let n = n as f64;
    (n * n * n - n) / 12.0
}

/// Residuals `|direct γ-sum − closed form|` of the replica-sum identities.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IdentityResiduals {
    pub transmission: f64,
    pub n: u32,
    /// `Σ ln²(𝒯e^{2πiγ/n}+ℛ)/4π² = Q_n(ℛ)`.
    pub square_log: f64,
    /// `Σ (iγ/πn) ln(𝒯e^{2πiγ/n}+ℛ) = (1/n−n)/12 + Q_n(ℛ) − Q_n(𝒯)`.
    pub weighted_log: f64,
    /// `Σ ln(𝒯e^{2πiγ/n}+ℛ) ln(𝒯+ℛe^{2πiγ/n})/2π² = Q̃_n(𝒯)`.
    pub cross_log: f64,
    /// Even `n` only: `Σ ln²(ℛe^{2πiγ/n} − e^{−2πiγ/n}𝒯)/2π² = 2Q_{n/2}(𝒯) + 2Q_{n/2}(ℛ) − 1/(6n) − n/12`.
    pub transposed_log: Option<f64>,
}

impl IdentityResiduals {
    pub fn max(&self) -> f64 {
        [self.square_log, self.weighted_log, self.cross_log, self.transposed_log.unwrap_or(0.0)]
            .into_iter()
            .fold(0.0, f64::max)
    }
}

pub fn gamma_identities(transmission: f64, n: u32) -> Result<IdentityResiduals> {
    let set = GammaSet::new(n)?;
    let (t, r) = (transmission, 1.0 - transmission);
    let nf = n as f64;
    let pi2 = PI * PI;
    let sum = |f: &dyn Fn(f64, Complex64) -> Complex64| -> Complex64 { set.gammas().iter().map(|&g| f(g, set.phase(g))).sum() };

    let square = sum(&|_, e| (e * t + r).ln().powu(2)) / (4.0 * pi2);
    let square_log = (square - q_n(r, nf)?).norm();

    let weighted = sum(&|g, e| Complex64::new(0.0, g / (PI * nf)) * (e * t + r).ln());
    let weighted_log = (weighted - ((1.0 / nf - nf) / 12.0 + q_n(r, nf)? - q_n(t, nf)?)).norm();

    let cross = sum(&|_, e| (e * t + r).ln() * (e * r + t).ln()) / (2.0 * pi2);
    let cross_log = (cross - q_tilde_n(t, nf)?).norm();

    let transposed_log = if n % 2 == 0 {
        let s = sum(&|_, e| (e * r - e.conj() * t).ln().powu(2)) / (2.0 * pi2);
        let half = 0.5 * nf;
        let closed = 2.0 * q_n(t, half)? + 2.0 * q_n(r, half)? - 1.0 / (6.0 * nf) - nf / 12.0;
        Some((s - closed).norm())
    } else {
        None
    };
    Ok(IdentityResiduals { transmission, n, square_log, weighted_log, cross_log, transposed_log })
}

/// The overlap kernel combination `Q_n(𝒯) + Q_n(ℛ) − (1/n − n)/12`.
fn overlap_kernel(t: f64, n: f64) -> Result<f64> {
    Ok(q_n(t, n)? + q_n(1.0 - t, n)? - (1.0 / n - n) / 12.0)
}

fn abs_log_ratio(num: &[f64], den: &[f64]) -> f64 {
    let prod = |xs: &[f64]| xs.iter().filter(|x| **x != 0.0).map(|x| x.abs()).product::<f64>();
    (prod(num) / prod(den)).ln()
}

/// Points closer than this fraction of the largest angle are treated as one
/// degenerate point.
const DEGENERATE_REL: f64 = 1e-9;

/// `Σ_γ 𝒢_γ^{(log)}` by direct summation over γ of the pairwise jump
/// interactions among `θ_{L,±}, θ_{R,±}` in the `A_L + A_R − A` combination.
///
/// Coincident points are split by a tiny offset and their mutual
/// (divergent) interaction is dropped.
pub fn gamma_log_sum_mi(transmission: f64, n: u32, case: WindowCase, windows: &JumpWindows) -> Result<f64> {
    windows.validate()?;
    if windows.case() != case {
        return Err(Error::Config(format!("windows are in the {:?} case, not {case:?}", windows.case())));
    }
    let set = GammaSet::new(n)?;
    let scale = windows.points().into_iter().fold(0.0, f64::max);
    let delta = DEGENERATE_REL * scale;
    let split = split_coincident(windows, delta);
    let mut total = Complex64::new(0.0, 0.0);
    for &gamma in set.gammas() {
        for (sub, sign) in [(Subsystem::Left, 1.0), (Subsystem::Right, 1.0), (Subsystem::Both, -1.0)] {
            let symbol = mi_symbol(sub, gamma, n, &split, transmission)?;
            let jumps = symbol.jumps();
            let vals = symbol.values();
            let k = jumps.len();
            let logs: Vec<(f64, Complex64)> = (0..k)
                .filter(|&r| jumps[r] > 0.0)
                .map(|r| (jumps[r], (vals[(r + k - 1) % k] / vals[r]).ln()))
                .collect();
            for i in 0..logs.len() {
                for j in i + 1..logs.len() {
                    let gap = (logs[j].0 - logs[i].0).abs();
                    if gap < 4.0 * delta {
                        continue;
                    }
                    total -= sign * logs[i].1 * logs[j].1 * gap.ln() / (2.0 * PI * PI);
                }
            }
        }
    }
    Ok(total.re)
}

fn split_coincident(windows: &JumpWindows, delta: f64) -> JumpWindows {
    let mut right = windows.right;
    for l in [windows.left.0, windows.left.1] {
        if (right.0 - l).abs() < delta {
            right.0 = l + delta;
        }
        if (right.1 - l).abs() < delta {
            right.1 = l + delta;
        }
    }
    JumpWindows { left: windows.left, right }
}

/// Closed-form `Σ_γ 𝒢_γ^{(log)}` for each window case.
pub fn mi_log_sum_by_case(transmission: f64, n: u32, windows: &JumpWindows) -> Result<f64> {
    windows.validate()?;
    let nf = n as f64;
    let a = overlap_kernel(transmission, nf)?;
    let b = q_tilde_n(transmission, nf)?;
    let ((l0, l1), (r0, r1)) = (windows.left, windows.right);
    Ok(match windows.case() {
        WindowCase::Containment => a * abs_log_ratio(&[r1 - l0, l1 - r0], &[r1 - l1, r0 - l0]),
        WindowCase::Disjoint => b * abs_log_ratio(&[r1 - l1, r0 - l0], &[r1 - l0, l1 - r0]),
        WindowCase::Partial => {
            b * abs_log_ratio(&[l1 - l0, r1 - r0], &[r1 - l0, l1 - r0])
                + a * abs_log_ratio(&[l1 - l0, r1 - r0], &[l1 - r1, l0 - r0])
        }
    })
}

/// The single formula valid in all three cases, in terms of the sorted edges.
pub fn mi_log_sum_unified(transmission: f64, n: u32, windows: &JumpWindows) -> Result<f64> {
    windows.validate()?;
    let nf = n as f64;
    let mut m = windows.points();
    m.sort_by(f64::total_cmp);
    let num = [m[2] - m[0], m[3] - m[1]];
    let ((l0, l1), (r0, r1)) = (windows.left, windows.right);
    Ok(overlap_kernel(transmission, nf)? * abs_log_ratio(&num, &[l1 - r1, l0 - r0])
        + q_tilde_n(transmission, nf)? * abs_log_ratio(&num, &[r1 - l0, l1 - r0]))
}

/// `Σ_γ 𝒞_γ^{(lin)} = Σ_γ Δk[ln(1 − 𝒯/z_γ)/2π + ln(1 − ℛ/z_γ)/2π − iγ/n]`.
pub fn mi_linear_gamma_sum(transmission: f64, n: u32, delta_k: f64) -> Result<Complex64> {
    let set = GammaSet::new(n)?;
    let nf = n as f64;
    Ok(set
        .gammas()
        .iter()
        .zip(set.inverse_roots())
        .map(|(&g, w)| {
            let logs = (1.0 - w * transmission).ln() + (1.0 - w * (1.0 - transmission)).ln();
            delta_k * (logs / (2.0 * PI) - Complex64::new(0.0, g / nf))
        })
        .sum())
}
