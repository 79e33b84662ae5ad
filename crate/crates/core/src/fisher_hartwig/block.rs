use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::asymptotics::QUAD_TOL;
use crate::densela::ComplexMatrix;
use crate::error::{Error, Result};
use crate::model::{BiasConfig, ImpurityModel};
use crate::quad::{adaptive, plane_wave_integral};

pub type Block = [[Complex64; 2]; 2];

const HERMITIAN_TOL: f64 = 1e-12;

/// A piecewise-constant 2×2 symbol on `[−π, π]`. Arc `r` spans
/// `[breakpoints[r], breakpoints[r+1])`. The off-diagonal entries carry an
/// extra `e^{±i·phase_shift·k}`: `Φ₁₂(k) = values[r][0][1]·e^{i s k}` and
/// `Φ₂₁ = conj(Φ₁₂)`.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockSymbol {
    breakpoints: Vec<f64>,
    values: Vec<Block>,
    phase_shift: i64,
}

impl BlockSymbol {
    pub fn new(breakpoints: Vec<f64>, values: Vec<Block>, phase_shift: i64) -> Result<Self> {
        if breakpoints.len() != values.len() + 1 || values.is_empty() {
            return Err(Error::Dimension(format!(
                "{} breakpoints cannot bound {} arcs",
                breakpoints.len(),
                values.len()
            )));
        }
        if breakpoints[0] != -PI || *breakpoints.last().unwrap() != PI {
            return Err(Error::Domain("breakpoints must run from -π to π".into()));
        }
        if breakpoints.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Domain("breakpoints must be strictly ascending".into()));
        }
        for v in &values {
            if (v[1][0] - v[0][1].conj()).norm() > HERMITIAN_TOL {
                return Err(Error::NotHermitian { deviation: (v[1][0] - v[0][1].conj()).norm() });
            }
            for d in [v[0][0], v[1][1]] {
                if d.im.abs() > HERMITIAN_TOL || !(-HERMITIAN_TOL..=1.0 + HERMITIAN_TOL).contains(&d.re) {
                    return Err(Error::Domain(format!("diagonal entry {d} outside [0, 1]")));
                }
            }
        }
        Ok(Self { breakpoints, values, phase_shift })
    }

    pub fn identity() -> Self {
        let one = Complex64::new(1.0, 0.0);
        let zero = Complex64::new(0.0, 0.0);
        Self { breakpoints: vec![-PI, PI], values: vec![[[one, zero], [zero, one]]], phase_shift: 0 }
    }

    /// Symbol of `C_A` for a momentum-independent scatterer, with
    /// `phase_shift = d_L − d_R`. Index 1 is the right interval, index 2 the
    /// mirrored left one.
    pub fn steady_state(model: &ImpurityModel, bias: &BiasConfig, phase_shift: i64) -> Result<Self> {
        model.validate()?;
        bias.validate()?;
        let ImpurityModel::ConstantS { transmission } = *model else {
            return Err(Error::Scope("block symbols need a momentum-independent scatterer".into()));
        };
        let (kl, kr) = (bias.kf_left(), bias.kf_right());
        let cross = model.scattering_at(0.5 * PI)?.cross_amplitude();
        let mut pts = vec![-PI, -kl, -kr, kr, kl, PI];
        pts.sort_by(f64::total_cmp);
        pts.dedup();
        // +1 on (k_F,R, k_F,L), −1 on (k_F,L, k_F,R).
        let window = |k: f64| {
            if kr < k && k < kl {
                1.0
            } else if kl < k && k < kr {
                -1.0
            } else {
                0.0
            }
        };
        let values = pts
            .windows(2)
            .map(|w| {
                let k = 0.5 * (w[0] + w[1]);
                let sea = |kf: f64| if k.abs() < kf { 1.0 } else { 0.0 };
                let s = window(k);
                let off = cross * s;
                [
                    [Complex64::new(sea(kr) + transmission * s, 0.0), off],
                    [off.conj(), Complex64::new(sea(kl) - transmission * s, 0.0)],
                ]
            })
            .collect();
        Self::new(pts, values, phase_shift)
    }

    /// The same symbol with `Φ₁₂ = Φ₂₁ = 0`.
    pub fn decoupled(&self) -> Self {
        let zero = Complex64::new(0.0, 0.0);
        let values = self.values.iter().map(|v| [[v[0][0], zero], [zero, v[1][1]]]).collect();
        Self { breakpoints: self.breakpoints.clone(), values, phase_shift: self.phase_shift }
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    pub fn values(&self) -> &[Block] {
        &self.values
    }

    pub fn phase_shift(&self) -> i64 {
        self.phase_shift
    }

    /// Block Fourier coefficient `(1/2π)∫ Φ(k) e^{−iuk} dk`.
    pub fn fourier(&self, lag: i64) -> Block {
        let zero = Complex64::new(0.0, 0.0);
        let mut out = [[zero; 2]; 2];
        let s = self.phase_shift;
        for (w, v) in self.breakpoints.windows(2).zip(&self.values) {
            let (a, b) = (w[0], w[1]);
            let plain = plane_wave_integral(a, b, lag);
            out[0][0] += v[0][0] * plain;
            out[1][1] += v[1][1] * plain;
            out[0][1] += v[0][1] * plane_wave_integral(a, b, lag - s);
            out[1][0] += v[1][0] * plane_wave_integral(a, b, lag + s);
        }
        out
    }
}

/// `2ℓ × 2ℓ` block-Toeplitz matrix; index `2j + σ` with `σ = 0` for the
/// first and `σ = 1` for the second component.
pub fn block_toeplitz_matrix(symbol: &BlockSymbol, len: usize) -> ComplexMatrix {
    let l = len as i64;
    let blocks: Vec<Block> = (-(l - 1)..l).map(|u| symbol.fourier(u)).collect();
    ComplexMatrix::from_fn(2 * len, 2 * len, |a, b| {
        let lag = (a / 2) as i64 - (b / 2) as i64;
        blocks[(lag + l - 1) as usize][a % 2][b % 2]
    })
}

/// Which length scale dominates in `det(λ − C_A)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BlockRegime {
    /// `ℓ ≫ |d_L − d_R|`.
    Symmetric,
    /// `ℓ ≪ |d_L − d_R|`: the cross blocks average out.
    Far,
}

/// Asymptotic `ln det(λ − C_A) ≈ linear_coeff·ℓ + log_coeff·ln ℓ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlockLogDet {
    pub linear_coeff: Complex64,
    pub log_coeff: Complex64,
    pub len: f64,
}

impl BlockLogDet {
    pub fn value(&self) -> Complex64 {
        self.linear_coeff * self.len + self.log_coeff * self.len.ln()
    }
}

pub fn block_fh_logdet_asym(
    lambda: Complex64,
    model: &ImpurityModel,
    bias: &BiasConfig,
    regime: BlockRegime,
    len: f64,
) -> Result<BlockLogDet> {
    model.validate()?;
    bias.validate()?;
    if lambda.im == 0.0 && (0.0..=1.0).contains(&lambda.re) {
        return Err(Error::Branch(format!("λ = {} lies on the spectral segment [0, 1]", lambda.re)));
    }
    let (lo, hi) = (bias.k_min(), bias.k_max());
    let ln_l = lambda.ln();
    let ln_l1 = (lambda - 1.0).ln();
    let edge = ((lambda - 1.0) / lambda).ln();
    let sea = lo / PI * 2.0 * ln_l1 + (PI - hi) / PI * 2.0 * ln_l;
    Ok(match regime {
        BlockRegime::Symmetric => BlockLogDet {
            linear_coeff: sea + (hi - lo) / PI * (ln_l + ln_l1),
            log_coeff: edge * edge / (PI * PI),
            len,
        },
        BlockRegime::Far => {
            let window = adaptive(
                |k: f64| {
                    let t = model.transmission(k);
                    (lambda - t).ln() + (lambda - (1.0 - t)).ln()
                },
                lo,
                hi,
                QUAD_TOL,
            );
            let sq = |z: Complex64| {
                let l = z.ln();
                l * l
            };
            let (t_hi, t_lo) = (model.transmission(hi), model.transmission(lo));
            let jumps = sq(lambda / (lambda - t_hi))
                + sq(lambda / (lambda - (1.0 - t_hi)))
                + sq((lambda - 1.0) / (lambda - t_lo))
                + sq((lambda - 1.0) / (lambda - (1.0 - t_lo)));
            BlockLogDet {
                linear_coeff: sea + (hi - lo) / (2.0 * PI) * (ln_l + ln_l1) + window / (2.0 * PI),
                log_coeff: edge * edge / (2.0 * PI * PI) + jumps / (4.0 * PI * PI),
                len,
            }
        }
    })
}
