//! Closed-form scaling predictions: volume-law coefficients, logarithmic
//! corrections and the special functions `Q_n`, `Q̃_n`, `q`, `q̃`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{BiasConfig, Geometry, ImpurityModel};
use crate::quad::adaptive;

/// Absolute quadrature tolerance for all special functions and coefficients.
pub const QUAD_TOL: f64 = 1e-10;

/// `aⁿ − bⁿ` for `a ≥ b ≥ 0` given `a − b` directly, without cancellation.
fn pow_diff(b: f64, gap: f64, n: f64) -> f64 {
    if b == 0.0 {
        return gap.powf(n);
    }
    b.powf(n) * (n * (gap / b).ln_1p()).exp_m1()
}

/// Integrates `f` over `(0, 1)`; for `n < 1` substitutes `x = u^{1/n}` to
/// absorb the `x^{n−1}` behaviour at the origin.
fn unit_integral(f: impl Fn(f64) -> f64, n: f64) -> f64 {
    let s = 1.0 / n.min(1.0);
    if s == 1.0 {
        return adaptive(f, 0.0, 1.0, QUAD_TOL);
    }
    adaptive(|u: f64| f(u.powf(s)) * s * u.powf(s - 1.0), 0.0, 1.0, QUAD_TOL)
}

fn check_prob(p: f64, n: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::Domain(format!("probability {p} outside [0, 1]")));
    }
    if !(n > 0.0) || !n.is_finite() {
        return Err(Error::Domain(format!("index {n} must be positive")));
    }
    Ok(())
}

/// The log-scaling kernel `Q_n(p)`.
pub fn q_n(p: f64, n: f64) -> Result<f64> {
    check_prob(p, n)?;
    let r = 1.0 - p;
    let norm = p.powf(n) + r.powf(n);
    let integrand = |x: f64| {
        // ln[(1+px)ⁿ + (rx)ⁿ]
        let first = ((n * (p * x).ln_1p()).exp_m1() + (r * x).powf(n)).ln_1p();
        // ln[((x+p)ⁿ + rⁿ)/(pⁿ + rⁿ)]
        let second = (pow_diff(p, x, n) / norm).ln_1p();
        (first + second) / (2.0 * PI * PI * x)
    };
    Ok(-n / 12.0 + unit_integral(integrand, n))
}

/// The no-overlap kernel `Q̃_n(T)`; symmetric under `T ↔ 1 − T`.
pub fn q_tilde_n(t: f64, n: f64) -> Result<f64> {
    check_prob(t, n)?;
    let r = 1.0 - t;
    let integrand = |x: f64| {
        let outer = ((n * (t * x).ln_1p()).exp_m1() + (r * x).powf(n)).ln_1p()
            + ((n * (r * x).ln_1p()).exp_m1() + (t * x).powf(n)).ln_1p();
        let denom = (t + r * x).powf(n) + (r + t * x).powf(n);
        // (x+T)ⁿ + Rⁿ − D = [(x+T)ⁿ − (T+Rx)ⁿ] − [(R+Tx)ⁿ − Rⁿ], and the
        // same with T ↔ R; the gaps are T·x and R·x respectively.
        let a = pow_diff(t + r * x, t * x, n) - pow_diff(r, t * x, n);
        let b = pow_diff(r + t * x, r * x, n) - pow_diff(t, r * x, n);
        let inner = (a / denom).ln_1p() + (b / denom).ln_1p();
        (outer + inner) / (2.0 * PI * PI * x)
    };
    Ok(-n / 12.0 + unit_integral(integrand, n))
}

fn xlogx(y: f64) -> f64 {
    if y <= 0.0 {
        0.0
    } else {
        y * y.ln()
    }
}

fn check_t(t: f64) -> Result<()> {
    check_prob(t, 1.0)
}

/// Von Neumann overlap coefficient `q(T)`; negative on `(0, 1)`.
pub fn q_fun(t: f64) -> Result<f64> {
    check_t(t)?;
    let r = 1.0 - t;
    let base = xlogx(t) + xlogx(r);
    let integrand = |x: f64| {
        let upper = (1.0 + r * x) * (r * x).ln_1p() + (1.0 + t * x) * (t * x).ln_1p();
        let shifted = xlogx(r + x) + xlogx(t + x);
        (base - (upper + shifted) / (1.0 + x)) / (2.0 * PI * PI * x)
    };
    // x = u² smooths the ln x behaviour at T ∈ {0, 1}.
    Ok(1.0 / 24.0 + unit_integral(integrand, 0.5))
}

/// Von Neumann no-overlap coefficient `q̃(T)`; positive on `(0, 1)`.
pub fn q_tilde_fun(t: f64) -> Result<f64> {
    check_t(t)?;
    let r = 1.0 - t;
    let base = xlogx(t) + xlogx(r);
    let integrand = |x: f64| ((xlogx(r + t * x) + xlogx(t + r * x)) / (1.0 + x) - base) / (PI * PI * x);
    Ok(q_fun(t)? + 1.0 / 12.0 + unit_integral(integrand, 0.5))
}

/// Which volume-law integrand to integrate over the bias window.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind", content = "n")]
pub enum VolumeKind {
    /// Single interval, per site: `(1/(1−n)) ∫ dk/2π ln(Tⁿ + Rⁿ)`.
    EntropyN(f64),
    /// Per mirror site: `(1/(1−n)) ∫ dk/π ln(Tⁿ + Rⁿ)`.
    MiN(f64),
    /// Per mirror site: `∫ dk/π (−T ln T − R ln R)`.
    MiVn,
    /// Per mirror site: `∫ dk/π ln(T^{n/2} + R^{n/2})`.
    NegN(f64),
    /// Per mirror site: `∫ dk/π ln(√T + √R)`.
    NegVn,
}

fn renyi_order(n: f64) -> Result<()> {
    if !(n > 0.0) || n == 1.0 || !n.is_finite() {
        return Err(Error::Domain(format!("Rényi index {n} must be positive and different from 1")));
    }
    Ok(())
}

pub fn volume_coeff(model: &ImpurityModel, bias: &BiasConfig, kind: VolumeKind) -> Result<f64> {
    model.validate()?;
    bias.validate()?;
    let (lo, hi) = (bias.k_min(), bias.k_max());
    if lo == hi {
        return Ok(0.0);
    }
    let integrate = |g: &dyn Fn(f64, f64) -> f64| {
        adaptive(
            |k: f64| {
                let t = model.transmission(k);
                g(t, 1.0 - t)
            },
            lo,
            hi,
            QUAD_TOL,
        )
    };
    Ok(match kind {
        VolumeKind::EntropyN(n) => {
            renyi_order(n)?;
            integrate(&|t, r| (t.powf(n) + r.powf(n)).ln()) / (2.0 * PI * (1.0 - n))
        }
        VolumeKind::MiN(n) => {
            renyi_order(n)?;
            integrate(&|t, r| (t.powf(n) + r.powf(n)).ln()) / (PI * (1.0 - n))
        }
        VolumeKind::MiVn => integrate(&|t, r| -xlogx(t) - xlogx(r)) / PI,
        VolumeKind::NegN(n) => {
            if !(n > 0.0) {
                return Err(Error::Domain(format!("negativity index {n} must be positive")));
            }
            integrate(&|t, r| (t.powf(0.5 * n) + r.powf(0.5 * n)).ln()) / PI
        }
        VolumeKind::NegVn => integrate(&|t, r| (t.sqrt() + r.sqrt()).ln()) / PI,
    })
}

/// `m₁ ≤ m₂ ≤ m₃ ≤ m₄`: the sorted interval edges `{d_L, ℓ_L+d_L, d_R, ℓ_R+d_R}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SortedLengths(pub [i64; 4]);

impl SortedLengths {
    pub fn new(g: &Geometry) -> Self {
        let mut m = [g.d_left, g.len_left + g.d_left, g.d_right, g.len_right + g.d_right];
        m.sort();
        Self(m)
    }
}

/// One `coeff · ln(argument)` contribution.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LogTerm {
    pub coeff: f64,
    pub argument: f64,
}

/// `linear_coeff · length + Σ coeff · ln(argument) + constant`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AsymptoticPrediction {
    pub linear_coeff: f64,
    /// What `linear_coeff` multiplies: ℓ for one interval, ℓ_mirror for MI.
    pub length: f64,
    pub log_terms: Vec<LogTerm>,
    pub constant: Option<f64>,
}

impl AsymptoticPrediction {
    pub fn linear_term(&self) -> f64 {
        self.linear_coeff * self.length
    }

    pub fn log_term(&self) -> f64 {
        self.log_terms.iter().map(|t| t.coeff * t.argument.ln()).sum()
    }

    /// Volume and logarithmic parts, without the constant.
    pub fn leading(&self) -> f64 {
        self.linear_term() + self.log_term()
    }

    pub fn evaluate(&self) -> f64 {
        self.leading() + self.constant.unwrap_or(0.0)
    }

    /// Sum of the log-term coefficients; the `ln ℓ` coefficient when there is
    /// a single term in ℓ.
    pub fn log_coeff(&self) -> f64 {
        self.log_terms.iter().map(|t| t.coeff).sum()
    }

    pub fn with_constant(mut self, constant: f64) -> Self {
        self.constant = Some(constant);
        self
    }
}

fn require_bias(bias: &BiasConfig) -> Result<()> {
    bias.validate()?;
    if bias.is_biased() {
        Ok(())
    } else {
        Err(Error::ZeroBias)
    }
}

/// Side of the impurity for a single interval.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Side {
    #[serde(rename = "L")]
    Left,
    #[serde(rename = "R")]
    Right,
}

/// Rényi entropy of one interval far from the impurity.
pub fn single_interval_entropy_asym(
    model: &ImpurityModel,
    bias: &BiasConfig,
    g: &Geometry,
    side: Side,
    n: f64,
) -> Result<AsymptoticPrediction> {
    require_bias(bias)?;
    g.validate()?;
    let (k_own, k_other, len) = match side {
        Side::Left => (bias.kf_left(), bias.kf_right(), g.len_left),
        Side::Right => (bias.kf_right(), bias.kf_left(), g.len_right),
    };
    let t_own = model.transmission(k_own);
    let r_other = 1.0 - model.transmission(k_other);
    let coeff = (1.0 + n) / (12.0 * n) + (q_n(t_own, n)? + q_n(r_other, n)?) / (1.0 - n);
    Ok(AsymptoticPrediction {
        linear_coeff: volume_coeff(model, bias, VolumeKind::EntropyN(n))?,
        length: len as f64,
        log_terms: vec![LogTerm { coeff, argument: len as f64 }],
        constant: None,
    })
}

/// `|∏ numerator / ∏ denominator|` with vanishing factors dropped.
fn degenerate_ratio(numerator: &[i64], denominator: &[i64]) -> f64 {
    let prod = |xs: &[i64]| xs.iter().filter(|&&x| x != 0).map(|&x| (x as f64).abs()).product::<f64>();
    prod(numerator) / prod(denominator)
}

/// The two four-point ratios of the MI log term: the overlap ratio and the
/// no-overlap ratio.
pub fn mi_ratios(g: &Geometry) -> (f64, f64) {
    let SortedLengths([m1, m2, m3, m4]) = SortedLengths::new(g);
    let (ll, dl, lr, dr) = (g.len_left, g.d_left, g.len_right, g.d_right);
    let num = [m3 - m1, m4 - m2];
    let overlap = degenerate_ratio(&num, &[ll + dl - lr - dr, dl - dr]);
    let no_overlap = degenerate_ratio(&num, &[lr + dr - dl, ll + dl - dr]);
    (overlap, no_overlap)
}

fn mirror_length(g: &Geometry) -> f64 {
    g.mirror_overlap().0 as f64
}

/// Rényi MI in the long-range limit.
pub fn renyi_mi_asym(model: &ImpurityModel, bias: &BiasConfig, g: &Geometry, n: f64) -> Result<AsymptoticPrediction> {
    require_bias(bias)?;
    g.validate()?;
    renyi_order(n)?;
    let (overlap, no_overlap) = mi_ratios(g);
    let mut log_terms = Vec::with_capacity(4);
    for kf in [bias.kf_left(), bias.kf_right()] {
        let t = model.transmission(kf);
        let a = q_n(t, n)? + q_n(1.0 - t, n)? - (1.0 / n - n) / 12.0;
        let b = q_tilde_n(t, n)?;
        let w = 0.5 / (1.0 - n);
        log_terms.push(LogTerm { coeff: w * a, argument: overlap });
        log_terms.push(LogTerm { coeff: w * b, argument: no_overlap });
    }
    Ok(AsymptoticPrediction {
        linear_coeff: volume_coeff(model, bias, VolumeKind::MiN(n))?,
        length: mirror_length(g),
        log_terms,
        constant: None,
    })
}

/// Von Neumann MI in the long-range limit.
pub fn vn_mi_asym(model: &ImpurityModel, bias: &BiasConfig, g: &Geometry) -> Result<AsymptoticPrediction> {
    require_bias(bias)?;
    g.validate()?;
    let (overlap, no_overlap) = mi_ratios(g);
    let mut log_terms = Vec::with_capacity(4);
    for kf in [bias.kf_left(), bias.kf_right()] {
        let t = model.transmission(kf);
        log_terms.push(LogTerm { coeff: 0.5 * q_fun(t)?, argument: overlap });
        log_terms.push(LogTerm { coeff: 0.5 * q_tilde_fun(t)?, argument: no_overlap });
    }
    Ok(AsymptoticPrediction {
        linear_coeff: volume_coeff(model, bias, VolumeKind::MiVn)?,
        length: mirror_length(g),
        log_terms,
        constant: None,
    })
}

/// Negativity flavour: Rényi index `n`, or the fermionic (`n → 1`) limit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NegativityOrder {
    Fermionic,
    Renyi(f64),
}

/// Negativities for `ℓ_L = ℓ_R`, `d_L = d_R`; other geometries are refused.
pub fn negativity_asym_symmetric(
    model: &ImpurityModel,
    bias: &BiasConfig,
    g: &Geometry,
    order: NegativityOrder,
) -> Result<AsymptoticPrediction> {
    require_bias(bias)?;
    g.validate()?;
    if !g.is_symmetric() {
        return Err(Error::Scope(format!(
            "negativity needs equal lengths and distances, got ℓ = ({}, {}), d = ({}, {})",
            g.len_left, g.len_right, g.d_left, g.d_right
        )));
    }
    let (n, kind) = match order {
        NegativityOrder::Fermionic => (1.0, VolumeKind::NegVn),
        NegativityOrder::Renyi(n) => (n, VolumeKind::NegN(n)),
    };
    let half = 0.5 * n;
    let mut coeff = -n / 4.0;
    for kf in [bias.kf_left(), bias.kf_right()] {
        let t = model.transmission(kf);
        coeff += q_n(t, half)? + q_n(1.0 - t, half)?;
    }
    let len = g.len_left as f64;
    Ok(AsymptoticPrediction {
        linear_coeff: volume_coeff(model, bias, kind)?,
        length: len,
        log_terms: vec![LogTerm { coeff, argument: len }],
        constant: None,
    })
}
