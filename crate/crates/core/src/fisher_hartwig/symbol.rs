use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::densela::ComplexMatrix;
use crate::error::{Error, Result};
use crate::model::Subsystem;
use crate::quad::plane_wave_integral;

/// Two values closer than this (relative) count as the same, so the point
/// between them is not a jump.
const NULL_JUMP_TOL: f64 = 1e-13;

fn same_value(a: Complex64, b: Complex64) -> bool {
    (a - b).norm() <= NULL_JUMP_TOL * a.norm().max(b.norm()).max(1.0)
}

/// A piecewise-constant function on the unit circle. `values[r]` holds on
/// `[jumps[r], jumps[r+1])`, and the last arc wraps past `π` back to
/// `jumps[0]`. A symbol without jumps has exactly one value.
#[derive(Debug, Clone, PartialEq)]
pub struct PiecewiseSymbol {
    jumps: Vec<f64>,
    values: Vec<Complex64>,
}

impl PiecewiseSymbol {
    pub fn new(jumps: Vec<f64>, values: Vec<Complex64>) -> Result<Self> {
        let arcs = jumps.len().max(1);
        if values.len() != arcs {
            return Err(Error::Dimension(format!("{} jumps need {arcs} arc values, got {}", jumps.len(), values.len())));
        }
        if let Some(&bad) = jumps.iter().find(|&&t| !(-PI..PI).contains(&t)) {
            return Err(Error::Domain(format!("jump angle {bad} outside [-π, π)")));
        }
        if jumps.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Domain("jump angles must be strictly ascending".into()));
        }
        if values.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
            return Err(Error::Domain("symbol values must be finite".into()));
        }
        if jumps.len() == 1 {
            return Err(Error::Domain("a single jump cannot close around the circle".into()));
        }
        for r in 0..jumps.len() {
            if same_value(values[(r + arcs - 1) % arcs], values[r]) {
                return Err(Error::Domain(format!("no jump at θ = {}", jumps[r])));
            }
        }
        Ok(Self { jumps, values })
    }

    pub fn constant(value: Complex64) -> Self {
        Self { jumps: Vec::new(), values: vec![value] }
    }

    /// Samples `f` at the midpoint of every arc cut out by `points` and keeps
    /// only the points where the value actually changes.
    pub fn from_fn(points: &[f64], f: impl Fn(f64) -> Complex64) -> Result<Self> {
        let mut pts: Vec<f64> = points.to_vec();
        pts.sort_by(f64::total_cmp);
        pts.dedup();
        if pts.is_empty() {
            return Ok(Self::constant(f(0.0)));
        }
        let arcs = pts.len();
        let vals: Vec<Complex64> = (0..arcs)
            .map(|r| {
                let end = if r + 1 < arcs { pts[r + 1] } else { pts[0] + 2.0 * PI };
                let mut mid = 0.5 * (pts[r] + end);
                if mid >= PI {
                    mid -= 2.0 * PI;
                }
                f(mid)
            })
            .collect();
        let keep: Vec<usize> = (0..arcs).filter(|&r| !same_value(vals[(r + arcs - 1) % arcs], vals[r])).collect();
        if keep.is_empty() {
            return Ok(Self::constant(vals[0]));
        }
        Self::new(keep.iter().map(|&r| pts[r]).collect(), keep.iter().map(|&r| vals[r]).collect())
    }

    pub fn jumps(&self) -> &[f64] {
        &self.jumps
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    /// `(start, end, value)` per arc; the last arc ends at `jumps[0] + 2π`.
    pub fn arcs(&self) -> Vec<(f64, f64, Complex64)> {
        let n = self.jumps.len();
        if n == 0 {
            return vec![(-PI, PI, self.values[0])];
        }
        (0..n)
            .map(|r| {
                let end = if r + 1 < n { self.jumps[r + 1] } else { self.jumps[0] + 2.0 * PI };
                (self.jumps[r], end, self.values[r])
            })
            .collect()
    }

    pub fn value_at(&self, theta: f64) -> Complex64 {
        let t = crate::densela::wrap_phase(theta);
        let t = if t == PI { -PI } else { t };
        match self.jumps.iter().rposition(|&j| j <= t) {
            Some(r) => self.values[r],
            None => *self.values.last().unwrap(),
        }
    }

    /// Fourier coefficient `(1/2π)∫ e^{−iuθ} φ(θ) dθ`.
    pub fn fourier(&self, lag: i64) -> Complex64 {
        self.arcs().iter().map(|&(a, b, v)| v * plane_wave_integral(a, b, lag)).sum()
    }

    /// The same symbol rotated by `phi` (jumps moved to `θ_r + phi`).
    pub fn rotated(&self, phi: f64) -> Result<Self> {
        if self.jumps.is_empty() {
            return Ok(self.clone());
        }
        let mut pairs: Vec<(f64, Complex64)> = self
            .jumps
            .iter()
            .zip(&self.values)
            .map(|(&t, &v)| {
                let w = crate::densela::wrap_phase(t + phi);
                (if w == PI { -PI } else { w }, v)
            })
            .collect();
        pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
        Self::new(pairs.iter().map(|p| p.0).collect(), pairs.iter().map(|p| p.1).collect())
    }
}

/// `M × M` Toeplitz matrix with entries `c[s − s']` from closed-form arc integrals.
pub fn toeplitz_from_symbol(symbol: &PiecewiseSymbol, size: usize) -> ComplexMatrix {
    let m = size as i64;
    let coeffs: Vec<Complex64> = (-(m - 1)..m).map(|u| symbol.fourier(u)).collect();
    ComplexMatrix::from_fn(size, size, |s, t| coeffs[(s as i64 - t as i64 + m - 1) as usize])
}

/// How `ln|M(e^{iθ₂} − e^{iθ₁})|` is evaluated in the jump interactions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum JumpDistance {
    /// Chord length on the unit circle.
    #[default]
    Chord,
    /// Angle difference; the `M → ∞` form where all jumps crowd near `θ = 0`.
    Angle,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct FhOptions {
    pub distance: JumpDistance,
    /// Nudge jump ratios lying exactly on the negative real axis off the cut
    /// instead of failing.
    pub perturb_branch: bool,
}

/// Angle by which a ratio on the branch cut is rotated when perturbing.
pub const BRANCH_NUDGE: f64 = 64.0 * f64::EPSILON;

/// Fisher–Hartwig asymptotics of `ln det` of a Toeplitz matrix, without the
/// size-independent constant.
#[derive(Debug, Clone, PartialEq)]
pub struct FhAsymptotic {
    pub value: Complex64,
    pub linear: Complex64,
    pub interactions: Complex64,
    /// `β_r` per jump.
    pub betas: Vec<Complex64>,
    /// Indices of jumps whose ratio sat on the branch cut and was nudged.
    pub perturbed: Vec<usize>,
}

impl FhAsymptotic {
    /// Coefficient of `ln M`, i.e. `−Σβ_r²`.
    pub fn ln_size_coeff(&self) -> Complex64 {
        -self.betas.iter().map(|b| b * b).sum::<Complex64>()
    }
}

fn on_branch_cut(ratio: Complex64) -> bool {
    ratio.im == 0.0 && ratio.re < 0.0
}

/// Rotates arc values by a tiny phase wherever the ratio across a jump is a
/// negative real, which would put `β` exactly at `1/2`.
fn nudge_off_cut(symbol: &PiecewiseSymbol, perturb: bool) -> Result<(Vec<Complex64>, Vec<usize>)> {
    let n = symbol.jumps.len();
    let mut values = symbol.values.clone();
    let mut perturbed = Vec::new();
    for r in 0..n {
        if on_branch_cut(values[(r + n - 1) % n] / values[r]) {
            if !perturb {
                return Err(Error::Branch(format!(
                    "jump ratio at θ = {} is a negative real, so β sits at ±1/2",
                    symbol.jumps[r]
                )));
            }
            values[r] *= Complex64::from_polar(1.0, BRANCH_NUDGE);
            perturbed.push(r);
        }
    }
    Ok((values, perturbed))
}

/// `ln det K_M` for large `M`: the linear term plus the pairwise jump
/// interactions (which carry the `ln M` dependence).
pub fn fh_logdet_asym(symbol: &PiecewiseSymbol, size: usize, opts: FhOptions) -> Result<FhAsymptotic> {
    if symbol.values.iter().any(|v| *v == Complex64::new(0.0, 0.0)) {
        return Err(Error::Domain("symbol vanishes on an arc, its logarithm is undefined".into()));
    }
    let m = size as f64;
    let n = symbol.jumps.len();
    let (values, perturbed) = nudge_off_cut(symbol, opts.perturb_branch)?;
    let two_pi_i = Complex64::new(0.0, 2.0 * PI);
    let mut betas = Vec::with_capacity(n);
    for r in 0..n {
        let ratio = values[(r + n - 1) % n] / values[r];
        if on_branch_cut(ratio) {
            return Err(Error::Branch(format!("jump ratio at θ = {} stays on the cut", symbol.jumps[r])));
        }
        betas.push(ratio.ln() / two_pi_i);
    }
    let winding: Complex64 = betas.iter().sum();
    if winding.norm() > 1e-9 {
        return Err(Error::Branch(format!("jump exponents sum to {winding}, the symbol winds around 0")));
    }

    // Continuous log: start on the arc through −π, step across each jump.
    let arcs = symbol.arcs();
    let mut log_value = values[values.len() - 1].ln();
    let mut linear = if n == 0 { log_value * m } else { Complex64::new(0.0, 0.0) };
    for r in 0..n {
        log_value -= two_pi_i * betas[r];
        let (a, b, _) = arcs[r];
        linear += log_value * (m * (b - a) / (2.0 * PI));
    }

    let mut interactions = Complex64::new(0.0, 0.0);
    for r1 in 0..n {
        for r2 in r1 + 1..n {
            let (t1, t2) = (symbol.jumps[r1], symbol.jumps[r2]);
            let gap = match opts.distance {
                JumpDistance::Chord => 2.0 * (0.5 * (t2 - t1)).sin().abs(),
                JumpDistance::Angle => (t2 - t1).abs(),
            };
            interactions += 2.0 * betas[r1] * betas[r2] * (m * gap).ln();
        }
    }
    // With Σβ = 0 the ln M part of the pair sum is exactly −Σβ² ln M.
    Ok(FhAsymptotic { value: linear + interactions, linear, interactions, betas, perturbed })
}

/// Angular windows of the two intervals: `θ_{i,−} = d_i Δk/M`,
/// `θ_{i,+} = (d_i + ℓ_i) Δk/M`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct JumpWindows {
    pub left: (f64, f64),
    pub right: (f64, f64),
}

/// Relative position of the mirrored left window and the right window.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WindowCase {
    Containment,
    Disjoint,
    Partial,
}

impl JumpWindows {
    pub fn new(left: (f64, f64), right: (f64, f64)) -> Result<Self> {
        let w = Self { left, right };
        w.validate()?;
        Ok(w)
    }

    pub fn from_lengths(d_left: i64, len_left: i64, d_right: i64, len_right: i64, delta_k: f64, size: usize) -> Result<Self> {
        let scale = delta_k / size as f64;
        Self::new(
            (d_left as f64 * scale, (d_left + len_left) as f64 * scale),
            (d_right as f64 * scale, (d_right + len_right) as f64 * scale),
        )
    }

    pub fn validate(&self) -> Result<()> {
        for (name, (lo, hi)) in [("left", self.left), ("right", self.right)] {
            if !(0.0 < lo && lo < hi && hi < PI) {
                return Err(Error::Domain(format!("{name} window ({lo}, {hi}) must satisfy 0 < θ₋ < θ₊ < π")));
            }
        }
        Ok(())
    }

    pub fn case(&self) -> WindowCase {
        let ((l0, l1), (r0, r1)) = (self.left, self.right);
        if (r0 <= l0 && l1 <= r1) || (l0 <= r0 && r1 <= l1) {
            WindowCase::Containment
        } else if l1 <= r0 || r1 <= l0 {
            WindowCase::Disjoint
        } else {
            WindowCase::Partial
        }
    }

    /// The four positive jump angles `θ_{L,−}, θ_{L,+}, θ_{R,−}, θ_{R,+}`.
    pub fn points(&self) -> [f64; 4] {
        [self.left.0, self.left.1, self.right.0, self.right.1]
    }
}

fn in_window(theta: f64, (lo, hi): (f64, f64)) -> bool {
    lo <= theta && theta <= hi
}

fn symbol_over_windows(
    windows: &JumpWindows,
    transmission: f64,
    left_value: Option<Complex64>,
    right_value: Option<Complex64>,
) -> Result<PiecewiseSymbol> {
    windows.validate()?;
    if !(0.0..=1.0).contains(&transmission) {
        return Err(Error::Domain(format!("transmission {transmission} outside [0, 1]")));
    }
    let one = Complex64::new(1.0, 0.0);
    let mirrored = (-windows.left.1, -windows.left.0);
    let raw = |theta: f64| {
        if let Some(v) = left_value.filter(|_| in_window(theta, mirrored)) {
            return v;
        }
        if let Some(v) = right_value.filter(|_| in_window(theta, windows.right)) {
            return v;
        }
        one
    };
    let reflection = 1.0 - transmission;
    let symbol = |theta: f64| {
        if theta < 0.0 {
            raw(theta)
        } else {
            raw(theta) * transmission + raw(-theta) * reflection
        }
    };
    let mut points = Vec::with_capacity(6);
    if left_value.is_some() {
        points.extend([mirrored.0, mirrored.1, windows.left.0, windows.left.1]);
    }
    if right_value.is_some() {
        points.extend([windows.right.0, windows.right.1]);
    }
    PiecewiseSymbol::from_fn(&points, symbol)
}

fn replica_phase(gamma: f64, n: u32) -> Complex64 {
    Complex64::from_polar(1.0, 2.0 * PI * gamma / n as f64)
}

/// Symbol of the replica factor `K_γ` for `A_L`, `A_R` or `A` in the
/// simplified steady state.
pub fn mi_symbol(subsystem: Subsystem, gamma: f64, n: u32, windows: &JumpWindows, transmission: f64) -> Result<PiecewiseSymbol> {
    let e = replica_phase(gamma, n);
    let (left, right) = match subsystem {
        Subsystem::Left => (Some(e), None),
        Subsystem::Right => (None, Some(e)),
        Subsystem::Both => (Some(e), Some(e)),
    };
    symbol_over_windows(windows, transmission, left, right)
}

/// Symbol of the partially transposed replica factor: the right window
/// carries `−e^{−2πiγ/n}`.
pub fn negativity_symbol(gamma: f64, n: u32, windows: &JumpWindows, transmission: f64) -> Result<PiecewiseSymbol> {
    let e = replica_phase(gamma, n);
    symbol_over_windows(windows, transmission, Some(e), Some(-e.conj()))
}
