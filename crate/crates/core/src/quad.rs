//! Quadrature: adaptive Gauss–Legendre, tanh–sinh for endpoint singularities,
//! and a fixed grid for batches of Fourier integrals at many integer lags.

use std::f64::consts::PI;
use std::ops::{Add, Mul, Sub};
use std::sync::OnceLock;

use num_complex::Complex64;

/// Nodes and weights of an n-point Gauss–Legendre rule on [−1, 1].
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussLegendre {
    pub fn new(order: usize) -> Self {
        assert!(order >= 1);
        let mut nodes = vec![0.0; order];
        let mut weights = vec![0.0; order];
        let n = order as f64;
        for i in 0..order.div_ceil(2) {
            let mut x = (PI * (i as f64 + 0.75) / (n + 0.5)).cos();
            let mut deriv = 0.0;
            for _ in 0..100 {
                let (mut p0, mut p1) = (1.0, x);
                for j in 2..=order {
                    let j = j as f64;
                    let p2 = ((2.0 * j - 1.0) * x * p1 - (j - 1.0) * p0) / j;
                    p0 = p1;
                    p1 = p2;
                }
                let p = if order == 1 { x } else { p1 };
                let prev = if order == 1 { 1.0 } else { p0 };
                deriv = n * (x * p - prev) / (x * x - 1.0);
                let dx = p / deriv;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let w = 2.0 / ((1.0 - x * x) * deriv * deriv);
            nodes[i] = -x;
            nodes[order - 1 - i] = x;
            weights[i] = w;
            weights[order - 1 - i] = w;
        }
        Self { nodes, weights }
    }

    /// Maps the rule onto `[a, b]` and sums `f`.
    pub fn apply<T: QuadValue>(&self, f: &impl Fn(f64) -> T, a: f64, b: f64) -> T {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        let mut acc = T::zero();
        for (&x, &w) in self.nodes.iter().zip(&self.weights) {
            acc = acc + f(mid + half * x) * (w * half);
        }
        acc
    }
}

/// The 15-point rule used by the adaptive integrator.
pub fn gl15() -> &'static GaussLegendre {
    static RULE: OnceLock<GaussLegendre> = OnceLock::new();
    RULE.get_or_init(|| GaussLegendre::new(15))
}

/// The 20-point rule used on oscillation-resolving panels.
pub fn gl20() -> &'static GaussLegendre {
    static RULE: OnceLock<GaussLegendre> = OnceLock::new();
    RULE.get_or_init(|| GaussLegendre::new(20))
}

/// Values that can be integrated: reals and complex numbers.
pub trait QuadValue: Copy + Add<Output = Self> + Sub<Output = Self> + Mul<f64, Output = Self> {
    fn zero() -> Self;
    fn magnitude(self) -> f64;
}

impl QuadValue for f64 {
    fn zero() -> Self {
        0.0
    }
    fn magnitude(self) -> f64 {
        self.abs()
    }
}

impl QuadValue for Complex64 {
    fn zero() -> Self {
        Complex64::new(0.0, 0.0)
    }
    fn magnitude(self) -> f64 {
        self.norm()
    }
}

const MAX_DEPTH: u32 = 48;

/// Adaptive Gauss–Legendre with interval bisection to absolute tolerance `tol`.
///
/// The interval is first cut into `panels` equal pieces, which callers use to
/// resolve oscillations of known frequency.
pub fn adaptive_panels<T: QuadValue>(f: impl Fn(f64) -> T, a: f64, b: f64, panels: usize, tol: f64) -> T {
    let rule = gl15();
    let panels = panels.max(1);
    let width = (b - a) / panels as f64;
    let mut total = T::zero();
    for p in 0..panels {
        let lo = a + width * p as f64;
        let hi = if p + 1 == panels { b } else { lo + width };
        let whole = rule.apply(&f, lo, hi);
        total = total + refine(&f, rule, lo, hi, whole, tol / panels as f64, 0);
    }
    total
}

pub fn adaptive<T: QuadValue>(f: impl Fn(f64) -> T, a: f64, b: f64, tol: f64) -> T {
    adaptive_panels(f, a, b, 1, tol)
}

fn refine<T: QuadValue>(
    f: &impl Fn(f64) -> T,
    rule: &GaussLegendre,
    a: f64,
    b: f64,
    whole: T,
    tol: f64,
    depth: u32,
) -> T {
    let mid = 0.5 * (a + b);
    let left = rule.apply(f, a, mid);
    let right = rule.apply(f, mid, b);
    let split = left + right;
    let err = (split - whole).magnitude();
    if err <= tol || depth >= MAX_DEPTH || err <= 1e-15 * split.magnitude() {
        return split;
    }
    refine(f, rule, a, mid, left, 0.5 * tol, depth + 1) + refine(f, rule, mid, b, right, 0.5 * tol, depth + 1)
}

/// Double-exponential quadrature on `[a, b]`; tolerates integrable endpoint
/// singularities (logarithms, inverse square roots). `f` receives the abscissa
/// together with its distances to `a` and to `b`, computed without
/// cancellation.
pub fn tanh_sinh(f: impl Fn(f64, f64, f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    let half = 0.5 * (b - a);
    let t_max = 6.5;
    let eval = |t: f64| -> f64 {
        let u = 0.5 * PI * t.sinh();
        let cosh_u = u.cosh();
        // 1 − tanh(u) and 1 + tanh(u) without cancellation.
        let e = (-2.0 * u.abs()).exp();
        let small = 2.0 * e / (1.0 + e);
        let (one_minus, one_plus) = if u >= 0.0 { (small, 2.0 - small) } else { (2.0 - small, small) };
        let from_a = half * one_plus;
        let from_b = half * one_minus;
        if from_a <= 0.0 || from_b <= 0.0 {
            return 0.0;
        }
        let x = if from_a < from_b { a + from_a } else { b - from_b };
        let w = 0.5 * PI * t.cosh() / (cosh_u * cosh_u);
        let v = f(x, from_a, from_b) * w * half;
        if v.is_finite() {
            v
        } else {
            0.0
        }
    };
    let mut h = 0.5;
    let mut sum = eval(0.0);
    let mut k = 1;
    while (k as f64) * h <= t_max {
        sum += eval(k as f64 * h) + eval(-(k as f64) * h);
        k += 1;
    }
    let mut estimate = sum * h;
    for _ in 0..12 {
        h *= 0.5;
        let mut k = 1;
        while (k as f64) * h <= t_max {
            sum += eval(k as f64 * h) + eval(-(k as f64) * h);
            k += 2;
        }
        let next = sum * h;
        let converged = (next - estimate).abs() <= tol.max(1e-15 * next.abs());
        estimate = next;
        if converged {
            break;
        }
    }
    estimate
}

/// Fixed Gauss–Legendre grid on `[a, b]` fine enough that every lag up to
/// `max_lag` completes at most a quarter period per panel.
///
/// Evaluating the integrand once on the grid and then summing against
/// `e^{−i x k}` gives `(1/2π)∫_a^b g(k) e^{−ixk} dk` for all lags at once.
/// Reversed bounds give the signed integral.
#[derive(Debug, Clone)]
pub struct FourierGrid {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl FourierGrid {
    /// Largest panel width regardless of lag; keeps near-real poles of the
    /// impurity amplitudes resolved.
    pub const MAX_PANEL: f64 = 0.05;

    pub fn new(a: f64, b: f64, max_lag: u64) -> Self {
        let rule = gl20();
        let width = (b - a).abs();
        if width == 0.0 {
            return Self { nodes: vec![], weights: vec![] };
        }
        let by_lag = (max_lag.max(1) as f64 * width / (0.5 * PI)).ceil();
        let by_width = (width / Self::MAX_PANEL).ceil();
        let panels = by_lag.max(by_width).max(1.0) as usize;
        let step = (b - a) / panels as f64;
        let mut nodes = Vec::with_capacity(panels * rule.nodes.len());
        let mut weights = Vec::with_capacity(panels * rule.nodes.len());
        for p in 0..panels {
            let lo = a + step * p as f64;
            let mid = lo + 0.5 * step;
            for (&x, &w) in rule.nodes.iter().zip(&rule.weights) {
                nodes.push(mid + 0.5 * step * x);
                weights.push(0.5 * step * w / (2.0 * PI));
            }
        }
        Self { nodes, weights }
    }

    /// Weighted samples `w_i g(k_i)` ready for [`FourierGrid::transform`].
    pub fn sample(&self, g: impl Fn(f64) -> Complex64) -> Vec<Complex64> {
        self.nodes.iter().zip(&self.weights).map(|(&k, &w)| g(k) * w).collect()
    }

    /// `Σ_i s_i e^{−i x k_i}` for every lag in `lags`.
    pub fn transform(&self, samples: &[Complex64], lags: std::ops::RangeInclusive<i64>) -> Vec<Complex64> {
        let start = *lags.start();
        let count = (lags.end() - start + 1).max(0) as usize;
        let mut out = vec![Complex64::new(0.0, 0.0); count];
        // Phases advance by e^{−ik} per lag; restart from an exact value
        // every block to keep rounding drift negligible.
        const BLOCK: usize = 64;
        for (&k, &s) in self.nodes.iter().zip(samples) {
            let step = Complex64::from_polar(1.0, -k);
            for (b, chunk) in out.chunks_mut(BLOCK).enumerate() {
                let mut z = s * Complex64::from_polar(1.0, -k * (start + (b * BLOCK) as i64) as f64);
                for v in chunk {
                    *v += z;
                    z *= step;
                }
            }
        }
        out
    }
}

/// `(1/2π)∫_a^b e^{−ixk} dk` in closed form; signed for reversed bounds.
pub fn plane_wave_integral(a: f64, b: f64, x: i64) -> Complex64 {
    if x == 0 {
        return Complex64::new((b - a) / (2.0 * PI), 0.0);
    }
    let xf = x as f64;
    let eb = Complex64::from_polar(1.0, -xf * b);
    let ea = Complex64::from_polar(1.0, -xf * a);
    (eb - ea) / Complex64::new(0.0, -2.0 * PI * xf)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gauss_legendre_exact_for_polynomials() {
        let rule = GaussLegendre::new(15);
        let v = rule.apply(&|x: f64| x.powi(28) + 3.0 * x.powi(5), -1.0, 1.0);
        assert!((v - 2.0 / 29.0).abs() < 1e-15);
        assert!((rule.weights.iter().sum::<f64>() - 2.0).abs() < 1e-14);
        let one = GaussLegendre::new(1);
        assert_eq!(one.nodes, vec![0.0]);
        assert!((one.weights[0] - 2.0).abs() < 1e-15);
    }

    #[test]
    fn adaptive_handles_smooth_and_peaked() {
        let v = adaptive(|x: f64| x.exp(), 0.0, 1.0, 1e-13);
        assert!((v - (1f64.exp() - 1.0)).abs() < 1e-13);
        let v = adaptive(|x: f64| 1.0 / (1e-4 + x * x), -1.0, 1.0, 1e-10);
        let exact = 2.0 * (1.0 / 1e-2) * (1.0 / 1e-2f64).atan();
        assert!((v - exact).abs() < 1e-8);
    }

    #[test]
    fn tanh_sinh_endpoint_singularities() {
        let v = tanh_sinh(|_, da, _| da.ln(), 0.0, 1.0, 1e-14);
        assert!((v + 1.0).abs() < 1e-12);
        let v = tanh_sinh(|_, _, db| db.powf(-0.5), 0.0, 1.0, 1e-14);
        assert!((v - 2.0).abs() < 1e-10);
    }

    #[test]
    fn fourier_grid_matches_closed_form() {
        let grid = FourierGrid::new(1.5, 1.9, 700);
        let samples = grid.sample(|_| Complex64::new(1.0, 0.0));
        let got = grid.transform(&samples, -700..=700);
        for (i, x) in (-700..=700).enumerate() {
            assert!((got[i] - plane_wave_integral(1.5, 1.9, x)).norm() < 1e-13, "lag {x}");
        }
        let reversed = FourierGrid::new(1.9, 1.5, 10);
        let s = reversed.sample(|_| Complex64::new(1.0, 0.0));
        let v = reversed.transform(&s, 3..=3)[0];
        assert!((v - plane_wave_integral(1.9, 1.5, 3)).norm() < 1e-14);
    }
}
