//! Restricted two-point correlation matrices `⟨c_j† c_m⟩` of the steady state.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::densela::ComplexMatrix;
use crate::error::{Error, Result};
use crate::model::{BiasConfig, Geometry, ImpurityModel, Subsystem};
use crate::quad::{adaptive_panels, plane_wave_integral, FourierGrid};

/// Absolute tolerance of per-entry long-range quadrature.
pub const LONGRANGE_TOL: f64 = 1e-11;
/// Absolute tolerance of per-entry full-mode quadrature.
pub const FULL_TOL: f64 = 1e-10;

/// How correlation entries are evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    /// Kernel valid when the intervals are far from the impurity compared
    /// with their lengths; keeps only terms that survive that limit.
    #[default]
    Longrange,
    /// Exact scattering-state integral at finite distance (bound states ignored).
    Full,
}

/// A correlation matrix together with the physical sites it covers.
#[derive(Debug, Clone, PartialEq)]
pub struct CorrelationMatrix {
    pub sites: Vec<i64>,
    pub matrix: ComplexMatrix,
    /// Number of leading sites that belong to `A_L`.
    pub size_left: usize,
}

impl CorrelationMatrix {
    pub fn dim(&self) -> usize {
        self.sites.len()
    }

    /// Restriction to the left or right interval (or a copy for `Both`).
    pub fn restrict(&self, subsystem: Subsystem) -> Self {
        let n = self.dim();
        let range = match subsystem {
            Subsystem::Left => 0..self.size_left,
            Subsystem::Right => self.size_left..n,
            Subsystem::Both => 0..n,
        };
        let size_left = if subsystem == Subsystem::Right { 0 } else { self.size_left.min(range.len()) };
        Self {
            sites: self.sites[range.clone()].to_vec(),
            matrix: self.matrix.submatrix(range.clone(), range),
            size_left,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Side {
    Left,
    Right,
}

fn side_of(m0: i64, site: i64) -> Result<Side> {
    if site < -m0 {
        Ok(Side::Left)
    } else if site > m0 {
        Ok(Side::Right)
    } else {
        Err(Error::Domain(format!("site {site} lies inside the impurity region |m| <= {m0}")))
    }
}

fn panels_for(lag: i64, width: f64) -> usize {
    ((lag.unsigned_abs().max(1) as f64 * width.abs() / (0.5 * PI)).ceil() as usize)
        .max((width.abs() / FourierGrid::MAX_PANEL).ceil() as usize)
        .max(1)
}

/// `(1/2π)∫_a^b g(k) e^{−ixk} dk` (signed) by adaptive quadrature.
fn window_integral(g: impl Fn(f64) -> Complex64, a: f64, b: f64, x: i64, tol: f64) -> Complex64 {
    if a == b {
        return Complex64::new(0.0, 0.0);
    }
    let xf = x as f64;
    let f = |k: f64| g(k) * Complex64::from_polar(1.0, -xf * k);
    adaptive_panels(f, a, b, panels_for(x, b - a), tol * 2.0 * PI) / (2.0 * PI)
}

/// Long-range correlation `⟨c_j† c_m⟩`; sites on opposite sides pick up the
/// reflection cross term, sites on the same side the Fermi-sea kernel plus
/// the transmission-weighted bias window.
pub fn corr_entry_longrange(model: &ImpurityModel, bias: &BiasConfig, m0: i64, j: i64, m: i64) -> Result<Complex64> {
    model.validate()?;
    bias.validate()?;
    let (kl, kr) = (bias.kf_left(), bias.kf_right());
    let same = |u: i64, k_own: f64, k_other: f64| -> Complex64 {
        let sea = plane_wave_integral(-k_own, k_own, u);
        let window = match *model {
            ImpurityModel::ConstantS { transmission } => plane_wave_integral(k_own, k_other, u) * transmission,
            _ => window_integral(|k| Complex64::new(model.transmission(k), 0.0), k_own, k_other, u, LONGRANGE_TOL),
        };
        sea + window
    };
    let cross = |s: i64| -> Complex64 {
        match *model {
            ImpurityModel::ConstantS { .. } => plane_wave_integral(kr, kl, s) * model.amplitudes(1.0).cross_amplitude(),
            _ => window_integral(|k| model.amplitudes(k).cross_amplitude(), kr, kl, s, LONGRANGE_TOL),
        }
    };
    Ok(match (side_of(m0, j)?, side_of(m0, m)?) {
        (Side::Right, Side::Right) => same(j - m, kr, kl),
        (Side::Left, Side::Left) => same(m - j, kl, kr),
        (Side::Right, Side::Left) => cross(j + m),
        (Side::Left, Side::Right) => cross(j + m).conj(),
    })
}

/// Scattering wavefunction of a state incoming from `from` at momentum `k > 0`.
fn wavefunction(model: &ImpurityModel, from: Side, k: f64, site_side: Side, x: f64) -> Complex64 {
    let s = model.amplitudes(k);
    let plus = Complex64::from_polar(1.0, k * x);
    let minus = plus.conj();
    match (from, site_side) {
        (Side::Left, Side::Left) => plus + s.r_left * minus,
        (Side::Left, Side::Right) => s.t_left * plus,
        (Side::Right, Side::Left) => s.t_right * minus,
        (Side::Right, Side::Right) => minus + s.r_right * plus,
    }
}

/// Finite-distance correlation from the full scattering-state integral over
/// occupied left movers `(0, k_F,L)` and right movers `(0, k_F,R)`.
///
/// Only the single-site model has genuine lattice eigenstates. A constant S
/// with `0 < T < 1` at every momentum is not realized by any local
/// Hamiltonian, its scattering states are not orthonormal, and the resulting
/// matrix can have eigenvalues slightly outside `[0, 1]`.
pub fn corr_entry_full(model: &ImpurityModel, bias: &BiasConfig, m0: i64, j: i64, m: i64) -> Result<Complex64> {
    model.validate()?;
    bias.validate()?;
    let (sj, sm) = (side_of(m0, j)?, side_of(m0, m)?);
    let lag = (j - m).abs().max((j + m).abs());
    let mut total = Complex64::new(0.0, 0.0);
    for (from, kf) in [(Side::Left, bias.kf_left()), (Side::Right, bias.kf_right())] {
        if kf == 0.0 {
            continue;
        }
        let f = |k: f64| {
            wavefunction(model, from, k, sj, j as f64).conj() * wavefunction(model, from, k, sm, m as f64)
        };
        total += adaptive_panels(f, 0.0, kf, panels_for(lag, kf), FULL_TOL * PI);
    }
    Ok(total / (2.0 * PI))
}

/// Fourier integrals of one function at a contiguous range of integer lags.
struct LagTable {
    start: i64,
    values: Vec<Complex64>,
}

impl LagTable {
    fn get(&self, lag: i64) -> Complex64 {
        self.values[(lag - self.start) as usize]
    }
}

/// Tabulates `(1/2π)∫_a^b g e^{−ixk}` for each `g` over `lags`.
fn tabulate(
    a: f64,
    b: f64,
    lags: std::ops::RangeInclusive<i64>,
    functions: &[&dyn Fn(f64) -> Complex64],
) -> Vec<LagTable> {
    let max_lag = lags.start().unsigned_abs().max(lags.end().unsigned_abs());
    let grid = FourierGrid::new(a, b, max_lag);
    functions
        .iter()
        .map(|g| LagTable { start: *lags.start(), values: grid.transform(&grid.sample(g), lags.clone()) })
        .collect()
}

fn closed_form_table(a: f64, b: f64, lags: std::ops::RangeInclusive<i64>, scale: Complex64) -> LagTable {
    let start = *lags.start();
    LagTable { start, values: lags.map(|x| plane_wave_integral(a, b, x) * scale).collect() }
}

fn lag_span(values: impl Iterator<Item = i64> + Clone) -> std::ops::RangeInclusive<i64> {
    let lo = values.clone().min().unwrap_or(0);
    let hi = values.max().unwrap_or(0);
    lo.min(-hi)..=hi.max(-lo)
}

/// Builds `C_X` for the chosen subsystem. For `Both`, the `A_L` sites come
/// first. Entries are computed for `i ≥ j` and mirrored, so the stored matrix
/// is exactly Hermitian.
pub fn build_corr_matrix(
    model: &ImpurityModel,
    bias: &BiasConfig,
    g: &Geometry,
    subsystem: Subsystem,
    mode: Mode,
) -> Result<CorrelationMatrix> {
    model.validate()?;
    bias.validate()?;
    g.validate()?;
    let sites = g.sites(subsystem);
    let size_left = match subsystem {
        Subsystem::Right => 0,
        _ => g.len_left as usize,
    };
    let entry: Box<dyn Fn(i64, i64) -> Complex64> = match mode {
        Mode::Longrange => Box::new(longrange_kernel(model, bias, g)),
        Mode::Full => Box::new(full_kernel(model, bias, g)),
    };
    let n = sites.len();
    let mut mat = ComplexMatrix::zeros(n, n);
    for a in 0..n {
        for b in 0..a {
            let v = entry(sites[a], sites[b]);
            mat[(a, b)] = v;
            mat[(b, a)] = v.conj();
        }
        mat[(a, a)] = Complex64::new(entry(sites[a], sites[a]).re, 0.0);
    }
    Ok(CorrelationMatrix { sites, matrix: mat, size_left })
}

fn longrange_kernel(model: &ImpurityModel, bias: &BiasConfig, g: &Geometry) -> impl Fn(i64, i64) -> Complex64 {
    let (kl, kr) = (bias.kf_left(), bias.kf_right());
    let (left, right) = (g.left_sites(), g.right_sites());
    let same_lags = lag_span([g.len_left - 1, g.len_right - 1].into_iter());
    let cross_lags = lag_span([right[0] + left[0], *right.last().unwrap() + *left.last().unwrap()].into_iter());

    let sea_right = closed_form_table(-kr, kr, same_lags.clone(), Complex64::new(1.0, 0.0));
    let sea_left = closed_form_table(-kl, kl, same_lags.clone(), Complex64::new(1.0, 0.0));
    let (window, cross) = match *model {
        ImpurityModel::ConstantS { transmission } => (
            closed_form_table(kr, kl, same_lags, Complex64::new(transmission, 0.0)),
            closed_form_table(kr, kl, cross_lags, model.amplitudes(1.0).cross_amplitude()),
        ),
        _ => {
            let trans = |k: f64| Complex64::new(model.transmission(k), 0.0);
            let mut w = tabulate(kr, kl, same_lags, &[&trans]);
            let cr = |k: f64| model.amplitudes(k).cross_amplitude();
            let mut c = tabulate(kr, kl, cross_lags, &[&cr]);
            (w.remove(0), c.remove(0))
        }
    };
    move |j: i64, m: i64| match (j > 0, m > 0) {
        (true, true) => sea_right.get(j - m) + window.get(j - m),
        // Left side: window runs from k_F,L to k_F,R with e^{+iuk}.
        (false, false) => sea_left.get(j - m) - window.get(m - j),
        (true, false) => cross.get(j + m),
        (false, true) => cross.get(j + m).conj(),
    }
}

fn full_kernel(model: &ImpurityModel, bias: &BiasConfig, g: &Geometry) -> impl Fn(i64, i64) -> Complex64 {
    let (kl, kr) = (bias.kf_left(), bias.kf_right());
    let (left, right) = (g.left_sites(), g.right_sites());
    let all: Vec<i64> = left.iter().chain(&right).copied().collect();
    let max_abs = all.iter().map(|x| x.abs()).max().unwrap_or(0);
    let span = -2 * max_abs..=2 * max_abs;
    let m = *model;
    let one = |_: f64| Complex64::new(1.0, 0.0);
    let trans = move |k: f64| Complex64::new(m.transmission(k), 0.0);
    let refl = move |k: f64| Complex64::new(1.0 - m.transmission(k), 0.0);
    let r_left = move |k: f64| m.amplitudes(k).r_left;
    let r_left_c = move |k: f64| m.amplitudes(k).r_left.conj();
    let t_left_c = move |k: f64| m.amplitudes(k).t_left.conj();
    let tr_left = move |k: f64| m.amplitudes(k).cross_amplitude();
    let r_right = move |k: f64| m.amplitudes(k).r_right;
    let r_right_c = move |k: f64| m.amplitudes(k).r_right.conj();
    let t_right = move |k: f64| m.amplitudes(k).t_right;
    let rt_right = move |k: f64| {
        let s = m.amplitudes(k);
        s.r_right.conj() * s.t_right
    };
    // Left movers occupy (0, k_F,L), right movers (0, k_F,R).
    let lt = tabulate(0.0, kl, span.clone(), &[&one, &refl, &r_left, &r_left_c, &trans, &t_left_c, &tr_left]);
    let rt = tabulate(0.0, kr, span, &[&trans, &one, &refl, &r_right, &r_right_c, &t_right, &rt_right]);
    // Right-side row j, left-side column m.
    fn cross(lt: &[LagTable], rt: &[LagTable], j: i64, m: i64) -> Complex64 {
        let (u, s) = (j - m, j + m);
        lt[5].get(u) + lt[6].get(s) + rt[5].get(-u) + rt[6].get(s)
    }
    move |j: i64, m: i64| {
        let (u, s) = (j - m, j + m);
        match (j > 0, m > 0) {
            (false, false) => lt[0].get(u) + lt[1].get(-u) + lt[2].get(s) + lt[3].get(-s) + rt[0].get(-u),
            (true, true) => lt[4].get(u) + rt[1].get(-u) + rt[2].get(u) + rt[3].get(-s) + rt[4].get(s),
            (true, false) => cross(&lt, &rt, j, m),
            (false, true) => cross(&lt, &rt, m, j).conj(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::densela::herm_eigvals;

    fn bias() -> BiasConfig {
        BiasConfig::from_fermi_momenta(1.0, PI / 2.0 + 0.2, PI / 2.0).unwrap()
    }

    fn trapezoid(f: impl Fn(f64) -> Complex64, a: f64, b: f64, points: usize) -> Complex64 {
        let h = (b - a) / (points - 1) as f64;
        let mut acc = (f(a) + f(b)) * 0.5;
        for i in 1..points - 1 {
            acc += f(a + h * i as f64);
        }
        acc * h
    }

    #[test]
    fn trivial_impurity_kills_cross_entries() {
        let model = ImpurityModel::ConstantS { transmission: 1.0 };
        let v = corr_entry_longrange(&model, &bias(), 0, 12, -7).unwrap();
        assert_eq!(v.norm(), 0.0);
    }

    #[test]
    fn diagonal_entry_closed_form() {
        let t = 0.3;
        let model = ImpurityModel::ConstantS { transmission: t };
        let b = bias();
        let v = corr_entry_longrange(&model, &b, 0, 40, 40).unwrap();
        let expected = (2.0 * b.kf_right() + t * (b.kf_left() - b.kf_right())) / (2.0 * PI);
        assert!((v - Complex64::new(expected, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn single_site_entry_matches_trapezoid_oracle() {
        let model = ImpurityModel::SingleSite { onsite: 1.0, hopping: 1.0 };
        let b = bias();
        let (kl, kr) = (b.kf_left(), b.kf_right());
        let got = corr_entry_longrange(&model, &b, 0, 20, 17).unwrap();
        let window = trapezoid(
            |k| Complex64::new(model.transmission(k), 0.0) * Complex64::from_polar(1.0, -3.0 * k),
            kr,
            kl,
            100_000,
        ) / (2.0 * PI);
        let oracle = plane_wave_integral(-kr, kr, 3) + window;
        assert!((got - oracle).norm() < 1e-8);

        let got = corr_entry_longrange(&model, &b, 0, 30, -25).unwrap();
        let oracle = trapezoid(
            |k| model.amplitudes(k).cross_amplitude() * Complex64::from_polar(1.0, -5.0 * k),
            kr,
            kl,
            100_000,
        ) / (2.0 * PI);
        assert!((got - oracle).norm() < 1e-8);
    }

    #[test]
    fn full_entry_matches_trapezoid_oracle() {
        let model = ImpurityModel::SingleSite { onsite: 1.0, hopping: 1.0 };
        let b = bias();
        let m0 = 0;
        let (j, m) = (m0 + 5, -(m0 + 5));
        let got = corr_entry_full(&model, &b, m0, j, m).unwrap();
        let left = trapezoid(
            |k| {
                let s = model.amplitudes(k);
                (s.t_left * Complex64::from_polar(1.0, k * j as f64)).conj()
                    * (Complex64::from_polar(1.0, k * m as f64) + s.r_left * Complex64::from_polar(1.0, -k * m as f64))
            },
            0.0,
            b.kf_left(),
            100_000,
        );
        let right = trapezoid(
            |k| {
                let s = model.amplitudes(k);
                (Complex64::from_polar(1.0, -k * j as f64) + s.r_right * Complex64::from_polar(1.0, k * j as f64))
                    .conj()
                    * s.t_right
                    * Complex64::from_polar(1.0, -k * m as f64)
            },
            0.0,
            b.kf_right(),
            100_000,
        );
        let oracle = (left + right) / (2.0 * PI);
        assert!((got - oracle).norm() < 1e-8, "{got} vs {oracle}");
    }

    #[test]
    fn full_mode_without_scatterer_is_homogeneous() {
        let model = ImpurityModel::ConstantS { transmission: 1.0 };
        let b = BiasConfig::from_fermi_momenta(1.0, 1.1, 1.1).unwrap();
        let kf = 1.1;
        assert!((corr_entry_full(&model, &b, 0, 3, 3).unwrap().re - kf / PI).abs() < 1e-10);
        let v = corr_entry_full(&model, &b, 0, 9, -4).unwrap();
        let x = 13.0;
        assert!((v - Complex64::new((kf * x).sin() / (PI * x), 0.0)).norm() < 1e-10);
    }

    #[test]
    fn impurity_sites_rejected() {
        let model = ImpurityModel::ConstantS { transmission: 0.5 };
        assert!(corr_entry_longrange(&model, &bias(), 2, 1, 5).is_err());
        assert!(corr_entry_full(&model, &bias(), 2, -2, 5).is_err());
    }

    #[test]
    fn minimal_matrix_has_valid_spectrum() {
        let model = ImpurityModel::ConstantS { transmission: 0.5 };
        let g = Geometry::symmetric(1, 10).unwrap();
        let c = build_corr_matrix(&model, &bias(), &g, Subsystem::Both, Mode::Longrange).unwrap();
        assert_eq!(c.dim(), 2);
        let ev = herm_eigvals(&c.matrix).unwrap();
        assert!(ev.iter().all(|&x| (-1e-8..=1.0 + 1e-8).contains(&x)));
    }

    #[test]
    fn builder_matches_entry_functions() {
        let b = bias();
        let g = Geometry::new(0, 30, 6, 24, 5).unwrap();
        for model in [
            ImpurityModel::ConstantS { transmission: 0.35 },
            ImpurityModel::SingleSite { onsite: 0.7, hopping: 1.0 },
        ] {
            let lr = build_corr_matrix(&model, &b, &g, Subsystem::Both, Mode::Longrange).unwrap();
            let full = build_corr_matrix(&model, &b, &g, Subsystem::Both, Mode::Full).unwrap();
            for (a, &j) in lr.sites.iter().enumerate() {
                for (c, &m) in lr.sites.iter().enumerate() {
                    let e = corr_entry_longrange(&model, &b, 0, j, m).unwrap();
                    assert!((lr.matrix[(a, c)] - e).norm() < 1e-11, "longrange ({j},{m})");
                    let e = corr_entry_full(&model, &b, 0, j, m).unwrap();
                    assert!((full.matrix[(a, c)] - e).norm() < 1e-10, "full ({j},{m})");
                }
            }
        }
    }

    #[test]
    fn same_side_blocks_are_toeplitz_and_cross_blocks_hankel() {
        let model = ImpurityModel::SingleSite { onsite: 1.3, hopping: 1.0 };
        let g = Geometry::new(0, 50, 8, 61, 7).unwrap();
        let c = build_corr_matrix(&model, &bias(), &g, Subsystem::Both, Mode::Longrange).unwrap();
        let m = &c.matrix;
        for i in 0..7 {
            for j in 0..7 {
                assert_eq!(m[(i, j)], m[(i + 1, j + 1)]);
            }
        }
        // Rows 8.. are A_R sites and columns 0..8 are A_L sites; both site
        // indices grow with the matrix index, so j + m is fixed along r + c.
        for r in 8..14 {
            for col in 1..8 {
                assert_eq!(m[(r, col)], m[(r + 1, col - 1)]);
            }
        }
        let left = build_corr_matrix(&model, &bias(), &g, Subsystem::Left, Mode::Longrange).unwrap();
        let shifted = build_corr_matrix(&model, &bias(), &g.shifted(100), Subsystem::Left, Mode::Longrange).unwrap();
        assert_eq!(left.matrix, shifted.matrix);
    }

    #[test]
    fn cross_block_vanishes_without_bias_or_for_trivial_impurity() {
        let g = Geometry::symmetric(10, 20).unwrap();
        let cases = [
            (ImpurityModel::ConstantS { transmission: 1.0 }, bias()),
            (ImpurityModel::ConstantS { transmission: 0.0 }, bias()),
            (
                ImpurityModel::SingleSite { onsite: 1.0, hopping: 1.0 },
                BiasConfig::from_fermi_momenta(1.0, 1.3, 1.3).unwrap(),
            ),
        ];
        for (model, b) in cases {
            let c = build_corr_matrix(&model, &b, &g, Subsystem::Both, Mode::Longrange).unwrap();
            let mut worst: f64 = 0.0;
            for r in 10..20 {
                for col in 0..10 {
                    worst = worst.max(c.matrix[(r, col)].norm());
                }
            }
            assert!(worst <= 1e-12, "{worst}");
        }
    }

    #[test]
    fn full_mode_approaches_longrange_far_away() {
        let model = ImpurityModel::SingleSite { onsite: 1.0, hopping: 1.0 };
        let b = bias();
        let g = Geometry::symmetric(6, 400).unwrap();
        let lr = build_corr_matrix(&model, &b, &g, Subsystem::Both, Mode::Longrange).unwrap();
        let full = build_corr_matrix(&model, &b, &g, Subsystem::Both, Mode::Full).unwrap();
        let diff = lr.matrix.sub(&full.matrix).unwrap();
        let worst = diff.as_slice().iter().map(|z| z.norm()).fold(0.0, f64::max);
        assert!(worst <= 1e-2, "{worst}");
    }

    #[test]
    fn spectra_lie_in_unit_interval() {
        let b = bias();
        let cases = [
            (ImpurityModel::ConstantS { transmission: 0.4 }, Mode::Longrange),
            (ImpurityModel::SingleSite { onsite: 2.0, hopping: 1.0 }, Mode::Longrange),
            (ImpurityModel::SingleSite { onsite: 2.0, hopping: 1.0 }, Mode::Full),
        ];
        for (model, mode) in cases {
            {
                let g = Geometry::new(0, 15, 12, 9, 16).unwrap();
                let c = build_corr_matrix(&model, &b, &g, Subsystem::Both, mode).unwrap();
                assert!(c.matrix.hermiticity_deviation() == 0.0);
                let ev = herm_eigvals(&c.matrix).unwrap();
                assert!(ev[0] >= -1e-8 && ev[ev.len() - 1] <= 1.0 + 1e-8, "{mode:?} {ev:?}");
            }
        }
    }

    #[test]
    fn restrict_extracts_blocks() {
        let model = ImpurityModel::ConstantS { transmission: 0.4 };
        let g = Geometry::new(0, 5, 3, 5, 4).unwrap();
        let both = build_corr_matrix(&model, &bias(), &g, Subsystem::Both, Mode::Longrange).unwrap();
        let right = build_corr_matrix(&model, &bias(), &g, Subsystem::Right, Mode::Longrange).unwrap();
        assert_eq!(both.restrict(Subsystem::Right), right);
        assert_eq!(both.restrict(Subsystem::Left).size_left, 3);
    }
}
