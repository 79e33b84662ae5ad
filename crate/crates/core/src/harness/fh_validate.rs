//! Exact Toeplitz determinants against their Fisher–Hartwig asymptotics.

use std::f64::consts::PI;
use std::io::Write;

use serde::{Deserialize, Serialize};

use super::scan::sig12;
use crate::densela::lu_logdet;
use crate::error::{Error, Result};
use crate::fisher_hartwig::{
    fh_logdet_asym, mi_symbol, negativity_symbol, toeplitz_from_symbol, FhOptions, JumpWindows, PiecewiseSymbol,
    WindowCase,
};
use crate::model::Subsystem;

/// Symbol family under test.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SymbolFamily {
    MiLeft,
    MiRight,
    MiBoth,
    Negativity,
}

impl SymbolFamily {
    pub const ALL: [Self; 4] = [Self::MiLeft, Self::MiRight, Self::MiBoth, Self::Negativity];

    pub fn name(self) -> &'static str {
        match self {
            Self::MiLeft => "mi_left",
            Self::MiRight => "mi_right",
            Self::MiBoth => "mi_both",
            Self::Negativity => "negativity",
        }
    }

    fn build(self, gamma: f64, n: u32, windows: &JumpWindows, transmission: f64) -> Result<PiecewiseSymbol> {
        match self {
            Self::MiLeft => mi_symbol(Subsystem::Left, gamma, n, windows, transmission),
            Self::MiRight => mi_symbol(Subsystem::Right, gamma, n, windows, transmission),
            Self::MiBoth => mi_symbol(Subsystem::Both, gamma, n, windows, transmission),
            Self::Negativity => negativity_symbol(gamma, n, windows, transmission),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FhValidationSpec {
    pub sizes: Vec<usize>,
    pub transmission: f64,
    pub n: u32,
    pub gamma: f64,
    pub windows: Vec<JumpWindows>,
}

impl Default for FhValidationSpec {
    /// Windows on the grid `2π/256`, so every jump is a multiple of `2π/M`
    /// for each size and the discretization error stays smooth in `M`.
    fn default() -> Self {
        let u = 2.0 * PI / 256.0;
        let w = |l: (f64, f64), r: (f64, f64)| JumpWindows { left: (l.0 * u, l.1 * u), right: (r.0 * u, r.1 * u) };
        Self {
            sizes: vec![256, 512, 1024],
            transmission: 0.3,
            n: 2,
            gamma: 0.5,
            windows: vec![w((20.0, 60.0), (10.0, 80.0)), w((8.0, 30.0), (50.0, 90.0)), w((12.0, 50.0), (30.0, 85.0))],
        }
    }
}

/// Real parts at one size.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FhValidationRow {
    pub case: WindowCase,
    pub family: SymbolFamily,
    pub size: usize,
    pub exact: f64,
    pub asymptotic: f64,
    /// `exact − asymptotic`; tends to the omitted constant.
    pub difference: f64,
    /// `exact − linear term`; its slope in `ln M` is the `ln M` coefficient.
    pub exact_minus_linear: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FhSeriesSummary {
    pub case: WindowCase,
    pub family: SymbolFamily,
    /// `|D_k − D_{k−1}| / |D_{k+1} − D_k|` for the differences `D` across sizes.
    pub shrink_ratios: Vec<f64>,
    pub ln_size_slope: f64,
    /// `Re(−Σβ²)`.
    pub ln_size_target: f64,
    pub relative_error: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FhValidationReport {
    pub rows: Vec<FhValidationRow>,
    pub summaries: Vec<FhSeriesSummary>,
}

impl FhValidationReport {
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let io = |e: csv::Error| Error::Config(format!("writing CSV: {e}"));
        w.write_record(["case", "family", "size", "exact", "asymptotic", "difference", "exact_minus_linear"])
            .map_err(io)?;
        for r in &self.rows {
            w.write_record([
                format!("{:?}", r.case).to_lowercase(),
                r.family.name().to_string(),
                r.size.to_string(),
                sig12(r.exact),
                sig12(r.asymptotic),
                sig12(r.difference),
                sig12(r.exact_minus_linear),
            ])
            .map_err(io)?;
        }
        w.flush().map_err(|e| Error::Config(format!("writing CSV: {e}")))
    }
}

fn least_squares_slope(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let (mx, my) = (x.iter().sum::<f64>() / n, y.iter().sum::<f64>() / n);
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    sxy / sxx
}

/// Runs every (window, family) series over the requested sizes.
pub fn fh_validate(spec: &FhValidationSpec) -> Result<FhValidationReport> {
    if spec.sizes.len() < 3 || spec.sizes.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::Config("fh validation needs at least three increasing sizes".into()));
    }
    let opts = FhOptions { perturb_branch: true, ..Default::default() };
    let mut rows = Vec::new();
    let mut summaries = Vec::new();
    for windows in &spec.windows {
        windows.validate()?;
        let case = windows.case();
        for family in SymbolFamily::ALL {
            let symbol = family.build(spec.gamma, spec.n, windows, spec.transmission)?;
            let mut series = Vec::with_capacity(spec.sizes.len());
            let mut target = 0.0;
            for &size in &spec.sizes {
                let exact = lu_logdet(&toeplitz_from_symbol(&symbol, size))?.re;
                let asym = fh_logdet_asym(&symbol, size, opts)?;
                target = asym.ln_size_coeff().re;
                series.push(FhValidationRow {
                    case,
                    family,
                    size,
                    exact,
                    asymptotic: asym.value.re,
                    difference: exact - asym.value.re,
                    exact_minus_linear: exact - asym.linear.re,
                });
            }
            let steps: Vec<f64> = series.windows(2).map(|w| (w[1].difference - w[0].difference).abs()).collect();
            let shrink_ratios = steps.windows(2).map(|s| s[0] / s[1]).collect();
            let ln_sizes: Vec<f64> = spec.sizes.iter().map(|&m| (m as f64).ln()).collect();
            let residual: Vec<f64> = series.iter().map(|r| r.exact_minus_linear).collect();
            let slope = least_squares_slope(&ln_sizes, &residual);
            summaries.push(FhSeriesSummary {
                case,
                family,
                shrink_ratios,
                ln_size_slope: slope,
                ln_size_target: target,
                relative_error: (slope / target - 1.0).abs(),
            });
            rows.extend(series);
        }
    }
    Ok(FhValidationReport { rows, summaries })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_windows_cover_each_case() {
        let cases: Vec<_> = FhValidationSpec::default().windows.iter().map(|w| w.case()).collect();
        assert_eq!(cases, vec![WindowCase::Containment, WindowCase::Disjoint, WindowCase::Partial]);
    }

    #[test]
    fn small_sizes_track_the_log_coefficient() {
        let mut spec = FhValidationSpec { sizes: vec![64, 128, 256], ..Default::default() };
        spec.windows.truncate(1);
        let report = fh_validate(&spec).unwrap();
        assert_eq!(report.rows.len(), 12);
        assert_eq!(report.summaries.len(), 4);
        for s in &report.summaries {
            assert!(s.relative_error < 0.05, "{s:?}");
        }
        let mut out = Vec::new();
        report.write_csv(&mut out).unwrap();
        assert!(String::from_utf8(out).unwrap().starts_with("case,family,size,"));
    }

    #[test]
    fn too_few_sizes_are_rejected() {
        let spec = FhValidationSpec { sizes: vec![64, 128], ..Default::default() };
        assert!(matches!(fh_validate(&spec), Err(Error::Config(_))));
    }
}
