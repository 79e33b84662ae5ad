//! Parameter scans: numeric measures against their asymptotics.

use std::io::Write;
use std::ops::Range;
use std::sync::atomic::{AtomicUsize, Ordering};

use serde::{Deserialize, Serialize};

use super::config::{ExperimentConfig, Measure, ResolvedConfig, ScanKind};
use crate::asymptotics::{negativity_asym_symmetric, renyi_mi_asym, vn_mi_asym, AsymptoticPrediction, NegativityOrder};
use crate::correlation::{build_corr_matrix, CorrelationMatrix};
use crate::error::{Error, Result};
use crate::measures::{
    binary_entropy, fermionic_negativity, occupation_spectrum, renyi_log_term, renyi_negativity_det,
};
use crate::model::{Geometry, Subsystem};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RowFlag {
    Ok,
    /// An `A_L` edge lies within the exclusion radius of an `A_R` edge.
    Degenerate,
    /// The numeric or analytic evaluation failed; see `error`.
    Failed,
}

/// One `(scan value, measure, n)` result. Invariant:
/// `residual = numeric − (lin_term + log_term + const_fit)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanRow {
    pub scan_value: i64,
    pub measure: Measure,
    pub n: f64,
    pub numeric: f64,
    pub lin_term: f64,
    pub log_term: f64,
    pub const_fit: f64,
    pub residual: f64,
    pub flag: RowFlag,
    pub error: Option<String>,
}

impl ScanRow {
    /// Numeric minus the analytic prediction without a constant.
    pub fn deviation(&self) -> f64 {
        self.numeric - self.lin_term - self.log_term
    }
}

/// Result of [`fit_constant`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConstantFit {
    pub constant: f64,
    pub rms: f64,
    pub points: usize,
}

/// Least-squares additive constant between two series over `window`: the
/// mean difference, plus the rms of what remains.
pub fn fit_constant(numeric: &[f64], analytic_no_const: &[f64], window: Range<usize>) -> Result<ConstantFit> {
    if window.is_empty() || window.end > numeric.len() || numeric.len() != analytic_no_const.len() {
        return Err(Error::Config(format!(
            "fit window {window:?} must be nonempty and inside series of lengths {} and {}",
            numeric.len(),
            analytic_no_const.len()
        )));
    }
    let diffs: Vec<f64> = window.map(|i| numeric[i] - analytic_no_const[i]).collect();
    let count = diffs.len() as f64;
    let constant = diffs.iter().sum::<f64>() / count;
    let rms = (diffs.iter().map(|d| (d - constant).powi(2)).sum::<f64>() / count).sqrt();
    Ok(ConstantFit { constant, rms, points: diffs.len() })
}

/// Constant fitted to one `(measure, n)` series.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeriesFit {
    pub measure: Measure,
    pub n: f64,
    /// `None` when no usable row fell inside the window.
    pub fit: Option<ConstantFit>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanReport {
    pub rows: Vec<ScanRow>,
    pub fits: Vec<SeriesFit>,
}

impl ScanReport {
    pub fn failed_rows(&self) -> usize {
        self.rows.iter().filter(|r| r.flag == RowFlag::Failed).count()
    }

    /// Rows of one series, in scan order.
    pub fn series(&self, measure: Measure, n: f64) -> Vec<&ScanRow> {
        self.rows.iter().filter(|r| r.measure == measure && r.n == n).collect()
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let io = |e: csv::Error| Error::Config(format!("writing CSV: {e}"));
        w.write_record([
            "scan_value", "measure", "n", "numeric", "lin_term", "log_term", "const_fit", "residual", "flag",
        ])
        .map_err(io)?;
        for r in &self.rows {
            let flag = match r.flag {
                RowFlag::Ok => "",
                RowFlag::Degenerate => "degenerate",
                RowFlag::Failed => "failed",
            };
            w.write_record([
                r.scan_value.to_string(),
                r.measure.name().to_string(),
                r.n.to_string(),
                sig12(r.numeric),
                sig12(r.lin_term),
                sig12(r.log_term),
                sig12(r.const_fit),
                sig12(r.residual),
                flag.to_string(),
            ])
            .map_err(io)?;
        }
        w.flush().map_err(|e| Error::Config(format!("writing CSV: {e}")))
    }
}

/// Formats with 12 significant digits: fixed notation for moderate
/// magnitudes, scientific otherwise.
pub fn sig12(x: f64) -> String {
    if !x.is_finite() {
        return if x.is_nan() { "NaN".into() } else if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return "0".into();
    }
    let exponent = x.abs().log10().floor() as i32;
    if (-4..12).contains(&exponent) {
        format!("{:.*}", (11 - exponent) as usize, x)
    } else {
        format!("{:.11e}", x)
    }
}

/// Whether an `A_L` edge and an `A_R` edge coincide within `radius` sites.
pub fn is_degenerate(g: &Geometry, radius: i64) -> bool {
    let left = [g.d_left, g.d_left + g.len_left];
    let right = [g.d_right, g.d_right + g.len_right];
    left.iter().any(|l| right.iter().any(|r| (l - r).abs() <= radius))
}

/// Measured value and the two analytic parts for one series at one point.
type PointValue = Result<(f64, f64, f64)>;

struct Spectra {
    left: Vec<f64>,
    right: Vec<f64>,
    both: Vec<f64>,
}

fn renyi_sum(spectrum: &[f64], n: f64) -> f64 {
    spectrum.iter().map(|&l| renyi_log_term(l, n)).sum::<f64>() / (1.0 - n)
}

fn vn_sum(spectrum: &[f64]) -> f64 {
    spectrum.iter().map(|&l| binary_entropy(l)).sum()
}

fn split(p: &AsymptoticPrediction) -> (f64, f64) {
    (p.linear_term(), p.log_term())
}

fn evaluate_point(cfg: &ResolvedConfig, g: &Geometry) -> Vec<PointValue> {
    let joint = match build_corr_matrix(&cfg.model, &cfg.bias, g, Subsystem::Both, cfg.mode) {
        Ok(c) => c,
        Err(e) => return cfg.series.iter().map(|_| Err(e.clone())).collect(),
    };
    let spectra = if cfg.needs_spectra() { Some(spectra_of(&joint)) } else { None };
    cfg.series.iter().map(|&(m, n)| evaluate_series(cfg, g, &joint, spectra.as_ref(), m, n)).collect()
}

fn spectra_of(joint: &CorrelationMatrix) -> Result<Spectra> {
    let spec = |c: &CorrelationMatrix| occupation_spectrum(&c.matrix).map(|(ev, _)| ev);
    Ok(Spectra {
        left: spec(&joint.restrict(Subsystem::Left))?,
        right: spec(&joint.restrict(Subsystem::Right))?,
        both: spec(joint)?,
    })
}

fn evaluate_series(
    cfg: &ResolvedConfig,
    g: &Geometry,
    joint: &CorrelationMatrix,
    spectra: Option<&Result<Spectra>>,
    measure: Measure,
    n: f64,
) -> PointValue {
    let spectra = || spectra.expect("spectra computed for entropy measures").as_ref().map_err(Clone::clone);
    let (model, bias) = (&cfg.model, &cfg.bias);
    match measure {
        Measure::SN => {
            let s = spectra()?;
            if !g.is_symmetric() {
                return Err(Error::Scope("the entropy of A has an asymptotic form only for d_L = d_R, ℓ_L = ℓ_R".into()));
            }
            let len = g.len_left as f64;
            Ok((renyi_sum(&s.both, n), 0.0, (1.0 + n) / (3.0 * n) * len.ln()))
        }
        Measure::MiN => {
            let s = spectra()?;
            let value = renyi_sum(&s.left, n) + renyi_sum(&s.right, n) - renyi_sum(&s.both, n);
            let (lin, log) = split(&renyi_mi_asym(model, bias, g, n)?);
            Ok((value, lin, log))
        }
        Measure::Mi => {
            let s = spectra()?;
            let value = vn_sum(&s.left) + vn_sum(&s.right) - vn_sum(&s.both);
            let (lin, log) = split(&vn_mi_asym(model, bias, g)?);
            Ok((value, lin, log))
        }
        Measure::EN => {
            let value = renyi_negativity_det(joint, n as u32)?.value;
            let (lin, log) = split(&negativity_asym_symmetric(model, bias, g, NegativityOrder::Renyi(n))?);
            Ok((value, lin, log))
        }
        Measure::E => {
            let value = fermionic_negativity(joint)?.value;
            let (lin, log) = split(&negativity_asym_symmetric(model, bias, g, NegativityOrder::Fermionic)?);
            Ok((value, lin, log))
        }
    }
}

/// Evaluates every grid point on a pool of `threads` workers; results come
/// back in grid order regardless of scheduling.
fn evaluate_all(cfg: &ResolvedConfig) -> Vec<Vec<PointValue>> {
    let total = cfg.geometries.len();
    let next = AtomicUsize::new(0);
    let workers = cfg.threads.min(total).max(1);
    let mut indexed: Vec<(usize, Vec<PointValue>)> = std::thread::scope(|scope| {
        let handles: Vec<_> = (0..workers)
            .map(|_| {
                scope.spawn(|| {
                    let mut done = Vec::new();
                    loop {
                        let i = next.fetch_add(1, Ordering::Relaxed);
                        if i >= total {
                            break done;
                        }
                        done.push((i, evaluate_point(cfg, &cfg.geometries[i])));
                    }
                })
            })
            .collect();
        handles.into_iter().flat_map(|h| h.join().expect("scan worker panicked")).collect()
    });
    indexed.sort_by_key(|(i, _)| *i);
    indexed.into_iter().map(|(_, v)| v).collect()
}

/// Runs the scan described by an already validated config.
pub fn run_resolved(cfg: &ResolvedConfig) -> ScanReport {
    let values = evaluate_all(cfg);
    let mut rows = Vec::with_capacity(values.len() * cfg.series.len());
    let mut fits = Vec::with_capacity(cfg.series.len());
    for (s, &(measure, n)) in cfg.series.iter().enumerate() {
        let mut series: Vec<ScanRow> = cfg
            .points
            .iter()
            .zip(&cfg.geometries)
            .zip(&values)
            .map(|((&x, g), point)| {
                let degenerate = cfg.scan == ScanKind::Offset && is_degenerate(g, cfg.exclusion_radius);
                let flag = if degenerate { RowFlag::Degenerate } else { RowFlag::Ok };
                match &point[s] {
                    Ok((numeric, lin, log)) => ScanRow {
                        scan_value: x,
                        measure,
                        n,
                        numeric: *numeric,
                        lin_term: *lin,
                        log_term: *log,
                        const_fit: f64::NAN,
                        residual: f64::NAN,
                        flag,
                        error: None,
                    },
                    Err(e) => ScanRow {
                        scan_value: x,
                        measure,
                        n,
                        numeric: f64::NAN,
                        lin_term: f64::NAN,
                        log_term: f64::NAN,
                        const_fit: f64::NAN,
                        residual: f64::NAN,
                        flag: RowFlag::Failed,
                        error: Some(e.to_string()),
                    },
                }
            })
            .collect();
        let usable: Vec<usize> = cfg.window.clone().filter(|&i| series[i].flag == RowFlag::Ok).collect();
        let numeric: Vec<f64> = usable.iter().map(|&i| series[i].numeric).collect();
        let analytic: Vec<f64> = usable.iter().map(|&i| series[i].lin_term + series[i].log_term).collect();
        let fit = fit_constant(&numeric, &analytic, 0..usable.len()).ok();
        if let Some(f) = fit {
            for row in series.iter_mut().filter(|r| r.flag != RowFlag::Failed) {
                row.const_fit = f.constant;
                row.residual = row.deviation() - f.constant;
            }
        }
        fits.push(SeriesFit { measure, n, fit });
        rows.extend(series);
    }
    ScanReport { rows, fits }
}

/// Validates `cfg` and runs the scan. Configuration problems are returned
/// as errors; per-point failures are recorded in the rows.
pub fn run_scan(cfg: &ExperimentConfig) -> Result<ScanReport> {
    Ok(run_resolved(&cfg.resolve()?))
}
