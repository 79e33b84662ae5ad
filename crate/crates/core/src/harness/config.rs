//! TOML experiment configuration.

use std::ops::Range;
use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::correlation::Mode;
use crate::error::{Error, Result};
use crate::model::{BiasConfig, Geometry, ImpurityModel};

/// Default half-width, in sites, of the neighbourhood of a degenerate offset.
pub const DEFAULT_EXCLUSION_RADIUS: i64 = 5;

/// A correlation measure the harness can scan.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Measure {
    /// Rényi entropy of the union `A = A_L ∪ A_R`.
    SN,
    /// Rényi mutual information.
    MiN,
    /// Von Neumann mutual information.
    Mi,
    /// Rényi negativity (even `n`).
    EN,
    /// Fermionic logarithmic negativity.
    E,
}

impl Measure {
    pub fn name(self) -> &'static str {
        match self {
            Self::SN => "s_n",
            Self::MiN => "mi_n",
            Self::Mi => "mi",
            Self::EN => "e_n",
            Self::E => "e",
        }
    }

    /// Whether the measure carries a Rényi index.
    pub fn takes_order(self) -> bool {
        matches!(self, Self::SN | Self::MiN | Self::EN)
    }

    fn needs_spectra(self) -> bool {
        matches!(self, Self::SN | Self::MiN | Self::Mi)
    }
}

/// Which geometric quantity the scan variable represents.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScanKind {
    Length,
    Offset,
}

/// Either a fixed integer or `base + slope · x` in the scan variable `x`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Affine {
    Fixed(i64),
    Linear {
        #[serde(default)]
        base: f64,
        slope: f64,
    },
}

impl Affine {
    /// Evaluates at `x`; the result must be an integer number of sites.
    pub fn at(&self, x: i64, field: &str) -> Result<i64> {
        match *self {
            Self::Fixed(v) => Ok(v),
            Self::Linear { base, slope } => {
                let v = base + slope * x as f64;
                let rounded = v.round();
                if !v.is_finite() || (v - rounded).abs() > 1e-9 {
                    return Err(Error::Config(format!("{field} = {v} at scan value {x} is not an integer")));
                }
                Ok(rounded as i64)
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeometryTemplate {
    pub scan: ScanKind,
    #[serde(default)]
    pub m0: i64,
    pub d_left: Affine,
    pub len_left: Affine,
    pub d_right: Affine,
    pub len_right: Affine,
}

impl GeometryTemplate {
    pub fn at(&self, x: i64) -> Result<Geometry> {
        let g = Geometry {
            m0: self.m0,
            d_left: self.d_left.at(x, "d_left")?,
            len_left: self.len_left.at(x, "len_left")?,
            d_right: self.d_right.at(x, "d_right")?,
            len_right: self.len_right.at(x, "len_right")?,
        };
        g.validate().map_err(|e| Error::Config(format!("scan value {x}: {e}")))?;
        Ok(g)
    }
}

/// Bias given either by Fermi momenta or by chemical potentials.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BiasSpec {
    #[serde(default = "unit_hopping")]
    pub hopping: f64,
    pub kf_left: Option<f64>,
    pub kf_right: Option<f64>,
    pub mu_left: Option<f64>,
    pub mu_right: Option<f64>,
}

fn unit_hopping() -> f64 {
    1.0
}

impl BiasSpec {
    pub fn resolve(&self) -> Result<BiasConfig> {
        let bias = match (self.kf_left, self.kf_right, self.mu_left, self.mu_right) {
            (Some(kl), Some(kr), None, None) => BiasConfig::from_fermi_momenta(self.hopping, kl, kr),
            (None, None, Some(mu_left), Some(mu_right)) => {
                let b = BiasConfig { hopping: self.hopping, mu_left, mu_right };
                b.validate().map(|_| b)
            }
            _ => {
                return Err(Error::Config(
                    "bias needs either kf_left and kf_right, or mu_left and mu_right".into(),
                ))
            }
        };
        bias.map_err(|e| Error::Config(format!("bias: {e}")))
    }
}

/// Scan grid: an explicit list or an inclusive arithmetic range.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum GridSpec {
    Values { values: Vec<i64> },
    Range { start: i64, stop: i64, step: i64 },
}

impl GridSpec {
    pub fn points(&self) -> Result<Vec<i64>> {
        let pts = match self {
            Self::Values { values } => values.clone(),
            Self::Range { start, stop, step } => {
                if *step <= 0 {
                    return Err(Error::Config(format!("grid step {step} must be positive")));
                }
                (*start..=*stop).step_by(*step as usize).collect()
            }
        };
        if pts.is_empty() {
            return Err(Error::Config("scan grid is empty".into()));
        }
        if pts.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::Config("scan grid must be strictly increasing".into()));
        }
        Ok(pts)
    }
}

/// Grid indices `[start, end)` used for the constant fit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FitSpec {
    pub start: Option<usize>,
    pub end: Option<usize>,
}

impl FitSpec {
    /// Defaults to the upper half of a grid with `len` points.
    pub fn window(&self, len: usize) -> Result<Range<usize>> {
        let start = self.start.unwrap_or(len / 2);
        let end = self.end.unwrap_or(len);
        if start >= end || end > len {
            return Err(Error::Config(format!("fit window {start}..{end} is empty or exceeds {len} grid points")));
        }
        Ok(start..end)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub model: ImpurityModel,
    pub bias: BiasSpec,
    pub geometry: GeometryTemplate,
    pub grid: GridSpec,
    pub measures: Vec<Measure>,
    /// Rényi indices for `s_n`, `mi_n` and `e_n`.
    #[serde(default)]
    pub n: Vec<f64>,
    #[serde(default)]
    pub mode: Mode,
    #[serde(default)]
    pub fit: FitSpec,
    #[serde(default = "default_radius")]
    pub exclusion_radius: i64,
    /// Worker threads; defaults to the available parallelism.
    pub threads: Option<usize>,
    pub output: Option<PathBuf>,
}

fn default_radius() -> i64 {
    DEFAULT_EXCLUSION_RADIUS
}

/// A config with every derived quantity resolved and checked.
#[derive(Debug, Clone, PartialEq)]
pub struct ResolvedConfig {
    pub model: ImpurityModel,
    pub bias: BiasConfig,
    pub scan: ScanKind,
    pub points: Vec<i64>,
    pub geometries: Vec<Geometry>,
    /// `(measure, n)` series in output order; `n = 1` for von Neumann measures.
    pub series: Vec<(Measure, f64)>,
    pub mode: Mode,
    pub window: Range<usize>,
    pub exclusion_radius: i64,
    pub threads: usize,
}

impl ResolvedConfig {
    pub(crate) fn needs_spectra(&self) -> bool {
        self.series.iter().any(|(m, _)| m.needs_spectra())
    }
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn resolve(&self) -> Result<ResolvedConfig> {
        self.model.validate().map_err(|e| Error::Config(format!("model: {e}")))?;
        let bias = self.bias.resolve()?;
        let points = self.grid.points()?;
        let geometries = points.iter().map(|&x| self.geometry.at(x)).collect::<Result<Vec<_>>>()?;
        if self.measures.is_empty() {
            return Err(Error::Config("no measures requested".into()));
        }
        let mut series = Vec::new();
        for &m in &self.measures {
            if series.iter().any(|&(seen, _)| seen == m) {
                return Err(Error::Config(format!("measure {} listed twice", m.name())));
            }
            if !m.takes_order() {
                series.push((m, 1.0));
                continue;
            }
            if self.n.is_empty() {
                return Err(Error::Config(format!("measure {} needs at least one n", m.name())));
            }
            for &n in &self.n {
                let ok = match m {
                    Measure::EN => n >= 2.0 && n.fract() == 0.0 && (n as u64) % 2 == 0,
                    _ => n > 0.0 && n != 1.0 && n.is_finite(),
                };
                if !ok {
                    return Err(Error::Config(format!("n = {n} is not valid for {}", m.name())));
                }
                series.push((m, n));
            }
        }
        if self.exclusion_radius < 0 {
            return Err(Error::Config("exclusion_radius must be nonnegative".into()));
        }
        let threads = match self.threads {
            Some(0) => return Err(Error::Config("threads must be at least 1".into())),
            Some(t) => t,
            None => std::thread::available_parallelism().map_or(1, |p| p.get()),
        };
        Ok(ResolvedConfig {
            model: self.model,
            bias,
            scan: self.geometry.scan,
            window: self.fit.window(points.len())?,
            points,
            geometries,
            series,
            mode: self.mode,
            exclusion_radius: self.exclusion_radius,
            threads,
        })
    }
}
