//! Impurity scattering models, reservoir bias and subsystem geometry.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Amplitudes of the 2x2 scattering matrix `[[r_L, t_R], [t_L, r_R]]` at one
/// momentum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScatteringData {
    pub k: f64,
    pub r_left: Complex64,
    pub t_left: Complex64,
    pub r_right: Complex64,
    pub t_right: Complex64,
}

impl ScatteringData {
    pub fn transmission(&self) -> f64 {
        self.t_left.norm_sqr()
    }

    pub fn reflection(&self) -> f64 {
        self.r_left.norm_sqr()
    }

    /// `t_L* r_L`, the combination entering the cross-impurity correlations.
    pub fn cross_amplitude(&self) -> Complex64 {
        self.t_left.conj() * self.r_left
    }

    /// Largest entry modulus of `S†S − I`.
    pub fn unitarity_residual(&self) -> f64 {
        let s = [[self.r_left, self.t_right], [self.t_left, self.r_right]];
        let mut worst: f64 = 0.0;
        for i in 0..2 {
            for j in 0..2 {
                let mut acc = Complex64::new(0.0, 0.0);
                for row in &s {
                    acc += row[i].conj() * row[j];
                }
                if i == j {
                    acc -= 1.0;
                }
                worst = worst.max(acc.norm());
            }
        }
        worst
    }
}

/// How the impurity scatters incoming waves.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ImpurityModel {
    /// Momentum-independent beamsplitter with `t = √T`, `r = −i√(1−T)`.
    ConstantS { transmission: f64 },
    /// Single site with on-site energy `onsite` in a chain with hopping `hopping`.
    SingleSite { onsite: f64, hopping: f64 },
}

impl ImpurityModel {
    pub fn validate(&self) -> Result<()> {
        match *self {
            Self::ConstantS { transmission } if !(0.0..=1.0).contains(&transmission) => {
                Err(Error::Domain(format!("transmission {transmission} outside [0, 1]")))
            }
            Self::SingleSite { hopping, .. } if !(hopping > 0.0) => {
                Err(Error::Domain(format!("hopping amplitude {hopping} must be positive")))
            }
            Self::SingleSite { onsite, .. } if !onsite.is_finite() => {
                Err(Error::Domain("on-site energy must be finite".into()))
            }
            _ => Ok(()),
        }
    }

    /// Scattering amplitudes at momentum `k ∈ (0, π)`.
    pub fn scattering_at(&self, k: f64) -> Result<ScatteringData> {
        if !(k > 0.0 && k < PI) {
            return Err(Error::Domain(format!("momentum {k} outside (0, π)")));
        }
        Ok(self.amplitudes(k))
    }

    /// Amplitudes without the domain check; the single-site formula is regular
    /// on the closed interval as long as the on-site energy is nonzero.
    pub(crate) fn amplitudes(&self, k: f64) -> ScatteringData {
        let (t, r) = match *self {
            Self::ConstantS { transmission } => {
                let t = Complex64::new(transmission.sqrt(), 0.0);
                let r = Complex64::new(0.0, -(1.0 - transmission).max(0.0).sqrt());
                (t, r)
            }
            Self::SingleSite { onsite, hopping } => {
                let s = k.sin();
                let t = Complex64::new(s, 0.0) / Complex64::new(s, onsite / (2.0 * hopping));
                (t, t - 1.0)
            }
        };
        ScatteringData { k, r_left: r, t_left: t, r_right: r, t_right: t }
    }

    /// Transmission probability `T(k)`.
    pub fn transmission(&self, k: f64) -> f64 {
        match *self {
            Self::ConstantS { transmission } => transmission,
            Self::SingleSite { onsite, hopping } => {
                let s2 = k.sin().powi(2);
                let a = onsite / (2.0 * hopping);
                if s2 == 0.0 && a == 0.0 {
                    1.0
                } else {
                    s2 / (s2 + a * a)
                }
            }
        }
    }

    pub fn is_constant(&self) -> bool {
        matches!(self, Self::ConstantS { .. })
    }
}

/// Fermi momentum `arccos(−μ/2η)` of a reservoir.
pub fn fermi_momentum(hopping: f64, mu: f64) -> Result<f64> {
    if !(hopping > 0.0) {
        return Err(Error::Domain(format!("hopping amplitude {hopping} must be positive")));
    }
    if mu.abs() > 2.0 * hopping {
        return Err(Error::BandEdge { mu, eta: hopping });
    }
    Ok((-mu / (2.0 * hopping)).clamp(-1.0, 1.0).acos())
}

/// Hopping amplitude and reservoir chemical potentials.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BiasConfig {
    pub hopping: f64,
    pub mu_left: f64,
    pub mu_right: f64,
}

impl BiasConfig {
    /// Builds the bias that realizes the given Fermi momenta.
    pub fn from_fermi_momenta(hopping: f64, kf_left: f64, kf_right: f64) -> Result<Self> {
        for k in [kf_left, kf_right] {
            if !(0.0..=PI).contains(&k) {
                return Err(Error::Domain(format!("Fermi momentum {k} outside [0, π]")));
            }
        }
        let bias = Self {
            hopping,
            mu_left: -2.0 * hopping * kf_left.cos(),
            mu_right: -2.0 * hopping * kf_right.cos(),
        };
        bias.validate()?;
        Ok(bias)
    }

    pub fn validate(&self) -> Result<()> {
        fermi_momentum(self.hopping, self.mu_left)?;
        fermi_momentum(self.hopping, self.mu_right)?;
        Ok(())
    }

    pub fn kf_left(&self) -> f64 {
        fermi_momentum(self.hopping, self.mu_left).expect("validated bias")
    }

    pub fn kf_right(&self) -> f64 {
        fermi_momentum(self.hopping, self.mu_right).expect("validated bias")
    }

    pub fn k_max(&self) -> f64 {
        self.kf_left().max(self.kf_right())
    }

    pub fn k_min(&self) -> f64 {
        self.kf_left().min(self.kf_right())
    }

    /// Width of the bias window in momentum space.
    pub fn window(&self) -> f64 {
        self.k_max() - self.k_min()
    }

    pub fn is_biased(&self) -> bool {
        self.mu_left != self.mu_right
    }
}

/// Impurity half-width and the two intervals: `A_L` occupies
/// `[−m₀−d_L−ℓ_L, −m₀−d_L−1]`, `A_R` occupies `[m₀+d_R+1, m₀+d_R+ℓ_R]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Geometry {
    #[serde(default)]
    pub m0: i64,
    pub d_left: i64,
    pub len_left: i64,
    pub d_right: i64,
    pub len_right: i64,
}

/// Which sites enter a correlation matrix.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Subsystem {
    #[serde(rename = "A_L")]
    Left,
    #[serde(rename = "A_R")]
    Right,
    #[serde(rename = "A")]
    Both,
}

impl Geometry {
    pub fn new(m0: i64, d_left: i64, len_left: i64, d_right: i64, len_right: i64) -> Result<Self> {
        let g = Self { m0, d_left, len_left, d_right, len_right };
        g.validate()?;
        Ok(g)
    }

    /// Equal intervals at equal distances.
    pub fn symmetric(len: i64, distance: i64) -> Result<Self> {
        Self::new(0, distance, len, distance, len)
    }

    pub fn validate(&self) -> Result<()> {
        if self.len_left < 1 || self.len_right < 1 {
            return Err(Error::Domain("interval lengths must be at least 1".into()));
        }
        if self.m0 < 0 || self.d_left < 0 || self.d_right < 0 {
            return Err(Error::Domain("distances and impurity half-width must be nonnegative".into()));
        }
        Ok(())
    }

    /// `(ℓ_mirror, Δℓ_L, Δℓ_R)`.
    pub fn mirror_overlap(&self) -> (i64, i64, i64) {
        let hi = (self.d_left + self.len_left).min(self.d_right + self.len_right);
        let lo = self.d_left.max(self.d_right);
        let mirror = (hi - lo).max(0);
        (mirror, self.len_left - mirror, self.len_right - mirror)
    }

    pub fn left_sites(&self) -> Vec<i64> {
        let start = -self.m0 - self.d_left - self.len_left;
        (start..start + self.len_left).collect()
    }

    pub fn right_sites(&self) -> Vec<i64> {
        let start = self.m0 + self.d_right + 1;
        (start..start + self.len_right).collect()
    }

    /// Site list of a subsystem; for `Both`, left sites come first.
    pub fn sites(&self, subsystem: Subsystem) -> Vec<i64> {
        match subsystem {
            Subsystem::Left => self.left_sites(),
            Subsystem::Right => self.right_sites(),
            Subsystem::Both => {
                let mut s = self.left_sites();
                s.extend(self.right_sites());
                s
            }
        }
    }

    pub fn is_symmetric(&self) -> bool {
        self.len_left == self.len_right && self.d_left == self.d_right
    }

    /// Same geometry with both distances shifted by `shift`.
    pub fn shifted(&self, shift: i64) -> Self {
        Self { d_left: self.d_left + shift, d_right: self.d_right + shift, ..*self }
    }
}
