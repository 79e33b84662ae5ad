//! Identity suite for the replica sums and the log-scaling kernels.

use serde::{Deserialize, Serialize};

use crate::asymptotics::{q_fun, q_n, q_tilde_fun, q_tilde_n};
use crate::error::Result;
use crate::fisher_hartwig::{gamma_identities, square_sum_closed, GammaSet};

/// Orders and transmissions the suite sweeps.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IdentityGrid {
    /// Orders for the three MI identities.
    pub orders: Vec<u32>,
    /// Even orders for the negativity identity.
    pub even_orders: Vec<u32>,
    /// Orders for the `Σγ²` rows.
    pub square_orders: Vec<u32>,
    pub transmissions: Vec<f64>,
}

impl Default for IdentityGrid {
    fn default() -> Self {
        Self {
            orders: vec![2, 3, 4, 5],
            even_orders: vec![2, 4, 6],
            square_orders: (2..=8).collect(),
            transmissions: (1..=9).map(|i| i as f64 / 10.0).collect(),
        }
    }
}

/// One check: `value` is a residual compared against `tolerance`, except for
/// the sign rows, whose `value` is the kernel itself.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IdentityRow {
    pub identity: String,
    pub n: Option<u32>,
    pub transmission: Option<f64>,
    pub value: f64,
    pub tolerance: f64,
    pub passed: bool,
}

/// Largest residual of one identity across the grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IdentitySummary {
    pub identity: String,
    pub max_residual: f64,
    pub rows: usize,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IdentityReport {
    pub rows: Vec<IdentityRow>,
    pub summary: Vec<IdentitySummary>,
}

impl IdentityReport {
    pub fn all_passed(&self) -> bool {
        self.rows.iter().all(|r| r.passed)
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for s in &self.summary {
            let status = if s.passed { "ok" } else { "FAILED" };
            out.push_str(&format!("{:<28} rows {:>3}  max residual {:.3e}  {status}\n", s.identity, s.rows, s.max_residual));
        }
        out
    }
}

/// Tolerance for the γ-sum identities.
pub const SUM_TOL: f64 = 1e-7;
/// Tolerance for the closed values of `Q_n` at the endpoints.
pub const Q_END_TOL: f64 = 1e-9;
/// Tolerance for the endpoint zeros of `Q̃_n`, `q` and `q̃`.
pub const ZERO_TOL: f64 = 1e-8;

struct Builder(Vec<IdentityRow>);

impl Builder {
    fn residual(&mut self, identity: &str, n: Option<u32>, t: Option<f64>, value: Result<f64>, tolerance: f64) {
        // An evaluation error is reported as a failed row with infinite residual.
        let value = value.map(f64::abs).unwrap_or(f64::INFINITY);
        let passed = value <= tolerance;
        self.0.push(IdentityRow { identity: identity.into(), n, transmission: t, value, tolerance, passed });
    }

    fn sign(&mut self, identity: &str, t: f64, value: Result<f64>, negative: bool) {
        let value = value.unwrap_or(f64::NAN);
        let passed = if negative { value < 0.0 } else { value > 0.0 };
        self.0.push(IdentityRow { identity: identity.into(), n: None, transmission: Some(t), value, tolerance: 0.0, passed });
    }
}

/// Runs every identity over `grid`. Failures are rows, not errors.
pub fn run_identities(grid: &IdentityGrid) -> IdentityReport {
    let mut b = Builder(Vec::new());
    for &n in &grid.orders {
        for &t in &grid.transmissions {
            match gamma_identities(t, n) {
                Ok(r) => {
                    b.residual("square_log", Some(n), Some(t), Ok(r.square_log), SUM_TOL);
                    b.residual("weighted_log", Some(n), Some(t), Ok(r.weighted_log), SUM_TOL);
                    b.residual("cross_log", Some(n), Some(t), Ok(r.cross_log), SUM_TOL);
                }
                Err(e) => {
                    for name in ["square_log", "weighted_log", "cross_log"] {
                        b.residual(name, Some(n), Some(t), Err(e.clone()), SUM_TOL);
                    }
                }
            }
        }
    }
    for &n in &grid.even_orders {
        for &t in &grid.transmissions {
            let value = gamma_identities(t, n).and_then(|r| {
                r.transposed_log.ok_or_else(|| crate::Error::Domain(format!("n = {n} is odd")))
            });
            b.residual("transposed_log", Some(n), Some(t), value, SUM_TOL);
        }
    }
    for &n in &grid.square_orders {
        let value = GammaSet::new(n).map(|s| s.square_sum() - square_sum_closed(n));
        b.residual("gamma_square_sum", Some(n), None, value, 1e-12);
    }
    let mut kernel_orders: Vec<u32> = grid.orders.iter().chain(&grid.even_orders).copied().collect();
    kernel_orders.sort_unstable();
    kernel_orders.dedup();
    for &n in &kernel_orders {
        let nf = n as f64;
        b.residual("q_n_at_one", Some(n), Some(1.0), q_n(1.0, nf), Q_END_TOL);
        b.residual("q_n_at_zero", Some(n), Some(0.0), q_n(0.0, nf).map(|q| q - (1.0 / nf - nf) / 12.0), Q_END_TOL);
        b.residual("q_tilde_n_at_zero", Some(n), Some(0.0), q_tilde_n(0.0, nf), ZERO_TOL);
        b.residual("q_tilde_n_at_one", Some(n), Some(1.0), q_tilde_n(1.0, nf), ZERO_TOL);
    }
    for t in [0.0, 1.0] {
        b.residual("q_endpoint", None, Some(t), q_fun(t), ZERO_TOL);
        b.residual("q_tilde_endpoint", None, Some(t), q_tilde_fun(t), ZERO_TOL);
    }
    for &t in &grid.transmissions {
        b.sign("q_negative", t, q_fun(t), true);
        b.sign("q_tilde_positive", t, q_tilde_fun(t), false);
    }
    let rows = b.0;
    let mut summary: Vec<IdentitySummary> = Vec::new();
    for row in &rows {
        let residual = if row.tolerance == 0.0 { 0.0 } else { row.value };
        match summary.iter_mut().find(|s| s.identity == row.identity) {
            Some(s) => {
                s.max_residual = s.max_residual.max(residual);
                s.rows += 1;
                s.passed &= row.passed;
            }
            None => summary.push(IdentitySummary {
                identity: row.identity.clone(),
                max_residual: residual,
                rows: 1,
                passed: row.passed,
            }),
        }
    }
    IdentityReport { rows, summary }
}
