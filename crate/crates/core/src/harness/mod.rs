//! Experiment orchestration: configuration, scans, constant fits, the
//! identity suite and the Fisher–Hartwig validation suite.

mod config;
mod fh_validate;
mod identities;
mod scan;

pub use config::{
    Affine, BiasSpec, ExperimentConfig, FitSpec, GeometryTemplate, GridSpec, Measure, ResolvedConfig, ScanKind,
    DEFAULT_EXCLUSION_RADIUS,
};
pub use fh_validate::{
    fh_validate, FhSeriesSummary, FhValidationReport, FhValidationRow, FhValidationSpec, SymbolFamily,
};
pub use identities::{
    run_identities, IdentityGrid, IdentityReport, IdentityRow, IdentitySummary, Q_END_TOL, SUM_TOL, ZERO_TOL,
};
pub use scan::{
    fit_constant, is_degenerate, run_resolved, run_scan, sig12, ConstantFit, RowFlag, ScanReport, ScanRow, SeriesFit,
};
