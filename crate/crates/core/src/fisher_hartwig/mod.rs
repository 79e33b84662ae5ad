//! Toeplitz determinants of piecewise-constant symbols and their
//! Fisher–Hartwig asymptotics, including the replica (γ) sums that turn
//! them into entropies and negativities.

mod block;
mod gamma;
mod symbol;

pub use block::{block_fh_logdet_asym, block_toeplitz_matrix, Block, BlockLogDet, BlockRegime, BlockSymbol};
pub use gamma::{
    gamma_identities, gamma_log_sum_mi, mi_linear_gamma_sum, mi_log_sum_by_case, mi_log_sum_unified, square_sum_closed,
    GammaSet, IdentityResiduals,
};
pub use symbol::{
    fh_logdet_asym, mi_symbol, negativity_symbol, toeplitz_from_symbol, FhAsymptotic, FhOptions, JumpDistance, JumpWindows,
    PiecewiseSymbol, WindowCase, BRANCH_NUDGE,
};
