//! Shared fixtures for the criterion benches.

use ness_core::correlation::{build_corr_matrix, CorrelationMatrix, Mode};
use ness_core::densela::ComplexMatrix;
use ness_core::model::{BiasConfig, Geometry, ImpurityModel, Subsystem};
use num_complex::Complex64;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

/// Reproducible random Hermitian matrix with entries in [-0.5, 0.5).
pub fn random_hermitian(dim: usize, seed: u64) -> ComplexMatrix {
    let mut rng = StdRng::seed_from_u64(seed);
    let mut m = ComplexMatrix::zeros(dim, dim);
    for i in 0..dim {
        m[(i, i)] = Complex64::new(rng.gen::<f64>() - 0.5, 0.0);
        for j in 0..i {
            let z = Complex64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5);
            m[(i, j)] = z;
            m[(j, i)] = z.conj();
        }
    }
    m
}

pub fn impurity() -> ImpurityModel {
    ImpurityModel::SingleSite { onsite: 1.0, hopping: 1.0 }
}

pub fn bias() -> BiasConfig {
    let kf_right = std::f64::consts::FRAC_PI_2;
    BiasConfig::from_fermi_momenta(1.0, kf_right + 0.2, kf_right).expect("valid Fermi momenta")
}

/// Joint correlation matrix of two equal intervals of length `len`.
pub fn symmetric_state(len: i64) -> CorrelationMatrix {
    let g = Geometry::symmetric(len, 1000).expect("valid geometry");
    build_corr_matrix(&impurity(), &bias(), &g, Subsystem::Both, Mode::Longrange).expect("matrix builds")
}
