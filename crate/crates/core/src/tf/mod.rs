//! Time-frequency operators: Bargmann transform and Gaussian STFT, radial localization
//! spectra, Gabor multipliers on lattices, and quadrature checks of the Fock-space inequalities.

use serde::Serialize;

pub mod gabor;
pub mod hermite;
pub mod radial;
pub mod subaverage;

pub use gabor::{
    check_condition_h, gabor_multiplier_norm, gauss_tf_inner, lattice_restriction, overlap_count,
    read_matrix_dump, write_matrix_dump, EigenMethod, GaborNorm, Lattice2d, LatticeRestriction,
    OverlapCount, RestrictionSource, DEFAULT_MATRIX_CAP,
};
pub use hermite::{
    bargmann_hermite, bargmann_quadrature, check_identity_2_4, check_lemma_5_2, stft_gauss, PhasePoint,
    SampledSignal,
};
pub use radial::daubechies_radial_spectrum;
pub use subaverage::{check_subaveraging, eval_stft_quotient, StftQuotient, SubaverageReport, SubaverageStatus};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Spectrum {
    /// Descending.
    pub eigenvalues: Vec<f64>,
    pub cutoff: usize,
    /// Certified additive error: mass of the omitted tail, or perturbation plus residual.
    pub tail_bound: f64,
    /// Index attaining the maximum, where meaningful.
    pub argmax: Option<usize>,
}

impl Spectrum {
    pub fn norm(&self) -> f64 {
        self.eigenvalues.first().copied().unwrap_or(0.0)
    }

    pub fn trace(&self) -> f64 {
        self.eigenvalues.iter().sum()
    }
}
