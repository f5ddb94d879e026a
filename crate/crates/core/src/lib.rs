// `!(x > 0.0)` is used on purpose so NaN fails validation.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

//! Denoising gravitational-wave strain with a sparse autoencoder trained on
//! analytic chirp templates.
//!
//! The pipeline has four stages:
//!
//! 1. [`chirp`] synthesizes leading-order inspiral polarizations.
//! 2. [`detector`] projects them onto H1/L1/V1 strain.
//! 3. [`bank`] grids the mass space into a zero-padded template bank.
//! 4. [`autoencoder`] trains a single-hidden-layer sparse autoencoder on the
//!    bank and runs noisy strain through it; [`spectral`] scores the result.

pub mod autoencoder;
pub mod bank;
pub mod chirp;
pub mod detector;
mod error;
pub mod format;
pub mod spectral;

pub use autoencoder::{
    denoise, gradients, kl_sparsity, load_model, logsig, loss, purelin, save_model, train,
    Activation, AutoencoderModel, EpochRecord, LossBreakdown, Objective, TrainingConfig,
    TrainingTrace,
};
pub use bank::{
    assemble_bank, build_bank, build_grid, export_bank, import_bank, GridEntry, GridSpec,
    ScaleRecord, TemplateBank,
};
pub use chirp::{
    chirp_mass, dimensionless_spin, generate_chirp, gw_frequency_at, isco_frequency,
    symmetric_mass_ratio, BinaryParams, PolarizedWaveform,
};
pub use detector::{antenna_pattern, project, DetectorConfig, DetectorName, StrainSeries};
pub use error::{Error, Result};
pub use spectral::{oracle_snr_db, residual_snr_db, snr_gain_db, welch_asd, Decibels, Spectrum};
