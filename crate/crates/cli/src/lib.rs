//! Command-line front end for the denoising pipeline: bank generation,
//! training, denoising and evaluation.

pub mod commands;
pub mod config;
mod error;
pub mod strain_file;

pub use config::{Paths, PipelineConfig};
pub use error::CliError;
pub use strain_file::StrainFile;
