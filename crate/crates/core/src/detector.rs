//! Long-wavelength detector response: antenna patterns and projection of
//! polarized waveforms onto single-detector strain.

use std::fmt;
use std::str::FromStr;

use crate::chirp::PolarizedWaveform;
use crate::error::{Error, Result};

/// The three interferometers a bank can be projected onto. The derived
/// ordering (H1 < L1 < V1) is the bank ordering.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum DetectorName {
    H1,
    L1,
    V1,
}

impl DetectorName {
    pub const ALL: [DetectorName; 3] = [DetectorName::H1, DetectorName::L1, DetectorName::V1];

    pub fn as_str(self) -> &'static str {
        match self {
            DetectorName::H1 => "H1",
            DetectorName::L1 => "L1",
            DetectorName::V1 => "V1",
        }
    }
}

impl fmt::Display for DetectorName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for DetectorName {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "H1" => Ok(DetectorName::H1),
            "L1" => Ok(DetectorName::L1),
            "V1" => Ok(DetectorName::V1),
            other => Err(Error::Config(format!(
                "unknown detector {other:?}, expected one of H1, L1, V1"
            ))),
        }
    }
}

/// Source direction and polarization angle, expressed in the detector frame.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DetectorConfig {
    pub name: DetectorName,
    /// Polar angle [rad].
    pub theta: f64,
    /// Azimuth [rad].
    pub phi: f64,
    /// Polarization angle [rad].
    pub psi: f64,
}

impl DetectorConfig {
    pub fn new(name: DetectorName, theta: f64, phi: f64, psi: f64) -> Result<Self> {
        if !(theta.is_finite() && phi.is_finite() && psi.is_finite()) {
            return Err(Error::Config(format!("{name}: detector angles must be finite")));
        }
        Ok(Self {
            name,
            theta,
            phi,
            psi,
        })
    }

    /// Fixed per-detector geometry used when no override is configured.
    pub fn default_for(name: DetectorName) -> Self {
        let (theta, phi, psi) = match name {
            DetectorName::H1 => (0.30, 1.20, 0.00),
            DetectorName::L1 => (0.70, 2.10, 0.00),
            DetectorName::V1 => (1.10, 0.40, 0.00),
        };
        Self {
            name,
            theta,
            phi,
            psi,
        }
    }
}

/// Metadata attached to a strain series.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct SeriesLabel {
    pub detector: Option<DetectorName>,
    pub m1: Option<f64>,
    pub m2: Option<f64>,
}

/// Uniformly sampled single-detector strain.
#[derive(Debug, Clone, PartialEq)]
pub struct StrainSeries {
    pub sample_rate: f64,
    pub values: Vec<f64>,
    pub label: SeriesLabel,
}

impl StrainSeries {
    /// Builds a series, rejecting a non-positive rate or non-finite samples.
    pub fn new(sample_rate: f64, values: Vec<f64>) -> Result<Self> {
        if !(sample_rate > 0.0 && sample_rate.is_finite()) {
            return Err(Error::Domain(format!("sample rate must be positive, got {sample_rate}")));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::Domain(format!("non-finite strain value at index {i}")));
        }
        Ok(Self {
            sample_rate,
            values,
            label: SeriesLabel::default(),
        })
    }

    pub fn with_label(mut self, label: SeriesLabel) -> Self {
        self.label = label;
        self
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// `(F+, Fx)` for a source at `(theta, phi)` with polarization angle `psi`.
pub fn antenna_pattern(cfg: &DetectorConfig) -> (f64, f64) {
    let cos_t = cfg.theta.cos();
    let a = 0.5 * (1.0 + cos_t * cos_t) * (2.0 * cfg.phi).cos();
    let b = cos_t * (2.0 * cfg.phi).sin();
    let (s2psi, c2psi) = (2.0 * cfg.psi).sin_cos();
    (a * c2psi - b * s2psi, a * s2psi + b * c2psi)
}

/// Detector strain `F+ h+ + Fx hx`.
pub fn project(w: &PolarizedWaveform, cfg: &DetectorConfig) -> StrainSeries {
    let (fp, fc) = antenna_pattern(cfg);
    let values = w
        .h_plus
        .iter()
        .zip(&w.h_cross)
        .map(|(hp, hc)| fp * hp + fc * hc)
        .collect();
    StrainSeries {
        sample_rate: w.sample_rate,
        values,
        label: SeriesLabel {
            detector: Some(cfg.name),
            ..SeriesLabel::default()
        },
    }
}
