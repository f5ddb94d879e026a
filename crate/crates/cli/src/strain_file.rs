//! Plain-text strain files.
//!
//! ```text
//! # detector = H1
//! # gps_start = 1126259446
//! # sample_rate_hz = 4096
//! 1.2345e-21
//! ...
//! ```
//!
//! `sample_rate_hz` is required; the other header keys are optional and are
//! carried through unchanged when a denoised file is written.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use gwsae_core::format::{format_sample, parse_key_value};
use gwsae_core::StrainSeries;

use crate::error::CliError;

/// Rates the observatories publish at; anything else loads with a warning.
pub const STANDARD_RATES: [f64; 2] = [4096.0, 16384.0];

#[derive(Debug, Clone, PartialEq)]
pub struct StrainFile {
    pub detector: Option<String>,
    pub gps_start: Option<f64>,
    pub sample_rate: f64,
    pub samples: Vec<f64>,
}

impl StrainFile {
    pub fn parse(text: &str, origin: &str) -> Result<Self, CliError> {
        let bad = |line: usize, msg: String| CliError::Data(format!("{origin}: line {line}: {msg}"));
        let mut detector = None;
        let mut gps_start = None;
        let mut sample_rate = None;
        let mut samples = Vec::new();

        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let trimmed = raw.trim();
            if trimmed.is_empty() {
                continue;
            }
            if let Some(header) = trimmed.strip_prefix('#') {
                if !samples.is_empty() {
                    return Err(bad(line, "header line after samples".into()));
                }
                let Some((key, value)) = parse_key_value(header) else {
                    continue;
                };
                match key {
                    "detector" => detector = Some(value.to_string()),
                    "gps_start" => {
                        let v: f64 = value
                            .parse()
                            .map_err(|_| bad(line, format!("invalid gps_start '{value}'")))?;
                        gps_start = Some(v);
                    }
                    "sample_rate_hz" => {
                        let v: f64 = value
                            .parse()
                            .map_err(|_| bad(line, format!("invalid sample_rate_hz '{value}'")))?;
                        if !(v > 0.0 && v.is_finite()) {
                            return Err(bad(line, format!("sample_rate_hz must be positive, got {value}")));
                        }
                        sample_rate = Some(v);
                    }
                    other => log::warn!("{origin}: line {line}: ignoring header key '{other}'"),
                }
                continue;
            }
            let v: f64 = trimmed
                .parse()
                .map_err(|_| bad(line, format!("cannot parse '{trimmed}' as a strain sample")))?;
            if !v.is_finite() {
                return Err(bad(line, format!("non-finite sample '{trimmed}'")));
            }
            samples.push(v);
        }

        let sample_rate =
            sample_rate.ok_or_else(|| CliError::Data(format!("{origin}: missing '# sample_rate_hz' header")))?;
        if samples.is_empty() {
            return Err(CliError::Data(format!("{origin}: no samples")));
        }
        if !STANDARD_RATES.contains(&sample_rate) {
            log::warn!("{origin}: unusual sample rate {sample_rate} Hz (expected 4096 or 16384)");
        }
        Ok(Self {
            detector,
            gps_start,
            sample_rate,
            samples,
        })
    }

    pub fn read(path: &Path) -> Result<Self, CliError> {
        let text = fs::read_to_string(path)
            .map_err(|e| CliError::Data(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text, &path.display().to_string())
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        if let Some(d) = &self.detector {
            let _ = writeln!(out, "# detector = {d}");
        }
        if let Some(g) = self.gps_start {
            let _ = writeln!(out, "# gps_start = {g}");
        }
        let _ = writeln!(out, "# sample_rate_hz = {}", self.sample_rate);
        for v in &self.samples {
            out.push_str(&format_sample(*v));
            out.push('\n');
        }
        out
    }

    pub fn write(&self, path: &Path) -> Result<(), CliError> {
        if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
            fs::create_dir_all(parent)
                .map_err(|e| CliError::Data(format!("cannot create {}: {e}", parent.display())))?;
        }
        fs::write(path, self.to_text()).map_err(|e| CliError::Data(format!("cannot write {}: {e}", path.display())))
    }

    pub fn series(&self) -> Result<StrainSeries, CliError> {
        Ok(StrainSeries::new(self.sample_rate, self.samples.clone())?)
    }

    /// Same header, new samples.
    pub fn with_samples(&self, samples: Vec<f64>) -> Self {
        Self {
            samples,
            ..self.clone()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const SAMPLE: &str = "# detector = L1\n# gps_start = 1126259446.5\n# sample_rate_hz = 4096\n1.5e-21\n-2e-21\n\n3.25e-22\n";

    #[test]
    fn parses_headers_and_samples() {
        let f = StrainFile::parse(SAMPLE, "t").unwrap();
        assert_eq!(f.detector.as_deref(), Some("L1"));
        assert_eq!(f.gps_start, Some(1126259446.5));
        assert_eq!(f.sample_rate, 4096.0);
        assert_eq!(f.samples, vec![1.5e-21, -2e-21, 3.25e-22]);
    }

    #[test]
    fn text_round_trip_is_exact() {
        let f = StrainFile::parse(SAMPLE, "t").unwrap();
        let g = StrainFile::parse(&f.to_text(), "t").unwrap();
        assert_eq!(f, g);
        assert_eq!(g.to_text(), f.to_text());
    }

    #[test]
    fn malformed_sample_names_its_line() {
        let text = "# sample_rate_hz = 4096\n1.0\n2.0\n3,5\n";
        let err = StrainFile::parse(text, "x.txt").unwrap_err();
        assert!(matches!(err, CliError::Data(_)));
        assert!(err.to_string().contains("line 4"), "{err}");
    }

    #[test]
    fn rejections() {
        for text in [
            "1.0\n2.0\n",
            "# sample_rate_hz = 4096\n",
            "# sample_rate_hz = -5\n1.0\n",
            "# sample_rate_hz = 4096\nnan\n",
            "# sample_rate_hz = 4096\n1.0\n# detector = H1\n",
            "# sample_rate_hz = 4096\n# gps_start = soon\n1.0\n",
        ] {
            assert!(matches!(StrainFile::parse(text, "t"), Err(CliError::Data(_))), "{text:?}");
        }
    }

    #[test]
    fn unusual_rate_still_loads() {
        let f = StrainFile::parse("# sample_rate_hz = 1024\n0.5\n", "t").unwrap();
        assert_eq!(f.sample_rate, 1024.0);
    }
}
