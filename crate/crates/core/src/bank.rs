//! Template bank construction and its on-disk text format.
//!
//! A bank is the Cartesian product of a primary-mass axis, a secondary-mass
//! axis and a set of detectors. Every template is generated with
//! [`generate_chirp`], projected onto its detector, and right-padded with
//! zeros to the length of the longest template so that all start times are
//! preserved.
//!
//! With the default GW150914 grid (m1 in [32, 41], m2 in [25, 33], step 0.5,
//! three detectors) the bank holds 19 x 17 x 3 = 969 templates. Banks built
//! with three waveform families over the same grid would hold 2907; the
//! 2261-template figure sometimes quoted for this parameter space comes from
//! pruning that cannot be reconstructed from the grid alone, so this bank
//! does not try to match it.
//!
//! # On-disk layout
//!
//! `manifest.txt`:
//!
//! ```text
//! count = 969
//! length = 4208
//! sample_rate_hz = 4096
//! template_00000.txt
//! ...
//! ```
//!
//! Each template file starts with `# key = value` header lines for `m1`,
//! `m2`, `spin1`, `spin2`, `detector`, `sample_rate_hz`, `raw_length` and
//! `padded_length`, followed by one sample per line with 17 significant
//! digits.

use std::fs;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use rayon::prelude::*;

use crate::chirp::{generate_chirp, BinaryParams, DEFAULT_DISTANCE_MPC, DEFAULT_F_MIN};
use crate::detector::{project, DetectorConfig, DetectorName, SeriesLabel, StrainSeries};
use crate::error::{Error, Result};
use crate::format::{format_sample, parse_key_value};

pub const MANIFEST_FILE: &str = "manifest.txt";

/// Slack on the upper end of a grid axis so that `min + k * step` lands on
/// an inclusive endpoint despite rounding.
const GRID_ENDPOINT_SLACK: f64 = 1e-9;

/// Parameter grid for a bank.
#[derive(Debug, Clone, PartialEq)]
pub struct GridSpec {
    pub m1_min: f64,
    pub m1_max: f64,
    pub m2_min: f64,
    pub m2_max: f64,
    pub step: f64,
    pub spin1: f64,
    pub spin2: f64,
    pub detectors: Vec<DetectorConfig>,
    pub sample_rate: f64,
    pub f_min: f64,
    /// Luminosity distance [Mpc].
    pub distance: f64,
    pub inclination: f64,
}

impl Default for GridSpec {
    fn default() -> Self {
        Self {
            m1_min: 32.0,
            m1_max: 41.0,
            m2_min: 25.0,
            m2_max: 33.0,
            step: 0.5,
            spin1: 0.7,
            spin2: 0.9,
            detectors: DetectorName::ALL
                .iter()
                .map(|d| DetectorConfig::default_for(*d))
                .collect(),
            sample_rate: 4096.0,
            f_min: DEFAULT_F_MIN,
            distance: DEFAULT_DISTANCE_MPC,
            inclination: 0.0,
        }
    }
}

impl GridSpec {
    pub fn validate(&self) -> Result<()> {
        let finite = [
            self.m1_min,
            self.m1_max,
            self.m2_min,
            self.m2_max,
            self.step,
            self.sample_rate,
        ];
        if finite.iter().any(|v| !v.is_finite()) {
            return Err(Error::Config("grid values must be finite".into()));
        }
        if !(self.step > 0.0) {
            return Err(Error::Config(format!("grid step must be positive, got {}", self.step)));
        }
        if self.m1_min > self.m1_max || self.m2_min > self.m2_max {
            return Err(Error::Config(format!(
                "empty mass range: m1 [{}, {}], m2 [{}, {}]",
                self.m1_min, self.m1_max, self.m2_min, self.m2_max
            )));
        }
        if self.detectors.is_empty() {
            return Err(Error::Config("at least one detector is required".into()));
        }
        let mut names: Vec<_> = self.detectors.iter().map(|d| d.name).collect();
        names.sort();
        names.dedup();
        if names.len() != self.detectors.len() {
            return Err(Error::Config("detectors must be distinct".into()));
        }
        Ok(())
    }
}

fn axis(min: f64, max: f64, step: f64) -> Vec<f64> {
    (0u32..)
        .map(|k| min + f64::from(k) * step)
        .take_while(|v| *v <= max + GRID_ENDPOINT_SLACK)
        .collect()
}

/// One grid point: a source and the detector it is observed by.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridEntry {
    pub params: BinaryParams,
    pub detector: DetectorConfig,
}

/// Expands the grid in bank order: m1 ascending, then m2 ascending, then
/// detector in H1 < L1 < V1 order.
pub fn build_grid(spec: &GridSpec) -> Result<Vec<GridEntry>> {
    spec.validate()?;
    let m1_axis = axis(spec.m1_min, spec.m1_max, spec.step);
    let m2_axis = axis(spec.m2_min, spec.m2_max, spec.step);
    if m1_axis.is_empty() || m2_axis.is_empty() {
        return Err(Error::Config("grid has no points".into()));
    }
    let mut detectors = spec.detectors.clone();
    detectors.sort_by_key(|d| d.name);

    let mut entries = Vec::with_capacity(m1_axis.len() * m2_axis.len() * detectors.len());
    for &m1 in &m1_axis {
        for &m2 in &m2_axis {
            let params = BinaryParams::new(
                m1,
                m2,
                spec.spin1,
                spec.spin2,
                spec.distance,
                spec.inclination,
                spec.f_min,
            )?;
            for detector in &detectors {
                entries.push(GridEntry {
                    params,
                    detector: *detector,
                });
            }
        }
    }
    Ok(entries)
}

/// Min-max scaling record: `scaled = (x - offset) / range`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScaleRecord {
    pub offset: f64,
    pub range: f64,
}

impl ScaleRecord {
    /// Fails with [`Error::DegenerateInput`] on empty or constant data.
    pub fn from_values(values: &[f64]) -> Result<Self> {
        let (lo, hi) = values
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| {
                (lo.min(*v), hi.max(*v))
            });
        let range = hi - lo;
        if !(range > 0.0) || !range.is_finite() {
            return Err(Error::DegenerateInput(format!(
                "values span [{lo}, {hi}] and cannot be scaled to [0, 1]"
            )));
        }
        Ok(Self { offset: lo, range })
    }

    pub fn scale(&self, x: f64) -> f64 {
        (x - self.offset) / self.range
    }

    pub fn unscale(&self, y: f64) -> f64 {
        y * self.range + self.offset
    }
}

/// Per-template metadata carried through export/import.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TemplateMeta {
    pub m1: f64,
    pub m2: f64,
    pub spin1: f64,
    pub spin2: f64,
    pub detector: DetectorName,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Template {
    pub meta: TemplateMeta,
    /// Sample count before padding.
    pub raw_length: usize,
    /// Padded strain, `bank.length` samples.
    pub series: StrainSeries,
    pub scale: ScaleRecord,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TemplateBank {
    pub sample_rate: f64,
    /// Common padded length of every template.
    pub length: usize,
    pub templates: Vec<Template>,
}

impl TemplateBank {
    pub fn len(&self) -> usize {
        self.templates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.templates.is_empty()
    }

    /// Zero-pads every template further to `length` samples.
    pub fn pad_to(&mut self, length: usize) -> Result<()> {
        if length < self.length {
            return Err(Error::Config(format!(
                "cannot pad a bank of length {} down to {length}",
                self.length
            )));
        }
        for t in &mut self.templates {
            t.series.values.resize(length, 0.0);
            t.scale = ScaleRecord::from_values(&t.series.values)?;
        }
        self.length = length;
        Ok(())
    }

    /// Every template scaled to `[0, 1]` with its own scale record.
    pub fn scaled_rows(&self) -> Vec<Vec<f64>> {
        self.templates
            .iter()
            .map(|t| t.series.values.iter().map(|v| t.scale.scale(*v)).collect())
            .collect()
    }
}

fn template_from_series(meta: TemplateMeta, mut series: StrainSeries, length: usize) -> Result<Template> {
    let raw_length = series.values.len();
    series.values.resize(length, 0.0);
    let scale = ScaleRecord::from_values(&series.values).map_err(|e| Error::UnviableTemplate {
        m1: meta.m1,
        m2: meta.m2,
        reason: e.to_string(),
    })?;
    series.label = SeriesLabel {
        detector: Some(meta.detector),
        m1: Some(meta.m1),
        m2: Some(meta.m2),
    };
    Ok(Template {
        meta,
        raw_length,
        series,
        scale,
    })
}

/// Generates, projects and pads every entry. Generation runs on the current
/// rayon pool; results are merged in entry order so the bank does not depend
/// on the number of threads.
pub fn assemble_bank(entries: &[GridEntry], sample_rate: f64) -> Result<TemplateBank> {
    if entries.is_empty() {
        return Err(Error::Config("cannot assemble an empty bank".into()));
    }
    let projected: Vec<Result<StrainSeries>> = entries
        .par_iter()
        .map(|e| generate_chirp(&e.params, sample_rate).map(|w| project(&w, &e.detector)))
        .collect();
    let projected = projected.into_iter().collect::<Result<Vec<_>>>()?;

    let length = projected.iter().map(StrainSeries::len).max().unwrap_or(0);
    let templates = entries
        .iter()
        .zip(projected)
        .map(|(e, series)| {
            let meta = TemplateMeta {
                m1: e.params.m1,
                m2: e.params.m2,
                spin1: e.params.spin1,
                spin2: e.params.spin2,
                detector: e.detector.name,
            };
            template_from_series(meta, series, length)
        })
        .collect::<Result<Vec<_>>>()?;

    Ok(TemplateBank {
        sample_rate,
        length,
        templates,
    })
}

/// `build_grid` followed by `assemble_bank` at the grid's sample rate.
pub fn build_bank(spec: &GridSpec) -> Result<TemplateBank> {
    let entries = build_grid(spec)?;
    assemble_bank(&entries, spec.sample_rate)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExportSummary {
    pub count: usize,
    pub length: usize,
    pub manifest: PathBuf,
    pub files_written: usize,
}

fn template_file_name(index: usize) -> String {
    format!("template_{index:05}.txt")
}

fn write_file(path: &Path, body: impl FnOnce(&mut BufWriter<fs::File>) -> std::io::Result<()>) -> Result<()> {
    let file = fs::File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = BufWriter::new(file);
    body(&mut w).and_then(|_| w.flush()).map_err(|e| Error::io(path, e))
}

/// Writes one text file per template plus `manifest.txt` into `dir`.
pub fn export_bank(bank: &TemplateBank, dir: &Path) -> Result<ExportSummary> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let names: Vec<String> = (0..bank.len()).map(template_file_name).collect();

    for (t, name) in bank.templates.iter().zip(&names) {
        write_file(&dir.join(name), |w| {
            writeln!(w, "# m1 = {}", t.meta.m1)?;
            writeln!(w, "# m2 = {}", t.meta.m2)?;
            writeln!(w, "# spin1 = {}", t.meta.spin1)?;
            writeln!(w, "# spin2 = {}", t.meta.spin2)?;
            writeln!(w, "# detector = {}", t.meta.detector)?;
            writeln!(w, "# sample_rate_hz = {}", bank.sample_rate)?;
            writeln!(w, "# raw_length = {}", t.raw_length)?;
            writeln!(w, "# padded_length = {}", bank.length)?;
            for v in &t.series.values {
                writeln!(w, "{}", format_sample(*v))?;
            }
            Ok(())
        })?;
    }

    let manifest = dir.join(MANIFEST_FILE);
    write_file(&manifest, |w| {
        writeln!(w, "count = {}", bank.len())?;
        writeln!(w, "length = {}", bank.length)?;
        writeln!(w, "sample_rate_hz = {}", bank.sample_rate)?;
        for name in &names {
            writeln!(w, "{name}")?;
        }
        Ok(())
    })?;

    Ok(ExportSummary {
        count: bank.len(),
        length: bank.length,
        manifest,
        files_written: bank.len() + 1,
    })
}

fn read_text(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::io(path, e))
}

fn parse_number<T: std::str::FromStr>(path: &Path, key: &str, raw: &str) -> Result<T> {
    raw.parse()
        .map_err(|_| Error::corrupt(path, format!("invalid value {raw:?} for {key}")))
}

struct Manifest {
    count: usize,
    length: usize,
    sample_rate: f64,
    files: Vec<String>,
}

fn read_manifest(path: &Path) -> Result<Manifest> {
    let text = read_text(path)?;
    let mut lines = text.lines().filter(|l| !l.trim().is_empty());
    let mut header = |key: &str| -> Result<String> {
        let line = lines
            .next()
            .ok_or_else(|| Error::corrupt(path, format!("missing `{key}` line")))?;
        match parse_key_value(line) {
            Some((k, v)) if k == key => Ok(v.to_string()),
            _ => Err(Error::corrupt(path, format!("expected `{key} = ...`, found {line:?}"))),
        }
    };
    let count = header("count")?;
    let length = header("length")?;
    let rate = header("sample_rate_hz")?;
    let manifest = Manifest {
        count: parse_number(path, "count", &count)?,
        length: parse_number(path, "length", &length)?,
        sample_rate: parse_number(path, "sample_rate_hz", &rate)?,
        files: lines.map(|l| l.trim().to_string()).collect(),
    };
    if manifest.files.len() != manifest.count {
        return Err(Error::corrupt(
            path,
            format!(
                "manifest declares {} templates but lists {}",
                manifest.count,
                manifest.files.len()
            ),
        ));
    }
    if !(manifest.sample_rate > 0.0 && manifest.sample_rate.is_finite()) {
        return Err(Error::corrupt(path, "sample_rate_hz must be positive"));
    }
    Ok(manifest)
}

fn read_template(path: &Path, manifest: &Manifest) -> Result<Template> {
    let text = read_text(path)?;
    let mut m1 = None;
    let mut m2 = None;
    let mut spin1 = None;
    let mut spin2 = None;
    let mut detector = None;
    let mut rate = None;
    let mut raw_length = None;
    let mut padded_length = None;
    let mut values = Vec::with_capacity(manifest.length);

    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        if let Some(rest) = line.strip_prefix('#') {
            let (k, v) = parse_key_value(rest)
                .ok_or_else(|| Error::corrupt(path, format!("line {}: malformed header", lineno + 1)))?;
            match k {
                "m1" => m1 = Some(parse_number::<f64>(path, k, v)?),
                "m2" => m2 = Some(parse_number::<f64>(path, k, v)?),
                "spin1" => spin1 = Some(parse_number::<f64>(path, k, v)?),
                "spin2" => spin2 = Some(parse_number::<f64>(path, k, v)?),
                "detector" => detector = Some(v.parse::<DetectorName>()?),
                "sample_rate_hz" => rate = Some(parse_number::<f64>(path, k, v)?),
                "raw_length" => raw_length = Some(parse_number::<usize>(path, k, v)?),
                "padded_length" => padded_length = Some(parse_number::<usize>(path, k, v)?),
                other => {
                    return Err(Error::corrupt(path, format!("unknown header key {other:?}")));
                }
            }
            continue;
        }
        let v: f64 = line
            .parse()
            .map_err(|_| Error::corrupt(path, format!("line {}: invalid sample {line:?}", lineno + 1)))?;
        if !v.is_finite() {
            return Err(Error::corrupt(path, format!("line {}: non-finite sample", lineno + 1)));
        }
        values.push(v);
    }

    let missing = |key: &str| Error::corrupt(path, format!("missing header `{key}`"));
    let meta = TemplateMeta {
        m1: m1.ok_or_else(|| missing("m1"))?,
        m2: m2.ok_or_else(|| missing("m2"))?,
        spin1: spin1.ok_or_else(|| missing("spin1"))?,
        spin2: spin2.ok_or_else(|| missing("spin2"))?,
        detector: detector.ok_or_else(|| missing("detector"))?,
    };
    let rate = rate.ok_or_else(|| missing("sample_rate_hz"))?;
    let raw_length = raw_length.ok_or_else(|| missing("raw_length"))?;
    let padded_length = padded_length.ok_or_else(|| missing("padded_length"))?;

    if rate != manifest.sample_rate {
        return Err(Error::corrupt(
            path,
            format!("sample rate {rate} differs from manifest {}", manifest.sample_rate),
        ));
    }
    if padded_length != manifest.length || values.len() != manifest.length {
        return Err(Error::corrupt(
            path,
            format!(
                "length mismatch: header {padded_length}, samples {}, manifest {}",
                values.len(),
                manifest.length
            ),
        ));
    }
    if raw_length > padded_length {
        return Err(Error::corrupt(path, "raw_length exceeds padded_length"));
    }
    if values[raw_length..].iter().any(|v| *v != 0.0) {
        return Err(Error::corrupt(path, "padding region contains non-zero samples"));
    }
    let scale = ScaleRecord::from_values(&values).map_err(|e| Error::corrupt(path, e.to_string()))?;
    let series = StrainSeries::new(rate, values)?.with_label(SeriesLabel {
        detector: Some(meta.detector),
        m1: Some(meta.m1),
        m2: Some(meta.m2),
    });
    Ok(Template {
        meta,
        raw_length,
        series,
        scale,
    })
}

/// Reads a bank written by [`export_bank`], validating every invariant.
pub fn import_bank(dir: &Path) -> Result<TemplateBank> {
    let manifest = read_manifest(&dir.join(MANIFEST_FILE))?;
    if manifest.count == 0 {
        return Err(Error::corrupt(dir.join(MANIFEST_FILE), "bank is empty"));
    }
    let templates = manifest
        .files
        .iter()
        .map(|name| read_template(&dir.join(name), &manifest))
        .collect::<Result<Vec<_>>>()?;
    Ok(TemplateBank {
        sample_rate: manifest.sample_rate,
        length: manifest.length,
        templates,
    })
}
