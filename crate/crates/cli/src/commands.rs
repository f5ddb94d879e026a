use std::fs;
use std::io::Write;
use std::path::Path;
use std::time::Instant;

use gwsae_core::bank::ExportSummary;
use gwsae_core::{
    build_bank, denoise, export_bank, import_bank, load_model, oracle_snr_db, residual_snr_db, save_model,
    snr_gain_db, train, welch_asd, Decibels, TrainingTrace,
};

use crate::config::PipelineConfig;
use crate::error::CliError;
use crate::strain_file::StrainFile;

pub const TRACE_FILE: &str = "trace.csv";
pub const INPUT_ASD_FILE: &str = "input_asd.csv";
pub const DENOISED_ASD_FILE: &str = "denoised_asd.csv";
pub const CLEAN_ASD_FILE: &str = "clean_asd.csv";

fn emit(out: &mut dyn Write, line: std::fmt::Arguments) -> Result<(), CliError> {
    out.write_fmt(line)
        .and_then(|_| out.write_all(b"\n"))
        .map_err(|e| CliError::Data(format!("cannot write output: {e}")))
}

fn ensure_parent(path: &Path) -> Result<(), CliError> {
    match path.parent().filter(|p| !p.as_os_str().is_empty()) {
        Some(parent) => fs::create_dir_all(parent)
            .map_err(|e| CliError::Data(format!("cannot create {}: {e}", parent.display()))),
        None => Ok(()),
    }
}

fn write_text(path: &Path, text: &str) -> Result<(), CliError> {
    ensure_parent(path)?;
    fs::write(path, text).map_err(|e| CliError::Data(format!("cannot write {}: {e}", path.display())))
}

pub fn cmd_bank(cfg: &PipelineConfig, out: &mut dyn Write) -> Result<ExportSummary, CliError> {
    let start = Instant::now();
    let mut bank = build_bank(&cfg.grid)?;
    if let Some(len) = cfg.pad_length {
        if len < bank.length {
            return Err(CliError::Config(format!(
                "grid.pad_length {len} is shorter than the longest template ({} samples)",
                bank.length
            )));
        }
        bank.pad_to(len)?;
    }
    let summary = export_bank(&bank, &cfg.paths.bank_dir)?;
    emit(out, format_args!("templates: {}", summary.count))?;
    emit(out, format_args!("length: {}", summary.length))?;
    emit(out, format_args!("bank: {}", cfg.paths.bank_dir.display()))?;
    emit(out, format_args!("elapsed: {:.2} s", start.elapsed().as_secs_f64()))?;
    Ok(summary)
}

pub fn cmd_train(cfg: &PipelineConfig, out: &mut dyn Write) -> Result<TrainingTrace, CliError> {
    let bank = import_bank(&cfg.paths.bank_dir)?;
    log::info!(
        "training on {} templates of length {} for {} epochs",
        bank.len(),
        bank.length,
        cfg.training.max_epochs
    );
    let (model, trace) = train(&bank, &cfg.training)?;
    ensure_parent(&cfg.paths.model)?;
    save_model(&model, &cfg.paths.model)?;
    let trace_path = cfg.paths.output_dir.join(TRACE_FILE);
    write_text(&trace_path, &trace.to_csv())?;
    if let (Some(first), Some(last)) = (trace.records.first(), trace.records.last()) {
        emit(out, format_args!("epochs: {}", trace.len()))?;
        emit(out, format_args!("loss: {:.6e} -> {:.6e}", first.total, last.total))?;
    }
    emit(out, format_args!("model: {}", cfg.paths.model.display()))?;
    emit(out, format_args!("trace: {}", trace_path.display()))?;
    Ok(trace)
}

pub fn cmd_denoise(model_path: &Path, input: &Path, output: &Path, out: &mut dyn Write) -> Result<(), CliError> {
    let model = load_model(model_path)?;
    let file = StrainFile::read(input)?;
    let cleaned = denoise(&model, &file.series()?)?;
    file.with_samples(cleaned.values).write(output)?;
    emit(out, format_args!("denoised {} samples -> {}", file.samples.len(), output.display()))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvalReport {
    pub residual_snr_db: Decibels,
    pub input_snr_db: Option<Decibels>,
    pub oracle_snr_db: Option<Decibels>,
    pub gain_db: Option<Decibels>,
}

fn same_shape(a: &StrainFile, b: &StrainFile, what: &str) -> Result<(), CliError> {
    if a.samples.len() != b.samples.len() {
        return Err(CliError::Data(format!(
            "{what} has {} samples but the input has {}",
            b.samples.len(),
            a.samples.len()
        )));
    }
    if a.sample_rate != b.sample_rate {
        return Err(CliError::Data(format!(
            "{what} is sampled at {} Hz but the input at {} Hz",
            b.sample_rate, a.sample_rate
        )));
    }
    Ok(())
}

fn write_spectrum(file: &StrainFile, path: &Path) -> Result<(), CliError> {
    let seconds = (file.samples.len() as f64 / file.sample_rate).min(1.0);
    let spectrum = welch_asd(&file.series()?, seconds, 0.5)?;
    write_text(path, &spectrum.to_csv())
}

pub fn cmd_eval(
    input: &Path,
    denoised: &Path,
    clean: Option<&Path>,
    output_dir: &Path,
    out: &mut dyn Write,
) -> Result<EvalReport, CliError> {
    let input = StrainFile::read(input)?;
    let denoised = StrainFile::read(denoised)?;
    same_shape(&input, &denoised, "denoised series")?;
    let clean = clean.map(StrainFile::read).transpose()?;
    if let Some(c) = &clean {
        same_shape(&input, c, "clean reference")?;
    }

    let mut report = EvalReport {
        residual_snr_db: residual_snr_db(&input.samples, &denoised.samples)?,
        input_snr_db: None,
        oracle_snr_db: None,
        gain_db: None,
    };
    emit(out, format_args!("residual_snr_db: {:.2}", report.residual_snr_db))?;
    if let Some(c) = &clean {
        let before = oracle_snr_db(&c.samples, &input.samples)?;
        let after = oracle_snr_db(&c.samples, &denoised.samples)?;
        let gain = snr_gain_db(&c.samples, &input.samples, &denoised.samples)?;
        emit(out, format_args!("input_snr_db: {before:.2}"))?;
        emit(out, format_args!("oracle_snr_db: {after:.2}"))?;
        emit(out, format_args!("snr_gain_db: {gain:.2}"))?;
        report.input_snr_db = Some(before);
        report.oracle_snr_db = Some(after);
        report.gain_db = Some(gain);
    }

    write_spectrum(&input, &output_dir.join(INPUT_ASD_FILE))?;
    write_spectrum(&denoised, &output_dir.join(DENOISED_ASD_FILE))?;
    if let Some(c) = &clean {
        write_spectrum(c, &output_dir.join(CLEAN_ASD_FILE))?;
    }
    emit(out, format_args!("spectra: {}", output_dir.display()))?;
    Ok(report)
}
