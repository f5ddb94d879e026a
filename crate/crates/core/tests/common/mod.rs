#![allow(dead_code)]

use gwsae_core::autoencoder::{gradients, Objective};
use gwsae_core::bank::{assemble_bank, GridEntry};
use gwsae_core::{
    denoise, snr_gain_db, train, Activation, AutoencoderModel, BinaryParams, Decibels,
    DetectorConfig, DetectorName, StrainSeries, TemplateBank, TrainingConfig, TrainingTrace,
};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

pub const DESK_SAMPLE_RATE: f64 = 1024.0;
pub const DESK_F_MIN: f64 = 35.0;
pub const DESK_LENGTH: usize = 256;
pub const DESK_HIDDEN: usize = 64;
pub const DESK_EPOCHS: usize = 200;
pub const DESK_SPARSITY_WEIGHT: f64 = 0.004;

fn entry(m1: f64, m2: f64) -> GridEntry {
    let mut params = BinaryParams::with_masses(m1, m2).unwrap();
    params.f_min = DESK_F_MIN;
    GridEntry {
        params,
        detector: DetectorConfig::default_for(DetectorName::H1),
    }
}

fn bank_from(entries: &[GridEntry]) -> TemplateBank {
    let mut bank = assemble_bank(entries, DESK_SAMPLE_RATE).unwrap();
    bank.pad_to(DESK_LENGTH).unwrap();
    bank
}

/// 40 H1 templates: m1 in 32..=41 step 1, m2 in 25..=28 step 1.
pub fn desk_bank() -> TemplateBank {
    let entries: Vec<_> = (0..10)
        .flat_map(|i| (0..4).map(move |j| entry(32.0 + i as f64, 25.0 + j as f64)))
        .collect();
    bank_from(&entries)
}

/// 20 off-grid templates strictly inside the training grid:
/// m1 in {32.5, 34.5, .., 40.5}, m2 in {25.4, 26.1, 26.8, 27.5}.
pub fn held_out_bank() -> TemplateBank {
    let entries: Vec<_> = (0..5)
        .flat_map(|i| (0..4).map(move |j| entry(32.5 + 2.0 * i as f64, 25.4 + 0.7 * j as f64)))
        .collect();
    bank_from(&entries)
}

pub fn desk_config(decoder: Activation) -> TrainingConfig {
    TrainingConfig {
        max_epochs: DESK_EPOCHS,
        hidden_dim: DESK_HIDDEN,
        decoder,
        seed: 7,
        sparsity_weight: DESK_SPARSITY_WEIGHT,
        ..TrainingConfig::default()
    }
}

pub fn train_desk(decoder: Activation) -> (AutoencoderModel, TrainingTrace) {
    train(&desk_bank(), &desk_config(decoder)).unwrap()
}

/// White Gaussian noise rescaled so its mean square equals that of `clean`.
pub fn matched_noise(clean: &[f64], seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let raw: Vec<f64> = (0..clean.len()).map(|_| StandardNormal.sample(&mut rng)).collect();
    let pc: f64 = clean.iter().map(|v| v * v).sum();
    let pn: f64 = raw.iter().map(|v| v * v).sum();
    let k = (pc / pn).sqrt();
    raw.iter().map(|v| k * v).collect()
}

/// Gains (dB) for every held-out injection at 0 dB input SNR.
pub fn injection_gains(model: &AutoencoderModel) -> Vec<f64> {
    held_out_bank()
        .templates
        .iter()
        .enumerate()
        .map(|(i, t)| {
            let clean = &t.series.values;
            let noise = matched_noise(clean, 1000 + i as u64);
            let noisy: Vec<f64> = clean.iter().zip(&noise).map(|(c, n)| c + n).collect();
            let input = StrainSeries::new(DESK_SAMPLE_RATE, noisy.clone()).unwrap();
            let out = denoise(model, &input).unwrap();
            match snr_gain_db(clean, &noisy, &out.values).unwrap() {
                Decibels::Finite(g) => g,
                other => panic!("unexpected sentinel gain {other:?}"),
            }
        })
        .collect()
}

pub fn mean(v: &[f64]) -> f64 {
    v.iter().sum::<f64>() / v.len() as f64
}

/// Prints a one-line verdict and returns whether it passed. Writes to the
/// stdout handle directly so the line shows up even under output capture.
pub fn report(id: &str, pass: bool, detail: impl std::fmt::Display) -> bool {
    use std::io::Write;
    let line = format!("[{}] {id}: {detail}\n", if pass { "PASS" } else { "FAIL" });
    let _ = std::io::stdout().lock().write_all(line.as_bytes());
    pass
}

/// Every weighted contribution to the objective, computed from scratch:
/// one reconstruction term per sample and feature, one L2 term per weight,
/// one sparsity term per hidden unit.
pub fn objective_terms(model: &AutoencoderModel, batch: ndarray::ArrayView2<f64>, obj: &Objective) -> Vec<f64> {
    let sig = |z: f64| 1.0 / (1.0 + (-z).exp());
    let (n, d) = batch.dim();
    let h = model.b_enc.len();
    let mut terms = Vec::new();
    let mut rho_hat = vec![0.0; h];
    for row in batch.rows() {
        let hidden: Vec<f64> = (0..h)
            .map(|i| sig(model.b_enc[i] + (0..d).map(|j| model.w_enc[[i, j]] * row[j]).sum::<f64>()))
            .collect();
        for (r, a) in rho_hat.iter_mut().zip(&hidden) {
            *r += a / n as f64;
        }
        for j in 0..d {
            let z = model.b_dec[j] + (0..h).map(|i| model.w_dec[[j, i]] * hidden[i]).sum::<f64>();
            let out = match model.decoder {
                Activation::Linear => z,
                Activation::Logsig => sig(z),
            };
            terms.push(obj.reconstruction_weight * (out - row[j]).powi(2) / (n * d) as f64);
        }
    }
    for w in model.w_enc.iter().chain(model.w_dec.iter()) {
        terms.push(obj.l2_weight * 0.5 * w * w);
    }
    let rho = obj.sparsity_target;
    for r in rho_hat {
        let r = r.clamp(1e-8, 1.0 - 1e-8);
        terms.push(obj.sparsity_weight * (rho * (rho / r).ln() + (1.0 - rho) * ((1.0 - rho) / (1.0 - r)).ln()));
    }
    terms
}

/// Central finite-difference check of `gradients`. The perturbed
/// objectives are differenced term by term before summing, so terms a
/// parameter does not touch cancel exactly. Returns the largest relative
/// error over every parameter, with denominators floored at 1e-8.
pub fn max_gradient_error(
    model: &AutoencoderModel,
    batch: ndarray::ArrayView2<f64>,
    objective: &Objective,
    step: f64,
) -> f64 {
    let analytic = gradients(model, batch, objective).unwrap();
    let mut worst = 0.0f64;
    let mut check = |a: f64, bump: &dyn Fn(&mut AutoencoderModel, f64)| {
        let mut up = model.clone();
        bump(&mut up, step);
        let mut down = model.clone();
        bump(&mut down, -step);
        let up = objective_terms(&up, batch, objective);
        let down = objective_terms(&down, batch, objective);
        let numeric = up.iter().zip(&down).map(|(u, d)| u - d).sum::<f64>() / (2.0 * step);
        let denom = a.abs().max(numeric.abs()).max(1e-8);
        worst = worst.max((a - numeric).abs() / denom);
    };
    for ((i, j), &a) in analytic.w_enc.indexed_iter() {
        check(a, &|m, s| m.w_enc[[i, j]] += s);
    }
    for (i, &a) in analytic.b_enc.indexed_iter() {
        check(a, &|m, s| m.b_enc[i] += s);
    }
    for ((i, j), &a) in analytic.w_dec.indexed_iter() {
        check(a, &|m, s| m.w_dec[[i, j]] += s);
    }
    for (i, &a) in analytic.b_dec.indexed_iter() {
        check(a, &|m, s| m.b_dec[i] += s);
    }
    worst
}
