mod common;

use common::*;
use gwsae_core::{denoise, train, Activation, StrainSeries, TrainingConfig};

fn rel_l2(a: &[f64], b: &[f64]) -> f64 {
    let num: f64 = a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum();
    let den: f64 = b.iter().map(|y| y * y).sum();
    (num / den).sqrt()
}

#[test]
fn desk_trace_has_one_record_per_epoch() {
    let (_, trace) = train_desk(Activation::Linear);
    assert_eq!(trace.len(), DESK_EPOCHS);
    assert_eq!(trace.to_csv().lines().count(), DESK_EPOCHS + 1);
}

#[test]
fn reconstructs_a_memorised_template() {
    let mut bank = desk_bank();
    bank.templates.truncate(1);
    let cfg = TrainingConfig { max_epochs: 400, ..desk_config(Activation::Linear) };
    let (model, trace) = train(&bank, &cfg).unwrap();
    let t = &bank.templates[0].series;
    let err = rel_l2(&denoise(&model, t).unwrap().values, &t.values);
    let last = trace.records.last().unwrap();
    assert!(err < 0.2, "relative error {err}, final mse {}", last.mse);
}

#[test]
fn long_series_keeps_its_length() {
    let (model, _) = train_desk(Activation::Linear);
    let clean = &desk_bank().templates[3].series.values;
    let noise = matched_noise(&vec![1.0; 40_960], 5);
    let mut values = noise.clone();
    values[1000..1000 + clean.len()]
        .iter_mut()
        .zip(clean)
        .for_each(|(v, c)| *v += c * 1e21);
    let out = denoise(&model, &StrainSeries::new(4096.0, values).unwrap()).unwrap();
    assert_eq!(out.len(), 40_960);
    assert!(out.values.iter().all(|v| v.is_finite()));
}

#[test]
fn dc_offset_input_stays_finite() {
    let (model, _) = train_desk(Activation::Logsig);
    let t = &desk_bank().templates[0].series;
    let shifted: Vec<f64> = t.values.iter().map(|v| v + 3e-21).collect();
    let out = denoise(&model, &StrainSeries::new(t.sample_rate, shifted).unwrap()).unwrap();
    assert_eq!(out.len(), t.len());
    assert!(out.values.iter().all(|v| v.is_finite()));
}

#[test]
fn held_out_bank_lies_inside_the_grid() {
    let train = desk_bank();
    let held = held_out_bank();
    assert_eq!(held.len(), 20);
    assert_eq!(held.length, train.length);
    let inside = |m: f64, lo: f64, hi: f64| m > lo && m < hi;
    for t in &held.templates {
        assert!(inside(t.meta.m1, 32.0, 41.0) && inside(t.meta.m2, 25.0, 28.0));
        assert!(train.templates.iter().all(|s| (s.meta.m1, s.meta.m2) != (t.meta.m1, t.meta.m2)));
    }
}
