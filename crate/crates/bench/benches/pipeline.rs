use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use gwsae_core::autoencoder::loss_and_gradients;
use gwsae_core::{
    generate_chirp, project, welch_asd, Activation, AutoencoderModel, BinaryParams, DetectorConfig, DetectorName,
    Objective, StrainSeries,
};
use ndarray::Array2;

fn chirp(c: &mut Criterion) {
    let params = BinaryParams::with_masses(36.0, 29.0).unwrap();
    let h1 = DetectorConfig::default_for(DetectorName::H1);
    c.bench_function("chirp_36_29_4096hz", |b| {
        b.iter(|| project(&generate_chirp(black_box(&params), 4096.0).unwrap(), &h1))
    });
}

fn gradients(c: &mut Criterion) {
    let (n, d, h) = (40, 256, 64);
    let batch = Array2::from_shape_fn((n, d), |(i, j)| ((i * 31 + j * 17) % 97) as f64 / 97.0);
    let objective = Objective::new(0.001, 0.004, 0.05);
    for decoder in [Activation::Linear, Activation::Logsig] {
        let model = AutoencoderModel::init(d, h, decoder, 1);
        c.bench_function(&format!("loss_and_gradients_{decoder}_40x256_h64"), |b| {
            b.iter(|| loss_and_gradients(black_box(&model), batch.view(), &objective).unwrap())
        });
    }
}

fn welch(c: &mut Criterion) {
    let values: Vec<f64> = (0..10 * 4096).map(|i| ((i * 7919) % 4093) as f64 / 4093.0 - 0.5).collect();
    let series = StrainSeries::new(4096.0, values).unwrap();
    c.bench_function("welch_10s_4096hz", |b| b.iter(|| welch_asd(black_box(&series), 1.0, 0.5).unwrap()));
}

criterion_group!(benches, chirp, gradients, welch);
criterion_main!(benches);
