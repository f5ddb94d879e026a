use super::AutoencoderModel;
use crate::bank::ScaleRecord;
use crate::detector::StrainSeries;
use crate::error::Result;

/// Anything that maps a scaled input window to a scaled reconstruction of
/// the same length.
pub trait Reconstruct {
    fn input_dim(&self) -> usize;
    fn reconstruct(&self, scaled: &[f64]) -> Result<Vec<f64>>;
}

impl Reconstruct for AutoencoderModel {
    fn input_dim(&self) -> usize {
        AutoencoderModel::input_dim(self)
    }

    fn reconstruct(&self, scaled: &[f64]) -> Result<Vec<f64>> {
        self.forward(scaled).map(|(_, out)| out)
    }
}

/// Runs `series` through the model window by window.
///
/// The series is cut into consecutive non-overlapping windows of
/// `input_dim` samples; a short final window is zero-padded before
/// reconstruction and truncated afterwards. Each window is min-max scaled by
/// its own range and the reconstruction is mapped back with the same record.
pub fn denoise<M: Reconstruct + ?Sized>(model: &M, series: &StrainSeries) -> Result<StrainSeries> {
    let dim = model.input_dim();
    let mut values = Vec::with_capacity(series.len());
    let mut window = vec![0.0; dim];
    for chunk in series.values.chunks(dim) {
        window[..chunk.len()].copy_from_slice(chunk);
        window[chunk.len()..].fill(0.0);
        let record = ScaleRecord::from_values(&window)?;
        let scaled: Vec<f64> = window.iter().map(|v| record.scale(*v)).collect();
        let out = model.reconstruct(&scaled)?;
        values.extend(out[..chunk.len()].iter().map(|v| record.unscale(*v)));
    }
    let mut denoised = StrainSeries::new(series.sample_rate, values)?;
    denoised.label = series.label.clone();
    Ok(denoised)
}
