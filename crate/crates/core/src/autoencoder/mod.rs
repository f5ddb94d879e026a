//! Single-hidden-layer sparse autoencoder.
//!
//! The encoder is `h = logsig(W_enc x + b_enc)` and the decoder is
//! `x_hat = act(W_dec h + b_dec)` with `act` either identity or logsig.
//! The objective over a batch of `n` rows of dimension `d` is
//!
//! ```text
//! total = mse + l2_weight * 0.5 * (|W_enc|^2 + |W_dec|^2)
//!             + sparsity_weight * sum_i KL(rho || rho_hat_i)
//! ```
//!
//! where `mse` averages over all `n * d` entries and `rho_hat` is the
//! batch-mean hidden activation. Biases carry no weight penalty.

mod denoise;
mod io;
mod train;

use std::fmt;
use std::str::FromStr;

use ndarray::{Array1, Array2, ArrayView2, Axis};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

pub use denoise::{denoise, Reconstruct};
pub use io::{load_model, model_from_text, model_to_text, save_model, MODEL_MAGIC};
pub use train::{train, train_rows, train_rows_with, EpochRecord, TrainingConfig, TrainingTrace};

/// Lower/upper clamp applied to `rho_hat` before the KL penalty.
pub const RHO_HAT_CLAMP: f64 = 1e-8;

/// Logistic sigmoid, evaluated without overflow for any finite input.
pub fn logsig(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

/// Identity transfer function.
pub fn purelin(x: f64) -> f64 {
    x
}

/// Decoder transfer function.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Activation {
    Linear,
    Logsig,
}

impl Activation {
    pub fn apply(self, x: f64) -> f64 {
        match self {
            Activation::Linear => purelin(x),
            Activation::Logsig => logsig(x),
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Activation::Linear => "linear",
            Activation::Logsig => "logsig",
        }
    }
}

impl fmt::Display for Activation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Activation {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "linear" | "purelin" => Ok(Activation::Linear),
            "logsig" => Ok(Activation::Logsig),
            other => Err(Error::Config(format!(
                "unknown decoder activation {other:?}, expected linear or logsig"
            ))),
        }
    }
}

/// Encoder/decoder parameters. The encoder activation is always logsig.
#[derive(Debug, Clone, PartialEq)]
pub struct AutoencoderModel {
    /// `hidden x input`
    pub w_enc: Array2<f64>,
    pub b_enc: Array1<f64>,
    /// `input x hidden`
    pub w_dec: Array2<f64>,
    pub b_dec: Array1<f64>,
    pub decoder: Activation,
}

impl AutoencoderModel {
    /// All-zero parameters.
    pub fn zeros(input_dim: usize, hidden_dim: usize, decoder: Activation) -> Self {
        Self {
            w_enc: Array2::zeros((hidden_dim, input_dim)),
            b_enc: Array1::zeros(hidden_dim),
            w_dec: Array2::zeros((input_dim, hidden_dim)),
            b_dec: Array1::zeros(input_dim),
            decoder,
        }
    }

    /// Glorot-uniform weights on `[-sqrt(6/(d+h)), sqrt(6/(d+h))]`, zero
    /// biases. `W_enc` is drawn first, then `W_dec`, both row-major.
    pub fn init(input_dim: usize, hidden_dim: usize, decoder: Activation, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let limit = (6.0 / (input_dim + hidden_dim) as f64).sqrt();
        let mut model = Self::zeros(input_dim, hidden_dim, decoder);
        for w in model.w_enc.iter_mut().chain(model.w_dec.iter_mut()) {
            *w = rng.random_range(-limit..=limit);
        }
        model
    }

    /// Assembles a model from parts, checking shapes and finiteness.
    pub fn from_parts(
        w_enc: Array2<f64>,
        b_enc: Array1<f64>,
        w_dec: Array2<f64>,
        b_dec: Array1<f64>,
        decoder: Activation,
    ) -> Result<Self> {
        let (h, d) = w_enc.dim();
        let shape_err = |what: &str, expected: String, got: String| Error::Shape {
            expected: format!("{what} {expected}"),
            got,
        };
        if b_enc.len() != h {
            return Err(shape_err("b_enc", h.to_string(), b_enc.len().to_string()));
        }
        if w_dec.dim() != (d, h) {
            return Err(shape_err("W_dec", format!("{d}x{h}"), format!("{:?}", w_dec.dim())));
        }
        if b_dec.len() != d {
            return Err(shape_err("b_dec", d.to_string(), b_dec.len().to_string()));
        }
        let model = Self {
            w_enc,
            b_enc,
            w_dec,
            b_dec,
            decoder,
        };
        if !model.is_finite() {
            return Err(Error::Domain("model parameters must be finite".into()));
        }
        Ok(model)
    }

    pub fn input_dim(&self) -> usize {
        self.w_enc.ncols()
    }

    pub fn hidden_dim(&self) -> usize {
        self.w_enc.nrows()
    }

    pub fn is_finite(&self) -> bool {
        self.w_enc
            .iter()
            .chain(&self.b_enc)
            .chain(&self.w_dec)
            .chain(&self.b_dec)
            .all(|v| v.is_finite())
    }

    fn check_batch(&self, batch: ArrayView2<f64>) -> Result<()> {
        if batch.nrows() == 0 {
            return Err(Error::Domain("batch is empty".into()));
        }
        if batch.ncols() != self.input_dim() {
            return Err(Error::Shape {
                expected: format!("{} input columns", self.input_dim()),
                got: batch.ncols().to_string(),
            });
        }
        Ok(())
    }

    /// Hidden activations and reconstructions for every row of `batch`.
    pub fn forward_batch(&self, batch: ArrayView2<f64>) -> Result<(Array2<f64>, Array2<f64>)> {
        self.check_batch(batch)?;
        Ok(self.forward_unchecked(batch))
    }

    fn forward_unchecked(&self, batch: ArrayView2<f64>) -> (Array2<f64>, Array2<f64>) {
        let mut hidden = batch.dot(&self.w_enc.t()) + &self.b_enc;
        hidden.mapv_inplace(logsig);
        let mut out = hidden.dot(&self.w_dec.t()) + &self.b_dec;
        let act = self.decoder;
        out.mapv_inplace(|v| act.apply(v));
        (hidden, out)
    }

    /// `(h, x_hat)` for a single input vector.
    pub fn forward(&self, x: &[f64]) -> Result<(Vec<f64>, Vec<f64>)> {
        let row = ArrayView2::from_shape((1, x.len()), x).expect("contiguous slice");
        let (h, out) = self.forward_batch(row)?;
        Ok((h.into_raw_vec_and_offset().0, out.into_raw_vec_and_offset().0))
    }

    /// Batch mean of each hidden unit's activation.
    pub fn mean_activation(&self, batch: ArrayView2<f64>) -> Result<Array1<f64>> {
        let (h, _) = self.forward_batch(batch)?;
        Ok(mean_rows(&h))
    }

    /// `0.5 * sum w^2` over both weight matrices; biases excluded.
    pub fn l2_penalty(&self) -> f64 {
        0.5 * (self.w_enc.iter().map(|w| w * w).sum::<f64>()
            + self.w_dec.iter().map(|w| w * w).sum::<f64>())
    }
}

fn mean_rows(h: &Array2<f64>) -> Array1<f64> {
    h.sum_axis(Axis(0)) / h.nrows() as f64
}

fn clamp_rho_hat(r: f64) -> f64 {
    r.clamp(RHO_HAT_CLAMP, 1.0 - RHO_HAT_CLAMP)
}

/// `sum_i KL(Bernoulli(rho) || Bernoulli(rho_hat_i))`, with `rho_hat`
/// clamped away from 0 and 1.
pub fn kl_sparsity(rho: f64, rho_hat: &[f64]) -> f64 {
    rho_hat
        .iter()
        .map(|r| {
            let r = clamp_rho_hat(*r);
            rho * (rho / r).ln() + (1.0 - rho) * ((1.0 - rho) / (1.0 - r)).ln()
        })
        .sum()
}

/// Loss decomposition. `l2` and `sparsity` are the unweighted penalties;
/// `total = mse + l2_weight * l2 + sparsity_weight * sparsity`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LossBreakdown {
    pub total: f64,
    pub mse: f64,
    pub l2: f64,
    pub sparsity: f64,
}

/// Hyperparameters entering the objective.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Objective {
    pub l2_weight: f64,
    pub sparsity_weight: f64,
    pub sparsity_target: f64,
    /// Scales the reconstruction term; 1 in normal use.
    pub reconstruction_weight: f64,
}

impl Objective {
    pub fn new(l2_weight: f64, sparsity_weight: f64, sparsity_target: f64) -> Self {
        Self {
            l2_weight,
            sparsity_weight,
            sparsity_target,
            reconstruction_weight: 1.0,
        }
    }

    fn validate(&self) -> Result<()> {
        if !(self.sparsity_target > 0.0 && self.sparsity_target < 1.0) {
            return Err(Error::Config(format!(
                "sparsity target must lie in (0, 1), got {}",
                self.sparsity_target
            )));
        }
        if !(self.l2_weight >= 0.0) || !(self.sparsity_weight >= 0.0) {
            return Err(Error::Config("penalty weights must be non-negative".into()));
        }
        Ok(())
    }

    fn combine(&self, mse: f64, l2: f64, sparsity: f64) -> LossBreakdown {
        LossBreakdown {
            total: self.reconstruction_weight * mse
                + self.l2_weight * l2
                + self.sparsity_weight * sparsity,
            mse,
            l2,
            sparsity,
        }
    }
}

/// Parameter-shaped gradient of the objective.
#[derive(Debug, Clone, PartialEq)]
pub struct Gradients {
    pub w_enc: Array2<f64>,
    pub b_enc: Array1<f64>,
    pub w_dec: Array2<f64>,
    pub b_dec: Array1<f64>,
}

/// Evaluates the objective on `batch` (rows are samples in the scaled domain).
pub fn loss(model: &AutoencoderModel, batch: ArrayView2<f64>, objective: &Objective) -> Result<LossBreakdown> {
    objective.validate()?;
    let (hidden, out) = model.forward_batch(batch)?;
    Ok(loss_from_forward(model, batch, &hidden, &out, objective))
}

fn loss_from_forward(
    model: &AutoencoderModel,
    batch: ArrayView2<f64>,
    hidden: &Array2<f64>,
    out: &Array2<f64>,
    objective: &Objective,
) -> LossBreakdown {
    let count = batch.len() as f64;
    let mse = out
        .iter()
        .zip(batch.iter())
        .map(|(y, x)| (y - x) * (y - x))
        .sum::<f64>()
        / count;
    let rho_hat = mean_rows(hidden);
    let sparsity = kl_sparsity(objective.sparsity_target, rho_hat.as_slice().expect("contiguous"));
    objective.combine(mse, model.l2_penalty(), sparsity)
}

/// Loss and analytic gradients from a single forward pass.
pub fn loss_and_gradients(
    model: &AutoencoderModel,
    batch: ArrayView2<f64>,
    objective: &Objective,
) -> Result<(LossBreakdown, Gradients)> {
    objective.validate()?;
    let (hidden, out) = model.forward_batch(batch)?;
    let breakdown = loss_from_forward(model, batch, &hidden, &out, objective);

    let n = batch.nrows() as f64;
    let scale = 2.0 * objective.reconstruction_weight / batch.len() as f64;
    let mut d_pre_out = (&out - &batch) * scale;
    if model.decoder == Activation::Logsig {
        d_pre_out.zip_mut_with(&out, |g, y| *g *= y * (1.0 - y));
    }

    let g_w_dec = d_pre_out.t().dot(&hidden) + &model.w_dec * objective.l2_weight;
    let g_b_dec = d_pre_out.sum_axis(Axis(0));

    // dKL/drho_hat, spread over the batch through the 1/n of the mean.
    let rho = objective.sparsity_target;
    let kl_grad = mean_rows(&hidden).mapv(|r| {
        if !(RHO_HAT_CLAMP..=1.0 - RHO_HAT_CLAMP).contains(&r) {
            0.0
        } else {
            objective.sparsity_weight * (-rho / r + (1.0 - rho) / (1.0 - r)) / n
        }
    });
    let mut d_pre_hidden = d_pre_out.dot(&model.w_dec) + &kl_grad;
    d_pre_hidden.zip_mut_with(&hidden, |g, h| *g *= h * (1.0 - h));

    let g_w_enc = d_pre_hidden.t().dot(&batch) + &model.w_enc * objective.l2_weight;
    let g_b_enc = d_pre_hidden.sum_axis(Axis(0));

    Ok((
        breakdown,
        Gradients {
            w_enc: g_w_enc,
            b_enc: g_b_enc,
            w_dec: g_w_dec,
            b_dec: g_b_dec,
        },
    ))
}

/// Analytic gradients of [`loss`].
pub fn gradients(model: &AutoencoderModel, batch: ArrayView2<f64>, objective: &Objective) -> Result<Gradients> {
    loss_and_gradients(model, batch, objective).map(|(_, g)| g)
}
