use ndarray::{Array2, ArrayView2};

use super::{loss_and_gradients, Activation, AutoencoderModel, Objective};
use crate::bank::TemplateBank;
use crate::error::{Error, Result};

/// Full-batch gradient descent with classical momentum.
#[derive(Debug, Clone, PartialEq)]
pub struct TrainingConfig {
    pub max_epochs: usize,
    pub l2_weight: f64,
    pub sparsity_weight: f64,
    pub sparsity_target: f64,
    pub learning_rate: f64,
    pub momentum: f64,
    pub seed: u64,
    pub hidden_dim: usize,
    pub decoder: Activation,
}

impl Default for TrainingConfig {
    /// L2 0.001, sparsity weight 4, sparsity proportion 0.05, 100 epochs,
    /// 4096 hidden units. The step size is large because the reconstruction
    /// term is averaged over every sample of every row.
    fn default() -> Self {
        Self {
            max_epochs: 100,
            l2_weight: 0.001,
            sparsity_weight: 4.0,
            sparsity_target: 0.05,
            learning_rate: 2.0,
            momentum: 0.9,
            seed: 0,
            hidden_dim: 4096,
            decoder: Activation::Linear,
        }
    }
}

impl TrainingConfig {
    pub fn objective(&self) -> Objective {
        Objective::new(self.l2_weight, self.sparsity_weight, self.sparsity_target)
    }

    pub fn validate(&self) -> Result<()> {
        self.objective().validate()?;
        if !(self.learning_rate > 0.0 && self.learning_rate.is_finite()) {
            return Err(Error::Config(format!(
                "learning rate must be positive, got {}",
                self.learning_rate
            )));
        }
        if !(0.0..1.0).contains(&self.momentum) {
            return Err(Error::Config(format!("momentum must lie in [0, 1), got {}", self.momentum)));
        }
        if self.hidden_dim == 0 {
            return Err(Error::Config("hidden_dim must be at least 1".into()));
        }
        Ok(())
    }
}

/// Loss terms recorded for one epoch, evaluated before that epoch's update.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EpochRecord {
    /// 1-based.
    pub epoch: usize,
    pub total: f64,
    pub mse: f64,
    pub l2: f64,
    pub sparsity: f64,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct TrainingTrace {
    pub records: Vec<EpochRecord>,
}

impl TrainingTrace {
    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    /// CSV with header `epoch,total,mse,l2,sparsity`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("epoch,total,mse,l2,sparsity\n");
        for r in &self.records {
            out.push_str(&format!(
                "{},{:.16e},{:.16e},{:.16e},{:.16e}\n",
                r.epoch, r.total, r.mse, r.l2, r.sparsity
            ));
        }
        out
    }
}

/// Trains on every template of `bank`, each min-max scaled to `[0, 1]`.
pub fn train(bank: &TemplateBank, cfg: &TrainingConfig) -> Result<(AutoencoderModel, TrainingTrace)> {
    if bank.is_empty() {
        return Err(Error::Domain("cannot train on an empty bank".into()));
    }
    let rows = bank.scaled_rows();
    let batch = Array2::from_shape_vec((rows.len(), bank.length), rows.concat())
        .map_err(|e| Error::Shape {
            expected: format!("{} x {}", bank.len(), bank.length),
            got: e.to_string(),
        })?;
    train_rows(batch.view(), cfg)
}

/// Trains on an already-scaled batch (one sample per row).
pub fn train_rows(batch: ArrayView2<f64>, cfg: &TrainingConfig) -> Result<(AutoencoderModel, TrainingTrace)> {
    train_rows_with(batch, cfg, |_| {})
}

/// As [`train_rows`], calling `observer` after every epoch.
pub fn train_rows_with(
    batch: ArrayView2<f64>,
    cfg: &TrainingConfig,
    mut observer: impl FnMut(&EpochRecord),
) -> Result<(AutoencoderModel, TrainingTrace)> {
    cfg.validate()?;
    if batch.nrows() == 0 || batch.ncols() == 0 {
        return Err(Error::Domain("training batch is empty".into()));
    }
    let input_dim = batch.ncols();
    if cfg.hidden_dim > input_dim {
        log::warn!(
            "hidden_dim {} exceeds input length {input_dim}; the model may learn a plain copy of its input",
            cfg.hidden_dim
        );
    }

    let objective = cfg.objective();
    let mut model = AutoencoderModel::init(input_dim, cfg.hidden_dim, cfg.decoder, cfg.seed);
    let mut velocity = AutoencoderModel::zeros(input_dim, cfg.hidden_dim, cfg.decoder);
    let mut trace = TrainingTrace::default();

    for epoch in 1..=cfg.max_epochs {
        let (terms, grads) = loss_and_gradients(&model, batch, &objective)?;
        if !terms.total.is_finite() {
            return Err(Error::Divergence { epoch });
        }
        let record = EpochRecord {
            epoch,
            total: terms.total,
            mse: terms.mse,
            l2: terms.l2,
            sparsity: terms.sparsity,
        };
        observer(&record);
        trace.records.push(record);

        let (mu, lr) = (cfg.momentum, cfg.learning_rate);
        let step = |v: &mut f64, g: &f64| *v = mu * *v - lr * g;
        velocity.w_enc.zip_mut_with(&grads.w_enc, step);
        velocity.b_enc.zip_mut_with(&grads.b_enc, step);
        velocity.w_dec.zip_mut_with(&grads.w_dec, step);
        velocity.b_dec.zip_mut_with(&grads.b_dec, step);
        model.w_enc += &velocity.w_enc;
        model.b_enc += &velocity.b_enc;
        model.w_dec += &velocity.w_dec;
        model.b_dec += &velocity.b_dec;

        if !model.is_finite() {
            return Err(Error::Divergence { epoch });
        }
    }
    Ok((model, trace))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn batch() -> Array2<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        Array2::from_shape_fn((6, 16), |_| rng.random_range(0.0..1.0))
    }

    fn cfg() -> TrainingConfig {
        TrainingConfig {
            max_epochs: 30,
            hidden_dim: 4,
            ..TrainingConfig::default()
        }
    }

    #[test]
    fn zero_epochs_returns_initialisation() {
        let c = TrainingConfig { max_epochs: 0, ..cfg() };
        let (m, trace) = train_rows(batch().view(), &c).unwrap();
        assert!(trace.is_empty());
        assert_eq!(m, AutoencoderModel::init(16, 4, c.decoder, c.seed));
    }

    #[test]
    fn same_seed_same_model() {
        let b = batch();
        let (m1, t1) = train_rows(b.view(), &cfg()).unwrap();
        let (m2, t2) = train_rows(b.view(), &cfg()).unwrap();
        assert_eq!(m1, m2);
        assert_eq!(t1, t2);
        let (m3, _) = train_rows(b.view(), &TrainingConfig { seed: 1, ..cfg() }).unwrap();
        assert_ne!(m1, m3);
    }

    #[test]
    fn trace_is_contiguous() {
        let mut seen = Vec::new();
        let (_, trace) = train_rows_with(batch().view(), &cfg(), |r| seen.push(r.epoch)).unwrap();
        assert_eq!(trace.len(), 30);
        assert_eq!(seen, (1..=30).collect::<Vec<_>>());
        let csv = trace.to_csv();
        assert!(csv.starts_with("epoch,total,mse,l2,sparsity\n"));
        assert_eq!(csv.lines().count(), 31);
    }

    #[test]
    fn divergence_names_the_epoch() {
        let c = TrainingConfig {
            learning_rate: 1e200,
            momentum: 0.0,
            ..cfg()
        };
        match train_rows(batch().view(), &c) {
            Err(Error::Divergence { epoch }) => assert!(epoch >= 1),
            other => panic!("expected divergence, got {other:?}"),
        }
    }

    #[test]
    fn config_validation() {
        let b = batch();
        for bad in [
            TrainingConfig { sparsity_target: 0.0, ..cfg() },
            TrainingConfig { learning_rate: 0.0, ..cfg() },
            TrainingConfig { momentum: 1.0, ..cfg() },
            TrainingConfig { hidden_dim: 0, ..cfg() },
            TrainingConfig { l2_weight: -1.0, ..cfg() },
        ] {
            assert!(matches!(train_rows(b.view(), &bad), Err(Error::Config(_))));
        }
    }
}
