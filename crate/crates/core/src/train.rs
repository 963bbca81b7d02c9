//! Desk-scale training loop: stratified split, seeded shuffling, batched
//! AdamW updates, per-epoch metrics.

use alloc::vec::Vec;

use crate::autodiff::{adamw_step, OptimState, ParamSet};
use crate::data::Dataset;
use crate::error::Error;
use crate::model::{ModelConfig, Network};
use crate::rng::SplitMix64;
use crate::Result;

/// Optimizer and loop settings (model hyperparameters live in
/// [`ModelConfig`]).
#[derive(Debug, Clone, PartialEq)]
pub struct TrainSettings {
    pub epochs: usize,
    pub batch_size: usize,
    pub lr: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub weight_decay: f64,
    pub warmup_frac: f64,
    pub grad_clip: Option<f64>,
    pub holdout_frac: f64,
    pub seed: u64,
}

impl Default for TrainSettings {
    fn default() -> Self {
        Self {
            epochs: 30,
            batch_size: 16,
            lr: 1e-3,
            beta1: 0.9,
            beta2: 0.999,
            weight_decay: 0.05,
            warmup_frac: 0.1,
            grad_clip: None,
            holdout_frac: 0.2,
            seed: 42,
        }
    }
}

/// One row pair of the metrics log.
#[derive(Debug, Clone, PartialEq)]
pub struct EpochMetrics {
    pub epoch: usize,
    pub train_loss: f64,
    pub train_acc: f64,
    pub holdout_loss: f64,
    pub holdout_acc: f64,
}

/// Owns the network, optimizer, and data split; drives one epoch at a time
/// so callers can stream metrics.
pub struct Trainer {
    pub net: Network,
    pub opt: OptimState,
    pub shuffle_rng: SplitMix64,
    data: Dataset,
    train_idx: Vec<usize>,
    holdout_idx: Vec<usize>,
    batch_size: usize,
    epoch: usize,
}

impl Trainer {
    /// Seed flow: one root stream per run; the first split initializes the
    /// model, the second drives epoch shuffling.
    pub fn new(cfg: ModelConfig, data: Dataset, settings: &TrainSettings) -> Result<Self> {
        if settings.epochs == 0 || settings.batch_size == 0 {
            return Err(Error::InvalidConfig(
                "epochs and batch_size must be >= 1".into(),
            ));
        }
        if !(settings.lr > 0.0) {
            return Err(Error::InvalidConfig("lr must be > 0".into()));
        }
        if data.is_empty() {
            return Err(Error::InvalidConfig("training dataset is empty".into()));
        }
        if data.input_len != cfg.input_len() {
            return Err(Error::ShapeMismatch {
                context: "trainer dataset sample length",
                expected: cfg.input_len(),
                found: data.input_len,
            });
        }
        if data.num_classes as usize != cfg.num_classes {
            return Err(Error::ShapeMismatch {
                context: "trainer class count",
                expected: cfg.num_classes,
                found: data.num_classes as usize,
            });
        }

        let mut root = SplitMix64::new(settings.seed);
        let mut model_rng = root.split();
        let shuffle_rng = root.split();
        let net = Network::init(cfg, &mut model_rng)?;

        let (train_idx, holdout_idx) = stratified_split(&data, settings.holdout_frac);
        if train_idx.is_empty() {
            return Err(Error::InvalidConfig(
                "holdout fraction leaves no training samples".into(),
            ));
        }

        let steps_per_epoch = train_idx.len().div_ceil(settings.batch_size) as u64;
        let total_steps = steps_per_epoch * settings.epochs as u64;
        let warmup_steps = libm::round(settings.warmup_frac * total_steps as f64) as u64;
        let mut opt = OptimState::new(
            settings.lr,
            settings.weight_decay,
            warmup_steps.min(total_steps),
            total_steps,
        );
        opt.beta1 = settings.beta1;
        opt.beta2 = settings.beta2;
        opt.grad_clip = settings.grad_clip;

        Ok(Self {
            net,
            opt,
            shuffle_rng,
            data,
            train_idx,
            holdout_idx,
            batch_size: settings.batch_size,
            epoch: 0,
        })
    }

    pub fn train_samples(&self) -> usize {
        self.train_idx.len()
    }

    pub fn holdout_samples(&self) -> usize {
        self.holdout_idx.len()
    }

    /// One pass over the training split (shuffled) plus a holdout
    /// evaluation. Batch gradients are sample means accumulated in index
    /// order.
    pub fn run_epoch(&mut self) -> Result<EpochMetrics> {
        self.epoch += 1;
        self.shuffle_rng.shuffle(&mut self.train_idx);

        let mut loss_sum = 0.0;
        let mut correct = 0usize;
        let n_train = self.train_idx.len();
        let mut start = 0;
        while start < n_train {
            let end = (start + self.batch_size).min(n_train);
            let scale = 1.0 / (end - start) as f64;
            self.net.zero_grads();
            for &idx in &self.train_idx[start..end] {
                let label = self.data.labels[idx] as usize;
                let (loss, pred) = self.net.train_sample(self.data.sample(idx), label, scale)?;
                if !loss.is_finite() {
                    return Err(Error::NonFinite("training loss"));
                }
                loss_sum += loss;
                if pred == label {
                    correct += 1;
                }
            }
            adamw_step(&mut self.net, &mut self.opt)?;
            start = end;
        }

        let (holdout_loss, holdout_acc) = self.evaluate_holdout()?;
        if !holdout_loss.is_finite() {
            return Err(Error::NonFinite("holdout loss"));
        }
        Ok(EpochMetrics {
            epoch: self.epoch,
            train_loss: loss_sum / n_train as f64,
            train_acc: correct as f64 / n_train as f64,
            holdout_loss,
            holdout_acc,
        })
    }

    pub fn evaluate_holdout(&self) -> Result<(f64, f64)> {
        evaluate(&self.net, &self.data, &self.holdout_idx)
    }
}

/// Mean loss and accuracy of `net` on the given sample indices.
pub fn evaluate(net: &Network, data: &Dataset, indices: &[usize]) -> Result<(f64, f64)> {
    if indices.is_empty() {
        return Ok((0.0, 0.0));
    }
    let mut loss_sum = 0.0;
    let mut correct = 0usize;
    for &idx in indices {
        let label = data.labels[idx] as usize;
        let (loss, pred) = net.eval_sample(data.sample(idx), label)?;
        loss_sum += loss;
        if pred == label {
            correct += 1;
        }
    }
    Ok((
        loss_sum / indices.len() as f64,
        correct as f64 / indices.len() as f64,
    ))
}

/// Per-class split preserving generation order: the last `holdout_frac` of
/// each class's samples are held out.
pub fn stratified_split(data: &Dataset, holdout_frac: f64) -> (Vec<usize>, Vec<usize>) {
    let frac = holdout_frac.clamp(0.0, 0.9);
    let mut train = Vec::new();
    let mut holdout = Vec::new();
    for class in 0..data.num_classes {
        let class_indices: Vec<usize> = (0..data.len())
            .filter(|&i| data.labels[i] == class)
            .collect();
        let n_hold = libm::round(frac * class_indices.len() as f64) as usize;
        let n_train = class_indices.len() - n_hold;
        train.extend_from_slice(&class_indices[..n_train]);
        holdout.extend_from_slice(&class_indices[n_train..]);
    }
    (train, holdout)
}
