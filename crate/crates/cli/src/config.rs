//! Line-based `key = value` training configuration.
//!
//! `#` starts a comment, blank lines are ignored, and unknown keys are hard
//! errors so a typo in an ablation sweep fails loudly instead of silently
//! training the default. [`TrainConfig::to_canonical_text`] writes every
//! field in a fixed order; checkpoints embed that text so a saved model
//! carries its full configuration.

use std::fmt::Write as _;

use sass_core::data::{FreqTaskSpec, ShapeImageSpec};
use sass_core::model::{InputKind, ModelConfig};
use sass_core::spectral::{SaguGateMode, SassMode};
use sass_core::train::TrainSettings;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TaskKind {
    Freq,
    Shapes,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrainConfig {
    // task / data
    pub task: TaskKind,
    /// Load this dataset file instead of generating one.
    pub dataset: Option<String>,
    pub seq_len: usize,
    pub num_classes: usize,
    pub bands: Vec<(usize, usize)>,
    pub noise_sigma: f64,
    pub samples_per_class: usize,
    pub amp_min: f64,
    pub amp_max: f64,
    pub image_side: usize,
    pub jitter: usize,
    pub holdout_frac: f64,
    // model
    pub embed_dim: usize,
    pub state_dim: usize,
    pub gate_dim: usize,
    pub depth: usize,
    pub ffn_ratio: usize,
    pub patch_size: usize,
    pub conv_mode: SassMode,
    pub sigma_init: f64,
    pub learnable_sigma: bool,
    pub sagu_first: bool,
    pub gating_enabled: bool,
    pub sagu_complex_gate: bool,
    // optimizer / loop
    pub epochs: usize,
    pub batch_size: usize,
    pub lr: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub weight_decay: f64,
    pub warmup_frac: f64,
    /// 0 disables clipping.
    pub grad_clip: f64,
    pub seed: u64,
    // outputs
    pub metrics_out: String,
    pub checkpoint_out: String,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            task: TaskKind::Freq,
            dataset: None,
            seq_len: 64,
            num_classes: 3,
            bands: vec![(3, 5), (11, 13), (19, 21)],
            noise_sigma: 0.5,
            samples_per_class: 300,
            amp_min: 0.1,
            amp_max: 10.0,
            image_side: 16,
            jitter: 2,
            holdout_frac: 0.2,
            embed_dim: 16,
            state_dim: 16,
            gate_dim: 16,
            depth: 1,
            ffn_ratio: 2,
            patch_size: 4,
            conv_mode: SassMode::Circular,
            sigma_init: 0.02,
            learnable_sigma: false,
            sagu_first: false,
            gating_enabled: true,
            sagu_complex_gate: false,
            epochs: 30,
            batch_size: 16,
            lr: 1e-3,
            beta1: 0.9,
            beta2: 0.999,
            weight_decay: 0.05,
            warmup_frac: 0.1,
            grad_clip: 0.0,
            seed: 42,
            metrics_out: "metrics.csv".into(),
            checkpoint_out: "model.sassckpt".into(),
        }
    }
}

fn parse_bands(value: &str) -> Result<Vec<(usize, usize)>, String> {
    value
        .split(',')
        .map(|part| {
            let part = part.trim();
            let (lo, hi) = part
                .split_once('-')
                .ok_or_else(|| format!("band '{part}' must look like 'lo-hi'"))?;
            let lo = lo
                .trim()
                .parse::<usize>()
                .map_err(|e| format!("band low bin '{lo}': {e}"))?;
            let hi = hi
                .trim()
                .parse::<usize>()
                .map_err(|e| format!("band high bin '{hi}': {e}"))?;
            Ok((lo, hi))
        })
        .collect()
}

fn bands_to_string(bands: &[(usize, usize)]) -> String {
    bands
        .iter()
        .map(|(lo, hi)| format!("{lo}-{hi}"))
        .collect::<Vec<_>>()
        .join(",")
}

fn parse_bool(key: &str, value: &str) -> Result<bool, String> {
    match value {
        "true" | "1" | "yes" => Ok(true),
        "false" | "0" | "no" => Ok(false),
        other => Err(format!("{key}: expected true/false, got '{other}'")),
    }
}

impl TrainConfig {
    /// Parse config text over the defaults. Unknown keys are errors.
    pub fn parse(text: &str) -> Result<Self, String> {
        let mut cfg = Self::default();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| format!("line {}: expected 'key = value'", lineno + 1))?;
            let (key, value) = (key.trim(), value.trim());
            cfg.set(key, value)
                .map_err(|e| format!("line {}: {e}", lineno + 1))?;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    fn set(&mut self, key: &str, value: &str) -> Result<(), String> {
        macro_rules! num {
            () => {
                value
                    .parse()
                    .map_err(|e| format!("{key} = '{value}': {e}"))?
            };
        }
        match key {
            "task" => {
                self.task = match value {
                    "freq" => TaskKind::Freq,
                    "shapes" => TaskKind::Shapes,
                    other => return Err(format!("task: expected freq|shapes, got '{other}'")),
                }
            }
            "dataset" => self.dataset = Some(value.to_string()),
            "seq_len" => self.seq_len = num!(),
            "num_classes" => self.num_classes = num!(),
            "bands" => self.bands = parse_bands(value)?,
            "noise_sigma" => self.noise_sigma = num!(),
            "samples_per_class" => self.samples_per_class = num!(),
            "amp_min" => self.amp_min = num!(),
            "amp_max" => self.amp_max = num!(),
            "image_side" => self.image_side = num!(),
            "jitter" => self.jitter = num!(),
            "holdout_frac" => self.holdout_frac = num!(),
            "embed_dim" => self.embed_dim = num!(),
            "state_dim" => self.state_dim = num!(),
            "gate_dim" => self.gate_dim = num!(),
            "depth" => self.depth = num!(),
            "ffn_ratio" => self.ffn_ratio = num!(),
            "patch_size" => self.patch_size = num!(),
            "conv_mode" => {
                self.conv_mode = match value {
                    "circular" => SassMode::Circular,
                    "causal_padded" => SassMode::CausalPadded,
                    other => {
                        return Err(format!(
                            "conv_mode: expected circular|causal_padded, got '{other}'"
                        ))
                    }
                }
            }
            "sigma_init" => self.sigma_init = num!(),
            "learnable_sigma" => self.learnable_sigma = parse_bool(key, value)?,
            "sagu_first" => self.sagu_first = parse_bool(key, value)?,
            "gating_enabled" => self.gating_enabled = parse_bool(key, value)?,
            "sagu_complex_gate" => self.sagu_complex_gate = parse_bool(key, value)?,
            "epochs" => self.epochs = num!(),
            "batch_size" => self.batch_size = num!(),
            "lr" => self.lr = num!(),
            "beta1" => self.beta1 = num!(),
            "beta2" => self.beta2 = num!(),
            "weight_decay" => self.weight_decay = num!(),
            "warmup_frac" => self.warmup_frac = num!(),
            "grad_clip" => self.grad_clip = num!(),
            "seed" => self.seed = num!(),
            "metrics_out" => self.metrics_out = value.to_string(),
            "checkpoint_out" => self.checkpoint_out = value.to_string(),
            other => return Err(format!("unknown config key '{other}'")),
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<(), String> {
        if self.epochs == 0 || self.batch_size == 0 {
            return Err("epochs and batch_size must be >= 1".into());
        }
        if !(self.lr > 0.0) {
            return Err("lr must be > 0".into());
        }
        self.model_config().validate().map_err(|e| e.to_string())
    }

    /// Every field, fixed order; parses back to an equal config.
    pub fn to_canonical_text(&self) -> String {
        let mut s = String::new();
        let task = match self.task {
            TaskKind::Freq => "freq",
            TaskKind::Shapes => "shapes",
        };
        let mode = match self.conv_mode {
            SassMode::Circular => "circular",
            SassMode::CausalPadded => "causal_padded",
        };
        let _ = writeln!(s, "task = {task}");
        if let Some(d) = &self.dataset {
            let _ = writeln!(s, "dataset = {d}");
        }
        let _ = writeln!(s, "seq_len = {}", self.seq_len);
        let _ = writeln!(s, "num_classes = {}", self.num_classes);
        let _ = writeln!(s, "bands = {}", bands_to_string(&self.bands));
        let _ = writeln!(s, "noise_sigma = {}", self.noise_sigma);
        let _ = writeln!(s, "samples_per_class = {}", self.samples_per_class);
        let _ = writeln!(s, "amp_min = {}", self.amp_min);
        let _ = writeln!(s, "amp_max = {}", self.amp_max);
        let _ = writeln!(s, "image_side = {}", self.image_side);
        let _ = writeln!(s, "jitter = {}", self.jitter);
        let _ = writeln!(s, "holdout_frac = {}", self.holdout_frac);
        let _ = writeln!(s, "embed_dim = {}", self.embed_dim);
        let _ = writeln!(s, "state_dim = {}", self.state_dim);
        let _ = writeln!(s, "gate_dim = {}", self.gate_dim);
        let _ = writeln!(s, "depth = {}", self.depth);
        let _ = writeln!(s, "ffn_ratio = {}", self.ffn_ratio);
        let _ = writeln!(s, "patch_size = {}", self.patch_size);
        let _ = writeln!(s, "conv_mode = {mode}");
        let _ = writeln!(s, "sigma_init = {}", self.sigma_init);
        let _ = writeln!(s, "learnable_sigma = {}", self.learnable_sigma);
        let _ = writeln!(s, "sagu_first = {}", self.sagu_first);
        let _ = writeln!(s, "gating_enabled = {}", self.gating_enabled);
        let _ = writeln!(s, "sagu_complex_gate = {}", self.sagu_complex_gate);
        let _ = writeln!(s, "epochs = {}", self.epochs);
        let _ = writeln!(s, "batch_size = {}", self.batch_size);
        let _ = writeln!(s, "lr = {}", self.lr);
        let _ = writeln!(s, "beta1 = {}", self.beta1);
        let _ = writeln!(s, "beta2 = {}", self.beta2);
        let _ = writeln!(s, "weight_decay = {}", self.weight_decay);
        let _ = writeln!(s, "warmup_frac = {}", self.warmup_frac);
        let _ = writeln!(s, "grad_clip = {}", self.grad_clip);
        let _ = writeln!(s, "seed = {}", self.seed);
        let _ = writeln!(s, "metrics_out = {}", self.metrics_out);
        let _ = writeln!(s, "checkpoint_out = {}", self.checkpoint_out);
        s
    }

    pub fn model_config(&self) -> ModelConfig {
        let (input, seq_len) = match self.task {
            TaskKind::Freq => (InputKind::Signal, self.seq_len),
            TaskKind::Shapes => {
                let grid = self.image_side / self.patch_size.max(1);
                (InputKind::Image, grid * grid)
            }
        };
        ModelConfig {
            seq_len,
            embed_dim: self.embed_dim,
            state_dim: self.state_dim,
            gate_dim: self.gate_dim,
            depth: self.depth,
            num_classes: self.num_classes,
            ffn_ratio: self.ffn_ratio,
            patch_size: self.patch_size,
            image_side: self.image_side,
            input,
            mode: self.conv_mode,
            sigma_init: self.sigma_init,
            learnable_sigma: self.learnable_sigma,
            sagu_first: self.sagu_first,
            gating_enabled: self.gating_enabled,
            sagu_gate_mode: if self.sagu_complex_gate {
                SaguGateMode::ComplexModulus
            } else {
                SaguGateMode::RealPath
            },
        }
    }

    pub fn train_settings(&self) -> TrainSettings {
        TrainSettings {
            epochs: self.epochs,
            batch_size: self.batch_size,
            lr: self.lr,
            beta1: self.beta1,
            beta2: self.beta2,
            weight_decay: self.weight_decay,
            warmup_frac: self.warmup_frac,
            grad_clip: (self.grad_clip > 0.0).then_some(self.grad_clip),
            holdout_frac: self.holdout_frac,
            seed: self.seed,
        }
    }

    pub fn freq_spec(&self) -> FreqTaskSpec {
        FreqTaskSpec {
            seq_len: self.seq_len,
            num_classes: self.num_classes,
            bands: self.bands.clone(),
            noise_sigma: self.noise_sigma,
            samples_per_class: self.samples_per_class,
            amp_range: (self.amp_min, self.amp_max),
            seed: self.seed,
        }
    }

    pub fn shape_spec(&self) -> ShapeImageSpec {
        ShapeImageSpec {
            side: self.image_side,
            num_classes: self.num_classes,
            jitter: self.jitter,
            noise_sigma: self.noise_sigma,
            samples_per_class: self.samples_per_class,
            seed: self.seed,
        }
    }
}
