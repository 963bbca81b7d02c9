//! The desk-scale network: gated state-space layers stacked into pre-norm
//! residual blocks, with patch or signal embeddings and a mean-pool
//! classification head.
//!
//! One HSS layer evaluates, for tokens X ∈ ℝ^{L×D},
//!
//! ```text
//! U = φ(X·W_u + b_u)        state path, L×H
//! V = φ(X·W_v + b_v)        gate path,  L×M
//! Y = SASS(U)               spectral core
//! O = (Y·W_y + b_y) ⊙ V     output gating
//! Z = O·W_o                 back to L×D
//! ```
//!
//! with φ = GELU. A block wraps that in pre-norm residuals:
//! X + HSS(LN(X)), then + FFN(LN(·)). Every stage saves what its backward
//! needs; [`Network::backward`] chains the stage adjoints in reverse.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::autodiff::{Param, ParamSet};
use crate::error::Error;
use crate::linalg;
use crate::numerics::Tensor;
use crate::rng::SplitMix64;
use crate::spectral::{
    sass_backward, sass_forward, PulseGateParams, SaguGateMode, SaguParams, SassConfig, SassMode,
    SassState, SpectralKernel,
};
use crate::Result;

/// What the leading dimension of the input means.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InputKind {
    /// A length-L scalar signal; each sample becomes one token.
    Signal,
    /// A side×side single-channel image cut into non-overlapping patches.
    Image,
}

/// Full model hyperparameters.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelConfig {
    pub seq_len: usize,
    pub embed_dim: usize,
    pub state_dim: usize,
    pub gate_dim: usize,
    pub depth: usize,
    pub num_classes: usize,
    pub ffn_ratio: usize,
    pub patch_size: usize,
    pub image_side: usize,
    pub input: InputKind,
    pub mode: SassMode,
    pub sigma_init: f64,
    pub learnable_sigma: bool,
    pub sagu_first: bool,
    pub gating_enabled: bool,
    pub sagu_gate_mode: SaguGateMode,
}

impl ModelConfig {
    /// Desk defaults for a length-L signal task.
    pub fn desk_signal(seq_len: usize, num_classes: usize) -> Self {
        Self {
            seq_len,
            embed_dim: 16,
            state_dim: 16,
            gate_dim: 16,
            depth: 1,
            num_classes,
            ffn_ratio: 2,
            patch_size: 1,
            image_side: 0,
            input: InputKind::Signal,
            mode: SassMode::Circular,
            sigma_init: 0.02,
            learnable_sigma: false,
            sagu_first: false,
            gating_enabled: true,
            sagu_gate_mode: SaguGateMode::RealPath,
        }
    }

    /// Desk defaults for a side×side image task (L = (side/patch)² tokens):
    /// 32×32 inputs with 4×4 patches give 64 tokens at width 64 with ×1.5
    /// expanded inner dims.
    pub fn desk_image(image_side: usize, patch_size: usize, num_classes: usize) -> Self {
        let grid = image_side / patch_size.max(1);
        Self {
            seq_len: grid * grid,
            embed_dim: 64,
            state_dim: 96,
            gate_dim: 96,
            depth: 4,
            num_classes,
            ffn_ratio: 2,
            patch_size,
            image_side,
            input: InputKind::Image,
            mode: SassMode::Circular,
            sigma_init: 0.02,
            learnable_sigma: false,
            sagu_first: false,
            gating_enabled: true,
            sagu_gate_mode: SaguGateMode::RealPath,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let dims = [
            self.seq_len,
            self.embed_dim,
            self.state_dim,
            self.gate_dim,
            self.num_classes,
            self.ffn_ratio,
        ];
        if dims.contains(&0) {
            return Err(Error::InvalidConfig(format!(
                "all model dimensions must be >= 1: {self:?}"
            )));
        }
        if self.input == InputKind::Image {
            if self.patch_size == 0 || self.image_side == 0 {
                return Err(Error::InvalidConfig(
                    "image tasks need patch_size and image_side >= 1".into(),
                ));
            }
            if !self.image_side.is_multiple_of(self.patch_size) {
                return Err(Error::InvalidConfig(format!(
                    "image_side {} not divisible by patch_size {}",
                    self.image_side, self.patch_size
                )));
            }
            let grid = self.image_side / self.patch_size;
            if self.seq_len != grid * grid {
                return Err(Error::InvalidConfig(format!(
                    "seq_len {} != (image_side/patch_size)^2 = {}",
                    self.seq_len,
                    grid * grid
                )));
            }
        }
        Ok(())
    }

    pub fn sass_config(&self) -> SassConfig {
        SassConfig {
            mode: self.mode,
            sagu_first: self.sagu_first,
            gating_enabled: self.gating_enabled,
        }
    }

    /// Expected flat input length per sample.
    pub fn input_len(&self) -> usize {
        match self.input {
            InputKind::Signal => self.seq_len,
            InputKind::Image => self.image_side * self.image_side,
        }
    }
}

fn gelu(x: f64) -> f64 {
    0.5 * x * (1.0 + libm::erf(x * core::f64::consts::FRAC_1_SQRT_2))
}

fn gelu_grad(x: f64) -> f64 {
    const INV_SQRT_2PI: f64 = 0.3989422804014327;
    0.5 * (1.0 + libm::erf(x * core::f64::consts::FRAC_1_SQRT_2))
        + x * INV_SQRT_2PI * libm::exp(-0.5 * x * x)
}

fn xavier_std(fan_in: usize, fan_out: usize) -> f64 {
    libm::sqrt(2.0 / (fan_in + fan_out) as f64)
}

// ---------------------------------------------------------------------------
// Linear + GELU building blocks
// ---------------------------------------------------------------------------

/// Dense projection IN→OUT with optional bias, stored row-major (IN×OUT).
#[derive(Debug, Clone)]
struct Linear {
    w: Param,
    b: Option<Param>,
    fan_in: usize,
    fan_out: usize,
}

impl Linear {
    fn init(name: &str, fan_in: usize, fan_out: usize, bias: bool, rng: &mut SplitMix64) -> Self {
        let std = xavier_std(fan_in, fan_out);
        let w = Param::new(
            format!("{name}.w"),
            vec![fan_in, fan_out],
            (0..fan_in * fan_out)
                .map(|_| rng.normal_scaled(std))
                .collect(),
        );
        let b = bias.then(|| Param::zeros(format!("{name}.b"), vec![fan_out]));
        Self {
            w,
            b,
            fan_in,
            fan_out,
        }
    }

    /// y (rows×OUT) = x (rows×IN)·W + b.
    fn forward(&self, x: &[f64], rows: usize) -> Vec<f64> {
        let mut y = vec![0.0; rows * self.fan_out];
        linalg::matmul(x, &self.w.data, rows, self.fan_in, self.fan_out, &mut y);
        if let Some(b) = &self.b {
            for r in 0..rows {
                for j in 0..self.fan_out {
                    y[r * self.fan_out + j] += b.data[j];
                }
            }
        }
        y
    }

    /// Accumulates weight/bias grads and returns grad w.r.t. x.
    fn backward(&mut self, x: &[f64], grad_y: &[f64], rows: usize) -> Vec<f64> {
        linalg::acc_at_g(x, grad_y, rows, self.fan_in, self.fan_out, &mut self.w.grad);
        if let Some(b) = &mut self.b {
            for r in 0..rows {
                for j in 0..self.fan_out {
                    b.grad[j] += grad_y[r * self.fan_out + j];
                }
            }
        }
        let mut grad_x = vec![0.0; rows * self.fan_in];
        linalg::acc_g_bt(
            grad_y,
            &self.w.data,
            rows,
            self.fan_out,
            self.fan_in,
            &mut grad_x,
        );
        grad_x
    }

    fn visit(&mut self, f: &mut dyn FnMut(&mut Param)) {
        f(&mut self.w);
        if let Some(b) = &mut self.b {
            f(b);
        }
    }
}

fn gelu_forward(pre: &[f64]) -> Vec<f64> {
    pre.iter().map(|&x| gelu(x)).collect()
}

fn gelu_backward(pre: &[f64], grad_out: &[f64]) -> Vec<f64> {
    pre.iter()
        .zip(grad_out)
        .map(|(&x, &g)| g * gelu_grad(x))
        .collect()
}

// ---------------------------------------------------------------------------
// Layer normalization
// ---------------------------------------------------------------------------

#[derive(Debug, Clone)]
struct LayerNorm {
    gamma: Param,
    beta: Param,
    dim: usize,
    eps: f64,
}

#[derive(Debug, Clone)]
struct LayerNormState {
    x_hat: Vec<f64>,
    inv_std: Vec<f64>,
}

impl LayerNorm {
    fn init(name: &str, dim: usize) -> Self {
        Self {
            gamma: Param::new(format!("{name}.gamma"), vec![dim], vec![1.0; dim]),
            beta: Param::zeros(format!("{name}.beta"), vec![dim]),
            dim,
            eps: 1e-5,
        }
    }

    fn forward(&self, x: &[f64], rows: usize) -> (Vec<f64>, LayerNormState) {
        let d = self.dim;
        let mut y = vec![0.0; rows * d];
        let mut x_hat = vec![0.0; rows * d];
        let mut inv_std = vec![0.0; rows];
        for r in 0..rows {
            let row = &x[r * d..(r + 1) * d];
            let mean = row.iter().sum::<f64>() / d as f64;
            let var = row.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / d as f64;
            let is = 1.0 / libm::sqrt(var + self.eps);
            inv_std[r] = is;
            for j in 0..d {
                let xh = (row[j] - mean) * is;
                x_hat[r * d + j] = xh;
                y[r * d + j] = self.gamma.data[j] * xh + self.beta.data[j];
            }
        }
        (y, LayerNormState { x_hat, inv_std })
    }

    fn backward(&mut self, grad_y: &[f64], state: &LayerNormState, rows: usize) -> Vec<f64> {
        let d = self.dim;
        let mut grad_x = vec![0.0; rows * d];
        for r in 0..rows {
            let gy = &grad_y[r * d..(r + 1) * d];
            let xh = &state.x_hat[r * d..(r + 1) * d];
            let mut sum_g = 0.0;
            let mut sum_gx = 0.0;
            for j in 0..d {
                let gxh = gy[j] * self.gamma.data[j];
                sum_g += gxh;
                sum_gx += gxh * xh[j];
                self.gamma.grad[j] += gy[j] * xh[j];
                self.beta.grad[j] += gy[j];
            }
            let inv_d = 1.0 / d as f64;
            for j in 0..d {
                let gxh = gy[j] * self.gamma.data[j];
                grad_x[r * d + j] =
                    state.inv_std[r] * (gxh - inv_d * sum_g - xh[j] * inv_d * sum_gx);
            }
        }
        grad_x
    }

    fn visit(&mut self, f: &mut dyn FnMut(&mut Param)) {
        f(&mut self.gamma);
        f(&mut self.beta);
    }
}

// ---------------------------------------------------------------------------
// HSS layer
// ---------------------------------------------------------------------------

/// Parameters of one gated state-space layer.
#[derive(Debug, Clone)]
pub struct HssLayer {
    proj_u: Linear,
    proj_v: Linear,
    pub kernel: SpectralKernel,
    pub pulse: PulseGateParams,
    pub sagu: SaguParams,
    proj_y: Linear,
    proj_o: Linear,
    seq_len: usize,
    state_dim: usize,
    gate_dim: usize,
    embed_dim: usize,
}

/// Saved activations for one HSS forward.
pub struct HssState {
    x: Vec<f64>,
    pre_u: Vec<f64>,
    pre_v: Vec<f64>,
    v_act: Vec<f64>,
    sass: SassState,
    y_sass: Tensor,
    pre_o: Vec<f64>,
    o: Vec<f64>,
}

impl HssState {
    pub fn sass_state(&self) -> &SassState {
        &self.sass
    }
}

impl HssLayer {
    pub fn init(name: &str, cfg: &ModelConfig, rng: &mut SplitMix64) -> Result<Self> {
        let (l, d, h, m) = (cfg.seq_len, cfg.embed_dim, cfg.state_dim, cfg.gate_dim);
        let gate_std = 1.0 / l as f64;
        let mut layer = Self {
            proj_u: Linear::init(&format!("{name}.proj_u"), d, h, true, rng),
            proj_v: Linear::init(&format!("{name}.proj_v"), d, m, true, rng),
            kernel: SpectralKernel::init(
                &format!("{name}.kernel"),
                h,
                l,
                cfg.sigma_init,
                cfg.learnable_sigma,
                rng,
            )?,
            pulse: PulseGateParams::init(&format!("{name}.pulse"), l, gate_std, rng),
            sagu: SaguParams::init(
                &format!("{name}.sagu"),
                l,
                gate_std,
                cfg.sagu_gate_mode,
                rng,
            ),
            proj_y: Linear::init(&format!("{name}.proj_y"), h, m, true, rng),
            proj_o: Linear::init(&format!("{name}.proj_o"), m, d, false, rng),
            seq_len: l,
            state_dim: h,
            gate_dim: m,
            embed_dim: d,
        };
        // Frozen halves: the gate parameters when gating is ablated, and the
        // unused imaginary gate matrix in the real-path mode.
        if !cfg.gating_enabled {
            layer.pulse.w_g.trainable = false;
            layer.pulse.b_g.trainable = false;
            layer.sagu.w2_re.trainable = false;
            layer.sagu.w2_im.trainable = false;
        } else if cfg.sagu_gate_mode == SaguGateMode::RealPath {
            layer.sagu.w2_im.trainable = false;
        }
        Ok(layer)
    }

    pub fn forward(&self, x: &[f64], cfg: &SassConfig) -> Result<(Vec<f64>, HssState)> {
        let (l, h, m) = (self.seq_len, self.state_dim, self.gate_dim);
        if x.len() != l * self.embed_dim {
            return Err(Error::ShapeMismatch {
                context: "hss_forward input",
                expected: l * self.embed_dim,
                found: x.len(),
            });
        }
        let pre_u = self.proj_u.forward(x, l);
        let u_act = gelu_forward(&pre_u);
        let pre_v = self.proj_v.forward(x, l);
        let v_act = gelu_forward(&pre_v);

        let u_tensor = Tensor::new(vec![l, h], u_act)?;
        let (y_sass, sass) = sass_forward(&u_tensor, &self.kernel, &self.pulse, &self.sagu, cfg)?;

        let pre_o = self.proj_y.forward(y_sass.data(), l);
        let o: Vec<f64> = pre_o.iter().zip(&v_act).map(|(&a, &b)| a * b).collect();
        let z = self.proj_o.forward(&o, l);

        debug_assert_eq!(o.len(), l * m);
        Ok((
            z,
            HssState {
                x: x.to_vec(),
                pre_u,
                pre_v,
                v_act,
                sass,
                y_sass,
                pre_o,
                o,
            },
        ))
    }

    pub fn backward(&mut self, grad_z: &[f64], state: &HssState) -> Result<Vec<f64>> {
        let l = self.seq_len;
        let grad_o = self.proj_o.backward(&state.o, grad_z, l);

        // O = pre_o ⊙ V.
        let grad_pre_o: Vec<f64> = grad_o
            .iter()
            .zip(&state.v_act)
            .map(|(&g, &v)| g * v)
            .collect();
        let mut grad_v_act: Vec<f64> = grad_o
            .iter()
            .zip(&state.pre_o)
            .map(|(&g, &p)| g * p)
            .collect();

        let grad_y_sass = self.proj_y.backward(state.y_sass.data(), &grad_pre_o, l);
        let grad_y_tensor = Tensor::new(vec![l, self.state_dim], grad_y_sass)?;
        let grad_u_tensor = sass_backward(
            &grad_y_tensor,
            &state.sass,
            &mut self.kernel,
            &mut self.pulse,
            &mut self.sagu,
        )?;

        let grad_pre_u = gelu_backward(&state.pre_u, grad_u_tensor.data());
        let mut grad_x = self.proj_u.backward(&state.x, &grad_pre_u, l);

        grad_v_act = gelu_backward(&state.pre_v, &grad_v_act);
        let grad_x_v = self.proj_v.backward(&state.x, &grad_v_act, l);
        for (a, b) in grad_x.iter_mut().zip(&grad_x_v) {
            *a += b;
        }
        Ok(grad_x)
    }

    fn visit(&mut self, f: &mut dyn FnMut(&mut Param)) {
        self.proj_u.visit(f);
        self.proj_v.visit(f);
        f(&mut self.kernel.psi_re);
        f(&mut self.kernel.psi_im);
        if let Some(scale) = &mut self.kernel.scale {
            f(scale);
        }
        f(&mut self.pulse.w_g);
        f(&mut self.pulse.b_g);
        f(&mut self.sagu.w1_re);
        f(&mut self.sagu.w1_im);
        f(&mut self.sagu.w2_re);
        f(&mut self.sagu.w2_im);
        self.proj_y.visit(f);
        self.proj_o.visit(f);
    }
}

// ---------------------------------------------------------------------------
// FFN and residual block
// ---------------------------------------------------------------------------

#[derive(Debug, Clone)]
pub struct Ffn {
    w1: Linear,
    w2: Linear,
}

pub struct FfnState {
    x: Vec<f64>,
    pre: Vec<f64>,
    act: Vec<f64>,
}

impl Ffn {
    pub fn init(name: &str, dim: usize, ratio: usize, rng: &mut SplitMix64) -> Self {
        let hidden = dim * ratio;
        Self {
            w1: Linear::init(&format!("{name}.w1"), dim, hidden, true, rng),
            w2: Linear::init(&format!("{name}.w2"), hidden, dim, true, rng),
        }
    }

    pub fn forward(&self, x: &[f64], rows: usize) -> (Vec<f64>, FfnState) {
        let pre = self.w1.forward(x, rows);
        let act = gelu_forward(&pre);
        let y = self.w2.forward(&act, rows);
        (
            y,
            FfnState {
                x: x.to_vec(),
                pre,
                act,
            },
        )
    }

    pub fn backward(&mut self, grad_y: &[f64], state: &FfnState, rows: usize) -> Vec<f64> {
        let grad_act = self.w2.backward(&state.act, grad_y, rows);
        let grad_pre = gelu_backward(&state.pre, &grad_act);
        self.w1.backward(&state.x, &grad_pre, rows)
    }

    fn visit(&mut self, f: &mut dyn FnMut(&mut Param)) {
        self.w1.visit(f);
        self.w2.visit(f);
    }
}

/// Pre-norm residual block: X + HSS(LN(X)), then + FFN(LN(·)).
pub struct Block {
    norm1: LayerNorm,
    pub hss: HssLayer,
    norm2: LayerNorm,
    ffn: Ffn,
    seq_len: usize,
}

pub struct BlockState {
    n1: LayerNormState,
    hss: HssState,
    n2: LayerNormState,
    ffn: FfnState,
}

impl BlockState {
    pub fn hss_state(&self) -> &HssState {
        &self.hss
    }
}

impl Block {
    pub fn init(name: &str, cfg: &ModelConfig, rng: &mut SplitMix64) -> Result<Self> {
        Ok(Self {
            norm1: LayerNorm::init(&format!("{name}.norm1"), cfg.embed_dim),
            hss: HssLayer::init(&format!("{name}.hss"), cfg, rng)?,
            norm2: LayerNorm::init(&format!("{name}.norm2"), cfg.embed_dim),
            ffn: Ffn::init(&format!("{name}.ffn"), cfg.embed_dim, cfg.ffn_ratio, rng),
            seq_len: cfg.seq_len,
        })
    }

    pub fn forward(&self, x: &[f64], cfg: &SassConfig) -> Result<(Vec<f64>, BlockState)> {
        let l = self.seq_len;
        let (normed1, n1) = self.norm1.forward(x, l);
        let (hss_out, hss_state) = self.hss.forward(&normed1, cfg)?;
        let mid: Vec<f64> = x.iter().zip(&hss_out).map(|(&a, &b)| a + b).collect();

        let (normed2, n2) = self.norm2.forward(&mid, l);
        let (ffn_out, ffn_state) = self.ffn.forward(&normed2, l);
        let out: Vec<f64> = mid.iter().zip(&ffn_out).map(|(&a, &b)| a + b).collect();

        Ok((
            out,
            BlockState {
                n1,
                hss: hss_state,
                n2,
                ffn: ffn_state,
            },
        ))
    }

    pub fn backward(&mut self, grad_out: &[f64], state: &BlockState) -> Result<Vec<f64>> {
        let l = self.seq_len;
        // out = mid + ffn(LN2(mid))
        let grad_n2 = self.ffn.backward(grad_out, &state.ffn, l);
        let mut grad_mid = self.norm2.backward(&grad_n2, &state.n2, l);
        for (g, &go) in grad_mid.iter_mut().zip(grad_out) {
            *g += go;
        }
        // mid = x + hss(LN1(x))
        let grad_n1 = self.hss.backward(&grad_mid, &state.hss)?;
        let mut grad_x = self.norm1.backward(&grad_n1, &state.n1, l);
        for (g, &gm) in grad_x.iter_mut().zip(&grad_mid) {
            *g += gm;
        }
        Ok(grad_x)
    }

    fn visit(&mut self, f: &mut dyn FnMut(&mut Param)) {
        self.norm1.visit(f);
        self.hss.visit(f);
        self.norm2.visit(f);
        self.ffn.visit(f);
    }
}

// ---------------------------------------------------------------------------
// Embeddings, head, loss
// ---------------------------------------------------------------------------

/// Per-token affine lift of a scalar signal: row t of X is u_t·w + b.
pub struct SignalEmbed {
    w: Param,
    b: Param,
    seq_len: usize,
    dim: usize,
}

impl SignalEmbed {
    pub fn init(name: &str, seq_len: usize, dim: usize, rng: &mut SplitMix64) -> Self {
        let std = xavier_std(1, dim);
        Self {
            w: Param::new(
                format!("{name}.w"),
                vec![dim],
                (0..dim).map(|_| rng.normal_scaled(std)).collect(),
            ),
            b: Param::zeros(format!("{name}.b"), vec![dim]),
            seq_len,
            dim,
        }
    }

    pub fn forward(&self, signal: &[f64]) -> Result<Vec<f64>> {
        if signal.len() != self.seq_len {
            return Err(Error::ShapeMismatch {
                context: "signal_embed input",
                expected: self.seq_len,
                found: signal.len(),
            });
        }
        let mut x = vec![0.0; self.seq_len * self.dim];
        for t in 0..self.seq_len {
            for j in 0..self.dim {
                x[t * self.dim + j] = signal[t] * self.w.data[j] + self.b.data[j];
            }
        }
        Ok(x)
    }

    pub fn backward(&mut self, signal: &[f64], grad_x: &[f64]) {
        for t in 0..self.seq_len {
            for j in 0..self.dim {
                let g = grad_x[t * self.dim + j];
                self.w.grad[j] += signal[t] * g;
                self.b.grad[j] += g;
            }
        }
    }

    fn visit(&mut self, f: &mut dyn FnMut(&mut Param)) {
        f(&mut self.w);
        f(&mut self.b);
    }
}

/// Non-overlapping patches flattened and linearly projected to D.
pub struct PatchEmbed {
    proj: Linear,
    side: usize,
    patch: usize,
    seq_len: usize,
}

pub struct PatchEmbedState {
    patches: Vec<f64>,
}

impl PatchEmbed {
    pub fn init(name: &str, cfg: &ModelConfig, rng: &mut SplitMix64) -> Self {
        let pp = cfg.patch_size * cfg.patch_size;
        Self {
            proj: Linear::init(&format!("{name}.proj"), pp, cfg.embed_dim, true, rng),
            side: cfg.image_side,
            patch: cfg.patch_size,
            seq_len: cfg.seq_len,
        }
    }

    /// Extract the L×p² patch matrix in row-major grid order.
    fn patch_matrix(&self, image: &[f64]) -> Result<Vec<f64>> {
        if image.len() != self.side * self.side {
            return Err(Error::ShapeMismatch {
                context: "patch_embed input",
                expected: self.side * self.side,
                found: image.len(),
            });
        }
        let grid = self.side / self.patch;
        let pp = self.patch * self.patch;
        let mut patches = vec![0.0; self.seq_len * pp];
        for gy in 0..grid {
            for gx in 0..grid {
                let token = gy * grid + gx;
                for py in 0..self.patch {
                    for px in 0..self.patch {
                        let pixel = (gy * self.patch + py) * self.side + gx * self.patch + px;
                        patches[token * pp + py * self.patch + px] = image[pixel];
                    }
                }
            }
        }
        Ok(patches)
    }

    pub fn forward(&self, image: &[f64]) -> Result<(Vec<f64>, PatchEmbedState)> {
        let patches = self.patch_matrix(image)?;
        let x = self.proj.forward(&patches, self.seq_len);
        Ok((x, PatchEmbedState { patches }))
    }

    pub fn backward(&mut self, state: &PatchEmbedState, grad_x: &[f64]) {
        let _ = self.proj.backward(&state.patches, grad_x, self.seq_len);
    }

    fn visit(&mut self, f: &mut dyn FnMut(&mut Param)) {
        self.proj.visit(f);
    }
}

/// Mean-pool over tokens followed by a linear head.
pub struct Head {
    w: Param,
    b: Param,
    dim: usize,
    classes: usize,
}

pub struct HeadState {
    pooled: Vec<f64>,
    seq_len: usize,
}

impl Head {
    pub fn init(name: &str, dim: usize, classes: usize, rng: &mut SplitMix64) -> Self {
        let std = xavier_std(dim, classes);
        Self {
            w: Param::new(
                format!("{name}.w"),
                vec![dim, classes],
                (0..dim * classes).map(|_| rng.normal_scaled(std)).collect(),
            ),
            b: Param::zeros(format!("{name}.b"), vec![classes]),
            dim,
            classes,
        }
    }

    pub fn forward(&self, tokens: &[f64], seq_len: usize) -> (Vec<f64>, HeadState) {
        let d = self.dim;
        let mut pooled = vec![0.0; d];
        for t in 0..seq_len {
            for j in 0..d {
                pooled[j] += tokens[t * d + j];
            }
        }
        for v in pooled.iter_mut() {
            *v /= seq_len as f64;
        }
        let mut logits = self.b.data.clone();
        for j in 0..d {
            let p = pooled[j];
            if p == 0.0 {
                continue;
            }
            for c in 0..self.classes {
                logits[c] += p * self.w.data[j * self.classes + c];
            }
        }
        (logits, HeadState { pooled, seq_len })
    }

    pub fn backward(&mut self, grad_logits: &[f64], state: &HeadState) -> Vec<f64> {
        let d = self.dim;
        let mut grad_pooled = vec![0.0; d];
        for j in 0..d {
            for c in 0..self.classes {
                self.w.grad[j * self.classes + c] += state.pooled[j] * grad_logits[c];
                grad_pooled[j] += self.w.data[j * self.classes + c] * grad_logits[c];
            }
        }
        for (g, &gl) in self.b.grad.iter_mut().zip(grad_logits) {
            *g += gl;
        }
        let inv_l = 1.0 / state.seq_len as f64;
        let mut grad_tokens = vec![0.0; state.seq_len * d];
        for t in 0..state.seq_len {
            for j in 0..d {
                grad_tokens[t * d + j] = grad_pooled[j] * inv_l;
            }
        }
        grad_tokens
    }

    fn visit(&mut self, f: &mut dyn FnMut(&mut Param)) {
        f(&mut self.w);
        f(&mut self.b);
    }
}

/// Numerically stable softmax cross-entropy; returns the loss and
/// ∂loss/∂logits.
pub fn softmax_cross_entropy(logits: &[f64], label: usize) -> Result<(f64, Vec<f64>)> {
    if label >= logits.len() {
        return Err(Error::InvalidConfig(format!(
            "label {label} out of range for {} classes",
            logits.len()
        )));
    }
    let max = logits.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let exps: Vec<f64> = logits.iter().map(|&v| libm::exp(v - max)).collect();
    let sum: f64 = exps.iter().sum();
    let log_sum = libm::log(sum) + max;
    let loss = log_sum - logits[label];
    let mut grad: Vec<f64> = exps.iter().map(|&e| e / sum).collect();
    grad[label] -= 1.0;
    Ok((loss, grad))
}

// ---------------------------------------------------------------------------
// Full network
// ---------------------------------------------------------------------------

enum Embed {
    Signal(SignalEmbed),
    Patch(PatchEmbed),
}

enum EmbedState {
    Signal(Vec<f64>),
    Patch(PatchEmbedState),
}

/// Embedding + residual blocks + classification head.
pub struct Network {
    pub cfg: ModelConfig,
    embed: Embed,
    pub blocks: Vec<Block>,
    head: Head,
}

/// Saved activations for one sample.
pub struct NetState {
    embed: EmbedState,
    blocks: Vec<BlockState>,
    head: HeadState,
}

impl NetState {
    pub fn block_states(&self) -> &[BlockState] {
        &self.blocks
    }
}

impl Network {
    /// Deterministic initialization from a dedicated stream; the stream is
    /// consumed in declaration order, so equal seeds give bit-identical
    /// parameters.
    pub fn init(cfg: ModelConfig, rng: &mut SplitMix64) -> Result<Self> {
        cfg.validate()?;
        let embed = match cfg.input {
            InputKind::Signal => {
                Embed::Signal(SignalEmbed::init("embed", cfg.seq_len, cfg.embed_dim, rng))
            }
            InputKind::Image => Embed::Patch(PatchEmbed::init("embed", &cfg, rng)),
        };
        let blocks = (0..cfg.depth)
            .map(|i| Block::init(&format!("block{i}"), &cfg, rng))
            .collect::<Result<Vec<_>>>()?;
        let head = Head::init("head", cfg.embed_dim, cfg.num_classes, rng);
        Ok(Self {
            cfg,
            embed,
            blocks,
            head,
        })
    }

    /// Forward for one flat sample; returns logits and the saved state.
    pub fn forward(&self, input: &[f64]) -> Result<(Vec<f64>, NetState)> {
        let sass_cfg = self.cfg.sass_config();
        let (mut x, embed_state) = match &self.embed {
            Embed::Signal(e) => (e.forward(input)?, EmbedState::Signal(input.to_vec())),
            Embed::Patch(e) => {
                let (x, st) = e.forward(input)?;
                (x, EmbedState::Patch(st))
            }
        };
        let mut block_states = Vec::with_capacity(self.blocks.len());
        for block in &self.blocks {
            let (next, st) = block.forward(&x, &sass_cfg)?;
            x = next;
            block_states.push(st);
        }
        let (logits, head_state) = self.head.forward(&x, self.cfg.seq_len);
        Ok((
            logits,
            NetState {
                embed: embed_state,
                blocks: block_states,
                head: head_state,
            },
        ))
    }

    /// Accumulate gradients for one sample given ∂loss/∂logits.
    pub fn backward(&mut self, grad_logits: &[f64], state: &NetState) -> Result<()> {
        let mut grad = self.head.backward(grad_logits, &state.head);
        for (block, st) in self.blocks.iter_mut().zip(state.blocks.iter()).rev() {
            grad = block.backward(&grad, st)?;
        }
        match (&mut self.embed, &state.embed) {
            (Embed::Signal(e), EmbedState::Signal(signal)) => e.backward(signal, &grad),
            (Embed::Patch(e), EmbedState::Patch(st)) => e.backward(st, &grad),
            _ => unreachable!("embedding kind is fixed at construction"),
        }
        Ok(())
    }

    /// Forward + cross-entropy + backward for one labeled sample, scaling
    /// accumulated gradients by `grad_scale` (1/batch for batch means).
    /// Returns (loss, predicted class).
    pub fn train_sample(
        &mut self,
        input: &[f64],
        label: usize,
        grad_scale: f64,
    ) -> Result<(f64, usize)> {
        let (logits, state) = self.forward(input)?;
        let (loss, mut grad_logits) = softmax_cross_entropy(&logits, label)?;
        for g in grad_logits.iter_mut() {
            *g *= grad_scale;
        }
        self.backward(&grad_logits, &state)?;
        Ok((loss, argmax(&logits)))
    }

    /// Forward-only loss/prediction.
    pub fn eval_sample(&self, input: &[f64], label: usize) -> Result<(f64, usize)> {
        let (logits, _) = self.forward(input)?;
        let (loss, _) = softmax_cross_entropy(&logits, label)?;
        Ok((loss, argmax(&logits)))
    }
}

pub fn argmax(values: &[f64]) -> usize {
    let mut best = 0;
    for (i, &v) in values.iter().enumerate() {
        if v > values[best] {
            best = i;
        }
    }
    best
}

impl ParamSet for Network {
    fn visit_params(&mut self, f: &mut dyn FnMut(&mut Param)) {
        match &mut self.embed {
            Embed::Signal(e) => e.visit(f),
            Embed::Patch(e) => e.visit(f),
        }
        for block in &mut self.blocks {
            block.visit(f);
        }
        self.head.visit(f);
    }
}

/// Collect every parameter name in visit order (checkpoint layout helper).
pub fn param_names(net: &mut Network) -> Vec<String> {
    let mut names = Vec::new();
    net.visit_params(&mut |p| names.push(p.name.clone()));
    names
}
