//! Spectral adaptive state space (SASS): the fast path.
//!
//! Three pieces replace the classical (A, B, C, Δ) machinery:
//!
//! 1. **Direct kernel** — one learnable complex kernel per channel,
//!    K = ψ_re + i·ψ_im, Gaussian-initialized, applied by FFT. No
//!    discretization anywhere.
//! 2. **Pulse gate** — input-dependent frequency gates g = σ(|û|·W_g + b_g)
//!    computed from the magnitude spectrum and applied as real scalars, so
//!    the phase of every bin is untouched.
//! 3. **SAGU** — a GLU-style spectral unit (û·W₁) ⊙ σ(|û|·W₂) pairing a
//!    complex linear path with magnitude-driven real gates.
//!
//! Same-length spectral products compute *circular* convolution; the
//! classical kernel semantics are *causal*. Both are first-class here via
//! [`SassMode`]: `Circular` multiplies length-L spectra as printed, and
//! `CausalPadded` zero-pads signal and kernel to the next power of two
//! ≥ 2L−1 so the product reproduces causal convolution on the first L
//! outputs. Gates and SAGU keep their L×L shapes in padded mode by acting on
//! the first L bins and passing padding bins through unchanged.
//!
//! Every forward here returns a saved state, and every stage has an exact
//! hand-written adjoint; gradients of complex quantities follow the
//! (re, im)-as-two-real-parameters convention, which for the linear stages
//! reduces to multiplying by conjugated coefficients.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::autodiff::Param;
use crate::error::Error;
use crate::numerics::{fft, ifft, next_pow2, ComplexVec, Tensor};
use crate::rng::SplitMix64;
use crate::ssm::KernelVec;
use crate::Result;

/// How the spectral product treats convolution wrap-around.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SassMode {
    /// Length-L spectra multiplied directly (circular convolution).
    Circular,
    /// Zero-pad to the next power of two ≥ 2L−1 (causal convolution on the
    /// first L outputs).
    CausalPadded,
}

impl SassMode {
    /// Transform length for signals of length `l` under this mode.
    pub fn padded_len(self, l: usize) -> usize {
        match self {
            SassMode::Circular => l,
            SassMode::CausalPadded => next_pow2(2 * l - 1),
        }
    }
}

/// Which arithmetic feeds the SAGU sigmoid.
///
/// The gate argument |û|·W₂ must be real for the sigmoid to make sense, so
/// the default uses only the real matrix W2_re. The imaginary half W2_im is
/// kept in the parameter set and can be switched in via `ComplexModulus`,
/// which gates on the entry-wise modulus of the full complex product.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SaguGateMode {
    #[default]
    RealPath,
    ComplexModulus,
}

/// Per-channel learnable complex kernel (H×L), plus an optional per-channel
/// scale for the learnable-variance variant.
#[derive(Debug, Clone)]
pub struct SpectralKernel {
    pub psi_re: Param,
    pub psi_im: Param,
    /// Per-channel multiplier, present only when the initialization scale is
    /// learnable (ψ is then drawn from N(0,1) and the scale carries σ).
    pub scale: Option<Param>,
    pub channels: usize,
    pub len: usize,
    pub sigma_init: f64,
}

impl SpectralKernel {
    /// Gaussian initialization: every ψ entry i.i.d. N(0, σ²) from the given
    /// stream. With `learnable_sigma`, ψ ~ N(0, 1) and a per-channel scale
    /// initialized to σ carries the magnitude instead.
    pub fn init(
        name_prefix: &str,
        channels: usize,
        len: usize,
        sigma: f64,
        learnable_sigma: bool,
        rng: &mut SplitMix64,
    ) -> Result<Self> {
        if channels == 0 || len == 0 {
            return Err(Error::EmptyInput);
        }
        if !(sigma > 0.0) {
            return Err(Error::InvalidConfig(format!(
                "kernel init sigma must be > 0, got {sigma}"
            )));
        }
        let draw_std = if learnable_sigma { 1.0 } else { sigma };
        let n = channels * len;
        let psi_re = Param::new(
            format!("{name_prefix}.psi_re"),
            vec![channels, len],
            (0..n).map(|_| rng.normal_scaled(draw_std)).collect(),
        );
        let psi_im = Param::new(
            format!("{name_prefix}.psi_im"),
            vec![channels, len],
            (0..n).map(|_| rng.normal_scaled(draw_std)).collect(),
        );
        let scale = learnable_sigma.then(|| {
            Param::new(
                format!("{name_prefix}.scale"),
                vec![channels],
                vec![sigma; channels],
            )
        });
        Ok(Self {
            psi_re,
            psi_im,
            scale,
            channels,
            len,
            sigma_init: sigma,
        })
    }

    /// Effective time-domain kernel for one channel (scale applied).
    pub fn channel_kernel(&self, channel: usize) -> Result<ComplexVec> {
        if channel >= self.channels {
            return Err(Error::ChannelOutOfRange {
                channel,
                channels: self.channels,
            });
        }
        let s = self.scale.as_ref().map_or(1.0, |p| p.data[channel]);
        let base = channel * self.len;
        let re = self.psi_re.data[base..base + self.len]
            .iter()
            .map(|v| v * s)
            .collect();
        let im = self.psi_im.data[base..base + self.len]
            .iter()
            .map(|v| v * s)
            .collect();
        ComplexVec::new(re, im)
    }
}

/// Pulse-gate weights: W_g (L×L) and b_g (L), shared across channels.
#[derive(Debug, Clone)]
pub struct PulseGateParams {
    pub w_g: Param,
    pub b_g: Param,
    pub len: usize,
}

impl PulseGateParams {
    pub fn init(name_prefix: &str, len: usize, w_std: f64, rng: &mut SplitMix64) -> Self {
        Self {
            w_g: Param::new(
                format!("{name_prefix}.w_g"),
                vec![len, len],
                (0..len * len).map(|_| rng.normal_scaled(w_std)).collect(),
            ),
            b_g: Param::zeros(format!("{name_prefix}.b_g"), vec![len]),
            len,
        }
    }

    /// All-zero weights: g = σ(0) = ½ everywhere. Handy in tests.
    pub fn zeros(name_prefix: &str, len: usize) -> Self {
        Self {
            w_g: Param::zeros(format!("{name_prefix}.w_g"), vec![len, len]),
            b_g: Param::zeros(format!("{name_prefix}.b_g"), vec![len]),
            len,
        }
    }
}

/// SAGU weights: complex W₁ and W₂ as split real matrices (each L×L),
/// shared across channels.
#[derive(Debug, Clone)]
pub struct SaguParams {
    pub w1_re: Param,
    pub w1_im: Param,
    pub w2_re: Param,
    pub w2_im: Param,
    pub len: usize,
    pub gate_mode: SaguGateMode,
}

impl SaguParams {
    /// W₁ starts at the complex identity plus small noise (the unit is then
    /// near a pure pass-through scaled by σ(·)); W₂ starts small and random.
    pub fn init(
        name_prefix: &str,
        len: usize,
        noise_std: f64,
        gate_mode: SaguGateMode,
        rng: &mut SplitMix64,
    ) -> Self {
        let mut w1_re = vec![0.0; len * len];
        for i in 0..len {
            w1_re[i * len + i] = 1.0;
        }
        for v in w1_re.iter_mut() {
            *v += rng.normal_scaled(noise_std);
        }
        let w1_im: Vec<f64> = (0..len * len)
            .map(|_| rng.normal_scaled(noise_std))
            .collect();
        let w2_re: Vec<f64> = (0..len * len)
            .map(|_| rng.normal_scaled(noise_std))
            .collect();
        let w2_im: Vec<f64> = (0..len * len)
            .map(|_| rng.normal_scaled(noise_std))
            .collect();
        Self {
            w1_re: Param::new(format!("{name_prefix}.w1_re"), vec![len, len], w1_re),
            w1_im: Param::new(format!("{name_prefix}.w1_im"), vec![len, len], w1_im),
            w2_re: Param::new(format!("{name_prefix}.w2_re"), vec![len, len], w2_re),
            w2_im: Param::new(format!("{name_prefix}.w2_im"), vec![len, len], w2_im),
            len,
            gate_mode,
        }
    }

    /// W₁ = complex identity, W₂ = 0 (gate ½ everywhere).
    pub fn identity(name_prefix: &str, len: usize) -> Self {
        let mut w1_re = vec![0.0; len * len];
        for i in 0..len {
            w1_re[i * len + i] = 1.0;
        }
        Self {
            w1_re: Param::new(format!("{name_prefix}.w1_re"), vec![len, len], w1_re),
            w1_im: Param::zeros(format!("{name_prefix}.w1_im"), vec![len, len]),
            w2_re: Param::zeros(format!("{name_prefix}.w2_re"), vec![len, len]),
            w2_im: Param::zeros(format!("{name_prefix}.w2_im"), vec![len, len]),
            len,
            gate_mode: SaguGateMode::RealPath,
        }
    }
}

/// Stage order and gating switches for one SASS evaluation.
#[derive(Debug, Clone, Copy)]
pub struct SassConfig {
    pub mode: SassMode,
    /// Apply SAGU before the pulse gate and kernel product (the literal
    /// composition-order reading) instead of after them (the default).
    pub sagu_first: bool,
    /// With gating disabled, the pulse gate becomes the identity and SAGU
    /// collapses to its complex linear path — the ablation baseline.
    pub gating_enabled: bool,
}

impl Default for SassConfig {
    fn default() -> Self {
        Self {
            mode: SassMode::Circular,
            sagu_first: false,
            gating_enabled: true,
        }
    }
}

pub(crate) fn sigmoid(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + libm::exp(-x))
    } else {
        let e = libm::exp(x);
        e / (1.0 + e)
    }
}

/// Kernel spectrum K̂ = F(K) for one channel; padded first in `CausalPadded`
/// mode.
pub fn kernel_spectrum(k: &SpectralKernel, channel: usize, mode: SassMode) -> Result<ComplexVec> {
    let kernel = k.channel_kernel(channel)?;
    let padded = kernel.zero_padded(mode.padded_len(k.len));
    fft(&padded)
}

/// Saved activations from one pulse-gate application.
#[derive(Debug, Clone)]
pub struct PulseGateState {
    /// Spectrum the gate saw (length ≥ L; bins ≥ L pass through).
    pub input: ComplexVec,
    /// Magnitudes of the first L bins.
    pub mag: Vec<f64>,
    /// Gate pre-activations a = |û|·W_g + b_g.
    pub pre: Vec<f64>,
    /// Gates g = σ(a), strictly inside (0, 1).
    pub gate: Vec<f64>,
    /// Gated spectrum ũ.
    pub output: ComplexVec,
}

/// g = σ(|û|·W_g + b_g), ũ = g ⊙ û. Real gates scale each complex bin, so
/// magnitude shrinks or grows but phase is preserved exactly. Spectra longer
/// than L (padded mode) are gated on the first L bins and passed through
/// elsewhere.
pub fn pulse_gate_forward(u_hat: &ComplexVec, p: &PulseGateParams) -> Result<PulseGateState> {
    let l = p.len;
    if u_hat.len() < l {
        return Err(Error::ShapeMismatch {
            context: "pulse_gate input",
            expected: l,
            found: u_hat.len(),
        });
    }
    let mag: Vec<f64> = (0..l)
        .map(|k| libm::sqrt(u_hat.re[k] * u_hat.re[k] + u_hat.im[k] * u_hat.im[k]))
        .collect();

    // a = m·W_g + b_g (m as a row vector).
    let mut pre = p.b_g.data.clone();
    for k in 0..l {
        let m_k = mag[k];
        if m_k == 0.0 {
            continue;
        }
        let row = &p.w_g.data[k * l..(k + 1) * l];
        for j in 0..l {
            pre[j] += m_k * row[j];
        }
    }
    let gate: Vec<f64> = pre.iter().map(|&a| sigmoid(a)).collect();

    let mut output = u_hat.clone();
    for k in 0..l {
        output.re[k] *= gate[k];
        output.im[k] *= gate[k];
    }

    Ok(PulseGateState {
        input: u_hat.clone(),
        mag,
        pre,
        gate,
        output,
    })
}

/// Convenience wrapper matching the (g, ũ) contract.
pub fn pulse_gate(u_hat: &ComplexVec, p: &PulseGateParams) -> Result<(Tensor, ComplexVec)> {
    let state = pulse_gate_forward(u_hat, p)?;
    Ok((Tensor::vector(state.gate), state.output))
}

/// Adjoint of [`pulse_gate_forward`]: accumulates into the parameter grads
/// and returns the gradient w.r.t. û.
pub fn pulse_gate_backward(
    grad_out: &ComplexVec,
    state: &PulseGateState,
    p: &mut PulseGateParams,
) -> Result<ComplexVec> {
    let l = p.len;
    if grad_out.len() != state.input.len() {
        return Err(Error::ShapeMismatch {
            context: "pulse_gate_backward",
            expected: state.input.len(),
            found: grad_out.len(),
        });
    }

    // Pass-through bins first.
    let mut grad_in = grad_out.clone();

    // ∂L/∂g_k = Re(conj(û_k)·gũ_k); gated part of ∂L/∂û is g ⊙ gũ.
    let mut grad_pre = vec![0.0; l];
    for k in 0..l {
        let g_gate = state.input.re[k] * grad_out.re[k] + state.input.im[k] * grad_out.im[k];
        let g = state.gate[k];
        grad_pre[k] = g_gate * g * (1.0 - g);
        grad_in.re[k] = g * grad_out.re[k];
        grad_in.im[k] = g * grad_out.im[k];
    }

    // Bias and weight grads; gradient w.r.t. magnitudes.
    for j in 0..l {
        p.b_g.grad[j] += grad_pre[j];
    }
    let mut grad_mag = vec![0.0; l];
    for k in 0..l {
        let m_k = state.mag[k];
        let wrow = &p.w_g.data[k * l..(k + 1) * l];
        let grow = &mut p.w_g.grad[k * l..(k + 1) * l];
        let mut acc = 0.0;
        for j in 0..l {
            grow[j] += m_k * grad_pre[j];
            acc += wrow[j] * grad_pre[j];
        }
        grad_mag[k] = acc;
    }

    // Magnitude adjoint: ∂|û|/∂û = û/|û| (zero at the origin).
    for k in 0..l {
        let m_k = state.mag[k];
        if m_k > 0.0 {
            let scale = grad_mag[k] / m_k;
            grad_in.re[k] += state.input.re[k] * scale;
            grad_in.im[k] += state.input.im[k] * scale;
        }
    }
    Ok(grad_in)
}

/// Saved activations from one SAGU application.
#[derive(Debug, Clone)]
pub struct SaguState {
    pub input: ComplexVec,
    /// û·W₁ over the first L bins.
    pub linear_re: Vec<f64>,
    pub linear_im: Vec<f64>,
    pub mag: Vec<f64>,
    /// Real gate pre-activation (RealPath) or the real part of the complex
    /// product (ComplexModulus).
    pub pre_re: Vec<f64>,
    /// Imaginary part of the complex product (ComplexModulus only).
    pub pre_im: Vec<f64>,
    /// Modulus fed to the sigmoid (ComplexModulus only).
    pub modulus: Vec<f64>,
    pub gate: Vec<f64>,
    /// Whether the gate branch was active (false collapses the unit to the
    /// linear path).
    pub gated: bool,
    pub output: ComplexVec,
}

/// SAGU(û) = (û·W₁) ⊙ σ(|û|·W₂): complex linear path modulated entry-wise by
/// real gates computed from the magnitude spectrum. Set `gated` to false for
/// the ablation variant (pure û·W₁). Padding bins beyond L pass through.
pub fn sagu_forward(u_hat: &ComplexVec, s: &SaguParams, gated: bool) -> Result<SaguState> {
    let l = s.len;
    if u_hat.len() < l {
        return Err(Error::ShapeMismatch {
            context: "sagu input",
            expected: l,
            found: u_hat.len(),
        });
    }

    // Complex row-vector × matrix: v_j = Σ_k û_k·W₁[k,j].
    let mut linear_re = vec![0.0; l];
    let mut linear_im = vec![0.0; l];
    for k in 0..l {
        let (xr, xi) = (u_hat.re[k], u_hat.im[k]);
        if xr == 0.0 && xi == 0.0 {
            continue;
        }
        let w1r = &s.w1_re.data[k * l..(k + 1) * l];
        let w1i = &s.w1_im.data[k * l..(k + 1) * l];
        for j in 0..l {
            linear_re[j] += xr * w1r[j] - xi * w1i[j];
            linear_im[j] += xr * w1i[j] + xi * w1r[j];
        }
    }

    let mag: Vec<f64> = (0..l)
        .map(|k| libm::sqrt(u_hat.re[k] * u_hat.re[k] + u_hat.im[k] * u_hat.im[k]))
        .collect();

    let mut pre_re = vec![0.0; l];
    let mut pre_im = vec![0.0; l];
    let mut modulus = Vec::new();
    let mut gate = vec![1.0; l];
    if gated {
        for k in 0..l {
            let m_k = mag[k];
            if m_k == 0.0 {
                continue;
            }
            let w2r = &s.w2_re.data[k * l..(k + 1) * l];
            for j in 0..l {
                pre_re[j] += m_k * w2r[j];
            }
            if s.gate_mode == SaguGateMode::ComplexModulus {
                let w2i = &s.w2_im.data[k * l..(k + 1) * l];
                for j in 0..l {
                    pre_im[j] += m_k * w2i[j];
                }
            }
        }
        match s.gate_mode {
            SaguGateMode::RealPath => {
                for j in 0..l {
                    gate[j] = sigmoid(pre_re[j]);
                }
            }
            SaguGateMode::ComplexModulus => {
                modulus = (0..l)
                    .map(|j| libm::sqrt(pre_re[j] * pre_re[j] + pre_im[j] * pre_im[j]))
                    .collect();
                for j in 0..l {
                    gate[j] = sigmoid(modulus[j]);
                }
            }
        }
    }

    let mut output = u_hat.clone();
    for j in 0..l {
        output.re[j] = linear_re[j] * gate[j];
        output.im[j] = linear_im[j] * gate[j];
    }

    Ok(SaguState {
        input: u_hat.clone(),
        linear_re,
        linear_im,
        mag,
        pre_re,
        pre_im,
        modulus,
        gate,
        gated,
        output,
    })
}

/// Convenience wrapper returning only the transformed spectrum.
pub fn sagu(u_hat: &ComplexVec, s: &SaguParams) -> Result<ComplexVec> {
    Ok(sagu_forward(u_hat, s, true)?.output)
}

/// Adjoint of [`sagu_forward`].
pub fn sagu_backward(
    grad_out: &ComplexVec,
    state: &SaguState,
    s: &mut SaguParams,
) -> Result<ComplexVec> {
    let l = s.len;
    if grad_out.len() != state.input.len() {
        return Err(Error::ShapeMismatch {
            context: "sagu_backward",
            expected: state.input.len(),
            found: grad_out.len(),
        });
    }

    let mut grad_in = grad_out.clone();
    for v in grad_in.re[..l].iter_mut() {
        *v = 0.0;
    }
    for v in grad_in.im[..l].iter_mut() {
        *v = 0.0;
    }

    // Output = linear ⊙ gate.
    let mut grad_lin_re = vec![0.0; l];
    let mut grad_lin_im = vec![0.0; l];
    let mut grad_gate = vec![0.0; l];
    for j in 0..l {
        grad_lin_re[j] = state.gate[j] * grad_out.re[j];
        grad_lin_im[j] = state.gate[j] * grad_out.im[j];
        grad_gate[j] = state.linear_re[j] * grad_out.re[j] + state.linear_im[j] * grad_out.im[j];
    }

    let mut grad_mag = vec![0.0; l];
    if state.gated {
        // Through the sigmoid to its (real) argument.
        let mut grad_arg: Vec<f64> = (0..l)
            .map(|j| grad_gate[j] * state.gate[j] * (1.0 - state.gate[j]))
            .collect();

        // ComplexModulus: argument = |pre|; split onto (pre_re, pre_im).
        let mut grad_pre_im = vec![0.0; l];
        if s.gate_mode == SaguGateMode::ComplexModulus {
            let mut grad_pre_re = vec![0.0; l];
            for j in 0..l {
                let r = state.modulus[j];
                if r > 0.0 {
                    grad_pre_re[j] = grad_arg[j] * state.pre_re[j] / r;
                    grad_pre_im[j] = grad_arg[j] * state.pre_im[j] / r;
                }
            }
            grad_arg = grad_pre_re;
        }

        // pre = m·W₂ (both halves in modulus mode).
        for k in 0..l {
            let m_k = state.mag[k];
            let w2r = &s.w2_re.data[k * l..(k + 1) * l];
            let g2r = &mut s.w2_re.grad[k * l..(k + 1) * l];
            let mut acc = 0.0;
            for j in 0..l {
                g2r[j] += m_k * grad_arg[j];
                acc += w2r[j] * grad_arg[j];
            }
            if s.gate_mode == SaguGateMode::ComplexModulus {
                let w2i = &s.w2_im.data[k * l..(k + 1) * l];
                let g2i = &mut s.w2_im.grad[k * l..(k + 1) * l];
                for j in 0..l {
                    g2i[j] += m_k * grad_pre_im[j];
                    acc += w2i[j] * grad_pre_im[j];
                }
            }
            grad_mag[k] = acc;
        }
    }

    // Linear path: v = û·W₁.
    for k in 0..l {
        let (xr, xi) = (state.input.re[k], state.input.im[k]);
        let w1r = &s.w1_re.data[k * l..(k + 1) * l];
        let w1i = &s.w1_im.data[k * l..(k + 1) * l];
        let g1r = &mut s.w1_re.grad[k * l..(k + 1) * l];
        let mut acc_re = 0.0;
        let mut acc_im = 0.0;
        for j in 0..l {
            g1r[j] += xr * grad_lin_re[j] + xi * grad_lin_im[j];
            acc_re += w1r[j] * grad_lin_re[j] + w1i[j] * grad_lin_im[j];
            acc_im += w1r[j] * grad_lin_im[j] - w1i[j] * grad_lin_re[j];
        }
        let g1i = &mut s.w1_im.grad[k * l..(k + 1) * l];
        for j in 0..l {
            g1i[j] += xr * grad_lin_im[j] - xi * grad_lin_re[j];
        }
        grad_in.re[k] += acc_re;
        grad_in.im[k] += acc_im;

        // Magnitude adjoint.
        let m_k = state.mag[k];
        if state.gated && m_k > 0.0 {
            let scale = grad_mag[k] / m_k;
            grad_in.re[k] += xr * scale;
            grad_in.im[k] += xi * scale;
        }
    }

    Ok(grad_in)
}

/// Saved activations for one channel of a SASS pass.
#[derive(Debug, Clone)]
struct ChannelState {
    /// Input spectrum û (before any stage).
    u_hat_len: usize,
    pulse: Option<PulseGateState>,
    sagu: SaguState,
    /// Spectrum entering the kernel product.
    pre_kernel: ComplexVec,
    k_hat: ComplexVec,
}

/// Saved forward state consumed by [`sass_backward`].
#[derive(Debug, Clone)]
pub struct SassState {
    channels: Vec<ChannelState>,
    cfg: SassConfig,
    seq_len: usize,
    num_channels: usize,
    padded_len: usize,
}

impl SassState {
    /// Gate vectors per channel (each length L); empty when gating is
    /// disabled.
    pub fn gates(&self) -> Vec<&[f64]> {
        self.channels
            .iter()
            .filter_map(|c| c.pulse.as_ref().map(|p| p.gate.as_slice()))
            .collect()
    }
}

/// Full SASS forward over a token block U (L×H): per channel,
/// FFT → pulse gate → ⊙K̂ → SAGU → inverse FFT, real part. The returned
/// state carries everything the backward pass needs.
pub fn sass_forward(
    u: &Tensor,
    kernel: &SpectralKernel,
    pulse: &PulseGateParams,
    sagu_params: &SaguParams,
    cfg: &SassConfig,
) -> Result<(Tensor, SassState)> {
    let shape = u.shape();
    if shape.len() != 2 {
        return Err(Error::InvalidConfig(format!(
            "sass_forward expects a rank-2 L×H tensor, got rank {}",
            shape.len()
        )));
    }
    let (l, h) = (shape[0], shape[1]);
    if l != kernel.len || h != kernel.channels {
        return Err(Error::ShapeMismatch {
            context: "sass_forward kernel dims",
            expected: kernel.len * kernel.channels,
            found: l * h,
        });
    }
    if pulse.len != l || sagu_params.len != l {
        return Err(Error::ShapeMismatch {
            context: "sass_forward gate dims",
            expected: l,
            found: pulse.len.min(sagu_params.len),
        });
    }

    let padded = cfg.mode.padded_len(l);
    let mut out = Tensor::zeros(vec![l, h])?;
    let mut channels = Vec::with_capacity(h);

    for ch in 0..h {
        // Column → padded real signal → spectrum.
        let mut col = ComplexVec::zeros(padded);
        for t in 0..l {
            col.re[t] = u.at2(t, ch);
        }
        let u_hat = fft(&col)?;
        let k_hat = kernel_spectrum(kernel, ch, cfg.mode)?;

        let (pulse_state, sagu_state, pre_kernel, w_hat);
        if cfg.sagu_first {
            let sg = sagu_forward(&u_hat, sagu_params, cfg.gating_enabled)?;
            let (ps, gated) = if cfg.gating_enabled {
                let st = pulse_gate_forward(&sg.output, pulse)?;
                let out = st.output.clone();
                (Some(st), out)
            } else {
                (None, sg.output.clone())
            };
            pre_kernel = gated;
            w_hat = crate::numerics::pointwise_mul(&pre_kernel, &k_hat)?;
            pulse_state = ps;
            sagu_state = sg;
        } else {
            let (ps, gated) = if cfg.gating_enabled {
                let st = pulse_gate_forward(&u_hat, pulse)?;
                let out = st.output.clone();
                (Some(st), out)
            } else {
                (None, u_hat.clone())
            };
            pre_kernel = gated;
            let v_hat = crate::numerics::pointwise_mul(&pre_kernel, &k_hat)?;
            let sg = sagu_forward(&v_hat, sagu_params, cfg.gating_enabled)?;
            w_hat = sg.output.clone();
            pulse_state = ps;
            sagu_state = sg;
        }

        let y_full = ifft(&w_hat)?;
        for t in 0..l {
            out.data_mut()[t * h + ch] = y_full.re[t];
        }

        channels.push(ChannelState {
            u_hat_len: u_hat.len(),
            pulse: pulse_state,
            sagu: sagu_state,
            pre_kernel,
            k_hat,
        });
    }

    let state = SassState {
        channels,
        cfg: *cfg,
        seq_len: l,
        num_channels: h,
        padded_len: padded,
    };
    Ok((out, state))
}

/// Reverse pass of [`sass_forward`]: accumulates parameter gradients and
/// returns ∂loss/∂U (L×H).
pub fn sass_backward(
    grad_y: &Tensor,
    state: &SassState,
    kernel: &mut SpectralKernel,
    pulse: &mut PulseGateParams,
    sagu_params: &mut SaguParams,
) -> Result<Tensor> {
    let (l, h, p) = (state.seq_len, state.num_channels, state.padded_len);
    if grad_y.shape() != [l, h] {
        return Err(Error::ShapeMismatch {
            context: "sass_backward grad shape",
            expected: l * h,
            found: grad_y.data().len(),
        });
    }
    let cfg = state.cfg;
    let mut grad_u = Tensor::zeros(vec![l, h])?;

    for ch in 0..h {
        let cs = &state.channels[ch];
        debug_assert_eq!(cs.u_hat_len, p);

        // y = Re(ifft(ŵ)[0..L]); adjoint of ifft is (1/P)·fft.
        let mut seed = ComplexVec::zeros(p);
        for t in 0..l {
            seed.re[t] = grad_y.at2(t, ch);
        }
        let mut grad_w_hat = fft(&seed)?;
        grad_w_hat.scale(1.0 / p as f64);

        // Walk the stages in reverse.
        let grad_u_hat = if cfg.sagu_first {
            // ... ← sagu ← pulse ← ⊙K̂ ← ifft
            let grad_v = grad_w_hat;
            let (grad_pre_kernel, grad_k_hat) = mul_backward(&grad_v, &cs.pre_kernel, &cs.k_hat)?;
            accumulate_kernel_grad(kernel, ch, &grad_k_hat, cfg.mode)?;
            let grad_sagu_out = match (&cs.pulse, cfg.gating_enabled) {
                (Some(ps), true) => pulse_gate_backward(&grad_pre_kernel, ps, pulse)?,
                _ => grad_pre_kernel,
            };
            sagu_backward(&grad_sagu_out, &cs.sagu, sagu_params)?
        } else {
            // ... ← pulse ← ⊙K̂ ← sagu ← ifft
            let grad_v = sagu_backward(&grad_w_hat, &cs.sagu, sagu_params)?;
            let (grad_pre_kernel, grad_k_hat) = mul_backward(&grad_v, &cs.pre_kernel, &cs.k_hat)?;
            accumulate_kernel_grad(kernel, ch, &grad_k_hat, cfg.mode)?;
            match (&cs.pulse, cfg.gating_enabled) {
                (Some(ps), true) => pulse_gate_backward(&grad_pre_kernel, ps, pulse)?,
                _ => grad_pre_kernel,
            }
        };

        // û = fft(real-embedded u); adjoint is P·ifft followed by taking the
        // real part and dropping the padding.
        let mut grad_col = ifft(&grad_u_hat)?;
        grad_col.scale(p as f64);
        for t in 0..l {
            grad_u.data_mut()[t * h + ch] = grad_col.re[t];
        }
    }

    Ok(grad_u)
}

/// Adjoint of v̂ = a ⊙ b: (conj(b)⊙gv̂, conj(a)⊙gv̂).
fn mul_backward(
    grad: &ComplexVec,
    a: &ComplexVec,
    b: &ComplexVec,
) -> Result<(ComplexVec, ComplexVec)> {
    let ga = crate::numerics::pointwise_mul(&b.conj(), grad)?;
    let gb = crate::numerics::pointwise_mul(&a.conj(), grad)?;
    Ok((ga, gb))
}

/// Push a gradient on K̂ back to the ψ (and scale) parameters:
/// gψ = P·ifft(gK̂) truncated to L.
fn accumulate_kernel_grad(
    kernel: &mut SpectralKernel,
    channel: usize,
    grad_k_hat: &ComplexVec,
    mode: SassMode,
) -> Result<()> {
    let p = grad_k_hat.len();
    debug_assert_eq!(p, mode.padded_len(kernel.len));
    let mut g = ifft(grad_k_hat)?;
    g.scale(p as f64);

    let l = kernel.len;
    let base = channel * l;
    match &mut kernel.scale {
        None => {
            for t in 0..l {
                kernel.psi_re.grad[base + t] += g.re[t];
                kernel.psi_im.grad[base + t] += g.im[t];
            }
        }
        Some(scale) => {
            let s = scale.data[channel];
            let mut scale_grad = 0.0;
            for t in 0..l {
                kernel.psi_re.grad[base + t] += s * g.re[t];
                kernel.psi_im.grad[base + t] += s * g.im[t];
                scale_grad +=
                    kernel.psi_re.data[base + t] * g.re[t] + kernel.psi_im.data[base + t] * g.im[t];
            }
            scale.grad[channel] += scale_grad;
        }
    }
    Ok(())
}

/// Copy a real target directly into an H=1 kernel: the learned space is all
/// of ℂ^L, so every unrolled (A, B, C) kernel is exactly representable.
/// Returns the (exactly zero) remaining L2 error.
pub fn assign_exact(target: &KernelVec, kernel: &mut SpectralKernel) -> Result<f64> {
    fit_precondition(target, kernel)?;
    kernel.psi_re.data.copy_from_slice(&target.values);
    kernel.psi_im.data.fill(0.0);
    Ok(kernel_l2_error(target, kernel))
}

/// Plain gradient descent on ‖(ψ_re + i·ψ_im) − target‖₂² from the current
/// (Gaussian) initialization. Returns the final L2 error ‖K − target‖₂.
///
/// The objective is strictly convex with gradient Lipschitz constant 2, so
/// any lr < 1 contracts the residual by |1 − 2·lr| per step.
pub fn fit_kernel(
    target: &KernelVec,
    kernel: &mut SpectralKernel,
    steps: usize,
    lr: f64,
) -> Result<f64> {
    fit_precondition(target, kernel)?;
    let l = kernel.len;
    for _ in 0..steps {
        for t in 0..l {
            let res_re = kernel.psi_re.data[t] - target.values[t];
            let res_im = kernel.psi_im.data[t];
            kernel.psi_re.data[t] -= lr * 2.0 * res_re;
            kernel.psi_im.data[t] -= lr * 2.0 * res_im;
        }
    }
    Ok(kernel_l2_error(target, kernel))
}

/// ‖K − target‖₂ for an H=1 kernel against a real target.
pub fn kernel_l2_error(target: &KernelVec, kernel: &SpectralKernel) -> f64 {
    let mut sq = 0.0;
    for t in 0..kernel.len {
        let dr = kernel.psi_re.data[t] - target.values[t];
        let di = kernel.psi_im.data[t];
        sq += dr * dr + di * di;
    }
    libm::sqrt(sq)
}

fn fit_precondition(target: &KernelVec, kernel: &SpectralKernel) -> Result<()> {
    if kernel.channels != 1 {
        return Err(Error::InvalidConfig(format!(
            "kernel fitting expects H = 1, got {}",
            kernel.channels
        )));
    }
    if kernel.scale.is_some() {
        return Err(Error::InvalidConfig(
            "kernel fitting expects a plain (non-scaled) kernel".into(),
        ));
    }
    if target.values.len() != kernel.len {
        return Err(Error::ShapeMismatch {
            context: "fit_kernel target",
            expected: kernel.len,
            found: target.values.len(),
        });
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::autodiff::{grad_check, ParamSet};
    use crate::numerics::{dft_direct, magnitude, pointwise_mul};
    use crate::ssm::{discretize, random_stable_system, unroll_kernel};
    use alloc::vec;

    fn plain_kernel(h: usize, l: usize, seed: u64) -> SpectralKernel {
        let mut rng = SplitMix64::new(seed);
        SpectralKernel::init("k", h, l, 0.5, false, &mut rng).unwrap()
    }

    fn random_complex(l: usize, amp: f64, rng: &mut SplitMix64) -> ComplexVec {
        ComplexVec::new(
            (0..l).map(|_| rng.uniform(-amp, amp)).collect(),
            (0..l).map(|_| rng.uniform(-amp, amp)).collect(),
        )
        .unwrap()
    }

    /// Direct complex circular convolution: the O(L²) reference for the
    /// spectral product with a complex kernel.
    fn complex_circular_conv(k: &ComplexVec, u: &[f64]) -> ComplexVec {
        let l = u.len();
        let mut out = ComplexVec::zeros(l);
        for i in 0..l {
            let mut re = 0.0;
            let mut im = 0.0;
            for m in 0..l {
                let x = u[(i + l - m) % l];
                re += k.re[m] * x;
                im += k.im[m] * x;
            }
            out.re[i] = re;
            out.im[i] = im;
        }
        out
    }

    /// Direct complex causal convolution on the first L outputs.
    fn complex_causal_conv(k: &ComplexVec, u: &[f64]) -> ComplexVec {
        let l = u.len();
        let mut out = ComplexVec::zeros(l);
        for i in 0..l {
            let mut re = 0.0;
            let mut im = 0.0;
            for m in 0..=i {
                re += k.re[m] * u[i - m];
                im += k.im[m] * u[i - m];
            }
            out.re[i] = re;
            out.im[i] = im;
        }
        out
    }

    #[test]
    fn kernel_spectrum_delta_and_zero() {
        let l = 8;
        let mut k = plain_kernel(1, l, 1);
        k.psi_re.data.fill(0.0);
        k.psi_im.data.fill(0.0);
        let spec = kernel_spectrum(&k, 0, SassMode::Circular).unwrap();
        assert!(spec.re.iter().chain(spec.im.iter()).all(|&v| v == 0.0));

        k.psi_re.data[0] = 1.0;
        let spec = kernel_spectrum(&k, 0, SassMode::Circular).unwrap();
        for i in 0..l {
            assert!((spec.re[i] - 1.0).abs() < 1e-15);
            assert!(spec.im[i].abs() < 1e-15);
        }
    }

    #[test]
    fn kernel_spectrum_matches_direct_dft() {
        let l = 16;
        let k = plain_kernel(3, l, 2);
        for ch in 0..3 {
            let spec = kernel_spectrum(&k, ch, SassMode::Circular).unwrap();
            let oracle = dft_direct(&k.channel_kernel(ch).unwrap()).unwrap();
            for i in 0..l {
                assert!((spec.re[i] - oracle.re[i]).abs() < 1e-10);
                assert!((spec.im[i] - oracle.im[i]).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn kernel_spectrum_channel_out_of_range() {
        let k = plain_kernel(2, 8, 3);
        assert!(matches!(
            kernel_spectrum(&k, 2, SassMode::Circular),
            Err(Error::ChannelOutOfRange { .. })
        ));
    }

    #[test]
    fn pulse_gate_zero_weights_halves_everything() {
        let l = 6;
        let p = PulseGateParams::zeros("p", l);
        let mut rng = SplitMix64::new(4);
        let u_hat = random_complex(l, 1.0, &mut rng);
        let (g, u_tilde) = pulse_gate(&u_hat, &p).unwrap();
        for k in 0..l {
            assert_eq!(g.data()[k], 0.5);
            assert!((u_tilde.re[k] - 0.5 * u_hat.re[k]).abs() < 1e-15);
            assert!((u_tilde.im[k] - 0.5 * u_hat.im[k]).abs() < 1e-15);
        }
    }

    #[test]
    fn pulse_gate_saturated_bias_is_near_identity() {
        let l = 6;
        let mut p = PulseGateParams::zeros("p", l);
        p.b_g.data.fill(20.0);
        let mut rng = SplitMix64::new(5);
        let u_hat = random_complex(l, 1.0, &mut rng);
        let (g, u_tilde) = pulse_gate(&u_hat, &p).unwrap();
        for k in 0..l {
            assert!(g.data()[k] > 0.99999);
            let rel = (u_tilde.re[k] - u_hat.re[k]).abs() / u_hat.re[k].abs().max(1e-12);
            assert!(rel < 1e-4);
        }
    }

    #[test]
    fn pulse_gate_hand_example() {
        // û = (3+4i, 0), W_g = I, b_g = 0.
        let l = 2;
        let mut p = PulseGateParams::zeros("p", l);
        p.w_g.data[0] = 1.0;
        p.w_g.data[3] = 1.0;
        let u_hat = ComplexVec::new(vec![3.0, 0.0], vec![4.0, 0.0]).unwrap();
        let (g, u_tilde) = pulse_gate(&u_hat, &p).unwrap();
        assert!((g.data()[0] - 0.9933071).abs() < 1e-6);
        assert_eq!(g.data()[1], 0.5);
        assert!((u_tilde.re[0] - 2.9799).abs() < 1e-4);
        assert!((u_tilde.im[0] - 3.9732).abs() < 1e-4);
        assert_eq!(u_tilde.re[1], 0.0);
    }

    #[test]
    fn pulse_gate_rejects_short_input() {
        let p = PulseGateParams::zeros("p", 8);
        let u = ComplexVec::zeros(4);
        assert!(matches!(
            pulse_gate(&u, &p),
            Err(Error::ShapeMismatch { .. })
        ));
    }

    #[test]
    fn gate_range_and_phase_preservation() {
        let l = 32;
        let mut rng = SplitMix64::new(6);
        let mut p = PulseGateParams::zeros("p", l);
        for v in p.w_g.data.iter_mut() {
            *v = rng.normal_scaled(0.2);
        }
        for v in p.b_g.data.iter_mut() {
            *v = rng.normal_scaled(2.0);
        }
        for trial in 0..50 {
            let u_hat = random_complex(l, 2.0, &mut rng);
            let (g, u_tilde) = pulse_gate(&u_hat, &p).unwrap();
            for k in 0..l {
                let gk = g.data()[k];
                assert!(gk > 0.0 && gk < 1.0, "trial {trial}: gate {gk}");
                let mag = libm::sqrt(u_hat.re[k] * u_hat.re[k] + u_hat.im[k] * u_hat.im[k]);
                if gk > 0.0 && mag > 1e-9 {
                    let before = libm::atan2(u_hat.im[k], u_hat.re[k]);
                    let after = libm::atan2(u_tilde.im[k], u_tilde.re[k]);
                    assert!(
                        (before - after).abs() < 1e-12,
                        "phase moved: {before} -> {after}"
                    );
                }
            }
        }
    }

    #[test]
    fn gate_vector_invariant_under_cyclic_shift() {
        let l = 48;
        let mut rng = SplitMix64::new(7);
        let mut p = PulseGateParams::zeros("p", l);
        for v in p.w_g.data.iter_mut() {
            *v = rng.normal_scaled(0.1);
        }
        let u: Vec<f64> = (0..l).map(|_| rng.uniform(-1.0, 1.0)).collect();
        for shift in [1usize, 5, 17, 31] {
            let shifted: Vec<f64> = (0..l).map(|t| u[(t + shift) % l]).collect();
            let g0 = pulse_gate(&fft(&ComplexVec::from_real(&u)).unwrap(), &p)
                .unwrap()
                .0;
            let g1 = pulse_gate(&fft(&ComplexVec::from_real(&shifted)).unwrap(), &p)
                .unwrap()
                .0;
            for k in 0..l {
                assert!(
                    (g0.data()[k] - g1.data()[k]).abs() < 1e-10,
                    "shift {shift}, bin {k}"
                );
            }
        }
    }

    #[test]
    fn sagu_identity_linear_with_zero_gate_weights() {
        let l = 5;
        let s = SaguParams::identity("s", l);
        let mut rng = SplitMix64::new(8);
        let u_hat = random_complex(l, 1.0, &mut rng);
        let out = sagu(&u_hat, &s).unwrap();
        for k in 0..l {
            assert!((out.re[k] - 0.5 * u_hat.re[k]).abs() < 1e-15);
            assert!((out.im[k] - 0.5 * u_hat.im[k]).abs() < 1e-15);
        }
    }

    #[test]
    fn sagu_of_zero_is_zero() {
        let s = SaguParams::identity("s", 4);
        let out = sagu(&ComplexVec::zeros(4), &s).unwrap();
        assert!(out.re.iter().chain(out.im.iter()).all(|&v| v == 0.0));
    }

    #[test]
    fn sagu_scalar_hand_example() {
        // L=1: û = 1, W₁ = 2, W₂ = 3 → 2·σ(3) = 1.90514825.
        let mut s = SaguParams::identity("s", 1);
        s.w1_re.data[0] = 2.0;
        s.w2_re.data[0] = 3.0;
        let u_hat = ComplexVec::new(vec![1.0], vec![0.0]).unwrap();
        let out = sagu(&u_hat, &s).unwrap();
        assert!((out.re[0] - 1.90514825).abs() < 1e-8);
        assert!(out.im[0].abs() < 1e-15);
    }

    #[test]
    fn sass_zero_input_gives_zero_output() {
        let l = 8;
        let h = 2;
        let kernel = plain_kernel(h, l, 9);
        let mut rng = SplitMix64::new(10);
        let pulse = PulseGateParams::init("p", l, 0.1, &mut rng);
        let sagu_p = SaguParams::init("s", l, 0.1, SaguGateMode::RealPath, &mut rng);
        let u = Tensor::zeros(vec![l, h]).unwrap();
        let (y, _) = sass_forward(&u, &kernel, &pulse, &sagu_p, &SassConfig::default()).unwrap();
        assert!(y.data().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn sass_identity_pipeline_near_passthrough() {
        // δ₀ kernel, saturated pulse gate, SAGU identity with huge diagonal
        // gate weights: the whole pipeline collapses to ≈ identity.
        let l = 16;
        let mut kernel = plain_kernel(1, l, 11);
        kernel.psi_re.data.fill(0.0);
        kernel.psi_im.data.fill(0.0);
        kernel.psi_re.data[0] = 1.0;
        let mut pulse = PulseGateParams::zeros("p", l);
        pulse.b_g.data.fill(20.0);
        let mut sagu_p = SaguParams::identity("s", l);
        for i in 0..l {
            sagu_p.w2_re.data[i * l + i] = 1e12;
        }
        let mut rng = SplitMix64::new(12);
        let u_data: Vec<f64> = (0..l).map(|_| rng.uniform(-1.0, 1.0)).collect();
        let u = Tensor::new(vec![l, 1], u_data.clone()).unwrap();
        let (y, _) = sass_forward(&u, &kernel, &pulse, &sagu_p, &SassConfig::default()).unwrap();
        for t in 0..l {
            assert!(
                (y.data()[t] - u_data[t]).abs() < 1e-3,
                "t={t}: {} vs {}",
                y.data()[t],
                u_data[t]
            );
        }
    }

    #[test]
    fn sass_gating_disabled_equals_plain_spectral_convolution() {
        // With gating off the pipeline is exactly Re(F⁻¹(F(u)⊙F(K))); check
        // against the direct complex circular convolution.
        let l = 32;
        let kernel = plain_kernel(1, l, 13);
        let pulse = PulseGateParams::zeros("p", l);
        let sagu_p = SaguParams::identity("s", l);
        let mut rng = SplitMix64::new(14);
        let u_data: Vec<f64> = (0..l).map(|_| rng.uniform(-1.0, 1.0)).collect();
        let u = Tensor::new(vec![l, 1], u_data.clone()).unwrap();
        let cfg = SassConfig {
            gating_enabled: false,
            ..SassConfig::default()
        };
        let (y, _) = sass_forward(&u, &kernel, &pulse, &sagu_p, &cfg).unwrap();
        let oracle = complex_circular_conv(&kernel.channel_kernel(0).unwrap(), &u_data);
        for t in 0..l {
            assert!((y.data()[t] - oracle.re[t]).abs() < 1e-10);
        }
    }

    #[test]
    fn sass_saturated_gates_match_circular_oracle() {
        // b_g = +20 and a huge-diagonal SAGU gate: the gates sit within
        // ~2e-9 of 1, so unit-energy signals stay within 1e-9 of the pure
        // spectral convolution; [-1,1] signals stay within 1e-3.
        for l in [8usize, 32, 128, 256] {
            let mut rng = SplitMix64::new(15 + l as u64);
            let kernel = {
                let mut k = plain_kernel(1, l, 16 + l as u64);
                let amp = 0.5 / libm::sqrt(l as f64);
                for v in k.psi_re.data.iter_mut() {
                    *v = rng.uniform(-amp, amp);
                }
                for v in k.psi_im.data.iter_mut() {
                    *v = rng.uniform(-amp, amp);
                }
                k
            };
            let mut pulse = PulseGateParams::zeros("p", l);
            pulse.b_g.data.fill(20.0);
            let mut sagu_p = SaguParams::identity("s", l);
            for i in 0..l {
                sagu_p.w2_re.data[i * l + i] = 1e12;
            }
            let amp = 0.5 / libm::sqrt(l as f64);
            let u_data: Vec<f64> = (0..l).map(|_| rng.uniform(-amp, amp)).collect();
            let u = Tensor::new(vec![l, 1], u_data.clone()).unwrap();
            let (y, _) =
                sass_forward(&u, &kernel, &pulse, &sagu_p, &SassConfig::default()).unwrap();
            let oracle = complex_circular_conv(&kernel.channel_kernel(0).unwrap(), &u_data);
            for t in 0..l {
                assert!(
                    (y.data()[t] - oracle.re[t]).abs() < 1e-9,
                    "L={l}, t={t}: {} vs {}",
                    y.data()[t],
                    oracle.re[t]
                );
            }
        }
    }

    #[test]
    fn sass_saturated_gates_unit_scale_inputs_within_1e3() {
        let l = 32;
        let mut rng = SplitMix64::new(17);
        let kernel = plain_kernel(1, l, 18);
        let mut pulse = PulseGateParams::zeros("p", l);
        pulse.b_g.data.fill(20.0);
        let mut sagu_p = SaguParams::identity("s", l);
        for i in 0..l {
            sagu_p.w2_re.data[i * l + i] = 1e12;
        }
        let u_data: Vec<f64> = (0..l).map(|_| rng.uniform(-1.0, 1.0)).collect();
        let u = Tensor::new(vec![l, 1], u_data.clone()).unwrap();
        let (y, _) = sass_forward(&u, &kernel, &pulse, &sagu_p, &SassConfig::default()).unwrap();
        let oracle = complex_circular_conv(&kernel.channel_kernel(0).unwrap(), &u_data);
        for t in 0..l {
            assert!((y.data()[t] - oracle.re[t]).abs() < 1e-3);
        }
    }

    #[test]
    fn sass_causal_padded_matches_causal_oracle() {
        for l in [8usize, 33, 128, 256] {
            let mut rng = SplitMix64::new(19 + l as u64);
            let amp = 0.5 / libm::sqrt(l as f64);
            let mut kernel = plain_kernel(1, l, 20 + l as u64);
            for v in kernel.psi_re.data.iter_mut() {
                *v = rng.uniform(-amp, amp);
            }
            for v in kernel.psi_im.data.iter_mut() {
                *v = rng.uniform(-amp, amp);
            }
            let mut pulse = PulseGateParams::zeros("p", l);
            pulse.b_g.data.fill(20.0);
            let mut sagu_p = SaguParams::identity("s", l);
            for i in 0..l {
                sagu_p.w2_re.data[i * l + i] = 1e12;
            }
            let u_data: Vec<f64> = (0..l).map(|_| rng.uniform(-amp, amp)).collect();
            let u = Tensor::new(vec![l, 1], u_data.clone()).unwrap();
            let cfg = SassConfig {
                mode: SassMode::CausalPadded,
                ..SassConfig::default()
            };
            let (y, _) = sass_forward(&u, &kernel, &pulse, &sagu_p, &cfg).unwrap();
            let oracle = complex_causal_conv(&kernel.channel_kernel(0).unwrap(), &u_data);
            for t in 0..l {
                assert!(
                    (y.data()[t] - oracle.re[t]).abs() < 1e-9,
                    "L={l}, t={t}: {} vs {}",
                    y.data()[t],
                    oracle.re[t]
                );
            }
        }
    }

    #[test]
    fn sass_deterministic_per_seed() {
        let build = || {
            let l = 12;
            let h = 3;
            let mut rng = SplitMix64::new(77);
            let kernel = SpectralKernel::init("k", h, l, 0.02, false, &mut rng).unwrap();
            let pulse = PulseGateParams::init("p", l, 0.1, &mut rng);
            let sagu_p = SaguParams::init("s", l, 0.1, SaguGateMode::RealPath, &mut rng);
            let u_data: Vec<f64> = (0..l * h).map(|_| rng.uniform(-1.0, 1.0)).collect();
            let u = Tensor::new(vec![l, h], u_data).unwrap();
            let (y, state) =
                sass_forward(&u, &kernel, &pulse, &sagu_p, &SassConfig::default()).unwrap();
            let gates: Vec<u64> = state
                .gates()
                .iter()
                .flat_map(|g| g.iter().map(|v| v.to_bits()))
                .collect();
            let kernel_bits: Vec<u64> = kernel.psi_re.data.iter().map(|v| v.to_bits()).collect();
            let y_bits: Vec<u64> = y.data().iter().map(|v| v.to_bits()).collect();
            (kernel_bits, gates, y_bits)
        };
        assert_eq!(build(), build());
    }

    // -- gradient checks ----------------------------------------------------

    /// Wraps one SASS instance plus its (real) input as a flat ParamSet so
    /// the finite-difference checker can sweep everything, input included.
    struct SassHarness {
        input: crate::autodiff::Param,
        kernel: SpectralKernel,
        pulse: PulseGateParams,
        sagu: SaguParams,
        cfg: SassConfig,
        loss_weights: Vec<f64>,
        l: usize,
        h: usize,
    }

    impl SassHarness {
        fn new(
            l: usize,
            h: usize,
            cfg: SassConfig,
            gate_mode: SaguGateMode,
            learnable_sigma: bool,
            seed: u64,
        ) -> Self {
            let mut rng = SplitMix64::new(seed);
            let kernel = SpectralKernel::init("k", h, l, 0.4, learnable_sigma, &mut rng).unwrap();
            let pulse = PulseGateParams::init("p", l, 0.3, &mut rng);
            let sagu = SaguParams::init("s", l, 0.3, gate_mode, &mut rng);
            let input = crate::autodiff::Param::new(
                "input",
                vec![l, h],
                (0..l * h).map(|_| rng.uniform(-1.0, 1.0)).collect(),
            );
            let loss_weights = (0..l * h).map(|_| rng.uniform(-1.0, 1.0)).collect();
            Self {
                input,
                kernel,
                pulse,
                sagu,
                cfg,
                loss_weights,
                l,
                h,
            }
        }
    }

    impl ParamSet for SassHarness {
        fn visit_params(&mut self, f: &mut dyn FnMut(&mut crate::autodiff::Param)) {
            f(&mut self.input);
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
        }
    }

    fn sass_loss_and_grad(h: &mut SassHarness) -> crate::Result<f64> {
        h.zero_grads();
        let u = Tensor::new(vec![h.l, h.h], h.input.data.clone())?;
        let (y, state) = sass_forward(&u, &h.kernel, &h.pulse, &h.sagu, &h.cfg)?;
        let loss: f64 = y
            .data()
            .iter()
            .zip(&h.loss_weights)
            .map(|(&v, &w)| v * w)
            .sum();
        let grad_y = Tensor::new(vec![h.l, h.h], h.loss_weights.clone())?;
        let grad_u = sass_backward(&grad_y, &state, &mut h.kernel, &mut h.pulse, &mut h.sagu)?;
        h.input.grad.copy_from_slice(grad_u.data());
        Ok(loss)
    }

    #[test]
    fn sass_gradients_match_finite_differences() {
        // Every mode combination, including the Bluestein path (L = 5) and
        // the learnable-scale kernel, across 20 seeds total.
        let combos: [(usize, usize, SassMode, bool, SaguGateMode, bool); 5] = [
            (
                4,
                1,
                SassMode::Circular,
                false,
                SaguGateMode::RealPath,
                false,
            ),
            (
                5,
                2,
                SassMode::Circular,
                false,
                SaguGateMode::RealPath,
                false,
            ),
            (
                4,
                1,
                SassMode::CausalPadded,
                false,
                SaguGateMode::RealPath,
                false,
            ),
            (
                4,
                2,
                SassMode::Circular,
                true,
                SaguGateMode::ComplexModulus,
                false,
            ),
            (
                5,
                1,
                SassMode::CausalPadded,
                true,
                SaguGateMode::RealPath,
                true,
            ),
        ];
        for (ci, &(l, h, mode, sagu_first, gate_mode, learnable)) in combos.iter().enumerate() {
            for seed in 0..4u64 {
                let cfg = SassConfig {
                    mode,
                    sagu_first,
                    gating_enabled: true,
                };
                let mut harness =
                    SassHarness::new(l, h, cfg, gate_mode, learnable, 100 + 17 * ci as u64 + seed);
                let mut rng = SplitMix64::new(500 + seed);
                let report =
                    grad_check(&mut harness, sass_loss_and_grad, 1e-4, 1e-5, 64, &mut rng).unwrap();
                assert!(
                    report.pass,
                    "combo {ci} seed {seed}: max rel err {} at {}",
                    report.max_rel_err, report.worst_param
                );
            }
        }
    }

    #[test]
    fn sass_gradients_with_gating_disabled() {
        let cfg = SassConfig {
            gating_enabled: false,
            ..SassConfig::default()
        };
        for seed in 0..5u64 {
            let mut harness =
                SassHarness::new(4, 2, cfg, SaguGateMode::RealPath, false, 300 + seed);
            let mut rng = SplitMix64::new(900 + seed);
            let report =
                grad_check(&mut harness, sass_loss_and_grad, 1e-4, 1e-5, 64, &mut rng).unwrap();
            assert!(report.pass, "seed {seed}: {}", report.max_rel_err);
        }
    }

    #[test]
    fn sass_zero_upstream_gradient_gives_zero_grads() {
        let mut harness = SassHarness::new(
            6,
            2,
            SassConfig::default(),
            SaguGateMode::RealPath,
            false,
            42,
        );
        harness.loss_weights.fill(0.0);
        let _ = sass_loss_and_grad(&mut harness).unwrap();
        let mut total = 0.0;
        harness.visit_params(&mut |p| total += p.grad.iter().map(|g| g.abs()).sum::<f64>());
        assert_eq!(total, 0.0);
    }

    #[test]
    fn saturated_gate_bias_gradient_vanishes() {
        let mut harness = SassHarness::new(
            6,
            1,
            SassConfig::default(),
            SaguGateMode::RealPath,
            false,
            43,
        );
        harness.pulse.w_g.data.fill(0.0);
        harness.pulse.b_g.data.fill(20.0);
        let _ = sass_loss_and_grad(&mut harness).unwrap();
        let max_bias_grad = harness
            .pulse
            .b_g
            .grad
            .iter()
            .fold(0.0f64, |a, &g| a.max(g.abs()));
        assert!(max_bias_grad < 1e-6, "bias grad {max_bias_grad}");

        // Finite differences agree that the objective is flat in b_g.
        let l0 = sass_loss_and_grad(&mut harness).unwrap();
        harness.pulse.b_g.data[0] += 1e-5;
        let l1 = sass_loss_and_grad(&mut harness).unwrap();
        assert!(((l1 - l0) / 1e-5).abs() < 1e-6);
    }

    // -- kernel fitting (universal approximation witness) -------------------

    #[test]
    fn assign_exact_is_exactly_zero() {
        let mut rng = SplitMix64::new(44);
        for trial in 0..10 {
            let sys = random_stable_system(4, 0.3, 0.95, &mut rng);
            let d = discretize(&sys).unwrap();
            let target = unroll_kernel(&d, 64).unwrap();
            let mut kernel = plain_kernel(1, 64, 45 + trial);
            let err = assign_exact(&target, &mut kernel).unwrap();
            assert_eq!(err, 0.0);
        }
    }

    #[test]
    fn fit_kernel_zero_steps_from_matching_init() {
        let mut kernel = plain_kernel(1, 32, 46);
        kernel.psi_im.data.fill(0.0);
        let target = KernelVec {
            values: kernel.psi_re.data.clone(),
        };
        let err = fit_kernel(&target, &mut kernel, 0, 0.1).unwrap();
        assert_eq!(err, 0.0);
    }

    #[test]
    fn fit_kernel_converges_on_unrolled_ssm() {
        let mut rng = SplitMix64::new(47);
        let sys = random_stable_system(1, 0.5, 0.95, &mut rng);
        let d = discretize(&sys).unwrap();
        let target = unroll_kernel(&d, 128).unwrap();
        let mut kernel = {
            let mut r = SplitMix64::new(48);
            SpectralKernel::init("k", 1, 128, 0.02, false, &mut r).unwrap()
        };
        let initial = kernel_l2_error(&target, &kernel);
        let final_err = fit_kernel(&target, &mut kernel, 500, 0.1).unwrap();
        assert!(initial > 1e-3, "initial error {initial} unexpectedly tiny");
        assert!(final_err < 1e-6, "final error {final_err}");
    }

    #[test]
    fn fit_kernel_gd_loss_is_monotone_below_lipschitz_bound() {
        // The gradient of ‖K−t‖² is 2-Lipschitz, so lr = 0.4 < 1/L = 0.5
        // keeps plain GD monotone.
        let mut kernel = plain_kernel(1, 16, 49);
        let target = KernelVec {
            values: (0..16).map(|i| libm::sin(i as f64)).collect(),
        };
        let mut prev = kernel_l2_error(&target, &kernel);
        for _ in 0..50 {
            let err = fit_kernel(&target, &mut kernel, 1, 0.4).unwrap();
            assert!(err <= prev + 1e-15, "error rose: {prev} -> {err}");
            prev = err;
        }
    }

    #[test]
    fn fit_kernel_validates_inputs() {
        let target = KernelVec {
            values: vec![0.0; 8],
        };
        let mut multi = plain_kernel(2, 8, 50);
        assert!(fit_kernel(&target, &mut multi, 1, 0.1).is_err());
        let mut wrong_len = plain_kernel(1, 4, 51);
        assert!(assign_exact(&target, &mut wrong_len).is_err());
    }

    #[test]
    fn magnitude_equals_pulse_gate_magnitudes() {
        // |û| used by the gate matches the standalone magnitude op.
        let l = 10;
        let mut rng = SplitMix64::new(52);
        let u_hat = random_complex(l, 2.0, &mut rng);
        let p = PulseGateParams::zeros("p", l);
        let state = pulse_gate_forward(&u_hat, &p).unwrap();
        let mags = magnitude(&u_hat);
        for k in 0..l {
            assert_eq!(state.mag[k], mags.data()[k]);
        }
    }

    #[test]
    fn pointwise_products_feed_pipeline_consistently() {
        // ũ ⊙ K̂ in the pipeline equals the standalone pointwise_mul.
        let l = 8;
        let kernel = plain_kernel(1, l, 53);
        let mut rng = SplitMix64::new(54);
        let u_data: Vec<f64> = (0..l).map(|_| rng.uniform(-1.0, 1.0)).collect();
        let u_hat = fft(&ComplexVec::from_real(&u_data)).unwrap();
        let k_hat = kernel_spectrum(&kernel, 0, SassMode::Circular).unwrap();
        let direct = pointwise_mul(&u_hat, &k_hat).unwrap();
        let y_direct = ifft(&direct).unwrap();

        let pulse = PulseGateParams::zeros("p", l);
        let sagu_p = SaguParams::identity("s", l);
        let cfg = SassConfig {
            gating_enabled: false,
            ..SassConfig::default()
        };
        let u = Tensor::new(vec![l, 1], u_data).unwrap();
        let (y, _) = sass_forward(&u, &kernel, &pulse, &sagu_p, &cfg).unwrap();
        for t in 0..l {
            assert!((y.data()[t] - y_direct.re[t]).abs() < 1e-12);
        }
    }
}
