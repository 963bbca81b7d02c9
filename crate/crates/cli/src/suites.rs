//! Verification suites: the fast path against its oracles.
//!
//! Every suite builds its reference values independently of the code path it
//! checks (direct O(L²) transforms and convolutions, the recurrent scan,
//! central finite differences) and reports the worst observed error against
//! a fixed tolerance. The `oracle` and `gradcheck` subcommands print these,
//! and the acceptance tests assert them.

use std::fmt;

use sass_core::autodiff::{grad_check, Param, ParamSet};
use sass_core::model::{softmax_cross_entropy, ModelConfig, Network};
use sass_core::numerics::{dft_direct, fft, ifft, pointwise_mul, ComplexVec, Tensor};
use sass_core::rng::SplitMix64;
use sass_core::spectral::{
    assign_exact, fit_kernel, kernel_l2_error, pulse_gate_backward, pulse_gate_forward,
    sagu_backward, sagu_forward, sass_backward, sass_forward, PulseGateParams, SaguGateMode,
    SaguParams, SassConfig, SassMode, SpectralKernel,
};
use sass_core::ssm::{
    causal_convolution, circular_convolution, discretize, random_stable_system, scan_recurrent,
    unroll_kernel, KernelVec,
};

/// Outcome of one suite: worst error over all cases vs. its tolerance.
#[derive(Debug, Clone)]
pub struct SuiteResult {
    pub name: String,
    pub max_err: f64,
    pub tolerance: f64,
    pub cases: usize,
    pub pass: bool,
}

impl SuiteResult {
    fn from_err(name: &str, max_err: f64, tolerance: f64, cases: usize) -> Self {
        Self {
            name: name.to_string(),
            max_err,
            tolerance,
            cases,
            pass: max_err < tolerance,
        }
    }
}

impl fmt::Display for SuiteResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{:<42} cases={:<5} max_err={:<12.3e} tol={:<8.0e} {}",
            self.name,
            self.cases,
            self.max_err,
            self.tolerance,
            if self.pass { "PASS" } else { "FAIL" }
        )
    }
}

fn max_abs_c(a: &ComplexVec, b: &ComplexVec) -> f64 {
    let mut worst = 0.0f64;
    for k in 0..a.len() {
        worst = worst.max((a.re[k] - b.re[k]).abs());
        worst = worst.max((a.im[k] - b.im[k]).abs());
    }
    worst
}

fn random_real(l: usize, amp: f64, rng: &mut SplitMix64) -> Vec<f64> {
    (0..l).map(|_| rng.uniform(-amp, amp)).collect()
}

// ---------------------------------------------------------------------------
// FFT oracles
// ---------------------------------------------------------------------------

/// Fast transform vs. the direct O(L²) DFT sum over every L in 1..=64 plus
/// selected awkward lengths.
pub fn fft_oracle_suite() -> SuiteResult {
    let mut rng = SplitMix64::new(0xFF7);
    let mut worst = 0.0f64;
    let mut cases = 0;
    for l in (1..=64usize).chain([100, 196, 500, 1000]) {
        let x =
            ComplexVec::new(random_real(l, 1.0, &mut rng), random_real(l, 1.0, &mut rng)).unwrap();
        let fast = fft(&x).unwrap();
        let slow = dft_direct(&x).unwrap();
        worst = worst.max(max_abs_c(&fast, &slow));
        cases += 1;
    }
    SuiteResult::from_err("fft vs direct dft", worst, 1e-10, cases)
}

/// ifft(fft(x)) == x for lengths up to 8192 (both transform paths).
pub fn fft_roundtrip_suite() -> SuiteResult {
    let mut rng = SplitMix64::new(0xF00);
    let mut worst = 0.0f64;
    let mut cases = 0;
    for l in [1usize, 2, 7, 64, 100, 196, 500, 1000, 4096, 8192] {
        let x =
            ComplexVec::new(random_real(l, 1.0, &mut rng), random_real(l, 1.0, &mut rng)).unwrap();
        let back = ifft(&fft(&x).unwrap()).unwrap();
        worst = worst.max(max_abs_c(&x, &back));
        cases += 1;
    }
    SuiteResult::from_err("fft round trip", worst, 1e-12, cases)
}

// ---------------------------------------------------------------------------
// Convolution-theorem and scan oracles
// ---------------------------------------------------------------------------

/// Spectral products vs. direct convolutions, circular and padded-causal.
pub fn convolution_theorem_suites(cases: usize) -> Vec<SuiteResult> {
    let mut rng = SplitMix64::new(0xC0);
    let mut worst_circ = 0.0f64;
    let mut worst_causal = 0.0f64;
    for _ in 0..cases {
        let l = 2 + rng.next_index(511);
        let k = KernelVec {
            values: random_real(l, 1.0, &mut rng),
        };
        let u = random_real(l, 1.0, &mut rng);

        let spectral = ifft(
            &pointwise_mul(
                &fft(&ComplexVec::from_real(&k.values)).unwrap(),
                &fft(&ComplexVec::from_real(&u)).unwrap(),
            )
            .unwrap(),
        )
        .unwrap();
        let direct = circular_convolution(&k, &u).unwrap();
        for i in 0..l {
            worst_circ = worst_circ.max((spectral.re[i] - direct[i]).abs());
        }

        let p = (2 * l - 1).next_power_of_two();
        let padded = ifft(
            &pointwise_mul(
                &fft(&ComplexVec::from_real(&k.values).zero_padded(p)).unwrap(),
                &fft(&ComplexVec::from_real(&u).zero_padded(p)).unwrap(),
            )
            .unwrap(),
        )
        .unwrap();
        let causal = causal_convolution(&k, &u).unwrap();
        for i in 0..l {
            worst_causal = worst_causal.max((padded.re[i] - causal[i]).abs());
        }
    }
    vec![
        SuiteResult::from_err("convolution theorem (circular)", worst_circ, 1e-10, cases),
        SuiteResult::from_err(
            "convolution theorem (padded causal)",
            worst_causal,
            1e-10,
            cases,
        ),
    ]
}

/// Recurrent scan vs. unrolled-kernel convolution on random stable systems.
pub fn scan_kernel_suite(cases: usize) -> SuiteResult {
    let mut rng = SplitMix64::new(0x5CA);
    let mut worst = 0.0f64;
    for _ in 0..cases {
        let n = 1 + rng.next_index(8);
        let l = 2 + rng.next_index(511);
        let system = random_stable_system(n, 0.2 + rng.uniform(0.0, 0.4), 0.95, &mut rng);
        let d = discretize(&system).unwrap();
        let u = random_real(l, 1.0, &mut rng);
        let scanned = scan_recurrent(&d, &u);
        let k = unroll_kernel(&d, l).unwrap();
        let convolved = causal_convolution(&k, &u).unwrap();
        for i in 0..l {
            worst = worst.max((scanned[i] - convolved[i]).abs());
        }
    }
    SuiteResult::from_err("scan vs kernel convolution", worst, 1e-9, cases)
}

/// With gates saturated (b_g = +20, huge-diagonal SAGU gate) the pipeline
/// must reproduce the direct complex convolution on unit-energy inputs.
pub fn saturated_gate_suites() -> Vec<SuiteResult> {
    let mut out = Vec::new();
    for (mode, name) in [
        (SassMode::Circular, "saturated gates vs circular oracle"),
        (SassMode::CausalPadded, "saturated gates vs causal oracle"),
    ] {
        let mut worst = 0.0f64;
        let mut cases = 0;
        for l in [8usize, 32, 128, 256] {
            let mut rng = SplitMix64::new(0x6A7E ^ l as u64);
            let amp = 0.5 / (l as f64).sqrt();
            let mut kernel = {
                let mut r = SplitMix64::new(0xBEE ^ l as u64);
                SpectralKernel::init("k", 1, l, 1.0, false, &mut r).unwrap()
            };
            for v in kernel.psi_re.data.iter_mut() {
                *v = rng.uniform(-amp, amp);
            }
            for v in kernel.psi_im.data.iter_mut() {
                *v = rng.uniform(-amp, amp);
            }
            let mut pulse = PulseGateParams::zeros("p", l);
            pulse.b_g.data.fill(20.0);
            let mut sagu = SaguParams::identity("s", l);
            for i in 0..l {
                sagu.w2_re.data[i * l + i] = 1e12;
            }
            let u_data = random_real(l, amp, &mut rng);
            let u = Tensor::new(vec![l, 1], u_data.clone()).unwrap();
            let cfg = SassConfig {
                mode,
                ..SassConfig::default()
            };
            let (y, _) = sass_forward(&u, &kernel, &pulse, &sagu, &cfg).unwrap();

            let kc = kernel.channel_kernel(0).unwrap();
            for t in 0..l {
                let mut oracle = 0.0;
                for m in 0..l {
                    match mode {
                        SassMode::Circular => oracle += kc.re[m] * u_data[(t + l - m) % l],
                        SassMode::CausalPadded => {
                            if m <= t {
                                oracle += kc.re[m] * u_data[t - m];
                            }
                        }
                    }
                }
                worst = worst.max((y.data()[t] - oracle).abs());
            }
            cases += 1;
        }
        out.push(SuiteResult::from_err(name, worst, 1e-9, cases));
    }
    out
}

// ---------------------------------------------------------------------------
// Universal-approximation witness
// ---------------------------------------------------------------------------

/// Exact representability (assign_exact reaches 0) and gradient-descent
/// fitting (< 1e-3 within `max_steps`) on unrolled stable SSM kernels.
pub fn kernel_approximation_suites(targets: usize, l: usize, max_steps: usize) -> Vec<SuiteResult> {
    let mut rng = SplitMix64::new(0x7E0);
    let mut worst_exact = 0.0f64;
    let mut worst_fit = 0.0f64;
    for t in 0..targets {
        let n = 1 + rng.next_index(8);
        let system = random_stable_system(n, 0.3, 0.95, &mut rng);
        let d = discretize(&system).unwrap();
        let target = unroll_kernel(&d, l).unwrap();

        let mut kernel = {
            let mut r = SplitMix64::new(0xA11 + t as u64);
            SpectralKernel::init("k", 1, l, 0.02, false, &mut r).unwrap()
        };
        worst_exact = worst_exact.max({
            let mut k2 = kernel.clone();
            assign_exact(&target, &mut k2).unwrap()
        });
        let final_err = fit_kernel(&target, &mut kernel, max_steps, 0.1).unwrap();
        debug_assert!(final_err <= kernel_l2_error(&target, &kernel) + 1e-15);
        worst_fit = worst_fit.max(final_err);
    }
    vec![
        SuiteResult {
            name: "assign_exact reaches zero error".into(),
            max_err: worst_exact,
            tolerance: 0.0,
            cases: targets,
            pass: worst_exact == 0.0,
        },
        SuiteResult::from_err("gradient kernel fit", worst_fit, 1e-3, targets),
    ]
}

// ---------------------------------------------------------------------------
// Gate invariants
// ---------------------------------------------------------------------------

pub fn gate_invariant_suites() -> Vec<SuiteResult> {
    let l = 48;
    let mut rng = SplitMix64::new(0x9A7E);
    let mut pulse = PulseGateParams::zeros("p", l);
    for v in pulse.w_g.data.iter_mut() {
        *v = rng.normal_scaled(0.15);
    }
    for v in pulse.b_g.data.iter_mut() {
        *v = rng.normal_scaled(1.5);
    }

    let mut range_violation = 0.0f64;
    let mut phase_err = 0.0f64;
    let mut shift_err = 0.0f64;
    let cases = 50;
    for _ in 0..cases {
        let u = random_real(l, 1.0, &mut rng);
        let u_hat = fft(&ComplexVec::from_real(&u)).unwrap();
        let state = pulse_gate_forward(&u_hat, &pulse).unwrap();
        for k in 0..l {
            let g = state.gate[k];
            if g <= 0.0 {
                range_violation = range_violation.max(-g + f64::MIN_POSITIVE);
            }
            if g >= 1.0 {
                range_violation = range_violation.max(g - 1.0 + f64::MIN_POSITIVE);
            }
            let mag = (u_hat.re[k] * u_hat.re[k] + u_hat.im[k] * u_hat.im[k]).sqrt();
            if mag > 1e-9 {
                let before = u_hat.im[k].atan2(u_hat.re[k]);
                let after = state.output.im[k].atan2(state.output.re[k]);
                phase_err = phase_err.max((before - after).abs());
            }
        }

        let shift = 1 + rng.next_index(l - 1);
        let shifted: Vec<f64> = (0..l).map(|t| u[(t + shift) % l]).collect();
        let shifted_state =
            pulse_gate_forward(&fft(&ComplexVec::from_real(&shifted)).unwrap(), &pulse).unwrap();
        for k in 0..l {
            shift_err = shift_err.max((state.gate[k] - shifted_state.gate[k]).abs());
        }
    }

    vec![
        SuiteResult {
            name: "gates strictly inside (0,1)".into(),
            max_err: range_violation,
            tolerance: f64::MIN_POSITIVE,
            cases,
            pass: range_violation == 0.0,
        },
        SuiteResult::from_err("gating preserves phase", phase_err, 1e-12, cases),
        SuiteResult::from_err(
            "gates invariant under cyclic shift",
            shift_err,
            1e-10,
            cases,
        ),
    ]
}

// ---------------------------------------------------------------------------
// Gradient suites
// ---------------------------------------------------------------------------

const GRAD_TOL: f64 = 1e-4;
const GRAD_H: f64 = 1e-5;

/// Pulse gate alone, with its complex input exposed as two real tensors.
struct PulseHarness {
    in_re: Param,
    in_im: Param,
    params: PulseGateParams,
    weights_re: Vec<f64>,
    weights_im: Vec<f64>,
}

impl ParamSet for PulseHarness {
    fn visit_params(&mut self, f: &mut dyn FnMut(&mut Param)) {
        f(&mut self.in_re);
        f(&mut self.in_im);
        f(&mut self.params.w_g);
        f(&mut self.params.b_g);
    }
}

fn pulse_loss(h: &mut PulseHarness) -> sass_core::Result<f64> {
    h.zero_grads();
    let u_hat = ComplexVec::new(h.in_re.data.clone(), h.in_im.data.clone())?;
    let state = pulse_gate_forward(&u_hat, &h.params)?;
    let loss: f64 = state
        .output
        .re
        .iter()
        .zip(&h.weights_re)
        .chain(state.output.im.iter().zip(&h.weights_im))
        .map(|(&v, &w)| v * w)
        .sum();
    let grad_out = ComplexVec::new(h.weights_re.clone(), h.weights_im.clone())?;
    let grad_in = pulse_gate_backward(&grad_out, &state, &mut h.params)?;
    h.in_re.grad.copy_from_slice(&grad_in.re);
    h.in_im.grad.copy_from_slice(&grad_in.im);
    Ok(loss)
}

/// SAGU alone, both gate modes.
struct SaguHarness {
    in_re: Param,
    in_im: Param,
    params: SaguParams,
    weights_re: Vec<f64>,
    weights_im: Vec<f64>,
}

impl ParamSet for SaguHarness {
    fn visit_params(&mut self, f: &mut dyn FnMut(&mut Param)) {
        f(&mut self.in_re);
        f(&mut self.in_im);
        f(&mut self.params.w1_re);
        f(&mut self.params.w1_im);
        f(&mut self.params.w2_re);
        f(&mut self.params.w2_im);
    }
}

fn sagu_loss(h: &mut SaguHarness) -> sass_core::Result<f64> {
    h.zero_grads();
    let u_hat = ComplexVec::new(h.in_re.data.clone(), h.in_im.data.clone())?;
    let state = sagu_forward(&u_hat, &h.params, true)?;
    let loss: f64 = state
        .output
        .re
        .iter()
        .zip(&h.weights_re)
        .chain(state.output.im.iter().zip(&h.weights_im))
        .map(|(&v, &w)| v * w)
        .sum();
    let grad_out = ComplexVec::new(h.weights_re.clone(), h.weights_im.clone())?;
    let grad_in = sagu_backward(&grad_out, &state, &mut h.params)?;
    h.in_re.grad.copy_from_slice(&grad_in.re);
    h.in_im.grad.copy_from_slice(&grad_in.im);
    Ok(loss)
}

/// Full SASS op (FFT, gates, kernel product, SAGU, inverse FFT).
struct SassHarness {
    input: Param,
    kernel: SpectralKernel,
    pulse: PulseGateParams,
    sagu: SaguParams,
    cfg: SassConfig,
    weights: Vec<f64>,
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
        let input = Param::new(
            "input",
            vec![l, h],
            (0..l * h).map(|_| rng.uniform(-1.0, 1.0)).collect(),
        );
        let weights = (0..l * h).map(|_| rng.uniform(-1.0, 1.0)).collect();
        Self {
            input,
            kernel,
            pulse,
            sagu,
            cfg,
            weights,
            l,
            h,
        }
    }
}

impl ParamSet for SassHarness {
    fn visit_params(&mut self, f: &mut dyn FnMut(&mut Param)) {
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

fn sass_loss(h: &mut SassHarness) -> sass_core::Result<f64> {
    h.zero_grads();
    let u = Tensor::new(vec![h.l, h.h], h.input.data.clone())?;
    let (y, state) = sass_forward(&u, &h.kernel, &h.pulse, &h.sagu, &h.cfg)?;
    let loss: f64 = y.data().iter().zip(&h.weights).map(|(&v, &w)| v * w).sum();
    let grad_y = Tensor::new(vec![h.l, h.h], h.weights.clone())?;
    let grad_u = sass_backward(&grad_y, &state, &mut h.kernel, &mut h.pulse, &mut h.sagu)?;
    h.input.grad.copy_from_slice(grad_u.data());
    Ok(loss)
}

fn run_grad_suite<M: ParamSet>(
    name: &str,
    seeds: usize,
    mut build: impl FnMut(u64) -> M,
    mut loss: impl FnMut(&mut M) -> sass_core::Result<f64>,
) -> SuiteResult {
    let mut worst = 0.0f64;
    let mut cases = 0;
    for seed in 0..seeds as u64 {
        let mut harness = build(seed);
        let mut rng = SplitMix64::new(0xD1F ^ seed);
        let report = grad_check(&mut harness, &mut loss, GRAD_TOL, GRAD_H, 64, &mut rng)
            .expect("finite objective");
        worst = worst.max(report.max_rel_err);
        cases += report.coords_checked;
    }
    SuiteResult::from_err(name, worst, GRAD_TOL, cases)
}

/// Central-finite-difference checks for every differentiable op and the
/// full one-block model, ≥ 20 seeds each.
pub fn gradient_suites(seeds: usize) -> Vec<SuiteResult> {
    let mut results = Vec::new();

    results.push(run_grad_suite(
        "grad: pulse gate",
        seeds,
        |seed| {
            let l = 5;
            let mut rng = SplitMix64::new(0xA0 + seed);
            PulseHarness {
                in_re: Param::new(
                    "in_re",
                    vec![l],
                    (0..l).map(|_| rng.uniform(-1.0, 1.0)).collect(),
                ),
                in_im: Param::new(
                    "in_im",
                    vec![l],
                    (0..l).map(|_| rng.uniform(-1.0, 1.0)).collect(),
                ),
                params: PulseGateParams::init("p", l, 0.4, &mut rng),
                weights_re: (0..l).map(|_| rng.uniform(-1.0, 1.0)).collect(),
                weights_im: (0..l).map(|_| rng.uniform(-1.0, 1.0)).collect(),
            }
        },
        pulse_loss,
    ));

    for (mode, label) in [
        (SaguGateMode::RealPath, "grad: sagu (real gate)"),
        (SaguGateMode::ComplexModulus, "grad: sagu (modulus gate)"),
    ] {
        results.push(run_grad_suite(
            label,
            seeds,
            move |seed| {
                let l = 5;
                let mut rng = SplitMix64::new(0xB0 + seed);
                SaguHarness {
                    in_re: Param::new(
                        "in_re",
                        vec![l],
                        (0..l).map(|_| rng.uniform(-1.0, 1.0)).collect(),
                    ),
                    in_im: Param::new(
                        "in_im",
                        vec![l],
                        (0..l).map(|_| rng.uniform(-1.0, 1.0)).collect(),
                    ),
                    params: SaguParams::init("s", l, 0.4, mode, &mut rng),
                    weights_re: (0..l).map(|_| rng.uniform(-1.0, 1.0)).collect(),
                    weights_im: (0..l).map(|_| rng.uniform(-1.0, 1.0)).collect(),
                }
            },
            sagu_loss,
        ));
    }

    let sass_combos: [(&str, usize, usize, SassMode, bool, SaguGateMode, bool, bool); 4] = [
        (
            "grad: sass (circular)",
            4,
            1,
            SassMode::Circular,
            false,
            SaguGateMode::RealPath,
            false,
            true,
        ),
        (
            "grad: sass (causal padded, L=5)",
            5,
            2,
            SassMode::CausalPadded,
            false,
            SaguGateMode::RealPath,
            false,
            true,
        ),
        (
            "grad: sass (sagu first, learnable scale)",
            4,
            2,
            SassMode::Circular,
            true,
            SaguGateMode::ComplexModulus,
            true,
            true,
        ),
        (
            "grad: sass (gating disabled)",
            4,
            2,
            SassMode::Circular,
            false,
            SaguGateMode::RealPath,
            false,
            false,
        ),
    ];
    for (label, l, ch, mode, sagu_first, gate_mode, learnable, gating) in sass_combos {
        results.push(run_grad_suite(
            label,
            seeds,
            move |seed| {
                let cfg = SassConfig {
                    mode,
                    sagu_first,
                    gating_enabled: gating,
                };
                SassHarness::new(l, ch, cfg, gate_mode, learnable, 0xC0 + seed)
            },
            sass_loss,
        ));
    }

    // Full one-block models, signal and image inputs. These sweep layer
    // norm, GELU, both embeddings, the head, and the loss.
    results.push(run_grad_suite(
        "grad: full model (signal, 1 block)",
        seeds,
        |seed| {
            let mut cfg = ModelConfig::desk_signal(8, 3);
            cfg.embed_dim = 4;
            cfg.state_dim = 3;
            cfg.gate_dim = 3;
            cfg.depth = 1;
            let mut rng = SplitMix64::new(0xE0 + seed);
            let net = Network::init(cfg, &mut rng).unwrap();
            let input = (0..8).map(|_| rng.uniform(-1.0, 1.0)).collect();
            ModelHarness {
                net,
                input,
                label: (seed % 3) as usize,
            }
        },
        model_loss,
    ));
    results.push(run_grad_suite(
        "grad: full model (image, 1 block)",
        seeds,
        |seed| {
            let mut cfg = ModelConfig::desk_image(8, 4, 2);
            cfg.embed_dim = 4;
            cfg.state_dim = 2;
            cfg.gate_dim = 2;
            cfg.depth = 1;
            let mut rng = SplitMix64::new(0xF0 + seed);
            let net = Network::init(cfg, &mut rng).unwrap();
            let input = (0..64).map(|_| rng.uniform(-1.0, 1.0)).collect();
            ModelHarness {
                net,
                input,
                label: (seed % 2) as usize,
            }
        },
        model_loss,
    ));

    results
}

struct ModelHarness {
    net: Network,
    input: Vec<f64>,
    label: usize,
}

impl ParamSet for ModelHarness {
    fn visit_params(&mut self, f: &mut dyn FnMut(&mut Param)) {
        self.net.visit_params(f);
    }
}

fn model_loss(h: &mut ModelHarness) -> sass_core::Result<f64> {
    h.net.zero_grads();
    let (logits, state) = h.net.forward(&h.input)?;
    let (loss, grad_logits) = softmax_cross_entropy(&logits, h.label)?;
    h.net.backward(&grad_logits, &state)?;
    Ok(loss)
}

/// Everything the `oracle` subcommand runs.
pub fn oracle_suites(cases: usize) -> Vec<SuiteResult> {
    let mut all = vec![fft_oracle_suite(), fft_roundtrip_suite()];
    all.extend(convolution_theorem_suites(cases));
    all.push(scan_kernel_suite(cases));
    all.extend(saturated_gate_suites());
    all.extend(gate_invariant_suites());
    all
}
