//! Training substrate: named parameters, AdamW, the warmup+cosine schedule,
//! and a central-finite-difference gradient checker.
//!
//! There is no taped autodiff here. The op set is small and fixed, so every
//! operation carries an explicit hand-written backward, and modules chain
//! them in reverse order. Complex parameters are treated as independent
//! (re, im) real coordinates throughout.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::Error;
use crate::rng::SplitMix64;
use crate::Result;

/// A named parameter tensor with its gradient accumulator.
#[derive(Debug, Clone, PartialEq)]
pub struct Param {
    pub name: String,
    pub shape: Vec<usize>,
    pub data: Vec<f64>,
    pub grad: Vec<f64>,
    pub trainable: bool,
}

impl Param {
    pub fn new(name: impl Into<String>, shape: Vec<usize>, data: Vec<f64>) -> Self {
        let numel: usize = shape.iter().product();
        assert_eq!(numel, data.len(), "param data does not match shape");
        let grad = vec![0.0; data.len()];
        Self {
            name: name.into(),
            shape,
            data,
            grad,
            trainable: true,
        }
    }

    pub fn zeros(name: impl Into<String>, shape: Vec<usize>) -> Self {
        let numel: usize = shape.iter().product();
        Self::new(name, shape, vec![0.0; numel])
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn zero_grad(&mut self) {
        self.grad.fill(0.0);
    }
}

/// Anything holding an ordered set of parameters. Visit order must be fixed
/// across calls — it defines optimizer-state alignment, checkpoint layout,
/// and gradient-reduction order.
pub trait ParamSet {
    fn visit_params(&mut self, f: &mut dyn FnMut(&mut Param));

    fn zero_grads(&mut self) {
        self.visit_params(&mut |p| p.zero_grad());
    }

    fn param_count(&mut self) -> usize {
        let mut n = 0;
        self.visit_params(&mut |p| n += p.len());
        n
    }
}

/// Piecewise learning rate: linear warmup from zero over `warmup_steps`,
/// then cosine decay to zero at `total_steps`.
pub fn lr_schedule(step: u64, total_steps: u64, warmup_steps: u64, base_lr: f64) -> f64 {
    if total_steps == 0 {
        return 0.0;
    }
    let step = step.min(total_steps);
    if warmup_steps > 0 && step < warmup_steps {
        return base_lr * step as f64 / warmup_steps as f64;
    }
    if total_steps == warmup_steps {
        return base_lr;
    }
    let progress = (step - warmup_steps) as f64 / (total_steps - warmup_steps) as f64;
    0.5 * base_lr * (1.0 + libm::cos(core::f64::consts::PI * progress))
}

/// First/second-moment accumulators for one parameter.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentPair {
    pub name: String,
    pub m: Vec<f64>,
    pub v: Vec<f64>,
}

/// AdamW state: moments per parameter plus the step counter and schedule.
#[derive(Debug, Clone, PartialEq)]
pub struct OptimState {
    pub step: u64,
    pub beta1: f64,
    pub beta2: f64,
    pub eps: f64,
    pub base_lr: f64,
    pub weight_decay: f64,
    pub warmup_steps: u64,
    pub total_steps: u64,
    /// Global-norm gradient clipping threshold; `None` disables clipping.
    pub grad_clip: Option<f64>,
    pub moments: Vec<MomentPair>,
}

impl OptimState {
    pub fn new(base_lr: f64, weight_decay: f64, warmup_steps: u64, total_steps: u64) -> Self {
        Self {
            step: 0,
            beta1: 0.9,
            beta2: 0.999,
            eps: 1e-8,
            base_lr,
            weight_decay,
            warmup_steps,
            total_steps,
            grad_clip: None,
            moments: Vec::new(),
        }
    }

    fn ensure_moments<M: ParamSet + ?Sized>(&mut self, model: &mut M) {
        if !self.moments.is_empty() {
            return;
        }
        let mut moments = Vec::new();
        model.visit_params(&mut |p| {
            moments.push(MomentPair {
                name: p.name.clone(),
                m: vec![0.0; p.len()],
                v: vec![0.0; p.len()],
            });
        });
        self.moments = moments;
    }
}

/// One decoupled-weight-decay Adam update over every trainable parameter,
/// with bias-corrected moments and the scheduled learning rate. Gradients
/// are left untouched (callers typically zero them before the next pass).
pub fn adamw_step<M: ParamSet + ?Sized>(model: &mut M, opt: &mut OptimState) -> Result<()> {
    opt.ensure_moments(model);
    opt.step += 1;
    let lr = lr_schedule(opt.step, opt.total_steps, opt.warmup_steps, opt.base_lr);

    // Optional global-norm clip, measured over trainable parameters only.
    let mut clip_scale = 1.0;
    if let Some(limit) = opt.grad_clip {
        let mut sq = 0.0;
        model.visit_params(&mut |p| {
            if p.trainable {
                sq += p.grad.iter().map(|g| g * g).sum::<f64>();
            }
        });
        let norm = libm::sqrt(sq);
        if norm > limit {
            clip_scale = limit / norm;
        }
    }

    let t = opt.step;
    let bc1 = 1.0 - libm::pow(opt.beta1, t as f64);
    let bc2 = 1.0 - libm::pow(opt.beta2, t as f64);
    let (beta1, beta2, eps, wd) = (opt.beta1, opt.beta2, opt.eps, opt.weight_decay);

    let mut idx = 0usize;
    let moments = &mut opt.moments;
    let mut misaligned = false;
    model.visit_params(&mut |p| {
        if idx >= moments.len() || moments[idx].name != p.name || moments[idx].m.len() != p.len() {
            misaligned = true;
            idx += 1;
            return;
        }
        let slot = &mut moments[idx];
        idx += 1;
        if !p.trainable {
            return;
        }
        for i in 0..p.data.len() {
            let g = p.grad[i] * clip_scale;
            slot.m[i] = beta1 * slot.m[i] + (1.0 - beta1) * g;
            slot.v[i] = beta2 * slot.v[i] + (1.0 - beta2) * g * g;
            let m_hat = slot.m[i] / bc1;
            let v_hat = slot.v[i] / bc2;
            p.data[i] -= lr * (m_hat / (libm::sqrt(v_hat) + eps) + wd * p.data[i]);
        }
    });
    if misaligned || idx != moments.len() {
        return Err(Error::InvalidConfig(String::from(
            "optimizer state does not match the model's parameter set",
        )));
    }
    Ok(())
}

/// Result of a finite-difference sweep.
#[derive(Debug, Clone)]
pub struct GradCheckReport {
    pub max_rel_err: f64,
    pub worst_param: String,
    pub coords_checked: usize,
    pub pass: bool,
}

/// Check analytic gradients of a deterministic scalar function against
/// central differences (f(θ+h) − f(θ−h)) / 2h.
///
/// `loss_and_grad` must zero, recompute, and fill `grad` on every call and
/// return the loss. Tensors larger than `coords_per_tensor` are spot-checked
/// on that many sampled coordinates; smaller tensors are checked
/// exhaustively. Differences below 1e-8 in absolute value count as agreement
/// regardless of relative error, which keeps the check meaningful for
/// near-zero gradients sitting at the finite-difference noise floor.
pub fn grad_check<M, F>(
    model: &mut M,
    mut loss_and_grad: F,
    tol: f64,
    h: f64,
    coords_per_tensor: usize,
    rng: &mut SplitMix64,
) -> Result<GradCheckReport>
where
    M: ParamSet,
    F: FnMut(&mut M) -> Result<f64>,
{
    let base_loss = loss_and_grad(model)?;
    if !base_loss.is_finite() {
        return Err(Error::NonFinite("grad_check objective"));
    }

    // Snapshot analytic gradients and tensor sizes.
    let mut analytic: Vec<(String, Vec<f64>)> = Vec::new();
    model.visit_params(&mut |p| analytic.push((p.name.clone(), p.grad.clone())));

    let mut max_rel = 0.0f64;
    let mut worst = String::new();
    let mut checked = 0usize;

    for (tensor_idx, (name, grads)) in analytic.iter().enumerate() {
        let len = grads.len();
        let coords: Vec<usize> = if len <= coords_per_tensor {
            (0..len).collect()
        } else {
            (0..coords_per_tensor)
                .map(|_| rng.next_index(len))
                .collect()
        };

        for &coord in &coords {
            perturb(model, tensor_idx, coord, h);
            let loss_plus = loss_and_grad(model)?;
            perturb(model, tensor_idx, coord, -2.0 * h);
            let loss_minus = loss_and_grad(model)?;
            perturb(model, tensor_idx, coord, h);
            if !loss_plus.is_finite() || !loss_minus.is_finite() {
                return Err(Error::NonFinite("grad_check objective"));
            }

            let fd = (loss_plus - loss_minus) / (2.0 * h);
            let a = grads[coord];
            let diff = (a - fd).abs();
            let rel = if diff < 1e-8 {
                0.0
            } else {
                diff / a.abs().max(fd.abs()).max(1e-8)
            };
            if rel > max_rel {
                max_rel = rel;
                worst = alloc::format!("{name}[{coord}]");
            }
            checked += 1;
        }
    }

    Ok(GradCheckReport {
        max_rel_err: max_rel,
        worst_param: worst,
        coords_checked: checked,
        pass: max_rel < tol,
    })
}

fn perturb<M: ParamSet>(model: &mut M, tensor_idx: usize, coord: usize, delta: f64) {
    let mut i = 0usize;
    model.visit_params(&mut |p| {
        if i == tensor_idx {
            p.data[coord] += delta;
        }
        i += 1;
    });
}
