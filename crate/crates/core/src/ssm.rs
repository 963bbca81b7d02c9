//! Classical state-space reference path.
//!
//! A continuous system x'(t) = A·x(t) + B·u(t), y(t) = C·x(t) is discretized
//! with the bilinear (Tustin) map
//!
//! ```text
//! Ā = (I − Δ/2·A)⁻¹ (I + Δ/2·A)      B̄ = (I − Δ/2·A)⁻¹ Δ·B      C̄ = C
//! ```
//!
//! and evaluated three equivalent ways: unrolled into a length-L convolution
//! kernel K̄_ℓ = C̄·Āℓ·B̄, run as the recurrence x_ℓ = Ā·x_{ℓ−1} + B̄·u_ℓ, or
//! convolved directly in O(L²). The direct evaluations are intentionally the
//! slow, obviously-correct forms; the spectral path is validated against
//! them.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::Error;
use crate::linalg;
use crate::rng::SplitMix64;
use crate::Result;

/// Continuous-time system matrices plus the discretization step size.
///
/// A is N×N, B is N×1, C is 1×N (stored as flat row-major / plain vectors).
#[derive(Debug, Clone, PartialEq)]
pub struct StateSpaceParams {
    pub a: Vec<f64>,
    pub b: Vec<f64>,
    pub c: Vec<f64>,
    pub n: usize,
    pub delta: f64,
}

impl StateSpaceParams {
    pub fn new(a: Vec<f64>, b: Vec<f64>, c: Vec<f64>, delta: f64) -> Result<Self> {
        let n = b.len();
        if n == 0 {
            return Err(Error::EmptyInput);
        }
        if a.len() != n * n {
            return Err(Error::ShapeMismatch {
                context: "StateSpaceParams A",
                expected: n * n,
                found: a.len(),
            });
        }
        if c.len() != n {
            return Err(Error::ShapeMismatch {
                context: "StateSpaceParams C",
                expected: n,
                found: c.len(),
            });
        }
        if !(delta > 0.0) {
            return Err(Error::InvalidConfig(format!(
                "step size delta must be > 0, got {delta}"
            )));
        }
        Ok(Self { a, b, c, n, delta })
    }
}

/// Discretized system (Ā, B̄, C̄).
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteSsm {
    pub a_bar: Vec<f64>,
    pub b_bar: Vec<f64>,
    pub c_bar: Vec<f64>,
    pub n: usize,
}

impl DiscreteSsm {
    /// Spectral-radius estimate ρ(Ā) ≈ ‖Ā⁶⁴‖_F^{1/64}, computed by repeated
    /// squaring. An estimate is all the stability screens here need: it
    /// converges to ρ from above as the power grows.
    pub fn spectral_radius_est(&self) -> f64 {
        let mut m = self.a_bar.clone();
        // Six squarings: Ā^64.
        for _ in 0..6 {
            m = linalg::square_matmul(&m, &m, self.n);
            // Guard against overflow for very unstable systems.
            let norm = linalg::frobenius(&m);
            if !norm.is_finite() {
                return f64::INFINITY;
            }
        }
        libm::pow(linalg::frobenius(&m), 1.0 / 64.0)
    }

    pub fn is_stable(&self, threshold: f64) -> bool {
        self.spectral_radius_est() < threshold
    }
}

/// Length-L real convolution kernel.
#[derive(Debug, Clone, PartialEq)]
pub struct KernelVec {
    pub values: Vec<f64>,
}

/// Bilinear discretization, computed by a dense pivoted solve (never by
/// forming the inverse). Fails when (I − Δ/2·A) has condition estimate
/// above 1e12.
pub fn discretize(p: &StateSpaceParams) -> Result<DiscreteSsm> {
    let n = p.n;
    let half = 0.5 * p.delta;

    // lhs = I − Δ/2·A; rhs columns = [I + Δ/2·A | Δ·B].
    let mut lhs = vec![0.0; n * n];
    let mut rhs = vec![0.0; n * (n + 1)];
    for i in 0..n {
        for j in 0..n {
            let a_ij = p.a[i * n + j];
            let eye = if i == j { 1.0 } else { 0.0 };
            lhs[i * n + j] = eye - half * a_ij;
            rhs[i * (n + 1) + j] = eye + half * a_ij;
        }
        rhs[i * (n + 1) + n] = p.delta * p.b[i];
    }

    let cond = linalg::lu_solve(&mut lhs, &mut rhs, n, n + 1);
    if !(cond <= 1e12) {
        return Err(Error::SingularDiscretization {
            cond_estimate: cond,
        });
    }

    let mut a_bar = vec![0.0; n * n];
    let mut b_bar = vec![0.0; n];
    for i in 0..n {
        for j in 0..n {
            a_bar[i * n + j] = rhs[i * (n + 1) + j];
        }
        b_bar[i] = rhs[i * (n + 1) + n];
    }
    Ok(DiscreteSsm {
        a_bar,
        b_bar,
        c_bar: p.c.clone(),
        n,
    })
}

/// K̄_ℓ = C̄·Āℓ·B̄ for ℓ = 0..L−1, by iterated state propagation (v ← Ā·v
/// starting from B̄). Cost O(L·N²); no explicit matrix powers.
pub fn unroll_kernel(d: &DiscreteSsm, l: usize) -> Result<KernelVec> {
    if l == 0 {
        return Err(Error::EmptyInput);
    }
    let n = d.n;
    let mut v = d.b_bar.clone();
    let mut next = vec![0.0; n];
    let mut values = Vec::with_capacity(l);
    for step in 0..l {
        values.push(d.c_bar.iter().zip(&v).map(|(c, x)| c * x).sum());
        if step + 1 < l {
            for i in 0..n {
                let mut acc = 0.0;
                for j in 0..n {
                    acc += d.a_bar[i * n + j] * v[j];
                }
                next[i] = acc;
            }
            core::mem::swap(&mut v, &mut next);
        }
    }
    Ok(KernelVec { values })
}

/// Sequential recurrence from a zero initial state: x_ℓ = Ā·x_{ℓ−1} + B̄·u_ℓ,
/// y_ℓ = C̄·x_ℓ.
pub fn scan_recurrent(d: &DiscreteSsm, u: &[f64]) -> Vec<f64> {
    let n = d.n;
    let mut x = vec![0.0; n];
    let mut next = vec![0.0; n];
    let mut y = Vec::with_capacity(u.len());
    for &u_l in u {
        for i in 0..n {
            let mut acc = d.b_bar[i] * u_l;
            for j in 0..n {
                acc += d.a_bar[i * n + j] * x[j];
            }
            next[i] = acc;
        }
        core::mem::swap(&mut x, &mut next);
        y.push(d.c_bar.iter().zip(&x).map(|(c, v)| c * v).sum());
    }
    y
}

/// Direct causal (linear) convolution: y_ℓ = Σ_{m=0..ℓ} k_m·u_{ℓ−m}.
/// Deliberately the O(L²) evaluation.
pub fn causal_convolution(k: &KernelVec, u: &[f64]) -> Result<Vec<f64>> {
    if k.values.len() != u.len() {
        return Err(Error::ShapeMismatch {
            context: "causal_convolution",
            expected: k.values.len(),
            found: u.len(),
        });
    }
    let l = u.len();
    let mut y = vec![0.0; l];
    for out in 0..l {
        let mut acc = 0.0;
        for m in 0..=out {
            acc += k.values[m] * u[out - m];
        }
        y[out] = acc;
    }
    Ok(y)
}

/// Direct circular convolution: y_ℓ = Σ_m k_m·u_{(ℓ−m) mod L}, O(L²).
pub fn circular_convolution(k: &KernelVec, u: &[f64]) -> Result<Vec<f64>> {
    if k.values.len() != u.len() {
        return Err(Error::ShapeMismatch {
            context: "circular_convolution",
            expected: k.values.len(),
            found: u.len(),
        });
    }
    let l = u.len();
    let mut y = vec![0.0; l];
    for out in 0..l {
        let mut acc = 0.0;
        for m in 0..l {
            let idx = (out + l - m) % l;
            acc += k.values[m] * u[idx];
        }
        y[out] = acc;
    }
    Ok(y)
}

/// Draw a random stable test system: A = M − c·I with M ~ N(0,1) entries and
/// the shift c increased until the discretized spectral radius drops below
/// `rho_max`.
pub fn random_stable_system(
    n: usize,
    delta: f64,
    rho_max: f64,
    rng: &mut SplitMix64,
) -> StateSpaceParams {
    assert!(n >= 1 && delta > 0.0 && rho_max > 0.0);
    let m: Vec<f64> = (0..n * n).map(|_| rng.normal()).collect();
    let b: Vec<f64> = (0..n).map(|_| rng.normal()).collect();
    let c: Vec<f64> = (0..n).map(|_| rng.normal()).collect();

    let mut shift = 0.5;
    loop {
        let mut a = m.clone();
        for i in 0..n {
            a[i * n + i] -= shift;
        }
        let params = StateSpaceParams::new(a, b.clone(), c.clone(), delta).expect("valid dims");
        if let Ok(d) = discretize(&params) {
            if d.spectral_radius_est() < rho_max {
                return params;
            }
        }
        shift *= 2.0;
    }
}
