//! Complex vectors, tensors, and the discrete Fourier transform.
//!
//! Convention: unnormalized forward transform, 1/L on the inverse —
//!
//! ```text
//! X_k = Σ_n x_n · exp(-2πi·nk/L)        x_n = (1/L) · Σ_k X_k · exp(+2πi·nk/L)
//! ```
//!
//! Power-of-two lengths go through an iterative radix-2 Cooley–Tukey pass;
//! every other length is reduced to a padded power-of-two circular
//! convolution with Bluestein's chirp-z identity, so arbitrary L (the token
//! counts of patch grids are rarely powers of two) costs O(L log L).
//!
//! All routines are pure functions of their arguments and allocate their
//! outputs; twiddle tables are built per call from direct trig evaluation,
//! so identical input bits always produce identical output bits.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use crate::error::Error;
use crate::Result;

/// A length-L complex signal stored as split real/imaginary arrays.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexVec {
    pub re: Vec<f64>,
    pub im: Vec<f64>,
}

impl ComplexVec {
    /// Build from split components. The two arrays must have equal length.
    pub fn new(re: Vec<f64>, im: Vec<f64>) -> Result<Self> {
        if re.len() != im.len() {
            return Err(Error::ShapeMismatch {
                context: "ComplexVec::new",
                expected: re.len(),
                found: im.len(),
            });
        }
        Ok(Self { re, im })
    }

    pub fn zeros(len: usize) -> Self {
        Self {
            re: vec![0.0; len],
            im: vec![0.0; len],
        }
    }

    /// Embed a real signal (imaginary part all zero).
    pub fn from_real(values: &[f64]) -> Self {
        Self {
            re: values.to_vec(),
            im: vec![0.0; values.len()],
        }
    }

    pub fn len(&self) -> usize {
        self.re.len()
    }

    pub fn is_empty(&self) -> bool {
        self.re.is_empty()
    }

    pub fn conj(&self) -> Self {
        Self {
            re: self.re.clone(),
            im: self.im.iter().map(|v| -v).collect(),
        }
    }

    /// Copy into a longer zero-padded vector. `len` must be ≥ the current
    /// length.
    pub fn zero_padded(&self, len: usize) -> Self {
        debug_assert!(len >= self.len());
        let mut out = Self::zeros(len);
        out.re[..self.len()].copy_from_slice(&self.re);
        out.im[..self.len()].copy_from_slice(&self.im);
        out
    }

    pub fn scale(&mut self, s: f64) {
        for v in self.re.iter_mut() {
            *v *= s;
        }
        for v in self.im.iter_mut() {
            *v *= s;
        }
    }

    pub fn all_finite(&self) -> bool {
        self.re.iter().chain(self.im.iter()).all(|v| v.is_finite())
    }
}

/// A real row-major array of rank ≤ 3.
#[derive(Debug, Clone, PartialEq)]
pub struct Tensor {
    data: Vec<f64>,
    shape: Vec<usize>,
}

impl Tensor {
    /// Validated constructor: rank ≤ 3, every dimension ≥ 1, and the data
    /// length must equal the shape product.
    pub fn new(shape: Vec<usize>, data: Vec<f64>) -> Result<Self> {
        if shape.is_empty() || shape.len() > 3 {
            return Err(Error::InvalidConfig(alloc::format!(
                "tensor rank must be 1..=3, got {}",
                shape.len()
            )));
        }
        if shape.contains(&0) {
            return Err(Error::InvalidConfig(alloc::format!(
                "tensor dimensions must be >= 1, got {shape:?}"
            )));
        }
        let numel: usize = shape.iter().product();
        if numel != data.len() {
            return Err(Error::ShapeMismatch {
                context: "Tensor::new",
                expected: numel,
                found: data.len(),
            });
        }
        Ok(Self { data, shape })
    }

    pub fn zeros(shape: Vec<usize>) -> Result<Self> {
        let numel: usize = shape.iter().product();
        Self::new(shape, vec![0.0; numel])
    }

    /// Rank-1 tensor over the given data (any length, including 0; useful
    /// for derived quantities like magnitude spectra).
    pub fn vector(data: Vec<f64>) -> Self {
        let len = data.len();
        Self {
            data,
            shape: vec![len],
        }
    }

    pub fn shape(&self) -> &[usize] {
        &self.shape
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [f64] {
        &mut self.data
    }

    pub fn into_data(self) -> Vec<f64> {
        self.data
    }

    /// Rank-2 element access.
    pub fn at2(&self, i: usize, j: usize) -> f64 {
        debug_assert_eq!(self.shape.len(), 2);
        self.data[i * self.shape[1] + j]
    }
}

/// Smallest power of two ≥ `n` (n ≥ 1).
pub(crate) fn next_pow2(n: usize) -> usize {
    n.next_power_of_two()
}

/// Forward DFT. Radix-2 for power-of-two lengths, Bluestein otherwise.
pub fn fft(x: &ComplexVec) -> Result<ComplexVec> {
    if x.is_empty() {
        return Err(Error::EmptyInput);
    }
    let mut out = x.clone();
    if x.len().is_power_of_two() {
        fft_radix2(&mut out.re, &mut out.im);
    } else {
        out = fft_bluestein(x);
    }
    Ok(out)
}

/// Inverse DFT with 1/L normalization, evaluated as conj(fft(conj(X)))/L so
/// both directions share one code path.
pub fn ifft(x: &ComplexVec) -> Result<ComplexVec> {
    if x.is_empty() {
        return Err(Error::EmptyInput);
    }
    let mut out = fft(&x.conj())?;
    let inv_l = 1.0 / x.len() as f64;
    for k in 0..out.len() {
        out.re[k] *= inv_l;
        out.im[k] *= -inv_l;
    }
    Ok(out)
}

/// Element-wise complex product (a ⊙ b). Lengths must match.
pub fn pointwise_mul(a: &ComplexVec, b: &ComplexVec) -> Result<ComplexVec> {
    if a.len() != b.len() {
        return Err(Error::ShapeMismatch {
            context: "pointwise_mul",
            expected: a.len(),
            found: b.len(),
        });
    }
    let mut out = ComplexVec::zeros(a.len());
    for k in 0..a.len() {
        out.re[k] = a.re[k] * b.re[k] - a.im[k] * b.im[k];
        out.im[k] = a.re[k] * b.im[k] + a.im[k] * b.re[k];
    }
    Ok(out)
}

/// Entry-wise magnitude spectrum |x| = sqrt(re² + im²).
pub fn magnitude(x: &ComplexVec) -> Tensor {
    let data =
        x.re.iter()
            .zip(x.im.iter())
            .map(|(&r, &i)| libm::sqrt(r * r + i * i))
            .collect();
    Tensor::vector(data)
}

/// Direct O(L²) evaluation of the forward DFT sum. This is the quadratic
/// reference the fast transform is checked against; it shares no code with
/// [`fft`].
pub fn dft_direct(x: &ComplexVec) -> Result<ComplexVec> {
    if x.is_empty() {
        return Err(Error::EmptyInput);
    }
    let l = x.len();
    let mut out = ComplexVec::zeros(l);
    for k in 0..l {
        let mut acc_re = 0.0;
        let mut acc_im = 0.0;
        for n in 0..l {
            // Reduce n·k mod L before the trig call to keep angles small.
            let ang = -2.0 * PI * ((n * k) % l) as f64 / l as f64;
            let (c, s) = (libm::cos(ang), libm::sin(ang));
            acc_re += x.re[n] * c - x.im[n] * s;
            acc_im += x.re[n] * s + x.im[n] * c;
        }
        out.re[k] = acc_re;
        out.im[k] = acc_im;
    }
    Ok(out)
}

/// In-place iterative radix-2 Cooley–Tukey, decimation in time.
fn fft_radix2(re: &mut [f64], im: &mut [f64]) {
    let n = re.len();
    debug_assert!(n.is_power_of_two());
    if n <= 1 {
        return;
    }

    // Bit-reversal permutation.
    let mut j = 0usize;
    for i in 1..n {
        let mut bit = n >> 1;
        while j & bit != 0 {
            j ^= bit;
            bit >>= 1;
        }
        j ^= bit;
        if i < j {
            re.swap(i, j);
            im.swap(i, j);
        }
    }

    // One half-length twiddle table serves every stage; stage with block
    // length `len` strides it by n/len.
    let half = n / 2;
    let mut wre = Vec::with_capacity(half);
    let mut wim = Vec::with_capacity(half);
    for k in 0..half {
        let ang = -2.0 * PI * k as f64 / n as f64;
        wre.push(libm::cos(ang));
        wim.push(libm::sin(ang));
    }

    let mut len = 2;
    while len <= n {
        let half_len = len / 2;
        let stride = n / len;
        let mut start = 0;
        while start < n {
            for k in 0..half_len {
                let w = k * stride;
                let a = start + k;
                let b = a + half_len;
                let tr = wre[w] * re[b] - wim[w] * im[b];
                let ti = wre[w] * im[b] + wim[w] * re[b];
                re[b] = re[a] - tr;
                im[b] = im[a] - ti;
                re[a] += tr;
                im[a] += ti;
            }
            start += len;
        }
        len <<= 1;
    }
}

/// Bluestein chirp-z: re-express the length-L DFT as a circular convolution
/// of chirp-modulated sequences, padded to a power of two ≥ 2L−1.
fn fft_bluestein(x: &ComplexVec) -> ComplexVec {
    let l = x.len();
    let p = next_pow2(2 * l - 1);

    // Chirp c_n = exp(-iπ n²/L). n² is reduced mod 2L in integer arithmetic
    // so the trig argument never loses precision at large n.
    let mut cre = Vec::with_capacity(l);
    let mut cim = Vec::with_capacity(l);
    for n in 0..l {
        let q = ((n as u64 * n as u64) % (2 * l as u64)) as f64;
        let ang = -PI * q / l as f64;
        cre.push(libm::cos(ang));
        cim.push(libm::sin(ang));
    }

    // a = x ⊙ c, zero-padded.
    let mut are = vec![0.0; p];
    let mut aim = vec![0.0; p];
    for n in 0..l {
        are[n] = x.re[n] * cre[n] - x.im[n] * cim[n];
        aim[n] = x.re[n] * cim[n] + x.im[n] * cre[n];
    }

    // b_m = conj(c)_m laid out circularly so (a ⊛ b)_k = Σ_n a_n b_{k−n}.
    let mut bre = vec![0.0; p];
    let mut bim = vec![0.0; p];
    bre[0] = cre[0];
    bim[0] = -cim[0];
    for m in 1..l {
        bre[m] = cre[m];
        bim[m] = -cim[m];
        bre[p - m] = cre[m];
        bim[p - m] = -cim[m];
    }

    fft_radix2(&mut are, &mut aim);
    fft_radix2(&mut bre, &mut bim);
    for k in 0..p {
        let r = are[k] * bre[k] - aim[k] * bim[k];
        let i = are[k] * bim[k] + aim[k] * bre[k];
        are[k] = r;
        aim[k] = i;
    }
    // Inverse pow-2 transform via the conjugation identity.
    for v in aim.iter_mut() {
        *v = -*v;
    }
    fft_radix2(&mut are, &mut aim);
    let inv_p = 1.0 / p as f64;

    let mut out = ComplexVec::zeros(l);
    for k in 0..l {
        let vr = are[k] * inv_p;
        let vi = -aim[k] * inv_p;
        out.re[k] = cre[k] * vr - cim[k] * vi;
        out.im[k] = cre[k] * vi + cim[k] * vr;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn max_abs_diff(a: &ComplexVec, b: &ComplexVec) -> f64 {
        let mut worst = 0.0f64;
        for k in 0..a.len() {
            worst = worst.max((a.re[k] - b.re[k]).abs());
            worst = worst.max((a.im[k] - b.im[k]).abs());
        }
        worst
    }

    fn random_vec(l: usize, seed: u64) -> ComplexVec {
        let mut rng = crate::rng::SplitMix64::new(seed);
        let re = (0..l).map(|_| rng.uniform(-1.0, 1.0)).collect();
        let im = (0..l).map(|_| rng.uniform(-1.0, 1.0)).collect();
        ComplexVec::new(re, im).unwrap()
    }

    #[test]
    fn fft_rejects_empty() {
        assert_eq!(fft(&ComplexVec::zeros(0)), Err(Error::EmptyInput));
        assert_eq!(ifft(&ComplexVec::zeros(0)), Err(Error::EmptyInput));
    }

    #[test]
    fn fft_of_zeros_is_zeros() {
        let x = ComplexVec::zeros(8);
        let y = fft(&x).unwrap();
        assert!(y.re.iter().chain(y.im.iter()).all(|&v| v == 0.0));
    }

    #[test]
    fn fft_of_delta_is_ones() {
        let x = ComplexVec::from_real(&[1.0, 0.0, 0.0, 0.0]);
        let y = fft(&x).unwrap();
        for k in 0..4 {
            assert!((y.re[k] - 1.0).abs() < 1e-15);
            assert!(y.im[k].abs() < 1e-15);
        }
    }

    #[test]
    fn fft_known_length_four() {
        // (1,2,3,4) -> (10, -2+2i, -2, -2-2i); agrees with dft_direct below.
        let x = ComplexVec::from_real(&[1.0, 2.0, 3.0, 4.0]);
        let y = fft(&x).unwrap();
        let expect_re = [10.0, -2.0, -2.0, -2.0];
        let expect_im = [0.0, 2.0, 0.0, -2.0];
        for k in 0..4 {
            assert!(
                (y.re[k] - expect_re[k]).abs() < 1e-12,
                "re[{k}] = {}",
                y.re[k]
            );
            assert!(
                (y.im[k] - expect_im[k]).abs() < 1e-12,
                "im[{k}] = {}",
                y.im[k]
            );
        }
        let oracle = dft_direct(&x).unwrap();
        assert!(max_abs_diff(&y, &oracle) < 1e-12);
    }

    #[test]
    fn fft_matches_direct_dft_all_small_and_selected_lengths() {
        for l in (1..=64).chain([100, 196, 500, 1000]) {
            let x = random_vec(l, 1000 + l as u64);
            let fast = fft(&x).unwrap();
            let slow = dft_direct(&x).unwrap();
            let err = max_abs_diff(&fast, &slow);
            assert!(err < 1e-10, "L={l}: max err {err:.3e}");
        }
    }

    #[test]
    fn round_trip_length_196() {
        let x = random_vec(196, 7);
        let back = ifft(&fft(&x).unwrap()).unwrap();
        let err = max_abs_diff(&x, &back);
        assert!(err < 1e-12, "round-trip err {err:.3e}");
    }

    #[test]
    fn round_trip_large_pow2() {
        let x = random_vec(8192, 11);
        let back = ifft(&fft(&x).unwrap()).unwrap();
        let err = max_abs_diff(&x, &back);
        assert!(err < 1e-12, "round-trip err {err:.3e}");
    }

    #[test]
    fn ifft_of_constant_spectrum_is_delta() {
        let c = 2.5;
        let x = ComplexVec::from_real(&[c; 8]);
        let y = ifft(&x).unwrap();
        assert!((y.re[0] - c).abs() < 1e-14);
        for k in 1..8 {
            assert!(y.re[k].abs() < 1e-14);
            assert!(y.im[k].abs() < 1e-14);
        }
    }

    #[test]
    fn ifft_of_zeros_is_zeros() {
        let y = ifft(&ComplexVec::zeros(5)).unwrap();
        assert!(y.re.iter().chain(y.im.iter()).all(|&v| v == 0.0));
    }

    #[test]
    fn pointwise_mul_identity_zero_and_conjugate() {
        let a = random_vec(16, 3);
        let ones = ComplexVec::from_real(&[1.0; 16]);
        assert_eq!(pointwise_mul(&a, &ones).unwrap(), a);

        let zeros = ComplexVec::zeros(16);
        let z = pointwise_mul(&a, &zeros).unwrap();
        assert!(z.re.iter().chain(z.im.iter()).all(|&v| v == 0.0));

        // (1+i)(1-i) = 2 at every slot.
        let p = ComplexVec::new(vec![1.0; 4], vec![1.0; 4]).unwrap();
        let q = ComplexVec::new(vec![1.0; 4], vec![-1.0; 4]).unwrap();
        let r = pointwise_mul(&p, &q).unwrap();
        for k in 0..4 {
            assert_eq!(r.re[k], 2.0);
            assert_eq!(r.im[k], 0.0);
        }
    }

    #[test]
    fn pointwise_mul_length_mismatch() {
        let a = ComplexVec::zeros(4);
        let b = ComplexVec::zeros(5);
        assert!(matches!(
            pointwise_mul(&a, &b),
            Err(Error::ShapeMismatch { .. })
        ));
    }

    #[test]
    fn magnitude_examples() {
        let x = ComplexVec::new(vec![3.0, 0.0, 1.0], vec![4.0, 0.0, 1.0]).unwrap();
        let m = magnitude(&x);
        assert_eq!(m.data()[0], 5.0);
        assert_eq!(m.data()[1], 0.0);
        assert!((m.data()[2] - core::f64::consts::SQRT_2).abs() < 1e-12);
    }

    #[test]
    fn conjugate_symmetry_of_real_input() {
        for l in [12, 16, 31] {
            let mut rng = crate::rng::SplitMix64::new(l as u64);
            let x =
                ComplexVec::from_real(&(0..l).map(|_| rng.uniform(-1.0, 1.0)).collect::<Vec<_>>());
            let y = fft(&x).unwrap();
            for k in 1..l {
                assert!((y.re[l - k] - y.re[k]).abs() < 1e-12);
                assert!((y.im[l - k] + y.im[k]).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn tensor_validation() {
        assert!(Tensor::new(vec![2, 3], vec![0.0; 6]).is_ok());
        assert!(Tensor::new(vec![2, 3], vec![0.0; 5]).is_err());
        assert!(Tensor::new(vec![2, 0], vec![]).is_err());
        assert!(Tensor::new(vec![1, 1, 1, 1], vec![0.0]).is_err());
    }

    mod properties {
        use super::*;
        use proptest::prelude::*;

        fn arb_signal(max_len: usize) -> impl Strategy<Value = ComplexVec> {
            (1..=max_len).prop_flat_map(|l| {
                (
                    proptest::collection::vec(-1.0f64..1.0, l),
                    proptest::collection::vec(-1.0f64..1.0, l),
                )
                    .prop_map(|(re, im)| ComplexVec::new(re, im).unwrap())
            })
        }

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(64))]

            #[test]
            fn round_trip(x in arb_signal(300)) {
                let back = ifft(&fft(&x).unwrap()).unwrap();
                prop_assert!(max_abs_diff(&x, &back) < 1e-12);
            }

            #[test]
            fn parseval(x in arb_signal(300)) {
                let y = fft(&x).unwrap();
                let time: f64 = x.re.iter().zip(&x.im).map(|(r, i)| r * r + i * i).sum();
                let freq: f64 = y.re.iter().zip(&y.im).map(|(r, i)| r * r + i * i).sum();
                let rel = (time - freq / x.len() as f64).abs() / time.max(1e-30);
                prop_assert!(rel < 1e-12, "relative Parseval error {rel:.3e}");
            }

            #[test]
            fn linearity(
                seed in 0u64..1000,
                l in 1usize..200,
                alpha in -2.0f64..2.0,
                beta in -2.0f64..2.0,
            ) {
                let x = random_vec(l, seed);
                let y = random_vec(l, seed ^ 0xabcdef);
                let mut combo = ComplexVec::zeros(l);
                for k in 0..l {
                    combo.re[k] = alpha * x.re[k] + beta * y.re[k];
                    combo.im[k] = alpha * x.im[k] + beta * y.im[k];
                }
                let lhs = fft(&combo).unwrap();
                let fx = fft(&x).unwrap();
                let fy = fft(&y).unwrap();
                let mut rhs = ComplexVec::zeros(l);
                for k in 0..l {
                    rhs.re[k] = alpha * fx.re[k] + beta * fy.re[k];
                    rhs.im[k] = alpha * fx.im[k] + beta * fy.im[k];
                }
                prop_assert!(max_abs_diff(&lhs, &rhs) < 1e-12);
            }

            #[test]
            fn outputs_stay_finite(x in arb_signal(256)) {
                let y = fft(&x).unwrap();
                prop_assert!(y.all_finite());
                let z = ifft(&y).unwrap();
                prop_assert!(z.all_finite());
            }
        }
    }
}
