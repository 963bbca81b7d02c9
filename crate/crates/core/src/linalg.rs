//! Internal dense kernels: row-major matrix products and a small pivoted LU.
//!
//! These are deliberately plain loops (i-k-j orderings keep the inner loop
//! contiguous); the matrices in this crate are desk-scale.

use alloc::vec;
use alloc::vec::Vec;

/// out = a(m×k) · b(k×n), overwriting `out`.
pub(crate) fn matmul(a: &[f64], b: &[f64], m: usize, k: usize, n: usize, out: &mut [f64]) {
    debug_assert_eq!(a.len(), m * k);
    debug_assert_eq!(b.len(), k * n);
    debug_assert_eq!(out.len(), m * n);
    out.fill(0.0);
    for i in 0..m {
        for p in 0..k {
            let aip = a[i * k + p];
            if aip == 0.0 {
                continue;
            }
            let brow = &b[p * n..(p + 1) * n];
            let orow = &mut out[i * n..(i + 1) * n];
            for j in 0..n {
                orow[j] += aip * brow[j];
            }
        }
    }
}

/// out(m×k) += g(m×n) · bᵀ where b is (k×n). Adjoint w.r.t. the left factor.
pub(crate) fn acc_g_bt(g: &[f64], b: &[f64], m: usize, n: usize, k: usize, out: &mut [f64]) {
    debug_assert_eq!(g.len(), m * n);
    debug_assert_eq!(b.len(), k * n);
    debug_assert_eq!(out.len(), m * k);
    for i in 0..m {
        let grow = &g[i * n..(i + 1) * n];
        for p in 0..k {
            let brow = &b[p * n..(p + 1) * n];
            let mut acc = 0.0;
            for j in 0..n {
                acc += grow[j] * brow[j];
            }
            out[i * k + p] += acc;
        }
    }
}

/// out(k×n) += aᵀ · g where a is (m×k) and g is (m×n). Adjoint w.r.t. the
/// right factor.
pub(crate) fn acc_at_g(a: &[f64], g: &[f64], m: usize, k: usize, n: usize, out: &mut [f64]) {
    debug_assert_eq!(a.len(), m * k);
    debug_assert_eq!(g.len(), m * n);
    debug_assert_eq!(out.len(), k * n);
    for i in 0..m {
        let grow = &g[i * n..(i + 1) * n];
        for p in 0..k {
            let aip = a[i * k + p];
            if aip == 0.0 {
                continue;
            }
            let orow = &mut out[p * n..(p + 1) * n];
            for j in 0..n {
                orow[j] += aip * grow[j];
            }
        }
    }
}

/// Solve A·X = B in place for square A (n×n) and B (n×m) with partial
/// pivoting. Returns the pivot-magnitude ratio max|u_ii| / min|u_ii| as a
/// cheap condition estimate (infinite when a pivot is exactly zero).
pub(crate) fn lu_solve(a: &mut [f64], b: &mut [f64], n: usize, m: usize) -> f64 {
    debug_assert_eq!(a.len(), n * n);
    debug_assert_eq!(b.len(), n * m);
    let mut max_piv = 0.0f64;
    let mut min_piv = f64::INFINITY;

    for col in 0..n {
        // Pivot selection.
        let mut piv_row = col;
        let mut piv_val = a[col * n + col].abs();
        for r in (col + 1)..n {
            let v = a[r * n + col].abs();
            if v > piv_val {
                piv_val = v;
                piv_row = r;
            }
        }
        if piv_row != col {
            for j in 0..n {
                a.swap(col * n + j, piv_row * n + j);
            }
            for j in 0..m {
                b.swap(col * m + j, piv_row * m + j);
            }
        }
        max_piv = max_piv.max(piv_val);
        min_piv = min_piv.min(piv_val);
        if piv_val == 0.0 {
            return f64::INFINITY;
        }

        let pivot = a[col * n + col];
        for r in (col + 1)..n {
            let factor = a[r * n + col] / pivot;
            if factor == 0.0 {
                continue;
            }
            a[r * n + col] = 0.0;
            for j in (col + 1)..n {
                a[r * n + j] -= factor * a[col * n + j];
            }
            for j in 0..m {
                b[r * m + j] -= factor * b[col * m + j];
            }
        }
    }

    // Back substitution.
    for col in (0..n).rev() {
        let pivot = a[col * n + col];
        for j in 0..m {
            let mut acc = b[col * m + j];
            for p in (col + 1)..n {
                acc -= a[col * n + p] * b[p * m + j];
            }
            b[col * m + j] = acc / pivot;
        }
    }

    max_piv / min_piv
}

/// Frobenius norm.
pub(crate) fn frobenius(a: &[f64]) -> f64 {
    libm::sqrt(a.iter().map(|v| v * v).sum())
}

/// a ← a·b for square matrices (n×n); helper for repeated squaring.
pub(crate) fn square_matmul(a: &[f64], b: &[f64], n: usize) -> Vec<f64> {
    let mut out = vec![0.0; n * n];
    matmul(a, b, n, n, n, &mut out);
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn matmul_small() {
        // [1 2; 3 4] · [5 6; 7 8] = [19 22; 43 50]
        let a = [1.0, 2.0, 3.0, 4.0];
        let b = [5.0, 6.0, 7.0, 8.0];
        let mut out = [0.0; 4];
        matmul(&a, &b, 2, 2, 2, &mut out);
        assert_eq!(out, [19.0, 22.0, 43.0, 50.0]);
    }

    #[test]
    fn adjoints_match_naive_transpose_products() {
        let m = 3;
        let k = 4;
        let n = 2;
        let mut rng = crate::rng::SplitMix64::new(5);
        let a: Vec<f64> = (0..m * k).map(|_| rng.uniform(-1.0, 1.0)).collect();
        let g: Vec<f64> = (0..m * n).map(|_| rng.uniform(-1.0, 1.0)).collect();
        let b: Vec<f64> = (0..k * n).map(|_| rng.uniform(-1.0, 1.0)).collect();

        // acc_g_bt vs manual
        let mut got = vec![0.0; m * k];
        acc_g_bt(&g, &b, m, n, k, &mut got);
        for i in 0..m {
            for p in 0..k {
                let mut want = 0.0;
                for j in 0..n {
                    want += g[i * n + j] * b[p * n + j];
                }
                assert!((got[i * k + p] - want).abs() < 1e-14);
            }
        }

        // acc_at_g vs manual
        let mut got = vec![0.0; k * n];
        acc_at_g(&a, &g, m, k, n, &mut got);
        for p in 0..k {
            for j in 0..n {
                let mut want = 0.0;
                for i in 0..m {
                    want += a[i * k + p] * g[i * n + j];
                }
                assert!((got[p * n + j] - want).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn lu_solves_identity_and_general() {
        // Identity: solution equals rhs.
        let mut a = vec![1.0, 0.0, 0.0, 1.0];
        let mut b = vec![3.0, 4.0];
        let cond = lu_solve(&mut a, &mut b, 2, 1);
        assert_eq!(b, vec![3.0, 4.0]);
        assert_eq!(cond, 1.0);

        // [2 1; 1 3] x = [5; 10] -> x = (1, 3)
        let mut a = vec![2.0, 1.0, 1.0, 3.0];
        let mut b = vec![5.0, 10.0];
        lu_solve(&mut a, &mut b, 2, 1);
        assert!((b[0] - 1.0).abs() < 1e-14);
        assert!((b[1] - 3.0).abs() < 1e-14);
    }

    #[test]
    fn lu_detects_singular() {
        let mut a = vec![1.0, 2.0, 2.0, 4.0];
        let mut b = vec![1.0, 1.0];
        let cond = lu_solve(&mut a, &mut b, 2, 1);
        assert!(cond.is_infinite());
    }
}
