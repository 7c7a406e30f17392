//! Truncated power series `sum c_k x^k`, stored densely.

use alloc::vec;
use alloc::vec::Vec;

pub(crate) fn mul(a: &[f64], b: &[f64], len: usize) -> Vec<f64> {
    let mut out = vec![0.0; len];
    for (i, &ai) in a.iter().enumerate().take(len) {
        if ai == 0.0 {
            continue;
        }
        for (j, &bj) in b.iter().enumerate().take(len - i) {
            out[i + j] += ai * bj;
        }
    }
    out
}

/// `x * d/dx`, which keeps the length.
pub(crate) fn euler(a: &[f64]) -> Vec<f64> {
    a.iter().enumerate().map(|(k, &c)| k as f64 * c).collect()
}

/// Multiplies by `x^k`, truncating to `len`.
pub(crate) fn shift(a: &[f64], k: usize, len: usize) -> Vec<f64> {
    let mut out = vec![0.0; len];
    for (i, &c) in a.iter().enumerate() {
        if i + k < len {
            out[i + k] = c;
        }
    }
    out
}

pub(crate) fn axpy(acc: &mut [f64], s: f64, a: &[f64]) {
    for (o, &c) in acc.iter_mut().zip(a) {
        *o += s * c;
    }
}

/// Horner evaluation.
pub(crate) fn eval(c: &[f64], x: f64) -> f64 {
    c.iter().rev().fold(0.0, |acc, &ck| acc * x + ck)
}

/// Derivative `d/dx` evaluated at `x`.
pub(crate) fn eval_deriv(c: &[f64], x: f64) -> f64 {
    c.iter().enumerate().skip(1).rev().fold(0.0, |acc, (k, &ck)| acc * x + k as f64 * ck)
}

/// Determines `c[from..len]` one at a time so that `residual(c)` vanishes
/// order by order. Order `k` of the residual must depend on `c[0..=k]`
/// only and affinely on `c[k]`, with a nonzero slope.
pub(crate) fn match_powers<F>(seed: &[f64], len: usize, residual: F) -> Vec<f64>
where
    F: Fn(&[f64]) -> Vec<f64>,
{
    let mut c = vec![0.0; len];
    c[..seed.len()].copy_from_slice(seed);
    for k in seed.len()..len {
        c[k] = 0.0;
        let r0 = residual(&c[..=k])[k];
        c[k] = 1.0;
        let r1 = residual(&c[..=k])[k];
        c[k] = -r0 / (r1 - r0);
    }
    c
}
