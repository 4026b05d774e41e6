//! Boys function F_m(x) = ∫₀¹ t^{2m} e^{-x t²} dt.

use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Below this argument the Taylor-type series plus downward recursion is used; above
/// it the asymptotic form, whose neglected tail is below 1e-14 here.
pub const ASYMPTOTIC_THRESHOLD: f64 = 30.0;

pub fn boys(m: usize, x: f64) -> Result<f64> {
    if !(x >= 0.0) || !x.is_finite() {
        return Err(Error::Domain(format!(
            "Boys function argument must be finite and >= 0, got {x}"
        )));
    }
    let mut values = vec![0.0; m + 1];
    boys_into(x, &mut values);
    Ok(values[m])
}

/// Fills `out[m]` with F_m(x) for m = 0..out.len(). `x` must be non-negative.
pub(crate) fn boys_into(x: f64, out: &mut [f64]) {
    let Some(m_max) = out.len().checked_sub(1) else {
        return;
    };
    if x < ASYMPTOTIC_THRESHOLD {
        // e^{-x} Σ_k (2x)^k / ((2m+1)(2m+3)...(2m+2k+1)); all terms positive.
        let mut term = 1.0 / (2 * m_max + 1) as f64;
        let mut sum = term;
        let mut k = 1;
        loop {
            term *= 2.0 * x / (2 * m_max + 2 * k + 1) as f64;
            sum += term;
            if term < 1e-17 * sum {
                break;
            }
            k += 1;
        }
        let ex = (-x).exp();
        out[m_max] = ex * sum;
        for m in (0..m_max).rev() {
            out[m] = (2.0 * x * out[m + 1] + ex) / (2 * m + 1) as f64;
        }
    } else {
        // F_m ≈ (2m-1)!! / (2x)^m · ½√(π/x)
        out[0] = 0.5 * (PI / x).sqrt();
        for m in 1..=m_max {
            out[m] = out[m - 1] * (2 * m - 1) as f64 / (2.0 * x);
        }
    }
}
