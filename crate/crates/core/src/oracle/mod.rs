//! Exact finite-n multiple orthogonal polynomials from extended-precision
//! moment systems, the vertical-line integral for V = x²/2, real zeros and
//! the distance of zero counting measures to μ_V.

mod moments;
mod poly;
mod saddle;

pub use moments::{compute_moments, MomentTable};
pub use poly::{exact_h, exact_p, exact_q, exact_q_det, pairing, real_zeros, Basis, ExactPoly};
pub use saddle::{saddle_p_quadratic, SaddleMode};

use crate::equilibrium::EquilibriumData;
use crate::error::{Error, Result};

/// Kolmogorov distance sup_x |F_n(x) − μ_V((−∞, x])| between the empirical
/// distribution of the zeros and the equilibrium measure.
pub fn counting_measure_distance(zeros: &[f64], eq: &EquilibriumData) -> Result<f64> {
    if zeros.is_empty() {
        return Err(Error::InvalidArgument("no zeros given".into()));
    }
    let mut z = zeros.to_vec();
    if z.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidArgument("non-finite zero".into()));
    }
    z.sort_by(f64::total_cmp);
    let n = z.len() as f64;
    let mut worst: f64 = 0.0;
    for (i, &x) in z.iter().enumerate() {
        let f = eq.cdf(x);
        // the empirical CDF jumps from i/n to (i+1)/n at x
        worst = worst
            .max((f - i as f64 / n).abs())
            .max((f - (i + 1) as f64 / n).abs());
    }
    Ok(worst)
}

#[cfg(test)]
mod tests;
