use rayon::prelude::*;
use rug::Float;

use crate::equilibrium::FieldSpec;
use crate::error::{Error, Result};
use crate::numerics::PrecisionContext;

const MAX_LEVELS: usize = 14;
const START_INTERVALS: usize = 64;
const CHUNK: usize = 32;

/// m[j][k] = ∫ λʲ e^{kλ} e^{−nV(λ)} dλ at extended precision.
#[derive(Debug, Clone)]
pub struct MomentTable {
    pub n: u32,
    pub jmax: usize,
    pub kmax: usize,
    pub precision: PrecisionContext,
    pub field: FieldSpec,
    entries: Vec<Vec<Float>>,
    window: (f64, f64),
}

impl MomentTable {
    pub fn get(&self, j: usize, k: usize) -> &Float {
        &self.entries[j][k]
    }

    pub fn get_f64(&self, j: usize, k: usize) -> f64 {
        self.entries[j][k].to_f64()
    }

    /// Integration window [L, R] outside of which every integrand is
    /// negligible at the working precision.
    pub fn window(&self) -> (f64, f64) {
        self.window
    }

    pub fn bits(&self) -> u32 {
        self.precision.bits()
    }
}

/// log of |λ|ʲ e^{kλ − nV(λ)}
fn log_weight(coeffs: &[f64], n: f64, j: usize, k: usize, x: f64) -> f64 {
    let v = coeffs.iter().rev().fold(0.0, |acc, c| acc * x + c);
    let pow = if j == 0 { 0.0 } else { j as f64 * x.abs().ln() };
    pow + k as f64 * x - n * v
}

fn window(field: &FieldSpec, n: u32, jmax: usize, kmax: usize, cut: f64) -> Result<(f64, f64)> {
    let coeffs = field.coeffs();
    let nf = n as f64;
    let mut half = 4.0f64;
    loop {
        if half > 1e4 {
            return Err(Error::Range(format!(
                "moment integrands do not fall below e^-{cut:.0} within |λ| < 1e4"
            )));
        }
        let m = 4000;
        let xs: Vec<f64> = (0..=m)
            .map(|i| -half + 2.0 * half * i as f64 / m as f64)
            .collect();
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        let mut closed = true;
        for j in 0..=jmax {
            for k in 0..=kmax {
                let vals: Vec<f64> = xs
                    .iter()
                    .map(|&x| log_weight(&coeffs, nf, j, k, x))
                    .collect();
                let peak = vals.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
                if !peak.is_finite() {
                    return Err(Error::Range(format!(
                        "moment weight not finite (j={j}, k={k})"
                    )));
                }
                if vals[0] > peak - cut || vals[m] > peak - cut {
                    closed = false;
                }
                let first = vals.iter().position(|&v| v > peak - cut).unwrap_or(0);
                let last = vals.iter().rposition(|&v| v > peak - cut).unwrap_or(m);
                lo = lo.min(xs[first.saturating_sub(1)]);
                hi = hi.max(xs[(last + 1).min(m)]);
            }
        }
        if closed {
            return Ok((lo, hi));
        }
        half *= 2.0;
    }
}

type Sums = (Vec<Vec<Float>>, Vec<Vec<Float>>);

fn zero_sums(prec: u32, jmax: usize, kmax: usize) -> Sums {
    let z = vec![vec![Float::new(prec); kmax + 1]; jmax + 1];
    (z.clone(), z)
}

fn accumulate(acc: &mut Sums, x: &Float, coeffs: &[Float], n: u32, prec: u32) {
    let (sum, abs) = acc;
    // w = exp(−nV(x))
    let mut v = Float::new(prec);
    for c in coeffs.iter().rev() {
        v *= x;
        v += c;
    }
    v *= n;
    let w = Float::with_val(prec, -v).exp();
    let ex = Float::with_val(prec, x.exp_ref());
    let mut base = w;
    for k in 0..sum[0].len() {
        let mut term = base.clone();
        for j in 0..sum.len() {
            sum[j][k] += &term;
            abs[j][k] += Float::with_val(prec, term.abs_ref());
            term *= x;
        }
        base *= &ex;
    }
}

fn merge(mut a: Sums, b: Sums) -> Sums {
    for (ra, rb) in a.0.iter_mut().zip(b.0) {
        for (x, y) in ra.iter_mut().zip(rb) {
            *x += y;
        }
    }
    for (ra, rb) in a.1.iter_mut().zip(b.1) {
        for (x, y) in ra.iter_mut().zip(rb) {
            *x += y;
        }
    }
    a
}

/// Moments m[j][k] for 0 ≤ j ≤ jmax, 0 ≤ k ≤ kmax by the trapezoid rule on a
/// window outside which every integrand is below 2^{−(bits+10)} of its peak;
/// the step is halved until all entries settle to the working precision.
pub fn compute_moments(
    field: &FieldSpec,
    n: u32,
    jmax: usize,
    kmax: usize,
    precision: PrecisionContext,
) -> Result<MomentTable> {
    field.validate()?;
    if n == 0 {
        return Err(Error::InvalidArgument("n must be positive".into()));
    }
    let prec = precision.bits();
    let cut = (prec as f64 + 10.0) * std::f64::consts::LN_2;
    let (lo, hi) = window(field, n, jmax, kmax, cut)?;
    let coeffs: Vec<Float> = field
        .coeffs()
        .iter()
        .map(|c| Float::with_val(prec, c))
        .collect();
    let lo_f = Float::with_val(prec, lo);
    let len = Float::with_val(prec, hi - lo);

    let node = |i: usize, intervals: usize| -> Float {
        let mut x = Float::with_val(prec, &len * i as u32);
        x /= intervals as u32;
        x += &lo_f;
        x
    };
    // fixed chunks reduced in index order keep the sums independent of the
    // thread count
    let sweep = |idx: Vec<usize>, intervals: usize| -> Sums {
        let parts: Vec<Sums> = idx
            .par_chunks(CHUNK)
            .map(|chunk| {
                let mut acc = zero_sums(prec, jmax, kmax);
                for &i in chunk {
                    accumulate(&mut acc, &node(i, intervals), &coeffs, n, prec);
                }
                acc
            })
            .collect();
        parts
            .into_iter()
            .fold(zero_sums(prec, jmax, kmax), merge)
    };

    let mut intervals = START_INTERVALS;
    let mut sums = sweep((0..=intervals).collect(), intervals);
    let scaled = |s: &Sums, intervals: usize| -> Vec<Vec<Float>> {
        let mut h = Float::with_val(prec, &len);
        h /= intervals as u32;
        s.0.iter()
            .map(|r| r.iter().map(|v| Float::with_val(prec, v * &h)).collect())
            .collect()
    };
    let mut prev = scaled(&sums, intervals);
    let mut tol = Float::with_val(prec, 1);
    tol >>= prec - 20;
    for _ in 0..MAX_LEVELS {
        let fine = intervals * 2;
        let odd = sweep((1..fine).step_by(2).collect(), fine);
        sums = merge(sums, odd);
        intervals = fine;
        let cur = scaled(&sums, intervals);
        let mut h = Float::with_val(prec, &len);
        h /= intervals as u32;
        let settled = cur.iter().zip(&prev).zip(&sums.1).all(|((c, p), a)| {
            c.iter().zip(p).zip(a).all(|((c, p), a)| {
                let diff = Float::with_val(prec, c - p).abs();
                let scale = Float::with_val(prec, a * &h);
                diff <= Float::with_val(prec, &scale * &tol)
            })
        });
        prev = cur;
        if settled {
            let entries = prev;
            if !entries.iter().flatten().all(|v| v.is_finite()) || !entries[0][0].is_sign_positive()
            {
                return Err(Error::Range("moment table has non-finite entries".into()));
            }
            return Ok(MomentTable {
                n,
                jmax,
                kmax,
                precision,
                field: field.clone(),
                entries,
                window: (lo, hi),
            });
        }
    }
    Err(Error::Convergence(format!(
        "moment quadrature did not settle with {intervals} intervals"
    )))
}
