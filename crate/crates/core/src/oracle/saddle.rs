use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::jmap::{MapParams, Side};

/// Integrand used along the vertical contour.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SaddleMode {
    /// the finite product Π(s + ½ − (i−1)/n) exactly
    FullSum,
    /// F(s; x) + (1/n)·log√((s+½)/(s−½)), the large-n limit of F_n
    LimitPhase,
}

const DROP: f64 = 45.0;

fn log_integrand(s: Complex64, x: f64, n: u32, mode: SaddleMode) -> Complex64 {
    let nf = n as f64;
    let u = s + 0.5 - x;
    let quad = 0.5 * nf * u * u;
    match mode {
        SaddleMode::FullSum => {
            let mut acc = quad;
            for i in 0..n {
                acc += (s + 0.5 - i as f64 / nf).ln();
            }
            acc
        }
        SaddleMode::LimitPhase => {
            let p = s + 0.5;
            let m = s - 0.5;
            quad + nf * (p * p.ln() - m * m.ln() - 1.0) + 0.5 * (p / m).ln()
        }
    }
}

/// p_n^{(n)}(x) for V = x²/2 from the integral
/// √n/(√(2π) i) ∫ e^{n F_n(s; x)} ds over the vertical line through the
/// saddle I₁(x) (outside the support) or through I±(x) (inside).
pub fn saddle_p_quadratic(x: f64, n: u32, mode: SaddleMode) -> Result<f64> {
    if n == 0 {
        return Err(Error::InvalidArgument("n must be positive".into()));
    }
    if !x.is_finite() {
        return Err(Error::InvalidArgument(format!("x={x} is not finite")));
    }
    let map = MapParams::new(1.0, 0.5)?;
    let (a, b) = (map.a, map.b);
    if (x - a).abs() < 0.02 * (b - a) || (x - b).abs() < 0.02 * (b - a) {
        return Err(Error::Coalescence(format!(
            "x={x} is within 0.02(b-a) of an edge; the two saddles merge"
        )));
    }
    let (re, centre) = if x > a && x < b {
        let s = map.boundary_inverse(x, Side::Plus)?;
        (s.re, s.im)
    } else {
        (map.invert_i1(Complex64::new(x, 0.0))?.re, 0.0)
    };
    let f = |y: f64| log_integrand(Complex64::new(re, y), x, n, mode);

    // the integrand decays like e^{−n y²/2}; truncate where it has dropped
    // by e^{−45} from its peak
    let peak = f(centre).re.max(f(-centre).re).max(f(0.0).re);
    let mut y_max = centre + 1.0;
    while f(y_max).re > peak - DROP || f(-y_max).re > peak - DROP {
        y_max *= 1.5;
        if y_max > 1e4 {
            return Err(Error::Convergence("saddle integrand does not decay".into()));
        }
    }
    let g = |y: f64| (f(y) - peak).exp();
    let mut m = 256usize;
    let trap = |m: usize| -> (Complex64, f64) {
        let h = 2.0 * y_max / m as f64;
        let mut s = Complex64::new(0.0, 0.0);
        let mut mag = 0.0;
        for i in 0..=m {
            let v = g(-y_max + h * i as f64);
            let w = if i == 0 || i == m { 0.5 } else { 1.0 };
            s += v * w;
            mag += v.norm() * w;
        }
        (s * h, mag * h)
    };
    let (mut prev, _) = trap(m);
    for _ in 0..12 {
        m *= 2;
        let (cur, mag) = trap(m);
        if (cur - prev).norm() <= 1e-13 * mag {
            // ds = i dy cancels the i in the prefactor
            let val = cur.re * ((n as f64) / (2.0 * PI)).sqrt();
            return Ok(val * peak.exp());
        }
        prev = cur;
    }
    Err(Error::Convergence(format!(
        "saddle integral at x={x}, n={n} did not settle"
    )))
}
