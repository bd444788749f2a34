use std::f64::consts::PI;
use std::sync::OnceLock;

use rug::ops::Pow;
use rug::Float;

use crate::error::{Error, Result};

// Beyond this magnitude the asymptotic series reaches double precision
// before its terms start growing.
const SERIES_LIMIT: f64 = 9.0;

/// Returns `(Ai(x), Ai'(x))`.
///
/// For |x| <= 9 the Maclaurin series is summed in extended precision, which
/// absorbs the cancellation of its alternating terms for positive x. Beyond
/// that the standard asymptotic expansions are used. Ai underflows to zero
/// for x above roughly 104.
pub fn airy_ai_and_prime(x: f64) -> Result<(f64, f64)> {
    if !x.is_finite() {
        return Err(Error::Range(format!("Airy argument {x} is not finite")));
    }
    if x.abs() <= SERIES_LIMIT {
        Ok(maclaurin(x))
    } else if x > 0.0 {
        Ok(asymptotic_positive(x))
    } else {
        asymptotic_negative(-x)
    }
}

fn constants() -> &'static (Float, Float) {
    static C: OnceLock<(Float, Float)> = OnceLock::new();
    C.get_or_init(|| {
        let prec = 256;
        let three = Float::with_val(prec, 3);
        // Ai(0) = 3^{-2/3} / Γ(2/3), -Ai'(0) = 3^{-1/3} / Γ(1/3)
        let g23 = Float::with_val(prec, Float::with_val(prec, 2) / 3u32).gamma();
        let g13 = Float::with_val(prec, Float::with_val(prec, 1) / 3u32).gamma();
        let p23 = Float::with_val(prec, three.clone().pow(Float::with_val(prec, -2) / 3u32));
        let p13 = Float::with_val(prec, three.pow(Float::with_val(prec, -1) / 3u32));
        (p23 / g23, p13 / g13)
    })
}

fn maclaurin(x: f64) -> (f64, f64) {
    let loss = (4.0 / 3.0) * x.max(0.0).powf(1.5) / std::f64::consts::LN_2;
    let prec = 96 + loss.ceil() as u32;
    let (c1, c2) = constants();
    let xf = Float::with_val(prec, x);
    let x2 = Float::with_val(prec, &xf * &xf);
    let x3 = Float::with_val(prec, &x2 * &xf);

    let mut f = Float::with_val(prec, 1);
    let mut g = xf.clone();
    let mut fp = Float::with_val(prec, 0);
    let mut gp = Float::with_val(prec, 1);
    let mut t = Float::with_val(prec, 1);
    let mut s = xf.clone();
    let mut tp = x2 / 2u32;
    let mut sp = Float::with_val(prec, 1);
    let cutoff = Float::with_val(prec, Float::i_exp(1, -(prec as i32)));
    for k in 1..400u32 {
        let kk = 3 * k;
        t *= &x3;
        t /= (kk - 1) * kk;
        s *= &x3;
        s /= kk * (kk + 1);
        if k >= 2 {
            tp *= &x3;
            tp /= (kk - 1) * (kk - 3);
        }
        sp *= &x3;
        sp /= kk * (kk - 2);
        f += &t;
        g += &s;
        fp += &tp;
        gp += &sp;
        let small = |v: &Float| Float::with_val(prec, v.abs_ref()) < cutoff;
        if small(&t) && small(&s) && small(&tp) && small(&sp) {
            break;
        }
    }
    let ai = Float::with_val(prec, c1 * &f) - Float::with_val(prec, c2 * &g);
    let aip = Float::with_val(prec, c1 * &fp) - Float::with_val(prec, c2 * &gp);
    (ai.to_f64(), aip.to_f64())
}

fn series_u(k: usize) -> f64 {
    let mut u = 1.0;
    for j in 1..=k {
        let jf = j as f64;
        u *= (6.0 * jf - 5.0) * (6.0 * jf - 3.0) * (6.0 * jf - 1.0)
            / ((2.0 * jf - 1.0) * 216.0 * jf);
    }
    u
}

fn series_v(k: usize) -> f64 {
    let kf = k as f64;
    -(6.0 * kf + 1.0) / (6.0 * kf - 1.0) * series_u(k)
}

// Sums c_k (sign^k) / zeta^k over k in `ks` until the terms stop shrinking.
fn truncated(
    zeta: f64,
    coeff: impl Fn(usize) -> f64,
    ks: impl Iterator<Item = usize>,
    alt: bool,
) -> f64 {
    let mut acc = 0.0;
    let mut last = f64::INFINITY;
    for (i, k) in ks.enumerate() {
        let sign = if alt && i % 2 == 1 { -1.0 } else { 1.0 };
        let term = sign * coeff(k) / zeta.powi(k as i32);
        if term.abs() >= last {
            break;
        }
        acc += term;
        last = term.abs();
        if term.abs() < 1e-17 * acc.abs() {
            break;
        }
    }
    acc
}

fn asymptotic_positive(x: f64) -> (f64, f64) {
    let zeta = 2.0 / 3.0 * x.powf(1.5);
    let e = (-zeta).exp();
    let q = x.powf(0.25);
    let su = truncated(zeta, series_u, 0..60, true);
    let sv = truncated(
        zeta,
        |k| if k == 0 { 1.0 } else { series_v(k) },
        0..60,
        true,
    );
    let norm = 2.0 * PI.sqrt();
    (e / (norm * q) * su, -q * e / norm * sv)
}

fn asymptotic_negative(x: f64) -> Result<(f64, f64)> {
    let zeta = 2.0 / 3.0 * x.powf(1.5);
    if !zeta.is_finite() {
        return Err(Error::Range(format!(
            "Airy argument -{x} beyond double range"
        )));
    }
    let q = x.powf(0.25);
    let vk = |k: usize| if k == 0 { 1.0 } else { series_v(k) };
    let ue = truncated(zeta, series_u, (0..60).map(|j| 2 * j), true);
    let uo = truncated(zeta, series_u, (0..60).map(|j| 2 * j + 1), true);
    let ve = truncated(zeta, vk, (0..60).map(|j| 2 * j), true);
    let vo = truncated(zeta, vk, (0..60).map(|j| 2 * j + 1), true);
    let arg = zeta - PI / 4.0;
    let (s, c) = arg.sin_cos();
    let sp = PI.sqrt();
    let ai = (c * ue + s * uo) / (sp * q);
    let aip = q / sp * (s * ve - c * vo);
    Ok((ai, aip))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mpfr_ai(x: f64) -> (f64, f64) {
        let prec = 400;
        let xf = Float::with_val(prec, x);
        let ai = Float::with_val(prec, xf.ai_ref());
        let h = Float::with_val(prec, Float::i_exp(1, -100));
        let up = Float::with_val(prec, &xf + &h).ai();
        let dn = Float::with_val(prec, &xf - &h).ai();
        let d = Float::with_val(prec, up - dn) / Float::with_val(prec, 2 * h);
        (ai.to_f64(), d.to_f64())
    }

    #[test]
    fn values_at_zero() {
        let (a, ap) = airy_ai_and_prime(0.0).unwrap();
        assert!((a - 0.3550280538878172).abs() < 1e-15);
        assert!((ap + 0.2588194037928068).abs() < 1e-15);
    }

    #[test]
    fn asymptotic_self_check_at_ten() {
        let (a, _) = airy_ai_and_prime(10.0).unwrap();
        let lead = 0.5 / PI.sqrt() * 10f64.powf(-0.25) * (-(2.0 / 3.0) * 10f64.powf(1.5)).exp();
        assert!((a / lead - 1.0).abs() < 1e-2);
        assert!((a / lead - 1.0).abs() > 1e-4);
    }

    #[test]
    fn first_zero() {
        let z = crate::numerics::find_root(|x| airy_ai_and_prime(x).unwrap().0, -2.5, -2.2, 1e-14)
            .unwrap();
        assert!((z + 2.338107410459767).abs() < 1e-12);
        assert!(airy_ai_and_prime(z).unwrap().0.abs() < 1e-10);
    }

    #[test]
    fn matches_mpfr_on_grid() {
        let mut x = -30.0;
        while x <= 30.0 {
            let (a, ap) = airy_ai_and_prime(x).unwrap();
            let (ea, eap) = mpfr_ai(x);
            // absolute floor keeps the check meaningful next to oscillatory zeros
            let env = if x < 0.0 { (-x).powf(-0.25) } else { ea.abs() };
            let envp = if x < 0.0 { (-x).powf(0.25) } else { eap.abs() };
            assert!(
                (a - ea).abs() <= 1e-12 * env,
                "Ai({x}) = {a}, expected {ea}"
            );
            assert!(
                (ap - eap).abs() <= 1e-12 * envp,
                "Ai'({x}) = {ap}, expected {eap}"
            );
            x += 0.37;
        }
    }

    #[test]
    fn relative_error_near_split() {
        for x in [8.9, 9.0, 9.1, 12.0, 20.0, 30.0] {
            let (a, ap) = airy_ai_and_prime(x).unwrap();
            let (ea, eap) = mpfr_ai(x);
            assert!((a / ea - 1.0).abs() < 1e-12, "{x}");
            assert!((ap / eap - 1.0).abs() < 1e-12, "{x}");
        }
    }

    #[test]
    fn satisfies_airy_equation() {
        let h = 1e-3;
        let mut x = -5.0;
        while x <= 5.0 {
            let f = |t: f64| airy_ai_and_prime(t).unwrap().0;
            let second = (f(x + h) - 2.0 * f(x) + f(x - h)) / (h * h);
            assert!((second - x * f(x)).abs() < 1e-6, "x={x}");
            x += 0.1;
        }
    }

    #[test]
    fn range_errors() {
        assert!(airy_ai_and_prime(f64::NAN).is_err());
        assert!(airy_ai_and_prime(-1e300).is_err());
        assert_eq!(airy_ai_and_prime(200.0).unwrap().0, 0.0);
    }
}
