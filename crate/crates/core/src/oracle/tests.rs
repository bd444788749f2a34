use std::f64::consts::PI;
use std::sync::OnceLock;

use rug::Float;

use super::*;
use crate::equilibrium::FieldSpec;
use crate::numerics::PrecisionContext;

fn gauss() -> FieldSpec {
    FieldSpec::quadratic(1.0).unwrap()
}

fn table(n: u32, size: usize) -> MomentTable {
    compute_moments(&gauss(), n, size, size, PrecisionContext::oracle()).unwrap()
}

fn table20() -> &'static MomentTable {
    static T: OnceLock<MomentTable> = OnceLock::new();
    T.get_or_init(|| table(20, 21))
}

fn rel(a: &Float, b: &Float) -> f64 {
    (Float::with_val(a.prec(), a - b) / b).abs().to_f64()
}

/// ∫ λʲ e^{kλ − nλ²/2} dλ = √(2π/n)·e^{k²/2n}·E[Xʲ] with X ~ N(k/n, 1/n)
fn gaussian_moment(n: u32, j: usize, k: usize, prec: u32) -> Float {
    let nf = Float::with_val(prec, n);
    let mu = Float::with_val(prec, k as u32) / &nf;
    let var = Float::with_val(prec, 1) / &nf;
    let mut e = vec![Float::with_val(prec, 1), mu.clone()];
    for i in 2..=j {
        let t = Float::with_val(prec, &mu * &e[i - 1])
            + Float::with_val(prec, &var * &e[i - 2]) * (i as u32 - 1);
        e.push(t);
    }
    let two_pi = Float::with_val(prec, rug::float::Constant::Pi) * 2u32;
    let pre = (two_pi / &nf).sqrt();
    let shift = (Float::with_val(prec, (k * k) as u32) / (2 * n)).exp();
    pre * shift * &e[j]
}

#[test]
fn gaussian_moments() {
    let m = table(1, 4);
    assert!((m.get_f64(0, 0) - (2.0 * PI).sqrt()).abs() < 1e-15);
    assert!((m.get_f64(0, 1) - (2.0 * PI).sqrt() * 0.5f64.exp()).abs() < 1e-14);
    assert!((m.get_f64(1, 1) - (2.0 * PI).sqrt() * 0.5f64.exp()).abs() < 1e-14);
    for n in [1u32, 7] {
        let m = table(n, 8);
        for j in 0..=8 {
            for k in 0..=8 {
                let want = gaussian_moment(n, j, k, 256);
                let got = m.get(j, k);
                if want.is_zero() {
                    assert!(got.to_f64().abs() < 1e-60);
                } else {
                    assert!(rel(got, &want) < 1e-60, "n={n} j={j} k={k}");
                }
            }
        }
    }
}

#[test]
fn quartic_moments_by_independent_quadrature() {
    use crate::numerics::integrate_panels;
    let f = FieldSpec::quartic(-1.0).unwrap();
    let m = compute_moments(&f, 3, 3, 3, PrecisionContext::oracle()).unwrap();
    for (j, k) in [(0, 0), (1, 2), (3, 3)] {
        let g = |x: f64| Ok(x.powi(j as i32) * (k as f64 * x - 3.0 * f.v(x)).exp());
        let want: f64 = integrate_panels(g, -6.0, 6.0, 1e-14).unwrap();
        assert!((m.get_f64(j, k) / want - 1.0).abs() < 1e-12, "j={j} k={k}");
    }
}

#[test]
fn small_degree_polynomials() {
    let m = table(1, 4);
    let p1 = exact_p(&m, 1).unwrap();
    assert!(p1.coeffs[0].to_f64().abs() < 1e-70);
    assert_eq!(p1.eval(0.3), 0.3);
    // 2×2 system ∫ p₂ e^{kx} = 0, k = 0, 1, by Cramer's rule in doubles
    let g = |j, k| m.get_f64(j, k);
    let det = g(0, 0) * g(1, 1) - g(1, 0) * g(0, 1);
    let c0 = (-g(2, 0) * g(1, 1) + g(2, 1) * g(1, 0)) / det;
    let c1 = (-g(0, 0) * g(2, 1) + g(0, 1) * g(2, 0)) / det;
    let p2 = exact_p(&m, 2).unwrap();
    assert!((p2.coeffs[0].to_f64() - c0).abs() < 1e-12);
    assert!((p2.coeffs[1].to_f64() - c1).abs() < 1e-12);
    let q0 = exact_q(&m, 0).unwrap();
    assert_eq!(q0.coeffs.len(), 1);
    assert_eq!(q0.eval(1.7), 1.0);
    let q1 = exact_q(&m, 1).unwrap();
    let d0 = -g(0, 1) / g(0, 0);
    assert!((q1.coeffs[0].to_f64() - d0).abs() < 1e-14);
    assert!((d0 + 0.5f64.exp()).abs() < 1e-14);
}

#[test]
fn norming_constants_by_hand() {
    let m = table(1, 4);
    let h0 = exact_h(&m, &exact_p(&m, 0).unwrap(), &exact_q(&m, 0).unwrap()).unwrap();
    assert_eq!(h0, *m.get(0, 0));
    let (p, q) = (exact_p(&m, 1).unwrap(), exact_q(&m, 1).unwrap());
    let (c0, d0) = (p.coeffs[0].to_f64(), q.coeffs[0].to_f64());
    let g = |j, k| m.get_f64(j, k);
    let want = g(1, 1) + d0 * g(1, 0) + c0 * g(0, 1) + c0 * d0 * g(0, 0);
    let got = exact_h(&m, &p, &q).unwrap().to_f64();
    assert!((got - want).abs() < 1e-14 * want.abs());
}

#[test]
fn determinant_route_matches_linear_system() {
    let m = table(5, 7);
    for j in 0..=6 {
        let a = exact_q(&m, j).unwrap();
        let b = exact_q_det(&m, j).unwrap();
        for (x, y) in a.coeffs.iter().zip(&b.coeffs) {
            let d = Float::with_val(256, x - y).abs();
            let s = Float::with_val(256, x.abs_ref()).max(&Float::with_val(256, 1));
            assert!((d / s).to_f64() < 1e-20, "j={j}");
        }
        assert!(b.residual < 1e-60);
    }
}

#[test]
fn biorthogonality() {
    let m = table20();
    let ps: Vec<_> = (0..=5).map(|j| exact_p(m, j).unwrap()).collect();
    let qs: Vec<_> = (0..=5).map(|j| exact_q(m, j).unwrap()).collect();
    for (j, p) in ps.iter().enumerate() {
        assert!(p.residual < 1e-60);
        for (k, q) in qs.iter().enumerate() {
            let v = pairing(m, p, q).unwrap();
            let h = exact_h(m, &ps[j.max(k)], &qs[j.max(k)]).unwrap();
            let r = (v.clone() / &h).abs().to_f64();
            if j == k {
                assert!((r - 1.0).abs() < 1e-60);
            } else {
                assert!(r < 1e-50, "j={j} k={k}: {r:e}");
            }
        }
    }
}

#[test]
fn residuals_within_precision_budget() {
    let m = table20();
    let digits = m.precision.digits() as i32;
    for j in [5usize, 10, 20] {
        let p = exact_p(m, j).unwrap();
        let q = exact_q(m, j).unwrap();
        let bound = 10f64.powi(-(digits - j as i32));
        assert!(p.residual <= bound && q.residual <= bound, "j={j}");
    }
}

#[test]
fn precision_doubling_is_stable() {
    let lo = table20();
    let hi = compute_moments(&gauss(), 20, 21, 21, PrecisionContext::new(512).unwrap()).unwrap();
    let a = exact_p(lo, 20).unwrap();
    let b = exact_p(&hi, 20).unwrap();
    for (x, y) in a.coeffs.iter().zip(&b.coeffs) {
        let d = Float::with_val(512, x - y).abs();
        let s = Float::with_val(512, y.abs_ref()).max(&Float::with_val(512, 1));
        assert!((d / s).to_f64() < 1e-40);
    }
}

#[test]
fn positive_norming_constants() {
    let m = table20();
    for j in 0..=20 {
        let h = exact_h(m, &exact_p(m, j).unwrap(), &exact_q(m, j).unwrap()).unwrap();
        assert!(h.is_sign_positive(), "h_{j} <= 0");
    }
}

#[test]
fn zeros_real_and_in_support() {
    let eq = crate::EquilibriumData::new(gauss()).unwrap();
    let (a, b) = (eq.map.a, eq.map.b);
    let m = table20();
    let p = exact_p(m, 20).unwrap();
    let z = real_zeros(&p, a - 0.2, b + 0.2).unwrap();
    assert_eq!(z.len(), 20);
    let wide = real_zeros(&p, a - 5.0, b + 5.0).unwrap();
    assert_eq!(wide.len(), 20);
    let q = exact_q(m, 20).unwrap();
    let zq = real_zeros(&q, a - 1.0, b + 1.0).unwrap();
    assert_eq!(zq.len(), 20);
    assert_eq!(
        real_zeros(&exact_p(&table(1, 2), 1).unwrap(), -1.0, 1.0)
            .unwrap()
            .len(),
        1
    );
}

#[test]
fn zeros_interlace() {
    let m = table(15, 16);
    let mut prev = real_zeros(&exact_p(&m, 1).unwrap(), -6.0, 6.0).unwrap();
    for j in 2..=15 {
        let cur = real_zeros(&exact_p(&m, j).unwrap(), -6.0, 6.0).unwrap();
        assert_eq!(cur.len(), j);
        for i in 0..prev.len() {
            assert!(cur[i] < prev[i] && prev[i] < cur[i + 1], "j={j}");
        }
        prev = cur;
    }
}

#[test]
fn kolmogorov_distance() {
    let eq = crate::EquilibriumData::new(gauss()).unwrap();
    let n = 25;
    let zs: Vec<f64> = (0..n)
        .map(|i| eq.quantile((i as f64 + 0.5) / n as f64).unwrap())
        .collect();
    let d = counting_measure_distance(&zs, &eq).unwrap();
    assert!(d <= 0.5 / n as f64 + 1e-10);
    let mid = 0.5 * (eq.map.a + eq.map.b);
    let f = eq.cdf(mid);
    let d = counting_measure_distance(&[mid], &eq).unwrap();
    assert!((d - f.max(1.0 - f)).abs() < 1e-15);
    assert!(counting_measure_distance(&[], &eq).is_err());
}

#[test]
fn saddle_integral_matches_exact() {
    let p = exact_p(table20(), 20).unwrap();
    let map = crate::MapParams::new(1.0, 0.5).unwrap();
    let mid = 0.5 * (map.a + map.b);
    for x in [5.0, mid, -3.0, 0.2] {
        let s = saddle_p_quadratic(x, 20, SaddleMode::FullSum).unwrap();
        let e = p.eval(x);
        assert!((s - e).abs() < 1e-9 * e.abs().max(1.0), "x={x}: {s} vs {e}");
    }
    let s1 = saddle_p_quadratic(5.0, 1, SaddleMode::FullSum).unwrap();
    assert!((s1 - 5.0).abs() < 1e-12);
    assert!(matches!(
        saddle_p_quadratic(map.b + 0.01, 20, SaddleMode::FullSum),
        Err(crate::Error::Coalescence(_))
    ));
}

#[test]
fn limit_phase_error_is_order_one_over_n() {
    let mut errs = Vec::new();
    for n in [10u32, 20, 40] {
        let full = saddle_p_quadratic(5.0, n, SaddleMode::FullSum).unwrap();
        let lim = saddle_p_quadratic(5.0, n, SaddleMode::LimitPhase).unwrap();
        errs.push((lim / full - 1.0).abs());
    }
    for w in errs.windows(2) {
        let r = w[1] / w[0];
        assert!((0.2..=1.0).contains(&r), "{errs:?}");
    }
}

#[test]
fn phase_derivative_is_j_map() {
    // d/ds F(s; x) = J_{1,1/2}(s) − x
    let map = crate::MapParams::new(1.0, 0.5).unwrap();
    let x = 0.7;
    let f = |s: num_complex::Complex64| {
        let (p, m) = (s + 0.5, s - 0.5);
        0.5 * (p - x) * (p - x) + p * p.ln() - m * m.ln() - 1.0
    };
    for s in [
        num_complex::Complex64::new(2.0, 0.3),
        num_complex::Complex64::new(-1.5, 1.0),
    ] {
        let h = 1e-6;
        let d = (f(s + h) - f(s - h)) / (2.0 * h);
        assert!((d - (map.eval_j(s).unwrap() - x)).norm() < 1e-8);
    }
}
