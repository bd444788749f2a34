use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;

use super::field::FieldSpec;
use crate::error::{Error, Result};
use crate::jmap::{GammaTable, MapParams};
use crate::numerics::{integrate_graded, integrate_panels};

const DENSITY_TOL: f64 = 1e-13;

/// ψ sampled at Chebyshev angles, stored as ψ(x) = √((x−a)(b−x))·H(x) with
/// H a Chebyshev series in ξ = (c0 − x)/h.
#[derive(Debug, Clone)]
pub(crate) struct DensityGrid {
    pub x: Vec<f64>,
    pub psi: Vec<f64>,
    pub coeffs: Vec<f64>,
}

/// Angle θ ∈ [0, π] with x = c0 − h·cos θ.
pub(crate) fn angle(map: &MapParams, x: f64) -> f64 {
    let w = map.b - map.a;
    let t = (x - map.a) / w;
    if t < 0.5 {
        2.0 * t.clamp(0.0, 1.0).sqrt().asin()
    } else {
        PI - 2.0 * ((map.b - x) / w).clamp(0.0, 1.0).sqrt().asin()
    }
}

/// Σ c_k T_k(ξ)
pub(crate) fn clenshaw(coeffs: &[f64], xi: f64) -> f64 {
    let mut b1 = 0.0;
    let mut b2 = 0.0;
    for c in coeffs.iter().skip(1).rev() {
        let b0 = 2.0 * xi * b1 - b2 + c;
        b2 = b1;
        b1 = b0;
    }
    xi * b1 - b2 + coeffs[0]
}

/// ψ(x) from the closed-form integral over the support with the log kernel
/// log|(I₊(u) − I₋(x))/(I₊(u) − I₊(x))|, split at u = x.
pub(crate) fn psi_formula(
    field: &FieldSpec,
    map: &MapParams,
    table: &GammaTable,
    x: f64,
) -> Result<f64> {
    if !(x > map.a && x < map.b) {
        return Err(Error::Domain(format!(
            "density at {x} outside ({}, {})",
            map.a, map.b
        )));
    }
    let h = map.half_width();
    let tx = angle(map, x);
    let sx = table.sigma(tx).0;
    let f = |th: f64| -> Result<f64> {
        let (s, _) = table.sigma(th);
        let u = map.c0 - h * th.cos();
        if s == sx {
            // node indistinguishable from the singular point
            return Ok(0.0);
        }
        let k = ((s - sx.conj()) / (s - sx)).norm().ln();
        Ok(field.v2(u) * k * h * th.sin())
    };
    let right = integrate_graded(f, tx, PI, DENSITY_TOL)?;
    let left = integrate_graded(f, tx, 0.0, DENSITY_TOL)?;
    Ok((right - left) / (2.0 * PI * PI))
}

/// Radius of a circle enclosing γ with room to spare.
pub(crate) fn enclosing_radius(table: &GammaTable) -> f64 {
    let mut r: f64 = 0.5;
    for i in 0..=64 {
        r = r.max(table.sigma(PI * i as f64 / 64.0).0.norm());
    }
    2.0 * r
}

/// (1/2πi)∮_{|ξ|=R} V'(J(ξ))/(ξ − s) dξ by the trapezoid rule, which converges
/// geometrically because the integrand is analytic off [−½, ½].
pub(crate) fn circle_cauchy(
    field: &FieldSpec,
    map: &MapParams,
    radius: f64,
    s: Complex64,
) -> Result<Complex64> {
    if s.norm() >= 0.75 * radius {
        return Err(Error::Domain(format!(
            "{s} too close to the auxiliary circle"
        )));
    }
    let sum = |m: usize| -> Complex64 {
        (0..m)
            .map(|j| {
                let xi = Complex64::from_polar(radius, 2.0 * PI * (j as f64 + 0.5) / m as f64);
                field.v1_complex(map.j_raw(xi)) * xi / (xi - s)
            })
            .sum::<Complex64>()
            / m as f64
    };
    let mut m = 64;
    let mut prev = sum(m);
    while m < 1 << 16 {
        m *= 2;
        let cur = sum(m);
        if (cur - prev).norm() <= 1e-14 * cur.norm().max(1.0) {
            return Ok(cur);
        }
        prev = cur;
    }
    Err(Error::Convergence(
        "circle quadrature for M did not converge".into(),
    ))
}

/// ψ(x) = (1/π)·Im of the Cauchy integral of V'(J(ξ)) at I₊(x); this is the
/// boundary value of M from outside D, moved onto an enclosing circle.
pub(crate) fn psi_from_m(
    field: &FieldSpec,
    map: &MapParams,
    table: &GammaTable,
    radius: f64,
    x: f64,
) -> Result<f64> {
    if !(x > map.a && x < map.b) {
        return Err(Error::Domain(format!(
            "density at {x} outside ({}, {})",
            map.a, map.b
        )));
    }
    let s = table.inverse_plus(map, x);
    Ok(circle_cauchy(field, map, radius, s)?.im / PI)
}

impl DensityGrid {
    pub fn build(field: &FieldSpec, map: &MapParams, table: &GammaTable) -> Result<Self> {
        let h = map.half_width();
        let mut n = 96;
        loop {
            let thetas: Vec<f64> = (0..n).map(|j| (j as f64 + 0.5) * PI / n as f64).collect();
            let xs: Vec<f64> = thetas.iter().map(|t| map.c0 - h * t.cos()).collect();
            let psi: Vec<f64> = xs
                .par_iter()
                .map(|&x| psi_formula(field, map, table, x))
                .collect::<Result<Vec<f64>>>()?;
            let hv: Vec<f64> = thetas
                .iter()
                .zip(&psi)
                .map(|(t, p)| p / (h * t.sin()))
                .collect();
            // DCT-II; ξ = cos θ runs from 1 at x = a to −1 at x = b
            let mut coeffs = vec![0.0; n];
            for (k, c) in coeffs.iter_mut().enumerate() {
                let acc: f64 = thetas
                    .iter()
                    .zip(&hv)
                    .map(|(t, v)| v * (k as f64 * t).cos())
                    .sum();
                *c = 2.0 * acc / n as f64;
            }
            coeffs[0] *= 0.5;
            let scale = coeffs.iter().fold(0.0f64, |m, c| m.max(c.abs()));
            let tail = coeffs[n - 6..].iter().fold(0.0f64, |m, c| m.max(c.abs()));
            if tail <= 1e-13 * scale || n >= 768 {
                // drop the noise floor so evaluation stays cheap
                let keep = coeffs
                    .iter()
                    .rposition(|c| c.abs() > 1e-16 * scale)
                    .map_or(1, |p| p + 1);
                coeffs.truncate(keep.max(1));
                return Ok(DensityGrid { x: xs, psi, coeffs });
            }
            n *= 2;
        }
    }

    /// H(x) such that ψ(x) = √((x−a)(b−x))·H(x).
    pub fn reduced(&self, map: &MapParams, x: f64) -> f64 {
        clenshaw(&self.coeffs, (map.c0 - x) / map.half_width())
    }

    pub fn psi(&self, map: &MapParams, x: f64) -> f64 {
        if !(x > map.a && x < map.b) {
            return 0.0;
        }
        ((x - map.a) * (map.b - x)).sqrt() * self.reduced(map, x)
    }

    fn mass_between(&self, map: &MapParams, lo: f64, hi: f64) -> f64 {
        let h = map.half_width();
        let w = |th: f64| -> Result<f64> {
            let st = th.sin();
            Ok(h * h * st * st * clenshaw(&self.coeffs, th.cos()))
        };
        integrate_panels(w, lo, hi, 1e-15).unwrap_or(f64::NAN)
    }

    /// ∫ₓᵇ ψ, integrated over the shorter side to avoid cancellation.
    pub fn mass_right(&self, map: &MapParams, x: f64) -> f64 {
        if x >= map.b {
            return 0.0;
        }
        if x <= map.a {
            return self.total_mass(map);
        }
        let tx = angle(map, x);
        if tx > 0.5 * PI {
            self.mass_between(map, tx, PI)
        } else {
            self.total_mass(map) - self.mass_between(map, 0.0, tx)
        }
    }

    /// ∫ₐˣ ψ
    pub fn mass_left(&self, map: &MapParams, x: f64) -> f64 {
        if x <= map.a {
            return 0.0;
        }
        if x >= map.b {
            return self.total_mass(map);
        }
        let tx = angle(map, x);
        if tx < 0.5 * PI {
            self.mass_between(map, 0.0, tx)
        } else {
            self.total_mass(map) - self.mass_between(map, tx, PI)
        }
    }

    /// ∫ψ over the support; exact for the Chebyshev series.
    pub fn total_mass(&self, map: &MapParams) -> f64 {
        let h = map.half_width();
        let c = |k: usize| self.coeffs.get(k).copied().unwrap_or(0.0);
        h * h * 0.5 * PI * (c(0) - 0.5 * c(2))
    }

    /// ∫ f(t, t − x)ψ(t)dt over the support by θ-quadrature, where the
    /// difference t − x is formed from angles so it stays accurate near the
    /// endpoints. The split point θ(clamp(x)) carries the singularity of f.
    pub fn integrate_against<T, F>(&self, map: &MapParams, x: f64, f: F) -> Result<T>
    where
        T: crate::numerics::Integrand,
        F: Fn(f64, f64) -> T,
    {
        let h = map.half_width();
        let xc = x.clamp(map.a, map.b);
        let tx = angle(map, xc);
        let off = xc - x;
        let w = |th: f64| -> Result<T> {
            let t = map.c0 - h * th.cos();
            let d = 2.0 * h * (0.5 * (th + tx)).sin() * (0.5 * (th - tx)).sin() + off;
            let st = th.sin();
            let weight = h * h * st * st * clenshaw(&self.coeffs, th.cos());
            Ok(f(t, d) * weight)
        };
        let right = integrate_graded(w, tx, PI, DENSITY_TOL)?;
        let left = integrate_graded(w, tx, 0.0, DENSITY_TOL)?;
        Ok(right - left)
    }
}
