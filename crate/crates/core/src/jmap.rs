//! The map J(s) = c1·s + c0 − log((s − ½)/(s + ½)), the curve γ = γ1 ∪ γ2
//! bounding the region D, and the inverse branches I₁, I₂, I±.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::numerics::find_root;

const HALF: f64 = 0.5;
const RESIDUAL_TOL: f64 = 1e-10;

/// Which boundary value to take on a cut.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Side {
    /// Limit from the upper half-plane (or the γ1 image for `boundary_inverse`).
    Plus,
    /// Limit from the lower half-plane (or the γ2 image).
    Minus,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MapParams {
    pub c1: f64,
    pub c0: f64,
    pub s_a: f64,
    pub s_b: f64,
    pub a: f64,
    pub b: f64,
}

/// A point u + i·v on γ1.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurvePoint {
    pub u: f64,
    pub v: f64,
    pub s: Complex64,
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

impl MapParams {
    pub fn new(c1: f64, c0: f64) -> Result<Self> {
        if !(c1 > 0.0) || !c1.is_finite() || !c0.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "map needs finite c1 > 0 and finite c0, got c1={c1}, c0={c0}"
            )));
        }
        let s_b = (0.25 + 1.0 / c1).sqrt();
        let lg = ((s_b - HALF) / (s_b + HALF)).ln();
        let b = c1 * s_b + c0 - lg;
        let a = -c1 * s_b + c0 + lg;
        Ok(MapParams {
            c1,
            c0,
            s_a: -s_b,
            s_b,
            a,
            b,
        })
    }

    /// (b − a)/2, which depends on c1 only.
    pub fn half_width(&self) -> f64 {
        0.5 * (self.b - self.a)
    }

    pub fn with_c0(&self, c0: f64) -> Self {
        let shift = c0 - self.c0;
        MapParams {
            c0,
            a: self.a + shift,
            b: self.b + shift,
            ..*self
        }
    }

    pub(crate) fn j_raw(&self, s: Complex64) -> Complex64 {
        self.c1 * s + self.c0 - ((s - HALF) / (s + HALF)).ln()
    }

    pub fn eval_j(&self, s: Complex64) -> Result<Complex64> {
        if !s.re.is_finite() || !s.im.is_finite() {
            return Err(Error::Domain(format!("J evaluated at non-finite {s}")));
        }
        if s.im == 0.0 && s.re.abs() <= HALF {
            return Err(Error::Domain(format!("J evaluated on its cut at {}", s.re)));
        }
        Ok(self.j_raw(s))
    }

    /// One-sided value of J at a point u of the cut (−½, ½).
    pub fn eval_j_side(&self, u: f64, side: Side) -> Result<Complex64> {
        if !(u.abs() < HALF) {
            return Err(Error::Domain(format!("{u} is not inside the cut")));
        }
        let re = self.c1 * u + self.c0 - ((HALF - u) / (u + HALF)).ln();
        Ok(match side {
            Side::Plus => c(re, -PI),
            Side::Minus => c(re, PI),
        })
    }

    pub fn j_prime(&self, s: Complex64) -> Complex64 {
        self.c1 - 1.0 / (s * s - 0.25)
    }

    /// Height v(u) of γ1 above the real point u.
    pub fn gamma_height(&self, u: f64) -> Result<f64> {
        if !(u >= self.s_a && u <= self.s_b) {
            return Err(Error::Domain(format!(
                "u={u} outside [{}, {}]",
                self.s_a, self.s_b
            )));
        }
        let gap = self.s_b * self.s_b - u * u;
        if gap <= 0.0 {
            return Ok(0.0);
        }
        let c1 = self.c1;
        let h = |v: f64| {
            if v == 0.0 {
                gap
            } else {
                0.25 + v / (c1 * v).tan() - v * v - u * u
            }
        };
        let top = PI / c1 * (1.0 - 1e-15);
        find_root(h, 0.0, top, 1e-16)
    }

    pub fn curve_point(&self, u: f64) -> Result<CurvePoint> {
        let v = self.gamma_height(u)?;
        Ok(CurvePoint { u, v, s: c(u, v) })
    }

    /// True iff s lies strictly inside D (γ itself is excluded).
    pub fn in_domain_d(&self, s: Complex64) -> bool {
        if !(s.re > self.s_a && s.re < self.s_b) {
            return false;
        }
        match self.gamma_height(s.re) {
            Ok(v) => s.im.abs() < v,
            Err(_) => false,
        }
    }

    /// I₊(x) ∈ γ1 (side `Plus`) or I₋(x) = conj I₊(x) ∈ γ2 (side `Minus`).
    pub fn boundary_inverse(&self, x: f64, side: Side) -> Result<Complex64> {
        if !(x > self.a && x < self.b) {
            return Err(Error::Domain(format!(
                "x={x} outside ({}, {})",
                self.a, self.b
            )));
        }
        let re_j = |u: f64| match self.gamma_height(u) {
            Ok(v) if v > 0.0 => self.j_raw(c(u, v)).re - x,
            Ok(_) => {
                if u > 0.0 {
                    self.b - x
                } else {
                    self.a - x
                }
            }
            Err(_) => f64::NAN,
        };
        let u = find_root(re_j, self.s_a, self.s_b, 1e-15)?;
        let mut s = c(u, self.gamma_height(u)?);
        // Newton polish; keep only steps that reduce the residual
        let target = c(x, 0.0);
        let mut res = (self.j_raw(s) - target).norm();
        for _ in 0..3 {
            let step = (self.j_raw(s) - target) / self.j_prime(s);
            let trial = s - step;
            if !(trial.im > 0.0) {
                break;
            }
            let r = (self.j_raw(trial) - target).norm();
            if r.is_finite() && r < res {
                s = trial;
                res = r;
            } else {
                break;
            }
        }
        Ok(match side {
            Side::Plus => s,
            Side::Minus => s.conj(),
        })
    }

    /// The exterior inverse I₁: the s outside the closure of D with J(s) = z.
    pub fn invert_i1(&self, z: Complex64) -> Result<Complex64> {
        if !z.re.is_finite() || !z.im.is_finite() {
            return Err(Error::Domain(format!("I1 at non-finite {z}")));
        }
        if z.im < 0.0 {
            return self.invert_i1(z.conj()).map(|s| s.conj());
        }
        if z.im == 0.0 {
            if z.re > self.b {
                return self.real_root(z.re, self.s_b, true).map(|u| c(u, 0.0));
            }
            if z.re < self.a {
                return self.real_root(z.re, self.s_a, false).map(|u| c(u, 0.0));
            }
            return Err(Error::Domain(format!("I1 at {} on the support", z.re)));
        }
        let height = 4.0 * (1.0 + z.norm()).max(self.c1 * self.s_b);
        let start = c(z.re, z.im.max(height));
        let s0 = self.newton((start - self.c0) / self.c1, start, |s| {
            s.im > 0.0 && !self.in_domain_d(s)
        })?;
        let s = self.continue_path(&[start, z], s0, |s| s.im > 0.0 && !self.in_domain_d(s))?;
        self.check_residual(s, z)?;
        Ok(s)
    }

    /// The interior inverse I₂: the s in D∖[−½, ½] with J(s) = z, for |Im z| < π.
    pub fn invert_i2(&self, z: Complex64) -> Result<Complex64> {
        if !z.re.is_finite() || !(z.im.abs() < PI) {
            return Err(Error::Domain(format!("I2 needs |Im z| < pi, got {z}")));
        }
        if z.im < 0.0 {
            return self.invert_i2(z.conj()).map(|s| s.conj());
        }
        if z.im == 0.0 {
            if z.re > self.b {
                return self.interior_real_root(z.re, true).map(|u| c(u, 0.0));
            }
            if z.re < self.a {
                return self.interior_real_root(z.re, false).map(|u| c(u, 0.0));
            }
            return Err(Error::Domain(format!("I2 at {} on the support", z.re)));
        }
        let x0 = self.b + 1.0;
        let s0 = c(self.interior_real_root(x0, true)?, 0.0);
        let hp = z.im.max(PI / 2.0);
        let path = [c(x0, 0.0), c(x0, hp), c(z.re, hp), z];
        let inside = |s: Complex64| s.im < 0.0 && self.in_domain_d(s);
        // the first leg starts on the real axis, where Im s = 0
        let first = self.continue_path(&path[..2], s0, |s| s.im <= 0.0 && self.in_domain_d(s))?;
        let s = self.continue_path(&path[1..], first, inside)?;
        self.check_residual(s, z)?;
        Ok(s)
    }

    fn check_residual(&self, s: Complex64, z: Complex64) -> Result<()> {
        let r = (self.j_raw(s) - z).norm();
        if r <= RESIDUAL_TOL * (1.0 + z.norm()) {
            Ok(())
        } else {
            Err(Error::Convergence(format!(
                "inverse of J at {z} left residual {r:e}"
            )))
        }
    }

    // Solves J(u) = x for real u beyond the critical point `from`, moving right
    // (`rightward`) or left. J is monotone there.
    fn real_root(&self, x: f64, from: f64, rightward: bool) -> Result<f64> {
        let f = |u: f64| self.j_raw(c(u, 0.0)).re - x;
        let mut width = ((x - self.c0).abs() / self.c1).max(1.0);
        for _ in 0..60 {
            let far = if rightward {
                from + width
            } else {
                from - width
            };
            if (f(far) > 0.0) == rightward {
                let (lo, hi) = if rightward { (from, far) } else { (far, from) };
                let f_end = |u: f64| {
                    if u == from {
                        if rightward {
                            self.b - x
                        } else {
                            self.a - x
                        }
                    } else {
                        f(u)
                    }
                };
                return find_root(f_end, lo, hi, 1e-15 * (1.0 + width));
            }
            width *= 2.0;
        }
        Err(Error::Convergence(format!("no real preimage of {x}")))
    }

    // Solves J(u) = x for u in (½, s_b) (right) or (s_a, −½) (left).
    fn interior_real_root(&self, x: f64, right: bool) -> Result<f64> {
        let edge = if right { self.b } else { self.a };
        let crit = if right { self.s_b } else { self.s_a };
        // near ±½ the root is ½ + e^{c1/2+c0-x} (resp. −½ − e^{c1/2-c0+x})
        let gap = if right {
            (self.c1 / 2.0 + self.c0 - x).exp()
        } else {
            (self.c1 / 2.0 - self.c0 + x).exp()
        };
        if gap < 1e-300 || HALF + gap == HALF {
            return Ok(if right { HALF + gap } else { -HALF - gap });
        }
        let f = |u: f64| {
            if u == crit {
                edge - x
            } else {
                self.j_raw(c(u, 0.0)).re - x
            }
        };
        let mut near = (0.25 * gap).min(0.5 * (self.s_b - HALF));
        let probe = |d: f64| if right { HALF + d } else { -HALF - d };
        for _ in 0..200 {
            let v = f(probe(near));
            if v.is_finite() && (v > 0.0) == right {
                break;
            }
            near *= 0.5;
        }
        let (lo, hi) = if right {
            (probe(near), crit)
        } else {
            (crit, probe(near))
        };
        find_root(f, lo, hi, 1e-16)
    }

    fn newton(
        &self,
        mut s: Complex64,
        z: Complex64,
        accept: impl Fn(Complex64) -> bool,
    ) -> Result<Complex64> {
        if !accept(s) {
            return Err(Error::Convergence(format!(
                "start {s} outside the branch region"
            )));
        }
        for _ in 0..100 {
            let r = self.j_raw(s) - z;
            let mut step = r / self.j_prime(s);
            let mut halvings = 0;
            loop {
                let trial = s - step;
                let ok = accept(trial)
                    && (self.j_raw(trial) - z).norm().is_finite()
                    && (self.j_raw(trial) - z).norm() < r.norm() * (1.0 + 1e-12) + 1e-300;
                if ok {
                    s = trial;
                    break;
                }
                halvings += 1;
                if halvings > 40 {
                    return Err(Error::Convergence(format!(
                        "Newton step for J = {z} stalled at {s}"
                    )));
                }
                step *= 0.5;
            }
            if step.norm() <= 1e-15 * (1.0 + s.norm()) {
                return Ok(s);
            }
            if (self.j_raw(s) - z).norm() <= 1e-14 * (1.0 + z.norm()) {
                // one more step to settle the last bits
                let extra = s - (self.j_raw(s) - z) / self.j_prime(s);
                if accept(extra) && (self.j_raw(extra) - z).norm() <= (self.j_raw(s) - z).norm() {
                    s = extra;
                }
                return Ok(s);
            }
        }
        Err(Error::Convergence(format!(
            "Newton for J = {z} did not converge"
        )))
    }

    fn continue_path(
        &self,
        path: &[Complex64],
        mut s: Complex64,
        accept: impl Fn(Complex64) -> bool + Copy,
    ) -> Result<Complex64> {
        for leg in path.windows(2) {
            let (p0, p1) = (leg[0], leg[1]);
            if p0 == p1 {
                continue;
            }
            let mut t: f64 = 0.0;
            let mut dt: f64 = 1.0 / 16.0;
            while t < 1.0 {
                let next = (t + dt).min(1.0);
                let z = p0 + (p1 - p0) * next;
                // linear predictor from J'(s) ds = dz
                let guess = s + (p1 - p0) * (next - t) / self.j_prime(s);
                let guess = if accept(guess) { guess } else { s };
                match self.newton(guess, z, accept) {
                    Ok(ns) if (ns - s).norm() <= 0.5 * (1.0 + s.norm()) => {
                        s = ns;
                        t = next;
                        dt = (dt * 2.0).min(0.25);
                    }
                    _ => {
                        dt *= 0.5;
                        if dt < 1e-10 {
                            return Err(Error::Convergence(format!(
                                "continuation of J inverse stalled near {z}"
                            )));
                        }
                    }
                }
            }
        }
        Ok(s)
    }
}

/// Trigonometric interpolant of γ1 for a fixed c1.
///
/// With x = c0 − h·cos φ (h the half-width), the point σ(φ) = I₊(x) traces γ1
/// for φ ∈ (0, π) and γ2 for φ ∈ (π, 2π), analytically and periodically. So
/// Re σ is a cosine series and Im σ a sine series in φ. Values returned by
/// [`GammaTable::sigma`] are Newton-polished against J.
#[derive(Debug, Clone)]
pub struct GammaTable {
    base: MapParams,
    cos_coeffs: Vec<f64>,
    sin_coeffs: Vec<f64>,
}

impl GammaTable {
    pub fn new(c1: f64) -> Result<Self> {
        let base = MapParams::new(c1, 0.0)?;
        let h = base.half_width();
        let mut n = 64;
        loop {
            let phis: Vec<f64> = (0..n).map(|j| (j as f64 + 0.5) * PI / n as f64).collect();
            let mut samples = Vec::with_capacity(n);
            for &phi in &phis {
                samples.push(base.boundary_inverse(-h * phi.cos(), Side::Plus)?);
            }
            let mut cos_coeffs = vec![0.0; n];
            let mut sin_coeffs = vec![0.0; n + 1];
            for k in 0..n {
                let mut a = 0.0;
                let mut b = 0.0;
                for (phi, s) in phis.iter().zip(&samples) {
                    a += s.re * (k as f64 * phi).cos();
                    b += s.im * ((k + 1) as f64 * phi).sin();
                }
                cos_coeffs[k] = 2.0 * a / n as f64;
                sin_coeffs[k + 1] = 2.0 * b / n as f64;
            }
            cos_coeffs[0] *= 0.5;
            sin_coeffs[n] *= 0.5;
            let tail = cos_coeffs[n - 4..]
                .iter()
                .chain(&sin_coeffs[n - 3..])
                .fold(0.0f64, |m, c| m.max(c.abs()));
            if tail < 1e-14 * base.s_b || n >= 4096 {
                return Ok(GammaTable {
                    base,
                    cos_coeffs,
                    sin_coeffs,
                });
            }
            n *= 2;
        }
    }

    pub fn c1(&self) -> f64 {
        self.base.c1
    }

    pub fn half_width(&self) -> f64 {
        self.base.half_width()
    }

    pub fn terms(&self) -> usize {
        self.cos_coeffs.len()
    }

    fn series(&self, phi: f64) -> (Complex64, Complex64) {
        let mut s = c(0.0, 0.0);
        let mut d = c(0.0, 0.0);
        for (k, a) in self.cos_coeffs.iter().enumerate() {
            let (sn, cs) = (k as f64 * phi).sin_cos();
            s.re += a * cs;
            d.re -= k as f64 * a * sn;
        }
        for (k, b) in self.sin_coeffs.iter().enumerate().skip(1) {
            let (sn, cs) = (k as f64 * phi).sin_cos();
            s.im += b * sn;
            d.im += k as f64 * b * cs;
        }
        (s, d)
    }

    /// σ(φ) on γ1 and dσ/dφ, for φ ∈ [0, π].
    pub fn sigma(&self, phi: f64) -> (Complex64, Complex64) {
        let (mut s, ds_series) = self.series(phi);
        let h = self.half_width();
        let target = c(-h * phi.cos(), 0.0);
        let mut res = (self.base.j_raw(s) - target).norm();
        for _ in 0..2 {
            let trial = s - (self.base.j_raw(s) - target) / self.base.j_prime(s);
            let r = (self.base.j_raw(trial) - target).norm();
            if trial.im >= 0.0 && r.is_finite() && r < res {
                s = trial;
                res = r;
            } else {
                break;
            }
        }
        let ds = if phi.min(PI - phi) > 1e-3 {
            h * phi.sin() / self.base.j_prime(s)
        } else {
            ds_series
        };
        (s, ds)
    }

    /// Angle φ with c0 − h·cos φ = x, computed without cancellation near the ends.
    pub fn angle(&self, map: &MapParams, x: f64) -> f64 {
        let w = map.b - map.a;
        let t = (x - map.a) / w;
        if t < 0.5 {
            2.0 * t.max(0.0).sqrt().asin()
        } else {
            PI - 2.0 * ((map.b - x) / w).max(0.0).sqrt().asin()
        }
    }

    /// I₊(x) for the map with the same c1 and any c0.
    pub fn inverse_plus(&self, map: &MapParams, x: f64) -> Complex64 {
        self.sigma(self.angle(map, x)).0
    }
}

/// Free-function form of [`MapParams::new`].
pub fn new_map(c1: f64, c0: f64) -> Result<MapParams> {
    MapParams::new(c1, c0)
}
