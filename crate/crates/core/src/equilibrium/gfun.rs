use std::f64::consts::PI;

use num_complex::Complex64;

use super::EquilibriumData;
use crate::error::{Error, Result};
use crate::jmap::Side;

/// Which logarithmic potential: g uses log(z − x), g̃ uses log(eᶻ − eˣ).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GKind {
    G,
    GTilde,
}

/// Which endpoint of the support.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Edge {
    A,
    B,
}

fn normalize_arg(mut w: Complex64) -> Complex64 {
    while w.im > PI {
        w.im -= 2.0 * PI;
    }
    while w.im <= -PI {
        w.im += 2.0 * PI;
    }
    w
}

fn expm1_c(w: Complex64) -> Complex64 {
    if w.norm() < 0.5 {
        // e^w − 1 = 2i·e^{w/2}·sin(w/(2i))
        let half = w * 0.5;
        half.exp() * (half.sinh() * 2.0)
    } else {
        w.exp() - 1.0
    }
}

/// Principal Log(eᶻ − eᵗ) given z and the difference z − t.
fn log_exp_diff(z: Complex64, t: f64, zt: Complex64) -> Complex64 {
    if zt.re > 0.0 {
        normalize_arg(z + (-expm1_c(-zt)).ln())
    } else {
        normalize_arg(t + expm1_c(zt).ln())
    }
}

/// log|eˣ − eᵗ| given x, t and d = t − x.
fn log_abs_exp_diff(x: f64, t: f64, d: f64) -> f64 {
    x.max(t) + (-(-d.abs()).exp_m1()).ln()
}

impl EquilibriumData {
    /// g(z) or g̃(z) off the cut.
    pub fn eval_g(&self, z: Complex64, which: GKind) -> Result<Complex64> {
        if !(z.re.is_finite() && z.im.is_finite()) {
            return Err(Error::Domain(format!("non-finite argument {z}")));
        }
        if which == GKind::GTilde && z.im.abs() >= PI {
            return Err(Error::Domain(format!("{z} outside the strip |Im z| < π")));
        }
        if z.im == 0.0 {
            if z.re > self.map.b {
                return self.eval_g_side(z.re, which, Side::Plus);
            }
            return Err(Error::Domain(format!(
                "{z} lies on the cut; use a one-sided evaluation"
            )));
        }
        let m = &self.map;
        match which {
            GKind::G => self
                .grid
                .integrate_against(m, z.re, |_, d| Complex64::new(-d, z.im).ln()),
            GKind::GTilde => self
                .grid
                .integrate_against(m, z.re, |t, d| log_exp_diff(z, t, Complex64::new(-d, z.im))),
        }
    }

    /// Boundary value of g or g̃ at real x from above (`Plus`) or below (`Minus`).
    pub fn eval_g_side(&self, x: f64, which: GKind, side: Side) -> Result<Complex64> {
        if !x.is_finite() {
            return Err(Error::Domain(format!("non-finite argument {x}")));
        }
        let m = &self.map;
        let re = match which {
            GKind::G => self.grid.integrate_against(m, x, |_, d| d.abs().ln())?,
            GKind::GTilde => self
                .grid
                .integrate_against(m, x, |t, d| log_abs_exp_diff(x, t, d))?,
        };
        let im = PI * self.mass_right(x);
        Ok(match side {
            Side::Plus => Complex64::new(re, im),
            Side::Minus => Complex64::new(re, -im),
        })
    }

    /// ℓ from the b-side and the a-side of the variational equality.
    pub(crate) fn ell_pair(&self) -> Result<(f64, f64)> {
        let at = |x: f64| -> Result<f64> {
            let g = self.eval_g_side(x, GKind::G, Side::Plus)?;
            let gt = self.eval_g_side(x, GKind::GTilde, Side::Minus)?;
            Ok(g.re + gt.re - self.field.v(x))
        };
        Ok((at(self.map.b)?, at(self.map.a)?))
    }

    /// ℓ, checked against the value obtained at the other endpoint.
    pub fn compute_ell(&self) -> Result<f64> {
        let (lb, la) = self.ell_pair()?;
        if (lb - la).abs() > 1e-6 {
            return Err(Error::Regularity(format!(
                "ell differs between endpoints: {lb} at b, {la} at a"
            )));
        }
        Ok(lb)
    }

    /// φ(z) = g(z) + g̃(z) − V(z) − ℓ.
    pub fn eval_phi(&self, z: Complex64) -> Result<Complex64> {
        let g = self.eval_g(z, GKind::G)?;
        let gt = self.eval_g(z, GKind::GTilde)?;
        Ok(g + gt - self.field.v_complex(z) - self.ell)
    }

    /// One-sided φ±(x) on the real line.
    pub fn eval_phi_side(&self, x: f64, side: Side) -> Result<Complex64> {
        let g = self.eval_g_side(x, GKind::G, side)?;
        let gt = self.eval_g_side(x, GKind::GTilde, side)?;
        Ok(g + gt - self.field.v(x) - self.ell)
    }

    /// Re φ(x) for real x, i.e. the variational residual inside and the
    /// inequality quantity outside.
    pub fn phi_real_part(&self, x: f64) -> Result<f64> {
        Ok(self.eval_phi_side(x, Side::Plus)?.re)
    }

    /// f′ at the edge: positive at b, negative at a.
    pub fn f_prime_edge(&self, edge: Edge) -> f64 {
        let m = &self.map;
        let w = (m.b - m.a).sqrt();
        match edge {
            Edge::B => (PI * w * self.grid.reduced(m, m.b)).powf(2.0 / 3.0),
            Edge::A => -(PI * w * self.grid.reduced(m, m.a)).powf(2.0 / 3.0),
        }
    }

    /// Conformal edge variable f_a or f_b.
    pub fn eval_f_edge(&self, z: Complex64, edge: Edge) -> Result<Complex64> {
        let m = &self.map;
        let e = match edge {
            Edge::A => m.a,
            Edge::B => m.b,
        };
        if (z - e).norm() > 0.25 * (m.b - m.a) {
            return Err(Error::Domain(format!(
                "{z} is farther than (b-a)/4 from the edge {e}"
            )));
        }
        if z.im < 0.0 {
            return Ok(self.eval_f_edge(z.conj(), edge)?.conj());
        }
        let c = 1.5 * PI;
        if z.im == 0.0 {
            let x = z.re;
            return Ok(match edge {
                Edge::B if x < m.b => {
                    Complex64::new(-(c * self.mass_right(x)).powf(2.0 / 3.0), 0.0)
                }
                Edge::B => Complex64::new(
                    (-0.75 * self.phi_real_part(x)?).max(0.0).powf(2.0 / 3.0),
                    0.0,
                ),
                Edge::A if x > m.a => {
                    Complex64::new(-(c * self.mass_left(x)).powf(2.0 / 3.0), -0.0)
                }
                Edge::A => Complex64::new(
                    (-0.75 * self.phi_real_part(x)?).max(0.0).powf(2.0 / 3.0),
                    0.0,
                ),
            });
        }
        let phi = self.eval_phi(z)?;
        let w = match edge {
            Edge::B => -0.75 * phi,
            Edge::A => -0.75 * phi + Complex64::new(0.0, c),
        };
        // f³ = w²; take the cube root nearest the linearization
        let lin = self.f_prime_edge(edge) * (z - e);
        let base = (w * w).powf(1.0 / 3.0);
        let best = (0..3)
            .map(|k| base * Complex64::from_polar(1.0, 2.0 * PI * k as f64 / 3.0))
            .min_by(|p, q| (p - lin).norm().total_cmp(&(q - lin).norm()))
            .expect("three candidates");
        Ok(best)
    }
}
