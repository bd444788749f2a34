use std::cell::RefCell;
use std::f64::consts::PI;
use std::sync::{Arc, OnceLock};

use num_complex::Complex64;

use super::field::FieldSpec;
use crate::error::{Error, Result};
use crate::jmap::{GammaTable, MapParams};
use crate::numerics::{find_root, QuadratureRule};

const MAX_LEVEL: usize = 12;
const CONTOUR_TOL: f64 = 1e-13;

/// Weight multiplying V'(J(s)) in the contour integrals of the parameter system.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Weight {
    One,
    /// 1/(s − ½)
    PoleAtHalf,
}

#[derive(Debug, Clone, Copy)]
pub(crate) struct GammaNode {
    /// x − c0 at this node
    pub x_rel: f64,
    pub s: Complex64,
    /// dσ/dφ times the quadrature weight
    pub ds: Complex64,
}

/// Composite Gauss–Legendre nodes on γ1 (left to right) for one c1, refined
/// by doubling the panel count in φ.
#[derive(Debug)]
pub(crate) struct Gamma1 {
    pub table: Arc<GammaTable>,
    levels: Vec<OnceLock<Vec<GammaNode>>>,
}

impl Gamma1 {
    pub fn new(c1: f64) -> Result<Self> {
        Ok(Self::from_table(Arc::new(GammaTable::new(c1)?)))
    }

    pub fn from_table(table: Arc<GammaTable>) -> Self {
        Gamma1 {
            table,
            levels: (0..=MAX_LEVEL).map(|_| OnceLock::new()).collect(),
        }
    }

    pub fn level(&self, l: usize) -> &[GammaNode] {
        self.levels[l].get_or_init(|| {
            let rule: &QuadratureRule = crate::numerics::panel_rule();
            let panels = 1usize << l;
            let width = PI / panels as f64;
            let h = self.table.half_width();
            let mut nodes = Vec::with_capacity(panels * rule.order);
            for p in 0..panels {
                let mid = (p as f64 + 0.5) * width;
                for (t, w) in rule.nodes.iter().zip(&rule.weights) {
                    let phi = mid + 0.5 * width * t;
                    let (s, ds) = self.table.sigma(phi);
                    nodes.push(GammaNode {
                        x_rel: -h * phi.cos(),
                        s,
                        ds: ds * (0.5 * width * w),
                    });
                }
            }
            nodes
        })
    }

    /// ∫ over γ1 (left to right) of f(node)·dσ, refined until two levels agree.
    pub fn integrate(&self, f: impl Fn(&GammaNode) -> Complex64) -> Result<Complex64> {
        self.integrate_tol(f, CONTOUR_TOL)
    }

    pub fn integrate_tol(
        &self,
        f: impl Fn(&GammaNode) -> Complex64,
        tol: f64,
    ) -> Result<Complex64> {
        // the tolerance is relative to Σ|f·ds|, the rounding floor of the sum
        let sum = |l: usize| -> (Complex64, f64) {
            self.level(l)
                .iter()
                .fold((Complex64::new(0.0, 0.0), 0.0), |(acc, mag), n| {
                    let t = f(n) * n.ds;
                    (acc + t, mag + t.norm())
                })
        };
        let (mut prev, _) = sum(1);
        for l in 2..=MAX_LEVEL {
            let (cur, mag) = sum(l);
            if !cur.re.is_finite() || !cur.im.is_finite() {
                return Err(Error::Convergence("non-finite contour sum".into()));
            }
            if (cur - prev).norm() <= tol * mag.max(1.0) {
                return Ok(cur);
            }
            prev = cur;
        }
        Err(Error::Convergence(format!(
            "contour quadrature on gamma1 (c1={}) did not converge",
            self.table.c1()
        )))
    }

    /// (1/2πi)∮_γ V'(J(s))·w(s) ds, using the real symmetry of the integrand.
    pub fn vprime_integral(&self, field: &FieldSpec, c0: f64, weight: Weight) -> Result<f64> {
        let v = self.integrate(|n| {
            let vp = field.v1(c0 + n.x_rel);
            match weight {
                Weight::One => Complex64::new(vp, 0.0),
                Weight::PoleAtHalf => vp / (n.s - 0.5),
            }
        })?;
        Ok(-v.im / PI)
    }
}

/// (1/2πi)∮_γ V'(J_{c1,c0}(s))·w(s) ds with γ counterclockwise.
pub fn contour_integral_vprime(field: &FieldSpec, c1: f64, c0: f64, weight: Weight) -> Result<f64> {
    field.validate()?;
    let g = Gamma1::new(c1)?;
    g.vprime_integral(field, c0, weight)
}

pub(crate) fn solve_c0_on(field: &FieldSpec, gamma: &Gamma1) -> Result<f64> {
    let failure = RefCell::new(None);
    let f = |c0: f64| match gamma.vprime_integral(field, c0, Weight::PoleAtHalf) {
        Ok(v) => v - 1.0,
        Err(e) => {
            *failure.borrow_mut() = Some(e);
            f64::NAN
        }
    };
    let mut width = 1.0;
    for _ in 0..60 {
        let (lo, hi) = (-width, width);
        let (flo, fhi) = (f(lo), f(hi));
        if let Some(e) = failure.borrow_mut().take() {
            return Err(e);
        }
        if flo.signum() != fhi.signum() || flo == 0.0 || fhi == 0.0 {
            let root = find_root(f, lo, hi, 1e-14);
            if let Some(e) = failure.into_inner() {
                return Err(e);
            }
            return root;
        }
        width *= 2.0;
    }
    Err(Error::Convergence(format!(
        "no bracket for c0 at c1={} after 60 doublings",
        gamma.table.c1()
    )))
}

/// The c0 solving the pole-weighted equation for fixed c1.
pub fn solve_c0(field: &FieldSpec, c1: f64) -> Result<f64> {
    field.validate()?;
    let g = Gamma1::new(c1)?;
    solve_c0_on(field, &g)
}

/// Outcome of the nested (c1, c0) solve.
#[derive(Debug, Clone)]
pub struct ParameterSolve {
    pub map: MapParams,
    /// Sign changes of c1 ↦ G(c1) found on the scan grid; more than one means
    /// the system has several solutions and the smallest c1 was taken.
    pub sign_changes: usize,
    pub(crate) gamma: Arc<GammaTable>,
}

fn outer_residual(field: &FieldSpec, c1: f64) -> Result<(f64, f64)> {
    let g = Gamma1::new(c1)?;
    let c0 = solve_c0_on(field, &g)?;
    Ok((g.vprime_integral(field, c0, Weight::One)? - 1.0 / c1, c0))
}

pub fn solve_parameters_detailed(field: &FieldSpec) -> Result<ParameterSolve> {
    field.validate()?;
    let mut scan: Vec<(f64, f64)> = Vec::new();
    let mut lo_exp = -3.0;
    let mut hi_exp = 3.0;
    let mut brackets = Vec::new();
    for _ in 0..3 {
        scan.clear();
        let steps = ((hi_exp - lo_exp) * 4.0) as usize;
        for i in 0..=steps {
            let c1 = 10f64.powf(lo_exp + (hi_exp - lo_exp) * i as f64 / steps as f64);
            if let Ok((g, _)) = outer_residual(field, c1) {
                if g.is_finite() {
                    scan.push((c1, g));
                }
            }
        }
        brackets = scan
            .windows(2)
            .filter(|w| w[0].1.signum() != w[1].1.signum() || w[0].1 == 0.0)
            .map(|w| (w[0].0, w[1].0))
            .collect();
        if !brackets.is_empty() {
            break;
        }
        lo_exp -= 3.0;
        hi_exp += 3.0;
    }
    let Some(&(lo, hi)) = brackets.first() else {
        return Err(Error::NoSolution(
            "no sign change of the c1 equation on [1e-9, 1e9]".into(),
        ));
    };
    let mut failure = None;
    let c1 = find_root(
        |c1| match outer_residual(field, c1) {
            Ok((g, _)) => g,
            Err(e) => {
                failure = Some(e);
                f64::NAN
            }
        },
        lo,
        hi,
        1e-15 * hi,
    );
    if let Some(e) = failure {
        return Err(e);
    }
    let c1 = c1?;
    let gamma = Gamma1::new(c1)?;
    let c0 = solve_c0_on(field, &gamma)?;
    Ok(ParameterSolve {
        map: MapParams::new(c1, c0)?,
        sign_changes: brackets.len(),
        gamma: gamma.table,
    })
}

/// Solves the two contour equations for (c1, c0) and returns the map.
pub fn solve_parameters(field: &FieldSpec) -> Result<MapParams> {
    solve_parameters_detailed(field).map(|s| s.map)
}
