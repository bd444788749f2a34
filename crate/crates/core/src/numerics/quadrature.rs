use std::ops::{Add, Mul, Sub};
use std::sync::OnceLock;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Maximum number of panel doublings in [`integrate_panels`].
pub const MAX_DOUBLINGS: u32 = 16;

const PANEL_ORDER: usize = 16;
const GRADING_RATIO: f64 = 0.15;
const GRADING_LEVELS: usize = 36;

/// Gauss–Legendre nodes and weights on [-1, 1].
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
    pub order: usize,
}

impl QuadratureRule {
    /// Applies the rule on `[lo, hi]`.
    pub fn integrate<T: Integrand>(&self, lo: f64, hi: f64, mut f: impl FnMut(f64) -> T) -> T {
        let half = 0.5 * (hi - lo);
        let mid = 0.5 * (hi + lo);
        let mut acc = T::zero();
        for (x, w) in self.nodes.iter().zip(&self.weights) {
            acc = acc + f(mid + half * x) * (w * half);
        }
        acc
    }
}

pub fn gauss_legendre(order: usize) -> Result<QuadratureRule> {
    if order < 2 {
        return Err(Error::InvalidArgument(format!(
            "quadrature order must be >= 2, got {order}"
        )));
    }
    let n = order;
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        // Tricomi's initial guess, then Newton on P_n
        let k = (i + 1) as f64;
        let nf = n as f64;
        let mut x = ((k - 0.25) / (nf + 0.5) * std::f64::consts::PI).cos()
            * (1.0 - (nf - 1.0) / (8.0 * nf.powi(3)));
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre(n, x);
        if d != 0.0 {
            dp = d;
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    Ok(QuadratureRule {
        nodes,
        weights,
        order,
    })
}

fn legendre(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

pub(crate) fn panel_rule() -> &'static QuadratureRule {
    static RULE: OnceLock<QuadratureRule> = OnceLock::new();
    RULE.get_or_init(|| gauss_legendre(PANEL_ORDER).expect("valid order"))
}

/// Values that can be accumulated by the quadrature drivers.
pub trait Integrand:
    Copy + Add<Output = Self> + Sub<Output = Self> + Mul<f64, Output = Self>
{
    fn zero() -> Self;
    fn magnitude(&self) -> f64;
}

impl Integrand for f64 {
    fn zero() -> Self {
        0.0
    }
    fn magnitude(&self) -> f64 {
        self.abs()
    }
}

impl Integrand for Complex64 {
    fn zero() -> Self {
        Complex64::new(0.0, 0.0)
    }
    fn magnitude(&self) -> f64 {
        self.norm()
    }
}

fn composite<T: Integrand, F>(f: &mut F, lo: f64, hi: f64, panels: usize) -> Result<T>
where
    F: FnMut(f64) -> Result<T>,
{
    let rule = panel_rule();
    let h = (hi - lo) / panels as f64;
    let mut acc = T::zero();
    for p in 0..panels {
        let a = lo + h * p as f64;
        let b = if p + 1 == panels { hi } else { a + h };
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        for (x, w) in rule.nodes.iter().zip(&rule.weights) {
            acc = acc + f(mid + half * x)? * (w * half);
        }
    }
    Ok(acc)
}

/// Composite 16-point Gauss–Legendre on `[lo, hi]`, doubling the panel count
/// until two successive estimates differ by at most `tol * max(1, |I|)`.
pub fn integrate_panels<T, F>(mut f: F, lo: f64, hi: f64, tol: f64) -> Result<T>
where
    T: Integrand,
    F: FnMut(f64) -> Result<T>,
{
    if lo == hi {
        return Ok(T::zero());
    }
    let mut prev = composite(&mut f, lo, hi, 1)?;
    let mut panels = 1usize;
    for _ in 0..MAX_DOUBLINGS {
        panels *= 2;
        let cur = composite(&mut f, lo, hi, panels)?;
        let scale = cur.magnitude().max(1.0);
        if !cur.magnitude().is_finite() {
            return Err(Error::Convergence("non-finite quadrature estimate".into()));
        }
        if (cur - prev).magnitude() <= tol * scale {
            return Ok(cur);
        }
        prev = cur;
    }
    Err(Error::Convergence(format!(
        "panel quadrature on [{lo}, {hi}] did not reach tol {tol:e}"
    )))
}

/// Signed integral from `from` to `to` for an integrand with an integrable endpoint
/// singularity at `from` (logarithmic or algebraic). `to` may lie on either
/// side of `from`.
///
/// Panels shrink geometrically toward `from`; each panel is integrated with
/// [`integrate_panels`].
pub fn integrate_graded<T, F>(mut f: F, from: f64, to: f64, tol: f64) -> Result<T>
where
    T: Integrand,
    F: FnMut(f64) -> Result<T>,
{
    if from == to {
        return Ok(T::zero());
    }
    let len = to - from;
    // below this width the nodes are no longer distinguishable from `from`
    let floor = 1e3 * f64::EPSILON * from.abs().max(f64::MIN_POSITIVE);
    let mut acc = T::zero();
    let mut outer = 1.0;
    for _ in 0..GRADING_LEVELS {
        let inner = outer * GRADING_RATIO;
        if (len * inner).abs() < floor {
            break;
        }
        let piece = integrate_panels(&mut f, from + len * inner, from + len * outer, tol)?;
        acc = acc + piece;
        outer = inner;
    }
    if (len * outer).abs() >= floor {
        acc = acc + composite(&mut f, from, from + len * outer, 1)?;
    }
    Ok(acc)
}
