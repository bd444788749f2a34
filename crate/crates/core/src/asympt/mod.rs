//! Leading-order large-n asymptotics of p_{n+k}^{(n)}(z), q_{n+k}^{(n)}(e^z)
//! and h_{n+k}^{(n)}, selected by the region of z.
//!
//! Exponentially large factors are carried as `mantissa · e^{exponent}`.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::equilibrium::{Edge, EquilibriumData, GKind};
use crate::error::{Error, Result};
use crate::jmap::Side;
use crate::numerics::{airy_ai_and_prime, find_root};

const CUT_TOL: f64 = 1e-10;

/// Arc of ∂D carrying the branch cut of √((s − s_a)(s − s_b)).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Cut {
    Gamma1,
    Gamma2,
}

/// Region of the closed upper half-plane.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Region {
    /// away from the support
    A,
    /// thin strip over the bulk of the support
    B,
    /// disk around a
    C,
    /// disk around b
    D,
}

impl Region {
    pub fn name(&self) -> &'static str {
        match self {
            Region::A => "A",
            Region::B => "B",
            Region::C => "C",
            Region::D => "D",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RegionTag {
    pub tag: Region,
    pub delta: f64,
}

/// Which asymptotic formula produced a value.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Form {
    Outside,
    Bulk,
    BulkReal,
    EdgeAiry,
    EdgeScaled,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AsymptoticResult {
    /// `mantissa · e^{exponent}` when that is representable
    pub value: Option<Complex64>,
    pub mantissa: Complex64,
    pub exponent: f64,
    pub region: RegionTag,
    pub n: u32,
    pub k: i32,
    pub form: Form,
}

impl AsymptoticResult {
    /// log|value|
    pub fn log_abs(&self) -> f64 {
        self.mantissa.norm().ln() + self.exponent
    }

    fn conj(mut self) -> Self {
        self.mantissa = self.mantissa.conj();
        self.value = self.value.map(|v| v.conj());
        self
    }
}

/// Asymptotic norming constant, `value = e^{log_value}` when finite.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormingConstant {
    pub value: Option<f64>,
    pub log_value: f64,
}

fn build(
    mantissa: Complex64,
    exponent: f64,
    region: RegionTag,
    n: u32,
    k: i32,
    form: Form,
) -> Result<AsymptoticResult> {
    if !(mantissa.re.is_finite() && mantissa.im.is_finite() && exponent.is_finite()) {
        return Err(Error::Range(format!(
            "non-finite asymptotic value ({mantissa})·e^{exponent}"
        )));
    }
    let scale = exponent.exp();
    let v = mantissa * scale;
    let value = (scale.is_finite() && v.re.is_finite() && v.im.is_finite()).then_some(v);
    Ok(AsymptoticResult {
        value,
        mantissa,
        exponent,
        region,
        n,
        k,
        form,
    })
}

/// Sum of two log-scaled terms e^{l1} + e^{l2}.
fn log_sum(l1: Complex64, l2: Complex64) -> (Complex64, f64) {
    let e = l1.re.max(l2.re);
    ((l1 - e).exp() + (l2 - e).exp(), e)
}

/// √(s − s_a)·√(s − s_b) with principal factors and a signed-zero-free
/// imaginary part; its own cut is [s_a, s_b].
fn w_segment(eq: &EquilibriumData, mut s: Complex64) -> Complex64 {
    if s.im == 0.0 {
        s.im = 0.0;
    }
    (s - eq.map.s_a).sqrt() * (s - eq.map.s_b).sqrt()
}

/// The branch with cut on the given arc, for s known to lie inside D
/// (`interior`) or outside it.
fn w_on(eq: &EquilibriumData, s: Complex64, interior: bool, cut: Cut) -> Complex64 {
    let w = w_segment(eq, s);
    if !interior {
        return w;
    }
    let flip = match cut {
        Cut::Gamma1 => s.im >= 0.0,
        Cut::Gamma2 => s.im < 0.0,
    };
    if flip {
        -w
    } else {
        w
    }
}

/// √(s² − ¼ − 1/c1) with its cut on γ1 or γ2 and w(s) ~ s at infinity.
pub fn branch_sqrt(eq: &EquilibriumData, s: Complex64, cut: Cut) -> Result<Complex64> {
    let (d1, d2) = eq.gamma_distances(s);
    let d = match cut {
        Cut::Gamma1 => d1,
        Cut::Gamma2 => d2,
    };
    if d < CUT_TOL {
        return Err(Error::NearCut(format!(
            "{s} is within {CUT_TOL:e} of the cut"
        )));
    }
    Ok(w_on(eq, s, eq.map.in_domain_d(s), cut))
}

fn gk_with(eq: &EquilibriumData, k: i32, s: Complex64, w: Complex64) -> Complex64 {
    let c1 = eq.map.c1;
    c1.powi(k) * (s + 0.5) * (s - 0.5).powi(k) / w
}

fn ghatk_with(eq: &EquilibriumData, k: i32, s: Complex64, w: Complex64) -> Complex64 {
    let m = &eq.map;
    let pre = (k as f64 * (0.5 * m.c1 + m.c0)).exp() / m.c1.sqrt();
    Complex64::new(0.0, pre) * (s - 0.5).powi(-k) / w
}

/// G_k(s) = c1ᵏ(s + ½)(s − ½)ᵏ/√(s² − ¼ − 1/c1), cut on γ1.
pub fn eval_gk(eq: &EquilibriumData, k: i32, s: Complex64) -> Result<Complex64> {
    Ok(gk_with(eq, k, s, branch_sqrt(eq, s, Cut::Gamma1)?))
}

/// Ĝ_k(s) = i·e^{k(c1/2 + c0)}/√c1 · (s − ½)^{−k}/√(s² − ¼ − 1/c1), cut on γ2.
pub fn eval_ghatk(eq: &EquilibriumData, k: i32, s: Complex64) -> Result<Complex64> {
    if k > 0 && (s - 0.5).norm() == 0.0 {
        return Err(Error::Domain("Ĝ_k has a pole at s = 1/2".into()));
    }
    Ok(ghatk_with(eq, k, s, branch_sqrt(eq, s, Cut::Gamma2)?))
}

/// (r_k(x), θ_k(x)) = (2|G_k(I₊(x))|, arg G_k(I₊(x))) with the value taken
/// from outside D.
pub fn r_theta(eq: &EquilibriumData, k: i32, x: f64) -> (f64, f64) {
    let s = eq.i_plus(x);
    let g = gk_with(eq, k, s, w_on(eq, s, false, Cut::Gamma1));
    (2.0 * g.norm(), g.arg())
}

/// (r̂_k(x), θ̂_k(x)) from Ĝ_k(I₋(x)) taken from inside D.
pub fn r_theta_hat(eq: &EquilibriumData, k: i32, x: f64) -> (f64, f64) {
    let s = eq.i_plus(x).conj();
    let g = ghatk_with(eq, k, s, w_on(eq, s, true, Cut::Gamma2));
    (2.0 * g.norm(), g.arg())
}

/// Default region radius δ = 0.05·(b − a).
pub fn default_delta(eq: &EquilibriumData) -> f64 {
    0.05 * (eq.map.b - eq.map.a)
}

/// Region of z (the conjugate is used for Im z < 0); ties go to C/D, then B.
pub fn classify_region(eq: &EquilibriumData, z: Complex64, delta: f64) -> RegionTag {
    let z = if z.im < 0.0 { z.conj() } else { z };
    let (a, b) = (eq.map.a, eq.map.b);
    let da = (z - a).norm();
    let db = (z - b).norm();
    let tag = if da <= delta || db <= delta {
        if da <= db {
            Region::C
        } else {
            Region::D
        }
    } else if z.re >= a && z.re <= b && z.im <= 0.5 * delta {
        Region::B
    } else {
        Region::A
    };
    RegionTag { tag, delta }
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Family {
    P,
    Q,
}

/// Preimages I₁(z), I₂(z) and (g, g̃) at z; real z
/// uses the boundary values from above.
struct Local {
    s1: Complex64,
    s2: Complex64,
    g: Complex64,
    gt: Complex64,
}

fn local_data(eq: &EquilibriumData, z: Complex64, need_s2: bool) -> Result<Local> {
    let m = &eq.map;
    if z.im == 0.0 {
        let x = z.re;
        let g = eq.eval_g_side(x, GKind::G, Side::Plus)?;
        let gt = eq.eval_g_side(x, GKind::GTilde, Side::Plus)?;
        if x > m.a && x < m.b {
            let s = eq.i_plus(x);
            return Ok(Local {
                s1: s,
                s2: s.conj(),
                g,
                gt,
            });
        }
        let s1 = m.invert_i1(z)?;
        let s2 = if need_s2 {
            m.invert_i2(z)?
        } else {
            Complex64::new(f64::NAN, 0.0)
        };
        return Ok(Local { s1, s2, g, gt });
    }
    let s1 = m.invert_i1(z)?;
    let s2 = if need_s2 {
        m.invert_i2(z)?
    } else {
        Complex64::new(f64::NAN, 0.0)
    };
    let g = eq.eval_g(z, GKind::G)?;
    let gt = if z.im.abs() < PI {
        eq.eval_g(z, GKind::GTilde)?
    } else {
        Complex64::new(f64::NAN, f64::NAN)
    };
    Ok(Local { s1, s2, g, gt })
}

fn prefactors(eq: &EquilibriumData, fam: Family, k: i32, loc: &Local) -> (Complex64, Complex64) {
    match fam {
        Family::P => (
            gk_with(eq, k, loc.s1, w_on(eq, loc.s1, false, Cut::Gamma1)),
            gk_with(eq, k, loc.s2, w_on(eq, loc.s2, true, Cut::Gamma1)),
        ),
        Family::Q => (
            ghatk_with(eq, k, loc.s1, w_on(eq, loc.s1, false, Cut::Gamma2)),
            ghatk_with(eq, k, loc.s2, w_on(eq, loc.s2, true, Cut::Gamma2)),
        ),
    }
}

/// Point z = edge + t/(f′(edge)·n^{2/3}).
pub fn edge_point(eq: &EquilibriumData, n: u32, t: f64, edge: Edge) -> f64 {
    let e = match edge {
        Edge::A => eq.map.a,
        Edge::B => eq.map.b,
    };
    e + t / (eq.f_prime_edge(edge) * (n as f64).powf(2.0 / 3.0))
}

fn edge_constant(eq: &EquilibriumData, fam: Family, n: u32, k: i32, edge: Edge) -> f64 {
    let m = &eq.map;
    let fp = eq.f_prime_edge(edge).abs();
    let sign = match edge {
        Edge::A if k.rem_euclid(2) == 1 => -1.0,
        _ => 1.0,
    };
    let base = match edge {
        Edge::A => m.s_b + 0.5,
        Edge::B => m.s_b - 0.5,
    };
    let tail = match fam {
        Family::P => base.powi(k - 1) * m.c1.powf(k as f64 - 0.5),
        Family::Q => base.powi(-k) * (k as f64 * (0.5 * m.c1 + m.c0)).exp(),
    };
    sign * (2.0 * PI).sqrt()
        * (0.25 + 1.0 / m.c1).powf(-0.125)
        * tail
        * fp.powf(0.25)
        * (n as f64).powf(1.0 / 6.0)
}

/// Right-hand side of the edge-scaled p formula: the limit of
/// e^{(n/2)(g̃ − g − V − ℓ)}·p_{n+k}(z) at z = [`edge_point`].
pub fn edge_scaled_p(eq: &EquilibriumData, n: u32, k: i32, t: f64, edge: Edge) -> Result<f64> {
    Ok(edge_constant(eq, Family::P, n, k, edge) * airy_ai_and_prime(t)?.0)
}

/// Right-hand side of the edge-scaled q formula, the limit of
/// e^{(n/2)(g − g̃ − V − ℓ)}·q_{n+k}(e^z).
pub fn edge_scaled_q(eq: &EquilibriumData, n: u32, k: i32, t: f64, edge: Edge) -> Result<f64> {
    Ok(edge_constant(eq, Family::Q, n, k, edge) * airy_ai_and_prime(t)?.0)
}

/// ½(g̃ − g − V − ℓ) at real x, from the boundary values from above; this is
/// real and multiplies n in the p edge normalisation (negate g ↔ g̃ for q).
pub fn edge_exponent(eq: &EquilibriumData, x: f64, family_q: bool) -> Result<f64> {
    let g = eq.eval_g_side(x, GKind::G, Side::Plus)?.re;
    let gt = eq.eval_g_side(x, GKind::GTilde, Side::Plus)?.re;
    let d = if family_q { g - gt } else { gt - g };
    Ok(0.5 * (d - eq.field.v(x) - eq.ell))
}

fn airy_form(
    eq: &EquilibriumData,
    fam: Family,
    n: u32,
    k: i32,
    z: Complex64,
    tag: RegionTag,
) -> Result<AsymptoticResult> {
    let edge = if tag.tag == Region::C {
        Edge::A
    } else {
        Edge::B
    };
    if z.im != 0.0 {
        return Err(Error::Domain(format!(
            "edge form at non-real {z} needs the Airy function at complex argument"
        )));
    }
    let x = z.re;
    let e = match edge {
        Edge::A => eq.map.a,
        Edge::B => eq.map.b,
    };
    let nf = n as f64;
    let w = eq.map.b - eq.map.a;
    if (x - e).abs() < 1e-8 * w {
        // removable singularity: the two sides are evaluated symmetrically
        let h = 1e-5 * w;
        let l = airy_form(eq, fam, n, k, Complex64::new(e - h, 0.0), tag)?;
        let r = airy_form(eq, fam, n, k, Complex64::new(e + h, 0.0), tag)?;
        let (m, ex) = log_sum(
            l.mantissa.ln() + l.exponent - std::f64::consts::LN_2,
            r.mantissa.ln() + r.exponent - std::f64::consts::LN_2,
        );
        return build(m, ex, tag, n, k, Form::EdgeAiry);
    }
    let loc = local_data(eq, z, true)?;
    let (c1, c2) = prefactors(eq, fam, k, &loc);
    let (lead, mut other) = match fam {
        Family::P => (c1, c2),
        Family::Q => (c2, c1),
    };
    if edge == Edge::A {
        // with the cut of √ on γ1 (γ2 for Ĝ) the second preimage term changes
        // sign between the two edges; this keeps the form real and matched
        // to the bulk cosine at a
        other = -other;
    }
    let f = eq.eval_f_edge(z, edge)?;
    let arg = nf.powf(2.0 / 3.0) * f.re;
    let (ai, aip) = airy_ai_and_prime(arg)?;
    let i = Complex64::i();
    let f14 = f.powf(0.25);
    let bracket = (lead - i * other) * nf.powf(1.0 / 6.0) * f14 * ai
        - (lead + i * other) * nf.powf(-1.0 / 6.0) / f14 * aip;
    let v = eq.field.v(x);
    let expo = match fam {
        Family::P => 0.5 * nf * (loc.g - loc.gt + v + eq.ell),
        Family::Q => 0.5 * nf * (loc.gt - loc.g + v + eq.ell),
    };
    build(
        bracket * PI.sqrt() * Complex64::new(0.0, expo.im).exp(),
        expo.re,
        tag,
        n,
        k,
        Form::EdgeAiry,
    )
}

fn evaluate(
    eq: &EquilibriumData,
    fam: Family,
    n: u32,
    k: i32,
    z: Complex64,
    delta: f64,
) -> Result<AsymptoticResult> {
    if n == 0 {
        return Err(Error::InvalidArgument("n must be positive".into()));
    }
    if !(delta > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "delta must be positive, got {delta}"
        )));
    }
    if fam == Family::Q && z.im.abs() >= PI {
        return Err(Error::Domain(format!("{z} outside the strip |Im z| < π")));
    }
    if z.im < 0.0 {
        return Ok(evaluate(eq, fam, n, k, z.conj(), delta)?.conj());
    }
    let tag = classify_region(eq, z, delta);
    let nf = n as f64;
    match tag.tag {
        Region::C | Region::D => airy_form(eq, fam, n, k, z, tag),
        Region::B if z.im == 0.0 => {
            let x = z.re;
            let (r, th) = match fam {
                Family::P => r_theta(eq, k, x),
                Family::Q => r_theta_hat(eq, k, x),
            };
            let which = if fam == Family::P {
                GKind::G
            } else {
                GKind::GTilde
            };
            let re = eq.eval_g_side(x, which, Side::Plus)?.re;
            let c = (nf * PI * eq.mass_right(x) + th).cos();
            build(
                Complex64::new(r * c, 0.0),
                nf * re,
                tag,
                n,
                k,
                Form::BulkReal,
            )
        }
        Region::B => {
            let loc = local_data(eq, z, true)?;
            let (c1, c2) = prefactors(eq, fam, k, &loc);
            let v = eq.field.v_complex(z);
            let (l1, l2) = match fam {
                Family::P => (c1.ln() + nf * loc.g, c2.ln() + nf * (v - loc.gt + eq.ell)),
                Family::Q => (c2.ln() + nf * loc.gt, c1.ln() + nf * (v - loc.g + eq.ell)),
            };
            let (mant, e) = log_sum(l1, l2);
            build(mant, e, tag, n, k, Form::Bulk)
        }
        Region::A => {
            let loc = local_data(eq, z, fam == Family::Q)?;
            let (c1, c2) = prefactors(eq, fam, k, &loc);
            let l = match fam {
                Family::P => c1.ln() + nf * loc.g,
                Family::Q => c2.ln() + nf * loc.gt,
            };
            build(
                Complex64::new(0.0, l.im).exp(),
                l.re,
                tag,
                n,
                k,
                Form::Outside,
            )
        }
    }
}

/// Leading-order p_{n+k}^{(n)}(z) with the default δ.
pub fn asym_p(eq: &EquilibriumData, n: u32, k: i32, z: Complex64) -> Result<AsymptoticResult> {
    evaluate(eq, Family::P, n, k, z, default_delta(eq))
}

pub fn asym_p_delta(
    eq: &EquilibriumData,
    n: u32,
    k: i32,
    z: Complex64,
    delta: f64,
) -> Result<AsymptoticResult> {
    evaluate(eq, Family::P, n, k, z, delta)
}

/// Leading-order q_{n+k}^{(n)}(e^z) with the default δ.
pub fn asym_q(eq: &EquilibriumData, n: u32, k: i32, z: Complex64) -> Result<AsymptoticResult> {
    evaluate(eq, Family::Q, n, k, z, default_delta(eq))
}

pub fn asym_q_delta(
    eq: &EquilibriumData,
    n: u32,
    k: i32,
    z: Complex64,
    delta: f64,
) -> Result<AsymptoticResult> {
    evaluate(eq, Family::Q, n, k, z, delta)
}

/// h_{n+k}^{(n)} ≈ 2π·c1^{k+½}·e^{k(c1/2 + c0)}·e^{nℓ}.
pub fn asym_h(eq: &EquilibriumData, n: u32, k: i32) -> Result<NormingConstant> {
    if n == 0 {
        return Err(Error::InvalidArgument("n must be positive".into()));
    }
    let m = &eq.map;
    let kf = k as f64;
    let log_value =
        (2.0 * PI).ln() + (kf + 0.5) * m.c1.ln() + kf * (0.5 * m.c1 + m.c0) + n as f64 * eq.ell;
    let v = log_value.exp();
    Ok(NormingConstant {
        value: (v.is_finite() && v > 0.0).then_some(v),
        log_value,
    })
}

/// Zeros in (a + δ, b − δ) predicted by the bulk cosine form for p (or q).
pub fn bulk_zeros(
    eq: &EquilibriumData,
    n: u32,
    k: i32,
    family_q: bool,
    delta: f64,
) -> Result<Vec<f64>> {
    let phase = |x: f64| {
        let th = if family_q {
            r_theta_hat(eq, k, x).1
        } else {
            r_theta(eq, k, x).1
        };
        (n as f64 * PI * eq.mass_right(x) + th).cos()
    };
    let (lo, hi) = (eq.map.a + delta, eq.map.b - delta);
    let steps = 40 * n.max(1) as usize;
    let mut out = Vec::new();
    let mut x0 = lo;
    let mut f0 = phase(x0);
    for i in 1..=steps {
        let x1 = lo + (hi - lo) * i as f64 / steps as f64;
        let f1 = phase(x1);
        if f0 == 0.0 {
            out.push(x0);
        } else if f0 * f1 < 0.0 {
            out.push(find_root(phase, x0, x1, 1e-13)?);
        }
        x0 = x1;
        f0 = f1;
    }
    Ok(out)
}
