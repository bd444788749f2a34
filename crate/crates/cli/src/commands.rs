use std::fmt;

use eqsrc::asympt::{self, default_delta, AsymptoticResult, Region};
use eqsrc::equilibrium::{EdgeProbe, GKind, RegularityReport};
use eqsrc::jmap::Side;
use eqsrc::numerics::PrecisionContext;
use eqsrc::oracle::{compute_moments, exact_h, exact_p, exact_q, ExactPoly, MomentTable};
use eqsrc::{Complex64, EquilibriumData, FieldSpec};
use serde_json::{json, Value};

use crate::spec::{Command, Family, Format, JobSpec, SchemaError};
use crate::table::{Cell, Table};

/// ψ(x) below this fraction of its interior maximum marks a near-critical field.
pub const NEAR_CRITICAL_RATIO: f64 = 0.02;

#[derive(Debug)]
pub enum CliError {
    Schema(SchemaError),
    Numerical(eqsrc::Error),
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Schema(_) | CliError::Io(_) => 2,
            CliError::Numerical(_) => 3,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Schema(e) => write!(f, "{e}"),
            CliError::Numerical(e) => write!(f, "{}: {e}", e.name()),
            CliError::Io(m) => write!(f, "{m}"),
        }
    }
}

impl From<SchemaError> for CliError {
    fn from(e: SchemaError) -> Self {
        CliError::Schema(e)
    }
}

impl From<eqsrc::Error> for CliError {
    fn from(e: eqsrc::Error) -> Self {
        CliError::Numerical(e)
    }
}

pub enum Output {
    Json(Value),
    Table(Table),
}

impl Output {
    pub fn render(&self, format: Format) -> String {
        match (self, format) {
            (Output::Table(t), Format::Csv) => t.to_csv(),
            (Output::Table(t), Format::Json) => pretty(&t.to_json()),
            (Output::Json(v), Format::Json) => pretty(v),
            (Output::Json(v), Format::Csv) => json_to_csv(v),
        }
    }
}

fn pretty(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serializable");
    s.push('\n');
    s
}

/// Flat top-level numbers and booleans of an object as a one-row CSV.
fn json_to_csv(v: &Value) -> String {
    let Value::Object(m) = v else {
        return String::new();
    };
    let mut keys = Vec::new();
    let mut vals = Vec::new();
    for (k, v) in m {
        let cell = match v {
            Value::Number(n) => format!("{:.16e}", n.as_f64().unwrap_or(f64::NAN)),
            Value::Bool(b) => b.to_string(),
            Value::String(s) => s.clone(),
            _ => continue,
        };
        keys.push(k.as_str());
        vals.push(cell);
    }
    format!("{}\n{}\n", keys.join(","), vals.join(","))
}

pub fn build_equilibrium(job: &JobSpec) -> eqsrc::Result<EquilibriumData> {
    match job.overrides {
        Some((c1, c0)) => EquilibriumData::from_parameters(job.field.clone(), c1, c0),
        None => EquilibriumData::new(job.field.clone()),
    }
}

pub fn run(job: &JobSpec) -> Result<Output, CliError> {
    let eq = build_equilibrium(job)?;
    let delta = job.delta.unwrap_or_else(|| default_delta(&eq));
    Ok(match job.command {
        Command::Equilibrium => Output::Json(equilibrium_json(&eq, delta)),
        Command::Density => Output::Table(density(&eq, job.grid)),
        Command::Asymptotics => Output::Table(asymptotics(job, &eq, delta)?),
        Command::OracleCompare => Output::Table(oracle_compare(job, &eq, delta)?),
        Command::ConvergenceReport => Output::Table(convergence_report(job, &eq, delta)?),
    })
}

fn field_json(f: &FieldSpec) -> Value {
    match f {
        FieldSpec::Quadratic { t } => json!({"kind": "quadratic", "t": t}),
        FieldSpec::Quartic { u } => json!({"kind": "quartic", "u": u}),
        FieldSpec::Polynomial { coeffs } => json!({"kind": "polynomial", "coeffs": coeffs}),
    }
}

fn probe_json(p: &EdgeProbe) -> Value {
    json!({
        "ratios": p.ratios,
        "finite_positive": p.finite_positive,
        "slow_convergence": p.slow_convergence,
    })
}

fn regularity_json(r: &RegularityReport, near_critical: bool) -> Value {
    json!({
        "regular": r.is_regular(),
        "near_critical": near_critical,
        "mass_error": r.mass_error,
        "normalization": r.normalization,
        "min_density": r.min_density,
        "argmin_density": r.argmin_density,
        "positivity": r.positivity,
        "edge_a": probe_json(&r.edge_a),
        "edge_b": probe_json(&r.edge_b),
        "square_root_edges": r.square_root_edges,
        "equality_residual": r.equality_residual,
        "equality": r.equality,
        "max_exterior_phi": r.max_exterior_phi,
        "inequality": r.inequality,
    })
}

/// Minimum of ψ over the middle 80% of the support small against its
/// maximum: the field is close to a transition where the support splits.
pub fn near_critical(eq: &EquilibriumData) -> bool {
    let (a, w) = (eq.map.a, eq.map.b - eq.map.a);
    let vals: Vec<f64> = (0..=400)
        .map(|i| eq.density(a + w * (0.1 + 0.8 * i as f64 / 400.0)))
        .collect();
    let peak = vals.iter().cloned().fold(0.0f64, f64::max);
    let low = vals.iter().cloned().fold(f64::INFINITY, f64::min);
    low < NEAR_CRITICAL_RATIO * peak
}

fn equilibrium_json(eq: &EquilibriumData, delta: f64) -> Value {
    json!({
        "field": field_json(&eq.field),
        "c1": eq.map.c1,
        "c0": eq.map.c0,
        "a": eq.map.a,
        "b": eq.map.b,
        "ell": eq.ell,
        "ell_a": eq.ell_a,
        "delta": delta,
        "sign_changes": eq.sign_changes,
        "regularity": regularity_json(&eq.regularity, near_critical(eq)),
    })
}

/// ψ on `grid` Chebyshev–Lobatto points of [a, b], endpoints included.
fn density(eq: &EquilibriumData, grid: usize) -> Table {
    let (a, b) = (eq.map.a, eq.map.b);
    let mut t = Table::new(&["x", "psi"]);
    for i in 0..grid {
        let c = (std::f64::consts::PI * i as f64 / (grid - 1) as f64).cos();
        let x = match i {
            0 => a,
            _ if i == grid - 1 => b,
            _ => 0.5 * (a + b) - 0.5 * (b - a) * c,
        };
        let psi = if i == 0 || i == grid - 1 {
            0.0
        } else {
            eq.density(x)
        };
        t.push(vec![Cell::Num(x), Cell::Num(psi)]);
    }
    t
}

fn asym(
    eq: &EquilibriumData,
    fam: Family,
    n: u32,
    k: i32,
    z: Complex64,
    delta: f64,
) -> eqsrc::Result<AsymptoticResult> {
    match fam {
        Family::P => asympt::asym_p_delta(eq, n, k, z, delta),
        Family::Q => asympt::asym_q_delta(eq, n, k, z, delta),
    }
}

/// Rows in n_list order, then point order. The value is
/// (value_re + i·value_im)·e^{log_scale}.
fn asymptotics(job: &JobSpec, eq: &EquilibriumData, delta: f64) -> Result<Table, CliError> {
    let mut t = Table::new(&[
        "z_re",
        "z_im",
        "region",
        "value_re",
        "value_im",
        "log_scale",
    ]);
    for &n in &job.n_list {
        for &z in &job.points {
            let r = asym(eq, job.family, n, job.k, z, delta)?;
            t.push(vec![
                Cell::Num(z.re),
                Cell::Num(z.im),
                Cell::Text(r.region.tag.name().to_string()),
                Cell::Num(r.mantissa.re),
                Cell::Num(r.mantissa.im),
                Cell::Num(r.exponent),
            ]);
        }
    }
    Ok(t)
}

struct Exact {
    table: MomentTable,
    poly: ExactPoly,
    degree: usize,
}

fn exact(job: &JobSpec, n: u32) -> eqsrc::Result<Exact> {
    let degree = (n as i64 + job.k as i64) as usize;
    let precision = PrecisionContext::new(job.precision_bits)?;
    let table = compute_moments(&job.field, n, degree, degree, precision)?;
    let poly = match job.family {
        Family::P => exact_p(&table, degree)?,
        Family::Q => exact_q(&table, degree)?,
    };
    Ok(Exact {
        table,
        poly,
        degree,
    })
}

/// (exact value, asymptotic value, relative error) at real x; the relative
/// error is formed in log space so it survives overflow of either value.
fn compare_at(ex: &ExactPoly, r: &AsymptoticResult, x: f64) -> (f64, f64, f64) {
    let (sign, log_e) = ex.eval_log(x);
    let sign_a = r.mantissa.re.signum();
    let log_a = r.mantissa.re.abs().ln() + r.exponent;
    let exact = sign * log_e.exp();
    let approx = sign_a * log_a.exp();
    let rel = if sign == 0.0 {
        f64::INFINITY
    } else {
        (sign_a * sign * (log_a - log_e).exp() - 1.0).abs()
    };
    (exact, approx, rel)
}

fn oracle_compare(job: &JobSpec, eq: &EquilibriumData, delta: f64) -> Result<Table, CliError> {
    let mut t = Table::new(&["n", "x", "exact", "asymptotic", "rel_err"]);
    for &n in &job.n_list {
        let ex = exact(job, n)?;
        for z in &job.points {
            let r = asym(eq, job.family, n, job.k, *z, delta)?;
            let (e, a, rel) = compare_at(&ex.poly, &r, z.re);
            t.push(vec![
                Cell::Int(n as i64),
                Cell::Num(z.re),
                Cell::Num(e),
                Cell::Num(a),
                Cell::Num(rel),
            ]);
        }
    }
    Ok(t)
}

/// |exact − asymptotic| over the bulk envelope r_k·e^{n Re g₊}.
fn bulk_error(
    eq: &EquilibriumData,
    job: &JobSpec,
    n: u32,
    ex: &ExactPoly,
    r: &AsymptoticResult,
    x: f64,
) -> eqsrc::Result<f64> {
    let (amp, which) = match job.family {
        Family::P => (asympt::r_theta(eq, job.k, x).0, GKind::G),
        Family::Q => (asympt::r_theta_hat(eq, job.k, x).0, GKind::GTilde),
    };
    let log_env = amp.ln() + n as f64 * eq.eval_g_side(x, which, Side::Plus)?.re;
    let (sign, log_e) = ex.eval_log(x);
    let sign_a = r.mantissa.re.signum();
    let log_a = r.mantissa.re.abs().ln() + r.exponent;
    Ok((sign * (log_e - log_env).exp() - sign_a * (log_a - log_env).exp()).abs())
}

/// Per n: worst relative error over the points in region A, worst
/// envelope-relative error over the points in region B (points in C or D are
/// skipped; NaN when a region has no points) and h_exact / h_asymptotic.
fn convergence_report(job: &JobSpec, eq: &EquilibriumData, delta: f64) -> Result<Table, CliError> {
    let mut t = Table::new(&["n", "max_rel_err_outside", "max_rel_err_bulk", "h_ratio"]);
    for &n in &job.n_list {
        let ex = exact(job, n)?;
        let mut outside = f64::NAN;
        let mut bulk = f64::NAN;
        for z in &job.points {
            let r = asym(eq, job.family, n, job.k, *z, delta)?;
            match r.region.tag {
                Region::A => {
                    let e = compare_at(&ex.poly, &r, z.re).2;
                    outside = if outside.is_nan() { e } else { outside.max(e) };
                }
                Region::B => {
                    let e = bulk_error(eq, job, n, &ex.poly, &r, z.re)?;
                    bulk = if bulk.is_nan() { e } else { bulk.max(e) };
                }
                Region::C | Region::D => {}
            }
        }
        let (p, q) = match job.family {
            Family::P => (ex.poly.clone(), exact_q(&ex.table, ex.degree)?),
            Family::Q => (exact_p(&ex.table, ex.degree)?, ex.poly.clone()),
        };
        let h = exact_h(&ex.table, &p, &q)?;
        let ratio = if h.is_sign_positive() {
            (h.ln().to_f64() - asympt::asym_h(eq, n, job.k)?.log_value).exp()
        } else {
            -((-h).ln().to_f64() - asympt::asym_h(eq, n, job.k)?.log_value).exp()
        };
        t.push(vec![
            Cell::Int(n as i64),
            Cell::Num(outside),
            Cell::Num(bulk),
            Cell::Num(ratio),
        ]);
    }
    Ok(t)
}
