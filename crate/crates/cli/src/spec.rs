use std::fmt;

use eqsrc::numerics::PrecisionContext;
use eqsrc::{Complex64, FieldSpec};
use serde::{Deserialize, Serialize};
use serde_json::Value;

pub const DEFAULT_PRECISION_BITS: u32 = 256;
pub const DEFAULT_TOL: f64 = 1e-10;
pub const DEFAULT_GRID: usize = 201;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    Equilibrium,
    Density,
    Asymptotics,
    OracleCompare,
    ConvergenceReport,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Equilibrium => "equilibrium",
            Command::Density => "density",
            Command::Asymptotics => "asymptotics",
            Command::OracleCompare => "oracle-compare",
            Command::ConvergenceReport => "convergence-report",
        }
    }

    fn needs_n(self) -> bool {
        matches!(
            self,
            Command::Asymptotics | Command::OracleCompare | Command::ConvergenceReport
        )
    }

    fn needs_real_points(self) -> bool {
        matches!(self, Command::OracleCompare | Command::ConvergenceReport)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

/// Which polynomial family the point-wise commands evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    #[default]
    P,
    Q,
}

/// Schema violation with the JSON pointer of the offending value.
#[derive(Debug, Clone, PartialEq)]
pub struct SchemaError {
    pub pointer: String,
    pub message: String,
}

impl SchemaError {
    pub fn new(pointer: impl Into<String>, message: impl Into<String>) -> Self {
        SchemaError {
            pointer: pointer.into(),
            message: message.into(),
        }
    }
}

impl fmt::Display for SchemaError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let at = if self.pointer.is_empty() {
            "/"
        } else {
            &self.pointer
        };
        write!(f, "schema error at {at}: {}", self.message)
    }
}

impl std::error::Error for SchemaError {}

#[derive(Debug, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
enum RawField {
    Quadratic { t: f64 },
    Quartic { u: f64 },
    Polynomial { coeffs: Vec<f64> },
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawPoint {
    re: f64,
    #[serde(default)]
    im: f64,
}

/// The equilibrium command's JSON output, accepted back as `overrides`; only
/// c1 and c0 are used.
#[allow(dead_code)]
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawOverrides {
    c1: f64,
    c0: f64,
    #[serde(default)]
    field: Option<Value>,
    #[serde(default)]
    a: Option<f64>,
    #[serde(default)]
    b: Option<f64>,
    #[serde(default)]
    ell: Option<f64>,
    #[serde(default)]
    ell_a: Option<f64>,
    #[serde(default)]
    delta: Option<f64>,
    #[serde(default)]
    sign_changes: Option<Value>,
    #[serde(default)]
    regularity: Option<Value>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawJob {
    command: Option<Command>,
    field: Option<RawField>,
    n_list: Option<Vec<u32>>,
    k: Option<i32>,
    points: Option<Vec<RawPoint>>,
    delta: Option<f64>,
    precision_bits: Option<u32>,
    tol: Option<f64>,
    output_path: Option<String>,
    format: Option<Format>,
    family: Option<Family>,
    grid: Option<usize>,
    overrides: Option<RawOverrides>,
}

/// A fully defaulted job. `delta` stays `None` until the support is known;
/// the default is 0.05·(b − a).
#[derive(Debug, Clone, PartialEq)]
pub struct JobSpec {
    pub command: Command,
    pub field: FieldSpec,
    pub n_list: Vec<u32>,
    pub k: i32,
    pub points: Vec<Complex64>,
    pub delta: Option<f64>,
    pub precision_bits: u32,
    pub tol: f64,
    pub output_path: Option<String>,
    pub format: Format,
    pub family: Family,
    pub grid: usize,
    /// (c1, c0) to use instead of solving
    pub overrides: Option<(f64, f64)>,
}

fn pointer(path: &serde_path_to_error::Path) -> String {
    use serde_path_to_error::Segment;
    let mut out = String::new();
    for seg in path.iter() {
        match seg {
            Segment::Seq { index } => out.push_str(&format!("/{index}")),
            Segment::Map { key } => {
                out.push_str(&format!("/{}", key.replace('~', "~0").replace('/', "~1")))
            }
            Segment::Enum { variant } => out.push_str(&format!("/{variant}")),
            Segment::Unknown => out.push_str("/?"),
        }
    }
    out
}

fn field_spec(raw: RawField) -> Result<FieldSpec, SchemaError> {
    match raw {
        RawField::Quadratic { t } => FieldSpec::quadratic(t).map_err(|_| {
            SchemaError::new(
                "/field/t",
                format!("t must be positive and finite, got {t}"),
            )
        }),
        RawField::Quartic { u } => FieldSpec::quartic(u)
            .map_err(|_| SchemaError::new("/field/u", format!("u must be finite, got {u}"))),
        RawField::Polynomial { coeffs } => FieldSpec::polynomial(coeffs).map_err(|_| {
            SchemaError::new(
                "/field/coeffs",
                "V must satisfy V(x)/log(1 + x^2) -> +inf and V(x)/|x| -> +inf: the leading \
                 coefficient must have even degree >= 2 and be positive",
            )
        }),
    }
}

/// Parses and validates a job, filling defaults. Unknown keys are rejected.
pub fn validate_schema(raw: &str) -> Result<JobSpec, SchemaError> {
    let de = &mut serde_json::Deserializer::from_str(raw);
    let job: RawJob = serde_path_to_error::deserialize(de).map_err(|e| {
        let msg = e.inner().to_string();
        // serde appends " at line L column C"; the pointer is more useful
        let msg = msg.split(" at line ").next().unwrap_or(&msg).to_string();
        SchemaError::new(pointer(e.path()), msg)
    })?;

    let command = job
        .command
        .ok_or_else(|| SchemaError::new("/command", "missing required key"))?;
    let field = field_spec(
        job.field
            .ok_or_else(|| SchemaError::new("/field", "missing required key"))?,
    )?;

    let n_list = job.n_list.unwrap_or_default();
    if let Some(i) = n_list.iter().position(|&n| n == 0) {
        return Err(SchemaError::new(
            format!("/n_list/{i}"),
            "n must be positive",
        ));
    }
    if command.needs_n() && n_list.is_empty() {
        return Err(SchemaError::new(
            "/n_list",
            format!("{} needs a nonempty n_list", command.name()),
        ));
    }
    let k = job.k.unwrap_or(0);
    if command.needs_real_points() {
        if let Some(&n) = n_list.iter().find(|&&n| n as i64 + k as i64 <= 0) {
            return Err(SchemaError::new(
                "/k",
                format!("degree n + k must be positive (n = {n}, k = {k})"),
            ));
        }
    }

    let raw_points = job.points.unwrap_or_default();
    if command.needs_n() && raw_points.is_empty() {
        return Err(SchemaError::new(
            "/points",
            format!("{} needs a nonempty list of points", command.name()),
        ));
    }
    let mut points = Vec::with_capacity(raw_points.len());
    for (i, p) in raw_points.iter().enumerate() {
        if !p.re.is_finite() || !p.im.is_finite() {
            return Err(SchemaError::new(
                format!("/points/{i}"),
                "point must be finite",
            ));
        }
        if command.needs_real_points() && p.im != 0.0 {
            return Err(SchemaError::new(
                format!("/points/{i}/im"),
                format!("{} works on real points only", command.name()),
            ));
        }
        points.push(Complex64::new(p.re, p.im));
    }

    if let Some(d) = job.delta {
        if !(d > 0.0 && d.is_finite()) {
            return Err(SchemaError::new("/delta", "delta must be positive"));
        }
    }
    let precision_bits = job.precision_bits.unwrap_or(DEFAULT_PRECISION_BITS);
    if PrecisionContext::new(precision_bits).is_err() {
        return Err(SchemaError::new(
            "/precision_bits",
            format!("precision_bits must be at least 53, got {precision_bits}"),
        ));
    }
    let tol = job.tol.unwrap_or(DEFAULT_TOL);
    if !(tol > 0.0 && tol.is_finite()) {
        return Err(SchemaError::new("/tol", "tol must be positive"));
    }
    let grid = job.grid.unwrap_or(DEFAULT_GRID);
    if grid < 2 {
        return Err(SchemaError::new("/grid", "grid needs at least 2 points"));
    }
    let overrides = match job.overrides {
        Some(o) => {
            if !(o.c1 > 0.0 && o.c1.is_finite()) {
                return Err(SchemaError::new("/overrides/c1", "c1 must be positive"));
            }
            if !o.c0.is_finite() {
                return Err(SchemaError::new("/overrides/c0", "c0 must be finite"));
            }
            Some((o.c1, o.c0))
        }
        None => None,
    };
    let format = job.format.unwrap_or(match command {
        Command::Equilibrium => Format::Json,
        _ => Format::Csv,
    });

    Ok(JobSpec {
        command,
        field,
        n_list,
        k,
        points,
        delta: job.delta,
        precision_bits,
        tol,
        output_path: job.output_path,
        format,
        family: job.family.unwrap_or_default(),
        grid,
        overrides,
    })
}
