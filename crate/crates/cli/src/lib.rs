//! Batch front-end for `eqsrc`: JSON job specs in, CSV or JSON tables out.

pub mod commands;
pub mod spec;
pub mod table;

use std::path::{Path, PathBuf};

pub use commands::{run, CliError, Output};
pub use spec::{validate_schema, Command, Family, Format, JobSpec, SchemaError};

/// Environment variable that overrides `precision_bits` in the job.
pub const PRECISION_ENV: &str = "EQSRC_PRECISION_BITS";

/// Options given on the command line next to the job file.
#[derive(Debug, Clone, Default)]
pub struct Invocation {
    pub command: Option<Command>,
    pub out: Option<PathBuf>,
    pub format: Option<Format>,
    pub precision_env: Option<String>,
}

/// Reads and validates the job, merging command-line options: the command
/// is filled in when the file omits it and must agree when both give one.
pub fn load_job(raw: &str, inv: &Invocation) -> Result<JobSpec, CliError> {
    let raw = match inv.command {
        Some(c) => inject_command(raw, c)?,
        None => raw.to_string(),
    };
    let mut job = validate_schema(&raw)?;
    if let Some(f) = inv.format {
        job.format = f;
    }
    if let Some(p) = &inv.out {
        job.output_path = Some(p.to_string_lossy().into_owned());
    }
    if let Some(bits) = &inv.precision_env {
        let parsed = bits
            .trim()
            .parse::<u32>()
            .ok()
            .filter(|b| *b >= 53)
            .ok_or_else(|| {
                CliError::Io(format!(
                    "{PRECISION_ENV}={bits:?} is not an integer of at least 53"
                ))
            })?;
        job.precision_bits = parsed;
    }
    Ok(job)
}

fn inject_command(raw: &str, c: Command) -> Result<String, CliError> {
    let mut v: serde_json::Value = serde_json::from_str(raw)
        .map_err(|e| SchemaError::new("", format!("invalid JSON: {e}")))?;
    let Some(obj) = v.as_object_mut() else {
        return Err(SchemaError::new("", "job must be a JSON object").into());
    };
    let name = serde_json::Value::from(c.name());
    match obj.get("command") {
        None => {
            obj.insert("command".into(), name);
        }
        Some(existing) if *existing == name => {}
        Some(existing) => {
            return Err(SchemaError::new(
                "/command",
                format!("job says {existing} but {} was requested", c.name()),
            )
            .into())
        }
    }
    Ok(v.to_string())
}

/// Runs a job file end to end and writes the result to the output path or
/// standard output.
pub fn execute(spec: &Path, inv: &Invocation) -> Result<(), CliError> {
    let raw = std::fs::read_to_string(spec)
        .map_err(|e| CliError::Io(format!("cannot read {}: {e}", spec.display())))?;
    let job = load_job(&raw, inv)?;
    let text = run(&job)?.render(job.format);
    match &job.output_path {
        Some(p) => {
            std::fs::write(p, text).map_err(|e| CliError::Io(format!("cannot write {p}: {e}")))
        }
        None => {
            use std::io::Write;
            std::io::stdout()
                .write_all(text.as_bytes())
                .map_err(|e| CliError::Io(e.to_string()))
        }
    }
}
