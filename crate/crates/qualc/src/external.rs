//! Running an installed ASP system on emitted programs.

use std::path::Path;
use std::process::Command;

use qualc_core::solver::Status;

use crate::error::{Error, Result};

/// Runs `solver` (a command line, split on whitespace) on `program` and
/// reads the verdict from its output. Exit codes 10/20 and the words
/// `SATISFIABLE`/`UNSATISFIABLE` are understood.
pub fn run_external(solver: &str, program: &Path) -> Result<Status> {
    let mut parts = solver.split_whitespace();
    let exe = parts
        .next()
        .ok_or_else(|| Error::Invalid("empty external solver command".into()))?;
    let output = Command::new(exe)
        .args(parts)
        .arg(program)
        .output()
        .map_err(|e| Error::Invalid(format!("cannot run `{solver}`: {e}")))?;
    let stdout = String::from_utf8_lossy(&output.stdout);
    let verdict = stdout
        .lines()
        .map(str::trim)
        .find(|l| *l == "SATISFIABLE" || *l == "UNSATISFIABLE");
    match (verdict, output.status.code()) {
        (Some("UNSATISFIABLE"), _) | (None, Some(20)) => Ok(Status::Unsat),
        (Some(_), _) | (None, Some(10 | 30)) => Ok(Status::Sat),
        _ => Err(Error::Invalid(format!(
            "`{solver}` gave no verdict: {}",
            String::from_utf8_lossy(&output.stderr).trim()
        ))),
    }
}
