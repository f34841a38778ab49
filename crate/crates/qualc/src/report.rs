//! Run reports, exit codes, wall clock and memory sampling.

use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use qualc_core::solver::{Clock, Stats, Status};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum ReportStatus {
    #[serde(rename = "SAT")]
    Sat,
    #[serde(rename = "UNSAT")]
    Unsat,
    #[serde(rename = "ERROR")]
    Error,
    #[serde(rename = "TIMEOUT")]
    Timeout,
}

impl ReportStatus {
    pub fn exit_code(self) -> i32 {
        match self {
            ReportStatus::Sat => 0,
            ReportStatus::Unsat => 1,
            ReportStatus::Error => 2,
            ReportStatus::Timeout => 3,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            ReportStatus::Sat => "SAT",
            ReportStatus::Unsat => "UNSAT",
            ReportStatus::Error => "ERROR",
            ReportStatus::Timeout => "TIMEOUT",
        }
    }
}

impl From<Status> for ReportStatus {
    fn from(s: Status) -> Self {
        match s {
            Status::Sat => ReportStatus::Sat,
            Status::Unsat => ReportStatus::Unsat,
            Status::Timeout => ReportStatus::Timeout,
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReportStats {
    pub decisions: u64,
    pub backtracks: u64,
    pub nogoods_added: u64,
}

impl From<&Stats> for ReportStats {
    fn from(s: &Stats) -> Self {
        ReportStats {
            decisions: s.decisions,
            backtracks: s.backtracks,
            nogoods_added: s.nogoods_added,
        }
    }
}

/// Summary of one command run. Commands that do not solve anything report
/// `SAT` on success.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub command: String,
    pub status: ReportStatus,
    pub elapsed_ms: u64,
    pub peak_memory_bytes: Option<u64>,
    pub stats: ReportStats,
    pub outputs: Vec<String>,
    pub oracle_agreement: Option<bool>,
}

impl RunReport {
    pub fn new(command: impl Into<String>) -> Self {
        RunReport {
            command: command.into(),
            status: ReportStatus::Sat,
            elapsed_ms: 0,
            peak_memory_bytes: None,
            stats: ReportStats::default(),
            outputs: Vec::new(),
            oracle_agreement: None,
        }
    }

    pub fn exit_code(&self) -> i32 {
        self.status.exit_code()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

/// Peak resident set size of this process in bytes, where the platform
/// exposes it.
pub fn peak_memory_bytes() -> Option<u64> {
    let status = std::fs::read_to_string("/proc/self/status").ok()?;
    let line = status.lines().find(|l| l.starts_with("VmHWM:"))?;
    let kb: u64 = line.split_whitespace().nth(1)?.parse().ok()?;
    Some(kb * 1024)
}

/// Milliseconds since construction.
pub struct WallClock {
    start: Instant,
}

impl WallClock {
    pub fn start() -> Self {
        WallClock { start: Instant::now() }
    }

    pub fn elapsed(&self) -> Duration {
        self.start.elapsed()
    }
}

impl Clock for WallClock {
    fn elapsed_ms(&mut self) -> u64 {
        self.start.elapsed().as_millis() as u64
    }
}

pub const TIME_BUDGET_ENV: &str = "QUALC_TIME_BUDGET_S";

/// Budget in milliseconds from an explicit value in seconds, else from
/// [`TIME_BUDGET_ENV`].
pub fn time_budget_ms(explicit_s: Option<f64>) -> Result<Option<u64>, String> {
    let secs = match explicit_s {
        Some(s) => Some(s),
        None => match std::env::var(TIME_BUDGET_ENV) {
            Ok(v) if !v.trim().is_empty() => Some(
                v.trim()
                    .parse::<f64>()
                    .map_err(|_| format!("{TIME_BUDGET_ENV}=`{v}` is not a number of seconds"))?,
            ),
            _ => None,
        },
    };
    match secs {
        Some(s) if !s.is_finite() || s < 0.0 => Err(format!("invalid time budget {s}")),
        Some(s) => Ok(Some((s * 1000.0).round() as u64)),
        None => Ok(None),
    }
}
