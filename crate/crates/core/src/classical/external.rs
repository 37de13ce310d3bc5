//! Runs an external LP solver on a standard-form instance written as MPS.

use std::io::Read;
use std::path::Path;
use std::process::{Command, Stdio};
use std::thread;
use std::time::{Duration, Instant};

use regex::Regex;
use serde::{Deserialize, Serialize};
use wait_timeout::ChildExt;

use super::{SolveOutcome, SolveStatus, SolverKind};
use crate::lp::mps::emit_mps;
use crate::lp::StandardLp;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ExternalConfig {
    /// Shell command; `{mps}` is replaced by the quoted instance path.
    pub command_template: String,
    pub timeout_s: f64,
    /// Regex whose first capture group is the objective value.
    pub objective_pattern: String,
    /// Regex whose first capture group names the status
    /// (`optimal`, `infeasible`, `unbounded`, case-insensitive).
    pub status_pattern: String,
    /// Label used in reports.
    pub name: String,
}

impl Default for ExternalConfig {
    fn default() -> Self {
        ExternalConfig {
            command_template: String::new(),
            timeout_s: 600.0,
            objective_pattern: r"(?i)objective(?:\s+value)?\s*[:=]?\s*([-+]?(?:\d+\.?\d*|\.\d+)(?:[eE][-+]?\d+)?)"
                .to_string(),
            status_pattern: r"(?i)\b(optimal|infeasible|unbounded)\b".to_string(),
            name: "external".to_string(),
        }
    }
}

fn shell_quote(s: &str) -> String {
    format!("'{}'", s.replace('\'', r"'\''"))
}

fn drain<R: Read + Send + 'static>(r: Option<R>) -> thread::JoinHandle<String> {
    thread::spawn(move || {
        let mut out = String::new();
        if let Some(mut r) = r {
            let mut buf = Vec::new();
            let _ = r.read_to_end(&mut buf);
            out = String::from_utf8_lossy(&buf).into_owned();
        }
        out
    })
}

/// Kills the shell together with every process in its group.
fn kill_tree(child: &mut std::process::Child) {
    #[cfg(unix)]
    {
        let group = format!("-{}", child.id());
        let _ = Command::new("kill").args(["-KILL", "--", &group]).status();
    }
    let _ = child.kill();
}

/// Writes `std` to `workdir/instance.mps`, runs the command and parses its
/// output. `wall_time_s` covers the subprocess only.
pub fn solve_external(std: &StandardLp, cfg: &ExternalConfig, workdir: &Path) -> SolveOutcome {
    let kind = SolverKind::External(cfg.name.clone());
    if !cfg.command_template.contains("{mps}") {
        return SolveOutcome::failed(kind, "command template lacks the {mps} placeholder");
    }
    let (obj_re, status_re) = match (Regex::new(&cfg.objective_pattern), Regex::new(&cfg.status_pattern)) {
        (Ok(a), Ok(b)) => (a, b),
        (Err(e), _) | (_, Err(e)) => return SolveOutcome::failed(kind, format!("invalid pattern: {e}")),
    };
    let ser_start = Instant::now();
    let path = workdir.join("instance.mps");
    if let Err(e) = std::fs::write(&path, emit_mps(&std.to_general("INSTANCE"))) {
        return SolveOutcome::failed(kind, format!("cannot write {}: {e}", path.display()));
    }
    let serialization_time_s = Some(ser_start.elapsed().as_secs_f64());
    let command = cfg.command_template.replace("{mps}", &shell_quote(&path.to_string_lossy()));

    let start = Instant::now();
    let mut cmd = Command::new("sh");
    cmd.arg("-c").arg(&command).current_dir(workdir).stdin(Stdio::null()).stdout(Stdio::piped()).stderr(Stdio::piped());
    #[cfg(unix)]
    std::os::unix::process::CommandExt::process_group(&mut cmd, 0);
    let child = cmd.spawn();
    let mut child = match child {
        Ok(c) => c,
        Err(e) => {
            let mut o = SolveOutcome::failed(kind, format!("cannot spawn solver: {e}"));
            o.serialization_time_s = serialization_time_s;
            return o;
        }
    };
    let out_h = drain(child.stdout.take());
    let err_h = drain(child.stderr.take());
    let timeout = Duration::from_secs_f64(cfg.timeout_s.max(0.0));
    let waited = child.wait_timeout(timeout);
    let timed_out = matches!(waited, Ok(None));
    if timed_out {
        kill_tree(&mut child);
        let _ = child.wait();
    }
    let wall_time_s = start.elapsed().as_secs_f64();
    let stdout = out_h.join().unwrap_or_default();
    let stderr = err_h.join().unwrap_or_default();
    let output = format!("{stdout}{stderr}");
    let base = SolveOutcome {
        status: SolveStatus::Error,
        objective: None,
        iterations: 0,
        wall_time_s,
        solver: kind,
        serialization_time_s,
        message: None,
        output: Some(output.clone()),
    };
    let exit = match waited {
        Err(e) => return SolveOutcome { message: Some(format!("wait failed: {e}")), ..base },
        Ok(None) => return SolveOutcome { message: Some(format!("timed out after {} s", cfg.timeout_s)), ..base },
        Ok(Some(status)) => status,
    };
    if !exit.success() {
        return SolveOutcome { message: Some(format!("solver exited with {exit}: {}", stderr.trim())), ..base };
    }
    let status = match status_re.captures(&output).and_then(|c| c.get(1)) {
        Some(m) => match m.as_str().to_ascii_lowercase().as_str() {
            "infeasible" => SolveStatus::Infeasible,
            "unbounded" => SolveStatus::Unbounded,
            _ => SolveStatus::Optimal,
        },
        None => SolveStatus::Optimal,
    };
    if status != SolveStatus::Optimal {
        return SolveOutcome { status, ..base };
    }
    match obj_re.captures(&output).and_then(|c| c.get(1)).and_then(|m| m.as_str().parse::<f64>().ok()) {
        Some(v) => SolveOutcome { status, objective: Some(std.reported_objective(v)), ..base },
        None => SolveOutcome { message: Some("objective value not found in solver output".into()), ..base },
    }
}
