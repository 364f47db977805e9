//! The `check`, `lint`, `ir` and `run` commands.
//!
//! Each command writes results to `out`, diagnostics and errors to `err`, and
//! returns the process exit status.

use std::io::Write;
use std::path::Path;

use crate::diagnostic::render_all;
use crate::runtime::{lower, ActuationCommand, Monitor, MonitorConfig, RuleTable};
use crate::sema::{lint, TypedProgram};
use crate::sensors::{load_scenario, ExpectedCommand};

/// Speed tolerance in m/s when comparing against a scenario's expectations.
pub const SPEED_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExitStatus {
    Success,
    /// The program has compile errors.
    Diagnostics,
    /// An input could not be read or is malformed.
    Input,
    /// A scenario tick disagreed with its `expected` entry.
    Mismatch,
}

impl ExitStatus {
    pub fn code(self) -> i32 {
        match self {
            ExitStatus::Success => 0,
            ExitStatus::Diagnostics => 1,
            ExitStatus::Input => 2,
            ExitStatus::Mismatch => 3,
        }
    }
}

#[derive(Debug, Clone, Default)]
pub struct RunOptions<'a> {
    pub config: Option<&'a Path>,
    /// Suppresses the per-tick trace lines.
    pub quiet: bool,
}

// Write failures on the output streams are ignored: there is nowhere left
// to report them.
macro_rules! emit {
    ($w:expr, $($arg:tt)*) => {
        let _ = writeln!($w, $($arg)*);
    };
}

fn compile_file(path: &Path, err: &mut dyn Write) -> Result<TypedProgram, ExitStatus> {
    let display = path.display().to_string();
    let source = match std::fs::read_to_string(path) {
        Ok(s) => s,
        Err(e) => {
            emit!(err, "E-IO: {display}: {e}");
            return Err(ExitStatus::Input);
        }
    };
    crate::compile(&display, &source).map_err(|diags| {
        let _ = err.write_all(render_all(&diags, &display).as_bytes());
        ExitStatus::Diagnostics
    })
}

fn load_table(
    typed: &TypedProgram,
    config: Option<&Path>,
    err: &mut dyn Write,
) -> Result<RuleTable, ExitStatus> {
    let config = match config {
        Some(path) => MonitorConfig::load(path).map_err(|e| {
            emit!(err, "{e}");
            ExitStatus::Input
        })?,
        None => MonitorConfig::default(),
    };
    lower(typed, &config).map_err(|e| {
        emit!(err, "{e}");
        ExitStatus::Input
    })
}

pub fn cmd_check(program: &Path, _out: &mut dyn Write, err: &mut dyn Write) -> ExitStatus {
    match compile_file(program, err) {
        Ok(_) => ExitStatus::Success,
        Err(status) => status,
    }
}

/// Warnings go to `out` and never change the exit status.
pub fn cmd_lint(program: &Path, out: &mut dyn Write, err: &mut dyn Write) -> ExitStatus {
    let typed = match compile_file(program, err) {
        Ok(t) => t,
        Err(status) => return status,
    };
    let report = lint(&typed);
    let _ = out.write_all(render_all(&report.warnings, &program.display().to_string()).as_bytes());
    ExitStatus::Success
}

pub fn cmd_ir(
    program: &Path,
    config: Option<&Path>,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> ExitStatus {
    let table = match compile_file(program, err).and_then(|t| load_table(&t, config, err)) {
        Ok(t) => t,
        Err(status) => return status,
    };
    let _ = out.write_all(table.dump().as_bytes());
    ExitStatus::Success
}

/// `t=<s> speed=<m/s> stop=<0|1> sounds=[..] fired=[g.c,..] faults=[..]`
pub fn trace_line(timestamp: f64, cmd: &ActuationCommand) -> String {
    let fired: Vec<String> = cmd.fired.iter().map(|c| c.to_string()).collect();
    let faults: Vec<String> = cmd.faults.iter().map(|f| f.to_string()).collect();
    format!(
        "t={} speed={} stop={} sounds=[{}] fired=[{}] faults=[{}]",
        timestamp,
        cmd.speed,
        u8::from(cmd.stop),
        cmd.sound_labels().join(","),
        fired.join(","),
        faults.join(",")
    )
}

fn matches(expected: &ExpectedCommand, got: &ActuationCommand) -> bool {
    expected.stop == got.stop
        && (expected.speed - got.speed).abs() <= SPEED_TOLERANCE
        && expected
            .sounds
            .iter()
            .map(String::as_str)
            .eq(got.sound_labels())
}

fn summary(stop: bool, speed: f64, sounds: &[&str]) -> String {
    format!(
        "stop={} speed={} sounds=[{}]",
        u8::from(stop),
        speed,
        sounds.join(",")
    )
}

pub fn cmd_run(
    program: &Path,
    scenario: &Path,
    options: &RunOptions<'_>,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> ExitStatus {
    let table = match compile_file(program, err).and_then(|t| load_table(&t, options.config, err)) {
        Ok(t) => t,
        Err(status) => return status,
    };
    let scenario = match load_scenario(scenario) {
        Ok(s) => s,
        Err(e) => {
            emit!(err, "{e}");
            return ExitStatus::Input;
        }
    };
    let monitor = Monitor::new(table);
    for (i, tick) in scenario.ticks.iter().enumerate() {
        let cmd = monitor.step(tick);
        if !options.quiet {
            emit!(out, "{}", trace_line(tick.timestamp(), &cmd));
        }
        let Some(expected) = scenario.expected.as_ref().map(|e| &e[i]) else {
            continue;
        };
        if !matches(expected, &cmd) {
            let want: Vec<&str> = expected.sounds.iter().map(String::as_str).collect();
            emit!(
                err,
                "mismatch at tick {i} (t={}): expected {}, got {}",
                tick.timestamp(),
                summary(expected.stop, expected.speed, &want),
                summary(cmd.stop, cmd.speed, &cmd.sound_labels())
            );
            return ExitStatus::Mismatch;
        }
    }
    ExitStatus::Success
}
