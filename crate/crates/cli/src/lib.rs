//! The `sleec` command line and HTTP service.

pub mod request;
pub mod service;

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;
use sleec_core::diagnostics::{render, Format, RenderMode};
use sleec_core::engine::Status;
use sleec_core::sema::{analyze, Analysis, Diagnostic};
use sleec_core::syntax::pretty_print;

use request::{run, BoundsOverride, CheckRequest, Selector};

pub const EXIT_OK: i32 = 0;
pub const EXIT_ISSUES: i32 = 1;
pub const EXIT_ERROR: i32 = 2;

#[derive(Parser, Debug)]
#[command(name = "sleec", version, about = "Parse, format and check SLEEC rule documents")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Report parse and semantic diagnostics.
    Parse {
        file: PathBuf,
        #[arg(long)]
        json: bool,
    },
    /// Print the document in canonical layout.
    Fmt { file: PathBuf },
    /// Run well-formedness checks.
    Check {
        file: PathBuf,
        #[arg(long, default_value = "all")]
        property: String,
        /// Rule, concern or purpose id; every applicable target when omitted.
        #[arg(long, visible_alias = "target")]
        rule: Option<String>,
        #[arg(long)]
        max_points: Option<usize>,
        #[arg(long)]
        horizon: Option<u64>,
        /// Search node budget.
        #[arg(long)]
        budget: Option<u64>,
        #[arg(long, value_enum, default_value_t = Mode::Filtered)]
        mode: Mode,
        #[arg(long)]
        json: bool,
    },
    /// Serve the HTTP API.
    Serve {
        /// Defaults to $SLEEC_PORT, then 8077.
        #[arg(long)]
        port: Option<u16>,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Mode {
    Raw,
    Filtered,
}

impl From<Mode> for RenderMode {
    fn from(m: Mode) -> Self {
        match m {
            Mode::Raw => RenderMode::Raw,
            Mode::Filtered => RenderMode::Filtered,
        }
    }
}

fn read(path: &Path, err: &mut dyn Write) -> Option<String> {
    match std::fs::read_to_string(path) {
        Ok(s) => Some(s),
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => {
            let _ = writeln!(err, "error: file not found: {}", path.display());
            None
        }
        Err(e) => {
            let _ = writeln!(err, "error: cannot read {}: {e}", path.display());
            None
        }
    }
}

fn report(path: &Path, diags: &[Diagnostic], err: &mut dyn Write) {
    for d in diags {
        let sev = match d.severity {
            sleec_core::syntax::Severity::Error => "error",
            sleec_core::syntax::Severity::Warning => "warning",
        };
        let _ = writeln!(
            err,
            "{}:{}:{}: {sev}[{}]: {}",
            path.display(),
            d.span.start_pos.line,
            d.span.start_pos.column,
            d.code,
            d.message
        );
    }
}

fn json_line(out: &mut dyn Write, v: &serde_json::Value) {
    let _ = writeln!(out, "{}", serde_json::to_string_pretty(v).expect("JSON value"));
}

fn parse_cmd(path: &Path, as_json: bool, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let Some(text) = read(path, err) else { return EXIT_ERROR };
    let a = analyze(&text);
    if as_json {
        json_line(
            out,
            &json!({"diagnostics": a.diagnostics(), "symbols": service::symbols(&a.table)}),
        );
    }
    report(path, &a.diagnostics(), err);
    if a.has_errors() {
        EXIT_ERROR
    } else {
        EXIT_OK
    }
}

fn fmt_cmd(path: &Path, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let Some(text) = read(path, err) else { return EXIT_ERROR };
    let a: Analysis = analyze(&text);
    if !a.parse_diagnostics.is_empty() {
        report(path, &a.diagnostics(), err);
        return EXIT_ERROR;
    }
    let _ = write!(out, "{}", pretty_print(&a.document));
    EXIT_OK
}

fn check_cmd(path: &Path, req: CheckRequest, as_json: bool, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let outcome = match run(&req) {
        Ok(o) => o,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            return EXIT_ERROR;
        }
    };
    report(path, &outcome.analysis.diagnostics(), err);
    if as_json {
        json_line(out, &outcome.to_json());
    }
    if outcome.has_errors() {
        return EXIT_ERROR;
    }
    let model = outcome.model.as_ref().expect("model without errors");
    if !as_json {
        for (v, d) in &outcome.results {
            let status = match v.status {
                Status::IssueFound => "issue found",
                Status::NoIssueWithinBounds => "no issue within bounds",
            };
            let mut line = format!("{} {}: {status}", v.property, v.target);
            if v.budget_exhausted {
                line.push_str(" (budget exhausted)");
            }
            let _ = writeln!(out, "{line}");
            if let Some(d) = d {
                for l in render(d, model, req.mode, Format::Text).lines() {
                    let _ = writeln!(out, "  {l}");
                }
            }
        }
    }
    if outcome.has_issues() {
        EXIT_ISSUES
    } else {
        EXIT_OK
    }
}

fn port_from_env() -> u16 {
    std::env::var("SLEEC_PORT")
        .ok()
        .and_then(|p| p.parse().ok())
        .unwrap_or(service::DEFAULT_PORT)
}

/// Runs the command line and returns the process exit code.
pub fn cli_main<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = e.exit_code();
            let text = e.render().to_string();
            let _ = if code == 0 {
                write!(out, "{text}")
            } else {
                write!(err, "{text}")
            };
            return if code == 0 { EXIT_OK } else { EXIT_ERROR };
        }
    };
    match cli.command {
        Command::Parse { file, json } => parse_cmd(&file, json, out, err),
        Command::Fmt { file } => fmt_cmd(&file, out, err),
        Command::Check {
            file,
            property,
            rule,
            max_points,
            horizon,
            budget,
            mode,
            json,
        } => {
            let Some(property) = Selector::parse(&property) else {
                let _ = writeln!(
                    err,
                    "error: unknown property '{property}' (expected vacuous, situational, redundant, restrictive, insufficient or all)"
                );
                return EXIT_ERROR;
            };
            let Some(text) = read(&file, err) else {
                return EXIT_ERROR;
            };
            let req = CheckRequest {
                text,
                property,
                target: rule,
                bounds: BoundsOverride {
                    max_points,
                    horizon,
                    budget,
                },
                mode: mode.into(),
            };
            check_cmd(&file, req, json, out, err)
        }
        Command::Serve { port } => {
            let port = port.unwrap_or_else(port_from_env);
            let rt = match tokio::runtime::Runtime::new() {
                Ok(rt) => rt,
                Err(e) => {
                    let _ = writeln!(err, "error: {e}");
                    return EXIT_ERROR;
                }
            };
            let _ = writeln!(err, "listening on port {port}");
            match rt.block_on(service::serve(port)) {
                Ok(()) => EXIT_OK,
                Err(e) => {
                    let _ = writeln!(err, "error: {e}");
                    EXIT_ERROR
                }
            }
        }
    }
}
