//! Command-line front end for `sugeno_hh`.
//!
//! Exit codes: 0 when every requested verdict passes, 2 when a verdict
//! fails (hypothesis check, bound margin or golden mismatch), 3 when a bound
//! equation has no root, 1 for usage, parse and other errors.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod args;
pub mod commands;
pub mod expr;
pub mod golden;
pub mod report;

use std::ffi::OsString;
use std::io::Write;

use clap::error::ErrorKind;
use clap::Parser;

use crate::args::{Cli, Command, Format};
use crate::commands::{CliError, Outcome, Output};

pub const EXIT_OK: i32 = 0;
pub const EXIT_ERROR: i32 = 1;
pub const EXIT_VERDICT: i32 = 2;
pub const EXIT_NO_ROOT: i32 = 3;

/// The JSON schema every report validates against.
pub const REPORT_SCHEMA: &str = include_str!("../schema/run_report.schema.json");

fn shell_quote(s: &str) -> String {
    let plain = !s.is_empty()
        && s.chars()
            .all(|c| c.is_ascii_alphanumeric() || "-_.,:/^=+".contains(c));
    if plain {
        s.to_string()
    } else {
        format!("'{}'", s.replace('\'', r"'\''"))
    }
}

fn render(outcome: &Outcome, format: Format) -> String {
    match (&outcome.output, format) {
        (Output::Csv(s), _) => s.clone(),
        (Output::Report(r), Format::Json) => r.to_json() + "\n",
        (Output::Report(r), Format::Text) => r.to_text(),
        (Output::Reports(rs), Format::Json) => {
            serde_json::to_string_pretty(rs).expect("reports serialize") + "\n"
        }
        (Output::Reports(rs), Format::Text) => rs
            .iter()
            .map(|r| r.to_text())
            .collect::<Vec<_>>()
            .join("\n"),
    }
}

fn dispatch(cli: &Cli, echo: String) -> Result<(Outcome, args::Output), CliError> {
    Ok(match &cli.command {
        Command::Integrate(c) => (commands::integrate(c, echo)?, c.output.clone()),
        Command::Check(c) => (commands::check(c, echo)?, c.output.clone()),
        Command::Bound(b) => (commands::bound(b, echo)?, b.common.output.clone()),
        Command::Reproduce(r) => (commands::reproduce(r, echo)?, r.output.clone()),
        Command::Sweep(s) => (commands::sweep(s)?, s.common.output.clone()),
    })
}

/// Parses `argv`, runs the command and returns the process exit code.
pub fn run<I, T>(argv: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let argv: Vec<OsString> = argv.into_iter().map(Into::into).collect();
    let cli = match Cli::try_parse_from(&argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => EXIT_OK,
                _ => EXIT_ERROR,
            };
            let _ = if code == EXIT_OK {
                write!(stdout, "{}", e.render())
            } else {
                write!(stderr, "{}", e.render())
            };
            return code;
        }
    };
    let echo = argv
        .iter()
        .skip(1)
        .map(|a| shell_quote(&a.to_string_lossy()))
        .collect::<Vec<_>>()
        .join(" ");
    let (outcome, out) = match dispatch(&cli, echo) {
        Ok(x) => x,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            return e.exit_code();
        }
    };
    let text = render(&outcome, out.format);
    let written = match &out.out {
        Some(path) => std::fs::write(path, &text),
        None => stdout.write_all(text.as_bytes()),
    };
    if let Err(e) = written {
        let _ = writeln!(stderr, "error: {e}");
        return EXIT_ERROR;
    }
    if outcome.passed {
        EXIT_OK
    } else {
        EXIT_VERDICT
    }
}
