//! The `locext` command line: every verb reads states from files or names and
//! writes JSON or text.

pub mod acceptance;
pub mod args;
pub mod cert;
pub mod error;
pub mod input;
pub mod plot;
pub mod verbs;

use std::ffi::OsString;
use std::io::Write;

use clap::Parser;

use crate::args::{Cli, Global, Verb};
use crate::error::CliError;
use crate::verbs::Output;

pub fn execute(cli: &Cli) -> Result<Output, CliError> {
    let g = &cli.global;
    match &cli.verb {
        Verb::Build => verbs::build(g),
        Verb::PptCheck => verbs::ppt_check(g),
        Verb::Extend(a) => verbs::extend(g, a),
        Verb::CertifySn(a) => verbs::certify_sn(g, a),
        Verb::Extremal(a) => verbs::extremal(g, a),
        Verb::Sample(a) => verbs::sample(g, a),
        Verb::Survey(a) => verbs::survey(g, a),
        Verb::Verify(a) => verbs::verify(a),
        Verb::Reproduce => verbs::reproduce(g),
        Verb::Plot(a) => verbs::plot_verb(g, a),
    }
}

fn emit(g: &Global, out: &Output) -> Result<(), CliError> {
    let body = if out.artifact || g.json {
        serde_json::to_string_pretty(&out.json).expect("serializable") + "\n"
    } else {
        out.text.clone()
    };
    if out.artifact {
        eprint!("{}", if out.text.ends_with('\n') { out.text.clone() } else { out.text.clone() + "\n" });
    }
    match &g.out {
        Some(path) => std::fs::write(path, body).map_err(|e| CliError::input("--out", format!("{}: {e}", path.display()))),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(body.as_bytes()).map_err(|e| CliError::input("--out", format!("stdout: {e}")))
        }
    }
}

/// Parses `argv`, runs the verb and returns the exit code: 0 for a verdict,
/// 1 for an inconclusive result, 2 for an input error.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match execute(&cli).and_then(|out| emit(&cli.global, &out).map(|()| out.status)) {
        Ok(status) => status.code(),
        Err(e) => {
            eprintln!("error: {e}");
            2
        }
    }
}
