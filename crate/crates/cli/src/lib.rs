//! Command implementations for the `pcuic` binary.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use pcuic::driver::{DeclOutcome, ErrorReport, Report, Session};
use pcuic::oracle::config::{run_config, OracleConfig};
use pcuic::surface::{parse, parse_term, ParseError};
use pcuic::{Kernel, KernelConfig, TypeError};

pub const EXIT_OK: i32 = 0;
pub const EXIT_TYPE_ERROR: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "pcuic", version, about = "Type checker for pCuIC source files")]
pub struct Cli {
    /// Continue after a failing declaration.
    #[arg(long, global = true)]
    pub keep_going: bool,
    /// Print a machine-readable JSON report on standard output.
    #[arg(long, global = true)]
    pub json: bool,
    /// Reduction step budget per declaration.
    #[arg(long, global = true, value_name = "N")]
    pub fuel: Option<u64>,
    /// Check application arguments by conversion, without subsumption.
    #[arg(long, global = true)]
    pub strict_app: bool,
    /// Print the rules used by successful subtyping checks.
    #[arg(long, global = true)]
    pub trace_subtyping: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check every declaration of a file.
    Check { file: PathBuf },
    /// Normalise an expression in the context of a file.
    Eval {
        file: PathBuf,
        #[arg(short = 'e', value_name = "EXPR")]
        expr: String,
    },
    /// Decide judgemental equality of two expressions.
    Conv {
        file: PathBuf,
        #[arg(short = 'e', value_name = "EXPR", num_args = 1, required = true)]
        exprs: Vec<String>,
    },
    /// Decide subtyping between two types.
    Sub {
        file: PathBuf,
        #[arg(short = 'e', value_name = "EXPR", num_args = 1, required = true)]
        exprs: Vec<String>,
    },
    /// Run the set-theoretic oracle described by a configuration file.
    Oracle { config: PathBuf },
}

impl Cli {
    fn kernel_config(&self) -> KernelConfig {
        let mut c = KernelConfig::default();
        if let Some(f) = self.fuel {
            c.fuel = f;
        }
        c.strict_app = self.strict_app;
        c
    }
}

/// Runs a parsed command line, writing results to `out` and diagnostics to
/// `err`. Returns the process exit code.
pub fn run(cli: &Cli, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    match &cli.command {
        Command::Check { file } => cmd_check(cli, file, out, err),
        Command::Eval { file, expr } => cmd_query(cli, file, &[expr.clone()], Query::Eval, out, err),
        Command::Conv { file, exprs } => cmd_query(cli, file, exprs, Query::Conv, out, err),
        Command::Sub { file, exprs } => cmd_query(cli, file, exprs, Query::Sub, out, err),
        Command::Oracle { config } => cmd_oracle(config, out, err),
    }
}

fn read(path: &Path, err: &mut dyn Write) -> Option<String> {
    match fs::read_to_string(path) {
        Ok(s) => Some(s),
        Err(e) => {
            let _ = writeln!(err, "error: cannot read {}: {e}", path.display());
            None
        }
    }
}

fn report_parse_error(path: &Path, e: &ParseError, err: &mut dyn Write) {
    let _ = writeln!(err, "{}:{}:{}: parse error: {}", path.display(), e.line, e.col, e.message);
}

fn report_type_error(path: &Path, session: &Session, e: &TypeError, err: &mut dyn Write) {
    let r = ErrorReport::new(&session.ctx, e);
    let pos = e
        .span
        .map(|s| format!("{}:{}:", s.line, s.col))
        .unwrap_or_default();
    let _ = writeln!(err, "{}:{pos} error[{}]: {}", path.display(), r.kind, r.message);
    if let Some(c) = &r.culprit {
        let _ = writeln!(err, "  in: {c}");
    }
    if let (Some(x), Some(y)) = (&r.expected, &r.actual) {
        let _ = writeln!(err, "  expected: {x}");
        let _ = writeln!(err, "    actual: {y}");
    }
    let mut src = e.source.as_deref();
    while let Some(s) = src {
        let _ = writeln!(err, "  caused by: {}", ErrorReport::new(&session.ctx, s).message);
        if let (Some(x), Some(y)) = (&s.expected, &s.actual) {
            let _ = writeln!(err, "    expected: {}", session.print(x));
            let _ = writeln!(err, "      actual: {}", session.print(y));
        }
        src = s.source.as_deref();
    }
}

/// Checks a file; returns the session and outcomes, or an exit code for a
/// read or parse failure.
fn load(
    cli: &Cli,
    path: &Path,
    err: &mut dyn Write,
) -> Result<(Session, Vec<DeclOutcome>), (i32, Option<Report>)> {
    let text = read(path, err).ok_or((EXIT_USAGE, None))?;
    let file = parse(&text).map_err(|e| {
        report_parse_error(path, &e, err);
        (EXIT_USAGE, Some(Report::from_parse_error(&path.display().to_string(), &e)))
    })?;
    let mut session = Session::new(cli.kernel_config());
    let outcomes = session.run(&file, cli.keep_going);
    Ok((session, outcomes))
}

fn cmd_check(cli: &Cli, path: &Path, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let (session, outcomes) = match load(cli, path, err) {
        Ok(x) => x,
        Err((code, report)) => {
            if let (true, Some(r)) = (cli.json, report) {
                let _ = writeln!(out, "{}", serde_json::to_string_pretty(&r).expect("serialisable"));
            }
            return code;
        }
    };
    for o in &outcomes {
        match &o.result {
            Ok(Some(s)) if !cli.json => {
                let _ = write!(out, "{s}");
                if let (true, Some(t)) = (cli.trace_subtyping, &o.trace) {
                    let rules: Vec<&str> = t.iter().map(|r| r.as_str()).collect();
                    let _ = write!(out, "  [{}]", rules.join(", "));
                }
                let _ = writeln!(out);
            }
            Ok(_) => {}
            Err(e) => report_type_error(path, &session, e, err),
        }
    }
    let report = Report::new(&path.display().to_string(), &session.ctx, &outcomes);
    if cli.json {
        let _ = writeln!(out, "{}", serde_json::to_string_pretty(&report).expect("serialisable"));
    }
    if report.ok {
        EXIT_OK
    } else {
        EXIT_TYPE_ERROR
    }
}

#[derive(Clone, Copy)]
enum Query {
    Eval,
    Conv,
    Sub,
}

fn cmd_query(
    cli: &Cli,
    path: &Path,
    exprs: &[String],
    q: Query,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> i32 {
    let want = match q {
        Query::Eval => 1,
        Query::Conv | Query::Sub => 2,
    };
    if exprs.len() != want {
        let _ = writeln!(err, "error: expected {want} expression(s), got {}", exprs.len());
        return EXIT_USAGE;
    }
    let (session, outcomes) = match load(cli, path, err) {
        Ok(x) => x,
        Err((code, _)) => return code,
    };
    if let Some(o) = outcomes.iter().find(|o| !o.is_ok()) {
        report_type_error(path, &session, o.result.as_ref().unwrap_err(), err);
        return EXIT_TYPE_ERROR;
    }
    let scope = session.scope();
    let mut terms = Vec::new();
    for e in exprs {
        match parse_term(&scope, e) {
            Ok(t) => terms.push(t),
            Err(pe) => {
                let _ = writeln!(err, "<expression>:{}:{}: parse error: {}", pe.line, pe.col, pe.message);
                return EXIT_USAGE;
            }
        }
    }
    let k: &Kernel = &session.kernel;
    k.refuel();
    let ctx = &session.ctx;
    let result: Result<(String, bool, Option<Vec<String>>), TypeError> = (|| {
        for t in &terms {
            k.infer(ctx, t)?;
        }
        Ok(match q {
            Query::Eval => (session.print(&k.normalize(ctx, &terms[0])?), true, None),
            Query::Conv => {
                let v = k.conv(ctx, &terms[0], &terms[1])?;
                (v.to_string(), v, None)
            }
            Query::Sub => {
                let v = k.subtype(ctx, &terms[0], &terms[1])?;
                let trace = v.trace.iter().map(|r| r.as_str().to_owned()).collect();
                let text = match (v.holds, v.failure) {
                    (false, Some(f)) => format!("false ({})", f.slug()),
                    (h, _) => h.to_string(),
                };
                (text, v.holds, Some(trace))
            }
        })
    })();
    match result {
        Ok((text, holds, trace)) => {
            if cli.json {
                let v = serde_json::json!({ "ok": holds, "result": text, "trace": trace });
                let _ = writeln!(out, "{}", serde_json::to_string_pretty(&v).expect("serialisable"));
            } else {
                let _ = write!(out, "{text}");
                if let (true, Some(t)) = (cli.trace_subtyping, &trace) {
                    let _ = write!(out, "  [{}]", t.join(", "));
                }
                let _ = writeln!(out);
            }
            if holds {
                EXIT_OK
            } else {
                EXIT_TYPE_ERROR
            }
        }
        Err(e) => {
            report_type_error(Path::new("<expression>"), &session, &e, err);
            if cli.json {
                let v = serde_json::json!({ "ok": false, "error": ErrorReport::new(ctx, &e) });
                let _ = writeln!(out, "{}", serde_json::to_string_pretty(&v).expect("serialisable"));
            }
            EXIT_TYPE_ERROR
        }
    }
}

fn cmd_oracle(path: &Path, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let Some(text) = read(path, err) else {
        return EXIT_USAGE;
    };
    let config = match OracleConfig::parse(&text) {
        Ok(c) => c,
        Err(e) => {
            let _ = writeln!(err, "{}: {e}", path.display());
            return EXIT_USAGE;
        }
    };
    let base = path.parent().unwrap_or(Path::new("."));
    match run_config(&config, base) {
        Ok(summary) => {
            let _ = write!(out, "{}", summary.text);
            if summary.all_agree {
                EXIT_OK
            } else {
                EXIT_TYPE_ERROR
            }
        }
        Err(e) => {
            let _ = writeln!(err, "{}: {e}", path.display());
            if e.is_usage() {
                EXIT_USAGE
            } else {
                EXIT_TYPE_ERROR
            }
        }
    }
}
