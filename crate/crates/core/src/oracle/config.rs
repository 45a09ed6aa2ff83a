//! Oracle run configurations.
//!
//! A configuration is a line-oriented `key = value` file; `#` starts a
//! comment. Keys:
//!
//! ```text
//! file  = nat.pcuic          # source file, relative to the configuration
//! depth = 5                  # number of fixpoint stages
//! block = Nat                # optional: block whose stages are reported
//! param = A                  # block parameter (repeatable, in order)
//! enum A = a b               # hypothesis A is {0, 1}; a is 0 and b is 1
//! agree = add two three      # compare oracle and normal form (repeatable)
//! ```

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use super::interp::Oracle;
use super::value::SetValue;
use super::OracleError;
use crate::conversion::Kernel;
use crate::driver::Session;
use crate::error::TypeError;
use crate::surface::{parse, parse_term, ParseError};
use crate::syntax::{Context, Entry, Name, Term};

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct OracleConfig {
    pub file: PathBuf,
    pub depth: usize,
    pub block: Option<String>,
    pub params: Vec<String>,
    pub enums: Vec<(String, Vec<String>)>,
    pub agree: Vec<String>,
}

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{path}:{}:{}: {}", .error.line, .error.col, .error.message)]
    Parse { path: PathBuf, error: ParseError },
    #[error("{path}: {error}")]
    Kernel { path: PathBuf, error: TypeError },
    #[error("{0}")]
    Invalid(String),
}

impl ConfigError {
    /// Whether the error is the caller's fault rather than the checked
    /// file's.
    pub fn is_usage(&self) -> bool {
        !matches!(self, ConfigError::Kernel { .. })
    }
}

impl OracleConfig {
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let mut c = OracleConfig::default();
        let mut file = None;
        let mut depth = None;
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let err = |message: String| ConfigError::Syntax { line: i + 1, message };
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| err("expected `key = value`".into()))?;
            let value = value.trim().to_owned();
            let mut key = key.split_whitespace();
            match (key.next(), key.next(), key.next()) {
                (Some("file"), None, _) => file = Some(PathBuf::from(value)),
                (Some("depth"), None, _) => {
                    depth = Some(value.parse().map_err(|_| err(format!("bad depth `{value}`")))?)
                }
                (Some("block"), None, _) => c.block = Some(value),
                (Some("param"), None, _) => c.params.push(value),
                (Some("agree"), None, _) => c.agree.push(value),
                (Some("enum"), Some(ty), None) => c.enums.push((
                    ty.to_owned(),
                    value.split_whitespace().map(str::to_owned).collect(),
                )),
                _ => return Err(err(format!("unknown key in `{line}`"))),
            }
        }
        c.file = file.ok_or_else(|| ConfigError::Invalid("missing `file`".into()))?;
        c.depth = depth.ok_or_else(|| ConfigError::Invalid("missing `depth`".into()))?;
        Ok(c)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OracleSummary {
    pub text: String,
    pub stages: Option<Vec<usize>>,
    pub closed: Option<bool>,
    /// One entry per `agree` line: the two values, or the oracle error.
    pub checks: Vec<Result<(SetValue, SetValue), OracleError>>,
    pub all_agree: bool,
}

/// Checks the configured file, reports the block stages and runs every
/// agreement check. `base` is the directory the file path is relative to.
pub fn run_config(config: &OracleConfig, base: &Path) -> Result<OracleSummary, ConfigError> {
    let path = base.join(&config.file);
    let text = fs::read_to_string(&path).map_err(|source| ConfigError::Io {
        path: path.clone(),
        source,
    })?;
    let file = parse(&text).map_err(|error| ConfigError::Parse {
        path: path.clone(),
        error,
    })?;
    let mut session = Session::default();
    for o in session.run(&file, false) {
        if let Err(error) = o.result {
            return Err(ConfigError::Kernel { path, error });
        }
    }
    let ctx = &session.ctx;
    let scope = session.scope();
    let kernel = &session.kernel;
    let term = |src: &str| -> Result<(Term, Term), ConfigError> {
        let t = parse_term(&scope, src).map_err(|error| ConfigError::Parse {
            path: PathBuf::from("<config>"),
            error,
        })?;
        kernel.refuel();
        let ty = kernel.infer(ctx, &t).map_err(|error| ConfigError::Kernel {
            path: PathBuf::from("<config>"),
            error,
        })?;
        Ok((t, ty))
    };

    let mut oracle = Oracle::new(ctx, config.depth);
    for (ty, elems) in &config.enums {
        let ty = Name::new(ty);
        check_enum(ctx, &ty, elems)?;
        let elems: Vec<Name> = elems.iter().map(|e| Name::new(e)).collect();
        oracle.assign_enum(ty, &elems);
    }

    let mut out = String::new();
    let mut all_agree = true;
    let (mut stages, mut closed) = (None, None);
    if let Some(b) = &config.block {
        let name = Name::new(b);
        let block = ctx
            .block(&name)
            .ok_or_else(|| ConfigError::Invalid(format!("unknown block `{b}`")))?;
        let mut params = Vec::new();
        for p in &config.params {
            let (t, _) = term(p)?;
            match oracle.eval_closed(&t) {
                Ok(v) => params.push(v),
                Err(e) => {
                    all_agree = false;
                    let _ = writeln!(out, "error[{}]: {e}", e.slug());
                }
            }
        }
        if params.len() == config.params.len() {
            match oracle.interp_block(&name, &params, config.depth) {
                Ok(bi) => {
                    let cards = bi.stages.cardinalities();
                    let _ = writeln!(out, "block {b} at depth {}", config.depth);
                    let _ = writeln!(out, "stages: {cards:?}");
                    let _ = writeln!(out, "closed: {}", if bi.stages.closed { "yes" } else { "no" });
                    for (i, (d, _)) in block.inds.iter().enumerate() {
                        let _ = writeln!(out, "{d}: {} elements", bi.member_count(i));
                    }
                    stages = Some(cards);
                    closed = Some(bi.stages.closed);
                }
                Err(e) => {
                    all_agree = false;
                    let _ = writeln!(out, "error[{}]: {e}", e.slug());
                }
            }
        }
    }

    let mut checks = Vec::new();
    for src in &config.agree {
        let (t, ty) = term(src)?;
        kernel.refuel();
        let nf = kernel.normalize(ctx, &t).map_err(|error| ConfigError::Kernel {
            path: PathBuf::from("<config>"),
            error,
        })?;
        let r = oracle
            .denote(&t, &ty)
            .and_then(|a| Ok((a, oracle.denote(&nf, &ty)?)));
        match &r {
            Ok((a, b)) if a == b => {
                let (a, b) = (render(kernel, ctx, a, &ty), render(kernel, ctx, b, &ty));
                let _ = writeln!(out, "agree: {a} = {b}");
            }
            Ok((a, b)) => {
                all_agree = false;
                let (a, b) = (render(kernel, ctx, a, &ty), render(kernel, ctx, b, &ty));
                let _ = writeln!(out, "disagree: {a} ≠ {b}  ({src})");
            }
            Err(e) => {
                all_agree = false;
                let _ = writeln!(out, "error[{}]: {e}  ({src})", e.slug());
            }
        }
        checks.push(r);
    }
    Ok(OracleSummary {
        text: out,
        stages,
        closed,
        checks,
        all_agree,
    })
}

fn check_enum(ctx: &Context, ty: &Name, elems: &[String]) -> Result<(), ConfigError> {
    match ctx.lookup(ty) {
        Some(Entry::Hyp {
            ty: Term::Sort(_), ..
        }) => {}
        _ => {
            return Err(ConfigError::Invalid(format!(
                "`{ty}` is not a hypothesis whose type is a sort"
            )))
        }
    }
    for e in elems {
        match ctx.lookup(&Name::new(e)) {
            Some(Entry::Hyp { ty: Term::Var(t), .. }) if t == ty => {}
            _ => {
                return Err(ConfigError::Invalid(format!(
                    "`{e}` is not a hypothesis of type `{ty}`"
                )))
            }
        }
    }
    Ok(())
}

/// Prints values of a natural-number-like type (one constant and one unary
/// recursive constructor) as numerals.
pub fn render(kernel: &Kernel, ctx: &Context, v: &SetValue, ty: &Term) -> String {
    let numeral = || -> Option<usize> {
        let head = kernel.whnf(ctx, ty).ok()?;
        let Term::Ind(r) = head.unapply().0 else { return None };
        let block = ctx.block(&r.block)?;
        let arity: Vec<usize> = block
            .constrs
            .iter()
            .map(|(_, t)| crate::inductive::pi_count(t) - block.params)
            .collect();
        if block.inds.len() != 1 || arity.len() != 2 || block.params != 0 {
            return None;
        }
        let (z, s) = match arity[..] {
            [0, 1] => (0, 1),
            [1, 0] => (1, 0),
            _ => return None,
        };
        let mut n = 0;
        let mut cur = v;
        loop {
            match cur {
                SetValue::Tag(k, xs) if *k == z && xs.is_empty() => return Some(n),
                SetValue::Tag(k, xs) if *k == s && xs.len() == 1 => {
                    n += 1;
                    cur = &xs[0];
                }
                _ => return None,
            }
        }
    };
    match numeral() {
        Some(n) => n.to_string(),
        None => v.to_string(),
    }
}
