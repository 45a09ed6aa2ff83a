//! Processing of whole source files: threads the context through the
//! declarations and collects a per-declaration report.

use std::time::{Duration, Instant};

use serde::Serialize;

use crate::conversion::{Kernel, KernelConfig};
use crate::cumulativity::SubtypeRule;
use crate::error::{Span, TypeError, TypeErrorKind};
use crate::surface::{print_term, Decl, Declaration, ParseError, Scope, SourceFile};
use crate::syntax::{Context, Entry, Term};

/// Outcome of one declaration.
#[derive(Debug, Clone)]
pub struct DeclOutcome {
    pub index: usize,
    pub command: &'static str,
    pub name: Option<String>,
    pub span: Span,
    /// Printed result for queries (`#check`, `#eval`, ...).
    pub result: Result<Option<String>, TypeError>,
    pub trace: Option<Vec<SubtypeRule>>,
    pub elapsed: Duration,
}

impl DeclOutcome {
    pub fn is_ok(&self) -> bool {
        self.result.is_ok()
    }
}

/// A checking session over one file.
pub struct Session {
    pub kernel: Kernel,
    pub ctx: Context,
}

impl Default for Session {
    fn default() -> Self {
        Session::new(KernelConfig::default())
    }
}

impl Session {
    pub fn new(config: KernelConfig) -> Self {
        Session {
            kernel: Kernel::new(config),
            ctx: Context::new(),
        }
    }

    pub fn scope(&self) -> Scope {
        Scope::from_context(&self.ctx)
    }

    /// Processes declarations in order; stops after the first failure unless
    /// `keep_going` is set. Failed declarations do not extend the context.
    pub fn run(&mut self, file: &SourceFile, keep_going: bool) -> Vec<DeclOutcome> {
        let mut out = Vec::new();
        for (i, d) in file.declarations.iter().enumerate() {
            let o = self.process(i, d);
            let failed = !o.is_ok();
            out.push(o);
            if failed && !keep_going {
                break;
            }
        }
        out
    }

    pub fn process(&mut self, index: usize, d: &Declaration) -> DeclOutcome {
        let start = Instant::now();
        self.kernel.refuel();
        let mut trace = None;
        let result = self
            .process_decl(&d.decl, &mut trace)
            .map_err(|e| e.with_span(d.span));
        DeclOutcome {
            index,
            command: d.decl.keyword(),
            name: d.decl.name().map(|n| n.to_string()),
            span: d.span,
            result,
            trace,
            elapsed: start.elapsed(),
        }
    }

    fn process_decl(
        &mut self,
        decl: &Decl,
        trace: &mut Option<Vec<SubtypeRule>>,
    ) -> Result<Option<String>, TypeError> {
        let k = &self.kernel;
        let ctx = &self.ctx;
        match decl {
            Decl::Axiom { name, ty } => {
                self.ctx = k.extend(ctx, Entry::Hyp {
                    name: name.clone(),
                    ty: ty.clone(),
                })?;
                Ok(None)
            }
            Decl::Def { name, ty, body } => {
                self.ctx = k.extend(ctx, Entry::Def {
                    name: name.clone(),
                    body: body.clone(),
                    ty: ty.clone(),
                })?;
                Ok(None)
            }
            Decl::Inductive { name, block } => {
                self.ctx = k.extend(ctx, Entry::Block {
                    name: name.clone(),
                    block: block.clone().into(),
                })?;
                Ok(None)
            }
            Decl::Check { term, ty: None } => {
                let ty = k.infer(ctx, term)?;
                Ok(Some(format!(
                    "{} : {}",
                    print_term(ctx, term),
                    print_term(ctx, &ty)
                )))
            }
            Decl::Check { term, ty: Some(ty) } => {
                k.infer_sort(ctx, ty)?;
                k.check(ctx, term, ty)?;
                Ok(Some(format!(
                    "{} : {}",
                    print_term(ctx, term),
                    print_term(ctx, ty)
                )))
            }
            Decl::Eval(t) => {
                k.infer(ctx, t)?;
                Ok(Some(print_term(ctx, &k.normalize(ctx, t)?)))
            }
            Decl::Conv(a, b) => {
                k.infer(ctx, a)?;
                k.infer(ctx, b)?;
                if k.conv(ctx, a, b)? {
                    Ok(Some("true".into()))
                } else {
                    Err(TypeError::mismatch(
                        TypeErrorKind::NotConvertible,
                        b.clone(),
                        a.clone(),
                    ))
                }
            }
            Decl::Sub(a, b) => {
                k.infer(ctx, a)?;
                k.infer(ctx, b)?;
                let v = k.subtype(ctx, a, b)?;
                if v.holds {
                    *trace = Some(v.trace);
                    Ok(Some("true".into()))
                } else {
                    Err(TypeError::mismatch(
                        TypeErrorKind::NotSubtype(v.failure),
                        b.clone(),
                        a.clone(),
                    ))
                }
            }
        }
    }

    pub fn print(&self, t: &Term) -> String {
        print_term(&self.ctx, t)
    }
}

// ---------------------------------------------------------------------------
// Machine-readable report

#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub file: String,
    pub ok: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub parse_error: Option<ParseErrorReport>,
    pub declarations: Vec<DeclReport>,
}

#[derive(Debug, Clone, Serialize)]
pub struct ParseErrorReport {
    pub kind: String,
    pub message: String,
    pub line: usize,
    pub col: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct DeclReport {
    pub index: usize,
    pub command: String,
    pub name: Option<String>,
    pub span: Span,
    pub status: &'static str,
    pub output: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub trace: Option<Vec<String>>,
    pub error: Option<ErrorReport>,
    pub time_us: u64,
}

#[derive(Debug, Clone, Serialize)]
pub struct ErrorReport {
    pub kind: String,
    pub message: String,
    pub culprit: Option<String>,
    pub expected: Option<String>,
    pub actual: Option<String>,
}

impl ErrorReport {
    pub fn new(ctx: &Context, e: &TypeError) -> Self {
        ErrorReport {
            kind: e.kind.slug(),
            message: e.to_string().lines().next().unwrap_or_default().to_owned(),
            culprit: e.culprit.as_ref().map(|n| n.to_string()),
            expected: e.expected.as_ref().map(|t| print_term(ctx, t)),
            actual: e.actual.as_ref().map(|t| print_term(ctx, t)),
        }
    }
}

impl Report {
    pub fn from_parse_error(file: &str, e: &ParseError) -> Self {
        Report {
            file: file.to_owned(),
            ok: false,
            parse_error: Some(ParseErrorReport {
                kind: format!("{:?}", e.kind).to_lowercase(),
                message: e.message.clone(),
                line: e.line,
                col: e.col,
            }),
            declarations: Vec::new(),
        }
    }

    /// `ctx` is used to print terms in errors and outputs.
    pub fn new(file: &str, ctx: &Context, outcomes: &[DeclOutcome]) -> Self {
        let declarations: Vec<DeclReport> = outcomes
            .iter()
            .map(|o| DeclReport {
                index: o.index,
                command: o.command.to_owned(),
                name: o.name.clone(),
                span: o.span,
                status: if o.is_ok() { "ok" } else { "error" },
                output: o.result.as_ref().ok().cloned().flatten(),
                trace: o
                    .trace
                    .as_ref()
                    .map(|t| t.iter().map(|r| r.as_str().to_owned()).collect()),
                error: o.result.as_ref().err().map(|e| ErrorReport::new(ctx, e)),
                time_us: o.elapsed.as_micros() as u64,
            })
            .collect();
        Report {
            file: file.to_owned(),
            ok: declarations.iter().all(|d| d.status == "ok"),
            parse_error: None,
            declarations,
        }
    }
}
