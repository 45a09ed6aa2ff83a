use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::syntax::{Name, Term};

/// 1-based source position range.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Span {
    pub line: usize,
    pub col: usize,
    pub end_line: usize,
    pub end_col: usize,
}

impl fmt::Display for Span {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.col)
    }
}

/// Which side condition of block well-formedness failed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BlockErrorKind {
    /// Two members share a name, or a member reuses a name already in the
    /// context domain, or the block name is taken.
    DuplicateName,
    /// A member does not start with the shared parameter telescope.
    ParameterTelescope,
    /// A constructor does not pass the parameters through verbatim.
    Parametricity,
    /// An inductive type does not end in a sort.
    ArityNotSort,
    /// An inductive type lives in `Prop`.
    PropArity,
    /// The inductive types of the block live in different sorts.
    MixedSorts,
    /// A constructor does not construct an inductive type of the block.
    NotAConstructor,
    StrictPositivity,
    /// A member type is ill-typed, or a constructor argument is too large
    /// for the sort of its inductive type.
    IllTyped,
}

impl BlockErrorKind {
    pub fn slug(self) -> &'static str {
        match self {
            BlockErrorKind::DuplicateName => "duplicate-name",
            BlockErrorKind::ParameterTelescope => "parameter-telescope",
            BlockErrorKind::Parametricity => "parametricity",
            BlockErrorKind::ArityNotSort => "arity-not-sort",
            BlockErrorKind::PropArity => "prop-arity",
            BlockErrorKind::MixedSorts => "mixed-sorts",
            BlockErrorKind::NotAConstructor => "not-a-constructor",
            BlockErrorKind::StrictPositivity => "strict-positivity",
            BlockErrorKind::IllTyped => "ill-typed",
        }
    }
}

/// Why a subtyping query failed, when the algorithm can tell.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SubtypeFailure {
    /// Two inductive types of the same name were compared but at least one
    /// of them is not applied to all of its arguments.
    NotFullyApplied,
    /// Same inductive name, fully applied, but the blocks are not included.
    BlocksNotIncluded,
    /// Universe levels in the wrong order.
    Universe,
    Mismatch,
}

impl SubtypeFailure {
    pub fn slug(self) -> &'static str {
        match self {
            SubtypeFailure::NotFullyApplied => "not-fully-applied",
            SubtypeFailure::BlocksNotIncluded => "blocks-not-included",
            SubtypeFailure::Universe => "universe",
            SubtypeFailure::Mismatch => "mismatch",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TypeErrorKind {
    UnboundVariable(Name),
    /// Reference to a block or block member that is not in the context.
    UnknownInductive(Name),
    /// Name already bound in the context domain.
    DuplicateName(Name),
    NotASort,
    NotAFunction,
    AppMismatch,
    /// A term does not have the type it is annotated with.
    TypeMismatch,
    BlockIllFormed(BlockErrorKind),
    ElimMotiveMismatch,
    ElimCaseMismatch,
    /// The scrutinee of an eliminator is not of the eliminated inductive type.
    ElimScrutineeMismatch,
    UniverseInconsistency,
    /// A `#conv` assertion failed.
    NotConvertible,
    /// A `#sub` assertion failed.
    NotSubtype(Option<SubtypeFailure>),
    FuelExhausted,
}

impl TypeErrorKind {
    /// Stable kebab-case identifier used in machine-readable output.
    pub fn slug(&self) -> String {
        match self {
            TypeErrorKind::UnboundVariable(_) => "unbound-variable".into(),
            TypeErrorKind::UnknownInductive(_) => "unknown-inductive".into(),
            TypeErrorKind::DuplicateName(_) => "duplicate-name".into(),
            TypeErrorKind::NotASort => "not-a-sort".into(),
            TypeErrorKind::NotAFunction => "not-a-function".into(),
            TypeErrorKind::AppMismatch => "app-mismatch".into(),
            TypeErrorKind::TypeMismatch => "type-mismatch".into(),
            TypeErrorKind::BlockIllFormed(k) => format!("block-ill-formed({})", k.slug()),
            TypeErrorKind::ElimMotiveMismatch => "elim-motive-mismatch".into(),
            TypeErrorKind::ElimCaseMismatch => "elim-case-mismatch".into(),
            TypeErrorKind::ElimScrutineeMismatch => "elim-scrutinee-mismatch".into(),
            TypeErrorKind::UniverseInconsistency => "universe-inconsistency".into(),
            TypeErrorKind::NotConvertible => "not-convertible".into(),
            TypeErrorKind::NotSubtype(None) => "not-subtype".into(),
            TypeErrorKind::NotSubtype(Some(f)) => format!("not-subtype({})", f.slug()),
            TypeErrorKind::FuelExhausted => "fuel-exhausted".into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{}", self.describe())]
pub struct TypeError {
    pub kind: TypeErrorKind,
    pub span: Option<Span>,
    pub expected: Option<Term>,
    pub actual: Option<Term>,
    /// Offending block member or context entry name.
    pub culprit: Option<Name>,
    /// Index of the offending entry when checking a whole context.
    pub entry: Option<usize>,
    pub source: Option<Box<TypeError>>,
}

impl TypeError {
    pub fn new(kind: TypeErrorKind) -> Self {
        TypeError {
            kind,
            span: None,
            expected: None,
            actual: None,
            culprit: None,
            entry: None,
            source: None,
        }
    }

    pub fn mismatch(kind: TypeErrorKind, expected: Term, actual: Term) -> Self {
        TypeError {
            expected: Some(expected),
            actual: Some(actual),
            ..TypeError::new(kind)
        }
    }

    pub fn block(kind: BlockErrorKind, member: Name) -> Self {
        TypeError {
            culprit: Some(member),
            ..TypeError::new(TypeErrorKind::BlockIllFormed(kind))
        }
    }

    pub fn fuel() -> Self {
        TypeError::new(TypeErrorKind::FuelExhausted)
    }

    pub fn with_span(mut self, span: Span) -> Self {
        self.span.get_or_insert(span);
        self
    }

    pub fn with_source(mut self, source: TypeError) -> Self {
        self.source = Some(Box::new(source));
        self
    }

    pub fn is_fuel(&self) -> bool {
        self.kind == TypeErrorKind::FuelExhausted
    }

    fn describe(&self) -> String {
        let mut s = match &self.kind {
            TypeErrorKind::UnboundVariable(x) => format!("unbound variable `{x}`"),
            TypeErrorKind::UnknownInductive(x) => format!("unknown inductive block or member `{x}`"),
            TypeErrorKind::DuplicateName(x) => format!("`{x}` is already bound"),
            TypeErrorKind::NotASort => "expected a type (a term whose type is a sort)".into(),
            TypeErrorKind::NotAFunction => "applied term is not a function".into(),
            TypeErrorKind::AppMismatch => "argument does not have the domain type".into(),
            TypeErrorKind::TypeMismatch => "term does not have the expected type".into(),
            TypeErrorKind::BlockIllFormed(k) => format!("ill-formed inductive block ({})", k.slug()),
            TypeErrorKind::ElimMotiveMismatch => "eliminator motive has the wrong type".into(),
            TypeErrorKind::ElimCaseMismatch => "eliminator case has the wrong type".into(),
            TypeErrorKind::ElimScrutineeMismatch => {
                "eliminated term is not of the eliminated inductive type".into()
            }
            TypeErrorKind::UniverseInconsistency => "universe inconsistency".into(),
            TypeErrorKind::NotConvertible => "terms are not convertible".into(),
            TypeErrorKind::NotSubtype(None) => "not a subtype".into(),
            TypeErrorKind::NotSubtype(Some(f)) => format!("not a subtype ({})", f.slug()),
            TypeErrorKind::FuelExhausted => {
                "reduction fuel exhausted (ill-typed or divergent input)".into()
            }
        };
        if let Some(c) = &self.culprit {
            s.push_str(&format!(" at `{c}`"));
        }
        if let (Some(e), Some(a)) = (&self.expected, &self.actual) {
            s.push_str(&format!("\n  expected: {e}\n    actual: {a}"));
        }
        if let Some(src) = &self.source {
            s.push_str(&format!("\n  caused by: {src}"));
        }
        s
    }
}

pub type Result<T, E = TypeError> = std::result::Result<T, E>;
