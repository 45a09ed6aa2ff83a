//! A kernel for the predicative calculus of cumulative inductive
//! constructions (pCuIC): terms and contexts, a concrete syntax, inductive
//! block well-formedness, conversion, cumulative subtyping (including
//! subtyping between inductive types of different blocks), type checking,
//! and a finite set-theoretic oracle for eliminators.

pub mod conversion;
pub mod cumulativity;
pub mod driver;
pub mod error;
pub mod inductive;
pub mod oracle;
pub mod surface;
pub mod syntax;
pub mod typecheck;

pub use conversion::{Kernel, KernelConfig};
pub use cumulativity::{SubtypeRule, SubtypeVerdict};
pub use error::{BlockErrorKind, Span, SubtypeFailure, TypeError, TypeErrorKind};
pub use surface::{parse, parse_term, print_term, Scope, SourceFile};
pub use syntax::{Context, InductiveBlock, Name, Sort, Term};
