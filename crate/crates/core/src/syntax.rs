//! Core terms, inductive blocks and contexts.
//!
//! Terms use a locally nameless representation: variables bound by `forall`,
//! `fun` and `let` are de Bruijn indices ([`Term::Bound`]) while free variables
//! are names ([`Term::Var`]). Binder names are kept only as printing hints and
//! never take part in equality, so `==` on terms is alpha-equivalence.

use std::cmp::Ordering;
use std::collections::BTreeSet;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::atomic::{AtomicU64, Ordering as AtomicOrdering};
use std::sync::Arc;

use thiserror::Error;

/// An identifier. Cheap to clone.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Name(Arc<str>);

impl Name {
    pub fn new(s: &str) -> Self {
        Name(Arc::from(s))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }

    /// The user-facing part of the name, without any freshness suffix.
    pub fn base(&self) -> &str {
        self.0.split('#').next().unwrap_or(&self.0)
    }

    pub fn is_fresh(&self) -> bool {
        self.0.contains('#')
    }
}

impl From<&str> for Name {
    fn from(s: &str) -> Self {
        Name::new(s)
    }
}

impl From<String> for Name {
    fn from(s: String) -> Self {
        Name(Arc::from(s))
    }
}

impl fmt::Debug for Name {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", &*self.0)
    }
}

impl fmt::Display for Name {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

static FRESH: AtomicU64 = AtomicU64::new(0);

/// Returns a name that cannot clash with any surface identifier: surface
/// identifiers never contain `#`.
pub fn fresh(hint: &str) -> Name {
    let n = FRESH.fetch_add(1, AtomicOrdering::Relaxed);
    let base = hint.split('#').next().unwrap_or(hint);
    let base = if base.is_empty() || base == "_" { "x" } else { base };
    Name::from(format!("{base}#{n}"))
}

/// Binder name kept for printing. Compares equal to every other hint.
#[derive(Clone)]
pub struct Hint(pub Name);

impl Hint {
    pub fn new(s: &str) -> Self {
        Hint(Name::new(s))
    }

    pub fn anon() -> Self {
        Hint::new("_")
    }

    pub fn name(&self) -> &Name {
        &self.0
    }
}

impl PartialEq for Hint {
    fn eq(&self, _: &Self) -> bool {
        true
    }
}

impl Eq for Hint {}

impl PartialOrd for Hint {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Hint {
    fn cmp(&self, _: &Self) -> Ordering {
        Ordering::Equal
    }
}

impl Hash for Hint {
    fn hash<H: Hasher>(&self, _: &mut H) {}
}

impl fmt::Debug for Hint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Universe index `i` of `Type@{i}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Level(pub u32);

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Sort {
    Prop,
    Type(Level),
}

impl Sort {
    pub fn ty(i: u32) -> Sort {
        Sort::Type(Level(i))
    }
}

impl fmt::Display for Sort {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Sort::Prop => f.write_str("Prop"),
            Sort::Type(Level(i)) => write!(f, "Type@{{{i}}}"),
        }
    }
}

/// Reference to a member (inductive type or constructor) of a block bound in
/// the context.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct IndRef {
    pub block: Name,
    pub member: Name,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Elim {
    pub scrutinee: Term,
    pub block: Name,
    /// The inductive type of the block the scrutinee belongs to.
    pub target: Name,
    /// One motive per inductive type, in declaration order.
    pub motives: Vec<Term>,
    /// One case-eliminator per constructor, in declaration order.
    pub cases: Vec<Term>,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Term {
    Var(Name),
    Bound(u32),
    Sort(Sort),
    Pi(Hint, Arc<Term>, Arc<Term>),
    Lam(Hint, Arc<Term>, Arc<Term>),
    /// `let x := value : ty in body`
    Let(Hint, Arc<Term>, Arc<Term>, Arc<Term>),
    App(Arc<Term>, Arc<Term>),
    Ind(IndRef),
    Elim(Arc<Elim>),
}

impl Term {
    pub fn var(name: impl Into<Name>) -> Term {
        Term::Var(name.into())
    }

    pub fn prop() -> Term {
        Term::Sort(Sort::Prop)
    }

    pub fn ty(i: u32) -> Term {
        Term::Sort(Sort::ty(i))
    }

    pub fn ind(block: impl Into<Name>, member: impl Into<Name>) -> Term {
        Term::Ind(IndRef {
            block: block.into(),
            member: member.into(),
        })
    }

    pub fn app(f: Term, a: Term) -> Term {
        Term::App(Arc::new(f), Arc::new(a))
    }

    pub fn apps(f: Term, args: impl IntoIterator<Item = Term>) -> Term {
        args.into_iter().fold(f, Term::app)
    }

    /// Non-dependent function type.
    pub fn arrow(a: Term, b: Term) -> Term {
        Term::Pi(Hint::anon(), Arc::new(a), Arc::new(b))
    }

    /// `forall name : dom, body` where `body` mentions `name` as a free variable.
    pub fn pi(name: &Name, dom: Term, body: &Term) -> Term {
        Term::Pi(Hint(name.clone()), Arc::new(dom), Arc::new(body.close(name)))
    }

    /// `fun name : dom => body` where `body` mentions `name` as a free variable.
    pub fn lam(name: &Name, dom: Term, body: &Term) -> Term {
        Term::Lam(Hint(name.clone()), Arc::new(dom), Arc::new(body.close(name)))
    }

    pub fn let_in(name: &Name, value: Term, ty: Term, body: &Term) -> Term {
        Term::Let(
            Hint(name.clone()),
            Arc::new(value),
            Arc::new(ty),
            Arc::new(body.close(name)),
        )
    }

    pub fn elim(
        scrutinee: Term,
        block: impl Into<Name>,
        target: impl Into<Name>,
        motives: Vec<Term>,
        cases: Vec<Term>,
    ) -> Term {
        Term::Elim(Arc::new(Elim {
            scrutinee,
            block: block.into(),
            target: target.into(),
            motives,
            cases,
        }))
    }

    pub fn as_sort(&self) -> Option<Sort> {
        match self {
            Term::Sort(s) => Some(*s),
            _ => None,
        }
    }

    /// Splits an application spine into its head and arguments.
    pub fn unapply(&self) -> (&Term, Vec<&Term>) {
        let mut args = Vec::new();
        let mut head = self;
        while let Term::App(f, a) = head {
            args.push(&**a);
            head = f;
        }
        args.reverse();
        (head, args)
    }

    /// Replaces the loose bound variable 0 by `value`, which must be locally
    /// closed.
    pub fn instantiate(&self, value: &Term) -> Term {
        self.instantiate_at(0, value)
    }

    fn instantiate_at(&self, depth: u32, value: &Term) -> Term {
        if !self.has_loose_from(depth) {
            return self.clone();
        }
        match self {
            Term::Bound(i) if *i == depth => value.clone(),
            Term::Bound(i) if *i > depth => Term::Bound(i - 1),
            Term::Bound(_) | Term::Var(_) | Term::Sort(_) | Term::Ind(_) => self.clone(),
            _ => self.map_children(depth, &mut |t, d| t.instantiate_at(d, value)),
        }
    }

    /// Opens a binder body with a free variable.
    pub fn open(&self, name: &Name) -> Term {
        self.instantiate(&Term::Var(name.clone()))
    }

    /// Turns free occurrences of `name` into the loose bound variable 0.
    pub fn close(&self, name: &Name) -> Term {
        self.close_at(0, name)
    }

    fn close_at(&self, depth: u32, name: &Name) -> Term {
        match self {
            Term::Var(x) if x == name => Term::Bound(depth),
            Term::Var(_) | Term::Bound(_) | Term::Sort(_) | Term::Ind(_) => self.clone(),
            _ => self.map_children(depth, &mut |t, d| t.close_at(d, name)),
        }
    }

    /// Rebuilds the term applying `f` to every immediate child together with
    /// the number of binders crossed (`depth` + 1 under a binder).
    pub fn map_children(&self, depth: u32, f: &mut dyn FnMut(&Term, u32) -> Term) -> Term {
        match self {
            Term::Var(_) | Term::Bound(_) | Term::Sort(_) | Term::Ind(_) => self.clone(),
            Term::Pi(h, a, b) => Term::Pi(
                h.clone(),
                Arc::new(f(a, depth)),
                Arc::new(f(b, depth + 1)),
            ),
            Term::Lam(h, a, b) => Term::Lam(
                h.clone(),
                Arc::new(f(a, depth)),
                Arc::new(f(b, depth + 1)),
            ),
            Term::Let(h, v, t, b) => Term::Let(
                h.clone(),
                Arc::new(f(v, depth)),
                Arc::new(f(t, depth)),
                Arc::new(f(b, depth + 1)),
            ),
            Term::App(g, a) => Term::App(Arc::new(f(g, depth)), Arc::new(f(a, depth))),
            Term::Elim(e) => Term::Elim(Arc::new(Elim {
                scrutinee: f(&e.scrutinee, depth),
                block: e.block.clone(),
                target: e.target.clone(),
                motives: e.motives.iter().map(|m| f(m, depth)).collect(),
                cases: e.cases.iter().map(|c| f(c, depth)).collect(),
            })),
        }
    }

    /// Whether some bound variable with index >= `depth` (relative to this
    /// term) occurs loose.
    pub fn has_loose_from(&self, depth: u32) -> bool {
        match self {
            Term::Bound(i) => *i >= depth,
            Term::Var(_) | Term::Sort(_) | Term::Ind(_) => false,
            Term::Pi(_, a, b) | Term::Lam(_, a, b) => {
                a.has_loose_from(depth) || b.has_loose_from(depth + 1)
            }
            Term::Let(_, v, t, b) => {
                v.has_loose_from(depth) || t.has_loose_from(depth) || b.has_loose_from(depth + 1)
            }
            Term::App(f, a) => f.has_loose_from(depth) || a.has_loose_from(depth),
            Term::Elim(e) => {
                e.scrutinee.has_loose_from(depth)
                    || e.motives.iter().any(|m| m.has_loose_from(depth))
                    || e.cases.iter().any(|c| c.has_loose_from(depth))
            }
        }
    }

    /// Whether the loose bound variable with exactly index `idx` occurs.
    pub fn mentions_bound(&self, idx: u32) -> bool {
        match self {
            Term::Bound(i) => *i == idx,
            Term::Var(_) | Term::Sort(_) | Term::Ind(_) => false,
            Term::Pi(_, a, b) | Term::Lam(_, a, b) => {
                a.mentions_bound(idx) || b.mentions_bound(idx + 1)
            }
            Term::Let(_, v, t, b) => {
                v.mentions_bound(idx) || t.mentions_bound(idx) || b.mentions_bound(idx + 1)
            }
            Term::App(f, a) => f.mentions_bound(idx) || a.mentions_bound(idx),
            Term::Elim(e) => {
                e.scrutinee.mentions_bound(idx)
                    || e.motives.iter().any(|m| m.mentions_bound(idx))
                    || e.cases.iter().any(|c| c.mentions_bound(idx))
            }
        }
    }

    pub fn is_locally_closed(&self) -> bool {
        !self.has_loose_from(0)
    }

    /// Whether any of `names` occurs free.
    pub fn mentions_any(&self, names: &BTreeSet<Name>) -> bool {
        match self {
            Term::Var(x) => names.contains(x),
            Term::Bound(_) | Term::Sort(_) | Term::Ind(_) => false,
            Term::Pi(_, a, b) | Term::Lam(_, a, b) => a.mentions_any(names) || b.mentions_any(names),
            Term::Let(_, v, t, b) => {
                v.mentions_any(names) || t.mentions_any(names) || b.mentions_any(names)
            }
            Term::App(f, a) => f.mentions_any(names) || a.mentions_any(names),
            Term::Elim(e) => {
                e.scrutinee.mentions_any(names)
                    || e.motives.iter().any(|m| m.mentions_any(names))
                    || e.cases.iter().any(|c| c.mentions_any(names))
            }
        }
    }

    pub fn free_vars(&self) -> BTreeSet<Name> {
        let mut out = BTreeSet::new();
        self.collect_free_vars(&mut out);
        out
    }

    fn collect_free_vars(&self, out: &mut BTreeSet<Name>) {
        match self {
            Term::Var(x) => {
                out.insert(x.clone());
            }
            Term::Bound(_) | Term::Sort(_) | Term::Ind(_) => {}
            Term::Pi(_, a, b) | Term::Lam(_, a, b) => {
                a.collect_free_vars(out);
                b.collect_free_vars(out);
            }
            Term::Let(_, v, t, b) => {
                v.collect_free_vars(out);
                t.collect_free_vars(out);
                b.collect_free_vars(out);
            }
            Term::App(f, a) => {
                f.collect_free_vars(out);
                a.collect_free_vars(out);
            }
            Term::Elim(e) => {
                e.scrutinee.collect_free_vars(out);
                for m in &e.motives {
                    m.collect_free_vars(out);
                }
                for c in &e.cases {
                    c.collect_free_vars(out);
                }
            }
        }
    }

    /// Substitutes every free `Var(x)` with `x` in the domain of `map`.
    pub fn replace_vars(&self, map: &dyn Fn(&Name) -> Option<Term>) -> Term {
        match self {
            Term::Var(x) => map(x).unwrap_or_else(|| self.clone()),
            Term::Bound(_) | Term::Sort(_) | Term::Ind(_) => self.clone(),
            _ => self.map_children(0, &mut |t, _| t.replace_vars(map)),
        }
    }

    /// Number of nodes; used to bound test generators.
    pub fn node_count(&self) -> usize {
        match self {
            Term::Var(_) | Term::Bound(_) | Term::Sort(_) | Term::Ind(_) => 1,
            Term::Pi(_, a, b) | Term::Lam(_, a, b) | Term::App(a, b) => {
                1 + a.node_count() + b.node_count()
            }
            Term::Let(_, v, t, b) => 1 + v.node_count() + t.node_count() + b.node_count(),
            Term::Elim(e) => {
                1 + e.scrutinee.node_count()
                    + e.motives.iter().map(Term::node_count).sum::<usize>()
                    + e.cases.iter().map(Term::node_count).sum::<usize>()
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SubstError {
    #[error("substitution has {vars} variables but {values} values")]
    LengthMismatch { vars: usize, values: usize },
    #[error("variable `{0}` occurs twice in a simultaneous substitution")]
    DuplicateVariable(Name),
    #[error("substituted value for `{0}` has loose bound variables")]
    NotLocallyClosed(Name),
}

/// Simultaneous capture-avoiding substitution `t[vars := values]`.
///
/// Binders are nameless, so a binder can neither capture a free variable of
/// a value nor be the target of a substitution.
pub fn subst(t: &Term, vars: &[Name], values: &[Term]) -> Result<Term, SubstError> {
    if vars.len() != values.len() {
        return Err(SubstError::LengthMismatch {
            vars: vars.len(),
            values: values.len(),
        });
    }
    let mut seen = BTreeSet::new();
    for (x, v) in vars.iter().zip(values) {
        if !seen.insert(x.clone()) {
            return Err(SubstError::DuplicateVariable(x.clone()));
        }
        if !v.is_locally_closed() {
            return Err(SubstError::NotLocallyClosed(x.clone()));
        }
    }
    Ok(t.replace_vars(&|x| vars.iter().position(|y| y == x).map(|i| values[i].clone())))
}

pub fn free_vars(t: &Term) -> BTreeSet<Name> {
    t.free_vars()
}

/// Syntactic identity up to renaming of bound variables.
pub fn alpha_eq(t: &Term, u: &Term) -> bool {
    t == u
}

/// A mutual inductive block `Ind_n{inds := constrs}`.
///
/// Member types are stored as declared: the block's own inductive types occur
/// in them as free variables named after the inductive.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct InductiveBlock {
    pub params: usize,
    pub inds: Vec<(Name, Term)>,
    pub constrs: Vec<(Name, Term)>,
}

impl InductiveBlock {
    pub fn ind_type(&self, d: &Name) -> Option<&Term> {
        self.inds.iter().find(|(n, _)| n == d).map(|(_, t)| t)
    }

    pub fn constr_type(&self, c: &Name) -> Option<&Term> {
        self.constrs.iter().find(|(n, _)| n == c).map(|(_, t)| t)
    }

    pub fn ind_index(&self, d: &Name) -> Option<usize> {
        self.inds.iter().position(|(n, _)| n == d)
    }

    pub fn constr_index(&self, c: &Name) -> Option<usize> {
        self.constrs.iter().position(|(n, _)| n == c)
    }

    pub fn is_ind(&self, name: &Name) -> bool {
        self.ind_index(name).is_some()
    }

    pub fn is_constr(&self, name: &Name) -> bool {
        self.constr_index(name).is_some()
    }

    pub fn ind_names(&self) -> BTreeSet<Name> {
        self.inds.iter().map(|(n, _)| n.clone()).collect()
    }

    pub fn member_names(&self) -> impl Iterator<Item = &Name> {
        self.inds.iter().chain(&self.constrs).map(|(n, _)| n)
    }

    /// Replaces the block-local inductive names by references to the block
    /// bound under `block_name`.
    pub fn globalize(&self, block_name: &Name, t: &Term) -> Term {
        t.replace_vars(&|x| {
            self.is_ind(x)
                .then(|| Term::ind(block_name.clone(), x.clone()))
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Entry {
    Hyp { name: Name, ty: Term },
    Def { name: Name, body: Term, ty: Term },
    Block { name: Name, block: Arc<InductiveBlock> },
}

impl Entry {
    pub fn name(&self) -> &Name {
        match self {
            Entry::Hyp { name, .. } | Entry::Def { name, .. } | Entry::Block { name, .. } => name,
        }
    }
}

struct Node {
    entry: Entry,
    parent: Option<Arc<Node>>,
    len: usize,
}

/// An ordered telescope of hypotheses, definitions and inductive blocks.
///
/// Persistent: extending a context shares the prefix with the original.
#[derive(Clone, Default)]
pub struct Context {
    head: Option<Arc<Node>>,
}

impl Context {
    pub fn new() -> Self {
        Context::default()
    }

    pub fn len(&self) -> usize {
        self.head.as_ref().map_or(0, |n| n.len)
    }

    pub fn is_empty(&self) -> bool {
        self.head.is_none()
    }

    pub fn push(&self, entry: Entry) -> Context {
        Context {
            head: Some(Arc::new(Node {
                entry,
                parent: self.head.clone(),
                len: self.len() + 1,
            })),
        }
    }

    pub fn with_hyp(&self, name: Name, ty: Term) -> Context {
        self.push(Entry::Hyp { name, ty })
    }

    pub fn with_def(&self, name: Name, body: Term, ty: Term) -> Context {
        self.push(Entry::Def { name, body, ty })
    }

    pub fn with_block(&self, name: Name, block: InductiveBlock) -> Context {
        self.push(Entry::Block {
            name,
            block: Arc::new(block),
        })
    }

    /// Entries from the most recent to the oldest.
    pub fn iter_rev(&self) -> impl Iterator<Item = &Entry> {
        let mut cur = self.head.as_deref();
        std::iter::from_fn(move || {
            let node = cur?;
            cur = node.parent.as_deref();
            Some(&node.entry)
        })
    }

    /// Entries in declaration order.
    pub fn entries(&self) -> Vec<&Entry> {
        let mut v: Vec<_> = self.iter_rev().collect();
        v.reverse();
        v
    }

    /// The prefix of the context without its most recent entry.
    pub fn parent(&self) -> Option<Context> {
        self.head.as_ref().map(|n| Context {
            head: n.parent.clone(),
        })
    }

    /// Looks up a hypothesis or definition; the most recent entry wins.
    pub fn lookup(&self, name: &Name) -> Option<&Entry> {
        self.iter_rev()
            .find(|e| !matches!(e, Entry::Block { .. }) && e.name() == name)
    }

    pub fn block(&self, name: &Name) -> Option<&Arc<InductiveBlock>> {
        self.iter_rev().find_map(|e| match e {
            Entry::Block { name: n, block } if n == name => Some(block),
            _ => None,
        })
    }

    /// `dom(Γ)`: hypothesis and definition names. Block members are not part
    /// of the domain.
    pub fn dom(&self) -> BTreeSet<Name> {
        self.iter_rev()
            .filter(|e| !matches!(e, Entry::Block { .. }))
            .map(|e| e.name().clone())
            .collect()
    }

    pub fn contains(&self, name: &Name) -> bool {
        self.lookup(name).is_some()
    }
}

impl fmt::Debug for Context {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.entries()).finish()
    }
}

impl PartialEq for Context {
    fn eq(&self, other: &Self) -> bool {
        self.len() == other.len() && self.iter_rev().zip(other.iter_rev()).all(|(a, b)| a == b)
    }
}

/// Sizes are reported doubled so that the half-units of the measure stay
/// integral: `size(Prop) = 2`, `size(·) = 1`.
pub mod size {
    use super::*;

    pub fn term(ctx: &Context, t: &Term) -> u64 {
        match t {
            Term::Var(_) | Term::Bound(_) | Term::Sort(_) => 2,
            Term::Pi(_, a, b) | Term::Lam(_, a, b) | Term::App(a, b) => {
                term(ctx, a) + term(ctx, b) + 2
            }
            Term::Let(_, v, ty, b) => term(ctx, v) + term(ctx, ty) + term(ctx, b) + 2,
            Term::Ind(r) => ctx.block(&r.block).map_or(2, |b| block(ctx, b)),
            Term::Elim(e) => {
                term(ctx, &e.scrutinee)
                    + ctx.block(&e.block).map_or(2, |b| block(ctx, b))
                    + e.motives.iter().map(|m| term(ctx, m)).sum::<u64>()
                    + e.cases.iter().map(|c| term(ctx, c)).sum::<u64>()
                    + 2
            }
        }
    }

    pub fn block(ctx: &Context, b: &InductiveBlock) -> u64 {
        b.inds
            .iter()
            .chain(&b.constrs)
            .map(|(_, t)| term(ctx, t))
            .sum::<u64>()
            + 2
    }

    pub fn context(ctx: &Context) -> u64 {
        match &ctx.head {
            None => 1,
            Some(node) => {
                let parent = Context {
                    head: node.parent.clone(),
                };
                context(&parent)
                    + match &node.entry {
                        Entry::Hyp { ty, .. } => term(&parent, ty),
                        Entry::Def { body, ty, .. } => term(&parent, body) + term(&parent, ty),
                        Entry::Block { block: b, .. } => block(&parent, b),
                    }
            }
        }
    }

    /// `size(Γ ⊢ t)`
    pub fn judgement(ctx: &Context, t: &Term) -> u64 {
        context(ctx) + term(ctx, t) - 1
    }

    /// `size(Γ ⊢ I)`
    pub fn block_judgement(ctx: &Context, b: &InductiveBlock) -> u64 {
        context(ctx) + block(ctx, b) - 1
    }
}
