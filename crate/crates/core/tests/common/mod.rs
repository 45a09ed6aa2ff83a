//! Shared fixtures, generators and property bodies for the integration
//! tests. The property bodies are plain functions so that both the proptest
//! suites and the acceptance report can run them.

#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};
use std::path::PathBuf;

use pcuic::driver::Session;
use pcuic::inductive::{strict_pos, strict_pos_arg};
use pcuic::oracle::value::encoded_pi;
use pcuic::oracle::{decode, encode, lfp_stages, Oracle, Rule, RuleSet, Rules, SetValue};
use pcuic::surface::{parse, parse_term, print_term};
use pcuic::syntax::{subst, Entry, Name};
use pcuic::{Context, Kernel, Term};
use proptest::prelude::*;
use proptest::test_runner::TestCaseError;

pub const PRELUDE: &str = r#"
inductive Nat params 0 { nat : Set := zero : nat; succ : nat -> nat }.

def add : nat -> nat -> nat :=
  fun (n m : nat) => Elim(n; Nat.nat; fun _ : nat => nat; m, fun (p r : nat) => succ r).

inductive List0 params 1 {
  list : forall A : Type@{0}, Type@{0}
:= nil : forall A : Type@{0}, list A;
   cons : forall A : Type@{0}, A -> list A -> list A }.
inductive List1 params 1 {
  list : forall A : Type@{1}, Type@{1}
:= nil : forall A : Type@{1}, list A;
   cons : forall A : Type@{1}, A -> list A -> list A }.
inductive List2 params 1 {
  list : forall A : Type@{2}, Type@{2}
:= nil : forall A : Type@{2}, list A;
   cons : forall A : Type@{2}, A -> list A -> list A }.

def length : forall A : Type@{0}, List0.list A -> nat :=
  fun (A : Type@{0}) (l : List0.list A) =>
    Elim(l; List0.list; fun (B : Type@{0}) (_ : List0.list B) => nat;
      fun B : Type@{0} => zero,
      fun (B : Type@{0}) (x : B) (t : List0.list B) (r : nat) => succ r).

axiom A : Type@{0}.
axiom a : A.
axiom P : Prop.
axiom k : nat.
axiom f : nat -> nat.
"#;

pub fn corpus_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../corpus")
}

pub fn session_of(src: &str) -> Session {
    let mut s = Session::default();
    let outs = s.run(&parse(src).expect("fixture parses"), false);
    if let Some(o) = outs.iter().find(|o| !o.is_ok()) {
        panic!("fixture declaration {} failed: {:?}", o.index, o.result);
    }
    s
}

pub fn prelude() -> Session {
    session_of(PRELUDE)
}

pub fn term(s: &Session, src: &str) -> Term {
    parse_term(&s.scope(), src).unwrap_or_else(|e| panic!("`{src}`: {e:?}"))
}

pub fn numeral(n: usize) -> String {
    (0..n).fold("zero".to_owned(), |acc, _| format!("succ ({acc})"))
}

// ---------------------------------------------------------------------------
// Generators of well-typed source text over the prelude

/// Options for [`nat_src`].
#[derive(Clone, Copy)]
pub struct Gen {
    /// Allow the opaque hypotheses `k` and `f`.
    pub open: bool,
    /// Allow `length` over lists.
    pub lists: bool,
}

/// A term of type `nat` using the bound variables `x0 … x{nv-1}`.
pub fn nat_src(depth: u32, nv: usize, g: Gen) -> BoxedStrategy<String> {
    let mut leaves: Vec<BoxedStrategy<String>> = vec![Just("zero".to_owned()).boxed()];
    if g.open {
        leaves.push(Just("k".to_owned()).boxed());
    }
    if nv > 0 {
        leaves.push((0..nv).prop_map(|i| format!("x{i}")).boxed());
    }
    let leaf = proptest::strategy::Union::new(leaves).boxed();
    if depth == 0 {
        return leaf;
    }
    let d = depth - 1;
    let x = nv;
    let mut alts: Vec<BoxedStrategy<String>> = vec![
        leaf,
        nat_src(d, nv, g).prop_map(|e| format!("succ ({e})")).boxed(),
        (nat_src(d, nv, g), nat_src(d, nv, g))
            .prop_map(|(a, b)| format!("add ({a}) ({b})"))
            .boxed(),
        (nat_src(d, nv + 1, g), nat_src(d, nv, g))
            .prop_map(move |(b, e)| format!("(fun x{x} : nat => {b}) ({e})"))
            .boxed(),
        (nat_src(d, nv, g), nat_src(d, nv + 1, g))
            .prop_map(move |(e, b)| format!("let x{x} := {e} : nat in {b}"))
            .boxed(),
        (nat_src(d, nv, g), nat_src(d, nv, g), nat_src(d, nv + 2, g))
            .prop_map(move |(n, z, s)| {
                format!(
                    "Elim({n}; Nat.nat; fun _ : nat => nat; {z}, fun (x{x} x{} : nat) => {s})",
                    x + 1
                )
            })
            .boxed(),
    ];
    if g.open {
        alts.push(nat_src(d, nv, g).prop_map(|e| format!("f ({e})")).boxed());
    }
    if g.lists {
        alts.push(list_src(d, nv, g).prop_map(|l| format!("length nat ({l})")).boxed());
    }
    proptest::strategy::Union::new(alts).boxed()
}

/// A list of naturals at a random universe level.
pub fn list_src(depth: u32, nv: usize, g: Gen) -> BoxedStrategy<String> {
    let nil = (0u32..3).prop_map(|i| format!("List{i}.nil nat")).boxed();
    if depth == 0 {
        return nil;
    }
    let d = depth - 1;
    prop_oneof![
        nil,
        (0u32..3, nat_src(d, nv, g), list_src(d, nv, g))
            .prop_map(|(i, x, l)| format!("List{i}.cons nat ({x}) ({l})")),
    ]
    .boxed()
}

pub const CLOSED: Gen = Gen {
    open: false,
    lists: true,
};
pub const SMALL: Gen = Gen {
    open: false,
    lists: false,
};
pub const OPEN: Gen = Gen {
    open: true,
    lists: true,
};

/// A type skeleton whose universe levels are left open.
#[derive(Clone, Debug)]
pub enum Skel {
    Nat,
    A,
    /// `Prop` or `Type@{i}`.
    Sort,
    /// `List{i}.list nat`.
    List,
    Arrow(&'static str, Box<Skel>),
    Forall(Box<Skel>),
}

pub fn skel() -> impl Strategy<Value = Skel> {
    let leaf = prop_oneof![
        Just(Skel::Nat),
        Just(Skel::A),
        Just(Skel::Sort),
        Just(Skel::List)
    ];
    leaf.prop_recursive(3, 8, 2, |inner| {
        prop_oneof![
            (prop_oneof![Just("nat"), Just("A"), Just("Prop")], inner.clone())
                .prop_map(|(d, c)| Skel::Arrow(d, Box::new(c))),
            inner.prop_map(|c| Skel::Forall(Box::new(c))),
        ]
    })
}

/// Instantiates the open levels of a skeleton from `levels` (cycled); a
/// level of 4 stands for `Prop` in sort positions.
pub fn inst(s: &Skel, levels: &[u32]) -> String {
    fn go(s: &Skel, levels: &[u32], pos: &mut usize, depth: usize) -> String {
        let mut next = || {
            let l = levels[*pos % levels.len()];
            *pos += 1;
            l
        };
        match s {
            Skel::Nat => "nat".into(),
            Skel::A => "A".into(),
            Skel::Sort => match next() {
                4 => "Prop".into(),
                i => format!("Type@{{{i}}}"),
            },
            Skel::List => format!("List{}.list nat", next() % 3),
            Skel::Arrow(d, c) => format!("{d} -> {}", go(c, levels, pos, depth)),
            Skel::Forall(c) => format!("forall y{depth} : nat, {}", go(c, levels, pos, depth + 1)),
        }
    }
    go(s, levels, &mut 0, 0)
}

pub fn levels() -> impl Strategy<Value = Vec<u32>> {
    proptest::collection::vec(0u32..5, 1..6)
}

// ---------------------------------------------------------------------------
// Raw terms for syntactic properties

pub fn raw_term() -> impl Strategy<Value = Term> {
    let leaf = prop_oneof![
        prop_oneof![Just("x"), Just("y"), Just("z"), Just("w")].prop_map(Term::var),
        Just(Term::prop()),
        (0u32..3).prop_map(Term::ty),
    ];
    leaf.prop_recursive(4, 32, 3, |inner| {
        let binder = prop_oneof![Just("x"), Just("y"), Just("v")];
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Term::app(a, b)),
            (binder.clone(), inner.clone(), inner.clone())
                .prop_map(|(x, a, b)| Term::pi(&Name::new(x), a, &b)),
            (binder.clone(), inner.clone(), inner.clone())
                .prop_map(|(x, a, b)| Term::lam(&Name::new(x), a, &b)),
            (binder, inner.clone(), inner.clone(), inner)
                .prop_map(|(x, v, t, b)| Term::let_in(&Name::new(x), v, t, &b)),
        ]
    })
}

// ---------------------------------------------------------------------------
// Property bodies

fn k() -> Kernel {
    Kernel::default()
}

macro_rules! ensure {
    ($cond:expr, $($fmt:tt)+) => {
        if !$cond {
            return Err(TestCaseError::fail(format!($($fmt)+)));
        }
    };
}

type PResult = Result<(), TestCaseError>;

/// `FV(t[x := u]) ⊆ (FV(t) ∖ {x}) ∪ FV(u)`, and `x` is gone unless `u`
/// mentions it.
pub fn prop_subst_fv(t: &Term, u: &Term) -> PResult {
    let x = Name::new("x");
    let r = subst(t, &[x.clone()], &[u.clone()]).map_err(|e| TestCaseError::fail(e.to_string()))?;
    let mut allowed = t.free_vars();
    allowed.remove(&x);
    allowed.extend(u.free_vars());
    ensure!(r.free_vars().is_subset(&allowed), "free variables escaped");
    ensure!(
        !r.free_vars().contains(&x) || u.free_vars().contains(&x),
        "substituted variable survived"
    );
    Ok(())
}

/// Simultaneous substitution equals sequential substitution through a
/// fresh intermediate, and swapping twice is the identity.
pub fn prop_subst_simultaneous(t: &Term, u: &Term, v: &Term) -> PResult {
    let (x, y, z) = (Name::new("x"), Name::new("y"), Name::new("#tmp"));
    let err = |e: pcuic::syntax::SubstError| TestCaseError::fail(e.to_string());
    let sim = subst(t, &[x.clone(), y.clone()], &[u.clone(), v.clone()]).map_err(err)?;
    let s1 = subst(t, &[x.clone()], &[Term::Var(z.clone())]).map_err(err)?;
    let s2 = subst(&s1, &[y.clone()], &[v.clone()]).map_err(err)?;
    let seq = subst(&s2, &[z], &[u.clone()]).map_err(err)?;
    ensure!(sim == seq, "simultaneous and sequential substitution differ");
    let swap = |t: &Term| subst(t, &[x.clone(), y.clone()], &[Term::Var(y.clone()), Term::Var(x.clone())]);
    ensure!(swap(&swap(t).map_err(err)?).map_err(err)? == *t, "swap is not an involution");
    Ok(())
}

fn kerr(e: pcuic::TypeError) -> TestCaseError {
    TestCaseError::fail(e.to_string())
}

/// Reflexivity, symmetry and transitivity of conversion, and agreement with
/// normal forms.
pub fn prop_conv_equivalence(s: &Session, a: &str, b: &str, c: &str) -> PResult {
    let k = k();
    let ctx = &s.ctx;
    let [a, b, c] = [a, b, c].map(|x| term(s, x));
    for t in [&a, &b, &c] {
        k.infer(ctx, t).map_err(kerr)?;
        ensure!(k.conv(ctx, t, t).map_err(kerr)?, "conv not reflexive on {t}");
        let n = k.normalize(ctx, t).map_err(kerr)?;
        ensure!(k.conv(ctx, t, &n).map_err(kerr)?, "term not convertible to its normal form");
    }
    let ab = k.conv(ctx, &a, &b).map_err(kerr)?;
    let ba = k.conv(ctx, &b, &a).map_err(kerr)?;
    ensure!(ab == ba, "conv not symmetric");
    let bc = k.conv(ctx, &b, &c).map_err(kerr)?;
    if ab && bc {
        ensure!(k.conv(ctx, &a, &c).map_err(kerr)?, "conv not transitive");
    }
    let (na, nb) = (k.normalize(ctx, &a).map_err(kerr)?, k.normalize(ctx, &b).map_err(kerr)?);
    if na == nb {
        ensure!(ab, "equal normal forms but not convertible");
    }
    Ok(())
}

/// One-hole contexts of type `nat` with a hole of type `nat`.
pub const NAT_CONTEXTS: &[&str] = &[
    "succ (#)",
    "add (#) (succ zero)",
    "add k (#)",
    "(fun y : nat => add y y) (#)",
    "f (#)",
    "let y := # : nat in succ y",
    "Elim(#; Nat.nat; fun _ : nat => nat; zero, fun (p r : nat) => succ (succ r))",
];

/// Conversion is a congruence: `t ≃ u` implies `C[t] ≃ C[u]`.
pub fn prop_conv_congruence(s: &Session, t: &str, hole: usize) -> PResult {
    let k = k();
    let ctx = &s.ctx;
    let tt = term(s, t);
    let nf = s.print(&k.normalize(ctx, &tt).map_err(kerr)?);
    let c = NAT_CONTEXTS[hole % NAT_CONTEXTS.len()];
    for u in [nf, format!("(fun q : nat => q) ({t})")] {
        let lhs = term(s, &c.replace('#', t));
        let rhs = term(s, &c.replace('#', &u));
        ensure!(k.conv(ctx, &term(s, t), &term(s, &u)).map_err(kerr)?, "premise failed");
        ensure!(k.conv(ctx, &lhs, &rhs).map_err(kerr)?, "congruence failed in `{c}` for `{u}`");
    }
    Ok(())
}

/// Reflexivity and transitivity of subtyping on instances of one skeleton.
pub fn prop_subtype_preorder(s: &Session, sk: &Skel, l1: &[u32], l2: &[u32], l3: &[u32]) -> PResult {
    let k = k();
    let ctx = &s.ctx;
    let [t, u, v] = [l1, l2, l3].map(|l| term(s, &inst(sk, l)));
    for x in [&t, &u, &v] {
        k.infer_sort(ctx, x).map_err(kerr)?;
        ensure!(k.subtype(ctx, x, x).map_err(kerr)?.holds, "subtyping not reflexive on {x}");
    }
    let tu = k.subtype(ctx, &t, &u).map_err(kerr)?.holds;
    let uv = k.subtype(ctx, &u, &v).map_err(kerr)?.holds;
    if tu && uv {
        ensure!(
            k.subtype(ctx, &t, &v).map_err(kerr)?.holds,
            "subtyping not transitive: {} ⪯ {} ⪯ {}",
            s.print(&t),
            s.print(&u),
            s.print(&v)
        );
    }
    Ok(())
}

/// Subtyping survives extending the context with a fresh hypothesis.
pub fn prop_subtype_weakening(s: &Session, sk: &Skel, l1: &[u32], l2: &[u32], extra: usize) -> PResult {
    let k = k();
    let [t, u] = [l1, l2].map(|l| term(s, &inst(sk, l)));
    let before = k.subtype(&s.ctx, &t, &u).map_err(kerr)?.holds;
    let tys = ["nat", "A", "Prop", "List1.list nat", "nat -> Type@{0}"];
    let b = term(s, tys[extra % tys.len()]);
    let wider = k
        .extend(&s.ctx, Entry::Hyp {
            name: Name::new("zz_fresh"),
            ty: b,
        })
        .map_err(kerr)?;
    let after = k.subtype(&wider, &t, &u).map_err(kerr)?.holds;
    ensure!(!before || after, "subtyping lost under weakening");
    Ok(())
}

/// The type of a normal form is a subtype of the type of the original term.
pub fn prop_subject_reduction(s: &Session, t: &str) -> PResult {
    let k = k();
    let ctx = &s.ctx;
    let t = term(s, t);
    let ty = k.infer(ctx, &t).map_err(kerr)?;
    let n = k.normalize(ctx, &t).map_err(kerr)?;
    let ty2 = k.infer(ctx, &n).map_err(kerr)?;
    ensure!(
        k.subtype(ctx, &ty2, &ty).map_err(kerr)?.holds,
        "type {} of the normal form is not a subtype of {}",
        s.print(&ty2),
        s.print(&ty)
    );
    Ok(())
}

/// Printing then parsing gives back the same term.
pub fn prop_round_trip(s: &Session, t: &str) -> PResult {
    let t = term(s, t);
    let printed = print_term(&s.ctx, &t);
    let back = parse_term(&s.scope(), &printed).map_err(|e| TestCaseError::fail(format!("{printed}: {e:?}")))?;
    ensure!(back == t, "round trip changed `{printed}`");
    Ok(())
}

/// Oracle evaluation (eliminators as fixpoints) agrees with the normal form.
pub fn prop_oracle_agreement(s: &Session, t: &str, depth: usize) -> PResult {
    let k = k();
    let ctx: &Context = &s.ctx;
    let t = term(s, t);
    let n = k.normalize(ctx, &t).map_err(kerr)?;
    let nat = Term::ind("Nat", "nat");
    let o = Oracle::new(ctx, depth);
    let lhs = match o.denote(&t, &nat) {
        Err(e) if e.slug() == "depth-exhausted" => return Ok(()),
        r => r.map_err(|e| TestCaseError::fail(e.to_string()))?,
    };
    let rhs = o.denote(&n, &nat).map_err(|e| TestCaseError::fail(e.to_string()))?;
    ensure!(lhs == rhs, "oracle {lhs} vs normal form {rhs}");
    Ok(())
}

// Set-theoretic properties

pub fn small_value() -> impl Strategy<Value = SetValue> {
    let leaf = (0usize..4).prop_map(SetValue::nat);
    leaf.prop_recursive(2, 12, 3, |inner| {
        prop_oneof![
            proptest::collection::btree_set(inner.clone(), 0..3).prop_map(SetValue::Fin),
            (inner.clone(), inner).prop_map(|(a, b)| SetValue::pair(a, b)),
        ]
    })
}

pub fn small_graph() -> impl Strategy<Value = BTreeMap<SetValue, BTreeSet<SetValue>>> {
    proptest::collection::btree_map(small_value(), proptest::collection::btree_set(small_value(), 0..3), 0..4)
}

pub fn prop_decode_encode(g: &BTreeMap<SetValue, BTreeSet<SetValue>>, probe: &SetValue) -> PResult {
    let pairs: Vec<_> = g.iter().map(|(x, y)| (x.clone(), SetValue::Fin(y.clone()))).collect();
    let e = encode(&pairs).map_err(|e| TestCaseError::fail(e.to_string()))?;
    for (x, y) in &pairs {
        ensure!(&decode(&e, x) == y, "decode(encode(g), {x}) ≠ g({x})");
    }
    if !g.contains_key(probe) {
        ensure!(decode(&e, probe) == SetValue::empty(), "value outside the domain");
    }
    Ok(())
}

/// For `B(x) ⊆ 1`, the encoded function space is `⊆ 1`, and `= 1` exactly
/// when every `B(x)` is 1.
pub fn prop_aczel(dom: &BTreeSet<usize>, full: &[bool]) -> PResult {
    let xs: Vec<SetValue> = dom.iter().map(|&i| SetValue::nat(i)).collect();
    let is_full = |x: &SetValue| {
        let i = x.as_fin().map_or(0, BTreeSet::len);
        full[i % full.len()]
    };
    let space = encoded_pi(&xs, &|x| {
        if is_full(x) {
            [SetValue::empty()].into_iter().collect()
        } else {
            BTreeSet::new()
        }
    })
    .map_err(|e| TestCaseError::fail(e.to_string()))?;
    let space = SetValue::Fin(space);
    let one = SetValue::one();
    ensure!(
        space.as_fin().unwrap().is_subset(one.as_fin().unwrap()),
        "encoded space {space} is not a subset of 1"
    );
    let all = xs.iter().all(is_full);
    ensure!((space == one) == all, "space is {space} but every B(x) = 1 is {all}");
    Ok(())
}

pub fn rule_set() -> impl Strategy<Value = RuleSet> {
    let rule = (proptest::collection::btree_set(0usize..8, 0..3), 0usize..8).prop_map(|(ps, c)| Rule {
        premises: ps.into_iter().map(SetValue::nat).collect(),
        conclusion: SetValue::nat(c),
    });
    proptest::collection::vec(rule, 0..12).prop_map(RuleSet::new)
}

/// Stages grow monotonically; once a stage repeats, it is a fixpoint and
/// further iteration changes nothing.
pub fn prop_stages(r: &RuleSet, max: usize) -> PResult {
    let st = lfp_stages(r, max);
    ensure!(st.stages[0].is_empty(), "stage 0 is not empty");
    for a in 0..st.stages.len() {
        for b in a..st.stages.len() {
            ensure!(st.stages[a].is_subset(&st.stages[b]), "stage {a} ⊄ stage {b}");
        }
    }
    if st.closed {
        let last = st.last();
        ensure!(r.conclusions(last).is_subset(last), "closed stage is not a fixpoint");
        let longer = lfp_stages(r, max + 5);
        ensure!(longer == st, "more iterations changed a closed result");
    } else {
        ensure!(st.stages.len() == max + 1, "unclosed run stopped early");
    }
    Ok(())
}

// Positivity against a direct reading of the four rules.

fn mentions(s: &BTreeSet<Name>, t: &Term) -> bool {
    t.free_vars().iter().any(|x| s.contains(x))
}

fn head_in(s: &BTreeSet<Name>, t: &Term) -> bool {
    let (h, args) = t.unapply();
    matches!(h, Term::Var(d) if s.contains(d)) && args.iter().all(|a| !mentions(s, a))
}

/// Rule (i).
pub fn reference_pos_arg(s: &BTreeSet<Name>, t: &Term) -> bool {
    match t {
        Term::Pi(_, y, b) => !mentions(s, y) && reference_pos_arg(s, b),
        _ => head_in(s, t),
    }
}

/// Rules (ii)–(iv).
pub fn reference_pos(s: &BTreeSet<Name>, t: &Term) -> bool {
    if head_in(s, t) {
        return true;
    }
    match t {
        Term::Pi(_, p, b) => {
            let arrow = !b.mentions_bound(0) && reference_pos_arg(s, p) && reference_pos(s, b);
            let forall = !mentions(s, p) && reference_pos(s, b);
            arrow || forall
        }
        _ => false,
    }
}

pub fn pos_type() -> impl Strategy<Value = Term> {
    let atom = prop_oneof![
        Just(Term::var("d")),
        Just(Term::var("e")),
        Just(Term::var("n")),
        Just(Term::app(Term::var("d"), Term::var("n"))),
        Just(Term::app(Term::var("d"), Term::var("d"))),
    ];
    atom.prop_recursive(4, 16, 2, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Term::arrow(a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| {
                let x = Name::new("x");
                Term::pi(&x, a, &Term::app(b, Term::Var(x.clone())))
            }),
            (inner.clone(), inner).prop_map(|(a, b)| Term::app(a, b)),
        ]
    })
}

pub fn prop_positivity(t: &Term, with_e: bool) -> PResult {
    let mut s: BTreeSet<Name> = [Name::new("d")].into_iter().collect();
    if with_e {
        s.insert(Name::new("e"));
    }
    ensure!(strict_pos(&s, t) == reference_pos(&s, t), "strict_pos disagrees on {t}");
    ensure!(strict_pos_arg(&s, t) == reference_pos_arg(&s, t), "strict_pos_arg disagrees on {t}");
    Ok(())
}

pub fn cfg(cases: u32) -> ProptestConfig {
    ProptestConfig {
        cases,
        failure_persistence: None,
        ..ProptestConfig::default()
    }
}

// ---------------------------------------------------------------------------
// Enumeration of closed normal terms

/// Sorts used as atoms by the enumerator.
pub const ENUM_SORTS: [u32; 3] = [0, 1, 2];

/// Every β-normal term (no lets, no globals) of doubled size exactly `size`
/// with `k` bound variables in scope.
pub fn normal_terms(size: u64, k: u32, memo: &mut BTreeMap<(u64, u32, bool), Vec<Term>>) -> Vec<Term> {
    enumerate(size, k, false, memo)
}

fn enumerate(size: u64, k: u32, neutral: bool, memo: &mut BTreeMap<(u64, u32, bool), Vec<Term>>) -> Vec<Term> {
    if let Some(v) = memo.get(&(size, k, neutral)) {
        return v.clone();
    }
    let mut out = Vec::new();
    if size == 2 {
        out.extend((0..k).map(Term::Bound));
        if !neutral {
            out.push(Term::prop());
            out.extend(ENUM_SORTS.iter().map(|&i| Term::ty(i)));
        }
    } else if size > 2 {
        for a in (2..size - 2).step_by(2) {
            let b = size - 2 - a;
            for f in enumerate(a, k, true, memo) {
                for x in enumerate(b, k, false, memo) {
                    out.push(Term::app(f.clone(), x));
                }
            }
            if !neutral {
                let doms = enumerate(a, k, false, memo);
                let bodies = enumerate(b, k + 1, false, memo);
                for d in &doms {
                    for body in &bodies {
                        out.push(Term::Pi(
                            pcuic::syntax::Hint::anon(),
                            d.clone().into(),
                            body.clone().into(),
                        ));
                        out.push(Term::Lam(
                            pcuic::syntax::Hint::anon(),
                            d.clone().into(),
                            body.clone().into(),
                        ));
                    }
                }
            }
        }
    }
    memo.insert((size, k, neutral), out.clone());
    out
}

/// Closed normal terms of size at most `max` that check against `goal` in
/// the empty context, and the number of candidates examined.
pub fn inhabitants(goal: &Term, max: u64) -> (Vec<Term>, usize) {
    let k = Kernel::new(pcuic::KernelConfig {
        fuel: 10_000,
        ..Default::default()
    });
    let ctx = Context::new();
    let mut memo = BTreeMap::new();
    let mut found = Vec::new();
    let mut seen = 0;
    for size in (2..=max).step_by(2) {
        for t in normal_terms(size, 0, &mut memo) {
            seen += 1;
            k.refuel();
            if k.check(&ctx, &t, goal).is_ok() {
                found.push(t);
            }
        }
    }
    (found, seen)
}
