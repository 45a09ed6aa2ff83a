//! Acceptance report: one PASS/FAIL line per criterion. Runs as a plain
//! binary (`harness = false`) and exits non-zero if any criterion fails.

mod common;

use std::fmt::Write as _;
use std::fs;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use common::*;
use pcuic::driver::Session;
use pcuic::oracle::{Oracle, SetValue};
use pcuic::surface::parse;
use pcuic::{Kernel, Term};
use proptest::test_runner::TestRunner;

type Outcome = Result<String, String>;

fn run_corpus(name: &str) -> Result<(Session, Vec<String>), String> {
    let src = fs::read_to_string(corpus_dir().join(name)).map_err(|e| format!("{name}: {e}"))?;
    let file = parse(&src).map_err(|e| format!("{name}: {e:?}"))?;
    let mut s = Session::default();
    let mut outputs = Vec::new();
    for o in s.run(&file, true) {
        match o.result {
            Ok(Some(out)) => outputs.push(out),
            Ok(None) => {}
            Err(e) => return Err(format!("{name}: declaration {} failed: {e}", o.index)),
        }
    }
    Ok((s, outputs))
}

fn corpus_fidelity() -> Outcome {
    let start = Instant::now();
    let mut checked = 0;
    for name in ["nat.pcuic", "lists.pcuic", "forest.pcuic", "sum.pcuic"] {
        run_corpus(name)?;
        checked += 1;
    }
    let (s, _) = run_corpus("nat.pcuic")?;
    let k = Kernel::default();
    let ty = k.infer(&s.ctx, &term(&s, "nat_ind")).map_err(|e| e.to_string())?;
    let stated = term(
        &s,
        "forall P : nat -> Prop, P zero -> (forall x : nat, P x -> P (succ x)) -> forall n : nat, P n",
    );
    if !k.conv(&s.ctx, &ty, &stated).map_err(|e| e.to_string())? {
        return Err(format!("nat_ind : {}", s.print(&ty)));
    }
    for (file, name) in [
        ("nat.pcuic", "add"),
        ("lists.pcuic", "length"),
        ("sum.pcuic", "isNat"),
        ("sum.pcuic", "toNat"),
        ("sum.pcuic", "sum_el'"),
        ("sum.pcuic", "sum_el"),
        ("forest.pcuic", "FTree"),
        ("forest.pcuic", "Forest"),
    ] {
        let (s, _) = run_corpus(file)?;
        s.scope().resolve(name).ok_or_else(|| format!("{file} does not define {name}"))?;
    }
    let elapsed = start.elapsed();
    if elapsed >= Duration::from_secs(1) {
        return Err(format!("took {elapsed:?}"));
    }
    Ok(format!("{checked} files, nat_ind type exact, {elapsed:?}"))
}

fn list_source() -> String {
    let mut src = String::new();
    for i in 0..=4 {
        writeln!(
            src,
            "inductive List{i} params 1 {{ list : forall A : Type@{{{i}}}, Type@{{{i}}} := \
             nil : forall A : Type@{{{i}}}, list A; \
             cons : forall A : Type@{{{i}}}, A -> list A -> list A }}."
        )
        .unwrap();
    }
    src.push_str(
        "axiom A : Type@{0}. axiom a : A. def a' : A := a.
         axiom l : List0.list A. def l' : List0.list A := l.",
    );
    src
}

fn cumulative_lists() -> Outcome {
    let s = session_of(&list_source());
    let k = Kernel::default();
    let mut checks = 0;
    let mut failures = Vec::new();
    for i in 0..=4 {
        for j in 0..=4 {
            let t = |src: String| term(&s, &src);
            let sub = k
                .subtype(&s.ctx, &t(format!("List{i}.list A")), &t(format!("List{j}.list A")))
                .map(|v| v.holds);
            let pairs = [
                (format!("List{i}.list A"), format!("List{j}.list A")),
                (format!("List{i}.nil A"), format!("List{j}.nil A")),
                (format!("List{i}.cons A a l"), format!("List{j}.cons A a' l'")),
            ];
            checks += 1;
            if sub != Ok(true) {
                failures.push(format!("list_{i} A ⪯ list_{j} A"));
            }
            for (x, y) in pairs {
                checks += 1;
                if k.conv(&s.ctx, &t(x.clone()), &t(y.clone())) != Ok(true) {
                    failures.push(format!("{x} ≃ {y}"));
                }
            }
        }
    }
    if failures.is_empty() {
        Ok(format!("{checks} judgements"))
    } else {
        Err(format!("{} failures, first: {}", failures.len(), failures[0]))
    }
}

fn num(n: usize) -> SetValue {
    (0..n).fold(SetValue::Tag(0, vec![]), |acc, _| SetValue::Tag(1, vec![acc]))
}

fn oracle_agreement() -> Outcome {
    let s = prelude();
    let k = Kernel::default();
    let o = Oracle::new(&s.ctx, 12);
    let nat = Term::ind("Nat", "nat");
    let mut cases = 0;
    for m in 0..=5 {
        for n in 0..=5 {
            let t = term(&s, &format!("add ({}) ({})", numeral(m), numeral(n)));
            let nf = k.normalize(&s.ctx, &t).map_err(|e| e.to_string())?;
            if nf != term(&s, &numeral(m + n)) {
                return Err(format!("add {m} {n} normalized to {}", s.print(&nf)));
            }
            let v = o.denote(&t, &nat).map_err(|e| format!("oracle on add {m} {n}: {e}"))?;
            if v != num(m + n) {
                return Err(format!("oracle gives {v} for add {m} {n}"));
            }
            cases += 1;
        }
    }
    let (_, out) = run_corpus("sum.pcuic")?;
    let last = out.last().cloned().unwrap_or_default();
    if last != "succ (succ (succ zero))" {
        return Err(format!("sum_el [1, 2] gave {last}"));
    }
    Ok(format!("{cases} add cases, sum_el [1, 2] = succ (succ (succ zero))"))
}

fn negative_suite() -> Outcome {
    let expected = [
        ("neg_positivity.pcuic", "block-ill-formed(strict-positivity)"),
        ("neg_prop_arity.pcuic", "block-ill-formed(prop-arity)"),
        ("type_in_type.pcuic", "universe-inconsistency"),
        ("neg_partial_cind.pcuic", "not-subtype(not-fully-applied)"),
    ];
    let mut ok = 0;
    for (name, kind) in expected {
        let src = fs::read_to_string(corpus_dir().join(name)).map_err(|e| format!("{name}: {e}"))?;
        let file = parse(&src).map_err(|e| format!("{name}: {e:?}"))?;
        let outs = Session::default().run(&file, true);
        let errs: Vec<_> = outs.iter().filter_map(|o| o.result.as_ref().err()).collect();
        match errs.as_slice() {
            [] => return Err(format!("{name} was accepted")),
            [e] if e.kind.slug() == kind => ok += 1,
            es => return Err(format!("{name}: expected {kind}, got {}", es[0].kind.slug())),
        }
    }
    Ok(format!("{ok}/4 exact error kinds"))
}

fn property_suites() -> Outcome {
    const CASES: u32 = 500;
    let s = prelude();
    let mut ran = 0;
    macro_rules! suite {
        ($name:literal, $strategy:expr, $body:expr) => {{
            let mut runner = TestRunner::new(cfg(CASES));
            runner
                .run(&$strategy, $body)
                .map_err(|e| format!("{}: {e}", $name))?;
            ran += 1;
        }};
    }
    suite!("substitution free variables", (raw_term(), raw_term()), |(t, u)| prop_subst_fv(&t, &u));
    suite!("substitution simultaneity", (raw_term(), raw_term(), raw_term()), |(t, u, v)| {
        prop_subst_simultaneous(&t, &u, &v)
    });
    suite!(
        "conversion equivalence",
        (nat_src(3, 0, OPEN), nat_src(3, 0, OPEN), nat_src(3, 0, OPEN)),
        |(a, b, c)| prop_conv_equivalence(&s, &a, &b, &c)
    );
    suite!(
        "conversion transitivity on closed terms",
        (nat_src(2, 0, SMALL), nat_src(2, 0, SMALL), nat_src(2, 0, SMALL)),
        |(a, b, c)| prop_conv_equivalence(&s, &a, &b, &c)
    );
    suite!("conversion congruence", (nat_src(3, 0, OPEN), 0usize..16), |(t, h)| {
        prop_conv_congruence(&s, &t, h)
    });
    suite!("subtyping preorder", (skel(), levels(), levels(), levels()), |(sk, a, b, c)| {
        prop_subtype_preorder(&s, &sk, &a, &b, &c)
    });
    suite!("subtyping weakening", (skel(), levels(), levels(), 0usize..5), |(sk, a, b, e)| {
        prop_subtype_weakening(&s, &sk, &a, &b, e)
    });
    suite!("subject reduction (nat)", nat_src(3, 0, OPEN), |t| prop_subject_reduction(&s, &t));
    suite!("subject reduction (lists)", list_src(3, 0, OPEN), |t| prop_subject_reduction(&s, &t));
    suite!("decode after encode", (small_graph(), small_value()), |(g, p)| prop_decode_encode(&g, &p));
    suite!(
        "impredicative encoding",
        (
            proptest::collection::btree_set(0usize..5, 0..5),
            proptest::collection::vec(proptest::bool::weighted(0.8), 1..6)
        ),
        |(d, f)| prop_aczel(&d, &f)
    );
    suite!("stage monotonicity and closure", (rule_set(), 0usize..12), |(r, m)| prop_stages(&r, m));
    Ok(format!("{ran} suites × {CASES} cases"))
}

fn consistency() -> Outcome {
    let start = Instant::now();
    let goal = Term::pi(&"x".into(), Term::prop(), &Term::var("x"));
    let (found, seen) = inhabitants(&goal, 12);
    let elapsed = start.elapsed();
    if let Some(t) = found.first() {
        return Err(format!("inhabitant found: {t:?}"));
    }
    if elapsed >= Duration::from_secs(30) {
        return Err(format!("{seen} candidates took {elapsed:?}"));
    }
    Ok(format!("{seen} closed normal terms up to size 12, none inhabit ∀x:Prop.x, {elapsed:?}"))
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 6] = [
        ("corpus fidelity", corpus_fidelity),
        ("cumulative inductives", cumulative_lists),
        ("reduction oracle agreement", oracle_agreement),
        ("negative suite", negative_suite),
        ("property suites", property_suites),
        ("consistency smoke test", consistency),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        match f() {
            Ok(detail) => println!("PASS {} {name}: {detail}", i + 1),
            Err(detail) => {
                failed += 1;
                println!("FAIL {} {name}: {detail}", i + 1);
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
