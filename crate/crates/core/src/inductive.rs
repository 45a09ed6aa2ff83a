//! Structural side of inductive blocks: telescopes, `ConstrsOf`, strict
//! positivity, eliminator case types and recursor unfolding.
//!
//! Well-formedness checking needs typing and lives with the checker
//! (`Kernel::check_block_wf`); everything here is purely syntactic.

use std::collections::BTreeSet;
use std::sync::Arc;

use thiserror::Error;

use crate::syntax::{fresh, Elim, Hint, InductiveBlock, Name, Term};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum InductiveError {
    #[error("constructor type is not strictly positive in its block")]
    NotStrictlyPositive,
    #[error("constructor expects {expected} arguments, got {actual}")]
    ArityMismatch { expected: usize, actual: usize },
    #[error("no motive for inductive type `{0}`")]
    MissingMotive(Name),
}

/// How the inductive types of a block occur in a term.
#[derive(Clone, Copy, Debug)]
pub enum Family<'a> {
    /// Block-local names, as in the member types of a declaration.
    Local(&'a BTreeSet<Name>),
    /// References to the block bound under the given name.
    Global(&'a Name, &'a BTreeSet<Name>),
}

impl<'a> Family<'a> {
    /// The inductive type named by `head`, if it is a member of the family.
    pub fn member_of(&self, head: &Term) -> Option<&'a Name> {
        match (self, head) {
            (Family::Local(s), Term::Var(x)) => s.get(x),
            (Family::Global(b, s), Term::Ind(r)) if &r.block == *b => s.get(&r.member),
            _ => None,
        }
    }

    /// Whether any member of the family occurs in `t`.
    pub fn occurs(&self, t: &Term) -> bool {
        match self {
            Family::Local(s) => t.mentions_any(s),
            Family::Global(..) => self.occurs_global(t),
        }
    }

    fn occurs_global(&self, t: &Term) -> bool {
        match t {
            Term::Ind(_) => self.member_of(t).is_some(),
            Term::Var(_) | Term::Bound(_) | Term::Sort(_) => false,
            Term::Pi(_, a, b) | Term::Lam(_, a, b) | Term::App(a, b) => {
                self.occurs_global(a) || self.occurs_global(b)
            }
            Term::Let(_, v, ty, b) => {
                self.occurs_global(v) || self.occurs_global(ty) || self.occurs_global(b)
            }
            Term::Elim(e) => {
                self.occurs_global(&e.scrutinee)
                    || e.motives.iter().any(|m| self.occurs_global(m))
                    || e.cases.iter().any(|c| self.occurs_global(c))
            }
        }
    }
}

/// The first `n` binders of a member type, split off from the rest.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TelescopeView {
    pub params: Vec<(Hint, Term)>,
    /// The remainder, with the parameters as loose bound variables.
    pub tail: Term,
}

impl TelescopeView {
    /// Splits off `n` leading products; `None` if there are fewer.
    pub fn split(t: &Term, n: usize) -> Option<TelescopeView> {
        let mut params = Vec::with_capacity(n);
        let mut cur = t;
        for _ in 0..n {
            match cur {
                Term::Pi(h, a, b) => {
                    params.push((h.clone(), (**a).clone()));
                    cur = b;
                }
                _ => return None,
            }
        }
        Some(TelescopeView {
            params,
            tail: cur.clone(),
        })
    }

    pub fn rebuild(&self) -> Term {
        self.params.iter().rev().fold(self.tail.clone(), |acc, (h, a)| {
            Term::Pi(h.clone(), Arc::new(a.clone()), Arc::new(acc))
        })
    }
}

/// Number of leading products, syntactically.
pub fn pi_count(t: &Term) -> usize {
    let mut n = 0;
    let mut cur = t;
    while let Term::Pi(_, _, b) = cur {
        n += 1;
        cur = b;
    }
    n
}

/// Strips every leading product, returning the binder count and conclusion.
pub fn conclusion(t: &Term) -> (usize, &Term) {
    let mut n = 0;
    let mut cur = t;
    while let Term::Pi(_, _, b) = cur {
        n += 1;
        cur = b;
    }
    (n, cur)
}

/// Constructors of `constrs` whose conclusion is headed by the inductive `d`.
pub fn constrs_of(constrs: &[(Name, Term)], d: &Name) -> Vec<Name> {
    constrs
        .iter()
        .filter(|(_, ty)| {
            let (_, concl) = conclusion(ty);
            matches!(concl.unapply().0, Term::Var(x) if x == d)
        })
        .map(|(c, _)| c.clone())
        .collect()
}

/// `∀ȳ:Ȳ. D w̄` with `D` in the family and no member occurring in `Ȳ`, `w̄`.
pub fn strict_pos_arg_in(fam: Family<'_>, t: &Term) -> bool {
    match t {
        Term::Pi(_, a, b) => !fam.occurs(a) && strict_pos_arg_in(fam, b),
        _ => applied_member(fam, t).is_some(),
    }
}

/// Strict positivity of a constructor type.
pub fn strict_pos_in(fam: Family<'_>, t: &Term) -> bool {
    match t {
        Term::Pi(_, a, b) => {
            if !fam.occurs(a) {
                strict_pos_in(fam, b)
            } else {
                !b.mentions_bound(0) && strict_pos_arg_in(fam, a) && strict_pos_in(fam, b)
            }
        }
        _ => applied_member(fam, t).is_some(),
    }
}

pub fn strict_pos(s: &BTreeSet<Name>, t: &Term) -> bool {
    strict_pos_in(Family::Local(s), t)
}

pub fn strict_pos_arg(s: &BTreeSet<Name>, t: &Term) -> bool {
    strict_pos_arg_in(Family::Local(s), t)
}

/// `D w̄` with `D` in the family and no member occurring in `w̄`.
fn applied_member<'a>(fam: Family<'a>, t: &Term) -> Option<&'a Name> {
    let (head, args) = t.unapply();
    let d = fam.member_of(head)?;
    args.iter().all(|a| !fam.occurs(a)).then_some(d)
}

/// Whether the product `∀_:dom. body` is a recursive argument position.
fn is_recursive(fam: Family<'_>, dom: &Term, body: &Term) -> bool {
    !body.mentions_bound(0) && strict_pos_arg_in(fam, dom) && strict_pos_in(fam, body)
}

/// Motive and case-eliminator vectors of an elimination, with the block they
/// refer to.
#[derive(Clone, Copy)]
pub struct ElimData<'a> {
    pub block_name: &'a Name,
    pub block: &'a InductiveBlock,
    pub inds: &'a BTreeSet<Name>,
    pub motives: &'a [Term],
    pub cases: &'a [Term],
}

impl<'a> ElimData<'a> {
    fn family(&self) -> Family<'a> {
        Family::Global(self.block_name, self.inds)
    }

    fn motive(&self, d: &Name) -> Result<&'a Term, InductiveError> {
        self.block
            .ind_index(d)
            .and_then(|i| self.motives.get(i))
            .ok_or_else(|| InductiveError::MissingMotive(d.clone()))
    }
}

/// Type of the case-eliminator for a constructor whose (global) type is
/// `ctype`, given the term `head` built so far.
pub fn elim_type(data: ElimData<'_>, head: Term, ctype: &Term) -> Result<Term, InductiveError> {
    let fam = data.family();
    match ctype {
        Term::Pi(h, dom, body) if is_recursive(fam, dom, body) => {
            let p = fresh(hint_or(h, "p"));
            let ih = ih_type(data, dom, &Term::Var(p.clone()))?;
            let rest = elim_type(
                data,
                Term::app(head, Term::Var(p.clone())),
                &body.instantiate(&Term::Var(p.clone())),
            )?;
            Ok(Term::pi(&p, (**dom).clone(), &Term::arrow(ih, rest)))
        }
        Term::Pi(h, dom, body) => {
            let x = fresh(hint_or(h, "x"));
            let rest = elim_type(data, Term::app(head, Term::Var(x.clone())), &body.open(&x))?;
            Ok(Term::pi(&x, (**dom).clone(), &rest))
        }
        _ => {
            let (hd, args) = ctype.unapply();
            let d = fam
                .member_of(hd)
                .ok_or(InductiveError::NotStrictlyPositive)?;
            let q = data.motive(d)?.clone();
            Ok(Term::apps(
                q,
                args.into_iter().cloned().chain(std::iter::once(head)),
            ))
        }
    }
}

/// `∀ȳ:Ȳ. Q_d w̄ (p ȳ)` for a recursive argument `p : ∀ȳ:Ȳ. d w̄`.
fn ih_type(data: ElimData<'_>, arg_ty: &Term, p: &Term) -> Result<Term, InductiveError> {
    map_rec_arg(data, arg_ty, 0, &|d, args, k| {
        let q = data.motive(d)?.clone();
        let py = Term::apps(p.clone(), (0..k).rev().map(Term::Bound));
        Ok(Term::apps(q, args.iter().cloned().chain(std::iter::once(py))))
    }, true)
}

/// Walks `∀ȳ:Ȳ. d w̄`, rebuilding the binders (as products or lambdas) and
/// replacing the conclusion with `core(d, w̄, |ȳ|)`.
fn map_rec_arg(
    data: ElimData<'_>,
    t: &Term,
    depth: u32,
    core: &dyn Fn(&Name, &[Term], u32) -> Result<Term, InductiveError>,
    as_pi: bool,
) -> Result<Term, InductiveError> {
    match t {
        Term::Pi(h, a, b) => {
            let b2 = map_rec_arg(data, b, depth + 1, core, as_pi)?;
            Ok(if as_pi {
                Term::Pi(h.clone(), a.clone(), Arc::new(b2))
            } else {
                Term::Lam(h.clone(), a.clone(), Arc::new(b2))
            })
        }
        _ => {
            let (hd, args) = t.unapply();
            let d = data
                .family()
                .member_of(hd)
                .ok_or(InductiveError::NotStrictlyPositive)?;
            let args: Vec<Term> = args.into_iter().cloned().collect();
            core(d, &args, depth)
        }
    }
}

/// Right-hand side of ι: applies `f` to the constructor arguments, inserting
/// an elimination of every recursive argument right after it.
pub fn rec_unfold(
    data: ElimData<'_>,
    f: Term,
    args: &[Term],
    ctype: &Term,
) -> Result<Term, InductiveError> {
    let expected = pi_count(ctype);
    if args.len() != expected {
        return Err(InductiveError::ArityMismatch {
            expected,
            actual: args.len(),
        });
    }
    let fam = data.family();
    let mut acc = f;
    let mut ty = ctype.clone();
    for b in args {
        let next = match &ty {
            Term::Pi(_, dom, body) => {
                if is_recursive(fam, dom, body) {
                    let wrapper = map_rec_arg(
                        data,
                        dom,
                        0,
                        &|d, _, k| {
                            let scrut = Term::apps(b.clone(), (0..k).rev().map(Term::Bound));
                            Ok(Term::Elim(Arc::new(Elim {
                                scrutinee: scrut,
                                block: data.block_name.clone(),
                                target: d.clone(),
                                motives: data.motives.to_vec(),
                                cases: data.cases.to_vec(),
                            })))
                        },
                        false,
                    )?;
                    acc = Term::apps(acc, [b.clone(), wrapper]);
                } else {
                    acc = Term::app(acc, b.clone());
                }
                body.instantiate(b)
            }
            _ => unreachable!("argument count checked against products"),
        };
        ty = next;
    }
    Ok(acc)
}

fn hint_or<'a>(h: &'a Hint, default: &'a str) -> &'a str {
    match h.name().base() {
        "_" | "" => default,
        s => s,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn n(s: &str) -> Name {
        Name::new(s)
    }

    fn set(xs: &[&str]) -> BTreeSet<Name> {
        xs.iter().map(|x| n(x)).collect()
    }

    fn nat_block() -> InductiveBlock {
        let nat = Term::var("nat");
        InductiveBlock {
            params: 0,
            inds: vec![(n("nat"), Term::ty(0))],
            constrs: vec![
                (n("zero"), nat.clone()),
                (n("succ"), Term::arrow(nat.clone(), nat)),
            ],
        }
    }

    #[test]
    fn constrs_of_nat_and_forest() {
        let b = nat_block();
        assert_eq!(constrs_of(&b.constrs, &n("nat")), vec![n("zero"), n("succ")]);
        assert!(constrs_of(&b.constrs, &n("bogus")).is_empty());

        let tree = Term::var("FTree");
        let forest = Term::var("Forest");
        let constrs = vec![
            (n("node"), Term::arrow(forest.clone(), tree.clone())),
            (n("Fnil"), forest.clone()),
            (
                n("Fcons"),
                Term::arrow(tree, Term::arrow(forest.clone(), forest)),
            ),
        ];
        assert_eq!(constrs_of(&constrs, &n("Forest")), vec![n("Fnil"), n("Fcons")]);
    }

    #[test]
    fn positivity_examples() {
        let d = Term::var("d");
        let nat = Term::var("nat");
        assert!(strict_pos(&set(&["nat"]), &Term::arrow(nat.clone(), nat)));
        let bad = Term::arrow(Term::arrow(d.clone(), d.clone()), d.clone());
        assert!(!strict_pos(&set(&["d"]), &bad));
        let fcons = Term::arrow(
            Term::var("FTree"),
            Term::arrow(Term::var("Forest"), Term::var("Forest")),
        );
        assert!(strict_pos(&set(&["Forest", "FTree"]), &fcons));
        // Functional recursive argument: (nat -> d) -> d.
        let inf = Term::arrow(Term::arrow(Term::var("nat"), d.clone()), d.clone());
        assert!(strict_pos(&set(&["d"]), &inf));
        // Member in an index of the conclusion.
        let idx = Term::app(d.clone(), d);
        assert!(!strict_pos(&set(&["d"]), &idx));
    }

    #[test]
    fn telescope_roundtrip() {
        let a = n("A");
        let t = Term::pi(
            &a,
            Term::ty(0),
            &Term::arrow(Term::var("A"), Term::app(Term::var("list"), Term::var("A"))),
        );
        let v = TelescopeView::split(&t, 1).unwrap();
        assert_eq!(v.params.len(), 1);
        assert_eq!(v.rebuild(), t);
        assert!(TelescopeView::split(&Term::prop(), 1).is_none());
    }

    #[test]
    fn nat_elim_types() {
        let b = nat_block();
        let bn = n("Nat");
        let inds = b.ind_names();
        let q = Term::var("Q");
        let motives = [q.clone()];
        let data = ElimData {
            block_name: &bn,
            block: &b,
            inds: &inds,
            motives: &motives,
            cases: &[],
        };
        let nat = Term::ind("Nat", "nat");
        let zero = Term::ind("Nat", "zero");
        let succ = Term::ind("Nat", "succ");
        assert_eq!(
            elim_type(data, zero.clone(), &nat).unwrap(),
            Term::app(q.clone(), zero)
        );
        let ty = elim_type(data, succ.clone(), &Term::arrow(nat.clone(), nat.clone())).unwrap();
        let p = n("p");
        let expected = Term::pi(
            &p,
            nat,
            &Term::arrow(
                Term::app(q.clone(), Term::var("p")),
                Term::app(q, Term::app(succ, Term::var("p"))),
            ),
        );
        assert_eq!(ty, expected);
    }

    #[test]
    fn nat_rec_unfold() {
        let b = nat_block();
        let bn = n("Nat");
        let inds = b.ind_names();
        let motives = [Term::var("Q")];
        let cases = [Term::var("fz"), Term::var("fs")];
        let data = ElimData {
            block_name: &bn,
            block: &b,
            inds: &inds,
            motives: &motives,
            cases: &cases,
        };
        let nat = Term::ind("Nat", "nat");
        assert_eq!(
            rec_unfold(data, Term::var("fz"), &[], &nat).unwrap(),
            Term::var("fz")
        );
        let k = Term::var("k");
        let r = rec_unfold(
            data,
            Term::var("fs"),
            &[k.clone()],
            &Term::arrow(nat.clone(), nat.clone()),
        )
        .unwrap();
        let rec = Term::elim(k.clone(), "Nat", "nat", motives.to_vec(), cases.to_vec());
        assert_eq!(r, Term::apps(Term::var("fs"), [k, rec]));
        assert!(matches!(
            rec_unfold(data, Term::var("fs"), &[], &Term::arrow(nat.clone(), nat)),
            Err(InductiveError::ArityMismatch { expected: 1, actual: 0 })
        ));
    }
}
