//! The subtyping judgement `Γ ⊢ T ⪯ U` and block inclusion `B ⊑ B′`.

use std::fmt;

use crate::conversion::{fully_applied, Kernel, WhnfResult};
use crate::error::{Result, SubtypeFailure};
use crate::inductive::{conclusion, TelescopeView};
use crate::syntax::{fresh, Context, IndRef, InductiveBlock, Name, Sort, Term};

/// Name of a subtyping rule, as recorded in verdict traces.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SubtypeRule {
    PropInType,
    CumType,
    CumProd,
    CInd,
    EqCum,
}

impl SubtypeRule {
    pub fn as_str(self) -> &'static str {
        match self {
            SubtypeRule::PropInType => "Prop-in-Type",
            SubtypeRule::CumType => "Cum-Type",
            SubtypeRule::CumProd => "Cum-Prod",
            SubtypeRule::CInd => "C-Ind",
            SubtypeRule::EqCum => "Eq-Cum",
        }
    }
}

impl fmt::Display for SubtypeRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SubtypeVerdict {
    pub holds: bool,
    /// Rules applied, outermost first. Empty when the verdict is negative.
    pub trace: Vec<SubtypeRule>,
    pub failure: Option<SubtypeFailure>,
}

impl SubtypeVerdict {
    fn yes(rule: SubtypeRule) -> Self {
        SubtypeVerdict {
            holds: true,
            trace: vec![rule],
            failure: None,
        }
    }

    fn no(failure: SubtypeFailure) -> Self {
        SubtypeVerdict {
            holds: false,
            trace: Vec::new(),
            failure: Some(failure),
        }
    }
}

impl Kernel {
    pub fn subtype(&self, ctx: &Context, t: &Term, u: &Term) -> Result<SubtypeVerdict> {
        if t == u {
            return Ok(SubtypeVerdict::yes(SubtypeRule::EqCum));
        }
        let wt = self.whnf_spine(ctx, t)?;
        let wu = self.whnf_spine(ctx, u)?;
        match (&wt.head, &wu.head) {
            (Term::Sort(Sort::Prop), Term::Sort(Sort::Type(_))) => {
                Ok(SubtypeVerdict::yes(SubtypeRule::PropInType))
            }
            (Term::Sort(Sort::Type(i)), Term::Sort(Sort::Type(j))) => Ok(if i <= j {
                SubtypeVerdict::yes(SubtypeRule::CumType)
            } else {
                SubtypeVerdict::no(SubtypeFailure::Universe)
            }),
            (Term::Sort(Sort::Type(_)), Term::Sort(Sort::Prop)) => {
                Ok(SubtypeVerdict::no(SubtypeFailure::Universe))
            }
            (Term::Pi(h, a1, b1), Term::Pi(_, a2, b2)) => {
                if !self.conv(ctx, a1, a2)? {
                    return Ok(SubtypeVerdict::no(SubtypeFailure::Mismatch));
                }
                let x = fresh(h.name().base());
                let inner = ctx.with_hyp(x.clone(), (**a1).clone());
                let v = self.subtype(&inner, &b1.open(&x), &b2.open(&x))?;
                Ok(if v.holds {
                    let mut trace = vec![SubtypeRule::CumProd];
                    trace.extend(v.trace);
                    SubtypeVerdict {
                        holds: true,
                        trace,
                        failure: None,
                    }
                } else {
                    v
                })
            }
            (Term::Ind(r1), Term::Ind(r2))
                if r1.member == r2.member && self.is_inductive(ctx, r1) =>
            {
                self.applied_ind_subtype_whnf(ctx, r1, &wt, r2, &wu)
            }
            _ => {
                let eq = self.conv(ctx, &wt.term(), &wu.term())?;
                Ok(if eq {
                    SubtypeVerdict::yes(SubtypeRule::EqCum)
                } else {
                    SubtypeVerdict::no(SubtypeFailure::Mismatch)
                })
            }
        }
    }

    fn is_inductive(&self, ctx: &Context, r: &IndRef) -> bool {
        ctx.block(&r.block).is_some_and(|b| b.is_ind(&r.member))
    }

    /// `B.d v̄ ⪯ B′.d v̄′` for inductive heads sharing a member name.
    pub fn applied_ind_subtype(&self, ctx: &Context, t: &Term, u: &Term) -> Result<SubtypeVerdict> {
        let wt = self.whnf_spine(ctx, t)?;
        let wu = self.whnf_spine(ctx, u)?;
        match (&wt.head, &wu.head) {
            (Term::Ind(r1), Term::Ind(r2)) if r1.member == r2.member => {
                self.applied_ind_subtype_whnf(ctx, r1, &wt, r2, &wu)
            }
            _ => Ok(SubtypeVerdict::no(SubtypeFailure::Mismatch)),
        }
    }

    fn applied_ind_subtype_whnf(
        &self,
        ctx: &Context,
        r1: &IndRef,
        t: &WhnfResult,
        r2: &IndRef,
        u: &WhnfResult,
    ) -> Result<SubtypeVerdict> {
        let (Some(b1), Some(b2)) = (ctx.block(&r1.block), ctx.block(&r2.block)) else {
            return Ok(SubtypeVerdict::no(SubtypeFailure::Mismatch));
        };
        if !fully_applied(b1, &r1.member, t.spine.len())
            || !fully_applied(b2, &r2.member, u.spine.len())
        {
            return Ok(SubtypeVerdict::no(SubtypeFailure::NotFullyApplied));
        }
        for (x, y) in t.spine.iter().zip(&u.spine) {
            if !self.conv(ctx, x, y)? {
                return Ok(SubtypeVerdict::no(SubtypeFailure::Mismatch));
            }
        }
        if r1.block == r2.block {
            return Ok(SubtypeVerdict::yes(SubtypeRule::EqCum));
        }
        Ok(if self.ind_leq(ctx, b1, b2)? {
            SubtypeVerdict::yes(SubtypeRule::CInd)
        } else {
            SubtypeVerdict::no(SubtypeFailure::BlocksNotIncluded)
        })
    }

    /// Block inclusion `B ⊑ B′`. Parameters are bound at the types of the
    /// left block and never compared.
    pub fn ind_leq(&self, ctx: &Context, b: &InductiveBlock, b2: &InductiveBlock) -> Result<bool> {
        if b.params != b2.params
            || b.inds.len() != b2.inds.len()
            || b.constrs.len() != b2.constrs.len()
            || b.inds.iter().any(|(d, _)| !b2.is_ind(d))
            || b.constrs.iter().any(|(c, _)| !b2.is_constr(c))
        {
            return Ok(false);
        }
        // Local inductive names stand for themselves on both sides.
        let mut base = ctx.clone();
        for (d, ty) in &b.inds {
            base = base.with_hyp(d.clone(), ty.clone());
        }
        for (d, ty) in &b.inds {
            let ty2 = b2.ind_type(d).expect("checked above");
            let (Some(v1), Some(v2)) = (
                TelescopeView::split(ty, b.params),
                TelescopeView::split(ty2, b2.params),
            ) else {
                return Ok(false);
            };
            let (inner, names) = open_params(&base, &v1);
            let a1 = open_with(&v1.tail, &names);
            let a2 = open_with(&v2.tail, &names);
            if !self.arities_leq(&inner, &a1, &a2)? {
                return Ok(false);
            }
        }
        for (c, ty) in &b.constrs {
            let ty2 = b2.constr_type(c).expect("checked above");
            let head1 = conclusion(ty).1.unapply().0;
            let head2 = conclusion(ty2).1.unapply().0;
            if head1 != head2 {
                return Ok(false);
            }
            let (Some(v1), Some(v2)) = (
                TelescopeView::split(ty, b.params),
                TelescopeView::split(ty2, b2.params),
            ) else {
                return Ok(false);
            };
            let (inner, names) = open_params(&base, &v1);
            let c1 = open_with(&v1.tail, &names);
            let c2 = open_with(&v2.tail, &names);
            if !self.constr_args_leq(&inner, &c1, &c2)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Pairwise subtyping of two arities `∀z̄:Z̄.s` and `∀z̄:Z̄′.s′`; sorts are
    /// not compared.
    fn arities_leq(&self, ctx: &Context, a1: &Term, a2: &Term) -> Result<bool> {
        match (a1, a2) {
            (Term::Pi(h, z1, r1), Term::Pi(_, z2, r2)) => {
                if !self.subtype(ctx, z1, z2)?.holds {
                    return Ok(false);
                }
                let x = fresh(h.name().base());
                let inner = ctx.with_hyp(x.clone(), (**z1).clone());
                self.arities_leq(&inner, &r1.open(&x), &r2.open(&x))
            }
            (Term::Pi(..), _) | (_, Term::Pi(..)) => Ok(false),
            _ => Ok(true),
        }
    }

    /// Pairwise subtyping of constructor arguments, then conversion of the
    /// conclusion indices.
    fn constr_args_leq(&self, ctx: &Context, c1: &Term, c2: &Term) -> Result<bool> {
        match (c1, c2) {
            (Term::Pi(h, x1, r1), Term::Pi(_, x2, r2)) => {
                if !self.subtype(ctx, x1, x2)?.holds {
                    return Ok(false);
                }
                let x = fresh(h.name().base());
                let inner = ctx.with_hyp(x.clone(), (**x1).clone());
                self.constr_args_leq(&inner, &r1.open(&x), &r2.open(&x))
            }
            (Term::Pi(..), _) | (_, Term::Pi(..)) => Ok(false),
            _ => {
                let (h1, w1) = c1.unapply();
                let (h2, w2) = c2.unapply();
                if h1 != h2 || w1.len() != w2.len() {
                    return Ok(false);
                }
                for (x, y) in w1.iter().zip(&w2) {
                    if !self.conv(ctx, x, y)? {
                        return Ok(false);
                    }
                }
                Ok(true)
            }
        }
    }
}

/// Binds the parameters of `view` as fresh hypotheses.
fn open_params(ctx: &Context, view: &TelescopeView) -> (Context, Vec<Name>) {
    let mut inner = ctx.clone();
    let mut names = Vec::with_capacity(view.params.len());
    for (h, ty) in &view.params {
        let x = fresh(h.name().base());
        let ty = open_with(ty, &names);
        inner = inner.with_hyp(x.clone(), ty);
        names.push(x);
    }
    (inner, names)
}

/// Instantiates the loose bound variables of a telescope tail, where the
/// last name is bound innermost.
fn open_with(t: &Term, names: &[Name]) -> Term {
    names.iter().rev().fold(t.clone(), |acc, x| acc.open(x))
}

pub fn subtype(ctx: &Context, t: &Term, u: &Term) -> Result<SubtypeVerdict> {
    Kernel::default().subtype(ctx, t, u)
}

pub fn ind_leq(ctx: &Context, b: &InductiveBlock, b2: &InductiveBlock) -> Result<bool> {
    Kernel::default().ind_leq(ctx, b, b2)
}
