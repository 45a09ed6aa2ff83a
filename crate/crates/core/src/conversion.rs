//! Judgemental equality decided by reduction: weak-head normalisation with
//! β, δ, ζ and ι, full normalisation, and the conversion check.

use std::cell::Cell;
use std::sync::Arc;

use crate::error::{Result, TypeError};
use crate::inductive::{pi_count, rec_unfold, ElimData};
use crate::syntax::{fresh, Context, Elim, Entry, IndRef, InductiveBlock, Name, Term};

pub const DEFAULT_FUEL: u64 = 1_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct KernelConfig {
    /// Maximum number of head reduction steps per top-level query.
    pub fuel: u64,
    /// Check application arguments by conversion instead of subtyping.
    pub strict_app: bool,
}

impl Default for KernelConfig {
    fn default() -> Self {
        KernelConfig {
            fuel: DEFAULT_FUEL,
            strict_app: false,
        }
    }
}

/// Entry point for every judgement. Holds the reduction budget, which is
/// shared by all queries until [`Kernel::refuel`] is called.
#[derive(Debug)]
pub struct Kernel {
    pub config: KernelConfig,
    remaining: Cell<u64>,
}

impl Default for Kernel {
    fn default() -> Self {
        Kernel::new(KernelConfig::default())
    }
}

/// Result of weak-head normalisation: a head that is not a redex, and the
/// arguments it is applied to.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WhnfResult {
    pub head: Term,
    pub spine: Vec<Term>,
}

impl WhnfResult {
    pub fn term(&self) -> Term {
        Term::apps(self.head.clone(), self.spine.iter().cloned())
    }
}

/// What the scrutinee of a stuck eliminator looks like.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum IotaBlock {
    /// Not headed by a constructor at all.
    NotAConstructor,
    /// A constructor of a block not included in the eliminated one.
    UnrelatedBlock(IndRef),
}

impl Kernel {
    pub fn new(config: KernelConfig) -> Self {
        Kernel {
            config,
            remaining: Cell::new(config.fuel),
        }
    }

    pub fn refuel(&self) {
        self.remaining.set(self.config.fuel);
    }

    pub fn fuel_left(&self) -> u64 {
        self.remaining.get()
    }

    fn tick(&self) -> Result<()> {
        match self.remaining.get() {
            0 => Err(TypeError::fuel()),
            r => {
                self.remaining.set(r - 1);
                Ok(())
            }
        }
    }

    pub fn whnf(&self, ctx: &Context, t: &Term) -> Result<Term> {
        Ok(self.whnf_spine(ctx, t)?.term())
    }

    pub fn whnf_spine(&self, ctx: &Context, t: &Term) -> Result<WhnfResult> {
        // Arguments are kept in reverse so the next one is at the end.
        let mut stack: Vec<Term> = Vec::new();
        let mut head = t.clone();
        loop {
            match &head {
                Term::App(f, a) => {
                    stack.push((**a).clone());
                    head = (**f).clone();
                }
                Term::Lam(_, _, body) if !stack.is_empty() => {
                    self.tick()?;
                    let a = stack.pop().expect("non-empty");
                    head = body.instantiate(&a);
                }
                Term::Let(_, v, _, body) => {
                    self.tick()?;
                    head = body.instantiate(v);
                }
                Term::Var(x) => match ctx.lookup(x) {
                    Some(Entry::Def { body, .. }) => {
                        self.tick()?;
                        head = body.clone();
                    }
                    _ => break,
                },
                Term::Elim(e) => match self.iota(ctx, e)? {
                    Ok(r) => {
                        self.tick()?;
                        head = r;
                    }
                    Err(_) => break,
                },
                _ => break,
            }
        }
        stack.reverse();
        Ok(WhnfResult { head, spine: stack })
    }

    /// One ι step, or the reason the eliminator is stuck.
    pub fn iota(&self, ctx: &Context, e: &Elim) -> Result<std::result::Result<Term, IotaBlock>> {
        let scrut = self.whnf_spine(ctx, &e.scrutinee)?;
        let Term::Ind(r) = &scrut.head else {
            return Ok(Err(IotaBlock::NotAConstructor));
        };
        let Some(src) = ctx.block(&r.block) else {
            return Ok(Err(IotaBlock::NotAConstructor));
        };
        let Some(block) = ctx.block(&e.block) else {
            return Ok(Err(IotaBlock::NotAConstructor));
        };
        if !src.is_constr(&r.member) || !block.is_constr(&r.member) {
            return Ok(Err(IotaBlock::NotAConstructor));
        }
        if r.block != e.block && !self.ind_leq(ctx, src, block)? {
            return Ok(Err(IotaBlock::UnrelatedBlock(r.clone())));
        }
        let ctype = block.globalize(&e.block, block.constr_type(&r.member).expect("constructor"));
        if scrut.spine.len() != pi_count(&ctype) {
            return Ok(Err(IotaBlock::NotAConstructor));
        }
        let idx = block.constr_index(&r.member).expect("constructor");
        let Some(f) = e.cases.get(idx) else {
            return Ok(Err(IotaBlock::NotAConstructor));
        };
        let inds = block.ind_names();
        let data = ElimData {
            block_name: &e.block,
            block,
            inds: &inds,
            motives: &e.motives,
            cases: &e.cases,
        };
        Ok(rec_unfold(data, f.clone(), &scrut.spine, &ctype)
            .map_err(|_| IotaBlock::NotAConstructor))
    }

    /// Full normal form, reducing under binders.
    pub fn normalize(&self, ctx: &Context, t: &Term) -> Result<Term> {
        let w = self.whnf_spine(ctx, t)?;
        let head = match &w.head {
            Term::Pi(h, a, b) => {
                let x = fresh(h.name().base());
                let a2 = self.normalize(ctx, a)?;
                let inner = ctx.with_hyp(x.clone(), (**a).clone());
                let b2 = self.normalize(&inner, &b.open(&x))?;
                Term::Pi(h.clone(), Arc::new(a2), Arc::new(b2.close(&x)))
            }
            Term::Lam(h, a, b) => {
                let x = fresh(h.name().base());
                let a2 = self.normalize(ctx, a)?;
                let inner = ctx.with_hyp(x.clone(), (**a).clone());
                let b2 = self.normalize(&inner, &b.open(&x))?;
                Term::Lam(h.clone(), Arc::new(a2), Arc::new(b2.close(&x)))
            }
            Term::Elim(e) => Term::Elim(Arc::new(Elim {
                scrutinee: self.normalize(ctx, &e.scrutinee)?,
                block: e.block.clone(),
                target: e.target.clone(),
                motives: self.normalize_all(ctx, &e.motives)?,
                cases: self.normalize_all(ctx, &e.cases)?,
            })),
            other => other.clone(),
        };
        let spine = self.normalize_all(ctx, &w.spine)?;
        Ok(Term::apps(head, spine))
    }

    fn normalize_all(&self, ctx: &Context, ts: &[Term]) -> Result<Vec<Term>> {
        ts.iter().map(|t| self.normalize(ctx, t)).collect()
    }

    /// Judgemental equality.
    pub fn conv(&self, ctx: &Context, t: &Term, u: &Term) -> Result<bool> {
        if t == u {
            return Ok(true);
        }
        let wt = self.whnf_spine(ctx, t)?;
        let wu = self.whnf_spine(ctx, u)?;
        self.conv_whnf(ctx, &wt, &wu)
    }

    fn conv_whnf(&self, ctx: &Context, t: &WhnfResult, u: &WhnfResult) -> Result<bool> {
        if t == u {
            return Ok(true);
        }
        match (&t.head, &u.head) {
            (Term::Lam(h, a, b1), Term::Lam(_, _, b2)) => {
                // A λ head never carries a spine after whnf.
                let x = fresh(h.name().base());
                let inner = ctx.with_hyp(x.clone(), (**a).clone());
                return self.conv(&inner, &b1.open(&x), &b2.open(&x));
            }
            (Term::Lam(h, a, b), _) => return self.conv_eta(ctx, h.name(), a, b, &u.term()),
            (_, Term::Lam(h, a, b)) => return self.conv_eta(ctx, h.name(), a, b, &t.term()),
            _ => {}
        }
        if t.spine.len() != u.spine.len() {
            return Ok(false);
        }
        let heads_equal = match (&t.head, &u.head) {
            (Term::Sort(a), Term::Sort(b)) => a == b,
            (Term::Pi(h, a1, b1), Term::Pi(_, a2, b2)) => {
                if !self.conv(ctx, a1, a2)? {
                    return Ok(false);
                }
                let x = fresh(h.name().base());
                let inner = ctx.with_hyp(x.clone(), (**a1).clone());
                self.conv(&inner, &b1.open(&x), &b2.open(&x))?
            }
            (Term::Var(x), Term::Var(y)) => x == y,
            (Term::Bound(i), Term::Bound(j)) => i == j,
            (Term::Ind(r1), Term::Ind(r2)) if r1 == r2 => true,
            (Term::Ind(r1), Term::Ind(r2)) if r1.member == r2.member => {
                // Ind-Eq / Constr-Eq: the spines are compared first since
                // they are cheap compared to block inclusion.
                if !self.conv_spines(ctx, &t.spine, &u.spine)? {
                    return Ok(false);
                }
                return self.conv_ind_heads(ctx, r1, r2, t.spine.len());
            }
            (Term::Elim(e1), Term::Elim(e2)) => self.conv_elim(ctx, e1, e2)?,
            _ => false,
        };
        Ok(heads_equal && self.conv_spines(ctx, &t.spine, &u.spine)?)
    }

    fn conv_eta(
        &self,
        ctx: &Context,
        hint: &Name,
        dom: &Term,
        body: &Term,
        other: &Term,
    ) -> Result<bool> {
        let x = fresh(hint.base());
        let inner = ctx.with_hyp(x.clone(), dom.clone());
        self.conv(
            &inner,
            &body.open(&x),
            &Term::app(other.clone(), Term::Var(x.clone())),
        )
    }

    fn conv_spines(&self, ctx: &Context, a: &[Term], b: &[Term]) -> Result<bool> {
        for (x, y) in a.iter().zip(b) {
            if !self.conv(ctx, x, y)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    fn conv_elim(&self, ctx: &Context, e1: &Elim, e2: &Elim) -> Result<bool> {
        if e1.block != e2.block
            || e1.target != e2.target
            || e1.motives.len() != e2.motives.len()
            || e1.cases.len() != e2.cases.len()
        {
            return Ok(false);
        }
        Ok(self.conv(ctx, &e1.scrutinee, &e2.scrutinee)?
            && self.conv_spines(ctx, &e1.motives, &e2.motives)?
            && self.conv_spines(ctx, &e1.cases, &e2.cases)?)
    }

    /// Equality of fully applied members of two different blocks sharing a
    /// member name.
    fn conv_ind_heads(&self, ctx: &Context, r1: &IndRef, r2: &IndRef, nargs: usize) -> Result<bool> {
        let (Some(b1), Some(b2)) = (ctx.block(&r1.block), ctx.block(&r2.block)) else {
            return Ok(false);
        };
        if b1.is_ind(&r1.member) && b2.is_ind(&r2.member) {
            if !fully_applied(b1, &r1.member, nargs) || !fully_applied(b2, &r2.member, nargs) {
                return Ok(false);
            }
            Ok(self.ind_leq(ctx, b1, b2)? && self.ind_leq(ctx, b2, b1)?)
        } else if b1.is_constr(&r1.member) && b2.is_constr(&r2.member) {
            if !fully_applied(b1, &r1.member, nargs) || !fully_applied(b2, &r2.member, nargs) {
                return Ok(false);
            }
            Ok(self.ind_leq(ctx, b1, b2)? || self.ind_leq(ctx, b2, b1)?)
        } else {
            Ok(false)
        }
    }
}

/// Whether a member applied to `nargs` arguments is fully applied.
pub fn fully_applied(block: &InductiveBlock, member: &Name, nargs: usize) -> bool {
    block
        .ind_type(member)
        .or_else(|| block.constr_type(member))
        .is_some_and(|t| pi_count(t) == nargs)
}

pub fn whnf(ctx: &Context, t: &Term) -> Result<Term> {
    Kernel::default().whnf(ctx, t)
}

pub fn normalize(ctx: &Context, t: &Term) -> Result<Term> {
    Kernel::default().normalize(ctx, t)
}

pub fn conv(ctx: &Context, t: &Term, u: &Term) -> Result<bool> {
    Kernel::default().conv(ctx, t, u)
}
