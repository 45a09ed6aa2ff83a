//! Type inference and checking, context and block well-formedness.

use std::collections::BTreeSet;
use std::sync::Arc;

use crate::conversion::Kernel;
use crate::error::{BlockErrorKind, Result, TypeError, TypeErrorKind};
use crate::inductive::{
    conclusion, constrs_of, pi_count, strict_pos, ElimData, TelescopeView,
};
use crate::syntax::{fresh, Context, Elim, Entry, IndRef, InductiveBlock, Name, Sort, Term};

/// Sort of a product whose domain lives in `s1` and codomain in `s2`.
pub fn prod_rule(s1: Sort, s2: Sort) -> Sort {
    match (s1, s2) {
        (_, Sort::Prop) => Sort::Prop,
        (Sort::Prop, t) => t,
        (Sort::Type(i), Sort::Type(j)) => Sort::Type(i.max(j)),
    }
}

impl Kernel {
    /// The principal type of `t`.
    pub fn infer(&self, ctx: &Context, t: &Term) -> Result<Term> {
        match t {
            Term::Sort(Sort::Prop) => Ok(Term::ty(0)),
            Term::Sort(Sort::Type(l)) => Ok(Term::ty(l.0 + 1)),
            Term::Var(x) => match ctx.lookup(x) {
                Some(Entry::Hyp { ty, .. } | Entry::Def { ty, .. }) => Ok(ty.clone()),
                _ => Err(TypeError::new(TypeErrorKind::UnboundVariable(x.clone()))),
            },
            Term::Bound(i) => Err(TypeError::new(TypeErrorKind::UnboundVariable(Name::new(
                &format!("#{i}"),
            )))),
            Term::Pi(h, a, b) => {
                let s1 = self.infer_sort(ctx, a)?;
                let x = fresh(h.name().base());
                let inner = ctx.with_hyp(x.clone(), (**a).clone());
                let s2 = self.infer_sort(&inner, &b.open(&x))?;
                Ok(Term::Sort(prod_rule(s1, s2)))
            }
            Term::Lam(h, a, b) => {
                self.infer_sort(ctx, a)?;
                let x = fresh(h.name().base());
                let inner = ctx.with_hyp(x.clone(), (**a).clone());
                let bt = self.infer(&inner, &b.open(&x))?;
                self.infer_sort(&inner, &bt)?;
                Ok(Term::Pi(h.clone(), a.clone(), Arc::new(bt.close(&x))))
            }
            Term::Let(h, v, ty, b) => {
                self.infer_sort(ctx, ty)?;
                self.check(ctx, v, ty)?;
                let x = fresh(h.name().base());
                let inner = ctx.with_def(x.clone(), (**v).clone(), (**ty).clone());
                let bt = self.infer(&inner, &b.open(&x))?;
                Ok(bt.replace_vars(&|y| (y == &x).then(|| (**v).clone())))
            }
            Term::App(f, a) => {
                let ft = self.infer(ctx, f)?;
                let w = self.whnf(ctx, &ft)?;
                let Term::Pi(_, dom, cod) = &w else {
                    return Err(TypeError {
                        actual: Some(ft),
                        ..TypeError::new(TypeErrorKind::NotAFunction)
                    });
                };
                let at = self.infer(ctx, a)?;
                let ok = if self.config.strict_app {
                    self.conv(ctx, &at, dom)?
                } else {
                    self.subtype(ctx, &at, dom)?.holds
                };
                if !ok {
                    return Err(TypeError::mismatch(
                        TypeErrorKind::AppMismatch,
                        (**dom).clone(),
                        at,
                    ));
                }
                Ok(cod.instantiate(a))
            }
            Term::Ind(r) => self.infer_ind(ctx, r),
            Term::Elim(e) => self.infer_elim(ctx, e),
        }
    }

    fn infer_ind(&self, ctx: &Context, r: &IndRef) -> Result<Term> {
        let block = ctx
            .block(&r.block)
            .ok_or_else(|| TypeError::new(TypeErrorKind::UnknownInductive(r.block.clone())))?;
        if let Some(ty) = block.ind_type(&r.member) {
            Ok(ty.clone())
        } else if let Some(ty) = block.constr_type(&r.member) {
            Ok(block.globalize(&r.block, ty))
        } else {
            Err(TypeError::new(TypeErrorKind::UnknownInductive(r.member.clone())))
        }
    }

    fn infer_elim(&self, ctx: &Context, e: &Elim) -> Result<Term> {
        let block = ctx
            .block(&e.block)
            .ok_or_else(|| TypeError::new(TypeErrorKind::UnknownInductive(e.block.clone())))?;
        let k = block
            .ind_index(&e.target)
            .ok_or_else(|| TypeError::new(TypeErrorKind::UnknownInductive(e.target.clone())))?;
        if e.motives.len() != block.inds.len() {
            return Err(TypeError::new(TypeErrorKind::ElimMotiveMismatch));
        }
        if e.cases.len() != block.constrs.len() {
            return Err(TypeError::new(TypeErrorKind::ElimCaseMismatch));
        }

        // The shared result sort is read off the first motive.
        let (d0, d0_ty) = &block.inds[0];
        let q0_ty = self.infer(ctx, &e.motives[0])?;
        let s_res = self
            .motive_sort(ctx, &q0_ty, pi_count(d0_ty) + 1)?
            .ok_or_else(|| {
                TypeError::mismatch(
                    TypeErrorKind::ElimMotiveMismatch,
                    motive_type(&e.block, d0, d0_ty, Sort::ty(0)),
                    q0_ty.clone(),
                )
            })?;
        for ((d, d_ty), q) in block.inds.iter().zip(&e.motives) {
            let expected = motive_type(&e.block, d, d_ty, s_res);
            self.check_as(ctx, q, &expected, TypeErrorKind::ElimMotiveMismatch)?;
        }

        let target_ty = &block.inds[k].1;
        let st = self.infer(ctx, &e.scrutinee)?;
        let w = self.whnf_spine(ctx, &st)?;
        let args = match &w.head {
            Term::Ind(r)
                if r.member == e.target
                    && w.spine.len() == pi_count(target_ty)
                    && ctx.block(&r.block).is_some_and(|b| b.is_ind(&r.member)) =>
            {
                w.spine.clone()
            }
            _ => {
                return Err(TypeError {
                    actual: Some(st),
                    ..TypeError::new(TypeErrorKind::ElimScrutineeMismatch)
                })
            }
        };
        let expected = Term::apps(Term::ind(e.block.clone(), e.target.clone()), args.clone());
        if !self.subtype(ctx, &w.term(), &expected)?.holds {
            return Err(TypeError::mismatch(
                TypeErrorKind::ElimScrutineeMismatch,
                expected,
                st,
            ));
        }

        let inds = block.ind_names();
        let data = ElimData {
            block_name: &e.block,
            block,
            inds: &inds,
            motives: &e.motives,
            cases: &e.cases,
        };
        for ((c, c_ty), f) in block.constrs.iter().zip(&e.cases) {
            let ctype = block.globalize(&e.block, c_ty);
            let head = Term::ind(e.block.clone(), c.clone());
            let expected = crate::inductive::elim_type(data, head, &ctype).map_err(|_| {
                TypeError {
                    culprit: Some(c.clone()),
                    ..TypeError::new(TypeErrorKind::ElimCaseMismatch)
                }
            })?;
            self.check_as(ctx, f, &expected, TypeErrorKind::ElimCaseMismatch)
                .map_err(|err| TypeError {
                    culprit: err.culprit.clone().or_else(|| Some(c.clone())),
                    ..err
                })?;
        }

        Ok(Term::apps(
            e.motives[k].clone(),
            args.into_iter().chain(std::iter::once(e.scrutinee.clone())),
        ))
    }

    /// Strips `n` products from a motive type and returns the final sort.
    fn motive_sort(&self, ctx: &Context, ty: &Term, n: usize) -> Result<Option<Sort>> {
        let mut ctx = ctx.clone();
        let mut cur = self.whnf(&ctx, ty)?;
        for _ in 0..n {
            let Term::Pi(h, a, b) = &cur else {
                return Ok(None);
            };
            let x = fresh(h.name().base());
            ctx = ctx.with_hyp(x.clone(), (**a).clone());
            cur = self.whnf(&ctx, &b.open(&x))?;
        }
        Ok(cur.as_sort())
    }

    /// Infers the type of `t` and requires it to be a sort.
    pub fn infer_sort(&self, ctx: &Context, t: &Term) -> Result<Sort> {
        let ty = self.infer(ctx, t)?;
        match self.whnf(ctx, &ty)? {
            Term::Sort(s) => Ok(s),
            _ => Err(TypeError {
                actual: Some(ty),
                ..TypeError::new(TypeErrorKind::NotASort)
            }),
        }
    }

    /// `Γ ⊢ t : T` by inference and subsumption.
    pub fn check(&self, ctx: &Context, t: &Term, ty: &Term) -> Result<()> {
        let inferred = self.infer(ctx, t)?;
        if self.subtype(ctx, &inferred, ty)?.holds {
            return Ok(());
        }
        let both_sorts = self.whnf(ctx, &inferred)?.as_sort().is_some()
            && self.whnf(ctx, ty)?.as_sort().is_some();
        let kind = if both_sorts {
            TypeErrorKind::UniverseInconsistency
        } else {
            TypeErrorKind::TypeMismatch
        };
        Err(TypeError::mismatch(kind, ty.clone(), inferred))
    }

    /// Like [`Kernel::check`], but reports a failed subsumption as `kind`.
    fn check_as(&self, ctx: &Context, t: &Term, ty: &Term, kind: TypeErrorKind) -> Result<()> {
        let inferred = self.infer(ctx, t)?;
        if self.subtype(ctx, &inferred, ty)?.holds {
            Ok(())
        } else {
            Err(TypeError::mismatch(kind, ty.clone(), inferred))
        }
    }

    /// Well-formedness of a whole context, entry by entry.
    pub fn wf_ctx(&self, ctx: &Context) -> Result<()> {
        let mut prefix = Context::new();
        for (i, entry) in ctx.entries().into_iter().enumerate() {
            prefix = self
                .extend(&prefix, entry.clone())
                .map_err(|err| TypeError {
                    entry: Some(i),
                    culprit: err.culprit.clone().or_else(|| Some(entry.name().clone())),
                    ..err
                })?;
        }
        Ok(())
    }

    /// Checks `entry` against a well-formed `ctx` and appends it.
    pub fn extend(&self, ctx: &Context, entry: Entry) -> Result<Context> {
        match &entry {
            Entry::Hyp { name, ty } => {
                self.fresh_name(ctx, name)?;
                self.infer_sort(ctx, ty)?;
            }
            Entry::Def { name, body, ty } => {
                self.fresh_name(ctx, name)?;
                self.infer_sort(ctx, ty)?;
                self.check(ctx, body, ty)?;
            }
            Entry::Block { name, block } => {
                self.check_block_wf(ctx, name, block)?;
            }
        }
        Ok(ctx.push(entry))
    }

    fn fresh_name(&self, ctx: &Context, name: &Name) -> Result<()> {
        if ctx.contains(name) {
            Err(TypeError::new(TypeErrorKind::DuplicateName(name.clone())))
        } else {
            Ok(())
        }
    }

    /// Side conditions and typing premises for adding the block `b` under the
    /// name `block_name`.
    pub fn check_block_wf(&self, ctx: &Context, block_name: &Name, b: &InductiveBlock) -> Result<()> {
        use BlockErrorKind as K;
        let fail = |kind, member: &Name| Err(TypeError::block(kind, member.clone()));

        // (a) names
        if ctx.block(block_name).is_some() {
            return fail(K::DuplicateName, block_name);
        }
        let mut seen = BTreeSet::new();
        for m in b.member_names() {
            if !seen.insert(m.clone()) || ctx.contains(m) {
                return fail(K::DuplicateName, m);
            }
        }
        if b.inds.is_empty() {
            return fail(K::ArityNotSort, block_name);
        }

        // (b) shared parameter telescope
        let mut telescope: Option<Vec<Term>> = None;
        for (m, ty) in b.inds.iter().chain(&b.constrs) {
            let Some(view) = TelescopeView::split(ty, b.params) else {
                return fail(K::ParameterTelescope, m);
            };
            let doms: Vec<Term> = view.params.into_iter().map(|(_, t)| t).collect();
            match &telescope {
                None => telescope = Some(doms),
                Some(t) if *t == doms => {}
                Some(_) => return fail(K::ParameterTelescope, m),
            }
        }

        // (d) arities
        let mut block_sort = None;
        for (d, ty) in &b.inds {
            match conclusion(ty).1 {
                Term::Sort(Sort::Prop) => return fail(K::PropArity, d),
                Term::Sort(s) => match block_sort {
                    None => block_sort = Some(*s),
                    Some(s0) if s0 == *s => {}
                    Some(_) => return fail(K::MixedSorts, d),
                },
                _ => return fail(K::ArityNotSort, d),
            }
        }
        let block_sort = block_sort.expect("non-empty");

        // (c), (e) conclusions and parametricity
        let inds = b.ind_names();
        for (c, ty) in &b.constrs {
            let (k, concl) = conclusion(ty);
            let (head, args) = concl.unapply();
            match head {
                Term::Var(d) if inds.contains(d) => {}
                _ => return fail(K::NotAConstructor, c),
            }
            let verbatim = args.len() >= b.params
                && (0..b.params).all(|i| *args[i] == Term::Bound((k - 1 - i) as u32));
            if !verbatim {
                return fail(K::Parametricity, c);
            }
        }
        debug_assert!(inds
            .iter()
            .map(|d| constrs_of(&b.constrs, d).len())
            .sum::<usize>()
            == b.constrs.len());

        // (f) strict positivity
        for (c, ty) in &b.constrs {
            if !strict_pos(&inds, ty) {
                return fail(K::StrictPositivity, c);
            }
        }

        // (g) typing
        let ill_typed = |member: &Name, err: TypeError| {
            if err.is_fuel() {
                err
            } else {
                TypeError::block(K::IllTyped, member.clone()).with_source(err)
            }
        };
        let mut with_inds = ctx.clone();
        for (d, ty) in &b.inds {
            self.infer_sort(ctx, ty).map_err(|e| ill_typed(d, e))?;
            with_inds = with_inds.with_hyp(d.clone(), ty.clone());
        }
        for (c, ty) in &b.constrs {
            let view = TelescopeView::split(ty, b.params).expect("checked above");
            let mut inner = with_inds.clone();
            let mut names = Vec::new();
            for (h, p) in &view.params {
                let x = fresh(h.name().base());
                let p = names.iter().rev().fold(p.clone(), |acc: Term, n| acc.open(n));
                inner = inner.with_hyp(x.clone(), p);
                names.push(x);
            }
            let tail = names.iter().rev().fold(view.tail.clone(), |acc, n| acc.open(n));
            let s = self.infer_sort(&inner, &tail).map_err(|e| ill_typed(c, e))?;
            let fits = self
                .subtype(&inner, &Term::Sort(s), &Term::Sort(block_sort))
                .map_err(|e| ill_typed(c, e))?
                .holds;
            if !fits {
                return Err(ill_typed(
                    c,
                    TypeError::mismatch(
                        TypeErrorKind::UniverseInconsistency,
                        Term::Sort(block_sort),
                        Term::Sort(s),
                    ),
                ));
            }
        }
        Ok(())
    }
}

/// `∀x̄:T̄. d x̄ → s` for the inductive `d : ∀x̄:T̄. s₀` of block `block`.
pub fn motive_type(block: &Name, d: &Name, d_ty: &Term, s: Sort) -> Term {
    fn go(block: &Name, d: &Name, t: &Term, depth: u32, s: Sort) -> Term {
        match t {
            Term::Pi(h, a, b) => Term::Pi(
                h.clone(),
                a.clone(),
                Arc::new(go(block, d, b, depth + 1, s)),
            ),
            _ => Term::arrow(
                Term::apps(
                    Term::ind(block.clone(), d.clone()),
                    (0..depth).rev().map(Term::Bound),
                ),
                Term::Sort(s),
            ),
        }
    }
    go(block, d, d_ty, 0, s)
}

pub fn infer(ctx: &Context, t: &Term) -> Result<Term> {
    Kernel::default().infer(ctx, t)
}

pub fn check(ctx: &Context, t: &Term, ty: &Term) -> Result<()> {
    Kernel::default().check(ctx, t, ty)
}

pub fn wf_ctx(ctx: &Context) -> Result<()> {
    Kernel::default().wf_ctx(ctx)
}

pub fn check_block_wf(ctx: &Context, name: &Name, b: &InductiveBlock) -> Result<()> {
    Kernel::default().check_block_wf(ctx, name, b)
}
