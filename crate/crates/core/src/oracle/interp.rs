//! Interpretation of inductive blocks, constructors and eliminators, and a
//! denotational evaluator for the terms that use them.
//!
//! An element of a block is stored as `(i, v̄, w̄, ⟨k; v̄, b̄⟩)`: the index of
//! its inductive type, the parameter values, the index values and the
//! constructor tuple. Values of an inductive type are the constructor tuples
//! alone; their indices are recovered from the block interpretation.

use std::cell::RefCell;
use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::rc::Rc;

use super::rules::{lfp_stages, Rules, Stages};
use super::value::{choice_functions, SetValue};
use super::OracleError;
use crate::inductive::pi_count;
use crate::syntax::{Context, Elim, Entry, IndRef, InductiveBlock, Name, Term};

type Result<T, E = OracleError> = std::result::Result<T, E>;

pub type Func = Rc<dyn Fn(&Oracle<'_>, Sem) -> Result<Sem>>;
type Cont = Rc<dyn Fn(&Oracle<'_>, Vec<Sem>) -> Result<Sem>>;
type Env = Vec<Sem>;

/// Semantic values of the evaluator.
#[derive(Clone)]
pub enum Sem {
    Val(SetValue),
    Ty(Rc<TySem>),
    Fun(Func),
}

/// Types with finitely many elements.
pub enum TySem {
    Finite(BTreeSet<SetValue>),
    /// Dependent function space; the codomain maps a domain element to a
    /// type.
    Pi(Rc<TySem>, Func),
}

impl Sem {
    pub fn into_ty(self) -> Result<Rc<TySem>> {
        match self {
            Sem::Ty(t) => Ok(t),
            Sem::Val(v) => Err(OracleError::Argument(format!("{v} is not a type"))),
            Sem::Fun(_) => Err(OracleError::Argument("a function is not a type".into())),
        }
    }
}

impl std::fmt::Debug for Sem {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Sem::Val(v) => write!(f, "Val({v})"),
            Sem::Ty(_) => write!(f, "Ty(..)"),
            Sem::Fun(_) => write!(f, "Fun(..)"),
        }
    }
}

/// Interpretation of one block at fixed parameter values.
#[derive(Debug)]
pub struct BlockInterp {
    pub block: Name,
    pub params: Vec<SetValue>,
    pub stages: Stages,
}

impl BlockInterp {
    pub fn all(&self) -> &BTreeSet<SetValue> {
        self.stages.last()
    }

    /// Constructor tuples of the `i`-th inductive type at indices `w`.
    pub fn elements(&self, i: usize, w: &[SetValue]) -> BTreeSet<SetValue> {
        self.all()
            .iter()
            .filter_map(|e| {
                let (j, _, w2, tag) = split_elem(e)?;
                (j == i && w2 == w).then(|| tag.clone())
            })
            .collect()
    }

    /// The full element whose constructor tuple is `tag`.
    pub fn element_of(&self, tag: &SetValue) -> Option<&SetValue> {
        self.all()
            .iter()
            .find(|e| split_elem(e).is_some_and(|(_, _, _, t)| t == tag))
    }

    pub fn member_count(&self, i: usize) -> usize {
        self.all()
            .iter()
            .filter(|e| split_elem(e).is_some_and(|(j, ..)| j == i))
            .count()
    }
}

fn make_elem(i: usize, v: &[SetValue], w: Vec<SetValue>, tag: SetValue) -> SetValue {
    SetValue::Tup(vec![
        SetValue::nat(i),
        SetValue::Tup(v.to_vec()),
        SetValue::Tup(w),
        tag,
    ])
}

fn split_elem(e: &SetValue) -> Option<(usize, &[SetValue], &[SetValue], &SetValue)> {
    match e {
        SetValue::Tup(xs) if xs.len() == 4 => match (&xs[0], &xs[1], &xs[2]) {
            (SetValue::Fin(i), SetValue::Tup(v), SetValue::Tup(w)) => Some((i.len(), v, w, &xs[3])),
            _ => None,
        },
        _ => None,
    }
}

/// Shape of a constructor argument after the parameters.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum ArgShape {
    Data,
    /// Recursive, under this many function binders.
    Rec(usize),
}

fn strip_pis(t: &Term) -> (usize, &Term) {
    let mut t = t;
    let mut n = 0;
    while let Term::Pi(_, _, b) = t {
        t = b;
        n += 1;
    }
    (n, t)
}

/// The local inductive heading the conclusion of `t`, if any.
fn rec_member<'a>(block: &'a InductiveBlock, t: &Term) -> Option<(usize, usize)> {
    let (m, concl) = strip_pis(t);
    match concl.unapply().0 {
        Term::Var(d) => block.ind_index(d).map(|i| (i, m)),
        _ => None,
    }
}

fn shapes(block: &InductiveBlock, k: usize) -> Vec<ArgShape> {
    let mut t = &block.constrs[k].1;
    let mut out = Vec::new();
    let mut j = 0;
    while let Term::Pi(_, dom, body) = t {
        if j >= block.params {
            out.push(match rec_member(block, dom) {
                Some((_, m)) => ArgShape::Rec(m),
                None => ArgShape::Data,
            });
        }
        j += 1;
        t = body;
    }
    out
}

/// Whether each binder of `t` has a sort as its domain.
fn binder_is_type(t: &Term) -> Vec<bool> {
    let mut out = Vec::new();
    let mut t = t;
    while let Term::Pi(_, dom, body) = t {
        out.push(matches!(**dom, Term::Sort(_)));
        t = body;
    }
    out
}

fn constr_member(block: &InductiveBlock, k: usize) -> Result<usize> {
    let (_, concl) = strip_pis(&block.constrs[k].1);
    match concl.unapply().0 {
        Term::Var(d) => block.ind_index(d),
        _ => None,
    }
    .ok_or_else(|| OracleError::Invariant(format!("constructor {} has no local conclusion", block.constrs[k].0)))
}

/// All ways of choosing one option per slot.
fn product<T: Clone>(slots: &[Vec<T>]) -> Vec<Vec<T>> {
    slots.iter().fold(vec![Vec::new()], |acc, opts| {
        acc.iter()
            .flat_map(|pre| {
                opts.iter().map(move |o| {
                    let mut v = pre.clone();
                    v.push(o.clone());
                    v
                })
            })
            .collect()
    })
}

/// Evaluation context of the oracle: the kernel context, the depth bound,
/// and finite interpretations assigned to hypotheses.
pub struct Oracle<'c> {
    ctx: &'c Context,
    depth: usize,
    assign: BTreeMap<Name, Sem>,
    defs: RefCell<HashMap<Name, Sem>>,
    blocks: RefCell<HashMap<(Name, Vec<SetValue>, usize), Rc<BlockInterp>>>,
    /// Upper bound on enumerated function spaces.
    pub limit: usize,
}

impl<'c> Oracle<'c> {
    pub fn new(ctx: &'c Context, depth: usize) -> Self {
        Oracle {
            ctx,
            depth,
            assign: BTreeMap::new(),
            defs: RefCell::new(HashMap::new()),
            blocks: RefCell::new(HashMap::new()),
            limit: 1 << 16,
        }
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn context(&self) -> &'c Context {
        self.ctx
    }

    /// Interprets the hypothesis `name` as `value`.
    pub fn assign(&mut self, name: Name, value: Sem) {
        self.assign.insert(name, value);
    }

    /// Interprets the hypothesis `ty` as the enumeration `{0, …, n-1}` and
    /// each of `elems` as its position in that list.
    pub fn assign_enum(&mut self, ty: Name, elems: &[Name]) {
        let vals: BTreeSet<SetValue> = (0..elems.len()).map(SetValue::nat).collect();
        self.assign(ty, Sem::Ty(Rc::new(TySem::Finite(vals))));
        for (i, e) in elems.iter().enumerate() {
            self.assign(e.clone(), Sem::Val(SetValue::nat(i)));
        }
    }

    fn block(&self, b: &Name) -> Result<&'c InductiveBlock> {
        self.ctx
            .block(b)
            .map(|a| &**a)
            .ok_or_else(|| OracleError::Invariant(format!("unknown block {b}")))
    }

    // -----------------------------------------------------------------
    // Evaluation

    /// Value of a closed term.
    pub fn eval_closed(&self, t: &Term) -> Result<Sem> {
        self.eval(t, &Vec::new())
    }

    fn eval(&self, t: &Term, env: &Env) -> Result<Sem> {
        match t {
            Term::Bound(i) => env
                .len()
                .checked_sub(1 + *i as usize)
                .map(|j| env[j].clone())
                .ok_or_else(|| OracleError::Invariant(format!("loose bound variable {i}"))),
            Term::Var(x) => self.eval_var(x),
            Term::Sort(s) => Err(OracleError::Unsupported(format!("sort {s} has no finite interpretation"))),
            Term::Pi(_, a, b) => {
                let dom = self.eval(a, env)?.into_ty()?;
                Ok(Sem::Ty(Rc::new(TySem::Pi(dom, closure(b, env)))))
            }
            Term::Lam(_, _, b) => Ok(Sem::Fun(closure(b, env))),
            Term::Let(_, v, _, b) => {
                let mut env = env.clone();
                env.push(self.eval(v, &env)?);
                self.eval(b, &env)
            }
            Term::App(f, a) => {
                let f = self.eval(f, env)?;
                let a = self.eval(a, env)?;
                self.apply(f, a)
            }
            Term::Ind(r) => self.eval_ind(r),
            Term::Elim(e) => self.eval_elim(e, env),
        }
    }

    fn eval_var(&self, x: &Name) -> Result<Sem> {
        if let Some(v) = self.assign.get(x) {
            return Ok(v.clone());
        }
        if let Some(v) = self.defs.borrow().get(x) {
            return Ok(v.clone());
        }
        match self.ctx.lookup(x) {
            Some(Entry::Def { body, .. }) => {
                let v = self.eval_closed(body)?;
                self.defs.borrow_mut().insert(x.clone(), v.clone());
                Ok(v)
            }
            Some(_) => Err(OracleError::Unsupported(format!(
                "hypothesis `{x}` has no finite interpretation"
            ))),
            None => Err(OracleError::Invariant(format!("unbound variable `{x}`"))),
        }
    }

    pub fn apply(&self, f: Sem, a: Sem) -> Result<Sem> {
        match f {
            Sem::Fun(g) => g(self, a),
            Sem::Val(SetValue::Graph(_)) => {
                let SetValue::Graph(g) = &self.reify_plain(&f)? else {
                    unreachable!()
                };
                let key = self.reify_plain(&a)?;
                g.iter()
                    .find(|(x, _)| x == &key)
                    .map(|(_, y)| reflect(y.clone()))
                    .ok_or_else(|| OracleError::Argument(format!("{key} is outside the function's domain")))
            }
            other => Err(OracleError::Argument(format!("cannot apply {other:?}"))),
        }
    }

    fn curry(&self, n: usize, acc: Vec<Sem>, k: Cont) -> Result<Sem> {
        if acc.len() == n {
            return k(self, acc);
        }
        Ok(Sem::Fun(Rc::new(move |o, x| {
            let mut a = acc.clone();
            a.push(x);
            o.curry(n, a, k.clone())
        })))
    }

    fn eval_ind(&self, r: &IndRef) -> Result<Sem> {
        let block = self.block(&r.block)?;
        let bname = r.block.clone();
        if let Some(i) = block.ind_index(&r.member) {
            let n = pi_count(&block.inds[i].1);
            self.curry(n, Vec::new(), Rc::new(move |o, args| o.ind_type(&bname, i, &args)))
        } else if let Some(k) = block.constr_index(&r.member) {
            let n = pi_count(&block.constrs[k].1);
            self.curry(n, Vec::new(), Rc::new(move |o, args| o.construct(&bname, k, &args)))
        } else {
            Err(OracleError::Invariant(format!("{} is not a member of {}", r.member, r.block)))
        }
    }

    fn ind_type(&self, b: &Name, i: usize, args: &[Sem]) -> Result<Sem> {
        let n = self.block(b)?.params;
        let bi = self.interp_block(b, &args[..n], self.depth)?;
        let w = args[n..]
            .iter()
            .map(|a| self.reify_plain(a))
            .collect::<Result<Vec<_>>>()?;
        Ok(Sem::Ty(Rc::new(TySem::Finite(bi.elements(i, &w)))))
    }

    fn construct(&self, b: &Name, k: usize, args: &[Sem]) -> Result<Sem> {
        let block = self.block(b)?;
        let mut ty = block.globalize(b, &block.constrs[k].1);
        let mut env = Vec::new();
        let mut vals = Vec::new();
        for a in args {
            let Term::Pi(_, dom, body) = ty else {
                return Err(OracleError::Invariant("constructor over-applied".into()));
            };
            vals.push(match a {
                Sem::Fun(_) => {
                    let t = self.eval(&dom, &env)?.into_ty()?;
                    self.reify(a, &t)?
                }
                _ => self.reify_plain(a)?,
            });
            env.push(a.clone());
            ty = (*body).clone();
        }
        Ok(Sem::Val(SetValue::Tag(k as u64, vals)))
    }

    fn eval_elim(&self, e: &Elim, env: &Env) -> Result<Sem> {
        let scrut = self.eval(&e.scrutinee, env)?;
        let scrut = self.reify_plain(&scrut)?;
        let motives = e
            .motives
            .iter()
            .map(|m| self.eval(m, env))
            .collect::<Result<Vec<_>>>()?;
        let cases = e
            .cases
            .iter()
            .map(|c| self.eval(c, env))
            .collect::<Result<Vec<_>>>()?;
        let r = self.interp_elim(&e.block, &motives, &cases, &scrut, self.depth)?;
        Ok(reflect(r))
    }

    // -----------------------------------------------------------------
    // Reification

    /// All elements of a finite type.
    pub fn elements(&self, t: &TySem) -> Result<Vec<SetValue>> {
        match t {
            TySem::Finite(s) => Ok(s.iter().cloned().collect()),
            TySem::Pi(dom, cod) => {
                let xs = self.elements(dom)?;
                let fns = choice_functions(
                    &xs,
                    &mut |x| self.elements(&*cod(self, reflect(x.clone()))?.into_ty()?),
                    self.limit,
                )?
                .ok_or_else(|| OracleError::Unsupported("function space exceeds the enumeration limit".into()))?;
                Ok(fns
                    .into_iter()
                    .map(|g| SetValue::Graph(g.into_iter().collect()))
                    .collect())
            }
        }
    }

    /// Reifies a first-order value; types become the set of their elements.
    pub fn reify_plain(&self, s: &Sem) -> Result<SetValue> {
        match s {
            Sem::Val(v) => Ok(v.clone()),
            Sem::Ty(t) => Ok(SetValue::Fin(self.elements(t)?.into_iter().collect())),
            Sem::Fun(_) => Err(OracleError::Unsupported(
                "function value where no finite domain is known".into(),
            )),
        }
    }

    /// Reifies a value of type `ty`; functions become graphs.
    pub fn reify(&self, s: &Sem, ty: &TySem) -> Result<SetValue> {
        match (s, ty) {
            (Sem::Fun(f), TySem::Pi(dom, cod)) => {
                let mut g = BTreeSet::new();
                for x in self.elements(dom)? {
                    let xs = reflect(x.clone());
                    let y = f(self, xs.clone())?;
                    let cty = cod(self, xs)?.into_ty()?;
                    g.insert((x, self.reify(&y, &cty)?));
                }
                Ok(SetValue::Graph(g))
            }
            _ => self.reify_plain(s),
        }
    }

    /// Denotation of a closed term of (closed) type `ty`.
    pub fn denote(&self, t: &Term, ty: &Term) -> Result<SetValue> {
        let v = self.eval_closed(t)?;
        match &v {
            Sem::Fun(_) => {
                let tv = self.eval_closed(ty)?.into_ty()?;
                self.reify(&v, &tv)
            }
            _ => self.reify_plain(&v),
        }
    }

    // -----------------------------------------------------------------
    // Blocks

    /// Interprets every inductive type of block `b` at the given parameters,
    /// iterating the block's rule operator `depth` times.
    pub fn interp_block(&self, b: &Name, params: &[Sem], depth: usize) -> Result<Rc<BlockInterp>> {
        let block = self.block(b)?;
        if params.len() != block.params {
            return Err(OracleError::Argument(format!(
                "block {b} takes {} parameters, got {}",
                block.params,
                params.len()
            )));
        }
        let pvals = params
            .iter()
            .map(|p| self.reify_plain(p))
            .collect::<Result<Vec<_>>>()?;
        let key = (b.clone(), pvals.clone(), depth);
        if let Some(bi) = self.blocks.borrow().get(&key) {
            return Ok(bi.clone());
        }
        let rules = BlockRules {
            oracle: self,
            block,
            params,
            pvals: &pvals,
            error: RefCell::new(None),
        };
        let stages = lfp_stages(&rules, depth);
        if let Some(e) = rules.error.into_inner() {
            return Err(e);
        }
        let bi = Rc::new(BlockInterp {
            block: b.clone(),
            params: pvals,
            stages,
        });
        self.blocks.borrow_mut().insert(key, bi.clone());
        Ok(bi)
    }

    /// Value of `Elim(scrutinee; b; motives; cases)`, read off the least
    /// fixpoint of the eliminator's rule set.
    pub fn interp_elim(
        &self,
        b: &Name,
        motives: &[Sem],
        cases: &[Sem],
        scrutinee: &SetValue,
        depth: usize,
    ) -> Result<SetValue> {
        let block = self.block(b)?;
        let n = block.params;
        if motives.len() != block.inds.len() || cases.len() != block.constrs.len() {
            return Err(OracleError::Argument("wrong number of motives or cases".into()));
        }
        let SetValue::Tag(k, payload) = scrutinee else {
            return Err(OracleError::Argument(format!("{scrutinee} is not a constructor value")));
        };
        let k = *k as usize;
        if k >= block.constrs.len() || payload.len() < n {
            return Err(OracleError::Argument(format!("{scrutinee} is not a value of block {b}")));
        }
        let param_kinds = binder_is_type(&block.inds[0].1);
        let params: Vec<Sem> = payload[..n]
            .iter()
            .zip(&param_kinds)
            .map(|(v, &is_ty)| reflect_as(v.clone(), is_ty))
            .collect::<Result<_>>()?;
        let bi = self.interp_block(b, &params, depth)?;
        if bi.element_of(scrutinee).is_none() {
            return Err(OracleError::DepthExhausted {
                what: format!("{scrutinee} is not in the interpretation of {b}"),
                depth,
            });
        }

        // Sub-elements reachable through recursive arguments.
        let shapes: Vec<Vec<ArgShape>> = (0..block.constrs.len()).map(|k| shapes(block, k)).collect();
        let mut nodes: BTreeMap<SetValue, Node> = BTreeMap::new();
        let mut todo = vec![scrutinee.clone()];
        while let Some(t) = todo.pop() {
            if nodes.contains_key(&t) {
                continue;
            }
            let e = bi
                .element_of(&t)
                .ok_or_else(|| OracleError::Invariant(format!("sub-element {t} missing")))?;
            let (i, _, w, _) = split_elem(e).expect("well-formed element");
            let SetValue::Tag(k, payload) = &t else {
                return Err(OracleError::Invariant(format!("{t} is not a tag")));
            };
            let k = *k as usize;
            let args = payload[n..].to_vec();
            for (a, s) in args.iter().zip(&shapes[k]) {
                if let ArgShape::Rec(m) = s {
                    leaves(a, *m, &mut todo);
                }
            }
            nodes.insert(
                t.clone(),
                Node {
                    member: i,
                    indices: w.to_vec(),
                    constr: k,
                    args,
                },
            );
        }

        let index_kinds: Vec<Vec<bool>> = block
            .inds
            .iter()
            .map(|(_, t)| binder_is_type(t)[n..].to_vec())
            .collect();
        let rules = ElimRules {
            oracle: self,
            nodes: &nodes,
            shapes: &shapes,
            index_kinds: &index_kinds,
            params: &params,
            motives,
            cases,
            error: RefCell::new(None),
        };
        let stages = lfp_stages(&rules, depth);
        if let Some(e) = rules.error.into_inner() {
            return Err(e);
        }
        let results: BTreeSet<&SetValue> = stages
            .last()
            .iter()
            .filter_map(|p| match p {
                SetValue::Tup(xy) if &xy[0] == scrutinee => Some(&xy[1]),
                _ => None,
            })
            .collect();
        let mut it = results.into_iter();
        match (it.next(), it.next()) {
            (Some(r), None) => Ok(r.clone()),
            (None, _) => Err(OracleError::DepthExhausted {
                what: format!("no eliminator value for {scrutinee}"),
                depth,
            }),
            (Some(_), Some(_)) => Err(OracleError::Invariant(format!(
                "eliminator relation is not functional at {scrutinee}"
            ))),
        }
    }
}

fn closure(body: &Term, env: &Env) -> Func {
    let body = body.clone();
    let env = env.clone();
    Rc::new(move |o, x| {
        let mut e = env.clone();
        e.push(x);
        o.eval(&body, &e)
    })
}

/// Inverse of reification at first order: graphs become functions.
pub fn reflect(v: SetValue) -> Sem {
    match v {
        SetValue::Graph(g) => Sem::Fun(Rc::new(move |o, x| {
            let key = o.reify_plain(&x)?;
            g.iter()
                .find(|(a, _)| a == &key)
                .map(|(_, y)| reflect(y.clone()))
                .ok_or_else(|| OracleError::Argument(format!("{key} is outside the function's domain")))
        })),
        v => Sem::Val(v),
    }
}

/// Like [`reflect`], but reads a set as a type when `is_type` holds.
pub fn reflect_as(v: SetValue, is_type: bool) -> Result<Sem> {
    if !is_type {
        return Ok(reflect(v));
    }
    match v {
        SetValue::Fin(s) => Ok(Sem::Ty(Rc::new(TySem::Finite(s)))),
        v => Err(OracleError::Argument(format!("{v} does not denote a type"))),
    }
}

fn leaves(v: &SetValue, m: usize, out: &mut Vec<SetValue>) {
    if m == 0 {
        out.push(v.clone());
    } else if let SetValue::Graph(g) = v {
        for (_, y) in g {
            leaves(y, m - 1, out);
        }
    }
}

/// Replaces every leaf of a recursive argument by each of its recorded
/// results; `None` if some leaf has none yet.
fn with_results(v: &SetValue, m: usize, res: &BTreeMap<&SetValue, Vec<&SetValue>>) -> Option<Vec<SetValue>> {
    if m == 0 {
        return res.get(v).map(|rs| rs.iter().map(|r| (*r).clone()).collect());
    }
    let SetValue::Graph(g) = v else { return None };
    let mut slots = Vec::new();
    for (x, y) in g {
        let ys = with_results(y, m - 1, res)?;
        slots.push(ys.into_iter().map(|y| (x.clone(), y)).collect::<Vec<_>>());
    }
    Some(
        product(&slots)
            .into_iter()
            .map(|pairs| SetValue::Graph(pairs.into_iter().collect()))
            .collect(),
    )
}

struct Node {
    member: usize,
    indices: Vec<SetValue>,
    constr: usize,
    args: Vec<SetValue>,
}

/// The rule operator of a block: one rule per constructor and choice of
/// arguments, with the recursive arguments as premises.
struct BlockRules<'o, 'c> {
    oracle: &'o Oracle<'c>,
    block: &'c InductiveBlock,
    params: &'o [Sem],
    pvals: &'o [SetValue],
    error: RefCell<Option<OracleError>>,
}

impl BlockRules<'_, '_> {
    fn step(&self, x: &BTreeSet<SetValue>) -> Result<BTreeSet<SetValue>> {
        let mut out = BTreeSet::new();
        for k in 0..self.block.constrs.len() {
            let mut t = &self.block.constrs[k].1;
            for _ in 0..self.block.params {
                let Term::Pi(_, _, b) = t else {
                    return Err(OracleError::Invariant("parameter telescope too short".into()));
                };
                t = b;
            }
            self.args(k, t, self.params.to_vec(), Vec::new(), x, &mut out)?;
        }
        Ok(out)
    }

    fn args(
        &self,
        k: usize,
        t: &Term,
        env: Env,
        vals: Vec<SetValue>,
        x: &BTreeSet<SetValue>,
        out: &mut BTreeSet<SetValue>,
    ) -> Result<()> {
        match t {
            Term::Pi(_, dom, body) => {
                for (v, s) in self.candidates(dom, &env, x)? {
                    let mut env = env.clone();
                    env.push(s);
                    let mut vals = vals.clone();
                    vals.push(v);
                    self.args(k, body, env, vals, x, out)?;
                }
                Ok(())
            }
            _ => {
                let i = constr_member(self.block, k)?;
                let w = self.indices(t, &env)?;
                let mut payload = self.pvals.to_vec();
                payload.extend(vals);
                out.insert(make_elem(i, self.pvals, w, SetValue::Tag(k as u64, payload)));
                Ok(())
            }
        }
    }

    fn indices(&self, t: &Term, env: &Env) -> Result<Vec<SetValue>> {
        let (_, args) = t.unapply();
        let n = self.block.params;
        for (j, a) in args[..n].iter().enumerate() {
            let v = self.oracle.eval(a, env)?;
            if self.oracle.reify_plain(&v)? != self.pvals[j] {
                return Err(OracleError::Unsupported(format!(
                    "non-uniform parameter in recursive occurrence {t}"
                )));
            }
        }
        args[n..]
            .iter()
            .map(|a| self.oracle.reify_plain(&self.oracle.eval(a, env)?))
            .collect()
    }

    /// Possible values of an argument of type `dom`, with their semantic
    /// forms.
    fn candidates(&self, dom: &Term, env: &Env, x: &BTreeSet<SetValue>) -> Result<Vec<(SetValue, Sem)>> {
        if rec_member(self.block, dom).is_some() {
            return Ok(self
                .rec_candidates(dom, env, x)?
                .into_iter()
                .map(|v| (v.clone(), reflect(v)))
                .collect());
        }
        let ty = self.oracle.eval(dom, env)?.into_ty()?;
        Ok(self
            .oracle
            .elements(&ty)?
            .into_iter()
            .map(|v| (v.clone(), reflect(v)))
            .collect())
    }

    fn rec_candidates(&self, t: &Term, env: &Env, x: &BTreeSet<SetValue>) -> Result<Vec<SetValue>> {
        match t {
            Term::Pi(_, y, rest) => {
                let ty = self.oracle.eval(y, env)?.into_ty()?;
                let ys = self.oracle.elements(&ty)?;
                let fns = choice_functions(
                    &ys,
                    &mut |yv| {
                        let mut env = env.clone();
                        env.push(reflect(yv.clone()));
                        self.rec_candidates(rest, &env, x)
                    },
                    self.oracle.limit,
                )?
                .ok_or_else(|| OracleError::Unsupported("too many functional recursive arguments".into()))?;
                Ok(fns
                    .into_iter()
                    .map(|g| SetValue::Graph(g.into_iter().collect()))
                    .collect())
            }
            _ => {
                let Some((i, _)) = rec_member(self.block, t) else {
                    return Err(OracleError::Invariant(format!("{t} is not a recursive position")));
                };
                let w = self.indices(t, env)?;
                Ok(x.iter()
                    .filter_map(|e| {
                        let (j, v, w2, tag) = split_elem(e)?;
                        (j == i && v == self.pvals && w2 == w.as_slice()).then(|| tag.clone())
                    })
                    .collect())
            }
        }
    }
}

impl Rules for BlockRules<'_, '_> {
    fn conclusions(&self, x: &BTreeSet<SetValue>) -> BTreeSet<SetValue> {
        if self.error.borrow().is_some() {
            return BTreeSet::new();
        }
        self.step(x).unwrap_or_else(|e| {
            *self.error.borrow_mut() = Some(e);
            BTreeSet::new()
        })
    }
}

/// The rule operator of an eliminator, restricted to the sub-elements of
/// one scrutinee: `(x, r)` follows from the pairs for the recursive
/// arguments of `x`.
struct ElimRules<'o, 'c> {
    oracle: &'o Oracle<'c>,
    nodes: &'o BTreeMap<SetValue, Node>,
    shapes: &'o [Vec<ArgShape>],
    index_kinds: &'o [Vec<bool>],
    params: &'o [Sem],
    motives: &'o [Sem],
    cases: &'o [Sem],
    error: RefCell<Option<OracleError>>,
}

impl ElimRules<'_, '_> {
    fn step(&self, x: &BTreeSet<SetValue>) -> Result<BTreeSet<SetValue>> {
        let o = self.oracle;
        let mut res: BTreeMap<&SetValue, Vec<&SetValue>> = BTreeMap::new();
        for p in x {
            if let SetValue::Tup(xy) = p {
                res.entry(&xy[0]).or_default().push(&xy[1]);
            }
        }
        let mut out = BTreeSet::new();
        'nodes: for (tag, node) in self.nodes {
            let shapes = &self.shapes[node.constr];
            let mut slots = Vec::new();
            for (a, s) in node.args.iter().zip(shapes) {
                if let ArgShape::Rec(m) = s {
                    match with_results(a, *m, &res) {
                        Some(rs) => slots.push(rs),
                        None => continue 'nodes,
                    }
                }
            }
            let mut mty = self.motives[node.member].clone();
            for p in self.params {
                mty = o.apply(mty, p.clone())?;
            }
            for (w, &is_ty) in node.indices.iter().zip(&self.index_kinds[node.member]) {
                mty = o.apply(mty, reflect_as(w.clone(), is_ty)?)?;
            }
            let mty = o.apply(mty, reflect(tag.clone()))?.into_ty()?;
            for ihs in product(&slots) {
                let mut f = self.cases[node.constr].clone();
                for p in self.params {
                    f = o.apply(f, p.clone())?;
                }
                let mut ihs = ihs.into_iter();
                for (a, s) in node.args.iter().zip(shapes) {
                    f = o.apply(f, reflect(a.clone()))?;
                    if let ArgShape::Rec(_) = s {
                        let ih = ihs.next().expect("one result per recursive argument");
                        f = o.apply(f, reflect(ih))?;
                    }
                }
                out.insert(SetValue::pair(tag.clone(), o.reify(&f, &mty)?));
            }
        }
        Ok(out)
    }
}

impl Rules for ElimRules<'_, '_> {
    fn conclusions(&self, x: &BTreeSet<SetValue>) -> BTreeSet<SetValue> {
        if self.error.borrow().is_some() {
            return BTreeSet::new();
        }
        self.step(x).unwrap_or_else(|e| {
            *self.error.borrow_mut() = Some(e);
            BTreeSet::new()
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::driver::Session;
    use crate::surface::{parse, parse_term};

    const NAT: &str = "inductive Nat params 0 { nat : Set := zero : nat; succ : nat -> nat }.
        def add : nat -> nat -> nat := fun (n m : nat) =>
          Elim(n; Nat.nat; fun _ : nat => nat; m, fun (p r : nat) => succ r).";

    fn session(src: &str) -> Session {
        let mut s = Session::default();
        let outs = s.run(&parse(src).unwrap(), false);
        assert!(outs.iter().all(|o| o.is_ok()), "{outs:?}");
        s
    }

    fn num(n: usize) -> SetValue {
        (0..n).fold(SetValue::Tag(0, vec![]), |acc, _| SetValue::Tag(1, vec![acc]))
    }

    #[test]
    fn nat_stages() {
        let s = session(NAT);
        let o = Oracle::new(&s.ctx, 3);
        let bi = o.interp_block(&Name::new("Nat"), &[], 3).unwrap();
        assert_eq!(bi.stages.cardinalities(), vec![0, 1, 2, 3]);
        assert_eq!(bi.elements(0, &[]), (0..3).map(num).collect());
    }

    #[test]
    fn add_by_fixpoint() {
        let s = session(NAT);
        let o = Oracle::new(&s.ctx, 8);
        let t = parse_term(&s.scope(), "add (succ (succ zero)) (succ (succ (succ zero)))").unwrap();
        assert_eq!(o.denote(&t, &Term::ind("Nat", "nat")).unwrap(), num(5));
    }

    #[test]
    fn zero_case() {
        let s = session(NAT);
        let o = Oracle::new(&s.ctx, 4);
        let m = Sem::Val(num(2));
        let motive = o.eval_closed(&parse_term(&s.scope(), "fun _ : nat => nat").unwrap()).unwrap();
        let succ = o.eval_closed(&parse_term(&s.scope(), "fun (p r : nat) => r").unwrap()).unwrap();
        let r = o
            .interp_elim(&Name::new("Nat"), &[motive], &[m, succ], &num(0), 4)
            .unwrap();
        assert_eq!(r, num(2));
    }

    #[test]
    fn depth_bound_is_enforced() {
        let s = session(NAT);
        let o = Oracle::new(&s.ctx, 2);
        let t = parse_term(&s.scope(), "add (succ (succ zero)) zero").unwrap();
        let e = o.denote(&t, &Term::ind("Nat", "nat")).unwrap_err();
        assert_eq!(e.slug(), "depth-exhausted");
    }

    #[test]
    fn lists_over_enumeration() {
        let s = session(
            "inductive L params 1 { list : forall A : Type@{0}, Type@{0} :=
               nil : forall A : Type@{0}, list A;
               cons : forall A : Type@{0}, A -> list A -> list A }.
             axiom A : Type@{0}. axiom a : A. axiom b : A.",
        );
        let mut o = Oracle::new(&s.ctx, 2);
        o.assign_enum(Name::new("A"), &[Name::new("a"), Name::new("b")]);
        let a = o.eval_var(&Name::new("A")).unwrap();
        let bi = o.interp_block(&Name::new("L"), &[a], 2).unwrap();
        assert_eq!(bi.elements(0, &[]).len(), 3);
        assert_eq!(bi.stages.cardinalities(), vec![0, 1, 3]);
    }

    #[test]
    fn sorts_are_rejected() {
        let s = session(NAT);
        let o = Oracle::new(&s.ctx, 2);
        let e = o.eval_closed(&Term::prop()).unwrap_err();
        assert_eq!(e.slug(), "unsupported-fragment");
    }
}
