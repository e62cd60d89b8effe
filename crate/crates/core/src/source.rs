//! The simply-typed source calculus: types, terms, typing, and small-step
//! call-by-value evaluation.
//!
//! Terms and types are immutable reference-counted trees. Every node caches
//! its free variables, its hole count, and whether it is a value, so the
//! evaluator and the plugging machinery never traverse shared closed
//! subtrees (the generated wrapper terms form large DAGs that must not be
//! walked per occurrence).

use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

use crate::names::{fresh_name, fv_empty, fv_single, fv_union, fv_union3, fv_without, name, FvSet, Name};

// ---------------------------------------------------------------------------
// Types
// ---------------------------------------------------------------------------

#[derive(Debug, PartialEq, Eq, Hash)]
pub enum TyKind {
    Unit,
    Bool,
    Arrow(SrcType, SrcType),
    Prod(SrcType, SrcType),
    Sum(SrcType, SrcType),
}

/// A source type. Cheap to clone; equality shortcuts on pointer identity so
/// that the deeply shared back-translation types compare fast.
#[derive(Clone, Eq)]
pub struct SrcType(Arc<TyKind>);

impl PartialEq for SrcType {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0) || *self.0 == *other.0
    }
}

impl std::hash::Hash for SrcType {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.0.hash(state)
    }
}

impl fmt::Debug for SrcType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl SrcType {
    pub fn unit() -> Self {
        SrcType(Arc::new(TyKind::Unit))
    }
    pub fn bool_() -> Self {
        SrcType(Arc::new(TyKind::Bool))
    }
    pub fn arrow(dom: SrcType, cod: SrcType) -> Self {
        SrcType(Arc::new(TyKind::Arrow(dom, cod)))
    }
    pub fn prod(l: SrcType, r: SrcType) -> Self {
        SrcType(Arc::new(TyKind::Prod(l, r)))
    }
    pub fn sum(l: SrcType, r: SrcType) -> Self {
        SrcType(Arc::new(TyKind::Sum(l, r)))
    }

    pub fn kind(&self) -> &TyKind {
        &self.0
    }

    pub fn is_arrow(&self) -> bool {
        matches!(self.kind(), TyKind::Arrow(..))
    }

    /// Nesting depth; base types have depth 0.
    pub fn depth(&self) -> u32 {
        match self.kind() {
            TyKind::Unit | TyKind::Bool => 0,
            TyKind::Arrow(a, b) | TyKind::Prod(a, b) | TyKind::Sum(a, b) => {
                1 + a.depth().max(b.depth())
            }
        }
    }

    /// True when the type contains no arrows.
    pub fn is_first_order(&self) -> bool {
        match self.kind() {
            TyKind::Unit | TyKind::Bool => true,
            TyKind::Arrow(..) => false,
            TyKind::Prod(a, b) | TyKind::Sum(a, b) => a.is_first_order() && b.is_first_order(),
        }
    }
}

// ---------------------------------------------------------------------------
// Terms
// ---------------------------------------------------------------------------

#[derive(Debug, PartialEq, Eq)]
pub enum SrcKind {
    Unit,
    True,
    False,
    Var(Name),
    Lam(Name, SrcType, SrcTerm),
    App(SrcTerm, SrcTerm),
    Pair(SrcTerm, SrcTerm),
    Proj1(SrcTerm),
    Proj2(SrcTerm),
    Inl(SrcTerm),
    Inr(SrcTerm),
    Case(SrcTerm, Name, SrcTerm, Name, SrcTerm),
    Seq(SrcTerm, SrcTerm),
    If(SrcTerm, SrcTerm, SrcTerm),
    Fix(SrcType, SrcType, SrcTerm),
    /// Context hole; never a runnable term by itself.
    Hole,
}

#[derive(Debug)]
struct SrcNode {
    kind: SrcKind,
    fv: FvSet,
    holes: u32,
    value: bool,
}

#[derive(Clone)]
pub struct SrcTerm(Arc<SrcNode>);

impl PartialEq for SrcTerm {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0) || self.0.kind == other.0.kind
    }
}
impl Eq for SrcTerm {}

impl fmt::Debug for SrcTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

fn mk(kind: SrcKind, fv: FvSet, holes: u32, value: bool) -> SrcTerm {
    SrcTerm(Arc::new(SrcNode { kind, fv, holes, value }))
}

impl SrcTerm {
    pub fn unit() -> Self {
        mk(SrcKind::Unit, fv_empty(), 0, true)
    }
    pub fn tru() -> Self {
        mk(SrcKind::True, fv_empty(), 0, true)
    }
    pub fn fls() -> Self {
        mk(SrcKind::False, fv_empty(), 0, true)
    }
    pub fn bool_lit(b: bool) -> Self {
        if b {
            Self::tru()
        } else {
            Self::fls()
        }
    }
    pub fn var(n: impl Into<Name>) -> Self {
        let n = n.into();
        let fv = fv_single(&n);
        mk(SrcKind::Var(n), fv, 0, false)
    }
    pub fn lam(n: impl Into<Name>, ty: SrcType, body: SrcTerm) -> Self {
        let n = n.into();
        let fv = fv_without(body.fv(), &n);
        let holes = body.holes();
        mk(SrcKind::Lam(n, ty, body), fv, holes, true)
    }
    pub fn app(f: SrcTerm, a: SrcTerm) -> Self {
        let fv = fv_union(f.fv(), a.fv());
        let holes = f.holes() + a.holes();
        mk(SrcKind::App(f, a), fv, holes, false)
    }
    pub fn pair(l: SrcTerm, r: SrcTerm) -> Self {
        let fv = fv_union(l.fv(), r.fv());
        let holes = l.holes() + r.holes();
        let value = l.is_value() && r.is_value();
        mk(SrcKind::Pair(l, r), fv, holes, value)
    }
    pub fn proj1(t: SrcTerm) -> Self {
        let fv = t.fv().clone();
        let holes = t.holes();
        mk(SrcKind::Proj1(t), fv, holes, false)
    }
    pub fn proj2(t: SrcTerm) -> Self {
        let fv = t.fv().clone();
        let holes = t.holes();
        mk(SrcKind::Proj2(t), fv, holes, false)
    }
    pub fn inl(t: SrcTerm) -> Self {
        let fv = t.fv().clone();
        let holes = t.holes();
        let value = t.is_value();
        mk(SrcKind::Inl(t), fv, holes, value)
    }
    pub fn inr(t: SrcTerm) -> Self {
        let fv = t.fv().clone();
        let holes = t.holes();
        let value = t.is_value();
        mk(SrcKind::Inr(t), fv, holes, value)
    }
    pub fn case_of(
        scrut: SrcTerm,
        nl: impl Into<Name>,
        bl: SrcTerm,
        nr: impl Into<Name>,
        br: SrcTerm,
    ) -> Self {
        let nl = nl.into();
        let nr = nr.into();
        let fv = fv_union3(scrut.fv(), &fv_without(bl.fv(), &nl), &fv_without(br.fv(), &nr));
        let holes = scrut.holes() + bl.holes() + br.holes();
        mk(SrcKind::Case(scrut, nl, bl, nr, br), fv, holes, false)
    }
    pub fn seq(a: SrcTerm, b: SrcTerm) -> Self {
        let fv = fv_union(a.fv(), b.fv());
        let holes = a.holes() + b.holes();
        mk(SrcKind::Seq(a, b), fv, holes, false)
    }
    pub fn ite(c: SrcTerm, t: SrcTerm, e: SrcTerm) -> Self {
        let fv = fv_union3(c.fv(), t.fv(), e.fv());
        let holes = c.holes() + t.holes() + e.holes();
        mk(SrcKind::If(c, t, e), fv, holes, false)
    }
    pub fn fix(dom: SrcType, cod: SrcType, t: SrcTerm) -> Self {
        let fv = t.fv().clone();
        let holes = t.holes();
        mk(SrcKind::Fix(dom, cod, t), fv, holes, false)
    }
    pub fn hole() -> Self {
        mk(SrcKind::Hole, fv_empty(), 1, false)
    }

    pub fn kind(&self) -> &SrcKind {
        &self.0.kind
    }
    pub fn fv(&self) -> &FvSet {
        &self.0.fv
    }
    pub fn holes(&self) -> u32 {
        self.0.holes
    }
    pub fn is_closed(&self) -> bool {
        self.0.fv.is_empty()
    }
    pub fn ptr_eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0)
    }
    pub(crate) fn node_addr(&self) -> usize {
        Arc::as_ptr(&self.0) as usize
    }

    /// The value grammar: unit, booleans, lambdas, pairs of values, and
    /// injected values.
    pub fn is_value(&self) -> bool {
        self.0.value
    }

    /// Capture-avoiding substitution of `v` for free occurrences of `x`.
    pub fn subst(&self, x: &Name, v: &SrcTerm) -> SrcTerm {
        if !self.fv().contains(x) {
            return self.clone();
        }
        match self.kind() {
            SrcKind::Var(_) => v.clone(),
            SrcKind::Lam(y, ty, body) => {
                if v.fv().contains(y) {
                    let fresh = fresh_name(y, |c| {
                        body.fv().contains(c) || v.fv().contains(c) || c == &**x
                    });
                    let renamed = body.subst(y, &SrcTerm::var(fresh.clone()));
                    SrcTerm::lam(fresh, ty.clone(), renamed.subst(x, v))
                } else {
                    SrcTerm::lam(y.clone(), ty.clone(), body.subst(x, v))
                }
            }
            SrcKind::App(f, a) => SrcTerm::app(f.subst(x, v), a.subst(x, v)),
            SrcKind::Pair(l, r) => SrcTerm::pair(l.subst(x, v), r.subst(x, v)),
            SrcKind::Proj1(t) => SrcTerm::proj1(t.subst(x, v)),
            SrcKind::Proj2(t) => SrcTerm::proj2(t.subst(x, v)),
            SrcKind::Inl(t) => SrcTerm::inl(t.subst(x, v)),
            SrcKind::Inr(t) => SrcTerm::inr(t.subst(x, v)),
            SrcKind::Case(s, nl, bl, nr, br) => {
                let s = s.subst(x, v);
                let (nl, bl) = subst_branch(nl, bl, x, v);
                let (nr, br) = subst_branch(nr, br, x, v);
                SrcTerm::case_of(s, nl, bl, nr, br)
            }
            SrcKind::Seq(a, b) => SrcTerm::seq(a.subst(x, v), b.subst(x, v)),
            SrcKind::If(c, t, e) => SrcTerm::ite(c.subst(x, v), t.subst(x, v), e.subst(x, v)),
            SrcKind::Fix(d, co, t) => SrcTerm::fix(d.clone(), co.clone(), t.subst(x, v)),
            SrcKind::Unit | SrcKind::True | SrcKind::False | SrcKind::Hole => unreachable!(),
        }
    }

    /// Alpha-equivalence: equality up to consistent renaming of binders.
    pub fn alpha_eq(&self, other: &SrcTerm) -> bool {
        alpha_eq_under(self, other, &mut Vec::new())
    }
}

fn subst_branch(n: &Name, body: &SrcTerm, x: &Name, v: &SrcTerm) -> (Name, SrcTerm) {
    if n == x || !body.fv().contains(x) {
        return (n.clone(), body.clone());
    }
    if v.fv().contains(n) {
        let fresh = fresh_name(n, |c| body.fv().contains(c) || v.fv().contains(c) || c == &**x);
        let renamed = body.subst(n, &SrcTerm::var(fresh.clone()));
        (fresh, renamed.subst(x, v))
    } else {
        (n.clone(), body.subst(x, v))
    }
}

fn alpha_eq_under(a: &SrcTerm, b: &SrcTerm, binders: &mut Vec<(Name, Name)>) -> bool {
    if binders.is_empty() && a.ptr_eq(b) {
        return true;
    }
    match (a.kind(), b.kind()) {
        (SrcKind::Unit, SrcKind::Unit)
        | (SrcKind::True, SrcKind::True)
        | (SrcKind::False, SrcKind::False)
        | (SrcKind::Hole, SrcKind::Hole) => true,
        (SrcKind::Var(x), SrcKind::Var(y)) => {
            for (bx, by) in binders.iter().rev() {
                match (bx == x, by == y) {
                    (true, true) => return true,
                    (false, false) => continue,
                    _ => return false,
                }
            }
            x == y
        }
        (SrcKind::Lam(x, tx, bx), SrcKind::Lam(y, ty, by)) => {
            tx == ty && {
                binders.push((x.clone(), y.clone()));
                let r = alpha_eq_under(bx, by, binders);
                binders.pop();
                r
            }
        }
        (SrcKind::App(f1, a1), SrcKind::App(f2, a2))
        | (SrcKind::Pair(f1, a1), SrcKind::Pair(f2, a2))
        | (SrcKind::Seq(f1, a1), SrcKind::Seq(f2, a2)) => {
            alpha_eq_under(f1, f2, binders) && alpha_eq_under(a1, a2, binders)
        }
        (SrcKind::Proj1(t1), SrcKind::Proj1(t2))
        | (SrcKind::Proj2(t1), SrcKind::Proj2(t2))
        | (SrcKind::Inl(t1), SrcKind::Inl(t2))
        | (SrcKind::Inr(t1), SrcKind::Inr(t2)) => alpha_eq_under(t1, t2, binders),
        (SrcKind::Case(s1, nl1, bl1, nr1, br1), SrcKind::Case(s2, nl2, bl2, nr2, br2)) => {
            alpha_eq_under(s1, s2, binders)
                && {
                    binders.push((nl1.clone(), nl2.clone()));
                    let r = alpha_eq_under(bl1, bl2, binders);
                    binders.pop();
                    r
                }
                && {
                    binders.push((nr1.clone(), nr2.clone()));
                    let r = alpha_eq_under(br1, br2, binders);
                    binders.pop();
                    r
                }
        }
        (SrcKind::If(c1, t1, e1), SrcKind::If(c2, t2, e2)) => {
            alpha_eq_under(c1, c2, binders)
                && alpha_eq_under(t1, t2, binders)
                && alpha_eq_under(e1, e2, binders)
        }
        (SrcKind::Fix(d1, c1, t1), SrcKind::Fix(d2, c2, t2)) => {
            d1 == d2 && c1 == c2 && alpha_eq_under(t1, t2, binders)
        }
        _ => false,
    }
}

// ---------------------------------------------------------------------------
// Typing environments
// ---------------------------------------------------------------------------

/// Ordered sequence of bindings; lookup returns the rightmost match.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct TypingEnv(Vec<(Name, SrcType)>);

impl TypingEnv {
    pub fn empty() -> Self {
        TypingEnv(Vec::new())
    }

    pub fn extended(&self, n: impl Into<Name>, ty: SrcType) -> Self {
        let mut v = self.0.clone();
        v.push((n.into(), ty));
        TypingEnv(v)
    }

    pub fn push(&mut self, n: impl Into<Name>, ty: SrcType) {
        self.0.push((n.into(), ty));
    }

    pub fn lookup(&self, n: &str) -> Option<&SrcType> {
        self.0.iter().rev().find(|(m, _)| &**m == n).map(|(_, t)| t)
    }

    pub fn bindings(&self) -> &[(Name, SrcType)] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl FromIterator<(Name, SrcType)> for TypingEnv {
    fn from_iter<I: IntoIterator<Item = (Name, SrcType)>>(iter: I) -> Self {
        TypingEnv(iter.into_iter().collect())
    }
}

// ---------------------------------------------------------------------------
// Type errors
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, thiserror::Error, PartialEq)]
pub enum TypeError {
    #[error("unbound variable `{0}`")]
    UnboundVar(String),
    #[error("type mismatch at `{at}`: expected {expected}, found {actual}")]
    Mismatch {
        at: String,
        expected: String,
        actual: String,
    },
    #[error("`{at}` is used as a function but has type {actual}")]
    NotAFunction { at: String, actual: String },
    #[error("ambiguous type for `{at}`: sum injection not determined by context")]
    Ambiguous { at: String },
    #[error("hole in term position at `{at}`")]
    UnexpectedHole { at: String },
    #[error("context hole environment mismatch: {0}")]
    HoleEnv(String),
}

/// Renders a term for diagnostics, truncated so huge generated terms do not
/// flood error messages.
pub(crate) fn snippet(t: &SrcTerm) -> String {
    crate::print::budget_display(t)
}

// ---------------------------------------------------------------------------
// Typechecking (unification-based inference)
// ---------------------------------------------------------------------------

/// Inference types: either a ground source type (kept shared, never
/// decomposed eagerly) or a structural node possibly containing
/// metavariables. Bare `inl`/`inr` injections only determine their type up
/// to unification, so the checker threads constraints instead of
/// synthesizing bottom-up.
#[derive(Debug, Clone)]
pub(crate) enum ITy {
    Ground(SrcType),
    Arrow(Arc<ITy>, Arc<ITy>),
    Prod(Arc<ITy>, Arc<ITy>),
    Sum(Arc<ITy>, Arc<ITy>),
    Meta(u32),
}

pub(crate) struct Infer {
    table: Vec<Option<Arc<ITy>>>,
    /// Cache of fully resolved types for closed subterms, keyed by node
    /// address. Entries are only valid for the lifetime of one inference
    /// run, during which all terms are kept alive by the caller.
    closed_cache: std::collections::HashMap<usize, SrcType>,
}

pub(crate) type IEnv = Vec<(Name, Arc<ITy>)>;

impl Infer {
    pub(crate) fn new() -> Self {
        Infer {
            table: Vec::new(),
            closed_cache: std::collections::HashMap::new(),
        }
    }

    fn fresh(&mut self) -> Arc<ITy> {
        let id = self.table.len() as u32;
        self.table.push(None);
        Arc::new(ITy::Meta(id))
    }

    fn shorten(&self, t: &Arc<ITy>) -> Arc<ITy> {
        let mut cur = t.clone();
        while let ITy::Meta(id) = &*cur {
            match &self.table[*id as usize] {
                Some(next) => cur = next.clone(),
                None => break,
            }
        }
        cur
    }

    fn occurs(&self, id: u32, t: &Arc<ITy>) -> bool {
        match &*self.shorten(t) {
            ITy::Meta(m) => *m == id,
            ITy::Ground(_) => false,
            ITy::Arrow(a, b) | ITy::Prod(a, b) | ITy::Sum(a, b) => {
                self.occurs(id, a) || self.occurs(id, b)
            }
        }
    }

    pub(crate) fn unify(&mut self, a: &Arc<ITy>, b: &Arc<ITy>, at: &SrcTerm) -> Result<(), TypeError> {
        let a = self.shorten(a);
        let b = self.shorten(b);
        if Arc::ptr_eq(&a, &b) {
            return Ok(());
        }
        match (&*a, &*b) {
            (ITy::Meta(m), _) => {
                if self.occurs(*m, &b) {
                    return Err(TypeError::Ambiguous { at: snippet(at) });
                }
                self.table[*m as usize] = Some(b);
                Ok(())
            }
            (_, ITy::Meta(m)) => {
                if self.occurs(*m, &a) {
                    return Err(TypeError::Ambiguous { at: snippet(at) });
                }
                self.table[*m as usize] = Some(a);
                Ok(())
            }
            (ITy::Ground(g1), ITy::Ground(g2)) => {
                if g1 == g2 {
                    Ok(())
                } else {
                    Err(self.mismatch(&a, &b, at))
                }
            }
            (ITy::Ground(g), _) => match g.kind() {
                TyKind::Arrow(d, c) => {
                    let g2 = Arc::new(ITy::Arrow(
                        Arc::new(ITy::Ground(d.clone())),
                        Arc::new(ITy::Ground(c.clone())),
                    ));
                    self.unify(&g2, &b, at)
                }
                TyKind::Prod(l, r) => {
                    let g2 = Arc::new(ITy::Prod(
                        Arc::new(ITy::Ground(l.clone())),
                        Arc::new(ITy::Ground(r.clone())),
                    ));
                    self.unify(&g2, &b, at)
                }
                TyKind::Sum(l, r) => {
                    let g2 = Arc::new(ITy::Sum(
                        Arc::new(ITy::Ground(l.clone())),
                        Arc::new(ITy::Ground(r.clone())),
                    ));
                    self.unify(&g2, &b, at)
                }
                TyKind::Unit | TyKind::Bool => Err(self.mismatch(&a, &b, at)),
            },
            (_, ITy::Ground(_)) => self.unify(&b, &a, at),
            (ITy::Arrow(a1, a2), ITy::Arrow(b1, b2))
            | (ITy::Prod(a1, a2), ITy::Prod(b1, b2))
            | (ITy::Sum(a1, a2), ITy::Sum(b1, b2)) => {
                let (a1, a2, b1, b2) = (a1.clone(), a2.clone(), b1.clone(), b2.clone());
                self.unify(&a1, &b1, at)?;
                self.unify(&a2, &b2, at)
            }
            _ => Err(self.mismatch(&a, &b, at)),
        }
    }

    fn mismatch(&self, expected: &Arc<ITy>, actual: &Arc<ITy>, at: &SrcTerm) -> TypeError {
        TypeError::Mismatch {
            at: snippet(at),
            expected: self.describe(expected),
            actual: self.describe(actual),
        }
    }

    fn describe(&self, t: &Arc<ITy>) -> String {
        match self.resolve(t) {
            Some(ty) => crate::print::budget_display(&ty),
            None => match &*self.shorten(t) {
                ITy::Arrow(..) => "a function type".to_string(),
                ITy::Prod(..) => "a product type".to_string(),
                ITy::Sum(..) => "a sum type".to_string(),
                ITy::Meta(_) => "an undetermined type".to_string(),
                ITy::Ground(g) => crate::print::budget_display(g),
            },
        }
    }

    /// Fully resolves an inference type; `None` if metavariables remain.
    pub(crate) fn resolve(&self, t: &Arc<ITy>) -> Option<SrcType> {
        match &*self.shorten(t) {
            ITy::Ground(g) => Some(g.clone()),
            ITy::Meta(_) => None,
            ITy::Arrow(a, b) => Some(SrcType::arrow(self.resolve(a)?, self.resolve(b)?)),
            ITy::Prod(a, b) => Some(SrcType::prod(self.resolve(a)?, self.resolve(b)?)),
            ITy::Sum(a, b) => Some(SrcType::sum(self.resolve(a)?, self.resolve(b)?)),
        }
    }

    pub(crate) fn infer(
        &mut self,
        env: &mut IEnv,
        t: &SrcTerm,
        hole: &mut Option<HoleInfo>,
    ) -> Result<Arc<ITy>, TypeError> {
        if t.is_closed() && t.holes() == 0 {
            if let Some(ty) = self.closed_cache.get(&t.node_addr()) {
                return Ok(Arc::new(ITy::Ground(ty.clone())));
            }
        }
        let result = self.infer_uncached(env, t, hole)?;
        if t.is_closed() && t.holes() == 0 {
            if let Some(ty) = self.resolve(&result) {
                self.closed_cache.insert(t.node_addr(), ty);
            }
        }
        Ok(result)
    }

    fn infer_uncached(
        &mut self,
        env: &mut IEnv,
        t: &SrcTerm,
        hole: &mut Option<HoleInfo>,
    ) -> Result<Arc<ITy>, TypeError> {
        match t.kind() {
            SrcKind::Unit => Ok(Arc::new(ITy::Ground(SrcType::unit()))),
            SrcKind::True | SrcKind::False => Ok(Arc::new(ITy::Ground(SrcType::bool_()))),
            SrcKind::Var(x) => env
                .iter()
                .rev()
                .find(|(n, _)| n == x)
                .map(|(_, ty)| ty.clone())
                .ok_or_else(|| TypeError::UnboundVar(x.to_string())),
            SrcKind::Lam(x, ty, body) => {
                env.push((x.clone(), Arc::new(ITy::Ground(ty.clone()))));
                let tb = self.infer(env, body, hole);
                env.pop();
                Ok(Arc::new(ITy::Arrow(Arc::new(ITy::Ground(ty.clone())), tb?)))
            }
            SrcKind::App(f, a) => {
                let tf = self.infer(env, f, hole)?;
                let ta = self.infer(env, a, hole)?;
                let res = self.fresh();
                let want = Arc::new(ITy::Arrow(ta, res.clone()));
                match &*self.shorten(&tf) {
                    ITy::Ground(g) if !g.is_arrow() => {
                        return Err(TypeError::NotAFunction {
                            at: snippet(f),
                            actual: crate::print::budget_display(g),
                        })
                    }
                    ITy::Prod(..) | ITy::Sum(..) => {
                        return Err(TypeError::NotAFunction {
                            at: snippet(f),
                            actual: self.describe(&tf),
                        })
                    }
                    _ => {}
                }
                self.unify(&tf, &want, t)?;
                Ok(res)
            }
            SrcKind::Pair(l, r) => {
                let tl = self.infer(env, l, hole)?;
                let tr = self.infer(env, r, hole)?;
                Ok(Arc::new(ITy::Prod(tl, tr)))
            }
            SrcKind::Proj1(p) => {
                let tp = self.infer(env, p, hole)?;
                let a = self.fresh();
                let b = self.fresh();
                self.unify(&tp, &Arc::new(ITy::Prod(a.clone(), b)), t)?;
                Ok(a)
            }
            SrcKind::Proj2(p) => {
                let tp = self.infer(env, p, hole)?;
                let a = self.fresh();
                let b = self.fresh();
                self.unify(&tp, &Arc::new(ITy::Prod(a, b.clone())), t)?;
                Ok(b)
            }
            SrcKind::Inl(v) => {
                let tv = self.infer(env, v, hole)?;
                Ok(Arc::new(ITy::Sum(tv, self.fresh())))
            }
            SrcKind::Inr(v) => {
                let tv = self.infer(env, v, hole)?;
                Ok(Arc::new(ITy::Sum(self.fresh(), tv)))
            }
            SrcKind::Case(s, nl, bl, nr, br) => {
                let ts = self.infer(env, s, hole)?;
                let a = self.fresh();
                let b = self.fresh();
                self.unify(&ts, &Arc::new(ITy::Sum(a.clone(), b.clone())), s)?;
                env.push((nl.clone(), a));
                let tl = self.infer(env, bl, hole);
                env.pop();
                let tl = tl?;
                env.push((nr.clone(), b));
                let tr = self.infer(env, br, hole);
                env.pop();
                self.unify(&tl, &tr?, t)?;
                Ok(tl)
            }
            SrcKind::Seq(a, b) => {
                let ta = self.infer(env, a, hole)?;
                self.unify(&ta, &Arc::new(ITy::Ground(SrcType::unit())), a)?;
                self.infer(env, b, hole)
            }
            SrcKind::If(c, th, el) => {
                let tc = self.infer(env, c, hole)?;
                self.unify(&tc, &Arc::new(ITy::Ground(SrcType::bool_())), c)?;
                let tt = self.infer(env, th, hole)?;
                let te = self.infer(env, el, hole)?;
                self.unify(&tt, &te, t)?;
                Ok(tt)
            }
            SrcKind::Fix(dom, cod, f) => {
                let tf = self.infer(env, f, hole)?;
                let arr = SrcType::arrow(dom.clone(), cod.clone());
                let want = Arc::new(ITy::Ground(SrcType::arrow(arr.clone(), arr.clone())));
                self.unify(&tf, &want, t)?;
                Ok(Arc::new(ITy::Ground(arr)))
            }
            SrcKind::Hole => match hole {
                Some(info) => {
                    info.env_at_hole = Some(env.clone());
                    Ok(Arc::new(ITy::Ground(info.inner_ty.clone())))
                }
                None => Err(TypeError::UnexpectedHole { at: snippet(t) }),
            },
        }
    }
}

/// Communicates the hole typing to the inference pass when checking a
/// context rather than a term.
pub(crate) struct HoleInfo {
    pub(crate) inner_ty: SrcType,
    pub(crate) env_at_hole: Option<IEnv>,
}

/// Synthesizes the type of `t` under `env`.
///
/// Sum injections have no unique type on their own; the checker resolves
/// them by unification against the surrounding annotations, and reports an
/// ambiguity error when the result type is not fully determined.
pub fn typecheck(env: &TypingEnv, t: &SrcTerm) -> Result<SrcType, TypeError> {
    let mut inf = Infer::new();
    let mut ienv: IEnv = env
        .bindings()
        .iter()
        .map(|(n, ty)| (n.clone(), Arc::new(ITy::Ground(ty.clone()))))
        .collect();
    let ty = inf.infer(&mut ienv, t, &mut None)?;
    inf.resolve(&ty).ok_or(TypeError::Ambiguous { at: snippet(t) })
}

/// Checks `t` against `expected` under `env`. Unlike [`typecheck`], this
/// accepts terms whose type is only determined by the expectation, such as
/// the bare injections produced by the back-translation tooling.
pub fn check_type(env: &TypingEnv, t: &SrcTerm, expected: &SrcType) -> Result<(), TypeError> {
    let mut inf = Infer::new();
    let mut ienv: IEnv = env
        .bindings()
        .iter()
        .map(|(n, ty)| (n.clone(), Arc::new(ITy::Ground(ty.clone()))))
        .collect();
    let ty = inf.infer(&mut ienv, t, &mut None)?;
    inf.unify(&ty, &Arc::new(ITy::Ground(expected.clone())), t)
}

// ---------------------------------------------------------------------------
// Small-step evaluation
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq)]
pub enum SrcOutcome {
    Value { value: SrcTerm, steps: u64 },
    FuelExhausted { fuel_spent: u64 },
}

#[derive(Debug, Clone, PartialEq)]
pub enum SrcStep {
    Stepped(SrcTerm),
    AlreadyValue,
    /// Only reachable on ill-typed input; closed well-typed terms always
    /// progress.
    Stuck,
}

/// One evaluation-context frame. The machine keeps the frame stack explicit
/// so deeply nested reductions neither recurse nor re-decompose the term on
/// every step.
enum Frame {
    AppFn(SrcTerm),
    AppArg(SrcTerm),
    PairL(SrcTerm),
    PairR(SrcTerm),
    Proj1,
    Proj2,
    InlF,
    InrF,
    CaseF(Name, SrcTerm, Name, SrcTerm),
    SeqF(SrcTerm),
    IfF(SrcTerm, SrcTerm),
    FixF(SrcType, SrcType),
}

enum MachineEvent {
    Reduced,
    Finished,
    Stuck,
}

struct Machine {
    focus: SrcTerm,
    stack: Vec<Frame>,
}

impl Machine {
    fn new(t: SrcTerm) -> Self {
        Machine { focus: t, stack: Vec::new() }
    }

    /// Runs until the next reduction-rule application (performing it) or
    /// until the whole term is a value. Descent through evaluation contexts
    /// is free, matching the step accounting of the semantics.
    fn advance(&mut self) -> MachineEvent {
        loop {
            if self.focus.is_value() {
                let Some(frame) = self.stack.pop() else {
                    return MachineEvent::Finished;
                };
                match frame {
                    Frame::AppFn(arg) => {
                        self.stack.push(Frame::AppArg(std::mem::replace(&mut self.focus, arg)));
                    }
                    Frame::AppArg(f) => {
                        let SrcKind::Lam(x, _, body) = f.kind() else {
                            return MachineEvent::Stuck;
                        };
                        self.focus = body.subst(x, &self.focus);
                        return MachineEvent::Reduced;
                    }
                    Frame::PairL(r) => {
                        self.stack.push(Frame::PairR(std::mem::replace(&mut self.focus, r)));
                    }
                    Frame::PairR(l) => {
                        self.focus = SrcTerm::pair(l, self.focus.clone());
                    }
                    Frame::Proj1 => match self.focus.kind() {
                        SrcKind::Pair(l, _) => {
                            self.focus = l.clone();
                            return MachineEvent::Reduced;
                        }
                        _ => return MachineEvent::Stuck,
                    },
                    Frame::Proj2 => match self.focus.kind() {
                        SrcKind::Pair(_, r) => {
                            self.focus = r.clone();
                            return MachineEvent::Reduced;
                        }
                        _ => return MachineEvent::Stuck,
                    },
                    Frame::InlF => {
                        self.focus = SrcTerm::inl(self.focus.clone());
                    }
                    Frame::InrF => {
                        self.focus = SrcTerm::inr(self.focus.clone());
                    }
                    Frame::CaseF(nl, bl, nr, br) => match self.focus.kind() {
                        SrcKind::Inl(v) => {
                            self.focus = bl.subst(&nl, v);
                            return MachineEvent::Reduced;
                        }
                        SrcKind::Inr(v) => {
                            self.focus = br.subst(&nr, v);
                            return MachineEvent::Reduced;
                        }
                        _ => return MachineEvent::Stuck,
                    },
                    Frame::SeqF(b) => match self.focus.kind() {
                        SrcKind::Unit => {
                            self.focus = b;
                            return MachineEvent::Reduced;
                        }
                        _ => return MachineEvent::Stuck,
                    },
                    Frame::IfF(th, el) => match self.focus.kind() {
                        SrcKind::True => {
                            self.focus = th;
                            return MachineEvent::Reduced;
                        }
                        SrcKind::False => {
                            self.focus = el;
                            return MachineEvent::Reduced;
                        }
                        _ => return MachineEvent::Stuck,
                    },
                    Frame::FixF(dom, cod) => {
                        // fix (λx. t)  →  t[(λy. fix (λx. t) y)/x]
                        let SrcKind::Lam(x, _, body) = self.focus.kind() else {
                            return MachineEvent::Stuck;
                        };
                        let fix_term = SrcTerm::fix(dom.clone(), cod.clone(), self.focus.clone());
                        let y = fresh_name("y", |c| fix_term.fv().contains(c));
                        let eta = SrcTerm::lam(
                            y.clone(),
                            dom,
                            SrcTerm::app(fix_term, SrcTerm::var(y)),
                        );
                        self.focus = body.subst(x, &eta);
                        return MachineEvent::Reduced;
                    }
                }
            } else {
                let focus = self.focus.clone();
                match focus.kind() {
                    SrcKind::App(f, a) => {
                        self.stack.push(Frame::AppFn(a.clone()));
                        self.focus = f.clone();
                    }
                    SrcKind::Pair(l, r) => {
                        self.stack.push(Frame::PairL(r.clone()));
                        self.focus = l.clone();
                    }
                    SrcKind::Proj1(t) => {
                        self.stack.push(Frame::Proj1);
                        self.focus = t.clone();
                    }
                    SrcKind::Proj2(t) => {
                        self.stack.push(Frame::Proj2);
                        self.focus = t.clone();
                    }
                    SrcKind::Inl(t) => {
                        self.stack.push(Frame::InlF);
                        self.focus = t.clone();
                    }
                    SrcKind::Inr(t) => {
                        self.stack.push(Frame::InrF);
                        self.focus = t.clone();
                    }
                    SrcKind::Case(s, nl, bl, nr, br) => {
                        self.stack.push(Frame::CaseF(
                            nl.clone(),
                            bl.clone(),
                            nr.clone(),
                            br.clone(),
                        ));
                        self.focus = s.clone();
                    }
                    SrcKind::Seq(a, b) => {
                        self.stack.push(Frame::SeqF(b.clone()));
                        self.focus = a.clone();
                    }
                    SrcKind::If(c, t, e) => {
                        self.stack.push(Frame::IfF(t.clone(), e.clone()));
                        self.focus = c.clone();
                    }
                    SrcKind::Fix(d, c, t) => {
                        self.stack.push(Frame::FixF(d.clone(), c.clone()));
                        self.focus = t.clone();
                    }
                    SrcKind::Var(_) | SrcKind::Hole => return MachineEvent::Stuck,
                    SrcKind::Unit
                    | SrcKind::True
                    | SrcKind::False
                    | SrcKind::Lam(..) => unreachable!("values handled above"),
                }
            }
        }
    }

    /// Reassembles the whole term from the focus and the frame stack.
    fn rebuild(mut self) -> SrcTerm {
        while let Some(frame) = self.stack.pop() {
            self.focus = match frame {
                Frame::AppFn(arg) => SrcTerm::app(self.focus, arg),
                Frame::AppArg(f) => SrcTerm::app(f, self.focus),
                Frame::PairL(r) => SrcTerm::pair(self.focus, r),
                Frame::PairR(l) => SrcTerm::pair(l, self.focus),
                Frame::Proj1 => SrcTerm::proj1(self.focus),
                Frame::Proj2 => SrcTerm::proj2(self.focus),
                Frame::InlF => SrcTerm::inl(self.focus),
                Frame::InrF => SrcTerm::inr(self.focus),
                Frame::CaseF(nl, bl, nr, br) => SrcTerm::case_of(self.focus, nl, bl, nr, br),
                Frame::SeqF(b) => SrcTerm::seq(self.focus, b),
                Frame::IfF(t, e) => SrcTerm::ite(self.focus, t, e),
                Frame::FixF(d, c) => SrcTerm::fix(d, c, self.focus),
            };
        }
        self.focus
    }
}

/// Performs exactly one reduction-rule application at the redex determined
/// by the strict evaluation-context grammar.
pub fn src_step(t: &SrcTerm) -> SrcStep {
    if t.is_value() {
        return SrcStep::AlreadyValue;
    }
    let mut m = Machine::new(t.clone());
    match m.advance() {
        MachineEvent::Reduced => SrcStep::Stepped(m.rebuild()),
        MachineEvent::Finished => SrcStep::AlreadyValue,
        MachineEvent::Stuck => SrcStep::Stuck,
    }
}

/// Fuel-bounded evaluation; one unit of fuel per reduction-rule application.
///
/// Panics on stuck terms: the caller is required to pass closed well-typed
/// input.
pub fn src_eval(t: &SrcTerm, fuel: u64) -> SrcOutcome {
    let mut m = Machine::new(t.clone());
    let mut steps: u64 = 0;
    loop {
        if m.focus.is_value() && m.stack.is_empty() {
            return SrcOutcome::Value { value: m.focus, steps };
        }
        if steps == fuel {
            return SrcOutcome::FuelExhausted { fuel_spent: fuel };
        }
        match m.advance() {
            MachineEvent::Reduced => steps += 1,
            MachineEvent::Finished => return SrcOutcome::Value { value: m.focus, steps },
            MachineEvent::Stuck => panic!(
                "src_eval: stuck term (ill-typed input violates the contract): {}",
                snippet(&m.focus)
            ),
        }
    }
}

/// Collects the names free in a term as a plain set (handy for tests).
pub fn free_vars(t: &SrcTerm) -> BTreeSet<String> {
    t.fv().iter().map(|n| n.to_string()).collect()
}

/// Convenience for building `Name`s in constructor-heavy code.
pub fn n(s: &str) -> Name {
    name(s)
}
