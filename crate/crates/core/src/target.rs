//! The untyped target calculus: syntax, well-scopedness, and small-step
//! call-by-value evaluation with the `wrong` dynamic type error.
//!
//! Type-error redexes (applying a non-lambda, projecting a non-pair, case on
//! a non-sum, if on a non-boolean, seq on a non-unit) step to `wrong`, and a
//! non-empty evaluation context around `wrong` collapses to `wrong` in one
//! step.

use std::fmt;
use std::sync::Arc;

use crate::names::{fv_empty, fv_single, fv_union, fv_union3, fv_without, FvSet, Name};

#[derive(Debug, PartialEq, Eq)]
pub enum TgtKind {
    Unit,
    True,
    False,
    Var(Name),
    Lam(Name, TgtTerm),
    App(TgtTerm, TgtTerm),
    Pair(TgtTerm, TgtTerm),
    Proj1(TgtTerm),
    Proj2(TgtTerm),
    Inl(TgtTerm),
    Inr(TgtTerm),
    Case(TgtTerm, Name, TgtTerm, Name, TgtTerm),
    Seq(TgtTerm, TgtTerm),
    If(TgtTerm, TgtTerm, TgtTerm),
    /// The unrecoverable dynamic type error; a term but never a value.
    Wrong,
    Hole,
}

#[derive(Debug)]
struct TgtNode {
    kind: TgtKind,
    fv: FvSet,
    holes: u32,
    value: bool,
}

#[derive(Clone)]
pub struct TgtTerm(Arc<TgtNode>);

impl PartialEq for TgtTerm {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0) || self.0.kind == other.0.kind
    }
}
impl Eq for TgtTerm {}

impl fmt::Debug for TgtTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

fn mk(kind: TgtKind, fv: FvSet, holes: u32, value: bool) -> TgtTerm {
    TgtTerm(Arc::new(TgtNode { kind, fv, holes, value }))
}

impl TgtTerm {
    pub fn unit() -> Self {
        mk(TgtKind::Unit, fv_empty(), 0, true)
    }
    pub fn tru() -> Self {
        mk(TgtKind::True, fv_empty(), 0, true)
    }
    pub fn fls() -> Self {
        mk(TgtKind::False, fv_empty(), 0, true)
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
        mk(TgtKind::Var(n), fv, 0, false)
    }
    pub fn lam(n: impl Into<Name>, body: TgtTerm) -> Self {
        let n = n.into();
        let fv = fv_without(body.fv(), &n);
        let holes = body.holes();
        mk(TgtKind::Lam(n, body), fv, holes, true)
    }
    pub fn app(f: TgtTerm, a: TgtTerm) -> Self {
        let fv = fv_union(f.fv(), a.fv());
        let holes = f.holes() + a.holes();
        mk(TgtKind::App(f, a), fv, holes, false)
    }
    pub fn pair(l: TgtTerm, r: TgtTerm) -> Self {
        let fv = fv_union(l.fv(), r.fv());
        let holes = l.holes() + r.holes();
        let value = l.is_value() && r.is_value();
        mk(TgtKind::Pair(l, r), fv, holes, value)
    }
    pub fn proj1(t: TgtTerm) -> Self {
        let fv = t.fv().clone();
        let holes = t.holes();
        mk(TgtKind::Proj1(t), fv, holes, false)
    }
    pub fn proj2(t: TgtTerm) -> Self {
        let fv = t.fv().clone();
        let holes = t.holes();
        mk(TgtKind::Proj2(t), fv, holes, false)
    }
    pub fn inl(t: TgtTerm) -> Self {
        let fv = t.fv().clone();
        let holes = t.holes();
        let value = t.is_value();
        mk(TgtKind::Inl(t), fv, holes, value)
    }
    pub fn inr(t: TgtTerm) -> Self {
        let fv = t.fv().clone();
        let holes = t.holes();
        let value = t.is_value();
        mk(TgtKind::Inr(t), fv, holes, value)
    }
    pub fn case_of(
        scrut: TgtTerm,
        nl: impl Into<Name>,
        bl: TgtTerm,
        nr: impl Into<Name>,
        br: TgtTerm,
    ) -> Self {
        let nl = nl.into();
        let nr = nr.into();
        let fv = fv_union3(scrut.fv(), &fv_without(bl.fv(), &nl), &fv_without(br.fv(), &nr));
        let holes = scrut.holes() + bl.holes() + br.holes();
        mk(TgtKind::Case(scrut, nl, bl, nr, br), fv, holes, false)
    }
    pub fn seq(a: TgtTerm, b: TgtTerm) -> Self {
        let fv = fv_union(a.fv(), b.fv());
        let holes = a.holes() + b.holes();
        mk(TgtKind::Seq(a, b), fv, holes, false)
    }
    pub fn ite(c: TgtTerm, t: TgtTerm, e: TgtTerm) -> Self {
        let fv = fv_union3(c.fv(), t.fv(), e.fv());
        let holes = c.holes() + t.holes() + e.holes();
        mk(TgtKind::If(c, t, e), fv, holes, false)
    }
    pub fn wrong() -> Self {
        mk(TgtKind::Wrong, fv_empty(), 0, false)
    }
    pub fn hole() -> Self {
        mk(TgtKind::Hole, fv_empty(), 1, false)
    }

    pub fn kind(&self) -> &TgtKind {
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
    pub fn is_value(&self) -> bool {
        self.0.value
    }
    pub fn is_wrong(&self) -> bool {
        matches!(self.kind(), TgtKind::Wrong)
    }
    pub fn ptr_eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0)
    }

    /// Capture-avoiding substitution of `v` for free occurrences of `x`.
    pub fn subst(&self, x: &Name, v: &TgtTerm) -> TgtTerm {
        if !self.fv().contains(x) {
            return self.clone();
        }
        match self.kind() {
            TgtKind::Var(_) => v.clone(),
            TgtKind::Lam(y, body) => {
                if v.fv().contains(y) {
                    let fresh = crate::names::fresh_name(y, |c| {
                        body.fv().contains(c) || v.fv().contains(c) || c == &**x
                    });
                    let renamed = body.subst(y, &TgtTerm::var(fresh.clone()));
                    TgtTerm::lam(fresh, renamed.subst(x, v))
                } else {
                    TgtTerm::lam(y.clone(), body.subst(x, v))
                }
            }
            TgtKind::App(f, a) => TgtTerm::app(f.subst(x, v), a.subst(x, v)),
            TgtKind::Pair(l, r) => TgtTerm::pair(l.subst(x, v), r.subst(x, v)),
            TgtKind::Proj1(t) => TgtTerm::proj1(t.subst(x, v)),
            TgtKind::Proj2(t) => TgtTerm::proj2(t.subst(x, v)),
            TgtKind::Inl(t) => TgtTerm::inl(t.subst(x, v)),
            TgtKind::Inr(t) => TgtTerm::inr(t.subst(x, v)),
            TgtKind::Case(s, nl, bl, nr, br) => {
                let s = s.subst(x, v);
                let (nl, bl) = subst_branch(nl, bl, x, v);
                let (nr, br) = subst_branch(nr, br, x, v);
                TgtTerm::case_of(s, nl, bl, nr, br)
            }
            TgtKind::Seq(a, b) => TgtTerm::seq(a.subst(x, v), b.subst(x, v)),
            TgtKind::If(c, t, e) => TgtTerm::ite(c.subst(x, v), t.subst(x, v), e.subst(x, v)),
            TgtKind::Unit | TgtKind::True | TgtKind::False | TgtKind::Wrong | TgtKind::Hole => {
                unreachable!()
            }
        }
    }

    pub fn alpha_eq(&self, other: &TgtTerm) -> bool {
        alpha_eq_under(self, other, &mut Vec::new())
    }
}

fn subst_branch(n: &Name, body: &TgtTerm, x: &Name, v: &TgtTerm) -> (Name, TgtTerm) {
    if n == x || !body.fv().contains(x) {
        return (n.clone(), body.clone());
    }
    if v.fv().contains(n) {
        let fresh =
            crate::names::fresh_name(n, |c| body.fv().contains(c) || v.fv().contains(c) || c == &**x);
        let renamed = body.subst(n, &TgtTerm::var(fresh.clone()));
        (fresh, renamed.subst(x, v))
    } else {
        (n.clone(), body.subst(x, v))
    }
}

fn alpha_eq_under(a: &TgtTerm, b: &TgtTerm, binders: &mut Vec<(Name, Name)>) -> bool {
    if binders.is_empty() && a.ptr_eq(b) {
        return true;
    }
    match (a.kind(), b.kind()) {
        (TgtKind::Unit, TgtKind::Unit)
        | (TgtKind::True, TgtKind::True)
        | (TgtKind::False, TgtKind::False)
        | (TgtKind::Wrong, TgtKind::Wrong)
        | (TgtKind::Hole, TgtKind::Hole) => true,
        (TgtKind::Var(x), TgtKind::Var(y)) => {
            for (bx, by) in binders.iter().rev() {
                match (bx == x, by == y) {
                    (true, true) => return true,
                    (false, false) => continue,
                    _ => return false,
                }
            }
            x == y
        }
        (TgtKind::Lam(x, bx), TgtKind::Lam(y, by)) => {
            binders.push((x.clone(), y.clone()));
            let r = alpha_eq_under(bx, by, binders);
            binders.pop();
            r
        }
        (TgtKind::App(f1, a1), TgtKind::App(f2, a2))
        | (TgtKind::Pair(f1, a1), TgtKind::Pair(f2, a2))
        | (TgtKind::Seq(f1, a1), TgtKind::Seq(f2, a2)) => {
            alpha_eq_under(f1, f2, binders) && alpha_eq_under(a1, a2, binders)
        }
        (TgtKind::Proj1(t1), TgtKind::Proj1(t2))
        | (TgtKind::Proj2(t1), TgtKind::Proj2(t2))
        | (TgtKind::Inl(t1), TgtKind::Inl(t2))
        | (TgtKind::Inr(t1), TgtKind::Inr(t2)) => alpha_eq_under(t1, t2, binders),
        (TgtKind::Case(s1, nl1, bl1, nr1, br1), TgtKind::Case(s2, nl2, bl2, nr2, br2)) => {
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
        (TgtKind::If(c1, t1, e1), TgtKind::If(c2, t2, e2)) => {
            alpha_eq_under(c1, c2, binders)
                && alpha_eq_under(t1, t2, binders)
                && alpha_eq_under(e1, e2, binders)
        }
        _ => false,
    }
}

// ---------------------------------------------------------------------------
// Well-scopedness
// ---------------------------------------------------------------------------

pub type ScopeEnv = Vec<Name>;

/// True iff every free variable of `t` is listed in `env`. Holes are
/// treated as closed leaves.
pub fn well_scoped(env: &[Name], t: &TgtTerm) -> bool {
    t.fv().iter().all(|x| env.iter().any(|n| n == x))
}

#[derive(Debug, Clone, thiserror::Error, PartialEq, Eq)]
pub enum ScopeError {
    #[error("unbound variable `{0}`")]
    Unbound(String),
    #[error("context hole environment mismatch: {0}")]
    HoleEnv(String),
}

// ---------------------------------------------------------------------------
// Small-step evaluation
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq)]
pub enum TgtOutcome {
    /// Termination with a value; `wrong` is excluded.
    Value { value: TgtTerm, steps: u64 },
    Wrong { steps: u64 },
    FuelExhausted { fuel_spent: u64 },
}

#[derive(Debug, Clone, PartialEq)]
pub enum TgtStep {
    Stepped(TgtTerm),
    AlreadyValue,
    IsWrong,
}

enum Frame {
    AppFn(TgtTerm),
    AppArg(TgtTerm),
    PairL(TgtTerm),
    PairR(TgtTerm),
    Proj1,
    Proj2,
    InlF,
    InrF,
    CaseF(Name, TgtTerm, Name, TgtTerm),
    SeqF(TgtTerm),
    IfF(TgtTerm, TgtTerm),
}

enum MachineEvent {
    Reduced,
    Finished,
    /// The whole term became `wrong` with an empty context.
    WrongTerm,
}

struct Machine {
    focus: TgtTerm,
    stack: Vec<Frame>,
}

impl Machine {
    fn new(t: TgtTerm) -> Self {
        Machine { focus: t, stack: Vec::new() }
    }

    fn advance(&mut self) -> MachineEvent {
        loop {
            if self.focus.is_wrong() {
                if self.stack.is_empty() {
                    return MachineEvent::WrongTerm;
                }
                // E[wrong] → wrong for E ≠ [·]: one rule application.
                self.stack.clear();
                return MachineEvent::Reduced;
            }
            if self.focus.is_value() {
                let Some(frame) = self.stack.pop() else {
                    return MachineEvent::Finished;
                };
                match frame {
                    Frame::AppFn(arg) => {
                        self.stack.push(Frame::AppArg(std::mem::replace(&mut self.focus, arg)));
                    }
                    Frame::AppArg(f) => {
                        match f.kind() {
                            TgtKind::Lam(x, body) => self.focus = body.subst(x, &self.focus),
                            _ => self.focus = TgtTerm::wrong(),
                        }
                        return MachineEvent::Reduced;
                    }
                    Frame::PairL(r) => {
                        self.stack.push(Frame::PairR(std::mem::replace(&mut self.focus, r)));
                    }
                    Frame::PairR(l) => {
                        self.focus = TgtTerm::pair(l, self.focus.clone());
                    }
                    Frame::Proj1 => {
                        match self.focus.kind() {
                            TgtKind::Pair(l, _) => self.focus = l.clone(),
                            _ => self.focus = TgtTerm::wrong(),
                        }
                        return MachineEvent::Reduced;
                    }
                    Frame::Proj2 => {
                        match self.focus.kind() {
                            TgtKind::Pair(_, r) => self.focus = r.clone(),
                            _ => self.focus = TgtTerm::wrong(),
                        }
                        return MachineEvent::Reduced;
                    }
                    Frame::InlF => {
                        self.focus = TgtTerm::inl(self.focus.clone());
                    }
                    Frame::InrF => {
                        self.focus = TgtTerm::inr(self.focus.clone());
                    }
                    Frame::CaseF(nl, bl, nr, br) => {
                        match self.focus.kind() {
                            TgtKind::Inl(v) => self.focus = bl.subst(&nl, v),
                            TgtKind::Inr(v) => self.focus = br.subst(&nr, v),
                            _ => self.focus = TgtTerm::wrong(),
                        }
                        return MachineEvent::Reduced;
                    }
                    Frame::SeqF(b) => {
                        match self.focus.kind() {
                            TgtKind::Unit => self.focus = b,
                            _ => self.focus = TgtTerm::wrong(),
                        }
                        return MachineEvent::Reduced;
                    }
                    Frame::IfF(th, el) => {
                        match self.focus.kind() {
                            TgtKind::True => self.focus = th,
                            TgtKind::False => self.focus = el,
                            _ => self.focus = TgtTerm::wrong(),
                        }
                        return MachineEvent::Reduced;
                    }
                }
            } else {
                let focus = self.focus.clone();
                match focus.kind() {
                    TgtKind::App(f, a) => {
                        self.stack.push(Frame::AppFn(a.clone()));
                        self.focus = f.clone();
                    }
                    TgtKind::Pair(l, r) => {
                        self.stack.push(Frame::PairL(r.clone()));
                        self.focus = l.clone();
                    }
                    TgtKind::Proj1(t) => {
                        self.stack.push(Frame::Proj1);
                        self.focus = t.clone();
                    }
                    TgtKind::Proj2(t) => {
                        self.stack.push(Frame::Proj2);
                        self.focus = t.clone();
                    }
                    TgtKind::Inl(t) => {
                        self.stack.push(Frame::InlF);
                        self.focus = t.clone();
                    }
                    TgtKind::Inr(t) => {
                        self.stack.push(Frame::InrF);
                        self.focus = t.clone();
                    }
                    TgtKind::Case(s, nl, bl, nr, br) => {
                        self.stack.push(Frame::CaseF(
                            nl.clone(),
                            bl.clone(),
                            nr.clone(),
                            br.clone(),
                        ));
                        self.focus = s.clone();
                    }
                    TgtKind::Seq(a, b) => {
                        self.stack.push(Frame::SeqF(b.clone()));
                        self.focus = a.clone();
                    }
                    TgtKind::If(c, t, e) => {
                        self.stack.push(Frame::IfF(t.clone(), e.clone()));
                        self.focus = c.clone();
                    }
                    TgtKind::Var(x) => panic!(
                        "tgt evaluation reached a free variable `{x}` (open input violates the contract)"
                    ),
                    TgtKind::Hole => {
                        panic!("tgt evaluation reached a context hole (plug the context first)")
                    }
                    TgtKind::Wrong => unreachable!("handled above"),
                    TgtKind::Unit | TgtKind::True | TgtKind::False | TgtKind::Lam(..) => {
                        unreachable!("values handled above")
                    }
                }
            }
        }
    }

    fn rebuild(mut self) -> TgtTerm {
        while let Some(frame) = self.stack.pop() {
            self.focus = match frame {
                Frame::AppFn(arg) => TgtTerm::app(self.focus, arg),
                Frame::AppArg(f) => TgtTerm::app(f, self.focus),
                Frame::PairL(r) => TgtTerm::pair(self.focus, r),
                Frame::PairR(l) => TgtTerm::pair(l, self.focus),
                Frame::Proj1 => TgtTerm::proj1(self.focus),
                Frame::Proj2 => TgtTerm::proj2(self.focus),
                Frame::InlF => TgtTerm::inl(self.focus),
                Frame::InrF => TgtTerm::inr(self.focus),
                Frame::CaseF(nl, bl, nr, br) => TgtTerm::case_of(self.focus, nl, bl, nr, br),
                Frame::SeqF(b) => TgtTerm::seq(self.focus, b),
                Frame::IfF(t, e) => TgtTerm::ite(self.focus, t, e),
            };
        }
        self.focus
    }
}

/// One reduction under the strict evaluation-context grammar.
pub fn tgt_step(t: &TgtTerm) -> TgtStep {
    if t.is_value() {
        return TgtStep::AlreadyValue;
    }
    if t.is_wrong() {
        return TgtStep::IsWrong;
    }
    let mut m = Machine::new(t.clone());
    match m.advance() {
        MachineEvent::Reduced => TgtStep::Stepped(m.rebuild()),
        MachineEvent::Finished => TgtStep::AlreadyValue,
        MachineEvent::WrongTerm => TgtStep::IsWrong,
    }
}

/// Deterministic fuel-bounded iteration of [`tgt_step`].
pub fn tgt_eval(t: &TgtTerm, fuel: u64) -> TgtOutcome {
    let mut m = Machine::new(t.clone());
    let mut steps: u64 = 0;
    loop {
        if m.focus.is_wrong() && m.stack.is_empty() {
            return TgtOutcome::Wrong { steps };
        }
        if m.focus.is_value() && m.stack.is_empty() {
            return TgtOutcome::Value { value: m.focus, steps };
        }
        if steps == fuel {
            return TgtOutcome::FuelExhausted { fuel_spent: fuel };
        }
        match m.advance() {
            MachineEvent::Reduced => steps += 1,
            MachineEvent::Finished => return TgtOutcome::Value { value: m.focus, steps },
            MachineEvent::WrongTerm => return TgtOutcome::Wrong { steps },
        }
    }
}

pub(crate) fn tgt_snippet(t: &TgtTerm) -> String {
    crate::print::budget_display(t)
}
