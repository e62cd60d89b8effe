//! Single-hole program contexts for both languages: plugging, context
//! typing and scoping, and the fixpoint-based linkers.

use std::sync::Arc;

use crate::names::{fresh_name, Name};
use crate::source::{
    snippet, HoleInfo, IEnv, ITy, Infer, SrcKind, SrcTerm, SrcType, TypeError, TypingEnv,
};
use crate::target::{tgt_snippet, ScopeEnv, ScopeError, TgtKind, TgtTerm};

#[derive(Debug, Clone, thiserror::Error, PartialEq)]
pub enum CtxError {
    #[error("expected exactly one hole, found {0}")]
    HoleCount(u32),
}

/// A source term with exactly one hole.
#[derive(Clone, Debug, PartialEq)]
pub struct SrcCtx(SrcTerm);

impl SrcCtx {
    pub fn new(t: SrcTerm) -> Result<Self, CtxError> {
        if t.holes() == 1 {
            Ok(SrcCtx(t))
        } else {
            Err(CtxError::HoleCount(t.holes()))
        }
    }

    pub fn hole() -> Self {
        SrcCtx(SrcTerm::hole())
    }

    pub fn term(&self) -> &SrcTerm {
        &self.0
    }

    pub fn into_term(self) -> SrcTerm {
        self.0
    }

    pub fn plug(&self, filler: &SrcTerm) -> SrcTerm {
        plug_src(self, filler)
    }

    pub fn alpha_eq(&self, other: &SrcCtx) -> bool {
        self.0.alpha_eq(&other.0)
    }
}

impl std::fmt::Display for SrcCtx {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        self.0.fmt(f)
    }
}

/// A target term with exactly one hole.
#[derive(Clone, Debug, PartialEq)]
pub struct TgtCtx(TgtTerm);

impl TgtCtx {
    pub fn new(t: TgtTerm) -> Result<Self, CtxError> {
        if t.holes() == 1 {
            Ok(TgtCtx(t))
        } else {
            Err(CtxError::HoleCount(t.holes()))
        }
    }

    pub fn hole() -> Self {
        TgtCtx(TgtTerm::hole())
    }

    pub fn term(&self) -> &TgtTerm {
        &self.0
    }

    pub fn into_term(self) -> TgtTerm {
        self.0
    }

    pub fn plug(&self, filler: &TgtTerm) -> TgtTerm {
        plug_tgt(self, filler)
    }

    pub fn alpha_eq(&self, other: &TgtCtx) -> bool {
        self.0.alpha_eq(&other.0)
    }
}

impl std::fmt::Display for TgtCtx {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        self.0.fmt(f)
    }
}

// ---------------------------------------------------------------------------
// Plugging
// ---------------------------------------------------------------------------

fn replace_src_hole(t: &SrcTerm, filler: &SrcTerm) -> SrcTerm {
    if t.holes() == 0 {
        return t.clone();
    }
    match t.kind() {
        SrcKind::Hole => filler.clone(),
        SrcKind::Lam(x, ty, b) => SrcTerm::lam(x.clone(), ty.clone(), replace_src_hole(b, filler)),
        SrcKind::App(f, a) => SrcTerm::app(replace_src_hole(f, filler), replace_src_hole(a, filler)),
        SrcKind::Pair(l, r) => SrcTerm::pair(replace_src_hole(l, filler), replace_src_hole(r, filler)),
        SrcKind::Proj1(i) => SrcTerm::proj1(replace_src_hole(i, filler)),
        SrcKind::Proj2(i) => SrcTerm::proj2(replace_src_hole(i, filler)),
        SrcKind::Inl(i) => SrcTerm::inl(replace_src_hole(i, filler)),
        SrcKind::Inr(i) => SrcTerm::inr(replace_src_hole(i, filler)),
        SrcKind::Case(s, nl, bl, nr, br) => SrcTerm::case_of(
            replace_src_hole(s, filler),
            nl.clone(),
            replace_src_hole(bl, filler),
            nr.clone(),
            replace_src_hole(br, filler),
        ),
        SrcKind::Seq(a, b) => SrcTerm::seq(replace_src_hole(a, filler), replace_src_hole(b, filler)),
        SrcKind::If(c, th, el) => SrcTerm::ite(
            replace_src_hole(c, filler),
            replace_src_hole(th, filler),
            replace_src_hole(el, filler),
        ),
        SrcKind::Fix(d, c, i) => SrcTerm::fix(d.clone(), c.clone(), replace_src_hole(i, filler)),
        _ => t.clone(),
    }
}

/// Literal, capture-permitting replacement of the hole: binders in the
/// context may capture free variables of the filler. That is the intended
/// semantics of program contexts.
pub fn plug_src(c: &SrcCtx, filler: &SrcTerm) -> SrcTerm {
    replace_src_hole(c.term(), filler)
}

fn replace_tgt_hole(t: &TgtTerm, filler: &TgtTerm) -> TgtTerm {
    if t.holes() == 0 {
        return t.clone();
    }
    match t.kind() {
        TgtKind::Hole => filler.clone(),
        TgtKind::Lam(x, b) => TgtTerm::lam(x.clone(), replace_tgt_hole(b, filler)),
        TgtKind::App(f, a) => TgtTerm::app(replace_tgt_hole(f, filler), replace_tgt_hole(a, filler)),
        TgtKind::Pair(l, r) => TgtTerm::pair(replace_tgt_hole(l, filler), replace_tgt_hole(r, filler)),
        TgtKind::Proj1(i) => TgtTerm::proj1(replace_tgt_hole(i, filler)),
        TgtKind::Proj2(i) => TgtTerm::proj2(replace_tgt_hole(i, filler)),
        TgtKind::Inl(i) => TgtTerm::inl(replace_tgt_hole(i, filler)),
        TgtKind::Inr(i) => TgtTerm::inr(replace_tgt_hole(i, filler)),
        TgtKind::Case(s, nl, bl, nr, br) => TgtTerm::case_of(
            replace_tgt_hole(s, filler),
            nl.clone(),
            replace_tgt_hole(bl, filler),
            nr.clone(),
            replace_tgt_hole(br, filler),
        ),
        TgtKind::Seq(a, b) => TgtTerm::seq(replace_tgt_hole(a, filler), replace_tgt_hole(b, filler)),
        TgtKind::If(c, th, el) => TgtTerm::ite(
            replace_tgt_hole(c, filler),
            replace_tgt_hole(th, filler),
            replace_tgt_hole(el, filler),
        ),
        _ => t.clone(),
    }
}

pub fn plug_tgt(c: &TgtCtx, filler: &TgtTerm) -> TgtTerm {
    replace_tgt_hole(c.term(), filler)
}

// ---------------------------------------------------------------------------
// Context typing and scoping
// ---------------------------------------------------------------------------

/// Binder names crossed on the path from the root to the hole, outermost
/// first.
fn src_crossed_binders(t: &SrcTerm, out: &mut Vec<Name>) {
    debug_assert!(t.holes() == 1);
    match t.kind() {
        SrcKind::Hole => {}
        SrcKind::Lam(x, _, b) => {
            out.push(x.clone());
            src_crossed_binders(b, out);
        }
        SrcKind::Case(s, nl, bl, nr, br) => {
            if s.holes() == 1 {
                src_crossed_binders(s, out);
            } else if bl.holes() == 1 {
                out.push(nl.clone());
                src_crossed_binders(bl, out);
            } else {
                out.push(nr.clone());
                src_crossed_binders(br, out);
            }
        }
        SrcKind::App(a, b) | SrcKind::Pair(a, b) | SrcKind::Seq(a, b) => {
            if a.holes() == 1 {
                src_crossed_binders(a, out)
            } else {
                src_crossed_binders(b, out)
            }
        }
        SrcKind::Proj1(i) | SrcKind::Proj2(i) | SrcKind::Inl(i) | SrcKind::Inr(i) => {
            src_crossed_binders(i, out)
        }
        SrcKind::If(c, t1, t2) => {
            if c.holes() == 1 {
                src_crossed_binders(c, out)
            } else if t1.holes() == 1 {
                src_crossed_binders(t1, out)
            } else {
                src_crossed_binders(t2, out)
            }
        }
        SrcKind::Fix(_, _, i) => src_crossed_binders(i, out),
        _ => unreachable!("no hole below"),
    }
}

fn tgt_crossed_binders(t: &TgtTerm, out: &mut Vec<Name>) {
    debug_assert!(t.holes() == 1);
    match t.kind() {
        TgtKind::Hole => {}
        TgtKind::Lam(x, b) => {
            out.push(x.clone());
            tgt_crossed_binders(b, out);
        }
        TgtKind::Case(s, nl, bl, nr, br) => {
            if s.holes() == 1 {
                tgt_crossed_binders(s, out);
            } else if bl.holes() == 1 {
                out.push(nl.clone());
                tgt_crossed_binders(bl, out);
            } else {
                out.push(nr.clone());
                tgt_crossed_binders(br, out);
            }
        }
        TgtKind::App(a, b) | TgtKind::Pair(a, b) | TgtKind::Seq(a, b) => {
            if a.holes() == 1 {
                tgt_crossed_binders(a, out)
            } else {
                tgt_crossed_binders(b, out)
            }
        }
        TgtKind::Proj1(i) | TgtKind::Proj2(i) | TgtKind::Inl(i) | TgtKind::Inr(i) => {
            tgt_crossed_binders(i, out)
        }
        TgtKind::If(c, t1, t2) => {
            if c.holes() == 1 {
                tgt_crossed_binders(c, out)
            } else if t1.holes() == 1 {
                tgt_crossed_binders(t1, out)
            } else {
                tgt_crossed_binders(t2, out)
            }
        }
        _ => unreachable!("no hole below"),
    }
}

/// Types a context whose hole stands for a term of type `inner_ty` under
/// `inner_env`. The environment at the hole is `inner_env` extended by the
/// binders crossed on the way in; any binder shadowing an `inner_env` name
/// must agree with its type, otherwise plugging could silently re-type a
/// filler's free variable.
///
/// Returns the outer pair: the environment the plugged term typechecks
/// under (the declared `inner_env` minus the bindings that the context's own
/// binders provide) and the result type.
pub fn ctx_typecheck(
    c: &SrcCtx,
    inner_env: &TypingEnv,
    inner_ty: &SrcType,
) -> Result<(TypingEnv, SrcType), TypeError> {
    let mut crossed = Vec::new();
    src_crossed_binders(c.term(), &mut crossed);
    let outer: TypingEnv = inner_env
        .bindings()
        .iter()
        .filter(|(n, _)| !crossed.contains(n))
        .cloned()
        .collect();

    let mut inf = Infer::new();
    let mut ienv: IEnv = outer
        .bindings()
        .iter()
        .map(|(n, ty)| (n.clone(), Arc::new(ITy::Ground(ty.clone()))))
        .collect();
    let mut hole = Some(HoleInfo { inner_ty: inner_ty.clone(), env_at_hole: None });
    let ty = inf.infer(&mut ienv, c.term(), &mut hole)?;

    let env_at_hole = hole
        .and_then(|h| h.env_at_hole)
        .expect("context has exactly one hole");
    for (x, want) in inner_env.bindings() {
        let found = env_at_hole.iter().rev().find(|(n, _)| n == x);
        match found {
            None => {
                return Err(TypeError::HoleEnv(format!(
                    "hole environment binds `{x}` but the context provides no binding for it"
                )))
            }
            Some((_, ity)) => {
                let got = inf.resolve(ity).ok_or_else(|| {
                    TypeError::HoleEnv(format!("binder for `{x}` has an undetermined type"))
                })?;
                if got != *want {
                    return Err(TypeError::HoleEnv(format!(
                        "hole environment expects `{x}` at one type but the context binds it at another"
                    )));
                }
            }
        }
    }

    let ty = inf
        .resolve(&ty)
        .ok_or_else(|| TypeError::Ambiguous { at: snippet(c.term()) })?;
    Ok((outer, ty))
}

/// Scope-level analogue of [`ctx_typecheck`]: returns the outer scope
/// environment (the declared hole environment minus the names the context's
/// own binders provide) and fails if the context itself mentions unbound
/// names.
pub fn ctx_well_scoped(c: &TgtCtx, inner_env: &ScopeEnv) -> Result<ScopeEnv, ScopeError> {
    let mut crossed = Vec::new();
    tgt_crossed_binders(c.term(), &mut crossed);
    let outer: ScopeEnv = inner_env
        .iter()
        .filter(|n| !crossed.contains(n))
        .cloned()
        .collect();
    // Holes carry no free variables, so the cached set is exactly the
    // context's own free names.
    for x in c.term().fv().iter() {
        if !outer.iter().any(|n| n == x) {
            return Err(ScopeError::Unbound(x.to_string()));
        }
    }
    Ok(outer)
}

// ---------------------------------------------------------------------------
// Linking
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, thiserror::Error, PartialEq)]
pub enum LinkError {
    #[error("component is not a lambda: `{0}`")]
    NotALambda(String),
    #[error("component does not typecheck: {0}")]
    Type(#[from] TypeError),
    #[error("component is not well-scoped: {0}")]
    Scope(#[from] ScopeError),
}

/// The first component's dependency variable, bound by the second half of
/// the linked pair.
pub const LINK_VAR_1: &str = "x1";
/// The second component's dependency variable.
pub const LINK_VAR_2: &str = "x2";

/// Links two mutually dependent source components into a pair.
///
/// `t1` may use the free variable `x2 : ty2d -> ty2c` and must be a lambda
/// of type `ty1d -> ty1c`; symmetrically for `t2`. The result is the
/// fixpoint term
///
/// ```text
/// fix [Unit -> ((τ1' -> τ1) * (τ2' -> τ2))]
///   (\p. \_. < \x1'. ((\x2. t1) (snd (p unit))) x1',
///              \x2'. ((\x1. t2) (fst (p unit))) x2' >) unit
/// ```
///
/// The eta-expansions around the recursive projections keep the
/// call-by-value fixpoint from diverging; they are reproduced literally.
pub fn link_src(
    t1: &SrcTerm,
    ty1d: &SrcType,
    ty1c: &SrcType,
    ty2d: &SrcType,
    ty2c: &SrcType,
    t2: &SrcTerm,
) -> Result<SrcTerm, LinkError> {
    if !matches!(t1.kind(), SrcKind::Lam(..)) {
        return Err(LinkError::NotALambda(snippet(t1)));
    }
    if !matches!(t2.kind(), SrcKind::Lam(..)) {
        return Err(LinkError::NotALambda(snippet(t2)));
    }
    let fun1 = SrcType::arrow(ty1d.clone(), ty1c.clone());
    let fun2 = SrcType::arrow(ty2d.clone(), ty2c.clone());
    crate::source::check_type(
        &TypingEnv::empty().extended(LINK_VAR_2, fun2.clone()),
        t1,
        &fun1,
    )?;
    crate::source::check_type(
        &TypingEnv::empty().extended(LINK_VAR_1, fun1.clone()),
        t2,
        &fun2,
    )?;

    let pair_ty = SrcType::prod(fun1.clone(), fun2.clone());
    let taken = |c: &str| t1.fv().contains(c) || t2.fv().contains(c);
    let p = fresh_name("p", taken);
    let us = fresh_name("_", taken);
    let x1q = fresh_name("x1'", taken);
    let x2q = fresh_name("x2'", taken);

    let p_unit = |proj: fn(SrcTerm) -> SrcTerm| {
        proj(SrcTerm::app(SrcTerm::var(p.clone()), SrcTerm::unit()))
    };
    let first = SrcTerm::lam(
        x1q.clone(),
        ty1d.clone(),
        SrcTerm::app(
            SrcTerm::app(
                SrcTerm::lam(LINK_VAR_2, fun2.clone(), t1.clone()),
                p_unit(SrcTerm::proj2),
            ),
            SrcTerm::var(x1q.clone()),
        ),
    );
    let second = SrcTerm::lam(
        x2q.clone(),
        ty2d.clone(),
        SrcTerm::app(
            SrcTerm::app(
                SrcTerm::lam(LINK_VAR_1, fun1.clone(), t2.clone()),
                p_unit(SrcTerm::proj1),
            ),
            SrcTerm::var(x2q.clone()),
        ),
    );
    let generator = SrcTerm::lam(
        p,
        SrcType::arrow(SrcType::unit(), pair_ty.clone()),
        SrcTerm::lam(us, SrcType::unit(), SrcTerm::pair(first, second)),
    );
    Ok(SrcTerm::app(
        SrcTerm::fix(SrcType::unit(), pair_ty, generator),
        SrcTerm::unit(),
    ))
}

/// The untyped analogue of [`link_src`], built from the Z combinator.
pub fn link_tgt(t1: &TgtTerm, t2: &TgtTerm) -> Result<TgtTerm, LinkError> {
    if !matches!(t1.kind(), TgtKind::Lam(..)) {
        return Err(LinkError::NotALambda(tgt_snippet(t1)));
    }
    if !matches!(t2.kind(), TgtKind::Lam(..)) {
        return Err(LinkError::NotALambda(tgt_snippet(t2)));
    }
    for x in t1.fv().iter() {
        if &**x != LINK_VAR_2 {
            return Err(LinkError::Scope(ScopeError::Unbound(x.to_string())));
        }
    }
    for x in t2.fv().iter() {
        if &**x != LINK_VAR_1 {
            return Err(LinkError::Scope(ScopeError::Unbound(x.to_string())));
        }
    }
    Ok(link_tgt_unchecked(t1, t2))
}

fn link_tgt_unchecked(t1: &TgtTerm, t2: &TgtTerm) -> TgtTerm {
    let taken = |c: &str| t1.fv().contains(c) || t2.fv().contains(c);
    let p = fresh_name("p", taken);
    let us = fresh_name("_", taken);
    let x1q = fresh_name("x1'", taken);
    let x2q = fresh_name("x2'", taken);

    let p_unit = |proj: fn(TgtTerm) -> TgtTerm| {
        proj(TgtTerm::app(TgtTerm::var(p.clone()), TgtTerm::unit()))
    };
    let first = TgtTerm::lam(
        x1q.clone(),
        TgtTerm::app(
            TgtTerm::app(TgtTerm::lam(LINK_VAR_2, t1.clone()), p_unit(TgtTerm::proj2)),
            TgtTerm::var(x1q.clone()),
        ),
    );
    let second = TgtTerm::lam(
        x2q.clone(),
        TgtTerm::app(
            TgtTerm::app(TgtTerm::lam(LINK_VAR_1, t2.clone()), p_unit(TgtTerm::proj1)),
            TgtTerm::var(x2q.clone()),
        ),
    );
    let generator = TgtTerm::lam(p, TgtTerm::lam(us, TgtTerm::pair(first, second)));
    TgtTerm::app(
        TgtTerm::app(crate::compile::z_combinator(), generator),
        TgtTerm::unit(),
    )
}

/// `link_tgt` with a hole in the first-component position: linking with a
/// fixed partner is a valid program context.
pub fn linking_ctx(t2: &TgtTerm) -> Result<TgtCtx, LinkError> {
    if !matches!(t2.kind(), TgtKind::Lam(..)) {
        return Err(LinkError::NotALambda(tgt_snippet(t2)));
    }
    for x in t2.fv().iter() {
        if &**x != LINK_VAR_1 {
            return Err(LinkError::Scope(ScopeError::Unbound(x.to_string())));
        }
    }
    let linked = link_tgt_unchecked(&TgtTerm::hole(), t2);
    Ok(TgtCtx::new(linked).expect("one hole by construction"))
}
