//! The two compiler passes: type erasure and the dynamic type-checking
//! wrappers, plus whole-program and modular compilation.

use std::collections::HashMap;

use crate::ctx::{SrcCtx, TgtCtx};
use crate::source::{check_type, snippet, SrcKind, SrcTerm, SrcType, TyKind, TypeError, TypingEnv};
use crate::target::TgtTerm;

/// The call-by-value fixed-point combinator:
/// `\f. (\x. f (\y. x x y)) (\x. f (\y. x x y))`.
pub fn z_combinator() -> TgtTerm {
    let half = || {
        TgtTerm::lam(
            "x",
            TgtTerm::app(
                TgtTerm::var("f"),
                TgtTerm::lam(
                    "y",
                    TgtTerm::app(
                        TgtTerm::app(TgtTerm::var("x"), TgtTerm::var("x")),
                        TgtTerm::var("y"),
                    ),
                ),
            ),
        )
    };
    TgtTerm::lam("f", TgtTerm::app(half(), half()))
}

/// Homomorphic type erasure; `fix` becomes an application of the Z
/// combinator. Total on syntax, including holes, so contexts erase too.
pub fn erase(t: &SrcTerm) -> TgtTerm {
    match t.kind() {
        SrcKind::Unit => TgtTerm::unit(),
        SrcKind::True => TgtTerm::tru(),
        SrcKind::False => TgtTerm::fls(),
        SrcKind::Var(x) => TgtTerm::var(x.clone()),
        SrcKind::Lam(x, _, b) => TgtTerm::lam(x.clone(), erase(b)),
        SrcKind::App(f, a) => TgtTerm::app(erase(f), erase(a)),
        SrcKind::Pair(l, r) => TgtTerm::pair(erase(l), erase(r)),
        SrcKind::Proj1(i) => TgtTerm::proj1(erase(i)),
        SrcKind::Proj2(i) => TgtTerm::proj2(erase(i)),
        SrcKind::Inl(i) => TgtTerm::inl(erase(i)),
        SrcKind::Inr(i) => TgtTerm::inr(erase(i)),
        SrcKind::Case(s, nl, bl, nr, br) => {
            TgtTerm::case_of(erase(s), nl.clone(), erase(bl), nr.clone(), erase(br))
        }
        SrcKind::Seq(a, b) => TgtTerm::seq(erase(a), erase(b)),
        SrcKind::If(c, th, el) => TgtTerm::ite(erase(c), erase(th), erase(el)),
        SrcKind::Fix(_, _, i) => TgtTerm::app(z_combinator(), erase(i)),
        SrcKind::Hole => TgtTerm::hole(),
    }
}

pub fn erase_ctx(c: &SrcCtx) -> TgtCtx {
    TgtCtx::new(erase(c.term())).expect("erasure preserves the hole count")
}

/// Memoizing generator for the protect/confine wrapper family. Wrappers for
/// a type share the sub-wrappers of its component types; the output is
/// identical to naive generation.
#[derive(Default)]
pub struct Wrappers {
    protect: HashMap<SrcType, TgtTerm>,
    confine: HashMap<SrcType, TgtTerm>,
}

impl Wrappers {
    pub fn new() -> Self {
        Self::default()
    }

    /// `protect` enforces that a value can only be *used* according to its
    /// type.
    pub fn protect(&mut self, ty: &SrcType) -> TgtTerm {
        self.wrapper(ty, true, 0)
    }

    /// `confine` enforces that a value can only *behave* according to its
    /// type.
    pub fn confine(&mut self, ty: &SrcType) -> TgtTerm {
        self.wrapper(ty, false, 0)
    }

    fn wrapper(&mut self, ty: &SrcType, protecting: bool, depth: u32) -> TgtTerm {
        let cache = if protecting { &self.protect } else { &self.confine };
        if let Some(t) = cache.get(ty) {
            return t.clone();
        }
        // Binder names carry the nesting depth so nested wrappers print
        // without shadowing.
        let y: crate::names::Name = format!("y{depth}").into();
        let x: crate::names::Name = format!("x{depth}").into();
        let term = match ty.kind() {
            TyKind::Unit => {
                if protecting {
                    TgtTerm::lam(x.clone(), TgtTerm::var(x))
                } else {
                    TgtTerm::lam(
                        y.clone(),
                        TgtTerm::seq(TgtTerm::var(y), TgtTerm::unit()),
                    )
                }
            }
            TyKind::Bool => {
                if protecting {
                    TgtTerm::lam(x.clone(), TgtTerm::var(x))
                } else {
                    TgtTerm::lam(
                        y.clone(),
                        TgtTerm::ite(TgtTerm::var(y), TgtTerm::tru(), TgtTerm::fls()),
                    )
                }
            }
            TyKind::Prod(l, r) => {
                let wl = self.wrapper(l, protecting, depth + 1);
                let wr = self.wrapper(r, protecting, depth + 1);
                TgtTerm::lam(
                    y.clone(),
                    TgtTerm::pair(
                        TgtTerm::app(wl, TgtTerm::proj1(TgtTerm::var(y.clone()))),
                        TgtTerm::app(wr, TgtTerm::proj2(TgtTerm::var(y))),
                    ),
                )
            }
            TyKind::Sum(l, r) => {
                let wl = self.wrapper(l, protecting, depth + 1);
                let wr = self.wrapper(r, protecting, depth + 1);
                TgtTerm::lam(
                    y.clone(),
                    TgtTerm::case_of(
                        TgtTerm::var(y),
                        x.clone(),
                        TgtTerm::inl(TgtTerm::app(wl, TgtTerm::var(x.clone()))),
                        x.clone(),
                        TgtTerm::inr(TgtTerm::app(wr, TgtTerm::var(x))),
                    ),
                )
            }
            TyKind::Arrow(dom, cod) => {
                // protect (τ1 → τ2) = \y. \x. protect τ2 (y (confine τ1 x)),
                // and dually.
                let warg = self.wrapper(dom, !protecting, depth + 1);
                let wres = self.wrapper(cod, protecting, depth + 1);
                TgtTerm::lam(
                    y.clone(),
                    TgtTerm::lam(
                        x.clone(),
                        TgtTerm::app(
                            wres,
                            TgtTerm::app(
                                TgtTerm::var(y),
                                TgtTerm::app(warg, TgtTerm::var(x)),
                            ),
                        ),
                    ),
                )
            }
        };
        let cache = if protecting { &mut self.protect } else { &mut self.confine };
        cache.insert(ty.clone(), term.clone());
        term
    }
}

pub fn protect_term(ty: &SrcType) -> TgtTerm {
    Wrappers::new().protect(ty)
}

pub fn confine_term(ty: &SrcType) -> TgtTerm {
    Wrappers::new().confine(ty)
}

/// Whole-program compilation of a closed term: `protect τ (erase t)`.
pub fn compile(t: &SrcTerm, ty: &SrcType) -> Result<TgtTerm, TypeError> {
    check_type(&TypingEnv::empty(), t, ty)?;
    Ok(TgtTerm::app(protect_term(ty), erase(t)))
}

#[derive(Debug, Clone, thiserror::Error, PartialEq)]
pub enum CompileError {
    #[error("modular compilation expects a lambda, got `{0}`")]
    NotALambda(String),
    #[error(transparent)]
    Type(#[from] TypeError),
}

/// Modular compilation of an open component `\x1':τ1'. body` with one free
/// dependency `free_name : τ2' -> τ2`:
///
/// ```text
/// protect (τ1' -> τ1) (\x1'. ((\free. erase body) (confine (τ2' -> τ2) free)))
/// ```
///
/// The dependency stays free in the output and is bound by linking; the
/// extra confine restricts whatever the linker ends up supplying.
pub fn compile_modular(
    t1: &SrcTerm,
    ty1d: &SrcType,
    ty1c: &SrcType,
    free_name: &str,
    ty2d: &SrcType,
    ty2c: &SrcType,
) -> Result<TgtTerm, CompileError> {
    let SrcKind::Lam(binder, _, body) = t1.kind() else {
        return Err(CompileError::NotALambda(snippet(t1)));
    };
    let fun1 = SrcType::arrow(ty1d.clone(), ty1c.clone());
    let fun2 = SrcType::arrow(ty2d.clone(), ty2c.clone());
    check_type(
        &TypingEnv::empty().extended(free_name, fun2.clone()),
        t1,
        &fun1,
    )?;
    let mut wrappers = Wrappers::new();
    let inner = TgtTerm::app(
        TgtTerm::lam(free_name, erase(body)),
        TgtTerm::app(wrappers.confine(&fun2), TgtTerm::var(free_name)),
    );
    Ok(TgtTerm::app(
        wrappers.protect(&fun1),
        TgtTerm::lam(binder.clone(), inner),
    ))
}
