//! The back-translation machinery: the `UVal` type family that approximates
//! the target's unitype to a finite depth, its constructors and destructors,
//! upgrade/downgrade coercions between depths, emulation of target terms,
//! inject/extract coercions against ordinary source types, and the
//! approximate back-translation of target contexts.
//!
//! Generated terms share sub-generators through per-generator caches; the
//! shared trees are identical to naive expansion, and the term
//! representation keeps them cheap to embed many times.

use std::collections::HashMap;

use crate::ctx::{SrcCtx, TgtCtx};
use crate::names::Name;
use crate::source::{SrcTerm, SrcType};
use crate::target::{TgtKind, TgtTerm};

/// The six cases of `UVal_{n+1}`, in their fixed layout order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum UValTag {
    Unk,
    Unit,
    Bool,
    Prod,
    Sum,
    Arrow,
}

impl UValTag {
    pub const ALL: [UValTag; 6] = [
        UValTag::Unk,
        UValTag::Unit,
        UValTag::Bool,
        UValTag::Prod,
        UValTag::Sum,
        UValTag::Arrow,
    ];

    fn slot(self) -> usize {
        match self {
            UValTag::Unk => 0,
            UValTag::Unit => 1,
            UValTag::Bool => 2,
            UValTag::Prod => 3,
            UValTag::Sum => 4,
            UValTag::Arrow => 5,
        }
    }
}

/// `omega_τ`: a closed diverging term of any type,
/// `fix [Unit -> τ] (\x. x) unit`.
pub fn omega(ty: &SrcType) -> SrcTerm {
    let fun = SrcType::arrow(SrcType::unit(), ty.clone());
    SrcTerm::app(
        SrcTerm::fix(
            SrcType::unit(),
            ty.clone(),
            SrcTerm::lam("x", fun, SrcTerm::var("x")),
        ),
        SrcTerm::unit(),
    )
}

/// The canonical unknown inhabitant: `unit` at depth 0, the unk injection
/// above.
pub fn unk_uval(n: u32) -> SrcTerm {
    if n == 0 {
        SrcTerm::unit()
    } else {
        in_uval(UValTag::Unk, n - 1, None)
    }
}

/// The nested coproduct injection placing `payload` at `tag`'s slot of
/// `UVal_{n+1}`. The payload is absent exactly for the unk tag.
pub fn in_uval(tag: UValTag, _n: u32, payload: Option<SrcTerm>) -> SrcTerm {
    let payload = match (tag, payload) {
        (UValTag::Unk, None) => SrcTerm::unit(),
        (UValTag::Unk, Some(_)) => panic!("the unk injection takes no payload"),
        (_, Some(p)) => p,
        (_, None) => panic!("missing payload for {tag:?}"),
    };
    let slot = tag.slot();
    let mut t = if slot == 5 { payload } else { SrcTerm::inl(payload) };
    for _ in 0..slot.min(5) {
        t = SrcTerm::inr(t);
    }
    t
}

#[derive(Debug, Clone, thiserror::Error, PartialEq)]
pub enum BacktransError {
    #[error("back-translation depth must be at least 1 (depth 0 is uniformly divergent)")]
    ZeroDepth,
    #[error("context is not closed: free variable `{0}`")]
    OpenContext(String),
}

/// Generator with per-instance caches for every `UVal` tool. All outputs
/// are closed terms; reusing one generator across calls shares the
/// sub-wrapper trees.
#[derive(Default)]
pub struct UValGen {
    types: Vec<SrcType>,
    payloads: HashMap<(UValTag, u32), SrcType>,
    downs: HashMap<(u32, u32), SrcTerm>,
    ups: HashMap<(u32, u32), SrcTerm>,
    cases: HashMap<(UValTag, u32), SrcTerm>,
    injects: HashMap<(SrcType, u32), SrcTerm>,
    extracts: HashMap<(SrcType, u32), SrcTerm>,
}

impl UValGen {
    pub fn new() -> Self {
        Self::default()
    }

    /// `UVal_0 = Unit`; `UVal_{n+1}` is the right-nested six-way sum
    /// (unk, Unit, Bool, product, sum, arrow) over `UVal_n`.
    pub fn uval_type(&mut self, n: u32) -> SrcType {
        if self.types.is_empty() {
            self.types.push(SrcType::unit());
        }
        while self.types.len() <= n as usize {
            let prev = self.types.last().unwrap().clone();
            let next = SrcType::sum(
                SrcType::unit(),
                SrcType::sum(
                    SrcType::unit(),
                    SrcType::sum(
                        SrcType::bool_(),
                        SrcType::sum(
                            SrcType::prod(prev.clone(), prev.clone()),
                            SrcType::sum(
                                SrcType::sum(prev.clone(), prev.clone()),
                                SrcType::arrow(prev.clone(), prev.clone()),
                            ),
                        ),
                    ),
                ),
            );
            self.types.push(next);
        }
        self.types[n as usize].clone()
    }

    /// The payload type of `tag`'s slot at level `n` (the injection target
    /// is `UVal_{n+1}`).
    pub fn payload_type(&mut self, tag: UValTag, n: u32) -> SrcType {
        if let Some(t) = self.payloads.get(&(tag, n)) {
            return t.clone();
        }
        let u = self.uval_type(n);
        let ty = match tag {
            UValTag::Unk | UValTag::Unit => SrcType::unit(),
            UValTag::Bool => SrcType::bool_(),
            UValTag::Prod => SrcType::prod(u.clone(), u),
            UValTag::Sum => SrcType::sum(u.clone(), u),
            UValTag::Arrow => SrcType::arrow(u.clone(), u),
        };
        self.payloads.insert((tag, n), ty.clone());
        ty
    }

    /// The result type of the destructor for `tag` at level `n`
    /// (for the arrow tag: the result of the applied function).
    fn case_result_type(&mut self, tag: UValTag, n: u32) -> SrcType {
        match tag {
            UValTag::Arrow => self.uval_type(n),
            _ => self.payload_type(tag, n),
        }
    }

    /// Desugars the liberal one-armed match into a nested case cascade over
    /// the six slots of `UVal_{n+1}`. `arm` builds the body for each slot
    /// from its payload variable; slots where it returns `None` fall
    /// through to `omega` at `miss_ty`. Payload binders are `z0..z5`, spine
    /// binders `r0..r3`.
    fn cascade(
        &mut self,
        scrut: SrcTerm,
        miss_ty: &SrcType,
        mut arm: impl FnMut(&mut Self, UValTag, SrcTerm) -> Option<SrcTerm>,
    ) -> SrcTerm {
        let payload_name = |slot: usize| -> Name { format!("z{slot}").into() };
        let spine_name = |slot: usize| -> Name { format!("r{slot}").into() };

        let mut bodies = Vec::with_capacity(6);
        for (slot, tag) in UValTag::ALL.iter().enumerate() {
            let payload = SrcTerm::var(payload_name(slot));
            let body = match arm(self, *tag, payload) {
                Some(b) => b,
                None => omega(miss_ty),
            };
            bodies.push(body);
        }

        let mut acc = SrcTerm::case_of(
            SrcTerm::var(spine_name(3)),
            payload_name(4),
            bodies[4].clone(),
            payload_name(5),
            bodies[5].clone(),
        );
        for slot in (0..4).rev() {
            let scr = if slot == 0 {
                scrut.clone()
            } else {
                SrcTerm::var(spine_name(slot - 1))
            };
            acc = SrcTerm::case_of(scr, payload_name(slot), bodies[slot].clone(), spine_name(slot), acc);
        }
        acc
    }

    /// The destructor for `tag` at level `n`: a lambda over `UVal_{n+1}`
    /// returning the slot payload, or diverging on every other slot. The
    /// arrow destructor takes the argument as a second parameter and applies
    /// the contained function.
    pub fn case_uval(&mut self, tag: UValTag, n: u32) -> SrcTerm {
        assert!(tag != UValTag::Unk, "the unk slot has no destructor");
        if let Some(t) = self.cases.get(&(tag, n)) {
            return t.clone();
        }
        let arg_ty = self.uval_type(n + 1);
        let miss_ty = self.case_result_type(tag, n);
        let term = match tag {
            UValTag::Arrow => {
                let uv = self.uval_type(n);
                let body = self.cascade(SrcTerm::var("x"), &miss_ty, |_, t, payload| {
                    (t == UValTag::Arrow).then(|| SrcTerm::app(payload, SrcTerm::var("y")))
                });
                SrcTerm::lam("x", arg_ty, SrcTerm::lam("y", uv, body))
            }
            _ => {
                let body = self.cascade(SrcTerm::var("x"), &miss_ty, |_, t, payload| {
                    (t == tag).then_some(payload)
                });
                SrcTerm::lam("x", arg_ty, body)
            }
        };
        self.cases.insert((tag, n), term.clone());
        term
    }

    /// `downgrade n d : UVal_{n+d} -> UVal_n`, discarding `d` levels of
    /// precision. Functions are handled contravariantly via `upgrade`.
    pub fn downgrade_term(&mut self, n: u32, d: u32) -> SrcTerm {
        self.build_coercions(n, d);
        self.downs[&(n, d)].clone()
    }

    /// `upgrade n d : UVal_n -> UVal_{n+d}`; neither gains nor loses
    /// precision.
    pub fn upgrade_term(&mut self, n: u32, d: u32) -> SrcTerm {
        self.build_coercions(n, d);
        self.ups[&(n, d)].clone()
    }

    fn build_coercions(&mut self, n: u32, d: u32) {
        if self.downs.contains_key(&(n, d)) {
            return;
        }
        // Built bottom-up: level m+1 embeds both coercions at level m.
        let start = (0..=n).find(|m| !self.downs.contains_key(&(*m, d))).unwrap();
        for m in start..=n {
            if m == 0 {
                let down = SrcTerm::lam("v", self.uval_type(d), SrcTerm::unit());
                let up = SrcTerm::lam("x", self.uval_type(0), unk_uval(d));
                self.downs.insert((0, d), down);
                self.ups.insert((0, d), up);
                continue;
            }
            let prev = m - 1;
            let down_prev = self.downs[&(prev, d)].clone();
            let up_prev = self.ups[&(prev, d)].clone();

            // downgrade (m, d): UVal_{m+d} -> UVal_m
            let arg_ty = self.uval_type(m + d);
            let result_ty = self.uval_type(m);
            let down_body = self.cascade(SrcTerm::var("x"), &result_ty, |gen, tag, payload| {
                Some(coerce_slot(gen, tag, prev, &down_prev, &up_prev, payload, false, d))
            });
            let down = SrcTerm::lam("x", arg_ty, down_body);

            // upgrade (m, d): UVal_m -> UVal_{m+d}
            let arg_ty = self.uval_type(m);
            let result_ty = self.uval_type(m + d);
            let up_body = self.cascade(SrcTerm::var("x"), &result_ty, |gen, tag, payload| {
                Some(coerce_slot(gen, tag, prev, &down_prev, &up_prev, payload, true, d))
            });
            let up = SrcTerm::lam("x", arg_ty, up_body);

            self.downs.insert((m, d), down);
            self.ups.insert((m, d), up);
        }
    }

    /// `inject τ n : τ -> UVal_n`, making a source value behave like the
    /// compilation of itself inside emulated code. Mutually recursive with
    /// `extract`; both collapse to `omega` at depth 0.
    pub fn inject_term(&mut self, ty: &SrcType, n: u32) -> SrcTerm {
        if let Some(t) = self.injects.get(&(ty.clone(), n)) {
            return t.clone();
        }
        let term = self.build_inject(ty, n);
        self.injects.insert((ty.clone(), n), term.clone());
        term
    }

    /// `extract τ n : UVal_n -> τ`; diverges when the `UVal` value does not
    /// have the shape expected for `τ`, mirroring the `wrong` a target
    /// context produces on misuse.
    pub fn extract_term(&mut self, ty: &SrcType, n: u32) -> SrcTerm {
        if let Some(t) = self.extracts.get(&(ty.clone(), n)) {
            return t.clone();
        }
        let term = self.build_extract(ty, n);
        self.extracts.insert((ty.clone(), n), term.clone());
        term
    }

    fn build_inject(&mut self, ty: &SrcType, n: u32) -> SrcTerm {
        use crate::source::TyKind;
        if n == 0 {
            return SrcTerm::lam("x", ty.clone(), omega(&self.uval_type(0)));
        }
        let m = n - 1;
        let x = SrcTerm::var("x");
        let body = match ty.kind() {
            TyKind::Unit => in_uval(UValTag::Unit, m, Some(x)),
            TyKind::Bool => in_uval(UValTag::Bool, m, Some(x)),
            TyKind::Arrow(t1, t2) => {
                let inj2 = self.inject_term(t2, m);
                let ext1 = self.extract_term(t1, m);
                let uv = self.uval_type(m);
                in_uval(
                    UValTag::Arrow,
                    m,
                    Some(SrcTerm::lam(
                        "z",
                        uv,
                        SrcTerm::app(
                            inj2,
                            SrcTerm::app(x, SrcTerm::app(ext1, SrcTerm::var("z"))),
                        ),
                    )),
                )
            }
            TyKind::Prod(t1, t2) => {
                let inj1 = self.inject_term(t1, m);
                let inj2 = self.inject_term(t2, m);
                in_uval(
                    UValTag::Prod,
                    m,
                    Some(SrcTerm::pair(
                        SrcTerm::app(inj1, SrcTerm::proj1(x.clone())),
                        SrcTerm::app(inj2, SrcTerm::proj2(x)),
                    )),
                )
            }
            TyKind::Sum(t1, t2) => {
                let inj1 = self.inject_term(t1, m);
                let inj2 = self.inject_term(t2, m);
                in_uval(
                    UValTag::Sum,
                    m,
                    Some(SrcTerm::case_of(
                        x,
                        "y",
                        SrcTerm::inl(SrcTerm::app(inj1, SrcTerm::var("y"))),
                        "y",
                        SrcTerm::inr(SrcTerm::app(inj2, SrcTerm::var("y"))),
                    )),
                )
            }
        };
        SrcTerm::lam("x", ty.clone(), body)
    }

    fn build_extract(&mut self, ty: &SrcType, n: u32) -> SrcTerm {
        use crate::source::TyKind;
        if n == 0 {
            return SrcTerm::lam("x", self.uval_type(0), omega(ty));
        }
        let m = n - 1;
        let arg_ty = self.uval_type(n);
        let x = SrcTerm::var("x");
        let body = match ty.kind() {
            TyKind::Unit => SrcTerm::app(self.case_uval(UValTag::Unit, m), x),
            TyKind::Bool => SrcTerm::app(self.case_uval(UValTag::Bool, m), x),
            TyKind::Arrow(t1, t2) => {
                let ext2 = self.extract_term(t2, m);
                let inj1 = self.inject_term(t1, m);
                let case_arrow = self.case_uval(UValTag::Arrow, m);
                return SrcTerm::lam(
                    "x",
                    arg_ty,
                    SrcTerm::lam(
                        "y",
                        t1.clone(),
                        SrcTerm::app(
                            ext2,
                            SrcTerm::app(
                                SrcTerm::app(case_arrow, x),
                                SrcTerm::app(inj1, SrcTerm::var("y")),
                            ),
                        ),
                    ),
                );
            }
            TyKind::Prod(t1, t2) => {
                let ext1 = self.extract_term(t1, m);
                let ext2 = self.extract_term(t2, m);
                let case_prod = self.case_uval(UValTag::Prod, m);
                SrcTerm::pair(
                    SrcTerm::app(ext1, SrcTerm::proj1(SrcTerm::app(case_prod.clone(), x.clone()))),
                    SrcTerm::app(ext2, SrcTerm::proj2(SrcTerm::app(case_prod, x))),
                )
            }
            TyKind::Sum(t1, t2) => {
                let ext1 = self.extract_term(t1, m);
                let ext2 = self.extract_term(t2, m);
                let case_sum = self.case_uval(UValTag::Sum, m);
                SrcTerm::case_of(
                    SrcTerm::app(case_sum, x),
                    "y",
                    SrcTerm::inl(SrcTerm::app(ext1, SrcTerm::var("y"))),
                    "y",
                    SrcTerm::inr(SrcTerm::app(ext2, SrcTerm::var("y"))),
                )
            }
        };
        SrcTerm::lam("x", arg_ty, body)
    }

    /// Structural emulation of a target term as a source term of type
    /// `UVal_n`. Free target variables map to same-named source variables
    /// of type `UVal_n`; `wrong` becomes divergence. Holes map to holes so
    /// the same translation covers contexts.
    pub fn emulate(&mut self, n: u32, t: &TgtTerm) -> SrcTerm {
        let down = |gen: &mut Self, inner: SrcTerm| {
            SrcTerm::app(gen.downgrade_term(n, 1), inner)
        };
        let up_case = |gen: &mut Self, tag: UValTag, inner: SrcTerm| {
            let up = gen.upgrade_term(n, 1);
            SrcTerm::app(gen.case_uval(tag, n), SrcTerm::app(up, inner))
        };
        match t.kind() {
            TgtKind::Unit => {
                let inj = in_uval(UValTag::Unit, n, Some(SrcTerm::unit()));
                down(self, inj)
            }
            TgtKind::True => {
                let inj = in_uval(UValTag::Bool, n, Some(SrcTerm::tru()));
                down(self, inj)
            }
            TgtKind::False => {
                let inj = in_uval(UValTag::Bool, n, Some(SrcTerm::fls()));
                down(self, inj)
            }
            TgtKind::Var(x) => SrcTerm::var(x.clone()),
            TgtKind::Lam(x, body) => {
                let b = self.emulate(n, body);
                let uv = self.uval_type(n);
                let inj = in_uval(UValTag::Arrow, n, Some(SrcTerm::lam(x.clone(), uv, b)));
                down(self, inj)
            }
            TgtKind::App(f, a) => {
                let ef = self.emulate(n, f);
                let ea = self.emulate(n, a);
                SrcTerm::app(up_case(self, UValTag::Arrow, ef), ea)
            }
            TgtKind::Pair(l, r) => {
                let el = self.emulate(n, l);
                let er = self.emulate(n, r);
                let inj = in_uval(UValTag::Prod, n, Some(SrcTerm::pair(el, er)));
                down(self, inj)
            }
            TgtKind::Proj1(p) => {
                let ep = self.emulate(n, p);
                SrcTerm::proj1(up_case(self, UValTag::Prod, ep))
            }
            TgtKind::Proj2(p) => {
                let ep = self.emulate(n, p);
                SrcTerm::proj2(up_case(self, UValTag::Prod, ep))
            }
            TgtKind::Inl(i) => {
                let ei = self.emulate(n, i);
                let inj = in_uval(UValTag::Sum, n, Some(SrcTerm::inl(ei)));
                down(self, inj)
            }
            TgtKind::Inr(i) => {
                let ei = self.emulate(n, i);
                let inj = in_uval(UValTag::Sum, n, Some(SrcTerm::inr(ei)));
                down(self, inj)
            }
            TgtKind::Case(s, nl, bl, nr, br) => {
                let es = self.emulate(n, s);
                let ebl = self.emulate(n, bl);
                let ebr = self.emulate(n, br);
                SrcTerm::case_of(
                    up_case(self, UValTag::Sum, es),
                    nl.clone(),
                    ebl,
                    nr.clone(),
                    ebr,
                )
            }
            TgtKind::Seq(a, b) => {
                let ea = self.emulate(n, a);
                let eb = self.emulate(n, b);
                SrcTerm::seq(up_case(self, UValTag::Unit, ea), eb)
            }
            TgtKind::If(c, th, el) => {
                let ec = self.emulate(n, c);
                let eth = self.emulate(n, th);
                let eel = self.emulate(n, el);
                SrcTerm::ite(up_case(self, UValTag::Bool, ec), eth, eel)
            }
            TgtKind::Wrong => omega(&self.uval_type(n)),
            TgtKind::Hole => SrcTerm::hole(),
        }
    }

    /// Emulation lifted to contexts; the resulting hole expects `UVal_n`.
    pub fn emulate_ctx(&mut self, n: u32, c: &TgtCtx) -> SrcCtx {
        SrcCtx::new(self.emulate(n, c.term())).expect("emulation preserves the hole count")
    }

    /// The n-approximate back-translation of a closed target context with a
    /// hole of type `ty`: the emulated context with its hole pre-composed
    /// with `inject ty n`, so fillers of type `ty` can be plugged directly.
    pub fn backtranslate(
        &mut self,
        c: &TgtCtx,
        ty: &SrcType,
        n: u32,
    ) -> Result<SrcCtx, BacktransError> {
        if n == 0 {
            return Err(BacktransError::ZeroDepth);
        }
        if let Some(x) = c.term().fv().iter().next() {
            return Err(BacktransError::OpenContext(x.to_string()));
        }
        let emulated = self.emulate_ctx(n, c);
        let inject = self.inject_term(ty, n);
        let composed = emulated.plug(&SrcTerm::app(inject, SrcTerm::hole()));
        Ok(SrcCtx::new(composed).expect("plugging a one-hole filler keeps one hole"))
    }
}

/// One slot body shared by downgrade (`upward == false`) and upgrade
/// (`upward == true`) at level `prev + 1`: unknowns map to unknowns, base
/// payloads are copied, pairs and sums recurse, and functions wrap
/// contravariantly with the opposite coercion on the argument.
#[allow(clippy::too_many_arguments)]
fn coerce_slot(
    gen: &mut UValGen,
    tag: UValTag,
    prev: u32,
    down_prev: &SrcTerm,
    up_prev: &SrcTerm,
    payload: SrcTerm,
    upward: bool,
    d: u32,
) -> SrcTerm {
    let out_level = if upward { prev + d } else { prev };
    let same = if upward { up_prev } else { down_prev };
    let opposite = if upward { down_prev } else { up_prev };
    match tag {
        UValTag::Unk => in_uval(UValTag::Unk, out_level, None),
        UValTag::Unit => in_uval(UValTag::Unit, out_level, Some(payload)),
        UValTag::Bool => in_uval(UValTag::Bool, out_level, Some(payload)),
        UValTag::Prod => in_uval(
            UValTag::Prod,
            out_level,
            Some(SrcTerm::pair(
                SrcTerm::app(same.clone(), SrcTerm::proj1(payload.clone())),
                SrcTerm::app(same.clone(), SrcTerm::proj2(payload)),
            )),
        ),
        UValTag::Sum => in_uval(
            UValTag::Sum,
            out_level,
            Some(SrcTerm::case_of(
                payload,
                "a",
                SrcTerm::inl(SrcTerm::app(same.clone(), SrcTerm::var("a"))),
                "a",
                SrcTerm::inr(SrcTerm::app(same.clone(), SrcTerm::var("a"))),
            )),
        ),
        UValTag::Arrow => {
            // The wrapped function's new domain is the coercion target's
            // component level.
            let z_ty = gen.uval_type(if upward { prev + d } else { prev });
            in_uval(
                UValTag::Arrow,
                out_level,
                Some(SrcTerm::lam(
                    "z",
                    z_ty,
                    SrcTerm::app(
                        same.clone(),
                        SrcTerm::app(payload, SrcTerm::app(opposite.clone(), SrcTerm::var("z"))),
                    ),
                )),
            )
        }
    }
}
