//! Deterministic, seeded generators: random source types, type-directed
//! random source terms, random first-order values, random well-scoped
//! target terms and one-hole contexts, size-ordered exhaustive context
//! enumeration, and type-directed discriminating probes for the
//! distinguishing-context search.

use rand::prelude::*;
use rand_chacha::ChaCha12Rng;

use crate::ctx::{SrcCtx, TgtCtx};
use crate::names::Name;
use crate::source::{SrcKind, SrcTerm, SrcType, TyKind, TypingEnv};
use crate::target::{TgtKind, TgtTerm};
use crate::uval::omega;

pub fn rng_from_seed(seed: u64) -> ChaCha12Rng {
    ChaCha12Rng::seed_from_u64(seed)
}

// ---------------------------------------------------------------------------
// Types
// ---------------------------------------------------------------------------

pub fn gen_src_type(rng: &mut ChaCha12Rng, depth: u32) -> SrcType {
    if depth == 0 || rng.gen_bool(0.35) {
        return if rng.gen_bool(0.5) { SrcType::unit() } else { SrcType::bool_() };
    }
    match rng.gen_range(0..3) {
        0 => SrcType::arrow(gen_src_type(rng, depth - 1), gen_src_type(rng, depth - 1)),
        1 => SrcType::prod(gen_src_type(rng, depth - 1), gen_src_type(rng, depth - 1)),
        _ => SrcType::sum(gen_src_type(rng, depth - 1), gen_src_type(rng, depth - 1)),
    }
}

pub fn gen_first_order_type(rng: &mut ChaCha12Rng, depth: u32) -> SrcType {
    if depth == 0 || rng.gen_bool(0.4) {
        return if rng.gen_bool(0.5) { SrcType::unit() } else { SrcType::bool_() };
    }
    if rng.gen_bool(0.5) {
        SrcType::prod(gen_first_order_type(rng, depth - 1), gen_first_order_type(rng, depth - 1))
    } else {
        SrcType::sum(gen_first_order_type(rng, depth - 1), gen_first_order_type(rng, depth - 1))
    }
}

/// A random closed value of a first-order type.
pub fn gen_first_order_value(rng: &mut ChaCha12Rng, ty: &SrcType) -> SrcTerm {
    match ty.kind() {
        TyKind::Unit => SrcTerm::unit(),
        TyKind::Bool => SrcTerm::bool_lit(rng.gen_bool(0.5)),
        TyKind::Prod(l, r) => {
            SrcTerm::pair(gen_first_order_value(rng, l), gen_first_order_value(rng, r))
        }
        TyKind::Sum(l, r) => {
            if rng.gen_bool(0.5) {
                SrcTerm::inl(gen_first_order_value(rng, l))
            } else {
                SrcTerm::inr(gen_first_order_value(rng, r))
            }
        }
        TyKind::Arrow(..) => panic!("first-order values only"),
    }
}

// ---------------------------------------------------------------------------
// Type-directed source terms
// ---------------------------------------------------------------------------

/// Type-directed generator for well-typed source terms. Fresh binders come
/// from a monotonic counter so shadowing never invalidates the typing
/// derivation being built.
pub struct SrcTermGen {
    counter: u32,
    /// Probability of emitting a `fix` when an arrow is wanted; recursion
    /// makes divergence likely, so this stays small.
    pub fix_weight: f64,
}

impl Default for SrcTermGen {
    fn default() -> Self {
        SrcTermGen { counter: 0, fix_weight: 0.05 }
    }
}

impl SrcTermGen {
    pub fn new() -> Self {
        Self::default()
    }

    fn fresh(&mut self) -> Name {
        let n: Name = format!("v{}", self.counter).into();
        self.counter += 1;
        n
    }

    /// A well-typed term of type `ty` under `env`, with roughly `size`
    /// remaining constructors.
    pub fn term(
        &mut self,
        rng: &mut ChaCha12Rng,
        env: &TypingEnv,
        ty: &SrcType,
        size: u32,
    ) -> SrcTerm {
        // Sometimes reuse a variable of the right type.
        let candidates: Vec<&Name> = env
            .bindings()
            .iter()
            .filter(|(_, t)| t == ty)
            .map(|(n, _)| n)
            .collect();
        if !candidates.is_empty() && (size == 0 || rng.gen_bool(0.25)) {
            let pick = candidates[rng.gen_range(0..candidates.len())].clone();
            return SrcTerm::var(pick);
        }
        if size == 0 {
            return self.canonical(rng, env, ty);
        }
        // Occasionally build an eliminator instead of an introduction.
        if rng.gen_bool(0.3) {
            return self.elim(rng, env, ty, size);
        }
        self.intro(rng, env, ty, size)
    }

    fn canonical(&mut self, rng: &mut ChaCha12Rng, env: &TypingEnv, ty: &SrcType) -> SrcTerm {
        match ty.kind() {
            TyKind::Unit => SrcTerm::unit(),
            TyKind::Bool => SrcTerm::bool_lit(rng.gen_bool(0.5)),
            TyKind::Arrow(d, c) => {
                let x = self.fresh();
                let inner = env.extended(x.clone(), d.clone());
                let body = self.canonical(rng, &inner, c);
                SrcTerm::lam(x, d.clone(), body)
            }
            TyKind::Prod(l, r) => SrcTerm::pair(
                self.canonical(rng, env, l),
                self.canonical(rng, env, r),
            ),
            TyKind::Sum(l, r) => {
                if rng.gen_bool(0.5) {
                    SrcTerm::inl(self.canonical(rng, env, l))
                } else {
                    SrcTerm::inr(self.canonical(rng, env, r))
                }
            }
        }
    }

    fn intro(
        &mut self,
        rng: &mut ChaCha12Rng,
        env: &TypingEnv,
        ty: &SrcType,
        size: u32,
    ) -> SrcTerm {
        let smaller = size.saturating_sub(1);
        match ty.kind() {
            TyKind::Unit => {
                if rng.gen_bool(0.3) && size > 1 {
                    SrcTerm::seq(self.term(rng, env, &SrcType::unit(), smaller / 2), SrcTerm::unit())
                } else {
                    SrcTerm::unit()
                }
            }
            TyKind::Bool => {
                if rng.gen_bool(0.3) && size > 2 {
                    SrcTerm::ite(
                        self.term(rng, env, &SrcType::bool_(), smaller / 3),
                        self.term(rng, env, &SrcType::bool_(), smaller / 3),
                        self.term(rng, env, &SrcType::bool_(), smaller / 3),
                    )
                } else {
                    SrcTerm::bool_lit(rng.gen_bool(0.5))
                }
            }
            TyKind::Arrow(d, c) => {
                if rng.gen_bool(self.fix_weight) && size > 3 {
                    // fix [d -> c] (\f. \x. body)
                    let f = self.fresh();
                    let fun_ty = SrcType::arrow(d.clone(), c.clone());
                    let inner = env.extended(f.clone(), fun_ty.clone());
                    let lam = self.term(rng, &inner, &fun_ty, smaller / 2);
                    // The operand must be a lambda for fix to make progress;
                    // fall back to wrapping when generation picked
                    // something else.
                    let lam = if matches!(lam.kind(), SrcKind::Lam(..)) {
                        lam
                    } else {
                        let x = self.fresh();
                        SrcTerm::lam(
                            x.clone(),
                            d.clone(),
                            SrcTerm::app(lam, SrcTerm::var(x)),
                        )
                    };
                    SrcTerm::fix(d.clone(), c.clone(), SrcTerm::lam(f, fun_ty, lam))
                } else {
                    let x = self.fresh();
                    let inner = env.extended(x.clone(), d.clone());
                    SrcTerm::lam(x, d.clone(), self.term(rng, &inner, c, smaller))
                }
            }
            TyKind::Prod(l, r) => SrcTerm::pair(
                self.term(rng, env, l, smaller / 2),
                self.term(rng, env, r, smaller / 2),
            ),
            TyKind::Sum(l, r) => {
                if rng.gen_bool(0.5) {
                    SrcTerm::inl(self.term(rng, env, l, smaller))
                } else {
                    SrcTerm::inr(self.term(rng, env, r, smaller))
                }
            }
        }
    }

    fn elim(
        &mut self,
        rng: &mut ChaCha12Rng,
        env: &TypingEnv,
        ty: &SrcType,
        size: u32,
    ) -> SrcTerm {
        let smaller = size.saturating_sub(1);
        match rng.gen_range(0..5) {
            0 => {
                // beta redex: (\x:d. body) arg
                let d = gen_src_type(rng, 1);
                let x = self.fresh();
                let inner = env.extended(x.clone(), d.clone());
                let body = self.term(rng, &inner, ty, smaller / 2);
                let arg = self.term(rng, env, &d, smaller / 2);
                SrcTerm::app(SrcTerm::lam(x, d, body), arg)
            }
            1 => {
                let other = gen_src_type(rng, 1);
                let (pair_ty, proj): (SrcType, fn(SrcTerm) -> SrcTerm) = if rng.gen_bool(0.5) {
                    (SrcType::prod(ty.clone(), other), SrcTerm::proj1)
                } else {
                    (SrcType::prod(other, ty.clone()), SrcTerm::proj2)
                };
                proj(self.term(rng, env, &pair_ty, smaller))
            }
            2 => {
                let l = gen_src_type(rng, 1);
                let r = gen_src_type(rng, 1);
                let scrut = self.term(rng, env, &SrcType::sum(l.clone(), r.clone()), smaller / 3);
                let xl = self.fresh();
                let xr = self.fresh();
                let bl = self.term(rng, &env.extended(xl.clone(), l), ty, smaller / 3);
                let br = self.term(rng, &env.extended(xr.clone(), r), ty, smaller / 3);
                SrcTerm::case_of(scrut, xl, bl, xr, br)
            }
            3 => SrcTerm::ite(
                self.term(rng, env, &SrcType::bool_(), smaller / 3),
                self.term(rng, env, ty, smaller / 3),
                self.term(rng, env, ty, smaller / 3),
            ),
            _ => SrcTerm::seq(
                self.term(rng, env, &SrcType::unit(), smaller / 2),
                self.term(rng, env, ty, smaller / 2),
            ),
        }
    }
}

/// A random closed well-typed term of the given type.
pub fn gen_closed_src_term(rng: &mut ChaCha12Rng, ty: &SrcType, size: u32) -> SrcTerm {
    SrcTermGen::new().term(rng, &TypingEnv::empty(), ty, size)
}

// ---------------------------------------------------------------------------
// Target terms and contexts
// ---------------------------------------------------------------------------

/// A random well-scoped target term. `wrong` is included with low weight;
/// adversarial contexts may legitimately contain it.
pub fn gen_tgt_term(rng: &mut ChaCha12Rng, scope: &mut Vec<Name>, size: u32) -> TgtTerm {
    if size <= 1 {
        return gen_tgt_leaf(rng, scope);
    }
    let smaller = size - 1;
    match rng.gen_range(0..12) {
        0 | 1 => {
            let x: Name = format!("a{}", scope.len()).into();
            scope.push(x.clone());
            let body = gen_tgt_term(rng, scope, smaller);
            scope.pop();
            TgtTerm::lam(x, body)
        }
        2 | 3 => TgtTerm::app(
            gen_tgt_term(rng, scope, smaller / 2),
            gen_tgt_term(rng, scope, smaller / 2),
        ),
        4 => TgtTerm::pair(
            gen_tgt_term(rng, scope, smaller / 2),
            gen_tgt_term(rng, scope, smaller / 2),
        ),
        5 => TgtTerm::proj1(gen_tgt_term(rng, scope, smaller)),
        6 => TgtTerm::proj2(gen_tgt_term(rng, scope, smaller)),
        7 => {
            if rng.gen_bool(0.5) {
                TgtTerm::inl(gen_tgt_term(rng, scope, smaller))
            } else {
                TgtTerm::inr(gen_tgt_term(rng, scope, smaller))
            }
        }
        8 => {
            let s = gen_tgt_term(rng, scope, smaller / 3);
            let x: Name = format!("a{}", scope.len()).into();
            scope.push(x.clone());
            let bl = gen_tgt_term(rng, scope, smaller / 3);
            let br = gen_tgt_term(rng, scope, smaller / 3);
            scope.pop();
            TgtTerm::case_of(s, x.clone(), bl, x, br)
        }
        9 => TgtTerm::seq(
            gen_tgt_term(rng, scope, smaller / 2),
            gen_tgt_term(rng, scope, smaller / 2),
        ),
        10 => TgtTerm::ite(
            gen_tgt_term(rng, scope, smaller / 3),
            gen_tgt_term(rng, scope, smaller / 3),
            gen_tgt_term(rng, scope, smaller / 3),
        ),
        _ => gen_tgt_leaf(rng, scope),
    }
}

fn gen_tgt_leaf(rng: &mut ChaCha12Rng, scope: &[Name]) -> TgtTerm {
    if !scope.is_empty() && rng.gen_bool(0.4) {
        let x = scope[rng.gen_range(0..scope.len())].clone();
        return TgtTerm::var(x);
    }
    match rng.gen_range(0..7) {
        0 | 1 => TgtTerm::unit(),
        2 | 3 => TgtTerm::tru(),
        4 => TgtTerm::fls(),
        5 => TgtTerm::lam("w", TgtTerm::var("w")),
        _ => {
            if rng.gen_bool(0.15) {
                TgtTerm::wrong()
            } else {
                TgtTerm::unit()
            }
        }
    }
}

/// Replaces the `index`-th node (preorder) with a hole.
fn punch_hole(t: &TgtTerm, index: &mut u32) -> Option<TgtTerm> {
    if *index == 0 {
        return Some(TgtTerm::hole());
    }
    *index -= 1;
    let rebuild_one = |child: &TgtTerm, index: &mut u32, wrap: &dyn Fn(TgtTerm) -> TgtTerm| {
        punch_hole(child, index).map(wrap)
    };
    match t.kind() {
        TgtKind::Unit
        | TgtKind::True
        | TgtKind::False
        | TgtKind::Var(_)
        | TgtKind::Wrong
        | TgtKind::Hole => None,
        TgtKind::Lam(x, b) => {
            let x = x.clone();
            rebuild_one(b, index, &move |b| TgtTerm::lam(x.clone(), b))
        }
        TgtKind::App(a, b) => two(a, b, index, TgtTerm::app),
        TgtKind::Pair(a, b) => two(a, b, index, TgtTerm::pair),
        TgtKind::Seq(a, b) => two(a, b, index, TgtTerm::seq),
        TgtKind::Proj1(a) => rebuild_one(a, index, &TgtTerm::proj1),
        TgtKind::Proj2(a) => rebuild_one(a, index, &TgtTerm::proj2),
        TgtKind::Inl(a) => rebuild_one(a, index, &TgtTerm::inl),
        TgtKind::Inr(a) => rebuild_one(a, index, &TgtTerm::inr),
        TgtKind::Case(s, nl, bl, nr, br) => {
            if let Some(s2) = punch_hole(s, index) {
                return Some(TgtTerm::case_of(s2, nl.clone(), bl.clone(), nr.clone(), br.clone()));
            }
            if let Some(bl2) = punch_hole(bl, index) {
                return Some(TgtTerm::case_of(s.clone(), nl.clone(), bl2, nr.clone(), br.clone()));
            }
            punch_hole(br, index)
                .map(|br2| TgtTerm::case_of(s.clone(), nl.clone(), bl.clone(), nr.clone(), br2))
        }
        TgtKind::If(c, a, b) => {
            if let Some(c2) = punch_hole(c, index) {
                return Some(TgtTerm::ite(c2, a.clone(), b.clone()));
            }
            if let Some(a2) = punch_hole(a, index) {
                return Some(TgtTerm::ite(c.clone(), a2, b.clone()));
            }
            punch_hole(b, index).map(|b2| TgtTerm::ite(c.clone(), a.clone(), b2))
        }
    }
}

fn two(
    a: &TgtTerm,
    b: &TgtTerm,
    index: &mut u32,
    build: fn(TgtTerm, TgtTerm) -> TgtTerm,
) -> Option<TgtTerm> {
    if let Some(a2) = punch_hole(a, index) {
        return Some(build(a2, b.clone()));
    }
    punch_hole(b, index).map(|b2| build(a.clone(), b2))
}

fn node_count(t: &TgtTerm) -> u32 {
    match t.kind() {
        TgtKind::Unit
        | TgtKind::True
        | TgtKind::False
        | TgtKind::Var(_)
        | TgtKind::Wrong
        | TgtKind::Hole => 1,
        TgtKind::Lam(_, b) | TgtKind::Proj1(b) | TgtKind::Proj2(b) | TgtKind::Inl(b)
        | TgtKind::Inr(b) => 1 + node_count(b),
        TgtKind::App(a, b) | TgtKind::Pair(a, b) | TgtKind::Seq(a, b) => {
            1 + node_count(a) + node_count(b)
        }
        TgtKind::Case(s, _, bl, _, br) => 1 + node_count(s) + node_count(bl) + node_count(br),
        TgtKind::If(c, a, b) => 1 + node_count(c) + node_count(a) + node_count(b),
    }
}

/// A random well-scoped one-hole context: a random term with one node
/// replaced by the hole.
pub fn gen_tgt_ctx(rng: &mut ChaCha12Rng, hole_env: &[Name], size: u32) -> TgtCtx {
    loop {
        let mut scope: Vec<Name> = hole_env.to_vec();
        let t = gen_tgt_term(rng, &mut scope, size.max(1));
        let nodes = node_count(&t);
        let mut index = rng.gen_range(0..nodes);
        if let Some(c) = punch_hole(&t, &mut index) {
            if c.holes() == 1 {
                return TgtCtx::new(c).unwrap();
            }
        }
    }
}

// ---------------------------------------------------------------------------
// Exhaustive context enumeration
// ---------------------------------------------------------------------------

/// Enumerates well-scoped one-hole contexts in ascending size order,
/// deterministically, up to `cap` results. Terms drawn as subtrees use the
/// value leaves plus in-scope variables; binder names are canonical by
/// depth. Per-size term pools are capped to keep the combinatorics finite;
/// small sizes are exhaustive.
pub struct CtxEnumerator {
    hole_env: Vec<Name>,
    /// terms[(size, depth)] -> pool of terms
    term_pool: std::collections::HashMap<(u32, u32), Vec<TgtTerm>>,
    term_pool_cap: usize,
}

impl CtxEnumerator {
    pub fn new(hole_env: &[Name]) -> Self {
        CtxEnumerator {
            hole_env: hole_env.to_vec(),
            term_pool: std::collections::HashMap::new(),
            term_pool_cap: 600,
        }
    }

    fn scope_names(&self, depth: u32) -> Vec<Name> {
        let mut v = self.hole_env.clone();
        for i in 0..depth {
            v.push(format!("a{i}").into());
        }
        v
    }

    fn terms(&mut self, size: u32, depth: u32) -> Vec<TgtTerm> {
        if let Some(v) = self.term_pool.get(&(size, depth)) {
            return v.clone();
        }
        let cap = self.term_pool_cap;
        let mut out = Vec::new();
        if size == 1 {
            out.push(TgtTerm::unit());
            out.push(TgtTerm::tru());
            out.push(TgtTerm::fls());
            for x in self.scope_names(depth) {
                out.push(TgtTerm::var(x));
            }
            out.push(TgtTerm::wrong());
        } else if size >= 2 {
            let sub = size - 1;
            // unary
            for t in self.terms(sub, depth) {
                if out.len() >= cap {
                    break;
                }
                out.push(TgtTerm::proj1(t.clone()));
                out.push(TgtTerm::proj2(t.clone()));
                out.push(TgtTerm::inl(t.clone()));
                out.push(TgtTerm::inr(t));
            }
            // lambda
            let binder: Name = format!("a{depth}").into();
            for t in self.terms(sub, depth + 1) {
                if out.len() >= cap {
                    break;
                }
                out.push(TgtTerm::lam(binder.clone(), t));
            }
            // binary
            for i in 1..sub {
                if out.len() >= cap {
                    break;
                }
                let lefts = self.terms(i, depth);
                let rights = self.terms(sub - i, depth);
                for l in &lefts {
                    for r in &rights {
                        if out.len() >= cap {
                            break;
                        }
                        out.push(TgtTerm::app(l.clone(), r.clone()));
                        out.push(TgtTerm::pair(l.clone(), r.clone()));
                        out.push(TgtTerm::seq(l.clone(), r.clone()));
                    }
                }
            }
        }
        out.truncate(cap);
        self.term_pool.insert((size, depth), out.clone());
        out
    }

    fn ctxs(&mut self, size: u32, depth: u32, sink: &mut Vec<TgtCtx>, cap: usize) {
        if sink.len() >= cap {
            return;
        }
        if size == 1 {
            sink.push(TgtCtx::new(TgtTerm::hole()).unwrap());
            return;
        }
        let sub = size - 1;
        // unary frames around a context
        let mut inner = Vec::new();
        self.ctxs(sub, depth, &mut inner, cap);
        for c in &inner {
            if sink.len() >= cap {
                return;
            }
            let t = c.term().clone();
            for wrapped in [
                TgtTerm::proj1(t.clone()),
                TgtTerm::proj2(t.clone()),
                TgtTerm::inl(t.clone()),
                TgtTerm::inr(t.clone()),
            ] {
                if sink.len() >= cap {
                    return;
                }
                sink.push(TgtCtx::new(wrapped).unwrap());
            }
        }
        // lambda around a context
        let binder: Name = format!("a{depth}").into();
        let mut inner = Vec::new();
        self.ctxs(sub, depth + 1, &mut inner, cap);
        for c in inner {
            if sink.len() >= cap {
                return;
            }
            sink.push(TgtCtx::new(TgtTerm::lam(binder.clone(), c.into_term())).unwrap());
        }
        // binary frames: hole on either side
        for i in 1..sub {
            if sink.len() >= cap {
                return;
            }
            let mut lefts = Vec::new();
            self.ctxs(i, depth, &mut lefts, cap);
            let rights = self.terms(sub - i, depth);
            for l in &lefts {
                for r in &rights {
                    if sink.len() >= cap {
                        return;
                    }
                    let lt = l.term().clone();
                    sink.push(TgtCtx::new(TgtTerm::app(lt.clone(), r.clone())).unwrap());
                    sink.push(TgtCtx::new(TgtTerm::pair(lt.clone(), r.clone())).unwrap());
                    sink.push(TgtCtx::new(TgtTerm::seq(lt.clone(), r.clone())).unwrap());
                }
            }
            let lefts = self.terms(i, depth);
            let mut rights = Vec::new();
            self.ctxs(sub - i, depth, &mut rights, cap);
            for l in &lefts {
                for r in &rights {
                    if sink.len() >= cap {
                        return;
                    }
                    let rt = r.term().clone();
                    sink.push(TgtCtx::new(TgtTerm::app(l.clone(), rt.clone())).unwrap());
                    sink.push(TgtCtx::new(TgtTerm::pair(l.clone(), rt.clone())).unwrap());
                    sink.push(TgtCtx::new(TgtTerm::seq(l.clone(), rt.clone())).unwrap());
                }
            }
        }
        // ternary-ish frames kept shallow: if/case with the hole in head
        // position and small branch terms.
        if sub >= 3 {
            let third = (sub - 1) / 2;
            let rest = sub - 1 - third;
            let mut heads = Vec::new();
            self.ctxs(1.max(sub - third - rest), depth, &mut heads, cap);
            let bls = self.terms(third.max(1), depth);
            let brs = self.terms(rest.max(1), depth);
            let binder: Name = format!("a{depth}").into();
            for h in &heads {
                for bl in bls.iter().take(4) {
                    for br in brs.iter().take(4) {
                        if sink.len() >= cap {
                            return;
                        }
                        let ht = h.term().clone();
                        sink.push(
                            TgtCtx::new(TgtTerm::ite(ht.clone(), bl.clone(), br.clone())).unwrap(),
                        );
                        sink.push(
                            TgtCtx::new(TgtTerm::case_of(
                                ht,
                                binder.clone(),
                                bl.clone(),
                                binder.clone(),
                                br.clone(),
                            ))
                            .unwrap(),
                        );
                    }
                }
            }
        }
    }

    /// All contexts of sizes `1..=max_size` in order, capped.
    pub fn enumerate(&mut self, max_size: u32, cap: usize) -> Vec<TgtCtx> {
        let mut out = Vec::new();
        for s in 1..=max_size {
            if out.len() >= cap {
                break;
            }
            self.ctxs(s, 0, &mut out, cap);
        }
        out.truncate(cap);
        out
    }
}

// ---------------------------------------------------------------------------
// Source probes for the distinguishing-context search
// ---------------------------------------------------------------------------

/// A few closed canonical values of a type, including a diverging function
/// where applicable.
pub fn canonical_values(ty: &SrcType, budget: usize) -> Vec<SrcTerm> {
    let mut out = Vec::new();
    fill_canonical(ty, budget, &mut out);
    out.truncate(budget);
    out
}

fn fill_canonical(ty: &SrcType, budget: usize, out: &mut Vec<SrcTerm>) {
    match ty.kind() {
        TyKind::Unit => out.push(SrcTerm::unit()),
        TyKind::Bool => {
            out.push(SrcTerm::tru());
            out.push(SrcTerm::fls());
        }
        TyKind::Arrow(d, c) => {
            for v in canonical_values(c, budget.saturating_sub(1).max(1)) {
                out.push(SrcTerm::lam("u", d.clone(), v));
            }
            out.push(SrcTerm::lam("u", d.clone(), omega(c)));
        }
        TyKind::Prod(l, r) => {
            let ls = canonical_values(l, 2);
            let rs = canonical_values(r, 2);
            for a in &ls {
                for b in &rs {
                    out.push(SrcTerm::pair(a.clone(), b.clone()));
                }
            }
        }
        TyKind::Sum(l, r) => {
            for v in canonical_values(l, 2) {
                out.push(SrcTerm::inl(v));
            }
            for v in canonical_values(r, 2) {
                out.push(SrcTerm::inr(v));
            }
        }
    }
}

/// Type-directed discriminating probes: source contexts with a hole of type
/// `ty`, each of result type `Bool`, designed to surface behavioral
/// differences either through termination or through the produced boolean.
pub fn discriminating_probes(ty: &SrcType) -> Vec<SrcCtx> {
    let mut terms = Vec::new();
    probe_terms(ty, &SrcTerm::hole(), 0, &mut terms);
    terms
        .into_iter()
        .filter_map(|t| SrcCtx::new(t).ok())
        .collect()
}

fn probe_terms(ty: &SrcType, at: &SrcTerm, depth: u32, out: &mut Vec<SrcTerm>) {
    if depth > 4 {
        return;
    }
    match ty.kind() {
        TyKind::Bool => {
            out.push(at.clone());
            out.push(SrcTerm::ite(at.clone(), SrcTerm::tru(), omega(&SrcType::bool_())));
            out.push(SrcTerm::ite(at.clone(), omega(&SrcType::bool_()), SrcTerm::fls()));
        }
        TyKind::Unit => {
            out.push(SrcTerm::seq(at.clone(), SrcTerm::tru()));
        }
        TyKind::Arrow(d, c) => {
            for v in canonical_values(d, 3) {
                probe_terms(c, &SrcTerm::app(at.clone(), v), depth + 1, out);
            }
        }
        TyKind::Prod(l, r) => {
            probe_terms(l, &SrcTerm::proj1(at.clone()), depth + 1, out);
            probe_terms(r, &SrcTerm::proj2(at.clone()), depth + 1, out);
        }
        TyKind::Sum(l, r) => {
            out.push(SrcTerm::case_of(
                at.clone(),
                "s",
                SrcTerm::tru(),
                "s",
                omega(&SrcType::bool_()),
            ));
            out.push(SrcTerm::case_of(
                at.clone(),
                "s",
                omega(&SrcType::bool_()),
                "s",
                SrcTerm::fls(),
            ));
            let mut inner = Vec::new();
            probe_terms(l, &SrcTerm::var("s"), depth + 1, &mut inner);
            for p in inner {
                out.push(SrcTerm::case_of(
                    at.clone(),
                    "s",
                    p,
                    "s",
                    omega(&SrcType::bool_()),
                ));
            }
            let mut inner = Vec::new();
            probe_terms(r, &SrcTerm::var("s"), depth + 1, &mut inner);
            for p in inner {
                out.push(SrcTerm::case_of(
                    at.clone(),
                    "s",
                    omega(&SrcType::bool_()),
                    "s",
                    p,
                ));
            }
        }
    }
}

/// Random well-typed source contexts with a hole of type `hole_ty` in the
/// empty environment, built by generating boolean observers over an extra
/// free variable and replacing its single occurrence with the hole.
pub fn gen_src_ctx(
    rng: &mut ChaCha12Rng,
    hole_ty: &SrcType,
    size: u32,
    attempts: u32,
) -> Option<SrcCtx> {
    let h: Name = "hole_marker".into();
    let env = TypingEnv::empty().extended(h.clone(), hole_ty.clone());
    let mut gen = SrcTermGen::new();
    for _ in 0..attempts {
        let t = gen.term(rng, &env, &SrcType::bool_(), size);
        if count_var(&t, &h) == 1 {
            let c = replace_var_with_hole(&t, &h);
            if c.holes() == 1 {
                return SrcCtx::new(c).ok();
            }
        }
    }
    None
}

fn count_var(t: &SrcTerm, x: &Name) -> u32 {
    if !t.fv().contains(x) {
        return 0;
    }
    match t.kind() {
        SrcKind::Var(_) => 1,
        SrcKind::Lam(_, _, b) | SrcKind::Proj1(b) | SrcKind::Proj2(b) | SrcKind::Inl(b)
        | SrcKind::Inr(b) | SrcKind::Fix(_, _, b) => count_var(b, x),
        SrcKind::App(a, b) | SrcKind::Pair(a, b) | SrcKind::Seq(a, b) => {
            count_var(a, x) + count_var(b, x)
        }
        SrcKind::Case(s, _, bl, _, br) => count_var(s, x) + count_var(bl, x) + count_var(br, x),
        SrcKind::If(c, a, b) => count_var(c, x) + count_var(a, x) + count_var(b, x),
        _ => 0,
    }
}

fn replace_var_with_hole(t: &SrcTerm, x: &Name) -> SrcTerm {
    if !t.fv().contains(x) {
        return t.clone();
    }
    match t.kind() {
        SrcKind::Var(_) => SrcTerm::hole(),
        SrcKind::Lam(n, ty, b) => SrcTerm::lam(n.clone(), ty.clone(), replace_var_with_hole(b, x)),
        SrcKind::App(a, b) => {
            SrcTerm::app(replace_var_with_hole(a, x), replace_var_with_hole(b, x))
        }
        SrcKind::Pair(a, b) => {
            SrcTerm::pair(replace_var_with_hole(a, x), replace_var_with_hole(b, x))
        }
        SrcKind::Proj1(b) => SrcTerm::proj1(replace_var_with_hole(b, x)),
        SrcKind::Proj2(b) => SrcTerm::proj2(replace_var_with_hole(b, x)),
        SrcKind::Inl(b) => SrcTerm::inl(replace_var_with_hole(b, x)),
        SrcKind::Inr(b) => SrcTerm::inr(replace_var_with_hole(b, x)),
        SrcKind::Case(s, nl, bl, nr, br) => SrcTerm::case_of(
            replace_var_with_hole(s, x),
            nl.clone(),
            replace_var_with_hole(bl, x),
            nr.clone(),
            replace_var_with_hole(br, x),
        ),
        SrcKind::Seq(a, b) => {
            SrcTerm::seq(replace_var_with_hole(a, x), replace_var_with_hole(b, x))
        }
        SrcKind::If(c, a, b) => SrcTerm::ite(
            replace_var_with_hole(c, x),
            replace_var_with_hole(a, x),
            replace_var_with_hole(b, x),
        ),
        SrcKind::Fix(d, co, b) => {
            SrcTerm::fix(d.clone(), co.clone(), replace_var_with_hole(b, x))
        }
        _ => t.clone(),
    }
}
