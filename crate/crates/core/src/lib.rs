//! A compiler from a simply-typed call-by-value lambda calculus to an
//! untyped one, with dynamic type-enforcement wrappers, term-level linking,
//! an approximate back-translation of target contexts, and a differential
//! harness that checks contextual equivalence as fuel-bounded
//! equi-termination.

pub mod names;
pub mod source;
pub mod target;
pub mod print;
pub mod ctx;
pub mod compile;
pub mod uval;
pub mod parse;
pub mod gen;
pub mod harness;

pub use ctx::{ctx_typecheck, ctx_well_scoped, link_src, link_tgt, linking_ctx, plug_src, plug_tgt, SrcCtx, TgtCtx};
pub use compile::{compile, compile_modular, confine_term, erase, erase_ctx, protect_term, z_combinator};
pub use source::{check_type, src_eval, src_step, typecheck, SrcOutcome, SrcStep, SrcTerm, SrcType, TypeError, TypingEnv};
pub use target::{tgt_eval, tgt_step, well_scoped, ScopeEnv, ScopeError, TgtOutcome, TgtStep, TgtTerm};
pub use uval::{omega, unk_uval, UValGen, UValTag};
