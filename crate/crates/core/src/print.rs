//! Pretty printers for both languages, with minimal parenthesization per the
//! precedence table the parser implements.
//!
//! Term precedence, loosest to tightest:
//!   0 seq  ·  1 openers (lambda, if, case, fix)  ·  2 prefix ops
//!   (fst/snd/inl/inr)  ·  3 application (left-assoc)  ·  4 atoms
//!
//! Type precedence: `->` (right-assoc) looser than `+` looser than `*`,
//! the latter two also right-assoc.
//!
//! A construct printed on the left of `;` gets parentheses whenever its
//! rightmost extent is an open-ended body (a lambda body, an else branch,
//! and so on) that would otherwise absorb the `;` on re-parsing.

use std::fmt;

use crate::source::{SrcKind, SrcTerm, SrcType, TyKind};
use crate::target::{TgtKind, TgtTerm};

// ---------------------------------------------------------------------------
// Types
// ---------------------------------------------------------------------------

fn fmt_ty(t: &SrcType, prec: u8, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    match t.kind() {
        TyKind::Unit => f.write_str("Unit"),
        TyKind::Bool => f.write_str("Bool"),
        TyKind::Arrow(d, c) => {
            let parens = prec > 0;
            if parens {
                f.write_str("(")?;
            }
            fmt_ty(d, 1, f)?;
            f.write_str(" -> ")?;
            fmt_ty(c, 0, f)?;
            if parens {
                f.write_str(")")?;
            }
            Ok(())
        }
        TyKind::Sum(l, r) => {
            let parens = prec > 1;
            if parens {
                f.write_str("(")?;
            }
            fmt_ty(l, 2, f)?;
            f.write_str(" + ")?;
            fmt_ty(r, 1, f)?;
            if parens {
                f.write_str(")")?;
            }
            Ok(())
        }
        TyKind::Prod(l, r) => {
            let parens = prec > 2;
            if parens {
                f.write_str("(")?;
            }
            fmt_ty(l, 3, f)?;
            f.write_str(" * ")?;
            fmt_ty(r, 2, f)?;
            if parens {
                f.write_str(")")?;
            }
            Ok(())
        }
    }
}

impl fmt::Display for SrcType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt_ty(self, 0, f)
    }
}

// ---------------------------------------------------------------------------
// Terms
// ---------------------------------------------------------------------------

/// Whether the rightmost extent of the printed form is an open-ended body
/// that would absorb a following `;` on re-parsing.
fn src_right_open(t: &SrcTerm) -> bool {
    match t.kind() {
        SrcKind::Lam(..) => true,
        SrcKind::If(_, _, e) => src_right_open(e),
        SrcKind::Case(_, _, _, _, br) => src_right_open(br),
        SrcKind::Fix(_, _, a) => src_right_open(a),
        SrcKind::Seq(_, b) => src_right_open(b),
        _ => false,
    }
}

fn tgt_right_open(t: &TgtTerm) -> bool {
    match t.kind() {
        TgtKind::Lam(..) => true,
        TgtKind::If(_, _, e) => tgt_right_open(e),
        TgtKind::Case(_, _, _, _, br) => tgt_right_open(br),
        TgtKind::Seq(_, b) => tgt_right_open(b),
        _ => false,
    }
}

fn fmt_src(t: &SrcTerm, prec: u8, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    let paren = |needed: bool, f: &mut fmt::Formatter<'_>, inner: &dyn Fn(&mut fmt::Formatter<'_>) -> fmt::Result| {
        if needed {
            f.write_str("(")?;
            inner(f)?;
            f.write_str(")")
        } else {
            inner(f)
        }
    };
    match t.kind() {
        SrcKind::Unit => f.write_str("unit"),
        SrcKind::True => f.write_str("true"),
        SrcKind::False => f.write_str("false"),
        SrcKind::Var(x) => f.write_str(x),
        SrcKind::Hole => f.write_str("HOLE"),
        SrcKind::Pair(a, b) => {
            f.write_str("<")?;
            fmt_src(a, 0, f)?;
            f.write_str(", ")?;
            fmt_src(b, 0, f)?;
            f.write_str(">")
        }
        SrcKind::Lam(x, ty, body) => paren(prec > 1, f, &|f| {
            write!(f, "\\{x}:")?;
            fmt_ty(ty, 0, f)?;
            f.write_str(". ")?;
            fmt_src(body, 0, f)
        }),
        SrcKind::If(c, th, el) => paren(prec > 1, f, &|f| {
            f.write_str("if ")?;
            fmt_src(c, 0, f)?;
            f.write_str(" then ")?;
            fmt_src(th, 0, f)?;
            f.write_str(" else ")?;
            fmt_src(el, 1, f)
        }),
        SrcKind::Case(s, nl, bl, nr, br) => paren(prec > 1, f, &|f| {
            f.write_str("case ")?;
            fmt_src(s, 0, f)?;
            write!(f, " of inl {nl} => ")?;
            fmt_src(bl, 0, f)?;
            write!(f, " | inr {nr} => ")?;
            fmt_src(br, 1, f)
        }),
        SrcKind::Fix(d, c, a) => paren(prec > 1, f, &|f| {
            f.write_str("fix [")?;
            fmt_ty(&SrcType::arrow(d.clone(), c.clone()), 0, f)?;
            f.write_str("] ")?;
            fmt_src(a, 1, f)
        }),
        SrcKind::Seq(a, b) => paren(prec > 0, f, &|f| {
            fmt_src(a, if src_right_open(a) { 2 } else { 1 }, f)?;
            f.write_str("; ")?;
            fmt_src(b, 0, f)
        }),
        SrcKind::Proj1(a) => paren(prec > 2, f, &|f| {
            f.write_str("fst ")?;
            fmt_src(a, 2, f)
        }),
        SrcKind::Proj2(a) => paren(prec > 2, f, &|f| {
            f.write_str("snd ")?;
            fmt_src(a, 2, f)
        }),
        SrcKind::Inl(a) => paren(prec > 2, f, &|f| {
            f.write_str("inl ")?;
            fmt_src(a, 2, f)
        }),
        SrcKind::Inr(a) => paren(prec > 2, f, &|f| {
            f.write_str("inr ")?;
            fmt_src(a, 2, f)
        }),
        SrcKind::App(g, a) => paren(prec > 3, f, &|f| {
            fmt_src(g, 3, f)?;
            f.write_str(" ")?;
            fmt_src(a, 4, f)
        }),
    }
}

impl fmt::Display for SrcTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt_src(self, 0, f)
    }
}

fn fmt_tgt(t: &TgtTerm, prec: u8, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    let paren = |needed: bool, f: &mut fmt::Formatter<'_>, inner: &dyn Fn(&mut fmt::Formatter<'_>) -> fmt::Result| {
        if needed {
            f.write_str("(")?;
            inner(f)?;
            f.write_str(")")
        } else {
            inner(f)
        }
    };
    match t.kind() {
        TgtKind::Unit => f.write_str("unit"),
        TgtKind::True => f.write_str("true"),
        TgtKind::False => f.write_str("false"),
        TgtKind::Wrong => f.write_str("wrong"),
        TgtKind::Var(x) => f.write_str(x),
        TgtKind::Hole => f.write_str("HOLE"),
        TgtKind::Pair(a, b) => {
            f.write_str("<")?;
            fmt_tgt(a, 0, f)?;
            f.write_str(", ")?;
            fmt_tgt(b, 0, f)?;
            f.write_str(">")
        }
        TgtKind::Lam(x, body) => paren(prec > 1, f, &|f| {
            write!(f, "\\{x}. ")?;
            fmt_tgt(body, 0, f)
        }),
        TgtKind::If(c, th, el) => paren(prec > 1, f, &|f| {
            f.write_str("if ")?;
            fmt_tgt(c, 0, f)?;
            f.write_str(" then ")?;
            fmt_tgt(th, 0, f)?;
            f.write_str(" else ")?;
            fmt_tgt(el, 1, f)
        }),
        TgtKind::Case(s, nl, bl, nr, br) => paren(prec > 1, f, &|f| {
            f.write_str("case ")?;
            fmt_tgt(s, 0, f)?;
            write!(f, " of inl {nl} => ")?;
            fmt_tgt(bl, 0, f)?;
            write!(f, " | inr {nr} => ")?;
            fmt_tgt(br, 1, f)
        }),
        TgtKind::Seq(a, b) => paren(prec > 0, f, &|f| {
            fmt_tgt(a, if tgt_right_open(a) { 2 } else { 1 }, f)?;
            f.write_str("; ")?;
            fmt_tgt(b, 0, f)
        }),
        TgtKind::Proj1(a) => paren(prec > 2, f, &|f| {
            f.write_str("fst ")?;
            fmt_tgt(a, 2, f)
        }),
        TgtKind::Proj2(a) => paren(prec > 2, f, &|f| {
            f.write_str("snd ")?;
            fmt_tgt(a, 2, f)
        }),
        TgtKind::Inl(a) => paren(prec > 2, f, &|f| {
            f.write_str("inl ")?;
            fmt_tgt(a, 2, f)
        }),
        TgtKind::Inr(a) => paren(prec > 2, f, &|f| {
            f.write_str("inr ")?;
            fmt_tgt(a, 2, f)
        }),
        TgtKind::App(g, a) => paren(prec > 3, f, &|f| {
            fmt_tgt(g, 3, f)?;
            f.write_str(" ")?;
            fmt_tgt(a, 4, f)
        }),
    }
}

impl fmt::Display for TgtTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt_tgt(self, 0, f)
    }
}

/// Renders a `Display` value but gives up after a fixed budget, appending an
/// ellipsis. Generated wrapper terms share subtrees aggressively, so printing
/// them in full for a diagnostic is not an option.
pub(crate) fn budget_display(t: &dyn fmt::Display) -> String {
    use fmt::Write;
    struct Budget {
        buf: String,
        truncated: bool,
    }
    impl Write for Budget {
        fn write_str(&mut self, s: &str) -> fmt::Result {
            const LIMIT: usize = 77;
            if self.buf.len() >= LIMIT {
                self.truncated = true;
                return Err(fmt::Error);
            }
            let room = LIMIT - self.buf.len();
            if s.len() <= room {
                self.buf.push_str(s);
                Ok(())
            } else {
                let mut cut = room;
                while !s.is_char_boundary(cut) {
                    cut -= 1;
                }
                self.buf.push_str(&s[..cut]);
                self.truncated = true;
                Err(fmt::Error)
            }
        }
    }
    let mut b = Budget { buf: String::new(), truncated: false };
    let _ = write!(&mut b, "{t}");
    if b.truncated {
        b.buf.push('…');
    }
    b.buf
}

pub fn print_src(t: &SrcTerm) -> String {
    t.to_string()
}

pub fn print_tgt(t: &TgtTerm) -> String {
    t.to_string()
}

pub fn print_src_type(t: &SrcType) -> String {
    t.to_string()
}
