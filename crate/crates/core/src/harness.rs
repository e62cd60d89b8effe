//! Differential equi-termination testing: observations, context-corpus
//! generation, equivalence checking of target terms, distinguishing-context
//! search over source terms, back-translation direction checks, and the
//! modularity check.

use rayon::prelude::*;
use serde::Serialize;

use crate::compile::{compile, compile_modular};
use crate::ctx::{ctx_well_scoped, link_src, link_tgt, linking_ctx, LinkError, SrcCtx, TgtCtx};
use crate::gen::{discriminating_probes, gen_src_ctx, gen_tgt_ctx, rng_from_seed, CtxEnumerator};
use crate::names::Name;
use crate::source::{check_type, src_eval, SrcKind, SrcOutcome, SrcTerm, SrcType, TypeError, TypingEnv};
use crate::target::{tgt_eval, TgtKind, TgtOutcome, TgtTerm};
use crate::uval::{BacktransError, UValGen};

// ---------------------------------------------------------------------------
// Observations
// ---------------------------------------------------------------------------

/// What fuel-bounded evaluation observed. `Terminates` means termination
/// with a value; reaching `wrong` is never termination, and running out of
/// fuel is never divergence evidence.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Observation {
    Terminates { steps: u64 },
    GoesWrong { steps: u64 },
    Timeout { fuel: u64 },
}

impl Observation {
    pub fn terminated(&self) -> bool {
        matches!(self, Observation::Terminates { .. })
    }

    pub fn timed_out(&self) -> bool {
        matches!(self, Observation::Timeout { .. })
    }
}

impl std::fmt::Display for Observation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Observation::Terminates { steps } => write!(f, "term:{steps}"),
            Observation::GoesWrong { steps } => write!(f, "wrong:{steps}"),
            Observation::Timeout { fuel } => write!(f, "timeout:{fuel}"),
        }
    }
}

pub fn observe_tgt(t: &TgtTerm, fuel: u64) -> Observation {
    observe_tgt_value(t, fuel).0
}

fn observe_tgt_value(t: &TgtTerm, fuel: u64) -> (Observation, Option<TgtTerm>) {
    match tgt_eval(t, fuel) {
        TgtOutcome::Value { value, steps } => (Observation::Terminates { steps }, Some(value)),
        TgtOutcome::Wrong { steps } => (Observation::GoesWrong { steps }, None),
        TgtOutcome::FuelExhausted { fuel_spent } => (Observation::Timeout { fuel: fuel_spent }, None),
    }
}

/// Source terms cannot go wrong; the observation degenerates to
/// termination or timeout.
pub fn observe_src(t: &SrcTerm, fuel: u64) -> Observation {
    observe_src_value(t, fuel).0
}

fn observe_src_value(t: &SrcTerm, fuel: u64) -> (Observation, Option<SrcTerm>) {
    match src_eval(t, fuel) {
        SrcOutcome::Value { value, steps } => (Observation::Terminates { steps }, Some(value)),
        SrcOutcome::FuelExhausted { fuel_spent } => {
            (Observation::Timeout { fuel: fuel_spent }, None)
        }
    }
}

// ---------------------------------------------------------------------------
// Configuration
// ---------------------------------------------------------------------------

/// Context-generation and evaluation budget. Identical configs produce
/// identical context streams and therefore byte-identical reports.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GenConfig {
    pub seed: u64,
    /// Number of random contexts after the exhaustive phase.
    pub count: u32,
    /// Maximum AST size for randomly generated contexts.
    pub max_ctx_size: u32,
    /// Exhaustive enumeration covers sizes up to this bound ...
    pub exhaustive_size: u32,
    /// ... truncated to this many contexts (full enumeration of size 9 is
    /// astronomically large; the deterministic prefix keeps small sizes
    /// complete).
    pub exhaustive_cap: u32,
    pub fuel: u64,
    /// Names the hole may refer to (contexts are scope-checked against
    /// this at generation time).
    #[serde(skip)]
    pub hole_env: Vec<Name>,
    /// Hole type for source-context generation.
    #[serde(skip)]
    pub hole_type: Option<SrcType>,
}

impl Default for GenConfig {
    fn default() -> Self {
        GenConfig {
            seed: 0xFAB7,
            count: 500,
            max_ctx_size: 25,
            exhaustive_size: 9,
            exhaustive_cap: 20_000,
            fuel: 100_000,
            hole_env: Vec::new(),
            hole_type: None,
        }
    }
}

/// The fixed prefix corpus: the motivating distinguishing contexts plus a
/// few adversarial probes. Always contains `HOLE true`.
pub fn prefix_contexts(hole_env: &[Name]) -> Vec<TgtCtx> {
    let h = TgtTerm::hole;
    let id = || TgtTerm::lam("w", TgtTerm::var("w"));
    let mut out = vec![
        TgtCtx::hole(),
        TgtCtx::new(TgtTerm::app(h(), TgtTerm::tru())).unwrap(),
        TgtCtx::new(TgtTerm::app(h(), TgtTerm::unit())).unwrap(),
        TgtCtx::new(TgtTerm::app(h(), TgtTerm::fls())).unwrap(),
        TgtCtx::new(TgtTerm::app(h(), id())).unwrap(),
        TgtCtx::new(TgtTerm::app(TgtTerm::app(h(), TgtTerm::tru()), TgtTerm::tru())).unwrap(),
        TgtCtx::new(TgtTerm::app(TgtTerm::app(h(), TgtTerm::unit()), TgtTerm::unit())).unwrap(),
        TgtCtx::new(TgtTerm::proj1(h())).unwrap(),
        TgtCtx::new(TgtTerm::proj2(h())).unwrap(),
        TgtCtx::new(TgtTerm::case_of(h(), "c", TgtTerm::tru(), "c", TgtTerm::fls())).unwrap(),
        TgtCtx::new(TgtTerm::case_of(h(), "c", TgtTerm::var("c"), "c", TgtTerm::var("c"))).unwrap(),
        TgtCtx::new(TgtTerm::ite(h(), TgtTerm::tru(), TgtTerm::fls())).unwrap(),
        TgtCtx::new(TgtTerm::seq(h(), TgtTerm::tru())).unwrap(),
        TgtCtx::new(TgtTerm::app(TgtTerm::proj1(h()), TgtTerm::unit())).unwrap(),
        TgtCtx::new(TgtTerm::app(TgtTerm::proj2(h()), TgtTerm::unit())).unwrap(),
        TgtCtx::new(TgtTerm::app(TgtTerm::proj1(h()), TgtTerm::tru())).unwrap(),
        TgtCtx::new(TgtTerm::app(h(), TgtTerm::lam("d", TgtTerm::wrong()))).unwrap(),
        TgtCtx::new(TgtTerm::seq(TgtTerm::app(h(), TgtTerm::unit()), TgtTerm::tru())).unwrap(),
        TgtCtx::new(TgtTerm::pair(h(), TgtTerm::wrong())).unwrap(),
    ];
    // A linking-shaped adversarial probe: link the subject against a fixed
    // partner and poke the first projection.
    if let Ok(link) = linking_ctx(&TgtTerm::lam("b", TgtTerm::tru())) {
        let wrapped = TgtTerm::app(TgtTerm::proj1(link.into_term()), TgtTerm::unit());
        out.push(TgtCtx::new(wrapped).unwrap());
    }
    out.retain(|c| ctx_well_scoped(c, &hole_env.to_vec()).is_ok());
    out
}

/// The deterministic context stream: fixed prefix, then capped exhaustive
/// enumeration in size order, then seeded random contexts.
pub fn generate_tgt_contexts(cfg: &GenConfig) -> Vec<TgtCtx> {
    let mut out = prefix_contexts(&cfg.hole_env);
    let mut enumerator = CtxEnumerator::new(&cfg.hole_env);
    out.extend(enumerator.enumerate(cfg.exhaustive_size, cfg.exhaustive_cap as usize));
    let mut rng = rng_from_seed(cfg.seed);
    for _ in 0..cfg.count {
        let size = rng.gen_range(2..=cfg.max_ctx_size.max(2));
        out.push(gen_tgt_ctx(&mut rng, &cfg.hole_env, size));
    }
    out.retain(|c| ctx_well_scoped(c, &cfg.hole_env).is_ok());
    out
}

use rand::Rng;

// ---------------------------------------------------------------------------
// Verdicts and reports
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum CaseVerdict {
    Agree,
    Disagree,
    /// A timeout on either side: never disagreement evidence.
    Inconclusive,
}

impl std::fmt::Display for CaseVerdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CaseVerdict::Agree => f.write_str("agree"),
            CaseVerdict::Disagree => f.write_str("disagree"),
            CaseVerdict::Inconclusive => f.write_str("inconclusive"),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct CaseRecord {
    pub id: u32,
    pub ctx: String,
    pub obs1: Observation,
    pub obs2: Observation,
    /// Set when both sides terminated in base values and those values were
    /// compared (a strictly stronger signal than equi-termination, flagged
    /// per case).
    pub value_cmp: Option<(String, String)>,
    pub verdict: CaseVerdict,
}

#[derive(Debug, Clone, PartialEq)]
pub enum EquivVerdict {
    Agree,
    Disagree { witness: TgtCtx, obs1: Observation, obs2: Observation },
    Inconclusive { timeout_count: u32 },
}

impl EquivVerdict {
    pub fn is_disagree(&self) -> bool {
        matches!(self, EquivVerdict::Disagree { .. })
    }

    pub fn tag(&self) -> &'static str {
        match self {
            EquivVerdict::Agree => "agree",
            EquivVerdict::Disagree { .. } => "disagree",
            EquivVerdict::Inconclusive { .. } => "inconclusive",
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct TestReport {
    pub config: GenConfig,
    pub cases: Vec<CaseRecord>,
    pub agree: u32,
    pub disagree: u32,
    pub inconclusive: u32,
    pub verdict: String,
}

impl TestReport {
    /// Line-oriented rendering: one record per line, then a summary line.
    /// The `ctx` field runs until the ` obs1=` delimiter.
    pub fn render(&self) -> String {
        let mut out = String::new();
        for c in &self.cases {
            out.push_str(&format!(
                "case={} ctx={} obs1={} obs2={} verdict={}",
                c.id, c.ctx, c.obs1, c.obs2, c.verdict
            ));
            if let Some((v1, v2)) = &c.value_cmp {
                out.push_str(&format!(" valuecmp=yes vals={v1},{v2}"));
            }
            out.push('\n');
        }
        out.push_str(&format!(
            "summary cases={} agree={} disagree={} inconclusive={} verdict={} seed={} count={} maxsize={} exhaustive={} cap={} fuel={}\n",
            self.cases.len(),
            self.agree,
            self.disagree,
            self.inconclusive,
            self.verdict,
            self.config.seed,
            self.config.count,
            self.config.max_ctx_size,
            self.config.exhaustive_size,
            self.config.exhaustive_cap,
            self.config.fuel,
        ));
        out
    }
}

fn base_token_tgt(t: &TgtTerm) -> Option<&'static str> {
    match t.kind() {
        TgtKind::Unit => Some("unit"),
        TgtKind::True => Some("true"),
        TgtKind::False => Some("false"),
        _ => None,
    }
}

fn base_token_src(t: &SrcTerm) -> Option<&'static str> {
    match t.kind() {
        SrcKind::Unit => Some("unit"),
        SrcKind::True => Some("true"),
        SrcKind::False => Some("false"),
        _ => None,
    }
}

fn classify(
    obs1: Observation,
    v1: Option<&'static str>,
    obs2: Observation,
    v2: Option<&'static str>,
) -> (CaseVerdict, Option<(String, String)>) {
    use Observation::*;
    match (obs1, obs2) {
        (Timeout { .. }, _) | (_, Timeout { .. }) => (CaseVerdict::Inconclusive, None),
        (Terminates { .. }, GoesWrong { .. }) | (GoesWrong { .. }, Terminates { .. }) => {
            (CaseVerdict::Disagree, None)
        }
        (GoesWrong { .. }, GoesWrong { .. }) => (CaseVerdict::Agree, None),
        (Terminates { .. }, Terminates { .. }) => match (v1, v2) {
            (Some(a), Some(b)) => {
                let verdict = if a == b { CaseVerdict::Agree } else { CaseVerdict::Disagree };
                (verdict, Some((a.to_string(), b.to_string())))
            }
            _ => (CaseVerdict::Agree, None),
        },
    }
}

// ---------------------------------------------------------------------------
// Equivalence checking of target terms
// ---------------------------------------------------------------------------

/// Fuel-bounded differential check of two closed target terms over the
/// generated context corpus. The aggregate verdict is `Disagree` exactly
/// when some case disagrees; timeouts only ever make cases inconclusive.
pub fn equiv_check_tgt(t1: &TgtTerm, t2: &TgtTerm, cfg: &GenConfig) -> (EquivVerdict, TestReport) {
    let contexts = generate_tgt_contexts(cfg);
    let fuel = cfg.fuel;
    let cases: Vec<(CaseRecord, TgtCtx)> = contexts
        .into_par_iter()
        .enumerate()
        .map(|(i, c)| {
            let (obs1, val1) = observe_tgt_value(&c.plug(t1), fuel);
            let (obs2, val2) = observe_tgt_value(&c.plug(t2), fuel);
            let tok1 = val1.as_ref().and_then(base_token_tgt);
            let tok2 = val2.as_ref().and_then(base_token_tgt);
            let (verdict, value_cmp) = classify(obs1, tok1, obs2, tok2);
            let record = CaseRecord {
                id: i as u32,
                ctx: crate::print::budget_display(&c),
                obs1,
                obs2,
                value_cmp,
                verdict,
            };
            (record, c)
        })
        .collect();
    summarize(cases, cfg)
}

fn summarize(cases: Vec<(CaseRecord, TgtCtx)>, cfg: &GenConfig) -> (EquivVerdict, TestReport) {
    let mut agree = 0;
    let mut disagree = 0;
    let mut inconclusive = 0;
    let mut witness: Option<(TgtCtx, Observation, Observation)> = None;
    for (rec, ctx) in &cases {
        match rec.verdict {
            CaseVerdict::Agree => agree += 1,
            CaseVerdict::Inconclusive => inconclusive += 1,
            CaseVerdict::Disagree => {
                disagree += 1;
                if witness.is_none() {
                    witness = Some((ctx.clone(), rec.obs1, rec.obs2));
                }
            }
        }
    }
    let verdict = match witness {
        Some((witness, obs1, obs2)) => EquivVerdict::Disagree { witness, obs1, obs2 },
        None if cases.is_empty() => EquivVerdict::Inconclusive { timeout_count: 0 },
        None => EquivVerdict::Agree,
    };
    let report = TestReport {
        config: cfg.clone(),
        cases: cases.into_iter().map(|(r, _)| r).collect(),
        agree,
        disagree,
        inconclusive,
        verdict: verdict.tag().to_string(),
    };
    (verdict, report)
}

// ---------------------------------------------------------------------------
// Distinguishing-context search (source level)
// ---------------------------------------------------------------------------

/// Searches source contexts for one under which the two terms' observations
/// differ: different termination behavior, or different base values when
/// both terminate. Deterministic in the config; the witness replays.
pub fn distinguish_search(
    t1: &SrcTerm,
    t2: &SrcTerm,
    ty: &SrcType,
    cfg: &GenConfig,
) -> Result<Option<SrcCtx>, TypeError> {
    check_type(&TypingEnv::empty(), t1, ty)?;
    check_type(&TypingEnv::empty(), t2, ty)?;
    let mut candidates = discriminating_probes(ty);
    let mut rng = rng_from_seed(cfg.seed);
    for _ in 0..cfg.count {
        if let Some(c) = gen_src_ctx(&mut rng, ty, cfg.max_ctx_size.min(14), 8) {
            candidates.push(c);
        }
    }
    let fuel = cfg.fuel;
    let found = candidates.into_par_iter().find_first(|c| {
        let (o1, v1) = observe_src_value(&c.plug(t1), fuel);
        let (o2, v2) = observe_src_value(&c.plug(t2), fuel);
        src_observations_differ(o1, v1.as_ref(), o2, v2.as_ref())
    });
    Ok(found)
}

fn src_observations_differ(
    o1: Observation,
    v1: Option<&SrcTerm>,
    o2: Observation,
    v2: Option<&SrcTerm>,
) -> bool {
    match (o1, o2) {
        (Observation::Terminates { .. }, Observation::Terminates { .. }) => {
            match (v1.and_then(base_token_src), v2.and_then(base_token_src)) {
                (Some(a), Some(b)) => a != b,
                _ => false,
            }
        }
        (Observation::Terminates { .. }, _) | (_, Observation::Terminates { .. }) => true,
        _ => false,
    }
}

// ---------------------------------------------------------------------------
// Back-translation direction checks
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum DirectionResult {
    Pass,
    /// The hypothesis of the direction did not apply.
    Vacuous,
    Fail(String),
    Inconclusive(String),
}

impl DirectionResult {
    pub fn is_fail(&self) -> bool {
        matches!(self, DirectionResult::Fail(_))
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct BacktransCaseRecord {
    pub id: u32,
    pub ctx: String,
    pub ty: String,
    pub target_obs: Observation,
    /// Termination of the target plug in k steps implies termination of the
    /// depth-(k+1) back-translated plug.
    pub precise: DirectionResult,
    /// Termination of the back-translated plug at depth n implies
    /// termination of the target plug.
    pub imprecise: Vec<(u32, DirectionResult)>,
}

#[derive(Debug, Clone, Serialize)]
pub struct BacktransReport {
    pub cases: Vec<BacktransCaseRecord>,
    pub precise_pass: u32,
    pub precise_vacuous: u32,
    pub precise_fail: u32,
    pub imprecise_pass: u32,
    pub imprecise_vacuous: u32,
    pub imprecise_fail: u32,
    pub inconclusive: u32,
}

impl BacktransReport {
    pub fn violations(&self) -> u32 {
        self.precise_fail + self.imprecise_fail
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        for c in &self.cases {
            out.push_str(&format!(
                "case={} ty={} target={} precise={:?}",
                c.id, c.ty, c.target_obs, c.precise
            ));
            for (n, r) in &c.imprecise {
                out.push_str(&format!(" imprecise[{n}]={r:?}"));
            }
            out.push_str(&format!(" ctx={}\n", c.ctx));
        }
        out.push_str(&format!(
            "summary cases={} precise=({}+{}v/{}f) imprecise=({}+{}v/{}f) inconclusive={} violations={}\n",
            self.cases.len(),
            self.precise_pass,
            self.precise_vacuous,
            self.precise_fail,
            self.imprecise_pass,
            self.imprecise_vacuous,
            self.imprecise_fail,
            self.inconclusive,
            self.violations(),
        ));
        out
    }
}

#[derive(Debug, Clone, thiserror::Error, PartialEq)]
pub enum HarnessError {
    #[error(transparent)]
    Type(#[from] TypeError),
    #[error(transparent)]
    Link(#[from] LinkError),
    #[error(transparent)]
    Compile(#[from] crate::compile::CompileError),
    #[error(transparent)]
    Backtrans(#[from] BacktransError),
}

/// Runs both back-translation directions over explicit cases.
///
/// Precise: if the target context plugged with the compiled term terminates
/// in `k` steps, the back-translation at depth `k + 1` plugged with the
/// source term terminates within `fuel_src`.
///
/// Imprecise: whenever a back-translated plug at some depth terminates, the
/// target plug terminates too (checked at the per-case depths given in
/// `extra_depths` in addition to the precise run).
pub fn backtrans_direction_check(
    cases: &[(TgtCtx, SrcTerm, SrcType)],
    fuel_tgt: u64,
    fuel_src: u64,
    extra_depths: &[u32],
) -> Result<BacktransReport, HarnessError> {
    let mut gen = UValGen::new();
    let mut records = Vec::new();
    for (i, (ctx, term, ty)) in cases.iter().enumerate() {
        let compiled = compile(term, ty)?;
        let target_plug = ctx.plug(&compiled);
        let target_obs = observe_tgt(&target_plug, fuel_tgt);

        let precise = match target_obs {
            Observation::Terminates { steps } => {
                let depth = u32::try_from(steps + 1).expect("step bound fits the depth index");
                let bt = gen.backtranslate(ctx, ty, depth)?;
                let src_obs = observe_src(&bt.plug(term), fuel_src);
                if src_obs.terminated() {
                    DirectionResult::Pass
                } else {
                    DirectionResult::Fail(format!(
                        "target terminated in {steps} steps but depth-{depth} back-translation observed {src_obs}"
                    ))
                }
            }
            _ => DirectionResult::Vacuous,
        };

        let mut imprecise = Vec::new();
        for &n in extra_depths {
            if n == 0 {
                continue;
            }
            let bt = gen.backtranslate(ctx, ty, n)?;
            let src_obs = observe_src(&bt.plug(term), fuel_src);
            let r = if src_obs.terminated() {
                match target_obs {
                    Observation::Terminates { .. } => DirectionResult::Pass,
                    Observation::GoesWrong { .. } => DirectionResult::Fail(format!(
                        "depth-{n} back-translation terminated but the target plug goes wrong"
                    )),
                    Observation::Timeout { .. } => DirectionResult::Inconclusive(format!(
                        "depth-{n} back-translation terminated; target plug ran out of fuel"
                    )),
                }
            } else {
                DirectionResult::Vacuous
            };
            imprecise.push((n, r));
        }

        records.push(BacktransCaseRecord {
            id: i as u32,
            ctx: crate::print::budget_display(ctx),
            ty: ty.to_string(),
            target_obs,
            precise,
            imprecise,
        });
    }

    let mut report = BacktransReport {
        cases: records,
        precise_pass: 0,
        precise_vacuous: 0,
        precise_fail: 0,
        imprecise_pass: 0,
        imprecise_vacuous: 0,
        imprecise_fail: 0,
        inconclusive: 0,
    };
    for c in &report.cases {
        match &c.precise {
            DirectionResult::Pass => report.precise_pass += 1,
            DirectionResult::Vacuous => report.precise_vacuous += 1,
            DirectionResult::Fail(_) => report.precise_fail += 1,
            DirectionResult::Inconclusive(_) => report.inconclusive += 1,
        }
        for (_, r) in &c.imprecise {
            match r {
                DirectionResult::Pass => report.imprecise_pass += 1,
                DirectionResult::Vacuous => report.imprecise_vacuous += 1,
                DirectionResult::Fail(_) => report.imprecise_fail += 1,
                DirectionResult::Inconclusive(_) => report.inconclusive += 1,
            }
        }
    }
    Ok(report)
}

// ---------------------------------------------------------------------------
// Modularity check
// ---------------------------------------------------------------------------

/// Checks that compiling two linked components as a whole program is
/// indistinguishable from compiling them separately and linking in the
/// target, over the generated context corpus.
#[allow(clippy::too_many_arguments)]
pub fn modularity_check(
    t1: &SrcTerm,
    ty1d: &SrcType,
    ty1c: &SrcType,
    t2: &SrcTerm,
    ty2d: &SrcType,
    ty2c: &SrcType,
    cfg: &GenConfig,
) -> Result<(EquivVerdict, TestReport), HarnessError> {
    let linked_src = link_src(t1, ty1d, ty1c, ty2d, ty2c, t2)?;
    let pair_ty = SrcType::prod(
        SrcType::arrow(ty1d.clone(), ty1c.clone()),
        SrcType::arrow(ty2d.clone(), ty2c.clone()),
    );
    let whole = compile(&linked_src, &pair_ty)?;
    let m1 = compile_modular(t1, ty1d, ty1c, crate::ctx::LINK_VAR_2, ty2d, ty2c)?;
    let m2 = compile_modular(t2, ty2d, ty2c, crate::ctx::LINK_VAR_1, ty1d, ty1c)?;
    let linked_tgt = link_tgt(&m1, &m2)?;
    Ok(equiv_check_tgt(&whole, &linked_tgt, cfg))
}

/// Spawns `f` on a thread with a large stack. Deeply nested generated terms
/// (back-translations at depths in the thousands) need more than the
/// default stack to drop.
pub fn with_large_stack<T: Send + 'static>(f: impl FnOnce() -> T + Send + 'static) -> T {
    std::thread::Builder::new()
        .stack_size(512 * 1024 * 1024)
        .spawn(f)
        .expect("spawn worker")
        .join()
        .expect("worker panicked")
}
