//! A toy partial-recursive code language with oracle queries.
//!
//! Evaluation is budgeted and tri-state: a run either produces a value, gets
//! stuck on oracle bits that are not there (`Undecided`), or runs out of
//! budget (`Exhausted`). Value results are stable under larger budgets and
//! oracle extensions because control flow never proceeds past a missing bit.
//!
//! Values and code indices are big naturals: Cantor-pair based indices grow
//! past u64 as soon as codes nest. `Pair` and `Succ` are unit-cost, so index
//! arithmetic on large codes (the diagonal `h`, the appendix gadgets) stays
//! cheap, while `PrimRec`/`BoundedMu` recursion is paid per iteration.
//!
//! The canonical Goedel numbering is documented in `docs/numbering.md`:
//! `index(e) = pair(tag, payload)` with tags Const=0, Proj=1, Succ=2,
//! Compose=3, Pair=4, PrimRec=5, BoundedMu=6, Query=7, Apply=8, TPred=9.

use crate::pairing::{bpair, bseq_decode, bseq_encode, bunpair, nat, nat_to_u64, Nat};
use num_traits::{One, Zero};
use std::collections::{BTreeMap, BTreeSet};

#[derive(Debug, thiserror::Error)]
pub enum OracleError {
    #[error("malformed code: {0}")]
    Malformed(String),
    #[error("arity mismatch: {0}")]
    Arity(String),
}

pub type Result<T> = std::result::Result<T, OracleError>;

/// Expression tree for a partial recursive function with oracle queries.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum MachineCode {
    Const(Nat),
    Proj(u64),
    /// Successor of a subexpression.
    Succ(Box<MachineCode>),
    /// `f(g_0(env), .., g_{k-1}(env))`.
    Compose(Box<MachineCode>, Vec<MachineCode>),
    /// Cantor pair of two subresults (unit cost).
    Pair(Box<MachineCode>, Box<MachineCode>),
    /// Primitive recursion on argument 0:
    /// `f(0, rest) = base(rest)`, `f(n+1, rest) = step(n, f(n, rest), rest)`.
    PrimRec {
        base: Box<MachineCode>,
        step: Box<MachineCode>,
    },
    /// Least `x < bound(env)` with `body(x, env) = 0`, else `bound(env)`.
    BoundedMu {
        bound: Box<MachineCode>,
        body: Box<MachineCode>,
    },
    /// Oracle lookup at a computed index.
    Query(Box<MachineCode>),
    /// Evaluate the code whose index `func` computes, on computed arguments.
    Apply {
        func: Box<MachineCode>,
        args: Vec<MachineCode>,
    },
    /// Kleene T: 1 if the third argument codes a complete halting trace of
    /// code-index `e` on input `x` consistent with the ambient oracle.
    TPred {
        e: Box<MachineCode>,
        x: Box<MachineCode>,
        t: Box<MachineCode>,
    },
}

impl MachineCode {
    pub fn cnat(n: u64) -> Self {
        MachineCode::Const(nat(n))
    }
}

/// Finite partial oracle: index -> value.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct PartialOracle {
    entries: BTreeMap<Nat, Nat>,
}

impl PartialOracle {
    pub fn empty() -> Self {
        Self::default()
    }

    pub fn from_pairs(pairs: impl IntoIterator<Item = (u64, u64)>) -> Self {
        PartialOracle {
            entries: pairs.into_iter().map(|(k, v)| (nat(k), nat(v))).collect(),
        }
    }

    pub fn from_nat_pairs(pairs: impl IntoIterator<Item = (Nat, Nat)>) -> Self {
        PartialOracle {
            entries: pairs.into_iter().collect(),
        }
    }

    /// Characteristic-function oracle of a set restricted to `universe`.
    pub fn from_set(members: &BTreeSet<u64>, universe: u64) -> Self {
        PartialOracle {
            entries: (0..universe)
                .map(|i| (nat(i), nat(u64::from(members.contains(&i)))))
                .collect(),
        }
    }

    pub fn get(&self, idx: &Nat) -> Option<&Nat> {
        self.entries.get(idx)
    }

    pub fn insert(&mut self, idx: Nat, val: Nat) {
        self.entries.insert(idx, val);
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn extends(&self, other: &PartialOracle) -> bool {
        other
            .entries
            .iter()
            .all(|(k, v)| self.entries.get(k) == Some(v))
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Nat, &Nat)> {
        self.entries.iter()
    }
}

/// Tri-state outcome of a budgeted evaluation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum EvalResult {
    Value(Nat),
    /// Stuck on these missing oracle indices (at least one).
    Undecided(BTreeSet<Nat>),
    Exhausted,
}

impl EvalResult {
    pub fn value(&self) -> Option<&Nat> {
        match self {
            EvalResult::Value(v) => Some(v),
            _ => None,
        }
    }

    pub fn value_u64(&self) -> Option<u64> {
        self.value().and_then(nat_to_u64)
    }

    pub fn is_value(&self, n: u64) -> bool {
        self.value_u64() == Some(n)
    }
}

struct EvalCtx<'a> {
    oracle: &'a PartialOracle,
    budget: u64,
    query_log: Vec<(Nat, Nat)>,
}

enum Step {
    Val(Nat),
    Undecided(BTreeSet<Nat>),
    Exhausted,
    Malformed,
}

impl<'a> EvalCtx<'a> {
    fn charge(&mut self) -> bool {
        if self.budget == 0 {
            return false;
        }
        self.budget -= 1;
        true
    }

    fn eval(&mut self, code: &MachineCode, env: &[Nat]) -> Step {
        if !self.charge() {
            return Step::Exhausted;
        }
        macro_rules! get {
            ($e:expr) => {
                match self.eval($e, env) {
                    Step::Val(v) => v,
                    other => return other,
                }
            };
        }
        match code {
            MachineCode::Const(n) => Step::Val(n.clone()),
            MachineCode::Proj(i) => match env.get(*i as usize) {
                Some(v) => Step::Val(v.clone()),
                None => Step::Malformed,
            },
            MachineCode::Succ(e) => Step::Val(get!(e) + 1u32),
            MachineCode::Compose(f, gs) => {
                let mut vals = Vec::with_capacity(gs.len());
                for g in gs {
                    vals.push(get!(g));
                }
                self.eval(f, &vals)
            }
            MachineCode::Pair(a, b) => {
                let x = get!(a);
                let y = get!(b);
                Step::Val(bpair(&x, &y))
            }
            MachineCode::PrimRec { base, step } => {
                let Some((n, rest)) = env.split_first() else {
                    return Step::Malformed;
                };
                let mut acc = match self.eval(base, rest) {
                    Step::Val(v) => v,
                    other => return other,
                };
                let mut k = Nat::zero();
                while k < *n {
                    if !self.charge() {
                        return Step::Exhausted;
                    }
                    let mut senv = Vec::with_capacity(rest.len() + 2);
                    senv.push(k.clone());
                    senv.push(acc);
                    senv.extend_from_slice(rest);
                    acc = match self.eval(step, &senv) {
                        Step::Val(v) => v,
                        other => return other,
                    };
                    k += 1u32;
                }
                Step::Val(acc)
            }
            MachineCode::BoundedMu { bound, body } => {
                let b = get!(bound);
                let mut x = Nat::zero();
                while x < b {
                    if !self.charge() {
                        return Step::Exhausted;
                    }
                    let mut benv = Vec::with_capacity(env.len() + 1);
                    benv.push(x.clone());
                    benv.extend_from_slice(env);
                    match self.eval(body, &benv) {
                        Step::Val(v) if v.is_zero() => return Step::Val(x),
                        Step::Val(_) => {}
                        other => return other,
                    }
                    x += 1u32;
                }
                Step::Val(b)
            }
            MachineCode::Query(e) => {
                let idx = get!(e);
                match self.oracle.get(&idx) {
                    Some(v) => {
                        self.query_log.push((idx, v.clone()));
                        Step::Val(v.clone())
                    }
                    None => Step::Undecided(BTreeSet::from([idx])),
                }
            }
            MachineCode::Apply { func, args } => {
                let fidx = get!(func);
                let mut vals = Vec::with_capacity(args.len());
                for a in args {
                    vals.push(get!(a));
                }
                match decode(&fidx) {
                    Some(inner) => self.eval(&inner, &vals),
                    None => Step::Malformed,
                }
            }
            MachineCode::TPred { e, x, t } => {
                let ev = get!(e);
                let xv = get!(x);
                let tv = get!(t);
                match t_predicate_ex(&ev, &xv, &tv, self.oracle) {
                    TraceCheck::Valid => Step::Val(Nat::one()),
                    TraceCheck::Invalid => Step::Val(Nat::zero()),
                    TraceCheck::Undecided(miss) => Step::Undecided(miss),
                }
            }
        }
    }
}

/// Deterministic big-step evaluation of `code` on `args` under a partial
/// oracle, with every constructor application costing one budget unit.
/// Malformed codes (bad projections, undecodable Apply targets) evaluate to
/// `Exhausted`; keeping evaluation total makes `Apply` safe on arbitrary
/// decoded indices.
pub fn eval(code: &MachineCode, args: &[Nat], oracle: &PartialOracle, budget: u64) -> EvalResult {
    assert!(budget >= 1, "budget must be >= 1");
    let mut ctx = EvalCtx {
        oracle,
        budget,
        query_log: Vec::new(),
    };
    match ctx.eval(code, args) {
        Step::Val(v) => EvalResult::Value(v),
        Step::Undecided(m) => EvalResult::Undecided(m),
        Step::Exhausted | Step::Malformed => EvalResult::Exhausted,
    }
}

/// [`eval`] on small arguments.
pub fn eval_u64(code: &MachineCode, args: &[u64], oracle: &PartialOracle, budget: u64) -> EvalResult {
    let env: Vec<Nat> = args.iter().map(|&a| nat(a)).collect();
    eval(code, &env, oracle, budget)
}

/// Like [`eval`] but also returns the canonical trace code on success.
pub fn eval_traced(
    code: &MachineCode,
    args: &[Nat],
    oracle: &PartialOracle,
    budget: u64,
) -> (EvalResult, Option<Nat>) {
    let mut ctx = EvalCtx {
        oracle,
        budget,
        query_log: Vec::new(),
    };
    match ctx.eval(code, args) {
        Step::Val(v) => {
            let steps = budget - ctx.budget;
            let tr = encode_trace(&v, steps, &ctx.query_log);
            (EvalResult::Value(v), Some(tr))
        }
        Step::Undecided(m) => (EvalResult::Undecided(m), None),
        Step::Exhausted | Step::Malformed => (EvalResult::Exhausted, None),
    }
}

// ---------------------------------------------------------------------------
// Goedel numbering

pub const TAG_CONST: u64 = 0;
pub const TAG_PROJ: u64 = 1;
pub const TAG_SUCC: u64 = 2;
pub const TAG_COMPOSE: u64 = 3;
pub const TAG_PAIR: u64 = 4;
pub const TAG_PRIMREC: u64 = 5;
pub const TAG_MU: u64 = 6;
pub const TAG_QUERY: u64 = 7;
pub const TAG_APPLY: u64 = 8;
pub const TAG_TPRED: u64 = 9;

fn tag(t: u64, payload: Nat) -> Nat {
    bpair(&nat(t), &payload)
}

/// The canonical index of a code.
pub fn index(code: &MachineCode) -> Nat {
    match code {
        MachineCode::Const(n) => tag(TAG_CONST, n.clone()),
        MachineCode::Proj(i) => tag(TAG_PROJ, nat(*i)),
        MachineCode::Succ(e) => tag(TAG_SUCC, index(e)),
        MachineCode::Compose(f, gs) => {
            let list = bseq_encode(&gs.iter().map(index).collect::<Vec<_>>());
            tag(TAG_COMPOSE, bpair(&index(f), &list))
        }
        MachineCode::Pair(a, b) => tag(TAG_PAIR, bpair(&index(a), &index(b))),
        MachineCode::PrimRec { base, step } => {
            tag(TAG_PRIMREC, bpair(&index(base), &index(step)))
        }
        MachineCode::BoundedMu { bound, body } => {
            tag(TAG_MU, bpair(&index(bound), &index(body)))
        }
        MachineCode::Query(e) => tag(TAG_QUERY, index(e)),
        MachineCode::Apply { func, args } => {
            let list = bseq_encode(&args.iter().map(index).collect::<Vec<_>>());
            tag(TAG_APPLY, bpair(&index(func), &list))
        }
        MachineCode::TPred { e, x, t } => tag(
            TAG_TPRED,
            bpair(&index(e), &bpair(&index(x), &index(t))),
        ),
    }
}

/// Decode an index back into a code. Returns None on tags > 9.
pub fn decode(idx: &Nat) -> Option<MachineCode> {
    let (tagn, payload) = bunpair(idx);
    let tagn = nat_to_u64(&tagn)?;
    Some(match tagn {
        TAG_CONST => MachineCode::Const(payload),
        TAG_PROJ => MachineCode::Proj(nat_to_u64(&payload)?),
        TAG_SUCC => MachineCode::Succ(Box::new(decode(&payload)?)),
        TAG_COMPOSE => {
            let (f, list) = bunpair(&payload);
            let gs = bseq_decode(&list)
                .iter()
                .map(decode)
                .collect::<Option<Vec<_>>>()?;
            MachineCode::Compose(Box::new(decode(&f)?), gs)
        }
        TAG_PAIR => {
            let (a, b) = bunpair(&payload);
            MachineCode::Pair(Box::new(decode(&a)?), Box::new(decode(&b)?))
        }
        TAG_PRIMREC => {
            let (b, s) = bunpair(&payload);
            MachineCode::PrimRec {
                base: Box::new(decode(&b)?),
                step: Box::new(decode(&s)?),
            }
        }
        TAG_MU => {
            let (b, s) = bunpair(&payload);
            MachineCode::BoundedMu {
                bound: Box::new(decode(&b)?),
                body: Box::new(decode(&s)?),
            }
        }
        TAG_QUERY => MachineCode::Query(Box::new(decode(&payload)?)),
        TAG_APPLY => {
            let (f, list) = bunpair(&payload);
            let args = bseq_decode(&list)
                .iter()
                .map(decode)
                .collect::<Option<Vec<_>>>()?;
            MachineCode::Apply {
                func: Box::new(decode(&f)?),
                args,
            }
        }
        TAG_TPRED => {
            let (e, rest) = bunpair(&payload);
            let (x, t) = bunpair(&rest);
            MachineCode::TPred {
                e: Box::new(decode(&e)?),
                x: Box::new(decode(&x)?),
                t: Box::new(decode(&t)?),
            }
        }
        _ => return None,
    })
}

// ---------------------------------------------------------------------------
// s-m-n and the fixed point construction

/// Specialize the first `fixed.len()` arguments of `e`, leaving `rest_arity`
/// open arguments.
pub fn smn(e: &MachineCode, fixed: &[Nat], rest_arity: usize) -> MachineCode {
    let mut gs: Vec<MachineCode> = fixed
        .iter()
        .map(|n| MachineCode::Const(n.clone()))
        .collect();
    gs.extend((0..rest_arity as u64).map(MachineCode::Proj));
    MachineCode::Compose(Box::new(e.clone()), gs)
}

/// The diagonal `h(m) = index of (n ↦ {{m}^X(m)}^X(n))`, at the meta level.
pub fn diag(m: &Nat) -> MachineCode {
    MachineCode::Apply {
        func: Box::new(MachineCode::Apply {
            func: Box::new(MachineCode::Const(m.clone())),
            args: vec![MachineCode::Const(m.clone())],
        }),
        args: vec![MachineCode::Proj(0)],
    }
}

pub fn diag_index(m: &Nat) -> Nat {
    index(&diag(m))
}

/// Kleene fixed point: a code `e` with
/// `eval(e, [n], X) ≃ eval(decode(eval(k, [index(e)], X)), [n], X)`.
///
/// Follows the diagonal construction: `m* = index(k ∘ h)` for the in-language
/// diagonal `h`, and `e = decode(h(m*)) = diag(m*)`.
pub fn fixed_point(k: &MachineCode) -> MachineCode {
    let h = gadgets::diag_code();
    let m_star = index(&MachineCode::Compose(Box::new(k.clone()), vec![h]));
    diag(&m_star)
}

// ---------------------------------------------------------------------------
// Traces, the T predicate, and the Turing jump

/// Canonical trace code: `pair(value, pair(steps, seq of query pairs))`.
pub fn encode_trace(value: &Nat, steps: u64, queries: &[(Nat, Nat)]) -> Nat {
    let qcodes: Vec<Nat> = queries.iter().map(|(i, v)| bpair(i, v)).collect();
    bpair(value, &bpair(&nat(steps), &bseq_encode(&qcodes)))
}

pub fn decode_trace(t: &Nat) -> (Nat, Nat, Vec<(Nat, Nat)>) {
    let (value, rest) = bunpair(t);
    let (steps, qlist) = bunpair(&rest);
    let queries = bseq_decode(&qlist).iter().map(bunpair).collect();
    (value, steps, queries)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TraceCheck {
    Valid,
    Invalid,
    /// Validation touched oracle bits `X` does not have.
    Undecided(BTreeSet<Nat>),
}

/// Full tri-state trace validation: `t` must replay to a halting run of
/// `decode(e)` on `[x]` whose value, step count and query log match `t`'s
/// claims, and every claimed query answer must agree with `oracle`.
pub fn t_predicate_ex(e: &Nat, x: &Nat, t: &Nat, oracle: &PartialOracle) -> TraceCheck {
    let Some(code) = decode(e) else {
        return TraceCheck::Invalid;
    };
    let (value, steps, queries) = decode_trace(t);
    let Some(steps) = nat_to_u64(&steps) else {
        return TraceCheck::Invalid;
    };
    if steps == 0 || steps > 1_000_000 {
        return TraceCheck::Invalid;
    }
    // Replay against the trace's own claimed answers.
    let claimed = PartialOracle::from_nat_pairs(queries.iter().cloned());
    if claimed.len() != queries.iter().map(|(i, _)| i).collect::<BTreeSet<_>>().len() {
        return TraceCheck::Invalid;
    }
    let (res, recorded) = eval_traced(&code, std::slice::from_ref(x), &claimed, steps);
    let ok = match (&res, recorded) {
        (EvalResult::Value(v), Some(tr)) => *v == value && tr == *t,
        _ => false,
    };
    if !ok {
        return TraceCheck::Invalid;
    }
    // The replay is internally consistent; now compare claims with the real
    // partial oracle.
    let mut missing = BTreeSet::new();
    for (i, v) in &queries {
        match oracle.get(i) {
            Some(w) if w == v => {}
            Some(_) => return TraceCheck::Invalid,
            None => {
                missing.insert(i.clone());
            }
        }
    }
    if missing.is_empty() {
        TraceCheck::Valid
    } else {
        TraceCheck::Undecided(missing)
    }
}

/// Boolean view of the T predicate (bits missing from the oracle count as
/// "does not validate").
pub fn t_predicate(e: &Nat, x: &Nat, t: &Nat, oracle: &PartialOracle) -> bool {
    t_predicate_ex(e, x, t, oracle) == TraceCheck::Valid
}

/// Tri-state answer of a bounded jump query.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TriAnswer {
    Yes,
    NoWithinBudget,
    Undecided(BTreeSet<Nat>),
}

/// Bounded membership in the Turing jump of `oracle`: search trace codes
/// `t < budget` validating a halting run of `{x}^X(x)`.
pub fn tj_member(x: &Nat, oracle: &PartialOracle, budget: u64) -> TriAnswer {
    let mut missing = BTreeSet::new();
    let mut t = Nat::zero();
    let bound = nat(budget);
    while t < bound {
        match t_predicate_ex(x, x, &t, oracle) {
            TraceCheck::Valid => return TriAnswer::Yes,
            TraceCheck::Invalid => {}
            TraceCheck::Undecided(m) => missing.extend(m),
        }
        t += 1u32;
    }
    if missing.is_empty() {
        TriAnswer::NoWithinBudget
    } else {
        TriAnswer::Undecided(missing)
    }
}

// ---------------------------------------------------------------------------
// Gadget builders

pub mod gadgets {
    use super::*;

    pub fn c(n: u64) -> MachineCode {
        MachineCode::cnat(n)
    }
    pub fn p(i: u64) -> MachineCode {
        MachineCode::Proj(i)
    }
    pub fn pair2(a: MachineCode, b: MachineCode) -> MachineCode {
        MachineCode::Pair(Box::new(a), Box::new(b))
    }

    /// Binary addition as a code (arity 2). Unary-cost recursion.
    pub fn add() -> MachineCode {
        MachineCode::PrimRec {
            base: Box::new(p(0)),
            step: Box::new(MachineCode::Succ(Box::new(p(1)))),
        }
    }

    /// Binary truncated subtraction `x ∸ y` (arity 2).
    pub fn sub() -> MachineCode {
        let pred = MachineCode::PrimRec {
            base: Box::new(c(0)),
            step: Box::new(p(0)),
        };
        let flipped = MachineCode::PrimRec {
            base: Box::new(p(0)),
            step: Box::new(MachineCode::Compose(Box::new(pred), vec![p(1)])),
        };
        MachineCode::Compose(Box::new(flipped), vec![p(1), p(0)])
    }

    /// Binary multiplication as a code (arity 2).
    pub fn mul() -> MachineCode {
        MachineCode::PrimRec {
            base: Box::new(c(0)),
            step: Box::new(MachineCode::Compose(Box::new(add()), vec![p(1), p(2)])),
        }
    }

    /// `1 ∸ x`: 1 on 0, 0 on positives (arity 1).
    pub fn not() -> MachineCode {
        MachineCode::Compose(Box::new(sub()), vec![c(1), p(0)])
    }

    /// `ite(cond, then, els) = cond·then + (1∸cond)·els` for `cond ∈ {0,1}`.
    /// All three subcodes read the same outer environment.
    pub fn ite(cond: MachineCode, then: MachineCode, els: MachineCode) -> MachineCode {
        MachineCode::Compose(
            Box::new(add()),
            vec![
                MachineCode::Compose(Box::new(mul()), vec![cond.clone(), then]),
                MachineCode::Compose(
                    Box::new(mul()),
                    vec![MachineCode::Compose(Box::new(not()), vec![cond]), els],
                ),
            ],
        )
    }

    /// `eq0(x)`: 1 iff x = 0 (arity 1).
    pub fn eq0() -> MachineCode {
        not()
    }

    /// `triangle(n) = n(n+1)/2` (arity 1), with per-step cost O(k).
    pub fn triangle() -> MachineCode {
        MachineCode::PrimRec {
            base: Box::new(c(0)),
            step: Box::new(MachineCode::Compose(
                Box::new(add()),
                vec![MachineCode::Succ(Box::new(p(0))), p(1)],
            )),
        }
    }

    /// Cantor pairing computed arithmetically (arity 2). The unit-cost
    /// `Pair` constructor is preferred; this exists for codes that must
    /// recompute a pairing from parts.
    pub fn pair_arith() -> MachineCode {
        MachineCode::Compose(
            Box::new(add()),
            vec![
                MachineCode::Compose(
                    Box::new(triangle()),
                    vec![MachineCode::Compose(Box::new(add()), vec![p(0), p(1)])],
                ),
                p(1),
            ],
        )
    }

    /// First Cantor component by bounded search (arity 1; cost grows with
    /// the square of the input, desk-scale only).
    pub fn unpair_left() -> MachineCode {
        component(true)
    }
    /// Second Cantor component.
    pub fn unpair_right() -> MachineCode {
        component(false)
    }

    fn component(left: bool) -> MachineCode {
        // search x <= z for which some y <= z has pair(x, y) == z
        let bound = MachineCode::Succ(Box::new(p(0)));
        let (xa, ya) = if left { (1, 0) } else { (0, 1) };
        let inner_eq = {
            let pxy = MachineCode::Compose(Box::new(pair_arith()), vec![p(xa), p(ya)]);
            let d1 = MachineCode::Compose(Box::new(sub()), vec![pxy.clone(), p(2)]);
            let d2 = MachineCode::Compose(Box::new(sub()), vec![p(2), pxy]);
            MachineCode::Compose(Box::new(add()), vec![d1, d2])
        };
        let mu_y = MachineCode::BoundedMu {
            bound: Box::new(MachineCode::Succ(Box::new(p(1)))),
            body: Box::new(inner_eq),
        };
        let mid = MachineCode::Compose(Box::new(sub()), vec![mu_y, p(1)]);
        MachineCode::BoundedMu {
            bound: Box::new(bound),
            body: Box::new(mid),
        }
    }

    /// The in-language diagonal `h`: arity 1, computes
    /// `index(Apply(Apply(Const(m), [Const(m)]), [Proj(0)]))` from `m`.
    /// Built from unit-cost `Pair`/`Succ` only, so it is fast on huge `m`.
    pub fn diag_code() -> MachineCode {
        // index(Const(m))          = pair(0, m)
        // seq [x]                  = pair(x, 0) + 1
        // index(Apply(f, [a]))     = pair(8, pair(index f, seq [index a]))
        let m = p(0);
        let const_m = pair2(c(TAG_CONST), m);
        let list1 = MachineCode::Succ(Box::new(pair2(const_m.clone(), c(0))));
        let inner = pair2(c(TAG_APPLY), pair2(const_m, list1));
        let list2 = MachineCode::Const(bseq_encode(&[index(&p(0))]));
        pair2(c(TAG_APPLY), pair2(inner, list2))
    }
}

#[cfg(test)]
mod tests {
    use super::gadgets::*;
    use super::*;

    const B: u64 = 200_000;

    fn ev(code: &MachineCode, args: &[u64]) -> EvalResult {
        eval_u64(code, args, &PartialOracle::empty(), B)
    }

    #[test]
    fn eval_basics() {
        assert!(ev(&MachineCode::cnat(7), &[]).is_value(7));
        let q = MachineCode::Query(Box::new(MachineCode::Proj(0)));
        let oracle = PartialOracle::from_pairs([(5, 1)]);
        assert!(eval_u64(&q, &[5], &oracle, 10).is_value(1));
        assert_eq!(
            eval_u64(&q, &[5], &PartialOracle::empty(), 10),
            EvalResult::Undecided(BTreeSet::from([nat(5)]))
        );
    }

    #[test]
    fn arithmetic_gadgets() {
        for (x, y) in [(0, 0), (1, 2), (5, 3), (7, 7)] {
            assert!(ev(&add(), &[x, y]).is_value(x + y));
            assert!(ev(&mul(), &[x, y]).is_value(x * y));
            assert!(ev(&sub(), &[x, y]).is_value(x.saturating_sub(y)));
        }
        assert!(ev(&not(), &[0]).is_value(1));
        assert!(ev(&not(), &[3]).is_value(0));
        assert!(ev(&pair2(p(0), p(1)), &[3, 4]).is_value(crate::pairing::pair(3, 4)));
    }

    #[test]
    fn numbering_round_trips() {
        let corpus = vec![
            MachineCode::cnat(0),
            MachineCode::cnat(42),
            MachineCode::Proj(1),
            add(),
            mul(),
            diag(&nat(9)),
            diag_code(),
            MachineCode::Query(Box::new(MachineCode::Proj(0))),
            MachineCode::TPred {
                e: Box::new(MachineCode::cnat(1)),
                x: Box::new(MachineCode::cnat(2)),
                t: Box::new(MachineCode::Proj(0)),
            },
        ];
        for code in corpus {
            assert_eq!(decode(&index(&code)).as_ref(), Some(&code));
        }
        assert_eq!(index(&MachineCode::cnat(0)), nat(0));
        assert_eq!(index(&MachineCode::Proj(0)), nat(1));
    }

    #[test]
    fn smn_equation() {
        let e = MachineCode::Proj(0);
        let e1 = smn(&e, &[nat(9)], 1);
        assert!(ev(&e1, &[3]).is_value(9));
        let e2 = smn(&add(), &[], 2);
        assert!(ev(&e2, &[4, 5]).is_value(9));
        let e3 = smn(&add(), &[nat(2)], 1);
        for n in [0u64, 1, 5] {
            assert!(ev(&e3, &[n]).is_value(n + 2));
        }
    }

    #[test]
    fn diag_code_matches_meta_diag() {
        let h = diag_code();
        for m in [nat(0), nat(1), nat(7), nat(u64::MAX) * nat(17u64)] {
            assert_eq!(
                eval(&h, &[m.clone()], &PartialOracle::empty(), 500)
                    .value()
                    .cloned(),
                Some(diag_index(&m))
            );
        }
    }

    #[test]
    fn fixed_point_equation() {
        // k = Const(index of Const(3)): e computes 3 everywhere.
        let k = MachineCode::Const(index(&MachineCode::cnat(3)));
        let e = fixed_point(&k);
        for n in 0..3 {
            assert!(ev(&e, &[n]).is_value(3));
        }
        // Tautological instance: k = Proj(0); just check evaluation is safe
        // (it exhausts the budget unwinding itself).
        let e2 = fixed_point(&MachineCode::Proj(0));
        assert_eq!(
            eval_u64(&e2, &[0], &PartialOracle::empty(), 40),
            EvalResult::Exhausted
        );

        // k = constant code of n ↦ n + 2 (built by smn from addition).
        let target = index(&smn(&add(), &[nat(2)], 1));
        let e3 = fixed_point(&MachineCode::Const(target));
        for n in [0u64, 4] {
            assert!(ev(&e3, &[n]).is_value(n + 2));
        }

        // The fixed point equation itself, with an oracle in play.
        let oracle = PartialOracle::from_pairs([(0, 4), (1, 9)]);
        let k4 = MachineCode::Const(index(&MachineCode::Query(Box::new(MachineCode::Proj(0)))));
        let e4 = fixed_point(&k4);
        for n in [0u64, 1] {
            let lhs = eval_u64(&e4, &[n], &oracle, B);
            let kv = eval(&k4, &[index(&e4)], &oracle, B).value().cloned().unwrap();
            let rhs = eval_u64(&decode(&kv).unwrap(), &[n], &oracle, B);
            assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn traces_and_jump() {
        let c0 = MachineCode::cnat(0);
        let (res, tr) = eval_traced(&c0, &[nat(0)], &PartialOracle::empty(), 10);
        assert!(res.is_value(0));
        let tr = tr.unwrap();
        assert!(t_predicate(&index(&c0), &nat(0), &tr, &PartialOracle::empty()));
        assert!(!t_predicate(
            &index(&c0),
            &nat(0),
            &(tr + 1u32),
            &PartialOracle::empty()
        ));
        assert_eq!(
            tj_member(&index(&c0), &PartialOracle::empty(), 100),
            TriAnswer::Yes
        );
    }

    #[test]
    fn trace_with_queries_validates_tristate() {
        let q = MachineCode::Query(Box::new(MachineCode::Proj(0)));
        let oracle = PartialOracle::from_pairs([(5, 1)]);
        let (res, tr) = eval_traced(&q, &[nat(5)], &oracle, 10);
        assert!(res.is_value(1));
        let tr = tr.unwrap();
        let e = index(&q);
        assert!(t_predicate(&e, &nat(5), &tr, &oracle));
        // Against an empty oracle the trace is undecided, not valid.
        assert!(matches!(
            t_predicate_ex(&e, &nat(5), &tr, &PartialOracle::empty()),
            TraceCheck::Undecided(_)
        ));
        // Against a contradicting oracle it is invalid.
        let bad = PartialOracle::from_pairs([(5, 0)]);
        assert_eq!(t_predicate_ex(&e, &nat(5), &tr, &bad), TraceCheck::Invalid);
    }

    #[test]
    fn budget_and_extension_stability() {
        let oracle = PartialOracle::from_pairs([(3, 1)]);
        let bigger = PartialOracle::from_pairs([(3, 1), (4, 0)]);
        let code = MachineCode::Compose(
            Box::new(add()),
            vec![MachineCode::Query(Box::new(c(3))), MachineCode::Proj(0)],
        );
        let mut first_value_budget = None;
        for b in 1..300 {
            match eval_u64(&code, &[5], &oracle, b) {
                EvalResult::Value(v) => {
                    assert_eq!(v, nat(6));
                    first_value_budget.get_or_insert(b);
                    assert!(eval_u64(&code, &[5], &bigger, b).is_value(6));
                }
                EvalResult::Exhausted => assert!(first_value_budget.is_none()),
                EvalResult::Undecided(_) => panic!("query is present"),
            }
        }
        assert!(first_value_budget.is_some());
    }
}
