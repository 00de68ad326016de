//! Sequents, proof systems as rule registries, and lazily generated
//! preproofs: the label of a position is computed by deterministic replay of
//! the generation scheme from the root, with memoization. Mutilation and
//! instantiation of preproofs are label-level views, `den` extracts the
//! associated prequasidendroid, and branch prefixes drive model extraction
//! and the bounded branch-lemma checks.

pub mod formula;
pub mod parser;

use crate::dendroid::{Atom, Prequasidendroid, Seq};
use crate::order::{IncreasingMap, LinearOrder};
use formula::{
    enumerate_terms, least_formula, Formula, NatTerm, OrdTerm, Sort, Vocabulary,
};
use serde::Serialize;
use std::collections::{BTreeSet, HashMap};
use std::sync::{Arc, Mutex};

/// The code used for the `∞` separator in `den` sequences.
pub const INF: u64 = u64::MAX;

#[derive(Debug, thiserror::Error)]
pub enum BetaError {
    #[error("the root sequent must be nonempty")]
    EmptyRoot,
    #[error("root formulas must be closed (no ordinal parameters, no free variables)")]
    OpenRoot,
    #[error("operator template is not positive in X")]
    NotPositive,
    #[error("operator template must have exactly the free slot for its number argument")]
    BadTemplate,
    #[error("conflicting atom on both sides: {0}")]
    BranchInvalid(String),
}

pub type Result<T> = std::result::Result<T, BetaError>;

/// An ordered two-sided sequent; duplicates allowed, positions matter.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Sequent {
    pub ante: Vec<Formula>,
    pub succ: Vec<Formula>,
}

impl Sequent {
    pub fn contains(&self, f: &Formula) -> bool {
        self.ante.contains(f) || self.succ.contains(f)
    }

    pub fn occ_set(&self) -> BTreeSet<u64> {
        let mut s = BTreeSet::new();
        for f in self.ante.iter().chain(&self.succ) {
            f.occ(&mut s);
        }
        s
    }

    pub fn relabel_params(&self, f: &dyn Fn(u64) -> Option<u64>) -> Option<Sequent> {
        Some(Sequent {
            ante: self
                .ante
                .iter()
                .map(|x| x.relabel_params(f))
                .collect::<Option<_>>()?,
            succ: self
                .succ
                .iter()
                .map(|x| x.relabel_params(f))
                .collect::<Option<_>>()?,
        })
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "ante": self.ante.iter().map(formula::render).collect::<Vec<_>>(),
            "succ": self.succ.iter().map(formula::render).collect::<Vec<_>>(),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Side {
    Ante,
    Succ,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Phase {
    Initial,
    Interim,
    Last,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum AxiomKind {
    /// A formula occurs on both sides.
    Id,
    /// A true `ζ ≤ ξ` in the succedent.
    OrdLeTrue,
    /// A false `ζ ≤ ξ` in the antecedent.
    OrdLeFalse,
    /// A closed true equation in the succedent.
    EqTrue,
    /// A closed false equation in the antecedent.
    EqFalse,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Rule {
    Axiom(AxiomKind),
    Cut,
    /// Structural duplication (the no-fresh-formula fallback; unreachable
    /// with the default enumeration cap).
    Dup,
    AndR,
    OrR,
    NotR,
    ImpR,
    AndL,
    OrL,
    NotL,
    ImpL,
    AllTauR,
    ExTauR,
    AllTauL,
    ExTauL,
    AllOrdR,
    ExOrdR,
    AllOrdL,
    ExOrdL,
    AllNatR,
    ExNatR,
    AllNatL,
    ExNatL,
    IPhiR,
    IBarR,
    IPhiL,
    IBarL,
}

impl Rule {
    pub fn name(&self) -> String {
        match self {
            Rule::Axiom(k) => format!("Axiom:{k:?}"),
            other => format!("{other:?}"),
        }
    }
}

/// An operator template `P(X, x)`: a formula with `OpVar` occurrences and a
/// single Nat binder for `x`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OperatorTemplate {
    body: Formula,
}

impl OperatorTemplate {
    /// `body` has de Bruijn `Bound(0)` (Nat) for the number argument and may
    /// mention `X(·)`. Must be positive in `X`.
    pub fn new(body: Formula) -> Result<Self> {
        if !body.opvar_positive() {
            return Err(BetaError::NotPositive);
        }
        if !body.occ_set().is_empty() || !body.free_vars().is_empty() {
            return Err(BetaError::BadTemplate);
        }
        Ok(OperatorTemplate { body })
    }

    /// `P(I_Φ(ξ̄, ·), t)`.
    pub fn at_stage(&self, xi: u64, t: &NatTerm) -> Formula {
        self.body.instantiate_nat(t).subst_opvar_iphi(&OrdTerm::Param(xi))
    }

    /// `P(Ī_Φ(·), t)`.
    pub fn at_fixpoint(&self, t: &NatTerm) -> Formula {
        self.body.instantiate_nat(t).subst_opvar_ibar()
    }

    /// Evaluate `P(S, n)` over an explicit finite-stage set (the brute-force
    /// oracle for the desk-scale operators: quantifier-free or bounded
    /// templates only evaluate the `X` membership and arithmetic).
    pub fn eval_on_set(&self, set: &BTreeSet<u64>, n: u64) -> Option<bool> {
        fn ev(f: &Formula, set: &BTreeSet<u64>) -> Option<bool> {
            Some(match f {
                Formula::Eq(a, b) => a.value()? == b.value()?,
                Formula::OpVar(t) => set.contains(&t.value()?),
                Formula::And(a, b) => ev(a, set)? && ev(b, set)?,
                Formula::Or(a, b) => ev(a, set)? || ev(b, set)?,
                Formula::Imp(a, b) => !ev(a, set)? || ev(b, set)?,
                Formula::Not(a) => !ev(a, set)?,
                _ => return None,
            })
        }
        ev(&self.body.instantiate_nat(&NatTerm::numeral(n)), set)
    }

    pub fn body(&self) -> &Formula {
        &self.body
    }
}

/// Toy operator templates used across the test suites.
pub mod operators {
    use super::*;

    /// `P(X, x) ≡ x = x`: the full operator, Φ(X) = ℕ.
    pub fn full() -> OperatorTemplate {
        OperatorTemplate::new(Formula::Eq(NatTerm::Bound(0), NatTerm::Bound(0))).unwrap()
    }

    /// `P(X, x) ≡ X(x)`: Φ(X) = X, least fixpoint ∅.
    pub fn identity() -> OperatorTemplate {
        OperatorTemplate::new(Formula::OpVar(NatTerm::Bound(0))).unwrap()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SystemId {
    Lk,
    LkInductive(OperatorTemplate),
}

impl SystemId {
    fn vocab(&self) -> Vocabulary {
        match self {
            SystemId::Lk => Vocabulary::lk(),
            SystemId::LkInductive(_) => Vocabulary::inductive(),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            SystemId::Lk => "lk",
            SystemId::LkInductive(_) => "lk+inductive",
        }
    }
}

/// The public label of a preproof node.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProofNode {
    pub rule: Rule,
    pub sequent: Sequent,
    pub level: u64,
    /// Where the dagger sits in `sequent`.
    pub dagger: (Side, usize),
    pub stage: u64,
    pub phase: Phase,
    /// The designated parameter set 𝒳, sorted in the ambient order.
    pub params: Vec<u64>,
    /// 𝒳 of every conclusion below this node, index = level (own set last).
    pub conclusion_params: Vec<Vec<u64>>,
    /// Portion-internal node (the forced Cut inside the I_Φ/Ī_Φ portions).
    pub intermediate: bool,
}

impl ProofNode {
    pub fn to_json(&self, position: &[Atom]) -> serde_json::Value {
        serde_json::json!({
            "position": position.iter().map(|a| match a {
                Atom::Term(t) if *t == INF => serde_json::json!({"t": "inf"}),
                Atom::Term(t) => serde_json::json!({"t": t}),
                Atom::Param(p) => serde_json::json!({"p": p}),
            }).collect::<Vec<_>>(),
            "rule": self.rule.name(),
            "sequent": self.sequent.to_json(),
            "level": self.level,
            "stage": self.stage,
            "phase": self.phase,
            "params": self.params,
        })
    }

    pub fn dagger_formula(&self) -> Option<&Formula> {
        match self.dagger.0 {
            Side::Ante => self.sequent.ante.get(self.dagger.1),
            Side::Succ => self.sequent.succ.get(self.dagger.1),
        }
    }
}

/// Travel bookkeeping of a portion conclusion.
#[derive(Debug, Clone, Copy)]
struct TravelOrigin {
    side: Side,
    idx: usize,
    dlen: usize,
    stage: u64,
}

fn phase_of(side: Side, idx: usize) -> Phase {
    match side {
        Side::Succ => Phase::Initial,
        Side::Ante => {
            if idx == 0 {
                Phase::Last
            } else {
                Phase::Interim
            }
        }
    }
}

/// The dagger-advance and stage-update rules, from a portion conclusion to a
/// hypothesis with `child_glen`/`child_dlen` formulas at `child_level`.
fn advance(
    origin: TravelOrigin,
    child_glen: usize,
    child_dlen: usize,
    child_level: u64,
) -> ((Side, usize), u64, Phase) {
    match origin.side {
        Side::Succ => {
            if origin.idx + 1 < origin.dlen {
                // continue rightwards through the old succedent; new formulas
                // were prepended, shifting old positions.
                let dnew = child_dlen - origin.dlen;
                let idx = dnew + origin.idx + 1;
                ((Side::Succ, idx), origin.stage, Phase::Initial)
            } else if child_glen > 0 {
                let idx = child_glen - 1;
                ((Side::Ante, idx), origin.stage, phase_of(Side::Ante, idx))
            } else {
                // Degenerate travel: the antecedent is empty, so no last
                // phase happened; the stage number is unchanged.
                ((Side::Succ, 0), origin.stage, Phase::Initial)
            }
        }
        Side::Ante => {
            if origin.idx > 0 {
                let idx = origin.idx - 1;
                ((Side::Ante, idx), origin.stage, phase_of(Side::Ante, idx))
            } else {
                // Turnaround at the last stage phase: the stage number drops
                // by one, or jumps to the hypothesis level from zero.
                let stage = if origin.stage > 0 {
                    origin.stage - 1
                } else {
                    child_level
                };
                if child_dlen > 0 {
                    ((Side::Succ, 0), stage, Phase::Initial)
                } else {
                    let idx = child_glen - 1;
                    ((Side::Ante, idx), stage, phase_of(Side::Ante, idx))
                }
            }
        }
    }
}

/// Seed of a not-yet-built child node.
#[derive(Debug, Clone)]
struct ChildSeed {
    sequent: Sequent,
    /// 𝒳 of the child (sorted by the ambient order).
    params: Vec<u64>,
    kind: SeedKind,
}

#[derive(Debug, Clone)]
enum SeedKind {
    /// Ordinary portion hypothesis: dagger advances from `origin`.
    Travel(TravelOrigin),
    /// Portion-internal Cut conclusion: carries the conclusion dagger
    /// (shifted to its own sequent) and expands into the C-split.
    Intermediate {
        origin: TravelOrigin,
        dagger: (Side, usize),
    },
}

#[derive(Debug, Clone)]
enum OrdCase {
    AllOrdR { body: Formula },
    ExOrdL { body: Formula },
    IPhiL { t: NatTerm, xi: u64 },
    IBarL { t: NatTerm },
}

#[derive(Debug, Clone)]
enum NatCase {
    AllNatR { body: Formula },
    ExNatL { body: Formula },
}

#[derive(Debug, Clone)]
enum Expansion {
    Closed,
    Fixed(Vec<ChildSeed>),
    OrdIndexed(OrdCase),
    NatIndexed(NatCase),
}

struct NodeState {
    node: ProofNode,
    expansion: Expansion,
}

pub struct GeneratedPreproof {
    system: SystemId,
    root: Sequent,
    alpha: LinearOrder,
    memo: Mutex<HashMap<Seq, Option<Arc<NodeState>>>>,
}

impl GeneratedPreproof {
    fn axiom_of(&self, s: &Sequent) -> Option<AxiomKind> {
        if s.ante.iter().any(|f| s.succ.contains(f)) {
            return Some(AxiomKind::Id);
        }
        for f in &s.succ {
            if let Formula::LeOrd(OrdTerm::Param(a), OrdTerm::Param(b)) = f {
                if self.alpha.le(*a, *b) {
                    return Some(AxiomKind::OrdLeTrue);
                }
            }
        }
        for f in &s.ante {
            if let Formula::LeOrd(OrdTerm::Param(a), OrdTerm::Param(b)) = f {
                if self.alpha.lt(*b, *a) {
                    return Some(AxiomKind::OrdLeFalse);
                }
            }
        }
        if matches!(self.system, SystemId::LkInductive(_)) {
            for f in &s.succ {
                if let Formula::Eq(a, b) = f {
                    if let (Some(x), Some(y)) = (a.value(), b.value()) {
                        if x == y {
                            return Some(AxiomKind::EqTrue);
                        }
                    }
                }
            }
            for f in &s.ante {
                if let Formula::Eq(a, b) = f {
                    if let (Some(x), Some(y)) = (a.value(), b.value()) {
                        if x != y {
                            return Some(AxiomKind::EqFalse);
                        }
                    }
                }
            }
        }
        None
    }

    fn sort_params(&self, set: &BTreeSet<u64>) -> Vec<u64> {
        let mut v: Vec<u64> = set.iter().copied().collect();
        v.sort_by(|&a, &b| self.alpha.cmp(a, b));
        v
    }

    fn least_fresh(&self, stage_params: &[u64], s: &Sequent) -> Option<Formula> {
        least_formula(stage_params, self.system.vocab(), |f| !s.contains(f))
    }

    /// Build a full node from a seed.
    fn build(&self, seed: ChildSeed, parent: &ProofNode) -> NodeState {
        let level = parent.level + 1;
        let mut conclusion_params = parent.conclusion_params.clone();
        conclusion_params.push(seed.params.clone());
        match seed.kind {
            SeedKind::Travel(origin) => {
                let (dagger, stage, phase) = advance(
                    origin,
                    seed.sequent.ante.len(),
                    seed.sequent.succ.len(),
                    level,
                );
                let mut node = ProofNode {
                    rule: Rule::Dup, // placeholder; fixed below
                    sequent: seed.sequent,
                    level,
                    dagger,
                    stage,
                    phase,
                    params: seed.params,
                    conclusion_params,
                    intermediate: false,
                };
                let (rule, expansion) = self.expand(&node);
                node.rule = rule;
                NodeState {
                    node,
                    expansion,
                }
            }
            SeedKind::Intermediate { origin, dagger } => {
                // Forced Cut: split on the least fresh formula.
                let c = self
                    .least_fresh(
                        &parent.conclusion_params[parent.stage as usize],
                        &seed.sequent,
                    )
                    .expect("formula enumeration exhausted");
                let mut left = seed.sequent.clone();
                left.succ.insert(0, c.clone());
                let mut right = seed.sequent.clone();
                right.ante.push(c);
                let node = ProofNode {
                    rule: Rule::Cut,
                    sequent: seed.sequent,
                    level,
                    dagger,
                    stage: origin.stage,
                    phase: phase_of(dagger.0, dagger.1),
                    params: seed.params.clone(),
                    conclusion_params,
                    intermediate: true,
                };
                let seeds = vec![
                    ChildSeed {
                        sequent: left,
                        params: seed.params.clone(),
                        kind: SeedKind::Travel(origin),
                    },
                    ChildSeed {
                        sequent: right,
                        params: seed.params,
                        kind: SeedKind::Travel(origin),
                    },
                ];
                NodeState {
                    node,
                    expansion: Expansion::Fixed(seeds),
                }
            }
        }
    }

    /// The case table: compute the rule applied at `node` and its children.
    fn expand(&self, node: &ProofNode) -> (Rule, Expansion) {
        if let Some(kind) = self.axiom_of(&node.sequent) {
            return (Rule::Axiom(kind), Expansion::Closed);
        }
        let (side, idx) = node.dagger;
        let b = node
            .dagger_formula()
            .expect("dagger points at a formula")
            .clone();
        let origin = TravelOrigin {
            side,
            idx,
            dlen: node.sequent.succ.len(),
            stage: node.stage,
        };
        let stage_params = node.conclusion_params[node.stage as usize].clone();
        let inductive = matches!(self.system, SystemId::LkInductive(_));
        let travel = |sequent: Sequent, params: Vec<u64>| ChildSeed {
            sequent,
            params,
            kind: SeedKind::Travel(origin),
        };
        let succ_prepend = |fs: Vec<Formula>| {
            let mut s = node.sequent.clone();
            for f in fs.into_iter().rev() {
                s.succ.insert(0, f);
            }
            s
        };
        let ante_append = |fs: Vec<Formula>| {
            let mut s = node.sequent.clone();
            s.ante.extend(fs);
            s
        };
        let params = node.params.clone();

        match (side, &b) {
            // ----- atomic: the Cut with the least fresh formula -----
            (_, f)
                if f.is_atomic()
                    && !(inductive && matches!(f, Formula::IPhi(..) | Formula::IBar(..))) =>
            {
                match self.least_fresh(&stage_params, &node.sequent) {
                    Some(c) => {
                        let left = succ_prepend(vec![c.clone()]);
                        let right = ante_append(vec![c]);
                        (
                            Rule::Cut,
                            Expansion::Fixed(vec![
                                travel(left, params.clone()),
                                travel(right, params),
                            ]),
                        )
                    }
                    None => (
                        Rule::Dup,
                        Expansion::Fixed(vec![travel(node.sequent.clone(), params)]),
                    ),
                }
            }

            // ----- succedent cases -----
            (Side::Succ, Formula::And(b0, b1)) => (
                Rule::AndR,
                Expansion::Fixed(vec![
                    travel(succ_prepend(vec![(**b0).clone()]), params.clone()),
                    travel(succ_prepend(vec![(**b1).clone()]), params),
                ]),
            ),
            (Side::Succ, Formula::Or(b0, b1)) => (
                Rule::OrR,
                Expansion::Fixed(vec![travel(
                    succ_prepend(vec![(**b0).clone(), (**b1).clone()]),
                    params,
                )]),
            ),
            (Side::Succ, Formula::Not(b0)) => (
                Rule::NotR,
                Expansion::Fixed(vec![travel(ante_append(vec![(**b0).clone()]), params)]),
            ),
            (Side::Succ, Formula::Imp(b0, b1)) => {
                let mut s = ante_append(vec![(**b0).clone()]);
                s.succ.insert(0, (**b1).clone());
                (Rule::ImpR, Expansion::Fixed(vec![travel(s, params)]))
            }
            (Side::Succ, Formula::All(Sort::Nat, b0)) if !inductive => {
                let x = NatTerm::Free(node.level);
                debug_assert!(!node
                    .sequent
                    .ante
                    .iter()
                    .chain(&node.sequent.succ)
                    .any(|f| f.free_vars().contains(&node.level)));
                (
                    Rule::AllTauR,
                    Expansion::Fixed(vec![travel(
                        succ_prepend(vec![b0.instantiate_nat(&x)]),
                        params,
                    )]),
                )
            }
            (Side::Succ, Formula::Ex(Sort::Nat, b0)) if !inductive => {
                let terms = enumerate_terms(node.level as usize + 1, self.system.vocab());
                let fs = terms.iter().map(|t| b0.instantiate_nat(t)).collect();
                (
                    Rule::ExTauR,
                    Expansion::Fixed(vec![travel(succ_prepend(fs), params)]),
                )
            }
            (Side::Succ, Formula::All(Sort::Nat, b0)) => (
                Rule::AllNatR,
                Expansion::NatIndexed(NatCase::AllNatR { body: (**b0).clone() }),
            ),
            (Side::Succ, Formula::Ex(Sort::Nat, b0)) => {
                let fs = (0..node.level)
                    .map(|n| b0.instantiate_nat(&NatTerm::numeral(n)))
                    .collect();
                (
                    Rule::ExNatR,
                    Expansion::Fixed(vec![travel(succ_prepend(fs), params)]),
                )
            }
            (Side::Succ, Formula::All(Sort::Ord, b0)) => (
                Rule::AllOrdR,
                Expansion::OrdIndexed(OrdCase::AllOrdR { body: (**b0).clone() }),
            ),
            (Side::Succ, Formula::Ex(Sort::Ord, b0)) => {
                let fs = stage_params
                    .iter()
                    .map(|&xi| b0.instantiate_ord(&OrdTerm::Param(xi)))
                    .collect();
                (
                    Rule::ExOrdR,
                    Expansion::Fixed(vec![travel(succ_prepend(fs), params)]),
                )
            }
            (Side::Succ, Formula::IPhi(OrdTerm::Param(xi), t)) => {
                let SystemId::LkInductive(p) = &self.system else {
                    unreachable!()
                };
                let fs: Vec<Formula> = stage_params
                    .iter()
                    .filter(|&&a| self.alpha.lt(a, *xi))
                    .map(|&a| p.at_stage(a, t))
                    .collect();
                let stacked = succ_prepend(fs);
                let dagger = (Side::Succ, idx + (stacked.succ.len() - node.sequent.succ.len()));
                (
                    Rule::IPhiR,
                    Expansion::Fixed(vec![ChildSeed {
                        sequent: stacked,
                        params,
                        kind: SeedKind::Intermediate { origin, dagger },
                    }]),
                )
            }
            (Side::Succ, Formula::IBar(t)) => {
                let SystemId::LkInductive(p) = &self.system else {
                    unreachable!()
                };
                let mut fs = vec![p.at_fixpoint(t)];
                fs.extend(stage_params.iter().map(|&a| p.at_stage(a, t)));
                let stacked = succ_prepend(fs);
                let dagger = (Side::Succ, idx + (stacked.succ.len() - node.sequent.succ.len()));
                (
                    Rule::IBarR,
                    Expansion::Fixed(vec![ChildSeed {
                        sequent: stacked,
                        params,
                        kind: SeedKind::Intermediate { origin, dagger },
                    }]),
                )
            }

            // ----- antecedent cases -----
            (Side::Ante, Formula::And(b0, b1)) => (
                Rule::AndL,
                Expansion::Fixed(vec![travel(
                    ante_append(vec![(**b0).clone(), (**b1).clone()]),
                    params,
                )]),
            ),
            (Side::Ante, Formula::Or(b0, b1)) => (
                Rule::OrL,
                Expansion::Fixed(vec![
                    travel(ante_append(vec![(**b0).clone()]), params.clone()),
                    travel(ante_append(vec![(**b1).clone()]), params),
                ]),
            ),
            (Side::Ante, Formula::Not(b0)) => (
                Rule::NotL,
                Expansion::Fixed(vec![travel(succ_prepend(vec![(**b0).clone()]), params)]),
            ),
            (Side::Ante, Formula::Imp(b0, b1)) => (
                // Premises per the →L rule shape: B0 to the succedent on one
                // branch, B1 to the antecedent on the other.
                Rule::ImpL,
                Expansion::Fixed(vec![
                    travel(succ_prepend(vec![(**b0).clone()]), params.clone()),
                    travel(ante_append(vec![(**b1).clone()]), params),
                ]),
            ),
            (Side::Ante, Formula::All(Sort::Nat, b0)) if !inductive => {
                let terms = enumerate_terms(node.level as usize + 1, self.system.vocab());
                let fs = terms.iter().map(|t| b0.instantiate_nat(t)).collect();
                (
                    Rule::AllTauL,
                    Expansion::Fixed(vec![travel(ante_append(fs), params)]),
                )
            }
            (Side::Ante, Formula::Ex(Sort::Nat, b0)) if !inductive => {
                let x = NatTerm::Free(node.level);
                (
                    Rule::ExTauL,
                    Expansion::Fixed(vec![travel(
                        ante_append(vec![b0.instantiate_nat(&x)]),
                        params,
                    )]),
                )
            }
            (Side::Ante, Formula::All(Sort::Nat, b0)) => {
                let fs = (0..node.level)
                    .map(|n| b0.instantiate_nat(&NatTerm::numeral(n)))
                    .collect();
                (
                    Rule::AllNatL,
                    Expansion::Fixed(vec![travel(ante_append(fs), params)]),
                )
            }
            (Side::Ante, Formula::Ex(Sort::Nat, b0)) => (
                Rule::ExNatL,
                Expansion::NatIndexed(NatCase::ExNatL { body: (**b0).clone() }),
            ),
            (Side::Ante, Formula::All(Sort::Ord, b0)) => {
                let fs = stage_params
                    .iter()
                    .map(|&xi| b0.instantiate_ord(&OrdTerm::Param(xi)))
                    .collect();
                (
                    Rule::AllOrdL,
                    Expansion::Fixed(vec![travel(ante_append(fs), params)]),
                )
            }
            (Side::Ante, Formula::Ex(Sort::Ord, b0)) => (
                Rule::ExOrdL,
                Expansion::OrdIndexed(OrdCase::ExOrdL { body: (**b0).clone() }),
            ),
            (Side::Ante, Formula::IPhi(OrdTerm::Param(xi), t)) => (
                Rule::IPhiL,
                Expansion::OrdIndexed(OrdCase::IPhiL {
                    t: t.clone(),
                    xi: *xi,
                }),
            ),
            (Side::Ante, Formula::IBar(t)) => (
                Rule::IBarL,
                Expansion::OrdIndexed(OrdCase::IBarL { t: t.clone() }),
            ),
            (_, other) => unreachable!("unhandled dagger formula {other:?}"),
        }
    }

    /// Build the child of an Ord-indexed node at parameter `eta`.
    fn build_ord_child(&self, state: &NodeState, case: &OrdCase, eta: u64) -> NodeState {
        let node = &state.node;
        let origin = TravelOrigin {
            side: node.dagger.0,
            idx: node.dagger.1,
            dlen: node.sequent.succ.len(),
            stage: node.stage,
        };
        let mut pset: BTreeSet<u64> = node.params.iter().copied().collect();
        pset.insert(eta);
        let params = self.sort_params(&pset);
        match case {
            OrdCase::AllOrdR { body } => {
                let mut s = node.sequent.clone();
                s.succ.insert(0, body.instantiate_ord(&OrdTerm::Param(eta)));
                self.build(
                    ChildSeed {
                        sequent: s,
                        params,
                        kind: SeedKind::Travel(origin),
                    },
                    node,
                )
            }
            OrdCase::ExOrdL { body } => {
                let mut s = node.sequent.clone();
                s.ante.push(body.instantiate_ord(&OrdTerm::Param(eta)));
                self.build(
                    ChildSeed {
                        sequent: s,
                        params,
                        kind: SeedKind::Travel(origin),
                    },
                    node,
                )
            }
            OrdCase::IPhiL { t, xi } => {
                let SystemId::LkInductive(p) = &self.system else {
                    unreachable!()
                };
                let mut s = node.sequent.clone();
                s.ante.push(p.at_stage(eta, t));
                s.succ.insert(
                    0,
                    Formula::LeOrd(OrdTerm::Param(*xi), OrdTerm::Param(eta)),
                );
                self.build(
                    ChildSeed {
                        sequent: s,
                        params,
                        kind: SeedKind::Intermediate {
                            origin,
                            dagger: (Side::Ante, node.dagger.1),
                        },
                    },
                    node,
                )
            }
            OrdCase::IBarL { t } => {
                let SystemId::LkInductive(p) = &self.system else {
                    unreachable!()
                };
                let mut s = node.sequent.clone();
                s.ante.push(p.at_stage(eta, t));
                self.build(
                    ChildSeed {
                        sequent: s,
                        params,
                        kind: SeedKind::Intermediate {
                            origin,
                            dagger: (Side::Ante, node.dagger.1),
                        },
                    },
                    node,
                )
            }
        }
    }

    fn build_nat_child(&self, state: &NodeState, case: &NatCase, n: u64) -> NodeState {
        let node = &state.node;
        let origin = TravelOrigin {
            side: node.dagger.0,
            idx: node.dagger.1,
            dlen: node.sequent.succ.len(),
            stage: node.stage,
        };
        let params = node.params.clone();
        let sequent = match case {
            NatCase::AllNatR { body } => {
                let mut s = node.sequent.clone();
                s.succ.insert(0, body.instantiate_nat(&NatTerm::numeral(n)));
                s
            }
            NatCase::ExNatL { body } => {
                let mut s = node.sequent.clone();
                s.ante.push(body.instantiate_nat(&NatTerm::numeral(n)));
                s
            }
        };
        self.build(
            ChildSeed {
                sequent,
                params,
                kind: SeedKind::Travel(origin),
            },
            node,
        )
    }

    fn root_state(&self) -> Arc<NodeState> {
        let dagger = if !self.root.succ.is_empty() {
            (Side::Succ, 0)
        } else {
            (Side::Ante, self.root.ante.len() - 1)
        };
        let params = self.sort_params(&self.root.occ_set());
        let mut node = ProofNode {
            rule: Rule::Dup,
            sequent: self.root.clone(),
            level: 0,
            dagger,
            stage: 0,
            phase: phase_of(dagger.0, dagger.1),
            params: params.clone(),
            conclusion_params: vec![params],
            intermediate: false,
        };
        let (rule, expansion) = self.expand(&node);
        node.rule = rule;
        Arc::new(NodeState { node, expansion })
    }

    fn node_at(&self, pos: &[Atom]) -> Option<Arc<NodeState>> {
        if let Some(hit) = self.memo.lock().unwrap().get(pos) {
            return hit.clone();
        }
        let computed = if pos.is_empty() {
            Some(self.root_state())
        } else {
            let parent = self.node_at(&pos[..pos.len() - 1]);
            parent.and_then(|p| {
                let step = *pos.last().unwrap();
                match (&p.expansion, step) {
                    (Expansion::Closed, _) => None,
                    (Expansion::Fixed(seeds), Atom::Term(i)) => seeds
                        .get(i as usize)
                        .map(|seed| Arc::new(self.build(seed.clone(), &p.node))),
                    (Expansion::Fixed(_), Atom::Param(_)) => None,
                    (Expansion::OrdIndexed(case), Atom::Param(xi)) => {
                        if self.alpha.contains(xi) {
                            Some(Arc::new(self.build_ord_child(&p, case, xi)))
                        } else {
                            None
                        }
                    }
                    (Expansion::OrdIndexed(_), Atom::Term(_)) => None,
                    (Expansion::NatIndexed(case), Atom::Term(n)) if n != INF => {
                        Some(Arc::new(self.build_nat_child(&p, case, n)))
                    }
                    (Expansion::NatIndexed(_), _) => None,
                }
            })
        };
        self.memo
            .lock()
            .unwrap()
            .insert(pos.to_vec(), computed.clone());
        computed
    }

    /// Enumerate the premise index atoms of the node at `pos`.
    fn children_of(&self, pos: &[Atom], breadth: usize) -> Vec<Atom> {
        let Some(state) = self.node_at(pos) else {
            return vec![];
        };
        match &state.expansion {
            Expansion::Closed => vec![],
            Expansion::Fixed(seeds) => (0..seeds.len() as u64).map(Atom::Term).collect(),
            Expansion::OrdIndexed(_) => self
                .alpha
                .enumerate(breadth)
                .unwrap_or_default()
                .into_iter()
                .map(Atom::Param)
                .collect(),
            Expansion::NatIndexed(_) => (0..breadth as u64).map(Atom::Term).collect(),
        }
    }
}

enum PreproofImpl {
    Generated(GeneratedPreproof),
    Mutilated {
        base: Preproof,
        f: IncreasingMap,
    },
    Instantiated {
        base: Preproof,
        alpha: LinearOrder,
    },
}

/// A lazy preproof: a labeling of positions over premise indices and
/// ordinal parameters.
#[derive(Clone)]
pub struct Preproof {
    imp: Arc<PreproofImpl>,
}

/// Generate the preproof for `root` in `system` at parameter order `alpha`
/// by the deterministic scheme.
pub fn generate(system: SystemId, root: Sequent, alpha: LinearOrder) -> Result<Preproof> {
    if root.ante.is_empty() && root.succ.is_empty() {
        return Err(BetaError::EmptyRoot);
    }
    for f in root.ante.iter().chain(&root.succ) {
        if !f.free_vars().is_empty() {
            return Err(BetaError::OpenRoot);
        }
        if f.contains_opvar() {
            return Err(BetaError::OpenRoot);
        }
    }
    Ok(Preproof {
        imp: Arc::new(PreproofImpl::Generated(GeneratedPreproof {
            system,
            root,
            alpha,
            memo: Mutex::new(HashMap::new()),
        })),
    })
}

/// Relabel every parameter occurring in a node through `f`.
fn relabel_node(node: &ProofNode, f: &dyn Fn(u64) -> Option<u64>) -> Option<ProofNode> {
    Some(ProofNode {
        rule: node.rule,
        sequent: node.sequent.relabel_params(f)?,
        level: node.level,
        dagger: node.dagger,
        stage: node.stage,
        phase: node.phase,
        params: node
            .params
            .iter()
            .map(|&p| f(p))
            .collect::<Option<Vec<_>>>()?,
        conclusion_params: node
            .conclusion_params
            .iter()
            .map(|ps| ps.iter().map(|&p| f(p)).collect::<Option<Vec<_>>>())
            .collect::<Option<Vec<_>>>()?,
        intermediate: node.intermediate,
    })
}

fn relabel_pos(pos: &[Atom], f: &dyn Fn(u64) -> Option<u64>) -> Option<Seq> {
    pos.iter()
        .map(|a| match a {
            Atom::Term(t) => Some(Atom::Term(*t)),
            Atom::Param(p) => f(*p).map(Atom::Param),
        })
        .collect()
}

impl Preproof {
    /// The parameter order of this (view of a) preproof.
    pub fn alpha(&self) -> LinearOrder {
        match &*self.imp {
            PreproofImpl::Generated(g) => g.alpha.clone(),
            PreproofImpl::Mutilated { f, .. } => f.domain.clone(),
            PreproofImpl::Instantiated { alpha, .. } => alpha.clone(),
        }
    }

    pub fn root_sequent(&self) -> Sequent {
        self.label(&[]).expect("root exists").sequent
    }

    /// The label at a position, if the position is in the preproof tree.
    pub fn label(&self, pos: &[Atom]) -> Option<ProofNode> {
        match &*self.imp {
            PreproofImpl::Generated(g) => g.node_at(pos).map(|s| s.node.clone()),
            PreproofImpl::Mutilated { base, f } => {
                let up = relabel_pos(pos, &|p| f.apply(p))?;
                let node = base.label(&up)?;
                relabel_node(&node, &|p| f.preimage(p))
            }
            PreproofImpl::Instantiated { base, alpha } => {
                // Occ-collapse the position, look up at the base, relabel
                // forward; mirrors member_instantiated.
                let mut params: Vec<u64> = pos
                    .iter()
                    .filter_map(|a| match a {
                        Atom::Param(p) => Some(*p),
                        _ => None,
                    })
                    .collect();
                params.sort_by(|&a, &b| alpha.cmp(a, b));
                params.dedup();
                if params.iter().any(|&p| !alpha.contains(p)) {
                    return None;
                }
                let down = relabel_pos(pos, &|p| {
                    params.iter().position(|&q| q == p).map(|k| k as u64)
                })?;
                let node = base.label(&down)?;
                relabel_node(&node, &|k| params.get(k as usize).copied())
            }
        }
    }

    /// Premise index atoms available at a position (Ord/ω-arity capped by
    /// `breadth`).
    pub fn children(&self, pos: &[Atom], breadth: usize) -> Vec<Atom> {
        match &*self.imp {
            PreproofImpl::Generated(g) => g.children_of(pos, breadth),
            PreproofImpl::Mutilated { base, f } => {
                let Some(up) = relabel_pos(pos, &|p| f.apply(p)) else {
                    return vec![];
                };
                base.children(&up, breadth)
                    .into_iter()
                    .filter_map(|a| match a {
                        Atom::Term(t) => Some(Atom::Term(t)),
                        Atom::Param(p) => f.preimage(p).map(Atom::Param),
                    })
                    .collect()
            }
            PreproofImpl::Instantiated { base, alpha } => {
                if self.label(pos).is_none() {
                    return vec![];
                }
                // Children at the collapsed position decide the arity; Ord
                // arities re-enumerate in alpha.
                let mut params: Vec<u64> = pos
                    .iter()
                    .filter_map(|a| match a {
                        Atom::Param(p) => Some(*p),
                        _ => None,
                    })
                    .collect();
                params.sort_by(|&a, &b| alpha.cmp(a, b));
                params.dedup();
                let Some(down) = relabel_pos(pos, &|p| {
                    params.iter().position(|&q| q == p).map(|k| k as u64)
                }) else {
                    return vec![];
                };
                let base_children = base.children(&down, breadth);
                let ord_arity = base_children.iter().any(|a| matches!(a, Atom::Param(_)));
                if ord_arity {
                    alpha
                        .enumerate(breadth)
                        .unwrap_or_default()
                        .into_iter()
                        .map(Atom::Param)
                        .collect()
                } else {
                    base_children
                }
            }
        }
    }

    /// The mutilation `^f π`: keeps positions whose parameters relabel along
    /// `f`, with labels relabeled back.
    pub fn mutilate(&self, f: IncreasingMap) -> Preproof {
        Preproof {
            imp: Arc::new(PreproofImpl::Mutilated {
                base: self.clone(),
                f,
            }),
        }
    }

    /// The instantiation `π_α` of an ω-presented homogeneous preproof.
    pub fn instantiate(&self, alpha: LinearOrder) -> Preproof {
        Preproof {
            imp: Arc::new(PreproofImpl::Instantiated {
                base: self.clone(),
                alpha,
            }),
        }
    }

    /// Leftmost open branch prefix of the given length (positions whose
    /// labels exist and are unexpired), if one is found within breadth.
    pub fn find_open_branch(&self, depth: usize, breadth: usize) -> Option<Vec<ProofNode>> {
        fn dfs(
            pi: &Preproof,
            pos: &mut Seq,
            acc: &mut Vec<ProofNode>,
            depth: usize,
            breadth: usize,
        ) -> bool {
            if acc.len() == depth {
                return true;
            }
            for step in pi.children(pos, breadth) {
                pos.push(step);
                if let Some(node) = pi.label(pos) {
                    // open-branch prefixes never pass a weakening closure
                    if !matches!(node.rule, Rule::Axiom(_)) {
                        acc.push(node);
                        if dfs(pi, pos, acc, depth, breadth) {
                            return true;
                        }
                        acc.pop();
                    }
                }
                pos.pop();
            }
            false
        }
        let mut pos = Vec::new();
        let root = self.label(&[])?;
        if matches!(root.rule, Rule::Axiom(_)) {
            return None;
        }
        let mut acc = vec![root];
        if dfs(self, &mut pos, &mut acc, depth, breadth) {
            Some(acc)
        } else {
            None
        }
    }

    /// Whether the bounded expansion closes entirely in axioms within
    /// `depth`/`breadth`.
    pub fn closes_within(&self, depth: usize, breadth: usize) -> bool {
        fn walk(pi: &Preproof, pos: &mut Seq, depth: usize, breadth: usize) -> bool {
            let Some(node) = pi.label(pos) else {
                return false;
            };
            if matches!(node.rule, Rule::Axiom(_)) {
                return true;
            }
            if depth == 0 {
                return false;
            }
            let children = pi.children(pos, breadth);
            if children.is_empty() {
                return false;
            }
            children.into_iter().all(|step| {
                pos.push(step);
                let ok = walk(pi, pos, depth - 1, breadth);
                pos.pop();
                ok
            })
        }
        walk(self, &mut Vec::new(), depth, breadth)
    }
}

/// The associated prequasidendroid of a (ω-presented) preproof: members are
/// the ∞-interleaved positions.
pub fn den(pi: &Preproof) -> Prequasidendroid {
    fn position_of(seq: &[Atom]) -> Option<Seq> {
        // even entries are position steps, odd entries the ∞ separator
        let mut pos = Vec::with_capacity(seq.len() / 2 + 1);
        for (i, a) in seq.iter().enumerate() {
            if i % 2 == 1 {
                if *a != Atom::Term(INF) {
                    return None;
                }
            } else {
                if *a == Atom::Term(INF) {
                    return None;
                }
                pos.push(*a);
            }
        }
        Some(pos)
    }
    let term_order = LinearOrder::derived(
        "B+inf",
        |_| true,
        |a, b| a.cmp(&b),
        crate::order::WfStatus::WellFounded,
    )
    .with_enumerator(|n| (0..n as u64).collect());

    let pm = pi.clone();
    let ph = pi.clone();
    let pc = pi.clone();
    let pp = pi.clone();
    Prequasidendroid::lazy(
        "den",
        term_order,
        move |seq| {
            seq.len() % 2 == 0
                && position_of(seq)
                    .map(|pos| pm.label(&pos).is_some())
                    .unwrap_or(false)
        },
        move |seq| {
            position_of(seq)
                .map(|pos| ph.label(&pos).is_some())
                .unwrap_or(false)
        },
    )
    .with_children(
        move |seq, breadth| {
            if seq.len() % 2 == 1 {
                return vec![INF];
            }
            let Some(pos) = position_of(seq) else {
                return vec![];
            };
            pc.children(&pos, breadth)
                .into_iter()
                .filter_map(|a| match a {
                    Atom::Term(t) => Some(t),
                    Atom::Param(_) => None,
                })
                .collect()
        },
        move |seq| {
            if seq.len() % 2 == 1 {
                return false;
            }
            let Some(pos) = position_of(seq) else {
                return false;
            };
            pp.children(&pos, 1)
                .first()
                .map(|a| matches!(a, Atom::Param(_)))
                .unwrap_or(false)
        },
    )
}

/// Interleave a preproof position into a `den` hull sequence.
pub fn interleave(pos: &[Atom]) -> Seq {
    let mut out = Vec::with_capacity(pos.len() * 2);
    for a in pos {
        out.push(*a);
        out.push(Atom::Term(INF));
    }
    out
}

// ---------------------------------------------------------------------------
// Branch-to-model extraction

#[derive(Debug, Clone, Default, Serialize)]
pub struct PartialModel {
    pub true_atoms: BTreeSet<String>,
    pub false_atoms: BTreeSet<String>,
    pub ord_universe: Vec<u64>,
    pub term_universe: BTreeSet<String>,
}

fn collect_atoms(f: &Formula, out: &mut Vec<Formula>) {
    if f.is_atomic() {
        out.push(f.clone());
    }
}

fn collect_terms(f: &Formula, out: &mut BTreeSet<String>) {
    let mut push = |t: &NatTerm| {
        let mut s = String::new();
        // reuse the renderer through a throwaway formula
        let r = formula::render(&Formula::Eq(t.clone(), NatTerm::Zero));
        // strip "(= " and " 0)"
        s.push_str(&r[3..r.len() - 3]);
        out.insert(s);
    };
    match f {
        Formula::Eq(a, b) => {
            push(a);
            push(b);
        }
        Formula::IPhi(_, t) | Formula::IBar(t) | Formula::OpVar(t) => push(t),
        Formula::LeOrd(..) => {}
        _ => {}
    }
}

/// Collect the partial model read off a branch prefix: antecedent atoms are
/// true, succedent atoms false; a conflict means the branch passed through a
/// weakening-to-axiom node, which cannot happen on genuine open branches.
pub fn extract_model(branch: &[ProofNode]) -> Result<PartialModel> {
    let mut model = PartialModel::default();
    let mut ords = BTreeSet::new();
    for node in branch {
        for f in &node.sequent.ante {
            let mut atoms = Vec::new();
            collect_atoms(f, &mut atoms);
            for a in atoms {
                model.true_atoms.insert(formula::render(&a));
                collect_terms(&a, &mut model.term_universe);
            }
        }
        for f in &node.sequent.succ {
            let mut atoms = Vec::new();
            collect_atoms(f, &mut atoms);
            for a in atoms {
                model.false_atoms.insert(formula::render(&a));
                collect_terms(&a, &mut model.term_universe);
            }
        }
        ords.extend(node.sequent.occ_set());
    }
    if let Some(conflict) = model.true_atoms.intersection(&model.false_atoms).next() {
        return Err(BetaError::BranchInvalid(conflict.clone()));
    }
    model.ord_universe = ords.into_iter().collect();
    Ok(model)
}

// ---------------------------------------------------------------------------
// Bounded branch-lemma checks

#[derive(Debug, Clone, Serialize)]
pub struct BranchLemmaReport {
    pub prefix_len: usize,
    pub terminated_in_axiom: bool,
    pub stage_rule_violations: Vec<String>,
    pub stage_recurrences: usize,
    pub monotonicity_violations: Vec<String>,
    pub atomic_side_violations: Vec<String>,
    pub never_both_sides: bool,
    pub both_side_violations: Vec<String>,
}

/// Bounded checks of the branch lemmas on a root-path prefix:
/// (a) the stage-number update rules hold mechanically (and stages recur);
/// (b) formula sets grow monotonically;
/// (c) once a side is nonempty, an atomic formula appears on it within the
///     prefix;
/// (d) no formula occurs on both sides of any open node.
pub fn check_branch_lemmas(branch: &[ProofNode]) -> BranchLemmaReport {
    let mut report = BranchLemmaReport {
        prefix_len: branch.len(),
        terminated_in_axiom: branch
            .last()
            .map(|n| matches!(n.rule, Rule::Axiom(_)))
            .unwrap_or(false),
        stage_rule_violations: vec![],
        stage_recurrences: 0,
        monotonicity_violations: vec![],
        atomic_side_violations: vec![],
        never_both_sides: true,
        both_side_violations: vec![],
    };

    // (a) stage updates; intermediates repeat the conclusion state, so the
    // rule is checked across the portion (conclusion -> leaf).
    let mut seen_stages: BTreeSet<u64> = BTreeSet::new();
    for w in branch.windows(2) {
        let (parent, child) = (&w[0], &w[1]);
        if child.intermediate {
            if child.stage != parent.stage {
                report
                    .stage_rule_violations
                    .push(format!("intermediate at level {} changed the stage", child.level));
            }
            continue;
        }
        let expected = match parent.phase {
            Phase::Last => {
                if parent.stage > 0 {
                    parent.stage - 1
                } else {
                    child.level
                }
            }
            _ => parent.stage,
        };
        if child.stage != expected {
            report.stage_rule_violations.push(format!(
                "level {}: stage {} after phase {:?} stage {}, expected {}",
                child.level, child.stage, parent.phase, parent.stage, expected
            ));
        }
        if seen_stages.contains(&child.stage) {
            report.stage_recurrences += 1;
        }
        seen_stages.insert(child.stage);
    }

    // (b) monotone formula sets
    for w in branch.windows(2) {
        let (parent, child) = (&w[0], &w[1]);
        for f in &parent.sequent.ante {
            if !child.sequent.ante.contains(f) {
                report
                    .monotonicity_violations
                    .push(format!("antecedent lost {} at level {}", f, child.level));
            }
        }
        for f in &parent.sequent.succ {
            if !child.sequent.succ.contains(f) {
                report
                    .monotonicity_violations
                    .push(format!("succedent lost {} at level {}", f, child.level));
            }
        }
    }

    // (c) atomic formulas appear
    let first_nonempty = |side: fn(&Sequent) -> &Vec<Formula>| {
        branch.iter().position(|n| !side(&n.sequent).is_empty())
    };
    let has_atomic_after = |side: fn(&Sequent) -> &Vec<Formula>, from: usize| {
        branch[from..]
            .iter()
            .any(|n| side(&n.sequent).iter().any(|f| f.is_atomic()))
    };
    if let Some(i) = first_nonempty(|s| &s.ante) {
        if !has_atomic_after(|s| &s.ante, i) {
            report
                .atomic_side_violations
                .push("no atomic formula appears in the antecedent".into());
        }
    }
    if let Some(i) = first_nonempty(|s| &s.succ) {
        if !has_atomic_after(|s| &s.succ, i) {
            report
                .atomic_side_violations
                .push("no atomic formula appears in the succedent".into());
        }
    }

    // (d) both sides
    for node in branch {
        if matches!(node.rule, Rule::Axiom(_)) {
            continue;
        }
        for f in &node.sequent.ante {
            if node.sequent.succ.contains(f) {
                report.never_both_sides = false;
                report
                    .both_side_violations
                    .push(format!("{} on both sides at level {}", f, node.level));
            }
        }
    }

    report
}

impl BranchLemmaReport {
    pub fn ok(&self) -> bool {
        self.stage_rule_violations.is_empty()
            && self.monotonicity_violations.is_empty()
            && self.atomic_side_violations.is_empty()
            && self.both_side_violations.is_empty()
    }
}

// ---------------------------------------------------------------------------
// Rule conformance against the shipped case table

/// One entry of the machine-readable case table (docs/case_table.json).
#[derive(Debug, Clone, serde::Deserialize)]
pub struct CaseEntry {
    pub rule: String,
    pub side: String,
    pub principal: String,
    pub arity: String,
    pub system: String,
}

pub fn case_table() -> Vec<CaseEntry> {
    serde_json::from_str(include_str!("../../../../docs/case_table.json"))
        .expect("case table parses")
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct ConformanceReport {
    pub nodes_checked: usize,
    pub violations: Vec<String>,
}

impl ConformanceReport {
    pub fn ok(&self) -> bool {
        self.violations.is_empty()
    }
}

fn principal_shape(f: &Formula) -> &'static str {
    match f {
        Formula::Eq(..) | Formula::LeOrd(..) => "atomic",
        Formula::IPhi(..) => "iphi",
        Formula::IBar(..) => "ibar",
        Formula::OpVar(..) => "opvar",
        Formula::And(..) => "and",
        Formula::Or(..) => "or",
        Formula::Not(..) => "not",
        Formula::Imp(..) => "imp",
        Formula::All(Sort::Nat, _) => "all-nat",
        Formula::All(Sort::Ord, _) => "all-ord",
        Formula::Ex(Sort::Nat, _) => "ex-nat",
        Formula::Ex(Sort::Ord, _) => "ex-ord",
    }
}

/// Validate every expanded node of `pi` to `depth` (breadth-capped) against
/// the case table: the (rule, side, principal shape) triple must match
/// exactly one table row with the right arity, children must extend the
/// conclusion add-only (prepends in the succedent, appends in the
/// antecedent), and the parameter-restriction invariant must hold.
pub fn check_conformance(pi: &Preproof, depth: usize, breadth: usize) -> ConformanceReport {
    let table = case_table();
    let system = "any"; // rows carry lk / inductive / any
    let _ = system;
    let mut report = ConformanceReport::default();
    let root_occ = pi
        .label(&[])
        .map(|n| n.sequent.occ_set())
        .unwrap_or_default();

    let mut frontier: Vec<Seq> = vec![vec![]];
    for _ in 0..=depth {
        let mut next = Vec::new();
        for pos in &frontier {
            let Some(node) = pi.label(pos) else { continue };
            report.nodes_checked += 1;

            // parameter restriction
            let pos_params: BTreeSet<u64> = pos
                .iter()
                .filter_map(|a| match a {
                    Atom::Param(p) => Some(*p),
                    _ => None,
                })
                .collect();
            let allowed: BTreeSet<u64> = root_occ.union(&pos_params).copied().collect();
            if !node.sequent.occ_set().is_subset(&allowed) {
                report.violations.push(format!(
                    "parameter restriction fails at {pos:?}: {:?} ⊄ {:?}",
                    node.sequent.occ_set(),
                    allowed
                ));
            }

            // rule vs case table
            let children = pi.children(pos, breadth);
            if !matches!(node.rule, Rule::Axiom(_)) && !node.intermediate {
                let shape = node.dagger_formula().map(principal_shape).unwrap_or("?");
                let side = match node.dagger.0 {
                    Side::Ante => "ante",
                    Side::Succ => "succ",
                };
                let arity = if children.iter().any(|a| matches!(a, Atom::Param(_))) {
                    "ord"
                } else if matches!(node.rule, Rule::AllNatR | Rule::ExNatL) {
                    "omega"
                } else {
                    "fixed"
                };
                let matches: Vec<&CaseEntry> = table
                    .iter()
                    .filter(|e| {
                        e.rule == node.rule.name()
                            && e.side == side
                            && e.principal == shape
                            && e.arity == arity
                    })
                    .collect();
                if matches.len() != 1 {
                    report.violations.push(format!(
                        "node at {pos:?} (rule {}, side {side}, principal {shape}, arity {arity}) matches {} case-table rows",
                        node.rule.name(),
                        matches.len()
                    ));
                }
            }

            // children extend add-only
            for step in &children {
                let mut cp = pos.clone();
                cp.push(*step);
                let Some(child) = pi.label(&cp) else {
                    report
                        .violations
                        .push(format!("advertised child {step:?} of {pos:?} has no label"));
                    continue;
                };
                let ante_ok = child.sequent.ante.len() >= node.sequent.ante.len()
                    && child.sequent.ante[..node.sequent.ante.len()] == node.sequent.ante[..];
                let dnew = child.sequent.succ.len() - node.sequent.succ.len().min(child.sequent.succ.len());
                let succ_ok = child.sequent.succ.len() >= node.sequent.succ.len()
                    && child.sequent.succ[dnew..] == node.sequent.succ[..];
                if !ante_ok || !succ_ok {
                    report.violations.push(format!(
                        "child {step:?} of {pos:?} does not extend the conclusion add-only"
                    ));
                }
                if child.level != node.level + 1 {
                    report
                        .violations
                        .push(format!("child level wrong at {cp:?}"));
                }
                if child.stage > child.level {
                    report
                        .violations
                        .push(format!("stage exceeds level at {cp:?}"));
                }
                next.push(cp);
            }
        }
        frontier = next;
        if frontier.is_empty() {
            break;
        }
    }
    report
}

pub use formula::render as render_formula;
pub use parser::{parse_formula, parse_sequent, render_sequent};

// Tests live in tests/ and in the sibling modules; a couple of engine
// smoke checks here.
#[cfg(test)]
mod tests {
    use super::*;

    fn lk(root: &str) -> Preproof {
        generate(
            SystemId::Lk,
            parser::parse_sequent(root).unwrap(),
            LinearOrder::finite_init(1),
        )
        .unwrap()
    }

    #[test]
    fn tautology_closes() {
        let pi = generate(
            SystemId::Lk,
            parser::parse_sequent("(seq () ((or (= 0 0) (not (= 0 0)))))").unwrap(),
            LinearOrder::finite(vec![]),
        )
        .unwrap();
        assert!(pi.closes_within(12, 8));
    }

    #[test]
    fn invalid_sequent_stays_open() {
        let pi = lk("(seq ((= 0 0)) ((= (S 0) 0)))");
        let branch = pi.find_open_branch(20, 6).expect("open branch");
        assert_eq!(branch.len(), 20);
        let model = extract_model(&branch).unwrap();
        assert!(model.true_atoms.contains("(= 0 0)"));
        assert!(model.false_atoms.contains("(= (S 0) 0)"));
    }

    #[test]
    fn empty_root_rejected() {
        assert!(matches!(
            generate(
                SystemId::Lk,
                Sequent {
                    ante: vec![],
                    succ: vec![]
                },
                LinearOrder::omega()
            ),
            Err(BetaError::EmptyRoot)
        ));
    }
}
