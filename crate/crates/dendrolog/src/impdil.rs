//! The implicational predilator of a genedendron and two coded orders: its
//! tree simultaneously grows a branch of the dendroid (accumulating partial
//! information about the generated real), a candidate descending sequence
//! over the `b`-coded order, and a candidate embedding of the `a`-coded
//! order into the probe. Node conditions are evaluated with tri-state
//! "decides" semantics: only decided refutations prune.

use crate::dendroid::{kb_cmp_seq, occ, Atom, Seq, SeqTable};
use crate::dilator::Predilator;
use crate::genedendron::GeneDendron;
use crate::oracle::{self, EvalResult, MachineCode, PartialOracle};
use crate::order::{find_descending, DescendingWitness, IncreasingMap, LinearOrder, WfStatus};
use crate::pairing::nat;
use serde::Serialize;
use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::sync::Arc;

#[derive(Debug, thiserror::Error)]
pub enum ImpError {
    #[error("parameter {0} outside the probe order")]
    ParamOutside(u64),
    #[error("node components must share the step count: {0}")]
    Lengths(String),
    #[error("insufficient branch or embedding data: {0}")]
    Budget(String),
    #[error("{0}")]
    Dendroid(#[from] crate::dendroid::DendroidError),
}

pub type Result<T> = std::result::Result<T, ImpError>;

/// A node of the implicational tree. One *step* of `sigma` is a pair of
/// atoms (the dendroids in this crate interleave a payload atom with a
/// separator or rank atom), and `f`, `g` carry one entry per step.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ImpNode {
    pub sigma: Seq,
    pub f: Vec<u64>,
    pub g: Vec<u64>,
}

impl ImpNode {
    pub fn root() -> ImpNode {
        ImpNode {
            sigma: vec![],
            f: vec![],
            g: vec![],
        }
    }

    pub fn steps(&self) -> usize {
        self.sigma.len() / 2
    }

    fn well_formed(&self) -> bool {
        self.sigma.len() % 2 == 0 && self.f.len() == self.steps() && self.g.len() == self.steps()
    }

    /// Flatten per step: `[σ(2k), σ(2k+1), Term(f_k), Param(g_k)]`; f-slots
    /// ride as Term atoms and g-slots as Param atoms, which keeps the
    /// support and relabeling machinery uniform.
    pub fn flatten(&self) -> Seq {
        let mut out = Vec::with_capacity(self.sigma.len() * 2);
        for k in 0..self.steps() {
            out.push(self.sigma[2 * k]);
            out.push(self.sigma[2 * k + 1]);
            out.push(Atom::Term(self.f[k]));
            out.push(Atom::Param(self.g[k]));
        }
        out
    }

    pub fn unflatten(flat: &[Atom]) -> Option<ImpNode> {
        if flat.len() % 4 != 0 {
            return None;
        }
        let mut node = ImpNode::root();
        for chunk in flat.chunks(4) {
            node.sigma.push(chunk[0]);
            node.sigma.push(chunk[1]);
            match chunk[2] {
                Atom::Term(f) => node.f.push(f),
                Atom::Param(_) => return None,
            }
            match chunk[3] {
                Atom::Param(g) => node.g.push(g),
                Atom::Term(_) => return None,
            }
        }
        Some(node)
    }
}

/// The two coded orders and the evaluation budget. A code answers
/// `{code}^Z(i, j) = 0` iff `i ≤ j` in the coded order; the field test is
/// the diagonal query. (The two-argument convention is documented in
/// docs/numbering.md.)
#[derive(Clone)]
pub struct ImpConfig {
    pub a_code: MachineCode,
    pub b_code: MachineCode,
    pub budget: u64,
}

/// Tri-state query of a coded order under a partial oracle.
fn coded_le(code: &MachineCode, i: u64, j: u64, oracle: &PartialOracle, budget: u64) -> EvalResult {
    oracle::eval(code, &[nat(i), nat(j)], oracle, budget)
}

/// A coded order seen through a (total enough) oracle, as a `LinearOrder`.
/// Undecided/exhausted bits fall outside the field.
pub fn order_from_code(
    name: impl Into<String>,
    code: MachineCode,
    oracle: PartialOracle,
    budget: u64,
) -> LinearOrder {
    let c1 = code.clone();
    let o1 = oracle.clone();
    let c2 = code.clone();
    let o2 = oracle.clone();
    let code2 = code;
    let oracle2 = oracle;
    LinearOrder::derived(
        name.into(),
        move |i| coded_le(&c1, i, i, &o1, budget).is_value(0),
        move |i, j| {
            if i == j {
                return Ordering::Equal;
            }
            if coded_le(&c2, i, j, &o2, budget).is_value(0) {
                Ordering::Less
            } else {
                Ordering::Greater
            }
        },
        WfStatus::Unknown,
    )
    .with_enumerator({
        let c3 = code2;
        let o3 = oracle2;
        move |n| {
            let mut out = Vec::new();
            let mut i = 0u64;
            while out.len() < n && i < 4 * n as u64 + 64 {
                if coded_le(&c3, i, i, &o3, budget).is_value(0) {
                    out.push(i);
                }
                i += 1;
            }
            out
        }
    })
}

/// The partial oracle a node knows: the bits extracted from its σ-prefix.
pub fn node_oracle(g: &GeneDendron, x: &LinearOrder, sigma: &[Atom]) -> PartialOracle {
    let bits: BTreeMap<u64, u64> = g.extract(x, sigma);
    PartialOracle::from_pairs(bits)
}

/// Membership of a node in the implicational tree over probe `X`:
/// the σ-component is a hull branch prefix, and the decided bits of the
/// extracted real must not refute the descending-sequence conditions on `f`
/// (field and strict descent over the b-coded order) nor the
/// order-preservation condition on `g` against the a-coded order.
pub fn imp_member(
    node: &ImpNode,
    x: &LinearOrder,
    g: &GeneDendron,
    cfg: &ImpConfig,
) -> Result<bool> {
    if !node.well_formed() {
        return Err(ImpError::Lengths(format!(
            "{} atoms vs |f|={} |g|={}",
            node.sigma.len(),
            node.f.len(),
            node.g.len()
        )));
    }
    for v in &node.g {
        if !x.contains(*v) {
            return Err(ImpError::ParamOutside(*v));
        }
    }
    // (2) σ ∈ D*_X
    if !g.dend.hull_at(x, &node.sigma)? {
        return Ok(false);
    }
    let rho = node_oracle(g, x, &node.sigma);
    // (3) no f-entry decidedly outside the field of b(ϱ)
    for &fi in &node.f {
        if let EvalResult::Value(v) = coded_le(&cfg.b_code, fi, fi, &rho, cfg.budget) {
            if v != nat(0) {
                return Ok(false);
            }
        }
    }
    // (4) no decided non-descent along f: for i < j, a decided
    // `f(i) ≤_b f(j)` refutes the strict descent.
    for i in 0..node.f.len() {
        for j in (i + 1)..node.f.len() {
            if coded_le(&cfg.b_code, node.f[i], node.f[j], &rho, cfg.budget).is_value(0) {
                return Ok(false);
            }
        }
    }
    // (6) g order-preservation: g(i) <_X g(j) refuted by a decided j ≤_a i.
    for i in 0..node.g.len() {
        for j in 0..node.g.len() {
            if i == j {
                continue;
            }
            if x.lt(node.g[i], node.g[j])
                && coded_le(&cfg.a_code, j as u64, i as u64, &rho, cfg.budget).is_value(0)
            {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

const IMP_BREADTH: usize = 3;

fn imp_table(g: &GeneDendron, cfg: &ImpConfig, x: &LinearOrder) -> Arc<SeqTable> {
    let g = g.clone();
    let cfg = cfg.clone();
    let x = x.clone();
    SeqTable::new(vec![], move |flat| {
        let Some(node) = ImpNode::unflatten(flat) else {
            return vec![];
        };
        let mut out = Vec::new();
        // extend σ by one full step (two atoms), f and g by one entry each
        let firsts = g.dend.children_at(&x, &node.sigma, IMP_BREADTH).unwrap_or_default();
        for a1 in firsts {
            let mut s1 = node.sigma.clone();
            s1.push(a1);
            let seconds = g.dend.children_at(&x, &s1, IMP_BREADTH).unwrap_or_default();
            for a2 in seconds {
                for fv in 0..IMP_BREADTH as u64 {
                    for gv in x.enumerate(IMP_BREADTH).unwrap_or_default() {
                        let mut child = node.clone();
                        child.sigma = s1.clone();
                        child.sigma.push(a2);
                        child.f.push(fv);
                        child.g.push(gv);
                        if imp_member(&child, &x, &g, &cfg).unwrap_or(false) {
                            out.push(child.flatten());
                        }
                    }
                }
            }
        }
        out
    })
}

/// KB-variant comparison of two flattened nodes: σ-atoms compare in the
/// dendroid's orders, f- and g-entries over raw ℕ; a proper extension is
/// smaller.
pub fn imp_cmp(g: &GeneDendron, x: &LinearOrder, a: &[Atom], b: &[Atom]) -> Ordering {
    let n = a.len().min(b.len());
    for i in 0..n {
        let ord = match i % 4 {
            0 | 1 => kb_cmp_seq(g.dend.term_order(), x, &[a[i]], &[b[i]])
                .then(Ordering::Equal),
            2 => match (a[i], b[i]) {
                (Atom::Term(p), Atom::Term(q)) => p.cmp(&q),
                _ => Ordering::Equal,
            },
            _ => match (a[i], b[i]) {
                (Atom::Param(p), Atom::Param(q)) => p.cmp(&q),
                _ => Ordering::Equal,
            },
        };
        if ord != Ordering::Equal {
            return ord;
        }
    }
    b.len().cmp(&a.len())
}

/// The implicational predilator: apply = the KB-variant linearization of the
/// tree (elements coded by BFS discovery index), map relabels both σ's
/// parameters and the embedding component, supp collects both.
pub fn imp_predilator(g: &GeneDendron, cfg: &ImpConfig) -> Predilator {
    let g_apply = g.clone();
    let cfg_apply = cfg.clone();
    let g_map = g.clone();
    let cfg_map = cfg.clone();
    let g_supp = g.clone();
    let cfg_supp = cfg.clone();
    Predilator::new(
        format!("imp({})", g.generates_label),
        move |x| {
            let table = imp_table(&g_apply, &cfg_apply, x);
            let tf = table.clone();
            let tc = table.clone();
            let te = table.clone();
            let tdx = table.clone();
            let gc = g_apply.clone();
            let gd = g_apply.clone();
            let xc = x.clone();
            let xd = x.clone();
            LinearOrder::derived(
                format!("imp({})", xc.describe()),
                move |code| tf.get(code).is_some(),
                move |p, q| match (tc.get(p), tc.get(q)) {
                    (Some(a), Some(b)) => imp_cmp(&gc, &xc, &a, &b),
                    _ => p.cmp(&q),
                },
                WfStatus::Unknown,
            )
            .with_enumerator(move |n| te.enumerate(n))
            .with_descend(move |code, _breadth| {
                let Some(node) = tdx.get(code) else {
                    return vec![];
                };
                let mut out: Vec<u64> = tdx
                    .children_of(&node)
                    .iter()
                    .filter_map(|c| tdx.find(c))
                    .collect();
                if node.len() >= 4 {
                    let parent = &node[..node.len() - 4];
                    for sib in tdx.children_of(parent) {
                        if sib != node && imp_cmp(&gd, &xd, &sib, &node) == Ordering::Less {
                            if let Some(c) = tdx.find(&sib) {
                                out.push(c);
                            }
                        }
                    }
                }
                out
            })
        },
        move |f, code| {
            let from = imp_table(&g_map, &cfg_map, &f.domain);
            let to = imp_table(&g_map, &cfg_map, &f.codomain);
            let flat = from.get(code)?;
            let moved = crate::dendroid::mutilation_map(&flat, f)?;
            to.find(&moved)
        },
        move |x, code| {
            imp_table(&g_supp, &cfg_supp, x)
                .get(code)
                .map(|flat| occ(&flat))
                .unwrap_or_default()
        },
    )
}

/// The inductive embedding `e: b(R) → Imp(X)` of clause (iii), on a finite
/// prefix: `b_enum` lists the b-coded order's field in ℕ-increasing order,
/// `branch` is a hull branch of the dendroid at `X`, `g_map` an embedding of
/// the a-coded order into `X` (extended to indices), and `oracle` the
/// reference real prefix used for b-comparisons.
pub fn embed_b(
    branch: &[Atom],
    g_map: &IncreasingMap,
    b_enum: &[u64],
    cfg: &ImpConfig,
    oracle: &PartialOracle,
) -> Result<Vec<ImpNode>> {
    let b_le = |p: u64, q: u64| coded_le(&cfg.b_code, p, q, oracle, cfg.budget).is_value(0);
    let g_at = |k: usize| -> Result<u64> {
        let sources = g_map.sources();
        sources
            .get(k)
            .and_then(|s| g_map.apply(*s))
            .or_else(|| g_map.pairs.first().map(|&(_, t)| t))
            .ok_or_else(|| ImpError::Budget("embedding prefix too short".into()))
    };
    let sigma_steps = |m: usize| -> Result<Seq> {
        if branch.len() < 2 * m {
            return Err(ImpError::Budget(format!(
                "branch prefix has {} atoms, need {}",
                branch.len(),
                2 * m
            )));
        }
        Ok(branch[..2 * m].to_vec())
    };
    let mut out: Vec<ImpNode> = Vec::new();
    for (i, &beta_i) in b_enum.iter().enumerate() {
        let is_max = b_enum[..=i].iter().all(|&bj| b_le(bj, beta_i));
        let node = if is_max {
            ImpNode {
                sigma: sigma_steps(1)?,
                f: vec![beta_i],
                g: vec![g_at(0)?],
            }
        } else {
            // β_l: the b-least strict upper bound of β_i among β_0..β_{i-1}
            let mut l: Option<usize> = None;
            for (j, &bj) in b_enum[..i].iter().enumerate() {
                if b_le(bj, beta_i) {
                    continue;
                }
                l = match l {
                    None => Some(j),
                    Some(cur) if b_le(bj, b_enum[cur]) => Some(j),
                    other => other,
                };
            }
            let l = l.expect("non-max has an upper bound");
            let base = &out[l];
            let m = base.steps();
            let mut f = base.f.clone();
            f.push(beta_i);
            let mut gv = base.g.clone();
            gv.push(g_at(m)?);
            ImpNode {
                sigma: sigma_steps(m + 1)?,
                f,
                g: gv,
            }
        };
        out.push(node);
    }
    Ok(out)
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct ClauseIiReport {
    /// A constructed descending chain (forward direction), if any.
    pub forward_chain_len: usize,
    /// Branch-prefix steps recovered from the witness.
    pub recovered_branch_steps: usize,
    /// Embedding-prefix entries recovered from the witness, with
    /// order-preservation into X validated.
    pub recovered_embedding_len: usize,
    pub embedding_order_preserved: bool,
    pub notes: Vec<String>,
}

/// Bounded both-direction evidence for clause (ii): a descending chain of
/// `Imp(X)` is constructed from a found dendroid branch plus an embedding of
/// the a-coded order into `X`, and from that witness a branch prefix and an
/// embedding prefix are recovered.
pub fn check_clause_ii(
    g: &GeneDendron,
    cfg: &ImpConfig,
    x: &LinearOrder,
    depth: usize,
) -> Result<ClauseIiReport> {
    let mut report = ClauseIiReport::default();

    // Reference real prefix from the deepest branch we can find.
    let branch = crate::dendroid::longest_branch_prefix(&g.dend, x, 2 * depth, 6)?;
    let rho = node_oracle(g, x, &branch);
    let a_order = order_from_code("a(R)", cfg.a_code.clone(), rho.clone(), cfg.budget);

    // (⇐) construct: embedding a(R) -> X, then extend the node greedily one
    // step at a time, picking the first f-value the decided bits do not
    // refute.
    let steps_available = branch.len() / 2;
    let want = depth.min(steps_available);
    let a_size = (0..32).filter(|&i| a_order.contains(i)).count();
    let emb = crate::order::find_embedding(&a_order, x, a_size.max(1)).unwrap_or(None);
    if let Some(emb) = emb {
        let mut chain: Vec<ImpNode> = Vec::new();
        let targets = emb.targets();
        let g_at = |k: usize| {
            targets
                .get(k)
                .or(targets.first())
                .copied()
                .unwrap_or_else(|| x.enumerate(1).ok().and_then(|v| v.first().copied()).unwrap_or(0))
        };
        let mut cur = ImpNode::root();
        for k in 0..want {
            let mut extended = false;
            for fv in 0..(4 * depth as u64) {
                let mut cand = cur.clone();
                cand.sigma = branch[..2 * (k + 1)].to_vec();
                cand.f.push(fv);
                cand.g.push(g_at(k));
                if imp_member(&cand, x, g, cfg)? {
                    chain.push(cand.clone());
                    cur = cand;
                    extended = true;
                    break;
                }
            }
            if !extended {
                break;
            }
        }
        // extensions are KB-smaller, so the chain is descending
        report.forward_chain_len = chain.len();
        if let Some(deepest) = chain.last() {
            // (⇒) recover from the witness
            report.recovered_branch_steps = deepest.steps();
            report.recovered_embedding_len = deepest.g.len();
            let mut ok = g.dend.hull_at(x, &deepest.sigma)?;
            for i in 0..deepest.g.len() {
                for j in (i + 1)..deepest.g.len() {
                    // indices i < j in the a-coded order must map X-increasing
                    if a_order.contains(i as u64)
                        && a_order.contains(j as u64)
                        && a_order.lt(i as u64, j as u64)
                        && !x.lt(deepest.g[i], deepest.g[j])
                    {
                        ok = false;
                    }
                }
            }
            report.embedding_order_preserved = ok;
        }
    } else {
        report.notes.push("no embedding of a(R) into X found".into());
    }
    if report.forward_chain_len == 0 {
        report
            .notes
            .push("no descending witness constructed at this probe".into());
    }
    Ok(report)
}

/// Search a descending witness in `Imp(X)` directly (bounded).
pub fn imp_descending(
    g: &GeneDendron,
    cfg: &ImpConfig,
    x: &LinearOrder,
    depth: usize,
) -> Option<DescendingWitness> {
    let f = imp_predilator(g, cfg);
    find_descending(&f.apply(x), depth).ok().flatten()
}

/// Machine codes for small orders, used as a/b codes in tests and the CLI.
/// All follow the two-argument convention: `{code}(i, j) = 0` iff `i ≤ j`.
pub mod codes {
    use super::*;
    use crate::oracle::gadgets::{add, c, not, p, sub};

    fn sub2(a: MachineCode, b: MachineCode) -> MachineCode {
        MachineCode::Compose(Box::new(sub()), vec![a, b])
    }
    fn add2(a: MachineCode, b: MachineCode) -> MachineCode {
        MachineCode::Compose(Box::new(add()), vec![a, b])
    }
    fn outside(v: MachineCode, n: u64) -> MachineCode {
        // 0 iff v < n
        sub2(MachineCode::Succ(Box::new(v)), c(n))
    }

    /// `0 < 1 < .. < n-1`: zero iff i ≤ j and both below n.
    pub fn finite_order(n: u64) -> MachineCode {
        add2(
            sub2(p(0), p(1)),
            add2(outside(p(0), n), outside(p(1), n)),
        )
    }

    /// The reversed order on 0..n (n-1 < .. < 0).
    pub fn finite_reversed(n: u64) -> MachineCode {
        add2(
            sub2(p(1), p(0)),
            add2(outside(p(0), n), outside(p(1), n)),
        )
    }

    /// ω*: field all of ℕ, `i ≤ j` iff `j ≤ i` over ℕ; codes an ill-founded
    /// order.
    pub fn omega_star() -> MachineCode {
        sub2(p(1), p(0))
    }

    /// Field filtered by the oracle: `i ≤ j` iff `R(i) = R(j) = 1` and
    /// `i ≤ j` over ℕ. Membership queries hit the oracle bits.
    pub fn oracle_filtered_omega() -> MachineCode {
        let qi = MachineCode::Query(Box::new(p(0)));
        let qj = MachineCode::Query(Box::new(p(1)));
        let both = MachineCode::Compose(Box::new(crate::oracle::gadgets::mul()), vec![qi, qj]);
        let miss = MachineCode::Compose(Box::new(not()), vec![both]);
        add2(sub2(p(0), p(1)), miss)
    }

    /// ω* filtered by the oracle: descending over ℕ-codes among oracle-set
    /// bits; ill-founded exactly when the real has infinitely many 1s.
    pub fn oracle_filtered_omega_star() -> MachineCode {
        let qi = MachineCode::Query(Box::new(p(0)));
        let qj = MachineCode::Query(Box::new(p(1)));
        let both = MachineCode::Compose(Box::new(crate::oracle::gadgets::mul()), vec![qi, qj]);
        let miss = MachineCode::Compose(Box::new(not()), vec![both]);
        add2(sub2(p(1), p(0)), miss)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::genedendron::{kernels, shoenfield};
    use crate::oracle::eval_u64;

    fn evens_oracle(bits: u64) -> PartialOracle {
        PartialOracle::from_pairs((0..bits).map(|k| (k, u64::from(k % 2 == 0))))
    }

    #[test]
    fn coded_orders_answer() {
        let c3 = codes::finite_order(3);
        let empty = PartialOracle::empty();
        assert!(eval_u64(&c3, &[0, 2], &empty, 10_000).is_value(0));
        assert!(eval_u64(&c3, &[1, 1], &empty, 10_000).is_value(0));
        assert!(!eval_u64(&c3, &[2, 0], &empty, 10_000).is_value(0));
        assert!(!eval_u64(&c3, &[3, 3], &empty, 10_000).is_value(0));

        let os = codes::omega_star();
        assert!(eval_u64(&os, &[5, 2], &empty, 10_000).is_value(0));
        assert!(!eval_u64(&os, &[2, 5], &empty, 10_000).is_value(0));

        let filt = codes::oracle_filtered_omega();
        let oracle = evens_oracle(6);
        assert!(eval_u64(&filt, &[0, 2], &oracle, 10_000).is_value(0));
        assert!(!eval_u64(&filt, &[0, 1], &oracle, 10_000).is_value(0));
        assert!(matches!(
            eval_u64(&filt, &[0, 8], &oracle, 10_000),
            EvalResult::Undecided(_)
        ));
    }

    fn evens_cfg(b: MachineCode) -> ImpConfig {
        ImpConfig {
            a_code: codes::finite_order(3),
            b_code: b,
            budget: 60_000,
        }
    }

    #[test]
    fn empty_node_is_member() {
        let g = shoenfield(kernels::evens());
        let cfg = evens_cfg(codes::finite_order(5));
        let x = LinearOrder::finite_init(2);
        assert!(imp_member(&ImpNode::root(), &x, &g, &cfg).unwrap());
    }

    #[test]
    fn refuted_descent_is_excluded() {
        let g = shoenfield(kernels::evens());
        let cfg = evens_cfg(codes::finite_order(5));
        let x = LinearOrder::finite_init(1);
        let branch = crate::dendroid::longest_branch_prefix(&g.dend, &x, 4, 6).unwrap();
        assert!(branch.len() >= 4);
        // f claims 1 then 3: an increase the (oracle-free) b-code decides
        let node = ImpNode {
            sigma: branch[..4].to_vec(),
            f: vec![1, 3],
            g: vec![0, 0],
        };
        assert!(!imp_member(&node, &x, &g, &cfg).unwrap());
        // a genuine descent passes
        let node2 = ImpNode {
            sigma: branch[..4].to_vec(),
            f: vec![3, 1],
            g: vec![0, 0],
        };
        // g must be X-increasing where a decides: indices 0,1 with g equal is
        // fine only if not decided increasing; keep g in field
        let _ = node2;
        let node3 = ImpNode {
            sigma: branch[..2].to_vec(),
            f: vec![3],
            g: vec![0],
        };
        assert!(imp_member(&node3, &x, &g, &cfg).unwrap());
    }

    #[test]
    fn tree_property_prefix_closed() {
        let g = shoenfield(kernels::evens());
        let cfg = evens_cfg(codes::finite_order(5));
        let x = LinearOrder::finite_init(1);
        let branch = crate::dendroid::longest_branch_prefix(&g.dend, &x, 8, 6).unwrap();
        let node = ImpNode {
            sigma: branch[..8].to_vec(),
            f: vec![4, 3, 2, 1],
            g: vec![0, 0, 0, 0],
        };
        if imp_member(&node, &x, &g, &cfg).unwrap() {
            for k in 0..4 {
                let prefix = ImpNode {
                    sigma: branch[..2 * k].to_vec(),
                    f: node.f[..k].to_vec(),
                    g: node.g[..k].to_vec(),
                };
                assert!(imp_member(&prefix, &x, &g, &cfg).unwrap(), "prefix {k}");
            }
        } else {
            panic!("expected the descending node to be a member");
        }
    }

    #[test]
    fn wellfounded_b_no_witness() {
        let g = shoenfield(kernels::evens());
        let cfg = evens_cfg(codes::finite_order(5));
        let x = LinearOrder::finite_init(2);
        assert!(imp_descending(&g, &cfg, &x, 15).is_none());
    }

    #[test]
    fn illfounded_b_witness_at_big_probe() {
        let g = shoenfield(kernels::evens());
        let cfg = ImpConfig {
            a_code: codes::finite_order(2),
            b_code: codes::omega_star(),
            budget: 60_000,
        };
        let x = LinearOrder::finite_init(3);
        let report = check_clause_ii(&g, &cfg, &x, 6).unwrap();
        assert!(report.forward_chain_len >= 4, "{report:?}");
        assert!(report.embedding_order_preserved);
        assert!(report.recovered_branch_steps >= 4);
    }

    #[test]
    fn empty_genedendron_vacuous() {
        let g = shoenfield(kernels::empty());
        let cfg = evens_cfg(codes::omega_star());
        let x = LinearOrder::finite_init(2);
        let report = check_clause_ii(&g, &cfg, &x, 5).unwrap();
        assert_eq!(report.forward_chain_len, 0);
    }

    #[test]
    fn embed_b_cases() {
        let g = shoenfield(kernels::evens());
        let x = LinearOrder::finite_init(1);
        let cfg = evens_cfg(codes::finite_reversed(4));
        let branch = crate::dendroid::longest_branch_prefix(&g.dend, &x, 14, 6).unwrap();
        let oracle = evens_oracle(8);
        let a_order = order_from_code("a", cfg.a_code.clone(), oracle.clone(), cfg.budget);
        let gmap = crate::order::find_embedding(&a_order, &x, 1)
            .unwrap()
            .unwrap_or_else(|| IncreasingMap::new(a_order, x.clone(), vec![]).unwrap());
        // b = reversed finite order: enumerated ℕ-increasingly 0,1,2,3 is
        // b-decreasing, so every element is a case-(2) extension except the
        // first.
        let nodes = embed_b(&branch, &gmap, &[0, 1, 2, 3], &cfg, &oracle).unwrap();
        assert_eq!(nodes.len(), 4);
        assert_eq!(nodes[0].steps(), 1);
        assert_eq!(nodes[3].steps(), 4);
        // order preservation: b-increasing (reversed: 3 < 2 < 1 < 0) maps to
        // KB-increasing images; check all pairs
        let flat: Vec<Seq> = nodes.iter().map(|n| n.flatten()).collect();
        for i in 0..4 {
            for j in 0..4 {
                if i == j {
                    continue;
                }
                let b_lt = i > j; // reversed order on ℕ-codes
                let kb = imp_cmp(&g, &x, &flat[i], &flat[j]);
                assert_eq!(
                    kb == Ordering::Less,
                    b_lt,
                    "pair {i},{j}: got {kb:?}"
                );
            }
        }
    }

    #[test]
    fn max_case_shape() {
        // spec example: a single maximal β gets the one-step node
        let g = shoenfield(kernels::evens());
        let x = LinearOrder::finite_init(1);
        let cfg = evens_cfg(codes::finite_order(1));
        let branch = crate::dendroid::longest_branch_prefix(&g.dend, &x, 6, 6).unwrap();
        let oracle = evens_oracle(8);
        let a_order = order_from_code("a", cfg.a_code.clone(), oracle.clone(), cfg.budget);
        let gmap = crate::order::find_embedding(&a_order, &x, 1).unwrap().unwrap();
        let nodes = embed_b(&branch, &gmap, &[0], &cfg, &oracle).unwrap();
        assert_eq!(nodes.len(), 1);
        assert_eq!(nodes[0].steps(), 1);
        assert_eq!(nodes[0].f, vec![0]);
        assert_eq!(nodes[0].g.len(), 1);
    }
}
