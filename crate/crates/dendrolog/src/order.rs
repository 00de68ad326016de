//! Linear orders over natural-number codes, increasing maps between them,
//! Kleene–Brouwer linearization of trees, the disjunction order, and the
//! bounded ill-foundedness / embedding probes everything else leans on.
//!
//! Ill-foundedness is only ever semi-decided here: searches return a witness
//! or "none found within budget", never a well-foundedness claim.

use crate::pairing::{pair, seq_decode, seq_encode, unpair};
use serde::{Deserialize, Serialize};
use std::cmp::Ordering;
use std::fmt;
use std::sync::Arc;

#[derive(Debug, thiserror::Error)]
pub enum OrderError {
    #[error("code {0} is not in the field of the order")]
    OutsideField(u64),
    #[error("order `{0}` has no element enumerator")]
    NoEnumerator(String),
    #[error("order `{0}` has no descending generator")]
    NoDescending(String),
    #[error("invalid increasing map: {0}")]
    BadMap(String),
    #[error("{0}")]
    Invalid(String),
}

pub type Result<T> = std::result::Result<T, OrderError>;

/// Well-foundedness status tag. `Unknown` is the honest default for anything
/// infinite that we did not build ourselves.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum WfStatus {
    WellFounded,
    Unknown,
    IllFounded,
}

enum Repr {
    /// Field elements listed in increasing order.
    Finite(Vec<u64>),
    /// All of ℕ with the usual order.
    Omega,
    /// All of ℕ with the reversed order.
    OmegaStar,
    Sum(LinearOrder, LinearOrder),
    Lex(LinearOrder, LinearOrder),
    /// Opaque comparator + field test, with optional capabilities.
    Derived {
        name: String,
        field: Arc<dyn Fn(u64) -> bool + Send + Sync>,
        cmp: Arc<dyn Fn(u64, u64) -> Ordering + Send + Sync>,
        /// Enumerate up to `n` field elements (any order); None = incapable.
        enumerate: Option<Arc<dyn Fn(usize) -> Vec<u64> + Send + Sync>>,
        /// Produce a strictly descending chain of length `n`; None = incapable.
        descending: Option<Arc<dyn Fn(usize) -> Option<Vec<u64>> + Send + Sync>>,
        /// Successor enumerator for the descent search: candidate elements
        /// strictly below the given one (tree children and smaller siblings
        /// for KB-style orders).
        descend: Option<Arc<dyn Fn(u64, usize) -> Vec<u64> + Send + Sync>>,
        wf: WfStatus,
    },
}

struct DerivedParts {
    name: String,
    field: Arc<dyn Fn(u64) -> bool + Send + Sync>,
    cmp: Arc<dyn Fn(u64, u64) -> Ordering + Send + Sync>,
    enumerate: Option<Arc<dyn Fn(usize) -> Vec<u64> + Send + Sync>>,
    descending: Option<Arc<dyn Fn(usize) -> Option<Vec<u64>> + Send + Sync>>,
    descend: Option<Arc<dyn Fn(u64, usize) -> Vec<u64> + Send + Sync>>,
    wf: WfStatus,
}

/// An immutable linear order on a set of natural-number codes.
#[derive(Clone)]
pub struct LinearOrder(Arc<Repr>);

impl fmt::Debug for LinearOrder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "LinearOrder({})", self.describe())
    }
}

impl LinearOrder {
    pub fn finite(codes: Vec<u64>) -> Self {
        LinearOrder(Arc::new(Repr::Finite(codes)))
    }

    /// `Finite[0, 1, .., n-1]`.
    pub fn finite_init(n: u64) -> Self {
        Self::finite((0..n).collect())
    }

    pub fn omega() -> Self {
        LinearOrder(Arc::new(Repr::Omega))
    }

    pub fn omega_star() -> Self {
        LinearOrder(Arc::new(Repr::OmegaStar))
    }

    /// Ordered sum: every element of `left` below every element of `right`.
    /// Elements are tagged: `pair(0, x)` from the left, `pair(1, x)` right.
    pub fn sum(left: LinearOrder, right: LinearOrder) -> Self {
        LinearOrder(Arc::new(Repr::Sum(left, right)))
    }

    /// Lexicographic product on `pair(a, b)` codes; `a` compared first.
    pub fn lex(first: LinearOrder, second: LinearOrder) -> Self {
        LinearOrder(Arc::new(Repr::Lex(first, second)))
    }

    pub fn derived(
        name: impl Into<String>,
        field: impl Fn(u64) -> bool + Send + Sync + 'static,
        cmp: impl Fn(u64, u64) -> Ordering + Send + Sync + 'static,
        wf: WfStatus,
    ) -> Self {
        LinearOrder(Arc::new(Repr::Derived {
            name: name.into(),
            field: Arc::new(field),
            cmp: Arc::new(cmp),
            enumerate: None,
            descending: None,
            descend: None,
            wf,
        }))
    }

    fn update_derived(self, f: impl FnOnce(&mut DerivedParts)) -> Self {
        if let Repr::Derived {
            name,
            field,
            cmp,
            enumerate,
            descending,
            descend,
            wf,
        } = &*self.0
        {
            let mut parts = DerivedParts {
                name: name.clone(),
                field: field.clone(),
                cmp: cmp.clone(),
                enumerate: enumerate.clone(),
                descending: descending.clone(),
                descend: descend.clone(),
                wf: *wf,
            };
            f(&mut parts);
            LinearOrder(Arc::new(Repr::Derived {
                name: parts.name,
                field: parts.field,
                cmp: parts.cmp,
                enumerate: parts.enumerate,
                descending: parts.descending,
                descend: parts.descend,
                wf: parts.wf,
            }))
        } else {
            self
        }
    }

    /// Attach an element enumerator to a derived order.
    pub fn with_enumerator(
        self,
        enumerate: impl Fn(usize) -> Vec<u64> + Send + Sync + 'static,
    ) -> Self {
        self.update_derived(|p| p.enumerate = Some(Arc::new(enumerate)))
    }

    /// Attach a descending-chain generator to a derived order.
    pub fn with_descending(
        self,
        descending: impl Fn(usize) -> Option<Vec<u64>> + Send + Sync + 'static,
    ) -> Self {
        self.update_derived(|p| p.descending = Some(Arc::new(descending)))
    }

    /// Attach a descent successor enumerator to a derived order.
    pub fn with_descend(
        self,
        descend: impl Fn(u64, usize) -> Vec<u64> + Send + Sync + 'static,
    ) -> Self {
        self.update_derived(|p| p.descend = Some(Arc::new(descend)))
    }

    pub fn describe(&self) -> String {
        match &*self.0 {
            Repr::Finite(v) => format!("fin:{}", v.len()),
            Repr::Omega => "omega".into(),
            Repr::OmegaStar => "omegastar".into(),
            Repr::Sum(a, b) => format!("sum({},{})", a.describe(), b.describe()),
            Repr::Lex(a, b) => format!("lex({},{})", a.describe(), b.describe()),
            Repr::Derived { name, .. } => name.clone(),
        }
    }

    pub fn contains(&self, code: u64) -> bool {
        match &*self.0 {
            Repr::Finite(v) => v.contains(&code),
            Repr::Omega | Repr::OmegaStar => true,
            Repr::Sum(a, b) => {
                let (tag, x) = unpair(code);
                match tag {
                    0 => a.contains(x),
                    1 => b.contains(x),
                    _ => false,
                }
            }
            Repr::Lex(a, b) => {
                let (x, y) = unpair(code);
                a.contains(x) && b.contains(y)
            }
            Repr::Derived { field, .. } => field(code),
        }
    }

    /// Total comparison on field members. Callers are expected to have
    /// checked membership; on non-members the result is unspecified but
    /// still deterministic.
    pub fn cmp(&self, x: u64, y: u64) -> Ordering {
        match &*self.0 {
            Repr::Finite(v) => {
                let ix = v.iter().position(|&c| c == x);
                let iy = v.iter().position(|&c| c == y);
                ix.cmp(&iy)
            }
            Repr::Omega => x.cmp(&y),
            Repr::OmegaStar => y.cmp(&x),
            Repr::Sum(a, b) => {
                let (tx, px) = unpair(x);
                let (ty, py) = unpair(y);
                match tx.cmp(&ty) {
                    Ordering::Equal => {
                        if tx == 0 {
                            a.cmp(px, py)
                        } else {
                            b.cmp(px, py)
                        }
                    }
                    other => other,
                }
            }
            Repr::Lex(a, b) => {
                let (xa, xb) = unpair(x);
                let (ya, yb) = unpair(y);
                match a.cmp(xa, ya) {
                    Ordering::Equal => b.cmp(xb, yb),
                    other => other,
                }
            }
            Repr::Derived { cmp, .. } => cmp(x, y),
        }
    }

    pub fn lt(&self, x: u64, y: u64) -> bool {
        self.cmp(x, y) == Ordering::Less
    }

    pub fn le(&self, x: u64, y: u64) -> bool {
        self.cmp(x, y) != Ordering::Greater
    }

    /// Up to `n` field elements. For `Finite` and `Omega` the enumeration is
    /// in increasing order; for other orders it is just a field sample.
    pub fn enumerate(&self, n: usize) -> Result<Vec<u64>> {
        match &*self.0 {
            Repr::Finite(v) => Ok(v.iter().take(n).copied().collect()),
            Repr::Omega | Repr::OmegaStar => Ok((0..n as u64).collect()),
            Repr::Sum(a, b) => {
                let mut out: Vec<u64> = a.enumerate(n)?.into_iter().map(|x| pair(0, x)).collect();
                for x in b.enumerate(n.saturating_sub(out.len()))? {
                    out.push(pair(1, x));
                }
                Ok(out)
            }
            Repr::Lex(a, b) => {
                let xs = a.enumerate(n)?;
                let ys = b.enumerate(n)?;
                let mut out = Vec::new();
                'outer: for &x in &xs {
                    for &y in &ys {
                        if out.len() >= n {
                            break 'outer;
                        }
                        out.push(pair(x, y));
                    }
                }
                Ok(out)
            }
            Repr::Derived {
                name, enumerate, ..
            } => match enumerate {
                Some(f) => Ok(f(n)),
                None => Err(OrderError::NoEnumerator(name.clone())),
            },
        }
    }

    /// A strictly descending chain of length `n`, if this order knows how to
    /// produce one.
    pub fn descending_chain(&self, n: usize) -> Result<Option<Vec<u64>>> {
        match &*self.0 {
            Repr::Finite(v) => {
                if v.len() >= n {
                    Ok(Some(v.iter().rev().take(n).copied().collect()))
                } else {
                    Ok(None)
                }
            }
            Repr::Omega => Ok(None),
            Repr::OmegaStar => Ok(Some((0..n as u64).collect())),
            Repr::Sum(a, b) => {
                if let Some(c) = b.descending_chain(n)? {
                    return Ok(Some(c.into_iter().map(|x| pair(1, x)).collect()));
                }
                Ok(a.descending_chain(n)?
                    .map(|c| c.into_iter().map(|x| pair(0, x)).collect()))
            }
            Repr::Lex(a, b) => {
                if let Some(c) = b.descending_chain(n)? {
                    let x = a.enumerate(1)?;
                    if let Some(&x0) = x.first() {
                        return Ok(Some(c.into_iter().map(|y| pair(x0, y)).collect()));
                    }
                }
                Ok(a.descending_chain(n)?.and_then(|c| {
                    b.enumerate(1).ok().and_then(|ys| {
                        ys.first().map(|&y0| c.into_iter().map(|x| pair(x, y0)).collect())
                    })
                }))
            }
            Repr::Derived {
                name, descending, ..
            } => match descending {
                Some(f) => Ok(f(n)),
                None => Err(OrderError::NoDescending(name.clone())),
            },
        }
    }

    /// Candidate elements strictly below `x` for the descent search. The
    /// built-in orders step to the immediate smaller element (or into the
    /// other summand/coordinate); derived orders use their attached descent
    /// enumerator if any.
    pub fn descend_candidates(&self, x: u64, breadth: usize) -> Vec<u64> {
        match &*self.0 {
            Repr::Finite(v) => {
                let pos = v.iter().position(|&c| c == x);
                match pos {
                    Some(p) => v[..p].iter().rev().take(breadth).copied().collect(),
                    None => vec![],
                }
            }
            Repr::Omega => {
                if x > 0 {
                    vec![x - 1]
                } else {
                    vec![]
                }
            }
            Repr::OmegaStar => vec![x.saturating_add(1)],
            Repr::Sum(a, b) => {
                let (tag, y) = unpair(x);
                if tag == 1 {
                    let mut out: Vec<u64> = b
                        .descend_candidates(y, breadth)
                        .into_iter()
                        .map(|z| pair(1, z))
                        .collect();
                    // step down into the left summand
                    if let Ok(mut tops) = a.enumerate(breadth) {
                        tops.sort_by(|&p, &q| a.cmp(q, p));
                        out.extend(tops.into_iter().take(2).map(|z| pair(0, z)));
                    }
                    out
                } else {
                    a.descend_candidates(y, breadth)
                        .into_iter()
                        .map(|z| pair(0, z))
                        .collect()
                }
            }
            Repr::Lex(a, b) => {
                let (xa, xb) = unpair(x);
                let mut out: Vec<u64> = b
                    .descend_candidates(xb, breadth)
                    .into_iter()
                    .map(|z| pair(xa, z))
                    .collect();
                if let Ok(mut tops) = b.enumerate(breadth) {
                    tops.sort_by(|&p, &q| b.cmp(q, p));
                    for za in a.descend_candidates(xa, 2) {
                        out.extend(tops.iter().take(2).map(|&zb| pair(za, zb)));
                    }
                }
                out
            }
            Repr::Derived { descend, .. } => match descend {
                Some(f) => f(x, breadth),
                None => vec![],
            },
        }
    }

    pub fn has_descend(&self) -> bool {
        match &*self.0 {
            Repr::Derived { descend, .. } => descend.is_some(),
            _ => true,
        }
    }

    pub fn wf_status(&self) -> WfStatus {
        match &*self.0 {
            Repr::Finite(_) => WfStatus::WellFounded,
            Repr::Omega => WfStatus::WellFounded,
            Repr::OmegaStar => WfStatus::IllFounded,
            Repr::Sum(a, b) | Repr::Lex(a, b) => match (a.wf_status(), b.wf_status()) {
                (WfStatus::WellFounded, WfStatus::WellFounded) => WfStatus::WellFounded,
                (WfStatus::IllFounded, _) | (_, WfStatus::IllFounded) => WfStatus::IllFounded,
                _ => WfStatus::Unknown,
            },
            Repr::Derived { wf, .. } => *wf,
        }
    }

    /// JSON descriptor per the documented serialization.
    pub fn to_json(&self) -> serde_json::Value {
        match &*self.0 {
            Repr::Finite(v) => serde_json::json!({"kind": "finite", "codes": v}),
            Repr::Omega => serde_json::json!({"kind": "omega"}),
            Repr::OmegaStar => serde_json::json!({"kind": "omegastar"}),
            Repr::Sum(a, b) => serde_json::json!({"kind": "sum", "left": a.to_json(), "right": b.to_json()}),
            Repr::Lex(a, b) => serde_json::json!({"kind": "lex", "first": a.to_json(), "second": b.to_json()}),
            Repr::Derived { name, wf, .. } => {
                serde_json::json!({"kind": "derived", "name": name, "wf": wf})
            }
        }
    }

    /// Parse an order spec as used by the CLI: `fin:n`, `omega`, `omegastar`.
    pub fn parse_spec(spec: &str) -> Result<LinearOrder> {
        if let Some(n) = spec.strip_prefix("fin:") {
            let n: u64 = n
                .parse()
                .map_err(|_| OrderError::Invalid(format!("bad order spec `{spec}`")))?;
            return Ok(LinearOrder::finite_init(n));
        }
        match spec {
            "omega" => Ok(LinearOrder::omega()),
            "omegastar" => Ok(LinearOrder::omega_star()),
            _ => Err(OrderError::Invalid(format!("bad order spec `{spec}`"))),
        }
    }
}

/// A finite increasing partial map between two linear orders.
#[derive(Clone, Debug)]
pub struct IncreasingMap {
    pub domain: LinearOrder,
    pub codomain: LinearOrder,
    /// (source, target) pairs, sorted increasingly in the domain order.
    pub pairs: Vec<(u64, u64)>,
}

impl IncreasingMap {
    pub fn new(
        domain: LinearOrder,
        codomain: LinearOrder,
        mut pairs: Vec<(u64, u64)>,
    ) -> Result<Self> {
        for &(s, t) in &pairs {
            if !domain.contains(s) {
                return Err(OrderError::BadMap(format!("source {s} outside domain")));
            }
            if !codomain.contains(t) {
                return Err(OrderError::BadMap(format!("target {t} outside codomain")));
            }
        }
        pairs.sort_by(|a, b| domain.cmp(a.0, b.0));
        for w in pairs.windows(2) {
            if domain.cmp(w[0].0, w[1].0) != Ordering::Less {
                return Err(OrderError::BadMap("duplicate source".into()));
            }
            if codomain.cmp(w[0].1, w[1].1) != Ordering::Less {
                return Err(OrderError::BadMap(format!(
                    "not increasing: {} -> {} vs {} -> {}",
                    w[0].0, w[0].1, w[1].0, w[1].1
                )));
            }
        }
        Ok(IncreasingMap {
            domain,
            codomain,
            pairs,
        })
    }

    pub fn identity(order: &LinearOrder, codes: Vec<u64>) -> Self {
        IncreasingMap {
            domain: order.clone(),
            codomain: order.clone(),
            pairs: codes.into_iter().map(|c| (c, c)).collect(),
        }
    }

    pub fn apply(&self, code: u64) -> Option<u64> {
        self.pairs.iter().find(|&&(s, _)| s == code).map(|&(_, t)| t)
    }

    pub fn preimage(&self, code: u64) -> Option<u64> {
        self.pairs.iter().find(|&&(_, t)| t == code).map(|&(s, _)| s)
    }

    /// `self ∘ other` (apply `other` first).
    pub fn compose(&self, other: &IncreasingMap) -> IncreasingMap {
        let pairs = other
            .pairs
            .iter()
            .filter_map(|&(s, m)| self.apply(m).map(|t| (s, t)))
            .collect();
        IncreasingMap {
            domain: other.domain.clone(),
            codomain: self.codomain.clone(),
            pairs,
        }
    }

    pub fn sources(&self) -> Vec<u64> {
        self.pairs.iter().map(|&(s, _)| s).collect()
    }
    pub fn targets(&self) -> Vec<u64> {
        self.pairs.iter().map(|&(_, t)| t).collect()
    }
}

/// A strictly descending sequence, the witness format for ill-foundedness
/// probes.
#[derive(Clone, Debug, Serialize)]
pub struct DescendingWitness {
    pub sequence: Vec<u64>,
}

impl DescendingWitness {
    /// Check the defining invariant against `order`.
    pub fn validate(&self, order: &LinearOrder) -> bool {
        self.sequence
            .windows(2)
            .all(|w| order.cmp(w[1], w[0]) == Ordering::Less)
    }
}

/// Kleene–Brouwer comparison of two sequences given a component comparator,
/// in the classic convention: a proper extension is *smaller* than its
/// prefix; at the first differing position the base-smaller component wins.
pub fn kb_cmp_by<F: Fn(u64, u64) -> Ordering>(xs: &[u64], ys: &[u64], cmp: F) -> Ordering {
    let n = xs.len().min(ys.len());
    for i in 0..n {
        match cmp(xs[i], ys[i]) {
            Ordering::Equal => continue,
            other => return other,
        }
    }
    // One is a prefix of the other; the longer (proper extension) is smaller.
    ys.len().cmp(&xs.len())
}

/// Kleene–Brouwer linearization of an explicit finite tree of sequences over
/// `base`. Node codes are sequence codes. The tree must be closed under
/// initial segments and all components must lie in `base`'s field.
pub fn kb_linearize(tree: &[Vec<u64>], base: &LinearOrder) -> Result<LinearOrder> {
    for node in tree {
        for &c in node {
            if !base.contains(c) {
                return Err(OrderError::OutsideField(c));
            }
        }
    }
    for node in tree {
        if !node.is_empty() {
            let prefix = &node[..node.len() - 1];
            if !tree.iter().any(|m| m.as_slice() == prefix) {
                return Err(OrderError::Invalid(format!(
                    "tree not closed under initial segments at {node:?}"
                )));
            }
        }
    }
    let mut codes: Vec<u64> = tree.iter().map(|n| seq_encode(n)).collect();
    codes.sort_unstable();
    codes.dedup();
    let base2 = base.clone();
    let mut sorted = codes.clone();
    sorted.sort_by(|&x, &y| kb_cmp_by(&seq_decode(x), &seq_decode(y), |a, b| base2.cmp(a, b)));
    Ok(LinearOrder::finite(sorted))
}

/// The components of a disjunction-order node: a sequence of `pair(a, b)`
/// codes with both projections strictly decreasing.
fn disjunction_node_ok(node: &[u64], a: &LinearOrder, b: &LinearOrder) -> bool {
    for &c in node {
        let (x, y) = unpair(c);
        if !a.contains(x) || !b.contains(y) {
            return false;
        }
    }
    node.windows(2).all(|w| {
        let (x0, y0) = unpair(w[0]);
        let (x1, y1) = unpair(w[1]);
        a.cmp(x1, x0) == Ordering::Less && b.cmp(y1, y0) == Ordering::Less
    })
}

/// The disjunction order: KB over the tree of simultaneous strictly
/// decreasing sequences of `a` and `b`. Pairs at the first differing
/// position are compared lexicographically over raw ℕ codes, which keeps
/// the node labels well-ordered independently of `a` and `b`.
pub fn disjunction(a: &LinearOrder, b: &LinearOrder) -> LinearOrder {
    let (fa, fb) = (a.clone(), b.clone());
    let (ea, eb) = (a.clone(), b.clone());
    let (da, db) = (a.clone(), b.clone());
    let name = format!("disj({},{})", a.describe(), b.describe());
    let wf = match (a.wf_status(), b.wf_status()) {
        (WfStatus::WellFounded, _) | (_, WfStatus::WellFounded) => WfStatus::WellFounded,
        (WfStatus::IllFounded, WfStatus::IllFounded) => WfStatus::IllFounded,
        _ => WfStatus::Unknown,
    };
    LinearOrder::derived(
        name,
        move |code| disjunction_node_ok(&seq_decode(code), &fa, &fb),
        move |x, y| {
            kb_cmp_by(&seq_decode(x), &seq_decode(y), |p, q| {
                let (pa, pb) = unpair(p);
                let (qa, qb) = unpair(q);
                pa.cmp(&qa).then(pb.cmp(&qb))
            })
        },
        wf,
    )
    .with_enumerator(move |n| {
        // Small-code sweep; enough for desk-scale probes.
        let cap = (n as u64).saturating_mul(600).max(4_096);
        let mut out = Vec::new();
        for code in 0..cap {
            if out.len() >= n {
                break;
            }
            if disjunction_node_ok(&seq_decode(code), &ea, &eb) {
                out.push(code);
            }
        }
        out
    })
    .with_descend({
        let (sa, sb) = (a.clone(), b.clone());
        move |code, breadth| {
            // one-step tree extensions plus raw-lex smaller siblings
            let node = seq_decode(code);
            let avals = sa.enumerate(breadth).unwrap_or_default();
            let bvals = sb.enumerate(breadth).unwrap_or_default();
            let mut cands: Vec<u64> = Vec::new();
            for &av in &avals {
                for &bv in &bvals {
                    cands.push(pair(av, bv));
                }
            }
            let mut out = Vec::new();
            for &c in &cands {
                // extension
                let mut ext = node.clone();
                ext.push(c);
                if disjunction_node_ok(&ext, &sa, &sb) {
                    out.push(seq_encode(&ext));
                }
                // smaller sibling (raw-lex on the last pair)
                if let Some(&last) = node.last() {
                    if c < last {
                        let mut sib = node[..node.len() - 1].to_vec();
                        sib.push(c);
                        if disjunction_node_ok(&sib, &sa, &sb) {
                            out.push(seq_encode(&sib));
                        }
                    }
                }
            }
            out
        }
    })
    .with_descending(move |n| {
        // Constant-a, descending-b single-node chains, raw-lex decreasing.
        let avals = da.enumerate(1).ok()?;
        let &a0 = avals.first()?;
        let bdesc = db.descending_chain(n).ok()??;
        // Nodes <(a0, b_i)>, compared raw-lex at position 0: need raw codes
        // decreasing, so sort the b-chain's codes descending by ℕ.
        let mut codes: Vec<u64> = bdesc.iter().map(|&bv| pair(a0, bv)).collect();
        codes.sort_unstable_by(|x, y| y.cmp(x));
        codes.dedup();
        if codes.len() < n {
            return None;
        }
        Some(codes.into_iter().take(n).map(|c| seq_encode(&[c])).collect())
    })
}

/// Bounded ill-foundedness probe: depth-first search over the order's
/// descent enumerator, started from an enumerated sample of elements. A
/// fast descending generator, when the order has one, is tried first.
/// Absence of a witness is never a well-foundedness proof.
pub fn find_descending(order: &LinearOrder, depth: usize) -> Result<Option<DescendingWitness>> {
    assert!(depth >= 1, "depth must be >= 1");
    if let Ok(Some(chain)) = order.descending_chain(depth) {
        let w = DescendingWitness { sequence: chain };
        if w.validate(order) {
            return Ok(Some(w));
        }
    }
    if !order.has_descend() {
        // No search capability beyond the generator; report the attempt.
        return match order.enumerate(1) {
            Ok(_) => Ok(None),
            Err(e) => Err(e),
        };
    }
    let breadth = depth.saturating_add(6);
    let mut starts = order.enumerate(depth.saturating_mul(4).max(16))?;
    starts.retain(|&c| order.contains(c));
    starts.sort_by(|&x, &y| order.cmp(y, x));
    starts.dedup();

    let mut visited = 0usize;
    fn dfs(
        order: &LinearOrder,
        chain: &mut Vec<u64>,
        depth: usize,
        breadth: usize,
        visited: &mut usize,
    ) -> bool {
        if chain.len() == depth {
            return true;
        }
        if *visited > 50_000 {
            return false;
        }
        let cur = *chain.last().unwrap();
        for cand in order.descend_candidates(cur, breadth) {
            if !order.contains(cand) || order.cmp(cand, cur) != Ordering::Less {
                continue;
            }
            *visited += 1;
            chain.push(cand);
            if dfs(order, chain, depth, breadth, visited) {
                return true;
            }
            chain.pop();
        }
        false
    }
    for start in starts {
        let mut chain = vec![start];
        if dfs(order, &mut chain, depth, breadth, &mut visited) {
            let w = DescendingWitness { sequence: chain };
            debug_assert!(w.validate(order));
            return Ok(Some(w));
        }
    }
    Ok(None)
}

/// Greedy bounded embedding search: map the first `depth` enumerated
/// elements of `a` (taken in `a`-order) increasingly into `b`.
pub fn find_embedding(
    a: &LinearOrder,
    b: &LinearOrder,
    depth: usize,
) -> Result<Option<IncreasingMap>> {
    let mut sources = a.enumerate(depth)?;
    sources.sort_by(|&x, &y| a.cmp(x, y));
    sources.dedup_by(|x, y| a.cmp(*x, *y) == Ordering::Equal);
    let mut candidates = b.enumerate(depth.saturating_mul(8).max(64))?;
    candidates.sort_by(|&x, &y| b.cmp(x, y));
    candidates.dedup_by(|x, y| b.cmp(*x, *y) == Ordering::Equal);
    let mut pairs = Vec::new();
    let mut it = candidates.into_iter();
    for s in sources {
        match it.next() {
            Some(t) => pairs.push((s, t)),
            None => return Ok(None),
        }
    }
    Ok(Some(IncreasingMap::new(a.clone(), b.clone(), pairs)?))
}

/// The Lemma-2.7 clause (3) construction restricted to the first `k`
/// elements of `a`: when `b` can produce a descending chain, `a` embeds into
/// `disjunction(a, b)` via nested pair-descent nodes.
pub fn embed_into_disjunction(
    a: &LinearOrder,
    b: &LinearOrder,
    k: usize,
) -> Result<Option<IncreasingMap>> {
    let disj = disjunction(a, b);
    let mut xs = a.enumerate(k)?;
    xs.sort_by(|&p, &q| a.cmp(p, q));
    xs.dedup_by(|p, q| a.cmp(*p, *q) == Ordering::Equal);
    if xs.is_empty() {
        return Ok(Some(IncreasingMap {
            domain: a.clone(),
            codomain: disj,
            pairs: vec![],
        }));
    }
    let k = xs.len();
    let bchain = match b.descending_chain(k)? {
        Some(c) => c,
        None => return Ok(None),
    };
    // e(x_j) = <(x_{k-1}, b_0), (x_{k-2}, b_1), .., (x_j, b_{k-1-j})>; longer
    // nodes are KB-smaller, so smaller x_j get longer (smaller) nodes.
    let mut pairs = Vec::new();
    for (j, &xj) in xs.iter().enumerate() {
        let mut node = Vec::new();
        for (step, idx) in ((j..k).rev()).enumerate() {
            node.push(pair(xs[idx], bchain[step]));
        }
        pairs.push((xj, seq_encode(&node)));
    }
    Ok(Some(IncreasingMap::new(a.clone(), disj, pairs)?))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn seqs(items: &[&[u64]]) -> Vec<Vec<u64>> {
        items.iter().map(|s| s.to_vec()).collect()
    }

    #[test]
    fn kb_small_tree() {
        // tree {<>, <0>, <1>, <0,0>} over Finite[0,1]:
        // <0,0> < <0> < <1> < <>
        let base = LinearOrder::finite(vec![0, 1]);
        let tree = seqs(&[&[], &[0], &[1], &[0, 0]]);
        let order = kb_linearize(&tree, &base).unwrap();
        let expect = [
            seq_encode(&[0, 0]),
            seq_encode(&[0]),
            seq_encode(&[1]),
            seq_encode(&[]),
        ];
        let got = order.enumerate(4).unwrap();
        assert_eq!(got, expect);
    }

    #[test]
    fn kb_singleton() {
        let base = LinearOrder::finite(vec![]);
        let order = kb_linearize(&seqs(&[&[]]), &base).unwrap();
        assert_eq!(order.enumerate(10).unwrap().len(), 1);
    }

    #[test]
    fn kb_component_outside_base_is_error() {
        let base = LinearOrder::finite(vec![0]);
        assert!(kb_linearize(&seqs(&[&[], &[7]]), &base).is_err());
    }

    #[test]
    fn kb_full_binary_depth3_is_linear() {
        let base = LinearOrder::finite(vec![0, 1]);
        let mut tree = vec![vec![]];
        for d in 1..=3usize {
            for pattern in 0..(1u64 << d) {
                let node: Vec<u64> = (0..d).map(|i| (pattern >> i) & 1).collect();
                tree.push(node);
            }
        }
        assert_eq!(tree.len(), 15);
        let order = kb_linearize(&tree, &base).unwrap();
        let elems = order.enumerate(20).unwrap();
        assert_eq!(elems.len(), 15);
        // exhaustive totality / antisymmetry / transitivity
        for &x in &elems {
            assert_eq!(order.cmp(x, x), Ordering::Equal);
            for &y in &elems {
                let xy = order.cmp(x, y);
                assert_eq!(xy, order.cmp(y, x).reverse());
                for &z in &elems {
                    if xy == Ordering::Less && order.cmp(y, z) == Ordering::Less {
                        assert_eq!(order.cmp(x, z), Ordering::Less);
                    }
                }
            }
        }
        // no descending chain longer than the node count
        assert!(find_descending(&order, 16).unwrap().is_none());
    }

    #[test]
    fn find_descending_probes() {
        let w = find_descending(&LinearOrder::omega_star(), 5).unwrap().unwrap();
        assert_eq!(w.sequence, vec![0, 1, 2, 3, 4]);
        assert!(find_descending(&LinearOrder::finite(vec![0, 1, 2]), 4)
            .unwrap()
            .is_none());
    }

    #[test]
    fn disjunction_finite_finite_is_wf_at_depth() {
        let a = LinearOrder::finite(vec![0, 1, 2]);
        let b = LinearOrder::finite(vec![0, 1]);
        let d = disjunction(&a, &b);
        assert_eq!(d.enumerate(64).unwrap().len(), 10);
        // the descent search follows extensions and smaller siblings, and
        // both directions die quickly on a finite disjunction
        assert!(find_descending(&d, 10).unwrap().is_none());
        assert!(find_descending(&d, 7).unwrap().is_none());
        assert!(find_descending(&d, 3).unwrap().is_some());
    }

    #[test]
    fn disjunction_of_empties_is_singleton() {
        let a = LinearOrder::finite(vec![]);
        let d = disjunction(&a, &a);
        let elems = d.enumerate(10).unwrap();
        assert_eq!(elems, vec![seq_encode(&[])]);
    }

    #[test]
    fn disjunction_with_omegastar_descends() {
        let a = LinearOrder::finite(vec![0, 1, 2]);
        let d = disjunction(&a, &LinearOrder::omega_star());
        let w = find_descending(&d, 8).unwrap().expect("witness");
        assert!(w.validate(&d));
        assert_eq!(w.sequence.len(), 8);

        let d2 = disjunction(&LinearOrder::finite(vec![0]), &LinearOrder::omega_star());
        assert!(find_descending(&d2, 6).unwrap().is_some());
    }

    #[test]
    fn embedding_examples() {
        let m = find_embedding(&LinearOrder::finite(vec![0, 1]), &LinearOrder::finite(vec![5, 7, 9]), 2)
            .unwrap()
            .unwrap();
        assert_eq!(m.pairs, vec![(0, 5), (1, 7)]);
        assert!(
            find_embedding(&LinearOrder::finite(vec![0]), &LinearOrder::finite(vec![]), 1)
                .unwrap()
                .is_none()
        );
        let m = find_embedding(&LinearOrder::finite(vec![0, 1, 2]), &LinearOrder::omega(), 3)
            .unwrap()
            .unwrap();
        assert_eq!(m.pairs, vec![(0, 0), (1, 1), (2, 2)]);
    }

    #[test]
    fn embed_into_disjunction_is_increasing() {
        let a = LinearOrder::finite(vec![3, 1, 4, 1, 5].into_iter().collect::<std::collections::BTreeSet<_>>().into_iter().collect());
        let b = LinearOrder::omega_star();
        for k in 1..=4 {
            let m = embed_into_disjunction(&a, &b, k).unwrap().unwrap();
            let disj = m.codomain.clone();
            for w in m.pairs.windows(2) {
                assert_eq!(a.cmp(w[0].0, w[1].0), Ordering::Less);
                assert_eq!(disj.cmp(w[0].1, w[1].1), Ordering::Less, "not increasing at k={k}");
                assert!(disj.contains(w[0].1) && disj.contains(w[1].1));
            }
        }
    }

    #[test]
    fn map_composition_identity() {
        let o = LinearOrder::finite(vec![0, 1, 2, 3]);
        let f = IncreasingMap::new(o.clone(), o.clone(), vec![(0, 1), (1, 2)]).unwrap();
        let id = IncreasingMap::identity(&o, vec![0, 1, 2, 3]);
        assert_eq!(id.compose(&f).pairs, f.pairs);
        assert_eq!(f.compose(&id).pairs, f.pairs);
    }
}
