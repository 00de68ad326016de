//! Genedendrons: prequasidendroids paired with a monotone, functorial
//! extraction map from branch prefixes to finite partial reals. Two
//! constructors: the Shoenfield-tree dendroid of a kernel tree over ω×ω×ω,
//! and the inductive-logic dendroid whose extraction reads fixpoint atoms
//! off preproof sequents.

use crate::betalogic::{self, den, generate, OperatorTemplate, Preproof, Sequent, SystemId};
use crate::dendroid::{longest_branch_prefix, Atom, Prequasidendroid, Seq};
use crate::dilator::{climax_bounded, Predilator};
use crate::order::LinearOrder;
use crate::pairing::{pair, seq_decode, unpair};
use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

#[derive(Debug, thiserror::Error)]
pub enum GeneError {
    #[error("kernel is not a tree: {0}")]
    NotATree(String),
    #[error("{0}")]
    Beta(#[from] betalogic::BetaError),
    #[error("{0}")]
    Dendroid(#[from] crate::dendroid::DendroidError),
}

pub type Result<T> = std::result::Result<T, GeneError>;

type ExtractFn = dyn Fn(&LinearOrder, &[Atom]) -> BTreeMap<u64, u64> + Send + Sync;

/// A prequasidendroid with an extraction scheme.
#[derive(Clone)]
pub struct GeneDendron {
    pub dend: Prequasidendroid,
    extract: Arc<ExtractFn>,
    pub generates_label: String,
}

impl GeneDendron {
    /// The decided bits read off a branch prefix of the `alpha`-instantiation.
    pub fn extract(&self, alpha: &LinearOrder, prefix: &[Atom]) -> BTreeMap<u64, u64> {
        (self.extract)(alpha, prefix)
    }
}

// ---------------------------------------------------------------------------
// The canonical enumeration of finite sequences

/// Horizon of the pairwise-incomparable prefix of the canonical enumeration.
pub const SEQ_HORIZON: u64 = 32;

/// The repo-canonical enumeration of ℕ^{<ω}: an initial antichain of probes
/// `s_i = <i>⌢0^i` for `i < 32`, then the empty sequence, then every
/// remaining sequence in code order.
pub fn canonical_seq(i: u64) -> Vec<u64> {
    if i < SEQ_HORIZON {
        let mut s = vec![i];
        s.extend(std::iter::repeat(0).take(i as usize));
        return s;
    }
    if i == SEQ_HORIZON {
        return vec![];
    }
    // Remaining sequences in code order, skipping the ones already listed.
    let listed_early = |s: &[u64]| -> bool {
        if s.is_empty() {
            return true;
        }
        let k = s[0];
        k < SEQ_HORIZON && s.len() as u64 == k + 1 && s[1..].iter().all(|&x| x == 0)
    };
    let mut remaining = i - SEQ_HORIZON - 1;
    let mut code = 0u64;
    loop {
        let s = seq_decode(code);
        if !listed_early(&s) {
            if remaining == 0 {
                return s;
            }
            remaining -= 1;
        }
        code += 1;
    }
}

// ---------------------------------------------------------------------------
// Kernel trees over ω×ω×ω

type KernelFn = dyn Fn(&[(u64, u64, u64)]) -> bool + Send + Sync;

/// A decidable tree of triples `(z, t, u)`.
#[derive(Clone)]
pub struct KernelTree {
    name: String,
    member: Arc<KernelFn>,
}

impl KernelTree {
    pub fn new(
        name: impl Into<String>,
        member: impl Fn(&[(u64, u64, u64)]) -> bool + Send + Sync + 'static,
    ) -> Result<Self> {
        let t = KernelTree {
            name: name.into(),
            member: Arc::new(member),
        };
        t.validate_sampled()?;
        Ok(t)
    }

    pub fn contains(&self, node: &[(u64, u64, u64)]) -> bool {
        (self.member)(node)
    }

    /// Bounded structural validation: the empty node is in, and membership
    /// is closed under initial segments on a small sample.
    fn validate_sampled(&self) -> Result<()> {
        if !self.contains(&[]) {
            return Err(GeneError::NotATree(format!(
                "{}: empty node not a member",
                self.name
            )));
        }
        for a in 0..4u64 {
            for b in 0..3u64 {
                for c in 0..3u64 {
                    let node = [(a, b, c), (a, c, b), (0, 0, 0)];
                    for k in (1..=3).rev() {
                        if self.contains(&node[..k]) && !self.contains(&node[..k - 1]) {
                            return Err(GeneError::NotATree(format!(
                                "{}: not closed under initial segments at {:?}",
                                self.name,
                                &node[..k]
                            )));
                        }
                    }
                }
            }
        }
        Ok(())
    }

    pub fn name(&self) -> &str {
        &self.name
    }
}

/// Hand-built kernels with documented intended reals.
pub mod kernels {
    use super::*;

    pub fn evens_bit(k: u64) -> u64 {
        u64::from(k % 2 == 0)
    }

    /// The evens kernel: `t` and `z` pinned to zero along probe-shaped
    /// `s`-components, `u` pinned to the evens real on every position the
    /// probe reaches. Generates `R(k) = 1` iff `k` even.
    pub fn evens() -> KernelTree {
        KernelTree::new("evens", |node| {
            let l = node.len();
            // z-components must be probe-shaped: <k>⌢0^(l-1)
            if l > 1 && node[1..].iter().any(|&(z, _, _)| z != 0) {
                return false;
            }
            node.iter()
                .enumerate()
                .all(|(i, &(_, t, u))| t == 0 && u == evens_bit(i as u64))
        })
        .expect("evens kernel is a tree")
    }

    /// The empty-ish kernel: only the empty node.
    pub fn empty() -> KernelTree {
        KernelTree::new("empty", |node| node.is_empty()).expect("trivially a tree")
    }
}

// ---------------------------------------------------------------------------
// The Shoenfield-tree genedendron

struct ShoenfieldSteps {
    /// complete steps (t_k, u_k, ζ_k)
    t: Vec<u64>,
    u: Vec<u64>,
    z: Vec<u64>,
    /// trailing pair with no rank yet (either a candidate next step or the
    /// end marker)
    dangling: Option<(u64, u64)>,
}

fn decode_steps(seq: &[Atom]) -> Option<ShoenfieldSteps> {
    let mut steps = ShoenfieldSteps {
        t: vec![],
        u: vec![],
        z: vec![],
        dangling: None,
    };
    for (i, a) in seq.iter().enumerate() {
        if i % 2 == 0 {
            let Atom::Term(code) = a else { return None };
            let (t, u) = unpair(*code);
            steps.t.push(t);
            steps.u.push(u);
        } else {
            let Atom::Param(z) = a else { return None };
            steps.z.push(*z);
        }
    }
    if steps.t.len() > steps.z.len() {
        let t = steps.t.pop().unwrap();
        let u = steps.u.pop().unwrap();
        steps.dangling = Some((t, u));
    }
    Some(steps)
}

/// The displayed tree condition, with the restriction-definedness guard made
/// explicit: for all i, j below the window with |s_i|, |s_j| ≤ window,
/// membership of `<s_i, t↾|s_i|, u↾|s_i|>` is required, and extensions are
/// mirrored by strict rank descent (`s_i ⊋ s_j ↔ ζ_i < ζ_j`).
fn steps_valid(kernel: &KernelTree, alpha: &LinearOrder, s: &ShoenfieldSteps) -> bool {
    let m = s.z.len();
    // visible prefix of (t, u), including the dangling pair
    let tlen = s.t.len() + usize::from(s.dangling.is_some());
    let tt = |k: usize| {
        if k < s.t.len() {
            s.t[k]
        } else {
            s.dangling.unwrap().0
        }
    };
    let uu = |k: usize| {
        if k < s.u.len() {
            s.u[k]
        } else {
            s.dangling.unwrap().1
        }
    };
    // required memberships for probes fully visible in (t, u)
    for i in 0..tlen as u64 {
        let si = canonical_seq(i);
        if si.len() <= tlen {
            let node: Vec<(u64, u64, u64)> = si
                .iter()
                .enumerate()
                .map(|(k, &z)| (z, tt(k), uu(k)))
                .collect();
            if !kernel.contains(&node) {
                return false;
            }
        }
    }
    // rank clause over ranked probes
    for i in 0..m {
        let si = canonical_seq(i as u64);
        if si.len() > m {
            continue;
        }
        for j in 0..m {
            if i == j {
                continue;
            }
            let sj = canonical_seq(j as u64);
            if sj.len() > m {
                continue;
            }
            let extends = si.len() > sj.len() && si[..sj.len()] == sj[..];
            let rank_lt = alpha.lt(s.z[i], s.z[j]);
            if extends != rank_lt {
                return false;
            }
        }
    }
    true
}

/// Build the Shoenfield genedendron of a kernel tree: branches assemble
/// `(t, u)` with a rank assignment of the kernel's probe sections, and the
/// extraction projects the `u`-components of completed steps.
pub fn shoenfield(kernel: KernelTree) -> GeneDendron {
    let term_order = LinearOrder::lex(LinearOrder::omega(), LinearOrder::omega());
    let km = kernel.clone();
    let kh = kernel.clone();
    let kc = kernel.clone();
    let label = format!("shoenfield({})", kernel.name());

    // membership/hull at the ω-presentation; parameters are compared in ω.
    let omega = LinearOrder::omega();
    let om = omega.clone();
    let oh = omega.clone();
    let dend = Prequasidendroid::lazy(
        label.clone(),
        term_order,
        move |seq| {
            // members: complete steps plus the trailing (0,0) marker
            let Some(s) = decode_steps(seq) else {
                return false;
            };
            s.dangling == Some((0, 0)) && steps_valid(&km, &om, &s)
        },
        move |seq| {
            decode_steps(seq)
                .map(|s| steps_valid(&kh, &oh, &s))
                .unwrap_or(false)
        },
    )
    .with_children(
        move |seq, breadth| {
            // term children only at even positions: candidate (t, u) pairs
            if seq.len() % 2 == 1 {
                return vec![];
            }
            let mut out = Vec::new();
            for t in 0..breadth as u64 {
                for u in 0..2u64.min(breadth as u64) {
                    out.push(pair(t, u));
                }
            }
            let _ = &kc;
            out.truncate(breadth);
            out
        },
        |seq| seq.len() % 2 == 1,
    )
    .with_flags(true, true);

    GeneDendron {
        dend,
        extract: Arc::new(|_, seq| {
            // u-projection of completed steps; the dangling pair is not read
            // (it may be the end marker).
            let Some(s) = decode_steps(seq) else {
                return BTreeMap::new();
            };
            (0..s.z.len().min(s.u.len()))
                .map(|k| (k as u64, s.u[k]))
                .collect()
        }),
        generates_label: label,
    }
}

// ---------------------------------------------------------------------------
// The inductive-logic genedendron

/// The genedendron of the inductive system for an operator template: its
/// dendroid is the ∞-interleaving of the generated preproof for
/// `0=0 ⊢ S0=0`, and extraction reads `Ī_Φ(Sⁿ0)` occurrences off the
/// sequent at the branch tip (antecedent: bit 1, succedent: bit 0).
pub fn hj_genedendron(template: OperatorTemplate) -> Result<GeneDendron> {
    let root = Sequent {
        ante: vec![betalogic::formula::Formula::Eq(
            betalogic::formula::NatTerm::Zero,
            betalogic::formula::NatTerm::Zero,
        )],
        succ: vec![betalogic::formula::Formula::Eq(
            betalogic::formula::NatTerm::numeral(1),
            betalogic::formula::NatTerm::Zero,
        )],
    };
    let pi = generate(
        SystemId::LkInductive(template),
        root,
        LinearOrder::omega(),
    )?;
    Ok(hj_from_preproof(&pi))
}

/// Wrap an already-generated (ω-presented) inductive preproof.
pub fn hj_from_preproof(pi: &Preproof) -> GeneDendron {
    let dend = den(pi);
    let pe = pi.clone();
    GeneDendron {
        dend,
        extract: Arc::new(move |alpha, seq| {
            extract_fixpoint_bits(&pe, alpha, seq)
        }),
        generates_label: "inductive-fixpoint".into(),
    }
}

fn extract_fixpoint_bits(
    pi: &Preproof,
    alpha: &LinearOrder,
    seq: &[Atom],
) -> BTreeMap<u64, u64> {
    use betalogic::formula::{Formula, NatTerm};
    // strip the ∞ interleave: even entries are position steps
    let mut pos: Seq = Vec::new();
    for (i, a) in seq.iter().enumerate() {
        if i % 2 == 0 {
            if *a == Atom::Term(betalogic::INF) {
                return BTreeMap::new();
            }
            pos.push(*a);
        } else if *a != Atom::Term(betalogic::INF) {
            return BTreeMap::new();
        }
    }
    let view = pi.instantiate(alpha.clone());
    let Some(node) = view.label(&pos) else {
        return BTreeMap::new();
    };
    let mut bits = BTreeMap::new();
    let numeral_of = |t: &NatTerm| t.value();
    for f in &node.sequent.ante {
        if let Formula::IBar(t) = f {
            if let Some(n) = numeral_of(t) {
                bits.insert(n, 1);
            }
        }
    }
    for f in &node.sequent.succ {
        if let Formula::IBar(t) = f {
            if let Some(n) = numeral_of(t) {
                bits.entry(n).or_insert(0);
            }
        }
    }
    bits
}

// ---------------------------------------------------------------------------
// Approximation and bounded altitude

/// Extraction applied to the longest branch prefix found within the
/// depth/breadth budget. Never claims totality.
pub fn approximate_real(
    g: &GeneDendron,
    alpha: &LinearOrder,
    depth: usize,
    breadth: usize,
) -> Result<BTreeMap<u64, u64>> {
    let prefix = longest_branch_prefix(&g.dend, alpha, depth, breadth)?;
    Ok(g.extract(alpha, &prefix))
}

/// Bounded upper evidence for the altitude: the first probe whose
/// hull-linearization yields a descending witness. Bounds the altitude from
/// above only for this genedendron.
pub fn altitude_bounded(
    g: &GeneDendron,
    probes: &[LinearOrder],
    depth: usize,
) -> Option<usize> {
    let lin = Predilator::lin_star(g.dend.clone());
    climax_bounded(&lin, probes, depth).map(|(i, _)| i)
}

/// Brute-force operator iteration `I^k` over a bounded universe: the
/// independent oracle for inductive-extraction checks.
pub fn iterate_operator(
    template: &OperatorTemplate,
    k: usize,
    universe: u64,
) -> Vec<BTreeSet<u64>> {
    let mut stages: Vec<BTreeSet<u64>> = vec![BTreeSet::new()];
    for _ in 0..k {
        // I_{j+1} = ∪_{i<=j} Φ(I_i); template evaluation may be partial on
        // non-arithmetic formulas, in which case the element is left out.
        let mut next = BTreeSet::new();
        for prev in &stages {
            for n in 0..universe {
                if template.eval_on_set(prev, n) == Some(true) {
                    next.insert(n);
                }
            }
        }
        stages.push(next);
    }
    stages
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::betalogic::operators;

    #[test]
    fn canonical_enumeration_is_injective_and_total() {
        let mut seen = BTreeSet::new();
        for i in 0..120 {
            let s = canonical_seq(i);
            assert!(seen.insert(s.clone()), "duplicate at {i}: {s:?}");
            if i < SEQ_HORIZON {
                assert_eq!(s.len() as u64, i + 1);
                assert_eq!(s[0], i);
            }
        }
        assert_eq!(canonical_seq(SEQ_HORIZON), Vec::<u64>::new());
        // the early gadgets are pairwise incomparable
        for i in 0..SEQ_HORIZON {
            for j in 0..SEQ_HORIZON {
                if i == j {
                    continue;
                }
                let (a, b) = (canonical_seq(i), canonical_seq(j));
                assert!(a.len() < b.len() || a[..b.len()] != b[..]);
            }
        }
    }

    #[test]
    fn evens_branch_at_tiny_probe() {
        let g = shoenfield(kernels::evens());
        let alpha = LinearOrder::finite_init(1);
        let prefix =
            crate::dendroid::find_branch(&g.dend, &alpha, 12, 6).unwrap().expect("branch");
        let bits = g.extract(&alpha, &prefix);
        assert!(bits.len() >= 3, "{bits:?}");
        for (k, v) in &bits {
            assert_eq!(*v, kernels::evens_bit(*k), "bit {k}");
        }
        assert_eq!(bits.get(&0), Some(&1));
        assert_eq!(bits.get(&1), Some(&0));
        assert_eq!(bits.get(&2), Some(&1));
    }

    #[test]
    fn evens_approximate_real_eight_bits() {
        let g = shoenfield(kernels::evens());
        let alpha = LinearOrder::finite_init(1);
        let bits = approximate_real(&g, &alpha, 18, 6).unwrap();
        assert!(bits.len() >= 8, "only {} bits: {bits:?}", bits.len());
        for (k, v) in &bits {
            assert_eq!(*v, kernels::evens_bit(*k));
        }
    }

    #[test]
    fn empty_kernel_has_no_deep_branch() {
        let g = shoenfield(kernels::empty());
        let alpha = LinearOrder::finite_init(2);
        // the hull dies immediately past the first probe membership
        let prefix = longest_branch_prefix(&g.dend, &alpha, 10, 4).unwrap();
        assert!(prefix.len() <= 2, "{prefix:?}");
        assert!(approximate_real(&g, &alpha, 10, 4).unwrap().is_empty());
    }

    #[test]
    fn shoenfield_homogeneity_laws() {
        let g = shoenfield(kernels::evens());
        let report = crate::dendroid::check_laws(&g.dend, 2, 6);
        assert!(report.ok(), "{:?}", report.violations);
    }

    #[test]
    fn extraction_is_monotone_and_functorial() {
        let g = shoenfield(kernels::evens());
        let alpha = LinearOrder::finite_init(2);
        let prefix = longest_branch_prefix(&g.dend, &alpha, 14, 6).unwrap();
        // monotone along the prefix
        let mut prev = BTreeMap::new();
        for k in 0..=prefix.len() {
            let bits = g.extract(&alpha, &prefix[..k]);
            for (i, v) in &prev {
                assert_eq!(bits.get(i), Some(v), "bit {i} flipped at {k}");
            }
            prev = bits;
        }
        // functorial across a mutilation
        let beta = LinearOrder::finite(vec![3, 5, 9]);
        let f = crate::order::IncreasingMap::new(
            alpha.clone(),
            beta.clone(),
            vec![(0, 3), (1, 9)],
        )
        .unwrap();
        let moved = crate::dendroid::mutilation_map(&prefix, &f).unwrap();
        assert_eq!(g.extract(&beta, &moved), g.extract(&alpha, &prefix));
    }

    #[test]
    fn altitude_probes() {
        let g = shoenfield(kernels::evens());
        let empty = LinearOrder::finite(vec![]);
        let fin1 = LinearOrder::finite_init(1);
        // at the empty order there is no rank value, so no deep chain
        let idx = altitude_bounded(&g, &[empty, fin1], 10);
        assert_eq!(idx, Some(1));
        let ge = shoenfield(kernels::empty());
        assert_eq!(altitude_bounded(&ge, &[LinearOrder::finite_init(1)], 8), None);
    }

    #[test]
    fn operator_iteration_oracle() {
        let full = operators::full();
        let stages = iterate_operator(&full, 3, 8);
        assert!(stages[0].is_empty());
        assert_eq!(stages[1].len(), 8);
        let ident = operators::identity();
        let stages = iterate_operator(&ident, 4, 8);
        assert!(stages.iter().all(|s| s.is_empty()));
    }
}
