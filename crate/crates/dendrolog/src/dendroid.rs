//! Prequasidendroids: parameterized trees over `Term ⊔ Param` atoms,
//! determined by their ω-instantiation, with mutilation, instantiation,
//! homogeneity checking, hull-linearization and bounded branch search.
//!
//! A value carries decidable membership for the ω-instantiation (`member`),
//! decidable hull membership (`hull`), and optionally a child suggester for
//! searching. Instantiation at any parameter order is a view: a sequence is a
//! member at `alpha` iff its Occ-collapse is a member at ω.

use crate::order::{kb_cmp_by, LinearOrder, WfStatus};
use crate::pairing::{pair, seq_decode, seq_encode, unpair};
use serde::Serialize;
use std::cmp::Ordering;
use std::collections::{BTreeSet, HashMap, VecDeque};
use std::sync::Mutex;
use std::sync::Arc;

#[derive(Debug, thiserror::Error)]
pub enum DendroidError {
    #[error("parameter {0} outside the parameter order")]
    ParamOutside(u64),
    #[error("dendroid `{0}` has no child enumerator")]
    NoChildren(String),
    #[error("dendroid `{0}` is not homogeneous; operation requires homogeneity")]
    NotHomogeneous(String),
}

pub type Result<T> = std::result::Result<T, DendroidError>;

/// One component of a sequence: a term-part code or an underlined
/// parameter-part code.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum Atom {
    #[serde(rename = "t")]
    Term(u64),
    #[serde(rename = "p")]
    Param(u64),
}

impl Atom {
    pub fn code(self) -> u64 {
        match self {
            Atom::Term(c) => pair(0, c),
            Atom::Param(c) => pair(1, c),
        }
    }

    pub fn from_code(code: u64) -> Atom {
        let (tag, c) = unpair(code);
        if tag == 1 {
            Atom::Param(c)
        } else {
            Atom::Term(c)
        }
    }
}

pub type Seq = Vec<Atom>;

pub fn seq_to_code(seq: &[Atom]) -> u64 {
    seq_encode(&seq.iter().map(|a| a.code()).collect::<Vec<_>>())
}

pub fn seq_from_code(code: u64) -> Seq {
    seq_decode(code).into_iter().map(Atom::from_code).collect()
}

/// The sorted, deduplicated set of parameter codes occurring in a sequence.
pub fn occ(seq: &[Atom]) -> Vec<u64> {
    let set: BTreeSet<u64> = seq
        .iter()
        .filter_map(|a| match a {
            Atom::Param(p) => Some(*p),
            Atom::Term(_) => None,
        })
        .collect();
    set.into_iter().collect()
}

/// Relabel parameters along a finite map given as sorted pairs; terms pass
/// through. Returns None if some parameter has no image.
pub fn relabel(seq: &[Atom], map: &[(u64, u64)]) -> Option<Seq> {
    seq.iter()
        .map(|a| match a {
            Atom::Term(t) => Some(Atom::Term(*t)),
            Atom::Param(p) => map
                .iter()
                .find(|&&(s, _)| s == *p)
                .map(|&(_, t)| Atom::Param(t)),
        })
        .collect()
}

/// Occ-collapse: replace the k-th smallest occurring parameter by `k`.
/// The parameter order only matters through the order of `params`, which is
/// passed in pre-sorted (for ω use plain `occ`).
pub fn collapse_with(seq: &[Atom], sorted_params: &[u64]) -> Seq {
    seq.iter()
        .map(|a| match a {
            Atom::Term(t) => Atom::Term(*t),
            Atom::Param(p) => {
                let k = sorted_params.iter().position(|&q| q == *p).unwrap() as u64;
                Atom::Param(k)
            }
        })
        .collect()
}

enum DendImpl {
    /// Explicit finite member list over `X ⊔ ω`. Hull and instantiation are
    /// computed definitionally; nothing is assumed homogeneous.
    Enumerated { members: Vec<Seq> },
    /// Lazy membership closures at the ω-instantiation.
    Lazy {
        member: Arc<dyn Fn(&[Atom]) -> bool + Send + Sync>,
        hull: Arc<dyn Fn(&[Atom]) -> bool + Send + Sync>,
        /// Suggest term-part children of a hull node (collapsed form);
        /// parameter-part children are probed against the target order.
        term_children: Option<Arc<dyn Fn(&[Atom], usize) -> Vec<u64> + Send + Sync>>,
        /// Does the hull admit Param successors right after this collapsed
        /// node? Used to avoid probing parameters where terms live.
        param_step: Option<Arc<dyn Fn(&[Atom]) -> bool + Send + Sync>>,
    },
}

/// A prequasidendroid, presented by its ω-instantiation.
#[derive(Clone)]
pub struct Prequasidendroid {
    name: String,
    term_order: LinearOrder,
    imp: Arc<DendImpl>,
    homogeneous: bool,
    locally_wf: bool,
}

impl std::fmt::Debug for Prequasidendroid {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "Prequasidendroid({})", self.name)
    }
}

impl Prequasidendroid {
    /// Explicit member list. Homogeneity stays a declared property; the
    /// checker can refute it.
    pub fn enumerated(
        name: impl Into<String>,
        term_order: LinearOrder,
        members: Vec<Seq>,
        homogeneous: bool,
    ) -> Self {
        Prequasidendroid {
            name: name.into(),
            term_order,
            imp: Arc::new(DendImpl::Enumerated { members }),
            homogeneous,
            locally_wf: true,
        }
    }

    pub fn lazy(
        name: impl Into<String>,
        term_order: LinearOrder,
        member: impl Fn(&[Atom]) -> bool + Send + Sync + 'static,
        hull: impl Fn(&[Atom]) -> bool + Send + Sync + 'static,
    ) -> Self {
        Prequasidendroid {
            name: name.into(),
            term_order,
            imp: Arc::new(DendImpl::Lazy {
                member: Arc::new(member),
                hull: Arc::new(hull),
                term_children: None,
                param_step: None,
            }),
            homogeneous: true,
            locally_wf: true,
        }
    }

    pub fn with_children(
        mut self,
        term_children: impl Fn(&[Atom], usize) -> Vec<u64> + Send + Sync + 'static,
        param_step: impl Fn(&[Atom]) -> bool + Send + Sync + 'static,
    ) -> Self {
        if let DendImpl::Lazy {
            member, hull, ..
        } = &*self.imp
        {
            self.imp = Arc::new(DendImpl::Lazy {
                member: member.clone(),
                hull: hull.clone(),
                term_children: Some(Arc::new(term_children)),
                param_step: Some(Arc::new(param_step)),
            });
        }
        self
    }

    pub fn with_flags(mut self, homogeneous: bool, locally_wf: bool) -> Self {
        self.homogeneous = homogeneous;
        self.locally_wf = locally_wf;
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }
    pub fn term_order(&self) -> &LinearOrder {
        &self.term_order
    }
    pub fn homogeneous_declared(&self) -> bool {
        self.homogeneous
    }
    pub fn locally_wf_declared(&self) -> bool {
        self.locally_wf
    }

    /// ω-instantiation membership. Enumerated dendroids store collapsed
    /// representatives and are collapse-closed (their ω-instantiation is
    /// homogeneous by construction); inhomogeneous mutants use lazy closures.
    pub fn member_omega(&self, seq: &[Atom]) -> bool {
        match &*self.imp {
            DendImpl::Enumerated { members } => {
                let c = collapse_with(seq, &occ(seq));
                members.iter().any(|m| collapse_with(m, &occ(m)) == c)
            }
            DendImpl::Lazy { member, .. } => member(seq),
        }
    }

    /// Hull (initial-segment closure) membership at ω. The hull always
    /// contains the empty sequence.
    pub fn hull_omega(&self, seq: &[Atom]) -> bool {
        if seq.is_empty() {
            return true;
        }
        match &*self.imp {
            DendImpl::Enumerated { members } => {
                let c = collapse_with(seq, &occ(seq));
                members.iter().any(|m| {
                    m.len() >= seq.len()
                        && collapse_with(&m[..seq.len()], &occ(&m[..seq.len()])) == c
                })
            }
            DendImpl::Lazy { hull, .. } => hull(seq),
        }
    }

    pub fn enumerated_members(&self) -> Option<&[Seq]> {
        match &*self.imp {
            DendImpl::Enumerated { members } => Some(members),
            DendImpl::Lazy { .. } => None,
        }
    }

    fn check_params(&self, alpha: &LinearOrder, seq: &[Atom]) -> Result<()> {
        for a in seq {
            if let Atom::Param(p) = a {
                if !alpha.contains(*p) {
                    return Err(DendroidError::ParamOutside(*p));
                }
            }
        }
        Ok(())
    }

    /// Collapse a sequence over `X ⊔ alpha` to its canonical ω-form: the k-th
    /// alpha-smallest occurring parameter becomes `k`.
    pub fn collapse_at(&self, alpha: &LinearOrder, seq: &[Atom]) -> Result<Seq> {
        self.check_params(alpha, seq)?;
        let mut params = occ(seq);
        params.sort_by(|&a, &b| alpha.cmp(a, b));
        Ok(collapse_with(seq, &params))
    }

    /// Membership in the `alpha`-instantiation. For enumerated dendroids this
    /// is the definitional test (some member has the same collapse pattern);
    /// for lazy (declared-homogeneous) dendroids it is collapse + ω-test.
    pub fn member_at(&self, alpha: &LinearOrder, seq: &[Atom]) -> Result<bool> {
        let collapsed = self.collapse_at(alpha, seq)?;
        match &*self.imp {
            DendImpl::Enumerated { members } => Ok(members
                .iter()
                .any(|m| collapse_with(m, &occ(m)) == collapsed)),
            DendImpl::Lazy { member, .. } => Ok(member(&collapsed)),
        }
    }

    /// Hull membership in the `alpha`-instantiation.
    pub fn hull_at(&self, alpha: &LinearOrder, seq: &[Atom]) -> Result<bool> {
        if seq.is_empty() {
            return Ok(true);
        }
        let collapsed = self.collapse_at(alpha, seq)?;
        match &*self.imp {
            DendImpl::Enumerated { members } => Ok(members.iter().any(|m| {
                m.len() >= collapsed.len()
                    && collapse_with(&m[..collapsed.len()], &occ(&m[..collapsed.len()]))
                        == collapsed
            })),
            DendImpl::Lazy { hull, .. } => Ok(hull(&collapsed)),
        }
    }

    /// Enumerate the hull children of a node of the `alpha`-instantiation.
    pub fn children_at(
        &self,
        alpha: &LinearOrder,
        seq: &[Atom],
        breadth: usize,
    ) -> Result<Vec<Atom>> {
        let mut out = Vec::new();
        match &*self.imp {
            DendImpl::Enumerated { members } => {
                let mut seen = BTreeSet::new();
                // Candidate params: alpha's field sample; candidate terms:
                // whatever the members carry at the right depth.
                for m in members {
                    if m.len() > seq.len() {
                        if let Atom::Term(t) = m[seq.len()] {
                            if seen.insert(Atom::Term(t)) {
                                let mut ext = seq.to_vec();
                                ext.push(Atom::Term(t));
                                if self.hull_at(alpha, &ext)? {
                                    out.push(Atom::Term(t));
                                }
                            }
                        }
                    }
                }
                for p in alpha.enumerate(breadth).unwrap_or_default() {
                    let mut ext = seq.to_vec();
                    ext.push(Atom::Param(p));
                    if self.hull_at(alpha, &ext)? {
                        out.push(Atom::Param(p));
                    }
                }
            }
            DendImpl::Lazy {
                term_children,
                param_step,
                ..
            } => {
                let (Some(tc), Some(ps)) = (term_children, param_step) else {
                    return Err(DendroidError::NoChildren(self.name.clone()));
                };
                let collapsed = self.collapse_at(alpha, seq)?;
                if ps(&collapsed) {
                    for p in alpha.enumerate(breadth).unwrap_or_default() {
                        let mut ext = seq.to_vec();
                        ext.push(Atom::Param(p));
                        if self.hull_at(alpha, &ext)? {
                            out.push(Atom::Param(p));
                        }
                    }
                } else {
                    for t in tc(&collapsed, breadth) {
                        let mut ext = seq.to_vec();
                        ext.push(Atom::Term(t));
                        if self.hull_at(alpha, &ext)? {
                            out.push(Atom::Term(t));
                        }
                    }
                }
            }
        }
        out.truncate(breadth);
        Ok(out)
    }

    pub fn has_children_capability(&self) -> bool {
        match &*self.imp {
            DendImpl::Enumerated { .. } => true,
            DendImpl::Lazy { term_children, .. } => term_children.is_some(),
        }
    }
}

/// The mutilation relabeling `m_f` on sequences: parameters through `f`,
/// terms unchanged.
pub fn mutilation_map(seq: &[Atom], f: &crate::order::IncreasingMap) -> Option<Seq> {
    seq.iter()
        .map(|a| match a {
            Atom::Term(t) => Some(Atom::Term(*t)),
            Atom::Param(p) => f.apply(*p).map(Atom::Param),
        })
        .collect()
}

/// Inverse relabeling: parameters through `f⁻¹`; None if some parameter is
/// outside `ran f`.
pub fn mutilation_unmap(seq: &[Atom], f: &crate::order::IncreasingMap) -> Option<Seq> {
    seq.iter()
        .map(|a| match a {
            Atom::Term(t) => Some(Atom::Term(*t)),
            Atom::Param(p) => f.preimage(*p).map(Atom::Param),
        })
        .collect()
}

/// The mutilation `^fD` of `D` (presented at `f.codomain`) along `f`,
/// presented at `f.domain`: membership of `σ` is membership of `m_f(σ)`.
///
/// The result is an enumerated dendroid when `D` is enumerated (computed
/// definitionally, so inhomogeneity survives mutilation), and a lazy view
/// otherwise.
pub fn mutilate(d: &Prequasidendroid, f: &crate::order::IncreasingMap) -> Prequasidendroid {
    let name = format!("^f({})", d.name());
    match &*d.imp {
        DendImpl::Enumerated { members } => {
            // Enumerated dendroids are collapse-closed, so the mutilation of
            // the codomain instantiation keeps exactly the collapse patterns
            // realizable with parameters from dom f: those with at most
            // |dom f| parameters.
            let dom = f.pairs.len();
            let mut kept: Vec<Seq> = members
                .iter()
                .filter(|m| occ(m).len() <= dom)
                .map(|m| collapse_with(m, &occ(m)))
                .collect();
            kept.sort();
            kept.dedup();
            Prequasidendroid::enumerated(name, d.term_order.clone(), kept, d.homogeneous)
        }
        DendImpl::Lazy { .. } => {
            let base = d.clone();
            let basem = d.clone();
            let f1 = f.clone();
            let f2 = f.clone();
            let alpha1 = f.codomain.clone();
            let alpha2 = f.codomain.clone();
            Prequasidendroid::lazy(
                name,
                d.term_order.clone(),
                move |seq| {
                    mutilation_map(seq, &f1)
                        .map(|s| basem.member_at(&alpha1, &s).unwrap_or(false))
                        .unwrap_or(false)
                },
                move |seq| {
                    mutilation_map(seq, &f2)
                        .map(|s| base.hull_at(&alpha2, &s).unwrap_or(false))
                        .unwrap_or(false)
                },
            )
            .with_flags(d.homogeneous, d.locally_wf)
        }
    }
}

/// One law-check finding.
#[derive(Debug, Clone, Serialize)]
pub struct LawViolation {
    pub law: String,
    pub detail: String,
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct LawReport {
    pub checked: usize,
    pub violations: Vec<LawViolation>,
}

impl LawReport {
    pub fn ok(&self) -> bool {
        self.violations.is_empty()
    }
    fn push(&mut self, law: &str, detail: String) {
        self.violations.push(LawViolation {
            law: law.into(),
            detail,
        });
    }
}

fn increasing_maps(from: usize, universe: &[u64]) -> Vec<Vec<u64>> {
    // All strictly increasing `from`-tuples over `universe` (given sorted).
    fn rec(from: usize, start: usize, universe: &[u64], acc: &mut Vec<u64>, out: &mut Vec<Vec<u64>>) {
        if acc.len() == from {
            out.push(acc.clone());
            return;
        }
        for i in start..universe.len() {
            acc.push(universe[i]);
            rec(from, i + 1, universe, acc, out);
            acc.pop();
        }
    }
    let mut out = Vec::new();
    rec(from, 0, universe, &mut Vec::new(), &mut out);
    out
}

/// Sample sequences to probe: enumerated members, their prefixes, and small
/// perturbations.
fn sample_sequences(d: &Prequasidendroid, depth: usize) -> Vec<Seq> {
    let mut out: Vec<Seq> = vec![vec![]];
    if let Some(members) = d.enumerated_members() {
        for m in members {
            for k in 0..=m.len().min(depth) {
                out.push(m[..k].to_vec());
            }
        }
    }
    // Generic probes over tiny term/param codes.
    let probes: &[Seq] = &[
        vec![Atom::Param(0)],
        vec![Atom::Param(1)],
        vec![Atom::Param(0), Atom::Param(1)],
        vec![Atom::Term(0)],
        vec![Atom::Term(0), Atom::Param(0)],
    ];
    out.extend(probes.iter().cloned());
    out.sort();
    out.dedup();
    out.retain(|s| s.len() <= depth);
    out
}

/// Bounded verification of the mutilation/instantiation laws:
/// (a) `D ⊆ ^f(D_β)`; (b) equality under declared homogeneity;
/// (c) `(^fD)_β = D` for increasing `f: ω → β` samples;
/// (d) homogeneity via pairs `f, g: n → ω`.
pub fn check_laws(d: &Prequasidendroid, n_max: usize, depth: usize) -> LawReport {
    let mut report = LawReport::default();
    let omega = LinearOrder::omega();
    let universe: Vec<u64> = (0..n_max as u64 * 2).collect();
    let samples = sample_sequences(d, depth);

    // (d) homogeneity: for every n <= n_max and increasing f, g: n -> ω,
    // m_f(σ) ∈ D iff m_g(σ) ∈ D, for σ with params among 0..n-1.
    'dloop: for n in 0..=n_max {
        let tuples = increasing_maps(n, &universe);
        for ft in &tuples {
            for gt in &tuples {
                for s in &samples {
                    let params = occ(s);
                    if params.iter().any(|&p| p >= n as u64) {
                        continue;
                    }
                    let fmap: Vec<(u64, u64)> =
                        (0..n as u64).map(|i| (i, ft[i as usize])).collect();
                    let gmap: Vec<(u64, u64)> =
                        (0..n as u64).map(|i| (i, gt[i as usize])).collect();
                    let sf = relabel(s, &fmap).unwrap();
                    let sg = relabel(s, &gmap).unwrap();
                    let mf = d.member_omega(&sf);
                    let mg = d.member_omega(&sg);
                    if mf != mg {
                        report.push(
                            "homogeneity",
                            format!("sequence {s:?}: under f={ft:?} member={mf}, under g={gt:?} member={mg}"),
                        );
                        break 'dloop;
                    }
                    report.checked += 1;
                }
            }
        }
    }

    // Sample instantiation targets β of size <= n_max (shifted finite orders)
    // plus ω itself.
    let mut betas: Vec<LinearOrder> = vec![omega.clone()];
    for size in 1..=n_max as u64 {
        betas.push(LinearOrder::finite((0..size).collect()));
        betas.push(LinearOrder::finite((0..size).map(|i| i * 3 + 5).collect()));
    }

    for beta in &betas {
        // f: ω → β sampled on the params we will meet (identity-position map
        // onto β's first elements).
        let img = beta.enumerate(n_max.max(4)).unwrap_or_default();
        let fpairs: Vec<(u64, u64)> = img.iter().enumerate().map(|(i, &b)| (i as u64, b)).collect();
        let f = match crate::order::IncreasingMap::new(omega.clone(), beta.clone(), fpairs) {
            Ok(f) => f,
            Err(_) => continue,
        };

        for s in &samples {
            // (a) D ⊆ ^f(D_β): σ ∈ D implies m_f(σ) ∈ D_β.
            if d.member_omega(s) {
                if let Some(sf) = mutilation_map(s, &f) {
                    match d.member_at(beta, &sf) {
                        Ok(true) => report.checked += 1,
                        Ok(false) => report.push(
                            "mutilation-of-expansion-1",
                            format!("{s:?} ∈ D but m_f({s:?}) ∉ D_β for β={}", beta.describe()),
                        ),
                        Err(_) => {}
                    }
                }
            }
            // (b) equality under declared homogeneity: m_f(σ) ∈ D_β implies σ ∈ D.
            if d.homogeneous_declared() {
                if let Some(sf) = mutilation_map(s, &f) {
                    if let Ok(true) = d.member_at(beta, &sf) {
                        if !d.member_omega(s) {
                            report.push(
                                "mutilation-of-expansion-2",
                                format!(
                                    "m_f({s:?}) ∈ D_β but {s:?} ∉ D for β={}",
                                    beta.describe()
                                ),
                            );
                        } else {
                            report.checked += 1;
                        }
                    }
                }
            }
            // (c) (^fD)_β = D_β on samples over β: the β-instantiation of the
            // mutilated view agrees with the original instantiation.
            if d.homogeneous_declared() {
                let fd = mutilate(d, &f);
                if let Some(sb) = mutilation_map(s, &f) {
                    match (fd.member_at(beta, &sb), d.member_at(beta, &sb)) {
                        (Ok(got), Ok(want)) => {
                            if got != want {
                                report.push(
                                    "expansion-of-mutilation",
                                    format!(
                                        "(^fD)_β({sb:?}) = {got} but D_β({sb:?}) = {want} for β={}",
                                        beta.describe()
                                    ),
                                );
                            } else {
                                report.checked += 1;
                            }
                        }
                        _ => {}
                    }
                }
            }
        }
    }

    report
}

/// Standalone antichain validation (Def. condition (1)) over enumerated
/// members: no member is a proper initial segment of another.
pub fn check_antichain(d: &Prequasidendroid) -> LawReport {
    let mut report = LawReport::default();
    if let Some(members) = d.enumerated_members() {
        for a in members {
            for b in members {
                report.checked += 1;
                if a.len() < b.len() && b[..a.len()] == *a {
                    report.push(
                        "antichain",
                        format!("{a:?} is a proper initial segment of {b:?}"),
                    );
                }
            }
        }
    }
    report
}

/// Successor purity (Def. condition (2)) over samples: no hull node has both
/// a Term and a Param successor.
pub fn check_successor_purity(
    d: &Prequasidendroid,
    alpha: &LinearOrder,
    breadth: usize,
    depth: usize,
) -> LawReport {
    let mut report = LawReport::default();
    let mut frontier: Vec<Seq> = vec![vec![]];
    for _ in 0..depth {
        let mut next = Vec::new();
        for node in &frontier {
            if let Ok(children) = d.children_at(alpha, node, breadth) {
                let has_term = children.iter().any(|a| matches!(a, Atom::Term(_)));
                let has_param = children.iter().any(|a| matches!(a, Atom::Param(_)));
                report.checked += 1;
                if has_term && has_param {
                    report.push(
                        "successor-purity",
                        format!("node {node:?} has both term and param successors"),
                    );
                }
                for c in children {
                    let mut ext = node.clone();
                    ext.push(c);
                    next.push(ext);
                }
            }
        }
        frontier = next;
        if frontier.is_empty() {
            break;
        }
    }
    report
}

/// Local well-foundedness (Def. condition (3)) on enumerated hull samples:
/// Term successors must sit inside a not-ill-founded term order.
pub fn check_local_wf(
    d: &Prequasidendroid,
    alpha: &LinearOrder,
    breadth: usize,
    depth: usize,
) -> LawReport {
    let mut report = LawReport::default();
    if d.term_order().wf_status() == WfStatus::IllFounded {
        report.push(
            "local-wf",
            "term order is tagged ill-founded".into(),
        );
        return report;
    }
    let mut frontier: Vec<Seq> = vec![vec![]];
    for _ in 0..depth {
        let mut next = Vec::new();
        for node in &frontier {
            if let Ok(children) = d.children_at(alpha, node, breadth) {
                for c in &children {
                    if let Atom::Term(t) = c {
                        report.checked += 1;
                        if !d.term_order().contains(*t) {
                            report.push(
                                "local-wf",
                                format!("term successor {t} outside the term order at {node:?}"),
                            );
                        }
                    }
                    let mut ext = node.clone();
                    ext.push(*c);
                    next.push(ext);
                }
            }
        }
        frontier = next;
        if frontier.is_empty() {
            break;
        }
    }
    report
}

/// KB comparison of two hull sequences: Terms compared in the term order,
/// Params in `alpha`; mixed positions put Terms first (unreachable in pure
/// hulls).
pub fn kb_cmp_seq(
    term_order: &LinearOrder,
    alpha: &LinearOrder,
    a: &[Atom],
    b: &[Atom],
) -> Ordering {
    let xs: Vec<u64> = a.iter().map(|at| at.code()).collect();
    let ys: Vec<u64> = b.iter().map(|at| at.code()).collect();
    kb_cmp_by(&xs, &ys, |p, q| {
        match (Atom::from_code(p), Atom::from_code(q)) {
            (Atom::Term(x), Atom::Term(y)) => term_order.cmp(x, y),
            (Atom::Param(x), Atom::Param(y)) => alpha.cmp(x, y),
            (Atom::Term(_), Atom::Param(_)) => Ordering::Less,
            (Atom::Param(_), Atom::Term(_)) => Ordering::Greater,
        }
    })
}

/// Breadth-capped iterative-deepening leftmost search for a hull member of
/// length exactly `depth` in the `alpha`-instantiation.
pub fn find_branch(
    d: &Prequasidendroid,
    alpha: &LinearOrder,
    depth: usize,
    breadth: usize,
) -> Result<Option<Seq>> {
    if !d.has_children_capability() {
        return Err(DendroidError::NoChildren(d.name().to_string()));
    }
    fn dfs(
        d: &Prequasidendroid,
        alpha: &LinearOrder,
        node: &mut Seq,
        depth: usize,
        breadth: usize,
    ) -> Result<Option<Seq>> {
        if node.len() == depth {
            return Ok(Some(node.clone()));
        }
        for c in d.children_at(alpha, node, breadth)? {
            node.push(c);
            if let Some(found) = dfs(d, alpha, node, depth, breadth)? {
                return Ok(Some(found));
            }
            node.pop();
        }
        Ok(None)
    }
    // Iterative deepening keeps the "longest prefix" behavior of callers
    // deterministic even when full depth is unreachable.
    let mut best: Option<Seq> = None;
    for dlim in 1..=depth {
        let mut root = Vec::new();
        match dfs(d, alpha, &mut root, dlim, breadth)? {
            Some(found) => best = Some(found),
            None => break,
        }
    }
    Ok(best.filter(|b| b.len() == depth))
}

/// Longest hull prefix found within `depth`/`breadth` (leftmost policy).
pub fn longest_branch_prefix(
    d: &Prequasidendroid,
    alpha: &LinearOrder,
    depth: usize,
    breadth: usize,
) -> Result<Seq> {
    if !d.has_children_capability() {
        return Err(DendroidError::NoChildren(d.name().to_string()));
    }
    let mut best: Seq = vec![];
    fn dfs(
        d: &Prequasidendroid,
        alpha: &LinearOrder,
        node: &mut Seq,
        depth: usize,
        breadth: usize,
        best: &mut Seq,
    ) -> Result<bool> {
        if node.len() > best.len() {
            *best = node.clone();
        }
        if node.len() == depth {
            return Ok(true);
        }
        for c in d.children_at(alpha, node, breadth)? {
            node.push(c);
            if dfs(d, alpha, node, depth, breadth, best)? {
                return Ok(true);
            }
            node.pop();
        }
        Ok(false)
    }
    let mut root = Vec::new();
    dfs(d, alpha, &mut root, depth, breadth, &mut best)?;
    Ok(best)
}

/// Hull-linearization `Lin*(D)(α) = (D*_α, ≤_KB)` as a predilator.
pub fn lin_star(d: &Prequasidendroid) -> crate::dilator::Predilator {
    crate::dilator::Predilator::lin_star(d.clone())
}

/// A deterministic breadth-first discovery table assigning small stable
/// codes to the nodes of a lazily-enumerable tree of sequences. Bijective
/// sequence tupling overflows 64 bits at depth ~8, so tree-image orders
/// (hull linearizations, the implicational tree) name their elements by BFS
/// discovery index instead: a pure function of the tree, identical across
/// instances and runs.
pub struct SeqTable {
    children: Arc<dyn Fn(&[Atom]) -> Vec<Seq> + Send + Sync>,
    inner: Mutex<TableInner>,
    node_cap: usize,
}

struct TableInner {
    nodes: Vec<Seq>,
    index: HashMap<Seq, u64>,
    queue: VecDeque<usize>,
    exhausted: bool,
}

impl SeqTable {
    pub fn new(
        root: Seq,
        children: impl Fn(&[Atom]) -> Vec<Seq> + Send + Sync + 'static,
    ) -> Arc<SeqTable> {
        Self::with_children_arc(root, Arc::new(children))
    }

    pub fn with_children_arc(
        root: Seq,
        children: Arc<dyn Fn(&[Atom]) -> Vec<Seq> + Send + Sync>,
    ) -> Arc<SeqTable> {
        let mut index = HashMap::new();
        index.insert(root.clone(), 0);
        Arc::new(SeqTable {
            children,
            inner: Mutex::new(TableInner {
                nodes: vec![root],
                index,
                queue: VecDeque::from([0]),
                exhausted: false,
            }),
            node_cap: 200_000,
        })
    }

    /// The children of a node, as full sequences.
    pub fn children_of(&self, node: &[Atom]) -> Vec<Seq> {
        (self.children)(node)
    }

    fn step(&self, inner: &mut TableInner) -> bool {
        let Some(at) = inner.queue.pop_front() else {
            inner.exhausted = true;
            return false;
        };
        let node = inner.nodes[at].clone();
        for child in (self.children)(&node) {
            if inner.nodes.len() >= self.node_cap {
                inner.exhausted = true;
                return false;
            }
            if !inner.index.contains_key(&child) {
                let code = inner.nodes.len() as u64;
                inner.index.insert(child.clone(), code);
                inner.nodes.push(child);
                inner.queue.push_back(inner.nodes.len() - 1);
            }
        }
        true
    }

    /// The sequence named by `code`, discovering more of the tree if needed.
    pub fn get(&self, code: u64) -> Option<Seq> {
        let mut inner = self.inner.lock().unwrap();
        while (inner.nodes.len() as u64) <= code && !inner.exhausted {
            self.step(&mut inner);
        }
        inner.nodes.get(code as usize).cloned()
    }

    /// The code of a sequence: BFS is level-ordered, so absence is definite
    /// once discovery has passed the sequence's length.
    pub fn find(&self, seq: &[Atom]) -> Option<u64> {
        let mut inner = self.inner.lock().unwrap();
        loop {
            if let Some(&code) = inner.index.get(seq) {
                return Some(code);
            }
            if inner.exhausted {
                return None;
            }
            if let Some(&front) = inner.queue.front() {
                if inner.nodes[front].len() > seq.len() {
                    return None;
                }
            }
            self.step(&mut inner);
        }
    }

    /// The first `n` codes.
    pub fn enumerate(&self, n: usize) -> Vec<u64> {
        let mut inner = self.inner.lock().unwrap();
        while inner.nodes.len() < n && !inner.exhausted {
            self.step(&mut inner);
        }
        (0..inner.nodes.len().min(n) as u64).collect()
    }
}

pub mod corpus {
    //! Hand-built dendroids used across the test suites.

    use super::*;

    /// The empty dendroid (hull = {<>}).
    pub fn empty() -> Prequasidendroid {
        Prequasidendroid::enumerated("empty", LinearOrder::omega(), vec![], true)
    }

    /// Single member <Param 0>.
    pub fn single_param() -> Prequasidendroid {
        Prequasidendroid::enumerated(
            "single-param",
            LinearOrder::omega(),
            vec![vec![Atom::Param(0)]],
            true,
        )
    }

    /// Members <Param 0> and <Param 0, Term 0, Param 1>: a depth-3 shape.
    pub fn two_level() -> Prequasidendroid {
        Prequasidendroid::enumerated(
            "two-level",
            LinearOrder::omega(),
            vec![
                vec![Atom::Param(0)],
                vec![Atom::Param(0), Atom::Term(0), Atom::Param(1)],
            ],
            true,
        )
    }

    /// All sequences over {Term 0} (lazy, infinite branch).
    pub fn all_term_zero() -> Prequasidendroid {
        Prequasidendroid::lazy(
            "all-term-zero",
            LinearOrder::finite(vec![0]),
            |seq| seq.iter().all(|a| *a == Atom::Term(0)),
            |seq| seq.iter().all(|a| *a == Atom::Term(0)),
        )
        .with_children(|_, _| vec![0], |_| false)
    }

    /// An inhomogeneous mutant: member {<Param 0>} only — <Param k> for k>0
    /// is not a member, so f=(0↦0) and g=(0↦1) disagree.
    pub fn inhomogeneous_mutant() -> Prequasidendroid {
        Prequasidendroid::lazy(
            "inhomogeneous-mutant",
            LinearOrder::omega(),
            |seq| seq == [Atom::Param(0)],
            |seq| seq.len() <= 1 && seq.iter().all(|a| matches!(a, Atom::Param(0))),
        )
        .with_flags(false, true)
    }

    /// Random small enumerated dendroid: an antichain of short sequences,
    /// closed under collapse-equivalence so it is homogeneous.
    pub fn random(seed: u64, term_codes: &[u64]) -> Prequasidendroid {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let mut members: Vec<Seq> = Vec::new();
        let want = rng.gen_range(1..5);
        let mut tries = 0;
        while members.len() < want && tries < 60 {
            tries += 1;
            let len = rng.gen_range(1..4);
            let mut s = Vec::with_capacity(len);
            let mut next_param = 0u64;
            for _ in 0..len {
                if !term_codes.is_empty() && rng.gen_bool(0.5) {
                    s.push(Atom::Term(term_codes[rng.gen_range(0..term_codes.len())]));
                } else {
                    // Parameters in collapsed form: always the next fresh one
                    // or a jump (still increasing occurrence set).
                    let p = next_param + rng.gen_range(0..2);
                    next_param = p + 1;
                    s.push(Atom::Param(p));
                }
            }
            // Membership is collapse-closed, so the antichain property must
            // hold between collapsed representatives.
            let s = collapse_with(&s, &occ(&s));
            let prefix_clash = members.iter().any(|m| {
                (m.len() <= s.len() && s[..m.len()] == *m)
                    || (s.len() <= m.len() && m[..s.len()] == *s)
            });
            if !prefix_clash {
                members.push(s);
            }
        }
        let mut dedup = members;
        dedup.sort();
        dedup.dedup();
        Prequasidendroid::enumerated(
            format!("random-{seed}"),
            LinearOrder::omega(),
            dedup,
            true,
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn occ_examples() {
        assert_eq!(
            occ(&[Atom::Term(3), Atom::Param(1), Atom::Param(0)]),
            vec![0, 1]
        );
        assert_eq!(occ(&[]), Vec::<u64>::new());
        assert_eq!(occ(&[Atom::Param(2), Atom::Param(2)]), vec![2]);
    }

    #[test]
    fn member_instantiated_examples() {
        let d = corpus::single_param();
        let alpha = LinearOrder::finite(vec![10, 20]);
        assert!(d.member_at(&alpha, &[Atom::Param(20)]).unwrap());
        assert!(!d.member_at(&alpha, &[Atom::Term(5)]).unwrap());
        assert!(matches!(
            d.member_at(&alpha, &[Atom::Param(3)]),
            Err(DendroidError::ParamOutside(3))
        ));
    }

    #[test]
    fn member_at_omega_is_member_omega() {
        let omega = LinearOrder::omega();
        for seed in 0..20 {
            let d = corpus::random(seed, &[0, 1]);
            for s in sample_sequences(&d, 4) {
                assert_eq!(
                    d.member_at(&omega, &s).unwrap(),
                    d.member_omega(&collapse_with(&s, &occ(&s))),
                );
                // With initial-segment params, collapse is the identity.
                if occ(&s).iter().enumerate().all(|(i, &p)| p == i as u64) {
                    assert_eq!(d.member_at(&omega, &s).unwrap(), d.member_omega(&s));
                }
            }
        }
    }

    #[test]
    fn mutilation_examples() {
        let omega = LinearOrder::omega();
        // identity mutilation
        let d = corpus::two_level();
        let idf = crate::order::IncreasingMap::identity(&omega, (0..6).collect());
        let md = mutilate(&d, &idf);
        for s in sample_sequences(&d, 4) {
            assert_eq!(d.member_omega(&s), md.member_omega(&s));
        }
        // members {<P0>, <P1>}; f: 1→ω with 0↦1 gives ^fD = {<P0>}
        let d2 = Prequasidendroid::enumerated(
            "p0-p1",
            omega.clone(),
            vec![vec![Atom::Param(0)], vec![Atom::Param(1)]],
            false,
        );
        let f = crate::order::IncreasingMap::new(
            LinearOrder::finite(vec![0]),
            omega.clone(),
            vec![(0, 1)],
        )
        .unwrap();
        let m = mutilate(&d2, &f);
        assert!(m.member_omega(&[Atom::Param(0)]));
        assert_eq!(m.enumerated_members().unwrap().len(), 1);
        // empty stays empty
        let e = mutilate(&corpus::empty(), &f);
        assert!(e.enumerated_members().unwrap().is_empty());
    }

    #[test]
    fn mutilation_functoriality_sampled() {
        let omega = LinearOrder::omega();
        let d = corpus::random(3, &[0]);
        let g = crate::order::IncreasingMap::new(
            LinearOrder::finite(vec![0, 1]),
            LinearOrder::finite(vec![0, 1, 2]),
            vec![(0, 0), (1, 2)],
        )
        .unwrap();
        let f = crate::order::IncreasingMap::new(
            LinearOrder::finite(vec![0, 1, 2]),
            omega.clone(),
            vec![(0, 1), (1, 3), (2, 4)],
        )
        .unwrap();
        let lhs = mutilate(&mutilate(&d, &f), &g);
        let fg = f.compose(&g);
        let rhs = mutilate(&d, &fg);
        for s in sample_sequences(&d, 4) {
            assert_eq!(lhs.member_omega(&s), rhs.member_omega(&s));
        }
    }

    #[test]
    fn law_checks() {
        for seed in 0..10 {
            let d = corpus::random(seed, &[0, 1]);
            let report = check_laws(&d, 3, 4);
            assert!(report.ok(), "seed {seed}: {:?}", report.violations);
            assert!(check_antichain(&d).ok());
        }
        let mutant = corpus::inhomogeneous_mutant();
        let report = check_laws(&mutant, 3, 3);
        assert!(
            report
                .violations
                .iter()
                .any(|v| v.law == "homogeneity"),
            "mutant must fail homogeneity: {report:?}"
        );
        assert!(check_laws(&corpus::empty(), 3, 3).ok());
    }

    #[test]
    fn find_branch_examples() {
        let d = corpus::all_term_zero();
        let alpha = LinearOrder::finite(vec![]);
        let b = find_branch(&d, &alpha, 6, 4).unwrap().unwrap();
        assert_eq!(b, vec![Atom::Term(0); 6]);

        let d2 = corpus::single_param();
        let alpha2 = LinearOrder::finite(vec![0]);
        assert!(find_branch(&d2, &alpha2, 2, 4).unwrap().is_none());
    }

    #[test]
    fn branch_gives_kb_descending_chain() {
        let d = corpus::all_term_zero();
        let alpha = LinearOrder::finite(vec![]);
        let b = find_branch(&d, &alpha, 5, 4).unwrap().unwrap();
        // prefixes are KB-decreasing as the branch extends
        for k in 1..b.len() {
            let shorter = &b[..k - 1];
            let longer = &b[..k];
            assert_eq!(
                kb_cmp_seq(d.term_order(), &alpha, longer, shorter),
                Ordering::Less
            );
        }
    }

    #[test]
    fn purity_and_local_wf() {
        let d = corpus::two_level();
        let alpha = LinearOrder::finite(vec![0, 1, 2]);
        assert!(check_successor_purity(&d, &alpha, 4, 4).ok());
        assert!(check_local_wf(&d, &alpha, 4, 4).ok());
    }
}
