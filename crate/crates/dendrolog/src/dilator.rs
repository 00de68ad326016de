//! Predilators presented operationally: an order transformer `apply`, a map
//! transformer `map`, and a finite support function `supp`. Law checking is
//! sampled over small finite orders; trace extraction gives the
//! denotation-system view; `climax_bounded` is the bounded semi-decision of
//! the least probe where the image goes ill-founded.

use crate::dendroid::{occ, Prequasidendroid, SeqTable};
use crate::order::{find_descending, DescendingWitness, IncreasingMap, LinearOrder, WfStatus};
use crate::pairing::{pair, unpair};
use serde::Serialize;
use std::cmp::Ordering;
use std::collections::BTreeSet;
use std::sync::Arc;

/// Discovery breadth for hull tables: ordinal-arity nodes expose this many
/// parameter children. Complete for the finite sample orders the law suites
/// use.
pub const LIN_STAR_BREADTH: usize = 24;

fn hull_table(d: &Prequasidendroid, alpha: &LinearOrder) -> Arc<SeqTable> {
    let d = d.clone();
    let alpha = alpha.clone();
    SeqTable::new(vec![], move |node| {
        d.children_at(&alpha, node, LIN_STAR_BREADTH)
            .map(|atoms| {
                atoms
                    .into_iter()
                    .map(|a| {
                        let mut ext = node.to_vec();
                        ext.push(a);
                        ext
                    })
                    .collect()
            })
            .unwrap_or_default()
    })
}

#[derive(Debug, thiserror::Error)]
pub enum DilatorError {
    #[error("F({0}) is not enumerable")]
    NotEnumerable(String),
}

pub type Result<T> = std::result::Result<T, DilatorError>;

type ApplyFn = dyn Fn(&LinearOrder) -> LinearOrder + Send + Sync;
type MapFn = dyn Fn(&IncreasingMap, u64) -> Option<u64> + Send + Sync;
type SuppFn = dyn Fn(&LinearOrder, u64) -> Vec<u64> + Send + Sync;

/// An operational predilator.
#[derive(Clone)]
pub struct Predilator {
    name: String,
    apply: Arc<ApplyFn>,
    map: Arc<MapFn>,
    supp: Arc<SuppFn>,
}

impl std::fmt::Debug for Predilator {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "Predilator({})", self.name)
    }
}

/// A trace entry `(n, σ)` with full support.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TraceEntry {
    pub n: u64,
    pub sigma: u64,
}

impl Predilator {
    pub fn new(
        name: impl Into<String>,
        apply: impl Fn(&LinearOrder) -> LinearOrder + Send + Sync + 'static,
        map: impl Fn(&IncreasingMap, u64) -> Option<u64> + Send + Sync + 'static,
        supp: impl Fn(&LinearOrder, u64) -> Vec<u64> + Send + Sync + 'static,
    ) -> Self {
        Predilator {
            name: name.into(),
            apply: Arc::new(apply),
            map: Arc::new(map),
            supp: Arc::new(supp),
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn apply(&self, order: &LinearOrder) -> LinearOrder {
        (self.apply)(order)
    }

    pub fn map(&self, f: &IncreasingMap, elem: u64) -> Option<u64> {
        (self.map)(f, elem)
    }

    pub fn supp(&self, order: &LinearOrder, elem: u64) -> Vec<u64> {
        (self.supp)(order, elem)
    }

    /// The identity predilator `F(X) = X`.
    pub fn identity() -> Self {
        Predilator::new(
            "identity",
            |x| x.clone(),
            |f, e| f.apply(e),
            |_, e| vec![e],
        )
    }

    /// The constant predilator `F(X) = order`.
    pub fn constant(order: LinearOrder) -> Self {
        let o1 = order.clone();
        Predilator::new(
            format!("const({})", order.describe()),
            move |_| o1.clone(),
            |_, e| Some(e),
            |_, _| vec![],
        )
    }

    /// Hull-linearization of a prequasidendroid:
    /// `Lin*(D)(α) = (D*_α, ≤_KB)`, `map(f) = m_f`, `supp = Occ`.
    ///
    /// Element codes are BFS discovery indices of the hull (see
    /// [`SeqTable`]); discovery breadth is `LIN_STAR_BREADTH`.
    pub fn lin_star(d: Prequasidendroid) -> Self {
        let name = format!("lin*({})", d.name());
        let d_apply = d.clone();
        let d_map = d.clone();
        let d_supp = d;
        Predilator::new(
            name,
            move |alpha| {
                let table = hull_table(&d_apply, alpha);
                let tf = table.clone();
                let tc = table.clone();
                let te = table.clone();
                let dc = d_apply.clone();
                let ac = alpha.clone();
                let dd = d_apply.clone();
                let ad = alpha.clone();
                let tdx = table.clone();
                let ddx = d_apply.clone();
                let adx = alpha.clone();
                let td = table;
                LinearOrder::derived(
                    format!("lin*({})({})", d_apply.name(), alpha.describe()),
                    move |code| tf.get(code).is_some(),
                    move |x, y| match (tc.get(x), tc.get(y)) {
                        (Some(a), Some(b)) => {
                            crate::dendroid::kb_cmp_seq(dc.term_order(), &ac, &a, &b)
                        }
                        _ => x.cmp(&y),
                    },
                    WfStatus::Unknown,
                )
                .with_enumerator(move |n| te.enumerate(n))
                .with_descend({
                    let table = tdx;
                    let d = ddx;
                    let alpha = adx;
                    move |code, _breadth| {
                        // children (extensions are KB-smaller) and KB-smaller
                        // siblings of the node
                        let Some(node) = table.get(code) else {
                            return vec![];
                        };
                        let mut out: Vec<u64> = table
                            .children_of(&node)
                            .iter()
                            .filter_map(|c| table.find(c))
                            .collect();
                        if !node.is_empty() {
                            let parent = &node[..node.len() - 1];
                            for sib in table.children_of(parent) {
                                if sib != node
                                    && crate::dendroid::kb_cmp_seq(
                                        d.term_order(),
                                        &alpha,
                                        &sib,
                                        &node,
                                    ) == std::cmp::Ordering::Less
                                {
                                    if let Some(c) = table.find(&sib) {
                                        out.push(c);
                                    }
                                }
                            }
                        }
                        out
                    }
                })
                .with_descending(move |n| {
                    // A deep branch yields a KB-descending prefix chain: the
                    // empty node is largest and every extension is smaller.
                    let b =
                        crate::dendroid::longest_branch_prefix(&dd, &ad, n.saturating_sub(1), 24)
                            .ok()?;
                    if b.len() + 1 < n {
                        return None;
                    }
                    (0..n).map(|k| td.find(&b[..k])).collect::<Option<Vec<_>>>()
                })
            },
            move |f, code| {
                let from = hull_table(&d_map, &f.domain);
                let to = hull_table(&d_map, &f.codomain);
                let seq = from.get(code)?;
                let moved = crate::dendroid::mutilation_map(&seq, f)?;
                to.find(&moved)
            },
            move |alpha, code| {
                hull_table(&d_supp, alpha)
                    .get(code)
                    .map(|s| occ(&s))
                    .unwrap_or_default()
            },
        )
    }

    /// Pointwise ordered sum: summand `i`'s element `e` becomes `pair(i, e)`.
    pub fn sum(summands: Vec<Predilator>) -> Self {
        assert!(!summands.is_empty(), "sum of no predilators");
        let fs = Arc::new(summands);
        let f_apply = fs.clone();
        let f_map = fs.clone();
        let f_supp = fs.clone();
        let name = format!(
            "sum[{}]",
            fs.iter().map(|f| f.name().to_string()).collect::<Vec<_>>().join("+")
        );
        Predilator::new(
            name,
            move |alpha| {
                let parts: Vec<LinearOrder> = f_apply.iter().map(|f| f.apply(alpha)).collect();
                let p1 = parts.clone();
                let p2 = parts.clone();
                let p3 = parts;
                LinearOrder::derived(
                    format!("sum({})", alpha.describe()),
                    move |code| {
                        let (i, e) = unpair(code);
                        p1.get(i as usize).map(|o| o.contains(e)).unwrap_or(false)
                    },
                    move |x, y| {
                        let (i, e) = unpair(x);
                        let (j, f) = unpair(y);
                        i.cmp(&j)
                            .then_with(|| p2[i as usize].cmp(e, f))
                    },
                    WfStatus::Unknown,
                )
                .with_enumerator(move |n| {
                    let mut out = Vec::new();
                    for (i, o) in p3.iter().enumerate() {
                        if let Ok(es) = o.enumerate(n - out.len()) {
                            out.extend(es.into_iter().map(|e| pair(i as u64, e)));
                        }
                        if out.len() >= n {
                            break;
                        }
                    }
                    out
                })
            },
            move |f, code| {
                let (i, e) = unpair(code);
                f_map
                    .get(i as usize)
                    .and_then(|p| p.map(f, e))
                    .map(|e2| pair(i, e2))
            },
            move |alpha, code| {
                let (i, e) = unpair(code);
                f_supp
                    .get(i as usize)
                    .map(|p| p.supp(alpha, e))
                    .unwrap_or_default()
            },
        )
    }

    /// A mutant wrapper that swaps the images of the two smallest codomain
    /// elements in every mapped order, for law-checker falsification tests.
    pub fn broken_map_mutant(inner: Predilator) -> Self {
        let i_apply = inner.clone();
        let i_map = inner.clone();
        let i_supp = inner;
        Predilator::new(
            format!("broken({})", i_apply.name()),
            move |alpha| i_apply.apply(alpha),
            move |f, e| {
                let out = i_map.map(f, e)?;
                let img = i_map.apply(&f.codomain);
                let mut elems = img.enumerate(2).unwrap_or_default();
                elems.sort_by(|&a, &b| img.cmp(a, b));
                if elems.len() == 2 {
                    if out == elems[0] {
                        return Some(elems[1]);
                    }
                    if out == elems[1] {
                        return Some(elems[0]);
                    }
                }
                Some(out)
            },
            move |alpha, e| i_supp.supp(alpha, e),
        )
    }
}

/// All entries `(n, σ)` with `n ≤ n_max` and `supp_n(σ) = {0, .., n-1}`, in
/// lexicographic order.
pub fn trace(f: &Predilator, n_max: u64) -> Result<Vec<TraceEntry>> {
    let mut out = Vec::new();
    for n in 0..=n_max {
        let order = LinearOrder::finite_init(n);
        let image = f.apply(&order);
        let mut elems = image
            .enumerate(600)
            .map_err(|_| DilatorError::NotEnumerable(image.describe()))?;
        elems.sort_unstable();
        elems.dedup();
        let full: BTreeSet<u64> = (0..n).collect();
        for e in elems {
            let supp: BTreeSet<u64> = f.supp(&order, e).into_iter().collect();
            if supp == full {
                out.push(TraceEntry { n, sigma: e });
            }
        }
    }
    out.sort_by_key(|t| (t.n, t.sigma));
    Ok(out)
}

#[derive(Debug, Clone, Serialize)]
pub struct CheckViolation {
    pub law: String,
    pub detail: String,
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct CheckReport {
    pub samples: usize,
    pub violations: Vec<CheckViolation>,
}

impl CheckReport {
    pub fn ok(&self) -> bool {
        self.violations.is_empty()
    }
    fn push(&mut self, law: &str, detail: String) {
        self.violations.push(CheckViolation {
            law: law.into(),
            detail,
        });
    }
}

/// All increasing maps between two finite orders (fields capped at `cap`).
pub fn all_increasing_maps(a: &LinearOrder, b: &LinearOrder, cap: usize) -> Vec<IncreasingMap> {
    let mut xs = a.enumerate(cap).unwrap_or_default();
    xs.sort_by(|&p, &q| a.cmp(p, q));
    let mut ys = b.enumerate(cap).unwrap_or_default();
    ys.sort_by(|&p, &q| b.cmp(p, q));
    let mut out = Vec::new();
    fn rec(
        xs: &[u64],
        ys: &[u64],
        i: usize,
        jmin: usize,
        acc: &mut Vec<(u64, u64)>,
        a: &LinearOrder,
        b: &LinearOrder,
        out: &mut Vec<IncreasingMap>,
    ) {
        if i == xs.len() {
            if let Ok(m) = IncreasingMap::new(a.clone(), b.clone(), acc.clone()) {
                out.push(m);
            }
            return;
        }
        for j in jmin..ys.len() {
            acc.push((xs[i], ys[j]));
            rec(xs, ys, i + 1, j + 1, acc, a, b, out);
            acc.pop();
        }
    }
    rec(&xs, &ys, 0, 0, &mut Vec::new(), a, b, &mut out);
    out
}

fn sample_orders(max_size: u64) -> Vec<LinearOrder> {
    let mut out = Vec::new();
    for n in 0..=max_size {
        out.push(LinearOrder::finite_init(n));
        if n > 0 {
            out.push(LinearOrder::finite((0..n).map(|i| i * 2 + 1).collect()));
        }
    }
    out
}

/// Sampled law checking: functoriality, support condition, naturality and
/// monotonicity over all increasing maps between finite orders of size ≤ 4
/// (scaled down by `sample_budget` if small).
pub fn check_predilator(f: &Predilator, sample_budget: usize) -> CheckReport {
    let mut report = CheckReport::default();
    let max_size = 4u64;
    let orders = sample_orders(max_size);
    let elem_cap = 120usize;

    let mut budget = sample_budget.max(16);
    for alpha in &orders {
        for beta in &orders {
            let maps = all_increasing_maps(alpha, beta, max_size as usize);
            let falpha = f.apply(alpha);
            let elems = match falpha.enumerate(elem_cap) {
                Ok(e) => e,
                Err(_) => continue,
            };
            for m in &maps {
                if budget == 0 {
                    return report;
                }
                budget -= 1;

                let fbeta = f.apply(beta);
                // naturality + well-definedness of map
                for &e in &elems {
                    report.samples += 1;
                    let Some(img) = f.map(m, e) else {
                        report.push("map-totality", format!("map undefined on {e}"));
                        continue;
                    };
                    if !fbeta.contains(img) {
                        report.push(
                            "map-range",
                            format!("image {img} of {e} outside F(β)"),
                        );
                    }
                    let se: BTreeSet<u64> = f.supp(alpha, e).into_iter().collect();
                    let want: BTreeSet<u64> =
                        se.iter().filter_map(|&x| m.apply(x)).collect();
                    let got: BTreeSet<u64> = f.supp(beta, img).into_iter().collect();
                    if want != got {
                        report.push(
                            "naturality",
                            format!("supp(F(f)({e})) = {got:?} but f[supp({e})] = {want:?}"),
                        );
                    }
                }
                // support condition
                if let Ok(belems) = fbeta.enumerate(elem_cap) {
                    let ran: BTreeSet<u64> = m.targets().into_iter().collect();
                    let image: BTreeSet<u64> =
                        elems.iter().filter_map(|&e| f.map(m, e)).collect();
                    for &t in &belems {
                        let st: BTreeSet<u64> = f.supp(beta, t).into_iter().collect();
                        if st.is_subset(&ran) && !image.contains(&t) {
                            report.push(
                                "support-condition",
                                format!("{t} has supp ⊆ ran(f) but is not in ran(F(f))"),
                            );
                        }
                        report.samples += 1;
                    }
                }
            }
            // functoriality through a middle order
            for gamma in &orders {
                if budget == 0 {
                    return report;
                }
                let f1s = all_increasing_maps(alpha, gamma, max_size as usize);
                let g1s = all_increasing_maps(gamma, beta, max_size as usize);
                for f1 in f1s.iter().take(4) {
                    for g1 in g1s.iter().take(4) {
                        budget = budget.saturating_sub(1);
                        let comp = g1.compose(f1);
                        for &e in elems.iter().take(24) {
                            report.samples += 1;
                            let lhs = f.map(&comp, e);
                            let rhs = f.map(f1, e).and_then(|m1| f.map(g1, m1));
                            if lhs != rhs {
                                report.push(
                                    "functoriality",
                                    format!("F(g∘f)({e}) = {lhs:?} ≠ F(g)(F(f)({e})) = {rhs:?}"),
                                );
                            }
                        }
                    }
                }
            }
            // identity
            let xs = alpha.enumerate(max_size as usize).unwrap_or_default();
            let idm = IncreasingMap::identity(alpha, xs);
            for &e in elems.iter().take(24) {
                report.samples += 1;
                if f.map(&idm, e) != Some(e) {
                    report.push("identity", format!("F(id)({e}) ≠ {e}"));
                }
            }
            // monotonicity: pointwise-≤ pairs of maps
            let maps2 = all_increasing_maps(alpha, beta, max_size as usize);
            for m1 in &maps2 {
                for m2 in &maps2 {
                    if m1.pairs.len() != m2.pairs.len() {
                        continue;
                    }
                    let le = m1
                        .pairs
                        .iter()
                        .zip(&m2.pairs)
                        .all(|(&(s1, t1), &(s2, t2))| s1 == s2 && beta.le(t1, t2));
                    if !le {
                        continue;
                    }
                    let fbeta = f.apply(beta);
                    for &e in elems.iter().take(12) {
                        report.samples += 1;
                        if let (Some(a1), Some(a2)) = (f.map(m1, e), f.map(m2, e)) {
                            if fbeta.cmp(a1, a2) == Ordering::Greater {
                                report.push(
                                    "monotonicity",
                                    format!("f ≤ g pointwise but F(f)({e}) > F(g)({e})"),
                                );
                            }
                        }
                    }
                }
            }
        }
    }
    report
}

/// Bounded climax probe: the first probe whose image yields a descending
/// witness within `depth`. Never a proof of dilatorhood.
pub fn climax_bounded(
    f: &Predilator,
    probes: &[LinearOrder],
    depth: usize,
) -> Option<(usize, DescendingWitness)> {
    for (i, probe) in probes.iter().enumerate() {
        let image = f.apply(probe);
        if let Ok(Some(w)) = find_descending(&image, depth) {
            return Some((i, w));
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dendroid::{corpus, Atom};

    #[test]
    fn trace_examples() {
        let c = Predilator::constant(LinearOrder::finite(vec![0]));
        let t = trace(&c, 3).unwrap();
        assert_eq!(t, vec![TraceEntry { n: 0, sigma: 0 }]);

        let id = Predilator::identity();
        let t = trace(&id, 2).unwrap();
        assert_eq!(t, vec![TraceEntry { n: 1, sigma: 0 }]);

        // lin*(single-param): full-support entries at n=0 (the empty node,
        // discovery code 0) and n=1 (<Param 0>, the only child: code 1),
        // derived by brute hull enumeration.
        let f = Predilator::lin_star(corpus::single_param());
        let t = trace(&f, 2).unwrap();
        assert_eq!(
            t,
            vec![TraceEntry { n: 0, sigma: 0 }, TraceEntry { n: 1, sigma: 1 }]
        );
    }

    #[test]
    fn identity_passes_laws() {
        let report = check_predilator(&Predilator::identity(), 600);
        assert!(report.ok(), "{:?}", report.violations);
    }

    #[test]
    fn broken_mutant_fails() {
        let broken = Predilator::broken_map_mutant(Predilator::identity());
        let report = check_predilator(&broken, 600);
        assert!(!report.ok());
    }

    #[test]
    fn lin_star_passes_laws() {
        for seed in [0u64, 5, 9] {
            let d = corpus::random(seed, &[0, 1]);
            let f = Predilator::lin_star(d);
            let report = check_predilator(&f, 220);
            assert!(report.ok(), "seed {seed}: {:?}", report.violations);
        }
    }

    #[test]
    fn lin_star_sizes() {
        // D = {<Param 0>}: |Lin*(D)(1)| = 2, |Lin*(D)(2)| = 3.
        let f = Predilator::lin_star(corpus::single_param());
        let o1 = f.apply(&LinearOrder::finite(vec![7]));
        assert_eq!(o1.enumerate(10).unwrap().len(), 2);
        let o2 = f.apply(&LinearOrder::finite(vec![7, 9]));
        assert_eq!(o2.enumerate(10).unwrap().len(), 3);
        // empty dendroid: singleton hull everywhere
        let fe = Predilator::lin_star(corpus::empty());
        assert_eq!(fe.apply(&LinearOrder::finite(vec![0, 1])).enumerate(10).unwrap().len(), 1);
    }

    #[test]
    fn lin_star_monotone_in_pointwise_maps() {
        let d = corpus::two_level();
        let f = Predilator::lin_star(d);
        let alpha = LinearOrder::finite_init(2);
        let beta = LinearOrder::finite_init(4);
        let maps = all_increasing_maps(&alpha, &beta, 4);
        let fbeta = f.apply(&beta);
        let falpha = f.apply(&alpha);
        let elems = falpha.enumerate(60).unwrap();
        for m1 in &maps {
            for m2 in &maps {
                let le = m1.pairs.len() == m2.pairs.len()
                    && m1
                        .pairs
                        .iter()
                        .zip(&m2.pairs)
                        .all(|(&(s1, t1), &(s2, t2))| s1 == s2 && t1 <= t2);
                if !le {
                    continue;
                }
                for &e in &elems {
                    if let (Some(a), Some(b)) = (f.map(m1, e), f.map(m2, e)) {
                        assert_ne!(fbeta.cmp(a, b), Ordering::Greater);
                    }
                }
            }
        }
    }

    #[test]
    fn sum_examples() {
        let c = Predilator::constant(LinearOrder::finite(vec![0]));
        let s = Predilator::sum(vec![c.clone(), c.clone()]);
        for alpha in [LinearOrder::finite_init(0), LinearOrder::finite_init(3)] {
            assert_eq!(s.apply(&alpha).enumerate(10).unwrap().len(), 2);
        }
        // singleton sum behaves as identity on sampled orders
        let s1 = Predilator::sum(vec![Predilator::identity()]);
        let alpha = LinearOrder::finite_init(3);
        let img = s1.apply(&alpha);
        assert_eq!(img.enumerate(10).unwrap().len(), 3);
        // sum [constant, identity] on Finite[0,1]: 3 elements, constants first
        let s2 = Predilator::sum(vec![c, Predilator::identity()]);
        let img2 = s2.apply(&LinearOrder::finite_init(2));
        let elems = img2.enumerate(10).unwrap();
        assert_eq!(elems.len(), 3);
        let mut sorted = elems.clone();
        sorted.sort_by(|&a, &b| img2.cmp(a, b));
        assert_eq!(unpair(sorted[0]).0, 0, "constant part first");
        // sum passes the law suite when summands do
        let report = check_predilator(&s2, 200);
        assert!(report.ok(), "{:?}", report.violations);
    }

    #[test]
    fn climax_examples() {
        let id = Predilator::identity();
        assert!(climax_bounded(&id, &[LinearOrder::finite_init(3)], 5).is_none());

        let bad = Predilator::constant(LinearOrder::omega_star());
        let (i, w) = climax_bounded(&bad, &[LinearOrder::finite(vec![])], 4).unwrap();
        assert_eq!(i, 0);
        assert_eq!(w.sequence.len(), 4);

        // monotone in depth
        let (_, w8) = climax_bounded(&bad, &[LinearOrder::finite(vec![])], 8).unwrap();
        assert_eq!(w8.sequence.len(), 8);
    }
}
