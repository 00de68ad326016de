//! Formulas of the two-sorted language: a number sort with `0, S, +, ·` and
//! an `Ord` sort carrying only parameter constants and `≤`. The inductive
//! systems add the atoms `I_Φ(ξ, t)` and `Ī_Φ(t)`, and operator templates
//! use the placeholder atom `X(t)`.
//!
//! Bound variables are de Bruijn indices; free number variables `x_j` form
//! the reserved eigenvariable pool.
//!
//! The Goedel numbering acts on Occ-collapsed formulas (parameters replaced
//! by their rank), so relabeling parameters commutes with "least formula"
//! selection; see `docs/numbering.md`.

use crate::pairing::unpair;
use std::collections::BTreeSet;
use std::fmt;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, serde::Serialize)]
pub enum Sort {
    Nat,
    Ord,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum NatTerm {
    Zero,
    Succ(Box<NatTerm>),
    Add(Box<NatTerm>, Box<NatTerm>),
    Mul(Box<NatTerm>, Box<NatTerm>),
    /// Eigenvariable `x_j`.
    Free(u64),
    /// De Bruijn index into enclosing binders.
    Bound(u32),
}

impl NatTerm {
    pub fn numeral(n: u64) -> NatTerm {
        let mut t = NatTerm::Zero;
        for _ in 0..n {
            t = NatTerm::Succ(Box::new(t));
        }
        t
    }

    /// Value of a closed term; None when a variable occurs.
    pub fn value(&self) -> Option<u64> {
        Some(match self {
            NatTerm::Zero => 0,
            NatTerm::Succ(t) => t.value()?.saturating_add(1),
            NatTerm::Add(a, b) => a.value()?.saturating_add(b.value()?),
            NatTerm::Mul(a, b) => a.value()?.saturating_mul(b.value()?),
            NatTerm::Free(_) | NatTerm::Bound(_) => return None,
        })
    }

    pub fn has_free(&self) -> bool {
        match self {
            NatTerm::Zero | NatTerm::Bound(_) => false,
            NatTerm::Free(_) => true,
            NatTerm::Succ(t) => t.has_free(),
            NatTerm::Add(a, b) | NatTerm::Mul(a, b) => a.has_free() || b.has_free(),
        }
    }

    pub fn free_vars(&self, out: &mut BTreeSet<u64>) {
        match self {
            NatTerm::Zero | NatTerm::Bound(_) => {}
            NatTerm::Free(j) => {
                out.insert(*j);
            }
            NatTerm::Succ(t) => t.free_vars(out),
            NatTerm::Add(a, b) | NatTerm::Mul(a, b) => {
                a.free_vars(out);
                b.free_vars(out);
            }
        }
    }

    fn subst(&self, depth: u32, sort: Sort, nat: Option<&NatTerm>) -> NatTerm {
        match self {
            NatTerm::Bound(i) => {
                if sort == Sort::Nat && *i == depth {
                    nat.expect("nat substitution").clone()
                } else if *i > depth {
                    NatTerm::Bound(i - 1)
                } else {
                    NatTerm::Bound(*i)
                }
            }
            NatTerm::Zero => NatTerm::Zero,
            NatTerm::Free(j) => NatTerm::Free(*j),
            NatTerm::Succ(t) => NatTerm::Succ(Box::new(t.subst(depth, sort, nat))),
            NatTerm::Add(a, b) => NatTerm::Add(
                Box::new(a.subst(depth, sort, nat)),
                Box::new(b.subst(depth, sort, nat)),
            ),
            NatTerm::Mul(a, b) => NatTerm::Mul(
                Box::new(a.subst(depth, sort, nat)),
                Box::new(b.subst(depth, sort, nat)),
            ),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum OrdTerm {
    /// The constant `ξ̄` for a parameter code.
    Param(u64),
    Bound(u32),
}

impl OrdTerm {
    fn subst(&self, depth: u32, sort: Sort, ord: Option<&OrdTerm>) -> OrdTerm {
        match self {
            OrdTerm::Param(p) => OrdTerm::Param(*p),
            OrdTerm::Bound(i) => {
                if sort == Sort::Ord && *i == depth {
                    ord.expect("ord substitution").clone()
                } else if *i > depth {
                    OrdTerm::Bound(i - 1)
                } else {
                    OrdTerm::Bound(*i)
                }
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Formula {
    Eq(NatTerm, NatTerm),
    LeOrd(OrdTerm, OrdTerm),
    /// `I_Φ(ξ, t)`: operator iteration below stage ξ.
    IPhi(OrdTerm, NatTerm),
    /// `Ī_Φ(t)`: the operator fixpoint over all available stages.
    IBar(NatTerm),
    /// `X(t)`: placeholder predicate of operator templates.
    OpVar(NatTerm),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Not(Box<Formula>),
    Imp(Box<Formula>, Box<Formula>),
    All(Sort, Box<Formula>),
    Ex(Sort, Box<Formula>),
}

impl Formula {
    pub fn eq00() -> Formula {
        Formula::Eq(NatTerm::Zero, NatTerm::Zero)
    }

    pub fn is_atomic(&self) -> bool {
        matches!(
            self,
            Formula::Eq(..)
                | Formula::LeOrd(..)
                | Formula::IPhi(..)
                | Formula::IBar(..)
                | Formula::OpVar(..)
        )
    }

    /// The degree: atomic 0, connectives and quantifiers add 1 (an Ord
    /// quantifier's sup ranges over a constant family, so it adds 1 too).
    pub fn degree(&self) -> u32 {
        match self {
            f if f.is_atomic() => 0,
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Imp(a, b) => {
                a.degree().max(b.degree()) + 1
            }
            Formula::Not(a) => a.degree() + 1,
            Formula::All(_, a) | Formula::Ex(_, a) => a.degree() + 1,
            _ => unreachable!(),
        }
    }

    pub fn occ(&self, out: &mut BTreeSet<u64>) {
        match self {
            Formula::Eq(..) | Formula::IBar(..) | Formula::OpVar(..) => {}
            Formula::LeOrd(a, b) => {
                for t in [a, b] {
                    if let OrdTerm::Param(p) = t {
                        out.insert(*p);
                    }
                }
            }
            Formula::IPhi(o, _) => {
                if let OrdTerm::Param(p) = o {
                    out.insert(*p);
                }
            }
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Imp(a, b) => {
                a.occ(out);
                b.occ(out);
            }
            Formula::Not(a) => a.occ(out),
            Formula::All(_, a) | Formula::Ex(_, a) => a.occ(out),
        }
    }

    pub fn occ_set(&self) -> BTreeSet<u64> {
        let mut s = BTreeSet::new();
        self.occ(&mut s);
        s
    }

    /// Relabel every parameter through `f`; None if one has no image.
    pub fn relabel_params(&self, f: &dyn Fn(u64) -> Option<u64>) -> Option<Formula> {
        let ord = |t: &OrdTerm| -> Option<OrdTerm> {
            Some(match t {
                OrdTerm::Param(p) => OrdTerm::Param(f(*p)?),
                OrdTerm::Bound(i) => OrdTerm::Bound(*i),
            })
        };
        Some(match self {
            Formula::Eq(a, b) => Formula::Eq(a.clone(), b.clone()),
            Formula::LeOrd(a, b) => Formula::LeOrd(ord(a)?, ord(b)?),
            Formula::IPhi(o, t) => Formula::IPhi(ord(o)?, t.clone()),
            Formula::IBar(t) => Formula::IBar(t.clone()),
            Formula::OpVar(t) => Formula::OpVar(t.clone()),
            Formula::And(a, b) => Formula::And(
                Box::new(a.relabel_params(f)?),
                Box::new(b.relabel_params(f)?),
            ),
            Formula::Or(a, b) => Formula::Or(
                Box::new(a.relabel_params(f)?),
                Box::new(b.relabel_params(f)?),
            ),
            Formula::Imp(a, b) => Formula::Imp(
                Box::new(a.relabel_params(f)?),
                Box::new(b.relabel_params(f)?),
            ),
            Formula::Not(a) => Formula::Not(Box::new(a.relabel_params(f)?)),
            Formula::All(s, a) => Formula::All(*s, Box::new(a.relabel_params(f)?)),
            Formula::Ex(s, a) => Formula::Ex(*s, Box::new(a.relabel_params(f)?)),
        })
    }

    fn instantiate(
        &self,
        depth: u32,
        sort: Sort,
        nt: Option<&NatTerm>,
        ot: Option<&OrdTerm>,
    ) -> Formula {
        let n = |t: &NatTerm| {
            if sort == Sort::Nat {
                t.subst(depth, sort, nt)
            } else {
                // An Ord binder is removed: Nat bound indices above it shift.
                t.subst(depth, Sort::Ord, None)
            }
        };
        let o = |t: &OrdTerm| {
            if sort == Sort::Ord {
                t.subst(depth, sort, ot)
            } else {
                t.subst(depth, Sort::Nat, None)
            }
        };
        match self {
            Formula::Eq(a, b) => Formula::Eq(n(a), n(b)),
            Formula::LeOrd(a, b) => Formula::LeOrd(o(a), o(b)),
            Formula::IPhi(x, t) => Formula::IPhi(o(x), n(t)),
            Formula::IBar(t) => Formula::IBar(n(t)),
            Formula::OpVar(t) => Formula::OpVar(n(t)),
            Formula::And(a, b) => Formula::And(
                Box::new(a.instantiate(depth, sort, nt, ot)),
                Box::new(b.instantiate(depth, sort, nt, ot)),
            ),
            Formula::Or(a, b) => Formula::Or(
                Box::new(a.instantiate(depth, sort, nt, ot)),
                Box::new(b.instantiate(depth, sort, nt, ot)),
            ),
            Formula::Imp(a, b) => Formula::Imp(
                Box::new(a.instantiate(depth, sort, nt, ot)),
                Box::new(b.instantiate(depth, sort, nt, ot)),
            ),
            Formula::Not(a) => Formula::Not(Box::new(a.instantiate(depth, sort, nt, ot))),
            Formula::All(s, a) => {
                Formula::All(*s, Box::new(a.instantiate(depth + 1, sort, nt, ot)))
            }
            Formula::Ex(s, a) => Formula::Ex(*s, Box::new(a.instantiate(depth + 1, sort, nt, ot))),
        }
    }

    /// `A(t)` for the body of a Nat quantifier.
    pub fn instantiate_nat(&self, t: &NatTerm) -> Formula {
        self.instantiate(0, Sort::Nat, Some(t), None)
    }

    /// `A(ξ̄)` for the body of an Ord quantifier.
    pub fn instantiate_ord(&self, t: &OrdTerm) -> Formula {
        self.instantiate(0, Sort::Ord, None, Some(t))
    }

    /// Replace `X(u)` by `I_Φ(ξ, u)`.
    pub fn subst_opvar_iphi(&self, xi: &OrdTerm) -> Formula {
        let xi = xi.clone();
        self.map_opvar(&move |u| Formula::IPhi(xi.clone(), u))
    }

    /// Replace `X(u)` by `Ī_Φ(u)`.
    pub fn subst_opvar_ibar(&self) -> Formula {
        self.map_opvar(&Formula::IBar)
    }

    fn map_opvar(&self, f: &dyn Fn(NatTerm) -> Formula) -> Formula {
        match self {
            Formula::OpVar(t) => f(t.clone()),
            Formula::Eq(..) | Formula::LeOrd(..) | Formula::IPhi(..) | Formula::IBar(..) => {
                self.clone()
            }
            Formula::And(a, b) => Formula::And(Box::new(a.map_opvar(f)), Box::new(b.map_opvar(f))),
            Formula::Or(a, b) => Formula::Or(Box::new(a.map_opvar(f)), Box::new(b.map_opvar(f))),
            Formula::Imp(a, b) => Formula::Imp(Box::new(a.map_opvar(f)), Box::new(b.map_opvar(f))),
            Formula::Not(a) => Formula::Not(Box::new(a.map_opvar(f))),
            Formula::All(s, a) => Formula::All(*s, Box::new(a.map_opvar(f))),
            Formula::Ex(s, a) => Formula::Ex(*s, Box::new(a.map_opvar(f))),
        }
    }

    /// True when every occurrence of `X` is positive.
    pub fn opvar_positive(&self) -> bool {
        fn walk(f: &Formula, pos: bool, ok: &mut bool) {
            match f {
                Formula::OpVar(_) => {
                    if !pos {
                        *ok = false;
                    }
                }
                Formula::Eq(..) | Formula::LeOrd(..) | Formula::IPhi(..) | Formula::IBar(..) => {}
                Formula::And(a, b) | Formula::Or(a, b) => {
                    walk(a, pos, ok);
                    walk(b, pos, ok);
                }
                Formula::Imp(a, b) => {
                    walk(a, !pos, ok);
                    walk(b, pos, ok);
                }
                Formula::Not(a) => walk(a, !pos, ok),
                Formula::All(_, a) | Formula::Ex(_, a) => walk(a, pos, ok),
            }
        }
        let mut ok = true;
        walk(self, true, &mut ok);
        ok
    }

    pub fn contains_opvar(&self) -> bool {
        match self {
            Formula::OpVar(_) => true,
            Formula::Eq(..) | Formula::LeOrd(..) | Formula::IPhi(..) | Formula::IBar(..) => false,
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Imp(a, b) => {
                a.contains_opvar() || b.contains_opvar()
            }
            Formula::Not(a) => a.contains_opvar(),
            Formula::All(_, a) | Formula::Ex(_, a) => a.contains_opvar(),
        }
    }

    pub fn free_vars(&self) -> BTreeSet<u64> {
        fn walk(f: &Formula, out: &mut BTreeSet<u64>) {
            match f {
                Formula::Eq(a, b) => {
                    a.free_vars(out);
                    b.free_vars(out);
                }
                Formula::LeOrd(..) => {}
                Formula::IPhi(_, t) | Formula::IBar(t) | Formula::OpVar(t) => t.free_vars(out),
                Formula::And(a, b) | Formula::Or(a, b) | Formula::Imp(a, b) => {
                    walk(a, out);
                    walk(b, out);
                }
                Formula::Not(a) => walk(a, out),
                Formula::All(_, a) | Formula::Ex(_, a) => walk(a, out),
            }
        }
        let mut s = BTreeSet::new();
        walk(self, &mut s);
        s
    }
}

// ---------------------------------------------------------------------------
// Goedel numbering of collapsed formulas and terms. Only the decode direction
// is used: enumeration walks codes upward, and the codes of interest are
// small.

fn decode_nat_term(code: u64, binders: &[Sort]) -> Option<NatTerm> {
    if code == 0 {
        return Some(NatTerm::Zero);
    }
    let (tag, payload) = unpair(code - 1);
    Some(match tag {
        0 => NatTerm::Succ(Box::new(decode_nat_term(payload, binders)?)),
        1 => {
            let i = payload as u32;
            if binders.get(i as usize).copied() != Some(Sort::Nat) {
                return None;
            }
            NatTerm::Bound(i)
        }
        2 => NatTerm::Free(payload),
        3 => {
            let (a, b) = unpair(payload);
            NatTerm::Add(
                Box::new(decode_nat_term(a, binders)?),
                Box::new(decode_nat_term(b, binders)?),
            )
        }
        4 => {
            let (a, b) = unpair(payload);
            NatTerm::Mul(
                Box::new(decode_nat_term(a, binders)?),
                Box::new(decode_nat_term(b, binders)?),
            )
        }
        _ => return None,
    })
}

fn decode_ord_term(code: u64, binders: &[Sort]) -> Option<OrdTerm> {
    let (tag, payload) = unpair(code);
    Some(match tag {
        0 => OrdTerm::Param(payload),
        1 => {
            let i = payload as u32;
            if binders.get(i as usize).copied() != Some(Sort::Ord) {
                return None;
            }
            OrdTerm::Bound(i)
        }
        _ => return None,
    })
}

/// Which vocabulary the enumeration may produce.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Vocabulary {
    pub inductive: bool,
    pub free_vars: bool,
}

impl Vocabulary {
    pub fn lk() -> Self {
        Vocabulary {
            inductive: false,
            free_vars: true,
        }
    }
    pub fn inductive() -> Self {
        Vocabulary {
            inductive: true,
            free_vars: false,
        }
    }
}

fn decode_formula_at(code: u64, binders: &mut Vec<Sort>, vocab: Vocabulary) -> Option<Formula> {
    let (tag, payload) = unpair(code);
    match tag {
        0 => {
            let (a, b) = unpair(payload);
            Some(Formula::Eq(
                decode_nat_term(a, binders)?,
                decode_nat_term(b, binders)?,
            ))
        }
        1 => {
            let (a, b) = unpair(payload);
            Some(Formula::LeOrd(
                decode_ord_term(a, binders)?,
                decode_ord_term(b, binders)?,
            ))
        }
        2 | 3 | 5 => {
            let (a, b) = unpair(payload);
            let fa = Box::new(decode_formula_at(a, binders, vocab)?);
            let fb = Box::new(decode_formula_at(b, binders, vocab)?);
            Some(match tag {
                2 => Formula::And(fa, fb),
                3 => Formula::Or(fa, fb),
                _ => Formula::Imp(fa, fb),
            })
        }
        4 => Some(Formula::Not(Box::new(decode_formula_at(
            payload, binders, vocab,
        )?))),
        6 | 7 | 8 | 9 => {
            let sort = if tag == 6 || tag == 8 {
                Sort::Nat
            } else {
                Sort::Ord
            };
            binders.insert(0, sort);
            let body = decode_formula_at(payload, binders, vocab);
            binders.remove(0);
            let body = Box::new(body?);
            Some(if tag <= 7 {
                Formula::All(sort, body)
            } else {
                Formula::Ex(sort, body)
            })
        }
        10 if vocab.inductive => {
            let (o, t) = unpair(payload);
            Some(Formula::IPhi(
                decode_ord_term(o, binders)?,
                decode_nat_term(t, binders)?,
            ))
        }
        11 if vocab.inductive => Some(Formula::IBar(decode_nat_term(payload, binders)?)),
        _ => None,
    }
}

/// Decode a code into a well-sorted collapsed formula, or None.
pub fn decode_formula(code: u64, vocab: Vocabulary) -> Option<Formula> {
    let f = decode_formula_at(code, &mut Vec::new(), vocab)?;
    if !vocab.free_vars && !f.free_vars().is_empty() {
        return None;
    }
    // Collapsed form: the parameter set must be an initial segment.
    let occ = f.occ_set();
    for (i, p) in occ.iter().enumerate() {
        if *p != i as u64 {
            return None;
        }
    }
    Some(f)
}

/// Decode a Nat term with no bound variables (the instantiation stream).
pub fn decode_term(code: u64, vocab: Vocabulary) -> Option<NatTerm> {
    let t = decode_nat_term(code, &[])?;
    if !vocab.free_vars && t.has_free() {
        return None;
    }
    Some(t)
}

/// The first `count` terms of the Nat-sort stream, in numbering order.
pub fn enumerate_terms(count: usize, vocab: Vocabulary) -> Vec<NatTerm> {
    let mut out = Vec::new();
    let mut code = 0u64;
    while out.len() < count && code < 2_000_000 {
        if let Some(t) = decode_term(code, vocab) {
            out.push(t);
        }
        code += 1;
    }
    out
}

/// All strictly increasing (by position) `m`-tuples over `items`, in
/// lexicographic order of positions.
pub fn increasing_tuples(items: &[u64], m: usize) -> Vec<Vec<u64>> {
    fn rec(items: &[u64], m: usize, start: usize, acc: &mut Vec<u64>, out: &mut Vec<Vec<u64>>) {
        if acc.len() == m {
            out.push(acc.clone());
            return;
        }
        for i in start..items.len() {
            acc.push(items[i]);
            rec(items, m, i + 1, acc, out);
            acc.pop();
        }
    }
    let mut out = Vec::new();
    rec(items, m, 0, &mut Vec::new(), &mut out);
    out
}

/// Enumerate concrete formulas whose parameters come from `params` (sorted
/// in the ambient parameter order): by collapsed code, then by the
/// lexicographically ordered increasing parameter assignment. Returns the
/// first formula accepted.
pub fn least_formula(
    params: &[u64],
    vocab: Vocabulary,
    mut accept: impl FnMut(&Formula) -> bool,
) -> Option<Formula> {
    for code in 0..200_000u64 {
        let Some(collapsed) = decode_formula(code, vocab) else {
            continue;
        };
        let m = collapsed.occ_set().len();
        if m > params.len() {
            continue;
        }
        for choice in increasing_tuples(params, m) {
            let concrete = collapsed
                .relabel_params(&|slot| choice.get(slot as usize).copied())
                .expect("slots are initial");
            if accept(&concrete) {
                return Some(concrete);
            }
        }
    }
    None
}

// ---------------------------------------------------------------------------
// Rendering; the grammar is documented in docs/grammar.md.

fn render_nat(t: &NatTerm, names: &[String], out: &mut String) {
    match t {
        NatTerm::Zero => out.push('0'),
        NatTerm::Succ(a) => {
            out.push_str("(S ");
            render_nat(a, names, out);
            out.push(')');
        }
        NatTerm::Add(a, b) => {
            out.push_str("(+ ");
            render_nat(a, names, out);
            out.push(' ');
            render_nat(b, names, out);
            out.push(')');
        }
        NatTerm::Mul(a, b) => {
            out.push_str("(* ");
            render_nat(a, names, out);
            out.push(' ');
            render_nat(b, names, out);
            out.push(')');
        }
        NatTerm::Free(j) => {
            out.push('x');
            out.push_str(&j.to_string());
        }
        NatTerm::Bound(i) => {
            let idx = names.len().checked_sub(1 + *i as usize);
            match idx.and_then(|k| names.get(k)) {
                Some(n) => out.push_str(n),
                None => out.push_str(&format!("?b{i}")),
            }
        }
    }
}

fn render_ord(t: &OrdTerm, names: &[String], out: &mut String) {
    match t {
        OrdTerm::Param(p) => {
            out.push_str("(param ");
            out.push_str(&p.to_string());
            out.push(')');
        }
        OrdTerm::Bound(i) => {
            let idx = names.len().checked_sub(1 + *i as usize);
            match idx.and_then(|k| names.get(k)) {
                Some(n) => out.push_str(n),
                None => out.push_str(&format!("?b{i}")),
            }
        }
    }
}

fn render_at(f: &Formula, names: &mut Vec<String>, out: &mut String) {
    match f {
        Formula::Eq(a, b) => {
            out.push_str("(= ");
            render_nat(a, names, out);
            out.push(' ');
            render_nat(b, names, out);
            out.push(')');
        }
        Formula::LeOrd(a, b) => {
            out.push_str("(leq-ord ");
            render_ord(a, names, out);
            out.push(' ');
            render_ord(b, names, out);
            out.push(')');
        }
        Formula::IPhi(o, t) => {
            out.push_str("(I ");
            render_ord(o, names, out);
            out.push(' ');
            render_nat(t, names, out);
            out.push(')');
        }
        Formula::IBar(t) => {
            out.push_str("(Ibar ");
            render_nat(t, names, out);
            out.push(')');
        }
        Formula::OpVar(t) => {
            out.push_str("(X ");
            render_nat(t, names, out);
            out.push(')');
        }
        Formula::And(a, b) | Formula::Or(a, b) | Formula::Imp(a, b) => {
            let name = match f {
                Formula::And(..) => "and",
                Formula::Or(..) => "or",
                _ => "imp",
            };
            out.push('(');
            out.push_str(name);
            out.push(' ');
            render_at(a, names, out);
            out.push(' ');
            render_at(b, names, out);
            out.push(')');
        }
        Formula::Not(a) => {
            out.push_str("(not ");
            render_at(a, names, out);
            out.push(')');
        }
        Formula::All(s, a) | Formula::Ex(s, a) => {
            let q = if matches!(f, Formula::All(..)) {
                "forall"
            } else {
                "exists"
            };
            let sname = match s {
                Sort::Nat => "Nat",
                Sort::Ord => "Ord",
            };
            let var = format!("v{}", names.len());
            out.push('(');
            out.push_str(q);
            out.push(' ');
            out.push_str(sname);
            out.push(' ');
            out.push_str(&var);
            out.push(' ');
            names.push(var);
            render_at(a, names, out);
            names.pop();
            out.push(')');
        }
    }
}

pub fn render(f: &Formula) -> String {
    let mut out = String::new();
    render_at(f, &mut Vec::new(), &mut out);
    out
}

impl fmt::Display for Formula {
    fn fmt(&self, fm: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(fm, "{}", render(self))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn degree_examples() {
        assert_eq!(Formula::eq00().degree(), 0);
        let f = Formula::Not(Box::new(Formula::And(
            Box::new(Formula::eq00()),
            Box::new(Formula::Eq(NatTerm::numeral(1), NatTerm::Zero)),
        )));
        assert_eq!(f.degree(), 2);
        let g = Formula::All(
            Sort::Ord,
            Box::new(Formula::LeOrd(OrdTerm::Bound(0), OrdTerm::Bound(0))),
        );
        assert_eq!(g.degree(), 1);
    }

    #[test]
    fn numbering_zero_is_eq00() {
        assert_eq!(decode_formula(0, Vocabulary::lk()), Some(Formula::eq00()));
        for code in 0..4_000 {
            if let Some(f) = decode_formula(code, Vocabulary::inductive()) {
                let occ = f.occ_set();
                for (i, p) in occ.iter().enumerate() {
                    assert_eq!(*p, i as u64, "non-collapsed decode at {code}");
                }
            }
        }
    }

    #[test]
    fn term_stream_variables_are_sparse() {
        // Freshness of the level-indexed eigenvariable pool: x_j must not
        // appear before stream position j, so instantiation at level k can
        // only ever introduce variables with index < k.
        let terms = enumerate_terms(150, Vocabulary::lk());
        for (pos, t) in terms.iter().enumerate() {
            if let NatTerm::Free(j) = t {
                assert!(pos as u64 >= *j, "x{j} appears at stream position {pos}");
            }
        }
    }

    #[test]
    fn least_formula_is_eq00_when_fresh() {
        let c = least_formula(&[], Vocabulary::lk(), |_| true).unwrap();
        assert_eq!(c, Formula::eq00());
        let c2 = least_formula(&[], Vocabulary::lk(), |f| *f != Formula::eq00()).unwrap();
        assert_ne!(c2, Formula::eq00());
    }

    #[test]
    fn least_formula_commutes_with_relabeling() {
        // The numbering acts on collapsed formulas, so skipping the same
        // number of candidates over {3,8} and over {5,9} yields formulas
        // that match after relabeling 3->5, 8->9.
        let skip = 6usize;
        let mut n = 0;
        let with38 = least_formula(&[3, 8], Vocabulary::lk(), |_| {
            n += 1;
            n > skip
        })
        .unwrap();
        let mut m = 0;
        let with59 = least_formula(&[5, 9], Vocabulary::lk(), |_| {
            m += 1;
            m > skip
        })
        .unwrap();
        let relabeled = with38
            .relabel_params(&|p| match p {
                3 => Some(5),
                8 => Some(9),
                other => Some(other),
            })
            .unwrap();
        assert_eq!(relabeled, with59);
    }

    #[test]
    fn opvar_positivity() {
        let xt = Formula::OpVar(NatTerm::Bound(0));
        assert!(Formula::All(Sort::Nat, Box::new(xt.clone())).opvar_positive());
        let neg = Formula::Not(Box::new(xt.clone()));
        assert!(!neg.opvar_positive());
        assert!(Formula::Not(Box::new(neg)).opvar_positive());
        assert!(!Formula::Imp(Box::new(xt), Box::new(Formula::eq00())).opvar_positive());
    }

    #[test]
    fn substitution() {
        let g = Formula::All(
            Sort::Ord,
            Box::new(Formula::LeOrd(OrdTerm::Bound(0), OrdTerm::Bound(0))),
        );
        if let Formula::All(_, body) = g {
            let inst = body.instantiate_ord(&OrdTerm::Param(7));
            assert_eq!(inst, Formula::LeOrd(OrdTerm::Param(7), OrdTerm::Param(7)));
        }
        // operator template substitution: P(X, x) = X(x)
        let p = Formula::OpVar(NatTerm::Bound(0));
        let at2 = p.instantiate_nat(&NatTerm::numeral(2));
        assert_eq!(at2, Formula::OpVar(NatTerm::numeral(2)));
        assert_eq!(
            at2.subst_opvar_iphi(&OrdTerm::Param(3)),
            Formula::IPhi(OrdTerm::Param(3), NatTerm::numeral(2))
        );
        assert_eq!(at2.subst_opvar_ibar(), Formula::IBar(NatTerm::numeral(2)));
    }
}
