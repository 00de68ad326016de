//! S-expression reader for formulas and sequents; the grammar is documented
//! in docs/grammar.md. `parse(render(f)) == f`.

use super::formula::{Formula, NatTerm, OrdTerm, Sort};
use super::Sequent;

#[derive(Debug, thiserror::Error)]
#[error("parse error at byte {at}: {msg}")]
pub struct ParseError {
    pub at: usize,
    pub msg: String,
}

#[derive(Debug, Clone)]
enum SExpr {
    Atom(String, usize),
    List(Vec<SExpr>, usize),
}

impl SExpr {
    fn pos(&self) -> usize {
        match self {
            SExpr::Atom(_, p) | SExpr::List(_, p) => *p,
        }
    }
}

fn err<T>(at: usize, msg: impl Into<String>) -> Result<T, ParseError> {
    Err(ParseError {
        at,
        msg: msg.into(),
    })
}

fn tokenize(text: &str) -> Result<Vec<(String, usize)>, ParseError> {
    let mut out = Vec::new();
    let mut cur = String::new();
    let mut cur_start = 0;
    for (i, ch) in text.char_indices() {
        match ch {
            '(' | ')' => {
                if !cur.is_empty() {
                    out.push((std::mem::take(&mut cur), cur_start));
                }
                out.push((ch.to_string(), i));
            }
            c if c.is_whitespace() => {
                if !cur.is_empty() {
                    out.push((std::mem::take(&mut cur), cur_start));
                }
            }
            c => {
                if cur.is_empty() {
                    cur_start = i;
                }
                cur.push(c);
            }
        }
    }
    if !cur.is_empty() {
        out.push((cur, cur_start));
    }
    Ok(out)
}

fn read(tokens: &[(String, usize)], at: &mut usize) -> Result<SExpr, ParseError> {
    let Some((tok, pos)) = tokens.get(*at) else {
        return err(usize::MAX, "unexpected end of input");
    };
    *at += 1;
    match tok.as_str() {
        "(" => {
            let mut items = Vec::new();
            loop {
                match tokens.get(*at) {
                    Some((t, _)) if t == ")" => {
                        *at += 1;
                        return Ok(SExpr::List(items, *pos));
                    }
                    Some(_) => items.push(read(tokens, at)?),
                    None => return err(*pos, "unclosed ("),
                }
            }
        }
        ")" => err(*pos, "unexpected )"),
        _ => Ok(SExpr::Atom(tok.clone(), *pos)),
    }
}

fn parse_sexpr(text: &str) -> Result<SExpr, ParseError> {
    let tokens = tokenize(text)?;
    let mut at = 0;
    let e = read(&tokens, &mut at)?;
    if at != tokens.len() {
        return err(tokens[at].1, "trailing input");
    }
    Ok(e)
}

/// Bound-variable scope: innermost last.
struct Scope(Vec<(String, Sort)>);

impl Scope {
    fn lookup(&self, name: &str) -> Option<(u32, Sort)> {
        self.0
            .iter()
            .rev()
            .enumerate()
            .find(|(_, (n, _))| n == name)
            .map(|(i, (_, s))| (i as u32, *s))
    }
}

fn nat_term(e: &SExpr, scope: &Scope) -> Result<NatTerm, ParseError> {
    match e {
        SExpr::Atom(a, pos) => {
            if a == "0" {
                return Ok(NatTerm::Zero);
            }
            if let Some((i, sort)) = scope.lookup(a) {
                if sort != Sort::Nat {
                    return err(*pos, format!("variable {a} has sort Ord, expected Nat"));
                }
                return Ok(NatTerm::Bound(i));
            }
            if let Some(j) = a.strip_prefix('x').and_then(|s| s.parse::<u64>().ok()) {
                return Ok(NatTerm::Free(j));
            }
            err(*pos, format!("unknown Nat term `{a}`"))
        }
        SExpr::List(items, pos) => {
            let Some(SExpr::Atom(head, _)) = items.first() else {
                return err(*pos, "expected a term");
            };
            match (head.as_str(), items.len()) {
                ("S", 2) => Ok(NatTerm::Succ(Box::new(nat_term(&items[1], scope)?))),
                ("+", 3) => Ok(NatTerm::Add(
                    Box::new(nat_term(&items[1], scope)?),
                    Box::new(nat_term(&items[2], scope)?),
                )),
                ("*", 3) => Ok(NatTerm::Mul(
                    Box::new(nat_term(&items[1], scope)?),
                    Box::new(nat_term(&items[2], scope)?),
                )),
                _ => err(*pos, format!("unknown Nat term head `{head}`")),
            }
        }
    }
}

fn ord_term(e: &SExpr, scope: &Scope) -> Result<OrdTerm, ParseError> {
    match e {
        SExpr::Atom(a, pos) => {
            if let Some((i, sort)) = scope.lookup(a) {
                if sort != Sort::Ord {
                    return err(*pos, format!("variable {a} has sort Nat, expected Ord"));
                }
                return Ok(OrdTerm::Bound(i));
            }
            err(*pos, format!("unknown Ord term `{a}`"))
        }
        SExpr::List(items, pos) => match (items.first(), items.get(1)) {
            (Some(SExpr::Atom(h, _)), Some(SExpr::Atom(k, kp))) if h == "param" => {
                match k.parse::<u64>() {
                    Ok(code) => Ok(OrdTerm::Param(code)),
                    Err(_) => err(*kp, "param expects a number"),
                }
            }
            _ => err(*pos, "unknown Ord term"),
        },
    }
}

fn sort_of(name: &str, pos: usize) -> Result<Sort, ParseError> {
    match name {
        "Nat" | "N" => Ok(Sort::Nat),
        "Ord" => Ok(Sort::Ord),
        _ => err(pos, format!("unknown sort `{name}`")),
    }
}

fn formula(e: &SExpr, scope: &mut Scope) -> Result<Formula, ParseError> {
    let SExpr::List(items, pos) = e else {
        return err(e.pos(), "expected a formula");
    };
    let Some(SExpr::Atom(head, hpos)) = items.first() else {
        return err(*pos, "expected a formula head");
    };
    match (head.as_str(), items.len()) {
        ("=", 3) => Ok(Formula::Eq(
            nat_term(&items[1], scope)?,
            nat_term(&items[2], scope)?,
        )),
        ("leq-ord", 3) => Ok(Formula::LeOrd(
            ord_term(&items[1], scope)?,
            ord_term(&items[2], scope)?,
        )),
        ("I", 3) => Ok(Formula::IPhi(
            ord_term(&items[1], scope)?,
            nat_term(&items[2], scope)?,
        )),
        ("Ibar", 2) => Ok(Formula::IBar(nat_term(&items[1], scope)?)),
        ("X", 2) => Ok(Formula::OpVar(nat_term(&items[1], scope)?)),
        ("and", 3) | ("or", 3) | ("imp", 3) => {
            let a = Box::new(formula(&items[1], scope)?);
            let b = Box::new(formula(&items[2], scope)?);
            Ok(match head.as_str() {
                "and" => Formula::And(a, b),
                "or" => Formula::Or(a, b),
                _ => Formula::Imp(a, b),
            })
        }
        ("not", 2) => Ok(Formula::Not(Box::new(formula(&items[1], scope)?))),
        ("forall", 4) | ("exists", 4) => {
            let SExpr::Atom(sname, spos) = &items[1] else {
                return err(items[1].pos(), "expected a sort");
            };
            let SExpr::Atom(vname, _) = &items[2] else {
                return err(items[2].pos(), "expected a variable name");
            };
            let sort = sort_of(sname, *spos)?;
            scope.0.push((vname.clone(), sort));
            let body = formula(&items[3], scope);
            scope.0.pop();
            let body = Box::new(body?);
            Ok(if head == "forall" {
                Formula::All(sort, body)
            } else {
                Formula::Ex(sort, body)
            })
        }
        _ => err(*hpos, format!("unknown formula head `{head}`")),
    }
}

/// Parse a single formula.
pub fn parse_formula(text: &str) -> Result<Formula, ParseError> {
    let e = parse_sexpr(text)?;
    formula(&e, &mut Scope(Vec::new()))
}

/// Parse a sequent `(seq (f ...) (g ...))`.
pub fn parse_sequent(text: &str) -> Result<Sequent, ParseError> {
    let e = parse_sexpr(text)?;
    let SExpr::List(items, pos) = &e else {
        return err(e.pos(), "expected (seq (..) (..))");
    };
    match items.as_slice() {
        [SExpr::Atom(h, _), SExpr::List(ante, _), SExpr::List(succ, _)] if h == "seq" => {
            let mut scope = Scope(Vec::new());
            let ante = ante
                .iter()
                .map(|f| formula(f, &mut scope))
                .collect::<Result<Vec<_>, _>>()?;
            let succ = succ
                .iter()
                .map(|f| formula(f, &mut scope))
                .collect::<Result<Vec<_>, _>>()?;
            Ok(Sequent { ante, succ })
        }
        _ => err(*pos, "expected (seq (..) (..))"),
    }
}

pub fn render_sequent(s: &Sequent) -> String {
    let side = |fs: &[Formula]| {
        fs.iter()
            .map(super::formula::render)
            .collect::<Vec<_>>()
            .join(" ")
    };
    format!("(seq ({}) ({}))", side(&s.ante), side(&s.succ))
}

#[cfg(test)]
mod tests {
    use super::super::formula::render;
    use super::*;

    #[test]
    fn spec_examples() {
        assert_eq!(
            parse_formula("(= (S 0) 0)").unwrap(),
            Formula::Eq(NatTerm::numeral(1), NatTerm::Zero)
        );
        assert_eq!(
            parse_formula("(forall Ord x (leq-ord x x))").unwrap(),
            Formula::All(
                Sort::Ord,
                Box::new(Formula::LeOrd(OrdTerm::Bound(0), OrdTerm::Bound(0)))
            )
        );
        assert_eq!(
            parse_formula("(Ibar (S (S 0)))").unwrap(),
            Formula::IBar(NatTerm::numeral(2))
        );
    }

    #[test]
    fn errors_carry_location() {
        let e = parse_formula("(= (S 0) y)").unwrap_err();
        assert!(e.msg.contains("unknown Nat term"));
        assert!(parse_formula("(= 0 0").is_err());
        let sort_err = parse_formula("(forall Ord x (= x 0))").unwrap_err();
        assert!(sort_err.msg.contains("sort"));
    }

    #[test]
    fn round_trip() {
        let samples = [
            "(= 0 0)",
            "(or (= 0 0) (not (= 0 0)))",
            "(forall Nat v0 (exists Ord v1 (and (= v0 v0) (leq-ord v1 v1))))",
            "(imp (I (param 3) (S 0)) (Ibar x2))",
            "(X (+ 0 (* (S 0) x1)))",
        ];
        for s in samples {
            let f = parse_formula(s).unwrap();
            let r = render(&f);
            assert_eq!(parse_formula(&r).unwrap(), f, "{s} -> {r}");
        }
    }

    #[test]
    fn sequent_round_trip() {
        let s = parse_sequent("(seq ((= 0 0)) ((= (S 0) 0)))").unwrap();
        assert_eq!(s.ante.len(), 1);
        assert_eq!(s.succ.len(), 1);
        let r = render_sequent(&s);
        assert_eq!(parse_sequent(&r).unwrap(), s);
    }
}
