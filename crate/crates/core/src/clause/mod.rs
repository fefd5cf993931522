//! Clauses over terms, their text format, coverage testing against a database,
//! θ-subsumption, reduction and bias conformance.

mod conform;
mod engine;

use std::collections::{BTreeSet, HashMap, HashSet};
use std::fmt;

use ustr::Ustr;

use crate::error::{Error, Result};
use crate::syntax;

pub use conform::{conforms, mode_closure, modes_conform, types_conform};
pub use engine::{covers, covers_definition, deep_reduce, subsumes, PreparedClause};

/// Variables are numbered; constants are data values. The two namespaces
/// never mix.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Term {
    Var(u32),
    Const(Ustr),
}

impl Term {
    pub fn constant(s: &str) -> Term {
        Term::Const(Ustr::from(s))
    }

    pub fn as_var(self) -> Option<u32> {
        match self {
            Term::Var(v) => Some(v),
            Term::Const(_) => None,
        }
    }

    pub fn is_var(self) -> bool {
        matches!(self, Term::Var(_))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Literal {
    pub relation: Ustr,
    pub args: Vec<Term>,
}

impl Literal {
    pub fn new(relation: impl Into<Ustr>, args: Vec<Term>) -> Self {
        Literal {
            relation: relation.into(),
            args,
        }
    }

    pub fn vars(&self) -> impl Iterator<Item = u32> + '_ {
        self.args.iter().filter_map(|t| t.as_var())
    }
}

/// A Horn clause `head :- body`. An empty body covers every example the head
/// matches.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Clause {
    pub head: Literal,
    pub body: Vec<Literal>,
}

impl Clause {
    pub fn new(head: Literal, body: Vec<Literal>) -> Self {
        Clause { head, body }
    }

    pub fn head_only(&self) -> Clause {
        Clause::new(self.head.clone(), Vec::new())
    }

    pub fn head_vars(&self) -> HashSet<u32> {
        self.head.vars().collect()
    }

    pub fn vars(&self) -> BTreeSet<u32> {
        self.head
            .vars()
            .chain(self.body.iter().flat_map(Literal::vars))
            .collect()
    }

    /// One past the largest variable id, or 0 for a ground clause.
    pub fn next_var(&self) -> u32 {
        self.vars().last().map_or(0, |v| v + 1)
    }

    /// Consistent renaming of every variable.
    pub fn map_vars(&self, mut f: impl FnMut(u32) -> u32) -> Clause {
        let mut map_lit = |l: &Literal| Literal {
            relation: l.relation,
            args: l
                .args
                .iter()
                .map(|t| match t {
                    Term::Var(v) => Term::Var(f(*v)),
                    c => *c,
                })
                .collect(),
        };
        let head = map_lit(&self.head);
        let body = self.body.iter().map(&mut map_lit).collect();
        Clause { head, body }
    }

    /// Renumbers variables 0, 1, … in order of first occurrence.
    pub fn canonical(&self) -> Clause {
        let mut ids: HashMap<u32, u32> = HashMap::new();
        for v in self.head.vars().chain(self.body.iter().flat_map(Literal::vars)) {
            let n = ids.len() as u32;
            ids.entry(v).or_insert(n);
        }
        self.map_vars(|v| ids[&v])
    }

    /// Drops exact duplicate body literals, keeping first occurrences.
    pub fn minimize(&self) -> Clause {
        let mut seen = HashSet::new();
        let body = self
            .body
            .iter()
            .filter(|l| seen.insert((*l).clone()))
            .cloned()
            .collect();
        Clause::new(self.head.clone(), body)
    }

    /// Keeps only body literals reachable from the head through shared variables.
    pub fn head_connected(&self) -> Clause {
        self.connected_by(Term::is_var)
    }

    /// Like [`Clause::head_connected`], but shared constants connect as well.
    /// Suits ground clauses.
    pub fn term_connected(&self) -> Clause {
        self.connected_by(|_| true)
    }

    fn connected_by(&self, links: impl Fn(Term) -> bool) -> Clause {
        let terms = |l: &Literal| -> Vec<Term> { l.args.iter().copied().filter(|t| links(*t)).collect() };
        let mut reached: HashSet<Term> = terms(&self.head).into_iter().collect();
        let mut keep = vec![false; self.body.len()];
        loop {
            let mut changed = false;
            for (i, lit) in self.body.iter().enumerate() {
                let ts = terms(lit);
                if !keep[i] && ts.iter().any(|t| reached.contains(t)) {
                    keep[i] = true;
                    reached.extend(ts);
                    changed = true;
                }
            }
            if !changed {
                break;
            }
        }
        let body = self
            .body
            .iter()
            .zip(keep)
            .filter(|(_, k)| *k)
            .map(|(l, _)| l.clone())
            .collect();
        Clause::new(self.head.clone(), body)
    }

    /// Same clause up to a bijective renaming of variables and reordering of
    /// body literals (duplicates count).
    pub fn is_variant_of(&self, other: &Clause) -> bool {
        if self.body.len() != other.body.len() || self.head.relation != other.head.relation {
            return false;
        }
        let mut fwd = HashMap::new();
        let mut back = HashMap::new();
        if !match_literal(&self.head, &other.head, &mut fwd, &mut back).0 {
            return false;
        }
        let mut used = vec![false; other.body.len()];
        variant_search(&self.body, &other.body, 0, &mut used, &mut fwd, &mut back)
    }

    /// Parses the text format, e.g.
    /// `advisedBy(X0,X1) :- publication(Z0,X0), inPhase(X0,"post_quals").`
    pub fn parse(src: &str) -> Result<Clause> {
        let src = src.trim();
        let src = src.strip_suffix('.').unwrap_or(src);
        let (head_src, body_src) = match src.find(":-") {
            Some(i) => (&src[..i], Some(&src[i + 2..])),
            None => (src, None),
        };
        let mut vars: HashMap<String, u32> = HashMap::new();
        let head = parse_literal(head_src, &mut vars)?;
        let mut body = Vec::new();
        if let Some(b) = body_src {
            if !b.trim().is_empty() {
                for piece in syntax::split_top_level(b, ',').map_err(Error::Validation)? {
                    body.push(parse_literal(piece, &mut vars)?);
                }
            }
        }
        Ok(Clause::new(head, body))
    }
}

fn parse_literal(src: &str, vars: &mut HashMap<String, u32>) -> Result<Literal> {
    let (name, args) = syntax::parse_atom(src).map_err(Error::Validation)?;
    let args = args
        .into_iter()
        .map(|a| {
            if a.quoted {
                Ok(Term::Const(Ustr::from(&a.text)))
            } else if syntax::is_identifier(&a.text) {
                let n = vars.len() as u32;
                Ok(Term::Var(*vars.entry(a.text).or_insert(n)))
            } else {
                Err(Error::Validation(format!(
                    "`{}` is neither a variable nor a quoted constant",
                    a.text
                )))
            }
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Literal::new(name.as_str(), args))
}

fn match_literal(
    a: &Literal,
    b: &Literal,
    fwd: &mut HashMap<u32, u32>,
    back: &mut HashMap<u32, u32>,
) -> (bool, Vec<u32>) {
    let mut added = Vec::new();
    if a.relation != b.relation || a.args.len() != b.args.len() {
        return (false, added);
    }
    for (x, y) in a.args.iter().zip(&b.args) {
        let ok = match (x, y) {
            (Term::Const(c), Term::Const(d)) => c == d,
            (Term::Var(u), Term::Var(w)) => match (fwd.get(u), back.get(w)) {
                (Some(m), Some(n)) => m == w && n == u,
                (None, None) => {
                    fwd.insert(*u, *w);
                    back.insert(*w, *u);
                    added.push(*u);
                    true
                }
                _ => false,
            },
            _ => false,
        };
        if !ok {
            for u in &added {
                if let Some(w) = fwd.remove(u) {
                    back.remove(&w);
                }
            }
            return (false, Vec::new());
        }
    }
    (true, added)
}

fn variant_search(
    left: &[Literal],
    right: &[Literal],
    i: usize,
    used: &mut [bool],
    fwd: &mut HashMap<u32, u32>,
    back: &mut HashMap<u32, u32>,
) -> bool {
    if i == left.len() {
        return true;
    }
    for j in 0..right.len() {
        if used[j] {
            continue;
        }
        let (ok, added) = match_literal(&left[i], &right[j], fwd, back);
        if !ok {
            continue;
        }
        used[j] = true;
        if variant_search(left, right, i + 1, used, fwd, back) {
            return true;
        }
        used[j] = false;
        for u in added {
            if let Some(w) = fwd.remove(&u) {
                back.remove(&w);
            }
        }
    }
    false
}

impl fmt::Display for Clause {
    /// Head variables print as `X0, X1, …`, body-only variables as `Z0, Z1, …`,
    /// both numbered by first occurrence. Constants are double-quoted.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut names: HashMap<u32, String> = HashMap::new();
        let mut heads = 0;
        for v in self.head.vars() {
            names.entry(v).or_insert_with(|| {
                heads += 1;
                format!("X{}", heads - 1)
            });
        }
        let mut others = 0;
        for v in self.body.iter().flat_map(Literal::vars) {
            names.entry(v).or_insert_with(|| {
                others += 1;
                format!("Z{}", others - 1)
            });
        }
        let lit = |l: &Literal| {
            let args: Vec<String> = l
                .args
                .iter()
                .map(|t| match t {
                    Term::Var(v) => names[v].clone(),
                    Term::Const(c) => format!("\"{c}\""),
                })
                .collect();
            format!("{}({})", l.relation, args.join(","))
        };
        write!(f, "{}", lit(&self.head))?;
        if !self.body.is_empty() {
            let body: Vec<String> = self.body.iter().map(lit).collect();
            write!(f, " :- {}", body.join(", "))?;
        }
        write!(f, ".")
    }
}

/// A union of clauses sharing one head relation.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct HornDefinition {
    pub clauses: Vec<Clause>,
}

impl HornDefinition {
    pub fn new(clauses: Vec<Clause>) -> Result<Self> {
        if let Some(first) = clauses.first() {
            let (rel, arity) = (first.head.relation, first.head.args.len());
            if clauses
                .iter()
                .any(|c| c.head.relation != rel || c.head.args.len() != arity)
            {
                return Err(Error::Validation(
                    "all clauses of a definition must share one head relation".into(),
                ));
            }
        }
        Ok(HornDefinition { clauses })
    }

    pub fn is_empty(&self) -> bool {
        self.clauses.is_empty()
    }

    pub fn len(&self) -> usize {
        self.clauses.len()
    }

    /// One clause per line.
    pub fn render(&self) -> String {
        self.clauses.iter().map(|c| format!("{c}\n")).collect()
    }

    /// Parses one clause per line; `#` lines and blank lines are skipped.
    pub fn parse(text: &str) -> Result<Self> {
        let clauses = text
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty() && !l.starts_with('#'))
            .map(Clause::parse)
            .collect::<Result<Vec<_>>>()?;
        HornDefinition::new(clauses)
    }
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;

    pub(crate) fn advisor_clause() -> Clause {
        Clause::parse(
            "advisedBy(X,Y) :- student(X), inPhase(X,U), professor(Y), hasPosition(Y,V), \
             publication(Z,X), publication(Z,Y).",
        )
        .unwrap()
    }

    #[test]
    fn text_roundtrip() {
        let c = Clause::parse(r#"advisedBy(a,b) :- publication(p,a), publication(p,b), inPhase(a,"post_quals")."#)
            .unwrap();
        let text = c.to_string();
        assert_eq!(
            text,
            r#"advisedBy(X0,X1) :- publication(Z0,X0), publication(Z0,X1), inPhase(X0,"post_quals")."#
        );
        assert_eq!(Clause::parse(&text).unwrap().to_string(), text);
        assert_eq!(Clause::parse("t(X).").unwrap().to_string(), "t(X0).");
        assert!(Clause::parse("t(1)").is_err());
    }

    #[test]
    fn variants() {
        let a = advisor_clause();
        let b = Clause::parse(
            "advisedBy(P,Q) :- publication(W,Q), publication(W,P), hasPosition(Q,K), professor(Q), \
             inPhase(P,J), student(P).",
        )
        .unwrap();
        assert!(a.is_variant_of(&b));
        let c = Clause::parse(
            "advisedBy(P,Q) :- publication(W,Q), publication(W2,P), hasPosition(Q,K), professor(Q), \
             inPhase(P,J), student(P).",
        )
        .unwrap();
        assert!(!a.is_variant_of(&c));
        let swapped = Clause::parse("advisedBy(Y,X) :- student(X), inPhase(X,U), professor(Y), hasPosition(Y,V), publication(Z,X), publication(Z,Y).").unwrap();
        assert!(!a.is_variant_of(&swapped));
    }

    #[test]
    fn minimize_removes_duplicates_only() {
        let c = Clause::parse("t(X) :- student(X), student(X).").unwrap();
        assert_eq!(c.minimize().body.len(), 1);
        let d = advisor_clause();
        assert_eq!(d.minimize(), d);
        let e = Clause::parse("t(X) :- p(X,Y), student(X), p(X,Y), student(X).").unwrap();
        let f = Clause::parse("t(X) :- student(X), p(X,Y), student(X), p(X,Y).").unwrap();
        assert!(e.minimize().is_variant_of(&f.minimize()));
        assert_eq!(e.minimize().body.len(), 2);
    }

    #[test]
    fn head_connectivity() {
        let c = Clause::parse("t(X) :- p(X,Y), q(Y,Z), r(W), s(W,V).").unwrap();
        let d = c.head_connected();
        assert_eq!(d.body.len(), 2);
        let g = Clause::parse(r#"t("a") :- p("a","b"), q("b"), r("c")."#).unwrap();
        assert!(g.head_connected().body.is_empty());
        assert_eq!(g.term_connected().body.len(), 2);
    }

    #[test]
    fn definition_requires_one_head() {
        let a = Clause::parse("t(X) :- p(X).").unwrap();
        let b = Clause::parse("u(X) :- p(X).").unwrap();
        assert!(HornDefinition::new(vec![a.clone(), b]).is_err());
        let def = HornDefinition::new(vec![a]).unwrap();
        assert_eq!(HornDefinition::parse(&def.render()).unwrap(), def);
    }
}
