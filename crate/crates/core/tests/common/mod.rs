//! Random small databases and clauses, and brute-force oracles that share no
//! code with the engine.

#![allow(dead_code)]

pub mod checks;

use std::collections::{BTreeSet, HashMap, HashSet};

use automode::clause::{Clause, Literal, Term};
use automode::relstore::{DatabaseInstance, RelationSchema, Tuple};
use proptest::prelude::*;
use ustr::Ustr;

pub const RELATIONS: [(&str, usize); 3] = [("p", 2), ("q", 2), ("r", 1)];
pub const CONSTANTS: usize = 5;

pub fn constant(i: usize) -> Ustr {
    Ustr::from(&format!("c{i}"))
}

#[derive(Debug, Clone)]
pub struct Rows(pub Vec<(usize, Vec<usize>)>);

impl Rows {
    pub fn db(&self) -> DatabaseInstance {
        let schemas: Vec<RelationSchema> = RELATIONS
            .iter()
            .map(|(n, a)| RelationSchema::anonymous(n, *a).unwrap())
            .collect();
        let mut db = DatabaseInstance::new(schemas).unwrap();
        for (rel, vals) in &self.0 {
            let (name, arity) = RELATIONS[*rel];
            db.insert(name, vals[..arity].iter().map(|v| constant(*v)).collect())
                .unwrap();
        }
        db
    }

    pub fn facts(&self) -> HashSet<(Ustr, Vec<Ustr>)> {
        self.0
            .iter()
            .map(|(rel, vals)| {
                let (name, arity) = RELATIONS[*rel];
                (Ustr::from(name), vals[..arity].iter().map(|v| constant(*v)).collect())
            })
            .collect()
    }
}

pub fn rows(max: usize) -> impl Strategy<Value = Rows> {
    prop::collection::vec((0..RELATIONS.len(), prop::collection::vec(0..CONSTANTS, 2)), 0..=max)
        .prop_map(Rows)
}

pub fn term(vars: u32) -> impl Strategy<Value = Term> {
    prop_oneof![
        4 => (0..vars).prop_map(Term::Var),
        1 => (0..CONSTANTS).prop_map(|c| Term::Const(constant(c))),
    ]
}

pub fn literal(vars: u32) -> impl Strategy<Value = Literal> {
    (0..RELATIONS.len(), term(vars), term(vars)).prop_map(|(r, a, b)| {
        let (name, arity) = RELATIONS[r];
        let args = [a, b][..arity].to_vec();
        Literal::new(name, args)
    })
}

/// `t(X0,X1) :- …` with up to `max_body` literals over five variables.
pub fn clause(max_body: usize) -> impl Strategy<Value = Clause> {
    prop::collection::vec(literal(5), 0..=max_body).prop_map(|body| {
        Clause::new(Literal::new("t", vec![Term::Var(0), Term::Var(1)]), body)
    })
}

pub fn example() -> impl Strategy<Value = Tuple> {
    (0..CONSTANTS, 0..CONSTANTS).prop_map(|(a, b)| vec![constant(a), constant(b)])
}

/// Every pair of constants, in order.
pub fn all_examples() -> Vec<Tuple> {
    (0..CONSTANTS)
        .flat_map(|a| (0..CONSTANTS).map(move |b| vec![constant(a), constant(b)]))
        .collect()
}

/// Tries every assignment of the clause's non-head variables.
pub fn oracle_covers(clause: &Clause, example: &[Ustr], facts: &HashSet<(Ustr, Vec<Ustr>)>) -> bool {
    let mut bind: HashMap<u32, Ustr> = HashMap::new();
    for (t, v) in clause.head.args.iter().zip(example) {
        match t {
            Term::Const(c) if c != v => return false,
            Term::Const(_) => {}
            Term::Var(x) => {
                if let Some(prev) = bind.insert(*x, *v) {
                    if prev != *v {
                        return false;
                    }
                }
            }
        }
    }
    let free: Vec<u32> = clause
        .body
        .iter()
        .flat_map(|l| l.args.iter().filter_map(|t| t.as_var()))
        .filter(|v| !bind.contains_key(v))
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    let mut domain: BTreeSet<Ustr> = (0..CONSTANTS).map(constant).collect();
    domain.extend(example.iter().copied());
    let domain: Vec<Ustr> = domain.into_iter().collect();
    enumerate(clause, &free, 0, &mut bind, &domain, facts)
}

fn enumerate(
    clause: &Clause,
    free: &[u32],
    i: usize,
    bind: &mut HashMap<u32, Ustr>,
    domain: &[Ustr],
    facts: &HashSet<(Ustr, Vec<Ustr>)>,
) -> bool {
    if i == free.len() {
        return clause.body.iter().all(|l| {
            let tuple: Vec<Ustr> = l
                .args
                .iter()
                .map(|t| match t {
                    Term::Var(v) => bind[v],
                    Term::Const(c) => *c,
                })
                .collect();
            facts.contains(&(l.relation, tuple))
        });
    }
    for &c in domain {
        bind.insert(free[i], c);
        if enumerate(clause, free, i + 1, bind, domain, facts) {
            return true;
        }
    }
    bind.remove(&free[i]);
    false
}

/// θ-subsumption by plain backtracking over body literals in order.
pub fn oracle_subsumes(general: &Clause, specific: &Clause) -> bool {
    let mut theta: HashMap<u32, Term> = HashMap::new();
    if !match_into(&general.head, &specific.head, &mut theta) {
        return false;
    }
    subsume_from(&general.body, 0, &specific.body, &mut theta)
}

fn match_into(g: &Literal, s: &Literal, theta: &mut HashMap<u32, Term>) -> bool {
    if g.relation != s.relation || g.args.len() != s.args.len() {
        return false;
    }
    for (a, b) in g.args.iter().zip(&s.args) {
        match a {
            Term::Const(_) => {
                if a != b {
                    return false;
                }
            }
            Term::Var(v) => match theta.get(v) {
                Some(t) if t != b => return false,
                Some(_) => {}
                None => {
                    theta.insert(*v, *b);
                }
            },
        }
    }
    true
}

fn subsume_from(body: &[Literal], i: usize, target: &[Literal], theta: &mut HashMap<u32, Term>) -> bool {
    if i == body.len() {
        return true;
    }
    for cand in target {
        let saved = theta.clone();
        if match_into(&body[i], cand, theta) && subsume_from(body, i + 1, target, theta) {
            return true;
        }
        *theta = saved;
    }
    false
}

/// Mode check written out directly: `+` needs a variable already seen.
pub fn oracle_modes(clause: &Clause, bias: &automode::bias::BiasSpec) -> bool {
    use automode::bias::ModeSymbol;
    let mut seen: HashSet<u32> = clause.head.args.iter().filter_map(|t| t.as_var()).collect();
    for lit in &clause.body {
        let ok = bias.modes().iter().any(|m| {
            m.relation == lit.relation
                && m.symbols.len() == lit.args.len()
                && m.symbols.iter().zip(&lit.args).all(|(s, t)| match s {
                    ModeSymbol::Input => t.as_var().is_some_and(|v| seen.contains(&v)),
                    ModeSymbol::Output => t.is_var(),
                    ModeSymbol::Constant => !t.is_var(),
                })
        });
        if !ok {
            return false;
        }
        seen.extend(lit.args.iter().filter_map(|t| t.as_var()));
    }
    true
}

/// Every `R[A] ⊆ S[B]` with error at most `alpha`, by direct set difference.
pub fn oracle_inds(rows: &Rows, alpha: f64) -> BTreeSet<((usize, usize), (usize, usize))> {
    let mut cols: Vec<((usize, usize), BTreeSet<usize>)> = Vec::new();
    for (r, (_, arity)) in RELATIONS.iter().enumerate() {
        for p in 0..*arity {
            let vals = rows
                .0
                .iter()
                .filter(|(rel, _)| *rel == r)
                .map(|(_, v)| v[p])
                .collect();
            cols.push(((r, p), vals));
        }
    }
    let mut out = BTreeSet::new();
    for (a, va) in &cols {
        for (b, vb) in &cols {
            if a == b || va.is_empty() {
                continue;
            }
            let missing = va.difference(vb).count();
            if missing as f64 / va.len() as f64 <= alpha {
                out.insert((*a, *b));
            }
        }
    }
    out
}

/// Ground clause `t(a,b) :- …` over three constants.
pub fn ground_clause(max_body: usize) -> impl Strategy<Value = Clause> {
    let c = || (0..3usize).prop_map(|i| Term::Const(constant(i)));
    (
        c(),
        c(),
        prop::collection::vec((0..RELATIONS.len(), c(), c()), 1..=max_body),
    )
        .prop_map(|(h1, h2, body)| {
            let body = body
                .into_iter()
                .map(|(r, a, b)| {
                    let (name, arity) = RELATIONS[r];
                    Literal::new(name, [a, b][..arity].to_vec())
                })
                .collect();
            Clause::new(Literal::new("t", vec![h1, h2]), body)
        })
}
