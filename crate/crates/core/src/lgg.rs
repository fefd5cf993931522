//! Least general generalization of clauses and the lgg-based learner.

use std::collections::{HashMap, HashSet};

use ustr::Ustr;

use crate::bias::{BiasSpec, ModeDecl, ModeSymbol, PredicateDecl, TypeToken};
use crate::clause::{self, Clause, HornDefinition, Literal, Term};
use crate::error::{Error, Result};
use crate::learner::{self, LearnConfig, LearnTrace};
use crate::relstore::{DatabaseInstance, ExampleSet};

/// One variable per distinct ordered pair of differing terms.
#[derive(Debug, Default)]
pub struct VarPairTable {
    pairs: HashMap<(Term, Term), u32>,
    next: u32,
}

impl VarPairTable {
    /// Fresh variables are numbered from `first` up.
    pub fn starting_at(first: u32) -> Self {
        VarPairTable {
            pairs: HashMap::new(),
            next: first,
        }
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }
}

pub fn lgg_terms(a: Term, b: Term, table: &mut VarPairTable) -> Term {
    if a == b {
        return a;
    }
    let next = &mut table.next;
    let v = *table.pairs.entry((a, b)).or_insert_with(|| {
        *next += 1;
        *next - 1
    });
    Term::Var(v)
}

fn lgg_literals(a: &Literal, b: &Literal, table: &mut VarPairTable) -> Option<Literal> {
    if a.relation != b.relation || a.args.len() != b.args.len() {
        return None;
    }
    let args = a
        .args
        .iter()
        .zip(&b.args)
        .map(|(x, y)| lgg_terms(*x, *y, table))
        .collect();
    Some(Literal::new(a.relation, args))
}

/// The pairwise lgg of compatible body literals under one shared table,
/// before any reduction.
pub fn lgg_clauses_unreduced(c1: &Clause, c2: &Clause) -> Result<Clause> {
    if c1.head.relation != c2.head.relation || c1.head.args.len() != c2.head.args.len() {
        return Err(Error::Validation(format!(
            "cannot generalize heads {} and {}",
            c1.head.relation, c2.head.relation
        )));
    }
    // keep the two clauses' variables apart
    let offset = c1.next_var();
    let c2 = c2.map_vars(|v| v + offset);
    let mut table = VarPairTable::starting_at(offset + c2.next_var());
    let head = lgg_literals(&c1.head, &c2.head, &mut table).expect("heads are compatible");
    let mut body = Vec::new();
    for l1 in &c1.body {
        for l2 in &c2.body {
            if let Some(l) = lgg_literals(l1, l2, &mut table) {
                body.push(l);
            }
        }
    }
    Ok(Clause::new(head, body))
}

/// lgg of two clauses, deduplicated, cut to the part connected to the head
/// through shared terms, and deep-reduced.
pub fn lgg_clauses(c1: &Clause, c2: &Clause) -> Result<Clause> {
    let raw = lgg_clauses_unreduced(c1, c2)?;
    Ok(clause::deep_reduce(&raw.minimize().term_connected()).canonical())
}

/// A bias with the given predicates and, for every declared relation of `db`
/// except the target, one mode per position with `+` there and `-` elsewhere.
/// With no declarations at all every relation takes part untyped.
pub fn all_variable_bias(
    db: &DatabaseInstance,
    target: Ustr,
    target_arity: usize,
    predicates: &[PredicateDecl],
) -> Result<BiasSpec> {
    let mut modes = Vec::new();
    for schema in db.schemas() {
        if schema.name == target {
            continue;
        }
        for p in 0..schema.arity() {
            let mut symbols = vec![ModeSymbol::Output; schema.arity()];
            symbols[p] = ModeSymbol::Input;
            modes.push(ModeDecl::new(schema.name, symbols));
        }
    }
    let mut predicates: Vec<PredicateDecl> = predicates
        .iter()
        .filter(|d| d.relation == target || db.contains_relation(d.relation))
        .cloned()
        .collect();
    if predicates.is_empty() {
        // no declarations at all: one shared type, so nothing is filtered
        let any = TypeToken::numbered(0);
        predicates.push(PredicateDecl {
            relation: target,
            types: vec![any; target_arity],
        });
        for schema in db.schemas().filter(|s| s.name != target) {
            predicates.push(PredicateDecl {
                relation: schema.name,
                types: vec![any; schema.arity()],
            });
        }
    }
    // relations without declarations take no part
    let declared: HashSet<Ustr> = predicates.iter().map(|d| d.relation).collect();
    modes.retain(|m| declared.contains(&m.relation));
    BiasSpec::new(predicates, ModeDecl::head(target, target_arity), modes, 1)
}

/// Removes ground body literals that are facts of `db`; they hold for every
/// substitution.
fn drop_ground_facts(clause: &Clause, db: &DatabaseInstance) -> Clause {
    let body = clause
        .body
        .iter()
        .filter(|l| {
            let ground: Option<Vec<Ustr>> = l
                .args
                .iter()
                .map(|t| match t {
                    Term::Const(c) => Some(*c),
                    Term::Var(_) => None,
                })
                .collect();
            match (ground, db.relation(l.relation)) {
                (Some(tuple), Some(rel)) => !rel.contains(&tuple),
                _ => true,
            }
        })
        .cloned()
        .collect();
    Clause::new(clause.head.clone(), body)
}

/// Cover-set learning where each clause is a fold of lgg over the ground
/// bottom clauses of sampled positives. A fold step is kept only when it
/// raises the score.
pub fn lgg_learn(
    db: &DatabaseInstance,
    examples: &ExampleSet,
    predicates: &[PredicateDecl],
    cfg: &LearnConfig,
) -> Result<HornDefinition> {
    Ok(lgg_learn_with_trace(db, examples, predicates, cfg)?.definition)
}

pub fn lgg_learn_with_trace(
    db: &DatabaseInstance,
    examples: &ExampleSet,
    predicates: &[PredicateDecl],
    cfg: &LearnConfig,
) -> Result<LearnTrace> {
    if db.tuple_count() > cfg.lgg_tuple_guard {
        return Err(Error::Intractable(format!(
            "the database has {} tuples, over the lgg limit of {}; lgg does not scale \
             to databases of this size, use the armg generalizer instead",
            db.tuple_count(),
            cfg.lgg_tuple_guard
        )));
    }
    let target = examples.target.name;
    let bias = all_variable_bias(db, target, examples.target.arity(), predicates)?;
    let negatives = &examples.negatives;
    learner::cover_set(db, examples, cfg, |seed, uncovered, rng| {
        let ground = |e: &[Ustr]| -> Result<Clause> {
            Ok(learner::build_bottom_clause(e, db, &bias, cfg)?.ground())
        };
        let mut current = clause::deep_reduce(&ground(seed)?);
        let mut best = learner::score(&current, uncovered, negatives, db)?;
        for i in learner::sample_indices(rng, uncovered.len(), cfg.sample_size) {
            let e = &uncovered[i];
            if e == seed || clause::covers(&current, e, db)? {
                continue;
            }
            let next = drop_ground_facts(&lgg_clauses(&current, &ground(e)?)?, db);
            let s = learner::score(&next, uncovered, negatives, db)?;
            if s > best {
                current = next;
                best = s;
            }
        }
        Ok(current)
    })
}
