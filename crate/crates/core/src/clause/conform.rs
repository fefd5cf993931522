//! Checking clauses against a bias: mode well-formedness and type consistency.

use std::collections::{BTreeSet, HashMap, HashSet};

use ustr::Ustr;

use super::{Clause, Literal, Term};
use crate::bias::{BiasSpec, ModeSymbol, TypeToken};

pub fn conforms(clause: &Clause, bias: &BiasSpec) -> bool {
    modes_conform(clause, bias) && types_conform(clause, bias)
}

fn head_ok(clause: &Clause, bias: &BiasSpec) -> bool {
    clause.head.relation == bias.target()
        && clause.head.args.len() == bias.head_mode().symbols.len()
        && clause.head.args.iter().all(|t| t.is_var())
}

pub(crate) fn placeable(lit: &Literal, seen: &HashSet<u32>, bias: &BiasSpec) -> bool {
    bias.modes_for(lit.relation).any(|m| {
        m.symbols.len() == lit.args.len()
            && m.symbols.iter().zip(&lit.args).all(|(s, t)| match (s, t) {
                (ModeSymbol::Input, Term::Var(v)) => seen.contains(v),
                (ModeSymbol::Output, Term::Var(_)) => true,
                (ModeSymbol::Constant, Term::Const(_)) => true,
                _ => false,
            })
    })
}

/// Read left to right, every body literal matches some mode: `+` positions
/// hold variables already seen, `-` positions hold variables, `#` positions
/// hold constants. The head holds only variables.
pub fn modes_conform(clause: &Clause, bias: &BiasSpec) -> bool {
    if !head_ok(clause, bias) {
        return false;
    }
    let mut seen = clause.head_vars();
    for lit in &clause.body {
        if !placeable(lit, &seen, bias) {
            return false;
        }
        seen.extend(lit.vars());
    }
    true
}

/// Reorders the body so it reads left to right under the modes, dropping
/// literals that can never be placed. Conforming clauses come back unchanged.
pub fn mode_closure(clause: &Clause, bias: &BiasSpec) -> Clause {
    let mut seen = clause.head_vars();
    let mut remaining: Vec<&Literal> = clause.body.iter().collect();
    let mut body = Vec::with_capacity(remaining.len());
    while let Some(k) = remaining.iter().position(|l| placeable(l, &seen, bias)) {
        let lit = remaining.remove(k);
        seen.extend(lit.vars());
        body.push(lit.clone());
    }
    Clause::new(clause.head.clone(), body)
}

/// Some assignment of one type per variable makes every literal's type tuple
/// a declared predicate. Relations without declarations impose nothing.
pub fn types_conform(clause: &Clause, bias: &BiasSpec) -> bool {
    let literals: Vec<&Literal> = std::iter::once(&clause.head)
        .chain(&clause.body)
        .filter(|l| bias.has_predicates(l.relation))
        .collect();
    let mut domains: HashMap<u32, BTreeSet<TypeToken>> = HashMap::new();
    for lit in &literals {
        for (p, t) in lit.args.iter().enumerate() {
            let Term::Var(v) = t else { continue };
            let Some(allowed) = bias.position_types(lit.relation, p) else {
                continue;
            };
            match domains.get_mut(v) {
                Some(d) => d.retain(|x| allowed.contains(x)),
                None => {
                    domains.insert(*v, allowed);
                }
            }
        }
    }
    if domains.values().any(BTreeSet::is_empty) {
        return false;
    }
    let hard: Vec<&Literal> = literals
        .into_iter()
        .filter(|l| !bias.is_product(l.relation))
        .collect();
    if hard.is_empty() {
        return true;
    }
    let mut assigned = HashMap::new();
    assign(&hard, 0, bias, &domains, &mut assigned)
}

fn assign(
    lits: &[&Literal],
    i: usize,
    bias: &BiasSpec,
    domains: &HashMap<u32, BTreeSet<TypeToken>>,
    assigned: &mut HashMap<u32, TypeToken>,
) -> bool {
    let Some(lit) = lits.get(i) else {
        return true;
    };
    let rel: Ustr = lit.relation;
    for decl in bias.predicates_for(rel) {
        if decl.types.len() != lit.args.len() {
            continue;
        }
        let mut added = Vec::new();
        let mut ok = true;
        for (t, ty) in lit.args.iter().zip(&decl.types) {
            let Term::Var(v) = t else { continue };
            match assigned.get(v) {
                Some(a) if a != ty => ok = false,
                Some(_) => {}
                None if domains.get(v).is_some_and(|d| d.contains(ty)) => {
                    assigned.insert(*v, *ty);
                    added.push(*v);
                }
                None => ok = false,
            }
            if !ok {
                break;
            }
        }
        if ok && assign(lits, i + 1, bias, domains, assigned) {
            return true;
        }
        for v in added {
            assigned.remove(&v);
        }
    }
    false
}
