//! Property checks shared by the proptest suite and the acceptance runner.

use std::collections::{BTreeSet, HashSet};

use automode::biasgen;
use automode::clause::{self, Clause, HornDefinition};
use automode::eval;
use automode::learner::{self, LearnConfig};
use automode::lgg;
use automode::profiler;
use automode::relstore::{ExampleSet, RelationSchema, Tuple};
use automode::Exec;
use proptest::prelude::*;
use proptest::test_runner::TestCaseError;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{all_examples, oracle_covers, oracle_inds, oracle_modes, oracle_subsumes, Rows, RELATIONS};

pub type Check = Result<(), TestCaseError>;

pub fn covers_matches_oracle(rows: &Rows, c: &Clause, e: &Tuple) -> Check {
    let db = rows.db();
    let got = clause::covers(c, e, &db).unwrap();
    let want = oracle_covers(c, e, &rows.facts());
    prop_assert_eq!(got, want, "clause {} on {:?}", c, e);
    Ok(())
}

fn rel_index(name: &str) -> usize {
    RELATIONS.iter().position(|(n, _)| *n == name).unwrap()
}

pub fn inds_match_oracle(rows: &Rows, alpha: f64) -> Check {
    let db = rows.db();
    let seq = profiler::discover_inds(&db, alpha, Exec::Sequential).unwrap();
    let par = profiler::discover_inds(&db, alpha, Exec::Parallel).unwrap();
    prop_assert_eq!(&seq, &par);
    let got: BTreeSet<_> = seq
        .inds
        .iter()
        .map(|i| {
            (
                (rel_index(&i.lhs.relation), i.lhs.position),
                (rel_index(&i.rhs.relation), i.rhs.position),
            )
        })
        .collect();
    prop_assert_eq!(got, oracle_inds(rows, alpha));
    Ok(())
}

pub fn inds_monotone(rows: &Rows, a: f64, b: f64) -> Check {
    let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
    let db = rows.db();
    let small = profiler::discover_inds(&db, lo, Exec::Sequential).unwrap();
    let large = profiler::discover_inds(&db, hi, Exec::Sequential).unwrap();
    for i in &small.inds {
        prop_assert!(large.contains(i.lhs, i.rhs));
    }
    let deduped = profiler::dedupe_bidirectional(&large);
    for i in &deduped.inds {
        prop_assert!(large.contains(i.lhs, i.rhs));
        if deduped.contains(i.rhs, i.lhs) {
            prop_assert!(i.is_exact());
        }
    }
    Ok(())
}

pub fn armg_sound(rows: &Rows, c: &Clause, e: &Tuple) -> Check {
    let db = rows.db();
    let facts = rows.facts();
    let g = learner::armg(c, e, &db).unwrap().expect("distinct head variables always match");
    prop_assert!(oracle_covers(&g, e, &facts), "{} does not cover {:?}", g, e);
    let mut pool = c.body.clone();
    for lit in &g.body {
        let i = pool.iter().position(|l| l == lit);
        prop_assert!(i.is_some(), "literal not in input body");
        pool.remove(i.unwrap());
    }
    for x in all_examples() {
        if oracle_covers(c, &x, &facts) {
            prop_assert!(oracle_covers(&g, &x, &facts));
        }
    }
    Ok(())
}

pub fn lgg_subsumes_inputs(c1: &Clause, c2: &Clause, rows: &Rows) -> Check {
    let raw = lgg::lgg_clauses_unreduced(c1, c2).unwrap();
    prop_assert!(raw.body.len() <= c1.body.len() * c2.body.len());
    prop_assert!(oracle_subsumes(&raw, c1));
    prop_assert!(oracle_subsumes(&raw, c2));
    let g = lgg::lgg_clauses(c1, c2).unwrap();
    prop_assert!(oracle_subsumes(&g, c1), "{} vs {}", g, c1);
    prop_assert!(oracle_subsumes(&g, c2), "{} vs {}", g, c2);
    let facts = rows.facts();
    for x in all_examples() {
        if oracle_covers(c1, &x, &facts) || oracle_covers(c2, &x, &facts) {
            prop_assert!(oracle_covers(&g, &x, &facts));
        }
    }
    Ok(())
}

pub fn subsumption_matches_oracle(general: &Clause, specific: &Clause) -> Check {
    prop_assert_eq!(
        clause::subsumes(general, specific),
        oracle_subsumes(general, specific),
        "{} vs {}",
        general,
        specific
    );
    Ok(())
}

pub fn reduction_is_equivalent(c: &Clause) -> Check {
    let r = clause::deep_reduce(c);
    prop_assert!(r.body.len() <= c.body.len());
    prop_assert!(oracle_subsumes(&r, c));
    prop_assert!(oracle_subsumes(c, &r));
    Ok(())
}

fn target() -> RelationSchema {
    RelationSchema::anonymous("t", 2).unwrap()
}

/// Bottom clauses and learned clauses conform to an induced bias.
pub fn learning_conforms(rows: &Rows, pos: &[Tuple], neg: &[Tuple]) -> Check {
    let db = rows.db();
    let neg: Vec<Tuple> = neg.iter().filter(|n| !pos.contains(n)).cloned().collect();
    let ex = ExampleSet::new(target(), pos.to_vec(), neg).unwrap();
    let induced = biasgen::induce_bias(&db, &ex.target, &ex.positives, 0.5, 3, Exec::Sequential).unwrap();
    let bias = &induced.bias;
    let cfg = LearnConfig {
        sample_size: 4,
        ..LearnConfig::default()
    };
    let facts = rows.facts();
    for e in &ex.positives {
        let bc = learner::build_bottom_clause(e, &db, bias, &cfg).unwrap();
        prop_assert!(clause::conforms(&bc.clause, bias), "{}", bc.clause);
        prop_assert!(oracle_modes(&bc.clause, bias));
        prop_assert!(oracle_covers(&bc.clause, e, &facts));
        let mapped: HashSet<u32> = bc.var_map.values().copied().collect();
        prop_assert_eq!(mapped.len(), bc.var_map.len());
    }
    let trace = learner::learn_with_trace(&db, &ex, bias, &cfg).unwrap();
    prop_assert!(trace.rounds <= ex.positives.len());
    for c in &trace.definition.clauses {
        prop_assert!(clause::conforms(c, bias), "{}", c);
        prop_assert!(oracle_modes(c, bias));
    }
    Ok(())
}

pub fn negatives_are_fresh(rows: &Rows, pos: &[Tuple], ratio: usize, seed: u64) -> Check {
    let db = rows.db();
    let distinct: BTreeSet<Tuple> = pos.iter().cloned().collect();
    let pos: Vec<Tuple> = distinct.into_iter().collect();
    let domain = |p: usize| pos.iter().map(|t| t[p]).collect::<BTreeSet<_>>().len();
    let pool = domain(0) * domain(1) - pos.len();
    match eval::generate_negatives(&db, &pos, &target(), ratio, seed) {
        Ok(negs) => {
            let set: HashSet<&Tuple> = negs.iter().collect();
            prop_assert_eq!(set.len(), negs.len());
            prop_assert!(negs.iter().all(|n| !pos.contains(n)));
            prop_assert_eq!(negs.len(), pool.min(ratio * pos.len()));
        }
        Err(_) => prop_assert_eq!(pool, 0),
    }
    Ok(())
}

pub fn precision_recall_matches_count(rows: &Rows, clauses: &[Clause], pos: &[Tuple], neg: &[Tuple]) -> Check {
    let db = rows.db();
    let facts = rows.facts();
    let neg: Vec<Tuple> = neg.iter().filter(|n| !pos.contains(n)).cloned().collect();
    let def = HornDefinition::new(clauses.to_vec()).unwrap();
    let (p, r) = eval::precision_recall(&def, pos, &neg, &db, Exec::Parallel).unwrap();
    let hit = |e: &Tuple| clauses.iter().any(|c| oracle_covers(c, e, &facts));
    let tp = pos.iter().filter(|e| hit(e)).count();
    let fp = neg.iter().filter(|e| hit(e)).count();
    let want_p = if tp + fp == 0 { 1.0 } else { tp as f64 / (tp + fp) as f64 };
    let want_r = if pos.is_empty() { 0.0 } else { tp as f64 / pos.len() as f64 };
    prop_assert!((p - want_p).abs() < 1e-12 && (r - want_r).abs() < 1e-12);
    prop_assert!((0.0..=1.0).contains(&p) && (0.0..=1.0).contains(&r));
    Ok(())
}

pub fn folds_partition(n: usize, k: usize, seed: u64) -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let parts = eval::fold_assignment(n, k, &mut rng);
    prop_assert_eq!(parts.len(), k);
    let sizes: Vec<usize> = parts.iter().map(Vec::len).collect();
    prop_assert!(sizes.iter().max().unwrap() - sizes.iter().min().unwrap() <= 1);
    let mut all: Vec<usize> = parts.concat();
    all.sort_unstable();
    prop_assert_eq!(all, (0..n).collect::<Vec<_>>());
    Ok(())
}

pub fn text_roundtrip(c: &Clause) -> Check {
    let text = c.to_string();
    let back = Clause::parse(&text).unwrap();
    prop_assert!(back.is_variant_of(c), "{} vs {}", back, c);
    prop_assert_eq!(back.to_string(), text);
    Ok(())
}

pub fn exec_modes_agree(rows: &Rows, pos: &[Tuple], neg: &[Tuple]) -> Check {
    let db = rows.db();
    let neg: Vec<Tuple> = neg.iter().filter(|n| !pos.contains(n)).cloned().collect();
    let ex = ExampleSet::new(target(), pos.to_vec(), neg).unwrap();
    let induced = biasgen::induce_bias(&db, &ex.target, &ex.positives, 0.5, 3, Exec::Sequential).unwrap();
    let run = |exec| {
        let cfg = LearnConfig {
            exec,
            sample_size: 4,
            ..LearnConfig::default()
        };
        learner::learn_definition(&db, &ex, &induced.bias, &cfg).unwrap().render()
    };
    prop_assert_eq!(run(Exec::Sequential), run(Exec::Parallel));
    Ok(())
}
