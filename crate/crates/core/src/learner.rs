//! Bottom-clause construction, armg generalization under beam search, and the
//! cover-set loop.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};

use rand::seq::index;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use ustr::Ustr;

use crate::bias::{BiasSpec, ModeSymbol, TypeToken};
use crate::clause::{self, Clause, HornDefinition, Literal, PreparedClause, Term};
use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::relstore::{DatabaseInstance, ExampleSet, Tuple};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LearnConfig {
    /// Bottom-clause rounds.
    pub iterations: usize,
    pub beam_width: usize,
    /// Positives drawn per generalization round.
    pub sample_size: usize,
    pub min_precision: f64,
    /// `None` picks 2, or 1 when there are fewer than 4 positives.
    pub min_positives: Option<usize>,
    /// Literals one relation may contribute per bottom-clause round.
    pub per_relation_cap: usize,
    pub rng_seed: u64,
    /// Drop literals from the generalized clause while negative coverage
    /// stays the same.
    pub negative_reduction: bool,
    /// The lgg learner refuses databases with more tuples than this.
    pub lgg_tuple_guard: usize,
    #[serde(skip)]
    pub exec: Exec,
}

impl Default for LearnConfig {
    fn default() -> Self {
        LearnConfig {
            iterations: 2,
            beam_width: 3,
            sample_size: 20,
            min_precision: 0.5,
            min_positives: None,
            per_relation_cap: 100,
            rng_seed: 1,
            negative_reduction: true,
            lgg_tuple_guard: 10_000,
            exec: Exec::default(),
        }
    }
}

impl LearnConfig {
    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("iterations", self.iterations),
            ("beam width", self.beam_width),
            ("sample size", self.sample_size),
            ("per-relation cap", self.per_relation_cap),
            ("min positives", self.min_positives.unwrap_or(1)),
        ];
        for (name, v) in positive {
            if v == 0 {
                return Err(Error::Config(format!("{name} must be ≥ 1")));
            }
        }
        if !(self.min_precision > 0.0 && self.min_precision <= 1.0) {
            return Err(Error::Config(format!(
                "min precision must be in (0, 1], got {}",
                self.min_precision
            )));
        }
        Ok(())
    }

    pub fn min_positives_for(&self, positives: usize) -> usize {
        self.min_positives
            .unwrap_or(if positives < 4 { 1 } else { 2 })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BottomClause {
    pub clause: Clause,
    pub seed: Tuple,
    pub var_map: BTreeMap<Ustr, u32>,
}

impl BottomClause {
    /// The clause with every variable replaced by the constant it stands for.
    pub fn ground(&self) -> Clause {
        let back: HashMap<u32, Ustr> = self.var_map.iter().map(|(c, v)| (*v, *c)).collect();
        let subst = |l: &Literal| Literal {
            relation: l.relation,
            args: l
                .args
                .iter()
                .map(|t| match t {
                    Term::Var(v) => Term::Const(back[v]),
                    c => *c,
                })
                .collect(),
        };
        Clause::new(subst(&self.clause.head), self.clause.body.iter().map(subst).collect())
    }
}

struct Builder<'a> {
    bias: &'a BiasSpec,
    var_map: BTreeMap<Ustr, u32>,
    types: HashMap<u32, BTreeSet<TypeToken>>,
    next: u32,
}

impl Builder<'_> {
    fn var_types(&self, v: u32) -> Option<&BTreeSet<TypeToken>> {
        self.types.get(&v)
    }

    /// Types each variable of the literal may take under the declarations
    /// that agree with the variables' current types; a variable occurring
    /// twice takes one type in both places. `None` if no declaration fits.
    fn admissible(&self, relation: Ustr, args: &[Term]) -> Option<HashMap<u32, BTreeSet<TypeToken>>> {
        let mut out: HashMap<u32, BTreeSet<TypeToken>> = HashMap::new();
        if !self.bias.has_predicates(relation) {
            return Some(out);
        }
        let mut any = false;
        for decl in self.bias.predicates_for(relation) {
            if decl.types.len() != args.len() {
                continue;
            }
            let mut chosen: HashMap<u32, TypeToken> = HashMap::new();
            let fits = args.iter().zip(&decl.types).all(|(t, ty)| match t {
                Term::Var(v) => {
                    self.var_types(*v).is_none_or(|s| s.contains(ty)) && *chosen.entry(*v).or_insert(*ty) == *ty
                }
                Term::Const(_) => true,
            });
            if fits {
                any = true;
                for (v, ty) in chosen {
                    out.entry(v).or_default().insert(ty);
                }
            }
        }
        any.then_some(out)
    }

    /// Instantiates `modes` on `tuple`; returns the literal and the constants it
    /// would add to the table, without committing anything.
    fn instantiate(&self, relation: Ustr, symbols: &[ModeSymbol], tuple: &[Ustr]) -> Option<(Literal, Vec<(Ustr, u32)>)> {
        let mut fresh: Vec<(Ustr, u32)> = Vec::new();
        let mut args = Vec::with_capacity(tuple.len());
        for (s, &c) in symbols.iter().zip(tuple) {
            let known = self
                .var_map
                .get(&c)
                .copied()
                .or_else(|| fresh.iter().find(|(k, _)| *k == c).map(|(_, v)| *v));
            let term = match s {
                ModeSymbol::Constant => Term::Const(c),
                ModeSymbol::Input => Term::Var(*self.var_map.get(&c)?),
                ModeSymbol::Output => match known {
                    Some(v) => Term::Var(v),
                    None => {
                        let v = self.next + fresh.len() as u32;
                        fresh.push((c, v));
                        Term::Var(v)
                    }
                },
            };
            args.push(term);
        }
        Some((Literal::new(relation, args), fresh))
    }

    fn commit(&mut self, fresh: &[(Ustr, u32)], admissible: &HashMap<u32, BTreeSet<TypeToken>>) {
        for (c, v) in fresh {
            self.var_map.insert(*c, *v);
        }
        self.next += fresh.len() as u32;
        for (v, allowed) in admissible {
            self.types
                .entry(*v)
                .and_modify(|cur| cur.retain(|x| allowed.contains(x)))
                .or_insert_with(|| allowed.clone());
        }
    }
}

/// Builds the most specific clause for `example` relative to `db`: constants
/// become variables through one table, and `cfg.iterations` rounds pull in the
/// tuples that mention constants added in the round before.
pub fn build_bottom_clause(
    example: &[Ustr],
    db: &DatabaseInstance,
    bias: &BiasSpec,
    cfg: &LearnConfig,
) -> Result<BottomClause> {
    let target = bias.target();
    if example.len() != bias.head_mode().symbols.len() {
        return Err(Error::Validation(format!(
            "example has arity {}, {} expects {}",
            example.len(),
            target,
            bias.head_mode().symbols.len()
        )));
    }
    let mut b = Builder {
        bias,
        var_map: BTreeMap::new(),
        types: HashMap::new(),
        next: 0,
    };
    let mut head_args = Vec::with_capacity(example.len());
    let mut frontier: Vec<Ustr> = Vec::new();
    for &c in example {
        let v = match b.var_map.get(&c) {
            Some(v) => *v,
            None => {
                let v = b.next;
                b.next += 1;
                b.var_map.insert(c, v);
                frontier.push(c);
                v
            }
        };
        head_args.push(Term::Var(v));
    }
    let mut head = Literal::new(target, head_args);
    let head_types = match b.admissible(target, &head.args) {
        Some(t) => t,
        None => {
            // no declaration lets a repeated constant keep one variable
            for p in 1..head.args.len() {
                if head.args[..p].contains(&head.args[p]) {
                    head.args[p] = Term::Var(b.next);
                    b.next += 1;
                }
            }
            b.admissible(target, &head.args).unwrap_or_default()
        }
    };
    b.commit(&[], &head_types);

    let mut body: Vec<Literal> = Vec::new();
    let mut seen: HashSet<Literal> = HashSet::new();
    for _ in 0..cfg.iterations {
        if frontier.is_empty() {
            break;
        }
        let before: HashSet<Ustr> = b.var_map.keys().copied().collect();
        let mut per_relation: BTreeMap<Ustr, BTreeSet<u32>> = BTreeMap::new();
        for c in &frontier {
            for occ in db.occurrences(*c) {
                per_relation
                    .entry(occ.attribute.relation)
                    .or_default()
                    .insert(occ.tuple);
            }
        }
        for (rel_name, ids) in per_relation {
            if rel_name == target {
                continue;
            }
            let modes: Vec<_> = bias.modes_for(rel_name).cloned().collect();
            if modes.is_empty() {
                continue;
            }
            let relation = db.relation(rel_name).expect("indexed relation exists");
            let strict = !bias.is_product(rel_name);
            let mut emitted = 0;
            'tuples: for id in ids {
                let tuple = relation.tuple(id);
                for mode in &modes {
                    if mode.symbols.len() != tuple.len() {
                        continue;
                    }
                    let Some((lit, fresh)) = b.instantiate(rel_name, &mode.symbols, tuple) else {
                        continue;
                    };
                    if seen.contains(&lit) {
                        continue;
                    }
                    let Some(adm) = b.admissible(rel_name, &lit.args) else {
                        continue;
                    };
                    if strict {
                        let mut trial = Clause::new(head.clone(), body.clone());
                        trial.body.push(lit.clone());
                        if !clause::types_conform(&trial, bias) {
                            continue;
                        }
                    }
                    b.commit(&fresh, &adm);
                    seen.insert(lit.clone());
                    body.push(lit);
                    emitted += 1;
                    if emitted >= cfg.per_relation_cap {
                        break 'tuples;
                    }
                }
            }
        }
        frontier = b
            .var_map
            .keys()
            .filter(|c| !before.contains(c))
            .copied()
            .collect();
    }
    Ok(BottomClause {
        clause: Clause::new(head, body),
        seed: example.to_vec(),
        var_map: b.var_map,
    })
}

/// Drops blocking literals until `clause` covers `example`. A blocking literal
/// is the last one of the shortest body prefix that fails to cover. After each
/// drop, literals no longer connected to the head go too. `None` when the
/// head itself cannot match the example.
pub fn armg(clause: &Clause, example: &[Ustr], db: &DatabaseInstance) -> Result<Option<Clause>> {
    let prefix_covers = |body: &[Literal], len: usize| -> Result<bool> {
        clause::covers(&Clause::new(clause.head.clone(), body[..len].to_vec()), example, db)
    };
    let mut body = clause.body.clone();
    if !prefix_covers(&body, 0)? {
        return Ok(None);
    }
    while !prefix_covers(&body, body.len())? {
        // least i with prefix(i) not covering; prefix(0) covers, prefix(len) does not
        let (mut lo, mut hi) = (0, body.len());
        while hi - lo > 1 {
            let mid = (lo + hi) / 2;
            if prefix_covers(&body, mid)? {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        body.remove(hi - 1);
        body = Clause::new(clause.head.clone(), body).head_connected().body;
    }
    Ok(Some(Clause::new(clause.head.clone(), body)))
}

/// tp − fp.
pub fn score(clause: &Clause, positives: &[Tuple], negatives: &[Tuple], db: &DatabaseInstance) -> Result<i64> {
    let p = PreparedClause::new(clause, db)?;
    Ok(p.count(positives, Exec::Sequential) as i64 - p.count(negatives, Exec::Sequential) as i64)
}

#[derive(Debug, Clone)]
pub(crate) struct Scored {
    pub clause: Clause,
    pub text: String,
    pub score: i64,
}

impl Scored {
    fn key(&self) -> (std::cmp::Reverse<i64>, usize, &str) {
        (std::cmp::Reverse(self.score), self.clause.body.len(), &self.text)
    }
}

pub(crate) fn score_all(
    clauses: Vec<Clause>,
    positives: &[Tuple],
    negatives: &[Tuple],
    db: &DatabaseInstance,
    exec: Exec,
) -> Result<Vec<Scored>> {
    exec.map(&clauses, |c| {
        let p = PreparedClause::new(c, db)?;
        let s = p.count(positives, Exec::Sequential) as i64 - p.count(negatives, Exec::Sequential) as i64;
        Ok(Scored {
            text: c.to_string(),
            clause: c.clone(),
            score: s,
        })
    })
    .into_iter()
    .collect()
}

/// Sorted indices of up to `k` positions drawn uniformly from `0..n`.
pub(crate) fn sample_indices(rng: &mut ChaCha8Rng, n: usize, k: usize) -> Vec<usize> {
    let mut picked = index::sample(rng, n, k.min(n)).into_vec();
    picked.sort_unstable();
    picked
}

/// Keeps the clause well-moded and connected to the head.
fn tidy(clause: &Clause, bias: &BiasSpec) -> Clause {
    clause::mode_closure(&clause.head_connected(), bias).head_connected()
}

/// Removes literals, last first, whenever the clause without them covers no
/// additional negative example.
pub fn reduce_against_negatives(
    clause: &Clause,
    negatives: &[Tuple],
    db: &DatabaseInstance,
    bias: &BiasSpec,
) -> Result<Clause> {
    let neg_count = |c: &Clause| -> Result<usize> {
        Ok(PreparedClause::new(c, db)?.count(negatives, Exec::Sequential))
    };
    let mut current = clause.clone();
    let baseline = neg_count(&current)?;
    let mut i = current.body.len();
    while i > 0 {
        i -= 1;
        if i >= current.body.len() {
            continue;
        }
        let mut trial = current.clone();
        trial.body.remove(i);
        let trial = tidy(&trial, bias);
        if neg_count(&trial)? <= baseline {
            current = trial;
            i = i.min(current.body.len());
        }
    }
    Ok(current)
}

/// Beam search over repeated armg applications starting from the bottom
/// clause. Scores count `positives` (the still uncovered ones) and
/// `negatives`. Stops once a round brings no strictly better clause.
pub fn generalize_clause(
    bottom: &BottomClause,
    positives: &[Tuple],
    negatives: &[Tuple],
    db: &DatabaseInstance,
    bias: &BiasSpec,
    cfg: &LearnConfig,
    rng: &mut ChaCha8Rng,
) -> Result<Clause> {
    let start = tidy(&bottom.clause, bias);
    let mut best = score_all(vec![start], positives, negatives, db, cfg.exec)?
        .pop()
        .expect("one clause scored");
    let mut beam = vec![best.clone()];
    loop {
        let sample: Vec<&Tuple> = sample_indices(rng, positives.len(), cfg.sample_size)
            .into_iter()
            .map(|i| &positives[i])
            .collect();
        let pairs: Vec<(&Clause, &Tuple)> = beam
            .iter()
            .flat_map(|b| sample.iter().map(move |e| (&b.clause, *e)))
            .collect();
        let generalized = cfg.exec.map(&pairs, |(c, e)| -> Result<Option<Clause>> {
            if clause::covers(c, e, db)? {
                return Ok(None);
            }
            Ok(armg(c, e, db)?.map(|g| tidy(&g, bias)))
        });
        let mut texts = HashSet::new();
        let mut candidates = Vec::new();
        for g in generalized {
            if let Some(c) = g? {
                if texts.insert(c.to_string()) {
                    candidates.push(c);
                }
            }
        }
        if candidates.is_empty() {
            break;
        }
        let mut scored = score_all(candidates, positives, negatives, db, cfg.exec)?;
        scored.sort_by(|a, b| a.key().cmp(&b.key()));
        if scored[0].score <= best.score {
            break;
        }
        best = scored[0].clone();
        scored.truncate(cfg.beam_width);
        beam = scored;
    }
    let mut result = best.clause.minimize();
    if cfg.negative_reduction {
        result = reduce_against_negatives(&result, negatives, db, bias)?;
    }
    Ok(result)
}

/// Outcome of one cover-set run.
#[derive(Debug, Clone, Default)]
pub struct LearnTrace {
    pub definition: HornDefinition,
    /// Seeds whose clause failed the acceptance criterion.
    pub rejected_seeds: Vec<Tuple>,
    /// Outer-loop iterations.
    pub rounds: usize,
}

/// The cover-set loop: learn a clause from the first uncovered positive, keep
/// it if it is precise enough and covers enough positives, otherwise drop the
/// seed. `learn_clause` receives the seed, the uncovered positives and the RNG.
pub(crate) fn cover_set<F>(
    db: &DatabaseInstance,
    examples: &ExampleSet,
    cfg: &LearnConfig,
    mut learn_clause: F,
) -> Result<LearnTrace>
where
    F: FnMut(&Tuple, &[Tuple], &mut ChaCha8Rng) -> Result<Clause>,
{
    cfg.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.rng_seed);
    let min_positives = cfg.min_positives_for(examples.positives.len());
    let mut uncovered: Vec<Tuple> = examples.positives.clone();
    let mut trace = LearnTrace::default();
    let mut clauses = Vec::new();
    while !uncovered.is_empty() {
        trace.rounds += 1;
        let seed = uncovered[0].clone();
        let c = learn_clause(&seed, &uncovered, &mut rng)?;
        let prepared = PreparedClause::new(&c, db)?;
        let covered = prepared.covered(&uncovered, cfg.exec);
        let tp = covered.iter().filter(|x| **x).count();
        let fp = prepared.count(&examples.negatives, cfg.exec);
        let precision = if tp + fp == 0 { 0.0 } else { tp as f64 / (tp + fp) as f64 };
        if covered[0] && precision >= cfg.min_precision && tp >= min_positives {
            log::debug!("accepted {c} (tp={tp}, fp={fp})");
            clauses.push(c);
            uncovered = uncovered
                .into_iter()
                .zip(covered)
                .filter(|(_, cov)| !cov)
                .map(|(e, _)| e)
                .collect();
        } else {
            log::debug!("rejected {c} (tp={tp}, fp={fp})");
            trace.rejected_seeds.push(uncovered.remove(0));
        }
    }
    trace.definition = HornDefinition::new(clauses)?;
    Ok(trace)
}

fn check_target(examples: &ExampleSet, bias: &BiasSpec) -> Result<()> {
    if examples.target.name != bias.target() {
        return Err(Error::Validation(format!(
            "examples are for {} but the bias head is {}",
            examples.target.name,
            bias.target()
        )));
    }
    Ok(())
}

pub fn learn_definition(
    db: &DatabaseInstance,
    examples: &ExampleSet,
    bias: &BiasSpec,
    cfg: &LearnConfig,
) -> Result<HornDefinition> {
    Ok(learn_with_trace(db, examples, bias, cfg)?.definition)
}

pub fn learn_with_trace(
    db: &DatabaseInstance,
    examples: &ExampleSet,
    bias: &BiasSpec,
    cfg: &LearnConfig,
) -> Result<LearnTrace> {
    check_target(examples, bias)?;
    cover_set(db, examples, cfg, |seed, uncovered, rng| {
        let bottom = build_bottom_clause(seed, db, bias, cfg)?;
        generalize_clause(&bottom, uncovered, &examples.negatives, db, bias, cfg, rng)
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::biasgen;
    use crate::clause::tests::advisor_clause;
    use crate::fixtures;
    use std::path::Path;

    fn u(s: &str) -> Ustr {
        Ustr::from(s)
    }

    fn tup(a: &str, b: &str) -> Tuple {
        vec![u(a), u(b)]
    }

    fn manual() -> BiasSpec {
        BiasSpec::parse(fixtures::UWCSE_FRAGMENT.manual_bias().unwrap(), Path::new("b")).unwrap()
    }

    fn one_iteration() -> LearnConfig {
        LearnConfig {
            iterations: 1,
            ..LearnConfig::default()
        }
    }

    #[test]
    fn advisor_bottom_clause_has_the_constant_literal_too() {
        let db = fixtures::uwcse_fragment().db;
        let bc = build_bottom_clause(&tup("alice", "bob"), &db, &manual(), &one_iteration()).unwrap();
        let mut expected = advisor_clause();
        expected.body.push(Literal::new(
            "inPhase",
            vec![Term::Var(0), Term::constant("post_quals")],
        ));
        assert!(bc.clause.is_variant_of(&expected), "{}", bc.clause);
        let keys: Vec<&str> = bc.var_map.keys().map(|k| k.as_str()).collect();
        assert_eq!(keys, ["alice", "assistant_prof", "bob", "p1", "post_quals"]);
    }

    #[test]
    fn advisor_bottom_clause_without_constant_modes() {
        let text = fixtures::UWCSE_FRAGMENT
            .manual_bias()
            .unwrap()
            .replace("inPhase(+,#)\n", "");
        let bias = BiasSpec::parse(&text, Path::new("b")).unwrap();
        let db = fixtures::uwcse_fragment().db;
        let bc = build_bottom_clause(&tup("alice", "bob"), &db, &bias, &one_iteration()).unwrap();
        assert!(bc.clause.is_variant_of(&advisor_clause()), "{}", bc.clause);
        assert_eq!(bc.var_map.len(), 5);
    }

    #[test]
    fn second_iteration_extends_the_first() {
        let db = fixtures::uwcse_fragment().db;
        let bias = manual();
        let one = build_bottom_clause(&tup("alice", "bob"), &db, &bias, &one_iteration()).unwrap();
        let two = build_bottom_clause(&tup("alice", "bob"), &db, &bias, &LearnConfig::default()).unwrap();
        assert!(one.clause.body.iter().all(|l| two.clause.body.contains(l)));
        assert!(clause::covers(&two.clause, &tup("alice", "bob"), &db).unwrap());
        assert!(clause::conforms(&two.clause, &bias));
    }

    #[test]
    fn bottom_clause_on_empty_db_is_head_only() {
        let db = DatabaseInstance::new(Vec::new()).unwrap();
        let bc = build_bottom_clause(&tup("alice", "bob"), &db, &manual(), &LearnConfig::default()).unwrap();
        assert!(bc.clause.body.is_empty());
        assert_eq!(bc.ground().head.args, vec![Term::constant("alice"), Term::constant("bob")]);
    }

    #[test]
    fn repeated_variable_takes_one_type() {
        let db = crate::relstore::database_from_texts("p(a,b)\n", &[("p", "a,b\nc1,c1\nc0,c2\n")]).unwrap();
        let bias = BiasSpec::parse(
            "PREDICATES:\np(T1,T2)\nt(T1,T1)\nt(T2,T1)\nMODES:\nt(+,+)\np(+,-)\np(-,+)\n",
            Path::new("b"),
        )
        .unwrap();
        let bc = build_bottom_clause(&tup("c1", "c0"), &db, &bias, &LearnConfig::default()).unwrap();
        assert!(clause::conforms(&bc.clause, &bias), "{}", bc.clause);
        assert!(bc.clause.body.iter().all(|l| l.args[0] != l.args[1]), "{}", bc.clause);
    }

    #[test]
    fn armg_keeps_clause_already_covering() {
        let db = fixtures::uwcse_fragment().db;
        let c = advisor_clause();
        assert_eq!(armg(&c, &tup("john", "mary"), &db).unwrap().unwrap(), c);
    }

    #[test]
    fn armg_drops_the_blocking_literal() {
        let db = fixtures::uwcse_fragment().db;
        let c = Clause::parse(
            r#"advisedBy(X,Y) :- student(X), inPhase(X,U), professor(Y), hasPosition(Y,"assistant_prof"), publication(Z,X), publication(Z,Y)."#,
        )
        .unwrap();
        let g = armg(&c, &tup("john", "mary"), &db).unwrap().unwrap();
        assert_eq!(g.body.len(), 5);
        assert!(g.body.iter().all(|l| l.relation != "hasPosition"));
        assert!(clause::covers(&g, &tup("john", "mary"), &db).unwrap());
    }

    #[test]
    fn armg_rejects_unmatchable_head() {
        let db = fixtures::uwcse_fragment().db;
        let c = Clause::parse("advisedBy(X,X) :- student(X).").unwrap();
        assert!(armg(&c, &tup("alice", "bob"), &db).unwrap().is_none());
    }

    #[test]
    fn scores_on_the_fragment() {
        let f = fixtures::uwcse_fragment();
        let (p, n) = (&f.examples.positives, &f.examples.negatives);
        let co = Clause::parse("advisedBy(X,Y) :- publication(Z,X), publication(Z,Y).").unwrap();
        assert_eq!(score(&co, p, n, &f.db).unwrap(), 2);
        assert_eq!(score(&co.head_only(), p, n, &f.db).unwrap(), 0);
        let none = Clause::parse(r#"advisedBy(X,Y) :- student(Y)."#).unwrap();
        assert_eq!(score(&none, p, n, &f.db).unwrap(), 0);
    }

    #[test]
    fn learns_copublication_with_manual_bias() {
        let f = fixtures::uwcse_fragment();
        let def = learn_definition(&f.db, &f.examples, &manual(), &LearnConfig::default()).unwrap();
        let expected = Clause::parse("advisedBy(X,Y) :- publication(Z,X), publication(Z,Y).").unwrap();
        assert_eq!(def.len(), 1);
        assert!(def.clauses[0].is_variant_of(&expected), "{}", def.render());
    }

    #[test]
    fn learns_copublication_with_induced_bias() {
        let f = fixtures::uwcse_fragment();
        let induced = biasgen::induce_bias(
            &f.db,
            &f.examples.target,
            &f.examples.positives,
            0.5,
            5,
            Exec::Sequential,
        )
        .unwrap();
        let def = learn_definition(&f.db, &f.examples, &induced.bias, &LearnConfig::default()).unwrap();
        let expected = Clause::parse("advisedBy(X,Y) :- publication(Z,X), publication(Z,Y).").unwrap();
        assert!(def.clauses.iter().any(|c| c.is_variant_of(&expected)), "{}", def.render());
        for c in &def.clauses {
            assert!(clause::conforms(c, &induced.bias));
        }
    }

    #[test]
    fn empty_positives_give_empty_definition() {
        let f = fixtures::uwcse_fragment();
        let ex = ExampleSet::new(f.examples.target.clone(), vec![], f.examples.negatives.clone()).unwrap();
        assert!(learn_definition(&f.db, &ex, &manual(), &LearnConfig::default()).unwrap().is_empty());
    }

    #[test]
    fn indistinguishable_examples_terminate_empty() {
        let db = DatabaseInstance::new(Vec::new()).unwrap();
        let f = fixtures::uwcse_fragment();
        let pos = vec![tup("a", "b"), tup("c", "d")];
        let neg = vec![tup("a", "d"), tup("c", "b"), tup("a", "a"), tup("e", "f"), tup("g", "h")];
        let ex = ExampleSet::new(f.examples.target.clone(), pos, neg).unwrap();
        let trace = learn_with_trace(&db, &ex, &manual(), &LearnConfig::default()).unwrap();
        assert!(trace.definition.is_empty());
        assert_eq!(trace.rounds, 2);
        assert_eq!(trace.rejected_seeds.len(), 2);
    }

    #[test]
    fn greedy_search_terminates() {
        let f = fixtures::uwcse_fragment();
        let cfg = LearnConfig {
            beam_width: 1,
            sample_size: 1,
            ..LearnConfig::default()
        };
        learn_definition(&f.db, &f.examples, &manual(), &cfg).unwrap();
    }

    #[test]
    fn config_validation() {
        assert!(LearnConfig::default().validate().is_ok());
        for bad in [
            LearnConfig { iterations: 0, ..LearnConfig::default() },
            LearnConfig { min_precision: 0.0, ..LearnConfig::default() },
            LearnConfig { min_precision: 1.5, ..LearnConfig::default() },
            LearnConfig { beam_width: 0, ..LearnConfig::default() },
        ] {
            assert!(bad.validate().is_err());
        }
    }
}
