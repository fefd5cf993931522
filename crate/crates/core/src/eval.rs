//! Closed-world negatives, precision and recall, and stratified k-fold cross
//! validation.

use std::collections::{BTreeSet, HashSet};
use std::time::Instant;

use itertools::Itertools;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use ustr::Ustr;

use crate::bias::{BiasSpec, PredicateDecl};
use crate::biasgen;
use crate::clause::{HornDefinition, PreparedClause};
use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::learner::{self, LearnConfig};
use crate::lgg;
use crate::relstore::{AttributeRef, DatabaseInstance, ExampleSet, RelationSchema, Tuple};

/// Samples `ratio × |positives|` tuples from the product of per-position
/// domains, minus the positives. A position's domain is the set of values the
/// positives hold there, plus the target's own column when `db` has it.
pub fn generate_negatives(
    db: &DatabaseInstance,
    positives: &[Tuple],
    target: &RelationSchema,
    ratio: usize,
    seed: u64,
) -> Result<Vec<Tuple>> {
    if positives.is_empty() {
        return Err(Error::Validation("cannot generate negatives without positives".into()));
    }
    if ratio == 0 {
        return Err(Error::Config("negative ratio must be ≥ 1".into()));
    }
    let arity = target.arity();
    let domains: Vec<Vec<Ustr>> = (0..arity)
        .map(|p| {
            let mut d: BTreeSet<Ustr> = positives.iter().map(|t| t[p]).collect();
            if let Ok(col) = db.column_values(AttributeRef::new(target.name, p)) {
                d.extend(col);
            }
            d.into_iter().collect()
        })
        .collect();
    let positive_set: HashSet<&Tuple> = positives.iter().collect();
    let product = domains
        .iter()
        .try_fold(1usize, |acc, d| acc.checked_mul(d.len()))
        .unwrap_or(usize::MAX);
    let pool_size = product - positive_set.len();
    if pool_size == 0 {
        return Err(Error::Validation(
            "the positives cover every candidate tuple; supply negative examples explicitly".into(),
        ));
    }
    let want = ratio.saturating_mul(positives.len());
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out: Vec<Tuple> = if pool_size <= want.saturating_mul(4) {
        let mut pool: Vec<Tuple> = domains
            .iter()
            .map(|d| d.iter().copied())
            .multi_cartesian_product()
            .filter(|t| !positive_set.contains(t))
            .collect();
        if arity == 0 {
            pool.clear();
        }
        pool.shuffle(&mut rng);
        pool.truncate(want);
        pool
    } else {
        let mut picked: HashSet<Tuple> = HashSet::with_capacity(want);
        let mut order = Vec::with_capacity(want);
        while order.len() < want {
            let t: Tuple = domains.iter().map(|d| d[rng.random_range(0..d.len())]).collect();
            if !positive_set.contains(&t) && picked.insert(t.clone()) {
                order.push(t);
            }
        }
        order
    };
    out.sort();
    Ok(out)
}

/// Precision is 1 when nothing is covered; recall is 0 without positives.
pub fn precision_recall(
    def: &HornDefinition,
    test_pos: &[Tuple],
    test_neg: &[Tuple],
    db: &DatabaseInstance,
    exec: Exec,
) -> Result<(f64, f64)> {
    let prepared = def
        .clauses
        .iter()
        .map(|c| PreparedClause::new(c, db))
        .collect::<Result<Vec<_>>>()?;
    let covered = |examples: &[Tuple]| {
        exec.map(examples, |e| prepared.iter().any(|p| p.covers(e)))
            .into_iter()
            .filter(|c| *c)
            .count()
    };
    let tp = covered(test_pos);
    let fp = covered(test_neg);
    let precision = if tp + fp == 0 { 1.0 } else { tp as f64 / (tp + fp) as f64 };
    let recall = if test_pos.is_empty() { 0.0 } else { tp as f64 / test_pos.len() as f64 };
    Ok((precision, recall))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FoldReport {
    pub precision: f64,
    pub recall: f64,
    pub wall_ms: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub folds: usize,
    pub seed: u64,
    pub per_fold: Vec<FoldReport>,
    pub mean_precision: f64,
    pub mean_recall: f64,
    pub mean_wall_ms: f64,
}

impl EvalReport {
    fn from_folds(seed: u64, per_fold: Vec<FoldReport>) -> Self {
        let n = per_fold.len() as f64;
        let mean = |f: fn(&FoldReport) -> f64| per_fold.iter().map(f).sum::<f64>() / n;
        EvalReport {
            folds: per_fold.len(),
            seed,
            mean_precision: mean(|f| f.precision),
            mean_recall: mean(|f| f.recall),
            mean_wall_ms: mean(|f| f.wall_ms),
            per_fold,
        }
    }

    /// The same report with timings zeroed, for comparing runs.
    pub fn without_timing(&self) -> EvalReport {
        let mut r = self.clone();
        r.mean_wall_ms = 0.0;
        for f in &mut r.per_fold {
            f.wall_ms = 0.0;
        }
        r
    }
}

/// Which learner runs inside each fold.
#[derive(Debug, Clone)]
pub enum Method {
    /// Bottom clauses and armg under a fixed bias.
    Armg(BiasSpec),
    /// Bottom clauses and armg under a bias induced from each training split.
    ArmgInduced { alpha: f64, constant_threshold: usize },
    /// lgg over ground bottom clauses, typed by these declarations.
    Lgg(Vec<PredicateDecl>),
}

impl Method {
    pub fn learn(&self, db: &DatabaseInstance, train: &ExampleSet, cfg: &LearnConfig) -> Result<HornDefinition> {
        match self {
            Method::Armg(bias) => learner::learn_definition(db, train, bias, cfg),
            Method::ArmgInduced {
                alpha,
                constant_threshold,
            } => {
                let induced = biasgen::induce_bias(
                    db,
                    &train.target,
                    &train.positives,
                    *alpha,
                    *constant_threshold,
                    cfg.exec,
                )?;
                learner::learn_definition(db, train, &induced.bias, cfg)
            }
            Method::Lgg(predicates) => lgg::lgg_learn(db, train, predicates, cfg),
        }
    }
}

/// Splits `0..n` after a seeded shuffle into `k` parts whose sizes differ by
/// at most one.
pub fn fold_assignment(n: usize, k: usize, rng: &mut ChaCha8Rng) -> Vec<Vec<usize>> {
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);
    let mut parts = Vec::with_capacity(k);
    let mut start = 0;
    for i in 0..k {
        let size = n / k + usize::from(i < n % k);
        parts.push(order[start..start + size].to_vec());
        start += size;
    }
    parts
}

fn split(items: &[Tuple], parts: &[Vec<usize>], fold: usize) -> (Vec<Tuple>, Vec<Tuple>) {
    let test: HashSet<usize> = parts[fold].iter().copied().collect();
    let mut train = Vec::new();
    let mut held = Vec::new();
    for (i, t) in items.iter().enumerate() {
        if test.contains(&i) {
            held.push(t.clone());
        } else {
            train.push(t.clone());
        }
    }
    (train, held)
}

/// Stratified k-fold cross validation: positives and negatives are shuffled
/// and split separately. Fold `i` learns with seed `seed + i`.
pub fn cross_validate(
    db: &DatabaseInstance,
    examples: &ExampleSet,
    method: &Method,
    cfg: &LearnConfig,
    folds: usize,
    seed: u64,
) -> Result<EvalReport> {
    if folds < 2 {
        return Err(Error::Config("folds must be ≥ 2".into()));
    }
    if examples.positives.len() < folds {
        return Err(Error::Config(format!(
            "{} positives cannot fill {folds} folds",
            examples.positives.len()
        )));
    }
    cfg.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let pos_parts = fold_assignment(examples.positives.len(), folds, &mut rng);
    let neg_parts = fold_assignment(examples.negatives.len(), folds, &mut rng);
    let per_fold = cfg.exec.map_range(folds, |i| -> Result<FoldReport> {
        let (train_pos, test_pos) = split(&examples.positives, &pos_parts, i);
        let (train_neg, test_neg) = split(&examples.negatives, &neg_parts, i);
        let train = ExampleSet::new(examples.target.clone(), train_pos, train_neg)?;
        let fold_cfg = LearnConfig {
            rng_seed: seed.wrapping_add(i as u64),
            ..cfg.clone()
        };
        let start = Instant::now();
        let def = method.learn(db, &train, &fold_cfg)?;
        let wall_ms = start.elapsed().as_secs_f64() * 1000.0;
        let (precision, recall) = precision_recall(&def, &test_pos, &test_neg, db, cfg.exec)?;
        log::info!("fold {i}: precision={precision:.3} recall={recall:.3} clauses={}", def.len());
        Ok(FoldReport {
            precision,
            recall,
            wall_ms,
        })
    });
    let per_fold = per_fold.into_iter().collect::<Result<Vec<_>>>()?;
    Ok(EvalReport::from_folds(seed, per_fold))
}
