//! Unary inclusion-dependency discovery over database content.
//!
//! For every ordered pair of distinct attributes `R[A]`, `S[B]` the error of
//! `R[A] ⊆ S[B]` is the fraction of distinct values of `R[A]` missing from
//! `S[B]`. Exact dependencies have error 0; approximate ones are kept while the
//! error stays within the threshold.

use std::collections::{BTreeMap, HashSet};
use std::fmt::Write as _;

use ustr::Ustr;

use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::relstore::{AttributeRef, DatabaseInstance};

/// Default approximate-IND acceptance threshold.
pub const DEFAULT_ALPHA: f64 = 0.5;

/// `lhs ⊆ rhs` with `violations` of `lhs_distinct` values missing from `rhs`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct UnaryInd {
    pub lhs: AttributeRef,
    pub rhs: AttributeRef,
    pub violations: usize,
    pub lhs_distinct: usize,
}

impl UnaryInd {
    pub fn error(&self) -> f64 {
        if self.lhs_distinct == 0 {
            0.0
        } else {
            self.violations as f64 / self.lhs_distinct as f64
        }
    }

    pub fn is_exact(&self) -> bool {
        self.violations == 0
    }

    fn key(&self) -> (AttributeRef, AttributeRef) {
        (self.lhs, self.rhs)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct IndSet {
    /// Sorted by `(lhs, rhs)`, no duplicate pairs.
    pub inds: Vec<UnaryInd>,
    pub alpha: f64,
}

impl IndSet {
    pub fn get(&self, lhs: AttributeRef, rhs: AttributeRef) -> Option<&UnaryInd> {
        self.inds
            .binary_search_by(|i| i.key().cmp(&(lhs, rhs)))
            .ok()
            .map(|i| &self.inds[i])
    }

    pub fn contains(&self, lhs: AttributeRef, rhs: AttributeRef) -> bool {
        self.get(lhs, rhs).is_some()
    }

    pub fn len(&self) -> usize {
        self.inds.len()
    }

    pub fn is_empty(&self) -> bool {
        self.inds.is_empty()
    }

    /// One line per IND, `R[A] <= S[B] err=0.500000`, sorted as text.
    pub fn render(&self, db: &DatabaseInstance) -> String {
        let mut lines: Vec<String> = self
            .inds
            .iter()
            .map(|ind| {
                format!(
                    "{} <= {} err={:.6}",
                    db.display_attribute(ind.lhs),
                    db.display_attribute(ind.rhs),
                    ind.error()
                )
            })
            .collect();
        lines.sort();
        let mut out = String::new();
        for l in lines {
            let _ = writeln!(out, "{l}");
        }
        out
    }
}

/// Distinct-value sets for every attribute, keyed in attribute order.
fn column_sets(db: &DatabaseInstance) -> BTreeMap<AttributeRef, HashSet<Ustr>> {
    db.attributes()
        .into_iter()
        .map(|a| {
            let values = db
                .column_values(a)
                .expect("attribute listed by the database")
                .into_iter()
                .collect();
            (a, values)
        })
        .collect()
}

/// Finds every unary IND with error ≤ `alpha`. Attribute pairs are evaluated
/// with `exec`; the result is sorted, so it does not depend on scheduling.
pub fn discover_inds(db: &DatabaseInstance, alpha: f64, exec: Exec) -> Result<IndSet> {
    if !(0.0..=1.0).contains(&alpha) || alpha.is_nan() {
        return Err(Error::Config(format!("alpha must be in [0, 1], got {alpha}")));
    }
    let columns: Vec<(AttributeRef, HashSet<Ustr>)> = column_sets(db).into_iter().collect();
    let n = columns.len();
    let found = exec.map_range(n, |i| {
        let (lhs, lhs_values) = &columns[i];
        let mut out = Vec::new();
        if lhs_values.is_empty() {
            return out;
        }
        for (j, (rhs, rhs_values)) in columns.iter().enumerate() {
            if i == j {
                continue;
            }
            let violations = lhs_values.iter().filter(|v| !rhs_values.contains(v)).count();
            let ind = UnaryInd {
                lhs: *lhs,
                rhs: *rhs,
                violations,
                lhs_distinct: lhs_values.len(),
            };
            if ind.error() <= alpha {
                out.push(ind);
            }
        }
        out
    });
    let mut inds: Vec<UnaryInd> = found.into_iter().flatten().collect();
    inds.sort_by_key(UnaryInd::key);
    Ok(IndSet { inds, alpha })
}

/// Where both `A ⊆ B` and `B ⊆ A` hold, keeps only the lower-error direction,
/// except that mutual exact INDs are both kept. Equal errors keep the one whose
/// lhs sorts first.
pub fn dedupe_bidirectional(inds: &IndSet) -> IndSet {
    let kept = inds
        .inds
        .iter()
        .filter(|ind| {
            let Some(rev) = inds.get(ind.rhs, ind.lhs) else {
                return true;
            };
            if ind.is_exact() && rev.is_exact() {
                return true;
            }
            // compare violations/distinct exactly by cross-multiplication
            let mine = ind.violations * rev.lhs_distinct;
            let theirs = rev.violations * ind.lhs_distinct;
            mine < theirs || (mine == theirs && ind.lhs < rev.lhs)
        })
        .copied()
        .collect();
    IndSet {
        inds: kept,
        alpha: inds.alpha,
    }
}
