//! Backtracking matcher shared by coverage testing (clause against facts) and
//! θ-subsumption (clause against the frozen body of another clause).

use std::collections::HashMap;
use std::hash::Hash;

use ustr::Ustr;

use super::{Clause, HornDefinition, Literal, Term};
use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::relstore::{DatabaseInstance, Relation, Tuple};

pub(crate) trait Table {
    type Value: Copy + Eq + Hash;
    fn size(&self) -> usize;
    fn row(&self, id: u32) -> &[Self::Value];
    fn lookup(&self, position: usize, value: Self::Value) -> &[u32];
    fn excluded(&self, _id: u32) -> bool {
        false
    }
}

impl Table for Relation {
    type Value = Ustr;

    fn size(&self) -> usize {
        self.len()
    }

    fn row(&self, id: u32) -> &[Ustr] {
        self.tuple(id)
    }

    fn lookup(&self, position: usize, value: Ustr) -> &[u32] {
        Relation::lookup(self, position, value)
    }
}

/// Body literals of a clause indexed like a relation, terms taken literally.
struct TermTable {
    rows: Vec<Vec<Term>>,
    origin: Vec<usize>,
    columns: Vec<HashMap<Term, Vec<u32>>>,
    excluded: Option<usize>,
}

impl TermTable {
    fn build(body: &[Literal]) -> HashMap<Ustr, TermTable> {
        let mut tables: HashMap<Ustr, TermTable> = HashMap::new();
        for (i, lit) in body.iter().enumerate() {
            let t = tables.entry(lit.relation).or_insert_with(|| TermTable {
                rows: Vec::new(),
                origin: Vec::new(),
                columns: vec![HashMap::new(); lit.args.len()],
                excluded: None,
            });
            if t.columns.len() != lit.args.len() {
                // inconsistent arity; such rows can never match a pattern of the
                // first arity, so they are not indexed
                continue;
            }
            let id = t.rows.len() as u32;
            for (p, term) in lit.args.iter().enumerate() {
                t.columns[p].entry(*term).or_default().push(id);
            }
            t.rows.push(lit.args.clone());
            t.origin.push(i);
        }
        tables
    }
}

impl Table for TermTable {
    type Value = Term;

    fn size(&self) -> usize {
        self.rows.len()
    }

    fn row(&self, id: u32) -> &[Term] {
        &self.rows[id as usize]
    }

    fn lookup(&self, position: usize, value: Term) -> &[u32] {
        self.columns[position].get(&value).map_or(&[], Vec::as_slice)
    }

    fn excluded(&self, id: u32) -> bool {
        self.excluded == Some(self.origin[id as usize])
    }
}

#[derive(Debug, Clone, Copy)]
enum Slot<V> {
    Var(usize),
    Const(V),
}

struct Goal<'a, T: Table> {
    table: &'a T,
    slots: Vec<Slot<T::Value>>,
}

struct Search<'g, 'a, T: Table> {
    goals: &'g [Goal<'a, T>],
    bind: Vec<Option<T::Value>>,
}

impl<'g, 'a, T: Table> Search<'g, 'a, T> {
    fn value(&self, slot: Slot<T::Value>) -> Option<T::Value> {
        match slot {
            Slot::Const(c) => Some(c),
            Slot::Var(i) => self.bind[i],
        }
    }

    /// Smallest candidate list for a goal under current bindings, `None`
    /// meaning a full scan, plus the number of unbound slots.
    fn candidates(&self, g: usize) -> (Option<&'a [u32]>, usize, usize) {
        let goal = &self.goals[g];
        let mut best: Option<&'a [u32]> = None;
        let mut unbound = 0;
        for (p, slot) in goal.slots.iter().enumerate() {
            match self.value(*slot) {
                Some(v) => {
                    let ids = goal.table.lookup(p, v);
                    if best.is_none_or(|b| ids.len() < b.len()) {
                        best = Some(ids);
                    }
                }
                None => unbound += 1,
            }
        }
        let size = best.map_or(goal.table.size(), <[u32]>::len);
        (best, size, unbound)
    }

    fn bind_row(&mut self, g: usize, id: u32, trail: &mut Vec<usize>) -> bool {
        let goal = &self.goals[g];
        if goal.table.excluded(id) {
            return false;
        }
        let row = goal.table.row(id);
        if row.len() != goal.slots.len() {
            return false;
        }
        for (slot, &val) in goal.slots.iter().zip(row) {
            match *slot {
                Slot::Const(c) => {
                    if c != val {
                        return false;
                    }
                }
                Slot::Var(i) => match self.bind[i] {
                    Some(b) if b != val => return false,
                    Some(_) => {}
                    None => {
                        self.bind[i] = Some(val);
                        trail.push(i);
                    }
                },
            }
        }
        true
    }

    /// Solves `pending` one independent group at a time, so a failing group
    /// never backtracks into another.
    fn solve_all(&mut self, pending: &mut Vec<usize>) -> bool {
        if pending.len() < 2 {
            return self.solve(pending);
        }
        let mut groups = self.split(pending);
        if groups.len() == 1 {
            return self.solve(pending);
        }
        groups.sort_by_key(Vec::len);
        groups.iter_mut().all(|g| self.solve(g))
    }

    /// Groups the pending goals that share a variable still unbound.
    fn split(&self, pending: &[usize]) -> Vec<Vec<usize>> {
        let n = pending.len();
        let mut parent: Vec<usize> = (0..n).collect();
        fn find(p: &mut [usize], mut x: usize) -> usize {
            while p[x] != x {
                p[x] = p[p[x]];
                x = p[x];
            }
            x
        }
        let mut owner: Vec<usize> = vec![usize::MAX; self.bind.len()];
        for (k, &g) in pending.iter().enumerate() {
            for slot in &self.goals[g].slots {
                let Slot::Var(v) = *slot else { continue };
                if self.bind[v].is_some() {
                    continue;
                }
                if owner[v] == usize::MAX {
                    owner[v] = k;
                } else {
                    let (a, b) = (find(&mut parent, owner[v]), find(&mut parent, k));
                    parent[a.max(b)] = a.min(b);
                }
            }
        }
        let mut groups: Vec<Vec<usize>> = Vec::new();
        let mut slot_of: Vec<usize> = vec![usize::MAX; n];
        for (k, &g) in pending.iter().enumerate() {
            let r = find(&mut parent, k);
            if slot_of[r] == usize::MAX {
                slot_of[r] = groups.len();
                groups.push(Vec::new());
            }
            groups[slot_of[r]].push(g);
        }
        groups
    }

    fn solve(&mut self, pending: &mut Vec<usize>) -> bool {
        if pending.is_empty() {
            return true;
        }
        let mut pick = 0;
        let mut pick_key = (usize::MAX, usize::MAX);
        let mut pick_ids = None;
        for (k, &g) in pending.iter().enumerate() {
            let (ids, size, unbound) = self.candidates(g);
            if size == 0 {
                return false;
            }
            if (size, unbound) < pick_key {
                pick = k;
                pick_key = (size, unbound);
                pick_ids = ids;
            }
        }
        let g = pending.swap_remove(pick);
        let mut trail = Vec::new();
        let mut found = false;
        let mut attempt = |this: &mut Self, id: u32, pending: &mut Vec<usize>| -> bool {
            let ok = this.bind_row(g, id, &mut trail) && this.solve_all(pending);
            for i in trail.drain(..) {
                this.bind[i] = None;
            }
            ok
        };
        match pick_ids {
            Some(ids) => {
                for &id in ids {
                    if attempt(self, id, pending) {
                        found = true;
                        break;
                    }
                }
            }
            None => {
                for id in 0..self.goals[g].table.size() as u32 {
                    if attempt(self, id, pending) {
                        found = true;
                        break;
                    }
                }
            }
        }
        pending.push(g);
        let last = pending.len() - 1;
        pending.swap(pick, last);
        found
    }
}

/// Dense variable numbering for a clause, head variables first.
fn var_slots(clause: &Clause) -> HashMap<u32, usize> {
    let mut ids = HashMap::new();
    for v in clause.head.vars().chain(clause.body.iter().flat_map(Literal::vars)) {
        let n = ids.len();
        ids.entry(v).or_insert(n);
    }
    ids
}

/// A clause compiled against one database for repeated coverage tests.
pub struct PreparedClause<'a> {
    head_relation: Ustr,
    head: Vec<Slot<Ustr>>,
    goals: Vec<Goal<'a, Relation>>,
    vars: usize,
}

impl<'a> PreparedClause<'a> {
    pub fn new(clause: &Clause, db: &'a DatabaseInstance) -> Result<Self> {
        let ids = var_slots(clause);
        let slot = |t: &Term| match t {
            Term::Var(v) => Slot::Var(ids[v]),
            Term::Const(c) => Slot::Const(*c),
        };
        let mut goals = Vec::with_capacity(clause.body.len());
        for lit in &clause.body {
            let rel = db
                .relation(lit.relation)
                .ok_or_else(|| Error::UnknownRelation(lit.relation.to_string()))?;
            if rel.schema().arity() != lit.args.len() {
                return Err(Error::Validation(format!(
                    "literal of {} has arity {}, relation has {}",
                    lit.relation,
                    lit.args.len(),
                    rel.schema().arity()
                )));
            }
            goals.push(Goal {
                table: rel,
                slots: lit.args.iter().map(slot).collect(),
            });
        }
        Ok(PreparedClause {
            head_relation: clause.head.relation,
            head: clause.head.args.iter().map(slot).collect(),
            goals,
            vars: ids.len(),
        })
    }

    pub fn head_relation(&self) -> Ustr {
        self.head_relation
    }

    /// True iff some substitution maps the head onto `example` and every body
    /// literal onto a fact.
    pub fn covers(&self, example: &[Ustr]) -> bool {
        if example.len() != self.head.len() {
            return false;
        }
        let mut search = Search {
            goals: &self.goals,
            bind: vec![None; self.vars],
        };
        for (slot, &value) in self.head.iter().zip(example) {
            match *slot {
                Slot::Const(c) if c != value => return false,
                Slot::Const(_) => {}
                Slot::Var(i) => match search.bind[i] {
                    Some(b) if b != value => return false,
                    _ => search.bind[i] = Some(value),
                },
            }
        }
        search.solve_all(&mut (0..self.goals.len()).collect())
    }

    /// Coverage flag for each example, in input order.
    pub fn covered(&self, examples: &[Tuple], exec: Exec) -> Vec<bool> {
        exec.map(examples, |e| self.covers(e))
    }

    pub fn count(&self, examples: &[Tuple], exec: Exec) -> usize {
        self.covered(examples, exec).into_iter().filter(|c| *c).count()
    }
}

/// Whether `clause` covers `example` over `db`.
pub fn covers(clause: &Clause, example: &[Ustr], db: &DatabaseInstance) -> Result<bool> {
    Ok(PreparedClause::new(clause, db)?.covers(example))
}

/// Whether any clause of `def` covers `example`.
pub fn covers_definition(def: &HornDefinition, example: &[Ustr], db: &DatabaseInstance) -> Result<bool> {
    for c in &def.clauses {
        if covers(c, example, db)? {
            return Ok(true);
        }
    }
    Ok(false)
}

/// θ-subsumption: some θ maps `general`'s head onto `specific`'s head and each
/// body literal of `general` onto a body literal of `specific`.
pub fn subsumes(general: &Clause, specific: &Clause) -> bool {
    if general.head.relation != specific.head.relation
        || general.head.args.len() != specific.head.args.len()
    {
        return false;
    }
    let tables = TermTable::build(&specific.body);
    let ids = var_slots(general);
    let slot = |t: &Term| match t {
        Term::Var(v) => Slot::Var(ids[v]),
        Term::Const(c) => Slot::Const(Term::Const(*c)),
    };
    let mut goals = Vec::with_capacity(general.body.len());
    for lit in &general.body {
        let Some(table) = tables.get(&lit.relation) else {
            return false;
        };
        goals.push(Goal {
            table,
            slots: lit.args.iter().map(slot).collect(),
        });
    }
    let mut search = Search {
        goals: &goals,
        bind: vec![None; ids.len()],
    };
    for (t, &target) in general.head.args.iter().zip(&specific.head.args) {
        match slot(t) {
            Slot::Const(c) if c != target => return false,
            Slot::Const(_) => {}
            Slot::Var(i) => match search.bind[i] {
                Some(b) if b != target => return false,
                _ => search.bind[i] = Some(target),
            },
        }
    }
    search.solve_all(&mut (0..goals.len()).collect())
}

/// Removes body literals whose removal leaves an equivalent clause: a literal
/// goes when the literals connected to it through non-head variables map into
/// the rest of the body with head variables held fixed.
pub fn deep_reduce(clause: &Clause) -> Clause {
    let head_vars = clause.head_vars();
    let mut body = clause.minimize().body;
    loop {
        let mut changed = false;
        let mut i = body.len();
        while i > 0 {
            i -= 1;
            if removable(&body, i, &head_vars) {
                body.remove(i);
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
    Clause::new(clause.head.clone(), body)
}

fn removable(body: &[Literal], index: usize, head_vars: &std::collections::HashSet<u32>) -> bool {
    // the component of body[index] through non-head variables
    let mut in_comp = vec![false; body.len()];
    in_comp[index] = true;
    let mut frontier: Vec<u32> = body[index].vars().filter(|v| !head_vars.contains(v)).collect();
    let mut seen: std::collections::HashSet<u32> = frontier.iter().copied().collect();
    while let Some(v) = frontier.pop() {
        for (j, lit) in body.iter().enumerate() {
            if !in_comp[j] && lit.vars().any(|w| w == v) {
                in_comp[j] = true;
                for w in lit.vars() {
                    if !head_vars.contains(&w) && seen.insert(w) {
                        frontier.push(w);
                    }
                }
            }
        }
    }
    let mut tables = TermTable::build(body);
    if let Some(t) = tables.get_mut(&body[index].relation) {
        t.excluded = Some(index);
    }
    let mut ids: HashMap<u32, usize> = HashMap::new();
    let mut goals = Vec::new();
    for (j, lit) in body.iter().enumerate() {
        if !in_comp[j] {
            continue;
        }
        let Some(table) = tables.get(&lit.relation) else {
            return false;
        };
        let slots = lit
            .args
            .iter()
            .map(|t| match t {
                Term::Var(v) if !head_vars.contains(v) => {
                    let n = ids.len();
                    Slot::Var(*ids.entry(*v).or_insert(n))
                }
                other => Slot::Const(*other),
            })
            .collect();
        goals.push(Goal { table, slots });
    }
    let mut search = Search {
        goals: &goals,
        bind: vec![None; ids.len()],
    };
    let mut pending: Vec<usize> = (0..goals.len()).collect();
    search.solve(&mut pending)
}
