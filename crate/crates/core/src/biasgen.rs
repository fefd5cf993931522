//! Bias induction: the type graph over attributes, predicate declarations from
//! the propagated types, and mode declarations from column statistics.

use std::collections::{BTreeMap, BTreeSet};

use itertools::Itertools;
use petgraph::algo::tarjan_scc;
use petgraph::graph::{DiGraph, NodeIndex};

use crate::bias::{BiasSpec, ModeDecl, ModeSymbol, PredicateDecl, TypeToken};
use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::profiler::{self, IndSet};
use crate::relstore::{attribute_stats, AttributeRef, DatabaseInstance, RelationSchema, Tuple};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EdgeKind {
    Exact,
    Approximate,
}

/// `from → to` for the dependency `from ⊆ to`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TypeEdge {
    pub from: AttributeRef,
    pub to: AttributeRef,
    pub kind: EdgeKind,
    pub error: f64,
}

/// Attribute graph with the types assigned to every node. Each token carries
/// whether it has crossed an approximate edge on its way to the node.
#[derive(Debug, Clone)]
pub struct TypeGraph {
    nodes: Vec<AttributeRef>,
    edges: Vec<TypeEdge>,
    types: BTreeMap<AttributeRef, BTreeMap<TypeToken, bool>>,
    /// Node set that originally received each token.
    origins: BTreeMap<TypeToken, Vec<AttributeRef>>,
}

impl TypeGraph {
    pub fn nodes(&self) -> &[AttributeRef] {
        &self.nodes
    }

    pub fn edges(&self) -> &[TypeEdge] {
        &self.edges
    }

    pub fn types_of(&self, attr: AttributeRef) -> BTreeSet<TypeToken> {
        self.types
            .get(&attr)
            .map(|m| m.keys().copied().collect())
            .unwrap_or_default()
    }

    /// Tokens with their approximate-crossing flag.
    pub fn tokens_of(&self, attr: AttributeRef) -> impl Iterator<Item = (TypeToken, bool)> + '_ {
        self.types.get(&attr).into_iter().flatten().map(|(t, f)| (*t, *f))
    }

    /// The nodes a token was first assigned to.
    pub fn origin(&self, token: TypeToken) -> &[AttributeRef] {
        self.origins.get(&token).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn tokens(&self) -> impl Iterator<Item = TypeToken> + '_ {
        self.origins.keys().copied()
    }
}

/// Builds the type graph from the schema and bidirectionally-deduped INDs.
///
/// Sink components of the condensation and every other non-trivial strongly
/// connected component get one fresh type each. Types then flow against edge
/// direction to a fixpoint; exact edges pass tokens unchanged, approximate
/// edges pass only tokens that have not crossed one yet. Nodes that end up
/// with no type get a fresh one.
pub fn build_type_graph(schemas: &[RelationSchema], inds: &IndSet) -> TypeGraph {
    let nodes: Vec<AttributeRef> = schemas
        .iter()
        .flat_map(|s| (0..s.arity()).map(move |p| AttributeRef::new(s.name, p)))
        .sorted()
        .collect();
    let mut graph: DiGraph<AttributeRef, ()> = DiGraph::new();
    let index: BTreeMap<AttributeRef, NodeIndex> =
        nodes.iter().map(|a| (*a, graph.add_node(*a))).collect();

    let mut edges = Vec::new();
    for ind in &inds.inds {
        let (Some(&from), Some(&to)) = (index.get(&ind.lhs), index.get(&ind.rhs)) else {
            continue;
        };
        graph.add_edge(from, to, ());
        edges.push(TypeEdge {
            from: ind.lhs,
            to: ind.rhs,
            kind: if ind.is_exact() {
                EdgeKind::Exact
            } else {
                EdgeKind::Approximate
            },
            error: ind.error(),
        });
    }

    let mut typed: Vec<Vec<AttributeRef>> = Vec::new();
    for scc in tarjan_scc(&graph) {
        let members: BTreeSet<NodeIndex> = scc.iter().copied().collect();
        let is_sink = scc
            .iter()
            .all(|&n| graph.neighbors(n).all(|m| members.contains(&m)));
        if is_sink || scc.len() > 1 {
            let mut attrs: Vec<AttributeRef> = scc.iter().map(|&n| graph[n]).collect();
            attrs.sort();
            typed.push(attrs);
        }
    }
    typed.sort();

    let mut types: BTreeMap<AttributeRef, BTreeMap<TypeToken, bool>> =
        nodes.iter().map(|a| (*a, BTreeMap::new())).collect();
    let mut origins = BTreeMap::new();
    let mut next = 1;
    for group in typed {
        let token = TypeToken::numbered(next);
        next += 1;
        for a in &group {
            types.get_mut(a).expect("node").insert(token, false);
        }
        origins.insert(token, group);
    }

    loop {
        let mut changed = false;
        for e in &edges {
            let offered: Vec<(TypeToken, bool)> = types[&e.to]
                .iter()
                .filter_map(|(&t, &crossed)| match (e.kind, crossed) {
                    (EdgeKind::Exact, c) => Some((t, c)),
                    (EdgeKind::Approximate, false) => Some((t, true)),
                    (EdgeKind::Approximate, true) => None,
                })
                .collect();
            let target = types.get_mut(&e.from).expect("node");
            for (t, crossed) in offered {
                match target.get_mut(&t) {
                    None => {
                        target.insert(t, crossed);
                        changed = true;
                    }
                    // an uncrossed path dominates a crossed one
                    Some(flag) if *flag && !crossed => {
                        *flag = false;
                        changed = true;
                    }
                    Some(_) => {}
                }
            }
        }
        if !changed {
            break;
        }
    }

    for a in &nodes {
        let set = types.get_mut(a).expect("node");
        if set.is_empty() {
            let token = TypeToken::numbered(next);
            next += 1;
            set.insert(token, false);
            origins.insert(token, vec![*a]);
        }
    }

    TypeGraph {
        nodes,
        edges,
        types,
        origins,
    }
}

/// One declaration per element of the Cartesian product of each relation's
/// attribute type sets. Relations in name order, products in type order.
pub fn generate_predicates(graph: &TypeGraph) -> Vec<PredicateDecl> {
    let mut by_relation: BTreeMap<ustr::Ustr, Vec<AttributeRef>> = BTreeMap::new();
    for a in &graph.nodes {
        by_relation.entry(a.relation).or_default().push(*a);
    }
    let mut out = Vec::new();
    for (relation, mut attrs) in by_relation {
        attrs.sort_by_key(|a| a.position);
        let per_position: Vec<Vec<TypeToken>> = attrs
            .iter()
            .map(|a| graph.types_of(*a).into_iter().collect())
            .collect();
        for types in per_position.into_iter().multi_cartesian_product() {
            out.push(PredicateDecl { relation, types });
        }
    }
    out
}

/// Head and body modes produced from column statistics.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GeneratedModes {
    pub head: ModeDecl,
    pub body: Vec<ModeDecl>,
}

/// Modes for every non-target relation: one `+`/`-` mode per position, and for
/// each non-empty subset of constant-eligible attributes the same modes with
/// `#` on the subset (skipping those that would lose their `+`). An attribute
/// is constant-eligible when it has between 1 and `threshold - 1` distinct values.
pub fn generate_modes(
    db: &DatabaseInstance,
    schemas: &[RelationSchema],
    threshold: usize,
    target: &RelationSchema,
) -> Result<GeneratedModes> {
    if threshold < 1 {
        return Err(Error::Config("threshold must be ≥ 1".into()));
    }
    let mut body = Vec::new();
    for schema in schemas.iter().sorted_by_key(|s| s.name) {
        if schema.name == target.name {
            continue;
        }
        let n = schema.arity();
        let mut eligible = Vec::new();
        for p in 0..n {
            let stats = attribute_stats(db, AttributeRef::new(schema.name, p))?;
            if stats.distinct_count > 0 && stats.distinct_count < threshold {
                eligible.push(p);
            }
        }
        if eligible.len() > 16 {
            return Err(Error::Config(format!(
                "relation `{}` has {} constant-eligible attributes; lower the constant threshold",
                schema.name,
                eligible.len()
            )));
        }
        let mut modes: Vec<ModeDecl> = Vec::new();
        let mut push = |m: ModeDecl| {
            if !modes.contains(&m) {
                modes.push(m);
            }
        };
        for i in 0..n {
            let mut symbols = vec![ModeSymbol::Output; n];
            symbols[i] = ModeSymbol::Input;
            push(ModeDecl::new(schema.name, symbols));
        }
        for mask in 1u32..(1u32 << eligible.len()) {
            let subset: Vec<usize> = eligible
                .iter()
                .enumerate()
                .filter(|(bit, _)| mask & (1 << bit) != 0)
                .map(|(_, &p)| p)
                .collect();
            for i in (0..n).filter(|i| !subset.contains(i)) {
                let mut symbols = vec![ModeSymbol::Output; n];
                for &p in &subset {
                    symbols[p] = ModeSymbol::Constant;
                }
                symbols[i] = ModeSymbol::Input;
                push(ModeDecl::new(schema.name, symbols));
            }
        }
        body.extend(modes);
    }
    Ok(GeneratedModes {
        head: ModeDecl::head(target.name, target.arity()),
        body,
    })
}

/// Everything produced while inducing a bias.
#[derive(Debug, Clone)]
pub struct InducedBias {
    pub bias: BiasSpec,
    pub inds: IndSet,
    pub graph: TypeGraph,
}

/// Profiles `db` (plus the target relation populated by `positives`, unless
/// `db` already holds it) and derives predicate and mode declarations.
pub fn induce_bias(
    db: &DatabaseInstance,
    target: &RelationSchema,
    positives: &[Tuple],
    alpha: f64,
    threshold: usize,
    exec: Exec,
) -> Result<InducedBias> {
    if threshold < 1 {
        return Err(Error::Config("threshold must be ≥ 1".into()));
    }
    let owned;
    let profiled = if db.contains_relation(target.name) {
        db
    } else {
        owned = db.with_relation(target.clone(), positives)?;
        &owned
    };
    let schemas: Vec<RelationSchema> = profiled.schemas().cloned().collect();
    let raw = profiler::discover_inds(profiled, alpha, exec)?;
    let inds = profiler::dedupe_bidirectional(&raw);
    let graph = build_type_graph(&schemas, &inds);
    let predicates = generate_predicates(&graph);
    let modes = generate_modes(profiled, &schemas, threshold, target)?;
    let bias = BiasSpec::new(predicates, modes.head, modes.body, threshold)?;
    Ok(InducedBias { bias, inds, graph })
}
