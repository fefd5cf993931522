//! Language bias: predicate (type) declarations and mode declarations, plus
//! the `bias.txt` exchange format.

use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::path::Path;

use ustr::Ustr;

use crate::error::{Error, Result};
use crate::syntax;

pub const DEFAULT_CONSTANT_THRESHOLD: usize = 5;

/// An attribute type such as `T1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TypeToken(pub Ustr);

impl TypeToken {
    pub fn numbered(n: usize) -> Self {
        TypeToken(Ustr::from(&format!("T{n}")))
    }
}

impl fmt::Display for TypeToken {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PredicateDecl {
    pub relation: Ustr,
    pub types: Vec<TypeToken>,
}

impl fmt::Display for PredicateDecl {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let types: Vec<String> = self.types.iter().map(ToString::to_string).collect();
        write!(f, "{}({})", self.relation, types.join(","))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ModeSymbol {
    /// `+`: an existing variable.
    Input,
    /// `-`: an existing or a new variable.
    Output,
    /// `#`: a constant.
    Constant,
}

impl ModeSymbol {
    fn as_char(self) -> char {
        match self {
            ModeSymbol::Input => '+',
            ModeSymbol::Output => '-',
            ModeSymbol::Constant => '#',
        }
    }

    fn parse(s: &str) -> Option<Self> {
        match s {
            "+" => Some(ModeSymbol::Input),
            "-" | "−" => Some(ModeSymbol::Output),
            "#" => Some(ModeSymbol::Constant),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ModeDecl {
    pub relation: Ustr,
    pub symbols: Vec<ModeSymbol>,
}

impl ModeDecl {
    pub fn new(relation: impl Into<Ustr>, symbols: Vec<ModeSymbol>) -> Self {
        ModeDecl {
            relation: relation.into(),
            symbols,
        }
    }

    /// All-`+` mode, used for the head.
    pub fn head(relation: impl Into<Ustr>, arity: usize) -> Self {
        ModeDecl::new(relation, vec![ModeSymbol::Input; arity])
    }

    pub fn has_input(&self) -> bool {
        self.symbols.contains(&ModeSymbol::Input)
    }
}

impl fmt::Display for ModeDecl {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s: Vec<String> = self.symbols.iter().map(|m| m.as_char().to_string()).collect();
        write!(f, "{}({})", self.relation, s.join(","))
    }
}

/// Type domain of one attribute position: `None` means unconstrained (the
/// relation has no predicate declarations).
pub type TypeSet = Option<BTreeSet<TypeToken>>;

/// A complete bias: predicate declarations, body modes and the head mode.
#[derive(Debug, Clone)]
pub struct BiasSpec {
    predicates: Vec<PredicateDecl>,
    modes: Vec<ModeDecl>,
    head_mode: ModeDecl,
    pub constant_threshold: usize,
    predicate_index: HashMap<Ustr, Vec<usize>>,
    mode_index: HashMap<Ustr, Vec<usize>>,
}

impl PartialEq for BiasSpec {
    fn eq(&self, other: &Self) -> bool {
        self.predicates == other.predicates
            && self.modes == other.modes
            && self.head_mode == other.head_mode
    }
}

impl BiasSpec {
    /// Validates and indexes a bias. `modes` are body modes; they must not
    /// mention the head relation.
    pub fn new(
        predicates: Vec<PredicateDecl>,
        head_mode: ModeDecl,
        modes: Vec<ModeDecl>,
        constant_threshold: usize,
    ) -> Result<Self> {
        if constant_threshold < 1 {
            return Err(Error::Config("threshold must be ≥ 1".into()));
        }
        if head_mode.symbols.iter().any(|s| *s != ModeSymbol::Input) {
            return Err(Error::Validation(format!(
                "head mode {head_mode} must use `+` at every position"
            )));
        }
        let mut predicate_index: HashMap<Ustr, Vec<usize>> = HashMap::new();
        let mut seen = BTreeSet::new();
        for (i, p) in predicates.iter().enumerate() {
            if !seen.insert(p) {
                return Err(Error::Validation(format!("duplicate predicate declaration {p}")));
            }
            predicate_index.entry(p.relation).or_default().push(i);
        }
        let arity_of = |rel: Ustr| predicate_index.get(&rel).map(|ix| predicates[ix[0]].types.len());
        for p in &predicates {
            if arity_of(p.relation) != Some(p.types.len()) {
                return Err(Error::Validation(format!(
                    "predicate declarations for `{}` disagree on arity",
                    p.relation
                )));
            }
        }
        if let Some(a) = arity_of(head_mode.relation) {
            if a != head_mode.symbols.len() {
                return Err(Error::Validation(format!(
                    "head mode {head_mode} does not match its predicate arity {a}"
                )));
            }
        }

        let mut mode_index: HashMap<Ustr, Vec<usize>> = HashMap::new();
        let mut seen = BTreeSet::new();
        for (i, m) in modes.iter().enumerate() {
            if !seen.insert(m) {
                return Err(Error::Validation(format!("duplicate mode declaration {m}")));
            }
            if m.relation == head_mode.relation {
                return Err(Error::Validation(format!(
                    "body mode {m} refers to the target relation; definitions are non-recursive"
                )));
            }
            if !m.has_input() {
                return Err(Error::Validation(format!(
                    "body mode {m} needs at least one `+`"
                )));
            }
            match arity_of(m.relation) {
                None => {
                    return Err(Error::Validation(format!(
                        "mode {m} has no predicate declaration"
                    )))
                }
                Some(a) if a != m.symbols.len() => {
                    return Err(Error::Validation(format!(
                        "mode {m} does not match predicate arity {a}"
                    )))
                }
                _ => {}
            }
            mode_index.entry(m.relation).or_default().push(i);
        }
        Ok(BiasSpec {
            predicates,
            modes,
            head_mode,
            constant_threshold,
            predicate_index,
            mode_index,
        })
    }

    pub fn target(&self) -> Ustr {
        self.head_mode.relation
    }

    pub fn head_mode(&self) -> &ModeDecl {
        &self.head_mode
    }

    pub fn predicates(&self) -> &[PredicateDecl] {
        &self.predicates
    }

    pub fn modes(&self) -> &[ModeDecl] {
        &self.modes
    }

    pub fn predicates_for(&self, relation: Ustr) -> impl Iterator<Item = &PredicateDecl> {
        self.predicate_index
            .get(&relation)
            .into_iter()
            .flatten()
            .map(move |&i| &self.predicates[i])
    }

    pub fn modes_for(&self, relation: Ustr) -> impl Iterator<Item = &ModeDecl> {
        self.mode_index
            .get(&relation)
            .into_iter()
            .flatten()
            .map(move |&i| &self.modes[i])
    }

    pub fn has_predicates(&self, relation: Ustr) -> bool {
        self.predicate_index.contains_key(&relation)
    }

    /// Union of the declared types at one position.
    pub fn position_types(&self, relation: Ustr, position: usize) -> TypeSet {
        let decls = self.predicate_index.get(&relation)?;
        Some(
            decls
                .iter()
                .filter_map(|&i| self.predicates[i].types.get(position).copied())
                .collect(),
        )
    }

    /// True when the declarations of `relation` are exactly the Cartesian
    /// product of their per-position type sets.
    pub fn is_product(&self, relation: Ustr) -> bool {
        let Some(decls) = self.predicate_index.get(&relation) else {
            return true;
        };
        let arity = self.predicates[decls[0]].types.len();
        let product: usize = (0..arity)
            .map(|p| self.position_types(relation, p).map_or(1, |s| s.len()))
            .product();
        product == decls.len()
    }

    /// A bias with the same predicates, the same head, and no body modes.
    pub fn predicates_only(&self) -> BiasSpec {
        BiasSpec::new(
            self.predicates.clone(),
            self.head_mode.clone(),
            Vec::new(),
            self.constant_threshold,
        )
        .expect("subset of a valid bias")
    }

    /// The `bias.txt` text: predicates, then modes with the head mode first.
    pub fn render(&self) -> String {
        let mut out = String::from("PREDICATES:\n");
        for p in &self.predicates {
            out.push_str(&format!("{p}\n"));
        }
        out.push_str("MODES:\n");
        out.push_str(&format!("{}\n", self.head_mode));
        for m in &self.modes {
            out.push_str(&format!("{m}\n"));
        }
        out
    }

    /// Parses `bias.txt`. Lines starting with `#` (outside a declaration) and
    /// blank lines are ignored. The first entry under `MODES:` is the head mode.
    pub fn parse(text: &str, path: &Path) -> Result<BiasSpec> {
        #[derive(PartialEq)]
        enum Section {
            None,
            Predicates,
            Modes,
        }
        let mut section = Section::None;
        let mut predicates = Vec::new();
        let mut modes: Vec<ModeDecl> = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            match line {
                "PREDICATES:" => {
                    section = Section::Predicates;
                    continue;
                }
                "MODES:" => {
                    section = Section::Modes;
                    continue;
                }
                _ => {}
            }
            let (name, args) = syntax::parse_atom(line).map_err(|m| Error::parse(path, i + 1, m))?;
            let relation = Ustr::from(&name);
            match section {
                Section::None => {
                    return Err(Error::parse(
                        path,
                        i + 1,
                        "declaration outside a PREDICATES:/MODES: section",
                    ))
                }
                Section::Predicates => {
                    if args.iter().any(|a| a.quoted || !syntax::is_identifier(&a.text)) {
                        return Err(Error::parse(path, i + 1, "type names must be identifiers"));
                    }
                    predicates.push(PredicateDecl {
                        relation,
                        types: args.iter().map(|a| TypeToken(Ustr::from(&a.text))).collect(),
                    });
                }
                Section::Modes => {
                    let symbols = args
                        .iter()
                        .map(|a| {
                            ModeSymbol::parse(&a.text).ok_or_else(|| {
                                Error::parse(path, i + 1, format!("unknown mode symbol `{}`", a.text))
                            })
                        })
                        .collect::<Result<Vec<_>>>()?;
                    modes.push(ModeDecl { relation, symbols });
                }
            }
        }
        if modes.is_empty() {
            return Err(Error::parse(path, 0, "MODES: section needs at least the head mode"));
        }
        let head_mode = modes.remove(0);
        BiasSpec::new(predicates, head_mode, modes, DEFAULT_CONSTANT_THRESHOLD)
            .map_err(|e| Error::parse(path, 0, e.to_string()))
    }

    pub fn read(path: &Path) -> Result<BiasSpec> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text, path)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    fn manual_bias() -> BiasSpec {
        BiasSpec::parse(fixtures::UWCSE_FRAGMENT.manual_bias().unwrap(), Path::new("bias.txt")).unwrap()
    }

    #[test]
    fn parses_manual_bias() {
        let bias = manual_bias();
        assert_eq!(bias.target(), "advisedBy");
        assert_eq!(bias.modes_for("inPhase".into()).count(), 2);
        assert_eq!(bias.predicates_for("publication".into()).count(), 2);
        let author = bias.position_types("publication".into(), 1).unwrap();
        assert_eq!(author.len(), 2);
        assert!(bias.position_types("ghost".into(), 0).is_none());
        assert!(bias.is_product("publication".into()));
    }

    #[test]
    fn render_parse_is_stable() {
        let bias = manual_bias();
        let text = bias.render();
        let again = BiasSpec::parse(&text, Path::new("x")).unwrap();
        assert_eq!(again, bias);
        assert_eq!(again.render(), text);
        assert!(text.starts_with("PREDICATES:\nadvisedBy(T1,T3)\n"));
        assert!(text.contains("MODES:\nadvisedBy(+,+)\n"));
    }

    #[test]
    fn rejects_bad_bias() {
        let p = Path::new("x");
        // mode without predicate
        assert!(BiasSpec::parse("PREDICATES:\nMODES:\nt(+)\nr(+)\n", p).is_err());
        // body mode without '+'
        assert!(BiasSpec::parse("PREDICATES:\nr(T1)\nMODES:\nt(+)\nr(-)\n", p).is_err());
        // duplicate
        assert!(BiasSpec::parse("PREDICATES:\nr(T1)\nr(T1)\nMODES:\nt(+)\n", p).is_err());
        // head must be all '+'
        assert!(BiasSpec::parse("PREDICATES:\nMODES:\nt(-)\n", p).is_err());
        // unknown symbol
        assert!(BiasSpec::parse("PREDICATES:\nr(T1)\nMODES:\nt(+)\nr(*)\n", p).is_err());
        assert!(BiasSpec::new(vec![], ModeDecl::head("t", 1), vec![], 0).is_err());
    }
}
