//! Relational storage: schemas, fact tables, the constant → occurrence index,
//! and the training examples of the target relation.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};
use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};

use ustr::Ustr;

use crate::error::{Error, Result};
use crate::syntax;

/// A ground tuple of constants.
pub type Tuple = Vec<Ustr>;

/// `R[A]`: one attribute of one relation, addressed by position.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct AttributeRef {
    pub relation: Ustr,
    pub position: usize,
}

impl AttributeRef {
    pub fn new(relation: impl Into<Ustr>, position: usize) -> Self {
        AttributeRef {
            relation: relation.into(),
            position,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RelationSchema {
    pub name: Ustr,
    pub attributes: Vec<String>,
}

impl RelationSchema {
    pub fn new(name: &str, attributes: &[&str]) -> Result<Self> {
        Self::from_parts(
            name.to_string(),
            attributes.iter().map(|a| a.to_string()).collect(),
        )
    }

    fn from_parts(name: String, attributes: Vec<String>) -> Result<Self> {
        if !syntax::is_identifier(&name) {
            return Err(Error::Validation(format!("invalid relation name `{name}`")));
        }
        if attributes.is_empty() {
            return Err(Error::Validation(format!(
                "relation `{name}` must have at least one attribute"
            )));
        }
        let mut seen = HashSet::new();
        for a in &attributes {
            if !seen.insert(a.as_str()) {
                return Err(Error::Validation(format!(
                    "duplicate attribute `{a}` in relation `{name}`"
                )));
            }
        }
        Ok(RelationSchema {
            name: Ustr::from(&name),
            attributes,
        })
    }

    pub fn arity(&self) -> usize {
        self.attributes.len()
    }

    /// Schema for a relation known only by name and arity.
    pub fn anonymous(name: &str, arity: usize) -> Result<Self> {
        Self::from_parts(
            name.to_string(),
            (0..arity).map(|i| format!("arg{i}")).collect(),
        )
    }
}

impl fmt::Display for RelationSchema {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}({})", self.name, self.attributes.join(","))
    }
}

/// One place a constant occurs: tuple `tuple` of `attribute.relation`, at
/// `attribute.position`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Occurrence {
    pub attribute: AttributeRef,
    pub tuple: u32,
}

/// Tuples of one relation with a per-column hash index.
#[derive(Debug, Clone)]
pub struct Relation {
    schema: RelationSchema,
    tuples: Vec<Tuple>,
    ids: HashMap<Tuple, u32>,
    columns: Vec<HashMap<Ustr, Vec<u32>>>,
}

impl Relation {
    fn new(schema: RelationSchema) -> Self {
        let columns = vec![HashMap::new(); schema.arity()];
        Relation {
            schema,
            tuples: Vec::new(),
            ids: HashMap::new(),
            columns,
        }
    }

    pub fn schema(&self) -> &RelationSchema {
        &self.schema
    }

    pub fn len(&self) -> usize {
        self.tuples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tuples.is_empty()
    }

    pub fn tuples(&self) -> &[Tuple] {
        &self.tuples
    }

    pub fn tuple(&self, id: u32) -> &[Ustr] {
        &self.tuples[id as usize]
    }

    pub fn contains(&self, tuple: &[Ustr]) -> bool {
        self.ids.contains_key(tuple)
    }

    /// Ids of tuples holding `value` at `position`, in insertion order.
    pub fn lookup(&self, position: usize, value: Ustr) -> &[u32] {
        self.columns[position]
            .get(&value)
            .map(Vec::as_slice)
            .unwrap_or(&[])
    }

    /// Returns the new tuple id, or `None` for a duplicate.
    fn insert(&mut self, tuple: Tuple) -> Option<u32> {
        if self.ids.contains_key(&tuple) {
            return None;
        }
        let id = self.tuples.len() as u32;
        for (pos, v) in tuple.iter().enumerate() {
            self.columns[pos].entry(*v).or_default().push(id);
        }
        self.ids.insert(tuple.clone(), id);
        self.tuples.push(tuple);
        Some(id)
    }
}

/// The background database: schemas, duplicate-free tuple sets and the value
/// index used by bottom-clause construction. Immutable once built.
#[derive(Debug, Clone, Default)]
pub struct DatabaseInstance {
    relations: BTreeMap<Ustr, Relation>,
    value_index: HashMap<Ustr, Vec<Occurrence>>,
}

impl DatabaseInstance {
    pub fn new(schemas: impl IntoIterator<Item = RelationSchema>) -> Result<Self> {
        let mut db = DatabaseInstance::default();
        for schema in schemas {
            db.add_schema(schema)?;
        }
        Ok(db)
    }

    pub fn add_schema(&mut self, schema: RelationSchema) -> Result<()> {
        if self.relations.contains_key(&schema.name) {
            return Err(Error::Validation(format!(
                "relation `{}` declared twice",
                schema.name
            )));
        }
        self.relations.insert(schema.name, Relation::new(schema));
        Ok(())
    }

    /// Adds a tuple; returns `false` when it was already present.
    pub fn insert(&mut self, relation: &str, tuple: Tuple) -> Result<bool> {
        let name = Ustr::from(relation);
        let rel = self
            .relations
            .get_mut(&name)
            .ok_or_else(|| Error::UnknownRelation(relation.to_string()))?;
        if tuple.len() != rel.schema.arity() {
            return Err(Error::Arity {
                relation: relation.to_string(),
                line: 0,
                expected: rel.schema.arity(),
                found: tuple.len(),
            });
        }
        if let Some(v) = tuple.iter().find(|v| v.is_empty()) {
            return Err(Error::Validation(format!(
                "empty value `{v}` in relation `{relation}`"
            )));
        }
        match rel.insert(tuple) {
            Some(id) => {
                for (position, v) in rel.tuples[id as usize].iter().enumerate() {
                    self.value_index.entry(*v).or_default().push(Occurrence {
                        attribute: AttributeRef::new(name, position),
                        tuple: id,
                    });
                }
                Ok(true)
            }
            None => Ok(false),
        }
    }

    /// Builds an instance from literal string rows; convenient for fixtures and tests.
    pub fn from_rows<'a>(
        schemas: &[RelationSchema],
        rows: impl IntoIterator<Item = (&'a str, Vec<&'a str>)>,
    ) -> Result<Self> {
        let mut db = DatabaseInstance::new(schemas.iter().cloned())?;
        for (rel, values) in rows {
            db.insert(rel, values.into_iter().map(Ustr::from).collect())?;
        }
        Ok(db)
    }

    /// A copy of this instance with one more relation. Used to let the profiler
    /// type the target relation from its positive examples.
    pub fn with_relation(&self, schema: RelationSchema, tuples: &[Tuple]) -> Result<Self> {
        let mut db = self.clone();
        let name = schema.name;
        db.add_schema(schema)?;
        for t in tuples {
            db.insert(&name, t.clone())?;
        }
        Ok(db)
    }

    pub fn relation(&self, name: Ustr) -> Option<&Relation> {
        self.relations.get(&name)
    }

    pub fn contains_relation(&self, name: Ustr) -> bool {
        self.relations.contains_key(&name)
    }

    /// Relations in name order.
    pub fn relations(&self) -> impl Iterator<Item = &Relation> {
        self.relations.values()
    }

    pub fn schemas(&self) -> impl Iterator<Item = &RelationSchema> {
        self.relations.values().map(|r| &r.schema)
    }

    pub fn tuple_count(&self) -> usize {
        self.relations.values().map(Relation::len).sum()
    }

    /// Every attribute of every relation, sorted by (relation, position).
    pub fn attributes(&self) -> Vec<AttributeRef> {
        self.relations
            .values()
            .flat_map(|r| (0..r.schema.arity()).map(move |p| AttributeRef::new(r.schema.name, p)))
            .collect()
    }

    pub fn attribute_name(&self, attr: AttributeRef) -> Result<&str> {
        let rel = self.checked_relation(attr)?;
        Ok(&rel.schema.attributes[attr.position])
    }

    /// Renders `R[A]` with the attribute's declared name.
    pub fn display_attribute(&self, attr: AttributeRef) -> String {
        match self.attribute_name(attr) {
            Ok(name) => format!("{}[{}]", attr.relation, name),
            Err(_) => format!("{}[{}]", attr.relation, attr.position),
        }
    }

    fn checked_relation(&self, attr: AttributeRef) -> Result<&Relation> {
        self.relations
            .get(&attr.relation)
            .filter(|r| attr.position < r.schema.arity())
            .ok_or_else(|| Error::UnknownAttribute {
                relation: attr.relation.to_string(),
                position: attr.position,
            })
    }

    /// Distinct values of one column.
    pub fn column_values(&self, attr: AttributeRef) -> Result<BTreeSet<Ustr>> {
        let rel = self.checked_relation(attr)?;
        Ok(rel.columns[attr.position].keys().copied().collect())
    }

    /// Occurrences of `value` anywhere in the database.
    pub fn occurrences(&self, value: Ustr) -> &[Occurrence] {
        self.value_index
            .get(&value)
            .map(Vec::as_slice)
            .unwrap_or(&[])
    }

    /// Recomputes the value index from the tuple sets.
    pub fn rebuild_value_index(&self) -> HashMap<Ustr, Vec<Occurrence>> {
        let mut index: HashMap<Ustr, Vec<Occurrence>> = HashMap::new();
        for rel in self.relations.values() {
            for (id, t) in rel.tuples.iter().enumerate() {
                for (position, v) in t.iter().enumerate() {
                    index.entry(*v).or_default().push(Occurrence {
                        attribute: AttributeRef::new(rel.schema.name, position),
                        tuple: id as u32,
                    });
                }
            }
        }
        index
    }

    /// True when the stored index equals a fresh rebuild (as occurrence sets).
    pub fn value_index_consistent(&self) -> bool {
        let normalize = |m: &HashMap<Ustr, Vec<Occurrence>>| -> BTreeMap<Ustr, BTreeSet<Occurrence>> {
            m.iter()
                .map(|(k, v)| (*k, v.iter().copied().collect()))
                .collect()
        };
        normalize(&self.value_index) == normalize(&self.rebuild_value_index())
    }

    /// Writes `schema.txt` and `facts/<rel>.csv` under `dir`.
    pub fn dump(&self, dir: &Path) -> Result<()> {
        let facts = dir.join("facts");
        fs::create_dir_all(&facts).map_err(|e| Error::io(&facts, e))?;
        let schema_path = dir.join("schema.txt");
        let schema: String = self.schemas().map(|s| format!("{s}\n")).collect();
        fs::write(&schema_path, schema).map_err(|e| Error::io(&schema_path, e))?;
        for rel in self.relations.values() {
            let path = facts.join(format!("{}.csv", rel.schema.name));
            let mut out = rel.schema.attributes.join(",");
            out.push('\n');
            for t in &rel.tuples {
                out.push_str(&t.iter().map(Ustr::as_str).collect::<Vec<_>>().join(","));
                out.push('\n');
            }
            fs::write(&path, out).map_err(|e| Error::io(&path, e))?;
        }
        Ok(())
    }
}

/// Exact distinct-value summary of one attribute.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AttributeStats {
    pub attribute: AttributeRef,
    pub distinct_count: usize,
    pub distinct_values: BTreeSet<Ustr>,
}

pub fn attribute_stats(db: &DatabaseInstance, attr: AttributeRef) -> Result<AttributeStats> {
    let distinct_values = db.column_values(attr)?;
    Ok(AttributeStats {
        attribute: attr,
        distinct_count: distinct_values.len(),
        distinct_values,
    })
}

/// Parses schema text: one `name(attr,...)` per line, `#` comments.
pub fn parse_schema(text: &str, path: &Path) -> Result<Vec<RelationSchema>> {
    let mut out: Vec<RelationSchema> = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (name, args) = syntax::parse_atom(line).map_err(|m| Error::parse(path, i + 1, m))?;
        if args.iter().any(|a| a.quoted || !syntax::is_identifier(&a.text)) {
            return Err(Error::parse(path, i + 1, "attribute names must be identifiers"));
        }
        let schema = RelationSchema::from_parts(name, args.into_iter().map(|a| a.text).collect())
            .map_err(|e| Error::parse(path, i + 1, e.to_string()))?;
        if out.iter().any(|s| s.name == schema.name) {
            return Err(Error::parse(
                path,
                i + 1,
                format!("relation `{}` declared twice", schema.name),
            ));
        }
        out.push(schema);
    }
    Ok(out)
}

pub fn read_schema_file(path: &Path) -> Result<Vec<RelationSchema>> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_schema(&text, path)
}

/// Loads a database: every relation declared in `schema_file` must have a
/// `<relation>.csv` in `facts_dir`, and every CSV there must be declared.
pub fn load_database(schema_file: &Path, facts_dir: &Path) -> Result<DatabaseInstance> {
    load_database_for_target(schema_file, facts_dir, None).map(|(db, _)| db)
}

/// Like [`load_database`], but a relation named `target` is set aside: its
/// schema is returned separately and it needs no facts file. The target's
/// extension comes from the example file instead.
pub fn load_database_for_target(
    schema_file: &Path,
    facts_dir: &Path,
    target: Option<&str>,
) -> Result<(DatabaseInstance, Option<RelationSchema>)> {
    let mut schemas = read_schema_file(schema_file)?;
    let target_schema = target.and_then(|t| {
        schemas
            .iter()
            .position(|s| s.name == t)
            .map(|i| schemas.remove(i))
    });

    let entries = fs::read_dir(facts_dir).map_err(|e| Error::io(facts_dir, e))?;
    let mut files = BTreeMap::new();
    for entry in entries {
        let entry = entry.map_err(|e| Error::io(facts_dir, e))?;
        let path = entry.path();
        if path.extension().and_then(|e| e.to_str()) != Some("csv") {
            continue;
        }
        let stem = path
            .file_stem()
            .and_then(|s| s.to_str())
            .unwrap_or_default()
            .to_string();
        files.insert(stem, path);
    }
    for stem in files.keys() {
        let declared = schemas.iter().any(|s| s.name == stem.as_str());
        let is_target = target_schema.as_ref().is_some_and(|t| t.name == stem.as_str());
        if !declared && !is_target {
            return Err(Error::UnknownRelation(format!(
                "{stem} (facts file {} has no schema declaration)",
                files[stem].display()
            )));
        }
    }

    let mut db = DatabaseInstance::new(schemas.iter().cloned())?;
    for schema in &schemas {
        let path = files.get(schema.name.as_str()).ok_or_else(|| {
            Error::Validation(format!(
                "no facts file for relation `{}` in {}",
                schema.name,
                facts_dir.display()
            ))
        })?;
        let file = fs::File::open(path).map_err(|e| Error::io(path, e))?;
        load_facts(&mut db, schema, file, path)?;
    }
    Ok((db, target_schema))
}

/// Builds an instance from in-memory schema text and `(relation, csv text)` pairs.
pub fn database_from_texts(schema: &str, facts: &[(&str, &str)]) -> Result<DatabaseInstance> {
    let schemas = parse_schema(schema, Path::new("schema.txt"))?;
    let mut db = DatabaseInstance::new(schemas.iter().cloned())?;
    for schema in &schemas {
        let (_, text) = facts
            .iter()
            .find(|(name, _)| *name == schema.name.as_str())
            .ok_or_else(|| Error::Validation(format!("no facts for relation `{}`", schema.name)))?;
        let path = PathBuf::from(format!("facts/{}.csv", schema.name));
        load_facts(&mut db, schema, text.as_bytes(), &path)?;
    }
    Ok(db)
}

fn load_facts(
    db: &mut DatabaseInstance,
    schema: &RelationSchema,
    input: impl std::io::Read,
    path: &Path,
) -> Result<()> {
    let csv_err = |source| Error::Csv {
        path: path.to_path_buf(),
        source,
    };
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .quoting(false)
        .trim(csv::Trim::All)
        .from_reader(input);
    let header = reader.headers().map_err(csv_err)?.clone();
    let header: Vec<&str> = header.iter().collect();
    if header != schema.attributes.iter().map(String::as_str).collect::<Vec<_>>() {
        return Err(Error::parse(
            path,
            1,
            format!(
                "header `{}` does not match schema {}",
                header.join(","),
                schema
            ),
        ));
    }
    for record in reader.records() {
        let record = record.map_err(csv_err)?;
        let line = record.position().map(|p| p.line() as usize).unwrap_or(0);
        if record.len() == 1 && record.get(0) == Some("") {
            continue;
        }
        if record.len() != schema.arity() {
            return Err(Error::Arity {
                relation: schema.name.to_string(),
                line,
                expected: schema.arity(),
                found: record.len(),
            });
        }
        if record.iter().any(str::is_empty) {
            return Err(Error::parse(
                path,
                line,
                format!("missing value in relation `{}`", schema.name),
            ));
        }
        db.insert(&schema.name, record.iter().map(Ustr::from).collect())?;
    }
    Ok(())
}

/// Positive and negative examples of the target relation, in file order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExampleSet {
    pub target: RelationSchema,
    pub positives: Vec<Tuple>,
    pub negatives: Vec<Tuple>,
}

impl ExampleSet {
    pub fn new(target: RelationSchema, positives: Vec<Tuple>, negatives: Vec<Tuple>) -> Result<Self> {
        let mut set = ExampleSet {
            target,
            positives: Vec::new(),
            negatives: Vec::new(),
        };
        for t in positives {
            set.push(t, true)?;
        }
        for t in negatives {
            set.push(t, false)?;
        }
        Ok(set)
    }

    fn push(&mut self, t: Tuple, positive: bool) -> Result<()> {
        if t.len() != self.target.arity() {
            return Err(Error::Validation(format!(
                "example {}({}) has arity {}, target {} expects {}",
                self.target.name,
                join(&t),
                t.len(),
                self.target,
                self.target.arity()
            )));
        }
        let (mine, other) = if positive {
            (&mut self.positives, &self.negatives)
        } else {
            (&mut self.negatives, &self.positives)
        };
        if other.contains(&t) {
            return Err(Error::Validation(format!(
                "{}({}) is labeled both positive and negative",
                self.target.name,
                join(&t)
            )));
        }
        if !mine.contains(&t) {
            mine.push(t);
        }
        Ok(())
    }
}

fn join(t: &[Ustr]) -> String {
    t.iter().map(Ustr::as_str).collect::<Vec<_>>().join(",")
}

fn parse_example_line(line: &str) -> Option<(bool, &str)> {
    if let Some(rest) = line.strip_prefix('+') {
        Some((true, rest))
    } else if let Some(rest) = line.strip_prefix('-') {
        Some((false, rest))
    } else {
        line.strip_prefix('−').map(|rest| (false, rest))
    }
}

/// Parses example text: `+ rel(a,b)` / `- rel(a,b)` lines, `#` comments.
pub fn parse_examples(text: &str, path: &Path, target: &RelationSchema) -> Result<ExampleSet> {
    let mut set = ExampleSet {
        target: target.clone(),
        positives: Vec::new(),
        negatives: Vec::new(),
    };
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (positive, atom) = parse_example_line(line)
            .ok_or_else(|| Error::parse(path, i + 1, "expected `+` or `-` label"))?;
        let (name, args) = syntax::parse_atom(atom).map_err(|m| Error::parse(path, i + 1, m))?;
        if name != target.name.as_str() {
            return Err(Error::parse(
                path,
                i + 1,
                format!("example relation `{name}` is not the target `{}`", target.name),
            ));
        }
        let tuple: Tuple = args.iter().map(|a| Ustr::from(&a.text)).collect();
        set.push(tuple, positive)
            .map_err(|e| Error::parse(path, i + 1, e.to_string()))?;
    }
    Ok(set)
}

pub fn load_examples(path: &Path, target: &RelationSchema) -> Result<ExampleSet> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_examples(&text, path, target)
}

/// Derives a target schema from the first example naming `target`.
pub fn infer_target_schema(path: &Path, target: &str) -> Result<RelationSchema> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        let Some((_, atom)) = parse_example_line(line) else {
            continue;
        };
        let (name, args) = syntax::parse_atom(atom).map_err(|m| Error::parse(path, i + 1, m))?;
        if name == target {
            return RelationSchema::anonymous(target, args.len());
        }
    }
    Err(Error::Validation(format!(
        "cannot determine the arity of target `{target}`: no examples in {}",
        path.display()
    )))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    fn tmp_layout(schema: &str, files: &[(&str, &str)]) -> tempfile::TempDir {
        let dir = tempfile::tempdir().unwrap();
        fs::write(dir.path().join("schema.txt"), schema).unwrap();
        fs::create_dir(dir.path().join("facts")).unwrap();
        for (name, body) in files {
            fs::write(dir.path().join("facts").join(name), body).unwrap();
        }
        dir
    }

    #[test]
    fn loads_student_facts() {
        let dir = tmp_layout("student(stud)\n", &[("student.csv", "stud\nalice\njohn\n")]);
        let db = load_database(&dir.path().join("schema.txt"), &dir.path().join("facts")).unwrap();
        assert_eq!(db.relation("student".into()).unwrap().len(), 2);
    }

    #[test]
    fn empty_relation_is_fine() {
        let dir = tmp_layout("student(stud)\n", &[("student.csv", "stud\n")]);
        let db = load_database(&dir.path().join("schema.txt"), &dir.path().join("facts")).unwrap();
        assert_eq!(db.relation("student".into()).unwrap().len(), 0);
        let stats = attribute_stats(&db, AttributeRef::new("student", 0)).unwrap();
        assert_eq!(stats.distinct_count, 0);
    }

    #[test]
    fn duplicate_rows_collapse() {
        let dir = tmp_layout("student(stud)\n", &[("student.csv", "stud\nalice\nalice\n")]);
        let db = load_database(&dir.path().join("schema.txt"), &dir.path().join("facts")).unwrap();
        assert_eq!(db.relation("student".into()).unwrap().len(), 1);
        let stats = attribute_stats(&db, AttributeRef::new("student", 0)).unwrap();
        assert_eq!(stats.distinct_count, 1);
        assert_eq!(db.occurrences("alice".into()).len(), 1);
    }

    #[test]
    fn arity_mismatch_names_relation_and_line() {
        let dir = tmp_layout(
            "inPhase(stud,phase)\n",
            &[("inPhase.csv", "stud,phase\nalice,post_quals\njohn\n")],
        );
        let err = load_database(&dir.path().join("schema.txt"), &dir.path().join("facts")).unwrap_err();
        match err {
            Error::Arity { relation, line, .. } => {
                assert_eq!(relation, "inPhase");
                assert_eq!(line, 3);
            }
            other => panic!("unexpected {other}"),
        }
    }

    #[test]
    fn unknown_facts_file_is_rejected() {
        let dir = tmp_layout(
            "student(stud)\n",
            &[("student.csv", "stud\nalice\n"), ("ghost.csv", "x\n1\n")],
        );
        let err = load_database(&dir.path().join("schema.txt"), &dir.path().join("facts")).unwrap_err();
        assert!(matches!(err, Error::UnknownRelation(_)), "{err}");
    }

    #[test]
    fn missing_facts_file_is_rejected() {
        let dir = tmp_layout("student(stud)\nprofessor(prof)\n", &[("student.csv", "stud\n")]);
        assert!(load_database(&dir.path().join("schema.txt"), &dir.path().join("facts")).is_err());
    }

    #[test]
    fn target_needs_no_facts_file() {
        let dir = tmp_layout(
            "student(stud)\nadvisedBy(stud,prof)\n",
            &[("student.csv", "stud\nalice\n")],
        );
        let (db, target) = load_database_for_target(
            &dir.path().join("schema.txt"),
            &dir.path().join("facts"),
            Some("advisedBy"),
        )
        .unwrap();
        assert_eq!(target.unwrap().attributes, vec!["stud", "prof"]);
        assert!(!db.contains_relation("advisedBy".into()));
    }

    #[test]
    fn empty_values_are_rejected() {
        let dir = tmp_layout("inPhase(stud,phase)\n", &[("inPhase.csv", "stud,phase\nalice,\n")]);
        assert!(load_database(&dir.path().join("schema.txt"), &dir.path().join("facts")).is_err());
    }

    #[test]
    fn examples_parse_and_validate() {
        let target = RelationSchema::new("advisedBy", &["stud", "prof"]).unwrap();
        let p = Path::new("examples.txt");
        let set = parse_examples("+ advisedBy(alice,bob)\n+ advisedBy(john,mary)\n", p, &target).unwrap();
        assert_eq!(set.positives.len(), 2);
        assert!(set.negatives.is_empty());

        let empty = parse_examples("", p, &target).unwrap();
        assert!(empty.positives.is_empty() && empty.negatives.is_empty());

        let err = parse_examples("+ advisedBy(a,b)\n- advisedBy(a,b)\n", p, &target).unwrap_err();
        assert!(err.to_string().contains("both positive and negative"), "{err}");

        assert!(parse_examples("+ advisedBy(a)\n", p, &target).is_err());
        assert!(parse_examples("+ student(a,b)\n", p, &target).is_err());
    }

    #[test]
    fn stats_over_fragment() {
        let db = fixtures::uwcse_fragment().db;
        let phase = attribute_stats(&db, AttributeRef::new("inPhase", 1)).unwrap();
        assert_eq!(phase.distinct_count, 1);
        assert!(phase.distinct_values.contains(&Ustr::from("post_quals")));
        let author = attribute_stats(&db, AttributeRef::new("publication", 1)).unwrap();
        assert_eq!(author.distinct_count, 4);
        assert!(attribute_stats(&db, AttributeRef::new("publication", 2)).is_err());
        assert!(attribute_stats(&db, AttributeRef::new("nope", 0)).is_err());
    }

    #[test]
    fn dump_reload_roundtrip() {
        let db = fixtures::uwcse_fragment().db;
        let dir = tempfile::tempdir().unwrap();
        db.dump(dir.path()).unwrap();
        let again = load_database(&dir.path().join("schema.txt"), &dir.path().join("facts")).unwrap();
        for rel in db.relations() {
            let other = again.relation(rel.schema().name).unwrap();
            assert_eq!(rel.tuples(), other.tuples());
            assert_eq!(rel.schema(), other.schema());
        }
        assert!(again.value_index_consistent());
    }
}
