//! Packaged example databases.
//!
//! `uwcse_fragment` is the twelve-fact department fragment with two advisor
//! pairs and their two crossed pairs as negatives. `department` is a larger
//! variant whose columns produce mixed student/professor authorship.

use std::fs;
use std::path::Path;

use crate::error::{Error, Result};
use crate::relstore::{self, DatabaseInstance, ExampleSet, RelationSchema};

pub struct Fixture {
    pub name: &'static str,
    pub target: &'static str,
    schema: &'static str,
    facts: &'static [(&'static str, &'static str)],
    examples: &'static str,
    bias: Option<&'static str>,
}

/// A fixture parsed into memory.
#[derive(Debug, Clone)]
pub struct LoadedFixture {
    /// Background relations only; the target relation is not included.
    pub db: DatabaseInstance,
    pub target: RelationSchema,
    pub examples: ExampleSet,
}

macro_rules! fact {
    ($dir:literal, $rel:literal) => {
        ($rel, include_str!(concat!("../fixtures/", $dir, "/facts/", $rel, ".csv")))
    };
}

pub const UWCSE_FRAGMENT: Fixture = Fixture {
    name: "uwcse_fragment",
    target: "advisedBy",
    schema: include_str!("../fixtures/uwcse_fragment/schema.txt"),
    facts: &[
        fact!("uwcse_fragment", "student"),
        fact!("uwcse_fragment", "professor"),
        fact!("uwcse_fragment", "inPhase"),
        fact!("uwcse_fragment", "hasPosition"),
        fact!("uwcse_fragment", "publication"),
    ],
    examples: include_str!("../fixtures/uwcse_fragment/examples.txt"),
    bias: Some(include_str!("../fixtures/uwcse_fragment/manual_bias.txt")),
};

pub const DEPARTMENT: Fixture = Fixture {
    name: "department",
    target: "advisedBy",
    schema: include_str!("../fixtures/department/schema.txt"),
    facts: &[
        fact!("department", "student"),
        fact!("department", "professor"),
        fact!("department", "inPhase"),
        fact!("department", "hasPosition"),
        fact!("department", "courseLevel"),
        fact!("department", "taughtBy"),
        fact!("department", "ta"),
        fact!("department", "publication"),
    ],
    examples: include_str!("../fixtures/department/examples.txt"),
    bias: None,
};

impl Fixture {
    pub fn load(&self) -> Result<LoadedFixture> {
        let schemas = relstore::parse_schema(self.schema, Path::new("schema.txt"))?;
        let target = schemas
            .iter()
            .find(|s| s.name == self.target)
            .cloned()
            .ok_or_else(|| Error::UnknownRelation(self.target.to_string()))?;
        let background: String = self
            .schema
            .lines()
            .filter(|l| !l.trim_start().starts_with(self.target))
            .map(|l| format!("{l}\n"))
            .collect();
        let db = relstore::database_from_texts(&background, self.facts)?;
        let examples = relstore::parse_examples(self.examples, Path::new("examples.txt"), &target)?;
        Ok(LoadedFixture {
            db,
            target,
            examples,
        })
    }

    /// The hand-written bias shipped with the fixture, if any.
    pub fn manual_bias(&self) -> Option<&'static str> {
        self.bias
    }

    /// Writes `schema.txt`, `facts/`, `examples.txt` (and `manual_bias.txt`) under `dir`.
    pub fn materialize(&self, dir: &Path) -> Result<()> {
        let facts = dir.join("facts");
        fs::create_dir_all(&facts).map_err(|e| Error::io(&facts, e))?;
        let mut files = vec![
            (dir.join("schema.txt"), self.schema),
            (dir.join("examples.txt"), self.examples),
        ];
        if let Some(bias) = self.bias {
            files.push((dir.join("manual_bias.txt"), bias));
        }
        for (rel, text) in self.facts {
            files.push((facts.join(format!("{rel}.csv")), text));
        }
        for (path, text) in files {
            fs::write(&path, text).map_err(|e| Error::io(&path, e))?;
        }
        Ok(())
    }
}

/// The twelve-fact fragment, loaded. Panics only if the packaged files are corrupt.
pub fn uwcse_fragment() -> LoadedFixture {
    UWCSE_FRAGMENT.load().expect("packaged fixture parses")
}

pub fn department() -> LoadedFixture {
    DEPARTMENT.load().expect("packaged fixture parses")
}
