//! Relational rule learning with automatically induced language bias.
//!
//! ```
//! use automode::{biasgen, fixtures, learner::{self, LearnConfig}, Exec};
//!
//! let f = fixtures::uwcse_fragment();
//! let induced = biasgen::induce_bias(&f.db, &f.target, &f.examples.positives, 0.5, 5, Exec::Parallel)?;
//! let def = learner::learn_definition(&f.db, &f.examples, &induced.bias, &LearnConfig::default())?;
//! assert_eq!(def.render().trim(), "advisedBy(X0,X1) :- publication(Z0,X0), publication(Z0,X1).");
//! # Ok::<(), automode::Error>(())
//! ```

pub mod bias;
pub mod biasgen;
pub mod clause;
pub mod cli;
pub mod error;
pub mod eval;
pub mod exec;
pub mod fixtures;
pub mod learner;
pub mod lgg;
pub mod profiler;
pub mod relstore;
mod syntax;

pub use error::{Error, Result};
pub use exec::Exec;
