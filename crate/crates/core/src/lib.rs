//! Grammatical evolution with distance-based test-case selection.

pub mod clustering;
pub mod datasets;
pub mod dbs;
pub mod experiment;
pub mod fitness;
pub mod ge;
pub mod grammar;
pub mod grammars;
