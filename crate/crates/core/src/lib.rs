//! Finite permutation groups, their actions, relational structures and
//! minor conditions, with exhaustive checkers for polymorphisms and
//! explicit operation constructions.

pub mod action;
pub mod biaction;
pub mod budget;
pub mod catalog;
pub mod condition;
pub mod criterion;
mod csp;
pub mod error;
pub mod forge;
pub mod group;
pub mod hom;
pub mod perm;
pub mod polymorphism;
pub mod pp;
pub mod reduce;
pub mod structure;
pub mod subgroups;
pub mod term;

pub use budget::Budget;
pub use error::{Error, Result};
