//! Finite truth lattices, lattice-valued comparability of tuple values,
//! abstract functional dependencies, and decision procedures for classical
//! functional dependencies under all or some {0,1}-interpretations.

pub mod abstract_lattice;
pub mod attrs;
pub mod cli;
pub mod cnf;
pub mod context;
pub mod decision;
pub mod dot;
pub mod lattice;
pub mod oracle;
pub mod realities;
pub mod relation;
