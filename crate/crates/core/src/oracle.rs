//! Brute-force deciders used to cross-check the decision procedures.

use thiserror::Error;

use crate::abstract_lattice::GeneratorSet;
use crate::cnf::Cnf;
use crate::decision::{ClassicalFd, Problem};
use crate::realities::{
    check_fd_under_reality, count_realities, count_strong_realities, enumerate_realities,
    enumerate_strong_realities, Reality,
};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum OracleError {
    #[error("enumeration of {size} realities exceeds the cap of {cap}")]
    EnumerationCapExceeded { cap: u128, size: u128 },
    #[error("{0} variables is too many for exhaustive search (at most {MAX_SAT_VARS})")]
    TooManyVariables(usize),
}

pub const DEFAULT_ORACLE_CAP: u128 = 1 << 20;
pub const MAX_SAT_VARS: usize = 20;

/// Quantifies `check_fd_under_reality` over every reality (or every strong
/// reality). An empty strong enumeration makes the universal problem true and
/// the existential one false.
pub fn brute_decide(
    kind: Problem,
    gens: &GeneratorSet,
    fd: &ClassicalFd,
    cap: u128,
) -> Result<bool, OracleError> {
    let schema = gens.schema();
    let size = if kind.is_strong() {
        count_strong_realities(schema)
    } else {
        count_realities(schema)
    };
    if size > cap {
        return Err(OracleError::EnumerationCapExceeded { cap, size });
    }
    let holds = |g: &Reality| check_fd_under_reality(gens, g, fd.lhs, fd.rhs);
    Ok(match kind {
        Problem::Certain => enumerate_realities(schema).all(|g| holds(&g)),
        Problem::Possible => enumerate_realities(schema).any(|g| holds(&g)),
        Problem::StronglyCertain => {
            enumerate_strong_realities(schema).all(|g| holds(&g.to_reality()))
        }
        Problem::StronglyPossible => {
            enumerate_strong_realities(schema).any(|g| holds(&g.to_reality()))
        }
    })
}

/// Exhaustive satisfiability check.
pub fn brute_sat(cnf: &Cnf) -> Result<bool, OracleError> {
    Ok(brute_sat_model(cnf)?.is_some())
}

/// A satisfying assignment, if any, found by counting through all of them.
pub fn brute_sat_model(cnf: &Cnf) -> Result<Option<Vec<bool>>, OracleError> {
    let n = cnf.num_vars;
    if n > MAX_SAT_VARS {
        return Err(OracleError::TooManyVariables(n));
    }
    Ok((0u32..1 << n)
        .map(|bits| (0..n).map(|i| bits >> i & 1 == 1).collect::<Vec<bool>>())
        .find(|a| cnf.is_satisfied_by(a)))
}

/// Every satisfying assignment.
pub fn all_models(cnf: &Cnf) -> Result<Vec<Vec<bool>>, OracleError> {
    let n = cnf.num_vars;
    if n > MAX_SAT_VARS {
        return Err(OracleError::TooManyVariables(n));
    }
    Ok((0u32..1 << n)
        .map(|bits| (0..n).map(|i| bits >> i & 1 == 1).collect::<Vec<bool>>())
        .filter(|a| cnf.is_satisfied_by(a))
        .collect())
}
