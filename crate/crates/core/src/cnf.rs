//! CNF formulas and a DIMACS reader.

use std::fmt;

use thiserror::Error;

/// A literal in DIMACS convention: `v` or `-v` for variable `v ≥ 1`.
pub type Literal = i32;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Cnf {
    pub num_vars: usize,
    pub clauses: Vec<Vec<Literal>>,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CnfError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("literal {literal} is outside variables 1..={num_vars}")]
    VariableOutOfRange { literal: Literal, num_vars: usize },
}

impl Cnf {
    pub fn new(num_vars: usize, clauses: Vec<Vec<Literal>>) -> Result<Self, CnfError> {
        for &l in clauses.iter().flatten() {
            if l == 0 || l.unsigned_abs() as usize > num_vars {
                return Err(CnfError::VariableOutOfRange { literal: l, num_vars });
            }
        }
        Ok(Cnf { num_vars, clauses })
    }

    /// Reads DIMACS text. The `p cnf` header is optional; without it the
    /// variable count is the largest variable mentioned. Clauses may span
    /// lines and end at `0`.
    pub fn parse_dimacs(text: &str) -> Result<Self, CnfError> {
        let mut declared = None;
        let mut clauses = Vec::new();
        let mut current = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.trim();
            let err = |message: String| CnfError::Parse { line: idx + 1, message };
            if line.is_empty() || line.starts_with('c') || line.starts_with('%') {
                continue;
            }
            if let Some(rest) = line.strip_prefix('p') {
                let fields: Vec<&str> = rest.split_whitespace().collect();
                match fields.as_slice() {
                    ["cnf", vars, _clauses] => {
                        let n = vars
                            .parse::<usize>()
                            .map_err(|_| err(format!("bad variable count `{vars}`")))?;
                        declared = Some(n);
                    }
                    _ => return Err(err("expected `p cnf <vars> <clauses>`".into())),
                }
                continue;
            }
            for tok in line.split_whitespace() {
                let l: Literal = tok
                    .parse()
                    .map_err(|_| err(format!("bad literal `{tok}`")))?;
                if l == 0 {
                    clauses.push(std::mem::take(&mut current));
                } else {
                    current.push(l);
                }
            }
        }
        if !current.is_empty() {
            clauses.push(current);
        }
        let used = clauses
            .iter()
            .flatten()
            .map(|l: &Literal| l.unsigned_abs() as usize)
            .max()
            .unwrap_or(0);
        Cnf::new(declared.unwrap_or(used), clauses)
    }

    /// Whether `assignment[v - 1]` satisfies every clause.
    pub fn is_satisfied_by(&self, assignment: &[bool]) -> bool {
        self.clauses.iter().all(|c| {
            c.iter()
                .any(|&l| assignment[l.unsigned_abs() as usize - 1] == (l > 0))
        })
    }
}

impl fmt::Display for Cnf {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "p cnf {} {}", self.num_vars, self.clauses.len())?;
        for c in &self.clauses {
            for l in c {
                write!(f, "{l} ")?;
            }
            writeln!(f, "0")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_fixtures() {
        let sat = Cnf::parse_dimacs(include_str!("../fixtures/reduction/sat.cnf")).unwrap();
        assert_eq!(sat.num_vars, 3);
        assert_eq!(sat.clauses, vec![vec![1, 2, 3], vec![-1, -2, 3]]);
        let unsat = Cnf::parse_dimacs(include_str!("../fixtures/reduction/unsat.cnf")).unwrap();
        assert_eq!(unsat.clauses.len(), 8);
    }

    #[test]
    fn headerless_and_multiline() {
        let f = Cnf::parse_dimacs("c comment\n1 -2\n 3 0 -1 0\n").unwrap();
        assert_eq!(f.num_vars, 3);
        assert_eq!(f.clauses, vec![vec![1, -2, 3], vec![-1]]);
    }

    #[test]
    fn errors() {
        assert!(matches!(
            Cnf::parse_dimacs("p cnf 2 1\n1 x 0\n"),
            Err(CnfError::Parse { line: 2, .. })
        ));
        assert_eq!(
            Cnf::parse_dimacs("p cnf 2 1\n1 3 0\n"),
            Err(CnfError::VariableOutOfRange { literal: 3, num_vars: 2 })
        );
    }

    #[test]
    fn display_round_trip() {
        let f = Cnf::new(4, vec![vec![1, -4, 2], vec![-3, 3, 1]]).unwrap();
        assert_eq!(Cnf::parse_dimacs(&f.to_string()).unwrap(), f);
    }
}
