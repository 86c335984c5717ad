//! Certain, strongly certain, possible and strongly possible functional
//! dependencies, plus the 3SAT instance generator for the strong-possible
//! problem.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;
use std::sync::atomic::{AtomicBool, AtomicU64, Ordering};
use std::sync::Arc;

use rayon::prelude::*;
use rust_decimal::Decimal;
use serde::{Deserialize, Serialize};
use serde_json::json;
use thiserror::Error;

use crate::abstract_lattice::{AbstractTuple, GeneratorSet};
use crate::attrs::AttrSet;
use crate::cnf::Cnf;
use crate::context::{
    AttributeSpec, ContextError, ContextSpec, LatticeSpec, Predicate, RuleSpec, SchemaContext,
    Value,
};
use crate::lattice::ElementId;
use crate::realities::{check_fd_under_reality, Reality, StrongReality};
use crate::relation::{Relation, RelationError};

/// A classical dependency `X → A`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct ClassicalFd {
    pub lhs: AttrSet,
    pub rhs: usize,
}

impl ClassicalFd {
    pub fn new(lhs: AttrSet, rhs: usize) -> Self {
        ClassicalFd { lhs, rhs }
    }

    /// Parses comma-separated attribute names, e.g. `("B,C", "A")`.
    pub fn parse(schema: &SchemaContext, lhs: &str, rhs: &str) -> Result<Self, ContextError> {
        Ok(ClassicalFd {
            lhs: schema.parse_attr_set(lhs)?,
            rhs: schema.attribute_index(rhs.trim())?,
        })
    }

    pub fn is_trivial(&self) -> bool {
        self.lhs.contains(self.rhs)
    }

    pub fn format(&self, schema: &SchemaContext) -> String {
        format!(
            "{} -> {}",
            schema.format_attr_set(self.lhs),
            schema.attribute(self.rhs).name()
        )
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Problem {
    Certain,
    StronglyCertain,
    Possible,
    StronglyPossible,
}

impl Problem {
    pub const ALL: [Problem; 4] = [
        Problem::Certain,
        Problem::StronglyCertain,
        Problem::Possible,
        Problem::StronglyPossible,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Problem::Certain => "certain",
            Problem::StronglyCertain => "strongly-certain",
            Problem::Possible => "possible",
            Problem::StronglyPossible => "strongly-possible",
        }
    }

    pub fn is_strong(self) -> bool {
        matches!(self, Problem::StronglyCertain | Problem::StronglyPossible)
    }

    pub fn is_universal(self) -> bool {
        matches!(self, Problem::Certain | Problem::StronglyCertain)
    }
}

impl fmt::Display for Problem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Problem {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        Problem::ALL
            .into_iter()
            .find(|p| p.name() == s)
            .ok_or_else(|| format!("unknown problem `{s}`"))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Witness {
    Reality(Reality),
    Strong(StrongReality),
}

impl Witness {
    pub fn reality(&self) -> Reality {
        match self {
            Witness::Reality(r) => r.clone(),
            Witness::Strong(s) => s.to_reality(),
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Stats {
    pub generators: usize,
    pub closures_computed: u64,
    pub nodes_explored: u64,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Verdict {
    pub problem: Problem,
    pub answer: bool,
    pub witness: Option<Witness>,
    /// A generator violating the universal condition.
    pub counterexample: Option<AbstractTuple>,
    pub stats: Stats,
}

impl Verdict {
    fn new(problem: Problem, answer: bool, gens: &GeneratorSet) -> Self {
        Verdict {
            problem,
            answer,
            witness: None,
            counterexample: None,
            stats: Stats {
                generators: gens.len(),
                ..Stats::default()
            },
        }
    }

    /// JSON object; a witness uses the reality-file layout so it can be fed
    /// back to `fd --reality`.
    pub fn to_json(&self, schema: &SchemaContext) -> serde_json::Value {
        let mut out = json!({
            "problem": self.problem,
            "answer": self.answer,
            "stats": self.stats,
        });
        if let Some(w) = &self.witness {
            out["witness"] = match w {
                Witness::Reality(r) => json!({ "thresholds": r.to_names(schema) }),
                Witness::Strong(s) => json!({ "coprimes": s.to_names(schema) }),
            };
        }
        if let Some(m) = &self.counterexample {
            out["counterexample"] = json!(schema.element_names(m).join(","));
        }
        out
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DecisionError {
    #[error("constructed witness does not verify; this is a bug")]
    WitnessVerificationFailed,
}

fn verify(gens: &GeneratorSet, g: &Reality, fd: &ClassicalFd) -> Result<(), DecisionError> {
    if check_fd_under_reality(gens, g, fd.lhs, fd.rhs) {
        Ok(())
    } else {
        Err(DecisionError::WitnessVerificationFailed)
    }
}

/// Whether every reality satisfies the FD. A generator breaks it exactly when
/// it is below the top on `A` while avoiding the bottom on all of `X`.
pub fn certain_fd(gens: &GeneratorSet, fd: &ClassicalFd) -> Verdict {
    let mut v = Verdict::new(Problem::Certain, true, gens);
    if fd.is_trivial() {
        return v;
    }
    let schema = gens.schema();
    let la = schema.lattice(fd.rhs);
    v.counterexample = gens
        .generators()
        .iter()
        .find(|m| {
            m.get(fd.rhs) != la.top()
                && fd
                    .lhs
                    .iter()
                    .all(|b| m.get(b) != schema.lattice(b).bottom())
        })
        .cloned();
    v.answer = v.counterexample.is_none();
    v
}

/// Whether every strong reality satisfies the FD; vacuously true when some
/// lattice has no co-prime.
pub fn strongly_certain_fd(gens: &GeneratorSet, fd: &ClassicalFd) -> Verdict {
    let mut v = Verdict::new(Problem::StronglyCertain, true, gens);
    let schema = gens.schema();
    if fd.is_trivial() || !has_strong_realities(schema) {
        return v;
    }
    let la = schema.lattice(fd.rhs);
    let top_coprime = la.join_of_coprimes().expect("coprimes exist");
    v.counterexample = gens
        .generators()
        .iter()
        .find(|m| {
            !la.leq(top_coprime, m.get(fd.rhs))
                && fd.lhs.iter().all(|b| {
                    let l = schema.lattice(b);
                    l.coprimes().any(|c| l.leq(c, m.get(b)))
                })
        })
        .cloned();
    v.answer = v.counterexample.is_none();
    v
}

/// Whether some reality satisfies the FD: the closure of the characteristic
/// vector of `X` must be above the bottom on `A`.
pub fn possible_fd(gens: &GeneratorSet, fd: &ClassicalFd) -> Result<Verdict, DecisionError> {
    let mut v = Verdict::new(Problem::Possible, true, gens);
    let schema = gens.schema();
    if fd.is_trivial() {
        let g = Reality::equality(schema);
        verify(gens, &g, fd)?;
        v.witness = Some(Witness::Reality(g));
        return Ok(v);
    }
    let psi = gens.closure(&schema.characteristic_vector(fd.lhs));
    v.stats.closures_computed = 1;
    let la = schema.lattice(fd.rhs);
    let reach = psi.get(fd.rhs);
    if reach == la.bottom() {
        v.answer = false;
        return Ok(v);
    }
    let atom = la
        .atoms()
        .into_iter()
        .find(|&a| la.leq(a, reach))
        .expect("a non-bottom element lies above an atom");
    let mut thresholds = schema.top_tuple();
    thresholds.set(fd.rhs, atom);
    let g = Reality::new(schema, thresholds).expect("atoms and tops are not bottom");
    verify(gens, &g, fd)?;
    v.witness = Some(Witness::Reality(g));
    Ok(v)
}

pub fn has_strong_realities(schema: &SchemaContext) -> bool {
    schema
        .lattices()
        .all(|l| !l.coprime_prime_pairs().is_empty())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SearchOptions {
    /// Branch only on maximal co-primes. Sound because closures are
    /// monotone; disable to search every co-prime assignment.
    pub prune_to_maximal: bool,
    /// Split the first branching level across threads.
    pub parallel: bool,
}

impl Default for SearchOptions {
    fn default() -> Self {
        SearchOptions {
            prune_to_maximal: true,
            parallel: true,
        }
    }
}

impl SearchOptions {
    pub fn deterministic() -> Self {
        SearchOptions {
            parallel: false,
            ..SearchOptions::default()
        }
    }
}

struct Search<'a> {
    gens: &'a GeneratorSet,
    rhs: usize,
    lhs: Vec<usize>,
    choices: Vec<Vec<ElementId>>,
    rhs_coprimes: Vec<ElementId>,
    found: AtomicBool,
    closures: AtomicU64,
    nodes: AtomicU64,
}

impl Search<'_> {
    /// Depth-first search over co-prime choices for `lhs[depth..]`, given the
    /// generators already above the choices made so far. Returns the choices
    /// and a co-prime of `A` below the closure.
    fn dfs(
        &self,
        depth: usize,
        above: &[&AbstractTuple],
        chosen: &mut Vec<ElementId>,
    ) -> Option<(Vec<ElementId>, ElementId)> {
        if self.found.load(Ordering::Relaxed) {
            return None;
        }
        self.nodes.fetch_add(1, Ordering::Relaxed);
        self.closures.fetch_add(1, Ordering::Relaxed);
        let la = self.gens.schema().lattice(self.rhs);
        let reach = la.meet_all(above.iter().map(|m| m.get(self.rhs)));
        // further choices only shrink `above`, so success here is final
        if let Some(&c) = self.rhs_coprimes.iter().find(|&&c| la.leq(c, reach)) {
            self.found.store(true, Ordering::Relaxed);
            return Some((chosen.clone(), c));
        }
        if depth == self.lhs.len() {
            return None;
        }
        let b = self.lhs[depth];
        let lb = self.gens.schema().lattice(b);
        for &c in &self.choices[depth] {
            let next: Vec<&AbstractTuple> =
                above.iter().copied().filter(|m| lb.leq(c, m.get(b))).collect();
            chosen.push(c);
            let hit = self.dfs(depth + 1, &next, chosen);
            chosen.pop();
            if hit.is_some() {
                return hit;
            }
        }
        None
    }

    fn run(&self, parallel: bool) -> Option<(Vec<ElementId>, ElementId)> {
        let all: Vec<&AbstractTuple> = self.gens.generators().iter().collect();
        if !parallel || self.lhs.is_empty() {
            return self.dfs(0, &all, &mut Vec::new());
        }
        // root visited once, then its children in parallel
        self.nodes.fetch_add(1, Ordering::Relaxed);
        self.closures.fetch_add(1, Ordering::Relaxed);
        let la = self.gens.schema().lattice(self.rhs);
        let reach = la.meet_all(all.iter().map(|m| m.get(self.rhs)));
        if let Some(&c) = self.rhs_coprimes.iter().find(|&&c| la.leq(c, reach)) {
            return Some((Vec::new(), c));
        }
        let b = self.lhs[0];
        let lb = self.gens.schema().lattice(b);
        self.choices[0].par_iter().find_map_any(|&c| {
            let next: Vec<&AbstractTuple> =
                all.iter().copied().filter(|m| lb.leq(c, m.get(b))).collect();
            self.dfs(1, &next, &mut vec![c])
        })
    }
}

/// Whether some strong reality satisfies the FD. False when no strong
/// reality exists.
pub fn strongly_possible_fd(
    gens: &GeneratorSet,
    fd: &ClassicalFd,
    options: SearchOptions,
) -> Result<Verdict, DecisionError> {
    let mut v = Verdict::new(Problem::StronglyPossible, false, gens);
    let schema = gens.schema();
    if !has_strong_realities(schema) {
        return Ok(v);
    }
    let mut coprimes: Vec<ElementId> = schema
        .lattices()
        .map(|l| l.coprimes().next().expect("coprimes exist"))
        .collect();
    if fd.is_trivial() {
        let w = StrongReality::new(schema, AbstractTuple::new(coprimes)).expect("coprimes");
        verify(gens, &w.to_reality(), fd)?;
        v.answer = true;
        v.witness = Some(Witness::Strong(w));
        return Ok(v);
    }
    let lhs: Vec<usize> = fd.lhs.iter().collect();
    let choices = lhs
        .iter()
        .map(|&b| {
            let l = schema.lattice(b);
            if options.prune_to_maximal {
                l.maximal_coprimes()
            } else {
                l.coprimes().collect()
            }
        })
        .collect();
    let search = Search {
        gens,
        rhs: fd.rhs,
        lhs,
        choices,
        rhs_coprimes: schema.lattice(fd.rhs).coprimes().collect(),
        found: AtomicBool::new(false),
        closures: AtomicU64::new(0),
        nodes: AtomicU64::new(0),
    };
    let hit = search.run(options.parallel);
    v.stats.closures_computed = search.closures.load(Ordering::Relaxed);
    v.stats.nodes_explored = search.nodes.load(Ordering::Relaxed);
    if let Some((chosen, c)) = hit {
        // unchosen attributes of X keep an arbitrary co-prime
        for (&b, &cb) in search.lhs.iter().zip(&chosen) {
            coprimes[b] = cb;
        }
        coprimes[fd.rhs] = c;
        let w = StrongReality::new(schema, AbstractTuple::new(coprimes)).expect("coprimes");
        verify(gens, &w.to_reality(), fd)?;
        v.answer = true;
        v.witness = Some(Witness::Strong(w));
    }
    Ok(v)
}

/// Runs one of the four problems with default search options.
pub fn decide(
    problem: Problem,
    gens: &GeneratorSet,
    fd: &ClassicalFd,
    options: SearchOptions,
) -> Result<Verdict, DecisionError> {
    match problem {
        Problem::Certain => Ok(certain_fd(gens, fd)),
        Problem::StronglyCertain => Ok(strongly_certain_fd(gens, fd)),
        Problem::Possible => possible_fd(gens, fd),
        Problem::StronglyPossible => strongly_possible_fd(gens, fd, options),
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ReductionError {
    #[error("clause {clause}: {reason}")]
    MalformedClause { clause: usize, reason: String },
    #[error("too many variables for one schema ({0})")]
    TooManyVariables(usize),
}

/// A strong-possible instance built from a 3CNF formula. Attribute `A_i`
/// carries variable `x_i`; the last attribute is the dependent one.
#[derive(Clone, Debug)]
pub struct Reduction {
    pub relation: Relation,
    pub fd: ClassicalFd,
    num_vars: usize,
}

fn positive(i: usize) -> String {
    format!("a{i}")
}

fn negative(i: usize) -> String {
    format!("na{i}")
}

fn rule(predicate: Predicate, result: &str) -> RuleSpec {
    RuleSpec {
        predicate,
        result: result.to_string(),
    }
}

fn diamond_spec(i: usize) -> LatticeSpec {
    let (a, na) = (positive(i), negative(i));
    LatticeSpec {
        elements: vec!["0".into(), a.clone(), na.clone(), "1".into()],
        covers: vec![
            ("0".into(), a.clone()),
            ("0".into(), na.clone()),
            (a, "1".into()),
            (na, "1".into()),
        ],
    }
}

pub fn reduce_3sat(cnf: &Cnf) -> Result<Reduction, ReductionError> {
    let n = cnf.num_vars;
    if n + 1 > crate::attrs::MAX_ATTRIBUTES {
        return Err(ReductionError::TooManyVariables(n));
    }
    for (j, c) in cnf.clauses.iter().enumerate() {
        let malformed = |reason: String| ReductionError::MalformedClause { clause: j + 1, reason };
        if c.len() != 3 {
            return Err(malformed(format!("expected 3 literals, found {}", c.len())));
        }
        if c.iter().any(|&l| c.contains(&-l)) {
            return Err(malformed("contains a variable and its negation".into()));
        }
    }
    let delta = |d: i64| Predicate::AbsDiffLeq {
        delta: Decimal::from(d),
    };
    let mut attributes: Vec<AttributeSpec> = (1..=n)
        .map(|i| AttributeSpec {
            name: format!("A{i}"),
            lattice: diamond_spec(i),
            rules: vec![
                rule(Predicate::Equal, "1"),
                rule(delta(1), &positive(i)),
                rule(delta(2), &negative(i)),
                rule(Predicate::Always, "0"),
            ],
        })
        .collect();
    attributes.push(AttributeSpec {
        name: format!("A{}", n + 1),
        lattice: LatticeSpec {
            elements: vec!["0".into(), "1".into()],
            covers: vec![("0".into(), "1".into())],
        },
        rules: vec![
            rule(Predicate::Equal, "1"),
            rule(delta(1), "0"),
            rule(Predicate::Always, "1"),
        ],
    });
    let schema = Arc::new(
        SchemaContext::from_spec(&ContextSpec { attributes }).expect("reduction context is valid"),
    );
    let num = |x: usize| Value::Number(Decimal::from(x));
    let mut rows = Vec::with_capacity(2 * cnf.clauses.len());
    for (j0, clause) in cnf.clauses.iter().enumerate() {
        let j = j0 + 1;
        let mut t = vec![num(3 * j); n + 1];
        let mut t2 = t.clone();
        for &l in clause {
            let i = l.unsigned_abs() as usize - 1;
            t[i] = num(3 * j - 2);
            t2[i] = num(if l > 0 { 3 * j } else { 3 * j - 1 });
        }
        t[n] = num(3 * j - 1);
        t2[n] = num(3 * j);
        rows.push(t);
        rows.push(t2);
    }
    let relation = Relation::from_rows(schema, rows).expect("rows have schema arity");
    Ok(Reduction {
        relation,
        fd: ClassicalFd::new(AttrSet::full(n), n),
        num_vars: n,
    })
}

impl Reduction {
    pub fn schema(&self) -> &Arc<SchemaContext> {
        self.relation.schema()
    }

    /// True variables pick `a_i`, false ones `na_i`.
    pub fn assignment_to_reality(&self, assignment: &[bool]) -> StrongReality {
        let schema = self.schema();
        let mut coords: Vec<ElementId> = assignment
            .iter()
            .enumerate()
            .map(|(i, &b)| {
                let name = if b { positive(i + 1) } else { negative(i + 1) };
                schema.lattice(i).element(&name).expect("reduction element")
            })
            .collect();
        coords.push(schema.lattice(self.num_vars).top());
        StrongReality::new(schema, AbstractTuple::new(coords)).expect("reduction coprimes")
    }

    pub fn reality_to_assignment(&self, g: &StrongReality) -> Vec<bool> {
        let schema = self.schema();
        (0..self.num_vars)
            .map(|i| schema.lattice(i).name(g.coprimes().get(i)) == positive(i + 1))
            .collect()
    }

    pub fn write(&self, dir: &std::path::Path) -> Result<(), RelationError> {
        std::fs::create_dir_all(dir)?;
        std::fs::write(dir.join("context.json"), self.schema().to_spec().to_json())?;
        let mut csv = Vec::new();
        self.relation.write_csv(&mut csv)?;
        std::fs::write(dir.join("relation.csv"), csv)?;
        let schema = self.schema();
        let fd: BTreeMap<&str, String> = [
            ("lhs", schema.format_attr_set(self.fd.lhs)),
            ("rhs", schema.attribute(self.fd.rhs).name().to_string()),
        ]
        .into();
        std::fs::write(
            dir.join("fd.json"),
            serde_json::to_string_pretty(&fd).expect("fd serializes"),
        )?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::realities::enumerate_strong_realities;

    fn load(context: &str, relation: &str) -> GeneratorSet {
        let schema = Arc::new(SchemaContext::from_json(context).unwrap());
        GeneratorSet::from_relation(&Relation::load_csv(schema, relation.as_bytes()).unwrap()).unwrap()
    }

    fn running() -> GeneratorSet {
        load(
            include_str!("../fixtures/running/context.json"),
            include_str!("../fixtures/running/relation.csv"),
        )
    }

    fn fig6() -> GeneratorSet {
        load(
            include_str!("../fixtures/fig6/context.json"),
            include_str!("../fixtures/fig6/relation.csv"),
        )
    }

    fn fd(g: &GeneratorSet, lhs: &str, rhs: &str) -> ClassicalFd {
        ClassicalFd::parse(g.schema(), lhs, rhs).unwrap()
    }

    #[test]
    fn running_example_verdicts() {
        let g = running();
        let bc_a = fd(&g, "B,C", "A");
        let v = certain_fd(&g, &bc_a);
        assert!(!v.answer);
        let m = v.counterexample.unwrap();
        assert!(g.contains(&m));

        let v = possible_fd(&g, &bc_a).unwrap();
        assert!(v.answer);
        let w = v.witness.unwrap().reality();
        assert!(check_fd_under_reality(&g, &w, bc_a.lhs, bc_a.rhs));

        let g1 = Reality::new(g.schema(), g.schema().parse_tuple("u,t,c").unwrap()).unwrap();
        assert!(check_fd_under_reality(&g, &g1, bc_a.lhs, bc_a.rhs));
    }

    #[test]
    fn trivial_dependencies() {
        let g = running();
        let t = fd(&g, "A,B", "A");
        for p in Problem::ALL {
            assert!(decide(p, &g, &t, SearchOptions::default()).unwrap().answer, "{p}");
        }
    }

    #[test]
    fn fig6_separation() {
        let g = fig6();
        assert!(!certain_fd(&g, &fd(&g, "B", "C")).answer);
        assert!(possible_fd(&g, &fd(&g, "A", "B")).unwrap().answer);
    }

    #[test]
    fn possible_fails_when_closure_hits_bottom() {
        // two tuples that agree on B and C and are definitely different on A
        let ctx = include_str!("../fixtures/fig6/context.json");
        let g = load(ctx, "A,B,C\n2,1,1\n3,1,1\n");
        let v = possible_fd(&g, &fd(&g, "B,C", "A")).unwrap();
        assert!(!v.answer);
        let all = crate::realities::enumerate_realities(g.schema())
            .any(|r| check_fd_under_reality(&g, &r, fd(&g, "B,C", "A").lhs, 0));
        assert!(!all);
    }

    #[test]
    fn strongly_certain_is_vacuous_without_strong_realities() {
        let g = load(
            include_str!("../fixtures/fig5/context.json"),
            include_str!("../fixtures/fig5/relation.csv"),
        );
        assert!(!has_strong_realities(g.schema()));
        let n = g.schema().len();
        for a in 0..n {
            let f = ClassicalFd::new(AttrSet::full(n).intersection(AttrSet::from_bits(!(1 << a))), a);
            assert!(strongly_certain_fd(&g, &f).answer);
            assert!(!strongly_possible_fd(&g, &f, SearchOptions::default()).unwrap().answer);
        }
    }

    #[test]
    fn reduction_layout() {
        let cnf = Cnf::new(3, vec![vec![1, 2, 3]]).unwrap();
        let r = reduce_3sat(&cnf).unwrap();
        let rows: Vec<Vec<String>> = r
            .relation
            .tuples()
            .iter()
            .map(|t| t.values.iter().map(|v| v.to_string()).collect())
            .collect();
        assert_eq!(rows, vec![vec!["1", "1", "1", "2"], vec!["3", "3", "3", "3"]]);
        assert_eq!(r.fd, ClassicalFd::new(AttrSet::full(3), 3));
    }

    #[test]
    fn negative_literals_and_unused_variables() {
        let cnf = Cnf::new(4, vec![vec![1, -2, 3], vec![-1, 2, 4]]).unwrap();
        let r = reduce_3sat(&cnf).unwrap();
        let rows: Vec<Vec<String>> = r
            .relation
            .tuples()
            .iter()
            .map(|t| t.values.iter().map(|v| v.to_string()).collect())
            .collect();
        assert_eq!(rows[0], vec!["1", "1", "1", "3", "2"]);
        assert_eq!(rows[1], vec!["3", "2", "3", "3", "3"]);
        assert_eq!(rows[2], vec!["4", "4", "6", "4", "5"]);
        assert_eq!(rows[3], vec!["5", "6", "6", "6", "6"]);
        // cross-clause pairs never compare to the bottom on the last attribute
        let s = r.schema();
        let t = r.relation.tuples();
        for (i, j) in [(0, 2), (0, 3), (1, 2), (1, 3)] {
            let m = s.compare_tuples(&t[i], &t[j]).unwrap();
            assert_eq!(m.get(4), s.lattice(4).top());
        }
    }

    #[test]
    fn malformed_clauses() {
        let cnf = Cnf::new(3, vec![vec![1, -1, 2]]).unwrap();
        assert!(matches!(
            reduce_3sat(&cnf),
            Err(ReductionError::MalformedClause { clause: 1, .. })
        ));
        let cnf = Cnf::new(3, vec![vec![1, 2]]).unwrap();
        assert!(matches!(reduce_3sat(&cnf), Err(ReductionError::MalformedClause { .. })));
    }

    #[test]
    fn reduction_fixtures() {
        for (text, sat) in [
            (include_str!("../fixtures/reduction/sat.cnf"), true),
            (include_str!("../fixtures/reduction/unsat.cnf"), false),
        ] {
            let cnf = Cnf::parse_dimacs(text).unwrap();
            let r = reduce_3sat(&cnf).unwrap();
            let g = GeneratorSet::from_relation(&r.relation).unwrap();
            for options in [SearchOptions::default(), SearchOptions::deterministic()] {
                let v = strongly_possible_fd(&g, &r.fd, options).unwrap();
                assert_eq!(v.answer, sat);
                if let Some(Witness::Strong(w)) = &v.witness {
                    assert!(cnf.is_satisfied_by(&r.reality_to_assignment(w)));
                }
            }
        }
    }

    #[test]
    fn assignment_round_trip() {
        let cnf = Cnf::parse_dimacs(include_str!("../fixtures/reduction/sat.cnf")).unwrap();
        let r = reduce_3sat(&cnf).unwrap();
        let g = GeneratorSet::from_relation(&r.relation).unwrap();
        for w in enumerate_strong_realities(r.schema()) {
            let a = r.reality_to_assignment(&w);
            assert_eq!(r.assignment_to_reality(&a), w);
            assert_eq!(
                check_fd_under_reality(&g, &w.to_reality(), r.fd.lhs, r.fd.rhs),
                cnf.is_satisfied_by(&a)
            );
        }
    }

    #[test]
    fn verdict_json() {
        let g = running();
        let v = possible_fd(&g, &fd(&g, "B,C", "A")).unwrap();
        let j = v.to_json(g.schema());
        assert_eq!(j["problem"], "possible");
        assert_eq!(j["answer"], true);
        let back: crate::realities::RealityFile =
            serde_json::from_value(j["witness"].clone()).unwrap();
        let r = back.to_reality(g.schema()).unwrap();
        assert!(check_fd_under_reality(&g, &r, AttrSet::from_iter([1, 2]), 0));
        let v = certain_fd(&g, &fd(&g, "B,C", "A"));
        assert!(v.to_json(g.schema())["counterexample"].is_string());
    }
}
