//! Seeded random instances shared by the integration tests.
#![allow(dead_code)]

use std::collections::BTreeSet;
use std::path::PathBuf;
use std::sync::Arc;

use comparability::abstract_lattice::{AbstractTuple, GeneratorSet};
use comparability::cnf::Cnf;
use comparability::context::{
    AttributeSpec, ContextSpec, LatticeSpec, Predicate, RuleSpec, SchemaContext, Value,
};
use comparability::lattice::{ElementId, FiniteLattice};
use comparability::realities::{AttributeInterpretation, Reality};
use comparability::relation::Relation;
use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand::SeedableRng;
use rust_decimal::Decimal;

pub type TestRng = ChaCha8Rng;

pub fn rng(seed: u64) -> TestRng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn fixture(path: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(path)
}

pub fn read_fixture(path: &str) -> String {
    std::fs::read_to_string(fixture(path)).unwrap()
}

pub fn load(dir: &str) -> GeneratorSet {
    let schema = Arc::new(SchemaContext::from_json(&read_fixture(&format!("{dir}/context.json"))).unwrap());
    let file = std::fs::File::open(fixture(&format!("{dir}/relation.csv"))).unwrap();
    GeneratorSet::from_relation(&Relation::load_csv(schema, file).unwrap()).unwrap()
}

pub fn diamond() -> FiniteLattice {
    FiniteLattice::from_covers(
        &["0", "a", "b", "1"],
        &[("0", "a"), ("0", "b"), ("a", "1"), ("b", "1")],
    )
    .unwrap()
}

pub fn m3() -> FiniteLattice {
    FiniteLattice::from_covers(
        &["0", "a", "b", "c", "1"],
        &[("0", "a"), ("0", "b"), ("0", "c"), ("a", "1"), ("b", "1"), ("c", "1")],
    )
    .unwrap()
}

pub fn pentagon() -> FiniteLattice {
    FiniteLattice::from_covers(
        &["0", "a", "b", "c", "1"],
        &[("0", "a"), ("a", "b"), ("b", "1"), ("0", "c"), ("c", "1")],
    )
    .unwrap()
}

pub fn chain(k: usize) -> FiniteLattice {
    let names: Vec<String> = (0..k).map(|i| i.to_string()).collect();
    FiniteLattice::chain(&names).unwrap()
}

/// Intersection closure of a random family of subsets of a 4-element set,
/// ordered by inclusion; at most 6 and at least 2 elements.
pub fn random_set_lattice(rng: &mut TestRng) -> FiniteLattice {
    loop {
        let mut family: BTreeSet<u8> = BTreeSet::from([0b1111]);
        for _ in 0..rng.gen_range(1..=5) {
            family.insert(rng.gen_range(0..16));
        }
        loop {
            let members: Vec<u8> = family.iter().copied().collect();
            let before = family.len();
            for &a in &members {
                for &b in &members {
                    family.insert(a & b);
                }
            }
            if family.len() == before {
                break;
            }
        }
        if !(2..=6).contains(&family.len()) {
            continue;
        }
        let members: Vec<u8> = family.into_iter().collect();
        let sub = |a: u8, b: u8| a != b && a & b == a;
        let names: Vec<String> = members.iter().map(|m| format!("s{m}")).collect();
        let mut covers = Vec::new();
        for &a in &members {
            for &b in &members {
                if sub(a, b) && !members.iter().any(|&c| sub(a, c) && sub(c, b)) {
                    covers.push((format!("s{a}"), format!("s{b}")));
                }
            }
        }
        return FiniteLattice::from_covers(&names, &covers).unwrap();
    }
}

/// Mostly random set lattices, sometimes one of the named small lattices.
pub fn random_lattice(rng: &mut TestRng) -> FiniteLattice {
    match rng.gen_range(0..10) {
        0 => m3(),
        1 => pentagon(),
        2 => diamond(),
        3 => chain(rng.gen_range(2..=5)),
        _ => random_set_lattice(rng),
    }
}

/// Like [`random_lattice`] but never M3, so strong realities exist more
/// often.
pub fn random_lattice_with_coprimes(rng: &mut TestRng) -> FiniteLattice {
    loop {
        let l = random_lattice(rng);
        if !l.coprime_prime_pairs().is_empty() {
            return l;
        }
    }
}

fn int(v: usize) -> Value {
    Value::Number(Decimal::from(v))
}

/// A context over the given lattices whose values are small integers: equal
/// values compare to the top, random pairs of distinct values to each middle
/// element, everything else to the bottom.
pub fn random_context(rng: &mut TestRng, lattices: &[FiniteLattice], values: usize) -> SchemaContext {
    let attributes = lattices
        .iter()
        .enumerate()
        .map(|(i, l)| {
            let top = l.name(l.top()).to_string();
            let bottom = l.name(l.bottom()).to_string();
            let mut rules = vec![RuleSpec {
                predicate: Predicate::Equal,
                result: top,
            }];
            let mut middle: Vec<ElementId> = l
                .elements()
                .filter(|&e| e != l.top() && e != l.bottom())
                .collect();
            middle.shuffle(rng);
            for e in middle {
                let pairs: Vec<(Value, Value)> = (0..rng.gen_range(1..=3))
                    .map(|_| {
                        let a = rng.gen_range(0..values);
                        let b = (a + rng.gen_range(1..values)) % values;
                        (int(a), int(b))
                    })
                    .collect();
                rules.push(RuleSpec {
                    predicate: Predicate::PairInSet { pairs },
                    result: l.name(e).to_string(),
                });
            }
            rules.push(RuleSpec {
                predicate: Predicate::Always,
                result: bottom,
            });
            AttributeSpec {
                name: format!("A{i}"),
                lattice: LatticeSpec {
                    elements: l.names().to_vec(),
                    covers: l
                        .covers()
                        .iter()
                        .map(|&(a, b)| (l.name(a).to_string(), l.name(b).to_string()))
                        .collect(),
                },
                rules,
            }
        })
        .collect();
    SchemaContext::from_spec(&ContextSpec { attributes }).unwrap()
}

pub fn random_relation(rng: &mut TestRng, schema: Arc<SchemaContext>, tuples: usize, values: usize) -> Relation {
    let rows = (0..tuples)
        .map(|_| (0..schema.len()).map(|_| int(rng.gen_range(0..values))).collect())
        .collect();
    Relation::from_rows(schema, rows).unwrap()
}

/// A relation-backed instance: up to `max_attrs` attributes, lattices of at
/// most 6 elements, up to `max_tuples` tuples.
pub fn random_instance(rng: &mut TestRng, max_attrs: usize, max_tuples: usize) -> GeneratorSet {
    let n = rng.gen_range(1..=max_attrs);
    let lattices: Vec<FiniteLattice> = (0..n).map(|_| random_lattice(rng)).collect();
    let values = 3;
    let schema = Arc::new(random_context(rng, &lattices, values));
    let tuples = rng.gen_range(0..=max_tuples);
    GeneratorSet::from_relation(&random_relation(rng, schema, tuples, values)).unwrap()
}

/// Product-lattice context with `n` random lattices and bare equality rules.
pub fn random_schema(rng: &mut TestRng, n: usize) -> Arc<SchemaContext> {
    let lattices: Vec<FiniteLattice> = (0..n).map(|_| random_lattice(rng)).collect();
    let names: Vec<String> = (0..n).map(|i| format!("A{i}")).collect();
    Arc::new(SchemaContext::from_lattices(&names, lattices).unwrap())
}

pub fn random_element(rng: &mut TestRng, l: &FiniteLattice) -> ElementId {
    ElementId(rng.gen_range(0..l.len()) as u16)
}

pub fn random_tuple(rng: &mut TestRng, schema: &SchemaContext) -> AbstractTuple {
    AbstractTuple::new(schema.lattices().map(|l| random_element(rng, l)).collect())
}

pub fn random_reality(rng: &mut TestRng, schema: &SchemaContext) -> Reality {
    let t = AbstractTuple::new(
        schema
            .lattices()
            .map(|l| loop {
                let e = random_element(rng, l);
                if e != l.bottom() {
                    break e;
                }
            })
            .collect(),
    );
    Reality::new(schema, t).unwrap()
}

/// Random generators over a product lattice; their meet-closure is a random
/// meet-sublattice containing the top.
pub fn random_generators(rng: &mut TestRng, schema: Arc<SchemaContext>, max: usize) -> GeneratorSet {
    let k = rng.gen_range(0..=max);
    let tuples: Vec<AbstractTuple> = (0..k).map(|_| random_tuple(rng, &schema)).collect();
    GeneratorSet::from_tuples(schema, tuples).unwrap()
}

/// The up-set generated by a random set of non-bottom elements and the top.
pub fn random_increasing_labeling(rng: &mut TestRng, l: &FiniteLattice) -> AttributeInterpretation {
    let seeds: Vec<ElementId> = l
        .elements()
        .filter(|&e| e != l.bottom() && (e == l.top() || rng.gen_bool(0.4)))
        .collect();
    AttributeInterpretation::from_fn(l, |x| seeds.iter().any(|&s| l.leq(s, x))).unwrap()
}

/// A random 3CNF whose clauses use three distinct variables.
pub fn random_3cnf(rng: &mut TestRng, num_vars: usize, num_clauses: usize) -> Cnf {
    let vars: Vec<i32> = (1..=num_vars as i32).collect();
    let clauses = (0..num_clauses)
        .map(|_| {
            vars.choose_multiple(rng, 3)
                .map(|&v| if rng.gen_bool(0.5) { v } else { -v })
                .collect()
        })
        .collect();
    Cnf::new(num_vars, clauses).unwrap()
}

/// A random 3CNF whose clauses may repeat a literal, as in `(x ∨ x ∨ y)`,
/// but never contain a variable with both signs.
pub fn random_3cnf_with_repeats(rng: &mut TestRng, num_vars: usize, num_clauses: usize) -> Cnf {
    let literal = |rng: &mut TestRng| {
        let v = rng.gen_range(1..=num_vars as i32);
        if rng.gen_bool(0.5) { v } else { -v }
    };
    let clauses = (0..num_clauses)
        .map(|_| loop {
            let c: Vec<i32> = (0..3).map(|_| literal(rng)).collect();
            if !c.iter().any(|l| c.contains(&-l)) {
                break c;
            }
        })
        .collect();
    Cnf::new(num_vars, clauses).unwrap()
}
