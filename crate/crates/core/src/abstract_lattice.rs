//! Abstract tuples, the generator set of a relation and the closure operator
//! of its abstract lattice.
//!
//! The abstract lattice of a relation is the meet-closure of its generator
//! set inside the product of the truth lattices. It can be exponentially
//! larger than the generator set, so every query here works on generators
//! directly: the closure of `x` is the meet of all generators above `x`.

use std::collections::{BTreeSet, HashSet};
use std::sync::Arc;

use rayon::prelude::*;
use thiserror::Error;

use crate::attrs::AttrSet;
use crate::context::{ContextError, SchemaContext};
use crate::lattice::ElementId;
use crate::relation::Relation;

/// An element of the product of truth lattices, one coordinate per attribute.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct AbstractTuple(Vec<ElementId>);

impl AbstractTuple {
    pub fn new(coords: Vec<ElementId>) -> Self {
        AbstractTuple(coords)
    }

    pub fn coords(&self) -> &[ElementId] {
        &self.0
    }

    pub fn get(&self, i: usize) -> ElementId {
        self.0[i]
    }

    pub fn set(&mut self, i: usize, e: ElementId) {
        self.0[i] = e;
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// A lattice implication `lhs → rhs` over the product of truth lattices.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct AbstractFd {
    pub lhs: AbstractTuple,
    pub rhs: AbstractTuple,
}

impl AbstractFd {
    pub fn new(lhs: AbstractTuple, rhs: AbstractTuple) -> Self {
        AbstractFd { lhs, rhs }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AbstractError {
    #[error("abstract tuple has {found} coordinates, schema has {expected}")]
    ArityMismatch { expected: usize, found: usize },
    #[error("materialization exceeded the cap of {cap} elements ({size} so far)")]
    CapExceeded { cap: usize, size: usize },
}

pub const DEFAULT_MATERIALIZE_CAP: usize = 100_000;

fn check_arity(schema: &SchemaContext, x: &AbstractTuple) -> Result<(), AbstractError> {
    if x.len() != schema.len() {
        return Err(AbstractError::ArityMismatch {
            expected: schema.len(),
            found: x.len(),
        });
    }
    Ok(())
}

impl SchemaContext {
    pub fn top_tuple(&self) -> AbstractTuple {
        AbstractTuple(self.lattices().map(|l| l.top()).collect())
    }

    pub fn bottom_tuple(&self) -> AbstractTuple {
        AbstractTuple(self.lattices().map(|l| l.bottom()).collect())
    }

    /// Coordinate-wise order. Both tuples must have the schema's arity.
    #[inline]
    pub fn tuple_leq(&self, x: &AbstractTuple, y: &AbstractTuple) -> bool {
        self.attributes()
            .iter()
            .zip(x.0.iter().zip(&y.0))
            .all(|(a, (&xi, &yi))| a.lattice().leq(xi, yi))
    }

    #[inline]
    pub fn tuple_meet(&self, x: &AbstractTuple, y: &AbstractTuple) -> AbstractTuple {
        AbstractTuple(
            self.attributes()
                .iter()
                .zip(x.0.iter().zip(&y.0))
                .map(|(a, (&xi, &yi))| a.lattice().meet(xi, yi))
                .collect(),
        )
    }

    pub fn tuple_join(&self, x: &AbstractTuple, y: &AbstractTuple) -> AbstractTuple {
        AbstractTuple(
            self.attributes()
                .iter()
                .zip(x.0.iter().zip(&y.0))
                .map(|(a, (&xi, &yi))| a.lattice().join(xi, yi))
                .collect(),
        )
    }

    /// `1_A` on attributes of `set`, `0_A` elsewhere.
    pub fn characteristic_vector(&self, set: AttrSet) -> AbstractTuple {
        AbstractTuple(
            self.lattices()
                .enumerate()
                .map(|(i, l)| if set.contains(i) { l.top() } else { l.bottom() })
                .collect(),
        )
    }
}

/// Arity-checked coordinate-wise order.
pub fn vec_leq(
    schema: &SchemaContext,
    x: &AbstractTuple,
    y: &AbstractTuple,
) -> Result<bool, AbstractError> {
    check_arity(schema, x)?;
    check_arity(schema, y)?;
    Ok(schema.tuple_leq(x, y))
}

/// Arity-checked coordinate-wise meet.
pub fn vec_meet(
    schema: &SchemaContext,
    x: &AbstractTuple,
    y: &AbstractTuple,
) -> Result<AbstractTuple, AbstractError> {
    check_arity(schema, x)?;
    check_arity(schema, y)?;
    Ok(schema.tuple_meet(x, y))
}

/// Characteristic vector of a set of attribute names.
pub fn characteristic_vector<S: AsRef<str>>(
    schema: &SchemaContext,
    names: &[S],
) -> Result<AbstractTuple, ContextError> {
    let set = names
        .iter()
        .map(|n| schema.attribute_index(n.as_ref()))
        .collect::<Result<AttrSet, _>>()?;
    Ok(schema.characteristic_vector(set))
}

// Relations with at least this many tuples compare pairs on the rayon pool.
const PARALLEL_PAIR_THRESHOLD: usize = 256;

/// The deduplicated comparison vectors of all tuple pairs, plus the top
/// vector. Generators are kept sorted so the set is independent of the
/// order in which pairs were compared.
#[derive(Clone, Debug)]
pub struct GeneratorSet {
    schema: Arc<SchemaContext>,
    gens: Vec<AbstractTuple>,
}

impl PartialEq for GeneratorSet {
    fn eq(&self, other: &Self) -> bool {
        self.gens == other.gens
    }
}

impl GeneratorSet {
    /// Compares every pair `(t_i, t_j)` with `i <= j`.
    pub fn from_relation(relation: &Relation) -> Result<Self, ContextError> {
        let schema = relation.schema().clone();
        let tuples = relation.tuples();
        let row = |i: usize| -> Result<BTreeSet<AbstractTuple>, ContextError> {
            tuples[i..]
                .iter()
                .map(|t| schema.compare_tuples(&tuples[i], t))
                .collect()
        };
        let mut gens: BTreeSet<AbstractTuple> = if tuples.len() >= PARALLEL_PAIR_THRESHOLD {
            (0..tuples.len())
                .into_par_iter()
                .map(row)
                .try_reduce(BTreeSet::new, |mut a, b| {
                    a.extend(b);
                    Ok(a)
                })?
        } else {
            let mut acc = BTreeSet::new();
            for i in 0..tuples.len() {
                acc.extend(row(i)?);
            }
            acc
        };
        gens.insert(schema.top_tuple());
        Ok(GeneratorSet {
            schema,
            gens: gens.into_iter().collect(),
        })
    }

    /// Sequential construction; always identical to [`Self::from_relation`].
    pub fn from_relation_sequential(relation: &Relation) -> Result<Self, ContextError> {
        let schema = relation.schema().clone();
        let tuples = relation.tuples();
        let mut gens = BTreeSet::new();
        for (i, t1) in tuples.iter().enumerate() {
            for t2 in &tuples[i..] {
                gens.insert(schema.compare_tuples(t1, t2)?);
            }
        }
        gens.insert(schema.top_tuple());
        Ok(GeneratorSet {
            schema,
            gens: gens.into_iter().collect(),
        })
    }

    /// Uses the given abstract tuples directly as generators.
    pub fn from_tuples<I>(schema: Arc<SchemaContext>, tuples: I) -> Result<Self, AbstractError>
    where
        I: IntoIterator<Item = AbstractTuple>,
    {
        let mut gens = BTreeSet::new();
        for t in tuples {
            check_arity(&schema, &t)?;
            gens.insert(t);
        }
        gens.insert(schema.top_tuple());
        Ok(GeneratorSet {
            schema,
            gens: gens.into_iter().collect(),
        })
    }

    pub fn schema(&self) -> &Arc<SchemaContext> {
        &self.schema
    }

    pub fn generators(&self) -> &[AbstractTuple] {
        &self.gens
    }

    pub fn len(&self) -> usize {
        self.gens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gens.is_empty()
    }

    pub fn contains(&self, x: &AbstractTuple) -> bool {
        self.gens.binary_search(x).is_ok()
    }

    /// Generators lying above `x`.
    pub fn above<'a>(&'a self, x: &'a AbstractTuple) -> impl Iterator<Item = &'a AbstractTuple> {
        self.gens.iter().filter(move |m| self.schema.tuple_leq(x, m))
    }

    /// Least element of the abstract lattice above `x`.
    pub fn closure(&self, x: &AbstractTuple) -> AbstractTuple {
        self.above(x)
            .fold(self.schema.top_tuple(), |acc, m| self.schema.tuple_meet(&acc, m))
    }

    pub fn try_closure(&self, x: &AbstractTuple) -> Result<AbstractTuple, AbstractError> {
        check_arity(&self.schema, x)?;
        Ok(self.closure(x))
    }

    /// Whether `lhs → rhs` holds in the abstract lattice, i.e. `rhs ≤ lhs⁺`.
    pub fn check_abstract_fd(&self, fd: &AbstractFd) -> bool {
        self.schema.tuple_leq(&fd.rhs, &self.closure(&fd.lhs))
    }

    /// Meet-closure of the generators, failing once it exceeds `cap`
    /// elements.
    pub fn materialize(&self, cap: usize) -> Result<AbstractLattice, AbstractError> {
        let mut seen: HashSet<AbstractTuple> = self.gens.iter().cloned().collect();
        let mut elements: Vec<AbstractTuple> = self.gens.clone();
        if elements.len() > cap {
            return Err(AbstractError::CapExceeded { cap, size: elements.len() });
        }
        // every element at index < done has been met with every other element
        let mut done = 0;
        while done < elements.len() {
            let x = elements[done].clone();
            for j in 0..done {
                let m = self.schema.tuple_meet(&x, &elements[j]);
                if seen.insert(m.clone()) {
                    elements.push(m);
                    if elements.len() > cap {
                        return Err(AbstractError::CapExceeded { cap, size: elements.len() });
                    }
                }
            }
            done += 1;
        }
        elements.sort();
        Ok(AbstractLattice {
            schema: self.schema.clone(),
            elements,
        })
    }
}

/// A fully materialized abstract lattice.
#[derive(Clone, Debug)]
pub struct AbstractLattice {
    schema: Arc<SchemaContext>,
    elements: Vec<AbstractTuple>,
}

impl AbstractLattice {
    pub fn schema(&self) -> &Arc<SchemaContext> {
        &self.schema
    }

    /// Elements in sorted coordinate order.
    pub fn elements(&self) -> &[AbstractTuple] {
        &self.elements
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn contains(&self, x: &AbstractTuple) -> bool {
        self.elements.binary_search(x).is_ok()
    }

    /// The least element.
    pub fn bottom(&self) -> &AbstractTuple {
        let s = &self.schema;
        self.elements
            .iter()
            .find(|x| self.elements.iter().all(|y| s.tuple_leq(x, y)))
            .expect("a meet-closed finite family has a least element")
    }

    /// Cover pairs `(lower, upper)` as indices into [`Self::elements`].
    pub fn covers(&self) -> Vec<(usize, usize)> {
        let s = &self.schema;
        let n = self.elements.len();
        let lt = |i: usize, j: usize| i != j && s.tuple_leq(&self.elements[i], &self.elements[j]);
        let mut out = Vec::new();
        for i in 0..n {
            for j in 0..n {
                if lt(i, j) && !(0..n).any(|k| lt(i, k) && lt(k, j)) {
                    out.push((i, j));
                }
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::FiniteLattice;

    fn running() -> GeneratorSet {
        let schema = Arc::new(
            SchemaContext::from_json(include_str!("../fixtures/running/context.json")).unwrap(),
        );
        let r = Relation::load_csv(schema, include_str!("../fixtures/running/relation.csv").as_bytes())
            .unwrap();
        GeneratorSet::from_relation(&r).unwrap()
    }

    fn t(g: &GeneratorSet, s: &str) -> AbstractTuple {
        g.schema().parse_tuple(s).unwrap()
    }

    #[test]
    fn running_generators() {
        let g = running();
        let listed: BTreeSet<String> = g
            .generators()
            .iter()
            .map(|x| g.schema().format_tuple(x))
            .collect();
        let expected: BTreeSet<String> = [
            "⟨g,t,c⟩", "⟨g,t,u⟩", "⟨u,d,c⟩", "⟨u,t,c⟩", "⟨b,t,i⟩", "⟨u,d,u⟩", "⟨u,t,u⟩",
            "⟨b,t,u⟩", "⟨gb,d,c⟩", "⟨b,d,i⟩",
        ]
        .into_iter()
        .map(str::to_string)
        .collect();
        assert_eq!(listed, expected);
    }

    #[test]
    fn running_closures() {
        let g = running();
        assert_eq!(g.closure(&t(&g, "gb,d,i")), t(&g, "gb,d,u"));
        assert_eq!(g.closure(&t(&g, "g,t,i")), t(&g, "g,t,u"));
        assert_eq!(g.closure(&t(&g, "u,d,i")), t(&g, "u,d,u"));
        let top = g.schema().top_tuple();
        assert_eq!(g.closure(&top), top);
    }

    #[test]
    fn running_abstract_fds() {
        let g = running();
        let fd = |a: &str, b: &str| AbstractFd::new(t(&g, a), t(&g, b));
        assert!(g.check_abstract_fd(&fd("u,d,i", "b,d,u")));
        assert!(!g.check_abstract_fd(&fd("g,t,i", "gb,t,c")));
        assert!(g.check_abstract_fd(&fd("gb,d,i", "gb,d,u")));
        assert!(g.check_abstract_fd(&fd("gb,d,i", "b,d,u")));
        assert!(g.check_abstract_fd(&fd("b,t,c", "u,t,c")));
    }

    #[test]
    fn vector_operations() {
        let g = running();
        let s = g.schema();
        assert!(vec_leq(s, &t(&g, "b,d,u"), &t(&g, "u,d,u")).unwrap());
        assert_eq!(
            vec_meet(s, &t(&g, "gb,d,c"), &t(&g, "g,t,u")).unwrap(),
            t(&g, "gb,d,u")
        );
        let x = t(&g, "u,d,c");
        assert_eq!(vec_meet(s, &x, &s.top_tuple()).unwrap(), x);
        let short = AbstractTuple::new(vec![ElementId(0)]);
        assert!(matches!(
            vec_leq(s, &short, &x),
            Err(AbstractError::ArityMismatch { expected: 3, found: 1 })
        ));
    }

    #[test]
    fn characteristic_vectors() {
        let g = running();
        let s = g.schema();
        assert_eq!(characteristic_vector(s, &["B", "C"]).unwrap(), t(&g, "b,t,c"));
        assert_eq!(characteristic_vector::<&str>(s, &[]).unwrap(), s.bottom_tuple());
        assert_eq!(characteristic_vector(s, &["A", "B", "C"]).unwrap(), s.top_tuple());
        assert!(characteristic_vector(s, &["Z"]).is_err());
    }

    #[test]
    fn running_lattice_materializes() {
        let g = running();
        let l = g.materialize(DEFAULT_MATERIALIZE_CAP).unwrap();
        for x in ["g,t,u", "gb,d,c", "gb,d,u", "g,t,c", "b,d,i"] {
            assert!(l.contains(&t(&g, x)), "{x}");
        }
        assert_eq!(l.bottom(), &t(&g, "b,d,i"));
        for x in l.elements() {
            for y in l.elements() {
                assert!(l.contains(&g.schema().tuple_meet(x, y)));
            }
        }
        assert!(matches!(
            g.materialize(3),
            Err(AbstractError::CapExceeded { cap: 3, .. })
        ));
    }

    #[test]
    fn single_tuple_relation_has_only_top() {
        let g = running();
        let r = Relation::load_csv(g.schema().clone(), "A,B,C\n1,F,70\n".as_bytes()).unwrap();
        let gens = GeneratorSet::from_relation(&r).unwrap();
        assert_eq!(gens.generators(), &[g.schema().top_tuple()]);
        assert_eq!(gens.materialize(10).unwrap().len(), 1);
    }

    #[test]
    fn empty_relation_satisfies_everything() {
        let g = running();
        let r = Relation::load_csv(g.schema().clone(), "A,B,C\n".as_bytes()).unwrap();
        let gens = GeneratorSet::from_relation(&r).unwrap();
        assert_eq!(gens.len(), 1);
        let s = g.schema();
        assert!(gens.check_abstract_fd(&AbstractFd::new(s.bottom_tuple(), s.top_tuple())));
    }

    #[test]
    fn all_null_tuples_still_contain_top() {
        let g = running();
        let r = Relation::load_csv(g.schema().clone(), "A,B,C\n1,F,null\n2,F,null\n".as_bytes())
            .unwrap();
        let gens = GeneratorSet::from_relation(&r).unwrap();
        assert!(gens.contains(&g.schema().top_tuple()));
    }

    #[test]
    fn parallel_and_sequential_generators_agree() {
        let schema = Arc::new(
            SchemaContext::from_lattices(
                &["X", "Y"],
                vec![
                    FiniteLattice::chain(&["0", "1"]).unwrap(),
                    FiniteLattice::chain(&["0", "1"]).unwrap(),
                ],
            )
            .unwrap(),
        );
        let mut csv = String::from("X,Y\n");
        for i in 0..300 {
            csv.push_str(&format!("{},{}\n", i % 7, i % 11));
        }
        let r = Relation::load_csv(schema, csv.as_bytes()).unwrap();
        assert_eq!(
            GeneratorSet::from_relation(&r).unwrap(),
            GeneratorSet::from_relation_sequential(&r).unwrap()
        );
    }
}
