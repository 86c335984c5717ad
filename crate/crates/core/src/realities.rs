//! {0,1}-interpretations of truth lattices.
//!
//! A reality is an increasing meet-homomorphic interpretation. Each one is the
//! indicator of a principal up-set, so it is stored as a threshold vector: one
//! non-bottom element per attribute, read as "at least this true means
//! equal". A strong reality is additionally join-homomorphic; its thresholds
//! are co-prime elements.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::abstract_lattice::{AbstractFd, AbstractTuple, GeneratorSet};
use crate::attrs::AttrSet;
use crate::context::SchemaContext;
use crate::lattice::{ElementId, FiniteLattice};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RealityError {
    #[error("expected {expected} thresholds, found {found}")]
    ArityMismatch { expected: usize, found: usize },
    #[error("attribute `{0}`: threshold cannot be the bottom element")]
    BottomThreshold(String),
    #[error("attribute `{attribute}`: `{element}` is not co-prime")]
    NotCoprime { attribute: String, element: String },
    #[error("unknown attribute `{0}`")]
    UnknownAttribute(String),
    #[error("attribute `{attribute}` has no element `{element}`")]
    UnknownElement { attribute: String, element: String },
    #[error("no threshold given for attribute `{0}`")]
    MissingAttribute(String),
    #[error("labeling must send the bottom to 0 and the top to 1")]
    NotAnInterpretation,
    #[error("labeling has {found} entries for a lattice of {expected} elements")]
    LabelingSize { expected: usize, found: usize },
    #[error("the supplied verdict ({given}) disagrees with the abstract lattice ({actual})")]
    InconsistentFlag { given: bool, actual: bool },
    #[error("projection theorem violated for this reality and dependency")]
    TheoremViolation,
    #[error("cannot parse reality file: {0}")]
    Parse(String),
}

/// A reality, stored as its per-attribute threshold `x_g`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Reality {
    thresholds: AbstractTuple,
}

impl Reality {
    pub fn new(schema: &SchemaContext, thresholds: AbstractTuple) -> Result<Self, RealityError> {
        if thresholds.len() != schema.len() {
            return Err(RealityError::ArityMismatch {
                expected: schema.len(),
                found: thresholds.len(),
            });
        }
        for (i, a) in schema.attributes().iter().enumerate() {
            if thresholds.get(i) == a.lattice().bottom() {
                return Err(RealityError::BottomThreshold(a.name().to_string()));
            }
        }
        Ok(Reality { thresholds })
    }

    /// Every attribute requires its top value: classical equality whenever
    /// comparability functions only send equal values to the top.
    pub fn equality(schema: &SchemaContext) -> Self {
        Reality {
            thresholds: schema.top_tuple(),
        }
    }

    pub fn from_names(
        schema: &SchemaContext,
        names: &BTreeMap<String, String>,
    ) -> Result<Self, RealityError> {
        let thresholds = named_elements(schema, names)?;
        Reality::new(schema, thresholds)
    }

    pub fn thresholds(&self) -> &AbstractTuple {
        &self.thresholds
    }

    pub fn threshold(&self, attribute: usize) -> ElementId {
        self.thresholds.get(attribute)
    }

    pub fn to_names(&self, schema: &SchemaContext) -> BTreeMap<String, String> {
        schema
            .attribute_names()
            .zip(schema.element_names(&self.thresholds))
            .map(|(a, e)| (a.to_string(), e))
            .collect()
    }

    /// Whether every threshold is co-prime in its lattice.
    pub fn is_strong(&self, schema: &SchemaContext) -> bool {
        schema
            .lattices()
            .enumerate()
            .all(|(i, l)| l.is_coprime(self.thresholds.get(i)))
    }

    /// The labeling of one attribute lattice induced by this reality.
    pub fn labeling(&self, schema: &SchemaContext, attribute: usize) -> AttributeInterpretation {
        let l = schema.lattice(attribute);
        let t = self.threshold(attribute);
        AttributeInterpretation {
            labels: l.elements().map(|x| l.leq(t, x)).collect(),
        }
    }
}

fn named_elements(
    schema: &SchemaContext,
    names: &BTreeMap<String, String>,
) -> Result<AbstractTuple, RealityError> {
    for a in names.keys() {
        if schema.attribute_index(a).is_err() {
            return Err(RealityError::UnknownAttribute(a.clone()));
        }
    }
    schema
        .attributes()
        .iter()
        .map(|a| {
            let element = names
                .get(a.name())
                .ok_or_else(|| RealityError::MissingAttribute(a.name().to_string()))?;
            a.lattice()
                .element(element)
                .ok_or_else(|| RealityError::UnknownElement {
                    attribute: a.name().to_string(),
                    element: element.clone(),
                })
        })
        .collect::<Result<Vec<_>, _>>()
        .map(AbstractTuple::new)
}

/// A strong reality, given by one co-prime per attribute. Its labeling of an
/// attribute is 1 on the up-set of the co-prime and 0 on the down-set of the
/// partner prime.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct StrongReality {
    coprimes: AbstractTuple,
}

impl StrongReality {
    pub fn new(schema: &SchemaContext, coprimes: AbstractTuple) -> Result<Self, RealityError> {
        if coprimes.len() != schema.len() {
            return Err(RealityError::ArityMismatch {
                expected: schema.len(),
                found: coprimes.len(),
            });
        }
        for (i, a) in schema.attributes().iter().enumerate() {
            let c = coprimes.get(i);
            if !a.lattice().is_coprime(c) {
                return Err(RealityError::NotCoprime {
                    attribute: a.name().to_string(),
                    element: a.lattice().name(c).to_string(),
                });
            }
        }
        Ok(StrongReality { coprimes })
    }

    pub fn from_names(
        schema: &SchemaContext,
        names: &BTreeMap<String, String>,
    ) -> Result<Self, RealityError> {
        let coprimes = named_elements(schema, names)?;
        StrongReality::new(schema, coprimes)
    }

    pub fn coprimes(&self) -> &AbstractTuple {
        &self.coprimes
    }

    pub fn to_reality(&self) -> Reality {
        Reality {
            thresholds: self.coprimes.clone(),
        }
    }

    pub fn to_names(&self, schema: &SchemaContext) -> BTreeMap<String, String> {
        self.to_reality().to_names(schema)
    }
}

/// JSON form of a reality file: `{"thresholds": {"A": "gb", ...}}` or, for a
/// strong reality, `{"coprimes": {"A": "a", ...}}`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct RealityFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub thresholds: Option<BTreeMap<String, String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub coprimes: Option<BTreeMap<String, String>>,
}

impl RealityFile {
    pub fn parse(text: &str) -> Result<Self, RealityError> {
        serde_json::from_str(text).map_err(|e| RealityError::Parse(e.to_string()))
    }

    /// Resolves the file against a schema. A strong-reality file yields the
    /// equivalent threshold reality.
    pub fn to_reality(&self, schema: &SchemaContext) -> Result<Reality, RealityError> {
        match (&self.thresholds, &self.coprimes) {
            (Some(t), None) => Reality::from_names(schema, t),
            (None, Some(c)) => Ok(StrongReality::from_names(schema, c)?.to_reality()),
            _ => Err(RealityError::Parse(
                "expected exactly one of `thresholds` or `coprimes`".into(),
            )),
        }
    }
}

/// An arbitrary {0,1}-labeling of one truth lattice with the bottom sent to
/// 0 and the top to 1. Monotonicity is not assumed.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct AttributeInterpretation {
    labels: Vec<bool>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Classification {
    pub increasing: bool,
    pub meet_hom: bool,
    pub join_hom: bool,
    pub hom: bool,
}

impl AttributeInterpretation {
    pub fn new(lattice: &FiniteLattice, labels: Vec<bool>) -> Result<Self, RealityError> {
        if labels.len() != lattice.len() {
            return Err(RealityError::LabelingSize {
                expected: lattice.len(),
                found: labels.len(),
            });
        }
        if labels[lattice.bottom().index()] || !labels[lattice.top().index()] {
            return Err(RealityError::NotAnInterpretation);
        }
        Ok(AttributeInterpretation { labels })
    }

    /// Labels 1 exactly the elements satisfying `pred`.
    pub fn from_fn(
        lattice: &FiniteLattice,
        pred: impl Fn(ElementId) -> bool,
    ) -> Result<Self, RealityError> {
        AttributeInterpretation::new(lattice, lattice.elements().map(pred).collect())
    }

    #[inline]
    pub fn label(&self, x: ElementId) -> bool {
        self.labels[x.index()]
    }

    pub fn labels(&self) -> &[bool] {
        &self.labels
    }

    /// Exhaustive check of monotonicity and homomorphism properties.
    pub fn classify(&self, lattice: &FiniteLattice) -> Classification {
        let mut c = Classification {
            increasing: true,
            meet_hom: true,
            join_hom: true,
            hom: true,
        };
        for x in lattice.elements() {
            for y in lattice.elements() {
                let (hx, hy) = (self.label(x), self.label(y));
                if lattice.leq(x, y) && hx && !hy {
                    c.increasing = false;
                }
                if self.label(lattice.meet(x, y)) != (hx && hy) {
                    c.meet_hom = false;
                }
                if self.label(lattice.join(x, y)) != (hx || hy) {
                    c.join_hom = false;
                }
            }
        }
        c.hom = c.meet_hom && c.join_hom;
        c
    }

    /// The minimum of the 1-labeled elements when they form a principal
    /// up-set, i.e. when this labeling is the one induced by a threshold.
    pub fn threshold(&self, lattice: &FiniteLattice) -> Option<ElementId> {
        let ones: Vec<ElementId> = lattice.elements().filter(|&x| self.label(x)).collect();
        let min = lattice.meet_all(ones.iter().copied());
        let principal = lattice.elements().all(|x| self.label(x) == lattice.leq(min, x));
        principal.then_some(min)
    }
}

/// Classifies a labeling against a lattice.
pub fn classify_interpretation(
    h: &AttributeInterpretation,
    lattice: &FiniteLattice,
) -> Classification {
    h.classify(lattice)
}

/// A schema interpretation built from arbitrary per-attribute labelings.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SchemaInterpretation {
    parts: Vec<AttributeInterpretation>,
}

impl SchemaInterpretation {
    pub fn new(parts: Vec<AttributeInterpretation>) -> Self {
        SchemaInterpretation { parts }
    }

    pub fn from_reality(schema: &SchemaContext, g: &Reality) -> Self {
        SchemaInterpretation {
            parts: (0..schema.len()).map(|i| g.labeling(schema, i)).collect(),
        }
    }

    pub fn parts(&self) -> &[AttributeInterpretation] {
        &self.parts
    }

    pub fn apply(&self, x: &AbstractTuple) -> AttrSet {
        self.parts
            .iter()
            .enumerate()
            .filter(|(i, h)| h.label(x.get(*i)))
            .map(|(i, _)| i)
            .collect()
    }

    pub fn apply_family<'a, I>(&self, xs: I) -> BTreeSet<AttrSet>
    where
        I: IntoIterator<Item = &'a AbstractTuple>,
    {
        xs.into_iter().map(|x| self.apply(x)).collect()
    }
}

/// The set of attributes on which `x` reaches the reality's threshold.
pub fn interpret_element(schema: &SchemaContext, g: &Reality, x: &AbstractTuple) -> AttrSet {
    schema
        .lattices()
        .enumerate()
        .filter(|&(i, l)| l.leq(g.threshold(i), x.get(i)))
        .map(|(i, _)| i)
        .collect()
}

/// Image of a family of abstract tuples, deduplicated.
pub fn interpret_family<'a, I>(schema: &SchemaContext, g: &Reality, xs: I) -> BTreeSet<AttrSet>
where
    I: IntoIterator<Item = &'a AbstractTuple>,
{
    xs.into_iter()
        .map(|x| interpret_element(schema, g, x))
        .collect()
}

/// Whether `family` contains the full set over `n` attributes and is closed
/// under pairwise intersection.
pub fn is_closure_system(family: &BTreeSet<AttrSet>, n: usize) -> bool {
    if !family.contains(&AttrSet::full(n)) {
        return false;
    }
    let members: Vec<AttrSet> = family.iter().copied().collect();
    members.iter().enumerate().all(|(i, &a)| {
        members[i + 1..]
            .iter()
            .all(|&b| family.contains(&a.intersection(b)))
    })
}

/// Thresholded trace of `x`: the reality's threshold where `x` reaches it,
/// the bottom elsewhere.
pub fn projection(schema: &SchemaContext, g: &Reality, x: &AbstractTuple) -> AbstractTuple {
    AbstractTuple::new(
        schema
            .lattices()
            .enumerate()
            .map(|(i, l)| {
                let t = g.threshold(i);
                if l.leq(t, x.get(i)) {
                    t
                } else {
                    l.bottom()
                }
            })
            .collect(),
    )
}

/// Whether `X → A` holds in the relation once its generators are read
/// through `g`.
pub fn check_fd_under_reality(gens: &GeneratorSet, g: &Reality, lhs: AttrSet, rhs: usize) -> bool {
    if lhs.contains(rhs) {
        return true;
    }
    let schema = gens.schema();
    gens.generators().iter().all(|m| {
        let image = interpret_element(schema, g, m);
        !lhs.is_subset(image) || image.contains(rhs)
    })
}

/// Whether `g(lhs) → g(rhs)` holds on every generator image.
pub fn check_interpreted_afd(gens: &GeneratorSet, g: &Reality, fd: &AbstractFd) -> bool {
    let schema = gens.schema();
    let lhs = interpret_element(schema, g, &fd.lhs);
    let rhs = interpret_element(schema, g, &fd.rhs);
    gens.generators().iter().all(|m| {
        let image = interpret_element(schema, g, m);
        !lhs.is_subset(image) || rhs.is_subset(image)
    })
}

/// Evaluates an interpreted abstract FD both directly and through the
/// projected abstract FD; the two must agree.
pub fn check_projection_theorem(
    gens: &GeneratorSet,
    g: &Reality,
    fd: &AbstractFd,
) -> Result<bool, RealityError> {
    let schema = gens.schema();
    let direct = check_interpreted_afd(gens, g, fd);
    let projected = AbstractFd::new(
        projection(schema, g, &fd.lhs),
        projection(schema, g, &fd.rhs),
    );
    if gens.check_abstract_fd(&projected) != direct {
        return Err(RealityError::TheoremViolation);
    }
    Ok(direct)
}

/// A reality under which the interpreted FD has the same verdict as the
/// abstract FD. `holds` must be that abstract verdict.
///
/// When the FD holds the thresholds copy the non-bottom coordinates of the
/// left-hand side, otherwise those of the right-hand side; remaining
/// attributes get their top.
pub fn witness_reality(
    fd: &AbstractFd,
    holds: bool,
    gens: &GeneratorSet,
) -> Result<Reality, RealityError> {
    let actual = gens.check_abstract_fd(fd);
    if actual != holds {
        return Err(RealityError::InconsistentFlag { given: holds, actual });
    }
    let schema = gens.schema();
    let anchor = if holds { &fd.lhs } else { &fd.rhs };
    let thresholds = schema
        .lattices()
        .enumerate()
        .map(|(i, l)| {
            let e = anchor.get(i);
            if e == l.bottom() {
                l.top()
            } else {
                e
            }
        })
        .collect();
    Reality::new(schema, AbstractTuple::new(thresholds))
}

/// All realities, in odometer order over non-bottom elements per attribute.
pub fn enumerate_realities(schema: &SchemaContext) -> impl Iterator<Item = Reality> + '_ {
    let choices: Vec<Vec<ElementId>> = schema
        .lattices()
        .map(|l| l.elements().filter(|&e| e != l.bottom()).collect())
        .collect();
    CartesianProduct::new(choices).map(|t| Reality { thresholds: t })
}

/// All strong realities; empty as soon as one lattice has no co-prime.
pub fn enumerate_strong_realities(
    schema: &SchemaContext,
) -> impl Iterator<Item = StrongReality> + '_ {
    let choices: Vec<Vec<ElementId>> = schema.lattices().map(|l| l.coprimes().collect()).collect();
    CartesianProduct::new(choices).map(|t| StrongReality { coprimes: t })
}

pub fn count_realities(schema: &SchemaContext) -> u128 {
    schema
        .lattices()
        .map(|l| l.len() as u128 - 1)
        .try_fold(1u128, |acc, k| acc.checked_mul(k))
        .unwrap_or(u128::MAX)
}

pub fn count_strong_realities(schema: &SchemaContext) -> u128 {
    schema
        .lattices()
        .map(|l| l.coprime_prime_pairs().len() as u128)
        .try_fold(1u128, |acc, k| acc.checked_mul(k))
        .unwrap_or(u128::MAX)
}

struct CartesianProduct {
    choices: Vec<Vec<ElementId>>,
    cursor: Option<Vec<usize>>,
}

impl CartesianProduct {
    fn new(choices: Vec<Vec<ElementId>>) -> Self {
        let cursor = (!choices.iter().any(Vec::is_empty)).then(|| vec![0; choices.len()]);
        CartesianProduct { choices, cursor }
    }
}

impl Iterator for CartesianProduct {
    type Item = AbstractTuple;

    fn next(&mut self) -> Option<AbstractTuple> {
        let cursor = self.cursor.as_mut()?;
        let item = AbstractTuple::new(
            cursor
                .iter()
                .zip(&self.choices)
                .map(|(&k, c)| c[k])
                .collect(),
        );
        // advance, last attribute fastest
        let mut i = cursor.len();
        loop {
            if i == 0 {
                self.cursor = None;
                break;
            }
            i -= 1;
            cursor[i] += 1;
            if cursor[i] < self.choices[i].len() {
                break;
            }
            cursor[i] = 0;
        }
        Some(item)
    }
}
