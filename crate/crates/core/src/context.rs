//! Attribute and schema contexts: truth lattices paired with comparability
//! rules.
//!
//! A comparability function is written as an ordered list of rules, each a
//! symmetric predicate over an unordered pair of values plus the truth value
//! it yields. The first matching rule wins and the list must end with
//! `always`, so every function is total.

use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;

use rust_decimal::Decimal;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::abstract_lattice::AbstractTuple;
use crate::attrs::{AttrSet, MAX_ATTRIBUTES};
use crate::lattice::{ElementId, FiniteLattice, LatticeError};
use crate::relation::Tuple;

/// A cell value. Numbers compare by numeric value (`1.40 == 1.4`).
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Value {
    Null,
    Number(Decimal),
    Text(String),
}

impl Value {
    /// Parses a relation cell: `null` (any case) or the empty string is the
    /// null marker, numeric text is a number, anything else is text.
    pub fn parse_cell(cell: &str) -> Value {
        let trimmed = cell.trim();
        if trimmed.is_empty() || trimmed.eq_ignore_ascii_case("null") {
            return Value::Null;
        }
        match parse_decimal(trimmed) {
            Some(d) => Value::Number(d),
            None => Value::Text(cell.to_string()),
        }
    }

    pub fn is_null(&self) -> bool {
        matches!(self, Value::Null)
    }

    pub fn as_number(&self) -> Option<Decimal> {
        match self {
            Value::Number(d) => Some(*d),
            _ => None,
        }
    }

    fn from_json(v: &serde_json::Value) -> Result<Value, String> {
        match v {
            serde_json::Value::Null => Ok(Value::Null),
            serde_json::Value::Number(n) => parse_decimal(&n.to_string())
                .map(Value::Number)
                .ok_or_else(|| format!("number {n} is out of range")),
            serde_json::Value::String(s) => Ok(Value::Text(s.clone())),
            other => Err(format!("unsupported value {other}")),
        }
    }

    fn to_json(&self) -> serde_json::Value {
        match self {
            Value::Null => serde_json::Value::Null,
            Value::Number(d) => serde_json::from_str(&d.to_string())
                .unwrap_or_else(|_| serde_json::Value::String(d.to_string())),
            Value::Text(s) => serde_json::Value::String(s.clone()),
        }
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Null => f.write_str("null"),
            Value::Number(d) => write!(f, "{d}"),
            Value::Text(s) => f.write_str(s),
        }
    }
}

fn parse_decimal(s: &str) -> Option<Decimal> {
    let looks_numeric = s
        .bytes()
        .all(|b| b.is_ascii_digit() || matches!(b, b'-' | b'+' | b'.' | b'e' | b'E'))
        && s.bytes().any(|b| b.is_ascii_digit());
    if !looks_numeric {
        return None;
    }
    Decimal::from_str(s)
        .or_else(|_| Decimal::from_scientific(s))
        .ok()
        .map(|d| d.normalize())
}

mod json_decimal {
    use super::{Decimal, Value};
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(v: &Decimal, s: S) -> Result<S::Ok, S::Error> {
        Value::Number(*v).to_json().serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Decimal, D::Error> {
        let raw = serde_json::Value::deserialize(d)?;
        match Value::from_json(&raw).map_err(serde::de::Error::custom)? {
            Value::Number(n) => Ok(n),
            Value::Text(s) => super::parse_decimal(&s)
                .ok_or_else(|| serde::de::Error::custom(format!("`{s}` is not a number"))),
            Value::Null => Err(serde::de::Error::custom("expected a number, found null")),
        }
    }
}

mod json_pairs {
    use super::Value;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(v: &[(Value, Value)], s: S) -> Result<S::Ok, S::Error> {
        v.iter()
            .map(|(a, b)| [a.to_json(), b.to_json()])
            .collect::<Vec<_>>()
            .serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<(Value, Value)>, D::Error> {
        let raw = Vec::<[serde_json::Value; 2]>::deserialize(d)?;
        raw.iter()
            .map(|[a, b]| Ok((Value::from_json(a)?, Value::from_json(b)?)))
            .collect::<Result<_, String>>()
            .map_err(serde::de::Error::custom)
    }
}

/// A numeric interval with independently open or closed bounds.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Interval {
    #[serde(with = "json_decimal")]
    pub lo: Decimal,
    #[serde(with = "json_decimal")]
    pub hi: Decimal,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub lo_open: bool,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub hi_open: bool,
}

impl Interval {
    pub fn closed(lo: Decimal, hi: Decimal) -> Self {
        Interval { lo, hi, lo_open: false, hi_open: false }
    }

    /// `[lo, hi[`
    pub fn right_open(lo: Decimal, hi: Decimal) -> Self {
        Interval { lo, hi, lo_open: false, hi_open: true }
    }

    pub fn contains(&self, v: &Value) -> bool {
        let Some(x) = v.as_number() else {
            return false;
        };
        let above = if self.lo_open { x > self.lo } else { x >= self.lo };
        let below = if self.hi_open { x < self.hi } else { x <= self.hi };
        above && below
    }

    pub fn is_empty(&self) -> bool {
        self.lo > self.hi || (self.lo == self.hi && (self.lo_open || self.hi_open))
    }
}

/// Symmetric predicates over an unordered pair of values.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "when", rename_all = "snake_case")]
pub enum Predicate {
    /// `u = v`, where `null = null`.
    Equal,
    EqualNonNull,
    BothInInterval {
        #[serde(flatten)]
        interval: Interval,
    },
    /// One value in `first`, the other in `second`.
    CrossIntervals { first: Interval, second: Interval },
    EitherNull,
    BothNull,
    /// Both numeric with `|u - v| <= delta`.
    AbsDiffLeq {
        #[serde(with = "json_decimal")]
        delta: Decimal,
    },
    PairInSet {
        #[serde(with = "json_pairs")]
        pairs: Vec<(Value, Value)>,
    },
    Always,
}

impl Predicate {
    pub fn matches(&self, u: &Value, v: &Value) -> bool {
        match self {
            Predicate::Equal => u == v,
            Predicate::EqualNonNull => u == v && !u.is_null(),
            Predicate::BothInInterval { interval } => interval.contains(u) && interval.contains(v),
            Predicate::CrossIntervals { first, second } => {
                (first.contains(u) && second.contains(v)) || (first.contains(v) && second.contains(u))
            }
            Predicate::EitherNull => u.is_null() || v.is_null(),
            Predicate::BothNull => u.is_null() && v.is_null(),
            Predicate::AbsDiffLeq { delta } => match (u.as_number(), v.as_number()) {
                (Some(a), Some(b)) => (a - b).abs() <= *delta,
                _ => false,
            },
            Predicate::PairInSet { pairs } => pairs
                .iter()
                .any(|(a, b)| (a == u && b == v) || (a == v && b == u)),
            Predicate::Always => true,
        }
    }

    /// Whether no pair of values can ever satisfy this predicate.
    fn is_vacuous(&self) -> bool {
        match self {
            Predicate::BothInInterval { interval } => interval.is_empty(),
            Predicate::CrossIntervals { first, second } => first.is_empty() || second.is_empty(),
            Predicate::AbsDiffLeq { delta } => delta.is_sign_negative() && !delta.is_zero(),
            Predicate::PairInSet { pairs } => pairs.is_empty(),
            _ => false,
        }
    }

    /// Whether every pair matched by `self` is also matched by `earlier`.
    fn shadowed_by(&self, earlier: &Predicate) -> bool {
        use Predicate::*;
        match (earlier, self) {
            (Always, _) => true,
            (a, b) if a == b => true,
            (Equal, EqualNonNull) | (Equal, BothNull) | (EitherNull, BothNull) => true,
            _ => false,
        }
    }
}

/// On-disk form of a rule: predicate fields plus the resulting element name.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RuleSpec {
    #[serde(flatten)]
    pub predicate: Predicate,
    pub result: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LatticeSpec {
    pub elements: Vec<String>,
    #[serde(default)]
    pub covers: Vec<(String, String)>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AttributeSpec {
    pub name: String,
    pub lattice: LatticeSpec,
    pub rules: Vec<RuleSpec>,
}

/// The schema-context document as read from JSON.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ContextSpec {
    pub attributes: Vec<AttributeSpec>,
}

impl ContextSpec {
    pub fn from_json(text: &str) -> Result<Self, ContextError> {
        serde_json::from_str(text).map_err(|e| ContextError::Parse(e.to_string()))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("context spec serializes")
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ContextError {
    #[error("cannot parse context: {0}")]
    Parse(String),
    #[error("context is invalid: {0}")]
    Invalid(Issue),
    #[error("attribute `{attribute}`: equal values `{value}` compare to `{got}`, not the lattice top")]
    ReflexivityViolation {
        attribute: String,
        value: String,
        got: String,
    },
    #[error("expected {expected} values, found {found}")]
    ArityMismatch { expected: usize, found: usize },
    #[error("unknown attribute `{0}`")]
    UnknownAttribute(String),
    #[error("attribute `{attribute}` has no element `{element}`")]
    UnknownElement { attribute: String, element: String },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Severity {
    Fatal,
    Warning,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum IssueKind {
    NoAttributes,
    TooManyAttributes { count: usize },
    DuplicateAttribute,
    InvalidLattice { message: String },
    TrivialLattice,
    NotTotal,
    UnknownResult { element: String },
    UnreachableRule { rule: usize },
    Surjectivity { element: String },
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Issue {
    pub attribute: Option<String>,
    pub severity: Severity,
    #[serde(flatten)]
    pub kind: IssueKind,
}

impl fmt::Display for Issue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(a) = &self.attribute {
            write!(f, "attribute `{a}`: ")?;
        }
        match &self.kind {
            IssueKind::NoAttributes => f.write_str("no attributes declared"),
            IssueKind::TooManyAttributes { count } => {
                write!(f, "{count} attributes declared, at most {MAX_ATTRIBUTES} supported")
            }
            IssueKind::DuplicateAttribute => f.write_str("declared more than once"),
            IssueKind::InvalidLattice { message } => write!(f, "invalid lattice: {message}"),
            IssueKind::TrivialLattice => {
                f.write_str("one-element truth lattice; bottom and top must differ")
            }
            IssueKind::NotTotal => f.write_str("rule list does not end with an `always` rule"),
            IssueKind::UnknownResult { element } => {
                write!(f, "rule result `{element}` is not a lattice element")
            }
            IssueKind::UnreachableRule { rule } => write!(f, "rule {rule} can never match"),
            IssueKind::Surjectivity { element } => {
                write!(f, "no rule can produce element `{element}`")
            }
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct ValidationReport {
    pub issues: Vec<Issue>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.fatal().next().is_none()
    }

    pub fn fatal(&self) -> impl Iterator<Item = &Issue> {
        self.issues.iter().filter(|i| i.severity == Severity::Fatal)
    }

    pub fn warnings(&self) -> impl Iterator<Item = &Issue> {
        self.issues.iter().filter(|i| i.severity == Severity::Warning)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ComparabilityRule {
    pub predicate: Predicate,
    pub result: ElementId,
}

#[derive(Clone, Debug, PartialEq)]
pub struct AttributeContext {
    name: String,
    lattice: FiniteLattice,
    rules: Vec<ComparabilityRule>,
}

impl AttributeContext {
    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn lattice(&self) -> &FiniteLattice {
        &self.lattice
    }

    pub fn rules(&self) -> &[ComparabilityRule] {
        &self.rules
    }

    /// Evaluates the comparability function on the unordered pair `{u, v}`.
    pub fn compare(&self, u: &Value, v: &Value) -> Result<ElementId, ContextError> {
        let result = self
            .rules
            .iter()
            .find(|r| r.predicate.matches(u, v))
            .map(|r| r.result)
            .unwrap_or(self.lattice.bottom());
        if u == v && !u.is_null() && result != self.lattice.top() {
            return Err(ContextError::ReflexivityViolation {
                attribute: self.name.clone(),
                value: u.to_string(),
                got: self.lattice.name(result).to_string(),
            });
        }
        Ok(result)
    }
}

/// Checks a parsed context document. Fatal issues prevent building a
/// [`SchemaContext`]; warnings are informational.
pub fn validate_context(spec: &ContextSpec) -> ValidationReport {
    let mut issues = Vec::new();
    let mut push = |attribute: Option<&str>, severity, kind| {
        issues.push(Issue {
            attribute: attribute.map(str::to_string),
            severity,
            kind,
        })
    };
    if spec.attributes.is_empty() {
        push(None, Severity::Fatal, IssueKind::NoAttributes);
    }
    if spec.attributes.len() > MAX_ATTRIBUTES {
        push(
            None,
            Severity::Fatal,
            IssueKind::TooManyAttributes { count: spec.attributes.len() },
        );
    }
    let mut seen = HashSet::new();
    for attr in &spec.attributes {
        let name = Some(attr.name.as_str());
        if !seen.insert(attr.name.as_str()) {
            push(name, Severity::Fatal, IssueKind::DuplicateAttribute);
        }
        let lattice = match build_lattice(&attr.lattice) {
            Ok(l) => l,
            Err(e) => {
                push(
                    name,
                    Severity::Fatal,
                    IssueKind::InvalidLattice { message: e.to_string() },
                );
                continue;
            }
        };
        if lattice.len() < 2 {
            push(name, Severity::Fatal, IssueKind::TrivialLattice);
        }
        if !matches!(attr.rules.last(), Some(r) if r.predicate == Predicate::Always) {
            push(name, Severity::Fatal, IssueKind::NotTotal);
        }
        let mut produced = HashSet::new();
        for (i, rule) in attr.rules.iter().enumerate() {
            if lattice.element(&rule.result).is_none() {
                push(
                    name,
                    Severity::Fatal,
                    IssueKind::UnknownResult { element: rule.result.clone() },
                );
            }
            let shadowed = attr.rules[..i]
                .iter()
                .any(|earlier| rule.predicate.shadowed_by(&earlier.predicate));
            if shadowed || rule.predicate.is_vacuous() {
                push(name, Severity::Warning, IssueKind::UnreachableRule { rule: i });
            } else {
                produced.insert(rule.result.as_str());
            }
        }
        for element in lattice.names() {
            if !produced.contains(element.as_str()) {
                push(
                    name,
                    Severity::Warning,
                    IssueKind::Surjectivity { element: element.clone() },
                );
            }
        }
    }
    ValidationReport { issues }
}

fn build_lattice(spec: &LatticeSpec) -> Result<FiniteLattice, LatticeError> {
    let covers: Vec<(&str, &str)> = spec
        .covers
        .iter()
        .map(|(a, b)| (a.as_str(), b.as_str()))
        .collect();
    let names: Vec<&str> = spec.elements.iter().map(String::as_str).collect();
    FiniteLattice::from_covers(&names, &covers)
}

/// An ordered family of attribute contexts. The attribute order fixes the
/// coordinate order of every abstract tuple.
#[derive(Clone, Debug, PartialEq)]
pub struct SchemaContext {
    attributes: Vec<AttributeContext>,
}

impl SchemaContext {
    /// Validates `spec` and builds the context, failing on the first fatal
    /// issue.
    pub fn from_spec(spec: &ContextSpec) -> Result<Self, ContextError> {
        let report = validate_context(spec);
        if let Some(issue) = report.fatal().next() {
            return Err(ContextError::Invalid(issue.clone()));
        }
        let attributes = spec
            .attributes
            .iter()
            .map(|a| {
                let lattice = build_lattice(&a.lattice).expect("validated lattice");
                let rules = a
                    .rules
                    .iter()
                    .map(|r| ComparabilityRule {
                        predicate: r.predicate.clone(),
                        result: lattice.element(&r.result).expect("validated result"),
                    })
                    .collect();
                AttributeContext {
                    name: a.name.clone(),
                    lattice,
                    rules,
                }
            })
            .collect();
        Ok(SchemaContext { attributes })
    }

    pub fn from_json(text: &str) -> Result<Self, ContextError> {
        SchemaContext::from_spec(&ContextSpec::from_json(text)?)
    }

    /// A context over bare lattices whose comparability functions send equal
    /// values to the top and everything else to the bottom. Useful when only
    /// the product lattice matters.
    pub fn from_lattices<S: AsRef<str>>(
        names: &[S],
        lattices: Vec<FiniteLattice>,
    ) -> Result<Self, ContextError> {
        assert_eq!(names.len(), lattices.len());
        let spec = ContextSpec {
            attributes: names
                .iter()
                .zip(&lattices)
                .map(|(n, l)| AttributeSpec {
                    name: n.as_ref().to_string(),
                    lattice: LatticeSpec {
                        elements: l.names().to_vec(),
                        covers: l
                            .covers()
                            .iter()
                            .map(|&(a, b)| (l.name(a).to_string(), l.name(b).to_string()))
                            .collect(),
                    },
                    rules: vec![
                        RuleSpec {
                            predicate: Predicate::Equal,
                            result: l.name(l.top()).to_string(),
                        },
                        RuleSpec {
                            predicate: Predicate::Always,
                            result: l.name(l.bottom()).to_string(),
                        },
                    ],
                })
                .collect(),
        };
        SchemaContext::from_spec(&spec)
    }

    /// Reconstructs the document form of this context.
    pub fn to_spec(&self) -> ContextSpec {
        ContextSpec {
            attributes: self
                .attributes
                .iter()
                .map(|a| {
                    let l = &a.lattice;
                    AttributeSpec {
                        name: a.name.clone(),
                        lattice: LatticeSpec {
                            elements: l.names().to_vec(),
                            covers: l
                                .covers()
                                .iter()
                                .map(|&(x, y)| (l.name(x).to_string(), l.name(y).to_string()))
                                .collect(),
                        },
                        rules: a
                            .rules
                            .iter()
                            .map(|r| RuleSpec {
                                predicate: r.predicate.clone(),
                                result: l.name(r.result).to_string(),
                            })
                            .collect(),
                    }
                })
                .collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.attributes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.attributes.is_empty()
    }

    pub fn attributes(&self) -> &[AttributeContext] {
        &self.attributes
    }

    pub fn attribute(&self, i: usize) -> &AttributeContext {
        &self.attributes[i]
    }

    pub fn lattice(&self, i: usize) -> &FiniteLattice {
        &self.attributes[i].lattice
    }

    pub fn lattices(&self) -> impl Iterator<Item = &FiniteLattice> {
        self.attributes.iter().map(|a| &a.lattice)
    }

    pub fn attribute_names(&self) -> impl Iterator<Item = &str> {
        self.attributes.iter().map(|a| a.name.as_str())
    }

    pub fn attribute_index(&self, name: &str) -> Result<usize, ContextError> {
        self.attributes
            .iter()
            .position(|a| a.name == name)
            .ok_or_else(|| ContextError::UnknownAttribute(name.to_string()))
    }

    pub fn all_attributes(&self) -> AttrSet {
        AttrSet::full(self.len())
    }

    /// Parses a comma-separated attribute list such as `B,C`. An empty string
    /// is the empty set.
    pub fn parse_attr_set(&self, text: &str) -> Result<AttrSet, ContextError> {
        let mut set = AttrSet::empty();
        for name in text.split(',').map(str::trim).filter(|s| !s.is_empty()) {
            set.insert(self.attribute_index(name)?);
        }
        Ok(set)
    }

    pub fn format_attr_set(&self, set: AttrSet) -> String {
        set.iter()
            .map(|i| self.attributes[i].name.as_str())
            .collect::<Vec<_>>()
            .join(",")
    }

    /// Parses an abstract tuple written as element names in attribute order,
    /// e.g. `gb,d,i`. Angle brackets are optional.
    pub fn parse_tuple(&self, text: &str) -> Result<AbstractTuple, ContextError> {
        let inner = text
            .trim()
            .trim_start_matches(['<', '⟨'])
            .trim_end_matches(['>', '⟩']);
        let parts: Vec<&str> = inner.split(',').map(str::trim).collect();
        if parts.len() != self.len() {
            return Err(ContextError::ArityMismatch {
                expected: self.len(),
                found: parts.len(),
            });
        }
        parts
            .iter()
            .zip(&self.attributes)
            .map(|(p, a)| {
                a.lattice
                    .element(p)
                    .ok_or_else(|| ContextError::UnknownElement {
                        attribute: a.name.clone(),
                        element: p.to_string(),
                    })
            })
            .collect::<Result<Vec<_>, _>>()
            .map(AbstractTuple::new)
    }

    pub fn format_tuple(&self, x: &AbstractTuple) -> String {
        let parts: Vec<&str> = x
            .coords()
            .iter()
            .zip(&self.attributes)
            .map(|(&e, a)| a.lattice.name(e))
            .collect();
        format!("⟨{}⟩", parts.join(","))
    }

    pub fn element_names(&self, x: &AbstractTuple) -> Vec<String> {
        x.coords()
            .iter()
            .zip(&self.attributes)
            .map(|(&e, a)| a.lattice.name(e).to_string())
            .collect()
    }

    /// Coordinate-wise comparison of two tuples.
    pub fn compare_tuples(&self, t1: &Tuple, t2: &Tuple) -> Result<AbstractTuple, ContextError> {
        for t in [t1, t2] {
            if t.values.len() != self.len() {
                return Err(ContextError::ArityMismatch {
                    expected: self.len(),
                    found: t.values.len(),
                });
            }
        }
        self.attributes
            .iter()
            .zip(t1.values.iter().zip(&t2.values))
            .map(|(a, (u, v))| a.compare(u, v))
            .collect::<Result<Vec<_>, _>>()
            .map(AbstractTuple::new)
    }
}
