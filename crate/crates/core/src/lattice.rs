//! Explicit finite lattices declared by their Hasse diagram.
//!
//! A [`FiniteLattice`] is built once from a list of element names and cover
//! pairs. Construction computes the full order and materializes the meet and
//! join tables, so every query afterwards is a table lookup.

use std::collections::HashMap;
use std::fmt;

use thiserror::Error;

/// Index of an element inside one [`FiniteLattice`]. Ids are dense `0..len`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ElementId(pub u16);

impl ElementId {
    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for ElementId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#{}", self.0)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BoundKind {
    Meet,
    Join,
}

impl fmt::Display for BoundKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BoundKind::Meet => f.write_str("meet"),
            BoundKind::Join => f.write_str("join"),
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LatticeError {
    #[error("a lattice needs at least one element")]
    Empty,
    #[error("too many elements ({0}); at most {max} are supported", max = u16::MAX)]
    TooLarge(usize),
    #[error("element `{0}` is declared twice")]
    DuplicateElement(String),
    #[error("cover pair references undeclared element `{0}`")]
    UnknownElement(String),
    #[error("covers contain a cycle through `{0}` and `{1}`; not a partial order")]
    NotAPartialOrder(String, String),
    #[error("no unique bottom element; minimal elements are {0:?}")]
    NoUniqueBottom(Vec<String>),
    #[error("no unique top element; maximal elements are {0:?}")]
    NoUniqueTop(Vec<String>),
    #[error("`{x}` and `{y}` have no {kind}: candidates {candidates:?}")]
    NotALattice {
        x: String,
        y: String,
        kind: BoundKind,
        candidates: Vec<String>,
    },
}

/// A co-prime element together with its prime partner.
///
/// The up-set of `coprime` and the down-set of `prime` partition the lattice.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct CoprimePrimePair {
    pub coprime: ElementId,
    pub prime: ElementId,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Irreducibles {
    pub atoms: Vec<ElementId>,
    pub meet_irreducible: Vec<ElementId>,
    pub join_irreducible: Vec<ElementId>,
}

#[derive(Clone, Debug)]
pub struct FiniteLattice {
    names: Vec<String>,
    index: HashMap<String, ElementId>,
    covers: Vec<(ElementId, ElementId)>,
    leq: Vec<bool>,
    meet: Vec<ElementId>,
    join: Vec<ElementId>,
    bottom: ElementId,
    top: ElementId,
    pairs: Vec<CoprimePrimePair>,
}

impl PartialEq for FiniteLattice {
    fn eq(&self, other: &Self) -> bool {
        self.names == other.names && self.leq == other.leq
    }
}

impl Eq for FiniteLattice {}

impl FiniteLattice {
    /// Builds and validates a lattice from element names and `(lower, upper)`
    /// cover pairs. The cover list does not need to be transitively reduced.
    pub fn from_covers<S: AsRef<str>>(
        names: &[S],
        covers: &[(S, S)],
    ) -> Result<Self, LatticeError> {
        let k = names.len();
        if k == 0 {
            return Err(LatticeError::Empty);
        }
        if k > u16::MAX as usize {
            return Err(LatticeError::TooLarge(k));
        }
        let mut index = HashMap::with_capacity(k);
        let names: Vec<String> = names.iter().map(|n| n.as_ref().to_string()).collect();
        for (i, name) in names.iter().enumerate() {
            if index.insert(name.clone(), ElementId(i as u16)).is_some() {
                return Err(LatticeError::DuplicateElement(name.clone()));
            }
        }
        let lookup = |n: &str| {
            index
                .get(n)
                .copied()
                .ok_or_else(|| LatticeError::UnknownElement(n.to_string()))
        };
        let mut edges = Vec::with_capacity(covers.len());
        for (lo, hi) in covers {
            let (lo, hi) = (lookup(lo.as_ref())?, lookup(hi.as_ref())?);
            if lo == hi {
                return Err(LatticeError::NotAPartialOrder(
                    names[lo.index()].clone(),
                    names[hi.index()].clone(),
                ));
            }
            edges.push((lo, hi));
        }

        // reflexive-transitive closure
        let mut leq = vec![false; k * k];
        for i in 0..k {
            leq[i * k + i] = true;
        }
        for &(lo, hi) in &edges {
            leq[lo.index() * k + hi.index()] = true;
        }
        for m in 0..k {
            for i in 0..k {
                if !leq[i * k + m] {
                    continue;
                }
                for j in 0..k {
                    if leq[m * k + j] {
                        leq[i * k + j] = true;
                    }
                }
            }
        }
        for i in 0..k {
            for j in (i + 1)..k {
                if leq[i * k + j] && leq[j * k + i] {
                    return Err(LatticeError::NotAPartialOrder(
                        names[i].clone(),
                        names[j].clone(),
                    ));
                }
            }
        }

        let le = |a: usize, b: usize| leq[a * k + b];
        let mut meet = vec![ElementId(0); k * k];
        let mut join = vec![ElementId(0); k * k];
        let mut missing_meet = false;
        let mut missing_join = false;
        for x in 0..k {
            for y in x..k {
                let lower: Vec<usize> = (0..k).filter(|&z| le(z, x) && le(z, y)).collect();
                let maximal: Vec<usize> = lower
                    .iter()
                    .copied()
                    .filter(|&z| !lower.iter().any(|&w| w != z && le(z, w)))
                    .collect();
                let upper: Vec<usize> = (0..k).filter(|&z| le(x, z) && le(y, z)).collect();
                let minimal: Vec<usize> = upper
                    .iter()
                    .copied()
                    .filter(|&z| !upper.iter().any(|&w| w != z && le(w, z)))
                    .collect();
                for (kind, bounds) in [(BoundKind::Meet, &maximal), (BoundKind::Join, &minimal)] {
                    if bounds.len() > 1 {
                        return Err(LatticeError::NotALattice {
                            x: names[x].clone(),
                            y: names[y].clone(),
                            kind,
                            candidates: bounds.iter().map(|&z| names[z].clone()).collect(),
                        });
                    }
                }
                match maximal.first() {
                    Some(&m) => {
                        meet[x * k + y] = ElementId(m as u16);
                        meet[y * k + x] = ElementId(m as u16);
                    }
                    None => missing_meet = true,
                }
                match minimal.first() {
                    Some(&j) => {
                        join[x * k + y] = ElementId(j as u16);
                        join[y * k + x] = ElementId(j as u16);
                    }
                    None => missing_join = true,
                }
            }
        }

        let minimal: Vec<usize> = (0..k)
            .filter(|&x| !(0..k).any(|y| y != x && le(y, x)))
            .collect();
        if minimal.len() != 1 || missing_meet {
            return Err(LatticeError::NoUniqueBottom(
                minimal.iter().map(|&z| names[z].clone()).collect(),
            ));
        }
        let maximal: Vec<usize> = (0..k)
            .filter(|&x| !(0..k).any(|y| y != x && le(x, y)))
            .collect();
        if maximal.len() != 1 || missing_join {
            return Err(LatticeError::NoUniqueTop(
                maximal.iter().map(|&z| names[z].clone()).collect(),
            ));
        }

        // keep only true covers (transitive reduction) in declaration order
        let mut covers = Vec::new();
        for lo in 0..k {
            for hi in 0..k {
                if lo != hi
                    && le(lo, hi)
                    && !(0..k).any(|m| m != lo && m != hi && le(lo, m) && le(m, hi))
                {
                    covers.push((ElementId(lo as u16), ElementId(hi as u16)));
                }
            }
        }

        let mut lattice = FiniteLattice {
            names,
            index,
            covers,
            leq,
            meet,
            join,
            bottom: ElementId(minimal[0] as u16),
            top: ElementId(maximal[0] as u16),
            pairs: Vec::new(),
        };
        lattice.pairs = lattice.compute_coprime_prime_pairs();
        Ok(lattice)
    }

    /// The `k`-element chain `names[0] < names[1] < ...`.
    pub fn chain<S: AsRef<str>>(names: &[S]) -> Result<Self, LatticeError> {
        let covers: Vec<(&str, &str)> = names
            .windows(2)
            .map(|w| (w[0].as_ref(), w[1].as_ref()))
            .collect();
        let names: Vec<&str> = names.iter().map(|s| s.as_ref()).collect();
        FiniteLattice::from_covers(&names, &covers)
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.names.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn elements(&self) -> impl Iterator<Item = ElementId> + '_ {
        (0..self.len()).map(|i| ElementId(i as u16))
    }

    pub fn name(&self, x: ElementId) -> &str {
        &self.names[x.index()]
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn element(&self, name: &str) -> Option<ElementId> {
        self.index.get(name).copied()
    }

    /// Cover pairs `(lower, upper)` of the Hasse diagram.
    pub fn covers(&self) -> &[(ElementId, ElementId)] {
        &self.covers
    }

    #[inline]
    pub fn bottom(&self) -> ElementId {
        self.bottom
    }

    #[inline]
    pub fn top(&self) -> ElementId {
        self.top
    }

    #[inline]
    pub fn leq(&self, x: ElementId, y: ElementId) -> bool {
        self.leq[x.index() * self.len() + y.index()]
    }

    #[inline]
    pub fn meet(&self, x: ElementId, y: ElementId) -> ElementId {
        self.meet[x.index() * self.len() + y.index()]
    }

    #[inline]
    pub fn join(&self, x: ElementId, y: ElementId) -> ElementId {
        self.join[x.index() * self.len() + y.index()]
    }

    pub fn meet_all<I: IntoIterator<Item = ElementId>>(&self, xs: I) -> ElementId {
        xs.into_iter().fold(self.top, |acc, x| self.meet(acc, x))
    }

    pub fn join_all<I: IntoIterator<Item = ElementId>>(&self, xs: I) -> ElementId {
        xs.into_iter().fold(self.bottom, |acc, x| self.join(acc, x))
    }

    pub fn up_set(&self, x: ElementId) -> Vec<ElementId> {
        self.elements().filter(|&y| self.leq(x, y)).collect()
    }

    pub fn down_set(&self, x: ElementId) -> Vec<ElementId> {
        self.elements().filter(|&y| self.leq(y, x)).collect()
    }

    fn upper_covers(&self, x: ElementId) -> impl Iterator<Item = ElementId> + '_ {
        self.covers
            .iter()
            .filter(move |&&(lo, _)| lo == x)
            .map(|&(_, hi)| hi)
    }

    fn lower_covers(&self, x: ElementId) -> impl Iterator<Item = ElementId> + '_ {
        self.covers
            .iter()
            .filter(move |&&(_, hi)| hi == x)
            .map(|&(lo, _)| lo)
    }

    /// Atoms, meet-irreducibles and join-irreducibles.
    ///
    /// An element is meet-irreducible when it has exactly one upper cover,
    /// join-irreducible when it has exactly one lower cover; so the top is
    /// never meet-irreducible and the bottom never join-irreducible.
    pub fn irreducibles(&self) -> Irreducibles {
        Irreducibles {
            atoms: self.upper_covers(self.bottom).collect(),
            meet_irreducible: self
                .elements()
                .filter(|&x| self.upper_covers(x).count() == 1)
                .collect(),
            join_irreducible: self
                .elements()
                .filter(|&x| self.lower_covers(x).count() == 1)
                .collect(),
        }
    }

    pub fn atoms(&self) -> Vec<ElementId> {
        self.upper_covers(self.bottom).collect()
    }

    // `c` is co-prime iff {x : x ≱ c} is closed under joins, i.e. its join
    // still lies outside the up-set of `c`. That join is then the partner prime.
    fn compute_coprime_prime_pairs(&self) -> Vec<CoprimePrimePair> {
        self.elements()
            .filter(|&c| c != self.bottom)
            .filter_map(|c| {
                let p = self.join_all(self.elements().filter(|&x| !self.leq(c, x)));
                (!self.leq(c, p)).then_some(CoprimePrimePair { coprime: c, prime: p })
            })
            .collect()
    }

    /// Co-prime/prime pairs in declaration order of the co-primes.
    pub fn coprime_prime_pairs(&self) -> &[CoprimePrimePair] {
        &self.pairs
    }

    pub fn coprimes(&self) -> impl Iterator<Item = ElementId> + '_ {
        self.pairs.iter().map(|p| p.coprime)
    }

    pub fn primes(&self) -> impl Iterator<Item = ElementId> + '_ {
        self.pairs.iter().map(|p| p.prime)
    }

    pub fn is_coprime(&self, x: ElementId) -> bool {
        self.pairs.iter().any(|p| p.coprime == x)
    }

    pub fn prime_partner(&self, coprime: ElementId) -> Option<ElementId> {
        self.pairs
            .iter()
            .find(|p| p.coprime == coprime)
            .map(|p| p.prime)
    }

    /// Co-primes that are not strictly below another co-prime.
    pub fn maximal_coprimes(&self) -> Vec<ElementId> {
        let cs: Vec<ElementId> = self.coprimes().collect();
        cs.iter()
            .copied()
            .filter(|&c| !cs.iter().any(|&d| d != c && self.leq(c, d)))
            .collect()
    }

    /// Join of all co-primes; `None` when the lattice has none.
    pub fn join_of_coprimes(&self) -> Option<ElementId> {
        (!self.pairs.is_empty()).then(|| self.join_all(self.coprimes()))
    }

    /// Meet of all primes; `None` when the lattice has none.
    pub fn meet_of_primes(&self) -> Option<ElementId> {
        (!self.pairs.is_empty()).then(|| self.meet_all(self.primes()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn diamond() -> FiniteLattice {
        FiniteLattice::from_covers(
            &["b", "u", "gb", "g"],
            &[("b", "u"), ("b", "gb"), ("u", "g"), ("gb", "g")],
        )
        .unwrap()
    }

    fn m3() -> FiniteLattice {
        FiniteLattice::from_covers(
            &["0", "a", "b", "c", "1"],
            &[
                ("0", "a"),
                ("0", "b"),
                ("0", "c"),
                ("a", "1"),
                ("b", "1"),
                ("c", "1"),
            ],
        )
        .unwrap()
    }

    fn id(l: &FiniteLattice, n: &str) -> ElementId {
        l.element(n).unwrap()
    }

    #[test]
    fn diamond_meets_and_joins() {
        let l = diamond();
        assert_eq!(l.bottom(), id(&l, "b"));
        assert_eq!(l.top(), id(&l, "g"));
        assert_eq!(l.meet(id(&l, "gb"), id(&l, "u")), id(&l, "b"));
        assert_eq!(l.join(id(&l, "gb"), id(&l, "u")), id(&l, "g"));
        for x in l.elements() {
            assert_eq!(l.meet(x, x), x);
            assert_eq!(l.meet(x, l.top()), x);
            assert_eq!(l.join(x, l.bottom()), x);
        }
    }

    #[test]
    fn one_element_lattice() {
        let l = FiniteLattice::from_covers(&["x"], &[]).unwrap();
        assert_eq!(l.bottom(), l.top());
        assert_eq!(l.irreducibles(), Irreducibles::default());
        assert!(l.coprime_prime_pairs().is_empty());
    }

    #[test]
    fn chain_meet_and_irreducibles() {
        let l = FiniteLattice::chain(&["i", "u", "c"]).unwrap();
        assert_eq!(l.meet(id(&l, "c"), id(&l, "u")), id(&l, "u"));
        let irr = l.irreducibles();
        assert_eq!(irr.atoms, vec![id(&l, "u")]);
        assert_eq!(irr.meet_irreducible, vec![id(&l, "i"), id(&l, "u")]);
        assert_eq!(irr.join_irreducible, vec![id(&l, "u"), id(&l, "c")]);
    }

    #[test]
    fn diamond_atoms() {
        let l = diamond();
        assert_eq!(l.atoms(), vec![id(&l, "u"), id(&l, "gb")]);
    }

    #[test]
    fn m3_join_and_no_coprimes() {
        let l = m3();
        assert_eq!(l.join(id(&l, "a"), id(&l, "b")), id(&l, "1"));
        assert!(l.coprime_prime_pairs().is_empty());
        assert_eq!(l.join_of_coprimes(), None);
    }

    #[test]
    fn two_chain_pair() {
        let l = FiniteLattice::chain(&["0", "1"]).unwrap();
        assert_eq!(
            l.coprime_prime_pairs(),
            &[CoprimePrimePair {
                coprime: id(&l, "1"),
                prime: id(&l, "0")
            }]
        );
    }

    #[test]
    fn square_pairs_are_complementary() {
        let l = FiniteLattice::from_covers(
            &["bot", "a", "na", "top"],
            &[("bot", "a"), ("bot", "na"), ("a", "top"), ("na", "top")],
        )
        .unwrap();
        assert_eq!(
            l.coprime_prime_pairs(),
            &[
                CoprimePrimePair {
                    coprime: id(&l, "a"),
                    prime: id(&l, "na")
                },
                CoprimePrimePair {
                    coprime: id(&l, "na"),
                    prime: id(&l, "a")
                },
            ]
        );
    }

    #[test]
    fn missing_meet_reports_the_pair() {
        let err = FiniteLattice::from_covers(
            &["bot", "a", "b", "c", "d", "top"],
            &[
                ("bot", "c"),
                ("bot", "d"),
                ("c", "a"),
                ("c", "b"),
                ("d", "a"),
                ("d", "b"),
                ("a", "top"),
                ("b", "top"),
            ],
        )
        .unwrap_err();
        match err {
            LatticeError::NotALattice { x, y, kind, .. } => {
                assert_eq!((x.as_str(), y.as_str(), kind), ("a", "b", BoundKind::Meet));
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn construction_errors() {
        assert_eq!(
            FiniteLattice::from_covers::<&str>(&[], &[]).unwrap_err(),
            LatticeError::Empty
        );
        assert!(matches!(
            FiniteLattice::from_covers(&["a", "a"], &[]),
            Err(LatticeError::DuplicateElement(_))
        ));
        assert!(matches!(
            FiniteLattice::from_covers(&["a"], &[("a", "z")]),
            Err(LatticeError::UnknownElement(_))
        ));
        assert!(matches!(
            FiniteLattice::from_covers(&["a", "b"], &[("a", "b"), ("b", "a")]),
            Err(LatticeError::NotAPartialOrder(..))
        ));
        assert!(matches!(
            FiniteLattice::from_covers(&["a", "b"], &[]),
            Err(LatticeError::NoUniqueBottom(_))
        ));
        assert!(matches!(
            FiniteLattice::from_covers(&["z", "a", "b"], &[("z", "a"), ("z", "b")]),
            Err(LatticeError::NoUniqueTop(_))
        ));
    }

    #[test]
    fn redundant_cover_pairs_are_reduced() {
        let l = FiniteLattice::from_covers(&["0", "m", "1"], &[("0", "m"), ("m", "1"), ("0", "1")])
            .unwrap();
        assert_eq!(l.covers().len(), 2);
    }
}
