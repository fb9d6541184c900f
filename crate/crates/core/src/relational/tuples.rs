use super::universe::{AtomId, Universe};
use std::collections::{BTreeMap, BTreeSet};

pub type Tuple = Vec<AtomId>;

/// A set of same-arity tuples, kept sorted so that equality and display
/// are canonical.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TupleSet {
    arity: usize,
    tuples: BTreeSet<Tuple>,
}

impl TupleSet {
    pub fn empty(arity: usize) -> Self {
        TupleSet {
            arity,
            tuples: BTreeSet::new(),
        }
    }

    pub fn from_tuples(arity: usize, tuples: impl IntoIterator<Item = Tuple>) -> Self {
        let tuples: BTreeSet<Tuple> = tuples.into_iter().collect();
        debug_assert!(tuples.iter().all(|t| t.len() == arity));
        TupleSet { arity, tuples }
    }

    pub fn atoms(atoms: impl IntoIterator<Item = AtomId>) -> Self {
        Self::from_tuples(1, atoms.into_iter().map(|a| vec![a]))
    }

    pub fn singleton(a: AtomId) -> Self {
        Self::atoms([a])
    }

    pub fn identity(atoms: impl IntoIterator<Item = AtomId>) -> Self {
        Self::from_tuples(2, atoms.into_iter().map(|a| vec![a, a]))
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn len(&self) -> usize {
        self.tuples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tuples.is_empty()
    }

    pub fn contains(&self, t: &[AtomId]) -> bool {
        self.tuples.contains(t)
    }

    pub fn insert(&mut self, t: Tuple) {
        debug_assert_eq!(t.len(), self.arity);
        self.tuples.insert(t);
    }

    pub fn iter(&self) -> impl Iterator<Item = &Tuple> {
        self.tuples.iter()
    }

    pub fn is_subset(&self, other: &TupleSet) -> bool {
        self.tuples.is_subset(&other.tuples)
    }

    pub fn union(&self, other: &TupleSet) -> TupleSet {
        TupleSet {
            arity: self.arity,
            tuples: self.tuples.union(&other.tuples).cloned().collect(),
        }
    }

    pub fn difference(&self, other: &TupleSet) -> TupleSet {
        TupleSet {
            arity: self.arity,
            tuples: self.tuples.difference(&other.tuples).cloned().collect(),
        }
    }

    pub fn intersection(&self, other: &TupleSet) -> TupleSet {
        TupleSet {
            arity: self.arity,
            tuples: self.tuples.intersection(&other.tuples).cloned().collect(),
        }
    }

    pub fn product(&self, other: &TupleSet) -> TupleSet {
        let mut out = TupleSet::empty(self.arity + other.arity);
        for a in &self.tuples {
            for b in &other.tuples {
                out.tuples.insert(a.iter().chain(b).copied().collect());
            }
        }
        out
    }

    /// Relational join: matches the last column of `self` with the first of `other`.
    pub fn join(&self, other: &TupleSet) -> TupleSet {
        let mut by_first: BTreeMap<AtomId, Vec<&Tuple>> = BTreeMap::new();
        for b in &other.tuples {
            by_first.entry(b[0]).or_default().push(b);
        }
        let mut out = TupleSet::empty(self.arity + other.arity - 2);
        for a in &self.tuples {
            let (last, prefix) = a.split_last().expect("join operand has arity >= 1");
            for b in by_first.get(last).into_iter().flatten() {
                out.tuples.insert(prefix.iter().chain(&b[1..]).copied().collect());
            }
        }
        out
    }

    /// `self ++ other`: tuples of `other`, plus those of `self` whose first
    /// atom is not a first atom of `other`.
    pub fn override_with(&self, other: &TupleSet) -> TupleSet {
        let replaced: BTreeSet<AtomId> = other.tuples.iter().map(|t| t[0]).collect();
        let mut out = other.clone();
        out.tuples
            .extend(self.tuples.iter().filter(|t| !replaced.contains(&t[0])).cloned());
        out
    }

    pub fn transpose(&self) -> TupleSet {
        TupleSet::from_tuples(2, self.tuples.iter().map(|t| vec![t[1], t[0]]))
    }

    /// Least transitive relation containing `self`, by iterated join until stable.
    pub fn closure(&self) -> TupleSet {
        let mut acc = self.clone();
        loop {
            let next = acc.union(&acc.join(self));
            if next.len() == acc.len() {
                return acc;
            }
            acc = next;
        }
    }

    /// `^r` plus the identity over every atom of `u`.
    pub fn reflexive_closure(&self, u: &Universe) -> TupleSet {
        self.closure().union(&TupleSet::identity(u.atoms()))
    }

    /// Atom names per tuple, in tuple order.
    pub fn names(&self, u: &Universe) -> Vec<Vec<String>> {
        self.tuples
            .iter()
            .map(|t| t.iter().map(|&a| u.name(a).to_string()).collect())
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pairs(ps: &[(u32, u32)]) -> TupleSet {
        TupleSet::from_tuples(2, ps.iter().map(|&(a, b)| vec![a, b]))
    }

    #[test]
    fn override_replaces_by_first_atom() {
        let header = pairs(&[(0, 3)]);
        assert_eq!(header.override_with(&pairs(&[(0, 6)])), pairs(&[(0, 6)]));
        let f = pairs(&[(0, 1), (1, 2)]);
        assert_eq!(f.override_with(&pairs(&[(1, 0)])), pairs(&[(0, 1), (1, 0)]));
    }

    #[test]
    fn closure_of_a_chain() {
        let next = pairs(&[(3, 4), (4, 5)]);
        assert_eq!(next.closure(), pairs(&[(3, 4), (3, 5), (4, 5)]));
        assert!(TupleSet::empty(2).closure().is_empty());
    }

    #[test]
    fn join_drops_the_matched_column() {
        let thiz = TupleSet::singleton(0);
        let header = pairs(&[(0, 3), (1, 4)]);
        assert_eq!(thiz.join(&header), TupleSet::singleton(3));
        assert_eq!(header.join(&TupleSet::singleton(4)), TupleSet::singleton(1));
    }
}
