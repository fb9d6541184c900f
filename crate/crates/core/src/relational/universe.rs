use crate::lang::typed::{ColTy, SigId, SigInfo};
use std::collections::BTreeMap;

pub type AtomId = u32;

/// Finite set of atoms, grouped by signature. Declared signatures come first,
/// in declaration order, followed by the integers of the chosen bitwidth in
/// ascending order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Universe {
    names: Vec<String>,
    by_sig: Vec<Vec<AtomId>>,
    sig_of: Vec<SigId>,
    bitwidth: u32,
    int_base: AtomId,
}

/// Smallest and largest value representable at `bitwidth`.
pub fn int_range(bitwidth: u32) -> (i64, i64) {
    let half = 1i64 << (bitwidth - 1);
    (-half, half - 1)
}

/// Two's-complement wraparound into `bitwidth` bits.
pub fn wrap(v: i64, bitwidth: u32) -> i64 {
    let m = 1i64 << bitwidth;
    let (lo, _) = int_range(bitwidth);
    (v - lo).rem_euclid(m) + lo
}

/// Builds the universe: `scope` atoms for each ordinary signature (or the
/// per-signature override), one atom for each `one` signature, and every
/// integer of `bitwidth`.
pub fn build_universe(sigs: &[SigInfo], scope: usize, overrides: &BTreeMap<String, usize>, bitwidth: u32) -> Universe {
    assert!(
        scope >= 1 && (1..=16).contains(&bitwidth),
        "scope and bitwidth must be positive"
    );
    let mut names = Vec::new();
    let mut by_sig = Vec::new();
    let mut sig_of = Vec::new();
    let mut int_base = 0;
    for (id, s) in sigs.iter().enumerate() {
        let mut atoms = Vec::new();
        if s.int {
            int_base = names.len() as AtomId;
            let (lo, hi) = int_range(bitwidth);
            for v in lo..=hi {
                atoms.push(names.len() as AtomId);
                names.push(v.to_string());
                sig_of.push(id);
            }
        } else if s.one {
            atoms.push(names.len() as AtomId);
            names.push(s.name.clone());
            sig_of.push(id);
        } else {
            let n = overrides.get(&s.name).copied().unwrap_or(scope);
            for i in 0..n {
                atoms.push(names.len() as AtomId);
                names.push(format!("{}{i}", s.name));
                sig_of.push(id);
            }
        }
        by_sig.push(atoms);
    }
    Universe {
        names,
        by_sig,
        sig_of,
        bitwidth,
        int_base,
    }
}

impl Universe {
    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn atoms(&self) -> impl Iterator<Item = AtomId> {
        0..self.names.len() as AtomId
    }

    pub fn name(&self, a: AtomId) -> &str {
        &self.names[a as usize]
    }

    pub fn atom(&self, name: &str) -> Option<AtomId> {
        self.names.iter().position(|n| n == name).map(|i| i as AtomId)
    }

    pub fn sig_atoms(&self, sig: SigId) -> &[AtomId] {
        &self.by_sig[sig]
    }

    pub fn sig_of(&self, a: AtomId) -> SigId {
        self.sig_of[a as usize]
    }

    /// Atoms of a column type, in universe order.
    pub fn col_atoms(&self, c: &ColTy) -> Vec<AtomId> {
        let mut out: Vec<AtomId> = c.0.iter().flat_map(|&s| self.by_sig[s].iter().copied()).collect();
        out.sort_unstable();
        out
    }

    pub fn bitwidth(&self) -> u32 {
        self.bitwidth
    }

    pub fn wrap(&self, v: i64) -> i64 {
        wrap(v, self.bitwidth)
    }

    /// The atom for integer `v`, after wraparound.
    pub fn int_atom(&self, v: i64) -> AtomId {
        let (lo, _) = int_range(self.bitwidth);
        self.int_base + (self.wrap(v) - lo) as AtomId
    }

    pub fn int_value(&self, a: AtomId) -> Option<i64> {
        let (lo, hi) = int_range(self.bitwidth);
        let count = (hi - lo + 1) as AtomId;
        (a >= self.int_base && a < self.int_base + count).then(|| lo + (a - self.int_base) as i64)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sigs() -> Vec<SigInfo> {
        let s = |n: &str, one, int| SigInfo {
            name: n.into(),
            one,
            int,
        };
        vec![
            s("List", false, false),
            s("Node", false, false),
            s("null", true, false),
            s("Int", false, true),
        ]
    }

    #[test]
    fn list_universe_at_scope_three() {
        let u = build_universe(&sigs(), 3, &BTreeMap::new(), 4);
        let names: Vec<&str> = u.atoms().take(7).map(|a| u.name(a)).collect();
        assert_eq!(names, ["List0", "List1", "List2", "Node0", "Node1", "Node2", "null"]);
        assert_eq!(u.sig_atoms(3).len(), 16);
        assert_eq!(u.name(u.int_atom(-8)), "-8");
        assert_eq!(u.name(u.int_atom(7)), "7");
    }

    #[test]
    fn scope_one_and_overrides() {
        let u = build_universe(&sigs(), 1, &BTreeMap::from([("Node".to_string(), 2)]), 2);
        assert_eq!(u.sig_atoms(0).len(), 1);
        assert_eq!(u.sig_atoms(1).len(), 2);
        assert_eq!(
            u.sig_atoms(3)
                .iter()
                .map(|&a| u.int_value(a).unwrap())
                .collect::<Vec<_>>(),
            [-2, -1, 0, 1]
        );
    }

    #[test]
    fn wraparound() {
        assert_eq!(wrap(-9, 4), 7);
        assert_eq!(wrap(8, 4), -8);
        assert_eq!(wrap(3, 4), 3);
        assert_eq!(wrap(-8 - 1, 4), 7);
    }
}
