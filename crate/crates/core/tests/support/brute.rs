//! Brute-force satisfiability by enumeration.

use dynscope_core::sat::Cnf;
use dynscope_core::translate::{Circuit, Gate};

/// Whether some assignment satisfies every clause. Clauses become bit
/// masks, so each candidate assignment is checked with a few word ops.
pub fn cnf_sat(cnf: &Cnf) -> bool {
    let n = cnf.num_vars;
    assert!(n <= 24, "too many variables to enumerate");
    let masks: Vec<(u32, u32)> = cnf
        .clauses
        .iter()
        .map(|c| {
            c.iter().fold((0, 0), |(pos, neg), &l| {
                let bit = 1u32 << (l.unsigned_abs() - 1);
                if l > 0 {
                    (pos | bit, neg)
                } else {
                    (pos, neg | bit)
                }
            })
        })
        .collect();
    (0u32..1 << n).any(|a| masks.iter().all(|&(pos, neg)| a & pos != 0 || !a & neg != 0))
}

/// Whether some leaf assignment makes `root` true.
pub fn circuit_sat(c: &Circuit, root: Gate) -> bool {
    let n = c.var_count();
    assert!(n <= 16);
    (0u32..1 << n).any(|bits| c.evaluate(&leaves(n, bits))[root.index()])
}

pub fn leaves(n: u32, bits: u32) -> Vec<bool> {
    (0..n).map(|i| bits >> i & 1 == 1).collect()
}
