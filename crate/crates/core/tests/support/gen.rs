//! Random circuits and CNFs from a seeded generator.

use dynscope_core::sat::Cnf;
use dynscope_core::translate::{Circuit, Gate};
use rand::Rng;

/// A circuit over `leaves` inputs built from `gates` random operations on
/// earlier gates; the root is the last one.
pub fn circuit(rng: &mut impl Rng, leaves: u32, gates: usize) -> (Circuit, Gate) {
    let mut c = Circuit::new();
    let mut pool: Vec<Gate> = (0..leaves).map(|_| c.new_var()).collect();
    let pick = |rng: &mut dyn rand::RngCore, pool: &[Gate]| pool[rng.random_range(0..pool.len())];
    for _ in 0..gates {
        let (a, b, d) = (pick(rng, &pool), pick(rng, &pool), pick(rng, &pool));
        let g = match rng.random_range(0..7) {
            0 => c.not(a),
            1 => c.and2(a, b),
            2 => c.or2(a, b),
            3 => c.xor(a, b),
            4 => c.ite(a, b, d),
            5 => c.and([a, b, d]),
            _ => c.choice_or(a, b),
        };
        pool.push(g);
    }
    let root = *pool.last().expect("at least one leaf");
    (c, root)
}

pub fn three_cnf(rng: &mut impl Rng, vars: u32, clauses: usize) -> Cnf {
    let mut cnf = Cnf::new(vars);
    for _ in 0..clauses {
        let mut c = Vec::with_capacity(3);
        while c.len() < 3 {
            let v = rng.random_range(1..=vars as i32);
            if c.iter().any(|l: &i32| l.abs() == v) {
                continue;
            }
            c.push(if rng.random_bool(0.5) { v } else { -v });
        }
        cnf.add(c);
    }
    cnf
}
