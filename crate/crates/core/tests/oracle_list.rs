//! Expected verdicts for the list models, computed by exhaustive
//! interpretation over every heap of at most three nodes.

mod support;

use dynscope_core::lang::load;
use dynscope_core::translate::Bounds;
use support::interp::{list_heaps, Oracle};
use support::read_model;

#[test]
fn fixed_remove_last_has_no_counterexample_over_all_small_heaps() {
    let m = load(&read_model("list_fixed.dal")).unwrap();
    let o = Oracle::new(&m, "removeLastCorrect", &Bounds::new(3, 3, 4));
    let heaps = list_heaps(&o);
    assert_eq!(heaps.len(), 3 * 64 * 64 * 16);
    assert_eq!(o.counterexample(heaps), None);
}

#[test]
fn buggy_remove_last_fails_on_a_three_node_list() {
    let m = load(&read_model("list_buggy.dal")).unwrap();
    let o = Oracle::new(&m, "removeLastCorrect", &Bounds::new(3, 3, 4));
    let three = list_heaps(&o).into_iter().filter(|s| {
        let thiz = s["thiz"].iter().next().unwrap()[0];
        let size = s["size"].iter().find(|t| t[0] == thiz).unwrap()[1];
        o.u.int_value(size) == Some(3)
    });
    let (first, last) = o.counterexample(three).expect("a 3-node list loses its nodes");
    let thiz = first["thiz"].iter().next().unwrap()[0];
    let size_of = |s: &support::interp::State| o.u.int_value(s["size"].iter().find(|t| t[0] == thiz).unwrap()[1]);
    assert_eq!(size_of(&first), Some(3));
    assert_eq!(size_of(&last), Some(2));
    let null = o.u.atom("null").unwrap();
    assert!(last["header"].contains(&[thiz, null]));
}

/// Longest acyclic list reachable from a header, over all heaps with three
/// nodes: this is how many loop iterations removeLast can need.
#[test]
fn longest_list_needs_three_iterations() {
    let m = load(&read_model("list_buggy.dal")).unwrap();
    let o = Oracle::new(&m, "removeLastCorrect", &Bounds::new(3, 3, 4));
    let null = o.u.atom("null").unwrap();
    let mut longest = 0;
    for s in list_heaps(&o).iter().filter(|s| o.pre_holds(s)) {
        let thiz = s["thiz"].iter().next().unwrap()[0];
        let mut at = s["header"].iter().find(|t| t[0] == thiz).unwrap()[1];
        let mut len = 0;
        while at != null {
            len += 1;
            at = s["next"].iter().find(|t| t[0] == at).unwrap()[1];
        }
        longest = longest.max(len);
    }
    assert_eq!(longest, 3);
}
