//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails.

#[path = "../../core/tests/support/mod.rs"]
mod support;

use dynscope_cli::{cmd_check, RunConfig, EXIT_COUNTEREXAMPLE};
use dynscope_core::sat::{solve, to_cnf, SolveResult};
use dynscope_core::{
    check, check_soundness, check_unroll_sufficiency, evaluate_watch, load, Bounds, CheckOptions, Counterexample,
    TypedModel, ValueJson, Verdict,
};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};
use support::interp::{list_heaps, Oracle};
use support::{brute, gen, models_dir, read_model};

type Outcome = Result<String, String>;

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

const LIST_ASSERTION: &str = "removeLastCorrect";

fn model(name: &str) -> TypedModel {
    load(&read_model(name)).unwrap_or_else(|e| panic!("{name}: {e:?}"))
}

fn counterexample(m: &TypedModel, assertion: &str, bounds: &Bounds) -> Result<Option<Counterexample>, String> {
    let r = check(m, assertion, bounds, &CheckOptions::default()).map_err(|e| e.to_string())?;
    Ok(match r.verdict {
        Verdict::Valid => None,
        Verdict::Counterexample(cx) => Some(*cx),
    })
}

fn watch(m: &TypedModel, cx: &Counterexample, step: usize, expr: &str) -> Result<ValueJson, String> {
    evaluate_watch(m, cx, step, expr)
        .map(|w| w.value)
        .map_err(|e| format!("`{expr}` at step {step}: {e}"))
}

fn names(tuples: &[&[&str]]) -> ValueJson {
    ValueJson::Tuples(
        tuples
            .iter()
            .map(|t| t.iter().map(|s| s.to_string()).collect())
            .collect(),
    )
}

fn buggy_list_counterexample() -> Outcome {
    let t = Instant::now();
    let m = model("list_buggy.dal");
    let cx = counterexample(&m, LIST_ASSERTION, &Bounds::new(3, 3, 4))?.ok_or("buggy removeLast reported VALID")?;
    let elapsed = t.elapsed();
    let last = cx.states.len() - 1;
    let first_size = watch(&m, &cx, 0, "thiz.size")?;
    let last_size = watch(&m, &cx, last, "thiz.size")?;
    let header = watch(&m, &cx, last, "thiz.header")?;
    let reach = watch(&m, &cx, last, "thiz.header.*next - null")?;
    ensure!(
        first_size == ValueJson::Int(3),
        "initial thiz.size is {first_size:?}, expected 3"
    );
    ensure!(
        last_size == ValueJson::Int(2),
        "final thiz.size is {last_size:?}, expected 2"
    );
    ensure!(
        header == names(&[&["null"]]),
        "final thiz.header is {header:?}, expected null"
    );
    ensure!(
        reach == names(&[]),
        "final thiz.header.*next - null is {reach:?}, expected empty"
    );
    ensure!(elapsed < Duration::from_secs(60), "took {elapsed:?}");
    Ok(format!(
        "size 3 -> 2, header null, no reachable nodes, {} states, {elapsed:.1?}",
        cx.states.len()
    ))
}

fn fixed_model_valid() -> Outcome {
    let m = model("list_fixed.dal");
    let bounds = Bounds::new(3, 3, 4);
    let o = Oracle::new(&m, LIST_ASSERTION, &bounds);
    let heaps = list_heaps(&o);
    let n = heaps.len();
    ensure!(
        o.counterexample(heaps).is_none(),
        "interpreter oracle finds a counterexample to the fixed model"
    );
    let cx = counterexample(&m, LIST_ASSERTION, &bounds)?;
    ensure!(cx.is_none(), "SAT pipeline finds a counterexample the oracle does not");
    Ok(format!("oracle: no counterexample over {n} heaps; SAT: VALID"))
}

/// Loop-free and single-loop models checked against the interpreter.
const CORPUS: &[&str] = &[
    "c01_swap.dal",
    "c02_choice.dal",
    "c03_set.dal",
    "c04_if.dal",
    "c05_max.dal",
    "c06_abs.dal",
    "c07_count.dal",
    "c08_walk.dal",
    "c09_transfer.dal",
    "c10_calls.dal",
    "c11_pick.dal",
    "c12_blocking.dal",
];

fn corpus_bounds() -> Vec<Bounds> {
    let mut out = Vec::new();
    for scope in 1..=2 {
        for unroll in 1..=2 {
            out.push(Bounds::new(scope, unroll, 3));
        }
    }
    out
}

fn corpus_model(name: &str) -> TypedModel {
    model(&format!("corpus/{name}"))
}

fn oracle_equivalence() -> Outcome {
    let mut runs = 0;
    let (mut valid, mut invalid) = (0, 0);
    for file in CORPUS {
        let m = corpus_model(file);
        for a in &m.assertions {
            for b in corpus_bounds() {
                let expected = Oracle::new(&m, &a.name, &b).valid();
                let got = counterexample(&m, &a.name, &b)?.is_none();
                ensure!(
                    expected == got,
                    "{file} {} at scope {} unroll {}: interpreter says {}, SAT says {}",
                    a.name,
                    b.scope,
                    b.unroll,
                    if expected { "valid" } else { "invalid" },
                    if got { "valid" } else { "invalid" }
                );
                runs += 1;
                if got {
                    valid += 1;
                } else {
                    invalid += 1;
                }
            }
        }
    }
    ensure!(valid > 0 && invalid > 0, "corpus is one-sided");
    Ok(format!(
        "{} models, {runs} runs agree ({valid} valid, {invalid} counterexamples)",
        CORPUS.len()
    ))
}

fn lifting_soundness() -> Outcome {
    let mut traces = 0;
    let mut steps = 0;
    let mut violations = Vec::new();
    let mut audit = |m: &TypedModel, cx: &Counterexample| {
        traces += 1;
        steps += cx.steps.len();
        violations.extend(
            check_soundness(m, cx)
                .into_iter()
                .map(|v| format!("{}: {v}", cx.trace.assertion)),
        );
    };
    for file in CORPUS {
        let m = corpus_model(file);
        for a in &m.assertions {
            for b in corpus_bounds() {
                if let Some(cx) = counterexample(&m, &a.name, &b)? {
                    audit(&m, &cx);
                }
            }
        }
    }
    let m = model("list_buggy.dal");
    for unroll in 1..=3 {
        if let Some(cx) = counterexample(&m, LIST_ASSERTION, &Bounds::new(3, unroll, 4))? {
            audit(&m, &cx);
        }
    }
    ensure!(
        violations.is_empty(),
        "{} violations: {}",
        violations.len(),
        violations.join("; ")
    );
    ensure!(traces > 0, "no counterexamples to audit");
    Ok(format!("{traces} counterexamples, {steps} steps, 0 violations"))
}

fn desugaring_equivalence() -> Outcome {
    let pairs = [
        ("corpus/c04_if.dal", "corpus/c04_if_core.dal", 2),
        ("corpus/c05_max.dal", "corpus/c05_max_core.dal", 2),
        ("corpus/c06_abs.dal", "corpus/c06_abs_core.dal", 2),
        ("corpus/c07_count.dal", "corpus/c07_count_core.dal", 2),
        ("corpus/c08_walk.dal", "corpus/c08_walk_core.dal", 2),
        ("list_buggy.dal", "list_buggy_core.dal", 3),
    ];
    let mut compared = 0;
    for (sugared, core, scope) in pairs {
        let (ms, mc) = (model(sugared), model(core));
        for a in &ms.assertions {
            let b = Bounds::new(scope, scope, if scope == 3 { 4 } else { 3 });
            let s = counterexample(&ms, &a.name, &b)?;
            let c = counterexample(&mc, &a.name, &b)?;
            ensure!(s.is_some() == c.is_some(), "{sugared} {}: verdicts differ", a.name);
            if let (Some(s), Some(c)) = (s, c) {
                ensure!(
                    s.trace.snapshots == c.trace.snapshots,
                    "{sugared} {}: snapshots differ",
                    a.name
                );
            }
            compared += 1;
        }
    }
    Ok(format!("{} model pairs, {compared} assertions agree", pairs.len()))
}

fn sat_backend() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let mut projections = 0u64;
    let mut models_checked = 0;
    for i in 0..200 {
        let leaves = 1 + (i % 12) as u32;
        let (c, root) = gen::circuit(&mut rng, leaves, 3 + i % 20);
        let cnf = to_cnf(&c, root);
        for bits in 0u32..1 << leaves {
            let assignment = brute::leaves(leaves, bits);
            let want = c.evaluate(&assignment)[root.index()];
            let mut fixed = cnf.clone();
            for (v, &b) in assignment.iter().enumerate() {
                let lit = v as i32 + 1;
                fixed.add(vec![if b { lit } else { -lit }]);
            }
            let got = match solve(&fixed) {
                SolveResult::Sat(m) => {
                    ensure!(fixed.satisfied_by(&m), "circuit {i}: model violates its clauses");
                    models_checked += 1;
                    true
                }
                SolveResult::Unsat => false,
                SolveResult::Interrupted => return Err("solver interrupted".into()),
            };
            ensure!(got == want, "circuit {i}: CNF and circuit disagree at leaves {bits:b}");
            projections += 1;
        }
    }
    let (mut sat, mut unsat) = (0, 0);
    for i in 0..500 {
        let cnf = gen::three_cnf(&mut rng, 20, 80 + i % 11);
        let want = brute::cnf_sat(&cnf);
        let got = match solve(&cnf) {
            SolveResult::Sat(m) => {
                ensure!(cnf.satisfied_by(&m), "3-CNF {i}: model violates its clauses");
                models_checked += 1;
                true
            }
            SolveResult::Unsat => false,
            SolveResult::Interrupted => return Err("solver interrupted".into()),
        };
        ensure!(got == want, "3-CNF {i}: solver says {got}, enumeration says {want}");
        if got {
            sat += 1;
        } else {
            unsat += 1;
        }
    }
    ensure!(
        sat > 0 && unsat > 0,
        "3-CNF sample is one-sided ({sat} sat, {unsat} unsat)"
    );
    Ok(format!(
        "200 circuits up to 12 leaves ({projections} leaf assignments), 500 3-CNF ({sat} sat, {unsat} unsat), {models_checked} models re-checked"
    ))
}

fn determinism() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let run = |name: &str| -> Result<Vec<u8>, String> {
        let path = dir.path().join(name);
        let mut cfg = RunConfig::new(models_dir().join("list_buggy.dal"));
        cfg.assertion = Some(LIST_ASSERTION.into());
        cfg.trace_json = Some(path.clone());
        let (mut out, mut err) = (Vec::new(), Vec::new());
        let code = cmd_check(&cfg, &mut out, &mut err);
        ensure!(
            code == EXIT_COUNTEREXAMPLE,
            "exit code {code}: {}",
            String::from_utf8_lossy(&err)
        );
        std::fs::read(&path).map_err(|e| e.to_string())
    };
    let (a, b) = (run("a.json")?, run("b.json")?);
    ensure!(a == b, "trace JSON differs between runs");
    Ok(format!("{} bytes, identical", a.len()))
}

fn unroll_vacuity() -> Outcome {
    let m = model("list_buggy.dal");
    let opts = CheckOptions::default();
    let probe =
        |unroll| check_unroll_sufficiency(&m, LIST_ASSERTION, &Bounds::new(3, unroll, 4), &opts).map_err(|e| e.to_string());
    let (one, three) = (probe(1)?, probe(3)?);
    ensure!(one, "probe is false at unroll 1");
    ensure!(!three, "probe is true at unroll 3");
    Ok("true at unroll 1, false at unroll 3".into())
}

type Criterion = fn() -> Outcome;

fn main() {
    let criteria: [(&str, Criterion); 8] = [
        ("buggy list counterexample", buggy_list_counterexample),
        ("fixed model valid", fixed_model_valid),
        ("oracle equivalence", oracle_equivalence),
        ("lifting soundness", lifting_soundness),
        ("desugaring equivalence", desugaring_equivalence),
        ("SAT backend", sat_backend),
        ("determinism", determinism),
        ("unroll vacuity", unroll_vacuity),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let t = Instant::now();
        let result = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|p| {
            let msg = p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()));
            Err(format!("panicked: {}", msg.unwrap_or_default()))
        });
        match result {
            Ok(detail) => println!("criterion {} {name}: PASS ({detail}) [{:.1?}]", i + 1, t.elapsed()),
            Err(why) => {
                failed += 1;
                println!("criterion {} {name}: FAIL ({why}) [{:.1?}]", i + 1, t.elapsed());
            }
        }
    }
    if failed > 0 {
        std::process::exit(1);
    }
}
