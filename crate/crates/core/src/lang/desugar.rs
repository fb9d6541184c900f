//! Rewrites `if`, `while`, assignment, `skip`, and bare calls into the six
//! core constructs: atomic action, test, choice, sequence, iteration, and
//! program invocation.
//!
//! ```text
//! if B { P } else { Q }   =>  (B? ; P) + (!B? ; Q)
//! while B do { P }        =>  (B? ; P)* ; !B?
//! skip                    =>  true?
//! x := e                  =>  atomic action with post x' = e
//! ```

use super::ast::*;
use std::collections::HashSet;

pub fn desugar(m: &Model) -> Model {
    let actions: HashSet<&str> = m.actions.iter().map(|a| a.name.name.as_str()).collect();
    let mut out = m.clone();
    for p in &mut out.programs {
        p.body = desugar_program(&p.body, &actions);
    }
    for a in &mut out.assertions {
        a.program = desugar_program(&a.program, &actions);
    }
    out
}

/// True when `p` contains only core constructs.
pub fn is_core(p: &Program) -> bool {
    let mut ok = true;
    p.walk(&mut |n| ok &= n.is_core());
    ok
}

fn seq(a: Program, b: Program, span: Span) -> Program {
    Program::new(ProgramKind::Seq(Box::new(a), Box::new(b)), span)
}

fn test(f: Formula, span: Span) -> Program {
    Program::new(ProgramKind::Test(f), span)
}

pub fn desugar_program(p: &Program, actions: &HashSet<&str>) -> Program {
    let span = p.span;
    let kind = match &p.kind {
        ProgramKind::Atomic(a) => ProgramKind::Atomic(a.clone()),
        ProgramKind::Test(f) => ProgramKind::Test(f.clone()),
        ProgramKind::Invoke { name, args } => ProgramKind::Invoke {
            name: name.clone(),
            args: args.clone(),
        },
        ProgramKind::Choice(a, b) => ProgramKind::Choice(
            Box::new(desugar_program(a, actions)),
            Box::new(desugar_program(b, actions)),
        ),
        ProgramKind::Seq(a, b) => ProgramKind::Seq(
            Box::new(desugar_program(a, actions)),
            Box::new(desugar_program(b, actions)),
        ),
        ProgramKind::Star(b) => ProgramKind::Star(Box::new(desugar_program(b, actions))),
        ProgramKind::Call { name, args } => {
            if actions.contains(name.name.as_str()) {
                ProgramKind::Atomic(Atomic::Action {
                    name: name.clone(),
                    args: args.clone(),
                })
            } else {
                ProgramKind::Invoke {
                    name: name.clone(),
                    args: args.clone(),
                }
            }
        }
        ProgramKind::Assign { target, value } => ProgramKind::Atomic(Atomic::Assign {
            target: target.clone(),
            value: value.clone(),
        }),
        ProgramKind::Skip => {
            return test(Formula::truth(span), span).with_origin(Origin::Skip);
        }
        ProgramKind::If { cond, then, otherwise } => {
            let then_p = desugar_program(then, actions);
            let else_p = match otherwise {
                Some(o) => desugar_program(o, actions),
                None => test(Formula::truth(span), span).with_origin(Origin::Skip),
            };
            let guard = test(cond.clone(), cond.span).with_origin(Origin::IfThen(cond.clone()));
            let neg_guard = test(cond.clone().negate(), cond.span).with_origin(Origin::IfElse(cond.clone()));
            let left = seq(guard, then_p, then.span);
            let right_span = otherwise.as_ref().map_or(span, |o| o.span);
            let right = seq(neg_guard, else_p, right_span);
            return Program::new(ProgramKind::Choice(Box::new(left), Box::new(right)), span)
                .with_origin(Origin::If(cond.clone()));
        }
        ProgramKind::While { cond, body } => {
            let guard = test(cond.clone(), cond.span).with_origin(Origin::LoopGuard(cond.clone()));
            let iter = seq(guard, desugar_program(body, actions), body.span);
            let star = Program::new(ProgramKind::Star(Box::new(iter)), span).with_origin(Origin::Loop(cond.clone()));
            let exit = test(cond.clone().negate(), cond.span).with_origin(Origin::LoopExit(cond.clone()));
            return seq(star, exit, span).with_origin(Origin::While(cond.clone()));
        }
    };
    Program {
        kind,
        span,
        origin: p.origin.clone(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lang::parser::parse_model;
    use crate::lang::pretty::program;

    fn body(src: &str) -> Program {
        let m = parse_model(src).unwrap();
        desugar(&m).programs[0].body.clone()
    }

    #[test]
    fn if_becomes_guarded_choice() {
        let p = body("program p[x: A] { if x = x { x := x } else { skip } }");
        assert_eq!(program(&p), "([x = x]?; x := x) + ([!x = x]?; [true]?)");
        assert!(is_core(&p));
    }

    #[test]
    fn while_becomes_star_then_exit_test() {
        let p = body("program p[x: A] { while x = x do { x := x } }");
        assert_eq!(program(&p), "([x = x]?; x := x)*; [!x = x]?");
        let ProgramKind::Seq(star, exit) = &p.kind else {
            panic!()
        };
        assert!(matches!(star.kind, ProgramKind::Star(_)));
        assert!(matches!(exit.origin, Some(Origin::LoopExit(_))));
    }

    #[test]
    fn skip_is_test_true() {
        let p = body("program p[] { skip }");
        assert_eq!(p.kind, ProgramKind::Test(Formula::truth(p.span)));
    }

    #[test]
    fn calls_split_into_actions_and_invocations() {
        let p = body("action a[] { pre {} post {} } program p[] { a[]; q[] } program q[] { skip }");
        let ProgramKind::Seq(l, r) = &p.kind else { panic!() };
        assert!(matches!(l.kind, ProgramKind::Atomic(Atomic::Action { .. })));
        assert!(matches!(r.kind, ProgramKind::Invoke { .. }));
    }

    #[test]
    fn spans_come_from_the_sugar() {
        let src = "program p[x: A] { while x = x do { x := x } }";
        let p = body(src);
        let start = src.find("while").unwrap();
        assert_eq!(p.span, Span::new(start, src.len() - 2));
    }
}
