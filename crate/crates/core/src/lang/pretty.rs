//! Canonical text form of the surface syntax. The output reparses to the
//! same tree (spans aside).

use super::ast::*;
use std::fmt::Write;

pub fn pretty_model(m: &Model) -> String {
    let mut out = String::new();
    for s in &m.sigs {
        let kw = if s.mult == SigMult::One { "one sig" } else { "sig" };
        let _ = writeln!(out, "{kw} {} {{}}", s.name.name);
    }
    for p in &m.preds {
        let _ = writeln!(
            out,
            "\npred {}[{}] {{\n  {}\n}}",
            p.name.name,
            params(&p.params),
            formula(&p.body)
        );
    }
    for a in &m.actions {
        let _ = writeln!(
            out,
            "\naction {}[{}] {{\n  pre {{ {} }}\n  post {{ {} }}\n}}",
            a.name.name,
            params(&a.params),
            formula(&a.pre),
            formula(&a.post)
        );
    }
    for p in &m.programs {
        let _ = write!(out, "\nprogram {}[{}]", p.name.name, params(&p.params));
        if !p.locals.is_empty() {
            let _ = write!(out, " var [{}]", params(&p.locals));
        }
        let _ = writeln!(out, " {{\n  {}\n}}", program(&p.body));
    }
    for a in &m.assertions {
        let _ = writeln!(
            out,
            "\nassertCorrectness {}[{}] {{\n  pre {{ {} }}\n  program {{ {} }}\n  post {{ {} }}\n}}",
            a.name.name,
            params(&a.params),
            formula(&a.pre),
            program(&a.program),
            formula(&a.post)
        );
    }
    out
}

fn params(ps: &[Param]) -> String {
    ps.iter()
        .map(|p| format!("{}: {}", p.name.name, rel_type(&p.ty)))
        .collect::<Vec<_>>()
        .join(", ")
}

pub fn rel_type(t: &RelType) -> String {
    let mut s = format!("{}{}", col_mult(t.domain_mult), col_type(&t.domain));
    if let Some((m, r)) = &t.range {
        let _ = write!(s, " -> {}{}", col_mult(*m), col_type(r));
    }
    s
}

fn col_mult(m: ColMult) -> &'static str {
    match m {
        ColMult::Implicit => "",
        ColMult::One => "one ",
        ColMult::Set => "set ",
    }
}

fn col_type(c: &ColType) -> String {
    let names: Vec<&str> = c.sigs.iter().map(|s| s.name.as_str()).collect();
    if names.len() == 1 {
        names[0].to_string()
    } else {
        format!("({})", names.join("+"))
    }
}

// -- programs ---------------------------------------------------------------

const P_SEQ: u8 = 1;
const P_ASSIGN: u8 = 2;
const P_CHOICE: u8 = 3;
const P_STAR: u8 = 5;
const P_ATOM: u8 = 6;

pub fn program(p: &Program) -> String {
    let mut s = String::new();
    write_program(&mut s, p, 0);
    s
}

fn prog_prec(p: &Program) -> u8 {
    match &p.kind {
        ProgramKind::Seq(..) => P_SEQ,
        ProgramKind::Choice(..) => P_CHOICE,
        ProgramKind::Star(_) => P_STAR,
        ProgramKind::Assign { .. } | ProgramKind::Atomic(Atomic::Assign { .. }) => P_ASSIGN,
        _ => P_ATOM,
    }
}

fn write_program(out: &mut String, p: &Program, min: u8) {
    let parens = prog_prec(p) < min;
    if parens {
        out.push('(');
    }
    match &p.kind {
        ProgramKind::Seq(a, b) => {
            write_program(out, a, P_SEQ);
            out.push_str("; ");
            write_program(out, b, P_SEQ + 1);
        }
        ProgramKind::Choice(a, b) => {
            write_program(out, a, P_CHOICE);
            out.push_str(" + ");
            write_program(out, b, P_CHOICE + 1);
        }
        ProgramKind::Star(b) => {
            write_program(out, b, P_STAR);
            out.push('*');
        }
        ProgramKind::Test(f) => {
            let _ = write!(out, "[{}]?", formula(f));
        }
        ProgramKind::Atomic(Atomic::Action { name, args })
        | ProgramKind::Invoke { name, args }
        | ProgramKind::Call { name, args } => {
            let args: Vec<&str> = args.iter().map(|a| a.name.as_str()).collect();
            let _ = write!(out, "{}[{}]", name.name, args.join(", "));
        }
        ProgramKind::Atomic(Atomic::Assign { target, value }) | ProgramKind::Assign { target, value } => {
            let _ = write!(out, "{} := {}", target.name, expr(value));
        }
        ProgramKind::Skip => out.push_str("skip"),
        ProgramKind::If { cond, then, otherwise } => {
            let _ = write!(out, "if {} {{ {} }}", formula(cond), program(then));
            match otherwise {
                Some(o) if matches!(o.kind, ProgramKind::If { .. }) => {
                    out.push_str(" else ");
                    write_program(out, o, 0);
                }
                Some(o) => {
                    let _ = write!(out, " else {{ {} }}", program(o));
                }
                None => {}
            }
        }
        ProgramKind::While { cond, body } => {
            let _ = write!(out, "while {} do {{ {} }}", formula(cond), program(body));
        }
    }
    if parens {
        out.push(')');
    }
}

// -- formulas ---------------------------------------------------------------

const F_QUANT: u8 = 0;
const F_OR: u8 = 1;
const F_IFF: u8 = 2;
const F_IMPLIES: u8 = 3;
const F_AND: u8 = 4;
const F_NOT: u8 = 5;
const F_ATOM: u8 = 6;

pub fn formula(f: &Formula) -> String {
    let mut s = String::new();
    write_formula(&mut s, f, 0);
    s
}

fn formula_prec(f: &Formula) -> u8 {
    match &f.kind {
        FormulaKind::Quant { .. } => F_QUANT,
        FormulaKind::Or(..) => F_OR,
        FormulaKind::Iff(..) => F_IFF,
        FormulaKind::Implies(..) => F_IMPLIES,
        FormulaKind::And(..) => F_AND,
        FormulaKind::Not(_) => F_NOT,
        _ => F_ATOM,
    }
}

fn write_formula(out: &mut String, f: &Formula, min: u8) {
    let parens = formula_prec(f) < min;
    if parens {
        out.push('(');
    }
    let bin = |out: &mut String, a: &Formula, op: &str, b: &Formula, lmin: u8, rmin: u8| {
        write_formula(out, a, lmin);
        let _ = write!(out, " {op} ");
        write_formula(out, b, rmin);
    };
    match &f.kind {
        FormulaKind::True => out.push_str("true"),
        FormulaKind::False => out.push_str("false"),
        FormulaKind::Not(a) => {
            out.push('!');
            write_formula(out, a, F_NOT);
        }
        FormulaKind::And(a, b) => bin(out, a, "and", b, F_AND, F_AND + 1),
        FormulaKind::Or(a, b) => bin(out, a, "or", b, F_OR, F_OR + 1),
        FormulaKind::Iff(a, b) => bin(out, a, "<=>", b, F_IFF, F_IFF + 1),
        FormulaKind::Implies(a, b) => bin(out, a, "=>", b, F_IMPLIES + 1, F_IMPLIES),
        FormulaKind::Cmp(op, a, b) => {
            let _ = write!(out, "{} {} {}", expr(a), op.symbol(), expr(b));
        }
        FormulaKind::Mult(m, e) => {
            let _ = write!(out, "{} {}", m.keyword(), expr(e));
        }
        FormulaKind::Quant {
            quant,
            var,
            bound,
            body,
        } => {
            let q = match quant {
                Quant::All => "all",
                Quant::Some => "some",
            };
            let _ = write!(out, "{q} {}: {} | ", var.name, expr(bound));
            write_formula(out, body, F_OR);
        }
        FormulaKind::PredCall { name, args } => {
            let args: Vec<String> = args.iter().map(expr).collect();
            let _ = write!(out, "{}[{}]", name.name, args.join(", "));
        }
    }
    if parens {
        out.push(')');
    }
}

// -- expressions ------------------------------------------------------------

const E_UNION: u8 = 1;
const E_CARD: u8 = 2;
const E_OVERRIDE: u8 = 3;
const E_INTER: u8 = 4;
const E_PRODUCT: u8 = 5;
const E_JOIN: u8 = 6;
const E_UNARY: u8 = 7;
const E_ATOM: u8 = 8;

pub fn expr(e: &Expr) -> String {
    let mut s = String::new();
    write_expr(&mut s, e, 0);
    s
}

fn bin_prec(op: BinOp) -> u8 {
    match op {
        BinOp::Union | BinOp::Diff => E_UNION,
        BinOp::Override => E_OVERRIDE,
        BinOp::Inter => E_INTER,
        BinOp::Product => E_PRODUCT,
        BinOp::Join => E_JOIN,
    }
}

fn expr_prec(e: &Expr) -> u8 {
    match &e.kind {
        ExprKind::Binary(op, ..) => bin_prec(*op),
        ExprKind::Unary(UnOp::Card, _) => E_CARD,
        ExprKind::Unary(..) => E_UNARY,
        _ => E_ATOM,
    }
}

fn write_expr(out: &mut String, e: &Expr, min: u8) {
    let parens = expr_prec(e) < min;
    if parens {
        out.push('(');
    }
    match &e.kind {
        ExprKind::Name { name, primed } => {
            out.push_str(name);
            if *primed {
                out.push('\'');
            }
        }
        ExprKind::Int(n) => {
            let _ = write!(out, "{n}");
        }
        ExprKind::None => out.push_str("none"),
        ExprKind::Univ => out.push_str("univ"),
        ExprKind::Iden => out.push_str("iden"),
        ExprKind::Binary(op, a, b) => {
            let p = bin_prec(*op);
            write_expr(out, a, p);
            if *op == BinOp::Join {
                out.push('.');
            } else {
                let _ = write!(out, " {} ", op.symbol());
            }
            write_expr(out, b, p + 1);
        }
        ExprKind::Unary(op, a) => {
            out.push_str(op.symbol());
            write_expr(out, a, if *op == UnOp::Card { E_CARD } else { E_UNARY });
        }
        ExprKind::Call { name, args } => {
            let args: Vec<String> = args.iter().map(expr).collect();
            let _ = write!(out, "{}[{}]", name.name, args.join(", "));
        }
    }
    if parens {
        out.push(')');
    }
}
