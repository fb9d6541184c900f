//! Recursive-descent parser for `.dal` models.
//!
//! Formulas and expressions share one precedence ladder (as in Alloy) and are
//! split into [`Formula`] / [`Expr`] once a subterm's role is known.

use super::ast::*;
use super::error::SyntaxError;
use super::lexer::{lex, Tok, Token};

/// Parses a whole model.
pub fn parse_model(src: &str) -> Result<Model, SyntaxError> {
    let mut p = Parser::new(src)?;
    let model = p.model()?;
    Ok(model)
}

/// Parses a standalone expression (used for watch expressions).
pub fn parse_expr(src: &str) -> Result<Expr, SyntaxError> {
    let mut p = Parser::new(src)?;
    let t = p.term()?;
    p.expect(Tok::Eof)?;
    to_expr(t)
}

/// Parses a standalone formula.
pub fn parse_formula(src: &str) -> Result<Formula, SyntaxError> {
    let mut p = Parser::new(src)?;
    let t = p.term()?;
    p.expect(Tok::Eof)?;
    to_formula(t)
}

/// Parses either a formula or an expression, whichever the text denotes.
pub fn parse_watch(src: &str) -> Result<WatchTerm, SyntaxError> {
    let mut p = Parser::new(src)?;
    let t = p.term()?;
    p.expect(Tok::Eof)?;
    if t.is_formula() {
        to_formula(t).map(WatchTerm::Formula)
    } else {
        to_expr(t).map(WatchTerm::Expr)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum WatchTerm {
    Expr(Expr),
    Formula(Formula),
}

// ---------------------------------------------------------------------------
// unified terms

#[derive(Clone, Debug)]
struct Term {
    kind: TermKind,
    span: Span,
}

#[derive(Clone, Debug)]
enum TermKind {
    Name {
        name: String,
        primed: bool,
    },
    Int(i64),
    True,
    False,
    None,
    Univ,
    Iden,
    Call {
        name: Ident,
        args: Vec<Term>,
    },
    Bin(BinOp, Box<Term>, Box<Term>),
    Un(UnOp, Box<Term>),
    Not(Box<Term>),
    And(Box<Term>, Box<Term>),
    Or(Box<Term>, Box<Term>),
    Implies(Box<Term>, Box<Term>),
    Iff(Box<Term>, Box<Term>),
    Cmp(CmpOp, Box<Term>, Box<Term>),
    Mult(Mult, Box<Term>),
    Quant {
        quant: Quant,
        var: Ident,
        bound: Box<Term>,
        body: Box<Term>,
    },
}

impl Term {
    fn is_formula(&self) -> bool {
        matches!(
            self.kind,
            TermKind::True
                | TermKind::False
                | TermKind::Not(_)
                | TermKind::And(..)
                | TermKind::Or(..)
                | TermKind::Implies(..)
                | TermKind::Iff(..)
                | TermKind::Cmp(..)
                | TermKind::Mult(..)
                | TermKind::Quant { .. }
        ) || matches!(&self.kind, TermKind::Call { name, .. } if name.name != "add" && name.name != "sub")
    }
}

type BinaryCtor = fn(Box<Term>, Box<Term>) -> TermKind;

fn to_formula(t: Term) -> Result<Formula, SyntaxError> {
    let span = t.span;
    let bx = |t: Box<Term>| to_formula(*t).map(Box::new);
    let kind = match t.kind {
        TermKind::True => FormulaKind::True,
        TermKind::False => FormulaKind::False,
        TermKind::Not(a) => FormulaKind::Not(bx(a)?),
        TermKind::And(a, b) => FormulaKind::And(bx(a)?, bx(b)?),
        TermKind::Or(a, b) => FormulaKind::Or(bx(a)?, bx(b)?),
        TermKind::Implies(a, b) => FormulaKind::Implies(bx(a)?, bx(b)?),
        TermKind::Iff(a, b) => FormulaKind::Iff(bx(a)?, bx(b)?),
        TermKind::Cmp(op, a, b) => FormulaKind::Cmp(op, to_expr(*a)?, to_expr(*b)?),
        TermKind::Mult(m, a) => FormulaKind::Mult(m, to_expr(*a)?),
        TermKind::Quant {
            quant,
            var,
            bound,
            body,
        } => FormulaKind::Quant {
            quant,
            var,
            bound: to_expr(*bound)?,
            body: bx(body)?,
        },
        TermKind::Call { name, args } => FormulaKind::PredCall {
            name,
            args: args.into_iter().map(to_expr).collect::<Result<_, _>>()?,
        },
        _ => return Err(SyntaxError::parse(span, "expected a formula, found an expression")),
    };
    Ok(Formula::new(kind, span))
}

fn to_expr(t: Term) -> Result<Expr, SyntaxError> {
    let span = t.span;
    let kind = match t.kind {
        TermKind::Name { name, primed } => ExprKind::Name { name, primed },
        TermKind::Int(n) => ExprKind::Int(n),
        TermKind::None => ExprKind::None,
        TermKind::Univ => ExprKind::Univ,
        TermKind::Iden => ExprKind::Iden,
        TermKind::Bin(op, a, b) => ExprKind::Binary(op, Box::new(to_expr(*a)?), Box::new(to_expr(*b)?)),
        TermKind::Un(op, a) => ExprKind::Unary(op, Box::new(to_expr(*a)?)),
        TermKind::Call { name, args } => ExprKind::Call {
            name,
            args: args.into_iter().map(to_expr).collect::<Result<_, _>>()?,
        },
        _ => return Err(SyntaxError::parse(span, "expected an expression, found a formula")),
    };
    Ok(Expr::new(kind, span))
}

// ---------------------------------------------------------------------------

struct Parser {
    toks: Vec<Token>,
    pos: usize,
}

impl Parser {
    fn new(src: &str) -> Result<Self, SyntaxError> {
        Ok(Parser {
            toks: lex(src)?,
            pos: 0,
        })
    }

    fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    fn peek_at(&self, n: usize) -> &Tok {
        &self.toks[(self.pos + n).min(self.toks.len() - 1)].tok
    }

    fn span(&self) -> Span {
        self.toks[self.pos].span
    }

    fn prev_end(&self) -> usize {
        if self.pos == 0 {
            0
        } else {
            self.toks[self.pos - 1].span.end
        }
    }

    fn since(&self, start: usize) -> Span {
        Span::new(start, self.prev_end().max(start))
    }

    fn bump(&mut self) -> Token {
        let t = self.toks[self.pos].clone();
        if self.pos < self.toks.len() - 1 {
            self.pos += 1;
        }
        t
    }

    fn eat(&mut self, tok: &Tok) -> bool {
        if self.peek() == tok {
            self.bump();
            true
        } else {
            false
        }
    }

    fn error_expected(&self, expected: &[&str]) -> SyntaxError {
        let found = self.peek().describe();
        let mut e = SyntaxError::parse(self.span(), format!("unexpected {found}"));
        e.expected = expected.iter().map(|s| s.to_string()).collect();
        e
    }

    fn expect(&mut self, tok: Tok) -> Result<Token, SyntaxError> {
        if *self.peek() == tok {
            Ok(self.bump())
        } else {
            Err(self.error_expected(&[tok.text()]))
        }
    }

    fn ident(&mut self) -> Result<Ident, SyntaxError> {
        match self.peek().clone() {
            Tok::Ident(name) => {
                let t = self.bump();
                Ok(Ident::new(name, t.span))
            }
            _ => Err(self.error_expected(&["identifier"])),
        }
    }

    // -- declarations ------------------------------------------------------

    fn model(&mut self) -> Result<Model, SyntaxError> {
        let mut m = Model::default();
        loop {
            let start = self.span().start;
            match self.peek() {
                Tok::Eof => return Ok(m),
                Tok::One | Tok::Sig => {
                    let mult = if self.eat(&Tok::One) {
                        SigMult::One
                    } else {
                        SigMult::Default
                    };
                    self.expect(Tok::Sig)?;
                    let mut names = vec![self.ident()?];
                    while self.eat(&Tok::Comma) {
                        names.push(self.ident()?);
                    }
                    if self.eat(&Tok::LBrace) {
                        self.expect(Tok::RBrace)?;
                    }
                    let span = self.since(start);
                    m.sigs
                        .extend(names.into_iter().map(|name| SigDecl { name, mult, span }));
                }
                Tok::Pred => {
                    self.bump();
                    let name = self.ident()?;
                    let params = self.params()?;
                    let body = self.formula_block()?;
                    m.preds.push(PredDecl {
                        name,
                        params,
                        body,
                        span: self.since(start),
                    });
                }
                Tok::Action => {
                    self.bump();
                    let name = self.ident()?;
                    let params = self.params()?;
                    self.expect(Tok::LBrace)?;
                    self.expect(Tok::Pre)?;
                    let pre = self.formula_block()?;
                    self.expect(Tok::Post)?;
                    let post = self.formula_block()?;
                    self.expect(Tok::RBrace)?;
                    m.actions.push(ActionDecl {
                        name,
                        params,
                        pre,
                        post,
                        span: self.since(start),
                    });
                }
                Tok::Program => {
                    self.bump();
                    let name = self.ident()?;
                    let params = self.params()?;
                    let locals = if self.eat(&Tok::Var) {
                        self.params()?
                    } else {
                        Vec::new()
                    };
                    let body = self.program_block()?;
                    m.programs.push(ProgramDecl {
                        name,
                        params,
                        locals,
                        body,
                        span: self.since(start),
                    });
                }
                Tok::AssertCorrectness => {
                    self.bump();
                    let name = self.ident()?;
                    let params = self.params()?;
                    self.expect(Tok::LBrace)?;
                    self.expect(Tok::Pre)?;
                    let pre = self.formula_block()?;
                    self.expect(Tok::Program)?;
                    let program = self.program_block()?;
                    self.expect(Tok::Post)?;
                    let post = self.formula_block()?;
                    self.expect(Tok::RBrace)?;
                    m.assertions.push(AssertDecl {
                        name,
                        params,
                        pre,
                        program,
                        post,
                        span: self.since(start),
                    });
                }
                _ => {
                    return Err(self.error_expected(&["sig", "one", "pred", "action", "program", "assertCorrectness"]))
                }
            }
        }
    }

    fn params(&mut self) -> Result<Vec<Param>, SyntaxError> {
        self.expect(Tok::LBracket)?;
        let mut out = Vec::new();
        if self.eat(&Tok::RBracket) {
            return Ok(out);
        }
        loop {
            let name = self.ident()?;
            self.expect(Tok::Colon)?;
            let ty = self.rel_type()?;
            out.push(Param { name, ty });
            if self.eat(&Tok::Comma) {
                continue;
            }
            self.expect(Tok::RBracket)?;
            return Ok(out);
        }
    }

    fn col_mult(&mut self) -> ColMult {
        if self.eat(&Tok::One) {
            ColMult::One
        } else if self.eat(&Tok::Set) {
            ColMult::Set
        } else {
            ColMult::Implicit
        }
    }

    fn rel_type(&mut self) -> Result<RelType, SyntaxError> {
        let start = self.span().start;
        let domain_mult = self.col_mult();
        let domain = self.col_type()?;
        let range = if self.eat(&Tok::Arrow) {
            let m = self.col_mult();
            Some((m, self.col_type()?))
        } else {
            None
        };
        Ok(RelType {
            domain_mult,
            domain,
            range,
            span: self.since(start),
        })
    }

    fn col_type(&mut self) -> Result<ColType, SyntaxError> {
        let start = self.span().start;
        let paren = self.eat(&Tok::LParen);
        let mut sigs = vec![self.ident()?];
        while self.eat(&Tok::Plus) {
            sigs.push(self.ident()?);
        }
        if paren {
            self.expect(Tok::RParen)?;
        }
        Ok(ColType {
            sigs,
            span: self.since(start),
        })
    }

    /// `{ f1 f2 ... }`, conjoined; an empty block is `true`.
    fn formula_block(&mut self) -> Result<Formula, SyntaxError> {
        let open = self.expect(Tok::LBrace)?;
        let mut acc: Option<Formula> = None;
        while *self.peek() != Tok::RBrace {
            let f = to_formula(self.term()?)?;
            acc = Some(match acc {
                None => f,
                Some(prev) => {
                    let span = prev.span.to(f.span);
                    Formula::new(FormulaKind::And(Box::new(prev), Box::new(f)), span)
                }
            });
        }
        let close = self.expect(Tok::RBrace)?;
        Ok(acc.unwrap_or_else(|| Formula::truth(open.span.to(close.span))))
    }

    // -- programs ----------------------------------------------------------

    fn program_block(&mut self) -> Result<Program, SyntaxError> {
        let open = self.expect(Tok::LBrace)?;
        if *self.peek() == Tok::RBrace {
            let close = self.bump();
            return Ok(Program::new(ProgramKind::Skip, open.span.to(close.span)));
        }
        let p = self.program()?;
        self.expect(Tok::RBrace)?;
        Ok(p)
    }

    fn program(&mut self) -> Result<Program, SyntaxError> {
        let mut left = self.choice()?;
        while self.eat(&Tok::Semi) {
            if matches!(self.peek(), Tok::RBrace | Tok::RParen) {
                break;
            }
            let right = self.choice()?;
            let span = left.span.to(right.span);
            left = Program::new(ProgramKind::Seq(Box::new(left), Box::new(right)), span);
        }
        Ok(left)
    }

    fn choice(&mut self) -> Result<Program, SyntaxError> {
        let mut left = self.postfix()?;
        while self.eat(&Tok::Plus) {
            let right = self.postfix()?;
            let span = left.span.to(right.span);
            left = Program::new(ProgramKind::Choice(Box::new(left), Box::new(right)), span);
        }
        Ok(left)
    }

    fn postfix(&mut self) -> Result<Program, SyntaxError> {
        let mut p = self.statement()?;
        while *self.peek() == Tok::Star {
            let t = self.bump();
            let span = p.span.to(t.span);
            p = Program::new(ProgramKind::Star(Box::new(p)), span);
        }
        Ok(p)
    }

    fn statement(&mut self) -> Result<Program, SyntaxError> {
        let start = self.span().start;
        match self.peek().clone() {
            Tok::LParen => {
                self.bump();
                let p = self.program()?;
                self.expect(Tok::RParen)?;
                Ok(p)
            }
            Tok::LBrace => self.program_block(),
            Tok::Skip => {
                let t = self.bump();
                Ok(Program::new(ProgramKind::Skip, t.span))
            }
            Tok::LBracket => {
                self.bump();
                let f = to_formula(self.term()?)?;
                self.expect(Tok::RBracket)?;
                self.expect(Tok::Question)?;
                Ok(Program::new(ProgramKind::Test(f), self.since(start)))
            }
            Tok::If => self.if_statement(),
            Tok::While => {
                self.bump();
                let cond = to_formula(self.term()?)?;
                self.expect(Tok::Do)?;
                let body = self.program_block()?;
                Ok(Program::new(
                    ProgramKind::While {
                        cond,
                        body: Box::new(body),
                    },
                    self.since(start),
                ))
            }
            Tok::Ident(_) => {
                let name = self.ident()?;
                match self.peek() {
                    Tok::Assign => {
                        self.bump();
                        let value = to_expr(self.union()?)?;
                        Ok(Program::new(
                            ProgramKind::Assign { target: name, value },
                            self.since(start),
                        ))
                    }
                    Tok::LBracket => {
                        let args = self.call_args()?;
                        Ok(Program::new(ProgramKind::Call { name, args }, self.since(start)))
                    }
                    _ => Err(self.error_expected(&[":=", "["])),
                }
            }
            _ => Err(self.error_expected(&["identifier", "skip", "if", "while", "[", "(", "{"])),
        }
    }

    fn if_statement(&mut self) -> Result<Program, SyntaxError> {
        let start = self.span().start;
        self.expect(Tok::If)?;
        let cond = to_formula(self.term()?)?;
        let then = self.program_block()?;
        let otherwise = if self.eat(&Tok::Else) {
            if *self.peek() == Tok::If {
                Some(Box::new(self.if_statement()?))
            } else {
                Some(Box::new(self.program_block()?))
            }
        } else {
            None
        };
        Ok(Program::new(
            ProgramKind::If {
                cond,
                then: Box::new(then),
                otherwise,
            },
            self.since(start),
        ))
    }

    fn call_args(&mut self) -> Result<Vec<Ident>, SyntaxError> {
        self.expect(Tok::LBracket)?;
        let mut args = Vec::new();
        if self.eat(&Tok::RBracket) {
            return Ok(args);
        }
        loop {
            args.push(self.ident()?);
            if self.eat(&Tok::Comma) {
                continue;
            }
            self.expect(Tok::RBracket)?;
            return Ok(args);
        }
    }

    // -- formulas and expressions -----------------------------------------

    fn term(&mut self) -> Result<Term, SyntaxError> {
        self.or()
    }

    fn binary_chain(
        &mut self,
        next: fn(&mut Self) -> Result<Term, SyntaxError>,
        ops: &[(Tok, BinaryCtor)],
    ) -> Result<Term, SyntaxError> {
        let mut left = next(self)?;
        'outer: loop {
            for (tok, mk) in ops {
                if self.peek() == tok {
                    self.bump();
                    let right = next(self)?;
                    let span = left.span.to(right.span);
                    left = Term {
                        kind: mk(Box::new(left), Box::new(right)),
                        span,
                    };
                    continue 'outer;
                }
            }
            return Ok(left);
        }
    }

    fn or(&mut self) -> Result<Term, SyntaxError> {
        self.binary_chain(Self::iff, &[(Tok::BarBar, TermKind::Or), (Tok::Or, TermKind::Or)])
    }

    fn iff(&mut self) -> Result<Term, SyntaxError> {
        self.binary_chain(
            Self::implies,
            &[(Tok::DoubleArrow, TermKind::Iff), (Tok::Iff, TermKind::Iff)],
        )
    }

    fn implies(&mut self) -> Result<Term, SyntaxError> {
        let left = self.and()?;
        if matches!(self.peek(), Tok::FatArrow | Tok::Implies) {
            self.bump();
            let right = self.implies()?;
            let span = left.span.to(right.span);
            return Ok(Term {
                kind: TermKind::Implies(Box::new(left), Box::new(right)),
                span,
            });
        }
        Ok(left)
    }

    fn and(&mut self) -> Result<Term, SyntaxError> {
        self.binary_chain(Self::not, &[(Tok::AmpAmp, TermKind::And), (Tok::And, TermKind::And)])
    }

    fn not(&mut self) -> Result<Term, SyntaxError> {
        if matches!(self.peek(), Tok::Bang | Tok::Not) && *self.peek_at(1) != Tok::In {
            let t = self.bump();
            let inner = self.not()?;
            let span = t.span.to(inner.span);
            return Ok(Term {
                kind: TermKind::Not(Box::new(inner)),
                span,
            });
        }
        self.cmp()
    }

    fn cmp(&mut self) -> Result<Term, SyntaxError> {
        let left = self.mult()?;
        let op = match self.peek() {
            Tok::Eq => Some(CmpOp::Eq),
            Tok::Neq => Some(CmpOp::Neq),
            Tok::In => Some(CmpOp::In),
            Tok::Lt => Some(CmpOp::Lt),
            Tok::Le => Some(CmpOp::Le),
            Tok::Gt => Some(CmpOp::Gt),
            Tok::Ge => Some(CmpOp::Ge),
            Tok::Bang | Tok::Not if *self.peek_at(1) == Tok::In => {
                self.bump();
                Some(CmpOp::NotIn)
            }
            _ => None,
        };
        let Some(op) = op else { return Ok(left) };
        self.bump();
        let right = self.mult()?;
        let span = left.span.to(right.span);
        Ok(Term {
            kind: TermKind::Cmp(op, Box::new(left), Box::new(right)),
            span,
        })
    }

    fn mult(&mut self) -> Result<Term, SyntaxError> {
        let start = self.span().start;
        let is_quant_head = matches!(self.peek_at(1), Tok::Ident(_)) && *self.peek_at(2) == Tok::Colon;
        match self.peek() {
            Tok::All => return self.quantifier(Quant::All),
            Tok::Some if is_quant_head => return self.quantifier(Quant::Some),
            _ => {}
        }
        let m = match self.peek() {
            Tok::No => Mult::No,
            Tok::Some => Mult::Some,
            Tok::One => Mult::One,
            Tok::Lone => Mult::Lone,
            _ => return self.union(),
        };
        self.bump();
        let e = self.union()?;
        Ok(Term {
            kind: TermKind::Mult(m, Box::new(e)),
            span: self.since(start),
        })
    }

    fn quantifier(&mut self, quant: Quant) -> Result<Term, SyntaxError> {
        let start = self.bump().span.start;
        let var = self.ident()?;
        self.expect(Tok::Colon)?;
        let bound = self.union()?;
        self.expect(Tok::Bar)?;
        let body = self.or()?;
        Ok(Term {
            kind: TermKind::Quant {
                quant,
                var,
                bound: Box::new(bound),
                body: Box::new(body),
            },
            span: self.since(start),
        })
    }

    fn union(&mut self) -> Result<Term, SyntaxError> {
        self.binary_chain(
            Self::card,
            &[
                (Tok::Plus, |a, b| TermKind::Bin(BinOp::Union, a, b)),
                (Tok::Minus, |a, b| TermKind::Bin(BinOp::Diff, a, b)),
            ],
        )
    }

    fn card(&mut self) -> Result<Term, SyntaxError> {
        if *self.peek() == Tok::Hash {
            let t = self.bump();
            let inner = self.card()?;
            let span = t.span.to(inner.span);
            return Ok(Term {
                kind: TermKind::Un(UnOp::Card, Box::new(inner)),
                span,
            });
        }
        self.overriding()
    }

    fn overriding(&mut self) -> Result<Term, SyntaxError> {
        self.binary_chain(
            Self::inter,
            &[(Tok::PlusPlus, |a, b| TermKind::Bin(BinOp::Override, a, b))],
        )
    }

    fn inter(&mut self) -> Result<Term, SyntaxError> {
        self.binary_chain(Self::product, &[(Tok::Amp, |a, b| TermKind::Bin(BinOp::Inter, a, b))])
    }

    fn product(&mut self) -> Result<Term, SyntaxError> {
        self.binary_chain(Self::join, &[(Tok::Arrow, |a, b| TermKind::Bin(BinOp::Product, a, b))])
    }

    fn join(&mut self) -> Result<Term, SyntaxError> {
        self.binary_chain(Self::unary, &[(Tok::Dot, |a, b| TermKind::Bin(BinOp::Join, a, b))])
    }

    fn unary(&mut self) -> Result<Term, SyntaxError> {
        let op = match self.peek() {
            Tok::Tilde => UnOp::Transpose,
            Tok::Caret => UnOp::Closure,
            Tok::Star => UnOp::ReflexiveClosure,
            Tok::Minus if matches!(self.peek_at(1), Tok::Int(_)) => {
                let start = self.bump().span;
                let Tok::Int(n) = self.bump().tok else { unreachable!() };
                return Ok(Term {
                    kind: TermKind::Int(-n),
                    span: start.to(self.since(start.start)),
                });
            }
            _ => return self.atom(),
        };
        let t = self.bump();
        let inner = self.unary()?;
        let span = t.span.to(inner.span);
        Ok(Term {
            kind: TermKind::Un(op, Box::new(inner)),
            span,
        })
    }

    fn atom(&mut self) -> Result<Term, SyntaxError> {
        let start = self.span();
        let kind = match self.peek().clone() {
            Tok::Ident(name) => {
                self.bump();
                if *self.peek() == Tok::LBracket {
                    self.bump();
                    let mut args = Vec::new();
                    if !self.eat(&Tok::RBracket) {
                        loop {
                            args.push(self.term()?);
                            if self.eat(&Tok::Comma) {
                                continue;
                            }
                            self.expect(Tok::RBracket)?;
                            break;
                        }
                    }
                    TermKind::Call {
                        name: Ident::new(name, start),
                        args,
                    }
                } else {
                    let primed = self.eat(&Tok::Prime);
                    TermKind::Name { name, primed }
                }
            }
            Tok::Int(n) => {
                self.bump();
                TermKind::Int(n)
            }
            Tok::True => {
                self.bump();
                TermKind::True
            }
            Tok::False => {
                self.bump();
                TermKind::False
            }
            Tok::None => {
                self.bump();
                TermKind::None
            }
            Tok::Univ => {
                self.bump();
                TermKind::Univ
            }
            Tok::Iden => {
                self.bump();
                TermKind::Iden
            }
            Tok::LParen => {
                self.bump();
                let inner = self.term()?;
                self.expect(Tok::RParen)?;
                return Ok(Term {
                    kind: inner.kind,
                    span: self.since(start.start),
                });
            }
            _ => {
                return Err(self.error_expected(&[
                    "identifier",
                    "integer",
                    "(",
                    "true",
                    "false",
                    "none",
                    "univ",
                    "iden",
                    "~",
                    "^",
                    "*",
                    "#",
                ]))
            }
        };
        Ok(Term {
            kind,
            span: self.since(start.start),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_input_is_an_empty_model() {
        let m = parse_model("").unwrap();
        assert_eq!(m, Model::default());
    }

    #[test]
    fn closure_and_difference_precedence() {
        let e = parse_expr("thiz.header.*next-null").unwrap();
        let ExprKind::Binary(BinOp::Diff, lhs, rhs) = e.kind else {
            panic!("{e:?}")
        };
        assert_eq!(
            rhs.kind,
            ExprKind::Name {
                name: "null".into(),
                primed: false
            }
        );
        let ExprKind::Binary(BinOp::Join, _, closure) = lhs.kind else {
            panic!()
        };
        assert!(matches!(closure.kind, ExprKind::Unary(UnOp::ReflexiveClosure, _)));
    }

    #[test]
    fn card_binds_looser_than_override() {
        let e = parse_expr("#a ++ b").unwrap();
        let ExprKind::Unary(UnOp::Card, inner) = e.kind else {
            panic!()
        };
        assert!(matches!(inner.kind, ExprKind::Binary(BinOp::Override, ..)));
    }

    #[test]
    fn some_quantifier_versus_multiplicity() {
        let q = parse_formula("some x: Node | x = x").unwrap();
        assert!(matches!(q.kind, FormulaKind::Quant { quant: Quant::Some, .. }));
        let m = parse_formula("some next").unwrap();
        assert!(matches!(m.kind, FormulaKind::Mult(Mult::Some, _)));
    }

    #[test]
    fn not_in() {
        let f = parse_formula("a !in b").unwrap();
        assert!(matches!(f.kind, FormulaKind::Cmp(CmpOp::NotIn, ..)));
        let g = parse_formula("!a in b").unwrap();
        assert!(matches!(g.kind, FormulaKind::Not(_)));
    }

    #[test]
    fn implies_is_right_associative() {
        let f = parse_formula("a = a => b = b => c = c").unwrap();
        let FormulaKind::Implies(_, rhs) = f.kind else { panic!() };
        assert!(matches!(rhs.kind, FormulaKind::Implies(..)));
    }

    #[test]
    fn spans_cover_source() {
        let src = "x := thiz.header";
        let m = parse_model(&format!("program p[] {{ {src} }}")).unwrap();
        let body = &m.programs[0].body;
        assert_eq!(body.span, Span::new(14, 14 + src.len()));
    }

    #[test]
    fn expression_where_formula_expected() {
        let err = parse_formula("a.b").unwrap_err();
        assert!(err.message.contains("expected a formula"));
    }

    #[test]
    fn error_carries_expected_set() {
        let err = parse_model("program p[] { x = y }").unwrap_err();
        assert_eq!(err.expected, vec![":=".to_string(), "[".to_string()]);
        assert_eq!(err.span, Span::new(16, 17));
    }

    #[test]
    fn test_statement_and_star() {
        let m = parse_model("program p[] { ([true]? ; skip)* }").unwrap();
        let ProgramKind::Star(inner) = &m.programs[0].body.kind else {
            panic!()
        };
        assert!(matches!(inner.kind, ProgramKind::Seq(..)));
    }
}
