use super::ast::Span;
use super::error::SyntaxError;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Tok {
    Ident(String),
    Int(i64),
    // keywords
    Sig,
    One,
    Lone,
    Some,
    No,
    All,
    Set,
    Pred,
    Action,
    Program,
    Var,
    AssertCorrectness,
    Pre,
    Post,
    If,
    Else,
    While,
    Do,
    Skip,
    And,
    Or,
    Not,
    Implies,
    Iff,
    In,
    True,
    False,
    None,
    Univ,
    Iden,
    // punctuation
    LBrace,
    RBrace,
    LBracket,
    RBracket,
    LParen,
    RParen,
    Comma,
    Colon,
    Semi,
    Bar,
    Question,
    Prime,
    Assign,
    Dot,
    Arrow,
    Plus,
    PlusPlus,
    Minus,
    Amp,
    AmpAmp,
    BarBar,
    Tilde,
    Caret,
    Star,
    Hash,
    Bang,
    Eq,
    Neq,
    Lt,
    Le,
    Gt,
    Ge,
    FatArrow,
    DoubleArrow,
    Eof,
}

impl Tok {
    pub fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("identifier `{s}`"),
            Tok::Int(n) => format!("integer `{n}`"),
            Tok::Eof => "end of input".to_string(),
            other => format!("`{}`", other.text()),
        }
    }

    pub fn text(&self) -> &'static str {
        match self {
            Tok::Ident(_) => "identifier",
            Tok::Int(_) => "integer",
            Tok::Sig => "sig",
            Tok::One => "one",
            Tok::Lone => "lone",
            Tok::Some => "some",
            Tok::No => "no",
            Tok::All => "all",
            Tok::Set => "set",
            Tok::Pred => "pred",
            Tok::Action => "action",
            Tok::Program => "program",
            Tok::Var => "var",
            Tok::AssertCorrectness => "assertCorrectness",
            Tok::Pre => "pre",
            Tok::Post => "post",
            Tok::If => "if",
            Tok::Else => "else",
            Tok::While => "while",
            Tok::Do => "do",
            Tok::Skip => "skip",
            Tok::And => "and",
            Tok::Or => "or",
            Tok::Not => "not",
            Tok::Implies => "implies",
            Tok::Iff => "iff",
            Tok::In => "in",
            Tok::True => "true",
            Tok::False => "false",
            Tok::None => "none",
            Tok::Univ => "univ",
            Tok::Iden => "iden",
            Tok::LBrace => "{",
            Tok::RBrace => "}",
            Tok::LBracket => "[",
            Tok::RBracket => "]",
            Tok::LParen => "(",
            Tok::RParen => ")",
            Tok::Comma => ",",
            Tok::Colon => ":",
            Tok::Semi => ";",
            Tok::Bar => "|",
            Tok::Question => "?",
            Tok::Prime => "'",
            Tok::Assign => ":=",
            Tok::Dot => ".",
            Tok::Arrow => "->",
            Tok::Plus => "+",
            Tok::PlusPlus => "++",
            Tok::Minus => "-",
            Tok::Amp => "&",
            Tok::AmpAmp => "&&",
            Tok::BarBar => "||",
            Tok::Tilde => "~",
            Tok::Caret => "^",
            Tok::Star => "*",
            Tok::Hash => "#",
            Tok::Bang => "!",
            Tok::Eq => "=",
            Tok::Neq => "!=",
            Tok::Lt => "<",
            Tok::Le => "<=",
            Tok::Gt => ">",
            Tok::Ge => ">=",
            Tok::FatArrow => "=>",
            Tok::DoubleArrow => "<=>",
            Tok::Eof => "<eof>",
        }
    }
}

fn keyword(word: &str) -> Option<Tok> {
    Some(match word {
        "sig" => Tok::Sig,
        "one" => Tok::One,
        "lone" => Tok::Lone,
        "some" => Tok::Some,
        "no" => Tok::No,
        "all" => Tok::All,
        "set" => Tok::Set,
        "pred" => Tok::Pred,
        "action" => Tok::Action,
        "program" => Tok::Program,
        "var" => Tok::Var,
        "assertCorrectness" => Tok::AssertCorrectness,
        "pre" => Tok::Pre,
        "post" => Tok::Post,
        "if" => Tok::If,
        "else" => Tok::Else,
        "while" => Tok::While,
        "do" => Tok::Do,
        "skip" => Tok::Skip,
        "and" => Tok::And,
        "or" => Tok::Or,
        "not" => Tok::Not,
        "implies" => Tok::Implies,
        "iff" => Tok::Iff,
        "in" => Tok::In,
        "true" => Tok::True,
        "false" => Tok::False,
        "none" => Tok::None,
        "univ" => Tok::Univ,
        "iden" => Tok::Iden,
        _ => return None,
    })
}

pub fn is_keyword(word: &str) -> bool {
    keyword(word).is_some()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Token {
    pub tok: Tok,
    pub span: Span,
}

/// Splits `src` into tokens, dropping whitespace and `//`, `/* */` comments.
pub fn lex(src: &str) -> Result<Vec<Token>, SyntaxError> {
    let bytes = src.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        if c.is_ascii_whitespace() {
            i += 1;
            continue;
        }
        if c == b'/' && bytes.get(i + 1) == Some(&b'/') {
            while i < bytes.len() && bytes[i] != b'\n' {
                i += 1;
            }
            continue;
        }
        if c == b'/' && bytes.get(i + 1) == Some(&b'*') {
            let start = i;
            i += 2;
            loop {
                if i + 1 >= bytes.len() {
                    return Err(SyntaxError::lex(
                        Span::new(start, src.len()),
                        "unterminated block comment",
                    ));
                }
                if bytes[i] == b'*' && bytes[i + 1] == b'/' {
                    i += 2;
                    break;
                }
                i += 1;
            }
            continue;
        }
        let start = i;
        if c.is_ascii_alphabetic() || c == b'_' {
            while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_' || bytes[i] == b'$') {
                i += 1;
            }
            let word = &src[start..i];
            let tok = keyword(word).unwrap_or_else(|| Tok::Ident(word.to_string()));
            out.push(Token {
                tok,
                span: Span::new(start, i),
            });
            continue;
        }
        if c.is_ascii_digit() {
            while i < bytes.len() && bytes[i].is_ascii_digit() {
                i += 1;
            }
            let span = Span::new(start, i);
            let n = src[start..i]
                .parse::<i64>()
                .map_err(|_| SyntaxError::lex(span, "integer literal out of range"))?;
            out.push(Token { tok: Tok::Int(n), span });
            continue;
        }
        let two = |a: u8, b: u8| c == a && bytes.get(i + 1) == Some(&b);
        let (tok, len) = if c == b'<' && bytes.get(i + 1) == Some(&b'=') && bytes.get(i + 2) == Some(&b'>') {
            (Tok::DoubleArrow, 3)
        } else if two(b':', b'=') {
            (Tok::Assign, 2)
        } else if two(b'-', b'>') {
            (Tok::Arrow, 2)
        } else if two(b'+', b'+') {
            (Tok::PlusPlus, 2)
        } else if two(b'&', b'&') {
            (Tok::AmpAmp, 2)
        } else if two(b'|', b'|') {
            (Tok::BarBar, 2)
        } else if two(b'!', b'=') {
            (Tok::Neq, 2)
        } else if two(b'<', b'=') {
            (Tok::Le, 2)
        } else if two(b'>', b'=') {
            (Tok::Ge, 2)
        } else if two(b'=', b'>') {
            (Tok::FatArrow, 2)
        } else {
            let t = match c {
                b'{' => Tok::LBrace,
                b'}' => Tok::RBrace,
                b'[' => Tok::LBracket,
                b']' => Tok::RBracket,
                b'(' => Tok::LParen,
                b')' => Tok::RParen,
                b',' => Tok::Comma,
                b':' => Tok::Colon,
                b';' => Tok::Semi,
                b'|' => Tok::Bar,
                b'?' => Tok::Question,
                b'\'' => Tok::Prime,
                b'.' => Tok::Dot,
                b'+' => Tok::Plus,
                b'-' => Tok::Minus,
                b'&' => Tok::Amp,
                b'~' => Tok::Tilde,
                b'^' => Tok::Caret,
                b'*' => Tok::Star,
                b'#' => Tok::Hash,
                b'!' => Tok::Bang,
                b'=' => Tok::Eq,
                b'<' => Tok::Lt,
                b'>' => Tok::Gt,
                _ => {
                    let ch = src[i..].chars().next().unwrap_or('?');
                    return Err(SyntaxError::lex(
                        Span::new(i, i + ch.len_utf8()),
                        format!("unexpected character `{ch}`"),
                    ));
                }
            };
            (t, 1)
        };
        out.push(Token {
            tok,
            span: Span::new(start, start + len),
        });
        i += len;
    }
    out.push(Token {
        tok: Tok::Eof,
        span: Span::new(src.len(), src.len()),
    });
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toks(src: &str) -> Vec<Tok> {
        lex(src).unwrap().into_iter().map(|t| t.tok).collect()
    }

    #[test]
    fn difference_is_not_a_negative_literal() {
        assert_eq!(
            toks("next-null"),
            vec![
                Tok::Ident("next".into()),
                Tok::Minus,
                Tok::Ident("null".into()),
                Tok::Eof
            ]
        );
    }

    #[test]
    fn comments_are_skipped() {
        assert_eq!(
            toks("a // x\n/* y\n z */ b"),
            vec![Tok::Ident("a".into()), Tok::Ident("b".into()), Tok::Eof]
        );
    }

    #[test]
    fn multi_char_operators() {
        assert_eq!(
            toks(":= ++ -> <=> <= => !="),
            vec![
                Tok::Assign,
                Tok::PlusPlus,
                Tok::Arrow,
                Tok::DoubleArrow,
                Tok::Le,
                Tok::FatArrow,
                Tok::Neq,
                Tok::Eof
            ]
        );
    }

    #[test]
    fn bad_character_reports_position() {
        let err = lex("sig A { @ }").unwrap_err();
        assert_eq!(err.span, Span::new(8, 9));
    }

    #[test]
    fn unterminated_comment() {
        assert!(lex("/* never closed").is_err());
    }
}
