use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use super::{ParseError, Span};

#[derive(Debug, Clone, PartialEq)]
pub enum TokenKind {
    Ident(String),
    /// Decimal literal, kept as text until the parser decides how to read it.
    Number(String),
    /// Decimal literal with an `i` suffix.
    Imaginary(String),
    LBrace,
    RBrace,
    LParen,
    RParen,
    LBracket,
    RBracket,
    Comma,
    Eq,
    Colon,
    Dot,
    Arrow,
    Plus,
    Minus,
    Eof,
}

impl TokenKind {
    pub fn describe(&self) -> String {
        match self {
            TokenKind::Ident(s) => format!("`{s}`"),
            TokenKind::Number(s) => format!("number `{s}`"),
            TokenKind::Imaginary(s) => format!("number `{s}i`"),
            TokenKind::Eof => "end of input".to_string(),
            other => format!("`{}`", other.symbol()),
        }
    }

    pub fn symbol(&self) -> &'static str {
        match self {
            TokenKind::LBrace => "{",
            TokenKind::RBrace => "}",
            TokenKind::LParen => "(",
            TokenKind::RParen => ")",
            TokenKind::LBracket => "[",
            TokenKind::RBracket => "]",
            TokenKind::Comma => ",",
            TokenKind::Eq => "=",
            TokenKind::Colon => ":",
            TokenKind::Dot => ".",
            TokenKind::Arrow => "->",
            TokenKind::Plus => "+",
            TokenKind::Minus => "-",
            _ => "",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Token {
    pub kind: TokenKind,
    pub span: Span,
}

const MAX_LEX_ERRORS: usize = 32;

struct Cursor<'a> {
    src: &'a str,
    pos: usize,
    line: u32,
    col: u32,
}

impl<'a> Cursor<'a> {
    fn peek(&self) -> Option<char> {
        self.src[self.pos..].chars().next()
    }

    fn peek2(&self) -> Option<char> {
        let mut it = self.src[self.pos..].chars();
        it.next();
        it.next()
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.peek()?;
        self.pos += c.len_utf8();
        if c == '\n' {
            self.line += 1;
            self.col = 1;
        } else {
            self.col += 1;
        }
        Some(c)
    }

    fn eat_while(&mut self, f: impl Fn(char) -> bool) {
        while self.peek().is_some_and(&f) {
            self.bump();
        }
    }

    fn span_from(&self, start: usize, line: u32, col: u32) -> Span {
        Span { start, end: self.pos, line, col, len: self.src[start..self.pos].chars().count() as u32 }
    }
}

fn is_ident_start(c: char) -> bool {
    c.is_ascii_alphabetic() || c == '_'
}

fn is_ident_continue(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_'
}

pub fn tokenize(src: &str) -> Result<Vec<Token>, Vec<ParseError>> {
    let mut cur = Cursor { src, pos: 0, line: 1, col: 1 };
    let mut tokens = Vec::new();
    let mut errors = Vec::new();

    while let Some(c) = cur.peek() {
        let (start, line, col) = (cur.pos, cur.line, cur.col);
        if c.is_whitespace() {
            cur.bump();
            continue;
        }
        if c == '#' || (c == '/' && cur.peek2() == Some('/')) {
            cur.eat_while(|c| c != '\n');
            continue;
        }
        let kind = if is_ident_start(c) {
            cur.eat_while(is_ident_continue);
            TokenKind::Ident(src[start..cur.pos].to_string())
        } else if c.is_ascii_digit() {
            cur.eat_while(|c| c.is_ascii_digit());
            if cur.peek() == Some('.') && !matches!(cur.peek2(), Some(d) if !d.is_ascii_digit()) {
                cur.bump();
                cur.eat_while(|c| c.is_ascii_digit());
            } else if cur.peek() == Some('.') && cur.peek2().is_some_and(|d| !is_ident_start(d)) {
                // `1.` followed by punctuation or whitespace
                cur.bump();
            }
            if matches!(cur.peek(), Some('e' | 'E')) {
                let after = cur.peek2();
                let exponent_follows = match after {
                    Some(d) if d.is_ascii_digit() => true,
                    Some('+' | '-') => src[cur.pos + 2..].starts_with(|d: char| d.is_ascii_digit()),
                    _ => false,
                };
                if exponent_follows {
                    cur.bump();
                    if matches!(cur.peek(), Some('+' | '-')) {
                        cur.bump();
                    }
                    cur.eat_while(|c| c.is_ascii_digit());
                }
            }
            let text = src[start..cur.pos].to_string();
            if cur.peek() == Some('i') && !cur.peek2().is_some_and(is_ident_continue) {
                cur.bump();
                TokenKind::Imaginary(text)
            } else {
                TokenKind::Number(text)
            }
        } else {
            cur.bump();
            match c {
                '{' => TokenKind::LBrace,
                '}' => TokenKind::RBrace,
                '(' => TokenKind::LParen,
                ')' => TokenKind::RParen,
                '[' => TokenKind::LBracket,
                ']' => TokenKind::RBracket,
                ',' => TokenKind::Comma,
                '=' => TokenKind::Eq,
                ':' => TokenKind::Colon,
                '.' => TokenKind::Dot,
                '+' => TokenKind::Plus,
                '-' if cur.peek() == Some('>') => {
                    cur.bump();
                    TokenKind::Arrow
                }
                '-' => TokenKind::Minus,
                other => {
                    errors.push(ParseError::syntax(
                        format!("unexpected character {other:?}"),
                        cur.span_from(start, line, col),
                        Vec::new(),
                    ));
                    if errors.len() >= MAX_LEX_ERRORS {
                        break;
                    }
                    continue;
                }
            }
        };
        tokens.push(Token { kind, span: cur.span_from(start, line, col) });
    }

    if !errors.is_empty() {
        return Err(errors);
    }
    let end = Span { start: src.len(), end: src.len(), line: cur.line, col: cur.col, len: 0 };
    tokens.push(Token { kind: TokenKind::Eof, span: end });
    Ok(tokens)
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn kinds(src: &str) -> Vec<TokenKind> {
        tokenize(src).unwrap().into_iter().map(|t| t.kind).collect()
    }

    #[test]
    fn numbers_and_imaginary() {
        assert_eq!(
            kinds("0.7071 + 0i -2e-3i 1."),
            vec![
                TokenKind::Number("0.7071".into()),
                TokenKind::Plus,
                TokenKind::Imaginary("0".into()),
                TokenKind::Minus,
                TokenKind::Imaginary("2e-3".into()),
                TokenKind::Number("1.".into()),
                TokenKind::Eof,
            ]
        );
    }

    #[test]
    fn dotted_subject_and_arrow() {
        assert_eq!(
            kinds("pair.left -> # comment\n x"),
            vec![
                TokenKind::Ident("pair".into()),
                TokenKind::Dot,
                TokenKind::Ident("left".into()),
                TokenKind::Arrow,
                TokenKind::Ident("x".into()),
                TokenKind::Eof,
            ]
        );
    }

    #[test]
    fn positions_are_one_based_chars() {
        let toks = tokenize("a\n  βx").unwrap_err();
        assert_eq!(toks[0].span.line, 2);
        assert_eq!(toks[0].span.col, 3);
    }

    #[test]
    fn identifier_after_number_with_i_prefix() {
        assert_eq!(kinds("3in"), vec![TokenKind::Number("3".into()), TokenKind::Ident("in".into()), TokenKind::Eof]);
    }
}
