use crate::error::Error;
use crate::model::SourceSpan;

#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) enum Tok {
    Ident(String),
    Var(String),
    Int(i128),
    LParen,
    RParen,
    LBrace,
    RBrace,
    Comma,
    Dot,
    Colon,
    If,
    Bar,
    Minus,
    Plus,
    Star,
    Lt,
    Le,
    Gt,
    Ge,
    Eq,
    Ne,
    Eof,
}

impl Tok {
    pub(crate) fn describe(&self) -> String {
        match self {
            Tok::Ident(s) | Tok::Var(s) => format!("`{s}`"),
            Tok::Int(i) => format!("`{i}`"),
            Tok::Eof => "end of input".to_string(),
            t => format!("`{}`", t.text()),
        }
    }

    fn text(&self) -> &'static str {
        match self {
            Tok::LParen => "(",
            Tok::RParen => ")",
            Tok::LBrace => "{",
            Tok::RBrace => "}",
            Tok::Comma => ",",
            Tok::Dot => ".",
            Tok::Colon => ":",
            Tok::If => ":-",
            Tok::Bar => "|",
            Tok::Minus => "-",
            Tok::Plus => "+",
            Tok::Star => "*",
            Tok::Lt => "<",
            Tok::Le => "<=",
            Tok::Gt => ">",
            Tok::Ge => ">=",
            Tok::Eq => "=",
            Tok::Ne => "!=",
            _ => "",
        }
    }
}

#[derive(Clone, Debug)]
pub(crate) struct Token {
    pub tok: Tok,
    pub span: SourceSpan,
}

pub(crate) fn tokenize(text: &str) -> Result<Vec<Token>, Error> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    let mut line = 1;
    let mut line_start = 0;
    while i < bytes.len() {
        let c = bytes[i];
        let span_at = |begin: usize, end: usize, line: usize, line_start: usize| SourceSpan {
            begin,
            end,
            line,
            column: text[line_start..begin].chars().count() + 1,
        };
        if c == b'\n' {
            i += 1;
            line += 1;
            line_start = i;
            continue;
        }
        if c.is_ascii_whitespace() {
            i += 1;
            continue;
        }
        if c == b'%' {
            while i < bytes.len() && bytes[i] != b'\n' {
                i += 1;
            }
            continue;
        }
        let start = i;
        let tok = if c.is_ascii_alphabetic() || c == b'_' {
            while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                i += 1;
            }
            let word = &text[start..i];
            if c.is_ascii_uppercase() || c == b'_' {
                Tok::Var(word.to_string())
            } else {
                Tok::Ident(word.to_string())
            }
        } else if c.is_ascii_digit() {
            while i < bytes.len() && bytes[i].is_ascii_digit() {
                i += 1;
            }
            let digits = &text[start..i];
            match digits.parse::<i128>() {
                Ok(v) if v <= i64::MAX as i128 + 1 => Tok::Int(v),
                _ => {
                    return Err(Error::Parse {
                        message: format!("integer literal {digits} is out of range"),
                        span: span_at(start, i, line, line_start),
                    })
                }
            }
        } else {
            let next = bytes.get(i + 1).copied();
            let (tok, len) = match (c, next) {
                (b':', Some(b'-')) => (Tok::If, 2),
                (b'<', Some(b'=')) => (Tok::Le, 2),
                (b'>', Some(b'=')) => (Tok::Ge, 2),
                (b'!', Some(b'=')) => (Tok::Ne, 2),
                (b'(', _) => (Tok::LParen, 1),
                (b')', _) => (Tok::RParen, 1),
                (b'{', _) => (Tok::LBrace, 1),
                (b'}', _) => (Tok::RBrace, 1),
                (b',', _) => (Tok::Comma, 1),
                (b'.', _) => (Tok::Dot, 1),
                (b':', _) => (Tok::Colon, 1),
                (b'|', _) => (Tok::Bar, 1),
                (b'-', _) => (Tok::Minus, 1),
                (b'+', _) => (Tok::Plus, 1),
                (b'*', _) => (Tok::Star, 1),
                (b'<', _) => (Tok::Lt, 1),
                (b'>', _) => (Tok::Gt, 1),
                (b'=', _) => (Tok::Eq, 1),
                _ => {
                    let ch = text[i..].chars().next().unwrap_or('?');
                    return Err(Error::Parse {
                        message: format!("unexpected character `{ch}`"),
                        span: span_at(start, start + ch.len_utf8(), line, line_start),
                    });
                }
            };
            i += len;
            tok
        };
        out.push(Token {
            tok,
            span: span_at(start, i, line, line_start),
        });
    }
    let column = text[line_start..].chars().count() + 1;
    out.push(Token {
        tok: Tok::Eof,
        span: SourceSpan {
            begin: text.len(),
            end: text.len(),
            line,
            column,
        },
    });
    Ok(out)
}
