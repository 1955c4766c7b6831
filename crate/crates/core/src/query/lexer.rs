// Copyright 2026 The Cohana Authors. Licensed under Apache-2.0.

use super::ParseError;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Tok {
    /// Bare word; keywords are recognized by the parser case-insensitively.
    Word(String),
    /// Backquoted identifier, never a keyword.
    Quoted(String),
    Str(String),
    Int(i64),
    Comma,
    LParen,
    RParen,
    LBracket,
    RBracket,
    Star,
    Semi,
    Eq,
    Ne,
    Lt,
    Le,
    Gt,
    Ge,
    Eof,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Token {
    pub tok: Tok,
    /// Byte offset in the query text.
    pub pos: usize,
}

const RESERVED: &[&str] = &[
    "SELECT",
    "FROM",
    "BIRTH",
    "AGE",
    "ACTIVITIES",
    "IN",
    "COHORT",
    "BY",
    "AND",
    "OR",
    "NOT",
    "BETWEEN",
    "AS",
    "COHORTSIZE",
    "WHERE",
    "GROUP",
    "JOIN",
    "HAVING",
    "ORDER",
    "LIMIT",
    "UNION",
    "WITH",
];

/// Words that cannot be used as bare identifiers.
pub fn is_reserved(word: &str) -> bool {
    RESERVED.iter().any(|k| k.eq_ignore_ascii_case(word))
}

pub fn tokenize(text: &str) -> Result<Vec<Token>, ParseError> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        let start = i;
        if c.is_ascii_whitespace() {
            i += 1;
            continue;
        }
        if c == b'-' && bytes.get(i + 1) == Some(&b'-') {
            while i < bytes.len() && bytes[i] != b'\n' {
                i += 1;
            }
            continue;
        }
        let simple = |t: Tok, n: usize| (t, n);
        let (tok, len) = match c {
            b',' => simple(Tok::Comma, 1),
            b'(' => simple(Tok::LParen, 1),
            b')' => simple(Tok::RParen, 1),
            b'[' => simple(Tok::LBracket, 1),
            b']' => simple(Tok::RBracket, 1),
            b'*' => simple(Tok::Star, 1),
            b';' => simple(Tok::Semi, 1),
            b'=' => simple(Tok::Eq, if bytes.get(i + 1) == Some(&b'=') { 2 } else { 1 }),
            b'!' if bytes.get(i + 1) == Some(&b'=') => simple(Tok::Ne, 2),
            b'<' => match bytes.get(i + 1) {
                Some(b'=') => simple(Tok::Le, 2),
                Some(b'>') => simple(Tok::Ne, 2),
                _ => simple(Tok::Lt, 1),
            },
            b'>' => match bytes.get(i + 1) {
                Some(b'=') => simple(Tok::Ge, 2),
                _ => simple(Tok::Gt, 1),
            },
            b'"' | b'\'' => {
                let (s, n) = string(text, i, c)?;
                (Tok::Str(s), n)
            }
            b'`' => {
                let (s, n) = string(text, i, c)?;
                if s.is_empty() {
                    return Err(ParseError::new(start, "empty quoted identifier"));
                }
                (Tok::Quoted(s), n)
            }
            b'0'..=b'9' | b'-' => {
                let mut j = i + 1;
                while j < bytes.len() && bytes[j].is_ascii_digit() {
                    j += 1;
                }
                let lit = &text[i..j];
                let v = lit
                    .parse::<i64>()
                    .map_err(|_| ParseError::new(start, format!("invalid number `{lit}`")))?;
                if j < bytes.len() && (bytes[j].is_ascii_alphabetic() || bytes[j] == b'_') {
                    return Err(ParseError::new(j, "unexpected character after number"));
                }
                (Tok::Int(v), j - i)
            }
            c if c.is_ascii_alphabetic() || c == b'_' => {
                let mut j = i + 1;
                while j < bytes.len() && (bytes[j].is_ascii_alphanumeric() || bytes[j] == b'_') {
                    j += 1;
                }
                (Tok::Word(text[i..j].to_string()), j - i)
            }
            _ => {
                let ch = text[i..].chars().next().unwrap_or('?');
                return Err(ParseError::new(start, format!("unexpected character `{ch}`")));
            }
        };
        out.push(Token { tok, pos: start });
        i += len;
    }
    out.push(Token {
        tok: Tok::Eof,
        pos: text.len(),
    });
    Ok(out)
}

// Reads a quoted run starting at `start`. A backslash escapes the next
// character; a doubled quote also stands for one quote character.
fn string(text: &str, start: usize, quote: u8) -> Result<(String, usize), ParseError> {
    let bytes = text.as_bytes();
    let mut out = String::new();
    let mut i = start + 1;
    loop {
        let Some(&c) = bytes.get(i) else {
            return Err(ParseError::new(start, "unterminated quoted text"));
        };
        if c == quote {
            if bytes.get(i + 1) == Some(&quote) {
                out.push(quote as char);
                i += 2;
                continue;
            }
            return Ok((out, i + 1 - start));
        }
        if c == b'\\' && quote != b'`' {
            let Some(next) = text[i + 1..].chars().next() else {
                return Err(ParseError::new(start, "unterminated quoted text"));
            };
            out.push(next);
            i += 1 + next.len_utf8();
            continue;
        }
        let ch = text[i..].chars().next().expect("in bounds");
        out.push(ch);
        i += ch.len_utf8();
    }
}
