//! PDF object model and the tokenizer/parser shared by file bodies and
//! content streams.

use std::collections::BTreeMap;

use crate::PdfError;

pub type Dict = BTreeMap<Vec<u8>, Object>;

#[derive(Clone, Debug, PartialEq)]
pub enum Object {
    Null,
    Bool(bool),
    Int(i64),
    Real(f64),
    Name(Vec<u8>),
    String(Vec<u8>),
    Array(Vec<Object>),
    Dict(Dict),
    Stream(Stream),
    Ref(u32, u16),
}

#[derive(Clone, Debug, PartialEq)]
pub struct Stream {
    pub dict: Dict,
    /// Still encoded.
    pub raw: Vec<u8>,
}

impl Object {
    pub fn as_f64(&self) -> Option<f64> {
        match *self {
            Object::Int(i) => Some(i as f64),
            Object::Real(r) => Some(r),
            _ => None,
        }
    }

    pub fn as_i64(&self) -> Option<i64> {
        match *self {
            Object::Int(i) => Some(i),
            Object::Real(r) if r.fract() == 0.0 => Some(r as i64),
            _ => None,
        }
    }

    pub fn as_name(&self) -> Option<&[u8]> {
        match self {
            Object::Name(n) => Some(n),
            _ => None,
        }
    }

    pub fn as_dict(&self) -> Option<&Dict> {
        match self {
            Object::Dict(d) => Some(d),
            Object::Stream(s) => Some(&s.dict),
            _ => None,
        }
    }

    pub fn as_array(&self) -> Option<&[Object]> {
        match self {
            Object::Array(a) => Some(a),
            _ => None,
        }
    }
}

pub(crate) fn is_whitespace(b: u8) -> bool {
    matches!(b, b' ' | b'\t' | b'\r' | b'\n' | b'\x0c' | b'\0')
}

pub(crate) fn is_delimiter(b: u8) -> bool {
    matches!(b, b'(' | b')' | b'<' | b'>' | b'[' | b']' | b'{' | b'}' | b'/' | b'%')
}

#[derive(Clone, Debug, PartialEq)]
pub enum Token {
    Int(i64),
    Real(f64),
    Name(Vec<u8>),
    String(Vec<u8>),
    ArrayOpen,
    ArrayClose,
    DictOpen,
    DictClose,
    /// Bare word: operators, `obj`, `R`, `true`, ...
    Keyword(Vec<u8>),
}

pub struct Lexer<'a> {
    pub data: &'a [u8],
    pub pos: usize,
}

impl<'a> Lexer<'a> {
    pub fn new(data: &'a [u8]) -> Self {
        Self { data, pos: 0 }
    }

    pub fn at(data: &'a [u8], pos: usize) -> Self {
        Self { data, pos }
    }

    fn peek(&self) -> Option<u8> {
        self.data.get(self.pos).copied()
    }

    pub fn skip_ws(&mut self) {
        while let Some(b) = self.peek() {
            if is_whitespace(b) {
                self.pos += 1;
            } else if b == b'%' {
                while let Some(c) = self.peek() {
                    if c == b'\r' || c == b'\n' {
                        break;
                    }
                    self.pos += 1;
                }
            } else {
                break;
            }
        }
    }

    pub fn next_token(&mut self) -> Result<Option<Token>, PdfError> {
        self.skip_ws();
        let Some(b) = self.peek() else { return Ok(None) };
        let tok = match b {
            b'[' => {
                self.pos += 1;
                Token::ArrayOpen
            }
            b']' => {
                self.pos += 1;
                Token::ArrayClose
            }
            b'<' if self.data.get(self.pos + 1) == Some(&b'<') => {
                self.pos += 2;
                Token::DictOpen
            }
            b'>' if self.data.get(self.pos + 1) == Some(&b'>') => {
                self.pos += 2;
                Token::DictClose
            }
            b'<' => Token::String(self.hex_string()?),
            b'(' => Token::String(self.literal_string()?),
            b'/' => {
                self.pos += 1;
                Token::Name(self.name())
            }
            b'{' | b'}' | b')' | b'>' => {
                // stray delimiters (PostScript calculator braces, garbage) read as keywords
                self.pos += 1;
                Token::Keyword(vec![b])
            }
            _ => {
                let start = self.pos;
                while let Some(c) = self.peek() {
                    if is_whitespace(c) || is_delimiter(c) {
                        break;
                    }
                    self.pos += 1;
                }
                let word = &self.data[start..self.pos];
                number(word).unwrap_or_else(|| Token::Keyword(word.to_vec()))
            }
        };
        Ok(Some(tok))
    }

    fn name(&mut self) -> Vec<u8> {
        let mut out = Vec::new();
        while let Some(c) = self.peek() {
            if is_whitespace(c) || is_delimiter(c) {
                break;
            }
            self.pos += 1;
            if c == b'#' {
                let hex = self.data.get(self.pos..self.pos + 2).and_then(|h| std::str::from_utf8(h).ok());
                if let Some(v) = hex.and_then(|h| u8::from_str_radix(h, 16).ok()) {
                    out.push(v);
                    self.pos += 2;
                    continue;
                }
            }
            out.push(c);
        }
        out
    }

    fn hex_string(&mut self) -> Result<Vec<u8>, PdfError> {
        self.pos += 1;
        let mut digits = Vec::new();
        loop {
            let Some(c) = self.peek() else {
                return Err(PdfError::Syntax { pos: self.pos, msg: "unterminated hex string".into() });
            };
            self.pos += 1;
            match c {
                b'>' => break,
                c if c.is_ascii_hexdigit() => digits.push((c as char).to_digit(16).unwrap() as u8),
                c if is_whitespace(c) => {}
                _ => return Err(PdfError::Syntax { pos: self.pos - 1, msg: "bad hex digit".into() }),
            }
        }
        if digits.len() % 2 == 1 {
            digits.push(0);
        }
        Ok(digits.chunks(2).map(|p| p[0] << 4 | p[1]).collect())
    }

    fn literal_string(&mut self) -> Result<Vec<u8>, PdfError> {
        self.pos += 1;
        let mut out = Vec::new();
        let mut depth = 1;
        loop {
            let Some(c) = self.peek() else {
                return Err(PdfError::Syntax { pos: self.pos, msg: "unterminated string".into() });
            };
            self.pos += 1;
            match c {
                b'(' => {
                    depth += 1;
                    out.push(c);
                }
                b')' => {
                    depth -= 1;
                    if depth == 0 {
                        break;
                    }
                    out.push(c);
                }
                b'\\' => {
                    let Some(e) = self.peek() else { continue };
                    self.pos += 1;
                    match e {
                        b'n' => out.push(b'\n'),
                        b'r' => out.push(b'\r'),
                        b't' => out.push(b'\t'),
                        b'b' => out.push(0x08),
                        b'f' => out.push(0x0c),
                        b'\r' => {
                            if self.peek() == Some(b'\n') {
                                self.pos += 1;
                            }
                        }
                        b'\n' => {}
                        b'0'..=b'7' => {
                            let mut v = (e - b'0') as u32;
                            for _ in 0..2 {
                                match self.peek() {
                                    Some(d @ b'0'..=b'7') => {
                                        v = v * 8 + (d - b'0') as u32;
                                        self.pos += 1;
                                    }
                                    _ => break,
                                }
                            }
                            out.push(v as u8);
                        }
                        other => out.push(other),
                    }
                }
                b'\r' => {
                    // EOL in a string reads as a single LF
                    if self.peek() == Some(b'\n') {
                        self.pos += 1;
                    }
                    out.push(b'\n');
                }
                _ => out.push(c),
            }
        }
        Ok(out)
    }
}

fn number(word: &[u8]) -> Option<Token> {
    let s = std::str::from_utf8(word).ok()?;
    let first = *word.first()?;
    if !(first.is_ascii_digit() || matches!(first, b'+' | b'-' | b'.')) {
        return None;
    }
    if let Ok(i) = s.parse::<i64>() {
        return Some(Token::Int(i));
    }
    if s.bytes().all(|c| c.is_ascii_digit() || matches!(c, b'+' | b'-' | b'.')) {
        // PDF reals have no exponent; tolerate doubled signs like `--5`
        let trimmed = s.trim_start_matches(['+', '-']);
        let neg = s.len() - trimmed.len() > 0 && s.starts_with('-');
        let v: f64 = if trimmed.is_empty() || trimmed == "." { 0.0 } else { trimmed.parse().ok()? };
        return Some(Token::Real(if neg { -v } else { v }));
    }
    None
}

/// Parses objects from a token stream. Keywords other than `true`, `false`,
/// `null` and `R` come back as [`Parsed::Keyword`] so content streams can
/// see operators.
pub enum Parsed {
    Object(Object),
    Keyword(Vec<u8>),
}

pub struct Parser<'a> {
    pub lex: Lexer<'a>,
}

impl<'a> Parser<'a> {
    pub fn new(data: &'a [u8]) -> Self {
        Self { lex: Lexer::new(data) }
    }

    pub fn at(data: &'a [u8], pos: usize) -> Self {
        Self { lex: Lexer::at(data, pos) }
    }

    pub fn pos(&self) -> usize {
        self.lex.pos
    }

    /// Next object or keyword; `None` at end of input.
    pub fn next(&mut self) -> Result<Option<Parsed>, PdfError> {
        let Some(tok) = self.lex.next_token()? else { return Ok(None) };
        Ok(Some(match tok {
            Token::Int(i) => {
                // lookahead for `n g R`
                let save = self.lex.pos;
                if let (Ok(Some(Token::Int(g))), Ok(Some(Token::Keyword(k)))) =
                    (self.lex.next_token(), self.lex.next_token())
                {
                    if k == b"R" && i >= 0 && (0..=u16::MAX as i64).contains(&g) {
                        return Ok(Some(Parsed::Object(Object::Ref(i as u32, g as u16))));
                    }
                }
                self.lex.pos = save;
                Parsed::Object(Object::Int(i))
            }
            Token::Real(r) => Parsed::Object(Object::Real(r)),
            Token::Name(n) => Parsed::Object(Object::Name(n)),
            Token::String(s) => Parsed::Object(Object::String(s)),
            Token::ArrayOpen => {
                let mut items = Vec::new();
                loop {
                    match self.next()? {
                        None => return Err(self.err("unterminated array")),
                        Some(Parsed::Keyword(k)) if k == b"]" => break,
                        Some(Parsed::Object(o)) => items.push(o),
                        Some(Parsed::Keyword(_)) => return Err(self.err("keyword inside array")),
                    }
                }
                Parsed::Object(Object::Array(items))
            }
            Token::ArrayClose => Parsed::Keyword(b"]".to_vec()),
            Token::DictOpen => {
                let mut dict = Dict::new();
                loop {
                    let key = match self.next()? {
                        None => return Err(self.err("unterminated dictionary")),
                        Some(Parsed::Keyword(k)) if k == b">>" => break,
                        Some(Parsed::Object(Object::Name(n))) => n,
                        Some(_) => return Err(self.err("dictionary key is not a name")),
                    };
                    match self.next()? {
                        Some(Parsed::Object(v)) => {
                            if v != Object::Null {
                                dict.insert(key, v);
                            }
                        }
                        Some(Parsed::Keyword(k)) if k == b">>" => break,
                        _ => return Err(self.err("dictionary value missing")),
                    }
                }
                Parsed::Object(Object::Dict(dict))
            }
            Token::DictClose => Parsed::Keyword(b">>".to_vec()),
            Token::Keyword(k) => match k.as_slice() {
                b"true" => Parsed::Object(Object::Bool(true)),
                b"false" => Parsed::Object(Object::Bool(false)),
                b"null" => Parsed::Object(Object::Null),
                _ => Parsed::Keyword(k),
            },
        }))
    }

    pub fn object(&mut self) -> Result<Object, PdfError> {
        match self.next()? {
            Some(Parsed::Object(o)) => Ok(o),
            Some(Parsed::Keyword(k)) => Err(self.err(&format!("unexpected `{}`", String::from_utf8_lossy(&k)))),
            None => Err(self.err("unexpected end of data")),
        }
    }

    pub fn keyword(&mut self, want: &[u8]) -> Result<(), PdfError> {
        match self.next()? {
            Some(Parsed::Keyword(k)) if k == want => Ok(()),
            _ => Err(self.err(&format!("expected `{}`", String::from_utf8_lossy(want)))),
        }
    }

    pub fn err(&self, msg: &str) -> PdfError {
        PdfError::Syntax { pos: self.lex.pos, msg: msg.into() }
    }
}
