//! Font metrics and code-to-Unicode mapping for text extraction.

use std::collections::HashMap;

use crate::document::PdfDocument;
use crate::encoding::{by_name, glyph_to_unicode, standard, standard_width, CodeTable};
use crate::object::{Dict, Object, Parsed, Parser};

pub const REPLACEMENT: char = '\u{FFFD}';

/// Parsed ToUnicode CMap: code → text, with code byte lengths from the
/// codespace ranges.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct ToUnicode {
    map: HashMap<u32, String>,
}

fn code_of(bytes: &[u8]) -> u32 {
    bytes.iter().fold(0u32, |acc, &b| acc << 8 | b as u32)
}

fn utf16be(bytes: &[u8]) -> String {
    let units: Vec<u16> = bytes.chunks(2).map(|c| u16::from_be_bytes([c[0], *c.get(1).unwrap_or(&0)])).collect();
    String::from_utf16_lossy(&units)
}

impl ToUnicode {
    pub fn parse(data: &[u8]) -> Self {
        let mut map = HashMap::new();
        let mut p = Parser::new(data);
        let mut operands: Vec<Object> = Vec::new();
        let mut mode: Option<&'static [u8]> = None;
        loop {
            let item = match p.next() {
                Ok(Some(i)) => i,
                Ok(None) => break,
                // skip an unparsable byte and carry on
                Err(_) => {
                    p.lex.pos += 1;
                    continue;
                }
            };
            match item {
                Parsed::Object(o) => {
                    if mode.is_some() {
                        operands.push(o);
                    }
                }
                Parsed::Keyword(k) => match k.as_slice() {
                    b"beginbfchar" => {
                        mode = Some(b"bfchar");
                        operands.clear();
                    }
                    b"beginbfrange" => {
                        mode = Some(b"bfrange");
                        operands.clear();
                    }
                    b"endbfchar" => {
                        for pair in operands.chunks_exact(2) {
                            if let (Object::String(src), Object::String(dst)) = (&pair[0], &pair[1]) {
                                map.insert(code_of(src), utf16be(dst));
                            }
                        }
                        mode = None;
                    }
                    b"endbfrange" => {
                        for triple in operands.chunks_exact(3) {
                            let (Object::String(lo), Object::String(hi)) = (&triple[0], &triple[1]) else { continue };
                            let (lo, hi) = (code_of(lo), code_of(hi));
                            if hi < lo || hi - lo > 0xFFFF {
                                continue;
                            }
                            match &triple[2] {
                                Object::String(dst) if !dst.is_empty() => {
                                    let mut units: Vec<u16> = dst
                                        .chunks(2)
                                        .map(|c| u16::from_be_bytes([c[0], *c.get(1).unwrap_or(&0)]))
                                        .collect();
                                    for code in lo..=hi {
                                        map.insert(code, String::from_utf16_lossy(&units));
                                        let last = units.last_mut().unwrap();
                                        *last = last.wrapping_add(1);
                                    }
                                }
                                Object::Array(items) => {
                                    for (code, item) in (lo..=hi).zip(items) {
                                        if let Object::String(dst) = item {
                                            map.insert(code, utf16be(dst));
                                        }
                                    }
                                }
                                _ => {}
                            }
                        }
                        mode = None;
                    }
                    _ => {}
                },
            }
        }
        Self { map }
    }

    pub fn get(&self, code: u32) -> Option<&str> {
        self.map.get(&code).map(String::as_str)
    }
}

#[derive(Clone, Debug)]
pub struct Font {
    pub two_byte: bool,
    widths: HashMap<u32, f64>,
    default_width: f64,
    /// Glyph-space units per text-space unit, 0.001 except for Type3.
    width_scale: f64,
    to_unicode: Option<ToUnicode>,
    encoding: Option<Box<CodeTable>>,
    base_font: String,
    /// Ascent and descent as fractions of the font size.
    pub ascent: f64,
    pub descent: f64,
}

impl Font {
    /// Stand-in for a missing font resource: one-byte codes, every glyph
    /// half an em wide, no Unicode mapping.
    pub fn missing() -> Self {
        Self {
            two_byte: false,
            widths: HashMap::new(),
            default_width: 500.0,
            width_scale: 0.001,
            to_unicode: None,
            encoding: None,
            base_font: String::new(),
            ascent: 0.75,
            descent: -0.25,
        }
    }

    pub fn load(doc: &PdfDocument, dict: &Dict) -> Self {
        let mut font = Font::missing();
        let subtype = doc.lookup(dict, b"Subtype").and_then(Object::as_name).unwrap_or(b"");
        font.base_font = doc
            .lookup(dict, b"BaseFont")
            .and_then(Object::as_name)
            .map(|n| String::from_utf8_lossy(n).into_owned())
            .unwrap_or_default();
        if let Some(Object::Stream(s)) = dict.get(&b"ToUnicode"[..]).map(|o| doc.resolve(o)) {
            if let Ok(data) = crate::filters::decode_stream(&s.dict, &s.raw) {
                font.to_unicode = Some(ToUnicode::parse(&data));
            }
        }
        let mut descriptor = doc.get_dict(dict.get(&b"FontDescriptor"[..]));
        if subtype == b"Type0" {
            font.two_byte = true;
            font.default_width = 1000.0;
            let desc = doc.lookup(dict, b"DescendantFonts").and_then(Object::as_array).and_then(|a| a.first());
            if let Some(cid) = doc.get_dict(desc) {
                descriptor = doc.get_dict(cid.get(&b"FontDescriptor"[..]));
                if let Some(dw) = doc.number(cid, b"DW") {
                    font.default_width = dw;
                }
                if let Some(w) = doc.lookup(cid, b"W").and_then(Object::as_array) {
                    font.widths = cid_widths(doc, w);
                }
            }
        } else {
            font.encoding = Some(Box::new(simple_encoding(doc, dict)));
            let first = doc.number(dict, b"FirstChar").unwrap_or(0.0) as u32;
            if let Some(ws) = doc.lookup(dict, b"Widths").and_then(Object::as_array) {
                for (i, w) in ws.iter().enumerate() {
                    if let Some(w) = doc.resolve(w).as_f64() {
                        font.widths.insert(first + i as u32, w);
                    }
                }
            }
            if let Some(d) = descriptor {
                if let Some(mw) = doc.number(d, b"MissingWidth") {
                    font.default_width = mw;
                }
            }
            if subtype == b"Type3" {
                if let Some(m) = doc.lookup(dict, b"FontMatrix").and_then(Object::as_array) {
                    if let Some(a) = m.first().and_then(|o| doc.resolve(o).as_f64()) {
                        font.width_scale = a.abs();
                    }
                }
            }
        }
        if let Some(d) = descriptor {
            let asc = doc.number(d, b"Ascent").unwrap_or(0.0);
            let desc = doc.number(d, b"Descent").unwrap_or(0.0);
            if asc > 0.0 && desc <= 0.0 && asc - desc > 0.0 {
                font.ascent = asc / 1000.0;
                font.descent = desc / 1000.0;
            }
        }
        font
    }

    /// Splits a shown string into character codes.
    pub fn codes(&self, bytes: &[u8]) -> Vec<u32> {
        if self.two_byte {
            bytes.chunks(2).map(code_of).collect()
        } else {
            bytes.iter().map(|&b| b as u32).collect()
        }
    }

    /// Advance of `code` in text-space units at font size 1.
    pub fn advance(&self, code: u32) -> f64 {
        let w = match self.widths.get(&code) {
            Some(&w) => w,
            None if !self.two_byte && self.widths.is_empty() && !self.base_font.is_empty() => {
                standard_width(&self.base_font, self.encoded_char(code))
            }
            None => self.default_width,
        };
        w * self.width_scale
    }

    fn encoded_char(&self, code: u32) -> Option<char> {
        self.encoding.as_ref().and_then(|t| t.get(code as usize).copied().flatten())
    }

    /// Text for one code: ToUnicode, then the simple-font encoding, then
    /// the replacement character.
    pub fn decode(&self, code: u32) -> String {
        if let Some(s) = self.to_unicode.as_ref().and_then(|m| m.get(code)) {
            return s.to_string();
        }
        self.encoded_char(code).unwrap_or(REPLACEMENT).to_string()
    }

    /// Word spacing applies to single-byte code 32 only.
    pub fn is_word_space(&self, code: u32) -> bool {
        !self.two_byte && code == 32
    }
}

fn simple_encoding(doc: &PdfDocument, dict: &Dict) -> CodeTable {
    match dict.get(&b"Encoding"[..]).map(|o| doc.resolve(o)) {
        Some(Object::Name(n)) => by_name(n).unwrap_or_else(standard),
        Some(Object::Dict(enc)) => {
            let mut table =
                enc.get(&b"BaseEncoding"[..]).and_then(Object::as_name).and_then(by_name).unwrap_or_else(standard);
            if let Some(diffs) = doc.lookup(enc, b"Differences").and_then(Object::as_array) {
                let mut code = 0usize;
                for item in diffs {
                    match doc.resolve(item) {
                        Object::Int(c) => code = (*c).clamp(0, 255) as usize,
                        Object::Name(name) => {
                            if code < 256 {
                                let text = glyph_to_unicode(&String::from_utf8_lossy(name));
                                table[code] = text.and_then(|t| t.chars().next());
                            }
                            code += 1;
                        }
                        _ => {}
                    }
                }
            }
            table
        }
        _ => standard(),
    }
}

/// `/W` array: `c [w1 w2 ...]` or `c_first c_last w`.
fn cid_widths(doc: &PdfDocument, w: &[Object]) -> HashMap<u32, f64> {
    let mut out = HashMap::new();
    let items: Vec<&Object> = w.iter().map(|o| doc.resolve(o)).collect();
    let mut i = 0;
    while i < items.len() {
        let Some(first) = items[i].as_i64() else { break };
        match items.get(i + 1) {
            Some(Object::Array(ws)) => {
                for (k, v) in ws.iter().enumerate() {
                    if let Some(v) = doc.resolve(v).as_f64() {
                        out.insert(first as u32 + k as u32, v);
                    }
                }
                i += 2;
            }
            Some(last) => {
                let (Some(last), Some(v)) = (last.as_i64(), items.get(i + 2).and_then(|o| o.as_f64())) else { break };
                if last >= first && last - first <= 0xFFFF {
                    for c in first..=last {
                        out.insert(c as u32, v);
                    }
                }
                i += 3;
            }
            None => break,
        }
    }
    out
}
