//! Cross-reference parsing, the object store, and the page tree.

use std::collections::{BTreeMap, HashSet};

use crate::filters::decode_stream;
use crate::object::{Dict, Object, Parsed, Parser, Stream};
use crate::PdfError;

#[derive(Clone, Copy, Debug, PartialEq)]
enum XrefEntry {
    Offset(usize),
    /// Object stream number and index inside it.
    Compressed(u32, usize),
}

/// One page: its media box in PDF user space `[x0 y0 x1 y1]` and inherited
/// resources.
#[derive(Clone, Debug)]
pub struct PageInfo {
    pub media_box: [f64; 4],
    pub resources: Dict,
    pub contents: Vec<Object>,
}

impl PageInfo {
    pub fn width(&self) -> f64 {
        self.media_box[2] - self.media_box[0]
    }

    pub fn height(&self) -> f64 {
        self.media_box[3] - self.media_box[1]
    }
}

/// A parsed document. All objects are decoded up front, so page extraction
/// only reads shared state.
#[derive(Debug)]
pub struct PdfDocument {
    objects: BTreeMap<u32, Object>,
    pub pages: Vec<PageInfo>,
}

fn find_last(hay: &[u8], needle: &[u8]) -> Option<usize> {
    hay.windows(needle.len()).rposition(|w| w == needle)
}

fn find_from(hay: &[u8], needle: &[u8], from: usize) -> Option<usize> {
    hay.get(from..)?.windows(needle.len()).position(|w| w == needle).map(|p| p + from)
}

fn xref_err(msg: impl Into<String>) -> PdfError {
    PdfError::MalformedXref(msg.into())
}

struct Loader<'a> {
    data: &'a [u8],
    entries: BTreeMap<u32, XrefEntry>,
    trailer: Dict,
}

impl<'a> Loader<'a> {
    fn new(data: &'a [u8]) -> Result<Self, PdfError> {
        let tail_start = data.len().saturating_sub(2048);
        let sx = find_last(&data[tail_start..], b"startxref").ok_or_else(|| xref_err("no startxref"))? + tail_start;
        let mut p = Parser::at(data, sx + b"startxref".len());
        let offset = match p.next()? {
            Some(Parsed::Object(Object::Int(o))) if o >= 0 && (o as usize) < data.len() => o as usize,
            _ => return Err(xref_err("bad startxref offset")),
        };
        let mut loader = Loader { data, entries: BTreeMap::new(), trailer: Dict::new() };
        let mut seen = HashSet::new();
        let mut next = Some(offset);
        let mut first = true;
        while let Some(off) = next {
            if !seen.insert(off) || off >= data.len() {
                return Err(xref_err(format!("xref chain revisits or overruns offset {off}")));
            }
            let section_trailer = loader.section(off)?;
            if let Some(Object::Int(hybrid)) = section_trailer.get(&b"XRefStm"[..]) {
                loader.section(*hybrid as usize)?;
            }
            next = match section_trailer.get(&b"Prev"[..]) {
                Some(Object::Int(p)) if *p >= 0 => Some(*p as usize),
                _ => None,
            };
            if first {
                loader.trailer = section_trailer;
                first = false;
            } else {
                for (k, v) in section_trailer {
                    loader.trailer.entry(k).or_insert(v);
                }
            }
        }
        Ok(loader)
    }

    /// Reads one xref section (table or stream) and returns its trailer.
    /// Entries already known from a newer section win.
    fn section(&mut self, off: usize) -> Result<Dict, PdfError> {
        let mut p = Parser::at(self.data, off);
        p.lex.skip_ws();
        if self.data[p.pos()..].starts_with(b"xref") {
            p.lex.pos += 4;
            self.table(&mut p)
        } else {
            let (_, obj) = parse_indirect(self.data, off).map_err(|e| xref_err(format!("xref stream: {e}")))?;
            let Object::Stream(s) = obj else { return Err(xref_err("xref offset points at a non-stream")) };
            self.stream_section(&s)?;
            Ok(s.dict)
        }
    }

    fn table(&mut self, p: &mut Parser) -> Result<Dict, PdfError> {
        loop {
            match p.next().map_err(|e| xref_err(e.to_string()))? {
                Some(Parsed::Keyword(k)) if k == b"trailer" => {
                    return match p.object().map_err(|e| xref_err(e.to_string()))? {
                        Object::Dict(d) => Ok(d),
                        _ => Err(xref_err("trailer is not a dictionary")),
                    };
                }
                Some(Parsed::Object(Object::Int(start))) => {
                    let count = match p.next().map_err(|e| xref_err(e.to_string()))? {
                        Some(Parsed::Object(Object::Int(c))) if c >= 0 => c,
                        _ => return Err(xref_err("bad subsection header")),
                    };
                    for i in 0..count {
                        let fields = (p.next(), p.next(), p.next());
                        let (
                            Ok(Some(Parsed::Object(Object::Int(o)))),
                            Ok(Some(Parsed::Object(Object::Int(_)))),
                            Ok(Some(Parsed::Keyword(kind))),
                        ) = fields
                        else {
                            return Err(xref_err("bad xref entry"));
                        };
                        let num = (start + i) as u32;
                        if kind == b"n" && o > 0 {
                            self.entries.entry(num).or_insert(XrefEntry::Offset(o as usize));
                        } else if kind != b"n" && kind != b"f" {
                            return Err(xref_err("xref entry type is neither n nor f"));
                        }
                    }
                }
                _ => return Err(xref_err("expected subsection or trailer")),
            }
        }
    }

    fn stream_section(&mut self, s: &Stream) -> Result<(), PdfError> {
        let data = decode_stream(&s.dict, &s.raw)?;
        let w: Vec<usize> = s
            .dict
            .get(&b"W"[..])
            .and_then(Object::as_array)
            .map(|a| a.iter().filter_map(Object::as_i64).map(|v| v.max(0) as usize).collect())
            .ok_or_else(|| xref_err("xref stream without /W"))?;
        if w.len() != 3 {
            return Err(xref_err("/W must have three entries"));
        }
        let size = s.dict.get(&b"Size"[..]).and_then(Object::as_i64).unwrap_or(0);
        let index: Vec<i64> = match s.dict.get(&b"Index"[..]).and_then(Object::as_array) {
            Some(a) => a.iter().filter_map(Object::as_i64).collect(),
            None => vec![0, size],
        };
        let row = w.iter().sum::<usize>();
        if row == 0 {
            return Err(xref_err("zero-width xref rows"));
        }
        let field = |bytes: &[u8]| bytes.iter().fold(0usize, |acc, &b| acc << 8 | b as usize);
        let mut rows = data.chunks_exact(row);
        for pair in index.chunks(2) {
            let [start, count] = pair else { return Err(xref_err("odd /Index")) };
            for i in 0..*count {
                let r = rows.next().ok_or_else(|| xref_err("xref stream shorter than /Index"))?;
                let kind = if w[0] == 0 { 1 } else { field(&r[..w[0]]) };
                let f2 = field(&r[w[0]..w[0] + w[1]]);
                let f3 = field(&r[w[0] + w[1]..]);
                let num = (start + i) as u32;
                let entry = match kind {
                    1 => XrefEntry::Offset(f2),
                    2 => XrefEntry::Compressed(f2 as u32, f3),
                    _ => continue,
                };
                self.entries.entry(num).or_insert(entry);
            }
        }
        Ok(())
    }
}

/// Parses `n g obj ... endobj` at `off`, reading stream bodies by /Length
/// when it is direct and by scanning for `endstream` otherwise.
fn parse_indirect(data: &[u8], off: usize) -> Result<(u32, Object), PdfError> {
    let mut p = Parser::at(data, off);
    let num = match p.next()? {
        Some(Parsed::Object(Object::Int(n))) if n >= 0 => n as u32,
        _ => return Err(p.err("expected object number")),
    };
    match p.next()? {
        Some(Parsed::Object(Object::Int(_))) => {}
        _ => return Err(p.err("expected generation")),
    }
    p.keyword(b"obj")?;
    let obj = p.object()?;
    let after = p.pos();
    let mut lx = crate::object::Lexer::at(data, after);
    lx.skip_ws();
    if !data[lx.pos..].starts_with(b"stream") {
        return Ok((num, obj));
    }
    let Object::Dict(dict) = obj else { return Err(p.err("stream keyword after non-dictionary")) };
    let mut start = lx.pos + b"stream".len();
    if data.get(start) == Some(&b'\r') {
        start += 1;
    }
    if data.get(start) == Some(&b'\n') {
        start += 1;
    }
    let by_length = dict.get(&b"Length"[..]).and_then(Object::as_i64).and_then(|len| {
        let end = start.checked_add(usize::try_from(len).ok()?)?;
        let mut tail = crate::object::Lexer::at(data, end.min(data.len()));
        tail.skip_ws();
        data.get(tail.pos..)?.starts_with(b"endstream").then_some(end)
    });
    let end = match by_length {
        Some(e) => e,
        None => {
            let e = find_from(data, b"endstream", start)
                .ok_or_else(|| PdfError::Syntax { pos: start, msg: "unterminated stream".into() })?;
            // drop the EOL that precedes the keyword
            let mut e = e;
            if e > start && data[e - 1] == b'\n' {
                e -= 1;
            }
            if e > start && data[e - 1] == b'\r' {
                e -= 1;
            }
            e
        }
    };
    Ok((num, Object::Stream(Stream { dict, raw: data[start..end].to_vec() })))
}

impl PdfDocument {
    pub fn open(data: &[u8]) -> Result<Self, PdfError> {
        let head = &data[..data.len().min(1024)];
        if find_from(head, b"%PDF-", 0).is_none() {
            return Err(PdfError::NotPdf);
        }
        let loader = Loader::new(data)?;
        if loader.trailer.contains_key(&b"Encrypt"[..]) {
            return Err(PdfError::Encrypted);
        }
        let mut objects = BTreeMap::new();
        let mut compressed: BTreeMap<u32, Vec<(u32, usize)>> = BTreeMap::new();
        for (&num, &entry) in &loader.entries {
            match entry {
                XrefEntry::Offset(off) => {
                    if off >= data.len() {
                        return Err(xref_err(format!("object {num} offset {off} past end of file")));
                    }
                    let (found, obj) = parse_indirect(data, off)
                        .map_err(|e| xref_err(format!("object {num} at offset {off}: {e}")))?;
                    if found != num {
                        return Err(xref_err(format!("offset {off} holds object {found}, expected {num}")));
                    }
                    objects.insert(num, obj);
                }
                XrefEntry::Compressed(stm, idx) => compressed.entry(stm).or_default().push((num, idx)),
            }
        }
        let mut doc = PdfDocument { objects, pages: Vec::new() };
        for (stm, members) in compressed {
            let Some(Object::Stream(s)) = doc.objects.get(&stm).cloned() else {
                return Err(xref_err(format!("object stream {stm} missing")));
            };
            for (num, obj) in doc.unpack_object_stream(&s, &members)? {
                doc.objects.entry(num).or_insert(obj);
            }
        }
        let root = doc
            .get_dict(loader.trailer.get(&b"Root"[..]))
            .ok_or_else(|| PdfError::Structure("no document catalog".into()))?;
        let pages_root =
            root.get(&b"Pages"[..]).cloned().ok_or_else(|| PdfError::Structure("catalog without /Pages".into()))?;
        let mut pages = Vec::new();
        doc.walk_pages(&pages_root, None, None, &mut pages, &mut HashSet::new(), 0)?;
        if pages.is_empty() {
            return Err(PdfError::Structure("document has no pages".into()));
        }
        doc.pages = pages;
        Ok(doc)
    }

    fn unpack_object_stream(&self, s: &Stream, members: &[(u32, usize)]) -> Result<Vec<(u32, Object)>, PdfError> {
        let data = decode_stream(&s.dict, &s.raw)?;
        let n = s.dict.get(&b"N"[..]).and_then(Object::as_i64).unwrap_or(0).max(0) as usize;
        let first = s.dict.get(&b"First"[..]).and_then(Object::as_i64).unwrap_or(0).max(0) as usize;
        let mut header = Parser::new(&data);
        let mut offsets = Vec::with_capacity(n);
        for _ in 0..n {
            let (Some(Parsed::Object(Object::Int(num))), Some(Parsed::Object(Object::Int(off)))) =
                (header.next()?, header.next()?)
            else {
                return Err(PdfError::Structure("bad object stream header".into()));
            };
            offsets.push((num as u32, off as usize));
        }
        let mut out = Vec::new();
        for &(num, idx) in members {
            let Some(&(found, off)) = offsets.get(idx) else { continue };
            if found != num {
                continue;
            }
            let obj = Parser::at(&data, first + off).object()?;
            out.push((num, obj));
        }
        Ok(out)
    }

    pub fn resolve<'s>(&'s self, obj: &'s Object) -> &'s Object {
        let mut cur = obj;
        for _ in 0..32 {
            match cur {
                Object::Ref(n, _) => match self.objects.get(n) {
                    Some(o) => cur = o,
                    None => return &Object::Null,
                },
                _ => return cur,
            }
        }
        &Object::Null
    }

    pub fn get_dict<'s>(&'s self, obj: Option<&'s Object>) -> Option<&'s Dict> {
        obj.map(|o| self.resolve(o)).and_then(Object::as_dict)
    }

    /// Looks `key` up in `dict` and follows references.
    pub fn lookup<'s>(&'s self, dict: &'s Dict, key: &[u8]) -> Option<&'s Object> {
        dict.get(key).map(|o| self.resolve(o)).filter(|o| **o != Object::Null)
    }

    pub fn number(&self, dict: &Dict, key: &[u8]) -> Option<f64> {
        self.lookup(dict, key).and_then(Object::as_f64)
    }

    pub fn stream_data(&self, obj: &Object) -> Result<Option<Vec<u8>>, PdfError> {
        match self.resolve(obj) {
            Object::Stream(s) => decode_stream(&s.dict, &s.raw).map(Some),
            _ => Ok(None),
        }
    }

    fn media_box(&self, obj: Option<&Object>) -> Option<[f64; 4]> {
        let arr = obj.map(|o| self.resolve(o)).and_then(Object::as_array)?;
        let v: Vec<f64> = arr.iter().filter_map(|o| self.resolve(o).as_f64()).collect();
        let [a, b, c, d] = v[..] else { return None };
        let r = [a.min(c), b.min(d), a.max(c), b.max(d)];
        (r[2] > r[0] && r[3] > r[1]).then_some(r)
    }

    fn walk_pages(
        &self,
        node: &Object,
        media: Option<[f64; 4]>,
        resources: Option<&Dict>,
        out: &mut Vec<PageInfo>,
        seen: &mut HashSet<u32>,
        depth: usize,
    ) -> Result<(), PdfError> {
        if depth > 64 {
            return Err(PdfError::Structure("page tree too deep".into()));
        }
        if let Object::Ref(n, _) = node {
            if !seen.insert(*n) {
                return Err(PdfError::Structure(format!("page tree cycle at object {n}")));
            }
        }
        let Some(dict) = self.resolve(node).as_dict() else {
            return Err(PdfError::Structure("page tree node is not a dictionary".into()));
        };
        let media = self.media_box(dict.get(&b"MediaBox"[..])).or(media);
        let resources = self.get_dict(dict.get(&b"Resources"[..])).or(resources);
        let is_pages =
            dict.get(&b"Type"[..]).and_then(Object::as_name) == Some(b"Pages") || dict.contains_key(&b"Kids"[..]);
        if is_pages {
            let kids = self.lookup(dict, b"Kids").and_then(Object::as_array).unwrap_or(&[]);
            for kid in kids {
                self.walk_pages(kid, media, resources, out, seen, depth + 1)?;
            }
            return Ok(());
        }
        let media_box = media.ok_or_else(|| PdfError::Structure(format!("page {} has no media box", out.len())))?;
        let contents = match dict.get(&b"Contents"[..]) {
            None => Vec::new(),
            Some(c) => match self.resolve(c) {
                Object::Array(a) => a.clone(),
                _ => vec![c.clone()],
            },
        };
        out.push(PageInfo { media_box, resources: resources.cloned().unwrap_or_default(), contents });
        Ok(())
    }

    pub fn page_count(&self) -> usize {
        self.pages.len()
    }

    /// Concatenated, decoded content streams of a page.
    pub fn page_content(&self, page: usize) -> Result<Vec<u8>, PdfError> {
        let info = self.pages.get(page).ok_or(PdfError::PageOutOfRange { page, count: self.pages.len() })?;
        let mut out = Vec::new();
        for c in &info.contents {
            if let Some(data) = self.stream_data(c)? {
                out.extend_from_slice(&data);
                out.push(b'\n');
            }
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Assembles a PDF with a correct xref table from object bodies.
    pub(crate) fn build_pdf(objects: &[&str], trailer_extra: &str) -> Vec<u8> {
        let mut out = b"%PDF-1.4\n".to_vec();
        let mut offsets = Vec::new();
        for (i, body) in objects.iter().enumerate() {
            offsets.push(out.len());
            out.extend_from_slice(format!("{} 0 obj\n{}\nendobj\n", i + 1, body).as_bytes());
        }
        let xref = out.len();
        out.extend_from_slice(format!("xref\n0 {}\n0000000000 65535 f \n", objects.len() + 1).as_bytes());
        for o in offsets {
            out.extend_from_slice(format!("{o:010} 00000 n \n").as_bytes());
        }
        out.extend_from_slice(
            format!(
                "trailer\n<< /Size {} /Root 1 0 R {trailer_extra} >>\nstartxref\n{xref}\n%%EOF\n",
                objects.len() + 1
            )
            .as_bytes(),
        );
        out
    }

    fn stream(content: &str) -> String {
        format!("<< /Length {} >>\nstream\n{content}\nendstream", content.len())
    }

    fn minimal(content: &str) -> Vec<u8> {
        build_pdf(
            &[
                "<< /Type /Catalog /Pages 2 0 R >>",
                "<< /Type /Pages /Kids [3 0 R] /Count 1 /MediaBox [0 0 200 200] >>",
                "<< /Type /Page /Parent 2 0 R /Contents 4 0 R >>",
                &stream(content),
            ],
            "",
        )
    }

    #[test]
    fn opens_minimal_document() {
        let doc = PdfDocument::open(&minimal("0 0 100 50 re S")).unwrap();
        assert_eq!(doc.page_count(), 1);
        assert_eq!(doc.pages[0].media_box, [0.0, 0.0, 200.0, 200.0]);
        assert_eq!(doc.page_content(0).unwrap(), b"0 0 100 50 re S\n");
    }

    #[test]
    fn rejects_non_pdf_and_truncation() {
        assert!(matches!(PdfDocument::open(b"hello"), Err(PdfError::NotPdf)));
        let full = minimal("");
        let cut = &full[..full.len() / 2];
        assert!(matches!(PdfDocument::open(cut), Err(PdfError::MalformedXref(_))));
    }

    #[test]
    fn rejects_bad_offsets() {
        let mut pdf = minimal("");
        let text = String::from_utf8(pdf.clone()).unwrap();
        let at = text.find("0000000009 00000 n").unwrap();
        pdf[at..at + 10].copy_from_slice(b"0000000030");
        assert!(matches!(PdfDocument::open(&pdf), Err(PdfError::MalformedXref(_))));
    }

    #[test]
    fn rejects_encryption() {
        let pdf = build_pdf(
            &[
                "<< /Type /Catalog /Pages 2 0 R >>",
                "<< /Type /Pages /Kids [3 0 R] /Count 1 >>",
                "<< /Type /Page /MediaBox [0 0 10 10] >>",
                "<< /Filter /Standard /V 1 /R 2 >>",
            ],
            "/Encrypt 4 0 R",
        );
        assert!(matches!(PdfDocument::open(&pdf), Err(PdfError::Encrypted)));
    }

    #[test]
    fn inherits_media_box_and_resources() {
        let pdf = build_pdf(
            &[
                "<< /Type /Catalog /Pages 2 0 R >>",
                "<< /Type /Pages /Kids [3 0 R 4 0 R] /Count 2 /MediaBox [0 0 300 400] /Resources << /Font << >> >> >>",
                "<< /Type /Page /Parent 2 0 R >>",
                "<< /Type /Page /Parent 2 0 R /MediaBox [10 10 110 60] >>",
            ],
            "",
        );
        let doc = PdfDocument::open(&pdf).unwrap();
        assert_eq!(doc.page_count(), 2);
        assert_eq!(doc.pages[0].media_box, [0.0, 0.0, 300.0, 400.0]);
        assert!(doc.pages[0].resources.contains_key(&b"Font"[..]));
        assert_eq!(doc.pages[1].width(), 100.0);
        assert_eq!(doc.pages[1].height(), 50.0);
        assert!(matches!(doc.page_content(2), Err(PdfError::PageOutOfRange { page: 2, count: 2 })));
    }

    #[test]
    fn indirect_length_falls_back_to_scanning() {
        let pdf = build_pdf(
            &[
                "<< /Type /Catalog /Pages 2 0 R >>",
                "<< /Type /Pages /Kids [3 0 R] /Count 1 /MediaBox [0 0 50 50] >>",
                "<< /Type /Page /Contents 4 0 R >>",
                "<< /Length 5 0 R >>\nstream\n1 0 0 1 0 0 cm\nendstream",
                "15",
            ],
            "",
        );
        let doc = PdfDocument::open(&pdf).unwrap();
        assert_eq!(doc.page_content(0).unwrap(), b"1 0 0 1 0 0 cm\n");
    }
}
