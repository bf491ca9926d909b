//! Content-stream interpretation: paths become rules and rectangles, text
//! operators become spans, image XObjects become image boxes.

use std::collections::HashMap;
use std::sync::Arc;

use gridlock_core::emit::ImageRef;
use gridlock_core::geometry::{Rect, Segment};
use gridlock_core::page::{PageGraphics, SourceKind, TextSpan};

use crate::document::PdfDocument;
use crate::font::Font;
use crate::object::{Dict, Object, Parsed, Parser};
use crate::PdfError;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Matrix([f64; 6]);

impl Matrix {
    pub const IDENTITY: Matrix = Matrix([1.0, 0.0, 0.0, 1.0, 0.0, 0.0]);

    fn translate(tx: f64, ty: f64) -> Self {
        Matrix([1.0, 0.0, 0.0, 1.0, tx, ty])
    }

    /// `self` applied first, then `other`.
    fn then(&self, other: &Matrix) -> Matrix {
        let [a, b, c, d, e, f] = self.0;
        let [a2, b2, c2, d2, e2, f2] = other.0;
        Matrix([
            a * a2 + b * c2,
            a * b2 + b * d2,
            c * a2 + d * c2,
            c * b2 + d * d2,
            e * a2 + f * c2 + e2,
            e * b2 + f * d2 + f2,
        ])
    }

    fn apply(&self, x: f64, y: f64) -> (f64, f64) {
        let [a, b, c, d, e, f] = self.0;
        (a * x + c * y + e, b * x + d * y + f)
    }

    fn from_operands(ops: &[f64]) -> Option<Matrix> {
        let m: [f64; 6] = ops.try_into().ok()?;
        m.iter().all(|v| v.is_finite()).then_some(Matrix(m))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExtractOptions {
    /// Filled or stroked shapes thinner than this become rules.
    pub thin_rule_pt: f64,
}

impl Default for ExtractOptions {
    fn default() -> Self {
        Self { thin_rule_pt: 3.0 }
    }
}

/// Everything [`extract_page`] recovers from one page.
#[derive(Clone, Debug, PartialEq)]
pub struct ExtractedPage {
    pub graphics: PageGraphics,
    pub images: Vec<(Rect, ImageRef)>,
    pub inline_images_skipped: usize,
    pub warnings: Vec<String>,
}

impl ExtractedPage {
    /// No text and at least one image: treated as a scanned page.
    pub fn is_image_based(&self) -> bool {
        self.graphics.text_spans.is_empty() && !self.images.is_empty()
    }
}

#[derive(Clone)]
struct GState {
    ctm: Matrix,
    font: Arc<Font>,
    font_size: f64,
    char_spacing: f64,
    word_spacing: f64,
    h_scale: f64,
    leading: f64,
    rise: f64,
}

#[derive(Default)]
struct SubPath {
    /// Points in default user space.
    pts: Vec<(f64, f64)>,
    /// `curved[i]` marks the piece from `pts[i]` to `pts[i + 1]` as a curve.
    curved: Vec<bool>,
    closed: bool,
}

struct Glyph {
    text: String,
    bbox: Rect,
    origin_x: f64,
}

/// A run of glyphs being collected into one span.
struct OpenSpan {
    glyphs: Vec<Glyph>,
    upright: bool,
    baseline: f64,
    size: f64,
    /// Page x where the next glyph would start.
    next_x: f64,
}

const MAX_FORM_DEPTH: usize = 12;
/// TJ adjustments wider than this (thousandths of an em) start a new span.
const TJ_SPLIT: f64 = 250.0;

struct Interp<'d> {
    doc: &'d PdfDocument,
    opts: &'d ExtractOptions,
    media: [f64; 4],
    gs: GState,
    stack: Vec<GState>,
    path: Vec<SubPath>,
    text_matrix: Matrix,
    line_matrix: Matrix,
    fonts: HashMap<usize, Arc<Font>>,
    missing_fonts: Vec<String>,
    open: Option<OpenSpan>,
    spans: Vec<TextSpan>,
    segments: Vec<Segment>,
    rects: Vec<Rect>,
    images: Vec<(Rect, ImageRef)>,
    inline_images: usize,
    warnings: Vec<String>,
}

fn numbers(ops: &[Object]) -> Option<Vec<f64>> {
    ops.iter().map(Object::as_f64).collect()
}

impl<'d> Interp<'d> {
    fn to_page(&self, x: f64, y: f64) -> (f64, f64) {
        (x - self.media[0], self.media[3] - y)
    }

    fn run(&mut self, content: &[u8], resources: &Dict, depth: usize) {
        let mut p = Parser::new(content);
        let mut ops: Vec<Object> = Vec::new();
        loop {
            let item = match p.next() {
                Ok(Some(i)) => i,
                Ok(None) => break,
                Err(e) => {
                    self.warnings.push(format!("content stream stopped early: {e}"));
                    break;
                }
            };
            match item {
                Parsed::Object(o) => ops.push(o),
                Parsed::Keyword(k) => {
                    if k == b"BI" {
                        self.skip_inline_image(&mut p);
                    } else {
                        self.op(&k, &ops, resources, depth);
                    }
                    ops.clear();
                }
            }
        }
    }

    fn skip_inline_image(&mut self, p: &mut Parser) {
        self.inline_images += 1;
        let mut length = None;
        let mut key: Option<Vec<u8>> = None;
        loop {
            match p.next() {
                Ok(Some(Parsed::Keyword(k))) if k == b"ID" => break,
                Ok(Some(Parsed::Object(o))) => match key.take() {
                    None => key = o.as_name().map(<[u8]>::to_vec),
                    Some(k) => {
                        if k == b"L" || k == b"Length" {
                            length = o.as_i64();
                        }
                    }
                },
                Ok(Some(_)) => {}
                _ => return,
            }
        }
        let data = p.lex.data;
        let start = p.pos() + 1;
        if let Some(len) = length.and_then(|l| usize::try_from(l).ok()) {
            let mut lx = crate::object::Lexer::at(data, (start + len).min(data.len()));
            lx.skip_ws();
            if data[lx.pos..].starts_with(b"EI") {
                p.lex.pos = lx.pos + 2;
                return;
            }
        }
        let mut i = start;
        while i + 2 <= data.len() {
            let before_ok = i == 0 || crate::object::is_whitespace(data[i - 1]);
            let after_ok = data.get(i + 2).is_none_or(|&b| crate::object::is_whitespace(b));
            if before_ok && after_ok && &data[i..i + 2] == b"EI" {
                p.lex.pos = i + 2;
                return;
            }
            i += 1;
        }
        p.lex.pos = data.len();
    }

    fn op(&mut self, op: &[u8], ops: &[Object], resources: &Dict, depth: usize) {
        let nums = numbers(ops);
        let n = |i: usize| nums.as_ref().and_then(|v| v.get(i).copied());
        match op {
            b"q" => self.stack.push(self.gs.clone()),
            b"Q" => {
                if let Some(g) = self.stack.pop() {
                    self.gs = g;
                }
            }
            b"cm" => {
                if let Some(m) = nums.as_deref().and_then(Matrix::from_operands) {
                    self.gs.ctm = m.then(&self.gs.ctm);
                }
            }
            b"m" => {
                if let (Some(x), Some(y)) = (n(0), n(1)) {
                    let pt = self.gs.ctm.apply(x, y);
                    self.path.push(SubPath { pts: vec![pt], ..SubPath::default() });
                }
            }
            b"l" => {
                if let (Some(x), Some(y)) = (n(0), n(1)) {
                    let pt = self.gs.ctm.apply(x, y);
                    self.extend_path(pt, false);
                }
            }
            b"c" | b"v" | b"y" => {
                let k = if op == b"c" { 4 } else { 2 };
                if let (Some(x), Some(y)) = (n(k), n(k + 1)) {
                    let pt = self.gs.ctm.apply(x, y);
                    self.extend_path(pt, true);
                }
            }
            b"h" => {
                if let Some(sp) = self.path.last_mut() {
                    sp.closed = true;
                }
            }
            b"re" => {
                if let (Some(x), Some(y), Some(w), Some(h)) = (n(0), n(1), n(2), n(3)) {
                    let c = &self.gs.ctm;
                    let pts = vec![c.apply(x, y), c.apply(x + w, y), c.apply(x + w, y + h), c.apply(x, y + h)];
                    self.path.push(SubPath { pts, curved: vec![false; 3], closed: true });
                }
            }
            b"S" => self.paint(false, true),
            b"s" => {
                self.op(b"h", &[], resources, depth);
                self.paint(false, true);
            }
            b"f" | b"F" | b"f*" => self.paint(true, false),
            b"B" | b"B*" => self.paint(true, true),
            b"b" | b"b*" => {
                self.op(b"h", &[], resources, depth);
                self.paint(true, true);
            }
            b"n" => self.path.clear(),
            b"BT" => {
                self.text_matrix = Matrix::IDENTITY;
                self.line_matrix = Matrix::IDENTITY;
            }
            b"ET" => self.close_span(),
            b"Tf" => {
                if let (Some(Object::Name(name)), Some(size)) = (ops.first(), ops.get(1).and_then(Object::as_f64)) {
                    self.gs.font = self.font(resources, name);
                    self.gs.font_size = size;
                }
            }
            b"Tc" => self.gs.char_spacing = n(0).unwrap_or(self.gs.char_spacing),
            b"Tw" => self.gs.word_spacing = n(0).unwrap_or(self.gs.word_spacing),
            b"Tz" => self.gs.h_scale = n(0).map_or(self.gs.h_scale, |v| v / 100.0),
            b"TL" => self.gs.leading = n(0).unwrap_or(self.gs.leading),
            b"Ts" => self.gs.rise = n(0).unwrap_or(self.gs.rise),
            b"Td" | b"TD" => {
                if let (Some(tx), Some(ty)) = (n(0), n(1)) {
                    if op == b"TD" {
                        self.gs.leading = -ty;
                    }
                    self.line_matrix = Matrix::translate(tx, ty).then(&self.line_matrix);
                    self.text_matrix = self.line_matrix;
                }
            }
            b"Tm" => {
                if let Some(m) = nums.as_deref().and_then(Matrix::from_operands) {
                    self.line_matrix = m;
                    self.text_matrix = m;
                }
            }
            b"T*" => self.next_line(),
            b"Tj" => {
                if let Some(Object::String(s)) = ops.first() {
                    self.show(s);
                }
            }
            b"'" => {
                self.next_line();
                if let Some(Object::String(s)) = ops.first() {
                    self.show(s);
                }
            }
            b"\"" => {
                if let (Some(aw), Some(ac), Some(Object::String(s))) =
                    (ops.first().and_then(Object::as_f64), ops.get(1).and_then(Object::as_f64), ops.get(2))
                {
                    self.gs.word_spacing = aw;
                    self.gs.char_spacing = ac;
                    self.next_line();
                    self.show(s);
                }
            }
            b"TJ" => {
                if let Some(Object::Array(items)) = ops.first() {
                    for item in items {
                        match item {
                            Object::String(s) => self.show(s),
                            other => {
                                if let Some(adj) = other.as_f64() {
                                    let tx = -adj / 1000.0 * self.gs.font_size * self.gs.h_scale;
                                    self.text_matrix = Matrix::translate(tx, 0.0).then(&self.text_matrix);
                                    if adj.abs() > TJ_SPLIT {
                                        self.close_span();
                                    }
                                }
                            }
                        }
                    }
                }
            }
            b"Do" => {
                if let Some(Object::Name(name)) = ops.first() {
                    self.do_xobject(resources, name, depth);
                }
            }
            _ => {}
        }
    }

    fn extend_path(&mut self, pt: (f64, f64), curve: bool) {
        match self.path.last_mut() {
            Some(sp) if !sp.closed => {
                sp.pts.push(pt);
                sp.curved.push(curve);
            }
            _ => {
                // implicit moveto from the end of a closed or absent subpath
                let start = self.path.last().and_then(|sp| sp.pts.first().copied()).unwrap_or(pt);
                self.path.push(SubPath { pts: vec![start, pt], curved: vec![curve], closed: false });
            }
        }
    }

    fn next_line(&mut self) {
        self.line_matrix = Matrix::translate(0.0, -self.gs.leading).then(&self.line_matrix);
        self.text_matrix = self.line_matrix;
    }

    fn font(&mut self, resources: &Dict, name: &[u8]) -> Arc<Font> {
        let dict = self.doc.get_dict(resources.get(&b"Font"[..])).and_then(|fonts| self.doc.get_dict(fonts.get(name)));
        let Some(dict) = dict else {
            let n = String::from_utf8_lossy(name).into_owned();
            if !self.missing_fonts.contains(&n) {
                self.missing_fonts.push(n);
            }
            return Arc::new(Font::missing());
        };
        let key = dict as *const Dict as usize;
        self.fonts.entry(key).or_insert_with(|| Arc::new(Font::load(self.doc, dict))).clone()
    }

    fn show(&mut self, bytes: &[u8]) {
        let font = self.gs.font.clone();
        let size = self.gs.font_size;
        let th = self.gs.h_scale;
        for code in font.codes(bytes) {
            let w0 = font.advance(code);
            let mut tx = w0 * size + self.gs.char_spacing;
            if font.is_word_space(code) {
                tx += self.gs.word_spacing;
            }
            tx *= th;
            let trm = self.text_matrix.then(&self.gs.ctm);
            let glyph_w = w0 * size * th;
            let (lo, hi) = (self.gs.rise + font.descent * size, self.gs.rise + font.ascent * size);
            let corners = [(0.0, lo), (glyph_w, lo), (glyph_w, hi), (0.0, hi)].map(|(x, y)| {
                let (px, py) = trm.apply(x, y);
                self.to_page(px, py)
            });
            let origin = {
                let (ox, oy) = trm.apply(0.0, self.gs.rise);
                self.to_page(ox, oy)
            };
            let xs = corners.map(|c| c.0);
            let ys = corners.map(|c| c.1);
            let bbox = Rect::new(
                xs.iter().copied().fold(f64::INFINITY, f64::min),
                ys.iter().copied().fold(f64::INFINITY, f64::min),
                xs.iter().copied().fold(f64::NEG_INFINITY, f64::max),
                ys.iter().copied().fold(f64::NEG_INFINITY, f64::max),
            );
            let [a, b, c, d, _, _] = trm.0;
            let upright = a > 0.0 && d > 0.0 && b.abs() < 1e-9 * a && c.abs() < 1e-9 * d;
            let eff_size = (d * size).abs().max(1e-9);
            let continues = self.open.as_ref().is_some_and(|s| {
                s.upright
                    && upright
                    && (s.baseline - origin.1).abs() < 0.01 * eff_size
                    && (s.size - eff_size).abs() < 0.01 * eff_size
                    && (origin.0 - s.next_x).abs() < 0.15 * eff_size
            });
            if !continues {
                self.close_span();
                self.open = Some(OpenSpan {
                    glyphs: Vec::new(),
                    upright,
                    baseline: origin.1,
                    size: eff_size,
                    next_x: origin.0,
                });
            }
            self.text_matrix = Matrix::translate(tx, 0.0).then(&self.text_matrix);
            let next = self.to_page_pt(self.text_matrix.then(&self.gs.ctm).apply(0.0, self.gs.rise));
            let span = self.open.as_mut().expect("opened above");
            span.glyphs.push(Glyph { text: font.decode(code), bbox, origin_x: origin.0 });
            span.next_x = next.0;
        }
    }

    fn to_page_pt(&self, p: (f64, f64)) -> (f64, f64) {
        self.to_page(p.0, p.1)
    }

    fn close_span(&mut self) {
        let Some(span) = self.open.take() else { return };
        let glyphs: Vec<&Glyph> = {
            let is_blank = |g: &&Glyph| g.text.chars().all(char::is_whitespace);
            let first = span.glyphs.iter().position(|g| !is_blank(&g));
            let last = span.glyphs.iter().rposition(|g| !is_blank(&g));
            match (first, last) {
                (Some(f), Some(l)) => span.glyphs[f..=l].iter().collect(),
                _ => return,
            }
        };
        let bbox = glyphs.iter().skip(1).fold(glyphs[0].bbox, |acc, g| acc.union(&g.bbox));
        if !(bbox.is_valid() && bbox.width() > 0.0 && bbox.height() > 0.0) {
            return;
        }
        let text: String = glyphs.iter().map(|g| g.text.as_str()).collect();
        let mut out = TextSpan::new(bbox, text);
        if span.upright {
            let mut advances = Vec::new();
            for (i, g) in glyphs.iter().enumerate() {
                let end = glyphs.get(i + 1).map_or(bbox.x1, |n| n.origin_x);
                let n = g.text.chars().count().max(1);
                let adv = end - g.origin_x;
                advances.extend(std::iter::repeat_n(adv / n as f64, n));
            }
            let sum: f64 = advances.iter().sum();
            let ok = advances.iter().all(|&a| a >= 0.0)
                && (glyphs[0].origin_x - bbox.x0).abs() < 1e-6
                && (sum - bbox.width()).abs() <= 0.1 * bbox.width();
            if ok {
                out = out.with_advances(advances);
            }
        }
        self.spans.push(out);
    }

    fn do_xobject(&mut self, resources: &Dict, name: &[u8], depth: usize) {
        let doc = self.doc;
        let Some(xobj) = doc.get_dict(resources.get(&b"XObject"[..])).and_then(|x| x.get(name)).map(|o| doc.resolve(o))
        else {
            self.warnings.push(format!("XObject /{} not found", String::from_utf8_lossy(name)));
            return;
        };
        let Object::Stream(stream) = xobj else { return };
        match doc.lookup(&stream.dict, b"Subtype").and_then(Object::as_name) {
            Some(b"Image") => {
                let c = &self.gs.ctm;
                let pts = [c.apply(0.0, 0.0), c.apply(1.0, 0.0), c.apply(1.0, 1.0), c.apply(0.0, 1.0)]
                    .map(|(x, y)| self.to_page(x, y));
                let r = bbox_of(&pts);
                if r.width() > 0.0 && r.height() > 0.0 {
                    self.images.push((r, ImageRef { name: String::from_utf8_lossy(name).into_owned() }));
                }
            }
            Some(b"Form") => {
                if depth >= MAX_FORM_DEPTH {
                    self.warnings.push("form XObjects nested too deeply; inner content skipped".into());
                    return;
                }
                let data = match crate::filters::decode_stream(&stream.dict, &stream.raw) {
                    Ok(d) => d,
                    Err(e) => {
                        self.warnings.push(format!("form /{} skipped: {e}", String::from_utf8_lossy(name)));
                        return;
                    }
                };
                let matrix = doc
                    .lookup(&stream.dict, b"Matrix")
                    .and_then(Object::as_array)
                    .and_then(|a| a.iter().map(|o| doc.resolve(o).as_f64()).collect::<Option<Vec<_>>>())
                    .and_then(|v| Matrix::from_operands(&v))
                    .unwrap_or(Matrix::IDENTITY);
                let inner = doc.get_dict(stream.dict.get(&b"Resources"[..])).unwrap_or(resources).clone();
                let saved = self.gs.clone();
                let depth_before = self.stack.len();
                self.gs.ctm = matrix.then(&self.gs.ctm);
                self.close_span();
                self.run(&data, &inner, depth + 1);
                self.close_span();
                self.stack.truncate(depth_before);
                self.gs = saved;
            }
            _ => {}
        }
    }

    fn paint(&mut self, fill: bool, stroke: bool) {
        let thin = self.opts.thin_rule_pt;
        let path = std::mem::take(&mut self.path);
        for sp in &path {
            let pts: Vec<(f64, f64)> = sp.pts.iter().map(|&(x, y)| self.to_page(x, y)).collect();
            if pts.len() < 2 {
                continue;
            }
            let bbox = bbox_of(&pts);
            let straight = !sp.curved.iter().any(|&c| c);
            if straight && is_axis_rect(&pts) {
                if bbox.width() < thin || bbox.height() < thin {
                    self.segments.extend(center_rule(&bbox));
                } else {
                    if fill {
                        self.rects.push(bbox);
                    }
                    if stroke {
                        self.segments.extend(rect_edges(&bbox));
                    }
                }
                continue;
            }
            if stroke {
                let mut pieces: Vec<((f64, f64), (f64, f64))> = (0..pts.len() - 1)
                    .filter(|&i| !sp.curved.get(i).copied().unwrap_or(false))
                    .map(|i| (pts[i], pts[i + 1]))
                    .collect();
                if sp.closed {
                    pieces.push((pts[pts.len() - 1], pts[0]));
                }
                for (a, b) in pieces {
                    let r = bbox_of(&[a, b]);
                    self.segments.extend(thin_rule(&r, thin));
                }
            }
            if fill && straight && !stroke {
                self.segments.extend(thin_rule(&bbox, thin));
            }
        }
    }
}

fn bbox_of(pts: &[(f64, f64)]) -> Rect {
    let (mut x0, mut y0, mut x1, mut y1) = (f64::INFINITY, f64::INFINITY, f64::NEG_INFINITY, f64::NEG_INFINITY);
    for &(x, y) in pts {
        x0 = x0.min(x);
        y0 = y0.min(y);
        x1 = x1.max(x);
        y1 = y1.max(y);
    }
    Rect::new(x0, y0, x1, y1)
}

/// Four corners (optionally repeating the first) joined by alternating
/// horizontal and vertical sides.
fn is_axis_rect(pts: &[(f64, f64)]) -> bool {
    const EPS: f64 = 1e-3;
    let mut p: Vec<(f64, f64)> = pts.to_vec();
    if p.len() == 5 && (p[4].0 - p[0].0).abs() < EPS && (p[4].1 - p[0].1).abs() < EPS {
        p.pop();
    }
    if p.len() != 4 {
        return false;
    }
    let horizontal = |a: (f64, f64), b: (f64, f64)| (a.1 - b.1).abs() < EPS;
    let vertical = |a: (f64, f64), b: (f64, f64)| (a.0 - b.0).abs() < EPS;
    let sides: Vec<((f64, f64), (f64, f64))> = (0..4).map(|i| (p[i], p[(i + 1) % 4])).collect();
    let pattern_a =
        sides.iter().enumerate().all(|(i, &(a, b))| if i % 2 == 0 { horizontal(a, b) } else { vertical(a, b) });
    let pattern_b =
        sides.iter().enumerate().all(|(i, &(a, b))| if i % 2 == 0 { vertical(a, b) } else { horizontal(a, b) });
    pattern_a || pattern_b
}

fn rect_edges(r: &Rect) -> Vec<Segment> {
    [
        Segment::horizontal(r.y0, r.x0, r.x1),
        Segment::horizontal(r.y1, r.x0, r.x1),
        Segment::vertical(r.x0, r.y0, r.y1),
        Segment::vertical(r.x1, r.y0, r.y1),
    ]
    .into_iter()
    .flatten()
    .collect()
}

/// A thin box as one rule along its long axis.
fn center_rule(r: &Rect) -> Option<Segment> {
    if r.width() >= r.height() {
        Segment::horizontal((r.y0 + r.y1) / 2.0, r.x0, r.x1)
    } else {
        Segment::vertical((r.x0 + r.x1) / 2.0, r.y0, r.y1)
    }
}

fn thin_rule(r: &Rect, thin: f64) -> Option<Segment> {
    if r.width() < thin && r.width() < r.height() || r.height() < thin && r.height() < r.width() {
        center_rule(r)
    } else {
        None
    }
}

/// Interprets page `page` of `doc`.
pub fn extract_page(doc: &PdfDocument, page: usize, opts: &ExtractOptions) -> Result<ExtractedPage, PdfError> {
    let info = doc.pages.get(page).ok_or(PdfError::PageOutOfRange { page, count: doc.page_count() })?;
    let content = doc.page_content(page)?;
    let gs = GState {
        ctm: Matrix::IDENTITY,
        font: Arc::new(Font::missing()),
        font_size: 0.0,
        char_spacing: 0.0,
        word_spacing: 0.0,
        h_scale: 1.0,
        leading: 0.0,
        rise: 0.0,
    };
    let mut it = Interp {
        doc,
        opts,
        media: info.media_box,
        gs,
        stack: Vec::new(),
        path: Vec::new(),
        text_matrix: Matrix::IDENTITY,
        line_matrix: Matrix::IDENTITY,
        fonts: HashMap::new(),
        missing_fonts: Vec::new(),
        open: None,
        spans: Vec::new(),
        segments: Vec::new(),
        rects: Vec::new(),
        images: Vec::new(),
        inline_images: 0,
        warnings: Vec::new(),
    };
    it.run(&content, &info.resources, 0);
    it.close_span();

    let mut warnings = std::mem::take(&mut it.warnings);
    for f in &it.missing_fonts {
        warnings.push(format!("font /{f} not found; its text reads as replacement characters"));
    }
    if it.inline_images > 0 {
        warnings.push(format!("skipped {} inline image(s)", it.inline_images));
    }
    let mut graphics = PageGraphics::empty(page, info.width(), info.height(), SourceKind::DigitalPdf);
    graphics.text_spans = it.spans;
    graphics.segments = it.segments;
    graphics.rects = it.rects;
    graphics.clip_to_page();
    let bounds = graphics.bounds();
    let images = it.images.into_iter().filter_map(|(r, name)| Some((r.intersection(&bounds)?, name))).collect();
    Ok(ExtractedPage { graphics, images, inline_images_skipped: it.inline_images, warnings })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn matrix_composition_order() {
        let scale = Matrix([2.0, 0.0, 0.0, 2.0, 0.0, 0.0]);
        let shift = Matrix::translate(10.0, 0.0);
        // scale first, then shift
        assert_eq!(scale.then(&shift).apply(1.0, 1.0), (12.0, 2.0));
        assert_eq!(shift.then(&scale).apply(1.0, 1.0), (22.0, 2.0));
    }

    #[test]
    fn rect_detection() {
        assert!(is_axis_rect(&[(0.0, 0.0), (5.0, 0.0), (5.0, 3.0), (0.0, 3.0)]));
        assert!(is_axis_rect(&[(0.0, 0.0), (0.0, 3.0), (5.0, 3.0), (5.0, 0.0), (0.0, 0.0)]));
        assert!(!is_axis_rect(&[(0.0, 0.0), (5.0, 1.0), (5.0, 3.0), (0.0, 3.0)]));
        assert!(!is_axis_rect(&[(0.0, 0.0), (5.0, 0.0), (5.0, 3.0)]));
    }

    #[test]
    fn thin_rules() {
        let bar = Rect::new(10.0, 20.0, 110.0, 21.0);
        assert_eq!(thin_rule(&bar, 3.0), Segment::horizontal(20.5, 10.0, 110.0));
        assert_eq!(thin_rule(&Rect::new(0.0, 0.0, 10.0, 10.0), 3.0), None);
        assert_eq!(thin_rule(&Rect::new(5.0, 0.0, 5.0, 40.0), 3.0), Segment::vertical(5.0, 0.0, 40.0));
    }
}
