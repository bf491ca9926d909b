//! Page Interchange Format (PIF): the serializable set of primitives a
//! frontend extracts from one page. Everything downstream of the frontends
//! consumes [`PageGraphics`], so the table core can be driven from a JSON
//! file without any PDF or image at hand.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::fixed::Fixed3;
use crate::geometry::{Orientation, Rect, Segment};

pub const PIF_VERSION: u64 = 1;

#[derive(Clone, Debug, PartialEq)]
pub struct TextSpan {
    pub bbox: Rect,
    pub text: String,
    /// Optional per-character advance widths, one per `char` of `text`.
    pub char_advances: Option<Vec<f64>>,
}

impl TextSpan {
    pub fn new(bbox: Rect, text: impl Into<String>) -> Self {
        Self { bbox, text: text.into(), char_advances: None }
    }

    pub fn with_advances(mut self, advances: Vec<f64>) -> Self {
        self.char_advances = Some(advances);
        self
    }

    pub fn char_count(&self) -> usize {
        self.text.chars().count()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SourceKind {
    DigitalPdf,
    Image,
}

#[derive(Clone, Debug, PartialEq)]
pub struct PageGraphics {
    pub page_index: usize,
    pub width: f64,
    pub height: f64,
    pub text_spans: Vec<TextSpan>,
    pub segments: Vec<Segment>,
    pub rects: Vec<Rect>,
    pub source_kind: SourceKind,
}

impl PageGraphics {
    pub fn empty(page_index: usize, width: f64, height: f64, source_kind: SourceKind) -> Self {
        Self { page_index, width, height, text_spans: Vec::new(), segments: Vec::new(), rects: Vec::new(), source_kind }
    }

    pub fn bounds(&self) -> Rect {
        Rect::new(0.0, 0.0, self.width, self.height)
    }

    /// Clips every primitive to the page, dropping what falls entirely outside.
    pub fn clip_to_page(&mut self) {
        let (w, h) = (self.width, self.height);
        self.segments = self
            .segments
            .iter()
            .filter_map(|s| {
                let (limit_pos, limit_span) = match s.orientation {
                    Orientation::Horizontal => (h, w),
                    Orientation::Vertical => (w, h),
                };
                if s.position < 0.0 || s.position > limit_pos {
                    return None;
                }
                Segment::new(s.orientation, s.position, s.lo.max(0.0), s.hi.min(limit_span))
            })
            .collect();
        let page = self.bounds();
        self.rects = self.rects.iter().filter_map(|r| r.intersection(&page)).collect();
        self.text_spans = self
            .text_spans
            .drain(..)
            .filter_map(|mut span| {
                let clipped = span.bbox.intersection(&page)?;
                if clipped != span.bbox {
                    // advances no longer describe the clipped box
                    span.char_advances = None;
                    span.bbox = clipped;
                }
                Some(span)
            })
            .collect();
    }
}

/// Grayscale page raster, row-major, 0 = black.
#[derive(Clone, Debug, PartialEq)]
pub struct RasterPage {
    pub width_px: usize,
    pub height_px: usize,
    pub dpi: f64,
    pub pixels: Vec<u8>,
}

impl RasterPage {
    pub fn new(width_px: usize, height_px: usize, dpi: f64, pixels: Vec<u8>) -> Self {
        assert_eq!(pixels.len(), width_px * height_px, "raster size mismatch");
        assert!(dpi > 0.0, "dpi must be positive");
        Self { width_px, height_px, dpi, pixels }
    }

    pub fn blank(width_px: usize, height_px: usize, dpi: f64) -> Self {
        Self::new(width_px, height_px, dpi, vec![255; width_px * height_px])
    }

    /// Page units per pixel.
    pub fn unit_per_px(&self) -> f64 {
        72.0 / self.dpi
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> u8 {
        self.pixels[y * self.width_px + x]
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Violation {
    pub field: String,
    pub rule: String,
}

impl std::fmt::Display for Violation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}: {}", self.field, self.rule)
    }
}

#[derive(Debug, Error)]
pub enum PifError {
    #[error("not a JSON document: {0}")]
    Json(String),
    #[error("missing pif_version")]
    MissingVersion,
    #[error("unknown pif_version {0}")]
    UnknownVersion(String),
    #[error("schema violation: {0}")]
    Schema(String),
    #[error("invalid {field}: {rule}")]
    Invariant { field: String, rule: String },
}

fn within(v: f64, lo: f64, hi: f64) -> bool {
    v.is_finite() && v >= lo && v <= hi
}

/// Checks every PageGraphics invariant; an empty result means the page is valid.
pub fn validate(page: &PageGraphics) -> Vec<Violation> {
    let mut out = Vec::new();
    let mut push = |field: String, rule: &str| out.push(Violation { field, rule: rule.to_string() });
    if !(page.width.is_finite() && page.width > 0.0) {
        push("width".into(), "must be positive");
    }
    if !(page.height.is_finite() && page.height > 0.0) {
        push("height".into(), "must be positive");
    }
    let (w, h) = (page.width, page.height);
    for (i, s) in page.text_spans.iter().enumerate() {
        let field = format!("text_spans[{i}]");
        if s.text.is_empty() {
            push(format!("{field}.text"), "text must be non-empty");
        }
        if !s.bbox.is_valid() {
            push(format!("{field}.bbox"), "bbox must satisfy x0<x1, y0<y1");
        } else if !(within(s.bbox.x0, 0.0, w)
            && within(s.bbox.x1, 0.0, w)
            && within(s.bbox.y0, 0.0, h)
            && within(s.bbox.y1, 0.0, h))
        {
            push(format!("{field}.bbox"), "outside page bounds");
        }
        if let Some(adv) = &s.char_advances {
            let n = s.text.chars().count();
            if adv.len() != n {
                push(format!("{field}.char_advances"), "length must equal character count");
            } else if n > 0 {
                let sum: f64 = adv.iter().sum();
                let width = s.bbox.width();
                if !(sum.is_finite() && (sum - width).abs() <= 0.1 * width.abs()) {
                    push(format!("{field}.char_advances"), "sum must match bbox width within 10%");
                }
            }
        }
    }
    for (i, s) in page.segments.iter().enumerate() {
        let field = format!("segments[{i}]");
        if !(s.lo.is_finite() && s.hi.is_finite() && s.lo < s.hi) {
            push(field.clone(), "segment interval must satisfy lo < hi");
            continue;
        }
        let (pos_max, span_max) = match s.orientation {
            Orientation::Horizontal => (h, w),
            Orientation::Vertical => (w, h),
        };
        if !(within(s.position, 0.0, pos_max) && within(s.lo, 0.0, span_max) && within(s.hi, 0.0, span_max)) {
            push(field, "outside page bounds");
        }
    }
    for (i, r) in page.rects.iter().enumerate() {
        let field = format!("rects[{i}]");
        if !r.is_valid() {
            push(field, "rect must satisfy x0<x1, y0<y1");
        } else if !(within(r.x0, 0.0, w) && within(r.x1, 0.0, w) && within(r.y0, 0.0, h) && within(r.y1, 0.0, h)) {
            push(field, "outside page bounds");
        }
    }
    out
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct WireSpan {
    bbox: [Fixed3; 4],
    text: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    char_advances: Option<Vec<Fixed3>>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct WireSegment {
    o: String,
    pos: Fixed3,
    lo: Fixed3,
    hi: Fixed3,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct WirePage {
    pif_version: u64,
    page_index: usize,
    width: Fixed3,
    height: Fixed3,
    source_kind: SourceKind,
    text_spans: Vec<WireSpan>,
    segments: Vec<WireSegment>,
    rects: Vec<[Fixed3; 4]>,
}

fn rect_wire(r: &Rect) -> [Fixed3; 4] {
    [Fixed3(r.x0), Fixed3(r.y0), Fixed3(r.x1), Fixed3(r.y1)]
}

fn wire_rect(r: &[Fixed3; 4]) -> Rect {
    Rect::new(r[0].0, r[1].0, r[2].0, r[3].0)
}

/// Serializes a page as PIF v1 JSON. Output is deterministic: fixed field
/// order and every float printed with three decimals.
pub fn pif_save(page: &PageGraphics) -> Vec<u8> {
    let wire = WirePage {
        pif_version: PIF_VERSION,
        page_index: page.page_index,
        width: Fixed3(page.width),
        height: Fixed3(page.height),
        source_kind: page.source_kind,
        text_spans: page
            .text_spans
            .iter()
            .map(|s| WireSpan {
                bbox: rect_wire(&s.bbox),
                text: s.text.clone(),
                char_advances: s.char_advances.as_ref().map(|a| a.iter().map(|&v| Fixed3(v)).collect()),
            })
            .collect(),
        segments: page
            .segments
            .iter()
            .map(|s| WireSegment {
                o: match s.orientation {
                    Orientation::Horizontal => "h".into(),
                    Orientation::Vertical => "v".into(),
                },
                pos: Fixed3(s.position),
                lo: Fixed3(s.lo),
                hi: Fixed3(s.hi),
            })
            .collect(),
        rects: page.rects.iter().map(rect_wire).collect(),
    };
    let mut bytes = serde_json::to_vec(&wire).expect("PIF serialization cannot fail");
    bytes.push(b'\n');
    bytes
}

/// Parses PIF v1 JSON and checks every page invariant.
pub fn pif_load(bytes: &[u8]) -> Result<PageGraphics, PifError> {
    let value: serde_json::Value = serde_json::from_slice(bytes).map_err(|e| PifError::Json(e.to_string()))?;
    match value.get("pif_version") {
        None => return Err(PifError::MissingVersion),
        Some(v) if v.as_u64() == Some(PIF_VERSION) => {}
        Some(v) => return Err(PifError::UnknownVersion(v.to_string())),
    }
    let wire: WirePage = serde_json::from_value(value).map_err(|e| PifError::Schema(e.to_string()))?;
    let mut segments = Vec::with_capacity(wire.segments.len());
    for (i, s) in wire.segments.iter().enumerate() {
        let orientation = match s.o.as_str() {
            "h" => Orientation::Horizontal,
            "v" => Orientation::Vertical,
            other => {
                return Err(PifError::Schema(format!("segments[{i}].o: expected \"h\" or \"v\", got {other:?}")));
            }
        };
        segments.push(Segment { orientation, position: s.pos.0, lo: s.lo.0, hi: s.hi.0 });
    }
    let page = PageGraphics {
        page_index: wire.page_index,
        width: wire.width.0,
        height: wire.height.0,
        source_kind: wire.source_kind,
        text_spans: wire
            .text_spans
            .into_iter()
            .map(|s| TextSpan {
                bbox: wire_rect(&s.bbox),
                text: s.text,
                char_advances: s.char_advances.map(|a| a.into_iter().map(|v| v.0).collect()),
            })
            .collect(),
        segments,
        rects: wire.rects.iter().map(wire_rect).collect(),
    };
    if let Some(v) = validate(&page).into_iter().next() {
        return Err(PifError::Invariant { field: v.field, rule: v.rule });
    }
    Ok(page)
}
