//! Unified page output and its HTML, CSV and JSON serializations.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::fixed::Fixed3;
use crate::geometry::Rect;
use crate::linecell::{LogicalCell, TableStructure};
use crate::text::Paragraph;

pub const OUTPUT_VERSION: u64 = 1;
pub const WIRELESS_KIND: &str = "wireless-unparsed";

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ImageRef {
    /// Resource name of the image within its page, e.g. an XObject name.
    pub name: String,
}

#[derive(Clone, Debug, PartialEq)]
pub enum CellContent {
    Text(Paragraph),
    Table(TableStructure),
    Image(ImageRef),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CellKind {
    Text,
    Table,
    Image,
}

#[derive(Clone, Debug, PartialEq)]
pub struct PdfCell {
    pub bbox: Rect,
    pub content: CellContent,
}

impl PdfCell {
    pub fn kind(&self) -> CellKind {
        match self.content {
            CellContent::Text(_) => CellKind::Text,
            CellContent::Table(_) => CellKind::Table,
            CellContent::Image(_) => CellKind::Image,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct PageOutput {
    pub page_index: usize,
    /// Sorted by (y0, x0).
    pub cells: Vec<PdfCell>,
    /// Table regions detected but not parsed (wireless or degenerate).
    pub unparsed_regions: Vec<Rect>,
    pub warnings: Vec<String>,
}

impl PageOutput {
    pub fn tables(&self) -> impl Iterator<Item = &TableStructure> {
        self.cells.iter().filter_map(|c| match &c.content {
            CellContent::Table(t) => Some(t),
            _ => None,
        })
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct DocumentOutput {
    pub pages: Vec<PageOutput>,
}

#[derive(Debug, Error)]
pub enum EmitError {
    #[error("malformed output document: {0}")]
    Json(#[from] serde_json::Error),
    #[error("unsupported output version {0}")]
    Version(u64),
}

fn escape_html(text: &str) -> String {
    let mut out = String::with_capacity(text.len());
    for ch in text.chars() {
        match ch {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            '\n' => out.push_str("<br/>"),
            c => out.push(c),
        }
    }
    out
}

/// `<table>` markup; a cell sits in the row of its top lattice unit and
/// span attributes appear only when greater than one.
pub fn table_to_html(t: &TableStructure) -> String {
    let mut out = String::from("<table>");
    let mut cells = t.cells.iter().peekable();
    for r in 0..t.n_rows {
        out.push_str("<tr>");
        while let Some(c) = cells.next_if(|c| c.row == r) {
            out.push_str("<td");
            if c.rowspan > 1 {
                out.push_str(&format!(" rowspan=\"{}\"", c.rowspan));
            }
            if c.colspan > 1 {
                out.push_str(&format!(" colspan=\"{}\"", c.colspan));
            }
            out.push('>');
            out.push_str(&escape_html(&c.text));
            out.push_str("</td>");
        }
        out.push_str("</tr>");
    }
    out.push_str("</table>");
    out
}

fn csv_field(text: &str) -> String {
    if text.contains([',', '"', '\n', '\r']) {
        format!("\"{}\"", text.replace('"', "\"\""))
    } else {
        text.to_string()
    }
}

/// RFC 4180 grid with CRLF endings; a spanning cell's text sits at its
/// top-left unit and the other covered units stay empty.
pub fn table_to_csv(t: &TableStructure) -> String {
    let mut grid = vec![vec![""; t.n_cols]; t.n_rows];
    for c in &t.cells {
        grid[c.row][c.col] = &c.text;
    }
    let mut out = String::new();
    for row in grid {
        out.push_str(&row.iter().map(|f| csv_field(f)).collect::<Vec<_>>().join(","));
        out.push_str("\r\n");
    }
    out
}

fn overlaps(a: &Rect, b: &Rect) -> bool {
    a.intersection(b).is_some_and(|r| r.area() > 0.0)
}

/// Wraps a page's items as [`PdfCell`]s in reading order. Paragraphs that
/// overlap a table are dropped, one warning each.
pub fn page_to_cells(
    tables: Vec<TableStructure>,
    paragraphs: Vec<Paragraph>,
    images: Vec<(Rect, ImageRef)>,
) -> (Vec<PdfCell>, Vec<String>) {
    let mut warnings = Vec::new();
    let mut cells: Vec<PdfCell> = Vec::new();
    for p in paragraphs {
        if tables.iter().any(|t| overlaps(&t.region_bbox, &p.bbox)) {
            warnings.push(format!("paragraph at ({:.1},{:.1}) overlaps a table and was dropped", p.bbox.x0, p.bbox.y0));
            continue;
        }
        cells.push(PdfCell { bbox: p.bbox, content: CellContent::Text(p) });
    }
    for t in tables {
        cells.push(PdfCell { bbox: t.region_bbox, content: CellContent::Table(t) });
    }
    for (bbox, image) in images {
        cells.push(PdfCell { bbox, content: CellContent::Image(image) });
    }
    cells.sort_by(|a, b| a.bbox.y0.total_cmp(&b.bbox.y0).then(a.bbox.x0.total_cmp(&b.bbox.x0)));
    (cells, warnings)
}

fn bbox_attr(r: &Rect) -> String {
    use crate::fixed::format3;
    format!("{},{},{},{}", format3(r.x0), format3(r.y0), format3(r.x1), format3(r.y1))
}

/// Standalone HTML document for one page, one element per line.
pub fn page_to_html(page: &PageOutput) -> String {
    let mut out = String::from("<!DOCTYPE html>\n<html><body>\n");
    for cell in &page.cells {
        match &cell.content {
            CellContent::Text(p) => out.push_str(&format!("<p>{}</p>", escape_html(&p.text))),
            CellContent::Table(t) => out.push_str(&table_to_html(t)),
            CellContent::Image(img) => out.push_str(&format!(
                "<img alt=\"{}\" data-bbox=\"{}\"/>",
                escape_html(&img.name),
                bbox_attr(&cell.bbox)
            )),
        }
        out.push('\n');
    }
    for r in &page.unparsed_regions {
        out.push_str(&format!("<div class=\"{WIRELESS_KIND}\" data-bbox=\"{}\"></div>\n", bbox_attr(r)));
    }
    out.push_str("</body></html>\n");
    out
}

/// Every table of the page as CSV, separated by one empty line.
pub fn page_to_csv(page: &PageOutput) -> String {
    page.tables().map(table_to_csv).collect::<Vec<_>>().join("\r\n")
}

type WireRect = [Fixed3; 4];

fn wire_rect(r: &Rect) -> WireRect {
    [Fixed3(r.x0), Fixed3(r.y0), Fixed3(r.x1), Fixed3(r.y1)]
}

fn from_wire(r: &WireRect) -> Rect {
    Rect::new(r[0].0, r[1].0, r[2].0, r[3].0)
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct WireDoc {
    version: u64,
    pages: Vec<WirePage>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct WirePage {
    page_index: usize,
    cells: Vec<WireCell>,
    unparsed_regions: Vec<WireUnparsed>,
    warnings: Vec<String>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct WireUnparsed {
    kind: String,
    bbox: WireRect,
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
enum WireCell {
    Text { bbox: WireRect, text: String, line_count: usize },
    Table { bbox: WireRect, n_rows: usize, n_cols: usize, cells: Vec<WireTableCell>, warnings: Vec<String> },
    Image { bbox: WireRect, name: String },
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct WireTableCell {
    row: usize,
    col: usize,
    rowspan: usize,
    colspan: usize,
    bbox: WireRect,
    text: String,
}

fn to_wire(doc: &DocumentOutput) -> WireDoc {
    WireDoc {
        version: OUTPUT_VERSION,
        pages: doc
            .pages
            .iter()
            .map(|p| WirePage {
                page_index: p.page_index,
                cells: p
                    .cells
                    .iter()
                    .map(|c| match &c.content {
                        CellContent::Text(para) => WireCell::Text {
                            bbox: wire_rect(&c.bbox),
                            text: para.text.clone(),
                            line_count: para.line_count,
                        },
                        CellContent::Table(t) => WireCell::Table {
                            bbox: wire_rect(&c.bbox),
                            n_rows: t.n_rows,
                            n_cols: t.n_cols,
                            cells: t
                                .cells
                                .iter()
                                .map(|lc| WireTableCell {
                                    row: lc.row,
                                    col: lc.col,
                                    rowspan: lc.rowspan,
                                    colspan: lc.colspan,
                                    bbox: wire_rect(&lc.bbox),
                                    text: lc.text.clone(),
                                })
                                .collect(),
                            warnings: t.warnings.clone(),
                        },
                        CellContent::Image(img) => WireCell::Image { bbox: wire_rect(&c.bbox), name: img.name.clone() },
                    })
                    .collect(),
                unparsed_regions: p
                    .unparsed_regions
                    .iter()
                    .map(|r| WireUnparsed { kind: WIRELESS_KIND.into(), bbox: wire_rect(r) })
                    .collect(),
                warnings: p.warnings.clone(),
            })
            .collect(),
    }
}

/// Compact, deterministic JSON; coordinates carry three decimals.
pub fn document_to_json(doc: &DocumentOutput) -> Vec<u8> {
    serde_json::to_vec(&to_wire(doc)).expect("finite coordinates")
}

pub fn document_from_json(bytes: &[u8]) -> Result<DocumentOutput, EmitError> {
    let wire: WireDoc = serde_json::from_slice(bytes)?;
    if wire.version != OUTPUT_VERSION {
        return Err(EmitError::Version(wire.version));
    }
    let pages = wire
        .pages
        .into_iter()
        .map(|p| PageOutput {
            page_index: p.page_index,
            cells: p
                .cells
                .into_iter()
                .map(|c| match c {
                    WireCell::Text { bbox, text, line_count } => {
                        let bbox = from_wire(&bbox);
                        PdfCell { bbox, content: CellContent::Text(Paragraph { bbox, text, line_count }) }
                    }
                    WireCell::Table { bbox, n_rows, n_cols, cells, warnings } => {
                        let bbox = from_wire(&bbox);
                        let cells = cells
                            .into_iter()
                            .map(|c| LogicalCell {
                                row: c.row,
                                col: c.col,
                                rowspan: c.rowspan,
                                colspan: c.colspan,
                                bbox: from_wire(&c.bbox),
                                text: c.text,
                            })
                            .collect();
                        let t = TableStructure { n_rows, n_cols, cells, region_bbox: bbox, warnings };
                        PdfCell { bbox, content: CellContent::Table(t) }
                    }
                    WireCell::Image { bbox, name } => {
                        PdfCell { bbox: from_wire(&bbox), content: CellContent::Image(ImageRef { name }) }
                    }
                })
                .collect(),
            unparsed_regions: p.unparsed_regions.iter().map(|u| from_wire(&u.bbox)).collect(),
            warnings: p.warnings,
        })
        .collect();
    Ok(DocumentOutput { pages })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linecell::{merge_spans, EdgePresence, Grid};

    fn table(nr: usize, nc: usize, edges: EdgePresence, texts: &[&str]) -> TableStructure {
        let grid = Grid {
            row_bounds: (0..=nr).map(|i| 10.0 * i as f64).collect(),
            col_bounds: (0..=nc).map(|j| 20.0 * j as f64).collect(),
        };
        let mut t = merge_spans(&grid, &edges);
        for (c, s) in t.cells.iter_mut().zip(texts) {
            c.text = s.to_string();
        }
        t
    }

    #[test]
    fn html_examples() {
        let t = table(1, 1, EdgePresence::full(1, 1), &["a"]);
        assert_eq!(table_to_html(&t), "<table><tr><td>a</td></tr></table>");
        let mut e = EdgePresence::full(2, 2);
        e.v_edges[0][1] = false;
        let t = table(2, 2, e, &["x", "c", "d"]);
        assert_eq!(table_to_html(&t), "<table><tr><td colspan=\"2\">x</td></tr><tr><td>c</td><td>d</td></tr></table>");
        let t = table(1, 1, EdgePresence::full(1, 1), &["a<b \"q\" &\nz"]);
        assert_eq!(table_to_html(&t), "<table><tr><td>a&lt;b &quot;q&quot; &amp;<br/>z</td></tr></table>");
    }

    #[test]
    fn covered_row_still_emitted() {
        let mut e = EdgePresence::full(2, 1);
        e.h_edges[1][0] = false;
        let t = table(2, 1, e, &["tall"]);
        assert_eq!(table_to_html(&t), "<table><tr><td rowspan=\"2\">tall</td></tr><tr></tr></table>");
    }

    #[test]
    fn csv_examples() {
        let t = table(2, 2, EdgePresence::full(2, 2), &["a", "b", "c", "d"]);
        assert_eq!(table_to_csv(&t), "a,b\r\nc,d\r\n");
        let mut e = EdgePresence::full(2, 2);
        e.v_edges[0][1] = false;
        let t = table(2, 2, e, &["x", "c", "d"]);
        assert_eq!(table_to_csv(&t), "x,\r\nc,d\r\n");
        let t = table(1, 2, EdgePresence::full(1, 2), &["he said \"hi\"", "a,b"]);
        assert_eq!(table_to_csv(&t), "\"he said \"\"hi\"\"\",\"a,b\"\r\n");
    }

    fn para(x0: f64, y0: f64, text: &str) -> Paragraph {
        Paragraph { bbox: Rect::new(x0, y0, x0 + 50.0, y0 + 10.0), text: text.into(), line_count: 1 }
    }

    #[test]
    fn cells_in_reading_order() {
        let mut t = table(1, 1, EdgePresence::full(1, 1), &["a"]);
        t.region_bbox = Rect::new(0.0, 100.0, 200.0, 200.0);
        let (cells, w) = page_to_cells(vec![t.clone()], vec![para(0.0, 20.0, "above")], vec![]);
        assert_eq!(cells.iter().map(PdfCell::kind).collect::<Vec<_>>(), vec![CellKind::Text, CellKind::Table]);
        assert!(w.is_empty());
        assert_eq!(page_to_cells(vec![], vec![], vec![]), (vec![], vec![]));
        let (cells, w) = page_to_cells(vec![t], vec![para(10.0, 120.0, "inside")], vec![]);
        assert_eq!(cells.len(), 1);
        assert_eq!(w.len(), 1);
    }

    #[test]
    fn json_round_trip() {
        assert_eq!(document_to_json(&DocumentOutput::default()), b"{\"version\":1,\"pages\":[]}");
        let mut e = EdgePresence::full(2, 2);
        e.v_edges[0][1] = false;
        let mut t = table(2, 2, e, &["x", "c", "d\ne"]);
        t.region_bbox = Rect::new(0.0, 0.0, 40.0, 20.0);
        t.warnings.push("note".into());
        let (cells, warnings) = page_to_cells(
            vec![t],
            vec![para(0.0, 50.0, "para")],
            vec![(Rect::new(1.0, 70.0, 9.5, 80.25), ImageRef { name: "Im1".into() })],
        );
        let doc = DocumentOutput {
            pages: vec![PageOutput {
                page_index: 3,
                cells,
                unparsed_regions: vec![Rect::new(5.0, 90.0, 60.0, 120.0)],
                warnings,
            }],
        };
        let bytes = document_to_json(&doc);
        assert_eq!(document_from_json(&bytes).unwrap(), doc);
        let text = String::from_utf8(bytes.clone()).unwrap();
        for key in
            ["\"row\":0", "\"colspan\":2", "\"bbox\":[0.000,0.000,40.000,20.000]", "\"kind\":\"wireless-unparsed\""]
        {
            assert!(text.contains(key), "{key} missing from {text}");
        }
        assert_eq!(document_to_json(&document_from_json(&bytes).unwrap()), bytes);
    }

    #[test]
    fn page_serializers() {
        let mut t = table(1, 2, EdgePresence::full(1, 2), &["a", "b"]);
        t.region_bbox = Rect::new(0.0, 0.0, 40.0, 10.0);
        let (cells, _) = page_to_cells(vec![t.clone(), t], vec![para(0.0, 50.0, "x & y")], vec![]);
        let page = PageOutput { page_index: 0, cells, unparsed_regions: vec![], warnings: vec![] };
        assert_eq!(page_to_csv(&page), "a,b\r\n\r\na,b\r\n");
        let html = page_to_html(&page);
        assert!(html.contains("<p>x &amp; y</p>"));
        assert_eq!(html.matches("<table>").count(), 2);
    }
}
