//! Text placement: splitting spans at cell borders, filling table cells and
//! grouping the remaining spans into paragraphs.

use std::cmp::Ordering;

use crate::geometry::{Rect, Tolerances};
use crate::linecell::TableStructure;
use crate::page::TextSpan;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TextParams {
    /// Line break inside a cell when consecutive spans are further apart
    /// vertically (center to center) than this fraction of the median height.
    pub newline_frac: f64,
    /// Spans whose centers are within this fraction of the median height
    /// share a line when building paragraphs.
    pub line_gap_frac: f64,
    /// Largest gap between consecutive lines of one paragraph, as a fraction
    /// of the median line height.
    pub para_gap_frac: f64,
    /// Minimum horizontal overlap between consecutive lines of one paragraph,
    /// relative to the narrower line.
    pub para_overlap: f64,
}

impl Default for TextParams {
    fn default() -> Self {
        Self { newline_frac: 0.6, line_gap_frac: 0.5, para_gap_frac: 1.5, para_overlap: 0.5 }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Paragraph {
    pub bbox: Rect,
    pub text: String,
    pub line_count: usize,
}

/// Character boundary x positions, `n + 1` values from `x0` to `x1`.
fn char_boundaries(span: &TextSpan) -> Vec<f64> {
    let n = span.char_count();
    let (x0, w) = (span.bbox.x0, span.bbox.width());
    let advances: Vec<f64> = match &span.char_advances {
        Some(a) if a.len() == n && a.iter().sum::<f64>() > 0.0 => a.clone(),
        _ => vec![1.0; n],
    };
    let total: f64 = advances.iter().sum();
    let mut out = Vec::with_capacity(n + 1);
    let mut acc = 0.0;
    out.push(x0);
    for a in &advances[..n.saturating_sub(1)] {
        acc += a;
        out.push(x0 + w * acc / total);
    }
    if n > 0 {
        out.push(span.bbox.x1);
    }
    out
}

/// Splits `span` at the character boundaries nearest to each cut.
///
/// Advances are rescaled to the bbox width so the children tile the parent
/// exactly. Distance ties go to the later boundary. Cuts outside the span,
/// or that would produce an empty child, are ignored.
pub fn split_span(span: &TextSpan, cut_xs: &[f64]) -> Vec<TextSpan> {
    let n = span.char_count();
    if n < 2 {
        return vec![span.clone()];
    }
    let bounds = char_boundaries(span);
    let mut ks: Vec<usize> = cut_xs
        .iter()
        .filter(|&&x| x > span.bbox.x0 && x < span.bbox.x1)
        .map(|&x| {
            let mut best = 0;
            for (k, b) in bounds.iter().enumerate() {
                if (b - x).abs() <= (bounds[best] - x).abs() {
                    best = k;
                }
            }
            best
        })
        .filter(|&k| k > 0 && k < n)
        .collect();
    ks.sort_unstable();
    ks.dedup();
    if ks.is_empty() {
        return vec![span.clone()];
    }

    let chars: Vec<char> = span.text.chars().collect();
    let widths: Vec<f64> = bounds.windows(2).map(|w| w[1] - w[0]).collect();
    let mut out = Vec::with_capacity(ks.len() + 1);
    let mut start = 0;
    for end in ks.into_iter().chain(std::iter::once(n)) {
        let bbox = Rect::new(bounds[start], span.bbox.y0, bounds[end], span.bbox.y1);
        let mut child = TextSpan::new(bbox, chars[start..end].iter().collect::<String>());
        if span.char_advances.is_some() {
            child.char_advances = Some(widths[start..end].to_vec());
        }
        out.push(child);
        start = end;
    }
    out
}

fn median(mut v: Vec<f64>) -> f64 {
    if v.is_empty() {
        return 0.0;
    }
    v.sort_by(f64::total_cmp);
    let m = v.len() / 2;
    if v.len() % 2 == 1 {
        v[m]
    } else {
        (v[m - 1] + v[m]) / 2.0
    }
}

fn span_order(a: &TextSpan, b: &TextSpan) -> Ordering {
    let (ca, cb) = (a.bbox.center(), b.bbox.center());
    ca.y.total_cmp(&cb.y)
        .then(a.bbox.x0.total_cmp(&b.bbox.x0))
        .then_with(|| a.text.cmp(&b.text))
        .then(a.bbox.x1.total_cmp(&b.bbox.x1))
}

/// Groups spans into lines: sorted by center y, a new line starts whenever the
/// center gap to the previous span exceeds `gap`. Each line is sorted by x.
fn group_lines(mut spans: Vec<TextSpan>, gap: f64) -> Vec<Vec<TextSpan>> {
    spans.sort_by(span_order);
    let mut lines: Vec<Vec<TextSpan>> = Vec::new();
    let mut last_y = f64::NEG_INFINITY;
    for s in spans {
        let y = s.bbox.center().y;
        match lines.last_mut() {
            Some(line) if y - last_y <= gap => line.push(s),
            _ => lines.push(vec![s]),
        }
        last_y = y;
    }
    for line in &mut lines {
        line.sort_by(|a, b| a.bbox.x0.total_cmp(&b.bbox.x0).then_with(|| span_order(a, b)));
    }
    lines
}

fn join_line(line: &[TextSpan]) -> String {
    line.iter().map(|s| s.text.as_str()).collect::<Vec<_>>().join(" ")
}

/// Cuts for a span at the borders between the cells of its lattice row that it
/// reaches into by more than `overlap_frac` of a character width.
fn cuts_for(table: &TableStructure, span: &TextSpan, tol: &Tolerances) -> Vec<f64> {
    let cy = span.bbox.center().y;
    let cw = span.bbox.width() / span.char_count().max(1) as f64;
    let need = tol.overlap_frac * cw;
    let mut hits: Vec<&Rect> = table
        .cells
        .iter()
        .map(|c| &c.bbox)
        .filter(|b| cy >= b.y0 && cy <= b.y1)
        .filter(|b| span.bbox.x1.min(b.x1) - span.bbox.x0.max(b.x0) > need)
        .collect();
    hits.sort_by(|a, b| a.x0.total_cmp(&b.x0));
    hits.dedup_by(|a, b| a.x0 == b.x0);
    hits.iter().skip(1).map(|b| b.x0).collect()
}

/// Fills `LogicalCell::text` from the spans overlapping the table.
pub fn assign_spans(
    table: &TableStructure,
    spans: &[TextSpan],
    tol: &Tolerances,
    params: &TextParams,
) -> TableStructure {
    let mut out = table.clone();
    if out.cells.is_empty() {
        return out;
    }
    let pieces: Vec<TextSpan> = spans.iter().flat_map(|s| split_span(s, &cuts_for(table, s, tol))).collect();
    let newline_gap = params.newline_frac * median(pieces.iter().map(|s| s.bbox.height()).collect());

    let mut buckets: Vec<Vec<TextSpan>> = vec![Vec::new(); out.cells.len()];
    let mut strays = 0;
    for piece in pieces {
        let c = piece.bbox.center();
        let idx = match out.cells.iter().position(|cell| cell.bbox.contains(c)) {
            Some(i) => i,
            None => {
                strays += 1;
                let mut best = 0;
                for (i, cell) in out.cells.iter().enumerate() {
                    if cell.bbox.center_distance(c) < out.cells[best].bbox.center_distance(c) {
                        best = i;
                    }
                }
                best
            }
        };
        buckets[idx].push(piece);
    }
    if strays > 0 {
        out.warnings.push(format!("{strays} text span(s) outside every cell attached to the nearest cell"));
    }
    for (cell, bucket) in out.cells.iter_mut().zip(buckets) {
        cell.text = group_lines(bucket, newline_gap).iter().map(|line| join_line(line)).collect::<Vec<_>>().join("\n");
    }
    out
}

fn x_overlap_ratio(a: &Rect, b: &Rect) -> f64 {
    let ov = (a.x1.min(b.x1) - a.x0.max(b.x0)).max(0.0);
    let narrow = a.width().min(b.width());
    if narrow <= 0.0 {
        0.0
    } else {
        ov / narrow
    }
}

/// Groups free-standing spans into lines and lines into paragraphs.
pub fn merge_paragraphs(spans: &[TextSpan], params: &TextParams) -> Vec<Paragraph> {
    if spans.is_empty() {
        return Vec::new();
    }
    let h = median(spans.iter().map(|s| s.bbox.height()).collect());
    let lines: Vec<(Rect, String)> = group_lines(spans.to_vec(), params.line_gap_frac * h)
        .into_iter()
        .map(|line| {
            let bbox = line.iter().skip(1).fold(line[0].bbox, |acc, s| acc.union(&s.bbox));
            (bbox, join_line(&line))
        })
        .collect();
    let line_h = median(lines.iter().map(|(b, _)| b.height()).collect());

    let mut paragraphs: Vec<Paragraph> = Vec::new();
    let mut prev: Option<Rect> = None;
    for (bbox, text) in lines {
        let joins = prev.is_some_and(|p| {
            bbox.y0 - p.y1 <= params.para_gap_frac * line_h && x_overlap_ratio(&p, &bbox) >= params.para_overlap
        });
        match paragraphs.last_mut() {
            Some(para) if joins => {
                para.bbox = para.bbox.union(&bbox);
                para.text.push(' ');
                para.text.push_str(&text);
                para.line_count += 1;
            }
            _ => paragraphs.push(Paragraph { bbox, text, line_count: 1 }),
        }
        prev = Some(bbox);
    }
    paragraphs
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linecell::{merge_spans, EdgePresence, Grid};
    use crate::rng::SplitMix64;
    use proptest::prelude::*;

    fn span(x0: f64, y0: f64, x1: f64, y1: f64, text: &str) -> TextSpan {
        TextSpan::new(Rect::new(x0, y0, x1, y1), text)
    }

    #[test]
    fn split_examples() {
        let s = span(0.0, 0.0, 40.0, 10.0, "abcd");
        let parts = split_span(&s, &[20.0]);
        assert_eq!(parts.len(), 2);
        assert_eq!((parts[0].text.as_str(), parts[0].bbox.x1), ("ab", 20.0));
        assert_eq!((parts[1].text.as_str(), parts[1].bbox.x0), ("cd", 20.0));
        assert_eq!(split_span(&s, &[]), vec![s.clone()]);
        assert_eq!(split_span(&s, &[-5.0, 40.0, 99.0]), vec![s]);

        let s = span(0.0, 0.0, 40.0, 10.0, "abc").with_advances(vec![5.0, 30.0, 5.0]);
        let parts = split_span(&s, &[20.0]);
        assert_eq!(parts[0].text, "ab");
        assert_eq!(parts[1].text, "c");
        assert_eq!(parts[0].bbox.x1, 35.0);
    }

    fn grid_2x2() -> TableStructure {
        let grid = Grid { row_bounds: vec![0.0, 20.0, 40.0], col_bounds: vec![0.0, 50.0, 100.0] };
        merge_spans(&grid, &EdgePresence::full(2, 2))
    }

    #[test]
    fn assign_inside_straddle_and_newline() {
        let t = grid_2x2();
        let tol = Tolerances::default();
        let p = TextParams::default();
        let out = assign_spans(&t, &[span(5.0, 5.0, 20.0, 13.0, "hi")], &tol, &p);
        assert_eq!(out.cells[0].text, "hi");

        let out = assign_spans(&t, &[span(30.0, 25.0, 70.0, 33.0, "leftrght")], &tol, &p);
        assert_eq!(out.cells[2].text, "left");
        assert_eq!(out.cells[3].text, "rght");

        let stacked = [span(52.0, 1.0, 70.0, 7.0, "top"), span(52.0, 11.0, 70.0, 17.0, "low")];
        let out = assign_spans(&t, &stacked, &tol, &p);
        assert_eq!(out.cells[1].text, "top\nlow");

        let same_line = [span(75.0, 5.0, 95.0, 11.0, "b"), span(52.0, 5.2, 70.0, 11.2, "a")];
        let out = assign_spans(&t, &same_line, &tol, &p);
        assert_eq!(out.cells[1].text, "a b");
    }

    #[test]
    fn stray_span_attached_with_warning() {
        let out = assign_spans(
            &grid_2x2(),
            &[span(110.0, 2.0, 120.0, 8.0, "x")],
            &Tolerances::default(),
            &TextParams::default(),
        );
        assert_eq!(out.cells[1].text, "x");
        assert_eq!(out.warnings.len(), 1);
    }

    #[test]
    fn slight_reach_is_not_split() {
        // 4 chars of width 10; reaches 2 units past the border, under half a char
        let out = assign_spans(
            &grid_2x2(),
            &[span(12.0, 5.0, 52.0, 13.0, "abcd")],
            &Tolerances::default(),
            &TextParams::default(),
        );
        assert_eq!(out.cells[0].text, "abcd");
    }

    #[test]
    fn paragraphs() {
        let p = TextParams::default();
        assert!(merge_paragraphs(&[], &p).is_empty());
        let close = [span(0.0, 0.0, 100.0, 10.0, "one"), span(0.0, 20.0, 90.0, 30.0, "two")];
        let out = merge_paragraphs(&close, &p);
        assert_eq!(out.len(), 1);
        assert_eq!((out[0].text.as_str(), out[0].line_count), ("one two", 2));
        let far = [span(0.0, 0.0, 100.0, 10.0, "one"), span(0.0, 40.0, 90.0, 50.0, "two")];
        assert_eq!(merge_paragraphs(&far, &p).len(), 2);
        let line = [span(50.0, 0.0, 90.0, 10.0, "world"), span(0.0, 1.0, 40.0, 11.0, "hello")];
        assert_eq!(merge_paragraphs(&line, &p)[0].text, "hello world");
    }

    fn sorted_chars(texts: impl IntoIterator<Item = String>) -> Vec<char> {
        let mut v: Vec<char> =
            texts.into_iter().flat_map(|t| t.chars().collect::<Vec<_>>()).filter(|c| !c.is_whitespace()).collect();
        v.sort_unstable();
        v
    }

    #[test]
    fn conservation_and_permutation_invariance() {
        let grid = Grid { row_bounds: vec![0.0, 20.0, 40.0, 60.0], col_bounds: vec![0.0, 30.0, 60.0, 90.0] };
        let mut edges = EdgePresence::full(3, 3);
        edges.v_edges[0][1] = false;
        let t = merge_spans(&grid, &edges);
        let mut rng = SplitMix64::new(11);
        for _ in 0..100 {
            let mut spans = Vec::new();
            for i in 0..rng.inclusive(1, 8) {
                let n = rng.inclusive(1, 10) as usize;
                let text: String = (0..n).map(|k| (b'a' + ((i as usize * 7 + k) % 26) as u8) as char).collect();
                let x0 = rng.range_f64(0.0, 80.0);
                let y0 = rng.range_f64(0.0, 52.0);
                let w = n as f64 * rng.range_f64(2.0, 5.0);
                let adv: Vec<f64> = (0..n).map(|_| rng.range_f64(0.5, 2.0)).collect();
                let mut s = span(x0, y0, x0 + w, y0 + 7.0, &text);
                if rng.chance(0.5) {
                    s = s.with_advances(adv);
                }
                spans.push(s);
            }
            let tol = Tolerances::default();
            let p = TextParams::default();
            let a = assign_spans(&t, &spans, &tol, &p);
            assert_eq!(
                sorted_chars(a.cells.iter().map(|c| c.text.clone())),
                sorted_chars(spans.iter().map(|s| s.text.clone()))
            );
            spans.reverse();
            let len = spans.len();
            spans.swap(0, len / 2);
            let b = assign_spans(&t, &spans, &tol, &p);
            assert_eq!(a, b);
        }
    }

    proptest! {
        #[test]
        fn split_children_concatenate_and_tile(
            text in "[a-z0-9]{1,12}",
            adv_seed in any::<u64>(),
            cuts in prop::collection::vec(0.0..60.0f64, 0..5),
            with_adv in any::<bool>(),
        ) {
            let n = text.chars().count();
            let mut rng = SplitMix64::new(adv_seed);
            let adv: Vec<f64> = (0..n).map(|_| rng.range_f64(0.5, 8.0)).collect();
            let w: f64 = adv.iter().sum();
            let mut s = span(3.0, 0.0, 3.0 + w, 10.0, &text);
            if with_adv {
                s = s.with_advances(adv);
            }
            let mut cuts = cuts;
            cuts.sort_by(f64::total_cmp);
            cuts.dedup();
            let parts = split_span(&s, &cuts);
            let joined: String = parts.iter().map(|p| p.text.as_str()).collect();
            prop_assert_eq!(joined, text);
            prop_assert!(parts.iter().all(|p| !p.text.is_empty()));
            prop_assert_eq!(parts[0].bbox.x0, s.bbox.x0);
            prop_assert_eq!(parts.last().unwrap().bbox.x1, s.bbox.x1);
            for w in parts.windows(2) {
                prop_assert_eq!(w[0].bbox.x1, w[1].bbox.x0);
            }
        }
    }
}
