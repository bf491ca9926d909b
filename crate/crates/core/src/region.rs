//! Groups rules into candidate table regions and classifies them.
//!
//! A wired region is a connected lattice of horizontal and vertical rules with
//! at least two of each and four distinct crossings. Text laid out on an
//! aligned grid with fewer than two rules is reported as a wireless region;
//! those are flagged but not parsed.

use crate::geometry::{snap_1d, Point, Rect, Segment, Tolerances};
use crate::lines::{dedup_points, segments_meet};
use crate::page::{PageGraphics, TextSpan};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RegionKind {
    Wired,
    Wireless,
}

#[derive(Clone, Debug, PartialEq)]
pub struct TableRegion {
    pub bbox: Rect,
    /// Indices into the page's `segments`.
    pub h_segments: Vec<usize>,
    pub v_segments: Vec<usize>,
    pub kind: RegionKind,
}

struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        Self { parent: (0..n).collect() }
    }

    fn find(&mut self, mut i: usize) -> usize {
        while self.parent[i] != i {
            self.parent[i] = self.parent[self.parent[i]];
            i = self.parent[i];
        }
        i
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.parent[ra.max(rb)] = ra.min(rb);
        }
    }
}

fn hull(segments: &[Segment], members: impl Iterator<Item = usize>) -> Option<Rect> {
    members
        .map(|i| {
            let (x0, y0, x1, y1) = segments[i].bounds();
            Rect::new(x0, y0, x1, y1)
        })
        .reduce(|a, b| a.union(&b))
}

fn overlaps(a: &Rect, b: &Rect, tol: f64) -> bool {
    a.x0 < b.x1 - tol && b.x0 < a.x1 - tol && a.y0 < b.y1 - tol && b.y0 < a.y1 - tol
}

/// Number of distinct crossings among a set of rules.
pub fn crossing_count(segments: &[Segment], h: &[usize], v: &[usize], tol: &Tolerances) -> usize {
    let mut points = Vec::new();
    for &hi in h {
        for &vi in v {
            if segments_meet(&segments[hi], &segments[vi], tol) {
                points.push(Point::new(segments[vi].position, segments[hi].position));
            }
        }
    }
    dedup_points(points, tol.line_snap_tol).len()
}

fn reading_order(a: &Rect, b: &Rect) -> std::cmp::Ordering {
    a.y0.total_cmp(&b.y0).then(a.x0.total_cmp(&b.x0))
}

/// Finds wired regions from the page's rules and wireless regions from
/// grid-aligned text. Segments are expected to be merged already.
pub fn detect_regions(page: &PageGraphics, tol: &Tolerances) -> Vec<TableRegion> {
    let segs = &page.segments;
    let h_idx: Vec<usize> = (0..segs.len()).filter(|&i| segs[i].is_horizontal()).collect();
    let v_idx: Vec<usize> = (0..segs.len()).filter(|&i| !segs[i].is_horizontal()).collect();

    let mut uf = UnionFind::new(segs.len());
    for &hi in &h_idx {
        for &vi in &v_idx {
            if segments_meet(&segs[hi], &segs[vi], tol) {
                uf.union(hi, vi);
            }
        }
    }
    let mut groups: std::collections::BTreeMap<usize, Vec<usize>> = Default::default();
    for i in 0..segs.len() {
        groups.entry(uf.find(i)).or_default().push(i);
    }

    // Candidate lattices; overlapping hulls are fused before qualification.
    let mut candidates: Vec<(Rect, Vec<usize>)> = groups
        .into_values()
        .filter(|m| m.len() >= 2)
        .filter_map(|m| hull(segs, m.iter().copied()).map(|r| (r, m)))
        .collect();
    loop {
        let mut fused = false;
        'scan: for i in 0..candidates.len() {
            for j in (i + 1)..candidates.len() {
                if overlaps(&candidates[i].0, &candidates[j].0, tol.line_snap_tol) {
                    let (rj, mj) = candidates.remove(j);
                    let ci = &mut candidates[i];
                    ci.0 = ci.0.union(&rj);
                    ci.1.extend(mj);
                    fused = true;
                    break 'scan;
                }
            }
        }
        if !fused {
            break;
        }
    }

    let mut regions: Vec<TableRegion> = Vec::new();
    for (bbox, mut members) in candidates {
        members.sort_unstable();
        let (h, v): (Vec<usize>, Vec<usize>) = members.iter().partition(|&&i| segs[i].is_horizontal());
        if h.len() >= 2 && v.len() >= 2 && crossing_count(segs, &h, &v, tol) >= 4 {
            regions.push(TableRegion { bbox, h_segments: h, v_segments: v, kind: RegionKind::Wired });
        }
    }

    let outside: Vec<&TextSpan> =
        page.text_spans.iter().filter(|s| !regions.iter().any(|r| r.bbox.contains(s.bbox.center()))).collect();
    for bbox in aligned_text_blocks(&outside, tol) {
        let rules_inside = segs
            .iter()
            .filter(|s| {
                let (x0, y0, x1, y1) = s.bounds();
                bbox.intersection(&Rect::new(x0, y0 - 0.5, x1, y1 + 0.5)).is_some()
                    || bbox.intersection(&Rect::new(x0 - 0.5, y0, x1 + 0.5, y1)).is_some()
            })
            .count();
        if rules_inside < 2 && !regions.iter().any(|r| overlaps(&r.bbox, &bbox, 0.0)) {
            regions.push(TableRegion {
                bbox,
                h_segments: Vec::new(),
                v_segments: Vec::new(),
                kind: RegionKind::Wireless,
            });
        }
    }

    regions.sort_by(|a, b| reading_order(&a.bbox, &b.bbox));
    regions
}

fn median(mut v: Vec<f64>) -> f64 {
    v.sort_by(f64::total_cmp);
    v[v.len() / 2]
}

/// Blocks of consecutive text rows, each holding at least two spans, whose
/// left edges line up in at least two columns shared by at least two rows.
fn aligned_text_blocks(spans: &[&TextSpan], tol: &Tolerances) -> Vec<Rect> {
    if spans.len() < 4 {
        return Vec::new();
    }
    let line_h = median(spans.iter().map(|s| s.bbox.height()).collect());
    let centers: Vec<f64> = spans.iter().map(|s| s.bbox.center().y).collect();
    let Ok(rows) = snap_1d(&centers, 0.5 * line_h) else {
        return Vec::new();
    };

    let mut blocks = Vec::new();
    let mut block: Vec<&Vec<usize>> = Vec::new();
    let mut last_bottom = f64::NEG_INFINITY;
    let flush = |block: &mut Vec<&Vec<usize>>, blocks: &mut Vec<Rect>| {
        if block.len() >= 2 {
            let xs: Vec<f64> = block.iter().flat_map(|r| r.iter().map(|&i| spans[i].bbox.x0)).collect();
            let row_of: Vec<usize> =
                block.iter().enumerate().flat_map(|(ri, r)| std::iter::repeat_n(ri, r.len())).collect();
            let columns = snap_1d(&xs, 2.0 * tol.line_snap_tol).unwrap_or_default();
            let shared = columns
                .iter()
                .filter(|c| {
                    let mut rows: Vec<usize> = c.members.iter().map(|&m| row_of[m]).collect();
                    rows.dedup();
                    rows.sort_unstable();
                    rows.dedup();
                    rows.len() >= 2
                })
                .count();
            if shared >= 2 {
                let bbox =
                    block.iter().flat_map(|r| r.iter().map(|&i| spans[i].bbox)).reduce(|a, b| a.union(&b)).unwrap();
                blocks.push(bbox);
            }
        }
        block.clear();
    };
    for row in &rows {
        let top = row.members.iter().map(|&i| spans[i].bbox.y0).fold(f64::INFINITY, f64::min);
        let bottom = row.members.iter().map(|&i| spans[i].bbox.y1).fold(f64::NEG_INFINITY, f64::max);
        let multi = row.members.len() >= 2;
        if !multi || top - last_bottom > 2.0 * line_h {
            flush(&mut block, &mut blocks);
        }
        if multi {
            block.push(&row.members);
            last_bottom = bottom;
        }
    }
    flush(&mut block, &mut blocks);
    blocks
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::page::SourceKind;

    fn grid(x0: f64, y0: f64, n: usize, step: f64) -> Vec<Segment> {
        let end = step * n as f64;
        let mut out = Vec::new();
        for i in 0..=n {
            let o = i as f64 * step;
            out.push(Segment::horizontal(y0 + o, x0, x0 + end).unwrap());
            out.push(Segment::vertical(x0 + o, y0, y0 + end).unwrap());
        }
        out
    }

    #[test]
    fn single_grid_region() {
        let mut page = PageGraphics::empty(0, 400.0, 400.0, SourceKind::DigitalPdf);
        page.segments = grid(50.0, 60.0, 3, 30.0);
        let regions = detect_regions(&page, &Tolerances::default());
        assert_eq!(regions.len(), 1);
        assert_eq!(regions[0].kind, RegionKind::Wired);
        assert_eq!(regions[0].bbox, Rect::new(50.0, 60.0, 140.0, 150.0));
        assert_eq!(regions[0].h_segments.len() + regions[0].v_segments.len(), 8);
    }

    #[test]
    fn two_grids_in_reading_order() {
        let mut page = PageGraphics::empty(0, 400.0, 600.0, SourceKind::DigitalPdf);
        page.segments = grid(50.0, 300.0, 2, 30.0);
        page.segments.extend(grid(50.0, 20.0, 3, 20.0));
        let regions = detect_regions(&page, &Tolerances::default());
        assert_eq!(regions.len(), 2);
        assert_eq!(regions[0].bbox.y0, 20.0);
        assert_eq!(regions[1].bbox.y0, 300.0);
    }

    #[test]
    fn free_text_and_lone_rules_are_not_tables() {
        let mut page = PageGraphics::empty(0, 400.0, 400.0, SourceKind::DigitalPdf);
        for i in 0..5 {
            let y = 20.0 + i as f64 * 14.0;
            page.text_spans.push(TextSpan::new(Rect::new(30.0, y, 300.0, y + 10.0), "lorem ipsum dolor"));
        }
        page.segments.push(Segment::horizontal(200.0, 30.0, 300.0).unwrap());
        page.segments.push(Segment::vertical(350.0, 10.0, 100.0).unwrap());
        assert!(detect_regions(&page, &Tolerances::default()).is_empty());
    }

    #[test]
    fn aligned_text_flagged_wireless() {
        let mut page = PageGraphics::empty(0, 400.0, 400.0, SourceKind::DigitalPdf);
        for r in 0..3 {
            for c in 0..3 {
                let (x, y) = (40.0 + c as f64 * 80.0, 40.0 + r as f64 * 16.0);
                page.text_spans.push(TextSpan::new(Rect::new(x, y, x + 30.0, y + 10.0), "cell"));
            }
        }
        let regions = detect_regions(&page, &Tolerances::default());
        assert_eq!(regions.len(), 1);
        assert_eq!(regions[0].kind, RegionKind::Wireless);
        assert_eq!(regions[0].bbox, Rect::new(40.0, 40.0, 230.0, 82.0));
    }

    #[test]
    fn every_segment_in_at_most_one_region() {
        let mut page = PageGraphics::empty(0, 400.0, 600.0, SourceKind::DigitalPdf);
        page.segments = grid(10.0, 10.0, 2, 40.0);
        page.segments.extend(grid(200.0, 10.0, 4, 20.0));
        page.segments.extend(grid(10.0, 300.0, 1, 50.0));
        let regions = detect_regions(&page, &Tolerances::default());
        assert_eq!(regions.len(), 3);
        let mut all: Vec<usize> =
            regions.iter().flat_map(|r| r.h_segments.iter().chain(&r.v_segments).copied()).collect();
        let n = all.len();
        all.sort_unstable();
        all.dedup();
        assert_eq!(all.len(), n);
        for i in 0..regions.len() {
            for j in (i + 1)..regions.len() {
                assert_eq!(crate::geometry::rect_iou(&regions[i].bbox, &regions[j].bbox), 0.0);
            }
        }
    }
}
