//! Axis-aligned primitives shared by every stage of the pipeline.
//!
//! All coordinates are page units (1/72 inch) with the origin at the top-left
//! corner and y growing downward. Frontends flip PDF user space on ingestion.

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum GeometryError {
    #[error("invalid input: {0}")]
    InvalidInput(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Orientation {
    Horizontal,
    Vertical,
}

/// An axis-aligned rule. `position` is the fixed coordinate (y for
/// horizontal rules, x for vertical ones) and `[lo, hi]` the covered interval
/// along the other axis.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Segment {
    pub orientation: Orientation,
    pub position: f64,
    pub lo: f64,
    pub hi: f64,
}

impl Segment {
    /// Builds a segment, normalizing the interval so that `lo <= hi`.
    /// Returns `None` for degenerate (zero-length) or non-finite input.
    pub fn new(orientation: Orientation, position: f64, a: f64, b: f64) -> Option<Self> {
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        if !(position.is_finite() && lo.is_finite() && hi.is_finite()) || lo >= hi {
            return None;
        }
        Some(Self { orientation, position, lo, hi })
    }

    pub fn horizontal(y: f64, x0: f64, x1: f64) -> Option<Self> {
        Self::new(Orientation::Horizontal, y, x0, x1)
    }

    pub fn vertical(x: f64, y0: f64, y1: f64) -> Option<Self> {
        Self::new(Orientation::Vertical, x, y0, y1)
    }

    pub fn len(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn is_horizontal(&self) -> bool {
        self.orientation == Orientation::Horizontal
    }

    /// Length of the overlap between this segment's interval and `[lo, hi]`.
    pub fn overlap(&self, lo: f64, hi: f64) -> f64 {
        (self.hi.min(hi) - self.lo.max(lo)).max(0.0)
    }

    /// Bounding rectangle of the rule, treated as having zero thickness.
    pub fn bounds(&self) -> (f64, f64, f64, f64) {
        match self.orientation {
            Orientation::Horizontal => (self.lo, self.position, self.hi, self.position),
            Orientation::Vertical => (self.position, self.lo, self.position, self.hi),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Rect {
    pub x0: f64,
    pub y0: f64,
    pub x1: f64,
    pub y1: f64,
}

impl Rect {
    pub fn new(x0: f64, y0: f64, x1: f64, y1: f64) -> Self {
        Self { x0, y0, x1, y1 }
    }

    /// Rectangle spanning two arbitrary corners.
    pub fn from_corners(a: Point, b: Point) -> Self {
        Self::new(a.x.min(b.x), a.y.min(b.y), a.x.max(b.x), a.y.max(b.y))
    }

    pub fn width(&self) -> f64 {
        self.x1 - self.x0
    }

    pub fn height(&self) -> f64 {
        self.y1 - self.y0
    }

    pub fn area(&self) -> f64 {
        self.width().max(0.0) * self.height().max(0.0)
    }

    pub fn center(&self) -> Point {
        Point::new((self.x0 + self.x1) / 2.0, (self.y0 + self.y1) / 2.0)
    }

    pub fn is_valid(&self) -> bool {
        [self.x0, self.y0, self.x1, self.y1].iter().all(|v| v.is_finite()) && self.x0 < self.x1 && self.y0 < self.y1
    }

    pub fn contains(&self, p: Point) -> bool {
        p.x >= self.x0 && p.x <= self.x1 && p.y >= self.y0 && p.y <= self.y1
    }

    pub fn intersection(&self, other: &Rect) -> Option<Rect> {
        let r = Rect::new(self.x0.max(other.x0), self.y0.max(other.y0), self.x1.min(other.x1), self.y1.min(other.y1));
        (r.x0 < r.x1 && r.y0 < r.y1).then_some(r)
    }

    pub fn union(&self, other: &Rect) -> Rect {
        Rect::new(self.x0.min(other.x0), self.y0.min(other.y0), self.x1.max(other.x1), self.y1.max(other.y1))
    }

    pub fn expand(&self, d: f64) -> Rect {
        Rect::new(self.x0 - d, self.y0 - d, self.x1 + d, self.y1 + d)
    }

    /// Distance between centers; used as a fallback when nothing contains a point.
    pub fn center_distance(&self, p: Point) -> f64 {
        let c = self.center();
        ((c.x - p.x).powi(2) + (c.y - p.y).powi(2)).sqrt()
    }
}

/// Matching tolerances shared by segment consolidation, lattice construction
/// and text assignment.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Tolerances {
    /// Rules whose fixed coordinates differ by at most this much are collinear.
    pub line_snap_tol: f64,
    /// Fraction of a lattice unit a rule must cover to count as an edge.
    pub edge_cover_ratio: f64,
    /// Largest gap bridged when joining collinear rules or testing intersections.
    pub join_tol: f64,
    /// Fraction of a character width a span must reach into a neighbor cell
    /// before it is split.
    pub overlap_frac: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self { line_snap_tol: 2.0, edge_cover_ratio: 0.8, join_tol: 3.0, overlap_frac: 0.5 }
    }
}

impl Tolerances {
    pub fn validate(&self) -> Result<(), GeometryError> {
        let positive = [
            ("line_snap_tol", self.line_snap_tol),
            ("edge_cover_ratio", self.edge_cover_ratio),
            ("join_tol", self.join_tol),
            ("overlap_frac", self.overlap_frac),
        ];
        for (name, v) in positive {
            if !(v.is_finite() && v > 0.0) {
                return Err(GeometryError::InvalidInput(format!("{name} must be positive")));
            }
        }
        if self.edge_cover_ratio > 1.0 || self.overlap_frac > 1.0 {
            return Err(GeometryError::InvalidInput("ratios must be <= 1".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug)]
struct Accum {
    seg: Segment,
    weighted_pos: f64,
    weight: f64,
}

impl Accum {
    fn new(seg: Segment) -> Self {
        let weight = seg.len();
        Self { seg, weighted_pos: seg.position * weight, weight }
    }

    fn mergeable(&self, other: &Segment, tol: &Tolerances) -> bool {
        let gap = (self.seg.lo.max(other.lo) - self.seg.hi.min(other.hi)).max(0.0);
        (self.seg.position - other.position).abs() <= tol.line_snap_tol && gap <= tol.join_tol
    }

    fn absorb(&mut self, other: &Accum) {
        self.weighted_pos += other.weighted_pos;
        self.weight += other.weight;
        self.seg.lo = self.seg.lo.min(other.seg.lo);
        self.seg.hi = self.seg.hi.max(other.seg.hi);
        self.seg.position = self.weighted_pos / self.weight;
    }
}

fn sort_segments(segs: &mut [Segment]) {
    segs.sort_by(|a, b| a.position.total_cmp(&b.position).then(a.lo.total_cmp(&b.lo)).then(a.hi.total_cmp(&b.hi)));
}

/// Consolidates collinear, touching or overlapping rules of one orientation.
///
/// Merged rules take the length-weighted mean position of their members and
/// the union of their intervals. The merge is repeated until no two outputs
/// are within `line_snap_tol` of each other with an interval gap of at most
/// `join_tol`. Output is sorted by `(position, lo)`.
pub fn merge_collinear(segments: &[Segment], tol: &Tolerances) -> Result<Vec<Segment>, GeometryError> {
    let Some(first) = segments.first() else {
        return Ok(Vec::new());
    };
    if segments.iter().any(|s| s.orientation != first.orientation) {
        return Err(GeometryError::InvalidInput("merge_collinear requires segments of a single orientation".into()));
    }
    let mut sorted = segments.to_vec();
    sort_segments(&mut sorted);
    let mut current: Vec<Accum> = sorted.into_iter().map(Accum::new).collect();
    loop {
        let mut merged_any = false;
        let mut out: Vec<Accum> = Vec::with_capacity(current.len());
        for acc in current {
            match out.iter_mut().rev().find(|o| o.mergeable(&acc.seg, tol)) {
                Some(target) => {
                    target.absorb(&acc);
                    merged_any = true;
                }
                None => out.push(acc),
            }
        }
        out.sort_by(|a, b| a.seg.position.total_cmp(&b.seg.position).then(a.seg.lo.total_cmp(&b.seg.lo)));
        current = out;
        if !merged_any {
            break;
        }
    }
    Ok(current.into_iter().map(|a| a.seg).collect())
}

/// Intersection-over-union of two rectangles, in `[0, 1]`.
pub fn rect_iou(a: &Rect, b: &Rect) -> f64 {
    let inter = a.intersection(b).map_or(0.0, |r| r.area());
    let union = a.area() + b.area() - inter;
    if union <= 0.0 {
        0.0
    } else {
        (inter / union).clamp(0.0, 1.0)
    }
}

/// A group of nearby 1-D values produced by [`snap_1d`].
#[derive(Clone, Debug, PartialEq)]
pub struct Cluster {
    pub canonical: f64,
    pub members: Vec<usize>,
}

/// Single-linkage clustering of scalar values: after sorting, a new cluster
/// starts wherever the gap to the previous value exceeds `tol`. Each
/// cluster's canonical value is the mean of its members.
pub fn snap_1d(values: &[f64], tol: f64) -> Result<Vec<Cluster>, GeometryError> {
    if values.is_empty() {
        return Err(GeometryError::InvalidInput("snap_1d of empty list".into()));
    }
    if values.iter().any(|v| !v.is_finite()) {
        return Err(GeometryError::InvalidInput("snap_1d of non-finite value".into()));
    }
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]).then(a.cmp(&b)));

    let mut clusters: Vec<Vec<usize>> = vec![vec![order[0]]];
    for w in order.windows(2) {
        if values[w[1]] - values[w[0]] > tol {
            clusters.push(Vec::new());
        }
        clusters.last_mut().unwrap().push(w[1]);
    }
    Ok(clusters
        .into_iter()
        .map(|mut members| {
            let canonical = members.iter().map(|&i| values[i]).sum::<f64>() / members.len() as f64;
            members.sort_unstable();
            Cluster { canonical, members }
        })
        .collect())
}
