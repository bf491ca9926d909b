//! Seeded synthetic wired tables with exact ground truth.
//!
//! One seed yields a logical structure, the vector page that draws it and a
//! raster rendering with 1 px rules. Every draw comes from [`SplitMix64`] in a
//! fixed order, so corpora reproduce bit for bit.

use thiserror::Error;

use crate::deskew::{rotate_raster, MAX_SKEW_DEG};
use crate::geometry::{Rect, Segment};
use crate::linecell::{EdgePresence, LogicalCell, TableStructure};
use crate::page::{PageGraphics, RasterPage, SourceKind, TextSpan};
use crate::rng::SplitMix64;

#[derive(Debug, Error, PartialEq)]
pub enum SynthError {
    #[error("invalid synth parameter: {0}")]
    Config(String),
}

#[derive(Clone, Debug, PartialEq)]
pub struct SynthParams {
    pub seed: u64,
    pub max_rows: usize,
    pub max_cols: usize,
    pub merge_prob: f64,
    pub skew_deg: f64,
    pub dpi: f64,
    pub text_fill: bool,
    /// Standard deviation of additive Gaussian pixel noise, in gray levels.
    pub noise_sigma: f64,
    pub page_width: f64,
    pub page_height: f64,
    pub margin: f64,
    /// Smallest lattice unit side in points.
    pub min_cell: f64,
}

impl Default for SynthParams {
    fn default() -> Self {
        Self {
            seed: 0,
            max_rows: 12,
            max_cols: 8,
            merge_prob: 0.3,
            skew_deg: 0.0,
            dpi: 150.0,
            text_fill: true,
            noise_sigma: 0.0,
            page_width: 360.0,
            page_height: 432.0,
            margin: 24.0,
            min_cell: 18.0,
        }
    }
}

impl SynthParams {
    pub fn with_seed(seed: u64) -> Self {
        Self { seed, ..Self::default() }
    }

    pub fn validate(&self) -> Result<(), SynthError> {
        let bad = |m: &str| Err(SynthError::Config(m.to_string()));
        if self.max_rows == 0 || self.max_cols == 0 {
            return bad("max_rows and max_cols must be at least 1");
        }
        if !(0.0..1.0).contains(&self.merge_prob) {
            return bad("merge_prob must lie in [0, 1)");
        }
        if !self.skew_deg.is_finite() || self.skew_deg.abs() > MAX_SKEW_DEG {
            return bad("skew_deg must lie in [-45, 45]");
        }
        if !(self.dpi.is_finite() && self.dpi > 0.0) {
            return bad("dpi must be positive");
        }
        if !(self.noise_sigma.is_finite() && self.noise_sigma >= 0.0) {
            return bad("noise_sigma must be non-negative");
        }
        if !(self.min_cell.is_finite() && self.min_cell > 0.0) || !(self.margin.is_finite() && self.margin >= 0.0) {
            return bad("min_cell must be positive and margin non-negative");
        }
        let (aw, ah) = self.available();
        if self.max_cols as f64 * self.min_cell > aw || self.max_rows as f64 * self.min_cell > ah {
            return bad(&format!(
                "{}x{} units of {} pt do not fit in a {}x{} pt page with {} pt margins",
                self.max_rows, self.max_cols, self.min_cell, self.page_width, self.page_height, self.margin
            ));
        }
        Ok(())
    }

    fn available(&self) -> (f64, f64) {
        (self.page_width - 2.0 * self.margin, self.page_height - 2.0 * self.margin)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SynthItem {
    pub structure: TableStructure,
    pub page: PageGraphics,
    pub raster: RasterPage,
}

fn q(v: f64) -> f64 {
    (v * 1000.0).round() / 1000.0
}

/// Draws `n` sizes in `[min, upper]` where `upper` keeps the total within `avail`.
fn draw_sizes(rng: &mut SplitMix64, n: usize, min: f64, cap: f64, avail: f64) -> Vec<f64> {
    let upper = cap.min(avail / n as f64).max(min);
    (0..n).map(|_| rng.range_f64(min, upper)).collect()
}

fn bounds_from(start: f64, sizes: &[f64]) -> Vec<f64> {
    let mut out = vec![q(start)];
    let mut acc = start;
    for s in sizes {
        acc += s;
        out.push(q(acc));
    }
    out
}

struct Lattice {
    n_rows: usize,
    n_cols: usize,
    /// (row, col, rowspan, colspan)
    cells: Vec<(usize, usize, usize, usize)>,
    owner: Vec<Vec<usize>>,
}

impl Lattice {
    fn new(n_rows: usize, n_cols: usize) -> Self {
        let cells = (0..n_rows).flat_map(|r| (0..n_cols).map(move |c| (r, c, 1, 1))).collect();
        let owner = (0..n_rows).map(|r| (0..n_cols).map(|c| r * n_cols + c).collect()).collect();
        Self { n_rows, n_cols, cells, owner }
    }

    fn edges_of(&self, owner: &[Vec<usize>]) -> EdgePresence {
        let (nr, nc) = (self.n_rows, self.n_cols);
        EdgePresence {
            h_edges: (0..=nr)
                .map(|i| (0..nc).map(|j| i == 0 || i == nr || owner[i - 1][j] != owner[i][j]).collect())
                .collect(),
            v_edges: (0..nr)
                .map(|i| (0..=nc).map(|j| j == 0 || j == nc || owner[i][j - 1] != owner[i][j]).collect())
                .collect(),
        }
    }

    /// Every interior boundary keeps at least one drawn edge, so no lattice
    /// line vanishes from the page.
    fn boundaries_survive(&self, owner: &[Vec<usize>]) -> bool {
        let e = self.edges_of(owner);
        let rows_ok = (1..self.n_rows).all(|i| e.h_edges[i].iter().any(|&b| b));
        let cols_ok = (1..self.n_cols).all(|j| e.v_edges.iter().any(|row| row[j]));
        rows_ok && cols_ok
    }

    /// Merges cell `a` with its neighbor to the right (`down == false`) or
    /// below when the union is a rectangle.
    fn try_merge(&mut self, a: usize, down: bool) -> bool {
        let (r, c, rs, cs) = self.cells[a];
        let (nr, nc) = if down { (r + rs, c) } else { (r, c + cs) };
        if nr >= self.n_rows || nc >= self.n_cols {
            return false;
        }
        let b = self.owner[nr][nc];
        let (br, bc, brs, bcs) = self.cells[b];
        let fits = if down { bc == c && bcs == cs } else { br == r && brs == rs };
        if !fits {
            return false;
        }
        let mut owner = self.owner.clone();
        for row in owner.iter_mut().skip(br).take(brs) {
            for slot in row.iter_mut().skip(bc).take(bcs) {
                *slot = a;
            }
        }
        if !self.boundaries_survive(&owner) {
            return false;
        }
        self.owner = owner;
        self.cells[a] = if down { (r, c, rs + brs, cs) } else { (r, c, rs, cs + bcs) };
        self.cells[b] = (usize::MAX, 0, 0, 0);
        true
    }

    fn live_cells(&self) -> Vec<(usize, usize, usize, usize)> {
        let mut v: Vec<_> = self.cells.iter().copied().filter(|c| c.0 != usize::MAX).collect();
        v.sort_unstable();
        v
    }
}

/// Maximal runs of present unit edges along one boundary.
fn runs(present: &[bool], bounds: &[f64]) -> Vec<(f64, f64)> {
    let mut out = Vec::new();
    let mut start = None;
    for (j, &p) in present.iter().chain(std::iter::once(&false)).enumerate() {
        match (p, start) {
            (true, None) => start = Some(j),
            (false, Some(s)) => {
                out.push((bounds[s], bounds[j]));
                start = None;
            }
            _ => {}
        }
    }
    out
}

fn rotate_about(p: (f64, f64), center: (f64, f64), angle_deg: f64) -> (f64, f64) {
    let (s, c) = angle_deg.to_radians().sin_cos();
    let (u, v) = (p.0 - center.0, p.1 - center.1);
    (center.0 + c * u - s * v, center.1 + s * u + c * v)
}

/// Generates one item. The raster is rendered from the unrotated rules and
/// then turned by `skew_deg` onto an enlarged canvas.
pub fn gen_table(params: &SynthParams) -> Result<SynthItem, SynthError> {
    params.validate()?;
    let mut rng = SplitMix64::new(params.seed);
    let (aw, ah) = params.available();
    let n_rows = rng.inclusive(params.max_rows.min(2) as u64, params.max_rows as u64) as usize;
    let n_cols = rng.inclusive(params.max_cols.min(2) as u64, params.max_cols as u64) as usize;
    let widths = draw_sizes(&mut rng, n_cols, params.min_cell, params.min_cell + 30.0, aw);
    let heights = draw_sizes(&mut rng, n_rows, params.min_cell, params.min_cell + 12.0, ah);
    let (tw, th): (f64, f64) = (widths.iter().sum(), heights.iter().sum());
    let x0 = params.margin + rng.range_f64(0.0, (aw - tw).max(0.0));
    let y0 = params.margin + rng.range_f64(0.0, (ah - th).max(0.0));
    let col_bounds = bounds_from(x0, &widths);
    let row_bounds = bounds_from(y0, &heights);

    let mut lattice = Lattice::new(n_rows, n_cols);
    for _ in 0..n_rows * n_cols {
        if !rng.chance(params.merge_prob) {
            continue;
        }
        let live = lattice.live_cells();
        let (r, c, _, _) = live[rng.below(live.len() as u64) as usize];
        let down = rng.below(2) == 1;
        let id = lattice.owner[r][c];
        lattice.try_merge(id, down);
    }

    let mut cells = Vec::new();
    let mut spans = Vec::new();
    for (r, c, rs, cs) in lattice.live_cells() {
        let bbox = Rect::new(col_bounds[c], row_bounds[r], col_bounds[c + cs], row_bounds[r + rs]);
        let mut text = String::new();
        if params.text_fill {
            text = format!("r{r}c{c}");
            let n = text.len() as f64;
            let adv = 3.0f64.min((bbox.width() - 3.0) / n);
            let cy = (bbox.y0 + bbox.y1) / 2.0;
            let sb = Rect::new(q(bbox.x0 + 1.5), q(cy - 3.0), q(bbox.x0 + 1.5 + adv * n), q(cy + 3.0));
            let w = sb.width() / n;
            spans.push(TextSpan::new(sb, text.clone()).with_advances(vec![w; text.len()]));
        }
        cells.push(LogicalCell { row: r, col: c, rowspan: rs, colspan: cs, bbox, text });
    }
    let structure = TableStructure {
        n_rows,
        n_cols,
        cells,
        region_bbox: Rect::new(col_bounds[0], row_bounds[0], col_bounds[n_cols], row_bounds[n_rows]),
        warnings: Vec::new(),
    };

    let edges = lattice.edges_of(&lattice.owner);
    let mut segments = Vec::new();
    for (i, row) in edges.h_edges.iter().enumerate() {
        for (lo, hi) in runs(row, &col_bounds) {
            segments.push(Segment::horizontal(row_bounds[i], lo, hi).expect("positive run"));
        }
    }
    for j in 0..=n_cols {
        let column: Vec<bool> = edges.v_edges.iter().map(|row| row[j]).collect();
        for (lo, hi) in runs(&column, &row_bounds) {
            segments.push(Segment::vertical(col_bounds[j], lo, hi).expect("positive run"));
        }
    }

    let raster = render(&segments, params, &mut rng);

    let mut page = PageGraphics::empty(0, params.page_width, params.page_height, SourceKind::DigitalPdf);
    if params.skew_deg != 0.0 {
        let center = (params.page_width / 2.0, params.page_height / 2.0);
        let turn = |x: f64, y: f64| rotate_about((x, y), center, params.skew_deg);
        page.segments = segments
            .iter()
            .filter_map(|s| {
                if s.is_horizontal() {
                    let (a, b) = (turn(s.lo, s.position), turn(s.hi, s.position));
                    Segment::horizontal(q((a.1 + b.1) / 2.0), q(a.0), q(b.0))
                } else {
                    let (a, b) = (turn(s.position, s.lo), turn(s.position, s.hi));
                    Segment::vertical(q((a.0 + b.0) / 2.0), q(a.1), q(b.1))
                }
            })
            .collect();
        page.text_spans = spans
            .into_iter()
            .map(|mut s| {
                let c = s.bbox.center();
                let (nx, ny) = turn(c.x, c.y);
                let (dx, dy) = (nx - c.x, ny - c.y);
                s.bbox = Rect::new(q(s.bbox.x0 + dx), q(s.bbox.y0 + dy), q(s.bbox.x1 + dx), q(s.bbox.y1 + dy));
                s
            })
            .collect();
        page.clip_to_page();
    } else {
        page.segments = segments;
        page.text_spans = spans;
    }
    Ok(SynthItem { structure, page, raster })
}

fn render(segments: &[Segment], params: &SynthParams, rng: &mut SplitMix64) -> RasterPage {
    let s = params.dpi / 72.0;
    let w = (params.page_width * s).round() as usize;
    let h = (params.page_height * s).round() as usize;
    let mut img = RasterPage::blank(w, h, params.dpi);
    let px = |v: f64, limit: usize| ((v * s).floor().max(0.0) as usize).min(limit - 1);
    for seg in segments {
        if seg.is_horizontal() {
            let y = px(seg.position, h);
            for x in px(seg.lo, w)..=px(seg.hi, w) {
                img.pixels[y * w + x] = 0;
            }
        } else {
            let x = px(seg.position, w);
            for y in px(seg.lo, h)..=px(seg.hi, h) {
                img.pixels[y * w + x] = 0;
            }
        }
    }
    if params.skew_deg != 0.0 {
        img = rotate_raster(&img, params.skew_deg).expect("validated angle");
    }
    if params.noise_sigma > 0.0 {
        for p in img.pixels.iter_mut() {
            *p = (*p as f64 + params.noise_sigma * rng.gaussian()).round().clamp(0.0, 255.0) as u8;
        }
    }
    img
}
