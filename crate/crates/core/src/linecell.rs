//! LineCell: turns a wired region's rules into a logical table.
//!
//! 1. [`build_grid`] snaps rule positions into row and column boundaries and
//!    drops boundaries crossed by fewer than two perpendicular rules.
//! 2. [`compute_edges`] records, for every lattice unit side, whether a
//!    physical rule covers it.
//! 3. [`merge_spans`] groups lattice units separated by missing rules into
//!    rectangular logical cells.

use thiserror::Error;

use crate::geometry::{snap_1d, Point, Rect, Segment, Tolerances};
use crate::lines::{dedup_points, segments_meet};
use crate::page::PageGraphics;
use crate::region::{RegionKind, TableRegion};

#[derive(Debug, Error, PartialEq)]
pub enum LineCellError {
    #[error("degenerate region: {0}")]
    DegenerateRegion(String),
}

/// Row and column boundaries of a table lattice, ascending.
#[derive(Clone, Debug, PartialEq)]
pub struct Grid {
    pub row_bounds: Vec<f64>,
    pub col_bounds: Vec<f64>,
}

impl Grid {
    pub fn n_rows(&self) -> usize {
        self.row_bounds.len() - 1
    }

    pub fn n_cols(&self) -> usize {
        self.col_bounds.len() - 1
    }

    pub fn bbox(&self) -> Rect {
        Rect::new(
            self.col_bounds[0],
            self.row_bounds[0],
            *self.col_bounds.last().unwrap(),
            *self.row_bounds.last().unwrap(),
        )
    }
}

/// `h_edges[i][j]`: a rule lies on row boundary `i` over column `j`.
/// `v_edges[i][j]`: a rule lies on column boundary `j` over row `i`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EdgePresence {
    pub h_edges: Vec<Vec<bool>>,
    pub v_edges: Vec<Vec<bool>>,
}

impl EdgePresence {
    /// Every edge present: a lattice of `n_rows` x `n_cols` 1x1 cells.
    pub fn full(n_rows: usize, n_cols: usize) -> Self {
        Self { h_edges: vec![vec![true; n_cols]; n_rows + 1], v_edges: vec![vec![true; n_cols + 1]; n_rows] }
    }

    pub fn n_rows(&self) -> usize {
        self.v_edges.len()
    }

    pub fn n_cols(&self) -> usize {
        self.h_edges.first().map_or(0, Vec::len)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct LogicalCell {
    pub row: usize,
    pub col: usize,
    pub rowspan: usize,
    pub colspan: usize,
    pub bbox: Rect,
    pub text: String,
}

impl LogicalCell {
    pub fn key(&self) -> (usize, usize, usize, usize) {
        (self.row, self.col, self.rowspan, self.colspan)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct TableStructure {
    pub n_rows: usize,
    pub n_cols: usize,
    /// Sorted by (row, col); their lattice rectangles partition the table.
    pub cells: Vec<LogicalCell>,
    pub region_bbox: Rect,
    pub warnings: Vec<String>,
}

impl TableStructure {
    /// Logical shape only: dimensions and cell tuples.
    pub fn same_structure(&self, other: &TableStructure) -> bool {
        self.n_rows == other.n_rows
            && self.n_cols == other.n_cols
            && self.cells.len() == other.cells.len()
            && self.cells.iter().zip(&other.cells).all(|(a, b)| a.key() == b.key())
    }

    /// Lattice occupancy: `owner[r][c]` is the index of the covering cell.
    /// Fails if cells overlap, leave gaps or fall outside the lattice.
    pub fn occupancy(&self) -> Result<Vec<Vec<usize>>, String> {
        let mut owner = vec![vec![usize::MAX; self.n_cols]; self.n_rows];
        for (i, c) in self.cells.iter().enumerate() {
            if c.rowspan == 0 || c.colspan == 0 || c.row + c.rowspan > self.n_rows || c.col + c.colspan > self.n_cols {
                return Err(format!("cell {i} outside lattice"));
            }
            for row in owner.iter_mut().skip(c.row).take(c.rowspan) {
                for slot in row.iter_mut().skip(c.col).take(c.colspan) {
                    if *slot != usize::MAX {
                        return Err(format!("cell {i} overlaps cell {slot}"));
                    }
                    *slot = i;
                }
            }
        }
        if owner.iter().flatten().any(|&o| o == usize::MAX) {
            return Err("lattice has uncovered units".into());
        }
        Ok(owner)
    }

    /// Checks the partition and ordering invariants.
    pub fn validate(&self) -> Result<(), String> {
        if self.n_rows == 0 || self.n_cols == 0 {
            return Err("empty lattice".into());
        }
        self.occupancy()?;
        if !self.cells.windows(2).all(|w| (w[0].row, w[0].col) < (w[1].row, w[1].col)) {
            return Err("cells not sorted by (row, col)".into());
        }
        Ok(())
    }
}

fn boundary_support(positions: &[f64], members: &[usize], crossings: &[Point], tol: f64, horizontal: bool) -> usize {
    let canon = members.iter().map(|&i| positions[i]).sum::<f64>() / members.len() as f64;
    let on_line: Vec<Point> =
        crossings.iter().filter(|p| ((if horizontal { p.y } else { p.x }) - canon).abs() <= tol).copied().collect();
    dedup_points(on_line, tol).len()
}

/// Snaps the region's rules into lattice boundaries.
pub fn build_grid(region: &TableRegion, page: &PageGraphics, tol: &Tolerances) -> Result<Grid, LineCellError> {
    if region.kind != RegionKind::Wired {
        return Err(LineCellError::DegenerateRegion("region is not wired".into()));
    }
    let segs = &page.segments;
    let h: Vec<&Segment> = region.h_segments.iter().map(|&i| &segs[i]).collect();
    let v: Vec<&Segment> = region.v_segments.iter().map(|&i| &segs[i]).collect();
    if h.is_empty() || v.is_empty() {
        return Err(LineCellError::DegenerateRegion("region lacks rules in one direction".into()));
    }
    let mut crossings = Vec::new();
    for hs in &h {
        for vs in &v {
            if segments_meet(hs, vs, tol) {
                crossings.push(Point::new(vs.position, hs.position));
            }
        }
    }

    let axis = |rules: &[&Segment], horizontal: bool| -> Vec<f64> {
        let positions: Vec<f64> = rules.iter().map(|s| s.position).collect();
        let clusters = snap_1d(&positions, tol.line_snap_tol).expect("non-empty");
        clusters
            .into_iter()
            .filter(|c| boundary_support(&positions, &c.members, &crossings, tol.line_snap_tol, horizontal) >= 2)
            .map(|c| c.canonical)
            .collect()
    };
    let row_bounds = axis(&h, true);
    let col_bounds = axis(&v, false);
    if row_bounds.len() < 2 || col_bounds.len() < 2 {
        return Err(LineCellError::DegenerateRegion(format!(
            "{} row and {} column boundaries survive",
            row_bounds.len(),
            col_bounds.len()
        )));
    }
    Ok(Grid { row_bounds, col_bounds })
}

fn edge_covered(rules: &[&Segment], boundary: f64, lo: f64, hi: f64, tol: &Tolerances) -> bool {
    let need = tol.edge_cover_ratio * (hi - lo);
    rules.iter().any(|s| (s.position - boundary).abs() <= tol.line_snap_tol && s.overlap(lo, hi) >= need)
}

/// Edge presence for every lattice unit side. Outer border edges are forced
/// present; missing ones are reported in the returned warnings.
pub fn compute_edges(grid: &Grid, segments: &[Segment], tol: &Tolerances) -> (EdgePresence, Vec<String>) {
    let h: Vec<&Segment> = segments.iter().filter(|s| s.is_horizontal()).collect();
    let v: Vec<&Segment> = segments.iter().filter(|s| !s.is_horizontal()).collect();
    let (nr, nc) = (grid.n_rows(), grid.n_cols());
    let rb = &grid.row_bounds;
    let cb = &grid.col_bounds;

    let mut edges = EdgePresence {
        h_edges: (0..=nr).map(|i| (0..nc).map(|j| edge_covered(&h, rb[i], cb[j], cb[j + 1], tol)).collect()).collect(),
        v_edges: (0..nr).map(|i| (0..=nc).map(|j| edge_covered(&v, cb[j], rb[i], rb[i + 1], tol)).collect()).collect(),
    };

    let mut warnings = Vec::new();
    let mut force = |cells: &mut [bool], side: &str| {
        let missing = cells.iter().filter(|e| !**e).count();
        if missing > 0 {
            warnings.push(format!("synthesized {missing} missing {side} border edge(s)"));
            cells.iter_mut().for_each(|e| *e = true);
        }
    };
    force(&mut edges.h_edges[0], "top");
    force(&mut edges.h_edges[nr], "bottom");
    let mut left: Vec<bool> = edges.v_edges.iter().map(|r| r[0]).collect();
    let mut right: Vec<bool> = edges.v_edges.iter().map(|r| r[nc]).collect();
    force(&mut left, "left");
    force(&mut right, "right");
    for row in &mut edges.v_edges {
        row[0] = true;
        row[nc] = true;
    }
    (edges, warnings)
}

fn interior_clear(edges: &EdgePresence, r: usize, c: usize, rows: usize, cols: usize) -> bool {
    let v_clear = (r..r + rows).all(|i| (c + 1..c + cols).all(|j| !edges.v_edges[i][j]));
    let h_clear = (r + 1..r + rows).all(|i| (c..c + cols).all(|j| !edges.h_edges[i][j]));
    v_clear && h_clear
}

/// Groups lattice units into rectangular logical cells.
///
/// Units are visited row-major. From each unassigned unit the cell grows
/// right while the separating rule is absent, then down while every rule
/// below the current bottom row is absent. If the resulting rectangle still
/// contains an interior rule the row span shrinks to the largest value that
/// is clear, and a repair warning is recorded. A warning is also recorded
/// when the final partition separates two units with no rule between them,
/// which happens when the missing rules outline a non-rectangular region.
pub fn merge_spans(grid: &Grid, edges: &EdgePresence) -> TableStructure {
    let (nr, nc) = (edges.n_rows(), edges.n_cols());
    let mut owner = vec![vec![usize::MAX; nc]; nr];
    let mut cells: Vec<LogicalCell> = Vec::new();
    let mut warnings = Vec::new();

    for r in 0..nr {
        for c in 0..nc {
            if owner[r][c] != usize::MAX {
                continue;
            }
            let mut colspan = 1;
            while c + colspan < nc && !edges.v_edges[r][c + colspan] && owner[r][c + colspan] == usize::MAX {
                colspan += 1;
            }
            let mut rowspan = 1;
            while r + rowspan < nr
                && (c..c + colspan).all(|j| !edges.h_edges[r + rowspan][j] && owner[r + rowspan][j] == usize::MAX)
            {
                rowspan += 1;
            }
            if !interior_clear(edges, r, c, rowspan, colspan) {
                while rowspan > 1 && !interior_clear(edges, r, c, rowspan, colspan) {
                    rowspan -= 1;
                }
                warnings.push(format!("non-rectangular merge repaired at ({r},{c})"));
            }
            let id = cells.len();
            for row in owner.iter_mut().skip(r).take(rowspan) {
                for slot in row.iter_mut().skip(c).take(colspan) {
                    *slot = id;
                }
            }
            cells.push(LogicalCell {
                row: r,
                col: c,
                rowspan,
                colspan,
                bbox: Rect::new(
                    grid.col_bounds[c],
                    grid.row_bounds[r],
                    grid.col_bounds[c + colspan],
                    grid.row_bounds[r + rowspan],
                ),
                text: String::new(),
            });
        }
    }

    // Missing rules between units that ended up in different cells.
    let mut flagged = vec![false; cells.len()];
    for r in 0..nr {
        for c in 0..nc {
            let here = owner[r][c];
            let right = (c + 1 < nc && !edges.v_edges[r][c + 1]).then(|| owner[r][c + 1]);
            let below = (r + 1 < nr && !edges.h_edges[r + 1][c]).then(|| owner[r + 1][c]);
            for other in [right, below].into_iter().flatten() {
                if other != here && !flagged[here] {
                    flagged[here] = true;
                    let cell = &cells[here];
                    warnings.push(format!("non-rectangular merge repaired at ({},{})", cell.row, cell.col));
                }
            }
        }
    }

    TableStructure { n_rows: nr, n_cols: nc, cells, region_bbox: grid.bbox(), warnings }
}

/// Full LineCell pass for one wired region.
pub fn extract_table(
    region: &TableRegion,
    page: &PageGraphics,
    tol: &Tolerances,
) -> Result<TableStructure, LineCellError> {
    let grid = build_grid(region, page, tol)?;
    let rules: Vec<Segment> = region.h_segments.iter().chain(&region.v_segments).map(|&i| page.segments[i]).collect();
    let (edges, mut warnings) = compute_edges(&grid, &rules, tol);
    let mut table = merge_spans(&grid, &edges);
    warnings.append(&mut table.warnings);
    table.warnings = warnings;
    Ok(table)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::page::SourceKind;
    use crate::region::detect_regions;

    fn lattice_page(rows: &[f64], cols: &[f64]) -> PageGraphics {
        let mut page = PageGraphics::empty(0, 500.0, 500.0, SourceKind::DigitalPdf);
        for &y in rows {
            page.segments.push(Segment::horizontal(y, cols[0], *cols.last().unwrap()).unwrap());
        }
        for &x in cols {
            page.segments.push(Segment::vertical(x, rows[0], *rows.last().unwrap()).unwrap());
        }
        page
    }

    fn wired(page: &PageGraphics) -> TableRegion {
        let regions = detect_regions(page, &Tolerances::default());
        assert_eq!(regions.len(), 1);
        regions.into_iter().next().unwrap()
    }

    #[test]
    fn full_grid() {
        let page = lattice_page(&[10.0, 40.0, 70.0, 100.0], &[20.0, 60.0, 100.0, 140.0]);
        let region = wired(&page);
        let grid = build_grid(&region, &page, &Tolerances::default()).unwrap();
        assert_eq!(grid.row_bounds, vec![10.0, 40.0, 70.0, 100.0]);
        assert_eq!(grid.col_bounds, vec![20.0, 60.0, 100.0, 140.0]);
        let t = extract_table(&region, &page, &Tolerances::default()).unwrap();
        assert_eq!((t.n_rows, t.n_cols, t.cells.len()), (3, 3, 9));
        assert!(t.cells.iter().all(|c| c.rowspan == 1 && c.colspan == 1));
        assert!(t.warnings.is_empty());
        t.validate().unwrap();
    }

    #[test]
    fn stray_underline_dropped() {
        let mut page = lattice_page(&[10.0, 40.0, 70.0, 100.0], &[20.0, 60.0, 100.0, 140.0]);
        let region = wired(&page);
        page.segments.push(Segment::horizontal(130.0, 20.0, 140.0).unwrap());
        let mut region = region;
        region.h_segments.push(page.segments.len() - 1);
        let grid = build_grid(&region, &page, &Tolerances::default()).unwrap();
        assert_eq!(grid.row_bounds.len(), 4);
    }

    #[test]
    fn single_box() {
        let page = lattice_page(&[10.0, 50.0], &[10.0, 90.0]);
        let region = wired(&page);
        let t = extract_table(&region, &page, &Tolerances::default()).unwrap();
        assert_eq!((t.n_rows, t.n_cols), (1, 1));
        assert_eq!(t.cells[0].bbox, Rect::new(10.0, 10.0, 90.0, 50.0));
    }

    #[test]
    fn missing_interior_rule_spans() {
        // vertical rule at x=60 skips row 0
        let mut page = lattice_page(&[10.0, 40.0, 70.0, 100.0], &[20.0, 100.0, 140.0]);
        page.segments.push(Segment::vertical(60.0, 40.0, 100.0).unwrap());
        let region = wired(&page);
        let grid = build_grid(&region, &page, &Tolerances::default()).unwrap();
        let rules: Vec<Segment> = page.segments.clone();
        let (edges, warnings) = compute_edges(&grid, &rules, &Tolerances::default());
        assert!(warnings.is_empty());
        let absent: Vec<(usize, usize)> =
            (0..3).flat_map(|i| (0..4).map(move |j| (i, j))).filter(|&(i, j)| !edges.v_edges[i][j]).collect();
        assert_eq!(absent, vec![(0, 1)]);
        assert!(edges.h_edges.iter().flatten().all(|&e| e));
        let t = merge_spans(&grid, &edges);
        assert_eq!(t.cells.len(), 8);
        assert_eq!(t.cells[0].key(), (0, 0, 1, 2));
    }

    #[test]
    fn partial_rule_below_cover_ratio() {
        let grid = Grid { row_bounds: vec![0.0, 10.0], col_bounds: vec![0.0, 100.0, 200.0] };
        let segs = vec![
            Segment::horizontal(0.0, 0.0, 200.0).unwrap(),
            Segment::horizontal(10.0, 0.0, 200.0).unwrap(),
            Segment::vertical(0.0, 0.0, 10.0).unwrap(),
            Segment::vertical(200.0, 0.0, 10.0).unwrap(),
            Segment::vertical(100.0, 0.0, 5.0).unwrap(),
        ];
        let (edges, _) = compute_edges(&grid, &segs, &Tolerances::default());
        assert!(!edges.v_edges[0][1]);
    }

    #[test]
    fn open_sides_synthesized() {
        let grid = Grid { row_bounds: vec![0.0, 10.0, 20.0], col_bounds: vec![0.0, 50.0] };
        let segs = vec![Segment::horizontal(10.0, 0.0, 50.0).unwrap()];
        let (edges, warnings) = compute_edges(&grid, &segs, &Tolerances::default());
        assert_eq!(edges, EdgePresence::full(2, 1));
        assert_eq!(warnings.len(), 4);
    }

    #[test]
    fn merge_extremes() {
        let grid = Grid { row_bounds: vec![0.0, 1.0, 2.0, 3.0], col_bounds: vec![0.0, 1.0, 2.0, 3.0] };
        let t = merge_spans(&grid, &EdgePresence::full(3, 3));
        assert_eq!(t.cells.len(), 9);
        let mut open = EdgePresence::full(3, 3);
        for i in 1..3 {
            open.h_edges[i].iter_mut().for_each(|e| *e = false);
        }
        for row in &mut open.v_edges {
            row[1] = false;
            row[2] = false;
        }
        let t = merge_spans(&grid, &open);
        assert_eq!(t.cells.len(), 1);
        assert_eq!(t.cells[0].key(), (0, 0, 3, 3));
        assert!(t.warnings.is_empty());
    }

    #[test]
    fn dangling_rule_inside_merge_is_repaired() {
        let grid = Grid { row_bounds: vec![0.0, 1.0, 2.0], col_bounds: vec![0.0, 1.0, 2.0] };
        let mut e = EdgePresence::full(2, 2);
        e.v_edges[0][1] = false;
        e.h_edges[1][0] = false;
        e.h_edges[1][1] = false;
        // v_edges[1][1] stays present: a T-junction poking into the merged block
        let t = merge_spans(&grid, &e);
        t.validate().unwrap();
        assert_eq!(t.cells[0].key(), (0, 0, 1, 2));
        assert!(t.warnings.iter().any(|w| w == "non-rectangular merge repaired at (0,0)"));
    }

    fn unit_grid(nr: usize, nc: usize) -> Grid {
        Grid {
            row_bounds: (0..=nr).map(|i| i as f64 * 10.0).collect(),
            col_bounds: (0..=nc).map(|j| j as f64 * 10.0).collect(),
        }
    }

    /// Interior edges of an `nr` x `nc` lattice set from the bits of `mask`.
    fn edges_from_mask(nr: usize, nc: usize, mask: u64) -> EdgePresence {
        let mut e = EdgePresence::full(nr, nc);
        let mut bit = 0;
        for i in 1..nr {
            for j in 0..nc {
                e.h_edges[i][j] = mask >> bit & 1 == 1;
                bit += 1;
            }
        }
        for row in e.v_edges.iter_mut() {
            for slot in row.iter_mut().take(nc).skip(1) {
                *slot = mask >> bit & 1 == 1;
                bit += 1;
            }
        }
        e
    }

    /// Connected components of lattice units joined across absent edges.
    fn component_labels(e: &EdgePresence) -> Vec<Vec<usize>> {
        let (nr, nc) = (e.n_rows(), e.n_cols());
        let mut label = vec![vec![usize::MAX; nc]; nr];
        let mut next = 0;
        for r0 in 0..nr {
            for c0 in 0..nc {
                if label[r0][c0] != usize::MAX {
                    continue;
                }
                let mut stack = vec![(r0, c0)];
                label[r0][c0] = next;
                while let Some((r, c)) = stack.pop() {
                    let mut nbrs = Vec::new();
                    if c + 1 < nc && !e.v_edges[r][c + 1] {
                        nbrs.push((r, c + 1));
                    }
                    if c > 0 && !e.v_edges[r][c] {
                        nbrs.push((r, c - 1));
                    }
                    if r + 1 < nr && !e.h_edges[r + 1][c] {
                        nbrs.push((r + 1, c));
                    }
                    if r > 0 && !e.h_edges[r][c] {
                        nbrs.push((r - 1, c));
                    }
                    for (rr, cc) in nbrs {
                        if label[rr][cc] == usize::MAX {
                            label[rr][cc] = next;
                            stack.push((rr, cc));
                        }
                    }
                }
                next += 1;
            }
        }
        label
    }

    fn same_partition(a: &[Vec<usize>], b: &[Vec<usize>]) -> bool {
        let units: Vec<(usize, usize)> = (0..a.len()).flat_map(|r| (0..a[0].len()).map(move |c| (r, c))).collect();
        units.iter().all(|&(r1, c1)| units.iter().all(|&(r2, c2)| (a[r1][c1] == a[r2][c2]) == (b[r1][c1] == b[r2][c2])))
    }

    #[test]
    fn enumerated_2x3_matches_components_or_warns() {
        let grid = unit_grid(2, 3);
        for mask in 0..1u64 << 7 {
            let e = edges_from_mask(2, 3, mask);
            let t = merge_spans(&grid, &e);
            t.validate().unwrap();
            let owner = t.occupancy().unwrap();
            let oracle = component_labels(&e);
            let agrees = same_partition(&owner, &oracle);
            assert!(agrees || !t.warnings.is_empty(), "mask {mask:07b}");
            if t.warnings.is_empty() {
                assert!(agrees);
            }
        }
    }

    #[test]
    fn adding_an_edge_only_refines() {
        let grid = unit_grid(2, 3);
        for mask in 0..1u64 << 7 {
            let a = merge_spans(&grid, &edges_from_mask(2, 3, mask));
            for bit in 0..7 {
                if mask >> bit & 1 == 1 {
                    continue;
                }
                let b = merge_spans(&grid, &edges_from_mask(2, 3, mask | 1 << bit));
                if !a.warnings.is_empty() || !b.warnings.is_empty() {
                    continue;
                }
                let oa = a.occupancy().unwrap();
                for cell in &b.cells {
                    let host = oa[cell.row][cell.col];
                    let h = &a.cells[host];
                    assert!(cell.rowspan <= h.rowspan && cell.colspan <= h.colspan);
                    assert!(
                        cell.row + cell.rowspan <= h.row + h.rowspan && cell.col + cell.colspan <= h.col + h.colspan
                    );
                }
            }
        }
    }

    #[test]
    fn full_presence_is_all_units() {
        for nr in 1..6 {
            for nc in 1..6 {
                let t = merge_spans(&unit_grid(nr, nc), &EdgePresence::full(nr, nc));
                assert_eq!(t.cells.len(), nr * nc);
            }
        }
    }

    proptest::proptest! {
        #[test]
        fn random_edges_partition(nr in 1usize..=6, nc in 1usize..=6, mask in proptest::prelude::any::<u64>()) {
            let e = edges_from_mask(nr, nc, mask);
            let t = merge_spans(&unit_grid(nr, nc), &e);
            proptest::prop_assert!(t.validate().is_ok());
            let mut count = vec![vec![0; nc]; nr];
            for c in &t.cells {
                for row in count.iter_mut().skip(c.row).take(c.rowspan) {
                    for n in row.iter_mut().skip(c.col).take(c.colspan) {
                        *n += 1;
                    }
                }
            }
            proptest::prop_assert!(count.iter().flatten().all(|&n| n == 1));
        }
    }
}
