//! Page-level composition: primitives in, [`PageOutput`] out.

use thiserror::Error;

use crate::config::Config;
use crate::deskew::{
    coarse_orientation, coarse_orientation_image, estimate_skew_with, rotate_page_ccw, rotate_raster_ccw,
    rotate_raster_with_offset, DeskewError, PageOrientation, SkewEstimate,
};
use crate::emit::{page_to_cells, ImageRef, PageOutput};
use crate::geometry::{Rect, Segment};
use crate::linecell::{extract_table, TableStructure};
use crate::lines::{binarize, extract_rule_segments_with_kernel, rule_kernel_len, LinesError};
use crate::page::{PageGraphics, RasterPage, SourceKind, TextSpan};
use crate::region::{detect_regions, RegionKind};
use crate::text::{assign_spans, merge_paragraphs};

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error(transparent)]
    Lines(#[from] LinesError),
    #[error(transparent)]
    Deskew(#[from] DeskewError),
}

/// Regions, tables, cell text and paragraphs for one page.
pub fn process_graphics(page: &PageGraphics, images: Vec<(Rect, ImageRef)>, cfg: &Config) -> PageOutput {
    let mut warnings = Vec::new();
    let rotated;
    let mut page = page;
    if cfg.auto_orientation {
        let (o, w) = coarse_orientation(page, cfg.skew.orientation_ratio);
        if o == PageOrientation::Deg90 {
            warnings.extend(w);
            rotated = rotate_page_ccw(page);
            page = &rotated;
        }
    }
    let tol = &cfg.tol;
    let mut tables: Vec<TableStructure> = Vec::new();
    let mut unparsed = Vec::new();
    for region in detect_regions(page, tol) {
        match region.kind {
            RegionKind::Wired => match extract_table(&region, page, tol) {
                Ok(t) => tables.push(t),
                Err(e) => {
                    warnings
                        .push(format!("table region at ({:.1},{:.1}) not parsed: {e}", region.bbox.x0, region.bbox.y0));
                    unparsed.push(region.bbox);
                }
            },
            RegionKind::Wireless => unparsed.push(region.bbox),
        }
    }

    let mut paragraphs = Vec::new();
    if page.source_kind == SourceKind::DigitalPdf {
        let mut per_table: Vec<Vec<TextSpan>> = vec![Vec::new(); tables.len()];
        let mut free = Vec::new();
        for span in &page.text_spans {
            let c = span.bbox.center();
            match tables.iter().position(|t| t.region_bbox.expand(tol.line_snap_tol).contains(c)) {
                Some(i) => per_table[i].push(span.clone()),
                None => free.push(span.clone()),
            }
        }
        tables = tables.iter().zip(&per_table).map(|(t, spans)| assign_spans(t, spans, tol, &cfg.text)).collect();
        paragraphs = merge_paragraphs(&free, &cfg.text);
    }

    let (cells, mut cell_warnings) = page_to_cells(tables, paragraphs, images);
    warnings.append(&mut cell_warnings);
    PageOutput { page_index: page.page_index, cells, unparsed_regions: unparsed, warnings }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RasterGraphics {
    pub graphics: PageGraphics,
    pub skew: Option<SkewEstimate>,
    pub warnings: Vec<String>,
}

fn shift(seg: &Segment, dx: f64, dy: f64) -> Option<Segment> {
    let (dp, dl) = if seg.is_horizontal() { (dy, dx) } else { (dx, dy) };
    Segment::new(seg.orientation, seg.position - dp, seg.lo - dl, seg.hi - dl)
}

/// Binarizes, optionally straightens, and extracts rules from a raster. The
/// kernel length is fixed from the input width so the enlarged canvas of a
/// rotation does not change it.
pub fn raster_to_graphics(
    raster: &RasterPage,
    page_index: usize,
    cfg: &Config,
) -> Result<RasterGraphics, PipelineError> {
    let mut warnings = Vec::new();
    let turned;
    let mut raster = raster;
    let mut bin = binarize(raster, cfg.binarize_window, cfg.binarize_offset)?;
    let k = rule_kernel_len(raster.width_px, cfg.min_len_frac);
    if cfg.auto_orientation {
        let (o, w) = coarse_orientation_image(&bin, k, cfg.skew.orientation_ratio);
        if o == PageOrientation::Deg90 {
            warnings.extend(w);
            turned = rotate_raster_ccw(raster);
            raster = &turned;
            bin = binarize(raster, cfg.binarize_window, cfg.binarize_offset)?;
        }
    }
    let scale = 72.0 / raster.dpi;
    let mut skew = None;
    let segments = if cfg.deskew {
        let est = estimate_skew_with(&bin, &cfg.skew);
        skew = Some(est);
        if est.angle_deg.abs() >= cfg.deskew_min_angle && est.angle_deg != 0.0 {
            let (straight, (dx, dy)) = rotate_raster_with_offset(raster, -est.angle_deg)?;
            warnings.push(format!("deskewed by {:.1} degrees", est.angle_deg));
            let bin = binarize(&straight, cfg.binarize_window, cfg.binarize_offset)?;
            extract_rule_segments_with_kernel(&bin, raster.dpi, k, &cfg.tol)
                .iter()
                .filter_map(|s| shift(s, dx as f64 * scale, dy as f64 * scale))
                .collect()
        } else {
            extract_rule_segments_with_kernel(&bin, raster.dpi, k, &cfg.tol)
        }
    } else {
        extract_rule_segments_with_kernel(&bin, raster.dpi, k, &cfg.tol)
    };
    let mut graphics = PageGraphics::empty(
        page_index,
        raster.width_px as f64 * scale,
        raster.height_px as f64 * scale,
        SourceKind::Image,
    );
    graphics.segments = segments;
    graphics.clip_to_page();
    Ok(RasterGraphics { graphics, skew, warnings })
}

/// Raster path end to end; raster warnings come first.
pub fn process_raster(raster: &RasterPage, page_index: usize, cfg: &Config) -> Result<PageOutput, PipelineError> {
    let rg = raster_to_graphics(raster, page_index, cfg)?;
    let mut out = process_graphics(&rg.graphics, Vec::new(), cfg);
    let mut warnings = rg.warnings;
    warnings.append(&mut out.warnings);
    out.warnings = warnings;
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::emit::CellKind;
    use crate::synth::{gen_table, SynthParams};

    fn only_table(out: &PageOutput) -> &TableStructure {
        let tables: Vec<_> = out.tables().collect();
        assert_eq!(tables.len(), 1);
        tables[0]
    }

    #[test]
    fn vector_item_with_text() {
        let item = gen_table(&SynthParams::with_seed(5)).unwrap();
        let out = process_graphics(&item.page, vec![], &Config::default());
        let t = only_table(&out);
        assert!(t.same_structure(&item.structure));
        let texts: Vec<_> = t.cells.iter().map(|c| c.text.as_str()).collect();
        let want: Vec<_> = item.structure.cells.iter().map(|c| c.text.as_str()).collect();
        assert_eq!(texts, want);
        assert!(out.warnings.is_empty(), "{:?}", out.warnings);
    }

    #[test]
    fn raster_items() {
        let cfg = Config::default();
        for seed in 0..10 {
            let item = gen_table(&SynthParams::with_seed(seed)).unwrap();
            let out = process_raster(&item.raster, 0, &cfg).unwrap();
            assert!(only_table(&out).same_structure(&item.structure), "seed {seed}");
        }
    }

    #[test]
    fn skewed_raster_is_straightened() {
        let cfg = Config::default();
        for (seed, angle) in [(1, 3.0), (2, -5.0), (3, 1.0)] {
            let item = gen_table(&SynthParams { skew_deg: angle, ..SynthParams::with_seed(seed) }).unwrap();
            let rg = raster_to_graphics(&item.raster, 0, &cfg).unwrap();
            let est = rg.skew.unwrap().angle_deg;
            assert!((est - angle).abs() <= 0.5, "{angle} -> {est}");
            let out = process_graphics(&rg.graphics, vec![], &cfg);
            assert!(only_table(&out).same_structure(&item.structure), "seed {seed}");
        }
    }

    #[test]
    fn free_text_becomes_paragraphs() {
        let mut item = gen_table(&SynthParams::with_seed(8)).unwrap();
        let bbox = item.structure.region_bbox;
        let y = (bbox.y1 + 4.0).min(item.page.height - 10.0);
        item.page.text_spans.push(TextSpan::new(Rect::new(30.0, y, 90.0, y + 6.0), "caption"));
        let out = process_graphics(&item.page, vec![], &Config::default());
        assert!(out.cells.iter().any(|c| c.kind() == CellKind::Text));
    }
}
