//! Small-angle skew estimation and correction, plus a coarse 90° orientation
//! heuristic.

use thiserror::Error;

use crate::geometry::{Rect, Segment};
use crate::lines::{open, BinaryImage, StructuringElement};
use crate::page::{PageGraphics, RasterPage, TextSpan};

pub const MAX_SKEW_DEG: f64 = 45.0;

#[derive(Debug, Error, PartialEq)]
pub enum DeskewError {
    #[error("rotation of {0} degrees is outside the small-angle range")]
    AngleOutOfRange(f64),
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SkewEstimate {
    pub angle_deg: f64,
    pub confidence: f64,
}

/// Ink pixel coordinates as (x, y).
fn ink_coords(img: &BinaryImage) -> Vec<(f64, f64)> {
    let mut out = Vec::new();
    for y in 0..img.height {
        for x in 0..img.width {
            if img.bits[y * img.width + x] != 0 {
                out.push((x as f64, y as f64));
            }
        }
    }
    out
}

/// Variance of the row profile after shearing `y' = y - x tan(angle)`.
/// The bin range covers every shear up to 45°, so variances are comparable
/// across angles.
fn profile_variance(ink: &[(f64, f64)], width: usize, height: usize, angle_deg: f64, bins: &mut Vec<u32>) -> f64 {
    let t = angle_deg.to_radians().tan();
    let n_bins = height + 2 * width + 2;
    bins.clear();
    bins.resize(n_bins, 0);
    let offset = width as f64 + 0.5;
    for &(x, y) in ink {
        let b = (y - x * t + offset).floor();
        bins[b as usize] += 1;
    }
    let n = n_bins as f64;
    let total = ink.len() as f64;
    let sumsq: f64 = bins.iter().map(|&c| (c as f64) * (c as f64)).sum();
    sumsq / n - (total / n) * (total / n)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SkewParams {
    /// Candidate angles span `[-range_deg, range_deg]`.
    pub range_deg: f64,
    pub coarse_step: f64,
    /// Refinement step used within one coarse step of the coarse winner.
    pub fine_step: f64,
    /// Mass ratio at which one direction dominates in [`coarse_orientation`].
    pub orientation_ratio: f64,
}

impl Default for SkewParams {
    fn default() -> Self {
        Self { range_deg: MAX_SKEW_DEG, coarse_step: 1.0, fine_step: 0.1, orientation_ratio: 3.0 }
    }
}

/// Projection-profile skew search with the default 1° / 0.1° schedule over
/// ±45°. A positive angle means content slopes down to the right, the
/// direction [`rotate_raster`] turns it for a positive argument.
pub fn estimate_skew(img: &BinaryImage) -> SkewEstimate {
    estimate_skew_with(img, &SkewParams::default())
}

pub fn estimate_skew_with(img: &BinaryImage, p: &SkewParams) -> SkewEstimate {
    let ink = ink_coords(img);
    if ink.is_empty() {
        return SkewEstimate { angle_deg: 0.0, confidence: 0.0 };
    }
    let range = p.range_deg.clamp(0.0, MAX_SKEW_DEG);
    let mut bins = Vec::new();
    let mut eval = |a: f64| profile_variance(&ink, img.width, img.height, a, &mut bins);
    let n_coarse = (range / p.coarse_step).floor() as i64;
    let mut coarse: Vec<(f64, f64)> = (-n_coarse..=n_coarse)
        .map(|i| {
            let a = i as f64 * p.coarse_step;
            (a, eval(a))
        })
        .collect();
    let mut best = coarse[0];
    for &c in &coarse {
        if c.1 > best.1 || (c.1 == best.1 && c.0.abs() < best.0.abs()) {
            best = c;
        }
    }
    let center = best.0;
    let n_fine = (p.coarse_step / p.fine_step).round() as i64;
    for j in -n_fine..=n_fine {
        let a = center + j as f64 * p.fine_step;
        if j == 0 || a.abs() > range + 1e-9 {
            continue;
        }
        let a = (a * 1e6).round() / 1e6;
        let v = eval(a);
        if v > best.1 {
            best = (a, v);
        }
    }
    coarse.sort_by(|a, b| a.1.total_cmp(&b.1));
    let median = coarse[coarse.len() / 2].1;
    let confidence = if best.1 > 0.0 { ((best.1 - median) / best.1).clamp(0.0, 1.0) } else { 0.0 };
    SkewEstimate { angle_deg: best.0, confidence }
}

/// Canvas size after rotation, padded so the growth on each side is a whole
/// number of pixels.
fn rotated_extent(w: usize, h: usize, angle_deg: f64) -> (usize, usize) {
    let (s, c) = angle_deg.to_radians().sin_cos();
    let (s, c) = (s.abs(), c.abs());
    let fit = |v: f64, base: usize| {
        let mut n = (v - 1e-9).ceil().max(base as f64) as usize;
        if (n - base) % 2 == 1 {
            n += 1;
        }
        n
    };
    (fit(w as f64 * c + h as f64 * s, w), fit(w as f64 * s + h as f64 * c, h))
}

/// Rotates about the image center with bilinear sampling onto an enlarged
/// white canvas. Returns the image and the per-side growth `(dx, dy)` in
/// pixels: an unrotated source pixel `(x, y)` lands at `(x + dx, y + dy)`.
pub fn rotate_raster_with_offset(
    img: &RasterPage,
    angle_deg: f64,
) -> Result<(RasterPage, (usize, usize)), DeskewError> {
    if !angle_deg.is_finite() || angle_deg.abs() > MAX_SKEW_DEG {
        return Err(DeskewError::AngleOutOfRange(angle_deg));
    }
    if angle_deg == 0.0 {
        return Ok((img.clone(), (0, 0)));
    }
    let (w, h) = (img.width_px, img.height_px);
    let (nw, nh) = rotated_extent(w, h, angle_deg);
    let (s, c) = angle_deg.to_radians().sin_cos();
    let (ocx, ocy) = (nw as f64 / 2.0, nh as f64 / 2.0);
    let (icx, icy) = (w as f64 / 2.0, h as f64 / 2.0);
    let sample = |x: i64, y: i64| -> f64 {
        if x < 0 || y < 0 || x >= w as i64 || y >= h as i64 {
            255.0
        } else {
            img.pixels[y as usize * w + x as usize] as f64
        }
    };
    let mut pixels = vec![255u8; nw * nh];
    for oy in 0..nh {
        let v = oy as f64 + 0.5 - ocy;
        for ox in 0..nw {
            let u = ox as f64 + 0.5 - ocx;
            let sx = c * u + s * v + icx - 0.5;
            let sy = -s * u + c * v + icy - 0.5;
            if sx <= -1.0 || sy <= -1.0 || sx >= w as f64 || sy >= h as f64 {
                continue;
            }
            let (x0, y0) = (sx.floor(), sy.floor());
            let (fx, fy) = (sx - x0, sy - y0);
            let (x0, y0) = (x0 as i64, y0 as i64);
            let top = sample(x0, y0) * (1.0 - fx) + sample(x0 + 1, y0) * fx;
            let bottom = sample(x0, y0 + 1) * (1.0 - fx) + sample(x0 + 1, y0 + 1) * fx;
            let value = top * (1.0 - fy) + bottom * fy;
            pixels[oy * nw + ox] = value.round().clamp(0.0, 255.0) as u8;
        }
    }
    let dx = (nw - w) / 2;
    let dy = (nh - h) / 2;
    Ok((RasterPage::new(nw, nh, img.dpi, pixels), (dx, dy)))
}

pub fn rotate_raster(img: &RasterPage, angle_deg: f64) -> Result<RasterPage, DeskewError> {
    rotate_raster_with_offset(img, angle_deg).map(|(r, _)| r)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PageOrientation {
    Deg0,
    Deg90,
    Deg180,
    Deg270,
    Unknown,
}

fn classify(h_mass: f64, v_mass: f64, ratio: f64) -> (PageOrientation, Option<String>) {
    if v_mass > 0.0 && v_mass >= ratio * h_mass {
        (PageOrientation::Deg90, Some("page appears rotated by 90 degrees; direction assumed clockwise".into()))
    } else if h_mass > 0.0 && h_mass >= ratio * v_mass {
        (PageOrientation::Deg0, None)
    } else {
        (PageOrientation::Unknown, None)
    }
}

/// Compares horizontal and vertical rule and text mass. Never returns
/// `Deg180` or `Deg270`: a quarter turn is always reported as `Deg90`.
/// Masses within `ratio` of each other give `Unknown`.
pub fn coarse_orientation(page: &PageGraphics, ratio: f64) -> (PageOrientation, Option<String>) {
    let mut h = 0.0;
    let mut v = 0.0;
    for s in &page.segments {
        if s.is_horizontal() {
            h += s.len();
        } else {
            v += s.len();
        }
    }
    for span in page.text_spans.iter().filter(|s| s.char_count() >= 2) {
        if span.bbox.width() >= span.bbox.height() {
            h += span.bbox.width();
        } else {
            v += span.bbox.height();
        }
    }
    classify(h, v, ratio)
}

/// Raster variant: ink surviving a horizontal versus a vertical opening.
pub fn coarse_orientation_image(img: &BinaryImage, k: usize, ratio: f64) -> (PageOrientation, Option<String>) {
    let k = k.max(1) | 1;
    let h = open(img, &StructuringElement::new(k, 1).expect("odd")).count_ink() as f64;
    let v = open(img, &StructuringElement::new(1, k).expect("odd")).count_ink() as f64;
    classify(h, v, ratio)
}

/// Undoes a clockwise quarter turn: `(x, y) -> (y, width - x)`.
pub fn rotate_page_ccw(page: &PageGraphics) -> PageGraphics {
    let w = page.width;
    let rect = |r: &Rect| Rect::new(r.y0, w - r.x1, r.y1, w - r.x0);
    let mut out = PageGraphics::empty(page.page_index, page.height, page.width, page.source_kind);
    out.segments = page
        .segments
        .iter()
        .filter_map(|s| {
            if s.is_horizontal() {
                Segment::vertical(s.position, w - s.hi, w - s.lo)
            } else {
                Segment::horizontal(w - s.position, s.lo, s.hi)
            }
        })
        .collect();
    out.rects = page.rects.iter().map(rect).collect();
    out.text_spans = page.text_spans.iter().map(|s| TextSpan::new(rect(&s.bbox), s.text.clone())).collect();
    out
}

/// Raster counterpart of [`rotate_page_ccw`].
pub fn rotate_raster_ccw(img: &RasterPage) -> RasterPage {
    let (w, h) = (img.width_px, img.height_px);
    let mut pixels = vec![255u8; w * h];
    for oy in 0..w {
        for ox in 0..h {
            pixels[oy * h + ox] = img.pixels[ox * w + (w - 1 - oy)];
        }
    }
    RasterPage::new(h, w, img.dpi, pixels)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lines::binarize;
    use crate::page::SourceKind;

    fn grid_raster(w: usize, h: usize, step: usize) -> RasterPage {
        let mut r = RasterPage::blank(w, h, 150.0);
        for y in (40..h - 40).step_by(step) {
            for x in 40..w - 40 {
                r.pixels[y * w + x] = 0;
            }
        }
        for x in (40..w - 40).step_by(step) {
            for y in 40..h - 40 {
                r.pixels[y * w + x] = 0;
            }
        }
        r
    }

    fn bin(r: &RasterPage) -> BinaryImage {
        binarize(r, 31, 10).unwrap()
    }

    #[test]
    fn blank_and_upright() {
        let blank = BinaryImage::new(50, 50);
        assert_eq!(estimate_skew(&blank), SkewEstimate { angle_deg: 0.0, confidence: 0.0 });
        let est = estimate_skew(&bin(&grid_raster(400, 300, 40)));
        assert!(est.angle_deg.abs() <= 0.2, "{est:?}");
        assert!(est.confidence > 0.0);
    }

    #[test]
    fn recovers_rotation() {
        let page = grid_raster(400, 300, 40);
        for angle in [-7.0, -3.0, 1.5, 3.0, 10.0] {
            let rotated = rotate_raster(&page, angle).unwrap();
            let est = estimate_skew(&bin(&rotated));
            assert!((est.angle_deg - angle).abs() <= 0.5, "{angle} -> {est:?}");
        }
    }

    #[test]
    fn rotation_bounds_and_identity() {
        let page = grid_raster(100, 80, 20);
        assert_eq!(rotate_raster(&page, 0.0).unwrap(), page);
        assert!(rotate_raster(&page, 90.0).is_err());
        let (r, (dx, dy)) = rotate_raster_with_offset(&page, 10.0).unwrap();
        assert_eq!(r.width_px, page.width_px + 2 * dx);
        assert_eq!(r.height_px, page.height_px + 2 * dy);
        assert!(r.width_px as f64 >= 100.0 * 10f64.to_radians().cos() + 80.0 * 10f64.to_radians().sin());
    }

    #[test]
    fn round_trip_on_smooth_page() {
        let (w, h) = (120, 90);
        let pixels = (0..w * h)
            .map(|i| {
                let (x, y) = ((i % w) as f64, (i / w) as f64);
                (128.0 + 100.0 * (x / 17.0).sin() * (y / 13.0).cos()) as u8
            })
            .collect();
        let page = RasterPage::new(w, h, 150.0, pixels);
        for angle in [3.0, -5.0, 10.0] {
            let (fwd, _) = rotate_raster_with_offset(&page, angle).unwrap();
            let (back, (dx, dy)) = rotate_raster_with_offset(&fwd, -angle).unwrap();
            let (ox, oy) = ((back.width_px - w) / 2, (back.height_px - h) / 2);
            assert!(dx > 0 && dy > 0);
            let mut close = 0;
            let mut total = 0;
            for y in 10..h - 10 {
                for x in 10..w - 10 {
                    total += 1;
                    let d = back.get(x + ox, y + oy) as i32 - page.get(x, y) as i32;
                    close += (d.abs() <= 8) as usize;
                }
            }
            assert!(close as f64 >= 0.99 * total as f64, "{angle}: {close}/{total}");
        }
    }

    #[test]
    fn orientation_heuristic() {
        let mut page = PageGraphics::empty(0, 200.0, 300.0, SourceKind::DigitalPdf);
        for i in 0..5 {
            let y = 20.0 + 12.0 * i as f64;
            page.text_spans.push(TextSpan::new(Rect::new(10.0, y, 150.0, y + 10.0), "some words here"));
        }
        assert_eq!(coarse_orientation(&page, 3.0).0, PageOrientation::Deg0);

        let mut transposed = PageGraphics::empty(0, 300.0, 200.0, SourceKind::DigitalPdf);
        for s in &page.text_spans {
            let b = s.bbox;
            transposed.text_spans.push(TextSpan::new(Rect::new(b.y0, b.x0, b.y1, b.x1), s.text.clone()));
        }
        let (o, warning) = coarse_orientation(&transposed, 3.0);
        assert_eq!(o, PageOrientation::Deg90);
        assert!(warning.is_some());
        let restored = rotate_page_ccw(&transposed);
        assert_eq!(coarse_orientation(&restored, 3.0).0, PageOrientation::Deg0);

        let mut grid = PageGraphics::empty(0, 200.0, 200.0, SourceKind::DigitalPdf);
        for i in 0..4 {
            let p = 20.0 + 40.0 * i as f64;
            grid.segments.push(Segment::horizontal(p, 20.0, 140.0).unwrap());
            grid.segments.push(Segment::vertical(p, 20.0, 140.0).unwrap());
        }
        assert_eq!(coarse_orientation(&grid, 3.0).0, PageOrientation::Unknown);
        let img = bin(&grid_raster(200, 200, 40));
        assert_eq!(coarse_orientation_image(&img, 31, 3.0).0, PageOrientation::Unknown);
    }

    #[test]
    fn quarter_turns_compose() {
        let mut page = PageGraphics::empty(0, 100.0, 60.0, SourceKind::DigitalPdf);
        page.segments.push(Segment::horizontal(10.0, 5.0, 90.0).unwrap());
        page.rects.push(Rect::new(1.0, 2.0, 3.0, 4.0));
        let mut p = page.clone();
        for _ in 0..4 {
            p = rotate_page_ccw(&p);
        }
        assert_eq!(p, page);
        let r = grid_raster(90, 70, 10);
        let mut q = r.clone();
        for _ in 0..4 {
            q = rotate_raster_ccw(&q);
        }
        assert_eq!(q, r);
    }
}
