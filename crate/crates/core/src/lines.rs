//! Rule extraction from rasters: adaptive binarization, rectangular
//! erosion/dilation, and connected-component analysis of the opened masks.

use thiserror::Error;

use crate::geometry::{merge_collinear, Orientation, Point, Segment, Tolerances};
use crate::page::RasterPage;

#[derive(Debug, Error, PartialEq)]
pub enum LinesError {
    #[error("binarization window must be odd and positive, got {0}")]
    EvenWindow(usize),
    #[error("structuring element dimensions must be odd and positive, got {0}x{1}")]
    BadElement(usize, usize),
}

/// Row-major bitmap, 1 = ink.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BinaryImage {
    pub width: usize,
    pub height: usize,
    pub bits: Vec<u8>,
}

impl BinaryImage {
    pub fn new(width: usize, height: usize) -> Self {
        Self { width, height, bits: vec![0; width * height] }
    }

    pub fn from_bits(width: usize, height: usize, bits: Vec<u8>) -> Self {
        assert_eq!(bits.len(), width * height, "bitmap size mismatch");
        Self { width, height, bits }
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> bool {
        self.bits[y * self.width + x] != 0
    }

    #[inline]
    pub fn set(&mut self, x: usize, y: usize, v: bool) {
        self.bits[y * self.width + x] = v as u8;
    }

    pub fn count_ink(&self) -> usize {
        self.bits.iter().filter(|&&b| b != 0).count()
    }

    fn transpose(&self) -> BinaryImage {
        let mut out = BinaryImage::new(self.height, self.width);
        for y in 0..self.height {
            for x in 0..self.width {
                out.bits[x * self.height + y] = self.bits[y * self.width + x];
            }
        }
        out
    }
}

/// Rectangular all-ones structuring element, centered.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct StructuringElement {
    width: usize,
    height: usize,
}

impl StructuringElement {
    pub fn new(width: usize, height: usize) -> Result<Self, LinesError> {
        if width == 0 || height == 0 || width.is_multiple_of(2) || height.is_multiple_of(2) {
            return Err(LinesError::BadElement(width, height));
        }
        Ok(Self { width, height })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }
}

/// Adaptive mean threshold. A pixel is ink iff its value is below the mean of
/// its `window`×`window` neighborhood (borders replicated) minus `offset`.
/// Uses an integral image over the padded raster, so the cost is linear in
/// the pixel count.
pub fn binarize(img: &RasterPage, window: usize, offset: i32) -> Result<BinaryImage, LinesError> {
    if window == 0 || window.is_multiple_of(2) {
        return Err(LinesError::EvenWindow(window));
    }
    let (w, h) = (img.width_px, img.height_px);
    let mut out = BinaryImage::new(w, h);
    if w == 0 || h == 0 {
        return Ok(out);
    }
    let r = window / 2;
    let pw = w + 2 * r;
    let ph = h + 2 * r;
    // integral[(y)*(pw+1) + x] = sum of padded pixels in [0,x) x [0,y)
    let stride = pw + 1;
    let mut integral = vec![0u64; stride * (ph + 1)];
    for py in 0..ph {
        let sy = py.saturating_sub(r).min(h - 1);
        let row = &img.pixels[sy * w..(sy + 1) * w];
        let mut run = 0u64;
        for px in 0..pw {
            let sx = px.saturating_sub(r).min(w - 1);
            run += row[sx] as u64;
            integral[(py + 1) * stride + px + 1] = integral[py * stride + px + 1] + run;
        }
    }
    let n = (window * window) as i64;
    for y in 0..h {
        for x in 0..w {
            // padded window for pixel (x, y) covers [x, x+window) x [y, y+window)
            let (x0, y0, x1, y1) = (x, y, x + window, y + window);
            let sum = integral[y1 * stride + x1] + integral[y0 * stride + x0]
                - integral[y0 * stride + x1]
                - integral[y1 * stride + x0];
            let v = img.pixels[y * w + x] as i64;
            if (v + offset as i64) * n < sum as i64 {
                out.bits[y * w + x] = 1;
            }
        }
    }
    Ok(out)
}

/// One-dimensional pass along rows. For erosion a pixel survives iff every
/// pixel within `radius` is set and inside the image; for dilation it is set
/// iff any in-image pixel within `radius` is set.
fn row_pass(img: &BinaryImage, radius: usize, erode: bool) -> BinaryImage {
    if radius == 0 {
        return img.clone();
    }
    let w = img.width;
    let mut out = BinaryImage::new(w, img.height);
    let mut prefix = vec![0u32; w + 1];
    for y in 0..img.height {
        let row = &img.bits[y * w..(y + 1) * w];
        for x in 0..w {
            prefix[x + 1] = prefix[x] + row[x] as u32;
        }
        let dst = &mut out.bits[y * w..(y + 1) * w];
        for x in 0..w {
            if erode {
                if x < radius || x + radius >= w {
                    continue;
                }
                let count = prefix[x + radius + 1] - prefix[x - radius];
                dst[x] = (count as usize == 2 * radius + 1) as u8;
            } else {
                let lo = x.saturating_sub(radius);
                let hi = (x + radius + 1).min(w);
                dst[x] = (prefix[hi] > prefix[lo]) as u8;
            }
        }
    }
    out
}

fn separable(img: &BinaryImage, se: &StructuringElement, erode: bool) -> BinaryImage {
    let horizontal = row_pass(img, se.width / 2, erode);
    if se.height == 1 {
        return horizontal;
    }
    row_pass(&horizontal.transpose(), se.height / 2, erode).transpose()
}

/// Binary erosion; pixels outside the image count as background, so the
/// border erodes away.
pub fn erode(img: &BinaryImage, se: &StructuringElement) -> BinaryImage {
    separable(img, se, true)
}

/// Binary dilation; pixels outside the image count as background.
pub fn dilate(img: &BinaryImage, se: &StructuringElement) -> BinaryImage {
    separable(img, se, false)
}

/// Erosion followed by dilation with the same element.
pub fn open(img: &BinaryImage, se: &StructuringElement) -> BinaryImage {
    dilate(&erode(img, se), se)
}

/// Summary of one 8-connected component.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Component {
    pub min_x: usize,
    pub min_y: usize,
    pub max_x: usize,
    pub max_y: usize,
    pub pixels: usize,
    sum_x: u64,
    sum_y: u64,
}

impl Component {
    pub fn centroid(&self) -> (f64, f64) {
        (self.sum_x as f64 / self.pixels as f64, self.sum_y as f64 / self.pixels as f64)
    }
}

/// 8-connected components in raster-scan order of their first pixel.
pub fn connected_components(img: &BinaryImage) -> Vec<Component> {
    let (w, h) = (img.width, img.height);
    let mut seen = vec![false; w * h];
    let mut out = Vec::new();
    let mut stack = Vec::new();
    for start in 0..w * h {
        if img.bits[start] == 0 || seen[start] {
            continue;
        }
        seen[start] = true;
        stack.push(start);
        let mut c =
            Component { min_x: usize::MAX, min_y: usize::MAX, max_x: 0, max_y: 0, pixels: 0, sum_x: 0, sum_y: 0 };
        while let Some(i) = stack.pop() {
            let (x, y) = (i % w, i / w);
            c.min_x = c.min_x.min(x);
            c.max_x = c.max_x.max(x);
            c.min_y = c.min_y.min(y);
            c.max_y = c.max_y.max(y);
            c.pixels += 1;
            c.sum_x += x as u64;
            c.sum_y += y as u64;
            for ny in y.saturating_sub(1)..=(y + 1).min(h - 1) {
                for nx in x.saturating_sub(1)..=(x + 1).min(w - 1) {
                    let j = ny * w + nx;
                    if img.bits[j] != 0 && !seen[j] {
                        seen[j] = true;
                        stack.push(j);
                    }
                }
            }
        }
        out.push(c);
    }
    out
}

/// Kernel length for rule extraction: `min_len_frac` of the reference width,
/// at least 5 px, rounded up to the next odd size so the element is centered.
pub fn rule_kernel_len(width_px: usize, min_len_frac: f64) -> usize {
    let k = ((min_len_frac * width_px as f64).round() as usize).max(5);
    k | 1
}

/// Extracts horizontal and vertical rules as page-unit segments, with the
/// kernel derived from the image width.
pub fn extract_rule_segments(img: &BinaryImage, dpi: f64, min_len_frac: f64, tol: &Tolerances) -> Vec<Segment> {
    extract_rule_segments_with_kernel(img, dpi, rule_kernel_len(img.width, min_len_frac), tol)
}

/// Same as [`extract_rule_segments`] with an explicit kernel length `k` (odd).
pub fn extract_rule_segments_with_kernel(img: &BinaryImage, dpi: f64, k: usize, tol: &Tolerances) -> Vec<Segment> {
    let k = k.max(1) | 1;
    let scale = 72.0 / dpi;
    let h_se = StructuringElement::new(k, 1).expect("odd kernel");
    let v_se = StructuringElement::new(1, k).expect("odd kernel");

    let mut horizontal = Vec::new();
    for c in connected_components(&open(img, &h_se)) {
        if c.max_x - c.min_x + 1 < k {
            continue;
        }
        let (_, cy) = c.centroid();
        if let Some(s) = Segment::horizontal((cy + 0.5) * scale, c.min_x as f64 * scale, (c.max_x + 1) as f64 * scale) {
            horizontal.push(s);
        }
    }
    let mut vertical = Vec::new();
    for c in connected_components(&open(img, &v_se)) {
        if c.max_y - c.min_y + 1 < k {
            continue;
        }
        let (cx, _) = c.centroid();
        if let Some(s) = Segment::vertical((cx + 0.5) * scale, c.min_y as f64 * scale, (c.max_y + 1) as f64 * scale) {
            vertical.push(s);
        }
    }
    let mut out = merge_collinear(&horizontal, tol).expect("single orientation");
    out.extend(merge_collinear(&vertical, tol).expect("single orientation"));
    out
}

/// True when a horizontal and a vertical rule meet, allowing `join_tol` of
/// slack at either end.
pub fn segments_meet(h: &Segment, v: &Segment, tol: &Tolerances) -> bool {
    debug_assert_eq!(h.orientation, Orientation::Horizontal);
    debug_assert_eq!(v.orientation, Orientation::Vertical);
    h.position >= v.lo - tol.join_tol
        && h.position <= v.hi + tol.join_tol
        && v.position >= h.lo - tol.join_tol
        && v.position <= h.hi + tol.join_tol
}

/// Intersection points of every meeting (horizontal, vertical) pair,
/// deduplicated within `line_snap_tol` and sorted by (y, x).
pub fn find_intersections(h: &[Segment], v: &[Segment], tol: &Tolerances) -> Vec<Point> {
    let mut points: Vec<Point> = Vec::new();
    for hs in h {
        for vs in v {
            if segments_meet(hs, vs, tol) {
                points.push(Point::new(vs.position, hs.position));
            }
        }
    }
    dedup_points(points, tol.line_snap_tol)
}

pub(crate) fn dedup_points(mut points: Vec<Point>, tol: f64) -> Vec<Point> {
    points.sort_by(|a, b| a.y.total_cmp(&b.y).then(a.x.total_cmp(&b.x)));
    let mut out: Vec<Point> = Vec::with_capacity(points.len());
    for p in points {
        if !out.iter().any(|q| (q.x - p.x).abs() <= tol && (q.y - p.y).abs() <= tol) {
            out.push(p);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::SplitMix64;

    fn naive_binarize(img: &RasterPage, window: usize, offset: i32) -> BinaryImage {
        let r = (window / 2) as i64;
        let (w, h) = (img.width_px as i64, img.height_px as i64);
        let mut out = BinaryImage::new(img.width_px, img.height_px);
        for y in 0..h {
            for x in 0..w {
                let mut sum = 0i64;
                for dy in -r..=r {
                    for dx in -r..=r {
                        let sx = (x + dx).clamp(0, w - 1);
                        let sy = (y + dy).clamp(0, h - 1);
                        sum += img.pixels[(sy * w + sx) as usize] as i64;
                    }
                }
                let n = (window * window) as i64;
                let v = img.pixels[(y * w + x) as usize] as i64;
                // v < sum/n - offset
                if (v + offset as i64) * n < sum {
                    out.bits[(y * w + x) as usize] = 1;
                }
            }
        }
        out
    }

    fn naive_morph(img: &BinaryImage, sw: usize, sh: usize, erode: bool) -> BinaryImage {
        let (rw, rh) = ((sw / 2) as i64, (sh / 2) as i64);
        let (w, h) = (img.width as i64, img.height as i64);
        let mut out = BinaryImage::new(img.width, img.height);
        for y in 0..h {
            for x in 0..w {
                let mut all = true;
                let mut any = false;
                for dy in -rh..=rh {
                    for dx in -rw..=rw {
                        let (sx, sy) = (x + dx, y + dy);
                        let v = sx >= 0 && sy >= 0 && sx < w && sy < h && img.get(sx as usize, sy as usize);
                        all &= v;
                        any |= v;
                    }
                }
                out.set(x as usize, y as usize, if erode { all } else { any });
            }
        }
        out
    }

    fn random_bits(rng: &mut SplitMix64, w: usize, h: usize, density: f64) -> BinaryImage {
        let bits = (0..w * h).map(|_| (rng.next_f64() < density) as u8).collect();
        BinaryImage::from_bits(w, h, bits)
    }

    #[test]
    fn morphology_matches_definition() {
        let mut rng = SplitMix64::new(7);
        for _ in 0..200 {
            let density = 0.3 + 0.6 * rng.next_f64();
            let img = random_bits(&mut rng, 32, 32, density);
            let sw = 1 + 2 * rng.below(5) as usize;
            let sh = 1 + 2 * rng.below(5) as usize;
            let se = StructuringElement::new(sw, sh).unwrap();
            assert_eq!(erode(&img, &se), naive_morph(&img, sw, sh, true));
            assert_eq!(dilate(&img, &se), naive_morph(&img, sw, sh, false));
        }
    }

    #[test]
    fn binarize_matches_windowed_mean() {
        let mut rng = SplitMix64::new(11);
        for _ in 0..50 {
            let pixels = (0..32 * 32).map(|_| rng.below(256) as u8).collect();
            let img = RasterPage::new(32, 32, 72.0, pixels);
            let window = 1 + 2 * rng.below(8) as usize;
            let offset = rng.below(30) as i32 - 5;
            assert_eq!(binarize(&img, window, offset).unwrap(), naive_binarize(&img, window, offset));
        }
    }

    #[test]
    fn binarize_edge_cases() {
        let white = RasterPage::blank(20, 20, 72.0);
        assert_eq!(binarize(&white, 31, 10).unwrap().count_ink(), 0);
        let black = RasterPage::new(20, 20, 72.0, vec![0; 400]);
        assert_eq!(binarize(&black, 31, 10).unwrap().count_ink(), 0);
        assert_eq!(binarize(&white, 30, 10), Err(LinesError::EvenWindow(30)));

        let mut line = RasterPage::blank(64, 64, 72.0);
        for y in 30..32 {
            for x in 0..64 {
                line.pixels[y * 64 + x] = 0;
            }
        }
        let bin = binarize(&line, 31, 10).unwrap();
        assert_eq!(bin, naive_binarize(&line, 31, 10));
        assert_eq!(bin.count_ink(), 128);
        assert!((0..64).all(|x| bin.get(x, 30) && bin.get(x, 31)));
    }

    #[test]
    fn opening_preserves_long_line() {
        let mut img = BinaryImage::new(40, 5);
        for x in 0..40 {
            img.set(x, 2, true);
        }
        let se = StructuringElement::new(15, 1).unwrap();
        let opened = open(&img, &se);
        let kept = (0..40).filter(|&x| opened.get(x, 2)).count();
        assert!(kept >= 40 - 14);
        let id = StructuringElement::new(1, 1).unwrap();
        assert_eq!(erode(&img, &id), img);
        assert_eq!(dilate(&BinaryImage::new(9, 9), &se), BinaryImage::new(9, 9));
        assert!(StructuringElement::new(2, 1).is_err());
    }

    #[test]
    fn kernel_len_is_odd() {
        assert_eq!(rule_kernel_len(100, 0.04), 5);
        assert_eq!(rule_kernel_len(750, 0.04), 31);
        assert_eq!(rule_kernel_len(1000, 0.04), 41);
    }

    #[test]
    fn blank_image_has_no_rules() {
        assert!(extract_rule_segments(&BinaryImage::new(200, 200), 150.0, 0.04, &Tolerances::default()).is_empty());
    }

    #[test]
    fn intersections() {
        let tol = Tolerances::default();
        let h = Segment::horizontal(10.0, 0.0, 100.0).unwrap();
        let v = Segment::vertical(50.0, 0.0, 100.0).unwrap();
        assert_eq!(find_intersections(&[h], &[v], &tol), vec![Point::new(50.0, 10.0)]);
        let far = Segment::vertical(50.0, 20.0, 100.0).unwrap();
        assert!(find_intersections(&[h], &[far], &tol).is_empty());

        let hs: Vec<Segment> = (0..4).map(|i| Segment::horizontal(i as f64 * 20.0, 0.0, 60.0).unwrap()).collect();
        let vs: Vec<Segment> = (0..4).map(|i| Segment::vertical(i as f64 * 20.0, 0.0, 60.0).unwrap()).collect();
        let brute: usize = hs.iter().map(|h| vs.iter().filter(|v| segments_meet(h, v, &tol)).count()).sum();
        assert_eq!(brute, 16);
        assert_eq!(find_intersections(&hs, &vs, &tol).len(), 16);
    }
}
