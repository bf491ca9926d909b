//! PNG and PGM reading and writing for grayscale page rasters.

use std::io::Cursor;
use std::path::Path;

use image::{GrayImage, ImageFormat};
use thiserror::Error;

use crate::page::RasterPage;

#[derive(Debug, Error)]
pub enum RasterIoError {
    #[error("cannot read image: {0}")]
    Io(#[from] std::io::Error),
    #[error("cannot decode image: {0}")]
    Decode(#[from] image::ImageError),
}

/// Decodes any supported image and converts it to 8-bit gray. The pixel
/// grid is taken as rendered at `dpi`.
pub fn decode_raster(bytes: &[u8], dpi: f64) -> Result<RasterPage, RasterIoError> {
    let img = image::load_from_memory(bytes)?.to_luma8();
    let (w, h) = (img.width() as usize, img.height() as usize);
    Ok(RasterPage::new(w, h, dpi, img.into_raw()))
}

pub fn load_raster(path: &Path, dpi: f64) -> Result<RasterPage, RasterIoError> {
    decode_raster(&std::fs::read(path)?, dpi)
}

pub fn encode_png(r: &RasterPage) -> Vec<u8> {
    let img =
        GrayImage::from_raw(r.width_px as u32, r.height_px as u32, r.pixels.clone()).expect("pixel count matches");
    let mut out = Cursor::new(Vec::new());
    img.write_to(&mut out, ImageFormat::Png).expect("in-memory encode");
    out.into_inner()
}

/// Binary PGM (P5).
pub fn encode_pgm(r: &RasterPage) -> Vec<u8> {
    let mut out = format!("P5\n{} {}\n255\n", r.width_px, r.height_px).into_bytes();
    out.extend_from_slice(&r.pixels);
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trips() {
        let pixels: Vec<u8> = (0..12 * 7).map(|i| (i * 3) as u8).collect();
        let r = RasterPage::new(12, 7, 150.0, pixels);
        assert_eq!(decode_raster(&encode_png(&r), 150.0).unwrap(), r);
        let pgm = encode_pgm(&r);
        assert!(pgm.starts_with(b"P5"));
        assert_eq!(decode_raster(&pgm, 150.0).unwrap(), r);
        assert!(decode_raster(b"not an image", 72.0).is_err());
    }
}
