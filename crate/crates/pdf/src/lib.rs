//! Digital-PDF frontend: turns PDF pages into [`PageGraphics`] (text spans,
//! rules, rectangles) and rasterizes pages through an external tool.
//!
//! The parser covers what machine-generated report PDFs use: xref tables
//! and streams with `/Prev` chains, object streams, Flate and ASCIIHex
//! filters. Encrypted files are rejected. Page `/Rotate` is ignored.
//!
//! [`PageGraphics`]: gridlock_core::page::PageGraphics

mod content;
mod document;
mod encoding;
mod filters;
mod font;
mod object;
mod rasterize;

use thiserror::Error;

pub use content::{extract_page, ExtractOptions, ExtractedPage};
pub use document::{PageInfo, PdfDocument};
pub use rasterize::{rasterize_page, RasterizeError, RasterizerConfig, DEFAULT_TEMPLATE, TEMPLATE_ENV};

#[derive(Debug, Error)]
pub enum PdfError {
    #[error("not a PDF file (no %PDF- header)")]
    NotPdf,
    #[error("malformed cross-reference data: {0}")]
    MalformedXref(String),
    #[error("unsupported stream filter /{0}")]
    UnsupportedFilter(String),
    #[error("encrypted PDFs are not supported")]
    Encrypted,
    #[error("syntax error at byte {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("cannot decode stream: {0}")]
    Decode(String),
    #[error("bad document structure: {0}")]
    Structure(String),
    #[error("page {page} out of range (document has {count})")]
    PageOutOfRange { page: usize, count: usize },
}

/// Parses a whole document from memory.
pub fn open_pdf(bytes: &[u8]) -> Result<PdfDocument, PdfError> {
    PdfDocument::open(bytes)
}
