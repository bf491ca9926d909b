//! Wired-table extraction core.
//!
//! Frontends produce [`page::PageGraphics`] (vector primitives) or
//! [`page::RasterPage`] (grayscale pixels). The core finds ruled table
//! regions, rebuilds their logical structure, places text into cells and
//! serializes the result. [`metrics`] scores output against ground truth and
//! [`synth`] generates seeded ground-truth corpora.

pub mod config;
pub mod deskew;
pub mod emit;
mod fixed;
pub mod geometry;
pub mod linecell;
pub mod lines;
pub mod metrics;
pub mod page;
pub mod par;
pub mod pipeline;
pub mod raster_io;
pub mod region;
pub mod rng;
pub mod synth;
pub mod text;

pub use config::Config;
pub use geometry::{Rect, Segment, Tolerances};
pub use linecell::TableStructure;
pub use page::{PageGraphics, RasterPage};
