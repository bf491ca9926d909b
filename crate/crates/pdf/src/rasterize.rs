//! Page rasterization through an external command.

use std::path::Path;
use std::process::Command;

use gridlock_core::page::RasterPage;
use gridlock_core::raster_io::decode_raster;
use thiserror::Error;

/// Ghostscript invocation producing an 8-bit grayscale PNG of one page.
pub const DEFAULT_TEMPLATE: &str =
    "gs -q -dNOPAUSE -dBATCH -dSAFER -sDEVICE=pnggray -r{dpi} -dFirstPage={page} -dLastPage={page} -sOutputFile={output} {input}";

/// Environment variable that replaces [`DEFAULT_TEMPLATE`].
pub const TEMPLATE_ENV: &str = "GRIDLOCK_RASTERIZER";

const PLACEHOLDERS: [&str; 4] = ["{input}", "{page}", "{dpi}", "{output}"];

#[derive(Debug, Error)]
pub enum RasterizeError {
    #[error("rasterizer template: {0}")]
    Config(String),
    #[error("cannot run rasterizer: {0}")]
    Io(#[from] std::io::Error),
    #[error("rasterizer failed ({status}): {stderr}")]
    ExternalTool { status: String, stderr: String },
}

/// Command template and resolution. `{page}` is substituted 1-based.
#[derive(Clone, Debug, PartialEq)]
pub struct RasterizerConfig {
    pub template: String,
    pub dpi: f64,
}

impl Default for RasterizerConfig {
    fn default() -> Self {
        Self { template: DEFAULT_TEMPLATE.into(), dpi: 150.0 }
    }
}

impl RasterizerConfig {
    /// Default template unless [`TEMPLATE_ENV`] is set.
    pub fn from_env(dpi: f64) -> Self {
        let template = std::env::var(TEMPLATE_ENV).ok().filter(|t| !t.trim().is_empty());
        Self { template: template.unwrap_or_else(|| DEFAULT_TEMPLATE.into()), dpi }
    }

    pub fn validate(&self) -> Result<Vec<String>, RasterizeError> {
        for p in PLACEHOLDERS {
            if !self.template.contains(p) {
                return Err(RasterizeError::Config(format!("missing {p} placeholder")));
            }
        }
        if !(self.dpi.is_finite() && self.dpi > 0.0) {
            return Err(RasterizeError::Config(format!("dpi must be positive, got {}", self.dpi)));
        }
        let words = shlex::split(&self.template).ok_or_else(|| RasterizeError::Config("unbalanced quotes".into()))?;
        if words.is_empty() {
            return Err(RasterizeError::Config("empty command".into()));
        }
        Ok(words)
    }
}

fn format_dpi(dpi: f64) -> String {
    if dpi.fract() == 0.0 {
        format!("{}", dpi as i64)
    } else {
        format!("{dpi}")
    }
}

/// Renders 0-based page `page` of the PDF at `input` and loads the result
/// as a grayscale raster at `cfg.dpi`.
pub fn rasterize_page(input: &Path, page: usize, cfg: &RasterizerConfig) -> Result<RasterPage, RasterizeError> {
    let words = cfg.validate()?;
    let dir = tempfile::tempdir()?;
    let output = dir.path().join("page.png");
    let dpi = format_dpi(cfg.dpi);
    let page_no = (page + 1).to_string();
    // substitute after splitting so paths with spaces stay one argument
    let args: Vec<String> = words
        .iter()
        .map(|w| {
            w.replace("{input}", &input.to_string_lossy())
                .replace("{output}", &output.to_string_lossy())
                .replace("{page}", &page_no)
                .replace("{dpi}", &dpi)
        })
        .collect();
    let result = Command::new(&args[0]).args(&args[1..]).output()?;
    let stderr = String::from_utf8_lossy(&result.stderr).trim().to_string();
    if !result.status.success() {
        return Err(RasterizeError::ExternalTool { status: result.status.to_string(), stderr });
    }
    let bytes = std::fs::read(&output).map_err(|e| RasterizeError::ExternalTool {
        status: "exit 0".into(),
        stderr: format!("no output image ({e}); {stderr}"),
    })?;
    decode_raster(&bytes, cfg.dpi).map_err(|e| RasterizeError::ExternalTool {
        status: "exit 0".into(),
        stderr: format!("unreadable output image ({e}); {stderr}"),
    })
}
