use std::path::{Path, PathBuf};

use crate::Failure;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum InputKind {
    Pdf,
    Raster,
    Pif,
}

fn by_extension(path: &Path) -> Option<InputKind> {
    let ext = path.extension()?.to_str()?.to_ascii_lowercase();
    match ext.as_str() {
        "pdf" => Some(InputKind::Pdf),
        "png" | "pgm" | "pnm" => Some(InputKind::Raster),
        "pif" => Some(InputKind::Pif),
        _ => None,
    }
}

/// Extension first, then the leading bytes.
pub fn kind_of(path: &Path, head: &[u8]) -> Option<InputKind> {
    by_extension(path).or_else(|| {
        if head.starts_with(b"%PDF-") {
            Some(InputKind::Pdf)
        } else if head.starts_with(b"\x89PNG") || head.starts_with(b"P5") || head.starts_with(b"P2") {
            Some(InputKind::Raster)
        } else if head.trim_ascii_start().starts_with(b"{") {
            Some(InputKind::Pif)
        } else {
            None
        }
    })
}

/// Expands directories (one level, recognized extensions, sorted by name)
/// and keeps explicit files as given.
pub fn discover(inputs: &[PathBuf]) -> Result<Vec<PathBuf>, Failure> {
    let mut out = Vec::new();
    for input in inputs {
        if input.is_dir() {
            let entries = std::fs::read_dir(input).map_err(|e| Failure::Usage(format!("{}: {e}", input.display())))?;
            let mut files: Vec<PathBuf> = entries
                .filter_map(|e| e.ok().map(|e| e.path()))
                .filter(|p| p.is_file() && by_extension(p).is_some())
                .collect();
            files.sort();
            out.extend(files);
        } else if input.is_file() {
            out.push(input.clone());
        } else {
            return Err(Failure::Usage(format!("{}: no such file or directory", input.display())));
        }
    }
    if out.is_empty() {
        return Err(Failure::Usage("no input files found".into()));
    }
    Ok(out)
}

pub fn stem(path: &Path) -> String {
    path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_else(|| "page".into())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kinds() {
        assert_eq!(kind_of(Path::new("a.PDF"), b""), Some(InputKind::Pdf));
        assert_eq!(kind_of(Path::new("a.pgm"), b""), Some(InputKind::Raster));
        assert_eq!(kind_of(Path::new("scan"), b"\x89PNG\r\n"), Some(InputKind::Raster));
        assert_eq!(kind_of(Path::new("dump.txt"), b"  {\"version\""), Some(InputKind::Pif));
        assert_eq!(kind_of(Path::new("notes.txt"), b"hello"), None);
    }

    #[test]
    fn directories_are_expanded_in_name_order() {
        let dir = tempfile::tempdir().unwrap();
        for name in ["b.pdf", "a.png", "c.txt", "d.pif"] {
            std::fs::write(dir.path().join(name), b"").unwrap();
        }
        let found = discover(&[dir.path().to_path_buf()]).unwrap();
        let names: Vec<_> = found.iter().map(|p| p.file_name().unwrap().to_str().unwrap()).collect();
        assert_eq!(names, ["a.png", "b.pdf", "d.pif"]);
        assert!(matches!(discover(&[dir.path().join("missing")]), Err(Failure::Usage(_))));
    }
}
