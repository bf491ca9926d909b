use std::path::{Path, PathBuf};

use gridlock_core::config::Config;
use gridlock_core::emit::{document_to_json, page_to_csv, page_to_html, DocumentOutput, PageOutput};
use gridlock_core::page::{pif_load, pif_save, PageGraphics, RasterPage};
use gridlock_core::par::{default_threads, map_ordered, with_threads};
use gridlock_core::pipeline::{process_graphics, process_raster, raster_to_graphics};
use gridlock_core::raster_io::decode_raster;
use gridlock_pdf::{extract_page, open_pdf, rasterize_page, ExtractOptions, PdfDocument, RasterizerConfig};

use crate::inputs::{discover, kind_of, stem, InputKind};
use crate::{load_config, ExtractArgs, Failure, Format, PifDumpArgs};

enum Source {
    Pdf(PdfDocument),
    Raster(RasterPage),
    Pif(PageGraphics),
}

impl Source {
    fn page_count(&self) -> usize {
        match self {
            Source::Pdf(doc) => doc.page_count(),
            _ => 1,
        }
    }
}

struct Loaded {
    path: PathBuf,
    source: Result<Source, String>,
}

fn load(path: &Path, cfg: &Config) -> Result<Source, String> {
    let bytes = std::fs::read(path).map_err(|e| e.to_string())?;
    let kind = kind_of(path, &bytes[..bytes.len().min(16)]).ok_or("unrecognized input type")?;
    match kind {
        InputKind::Pdf => open_pdf(&bytes).map(Source::Pdf).map_err(|e| e.to_string()),
        InputKind::Raster => decode_raster(&bytes, cfg.dpi).map(Source::Raster).map_err(|e| e.to_string()),
        InputKind::Pif => pif_load(&bytes).map(Source::Pif).map_err(|e| e.to_string()),
    }
}

fn pdf_page(doc: &PdfDocument, path: &Path, page: usize, cfg: &Config) -> Result<PageOutput, String> {
    let opts = ExtractOptions { thin_rule_pt: cfg.thin_rule_pt };
    let ex = extract_page(doc, page, &opts).map_err(|e| e.to_string())?;
    let mut out = if ex.is_image_based() {
        let raster = rasterize_page(path, page, &RasterizerConfig::from_env(cfg.dpi)).map_err(|e| e.to_string())?;
        let mut out = process_raster(&raster, page, cfg).map_err(|e| e.to_string())?;
        out.warnings.insert(0, format!("image-based page rasterized at {} dpi; cell text left empty", cfg.dpi));
        out
    } else {
        process_graphics(&ex.graphics, ex.images, cfg)
    };
    let mut warnings = ex.warnings;
    warnings.append(&mut out.warnings);
    out.warnings = warnings;
    Ok(out)
}

fn process(source: &Source, path: &Path, page: usize, cfg: &Config) -> Result<PageOutput, String> {
    match source {
        Source::Pdf(doc) => pdf_page(doc, path, page, cfg),
        Source::Raster(r) => process_raster(r, page, cfg).map_err(|e| e.to_string()),
        Source::Pif(g) => Ok(process_graphics(g, Vec::new(), cfg)),
    }
}

pub fn render(out: &PageOutput, format: Format) -> Vec<u8> {
    match format {
        Format::Html => page_to_html(out).into_bytes(),
        Format::Csv => page_to_csv(out).into_bytes(),
        Format::Json => document_to_json(&DocumentOutput { pages: vec![out.clone()] }),
    }
}

pub fn run(args: &ExtractArgs) -> Result<(), Failure> {
    let mut cfg = load_config(&args.common)?;
    if args.no_deskew {
        cfg.deskew = false;
    }
    let files = discover(&args.inputs)?;
    std::fs::create_dir_all(&args.out).map_err(|e| Failure::Usage(format!("{}: {e}", args.out.display())))?;
    let jobs = args.jobs.unwrap_or_else(default_threads).max(1);

    let results = with_threads(jobs, || {
        let loaded: Vec<Loaded> = map_ordered(&files, |p| Loaded { path: p.clone(), source: load(p, &cfg) });
        let units: Vec<(usize, usize)> = loaded
            .iter()
            .enumerate()
            .flat_map(|(i, l)| {
                let n = l.source.as_ref().map_or(0, Source::page_count);
                (0..n).map(move |p| (i, p))
            })
            .collect();
        let pages = map_ordered(&units, |&(i, p)| {
            let l = &loaded[i];
            process(l.source.as_ref().expect("only loaded files have units"), &l.path, p, &cfg)
        });
        (loaded, units, pages)
    });
    let (loaded, units, pages) = results;

    let mut failed = 0;
    for l in &loaded {
        if let Err(e) = &l.source {
            eprintln!("error: {}: {e}", l.path.display());
            failed += 1;
        }
    }
    let (mut n_pages, mut n_tables, mut n_warnings) = (0, 0, 0);
    let mut written = std::collections::HashSet::new();
    for (&(i, p), result) in units.iter().zip(pages) {
        let path = &loaded[i].path;
        match result {
            Ok(out) => {
                let name = format!("{}.page{p}.{}", stem(path), args.format.extension());
                if !written.insert(name.clone()) {
                    eprintln!("error: {}: page {p}: output {name} already written by another input", path.display());
                    failed += 1;
                    continue;
                }
                for w in &out.warnings {
                    eprintln!("warning: {}: page {p}: {w}", path.display());
                }
                if let Err(e) = std::fs::write(args.out.join(&name), render(&out, args.format)) {
                    eprintln!("error: {}: page {p}: cannot write {name}: {e}", path.display());
                    failed += 1;
                    continue;
                }
                n_pages += 1;
                n_tables += out.tables().count();
                n_warnings += out.warnings.len();
            }
            Err(e) => {
                eprintln!("error: {}: page {p}: {e}", path.display());
                failed += 1;
            }
        }
    }
    println!("{n_pages} page(s), {n_tables} table(s), {n_warnings} warning(s), {failed} failure(s)");
    if failed > 0 {
        Err(Failure::Partial)
    } else {
        Ok(())
    }
}

pub fn pif_dump(args: &PifDumpArgs) -> Result<(), Failure> {
    let cfg = load_config(&args.common)?;
    let source = load(&args.input, &cfg).map_err(|e| Failure::Usage(format!("{}: {e}", args.input.display())))?;
    let count = source.page_count();
    if args.page >= count {
        return Err(Failure::Usage(format!("page {} out of range ({} has {count})", args.page, args.input.display())));
    }
    let graphics = match source {
        Source::Pdf(doc) => {
            let opts = ExtractOptions { thin_rule_pt: cfg.thin_rule_pt };
            let ex = extract_page(&doc, args.page, &opts).map_err(|e| {
                eprintln!("error: {}: page {}: {e}", args.input.display(), args.page);
                Failure::Partial
            })?;
            for w in &ex.warnings {
                eprintln!("warning: {w}");
            }
            ex.graphics
        }
        Source::Raster(r) => {
            let rg = raster_to_graphics(&r, 0, &cfg).map_err(|e| {
                eprintln!("error: {}: {e}", args.input.display());
                Failure::Partial
            })?;
            rg.graphics
        }
        Source::Pif(g) => g,
    };
    use std::io::Write;
    std::io::stdout().write_all(&pif_save(&graphics)).map_err(|e| Failure::Usage(e.to_string()))
}
