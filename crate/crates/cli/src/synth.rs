use gridlock_core::emit::{page_to_cells, page_to_html, PageOutput};
use gridlock_core::page::pif_save;
use gridlock_core::par::{default_threads, map_ordered, with_threads};
use gridlock_core::raster_io::encode_png;
use gridlock_core::synth::{gen_table, SynthItem};

use crate::{load_config, Failure, SynthArgs};

/// Ground-truth page HTML: the table alone.
pub fn ground_truth_html(item: &SynthItem) -> String {
    let (cells, _) = page_to_cells(vec![item.structure.clone()], Vec::new(), Vec::new());
    page_to_html(&PageOutput { page_index: 0, cells, unparsed_regions: Vec::new(), warnings: Vec::new() })
}

pub fn run(args: &SynthArgs) -> Result<(), Failure> {
    let cfg = load_config(&args.common)?;
    let mut p = cfg.synth.clone();
    if let Some(dpi) = args.common.dpi {
        p.dpi = dpi;
    }
    macro_rules! set {
        ($($field:ident <- $arg:ident),*) => {$(
            if let Some(v) = args.$arg {
                p.$field = v;
            }
        )*};
    }
    set!(max_rows <- max_rows, max_cols <- max_cols, merge_prob <- merge_prob, skew_deg <- skew,
         noise_sigma <- noise_sigma, page_width <- page_width, page_height <- page_height,
         margin <- margin, min_cell <- min_cell);
    if args.no_text {
        p.text_fill = false;
    }
    p.seed = args.seed;
    p.validate().map_err(|e| Failure::Usage(e.to_string()))?;

    let dirs = ["pif", "raster", "gt"].map(|d| args.out.join(d));
    for d in &dirs {
        std::fs::create_dir_all(d).map_err(|e| Failure::Usage(format!("{}: {e}", d.display())))?;
    }
    let width = args.count.saturating_sub(1).to_string().len().max(4);
    let indices: Vec<usize> = (0..args.count).collect();
    let jobs = args.jobs.unwrap_or_else(default_threads).max(1);
    let results = with_threads(jobs, || {
        map_ordered(&indices, |&i| {
            let params = gridlock_core::synth::SynthParams { seed: p.seed.wrapping_add(i as u64), ..p.clone() };
            let item = gen_table(&params).map_err(|e| format!("item {i}: {e}"))?;
            let name = format!("item_{i:0width$}");
            let files = [
                (dirs[0].join(format!("{name}.pif")), pif_save(&item.page)),
                (dirs[1].join(format!("{name}.png")), encode_png(&item.raster)),
                (dirs[2].join(format!("{name}.page0.html")), ground_truth_html(&item).into_bytes()),
            ];
            for (path, bytes) in files {
                std::fs::write(&path, bytes).map_err(|e| format!("{}: {e}", path.display()))?;
            }
            Ok::<(), String>(())
        })
    });
    let mut failed = 0;
    for r in results {
        if let Err(e) = r {
            eprintln!("error: {e}");
            failed += 1;
        }
    }
    println!("{} item(s) written to {}", args.count - failed, args.out.display());
    if failed > 0 {
        Err(Failure::Partial)
    } else {
        Ok(())
    }
}
