use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use gridlock_core::config::Config;
use gridlock_core::emit::document_from_json;
use gridlock_core::metrics::{evaluate_item, parse_tables_html, EvalReport, EvalTable, Metrics};

use crate::{EvaluateArgs, Failure, MetricArg};

/// `.html` and `.json` files keyed by name without the final extension.
fn scan(dir: &Path) -> Result<BTreeMap<String, PathBuf>, Failure> {
    let entries = std::fs::read_dir(dir).map_err(|e| Failure::Usage(format!("{}: {e}", dir.display())))?;
    let mut out = BTreeMap::new();
    for entry in entries.flatten() {
        let path = entry.path();
        let ext = path.extension().and_then(|e| e.to_str()).map(str::to_ascii_lowercase);
        if path.is_file() && matches!(ext.as_deref(), Some("html" | "htm" | "json")) {
            if let Some(stem) = path.file_stem().and_then(|s| s.to_str()) {
                out.insert(stem.to_string(), path);
            }
        }
    }
    Ok(out)
}

/// Tables of one file. JSON outputs carry boxes, HTML does not.
pub fn load_tables(path: &Path) -> Result<Vec<EvalTable>, String> {
    let bytes = std::fs::read(path).map_err(|e| e.to_string())?;
    if path.extension().is_some_and(|e| e.eq_ignore_ascii_case("json")) {
        let doc = document_from_json(&bytes).map_err(|e| e.to_string())?;
        Ok(doc.pages.iter().flat_map(|p| p.tables()).map(EvalTable::from_structure).collect())
    } else {
        let text = String::from_utf8(bytes).map_err(|e| e.to_string())?;
        let trees = parse_tables_html(&text).map_err(|e| e.to_string())?;
        Ok(trees.into_iter().map(EvalTable::from_tree).collect())
    }
}

fn metrics(m: MetricArg) -> Metrics {
    match m {
        MetricArg::Teds => Metrics { teds: true, teds_struct: false, prf: false },
        MetricArg::TedsStruct => Metrics { teds: false, teds_struct: true, prf: false },
        MetricArg::Prf => Metrics { teds: false, teds_struct: false, prf: true },
        MetricArg::All => Metrics::ALL,
    }
}

pub fn run(args: &EvaluateArgs) -> Result<(), Failure> {
    let mut cfg = Config::default();
    if let Some(path) = &args.config {
        let text = std::fs::read_to_string(path).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
        cfg.apply_text(&text).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
    }
    let iou = args.iou_thresh.unwrap_or(cfg.iou_thresh);
    if !(0.0..=1.0).contains(&iou) {
        return Err(Failure::Usage("--iou-thresh must lie in [0, 1]".into()));
    }
    let gt = scan(&args.gt_dir)?;
    if gt.is_empty() {
        return Err(Failure::Usage(format!("{}: no ground-truth files", args.gt_dir.display())));
    }
    let pred = scan(&args.pred_dir)?;

    let mut missing = Vec::new();
    let mut items = Vec::new();
    let mut failed = false;
    for (stem, gt_path) in &gt {
        let gt_tables = match load_tables(gt_path) {
            Ok(t) => t,
            Err(e) => {
                eprintln!("error: {}: {e}", gt_path.display());
                failed = true;
                continue;
            }
        };
        let pred_tables = match pred.get(stem) {
            Some(p) => load_tables(p).unwrap_or_else(|e| {
                eprintln!("error: {}: {e}", p.display());
                failed = true;
                Vec::new()
            }),
            None => {
                missing.push(format!("{stem}: no prediction"));
                Vec::new()
            }
        };
        items.push(evaluate_item(stem, &pred_tables, &gt_tables, iou));
    }
    for stem in pred.keys().filter(|s| !gt.contains_key(*s)) {
        missing.push(format!("{stem}: no ground truth"));
    }

    let report = EvalReport::from_items(items, missing);
    let m = metrics(args.metric);
    let json = serde_json::to_string_pretty(&report.to_json(m)).map_err(|e| Failure::Usage(e.to_string()))?;
    println!("{json}");
    eprint!("{}", report.summary_text(m));
    if failed || (!report.missing.is_empty() && !args.allow_missing) {
        Err(Failure::Partial)
    } else {
        Ok(())
    }
}
