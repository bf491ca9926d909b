//! TEDS, TEDS-Struct and table-level precision/recall/F1.

use std::collections::BTreeSet;

use serde::Serialize;

use super::html::{CellKey, TableTree};
use super::ted::{tree_similarity, Tree};
use crate::geometry::{rect_iou, Rect};
use crate::linecell::TableStructure;

pub fn teds(a: &TableTree, b: &TableTree) -> f64 {
    tree_similarity(&Tree::from_table(a), &Tree::from_table(b))
}

/// TEDS with every cell's text erased; span attributes still count.
pub fn teds_struct(a: &TableTree, b: &TableTree) -> f64 {
    teds(&a.without_content(), &b.without_content())
}

/// Logical shape of a table: dimensions and cell tuples.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TableShape {
    pub n_rows: usize,
    pub n_cols: usize,
    pub cells: BTreeSet<CellKey>,
}

impl TableShape {
    pub fn of_structure(t: &TableStructure) -> Self {
        Self { n_rows: t.n_rows, n_cols: t.n_cols, cells: t.cells.iter().map(|c| c.key()).collect() }
    }

    pub fn of_tree(t: &TableTree) -> Self {
        let l = t.layout();
        Self { n_rows: l.n_rows, n_cols: l.n_cols, cells: l.cells.into_iter().map(|(k, _)| k).collect() }
    }
}

/// A table under evaluation: its tree, and its region when known.
#[derive(Clone, Debug, PartialEq)]
pub struct EvalTable {
    pub tree: TableTree,
    pub shape: TableShape,
    pub bbox: Option<Rect>,
}

impl EvalTable {
    pub fn from_structure(t: &TableStructure) -> Self {
        Self { tree: TableTree::from_structure(t), shape: TableShape::of_structure(t), bbox: Some(t.region_bbox) }
    }

    pub fn from_tree(tree: TableTree) -> Self {
        Self { shape: TableShape::of_tree(&tree), tree, bbox: None }
    }
}

/// Counts behind the precision/recall figures.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct PrfCounts {
    pub n_pred: usize,
    pub n_gt: usize,
    pub n_correct: usize,
    pub cell_pred: usize,
    pub cell_gt: usize,
    pub cell_correct: usize,
}

fn ratio(num: usize, den: usize, empty: f64) -> f64 {
    if den == 0 {
        empty
    } else {
        num as f64 / den as f64
    }
}

impl PrfCounts {
    pub fn add(&mut self, o: &PrfCounts) {
        self.n_pred += o.n_pred;
        self.n_gt += o.n_gt;
        self.n_correct += o.n_correct;
        self.cell_pred += o.cell_pred;
        self.cell_gt += o.cell_gt;
        self.cell_correct += o.cell_correct;
    }

    /// 1 when there was nothing to predict and nothing was predicted.
    fn empty_score(&self) -> f64 {
        if self.n_pred == 0 && self.n_gt == 0 {
            1.0
        } else {
            0.0
        }
    }

    pub fn precision(&self) -> f64 {
        ratio(self.n_correct, self.n_pred, self.empty_score())
    }

    pub fn recall(&self) -> f64 {
        ratio(self.n_correct, self.n_gt, self.empty_score())
    }

    /// Harmonic mean of precision and recall, as `2c / (pred + gt)`.
    pub fn f1(&self) -> f64 {
        ratio(2 * self.n_correct, self.n_pred + self.n_gt, self.empty_score())
    }

    pub fn cell_precision(&self) -> f64 {
        ratio(self.cell_correct, self.cell_pred, self.empty_score())
    }

    pub fn cell_recall(&self) -> f64 {
        ratio(self.cell_correct, self.cell_gt, self.empty_score())
    }
}

/// Greedy one-to-one matching by IoU, highest first; ties go to the lower
/// (pred, gt) index pair. Pairs below `thresh` are left unmatched.
pub fn match_by_iou(pred: &[Rect], gt: &[Rect], thresh: f64) -> Vec<(usize, usize)> {
    let mut cand: Vec<(f64, usize, usize)> = Vec::new();
    for (i, p) in pred.iter().enumerate() {
        for (j, g) in gt.iter().enumerate() {
            let iou = rect_iou(p, g);
            if iou >= thresh && iou > 0.0 {
                cand.push((iou, i, j));
            }
        }
    }
    cand.sort_by(|a, b| b.0.total_cmp(&a.0).then(a.1.cmp(&b.1)).then(a.2.cmp(&b.2)));
    let mut used_p = vec![false; pred.len()];
    let mut used_g = vec![false; gt.len()];
    let mut out = Vec::new();
    for (_, i, j) in cand {
        if !used_p[i] && !used_g[j] {
            used_p[i] = true;
            used_g[j] = true;
            out.push((i, j));
        }
    }
    out.sort_unstable();
    out
}

/// Pairs tables by IoU when every table has a region, else by position in
/// the list.
pub fn pair_tables(pred: &[EvalTable], gt: &[EvalTable], iou_thresh: f64) -> Vec<(usize, usize)> {
    let boxes = |ts: &[EvalTable]| ts.iter().map(|t| t.bbox).collect::<Option<Vec<Rect>>>();
    match (boxes(pred), boxes(gt)) {
        (Some(p), Some(g)) => match_by_iou(&p, &g, iou_thresh),
        _ => (0..pred.len().min(gt.len())).map(|i| (i, i)).collect(),
    }
}

/// Counts over a given pairing. A pair is correct when both shapes agree
/// exactly; cell hits are shared cell tuples of each pair.
pub fn prf_counts(pred: &[TableShape], gt: &[TableShape], pairs: &[(usize, usize)]) -> PrfCounts {
    let mut c = PrfCounts {
        n_pred: pred.len(),
        n_gt: gt.len(),
        cell_pred: pred.iter().map(|t| t.cells.len()).sum(),
        cell_gt: gt.iter().map(|t| t.cells.len()).sum(),
        ..Default::default()
    };
    for &(i, j) in pairs {
        if pred[i] == gt[j] {
            c.n_correct += 1;
        }
        c.cell_correct += pred[i].cells.intersection(&gt[j].cells).count();
    }
    c
}

/// Table-level precision/recall inputs for one page of predictions.
pub fn table_prf(pred: &[TableStructure], gt: &[TableStructure], iou_thresh: f64) -> PrfCounts {
    let boxes = |ts: &[TableStructure]| ts.iter().map(|t| t.region_bbox).collect::<Vec<_>>();
    let pairs = match_by_iou(&boxes(pred), &boxes(gt), iou_thresh);
    let shapes = |ts: &[TableStructure]| ts.iter().map(TableShape::of_structure).collect::<Vec<_>>();
    prf_counts(&shapes(pred), &shapes(gt), &pairs)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TableScore {
    pub pred: Option<usize>,
    pub gt: Option<usize>,
    pub teds: f64,
    pub teds_struct: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ItemReport {
    pub id: String,
    pub tables: Vec<TableScore>,
    pub counts: PrfCounts,
}

impl ItemReport {
    pub fn mean_teds(&self) -> f64 {
        mean(self.tables.iter().map(|t| t.teds))
    }

    pub fn mean_teds_struct(&self) -> f64 {
        mean(self.tables.iter().map(|t| t.teds_struct))
    }
}

fn mean(v: impl Iterator<Item = f64>) -> f64 {
    let (sum, n) = v.fold((0.0, 0usize), |(s, n), x| (s + x, n + 1));
    if n == 0 {
        1.0
    } else {
        sum / n as f64
    }
}

/// Scores one document. Unpaired tables on either side score 0.
pub fn evaluate_item(id: &str, pred: &[EvalTable], gt: &[EvalTable], iou_thresh: f64) -> ItemReport {
    let pairs = pair_tables(pred, gt, iou_thresh);
    let mut tables: Vec<TableScore> = pairs
        .iter()
        .map(|&(i, j)| TableScore {
            pred: Some(i),
            gt: Some(j),
            teds: teds(&pred[i].tree, &gt[j].tree),
            teds_struct: teds_struct(&pred[i].tree, &gt[j].tree),
        })
        .collect();
    for j in (0..gt.len()).filter(|j| !pairs.iter().any(|p| p.1 == *j)) {
        tables.push(TableScore { pred: None, gt: Some(j), teds: 0.0, teds_struct: 0.0 });
    }
    for i in (0..pred.len()).filter(|i| !pairs.iter().any(|p| p.0 == *i)) {
        tables.push(TableScore { pred: Some(i), gt: None, teds: 0.0, teds_struct: 0.0 });
    }
    let shapes = |ts: &[EvalTable]| ts.iter().map(|t| t.shape.clone()).collect::<Vec<_>>();
    let counts = prf_counts(&shapes(pred), &shapes(gt), &pairs);
    ItemReport { id: id.to_string(), tables, counts }
}

#[derive(Clone, Debug, PartialEq)]
pub struct EvalReport {
    pub items: Vec<ItemReport>,
    pub totals: PrfCounts,
    /// Mean over every scored table pair, unpaired tables included.
    pub mean_teds: f64,
    pub mean_teds_struct: f64,
    pub missing: Vec<String>,
}

impl EvalReport {
    pub fn from_items(items: Vec<ItemReport>, missing: Vec<String>) -> Self {
        let mut totals = PrfCounts::default();
        for it in &items {
            totals.add(&it.counts);
        }
        let all = || items.iter().flat_map(|i| i.tables.iter());
        let mean_teds = mean(all().map(|t| t.teds));
        let mean_teds_struct = mean(all().map(|t| t.teds_struct));
        Self { items, totals, mean_teds, mean_teds_struct, missing }
    }

    pub fn to_json(&self, metrics: Metrics) -> serde_json::Value {
        use serde_json::json;
        let mut summary = serde_json::Map::new();
        if metrics.teds {
            summary.insert("teds".into(), json!(self.mean_teds));
        }
        if metrics.teds_struct {
            summary.insert("teds_struct".into(), json!(self.mean_teds_struct));
        }
        if metrics.prf {
            let t = &self.totals;
            summary.insert("precision".into(), json!(t.precision()));
            summary.insert("recall".into(), json!(t.recall()));
            summary.insert("f1".into(), json!(t.f1()));
            summary.insert("cell_precision".into(), json!(t.cell_precision()));
            summary.insert("cell_recall".into(), json!(t.cell_recall()));
            summary.insert("counts".into(), serde_json::to_value(t).expect("plain struct"));
        }
        let items: Vec<serde_json::Value> = self
            .items
            .iter()
            .map(|it| {
                let mut m = serde_json::Map::new();
                m.insert("id".into(), json!(it.id));
                if metrics.teds {
                    m.insert("teds".into(), json!(it.mean_teds()));
                }
                if metrics.teds_struct {
                    m.insert("teds_struct".into(), json!(it.mean_teds_struct()));
                }
                if metrics.prf {
                    m.insert("counts".into(), serde_json::to_value(it.counts).expect("plain struct"));
                }
                m.insert("tables".into(), serde_json::to_value(&it.tables).expect("plain struct"));
                serde_json::Value::Object(m)
            })
            .collect();
        json!({ "summary": summary, "items": items, "missing": self.missing })
    }

    pub fn summary_text(&self, metrics: Metrics) -> String {
        let mut out = format!("items: {}\n", self.items.len());
        if metrics.teds {
            out.push_str(&format!("TEDS:        {:.4}\n", self.mean_teds));
        }
        if metrics.teds_struct {
            out.push_str(&format!("TEDS-Struct: {:.4}\n", self.mean_teds_struct));
        }
        if metrics.prf {
            let t = &self.totals;
            out.push_str(&format!(
                "tables: pred {} gt {} correct {}\nprecision:   {:.4}\nrecall:      {:.4}\nF1:          {:.4}\ncell P/R:    {:.4} / {:.4}\n",
                t.n_pred,
                t.n_gt,
                t.n_correct,
                t.precision(),
                t.recall(),
                t.f1(),
                t.cell_precision(),
                t.cell_recall()
            ));
        }
        if !self.missing.is_empty() {
            out.push_str(&format!("missing: {}\n", self.missing.join(", ")));
        }
        out
    }
}

/// Which metric groups a report shows.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Metrics {
    pub teds: bool,
    pub teds_struct: bool,
    pub prf: bool,
}

impl Metrics {
    pub const ALL: Metrics = Metrics { teds: true, teds_struct: true, prf: true };
}
