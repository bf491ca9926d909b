//! Evaluation: TEDS, TEDS-Struct and table-level precision/recall/F1.

pub mod eval;
pub mod html;
pub mod ted;

pub use eval::{evaluate_item, table_prf, teds, teds_struct, EvalReport, EvalTable, Metrics, PrfCounts};
pub use html::{parse_table_html, parse_tables_html, TableTree};
pub use ted::tree_edit_distance;
