//! Restricted HTML table reader.
//!
//! Accepts `table`/`tr`/`td`, with `thead`/`tbody`/`tfoot` flattened and
//! `th` read as `td`. Markup outside tables is skipped. Inside a cell, other
//! inline tags are dropped, `<br>` becomes a newline and whitespace runs
//! collapse to one space.

use thiserror::Error;

use crate::linecell::TableStructure;

#[derive(Debug, Error, PartialEq, Eq)]
#[error("HTML parse error at byte {pos}: {msg}")]
pub struct HtmlError {
    pub pos: usize,
    pub msg: String,
}

fn err<T>(pos: usize, msg: impl Into<String>) -> Result<T, HtmlError> {
    Err(HtmlError { pos, msg: msg.into() })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TableCell {
    pub rowspan: usize,
    pub colspan: usize,
    pub content: String,
}

/// Ordered table tree: rows of cells in document order.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct TableTree {
    pub rows: Vec<Vec<TableCell>>,
}

/// Logical placement of one cell: (row, col, rowspan, colspan).
pub type CellKey = (usize, usize, usize, usize);

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LogicalLayout {
    pub n_rows: usize,
    pub n_cols: usize,
    /// Sorted by (row, col).
    pub cells: Vec<(CellKey, String)>,
}

impl TableTree {
    pub fn from_structure(t: &TableStructure) -> Self {
        let mut rows = vec![Vec::new(); t.n_rows];
        for c in &t.cells {
            rows[c.row].push(TableCell { rowspan: c.rowspan, colspan: c.colspan, content: c.text.clone() });
        }
        Self { rows }
    }

    /// table + tr + td nodes.
    pub fn node_count(&self) -> usize {
        1 + self.rows.len() + self.rows.iter().map(Vec::len).sum::<usize>()
    }

    pub fn without_content(&self) -> Self {
        Self {
            rows: self
                .rows
                .iter()
                .map(|r| r.iter().map(|c| TableCell { content: String::new(), ..c.clone() }).collect())
                .collect(),
        }
    }

    /// Places cells with the HTML table model: each cell takes the first
    /// free slot of its row and reserves the slots its spans cover.
    pub fn layout(&self) -> LogicalLayout {
        let mut taken: Vec<Vec<bool>> = Vec::new();
        let mut cells = Vec::new();
        let mut n_cols = 0;
        let mut n_rows = self.rows.len();
        for (r, row) in self.rows.iter().enumerate() {
            let mut c = 0;
            for cell in row {
                while taken.get(r).and_then(|t| t.get(c)).copied().unwrap_or(false) {
                    c += 1;
                }
                for rr in r..r + cell.rowspan {
                    if taken.len() <= rr {
                        taken.resize(rr + 1, Vec::new());
                    }
                    if taken[rr].len() < c + cell.colspan {
                        taken[rr].resize(c + cell.colspan, false);
                    }
                    for slot in &mut taken[rr][c..c + cell.colspan] {
                        *slot = true;
                    }
                }
                cells.push(((r, c, cell.rowspan, cell.colspan), cell.content.clone()));
                c += cell.colspan;
                n_cols = n_cols.max(c);
                n_rows = n_rows.max(r + cell.rowspan);
            }
        }
        cells.sort_by_key(|(k, _)| (k.0, k.1));
        LogicalLayout { n_rows, n_cols, cells }
    }
}

enum Token<'a> {
    Open { name: String, attrs: Vec<(String, String)>, pos: usize },
    Close { name: String, pos: usize },
    Text(&'a str),
}

fn parse_attrs(s: &str) -> Vec<(String, String)> {
    let mut out = Vec::new();
    let b = s.as_bytes();
    let mut i = 0;
    while i < b.len() {
        while i < b.len() && (b[i].is_ascii_whitespace() || b[i] == b'/') {
            i += 1;
        }
        let start = i;
        while i < b.len() && !b[i].is_ascii_whitespace() && b[i] != b'=' && b[i] != b'/' {
            i += 1;
        }
        if start == i {
            i += 1;
            continue;
        }
        let name = s[start..i].to_ascii_lowercase();
        while i < b.len() && b[i].is_ascii_whitespace() {
            i += 1;
        }
        let mut value = String::new();
        if i < b.len() && b[i] == b'=' {
            i += 1;
            while i < b.len() && b[i].is_ascii_whitespace() {
                i += 1;
            }
            if i < b.len() && (b[i] == b'"' || b[i] == b'\'') {
                let q = b[i];
                let vs = i + 1;
                i = vs;
                while i < b.len() && b[i] != q {
                    i += 1;
                }
                value = s[vs..i.min(b.len())].to_string();
                i += 1;
            } else {
                let vs = i;
                while i < b.len() && !b[i].is_ascii_whitespace() {
                    i += 1;
                }
                value = s[vs..i].to_string();
            }
        }
        out.push((name, value));
    }
    out
}

fn tokenize(html: &str) -> Result<Vec<Token<'_>>, HtmlError> {
    let mut out = Vec::new();
    let b = html.as_bytes();
    let mut i = 0;
    while i < b.len() {
        if b[i] != b'<' {
            let start = i;
            while i < b.len() && b[i] != b'<' {
                i += 1;
            }
            out.push(Token::Text(&html[start..i]));
            continue;
        }
        if html[i..].starts_with("<!--") {
            match html[i + 4..].find("-->") {
                Some(end) => i += 4 + end + 3,
                None => return err(i, "unterminated comment"),
            }
            continue;
        }
        let Some(end) = html[i..].find('>') else {
            return err(i, "unterminated tag");
        };
        let inner = &html[i + 1..i + end];
        let pos = i;
        i += end + 1;
        if inner.starts_with('!') || inner.starts_with('?') {
            continue;
        }
        let (closing, body) = match inner.strip_prefix('/') {
            Some(rest) => (true, rest),
            None => (false, inner),
        };
        let name_end = body.find(|c: char| c.is_ascii_whitespace() || c == '/').unwrap_or(body.len());
        let name = body[..name_end].to_ascii_lowercase();
        if name.is_empty() {
            return err(pos, "empty tag name");
        }
        if closing {
            out.push(Token::Close { name, pos });
        } else {
            out.push(Token::Open { attrs: parse_attrs(&body[name_end..]), name, pos });
        }
    }
    Ok(out)
}

fn decode_entities(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    let mut rest = s;
    while let Some(amp) = rest.find('&') {
        out.push_str(&rest[..amp]);
        rest = &rest[amp..];
        let decoded = rest.find(';').filter(|&semi| semi <= 10).and_then(|semi| {
            let ent = &rest[1..semi];
            let ch = match ent {
                "amp" => Some('&'),
                "lt" => Some('<'),
                "gt" => Some('>'),
                "quot" => Some('"'),
                "apos" => Some('\''),
                "nbsp" => Some(' '),
                _ if ent.starts_with("#x") || ent.starts_with("#X") => {
                    u32::from_str_radix(&ent[2..], 16).ok().and_then(char::from_u32)
                }
                _ if ent.starts_with('#') => ent[1..].parse().ok().and_then(char::from_u32),
                _ => None,
            };
            ch.map(|c| (c, semi))
        });
        match decoded {
            Some((c, semi)) => {
                out.push(c);
                rest = &rest[semi + 1..];
            }
            None => {
                out.push('&');
                rest = &rest[1..];
            }
        }
    }
    out.push_str(rest);
    out
}

/// Collapses whitespace within lines and trims around line breaks.
fn normalize_cell(raw: &str) -> String {
    raw.split('\n')
        .map(|line| line.split_whitespace().collect::<Vec<_>>().join(" "))
        .collect::<Vec<_>>()
        .join("\n")
        .trim_matches('\n')
        .to_string()
}

fn span_attr(attrs: &[(String, String)], key: &str, pos: usize) -> Result<usize, HtmlError> {
    match attrs.iter().find(|(k, _)| k == key) {
        None => Ok(1),
        Some((_, v)) => match v.trim().parse::<usize>() {
            Ok(n) if n >= 1 => Ok(n),
            _ => err(pos, format!("invalid {key} value {v:?}")),
        },
    }
}

/// Every top-level table in document order.
pub fn parse_tables_html(html: &str) -> Result<Vec<TableTree>, HtmlError> {
    let mut tables = Vec::new();
    let mut current: Option<(TableTree, usize)> = None;
    let mut in_row: Option<usize> = None;
    // (rowspan, colspan, raw text, open position)
    let mut cell: Option<(usize, usize, String, usize)> = None;

    for tok in tokenize(html)? {
        match tok {
            Token::Text(t) => {
                if let Some((_, _, raw, _)) = cell.as_mut() {
                    // source newlines are ordinary whitespace
                    raw.push_str(&decode_entities(t).replace(['\n', '\r'], " "));
                }
            }
            Token::Open { name, attrs, pos } => match (name.as_str(), current.is_some()) {
                ("table", false) => current = Some((TableTree::default(), pos)),
                ("table", true) => return err(pos, "nested table"),
                (_, false) => {}
                ("thead" | "tbody" | "tfoot", true) => {}
                ("tr", true) => {
                    if cell.is_some() || in_row.is_some() {
                        return err(pos, "unclosed <tr> or <td> before <tr>");
                    }
                    current.as_mut().unwrap().0.rows.push(Vec::new());
                    in_row = Some(pos);
                }
                ("td" | "th", true) => {
                    if cell.is_some() {
                        return err(pos, "unclosed <td> before <td>");
                    }
                    if in_row.is_none() {
                        return err(pos, "<td> outside <tr>");
                    }
                    cell = Some((
                        span_attr(&attrs, "rowspan", pos)?,
                        span_attr(&attrs, "colspan", pos)?,
                        String::new(),
                        pos,
                    ));
                }
                ("br", true) => {
                    if let Some((_, _, raw, _)) = cell.as_mut() {
                        raw.push('\n');
                    }
                }
                _ => {}
            },
            Token::Close { name, pos } => match (name.as_str(), current.is_some()) {
                ("table", false) => return err(pos, "</table> without <table>"),
                (_, false) => {}
                ("thead" | "tbody" | "tfoot", true) => {
                    if cell.is_some() || in_row.is_some() {
                        return err(pos, format!("unclosed tag before </{name}>"));
                    }
                }
                ("td" | "th", true) => {
                    let Some((rowspan, colspan, raw, _)) = cell.take() else {
                        return err(pos, format!("</{name}> without open cell"));
                    };
                    let content = normalize_cell(&raw);
                    let tree = &mut current.as_mut().unwrap().0;
                    tree.rows.last_mut().expect("inside row").push(TableCell { rowspan, colspan, content });
                }
                ("tr", true) => {
                    if cell.is_some() {
                        return err(pos, "unclosed <td> before </tr>");
                    }
                    if in_row.take().is_none() {
                        return err(pos, "</tr> without <tr>");
                    }
                }
                ("table", true) => {
                    if let Some((_, _, _, p)) = cell {
                        return err(p, "unclosed <td>");
                    }
                    if let Some(p) = in_row {
                        return err(p, "unclosed <tr>");
                    }
                    tables.push(current.take().unwrap().0);
                }
                _ => {}
            },
        }
    }
    if let Some((_, pos)) = current {
        return err(pos, "unclosed <table>");
    }
    Ok(tables)
}

/// The single table of `html`.
pub fn parse_table_html(html: &str) -> Result<TableTree, HtmlError> {
    let mut tables = parse_tables_html(html)?;
    match tables.len() {
        1 => Ok(tables.pop().unwrap()),
        0 => err(0, "no table element"),
        n => err(0, format!("expected one table, found {n}")),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cell(content: &str) -> TableCell {
        TableCell { rowspan: 1, colspan: 1, content: content.into() }
    }

    #[test]
    fn minimal_table() {
        let t = parse_table_html("<table><tr><td>a</td></tr></table>").unwrap();
        assert_eq!(t, TableTree { rows: vec![vec![cell("a")]] });
        assert_eq!(t.node_count(), 3);
    }

    #[test]
    fn wrappers_and_th() {
        let t = parse_table_html("<table><tbody><tr><th colspan=\"2\">h</th></tr></tbody></table>").unwrap();
        assert_eq!(t.rows[0][0], TableCell { rowspan: 1, colspan: 2, content: "h".into() });
    }

    #[test]
    fn rejects_non_tables_and_unclosed() {
        assert!(parse_table_html("<div>x</div>").is_err());
        assert!(parse_table_html("<table><tr><td>a</td></table>").is_err());
        assert!(parse_table_html("<table><tr><td>a</tr></table>").is_err());
        assert!(parse_table_html("<table><tr><td>a</td></tr>").is_err());
        assert!(parse_table_html("<table></table><table></table>").is_err());
        assert!(parse_table_html("<table><tr><td rowspan=\"0\">a</td></tr></table>").is_err());
        let e = parse_table_html("<p>x</p><table><tr><td>a</td></table>").unwrap_err();
        assert_eq!(e.pos, 15);
    }

    #[test]
    fn text_normalization() {
        let html = "<html><body><p>skip</p><table>\n <tr> <td>  a &amp;\n b <b>c</b> </td><td>x<br/> y &lt;&quot;&#65;</td></tr></table></body></html>";
        let t = parse_table_html(html).unwrap();
        assert_eq!(t.rows[0][0].content, "a & b c");
        assert_eq!(t.rows[0][1].content, "x\ny <\"A");
    }

    #[test]
    fn layout_places_spans() {
        let html = "<table><tr><td rowspan=2>a</td><td>b</td></tr><tr><td>c</td></tr></table>";
        let l = parse_table_html(html).unwrap().layout();
        assert_eq!((l.n_rows, l.n_cols), (2, 2));
        let keys: Vec<_> = l.cells.iter().map(|c| c.0).collect();
        assert_eq!(keys, vec![(0, 0, 2, 1), (0, 1, 1, 1), (1, 1, 1, 1)]);
    }
}
