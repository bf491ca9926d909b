//! Ordered tree edit distance (Zhang-Shasha) with table-aware relabel costs.

use super::html::TableTree;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Label {
    Table,
    Tr,
    Td { rowspan: usize, colspan: usize, content: String },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Tree {
    pub label: Label,
    pub children: Vec<Tree>,
}

impl Tree {
    pub fn leaf(label: Label) -> Self {
        Self { label, children: Vec::new() }
    }

    pub fn size(&self) -> usize {
        1 + self.children.iter().map(Tree::size).sum::<usize>()
    }

    pub fn from_table(t: &TableTree) -> Self {
        Tree {
            label: Label::Table,
            children: t
                .rows
                .iter()
                .map(|row| Tree {
                    label: Label::Tr,
                    children: row
                        .iter()
                        .map(|c| {
                            Tree::leaf(Label::Td { rowspan: c.rowspan, colspan: c.colspan, content: c.content.clone() })
                        })
                        .collect(),
                })
                .collect(),
        }
    }
}

/// Levenshtein distance over chars divided by the longer length.
pub fn normalized_levenshtein(a: &str, b: &str) -> f64 {
    let a: Vec<char> = a.chars().collect();
    let b: Vec<char> = b.chars().collect();
    let longest = a.len().max(b.len());
    if longest == 0 {
        return 0.0;
    }
    let mut prev: Vec<usize> = (0..=b.len()).collect();
    let mut cur = vec![0; b.len() + 1];
    for (i, ca) in a.iter().enumerate() {
        cur[0] = i + 1;
        for (j, cb) in b.iter().enumerate() {
            let sub = prev[j] + usize::from(ca != cb);
            cur[j + 1] = sub.min(prev[j + 1] + 1).min(cur[j] + 1);
        }
        std::mem::swap(&mut prev, &mut cur);
    }
    prev[b.len()] as f64 / longest as f64
}

/// Cost of turning label `a` into label `b`.
pub fn relabel_cost(a: &Label, b: &Label) -> f64 {
    match (a, b) {
        (Label::Td { rowspan: r1, colspan: c1, content: t1 }, Label::Td { rowspan: r2, colspan: c2, content: t2 }) => {
            if r1 != r2 || c1 != c2 {
                1.0
            } else {
                normalized_levenshtein(t1, t2)
            }
        }
        (Label::Table, Label::Table) | (Label::Tr, Label::Tr) => 0.0,
        _ => 1.0,
    }
}

/// Postorder labels and leftmost-leaf indices.
struct Flat<'a> {
    labels: Vec<&'a Label>,
    lml: Vec<usize>,
    keyroots: Vec<usize>,
}

impl<'a> Flat<'a> {
    fn new(root: &'a Tree) -> Self {
        fn walk<'a>(t: &'a Tree, labels: &mut Vec<&'a Label>, lml: &mut Vec<usize>) -> usize {
            let mut first = None;
            for c in &t.children {
                let l = walk(c, labels, lml);
                first.get_or_insert(l);
            }
            let me = labels.len();
            labels.push(&t.label);
            let l = first.unwrap_or(me);
            lml.push(l);
            l
        }
        let mut labels = Vec::new();
        let mut lml = Vec::new();
        walk(root, &mut labels, &mut lml);
        let n = labels.len();
        // keyroots: highest node for each distinct leftmost leaf
        let mut keyroots: Vec<usize> = (0..n).filter(|&i| !(i + 1..n).any(|j| lml[j] == lml[i])).collect();
        keyroots.sort_unstable();
        Self { labels, lml, keyroots }
    }
}

/// Minimal edit cost with unit insert/delete and [`relabel_cost`] renames.
pub fn tree_edit_distance(a: &Tree, b: &Tree) -> f64 {
    let fa = Flat::new(a);
    let fb = Flat::new(b);
    let (na, nb) = (fa.labels.len(), fb.labels.len());
    let mut td = vec![vec![0.0f64; nb]; na];
    let mut fd = vec![vec![0.0f64; nb + 1]; na + 1];
    for &i in &fa.keyroots {
        for &j in &fb.keyroots {
            let (li, lj) = (fa.lml[i], fb.lml[j]);
            // fd[x][y]: forest a[li..li+x) vs b[lj..lj+y)
            fd[0][0] = 0.0;
            for x in 1..=i - li + 1 {
                fd[x][0] = fd[x - 1][0] + 1.0;
            }
            for y in 1..=j - lj + 1 {
                fd[0][y] = fd[0][y - 1] + 1.0;
            }
            for x in 1..=i - li + 1 {
                let ai = li + x - 1;
                for y in 1..=j - lj + 1 {
                    let bj = lj + y - 1;
                    let del = fd[x - 1][y] + 1.0;
                    let ins = fd[x][y - 1] + 1.0;
                    if fa.lml[ai] == li && fb.lml[bj] == lj {
                        let ren = fd[x - 1][y - 1] + relabel_cost(fa.labels[ai], fb.labels[bj]);
                        let v = del.min(ins).min(ren);
                        fd[x][y] = v;
                        td[ai][bj] = v;
                    } else {
                        let px = fa.lml[ai] - li;
                        let py = fb.lml[bj] - lj;
                        fd[x][y] = del.min(ins).min(fd[px][py] + td[ai][bj]);
                    }
                }
            }
        }
    }
    td[na - 1][nb - 1]
}

/// Tree similarity in [0, 1].
pub fn tree_similarity(a: &Tree, b: &Tree) -> f64 {
    let n = a.size().max(b.size()) as f64;
    (1.0 - tree_edit_distance(a, b) / n).clamp(0.0, 1.0)
}
