use std::collections::BTreeSet;
use std::fmt::{self, Write};

use crate::error::{parse_err, Result};
use crate::graph::Graph;

/// Tree of bags over the vertices `0..n` of a graph.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TreeDecomposition {
    n: usize,
    bags: Vec<Vec<usize>>,
    edges: Vec<(usize, usize)>,
}

impl TreeDecomposition {
    /// Bags are sorted and deduplicated; no validity checks are made here,
    /// see [`validate_td`].
    pub fn new(n: usize, bags: Vec<Vec<usize>>, edges: Vec<(usize, usize)>) -> Self {
        let bags = bags
            .into_iter()
            .map(|b| b.into_iter().collect::<BTreeSet<_>>().into_iter().collect())
            .collect();
        TreeDecomposition { n, bags, edges }
    }

    /// Number of graph vertices the decomposition is over.
    pub fn n_vertices(&self) -> usize {
        self.n
    }

    pub fn bags(&self) -> &[Vec<usize>] {
        &self.bags
    }

    pub fn tree_edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn width(&self) -> usize {
        self.max_bag_size().saturating_sub(1)
    }

    pub fn max_bag_size(&self) -> usize {
        self.bags.iter().map(Vec::len).max().unwrap_or(0)
    }

    /// Merges every bag contained in a neighbouring bag into that neighbour.
    /// Validity and width are preserved.
    pub fn compressed(&self) -> TreeDecomposition {
        let mut bags: Vec<Option<Vec<usize>>> = self.bags.iter().cloned().map(Some).collect();
        let mut adj: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); bags.len()];
        for &(a, b) in &self.edges {
            if a != b && a < bags.len() && b < bags.len() {
                adj[a].insert(b);
                adj[b].insert(a);
            }
        }
        loop {
            let mut merged = false;
            for a in 0..bags.len() {
                let Some(bag) = bags[a].clone() else { continue };
                let target = adj[a].iter().copied().find(|&b| {
                    let other = bags[b].as_ref().expect("live neighbour");
                    bag.iter().all(|v| other.binary_search(v).is_ok())
                });
                if let Some(b) = target {
                    let others: Vec<usize> = adj[a].iter().copied().filter(|&c| c != b).collect();
                    for c in others {
                        adj[c].remove(&a);
                        adj[c].insert(b);
                        adj[b].insert(c);
                    }
                    adj[b].remove(&a);
                    adj[a].clear();
                    bags[a] = None;
                    merged = true;
                }
            }
            if !merged {
                break;
            }
        }
        let mut index = vec![usize::MAX; bags.len()];
        let mut out = Vec::new();
        for (i, b) in bags.iter().enumerate() {
            if let Some(b) = b {
                index[i] = out.len();
                out.push(b.clone());
            }
        }
        let mut edges = Vec::new();
        for (a, ns) in adj.iter().enumerate() {
            for &b in ns {
                if a < b {
                    edges.push((index[a], index[b]));
                }
            }
        }
        edges.sort_unstable();
        TreeDecomposition::new(self.n, out, edges)
    }

    /// PACE `.td` text. Comment lines are emitted first, each prefixed
    /// with `c `.
    pub fn to_td_string(&self, comments: &[String]) -> String {
        let mut out = String::new();
        for c in comments {
            writeln!(out, "c {c}").unwrap();
        }
        writeln!(out, "s td {} {} {}", self.bags.len(), self.max_bag_size(), self.n).unwrap();
        for (i, bag) in self.bags.iter().enumerate() {
            write!(out, "b {}", i + 1).unwrap();
            for v in bag {
                write!(out, " {}", v + 1).unwrap();
            }
            out.push('\n');
        }
        for &(a, b) in &self.edges {
            writeln!(out, "{} {}", a + 1, b + 1).unwrap();
        }
        out
    }
}

/// Comment payloads (text after `c `) of a PACE file, in order.
pub fn read_comments(text: &str) -> Vec<String> {
    text.lines()
        .filter_map(|l| {
            let t = l.trim_start();
            if t == "c" {
                Some(String::new())
            } else {
                t.strip_prefix("c ").map(|s| s.trim().to_string())
            }
        })
        .collect()
}

/// Parses PACE `.td` text.
pub fn read_td(text: &str) -> Result<TreeDecomposition> {
    let mut header: Option<(usize, usize, usize)> = None;
    let mut bags: Vec<Option<Vec<usize>>> = Vec::new();
    let mut edges = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let lineno = i + 1;
        let toks: Vec<&str> = line.split_whitespace().collect();
        let Some(&first) = toks.first() else { continue };
        match first {
            "c" => continue,
            "s" => {
                if header.is_some() {
                    return Err(parse_err(lineno, "duplicate solution line"));
                }
                if toks.len() != 5 || toks[1] != "td" {
                    return Err(parse_err(lineno, "expected 's td <bags> <max_bag> <n>'"));
                }
                let nb = num(toks[2], lineno)?;
                header = Some((nb, num(toks[3], lineno)?, num(toks[4], lineno)?));
                bags = vec![None; nb];
            }
            "b" => {
                let (nb, _, n) = header.ok_or_else(|| parse_err(lineno, "bag line before solution line"))?;
                let id = num(toks.get(1).copied().unwrap_or(""), lineno)?;
                if id == 0 || id > nb {
                    return Err(parse_err(lineno, format!("bag id {id} out of range 1..={nb}")));
                }
                if bags[id - 1].is_some() {
                    return Err(parse_err(lineno, format!("bag {id} listed twice")));
                }
                let mut bag = Vec::with_capacity(toks.len() - 2);
                for t in &toks[2..] {
                    let v = num(t, lineno)?;
                    if v == 0 || v > n {
                        return Err(parse_err(lineno, format!("vertex {v} out of range 1..={n}")));
                    }
                    bag.push(v - 1);
                }
                bags[id - 1] = Some(bag);
            }
            _ => {
                let (nb, _, _) = header.ok_or_else(|| parse_err(lineno, "tree edge before solution line"))?;
                if toks.len() != 2 {
                    return Err(parse_err(lineno, "expected '<bag> <bag>'"));
                }
                let a = num(toks[0], lineno)?;
                let b = num(toks[1], lineno)?;
                for x in [a, b] {
                    if x == 0 || x > nb {
                        return Err(parse_err(lineno, format!("bag id {x} out of range 1..={nb}")));
                    }
                }
                edges.push((a - 1, b - 1));
            }
        }
    }
    let (_, max_bag, n) = header.ok_or_else(|| parse_err(0, "missing solution line"))?;
    let last = text.lines().count();
    let mut out = Vec::with_capacity(bags.len());
    for (i, b) in bags.into_iter().enumerate() {
        out.push(b.ok_or_else(|| parse_err(last, format!("bag {} missing", i + 1)))?);
    }
    let td = TreeDecomposition::new(n, out, edges);
    if td.max_bag_size() != max_bag {
        return Err(parse_err(
            last,
            format!(
                "solution line announces max bag size {max_bag}, bags have {}",
                td.max_bag_size()
            ),
        ));
    }
    Ok(td)
}

fn num(tok: &str, lineno: usize) -> Result<usize> {
    tok.parse()
        .map_err(|_| parse_err(lineno, format!("invalid number '{tok}'")))
}

/// First failed check of [`validate_td`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Violation {
    /// The decomposition is over a different vertex count than the graph.
    VertexCount {
        graph: usize,
        decomposition: usize,
    },
    BagVertexOutOfRange {
        bag: usize,
        vertex: usize,
    },
    NotATree(String),
    /// Condition 1: a vertex appears in no bag.
    MissingVertex(usize),
    /// Condition 2: an edge lies in no bag.
    UncoveredEdge(usize, usize),
    /// Condition 3: the bags holding a vertex do not induce a subtree.
    DisconnectedVertex(usize),
}

impl Violation {
    /// Numbered tree-decomposition condition, when the failure is one.
    pub fn condition(&self) -> Option<u8> {
        match self {
            Violation::MissingVertex(_) => Some(1),
            Violation::UncoveredEdge(..) => Some(2),
            Violation::DisconnectedVertex(_) => Some(3),
            _ => None,
        }
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::VertexCount { graph, decomposition } => {
                write!(f, "decomposition covers {decomposition} vertices, graph has {graph}")
            }
            Violation::BagVertexOutOfRange { bag, vertex } => {
                write!(f, "bag {bag} holds unknown vertex {vertex}")
            }
            Violation::NotATree(why) => write!(f, "bag graph is not a tree: {why}"),
            Violation::MissingVertex(v) => write!(f, "condition 1: vertex {v} is in no bag"),
            Violation::UncoveredEdge(u, v) => {
                write!(f, "condition 2: edge ({u}, {v}) is in no bag")
            }
            Violation::DisconnectedVertex(v) => {
                write!(f, "condition 3: bags containing vertex {v} are disconnected")
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ValidationReport {
    pub violation: Option<Violation>,
    pub width: usize,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violation.is_none()
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.violation {
            None => write!(f, "valid (width {})", self.width),
            Some(v) => write!(f, "{v}"),
        }
    }
}

/// Checks tree-ness and the three decomposition conditions, stopping at the
/// first failure.
pub fn validate_td(g: &Graph, td: &TreeDecomposition) -> ValidationReport {
    let report = |violation| ValidationReport {
        violation: Some(violation),
        width: td.width(),
    };
    let n = g.n();
    if td.n_vertices() != n {
        return report(Violation::VertexCount {
            graph: n,
            decomposition: td.n_vertices(),
        });
    }
    for (i, bag) in td.bags().iter().enumerate() {
        if let Some(&v) = bag.iter().find(|&&v| v >= n) {
            return report(Violation::BagVertexOutOfRange { bag: i, vertex: v });
        }
    }
    let nb = td.bags().len();
    let mut tree = vec![Vec::new(); nb];
    for &(a, b) in td.tree_edges() {
        if a >= nb || b >= nb {
            return report(Violation::NotATree(format!("edge ({a}, {b}) names a missing bag")));
        }
        if a == b {
            return report(Violation::NotATree(format!("loop at bag {a}")));
        }
        tree[a].push(b);
        tree[b].push(a);
    }
    if nb > 0 {
        if td.tree_edges().len() != nb - 1 {
            return report(Violation::NotATree(format!(
                "{} edges on {nb} bags",
                td.tree_edges().len()
            )));
        }
        let mut seen = vec![false; nb];
        let mut stack = vec![0];
        seen[0] = true;
        let mut count = 1;
        while let Some(x) = stack.pop() {
            for &y in &tree[x] {
                if !seen[y] {
                    seen[y] = true;
                    count += 1;
                    stack.push(y);
                }
            }
        }
        if count != nb {
            return report(Violation::NotATree("bag graph is disconnected".into()));
        }
    }
    let mut holders: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (i, bag) in td.bags().iter().enumerate() {
        for &v in bag {
            holders[v].push(i);
        }
    }
    if let Some(v) = (0..n).find(|&v| holders[v].is_empty()) {
        return report(Violation::MissingVertex(v));
    }
    for (u, v) in g.edges() {
        let covered = holders[u].iter().any(|&b| td.bags()[b].binary_search(&v).is_ok());
        if !covered {
            return report(Violation::UncoveredEdge(u, v));
        }
    }
    let mut in_set = vec![false; nb];
    for v in 0..n {
        for &b in &holders[v] {
            in_set[b] = true;
        }
        let mut stack = vec![holders[v][0]];
        let mut seen = vec![holders[v][0]];
        while let Some(x) = stack.pop() {
            for &y in &tree[x] {
                if in_set[y] && !seen.contains(&y) {
                    seen.push(y);
                    stack.push(y);
                }
            }
        }
        let connected = seen.len() == holders[v].len();
        for &b in &holders[v] {
            in_set[b] = false;
        }
        if !connected {
            return report(Violation::DisconnectedVertex(v));
        }
    }
    ValidationReport {
        violation: None,
        width: td.width(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn path_td() -> TreeDecomposition {
        TreeDecomposition::new(4, vec![vec![0, 1], vec![1, 2], vec![2, 3]], vec![(0, 1), (1, 2)])
    }

    #[test]
    fn valid_path_decomposition() {
        let r = validate_td(&Graph::path(4), &path_td());
        assert!(r.is_valid(), "{r}");
        assert_eq!(r.width, 1);
    }

    #[test]
    fn reports_each_condition() {
        let g = Graph::path(4);
        let td = TreeDecomposition::new(4, vec![vec![0, 1], vec![2], vec![2, 3]], vec![(0, 1), (1, 2)]);
        let r = validate_td(&g, &td);
        assert_eq!(r.violation, Some(Violation::UncoveredEdge(1, 2)));
        assert_eq!(r.violation.unwrap().condition(), Some(2));

        let td = TreeDecomposition::new(4, vec![vec![0, 1], vec![1, 2]], vec![(0, 1)]);
        assert_eq!(validate_td(&g, &td).violation, Some(Violation::MissingVertex(3)));

        let td = TreeDecomposition::new(4, vec![vec![0, 1, 3], vec![1, 2], vec![2, 3]], vec![(0, 1), (1, 2)]);
        assert_eq!(validate_td(&g, &td).violation, Some(Violation::DisconnectedVertex(3)));

        let td = TreeDecomposition::new(4, vec![vec![0, 1], vec![1, 2], vec![2, 3]], vec![(0, 1)]);
        assert!(matches!(validate_td(&g, &td).violation, Some(Violation::NotATree(_))));
    }

    #[test]
    fn td_text_round_trip() {
        let td = path_td();
        let text = td.to_td_string(&["instance abc".to_string()]);
        assert_eq!(
            text,
            "c instance abc\ns td 3 2 4\nb 1 1 2\nb 2 2 3\nb 3 3 4\n1 2\n2 3\n"
        );
        assert_eq!(read_td(&text).unwrap(), td);
        assert_eq!(read_comments(&text), vec!["instance abc".to_string()]);
    }

    #[test]
    fn td_parse_errors() {
        assert!(read_td("s td 1 1 1\ns td 1 1 1\nb 1 1\n").is_err());
        assert!(read_td("s td 1 1 1\nb 1 2\n").is_err());
        assert!(read_td("s td 2 1 2\nb 1 1\n").is_err());
        assert!(read_td("s td 1 2 1\nb 1 1\n").is_err());
    }

    #[test]
    fn compression_keeps_validity() {
        let g = Graph::path(3);
        let td = TreeDecomposition::new(
            3,
            vec![vec![0], vec![0, 1], vec![1, 2], vec![2]],
            vec![(0, 1), (1, 2), (2, 3)],
        );
        let c = td.compressed();
        assert_eq!(c.bags().len(), 2);
        assert!(validate_td(&g, &c).is_valid());
    }
}
