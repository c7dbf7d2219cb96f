use std::fmt::Write;

use super::Graph;
use crate::error::{parse_err, Result};

/// Parses PACE `.gr` text. Comment lines start with `c`; exactly one
/// `p tw <n> <m>` line must precede the `m` edge lines.
pub fn read_gr(text: &str) -> Result<Graph> {
    let mut graph: Option<Graph> = None;
    let mut expected = 0usize;
    let mut seen = 0usize;
    for (i, line) in text.lines().enumerate() {
        let lineno = i + 1;
        let mut tok = line.split_whitespace();
        let Some(first) = tok.next() else { continue };
        if first == "c" {
            continue;
        }
        if first == "p" {
            if graph.is_some() {
                return Err(parse_err(lineno, "duplicate problem line"));
            }
            if tok.next() != Some("tw") {
                return Err(parse_err(lineno, "expected 'p tw <n> <m>'"));
            }
            let n = number(tok.next(), lineno, "vertex count")?;
            expected = number(tok.next(), lineno, "edge count")?;
            if tok.next().is_some() {
                return Err(parse_err(lineno, "trailing tokens on problem line"));
            }
            graph = Some(Graph::new(n));
            continue;
        }
        let g = graph
            .as_mut()
            .ok_or_else(|| parse_err(lineno, "edge line before problem line"))?;
        let u = number(Some(first), lineno, "endpoint")?;
        let v = number(tok.next(), lineno, "endpoint")?;
        if tok.next().is_some() {
            return Err(parse_err(lineno, "trailing tokens on edge line"));
        }
        let n = g.n();
        for x in [u, v] {
            if x == 0 || x > n {
                return Err(parse_err(lineno, format!("vertex {x} out of range 1..={n}")));
            }
        }
        if u == v {
            return Err(parse_err(lineno, format!("self-loop at vertex {u}")));
        }
        g.add_edge(u - 1, v - 1)?;
        seen += 1;
    }
    let g = graph.ok_or_else(|| parse_err(0, "missing problem line"))?;
    if seen != expected {
        return Err(parse_err(
            text.lines().count(),
            format!("header announces {expected} edges, found {seen}"),
        ));
    }
    Ok(g)
}

fn number(tok: Option<&str>, lineno: usize, what: &str) -> Result<usize> {
    let tok = tok.ok_or_else(|| parse_err(lineno, format!("missing {what}")))?;
    tok.parse()
        .map_err(|_| parse_err(lineno, format!("invalid {what} '{tok}'")))
}

/// Writes PACE `.gr`, edges `u < v` sorted lexicographically, 1-indexed.
pub fn write_gr(g: &Graph) -> String {
    let mut out = String::new();
    writeln!(out, "p tw {} {}", g.n(), g.m()).unwrap();
    for (u, v) in g.edges() {
        writeln!(out, "{} {}", u + 1, v + 1).unwrap();
    }
    out
}
