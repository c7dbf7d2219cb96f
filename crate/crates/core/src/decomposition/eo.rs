use serde::{Deserialize, Serialize};

use super::td::{validate_td, TreeDecomposition};
use crate::error::{Error, Result};
use crate::graph::Graph;

/// Vertex permutation `order[i]` = the i-th vertex eliminated.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct EliminationOrdering {
    order: Vec<usize>,
}

impl EliminationOrdering {
    pub fn new(order: Vec<usize>) -> Result<Self> {
        let n = order.len();
        let mut seen = vec![false; n];
        for &v in &order {
            if v >= n || seen[v] {
                return Err(Error::Contract(format!(
                    "elimination order is not a permutation of 0..{n} (vertex {v})"
                )));
            }
            seen[v] = true;
        }
        Ok(EliminationOrdering { order })
    }

    pub fn identity(n: usize) -> Self {
        EliminationOrdering {
            order: (0..n).collect(),
        }
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.order
    }

    pub fn into_vec(self) -> Vec<usize> {
        self.order
    }

    pub fn len(&self) -> usize {
        self.order.len()
    }

    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }

    /// `position()[v]` is the index at which `v` is eliminated.
    pub fn position(&self) -> Vec<usize> {
        let mut pos = vec![0; self.order.len()];
        for (i, &v) in self.order.iter().enumerate() {
            pos[v] = i;
        }
        pos
    }
}

fn check_len(g: &Graph, order: &EliminationOrdering) -> Result<()> {
    if order.len() != g.n() {
        return Err(Error::Contract(format!(
            "ordering has {} vertices, graph has {}",
            order.len(),
            g.n()
        )));
    }
    Ok(())
}

/// Width of an ordering and the fill-in graph it induces.
pub fn fill_in_width(g: &Graph, order: &EliminationOrdering) -> Result<(usize, Graph)> {
    check_len(g, order)?;
    let pos = order.position();
    let mut fill = g.clone();
    let mut width = 0;
    for &v in order.as_slice() {
        let higher: Vec<usize> = fill.neighbors(v).iter().copied().filter(|&u| pos[u] > pos[v]).collect();
        width = width.max(higher.len());
        for (i, &a) in higher.iter().enumerate() {
            for &b in &higher[i + 1..] {
                fill.add_edge(a, b)?;
            }
        }
    }
    Ok((width, fill))
}

/// Width only; cheaper than keeping the fill graph around for callers that
/// do not need it.
pub fn ordering_width(g: &Graph, order: &EliminationOrdering) -> Result<usize> {
    Ok(fill_in_width(g, order)?.0)
}

/// One bag per vertex: the vertex plus its higher fill-in neighbours. The
/// parent of a bag is the bag of its lowest-positioned higher neighbour;
/// parentless bags (one per component) are chained together.
pub fn eo_to_td(g: &Graph, order: &EliminationOrdering) -> Result<TreeDecomposition> {
    let (_, fill) = fill_in_width(g, order)?;
    let pos = order.position();
    let n = g.n();
    let mut bags = Vec::with_capacity(n);
    let mut edges = Vec::new();
    let mut roots = Vec::new();
    for (i, &v) in order.as_slice().iter().enumerate() {
        let higher: Vec<usize> = fill.neighbors(v).iter().copied().filter(|&u| pos[u] > i).collect();
        match higher.iter().map(|&u| pos[u]).min() {
            Some(p) => edges.push((i, p)),
            None => roots.push(i),
        }
        let mut bag = higher;
        bag.push(v);
        bags.push(bag);
    }
    for w in roots.windows(2) {
        edges.push((w[0], w[1]));
    }
    Ok(TreeDecomposition::new(n, bags, edges))
}

/// Leaf peeling: a vertex that sits in a leaf bag but not in the leaf's
/// neighbour occurs nowhere else, so it can be eliminated with all its
/// remaining neighbours inside that bag.
pub fn td_to_eo(g: &Graph, td: &TreeDecomposition) -> Result<EliminationOrdering> {
    let report = validate_td(g, td);
    if let Some(v) = report.violation {
        return Err(Error::InvalidDecomposition(v.to_string()));
    }
    let n = g.n();
    let nb = td.bags().len();
    let mut tree = vec![Vec::new(); nb];
    for &(a, b) in td.tree_edges() {
        tree[a].push(b);
        tree[b].push(a);
    }
    let mut degree: Vec<usize> = tree.iter().map(Vec::len).collect();
    let mut removed = vec![false; nb];
    let mut done = vec![false; n];
    let mut order = Vec::with_capacity(n);
    let mut leaves: Vec<usize> = (0..nb).filter(|&b| degree[b] <= 1).collect();
    leaves.reverse();
    let mut left = nb;
    while let Some(leaf) = leaves.pop() {
        if removed[leaf] {
            continue;
        }
        let parent = tree[leaf].iter().copied().find(|&p| !removed[p]);
        let keep: &[usize] = match parent {
            Some(p) if left > 1 => &td.bags()[p],
            _ => &[],
        };
        for &v in &td.bags()[leaf] {
            if !done[v] && keep.binary_search(&v).is_err() {
                done[v] = true;
                order.push(v);
            }
        }
        removed[leaf] = true;
        left -= 1;
        if let Some(p) = parent {
            degree[p] -= 1;
            if degree[p] <= 1 {
                leaves.push(p);
            }
        }
    }
    EliminationOrdering::new(order)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn clique_has_no_fill() {
        let g = Graph::complete(4);
        let (w, fill) = fill_in_width(&g, &EliminationOrdering::new(vec![2, 0, 3, 1]).unwrap()).unwrap();
        assert_eq!(w, 3);
        assert_eq!(fill, g);
    }

    #[test]
    fn cycle_gets_one_chord() {
        let g = Graph::cycle(4);
        let (w, fill) = fill_in_width(&g, &EliminationOrdering::identity(4)).unwrap();
        assert_eq!(w, 2);
        assert_eq!(fill.m(), 5);
        assert!(fill.has_edge(1, 3));
        let td = eo_to_td(&g, &EliminationOrdering::identity(4)).unwrap();
        assert!(validate_td(&g, &td).is_valid());
        assert_eq!(td.width(), 2);
    }

    #[test]
    fn path_natural_order() {
        let g = Graph::path(4);
        let (w, fill) = fill_in_width(&g, &EliminationOrdering::identity(4)).unwrap();
        assert_eq!(w, 1);
        assert_eq!(fill, g);
    }

    #[test]
    fn rejects_non_permutations() {
        assert!(EliminationOrdering::new(vec![0, 0, 1]).is_err());
        assert!(EliminationOrdering::new(vec![0, 3, 1]).is_err());
        let g = Graph::path(4);
        assert!(fill_in_width(&g, &EliminationOrdering::identity(3)).is_err());
    }

    #[test]
    fn single_bag_round_trip() {
        let g = Graph::complete(4);
        let td = TreeDecomposition::new(4, vec![vec![0, 1, 2, 3]], vec![]);
        let eo = td_to_eo(&g, &td).unwrap();
        assert_eq!(ordering_width(&g, &eo).unwrap(), 3);
    }

    #[test]
    fn disconnected_input_gets_one_tree() {
        let g = Graph::from_edges(5, [(0, 1), (2, 3)]).unwrap();
        let td = eo_to_td(&g, &EliminationOrdering::identity(5)).unwrap();
        assert!(validate_td(&g, &td).is_valid());
        let eo = td_to_eo(&g, &td).unwrap();
        assert!(ordering_width(&g, &eo).unwrap() <= 1);
    }

    #[test]
    fn invalid_td_is_rejected() {
        let g = Graph::path(3);
        let td = TreeDecomposition::new(3, vec![vec![0, 1], vec![2]], vec![(0, 1)]);
        let err = td_to_eo(&g, &td).unwrap_err();
        assert!(err.to_string().contains("condition 2"), "{err}");
    }
}
