//! Canonical labels of vertex-colored simple graphs by color refinement
//! and individualization, with automorphism pruning.

use crate::graph::{to_simple, Graph, Role, TensorNetwork};

fn role_code(role: Option<Role>) -> u32 {
    match role {
        None => 0,
        Some(Role::Unitary) => 1,
        Some(Role::Isometry) => 2,
        Some(Role::Operator) => 3,
        Some(Role::State) => 4,
        Some(Role::Gate) => 5,
        Some(Role::Projector) => 6,
        Some(Role::Generic) => 7,
    }
}

/// Relabels `keys` to dense ranks in sorted key order.
fn ranks<K: Ord + Clone>(keys: &[K]) -> (Vec<u32>, usize) {
    let mut sorted: Vec<K> = keys.to_vec();
    sorted.sort();
    sorted.dedup();
    let out = keys
        .iter()
        .map(|k| sorted.binary_search(k).expect("key present") as u32)
        .collect();
    (out, sorted.len())
}

fn refine(g: &Graph, mut colors: Vec<u32>) -> Vec<u32> {
    let mut count = {
        let mut c = colors.clone();
        c.sort_unstable();
        c.dedup();
        c.len()
    };
    loop {
        let sigs: Vec<(u32, Vec<u32>)> = (0..g.n())
            .map(|v| {
                let mut ns: Vec<u32> = g.neighbors(v).iter().map(|&u| colors[u]).collect();
                ns.sort_unstable();
                (colors[v], ns)
            })
            .collect();
        let (next, c) = ranks(&sigs);
        colors = next;
        if c == count {
            return colors;
        }
        count = c;
    }
}

fn is_discrete(colors: &[u32]) -> bool {
    let mut seen = vec![false; colors.len()];
    colors.iter().all(|&c| !std::mem::replace(&mut seen[c as usize], true))
}

struct Canon<'a> {
    g: &'a Graph,
    labels: &'a [u32],
    best: Option<(Vec<u32>, Vec<u32>)>,
    autos: Vec<Vec<usize>>,
}

impl Canon<'_> {
    fn encode(&self, pos: &[u32]) -> Vec<u32> {
        let n = pos.len();
        let mut at = vec![0; n];
        for (v, &p) in pos.iter().enumerate() {
            at[p as usize] = v;
        }
        let mut code: Vec<u32> = at.iter().map(|&v| self.labels[v]).collect();
        let mut edges: Vec<(u32, u32)> = self
            .g
            .edges()
            .map(|(u, v)| {
                let (a, b) = (pos[u], pos[v]);
                (a.min(b), a.max(b))
            })
            .collect();
        edges.sort_unstable();
        for (a, b) in edges {
            code.push(a);
            code.push(b);
        }
        code
    }

    fn search(&mut self, colors: Vec<u32>, path: &mut Vec<usize>) {
        if is_discrete(&colors) {
            let code = self.encode(&colors);
            match &self.best {
                None => self.best = Some((code, colors)),
                Some((best, best_pos)) => {
                    if code == *best {
                        let n = colors.len();
                        let mut at = vec![0; n];
                        for (v, &p) in best_pos.iter().enumerate() {
                            at[p as usize] = v;
                        }
                        self.autos.push((0..n).map(|v| at[colors[v] as usize]).collect());
                    } else if code < *best {
                        self.best = Some((code, colors));
                    }
                }
            }
            return;
        }
        let mut size = vec![0usize; colors.len()];
        for &c in &colors {
            size[c as usize] += 1;
        }
        let target = (0..size.len()).find(|&c| size[c] > 1).expect("non-discrete partition") as u32;
        let cell: Vec<usize> = (0..colors.len()).filter(|&v| colors[v] == target).collect();
        let mut tried: Vec<usize> = Vec::new();
        for &v in &cell {
            if !tried.is_empty() && self.same_orbit(path, &tried, v) {
                continue;
            }
            tried.push(v);
            let child = colors
                .iter()
                .enumerate()
                .map(|(u, &c)| 2 * c + u32::from(u != v))
                .collect();
            path.push(v);
            self.search(refine(self.g, child), path);
            path.pop();
        }
    }

    /// Is `v` in the orbit of a tried vertex under the automorphisms found
    /// so far that fix `path` pointwise?
    fn same_orbit(&self, path: &[usize], tried: &[usize], v: usize) -> bool {
        let n = self.g.n();
        let mut parent: Vec<usize> = (0..n).collect();
        fn find(p: &mut [usize], mut x: usize) -> usize {
            while p[x] != x {
                p[x] = p[p[x]];
                x = p[x];
            }
            x
        }
        let mut any = false;
        for a in &self.autos {
            if path.iter().any(|&x| a[x] != x) {
                continue;
            }
            any = true;
            for x in 0..n {
                let (rx, ry) = (find(&mut parent, x), find(&mut parent, a[x]));
                if rx != ry {
                    parent[rx] = ry;
                }
            }
        }
        if !any {
            return false;
        }
        let rv = find(&mut parent, v);
        tried.iter().any(|&u| find(&mut parent, u) == rv)
    }
}

/// Canonical labeling of `g` with vertex labels: the code string and the
/// canonical position of every vertex.
pub fn canonical_labeling(g: &Graph, labels: &[u32]) -> (String, Vec<usize>) {
    assert_eq!(labels.len(), g.n(), "one label per vertex");
    let init: Vec<(u32, usize)> = (0..g.n()).map(|v| (labels[v], g.degree(v))).collect();
    let colors = refine(g, ranks(&init).0);
    let mut canon = Canon {
        g,
        labels,
        best: None,
        autos: Vec::new(),
    };
    if g.n() > 0 {
        canon.search(colors, &mut Vec::new());
    }
    let (code, pos) = canon.best.unwrap_or_default();
    let n = g.n();
    let labels: Vec<String> = code[..n].iter().map(u32::to_string).collect();
    let edges: Vec<String> = code[n..].chunks(2).map(|e| format!("{}-{}", e[0], e[1])).collect();
    let text = format!("{n}|{}|{}", labels.join(","), edges.join(","));
    (text, pos.into_iter().map(|p| p as usize).collect())
}

fn colored(net: &TensorNetwork) -> (Graph, Vec<u32>) {
    let g = to_simple(net).graph;
    let labels = net.vertices().iter().map(|v| role_code(v.role)).collect();
    (g, labels)
}

/// Label shared exactly by networks whose role-colored simple graphs are
/// isomorphic.
pub fn canonical_form(net: &TensorNetwork) -> String {
    let (g, labels) = colored(net);
    canonical_labeling(&g, &labels).0
}

/// A role-preserving isomorphism of the underlying simple graphs, as the
/// image in `b` of every vertex of `a`.
pub fn network_isomorphism(a: &TensorNetwork, b: &TensorNetwork) -> Option<Vec<usize>> {
    let (ga, la) = colored(a);
    let (gb, lb) = colored(b);
    let (ca, pa) = canonical_labeling(&ga, &la);
    let (cb, pb) = canonical_labeling(&gb, &lb);
    if ca != cb {
        return None;
    }
    let mut at_b = vec![0; pb.len()];
    for (v, &p) in pb.iter().enumerate() {
        at_b[p] = v;
    }
    Some(pa.iter().map(|&p| at_b[p]).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::seq::SliceRandom;

    fn relabel(g: &Graph, perm: &[usize]) -> Graph {
        let mut h = Graph::new(g.n());
        for (u, v) in g.edges() {
            h.add_edge(perm[u], perm[v]).unwrap();
        }
        h
    }

    #[test]
    fn path_and_triangle_differ() {
        let p3 = TensorNetwork::from_graph(&Graph::path(3));
        let k3 = TensorNetwork::from_graph(&Graph::complete(3));
        assert_ne!(canonical_form(&p3), canonical_form(&k3));
    }

    #[test]
    fn invariant_under_relabeling() {
        let mut rng = crate::rng::seeded(3);
        for g in [Graph::grid(3, 4), Graph::cycle(9), Graph::complete(5)] {
            let labels = vec![0; g.n()];
            let base = canonical_labeling(&g, &labels).0;
            for _ in 0..10 {
                let mut perm: Vec<usize> = (0..g.n()).collect();
                perm.shuffle(&mut rng);
                assert_eq!(canonical_labeling(&relabel(&g, &perm), &labels).0, base);
            }
        }
    }

    #[test]
    fn colors_matter() {
        let g = Graph::path(3);
        let a = canonical_labeling(&g, &[1, 0, 0]).0;
        let b = canonical_labeling(&g, &[0, 1, 0]).0;
        let c = canonical_labeling(&g, &[0, 0, 1]).0;
        assert_ne!(a, b);
        assert_eq!(a, c);
    }

    #[test]
    fn isomorphism_witness_maps_edges() {
        let g = Graph::grid(3, 3);
        let perm = [4, 0, 8, 2, 6, 1, 3, 5, 7];
        let a = TensorNetwork::from_graph(&g);
        let b = TensorNetwork::from_graph(&relabel(&g, &perm));
        let iso = network_isomorphism(&a, &b).unwrap();
        let gb = relabel(&g, &perm);
        for (u, v) in g.edges() {
            assert!(gb.has_edge(iso[u], iso[v]));
        }
    }
}
