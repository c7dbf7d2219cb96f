use std::collections::BTreeSet;

use crate::graph::Graph;

/// Working graph with set adjacency for the greedy procedures.
pub(super) struct Work {
    pub adj: Vec<BTreeSet<usize>>,
    pub alive: Vec<bool>,
}

impl Work {
    pub fn new(g: &Graph) -> Self {
        Work {
            adj: (0..g.n()).map(|v| g.neighbors(v).iter().copied().collect()).collect(),
            alive: vec![true; g.n()],
        }
    }

    pub fn fill(&self, v: usize) -> usize {
        let ns: Vec<usize> = self.adj[v].iter().copied().collect();
        let mut missing = 0;
        for (i, &a) in ns.iter().enumerate() {
            for &b in &ns[i + 1..] {
                if !self.adj[a].contains(&b) {
                    missing += 1;
                }
            }
        }
        missing
    }

    pub fn eliminate(&mut self, v: usize) {
        let ns: Vec<usize> = std::mem::take(&mut self.adj[v]).into_iter().collect();
        for &a in &ns {
            self.adj[a].remove(&v);
            for &b in &ns {
                if a != b {
                    self.adj[a].insert(b);
                }
            }
        }
        self.alive[v] = false;
    }

    pub fn remove(&mut self, v: usize) {
        for a in std::mem::take(&mut self.adj[v]) {
            self.adj[a].remove(&v);
        }
        self.alive[v] = false;
    }

    /// Merges `v` into `u`.
    pub fn contract(&mut self, v: usize, u: usize) {
        for a in std::mem::take(&mut self.adj[v]) {
            self.adj[a].remove(&v);
            if a != u {
                self.adj[a].insert(u);
                self.adj[u].insert(a);
            }
        }
        self.alive[v] = false;
    }

    pub fn min_degree_vertex(&self) -> Option<usize> {
        (0..self.adj.len())
            .filter(|&v| self.alive[v])
            .min_by_key(|&v| (self.adj[v].len(), v))
    }

    /// Neighbourhood of `v` is a clique.
    pub fn is_simplicial(&self, v: usize) -> bool {
        self.clique_without(v, None)
    }

    /// All neighbours of `v` but one form a clique.
    pub fn is_almost_simplicial(&self, v: usize) -> bool {
        self.adj[v].iter().any(|&x| self.clique_without(v, Some(x)))
    }

    fn clique_without(&self, v: usize, skip: Option<usize>) -> bool {
        let ns: Vec<usize> = self.adj[v].iter().copied().filter(|&u| Some(u) != skip).collect();
        ns.iter()
            .enumerate()
            .all(|(i, &a)| ns[i + 1..].iter().all(|b| self.adj[a].contains(b)))
    }

    /// Graph induced on the given live vertices, relabelled by position.
    pub fn induced(&self, vertices: &[usize]) -> Graph {
        let mut index = vec![usize::MAX; self.adj.len()];
        for (i, &v) in vertices.iter().enumerate() {
            index[v] = i;
        }
        let mut g = Graph::new(vertices.len());
        for (i, &v) in vertices.iter().enumerate() {
            for &u in &self.adj[v] {
                if index[u] != usize::MAX && index[u] > i {
                    g.add_edge(i, index[u]).expect("distinct live vertices");
                }
            }
        }
        g
    }
}
