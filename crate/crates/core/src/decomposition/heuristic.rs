use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use super::eo::EliminationOrdering;
use super::work::Work;
use crate::graph::Graph;
use crate::rng;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Heuristic {
    MinFill,
    MinDegree,
}

impl Heuristic {
    pub fn name(self) -> &'static str {
        match self {
            Heuristic::MinFill => "min-fill",
            Heuristic::MinDegree => "min-degree",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LowerBound {
    Degeneracy,
    MinorMinWidth,
}

/// Greedy elimination ordering. Ties on the score are broken by a priority
/// permutation drawn from `seed`, so different seeds explore different ties.
pub fn heuristic_order(g: &Graph, strategy: Heuristic, seed: u64) -> EliminationOrdering {
    let n = g.n();
    let mut priority: Vec<usize> = (0..n).collect();
    priority.shuffle(&mut rng::seeded(seed));
    let mut w = Work::new(g);
    let mut order = Vec::with_capacity(n);
    for _ in 0..n {
        let v = (0..n)
            .filter(|&v| w.alive[v])
            .min_by_key(|&v| {
                let score = match strategy {
                    Heuristic::MinFill => w.fill(v),
                    Heuristic::MinDegree => w.adj[v].len(),
                };
                (score, priority[v])
            })
            .expect("vertices remain");
        w.eliminate(v);
        order.push(v);
    }
    EliminationOrdering::new(order).expect("greedy order is a permutation")
}

/// Lower bound on the treewidth of `g`.
pub fn lower_bound(g: &Graph, method: LowerBound) -> usize {
    let mut w = Work::new(g);
    let mut lb = 0;
    while let Some(v) = w.min_degree_vertex() {
        let d = w.adj[v].len();
        lb = lb.max(d);
        match method {
            LowerBound::Degeneracy => w.remove(v),
            LowerBound::MinorMinWidth => match w.adj[v].iter().copied().min_by_key(|&u| (w.adj[u].len(), u)) {
                Some(u) => w.contract(v, u),
                None => w.remove(v),
            },
        }
    }
    lb
}
