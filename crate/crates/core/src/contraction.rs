//! Contraction sequences, their complexity, and the conversion to and from
//! line-graph tree decompositions.
//!
//! Contracting wire `(u, v)` merges the groups holding `u` and `v`. The
//! degree of that step is the number of uncontracted wires touching the
//! merged group other than the contracted wire itself. Every wire left
//! inside the merged group (parallel siblings, self-loops) is consumed by
//! the same step. Under this rule the complexity of a wire order equals
//! the elimination width of the same order on the line graph.

use std::collections::BTreeSet;

use rustc_hash::FxHashMap;
use serde::{Deserialize, Serialize};

use crate::decomposition::{
    td_to_eo, treewidth_exact, EliminationOrdering, ExactOptions, TreeDecomposition, TreewidthSolution,
};
use crate::error::{Error, Result};
use crate::graph::{line_graph, LineGraphMap, TensorNetwork, WireId};

/// Largest network `brute_force_cc` accepts.
pub const MAX_BRUTE_FORCE_WIRES: usize = 9;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ContractionSequence {
    /// Hash of the source network.
    pub network: String,
    /// Wires in contraction order.
    pub steps: Vec<WireId>,
    /// Wires consumed by an earlier step, in consumption order.
    pub skipped: Vec<WireId>,
    pub complexity: usize,
    pub optimal: bool,
}

impl ContractionSequence {
    /// Builds a sequence from a wire order covering any subset of wires.
    /// Wires already consumed when their turn comes go to `skipped`.
    pub fn from_wire_order(net: &TensorNetwork, order: &[WireId]) -> Result<Self> {
        let eval = evaluate_steps(net, order)?;
        let steps = order
            .iter()
            .zip(&eval.degrees)
            .filter(|(_, d)| d.is_some())
            .map(|(w, _)| *w)
            .collect();
        Ok(ContractionSequence {
            network: net.hash(),
            steps,
            skipped: eval.consumed.into_iter().flatten().collect(),
            complexity: eval.complexity,
            optimal: false,
        })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("sequence serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }
}

/// Result of replaying a list of wires.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Evaluation {
    pub complexity: usize,
    /// Degree of each input step; `None` when the wire was already
    /// consumed.
    pub degrees: Vec<Option<usize>>,
    /// Siblings consumed by each input step (empty for no-op steps).
    pub consumed: Vec<Vec<WireId>>,
    /// Every wire was consumed, i.e. each component merged to one vertex.
    pub complete: bool,
}

/// Union-find over network vertices plus the uncontracted wires incident
/// to each group.
pub(crate) struct Merger<'a> {
    net: &'a TensorNetwork,
    parent: Vec<usize>,
    open: Vec<BTreeSet<usize>>,
    pub(crate) done: Vec<bool>,
    left: usize,
}

impl<'a> Merger<'a> {
    pub(crate) fn new(net: &'a TensorNetwork) -> Self {
        let mut open = vec![BTreeSet::new(); net.n_vertices()];
        for (i, w) in net.wires().iter().enumerate() {
            open[w.u].insert(i);
            open[w.v].insert(i);
        }
        Merger {
            net,
            parent: (0..net.n_vertices()).collect(),
            open,
            done: vec![false; net.n_wires()],
            left: net.n_wires(),
        }
    }

    pub(crate) fn root(&mut self, x: usize) -> usize {
        self.find(x)
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    /// Degree the contraction of wire `i` would have.
    pub(crate) fn degree(&mut self, i: usize) -> usize {
        let w = &self.net.wires()[i];
        let (a, b) = (self.find(w.u), self.find(w.v));
        if a == b {
            self.open[a].len() - 1
        } else {
            self.open[a].union(&self.open[b]).count() - 1
        }
    }

    /// Contracts wire `i`; returns the step degree and the consumed wire
    /// indices other than `i`. `None` if `i` was already consumed.
    pub(crate) fn contract(&mut self, i: usize) -> Option<(usize, Vec<usize>)> {
        if self.done[i] {
            return None;
        }
        let degree = self.degree(i);
        let w = &self.net.wires()[i];
        let (mut a, mut b) = (self.find(w.u), self.find(w.v));
        if a != b {
            if self.open[a].len() < self.open[b].len() {
                std::mem::swap(&mut a, &mut b);
            }
            self.parent[b] = a;
            let moved = std::mem::take(&mut self.open[b]);
            self.open[a].extend(moved);
        }
        let inside: Vec<usize> = self.open[a]
            .iter()
            .copied()
            .filter(|&j| {
                let wj = &self.net.wires()[j];
                let (x, y) = (wj.u, wj.v);
                let (fx, fy) = (self.find_ro(x), self.find_ro(y));
                fx == a && fy == a
            })
            .collect();
        let mut siblings = Vec::new();
        for j in inside {
            self.open[a].remove(&j);
            self.done[j] = true;
            self.left -= 1;
            if j != i {
                siblings.push(j);
            }
        }
        Some((degree, siblings))
    }

    fn find_ro(&self, mut x: usize) -> usize {
        while self.parent[x] != x {
            x = self.parent[x];
        }
        x
    }

    pub(crate) fn finished(&self) -> bool {
        self.left == 0
    }
}

/// Replays `steps` on `net`.
pub fn evaluate_steps(net: &TensorNetwork, steps: &[WireId]) -> Result<Evaluation> {
    let mut m = Merger::new(net);
    let mut out = Evaluation {
        complexity: 0,
        degrees: Vec::with_capacity(steps.len()),
        consumed: Vec::with_capacity(steps.len()),
        complete: false,
    };
    for &id in steps {
        let i = net
            .wire_index(id)
            .ok_or_else(|| Error::Contract(format!("wire {id} is not in the network")))?;
        match m.contract(i) {
            Some((d, siblings)) => {
                out.complexity = out.complexity.max(d);
                out.degrees.push(Some(d));
                out.consumed
                    .push(siblings.into_iter().map(|j| net.wires()[j].id).collect());
            }
            None => {
                out.degrees.push(None);
                out.consumed.push(Vec::new());
            }
        }
    }
    out.complete = m.finished();
    Ok(out)
}

/// Recomputes the complexity of `seq` on `net`. Incomplete sequences are
/// reported through `Evaluation::complete`.
pub fn evaluate_sequence(net: &TensorNetwork, seq: &ContractionSequence) -> Result<Evaluation> {
    evaluate_steps(net, &seq.steps)
}

/// Turns a tree decomposition of the line graph into a contraction
/// sequence of complexity at most its width.
pub fn td_to_sequence(net: &TensorNetwork, td: &TreeDecomposition, map: &LineGraphMap) -> Result<ContractionSequence> {
    let eo = td_to_eo(&map.line_graph, td)?;
    let order: Vec<WireId> = eo.as_slice().iter().map(|&v| map.wire_of_vertex[v]).collect();
    ContractionSequence::from_wire_order(net, &order)
}

/// Line-graph elimination ordering following `seq`: each contracted wire,
/// then the siblings its step consumed. Wires the sequence never reaches
/// go last.
pub fn sequence_to_eo(
    net: &TensorNetwork,
    seq: &ContractionSequence,
    map: &LineGraphMap,
) -> Result<EliminationOrdering> {
    let eval = evaluate_sequence(net, seq)?;
    let vertex = |id: WireId| {
        map.vertex_of_wire(id)
            .ok_or_else(|| Error::Contract(format!("wire {id} is not in the line graph")))
    };
    let mut order = Vec::with_capacity(map.line_graph.n());
    let mut placed = vec![false; map.line_graph.n()];
    for (k, &id) in seq.steps.iter().enumerate() {
        if eval.degrees[k].is_none() {
            continue;
        }
        for w in std::iter::once(id).chain(eval.consumed[k].iter().copied()) {
            let v = vertex(w)?;
            if !placed[v] {
                placed[v] = true;
                order.push(v);
            }
        }
    }
    order.extend((0..placed.len()).filter(|&v| !placed[v]));
    EliminationOrdering::new(order)
}

/// Exact contraction complexity with its witness sequence.
#[derive(Clone, Debug)]
pub struct OptimalCc {
    pub sequence: ContractionSequence,
    /// Proven lower bound; equals the complexity when optimal.
    pub lower_bound: usize,
    pub treewidth: TreewidthSolution,
}

impl OptimalCc {
    pub fn is_optimal(&self) -> bool {
        self.sequence.optimal
    }
}

/// Exact contraction complexity as the treewidth of the line graph. On
/// timeout the sequence carries the best upper bound and `optimal` is false.
pub fn optimal_cc(net: &TensorNetwork, opts: &ExactOptions) -> Result<OptimalCc> {
    let map = line_graph(net)?;
    let outcome = treewidth_exact(&map.line_graph, opts)?;
    let optimal = outcome.is_optimal();
    let tw = outcome.into_solution();
    let mut sequence = td_to_sequence(net, &tw.decomposition, &map)?;
    debug_assert!(sequence.complexity <= tw.width);
    sequence.optimal = optimal;
    Ok(OptimalCc {
        sequence,
        lower_bound: tw.lower_bound,
        treewidth: tw,
    })
}

/// Minimum complexity over all wire orders, by exhaustive search with
/// memoization on the set of consumed wires.
pub fn brute_force_cc(net: &TensorNetwork) -> Result<usize> {
    let m = net.n_wires();
    if m == 0 {
        return Err(Error::NoWires);
    }
    if m > MAX_BRUTE_FORCE_WIRES {
        return Err(Error::Refused(format!(
            "brute force is limited to {MAX_BRUTE_FORCE_WIRES} wires, network has {m}"
        )));
    }
    let full = (1u32 << m) - 1;
    let mut memo = FxHashMap::default();
    Ok(best_from(net, 0, full, &mut memo))
}

fn replay(net: &TensorNetwork, consumed: u32) -> Merger<'_> {
    let mut mg = Merger::new(net);
    // any order of the consumed wires reproduces the same groups
    for i in 0..net.n_wires() {
        if consumed >> i & 1 == 1 {
            mg.contract(i);
        }
    }
    mg
}

fn best_from(net: &TensorNetwork, consumed: u32, full: u32, memo: &mut FxHashMap<u32, usize>) -> usize {
    if consumed == full {
        return 0;
    }
    if let Some(&v) = memo.get(&consumed) {
        return v;
    }
    let mut best = usize::MAX;
    for i in 0..net.n_wires() {
        if consumed >> i & 1 == 1 {
            continue;
        }
        let mut mg = replay(net, consumed);
        let (d, siblings) = mg.contract(i).expect("wire is open");
        if d >= best {
            continue;
        }
        let mut next = consumed | 1 << i;
        for j in siblings {
            next |= 1 << j;
        }
        best = best.min(d.max(best_from(net, next, full, memo)));
    }
    memo.insert(consumed, best);
    best
}
