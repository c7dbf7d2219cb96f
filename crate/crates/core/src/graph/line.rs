use std::collections::BTreeMap;

use super::network::{TensorNetwork, WireId};
use super::Graph;
use crate::error::{Error, Result};

/// Line graph of a network together with the vertex → wire bijection.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LineGraphMap {
    pub line_graph: Graph,
    pub wire_of_vertex: Vec<WireId>,
}

impl LineGraphMap {
    /// Line-graph vertex of a wire, if the wire is present.
    pub fn vertex_of_wire(&self, id: WireId) -> Option<usize> {
        self.wire_of_vertex.iter().position(|&w| w == id)
    }
}

/// One line-graph vertex per wire, in wire order; two wires are adjacent
/// when they share an endpoint. Open legs are ignored.
pub fn line_graph(net: &TensorNetwork) -> Result<LineGraphMap> {
    if net.n_wires() == 0 {
        return Err(Error::NoWires);
    }
    let mut g = Graph::new(net.n_wires());
    for incident in net.incidence() {
        for (i, &a) in incident.iter().enumerate() {
            for &b in &incident[i + 1..] {
                g.add_edge(a, b).expect("distinct wire indices");
            }
        }
    }
    Ok(LineGraphMap {
        line_graph: g,
        wire_of_vertex: net.wires().iter().map(|w| w.id).collect(),
    })
}

/// Simple graph underlying a network plus what was collapsed on the way.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SimpleView {
    pub graph: Graph,
    /// Wire multiplicity per edge `(u, v)` with `u < v`.
    pub multiplicity: BTreeMap<(usize, usize), usize>,
    pub dropped_loops: Vec<WireId>,
}

impl SimpleView {
    pub fn has_parallel_wires(&self) -> bool {
        self.multiplicity.values().any(|&m| m > 1)
    }
}

pub fn to_simple(net: &TensorNetwork) -> SimpleView {
    let mut graph = Graph::new(net.n_vertices());
    let mut multiplicity = BTreeMap::new();
    let mut dropped_loops = Vec::new();
    for w in net.wires() {
        if w.is_loop() {
            dropped_loops.push(w.id);
            continue;
        }
        let key = (w.u.min(w.v), w.u.max(w.v));
        graph.add_edge(key.0, key.1).expect("wire endpoints exist");
        *multiplicity.entry(key).or_insert(0) += 1;
    }
    SimpleView {
        graph,
        multiplicity,
        dropped_loops,
    }
}
