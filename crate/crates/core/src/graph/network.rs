use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

/// Stable identifier of a wire or open leg. Wires and open legs share one
/// id namespace because tensor legs refer to both.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct WireId(pub u64);

impl fmt::Display for WireId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "w{}", self.0)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Role {
    Unitary,
    Isometry,
    Operator,
    State,
    Gate,
    Projector,
    Generic,
}

impl Role {
    pub fn as_str(self) -> &'static str {
        match self {
            Role::Unitary => "unitary",
            Role::Isometry => "isometry",
            Role::Operator => "operator",
            Role::State => "state",
            Role::Gate => "gate",
            Role::Projector => "projector",
            Role::Generic => "generic",
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct NetworkVertex {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub role: Option<Role>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rank: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Wire {
    pub id: WireId,
    pub u: usize,
    pub v: usize,
    pub dim: usize,
}

impl Wire {
    pub fn is_loop(&self) -> bool {
        self.u == self.v
    }

    pub fn other(&self, x: usize) -> usize {
        if self.u == x {
            self.v
        } else {
            self.u
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct OpenLeg {
    pub vertex: usize,
    pub id: WireId,
    #[serde(default = "default_dim")]
    pub dim: usize,
}

fn default_dim() -> usize {
    2
}

/// Labeled multigraph of tensors (vertices) joined by wires. Parallel wires
/// are allowed; self-loop wires only when explicitly enabled.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct TensorNetwork {
    vertices: Vec<NetworkVertex>,
    wires: Vec<Wire>,
    open_legs: Vec<OpenLeg>,
    allow_self_loops: bool,
    index: HashMap<WireId, usize>,
    next_id: u64,
}

#[derive(Serialize, Deserialize)]
struct JsonVertex {
    id: usize,
    #[serde(flatten)]
    vertex: NetworkVertex,
}

#[derive(Serialize, Deserialize)]
struct JsonWire {
    id: WireId,
    u: usize,
    v: usize,
    #[serde(default = "default_dim")]
    dim: usize,
}

#[derive(Serialize, Deserialize)]
struct JsonNetwork {
    vertices: Vec<JsonVertex>,
    wires: Vec<JsonWire>,
    #[serde(default)]
    open_legs: Vec<OpenLeg>,
}

impl TensorNetwork {
    pub fn new() -> Self {
        Self::default()
    }

    /// Network with `n` untagged vertices and one wire per edge of `g`.
    pub fn from_graph(g: &super::Graph) -> Self {
        let mut net = TensorNetwork::new();
        for _ in 0..g.n() {
            net.add_vertex(None);
        }
        for (u, v) in g.edges() {
            net.add_wire(u, v).expect("graph edges are valid wires");
        }
        net
    }

    pub fn allow_self_loops(&mut self, allow: bool) {
        self.allow_self_loops = allow;
    }

    pub fn add_vertex(&mut self, role: Option<Role>) -> usize {
        self.vertices.push(NetworkVertex {
            role,
            ..Default::default()
        });
        self.vertices.len() - 1
    }

    pub fn add_labeled_vertex(&mut self, role: Role, label: impl Into<String>) -> usize {
        self.vertices.push(NetworkVertex {
            role: Some(role),
            rank: None,
            label: Some(label.into()),
        });
        self.vertices.len() - 1
    }

    pub fn push_vertex(&mut self, vertex: NetworkVertex) -> usize {
        self.vertices.push(vertex);
        self.vertices.len() - 1
    }

    /// Sets every vertex's rank annotation to its current leg count.
    pub fn annotate_ranks(&mut self) {
        let mut legs = vec![0; self.vertices.len()];
        for w in &self.wires {
            legs[w.u] += 1;
            legs[w.v] += 1;
        }
        for l in &self.open_legs {
            legs[l.vertex] += 1;
        }
        for (vert, r) in self.vertices.iter_mut().zip(legs) {
            vert.rank = Some(r);
        }
    }

    pub fn set_rank(&mut self, v: usize, rank: usize) {
        self.vertices[v].rank = Some(rank);
    }

    /// Adds a dimension-2 wire with a fresh id.
    pub fn add_wire(&mut self, u: usize, v: usize) -> Result<WireId> {
        let id = WireId(self.next_id);
        self.add_wire_with(id, u, v, 2)?;
        Ok(id)
    }

    pub fn add_wire_with(&mut self, id: WireId, u: usize, v: usize, dim: usize) -> Result<()> {
        let n = self.vertices.len();
        if u >= n || v >= n {
            return Err(Error::Contract(format!(
                "wire {id} references missing vertex ({u}, {v})"
            )));
        }
        if u == v && !self.allow_self_loops {
            return Err(Error::Contract(format!("self-loop wire {id} at {u}")));
        }
        self.claim_id(id)?;
        self.index.insert(id, self.wires.len());
        self.wires.push(Wire { id, u, v, dim });
        Ok(())
    }

    pub fn add_open_leg(&mut self, vertex: usize, dim: usize) -> Result<WireId> {
        let id = WireId(self.next_id);
        self.add_open_leg_with(id, vertex, dim)?;
        Ok(id)
    }

    pub fn add_open_leg_with(&mut self, id: WireId, vertex: usize, dim: usize) -> Result<()> {
        if vertex >= self.vertices.len() {
            return Err(Error::Contract(format!("open leg {id} on missing vertex {vertex}")));
        }
        self.claim_id(id)?;
        self.open_legs.push(OpenLeg { vertex, id, dim });
        Ok(())
    }

    fn claim_id(&mut self, id: WireId) -> Result<()> {
        if self.index.contains_key(&id) || self.open_legs.iter().any(|l| l.id == id) {
            return Err(Error::Contract(format!("duplicate wire id {id}")));
        }
        self.next_id = self.next_id.max(id.0 + 1);
        Ok(())
    }

    pub fn n_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn n_wires(&self) -> usize {
        self.wires.len()
    }

    pub fn vertices(&self) -> &[NetworkVertex] {
        &self.vertices
    }

    pub fn vertex(&self, v: usize) -> &NetworkVertex {
        &self.vertices[v]
    }

    pub fn wires(&self) -> &[Wire] {
        &self.wires
    }

    pub fn open_legs(&self) -> &[OpenLeg] {
        &self.open_legs
    }

    pub fn wire(&self, id: WireId) -> Option<&Wire> {
        self.index.get(&id).map(|&i| &self.wires[i])
    }

    /// Position of a wire in [`TensorNetwork::wires`].
    pub fn wire_index(&self, id: WireId) -> Option<usize> {
        self.index.get(&id).copied()
    }

    /// Wire indices incident to each vertex (a self-loop is listed once).
    pub fn incidence(&self) -> Vec<Vec<usize>> {
        let mut inc = vec![Vec::new(); self.vertices.len()];
        for (i, w) in self.wires.iter().enumerate() {
            inc[w.u].push(i);
            if w.v != w.u {
                inc[w.v].push(i);
            }
        }
        inc
    }

    /// Number of wire ends plus open legs at `v`: the tensor's rank.
    pub fn leg_count(&self, v: usize) -> usize {
        let wires = self
            .wires
            .iter()
            .map(|w| (w.u == v) as usize + (w.v == v) as usize)
            .sum::<usize>();
        wires + self.open_legs.iter().filter(|l| l.vertex == v).count()
    }

    /// Checks the rank annotations against incident wire and open-leg counts.
    pub fn validate(&self) -> Result<()> {
        for (v, vert) in self.vertices.iter().enumerate() {
            if let Some(rank) = vert.rank {
                let legs = self.leg_count(v);
                if legs != rank {
                    return Err(Error::Contract(format!(
                        "vertex {v} annotated rank {rank} but has {legs} legs"
                    )));
                }
            }
        }
        Ok(())
    }

    /// Connected components over vertices (open legs ignored).
    pub fn components(&self) -> Vec<Vec<usize>> {
        self.simple_graph().components()
    }

    pub fn is_connected(&self) -> bool {
        self.simple_graph().is_connected()
    }

    fn simple_graph(&self) -> super::Graph {
        let mut g = super::Graph::new(self.vertices.len());
        for w in &self.wires {
            if !w.is_loop() {
                g.add_edge(w.u, w.v).expect("wires reference vertices");
            }
        }
        g
    }

    pub fn to_json_value(&self) -> serde_json::Value {
        let doc = JsonNetwork {
            vertices: self
                .vertices
                .iter()
                .enumerate()
                .map(|(id, v)| JsonVertex { id, vertex: v.clone() })
                .collect(),
            wires: self
                .wires
                .iter()
                .map(|w| JsonWire {
                    id: w.id,
                    u: w.u,
                    v: w.v,
                    dim: w.dim,
                })
                .collect(),
            open_legs: self.open_legs.clone(),
        };
        serde_json::to_value(doc).expect("network serializes")
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_json_value()).expect("network serializes")
    }

    /// Parses the edge-list JSON format. Vertex ids must be `0..n` (any
    /// order); self-loop wires are accepted and enable the loop flag.
    pub fn from_json(text: &str) -> Result<Self> {
        let value: serde_json::Value = serde_json::from_str(text)?;
        Self::from_json_value(&value)
    }

    pub fn from_json_value(value: &serde_json::Value) -> Result<Self> {
        let doc: JsonNetwork = serde_json::from_value(value.clone())?;
        let n = doc.vertices.len();
        let mut slots: Vec<Option<NetworkVertex>> = vec![None; n];
        for jv in doc.vertices {
            if jv.id >= n || slots[jv.id].is_some() {
                return Err(Error::Json(format!(
                    "vertex ids must be a permutation of 0..{n}, got {}",
                    jv.id
                )));
            }
            slots[jv.id] = Some(jv.vertex);
        }
        let mut net = TensorNetwork::new();
        net.vertices = slots.into_iter().map(|s| s.expect("checked")).collect();
        for w in doc.wires {
            if w.u == w.v {
                net.allow_self_loops = true;
            }
            net.add_wire_with(w.id, w.u, w.v, w.dim)?;
        }
        for l in doc.open_legs {
            net.add_open_leg_with(l.id, l.vertex, l.dim)?;
        }
        Ok(net)
    }

    /// Content hash of the structure (vertices, wires, open legs), hex
    /// encoded. Artifacts derived from a network carry it.
    pub fn hash(&self) -> String {
        let canonical = serde_json::to_string(&self.to_json_value()).expect("serializes");
        let digest = Sha256::digest(canonical.as_bytes());
        hex::encode(&digest[..16])
    }
}
