use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};

use super::canon::canonical_form;
use crate::error::{Error, Result};
use crate::graph::{Role, TensorNetwork};

/// Binary (1D) or 4:1 (2D) MERA with one or two operators.
///
/// The lattice is periodic with `2 * 2^levels` sites per axis. Each
/// coarsening applies unitaries on blocks at even coordinates, then k:1
/// isometries on blocks shifted by one site, until `2^d` sites remain;
/// these are joined by one interface tensor. Operators sit in the corner
/// `[0, 2^levels)^d`, which holds `k^levels` placements.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MeraSpec {
    pub d: usize,
    pub k: usize,
    pub levels: usize,
    /// Operator coordinates, `d` entries each.
    pub operators: Vec<Vec<usize>>,
    pub top_connection: bool,
}

impl MeraSpec {
    pub fn new(d: usize, levels: usize, operators: Vec<Vec<usize>>) -> Self {
        MeraSpec {
            d,
            k: 1 << d,
            levels,
            operators,
            top_connection: true,
        }
    }

    /// Operator placements per axis.
    pub fn placement_side(&self) -> usize {
        1 << self.levels
    }

    fn lattice_side(&self) -> usize {
        2 << self.levels
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Parameter(m));
        if !(1..=2).contains(&self.d) {
            return bad(format!("dimension must be 1 or 2, got {}", self.d));
        }
        if self.k != 1 << self.d {
            return bad(format!(
                "isometry arity for d={} is {}, got {}",
                self.d,
                1 << self.d,
                self.k
            ));
        }
        let max_levels = if self.d == 1 { 12 } else { 6 };
        if self.levels == 0 || self.levels > max_levels {
            return bad(format!("levels must be in 1..={max_levels}, got {}", self.levels));
        }
        if !(1..=2).contains(&self.operators.len()) {
            return bad(format!("expected 1 or 2 operators, got {}", self.operators.len()));
        }
        for op in &self.operators {
            if op.len() != self.d || op.iter().any(|&x| x >= self.placement_side()) {
                return bad(format!("operator site {op:?} outside the placement region"));
            }
        }
        if self.operators.len() == 2 && self.operators[0] == self.operators[1] {
            return bad("operator sites must be distinct".into());
        }
        Ok(())
    }

    fn site_index(&self, coords: &[usize]) -> usize {
        coords.iter().fold(0, |acc, &x| acc * self.lattice_side() + x)
    }
}

#[derive(Clone, Copy)]
enum Src {
    Site(usize),
    Tensor(usize),
}

struct KetTensor {
    role: Role,
    label: String,
    ins: Vec<Src>,
}

fn block_members(d: usize, side: usize, block: usize, half: usize, shift: isize) -> Vec<usize> {
    let mut coords = vec![0; d];
    let mut b = block;
    for c in coords.iter_mut().rev() {
        *c = b % half;
        b /= half;
    }
    let mut out = Vec::with_capacity(1 << d);
    for corner in 0..1usize << d {
        let mut idx = 0;
        for (axis, &c) in coords.iter().enumerate() {
            let bit = corner >> (d - 1 - axis) & 1;
            let x = (2 * c as isize + bit as isize + shift).rem_euclid(side as isize) as usize;
            idx = idx * side + x;
        }
        out.push(idx);
    }
    out
}

fn ket_half(spec: &MeraSpec) -> (Vec<KetTensor>, Vec<Src>) {
    let d = spec.d;
    let mut side = spec.lattice_side();
    let mut cur: Vec<Src> = (0..side.pow(d as u32)).map(Src::Site).collect();
    let mut tensors = Vec::new();
    let mut level = 0;
    while side > 2 {
        let half = side / 2;
        let blocks = half.pow(d as u32);
        let mut after = vec![Src::Site(usize::MAX); cur.len()];
        for b in 0..blocks {
            let members = block_members(d, side, b, half, 0);
            let id = tensors.len();
            tensors.push(KetTensor {
                role: Role::Unitary,
                label: format!("U{level}.{b}"),
                ins: members.iter().map(|&m| cur[m]).collect(),
            });
            for m in members {
                after[m] = Src::Tensor(id);
            }
        }
        let mut next = Vec::with_capacity(blocks);
        for b in 0..blocks {
            let members = block_members(d, side, b, half, -1);
            let id = tensors.len();
            tensors.push(KetTensor {
                role: Role::Isometry,
                label: format!("I{level}.{b}"),
                ins: members.iter().map(|&m| after[m]).collect(),
            });
            next.push(Src::Tensor(id));
        }
        cur = next;
        side = half;
        level += 1;
    }
    (tensors, cur)
}

fn site_label(coords: &[usize]) -> String {
    coords.iter().map(usize::to_string).collect::<Vec<_>>().join(",")
}

/// Full expectation-value network: the ket half, its mirror image, the
/// operators between them at their sites, identity wires at every other
/// site, and a wire joining the two interface tensors.
pub fn build_mera(spec: &MeraSpec) -> Result<TensorNetwork> {
    spec.validate()?;
    let (mut ket, top) = ket_half(spec);
    if spec.top_connection {
        ket.push(KetTensor {
            role: Role::State,
            label: "T".into(),
            ins: top.clone(),
        });
    }
    let mut net = TensorNetwork::new();
    let nk = ket.len();
    for side in ["k", "b"] {
        for t in &ket {
            net.add_labeled_vertex(t.role, format!("{side}{}", t.label));
        }
    }
    let mut op_at = HashMap::new();
    for op in &spec.operators {
        let v = net.add_labeled_vertex(Role::Operator, format!("O{}", site_label(op)));
        op_at.insert(spec.site_index(op), v);
    }
    for (t, tensor) in ket.iter().enumerate() {
        for src in &tensor.ins {
            match *src {
                Src::Site(x) => match op_at.get(&x) {
                    Some(&o) => {
                        net.add_wire(t, o)?;
                        net.add_wire(t + nk, o)?;
                    }
                    None => {
                        net.add_wire(t, t + nk)?;
                    }
                },
                Src::Tensor(s) => {
                    net.add_wire(t, s)?;
                    net.add_wire(t + nk, s + nk)?;
                }
            }
        }
    }
    if spec.top_connection {
        net.add_wire(nk - 1, 2 * nk - 1)?;
    } else {
        for src in top {
            if let Src::Tensor(s) = src {
                net.add_wire(s, s + nk)?;
            }
        }
    }
    net.annotate_ranks();
    Ok(net)
}

/// Position of a tensor label in the bottom-to-top layer order.
fn layer_key(label: &str) -> Option<usize> {
    let kind = label.chars().next()?;
    if kind == 'T' {
        return Some(usize::MAX);
    }
    let level: usize = label[1..].split('.').next()?.parse().ok()?;
    match kind {
        'U' => Some(2 * level),
        'I' => Some(2 * level + 1),
        _ => None,
    }
}

/// Keeps the operators and every tensor on an ascending path from them,
/// together with the mirror images. A wire from a kept tensor to a removed
/// one is replaced by a wire to the tensor's own mirror.
pub fn causal_cone_reduce(net: &TensorNetwork, operators: &[usize]) -> Result<TensorNetwork> {
    if operators.is_empty() {
        return Err(Error::Contract("no operator vertices given".into()));
    }
    for &o in operators {
        if o >= net.n_vertices() || net.vertex(o).role != Some(Role::Operator) {
            return Err(Error::Contract(format!("vertex {o} is not a marked operator")));
        }
    }
    let n = net.n_vertices();
    let mut side = vec![' '; n];
    let mut key = vec![None; n];
    let mut by_label = HashMap::new();
    for (v, vert) in net.vertices().iter().enumerate() {
        let Some(label) = vert.label.as_deref() else { continue };
        by_label.insert(label, v);
        if let Some(s @ ('k' | 'b')) = label.chars().next() {
            side[v] = s;
            key[v] = layer_key(&label[1..]);
        }
    }
    let mirror = |v: usize| -> Result<usize> {
        let label = net.vertex(v).label.as_deref().unwrap_or_default();
        let other = match side[v] {
            'k' => format!("b{}", &label[1..]),
            'b' => format!("k{}", &label[1..]),
            _ => return Err(Error::Contract(format!("vertex {v} has no mirror"))),
        };
        by_label
            .get(other.as_str())
            .copied()
            .ok_or_else(|| Error::Contract(format!("mirror of {label} is missing")))
    };

    let mut adj = vec![Vec::new(); n];
    for w in net.wires() {
        adj[w.u].push(w.v);
        adj[w.v].push(w.u);
    }
    let mut keep = vec![false; n];
    let mut stack = Vec::new();
    for &o in operators {
        keep[o] = true;
        stack.extend(adj[o].iter().copied().filter(|&u| side[u] == 'k'));
    }
    while let Some(t) = stack.pop() {
        if std::mem::replace(&mut keep[t], true) {
            continue;
        }
        for &u in &adj[t] {
            if side[u] == 'k' && key[u] > key[t] && !keep[u] {
                stack.push(u);
            }
        }
    }
    let kets: Vec<usize> = (0..n).filter(|&v| keep[v] && side[v] == 'k').collect();
    for &t in &kets {
        keep[mirror(t)?] = true;
    }

    let mut out = TensorNetwork::new();
    let mut new_id = vec![usize::MAX; n];
    let order = operators
        .iter()
        .copied()
        .chain(kets.iter().copied())
        .chain(kets.iter().map(|&t| mirror(t).expect("checked above")));
    for v in order {
        new_id[v] = out.push_vertex(net.vertex(v).clone());
    }
    for w in net.wires() {
        match (keep[w.u], keep[w.v]) {
            (true, true) => {
                out.add_wire(new_id[w.u], new_id[w.v])?;
            }
            (true, false) | (false, true) => {
                let x = if keep[w.u] { w.u } else { w.v };
                if side[x] == 'k' {
                    out.add_wire(new_id[x], new_id[mirror(x)?])?;
                }
            }
            (false, false) => {}
        }
    }
    out.annotate_ranks();
    Ok(out)
}

/// One `(|V|, |E|)` cell of a corpus summary.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CorpusCell {
    #[serde(rename = "V")]
    pub vertices: usize,
    #[serde(rename = "E")]
    pub wires: usize,
    #[serde(rename = "S")]
    pub total: usize,
    #[serde(rename = "Su")]
    pub unique: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MeraCorpusSummary {
    pub d: usize,
    pub k: usize,
    pub ops: usize,
    pub level: usize,
    pub total: usize,
    pub unique: usize,
    pub cells: Vec<CorpusCell>,
}

impl MeraCorpusSummary {
    /// Smallest and largest reduced network size.
    pub fn vertex_range(&self) -> Option<(usize, usize)> {
        let min = self.cells.iter().map(|c| c.vertices).min()?;
        let max = self.cells.iter().map(|c| c.vertices).max()?;
        Some((min, max))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("summary serializes")
    }
}

/// One corpus member.
#[derive(Clone, Debug)]
pub struct MeraInstance {
    pub spec: MeraSpec,
    pub network: TensorNetwork,
    pub canonical: String,
    /// Index of the first instance with the same canonical form.
    pub class_of: usize,
}

/// Operator placements in corpus order: every corner site for one
/// operator; the origin plus every other corner site for two.
pub fn mera_placements(d: usize, levels: usize, ops: usize) -> Vec<Vec<Vec<usize>>> {
    let side = 1usize << levels;
    let sites: Vec<Vec<usize>> = (0..side.pow(d as u32))
        .map(|i| {
            let mut c = vec![0; d];
            let mut r = i;
            for x in c.iter_mut().rev() {
                *x = r % side;
                r /= side;
            }
            c
        })
        .collect();
    match ops {
        1 => sites.into_iter().map(|s| vec![s]).collect(),
        _ => sites.into_iter().skip(1).map(|s| vec![vec![0; d], s]).collect(),
    }
}

/// Reduced networks for every placement plus the isomorphism summary.
pub fn mera_corpus(d: usize, k: usize, ops: usize, levels: usize) -> Result<(Vec<MeraInstance>, MeraCorpusSummary)> {
    if !(1..=2).contains(&ops) {
        return Err(Error::Parameter(format!("expected 1 or 2 operators, got {ops}")));
    }
    let placements = mera_placements(d, levels, ops);
    let specs: Vec<MeraSpec> = placements
        .into_iter()
        .map(|operators| MeraSpec {
            d,
            k,
            levels,
            operators,
            top_connection: true,
        })
        .collect();
    for s in &specs {
        s.validate()?;
    }
    let threads = std::thread::available_parallelism()
        .map_or(1, |n| n.get())
        .min(specs.len().max(1));
    let chunk = specs.len().div_ceil(threads).max(1);
    let built: Vec<Result<(TensorNetwork, String)>> = std::thread::scope(|scope| {
        let handles: Vec<_> = specs
            .chunks(chunk)
            .map(|part| {
                scope.spawn(move || {
                    part.iter()
                        .map(|spec| {
                            let full = build_mera(spec)?;
                            let ops: Vec<usize> =
                                (full.n_vertices() - spec.operators.len()..full.n_vertices()).collect();
                            let net = causal_cone_reduce(&full, &ops)?;
                            let canon = canonical_form(&net);
                            Ok((net, canon))
                        })
                        .collect::<Vec<_>>()
                })
            })
            .collect();
        handles
            .into_iter()
            .flat_map(|h| h.join().expect("corpus worker panicked"))
            .collect()
    });

    let mut first: HashMap<String, usize> = HashMap::new();
    let mut instances = Vec::with_capacity(specs.len());
    let mut cells: BTreeMap<(usize, usize), (usize, usize)> = BTreeMap::new();
    for (i, (spec, item)) in specs.into_iter().zip(built).enumerate() {
        let (network, canonical) = item?;
        let cell = cells.entry((network.n_vertices(), network.n_wires())).or_default();
        cell.0 += 1;
        let class_of = *first.entry(canonical.clone()).or_insert_with(|| {
            cell.1 += 1;
            i
        });
        instances.push(MeraInstance {
            spec,
            network,
            canonical,
            class_of,
        });
    }
    let summary = MeraCorpusSummary {
        d,
        k,
        ops,
        level: levels,
        total: instances.len(),
        unique: first.len(),
        cells: cells
            .into_iter()
            .map(|((vertices, wires), (total, unique))| CorpusCell {
                vertices,
                wires,
                total,
                unique,
            })
            .collect(),
    };
    Ok((instances, summary))
}
