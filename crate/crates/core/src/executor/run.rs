use std::time::{Duration, Instant};

use num_complex::Complex;
use serde::Serialize;

use super::numeric::NumericNetwork;
use super::tensor::DenseTensor;
use crate::contraction::{ContractionSequence, Merger};
use crate::error::{Error, Result};
use crate::graph::WireId;
use crate::scalar::Scalar;

/// Default cap on the entry count of any intermediate tensor.
pub const DEFAULT_MAX_ENTRIES: usize = 1 << 30;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TraceStep {
    pub wire: WireId,
    /// Original vertices standing for the two merged groups.
    pub merged: (usize, usize),
    /// Legs of the produced tensor.
    pub rank: usize,
    /// Distinct wires touched minus one: the combinatorial step degree.
    pub degree: usize,
    pub madds: u64,
}

#[derive(Clone, Debug, Serialize)]
pub struct ExecutionTrace {
    pub steps: Vec<TraceStep>,
    pub max_rank: usize,
    pub max_degree: usize,
    pub total_madds: u64,
    #[serde(rename = "wall_seconds", serialize_with = "as_seconds")]
    pub wall_time: Duration,
}

fn as_seconds<S: serde::Serializer>(d: &Duration, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_f64(d.as_secs_f64())
}

impl ExecutionTrace {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("trace serializes")
    }
}

/// Contracts a closed numeric network along `seq` and returns the scalar.
pub fn contract_all<F: Scalar>(
    net: &NumericNetwork<F>,
    seq: &ContractionSequence,
) -> Result<(Complex<F>, ExecutionTrace)> {
    contract_all_capped(net, seq, DEFAULT_MAX_ENTRIES)
}

/// [`contract_all`] with an explicit cap on intermediate tensor entries.
pub fn contract_all_capped<F: Scalar>(
    net: &NumericNetwork<F>,
    seq: &ContractionSequence,
    max_entries: usize,
) -> Result<(Complex<F>, ExecutionTrace)> {
    let start = Instant::now();
    let tn = net.network();
    if !tn.open_legs().is_empty() {
        return Err(Error::Contract(
            "network has open legs; expected a closed network".into(),
        ));
    }
    let mut held: Vec<Option<DenseTensor<F>>> = Vec::with_capacity(tn.n_vertices());
    for (v, t) in net.tensors().iter().enumerate() {
        match t {
            Some(t) => held.push(Some(t.clone())),
            None => return Err(Error::Contract(format!("vertex {v} has no entries"))),
        }
    }
    let mut merger = Merger::new(tn);
    let mut steps = Vec::new();
    for (k, &id) in seq.steps.iter().enumerate() {
        let i = tn
            .wire_index(id)
            .ok_or_else(|| Error::Contract(format!("wire {id} is not in the network")))?;
        if merger.done[i] {
            continue;
        }
        let (a, b) = (merger.root(tn.wires()[i].u), merger.root(tn.wires()[i].v));
        if a == b {
            return Err(Error::Contract(format!("wire {id} is a self-loop")));
        }
        let (ta, tb) = (
            held[a].take().expect("group tensor"),
            held[b].take().expect("group tensor"),
        );
        let out_len = free_entries(&ta, &tb);
        if out_len.is_none_or(|n| n > max_entries) {
            return Err(Error::Resource {
                step: k,
                msg: format!(
                    "contracting wire {id} would produce {} entries, cap is {max_entries}",
                    out_len.map_or("more than usize::MAX".to_string(), |n| n.to_string())
                ),
            });
        }
        let touched = distinct_legs(&ta, &tb);
        let (result, madds) = ta.contract(&tb)?;
        let (degree, _) = merger.contract(i).expect("wire is open");
        debug_assert_eq!(degree + 1, touched);
        let root = merger.root(a);
        steps.push(TraceStep {
            wire: id,
            merged: (a, b),
            rank: result.rank(),
            degree,
            madds,
        });
        held[root] = Some(result);
    }
    if !merger.finished() {
        return Err(Error::Contract("sequence leaves wires uncontracted".into()));
    }
    let mut value = Complex::new(F::one(), F::zero());
    for t in held.into_iter().flatten() {
        debug_assert_eq!(t.rank(), 0);
        value = value * t.data()[0];
    }
    let trace = ExecutionTrace {
        max_rank: steps.iter().map(|s| s.rank).max().unwrap_or(0),
        max_degree: steps.iter().map(|s| s.degree).max().unwrap_or(0),
        total_madds: steps.iter().map(|s| s.madds).sum(),
        steps,
        wall_time: start.elapsed(),
    };
    Ok((value, trace))
}

fn free_entries<F: Scalar>(a: &DenseTensor<F>, b: &DenseTensor<F>) -> Option<usize> {
    let shared = |id: &WireId, other: &DenseTensor<F>| other.legs().iter().any(|(o, _)| o == id);
    a.legs()
        .iter()
        .filter(|(id, _)| !shared(id, b))
        .chain(b.legs().iter().filter(|(id, _)| !shared(id, a)))
        .try_fold(1usize, |acc, &(_, d)| acc.checked_mul(d))
}

fn distinct_legs<F: Scalar>(a: &DenseTensor<F>, b: &DenseTensor<F>) -> usize {
    let shared = a
        .legs()
        .iter()
        .filter(|(id, _)| b.legs().iter().any(|(o, _)| o == id))
        .count();
    a.rank() + b.rank() - shared
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::contraction::optimal_cc;
    use crate::decomposition::ExactOptions;
    use crate::executor::{basis, c, cnot, hadamard, Circuit};
    use crate::graph::TensorNetwork;

    fn run(circ: &Circuit) -> (Complex<f64>, ExecutionTrace) {
        let num = circ.to_network().unwrap();
        let seq = optimal_cc(num.network(), &ExactOptions::default()).unwrap().sequence;
        contract_all(&num, &seq).unwrap()
    }

    #[test]
    fn inner_product() {
        let mut net = TensorNetwork::new();
        let a = net.add_vertex(None);
        let b = net.add_vertex(None);
        let w = net.add_wire(a, b).unwrap();
        let t = |v: [Complex<f64>; 2]| Some(DenseTensor::new(vec![(w, 2)], v.to_vec()).unwrap());
        let num = NumericNetwork::new(net, vec![t(basis(0)), t(basis(0))]).unwrap();
        let seq = ContractionSequence::from_wire_order(num.network(), &[w]).unwrap();
        let (v, trace) = contract_all(&num, &seq).unwrap();
        assert_eq!(v, c(1.0, 0.0));
        assert_eq!(trace.total_madds, 2);
        assert_eq!(trace.max_degree, 0);
    }

    #[test]
    fn hadamard_chain() {
        let mut circ = Circuit::zeros(1);
        circ.gate1(0, hadamard(), "h");
        circ.project_all(&[0]);
        let (v, trace) = run(&circ);
        assert!((v - c(std::f64::consts::FRAC_1_SQRT_2, 0.0)).norm() < 1e-12);
        assert_eq!(trace.steps.len(), 2);
    }

    #[test]
    fn bell_amplitude() {
        let mut circ = Circuit::zeros(2);
        circ.gate1(0, hadamard(), "h");
        circ.gate2(0, 1, cnot(), "cx");
        circ.project_all(&[0, 0]);
        let (v, trace) = run(&circ);
        assert!((v - c(std::f64::consts::FRAC_1_SQRT_2, 0.0)).norm() < 1e-12);
        let expected: u64 = trace.steps.iter().map(|s| 1u64 << (s.degree + 1)).sum();
        assert_eq!(trace.total_madds, expected);
    }

    #[test]
    fn cap_names_the_step() {
        let mut circ = Circuit::zeros(2);
        circ.gate2(0, 1, cnot(), "cx");
        circ.project_all(&[0, 0]);
        let num = circ.to_network().unwrap();
        let seq = optimal_cc(num.network(), &ExactOptions::default()).unwrap().sequence;
        let err = contract_all_capped(&num, &seq, 1).unwrap_err();
        assert!(matches!(err, Error::Resource { step: 0, .. }), "{err}");
    }

    #[test]
    fn missing_entries_rejected() {
        let num = NumericNetwork::<f64>::new(
            TensorNetwork::from_graph(&crate::graph::Graph::path(2)),
            vec![None, None],
        )
        .unwrap();
        let seq = ContractionSequence::from_wire_order(num.network(), &[WireId(0)]).unwrap();
        assert!(matches!(contract_all(&num, &seq), Err(Error::Contract(_))));
    }
}
