use num_complex::Complex;
use serde_json::{json, Value};

use super::tensor::DenseTensor;
use crate::error::{Error, Result};
use crate::graph::{TensorNetwork, WireId};
use crate::scalar::Scalar;

/// Network whose vertices carry dense tensors. A tensor's legs must be
/// exactly the vertex's incident wires and open legs.
#[derive(Clone, Debug)]
pub struct NumericNetwork<F: Scalar> {
    network: TensorNetwork,
    tensors: Vec<Option<DenseTensor<F>>>,
}

impl<F: Scalar> NumericNetwork<F> {
    pub fn new(network: TensorNetwork, tensors: Vec<Option<DenseTensor<F>>>) -> Result<Self> {
        if tensors.len() != network.n_vertices() {
            return Err(Error::Contract(format!(
                "{} tensors for {} vertices",
                tensors.len(),
                network.n_vertices()
            )));
        }
        for (v, t) in tensors.iter().enumerate() {
            let Some(t) = t else { continue };
            let mut expected = incident_ids(&network, v);
            let mut got: Vec<WireId> = t.legs().iter().map(|l| l.0).collect();
            expected.sort_unstable();
            got.sort_unstable();
            if expected != got {
                return Err(Error::Contract(format!(
                    "tensor {v} legs {got:?} do not match incident wires {expected:?}"
                )));
            }
            for &(id, d) in t.legs() {
                let wire_dim = network
                    .wire(id)
                    .map(|w| w.dim)
                    .or_else(|| network.open_legs().iter().find(|l| l.id == id).map(|l| l.dim));
                if wire_dim != Some(d) {
                    return Err(Error::Contract(format!(
                        "tensor {v} leg {id} has dimension {d}, wire has {wire_dim:?}"
                    )));
                }
            }
        }
        Ok(NumericNetwork { network, tensors })
    }

    pub fn network(&self) -> &TensorNetwork {
        &self.network
    }

    pub fn tensors(&self) -> &[Option<DenseTensor<F>>] {
        &self.tensors
    }

    pub fn tensor(&self, v: usize) -> Option<&DenseTensor<F>> {
        self.tensors[v].as_ref()
    }

    pub fn cast<G: Scalar>(&self) -> NumericNetwork<G> {
        NumericNetwork {
            network: self.network.clone(),
            tensors: self.tensors.iter().map(|t| t.as_ref().map(DenseTensor::cast)).collect(),
        }
    }

    /// Network JSON with `legs` and `entries` added to each vertex.
    pub fn to_json_value(&self) -> Value {
        let mut doc = self.network.to_json_value();
        if let Some(vertices) = doc.get_mut("vertices").and_then(Value::as_array_mut) {
            for (v, entry) in vertices.iter_mut().enumerate() {
                if let (Some(t), Some(obj)) = (&self.tensors[v], entry.as_object_mut()) {
                    obj.insert(
                        "legs".into(),
                        json!(t.legs().iter().map(|l| l.0 .0).collect::<Vec<_>>()),
                    );
                    obj.insert(
                        "entries".into(),
                        json!(t
                            .data()
                            .iter()
                            .map(|c| [c.re.to_f64_lossy(), c.im.to_f64_lossy()])
                            .collect::<Vec<_>>()),
                    );
                }
            }
        }
        doc
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_json_value()).expect("serializes")
    }

    /// Reads the numeric format. Vertices without `entries` get no tensor;
    /// without `legs`, legs default to incident wires in wire order followed
    /// by open legs.
    pub fn from_json(text: &str) -> Result<Self> {
        let value: Value = serde_json::from_str(text)?;
        let network = TensorNetwork::from_json_value(&value)?;
        let mut tensors: Vec<Option<DenseTensor<F>>> = vec![None; network.n_vertices()];
        let vertices = value["vertices"].as_array().cloned().unwrap_or_default();
        for entry in vertices {
            let v = entry["id"]
                .as_u64()
                .ok_or_else(|| Error::Json("vertex without integer id".into()))? as usize;
            let Some(raw) = entry.get("entries") else { continue };
            let legs: Vec<WireId> = match entry.get("legs") {
                Some(l) => serde_json::from_value(l.clone())?,
                None => incident_ids(&network, v),
            };
            let dims = legs
                .iter()
                .map(|&id| {
                    network
                        .wire(id)
                        .map(|w| w.dim)
                        .or_else(|| network.open_legs().iter().find(|l| l.id == id).map(|l| l.dim))
                        .ok_or_else(|| Error::Json(format!("vertex {v} names unknown leg {id}")))
                })
                .collect::<Result<Vec<_>>>()?;
            let pairs: Vec<[f64; 2]> = serde_json::from_value(raw.clone())?;
            let data = pairs
                .into_iter()
                .map(|[re, im]| Complex::new(F::from_f64_lossy(re), F::from_f64_lossy(im)))
                .collect();
            tensors[v] = Some(DenseTensor::new(legs.into_iter().zip(dims).collect(), data)?);
        }
        NumericNetwork::new(network, tensors)
    }
}

fn incident_ids(net: &TensorNetwork, v: usize) -> Vec<WireId> {
    let mut ids: Vec<WireId> = net
        .wires()
        .iter()
        .filter(|w| w.u == v || w.v == v)
        .map(|w| w.id)
        .collect();
    ids.extend(net.open_legs().iter().filter(|l| l.vertex == v).map(|l| l.id));
    ids
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::executor::circuit::{hadamard, Circuit};

    #[test]
    fn json_round_trip() {
        let mut circ = Circuit::zeros(1);
        circ.gate1(0, hadamard(), "h");
        circ.project_all(&[1]);
        let net = circ.to_network().unwrap();
        let back = NumericNetwork::<f64>::from_json(&net.to_json()).unwrap();
        assert_eq!(back.network().wires(), net.network().wires());
        for v in 0..3 {
            assert_eq!(back.tensor(v), net.tensor(v));
        }
    }

    #[test]
    fn leg_mismatch_is_rejected() {
        let mut net = TensorNetwork::new();
        let a = net.add_vertex(None);
        let b = net.add_vertex(None);
        net.add_wire(a, b).unwrap();
        let t = DenseTensor::new(vec![(WireId(9), 2)], vec![Complex::new(1.0, 0.0); 2]).unwrap();
        assert!(NumericNetwork::new(net, vec![Some(t), None]).is_err());
    }
}
