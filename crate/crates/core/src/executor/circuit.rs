use num_complex::Complex;

use super::numeric::NumericNetwork;
use super::tensor::DenseTensor;
use crate::error::{Error, Result};
use crate::graph::{Role, TensorNetwork, WireId};

pub type C64 = Complex<f64>;

/// Largest register the state-vector oracle accepts.
pub const MAX_ORACLE_QUBITS: usize = 20;

#[derive(Clone, Debug, PartialEq)]
pub enum CircuitOp {
    Prepare {
        qubit: usize,
        state: [C64; 2],
    },
    Gate1 {
        qubit: usize,
        matrix: [[C64; 2]; 2],
        name: String,
    },
    /// Matrix indexed by `(out_a, out_b), (in_a, in_b)` with the first
    /// qubit as the high bit.
    Gate2 {
        qubits: [usize; 2],
        matrix: [[C64; 4]; 4],
        name: String,
    },
    /// Contracts the qubit with `bra` (already conjugated).
    Project {
        qubit: usize,
        bra: [C64; 2],
    },
}

impl CircuitOp {
    fn qubits(&self) -> Vec<usize> {
        match self {
            CircuitOp::Prepare { qubit, .. } | CircuitOp::Gate1 { qubit, .. } | CircuitOp::Project { qubit, .. } => {
                vec![*qubit]
            }
            CircuitOp::Gate2 { qubits, .. } => qubits.to_vec(),
        }
    }

    fn role(&self) -> Role {
        match self {
            CircuitOp::Prepare { .. } => Role::State,
            CircuitOp::Project { .. } => Role::Projector,
            _ => Role::Gate,
        }
    }

    fn label(&self) -> String {
        match self {
            CircuitOp::Prepare { qubit, .. } => format!("prep q{qubit}"),
            CircuitOp::Project { qubit, .. } => format!("proj q{qubit}"),
            CircuitOp::Gate1 { qubit, name, .. } => format!("{name} q{qubit}"),
            CircuitOp::Gate2 { qubits, name, .. } => format!("{name} q{} q{}", qubits[0], qubits[1]),
        }
    }
}

/// Quantum circuit closed into an amplitude: every qubit is prepared first
/// and projected last.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Circuit {
    pub n_qubits: usize,
    pub ops: Vec<CircuitOp>,
}

pub fn c(re: f64, im: f64) -> C64 {
    Complex::new(re, im)
}

pub fn hadamard() -> [[C64; 2]; 2] {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    [[c(h, 0.0), c(h, 0.0)], [c(h, 0.0), c(-h, 0.0)]]
}

pub fn cnot() -> [[C64; 4]; 4] {
    let mut m = [[c(0.0, 0.0); 4]; 4];
    for (i, j) in [(0, 0), (1, 1), (2, 3), (3, 2)] {
        m[i][j] = c(1.0, 0.0);
    }
    m
}

pub fn basis(bit: u8) -> [C64; 2] {
    if bit == 0 {
        [c(1.0, 0.0), c(0.0, 0.0)]
    } else {
        [c(0.0, 0.0), c(1.0, 0.0)]
    }
}

impl Circuit {
    pub fn new(n_qubits: usize) -> Self {
        Circuit {
            n_qubits,
            ops: Vec::new(),
        }
    }

    /// Circuit with every qubit prepared in `|0>`; close it with
    /// [`Circuit::project_all`].
    pub fn zeros(n_qubits: usize) -> Self {
        let mut circ = Circuit::new(n_qubits);
        for q in 0..n_qubits {
            circ.ops.push(CircuitOp::Prepare {
                qubit: q,
                state: basis(0),
            });
        }
        circ
    }

    pub fn gate1(&mut self, qubit: usize, matrix: [[C64; 2]; 2], name: &str) {
        self.ops.push(CircuitOp::Gate1 {
            qubit,
            matrix,
            name: name.into(),
        });
    }

    pub fn gate2(&mut self, a: usize, b: usize, matrix: [[C64; 4]; 4], name: &str) {
        self.ops.push(CircuitOp::Gate2 {
            qubits: [a, b],
            matrix,
            name: name.into(),
        });
    }

    /// Appends `<bits[q]|` on every qubit.
    pub fn project_all(&mut self, bits: &[u8]) {
        for q in 0..self.n_qubits {
            self.ops.push(CircuitOp::Project {
                qubit: q,
                bra: basis(bits.get(q).copied().unwrap_or(0)),
            });
        }
    }

    /// Checks that each qubit is prepared exactly once before any gate and
    /// projected exactly once after all of them.
    pub fn validate(&self) -> Result<()> {
        let mut state = vec![0u8; self.n_qubits];
        for (i, op) in self.ops.iter().enumerate() {
            let qs = op.qubits();
            if qs.len() == 2 && qs[0] == qs[1] {
                return Err(Error::Contract(format!("op {i} acts twice on qubit {}", qs[0])));
            }
            for q in qs {
                if q >= self.n_qubits {
                    return Err(Error::Contract(format!("op {i} names qubit {q}")));
                }
                let expected = match op {
                    CircuitOp::Prepare { .. } => (state[q] == 0).then_some(1),
                    CircuitOp::Project { .. } => (state[q] == 1).then_some(2),
                    _ => (state[q] == 1).then_some(1),
                };
                match expected {
                    Some(s) => state[q] = s,
                    None => {
                        return Err(Error::Contract(format!(
                            "op {i} out of order on qubit {q} (prepare, gates, project)"
                        )))
                    }
                }
            }
        }
        if let Some(q) = state.iter().position(|&s| s != 2) {
            return Err(Error::Contract(format!("qubit {q} is not closed")));
        }
        Ok(())
    }

    /// Tensor network of the circuit: one vertex per op, wires along each
    /// qubit's worldline in op order.
    pub fn to_network(&self) -> Result<NumericNetwork<f64>> {
        self.validate()?;
        let mut net = TensorNetwork::new();
        let mut last: Vec<Option<usize>> = vec![None; self.n_qubits];
        // incoming and outgoing wire per (op, qubit slot)
        let mut ins: Vec<Vec<Option<WireId>>> = Vec::new();
        let mut outs: Vec<Vec<Option<WireId>>> = Vec::new();
        for (i, op) in self.ops.iter().enumerate() {
            let v = net.add_labeled_vertex(op.role(), op.label());
            debug_assert_eq!(v, i);
            let qs = op.qubits();
            ins.push(vec![None; qs.len()]);
            outs.push(vec![None; qs.len()]);
            for (slot, &q) in qs.iter().enumerate() {
                if let Some(prev) = last[q] {
                    let id = net.add_wire(prev, v)?;
                    ins[v][slot] = Some(id);
                    let pslot = self.ops[prev]
                        .qubits()
                        .iter()
                        .position(|&x| x == q)
                        .expect("previous op touches the qubit");
                    outs[prev][pslot] = Some(id);
                }
                last[q] = Some(v);
            }
        }
        let mut tensors = Vec::with_capacity(self.ops.len());
        for (v, op) in self.ops.iter().enumerate() {
            let leg = |id: Option<WireId>| (id.expect("closed circuit"), 2);
            let t = match op {
                CircuitOp::Prepare { state, .. } => DenseTensor::new(vec![leg(outs[v][0])], state.to_vec())?,
                CircuitOp::Project { bra, .. } => DenseTensor::new(vec![leg(ins[v][0])], bra.to_vec())?,
                CircuitOp::Gate1 { matrix, .. } => DenseTensor::new(
                    vec![leg(outs[v][0]), leg(ins[v][0])],
                    matrix.iter().flatten().copied().collect(),
                )?,
                CircuitOp::Gate2 { matrix, .. } => {
                    // legs (out_a, out_b, in_a, in_b): row-major order equals
                    // the matrix's (out, in) flattening
                    DenseTensor::new(
                        vec![leg(outs[v][0]), leg(outs[v][1]), leg(ins[v][0]), leg(ins[v][1])],
                        matrix.iter().flatten().copied().collect(),
                    )?
                }
            };
            net.set_rank(v, t.rank());
            tensors.push(Some(t));
        }
        NumericNetwork::new(net, tensors)
    }
}

/// Amplitude of a closed circuit by direct state-vector evolution.
pub fn statevector_oracle(circ: &Circuit) -> Result<C64> {
    if circ.n_qubits > MAX_ORACLE_QUBITS {
        return Err(Error::Refused(format!(
            "{} qubits exceed the state-vector cap of {MAX_ORACLE_QUBITS}",
            circ.n_qubits
        )));
    }
    circ.validate()?;
    let n = circ.n_qubits;
    // qubit q is bit (n - 1 - q) of the basis index
    let bit = |q: usize| 1usize << (n - 1 - q);
    let mut psi = vec![c(1.0, 0.0)];
    let mut prepared = vec![[c(1.0, 0.0), c(0.0, 0.0)]; n];
    for op in &circ.ops {
        if let CircuitOp::Prepare { qubit, state } = op {
            prepared[*qubit] = *state;
        }
    }
    for amp in &prepared {
        psi = psi.iter().flat_map(|&a| [a * amp[0], a * amp[1]]).collect();
    }
    let mut bra = vec![[c(1.0, 0.0), c(1.0, 0.0)]; n];
    for op in &circ.ops {
        match op {
            CircuitOp::Prepare { .. } => {}
            CircuitOp::Project { qubit, bra: b } => bra[*qubit] = *b,
            CircuitOp::Gate1 { qubit, matrix, .. } => {
                let m = bit(*qubit);
                for i in 0..psi.len() {
                    if i & m == 0 {
                        let (a0, a1) = (psi[i], psi[i | m]);
                        psi[i] = matrix[0][0] * a0 + matrix[0][1] * a1;
                        psi[i | m] = matrix[1][0] * a0 + matrix[1][1] * a1;
                    }
                }
            }
            CircuitOp::Gate2 { qubits, matrix, .. } => {
                let (ma, mb) = (bit(qubits[0]), bit(qubits[1]));
                for i in 0..psi.len() {
                    if i & ma == 0 && i & mb == 0 {
                        let idx = [i, i | mb, i | ma, i | ma | mb];
                        let old = idx.map(|j| psi[j]);
                        for (r, &j) in idx.iter().enumerate() {
                            psi[j] = (0..4).map(|s| matrix[r][s] * old[s]).sum();
                        }
                    }
                }
            }
        }
    }
    let mut amp = c(0.0, 0.0);
    for (i, a) in psi.iter().enumerate() {
        let mut w = *a;
        for (q, b) in bra.iter().enumerate() {
            w *= b[usize::from(i & bit(q) != 0)];
        }
        amp += w;
    }
    Ok(amp)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_circuit_amplitude_is_one() {
        let mut circ = Circuit::zeros(3);
        circ.project_all(&[0, 0, 0]);
        assert!((statevector_oracle(&circ).unwrap() - c(1.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn hadamard_amplitude() {
        let mut circ = Circuit::zeros(1);
        circ.gate1(0, hadamard(), "h");
        circ.project_all(&[0]);
        let a = statevector_oracle(&circ).unwrap();
        assert!((a - c(std::f64::consts::FRAC_1_SQRT_2, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn bell_amplitudes() {
        let mut circ = Circuit::zeros(2);
        circ.gate1(0, hadamard(), "h");
        circ.gate2(0, 1, cnot(), "cx");
        circ.project_all(&[1, 1]);
        let a = statevector_oracle(&circ).unwrap();
        assert!((a - c(std::f64::consts::FRAC_1_SQRT_2, 0.0)).norm() < 1e-15);
        circ.ops.truncate(4);
        circ.project_all(&[0, 1]);
        assert!(statevector_oracle(&circ).unwrap().norm() < 1e-15);
    }

    #[test]
    fn rejects_open_and_oversized_circuits() {
        let circ = Circuit::zeros(2);
        assert!(circ.validate().is_err());
        let mut big = Circuit::zeros(21);
        big.project_all(&[]);
        assert!(matches!(statevector_oracle(&big), Err(Error::Refused(_))));
    }

    #[test]
    fn network_shape() {
        let mut circ = Circuit::zeros(2);
        circ.gate1(0, hadamard(), "h");
        circ.gate2(0, 1, cnot(), "cx");
        circ.project_all(&[0, 0]);
        let net = circ.to_network().unwrap();
        assert_eq!(net.network().n_vertices(), 6);
        assert_eq!(net.network().n_wires(), 5);
        net.network().validate().unwrap();
    }
}
