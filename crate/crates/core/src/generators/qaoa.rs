use crate::error::{Error, Result};
use crate::executor::{c, cnot, Circuit, CircuitOp, NumericNetwork, C64};
use crate::graph::{Graph, TensorNetwork};

#[derive(Clone, Debug, PartialEq, serde::Serialize, serde::Deserialize)]
#[serde(default)]
pub struct QaoaOptions {
    pub rounds: usize,
    /// Cost angle per round; the last value repeats if fewer are given.
    pub gammas: Vec<f64>,
    pub betas: Vec<f64>,
    /// Cost gate as CNOT, Rz, CNOT instead of one two-qubit tensor.
    pub decomposed: bool,
    /// Terminal bitstring; missing bits are 0.
    pub terminal: Vec<u8>,
}

impl Default for QaoaOptions {
    fn default() -> Self {
        QaoaOptions {
            rounds: 1,
            gammas: vec![0.4],
            betas: vec![0.3],
            decomposed: false,
            terminal: Vec::new(),
        }
    }
}

fn angle(list: &[f64], round: usize) -> f64 {
    list.get(round).or(list.last()).copied().unwrap_or(0.0)
}

/// `exp(-i gamma Z Z)`.
pub fn zz_phase(gamma: f64) -> [[C64; 4]; 4] {
    let mut m = [[c(0.0, 0.0); 4]; 4];
    for (i, parity) in [0, 1, 1, 0].into_iter().enumerate() {
        let sign = if parity == 0 { -1.0 } else { 1.0 };
        m[i][i] = c((gamma).cos(), sign * gamma.sin());
    }
    m
}

/// `exp(-i beta X)`.
pub fn x_rotation(beta: f64) -> [[C64; 2]; 2] {
    [
        [c(beta.cos(), 0.0), c(0.0, -beta.sin())],
        [c(0.0, -beta.sin()), c(beta.cos(), 0.0)],
    ]
}

/// `Rz(theta) = diag(exp(-i theta/2), exp(i theta/2))`.
pub fn rz(theta: f64) -> [[C64; 2]; 2] {
    [
        [c((theta / 2.0).cos(), -(theta / 2.0).sin()), c(0.0, 0.0)],
        [c(0.0, 0.0), c((theta / 2.0).cos(), (theta / 2.0).sin())],
    ]
}

/// QAOA MaxCut circuit on `g`: `|+>` on every qubit, then per round the cost
/// gates in sorted edge order followed by the mixers, then `<terminal|`.
pub fn qaoa_circuit(g: &Graph, opts: &QaoaOptions) -> Result<Circuit> {
    if g.n() == 0 || !g.is_connected() {
        return Err(Error::Parameter("QAOA needs a connected, non-empty graph".into()));
    }
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let mut circ = Circuit::new(g.n());
    for q in 0..g.n() {
        circ.ops.push(CircuitOp::Prepare {
            qubit: q,
            state: [c(h, 0.0), c(h, 0.0)],
        });
    }
    for round in 0..opts.rounds {
        let gamma = angle(&opts.gammas, round);
        let beta = angle(&opts.betas, round);
        for (u, v) in g.edges() {
            if opts.decomposed {
                circ.gate2(u, v, cnot(), "cx");
                circ.gate1(v, rz(2.0 * gamma), "rz");
                circ.gate2(u, v, cnot(), "cx");
            } else {
                circ.gate2(u, v, zz_phase(gamma), "zz");
            }
        }
        for q in 0..g.n() {
            circ.gate1(q, x_rotation(beta), "rx");
        }
    }
    circ.project_all(&opts.terminal);
    Ok(circ)
}

/// Structure of the `p`-round QAOA network with the single-tensor cost gate.
pub fn qaoa_maxcut_network(g: &Graph, rounds: usize) -> Result<TensorNetwork> {
    let opts = QaoaOptions {
        rounds,
        ..Default::default()
    };
    Ok(qaoa_numeric_network(g, &opts)?.network().clone())
}

pub fn qaoa_numeric_network(g: &Graph, opts: &QaoaOptions) -> Result<NumericNetwork<f64>> {
    qaoa_circuit(g, opts)?.to_network()
}
