//! Dense execution of contraction sequences and a state-vector oracle.

mod circuit;
mod numeric;
mod run;
mod tensor;

pub use circuit::{basis, c, cnot, hadamard, statevector_oracle, Circuit, CircuitOp, C64, MAX_ORACLE_QUBITS};
pub use numeric::NumericNetwork;
pub use run::{contract_all, contract_all_capped, ExecutionTrace, TraceStep, DEFAULT_MAX_ENTRIES};
pub use tensor::DenseTensor;
