//! Contraction ordering for tensor networks through line-graph treewidth.

pub mod bench;
mod bitset;
pub mod contraction;
pub mod decomposition;
pub mod error;
pub mod executor;
pub mod generators;
pub mod graph;
pub mod rng;
pub mod scalar;

pub use error::{Error, Result};
pub use graph::{Graph, TensorNetwork};

/// Double-precision dense tensor.
pub type Tensor64 = executor::DenseTensor<f64>;
/// Single-precision dense tensor.
pub type Tensor32 = executor::DenseTensor<f32>;
/// Double-precision numeric network.
pub type Numeric64 = executor::NumericNetwork<f64>;
