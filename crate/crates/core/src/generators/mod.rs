//! Benchmark instance generators.

mod canon;
mod mera;
mod qaoa;

pub use canon::{canonical_form, canonical_labeling, network_isomorphism};
pub use mera::{
    build_mera, causal_cone_reduce, mera_corpus, mera_placements, CorpusCell, MeraCorpusSummary, MeraInstance, MeraSpec,
};
pub use qaoa::{qaoa_circuit, qaoa_maxcut_network, qaoa_numeric_network, rz, x_rotation, zz_phase, QaoaOptions};
