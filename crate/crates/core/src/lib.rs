//! Streaming string register transducers over data words with origin
//! semantics, together with bounded tooling around their machine-independent
//! characterization: factored outputs, influencing values, prefix and suffix
//! equivalences, dependency trees, and synthesis of transducers from
//! oracles.

pub mod analysis;
pub mod cli;
pub mod deptree;
pub mod factored;
pub mod fixtures;
pub mod machine;
pub mod synth;
pub mod words;

pub use analysis::{builtin, Analyzer, Bounds, MachineOracle, Transduction};
pub use machine::{parse_machine, transduce, validate, write_machine, Ssrt};
pub use words::{DataValue, DataWord, Letter, OriginTriple, OriginWord, Permutation, Symbol};
