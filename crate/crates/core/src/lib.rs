//! Quantum circuit simulation and unitary synthesis, together with the
//! classical machinery they grow out of: reversible Boolean circuits and
//! Turing machines.

pub mod linalg;
pub mod qstate;
pub mod rng;
pub mod gates;
pub mod circuit;
pub mod synth;
pub mod revclassic;
pub mod turing;
