//! Embedding quantum simulation of entanglement monotones.
//!
//! An `n`-qubit state `φ` and Hamiltonian `H = A + iB` are mapped onto `n + 1`
//! qubits so that anti-linear expectations `⟨φ|O|φ*⟩`, and with them the
//! concurrence and the three-tangle, follow from two Hermitian observables
//! each. The crate carries that map from exact linear algebra down to an NMR
//! model of a four-spin register: gate circuits, hard-pulse sequences, GRAPE
//! shaped pulses, pseudo-pure states, dephasing, tomography and error bars.

pub mod circuits;
pub mod embedding;
pub mod error;
pub mod errorbars;
pub mod experiment;
pub mod grape;
pub mod monotones;
pub mod nmr;
pub mod qcore;
pub mod tolerance;
pub mod tomography;

pub use error::{EqsError, Result};
