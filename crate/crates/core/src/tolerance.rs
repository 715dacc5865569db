//! Numeric tolerances used by validation and by the test suites.
//!
//! Every invariant check in the crate reads its threshold from here.

/// Unit norm of a state vector.
pub const NORM: f64 = 1e-12;
/// Hermiticity of stored operators, relative to the largest entry (floor 1).
pub const HERMITIAN: f64 = 1e-12;
/// Hermiticity accepted on input to the real/imaginary split before symmetrization.
pub const SPLIT_HERMITIAN: f64 = 1e-10;
/// Unit trace of a density matrix.
pub const TRACE: f64 = 1e-12;
/// Most negative eigenvalue tolerated in a density matrix.
pub const EIGEN_FLOOR: f64 = -1e-10;
/// U†U = I.
pub const UNITARY: f64 = 1e-10;
/// Imaginary residue of an expectation value that is silently dropped.
pub const IMAG_RESIDUE: f64 = 1e-10;
/// Decoded embedded states may be renormalized only within this band.
pub const DECODE_NORM: f64 = 1e-9;
/// Negative floating residue of an entanglement monotone clamped to zero.
pub const MONOTONE_RANGE: f64 = 1e-10;
/// Largest register handled by the dense kernel.
pub const MAX_QUBITS: usize = 8;
/// Largest register accepted by full-state tomography.
pub const MAX_TOMOGRAPHY_QUBITS: usize = 4;
