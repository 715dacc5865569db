//! Full-state tomography by linear inversion, used as the exhaustive baseline.

use std::fmt::Write as _;

use num_complex::Complex64;
use rand::RngExt;
use rand_distr::StandardNormal;

use crate::error::{EqsError, Result};
use crate::qcore::{
    all_pauli_words, expectation, CMatrix, DensityMatrix, HermitianOperator, PauliString, QuantumState,
    StateVector,
};
use crate::tolerance::MAX_TOMOGRAPHY_QUBITS;

#[derive(Debug, Clone, PartialEq)]
pub struct TomographyResult {
    /// Hermitian, unit trace; not projected onto the positive cone.
    pub reconstructed: DensityMatrix,
    pub expectations: Vec<(PauliString, f64)>,
    pub min_eigenvalue: f64,
}

impl TomographyResult {
    pub fn observable_count(&self) -> usize {
        self.expectations.len()
    }

    /// Delimited `word,value` lines.
    pub fn expectations_text(&self) -> String {
        let mut out = String::from("pauli,value\n");
        for (p, v) in &self.expectations {
            let _ = writeln!(out, "{},{v}", p.label());
        }
        out
    }
}

fn check_size(n: usize) -> Result<()> {
    if n > MAX_TOMOGRAPHY_QUBITS {
        return Err(EqsError::RegisterTooLarge {
            n,
            limit: MAX_TOMOGRAPHY_QUBITS,
        });
    }
    Ok(())
}

/// `ρ̂ = (I + Σ_P ⟨P⟩P) / 2ⁿ` from the `4ⁿ − 1` non-identity expectations.
pub fn reconstruct(n: usize, expectations: Vec<(PauliString, f64)>) -> Result<TomographyResult> {
    check_size(n)?;
    let expected = (1usize << (2 * n)) - 1;
    if expectations.len() != expected {
        return Err(EqsError::DimensionMismatch {
            expected,
            found: expectations.len(),
        });
    }
    let dim = 1usize << n;
    let mut m = CMatrix::identity(dim, dim);
    for (p, v) in &expectations {
        if p.num_qubits() != n {
            return Err(EqsError::WrongQubitCount {
                expected: n,
                found: p.num_qubits(),
            });
        }
        m += p.to_matrix() * Complex64::new(*v, 0.0);
    }
    m /= Complex64::new(dim as f64, 0.0);
    let reconstructed = DensityMatrix::from_hermitian(m)?;
    let min_eigenvalue = reconstructed.min_eigenvalue();
    Ok(TomographyResult {
        reconstructed,
        expectations,
        min_eigenvalue,
    })
}

fn pauli_expectations(rho: &DensityMatrix) -> Result<Vec<(PauliString, f64)>> {
    all_pauli_words(rho.num_qubits())
        .into_iter()
        .map(|p| {
            let v = expectation(rho, &HermitianOperator::from_pauli(&p))?;
            Ok((p, v))
        })
        .collect()
}

/// Measures every non-identity Pauli string exactly and inverts.
pub fn full_state_tomography(rho: &DensityMatrix) -> Result<TomographyResult> {
    check_size(rho.num_qubits())?;
    reconstruct(rho.num_qubits(), pauli_expectations(rho)?)
}

/// As [`full_state_tomography`] with independent Gaussian noise of standard
/// deviation `sigma` on each expectation.
pub fn noisy_tomography<R: RngExt + ?Sized>(rho: &DensityMatrix, sigma: f64, rng: &mut R) -> Result<TomographyResult> {
    check_size(rho.num_qubits())?;
    if !(sigma >= 0.0) {
        return Err(EqsError::OutOfRange(format!("noise level {sigma} must be non-negative")));
    }
    let noisy = pauli_expectations(rho)?
        .into_iter()
        .map(|(p, v)| {
            let z: f64 = rng.sample(StandardNormal);
            (p, v + sigma * z)
        })
        .collect();
    reconstruct(rho.num_qubits(), noisy)
}

/// Raw and deviation-normalized overlap with a pure target.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FidelityReport {
    /// `⟨ψ|ρ|ψ⟩`
    pub raw: f64,
    /// `(⟨ψ|ρ|ψ⟩ − (1 − ε)/2ⁿ) / ε`, the overlap of the deviation part alone.
    pub normalized: f64,
}

/// `⟨ψ|ρ|ψ⟩`
pub fn state_fidelity(rho: &DensityMatrix, target: &StateVector) -> Result<f64> {
    if rho.num_qubits() != target.num_qubits() {
        return Err(EqsError::DimensionMismatch {
            expected: rho.dim(),
            found: target.dim(),
        });
    }
    let proj = target.amplitudes() * target.amplitudes().adjoint();
    Ok(rho.expectation_matrix(&proj)?.re)
}

/// Fidelity of a pseudo-pure state of polarization `eps` against `target`.
pub fn pps_fidelity(rho: &DensityMatrix, target: &StateVector, eps: f64) -> Result<FidelityReport> {
    if !(eps > 0.0 && eps <= 1.0) {
        return Err(EqsError::OutOfRange(format!("polarization {eps} outside (0, 1]")));
    }
    let raw = state_fidelity(rho, target)?;
    let normalized = (raw - (1.0 - eps) / rho.dim() as f64) / eps;
    Ok(FidelityReport { raw, normalized })
}
