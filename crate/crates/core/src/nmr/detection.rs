use num_complex::Complex64;
use rand::RngExt;

use crate::circuits::{is_fid_accessible, ReadoutPlan};
use crate::error::{EqsError, Result};
use crate::qcore::{
    expectation, BasisProjector, CMatrix, DensityMatrix, HermitianOperator, PauliString, StateVector,
};
use crate::tolerance;

/// Noise knobs of the simulated spectrometer.
#[derive(Debug, Clone, PartialEq)]
pub struct NoiseModel {
    /// Polarization `ε` of the pseudo-pure state.
    pub polarization: f64,
    /// `1 − ⟨0…0|ρ_dev|0…0⟩` of the prepared deviation.
    pub pps_infidelity: f64,
    /// Per-spin T2 phase damping during delays and shaped pulses.
    pub dephasing: bool,
}

impl Default for NoiseModel {
    fn default() -> Self {
        Self {
            polarization: 1e-5,
            pps_infidelity: 0.013,
            dephasing: true,
        }
    }
}

fn check_polarization(eps: f64) -> Result<()> {
    if !(eps > 0.0 && eps <= 1.0) {
        return Err(EqsError::OutOfRange(format!("polarization {eps} outside (0, 1]")));
    }
    Ok(())
}

/// High-temperature equilibrium `I/2ⁿ + ε Σ_i σ_z^i`.
pub fn thermal_state(n: usize, eps: f64) -> Result<DensityMatrix> {
    check_polarization(eps)?;
    let dim = 1usize << n;
    let m = CMatrix::from_fn(dim, dim, |r, c| {
        if r != c {
            return Complex64::new(0.0, 0.0);
        }
        let ones = r.count_ones() as f64;
        Complex64::new(1.0 / dim as f64 + eps * (n as f64 - 2.0 * ones), 0.0)
    });
    let rho = DensityMatrix::from_hermitian(m)?;
    if rho.min_eigenvalue() < tolerance::EIGEN_FLOOR {
        return Err(EqsError::OutOfRange(format!(
            "polarization {eps} too large for a {n}-spin thermal state"
        )));
    }
    Ok(rho)
}

/// `(1 − ε)I/2ⁿ + ε|0…0⟩⟨0…0|`
pub fn prepare_pps(n: usize, eps: f64) -> Result<DensityMatrix> {
    prepare_pps_from_deviation(&StateVector::zero(n).to_density(), eps)
}

/// `(1 − ε)I/2ⁿ + ε ρ_dev`
pub fn prepare_pps_from_deviation(deviation: &DensityMatrix, eps: f64) -> Result<DensityMatrix> {
    check_polarization(eps)?;
    let dim = deviation.dim();
    let m = CMatrix::identity(dim, dim) * Complex64::new((1.0 - eps) / dim as f64, 0.0)
        + deviation.matrix() * Complex64::new(eps, 0.0);
    Ok(DensityMatrix::from_matrix_unchecked(m))
}

/// Deviation `(1 − p)|0…0⟩⟨0…0| + p σ` with `σ` a random state supported on the
/// complement of `|0…0⟩`, so its fidelity with the target is exactly `1 − p`.
pub fn erroneous_deviation<R: RngExt + ?Sized>(n: usize, infidelity: f64, rng: &mut R) -> Result<DensityMatrix> {
    if !(0.0..=1.0).contains(&infidelity) {
        return Err(EqsError::OutOfRange(format!("infidelity {infidelity} outside [0, 1]")));
    }
    let dim = 1usize << n;
    let mut sigma = DensityMatrix::random(n, rng).into_matrix();
    for k in 0..dim {
        sigma[(0, k)] = Complex64::new(0.0, 0.0);
        sigma[(k, 0)] = Complex64::new(0.0, 0.0);
    }
    let tr = sigma.trace().re;
    let mut m = sigma * Complex64::new(infidelity / tr, 0.0);
    m[(0, 0)] = Complex64::new(1.0 - infidelity, 0.0);
    DensityMatrix::new(m)
}

/// Pseudo-pure state with a preparation error of `infidelity`.
pub fn prepare_pps_with_error<R: RngExt + ?Sized>(
    n: usize,
    eps: f64,
    infidelity: f64,
    rng: &mut R,
) -> Result<DensityMatrix> {
    prepare_pps_from_deviation(&erroneous_deviation(n, infidelity, rng)?, eps)
}

fn with_projector(p: &PauliString, projector: Option<&BasisProjector>) -> HermitianOperator {
    let base = HermitianOperator::from_pauli(p);
    match projector {
        Some(proj) => {
            HermitianOperator::new(base.matrix().kronecker(&proj.to_matrix())).expect("tensor of Hermitian operators")
        }
        None => base,
    }
}

/// Raw FID signal `Tr(ρ·P⊗Π)` for an accessible Pauli `P`, scaled by `1/ε`.
pub fn measure_accessible(
    rho: &DensityMatrix,
    observable: &PauliString,
    projector: Option<&BasisProjector>,
    polarization: f64,
) -> Result<f64> {
    check_polarization(polarization)?;
    if !is_fid_accessible(observable) {
        return Err(EqsError::NotAccessible(observable.to_string()));
    }
    let op = with_projector(observable, projector);
    if op.num_qubits() != rho.num_qubits() {
        return Err(EqsError::WrongQubitCount {
            expected: rho.num_qubits(),
            found: op.num_qubits(),
        });
    }
    Ok(expectation(rho, &op)? / polarization)
}

/// Expectation of the plan's target recovered from `rho` through the readout
/// rotation, the accessible measurement and the sign.
pub fn measure_fid_observable(rho: &DensityMatrix, plan: &ReadoutPlan, polarization: f64) -> Result<f64> {
    let rotated = rho.transform(&plan.rotation_unitary())?;
    measure_rotated(&rotated, plan, polarization)
}

/// As [`measure_fid_observable`] for a state already taken through the readout rotation.
pub fn measure_rotated(rotated: &DensityMatrix, plan: &ReadoutPlan, polarization: f64) -> Result<f64> {
    Ok(plan.sign * measure_accessible(rotated, &plan.measured, plan.projector.as_ref(), polarization)?)
}
