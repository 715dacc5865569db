//! Concurrence and three-tangle, each computed twice: by contracting the
//! wavefunction directly and from the reduced set of embedded observables.

use num_complex::Complex64;

use crate::embedding::{
    antilinear_expectation_direct, eqs_components, AntilinearOperator, EmbeddedState,
};
use crate::error::{EqsError, Result};
use crate::qcore::{PauliString, StateVector};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Direct,
    Eqs,
}

/// Monotone value plus the real expectation values it was assembled from.
#[derive(Debug, Clone, PartialEq)]
pub struct MonotoneResult {
    pub value: f64,
    pub constituents: Vec<(PauliString, f64)>,
    pub method: Method,
}

impl MonotoneResult {
    /// Number of distinct measured observables behind the value.
    pub fn observable_count(&self) -> usize {
        self.constituents.len()
    }

    pub fn constituent(&self, label: &str) -> Option<f64> {
        self.constituents
            .iter()
            .find(|(p, _)| p.label() == label)
            .map(|&(_, v)| v)
    }
}

/// Anti-linear operators `O₁ = σ₀σ_yσ_y`, `O₂ = σ_xσ_yσ_y`, `O₃ = σ_zσ_yσ_y`
/// with the signs `(−, +, +)` they carry in the three-tangle.
pub const TANGLE_TERMS: [(&str, f64); 3] = [("IYY", -1.0), ("XYY", 1.0), ("ZYY", 1.0)];

/// Enlarged-space observables for the concurrence, in reporting order.
pub const CONCURRENCE_OBSERVABLES: [&str; 2] = ["ZYY", "XYY"];

/// Enlarged-space observables for the three-tangle, in reporting order.
pub const TANGLE_OBSERVABLES: [&str; 6] = ["ZIYY", "XIYY", "ZXYY", "XXYY", "ZZYY", "XZYY"];

fn clamp(value: f64) -> f64 {
    if value < 0.0 {
        0.0
    } else {
        value
    }
}

fn require_qubits(found: usize, expected: usize) -> Result<()> {
    if found != expected {
        return Err(EqsError::WrongQubitCount { expected, found });
    }
    Ok(())
}

/// `|⟨φ|σ_y⊗σ_y|φ*⟩|`
pub fn concurrence_direct(phi: &StateVector) -> Result<MonotoneResult> {
    require_qubits(phi.num_qubits(), 2)?;
    let value = antilinear_expectation_direct(phi, &AntilinearOperator::parse("YY")?)?.norm();
    Ok(MonotoneResult {
        value: clamp(value),
        constituents: Vec::new(),
        method: Method::Direct,
    })
}

/// `|⟨σ_zσ_yσ_y⟩ − i⟨σ_xσ_yσ_y⟩|` on the embedded state.
pub fn concurrence_eqs(big: &EmbeddedState) -> Result<MonotoneResult> {
    require_qubits(big.state().num_qubits(), 3)?;
    let (z, x) = eqs_components(big, &AntilinearOperator::parse("YY")?)?;
    concurrence_from_expectations(z, x)
}

/// Concurrence assembled from measured `⟨σ_zσ_yσ_y⟩` and `⟨σ_xσ_yσ_y⟩`.
pub fn concurrence_from_expectations(zyy: f64, xyy: f64) -> Result<MonotoneResult> {
    let value = Complex64::new(zyy, -xyy).norm();
    Ok(MonotoneResult {
        value: clamp(value),
        constituents: vec![
            (PauliString::parse(CONCURRENCE_OBSERVABLES[0])?, zyy),
            (PauliString::parse(CONCURRENCE_OBSERVABLES[1])?, xyy),
        ],
        method: Method::Eqs,
    })
}

/// `|−⟨O₁K⟩² + ⟨O₂K⟩² + ⟨O₃K⟩²|`, squares taken in complex arithmetic.
fn tangle_from_antilinear(values: [Complex64; 3]) -> f64 {
    TANGLE_TERMS
        .iter()
        .zip(values)
        .fold(Complex64::new(0.0, 0.0), |acc, (&(_, sign), v)| acc + v * v * sign)
        .norm()
}

pub fn three_tangle_direct(phi: &StateVector) -> Result<MonotoneResult> {
    require_qubits(phi.num_qubits(), 3)?;
    let mut values = [Complex64::new(0.0, 0.0); 3];
    for (slot, (word, _)) in values.iter_mut().zip(TANGLE_TERMS) {
        *slot = antilinear_expectation_direct(phi, &AntilinearOperator::parse(word)?)?;
    }
    Ok(MonotoneResult {
        value: clamp(tangle_from_antilinear(values)),
        constituents: Vec::new(),
        method: Method::Direct,
    })
}

/// Three-tangle from the six embedded observables.
pub fn three_tangle_eqs(big: &EmbeddedState) -> Result<MonotoneResult> {
    require_qubits(big.state().num_qubits(), 4)?;
    let mut measured = [0.0; 6];
    for (k, (word, _)) in TANGLE_TERMS.iter().enumerate() {
        let (z, x) = eqs_components(big, &AntilinearOperator::parse(word)?)?;
        // O₁ → (ZIYY, XIYY), O₂ → (ZXYY, XXYY), O₃ → (ZZYY, XZYY)
        measured[2 * k] = z;
        measured[2 * k + 1] = x;
    }
    three_tangle_from_expectations(&measured)
}

/// Three-tangle from expectations ordered as [`TANGLE_OBSERVABLES`].
pub fn three_tangle_from_expectations(measured: &[f64; 6]) -> Result<MonotoneResult> {
    let values = [0, 1, 2].map(|k| Complex64::new(measured[2 * k], -measured[2 * k + 1]));
    let constituents = TANGLE_OBSERVABLES
        .iter()
        .zip(measured)
        .map(|(w, &v)| Ok((PauliString::parse(w)?, v)))
        .collect::<Result<Vec<_>>>()?;
    Ok(MonotoneResult {
        value: clamp(tangle_from_antilinear(values)),
        constituents,
        method: Method::Eqs,
    })
}

/// Linear error propagation of a common standard deviation `sigma` on every
/// constituent through `|w|`, where `w` is the complex quantity inside the
/// modulus. At `w = 0` the gradient norm of `w` itself bounds the spread.
pub fn propagate_sigma(result: &MonotoneResult, sigma: f64) -> f64 {
    match result.constituents.len() {
        // |z − ix| has a unit-norm gradient wherever it is nonzero.
        2 => sigma,
        6 => {
            let m: Vec<f64> = result.constituents.iter().map(|&(_, v)| v).collect();
            let z = [0, 1, 2].map(|k| Complex64::new(m[2 * k], -m[2 * k + 1]));
            let w = TANGLE_TERMS
                .iter()
                .zip(z)
                .fold(Complex64::new(0.0, 0.0), |acc, (&(_, s), v)| acc + v * v * s);
            let mut sum_sq = 0.0;
            for (k, &(_, s)) in TANGLE_TERMS.iter().enumerate() {
                // ∂w/∂re = 2 s z_k, ∂w/∂x = −2i s z_k
                let d_re = z[k] * (2.0 * s);
                let d_x = z[k] * Complex64::new(0.0, -2.0 * s);
                if w.norm() > 1e-12 {
                    let unit = w.conj() / w.norm();
                    sum_sq += (unit * d_re).re.powi(2) + (unit * d_x).re.powi(2);
                } else {
                    sum_sq += d_re.norm_sqr() + d_x.norm_sqr();
                }
            }
            sigma * sum_sq.sqrt()
        }
        _ => sigma,
    }
}
