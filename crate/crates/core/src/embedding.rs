//! One-ancilla embedding of states and Hamiltonians.
//!
//! A state `φ` becomes `|0⟩⊗Re φ + |1⟩⊗Im φ` and a Hamiltonian `H = A + iB`
//! becomes `H' = iσ₀⊗B − σ_y⊗A`. The embedded state stays real under `H'`,
//! and every anti-linear expectation `⟨φ|O|φ*⟩` equals
//! `⟨σ_z⊗O⟩ − i⟨σ_x⊗O⟩` evaluated on the embedded state.
//!
//! The ancilla is always qubit 0 of the enlarged register.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{EqsError, Result};
use crate::qcore::{
    self, check_same, expectation, hermitian_deviation, CMatrix, CVector, HermitianOperator, Pauli,
    PauliString, StateVector,
};
use crate::tolerance;

/// Real symmetric part `A` and real antisymmetric part `B` of `H = A + iB`.
#[derive(Debug, Clone, PartialEq)]
pub struct RealImagSplit {
    a: DMatrix<f64>,
    b: DMatrix<f64>,
}

impl RealImagSplit {
    pub fn a(&self) -> &DMatrix<f64> {
        &self.a
    }

    pub fn b(&self) -> &DMatrix<f64> {
        &self.b
    }

    pub fn num_qubits(&self) -> usize {
        self.a.nrows().trailing_zeros() as usize
    }

    /// `A + iB`
    pub fn reconstruct(&self) -> CMatrix {
        DMatrix::from_fn(self.a.nrows(), self.a.ncols(), |r, c| {
            Complex64::new(self.a[(r, c)], self.b[(r, c)])
        })
    }
}

/// Splits a Hermitian matrix into `A = Re H` and `B = Im H`.
///
/// Hermiticity is checked at [`tolerance::SPLIT_HERMITIAN`]; `A` is then
/// symmetrized and `B` antisymmetrized so that `H'` comes out exactly Hermitian.
pub fn split_matrix(h: &CMatrix) -> Result<RealImagSplit> {
    let deviation = hermitian_deviation(h);
    if deviation > tolerance::SPLIT_HERMITIAN {
        return Err(EqsError::NotHermitian { deviation });
    }
    let dim = h.nrows();
    let a = DMatrix::from_fn(dim, dim, |r, c| 0.5 * (h[(r, c)].re + h[(c, r)].re));
    let b = DMatrix::from_fn(dim, dim, |r, c| 0.5 * (h[(r, c)].im - h[(c, r)].im));
    Ok(RealImagSplit { a, b })
}

pub fn split_hamiltonian(h: &HermitianOperator) -> Result<RealImagSplit> {
    split_matrix(h.matrix())
}

/// `H' = iσ₀⊗B − σ_y⊗A`, i.e. the block matrix `[[iB, iA], [−iA, iB]]`.
pub fn embed_hamiltonian(split: &RealImagSplit) -> HermitianOperator {
    let dim = split.a.nrows();
    let i = Complex64::new(0.0, 1.0);
    let mut m = CMatrix::zeros(2 * dim, 2 * dim);
    for r in 0..dim {
        for c in 0..dim {
            let ib = i * split.b[(r, c)];
            let ia = i * split.a[(r, c)];
            m[(r, c)] = ib;
            m[(r + dim, c + dim)] = ib;
            m[(r, c + dim)] = ia;
            m[(r + dim, c)] = -ia;
        }
    }
    HermitianOperator::new(m).expect("embedded Hamiltonian is Hermitian by construction")
}

/// State on `n + 1` qubits whose qubit 0 is the ancilla.
#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddedState {
    state: StateVector,
}

impl EmbeddedState {
    pub fn new(state: StateVector) -> Result<Self> {
        if state.num_qubits() < 2 {
            return Err(EqsError::WrongQubitCount {
                expected: 2,
                found: state.num_qubits(),
            });
        }
        Ok(Self { state })
    }

    pub fn state(&self) -> &StateVector {
        &self.state
    }

    pub fn into_state(self) -> StateVector {
        self.state
    }

    /// Qubits of the simulated system (the ancilla excluded).
    pub fn system_qubits(&self) -> usize {
        self.state.num_qubits() - 1
    }

    /// `e^{−iH't}` applied to the embedded state.
    pub fn evolve(&self, embedded_h: &HermitianOperator, t: f64) -> Result<Self> {
        Ok(Self {
            state: qcore::evolve(&self.state, embedded_h, t)?,
        })
    }
}

/// `|0⟩⊗Re φ + |1⟩⊗Im φ`
pub fn embed_state(phi: &StateVector) -> EmbeddedState {
    let dim = phi.dim();
    let amps = phi.amplitudes();
    let big = CVector::from_fn(2 * dim, |i, _| {
        if i < dim {
            Complex64::new(amps[i].re, 0.0)
        } else {
            Complex64::new(amps[i - dim].im, 0.0)
        }
    });
    let state = StateVector::normalized(big).expect("embedding of a unit vector has unit norm");
    EmbeddedState { state }
}

/// Inverse of [`embed_state`]: `φ = (ancilla-0 block) + i·(ancilla-1 block)`.
///
/// Norm deviations up to [`tolerance::DECODE_NORM`] are renormalized away;
/// anything larger means the state is not the image of a valid embedding.
pub fn decode_state(big: &EmbeddedState) -> Result<StateVector> {
    let dim = big.state.dim() / 2;
    let amps = big.state.amplitudes();
    let i = Complex64::new(0.0, 1.0);
    let phi = CVector::from_fn(dim, |k, _| amps[k] + i * amps[k + dim]);
    let norm = phi.norm();
    if (norm - 1.0).abs() > tolerance::DECODE_NORM {
        return Err(EqsError::OffManifold { norm });
    }
    StateVector::normalized(phi)
}

/// Anti-linear operator `O·K`, with `K` the complex conjugation.
#[derive(Debug, Clone, PartialEq)]
pub struct AntilinearOperator {
    o: HermitianOperator,
    pauli: Option<PauliString>,
}

impl AntilinearOperator {
    pub fn new(o: HermitianOperator) -> Self {
        Self { o, pauli: None }
    }

    pub fn from_pauli(p: &PauliString) -> Self {
        Self {
            o: HermitianOperator::from_pauli(p),
            pauli: Some(p.clone()),
        }
    }

    pub fn parse(word: &str) -> Result<Self> {
        Ok(Self::from_pauli(&PauliString::parse(word)?))
    }

    pub fn linear_part(&self) -> &HermitianOperator {
        &self.o
    }

    pub fn num_qubits(&self) -> usize {
        self.o.num_qubits()
    }

    /// The two enlarged-space observables `σ_z⊗O` and `σ_x⊗O`, when `O` is a Pauli word.
    pub fn eqs_observables(&self) -> Option<[PauliString; 2]> {
        self.pauli
            .as_ref()
            .map(|p| [p.prepend(Pauli::Z), p.prepend(Pauli::X)])
    }
}

/// `⟨φ|O|φ*⟩` contracted literally.
pub fn antilinear_expectation_direct(phi: &StateVector, op: &AntilinearOperator) -> Result<Complex64> {
    check_same(op.num_qubits(), phi.num_qubits())?;
    let conj = phi.amplitudes().map(|z| z.conj());
    Ok(phi.amplitudes().dotc(&(op.o.matrix() * conj)))
}

/// Real expectations `(⟨σ_z⊗O⟩, ⟨σ_x⊗O⟩)` on the embedded state.
pub fn eqs_components(big: &EmbeddedState, op: &AntilinearOperator) -> Result<(f64, f64)> {
    check_same(op.num_qubits() + 1, big.state.num_qubits())?;
    let z = HermitianOperator::from_pauli(&PauliString::parse("Z")?).tensor(&op.o);
    let x = HermitianOperator::from_pauli(&PauliString::parse("X")?).tensor(&op.o);
    Ok((expectation(&big.state, &z)?, expectation(&big.state, &x)?))
}

/// `⟨σ_z⊗O⟩ − i⟨σ_x⊗O⟩` on the embedded state.
pub fn antilinear_expectation_eqs(big: &EmbeddedState, op: &AntilinearOperator) -> Result<Complex64> {
    let (z, x) = eqs_components(big, op)?;
    Ok(Complex64::new(z, -x))
}

/// Embedded Hamiltonian of `h` in one call.
pub fn embed_operator(h: &HermitianOperator) -> Result<HermitianOperator> {
    Ok(embed_hamiltonian(&split_hamiltonian(h)?))
}
