use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::RngExt;
use rand_distr::{Distribution, StandardNormal};

use super::operator::{check_same, hermitian_deviation, hermitian_eigen, HermitianOperator, UnitaryMatrix};
use super::{qubits_for_dim, CMatrix, CVector};
use crate::error::{EqsError, Result};
use crate::tolerance;

/// Anything an observable can be evaluated on.
pub trait QuantumState {
    fn num_qubits(&self) -> usize;

    /// Raw complex ⟨O⟩ for an arbitrary (not necessarily Hermitian) matrix.
    fn expectation_matrix(&self, m: &CMatrix) -> Result<Complex64>;
}

/// Pure state of `n` qubits with unit Euclidean norm.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    n: usize,
    amplitudes: CVector,
}

impl StateVector {
    /// Validates the norm at [`tolerance::NORM`].
    pub fn new(amplitudes: CVector) -> Result<Self> {
        let n = qubits_for_dim(amplitudes.len(), amplitudes.len())?;
        let norm = amplitudes.norm();
        if (norm - 1.0).abs() > tolerance::NORM {
            return Err(EqsError::NotNormalized { norm });
        }
        Ok(Self { n, amplitudes })
    }

    /// Normalizes `amplitudes` before validation.
    pub fn normalized(amplitudes: CVector) -> Result<Self> {
        let norm = amplitudes.norm();
        if norm == 0.0 || !norm.is_finite() {
            return Err(EqsError::NotNormalized { norm });
        }
        Self::new(amplitudes / Complex64::new(norm, 0.0))
    }

    /// Computational basis state `|index⟩`.
    pub fn basis(n: usize, index: usize) -> Self {
        let mut amplitudes = CVector::zeros(1 << n);
        amplitudes[index] = Complex64::new(1.0, 0.0);
        Self { n, amplitudes }
    }

    /// `|0…0⟩`
    pub fn zero(n: usize) -> Self {
        Self::basis(n, 0)
    }

    /// Parses a bit string such as `"0110"`.
    pub fn from_bits(bits: &str) -> Result<Self> {
        let n = bits.len();
        let index = usize::from_str_radix(bits, 2).map_err(|_| EqsError::Parse {
            line: 0,
            message: format!("invalid bit string '{bits}'"),
        })?;
        Ok(Self::basis(n, index))
    }

    /// Haar-like random state from normally distributed amplitudes.
    pub fn random<R: RngExt + ?Sized>(n: usize, rng: &mut R) -> Self {
        let amplitudes = CVector::from_fn(1 << n, |_, _| {
            Complex64::new(StandardNormal.sample(rng), StandardNormal.sample(rng))
        });
        let norm = amplitudes.norm();
        Self {
            n,
            amplitudes: amplitudes / Complex64::new(norm, 0.0),
        }
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &CVector {
        &self.amplitudes
    }

    pub fn amplitude(&self, index: usize) -> Complex64 {
        self.amplitudes[index]
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes.norm()
    }

    /// ⟨self|other⟩
    pub fn inner(&self, other: &StateVector) -> Result<Complex64> {
        check_same(self.n, other.n)?;
        Ok(self.amplitudes.dotc(&other.amplitudes))
    }

    pub fn tensor(&self, other: &StateVector) -> Self {
        Self {
            n: self.n + other.n,
            amplitudes: self.amplitudes.kronecker(&other.amplitudes),
        }
    }

    /// |⟨self|other⟩|², the phase-invariant overlap.
    pub fn fidelity(&self, other: &StateVector) -> Result<f64> {
        Ok(self.inner(other)?.norm_sqr())
    }

    pub fn to_density(&self) -> DensityMatrix {
        DensityMatrix {
            n: self.n,
            matrix: &self.amplitudes * self.amplitudes.adjoint(),
        }
    }
}

impl QuantumState for StateVector {
    fn num_qubits(&self) -> usize {
        self.n
    }

    fn expectation_matrix(&self, m: &CMatrix) -> Result<Complex64> {
        check_same(self.dim(), m.nrows())?;
        Ok(self.amplitudes.dotc(&(m * &self.amplitudes)))
    }
}

/// Mixed state of `n` qubits.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    n: usize,
    matrix: CMatrix,
}

impl DensityMatrix {
    /// Validates Hermiticity, unit trace and the eigenvalue floor.
    pub fn new(matrix: CMatrix) -> Result<Self> {
        let rho = Self::from_hermitian(matrix)?;
        let min = rho.min_eigenvalue();
        if min < tolerance::EIGEN_FLOOR {
            return Err(EqsError::InvalidDensityMatrix(format!(
                "negative eigenvalue {min:.3e}"
            )));
        }
        Ok(rho)
    }

    /// Validates Hermiticity and unit trace but not positivity. Linear-inversion
    /// reconstructions from noisy data may leave the positive cone.
    pub fn from_hermitian(matrix: CMatrix) -> Result<Self> {
        let n = qubits_for_dim(matrix.nrows(), matrix.ncols())?;
        let deviation = hermitian_deviation(&matrix);
        if deviation > tolerance::HERMITIAN {
            return Err(EqsError::NotHermitian { deviation });
        }
        let trace = matrix.trace();
        if (trace.re - 1.0).abs() > tolerance::TRACE || trace.im.abs() > tolerance::TRACE {
            return Err(EqsError::InvalidDensityMatrix(format!("trace {trace}")));
        }
        Ok(Self { n, matrix })
    }

    pub(crate) fn from_matrix_unchecked(matrix: CMatrix) -> Self {
        let n = matrix.nrows().trailing_zeros() as usize;
        Self { n, matrix }
    }

    pub fn maximally_mixed(n: usize) -> Self {
        let dim = 1 << n;
        Self {
            n,
            matrix: DMatrix::identity(dim, dim) / Complex64::new(dim as f64, 0.0),
        }
    }

    /// Random full-rank state `G G† / Tr(G G†)` with Gaussian `G`.
    pub fn random<R: RngExt + ?Sized>(n: usize, rng: &mut R) -> Self {
        let dim = 1 << n;
        let g = DMatrix::from_fn(dim, dim, |_, _| {
            Complex64::new(StandardNormal.sample(rng), StandardNormal.sample(rng))
        });
        let m = &g * g.adjoint();
        let trace = m.trace();
        let mut matrix = m / trace;
        symmetrize(&mut matrix);
        Self { n, matrix }
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> CMatrix {
        self.matrix
    }

    pub fn trace(&self) -> Complex64 {
        self.matrix.trace()
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        hermitian_eigen(&self.matrix).0
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eigenvalues().first().copied().unwrap_or(0.0)
    }

    pub fn purity(&self) -> f64 {
        (&self.matrix * &self.matrix).trace().re
    }

    /// `U ρ U†`
    pub fn transform(&self, u: &UnitaryMatrix) -> Result<Self> {
        check_same(self.n, u.num_qubits())?;
        let mut matrix = u.matrix() * &self.matrix * u.matrix().adjoint();
        symmetrize(&mut matrix);
        Ok(Self { n: self.n, matrix })
    }

    pub fn tensor(&self, other: &DensityMatrix) -> Self {
        Self {
            n: self.n + other.n,
            matrix: self.matrix.kronecker(&other.matrix),
        }
    }

    /// Trace over every qubit not listed in `keep` (kept in ascending order).
    pub fn partial_trace(&self, keep: &[usize]) -> Result<Self> {
        let mut keep = keep.to_vec();
        keep.sort_unstable();
        keep.dedup();
        for &q in &keep {
            if q >= self.n {
                return Err(EqsError::QubitOutOfRange { index: q, n: self.n });
            }
        }
        let traced: Vec<usize> = (0..self.n).filter(|q| !keep.contains(q)).collect();
        let k = keep.len();
        let sub = 1usize << k;
        let env = 1usize << traced.len();
        let compose = |kept_bits: usize, env_bits: usize| -> usize {
            let mut index = 0usize;
            for (i, &q) in keep.iter().enumerate() {
                let bit = (kept_bits >> (k - 1 - i)) & 1;
                index |= bit << (self.n - 1 - q);
            }
            for (i, &q) in traced.iter().enumerate() {
                let bit = (env_bits >> (traced.len() - 1 - i)) & 1;
                index |= bit << (self.n - 1 - q);
            }
            index
        };
        let mut out = DMatrix::zeros(sub, sub);
        for r in 0..sub {
            for c in 0..sub {
                let mut acc = Complex64::new(0.0, 0.0);
                for e in 0..env {
                    acc += self.matrix[(compose(r, e), compose(c, e))];
                }
                out[(r, c)] = acc;
            }
        }
        Ok(Self { n: k, matrix: out })
    }
}

impl QuantumState for DensityMatrix {
    fn num_qubits(&self) -> usize {
        self.n
    }

    fn expectation_matrix(&self, m: &CMatrix) -> Result<Complex64> {
        check_same(self.dim(), m.nrows())?;
        // Tr(ρ·M) = Σ_ij ρ_ij M_ji
        let mut acc = Complex64::new(0.0, 0.0);
        for i in 0..self.dim() {
            for j in 0..self.dim() {
                acc += self.matrix[(i, j)] * m[(j, i)];
            }
        }
        Ok(acc)
    }
}

/// Forces exact Hermiticity by averaging with the adjoint.
pub(crate) fn symmetrize(m: &mut CMatrix) {
    let adj = m.adjoint();
    *m += adj;
    *m /= Complex64::new(2.0, 0.0);
}

/// Real expectation value ⟨obs⟩; any imaginary residue must be below
/// [`tolerance::IMAG_RESIDUE`] (relative to the operator scale) and is dropped.
pub fn expectation<S: QuantumState + ?Sized>(state: &S, obs: &HermitianOperator) -> Result<f64> {
    check_same(state.num_qubits(), obs.num_qubits())?;
    let value = state.expectation_matrix(obs.matrix())?;
    let scale = obs.matrix().iter().fold(1.0f64, |acc, z| acc.max(z.norm()));
    debug_assert!(
        value.im.abs() <= tolerance::IMAG_RESIDUE * scale,
        "imaginary residue {} in expectation value",
        value.im
    );
    Ok(value.re)
}

/// `K|ψ⟩ = |ψ*⟩`
pub fn conjugate_state(state: &StateVector) -> StateVector {
    StateVector {
        n: state.n,
        amplitudes: state.amplitudes.map(|z| z.conj()),
    }
}

/// `U|ψ⟩`
pub fn apply_unitary(u: &UnitaryMatrix, state: &StateVector) -> Result<StateVector> {
    check_same(state.n, u.num_qubits())?;
    Ok(StateVector {
        n: state.n,
        amplitudes: u.matrix() * &state.amplitudes,
    })
}

/// `e^{−i·h·t}|ψ⟩`
pub fn evolve(state: &StateVector, h: &HermitianOperator, t: f64) -> Result<StateVector> {
    check_same(state.n, h.num_qubits())?;
    let u = super::operator::matrix_exponential(h, t)?;
    apply_unitary(&u, state)
}

/// Projector onto a computational basis string of trailing qubits, e.g. `|0⟩⟨0|`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BasisProjector {
    bits: Vec<u8>,
}

impl BasisProjector {
    pub fn new(bits: Vec<u8>) -> Result<Self> {
        if let Some(&bad) = bits.iter().find(|&&b| b > 1) {
            return Err(EqsError::OutOfRange(format!("projector bit {bad}")));
        }
        if bits.is_empty() {
            return Err(EqsError::EmptyWord);
        }
        Ok(Self { bits })
    }

    /// Parses a bit string such as `"0"` or `"01"`.
    pub fn parse(bits: &str) -> Result<Self> {
        let parsed = bits
            .chars()
            .map(|c| match c {
                '0' => Ok(0),
                '1' => Ok(1),
                _ => Err(EqsError::Parse {
                    line: 0,
                    message: format!("invalid projector '{bits}'"),
                }),
            })
            .collect::<Result<Vec<u8>>>()?;
        Self::new(parsed)
    }

    pub fn zeros(count: usize) -> Self {
        Self { bits: vec![0; count] }
    }

    pub fn bits(&self) -> &[u8] {
        &self.bits
    }

    pub fn num_qubits(&self) -> usize {
        self.bits.len()
    }

    pub fn label(&self) -> String {
        self.bits.iter().map(|b| char::from(b'0' + b)).collect()
    }

    pub fn to_matrix(&self) -> CMatrix {
        let dim = 1 << self.bits.len();
        let index = self.bits.iter().fold(0usize, |acc, &b| (acc << 1) | b as usize);
        let mut m = DMatrix::zeros(dim, dim);
        m[(index, index)] = Complex64::new(1.0, 0.0);
        m
    }
}

/// `⟨obs ⊗ |k⟩⟨k|⟩` where the projector covers the trailing qubits; no renormalization.
pub fn partial_expectation<S: QuantumState + ?Sized>(
    state: &S,
    obs: &HermitianOperator,
    projector: &BasisProjector,
) -> Result<f64> {
    let full = HermitianOperator::new(obs.matrix().kronecker(&projector.to_matrix()))?;
    expectation(state, &full)
}

/// Column vector helper for tests and callers building states by hand.
pub fn amplitudes_from(values: &[(f64, f64)]) -> CVector {
    DVector::from_iterator(values.len(), values.iter().map(|&(re, im)| Complex64::new(re, im)))
}
