use nalgebra::DMatrix;
use num_complex::Complex64;

use super::pauli::PauliString;
use super::{qubits_for_dim, CMatrix};
use crate::error::{EqsError, Result};
use crate::tolerance;

/// Largest |M − M†| entry.
pub fn hermitian_deviation(m: &CMatrix) -> f64 {
    let mut worst: f64 = 0.0;
    for r in 0..m.nrows() {
        for c in r..m.ncols() {
            worst = worst.max((m[(r, c)] - m[(c, r)].conj()).norm());
        }
    }
    worst
}

/// Largest |U†U − I| entry.
pub fn unitary_deviation(m: &CMatrix) -> f64 {
    let product = m.adjoint() * m;
    let mut worst: f64 = 0.0;
    for r in 0..product.nrows() {
        for c in 0..product.ncols() {
            let target = if r == c { 1.0 } else { 0.0 };
            worst = worst.max((product[(r, c)] - Complex64::new(target, 0.0)).norm());
        }
    }
    worst
}

fn max_abs(m: &CMatrix) -> f64 {
    m.iter().fold(0.0, |acc: f64, z| acc.max(z.norm()))
}

/// Observable on `n` qubits; the matrix equals its conjugate transpose.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianOperator {
    n: usize,
    matrix: CMatrix,
}

impl HermitianOperator {
    /// Validates Hermiticity at [`tolerance::HERMITIAN`], relative to the largest entry.
    pub fn new(matrix: CMatrix) -> Result<Self> {
        let n = qubits_for_dim(matrix.nrows(), matrix.ncols())?;
        let deviation = hermitian_deviation(&matrix);
        if deviation > tolerance::HERMITIAN * max_abs(&matrix).max(1.0) {
            return Err(EqsError::NotHermitian { deviation });
        }
        Ok(Self { n, matrix })
    }

    pub fn zero(n: usize) -> Self {
        let dim = 1 << n;
        Self {
            n,
            matrix: DMatrix::zeros(dim, dim),
        }
    }

    pub fn identity(n: usize) -> Self {
        let dim = 1 << n;
        Self {
            n,
            matrix: DMatrix::identity(dim, dim),
        }
    }

    pub fn from_pauli(p: &PauliString) -> Self {
        Self {
            n: p.num_qubits(),
            matrix: p.to_matrix(),
        }
    }

    /// Sum of weighted Pauli strings on a common register.
    pub fn from_paulis(terms: &[PauliString]) -> Result<Self> {
        let first = terms.first().ok_or(EqsError::EmptyWord)?;
        let n = first.num_qubits();
        let mut out = Self::zero(n);
        for term in terms {
            if term.num_qubits() != n {
                return Err(EqsError::DimensionMismatch {
                    expected: n,
                    found: term.num_qubits(),
                });
            }
            out.matrix += term.to_matrix();
        }
        Ok(out)
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

    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            n: self.n,
            matrix: &self.matrix * Complex64::new(factor, 0.0),
        }
    }

    pub fn add(&self, other: &HermitianOperator) -> Result<Self> {
        check_same(self.n, other.n)?;
        Ok(Self {
            n: self.n,
            matrix: &self.matrix + &other.matrix,
        })
    }

    pub fn tensor(&self, other: &HermitianOperator) -> Self {
        Self {
            n: self.n + other.n,
            matrix: self.matrix.kronecker(&other.matrix),
        }
    }

    /// Eigenvalues (ascending) and the matching orthonormal eigenvectors as columns.
    pub fn eigen(&self) -> (Vec<f64>, CMatrix) {
        hermitian_eigen(&self.matrix)
    }
}

/// Unitary on `n` qubits.
#[derive(Debug, Clone, PartialEq)]
pub struct UnitaryMatrix {
    n: usize,
    matrix: CMatrix,
}

impl UnitaryMatrix {
    /// Validates U†U = I at [`tolerance::UNITARY`].
    pub fn new(matrix: CMatrix) -> Result<Self> {
        let n = qubits_for_dim(matrix.nrows(), matrix.ncols())?;
        let deviation = unitary_deviation(&matrix);
        if deviation > tolerance::UNITARY {
            return Err(EqsError::NotUnitary { deviation });
        }
        Ok(Self { n, matrix })
    }

    pub fn identity(n: usize) -> Self {
        let dim = 1 << n;
        Self {
            n,
            matrix: DMatrix::identity(dim, dim),
        }
    }

    pub(crate) fn from_matrix_unchecked(matrix: CMatrix) -> Self {
        let n = matrix.nrows().trailing_zeros() as usize;
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

    pub fn adjoint(&self) -> Self {
        Self {
            n: self.n,
            matrix: self.matrix.adjoint(),
        }
    }

    /// `self · other` (apply `other` first).
    pub fn compose(&self, other: &UnitaryMatrix) -> Result<Self> {
        check_same(self.n, other.n)?;
        Ok(Self {
            n: self.n,
            matrix: &self.matrix * &other.matrix,
        })
    }

    pub fn tensor(&self, other: &UnitaryMatrix) -> Self {
        Self {
            n: self.n + other.n,
            matrix: self.matrix.kronecker(&other.matrix),
        }
    }

    /// Phase-invariant overlap |Tr(other† · self)| / 2ⁿ.
    pub fn overlap(&self, other: &UnitaryMatrix) -> Result<f64> {
        check_same(self.n, other.n)?;
        Ok(trace_overlap(&other.matrix, &self.matrix) / self.dim() as f64)
    }
}

/// |Tr(a† b)|
pub(crate) fn trace_overlap(a: &CMatrix, b: &CMatrix) -> f64 {
    a.iter()
        .zip(b.iter())
        .fold(Complex64::new(0.0, 0.0), |acc, (x, y)| acc + x.conj() * y)
        .norm()
}

pub(crate) fn check_same(expected: usize, found: usize) -> Result<()> {
    if expected != found {
        return Err(EqsError::DimensionMismatch { expected, found });
    }
    Ok(())
}

/// Spectral decomposition of a Hermitian matrix: ascending eigenvalues and eigenvector columns.
pub fn hermitian_eigen(m: &CMatrix) -> (Vec<f64>, CMatrix) {
    let eig = m.clone().symmetric_eigen();
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = DMatrix::from_fn(m.nrows(), m.ncols(), |r, c| eig.eigenvectors[(r, order[c])]);
    (values, vectors)
}

/// `e^{−i·h·t}` through the eigendecomposition of `h`.
pub fn matrix_exponential(h: &HermitianOperator, t: f64) -> Result<UnitaryMatrix> {
    if t < 0.0 {
        return Err(EqsError::NegativeTime(t));
    }
    Ok(UnitaryMatrix {
        n: h.n,
        matrix: exp_i_hermitian(&h.matrix, -t),
    })
}

/// `e^{i·s·h}` for a Hermitian matrix `h` and any real `s`.
pub(crate) fn exp_i_hermitian(h: &CMatrix, s: f64) -> CMatrix {
    let (values, vectors) = hermitian_eigen(h);
    let mut scaled = vectors.clone();
    for (c, lambda) in values.iter().enumerate() {
        let phase = Complex64::from_polar(1.0, lambda * s);
        for r in 0..scaled.nrows() {
            scaled[(r, c)] *= phase;
        }
    }
    scaled * vectors.adjoint()
}
