use std::f64::consts::PI;
use std::fmt;

use num_complex::Complex64;

use crate::error::{EqsError, Result};
use crate::qcore::{CMatrix, Pauli};

/// Gate of an EQS circuit. Rotations follow `R_a(θ) = exp(−iθσ_a/2)`.
#[derive(Debug, Clone, PartialEq)]
pub enum Gate {
    Cnot { control: usize, target: usize },
    Rx { qubit: usize, angle: f64 },
    Ry { qubit: usize, angle: f64 },
    Rz { qubit: usize, angle: f64 },
    /// Free evolution `exp(−i·(π/2)·J·duration·σ_z^aσ_z^b)` under a scalar coupling of `coupling_hz`.
    JEvolution {
        a: usize,
        b: usize,
        duration: f64,
        coupling_hz: f64,
    },
    Barrier,
}

impl Gate {
    pub fn qubits(&self) -> Vec<usize> {
        match *self {
            Gate::Cnot { control, target } => vec![control, target],
            Gate::Rx { qubit, .. } | Gate::Ry { qubit, .. } | Gate::Rz { qubit, .. } => vec![qubit],
            Gate::JEvolution { a, b, .. } => vec![a, b],
            Gate::Barrier => Vec::new(),
        }
    }

    pub fn validate(&self, n: usize) -> Result<()> {
        let qubits = self.qubits();
        for &q in &qubits {
            if q >= n {
                return Err(EqsError::QubitOutOfRange { index: q, n });
            }
        }
        if qubits.len() == 2 && qubits[0] == qubits[1] {
            return Err(EqsError::RepeatedQubit(qubits[0]));
        }
        if let Gate::JEvolution { duration, .. } = *self {
            if duration < 0.0 {
                return Err(EqsError::NegativeTime(duration));
            }
        }
        Ok(())
    }

    pub fn inverse(&self) -> Gate {
        match *self {
            Gate::Cnot { .. } | Gate::Barrier => self.clone(),
            Gate::Rx { qubit, angle } => Gate::Rx { qubit, angle: -angle },
            Gate::Ry { qubit, angle } => Gate::Ry { qubit, angle: -angle },
            Gate::Rz { qubit, angle } => Gate::Rz { qubit, angle: -angle },
            Gate::JEvolution {
                a,
                b,
                duration,
                coupling_hz,
            } => Gate::JEvolution {
                a,
                b,
                duration,
                coupling_hz: -coupling_hz,
            },
        }
    }

    /// Full `2ⁿ × 2ⁿ` matrix on an `n`-qubit register.
    pub fn matrix(&self, n: usize) -> CMatrix {
        let dim = 1usize << n;
        let bit = |q: usize| 1usize << (n - 1 - q);
        match *self {
            Gate::Cnot { control, target } => {
                let mut m = CMatrix::zeros(dim, dim);
                for col in 0..dim {
                    let row = if col & bit(control) != 0 { col ^ bit(target) } else { col };
                    m[(row, col)] = Complex64::new(1.0, 0.0);
                }
                m
            }
            Gate::Rx { qubit, angle } => embed_single(n, qubit, &rotation(Pauli::X, angle)),
            Gate::Ry { qubit, angle } => embed_single(n, qubit, &rotation(Pauli::Y, angle)),
            Gate::Rz { qubit, angle } => embed_single(n, qubit, &rotation(Pauli::Z, angle)),
            Gate::JEvolution {
                a,
                b,
                duration,
                coupling_hz,
            } => {
                let phase = 0.5 * PI * coupling_hz * duration;
                CMatrix::from_fn(dim, dim, |r, c| {
                    if r != c {
                        return Complex64::new(0.0, 0.0);
                    }
                    let za = if r & bit(a) == 0 { 1.0 } else { -1.0 };
                    let zb = if r & bit(b) == 0 { 1.0 } else { -1.0 };
                    Complex64::from_polar(1.0, -phase * za * zb)
                })
            }
            Gate::Barrier => CMatrix::identity(dim, dim),
        }
    }
}

/// `exp(−iθσ/2)` as a 2×2 matrix.
pub fn rotation(axis: Pauli, angle: f64) -> CMatrix {
    let (s, c) = (angle / 2.0).sin_cos();
    let id = CMatrix::identity(2, 2) * Complex64::new(c, 0.0);
    id - axis.matrix() * Complex64::new(0.0, s)
}

/// Lifts a 2×2 matrix acting on `qubit` into the `n`-qubit register.
pub fn embed_single(n: usize, qubit: usize, m: &CMatrix) -> CMatrix {
    let mut out = CMatrix::identity(1, 1);
    for q in 0..n {
        out = if q == qubit {
            out.kronecker(m)
        } else {
            out.kronecker(&CMatrix::identity(2, 2))
        };
    }
    out
}

impl fmt::Display for Gate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Gate::Cnot { control, target } => write!(f, "CNOT {control} {target}"),
            Gate::Rx { qubit, angle } => write!(f, "RX {qubit} {angle:.10}"),
            Gate::Ry { qubit, angle } => write!(f, "RY {qubit} {angle:.10}"),
            Gate::Rz { qubit, angle } => write!(f, "RZ {qubit} {angle:.10}"),
            Gate::JEvolution {
                a,
                b,
                duration,
                coupling_hz,
            } => write!(f, "J {a} {b} {duration:.10} {coupling_hz}"),
            Gate::Barrier => write!(f, "BARRIER"),
        }
    }
}
