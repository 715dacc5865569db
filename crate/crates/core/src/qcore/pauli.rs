use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;
use num_complex::Complex64;

use super::{CMatrix, CVector};
use crate::error::{EqsError, Result};
use crate::tolerance;

/// Single-qubit Pauli letter.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    pub const ALL: [Pauli; 4] = [Pauli::I, Pauli::X, Pauli::Y, Pauli::Z];

    pub fn from_char(c: char) -> Result<Self> {
        match c.to_ascii_uppercase() {
            'I' | '0' => Ok(Pauli::I),
            'X' => Ok(Pauli::X),
            'Y' => Ok(Pauli::Y),
            'Z' => Ok(Pauli::Z),
            other => Err(EqsError::InvalidPauliLetter(other)),
        }
    }

    pub fn to_char(self) -> char {
        match self {
            Pauli::I => 'I',
            Pauli::X => 'X',
            Pauli::Y => 'Y',
            Pauli::Z => 'Z',
        }
    }

    /// The standard 2×2 matrix.
    pub fn matrix(self) -> CMatrix {
        let o = Complex64::new(0.0, 0.0);
        let l = Complex64::new(1.0, 0.0);
        let i = Complex64::new(0.0, 1.0);
        match self {
            Pauli::I => DMatrix::from_row_slice(2, 2, &[l, o, o, l]),
            Pauli::X => DMatrix::from_row_slice(2, 2, &[o, l, l, o]),
            Pauli::Y => DMatrix::from_row_slice(2, 2, &[o, -i, i, o]),
            Pauli::Z => DMatrix::from_row_slice(2, 2, &[l, o, o, -l]),
        }
    }

    /// Matrix element ⟨row|P|col⟩ for single bits.
    fn element(self, row: usize, col: usize) -> Complex64 {
        match (self, row, col) {
            (Pauli::I, r, c) if r == c => Complex64::new(1.0, 0.0),
            (Pauli::X, r, c) if r != c => Complex64::new(1.0, 0.0),
            (Pauli::Y, 0, 1) => Complex64::new(0.0, -1.0),
            (Pauli::Y, 1, 0) => Complex64::new(0.0, 1.0),
            (Pauli::Z, 0, 0) => Complex64::new(1.0, 0.0),
            (Pauli::Z, 1, 1) => Complex64::new(-1.0, 0.0),
            _ => Complex64::new(0.0, 0.0),
        }
    }

    fn flips(self) -> bool {
        matches!(self, Pauli::X | Pauli::Y)
    }
}

/// Weighted tensor product of Pauli letters.
///
/// The leftmost letter acts on qubit 0, which is the most significant bit of
/// the amplitude index.
#[derive(Debug, Clone, PartialEq)]
pub struct PauliString {
    word: Vec<Pauli>,
    coefficient: f64,
}

impl PauliString {
    pub fn new(word: Vec<Pauli>, coefficient: f64) -> Result<Self> {
        if word.is_empty() {
            return Err(EqsError::EmptyWord);
        }
        if word.len() > tolerance::MAX_QUBITS {
            return Err(EqsError::RegisterTooLarge {
                n: word.len(),
                limit: tolerance::MAX_QUBITS,
            });
        }
        Ok(Self { word, coefficient })
    }

    /// Parses a bare word such as `"XYZ"`; `0` is accepted as an alias of `I`.
    pub fn parse(word: &str) -> Result<Self> {
        let letters = word
            .chars()
            .filter(|c| !c.is_whitespace())
            .map(Pauli::from_char)
            .collect::<Result<Vec<_>>>()?;
        Self::new(letters, 1.0)
    }

    pub fn with_coefficient(mut self, coefficient: f64) -> Self {
        self.coefficient = coefficient;
        self
    }

    /// Identity on `n` qubits.
    pub fn identity(n: usize) -> Result<Self> {
        Self::new(vec![Pauli::I; n], 1.0)
    }

    pub fn word(&self) -> &[Pauli] {
        &self.word
    }

    pub fn coefficient(&self) -> f64 {
        self.coefficient
    }

    pub fn num_qubits(&self) -> usize {
        self.word.len()
    }

    pub fn letter(&self, qubit: usize) -> Pauli {
        self.word[qubit]
    }

    pub fn is_identity(&self) -> bool {
        self.word.iter().all(|&p| p == Pauli::I)
    }

    /// Word as letters only, without the coefficient.
    pub fn label(&self) -> String {
        self.word.iter().map(|p| p.to_char()).collect()
    }

    /// `letter ⊗ self`.
    pub fn prepend(&self, letter: Pauli) -> Self {
        let mut word = Vec::with_capacity(self.word.len() + 1);
        word.push(letter);
        word.extend_from_slice(&self.word);
        Self {
            word,
            coefficient: self.coefficient,
        }
    }

    pub fn tensor(&self, other: &PauliString) -> Self {
        let mut word = self.word.clone();
        word.extend_from_slice(&other.word);
        Self {
            word,
            coefficient: self.coefficient * other.coefficient,
        }
    }

    /// Dense matrix, built entry by entry from the bit structure.
    pub fn to_matrix(&self) -> CMatrix {
        let n = self.word.len();
        let dim = 1usize << n;
        let flip_mask = self.flip_mask();
        let mut m = DMatrix::zeros(dim, dim);
        for row in 0..dim {
            let col = row ^ flip_mask;
            m[(row, col)] = self.row_phase(row) * self.coefficient;
        }
        m
    }

    /// `P|ψ⟩` without forming the matrix.
    pub fn apply(&self, amplitudes: &CVector) -> CVector {
        let dim = amplitudes.len();
        let flip_mask = self.flip_mask();
        let mut out = CVector::zeros(dim);
        for row in 0..dim {
            let col = row ^ flip_mask;
            out[row] = self.row_phase(row) * self.coefficient * amplitudes[col];
        }
        out
    }

    fn flip_mask(&self) -> usize {
        let n = self.word.len();
        self.word
            .iter()
            .enumerate()
            .filter(|(_, p)| p.flips())
            .fold(0, |mask, (q, _)| mask | (1 << (n - 1 - q)))
    }

    fn row_phase(&self, row: usize) -> Complex64 {
        let n = self.word.len();
        let col = row ^ self.flip_mask();
        self.word
            .iter()
            .enumerate()
            .fold(Complex64::new(1.0, 0.0), |acc, (q, p)| {
                let shift = n - 1 - q;
                acc * p.element((row >> shift) & 1, (col >> shift) & 1)
            })
    }
}

impl FromStr for PauliString {
    type Err = EqsError;

    fn from_str(s: &str) -> Result<Self> {
        Self::parse(s)
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coefficient == 1.0 {
            write!(f, "{}", self.label())
        } else if self.coefficient == -1.0 {
            write!(f, "-{}", self.label())
        } else {
            write!(f, "{}*{}", self.coefficient, self.label())
        }
    }
}

/// Every non-identity Pauli word on `n` qubits in lexicographic order (I < X < Y < Z).
pub fn all_pauli_words(n: usize) -> Vec<PauliString> {
    let count = 1usize << (2 * n);
    (1..count)
        .map(|mut index| {
            let mut word = vec![Pauli::I; n];
            for slot in word.iter_mut().rev() {
                *slot = Pauli::ALL[index & 3];
                index >>= 2;
            }
            PauliString { word, coefficient: 1.0 }
        })
        .collect()
}
