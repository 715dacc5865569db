use std::f64::consts::PI;
use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{EqsError, Result};
use crate::qcore::{CMatrix, HermitianOperator};

/// Weakly coupled homonuclear spin register in the frame rotating at `reference_hz`.
#[derive(Debug, Clone, PartialEq)]
pub struct SpinSystem {
    labels: Vec<String>,
    shifts_hz: Vec<f64>,
    reference_hz: f64,
    couplings_hz: Vec<Vec<f64>>,
    t2_s: Vec<f64>,
}

/// On-disk layout of a molecule file. Couplings are the upper triangle, row by row:
/// `[[J12, J13, J14], [J23, J24], [J34]]`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MoleculeFile {
    pub spins: Vec<String>,
    pub shifts_hz: Vec<f64>,
    pub reference_hz: f64,
    pub j_couplings_hz: Vec<Vec<f64>>,
    pub t2_s: Vec<f64>,
}

/// Synthetic four-carbon register shipped as the default. Not measured values.
pub const SYNTHETIC_MOLECULE: &str = include_str!("../../configs/synthetic_molecule.toml");

impl SpinSystem {
    pub fn new(
        labels: Vec<String>,
        shifts_hz: Vec<f64>,
        reference_hz: f64,
        couplings_hz: Vec<Vec<f64>>,
        t2_s: Vec<f64>,
    ) -> Result<Self> {
        let n = labels.len();
        if n == 0 {
            return Err(EqsError::Config("no spins".into()));
        }
        if n > crate::tolerance::MAX_QUBITS {
            return Err(EqsError::RegisterTooLarge {
                n,
                limit: crate::tolerance::MAX_QUBITS,
            });
        }
        if shifts_hz.len() != n || t2_s.len() != n || couplings_hz.len() != n {
            return Err(EqsError::Config(format!(
                "expected {n} shifts, T2 values and coupling rows"
            )));
        }
        for (j, row) in couplings_hz.iter().enumerate() {
            if row.len() != n {
                return Err(EqsError::Config(format!("coupling row {j} has {} entries", row.len())));
            }
            if row[j] != 0.0 {
                return Err(EqsError::Config(format!("nonzero self-coupling on spin {j}")));
            }
            for (k, &v) in row.iter().enumerate() {
                if !v.is_finite() || v != couplings_hz[k][j] {
                    return Err(EqsError::Config(format!("coupling matrix not symmetric at ({j},{k})")));
                }
            }
        }
        if let Some(bad) = t2_s.iter().find(|&&t| !(t > 0.0) || !t.is_finite()) {
            return Err(EqsError::Config(format!("T2 must be positive, got {bad}")));
        }
        if shifts_hz.iter().any(|s| !s.is_finite()) || !reference_hz.is_finite() {
            return Err(EqsError::Config("non-finite chemical shift".into()));
        }
        Ok(Self {
            labels,
            shifts_hz,
            reference_hz,
            couplings_hz,
            t2_s,
        })
    }

    pub fn from_file(file: MoleculeFile) -> Result<Self> {
        let n = file.spins.len();
        if file.j_couplings_hz.len() + 1 != n && !(n == 1 && file.j_couplings_hz.is_empty()) {
            return Err(EqsError::Config(format!(
                "expected {} upper-triangle coupling rows, found {}",
                n.saturating_sub(1),
                file.j_couplings_hz.len()
            )));
        }
        let mut couplings = vec![vec![0.0; n]; n];
        for (j, row) in file.j_couplings_hz.iter().enumerate() {
            if row.len() != n - 1 - j {
                return Err(EqsError::Config(format!(
                    "coupling row {} should have {} entries",
                    j + 1,
                    n - 1 - j
                )));
            }
            for (offset, &v) in row.iter().enumerate() {
                let k = j + 1 + offset;
                couplings[j][k] = v;
                couplings[k][j] = v;
            }
        }
        Self::new(file.spins, file.shifts_hz, file.reference_hz, couplings, file.t2_s)
    }

    pub fn from_toml_str(text: &str) -> Result<Self> {
        let file: MoleculeFile = toml::from_str(text).map_err(|e| EqsError::Config(e.to_string()))?;
        Self::from_file(file)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::from_toml_str(&text)
    }

    /// The shipped synthetic register.
    pub fn synthetic() -> Self {
        Self::from_toml_str(SYNTHETIC_MOLECULE).expect("shipped molecule file is valid")
    }

    pub fn to_file(&self) -> MoleculeFile {
        let n = self.len();
        MoleculeFile {
            spins: self.labels.clone(),
            shifts_hz: self.shifts_hz.clone(),
            reference_hz: self.reference_hz,
            j_couplings_hz: (0..n.saturating_sub(1))
                .map(|j| self.couplings_hz[j][j + 1..].to_vec())
                .collect(),
            t2_s: self.t2_s.clone(),
        }
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(&self.to_file()).expect("molecule file serializes")
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn shifts_hz(&self) -> &[f64] {
        &self.shifts_hz
    }

    pub fn reference_hz(&self) -> f64 {
        self.reference_hz
    }

    /// `ν_j − ν_0`
    pub fn offset_hz(&self, j: usize) -> f64 {
        self.shifts_hz[j] - self.reference_hz
    }

    pub fn coupling_hz(&self, a: usize, b: usize) -> f64 {
        self.couplings_hz[a][b]
    }

    pub fn couplings_hz(&self) -> &[Vec<f64>] {
        &self.couplings_hz
    }

    pub fn t2_s(&self) -> &[f64] {
        &self.t2_s
    }

    pub fn index_of(&self, label: &str) -> Result<usize> {
        self.labels
            .iter()
            .position(|l| l == label)
            .ok_or_else(|| EqsError::Unknown {
                kind: "spin",
                name: label.to_string(),
            })
    }

    /// Same register with the carrier moved so that `ν_spin − ν_0 = offset_hz`.
    pub fn with_reference_offset(&self, spin: &str, offset_hz: f64) -> Result<Self> {
        let j = self.index_of(spin)?;
        let mut out = self.clone();
        out.reference_hz = self.shifts_hz[j] - offset_hz;
        Ok(out)
    }

    /// Register restricted to `keep` (in that order). Every other spin is frozen
    /// in `|0⟩`, which turns its couplings into static shifts of `J/2` on its partners.
    pub fn subsystem<S: AsRef<str>>(&self, keep: &[S]) -> Result<Self> {
        let idx = keep
            .iter()
            .map(|l| self.index_of(l.as_ref()))
            .collect::<Result<Vec<_>>>()?;
        for (i, a) in idx.iter().enumerate() {
            if idx[..i].contains(a) {
                return Err(EqsError::RepeatedQubit(*a));
            }
        }
        let frozen: Vec<usize> = (0..self.len()).filter(|j| !idx.contains(j)).collect();
        let shifts = idx
            .iter()
            .map(|&j| {
                self.shifts_hz[j] + frozen.iter().map(|&f| 0.5 * self.couplings_hz[j][f]).sum::<f64>()
            })
            .collect();
        let couplings = idx
            .iter()
            .map(|&a| idx.iter().map(|&b| self.couplings_hz[a][b]).collect())
            .collect();
        Self::new(
            idx.iter().map(|&j| self.labels[j].clone()).collect(),
            shifts,
            self.reference_hz,
            couplings,
            idx.iter().map(|&j| self.t2_s[j]).collect(),
        )
    }

    /// Diagonal of the internal Hamiltonian in rad/s.
    pub fn internal_energies(&self) -> Vec<f64> {
        let n = self.len();
        (0..1usize << n)
            .map(|index| {
                let z = |j: usize| if (index >> (n - 1 - j)) & 1 == 0 { 1.0 } else { -1.0 };
                let mut e = 0.0;
                for j in 0..n {
                    e += PI * self.offset_hz(j) * z(j);
                    for k in j + 1..n {
                        e += 0.5 * PI * self.couplings_hz[j][k] * z(j) * z(k);
                    }
                }
                e
            })
            .collect()
    }
}

/// `Σ_j π(ν_j − ν_0)σ_z^j + Σ_{j<k} (π/2)J_jk σ_z^jσ_z^k` in rad/s.
pub fn internal_hamiltonian(sys: &SpinSystem) -> HermitianOperator {
    let energies = sys.internal_energies();
    let dim = energies.len();
    let m = CMatrix::from_fn(dim, dim, |r, c| {
        if r == c {
            Complex64::new(energies[r], 0.0)
        } else {
            Complex64::new(0.0, 0.0)
        }
    });
    HermitianOperator::new(m).expect("diagonal real matrix is Hermitian")
}
