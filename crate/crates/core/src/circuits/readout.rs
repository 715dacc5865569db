use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;

use super::gate::rotation;
use crate::error::{EqsError, Result};
use crate::qcore::{BasisProjector, CMatrix, HermitianOperator, Pauli, PauliString, UnitaryMatrix};

/// Readout rotation on one qubit: `X = e^{−iσ_xπ/4}`, `Y = e^{−iσ_yπ/4}`, `Ȳ = e^{iσ_yπ/4}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ReadoutRotation {
    I,
    X,
    Y,
    YBar,
}

impl ReadoutRotation {
    pub fn matrix(self) -> CMatrix {
        match self {
            ReadoutRotation::I => CMatrix::identity(2, 2),
            ReadoutRotation::X => rotation(Pauli::X, PI / 2.0),
            ReadoutRotation::Y => rotation(Pauli::Y, PI / 2.0),
            ReadoutRotation::YBar => rotation(Pauli::Y, -PI / 2.0),
        }
    }

    /// `(axis, angle)` of the equivalent hard pulse, or `None` for the identity.
    pub fn as_pulse(self) -> Option<(Pauli, f64)> {
        match self {
            ReadoutRotation::I => None,
            ReadoutRotation::X => Some((Pauli::X, PI / 2.0)),
            ReadoutRotation::Y => Some((Pauli::Y, PI / 2.0)),
            ReadoutRotation::YBar => Some((Pauli::Y, -PI / 2.0)),
        }
    }
}

/// One readout rotation per qubit, e.g. `YȲXX`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct RotationWord(Vec<ReadoutRotation>);

impl RotationWord {
    pub fn new(rotations: Vec<ReadoutRotation>) -> Self {
        Self(rotations)
    }

    pub fn rotations(&self) -> &[ReadoutRotation] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Pads with identities up to `n` qubits.
    pub fn padded(&self, n: usize) -> Self {
        let mut r = self.0.clone();
        r.resize(n.max(r.len()), ReadoutRotation::I);
        Self(r)
    }

    pub fn unitary(&self) -> UnitaryMatrix {
        let m = self
            .0
            .iter()
            .fold(CMatrix::identity(1, 1), |acc, r| acc.kronecker(&r.matrix()));
        UnitaryMatrix::from_matrix_unchecked(m)
    }
}

impl FromStr for RotationWord {
    type Err = EqsError;

    /// Accepts `I`, `X`, `Y` and `Ȳ` (ASCII alias `B`).
    fn from_str(s: &str) -> Result<Self> {
        let mut out = Vec::new();
        let mut chars = s.chars().peekable();
        while let Some(c) = chars.next() {
            let r = match c {
                'I' | 'i' => ReadoutRotation::I,
                'X' | 'x' => ReadoutRotation::X,
                'Ȳ' | 'B' | 'b' => ReadoutRotation::YBar,
                'Y' | 'y' => {
                    // decomposed form: 'Y' followed by a combining macron
                    if chars.peek() == Some(&'\u{304}') {
                        chars.next();
                        ReadoutRotation::YBar
                    } else {
                        ReadoutRotation::Y
                    }
                }
                other => {
                    return Err(EqsError::Parse {
                        line: 0,
                        message: format!("invalid rotation letter '{other}'"),
                    })
                }
            };
            out.push(r);
        }
        Ok(Self(out))
    }
}

impl fmt::Display for RotationWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for r in &self.0 {
            f.write_str(match r {
                ReadoutRotation::I => "I",
                ReadoutRotation::X => "X",
                ReadoutRotation::Y => "Y",
                ReadoutRotation::YBar => "Ȳ",
            })?;
        }
        Ok(())
    }
}

/// How a target observable is read out through the FID.
///
/// `Tr(ρ·target) = sign · Tr(RρR†·measured)`, where `R` is the rotation word's
/// unitary and both observables carry the same trailing projector (if any).
#[derive(Debug, Clone, PartialEq)]
pub struct ReadoutPlan {
    pub target: PauliString,
    pub rotation: RotationWord,
    pub measured: PauliString,
    pub projector: Option<BasisProjector>,
    pub sign: f64,
}

impl ReadoutPlan {
    /// Qubits covered by the Pauli part plus the projector.
    pub fn num_qubits(&self) -> usize {
        self.measured.num_qubits() + self.projector.as_ref().map_or(0, |p| p.num_qubits())
    }

    /// Rotation unitary on the full register, identity on projector qubits.
    pub fn rotation_unitary(&self) -> UnitaryMatrix {
        self.rotation.padded(self.num_qubits()).unitary()
    }

    fn with_projector(&self, p: &PauliString) -> HermitianOperator {
        let base = HermitianOperator::from_pauli(p);
        match &self.projector {
            Some(proj) => HermitianOperator::new(base.matrix().kronecker(&proj.to_matrix()))
                .expect("projector tensor product is Hermitian"),
            None => base,
        }
    }

    pub fn target_operator(&self) -> HermitianOperator {
        self.with_projector(&self.target)
    }

    pub fn measured_operator(&self) -> HermitianOperator {
        self.with_projector(&self.measured)
    }

    pub fn label(&self) -> String {
        match &self.projector {
            Some(p) => format!("{}|{}>", self.target.label(), p.label()),
            None => self.target.label(),
        }
    }
}

/// `σ_{x,y}` on the observed spin and `σ_0`/`σ_z` everywhere else; projectors
/// on trailing spectator qubits are allowed.
pub fn is_fid_accessible(p: &PauliString) -> bool {
    matches!(p.letter(0), Pauli::X | Pauli::Y)
        && p.word()[1..].iter().all(|l| matches!(l, Pauli::I | Pauli::Z))
}

/// Rotation words for the supported targets, keyed by the target's letters.
const TABLE: [(&str, &str); 8] = [
    ("ZYY", "YXX"),
    ("XYY", "IXX"),
    ("XIYY", "IIXX"),
    ("XZYY", "IIXX"),
    ("ZIYY", "YIXX"),
    ("ZZYY", "YIXX"),
    ("ZXYY", "YȲXX"),
    ("XXYY", "IȲXX"),
];

/// Targets the planner knows how to read out.
pub fn supported_targets() -> Vec<PauliString> {
    TABLE
        .iter()
        .map(|(t, _)| PauliString::parse(t).expect("table words are valid"))
        .collect()
}

/// Conjugates a single letter by a 2×2 Clifford: `r·σ·r† = sign·σ'`.
fn conjugate_letter(r: &CMatrix, letter: Pauli) -> (Pauli, f64) {
    let m = r * letter.matrix() * r.adjoint();
    for candidate in Pauli::ALL {
        for sign in [1.0, -1.0] {
            let diff = &m - candidate.matrix() * Complex64::new(sign, 0.0);
            if diff.norm() < 1e-12 {
                return (candidate, sign);
            }
        }
    }
    unreachable!("readout rotations are Clifford")
}

/// Rotation word and FID-accessible observable for `target`, with the sign
/// obtained by conjugating the target through the rotation.
pub fn plan_readout(target: &PauliString, projector: Option<&BasisProjector>) -> Result<ReadoutPlan> {
    let label = target.label();
    let word = TABLE
        .iter()
        .find(|(t, _)| *t == label)
        .map(|&(_, w)| w)
        .ok_or_else(|| EqsError::UnsupportedObservable(label.clone()))?;
    let rotation: RotationWord = word.parse()?;
    let mut letters = Vec::with_capacity(target.num_qubits());
    let mut sign = 1.0;
    for (r, &letter) in rotation.rotations().iter().zip(target.word()) {
        let (l, s) = conjugate_letter(&r.matrix(), letter);
        letters.push(l);
        sign *= s;
    }
    let measured = PauliString::new(letters, target.coefficient())?;
    if !is_fid_accessible(&measured) {
        return Err(EqsError::NotAccessible(measured.to_string()));
    }
    Ok(ReadoutPlan {
        target: target.clone(),
        rotation,
        measured,
        projector: projector.cloned(),
        sign,
    })
}
