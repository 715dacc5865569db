//! Gate-level programs for the two embedded models, their NMR-native
//! decomposition, and the readout planner.
//!
//! Circuits are written in logical qubit order with the ancilla at qubit 0.
//! Each circuit also carries the physical spin label of every logical qubit.

mod gate;
mod readout;

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

pub use gate::{embed_single, rotation, Gate};
pub use readout::{
    is_fid_accessible, plan_readout, supported_targets, ReadoutPlan, ReadoutRotation, RotationWord,
};

use crate::error::{EqsError, Result};
use crate::qcore::{CMatrix, UnitaryMatrix};

/// Ordered gate list on `n` logical qubits.
#[derive(Debug, Clone, PartialEq)]
pub struct Circuit {
    n: usize,
    gates: Vec<Gate>,
    physical: Vec<String>,
}

impl Circuit {
    pub fn new(n: usize) -> Self {
        Self {
            n,
            gates: Vec::new(),
            physical: (0..n).map(|q| format!("q{q}")).collect(),
        }
    }

    pub fn with_gates(n: usize, gates: Vec<Gate>) -> Result<Self> {
        let mut c = Self::new(n);
        for g in gates {
            c.push(g)?;
        }
        Ok(c)
    }

    pub fn push(&mut self, gate: Gate) -> Result<()> {
        gate.validate(self.n)?;
        self.gates.push(gate);
        Ok(())
    }

    /// Physical spin label per logical qubit.
    pub fn with_physical_map(mut self, labels: Vec<String>) -> Result<Self> {
        if labels.len() != self.n {
            return Err(EqsError::DimensionMismatch {
                expected: self.n,
                found: labels.len(),
            });
        }
        self.physical = labels;
        Ok(self)
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn physical_map(&self) -> &[String] {
        &self.physical
    }

    pub fn len(&self) -> usize {
        self.gates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gates.is_empty()
    }

    pub fn count_cnots(&self) -> usize {
        self.gates.iter().filter(|g| matches!(g, Gate::Cnot { .. })).count()
    }

    /// Reversed circuit of inverted gates.
    pub fn inverse(&self) -> Self {
        Self {
            n: self.n,
            gates: self.gates.iter().rev().map(Gate::inverse).collect(),
            physical: self.physical.clone(),
        }
    }

    /// `self` followed by `other`.
    pub fn then(&self, other: &Circuit) -> Result<Self> {
        if other.n != self.n {
            return Err(EqsError::DimensionMismatch {
                expected: self.n,
                found: other.n,
            });
        }
        let mut out = self.clone();
        out.gates.extend(other.gates.iter().cloned());
        Ok(out)
    }

    /// Replaces every CNOT by its NMR-native sequence using the given coupling table
    /// (indexed by logical qubit) and, optionally, every `R_z` by x/y rotations.
    pub fn to_native(&self, couplings_hz: &[Vec<f64>], expand_z: bool) -> Result<Circuit> {
        let mut out = Circuit::new(self.n).with_physical_map(self.physical.clone())?;
        for gate in &self.gates {
            let lowered = match *gate {
                Gate::Cnot { control, target } => {
                    let j = couplings_hz
                        .get(control)
                        .and_then(|row| row.get(target))
                        .copied()
                        .unwrap_or(0.0);
                    decompose_cnot_gates(control, target, j)?
                }
                ref other => vec![other.clone()],
            };
            for g in lowered {
                match g {
                    Gate::Rz { qubit, angle } if expand_z => {
                        for h in decompose_z_rotation(qubit, angle) {
                            out.push(h)?;
                        }
                    }
                    g => out.push(g)?,
                }
            }
        }
        Ok(out)
    }
}

/// Ordered product of the gate matrices (first gate applied first).
pub fn circuit_to_unitary(c: &Circuit) -> UnitaryMatrix {
    let dim = 1usize << c.n;
    let mut u = CMatrix::identity(dim, dim);
    for gate in &c.gates {
        u = gate.matrix(c.n) * u;
    }
    UnitaryMatrix::from_matrix_unchecked(u)
}

/// The two embedded models: `−ω σ_y⊗σ_x⊗σ_x` and `−ω σ_y⊗σ_x⊗σ_x⊗σ_x`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum EqsModel {
    TwoQubit,
    ThreeQubit,
}

impl EqsModel {
    /// Qubits of the simulated system (ancilla excluded).
    pub fn system_qubits(self) -> usize {
        match self {
            EqsModel::TwoQubit => 2,
            EqsModel::ThreeQubit => 3,
        }
    }

    pub fn register_qubits(self) -> usize {
        self.system_qubits() + 1
    }

    /// Physical spins holding the logical register, ancilla first.
    pub fn physical_map(self) -> Vec<String> {
        let labels: &[&str] = match self {
            EqsModel::TwoQubit => &["C3", "C4", "C2"],
            EqsModel::ThreeQubit => &["C3", "C4", "C2", "C1"],
        };
        labels.iter().map(|s| s.to_string()).collect()
    }
}

impl FromStr for EqsModel {
    type Err = EqsError;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "2q" | "two" | "two-qubit" | "concurrence" => Ok(EqsModel::TwoQubit),
            "3q" | "three" | "three-qubit" | "three-tangle" => Ok(EqsModel::ThreeQubit),
            _ => Err(EqsError::Unknown {
                kind: "model",
                name: s.to_string(),
            }),
        }
    }
}

impl fmt::Display for EqsModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            EqsModel::TwoQubit => "2q",
            EqsModel::ThreeQubit => "3q",
        })
    }
}

/// CNOT sandwich around `R_y(θ = −2ωt)` on the ancilla.
///
/// Every CNOT has the ancilla as control, so `C·σ_y^0·C = σ_y⊗σ_x^{⊗n}` and the
/// circuit equals `exp(−iH̃t)` exactly.
pub fn build_eqs_circuit(model: EqsModel, t: f64, omega: f64) -> Result<Circuit> {
    if t < 0.0 {
        return Err(EqsError::NegativeTime(t));
    }
    let n = model.register_qubits();
    let targets: Vec<usize> = (1..n).collect();
    let mut gates = Vec::with_capacity(2 * targets.len() + 1);
    for &k in targets.iter().rev() {
        gates.push(Gate::Cnot { control: 0, target: k });
    }
    gates.push(Gate::Ry {
        qubit: 0,
        angle: -2.0 * omega * t,
    });
    for &k in &targets {
        gates.push(Gate::Cnot { control: 0, target: k });
    }
    Circuit::with_gates(n, gates)?.with_physical_map(model.physical_map())
}

/// Drops CNOTs whose control is still in `|0⟩` when the circuit starts from `|0…0⟩`.
pub fn simplify_for_zero_input(c: &Circuit) -> Circuit {
    let mut untouched = vec![true; c.n];
    let mut gates = Vec::with_capacity(c.gates.len());
    for gate in &c.gates {
        match *gate {
            Gate::Cnot { control, .. } if untouched[control] => {}
            Gate::Barrier => gates.push(gate.clone()),
            ref g => {
                for q in g.qubits() {
                    untouched[q] = false;
                }
                gates.push(g.clone());
            }
        }
    }
    Circuit {
        n: c.n,
        gates,
        physical: c.physical.clone(),
    }
}

fn decompose_cnot_gates(control: usize, target: usize, coupling_hz: f64) -> Result<Vec<Gate>> {
    if control == target {
        return Err(EqsError::RepeatedQubit(control));
    }
    if coupling_hz == 0.0 {
        return Err(EqsError::ZeroCoupling { a: control, b: target });
    }
    // √i·R_z^a(π/2)·R_z^b(−π/2)·R_x^b(π/2)·U(1/2J)·R_y^b(π/2), rightmost first.
    Ok(vec![
        Gate::Ry { qubit: target, angle: PI / 2.0 },
        Gate::JEvolution {
            a: control,
            b: target,
            duration: 1.0 / (2.0 * coupling_hz.abs()),
            coupling_hz: coupling_hz.abs(),
        },
        Gate::Rx { qubit: target, angle: PI / 2.0 },
        Gate::Rz { qubit: target, angle: -PI / 2.0 },
        Gate::Rz { qubit: control, angle: PI / 2.0 },
    ])
}

/// CNOT as local rotations around one J-coupling evolution of length `1/(2J)`.
/// Equal to CNOT up to the global phase `√i`.
pub fn decompose_cnot(control: usize, target: usize, coupling_hz: f64) -> Result<Circuit> {
    let gates = decompose_cnot_gates(control, target, coupling_hz)?;
    Circuit::with_gates(control.max(target) + 1, gates)
}

/// `R_z(θ) = R_y(π/2)·R_x(−θ)·R_y(−π/2)` as a gate list (rightmost first).
pub fn decompose_z_rotation(qubit: usize, angle: f64) -> Vec<Gate> {
    vec![
        Gate::Ry { qubit, angle: -PI / 2.0 },
        Gate::Rx { qubit, angle: -angle },
        Gate::Ry { qubit, angle: PI / 2.0 },
    ]
}

/// Phase-invariant fidelity `|Tr(U†V)| / 2ⁿ`.
pub fn phase_invariant_fidelity(u: &UnitaryMatrix, v: &UnitaryMatrix) -> Result<f64> {
    u.overlap(v)
}

impl fmt::Display for Circuit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "QUBITS {}", self.n)?;
        writeln!(f, "MAP {}", self.physical.join(" "))?;
        for g in &self.gates {
            writeln!(f, "{g}")?;
        }
        Ok(())
    }
}

fn parse_field<T: FromStr>(field: Option<&str>, line: usize, what: &str) -> Result<T> {
    field
        .ok_or_else(|| EqsError::Parse {
            line,
            message: format!("missing {what}"),
        })?
        .parse()
        .map_err(|_| EqsError::Parse {
            line,
            message: format!("invalid {what}"),
        })
}

impl FromStr for Circuit {
    type Err = EqsError;

    /// Line-oriented format: `QUBITS n`, optional `MAP …`, then one gate per line.
    /// Blank lines and `#` comments are ignored.
    fn from_str(text: &str) -> Result<Self> {
        let mut circuit: Option<Circuit> = None;
        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let mut fields = line.split_whitespace();
            let op = fields.next().unwrap_or("").to_ascii_uppercase();
            if op == "QUBITS" {
                circuit = Some(Circuit::new(parse_field(fields.next(), line_no, "qubit count")?));
                continue;
            }
            let c = circuit.as_mut().ok_or(EqsError::Parse {
                line: line_no,
                message: "QUBITS header must come first".into(),
            })?;
            let gate = match op.as_str() {
                "MAP" => {
                    let labels: Vec<String> = fields.map(str::to_string).collect();
                    *c = c.clone().with_physical_map(labels).map_err(|_| EqsError::Parse {
                        line: line_no,
                        message: "MAP length differs from QUBITS".into(),
                    })?;
                    continue;
                }
                "CNOT" => Gate::Cnot {
                    control: parse_field(fields.next(), line_no, "control")?,
                    target: parse_field(fields.next(), line_no, "target")?,
                },
                "RX" | "RY" | "RZ" => {
                    let qubit = parse_field(fields.next(), line_no, "qubit")?;
                    let angle = parse_field(fields.next(), line_no, "angle")?;
                    match op.as_str() {
                        "RX" => Gate::Rx { qubit, angle },
                        "RY" => Gate::Ry { qubit, angle },
                        _ => Gate::Rz { qubit, angle },
                    }
                }
                "J" => Gate::JEvolution {
                    a: parse_field(fields.next(), line_no, "spin a")?,
                    b: parse_field(fields.next(), line_no, "spin b")?,
                    duration: parse_field(fields.next(), line_no, "duration")?,
                    coupling_hz: parse_field(fields.next(), line_no, "coupling")?,
                },
                "BARRIER" => Gate::Barrier,
                other => {
                    return Err(EqsError::Parse {
                        line: line_no,
                        message: format!("unknown gate '{other}'"),
                    })
                }
            };
            c.push(gate).map_err(|e| EqsError::Parse {
                line: line_no,
                message: e.to_string(),
            })?;
        }
        circuit.ok_or(EqsError::Parse {
            line: 0,
            message: "empty circuit file".into(),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::embedding::embed_operator;
    use crate::qcore::{
        apply_unitary, evolve, matrix_exponential, HermitianOperator, PauliString, StateVector,
    };
    use num_complex::Complex64;

    const OMEGA: f64 = 2.0 * PI * 25.0;

    fn embedded_h(model: EqsModel) -> HermitianOperator {
        let word = match model {
            EqsModel::TwoQubit => "XX",
            EqsModel::ThreeQubit => "XXX",
        };
        embed_operator(&HermitianOperator::from_pauli(
            &PauliString::parse(word).unwrap().with_coefficient(OMEGA),
        ))
        .unwrap()
    }

    #[test]
    fn single_cnot_matrix() {
        let m = Gate::Cnot { control: 0, target: 1 }.matrix(2);
        let expected = [[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]];
        for r in 0..4 {
            for c in 0..4 {
                assert_eq!(m[(r, c)], Complex64::new(expected[r][c] as f64, 0.0));
            }
        }
    }

    #[test]
    fn eqs_circuits_match_matrix_exponential() {
        for model in [EqsModel::TwoQubit, EqsModel::ThreeQubit] {
            let h = embedded_h(model);
            for k in 0..25 {
                let t = 0.0004 + 0.0008 * k as f64;
                let c = build_eqs_circuit(model, t, OMEGA).unwrap();
                let u = circuit_to_unitary(&c);
                let expm = matrix_exponential(&h, t).unwrap();
                assert!((u.overlap(&expm).unwrap() - 1.0).abs() < 1e-12);
                let zero = StateVector::zero(model.register_qubits());
                let a = apply_unitary(&u, &zero).unwrap();
                let b = evolve(&zero, &h, t).unwrap();
                assert!((a.amplitudes() - b.amplitudes()).norm() < 1e-9);
            }
        }
    }

    #[test]
    fn gate_counts_follow_models() {
        let c2 = build_eqs_circuit(EqsModel::TwoQubit, 0.001, OMEGA).unwrap();
        assert_eq!(c2.count_cnots(), 4);
        assert_eq!(c2.len(), 5);
        let c3 = build_eqs_circuit(EqsModel::ThreeQubit, 0.001, OMEGA).unwrap();
        assert_eq!(c3.count_cnots(), 6);
        assert_eq!(c3.physical_map()[0], "C3");
    }

    #[test]
    fn zero_time_circuit_is_identity_on_zero_state() {
        let c = build_eqs_circuit(EqsModel::TwoQubit, 0.0, OMEGA).unwrap();
        let out = apply_unitary(&circuit_to_unitary(&c), &StateVector::zero(3)).unwrap();
        assert!((out.amplitudes() - StateVector::zero(3).amplitudes()).norm() < 1e-15);
    }

    #[test]
    fn unknown_model_rejected() {
        assert!("5q".parse::<EqsModel>().is_err());
        assert_eq!("3q".parse::<EqsModel>().unwrap(), EqsModel::ThreeQubit);
    }

    #[test]
    fn simplification_removes_leading_cnots() {
        for (model, removed) in [(EqsModel::TwoQubit, 2), (EqsModel::ThreeQubit, 3)] {
            let c = build_eqs_circuit(model, 0.0093, OMEGA).unwrap();
            let s = simplify_for_zero_input(&c);
            assert_eq!(c.count_cnots() - s.count_cnots(), removed);
            assert!(matches!(s.gates()[0], Gate::Ry { qubit: 0, .. }));
            let zero = StateVector::zero(model.register_qubits());
            let a = apply_unitary(&circuit_to_unitary(&c), &zero).unwrap();
            let b = apply_unitary(&circuit_to_unitary(&s), &zero).unwrap();
            assert!((a.amplitudes() - b.amplitudes()).norm() < 1e-12);
        }
        let empty = Circuit::new(3);
        assert!(simplify_for_zero_input(&empty).is_empty());
    }

    #[test]
    fn cnot_decomposition_is_exact_up_to_phase() {
        let c = decompose_cnot(0, 1, 72.0).unwrap();
        assert_eq!(c.len(), 5);
        let cnot = UnitaryMatrix::new(Gate::Cnot { control: 0, target: 1 }.matrix(2)).unwrap();
        let u = circuit_to_unitary(&c);
        assert!((u.overlap(&cnot).unwrap() - 1.0).abs() < 1e-12);
        // the dropped phase is √i
        let phased = u.matrix() * Complex64::from_polar(1.0, PI / 4.0);
        assert!((phased - cnot.matrix()).norm() < 1e-12);

        let reversed = decompose_cnot(1, 0, 50.0).unwrap();
        let cnot_rev = UnitaryMatrix::new(Gate::Cnot { control: 1, target: 0 }.matrix(2)).unwrap();
        assert!((circuit_to_unitary(&reversed).overlap(&cnot_rev).unwrap() - 1.0).abs() < 1e-12);

        let twice = c.then(&c).unwrap();
        let id = UnitaryMatrix::identity(2);
        assert!((circuit_to_unitary(&twice).overlap(&id).unwrap() - 1.0).abs() < 1e-12);

        assert!(matches!(decompose_cnot(2, 2, 10.0), Err(EqsError::RepeatedQubit(2))));
        assert!(decompose_cnot(0, 1, 0.0).is_err());
    }

    #[test]
    fn z_rotation_identity() {
        for &theta in &[0.3, -1.1, 2.5, PI] {
            let lhs = rotation(crate::qcore::Pauli::Z, theta);
            let c = Circuit::with_gates(1, decompose_z_rotation(0, theta)).unwrap();
            let rhs = circuit_to_unitary(&c);
            assert!((rhs.matrix() - &lhs).norm() < 1e-14);
        }
    }

    #[test]
    fn native_compilation_preserves_action() {
        let j = vec![
            vec![0.0, 41.0, 69.0],
            vec![41.0, 0.0, 1.5],
            vec![69.0, 1.5, 0.0],
        ];
        let c = simplify_for_zero_input(&build_eqs_circuit(EqsModel::TwoQubit, 0.0061, OMEGA).unwrap());
        let native = c.to_native(&j, true).unwrap();
        assert!(native.gates().iter().all(|g| !matches!(g, Gate::Cnot { .. } | Gate::Rz { .. })));
        let f = circuit_to_unitary(&native).overlap(&circuit_to_unitary(&c)).unwrap();
        assert!((f - 1.0).abs() < 1e-12);
    }

    #[test]
    fn inverse_circuit_gives_identity() {
        let c = build_eqs_circuit(EqsModel::ThreeQubit, 0.0117, OMEGA)
            .unwrap()
            .to_native(&vec![vec![30.0; 4]; 4], false)
            .unwrap();
        let round = c.then(&c.inverse()).unwrap();
        let u = circuit_to_unitary(&round);
        assert!((u.matrix() - CMatrix::identity(16, 16)).norm() < 1e-12);
    }

    #[test]
    fn text_format_round_trip() {
        let c = build_eqs_circuit(EqsModel::TwoQubit, 0.0025, OMEGA)
            .unwrap()
            .to_native(&vec![vec![72.0; 3]; 3], false)
            .unwrap();
        let text = c.to_string();
        assert!(text.starts_with("QUBITS 3\nMAP C3 C4 C2\n"));
        let parsed: Circuit = text.parse().unwrap();
        assert_eq!(parsed.len(), c.len());
        let f = circuit_to_unitary(&parsed).overlap(&circuit_to_unitary(&c)).unwrap();
        assert!((f - 1.0).abs() < 1e-9);
    }

    #[test]
    fn text_format_errors_carry_line_numbers() {
        let err = "QUBITS 2\nCNOT 0 0\n".parse::<Circuit>().unwrap_err();
        assert!(matches!(err, EqsError::Parse { line: 2, .. }));
        let err = "CNOT 0 1\n".parse::<Circuit>().unwrap_err();
        assert!(matches!(err, EqsError::Parse { line: 1, .. }));
        let err = "QUBITS 2\nSWAP 0 1\n".parse::<Circuit>().unwrap_err();
        assert!(matches!(err, EqsError::Parse { line: 2, .. }));
    }
}
