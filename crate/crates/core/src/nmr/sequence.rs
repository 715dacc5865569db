use std::collections::HashMap;
use std::f64::consts::PI;
use std::fmt::Write as _;
use std::sync::Arc;

use num_complex::Complex64;

use super::SpinSystem;
use crate::circuits::{build_eqs_circuit, rotation, simplify_for_zero_input, EqsModel, Gate, RotationWord};
use crate::error::{EqsError, Result};
use crate::grape::{segment_propagators, ControlPulse};
use crate::qcore::{CMatrix, DensityMatrix, Pauli};

/// Phase of a hard pulse.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PulseAxis {
    X,
    MinusX,
    Y,
    MinusY,
}

impl PulseAxis {
    fn pauli_and_sign(self) -> (Pauli, f64) {
        match self {
            PulseAxis::X => (Pauli::X, 1.0),
            PulseAxis::MinusX => (Pauli::X, -1.0),
            PulseAxis::Y => (Pauli::Y, 1.0),
            PulseAxis::MinusY => (Pauli::Y, -1.0),
        }
    }

    fn label(self) -> &'static str {
        match self {
            PulseAxis::X => "x",
            PulseAxis::MinusX => "-x",
            PulseAxis::Y => "y",
            PulseAxis::MinusY => "-y",
        }
    }

    fn parse(s: &str) -> Option<Self> {
        match s {
            "x" | "+x" => Some(PulseAxis::X),
            "-x" => Some(PulseAxis::MinusX),
            "y" | "+y" => Some(PulseAxis::Y),
            "-y" => Some(PulseAxis::MinusY),
            _ => None,
        }
    }
}

/// One element of an NMR pulse sequence.
#[derive(Debug, Clone, PartialEq)]
pub enum PulseSegment {
    /// Instantaneous rotation `exp(−iθ σ_axis/2)` on each listed spin.
    HardPulse {
        spins: Vec<usize>,
        axis: PulseAxis,
        angle: f64,
    },
    /// Free evolution under the internal Hamiltonian, in seconds.
    Delay(f64),
    Shaped { name: String, pulse: Arc<ControlPulse> },
}

impl PulseSegment {
    /// Hard pulse with the angle wrapped into `(−π, π]` and a negative angle
    /// turned into the opposite phase. Equal up to a global phase.
    pub fn rotation(spins: Vec<usize>, axis: Pauli, angle: f64) -> Result<Self> {
        let axis_pos = match axis {
            Pauli::X => PulseAxis::X,
            Pauli::Y => PulseAxis::Y,
            other => {
                return Err(EqsError::OutOfRange(format!(
                    "hard pulses rotate about x or y, not {}",
                    other.to_char()
                )))
            }
        };
        if !angle.is_finite() {
            return Err(EqsError::OutOfRange("non-finite pulse angle".into()));
        }
        let mut theta = angle.rem_euclid(2.0 * PI);
        if theta > PI {
            theta -= 2.0 * PI;
        }
        let axis = if theta < 0.0 {
            theta = -theta;
            match axis_pos {
                PulseAxis::X => PulseAxis::MinusX,
                _ => PulseAxis::MinusY,
            }
        } else {
            axis_pos
        };
        Ok(PulseSegment::HardPulse {
            spins,
            axis,
            angle: theta,
        })
    }

    pub fn duration(&self) -> f64 {
        match self {
            PulseSegment::HardPulse { .. } => 0.0,
            PulseSegment::Delay(t) => *t,
            PulseSegment::Shaped { pulse, .. } => pulse.duration(),
        }
    }

    fn validate(&self, n: usize) -> Result<()> {
        match self {
            PulseSegment::HardPulse { spins, angle, .. } => {
                for (i, &s) in spins.iter().enumerate() {
                    if s >= n {
                        return Err(EqsError::QubitOutOfRange { index: s, n });
                    }
                    if spins[..i].contains(&s) {
                        return Err(EqsError::RepeatedQubit(s));
                    }
                }
                if !(angle.abs() < 2.0 * PI) {
                    return Err(EqsError::OutOfRange(format!("pulse angle {angle} outside (-2π, 2π)")));
                }
                Ok(())
            }
            PulseSegment::Delay(t) if *t < 0.0 || !t.is_finite() => Err(EqsError::NegativeTime(*t)),
            PulseSegment::Delay(_) => Ok(()),
            PulseSegment::Shaped { pulse, .. } if pulse.num_spins() != n => Err(EqsError::WrongQubitCount {
                expected: n,
                found: pulse.num_spins(),
            }),
            PulseSegment::Shaped { .. } => Ok(()),
        }
    }
}

/// Total wall-clock length of a sequence.
pub fn sequence_duration(seq: &[PulseSegment]) -> f64 {
    seq.iter().map(PulseSegment::duration).sum()
}

fn hard_pulse_matrix(n: usize, spins: &[usize], axis: PulseAxis, angle: f64) -> CMatrix {
    let (pauli, sign) = axis.pauli_and_sign();
    let r = rotation(pauli, sign * angle);
    (0..n).fold(CMatrix::identity(1, 1), |acc, q| {
        if spins.contains(&q) {
            acc.kronecker(&r)
        } else {
            acc.kronecker(&CMatrix::identity(2, 2))
        }
    })
}

fn conjugate(rho: &mut CMatrix, u: &CMatrix) {
    *rho = u * &*rho * u.adjoint();
}

/// Multiplies every coherence by `∏ e^{−τ/T2_j}` over the spins it involves.
fn dephase(rho: &mut CMatrix, sys: &SpinSystem, tau: f64) {
    let n = sys.len();
    let decay: Vec<f64> = sys.t2_s().iter().map(|t2| (-tau / t2).exp()).collect();
    let dim = rho.nrows();
    for r in 0..dim {
        for c in 0..dim {
            let diff = r ^ c;
            if diff == 0 {
                continue;
            }
            let mut f = 1.0;
            for (j, d) in decay.iter().enumerate() {
                if diff >> (n - 1 - j) & 1 == 1 {
                    f *= d;
                }
            }
            rho[(r, c)] *= f;
        }
    }
}

/// Propagates `rho` through the sequence, with per-spin T2 phase damping if `dephasing`.
pub fn simulate_sequence(
    rho: &DensityMatrix,
    seq: &[PulseSegment],
    sys: &SpinSystem,
    dephasing: bool,
) -> Result<DensityMatrix> {
    let n = sys.len();
    if rho.num_qubits() != n {
        return Err(EqsError::WrongQubitCount {
            expected: n,
            found: rho.num_qubits(),
        });
    }
    for s in seq {
        s.validate(n)?;
    }
    let energies = sys.internal_energies();
    let mut m = rho.matrix().clone();
    for s in seq {
        match s {
            PulseSegment::HardPulse { spins, axis, angle } => {
                conjugate(&mut m, &hard_pulse_matrix(n, spins, *axis, *angle));
            }
            PulseSegment::Delay(tau) => {
                let dim = m.nrows();
                for r in 0..dim {
                    for c in 0..dim {
                        if r != c {
                            m[(r, c)] *= Complex64::from_polar(1.0, -(energies[r] - energies[c]) * tau);
                        }
                    }
                }
                if dephasing {
                    dephase(&mut m, sys, *tau);
                }
            }
            PulseSegment::Shaped { pulse, .. } => {
                for u in segment_propagators(pulse, sys)? {
                    conjugate(&mut m, &u);
                    if dephasing {
                        dephase(&mut m, sys, pulse.dt());
                    }
                }
            }
        }
        crate::qcore::symmetrize(&mut m);
    }
    Ok(DensityMatrix::from_matrix_unchecked(m))
}

/// Net `exp(−iπσ_z^aσ_z^b/4)` from free evolution of total length `1/(2|J_ab|)`.
///
/// The delay is cut into `2^m` equal intervals and every spin follows a Walsh
/// sign pattern set by π_x pulses. `a` and `b` share a pattern (complemented on
/// `b` when `J_ab < 0`) and each other spin gets its own, so every other shift
/// and coupling averages to zero. Exact up to a global phase.
pub fn refocused_jcoupling(a: usize, b: usize, sys: &SpinSystem) -> Result<Vec<PulseSegment>> {
    let n = sys.len();
    for q in [a, b] {
        if q >= n {
            return Err(EqsError::QubitOutOfRange { index: q, n });
        }
    }
    if a == b {
        return Err(EqsError::RepeatedQubit(a));
    }
    let j = sys.coupling_hz(a, b);
    if j == 0.0 {
        return Err(EqsError::ZeroCoupling { a, b });
    }
    let m = (usize::BITS - (n - 1).leading_zeros()).max(1) as usize;
    let intervals = 1usize << m;
    let walsh = |row: usize, k: usize| if (row & k).count_ones() % 2 == 0 { 1.0 } else { -1.0 };
    let pair_row = intervals / 2;
    let mut others = (1..intervals).filter(|&r| r != pair_row);
    let rows: Vec<(usize, f64)> = (0..n)
        .map(|q| {
            if q == a {
                (pair_row, 1.0)
            } else if q == b {
                (pair_row, j.signum())
            } else {
                (others.next().expect("enough Walsh rows"), 1.0)
            }
        })
        .collect();
    let sign = |q: usize, k: usize| rows[q].1 * walsh(rows[q].0, k);
    let tau = 1.0 / (2.0 * j.abs()) / intervals as f64;
    let flip = |spins: Vec<usize>| PulseSegment::HardPulse {
        spins,
        axis: PulseAxis::X,
        angle: PI,
    };
    let mut seq = Vec::new();
    for k in 0..intervals {
        let flips: Vec<usize> = (0..n)
            .filter(|&q| {
                let before = if k == 0 { 1.0 } else { sign(q, k - 1) };
                sign(q, k) != before
            })
            .collect();
        if !flips.is_empty() {
            seq.push(flip(flips));
        }
        seq.push(PulseSegment::Delay(tau));
    }
    let last: Vec<usize> = (0..n).filter(|&q| sign(q, intervals - 1) < 0.0).collect();
    if !last.is_empty() {
        seq.push(flip(last));
    }
    Ok(seq)
}

/// Ideal hard pulses realizing a readout rotation word.
pub fn readout_sequence(word: &RotationWord) -> Result<Vec<PulseSegment>> {
    let mut seq = Vec::new();
    for (q, r) in word.rotations().iter().enumerate() {
        if let Some((axis, angle)) = r.as_pulse() {
            seq.push(PulseSegment::rotation(vec![q], axis, angle)?);
        }
    }
    Ok(seq)
}

/// Hard pulses and refocused delays for the `|0…0⟩` evolution circuit at time `t`.
///
/// Logical qubit `q` is spin `q` of `sys`; any extra trailing spins are spectators.
pub fn eqs_pulse_sequence(model: EqsModel, t: f64, omega: f64, sys: &SpinSystem) -> Result<Vec<PulseSegment>> {
    let circuit = simplify_for_zero_input(&build_eqs_circuit(model, t, omega)?);
    if sys.len() < circuit.num_qubits() {
        return Err(EqsError::WrongQubitCount {
            expected: circuit.num_qubits(),
            found: sys.len(),
        });
    }
    let native = circuit.to_native(sys.couplings_hz(), true)?;
    let mut seq = Vec::new();
    for gate in native.gates() {
        match *gate {
            Gate::Rx { qubit, angle } => seq.push(PulseSegment::rotation(vec![qubit], Pauli::X, angle)?),
            Gate::Ry { qubit, angle } => seq.push(PulseSegment::rotation(vec![qubit], Pauli::Y, angle)?),
            Gate::JEvolution { a, b, .. } => seq.extend(refocused_jcoupling(a, b, sys)?),
            Gate::Barrier => {}
            ref other => {
                return Err(EqsError::OutOfRange(format!("gate '{other}' has no hard-pulse form")));
            }
        }
    }
    Ok(seq)
}

/// One segment per line: `PULSE 0,2 -y 1.5707963268`, `DELAY 0.0025`, `SHAPED name`.
pub fn format_sequence(seq: &[PulseSegment]) -> String {
    let mut out = String::new();
    for s in seq {
        let _ = match s {
            PulseSegment::HardPulse { spins, axis, angle } => writeln!(
                out,
                "PULSE {} {} {angle:.12}",
                spins.iter().map(|q| q.to_string()).collect::<Vec<_>>().join(","),
                axis.label()
            ),
            PulseSegment::Delay(t) => writeln!(out, "DELAY {t:.12}"),
            PulseSegment::Shaped { name, .. } => writeln!(out, "SHAPED {name}"),
        };
    }
    out
}

/// Inverse of [`format_sequence`]. `SHAPED` lines are looked up in `library`.
pub fn parse_sequence(text: &str, library: &HashMap<String, Arc<ControlPulse>>) -> Result<Vec<PulseSegment>> {
    let mut seq = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let err = |message: String| EqsError::Parse { line: line_no, message };
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        let seg = match (fields[0].to_ascii_uppercase().as_str(), fields.len()) {
            ("PULSE", 4) => {
                let spins = fields[1]
                    .split(',')
                    .map(|s| s.parse::<usize>().map_err(|e| err(format!("spin index: {e}"))))
                    .collect::<Result<Vec<_>>>()?;
                let axis = PulseAxis::parse(fields[2]).ok_or_else(|| err(format!("unknown phase '{}'", fields[2])))?;
                let angle = fields[3].parse::<f64>().map_err(|e| err(format!("angle: {e}")))?;
                PulseSegment::HardPulse { spins, axis, angle }
            }
            ("DELAY", 2) => PulseSegment::Delay(fields[1].parse().map_err(|e| err(format!("delay: {e}")))?),
            ("SHAPED", 2) => {
                let pulse = library
                    .get(fields[1])
                    .ok_or_else(|| err(format!("unknown shaped pulse '{}'", fields[1])))?;
                PulseSegment::Shaped {
                    name: fields[1].to_string(),
                    pulse: Arc::clone(pulse),
                }
            }
            _ => return Err(err(format!("cannot parse '{line}'"))),
        };
        seq.push(seg);
    }
    Ok(seq)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuits::circuit_to_unitary;
    use crate::grape::Drive;
    use crate::qcore::{matrix_exponential, HermitianOperator, PauliString, StateVector, UnitaryMatrix};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn logical() -> SpinSystem {
        SpinSystem::synthetic().subsystem(&["C3", "C4", "C2", "C1"]).unwrap()
    }

    fn sequence_unitary(seq: &[PulseSegment], sys: &SpinSystem) -> CMatrix {
        let n = sys.len();
        let dim = 1 << n;
        let h0 = crate::nmr::internal_hamiltonian(sys);
        let mut u = CMatrix::identity(dim, dim);
        for s in seq {
            let step = match s {
                PulseSegment::HardPulse { spins, axis, angle } => hard_pulse_matrix(n, spins, *axis, *angle),
                PulseSegment::Delay(t) => matrix_exponential(&h0, *t).unwrap().into_matrix(),
                PulseSegment::Shaped { .. } => unreachable!(),
            };
            u = step * u;
        }
        u
    }

    #[test]
    fn refocused_coupling_is_exact_for_every_pair() {
        let sys = logical();
        let n = sys.len();
        for a in 0..n {
            for b in 0..n {
                if a == b {
                    continue;
                }
                let seq = refocused_jcoupling(a, b, &sys).unwrap();
                let total: f64 = sequence_duration(&seq);
                assert!((total - 1.0 / (2.0 * sys.coupling_hz(a, b).abs())).abs() < 1e-15);
                let zz = HermitianOperator::from_pauli(
                    &PauliString::new(
                        (0..n).map(|q| if q == a || q == b { Pauli::Z } else { Pauli::I }).collect(),
                        1.0,
                    )
                    .unwrap(),
                );
                let target = matrix_exponential(&zz, PI / 4.0).unwrap();
                let u = UnitaryMatrix::new(sequence_unitary(&seq, &sys)).unwrap();
                assert!((u.overlap(&target).unwrap() - 1.0).abs() < 1e-10, "pair ({a},{b})");
            }
        }
    }

    #[test]
    fn first_refocusing_delay_is_half_over_j34() {
        let sys = logical();
        let seq = refocused_jcoupling(0, 1, &sys).unwrap();
        assert!((sequence_duration(&seq) - 1.0 / (2.0 * 45.0)).abs() < 1e-15);
    }

    #[test]
    fn pulse_sequence_matches_circuit() {
        let sys = logical();
        let omega = 2.0 * PI * 25.0;
        for (model, t) in [(EqsModel::TwoQubit, 3.6e-3), (EqsModel::ThreeQubit, 11.6e-3), (EqsModel::TwoQubit, 19.6e-3)] {
            let seq = eqs_pulse_sequence(model, t, omega, &sys).unwrap();
            let rho0 = StateVector::zero(4).to_density();
            let rho = simulate_sequence(&rho0, &seq, &sys, false).unwrap();
            let circuit = build_eqs_circuit(model, t, omega).unwrap();
            let mut u = circuit_to_unitary(&circuit).into_matrix();
            for _ in circuit.num_qubits()..4 {
                u = u.kronecker(&CMatrix::identity(2, 2));
            }
            let expect = &u * rho0.matrix() * u.adjoint();
            assert!((rho.matrix() - expect).norm() < 1e-6, "{model} t={t}");
        }
    }

    #[test]
    fn dephasing_contracts_coherences_and_keeps_populations() {
        let sys = logical();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let rho = DensityMatrix::random(4, &mut rng);
        let seq = [PulseSegment::Delay(0.05)];
        let clean = simulate_sequence(&rho, &seq, &sys, false).unwrap();
        let noisy = simulate_sequence(&rho, &seq, &sys, true).unwrap();
        for r in 0..16 {
            assert!((noisy.matrix()[(r, r)] - rho.matrix()[(r, r)]).norm() < 1e-14);
            for c in 0..16 {
                if r != c {
                    assert!(noisy.matrix()[(r, c)].norm() < clean.matrix()[(r, c)].norm());
                }
            }
        }
        // single-spin coherence on C3 decays as e^{−t/T2}
        let expected = (-0.05f64 / sys.t2_s()[0]).exp();
        let ratio = noisy.matrix()[(0, 8)].norm() / clean.matrix()[(0, 8)].norm();
        assert!((ratio - expected).abs() < 1e-12);
    }

    #[test]
    fn simulation_preserves_trace_and_hermiticity() {
        let sys = logical();
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let rho = DensityMatrix::random(4, &mut rng);
        let shaped = ControlPulse::new(1e-4, Drive::global(4), vec![vec![3e3, -1e3]; 20]).unwrap();
        let mut seq = eqs_pulse_sequence(EqsModel::ThreeQubit, 5e-3, 2.0 * PI * 25.0, &sys).unwrap();
        seq.push(PulseSegment::Shaped {
            name: "test".into(),
            pulse: Arc::new(shaped),
        });
        let out = simulate_sequence(&rho, &seq, &sys, true).unwrap();
        assert!((out.trace() - Complex64::new(1.0, 0.0)).norm() < 1e-12);
        assert!(crate::qcore::hermitian_deviation(out.matrix()) < 1e-12);
    }

    #[test]
    fn text_round_trip() {
        let sys = logical();
        let seq = eqs_pulse_sequence(EqsModel::TwoQubit, 2e-3, 2.0 * PI * 25.0, &sys).unwrap();
        let text = format_sequence(&seq);
        let back = parse_sequence(&text, &HashMap::new()).unwrap();
        assert_eq!(back.len(), seq.len());
        assert_eq!(format_sequence(&back), text);
        assert!(matches!(
            parse_sequence("DELAY 1\nSHAPED missing\n", &HashMap::new()),
            Err(EqsError::Parse { line: 2, .. })
        ));
    }

    #[test]
    fn invalid_segments_rejected() {
        let sys = logical();
        let rho = StateVector::zero(4).to_density();
        for bad in [
            PulseSegment::Delay(-1.0),
            PulseSegment::HardPulse { spins: vec![7], axis: PulseAxis::X, angle: 1.0 },
            PulseSegment::HardPulse { spins: vec![0], axis: PulseAxis::X, angle: 7.0 },
        ] {
            assert!(simulate_sequence(&rho, &[bad], &sys, false).is_err());
        }
        assert!(PulseSegment::rotation(vec![0], Pauli::Z, 1.0).is_err());
    }
}
