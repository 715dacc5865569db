use std::collections::HashMap;
use std::sync::Arc;

use eqs_core::circuits::{build_eqs_circuit, circuit_to_unitary, simplify_for_zero_input, Circuit, EqsModel};
use eqs_core::experiment::{run_experiment, run_experiment_report, Experiment, ExperimentConfig, Level, TimeGrid};
use eqs_core::grape::{pulse_to_unitary, search, ControlPulse, Drive, OptimizerConfig};
use eqs_core::nmr::{eqs_pulse_sequence, format_sequence, parse_sequence, PulseSegment, SpinSystem};

const OMEGA: f64 = 2.0 * std::f64::consts::PI * 25.0;

#[test]
fn simplified_two_qubit_circuit_golden() {
    let c = simplify_for_zero_input(&build_eqs_circuit(EqsModel::TwoQubit, 5e-3, OMEGA).unwrap());
    let text = c.to_string();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("QUBITS 3"));
    assert_eq!(lines.next(), Some("MAP C3 C4 C2"));
    let gates: Vec<&str> = lines.collect();
    assert_eq!(gates.len(), 3, "{text}");
    assert!(gates[0].starts_with("RY 0 "));
    assert_eq!(&gates[1..], &["CNOT 0 1", "CNOT 0 2"]);
    let back: Circuit = text.parse().unwrap();
    assert_eq!(back.to_string(), text);
}

#[test]
fn circuit_file_round_trip_preserves_unitary() {
    let c = build_eqs_circuit(EqsModel::ThreeQubit, 7.6e-3, OMEGA).unwrap();
    let back: Circuit = c.to_string().parse().unwrap();
    let diff = circuit_to_unitary(&c).matrix() - circuit_to_unitary(&back).matrix();
    assert!(diff.norm() < 1e-9);
}

#[test]
fn pulse_file_round_trip() {
    let sys = SpinSystem::synthetic().subsystem(&["C3", "C4"]).unwrap();
    let target = circuit_to_unitary(&"QUBITS 2\nRX 0 1.5707963267948966\n".parse::<Circuit>().unwrap());
    let cfg = OptimizerConfig {
        restarts: 1,
        ..OptimizerConfig::default()
    };
    let result = search(&target, &sys, 1e-3, &cfg, None).unwrap();
    let dir = std::env::temp_dir().join(format!("eqs-pulse-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("rx.csv");
    result.pulse.save(&path).unwrap();
    let loaded = ControlPulse::load(&path).unwrap();
    std::fs::remove_dir_all(&dir).unwrap();
    assert_eq!(loaded.segments(), result.pulse.segments());
    let a = pulse_to_unitary(&result.pulse, &sys).unwrap();
    let b = pulse_to_unitary(&loaded, &sys).unwrap();
    assert!((a.matrix() - b.matrix()).norm() < 1e-9);
}

#[test]
fn sequence_text_round_trip_with_shaped_segment() {
    let sys = SpinSystem::synthetic();
    let mut seq = eqs_pulse_sequence(EqsModel::TwoQubit, 2e-3, OMEGA, &sys).unwrap();
    let shaped = Arc::new(ControlPulse::zeros(50e-6, 4, Drive::global(4)).unwrap());
    seq.push(PulseSegment::Shaped {
        name: "idle".into(),
        pulse: Arc::clone(&shaped),
    });
    let text = format_sequence(&seq);
    let library = HashMap::from([("idle".to_string(), shaped)]);
    let back = parse_sequence(&text, &library).unwrap();
    assert_eq!(format_sequence(&back), text);
    assert!(parse_sequence(&text, &HashMap::new()).is_err());
}

#[test]
fn pulse_level_tracks_circuit_within_fidelity_bound() {
    let grid = TimeGrid {
        start: 2.0e-3,
        stop: 6.0e-3,
        step: 4.0e-3,
    };
    let mut circuit_cfg = ExperimentConfig::new(Experiment::Concurrence, Level::Circuit);
    circuit_cfg.grid = grid;
    let mut pulse_cfg = ExperimentConfig::new(Experiment::Concurrence, Level::Pulse);
    pulse_cfg.grid = grid;
    pulse_cfg.molecule = Some(SpinSystem::synthetic());

    let circuit = run_experiment(&circuit_cfg).unwrap();
    let report = run_experiment_report(&pulse_cfg).unwrap();
    let d = 8.0;
    let worst_readout = report
        .pulse_fidelities
        .iter()
        .filter(|(k, _)| k.starts_with("readout"))
        .map(|&(_, f)| f)
        .fold(1.0, f64::min);
    let evolution: Vec<f64> = report
        .pulse_fidelities
        .iter()
        .filter(|(k, _)| k.starts_with("evolution"))
        .map(|&(_, f)| f)
        .collect();
    assert_eq!(evolution.len(), circuit.len());
    for ((p, c), f) in report.records.iter().zip(&circuit).zip(evolution) {
        assert!(f >= 0.995);
        let bound = 2.0 * ((2.0 * d * (1.0 - f)).sqrt() + (2.0 * d * (1.0 - worst_readout)).sqrt());
        for (x, y) in p.expectations.iter().zip(&c.expectations) {
            assert!((x.value - y.value).abs() <= bound, "{} vs {} bound {bound}", x.value, y.value);
        }
    }
}
