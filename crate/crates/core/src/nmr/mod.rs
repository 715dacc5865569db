//! Liquid-state NMR register: spin Hamiltonian, pulse sequences with T2
//! dephasing, pseudo-pure states and FID detection.

mod detection;
mod sequence;
mod spin_system;

pub use detection::{
    erroneous_deviation, measure_accessible, measure_fid_observable, measure_rotated, prepare_pps,
    prepare_pps_from_deviation, prepare_pps_with_error, thermal_state, NoiseModel,
};
pub use sequence::{
    eqs_pulse_sequence, format_sequence, parse_sequence, readout_sequence, refocused_jcoupling,
    sequence_duration, simulate_sequence, PulseAxis, PulseSegment,
};
pub use spin_system::{internal_hamiltonian, MoleculeFile, SpinSystem, SYNTHETIC_MOLECULE};
