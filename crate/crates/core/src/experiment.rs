//! Time series of the two monotones at four levels of physical detail.
//!
//! * `ideal`: exact embedded evolution.
//! * `circuit`: the simplified gate circuit.
//! * `pulse`: GRAPE pulses for the evolution and the readout rotations on the
//!   spin register, no decoherence.
//! * `noisy`: hard pulses with refocused couplings, T2 dephasing, a pseudo-pure
//!   state with a preparation error, and error bars.
//!
//! Every level reads the embedded observables through the FID readout planner.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::fmt;
use std::fmt::Write as _;
use std::path::Path;
use std::str::FromStr;
use std::sync::Arc;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::circuits::{
    build_eqs_circuit, circuit_to_unitary, plan_readout, simplify_for_zero_input, EqsModel, ReadoutPlan,
};
use crate::embedding::{embed_hamiltonian, embed_state, split_hamiltonian};
use crate::error::{EqsError, Result};
use crate::errorbars::{discrepancy, Combination, ErrorBudget};
use crate::grape::{search, ControlPulse, OptimizerConfig};
use crate::monotones::{
    concurrence_from_expectations, propagate_sigma, three_tangle_from_expectations, MonotoneResult,
    CONCURRENCE_OBSERVABLES, TANGLE_OBSERVABLES,
};
use crate::nmr::{
    eqs_pulse_sequence, erroneous_deviation, measure_fid_observable, measure_rotated, prepare_pps, prepare_pps_from_deviation,
    readout_sequence, simulate_sequence, NoiseModel, PulseSegment, SpinSystem,
};
use crate::qcore::{
    apply_unitary, BasisProjector, DensityMatrix, HermitianOperator, PauliString, StateVector,
};

/// Size of the physical register.
const REGISTER_SPINS: usize = 4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Experiment {
    Concurrence,
    ThreeTangle,
}

impl Experiment {
    pub fn model(self) -> EqsModel {
        match self {
            Experiment::Concurrence => EqsModel::TwoQubit,
            Experiment::ThreeTangle => EqsModel::ThreeQubit,
        }
    }

    /// Embedded observables in reporting order.
    pub fn observables(self) -> &'static [&'static str] {
        match self {
            Experiment::Concurrence => &CONCURRENCE_OBSERVABLES,
            Experiment::ThreeTangle => &TANGLE_OBSERVABLES,
        }
    }

    /// `|sin 2ωt|` or `sin²(2ωt)`.
    pub fn reference(self, t: f64, omega: f64) -> f64 {
        let s = (2.0 * omega * t).sin();
        match self {
            Experiment::Concurrence => s.abs(),
            Experiment::ThreeTangle => s * s,
        }
    }

    fn monotone(self, values: &[f64]) -> Result<MonotoneResult> {
        match self {
            Experiment::Concurrence => concurrence_from_expectations(values[0], values[1]),
            Experiment::ThreeTangle => {
                let arr: [f64; 6] = values
                    .try_into()
                    .map_err(|_| EqsError::DimensionMismatch {
                        expected: 6,
                        found: values.len(),
                    })?;
                three_tangle_from_expectations(&arr)
            }
        }
    }
}

impl FromStr for Experiment {
    type Err = EqsError;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "concurrence" => Ok(Experiment::Concurrence),
            "three-tangle" | "tangle" | "threetangle" => Ok(Experiment::ThreeTangle),
            _ => Err(EqsError::Unknown {
                kind: "experiment",
                name: s.to_string(),
            }),
        }
    }
}

impl fmt::Display for Experiment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Experiment::Concurrence => "concurrence",
            Experiment::ThreeTangle => "three-tangle",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Level {
    Ideal,
    Circuit,
    Pulse,
    Noisy,
}

impl FromStr for Level {
    type Err = EqsError;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "ideal" => Ok(Level::Ideal),
            "circuit" => Ok(Level::Circuit),
            "pulse" => Ok(Level::Pulse),
            "noisy" => Ok(Level::Noisy),
            _ => Err(EqsError::Unknown {
                kind: "level",
                name: s.to_string(),
            }),
        }
    }
}

impl fmt::Display for Level {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Level::Ideal => "ideal",
            Level::Circuit => "circuit",
            Level::Pulse => "pulse",
            Level::Noisy => "noisy",
        })
    }
}

/// Evenly spaced times `start, start + step, …` up to and including `stop`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeGrid {
    pub start: f64,
    pub stop: f64,
    pub step: f64,
}

impl Default for TimeGrid {
    fn default() -> Self {
        Self {
            start: 0.4e-3,
            stop: 19.6e-3,
            step: 0.8e-3,
        }
    }
}

impl TimeGrid {
    pub fn points(&self) -> Result<Vec<f64>> {
        if !(self.start >= 0.0) || !(self.stop >= self.start) || !(self.step > 0.0) {
            return Err(EqsError::OutOfRange(format!(
                "time grid {} to {} step {} is empty",
                self.start, self.stop, self.step
            )));
        }
        let count = ((self.stop - self.start) / self.step + 1e-9).floor() as usize + 1;
        Ok((0..count).map(|k| self.start + k as f64 * self.step).collect())
    }
}

/// Settings for the `pulse` level.
#[derive(Debug, Clone, PartialEq)]
pub struct PulseOptions {
    /// Evolution pulse length; `None` means 15 ms (two qubits) or 30 ms (three).
    pub evolution_budget: Option<f64>,
    pub readout_budget: f64,
    pub readout_dt: f64,
    /// Used for every pulse; `dt` sets the evolution segments.
    pub grape: OptimizerConfig,
}

impl Default for PulseOptions {
    fn default() -> Self {
        Self {
            evolution_budget: None,
            readout_budget: 1e-3,
            readout_dt: 50e-6,
            grape: OptimizerConfig::default(),
        }
    }
}

impl PulseOptions {
    pub fn evolution_budget_for(&self, model: EqsModel) -> f64 {
        self.evolution_budget.unwrap_or(match model {
            EqsModel::TwoQubit => 15e-3,
            EqsModel::ThreeQubit => 30e-3,
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub experiment: Experiment,
    /// Rad/s.
    pub omega: f64,
    pub grid: TimeGrid,
    pub level: Level,
    /// Required by the `pulse` and `noisy` levels.
    pub molecule: Option<SpinSystem>,
    /// Spins holding ancilla, system qubits and spectator, in that order.
    pub spin_order: Vec<String>,
    pub noise: NoiseModel,
    pub combination: Combination,
    pub seed: u64,
    pub pulse: PulseOptions,
}

impl ExperimentConfig {
    pub fn new(experiment: Experiment, level: Level) -> Self {
        Self {
            experiment,
            omega: 2.0 * PI * 25.0,
            grid: TimeGrid::default(),
            level,
            molecule: None,
            spin_order: ["C3", "C4", "C2", "C1"].iter().map(|s| s.to_string()).collect(),
            noise: NoiseModel::default(),
            combination: Combination::Additive,
            seed: 0,
            pulse: PulseOptions::default(),
        }
    }

    fn register(&self) -> Result<SpinSystem> {
        let molecule = self
            .molecule
            .as_ref()
            .ok_or_else(|| EqsError::MissingMolecule(self.level.to_string()))?;
        if self.spin_order.len() != REGISTER_SPINS {
            return Err(EqsError::WrongQubitCount {
                expected: REGISTER_SPINS,
                found: self.spin_order.len(),
            });
        }
        molecule.subsystem(&self.spin_order)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Expectation {
    pub observable: String,
    pub value: f64,
    pub sigma: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TimeSeriesRecord {
    pub t: f64,
    pub expectations: Vec<Expectation>,
    pub monotone: f64,
    pub monotone_sigma: f64,
    pub reference: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentReport {
    pub records: Vec<TimeSeriesRecord>,
    /// Distinct embedded observables evaluated at each time point.
    pub observables_per_point: Vec<usize>,
    /// Noisy level: mean deviation from the ideal model, full scale 2.
    pub discrepancy: Option<f64>,
    /// Noisy level: common standard deviation attached to every expectation.
    pub sigma: Option<f64>,
    /// Pulse level: fidelity of every synthesized pulse.
    pub pulse_fidelities: Vec<(String, f64)>,
}

fn readout_plans(experiment: Experiment) -> Result<Vec<ReadoutPlan>> {
    let projector = match experiment {
        Experiment::Concurrence => Some(BasisProjector::zeros(1)),
        Experiment::ThreeTangle => None,
    };
    experiment
        .observables()
        .iter()
        .map(|w| plan_readout(&PauliString::parse(w)?, projector.as_ref()))
        .collect()
}

/// Pads a logical state with spectators in `|0⟩` up to the register size.
fn pad_register(state: StateVector) -> DensityMatrix {
    let extra = REGISTER_SPINS - state.num_qubits();
    let padded = if extra > 0 {
        state.tensor(&StateVector::zero(extra))
    } else {
        state
    };
    padded.to_density()
}

/// `H = ω σ_x^{⊗n}`, whose embedding is `−ω σ_y ⊗ σ_x^{⊗n}`.
fn system_hamiltonian(model: EqsModel, omega: f64) -> Result<HermitianOperator> {
    let word = "X".repeat(model.system_qubits());
    Ok(HermitianOperator::from_pauli(&PauliString::parse(&word)?).scaled(omega))
}

fn ideal_state(model: EqsModel, t: f64, omega: f64) -> Result<StateVector> {
    let h = system_hamiltonian(model, omega)?;
    let big = embed_hamiltonian(&split_hamiltonian(&h)?);
    let psi = embed_state(&StateVector::zero(model.system_qubits())).evolve(&big, t)?;
    Ok(psi.into_state())
}

fn circuit_state(model: EqsModel, t: f64, omega: f64) -> Result<StateVector> {
    let u = circuit_to_unitary(&simplify_for_zero_input(&build_eqs_circuit(model, t, omega)?));
    apply_unitary(&u, &StateVector::zero(model.register_qubits()))
}

fn measure_all(rho: &DensityMatrix, plans: &[ReadoutPlan], polarization: f64) -> Result<Vec<f64>> {
    plans
        .iter()
        .map(|plan| measure_fid_observable(rho, plan, polarization))
        .collect()
}

fn record(
    experiment: Experiment,
    plans: &[ReadoutPlan],
    t: f64,
    omega: f64,
    values: Vec<f64>,
    sigma: f64,
) -> Result<TimeSeriesRecord> {
    let result = experiment.monotone(&values)?;
    Ok(TimeSeriesRecord {
        t,
        expectations: plans
            .iter()
            .zip(&values)
            .map(|(p, &value)| Expectation {
                observable: p.target.label(),
                value,
                sigma,
            })
            .collect(),
        monotone: result.value,
        monotone_sigma: propagate_sigma(&result, sigma),
        reference: experiment.reference(t, omega),
    })
}

fn audit(plans: &[ReadoutPlan], points: usize) -> Vec<usize> {
    let mut labels: Vec<String> = plans.iter().map(|p| p.target.label()).collect();
    labels.sort();
    labels.dedup();
    vec![labels.len(); points]
}

fn run_exact(cfg: &ExperimentConfig, times: &[f64], plans: &[ReadoutPlan]) -> Result<Vec<TimeSeriesRecord>> {
    let model = cfg.experiment.model();
    times
        .par_iter()
        .map(|&t| {
            let state = match cfg.level {
                Level::Ideal => ideal_state(model, t, cfg.omega)?,
                _ => circuit_state(model, t, cfg.omega)?,
            };
            let values = measure_all(&pad_register(state), plans, 1.0)?;
            record(cfg.experiment, plans, t, cfg.omega, values, 0.0)
        })
        .collect()
}

fn simulate_noisy_point(
    cfg: &ExperimentConfig,
    reg: &SpinSystem,
    plans: &[ReadoutPlan],
    t: f64,
    start: &DensityMatrix,
) -> Result<Vec<f64>> {
    let seq = eqs_pulse_sequence(cfg.experiment.model(), t, cfg.omega, reg)?;
    let evolved = simulate_sequence(start, &seq, reg, cfg.noise.dephasing)?;
    plans
        .iter()
        .map(|plan| {
            let ro = readout_sequence(&plan.rotation.padded(REGISTER_SPINS))?;
            let rotated = simulate_sequence(&evolved, &ro, reg, cfg.noise.dephasing)?;
            measure_rotated(&rotated, plan, cfg.noise.polarization)
        })
        .collect()
}

fn run_noisy(
    cfg: &ExperimentConfig,
    times: &[f64],
    plans: &[ReadoutPlan],
) -> Result<(Vec<TimeSeriesRecord>, f64, f64)> {
    let reg = cfg.register()?;
    let eps = cfg.noise.polarization;
    let clean = prepare_pps(REGISTER_SPINS, eps)?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let faulty = prepare_pps_from_deviation(
        &erroneous_deviation(REGISTER_SPINS, cfg.noise.pps_infidelity, &mut rng)?,
        eps,
    )?;
    let model = cfg.experiment.model();
    let per_point: Vec<(Vec<f64>, Vec<f64>, Vec<f64>)> = times
        .par_iter()
        .map(|&t| {
            let ideal = measure_all(&pad_register(ideal_state(model, t, cfg.omega)?), plans, 1.0)?;
            let model_only = simulate_noisy_point(cfg, &reg, plans, t, &clean)?;
            let data = simulate_noisy_point(cfg, &reg, plans, t, &faulty)?;
            Ok((ideal, model_only, data))
        })
        .collect::<Result<_>>()?;
    let ideal_all: Vec<f64> = per_point.iter().flat_map(|p| p.0.iter().copied()).collect();
    let model_all: Vec<f64> = per_point.iter().flat_map(|p| p.1.iter().copied()).collect();
    let gap = discrepancy(&ideal_all, &model_all)?;
    let sigma = ErrorBudget::new(gap, cfg.noise.pps_infidelity, cfg.combination)?.sigma();
    let records = times
        .iter()
        .zip(per_point)
        .map(|(&t, (_, _, data))| record(cfg.experiment, plans, t, cfg.omega, data, sigma))
        .collect::<Result<_>>()?;
    Ok((records, gap, sigma))
}

type PulseLibrary = HashMap<String, (Arc<ControlPulse>, f64)>;

fn readout_pulses(cfg: &ExperimentConfig, active: &SpinSystem, plans: &[ReadoutPlan]) -> Result<PulseLibrary> {
    let grape = OptimizerConfig {
        dt: cfg.pulse.readout_dt,
        ..cfg.pulse.grape.clone()
    };
    let mut library = PulseLibrary::new();
    for plan in plans {
        let word = plan.rotation.padded(active.len());
        let key = word.to_string();
        if library.contains_key(&key) {
            continue;
        }
        let result = search(&word.unitary(), active, cfg.pulse.readout_budget, &grape, None)?;
        if !result.converged {
            return Err(EqsError::PulseSynthesis {
                context: format!("readout rotation {key}"),
                achieved: result.fidelity,
                target: grape.target_fidelity,
            });
        }
        library.insert(key, (Arc::new(result.pulse.padded(REGISTER_SPINS)?), result.fidelity));
    }
    Ok(library)
}

fn run_pulse(
    cfg: &ExperimentConfig,
    times: &[f64],
    plans: &[ReadoutPlan],
) -> Result<(Vec<TimeSeriesRecord>, Vec<(String, f64)>)> {
    let reg = cfg.register()?;
    let model = cfg.experiment.model();
    let active = reg.subsystem(&cfg.spin_order[..model.register_qubits()])?;
    let library = readout_pulses(cfg, &active, plans)?;
    let mut fidelities: Vec<(String, f64)> = library
        .iter()
        .map(|(k, (_, f))| (format!("readout {k}"), *f))
        .collect();
    fidelities.sort_by(|a, b| a.0.cmp(&b.0));
    let budget = cfg.pulse.evolution_budget_for(model);
    let start = StateVector::zero(REGISTER_SPINS).to_density();
    let mut warm: Option<ControlPulse> = None;
    let mut records = Vec::with_capacity(times.len());
    // Sequential so each point can warm-start from the previous pulse.
    for &t in times {
        let target = circuit_to_unitary(&simplify_for_zero_input(&build_eqs_circuit(model, t, cfg.omega)?));
        let result = search(&target, &active, budget, &cfg.pulse.grape, warm.as_ref())?;
        let context = format!("evolution at t = {t:.6} s");
        if !result.converged {
            return Err(EqsError::PulseSynthesis {
                context,
                achieved: result.fidelity,
                target: cfg.pulse.grape.target_fidelity,
            });
        }
        fidelities.push((context, result.fidelity));
        let shaped = PulseSegment::Shaped {
            name: "evolution".into(),
            pulse: Arc::new(result.pulse.padded(REGISTER_SPINS)?),
        };
        warm = Some(result.pulse);
        let evolved = simulate_sequence(&start, &[shaped], &reg, false)?;
        let values = plans
            .iter()
            .map(|plan| {
                let key = plan.rotation.padded(active.len()).to_string();
                let (pulse, _) = &library[&key];
                let ro = PulseSegment::Shaped {
                    name: key,
                    pulse: Arc::clone(pulse),
                };
                let rotated = simulate_sequence(&evolved, &[ro], &reg, false)?;
                measure_rotated(&rotated, plan, 1.0)
            })
            .collect::<Result<Vec<_>>>()?;
        records.push(record(cfg.experiment, plans, t, cfg.omega, values, 0.0)?);
    }
    Ok((records, fidelities))
}

/// Runs the configured experiment and returns records plus diagnostics.
pub fn run_experiment_report(cfg: &ExperimentConfig) -> Result<ExperimentReport> {
    if !cfg.omega.is_finite() {
        return Err(EqsError::OutOfRange("omega must be finite".into()));
    }
    let times = cfg.grid.points()?;
    let plans = readout_plans(cfg.experiment)?;
    let observables_per_point = audit(&plans, times.len());
    let mut report = ExperimentReport {
        records: Vec::new(),
        observables_per_point,
        discrepancy: None,
        sigma: None,
        pulse_fidelities: Vec::new(),
    };
    match cfg.level {
        Level::Ideal | Level::Circuit => report.records = run_exact(cfg, &times, &plans)?,
        Level::Noisy => {
            let (records, gap, sigma) = run_noisy(cfg, &times, &plans)?;
            report.records = records;
            report.discrepancy = Some(gap);
            report.sigma = Some(sigma);
        }
        Level::Pulse => {
            let (records, fidelities) = run_pulse(cfg, &times, &plans)?;
            report.records = records;
            report.pulse_fidelities = fidelities;
        }
    }
    Ok(report)
}

pub fn run_experiment(cfg: &ExperimentConfig) -> Result<Vec<TimeSeriesRecord>> {
    Ok(run_experiment_report(cfg)?.records)
}

/// CSV with columns `t_s`, one per expectation, one sigma per expectation,
/// `monotone`, `monotone_sigma`, `reference`.
pub fn to_csv(records: &[TimeSeriesRecord]) -> Result<String> {
    let first = records.first().ok_or(EqsError::EmptyRecords)?;
    let names: Vec<&str> = first.expectations.iter().map(|e| e.observable.as_str()).collect();
    let mut out = String::from("t_s");
    for n in &names {
        let _ = write!(out, ",{n}");
    }
    for n in &names {
        let _ = write!(out, ",sigma_{n}");
    }
    out.push_str(",monotone,monotone_sigma,reference\n");
    for r in records {
        if r.expectations.len() != names.len() {
            return Err(EqsError::DimensionMismatch {
                expected: names.len(),
                found: r.expectations.len(),
            });
        }
        out.push_str(&fixed(r.t, 7));
        for e in &r.expectations {
            let _ = write!(out, ",{}", fixed(e.value, 12));
        }
        for e in &r.expectations {
            let _ = write!(out, ",{}", fixed(e.sigma, 12));
        }
        let _ = writeln!(
            out,
            ",{},{},{}",
            fixed(r.monotone, 12),
            fixed(r.monotone_sigma, 12),
            fixed(r.reference, 12)
        );
    }
    Ok(out)
}

/// Fixed-point with `digits` decimals; values that round to zero print unsigned.
fn fixed(x: f64, digits: usize) -> String {
    let s = format!("{x:.digits$}");
    match s.strip_prefix('-') {
        Some(rest) if rest.bytes().all(|b| b == b'0' || b == b'.') => rest.to_string(),
        _ => s,
    }
}

pub fn emit(records: &[TimeSeriesRecord], path: impl AsRef<Path>) -> Result<()> {
    let text = to_csv(records)?;
    std::fs::write(path, text)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn coarse_grid() -> TimeGrid {
        TimeGrid {
            start: 0.4e-3,
            stop: 19.6e-3,
            step: 4.8e-3,
        }
    }

    #[test]
    fn default_grid_has_25_points() {
        let pts = TimeGrid::default().points().unwrap();
        assert_eq!(pts.len(), 25);
        assert!((pts[24] - 19.6e-3).abs() < 1e-15);
        let bad = TimeGrid {
            start: 1.0,
            stop: 0.0,
            step: 0.1,
        };
        assert!(bad.points().is_err());
    }

    #[test]
    fn ideal_and_circuit_levels_agree() {
        for experiment in [Experiment::Concurrence, Experiment::ThreeTangle] {
            let ideal = run_experiment(&ExperimentConfig::new(experiment, Level::Ideal)).unwrap();
            let circuit = run_experiment(&ExperimentConfig::new(experiment, Level::Circuit)).unwrap();
            for (a, b) in ideal.iter().zip(&circuit) {
                assert!((a.monotone - a.reference).abs() < 1e-9);
                assert!((a.monotone - b.monotone).abs() < 1e-9);
                for (x, y) in a.expectations.iter().zip(&b.expectations) {
                    assert!((x.value - y.value).abs() < 1e-9);
                }
            }
        }
    }

    #[test]
    fn noisy_needs_a_molecule() {
        let cfg = ExperimentConfig::new(Experiment::Concurrence, Level::Noisy);
        assert!(matches!(run_experiment(&cfg), Err(EqsError::MissingMolecule(_))));
    }

    #[test]
    fn noisy_run_has_error_bars() {
        let mut cfg = ExperimentConfig::new(Experiment::Concurrence, Level::Noisy);
        cfg.molecule = Some(SpinSystem::synthetic());
        cfg.grid = coarse_grid();
        cfg.seed = 3;
        let report = run_experiment_report(&cfg).unwrap();
        let gap = report.discrepancy.unwrap();
        assert!(gap > 0.0 && gap < 0.1, "{gap}");
        let sigma = report.sigma.unwrap();
        assert!((sigma - (gap + 0.013) / crate::errorbars::Z95).abs() < 1e-15);
        assert!(report.records.iter().all(|r| r.monotone_sigma > 0.0));
        let again = run_experiment_report(&cfg).unwrap();
        assert_eq!(to_csv(&report.records).unwrap(), to_csv(&again.records).unwrap());
    }

    #[test]
    fn csv_layout() {
        let records = run_experiment(&ExperimentConfig::new(Experiment::Concurrence, Level::Ideal)).unwrap();
        let csv = to_csv(&records).unwrap();
        let mut lines = csv.lines();
        assert_eq!(
            lines.next().unwrap(),
            "t_s,ZYY,XYY,sigma_ZYY,sigma_XYY,monotone,monotone_sigma,reference"
        );
        assert_eq!(lines.count(), 25);
        assert!(matches!(to_csv(&[]), Err(EqsError::EmptyRecords)));
    }

    #[test]
    fn parse_names() {
        assert_eq!("three-tangle".parse::<Experiment>().unwrap(), Experiment::ThreeTangle);
        assert_eq!("noisy".parse::<Level>().unwrap(), Level::Noisy);
        assert!("loud".parse::<Level>().is_err());
    }
}
