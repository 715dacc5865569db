use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use eqs_core::circuits::{
    build_eqs_circuit, circuit_to_unitary, simplify_for_zero_input, Circuit, EqsModel, Gate, RotationWord,
};
use eqs_core::errorbars::Combination;
use eqs_core::experiment::{emit, run_experiment_report, to_csv, Experiment, ExperimentConfig, Level, TimeGrid};
use eqs_core::grape::{optimize, Drive, OptimizerConfig};
use eqs_core::nmr::{prepare_pps, prepare_pps_with_error, SpinSystem};
use eqs_core::qcore::{StateVector, UnitaryMatrix};
use eqs_core::tomography::{full_state_tomography, noisy_tomography, pps_fidelity};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[derive(Parser)]
#[command(name = "eqs", version, about = "Embedded simulation of entanglement monotones on a model NMR register")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a concurrence or three-tangle time series and write CSV.
    Run(RunArgs),
    /// Synthesize a shaped pulse for a named target.
    Grape(GrapeArgs),
    /// Full-state tomography of a pseudo-pure state.
    Tomography(TomographyArgs),
    /// Print the gate circuit of an embedded model.
    Circuit(CircuitArgs),
}

#[derive(Args)]
struct RunArgs {
    #[arg(long, value_parser = parse_experiment)]
    experiment: Experiment,
    #[arg(long, value_parser = parse_level, default_value = "ideal")]
    level: Level,
    /// Molecule file (required for the pulse and noisy levels).
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output CSV; printed to stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, default_value_t = 25.0)]
    omega_hz: f64,
    #[arg(long, default_value_t = 0.4)]
    start_ms: f64,
    #[arg(long, default_value_t = 19.6)]
    stop_ms: f64,
    #[arg(long, default_value_t = 0.8)]
    step_ms: f64,
    #[arg(long, default_value_t = 1e-5)]
    polarization: f64,
    #[arg(long, default_value_t = 0.013)]
    pps_infidelity: f64,
    #[arg(long)]
    no_dephasing: bool,
    /// Combine error bounds in quadrature instead of adding them.
    #[arg(long)]
    quadrature: bool,
    #[arg(long, default_value_t = 50.0)]
    grape_dt_us: f64,
    #[arg(long, default_value_t = 0.995)]
    grape_fidelity: f64,
    /// Evolution pulse length; 15 ms or 30 ms when omitted.
    #[arg(long)]
    evolution_budget_ms: Option<f64>,
}

#[derive(Args)]
struct GrapeArgs {
    /// `cnot:<control>:<target>`, `evolution-2q`, `evolution-3q` or `readout:<word>`.
    #[arg(long)]
    target: String,
    #[arg(long)]
    budget_ms: f64,
    /// Molecule file; the shipped synthetic register when omitted.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Evolution time for the evolution targets.
    #[arg(long, default_value_t = 9.2)]
    time_ms: f64,
    #[arg(long, default_value_t = 25.0)]
    omega_hz: f64,
    #[arg(long, default_value_t = 50.0)]
    dt_us: f64,
    #[arg(long, default_value_t = 0.995)]
    fidelity: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 4)]
    restarts: usize,
    #[arg(long, default_value_t = 1500)]
    max_iterations: usize,
    /// Independent x/y fields per spin instead of one global channel.
    #[arg(long)]
    selective: bool,
    /// Write the pulse as delimited text.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct TomographyArgs {
    #[arg(long, default_value = "pps")]
    state: String,
    #[arg(long, default_value_t = 4)]
    qubits: usize,
    #[arg(long, default_value_t = 1e-5)]
    polarization: f64,
    /// Preparation error of the deviation part.
    #[arg(long, default_value_t = 0.0)]
    infidelity: f64,
    /// Gaussian noise on every expectation, in units of the deviation signal.
    #[arg(long, default_value_t = 0.0)]
    noise: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Write the Pauli expectation list.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct CircuitArgs {
    #[arg(long, value_parser = parse_model)]
    model: EqsModel,
    #[arg(long, default_value_t = 9.2)]
    time_ms: f64,
    #[arg(long, default_value_t = 25.0)]
    omega_hz: f64,
    /// Drop the CNOTs that act trivially on `|0…0⟩`.
    #[arg(long)]
    simplify: bool,
    /// Lower CNOTs to rotations and J evolutions with this molecule's couplings.
    #[arg(long)]
    native: Option<PathBuf>,
}

fn parse_experiment(s: &str) -> Result<Experiment, String> {
    s.parse().map_err(|e: eqs_core::EqsError| e.to_string())
}

fn parse_level(s: &str) -> Result<Level, String> {
    s.parse().map_err(|e: eqs_core::EqsError| e.to_string())
}

fn parse_model(s: &str) -> Result<EqsModel, String> {
    s.parse().map_err(|e: eqs_core::EqsError| e.to_string())
}

fn load_molecule(path: &PathBuf) -> Result<SpinSystem> {
    SpinSystem::load(path).with_context(|| format!("loading molecule file {}", path.display()))
}

fn run(args: RunArgs) -> Result<()> {
    let mut cfg = ExperimentConfig::new(args.experiment, args.level);
    cfg.omega = 2.0 * std::f64::consts::PI * args.omega_hz;
    cfg.grid = TimeGrid {
        start: args.start_ms * 1e-3,
        stop: args.stop_ms * 1e-3,
        step: args.step_ms * 1e-3,
    };
    cfg.molecule = args.config.as_ref().map(load_molecule).transpose()?;
    cfg.seed = args.seed;
    cfg.noise.polarization = args.polarization;
    cfg.noise.pps_infidelity = args.pps_infidelity;
    cfg.noise.dephasing = !args.no_dephasing;
    if args.quadrature {
        cfg.combination = Combination::Quadrature;
    }
    cfg.pulse.grape.dt = args.grape_dt_us * 1e-6;
    cfg.pulse.grape.target_fidelity = args.grape_fidelity;
    cfg.pulse.grape.seed = args.seed;
    cfg.pulse.evolution_budget = args.evolution_budget_ms.map(|ms| ms * 1e-3);

    let started = Instant::now();
    let report = run_experiment_report(&cfg).context("running experiment")?;
    eprintln!(
        "{} {}: {} points, {} observables per point, {:.3} s",
        cfg.experiment,
        cfg.level,
        report.records.len(),
        report.observables_per_point.first().copied().unwrap_or(0),
        started.elapsed().as_secs_f64()
    );
    if let (Some(d), Some(s)) = (report.discrepancy, report.sigma) {
        eprintln!("model discrepancy {:.4}%, sigma {:.5}", 100.0 * d, s);
    }
    if let Some(worst) = report.pulse_fidelities.iter().map(|(_, f)| *f).reduce(f64::min) {
        eprintln!("{} pulses, lowest fidelity {worst:.5}", report.pulse_fidelities.len());
    }
    match args.out {
        Some(path) => emit(&report.records, &path).with_context(|| format!("writing {}", path.display()))?,
        None => print!("{}", to_csv(&report.records)?),
    }
    Ok(())
}

/// Target unitary and the spins it acts on, in register order.
fn grape_target(args: &GrapeArgs) -> Result<(UnitaryMatrix, Vec<String>)> {
    let omega = 2.0 * std::f64::consts::PI * args.omega_hz;
    let order = ["C3", "C4", "C2", "C1"];
    if let Some(rest) = args.target.strip_prefix("cnot:") {
        let (control, target) = rest
            .split_once(':')
            .context("expected cnot:<control>:<target>")?;
        let c = Circuit::with_gates(2, vec![Gate::Cnot { control: 0, target: 1 }])?;
        return Ok((circuit_to_unitary(&c), vec![control.to_string(), target.to_string()]));
    }
    if let Some(word) = args.target.strip_prefix("readout:") {
        let w: RotationWord = word.parse()?;
        if w.len() > order.len() {
            bail!("readout word longer than the register");
        }
        return Ok((w.unitary(), order[..w.len()].iter().map(|s| s.to_string()).collect()));
    }
    let model = match args.target.as_str() {
        "evolution-2q" => EqsModel::TwoQubit,
        "evolution-3q" => EqsModel::ThreeQubit,
        other => bail!("unknown GRAPE target '{other}'"),
    };
    let c = simplify_for_zero_input(&build_eqs_circuit(model, args.time_ms * 1e-3, omega)?);
    Ok((
        circuit_to_unitary(&c),
        order[..model.register_qubits()].iter().map(|s| s.to_string()).collect(),
    ))
}

fn grape(args: GrapeArgs) -> Result<()> {
    let molecule = match &args.config {
        Some(p) => load_molecule(p)?,
        None => SpinSystem::synthetic(),
    };
    let (target, spins) = grape_target(&args)?;
    let sys = molecule.subsystem(&spins)?;
    let cfg = OptimizerConfig {
        dt: args.dt_us * 1e-6,
        target_fidelity: args.fidelity,
        max_iterations: args.max_iterations,
        restarts: args.restarts,
        seed: args.seed,
        drive: args.selective.then(|| Drive::Selective { spins: sys.len() }),
        ..OptimizerConfig::default()
    };
    let started = Instant::now();
    let result = optimize(&target, &sys, args.budget_ms * 1e-3, &cfg, None)
        .with_context(|| format!("optimizing {} on {}", args.target, spins.join(",")))?;
    println!(
        "target {} on {}: fidelity {:.6}, {} segments of {:.1} us, {} iterations, {} trajectories, {:.2} s",
        args.target,
        spins.join(","),
        result.fidelity,
        result.pulse.segments(),
        result.pulse.dt() * 1e6,
        result.iterations,
        result.trajectories,
        started.elapsed().as_secs_f64()
    );
    if let Some(path) = args.out {
        result.pulse.save(&path).with_context(|| format!("writing {}", path.display()))?;
    }
    Ok(())
}

fn tomography(args: TomographyArgs) -> Result<()> {
    if args.state != "pps" {
        bail!("unknown state '{}'; only 'pps' is available", args.state);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(args.seed);
    let rho = if args.infidelity > 0.0 {
        prepare_pps_with_error(args.qubits, args.polarization, args.infidelity, &mut rng)?
    } else {
        prepare_pps(args.qubits, args.polarization)?
    };
    let result = if args.noise > 0.0 {
        noisy_tomography(&rho, args.noise * args.polarization, &mut rng)?
    } else {
        full_state_tomography(&rho)?
    };
    let f = pps_fidelity(&result.reconstructed, &StateVector::zero(args.qubits), args.polarization)?;
    println!("observables: {}", result.observable_count());
    println!("raw fidelity: {:.10}", f.raw);
    println!("normalized fidelity: {:.6}", f.normalized);
    println!("minimum eigenvalue: {:.3e}", result.min_eigenvalue);
    if let Some(path) = args.out {
        std::fs::write(&path, result.expectations_text()).with_context(|| format!("writing {}", path.display()))?;
    }
    Ok(())
}

fn circuit(args: CircuitArgs) -> Result<()> {
    let omega = 2.0 * std::f64::consts::PI * args.omega_hz;
    let mut c = build_eqs_circuit(args.model, args.time_ms * 1e-3, omega)?;
    if args.simplify {
        c = simplify_for_zero_input(&c);
    }
    if let Some(path) = &args.native {
        let molecule = load_molecule(path)?;
        let reg = molecule.subsystem(c.physical_map())?;
        c = c.to_native(reg.couplings_hz(), true)?;
    }
    print!("{c}");
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Run(a) => run(a),
        Command::Grape(a) => grape(a),
        Command::Tomography(a) => tomography(a),
        Command::Circuit(a) => circuit(a),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
