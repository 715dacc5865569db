//! Gradient ascent pulse engineering on piecewise-constant controls.

mod pulse;

pub use pulse::{ControlPulse, Drive};

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{EqsError, Result};
use crate::nmr::SpinSystem;
use crate::qcore::{hermitian_eigen, CMatrix, UnitaryMatrix};

/// Optimizer settings. Amplitudes are clamped to `±amplitude_bound` after every step.
#[derive(Debug, Clone, PartialEq)]
pub struct OptimizerConfig {
    pub dt: f64,
    pub target_fidelity: f64,
    pub max_iterations: usize,
    pub amplitude_bound: f64,
    pub restarts: usize,
    pub seed: u64,
    /// Random initial amplitudes are uniform in `±initial_scale·amplitude_bound`.
    pub initial_scale: f64,
    /// `None` drives every spin of the register with weight 1 on one channel.
    pub drive: Option<Drive>,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        Self {
            dt: 50e-6,
            target_fidelity: 0.995,
            max_iterations: 1500,
            amplitude_bound: 2.0 * PI * 10e3,
            restarts: 4,
            seed: 0,
            initial_scale: 0.2,
            drive: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GrapeResult {
    pub pulse: ControlPulse,
    pub fidelity: f64,
    pub iterations: usize,
    /// Trajectories started, including the successful one.
    pub trajectories: usize,
    pub converged: bool,
}

struct Segment {
    vals: Vec<f64>,
    vecs: CMatrix,
    u: CMatrix,
}

/// Eigen-decomposed propagators of a pulse.
struct Propagation {
    segments: Vec<Segment>,
    dt: f64,
}

fn check_register(pulse: &ControlPulse, sys: &SpinSystem) -> Result<()> {
    if pulse.num_spins() != sys.len() {
        return Err(EqsError::WrongQubitCount {
            expected: sys.len(),
            found: pulse.num_spins(),
        });
    }
    Ok(())
}

impl Propagation {
    fn new(pulse: &ControlPulse, energies: &[f64], controls: &[CMatrix]) -> Self {
        let dt = pulse.dt();
        let segments = pulse
            .amplitudes()
            .iter()
            .map(|row| {
                let mut h = CMatrix::from_diagonal(&nalgebra::DVector::from_iterator(
                    energies.len(),
                    energies.iter().map(|&e| Complex64::new(e, 0.0)),
                ));
                for (a, hc) in row.iter().zip(controls) {
                    if *a != 0.0 {
                        h += hc * Complex64::new(*a, 0.0);
                    }
                }
                let (vals, vecs) = hermitian_eigen(&h);
                let mut scaled = vecs.clone();
                for (c, &l) in vals.iter().enumerate() {
                    let phase = Complex64::from_polar(1.0, -l * dt);
                    for r in 0..scaled.nrows() {
                        scaled[(r, c)] *= phase;
                    }
                }
                let u = &scaled * vecs.adjoint();
                Segment { vals, vecs, u }
            })
            .collect();
        Self { segments, dt }
    }

    fn total(&self, dim: usize) -> CMatrix {
        self.segments
            .iter()
            .fold(CMatrix::identity(dim, dim), |acc, s| &s.u * acc)
    }

    /// `Φ = |Tr(T†U)|/d` and, if asked, `∂Φ/∂a_{k,c}`.
    fn evaluate(&self, target: &CMatrix, controls: &[CMatrix], with_grad: bool) -> (f64, Vec<Vec<f64>>) {
        let dim = target.nrows();
        let n_seg = self.segments.len();
        let mut forward = Vec::with_capacity(n_seg + 1);
        forward.push(CMatrix::identity(dim, dim));
        for s in &self.segments {
            let next = &s.u * forward.last().expect("nonempty");
            forward.push(next);
        }
        let t_adj = target.adjoint();
        let g = (&t_adj * &forward[n_seg]).trace();
        let phi = g.norm() / dim as f64;
        if !with_grad {
            return (phi, Vec::new());
        }
        let mut grad = vec![vec![0.0; controls.len()]; n_seg];
        if g.norm() == 0.0 {
            return (phi, grad);
        }
        let mut backward = CMatrix::identity(dim, dim);
        for k in (0..n_seg).rev() {
            let seg = &self.segments[k];
            // g = Tr(M_k U_k) with M_k = F_{k−1} T† B_k
            let m = &forward[k] * &t_adj * &backward;
            let vadj = seg.vecs.adjoint();
            let m_eig = &vadj * &m * &seg.vecs;
            let dt = self.dt;
            let kernel = CMatrix::from_fn(dim, dim, |a, b| {
                let (la, lb) = (seg.vals[a], seg.vals[b]);
                let x = 0.5 * (la - lb) * dt;
                let sinc = if x.abs() < 1e-8 { 1.0 - x * x / 6.0 } else { x.sin() / x };
                Complex64::new(0.0, -dt) * Complex64::from_polar(1.0, -0.5 * (la + lb) * dt) * sinc
            });
            for (c, hc) in controls.iter().enumerate() {
                let h_eig = &vadj * hc * &seg.vecs;
                let mut dg = Complex64::new(0.0, 0.0);
                for a in 0..dim {
                    for b in 0..dim {
                        dg += m_eig[(b, a)] * kernel[(a, b)] * h_eig[(a, b)];
                    }
                }
                grad[k][c] = (g.conj() * dg).re / (g.norm() * dim as f64);
            }
            backward = &backward * &seg.u;
        }
        (phi, grad)
    }
}

/// Per-segment propagators, first segment first.
pub(crate) fn segment_propagators(pulse: &ControlPulse, sys: &SpinSystem) -> Result<Vec<CMatrix>> {
    check_register(pulse, sys)?;
    let controls = pulse.drive().control_hamiltonians();
    let prop = Propagation::new(pulse, &sys.internal_energies(), &controls);
    Ok(prop.segments.into_iter().map(|s| s.u).collect())
}

/// Propagator of `pulse` under the register's internal Hamiltonian plus the drive.
pub fn pulse_to_unitary(pulse: &ControlPulse, sys: &SpinSystem) -> Result<UnitaryMatrix> {
    check_register(pulse, sys)?;
    let controls = pulse.drive().control_hamiltonians();
    let prop = Propagation::new(pulse, &sys.internal_energies(), &controls);
    Ok(UnitaryMatrix::from_matrix_unchecked(prop.total(1 << sys.len())))
}

/// `|Tr(T†U)| / d`
pub fn fidelity(pulse: &ControlPulse, target: &UnitaryMatrix, sys: &SpinSystem) -> Result<f64> {
    let u = pulse_to_unitary(pulse, sys)?;
    u.overlap(target)
}

/// Exact derivative of the fidelity with respect to every amplitude, `[segment][channel]`.
pub fn gradient(pulse: &ControlPulse, target: &UnitaryMatrix, sys: &SpinSystem) -> Result<Vec<Vec<f64>>> {
    check_register(pulse, sys)?;
    if target.num_qubits() != sys.len() {
        return Err(EqsError::WrongQubitCount {
            expected: sys.len(),
            found: target.num_qubits(),
        });
    }
    let controls = pulse.drive().control_hamiltonians();
    let prop = Propagation::new(pulse, &sys.internal_energies(), &controls);
    Ok(prop.evaluate(target.matrix(), &controls, true).1)
}

struct Problem<'a> {
    target: &'a CMatrix,
    energies: Vec<f64>,
    controls: Vec<CMatrix>,
    bound: f64,
}

impl Problem<'_> {
    fn eval(&self, pulse: &ControlPulse, with_grad: bool) -> (f64, Vec<Vec<f64>>) {
        Propagation::new(pulse, &self.energies, &self.controls).evaluate(self.target, &self.controls, with_grad)
    }

    fn stepped(&self, pulse: &ControlPulse, dir: &[Vec<f64>], alpha: f64) -> ControlPulse {
        let mut out = pulse.clone();
        for (row, d) in out.amplitudes_mut().iter_mut().zip(dir) {
            for (a, &g) in row.iter_mut().zip(d) {
                *a = (*a + alpha * g).clamp(-self.bound, self.bound);
            }
        }
        out
    }
}

fn dot(a: &[Vec<f64>], b: &[Vec<f64>]) -> f64 {
    a.iter().flatten().zip(b.iter().flatten()).map(|(x, y)| x * y).sum()
}

/// Conjugate-gradient ascent with backtracking from one starting pulse.
fn climb(problem: &Problem, start: ControlPulse, cfg: &OptimizerConfig) -> (ControlPulse, f64, usize) {
    let mut pulse = start;
    let (mut phi, mut grad) = problem.eval(&pulse, true);
    let mut dir = grad.clone();
    let gmax = grad.iter().flatten().fold(0.0f64, |m, g| m.max(g.abs()));
    // first trial moves the largest amplitude by 5% of the bound
    let mut alpha = if gmax > 0.0 { 0.05 * problem.bound / gmax } else { 0.0 };
    let mut iterations = 0;
    while iterations < cfg.max_iterations && phi < cfg.target_fidelity && alpha > 0.0 {
        iterations += 1;
        let mut accepted = None;
        let mut trial_alpha = alpha;
        for _ in 0..25 {
            let trial = problem.stepped(&pulse, &dir, trial_alpha);
            let (p, _) = problem.eval(&trial, false);
            if p > phi {
                accepted = Some((trial, p));
                break;
            }
            trial_alpha *= 0.3;
        }
        match accepted {
            Some((trial, p)) => {
                pulse = trial;
                phi = p;
                alpha = trial_alpha * 1.5;
                let prev_grad = std::mem::replace(&mut grad, problem.eval(&pulse, true).1);
                // Polak–Ribière with restart
                let denom = dot(&prev_grad, &prev_grad);
                let beta = if denom > 0.0 {
                    ((dot(&grad, &grad) - dot(&grad, &prev_grad)) / denom).max(0.0)
                } else {
                    0.0
                };
                for (d, g) in dir.iter_mut().flatten().zip(grad.iter().flatten()) {
                    *d = g + beta * *d;
                }
                if dot(&dir, &grad) <= 0.0 {
                    dir = grad.clone();
                }
            }
            None if dir != grad => {
                dir = grad.clone();
            }
            None => break,
        }
    }
    (pulse, phi, iterations)
}

/// Best pulse found within the restart budget, converged or not.
pub fn search(
    target: &UnitaryMatrix,
    sys: &SpinSystem,
    duration: f64,
    cfg: &OptimizerConfig,
    warm_start: Option<&ControlPulse>,
) -> Result<GrapeResult> {
    let n = sys.len();
    if target.num_qubits() != n {
        return Err(EqsError::WrongQubitCount {
            expected: n,
            found: target.num_qubits(),
        });
    }
    if duration < 0.0 {
        return Err(EqsError::NegativeTime(duration));
    }
    if !(cfg.dt > 0.0) {
        return Err(EqsError::OutOfRange(format!("segment length {} must be positive", cfg.dt)));
    }
    if !(cfg.amplitude_bound > 0.0) || !(0.0..=1.0).contains(&cfg.target_fidelity) {
        return Err(EqsError::OutOfRange("invalid optimizer bounds".into()));
    }
    let drive = cfg.drive.clone().unwrap_or_else(|| Drive::global(n));
    if drive.num_spins() != n {
        return Err(EqsError::WrongQubitCount {
            expected: n,
            found: drive.num_spins(),
        });
    }
    let segments = (duration / cfg.dt).round().max(1.0) as usize;
    let dt = duration / segments as f64;
    let problem = Problem {
        target: target.matrix(),
        energies: sys.internal_energies(),
        controls: drive.control_hamiltonians(),
        bound: cfg.amplitude_bound,
    };
    let mut best: Option<GrapeResult> = None;
    let mut total_iterations = 0;
    for r in 0..cfg.restarts.max(1) {
        let start = match warm_start {
            Some(w) if r == 0 && w.segments() == segments && w.drive() == &drive => {
                ControlPulse::new(dt, drive.clone(), w.amplitudes().to_vec())?
            }
            _ => {
                let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed.wrapping_add(r as u64));
                let scale = cfg.initial_scale * cfg.amplitude_bound;
                let rows = (0..segments)
                    .map(|_| {
                        (0..drive.channels())
                            .map(|_| scale * (2.0 * rng.random::<f64>() - 1.0))
                            .collect()
                    })
                    .collect();
                ControlPulse::new(dt, drive.clone(), rows)?
            }
        };
        let (pulse, phi, iterations) = climb(&problem, start, cfg);
        total_iterations += iterations;
        let converged = phi >= cfg.target_fidelity;
        if best.as_ref().is_none_or(|b| phi > b.fidelity) {
            best = Some(GrapeResult {
                pulse,
                fidelity: phi,
                iterations: total_iterations,
                trajectories: r + 1,
                converged,
            });
        }
        if converged {
            break;
        }
    }
    let mut result = best.expect("at least one trajectory");
    result.iterations = total_iterations;
    Ok(result)
}

/// Like [`search`] but fails with `NotConverged` below the target fidelity.
pub fn optimize(
    target: &UnitaryMatrix,
    sys: &SpinSystem,
    duration: f64,
    cfg: &OptimizerConfig,
    warm_start: Option<&ControlPulse>,
) -> Result<GrapeResult> {
    let result = search(target, sys, duration, cfg, warm_start)?;
    if !result.converged {
        return Err(EqsError::NotConverged {
            achieved: result.fidelity,
            target: cfg.target_fidelity,
        });
    }
    Ok(result)
}
