use std::fmt::Write as _;
use std::path::Path;

use num_complex::Complex64;

use crate::error::{EqsError, Result};
use crate::qcore::{CMatrix, Pauli};

/// How the rf field reaches the spins.
#[derive(Debug, Clone, PartialEq)]
pub enum Drive {
    /// One homonuclear channel; each spin sees the field scaled by its weight.
    Global { weights: Vec<f64> },
    /// Independent x/y fields per spin.
    Selective { spins: usize },
}

impl Drive {
    /// Uniform global drive on `n` spins.
    pub fn global(n: usize) -> Self {
        Drive::Global { weights: vec![1.0; n] }
    }

    pub fn num_spins(&self) -> usize {
        match self {
            Drive::Global { weights } => weights.len(),
            Drive::Selective { spins } => *spins,
        }
    }

    pub fn channels(&self) -> usize {
        match self {
            Drive::Global { .. } => 2,
            Drive::Selective { spins } => 2 * spins,
        }
    }

    /// Copy of this drive on a larger register, the extra spins undriven.
    pub fn padded(&self, n: usize) -> Result<Self> {
        match self {
            Drive::Global { weights } if weights.len() <= n => {
                let mut w = weights.clone();
                w.resize(n, 0.0);
                Ok(Drive::Global { weights: w })
            }
            Drive::Selective { spins } if *spins == n => Ok(self.clone()),
            _ => Err(EqsError::WrongQubitCount {
                expected: n,
                found: self.num_spins(),
            }),
        }
    }

    /// Control Hamiltonians `Σ_j w_j σ_x^j/2`, `Σ_j w_j σ_y^j/2` (global) or
    /// `σ_x^j/2`, `σ_y^j/2` for every spin (selective).
    pub fn control_hamiltonians(&self) -> Vec<CMatrix> {
        let n = self.num_spins();
        let single = |j: usize, axis: Pauli| {
            let mut m = CMatrix::identity(1, 1);
            for q in 0..n {
                m = if q == j {
                    m.kronecker(&(axis.matrix() * Complex64::new(0.5, 0.0)))
                } else {
                    m.kronecker(&CMatrix::identity(2, 2))
                };
            }
            m
        };
        match self {
            Drive::Global { weights } => [Pauli::X, Pauli::Y]
                .iter()
                .map(|&axis| {
                    let dim = 1usize << n;
                    weights
                        .iter()
                        .enumerate()
                        .filter(|(_, &w)| w != 0.0)
                        .fold(CMatrix::zeros(dim, dim), |acc, (j, &w)| {
                            acc + single(j, axis) * Complex64::new(w, 0.0)
                        })
                })
                .collect(),
            Drive::Selective { spins } => (0..*spins)
                .flat_map(|j| [single(j, Pauli::X), single(j, Pauli::Y)])
                .collect(),
        }
    }
}

/// Piecewise-constant control amplitudes in rad/s.
#[derive(Debug, Clone, PartialEq)]
pub struct ControlPulse {
    dt: f64,
    drive: Drive,
    amplitudes: Vec<Vec<f64>>,
}

impl ControlPulse {
    /// `amplitudes[k][c]` is channel `c` during segment `k`.
    pub fn new(dt: f64, drive: Drive, amplitudes: Vec<Vec<f64>>) -> Result<Self> {
        if dt < 0.0 || !dt.is_finite() {
            return Err(EqsError::NegativeTime(dt));
        }
        let channels = drive.channels();
        for row in &amplitudes {
            if row.len() != channels {
                return Err(EqsError::DimensionMismatch {
                    expected: channels,
                    found: row.len(),
                });
            }
            if row.iter().any(|a| !a.is_finite()) {
                return Err(EqsError::OutOfRange("non-finite pulse amplitude".into()));
            }
        }
        if let Drive::Global { weights } = &drive {
            if weights.is_empty() || weights.iter().any(|w| !w.is_finite()) {
                return Err(EqsError::Config("invalid drive weights".into()));
            }
        }
        Ok(Self { dt, drive, amplitudes })
    }

    pub fn zeros(dt: f64, segments: usize, drive: Drive) -> Result<Self> {
        let channels = drive.channels();
        Self::new(dt, drive, vec![vec![0.0; channels]; segments])
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn drive(&self) -> &Drive {
        &self.drive
    }

    pub fn segments(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn duration(&self) -> f64 {
        self.dt * self.amplitudes.len() as f64
    }

    pub fn amplitudes(&self) -> &[Vec<f64>] {
        &self.amplitudes
    }

    pub fn num_spins(&self) -> usize {
        self.drive.num_spins()
    }

    pub fn max_amplitude(&self) -> f64 {
        self.amplitudes
            .iter()
            .flatten()
            .fold(0.0, |m: f64, a| m.max(a.abs()))
    }

    /// Same amplitudes driving a larger register; added spins get weight 0.
    pub fn padded(&self, n: usize) -> Result<Self> {
        Ok(Self {
            dt: self.dt,
            drive: self.drive.padded(n)?,
            amplitudes: self.amplitudes.clone(),
        })
    }

    pub(crate) fn amplitudes_mut(&mut self) -> &mut [Vec<f64>] {
        &mut self.amplitudes
    }

    fn column_names(&self) -> Vec<String> {
        match &self.drive {
            Drive::Global { .. } => vec!["x_rad_s".into(), "y_rad_s".into()],
            Drive::Selective { spins } => (0..*spins)
                .flat_map(|j| [format!("x{j}_rad_s"), format!("y{j}_rad_s")])
                .collect(),
        }
    }

    /// Comma-separated export with a `#` header carrying dt, N and the duration.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let drive = match &self.drive {
            Drive::Global { weights } => format!(
                "drive=global weights={}",
                weights.iter().map(|w| w.to_string()).collect::<Vec<_>>().join(",")
            ),
            Drive::Selective { spins } => format!("drive=selective spins={spins}"),
        };
        let _ = writeln!(
            out,
            "# dt_s={} segments={} duration_s={} {drive}",
            self.dt,
            self.segments(),
            self.duration()
        );
        let _ = writeln!(out, "segment,{}", self.column_names().join(","));
        for (k, row) in self.amplitudes.iter().enumerate() {
            let cells: Vec<String> = row.iter().map(|a| a.to_string()).collect();
            let _ = writeln!(out, "{k},{}", cells.join(","));
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let err = |line: usize, message: String| EqsError::Parse { line, message };
        let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
        let (_, header) = lines.next().ok_or_else(|| err(1, "empty pulse file".into()))?;
        let header = header
            .strip_prefix('#')
            .ok_or_else(|| err(1, "missing '#' header".into()))?;
        let mut dt = None;
        let mut segments = None;
        let mut kind = None;
        let mut weights = None;
        let mut spins = None;
        for field in header.split_whitespace() {
            let (key, value) = field
                .split_once('=')
                .ok_or_else(|| err(1, format!("malformed header field '{field}'")))?;
            let num = |v: &str| v.parse::<f64>().map_err(|e| err(1, format!("{key}: {e}")));
            match key {
                "dt_s" => dt = Some(num(value)?),
                "segments" => {
                    segments = Some(value.parse::<usize>().map_err(|e| err(1, format!("segments: {e}")))?)
                }
                "duration_s" => {}
                "drive" => kind = Some(value.to_string()),
                "weights" => {
                    weights = Some(value.split(',').map(num).collect::<Result<Vec<f64>>>()?);
                }
                "spins" => spins = Some(value.parse::<usize>().map_err(|e| err(1, format!("spins: {e}")))?),
                other => return Err(err(1, format!("unknown header field '{other}'"))),
            }
        }
        let dt = dt.ok_or_else(|| err(1, "header lacks dt_s".into()))?;
        let drive = match kind.as_deref() {
            Some("global") => Drive::Global {
                weights: weights.ok_or_else(|| err(1, "global drive needs weights".into()))?,
            },
            Some("selective") => Drive::Selective {
                spins: spins.ok_or_else(|| err(1, "selective drive needs spins".into()))?,
            },
            _ => return Err(err(1, "header lacks drive=global|selective".into())),
        };
        let channels = drive.channels();
        let mut amplitudes = Vec::new();
        for (i, line) in lines {
            let line_no = i + 1;
            if line.starts_with("segment") {
                continue;
            }
            let cells: Vec<&str> = line.split(',').map(str::trim).collect();
            if cells.len() != channels + 1 {
                return Err(err(line_no, format!("expected {} columns, found {}", channels + 1, cells.len())));
            }
            let index: usize = cells[0].parse().map_err(|e| err(line_no, format!("segment index: {e}")))?;
            if index != amplitudes.len() {
                return Err(err(line_no, format!("segment {index} out of order")));
            }
            let row = cells[1..]
                .iter()
                .map(|c| c.parse::<f64>().map_err(|e| err(line_no, format!("amplitude: {e}"))))
                .collect::<Result<Vec<_>>>()?;
            amplitudes.push(row);
        }
        if let Some(n) = segments {
            if n != amplitudes.len() {
                return Err(err(1, format!("header says {n} segments, found {}", amplitudes.len())));
            }
        }
        Self::new(dt, drive, amplitudes)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, self.to_text())?;
        Ok(())
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_text(&std::fs::read_to_string(path)?)
    }
}
