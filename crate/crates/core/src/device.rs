//! Device calibration: per-qubit T1/T2 and readout error, CNOT coupling
//! map, gate durations and depolarizing strengths.
//!
//! Noise model, applied after every gate on exactly the qubits it touches:
//! - amplitude damping, `p = 1 - exp(-t_gate / T1)`;
//! - pure dephasing, `p = 1 - exp(-t_gate / T_phi)` with
//!   `1/T_phi = 1/T2 - 1/(2 T1)`;
//! - depolarizing of strength `depol_1q` (single-qubit gates) or
//!   `depol_2q` (each CNOT operand).
//!
//! Idle qubits accrue nothing. Resonator/qubit frequencies, anharmonicity
//! and dispersive coupling are carried as metadata and do not enter the
//! dynamics.

use serde::{Deserialize, Serialize};

use crate::channel::KrausChannel;
use crate::circuit::Circuit;
use crate::error::{Error, Result};
use crate::gate::GateOp;

pub const DEFAULT_GATE_TIME_1Q_NS: f64 = 60.0;
pub const DEFAULT_GATE_TIME_2Q_NS: f64 = 300.0;
pub const DEFAULT_DEPOL_1Q: f64 = 0.001;
pub const DEFAULT_DEPOL_2Q: f64 = 0.02;
pub const DEFAULT_READOUT_ERROR: f64 = 0.03;

/// Bundled calibration of the five-qubit `ibmqx4` chip.
pub const IBMQX4_JSON: &str = include_str!("../data/ibmqx4.json");

fn default_readout() -> f64 {
    DEFAULT_READOUT_ERROR
}
fn default_t1q() -> f64 {
    DEFAULT_GATE_TIME_1Q_NS
}
fn default_t2q() -> f64 {
    DEFAULT_GATE_TIME_2Q_NS
}
fn default_d1() -> f64 {
    DEFAULT_DEPOL_1Q
}
fn default_d2() -> f64 {
    DEFAULT_DEPOL_2Q
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QubitCalibration {
    pub id: usize,
    #[serde(default)]
    pub resonator_freq_ghz: f64,
    #[serde(default)]
    pub qubit_freq_ghz: f64,
    #[serde(default)]
    pub anharmonicity_mhz: f64,
    #[serde(default)]
    pub coupling_khz: f64,
    pub t1_us: f64,
    pub t2_us: f64,
    #[serde(default = "default_readout")]
    pub readout_error: f64,
}

impl QubitCalibration {
    /// `1/T_phi` in 1/us; zero when `T2 = 2 T1`.
    pub fn pure_dephasing_rate(&self) -> f64 {
        (1.0 / self.t2_us - 1.0 / (2.0 * self.t1_us)).max(0.0)
    }

    /// Amplitude damping probability for a gate of `t_ns` nanoseconds.
    pub fn damping_probability(&self, t_ns: f64) -> f64 {
        -(-(t_ns * 1e-3) / self.t1_us).exp_m1()
    }

    pub fn dephasing_probability(&self, t_ns: f64) -> f64 {
        -(-(t_ns * 1e-3) * self.pure_dephasing_rate()).exp_m1()
    }

    fn validate(&self) -> Result<()> {
        let id = self.id;
        for (name, v) in [("t1_us", self.t1_us), ("t2_us", self.t2_us)] {
            if !(v > 0.0) {
                return Err(Error::Calibration(format!("qubit {id}: {name} must be positive, got {v}")));
            }
        }
        if self.t2_us > 2.0 * self.t1_us + 1e-9 {
            return Err(Error::Calibration(format!(
                "qubit {id}: T2 = {} us exceeds 2*T1 = {} us",
                self.t2_us,
                2.0 * self.t1_us
            )));
        }
        if !(0.0..=0.5).contains(&self.readout_error) {
            return Err(Error::Calibration(format!(
                "qubit {id}: readout_error {} outside [0, 0.5]",
                self.readout_error
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DeviceCalibration {
    pub qubits: Vec<QubitCalibration>,
    #[serde(default)]
    pub coupling_map: Vec<(usize, usize)>,
    #[serde(default = "default_t1q")]
    pub gate_time_1q_ns: f64,
    #[serde(default = "default_t2q")]
    pub gate_time_2q_ns: f64,
    #[serde(default = "default_d1")]
    pub depol_1q: f64,
    #[serde(default = "default_d2")]
    pub depol_2q: f64,
}

/// Parse and validate a calibration document.
pub fn load_calibration(document: &str) -> Result<DeviceCalibration> {
    let mut cal: DeviceCalibration = serde_json::from_str(document)
        .map_err(|e| Error::Calibration(format!("malformed calibration document: {e}")))?;
    cal.qubits.sort_by_key(|q| q.id);
    cal.validate()?;
    Ok(cal)
}

/// Directed CNOT pair check result.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CouplingMode {
    /// Report every CX not in the map.
    Strict,
    /// Reverse CXs whose flipped pair is in the map; report the rest.
    Rewrite,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CouplingViolation {
    /// Position of the offending gate in the circuit's op list.
    pub op_index: usize,
    pub control: usize,
    pub target: usize,
}

impl std::fmt::Display for CouplingViolation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "op {}: cx q[{}], q[{}] is not in the coupling map",
            self.op_index, self.control, self.target
        )
    }
}

impl DeviceCalibration {
    pub fn ibmqx4() -> Self {
        load_calibration(IBMQX4_JSON).expect("bundled calibration is valid")
    }

    pub fn num_qubits(&self) -> usize {
        self.qubits.len()
    }

    fn validate(&self) -> Result<()> {
        if self.qubits.is_empty() {
            return Err(Error::Calibration("no qubits listed".into()));
        }
        for (i, q) in self.qubits.iter().enumerate() {
            if q.id != i {
                return Err(Error::Calibration(format!(
                    "qubit ids must be 0..{} without gaps or repeats (found id {} at position {i})",
                    self.qubits.len(),
                    q.id
                )));
            }
            q.validate()?;
        }
        let n = self.qubits.len();
        for &(c, t) in &self.coupling_map {
            if c >= n || t >= n {
                return Err(Error::Calibration(format!("coupling pair [{c}, {t}] references a missing qubit")));
            }
            if c == t {
                return Err(Error::Calibration(format!("coupling pair [{c}, {t}] is a self-pair")));
            }
        }
        for (name, v) in [("gate_time_1q_ns", self.gate_time_1q_ns), ("gate_time_2q_ns", self.gate_time_2q_ns)] {
            if !(v >= 0.0) || !v.is_finite() {
                return Err(Error::Calibration(format!("{name} must be non-negative, got {v}")));
            }
        }
        for (name, v) in [("depol_1q", self.depol_1q), ("depol_2q", self.depol_2q)] {
            if !(0.0..=1.0).contains(&v) {
                return Err(Error::Calibration(format!("{name} {v} outside [0, 1]")));
            }
        }
        Ok(())
    }

    /// Error unless the device has at least `num_qubits` qubits.
    pub fn check_fits(&self, num_qubits: usize) -> Result<()> {
        if num_qubits > self.num_qubits() {
            return Err(Error::Calibration(format!(
                "circuit uses {num_qubits} qubits but the device has {}",
                self.num_qubits()
            )));
        }
        Ok(())
    }

    /// Noise channels to apply after `op`, with their targets. Identity
    /// channels are omitted.
    pub fn channels_for_gate(&self, op: &GateOp) -> Result<Vec<(KrausChannel, Vec<usize>)>> {
        let (t_ns, depol) = if op.is_two_qubit() {
            (self.gate_time_2q_ns, self.depol_2q)
        } else {
            (self.gate_time_1q_ns, self.depol_1q)
        };
        let mut out = Vec::new();
        for q in op.qubits() {
            let cal = self.qubits.get(q).ok_or_else(|| {
                Error::Calibration(format!("gate on q[{q}] but the device has {} qubits", self.num_qubits()))
            })?;
            let channels = [
                KrausChannel::amplitude_damping(cal.damping_probability(t_ns))?,
                KrausChannel::dephasing(cal.dephasing_probability(t_ns))?,
                KrausChannel::depolarizing(depol)?,
            ];
            out.extend(channels.into_iter().filter(|c| !c.is_identity()).map(|c| (c, vec![q])));
        }
        Ok(out)
    }

    pub fn readout_errors(&self, qubits: &[usize]) -> Result<Vec<f64>> {
        qubits
            .iter()
            .map(|&q| {
                self.qubits.get(q).map(|c| c.readout_error).ok_or_else(|| {
                    Error::Calibration(format!("measurement of q[{q}] but the device has {} qubits", self.num_qubits()))
                })
            })
            .collect()
    }

    pub fn has_edge(&self, control: usize, target: usize) -> bool {
        self.coupling_map.contains(&(control, target))
    }

    /// Check every CX against the coupling map. In rewrite mode, a CX whose
    /// reversed pair is allowed becomes `H H . CX(t, c) . H H`.
    pub fn validate_coupling(
        &self,
        circuit: &Circuit,
        mode: CouplingMode,
    ) -> Result<std::result::Result<Circuit, Vec<CouplingViolation>>> {
        self.check_fits(circuit.num_qubits())?;
        let mut violations = Vec::new();
        let mut out = Circuit::new(circuit.num_qubits())?;
        for (i, op) in circuit.ops().iter().enumerate() {
            match *op {
                GateOp::Cx(c, t) if !self.has_edge(c, t) => {
                    if mode == CouplingMode::Rewrite && self.has_edge(t, c) {
                        out.extend(&[GateOp::H(c), GateOp::H(t), GateOp::Cx(t, c), GateOp::H(c), GateOp::H(t)])?;
                    } else {
                        violations.push(CouplingViolation { op_index: i, control: c, target: t });
                    }
                }
                _ => {
                    out.push(*op)?;
                }
            }
        }
        for m in circuit.measurements() {
            out.measure(m.qubit, m.clbit)?;
        }
        Ok(if violations.is_empty() { Ok(out) } else { Err(violations) })
    }
}

/// Push a distribution over `errors.len()` measured bits through independent
/// symmetric bit flips (`errors[j]` for bit `j`, bit 0 most significant).
pub fn apply_readout_error(probs: &[f64], errors: &[f64]) -> Result<Vec<f64>> {
    let m = errors.len();
    if probs.len() != 1 << m {
        return Err(Error::DimensionMismatch { expected: 1 << m, found: probs.len() });
    }
    let mut cur = probs.to_vec();
    for (j, &e) in errors.iter().enumerate() {
        if e == 0.0 {
            continue;
        }
        let mask = 1usize << (m - 1 - j);
        let mut next = vec![0.0; cur.len()];
        for (idx, &p) in cur.iter().enumerate() {
            next[idx] += (1.0 - e) * p;
            next[idx ^ mask] += e * p;
        }
        cur = next;
    }
    Ok(cur)
}
