//! Circuit execution with or without a device noise model.

use crate::circuit::Circuit;
use crate::device::{apply_readout_error, DeviceCalibration};
use crate::error::Result;
use crate::gate::GateOp;
use crate::measure::{exact_probabilities, sample_distribution, BornDistribution, Counts};
use crate::par::Exec;
use crate::state::{DensityMatrix, StateVector};

/// Register state: a statevector on noiseless runs, a density matrix once
/// noise is involved.
#[derive(Debug, Clone, PartialEq)]
pub enum QState {
    Pure(StateVector),
    Mixed(DensityMatrix),
}

impl QState {
    pub fn num_qubits(&self) -> usize {
        match self {
            QState::Pure(s) => s.num_qubits(),
            QState::Mixed(r) => r.num_qubits(),
        }
    }

    pub fn apply_gate(&mut self, op: &GateOp) -> Result<()> {
        match self {
            QState::Pure(s) => s.apply_gate(op),
            QState::Mixed(r) => r.apply_gate(op),
        }
    }

    pub fn to_density(&self) -> DensityMatrix {
        match self {
            QState::Pure(s) => s.to_density(),
            QState::Mixed(r) => r.clone(),
        }
    }

    /// Reduced state on `keep`.
    pub fn reduced(&self, keep: &[usize]) -> Result<DensityMatrix> {
        self.to_density().partial_trace(keep)
    }
}

impl BornDistribution for QState {
    fn register_size(&self) -> usize {
        self.num_qubits()
    }
    fn full_probabilities(&self) -> Vec<f64> {
        match self {
            QState::Pure(s) => s.probabilities(),
            QState::Mixed(r) => r.probabilities(),
        }
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct Simulator<'a> {
    noise: Option<&'a DeviceCalibration>,
    exec: Exec,
}

impl<'a> Simulator<'a> {
    pub fn noiseless() -> Self {
        Self::default()
    }

    pub fn with_noise(cal: &'a DeviceCalibration) -> Self {
        Self { noise: Some(cal), exec: Exec::default() }
    }

    pub fn new(noise: Option<&'a DeviceCalibration>) -> Self {
        Self { noise, exec: Exec::default() }
    }

    pub fn exec(mut self, exec: Exec) -> Self {
        self.exec = exec;
        self
    }

    pub fn noise(&self) -> Option<&'a DeviceCalibration> {
        self.noise
    }

    pub fn initial_state(&self, num_qubits: usize) -> Result<QState> {
        match self.noise {
            None => Ok(QState::Pure(StateVector::zero(num_qubits)?)),
            Some(cal) => {
                cal.check_fits(num_qubits)?;
                Ok(QState::Mixed(DensityMatrix::zero_state(num_qubits)?))
            }
        }
    }

    /// Gate followed by its noise channels.
    pub fn apply(&self, state: &mut QState, op: &GateOp) -> Result<()> {
        state.apply_gate(op)?;
        if let Some(cal) = self.noise {
            let channels = cal.channels_for_gate(op)?;
            if channels.is_empty() {
                return Ok(());
            }
            if let QState::Pure(s) = state {
                *state = QState::Mixed(s.to_density());
            }
            let QState::Mixed(rho) = state else { unreachable!() };
            for (ch, targets) in channels {
                rho.apply_channel(&ch, &targets)?;
            }
        }
        Ok(())
    }

    pub fn apply_all<'o>(&self, state: &mut QState, ops: impl IntoIterator<Item = &'o GateOp>) -> Result<()> {
        ops.into_iter().try_for_each(|op| self.apply(state, op))
    }

    /// Final state of the circuit's gates from `|0...0>`.
    pub fn run(&self, circuit: &Circuit) -> Result<QState> {
        let mut state = self.initial_state(circuit.num_qubits())?;
        self.apply_all(&mut state, circuit.ops())?;
        Ok(state)
    }

    /// Outcome distribution of `qubits` as read out, i.e. including the
    /// device's readout confusion when noisy.
    pub fn readout_distribution(&self, state: &QState, qubits: &[usize]) -> Result<Vec<f64>> {
        let probs = exact_probabilities(state, qubits)?;
        match self.noise {
            None => Ok(probs),
            Some(cal) => apply_readout_error(&probs, &cal.readout_errors(qubits)?),
        }
    }

    /// Run and sample the circuit's measurements (every qubit into its own
    /// classical bit when the circuit measures nothing).
    pub fn sample(&self, circuit: &Circuit, shots: u64, seed: u64) -> Result<Counts> {
        let state = self.run(circuit)?;
        let qubits = if circuit.measurements().is_empty() {
            (0..circuit.num_qubits()).collect()
        } else {
            circuit.measured_qubits()
        };
        let probs = self.readout_distribution(&state, &qubits)?;
        let tallies = sample_distribution(&probs, shots, seed, self.exec)?;
        Ok(Counts::from_tallies(qubits.len(), &tallies))
    }
}
