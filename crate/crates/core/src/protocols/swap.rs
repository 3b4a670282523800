//! Entanglement swapping between pairs (A1, B1) and (A2, B2).
//!
//! Both pairs start in `|Phi+>`. The CNOT sequence
//! `CX(A2 -> B1)`, `CX(B1 -> A2)`, `CX(A1 -> B2)` leaves
//! `|Phi+>_{A1 A2} (x) |Phi+>_{B1 B2}`: Alice and Bob end up sharing a Bell
//! pair and Charlie's two qubits form the other.

use std::collections::BTreeMap;

use crate::circuit::Circuit;
use crate::device::DeviceCalibration;
use crate::error::{Error, Result};
use crate::gate::GateOp;
use crate::par::{derive_seed, Exec};
use crate::sim::Simulator;
use crate::state::phi_plus;
use crate::tomography::{run_tomography, CorrelationMode, TomographyConfig};

use super::bell_prep;
use super::report::{Experiment, ProtocolReport, VariantReport};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SwapLayout {
    pub a1: usize,
    pub b1: usize,
    pub a2: usize,
    pub b2: usize,
}

impl Default for SwapLayout {
    fn default() -> Self {
        Self { a1: 0, b1: 1, a2: 2, b2: 3 }
    }
}

impl SwapLayout {
    pub fn validate(&self) -> Result<()> {
        let qs = [self.a1, self.b1, self.a2, self.b2];
        for i in 0..4 {
            if qs[..i].contains(&qs[i]) {
                return Err(Error::InvalidArgument(format!("swap layout reuses q[{}]", qs[i])));
            }
        }
        Ok(())
    }

    pub fn num_qubits(&self) -> usize {
        [self.a1, self.b1, self.a2, self.b2].into_iter().max().unwrap() + 1
    }

    /// Alice-Bob pair after the swap.
    pub fn alice_bob(&self) -> [usize; 2] {
        [self.a1, self.a2]
    }

    /// Charlie's pair after the swap.
    pub fn charlie(&self) -> [usize; 2] {
        [self.b1, self.b2]
    }
}

/// The three swapping CNOTs alone.
pub fn swap_ops(layout: &SwapLayout) -> [GateOp; 3] {
    [
        GateOp::Cx(layout.a2, layout.b1),
        GateOp::Cx(layout.b1, layout.a2),
        GateOp::Cx(layout.a1, layout.b2),
    ]
}

/// Bell preparation on both pairs followed by the swapping CNOTs.
pub fn swap_circuit(layout: &SwapLayout) -> Result<Circuit> {
    layout.validate()?;
    let mut c = Circuit::new(layout.num_qubits())?;
    c.extend(&bell_prep(layout.a1, layout.b1)?)?;
    c.extend(&bell_prep(layout.a2, layout.b2)?)?;
    c.extend(&swap_ops(layout))?;
    Ok(c)
}

const PAIRS: [&str; 2] = ["A1A2", "B1B2"];

fn swap_variant(
    circuit: &Circuit,
    layout: &SwapLayout,
    sim: Simulator<'_>,
    shots: Option<u64>,
    seed: u64,
    exec: Exec,
) -> Result<VariantReport> {
    let pairs = [layout.alice_bob(), layout.charlie()];
    let target = phi_plus();
    let results = exec.try_map_range(2, |k| {
        let cfg = TomographyConfig { shots, seed: derive_seed(seed, k as u64), mode: CorrelationMode::Joint, exec };
        run_tomography(&sim, circuit, &pairs[k], &cfg)
    })?;
    let mut report = VariantReport { shots, seed: shots.map(|_| seed), ..Default::default() };
    for (name, res) in PAIRS.iter().zip(results) {
        report.fidelities.insert(format!("F_{name}"), res.fidelity_to(&target)?);
        report.raw_fidelities.insert(format!("F_{name}"), res.raw_fidelity_to(&target)?);
        report.tomography.insert(name.to_string(), res);
    }
    Ok(report)
}

/// Swap circuit on the default layout, tomographed on (A1, A2) and (B1, B2).
///
/// Variants: `ideal` (exact probabilities, no noise), `sampled` (shot noise
/// only) and, when `cal` is given, `noisy` (device channels, readout error
/// and shot noise). Variant seeds are `derive_seed(seed, 1)` and
/// `derive_seed(seed, 2)`.
pub fn run_swap_experiment(cal: Option<&DeviceCalibration>, shots: u64, seed: u64) -> Result<ProtocolReport> {
    run_swap_experiment_with(cal, shots, seed, Exec::default())
}

pub fn run_swap_experiment_with(
    cal: Option<&DeviceCalibration>,
    shots: u64,
    seed: u64,
    exec: Exec,
) -> Result<ProtocolReport> {
    if shots == 0 {
        return Err(Error::InvalidArgument("shots must be positive".into()));
    }
    let layout = SwapLayout::default();
    let circuit = swap_circuit(&layout)?;
    if let Some(cal) = cal {
        cal.check_fits(circuit.num_qubits())?;
    }
    let jobs = if cal.is_some() { 3 } else { 2 };
    let variants = exec.try_map_range(jobs, |k| match k {
        0 => swap_variant(&circuit, &layout, Simulator::noiseless(), None, seed, exec),
        1 => swap_variant(&circuit, &layout, Simulator::noiseless(), Some(shots), derive_seed(seed, 1), exec),
        _ => swap_variant(&circuit, &layout, Simulator::new(cal), Some(shots), derive_seed(seed, 2), exec),
    })?;

    let mut prep = Circuit::new(layout.num_qubits())?;
    prep.extend(&circuit.ops()[..4])?;
    let stage_states = vec![
        ("initial".to_string(), prep.statevector()?),
        ("swapped".to_string(), circuit.statevector()?),
    ];

    let mut analytic = BTreeMap::new();
    let final_state = crate::sim::QState::Pure(circuit.statevector()?);
    for (name, pair) in PAIRS.iter().zip([layout.alice_bob(), layout.charlie()]) {
        let reduced = final_state.reduced(&pair)?;
        analytic.insert(format!("F_{name}"), crate::tomography::fidelity(&phi_plus().to_density(), &reduced)?);
    }

    Ok(ProtocolReport::assemble(Experiment::Swap, variants, stage_states, analytic, seed, shots, BTreeMap::new()))
}
