//! Error injection on a Bell pair and its stage-wise correction.
//!
//! Errors are deliberate and their location is known: bit flip `X`, phase
//! flip `U1(pi)` and phase change `U1(phi)` are appended in that order on
//! `error_qubit`. With all three on qubit 0, `|Phi+>` becomes
//! `(|01> - e^{i phi}|10>)/sqrt(2)`. This is a demonstration protocol, not
//! a general error-correcting code.
//!
//! Ancilla mode (pair on q0, q1, ancilla q2 in `|0>`):
//! 1. bit flip: `CX(0->2) CX(1->2)` writes the pair parity to the ancilla,
//!    `CX(2->1)` restores even parity, `X(2)` resets the ancilla
//!    -> `(|00> - e^{i phi}|11>)/sqrt(2)`;
//! 2. phase flip: `U1(pi)` -> `(|00> + e^{i phi}|11>)/sqrt(2)`;
//! 3. phase change: `U1(-phi)` -> `(|00> + |11>)/sqrt(2)`.
//!
//! Direct mode applies the exact inverses on `error_qubit` in reverse
//! injection order.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use crate::circuit::Circuit;
use crate::device::DeviceCalibration;
use crate::error::{Error, Result};
use crate::gate::GateOp;
use crate::par::{derive_seed, Exec};
use crate::sim::Simulator;
use crate::state::{phi_plus, StateVector};
use crate::tomography::{pure_state_fidelity, run_tomography, CorrelationMode, TomographyConfig};

use super::bell_prep;
use super::report::{Experiment, ProtocolReport, VariantReport};

/// Pair qubits and ancilla of the purification register.
pub const PAIR: [usize; 2] = [0, 1];
pub const ANCILLA: usize = 2;
pub const REGISTER: usize = 3;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ErrorSpec {
    pub bit_flip: bool,
    pub phase_flip: bool,
    pub phase_change: bool,
    /// Phase-change angle in radians.
    pub phi: f64,
    pub error_qubit: usize,
}

impl Default for ErrorSpec {
    fn default() -> Self {
        Self::all(0.125)
    }
}

impl ErrorSpec {
    /// All three errors on qubit 0.
    pub fn all(phi: f64) -> Self {
        Self { bit_flip: true, phase_flip: true, phase_change: true, phi, error_qubit: 0 }
    }

    pub fn none() -> Self {
        Self { bit_flip: false, phase_flip: false, phase_change: false, phi: 0.125, error_qubit: 0 }
    }

    pub fn validate(&self) -> Result<()> {
        if !self.phi.is_finite() {
            return Err(Error::InvalidArgument(format!("phi {} is not finite", self.phi)));
        }
        if !PAIR.contains(&self.error_qubit) {
            return Err(Error::InvalidArgument(format!(
                "error qubit {} is not part of the pair (0, 1)",
                self.error_qubit
            )));
        }
        Ok(())
    }

    pub fn error_ops(&self) -> Vec<GateOp> {
        let q = self.error_qubit;
        let mut ops = Vec::new();
        if self.bit_flip {
            ops.push(GateOp::X(q));
        }
        if self.phase_flip {
            ops.push(GateOp::U1(q, PI));
        }
        if self.phase_change {
            ops.push(GateOp::U1(q, self.phi));
        }
        ops
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PurificationMode {
    #[default]
    Ancilla,
    Direct,
}

impl FromStr for PurificationMode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "ancilla" => Ok(PurificationMode::Ancilla),
            "direct" => Ok(PurificationMode::Direct),
            other => Err(Error::InvalidArgument(format!("unknown purification mode `{other}` (ancilla|direct)"))),
        }
    }
}

impl fmt::Display for PurificationMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            PurificationMode::Ancilla => "ancilla",
            PurificationMode::Direct => "direct",
        })
    }
}

/// Append the spec's error gates to `circuit`.
pub fn inject_errors(circuit: &Circuit, spec: &ErrorSpec) -> Result<Circuit> {
    spec.validate()?;
    let mut out = circuit.clone();
    out.extend(&spec.error_ops())?;
    Ok(out)
}

/// Bit-flip correction through the ancilla.
pub fn parity_correction() -> [GateOp; 4] {
    [GateOp::Cx(0, ANCILLA), GateOp::Cx(1, ANCILLA), GateOp::Cx(ANCILLA, 1), GateOp::X(ANCILLA)]
}

/// Labeled correction stages for the errors enabled in `spec`.
pub fn purification_stages(spec: &ErrorSpec, mode: PurificationMode) -> Result<Vec<(String, Vec<GateOp>)>> {
    spec.validate()?;
    let q = spec.error_qubit;
    let mut stages = Vec::new();
    match mode {
        PurificationMode::Ancilla => {
            if spec.bit_flip {
                stages.push(("bit_flip_corrected".to_string(), parity_correction().to_vec()));
            }
            if spec.phase_flip {
                stages.push(("phase_flip_corrected".to_string(), vec![GateOp::U1(q, PI)]));
            }
            if spec.phase_change {
                // After the parity stage a phase picked up on qubit 1 sits on
                // |00>, so the relative phase of |11> flips sign.
                let sign = if spec.bit_flip && q == PAIR[1] { 1.0 } else { -1.0 };
                stages.push(("phase_change_corrected".to_string(), vec![GateOp::U1(q, sign * spec.phi)]));
            }
        }
        PurificationMode::Direct => {
            if spec.phase_change {
                stages.push(("phase_change_undone".to_string(), vec![GateOp::U1(q, -spec.phi)]));
            }
            if spec.phase_flip {
                stages.push(("phase_flip_undone".to_string(), vec![GateOp::U1(q, -PI)]));
            }
            if spec.bit_flip {
                stages.push(("bit_flip_undone".to_string(), vec![GateOp::X(q)]));
            }
        }
    }
    Ok(stages)
}

/// The correction gates alone, on the 3-qubit register.
pub fn purification_circuit(spec: &ErrorSpec, mode: PurificationMode) -> Result<Circuit> {
    let mut c = Circuit::new(REGISTER)?;
    for (_, ops) in purification_stages(spec, mode)? {
        c.extend(&ops)?;
    }
    Ok(c)
}

/// Bell preparation plus error injection on the 3-qubit register.
pub fn unpurified_circuit(spec: &ErrorSpec) -> Result<Circuit> {
    let mut c = Circuit::new(REGISTER)?;
    c.extend(&bell_prep(PAIR[0], PAIR[1])?)?;
    inject_errors(&c, spec)
}

/// Preparation, injection and correction.
pub fn full_purification_circuit(spec: &ErrorSpec, mode: PurificationMode) -> Result<Circuit> {
    let mut c = unpurified_circuit(spec)?;
    c.extend(purification_circuit(spec, mode)?.ops())?;
    Ok(c)
}

/// Noiseless register states: `initial`, `unpurified`, then one per stage.
pub fn stage_states(spec: &ErrorSpec, mode: PurificationMode) -> Result<Vec<(String, StateVector)>> {
    let mut psi = StateVector::zero(REGISTER)?;
    psi.apply_all(&bell_prep(PAIR[0], PAIR[1])?)?;
    let mut out = vec![("initial".to_string(), psi.clone())];
    psi.apply_all(&spec.error_ops())?;
    out.push(("unpurified".to_string(), psi.clone()));
    for (label, ops) in purification_stages(spec, mode)? {
        psi.apply_all(&ops)?;
        out.push((label, psi.clone()));
    }
    Ok(out)
}

fn purify_variant(
    before: &Circuit,
    after: &Circuit,
    sim: Simulator<'_>,
    shots: Option<u64>,
    seed: u64,
    exec: Exec,
) -> Result<VariantReport> {
    let circuits = [before, after];
    let results = exec.try_map_range(2, |k| {
        let cfg = TomographyConfig { shots, seed: derive_seed(seed, k as u64), mode: CorrelationMode::Joint, exec };
        run_tomography(&sim, circuits[k], &PAIR, &cfg)
    })?;
    let target = phi_plus();
    let mut report = VariantReport { shots, seed: shots.map(|_| seed), ..Default::default() };
    for (name, res) in ["F_BP", "F_AP"].iter().zip(results) {
        report.fidelities.insert(name.to_string(), res.fidelity_to(&target)?);
        report.raw_fidelities.insert(name.to_string(), res.raw_fidelity_to(&target)?);
        let key = if *name == "F_BP" { "before" } else { "after" };
        report.tomography.insert(key.to_string(), res);
    }
    Ok(report)
}

/// Tomograph the pair before and after purification in the ideal, sampled
/// and (with `cal`) noisy variants.
pub fn run_purification_experiment(
    cal: Option<&DeviceCalibration>,
    spec: &ErrorSpec,
    mode: PurificationMode,
    shots: u64,
    seed: u64,
) -> Result<ProtocolReport> {
    run_purification_experiment_with(cal, spec, mode, shots, seed, Exec::default())
}

pub fn run_purification_experiment_with(
    cal: Option<&DeviceCalibration>,
    spec: &ErrorSpec,
    mode: PurificationMode,
    shots: u64,
    seed: u64,
    exec: Exec,
) -> Result<ProtocolReport> {
    if shots == 0 {
        return Err(Error::InvalidArgument("shots must be positive".into()));
    }
    if let Some(cal) = cal {
        cal.check_fits(REGISTER)?;
    }
    let before = unpurified_circuit(spec)?;
    let after = full_purification_circuit(spec, mode)?;

    let jobs = if cal.is_some() { 3 } else { 2 };
    let variants = exec.try_map_range(jobs, |k| match k {
        0 => purify_variant(&before, &after, Simulator::noiseless(), None, seed, exec),
        1 => purify_variant(&before, &after, Simulator::noiseless(), Some(shots), derive_seed(seed, 1), exec),
        _ => purify_variant(&before, &after, Simulator::new(cal), Some(shots), derive_seed(seed, 2), exec),
    })?;

    let target = phi_plus();
    let mut analytic = BTreeMap::new();
    for (name, c) in [("F_BP", &before), ("F_AP", &after)] {
        let pair = c.statevector()?.to_density().partial_trace(&PAIR)?;
        analytic.insert(name.to_string(), pure_state_fidelity(&target, &pair)?);
    }

    let parameters = BTreeMap::from([
        ("mode".to_string(), mode.to_string()),
        ("phi".to_string(), crate::gate::format_angle(spec.phi)),
        ("error_qubit".to_string(), spec.error_qubit.to_string()),
        (
            "errors".to_string(),
            [("bit_flip", spec.bit_flip), ("phase_flip", spec.phase_flip), ("phase_change", spec.phase_change)]
                .iter()
                .filter(|(_, on)| *on)
                .map(|(n, _)| *n)
                .collect::<Vec<_>>()
                .join(","),
        ),
    ]);
    Ok(ProtocolReport::assemble(
        Experiment::Purify,
        variants,
        stage_states(spec, mode)?,
        analytic,
        seed,
        shots,
        parameters,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::state::DensityMatrix;
    use crate::{C64, STATE_TOL};

    const H: f64 = std::f64::consts::FRAC_1_SQRT_2;

    /// `(|00> + w |11>)/sqrt(2)` on the pair with the ancilla in |0>.
    fn even(w: C64) -> StateVector {
        let mut a = vec![C64::new(0.0, 0.0); 8];
        a[0b000] = C64::new(H, 0.0);
        a[0b110] = w * H;
        StateVector::from_amplitudes(a).unwrap()
    }

    fn pair_of(psi: &StateVector) -> DensityMatrix {
        psi.to_density().partial_trace(&PAIR).unwrap()
    }

    #[test]
    fn injection_produces_odd_parity_state() {
        // oracle: X, Z, U1(phi) on q0 of Phi+ computed by hand
        let phi = 0.125;
        let psi = unpurified_circuit(&ErrorSpec::all(phi)).unwrap().statevector().unwrap();
        let mut want = vec![C64::new(0.0, 0.0); 8];
        want[0b010] = C64::new(H, 0.0);
        want[0b100] = -C64::from_polar(H, phi);
        for (a, b) in psi.amplitudes().iter().zip(&want) {
            assert!((a - b).norm() < 1e-12);
        }
    }

    #[test]
    fn injection_variants() {
        let bell = unpurified_circuit(&ErrorSpec::none()).unwrap();
        assert_eq!(bell.ops().len(), 2);
        let psi = bell.statevector().unwrap();
        assert!(psi.equal_up_to_global_phase(&even(C64::new(1.0, 0.0)), 1e-12).unwrap());

        let spec = ErrorSpec { bit_flip: true, phase_flip: false, phase_change: false, ..ErrorSpec::none() };
        let psi = unpurified_circuit(&spec).unwrap().statevector().unwrap();
        assert!((psi.amplitudes()[0b010].re - H).abs() < 1e-12);
        assert!((psi.amplitudes()[0b100].re - H).abs() < 1e-12);
    }

    #[test]
    fn ancilla_stages_follow_the_correction_sequence() {
        let phi = 0.125;
        let states = stage_states(&ErrorSpec::all(phi), PurificationMode::Ancilla).unwrap();
        let labels: Vec<&str> = states.iter().map(|(l, _)| l.as_str()).collect();
        assert_eq!(
            labels,
            ["initial", "unpurified", "bit_flip_corrected", "phase_flip_corrected", "phase_change_corrected"]
        );
        let expected = [
            even(-C64::from_polar(1.0, phi)),
            even(C64::from_polar(1.0, phi)),
            even(C64::new(1.0, 0.0)),
        ];
        for ((label, psi), want) in states[2..].iter().zip(&expected) {
            assert!(psi.equal_up_to_global_phase(want, STATE_TOL).unwrap(), "{label}");
        }
    }

    #[test]
    fn both_modes_end_in_phi_plus() {
        for mode in [PurificationMode::Ancilla, PurificationMode::Direct] {
            let psi = full_purification_circuit(&ErrorSpec::all(0.125), mode).unwrap().statevector().unwrap();
            assert!(psi.equal_up_to_global_phase(&even(C64::new(1.0, 0.0)), STATE_TOL).unwrap(), "{mode}");
        }
    }

    #[test]
    fn modes_agree_on_pair_state() {
        for q in PAIR {
            for phi in [0.0, 0.125, std::f64::consts::FRAC_PI_2, PI, -0.7] {
                for mask in 0..8u8 {
                    let spec = ErrorSpec {
                        bit_flip: mask & 1 != 0,
                        phase_flip: mask & 2 != 0,
                        phase_change: mask & 4 != 0,
                        phi,
                        error_qubit: q,
                    };
                    let a = full_purification_circuit(&spec, PurificationMode::Ancilla).unwrap();
                    let d = full_purification_circuit(&spec, PurificationMode::Direct).unwrap();
                    let ra = pair_of(&a.statevector().unwrap());
                    let rd = pair_of(&d.statevector().unwrap());
                    assert!(ra.max_abs_diff(&rd).unwrap() < STATE_TOL, "{spec:?}");
                    assert!(ra.max_abs_diff(&phi_plus().to_density()).unwrap() < STATE_TOL, "{spec:?}");
                }
            }
        }
    }

    #[test]
    fn parity_stage_leaves_clean_pair_alone() {
        let mut psi = StateVector::zero(REGISTER).unwrap();
        psi.apply_all(&bell_prep(0, 1).unwrap()).unwrap();
        psi.apply_all(&parity_correction()).unwrap();
        let f = pure_state_fidelity(&phi_plus(), &pair_of(&psi)).unwrap();
        assert!((f - 1.0).abs() < 1e-12);

        let clean = full_purification_circuit(&ErrorSpec::none(), PurificationMode::Ancilla).unwrap();
        let f = pure_state_fidelity(&phi_plus(), &pair_of(&clean.statevector().unwrap())).unwrap();
        assert!((f - 1.0).abs() < 1e-12);
    }

    #[test]
    fn mode_parsing() {
        assert_eq!("ancilla".parse::<PurificationMode>().unwrap(), PurificationMode::Ancilla);
        assert_eq!("direct".parse::<PurificationMode>().unwrap(), PurificationMode::Direct);
        assert!("bogus".parse::<PurificationMode>().is_err());
    }

    #[test]
    fn invalid_spec() {
        let spec = ErrorSpec { error_qubit: 2, ..ErrorSpec::all(0.1) };
        assert!(purification_circuit(&spec, PurificationMode::Ancilla).is_err());
        let spec = ErrorSpec { phi: f64::NAN, ..ErrorSpec::all(0.1) };
        assert!(inject_errors(&Circuit::new(3).unwrap(), &spec).is_err());
    }

    #[test]
    fn noiseless_experiment() {
        let rep =
            run_purification_experiment(None, &ErrorSpec::all(0.125), PurificationMode::Ancilla, 8192, 1).unwrap();
        assert_eq!(rep.analytic["F_BP"], 0.0);
        assert!((rep.analytic["F_AP"] - 1.0).abs() < 1e-12);
        let sampled = &rep.variants["sampled"].fidelities;
        assert!(sampled["F_BP"] <= 0.1, "{}", sampled["F_BP"]);
        assert!(sampled["F_AP"] >= 0.98, "{}", sampled["F_AP"]);
    }
}
