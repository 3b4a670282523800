//! Kraus-form CPTP maps.

use crate::error::{Error, Result};
use crate::gate::{Mat2, IDENTITY, PAULI_X, PAULI_Y, PAULI_Z};
use crate::linalg::{identity, max_abs_diff, CMatrix};
use crate::{C64, STATE_TOL};

#[derive(Debug, Clone)]
pub struct KrausChannel {
    operators: Vec<CMatrix>,
    label: String,
    arity: usize,
}

fn scaled(m: &Mat2, s: f64) -> CMatrix {
    CMatrix::from_row_slice(2, 2, m) * C64::new(s, 0.0)
}

fn check_probability(name: &str, p: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::InvalidArgument(format!("{name} probability {p} outside [0, 1]")));
    }
    Ok(())
}

impl KrausChannel {
    /// Builds a channel after checking shapes and completeness
    /// (`|sum K^dag K - I|_max <= 1e-10`).
    pub fn new(label: impl Into<String>, operators: Vec<CMatrix>) -> Result<Self> {
        let label = label.into();
        let first = operators
            .first()
            .ok_or_else(|| Error::InvalidArgument(format!("channel `{label}` has no operators")))?;
        let dim = first.nrows();
        if dim < 2 || !dim.is_power_of_two() {
            return Err(Error::InvalidArgument(format!("channel `{label}` has dimension {dim}")));
        }
        if let Some(bad) = operators.iter().find(|k| k.nrows() != dim || k.ncols() != dim) {
            return Err(Error::DimensionMismatch { expected: dim, found: bad.nrows().max(bad.ncols()) });
        }
        let channel = Self { arity: dim.trailing_zeros() as usize, operators, label };
        let deviation = channel.completeness_defect();
        if deviation > STATE_TOL {
            return Err(Error::NotCptp { label: channel.label, deviation });
        }
        Ok(channel)
    }

    pub fn operators(&self) -> &[CMatrix] {
        &self.operators
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    /// `max |sum_m K_m^dag K_m - I|`.
    pub fn completeness_defect(&self) -> f64 {
        let dim = 1 << self.arity;
        let sum = self
            .operators
            .iter()
            .fold(CMatrix::zeros(dim, dim), |acc, k| acc + k.adjoint() * k);
        max_abs_diff(&sum, &identity(dim))
    }

    pub fn identity(arity: usize) -> Self {
        Self {
            operators: vec![identity(1 << arity)],
            label: "identity".into(),
            arity,
        }
    }

    /// Energy relaxation with decay probability `gamma`.
    pub fn amplitude_damping(gamma: f64) -> Result<Self> {
        check_probability("amplitude damping", gamma)?;
        let z = C64::new(0.0, 0.0);
        let k0 = [C64::new(1.0, 0.0), z, z, C64::new((1.0 - gamma).sqrt(), 0.0)];
        let k1 = [z, C64::new(gamma.sqrt(), 0.0), z, z];
        Self::new(
            format!("amplitude_damping({gamma})"),
            vec![scaled(&k0, 1.0), scaled(&k1, 1.0)],
        )
    }

    /// Pure dephasing that scales coherences by `1 - p`: `Z` applied with
    /// probability `p / 2`.
    pub fn dephasing(p: f64) -> Result<Self> {
        check_probability("dephasing", p)?;
        Self::new(
            format!("dephasing({p})"),
            vec![scaled(&IDENTITY, (1.0 - p / 2.0).sqrt()), scaled(&PAULI_Z, (p / 2.0).sqrt())],
        )
    }

    /// `rho -> (1 - p) rho + p/3 (X rho X + Y rho Y + Z rho Z)`.
    pub fn depolarizing(p: f64) -> Result<Self> {
        check_probability("depolarizing", p)?;
        let q = (p / 3.0).sqrt();
        Self::new(
            format!("depolarizing({p})"),
            vec![
                scaled(&IDENTITY, (1.0 - p).sqrt()),
                scaled(&PAULI_X, q),
                scaled(&PAULI_Y, q),
                scaled(&PAULI_Z, q),
            ],
        )
    }

    pub fn bit_flip(p: f64) -> Result<Self> {
        check_probability("bit flip", p)?;
        Self::new(
            format!("bit_flip({p})"),
            vec![scaled(&IDENTITY, (1.0 - p).sqrt()), scaled(&PAULI_X, p.sqrt())],
        )
    }

    pub fn phase_flip(p: f64) -> Result<Self> {
        check_probability("phase flip", p)?;
        Self::new(
            format!("phase_flip({p})"),
            vec![scaled(&IDENTITY, (1.0 - p).sqrt()), scaled(&PAULI_Z, p.sqrt())],
        )
    }

    /// True when every operator is a multiple of the identity, i.e. the map
    /// does nothing.
    pub fn is_identity(&self) -> bool {
        self.operators.iter().all(|k| {
            let d = k[(0, 0)];
            k.iter().enumerate().all(|(i, z)| {
                let (r, c) = (i % k.nrows(), i / k.nrows());
                if r == c { (z - d).norm() == 0.0 } else { z.norm() == 0.0 }
            })
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::state::{DensityMatrix, StateVector};
    use crate::gate::GateOp;
    use crate::CPTP_TOL;

    fn builtins() -> Vec<KrausChannel> {
        let mut out = vec![KrausChannel::identity(1), KrausChannel::identity(2)];
        for p in [0.0, 1e-3, 0.02, 0.3, 0.75, 1.0] {
            out.push(KrausChannel::amplitude_damping(p).unwrap());
            out.push(KrausChannel::dephasing(p).unwrap());
            out.push(KrausChannel::depolarizing(p).unwrap());
            out.push(KrausChannel::bit_flip(p).unwrap());
            out.push(KrausChannel::phase_flip(p).unwrap());
        }
        out
    }

    #[test]
    fn builtins_are_complete() {
        for ch in builtins() {
            assert!(ch.completeness_defect() < CPTP_TOL, "{}", ch.label());
        }
    }

    #[test]
    fn rejects_non_cptp() {
        let k = CMatrix::identity(2, 2) * C64::new(1.1, 0.0);
        assert!(matches!(KrausChannel::new("bad", vec![k]), Err(Error::NotCptp { .. })));
        assert!(KrausChannel::depolarizing(1.5).is_err());
    }

    #[test]
    fn identity_channel_leaves_state() {
        let mut psi = StateVector::zero(2).unwrap();
        psi.apply_all(&[GateOp::H(0), GateOp::U1(0, 0.4), GateOp::Cx(0, 1)]).unwrap();
        let rho = psi.to_density();
        let mut out = rho.clone();
        out.apply_channel(&KrausChannel::identity(1), &[1]).unwrap();
        assert!(out.max_abs_diff(&rho).unwrap() < 1e-15);
    }

    #[test]
    fn full_amplitude_damping_decays_to_ground() {
        let mut rho = StateVector::basis(1, 1).unwrap().to_density();
        rho.apply_channel(&KrausChannel::amplitude_damping(1.0).unwrap(), &[0]).unwrap();
        let ground = DensityMatrix::zero_state(1).unwrap();
        assert!(rho.max_abs_diff(&ground).unwrap() < 1e-15);
    }

    #[test]
    fn depolarizing_three_quarters_is_fully_mixing() {
        // oracle: explicit 4-term sum (1-p) rho + p/3 (X rho X + Y rho Y + Z rho Z)
        let mut psi = StateVector::zero(1).unwrap();
        psi.apply_all(&[GateOp::H(0), GateOp::U1(0, 0.9), GateOp::Y(0)]).unwrap();
        let rho = psi.to_density().to_matrix();
        let p = 0.75;
        let paulis = [PAULI_X, PAULI_Y, PAULI_Z].map(|m| CMatrix::from_row_slice(2, 2, &m));
        let mut oracle = &rho * C64::new(1.0 - p, 0.0);
        for s in &paulis {
            oracle += s * &rho * s * C64::new(p / 3.0, 0.0);
        }
        let mut out = psi.to_density();
        out.apply_channel(&KrausChannel::depolarizing(p).unwrap(), &[0]).unwrap();
        assert!(max_abs_diff(&out.to_matrix(), &oracle) < 1e-14);
        let mixed = DensityMatrix::maximally_mixed(1).unwrap();
        assert!(out.max_abs_diff(&mixed).unwrap() < 1e-14);
    }

    #[test]
    fn dephasing_scales_coherence() {
        let mut psi = StateVector::zero(1).unwrap();
        psi.apply_gate(&GateOp::H(0)).unwrap();
        let mut rho = psi.to_density();
        rho.apply_channel(&KrausChannel::dephasing(0.4).unwrap(), &[0]).unwrap();
        assert!((rho.get(0, 1).re - 0.5 * 0.6).abs() < 1e-15);
        assert!((rho.get(0, 0).re - 0.5).abs() < 1e-15);
    }

    #[test]
    fn arity_and_target_checks() {
        let mut rho = DensityMatrix::zero_state(2).unwrap();
        let ch = KrausChannel::depolarizing(0.1).unwrap();
        assert!(rho.apply_channel(&ch, &[0, 1]).is_err());
        assert!(rho.apply_channel(&ch, &[2]).is_err());
        assert!(rho.apply_channel(&KrausChannel::identity(2), &[1, 1]).is_err());
    }

    #[test]
    fn two_qubit_channel_matches_unitary() {
        // a single-operator channel equal to CX acts like the gate
        let ch = KrausChannel::new("cx", vec![GateOp::Cx(0, 1).matrix()]).unwrap();
        let mut psi = StateVector::zero(3).unwrap();
        psi.apply_all(&[GateOp::H(2), GateOp::H(1)]).unwrap();
        let mut rho = psi.to_density();
        rho.apply_channel(&ch, &[2, 0]).unwrap();
        psi.apply_gate(&GateOp::Cx(2, 0)).unwrap();
        assert!(rho.max_abs_diff(&psi.to_density()).unwrap() < 1e-14);
    }
}
