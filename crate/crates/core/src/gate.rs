//! Gate vocabulary: H, X, Y, Z, S, S-dagger, the phase gate U1(theta) and CNOT.

use std::f64::consts::FRAC_1_SQRT_2;
use std::fmt;

use crate::error::{check_qubit, Error, Result};
use crate::linalg::CMatrix;
use crate::C64;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GateOp {
    H(usize),
    X(usize),
    Y(usize),
    Z(usize),
    S(usize),
    Sdg(usize),
    /// `diag(1, e^{i theta})`.
    U1(usize, f64),
    /// `Cx(control, target)`.
    Cx(usize, usize),
}

/// Row-major 2x2 matrix.
pub type Mat2 = [C64; 4];

const ZERO: C64 = C64::new(0.0, 0.0);
const ONE: C64 = C64::new(1.0, 0.0);
const I: C64 = C64::new(0.0, 1.0);

pub(crate) fn u1_matrix(theta: f64) -> Mat2 {
    [ONE, ZERO, ZERO, C64::from_polar(1.0, theta)]
}

pub const PAULI_X: Mat2 = [ZERO, ONE, ONE, ZERO];
pub const PAULI_Y: Mat2 = [ZERO, C64::new(0.0, -1.0), I, ZERO];
pub const PAULI_Z: Mat2 = [ONE, ZERO, ZERO, C64::new(-1.0, 0.0)];
pub const IDENTITY: Mat2 = [ONE, ZERO, ZERO, ONE];

impl GateOp {
    pub fn name(&self) -> &'static str {
        match self {
            GateOp::H(_) => "h",
            GateOp::X(_) => "x",
            GateOp::Y(_) => "y",
            GateOp::Z(_) => "z",
            GateOp::S(_) => "s",
            GateOp::Sdg(_) => "sdg",
            GateOp::U1(..) => "u1",
            GateOp::Cx(..) => "cx",
        }
    }

    /// Operand qubits; `[control, target]` for CX.
    pub fn qubits(&self) -> Vec<usize> {
        match *self {
            GateOp::H(q)
            | GateOp::X(q)
            | GateOp::Y(q)
            | GateOp::Z(q)
            | GateOp::S(q)
            | GateOp::Sdg(q)
            | GateOp::U1(q, _) => vec![q],
            GateOp::Cx(c, t) => vec![c, t],
        }
    }

    pub fn is_two_qubit(&self) -> bool {
        matches!(self, GateOp::Cx(..))
    }

    /// The 2x2 matrix of a single-qubit gate; `None` for CX.
    pub fn single_qubit_matrix(&self) -> Option<Mat2> {
        let s = C64::new(FRAC_1_SQRT_2, 0.0);
        Some(match *self {
            GateOp::H(_) => [s, s, s, -s],
            GateOp::X(_) => PAULI_X,
            GateOp::Y(_) => PAULI_Y,
            GateOp::Z(_) => PAULI_Z,
            GateOp::S(_) => [ONE, ZERO, ZERO, I],
            GateOp::Sdg(_) => [ONE, ZERO, ZERO, -I],
            GateOp::U1(_, theta) => u1_matrix(theta),
            GateOp::Cx(..) => return None,
        })
    }

    /// Full unitary on the operand qubits, first operand most significant.
    pub fn matrix(&self) -> CMatrix {
        match self.single_qubit_matrix() {
            Some(m) => CMatrix::from_row_slice(2, 2, &m),
            None => {
                let mut m = CMatrix::zeros(4, 4);
                m[(0, 0)] = ONE;
                m[(1, 1)] = ONE;
                m[(2, 3)] = ONE;
                m[(3, 2)] = ONE;
                m
            }
        }
    }

    pub fn inverse(&self) -> GateOp {
        match *self {
            GateOp::S(q) => GateOp::Sdg(q),
            GateOp::Sdg(q) => GateOp::S(q),
            GateOp::U1(q, theta) => GateOp::U1(q, -theta),
            other => other,
        }
    }

    /// Checks operand range and distinctness for a register of `num_qubits`.
    pub fn validate(&self, num_qubits: usize) -> Result<()> {
        for q in self.qubits() {
            check_qubit(q, num_qubits)?;
        }
        if let GateOp::Cx(c, t) = *self {
            if c == t {
                return Err(Error::InvalidOp(format!(
                    "cx control and target are both q[{c}]"
                )));
            }
        }
        if let GateOp::U1(_, theta) = *self {
            if !theta.is_finite() {
                return Err(Error::InvalidOp(format!("u1 angle {theta} is not finite")));
            }
        }
        Ok(())
    }

    /// Same gate acting on relabeled qubits.
    pub fn remap(&self, f: impl Fn(usize) -> usize) -> GateOp {
        match *self {
            GateOp::H(q) => GateOp::H(f(q)),
            GateOp::X(q) => GateOp::X(f(q)),
            GateOp::Y(q) => GateOp::Y(f(q)),
            GateOp::Z(q) => GateOp::Z(f(q)),
            GateOp::S(q) => GateOp::S(f(q)),
            GateOp::Sdg(q) => GateOp::Sdg(f(q)),
            GateOp::U1(q, t) => GateOp::U1(f(q), t),
            GateOp::Cx(c, t) => GateOp::Cx(f(c), f(t)),
        }
    }
}

impl fmt::Display for GateOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            GateOp::U1(q, theta) => write!(f, "u1({}) q[{q}]", format_angle(theta)),
            GateOp::Cx(c, t) => write!(f, "cx q[{c}], q[{t}]"),
            op => write!(f, "{} q[{}]", op.name(), op.qubits()[0]),
        }
    }
}

/// Angle text with at most 12 significant digits, shortest form.
pub fn format_angle(theta: f64) -> String {
    let rounded: f64 = format!("{theta:.11e}").parse().unwrap_or(theta);
    let rounded = if rounded == 0.0 { 0.0 } else { rounded };
    format!("{rounded}")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{max_abs_diff, unitarity_defect};
    use std::f64::consts::PI;

    fn all_kinds() -> Vec<GateOp> {
        vec![
            GateOp::H(0),
            GateOp::X(0),
            GateOp::Y(0),
            GateOp::Z(0),
            GateOp::S(0),
            GateOp::Sdg(0),
            GateOp::U1(0, 0.125),
            GateOp::U1(0, -0.125),
            GateOp::U1(0, PI),
            GateOp::Cx(0, 1),
        ]
    }

    #[test]
    fn every_gate_is_unitary() {
        for g in all_kinds() {
            assert!(unitarity_defect(&g.matrix()) < 1e-12, "{g}");
        }
    }

    #[test]
    fn u1_pi_is_z() {
        let d = max_abs_diff(&GateOp::U1(0, PI).matrix(), &GateOp::Z(0).matrix());
        assert!(d < 1e-12);
    }

    #[test]
    fn inverse_undoes_gate() {
        for g in all_kinds() {
            let prod = g.inverse().matrix() * g.matrix();
            let id = crate::linalg::identity(prod.nrows());
            assert!(max_abs_diff(&prod, &id) < 1e-12, "{g}");
        }
    }

    #[test]
    fn validate_rejects_bad_operands() {
        assert!(matches!(
            GateOp::Cx(1, 1).validate(2),
            Err(Error::InvalidOp(_))
        ));
        assert!(matches!(
            GateOp::H(2).validate(2),
            Err(Error::QubitOutOfRange { qubit: 2, .. })
        ));
        assert!(GateOp::Cx(0, 1).validate(2).is_ok());
    }

    #[test]
    fn angle_formatting() {
        assert_eq!(format_angle(PI), "3.14159265359");
        assert_eq!(format_angle(0.125), "0.125");
        assert_eq!(format_angle(-0.5), "-0.5");
        assert_eq!(format_angle(0.0), "0");
        assert_eq!(GateOp::U1(0, PI).to_string(), "u1(3.14159265359) q[0]");
    }
}
