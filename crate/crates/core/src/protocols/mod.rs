//! Entanglement swapping and error-injection/purification, as circuit
//! builders plus tomography-backed experiment runners.

pub mod purify;
pub mod report;
pub mod swap;

pub use purify::{
    full_purification_circuit, inject_errors, purification_circuit, purification_stages,
    run_purification_experiment, run_purification_experiment_with, unpurified_circuit, ErrorSpec,
    PurificationMode,
};
pub use report::{ProtocolReport, VariantReport};
pub use swap::{run_swap_experiment, run_swap_experiment_with, swap_circuit, SwapLayout};

use crate::circuit::Circuit;
use crate::error::{Error, Result};
use crate::gate::GateOp;

/// `H(a)` then `CX(a -> b)`: takes `|00>` to `(|00> + |11>)/sqrt(2)` on `(a, b)`.
pub fn bell_prep(q_a: usize, q_b: usize) -> Result<[GateOp; 2]> {
    if q_a == q_b {
        return Err(Error::InvalidArgument(format!("bell pair needs two distinct qubits, got q[{q_a}] twice")));
    }
    Ok([GateOp::H(q_a), GateOp::Cx(q_a, q_b)])
}

pub fn bell_prep_circuit(num_qubits: usize, q_a: usize, q_b: usize) -> Result<Circuit> {
    let mut c = Circuit::new(num_qubits)?;
    c.extend(&bell_prep(q_a, q_b)?)?;
    Ok(c)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::state::{phi_plus, StateVector};

    #[test]
    fn bell_on_first_pair() {
        let psi = bell_prep_circuit(2, 0, 1).unwrap().statevector().unwrap();
        assert!(psi.equal_up_to_global_phase(&phi_plus(), 1e-12).unwrap());
    }

    #[test]
    fn bell_twice_with_inverse_is_identity() {
        let c = bell_prep_circuit(2, 0, 1).unwrap();
        let mut round = c.clone();
        round.extend(c.inverse().ops()).unwrap();
        round.extend(c.ops()).unwrap();
        round.extend(c.inverse().ops()).unwrap();
        let psi = round.statevector().unwrap();
        assert!(psi.equal_up_to_global_phase(&StateVector::zero(2).unwrap(), 1e-12).unwrap());
    }

    #[test]
    fn bell_on_back_pair_of_four() {
        // oracle: |00> (x) Phi+
        let psi = bell_prep_circuit(4, 2, 3).unwrap().statevector().unwrap();
        let want = StateVector::zero(2).unwrap().tensor(&phi_plus()).unwrap();
        assert!(psi.equal_up_to_global_phase(&want, 1e-12).unwrap());
    }

    #[test]
    fn collision_rejected() {
        assert!(bell_prep(1, 1).is_err());
    }
}
