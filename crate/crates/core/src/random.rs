//! Seeded random states for property checks and benchmarks.

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::linalg::CMatrix;
use crate::state::{DensityMatrix, StateVector};
use crate::C64;

fn gaussian<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    C64::new(StandardNormal.sample(rng), StandardNormal.sample(rng))
}

/// Haar-random pure state.
pub fn random_state<R: Rng + ?Sized>(num_qubits: usize, rng: &mut R) -> StateVector {
    let amps = (0..1usize << num_qubits).map(|_| gaussian(rng)).collect();
    StateVector::normalized(amps).expect("gaussian vector is non-zero")
}

/// Ginibre-ensemble mixed state `G G^dag / tr`, with `rank` columns in `G`.
pub fn random_density<R: Rng + ?Sized>(num_qubits: usize, rank: usize, rng: &mut R) -> DensityMatrix {
    let dim = 1usize << num_qubits;
    let g = CMatrix::from_fn(dim, rank.max(1), |_, _| gaussian(rng));
    let m = &g * g.adjoint();
    let tr = m.trace();
    let m = crate::linalg::hermitian_part(&(m / tr));
    DensityMatrix::from_matrix(&m).expect("Ginibre matrix is a valid state")
}
