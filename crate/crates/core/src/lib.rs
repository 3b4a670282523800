//! Dense quantum-circuit simulation for two-hop repeater primitives:
//! entanglement swapping, error injection and purification, and
//! Pauli-basis state tomography, with an optional device noise model.
//!
//! Basis convention: qubit 0 is the most significant bit of an amplitude
//! index, so the bitstring `b0 b1 ... b(n-1)` maps to
//! `sum_k b_k * 2^(n-1-k)`. Histogram keys, DSL qubit indices and JSON
//! matrices all follow it.

pub mod channel;
pub mod circuit;
pub mod device;
pub mod dsl;
pub mod error;
pub mod gate;
pub mod io;
mod kernel;
pub mod linalg;
pub mod measure;
pub mod par;
pub mod protocols;
pub mod random;
pub mod sim;
pub mod state;
pub mod tomography;

pub use channel::KrausChannel;
pub use circuit::{Circuit, Measurement};
pub use device::{DeviceCalibration, QubitCalibration};
pub use error::{Error, Result};
pub use gate::GateOp;
pub use measure::Counts;
pub use par::Exec;
pub use sim::{QState, Simulator};
pub use state::{DensityMatrix, StateVector};

pub use num_complex::Complex64 as C64;

/// Largest register the dense engine accepts.
pub const MAX_QUBITS: usize = 12;

/// Entrywise tolerance used for state equality checks.
pub const STATE_TOL: f64 = 1e-10;
/// Tolerance for completeness and unitarity checks.
pub const CPTP_TOL: f64 = 1e-12;
/// Slack on negative eigenvalues before a simulated matrix counts as non-PSD.
pub const PSD_SLACK: f64 = 1e-8;
