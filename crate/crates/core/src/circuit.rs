use crate::error::{check_qubit, Error, Result};
use crate::gate::GateOp;
use crate::linalg::CMatrix;
use crate::state::StateVector;
use crate::{C64, MAX_QUBITS};

/// Terminal measurement of `qubit` into classical bit `clbit`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Measurement {
    pub qubit: usize,
    pub clbit: usize,
}

/// Ordered gate program with terminal measurements.
#[derive(Debug, Clone, PartialEq)]
pub struct Circuit {
    num_qubits: usize,
    ops: Vec<GateOp>,
    measurements: Vec<Measurement>,
}

impl Circuit {
    pub fn new(num_qubits: usize) -> Result<Self> {
        if num_qubits == 0 {
            return Err(Error::InvalidArgument("circuit needs at least one qubit".into()));
        }
        if num_qubits > MAX_QUBITS {
            return Err(Error::TooManyQubits(num_qubits));
        }
        Ok(Self { num_qubits, ops: Vec::new(), measurements: Vec::new() })
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn ops(&self) -> &[GateOp] {
        &self.ops
    }

    pub fn measurements(&self) -> &[Measurement] {
        &self.measurements
    }

    /// Appends a gate. Gates may not touch a qubit that is already measured.
    pub fn push(&mut self, op: GateOp) -> Result<&mut Self> {
        op.validate(self.num_qubits)?;
        if let Some(m) = op
            .qubits()
            .into_iter()
            .find_map(|q| self.measurements.iter().find(|m| m.qubit == q))
        {
            return Err(Error::InvalidOp(format!(
                "{op} after measurement of q[{}]",
                m.qubit
            )));
        }
        self.ops.push(op);
        Ok(self)
    }

    pub fn extend<'a>(&mut self, ops: impl IntoIterator<Item = &'a GateOp>) -> Result<&mut Self> {
        for op in ops {
            self.push(*op)?;
        }
        Ok(self)
    }

    pub fn measure(&mut self, qubit: usize, clbit: usize) -> Result<&mut Self> {
        check_qubit(qubit, self.num_qubits)?;
        if self.measurements.iter().any(|m| m.clbit == clbit) {
            return Err(Error::InvalidOp(format!("classical bit c[{clbit}] written twice")));
        }
        if self.measurements.iter().any(|m| m.qubit == qubit) {
            return Err(Error::InvalidOp(format!("q[{qubit}] measured twice")));
        }
        self.measurements.push(Measurement { qubit, clbit });
        Ok(self)
    }

    /// Measures every qubit `q` into `c[q]`.
    pub fn measure_all(&mut self) -> Result<&mut Self> {
        for q in 0..self.num_qubits {
            self.measure(q, q)?;
        }
        Ok(self)
    }

    /// Measured qubits ordered by classical bit index.
    pub fn measured_qubits(&self) -> Vec<usize> {
        let mut ms = self.measurements.clone();
        ms.sort_by_key(|m| m.clbit);
        ms.into_iter().map(|m| m.qubit).collect()
    }

    /// Copy of the gate list without measurements.
    pub fn without_measurements(&self) -> Circuit {
        Circuit { num_qubits: self.num_qubits, ops: self.ops.clone(), measurements: Vec::new() }
    }

    /// Gate-wise inverse (measurements dropped).
    pub fn inverse(&self) -> Circuit {
        Circuit {
            num_qubits: self.num_qubits,
            ops: self.ops.iter().rev().map(GateOp::inverse).collect(),
            measurements: Vec::new(),
        }
    }

    /// Full `2^n x 2^n` unitary, built column by column.
    pub fn unitary(&self) -> Result<CMatrix> {
        let dim = 1usize << self.num_qubits;
        let mut u = CMatrix::zeros(dim, dim);
        for col in 0..dim {
            let mut psi = StateVector::basis(self.num_qubits, col)?;
            psi.apply_all(&self.ops)?;
            for (row, a) in psi.amplitudes().iter().enumerate() {
                u[(row, col)] = *a;
            }
        }
        Ok(u)
    }

    /// Final statevector from `|0...0>`.
    pub fn statevector(&self) -> Result<StateVector> {
        let mut psi = StateVector::zero(self.num_qubits)?;
        psi.apply_all(&self.ops)?;
        Ok(psi)
    }
}

/// `max |U_a - e^{i g} U_b|` over entries, with the phase taken from the
/// largest entry of `a`.
pub fn unitary_distance_up_to_phase(a: &CMatrix, b: &CMatrix) -> f64 {
    let (idx, _) = a
        .iter()
        .enumerate()
        .max_by(|x, y| x.1.norm().total_cmp(&y.1.norm()))
        .expect("non-empty");
    let bv = b.iter().nth(idx).copied().unwrap_or(C64::new(0.0, 0.0));
    if bv.norm() == 0.0 {
        return f64::INFINITY;
    }
    let ph = a.iter().nth(idx).unwrap() / bv;
    let ph = ph / ph.norm();
    a.iter().zip(b.iter()).map(|(x, y)| (x - ph * y).norm()).fold(0.0, f64::max)
}
