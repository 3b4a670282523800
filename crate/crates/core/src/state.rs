//! Pure and mixed register states.

use crate::channel::KrausChannel;
use crate::error::{check_qubit, Error, Result};
use crate::gate::{GateOp, PAULI_X};
use crate::kernel;
use crate::linalg::{self, CMatrix};
use crate::{C64, MAX_QUBITS, STATE_TOL};

const ZERO: C64 = C64::new(0.0, 0.0);
const ONE: C64 = C64::new(1.0, 0.0);

fn check_size(num_qubits: usize) -> Result<()> {
    if num_qubits == 0 {
        return Err(Error::InvalidArgument("register needs at least one qubit".into()));
    }
    if num_qubits > MAX_QUBITS {
        return Err(Error::TooManyQubits(num_qubits));
    }
    Ok(())
}

fn qubits_for_len(len: usize) -> Result<usize> {
    if len < 2 || !len.is_power_of_two() {
        return Err(Error::InvalidArgument(format!(
            "length {len} is not a power of two >= 2"
        )));
    }
    let n = len.trailing_zeros() as usize;
    check_size(n)?;
    Ok(n)
}

#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    num_qubits: usize,
    amps: Vec<C64>,
}

impl StateVector {
    /// `|0...0>` on `num_qubits` qubits.
    pub fn zero(num_qubits: usize) -> Result<Self> {
        Self::basis(num_qubits, 0)
    }

    pub fn basis(num_qubits: usize, index: usize) -> Result<Self> {
        check_size(num_qubits)?;
        let dim = 1usize << num_qubits;
        if index >= dim {
            return Err(Error::InvalidArgument(format!(
                "basis index {index} out of range for dimension {dim}"
            )));
        }
        let mut amps = vec![ZERO; dim];
        amps[index] = ONE;
        Ok(Self { num_qubits, amps })
    }

    /// Takes ownership of `amps`; the vector must be normalised within 1e-10.
    pub fn from_amplitudes(amps: Vec<C64>) -> Result<Self> {
        let num_qubits = qubits_for_len(amps.len())?;
        if amps.iter().any(|a| !a.re.is_finite() || !a.im.is_finite()) {
            return Err(Error::InvalidArgument("non-finite amplitude".into()));
        }
        let s = Self { num_qubits, amps };
        let norm = s.norm();
        if (norm - 1.0).abs() > STATE_TOL {
            return Err(Error::InvalidArgument(format!("state norm {norm} != 1")));
        }
        Ok(s)
    }

    /// Rescales `amps` to unit norm.
    pub fn normalized(mut amps: Vec<C64>) -> Result<Self> {
        let norm = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::InvalidArgument("cannot normalise zero vector".into()));
        }
        amps.iter_mut().for_each(|a| *a /= norm);
        Self::from_amplitudes(amps)
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amps
    }

    pub fn norm(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn apply_gate(&mut self, op: &GateOp) -> Result<()> {
        op.validate(self.num_qubits)?;
        let n = self.num_qubits;
        match *op {
            GateOp::Cx(c, t) => kernel::apply_controlled(&mut self.amps, n, c, t, &PAULI_X),
            _ => {
                let m = op.single_qubit_matrix().expect("single-qubit gate");
                kernel::apply_1q(&mut self.amps, n, op.qubits()[0], &m);
            }
        }
        Ok(())
    }

    pub fn apply_all<'a>(&mut self, ops: impl IntoIterator<Item = &'a GateOp>) -> Result<()> {
        ops.into_iter().try_for_each(|op| self.apply_gate(op))
    }

    /// `<self|other>`.
    pub fn inner(&self, other: &StateVector) -> Result<C64> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), found: other.dim() });
        }
        Ok(self.amps.iter().zip(&other.amps).map(|(a, b)| a.conj() * b).sum())
    }

    /// `self ⊗ other`, with `self` on the leading qubits.
    pub fn tensor(&self, other: &StateVector) -> Result<StateVector> {
        check_size(self.num_qubits + other.num_qubits)?;
        let amps = self
            .amps
            .iter()
            .flat_map(|a| other.amps.iter().map(move |b| a * b))
            .collect();
        Ok(StateVector { num_qubits: self.num_qubits + other.num_qubits, amps })
    }

    /// True iff `max_j |a_j - e^{i g} b_j| < tol`, with `g` chosen to align
    /// the largest-modulus amplitude of `self`.
    pub fn equal_up_to_global_phase(&self, other: &StateVector, tol: f64) -> Result<bool> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), found: other.dim() });
        }
        let (k, _) = self
            .amps
            .iter()
            .enumerate()
            .max_by(|(_, a), (_, b)| a.norm_sqr().total_cmp(&b.norm_sqr()))
            .expect("non-empty state");
        if other.amps[k].norm() < tol {
            return Ok(false);
        }
        let phase = self.amps[k] / other.amps[k];
        let phase = phase / phase.norm();
        Ok(self
            .amps
            .iter()
            .zip(&other.amps)
            .all(|(a, b)| (a - phase * b).norm() < tol))
    }

    /// Born probabilities over the full register.
    pub fn probabilities(&self) -> Vec<f64> {
        self.amps.iter().map(|a| a.norm_sqr()).collect()
    }

    pub fn to_density(&self) -> DensityMatrix {
        DensityMatrix::from_pure(self)
    }
}

/// Density matrix stored row-major over `2^n x 2^n` entries.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    num_qubits: usize,
    data: Vec<C64>,
}

impl DensityMatrix {
    pub fn zero_state(num_qubits: usize) -> Result<Self> {
        Ok(Self::from_pure(&StateVector::zero(num_qubits)?))
    }

    pub fn from_pure(psi: &StateVector) -> Self {
        let amps = psi.amplitudes();
        let data = amps
            .iter()
            .flat_map(|a| amps.iter().map(move |b| a * b.conj()))
            .collect();
        Self { num_qubits: psi.num_qubits(), data }
    }

    pub fn maximally_mixed(num_qubits: usize) -> Result<Self> {
        check_size(num_qubits)?;
        let dim = 1usize << num_qubits;
        let mut data = vec![ZERO; dim * dim];
        for i in 0..dim {
            data[i * dim + i] = C64::new(1.0 / dim as f64, 0.0);
        }
        Ok(Self { num_qubits, data })
    }

    /// Wraps a square matrix; requires Hermiticity and unit trace within
    /// 1e-10. Positivity is not checked here (raw tomography output may be
    /// slightly negative).
    pub fn from_matrix(m: &CMatrix) -> Result<Self> {
        if m.nrows() != m.ncols() {
            return Err(Error::DimensionMismatch { expected: m.nrows(), found: m.ncols() });
        }
        let num_qubits = qubits_for_len(m.nrows())?;
        let dim = m.nrows();
        let data: Vec<C64> = (0..dim)
            .flat_map(|r| (0..dim).map(move |c| (r, c)))
            .map(|(r, c)| m[(r, c)])
            .collect();
        if data.iter().any(|a| !a.re.is_finite() || !a.im.is_finite()) {
            return Err(Error::InvalidArgument("non-finite matrix entry".into()));
        }
        let rho = Self { num_qubits, data };
        let herm = rho.hermiticity_defect();
        if herm > STATE_TOL {
            return Err(Error::InvalidArgument(format!("matrix is not Hermitian (defect {herm:e})")));
        }
        let tr = rho.trace();
        if (tr.re - 1.0).abs() > STATE_TOL || tr.im.abs() > STATE_TOL {
            return Err(Error::InvalidArgument(format!("trace {tr} != 1")));
        }
        Ok(rho)
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn dim(&self) -> usize {
        1 << self.num_qubits
    }

    pub fn get(&self, row: usize, col: usize) -> C64 {
        self.data[row * self.dim() + col]
    }

    pub fn to_matrix(&self) -> CMatrix {
        CMatrix::from_row_slice(self.dim(), self.dim(), &self.data)
    }

    pub fn trace(&self) -> C64 {
        (0..self.dim()).map(|i| self.get(i, i)).sum()
    }

    pub fn hermiticity_defect(&self) -> f64 {
        let d = self.dim();
        let mut worst = 0.0f64;
        for r in 0..d {
            for c in r..d {
                worst = worst.max((self.get(r, c) - self.get(c, r).conj()).norm());
            }
        }
        worst
    }

    /// Eigenvalues in descending order.
    pub fn eigenvalues(&self) -> Vec<f64> {
        linalg::hermitian_eigen(&self.to_matrix()).0
    }

    pub fn min_eigenvalue(&self) -> f64 {
        *self.eigenvalues().last().expect("non-empty")
    }

    pub fn purity(&self) -> f64 {
        // Tr(rho^2) = sum |rho_ij|^2 for Hermitian rho
        self.data.iter().map(|a| a.norm_sqr()).sum()
    }

    /// Largest eigenvector; meaningful as "the" state when the matrix is pure.
    pub fn dominant_eigenvector(&self) -> StateVector {
        let (_, vecs) = linalg::hermitian_eigen(&self.to_matrix());
        let amps: Vec<C64> = vecs.column(0).iter().copied().collect();
        StateVector::normalized(amps).expect("eigenvector is non-zero")
    }

    /// `<psi| rho |psi>`, real part.
    pub fn expectation(&self, psi: &StateVector) -> Result<f64> {
        if psi.dim() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), found: psi.dim() });
        }
        let d = self.dim();
        let a = psi.amplitudes();
        let mut acc = ZERO;
        for r in 0..d {
            if a[r] == ZERO {
                continue;
            }
            let row: C64 = (0..d).map(|c| self.get(r, c) * a[c]).sum();
            acc += a[r].conj() * row;
        }
        Ok(acc.re)
    }

    pub fn apply_gate(&mut self, op: &GateOp) -> Result<()> {
        op.validate(self.num_qubits)?;
        let n = self.num_qubits;
        let bits = 2 * n;
        match *op {
            GateOp::Cx(c, t) => {
                kernel::apply_controlled(&mut self.data, bits, c, t, &PAULI_X);
                kernel::apply_controlled(&mut self.data, bits, n + c, n + t, &PAULI_X);
            }
            _ => {
                let m = op.single_qubit_matrix().expect("single-qubit gate");
                let q = op.qubits()[0];
                kernel::apply_1q(&mut self.data, bits, q, &m);
                kernel::apply_1q(&mut self.data, bits, n + q, &kernel::conj2(&m));
            }
        }
        Ok(())
    }

    /// `rho -> sum_m K_m rho K_m^dag` on `targets`.
    pub fn apply_channel(&mut self, channel: &KrausChannel, targets: &[usize]) -> Result<()> {
        if channel.arity() != targets.len() {
            return Err(Error::InvalidArgument(format!(
                "channel `{}` acts on {} qubit(s), got {} target(s)",
                channel.label(),
                channel.arity(),
                targets.len()
            )));
        }
        for (i, &q) in targets.iter().enumerate() {
            check_qubit(q, self.num_qubits)?;
            if targets[..i].contains(&q) {
                return Err(Error::InvalidOp(format!("repeated channel target q[{q}]")));
            }
        }
        let deviation = channel.completeness_defect();
        if deviation > STATE_TOL {
            return Err(Error::NotCptp { label: channel.label().to_string(), deviation });
        }

        let n = self.num_qubits;
        let bits = 2 * n;
        let cols: Vec<usize> = targets.iter().map(|&q| n + q).collect();
        let mut out = vec![ZERO; self.data.len()];
        for k in channel.operators() {
            let dim = k.nrows();
            let flat: Vec<C64> = (0..dim)
                .flat_map(|r| (0..dim).map(move |c| (r, c)))
                .map(|(r, c)| k[(r, c)])
                .collect();
            let flat_conj: Vec<C64> = flat.iter().map(|z| z.conj()).collect();
            let mut term = self.data.clone();
            if dim == 2 {
                let m = [flat[0], flat[1], flat[2], flat[3]];
                kernel::apply_1q(&mut term, bits, targets[0], &m);
                kernel::apply_1q(&mut term, bits, cols[0], &kernel::conj2(&m));
            } else {
                kernel::apply_matrix(&mut term, bits, targets, &flat);
                kernel::apply_matrix(&mut term, bits, &cols, &flat_conj);
            }
            out.iter_mut().zip(&term).for_each(|(o, t)| *o += t);
        }
        self.data = out;
        Ok(())
    }

    /// Diagonal of the matrix: Born probabilities over the full register.
    pub fn probabilities(&self) -> Vec<f64> {
        (0..self.dim()).map(|i| self.get(i, i).re.max(0.0)).collect()
    }

    /// Reduced state on `keep`, in the order given.
    pub fn partial_trace(&self, keep: &[usize]) -> Result<DensityMatrix> {
        if keep.is_empty() {
            return Err(Error::InvalidArgument("partial trace needs at least one kept qubit".into()));
        }
        let n = self.num_qubits;
        for (i, &q) in keep.iter().enumerate() {
            check_qubit(q, n)?;
            if keep[..i].contains(&q) {
                return Err(Error::InvalidArgument(format!("qubit {q} listed twice")));
            }
        }
        let traced: Vec<usize> = (0..n).filter(|q| !keep.contains(q)).collect();
        let k = keep.len();
        let out_dim = 1usize << k;
        let env_dim = 1usize << traced.len();
        let spread = |local: usize, qubits: &[usize]| -> usize {
            let m = qubits.len();
            qubits
                .iter()
                .enumerate()
                .filter(|(j, _)| local >> (m - 1 - j) & 1 == 1)
                .map(|(_, &q)| 1usize << (n - 1 - q))
                .sum()
        };
        let keep_idx: Vec<usize> = (0..out_dim).map(|l| spread(l, keep)).collect();
        let env_idx: Vec<usize> = (0..env_dim).map(|l| spread(l, &traced)).collect();
        let mut data = vec![ZERO; out_dim * out_dim];
        for r in 0..out_dim {
            for c in 0..out_dim {
                data[r * out_dim + c] = env_idx
                    .iter()
                    .map(|&e| self.get(keep_idx[r] + e, keep_idx[c] + e))
                    .sum();
            }
        }
        Ok(DensityMatrix { num_qubits: k, data })
    }

    /// Largest entrywise difference to `other`.
    pub fn max_abs_diff(&self, other: &DensityMatrix) -> Result<f64> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), found: other.dim() });
        }
        Ok(self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max))
    }
}

/// `(|00> + |11>)/sqrt(2)`.
pub fn phi_plus() -> StateVector {
    let s = C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    StateVector::from_amplitudes(vec![s, ZERO, ZERO, s]).expect("normalised")
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_1_SQRT_2, PI};

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn hadamard_on_zero() {
        let mut s = StateVector::zero(1).unwrap();
        s.apply_gate(&GateOp::H(0)).unwrap();
        let want = StateVector::from_amplitudes(vec![c(FRAC_1_SQRT_2, 0.0); 2]).unwrap();
        assert!(s.equal_up_to_global_phase(&want, 1e-12).unwrap());
        assert!((s.amplitudes()[0].re - FRAC_1_SQRT_2).abs() < 1e-15);
    }

    #[test]
    fn bell_prep_gives_phi_plus() {
        let mut s = StateVector::zero(2).unwrap();
        s.apply_all(&[GateOp::H(0), GateOp::Cx(0, 1)]).unwrap();
        let d = s
            .amplitudes()
            .iter()
            .zip(phi_plus().amplitudes())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max);
        assert!(d < 1e-12);
    }

    #[test]
    fn u1_pi_turns_plus_into_minus() {
        let mut s = StateVector::zero(1).unwrap();
        s.apply_all(&[GateOp::H(0), GateOp::U1(0, PI)]).unwrap();
        let a = s.amplitudes();
        assert!((a[0] - c(FRAC_1_SQRT_2, 0.0)).norm() < 1e-12);
        assert!((a[1] - c(-FRAC_1_SQRT_2, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn gate_errors() {
        let mut s = StateVector::zero(2).unwrap();
        assert!(matches!(s.apply_gate(&GateOp::X(5)), Err(Error::QubitOutOfRange { .. })));
        assert!(matches!(s.apply_gate(&GateOp::Cx(1, 1)), Err(Error::InvalidOp(_))));
        let mut r = DensityMatrix::zero_state(2).unwrap();
        assert!(matches!(r.apply_gate(&GateOp::Cx(0, 2)), Err(Error::QubitOutOfRange { .. })));
    }

    #[test]
    fn register_size_limits() {
        assert!(StateVector::zero(0).is_err());
        assert!(matches!(StateVector::zero(13), Err(Error::TooManyQubits(13))));
        assert!(StateVector::zero(12).is_ok());
    }

    #[test]
    fn global_phase_equality() {
        let psi = phi_plus();
        let amps = psi.amplitudes().iter().map(|a| a * C64::from_polar(1.0, 0.3)).collect();
        let rotated = StateVector::from_amplitudes(amps).unwrap();
        assert!(psi.equal_up_to_global_phase(&rotated, 1e-12).unwrap());
        let zero = StateVector::basis(1, 0).unwrap();
        let one = StateVector::basis(1, 1).unwrap();
        assert!(!zero.equal_up_to_global_phase(&one, 1e-12).unwrap());
        assert!(matches!(
            zero.equal_up_to_global_phase(&psi, 1e-12),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn partial_trace_examples() {
        // product |0>|1> -> |0><0| on q0
        let prod = StateVector::basis(2, 0b01).unwrap().to_density();
        let r = prod.partial_trace(&[0]).unwrap();
        assert!((r.get(0, 0) - c(1.0, 0.0)).norm() < 1e-15);
        assert!(r.get(1, 1).norm() < 1e-15);

        // Bell pair -> I/2, checked by explicit index contraction
        let bell = phi_plus().to_density();
        let r = bell.partial_trace(&[0]).unwrap();
        for a in 0..2 {
            for b in 0..2 {
                let oracle: C64 = (0..2).map(|k| bell.get(a * 2 + k, b * 2 + k)).sum();
                assert!((r.get(a, b) - oracle).norm() < 1e-15);
            }
        }
        assert!((r.get(0, 0).re - 0.5).abs() < 1e-12);
        assert!(r.get(0, 1).norm() < 1e-12);

        assert!(matches!(bell.partial_trace(&[]), Err(Error::InvalidArgument(_))));
        assert!(bell.partial_trace(&[2]).is_err());
    }

    #[test]
    fn partial_trace_preserves_keep_order() {
        // |0>|1> keep (1,0) -> |10><10|
        let prod = StateVector::basis(2, 0b01).unwrap().to_density();
        let r = prod.partial_trace(&[1, 0]).unwrap();
        assert!((r.get(0b10, 0b10).re - 1.0).abs() < 1e-15);
    }

    #[test]
    fn density_gate_matches_statevector() {
        let ops = [GateOp::H(0), GateOp::Cx(0, 2), GateOp::U1(2, 0.7), GateOp::Y(1), GateOp::Sdg(0)];
        let mut psi = StateVector::zero(3).unwrap();
        let mut rho = DensityMatrix::zero_state(3).unwrap();
        for op in &ops {
            psi.apply_gate(op).unwrap();
            rho.apply_gate(op).unwrap();
        }
        assert!(rho.max_abs_diff(&psi.to_density()).unwrap() < 1e-12);
    }

    #[test]
    fn from_matrix_checks() {
        let mut m = crate::linalg::identity(2) * c(0.5, 0.0);
        assert!(DensityMatrix::from_matrix(&m).is_ok());
        m[(0, 1)] = c(0.1, 0.0);
        assert!(DensityMatrix::from_matrix(&m).is_err());
        let m3 = crate::linalg::identity(3);
        assert!(DensityMatrix::from_matrix(&m3).is_err());
    }
}
