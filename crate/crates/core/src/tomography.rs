//! One- and two-qubit state tomography in the Pauli basis.
//!
//! Each qubit is measured in X, Y or Z (3 settings for one qubit, 9 for a
//! pair). Basis changes are applied before a Z-basis readout:
//! X: `H`; Y: `U1(-pi/2)` then `H`; Z: nothing. Outcome 0 is the +1
//! eigenvalue in every basis.
//!
//! Pair correlations `T[i][j] = <sigma_i (x) sigma_j>` are joint
//! expectations from the matching setting. Single-qubit terms `T[i][0]`
//! and `T[0][j]` average the marginal over the partner's three settings.
//! The linear estimate is `rho = 1/4 sum T[i][j] sigma_i (x) sigma_j`,
//! which may be slightly non-positive under shot noise; [`project_physical`]
//! maps it to the closest valid state under the trace constraint.

use std::f64::consts::FRAC_PI_2;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::circuit::Circuit;
use crate::error::{Error, Result};
use crate::gate::{GateOp, Mat2, IDENTITY, PAULI_X, PAULI_Y, PAULI_Z};
use crate::linalg::{self, CMatrix};
use crate::measure::{sample_distribution, Counts};
use crate::par::{derive_seed, Exec};
use crate::sim::Simulator;
use crate::state::{DensityMatrix, StateVector};
use crate::{C64, PSD_SLACK};

pub const DEFAULT_SHOTS_PER_SETTING: u64 = 8192;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    pub const MEASURABLE: [Pauli; 3] = [Pauli::X, Pauli::Y, Pauli::Z];

    pub fn index(self) -> usize {
        match self {
            Pauli::I => 0,
            Pauli::X => 1,
            Pauli::Y => 2,
            Pauli::Z => 3,
        }
    }

    pub fn matrix(self) -> Mat2 {
        match self {
            Pauli::I => IDENTITY,
            Pauli::X => PAULI_X,
            Pauli::Y => PAULI_Y,
            Pauli::Z => PAULI_Z,
        }
    }

    /// Gates rotating this basis onto Z.
    pub fn basis_change(self, qubit: usize) -> Vec<GateOp> {
        match self {
            Pauli::X => vec![GateOp::H(qubit)],
            Pauli::Y => vec![GateOp::U1(qubit, -FRAC_PI_2), GateOp::H(qubit)],
            Pauli::I | Pauli::Z => vec![],
        }
    }

    fn from_index(i: usize) -> Pauli {
        [Pauli::I, Pauli::X, Pauli::Y, Pauli::Z][i]
    }
}

impl fmt::Display for Pauli {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Pauli::I => "I",
            Pauli::X => "X",
            Pauli::Y => "Y",
            Pauli::Z => "Z",
        };
        f.write_str(s)
    }
}

/// One measurement setting: a basis per tomographed qubit and the circuit
/// that realises it on a fresh register of that size.
#[derive(Debug, Clone, PartialEq)]
pub struct TomographySetting {
    pub bases: Vec<Pauli>,
    pub circuit: Circuit,
}

impl TomographySetting {
    pub fn label(&self) -> String {
        self.bases.iter().map(ToString::to_string).collect()
    }

    /// Basis-change gates with the k-th basis applied to `qubits[k]`.
    pub fn prefix_on(&self, qubits: &[usize]) -> Vec<GateOp> {
        self.bases
            .iter()
            .zip(qubits)
            .flat_map(|(b, &q)| b.basis_change(q))
            .collect()
    }
}

/// The 3 (one qubit) or 9 (pair) Pauli measurement settings, in
/// lexicographic X < Y < Z order.
pub fn tomography_settings(num_qubits: usize) -> Result<Vec<TomographySetting>> {
    let combos: Vec<Vec<Pauli>> = match num_qubits {
        1 => Pauli::MEASURABLE.iter().map(|&p| vec![p]).collect(),
        2 => Pauli::MEASURABLE
            .iter()
            .flat_map(|&a| Pauli::MEASURABLE.iter().map(move |&b| vec![a, b]))
            .collect(),
        n => {
            return Err(Error::InvalidArgument(format!(
                "tomography supports 1 or 2 qubits, got {n}"
            )))
        }
    };
    combos
        .into_iter()
        .map(|bases| {
            let qubits: Vec<usize> = (0..num_qubits).collect();
            let mut circuit = Circuit::new(num_qubits)?;
            for (b, &q) in bases.iter().zip(&qubits) {
                circuit.extend(&b.basis_change(q))?;
            }
            for &q in &qubits {
                circuit.measure(q, q)?;
            }
            Ok(TomographySetting { bases, circuit })
        })
        .collect()
}

/// Outcome frequencies of one setting (exact probabilities in the
/// infinite-shot limit). Outcome index has the first qubit most significant.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SettingData {
    pub bases: Vec<Pauli>,
    pub frequencies: Vec<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub counts: Option<Counts>,
}

impl SettingData {
    pub fn from_probabilities(bases: Vec<Pauli>, frequencies: Vec<f64>) -> Self {
        Self { bases, frequencies, counts: None }
    }

    pub fn from_counts(bases: Vec<Pauli>, counts: Counts) -> Result<Self> {
        let frequencies = counts.frequencies(bases.len())?;
        Ok(Self { bases, frequencies, counts: Some(counts) })
    }

    pub fn label(&self) -> String {
        self.bases.iter().map(ToString::to_string).collect()
    }

    /// `sum_b (-1)^(parity of b restricted to mask) f(b)`.
    fn signed_mean(&self, mask: usize) -> f64 {
        self.frequencies
            .iter()
            .enumerate()
            .map(|(b, f)| if (b & mask).count_ones().is_multiple_of(2) { *f } else { -*f })
            .sum()
    }
}

/// Single-qubit Stokes parameters `S0..S3`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StokesVector(pub [f64; 4]);

/// Two-qubit Pauli correlation table, `t[i1][i2] = <sigma_i1 (x) sigma_i2>`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CorrelationTensor(pub [[f64; 4]; 4]);

impl CorrelationTensor {
    pub fn get(&self, a: Pauli, b: Pauli) -> f64 {
        self.0[a.index()][b.index()]
    }

    /// Exact correlations of a two-qubit state.
    pub fn of_state(rho: &DensityMatrix) -> Result<Self> {
        if rho.num_qubits() != 2 {
            return Err(Error::DimensionMismatch { expected: 4, found: rho.dim() });
        }
        let m = rho.to_matrix();
        let mut t = [[0.0; 4]; 4];
        for (i, row) in t.iter_mut().enumerate() {
            for (j, v) in row.iter_mut().enumerate() {
                let op = pauli_product(&[Pauli::from_index(i), Pauli::from_index(j)]);
                *v = (&m * op).trace().re;
            }
        }
        Ok(Self(t))
    }
}

/// How pair correlations are formed from the data.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CorrelationMode {
    /// Joint expectations from the matching two-qubit setting.
    #[default]
    Joint,
    /// Product of single-qubit Stokes parameters, `T[i][j] = S_i S_j`.
    /// Cannot represent entangled correlations; kept for comparison.
    Factorized,
}

fn find<'a>(data: &'a [SettingData], bases: &[Pauli]) -> Result<&'a SettingData> {
    let found = data.iter().find(|d| d.bases == bases).ok_or_else(|| {
        Error::IncompleteTomography(bases.iter().map(ToString::to_string).collect())
    })?;
    if found.frequencies.len() != 1 << bases.len() {
        return Err(Error::InvalidArgument(format!(
            "setting {} has {} outcomes, expected {}",
            found.label(),
            found.frequencies.len(),
            1 << bases.len()
        )));
    }
    Ok(found)
}

/// Stokes parameters from the three single-qubit settings.
pub fn stokes_from_counts(data: &[SettingData]) -> Result<StokesVector> {
    let mut s = [1.0, 0.0, 0.0, 0.0];
    for p in Pauli::MEASURABLE {
        let d = find(data, &[p])?;
        // P(0) - P(1)
        s[p.index()] = d.signed_mean(1);
    }
    Ok(StokesVector(s))
}

/// Correlation table from the nine two-qubit settings.
pub fn correlation_from_counts(data: &[SettingData], mode: CorrelationMode) -> Result<CorrelationTensor> {
    let mut t = [[0.0; 4]; 4];
    t[0][0] = 1.0;
    for a in Pauli::MEASURABLE {
        for b in Pauli::MEASURABLE {
            let d = find(data, &[a, b])?;
            t[a.index()][b.index()] = d.signed_mean(0b11);
            t[a.index()][0] += d.signed_mean(0b10) / 3.0;
            t[0][b.index()] += d.signed_mean(0b01) / 3.0;
        }
    }
    if mode == CorrelationMode::Factorized {
        for i in 1..4 {
            for j in 1..4 {
                t[i][j] = t[i][0] * t[0][j];
            }
        }
    }
    Ok(CorrelationTensor(t))
}

fn pauli_product(ps: &[Pauli]) -> CMatrix {
    ps.iter().fold(CMatrix::identity(1, 1), |acc, p| {
        acc.kronecker(&CMatrix::from_row_slice(2, 2, &p.matrix()))
    })
}

/// Linear inversion `rho = 1/4 sum_ij T[i][j] sigma_i (x) sigma_j`.
pub fn reconstruct_density(tensor: &CorrelationTensor) -> Result<DensityMatrix> {
    let mut m = CMatrix::zeros(4, 4);
    for i in 0..4 {
        for j in 0..4 {
            let w = tensor.0[i][j];
            if w != 0.0 {
                m += pauli_product(&[Pauli::from_index(i), Pauli::from_index(j)]) * C64::new(w / 4.0, 0.0);
            }
        }
    }
    DensityMatrix::from_matrix(&m)
}

/// `rho = (I + S1 X + S2 Y + S3 Z) / 2`.
pub fn reconstruct_single(stokes: &StokesVector) -> Result<DensityMatrix> {
    let mut m = CMatrix::zeros(2, 2);
    for (i, &s) in stokes.0.iter().enumerate() {
        m += CMatrix::from_row_slice(2, 2, &Pauli::from_index(i).matrix()) * C64::new(s / 2.0, 0.0);
    }
    DensityMatrix::from_matrix(&m)
}

/// Closest positive semidefinite unit-trace matrix in the eigenbasis of a
/// Hermitian input: walk eigenvalues from the smallest, zero those that stay
/// negative after the mass removed so far is shared over the rest, then
/// shift the survivors by the accumulated mass divided by their count.
pub fn project_physical(rho: &DensityMatrix) -> Result<DensityMatrix> {
    let (mut values, vectors) = linalg::hermitian_eigen(&rho.to_matrix());
    let total: f64 = values.iter().sum();
    if !(total > 0.0) {
        return Err(Error::InvalidArgument(format!("trace {total} is not positive")));
    }
    if values.iter().all(|&l| l >= 0.0) && (total - 1.0).abs() < 1e-15 {
        return Ok(rho.clone());
    }
    values.iter_mut().for_each(|l| *l /= total);

    let mut keep = values.len();
    let mut removed = 0.0;
    while keep > 0 && values[keep - 1] + removed / (keep as f64) < 0.0 {
        removed += values[keep - 1];
        values[keep - 1] = 0.0;
        keep -= 1;
    }
    for v in values.iter_mut().take(keep) {
        *v += removed / keep as f64;
    }
    let m = linalg::hermitian_part(&linalg::from_eigen(&values, &vectors));
    DensityMatrix::from_matrix(&m)
}

/// Eigenvalues below this are treated as exact zeros when taking matrix
/// square roots.
const SQRT_CUTOFF: f64 = 1e-13;

fn psd_sqrt(m: &CMatrix) -> CMatrix {
    let (values, vectors) = linalg::hermitian_eigen(m);
    let roots: Vec<f64> = values
        .iter()
        .map(|&l| if l > SQRT_CUTOFF { l.sqrt() } else { 0.0 })
        .collect();
    linalg::from_eigen(&roots, &vectors)
}

fn check_physical(rho: &DensityMatrix) -> Result<()> {
    let min = rho.min_eigenvalue();
    if min < -PSD_SLACK {
        return Err(Error::NotPhysical { min_eigenvalue: min });
    }
    Ok(())
}

/// `Tr sqrt(sqrt(target) rho sqrt(target))` via Hermitian square roots.
pub fn fidelity_general(target: &DensityMatrix, rho: &DensityMatrix) -> Result<f64> {
    if target.dim() != rho.dim() {
        return Err(Error::DimensionMismatch { expected: target.dim(), found: rho.dim() });
    }
    check_physical(target)?;
    check_physical(rho)?;
    let s = psd_sqrt(&target.to_matrix());
    let inner = linalg::hermitian_part(&(&s * rho.to_matrix() * &s));
    let (values, _) = linalg::hermitian_eigen(&inner);
    Ok(values.iter().filter(|&&l| l > SQRT_CUTOFF).map(|l| l.sqrt()).sum())
}

/// `sqrt(<psi|rho|psi>)`; no positivity check, so it also scores raw
/// reconstructions.
pub fn pure_state_fidelity(psi: &StateVector, rho: &DensityMatrix) -> Result<f64> {
    Ok(rho.expectation(psi)?.max(0.0).sqrt())
}

/// Fidelity of `rho` to `target`, using the pure-target shortcut when
/// `target` has purity above `1 - 1e-10`.
pub fn fidelity(target: &DensityMatrix, rho: &DensityMatrix) -> Result<f64> {
    if target.dim() != rho.dim() {
        return Err(Error::DimensionMismatch { expected: target.dim(), found: rho.dim() });
    }
    if target.purity() > 1.0 - 1e-10 {
        check_physical(rho)?;
        return pure_state_fidelity(&target.dominant_eigenvector(), rho);
    }
    fidelity_general(target, rho)
}

/// Either Stokes parameters (one qubit) or the correlation table (pair).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PauliExpectations {
    Stokes(StokesVector),
    Correlation(CorrelationTensor),
}

#[derive(Debug, Clone, Copy)]
pub struct TomographyConfig {
    /// Shots per setting; `None` uses exact probabilities.
    pub shots: Option<u64>,
    pub seed: u64,
    pub mode: CorrelationMode,
    pub exec: Exec,
}

impl Default for TomographyConfig {
    fn default() -> Self {
        Self {
            shots: Some(DEFAULT_SHOTS_PER_SETTING),
            seed: 1,
            mode: CorrelationMode::Joint,
            exec: Exec::default(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct TomographyResult {
    pub qubits: Vec<usize>,
    pub expectations: PauliExpectations,
    pub rho_raw: DensityMatrix,
    pub rho_physical: DensityMatrix,
    pub shots_per_setting: Option<u64>,
    pub seed: u64,
    pub settings: Vec<SettingData>,
}

impl TomographyResult {
    pub fn settings_used(&self) -> Vec<String> {
        self.settings.iter().map(SettingData::label).collect()
    }

    pub fn raw_min_eigenvalue(&self) -> f64 {
        self.rho_raw.min_eigenvalue()
    }

    /// Fidelity of the physical estimate to a pure target.
    pub fn fidelity_to(&self, psi: &StateVector) -> Result<f64> {
        fidelity(&psi.to_density(), &self.rho_physical)
    }

    /// Fidelity of the unprojected estimate to a pure target.
    pub fn raw_fidelity_to(&self, psi: &StateVector) -> Result<f64> {
        pure_state_fidelity(psi, &self.rho_raw)
    }
}

/// Assemble estimates from per-setting data.
pub fn estimate(
    qubits: Vec<usize>,
    settings: Vec<SettingData>,
    mode: CorrelationMode,
    shots: Option<u64>,
    seed: u64,
) -> Result<TomographyResult> {
    let (expectations, rho_raw) = match qubits.len() {
        1 => {
            let s = stokes_from_counts(&settings)?;
            (PauliExpectations::Stokes(s), reconstruct_single(&s)?)
        }
        2 => {
            let t = correlation_from_counts(&settings, mode)?;
            (PauliExpectations::Correlation(t), reconstruct_density(&t)?)
        }
        n => return Err(Error::InvalidArgument(format!("tomography supports 1 or 2 qubits, got {n}"))),
    };
    let rho_physical = project_physical(&rho_raw)?;
    Ok(TomographyResult { qubits, expectations, rho_raw, rho_physical, shots_per_setting: shots, seed, settings })
}

/// Tomograph `qubits` of the state `circuit` prepares. The circuit's own
/// measurements are ignored. Setting `k` samples with
/// `derive_seed(cfg.seed, k)`; basis-change gates are noisy when `sim` is.
pub fn run_tomography(
    sim: &Simulator<'_>,
    circuit: &Circuit,
    qubits: &[usize],
    cfg: &TomographyConfig,
) -> Result<TomographyResult> {
    let settings = tomography_settings(qubits.len())?;
    for (i, &q) in qubits.iter().enumerate() {
        crate::error::check_qubit(q, circuit.num_qubits())?;
        if qubits[..i].contains(&q) {
            return Err(Error::InvalidArgument(format!("qubit {q} listed twice")));
        }
    }
    let base = sim.run(circuit)?;
    let data = cfg.exec.try_map_range(settings.len(), |k| -> Result<SettingData> {
        let setting = &settings[k];
        let mut st = base.clone();
        sim.apply_all(&mut st, &setting.prefix_on(qubits))?;
        let probs = sim.readout_distribution(&st, qubits)?;
        match cfg.shots {
            None => Ok(SettingData::from_probabilities(setting.bases.clone(), probs)),
            Some(shots) => {
                let tallies = sample_distribution(&probs, shots, derive_seed(cfg.seed, k as u64), Exec::Sequential)?;
                SettingData::from_counts(setting.bases.clone(), Counts::from_tallies(qubits.len(), &tallies))
            }
        }
    })?;
    estimate(qubits.to_vec(), data, cfg.mode, cfg.shots, cfg.seed)
}
