//! Born-rule probabilities and seeded shot sampling.

use std::collections::BTreeMap;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::circuit::Measurement;
use crate::error::{check_qubit, Error, Result};
use crate::par::{chunk_rng, Exec};
use crate::state::{DensityMatrix, StateVector};

/// Shots per independently seeded sampling chunk.
pub const SHOT_CHUNK: u64 = 4096;

/// Anything with a computational-basis Born distribution.
pub trait BornDistribution {
    fn register_size(&self) -> usize;
    fn full_probabilities(&self) -> Vec<f64>;
}

impl BornDistribution for StateVector {
    fn register_size(&self) -> usize {
        self.num_qubits()
    }
    fn full_probabilities(&self) -> Vec<f64> {
        self.probabilities()
    }
}

impl BornDistribution for DensityMatrix {
    fn register_size(&self) -> usize {
        self.num_qubits()
    }
    fn full_probabilities(&self) -> Vec<f64> {
        self.probabilities()
    }
}

/// Histogram of measured bitstrings. Keys list classical bits in ascending
/// index order, lowest index first.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Counts {
    pub shots: u64,
    pub histogram: BTreeMap<String, u64>,
}

impl Counts {
    /// From per-outcome tallies; outcome `k` of an `m`-bit register is
    /// keyed by its `m`-character binary form. Zero tallies are dropped.
    pub fn from_tallies(num_bits: usize, tallies: &[u64]) -> Self {
        let histogram: BTreeMap<String, u64> = tallies
            .iter()
            .enumerate()
            .filter(|(_, &n)| n > 0)
            .map(|(k, &n)| (format!("{k:0num_bits$b}"), n))
            .collect();
        Self { shots: tallies.iter().sum(), histogram }
    }

    pub fn num_bits(&self) -> Option<usize> {
        self.histogram.keys().next().map(String::len)
    }

    /// Relative frequencies indexed by outcome.
    pub fn frequencies(&self, num_bits: usize) -> Result<Vec<f64>> {
        if self.shots == 0 {
            return Err(Error::InvalidArgument("empty histogram".into()));
        }
        let mut out = vec![0.0; 1 << num_bits];
        for (key, &n) in &self.histogram {
            if key.len() != num_bits {
                return Err(Error::InvalidArgument(format!(
                    "bitstring `{key}` does not have {num_bits} bits"
                )));
            }
            let idx = usize::from_str_radix(key, 2)
                .map_err(|_| Error::InvalidArgument(format!("bad bitstring `{key}`")))?;
            out[idx] += n as f64 / self.shots as f64;
        }
        Ok(out)
    }
}

/// Marginal Born distribution of `qubits`, with `qubits[0]` as the most
/// significant bit of the outcome index.
pub fn exact_probabilities<S: BornDistribution + ?Sized>(state: &S, qubits: &[usize]) -> Result<Vec<f64>> {
    let n = state.register_size();
    for &q in qubits {
        check_qubit(q, n)?;
    }
    if let Some(q) = qubits.iter().enumerate().find_map(|(i, q)| qubits[..i].contains(q).then_some(*q)) {
        return Err(Error::InvalidArgument(format!("qubit {q} listed twice")));
    }
    let m = qubits.len();
    let full = state.full_probabilities();
    let mut out = vec![0.0; 1 << m];
    for (idx, p) in full.into_iter().enumerate() {
        let outcome = qubits
            .iter()
            .enumerate()
            .fold(0usize, |acc, (j, &q)| acc | ((idx >> (n - 1 - q)) & 1) << (m - 1 - j));
        out[outcome] += p;
    }
    Ok(out)
}

/// Draw `shots` outcomes from `probs`, returning per-outcome tallies.
///
/// Shots are split into chunks of [`SHOT_CHUNK`]; chunk `k` uses
/// [`chunk_rng`]`(seed, k)`, so the result is the same for every [`Exec`].
pub fn sample_distribution(probs: &[f64], shots: u64, seed: u64, exec: Exec) -> Result<Vec<u64>> {
    if shots == 0 {
        return Err(Error::InvalidArgument("shots must be positive".into()));
    }
    let total: f64 = probs.iter().sum();
    if probs.iter().any(|p| !p.is_finite() || *p < -1e-12) || (total - 1.0).abs() > 1e-9 {
        return Err(Error::InvalidArgument(format!("not a probability vector (sum {total})")));
    }
    let mut cdf = Vec::with_capacity(probs.len());
    let mut acc = 0.0;
    for &p in probs {
        acc += p.max(0.0);
        cdf.push(acc);
    }
    let last_nonzero = probs.iter().rposition(|&p| p > 0.0).unwrap_or(0);

    let chunks = shots.div_ceil(SHOT_CHUNK);
    let partial = exec.map_range(chunks as usize, |k| {
        let k = k as u64;
        let n = SHOT_CHUNK.min(shots - k * SHOT_CHUNK);
        let mut rng = chunk_rng(seed, k);
        let mut tally = vec![0u64; probs.len()];
        for _ in 0..n {
            let u: f64 = rng.random::<f64>() * acc;
            let idx = cdf.partition_point(|&c| c <= u).min(last_nonzero);
            tally[idx] += 1;
        }
        tally
    });
    let mut tally = vec![0u64; probs.len()];
    for t in partial {
        tally.iter_mut().zip(t).for_each(|(a, b)| *a += b);
    }
    Ok(tally)
}

/// Sample terminal measurements from a state.
pub fn sample_measurements<S: BornDistribution + ?Sized>(
    state: &S,
    measurements: &[Measurement],
    shots: u64,
    seed: u64,
) -> Result<Counts> {
    sample_measurements_with(state, measurements, shots, seed, Exec::default())
}

pub fn sample_measurements_with<S: BornDistribution + ?Sized>(
    state: &S,
    measurements: &[Measurement],
    shots: u64,
    seed: u64,
    exec: Exec,
) -> Result<Counts> {
    let mut ms = measurements.to_vec();
    ms.sort_by_key(|m| m.clbit);
    let qubits: Vec<usize> = ms.iter().map(|m| m.qubit).collect();
    let probs = exact_probabilities(state, &qubits)?;
    let tallies = sample_distribution(&probs, shots, seed, exec)?;
    Ok(Counts::from_tallies(qubits.len(), &tallies))
}
