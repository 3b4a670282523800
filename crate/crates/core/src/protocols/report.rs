use std::collections::BTreeMap;

use crate::state::StateVector;
use crate::tomography::TomographyResult;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Experiment {
    Swap,
    Purify,
}

impl Experiment {
    pub fn name(self) -> &'static str {
        match self {
            Experiment::Swap => "swap",
            Experiment::Purify => "purify",
        }
    }
}

/// One simulation variant (ideal, sampled or noisy).
#[derive(Debug, Clone, Default)]
pub struct VariantReport {
    /// Fidelities of the physically projected estimates.
    pub fidelities: BTreeMap<String, f64>,
    /// Fidelities of the raw linear-inversion estimates.
    pub raw_fidelities: BTreeMap<String, f64>,
    pub tomography: BTreeMap<String, TomographyResult>,
    /// `None` for exact-probability runs.
    pub shots: Option<u64>,
    pub seed: Option<u64>,
}

#[derive(Debug, Clone)]
pub struct ProtocolReport {
    pub experiment: Experiment,
    pub variants: BTreeMap<String, VariantReport>,
    /// Headline fidelities: the noisy variant when present, else sampled.
    pub fidelities: BTreeMap<String, f64>,
    /// Exact fidelities computed directly from the noiseless statevector.
    pub analytic: BTreeMap<String, f64>,
    /// Noiseless intermediate states.
    pub stage_states: Vec<(String, StateVector)>,
    /// Experiment parameters (phi, mode, ...), as display strings.
    pub parameters: BTreeMap<String, String>,
    pub seed: u64,
    pub shots: u64,
}

pub(crate) const VARIANT_NAMES: [&str; 3] = ["ideal", "sampled", "noisy"];

impl ProtocolReport {
    pub(crate) fn assemble(
        experiment: Experiment,
        variants: Vec<VariantReport>,
        stage_states: Vec<(String, StateVector)>,
        analytic: BTreeMap<String, f64>,
        seed: u64,
        shots: u64,
        parameters: BTreeMap<String, String>,
    ) -> Self {
        let variants: BTreeMap<String, VariantReport> = VARIANT_NAMES
            .iter()
            .map(|s| s.to_string())
            .zip(variants)
            .collect();
        let headline = variants
            .get("noisy")
            .or_else(|| variants.get("sampled"))
            .map(|v| v.fidelities.clone())
            .unwrap_or_default();
        Self { experiment, variants, fidelities: headline, analytic, stage_states, parameters, seed, shots }
    }

    pub fn stage(&self, label: &str) -> Option<&StateVector> {
        self.stage_states.iter().find(|(l, _)| l == label).map(|(_, s)| s)
    }
}
