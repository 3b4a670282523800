//! JSON encodings for states, counts, tomography results and reports.
//!
//! Output is built with `serde_json::Value`, whose maps are key-sorted, so
//! serialising the same data always gives the same bytes.

use serde_json::{json, Map, Value};

use crate::error::{Error, Result};
use crate::linalg::CMatrix;
use crate::measure::Counts;
use crate::protocols::{ProtocolReport, VariantReport};
use crate::state::{DensityMatrix, StateVector};
use crate::tomography::{PauliExpectations, TomographyResult};
use crate::C64;

/// `{"dim": d, "re": [[..]], "im": [[..]]}`, row-major.
pub fn density_to_json(rho: &DensityMatrix) -> Value {
    let d = rho.dim();
    let part = |f: fn(C64) -> f64| -> Vec<Vec<f64>> {
        (0..d).map(|r| (0..d).map(|c| f(rho.get(r, c))).collect()).collect()
    };
    json!({ "dim": d, "re": part(|z| z.re), "im": part(|z| z.im) })
}

pub fn density_from_value(v: &Value) -> Result<DensityMatrix> {
    let bad = |m: &str| Error::InvalidArgument(format!("density matrix JSON: {m}"));
    let dim = v.get("dim").and_then(Value::as_u64).ok_or_else(|| bad("missing integer `dim`"))? as usize;
    let rows = |key: &str| -> Result<Vec<Vec<f64>>> {
        let arr = v.get(key).and_then(Value::as_array).ok_or_else(|| bad(&format!("missing array `{key}`")))?;
        if arr.len() != dim {
            return Err(Error::DimensionMismatch { expected: dim, found: arr.len() });
        }
        arr.iter()
            .map(|row| {
                let row = row.as_array().ok_or_else(|| bad(&format!("`{key}` rows must be arrays")))?;
                if row.len() != dim {
                    return Err(Error::DimensionMismatch { expected: dim, found: row.len() });
                }
                row.iter().map(|x| x.as_f64().ok_or_else(|| bad(&format!("`{key}` entries must be numbers")))).collect()
            })
            .collect()
    };
    let re = rows("re")?;
    let im = match v.get("im") {
        Some(_) => rows("im")?,
        None => vec![vec![0.0; dim]; dim],
    };
    let m = CMatrix::from_fn(dim, dim, |r, c| C64::new(re[r][c], im[r][c]));
    DensityMatrix::from_matrix(&m)
}

pub fn density_from_json(text: &str) -> Result<DensityMatrix> {
    density_from_value(&serde_json::from_str(text)?)
}

/// `{"num_qubits": n, "re": [..], "im": [..]}`.
pub fn statevector_to_json(psi: &StateVector) -> Value {
    let amps = psi.amplitudes();
    json!({
        "num_qubits": psi.num_qubits(),
        "re": amps.iter().map(|z| z.re).collect::<Vec<_>>(),
        "im": amps.iter().map(|z| z.im).collect::<Vec<_>>(),
    })
}

/// `{"shots", "seed", "counts"}` with bitstring keys.
pub fn counts_to_json(counts: &Counts, seed: u64) -> Value {
    json!({ "shots": counts.shots, "seed": seed, "counts": counts.histogram })
}

pub fn tomography_to_json(result: &TomographyResult) -> Value {
    let settings: Vec<Value> = result
        .settings
        .iter()
        .map(|s| {
            let mut m = Map::new();
            m.insert("label".into(), json!(s.label()));
            m.insert("frequencies".into(), json!(s.frequencies));
            if let Some(c) = &s.counts {
                m.insert("counts".into(), json!(c.histogram));
            }
            Value::Object(m)
        })
        .collect();
    let mut out = Map::new();
    match &result.expectations {
        PauliExpectations::Stokes(s) => out.insert("stokes".into(), json!(s.0)),
        PauliExpectations::Correlation(t) => out.insert("correlation".into(), json!(t.0)),
    };
    let min_eig = result.raw_min_eigenvalue();
    out.insert("qubits".into(), json!(result.qubits));
    out.insert("shots_per_setting".into(), json!(result.shots_per_setting));
    out.insert("seed".into(), json!(result.shots_per_setting.map(|_| result.seed)));
    out.insert("settings".into(), Value::Array(settings));
    out.insert("rho_raw".into(), density_to_json(&result.rho_raw));
    out.insert("rho_physical".into(), density_to_json(&result.rho_physical));
    out.insert("raw_min_eigenvalue".into(), json!(min_eig));
    out.insert("raw_is_physical".into(), json!(min_eig >= -crate::PSD_SLACK));
    Value::Object(out)
}

fn variant_to_json(v: &VariantReport) -> Value {
    let tomo: Map<String, Value> = v.tomography.iter().map(|(k, r)| (k.clone(), tomography_to_json(r))).collect();
    json!({
        "fidelities": v.fidelities,
        "raw_fidelities": v.raw_fidelities,
        "tomography": tomo,
        "shots": v.shots,
        "seed": v.seed,
    })
}

pub fn report_to_json(report: &ProtocolReport) -> Value {
    let variants: Map<String, Value> = report.variants.iter().map(|(k, v)| (k.clone(), variant_to_json(v))).collect();
    let stages: Vec<Value> = report
        .stage_states
        .iter()
        .map(|(label, psi)| json!({ "label": label, "state": statevector_to_json(psi) }))
        .collect();
    json!({
        "experiment": report.experiment.name(),
        "variants": variants,
        "fidelities": report.fidelities,
        "analytic": report.analytic,
        "stage_states": stages,
        "parameters": report.parameters,
        "seed": report.seed,
        "shots": report.shots,
    })
}

pub fn fidelity_report_json(fidelity: f64, target: &str, shots_per_setting: Option<u64>, seed: Option<u64>) -> Value {
    json!({ "fidelity": fidelity, "target": target, "shots_per_setting": shots_per_setting, "seed": seed })
}

/// Pretty-printed with a trailing newline.
pub fn to_pretty(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("Value serialisation is infallible");
    s.push('\n');
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::state::phi_plus;

    #[test]
    fn density_round_trip() {
        let psi = StateVector::normalized(vec![C64::new(0.6, 0.0), C64::new(0.0, 0.8)]).unwrap();
        let rho = psi.to_density();
        let text = to_pretty(&density_to_json(&rho));
        let back = density_from_json(&text).unwrap();
        assert!(rho.max_abs_diff(&back).unwrap() < 1e-15);
    }

    #[test]
    fn rejects_malformed_density() {
        assert!(density_from_json(r#"{"dim": 2, "re": [[1, 0]], "im": [[0, 0]]}"#).is_err());
        assert!(density_from_json(r#"{"dim": 2, "re": [[1, 0], [0, 1]]}"#).is_err());
        assert!(density_from_json(r#"{"dim": 2, "re": [[1, 1], [0, 0]]}"#).is_err());
        assert!(density_from_json(r#"{"re": [[1]]}"#).is_err());
        assert!(density_from_json("not json").is_err());
    }

    #[test]
    fn counts_shape() {
        let c = Counts::from_tallies(2, &[3, 0, 0, 5]);
        let v = counts_to_json(&c, 7);
        assert_eq!(v["shots"], 8);
        assert_eq!(v["seed"], 7);
        assert_eq!(v["counts"]["11"], 5);
    }

    #[test]
    fn stable_key_order() {
        let a = to_pretty(&density_to_json(&phi_plus().to_density()));
        let b = to_pretty(&density_to_json(&phi_plus().to_density()));
        assert_eq!(a, b);
        assert!(a.find("\"dim\"").unwrap() < a.find("\"im\"").unwrap());
    }
}
