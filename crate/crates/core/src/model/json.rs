//! JSON model documents.
//!
//! ```json
//! { "type": "hmm", "name": "...",
//!   "transitions": [["0.9", "0.1"], ["0.2", "0.8"]],
//!   "emissions": [["0.5", "0.5"], ["0.1", "0.9"]],
//!   "initial_hidden": ["0.5", "0.5"] }
//! ```
//!
//! Probabilities may be decimal strings, fractions (`"1/3"`) or JSON numbers;
//! they are parsed exactly. Real-valued Gaussian parameters may be numbers or
//! strings, and for dimension 1 a bare scalar stands for a 1-vector or 1×1 matrix.

use std::path::Path;

use nalgebra::{DMatrix, DVector};
use serde_json::{json, Map, Value};

use crate::error::{Error, Result};
use crate::prob::{f64_from_json, prob_from_json, prob_to_string, Prob};

use super::{
    DiscreteSwitching, Emissions, GaussianLinearSwitching, Gaussian, GenericDiscrete, Hmm, ModelKind, ModelSpec,
};

pub fn load_model(text: &str) -> Result<ModelSpec> {
    let doc: Value = serde_json::from_str(text)?;
    from_value(&doc)
}

pub fn load_model_file(path: impl AsRef<Path>) -> Result<ModelSpec> {
    load_model(&std::fs::read_to_string(path)?)
}

pub fn save_model_file(model: &ModelSpec, path: impl AsRef<Path>) -> Result<()> {
    let text = serde_json::to_string_pretty(&model_to_json(model))?;
    std::fs::write(path, text + "\n")?;
    Ok(())
}

fn field<'a>(obj: &'a Map<String, Value>, key: &str) -> Result<&'a Value> {
    obj.get(key).ok_or_else(|| Error::Schema(format!("missing field '{key}'")))
}

fn array<'a>(v: &'a Value, what: &str) -> Result<&'a Vec<Value>> {
    v.as_array().ok_or_else(|| Error::Schema(format!("{what}: expected an array")))
}

fn count(obj: &Map<String, Value>, key: &str) -> Result<usize> {
    field(obj, key)?
        .as_u64()
        .filter(|&n| n >= 1)
        .map(|n| n as usize)
        .ok_or_else(|| Error::Schema(format!("'{key}' must be a positive integer")))
}

fn prob_vec(v: &Value, what: &str) -> Result<Vec<Prob>> {
    array(v, what)?.iter().map(|e| prob_from_json(e, what)).collect()
}

fn prob_matrix(v: &Value, what: &str) -> Result<Vec<Vec<Prob>>> {
    array(v, what)?.iter().map(|row| prob_vec(row, what)).collect()
}

fn real_vec(v: &Value, d: usize, what: &str) -> Result<DVector<f64>> {
    let values: Vec<f64> = match v {
        Value::Array(a) => a.iter().map(|e| f64_from_json(e, what)).collect::<Result<_>>()?,
        scalar => vec![f64_from_json(scalar, what)?],
    };
    if values.len() != d {
        return Err(Error::Dimension(format!("{what}: {} entries, expected {d}", values.len())));
    }
    Ok(DVector::from_vec(values))
}

fn real_matrix(v: &Value, d: usize, what: &str) -> Result<DMatrix<f64>> {
    let rows: Vec<DVector<f64>> = match v {
        Value::Array(a) if a.iter().all(Value::is_array) => {
            a.iter().map(|row| real_vec(row, d, what)).collect::<Result<_>>()?
        }
        Value::Array(a) if d == 1 && a.len() == 1 => vec![real_vec(&a[0], 1, what)?],
        scalar if d == 1 => vec![real_vec(scalar, 1, what)?],
        _ => return Err(Error::Schema(format!("{what}: expected a {d}x{d} matrix"))),
    };
    if rows.len() != d {
        return Err(Error::Dimension(format!("{what}: {} rows, expected {d}", rows.len())));
    }
    Ok(DMatrix::from_fn(d, d, |i, j| rows[i][j]))
}

fn gaussians(means: &Value, covs: &Value, d: usize, what: &str) -> Result<Vec<Gaussian>> {
    let (means, covs) = (array(means, what)?, array(covs, what)?);
    if means.len() != covs.len() {
        return Err(Error::Dimension(format!("{what}: {} means but {} covariances", means.len(), covs.len())));
    }
    means
        .iter()
        .zip(covs)
        .enumerate()
        .map(|(s, (m, c))| Gaussian::new(real_vec(m, d, what)?, real_matrix(c, d, what)?, s))
        .collect()
}

fn from_value(doc: &Value) -> Result<ModelSpec> {
    let obj = doc.as_object().ok_or_else(|| Error::Schema("model document must be an object".into()))?;
    let ty = field(obj, "type")?
        .as_str()
        .ok_or_else(|| Error::Schema("'type' must be a string".into()))?;
    let kind = match ty {
        "generic_discrete" => generic_from(obj)?,
        "hmm" => hmm_from(obj)?,
        "discrete_switching" => switching_from(obj)?,
        "gaussian_linear_switching" => glm_from(obj)?,
        other => return Err(Error::Schema(format!("unknown model type '{other}'"))),
    };
    let spec = ModelSpec::new(kind)?;
    Ok(match obj.get("name").and_then(Value::as_str) {
        Some(n) => spec.with_name(n),
        None => spec,
    })
}

/// Joint index order of the kernel rows and columns in a document.
#[derive(Clone, Copy)]
enum JointOrder {
    /// `z = y·|X| + x`
    StateMajor,
    /// `z = x·|Y| + y`
    ObservationMajor,
}

impl JointOrder {
    fn index(self, x: usize, y: usize, nx: usize, ny: usize) -> usize {
        match self {
            JointOrder::StateMajor => y * nx + x,
            JointOrder::ObservationMajor => x * ny + y,
        }
    }
}

fn generic_from(obj: &Map<String, Value>) -> Result<ModelKind> {
    let nx = count(obj, "symbols")?;
    let ny = count(obj, "states")?;
    let order = match obj.get("joint_order").and_then(Value::as_str) {
        None | Some("state_major") => JointOrder::StateMajor,
        Some("observation_major") => JointOrder::ObservationMajor,
        Some(other) => return Err(Error::Schema(format!("unknown joint_order '{other}'"))),
    };
    let n = nx * ny;
    let kernel = prob_matrix(field(obj, "kernel")?, "kernel")?;
    if kernel.len() != n || kernel.iter().any(|r| r.len() != n) {
        return Err(Error::Dimension(format!("kernel must be {n}x{n}")));
    }
    let initial = prob_vec(field(obj, "initial")?, "initial")?;
    if initial.len() != n {
        return Err(Error::Dimension(format!("initial must have {n} entries")));
    }
    let at = |x, y| order.index(x, y, nx, ny);
    Ok(ModelKind::GenericDiscrete(GenericDiscrete::from_fn(
        nx,
        ny,
        |xp, yp, x, y| kernel[at(xp, yp)][at(x, y)].clone(),
        |x, y| initial[at(x, y)].clone(),
    )))
}

fn hmm_from(obj: &Map<String, Value>) -> Result<ModelKind> {
    let transitions = prob_matrix(field(obj, "transitions")?, "transitions")?;
    let initial_hidden = prob_vec(field(obj, "initial_hidden")?, "initial_hidden")?;
    let emissions = match (obj.get("emissions"), obj.get("gaussian_emissions")) {
        (Some(e), None) => Emissions::Discrete(prob_matrix(e, "emissions")?),
        (None, Some(Value::Object(g))) => {
            let means = field(g, "means")?;
            let d = array(means, "means")?
                .first()
                .map(|m| m.as_array().map_or(1, Vec::len))
                .ok_or_else(|| Error::Schema("gaussian_emissions: no means".into()))?;
            Emissions::Gaussian(gaussians(means, field(g, "covariances")?, d, "gaussian_emissions")?)
        }
        _ => return Err(Error::Schema("hmm needs exactly one of 'emissions' or 'gaussian_emissions'".into())),
    };
    let initial_emissions = obj
        .get("initial_emissions")
        .map(|v| prob_matrix(v, "initial_emissions"))
        .transpose()?;
    Ok(ModelKind::Hmm(Hmm {
        transitions,
        emissions,
        initial_hidden,
        initial_emissions,
    }))
}

fn switching_from(obj: &Map<String, Value>) -> Result<ModelKind> {
    let transitions = prob_matrix(field(obj, "transitions")?, "transitions")?;
    let emissions: Vec<Vec<Vec<Prob>>> = array(field(obj, "emissions")?, "emissions")?
        .iter()
        .map(|block| prob_matrix(block, "emissions"))
        .collect::<Result<_>>()?;
    let initial_hidden = prob_vec(field(obj, "initial_hidden")?, "initial_hidden")?;
    let nx = emissions.first().map_or(0, Vec::len);
    let initial_emissions = match obj.get("initial_emissions") {
        Some(v) => prob_matrix(v, "initial_emissions")?,
        None => vec![vec![Prob::new(1.into(), (nx.max(1) as i64).into()); nx]; transitions.len()],
    };
    Ok(ModelKind::DiscreteSwitching(DiscreteSwitching {
        transitions,
        emissions,
        initial_hidden,
        initial_emissions,
    }))
}

fn glm_from(obj: &Map<String, Value>) -> Result<ModelKind> {
    let d = count(obj, "dimension")?;
    let transitions = prob_matrix(field(obj, "transitions")?, "transitions")?;
    let n = transitions.len();
    let f: Vec<DMatrix<f64>> = array(field(obj, "F")?, "F")?
        .iter()
        .map(|m| real_matrix(m, d, "F"))
        .collect::<Result<_>>()?;
    let noise = gaussians(field(obj, "noise_means")?, field(obj, "noise_covariances")?, d, "noise")?;
    let initial_hidden = prob_vec(field(obj, "initial_hidden")?, "initial_hidden")?;
    let initial_x = match obj.get("initial_x") {
        None => vec![Gaussian::standard(d); n],
        Some(Value::Object(o)) if o.contains_key("means") => {
            gaussians(field(o, "means")?, field(o, "covariances")?, d, "initial_x")?
        }
        Some(Value::Object(o)) => {
            let g = Gaussian::new(
                real_vec(field(o, "mean")?, d, "initial_x")?,
                real_matrix(field(o, "covariance")?, d, "initial_x")?,
                0,
            )?;
            vec![g; n]
        }
        Some(_) => return Err(Error::Schema("initial_x must be an object".into())),
    };
    Ok(ModelKind::GaussianLinearSwitching(GaussianLinearSwitching {
        transitions,
        f,
        noise,
        initial_hidden,
        initial_x,
    }))
}

fn probs(v: &[Prob]) -> Value {
    Value::Array(v.iter().map(|p| Value::String(prob_to_string(p))).collect())
}

fn prob_rows(m: &[Vec<Prob>]) -> Value {
    Value::Array(m.iter().map(|r| probs(r)).collect())
}

fn reals(v: &DVector<f64>) -> Value {
    json!(v.iter().copied().collect::<Vec<f64>>())
}

fn real_rows(m: &DMatrix<f64>) -> Value {
    json!((0..m.nrows())
        .map(|i| m.row(i).iter().copied().collect::<Vec<f64>>())
        .collect::<Vec<_>>())
}

fn gaussian_fields(g: &[Gaussian]) -> (Value, Value) {
    (
        Value::Array(g.iter().map(|g| reals(g.mean())).collect()),
        Value::Array(g.iter().map(|g| real_rows(g.cov())).collect()),
    )
}

/// Serializes a model; `load_model` of the result reproduces it exactly for
/// discrete parameters and to f64 round-trip precision for Gaussian ones.
pub fn model_to_json(model: &ModelSpec) -> Value {
    let mut out = Map::new();
    let mut put = |k: &str, v: Value| {
        out.insert(k.to_string(), v);
    };
    match model.kind() {
        ModelKind::GenericDiscrete(g) => {
            let (nx, ny) = (g.symbols(), g.states());
            let at = |z: usize| (z % nx, z / nx);
            let kernel: Vec<Vec<Prob>> = (0..nx * ny)
                .map(|zp| {
                    let (xp, yp) = at(zp);
                    (0..nx * ny)
                        .map(|z| {
                            let (x, y) = at(z);
                            g.q(xp, yp, x, y).clone()
                        })
                        .collect()
                })
                .collect();
            let initial: Vec<Prob> = (0..nx * ny).map(|z| g.init(at(z).0, at(z).1).clone()).collect();
            put("type", json!("generic_discrete"));
            put("symbols", json!(nx));
            put("states", json!(ny));
            put("joint_order", json!("state_major"));
            put("kernel", prob_rows(&kernel));
            put("initial", probs(&initial));
        }
        ModelKind::Hmm(h) => {
            put("type", json!("hmm"));
            put("transitions", prob_rows(&h.transitions));
            match &h.emissions {
                Emissions::Discrete(e) => put("emissions", prob_rows(e)),
                Emissions::Gaussian(g) => {
                    let (means, covariances) = gaussian_fields(g);
                    put("gaussian_emissions", json!({ "means": means, "covariances": covariances }));
                }
            }
            put("initial_hidden", probs(&h.initial_hidden));
            if let Some(ie) = &h.initial_emissions {
                put("initial_emissions", prob_rows(ie));
            }
        }
        ModelKind::DiscreteSwitching(d) => {
            put("type", json!("discrete_switching"));
            put("transitions", prob_rows(&d.transitions));
            put("emissions", Value::Array(d.emissions.iter().map(|b| prob_rows(b)).collect()));
            put("initial_hidden", probs(&d.initial_hidden));
            put("initial_emissions", prob_rows(&d.initial_emissions));
        }
        ModelKind::GaussianLinearSwitching(g) => {
            put("type", json!("gaussian_linear_switching"));
            put("dimension", json!(g.dim()));
            put("transitions", prob_rows(&g.transitions));
            put("F", Value::Array(g.f.iter().map(real_rows).collect()));
            let (means, covariances) = gaussian_fields(&g.noise);
            put("noise_means", means);
            put("noise_covariances", covariances);
            put("initial_hidden", probs(&g.initial_hidden));
            let (means, covariances) = gaussian_fields(&g.initial_x);
            put("initial_x", json!({ "means": means, "covariances": covariances }));
        }
    }
    if let Some(n) = model.name() {
        out.insert("name".into(), json!(n));
    }
    Value::Object(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scorer::{Observation, Scorer};

    #[test]
    fn row_sum_error_from_document() {
        let doc = r#"{"type":"hmm","transitions":[["0.5","0.4"],["0.5","0.5"]],
                      "emissions":[["1"],["1"]],"initial_hidden":["0.5","0.5"]}"#;
        assert!(matches!(load_model(doc).unwrap_err(), Error::RowSum { row: 1, .. }));
    }

    #[test]
    fn non_pd_covariance_rejected() {
        let doc = r#"{"type":"hmm","transitions":[["1"]],"initial_hidden":["1"],
                      "gaussian_emissions":{"means":[[0,0]],"covariances":[[[1,2],[2,1]]]}}"#;
        assert!(matches!(load_model(doc).unwrap_err(), Error::NotPositiveDefinite { state: 1 }));
    }

    #[test]
    fn unknown_type_is_schema_error() {
        assert!(matches!(load_model(r#"{"type":"nope"}"#).unwrap_err(), Error::Schema(_)));
    }

    #[test]
    fn scalar_glm_shorthand_and_round_trip() {
        let doc = r#"{"type":"gaussian_linear_switching","dimension":1,
            "transitions":[["0.6","0.4"],["0.5","0.5"]],"F":[0.3,0.4],
            "noise_means":[0,2],"noise_covariances":[1,1],"initial_hidden":["0.5","0.5"]}"#;
        let m = load_model(doc).unwrap();
        let again = load_model(&model_to_json(&m).to_string()).unwrap();
        let a = Observation::Point(vec![0.25]);
        let b = Observation::Point(vec![-1.5]);
        for (i, j) in [(0, 0), (0, 1), (1, 0), (1, 1)] {
            assert_eq!(m.transition(&a, i, &b, j), again.transition(&a, i, &b, j));
        }
    }
}
