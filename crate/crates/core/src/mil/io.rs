//! `model.json`, schema version 1:
//! `{"schema":1,"task","dims":{d,h,m,C},"weights":{V,b_v,w,W1,b1,W2,b2},
//! "hyperparams","seed","loss_log"}` with row-major weight arrays.
//! Numbers use shortest round-trip formatting, so reading back is exact.

use serde::{Deserialize, Serialize};

use super::model::{Hyperparams, MilDims, MilModel, MilParams};
use super::{MilError, Task};

pub const MODEL_SCHEMA: u32 = 1;

#[derive(Serialize, Deserialize)]
struct Weights {
    #[serde(rename = "V")]
    v: Vec<f64>,
    b_v: Vec<f64>,
    w: Vec<f64>,
    #[serde(rename = "W1")]
    w1: Vec<f64>,
    b1: Vec<f64>,
    #[serde(rename = "W2")]
    w2: Vec<f64>,
    b2: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct ModelFile {
    schema: u32,
    task: Task,
    dims: MilDims,
    weights: Weights,
    hyperparams: Hyperparams,
    seed: u64,
    loss_log: Vec<f64>,
}

impl MilModel {
    pub fn to_json(&self) -> String {
        let p = &self.params;
        let file = ModelFile {
            schema: MODEL_SCHEMA,
            task: self.task,
            dims: self.dims,
            weights: Weights {
                v: p.v.clone(),
                b_v: p.b_v.clone(),
                w: p.w.clone(),
                w1: p.w1.clone(),
                b1: p.b1.clone(),
                w2: p.w2.clone(),
                b2: p.b2.clone(),
            },
            hyperparams: self.hyperparams.clone(),
            seed: self.hyperparams.seed,
            loss_log: self.loss_log.clone(),
        };
        serde_json::to_string_pretty(&file).expect("model serializes")
    }

    pub fn from_json(text: &str) -> Result<Self, MilError> {
        let file: ModelFile = serde_json::from_str(text).map_err(|e| MilError::ModelFile(e.to_string()))?;
        if file.schema != MODEL_SCHEMA {
            return Err(MilError::ModelFile(format!("unsupported schema {}", file.schema)));
        }
        let w = file.weights;
        let params = MilParams { v: w.v, b_v: w.b_v, w: w.w, w1: w.w1, b1: w.b1, w2: w.w2, b2: w.b2 };
        let mut hyperparams = file.hyperparams;
        hyperparams.seed = file.seed;
        let mut model = MilModel::new(file.task, file.dims, params, hyperparams)?;
        model.loss_log = file.loss_log;
        Ok(model)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mil::init_params;
    use crate::rng;

    #[test]
    fn json_round_trip_exact() {
        let dims = MilDims { d: 5, h: 3, m: 4, c: 2 };
        let params = init_params(dims, &mut rng::seeded(1));
        let mut m = MilModel::new(Task::GradeRisk, dims, params, Hyperparams::default()).unwrap();
        m.loss_log = vec![0.693, 0.1 + 0.2, 1e-300];
        let text = m.to_json();
        assert!(text.contains("\"schema\": 1"));
        assert!(text.contains("\"W1\""));
        assert_eq!(MilModel::from_json(&text).unwrap(), m);
    }

    #[test]
    fn rejects_wrong_shapes() {
        let dims = MilDims { d: 2, h: 2, m: 2, c: 2 };
        let m = MilModel::zeros(Task::OsRisk, dims);
        let text = m.to_json().replace("\"d\": 2", "\"d\": 3");
        assert!(MilModel::from_json(&text).is_err());
        let text = m.to_json().replace("\"schema\": 1", "\"schema\": 9");
        assert!(MilModel::from_json(&text).is_err());
    }
}
