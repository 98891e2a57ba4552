use super::model::{mil_gradients, Hyperparams, MilDims, MilModel, MilParams};
use super::{Bag, MilError, Task};
use crate::rng::{self, Prng, Rng};

/// Xavier-uniform draw for an `out`×`inp` weight matrix.
fn xavier(values: &mut [f64], inp: usize, out: usize, rng: &mut Prng) {
    let limit = (6.0 / (inp + out) as f64).sqrt();
    for v in values {
        *v = rng.random_range(-limit..limit);
    }
}

/// Seeded initial parameters: Xavier-uniform weights, zero biases.
pub fn init_params(dims: MilDims, rng: &mut Prng) -> MilParams {
    let MilDims { d, h, m, c } = dims;
    let mut p = MilParams::zeros(dims);
    xavier(&mut p.v, d, h, rng);
    xavier(&mut p.w, h, 1, rng);
    xavier(&mut p.w1, d, m, rng);
    xavier(&mut p.w2, m, c, rng);
    p
}

struct Adam {
    m: MilParams,
    v: MilParams,
    step: i32,
}

impl Adam {
    fn new(dims: MilDims) -> Self {
        Self { m: MilParams::zeros(dims), v: MilParams::zeros(dims), step: 0 }
    }

    /// One Adam update with decoupled weight decay.
    fn update(&mut self, params: &mut MilParams, grads: &MilParams, hp: &Hyperparams) {
        self.step += 1;
        let bc1 = 1.0 - hp.beta1.powi(self.step);
        let bc2 = 1.0 - hp.beta2.powi(self.step);
        for (((theta, g), m), v) in
            params.tensors_mut().into_iter().zip(grads.tensors()).zip(self.m.tensors_mut()).zip(self.v.tensors_mut())
        {
            for i in 0..theta.len() {
                m[i] = hp.beta1 * m[i] + (1.0 - hp.beta1) * g[i];
                v[i] = hp.beta2 * v[i] + (1.0 - hp.beta2) * g[i] * g[i];
                let m_hat = m[i] / bc1;
                let v_hat = v[i] / bc2;
                theta[i] -= hp.learning_rate * (m_hat / (v_hat.sqrt() + hp.adam_eps) + hp.weight_decay * theta[i]);
            }
        }
    }
}

/// Trains an attention-MIL model, one bag per optimizer step.
///
/// All randomness comes from one stream seeded by `hp.seed`: initialization
/// first, then one shuffle per epoch.
pub fn mil_train(bags: &[Bag], task: Task, hp: &Hyperparams) -> Result<MilModel, MilError> {
    let first = bags.first().ok_or(MilError::EmptyDataset)?;
    let d = first.dim();
    if let Some(b) = bags.iter().find(|b| b.dim() != d) {
        return Err(MilError::DimensionMismatch(format!("bag {} has width {}, expected {d}", b.slide_id, b.dim())));
    }
    let max_label = bags.iter().map(|b| b.label).max().unwrap_or(0);
    let c = hp.n_classes.unwrap_or(max_label + 1).max(2);
    if let Some(b) = bags.iter().find(|b| b.label >= c) {
        return Err(MilError::BadLabel { label: b.label, classes: c });
    }
    let mut classes: Vec<usize> = bags.iter().map(|b| b.label).collect();
    classes.sort_unstable();
    classes.dedup();
    if classes.len() < 2 {
        return Err(MilError::SingleClassDataset);
    }
    if hp.epochs == 0 {
        log::warn!("training with zero epochs returns the initialization");
    }

    let dims = MilDims { d, h: hp.attention_dim, m: hp.hidden_dim, c };
    let mut rng = rng::seeded(hp.seed);
    let params = init_params(dims, &mut rng);
    let mut model = MilModel::new(task, dims, params, hp.clone())?;
    let mut adam = Adam::new(dims);
    let mut order: Vec<usize> = (0..bags.len()).collect();
    for epoch in 0..hp.epochs {
        rng::shuffle(&mut order, &mut rng);
        let mut total = 0.0;
        for &i in &order {
            let (loss, grads) = mil_gradients(&bags[i], &model, bags[i].label)?;
            total += loss;
            adam.update(&mut model.params, &grads, hp);
        }
        if !model.params.is_finite() {
            return Err(MilError::NonFinite);
        }
        let mean = total / bags.len() as f64;
        log::debug!("epoch {epoch}: mean loss {mean}");
        model.loss_log.push(mean);
    }
    Ok(model)
}
