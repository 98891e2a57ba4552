use serde::{Deserialize, Serialize};

use super::{Bag, MilError, Task};

/// Probabilities are clamped to [PROB_CLAMP, 1 − PROB_CLAMP] inside the loss.
pub const PROB_CLAMP: f64 = 1e-7;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct MilDims {
    /// Patch feature width.
    pub d: usize,
    /// Attention hidden width.
    pub h: usize,
    /// Classifier hidden width.
    pub m: usize,
    /// Number of classes.
    #[serde(rename = "C")]
    pub c: usize,
}

/// Every trainable tensor of the model, stored row-major. Gradients share
/// this shape.
#[derive(Debug, Clone, PartialEq)]
pub struct MilParams {
    /// Attention projection, h×d.
    pub v: Vec<f64>,
    pub b_v: Vec<f64>,
    /// Attention scoring vector, length h.
    pub w: Vec<f64>,
    /// First classifier layer, m×d.
    pub w1: Vec<f64>,
    pub b1: Vec<f64>,
    /// Output layer, C×m.
    pub w2: Vec<f64>,
    pub b2: Vec<f64>,
}

impl MilParams {
    pub fn zeros(dims: MilDims) -> Self {
        let MilDims { d, h, m, c } = dims;
        Self {
            v: vec![0.0; h * d],
            b_v: vec![0.0; h],
            w: vec![0.0; h],
            w1: vec![0.0; m * d],
            b1: vec![0.0; m],
            w2: vec![0.0; c * m],
            b2: vec![0.0; c],
        }
    }

    pub const NAMES: [&'static str; 7] = ["V", "b_v", "w", "W1", "b1", "W2", "b2"];

    pub fn tensors(&self) -> [&Vec<f64>; 7] {
        [&self.v, &self.b_v, &self.w, &self.w1, &self.b1, &self.w2, &self.b2]
    }

    pub fn tensors_mut(&mut self) -> [&mut Vec<f64>; 7] {
        [&mut self.v, &mut self.b_v, &mut self.w, &mut self.w1, &mut self.b1, &mut self.w2, &mut self.b2]
    }

    pub fn len(&self) -> usize {
        self.tensors().iter().map(|t| t.len()).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn is_finite(&self) -> bool {
        self.tensors().iter().all(|t| t.iter().all(|v| v.is_finite()))
    }

    fn fits(&self, dims: MilDims) -> bool {
        let z = Self::zeros(dims);
        let expected = z.tensors().map(|t| t.len());
        self.tensors().iter().zip(expected).all(|(a, n)| a.len() == n)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Hyperparams {
    pub learning_rate: f64,
    pub epochs: usize,
    pub weight_decay: f64,
    pub seed: u64,
    pub attention_dim: usize,
    pub hidden_dim: usize,
    pub beta1: f64,
    pub beta2: f64,
    pub adam_eps: f64,
    /// Class count; inferred from the labels when absent.
    pub n_classes: Option<usize>,
}

impl Default for Hyperparams {
    fn default() -> Self {
        Self {
            learning_rate: 1e-3,
            epochs: 50,
            weight_decay: 1e-5,
            seed: 7,
            attention_dim: 32,
            hidden_dim: 32,
            beta1: 0.9,
            beta2: 0.999,
            adam_eps: 1e-8,
            n_classes: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MilModel {
    pub task: Task,
    pub dims: MilDims,
    pub params: MilParams,
    pub hyperparams: Hyperparams,
    /// Mean training loss per epoch.
    pub loss_log: Vec<f64>,
}

impl MilModel {
    pub fn new(task: Task, dims: MilDims, params: MilParams, hyperparams: Hyperparams) -> Result<Self, MilError> {
        if dims.d == 0 || dims.h == 0 || dims.m == 0 || dims.c < 2 {
            return Err(MilError::DimensionMismatch(format!("invalid dims {dims:?}")));
        }
        if !params.fits(dims) {
            return Err(MilError::DimensionMismatch("parameter shapes do not match dims".into()));
        }
        if !params.is_finite() {
            return Err(MilError::NonFinite);
        }
        Ok(Self { task, dims, params, hyperparams, loss_log: Vec::new() })
    }

    /// Model with every parameter zero.
    pub fn zeros(task: Task, dims: MilDims) -> Self {
        Self::new(task, dims, MilParams::zeros(dims), Hyperparams::default()).expect("zero params fit their dims")
    }
}

/// Slide-level prediction with per-patch attention.
#[derive(Debug, Clone, PartialEq)]
pub struct MilOutput {
    pub probs: Vec<f64>,
    /// Attention weight per bag row, in canonical bag order.
    pub attention: Vec<f64>,
}

/// Intermediate activations kept for the backward pass.
struct Trace {
    /// tanh(V h_k + b_v), n×h.
    t: Vec<f64>,
    attention: Vec<f64>,
    z: Vec<f64>,
    /// W1 z + b1 before the ReLU.
    q: Vec<f64>,
    probs: Vec<f64>,
}

/// Max-subtracted softmax.
pub fn softmax(v: &[f64]) -> Vec<f64> {
    let mut out = v.to_vec();
    softmax_in_place(&mut out);
    out
}

fn softmax_in_place(v: &mut [f64]) {
    let max = v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mut sum = 0.0;
    for x in v.iter_mut() {
        *x = (*x - max).exp();
        sum += *x;
    }
    for x in v.iter_mut() {
        *x /= sum;
    }
}

fn matvec(mat: &[f64], rows: usize, x: &[f64], bias: &[f64]) -> Vec<f64> {
    let cols = x.len();
    (0..rows).map(|r| bias[r] + mat[r * cols..(r + 1) * cols].iter().zip(x).map(|(a, b)| a * b).sum::<f64>()).collect()
}

fn check(bag: &Bag, model: &MilModel) -> Result<(), MilError> {
    if bag.dim() != model.dims.d {
        return Err(MilError::DimensionMismatch(format!(
            "bag {} has feature width {}, model expects {}",
            bag.slide_id,
            bag.dim(),
            model.dims.d
        )));
    }
    Ok(())
}

fn trace(bag: &Bag, model: &MilModel) -> Trace {
    let MilDims { h, m, c, .. } = model.dims;
    let p = &model.params;
    let n = bag.len();

    let mut t = Vec::with_capacity(n * h);
    let mut scores = Vec::with_capacity(n);
    for row in bag.rows() {
        let u = matvec(&p.v, h, row, &p.b_v);
        let tk: Vec<f64> = u.iter().map(|x| x.tanh()).collect();
        scores.push(tk.iter().zip(&p.w).map(|(a, b)| a * b).sum::<f64>());
        t.extend(tk);
    }
    softmax_in_place(&mut scores);
    let attention = scores;

    let mut z = vec![0.0; bag.dim()];
    for (row, &a) in bag.rows().zip(&attention) {
        for (zj, &x) in z.iter_mut().zip(row) {
            *zj += a * x;
        }
    }
    let q = matvec(&p.w1, m, &z, &p.b1);
    let r: Vec<f64> = q.iter().map(|&x| x.max(0.0)).collect();
    let mut probs = matvec(&p.w2, c, &r, &p.b2);
    softmax_in_place(&mut probs);
    Trace { t, attention, z, q, probs }
}

/// Attention-pooled forward pass.
///
/// sₖ = wᵀ tanh(V hₖ + b_v), a = softmax(s), z = Σ aₖ hₖ,
/// probs = softmax(W2 relu(W1 z + b1) + b2).
pub fn mil_forward(bag: &Bag, model: &MilModel) -> Result<MilOutput, MilError> {
    check(bag, model)?;
    let tr = trace(bag, model);
    Ok(MilOutput { probs: tr.probs, attention: tr.attention })
}

/// Cross-entropy −ln probs[label] with clamped probabilities.
pub fn mil_loss(output: &MilOutput, label: usize) -> Result<f64, MilError> {
    let p = *output.probs.get(label).ok_or(MilError::BadLabel { label, classes: output.probs.len() })?;
    Ok(-p.clamp(PROB_CLAMP, 1.0 - PROB_CLAMP).ln())
}

/// Loss and exact gradient of [`mil_loss`] with respect to every parameter.
pub fn mil_gradients(bag: &Bag, model: &MilModel, label: usize) -> Result<(f64, MilParams), MilError> {
    check(bag, model)?;
    let MilDims { d, h, m, c } = model.dims;
    if label >= c {
        return Err(MilError::BadLabel { label, classes: c });
    }
    let p = &model.params;
    let tr = trace(bag, model);
    let py = tr.probs[label];
    let loss = -py.clamp(PROB_CLAMP, 1.0 - PROB_CLAMP).ln();
    let mut g = MilParams::zeros(model.dims);
    // Inside the clamp region the loss is flat.
    if !(PROB_CLAMP..=1.0 - PROB_CLAMP).contains(&py) {
        return Ok((loss, g));
    }

    let g_logits: Vec<f64> = (0..c).map(|j| tr.probs[j] - if j == label { 1.0 } else { 0.0 }).collect();
    let r: Vec<f64> = tr.q.iter().map(|&x| x.max(0.0)).collect();
    for j in 0..c {
        g.b2[j] = g_logits[j];
        for k in 0..m {
            g.w2[j * m + k] = g_logits[j] * r[k];
        }
    }
    let g_q: Vec<f64> =
        (0..m).map(|k| if tr.q[k] > 0.0 { (0..c).map(|j| p.w2[j * m + k] * g_logits[j]).sum() } else { 0.0 }).collect();
    let mut g_z = vec![0.0; d];
    for k in 0..m {
        g.b1[k] = g_q[k];
        for i in 0..d {
            g.w1[k * d + i] = g_q[k] * tr.z[i];
            g_z[i] += p.w1[k * d + i] * g_q[k];
        }
    }

    // Through the attention-weighted mean and the softmax over patches.
    let g_a: Vec<f64> = bag.rows().map(|row| row.iter().zip(&g_z).map(|(x, gz)| x * gz).sum()).collect();
    let mean_ga: f64 = tr.attention.iter().zip(&g_a).map(|(a, ga)| a * ga).sum();
    for (k, row) in bag.rows().enumerate() {
        let g_s = tr.attention[k] * (g_a[k] - mean_ga);
        let tk = &tr.t[k * h..(k + 1) * h];
        for j in 0..h {
            g.w[j] += g_s * tk[j];
            let g_u = g_s * p.w[j] * (1.0 - tk[j] * tk[j]);
            g.b_v[j] += g_u;
            for (i, &x) in row.iter().enumerate() {
                g.v[j * d + i] += g_u * x;
            }
        }
    }
    Ok((loss, g))
}
