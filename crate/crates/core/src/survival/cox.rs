use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use super::special::normal_two_sided;
use super::{SurvivalError, SurvivalSample};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoxOptions {
    pub max_iter: usize,
    /// Converged once successive log-likelihoods differ by less than this.
    pub tol: f64,
    /// Bound on |beta_j · sd_j| before the fit is declared separated.
    pub separation_limit: f64,
}

impl Default for CoxOptions {
    fn default() -> Self {
        Self { max_iter: 100, tol: 1e-9, separation_limit: 20.0 }
    }
}

/// Standardized standard errors above this mark a diverging coefficient.
const MAX_STANDARDIZED_SE: f64 = 1e3;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BaselinePoint {
    pub t: f64,
    pub cumhaz: f64,
}

/// Fitted proportional-hazards model. Covariates are centered at `means`
/// internally; `baseline_cumhaz` is the Breslow estimate for a subject at the
/// means.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoxModel {
    pub beta: Vec<f64>,
    pub covariance: Vec<Vec<f64>>,
    pub loglik: f64,
    pub loglik_null: f64,
    pub iterations: usize,
    pub means: Vec<f64>,
    pub baseline_cumhaz: Vec<BaselinePoint>,
    pub max_follow_up: f64,
    pub n: usize,
    pub events: usize,
}

impl CoxModel {
    pub fn se(&self, j: usize) -> f64 {
        self.covariance[j][j].sqrt()
    }

    pub fn z(&self, j: usize) -> f64 {
        self.beta[j] / self.se(j)
    }

    pub fn wald_p(&self, j: usize) -> f64 {
        normal_two_sided(self.z(j))
    }

    /// β·(x − x̄).
    pub fn linear_predictor(&self, x: &[f64]) -> f64 {
        self.beta.iter().zip(x).zip(&self.means).map(|((b, x), m)| b * (x - m)).sum()
    }

    /// Left-continuous Λ₀(t): jumps at event times strictly before `t`.
    pub fn cumhaz_at(&self, t: f64) -> f64 {
        cumhaz_left(&self.baseline_cumhaz, t)
    }
}

pub(crate) fn cumhaz_left(baseline: &[BaselinePoint], t: f64) -> f64 {
    let k = baseline.partition_point(|p| p.t < t);
    if k == 0 {
        0.0
    } else {
        baseline[k - 1].cumhaz
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HazardRatioResult {
    pub hr: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub p_value: f64,
    pub beta: f64,
    pub se: f64,
}

struct Design {
    /// Centered covariates, one row per subject, ordered by descending time.
    x: Vec<Vec<f64>>,
    time: Vec<f64>,
    event: Vec<bool>,
    p: usize,
}

impl Design {
    fn new(samples: &[SurvivalSample], means: &[f64]) -> Self {
        let mut order: Vec<usize> = (0..samples.len()).collect();
        order.sort_by(|&a, &b| samples[b].time.total_cmp(&samples[a].time));
        let x = order.iter().map(|&i| samples[i].covariates.iter().zip(means).map(|(v, m)| v - m).collect()).collect();
        Design {
            x,
            time: order.iter().map(|&i| samples[i].time).collect(),
            event: order.iter().map(|&i| samples[i].event).collect(),
            p: means.len(),
        }
    }

    /// Efron log partial likelihood with gradient and observed information.
    fn evaluate(&self, beta: &[f64]) -> (f64, DVector<f64>, DMatrix<f64>) {
        let p = self.p;
        let eta: Vec<f64> = self.x.iter().map(|x| dot(x, beta)).collect();
        let shift = eta.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let risk: Vec<f64> = eta.iter().map(|e| (e - shift).exp()).collect();

        let mut ll = 0.0;
        let mut grad = DVector::zeros(p);
        let mut info = DMatrix::zeros(p, p);
        let mut s0 = 0.0;
        let mut s1 = DVector::zeros(p);
        let mut s2 = DMatrix::zeros(p, p);
        let n = self.time.len();
        let mut i = 0;
        while i < n {
            let t = self.time[i];
            let mut d = 0usize;
            let mut d0 = 0.0;
            let mut d1 = DVector::zeros(p);
            let mut d2 = DMatrix::zeros(p, p);
            while i < n && self.time[i] == t {
                let xi = DVector::from_column_slice(&self.x[i]);
                let r = risk[i];
                s0 += r;
                s1.axpy(r, &xi, 1.0);
                s2.ger(r, &xi, &xi, 1.0);
                if self.event[i] {
                    d += 1;
                    d0 += r;
                    d1.axpy(r, &xi, 1.0);
                    d2.ger(r, &xi, &xi, 1.0);
                    ll += eta[i];
                    grad += &xi;
                }
                i += 1;
            }
            for l in 0..d {
                let f = l as f64 / d as f64;
                let a0 = s0 - f * d0;
                let a1 = &s1 - &d1 * f;
                let a2 = &s2 - &d2 * f;
                ll -= a0.ln() + shift;
                grad.axpy(-1.0 / a0, &a1, 1.0);
                info += a2 / a0 - (&a1 * a1.transpose()) / (a0 * a0);
            }
        }
        (ll, grad, info)
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn column_stats(samples: &[SurvivalSample], p: usize) -> (Vec<f64>, Vec<f64>) {
    let n = samples.len() as f64;
    let means: Vec<f64> = (0..p).map(|j| samples.iter().map(|s| s.covariates[j]).sum::<f64>() / n).collect();
    let sds = (0..p)
        .map(|j| {
            let v = samples.iter().map(|s| (s.covariates[j] - means[j]).powi(2)).sum::<f64>() / n;
            v.sqrt()
        })
        .collect();
    (means, sds)
}

/// Log partial likelihood (Efron ties) at `beta` on uncentered covariates.
pub fn partial_loglik(samples: &[SurvivalSample], beta: &[f64]) -> f64 {
    let p = beta.len();
    Design::new(samples, &vec![0.0; p]).evaluate(beta).0
}

pub fn cox_fit(samples: &[SurvivalSample]) -> Result<CoxModel, SurvivalError> {
    cox_fit_with(samples, &CoxOptions::default())
}

/// Newton-Raphson maximization of the Efron partial likelihood with step
/// halving.
pub fn cox_fit_with(samples: &[SurvivalSample], opts: &CoxOptions) -> Result<CoxModel, SurvivalError> {
    let first = samples.first().ok_or(SurvivalError::EmptyInput)?;
    let p = first.covariates.len();
    if p == 0 {
        return Err(SurvivalError::InvalidSample("no covariates".into()));
    }
    for s in samples {
        s.validate()?;
        if s.covariates.len() != p {
            return Err(SurvivalError::LengthMismatch(format!(
                "expected {p} covariates, found {}",
                s.covariates.len()
            )));
        }
    }
    let events = samples.iter().filter(|s| s.event).count();
    if events < 2 {
        return Err(SurvivalError::TooFewEvents { needed: 2, found: events });
    }
    let (means, sds) = column_stats(samples, p);
    for (j, (&sd, &m)) in sds.iter().zip(&means).enumerate() {
        if !(sd > 1e-12 * m.abs().max(1.0)) {
            return Err(SurvivalError::ConstantCovariate(j));
        }
    }

    let design = Design::new(samples, &means);
    let mut beta = vec![0.0; p];
    let (mut ll, mut grad, mut info) = design.evaluate(&beta);
    let loglik_null = ll;
    let mut iterations = 0;
    let mut converged = false;
    while iterations < opts.max_iter {
        iterations += 1;
        let step = solve(&info, &grad)?;
        let mut scale = 1.0;
        let mut candidate: Vec<f64> = beta.iter().zip(step.iter()).map(|(b, s)| b + s).collect();
        let mut next = design.evaluate(&candidate);
        let mut halvings = 0;
        // Near the optimum a full Newton step can lose a few ulps of
        // log-likelihood to rounding; halving on that noise stalls the fit.
        let slack = 1e-11 * (1.0 + ll.abs());
        while !(next.0 >= ll - slack) && halvings < 40 {
            scale *= 0.5;
            candidate = beta.iter().zip(step.iter()).map(|(b, s)| b + scale * s).collect();
            next = design.evaluate(&candidate);
            halvings += 1;
        }
        if let Some(j) = (0..p).find(|&j| (candidate[j] * sds[j]).abs() > opts.separation_limit) {
            return Err(SurvivalError::Separation(j));
        }
        let delta = (next.0 - ll).abs();
        beta = candidate;
        (ll, grad, info) = next;
        if delta < opts.tol {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(SurvivalError::NonConvergence(opts.max_iter));
    }

    let cov = info.clone().try_inverse().ok_or(SurvivalError::SingularInformation)?;
    // A likelihood that keeps rising toward infinity can still pass the
    // log-likelihood tolerance; its information has then all but vanished.
    if let Some(j) = (0..p).find(|&j| !(cov[(j, j)].sqrt() * sds[j] <= MAX_STANDARDIZED_SE)) {
        return Err(SurvivalError::Separation(j));
    }
    let covariance: Vec<Vec<f64>> =
        (0..p).map(|a| (0..p).map(|b| 0.5 * (cov[(a, b)] + cov[(b, a)])).collect()).collect();

    Ok(CoxModel {
        baseline_cumhaz: breslow(&design, &beta),
        beta,
        covariance,
        loglik: ll,
        loglik_null,
        iterations,
        means,
        max_follow_up: samples.iter().map(|s| s.time).fold(0.0, f64::max),
        n: samples.len(),
        events,
    })
}

fn solve(info: &DMatrix<f64>, grad: &DVector<f64>) -> Result<DVector<f64>, SurvivalError> {
    if let Some(ch) = info.clone().cholesky() {
        return Ok(ch.solve(grad));
    }
    info.clone().lu().solve(grad).ok_or(SurvivalError::SingularInformation)
}

/// Breslow cumulative baseline hazard at the centered covariates.
fn breslow(design: &Design, beta: &[f64]) -> Vec<BaselinePoint> {
    let risk: Vec<f64> = design.x.iter().map(|x| dot(x, beta).exp()).collect();
    let n = risk.len();
    let mut jumps = Vec::new();
    let mut s0 = 0.0;
    let mut i = 0;
    while i < n {
        let t = design.time[i];
        let mut d = 0usize;
        while i < n && design.time[i] == t {
            s0 += risk[i];
            d += design.event[i] as usize;
            i += 1;
        }
        if d > 0 {
            jumps.push((t, d as f64 / s0));
        }
    }
    jumps.reverse();
    let mut acc = 0.0;
    jumps
        .into_iter()
        .map(|(t, h)| {
            acc += h;
            BaselinePoint { t, cumhaz: acc }
        })
        .collect()
}

/// Univariate Cox fit on a group indicator (1 = `group_a`): hr = exp(β) with
/// a Wald 95% interval and p-value.
pub fn hazard_ratio_groups(
    group_a: &[SurvivalSample],
    group_b: &[SurvivalSample],
) -> Result<HazardRatioResult, SurvivalError> {
    if group_a.is_empty() || group_b.is_empty() {
        return Err(SurvivalError::EmptyGroup);
    }
    let samples: Vec<SurvivalSample> = group_a
        .iter()
        .map(|s| SurvivalSample::new(s.time, s.event, vec![1.0]))
        .chain(group_b.iter().map(|s| SurvivalSample::new(s.time, s.event, vec![0.0])))
        .collect();
    let m = cox_fit(&samples)?;
    let (beta, se) = (m.beta[0], m.se(0));
    Ok(HazardRatioResult {
        hr: beta.exp(),
        ci_low: (beta - 1.96 * se).exp(),
        ci_high: (beta + 1.96 * se).exp(),
        p_value: m.wald_p(0),
        beta,
        se,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::{self, Rng};

    fn s(t: f64, e: bool, x: &[f64]) -> SurvivalSample {
        SurvivalSample::new(t, e, x.to_vec())
    }

    /// Direct Breslow-form partial likelihood for tie-free data.
    fn explicit_loglik(data: &[SurvivalSample], b: f64) -> f64 {
        data.iter()
            .filter(|d| d.event)
            .map(|d| {
                let denom: f64 = data.iter().filter(|r| r.time >= d.time).map(|r| (b * r.covariates[0]).exp()).sum();
                b * d.covariates[0] - denom.ln()
            })
            .sum()
    }

    #[test]
    fn matches_grid_maximizer_on_small_example() {
        let data = vec![
            s(1.0, true, &[1.0]),
            s(2.0, true, &[0.0]),
            s(3.0, true, &[1.0]),
            s(4.0, false, &[1.0]),
            s(5.0, true, &[0.0]),
            s(6.0, true, &[0.0]),
        ];
        let m = cox_fit(&data).unwrap();
        let mut best = (f64::NEG_INFINITY, 0.0);
        for k in -100_000..=100_000 {
            let b = k as f64 * 1e-4;
            let l = explicit_loglik(&data, b);
            if l > best.0 {
                best = (l, b);
            }
        }
        assert!((m.beta[0] - best.1).abs() < 2e-4, "{} vs {}", m.beta[0], best.1);
        assert!(m.loglik >= best.0 - 1e-8);
        assert!(m.loglik >= m.loglik_null);
    }

    #[test]
    fn efron_ties_hand_value() {
        // Two tied deaths at t=1 with risks e^b and 1, one survivor with risk 1.
        let data = vec![s(1.0, true, &[1.0]), s(1.0, true, &[0.0]), s(2.0, false, &[0.0]), s(3.0, true, &[1.0])];
        let b = 0.7f64;
        let r = [b.exp(), 1.0, 1.0, b.exp()];
        let s0 = r.iter().sum::<f64>();
        let d0 = r[0] + r[1];
        let expected = b - s0.ln() - (s0 - 0.5 * d0).ln() + b - r[3].ln();
        assert!((partial_loglik(&data, &[b]) - expected).abs() < 1e-12);
    }

    #[test]
    fn scale_and_shift_equivariance() {
        let mut g = rng::seeded(11);
        let data: Vec<SurvivalSample> = (0..60)
            .map(|_| {
                let x: f64 = g.random_range(-1.0..1.0);
                let t = -g.random::<f64>().ln() / (0.1 * (0.8 * x).exp());
                s(t + 1e-3, g.random::<f64>() < 0.8, &[x, g.random_range(0.0..3.0)])
            })
            .collect();
        let base = cox_fit(&data).unwrap();
        let c = 3.5;
        let moved: Vec<SurvivalSample> =
            data.iter().map(|d| s(d.time, d.event, &[d.covariates[0] * c + 10.0, d.covariates[1] - 4.0])).collect();
        let m = cox_fit(&moved).unwrap();
        assert!((m.beta[0] - base.beta[0] / c).abs() < 1e-8);
        assert!((m.beta[1] - base.beta[1]).abs() < 1e-8);
        assert!((m.z(0) - base.z(0)).abs() < 1e-6);
        let cov = &m.covariance;
        assert_eq!(cov[0][1], cov[1][0]);
        assert!(cov[0][0] > 0.0 && cov[0][0] * cov[1][1] >= cov[0][1] * cov[0][1]);
    }

    #[test]
    fn error_paths() {
        let one_event = vec![s(1.0, true, &[1.0]), s(2.0, false, &[0.0])];
        assert!(matches!(cox_fit(&one_event), Err(SurvivalError::TooFewEvents { .. })));
        let constant = vec![s(1.0, true, &[2.0]), s(2.0, true, &[2.0]), s(3.0, false, &[2.0])];
        assert_eq!(cox_fit(&constant).unwrap_err(), SurvivalError::ConstantCovariate(0));
        // All treated subjects die before any control: monotone likelihood.
        let separated = vec![s(1.0, true, &[1.0]), s(2.0, true, &[1.0]), s(3.0, true, &[0.0]), s(4.0, true, &[0.0])];
        assert!(matches!(cox_fit(&separated), Err(SurvivalError::Separation(0))));
    }

    #[test]
    fn breslow_hand_values() {
        let data = vec![
            s(1.0, true, &[0.0]),
            s(2.0, true, &[1.0]),
            s(3.0, false, &[0.0]),
            s(4.0, true, &[1.0]),
            s(5.0, false, &[0.0]),
        ];
        let m = cox_fit(&data).unwrap();
        let b = m.beta[0];
        let xbar = 0.4;
        let r = |x: f64| (b * (x - xbar)).exp();
        let h1 = 1.0 / (r(0.0) * 3.0 + r(1.0) * 2.0);
        let h2 = 1.0 / (r(0.0) * 2.0 + r(1.0) * 2.0);
        let h4 = 1.0 / (r(0.0) + r(1.0));
        let expect = [h1, h1 + h2, h1 + h2 + h4];
        for (p, e) in m.baseline_cumhaz.iter().zip(expect) {
            assert!((p.cumhaz - e).abs() < 1e-12);
        }
        assert_eq!(m.cumhaz_at(1.0), 0.0);
        assert!((m.cumhaz_at(1.5) - h1).abs() < 1e-12);
        assert!((m.cumhaz_at(4.5) - expect[2]).abs() < 1e-12);
    }

    #[test]
    fn hazard_ratio_swap_and_null() {
        let a = vec![s(1.0, true, &[]), s(3.0, true, &[]), s(5.0, false, &[]), s(6.0, true, &[])];
        let b = vec![s(2.0, true, &[]), s(4.0, false, &[]), s(7.0, true, &[]), s(9.0, true, &[])];
        let ab = hazard_ratio_groups(&a, &b).unwrap();
        let ba = hazard_ratio_groups(&b, &a).unwrap();
        assert!((ab.hr * ba.hr - 1.0).abs() < 1e-9);
        assert!(ab.ci_low <= ab.hr && ab.hr <= ab.ci_high);
        let same = hazard_ratio_groups(&a, &a).unwrap();
        assert!(same.beta.abs() < 1e-6);
        assert!((same.p_value - 1.0).abs() < 1e-6);
    }
}
