use super::{SurvivalError, SurvivalSample};

/// Harrell's concordance index.
///
/// A pair (i, j) is permissible when subject i has an observed event and
/// tᵢ < tⱼ; equal times never form a pair. It is concordant when
/// riskᵢ > riskⱼ; tied risks count one half. Runs in O(n log n) using a
/// Fenwick tree over risk ranks.
pub fn c_index(risk: &[f64], samples: &[SurvivalSample]) -> Result<f64, SurvivalError> {
    if risk.len() != samples.len() {
        return Err(SurvivalError::LengthMismatch(format!("{} risks vs {} samples", risk.len(), samples.len())));
    }
    if risk.iter().any(|r| r.is_nan()) {
        return Err(SurvivalError::InvalidSample("NaN risk score".into()));
    }
    let n = risk.len();

    // Dense ranks of the risk scores, 1-based.
    let mut by_risk: Vec<usize> = (0..n).collect();
    by_risk.sort_by(|&a, &b| risk[a].total_cmp(&risk[b]));
    let mut rank = vec![0usize; n];
    let mut r = 0;
    for (k, &i) in by_risk.iter().enumerate() {
        if k == 0 || risk[i] != risk[by_risk[k - 1]] {
            r += 1;
        }
        rank[i] = r;
    }
    let mut tree = Fenwick::new(r);

    let mut by_time: Vec<usize> = (0..n).collect();
    by_time.sort_by(|&a, &b| samples[b].time.total_cmp(&samples[a].time));

    let (mut concordant, mut tied, mut permissible) = (0u64, 0u64, 0u64);
    let mut start = 0;
    while start < n {
        let t = samples[by_time[start]].time;
        let mut end = start;
        while end < n && samples[by_time[end]].time == t {
            end += 1;
        }
        let group = &by_time[start..end];
        for &i in group.iter().filter(|&&i| samples[i].event) {
            let below = tree.prefix(rank[i] - 1);
            let equal = tree.prefix(rank[i]) - below;
            concordant += below;
            tied += equal;
            permissible += tree.total();
        }
        for &i in group {
            tree.add(rank[i]);
        }
        start = end;
    }
    if permissible == 0 {
        return Err(SurvivalError::NoPermissiblePairs);
    }
    Ok((concordant as f64 + 0.5 * tied as f64) / permissible as f64)
}

struct Fenwick {
    counts: Vec<u64>,
    total: u64,
}

impl Fenwick {
    fn new(size: usize) -> Self {
        Self { counts: vec![0; size + 1], total: 0 }
    }

    fn add(&mut self, mut i: usize) {
        self.total += 1;
        while i < self.counts.len() {
            self.counts[i] += 1;
            i += i & i.wrapping_neg();
        }
    }

    fn prefix(&self, mut i: usize) -> u64 {
        let mut s = 0;
        while i > 0 {
            s += self.counts[i];
            i -= i & i.wrapping_neg();
        }
        s
    }

    fn total(&self) -> u64 {
        self.total
    }
}
