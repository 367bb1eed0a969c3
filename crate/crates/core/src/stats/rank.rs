use super::{CorrelationResult, StatsError};

/// Fractional ranks: tied values share the mean of their 1-based positions.
pub fn average_ranks(values: &[f64]) -> Vec<f64> {
    let plan = RankPlan::new(values);
    plan.ranks(&vec![1; values.len()])
}

/// Sorted order and tie runs of a vector, reusable across bootstrap
/// resamples expressed as per-row multiplicities.
#[derive(Debug, Clone)]
pub(crate) struct RankPlan {
    order: Vec<usize>,
    // run boundaries in `order`: run g covers order[runs[g]..runs[g + 1]]
    runs: Vec<usize>,
}

impl RankPlan {
    pub fn new(values: &[f64]) -> Self {
        let mut order: Vec<usize> = (0..values.len()).collect();
        order.sort_by(|&a, &b| values[a].total_cmp(&values[b]).then(a.cmp(&b)));
        let mut runs = vec![0];
        for i in 1..order.len() {
            if values[order[i]] != values[order[i - 1]] {
                runs.push(i);
            }
        }
        runs.push(order.len());
        RankPlan { order, runs }
    }

    /// Average ranks of the multiset in which row `i` appears `counts[i]`
    /// times. Rows with zero count get rank 0 and carry no weight.
    pub fn ranks(&self, counts: &[u32]) -> Vec<f64> {
        let mut out = vec![0.0; self.order.len()];
        let mut below = 0u64;
        for w in self.runs.windows(2) {
            let members = &self.order[w[0]..w[1]];
            let c: u64 = members.iter().map(|&i| counts[i] as u64).sum();
            if c == 0 {
                continue;
            }
            // positions below+1 ..= below+c, averaged
            let r = below as f64 + (c as f64 + 1.0) / 2.0;
            for &i in members {
                out[i] = r;
            }
            below += c;
        }
        out
    }
}

/// Pearson correlation of two weighted rank vectors, via
/// `ρ = (Vₐ + V_b − D) / (2·√(Vₐ·V_b))` with `D = Σ c·(rₐ − r_b)²`.
///
/// Ranks are multiples of 1/2, so every sum is exact in f64 and only the
/// final division rounds.
pub(crate) fn rank_correlation(
    ra: &[f64],
    rb: &[f64],
    counts: &[u32],
) -> Result<CorrelationResult, StatsError> {
    let total: u64 = counts.iter().map(|&c| c as u64).sum();
    let mid = (total as f64 + 1.0) / 2.0;
    let (mut va, mut vb, mut d) = (0.0, 0.0, 0.0);
    for ((&a, &b), &c) in ra.iter().zip(rb).zip(counts) {
        if c == 0 {
            continue;
        }
        let c = c as f64;
        va += c * (a - mid) * (a - mid);
        vb += c * (b - mid) * (b - mid);
        d += c * (a - b) * (a - b);
    }
    if va == 0.0 || vb == 0.0 {
        return Err(StatsError::DegenerateInput);
    }
    let rho = ((va + vb - d) / (2.0 * (va * vb).sqrt())).clamp(-1.0, 1.0);
    Ok(CorrelationResult {
        rho,
        n: total as usize,
    })
}

/// Spearman's ρ with average ranks for ties.
pub fn spearman(a: &[f64], b: &[f64]) -> Result<CorrelationResult, StatsError> {
    if a.len() != b.len() {
        return Err(StatsError::LengthMismatch(a.len(), b.len()));
    }
    if a.len() < 2 {
        return Err(StatsError::TooFew { need: 2, got: a.len() });
    }
    if a.iter().chain(b).any(|v| !v.is_finite()) {
        return Err(StatsError::NonFinite);
    }
    let ones = vec![1; a.len()];
    rank_correlation(&average_ranks(a), &average_ranks(b), &ones)
}
