//! Small statistical helpers shared by the evaluator, the harness, and the
//! test suite: sample means with standard errors, binomial standard errors
//! for frequency estimates, and a Spearman rank-correlation trend test.

/// A Monte-Carlo estimate: sample mean plus its standard error.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct Estimate {
    pub value: f64,
    pub stderr: f64,
}

/// Sample mean of `xs`. Returns 0 for an empty slice.
pub fn mean(xs: &[f64]) -> f64 {
    if xs.is_empty() {
        return 0.0;
    }
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// Sample mean and its standard error (unbiased sample variance over n).
///
/// With fewer than two samples the spread is unobservable and the standard
/// error is reported as 0.
pub fn mean_and_stderr(xs: &[f64]) -> Estimate {
    let n = xs.len();
    let m = mean(xs);
    if n < 2 {
        return Estimate {
            value: m,
            stderr: 0.0,
        };
    }
    let var = xs.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (n as f64 - 1.0);
    Estimate {
        value: m,
        stderr: (var / n as f64).sqrt(),
    }
}

/// Standard error of an empirical frequency `p_hat` over `n` draws.
pub fn binomial_stderr(p_hat: f64, n: usize) -> f64 {
    if n == 0 {
        return 0.0;
    }
    (p_hat * (1.0 - p_hat) / n as f64).sqrt().max(0.0)
}

/// Fractional ranks of `xs` (1-based, ties receive the average rank).
pub fn ranks(xs: &[f64]) -> Vec<f64> {
    let n = xs.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| xs[a].partial_cmp(&xs[b]).expect("rank input must not contain NaN"));
    let mut out = vec![0.0; n];
    let mut i = 0;
    while i < n {
        // Find the run of values tied with xs[order[i]].
        let mut j = i;
        while j + 1 < n && xs[order[j + 1]] == xs[order[i]] {
            j += 1;
        }
        let avg_rank = (i + j) as f64 / 2.0 + 1.0;
        for k in i..=j {
            out[order[k]] = avg_rank;
        }
        i = j + 1;
    }
    out
}

/// Result of a Spearman rank-correlation trend test.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpearmanTest {
    /// Rank correlation coefficient in [-1, 1].
    pub rho: f64,
    /// t statistic of the test for association, `rho * sqrt((n-2)/(1-rho^2))`,
    /// approximately Student-t with n-2 degrees of freedom under the null.
    /// `+inf` when `rho` is exactly ±1.
    pub t: f64,
    /// Number of paired observations.
    pub n: usize,
}

/// Spearman rank correlation between `xs` and `ys` with the t-statistic of
/// the association test. Panics if the slices differ in length or have
/// fewer than 3 points (the test is undefined there).
pub fn spearman(xs: &[f64], ys: &[f64]) -> SpearmanTest {
    assert_eq!(xs.len(), ys.len(), "paired samples required");
    let n = xs.len();
    assert!(n >= 3, "spearman requires at least 3 points");
    let rx = ranks(xs);
    let ry = ranks(ys);
    let mx = mean(&rx);
    let my = mean(&ry);
    let mut sxy = 0.0;
    let mut sxx = 0.0;
    let mut syy = 0.0;
    for i in 0..n {
        let dx = rx[i] - mx;
        let dy = ry[i] - my;
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    let denom = (sxx * syy).sqrt();
    let rho = if denom == 0.0 { 0.0 } else { sxy / denom };
    let t = if rho.abs() >= 1.0 {
        f64::INFINITY * rho.signum()
    } else {
        rho * ((n as f64 - 2.0) / (1.0 - rho * rho)).sqrt()
    };
    SpearmanTest { rho, t, n }
}
