//! Paired and unpaired statistical tests, effect sizes, correlations, and
//! power-law fitting.
//!
//! Everything here is two-sided; direction is reported separately so callers
//! can present significance and direction independently. p-values come from
//! the hand-rolled special functions in [`special`] (no external stats
//! dependency).

pub mod battery;
pub mod special;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Which test produced a [`StatReport`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TestKind {
    PairedT,
    Wilcoxon,
    Mcnemar,
    WelchT,
    DagostinoK2,
}

impl std::fmt::Display for TestKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            TestKind::PairedT => "paired_t",
            TestKind::Wilcoxon => "wilcoxon",
            TestKind::Mcnemar => "mcnemar",
            TestKind::WelchT => "welch_t",
            TestKind::DagostinoK2 => "dagostino_k2",
        };
        f.write_str(s)
    }
}

/// Direction of an observed difference (group 1 = first member of each pair).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    Group1Larger,
    Group1Smaller,
    None,
}

/// Substantive conclusion attached by the metric battery.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Conclusion {
    Group1Larger,
    Group1Smaller,
    NoDifference,
    Inconclusive,
}

/// One test outcome, as serialized into stat_reports.json.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct StatReport {
    pub metric_name: String,
    pub test: TestKind,
    pub statistic: f64,
    pub p_value: f64,
    pub direction: Direction,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub effect_size: Option<f64>,
    pub n: usize,
    pub passes_bonferroni: bool,
    pub alpha_corrected: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub conclusion: Option<Conclusion>,
    /// Set when the test could not run (e.g. degenerate sample); such
    /// reports carry statistic 0 and p-value 1.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub skipped: Option<String>,
}

/// Continuous power-law MLE fit.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PowerLawFit {
    pub alpha: f64,
    pub sigma: f64,
    pub x_min: f64,
    pub n: usize,
}

pub fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// Unbiased sample variance (ddof = 1).
fn sample_var(xs: &[f64]) -> f64 {
    let m = mean(xs);
    xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (xs.len() as f64 - 1.0)
}

/// Mid-ranks (1-based, ties averaged).
pub fn mid_ranks(xs: &[f64]) -> Vec<f64> {
    let n = xs.len();
    let mut idx: Vec<usize> = (0..n).collect();
    idx.sort_by(|&a, &b| {
        xs[a]
            .partial_cmp(&xs[b])
            .expect("non-finite value in ranks")
    });
    let mut ranks = vec![0.0; n];
    let mut i = 0;
    while i < n {
        let mut j = i;
        while j + 1 < n && xs[idx[j + 1]] == xs[idx[i]] {
            j += 1;
        }
        let r = (i + j + 2) as f64 / 2.0;
        for &k in &idx[i..=j] {
            ranks[k] = r;
        }
        i = j + 1;
    }
    ranks
}

#[derive(Debug, Clone)]
pub struct PairedTResult {
    pub t: f64,
    pub p_two_sided: f64,
    pub direction: Direction,
    pub mean_diff: f64,
    pub n: usize,
}

/// Paired (one-sample) t-test on a vector of differences.
pub fn paired_t_test(diffs: &[f64]) -> Result<PairedTResult> {
    let n = diffs.len();
    if n < 2 {
        return Err(Error::Invalid(format!(
            "paired t-test requires n >= 2, got {n}"
        )));
    }
    let m = mean(diffs);
    let var = sample_var(diffs);
    if var == 0.0 {
        return Err(Error::Degenerate("all differences are equal".into()));
    }
    let t = m / (var.sqrt() / (n as f64).sqrt());
    let p = special::t_sf_two_sided(t, (n - 1) as f64);
    let direction = if m > 0.0 {
        Direction::Group1Larger
    } else if m < 0.0 {
        Direction::Group1Smaller
    } else {
        Direction::None
    };
    Ok(PairedTResult {
        t,
        p_two_sided: p,
        direction,
        mean_diff: m,
        n,
    })
}

#[derive(Debug, Clone)]
pub struct WilcoxonResult {
    /// min(W+, W-), the reported statistic.
    pub w: f64,
    pub w_plus: f64,
    pub w_minus: f64,
    pub p_two_sided: f64,
    /// Rank-biserial correlation, signed: (W+ - W-) / (W+ + W-).
    pub r_rb: f64,
    /// Number of nonzero differences actually ranked.
    pub n: usize,
    /// Whether the exact null distribution was enumerated.
    pub exact: bool,
}

/// Wilcoxon signed-rank test. Zero differences are dropped, tied magnitudes
/// get mid-ranks. Exact enumeration of the null distribution for n <= 25
/// (dynamic program over doubled ranks, so mid-ranks stay integral);
/// otherwise a normal approximation with tie and continuity corrections.
pub fn wilcoxon_signed_rank(diffs: &[f64]) -> Result<WilcoxonResult> {
    let nz: Vec<f64> = diffs.iter().copied().filter(|d| *d != 0.0).collect();
    if nz.is_empty() {
        return Err(Error::Degenerate("all differences are zero".into()));
    }
    let n = nz.len();
    let abs: Vec<f64> = nz.iter().map(|d| d.abs()).collect();
    let ranks = mid_ranks(&abs);
    let w_plus: f64 = nz
        .iter()
        .zip(&ranks)
        .filter(|(d, _)| **d > 0.0)
        .map(|(_, r)| *r)
        .sum();
    let total = n as f64 * (n as f64 + 1.0) / 2.0;
    let w_minus = total - w_plus;
    let w = w_plus.min(w_minus);
    let r_rb = (w_plus - w_minus) / total;

    let (p, exact) = if n <= 25 {
        (wilcoxon_exact_p(&ranks, w), true)
    } else {
        (wilcoxon_normal_p(&abs, &ranks, w), false)
    };
    Ok(WilcoxonResult {
        w,
        w_plus,
        w_minus,
        p_two_sided: p,
        r_rb,
        n,
        exact,
    })
}

/// Exact two-sided p = min(1, 2 * P(W+ <= w)) by counting sign assignments.
/// Ranks are doubled so mid-ranks (halves) become integers; the subset-sum
/// DP then counts, for every achievable W+ value, how many of the 2^n sign
/// assignments produce it.
fn wilcoxon_exact_p(ranks: &[f64], w: f64) -> f64 {
    let doubled: Vec<usize> = ranks.iter().map(|r| (2.0 * r).round() as usize).collect();
    let max_sum: usize = doubled.iter().sum();
    let mut counts = vec![0u64; max_sum + 1];
    counts[0] = 1;
    for &r in &doubled {
        for s in (r..=max_sum).rev() {
            counts[s] += counts[s - r];
        }
    }
    let w2 = (2.0 * w).round() as usize;
    let tail: u64 = counts[..=w2.min(max_sum)].iter().sum();
    let p = 2.0 * tail as f64 / (1u64 << ranks.len()) as f64;
    p.min(1.0)
}

/// Normal approximation with tie correction (on the ranked magnitudes) and
/// a 0.5 continuity correction toward the mean.
fn wilcoxon_normal_p(abs: &[f64], ranks: &[f64], w: f64) -> f64 {
    let n = ranks.len() as f64;
    let mn = n * (n + 1.0) / 4.0;
    let mut var = n * (n + 1.0) * (2.0 * n + 1.0) / 24.0;
    // tie correction: subtract (t^3 - t)/48 per group of t tied magnitudes
    let mut sorted = abs.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let mut i = 0;
    while i < sorted.len() {
        let mut j = i;
        while j + 1 < sorted.len() && sorted[j + 1] == sorted[i] {
            j += 1;
        }
        let t = (j - i + 1) as f64;
        var -= (t * t * t - t) / 48.0;
        i = j + 1;
    }
    let se = var.sqrt();
    if se == 0.0 {
        return 1.0;
    }
    let d = 0.5 * (w - mn).signum();
    let z = (w - mn - d) / se;
    (2.0 * special::normal_sf(z.abs())).min(1.0)
}

#[derive(Debug, Clone)]
pub struct McNemarResult {
    pub statistic: f64,
    pub p_two_sided: f64,
    pub exact: bool,
}

/// McNemar's test on discordant-pair counts b and c. Exact binomial for
/// b + c < 25, continuity-corrected chi-squared (1 dof) otherwise.
pub fn mcnemar(b: u64, c: u64) -> Result<McNemarResult> {
    let n = b + c;
    if n == 0 {
        return Err(Error::NoDiscordantPairs);
    }
    if n < 25 {
        let k = b.min(c);
        // tail counts are exact in u64 for n < 25
        let mut tail: u64 = 0;
        let mut binom: u64 = 1; // C(n, 0)
        for i in 0..=k {
            tail += binom;
            binom = binom * (n - i) / (i + 1); // C(n, i+1)
        }
        let p = (2.0 * tail as f64 / (1u64 << n) as f64).min(1.0);
        Ok(McNemarResult {
            statistic: k as f64,
            p_two_sided: p,
            exact: true,
        })
    } else {
        let diff = b.abs_diff(c) as f64;
        let stat = (diff - 1.0).powi(2) / n as f64;
        let p = special::chi2_sf(stat, 1.0);
        Ok(McNemarResult {
            statistic: stat,
            p_two_sided: p,
            exact: false,
        })
    }
}

#[derive(Debug, Clone)]
pub struct K2Result {
    pub k2: f64,
    pub p: f64,
    pub n: usize,
}

/// D'Agostino's K² omnibus normality test (skewness + kurtosis transforms).
pub fn dagostino_k2(sample: &[f64]) -> Result<K2Result> {
    let n = sample.len();
    if n < 20 {
        return Err(Error::Invalid(format!(
            "dagostino_k2 requires n >= 20 for valid transformations, got {n}"
        )));
    }
    let nf = n as f64;
    let m = mean(sample);
    let m2 = sample.iter().map(|x| (x - m).powi(2)).sum::<f64>() / nf;
    if m2 == 0.0 {
        return Err(Error::Degenerate("zero variance sample".into()));
    }
    let m3 = sample.iter().map(|x| (x - m).powi(3)).sum::<f64>() / nf;
    let m4 = sample.iter().map(|x| (x - m).powi(4)).sum::<f64>() / nf;
    let g1 = m3 / m2.powf(1.5);
    let b2 = m4 / (m2 * m2);

    // skewness transform (D'Agostino 1970)
    let y = g1 * (((nf + 1.0) * (nf + 3.0)) / (6.0 * (nf - 2.0))).sqrt();
    let beta2 = 3.0 * (nf * nf + 27.0 * nf - 70.0) * (nf + 1.0) * (nf + 3.0)
        / ((nf - 2.0) * (nf + 5.0) * (nf + 7.0) * (nf + 9.0));
    let w2 = -1.0 + (2.0 * (beta2 - 1.0)).sqrt();
    let delta = 1.0 / (0.5 * w2.ln()).sqrt();
    let alpha = (2.0 / (w2 - 1.0)).sqrt();
    let y = if y == 0.0 { 1.0 } else { y };
    let z1 = delta * (y / alpha + ((y / alpha).powi(2) + 1.0).sqrt()).ln();

    // kurtosis transform (Anscombe & Glynn 1983)
    let e = 3.0 * (nf - 1.0) / (nf + 1.0);
    let var_b2 =
        24.0 * nf * (nf - 2.0) * (nf - 3.0) / ((nf + 1.0).powi(2) * (nf + 3.0) * (nf + 5.0));
    let x1 = (b2 - e) / var_b2.sqrt();
    let sqrt_beta1 = 6.0 * (nf * nf - 5.0 * nf + 2.0) / ((nf + 7.0) * (nf + 9.0))
        * ((6.0 * (nf + 3.0) * (nf + 5.0)) / (nf * (nf - 2.0) * (nf - 3.0))).sqrt();
    let a = 6.0
        + 8.0 / sqrt_beta1 * (2.0 / sqrt_beta1 + (1.0 + 4.0 / (sqrt_beta1 * sqrt_beta1)).sqrt());
    let term1 = 1.0 - 2.0 / (9.0 * a);
    let denom = 1.0 + x1 * (2.0 / (a - 4.0)).sqrt();
    let term2 = denom.signum() * ((1.0 - 2.0 / a) / denom.abs()).cbrt();
    let z2 = (term1 - term2) / (2.0 / (9.0 * a)).sqrt();

    let k2 = z1 * z1 + z2 * z2;
    let p = special::chi2_sf(k2, 2.0);
    Ok(K2Result { k2, p, n })
}

/// Bonferroni-corrected significance threshold.
pub fn bonferroni(alpha: f64, m: usize) -> f64 {
    alpha / m as f64
}

/// Pearson product-moment correlation.
pub fn pearson(x: &[f64], y: &[f64]) -> Result<f64> {
    if x.len() != y.len() {
        return Err(Error::Invalid("correlation inputs differ in length".into()));
    }
    let n = x.len();
    if n < 3 {
        return Err(Error::Invalid(format!(
            "correlation requires n >= 3, got {n}"
        )));
    }
    let mx = mean(x);
    let my = mean(y);
    let mut sxy = 0.0;
    let mut sxx = 0.0;
    let mut syy = 0.0;
    for (a, b) in x.iter().zip(y) {
        sxy += (a - mx) * (b - my);
        sxx += (a - mx).powi(2);
        syy += (b - my).powi(2);
    }
    if sxx == 0.0 || syy == 0.0 {
        return Err(Error::Degenerate(
            "zero variance input to correlation".into(),
        ));
    }
    Ok(sxy / (sxx * syy).sqrt())
}

/// Spearman rank correlation: Pearson applied to mid-ranks.
pub fn spearman(x: &[f64], y: &[f64]) -> Result<f64> {
    pearson(&mid_ranks(x), &mid_ranks(y))
}

#[derive(Debug, Clone)]
pub struct WelchTResult {
    pub t: f64,
    pub df: f64,
    pub p_two_sided: f64,
}

/// Welch's unequal-variance t-test for two independent samples.
pub fn welch_t_test(x: &[f64], y: &[f64]) -> Result<WelchTResult> {
    if x.len() < 2 || y.len() < 2 {
        return Err(Error::Invalid(
            "welch t-test requires n >= 2 in both groups".into(),
        ));
    }
    let (nx, ny) = (x.len() as f64, y.len() as f64);
    let vx = sample_var(x) / nx;
    let vy = sample_var(y) / ny;
    if vx + vy == 0.0 {
        return Err(Error::Degenerate("zero variance in both groups".into()));
    }
    let t = (mean(x) - mean(y)) / (vx + vy).sqrt();
    let df = (vx + vy).powi(2) / (vx * vx / (nx - 1.0) + vy * vy / (ny - 1.0));
    let p = special::t_sf_two_sided(t, df);
    Ok(WelchTResult {
        t,
        df,
        p_two_sided: p,
    })
}

/// Continuous power-law MLE: alpha = 1 + n / sum ln(x_i / x_min).
pub fn powerlaw_fit(sample: &[f64], x_min: f64) -> Result<PowerLawFit> {
    if x_min <= 0.0 {
        return Err(Error::Invalid("x_min must be positive".into()));
    }
    let n = sample.len();
    if n < 10 {
        return Err(Error::Invalid(format!(
            "power-law fit requires n >= 10, got {n}"
        )));
    }
    let mut log_sum = 0.0;
    for &x in sample {
        if x < x_min {
            return Err(Error::Invalid(format!(
                "sample value {x} below x_min {x_min}"
            )));
        }
        log_sum += (x / x_min).ln();
    }
    if log_sum == 0.0 {
        return Err(Error::Degenerate("all sample values equal x_min".into()));
    }
    let alpha = 1.0 + n as f64 / log_sum;
    let sigma = (alpha - 1.0) / (n as f64).sqrt();
    Ok(PowerLawFit {
        alpha,
        sigma,
        x_min,
        n,
    })
}
