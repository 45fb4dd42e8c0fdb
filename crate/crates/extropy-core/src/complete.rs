//! Complete-data extropy estimators.
//!
//! The two headline estimators are degree-2 U-statistics with min/max
//! kernels, evaluated in `O(n log n)` through their order-statistic linear
//! forms:
//!
//! - cumulative residual extropy: `T1 = -(1/(n(n-1))) sum_i (n-i) X_(i)`,
//!   identical to the pairwise form `-(1/(n(n-1))) sum_{i<j} min(Xi, Xj)`;
//! - negative cumulative extropy: `T2 = (1/(n(n-1))) sum_i (i-1) X_(i)`.
//!
//! Alongside them live the plug-in step-integral baselines and the dynamic
//! and weighted variants, all through the same min/max pair
//! representations restricted or squared as the measure requires.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sample::Sample;
use crate::sum::Accumulator;

/// Which extropy measure an estimate refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Measure {
    Cre,
    Ce,
    CrePlugin,
    CePlugin,
    DynSurvExtropy,
    DynCumExtropy,
    WSurvExtropy,
    WCumExtropy,
    WDynSurvExtropy,
    WDynCumExtropy,
}

impl Measure {
    /// Stable kebab-case identifier used in CLI flags and reports.
    pub fn as_str(&self) -> &'static str {
        match self {
            Measure::Cre => "cre",
            Measure::Ce => "ce",
            Measure::CrePlugin => "cre-plugin",
            Measure::CePlugin => "ce-plugin",
            Measure::DynSurvExtropy => "dyn-surv",
            Measure::DynCumExtropy => "dyn-cum",
            Measure::WSurvExtropy => "w-surv",
            Measure::WCumExtropy => "w-cum",
            Measure::WDynSurvExtropy => "w-dyn-surv",
            Measure::WDynCumExtropy => "w-dyn-cum",
        }
    }

    /// Whether the measure needs a threshold argument.
    pub fn is_dynamic(&self) -> bool {
        matches!(
            self,
            Measure::DynSurvExtropy
                | Measure::DynCumExtropy
                | Measure::WDynSurvExtropy
                | Measure::WDynCumExtropy
        )
    }
}

impl std::fmt::Display for Measure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for Measure {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "cre" => Ok(Measure::Cre),
            "ce" => Ok(Measure::Ce),
            "cre-plugin" => Ok(Measure::CrePlugin),
            "ce-plugin" => Ok(Measure::CePlugin),
            "dyn-surv" => Ok(Measure::DynSurvExtropy),
            "dyn-cum" => Ok(Measure::DynCumExtropy),
            "w-surv" => Ok(Measure::WSurvExtropy),
            "w-cum" => Ok(Measure::WCumExtropy),
            "w-dyn-surv" => Ok(Measure::WDynSurvExtropy),
            "w-dyn-cum" => Ok(Measure::WDynCumExtropy),
            other => Err(format!("unknown measure `{other}`")),
        }
    }
}

/// How an estimate was computed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Method {
    /// Exact pair-kernel U-statistic on complete data.
    UStatistic,
    /// Plug-in step integral of the empirical distribution.
    PlugIn,
    /// IPCW U-statistic with Kaplan-Meier censoring weights.
    IpcwUStatistic,
    /// IPCW U-statistic with an externally supplied censoring survival.
    IpcwOracleWeights,
}

impl Method {
    pub fn as_str(&self) -> &'static str {
        match self {
            Method::UStatistic => "u-statistic",
            Method::PlugIn => "plug-in",
            Method::IpcwUStatistic => "ipcw-u-statistic",
            Method::IpcwOracleWeights => "ipcw-oracle-weights",
        }
    }
}

/// A point estimate with enough metadata to reproduce it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EstimateResult {
    pub measure: Measure,
    /// Units: time for CRE/CE and the dynamic variants, time^2 for the
    /// weighted ones.
    pub value: f64,
    /// Observations that entered pair formation (subsample size for the
    /// dynamic variants, full n otherwise).
    pub n_used: usize,
    /// Event count, present only for censored estimators.
    pub n_events: Option<usize>,
    pub method: Method,
    /// Threshold of the dynamic variants.
    pub threshold_t: Option<f64>,
}

fn require_len(n: usize, needed: usize) -> Result<()> {
    if n < needed {
        return Err(Error::InsufficientData { needed, got: n });
    }
    Ok(())
}

fn check_threshold(t: f64) -> Result<()> {
    if !t.is_finite() || t < 0.0 {
        return Err(Error::InvalidSample(format!(
            "threshold t = {t} must be finite and nonnegative"
        )));
    }
    Ok(())
}

/// Mean over all unordered pairs of a per-order-statistic term weighted by
/// how many pairs it appears in. `weight_of(i, n)` is the multiplicity of
/// the i-th (0-based) order statistic.
fn pair_mean<W, T>(ordered: &[f64], weight_of: W, term: T) -> f64
where
    W: Fn(usize, usize) -> f64,
    T: Fn(f64) -> f64,
{
    let n = ordered.len();
    let mut acc = Accumulator::new();
    for (i, x) in ordered.iter().enumerate() {
        acc.add(weight_of(i, n) * term(*x));
    }
    let pairs = 0.5 * (n as f64) * (n as f64 - 1.0);
    acc.total() / pairs
}

/// Cumulative residual extropy U-statistic `T1 = -(1/2) * mean over pairs
/// of min(Xi, Xj)`, evaluated from order statistics.
pub fn estimate_cre(s: &Sample) -> Result<EstimateResult> {
    require_len(s.len(), 2)?;
    let sorted = s.sorted();
    let mean_min = pair_mean(sorted.ordered(), |i, n| (n - 1 - i) as f64, |x| x);
    Ok(EstimateResult {
        measure: Measure::Cre,
        value: -0.5 * mean_min,
        n_used: s.len(),
        n_events: None,
        method: Method::UStatistic,
        threshold_t: None,
    })
}

/// Negative cumulative extropy U-statistic `T2 = (1/2) * mean over pairs
/// of max(Xi, Xj)`.
pub fn estimate_ce(s: &Sample) -> Result<EstimateResult> {
    require_len(s.len(), 2)?;
    let sorted = s.sorted();
    let mean_max = pair_mean(sorted.ordered(), |i, _| i as f64, |x| x);
    Ok(EstimateResult {
        measure: Measure::Ce,
        value: 0.5 * mean_max,
        n_used: s.len(),
        n_events: None,
        method: Method::UStatistic,
        threshold_t: None,
    })
}

/// Plug-in baseline for CRE: `-(1/2)` times the step integral of the
/// squared empirical survival function.
pub fn estimate_cre_plugin(s: &Sample) -> Result<EstimateResult> {
    require_len(s.len(), 2)?;
    let sorted = s.sorted();
    let x = sorted.ordered();
    let n = x.len() as f64;
    let mut acc = Accumulator::new();
    for i in 1..x.len() {
        let surv = 1.0 - i as f64 / n;
        acc.add(surv * surv * (x[i] - x[i - 1]));
    }
    Ok(EstimateResult {
        measure: Measure::CrePlugin,
        value: -0.5 * acc.total(),
        n_used: s.len(),
        n_events: None,
        method: Method::PlugIn,
        threshold_t: None,
    })
}

/// Plug-in baseline for CE: `(1/2)` times the step integral of
/// `1 - Fn(x)^2` from 0 to the largest observation.
pub fn estimate_ce_plugin(s: &Sample) -> Result<EstimateResult> {
    require_len(s.len(), 2)?;
    let sorted = s.sorted();
    let x = sorted.ordered();
    let n = x.len() as f64;
    let mut acc = Accumulator::new();
    acc.add(x[0]);
    for i in 1..x.len() {
        let cdf = i as f64 / n;
        acc.add((1.0 - cdf * cdf) * (x[i] - x[i - 1]));
    }
    Ok(EstimateResult {
        measure: Measure::CePlugin,
        value: 0.5 * acc.total(),
        n_used: s.len(),
        n_events: None,
        method: Method::PlugIn,
        threshold_t: None,
    })
}

/// Dynamic survival extropy at threshold `t`: `-(1/2)` times the mean of
/// `min - t` over pairs both exceeding `t`. At `t = 0` this is exactly the
/// CRE estimator.
pub fn estimate_dynamic_survival_extropy(s: &Sample, t: f64) -> Result<EstimateResult> {
    check_threshold(t)?;
    let mut tail: Vec<f64> = s.values().iter().copied().filter(|x| *x > t).collect();
    if tail.len() < 2 {
        return Err(Error::InsufficientTail {
            threshold: t,
            got: tail.len(),
        });
    }
    tail.sort_by(f64::total_cmp);
    let mean_shifted_min = pair_mean(&tail, |i, n| (n - 1 - i) as f64, |x| x - t);
    Ok(EstimateResult {
        measure: Measure::DynSurvExtropy,
        value: -0.5 * mean_shifted_min,
        n_used: tail.len(),
        n_events: None,
        method: Method::UStatistic,
        threshold_t: Some(t),
    })
}

/// Dynamic cumulative extropy at threshold `t`: `-(1/2)` times the mean of
/// `t - max` over pairs at or below `t`.
pub fn estimate_dynamic_cumulative_extropy(s: &Sample, t: f64) -> Result<EstimateResult> {
    check_threshold(t)?;
    let mut head: Vec<f64> = s.values().iter().copied().filter(|x| *x <= t).collect();
    if head.len() < 2 {
        return Err(Error::InsufficientHead {
            threshold: t,
            got: head.len(),
        });
    }
    head.sort_by(f64::total_cmp);
    let mean_past_max = pair_mean(&head, |i, _| i as f64, |x| t - x);
    Ok(EstimateResult {
        measure: Measure::DynCumExtropy,
        value: -0.5 * mean_past_max,
        n_used: head.len(),
        n_events: None,
        method: Method::UStatistic,
        threshold_t: Some(t),
    })
}

/// Weighted survival extropy: `-(1/4)` times the mean of `min^2` over all
/// pairs.
pub fn estimate_weighted_survival_extropy(s: &Sample) -> Result<EstimateResult> {
    require_len(s.len(), 2)?;
    let sorted = s.sorted();
    let mean_min_sq = pair_mean(sorted.ordered(), |i, n| (n - 1 - i) as f64, |x| x * x);
    Ok(EstimateResult {
        measure: Measure::WSurvExtropy,
        value: -0.25 * mean_min_sq,
        n_used: s.len(),
        n_events: None,
        method: Method::UStatistic,
        threshold_t: None,
    })
}

/// Weighted cumulative extropy: `-(1/4)` times the mean of `max^2` over
/// all pairs.
pub fn estimate_weighted_cumulative_extropy(s: &Sample) -> Result<EstimateResult> {
    require_len(s.len(), 2)?;
    let sorted = s.sorted();
    let mean_max_sq = pair_mean(sorted.ordered(), |i, _| i as f64, |x| x * x);
    Ok(EstimateResult {
        measure: Measure::WCumExtropy,
        value: -0.25 * mean_max_sq,
        n_used: s.len(),
        n_events: None,
        method: Method::UStatistic,
        threshold_t: None,
    })
}

/// Weighted dynamic survival extropy at `t`: `-(1/4)` times the mean of
/// `min^2 - t^2` over pairs both exceeding `t`.
pub fn estimate_weighted_dynamic_survival_extropy(s: &Sample, t: f64) -> Result<EstimateResult> {
    check_threshold(t)?;
    let mut tail: Vec<f64> = s.values().iter().copied().filter(|x| *x > t).collect();
    if tail.len() < 2 {
        return Err(Error::InsufficientTail {
            threshold: t,
            got: tail.len(),
        });
    }
    tail.sort_by(f64::total_cmp);
    let mean_term = pair_mean(&tail, |i, n| (n - 1 - i) as f64, |x| x * x - t * t);
    Ok(EstimateResult {
        measure: Measure::WDynSurvExtropy,
        value: -0.25 * mean_term,
        n_used: tail.len(),
        n_events: None,
        method: Method::UStatistic,
        threshold_t: Some(t),
    })
}

/// Weighted dynamic cumulative extropy at `t`: `-(1/4)` times the mean of
/// `t^2 - max^2` over pairs at or below `t`.
pub fn estimate_weighted_dynamic_cumulative_extropy(s: &Sample, t: f64) -> Result<EstimateResult> {
    check_threshold(t)?;
    let mut head: Vec<f64> = s.values().iter().copied().filter(|x| *x <= t).collect();
    if head.len() < 2 {
        return Err(Error::InsufficientHead {
            threshold: t,
            got: head.len(),
        });
    }
    head.sort_by(f64::total_cmp);
    let mean_term = pair_mean(&head, |i, _| i as f64, |x| t * t - x * x);
    Ok(EstimateResult {
        measure: Measure::WDynCumExtropy,
        value: -0.25 * mean_term,
        n_used: head.len(),
        n_events: None,
        method: Method::UStatistic,
        threshold_t: Some(t),
    })
}

/// Dispatch by measure for complete-data samples; dynamic measures take
/// their threshold from `t`.
pub fn estimate_measure(s: &Sample, measure: Measure, t: Option<f64>) -> Result<EstimateResult> {
    match measure {
        Measure::Cre => estimate_cre(s),
        Measure::Ce => estimate_ce(s),
        Measure::CrePlugin => estimate_cre_plugin(s),
        Measure::CePlugin => estimate_ce_plugin(s),
        Measure::WSurvExtropy => estimate_weighted_survival_extropy(s),
        Measure::WCumExtropy => estimate_weighted_cumulative_extropy(s),
        Measure::DynSurvExtropy | Measure::DynCumExtropy | Measure::WDynSurvExtropy
        | Measure::WDynCumExtropy => {
            let t = t.ok_or_else(|| {
                Error::InvalidSample(format!("measure {measure} requires a threshold t"))
            })?;
            match measure {
                Measure::DynSurvExtropy => estimate_dynamic_survival_extropy(s, t),
                Measure::DynCumExtropy => estimate_dynamic_cumulative_extropy(s, t),
                Measure::WDynSurvExtropy => estimate_weighted_dynamic_survival_extropy(s, t),
                Measure::WDynCumExtropy => estimate_weighted_dynamic_cumulative_extropy(s, t),
                _ => unreachable!(),
            }
        }
    }
}
