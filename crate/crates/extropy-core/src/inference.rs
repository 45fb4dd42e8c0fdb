//! Standard errors and confidence intervals.
//!
//! Complete-data estimators get a projection (Hajek) plug-in variance: the
//! per-observation conditional kernel means are computed in `O(n log n)`,
//! and their sample variance divided by `n` estimates `Var(T)`. The
//! U-statistic factor 4 and the squared 1/2 in front of the kernel cancel,
//! so for the min kernel on unit-rate exponential data `n * Var-hat(T1)`
//! converges to `Var(1 - e^{-X}) = 1/12`.
//!
//! Censored estimators get a seeded nonparametric bootstrap over
//! `(time, status)` pairs with a percentile interval.

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::censored::{estimate_ce_censored, estimate_cre_censored};
use crate::complete::{estimate_ce, estimate_cre, Measure};
use crate::error::{Error, Result};
use crate::sample::{CensoredSample, Sample};
use crate::special::normal_quantile;
use crate::stream::{derive_rng, Purpose};
use crate::sum::{sample_variance, Accumulator};

/// Kernels whose projections the variance plug-in uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum PairKernel {
    Min,
    Max,
}

/// How an interval was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum InferenceMethod {
    Projection,
    Bootstrap,
}

/// Point estimate with standard error and confidence interval.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InferenceResult {
    pub estimate: f64,
    pub std_error: f64,
    pub ci_lower: f64,
    pub ci_upper: f64,
    pub level: f64,
    pub method: InferenceMethod,
    pub n_boot: Option<usize>,
    /// Bootstrap replicates skipped as degenerate.
    pub n_skipped: Option<usize>,
}

/// Empirical projections `h1_hat(X_i) = (1/(n-1)) sum_{j != i}
/// kernel(X_i, X_j)`, returned in the input order of the sample.
pub fn projection_values(s: &Sample, kernel: PairKernel) -> Result<Vec<f64>> {
    let n = s.len();
    if n < 2 {
        return Err(Error::InsufficientData { needed: 2, got: n });
    }
    let mut order: Vec<usize> = (0..n).collect();
    let v = s.values();
    order.sort_by(|&a, &b| v[a].total_cmp(&v[b]));

    // Prefix sums of the sorted values; prefix[p] = sum of the first p.
    let mut prefix = vec![0.0; n + 1];
    let mut acc = Accumulator::new();
    for (p, &idx) in order.iter().enumerate() {
        acc.add(v[idx]);
        prefix[p + 1] = acc.total();
    }
    let total = prefix[n];

    let mut out = vec![0.0; n];
    let denom = (n - 1) as f64;
    for (p, &idx) in order.iter().enumerate() {
        let x = v[idx];
        let sum = match kernel {
            // Values below contribute themselves, values above contribute x.
            PairKernel::Min => prefix[p] + (n - 1 - p) as f64 * x,
            // Values below contribute x, values above contribute themselves.
            PairKernel::Max => p as f64 * x + (total - prefix[p + 1]),
        };
        out[idx] = sum / denom;
    }
    Ok(out)
}

/// Projection plug-in inference for the complete-data CRE/CE estimators.
///
/// `std_error = sqrt(sample variance of the raw-kernel projections / n)`;
/// the interval is the symmetric normal one at the requested level.
pub fn variance_complete(s: &Sample, measure: Measure, level: f64) -> Result<InferenceResult> {
    if !(0.0 < level && level < 1.0) {
        return Err(Error::InvalidSpec(format!(
            "confidence level {level} must lie strictly between 0 and 1"
        )));
    }
    let n = s.len();
    if n < 3 {
        return Err(Error::InsufficientData { needed: 3, got: n });
    }
    let (estimate, kernel) = match measure {
        Measure::Cre => (estimate_cre(s)?.value, PairKernel::Min),
        Measure::Ce => (estimate_ce(s)?.value, PairKernel::Max),
        other => {
            return Err(Error::InvalidSpec(format!(
                "projection variance covers cre and ce, not {other}"
            )))
        }
    };
    let proj = projection_values(s, kernel)?;
    let v_hat = sample_variance(&proj);
    let std_error = (v_hat / n as f64).sqrt();
    let z = normal_quantile(0.5 + 0.5 * level);
    Ok(InferenceResult {
        estimate,
        std_error,
        ci_lower: estimate - z * std_error,
        ci_upper: estimate + z * std_error,
        level,
        method: InferenceMethod::Projection,
        n_boot: None,
        n_skipped: None,
    })
}

/// Empirical quantile with linear interpolation between order statistics.
fn percentile(sorted: &[f64], q: f64) -> f64 {
    debug_assert!(!sorted.is_empty());
    let rank = q * (sorted.len() - 1) as f64;
    let lo = rank.floor() as usize;
    let hi = rank.ceil() as usize;
    if lo == hi {
        sorted[lo]
    } else {
        let w = rank - lo as f64;
        sorted[lo] * (1.0 - w) + sorted[hi] * w
    }
}

/// Percentile bootstrap for the censored CRE/CE estimators.
///
/// Resamples the `(time, status)` pairs with replacement, recomputing the
/// Kaplan-Meier weights inside every replicate. Replicates with fewer than
/// two events or degenerate weights are skipped and counted; more than 20%
/// skipped aborts. The replicate streams derive from `(seed, replicate)`,
/// so results are identical for any worker-thread count.
pub fn bootstrap_censored(
    cs: &CensoredSample,
    measure: Measure,
    n_boot: usize,
    level: f64,
    seed: u64,
) -> Result<InferenceResult> {
    if n_boot < 100 {
        return Err(Error::InvalidSpec(format!(
            "n_boot = {n_boot} is below the minimum of 100"
        )));
    }
    if !(0.0 < level && level < 1.0) {
        return Err(Error::InvalidSpec(format!(
            "confidence level {level} must lie strictly between 0 and 1"
        )));
    }
    let point = match measure {
        Measure::Cre => estimate_cre_censored(cs)?.value,
        Measure::Ce => estimate_ce_censored(cs)?.value,
        other => {
            return Err(Error::InvalidSpec(format!(
                "bootstrap covers cre and ce, not {other}"
            )))
        }
    };

    let n = cs.len();
    let obs = cs.observations();
    let replicate_estimates: Vec<Option<f64>> = (0..n_boot)
        .into_par_iter()
        .map(|b| {
            let mut rng = derive_rng(seed, Purpose::Bootstrap, 0, b as u64);
            let resampled: Vec<_> = (0..n).map(|_| obs[rng.gen_range(0..n)]).collect();
            let resample =
                CensoredSample::new(resampled).expect("resampled times stay positive and finite");
            let est = match measure {
                Measure::Cre => estimate_cre_censored(&resample),
                Measure::Ce => estimate_ce_censored(&resample),
                _ => unreachable!(),
            };
            est.ok().map(|e| e.value)
        })
        .collect();

    let mut estimates: Vec<f64> = replicate_estimates.iter().filter_map(|e| *e).collect();
    let skipped = n_boot - estimates.len();
    if skipped * 5 > n_boot {
        return Err(Error::UnstableBootstrap {
            skipped,
            total: n_boot,
        });
    }
    estimates.sort_by(f64::total_cmp);
    let alpha = 1.0 - level;
    let ci_lower = percentile(&estimates, 0.5 * alpha);
    let ci_upper = percentile(&estimates, 1.0 - 0.5 * alpha);
    let std_error = if estimates.len() >= 2 {
        sample_variance(&estimates).sqrt()
    } else {
        0.0
    };
    Ok(InferenceResult {
        estimate: point,
        std_error,
        ci_lower,
        ci_upper,
        level,
        method: InferenceMethod::Bootstrap,
        n_boot: Some(n_boot),
        n_skipped: Some(skipped),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracles::{naive_pairwise_oracle, PairwiseKernel};
    use crate::stream::{derive_rng, Purpose};
    use rand::Rng;

    fn sample(values: &[f64]) -> Sample {
        Sample::new(values.to_vec()).unwrap()
    }

    #[test]
    fn projection_hand_values() {
        let s = sample(&[1.0, 2.0, 3.0]);
        let min = projection_values(&s, PairKernel::Min).unwrap();
        assert_eq!(min, vec![1.0, 1.5, 1.5]);
        let max = projection_values(&s, PairKernel::Max).unwrap();
        assert_eq!(max, vec![2.5, 2.5, 3.0]);
        let c = sample(&[4.0, 4.0]);
        assert_eq!(projection_values(&c, PairKernel::Min).unwrap(), vec![4.0; 2]);
        assert_eq!(projection_values(&c, PairKernel::Max).unwrap(), vec![4.0; 2]);
    }

    #[test]
    fn projection_respects_input_order() {
        let s = sample(&[3.0, 1.0, 2.0]);
        let min = projection_values(&s, PairKernel::Min).unwrap();
        assert_eq!(min, vec![1.5, 1.0, 1.5]);
    }

    #[test]
    fn projection_mean_equals_pair_mean() {
        let mut rng = derive_rng(23, Purpose::General, 0, 0);
        for _ in 0..20 {
            let n = rng.gen_range(2..120);
            let s = Sample::new((0..n).map(|_| rng.gen_range(0.01..5.0)).collect()).unwrap();
            for (kernel, oracle_kernel) in [
                (PairKernel::Min, PairwiseKernel::Min),
                (PairKernel::Max, PairwiseKernel::Max),
            ] {
                let proj = projection_values(&s, kernel).unwrap();
                let proj_mean = crate::sum::cmean(&proj);
                let pair_mean = naive_pairwise_oracle(&s, oracle_kernel).unwrap();
                assert!(
                    (proj_mean - pair_mean).abs() < 1e-12 * pair_mean.abs().max(1.0),
                    "projection identity failed"
                );
            }
        }
    }

    #[test]
    fn degenerate_sample_has_zero_std_error() {
        let r = variance_complete(&sample(&[2.0; 12]), Measure::Cre, 0.95).unwrap();
        assert_eq!(r.std_error, 0.0);
        assert_eq!(r.ci_lower, r.estimate);
        assert_eq!(r.ci_upper, r.estimate);
    }

    #[test]
    fn variance_complete_validates_inputs() {
        let s = sample(&[1.0, 2.0]);
        assert!(variance_complete(&s, Measure::Cre, 0.95).is_err());
        let s3 = sample(&[1.0, 2.0, 3.0]);
        assert!(variance_complete(&s3, Measure::CrePlugin, 0.95).is_err());
        assert!(variance_complete(&s3, Measure::Cre, 0.0).is_err());
        assert!(variance_complete(&s3, Measure::Cre, 1.0).is_err());
        let r = variance_complete(&s3, Measure::Cre, 0.95).unwrap();
        assert!(r.ci_lower <= r.estimate && r.estimate <= r.ci_upper);
    }

    #[test]
    fn bootstrap_is_deterministic_given_seed() {
        let times: Vec<f64> = (1..=40).map(|i| i as f64 / 3.0).collect();
        let statuses: Vec<u8> = (0..40).map(|i| if i % 5 == 0 { 0 } else { 1 }).collect();
        let cs = CensoredSample::from_parts(&times, &statuses).unwrap();
        let a = bootstrap_censored(&cs, Measure::Cre, 200, 0.95, 99).unwrap();
        let b = bootstrap_censored(&cs, Measure::Cre, 200, 0.95, 99).unwrap();
        assert_eq!(a, b);
        let c = bootstrap_censored(&cs, Measure::Cre, 200, 0.95, 100).unwrap();
        assert_ne!(a.ci_lower, c.ci_lower);
    }

    #[test]
    fn bootstrap_validates_inputs() {
        let cs = CensoredSample::from_parts(&[1.0, 2.0, 3.0], &[1, 1, 1]).unwrap();
        assert!(bootstrap_censored(&cs, Measure::Cre, 50, 0.95, 1).is_err());
        assert!(bootstrap_censored(&cs, Measure::Cre, 200, 1.5, 1).is_err());
        assert!(bootstrap_censored(&cs, Measure::Ce, 200, 0.95, 1).is_ok());
        let censored_only = CensoredSample::from_parts(&[1.0, 2.0], &[0, 0]).unwrap();
        assert!(matches!(
            bootstrap_censored(&censored_only, Measure::Cre, 200, 0.95, 1),
            Err(Error::InsufficientEvents { .. })
        ));
    }

    #[test]
    fn mostly_censored_input_aborts_as_unstable() {
        // Two events among many censored rows: most resamples have < 2
        // events, so the skip cap trips.
        let mut times = vec![5.0, 6.0];
        let mut statuses = vec![1u8, 1];
        for i in 0..38 {
            times.push(1.0 + i as f64 * 0.1);
            statuses.push(0);
        }
        let cs = CensoredSample::from_parts(&times, &statuses).unwrap();
        match bootstrap_censored(&cs, Measure::Cre, 200, 0.95, 3) {
            Err(Error::UnstableBootstrap { skipped, total }) => {
                assert_eq!(total, 200);
                assert!(skipped > 40);
            }
            other => panic!("expected unstable bootstrap, got {other:?}"),
        }
    }

    #[test]
    fn percentile_interpolates_linearly() {
        let v = [1.0, 2.0, 3.0, 4.0];
        assert_eq!(percentile(&v, 0.0), 1.0);
        assert_eq!(percentile(&v, 1.0), 4.0);
        assert!((percentile(&v, 0.5) - 2.5).abs() < 1e-15);
    }
}
