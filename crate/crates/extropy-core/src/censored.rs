//! IPCW U-statistic estimators of CRE and CE for right-censored samples.
//!
//! Each event observation is reweighted by the inverse of the censoring
//! survival just before its time, `w_i = delta_i / K(Y_i-)`, so that pair
//! kernels over events estimate the same expectations as on complete data.
//! `K` is the reverse Kaplan-Meier curve by default; an externally supplied
//! (oracle) censoring survival can replace it, which separates weighting
//! error from the IPCW identity itself.

use crate::complete::{EstimateResult, Measure, Method};
use crate::error::{Error, Result};
use crate::sample::{km_censoring_survival, CensoredSample};
use crate::sum::Accumulator;

/// Source of the censoring survival function used for the weights.
#[derive(Clone, Copy)]
pub enum CensoringWeights<'a> {
    /// Reverse Kaplan-Meier estimate from the sample itself.
    KaplanMeier,
    /// Known censoring survival `K(t)`; queried at event times. Left
    /// limits coincide with values for the continuous censoring
    /// distributions this is meant for.
    Oracle(&'a (dyn Fn(f64) -> f64 + Sync)),
}

/// Per-observation IPCW weights, aligned with the sample's observations.
/// Censored rows carry weight 0; event rows carry `1 / K(Y-) >= 1` unless
/// the survival has collapsed to zero there, which is flagged.
#[derive(Debug, Clone)]
pub struct IpcwWeights {
    weights: Vec<f64>,
    degenerate_flags: Vec<bool>,
}

impl IpcwWeights {
    /// Computes weights without rejecting degenerate ones; flags mark
    /// event observations whose censoring survival is zero.
    pub fn compute(cs: &CensoredSample, scheme: CensoringWeights<'_>) -> Result<Self> {
        let km;
        let survival_before: Box<dyn Fn(f64) -> f64 + '_> = match scheme {
            CensoringWeights::KaplanMeier => {
                km = km_censoring_survival(cs)?;
                Box::new(move |t| km.left_limit(t))
            }
            CensoringWeights::Oracle(k) => Box::new(k),
        };

        let mut weights = Vec::with_capacity(cs.len());
        let mut degenerate_flags = Vec::with_capacity(cs.len());
        for obs in cs.observations() {
            if !obs.event {
                weights.push(0.0);
                degenerate_flags.push(false);
                continue;
            }
            let k = survival_before(obs.time);
            if !(0.0..=1.0).contains(&k) {
                return Err(Error::InvalidSample(format!(
                    "censoring survival {k} at time {} is outside [0, 1]",
                    obs.time
                )));
            }
            if k == 0.0 {
                weights.push(f64::INFINITY);
                degenerate_flags.push(true);
            } else {
                weights.push(1.0 / k);
                degenerate_flags.push(false);
            }
        }
        Ok(Self {
            weights,
            degenerate_flags,
        })
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn degenerate_flags(&self) -> &[bool] {
        &self.degenerate_flags
    }

    /// First degenerate event time in `cs`, if any.
    fn first_degenerate_time(&self, cs: &CensoredSample) -> Option<f64> {
        self.degenerate_flags
            .iter()
            .position(|d| *d)
            .map(|i| cs.observations()[i].time)
    }
}

/// Kaplan-Meier-based IPCW weights, rejecting degenerate event weights.
pub fn ipcw_weights(cs: &CensoredSample) -> Result<IpcwWeights> {
    ipcw_weights_with(cs, CensoringWeights::KaplanMeier)
}

/// IPCW weights under a chosen censoring-survival scheme, rejecting
/// degenerate event weights.
pub fn ipcw_weights_with(cs: &CensoredSample, scheme: CensoringWeights<'_>) -> Result<IpcwWeights> {
    let w = IpcwWeights::compute(cs, scheme)?;
    if let Some(time) = w.first_degenerate_time(cs) {
        return Err(Error::IpcwDegenerate { time });
    }
    Ok(w)
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum PairKernelKind {
    Min,
    Max,
}

/// Weighted pair-kernel sum over unordered pairs, `sum_{i<j} k(Yi, Yj) wi
/// wj`, in `O(n log n)`: after sorting by time, the min kernel pairs each
/// value with the weight mass above it and the max kernel with the mass
/// below it.
fn weighted_pair_sum(times: &[f64], weights: &[f64], kind: PairKernelKind) -> f64 {
    let n = times.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| times[a].total_cmp(&times[b]));

    // Companion weight mass for each sorted position: suffix sums for the
    // min kernel, prefix sums for the max kernel.
    let mut companion = vec![0.0; n];
    match kind {
        PairKernelKind::Min => {
            let mut acc = Accumulator::new();
            for pos in (0..n).rev() {
                companion[pos] = acc.total();
                acc.add(weights[order[pos]]);
                // companion[pos] holds the weight of strictly later
                // positions; ties are safe because min of equals is the
                // shared value.
            }
        }
        PairKernelKind::Max => {
            let mut acc = Accumulator::new();
            for pos in 0..n {
                companion[pos] = acc.total();
                acc.add(weights[order[pos]]);
            }
        }
    }

    let mut total = Accumulator::new();
    for (pos, &idx) in order.iter().enumerate() {
        total.add(times[idx] * weights[idx] * companion[pos]);
    }
    total.total()
}

fn estimate_censored(
    cs: &CensoredSample,
    scheme: CensoringWeights<'_>,
    kind: PairKernelKind,
    measure: Measure,
) -> Result<EstimateResult> {
    let n_events = cs.n_events();
    if n_events < 2 {
        return Err(Error::InsufficientEvents {
            needed: 2,
            got: n_events,
        });
    }
    let weights = ipcw_weights_with(cs, scheme)?;
    let times: Vec<f64> = cs.observations().iter().map(|o| o.time).collect();
    let pair_sum = weighted_pair_sum(&times, weights.weights(), kind);
    let n = cs.len() as f64;
    let norm = n * (n - 1.0);
    let value = match kind {
        PairKernelKind::Min => -pair_sum / norm,
        PairKernelKind::Max => pair_sum / norm,
    };
    Ok(EstimateResult {
        measure,
        value,
        n_used: cs.len(),
        n_events: Some(n_events),
        method: match scheme {
            CensoringWeights::KaplanMeier => Method::IpcwUStatistic,
            CensoringWeights::Oracle(_) => Method::IpcwOracleWeights,
        },
        threshold_t: None,
    })
}

/// CRE estimator for right-censored data with Kaplan-Meier IPCW weights.
/// The normalizer `n(n-1)` counts all observations, censored included.
pub fn estimate_cre_censored(cs: &CensoredSample) -> Result<EstimateResult> {
    estimate_censored(
        cs,
        CensoringWeights::KaplanMeier,
        PairKernelKind::Min,
        Measure::Cre,
    )
}

/// CE estimator for right-censored data (max kernel, positive sign).
pub fn estimate_ce_censored(cs: &CensoredSample) -> Result<EstimateResult> {
    estimate_censored(
        cs,
        CensoringWeights::KaplanMeier,
        PairKernelKind::Max,
        Measure::Ce,
    )
}

/// CRE estimator with a caller-supplied censoring survival.
pub fn estimate_cre_censored_with(
    cs: &CensoredSample,
    scheme: CensoringWeights<'_>,
) -> Result<EstimateResult> {
    estimate_censored(cs, scheme, PairKernelKind::Min, Measure::Cre)
}

/// CE estimator with a caller-supplied censoring survival.
pub fn estimate_ce_censored_with(
    cs: &CensoredSample,
    scheme: CensoringWeights<'_>,
) -> Result<EstimateResult> {
    estimate_censored(cs, scheme, PairKernelKind::Max, Measure::Ce)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complete::{estimate_ce, estimate_cre};
    use crate::sample::Sample;
    use crate::stream::{derive_rng, Purpose};
    use rand::Rng;

    fn cs(pairs: &[(f64, u8)]) -> CensoredSample {
        let times: Vec<f64> = pairs.iter().map(|p| p.0).collect();
        let statuses: Vec<u8> = pairs.iter().map(|p| p.1).collect();
        CensoredSample::from_parts(&times, &statuses).unwrap()
    }

    #[test]
    fn weights_from_km_hand_example() {
        let w = ipcw_weights(&cs(&[(1.0, 1), (2.0, 0), (3.0, 1)])).unwrap();
        assert_eq!(w.weights(), &[1.0, 0.0, 2.0]);
        assert!(w.degenerate_flags().iter().all(|d| !d));
    }

    #[test]
    fn weights_all_events_are_one() {
        let w = ipcw_weights(&cs(&[(1.0, 1), (2.0, 1), (3.0, 1)])).unwrap();
        assert_eq!(w.weights(), &[1.0, 1.0, 1.0]);
    }

    #[test]
    fn weight_after_single_censoring() {
        let w = ipcw_weights(&cs(&[(1.0, 0), (2.0, 1)])).unwrap();
        assert_eq!(w.weights(), &[0.0, 2.0]);
    }

    #[test]
    fn degenerate_oracle_weight_is_an_error() {
        // Survival that collapses to zero before the last event time.
        let k = |t: f64| if t < 2.5 { 1.0 } else { 0.0 };
        let data = cs(&[(1.0, 1), (3.0, 1)]);
        let err = ipcw_weights_with(&data, CensoringWeights::Oracle(&k)).unwrap_err();
        assert_eq!(err, Error::IpcwDegenerate { time: 3.0 });

        // The unvalidated computation carries the flag instead.
        let w = IpcwWeights::compute(&data, CensoringWeights::Oracle(&k)).unwrap();
        assert_eq!(w.degenerate_flags(), &[false, true]);
    }

    #[test]
    fn censored_cre_hand_example() {
        let r = estimate_cre_censored(&cs(&[(1.0, 1), (2.0, 0), (3.0, 1)])).unwrap();
        // Single event pair (1, 3): min 1, weights 1 and 2, n(n-1) = 6.
        assert!((r.value - (-1.0 / 3.0)).abs() < 1e-15);
        assert_eq!(r.n_used, 3);
        assert_eq!(r.n_events, Some(2));
        assert_eq!(r.method, Method::IpcwUStatistic);
    }

    #[test]
    fn censored_ce_hand_example() {
        let r = estimate_ce_censored(&cs(&[(1.0, 1), (2.0, 0), (3.0, 1)])).unwrap();
        assert!((r.value - 1.0).abs() < 1e-15);
    }

    #[test]
    fn no_censoring_reduces_to_complete_estimators() {
        let mut rng = derive_rng(5, Purpose::General, 0, 0);
        for _ in 0..50 {
            let n = rng.gen_range(2..60);
            let values: Vec<f64> = (0..n).map(|_| rng.gen_range(0.01..10.0)).collect();
            let statuses = vec![1u8; n];
            let censored = CensoredSample::from_parts(&values, &statuses).unwrap();
            let complete = Sample::new(values).unwrap();
            let t1 = estimate_cre(&complete).unwrap().value;
            let t1c = estimate_cre_censored(&censored).unwrap().value;
            assert!((t1 - t1c).abs() <= 1e-12 * t1.abs().max(1.0));
            let t2 = estimate_ce(&complete).unwrap().value;
            let t2c = estimate_ce_censored(&censored).unwrap().value;
            assert!((t2 - t2c).abs() <= 1e-12 * t2.abs().max(1.0));
        }
    }

    #[test]
    fn fewer_than_two_events_is_an_error() {
        assert!(matches!(
            estimate_cre_censored(&cs(&[(1.0, 1), (2.0, 0)])),
            Err(Error::InsufficientEvents { needed: 2, got: 1 })
        ));
        assert!(matches!(
            estimate_ce_censored(&cs(&[(1.0, 0), (2.0, 0)])),
            Err(Error::InsufficientEvents { needed: 2, got: 0 })
        ));
    }

    #[test]
    fn dropping_a_censored_row_matches_fresh_computation() {
        let data = cs(&[(1.0, 1), (1.5, 0), (2.0, 1), (2.5, 0), (4.0, 1)]);
        let reduced = cs(&[(1.0, 1), (2.0, 1), (2.5, 0), (4.0, 1)]);
        let dropped: Vec<_> = data
            .observations()
            .iter()
            .enumerate()
            .filter(|(i, _)| *i != 1)
            .map(|(_, o)| *o)
            .collect();
        let rebuilt = CensoredSample::new(dropped).unwrap();
        assert_eq!(
            estimate_cre_censored(&rebuilt).unwrap().value,
            estimate_cre_censored(&reduced).unwrap().value
        );
    }

    #[test]
    fn oracle_weights_match_km_when_curves_agree() {
        // With no censored rows, KM gives K = 1 everywhere; a constant
        // oracle of 1 must agree bitwise.
        let data = cs(&[(0.5, 1), (1.0, 1), (2.0, 1), (7.0, 1)]);
        let one = |_: f64| 1.0;
        let km = estimate_cre_censored(&data).unwrap();
        let oracle = estimate_cre_censored_with(&data, CensoringWeights::Oracle(&one)).unwrap();
        assert_eq!(km.value, oracle.value);
        assert_eq!(oracle.method, Method::IpcwOracleWeights);
    }

    #[test]
    fn order_statistic_route_matches_brute_force_pairs() {
        let mut rng = derive_rng(17, Purpose::General, 2, 0);
        for _ in 0..40 {
            let n = rng.gen_range(2..50);
            let pairs: Vec<(f64, u8)> = (0..n)
                .map(|_| {
                    (
                        rng.gen_range(0.05..4.0_f64),
                        if rng.gen_bool(0.75) { 1 } else { 0 },
                    )
                })
                .collect();
            let data = cs(&pairs);
            if data.n_events() < 2 {
                continue;
            }
            let weights = match ipcw_weights(&data) {
                Ok(w) => w,
                Err(_) => continue,
            };
            let times: Vec<f64> = data.observations().iter().map(|o| o.time).collect();
            let w = weights.weights();
            let mut brute_min = 0.0;
            let mut brute_max = 0.0;
            for i in 0..times.len() {
                for j in (i + 1)..times.len() {
                    brute_min += times[i].min(times[j]) * w[i] * w[j];
                    brute_max += times[i].max(times[j]) * w[i] * w[j];
                }
            }
            let nn = (times.len() * (times.len() - 1)) as f64;
            let t1c = estimate_cre_censored(&data).unwrap().value;
            let t2c = estimate_ce_censored(&data).unwrap().value;
            assert!((t1c - (-brute_min / nn)).abs() < 1e-12 * (1.0 + brute_min.abs()));
            assert!((t2c - (brute_max / nn)).abs() < 1e-12 * (1.0 + brute_max.abs()));
        }
    }
}
