//! Data model for complete and right-censored lifetime samples, empirical
//! distribution functions, and the reverse Kaplan-Meier estimator of the
//! censoring survival curve.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A complete sample of strictly positive, finite lifetimes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Sample {
    values: Vec<f64>,
}

impl Sample {
    /// Validates positivity and finiteness. Zero lifetimes are rejected:
    /// they break both the positivity of IPCW weights and the lifetime
    /// interpretation of the extropy measures.
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::InvalidSample("sample is empty".into()));
        }
        for (i, v) in values.iter().enumerate() {
            if !v.is_finite() {
                return Err(Error::InvalidSample(format!(
                    "value at index {i} is not finite"
                )));
            }
            if *v <= 0.0 {
                return Err(Error::InvalidSample(format!(
                    "value {v} at index {i} is not strictly positive"
                )));
            }
        }
        Ok(Self { values })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Order statistics of the sample. Stable under duplicate values.
    pub fn sorted(&self) -> SortedSample {
        let mut ordered = self.values.clone();
        ordered.sort_by(f64::total_cmp);
        SortedSample { ordered }
    }
}

/// Order-statistic form of a [`Sample`]: `ordered[i]` is the `(i+1)`-th
/// order statistic of the originating sample.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SortedSample {
    ordered: Vec<f64>,
}

impl SortedSample {
    pub fn ordered(&self) -> &[f64] {
        &self.ordered
    }

    pub fn len(&self) -> usize {
        self.ordered.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ordered.is_empty()
    }

    /// Right-continuous empirical CDF: fraction of the sample `<= x`.
    pub fn empirical_cdf(&self, x: f64) -> f64 {
        let count = self.ordered.partition_point(|v| *v <= x);
        count as f64 / self.ordered.len() as f64
    }

    /// Empirical survival function, the complement of
    /// [`SortedSample::empirical_cdf`].
    pub fn empirical_survival(&self, x: f64) -> f64 {
        1.0 - self.empirical_cdf(x)
    }
}

/// Sorts a sample into order-statistic form.
pub fn sort_sample(s: &Sample) -> SortedSample {
    s.sorted()
}

/// Whether an [`EmpiricalDistribution`] evaluates the CDF or its complement.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum EcdfDirection {
    Cdf,
    Survival,
}

/// Empirical distribution function of a sample in a fixed direction.
#[derive(Debug, Clone, PartialEq)]
pub struct EmpiricalDistribution {
    backing: SortedSample,
    direction: EcdfDirection,
}

impl EmpiricalDistribution {
    pub fn new(backing: SortedSample, direction: EcdfDirection) -> Self {
        Self { backing, direction }
    }

    pub fn eval(&self, x: f64) -> f64 {
        match self.direction {
            EcdfDirection::Cdf => self.backing.empirical_cdf(x),
            EcdfDirection::Survival => self.backing.empirical_survival(x),
        }
    }
}

/// One right-censored observation: the observed time `y = min(x, c)` and
/// whether it was an event (`true`) or a censoring (`false`).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Observation {
    pub time: f64,
    pub event: bool,
}

/// A right-censored sample of `(time, status)` pairs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CensoredSample {
    observations: Vec<Observation>,
}

impl CensoredSample {
    pub fn new(observations: Vec<Observation>) -> Result<Self> {
        if observations.is_empty() {
            return Err(Error::InvalidSample("censored sample is empty".into()));
        }
        for (i, obs) in observations.iter().enumerate() {
            if !obs.time.is_finite() {
                return Err(Error::InvalidSample(format!(
                    "time at index {i} is not finite"
                )));
            }
            if obs.time <= 0.0 {
                return Err(Error::InvalidSample(format!(
                    "time {} at index {i} is not strictly positive",
                    obs.time
                )));
            }
        }
        Ok(Self { observations })
    }

    /// Builds a censored sample from parallel time/status vectors, with
    /// status 1 meaning event and 0 meaning censored.
    pub fn from_parts(times: &[f64], statuses: &[u8]) -> Result<Self> {
        if times.len() != statuses.len() {
            return Err(Error::InvalidSample(format!(
                "times/status length mismatch: {} vs {}",
                times.len(),
                statuses.len()
            )));
        }
        for (i, s) in statuses.iter().enumerate() {
            if *s > 1 {
                return Err(Error::InvalidSample(format!(
                    "status {s} at index {i} is not 0 or 1"
                )));
            }
        }
        Self::new(
            times
                .iter()
                .zip(statuses)
                .map(|(t, s)| Observation {
                    time: *t,
                    event: *s == 1,
                })
                .collect(),
        )
    }

    pub fn observations(&self) -> &[Observation] {
        &self.observations
    }

    pub fn len(&self) -> usize {
        self.observations.len()
    }

    pub fn is_empty(&self) -> bool {
        self.observations.is_empty()
    }

    pub fn n_events(&self) -> usize {
        self.observations.iter().filter(|o| o.event).count()
    }

    /// Flips every status, turning the censoring distribution into the
    /// event distribution and vice versa.
    pub fn flipped(&self) -> CensoredSample {
        CensoredSample {
            observations: self
                .observations
                .iter()
                .map(|o| Observation {
                    time: o.time,
                    event: !o.event,
                })
                .collect(),
        }
    }
}

/// Right-continuous, nonincreasing step function on `(0, inf)` starting at
/// 1, as produced by the product-limit estimator. Supports left-limit
/// queries, which is what IPCW weighting needs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StepSurvival {
    jump_times: Vec<f64>,
    values_after: Vec<f64>,
}

impl StepSurvival {
    /// Builds a curve from strictly increasing jump times and the value
    /// held immediately after each jump. The value before the first jump
    /// is always 1.
    pub fn new(jump_times: Vec<f64>, values_after: Vec<f64>) -> Result<Self> {
        if jump_times.len() != values_after.len() {
            return Err(Error::InvalidSample(
                "jump_times/values_after length mismatch".into(),
            ));
        }
        if jump_times.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidSample(
                "jump times must be strictly increasing".into(),
            ));
        }
        let mut prev = 1.0;
        for v in &values_after {
            if !(0.0..=1.0).contains(v) || *v > prev {
                return Err(Error::InvalidSample(
                    "survival values must be nonincreasing within [0, 1]".into(),
                ));
            }
            prev = *v;
        }
        Ok(Self {
            jump_times,
            values_after,
        })
    }

    /// Value at `t` (right-continuous).
    pub fn eval(&self, t: f64) -> f64 {
        let idx = self.jump_times.partition_point(|jt| *jt <= t);
        if idx == 0 {
            1.0
        } else {
            self.values_after[idx - 1]
        }
    }

    /// Left limit: the value held immediately before `t`. Equals 1 for any
    /// `t` at or below the first jump.
    pub fn left_limit(&self, t: f64) -> f64 {
        let idx = self.jump_times.partition_point(|jt| *jt < t);
        if idx == 0 {
            1.0
        } else {
            self.values_after[idx - 1]
        }
    }

    pub fn jump_times(&self) -> &[f64] {
        &self.jump_times
    }

    pub fn values_after(&self) -> &[f64] {
        &self.values_after
    }
}

/// Left limit of a step survival curve at `t`.
pub fn left_limit(k: &StepSurvival, t: f64) -> f64 {
    k.left_limit(t)
}

/// Kaplan-Meier estimator of the censoring survival function `K(t) =
/// P(C > t)`: the product-limit curve with the roles of events and
/// censorings reversed.
///
/// At each distinct time `t` carrying `d` censorings, the risk set is every
/// observation with `Y >= t` and the curve is multiplied by `1 - d/r`.
/// Event/censoring ties at the same time follow the convention that events
/// happen strictly first, so the weight lookup `K(t-)` for an event at `t`
/// never sees censoring jumps at `t` itself.
pub fn km_censoring_survival(cs: &CensoredSample) -> Result<StepSurvival> {
    let n = cs.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| cs.observations[a].time.total_cmp(&cs.observations[b].time));

    let mut jump_times = Vec::new();
    let mut values_after = Vec::new();
    let mut survival = 1.0;
    let mut i = 0;
    while i < n {
        let t = cs.observations[order[i]].time;
        let at_risk = n - i;
        let mut censorings = 0usize;
        let mut j = i;
        while j < n && cs.observations[order[j]].time == t {
            if !cs.observations[order[j]].event {
                censorings += 1;
            }
            j += 1;
        }
        if censorings > 0 {
            survival *= 1.0 - censorings as f64 / at_risk as f64;
            jump_times.push(t);
            values_after.push(survival.max(0.0));
        }
        i = j;
    }
    StepSurvival::new(jump_times, values_after)
}

/// Standard Kaplan-Meier estimator of the event survival curve, used for
/// the reverse-KM duality checks.
pub fn km_event_survival(cs: &CensoredSample) -> Result<StepSurvival> {
    km_censoring_survival(&cs.flipped())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stream::{derive_rng, Purpose};
    use rand::Rng;

    fn cs(pairs: &[(f64, u8)]) -> CensoredSample {
        let times: Vec<f64> = pairs.iter().map(|p| p.0).collect();
        let statuses: Vec<u8> = pairs.iter().map(|p| p.1).collect();
        CensoredSample::from_parts(&times, &statuses).unwrap()
    }

    #[test]
    fn sorting_orders_and_keeps_ties() {
        let s = Sample::new(vec![3.0, 1.0, 2.0]).unwrap();
        assert_eq!(s.sorted().ordered(), &[1.0, 2.0, 3.0]);
        let ties = Sample::new(vec![2.0, 2.0, 2.0]).unwrap();
        assert_eq!(ties.sorted().ordered(), &[2.0, 2.0, 2.0]);
    }

    #[test]
    fn sorting_large_sample_is_a_permutation() {
        let mut rng = derive_rng(11, Purpose::General, 0, 0);
        let values: Vec<f64> = (0..1000).map(|_| -f64::ln(rng.gen::<f64>())).collect();
        let s = Sample::new(values.clone()).unwrap();
        let sorted = s.sorted();
        assert!(sorted.ordered().windows(2).all(|w| w[0] <= w[1]));
        let mut reference = values;
        reference.sort_by(f64::total_cmp);
        assert_eq!(sorted.ordered(), reference.as_slice());
    }

    #[test]
    fn rejects_invalid_values() {
        assert!(Sample::new(vec![]).is_err());
        assert!(Sample::new(vec![1.0, 0.0]).is_err());
        assert!(Sample::new(vec![1.0, -2.0]).is_err());
        assert!(Sample::new(vec![1.0, f64::NAN]).is_err());
        assert!(Sample::new(vec![1.0, f64::INFINITY]).is_err());
        assert!(CensoredSample::from_parts(&[1.0, 2.0], &[0]).is_err());
        assert!(CensoredSample::from_parts(&[1.0, 2.0], &[0, 2]).is_err());
        assert!(CensoredSample::from_parts(&[1.0, 0.0], &[1, 1]).is_err());
    }

    #[test]
    fn empirical_cdf_counts_correctly() {
        let s = Sample::new(vec![1.0, 2.0, 3.0]).unwrap().sorted();
        assert_eq!(s.empirical_cdf(2.0), 2.0 / 3.0);
        assert_eq!(s.empirical_cdf(0.5), 0.0);
        assert_eq!(s.empirical_cdf(10.0), 1.0);
        let e = EmpiricalDistribution::new(s.clone(), EcdfDirection::Survival);
        assert!((e.eval(2.0) - 1.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn ecdf_and_survival_sum_to_one_everywhere() {
        let s = Sample::new(vec![0.5, 1.0, 1.0, 2.5, 7.0]).unwrap().sorted();
        for x in [0.0, 0.5, 0.75, 1.0, 2.5, 6.9, 7.0, 100.0] {
            assert_eq!(s.empirical_cdf(x) + s.empirical_survival(x), 1.0);
        }
    }

    #[test]
    fn reverse_km_hand_example() {
        // Censoring at time 2 with risk set {2, 3}: K drops to 1/2 there.
        let curve = km_censoring_survival(&cs(&[(1.0, 1), (2.0, 0), (3.0, 1)])).unwrap();
        assert_eq!(curve.eval(1.9), 1.0);
        assert_eq!(curve.eval(2.0), 0.5);
        assert_eq!(curve.eval(5.0), 0.5);
        assert_eq!(curve.left_limit(1.0), 1.0);
        assert_eq!(curve.left_limit(2.0), 1.0);
        assert_eq!(curve.left_limit(2.5), 0.5);
        assert_eq!(curve.left_limit(3.0), 0.5);
    }

    #[test]
    fn no_censoring_gives_flat_curve() {
        let curve = km_censoring_survival(&cs(&[(1.0, 1), (2.0, 1), (3.0, 1)])).unwrap();
        assert!(curve.jump_times().is_empty());
        for t in [0.1, 1.0, 2.0, 3.0, 100.0] {
            assert_eq!(curve.eval(t), 1.0);
            assert_eq!(curve.left_limit(t), 1.0);
        }
    }

    #[test]
    fn all_censored_matches_plain_km_of_the_times() {
        // With every status 0, reverse KM is the ordinary product-limit
        // curve of the observed times: 1 - i/n after the i-th distinct
        // time here, reaching 0 at the largest.
        let curve = km_censoring_survival(&cs(&[(1.0, 0), (2.0, 0), (3.0, 0), (4.0, 0)])).unwrap();
        assert_eq!(curve.eval(1.0), 0.75);
        assert_eq!(curve.eval(2.0), 0.5);
        assert_eq!(curve.eval(3.0), 0.25);
        assert_eq!(curve.eval(4.0), 0.0);
    }

    #[test]
    fn reverse_km_duality_on_hand_table() {
        // Flipping statuses turns the censoring curve into the event
        // curve. Standard KM on times 1,2,3,4,5 with events at 1,3,4:
        // S(1) = 4/5, S(3) = 4/5 * 2/3, S(4) = 4/5 * 2/3 * 1/2.
        let data = cs(&[(1.0, 1), (2.0, 0), (3.0, 1), (4.0, 1), (5.0, 0)]);
        let event_curve = km_event_survival(&data).unwrap();
        assert!((event_curve.eval(1.0) - 0.8).abs() < 1e-15);
        assert!((event_curve.eval(2.0) - 0.8).abs() < 1e-15);
        assert!((event_curve.eval(3.0) - 0.8 * (2.0 / 3.0)).abs() < 1e-15);
        assert!((event_curve.eval(4.5) - 0.8 * (2.0 / 3.0) * 0.5).abs() < 1e-15);
    }

    #[test]
    fn tied_event_and_censoring_keep_event_weight_clean() {
        // Event at t=2 is not discounted by the censoring at t=2: the
        // censoring jump has risk set {2, 2, 3} and K(2-) stays 1.
        let data = cs(&[(2.0, 1), (2.0, 0), (3.0, 1)]);
        let curve = km_censoring_survival(&data).unwrap();
        assert_eq!(curve.left_limit(2.0), 1.0);
        assert!((curve.eval(2.0) - (1.0 - 1.0 / 3.0)).abs() < 1e-15);
    }

    #[test]
    fn duplicate_censoring_times_aggregate() {
        let data = cs(&[(1.0, 0), (1.0, 0), (2.0, 1), (3.0, 1)]);
        let curve = km_censoring_survival(&data).unwrap();
        assert_eq!(curve.jump_times(), &[1.0]);
        assert!((curve.eval(1.0) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn km_is_monotone_in_unit_interval() {
        let mut rng = derive_rng(3, Purpose::General, 1, 0);
        for _ in 0..50 {
            let n = rng.gen_range(1..40);
            let data: Vec<Observation> = (0..n)
                .map(|_| Observation {
                    time: rng.gen_range(0.1..5.0_f64).round() / 2.0 + 0.05,
                    event: rng.gen::<bool>(),
                })
                .collect();
            let sample = CensoredSample::new(data).unwrap();
            let curve = km_censoring_survival(&sample).unwrap();
            let mut prev = 1.0;
            for v in curve.values_after() {
                assert!(*v >= 0.0 && *v <= 1.0 && *v <= prev);
                prev = *v;
            }
            assert_eq!(curve.eval(1e-9), 1.0);
        }
    }
}
