#![no_main]

//! Reverse Kaplan-Meier and IPCW weighting under arbitrary censored
//! samples: the curve must stay a nonincreasing step function in [0, 1]
//! with left limits at or above the right-continuous values, finite
//! weights must be 0 (censored) or >= 1 (events), and the censored
//! estimators must never panic.

use arbitrary::Arbitrary;
use libfuzzer_sys::fuzz_target;

use extropy_core::censored::{estimate_ce_censored, estimate_cre_censored, ipcw_weights};
use extropy_core::sample::{km_censoring_survival, CensoredSample, Observation};

#[derive(Debug, Arbitrary)]
struct Input {
    rows: Vec<(u16, bool)>,
}

fuzz_target!(|input: Input| {
    let observations: Vec<Observation> = input
        .rows
        .iter()
        .take(512)
        .map(|(t, event)| Observation {
            // Coarse grid forces heavy ties across events and censorings.
            time: ((t % 64) + 1) as f64 / 8.0,
            event: *event,
        })
        .collect();
    let Ok(sample) = CensoredSample::new(observations) else {
        return;
    };

    let curve = km_censoring_survival(&sample).unwrap();
    let mut previous = 1.0;
    for (jump, value) in curve.jump_times().iter().zip(curve.values_after()) {
        assert!((0.0..=1.0).contains(value));
        assert!(*value <= previous);
        assert!(curve.left_limit(*jump) >= curve.eval(*jump));
        previous = *value;
    }
    assert_eq!(curve.eval(1e-12), 1.0);

    match ipcw_weights(&sample) {
        Ok(weights) => {
            for (obs, w) in sample.observations().iter().zip(weights.weights()) {
                if obs.event {
                    assert!(*w >= 1.0 && w.is_finite());
                } else {
                    assert_eq!(*w, 0.0);
                }
            }
        }
        Err(extropy_core::Error::IpcwDegenerate { .. }) => {}
        Err(other) => panic!("unexpected weight error: {other}"),
    }

    // Estimators must return a value or a typed error, never panic; when
    // both succeed the CRE value cannot exceed the CE value.
    let cre = estimate_cre_censored(&sample);
    let ce = estimate_ce_censored(&sample);
    if let (Ok(lo), Ok(hi)) = (&cre, &ce) {
        assert!(lo.value.is_finite() && hi.value.is_finite());
        assert!(lo.value <= 0.0);
        assert!(hi.value >= 0.0);
    }
});
