#![no_main]

//! Complete-data estimators under structured arbitrary input: sample
//! construction must reject bad values without panicking, and accepted
//! samples must yield finite estimates with the right signs and the exact
//! CE - CRE = mean identity.

use arbitrary::Arbitrary;
use libfuzzer_sys::fuzz_target;

use extropy_core::complete::{
    estimate_ce, estimate_ce_plugin, estimate_cre, estimate_cre_plugin,
    estimate_dynamic_cumulative_extropy, estimate_dynamic_survival_extropy,
    estimate_weighted_cumulative_extropy, estimate_weighted_dynamic_cumulative_extropy,
    estimate_weighted_dynamic_survival_extropy, estimate_weighted_survival_extropy,
};
use extropy_core::sample::Sample;

#[derive(Debug, Arbitrary)]
struct Input {
    /// Raw lifetimes; construction must reject NaN/inf/nonpositive values.
    raw: Vec<f64>,
    /// Encoded strictly positive lifetimes exercising the happy path.
    encoded: Vec<u32>,
    threshold_milli: u16,
}

fuzz_target!(|input: Input| {
    // Raw path: arbitrary doubles, mostly invalid; never panic.
    if let Ok(s) = Sample::new(input.raw.clone()) {
        let _ = estimate_cre(&s);
        let _ = estimate_ce(&s);
    }

    // Encoded path: valid positive lifetimes in (0, ~4096].
    let values: Vec<f64> = input
        .encoded
        .iter()
        .take(512)
        .map(|v| ((v % 0x3f_ffff) + 1) as f64 / 1024.0)
        .collect();
    if values.len() < 2 {
        return;
    }
    let s = Sample::new(values.clone()).unwrap();
    let t = input.threshold_milli as f64 / 16.0;

    let cre = estimate_cre(&s).unwrap().value;
    let ce = estimate_ce(&s).unwrap().value;
    assert!(cre.is_finite() && cre <= 0.0);
    assert!(ce.is_finite() && ce >= 0.0);
    let mean = values.iter().sum::<f64>() / values.len() as f64;
    assert!((ce - cre - mean).abs() <= 1e-9 * mean.max(1.0));

    assert!(estimate_cre_plugin(&s).unwrap().value <= 0.0);
    assert!(estimate_ce_plugin(&s).unwrap().value >= 0.0);
    assert!(estimate_weighted_survival_extropy(&s).unwrap().value <= 0.0);
    assert!(estimate_weighted_cumulative_extropy(&s).unwrap().value <= 0.0);

    // Dynamic variants either succeed with a finite value or report a
    // typed insufficient-tail/head error.
    for result in [
        estimate_dynamic_survival_extropy(&s, t),
        estimate_dynamic_cumulative_extropy(&s, t),
        estimate_weighted_dynamic_survival_extropy(&s, t),
        estimate_weighted_dynamic_cumulative_extropy(&s, t),
    ] {
        if let Ok(est) = result {
            assert!(est.value.is_finite());
            assert_eq!(est.threshold_t, Some(t));
        }
    }
});
