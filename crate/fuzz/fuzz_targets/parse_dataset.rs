#![no_main]

//! CSV dataset parser under arbitrary bytes: must never panic, and any
//! dataset it accepts must satisfy the documented invariants.

use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(dataset) = extropy_cli::dataset::parse_dataset_bytes(data) {
        assert!(dataset.times.iter().all(|t| t.is_finite() && *t > 0.0));
        if let Some(statuses) = &dataset.statuses {
            assert_eq!(statuses.len(), dataset.times.len());
            assert!(statuses.iter().all(|s| *s <= 1));
            assert!(dataset.n_censored() <= dataset.len());
        }
    }
});
