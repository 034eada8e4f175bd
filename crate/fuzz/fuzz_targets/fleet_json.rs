#![no_main]

use landair_core::evaluation::{evaluate_fleet, FleetRecord, WeightSet};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(fleet) = serde_json::from_slice::<Vec<FleetRecord>>(data) else {
        return;
    };
    let _ = evaluate_fleet(&fleet, &WeightSet::default());
});
