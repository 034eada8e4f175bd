#![no_main]

use landair_core::powertrain::{fit_linear, read_battery_table};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(packs) = read_battery_table(data) {
        let pts: Vec<(f64, f64)> = packs.iter().map(|p| (p.mass_kg, p.capacity_wh)).collect();
        let _ = fit_linear(&pts);
    }
});
