#![no_main]

use landair_cli::overrides::apply;
use landair_cli::Override;
use landair_core::evaluation::WeightSet;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    let ovs: Vec<Override> = text.lines().filter_map(|l| l.parse().ok()).collect();
    let _ = apply(&WeightSet::default(), &ovs);
});
