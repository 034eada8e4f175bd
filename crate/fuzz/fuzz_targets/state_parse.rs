#![no_main]

use landair_core::dynamics::Profile;
use landair_core::planner::HybridState;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(s) = text.parse::<HybridState>() {
        let plain = format!("{},{},{}", s.x, s.y, s.layer);
        assert_eq!(plain.parse::<HybridState>().ok(), Some(s));
    }
    let _ = text.parse::<Profile>();
});
