#![no_main]

use landair_core::spec::RobotSpec;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(spec) = RobotSpec::from_json(text) {
        let _ = spec.total_weight();
        let _ = spec.arm_sim_spec();
        let _ = spec.cost_model();
    }
});
