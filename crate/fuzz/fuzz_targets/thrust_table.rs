#![no_main]

use landair_core::powertrain::{read_thrust_table, PowerTrainModel};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(rows) = read_thrust_table(data) {
        for degree in 1..=3 {
            let _ = PowerTrainModel::from_table("fuzz", 170.0, 26.0, &rows, degree, degree);
        }
    }
});
