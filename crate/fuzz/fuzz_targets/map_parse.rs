#![no_main]

use landair_core::planner::GridWorld;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(world) = GridWorld::parse(text) {
        let again = GridWorld::parse(&world.to_map_string()).expect("printed map parses");
        assert_eq!(again, world);
        let _ = world.inflate(world.resolution());
    }
});
