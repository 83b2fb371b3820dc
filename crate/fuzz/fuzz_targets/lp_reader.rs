#![no_main]

use libfuzzer_sys::fuzz_target;
use seatplan_core::lp;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(model) = lp::parse_lp(text) {
        let vals = model.binaries.iter().map(|b| (b.clone(), 0.0)).collect();
        let _ = model.violated(&vals);
        let _ = model.objective.eval(&vals);
    }
});
