#![no_main]

use libfuzzer_sys::fuzz_target;
use seatplan_core::{Instance, InstanceFile};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let Ok(file) = InstanceFile::from_json(text) else { return };
    // validation must reject or accept, never panic
    if let Ok(inst) = Instance::from_file(&file) {
        let back = inst.to_file();
        assert!(Instance::from_file(&back).is_ok());
    }
});
