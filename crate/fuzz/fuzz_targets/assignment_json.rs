#![no_main]

use libfuzzer_sys::fuzz_target;
use seatplan_core::io::AssignmentFile;
use seatplan_core::{eval, fixtures};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let Ok(file) = AssignmentFile::from_json(text) else { return };
    let inst = fixtures::tiny();
    if let Ok(a) = file.to_assignment(&inst) {
        let _ = eval::score(&inst, &a);
    }
});
