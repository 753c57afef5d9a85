#![no_main]

use libfuzzer_sys::fuzz_target;
use qdiag::netlist::Assignment;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(assignment) = Assignment::parse(text) {
        // Accepted input has unique names; serializing and reloading the
        // JSON form must preserve every binding.
        let json = serde_json::to_string(&assignment).expect("serializable");
        let back: Assignment = serde_json::from_str(&json).expect("deserializable");
        assert_eq!(assignment, back);
    }
});
