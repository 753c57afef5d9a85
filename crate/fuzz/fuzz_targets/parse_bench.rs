#![no_main]

use libfuzzer_sys::fuzz_target;
use qdiag::netlist::{parse_bench, render_bench};

// Any text the parser accepts must survive a render/reparse round trip.
fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(circuit) = parse_bench(text) {
        let rendered = render_bench(&circuit);
        let again = parse_bench(&rendered).expect("rendered netlist must parse");
        assert_eq!(circuit, again, "round trip changed the circuit");
    }
});
