//! Fuzz the topology string parser.

#![no_main]

use libfuzzer_sys::fuzz_target;
use wptsim::circuit::CompensationTopology;

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        let _ = text.parse::<CompensationTopology>();
    }
});
