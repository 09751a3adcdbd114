//! Fuzz the measurement-CSV reader: malformed rows, bad numbers and odd
//! whitespace must all surface as parse errors, never panics.

#![no_main]

use libfuzzer_sys::fuzz_target;
use wptsim::analysis::MeasurementSet;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    let _ = MeasurementSet::from_csv(text);
});
