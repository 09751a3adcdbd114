//! Fuzz the JSON run-config parser and the validation layer behind it:
//! arbitrary bytes must never panic, only return errors.

#![no_main]

use libfuzzer_sys::fuzz_target;
use wptsim::config::RunConfig;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(cfg) = RunConfig::from_json(text) {
        // exercise the validation/conversion paths too
        let mut issues = Vec::new();
        let _ = cfg.require_tx(&mut issues);
        let _ = cfg.require_rx(&mut issues);
        let _ = cfg.require_circuit(&mut issues);
        if let Some(d) = &cfg.design {
            let _ = d.to_constraints().validate();
        }
        if let Some(s) = &cfg.sweep {
            let _ = s.spacing(&mut issues);
        }
        if let Some(f) = &cfg.field_map {
            let _ = f.to_grid();
        }
    }
});
