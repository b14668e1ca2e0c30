#![no_main]
use eigenreg::weights::{parse_weights_record, write_weights_record};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(rec) = parse_weights_record(text) {
        let w = rec.to_sequence().expect("accepted record builds");
        let k_max = rec.table.len().clamp(1, 64);
        parse_weights_record(&write_weights_record(&w, k_max)).expect("rewritten record parses");
    }
});
