#![no_main]
use eigenreg::weights::{parse_weight_spec, WeightSpec};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(spec) = parse_weight_spec(text) {
        assert_eq!(parse_weight_spec(&spec.label()).expect("label parses"), spec);
        if !matches!(spec, WeightSpec::File(_)) {
            let _ = spec.resolve(2);
        }
    }
});
