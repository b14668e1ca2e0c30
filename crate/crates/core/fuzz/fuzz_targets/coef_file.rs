#![no_main]
use eigenreg::transform::{parse_coef_file, write_coef_file};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(file) = parse_coef_file(text) {
        // Anything accepted must survive a write/parse cycle unchanged.
        let again = parse_coef_file(&write_coef_file(&file.vector, &file.provenance)).expect("rewritten file parses");
        assert_eq!(again.vector.log_hs_norms().len(), file.vector.log_hs_norms().len());
        assert_eq!(again.provenance, file.provenance);
    }
});
