//! Keyword-lexicon CSV loader (dictionary, sdg, pattern rows).

#![no_main]

use kairos_fuzz::temp_input;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let path = temp_input("lexicons", "csv", data);
    let _ = kairos::sdg::load_lexicons(&path);
});
