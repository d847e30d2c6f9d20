//! Correction-vector loader over both its formats (CSV sdg,weight rows
//! and a JSON array of 17 weights), chosen by the leading selector byte.

#![no_main]

use kairos_fuzz::{select_format, temp_input};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Some((ext, payload)) = select_format(data) else {
        return;
    };
    let path = temp_input("correction", ext, payload);
    let _ = kairos::sdg::CorrectionVector::load(&path);
});
