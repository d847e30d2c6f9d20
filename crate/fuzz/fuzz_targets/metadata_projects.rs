//! Project-table loader over both its formats (CSV and JSON array),
//! chosen by the leading selector byte.

#![no_main]

use kairos_fuzz::{select_format, temp_input};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Some((ext, payload)) = select_format(data) else {
        return;
    };
    let path = temp_input("projects", ext, payload);
    let _ = kairos::ingest::load_projects(&path);
});
