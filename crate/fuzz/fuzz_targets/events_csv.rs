//! Clean-table event CSV loader (the non-archive event format).

#![no_main]

use kairos_fuzz::temp_input;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let path = temp_input("events_table", "csv", data);
    let _ = kairos::ingest::load_events_csv(&path);
});
