//! Whole-file event ingestion, including the gzip sniffing path: inputs
//! starting with the gzip magic exercise decompression of (possibly
//! corrupt) archives, everything else the plain NDJSON reader.

#![no_main]

use kairos_fuzz::temp_input;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let path = temp_input("events", "ndjson.gz", data);
    let _ = kairos::ingest::read_events_from_path(&path);
});
