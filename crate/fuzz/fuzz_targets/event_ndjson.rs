//! Newline-delimited event JSON, parsed straight from a byte stream:
//! malformed lines must be skipped and counted, never panic the parser.

#![no_main]

use kairos::ingest::EventStream;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let mut stream = EventStream::new(std::io::BufReader::new(data));
    loop {
        match stream.next_event() {
            Ok(Some(_)) => continue,
            Ok(None) => break,
            Err(_) => break, // fatal I/O cannot happen on a slice, but the API allows it
        }
    }
});
