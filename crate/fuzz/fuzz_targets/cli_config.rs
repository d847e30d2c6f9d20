//! TOML configuration-file deserialization into the CLI's config schema.

#![no_main]

use kairos_cli::config::RunConfig;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        let _ = toml::from_str::<RunConfig>(text);
    }
});
