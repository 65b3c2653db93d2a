#![no_main]

use libfuzzer_sys::fuzz_target;

// NUL-separated argv after the program name. Parsing only, nothing runs.
fuzz_target!(|data: &[u8]| {
    let Ok(s) = std::str::from_utf8(data) else { return };
    let args = std::iter::once("oam-qcrb").chain(s.split('\0'));
    let _ = oam_qcrb_cli::check_args(args);
});
