#![no_main]

use libfuzzer_sys::fuzz_target;
use oam_qcrb::probe::{parse_probe_list, MescsConstraint};
use oam_qcrb::sweep::{parse_quantity_list, Axis, AxisRange, FigurePreset, OutputFormat};

// Every string-valued flag goes through one of these parsers.
fuzz_target!(|data: &[u8]| {
    let Ok(s) = std::str::from_utf8(data) else { return };
    if let Ok(range) = s.parse::<AxisRange>() {
        let _ = range.values();
    }
    let _ = parse_probe_list(s);
    let _ = parse_quantity_list(s);
    let _ = s.parse::<MescsConstraint>();
    let _ = s.parse::<Axis>();
    let _ = s.parse::<OutputFormat>();
    let _ = s.parse::<FigurePreset>();
});
