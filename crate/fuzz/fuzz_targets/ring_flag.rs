#![no_main]

use haar_modular::rings::{Ring, RingDescriptor};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(s) = std::str::from_utf8(data) else { return };
    if let Ok(d) = s.parse::<RingDescriptor>() {
        // Display must produce a flag that parses back to the same descriptor
        assert_eq!(d.to_string().parse::<RingDescriptor>().ok(), Some(d.clone()));
        let _ = Ring::from_descriptor(&d);
    }
});
