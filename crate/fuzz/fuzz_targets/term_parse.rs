#![no_main]

use libfuzzer_sys::fuzz_target;
use tropical::smallstep::Term;
use tropical::Cost;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(term) = text.parse::<Term<u32, Cost>>() {
        let printed = term.to_string();
        assert_eq!(printed.parse::<Term<u32, Cost>>().unwrap(), term);
    }
});
