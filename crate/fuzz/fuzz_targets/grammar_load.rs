#![no_main]

use libfuzzer_sys::fuzz_target;
use tropical::parsegame::Grammar;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(grammar) = Grammar::load(text) {
        // A loaded grammar prints back to an equivalent one.
        let again = Grammar::load(&grammar.to_string()).expect("printed grammar reloads");
        assert_eq!(again.productions().len(), grammar.productions().len());
    }
});
