#![no_main]

use libfuzzer_sys::fuzz_target;
use tropical::parsegame::{best_parse, Grammar, ParseOptions, EXPR_GRAMMAR};
use tropical::Policy;

fuzz_target!(|data: &[u8]| {
    let Ok(input) = std::str::from_utf8(data) else {
        return;
    };
    // Keep inputs small: the game grows quickly with the token count.
    if input.len() > 48 {
        return;
    }
    let grammar = Grammar::load(EXPR_GRAMMAR).unwrap();
    let fm = best_parse(&grammar, "E", input, ParseOptions::default()).unwrap();
    let am = best_parse(
        &grammar,
        "E",
        input,
        ParseOptions {
            policy: Policy::AllMinimals,
            ..ParseOptions::default()
        },
    )
    .unwrap();
    assert_eq!(fm.cost, am.cost);
    for spans in &am.error_spans {
        assert_eq!(spans.iter().map(|s| s.cost).sum::<u64>(), am.cost);
    }
});
