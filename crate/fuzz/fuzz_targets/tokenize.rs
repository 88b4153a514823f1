#![no_main]

use libfuzzer_sys::fuzz_target;
use tropical::parsegame::{Grammar, EXPR_GRAMMAR};

fuzz_target!(|data: &[u8]| {
    let Ok(input) = std::str::from_utf8(data) else {
        return;
    };
    let grammar = Grammar::load(EXPR_GRAMMAR).unwrap();
    let tokens = grammar.tokenize(input);
    let mut last = 0;
    for t in &tokens.tokens {
        assert!(t.char_start >= last && t.char_start < t.char_end);
        assert_eq!(&input[t.byte_start..t.byte_end], t.text);
        last = t.char_end;
    }
    let blanks = input.chars().filter(|c| c.is_whitespace()).count() as u64;
    assert_eq!(
        tokens.nonblank_size(0, tokens.len()) + blanks,
        input.chars().count() as u64
    );
});
