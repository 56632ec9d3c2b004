#![no_main]

use fairgame::format::{emit, parse};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(game) = parse(text) {
        assert!(game.validate().is_empty(), "parser accepted an invalid game");
        let again = parse(&emit(&game)).expect("emitted game parses");
        assert_eq!(again, game);
    }
});
