#![no_main]

use fairgame::format::{emit_pgsolver, parse_pgsolver};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok((game, labels)) = parse_pgsolver(text) {
        assert!(game.is_right_total());
        let labels: Vec<String> = labels.into_iter().map(Option::unwrap_or_default).collect();
        let (again, _) = parse_pgsolver(&emit_pgsolver(&game, &labels)).expect("emitted game parses");
        assert_eq!(again, game);
    }
});
