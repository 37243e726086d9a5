#![no_main]

use libfuzzer_sys::fuzz_target;
use mtsem_core::retrofit::parse_lexicon;

fuzz_target!(|data: &[u8]| {
    let Ok(lex) = parse_lexicon(data) else { return };
    for w in lex.words() {
        let ns = lex.neighbors(w).unwrap();
        assert!(!ns.contains(w));
        for n in ns {
            assert!(lex.neighbors(n).unwrap().contains(w));
        }
    }
});
