#![no_main]

use libfuzzer_sys::fuzz_target;
use mtsem_core::embeddings::load_embeddings;

fuzz_target!(|data: &[u8]| {
    let Ok(loaded) = load_embeddings(data) else { return };
    let t = loaded.table;
    assert!(t.iter().all(|(_, v)| v.len() == t.dim()));
    if t.dim() > 1 && t.iter().all(|(_, v)| v.iter().all(|x| x.is_finite())) {
        let again = load_embeddings(t.to_text().as_bytes()).expect("serialised table reparses");
        assert_eq!(t, again.table);
    }
});
