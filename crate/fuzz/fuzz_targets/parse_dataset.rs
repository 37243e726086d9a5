#![no_main]

use libfuzzer_sys::fuzz_target;
use mtsem_core::corpus::parse_dataset;

fuzz_target!(|data: &[u8]| {
    let Ok(d) = parse_dataset(data) else { return };
    let again = parse_dataset(d.to_tsv().as_bytes()).expect("serialised dataset reparses");
    assert_eq!(d, again);
    for g in d.gold_vectors() {
        assert_eq!(g.len(), d.n_features());
        assert!(g.values.iter().all(|v| (0.0..=1.0).contains(v)));
    }
    assert_eq!(d.quantifier_distribution().total(), d.n_annotations());
});
