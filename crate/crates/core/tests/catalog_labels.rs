use std::time::Instant;

use entangle_core::catalog::{entries, CatalogState};
use entangle_core::classify::{classify2, classify3, ClassifyConfig};

#[test]
fn every_entry_classifies_as_expected() {
    let cfg = ClassifyConfig::default();
    let mut mismatches = Vec::new();
    for e in entries() {
        let start = Instant::now();
        let got = match &e.state {
            CatalogState::Three(t) => classify3(t, &cfg),
            CatalogState::Two(t) => classify2(t, &cfg),
        };
        let elapsed = start.elapsed();
        match got {
            Ok(c) if c.label.same_class(&e.expected) => {
                println!("ok   {:<18} {} [{elapsed:.2?}]", e.name, c.label)
            }
            Ok(c) => {
                println!("FAIL {:<18} got {} expected {} :: {}", e.name, c.label, e.expected, c.evidence);
                mismatches.push(e.name);
            }
            Err(err) => {
                println!("ERR  {:<18} {err}", e.name);
                mismatches.push(e.name);
            }
        }
    }
    assert!(mismatches.is_empty(), "mismatches: {mismatches:?}");
}
