use std::time::Instant;

use s1web_core::identities::{identity_check, typo_probe, IdentityId, TypoProbe};

#[test]
fn catalog_reduces_to_zero_quickly() {
    let start = Instant::now();
    for id in IdentityId::ALL {
        let v = identity_check(id);
        assert!(v.holds, "{id}: {} terms left, witness {:?}", v.residual_terms, v.witness);
    }
    assert!(start.elapsed().as_secs_f64() < 10.0);
}

#[test]
fn typo_probes() {
    let (printed_f, w) = typo_probe(TypoProbe::FirstIntegralNumerator);
    assert!(!printed_f && w.is_some());
    let (printed_web, w) = typo_probe(TypoProbe::WebConstantPrinted);
    assert!(!printed_web && w.is_some());
    let (fixed_web, w) = typo_probe(TypoProbe::WebConstantCorrected);
    assert!(fixed_web && w.is_none());
}
