use std::collections::BTreeMap;
use std::sync::Arc;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::*;
use crate::gfq::FqField;
use crate::ppolar::random::random_vector;
use crate::ppolar::CommAlgebra;
use crate::wittmod::WittVector;

fn truncated(p: u32, m: u32, low: u32, high: u32) -> Arc<PPolarAlgebra> {
    let f = FqField::new(p, m).unwrap();
    Arc::new(PPolarAlgebra::polarize(&CommAlgebra::truncated(f, low, high).unwrap()).unwrap())
}

fn mixed(p: u32) -> Arc<PPolarAlgebra> {
    let f = FqField::new(p, 1).unwrap();
    let r = CommAlgebra::product_of_fields(f.clone(), 1)
        .direct_product(&CommAlgebra::truncated(f, 1, 3).unwrap())
        .unwrap();
    Arc::new(PPolarAlgebra::polarize(&r).unwrap())
}

fn algebras() -> Vec<Arc<PPolarAlgebra>> {
    vec![
        truncated(2, 1, 1, 4),
        truncated(3, 1, 1, 4),
        truncated(2, 2, 1, 3),
        mixed(2),
        mixed(3),
    ]
}

#[test]
fn zero_is_valid() {
    let a = truncated(2, 1, 1, 4);
    let z = CoWittElement::zero(a);
    assert!(cw_validate(&z));
    assert_eq!(z.find_witness(), Some((0, 0)));
}

#[test]
fn unit_tail_over_a_field_is_invalid() {
    let f = FqField::new(3, 2).unwrap();
    let a = crate::wittmod::base_algebra(&f);
    let x = CoWittElement::new(a.clone(), vec![FqElement::ONE], BTreeMap::new(), (0, 0)).unwrap();
    assert!(!cw_validate(&x));
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for _ in 0..10 {
        let y = random_valid(&mut rng, &a, 3);
        assert!(is_zero(y.tail()));
    }
}

#[test]
fn nilpotent_tail_with_exception() {
    let a = truncated(2, 1, 1, 4);
    let (x1, x2) = (a.basis(0), a.basis(1));
    let mut ex = BTreeMap::new();
    ex.insert(0, x1);
    let x = CoWittElement::new(a.clone(), x2.clone(), ex, (1, 1)).unwrap();
    assert!(cw_validate(&x));
    assert!(x.witness_holds((1, 1)));
    assert!(!x.witness_holds((1, 0)));
    assert_eq!(x.find_witness(), Some((1, 1)));
    // the ideal (x^2) squares to zero, the ideal (x) needs two squarings
    assert!(!x.witness_holds((0, 1)));
    assert!(x.witness_holds((0, 2)));
}

#[test]
fn adding_zero() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for a in algebras() {
        let x = random_valid(&mut rng, &a, 3);
        let z = CoWittElement::zero(a.clone());
        assert_eq!(cw_add(&x, &z).unwrap(), x);
        assert_eq!(cw_add(&z, &x).unwrap(), x);
    }
}

#[test]
fn finitely_supported_sums_match_cwu() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for a in algebras() {
        for len in 1..=4 {
            let cx = CwuClass::new(
                &WittVector::new(
                    a.clone(),
                    (0..len)
                        .map(|_| random_vector(&mut rng, a.field(), a.dim()))
                        .collect(),
                )
                .unwrap(),
            );
            let cy = CwuClass::new(
                &WittVector::new(
                    a.clone(),
                    (0..len)
                        .map(|_| random_vector(&mut rng, a.field(), a.dim()))
                        .collect(),
                )
                .unwrap(),
            );
            let (x, y) = (CoWittElement::from_cwu(&cx), CoWittElement::from_cwu(&cy));
            assert_eq!(x.to_cwu().unwrap(), cx);
            let s = cw_add(&x, &y).unwrap();
            assert_eq!(s.to_cwu().unwrap(), cx.add(&cy).unwrap());
            assert_eq!(cw_V(&x).to_cwu().unwrap(), cx.verschiebung());
            assert_eq!(cw_F(&x).to_cwu().unwrap(), cx.frobenius());
        }
    }
}

#[test]
fn commutative_and_associative() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for a in algebras() {
        for _ in 0..3 {
            let x = random_valid(&mut rng, &a, 3);
            let y = random_valid(&mut rng, &a, 3);
            let z = random_valid(&mut rng, &a, 2);
            let xy = cw_add(&x, &y).unwrap();
            assert!(cw_validate(&xy));
            assert_eq!(xy, cw_add(&y, &x).unwrap());
            assert_eq!(
                cw_add(&xy, &z).unwrap(),
                cw_add(&x, &cw_add(&y, &z).unwrap()).unwrap()
            );
        }
    }
}

#[test]
fn limit_is_independent_of_window_offset() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for a in algebras() {
        for _ in 0..3 {
            let x = random_valid(&mut rng, &a, 3);
            let y = random_valid(&mut rng, &a, 3);
            let late = StabilizeOptions {
                start: 5,
                ..StabilizeOptions::default()
            };
            assert_eq!(cw_add(&x, &y).unwrap(), cw_add_with(&x, &y, late).unwrap());
        }
    }
}

#[test]
fn frobenius_verschiebung_is_p() {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    for a in algebras() {
        let p = a.p();
        for _ in 0..3 {
            let x = random_valid(&mut rng, &a, 3);
            let px = cw_multiple(&x, p).unwrap();
            assert_eq!(cw_F(&cw_V(&x)), px);
            assert_eq!(cw_V(&cw_F(&x)), px);
        }
        let z = CoWittElement::zero(a.clone());
        assert!(cw_F(&z).is_zero() && cw_V(&z).is_zero());
    }
}

#[test]
fn tiny_cap_reports_no_stabilization() {
    let a = truncated(2, 1, 1, 4);
    let x = CoWittElement::new(a.clone(), a.basis(0), BTreeMap::new(), (0, 2)).unwrap();
    let opts = StabilizeOptions {
        repeats: Some(5),
        cap: Some(2),
        start: 0,
    };
    assert!(matches!(
        cw_add_with(&x, &x, opts),
        Err(Error::StabilizationNotDetected { .. })
    ));
}

#[test]
fn invalid_inputs_are_rejected() {
    let f = FqField::new(2, 1).unwrap();
    let a = crate::wittmod::base_algebra(&f);
    let x = CoWittElement::new(a.clone(), vec![FqElement::ONE], BTreeMap::new(), (0, 0)).unwrap();
    assert!(matches!(cw_add(&x, &x), Err(Error::Precondition(_))));
}

#[test]
fn json_round_trip() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let a = mixed(3);
    let x = random_valid(&mut rng, &a, 4);
    let text = serde_json::to_string(&x.to_json()).unwrap();
    let back = CoWittElement::from_json(a, &serde_json::from_str(&text).unwrap()).unwrap();
    assert_eq!(back, x);
}
