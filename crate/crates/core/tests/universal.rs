use std::time::Instant;

use wittpolar::wittuniv::{
    compute_universal_polys, ghost_round_trip, identities, polar_degree_check, WittKind,
};

fn families() -> Vec<(u32, usize)> {
    vec![
        (2, 1),
        (2, 2),
        (2, 3),
        (2, 4),
        (3, 1),
        (3, 2),
        (3, 3),
        (3, 4),
        (5, 1),
        (5, 2),
    ]
}

#[test]
fn every_family_round_trips_through_the_ghost_map() {
    for (p, n) in families() {
        for kind in WittKind::ALL {
            let t = Instant::now();
            let polys = compute_universal_polys(p, n, kind).unwrap();
            assert!(ghost_round_trip(p, n, kind, &polys), "p={p} n={n} {kind}");
            assert!(polys.iter().all(polar_degree_check), "p={p} n={n} {kind}");
            let terms: usize = polys.iter().map(|u| u.poly.len()).sum();
            eprintln!("p={p} n={n} {kind}: {terms} terms in {:?}", t.elapsed());
        }
    }
}

#[test]
fn teichmuller_identities_in_the_free_polar_ring() {
    for p in [2, 3, 5] {
        assert!(
            identities::teichmuller_identity(p, p as usize).unwrap(),
            "p={p}"
        );
        assert!(identities::teichmuller_product_mod_p(p).unwrap(), "p={p}");
    }
    assert!(identities::teichmuller_identity(3, 2).unwrap());
    assert!(identities::teichmuller_identity(5, 3).unwrap());
}

#[test]
fn symbolic_group_and_module_laws() {
    for (p, n) in [(2, 3), (3, 3)] {
        assert!(identities::group_laws(p, n).unwrap());
        assert!(identities::frobenius_verschiebung(p, n).unwrap());
        assert!(identities::scalar_commutation(p, n).unwrap());
    }
}
