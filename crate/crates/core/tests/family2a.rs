use num_bigint::BigUint;
use std::collections::HashSet;

use pcompact::catalog::{build, GroupSpec};
use pcompact::counting::count_burnside_full;
use pcompact::grassmannian::{
    enumerate_distinguished, enumerate_orbit_representatives, orbit_count_family2a, theorem_b,
};
use pcompact::oracle::{orbit_count_bruteforce, DEFAULT_ORACLE_CAP};

const GRID: [(u64, u64, usize, u64); 8] = [
    (3, 1, 2, 7),
    (3, 3, 3, 7),
    (4, 2, 3, 5),
    (4, 1, 2, 5),
    (6, 2, 2, 7),
    (6, 6, 3, 7),
    (4, 4, 3, 5),
    (3, 1, 3, 7),
];

#[test]
fn orbit_count_matches_burnside_and_flood_fill() {
    for (m, s, n, p) in GRID {
        let spec = GroupSpec::Family2a { m, s, n, p };
        let g = build(&spec, spec.working_modulus(2).unwrap()).unwrap();
        for k in 1..=2 {
            let closed = orbit_count_family2a(m, s, n, p, k).unwrap();
            let domain = enumerate_orbit_representatives(m, s, n, p, k, false).unwrap().count;
            let burnside = count_burnside_full(&g, k).unwrap().count;
            assert_eq!(closed, burnside, "{spec} k={k}");
            assert_eq!(domain, burnside, "{spec} k={k}");
            if (p as u128).pow(k * n as u32) <= 1 << 16 {
                assert_eq!(orbit_count_bruteforce(&g, k, DEFAULT_ORACLE_CAP).unwrap(), burnside, "{spec} k={k}");
            }
        }
    }
}

#[test]
fn closed_form_counts_distinguished_tuples() {
    for (m, s, n, p) in GRID {
        for k in 1..=2 {
            assert_eq!(
                theorem_b(m, s, n, p, k).unwrap(),
                enumerate_distinguished(m, s, n, p, k, false).unwrap().count,
                "G({m},{s},{n}) p={p} k={k}"
            );
        }
    }
}

#[test]
fn closed_form_is_exact_for_s_one_and_overcounts_otherwise() {
    for (m, s, n, p) in GRID {
        for k in 1..=2 {
            let b = theorem_b(m, s, n, p, k).unwrap();
            let truth = orbit_count_family2a(m, s, n, p, k).unwrap();
            if s == 1 {
                assert_eq!(b, truth);
            } else {
                assert!(b > truth, "G({m},{s},{n}) p={p} k={k}");
            }
        }
    }
}

/// Canonical form of `v` under G(m,s,n): the least image over the group.
fn orbit_key(g: &pcompact::matgroup::FiniteMatrixGroup, v: &[u64]) -> Vec<u64> {
    g.elements().iter().map(|w| w.apply(v)).min().unwrap()
}

#[test]
fn representatives_lie_in_distinct_orbits() {
    for (m, s, n, p) in [(3, 3, 3, 7), (4, 2, 3, 5), (6, 2, 2, 7)] {
        let spec = GroupSpec::Family2a { m, s, n, p };
        let g = build(&spec, spec.working_modulus(1).unwrap()).unwrap();
        let reps = enumerate_orbit_representatives(m, s, n, p, 1, true).unwrap().elements.unwrap();
        let keys: HashSet<Vec<u64>> = reps.iter().map(|v| orbit_key(&g, v)).collect();
        assert_eq!(keys.len(), reps.len(), "{spec}");
        assert_eq!(BigUint::from(keys.len()), count_burnside_full(&g, 1).unwrap().count);

        // distinguished tuples reach every orbit, but some orbits twice
        let dist = enumerate_distinguished(m, s, n, p, 1, true).unwrap().elements.unwrap();
        let dist_keys: HashSet<Vec<u64>> = dist.iter().map(|v| orbit_key(&g, v)).collect();
        assert_eq!(dist_keys, keys);
        assert!(dist.len() > keys.len());
    }
}
