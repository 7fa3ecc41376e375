use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use pcompact::catalog::{build, GroupSpec};
use pcompact::oracle::{fixed_points_bruteforce, DEFAULT_ORACLE_CAP};
use pcompact::snf::kernel_size;

#[test]
fn fixed_point_scan_matches_kernel_size() {
    let mut rng = ChaCha8Rng::seed_from_u64(29);
    let cases = [
        (GroupSpec::G12, 3),
        (GroupSpec::G24, 3),
        (GroupSpec::G29, 1),
        (GroupSpec::G31, 1),
        (GroupSpec::Family2a { m: 3, s: 3, n: 3, p: 7 }, 1),
        (GroupSpec::Sphere { m: 6, p: 7 }, 2),
    ];
    for (spec, max_n) in cases {
        let g = build(&spec, spec.working_modulus(max_n).unwrap()).unwrap();
        for _ in 0..500 {
            let w = g.element(rng.gen_range(0..g.order()));
            let n = rng.gen_range(1..=max_n);
            let scan = fixed_points_bruteforce(w, n, DEFAULT_ORACLE_CAP).unwrap();
            assert_eq!(scan, kernel_size(&w.minus_identity(), n).unwrap(), "{spec} n={n}");
        }
    }
}

#[test]
fn torsion_element_of_g29_fixes_five_points_mod_five() {
    let g = build(&GroupSpec::G29, GroupSpec::G29.working_modulus(2).unwrap()).unwrap();
    let table = g.conjugacy_classes().unwrap();
    let t = table.records.iter().find(|r| r.has_torsion()).unwrap();
    let w = g.element(t.representative);
    assert_eq!(fixed_points_bruteforce(w, 1, DEFAULT_ORACLE_CAP).unwrap(), 5u32.into());
    let diag = pcompact::snf::smith_valuations(&w.minus_identity()).diagonal();
    let mut diag: Vec<u64> = diag.iter().map(|d| d.try_into().unwrap()).collect();
    diag.sort_unstable();
    assert_eq!(diag, vec![1, 1, 1, 5]);
}
