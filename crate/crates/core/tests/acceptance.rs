//! Acceptance criteria. Each criterion prints one PASS/FAIL line; the test
//! fails if any criterion does.

use std::time::Instant;

use num_bigint::BigUint;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use pcompact::catalog::{build, exponents, monomial_generators, GroupSpec};
use pcompact::closed_forms::{theorem_a, theorem_c, ClosedFormGroup};
use pcompact::counting::{
    count_burnside_classes, count_burnside_full, count_formula_general, exponent_product, solomon_sum,
    torsion_census, torsion_divides_sylow,
};
use pcompact::grassmannian::{build_orbits_with_root, distinguished_in, enumerate_distinguished, theorem_b};
use pcompact::matgroup::{close_matrices, FiniteMatrixGroup};
use pcompact::oracle::{orbit_count_bruteforce, DEFAULT_ORACLE_CAP};
use pcompact::snf::{determinant, kernel_size, smith_valuations};
use pcompact::{Modulus, SquareMatrix};

type Check = std::result::Result<(), String>;
type Criterion = (&'static str, fn() -> Check);
/// Torsion valuations, class size and centralizer order of a class.
type TorsionClass = (Vec<u32>, u64, u64);

const EXCEPTIONAL: [(GroupSpec, ClosedFormGroup); 4] = [
    (GroupSpec::G12, ClosedFormGroup::X12),
    (GroupSpec::G24, ClosedFormGroup::X24),
    (GroupSpec::G29, ClosedFormGroup::X29),
    (GroupSpec::G31, ClosedFormGroup::X31),
];

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Check {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn group(spec: GroupSpec, k: u32) -> Result<FiniteMatrixGroup, String> {
    let m = spec.working_modulus(k).map_err(|e| e.to_string())?;
    build(&spec, m).map_err(|e| format!("{spec}: {e}"))
}

fn big(n: u64) -> BigUint {
    BigUint::from(n)
}

fn group_orders() -> Check {
    for (spec, _) in EXCEPTIONAL {
        let g = group(spec, 1)?;
        ensure(g.order() as u64 == spec.expected_order(), || format!("{spec}: order {}", g.order()))?;
    }
    Ok(())
}

fn x24_anchor() -> Check {
    let g = group(GroupSpec::G24, 1)?;
    let table = g.conjugacy_classes().map_err(|e| e.to_string())?;
    let exps = exponents(&GroupSpec::G24).unwrap();
    let counts = [
        ("burnside", count_burnside_full(&g, 1).map(|r| r.count)),
        ("classes", count_burnside_classes(&g, &table, 1).map(|r| r.count)),
        ("formula", count_formula_general(&g, &table, exps.as_slice(), 1).map(|r| r.count)),
        ("oracle", orbit_count_bruteforce(&g, 1, DEFAULT_ORACLE_CAP)),
    ];
    for (name, c) in counts {
        let c = c.map_err(|e| format!("{name}: {e}"))?;
        ensure(c == big(2), || format!("{name} gives {c}"))?;
    }
    Ok(())
}

fn theorem_c_reproduction() -> Check {
    for (spec, cf) in EXCEPTIONAL {
        let g = group(spec, 3)?;
        for k in 1..=3 {
            let got = count_burnside_full(&g, k).map_err(|e| e.to_string())?.count;
            let want = theorem_c(cf, k).map_err(|e| e.to_string())?;
            ensure(got == want, || format!("{spec} k={k}: burnside {got}, closed form {want}"))?;
        }
    }
    Ok(())
}

/// The rendered Smith diagonal of `x - I`, with 0 for saturated entries.
fn diagonal(x: &SquareMatrix) -> Vec<u64> {
    let d = smith_valuations(&x.minus_identity()).diagonal();
    let mut v: Vec<u64> = d.iter().map(|b| b.try_into().unwrap()).collect();
    v.sort_unstable_by_key(|&e| if e == 0 { u64::MAX } else { e });
    v
}

fn class_size_in(g: &FiniteMatrixGroup, x: &SquareMatrix) -> usize {
    let order = g.order() as u64;
    let mut class: Vec<Vec<u64>> = g
        .elements()
        .iter()
        .map(|h| {
            let h_inv = h.pow(order - 1);
            h.multiply(x).unwrap().multiply(&h_inv).unwrap().entries().to_vec()
        })
        .collect();
    class.sort();
    class.dedup();
    class.len()
}

fn table_one() -> Check {
    let m = Modulus::new(2, 5).unwrap();
    let gens = GroupSpec::G24.source().unwrap().generators_at(m).map_err(|e| e.to_string())?;
    let (a, b, c) = (&gens[0], &gens[1], &gens[2]);
    let id = SquareMatrix::identity(3, m);
    let ac = a.multiply(c).unwrap();
    let ab = a.multiply(b).unwrap();
    let rows: [(&str, SquareMatrix, [u64; 3]); 8] = [
        ("I", id.clone(), [0, 0, 0]),
        ("-I", id.neg(), [2, 2, 2]),
        ("c", c.clone(), [1, 0, 0]),
        ("-c", c.neg(), [1, 2, 0]),
        ("ac", ac.clone(), [1, 1, 0]),
        ("-ac", ac.neg(), [1, 1, 2]),
        ("ab", ab.clone(), [1, 1, 0]),
        ("-ab", ab.neg(), [1, 1, 4]),
    ];
    let normalize = |d: [u64; 3]| {
        let mut v = d.to_vec();
        v.sort_unstable_by_key(|&e| if e == 0 { u64::MAX } else { e });
        v
    };
    for (name, x, want) in &rows {
        let got = diagonal(x);
        ensure(got == normalize(*want), || format!("{name}: diagonal {got:?}, expected {want:?}"))?;
    }
    let m2 = Modulus::new(2, 1).unwrap();
    let reduced: Vec<SquareMatrix> = gens.iter().map(|g| g.reduce_to(m2).unwrap()).collect();
    let gl3 = close_matrices(reduced, 1000).map_err(|e| e.to_string())?;
    ensure(gl3.order() == 168, || format!("image mod 2 has order {}", gl3.order()))?;
    let sizes: Vec<usize> = [&id, c, &ac, &ab]
        .iter()
        .map(|x| class_size_in(&gl3, &x.reduce_to(m2).unwrap()))
        .collect();
    ensure(sizes == [1, 21, 56, 42], || format!("class sizes mod 2: {sizes:?}"))
}

fn torsion_censuses() -> Check {
    let expected: [(GroupSpec, Vec<TorsionClass>); 4] = [
        (GroupSpec::G12, vec![(vec![1], 8, 6)]),
        (
            GroupSpec::G24,
            vec![(vec![1, 1, 1], 1, 336), (vec![1], 21, 16), (vec![1], 56, 6), (vec![2], 42, 8)],
        ),
        (GroupSpec::G29, vec![(vec![1], 384, 20)]),
        (GroupSpec::G31, vec![(vec![1], 2304, 20)]),
    ];
    for (spec, want) in expected {
        let g = group(spec, 1)?;
        let table = g.conjugacy_classes().map_err(|e| e.to_string())?;
        let census = torsion_census(&g, &table);
        let mut got: Vec<TorsionClass> = census
            .iter()
            .filter(|r| !r.torsion_vals.is_empty())
            .map(|r| (r.torsion_vals.clone(), r.class_size, r.centralizer_order))
            .collect();
        let mut want = want;
        got.sort();
        want.sort();
        ensure(got == want, || format!("{spec}: torsion classes {got:?}, expected {want:?}"))?;
    }
    Ok(())
}

fn oracle_agreement() -> Check {
    let cases = [
        (GroupSpec::G12, vec![1, 2, 3]),
        (GroupSpec::G24, vec![1, 2, 3]),
        (GroupSpec::G29, vec![1, 2]),
        (GroupSpec::G31, vec![1, 2]),
    ];
    for (spec, ks) in cases {
        let g = group(spec, *ks.iter().max().unwrap())?;
        for k in ks {
            let fast = count_burnside_full(&g, k).map_err(|e| e.to_string())?.count;
            let slow = orbit_count_bruteforce(&g, k, DEFAULT_ORACLE_CAP).map_err(|e| e.to_string())?;
            ensure(fast == slow, || format!("{spec} k={k}: burnside {fast}, oracle {slow}"))?;
        }
    }
    Ok(())
}

fn theorem_b_agreement() -> Check {
    let grid = [(3, 1, 2, 7), (3, 3, 3, 7), (4, 2, 3, 5), (4, 4, 2, 5), (4, 1, 2, 5), (6, 2, 2, 7)];
    let mut mismatches = Vec::new();
    for (m, s, n, p) in grid {
        let spec = GroupSpec::Family2a { m, s, n, p };
        if m == s && n == 2 {
            ensure(spec.validate().is_err(), || format!("{spec} accepted"))?;
            ensure(theorem_b(m, s, n, p, 1).is_err(), || format!("theorem_b accepted {spec}"))?;
            ensure(enumerate_distinguished(m, s, n, p, 1, false).is_err(), || format!("domain accepted {spec}"))?;
            continue;
        }
        for k in 1..=2u32 {
            if (p as u128).pow(k * n as u32) > 1 << 24 {
                continue;
            }
            let formula = theorem_b(m, s, n, p, k).map_err(|e| e.to_string())?;
            let domain = enumerate_distinguished(m, s, n, p, k, false).map_err(|e| e.to_string())?.count;
            let g = group(spec, k)?;
            let burnside = count_burnside_full(&g, k).map_err(|e| e.to_string())?.count;
            if formula != domain || domain != burnside {
                mismatches.push(format!("{spec} k={k}: theoremB {formula}, domain {domain}, burnside {burnside}"));
            }
        }
    }
    ensure(mismatches.is_empty(), || mismatches.join("; "))
}

fn theorem_a_property() -> Check {
    let specs = [
        GroupSpec::Sphere { m: 4, p: 5 },
        GroupSpec::Sphere { m: 3, p: 7 },
        GroupSpec::Sphere { m: 6, p: 7 },
        GroupSpec::Family2b { m: 5, p: 11 },
    ];
    for spec in specs {
        let g = group(spec, 2)?;
        let exps = exponents(&spec).unwrap();
        for k in 1..=2 {
            let a = theorem_a(exps.as_slice(), spec.prime(), k).map_err(|e| e.to_string())?;
            let b = count_burnside_full(&g, k).map_err(|e| e.to_string())?.count;
            ensure(a == b, || format!("{spec} k={k}: theoremA {a}, burnside {b}"))?;
        }
    }
    Ok(())
}

fn solomon_identity() -> Check {
    for (spec, _) in EXCEPTIONAL {
        let g = group(spec, 1)?;
        let table = g.conjugacy_classes().map_err(|e| e.to_string())?;
        let exps = exponents(&spec).unwrap();
        for k in 1..=2 {
            let lhs = solomon_sum(&table, spec.prime(), k);
            let rhs = exponent_product(exps.as_slice(), spec.prime(), k);
            ensure(lhs == rhs, || format!("{spec} k={k}: {lhs} != {rhs}"))?;
        }
    }
    Ok(())
}

fn x34_integrality() -> Check {
    for k in 1..=8 {
        theorem_c(ClosedFormGroup::X34, k).map_err(|e| format!("k={k}: {e}"))?;
    }
    let v = theorem_c(ClosedFormGroup::X34, 1).unwrap();
    ensure(v == big(7), || format!("X34 at k=1 is {v}"))
}

fn random_unimodular(rng: &mut ChaCha8Rng, l: usize, m: Modulus) -> SquareMatrix {
    loop {
        let rows: Vec<Vec<i64>> =
            (0..l).map(|_| (0..l).map(|_| rng.gen_range(0..m.value() as i64)).collect()).collect();
        let u = SquareMatrix::from_rows(&rows, m).unwrap();
        if !determinant(&u).value().is_multiple_of(m.p()) {
            return u;
        }
    }
}

fn invariant_suites() -> Check {
    // kernel lifting and Sylow divisibility
    for (spec, _) in EXCEPTIONAL {
        let g = group(spec, 3)?;
        for w in g.elements() {
            let a = w.minus_identity();
            let trivial_mod_p = kernel_size(&a, 1).unwrap() == big(1);
            for n in 2..=3 {
                if trivial_mod_p {
                    ensure(kernel_size(&a, n).unwrap() == big(1), || format!("{spec}: kernel appears at n={n}"))?;
                }
            }
        }
        let table = g.conjugacy_classes().map_err(|e| e.to_string())?;
        let census = torsion_census(&g, &table);
        ensure(torsion_divides_sylow(&census, g.order() as u64, spec.prime()), || {
            format!("{spec}: torsion exceeds the Sylow order")
        })?;
    }

    // Smith valuations under unimodular transforms
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    for trial in 0..1000 {
        let p = [2u64, 3, 5, 7][trial % 4];
        let m = Modulus::new(p, rng.gen_range(1..=4)).unwrap();
        let l = rng.gen_range(1..=5);
        let rows: Vec<Vec<i64>> = (0..l)
            .map(|_| (0..l).map(|_| rng.gen_range(0..m.value() as i64) * p.pow(rng.gen_range(0..2)) as i64).collect())
            .collect();
        let a = SquareMatrix::from_rows(&rows, m).unwrap();
        let u = random_unimodular(&mut rng, l, m);
        let v = random_unimodular(&mut rng, l, m);
        let uav = u.multiply(&a).unwrap().multiply(&v).unwrap();
        ensure(smith_valuations(&uav) == smith_valuations(&a), || format!("trial {trial}: {a:?}"))?;
    }

    // primitive-root independence of the family 2a domain count, and of the
    // group-level orbit count at k = 1
    let grid: [(u64, u64, usize, u64); 5] = [(3, 1, 2, 7), (3, 3, 3, 7), (4, 2, 3, 5), (4, 1, 2, 5), (6, 2, 2, 7)];
    for (m, s, n, p) in grid {
        let canonical = count_burnside_full(&group(GroupSpec::Family2a { m, s, n, p }, 1)?, 1)
            .map_err(|e| e.to_string())?
            .count;
        for k in 1..=3u32 {
            let Some(q) = p.checked_pow(k).filter(|&q| q <= 343) else { continue };
            let modulus = Modulus::new(p, k).unwrap();
            let expected = enumerate_distinguished(m, s, n, p, k, false).map_err(|e| e.to_string())?.count;
            let roots: Vec<_> = (1..q as i128)
                .map(|x| modulus.residue(x))
                .filter(|c| c.multiplicative_order() == Some(m))
                .collect();
            ensure(!roots.is_empty(), || format!("no order-{m} root mod {q}"))?;
            for c in roots {
                let orbits = build_orbits_with_root(m, s, c).map_err(|e| e.to_string())?;
                let got = distinguished_in(&orbits, n, false).map_err(|e| e.to_string())?.count;
                ensure(got == expected, || format!("G({m},{s},{n}) mod {q}, root {}: {got} != {expected}", c.value()))?;
                if k == 1 {
                    let g = close_matrices(monomial_generators(s, n, c).unwrap(), 100_000).map_err(|e| e.to_string())?;
                    let b = count_burnside_full(&g, 1).map_err(|e| e.to_string())?.count;
                    ensure(b == canonical, || format!("G({m},{s},{n}) root {}: burnside {b} != {canonical}", c.value()))?;
                }
            }
        }
    }
    Ok(())
}

#[test]
fn acceptance() {
    let criteria: [Criterion; 11] = [
        ("1 group orders 48/336/7680/46080", group_orders),
        ("2 X24 at k=1 is 2 by every method", x24_anchor),
        ("3 closed forms for X12/X24/X29/X31, k=1..3", theorem_c_reproduction),
        ("4 G24 Smith diagonals and GL3(F2) class sizes", table_one),
        ("5 torsion censuses", torsion_censuses),
        ("6 brute-force orbit agreement", oracle_agreement),
        ("7 family 2a three-way agreement", theorem_b_agreement),
        ("8 non-modular product formula", theorem_a_property),
        ("9 Solomon identity", solomon_identity),
        ("10 X34 integrality and k=1 value", x34_integrality),
        ("11 invariant suites", invariant_suites),
    ];
    let mut failed = Vec::new();
    for (name, check) in criteria {
        let start = Instant::now();
        let outcome = check();
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(()) => println!("PASS  criterion {name} ({secs:.2}s)"),
            Err(why) => {
                println!("FAIL  criterion {name} ({secs:.2}s): {why}");
                failed.push(name);
            }
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
