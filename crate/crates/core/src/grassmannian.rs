//! Fundamental domains for the monomial groups `G(m,s,n)` acting on
//! `(Z/p^k)^n`.
//!
//! Let `c` have order `m` in `(Z/p^k)^x`, `H = <c>` and `K = <c^s>`. The
//! nonzero `H`-orbits `C_1, ..., C_N` (with `N = (p^k - 1)/m`) are indexed in
//! increasing order of their least representative, and `C_0 = {0}`. A tuple
//! `(y_1, ..., y_n)` in `C_{i_1} x ... x C_{i_n}` is distinguished when
//! `i_1 <= ... <= i_n`, each `y_j` with `j < n` is the minimum of its
//! `H`-orbit, and `y_n` is the minimum of its `K`-orbit.
//!
//! Distinguished tuples meet every orbit, and [`theorem_b`] counts them. For
//! `s > 1` they are not a fundamental domain: a tuple with a zero coordinate
//! lies in the same orbit as the tuples obtained by moving its last
//! coordinate anywhere in its `H`-orbit. [`enumerate_orbit_representatives`]
//! and [`orbit_count_family2a`] account for this and agree with Burnside
//! counts for every `s`.

use num_bigint::BigUint;
use num_traits::{One, Zero};

use crate::catalog::GroupSpec;
use crate::error::{Error, Result};
use crate::modp::{mth_root_of_unity, Modulus, Residue};

/// Largest `p^k` for which orbit tables are materialized.
pub const MAX_ORBIT_TABLE: u64 = 1 << 20;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Orbit {
    /// Least representative in `[1, p^k - 1]`, or 0 for `C_0`.
    pub minimum: u64,
    /// Elements of the orbit.
    pub elements: Vec<u64>,
    /// Least representative of each `K`-orbit inside this orbit, ascending.
    pub k_minima: Vec<u64>,
}

/// The partition of `Z/p^k` into `H`-orbits.
#[derive(Clone, Debug)]
pub struct OrbitStructure {
    pub p: u64,
    pub k: u32,
    pub m: u64,
    pub s: u64,
    pub c: Residue,
    /// `orbits[0] = C_0 = {0}`; the rest sorted by minimum.
    pub orbits: Vec<Orbit>,
    /// Orbit index of every residue.
    pub orbit_of: Vec<u32>,
}

impl OrbitStructure {
    /// Number `N` of nonzero orbits.
    pub fn nonzero_orbits(&self) -> usize {
        self.orbits.len() - 1
    }
}

fn check_params(m: u64, s: u64, p: u64, k: u32) -> Result<Modulus> {
    if k == 0 {
        return Err(Error::SpecInvalid("k must be at least 1".into()));
    }
    if s == 0 || !m.is_multiple_of(s) {
        return Err(Error::SpecInvalid(format!("s = {s} does not divide m = {m}")));
    }
    let modulus = Modulus::new(p, k).map_err(|e| Error::SpecInvalid(e.to_string()))?;
    if m == 0 || !(p - 1).is_multiple_of(m) {
        return Err(Error::SpecInvalid(format!("p = {p} is not 1 mod m = {m}")));
    }
    Ok(modulus)
}

/// Orbit structure for the canonical root of unity of order `m`.
pub fn build_orbits(m: u64, s: u64, p: u64, k: u32) -> Result<OrbitStructure> {
    let modulus = check_params(m, s, p, k)?;
    let c = mth_root_of_unity(m, modulus)?;
    build_orbits_with_root(m, s, c)
}

/// Orbit structure for a caller-supplied `c` of exact order `m`.
pub fn build_orbits_with_root(m: u64, s: u64, c: Residue) -> Result<OrbitStructure> {
    let modulus = c.modulus();
    let (p, k) = (modulus.p(), modulus.exp());
    check_params(m, s, p, k)?;
    if c.multiplicative_order() != Some(m) {
        return Err(Error::SpecInvalid(format!("{} does not have order {m} mod {modulus}", c.value())));
    }
    let q = modulus.value();
    if q > MAX_ORBIT_TABLE {
        return Err(Error::SpaceTooLarge(q as u128, MAX_ORBIT_TABLE as u128));
    }
    let cs = c.pow(s);
    let mut orbit_of = vec![u32::MAX; q as usize];
    orbit_of[0] = 0;
    let mut orbits = vec![Orbit { minimum: 0, elements: vec![0], k_minima: vec![0] }];
    for x in 1..q {
        if orbit_of[x as usize] != u32::MAX {
            continue;
        }
        let idx = orbits.len() as u32;
        let start = modulus.residue(x as i128);
        let mut elements = Vec::with_capacity(m as usize);
        let mut y = start;
        loop {
            orbit_of[y.value() as usize] = idx;
            elements.push(y.value());
            y = y * c;
            if y == start {
                break;
            }
        }
        let mut seen = vec![false; elements.len()];
        let mut k_minima = Vec::new();
        let mut sorted = elements.clone();
        sorted.sort_unstable();
        for &e in &sorted {
            let pos = elements.iter().position(|&z| z == e).expect("member");
            if seen[pos] {
                continue;
            }
            k_minima.push(e);
            let mut z = modulus.residue(e as i128);
            loop {
                let zp = elements.iter().position(|&w| w == z.value()).expect("K-orbit inside H-orbit");
                seen[zp] = true;
                z = z * cs;
                if z.value() == e {
                    break;
                }
            }
        }
        orbits.push(Orbit { minimum: x, elements, k_minima });
    }
    Ok(OrbitStructure { p, k, m, s, c, orbits, orbit_of })
}

/// A set of tuples: its size and, if requested, the tuples themselves.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Domain {
    pub count: BigUint,
    pub elements: Option<Vec<Vec<u64>>>,
}

fn family2a(m: u64, s: u64, n: usize, p: u64) -> Result<()> {
    GroupSpec::Family2a { m, s, n, p }.validate()
}

/// Enumerate distinguished tuples for `G(m,s,n)` on `(Z/p^k)^n`.
pub fn enumerate_distinguished(m: u64, s: u64, n: usize, p: u64, k: u32, materialize: bool) -> Result<Domain> {
    family2a(m, s, n, p)?;
    let orbits = build_orbits(m, s, p, k)?;
    distinguished_in(&orbits, n, materialize)
}

/// Enumerate distinguished tuples of length `n >= 1` over a given orbit structure.
pub fn distinguished_in(orbits: &OrbitStructure, n: usize, materialize: bool) -> Result<Domain> {
    walk_domain(orbits, n, materialize, false)
}

/// Enumerate orbit representatives of `G(m,s,n)` on `(Z/p^k)^n`.
///
/// These are the distinguished tuples, except that when some coordinate is
/// zero the last coordinate must be the minimum of its whole `H`-orbit: the
/// zero coordinate absorbs the determinant condition, so the last coordinate
/// can be moved by all of `H`, not only by `K`. Without a zero coordinate
/// every orbit of `G(m,1,n)` splits into exactly `s` orbits of `G(m,s,n)`.
pub fn enumerate_orbit_representatives(
    m: u64,
    s: u64,
    n: usize,
    p: u64,
    k: u32,
    materialize: bool,
) -> Result<Domain> {
    family2a(m, s, n, p)?;
    let orbits = build_orbits(m, s, p, k)?;
    representatives_in(&orbits, n, materialize)
}

pub fn representatives_in(orbits: &OrbitStructure, n: usize, materialize: bool) -> Result<Domain> {
    walk_domain(orbits, n, materialize, true)
}

fn walk_domain(orbits: &OrbitStructure, n: usize, materialize: bool, zero_frees_last: bool) -> Result<Domain> {
    if n == 0 {
        return Err(Error::SpecInvalid("n must be at least 1".into()));
    }
    let total = orbits.orbits.len();
    // k_tail[i] = number of K-orbit minima in orbits i..
    let mut k_tail = vec![0u64; total + 1];
    for i in (0..total).rev() {
        k_tail[i] = k_tail[i + 1] + orbits.orbits[i].k_minima.len() as u64;
    }
    let mut count = BigUint::zero();
    let mut out = materialize.then(Vec::new);
    // Nondecreasing orbit indices for the first n - 1 coordinates.
    let mut idx = vec![0usize; n - 1];
    loop {
        let last = idx.last().copied().unwrap_or(0);
        let h_only = zero_frees_last && idx.first() == Some(&0);
        count += if h_only { (total - last) as u64 } else { k_tail[last] };
        if let Some(out) = out.as_mut() {
            let prefix: Vec<u64> = idx.iter().map(|&i| orbits.orbits[i].minimum).collect();
            for orbit in &orbits.orbits[last..] {
                let choices = if h_only { std::slice::from_ref(&orbit.minimum) } else { &orbit.k_minima[..] };
                for &b in choices {
                    let mut t = prefix.clone();
                    t.push(b);
                    out.push(t);
                }
            }
        }
        // advance to the next nondecreasing sequence
        let Some(pos) = idx.iter().rposition(|&i| i + 1 < total) else {
            break;
        };
        let v = idx[pos] + 1;
        for slot in &mut idx[pos..] {
            *slot = v;
        }
    }
    Ok(Domain { count, elements: out })
}

fn binomial(n: u64, r: u64) -> BigUint {
    let mut acc = BigUint::one();
    for i in 0..r {
        acc = acc * BigUint::from(n - i) / BigUint::from(i + 1);
    }
    acc
}

/// Closed form `1 + N s + sum_{j=1}^{N} C(n-2+j, j) (N - j + 1) s`,
/// where `N = (p^k - 1)/m`.
pub fn theorem_b(m: u64, s: u64, n: usize, p: u64, k: u32) -> Result<BigUint> {
    family2a(m, s, n, p)?;
    if k == 0 {
        return Err(Error::SpecInvalid("k must be at least 1".into()));
    }
    let q = BigUint::from(p).pow(k);
    let big_n = (q - 1u32) / BigUint::from(m);
    let s_big = BigUint::from(s);
    let mut total = BigUint::one() + &big_n * &s_big;
    let n = n as u64;
    // C(n-2+j, j) updated incrementally: C(n-1+j, j+1) = C(n-2+j, j) (n-1+j)/(j+1)
    let mut binom = binomial(n - 1, 1);
    let mut j = BigUint::one();
    let mut jj = 1u64;
    while j <= big_n {
        total += &binom * (&big_n - &j + 1u32) * &s_big;
        binom = binom * BigUint::from(n - 1 + jj) / BigUint::from(jj + 1);
        j += 1u32;
        jj += 1;
    }
    Ok(total)
}

/// Number of orbits of `G(m,s,n)` on `(Z/p^k)^n`:
/// `C(N+n-1, n-1) + s C(N+n-1, n)` with `N = (p^k - 1)/m`. The first term
/// counts orbits with a zero coordinate, the second those without. Agrees
/// with [`theorem_b`] exactly when `s = 1`.
pub fn orbit_count_family2a(m: u64, s: u64, n: usize, p: u64, k: u32) -> Result<BigUint> {
    family2a(m, s, n, p)?;
    if k == 0 {
        return Err(Error::SpecInvalid("k must be at least 1".into()));
    }
    let big_n: u64 = (p.checked_pow(k).ok_or_else(|| Error::SpecInvalid(format!("{p}^{k} overflows")))? - 1) / m;
    let n = n as u64;
    Ok(binomial(big_n + n - 1, n - 1) + BigUint::from(s) * binomial(big_n + n - 1, n))
}

/// Orbit count `1 + (p^k - 1)/m` for `G(m,1,1)`.
pub fn sphere_count(m: u64, p: u64, k: u32) -> Result<BigUint> {
    check_params(m, 1, p, k)?;
    Ok(BigUint::one() + (BigUint::from(p).pow(k) - 1u32) / BigUint::from(m))
}
