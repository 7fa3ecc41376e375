//! The reflection groups whose orbit counts this crate reproduces.
//!
//! Exceptional groups are realized over `Z/p^M` from explicit generator
//! matrices whose entries are p-adic constants: roots of `(2x+1)^2 = -2`
//! (G12, p = 3), roots of `x^2 - x + 2` (G24, p = 2) and the fourth root of
//! unity congruent to 2 (G29, G31, p = 5). Monomial groups `G(m,s,n)` use an
//! `m`-th root of unity in `Z_p`.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::matgroup::{
    close, faithfulness_threshold, FiniteMatrixGroup, GeneratorSource, DEFAULT_CLOSURE_CAP,
};
use crate::modp::{hensel_lift, is_prime, mth_root_of_unity, teichmuller, IntPoly, Modulus, Residue};
use crate::snf::SquareMatrix;

/// Identifies a group in the catalog.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum GroupSpec {
    G12,
    G24,
    G29,
    G31,
    /// `G(m,s,n)` in family 2a: `m > 2`, `s | m`, `n >= 2`, `p = 1 mod m`, `m != s` when `n = 2`.
    Family2a { m: u64, s: u64, n: usize, p: u64 },
    /// The dihedral group `G(m,m,2)`, realized for `p = 1 mod m`.
    Family2b { m: u64, p: u64 },
    /// `G(m,1,1)`, the Weyl group of a Sullivan sphere.
    Sphere { m: u64, p: u64 },
}

impl GroupSpec {
    pub fn validate(&self) -> Result<()> {
        let need_root = |m: u64, p: u64| -> Result<()> {
            if !is_prime(p) {
                return Err(Error::SpecInvalid(format!("p = {p} is not prime")));
            }
            if m == 0 || !(p - 1).is_multiple_of(m) {
                return Err(Error::SpecInvalid(format!("p = {p} is not 1 mod m = {m}")));
            }
            Ok(())
        };
        match *self {
            GroupSpec::G12 | GroupSpec::G24 | GroupSpec::G29 | GroupSpec::G31 => Ok(()),
            GroupSpec::Family2a { m, s, n, p } => {
                if m <= 2 {
                    return Err(Error::SpecInvalid(format!("family 2a needs m > 2, got m = {m}")));
                }
                if s == 0 || m % s != 0 {
                    return Err(Error::SpecInvalid(format!("s = {s} does not divide m = {m}")));
                }
                if n < 2 {
                    return Err(Error::SpecInvalid(format!("family 2a needs n >= 2, got n = {n}")));
                }
                if n == 2 && m == s {
                    return Err(Error::SpecInvalid(format!("family 2a needs m != s when n = 2 (m = s = {m})")));
                }
                need_root(m, p)
            }
            GroupSpec::Family2b { m, p } => {
                if m < 2 {
                    return Err(Error::SpecInvalid(format!("G(m,m,2) needs m >= 2, got {m}")));
                }
                need_root(m, p)
            }
            GroupSpec::Sphere { m, p } => {
                if m < 2 {
                    return Err(Error::SpecInvalid(format!("G(m,1,1) needs m >= 2, got {m}")));
                }
                need_root(m, p)
            }
        }
    }

    pub fn prime(&self) -> u64 {
        match *self {
            GroupSpec::G12 => 3,
            GroupSpec::G24 => 2,
            GroupSpec::G29 | GroupSpec::G31 => 5,
            GroupSpec::Family2a { p, .. } | GroupSpec::Family2b { p, .. } | GroupSpec::Sphere { p, .. } => p,
        }
    }

    /// Rank `l` of the lattice.
    pub fn rank(&self) -> usize {
        match *self {
            GroupSpec::G12 => 2,
            GroupSpec::G24 => 3,
            GroupSpec::G29 | GroupSpec::G31 => 4,
            GroupSpec::Family2a { n, .. } => n,
            GroupSpec::Family2b { .. } => 2,
            GroupSpec::Sphere { .. } => 1,
        }
    }

    pub fn expected_order(&self) -> u64 {
        match *self {
            GroupSpec::G12 => 48,
            GroupSpec::G24 => 336,
            GroupSpec::G29 => 7680,
            GroupSpec::G31 => 46080,
            GroupSpec::Family2a { m, s, n, .. } => {
                let fact: u64 = (1..=n as u64).product();
                m.pow(n as u32) * fact / s
            }
            GroupSpec::Family2b { m, .. } => 2 * m,
            GroupSpec::Sphere { m, .. } => m,
        }
    }

    /// Parameters `(m, s, n)` of a monomial group.
    pub fn monomial_params(&self) -> Option<(u64, u64, usize)> {
        match *self {
            GroupSpec::Family2a { m, s, n, .. } => Some((m, s, n)),
            GroupSpec::Family2b { m, .. } => Some((m, m, 2)),
            GroupSpec::Sphere { m, .. } => Some((m, 1, 1)),
            _ => None,
        }
    }

    pub fn is_exceptional(&self) -> bool {
        matches!(self, GroupSpec::G12 | GroupSpec::G24 | GroupSpec::G29 | GroupSpec::G31)
    }

    /// Generator source realizing this group at any precision.
    pub fn source(&self) -> Result<Arc<dyn GeneratorSource>> {
        self.validate()?;
        Ok(match *self {
            GroupSpec::G12 | GroupSpec::G24 | GroupSpec::G29 | GroupSpec::G31 => {
                Arc::new(ExceptionalGenerators(*self))
            }
            _ => {
                let (m, s, n) = self.monomial_params().expect("monomial");
                Arc::new(MonomialGenerators { m, s, n, p: self.prime() })
            }
        })
    }

    /// Precision needed to count orbits on `(Z/p^k)^l`.
    pub fn working_exp(&self, k: u32) -> u32 {
        k.max(faithfulness_threshold(self.prime()))
    }

    pub fn working_modulus(&self, k: u32) -> Result<Modulus> {
        Modulus::new(self.prime(), self.working_exp(k))
    }
}

impl fmt::Display for GroupSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            GroupSpec::G12 => write!(f, "g12"),
            GroupSpec::G24 => write!(f, "g24"),
            GroupSpec::G29 => write!(f, "g29"),
            GroupSpec::G31 => write!(f, "g31"),
            GroupSpec::Family2a { m, s, n, p } => write!(f, "family2a:m={m},s={s},n={n},p={p}"),
            GroupSpec::Family2b { m, p } => write!(f, "family2b:m={m},p={p}"),
            GroupSpec::Sphere { m, p } => write!(f, "sphere:m={m},p={p}"),
        }
    }
}

impl Serialize for GroupSpec {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

fn parse_params(body: &str, keys: &[&str]) -> Result<Vec<u64>> {
    let mut out = vec![None; keys.len()];
    for part in body.split(',') {
        let (key, value) = part
            .split_once('=')
            .ok_or_else(|| Error::Parse(format!("expected key=value, got {part:?}")))?;
        let pos = keys
            .iter()
            .position(|k| *k == key.trim())
            .ok_or_else(|| Error::Parse(format!("unknown parameter {key:?}")))?;
        let v = value.trim().parse::<u64>().map_err(|e| Error::Parse(format!("{key}={value}: {e}")))?;
        if out[pos].replace(v).is_some() {
            return Err(Error::Parse(format!("parameter {key:?} given twice")));
        }
    }
    keys.iter()
        .zip(out)
        .map(|(k, v)| v.ok_or_else(|| Error::Parse(format!("missing parameter {k:?}"))))
        .collect()
}

impl FromStr for GroupSpec {
    type Err = Error;

    /// `g12 | g24 | g29 | g31 | family2a:m=M,s=S,n=N,p=P | family2b:m=M,p=P | sphere:m=M,p=P`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let spec = match s.to_ascii_lowercase().as_str() {
            "g12" => GroupSpec::G12,
            "g24" => GroupSpec::G24,
            "g29" => GroupSpec::G29,
            "g31" => GroupSpec::G31,
            _ => {
                let (kind, body) =
                    s.split_once(':').ok_or_else(|| Error::Parse(format!("unknown group {s:?}")))?;
                match kind {
                    "family2a" => {
                        let v = parse_params(body, &["m", "s", "n", "p"])?;
                        GroupSpec::Family2a { m: v[0], s: v[1], n: v[2] as usize, p: v[3] }
                    }
                    "family2b" => {
                        let v = parse_params(body, &["m", "p"])?;
                        GroupSpec::Family2b { m: v[0], p: v[1] }
                    }
                    "sphere" => {
                        let v = parse_params(body, &["m", "p"])?;
                        GroupSpec::Sphere { m: v[0], p: v[1] }
                    }
                    _ => return Err(Error::Parse(format!("unknown group family {kind:?}"))),
                }
            }
        };
        spec.validate()?;
        Ok(spec)
    }
}

#[derive(Debug)]
struct ExceptionalGenerators(GroupSpec);

/// Constants of G12 at precision `M`: `omega` with `(2 omega + 1)^2 = -2` and
/// `omega = 0 mod 3`, its conjugate `-1 - omega`, and `sqrt(-2) = 2 omega + 1`.
pub fn g12_constants(m: Modulus) -> Result<(Residue, Residue, Residue)> {
    let omega = hensel_lift(&IntPoly(vec![3, 4, 4]), 0, 1, m)?;
    let one = m.residue(1);
    let sqrt_m2 = m.residue(2) * omega + one;
    let omega_bar = -one - omega;
    Ok((omega, omega_bar, sqrt_m2))
}

/// Roots `alpha = 3 mod 8` and `alpha_bar = 6 mod 8` of `x^2 - x + 2` in `Z/2^M`.
pub fn g24_constants(m: Modulus) -> Result<(Residue, Residue)> {
    let f = IntPoly(vec![2, -1, 1]);
    let alpha = hensel_lift(&f, 3, 3, m)?;
    let alpha_bar = hensel_lift(&f, 6, 3, m)?;
    Ok((alpha, alpha_bar))
}

/// The fourth root of unity `omega = 2 mod 5` in `Z/5^M`.
pub fn g29_omega(m: Modulus) -> Result<Residue> {
    teichmuller(2, m)
}

fn matrix(rows: Vec<Vec<Residue>>) -> SquareMatrix {
    SquareMatrix::from_residues(&rows).expect("well-formed generator")
}

impl GeneratorSource for ExceptionalGenerators {
    fn prime(&self) -> u64 {
        self.0.prime()
    }

    fn dim(&self) -> usize {
        self.0.rank()
    }

    fn generators_at(&self, m: Modulus) -> Result<Vec<SquareMatrix>> {
        if m.p() != self.0.prime() {
            return Err(Error::SpecInvalid(format!("{} lives at p = {}, not {}", self.0, self.0.prime(), m.p())));
        }
        let c = |x: i128| m.residue(x);
        Ok(match self.0 {
            GroupSpec::G12 => {
                let (omega, omega_bar, sqrt_m2) = g12_constants(m)?;
                let half = c(2).invert()?;
                let inv_sqrt = sqrt_m2.invert()?;
                vec![
                    matrix(vec![vec![c(0), c(1)], vec![c(-1), c(0)]]),
                    matrix(vec![vec![-inv_sqrt, inv_sqrt], vec![inv_sqrt, inv_sqrt]]),
                    matrix(vec![vec![omega, half], vec![-half, omega_bar]]),
                    matrix(vec![vec![c(0), c(1)], vec![c(1), c(0)]]),
                ]
            }
            GroupSpec::G24 => {
                let (alpha, alpha_bar) = g24_constants(m)?;
                vec![
                    matrix(vec![vec![c(-1), -alpha_bar, c(1)], vec![c(0), c(1), c(0)], vec![c(0), c(0), c(1)]]),
                    matrix(vec![vec![c(1), c(0), c(0)], vec![-alpha, c(-1), c(1)], vec![c(0), c(0), c(1)]]),
                    matrix(vec![vec![c(1), c(0), c(0)], vec![c(0), c(1), c(0)], vec![c(1), c(1), c(-1)]]),
                ]
            }
            GroupSpec::G29 | GroupSpec::G31 => {
                let omega = g29_omega(m)?;
                let half = c(2).invert()?;
                let r1 = (0..4)
                    .map(|i| (0..4).map(|j| if i == j { half } else { -half }).collect())
                    .collect();
                let id = |i: usize, j: usize| c((i == j) as i128);
                let swap = |a: usize, b: usize| {
                    (0..4)
                        .map(|i| {
                            (0..4)
                                .map(|j| {
                                    let si = if i == a { b } else if i == b { a } else { i };
                                    id(si, j)
                                })
                                .collect()
                        })
                        .collect()
                };
                let r2 = vec![
                    vec![c(0), -omega, c(0), c(0)],
                    vec![omega, c(0), c(0), c(0)],
                    vec![c(0), c(0), c(1), c(0)],
                    vec![c(0), c(0), c(0), c(1)],
                ];
                let mut gens = vec![matrix(r1), matrix(r2), matrix(swap(0, 1)), matrix(swap(1, 2))];
                if self.0 == GroupSpec::G31 {
                    let r5 = (0..4)
                        .map(|i| (0..4).map(|j| if i == j && i == 2 { c(-1) } else { id(i, j) }).collect())
                        .collect();
                    gens.push(matrix(r5));
                }
                gens
            }
            _ => unreachable!("monomial groups use MonomialGenerators"),
        })
    }
}

/// Generators of `G(m,s,n)`: adjacent transpositions, `diag(b^s, 1, ..., 1)`
/// and `diag(.., b, b^-1, ..)` on adjacent pairs, with `b` of order `m`.
#[derive(Debug)]
struct MonomialGenerators {
    m: u64,
    s: u64,
    n: usize,
    p: u64,
}

impl GeneratorSource for MonomialGenerators {
    fn prime(&self) -> u64 {
        self.p
    }

    fn dim(&self) -> usize {
        self.n
    }

    fn generators_at(&self, modulus: Modulus) -> Result<Vec<SquareMatrix>> {
        let b = mth_root_of_unity(self.m, modulus)?;
        monomial_generators(self.s, self.n, b)
    }
}

/// Generators of the monomial group `G(m,s,n)` for a chosen root of unity `b`
/// of order `m`.
pub fn monomial_generators(s: u64, n: usize, b: Residue) -> Result<Vec<SquareMatrix>> {
    let modulus = b.modulus();
    let one = modulus.residue(1);
    let zero = modulus.residue(0);
    let diag = |d: &[Residue]| {
        let rows = (0..n).map(|i| (0..n).map(|j| if i == j { d[i] } else { zero }).collect()).collect();
        matrix(rows)
    };
    let mut gens = Vec::new();
    for i in 0..n.saturating_sub(1) {
        let rows = (0..n)
            .map(|r| {
                let src = if r == i { i + 1 } else if r == i + 1 { i } else { r };
                (0..n).map(|c| if c == src { one } else { zero }).collect()
            })
            .collect();
        gens.push(matrix(rows));
    }
    let mut d = vec![one; n];
    d[0] = b.pow(s);
    gens.push(diag(&d));
    let b_inv = b.invert()?;
    for i in 0..n.saturating_sub(1) {
        let mut d = vec![one; n];
        d[i] = b;
        d[i + 1] = b_inv;
        gens.push(diag(&d));
    }
    Ok(gens)
}

/// Close `spec` at `working_modulus`, checking the order against the catalog.
pub fn build(spec: &GroupSpec, working_modulus: Modulus) -> Result<FiniteMatrixGroup> {
    build_with_cap(spec, working_modulus, DEFAULT_CLOSURE_CAP)
}

pub fn build_with_cap(spec: &GroupSpec, working_modulus: Modulus, cap: usize) -> Result<FiniteMatrixGroup> {
    spec.validate()?;
    if working_modulus.p() != spec.prime() {
        return Err(Error::SpecInvalid(format!("{spec} lives at p = {}, not {}", spec.prime(), working_modulus.p())));
    }
    let threshold = faithfulness_threshold(spec.prime());
    if working_modulus.exp() < threshold {
        return Err(Error::PrecisionTooLow(format!(
            "{spec} is only faithful mod {}^{threshold}",
            spec.prime()
        )));
    }
    let group = close(spec.source()?, working_modulus, cap)?.with_label(spec.to_string());
    if group.order() as u64 != spec.expected_order() {
        return Err(Error::UnfaithfulReduction(working_modulus.exp()));
    }
    Ok(group)
}

/// Exponents `m_1 <= ... <= m_l` of a reflection group.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct ExponentList(pub Vec<u64>);

impl ExponentList {
    pub fn new(mut m: Vec<u64>) -> Self {
        m.sort_unstable();
        ExponentList(m)
    }

    pub fn as_slice(&self) -> &[u64] {
        &self.0
    }

    /// `prod (m_i + 1)`, the order of the group.
    pub fn group_order(&self) -> u64 {
        self.0.iter().map(|m| m + 1).product()
    }
}

pub fn exponents(spec: &GroupSpec) -> Result<ExponentList> {
    spec.validate()?;
    Ok(ExponentList::new(match *spec {
        GroupSpec::G12 => vec![5, 7],
        GroupSpec::G24 => vec![3, 5, 13],
        GroupSpec::G29 => vec![3, 7, 11, 19],
        GroupSpec::G31 => vec![7, 11, 19, 23],
        GroupSpec::Family2a { m, s, n, .. } => {
            let mut e: Vec<u64> = (1..n as u64).map(|i| i * m - 1).collect();
            e.push(n as u64 * m / s - 1);
            e
        }
        GroupSpec::Family2b { m, .. } => vec![1, m - 1],
        GroupSpec::Sphere { m, .. } => vec![m - 1],
    }))
}

/// Number of elements whose fixed lattice has rank `i`, for `i = 0..=l`.
pub fn rank_counts(group: &FiniteMatrixGroup) -> Result<Vec<u64>> {
    let table = group.conjugacy_classes()?;
    let mut h = vec![0u64; group.dim() + 1];
    for r in &table.records {
        h[r.rank as usize] += r.class_size;
    }
    Ok(h)
}

/// Recover exponents by factoring `sum_i h_i t^i` as `prod (t + m_i)`.
pub fn exponents_from_rank_counts(h: &[u64]) -> Result<ExponentList> {
    let mut poly: Vec<i128> = h.iter().map(|&x| x as i128).collect();
    while poly.last() == Some(&0) {
        poly.pop();
    }
    if poly.is_empty() {
        return Err(Error::NotFactorable);
    }
    let mut roots = Vec::new();
    while poly.len() > 1 {
        let constant = poly[0];
        let candidate = if constant == 0 {
            Some(0)
        } else {
            // -m is a root with m dividing the constant term
            (1..=constant.unsigned_abs() as i128).filter(|d| constant % d == 0).find(|&d| {
                poly.iter().rev().fold(0i128, |acc, &c| acc * -d + c) == 0
            })
        };
        let m = candidate.ok_or(Error::NotFactorable)?;
        // synthetic division by (t + m)
        let deg = poly.len() - 1;
        let mut q = vec![0i128; deg];
        let mut carry = 0i128;
        for i in (0..deg).rev() {
            carry = poly[i + 1] + carry * -m;
            q[i] = carry;
        }
        poly = q;
        roots.push(m as u64);
    }
    if poly != [1] {
        return Err(Error::NotFactorable);
    }
    Ok(ExponentList::new(roots))
}

/// Exponents read off the rank distribution of a closed group.
pub fn derive_exponents(group: &FiniteMatrixGroup) -> Result<ExponentList> {
    exponents_from_rank_counts(&rank_counts(group)?)
}
