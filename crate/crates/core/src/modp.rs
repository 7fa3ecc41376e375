//! Exact arithmetic in `Z/p^M`.
//!
//! A [`Modulus`] fixes the prime `p` and the precision `M`; a [`Residue`] is a
//! canonical representative in `[0, p^M)` tagged with its modulus. p-adic
//! constants (roots of unity, roots of integer polynomials) are realized at a
//! finite precision by Hensel lifting and Teichmüller iteration.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use serde::Serialize;

use crate::error::{Error, Result};

/// Largest allowed `p^M`. Keeps sums of two residues inside `u64` and
/// products inside `u128`.
pub const MAX_MODULUS: u64 = 1 << 62;

/// The ring `Z/p^M` with `p` prime and `M >= 1`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct Modulus {
    p: u64,
    exp: u32,
    pm: u64,
}

impl Modulus {
    pub fn new(p: u64, exp: u32) -> Result<Self> {
        if !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        if exp == 0 {
            return Err(Error::InvalidModulus(format!("precision exponent must be >= 1 (p = {p})")));
        }
        let mut pm: u64 = 1;
        for _ in 0..exp {
            pm = pm
                .checked_mul(p)
                .filter(|&v| v <= MAX_MODULUS)
                .ok_or_else(|| Error::InvalidModulus(format!("{p}^{exp} exceeds 2^62")))?;
        }
        Ok(Modulus { p, exp, pm })
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    /// The precision exponent `M`.
    pub fn exp(&self) -> u32 {
        self.exp
    }

    /// The cached value `p^M`.
    pub fn value(&self) -> u64 {
        self.pm
    }

    /// Same prime, different precision.
    pub fn with_exp(&self, exp: u32) -> Result<Self> {
        Modulus::new(self.p, exp)
    }

    /// Canonical representative of an arbitrary integer.
    pub fn reduce(&self, x: i128) -> u64 {
        x.rem_euclid(self.pm as i128) as u64
    }

    pub(crate) fn add(&self, a: u64, b: u64) -> u64 {
        let s = a + b;
        if s >= self.pm {
            s - self.pm
        } else {
            s
        }
    }

    pub(crate) fn sub(&self, a: u64, b: u64) -> u64 {
        if a >= b {
            a - b
        } else {
            a + self.pm - b
        }
    }

    pub(crate) fn mul(&self, a: u64, b: u64) -> u64 {
        ((a as u128 * b as u128) % self.pm as u128) as u64
    }

    pub(crate) fn neg(&self, a: u64) -> u64 {
        if a == 0 {
            0
        } else {
            self.pm - a
        }
    }

    pub(crate) fn pow(&self, mut base: u64, mut e: u64) -> u64 {
        let mut acc = 1 % self.pm;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        acc
    }

    /// p-adic valuation of a canonical representative, saturating at `M`.
    pub(crate) fn valuation_of(&self, mut v: u64) -> Valuation {
        if v == 0 {
            return Valuation::Saturated;
        }
        let mut e = 0;
        while v.is_multiple_of(self.p) {
            v /= self.p;
            e += 1;
        }
        Valuation::Finite(e)
    }

    pub(crate) fn inverse_of(&self, v: u64) -> Result<u64> {
        if v.is_multiple_of(self.p) {
            return Err(Error::NotAUnit(self.to_string()));
        }
        let (mut old_r, mut r) = (v as i128, self.pm as i128);
        let (mut old_s, mut s) = (1i128, 0i128);
        while r != 0 {
            let q = old_r / r;
            (old_r, r) = (r, old_r - q * r);
            (old_s, s) = (s, old_s - q * s);
        }
        debug_assert_eq!(old_r, 1);
        Ok(self.reduce(old_s))
    }

    pub fn residue(&self, x: i128) -> Residue {
        Residue { value: self.reduce(x), modulus: *self }
    }
}

impl fmt::Display for Modulus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}^{}", self.p, self.exp)
    }
}

impl fmt::Debug for Modulus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Modulus({}^{})", self.p, self.exp)
    }
}

/// p-adic valuation at finite precision.
///
/// `Saturated` means the value is divisible by `p^M`, so the true valuation
/// is at least `M` and cannot be distinguished further.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum Valuation {
    Finite(u32),
    Saturated,
}

impl Valuation {
    pub fn is_saturated(&self) -> bool {
        matches!(self, Valuation::Saturated)
    }

    pub fn finite(&self) -> Option<u32> {
        match self {
            Valuation::Finite(e) => Some(*e),
            Valuation::Saturated => None,
        }
    }

    /// `min(e, cap)`, reading `Saturated` as `cap`.
    pub fn capped(&self, cap: u32) -> u32 {
        match self {
            Valuation::Finite(e) => (*e).min(cap),
            Valuation::Saturated => cap,
        }
    }
}

impl fmt::Display for Valuation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Valuation::Finite(e) => write!(f, "{e}"),
            Valuation::Saturated => write!(f, "sat"),
        }
    }
}

/// An element of `Z/p^M`.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct Residue {
    value: u64,
    modulus: Modulus,
}

impl Residue {
    pub fn new(value: i128, modulus: Modulus) -> Self {
        modulus.residue(value)
    }

    pub fn value(&self) -> u64 {
        self.value
    }

    pub fn modulus(&self) -> Modulus {
        self.modulus
    }

    pub fn is_zero(&self) -> bool {
        self.value == 0
    }

    pub fn valuation(&self) -> Valuation {
        self.modulus.valuation_of(self.value)
    }

    pub fn invert(&self) -> Result<Residue> {
        Ok(Residue { value: self.modulus.inverse_of(self.value)?, modulus: self.modulus })
    }

    pub fn pow(&self, e: u64) -> Residue {
        Residue { value: self.modulus.pow(self.value, e), modulus: self.modulus }
    }

    /// Reduce to a lower precision `p^n`, `n <= M`.
    pub fn reduce_to(&self, target: Modulus) -> Residue {
        assert_eq!(target.p, self.modulus.p, "reduction across different primes");
        assert!(target.exp <= self.modulus.exp, "cannot reduce to a higher precision");
        Residue { value: self.value % target.pm, modulus: target }
    }

    /// Multiplicative order, or `None` for non-units.
    pub fn multiplicative_order(&self) -> Option<u64> {
        if self.value.is_multiple_of(self.modulus.p) {
            return None;
        }
        let one = 1 % self.modulus.pm;
        let mut x = self.value;
        let mut k = 1;
        while x != one {
            x = self.modulus.mul(x, self.value);
            k += 1;
        }
        Some(k)
    }

    fn check(&self, other: &Residue) {
        assert_eq!(self.modulus, other.modulus, "mixed-modulus residue arithmetic");
    }
}

impl fmt::Debug for Residue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} mod {}", self.value, self.modulus)
    }
}

impl fmt::Display for Residue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value)
    }
}

impl Add for Residue {
    type Output = Residue;
    fn add(self, rhs: Residue) -> Residue {
        self.check(&rhs);
        Residue { value: self.modulus.add(self.value, rhs.value), modulus: self.modulus }
    }
}

impl Sub for Residue {
    type Output = Residue;
    fn sub(self, rhs: Residue) -> Residue {
        self.check(&rhs);
        Residue { value: self.modulus.sub(self.value, rhs.value), modulus: self.modulus }
    }
}

impl Mul for Residue {
    type Output = Residue;
    fn mul(self, rhs: Residue) -> Residue {
        self.check(&rhs);
        Residue { value: self.modulus.mul(self.value, rhs.value), modulus: self.modulus }
    }
}

impl Neg for Residue {
    type Output = Residue;
    fn neg(self) -> Residue {
        Residue { value: self.modulus.neg(self.value), modulus: self.modulus }
    }
}

/// Trial-division primality test.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

/// Integer polynomial, coefficients from the constant term upward.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntPoly(pub Vec<i64>);

impl IntPoly {
    pub fn eval(&self, x: u64, m: &Modulus) -> u64 {
        self.0
            .iter()
            .rev()
            .fold(0, |acc, &c| m.add(m.mul(acc, x), m.reduce(c as i128)))
    }

    pub fn derivative(&self) -> IntPoly {
        IntPoly(self.0.iter().enumerate().skip(1).map(|(i, &c)| c * i as i64).collect())
    }
}

/// Lift a simple root of `f` modulo `p^base_level` to the unique root modulo
/// `p^M` congruent to it, by Newton iteration.
pub fn hensel_lift(f: &IntPoly, r0: i64, base_level: u32, target: Modulus) -> Result<Residue> {
    let base = target.with_exp(base_level.max(1))?;
    if f.eval(base.reduce(r0 as i128), &base) != 0 {
        return Err(Error::NotARoot(base_level));
    }
    let df = f.derivative();
    let modp = target.with_exp(1)?;
    if df.eval(modp.reduce(r0 as i128), &modp) == 0 {
        return Err(Error::NotASimpleRoot);
    }
    let mut r = target.reduce(r0 as i128);
    // quadratic convergence: the correct digits double each step
    for _ in 0..=64 {
        let fr = f.eval(r, &target);
        if fr == 0 {
            return Ok(Residue { value: r, modulus: target });
        }
        let inv = target.inverse_of(df.eval(r, &target))?;
        r = target.sub(r, target.mul(fr, inv));
    }
    unreachable!("Newton iteration failed to converge for a simple root")
}

/// The Teichmüller representative of `a`: the unique `(p-1)`-th root of unity
/// congruent to `a` modulo `p`.
pub fn teichmuller(a: i64, target: Modulus) -> Result<Residue> {
    let x0 = target.reduce(a as i128);
    if x0.is_multiple_of(target.p) {
        return Err(Error::DivisibleByP(a.unsigned_abs()));
    }
    let mut x = x0;
    loop {
        let next = target.pow(x, target.p);
        if next == x {
            return Ok(Residue { value: x, modulus: target });
        }
        x = next;
    }
}

/// Smallest positive primitive root modulo `p`.
pub fn primitive_root(p: u64) -> u64 {
    let modp = Modulus::new(p, 1).expect("prime");
    let order = p - 1;
    let factors = prime_factors(order);
    (1..p)
        .find(|&g| factors.iter().all(|&q| modp.pow(g, order / q) != 1 % p))
        .expect("every prime has a primitive root")
}

pub(crate) fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            out.push(d);
            while n.is_multiple_of(d) {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

/// A root of unity of exact order `m` in `Z/p^M`, namely the
/// `(p-1)/m`-th power of the Teichmüller lift of the smallest primitive root.
pub fn mth_root_of_unity(m: u64, target: Modulus) -> Result<Residue> {
    let p = target.p;
    if m == 0 || !(p - 1).is_multiple_of(m) {
        return Err(Error::OrderUnavailable { m, p });
    }
    let a = teichmuller(primitive_root(p) as i64, target)?;
    Ok(a.pow((p - 1) / m))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn md(p: u64, e: u32) -> Modulus {
        Modulus::new(p, e).unwrap()
    }

    #[test]
    fn modulus_rejects_composites_and_zero_precision() {
        assert_eq!(Modulus::new(9, 2), Err(Error::NotPrime(9)));
        assert!(matches!(Modulus::new(3, 0), Err(Error::InvalidModulus(_))));
        assert!(matches!(Modulus::new(2, 63), Err(Error::InvalidModulus(_))));
        assert_eq!(md(5, 3).value(), 125);
    }

    #[test]
    fn valuation_examples() {
        let m = md(3, 4);
        assert_eq!(m.residue(0).valuation(), Valuation::Saturated);
        assert_eq!(m.residue(18).valuation(), Valuation::Finite(2));
        assert_eq!(m.residue(7).valuation(), Valuation::Finite(0));
        // 81 ≡ 0 mod 3^4
        assert_eq!(m.residue(81).valuation(), Valuation::Saturated);
    }

    #[test]
    fn invert_examples() {
        let m = md(3, 2);
        assert_eq!(m.residue(2).invert().unwrap().value(), 5);
        assert_eq!(m.residue(1).invert().unwrap().value(), 1);
        assert!(matches!(m.residue(3).invert(), Err(Error::NotAUnit(_))));
    }

    #[test]
    fn hensel_alpha_for_g24() {
        let m = md(2, 10);
        let f = IntPoly(vec![2, -1, 1]);
        let alpha = hensel_lift(&f, 3, 3, m).unwrap();
        assert_eq!(f.eval(alpha.value(), &m), 0);
        assert_eq!(alpha.value() % 8, 3);
        // the conjugate root
        let alpha_bar = hensel_lift(&f, 6, 3, m).unwrap();
        assert_eq!(alpha_bar.value() % 8, 6);
        assert_eq!((alpha + alpha_bar).value(), 1);
        assert_eq!((alpha * alpha_bar).value(), 2);
    }

    #[test]
    fn hensel_omega_for_g12() {
        let m = md(3, 6);
        // (2x+1)^2 + 2 = 4x^2 + 4x + 3
        let f = IntPoly(vec![3, 4, 4]);
        let w = hensel_lift(&f, 0, 1, m).unwrap();
        assert_eq!(w.value() % 3, 0);
        let s = m.residue(2) * w + m.residue(1);
        assert_eq!((s * s).value(), m.reduce(-2));
    }

    #[test]
    fn hensel_linear_and_errors() {
        let m = md(7, 3);
        assert_eq!(hensel_lift(&IntPoly(vec![-1, 1]), 1, 1, m).unwrap().value(), 1);
        assert_eq!(hensel_lift(&IntPoly(vec![2, -1, 1]), 2, 3, md(2, 5)), Err(Error::NotARoot(3)));
        // x^2 has a double root at 0
        assert_eq!(hensel_lift(&IntPoly(vec![0, 0, 1]), 0, 1, m), Err(Error::NotASimpleRoot));
    }

    #[test]
    fn hensel_relift_truncates_consistently() {
        let f = IntPoly(vec![2, -1, 1]);
        for e in 3..20 {
            let lo = hensel_lift(&f, 3, 3, md(2, e)).unwrap();
            let hi = hensel_lift(&f, 3, 3, md(2, e + 1)).unwrap();
            assert_eq!(hi.reduce_to(md(2, e)), lo);
        }
    }

    #[test]
    fn teichmuller_examples() {
        assert_eq!(teichmuller(1, md(5, 4)).unwrap().value(), 1);
        let t = teichmuller(2, md(5, 4)).unwrap();
        assert_eq!(t.value(), 182);
        assert_eq!(t.pow(2).value(), 624);
        assert_eq!(t.pow(4).value(), 1);
        assert_eq!(teichmuller(5, md(5, 2)), Err(Error::DivisibleByP(5)));
    }

    #[test]
    fn teichmuller_is_root_of_unity() {
        for (p, e) in [(3, 5), (5, 6), (7, 4), (11, 3), (13, 2), (2, 8)] {
            let m = md(p, e);
            for a in 1..(3 * p as i64) {
                if a % p as i64 == 0 {
                    continue;
                }
                let t = teichmuller(a, m).unwrap();
                assert_eq!(t.pow(p - 1).value(), 1 % m.value());
                assert_eq!(t.value() % p, a as u64 % p);
            }
        }
    }

    #[test]
    fn primitive_roots() {
        assert_eq!(primitive_root(2), 1);
        assert_eq!(primitive_root(5), 2);
        assert_eq!(primitive_root(7), 3);
        assert_eq!(primitive_root(11), 2);
    }

    #[test]
    fn roots_of_unity_have_exact_order() {
        assert_eq!(mth_root_of_unity(1, md(7, 3)).unwrap().value(), 1);
        let b = mth_root_of_unity(4, md(5, 1)).unwrap();
        assert!(b.value() == 2 || b.value() == 3);
        let b = mth_root_of_unity(3, md(7, 2)).unwrap();
        assert_eq!(b.pow(3).value(), 1);
        assert_ne!(b.value(), 1);
        for (m, p, e) in [(3, 7, 4), (6, 7, 3), (4, 5, 5), (5, 11, 3), (4, 13, 2)] {
            let b = mth_root_of_unity(m, md(p, e)).unwrap();
            assert_eq!(b.multiplicative_order(), Some(m));
        }
        assert_eq!(mth_root_of_unity(3, md(5, 2)), Err(Error::OrderUnavailable { m: 3, p: 5 }));
    }

    #[test]
    #[should_panic(expected = "mixed-modulus")]
    fn mixed_modulus_arithmetic_panics() {
        let _ = md(3, 2).residue(1) + md(3, 3).residue(1);
    }

    proptest::proptest! {
        #[test]
        fn unit_times_inverse_is_one(p_idx in 0usize..5, e in 1u32..8, x in 0u64..1_000_000) {
            let p = [2u64, 3, 5, 7, 11][p_idx];
            let m = md(p, e);
            let r = m.residue(x as i128);
            if x % p != 0 {
                let inv = r.invert().unwrap();
                proptest::prop_assert_eq!((r * inv).value(), 1 % m.value());
            } else {
                proptest::prop_assert!(r.invert().is_err());
            }
        }
    }
}
