//! Brute-force references: orbits by flood fill over every point of
//! `(Z/p^n)^l`, and fixed points by a full scan. Slow on purpose; only the
//! tests and `--method oracle` use them.

use bitvec::prelude::*;
use num_bigint::BigUint;

use crate::error::{Error, Result};
use crate::matgroup::FiniteMatrixGroup;
use crate::modp::Modulus;
use crate::snf::SquareMatrix;

/// Default bound on the number of points scanned.
pub const DEFAULT_ORACLE_CAP: u64 = 1 << 24;

/// `(Z/p^n)^l`, enumerated as mixed-radix integers.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PointSpace {
    pub p: u64,
    pub n: u32,
    pub l: usize,
    q: u64,
    size: u64,
}

impl PointSpace {
    pub fn new(p: u64, n: u32, l: usize, cap: u64) -> Result<Self> {
        let q = Modulus::new(p, n)?.value();
        let size = (q as u128).checked_pow(l as u32).unwrap_or(u128::MAX);
        if size > cap as u128 {
            return Err(Error::SpaceTooLarge(size, cap as u128));
        }
        Ok(PointSpace { p, n, l, q, size: size as u64 })
    }

    pub fn size(&self) -> u64 {
        self.size
    }

    pub fn decode(&self, mut x: u64, out: &mut [u64]) {
        for slot in out.iter_mut() {
            *slot = x % self.q;
            x /= self.q;
        }
    }

    pub fn encode(&self, v: &[u64]) -> u64 {
        v.iter().rev().fold(0, |acc, &c| acc * self.q + c)
    }
}

/// Generators of `group` acting on `(Z/p^n)^l`, reduced or lifted as needed.
fn generators_mod(group: &FiniteMatrixGroup, n: u32) -> Result<Vec<SquareMatrix>> {
    let target = Modulus::new(group.p(), n)?;
    if n <= group.modulus().exp() {
        group.generators().iter().map(|g| g.reduce_to(target)).collect()
    } else {
        group.source().generators_at(target)
    }
}

/// Number of orbits of `group` on `(Z/p^n)^l`.
pub fn orbit_count_bruteforce(group: &FiniteMatrixGroup, n: u32, cap: u64) -> Result<BigUint> {
    let space = PointSpace::new(group.p(), n, group.dim(), cap)?;
    let gens = generators_mod(group, n)?;
    let mut visited = bitvec![0; space.size() as usize];
    let mut stack = Vec::new();
    let mut v = vec![0u64; space.l];
    let mut orbits = 0u64;
    for start in 0..space.size() {
        if visited[start as usize] {
            continue;
        }
        orbits += 1;
        visited.set(start as usize, true);
        stack.push(start);
        while let Some(x) = stack.pop() {
            space.decode(x, &mut v);
            for g in &gens {
                let y = space.encode(&g.apply(&v));
                if !visited[y as usize] {
                    visited.set(y as usize, true);
                    stack.push(y);
                }
            }
        }
    }
    Ok(BigUint::from(orbits))
}

/// Number of `v` in `(Z/p^n)^l` with `w v = v mod p^n`.
pub fn fixed_points_bruteforce(w: &SquareMatrix, n: u32, cap: u64) -> Result<BigUint> {
    let modulus = w.modulus();
    let space = PointSpace::new(modulus.p(), n, w.dim(), cap)?;
    let w = w.reduce_to(Modulus::new(modulus.p(), n)?)?;
    let mut v = vec![0u64; space.l];
    let mut count = 0u64;
    for x in 0..space.size() {
        space.decode(x, &mut v);
        if w.apply(&v) == v {
            count += 1;
        }
    }
    Ok(BigUint::from(count))
}
