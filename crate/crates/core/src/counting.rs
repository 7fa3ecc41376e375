//! Orbit counts of a Weyl group acting on `(Z/p^k)^l`.
//!
//! Three engines compute the same number:
//!
//! * [`count_burnside_full`] sums `|Ker(w - 1 mod p^k)|` over every element;
//! * [`count_burnside_classes`] sums over conjugacy classes using the rank
//!   `r(w)` of the fixed lattice and the torsion `A_w` of `Coker(w - 1)`,
//!   with `|Ker(w - 1 mod p^k)| = p^{k r(w)} |A_w / p^k A_w|`;
//! * [`count_formula_general`] replaces the torsion-free part of that sum by
//!   the product `prod (m_i + p^k)` over the exponents, so only the classes
//!   with torsion need to be visited.

use std::time::Instant;

use num_bigint::BigUint;
use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::matgroup::{faithfulness_threshold, ClassTable, FiniteMatrixGroup};
use crate::modp::Modulus;
use crate::report::{ClassRow, CountReport, Method};
use crate::snf::{kernel_exponent, smith_valuations, SquareMatrix};

/// Precision exponent beyond which [`resolve_torsion`] gives up.
pub const DEFAULT_PRECISION_CEILING: u32 = 16;

/// Torsion valuations of `Coker(w - 1)` for element `idx` of `group`, given
/// the rank `rank` of its fixed lattice.
pub fn resolve_torsion(group: &FiniteMatrixGroup, idx: usize, rank: u32, ceiling: u32) -> Result<Vec<u32>> {
    let p = group.p();
    resolve_torsion_with(|m| group.element_at(idx, m), p, rank, ceiling)
}

/// Raise the precision until exactly `rank` Smith valuations of `w - 1` are
/// saturated. The remaining positive valuations are then smaller than the
/// precision, hence exact, and are the elementary divisors of the torsion.
pub fn resolve_torsion_with<F>(lift: F, p: u64, rank: u32, ceiling: u32) -> Result<Vec<u32>>
where
    F: Fn(Modulus) -> Result<SquareMatrix>,
{
    let mut exp = faithfulness_threshold(p) + 2;
    loop {
        if exp > ceiling {
            return Err(Error::PrecisionCeiling(ceiling));
        }
        let modulus = Modulus::new(p, exp)?;
        let sv = smith_valuations(&lift(modulus)?.minus_identity());
        let saturated = sv.saturated_count() as u32;
        if saturated < rank {
            return Err(Error::NonIntegralRank { sum: saturated as u64, order: rank as u64 });
        }
        if saturated == rank {
            return Ok(sv.positive_finite());
        }
        exp += 1;
    }
}

fn divide_exact(total: BigUint, order: usize, what: &str) -> Result<BigUint> {
    let order = BigUint::from(order);
    if !(&total % &order).is_zero() {
        return Err(Error::NonIntegralCount(format!("{what}: {total} is not divisible by {order}")));
    }
    Ok(total / order)
}

/// Sum of `p^e` weighted by a histogram of exponents.
fn weighted_powers(p: u64, hist: &[u64]) -> BigUint {
    let base = BigUint::from(p);
    hist.iter()
        .enumerate()
        .filter(|(_, &c)| c > 0)
        .map(|(e, &c)| BigUint::from(c) * base.pow(e as u32))
        .sum()
}

/// `sum_w |Ker(w - 1 mod p^k)|` over all elements, as a histogram of kernel
/// exponents. The reduction is order independent, so the result does not
/// depend on the thread count.
pub fn fixed_point_histogram(group: &FiniteMatrixGroup, k: u32) -> Result<Vec<u64>> {
    if k == 0 || k > group.modulus().exp() {
        return Err(Error::PrecisionTooLow(format!(
            "orbit count at k = {k} needs a group known mod {}^{k}, have {}",
            group.p(),
            group.modulus()
        )));
    }
    let slots = group.dim() * k as usize + 1;
    group
        .elements()
        .par_iter()
        .map(|w| kernel_exponent(&w.minus_identity(), k))
        .try_fold(
            || vec![0u64; slots],
            |mut hist, e| {
                hist[e? as usize] += 1;
                Ok(hist)
            },
        )
        .try_reduce(
            || vec![0u64; slots],
            |mut a, b| {
                a.iter_mut().zip(b).for_each(|(x, y)| *x += y);
                Ok(a)
            },
        )
}

/// Orbit count by Burnside's lemma over every group element.
pub fn count_burnside_full(group: &FiniteMatrixGroup, k: u32) -> Result<CountReport> {
    let start = Instant::now();
    let hist = fixed_point_histogram(group, k)?;
    let total = weighted_powers(group.p(), &hist);
    let count = divide_exact(total, group.order(), "full Burnside sum")?;
    Ok(CountReport::new(group.label(), group.p(), k, Method::Burnside, count).with_elapsed(start.elapsed()))
}

fn class_rows(group: &FiniteMatrixGroup, table: &ClassTable, k: u32) -> Vec<ClassRow> {
    table
        .records
        .iter()
        .enumerate()
        .map(|(id, r)| {
            let exp = k * r.rank + r.torsion_exponent_at(k);
            ClassRow::from_record(id, r, BigUint::from(group.p()).pow(exp))
        })
        .collect()
}

/// Orbit count by Burnside's lemma over conjugacy classes, using
/// `|Fix(w)| = p^{k r(w)} t_k(w)`.
pub fn count_burnside_classes(group: &FiniteMatrixGroup, table: &ClassTable, k: u32) -> Result<CountReport> {
    if k == 0 {
        return Err(Error::PrecisionTooLow("k must be at least 1".into()));
    }
    let start = Instant::now();
    let rows = class_rows(group, table, k);
    let total: BigUint = rows.iter().map(|r| BigUint::from(r.class_size) * &r.fixed_points).sum();
    let count = divide_exact(total, group.order(), "class Burnside sum")?;
    Ok(CountReport::new(group.label(), group.p(), k, Method::Classes, count)
        .with_classes(rows)
        .with_elapsed(start.elapsed()))
}

/// `sum over classes of |class| * p^{k r(w)}`, which equals `prod (m_i + p^k)`
/// for a reflection group with exponents `m_i`.
pub fn solomon_sum(table: &ClassTable, p: u64, k: u32) -> BigUint {
    let base = BigUint::from(p);
    table.records.iter().map(|r| BigUint::from(r.class_size) * base.pow(k * r.rank)).sum()
}

/// `prod (m_i + p^k)`.
pub fn exponent_product(exponents: &[u64], p: u64, k: u32) -> BigUint {
    let pk = BigUint::from(p).pow(k);
    exponents.iter().map(|&m| &pk + BigUint::from(m)).product()
}

/// Orbit count from the exponents plus a correction over the classes whose
/// cokernel has torsion.
pub fn count_formula_general(
    group: &FiniteMatrixGroup,
    table: &ClassTable,
    exponents: &[u64],
    k: u32,
) -> Result<CountReport> {
    if k == 0 {
        return Err(Error::PrecisionTooLow("k must be at least 1".into()));
    }
    if exponents.len() != group.dim() {
        return Err(Error::DimensionMismatch(exponents.len(), group.dim()));
    }
    let start = Instant::now();
    let p = group.p();
    let base = BigUint::from(p);
    let mut rows = Vec::new();
    let mut correction = BigUint::zero();
    for (id, r) in table.records.iter().enumerate().filter(|(_, r)| r.has_torsion()) {
        let t_k = base.pow(r.torsion_exponent_at(k));
        correction += BigUint::from(r.class_size) * base.pow(k * r.rank) * (&t_k - BigUint::one());
        rows.push(ClassRow::from_record(id, r, base.pow(k * r.rank) * t_k));
    }
    let total = exponent_product(exponents, p, k) + correction;
    let count = divide_exact(total, group.order(), "general formula")?;
    Ok(CountReport::new(group.label(), p, k, Method::Formula, count)
        .with_classes(rows)
        .with_elapsed(start.elapsed()))
}

/// One line of a torsion census.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CensusRow {
    pub class: usize,
    pub representative: usize,
    pub class_size: u64,
    pub centralizer_order: u64,
    pub element_order: u64,
    pub rank: u32,
    pub torsion_vals: Vec<u32>,
    /// `|A_w|`.
    #[serde(serialize_with = "crate::report::as_decimal")]
    pub torsion_order: BigUint,
}

/// Every class annotated with `r(w)` and `|A_w|`. Rows with `|A_w| > 1` form
/// the set of classes entering [`count_formula_general`].
pub fn torsion_census(group: &FiniteMatrixGroup, table: &ClassTable) -> Vec<CensusRow> {
    let base = BigUint::from(group.p());
    table
        .records
        .iter()
        .enumerate()
        .map(|(class, r)| CensusRow {
            class,
            representative: r.representative,
            class_size: r.class_size,
            centralizer_order: r.centralizer_order,
            element_order: r.element_order,
            rank: r.rank,
            torsion_vals: r.torsion_vals.clone(),
            torsion_order: base.pow(r.torsion_exponent()),
        })
        .collect()
}

/// The largest power of `p` dividing `n`.
pub fn p_part(n: u64, p: u64) -> u64 {
    let mut n = n;
    let mut part = 1;
    while n.is_multiple_of(p) {
        n /= p;
        part *= p;
    }
    part
}

/// Whether every `|A_w|` in the census divides the order of a Sylow
/// p-subgroup of the group.
pub fn torsion_divides_sylow(census: &[CensusRow], group_order: u64, p: u64) -> bool {
    let sylow = BigUint::from(p_part(group_order, p));
    census.iter().all(|row| (&sylow % &row.torsion_order).is_zero())
}
