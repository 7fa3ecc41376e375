//! Finite matrix groups over `Z/p^M`.
//!
//! A group is closed by breadth-first search from its generators. Every
//! element remembers the generator word that produced it, so any element can
//! be re-evaluated at a higher precision from the same generator source; this
//! is how rank and torsion data are computed beyond the working precision.

use std::collections::{HashMap, VecDeque};
use std::fmt;
use std::sync::Arc;

use rayon::prelude::*;
use serde::Serialize;

use crate::counting::{resolve_torsion, DEFAULT_PRECISION_CEILING};
use crate::error::{Error, Result};
use crate::modp::Modulus;
use crate::snf::{determinant, SquareMatrix};

/// Default bound on the number of elements produced by [`close`].
pub const DEFAULT_CLOSURE_CAP: usize = 100_000_000;

/// Smallest precision at which reduction of a p-adic reflection group is
/// injective: `p` for odd primes and `4` for `p = 2`.
pub fn faithfulness_threshold(p: u64) -> u32 {
    if p == 2 {
        2
    } else {
        1
    }
}

/// Produces the generating matrices of a group at any requested precision.
pub trait GeneratorSource: Send + Sync + fmt::Debug {
    fn prime(&self) -> u64;
    fn dim(&self) -> usize;
    fn generators_at(&self, modulus: Modulus) -> Result<Vec<SquareMatrix>>;
}

/// Generators with integer entries, valid at every precision.
#[derive(Clone, Debug)]
pub struct IntegerGenerators {
    p: u64,
    dim: usize,
    mats: Vec<Vec<Vec<i64>>>,
}

impl IntegerGenerators {
    pub fn new(p: u64, dim: usize, mats: Vec<Vec<Vec<i64>>>) -> Self {
        IntegerGenerators { p, dim, mats }
    }
}

impl GeneratorSource for IntegerGenerators {
    fn prime(&self) -> u64 {
        self.p
    }
    fn dim(&self) -> usize {
        self.dim
    }
    fn generators_at(&self, modulus: Modulus) -> Result<Vec<SquareMatrix>> {
        if self.mats.is_empty() {
            return Ok(vec![SquareMatrix::identity(self.dim, modulus)]);
        }
        self.mats.iter().map(|m| SquareMatrix::from_rows(m, modulus)).collect()
    }
}

/// Generators known only at one precision; they can be reduced but not lifted.
#[derive(Clone, Debug)]
pub struct FixedGenerators {
    mats: Vec<SquareMatrix>,
}

impl FixedGenerators {
    pub fn new(mats: Vec<SquareMatrix>) -> Self {
        assert!(!mats.is_empty(), "at least one generator required");
        FixedGenerators { mats }
    }
}

impl GeneratorSource for FixedGenerators {
    fn prime(&self) -> u64 {
        self.mats[0].modulus().p()
    }
    fn dim(&self) -> usize {
        self.mats[0].dim()
    }
    fn generators_at(&self, modulus: Modulus) -> Result<Vec<SquareMatrix>> {
        let known = self.mats[0].modulus();
        if modulus.exp() > known.exp() {
            return Err(Error::PrecisionCeiling(known.exp()));
        }
        self.mats.iter().map(|m| m.reduce_to(modulus)).collect()
    }
}

/// A finite group of invertible matrices over `Z/p^M`, with all elements
/// materialized in breadth-first order.
#[derive(Clone)]
pub struct FiniteMatrixGroup {
    label: String,
    source: Arc<dyn GeneratorSource>,
    modulus: Modulus,
    dim: usize,
    generators: Vec<SquareMatrix>,
    /// Position of each generator in the source's list.
    source_order: Vec<usize>,
    elements: Vec<SquareMatrix>,
    index: HashMap<Vec<u64>, u32>,
    /// `elements[i] = generators[tree[i].1] * elements[tree[i].0]`; the root points at itself.
    tree: Vec<(u32, u8)>,
}

impl fmt::Debug for FiniteMatrixGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FiniteMatrixGroup")
            .field("label", &self.label)
            .field("source", &self.source)
            .field("modulus", &self.modulus)
            .field("dim", &self.dim)
            .field("order", &self.elements.len())
            .finish()
    }
}

/// Close the group generated by `source` at precision `modulus`.
///
/// Generators are applied on the left in byte-lexicographic order of their
/// entries, so the element order is a deterministic function of the
/// generator set.
pub fn close(source: Arc<dyn GeneratorSource>, modulus: Modulus, cap: usize) -> Result<FiniteMatrixGroup> {
    let dim = source.dim();
    let raw = source.generators_at(modulus)?;
    for g in &raw {
        if g.dim() != dim {
            return Err(Error::DimensionMismatch(g.dim(), dim));
        }
        if determinant(g).value().is_multiple_of(modulus.p()) {
            return Err(Error::SpecInvalid(format!("generator is not invertible mod {modulus}: {g:?}")));
        }
    }
    let mut source_order: Vec<usize> = (0..raw.len()).collect();
    source_order.sort_by(|&a, &b| raw[a].entries().cmp(raw[b].entries()));
    source_order.dedup_by(|a, b| raw[*a] == raw[*b]);
    let generators: Vec<SquareMatrix> = source_order.iter().map(|&i| raw[i].clone()).collect();
    if generators.len() > u8::MAX as usize {
        return Err(Error::SpecInvalid("too many generators".into()));
    }

    let identity = SquareMatrix::identity(dim, modulus);
    let mut index = HashMap::new();
    index.insert(identity.entries().to_vec(), 0u32);
    let mut elements = vec![identity];
    let mut tree = vec![(0u32, 0u8)];
    let mut queue = VecDeque::from([0u32]);
    while let Some(i) = queue.pop_front() {
        for (gi, g) in generators.iter().enumerate() {
            let y = g.mul_unchecked(&elements[i as usize]);
            if index.contains_key(y.entries()) {
                continue;
            }
            if elements.len() >= cap {
                return Err(Error::CapExceeded(cap));
            }
            let j = elements.len() as u32;
            index.insert(y.entries().to_vec(), j);
            elements.push(y);
            tree.push((i, gi as u8));
            queue.push_back(j);
        }
    }
    Ok(FiniteMatrixGroup { label: "custom".into(), source, modulus, dim, generators, source_order, elements, index, tree })
}

/// Close a group from explicit matrices known at a single precision.
pub fn close_matrices(generators: Vec<SquareMatrix>, cap: usize) -> Result<FiniteMatrixGroup> {
    let modulus = generators
        .first()
        .map(SquareMatrix::modulus)
        .ok_or_else(|| Error::SpecInvalid("no generators".into()))?;
    close(Arc::new(FixedGenerators::new(generators)), modulus, cap)
}

impl FiniteMatrixGroup {
    /// Name used in reports.
    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn modulus(&self) -> Modulus {
        self.modulus
    }

    pub fn p(&self) -> u64 {
        self.modulus.p()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn generators(&self) -> &[SquareMatrix] {
        &self.generators
    }

    pub fn elements(&self) -> &[SquareMatrix] {
        &self.elements
    }

    pub fn element(&self, i: usize) -> &SquareMatrix {
        &self.elements[i]
    }

    pub fn source(&self) -> &Arc<dyn GeneratorSource> {
        &self.source
    }

    pub fn index_of(&self, m: &SquareMatrix) -> Option<usize> {
        if m.modulus() != self.modulus {
            return None;
        }
        self.index.get(m.entries()).map(|&i| i as usize)
    }

    pub fn contains(&self, m: &SquareMatrix) -> bool {
        self.index_of(m).is_some()
    }

    /// Generator indices `[g_1, ..., g_r]` with `element(i) = g_1 * ... * g_r`.
    pub fn word(&self, mut i: usize) -> Vec<usize> {
        let mut w = Vec::new();
        while i != 0 {
            let (parent, g) = self.tree[i];
            w.push(g as usize);
            i = parent as usize;
        }
        w
    }

    /// Re-evaluate element `i` at another precision from the generator source.
    pub fn element_at(&self, i: usize, modulus: Modulus) -> Result<SquareMatrix> {
        if modulus == self.modulus {
            return Ok(self.elements[i].clone());
        }
        if modulus.exp() < self.modulus.exp() {
            return self.elements[i].reduce_to(modulus);
        }
        let raw = self.source.generators_at(modulus)?;
        let mut acc = SquareMatrix::identity(self.dim, modulus);
        for g in self.word(i).into_iter().rev() {
            acc = raw[self.source_order[g]].mul_unchecked(&acc);
        }
        debug_assert_eq!(acc.reduce_to(self.modulus).ok().as_ref(), Some(&self.elements[i]));
        Ok(acc)
    }

    /// Multiplicative order of element `i`.
    pub fn element_order(&self, i: usize) -> u64 {
        let w = &self.elements[i];
        let mut x = w.clone();
        let mut k = 1;
        while !x.is_identity() {
            x = x.mul_unchecked(w);
            k += 1;
        }
        k
    }

    fn generator_inverses(&self) -> Vec<SquareMatrix> {
        self.generators
            .iter()
            .map(|g| {
                let mut prev = SquareMatrix::identity(self.dim, self.modulus);
                let mut x = g.clone();
                while !x.is_identity() {
                    prev = x.clone();
                    x = x.mul_unchecked(g);
                }
                prev
            })
            .collect()
    }

    /// Reduce every element to precision `p^n`.
    pub fn reduce_modulus(&self, n: u32) -> Result<FiniteMatrixGroup> {
        if n < faithfulness_threshold(self.p()) {
            return Err(Error::UnfaithfulReduction(n));
        }
        if n > self.modulus.exp() {
            return Err(Error::PrecisionTooLow(format!("cannot reduce mod {} to exponent {n}", self.modulus)));
        }
        if n == self.modulus.exp() {
            return Ok(self.clone());
        }
        let target = self.modulus.with_exp(n)?;
        let elements: Vec<SquareMatrix> =
            self.elements.iter().map(|e| e.reduce_to(target)).collect::<Result<_>>()?;
        let mut index = HashMap::with_capacity(elements.len());
        for (i, e) in elements.iter().enumerate() {
            if index.insert(e.entries().to_vec(), i as u32).is_some() {
                return Err(Error::UnfaithfulReduction(n));
            }
        }
        // generator order is kept so that stored words stay valid
        let generators: Vec<SquareMatrix> =
            self.generators.iter().map(|g| g.reduce_to(target)).collect::<Result<_>>()?;
        Ok(FiniteMatrixGroup {
            label: self.label.clone(),
            source: self.source.clone(),
            modulus: target,
            dim: self.dim,
            generators,
            source_order: self.source_order.clone(),
            elements,
            index,
            tree: self.tree.clone(),
        })
    }

    /// Rank of the fixed lattice of element `i`, lifting to a sufficient
    /// precision when the working one cannot recover it.
    pub fn rank_of(&self, i: usize, order: u64) -> Result<u32> {
        let bound = order as u128 * self.dim as u128;
        let mut exp = self.modulus.exp();
        while (self.p() as u128).pow(exp) <= bound {
            exp += 1;
        }
        let m = self.modulus.with_exp(exp)?;
        rank_fixed_space(&self.element_at(i, m)?, order)
    }

    /// Partition into conjugacy classes, with ranks and torsion resolved.
    pub fn conjugacy_classes(&self) -> Result<ClassTable> {
        self.conjugacy_classes_with(DEFAULT_PRECISION_CEILING)
    }

    pub fn conjugacy_classes_with(&self, precision_ceiling: u32) -> Result<ClassTable> {
        let n = self.order();
        let inverses = self.generator_inverses();
        let mut sorted: Vec<u32> = (0..n as u32).collect();
        sorted.sort_by(|&a, &b| self.elements[a as usize].entries().cmp(self.elements[b as usize].entries()));

        const UNSET: u32 = u32::MAX;
        let mut class_of = vec![UNSET; n];
        let mut reps = Vec::new();
        let mut sizes = Vec::new();
        for &start in &sorted {
            if class_of[start as usize] != UNSET {
                continue;
            }
            let cid = reps.len() as u32;
            class_of[start as usize] = cid;
            let mut queue = VecDeque::from([start]);
            let mut size = 0usize;
            while let Some(x) = queue.pop_front() {
                size += 1;
                let xm = &self.elements[x as usize];
                for (g, ginv) in self.generators.iter().zip(&inverses) {
                    let y = g.mul_unchecked(xm).mul_unchecked(ginv);
                    let j = self.index[y.entries()];
                    if class_of[j as usize] == UNSET {
                        class_of[j as usize] = cid;
                        queue.push_back(j);
                    }
                }
            }
            reps.push(start as usize);
            sizes.push(size);
        }

        let records = reps
            .par_iter()
            .zip(sizes.par_iter())
            .map(|(&rep, &size)| {
                let element_order = self.element_order(rep);
                let rank = self.rank_of(rep, element_order)?;
                let torsion_vals = resolve_torsion(self, rep, rank, precision_ceiling)?;
                Ok(ConjugacyClassRecord {
                    representative: rep,
                    class_size: size as u64,
                    centralizer_order: (n / size) as u64,
                    element_order,
                    rank,
                    torsion_vals,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(ClassTable { records, class_of })
    }
}

/// One conjugacy class with the data entering the fixed-point count of its
/// elements: rank `r(w)` of the fixed lattice and the elementary divisor
/// valuations of the torsion of `Coker(w - 1)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ConjugacyClassRecord {
    /// Index into the group's element list; the byte-lexicographically smallest member.
    pub representative: usize,
    pub class_size: u64,
    pub centralizer_order: u64,
    pub element_order: u64,
    pub rank: u32,
    pub torsion_vals: Vec<u32>,
}

impl ConjugacyClassRecord {
    /// `|A_w|` as an exponent of `p`.
    pub fn torsion_exponent(&self) -> u32 {
        self.torsion_vals.iter().sum()
    }

    /// Exponent of `t_k(w) = |A_w / p^k A_w|`.
    pub fn torsion_exponent_at(&self, k: u32) -> u32 {
        self.torsion_vals.iter().map(|&e| e.min(k)).sum()
    }

    pub fn has_torsion(&self) -> bool {
        !self.torsion_vals.is_empty()
    }
}

#[derive(Clone, Debug)]
pub struct ClassTable {
    pub records: Vec<ConjugacyClassRecord>,
    /// Class index of every group element.
    pub class_of: Vec<u32>,
}

impl ClassTable {
    pub fn class_containing(&self, element: usize) -> &ConjugacyClassRecord {
        &self.records[self.class_of[element] as usize]
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }
}

/// Rank of the fixed lattice of `w`, an element of order `d`, computed as the
/// average of `tr(w^j)` over `0 <= j < d`.
///
/// Needs `p^M > d * l` so that the integer `d * r` is determined by its residue.
pub fn rank_fixed_space(w: &SquareMatrix, d: u64) -> Result<u32> {
    let m = w.modulus();
    let l = w.dim() as u64;
    let bound = d as u128 * l as u128;
    if (m.value() as u128) <= bound {
        return Err(Error::PrecisionTooLow(format!("rank of an order-{d} element needs p^M > {bound}, have {m}")));
    }
    let mut power = SquareMatrix::identity(w.dim(), m);
    let mut sum = 0u64;
    for _ in 0..d {
        sum = m.add(sum, power.trace().value());
        power = power.mul_unchecked(w);
    }
    if !power.is_identity() {
        return Err(Error::SpecInvalid(format!("element does not have order dividing {d}")));
    }
    if sum as u128 > bound || !sum.is_multiple_of(d) {
        return Err(Error::NonIntegralRank { sum, order: d });
    }
    Ok((sum / d) as u32)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::snf::smith_valuations;

    fn md(p: u64, e: u32) -> Modulus {
        Modulus::new(p, e).unwrap()
    }

    fn perm_source(p: u64) -> Arc<dyn GeneratorSource> {
        // S_3 acting on Z_p^3 by permutation matrices
        Arc::new(IntegerGenerators::new(
            p,
            3,
            vec![
                vec![vec![0, 1, 0], vec![1, 0, 0], vec![0, 0, 1]],
                vec![vec![1, 0, 0], vec![0, 0, 1], vec![0, 1, 0]],
            ],
        ))
    }

    #[test]
    fn trivial_group() {
        let src = Arc::new(IntegerGenerators::new(5, 2, vec![]));
        let g = close(src, md(5, 2), DEFAULT_CLOSURE_CAP).unwrap();
        assert_eq!(g.order(), 1);
        let classes = g.conjugacy_classes().unwrap();
        assert_eq!(classes.len(), 1);
        assert_eq!(classes.records[0].class_size, 1);
        assert_eq!(classes.records[0].rank, 2);
        assert!(classes.records[0].torsion_vals.is_empty());
    }

    #[test]
    fn symmetric_group_classes() {
        let g = close(perm_source(7), md(7, 2), DEFAULT_CLOSURE_CAP).unwrap();
        assert_eq!(g.order(), 6);
        let t = g.conjugacy_classes().unwrap();
        let mut sizes: Vec<(u64, u32)> = t.records.iter().map(|r| (r.class_size, r.rank)).collect();
        sizes.sort();
        // identity fixes a rank-3 lattice, transpositions rank 2, 3-cycles rank 1
        assert_eq!(sizes, vec![(1, 3), (2, 1), (3, 2)]);
        let total: u64 = t.records.iter().map(|r| r.class_size).sum();
        assert_eq!(total, 6);
    }

    #[test]
    fn closure_is_idempotent_and_cap_enforced() {
        let g = close(perm_source(3), md(3, 2), DEFAULT_CLOSURE_CAP).unwrap();
        let again = close_matrices(g.elements().to_vec(), DEFAULT_CLOSURE_CAP).unwrap();
        assert_eq!(again.order(), g.order());
        assert!(g.elements().iter().all(|e| again.contains(e)));
        assert_eq!(close(perm_source(3), md(3, 2), 4).unwrap_err(), Error::CapExceeded(4));
    }

    #[test]
    fn words_evaluate_back_to_elements() {
        let g = close(perm_source(5), md(5, 1), DEFAULT_CLOSURE_CAP).unwrap();
        for i in 0..g.order() {
            let lifted = g.element_at(i, md(5, 3)).unwrap();
            assert_eq!(lifted.reduce_to(md(5, 1)).unwrap(), *g.element(i));
        }
    }

    #[test]
    fn fixed_generators_cannot_lift() {
        let a = SquareMatrix::from_rows(&[vec![0i64, 1], vec![1, 0]], md(3, 1)).unwrap();
        let g = close_matrices(vec![a], 10).unwrap();
        assert_eq!(g.order(), 2);
        assert_eq!(g.element_at(1, md(3, 2)).unwrap_err(), Error::PrecisionCeiling(1));
    }

    #[test]
    fn rank_fixed_space_examples() {
        let m = md(2, 5);
        assert_eq!(rank_fixed_space(&SquareMatrix::identity(4, m), 1).unwrap(), 4);
        let minus = SquareMatrix::identity(3, m).neg();
        assert_eq!(rank_fixed_space(&minus, 2).unwrap(), 0);
        assert!(matches!(
            rank_fixed_space(&minus, 2).and_then(|_| rank_fixed_space(&minus.reduce_to(md(2, 2)).unwrap(), 2)),
            Err(Error::PrecisionTooLow(_))
        ));
    }

    #[test]
    fn reduction_preserves_order_or_fails() {
        let src: Arc<dyn GeneratorSource> = Arc::new(IntegerGenerators::new(
            2,
            2,
            vec![vec![vec![-1, 0], vec![0, 1]], vec![vec![0, 1], vec![1, 0]]],
        ));
        let g = close(src, md(2, 4), DEFAULT_CLOSURE_CAP).unwrap();
        assert_eq!(g.order(), 8);
        assert_eq!(g.reduce_modulus(2).unwrap().order(), 8);
        assert_eq!(g.reduce_modulus(4).unwrap().order(), 8);
        assert_eq!(g.reduce_modulus(1).unwrap_err(), Error::UnfaithfulReduction(1));
    }

    #[test]
    fn conjugation_by_generators_stays_in_class() {
        let g = close(perm_source(5), md(5, 2), DEFAULT_CLOSURE_CAP).unwrap();
        let t = g.conjugacy_classes().unwrap();
        for r in &t.records {
            let x = g.element(r.representative);
            for gen in g.generators() {
                let inv = gen.pow(g.element_order(g.index_of(gen).unwrap()) - 1);
                let y = gen.mul_unchecked(x).mul_unchecked(&inv);
                assert_eq!(t.class_of[g.index_of(&y).unwrap()], t.class_of[r.representative]);
            }
            // rank agrees with the count of saturated Smith valuations at the working precision
            let sv = smith_valuations(&x.minus_identity());
            assert_eq!(sv.saturated_count() as u32, r.rank);
        }
    }
}
