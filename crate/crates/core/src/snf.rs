//! Dense linear algebra over `Z/p^M`.
//!
//! Over the local ring `Z/p^M` every elementary divisor is a unit times a
//! power of `p`, so a Smith normal form is fully described by the list of
//! valuations of its diagonal. Kernel sizes of reductions mod `p^n` follow
//! directly from those valuations.

use std::fmt;

use num_bigint::BigUint;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::modp::{Modulus, Residue, Valuation};

/// An `l x l` matrix over `Z/p^M`, stored row-major.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct SquareMatrix {
    dim: usize,
    modulus: Modulus,
    entries: Vec<u64>,
}

impl SquareMatrix {
    pub fn zero(dim: usize, modulus: Modulus) -> Self {
        assert!(dim >= 1, "matrix dimension must be positive");
        SquareMatrix { dim, modulus, entries: vec![0; dim * dim] }
    }

    pub fn identity(dim: usize, modulus: Modulus) -> Self {
        let mut m = Self::zero(dim, modulus);
        for i in 0..dim {
            m.entries[i * dim + i] = 1 % modulus.value();
        }
        m
    }

    /// `c * I`.
    pub fn scalar(dim: usize, c: Residue) -> Self {
        let mut m = Self::zero(dim, c.modulus());
        for i in 0..dim {
            m.entries[i * dim + i] = c.value();
        }
        m
    }

    /// Build from integer rows, reducing every entry mod `p^M`.
    pub fn from_rows<T: Copy + Into<i128>>(rows: &[Vec<T>], modulus: Modulus) -> Result<Self> {
        let dim = rows.len();
        if dim == 0 {
            return Err(Error::DimensionMismatch(0, 1));
        }
        let mut entries = Vec::with_capacity(dim * dim);
        for row in rows {
            if row.len() != dim {
                return Err(Error::DimensionMismatch(row.len(), dim));
            }
            entries.extend(row.iter().map(|&x| modulus.reduce(x.into())));
        }
        Ok(SquareMatrix { dim, modulus, entries })
    }

    /// Build from residues, all sharing `modulus`.
    pub fn from_residues(rows: &[Vec<Residue>]) -> Result<Self> {
        let dim = rows.len();
        if dim == 0 {
            return Err(Error::DimensionMismatch(0, 1));
        }
        let modulus = rows[0][0].modulus();
        let mut entries = Vec::with_capacity(dim * dim);
        for row in rows {
            if row.len() != dim {
                return Err(Error::DimensionMismatch(row.len(), dim));
            }
            for r in row {
                if r.modulus() != modulus {
                    return Err(Error::ModulusMismatch(modulus.to_string(), r.modulus().to_string()));
                }
                entries.push(r.value());
            }
        }
        Ok(SquareMatrix { dim, modulus, entries })
    }

    pub(crate) fn from_raw(dim: usize, modulus: Modulus, entries: Vec<u64>) -> Self {
        debug_assert_eq!(entries.len(), dim * dim);
        SquareMatrix { dim, modulus, entries }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn modulus(&self) -> Modulus {
        self.modulus
    }

    /// Row-major canonical representatives.
    pub fn entries(&self) -> &[u64] {
        &self.entries
    }

    pub fn get(&self, i: usize, j: usize) -> Residue {
        self.modulus.residue(self.entries[i * self.dim + j] as i128)
    }

    pub fn rows(&self) -> Vec<Vec<u64>> {
        self.entries.chunks(self.dim).map(<[u64]>::to_vec).collect()
    }

    pub fn multiply(&self, other: &SquareMatrix) -> Result<SquareMatrix> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch(self.dim, other.dim));
        }
        if self.modulus != other.modulus {
            return Err(Error::ModulusMismatch(self.modulus.to_string(), other.modulus.to_string()));
        }
        Ok(self.mul_unchecked(other))
    }

    /// Product without the compatibility checks; panics on mismatch in debug.
    pub(crate) fn mul_unchecked(&self, other: &SquareMatrix) -> SquareMatrix {
        debug_assert!(self.dim == other.dim && self.modulus == other.modulus);
        let n = self.dim;
        let pm = self.modulus.value() as u128;
        let mut out = vec![0u64; n * n];
        for i in 0..n {
            for j in 0..n {
                let mut acc: u128 = 0;
                for k in 0..n {
                    acc += self.entries[i * n + k] as u128 * other.entries[k * n + j] as u128;
                    // at most l <= 8 terms below 2^124 each would overflow, so fold eagerly
                    if acc >= 1 << 125 {
                        acc %= pm;
                    }
                }
                out[i * n + j] = (acc % pm) as u64;
            }
        }
        SquareMatrix { dim: n, modulus: self.modulus, entries: out }
    }

    pub fn pow(&self, mut e: u64) -> SquareMatrix {
        let mut acc = SquareMatrix::identity(self.dim, self.modulus);
        let mut base = self.clone();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul_unchecked(&base);
            }
            base = base.mul_unchecked(&base);
            e >>= 1;
        }
        acc
    }

    pub fn neg(&self) -> SquareMatrix {
        let m = self.modulus;
        SquareMatrix {
            dim: self.dim,
            modulus: m,
            entries: self.entries.iter().map(|&x| m.neg(x)).collect(),
        }
    }

    pub fn scale(&self, c: Residue) -> SquareMatrix {
        assert_eq!(c.modulus(), self.modulus, "mixed-modulus scaling");
        let m = self.modulus;
        SquareMatrix {
            dim: self.dim,
            modulus: m,
            entries: self.entries.iter().map(|&x| m.mul(x, c.value())).collect(),
        }
    }

    /// `A - I`.
    pub fn minus_identity(&self) -> SquareMatrix {
        let mut out = self.clone();
        let m = self.modulus;
        for i in 0..self.dim {
            let idx = i * self.dim + i;
            out.entries[idx] = m.sub(out.entries[idx], 1 % m.value());
        }
        out
    }

    pub fn trace(&self) -> Residue {
        let m = self.modulus;
        let t = (0..self.dim).fold(0, |acc, i| m.add(acc, self.entries[i * self.dim + i]));
        m.residue(t as i128)
    }

    pub fn is_identity(&self) -> bool {
        let one = 1 % self.modulus.value();
        self.entries
            .iter()
            .enumerate()
            .all(|(idx, &x)| x == if idx / self.dim == idx % self.dim { one } else { 0 })
    }

    /// Entrywise reduction to `p^n`, `n <= M`.
    pub fn reduce_to(&self, target: Modulus) -> Result<SquareMatrix> {
        if target.p() != self.modulus.p() || target.exp() > self.modulus.exp() {
            return Err(Error::PrecisionTooLow(format!(
                "cannot reduce a matrix mod {} to {}",
                self.modulus, target
            )));
        }
        let q = target.value();
        Ok(SquareMatrix {
            dim: self.dim,
            modulus: target,
            entries: self.entries.iter().map(|&x| x % q).collect(),
        })
    }

    /// Matrix times column vector, for vectors with entries mod `p^M`.
    pub fn apply(&self, v: &[u64]) -> Vec<u64> {
        let n = self.dim;
        let pm = self.modulus.value() as u128;
        (0..n)
            .map(|i| {
                let acc: u128 = (0..n).map(|k| self.entries[i * n + k] as u128 * v[k] as u128).sum();
                (acc % pm) as u64
            })
            .collect()
    }

    /// Parse the plain-text matrix format: a header line `p M rows cols`
    /// followed by `rows` lines of `cols` non-negative integers.
    pub fn parse_text(text: &str) -> Result<MatrixText> {
        let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty() && !l.starts_with('#'));
        let header = lines.next().ok_or_else(|| Error::Parse("empty matrix file".into()))?;
        let nums: Vec<u64> = header
            .split_whitespace()
            .map(|t| t.parse::<u64>().map_err(|e| Error::Parse(format!("header token {t:?}: {e}"))))
            .collect::<Result<_>>()?;
        let [p, exp, rows, cols] = nums[..] else {
            return Err(Error::Parse(format!("header must be `p M rows cols`, got {header:?}")));
        };
        let exp = u32::try_from(exp).map_err(|_| Error::Parse("precision exponent too large".into()))?;
        let modulus = Modulus::new(p, exp)?;
        let (rows, cols) = (rows as usize, cols as usize);
        if rows == 0 || cols == 0 {
            return Err(Error::Parse("matrix must have at least one row and column".into()));
        }
        let mut entries = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            let line = lines.next().ok_or_else(|| Error::Parse(format!("missing row {}", r + 1)))?;
            let row: Vec<u64> = line
                .split_whitespace()
                .map(|t| {
                    t.parse::<u128>()
                        .map(|v| (v % modulus.value() as u128) as u64)
                        .map_err(|e| Error::Parse(format!("row {}: {t:?}: {e}", r + 1)))
                })
                .collect::<Result<_>>()?;
            if row.len() != cols {
                return Err(Error::Parse(format!("row {} has {} entries, expected {cols}", r + 1, row.len())));
            }
            entries.extend(row);
        }
        if lines.next().is_some() {
            return Err(Error::Parse(format!("more than {rows} rows")));
        }
        Ok(MatrixText { modulus, rows, cols, entries })
    }

    /// Render in the plain-text matrix format.
    pub fn to_text(&self) -> String {
        let mut s = format!("{} {} {} {}\n", self.modulus.p(), self.modulus.exp(), self.dim, self.dim);
        for row in self.entries.chunks(self.dim) {
            let line: Vec<String> = row.iter().map(u64::to_string).collect();
            s.push_str(&line.join(" "));
            s.push('\n');
        }
        s
    }
}

impl fmt::Debug for SquareMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[mod {}]", self.modulus)?;
        for row in self.entries.chunks(self.dim) {
            write!(f, " {row:?}")?;
        }
        Ok(())
    }
}

/// A possibly rectangular matrix read from the text format.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MatrixText {
    pub modulus: Modulus,
    pub rows: usize,
    pub cols: usize,
    pub entries: Vec<u64>,
}

impl MatrixText {
    pub fn smith_valuations(&self) -> SmithValuations {
        let mut work = self.entries.clone();
        smith_in_place(self.rows, self.cols, &mut work, self.modulus)
    }

    pub fn to_square(&self) -> Result<SquareMatrix> {
        if self.rows != self.cols {
            return Err(Error::DimensionMismatch(self.rows, self.cols));
        }
        Ok(SquareMatrix::from_raw(self.rows, self.modulus, self.entries.clone()))
    }
}

/// Sorted valuations of the Smith normal form diagonal.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct SmithValuations {
    modulus: Modulus,
    vals: Vec<Valuation>,
}

impl SmithValuations {
    pub fn vals(&self) -> &[Valuation] {
        &self.vals
    }

    pub fn modulus(&self) -> Modulus {
        self.modulus
    }

    pub fn saturated_count(&self) -> usize {
        self.vals.iter().filter(|v| v.is_saturated()).count()
    }

    /// Finite valuations greater than zero.
    pub fn positive_finite(&self) -> Vec<u32> {
        self.vals.iter().filter_map(Valuation::finite).filter(|&e| e > 0).collect()
    }

    /// Diagonal entries `p^e`, with saturated entries written as 0.
    pub fn diagonal(&self) -> Vec<BigUint> {
        let p = BigUint::from(self.modulus.p());
        self.vals
            .iter()
            .map(|v| match v {
                Valuation::Finite(e) => p.pow(*e),
                Valuation::Saturated => BigUint::from(0u32),
            })
            .collect()
    }
}

/// Diagonal valuations of the Smith normal form, computed by minimal-valuation
/// pivoting with lexicographic tie-breaking.
pub fn smith_valuations(a: &SquareMatrix) -> SmithValuations {
    let mut work = a.entries.clone();
    smith_in_place(a.dim, a.dim, &mut work, a.modulus)
}

fn smith_in_place(rows: usize, cols: usize, a: &mut [u64], m: Modulus) -> SmithValuations {
    let steps = rows.min(cols);
    let mut vals = Vec::with_capacity(steps);
    let p = m.p();
    for t in 0..steps {
        // pivot of minimal valuation, lowest (row, col) on ties
        let mut best: Option<(u32, usize, usize)> = None;
        for i in t..rows {
            for j in t..cols {
                if let Valuation::Finite(e) = m.valuation_of(a[i * cols + j]) {
                    if best.is_none_or(|(b, _, _)| e < b) {
                        best = Some((e, i, j));
                    }
                }
            }
        }
        let Some((e, pi, pj)) = best else {
            vals.extend(std::iter::repeat_n(Valuation::Saturated, steps - t));
            break;
        };
        vals.push(Valuation::Finite(e));
        if pi != t {
            for j in 0..cols {
                a.swap(t * cols + j, pi * cols + j);
            }
        }
        if pj != t {
            for i in 0..rows {
                a.swap(i * cols + t, i * cols + pj);
            }
        }
        // normalize the pivot to exactly p^e
        let pe = p.pow(e);
        let unit = a[t * cols + t] / pe;
        let unit_inv = m.inverse_of(unit % m.value()).expect("unit part is prime to p");
        for j in t..cols {
            a[t * cols + j] = m.mul(a[t * cols + j], unit_inv);
        }
        debug_assert_eq!(a[t * cols + t], pe);
        // clear the pivot column below; every entry there is divisible by p^e
        for i in t + 1..rows {
            let q = a[i * cols + t] / pe;
            if q != 0 {
                for j in t..cols {
                    a[i * cols + j] = m.sub(a[i * cols + j], m.mul(q, a[t * cols + j]));
                }
            }
        }
        // the pivot row to the right is cleared by column operations, which
        // leave the minor untouched because the column below the pivot is zero
        for j in t + 1..cols {
            a[t * cols + j] = 0;
        }
    }
    vals.sort();
    SmithValuations { modulus: m, vals }
}

/// Exponent `s` with `|Ker(A mod p^n)| = p^s`.
pub fn kernel_exponent(a: &SquareMatrix, n: u32) -> Result<u32> {
    if n > a.modulus.exp() {
        return Err(Error::PrecisionTooLow(format!(
            "kernel mod {}^{n} requested from a matrix known mod {}",
            a.modulus.p(),
            a.modulus
        )));
    }
    let target = a.modulus.with_exp(n)?;
    let reduced = a.reduce_to(target)?;
    Ok(smith_valuations(&reduced).vals.iter().map(|v| v.capped(n)).sum())
}

/// `|Ker(A mod p^n)|`, exactly.
pub fn kernel_size(a: &SquareMatrix, n: u32) -> Result<BigUint> {
    let s = kernel_exponent(a, n)?;
    Ok(BigUint::from(a.modulus.p()).pow(s))
}

/// Determinant by row elimination with minimal-valuation pivots in each column.
pub fn determinant(a: &SquareMatrix) -> Residue {
    let m = a.modulus;
    let n = a.dim;
    let mut w = a.entries.clone();
    let mut det: u64 = 1 % m.value();
    for c in 0..n {
        let mut best: Option<(u32, usize)> = None;
        for r in c..n {
            if let Valuation::Finite(e) = m.valuation_of(w[r * n + c]) {
                if best.is_none_or(|(b, _)| e < b) {
                    best = Some((e, r));
                }
            }
        }
        let Some((e, r)) = best else {
            return m.residue(0);
        };
        if r != c {
            for j in 0..n {
                w.swap(r * n + j, c * n + j);
            }
            det = m.neg(det);
        }
        let pivot = w[c * n + c];
        det = m.mul(det, pivot);
        let pe = m.p().pow(e);
        let unit_inv = m.inverse_of((pivot / pe) % m.value()).expect("unit part is prime to p");
        for i in c + 1..n {
            let x = w[i * n + c];
            if x == 0 {
                continue;
            }
            // x = p^e * q, so x - q * u^{-1} * pivot = 0
            let factor = m.mul(x / pe, unit_inv);
            for j in c..n {
                w[i * n + j] = m.sub(w[i * n + j], m.mul(factor, w[c * n + j]));
            }
        }
    }
    m.residue(det as i128)
}
