//! Partial matrices, rank-one factorizations, certificates and completion checks.

use std::collections::{BTreeMap, BTreeSet};

use num_traits::{Signed, Zero};

use crate::error::{Error, Result};
use crate::graph::Cycle;
use crate::numeric::rational::from_f64;
use crate::numeric::{AlgebraicInterval, Rational};

/// Zero-based `(row, col)`.
pub type Position = (usize, usize);

/// An `m x n` matrix with values known only on a pattern of positions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PartialMatrix {
    nrows: usize,
    ncols: usize,
    entries: BTreeMap<Position, Rational>,
}

/// Validates and builds a partial matrix.
pub fn make_partial_matrix(
    nrows: usize,
    ncols: usize,
    entries: impl IntoIterator<Item = (usize, usize, Rational)>,
) -> Result<PartialMatrix> {
    if nrows == 0 || ncols == 0 {
        return Err(Error::EmptyDimension { nrows, ncols });
    }
    let mut map = BTreeMap::new();
    for (row, col, value) in entries {
        if row >= nrows || col >= ncols {
            return Err(Error::OutOfRange {
                row,
                col,
                nrows,
                ncols,
            });
        }
        if value.is_negative() {
            return Err(Error::NegativeValue { row, col });
        }
        if map.insert((row, col), value).is_some() {
            return Err(Error::DuplicatePosition { row, col });
        }
    }
    Ok(PartialMatrix {
        nrows,
        ncols,
        entries: map,
    })
}

impl PartialMatrix {
    pub fn new(
        nrows: usize,
        ncols: usize,
        entries: impl IntoIterator<Item = (usize, usize, Rational)>,
    ) -> Result<Self> {
        make_partial_matrix(nrows, ncols, entries)
    }

    /// `n x n` matrix with the given diagonal and nothing else specified.
    pub fn diagonal(values: &[Rational]) -> Result<Self> {
        let n = values.len();
        make_partial_matrix(
            n,
            n,
            values.iter().cloned().enumerate().map(|(i, v)| (i, i, v)),
        )
    }

    pub fn nrows(&self) -> usize {
        self.nrows
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn entries(&self) -> &BTreeMap<Position, Rational> {
        &self.entries
    }

    pub fn get(&self, row: usize, col: usize) -> Option<&Rational> {
        self.entries.get(&(row, col))
    }

    pub fn is_specified(&self, row: usize, col: usize) -> bool {
        self.entries.contains_key(&(row, col))
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn pattern(&self) -> BTreeSet<Position> {
        self.entries.keys().copied().collect()
    }

    pub fn has_zero(&self) -> bool {
        self.entries.values().any(Zero::is_zero)
    }

    pub fn total(&self) -> Rational {
        self.entries.values().fold(Rational::zero(), |a, v| a + v)
    }

    pub fn transpose(&self) -> Self {
        Self {
            nrows: self.ncols,
            ncols: self.nrows,
            entries: self
                .entries
                .iter()
                .map(|(&(i, j), v)| ((j, i), v.clone()))
                .collect(),
        }
    }

    /// Relabels rows and columns: entry `(i, j)` moves to `(rows[i], cols[j])`.
    pub fn permuted(&self, rows: &[usize], cols: &[usize]) -> Result<Self> {
        if rows.len() != self.nrows || cols.len() != self.ncols {
            return Err(Error::DimensionMismatch {
                expected: format!("{}x{}", self.nrows, self.ncols),
                found: format!("{}x{}", rows.len(), cols.len()),
            });
        }
        make_partial_matrix(
            self.nrows,
            self.ncols,
            self.entries
                .iter()
                .map(|(&(i, j), v)| (rows[i], cols[j], v.clone())),
        )
    }

    /// Same shape with some entries overwritten or added; no validation of values.
    pub(crate) fn with_entries(
        &self,
        extra: impl IntoIterator<Item = (Position, Rational)>,
    ) -> Self {
        let mut entries = self.entries.clone();
        entries.extend(extra);
        Self {
            nrows: self.nrows,
            ncols: self.ncols,
            entries,
        }
    }
}

/// `M = u v^T` with `u`, `v` in the simplex, each coordinate carried as an enclosure.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RankOneFactorization {
    pub u: Vec<AlgebraicInterval>,
    pub v: Vec<AlgebraicInterval>,
}

impl RankOneFactorization {
    pub fn new(u: Vec<AlgebraicInterval>, v: Vec<AlgebraicInterval>) -> Self {
        Self { u, v }
    }

    pub fn from_exact(u: Vec<Rational>, v: Vec<Rational>) -> Self {
        Self {
            u: u.into_iter().map(AlgebraicInterval::exact).collect(),
            v: v.into_iter().map(AlgebraicInterval::exact).collect(),
        }
    }

    pub fn from_f64(u: &[f64], v: &[f64]) -> Self {
        Self::from_exact(
            u.iter().map(|&x| from_f64(x)).collect(),
            v.iter().map(|&x| from_f64(x)).collect(),
        )
    }

    pub fn nrows(&self) -> usize {
        self.u.len()
    }

    pub fn ncols(&self) -> usize {
        self.v.len()
    }

    pub fn entry(&self, row: usize, col: usize) -> AlgebraicInterval {
        &self.u[row] * &self.v[col]
    }

    pub fn is_exact(&self) -> bool {
        self.u
            .iter()
            .chain(&self.v)
            .all(AlgebraicInterval::is_exact)
    }

    pub fn exact_factors(&self) -> Option<(Vec<Rational>, Vec<Rational>)> {
        let u = self
            .u
            .iter()
            .map(|x| x.as_exact().cloned())
            .collect::<Option<Vec<_>>>()?;
        let v = self
            .v
            .iter()
            .map(|x| x.as_exact().cloned())
            .collect::<Option<Vec<_>>>()?;
        Some((u, v))
    }

    /// Exact matrix entries when every coordinate is exact.
    pub fn exact_matrix(&self) -> Option<Vec<Vec<Rational>>> {
        let (u, v) = self.exact_factors()?;
        Some(
            u.iter()
                .map(|a| v.iter().map(|b| a * b).collect())
                .collect(),
        )
    }

    pub fn u_f64(&self) -> Vec<f64> {
        self.u.iter().map(AlgebraicInterval::to_f64).collect()
    }

    pub fn v_f64(&self) -> Vec<f64> {
        self.v.iter().map(AlgebraicInterval::to_f64).collect()
    }

    pub fn matrix_f64(&self) -> Vec<Vec<f64>> {
        let u = self.u_f64();
        let v = self.v_f64();
        u.iter()
            .map(|a| v.iter().map(|b| a * b).collect())
            .collect()
    }

    /// Factorization of the transposed matrix.
    pub fn transpose(&self) -> Self {
        Self {
            u: self.v.clone(),
            v: self.u.clone(),
        }
    }

    /// Largest distance between corresponding matrix entries, in floating point.
    pub fn max_entry_distance(&self, other: &Self) -> f64 {
        let a = self.matrix_f64();
        let b = other.matrix_f64();
        a.iter()
            .flatten()
            .zip(b.iter().flatten())
            .map(|(x, y)| (x - y).abs())
            .fold(0.0, f64::max)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Completable,
    NotCompletable,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Evidence {
    Witness(RankOneFactorization),
    CycleViolation {
        cycle: Cycle,
        lhs: Rational,
        rhs: Rational,
    },
    /// A zero followed by a positive entry in its row and a positive entry in its column.
    ThreeLineViolation([Position; 3]),
    /// Enclosure of the root sum, strictly above one.
    NormExcess(AlgebraicInterval),
    SumNotOne(Rational),
    /// One factor vector per tensor mode.
    TensorWitness(Vec<Vec<AlgebraicInterval>>),
    /// Verdict settled by a closed-form condition with no constructed witness.
    Criterion(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Certificate {
    pub verdict: Verdict,
    pub evidence: Evidence,
}

impl Certificate {
    pub fn completable(evidence: Evidence) -> Self {
        Self {
            verdict: Verdict::Completable,
            evidence,
        }
    }

    pub fn not_completable(evidence: Evidence) -> Self {
        Self {
            verdict: Verdict::NotCompletable,
            evidence,
        }
    }

    pub fn is_completable(&self) -> bool {
        self.verdict == Verdict::Completable
    }

    pub fn witness(&self) -> Option<&RankOneFactorization> {
        match &self.evidence {
            Evidence::Witness(f) => Some(f),
            _ => None,
        }
    }
}

/// Checks agreement on the pattern, nonnegativity and both simplex sums, all to
/// within `eps`, using certified upper bounds of the enclosures.
pub fn verify_completion(m: &PartialMatrix, f: &RankOneFactorization, eps: f64) -> Result<bool> {
    if f.nrows() != m.nrows() || f.ncols() != m.ncols() {
        return Err(Error::DimensionMismatch {
            expected: format!("{}x{}", m.nrows(), m.ncols()),
            found: format!("{}x{}", f.nrows(), f.ncols()),
        });
    }
    let eps = from_f64(eps);
    let within = |x: &AlgebraicInterval| x.abs_upper() <= eps;
    for (&(i, j), value) in m.entries() {
        let diff = &f.entry(i, j) - &AlgebraicInterval::exact(value.clone());
        if !within(&diff) {
            return Ok(false);
        }
    }
    let neg_eps = -eps.clone();
    if f.u.iter().chain(&f.v).any(|x| *x.lower() < neg_eps) {
        return Ok(false);
    }
    let one = AlgebraicInterval::one();
    let su = &AlgebraicInterval::sum(&f.u) - &one;
    let sv = &AlgebraicInterval::sum(&f.v) - &one;
    Ok(within(&su) && within(&sv))
}
