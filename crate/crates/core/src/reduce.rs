//! Reduction pipeline: zero propagation, cycle checks, completion of each
//! connected block, and contraction of blocks to a diagonal instance.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::graph::{BipartiteGraph, ComponentSummary, Cycle};
use crate::model::{PartialMatrix, Position, RankOneFactorization};
use crate::numeric::{AlgebraicInterval, Rational};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ZeroPropagation {
    Ok {
        filled: PartialMatrix,
        zero_rows: BTreeSet<usize>,
        zero_cols: BTreeSet<usize>,
    },
    /// The zero, a positive entry in its row, a positive entry in its column.
    Violation([Position; 3]),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CycleCheck {
    Ok,
    Violation {
        cycle: Cycle,
        lhs: Rational,
        rhs: Rational,
    },
}

/// Result of filling the transitive closure.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CycleCompletion {
    pub matrix: PartialMatrix,
    pub reconstructed: BTreeSet<Position>,
}

/// Rank-one factorization of one block: entry `(r, c)` is `block_sum * p_r * q_c`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BlockFactor {
    pub rows: Vec<usize>,
    pub cols: Vec<usize>,
    pub row_weights: Vec<Rational>,
    pub col_weights: Vec<Rational>,
    pub block_sum: Rational,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReducedForm {
    pub filled: PartialMatrix,
    pub reconstructed: BTreeSet<Position>,
    pub zero_rows: BTreeSet<usize>,
    pub zero_cols: BTreeSet<usize>,
    pub contracted_diagonal: Vec<Rational>,
    pub summary: ComponentSummary,
    pub block_factors: Vec<BlockFactor>,
}

fn positive_part(m: &PartialMatrix) -> PartialMatrix {
    PartialMatrix::new(
        m.nrows(),
        m.ncols(),
        m.entries()
            .iter()
            .filter(|(_, v)| !v.is_zero())
            .map(|(&(i, j), v)| (i, j, v.clone())),
    )
    .expect("subset of a valid matrix")
}

pub fn propagate_zeros(m: &PartialMatrix) -> ZeroPropagation {
    let mut row_pos: BTreeMap<usize, usize> = BTreeMap::new();
    let mut col_pos: BTreeMap<usize, usize> = BTreeMap::new();
    for (&(i, j), v) in m.entries() {
        if !v.is_zero() {
            row_pos.entry(i).or_insert(j);
            col_pos.entry(j).or_insert(i);
        }
    }
    let mut zero_rows = BTreeSet::new();
    let mut zero_cols = BTreeSet::new();
    let mut zeros: VecDeque<Position> = m
        .entries()
        .iter()
        .filter(|(_, v)| v.is_zero())
        .map(|(&p, _)| p)
        .collect();
    let mut seen: BTreeSet<Position> = zeros.iter().copied().collect();
    while let Some((i, j)) = zeros.pop_front() {
        match (row_pos.get(&i), col_pos.get(&j)) {
            (Some(&c), Some(&r)) => return ZeroPropagation::Violation([(i, j), (i, c), (r, j)]),
            (Some(_), None) => {
                if zero_cols.insert(j) {
                    for r in 0..m.nrows() {
                        if seen.insert((r, j)) {
                            zeros.push_back((r, j));
                        }
                    }
                }
            }
            (None, Some(_)) => {
                if zero_rows.insert(i) {
                    for c in 0..m.ncols() {
                        if seen.insert((i, c)) {
                            zeros.push_back((i, c));
                        }
                    }
                }
            }
            (None, None) => {}
        }
    }
    let filled = fill_zero_lines(m, &zero_rows, &zero_cols);
    ZeroPropagation::Ok {
        filled,
        zero_rows,
        zero_cols,
    }
}

pub(crate) fn fill_zero_lines(
    m: &PartialMatrix,
    rows: &BTreeSet<usize>,
    cols: &BTreeSet<usize>,
) -> PartialMatrix {
    let mut extra = Vec::new();
    for &i in rows {
        for j in 0..m.ncols() {
            extra.push(((i, j), Rational::zero()));
        }
    }
    for &j in cols {
        for i in 0..m.nrows() {
            extra.push(((i, j), Rational::zero()));
        }
    }
    m.with_entries(extra)
}

/// Tests the cycle condition on every fundamental cycle of the positive entries.
pub fn check_cycle_singularity(m: &PartialMatrix) -> CycleCheck {
    let pos = positive_part(m);
    let g = BipartiteGraph::from_partial_matrix(&pos);
    for cycle in g.fundamental_cycles() {
        let (lhs, rhs) = cycle.products(&pos);
        if lhs != rhs {
            return CycleCheck::Violation { cycle, lhs, rhs };
        }
    }
    CycleCheck::Ok
}

/// Fills every position of the transitive closure of the positive entries with
/// the unique rank-one value.
pub fn complete_by_cycles(m: &PartialMatrix) -> Result<CycleCompletion> {
    let pos = positive_part(m);
    let g = BipartiteGraph::from_partial_matrix(&pos);
    let nr = m.nrows();
    let summary = g.components();
    let mut extra = Vec::new();
    let mut reconstructed = BTreeSet::new();
    for comp in &summary.edge_components {
        // Potentials x_r, y_c with m_rc = x_r * y_c along a spanning tree.
        let mut x: BTreeMap<usize, Rational> = BTreeMap::new();
        let mut y: BTreeMap<usize, Rational> = BTreeMap::new();
        let root = comp.rows[0];
        x.insert(root, Rational::one());
        let mut queue = VecDeque::from([root]);
        while let Some(v) = queue.pop_front() {
            if v < nr {
                let xv = x[&v].clone();
                for &c in &comp.cols {
                    if let Some(w) = pos.get(v, c) {
                        if let std::collections::btree_map::Entry::Vacant(e) = y.entry(c) {
                            e.insert(w / &xv);
                            queue.push_back(nr + c);
                        }
                    }
                }
            } else {
                let c = v - nr;
                let yc = y[&c].clone();
                for &r in &comp.rows {
                    if let Some(w) = pos.get(r, c) {
                        if let std::collections::btree_map::Entry::Vacant(e) = x.entry(r) {
                            e.insert(w / &yc);
                            queue.push_back(r);
                        }
                    }
                }
            }
        }
        for &r in &comp.rows {
            for &c in &comp.cols {
                let value = &x[&r] * &y[&c];
                match m.get(r, c) {
                    Some(given) if *given != value => {
                        return Err(Error::InternalInconsistency(format!(
                            "entry ({r}, {c}) is {given} but the cycles imply {value}"
                        )));
                    }
                    Some(_) => {}
                    None => {
                        reconstructed.insert((r, c));
                        extra.push(((r, c), value));
                    }
                }
            }
        }
    }
    Ok(CycleCompletion {
        matrix: m.with_entries(extra),
        reconstructed,
    })
}

/// Contracts each complete rank-one block of positive entries to its sum.
/// Rows or columns whose every entry is a specified zero are reported as zero
/// lines; any other zero is an error.
pub fn contract_blocks(m: &PartialMatrix) -> Result<ReducedForm> {
    let zero_rows: BTreeSet<usize> = (0..m.nrows())
        .filter(|&i| (0..m.ncols()).all(|j| m.get(i, j).is_some_and(Zero::is_zero)))
        .collect();
    let zero_cols: BTreeSet<usize> = (0..m.ncols())
        .filter(|&j| (0..m.nrows()).all(|i| m.get(i, j).is_some_and(Zero::is_zero)))
        .collect();
    for (&(i, j), v) in m.entries() {
        if v.is_zero() && !zero_rows.contains(&i) && !zero_cols.contains(&j) {
            return Err(Error::NotBlockComplete(format!(
                "zero at ({i}, {j}) lies outside every zero row and column"
            )));
        }
    }
    let pos = positive_part(m);
    let g = BipartiteGraph::from_partial_matrix(&pos);
    let mut summary = g.components();
    summary.isolated_rows.retain(|i| !zero_rows.contains(i));
    summary.isolated_cols.retain(|j| !zero_cols.contains(j));
    let mut block_factors = Vec::new();
    for comp in &summary.edge_components {
        if comp.edges.len() != comp.rows.len() * comp.cols.len() {
            return Err(Error::NotBlockComplete(format!(
                "block on rows {:?} and columns {:?} has unspecified entries",
                comp.rows, comp.cols
            )));
        }
        let b = comp.block_sum.clone();
        let row_sums: Vec<Rational> = comp
            .rows
            .iter()
            .map(|&r| {
                comp.cols
                    .iter()
                    .fold(Rational::zero(), |a, &c| a + &pos.entries()[&(r, c)])
            })
            .collect();
        let col_sums: Vec<Rational> = comp
            .cols
            .iter()
            .map(|&c| {
                comp.rows
                    .iter()
                    .fold(Rational::zero(), |a, &r| a + &pos.entries()[&(r, c)])
            })
            .collect();
        let row_weights: Vec<Rational> = row_sums.iter().map(|s| s / &b).collect();
        let col_weights: Vec<Rational> = col_sums.iter().map(|s| s / &b).collect();
        for (a, &r) in comp.rows.iter().enumerate() {
            for (k, &c) in comp.cols.iter().enumerate() {
                if pos.entries()[&(r, c)] != &b * &row_weights[a] * &col_weights[k] {
                    return Err(Error::NotBlockComplete(format!(
                        "block on rows {:?} and columns {:?} is not rank one",
                        comp.rows, comp.cols
                    )));
                }
            }
        }
        block_factors.push(BlockFactor {
            rows: comp.rows.clone(),
            cols: comp.cols.clone(),
            row_weights,
            col_weights,
            block_sum: b,
        });
    }
    Ok(ReducedForm {
        filled: m.clone(),
        reconstructed: BTreeSet::new(),
        zero_rows,
        zero_cols,
        contracted_diagonal: summary.block_sums(),
        summary,
        block_factors,
    })
}

impl ReducedForm {
    pub fn s(&self) -> usize {
        self.block_factors.len()
    }

    pub fn isolated_rows(&self) -> Vec<usize> {
        self.summary.isolated_rows.iter().copied().collect()
    }

    pub fn isolated_cols(&self) -> Vec<usize> {
        self.summary.isolated_cols.iter().copied().collect()
    }

    pub fn isolated_count(&self) -> usize {
        self.summary.isolated_count()
    }

    /// One block covering every surviving row and column.
    pub fn is_single_full_block(&self) -> bool {
        self.s() == 1 && self.isolated_count() == 0
    }

    /// Builds the full-size factorization from block masses `alpha`, `beta` with
    /// `alpha_k * beta_k = b_k`, plus masses on isolated rows and columns.
    /// Zero rows and columns get exact zeros.
    pub fn expand(
        &self,
        alpha: &[AlgebraicInterval],
        beta: &[AlgebraicInterval],
        row_mass: &[(usize, AlgebraicInterval)],
        col_mass: &[(usize, AlgebraicInterval)],
    ) -> RankOneFactorization {
        let mut u = vec![AlgebraicInterval::zero(); self.filled.nrows()];
        let mut v = vec![AlgebraicInterval::zero(); self.filled.ncols()];
        for (k, block) in self.block_factors.iter().enumerate() {
            for (r, p) in block.rows.iter().zip(&block.row_weights) {
                u[*r] = alpha[k].scale(p);
            }
            for (c, q) in block.cols.iter().zip(&block.col_weights) {
                v[*c] = beta[k].scale(q);
            }
        }
        for (r, mass) in row_mass {
            u[*r] = mass.clone();
        }
        for (c, mass) in col_mass {
            v[*c] = mass.clone();
        }
        RankOneFactorization::new(u, v)
    }

    /// The same reduction seen from the transposed matrix.
    pub fn transpose(&self) -> Self {
        let swap = |set: &BTreeSet<Position>| set.iter().map(|&(i, j)| (j, i)).collect();
        let summary = ComponentSummary {
            edge_components: self
                .summary
                .edge_components
                .iter()
                .map(|c| crate::graph::EdgeComponent {
                    rows: c.cols.clone(),
                    cols: c.rows.clone(),
                    edges: c.edges.iter().map(|&(i, j)| (j, i)).collect(),
                    block_sum: c.block_sum.clone(),
                })
                .collect(),
            isolated_rows: self.summary.isolated_cols.clone(),
            isolated_cols: self.summary.isolated_rows.clone(),
            s_edges: self.summary.s_edges,
        };
        Self {
            filled: self.filled.transpose(),
            reconstructed: swap(&self.reconstructed),
            zero_rows: self.zero_cols.clone(),
            zero_cols: self.zero_rows.clone(),
            contracted_diagonal: self.contracted_diagonal.clone(),
            summary,
            block_factors: self
                .block_factors
                .iter()
                .map(|b| BlockFactor {
                    rows: b.cols.clone(),
                    cols: b.rows.clone(),
                    row_weights: b.col_weights.clone(),
                    col_weights: b.row_weights.clone(),
                    block_sum: b.block_sum.clone(),
                })
                .collect(),
        }
    }
}

/// Why a proposed zero support does not fit the partial matrix.
#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) enum SupportMismatch {
    UncoveredZero(Position),
    CoveredPositive(Position),
}

/// Full pipeline for a chosen set of zero rows and columns: zero filling, cycle
/// check, cycle completion and contraction.
pub(crate) fn reduce_with_support(
    m: &PartialMatrix,
    rows: &BTreeSet<usize>,
    cols: &BTreeSet<usize>,
) -> std::result::Result<std::result::Result<ReducedForm, CycleCheck>, SupportMismatch> {
    for (&(i, j), v) in m.entries() {
        let covered = rows.contains(&i) || cols.contains(&j);
        if v.is_zero() && !covered {
            return Err(SupportMismatch::UncoveredZero((i, j)));
        }
        if !v.is_zero() && covered {
            return Err(SupportMismatch::CoveredPositive((i, j)));
        }
    }
    let zeroed = fill_zero_lines(m, rows, cols);
    let check = check_cycle_singularity(&zeroed);
    if check != CycleCheck::Ok {
        return Ok(Err(check));
    }
    let completed = complete_by_cycles(&zeroed).expect("cycle check passed");
    let mut reduced = contract_blocks(&completed.matrix).expect("completed blocks are rank one");
    reduced.reconstructed = completed.reconstructed;
    // Lines chosen as zero stay zero even when they also carry no entries.
    reduced.zero_rows.extend(rows.iter().copied());
    reduced.zero_cols.extend(cols.iter().copied());
    reduced.summary.isolated_rows.retain(|i| !rows.contains(i));
    reduced.summary.isolated_cols.retain(|j| !cols.contains(j));
    Ok(Ok(reduced))
}
