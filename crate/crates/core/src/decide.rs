//! Completability decisions for partial matrices, with and without zeros.

use std::cmp::Ordering;
use std::collections::BTreeSet;

use num_traits::{One, Zero};

use crate::complete::residual_witness;
use crate::error::{Error, Result};
use crate::model::{Certificate, Evidence, PartialMatrix, Position};
use crate::numeric::{compare_root_sum, PrecisionPolicy, Rational, RootSumComparison};
use crate::reduce::{
    check_cycle_singularity, propagate_zeros, reduce_with_support, CycleCheck, ReducedForm,
    ZeroPropagation,
};

/// Default limit on the number of candidate covers examined.
pub const DEFAULT_COVER_CAP: usize = 1 << 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DecideOptions {
    pub policy: PrecisionPolicy,
    pub cover_cap: usize,
}

impl Default for DecideOptions {
    fn default() -> Self {
        Self {
            policy: PrecisionPolicy::default(),
            cover_cap: DEFAULT_COVER_CAP,
        }
    }
}

/// Rows `I` and columns `J` set identically to zero.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ZeroSupport {
    pub rows: BTreeSet<usize>,
    pub cols: BTreeSet<usize>,
}

impl ZeroSupport {
    pub fn new(
        rows: impl IntoIterator<Item = usize>,
        cols: impl IntoIterator<Item = usize>,
    ) -> Self {
        Self {
            rows: rows.into_iter().collect(),
            cols: cols.into_iter().collect(),
        }
    }

    pub fn empty() -> Self {
        Self::new([], [])
    }

    pub fn size(&self) -> usize {
        self.rows.len() + self.cols.len()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SupportEntry {
    pub support: ZeroSupport,
    /// No proper subset of the cover is still a cover of the zeros.
    pub minimal: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SupportEnumeration {
    pub supports: Vec<SupportEntry>,
    pub cap_exceeded: bool,
}

/// Verdict on a contracted residual instance.
#[derive(Debug, Clone)]
pub(crate) struct ResidualDecision {
    pub completable: bool,
    /// Root-sum comparison against one, when it was needed.
    pub comparison: Option<RootSumComparison>,
    pub failure: Option<Evidence>,
}

pub(crate) fn residual_decision(red: &ReducedForm, policy: PrecisionPolicy) -> ResidualDecision {
    let b = &red.contracted_diagonal;
    if red.s() == 0 {
        // Every surviving position is free.
        return ResidualDecision {
            completable: true,
            comparison: None,
            failure: None,
        };
    }
    let one = Rational::one();
    let cmp = compare_root_sum(b, 2, &one, policy);
    if red.is_single_full_block() && b[0] != one {
        return ResidualDecision {
            completable: false,
            comparison: Some(cmp),
            failure: Some(Evidence::SumNotOne(b[0].clone())),
        };
    }
    let completable = cmp.ordering != Ordering::Greater;
    let failure = (!completable).then(|| Evidence::NormExcess(cmp.sum.clone()));
    ResidualDecision {
        completable,
        comparison: Some(cmp),
        failure,
    }
}

fn certificate_for(red: &ReducedForm, policy: PrecisionPolicy) -> Certificate {
    let decision = residual_decision(red, policy);
    if decision.completable {
        let witness =
            residual_witness(red, &decision, policy).expect("a completable residual has a witness");
        Certificate::completable(Evidence::Witness(witness))
    } else {
        Certificate::not_completable(decision.failure.expect("failure evidence"))
    }
}

fn cycle_certificate(check: CycleCheck) -> Option<Certificate> {
    match check {
        CycleCheck::Ok => None,
        CycleCheck::Violation { cycle, lhs, rhs } => {
            Some(Certificate::not_completable(Evidence::CycleViolation {
                cycle,
                lhs,
                rhs,
            }))
        }
    }
}

/// Decision for a partial matrix whose specified entries are all positive.
pub fn decide_positive(m: &PartialMatrix) -> Result<Certificate> {
    decide_positive_with(m, &DecideOptions::default())
}

pub fn decide_positive_with(m: &PartialMatrix, opts: &DecideOptions) -> Result<Certificate> {
    if let Some((&(row, col), _)) = m.entries().iter().find(|(_, v)| v.is_zero()) {
        return Err(Error::NonPositiveEntry { row, col });
    }
    let empty = BTreeSet::new();
    match reduce_with_support(m, &empty, &empty) {
        Ok(Ok(red)) => Ok(certificate_for(&red, opts.policy)),
        Ok(Err(check)) => Ok(cycle_certificate(check).expect("violation")),
        Err(_) => unreachable!("no zeros to cover"),
    }
}

/// Zero structure after propagation: forced lines and the free zero graph.
#[derive(Debug, Clone)]
struct ZeroStructure {
    forced_rows: BTreeSet<usize>,
    forced_cols: BTreeSet<usize>,
    /// Vertices touching only zeros that propagation did not force.
    free_rows: Vec<usize>,
    free_cols: Vec<usize>,
    free_edges: Vec<Position>,
    has_positive: bool,
}

fn analyze(m: &PartialMatrix) -> std::result::Result<ZeroStructure, Certificate> {
    let (forced_rows, forced_cols) = match propagate_zeros(m) {
        ZeroPropagation::Violation(line) => {
            return Err(Certificate::not_completable(Evidence::ThreeLineViolation(
                line,
            )))
        }
        ZeroPropagation::Ok {
            zero_rows,
            zero_cols,
            ..
        } => (zero_rows, zero_cols),
    };
    if let Some(cert) = cycle_certificate(check_cycle_singularity(m)) {
        return Err(cert);
    }
    let mut pos_rows = BTreeSet::new();
    let mut pos_cols = BTreeSet::new();
    for (&(i, j), v) in m.entries() {
        if !v.is_zero() {
            pos_rows.insert(i);
            pos_cols.insert(j);
        }
    }
    let mut free_rows = BTreeSet::new();
    let mut free_cols = BTreeSet::new();
    let mut free_edges = Vec::new();
    for (&(i, j), v) in m.entries() {
        if !v.is_zero() || forced_rows.contains(&i) || forced_cols.contains(&j) {
            continue;
        }
        debug_assert!(!pos_rows.contains(&i) && !pos_cols.contains(&j));
        free_rows.insert(i);
        free_cols.insert(j);
        free_edges.push((i, j));
    }
    // Zero-incident lines whose zeros are already covered by forced lines.
    for (&(i, j), v) in m.entries() {
        if v.is_zero() {
            if !forced_rows.contains(&i) && !pos_rows.contains(&i) {
                free_rows.insert(i);
            }
            if !forced_cols.contains(&j) && !pos_cols.contains(&j) {
                free_cols.insert(j);
            }
        }
    }
    Ok(ZeroStructure {
        forced_rows,
        forced_cols,
        free_rows: free_rows.into_iter().collect(),
        free_cols: free_cols.into_iter().collect(),
        free_edges,
        has_positive: !pos_rows.is_empty(),
    })
}

/// The cover used by [`decide`]: every free vertex except one, so that an
/// isolated line survives whenever possible.
fn preferred_support(m: &PartialMatrix, z: &ZeroStructure) -> Option<ZeroSupport> {
    let mut rows = z.forced_rows.clone();
    let mut cols = z.forced_cols.clone();
    if z.has_positive {
        let skip_row = z.free_rows.first().copied();
        let skip_col = if skip_row.is_none() {
            z.free_cols.first().copied()
        } else {
            None
        };
        rows.extend(z.free_rows.iter().copied().filter(|&r| Some(r) != skip_row));
        cols.extend(z.free_cols.iter().copied().filter(|&c| Some(c) != skip_col));
        return Some(ZeroSupport { rows, cols });
    }
    let (i, j) = (0..m.nrows())
        .flat_map(|i| (0..m.ncols()).map(move |j| (i, j)))
        .find(|&(i, j)| !m.is_specified(i, j))?;
    rows.extend(z.free_rows.iter().copied().filter(|&r| r != i));
    cols.extend(z.free_cols.iter().copied().filter(|&c| c != j));
    Some(ZeroSupport { rows, cols })
}

/// Decides completability of a nonnegative partial matrix.
pub fn decide(m: &PartialMatrix) -> Certificate {
    decide_with(m, &DecideOptions::default())
}

pub fn decide_with(m: &PartialMatrix, opts: &DecideOptions) -> Certificate {
    let z = match analyze(m) {
        Ok(z) => z,
        Err(cert) => return cert,
    };
    let Some(support) = preferred_support(m, &z) else {
        return Certificate::not_completable(Evidence::SumNotOne(m.total()));
    };
    match reduce_with_support(m, &support.rows, &support.cols) {
        Ok(Ok(red)) => certificate_for(&red, opts.policy),
        Ok(Err(check)) => cycle_certificate(check).expect("violation"),
        Err(mismatch) => unreachable!("preferred support fits: {mismatch:?}"),
    }
}

/// The support [`decide`] reduces with, when the matrix passes the line and
/// cycle checks.
pub(crate) fn decision_support(m: &PartialMatrix) -> Option<ZeroSupport> {
    let z = analyze(m).ok()?;
    preferred_support(m, &z)
}

/// Reduction for one zero support, or `None` when the support does not fit.
pub fn reduce_support(m: &PartialMatrix, support: &ZeroSupport) -> Option<ReducedForm> {
    if support.rows.len() >= m.nrows() || support.cols.len() >= m.ncols() {
        return None;
    }
    match reduce_with_support(m, &support.rows, &support.cols) {
        Ok(Ok(red)) => Some(red),
        _ => None,
    }
}

/// Whether `m` lies in the piece of the completable set where exactly the lines
/// of `support` vanish.
pub fn support_admits(m: &PartialMatrix, support: &ZeroSupport) -> bool {
    support_admits_with(m, support, PrecisionPolicy::default())
}

pub fn support_admits_with(
    m: &PartialMatrix,
    support: &ZeroSupport,
    policy: PrecisionPolicy,
) -> bool {
    reduce_support(m, support).is_some_and(|red| residual_decision(&red, policy).completable)
}

/// All zero supports built from forced lines plus a cover of the remaining
/// zeros, keeping those whose residual is completable.
pub fn enumerate_zero_supports(m: &PartialMatrix) -> SupportEnumeration {
    enumerate_zero_supports_with(m, &DecideOptions::default())
}

pub fn enumerate_zero_supports_with(m: &PartialMatrix, opts: &DecideOptions) -> SupportEnumeration {
    let Ok(z) = analyze(m) else {
        return SupportEnumeration {
            supports: Vec::new(),
            cap_exceeded: false,
        };
    };
    let vertices: Vec<(bool, usize)> = z
        .free_rows
        .iter()
        .map(|&r| (true, r))
        .chain(z.free_cols.iter().map(|&c| (false, c)))
        .collect();
    let k = vertices.len();
    let total: u128 = 1u128 << k.min(127);
    let cap = opts.cover_cap.max(1) as u128;
    let cap_exceeded = k >= 127 || total > cap;
    let limit = total.min(cap) as u64;
    let index_of = |row: bool, x: usize| {
        vertices
            .iter()
            .position(|&v| v == (row, x))
            .expect("free vertex")
    };
    let edges: Vec<(usize, usize)> = z
        .free_edges
        .iter()
        .map(|&(i, j)| (index_of(true, i), index_of(false, j)))
        .collect();

    let mut supports = Vec::new();
    for mask in 0..limit {
        let chosen = |v: usize| mask >> v & 1 == 1;
        if !edges.iter().all(|&(a, b)| chosen(a) || chosen(b)) {
            continue;
        }
        let mut support = ZeroSupport {
            rows: z.forced_rows.clone(),
            cols: z.forced_cols.clone(),
        };
        for (v, &(is_row, x)) in vertices.iter().enumerate() {
            if chosen(v) {
                if is_row {
                    support.rows.insert(x);
                } else {
                    support.cols.insert(x);
                }
            }
        }
        if !support_admits_with(m, &support, opts.policy) {
            continue;
        }
        let minimal = (0..k).filter(|&v| chosen(v)).all(|v| {
            edges
                .iter()
                .any(|&(a, b)| (a == v && !chosen(b)) || (b == v && !chosen(a)))
        });
        supports.push(SupportEntry { support, minimal });
    }
    supports.sort_by(|a, b| {
        (a.support.size(), &a.support.rows, &a.support.cols).cmp(&(
            b.support.size(),
            &b.support.rows,
            &b.support.cols,
        ))
    });
    SupportEnumeration {
        supports,
        cap_exceeded,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{make_partial_matrix, verify_completion, Verdict};
    use crate::numeric::rat;

    fn intro(delta: Rational) -> PartialMatrix {
        PartialMatrix::diagonal(&[rat(4, 25) + delta, rat(9, 100), rat(1, 25), rat(1, 100)])
            .unwrap()
    }

    #[test]
    fn positive_examples() {
        let m = intro(rat(0, 1));
        let cert = decide_positive(&m).unwrap();
        assert!(cert.is_completable());
        assert!(verify_completion(&m, cert.witness().unwrap(), 1e-12).unwrap());

        let cert = decide_positive(&intro(rat(1, 1000))).unwrap();
        assert!(matches!(cert.evidence, Evidence::NormExcess(_)));

        let one = make_partial_matrix(1, 1, [(0, 0, rat(1, 2))]).unwrap();
        let cert = decide_positive(&one).unwrap();
        assert_eq!(cert.evidence, Evidence::SumNotOne(rat(1, 2)));

        let z = PartialMatrix::diagonal(&[rat(1, 4), rat(0, 1)]).unwrap();
        assert_eq!(
            decide_positive(&z),
            Err(Error::NonPositiveEntry { row: 1, col: 1 })
        );
    }

    #[test]
    fn zero_examples() {
        let m = PartialMatrix::diagonal(&[rat(4, 25), rat(4, 25), rat(0, 1)]).unwrap();
        let cert = decide(&m);
        assert!(cert.is_completable());
        assert!(verify_completion(&m, cert.witness().unwrap(), 1e-12).unwrap());

        let m = make_partial_matrix(
            2,
            2,
            [(0, 0, rat(0, 1)), (0, 1, rat(1, 3)), (1, 0, rat(1, 3))],
        )
        .unwrap();
        assert!(matches!(
            decide(&m).evidence,
            Evidence::ThreeLineViolation(_)
        ));

        let m = make_partial_matrix(
            2,
            3,
            [
                (0, 0, rat(1, 4)),
                (0, 1, rat(0, 1)),
                (1, 1, rat(0, 1)),
                (1, 2, rat(1, 4)),
            ],
        )
        .unwrap();
        let cert = decide(&m);
        assert_eq!(cert.verdict, Verdict::Completable);
        assert!(verify_completion(&m, cert.witness().unwrap(), 1e-12).unwrap());
    }

    #[test]
    fn all_zero_instances() {
        let full_zero = make_partial_matrix(1, 2, [(0, 0, rat(0, 1)), (0, 1, rat(0, 1))]).unwrap();
        assert_eq!(decide(&full_zero).evidence, Evidence::SumNotOne(rat(0, 1)));
        let diag = PartialMatrix::diagonal(&[rat(0, 1), rat(0, 1)]).unwrap();
        let cert = decide(&diag);
        assert!(verify_completion(&diag, cert.witness().unwrap(), 0.0).unwrap());
    }

    #[test]
    fn supports_of_the_two_curve_example() {
        let m = PartialMatrix::diagonal(&[rat(4, 25), rat(4, 25), rat(0, 1)]).unwrap();
        let e = enumerate_zero_supports(&m);
        assert!(!e.cap_exceeded);
        let got: Vec<_> = e
            .supports
            .iter()
            .map(|s| (s.support.clone(), s.minimal))
            .collect();
        assert_eq!(
            got,
            vec![
                (ZeroSupport::new([], [2]), true),
                (ZeroSupport::new([2], []), true),
                (ZeroSupport::new([2], [2]), false),
            ]
        );
    }

    #[test]
    fn positive_matrix_has_only_the_empty_support() {
        let m = intro(rat(0, 1));
        let e = enumerate_zero_supports(&m);
        assert_eq!(e.supports.len(), 1);
        assert_eq!(e.supports[0].support, ZeroSupport::empty());
        let bad = intro(rat(1, 1000));
        assert!(enumerate_zero_supports(&bad).supports.is_empty());
    }

    #[test]
    fn cap_is_reported() {
        let m = PartialMatrix::diagonal(&vec![rat(0, 1); 6]).unwrap();
        let opts = DecideOptions {
            cover_cap: 16,
            ..DecideOptions::default()
        };
        assert!(enumerate_zero_supports_with(&m, &opts).cap_exceeded);
    }
}
