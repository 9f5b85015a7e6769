//! Explicit completions: boundary points, the two-point walk, isolated lines,
//! classification of the completion set and sampling of families.

use std::cmp::Ordering;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::decide::{
    decision_support, enumerate_zero_supports, reduce_support, residual_decision, ResidualDecision,
    ZeroSupport,
};
use crate::error::{Error, Result};
use crate::model::{PartialMatrix, RankOneFactorization};
use crate::numeric::{compare_root_sum, pow2, AlgebraicInterval as AI, PrecisionPolicy, Rational};
use crate::reduce::ReducedForm;

const WALK_START_BITS: u32 = 128;
const WALK_CAP_BITS: u32 = 4096;
/// Root enclosures of the walk are refined below `2^-WALK_ROOT_BITS`.
const WALK_ROOT_BITS: i64 = 100;
const SAMPLE_BITS: u32 = 128;

/// Which side of a one-entry instance carries the isolated line.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Row,
    Col,
}

/// Quadratic data of the two-point walk through `u_1 + t, u_2 - t`.
#[derive(Debug, Clone)]
pub struct WalkParameters {
    pub s_value: AI,
    /// `A t^2 + B t + C`, highest degree first.
    pub coefficients: [AI; 3],
    /// Primitive integer multiple of the coefficients, when they are rational.
    pub integer_coefficients: Option<[BigInt; 3]>,
    /// Smaller root first.
    pub roots: [AI; 2],
}

#[derive(Debug, Clone)]
pub struct PairWalk {
    pub params: WalkParameters,
    /// Completion at the smaller and at the larger root.
    pub completions: [RankOneFactorization; 2],
}

#[derive(Debug, Clone)]
pub enum CompletionKind {
    Empty,
    Unique(RankOneFactorization),
    Pair(RankOneFactorization, RankOneFactorization),
    Family {
        dimension: usize,
        base_point: RankOneFactorization,
        reduced: Box<ReducedForm>,
    },
    /// Several isolated completions coming from different zero supports.
    Finite(Vec<RankOneFactorization>),
}

impl CompletionKind {
    pub fn name(&self) -> &'static str {
        match self {
            Self::Empty => "empty",
            Self::Unique(_) => "unique",
            Self::Pair(..) => "pair",
            Self::Family { .. } => "family",
            Self::Finite(_) => "finite",
        }
    }

    /// The explicit completions, or the base point of a family.
    pub fn points(&self) -> Vec<RankOneFactorization> {
        match self {
            Self::Empty => Vec::new(),
            Self::Unique(f) => vec![f.clone()],
            Self::Pair(f, g) => vec![f.clone(), g.clone()],
            Self::Family { base_point, .. } => vec![base_point.clone()],
            Self::Finite(fs) => fs.clone(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct Branch {
    pub support: ZeroSupport,
    pub minimal: bool,
    pub description: CompletionKind,
}

#[derive(Debug, Clone)]
pub struct CompletionSetDescription {
    pub kind: CompletionKind,
    /// One entry per admissible zero support; empty for strictly positive input.
    pub branches: Vec<Branch>,
}

#[derive(Debug, Clone)]
pub struct FamilySample {
    /// Distance travelled along the sampled direction.
    pub lambda: Rational,
    pub factorization: RankOneFactorization,
}

/// `f(u) = Σ a_i / u_i`, skipping coordinates with `a_i = 0`.
pub fn f_sum(u: &[AI], a: &[Rational]) -> Result<AI> {
    if u.len() != a.len() {
        return Err(Error::DimensionMismatch {
            expected: a.len().to_string(),
            found: u.len().to_string(),
        });
    }
    let mut total = AI::zero();
    for (index, (ui, ai)) in u.iter().zip(a).enumerate() {
        if ai.is_zero() {
            continue;
        }
        let q = AI::exact(ai.clone())
            .checked_div(ui)
            .ok_or(Error::DivisionByZeroMass { index })?;
        total = &total + &q;
    }
    Ok(total)
}

fn f_rational(w: &[Rational], b: &[Rational]) -> Rational {
    b.iter().zip(w).map(|(bk, wk)| bk / wk).sum()
}

fn exact_vec(xs: &[Rational]) -> Vec<AI> {
    xs.iter().cloned().map(AI::exact).collect()
}

fn diagonal_reduction(b: &[Rational]) -> Result<ReducedForm> {
    let m = PartialMatrix::diagonal(b)?;
    if b.iter().any(|x| !x.is_positive()) {
        return Err(Error::InvalidArgument(
            "diagonal entries must be positive".into(),
        ));
    }
    reduce_support(&m, &ZeroSupport::empty())
        .ok_or_else(|| Error::InternalInconsistency("diagonal instance does not reduce".into()))
}

fn sqrt_vec(b: &[Rational], bits: u32) -> Vec<AI> {
    b.iter().map(|x| AI::sqrt_of(x, bits)).collect()
}

/// Coordinates `√b_k / S` of the minimizer of `f` on the simplex.
fn centre(sq: &[AI], s: &AI) -> Vec<AI> {
    sq.iter().map(|x| x / s).collect()
}

fn primitive_integers(c: &[Rational; 3]) -> [BigInt; 3] {
    let lcm = c.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
    let mut ints: Vec<BigInt> = c
        .iter()
        .map(|x| (x * Rational::from_integer(lcm.clone())).to_integer())
        .collect();
    let g = ints.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x));
    if !g.is_zero() {
        for x in &mut ints {
            *x /= &g;
        }
    }
    if ints[0].is_negative() {
        for x in &mut ints {
            *x = -x.clone();
        }
    }
    [ints[0].clone(), ints[1].clone(), ints[2].clone()]
}

/// Block masses at both crossings of `f = 1` along the walk on the first two
/// coordinates. Requires `Σ √b_k < 1` and at least two blocks.
fn walk_masses(b: &[Rational]) -> Result<(WalkParameters, [Vec<AI>; 2])> {
    if b.len() < 2 {
        return Err(Error::InvalidArgument("the walk needs two blocks".into()));
    }
    let target = pow2(-WALK_ROOT_BITS);
    let mut bits = WALK_START_BITS;
    loop {
        let sq = sqrt_vec(b, bits);
        let s = AI::sum(&sq);
        let s2 = s.square();
        let one = AI::one();
        let a = &s2 * &(&(&(&s * &(&sq[0] + &sq[1])) - &s2) + &one);
        let bb = -&(&(&s * &(&s2 - &one)) * &(&sq[0] - &sq[1]));
        let c = &(&s2 - &one) * &AI::sqrt_of(&(&b[0] * &b[1]), bits);
        let disc = &bb.square() - (&(&a * &c).scale(&Rational::from_integer(4.into())));
        let usable = disc.lower().is_positive() && a.lower().is_positive();
        if usable {
            let root = disc.sqrt(bits);
            let two_a = a.scale(&Rational::from_integer(2.into()));
            let lo = (&(-&bb) - &root).checked_div(&two_a);
            let hi = (&(-&bb) + &root).checked_div(&two_a);
            if let (Some(lo), Some(hi)) = (lo, hi) {
                let narrow = lo.width() < target && hi.width() < target;
                if narrow || bits >= WALK_CAP_BITS {
                    let x = centre(&sq, &s);
                    let masses = [&lo, &hi].map(|t| {
                        let mut alpha = x.clone();
                        alpha[0] = &x[0] + t;
                        alpha[1] = &x[1] - t;
                        alpha
                    });
                    let integer_coefficients = match (a.as_exact(), bb.as_exact(), c.as_exact()) {
                        (Some(p), Some(q), Some(r)) => {
                            Some(primitive_integers(&[p.clone(), q.clone(), r.clone()]))
                        }
                        _ => None,
                    };
                    let params = WalkParameters {
                        s_value: s,
                        coefficients: [a, bb, c],
                        integer_coefficients,
                        roots: [lo, hi],
                    };
                    return Ok((params, masses));
                }
            }
        }
        if bits >= WALK_CAP_BITS {
            return Err(Error::InternalInconsistency(
                "walk discriminant not separated from zero".into(),
            ));
        }
        bits *= 2;
    }
}

fn betas(b: &[Rational], alpha: &[AI]) -> Vec<AI> {
    b.iter()
        .zip(alpha)
        .map(|(bk, ak)| {
            AI::exact(bk.clone())
                .checked_div(ak)
                .expect("positive block mass")
        })
        .collect()
}

/// Both completions of `diag(a1, a2, rest...)` with `Σ √a_i < 1`, found on the
/// line that trades mass between the first two rows.
pub fn complete_pair_walk(a1: &Rational, a2: &Rational, rest: &[Rational]) -> Result<PairWalk> {
    let mut b = vec![a1.clone(), a2.clone()];
    b.extend_from_slice(rest);
    if b.iter().any(|x| !x.is_positive()) {
        return Err(Error::InvalidArgument(
            "diagonal entries must be positive".into(),
        ));
    }
    if crate::numeric::compare_sqrt_sum(&b, &Rational::one()) != Ordering::Less {
        return Err(Error::NotStrictlyInterior);
    }
    let (params, masses) = walk_masses(&b)?;
    let completions = masses.map(|alpha| {
        let beta = betas(&b, &alpha);
        RankOneFactorization::new(alpha, beta)
    });
    Ok(PairWalk {
        params,
        completions,
    })
}

/// The completion of a diagonal instance with `Σ √a_i = 1`.
pub fn complete_unique_boundary(a: &[Rational]) -> Result<RankOneFactorization> {
    let red = diagonal_reduction(a)?;
    complete_unique_boundary_reduced(&red, PrecisionPolicy::default())
}

/// Boundary completion of a contracted instance: block masses `√b_k`.
pub fn complete_unique_boundary_reduced(
    red: &ReducedForm,
    policy: PrecisionPolicy,
) -> Result<RankOneFactorization> {
    let decision = residual_decision(red, policy);
    match decision.comparison.as_ref().map(|c| c.ordering) {
        Some(Ordering::Equal) => residual_witness(red, &decision, policy),
        _ => Err(Error::NotOnBoundary),
    }
}

/// The unique completion of a single entry `b1` next to one empty line.
pub fn complete_isolated(b1: &Rational, side: Side) -> Result<RankOneFactorization> {
    if b1.is_negative() {
        return Err(Error::NegativeValue { row: 0, col: 0 });
    }
    if b1 > &Rational::one() {
        return Err(Error::NotCompletable);
    }
    let split = vec![b1.clone(), Rational::one() - b1];
    let one = vec![Rational::one()];
    Ok(match side {
        Side::Row => RankOneFactorization::from_exact(split, one),
        Side::Col => RankOneFactorization::from_exact(one, split),
    })
}

/// A completion of a contracted instance already known to be completable.
pub(crate) fn residual_witness(
    red: &ReducedForm,
    decision: &ResidualDecision,
    policy: PrecisionPolicy,
) -> Result<RankOneFactorization> {
    if !decision.completable {
        return Err(Error::NotCompletable);
    }
    let iso_rows = red.isolated_rows();
    let iso_cols = red.isolated_cols();
    if red.s() == 0 {
        let (r, c) = (iso_rows[0], iso_cols[0]);
        return Ok(red.expand(&[], &[], &[(r, AI::one())], &[(c, AI::one())]));
    }
    let b = &red.contracted_diagonal;
    let bits = WALK_START_BITS.max(policy.start_bits);
    let ordering = decision
        .comparison
        .as_ref()
        .map(|c| c.ordering)
        .ok_or_else(|| Error::InternalInconsistency("missing comparison".into()))?;
    if ordering == Ordering::Equal {
        let sq = sqrt_vec(b, bits);
        return Ok(red.expand(&sq, &sq, &[], &[]));
    }
    let sq = sqrt_vec(b, bits);
    let s = AI::sum(&sq);
    let slack = &AI::one() - &s.square();
    if let Some(&r) = iso_rows.first() {
        let alpha: Vec<AI> = sq.iter().map(|x| x * &s).collect();
        let beta = centre(&sq, &s);
        return Ok(red.expand(&alpha, &beta, &[(r, slack)], &[]));
    }
    if let Some(&c) = iso_cols.first() {
        let alpha = centre(&sq, &s);
        let beta: Vec<AI> = sq.iter().map(|x| x * &s).collect();
        return Ok(red.expand(&alpha, &beta, &[], &[(c, slack)]));
    }
    let (_, masses) = walk_masses(b)?;
    let alpha = masses[1].clone();
    let beta = betas(b, &alpha);
    Ok(red.expand(&alpha, &beta, &[], &[]))
}

/// Shape of the completion set of one contracted instance.
pub fn describe_reduced(red: &ReducedForm, policy: PrecisionPolicy) -> Result<CompletionKind> {
    let decision = residual_decision(red, policy);
    if !decision.completable {
        return Ok(CompletionKind::Empty);
    }
    let s = red.s();
    let iso = red.isolated_count();
    let witness = residual_witness(red, &decision, policy)?;
    let on_boundary = decision
        .comparison
        .as_ref()
        .is_some_and(|c| c.ordering == Ordering::Equal);
    let kind = match (s, iso) {
        _ if on_boundary => CompletionKind::Unique(witness),
        (0, 2) | (1, 1) => CompletionKind::Unique(witness),
        (2, 0) => {
            let (_, masses) = walk_masses(&red.contracted_diagonal)?;
            let [lo, hi] = masses.map(|alpha| {
                let beta = betas(&red.contracted_diagonal, &alpha);
                red.expand(&alpha, &beta, &[], &[])
            });
            CompletionKind::Pair(lo, hi)
        }
        _ => CompletionKind::Family {
            dimension: s + iso - 2,
            base_point: witness,
            reduced: Box::new(red.clone()),
        },
    };
    Ok(kind)
}

fn push_distinct(out: &mut Vec<RankOneFactorization>, f: RankOneFactorization) {
    if !out.iter().any(|g| g.max_entry_distance(&f) < 1e-12) {
        out.push(f);
    }
}

/// Classifies the completion set of a partial matrix.
pub fn classify_completions(m: &PartialMatrix) -> Result<CompletionSetDescription> {
    classify_completions_with(m, PrecisionPolicy::default())
}

pub fn classify_completions_with(
    m: &PartialMatrix,
    policy: PrecisionPolicy,
) -> Result<CompletionSetDescription> {
    let enumeration = enumerate_zero_supports(m);
    let mut branches = Vec::new();
    for entry in &enumeration.supports {
        let red = reduce_support(m, &entry.support).ok_or_else(|| {
            Error::InternalInconsistency("enumerated support does not reduce".into())
        })?;
        branches.push(Branch {
            support: entry.support.clone(),
            minimal: entry.minimal,
            description: describe_reduced(&red, policy)?,
        });
    }
    if branches.is_empty() && enumeration.cap_exceeded {
        if let Some(support) = decision_support(m) {
            if let Some(red) = reduce_support(m, &support) {
                branches.push(Branch {
                    support,
                    minimal: false,
                    description: describe_reduced(&red, policy)?,
                });
            }
        }
    }
    let family = branches
        .iter()
        .filter_map(|b| match &b.description {
            CompletionKind::Family { dimension, .. } => Some((*dimension, &b.description)),
            _ => None,
        })
        .fold(
            None::<(usize, &CompletionKind)>,
            |best, (d, k)| match best {
                Some((bd, _)) if bd >= d => best,
                _ => Some((d, k)),
            },
        );
    let kind = if let Some((_, k)) = family {
        k.clone()
    } else {
        let mut points = Vec::new();
        for b in &branches {
            for f in b.description.points() {
                push_distinct(&mut points, f);
            }
        }
        match points.len() {
            0 => CompletionKind::Empty,
            1 => CompletionKind::Unique(points.pop().expect("one point")),
            2 => {
                let g = points.pop().expect("two points");
                let f = points.pop().expect("two points");
                CompletionKind::Pair(f, g)
            }
            _ => CompletionKind::Finite(points),
        }
    };
    if !m.has_zero() {
        branches.clear();
    }
    Ok(CompletionSetDescription { kind, branches })
}

/// `k` completions drawn from a positive-dimensional completion set.
pub fn sample_family(m: &PartialMatrix, k: usize, seed: u64) -> Result<Vec<RankOneFactorization>> {
    Ok(sample_family_points(m, k, seed)?
        .into_iter()
        .map(|s| s.factorization)
        .collect())
}

pub fn sample_family_points(m: &PartialMatrix, k: usize, seed: u64) -> Result<Vec<FamilySample>> {
    match classify_completions(m)?.kind {
        CompletionKind::Family { reduced, .. } => sample_reduced(&reduced, k, seed),
        _ => Err(Error::NotAFamily),
    }
}

fn random_weights(rng: &mut ChaCha8Rng, n: usize, total: &Rational) -> Vec<Rational> {
    let raw: Vec<i64> = (0..n).map(|_| rng.random_range(1..=1000)).collect();
    let sum: i64 = raw.iter().sum();
    raw.iter()
        .map(|&x| Rational::new(x.into(), sum.into()) * total)
        .collect()
}

/// Rational point with block masses near `√b_k / S` and isolated rows sharing
/// half of the slack, at which `f < 1` holds exactly.
fn base_point(b: &[Rational], ir: usize) -> Result<Vec<Rational>> {
    let mut bits = 64;
    while bits <= WALK_CAP_BITS {
        let approx: Vec<Rational> = b.iter().map(|x| AI::sqrt_of(x, bits).midpoint()).collect();
        let st: Rational = approx.iter().sum();
        let one = Rational::one();
        if st < one {
            let eps = if ir > 0 {
                (&one - &st * &st) / Rational::from_integer(2.into())
            } else {
                Rational::zero()
            };
            let mut w: Vec<Rational> = approx.iter().map(|x| x / &st * (&one - &eps)).collect();
            if f_rational(&w, b) < one {
                for _ in 0..ir {
                    w.push(&eps / Rational::from_integer(ir.into()));
                }
                return Ok(w);
            }
        }
        bits *= 2;
    }
    Err(Error::NotAFamily)
}

/// Direction summing to zero, with nonnegative moves on isolated rows.
fn direction(rng: &mut ChaCha8Rng, s: usize, ir: usize) -> Vec<Rational> {
    loop {
        let mut d: Vec<Rational> = (0..s + ir)
            .map(|t| {
                let x: i64 = rng.random_range(-1000..=1000);
                Rational::from_integer(if t >= s { x.abs() } else { x }.into())
            })
            .collect();
        let shift = d.iter().sum::<Rational>() / Rational::from_integer(s.into());
        for x in &mut d[..s] {
            *x -= &shift;
        }
        let scale = d
            .iter()
            .map(|x| x.abs())
            .max()
            .unwrap_or_else(Rational::zero);
        if scale.is_zero() {
            continue;
        }
        for x in &mut d {
            *x /= &scale;
        }
        return d;
    }
}

fn along(w0: &[Rational], d: &[Rational], lambda: &Rational) -> Vec<Rational> {
    w0.iter().zip(d).map(|(w, x)| w + x * lambda).collect()
}

pub(crate) fn sample_reduced(red: &ReducedForm, k: usize, seed: u64) -> Result<Vec<FamilySample>> {
    let s = red.s();
    let iso_rows = red.isolated_rows();
    let iso_cols = red.isolated_cols();
    let (ir, ic) = (iso_rows.len(), iso_cols.len());
    if s + ir + ic < 3 {
        return Err(Error::NotAFamily);
    }
    if s == 0 {
        return Ok((0..k)
            .map(|idx| {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                rng.set_stream(idx as u64);
                let one = Rational::one();
                let u = random_weights(&mut rng, ir, &one);
                let v = random_weights(&mut rng, ic, &one);
                let rm: Vec<_> = iso_rows.iter().copied().zip(exact_vec(&u)).collect();
                let cm: Vec<_> = iso_cols.iter().copied().zip(exact_vec(&v)).collect();
                FamilySample {
                    lambda: Rational::zero(),
                    factorization: red.expand(&[], &[], &rm, &cm),
                }
            })
            .collect());
    }
    if ir == 0 && ic > 0 {
        return Ok(sample_reduced(&red.transpose(), k, seed)?
            .into_iter()
            .map(|p| FamilySample {
                lambda: p.lambda,
                factorization: p.factorization.transpose(),
            })
            .collect());
    }
    let b = &red.contracted_diagonal;
    let w0 = base_point(b, ir)?;
    let one = Rational::one();
    let mut out = Vec::with_capacity(k);
    for idx in 0..k {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(idx as u64);
        let d = direction(&mut rng, s, ir);
        let lambda_max = w0
            .iter()
            .zip(&d)
            .filter(|(_, x)| x.is_negative())
            .map(|(w, x)| -(w / x))
            .min()
            .expect("a zero-sum direction has a negative coordinate");
        let f_at = |lambda: &Rational| f_rational(&along(&w0, &d, lambda)[..s], b);
        if ic > 0 {
            let frac = Rational::new(rng.random_range(1..=999).into(), 1000.into());
            let mut lambda = &lambda_max * frac;
            while f_at(&lambda) > one {
                lambda /= Rational::from_integer(2.into());
            }
            let w = along(&w0, &d, &lambda);
            let beta: Vec<Rational> = b.iter().zip(&w).map(|(bk, wk)| bk / wk).collect();
            let left = &one - beta.iter().sum::<Rational>();
            let gamma = random_weights(&mut rng, ic, &left);
            let rm: Vec<_> = iso_rows.iter().copied().zip(exact_vec(&w[s..])).collect();
            let cm: Vec<_> = iso_cols.iter().copied().zip(exact_vec(&gamma)).collect();
            out.push(FamilySample {
                lambda: lambda.clone(),
                factorization: red.expand(&exact_vec(&w[..s]), &exact_vec(&beta), &rm, &cm),
            });
            continue;
        }
        // Bisection for f = 1 on [0, lambda_max).
        let mut lo = Rational::zero();
        let mut hi = lambda_max.clone();
        let mut exact = None;
        let width = pow2(-60);
        let gap = pow2(-50);
        for _ in 0..400 {
            let mid = (&lo + &hi) / Rational::from_integer(2.into());
            match f_at(&mid).cmp(&one) {
                Ordering::Less => lo = mid,
                Ordering::Greater => hi = mid,
                Ordering::Equal => {
                    exact = Some(mid);
                    break;
                }
            }
            if hi < lambda_max && &hi - &lo <= width && f_at(&hi) - f_at(&lo) <= gap {
                break;
            }
        }
        let (w_lo, w_hi, lambda) = match exact {
            Some(l) => {
                let w = along(&w0, &d, &l);
                (w.clone(), w, l)
            }
            None => (along(&w0, &d, &lo), along(&w0, &d, &hi), lo.clone()),
        };
        let hull = |x: &Rational, y: &Rational| {
            if x <= y {
                AI::new(x.clone(), y.clone(), SAMPLE_BITS)
            } else {
                AI::new(y.clone(), x.clone(), SAMPLE_BITS)
            }
        };
        let alpha: Vec<AI> = (0..s).map(|t| hull(&w_lo[t], &w_hi[t])).collect();
        let beta: Vec<AI> = (0..s)
            .map(|t| hull(&(&b[t] / &w_lo[t]), &(&b[t] / &w_hi[t])))
            .collect();
        let rm: Vec<_> = iso_rows
            .iter()
            .enumerate()
            .map(|(t, &r)| (r, hull(&w_lo[s + t], &w_hi[s + t])))
            .collect();
        out.push(FamilySample {
            lambda,
            factorization: red.expand(&alpha, &beta, &rm, &[]),
        });
    }
    Ok(out)
}

/// The minimum of `f` on the simplex is `(Σ √a_i)^2`; the cheapest interior
/// test for the pair walk.
pub fn is_strictly_interior(a: &[Rational]) -> bool {
    compare_root_sum(a, 2, &Rational::one(), PrecisionPolicy::default()).ordering == Ordering::Less
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::verify_completion;
    use crate::numeric::{rat, to_f64};

    fn example() -> [Rational; 3] {
        [rat(1, 4), rat(1, 25), rat(1, 36)]
    }

    #[test]
    fn f_sum_at_the_centre() {
        let s = rat(13, 15);
        let u: Vec<AI> = [rat(1, 2), rat(1, 5), rat(1, 6)]
            .iter()
            .map(|x| AI::exact(x / &s))
            .collect();
        assert_eq!(
            f_sum(&u, &example()).unwrap().as_exact(),
            Some(&rat(169, 225))
        );
        let bad = vec![AI::zero(), AI::one(), AI::one()];
        assert_eq!(
            f_sum(&bad, &example()),
            Err(Error::DivisionByZeroMass { index: 0 })
        );
    }

    #[test]
    fn pair_walk_example() {
        let [a1, a2, a3] = example();
        let walk = complete_pair_walk(&a1, &a2, std::slice::from_ref(&a3)).unwrap();
        let ints = walk.params.integer_coefficients.clone().unwrap();
        assert_eq!(
            ints,
            [BigInt::from(9295), BigInt::from(936), BigInt::from(-360)]
        );
        let t = (6.0 * 586f64.sqrt() - 36.0) / 715.0;
        assert!((walk.params.roots[1].to_f64() - t).abs() < 1e-14);
        assert!(walk.params.roots[1].width() < pow2(-100));
        let m = PartialMatrix::diagonal(&example()).unwrap();
        for f in &walk.completions {
            assert!(verify_completion(&m, f, 1e-12).unwrap());
        }
        let top = walk.completions[1].matrix_f64();
        assert!((top[0][1] - 0.374).abs() < 1e-3);

        assert_eq!(
            complete_pair_walk(&rat(1, 4), &rat(1, 4), &[]).unwrap_err(),
            Error::NotStrictlyInterior
        );
    }

    #[test]
    fn boundary_and_isolated() {
        let a = [rat(4, 25), rat(9, 100), rat(1, 25), rat(1, 100)];
        let f = complete_unique_boundary(&a).unwrap();
        assert_eq!(
            f.exact_factors().unwrap().0,
            vec![rat(2, 5), rat(3, 10), rat(1, 5), rat(1, 10)]
        );
        assert_eq!(
            complete_unique_boundary(&example()).unwrap_err(),
            Error::NotOnBoundary
        );

        let f = complete_isolated(&rat(1, 3), Side::Col).unwrap();
        assert_eq!(
            f.exact_factors().unwrap(),
            (vec![rat(1, 1)], vec![rat(1, 3), rat(2, 3)])
        );
        assert_eq!(
            complete_isolated(&rat(3, 2), Side::Row).unwrap_err(),
            Error::NotCompletable
        );
    }

    #[test]
    fn classification_examples() {
        let m = PartialMatrix::diagonal(&example()).unwrap();
        let d = classify_completions(&m).unwrap();
        assert!(matches!(
            d.kind,
            CompletionKind::Family { dimension: 1, .. }
        ));
        assert!(d.branches.is_empty());

        let m = PartialMatrix::diagonal(&[rat(1, 4), rat(1, 9)]).unwrap();
        assert!(matches!(
            classify_completions(&m).unwrap().kind,
            CompletionKind::Pair(..)
        ));

        let m = PartialMatrix::diagonal(&[rat(1, 4), rat(1, 4)]).unwrap();
        assert!(matches!(
            classify_completions(&m).unwrap().kind,
            CompletionKind::Unique(_)
        ));

        let m = PartialMatrix::diagonal(&[rat(1, 2), rat(1, 3)]).unwrap();
        assert!(matches!(
            classify_completions(&m).unwrap().kind,
            CompletionKind::Empty
        ));

        let m = PartialMatrix::diagonal(&[rat(4, 25), rat(4, 25), rat(0, 1)]).unwrap();
        let d = classify_completions(&m).unwrap();
        assert_eq!(d.branches.len(), 3);
        match &d.kind {
            CompletionKind::Family { dimension, .. } => assert_eq!(*dimension, 1),
            other => panic!("{}", other.name()),
        }
    }

    #[test]
    fn samples_lie_on_the_set() {
        let m = PartialMatrix::diagonal(&example()).unwrap();
        let pts = sample_family_points(&m, 5, 7).unwrap();
        assert_eq!(pts.len(), 5);
        for p in &pts {
            assert!(verify_completion(&m, &p.factorization, 1e-12).unwrap());
        }
        let again = sample_family_points(&m, 5, 7).unwrap();
        assert_eq!(to_f64(&pts[3].lambda), to_f64(&again[3].lambda));

        let m = PartialMatrix::diagonal(&[rat(1, 4), rat(1, 9)]).unwrap();
        assert_eq!(sample_family(&m, 3, 0).unwrap_err(), Error::NotAFamily);
    }

    #[test]
    fn samples_with_isolated_lines() {
        let m = crate::model::make_partial_matrix(3, 3, [(0, 0, rat(1, 9)), (1, 1, rat(1, 16))])
            .unwrap();
        for f in sample_family(&m, 4, 3).unwrap() {
            assert!(verify_completion(&m, &f, 1e-12).unwrap());
        }
        let m = crate::model::make_partial_matrix(2, 3, [(0, 0, rat(1, 9)), (1, 1, rat(1, 16))])
            .unwrap();
        for f in sample_family(&m, 4, 3).unwrap() {
            assert!(verify_completion(&m, &f, 1e-12).unwrap());
        }
        let m = crate::model::make_partial_matrix(3, 2, [(0, 0, rat(1, 9)), (1, 1, rat(1, 16))])
            .unwrap();
        for f in sample_family(&m, 4, 3).unwrap() {
            assert!(verify_completion(&m, &f, 1e-12).unwrap());
        }
        let m = crate::model::make_partial_matrix(2, 3, []).unwrap();
        for f in sample_family(&m, 4, 3).unwrap() {
            assert!(verify_completion(&m, &f, 0.0).unwrap());
        }
    }
}
