//! Diagonal partial tensors, the 2x2x2 catalog and rank-2 3x3 completions.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};

use num_traits::{One, Signed, Zero};

use crate::decide::decide_with;
use crate::decide::DecideOptions;
use crate::error::{Error, Result};
use crate::model::{make_partial_matrix, Certificate, Evidence};
use crate::numeric::{
    compare_root_sum, pow2, AlgebraicInterval as AI, PrecisionPolicy, Rational, UPoly,
};

const TENSOR_BITS: u32 = 128;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DiagonalTensorInstance {
    order: u32,
    diag: Vec<Rational>,
}

impl DiagonalTensorInstance {
    pub fn new(order: u32, diag: Vec<Rational>) -> Result<Self> {
        if order == 0 || diag.is_empty() {
            return Err(Error::InvalidArgument(
                "order and size must be positive".into(),
            ));
        }
        if let Some(i) = diag.iter().position(Signed::is_negative) {
            return Err(Error::NegativeValue { row: i, col: i });
        }
        Ok(Self { order, diag })
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn size(&self) -> usize {
        self.diag.len()
    }

    pub fn diag(&self) -> &[Rational] {
        &self.diag
    }
}

pub fn decide_diagonal_tensor(t: &DiagonalTensorInstance) -> Certificate {
    decide_diagonal_tensor_with(t, PrecisionPolicy::default())
}

pub fn decide_diagonal_tensor_with(
    t: &DiagonalTensorInstance,
    policy: PrecisionPolicy,
) -> Certificate {
    let one = Rational::one();
    // With one cell or one mode every entry is observed.
    if t.size() == 1 || t.order == 1 {
        let total: Rational = t.diag.iter().sum();
        if total != one {
            return Certificate::not_completable(Evidence::SumNotOne(total));
        }
    } else {
        let cmp = compare_root_sum(&t.diag, t.order, &one, policy);
        if cmp.ordering == Ordering::Greater {
            return Certificate::not_completable(Evidence::NormExcess(cmp.sum));
        }
    }
    let factors = complete_diagonal_tensor(t).expect("completable instance has factors");
    Certificate::completable(Evidence::TensorWitness(factors))
}

/// Rational point near `a^(1/d) / Σ a^(1/d)` on the positive coordinates, with
/// `Σ a_i / w_i^(d-1) < 1` once the roots are sharp enough.
fn rational_centre(a: &[Rational], d: u32, positive: &[usize]) -> Vec<Rational> {
    let one = Rational::one();
    let mut bits = 64;
    loop {
        let r: Vec<Rational> = positive
            .iter()
            .map(|&i| AI::root_of(&a[i], d, bits).midpoint())
            .collect();
        let total: Rational = r.iter().sum();
        let w: Vec<Rational> = r.iter().map(|x| x / &total).collect();
        let f: Rational = positive
            .iter()
            .zip(&w)
            .map(|(&i, wi)| &a[i] / pow_rat(wi, d - 1))
            .sum();
        if f < one || bits >= 8192 {
            return w;
        }
        bits *= 2;
    }
}

fn pow_rat(x: &Rational, e: u32) -> Rational {
    (0..e).fold(Rational::one(), |acc, _| acc * x)
}

/// One factor vector per mode whose diagonal products reproduce `a`.
pub fn complete_diagonal_tensor(t: &DiagonalTensorInstance) -> Result<Vec<Vec<AI>>> {
    let d = t.order;
    let n = t.size();
    let a = &t.diag;
    let one = Rational::one();
    let exact = |v: Vec<Rational>| v.into_iter().map(AI::exact).collect::<Vec<_>>();
    if n == 1 || d == 1 {
        let total: Rational = a.iter().sum();
        if total != one {
            return Err(Error::NotCompletable);
        }
        return Ok(if n == 1 {
            vec![vec![AI::one()]; d as usize]
        } else {
            vec![exact(a.clone())]
        });
    }
    let cmp = compare_root_sum(a, d, &one, PrecisionPolicy::default());
    match cmp.ordering {
        Ordering::Greater => Err(Error::NotCompletable),
        Ordering::Equal => {
            let roots: Vec<AI> = a.iter().map(|x| AI::root_of(x, d, TENSOR_BITS)).collect();
            Ok(vec![roots; d as usize])
        }
        Ordering::Less => {
            let positive: Vec<usize> = (0..n).filter(|&i| a[i].is_positive()).collect();
            let zero: Vec<usize> = (0..n).filter(|&i| a[i].is_zero()).collect();
            let w = rational_centre(a, d, &positive);
            let mut base = vec![Rational::zero(); n];
            for (&i, wi) in positive.iter().zip(&w) {
                base[i] = wi.clone();
            }
            let last_of = |first: &[Rational]| -> Vec<Rational> {
                (0..n)
                    .map(|i| {
                        if a[i].is_zero() {
                            Rational::zero()
                        } else {
                            &a[i] / (&first[i] * pow_rat(&base[i], d - 2))
                        }
                    })
                    .collect()
            };
            if let Some(&z) = zero.first() {
                // Spare mass of the last factor goes to a coordinate with a_i = 0.
                let mut last = last_of(&base);
                let spare = &one - last.iter().sum::<Rational>();
                last[z] = spare;
                let mut out = vec![exact(base.clone()); d as usize - 1];
                out.push(exact(last));
                return Ok(out);
            }
            // Move the first factor along e_0 - e_1 until the last factor sums to one.
            let f_at = |s: &Rational| -> Rational {
                let mut first = base.clone();
                first[0] += s;
                first[1] -= s;
                last_of(&first).iter().sum()
            };
            let mut lo = Rational::zero();
            let mut hi = base[1].clone();
            let mut hit = None;
            for _ in 0..400 {
                let mid = (&lo + &hi) / Rational::from_integer(2.into());
                match f_at(&mid).cmp(&one) {
                    Ordering::Less => lo = mid,
                    Ordering::Greater => hi = mid,
                    Ordering::Equal => {
                        hit = Some(mid);
                        break;
                    }
                }
                if &hi - &lo <= pow2(-60) && hi < base[1] && f_at(&hi) - f_at(&lo) <= pow2(-50) {
                    break;
                }
            }
            let (s_lo, s_hi) = match hit {
                Some(s) => (s.clone(), s),
                None => (lo, hi),
            };
            let first_at = |s: &Rational| {
                let mut first = base.clone();
                first[0] += s;
                first[1] -= s;
                first
            };
            let (f_lo, f_hi) = (first_at(&s_lo), first_at(&s_hi));
            let (l_lo, l_hi) = (last_of(&f_lo), last_of(&f_hi));
            let hull = |x: &[Rational], y: &[Rational]| -> Vec<AI> {
                x.iter()
                    .zip(y)
                    .map(|(p, q)| {
                        if p <= q {
                            AI::new(p.clone(), q.clone(), TENSOR_BITS)
                        } else {
                            AI::new(q.clone(), p.clone(), TENSOR_BITS)
                        }
                    })
                    .collect()
            };
            let mut out = vec![hull(&f_lo, &f_hi)];
            for _ in 1..d - 1 {
                out.push(exact(base.clone()));
            }
            out.push(hull(&l_lo, &l_hi));
            Ok(out)
        }
    }
}

/// Observed entries of a 2x2x2 tensor, keyed by index bits.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Pattern222 {
    entries: BTreeMap<[u8; 3], Rational>,
}

impl Pattern222 {
    pub fn new(entries: impl IntoIterator<Item = ([u8; 3], Rational)>) -> Result<Self> {
        let mut map = BTreeMap::new();
        for (pos, value) in entries {
            if pos.iter().any(|&b| b > 1) {
                return Err(Error::InvalidArgument(format!(
                    "index {pos:?} is not in {{0,1}}^3"
                )));
            }
            if value.is_negative() {
                return Err(Error::InvalidArgument(format!("entry {pos:?} is negative")));
            }
            if map.insert(pos, value).is_some() {
                return Err(Error::InvalidArgument(format!(
                    "entry {pos:?} is given twice"
                )));
            }
        }
        Ok(Self { entries: map })
    }

    pub fn entries(&self) -> &BTreeMap<[u8; 3], Rational> {
        &self.entries
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Case222 {
    Empty,
    Single,
    /// Two entries sharing an edge of the cube.
    Edge,
    /// Two entries on a face diagonal.
    FaceDiagonal,
    /// Two antipodal entries.
    Antipodal,
    /// Three entries on one face.
    Face,
    /// An edge plus the vertex antipodal to one of its ends.
    EdgeAndAntipode,
    /// Three entries pairwise on face diagonals.
    Triangle,
}

const REPRESENTATIVES: [(Case222, &[[u8; 3]]); 8] = [
    (Case222::Empty, &[]),
    (Case222::Single, &[[0, 0, 0]]),
    (Case222::Edge, &[[0, 0, 0], [0, 0, 1]]),
    (Case222::FaceDiagonal, &[[0, 0, 0], [0, 1, 1]]),
    (Case222::Antipodal, &[[0, 0, 0], [1, 1, 1]]),
    (Case222::Face, &[[0, 0, 0], [0, 0, 1], [0, 1, 0]]),
    (Case222::EdgeAndAntipode, &[[0, 0, 0], [0, 0, 1], [1, 1, 0]]),
    (Case222::Triangle, &[[0, 0, 0], [1, 0, 1], [0, 1, 1]]),
];

const PERMUTATIONS: [[usize; 3]; 6] = [
    [0, 1, 2],
    [0, 2, 1],
    [1, 0, 2],
    [1, 2, 0],
    [2, 0, 1],
    [2, 1, 0],
];

/// Image of a cube vertex under an axis permutation followed by bit flips.
fn act(perm: &[usize; 3], flips: u8, p: [u8; 3]) -> [u8; 3] {
    [0, 1, 2].map(|k| p[perm[k]] ^ (flips >> k & 1))
}

/// Case of the pattern and its values listed in representative order.
pub fn classify_222(p: &Pattern222) -> Result<(Case222, Vec<Rational>)> {
    let positions: BTreeSet<[u8; 3]> = p.entries.keys().copied().collect();
    for (case, rep) in REPRESENTATIVES {
        if rep.len() != positions.len() {
            continue;
        }
        let target: BTreeSet<[u8; 3]> = rep.iter().copied().collect();
        for perm in &PERMUTATIONS {
            for flips in 0..8u8 {
                let image: BTreeMap<[u8; 3], &Rational> = p
                    .entries
                    .iter()
                    .map(|(&pos, v)| (act(perm, flips, pos), v))
                    .collect();
                if image.keys().copied().collect::<BTreeSet<_>>() == target {
                    return Ok((case, rep.iter().map(|q| image[q].clone()).collect()));
                }
            }
        }
    }
    Err(Error::UnsupportedPattern(format!(
        "{} observed entries do not match a listed orbit",
        positions.len()
    )))
}

/// Real roots of `x^3 + (A+B+C-1)x^2 + (AB+AC+BC)x + ABC` in `[0, 1]`.
pub fn triangle_cubic(values: &[Rational]) -> UPoly {
    let (a, b, c) = (&values[0], &values[1], &values[2]);
    UPoly::new(vec![
        a * b * c,
        a * b + a * c + b * c,
        a + b + c - Rational::one(),
        Rational::one(),
    ])
}

pub fn decide_222(p: &Pattern222) -> Result<Certificate> {
    let (case, v) = classify_222(p)?;
    let one = Rational::one();
    let policy = PrecisionPolicy::default();
    let verdict = |ok: bool, why: String| {
        let ev = Evidence::Criterion(why);
        if ok {
            Certificate::completable(ev)
        } else {
            Certificate::not_completable(ev)
        }
    };
    let roots = |vals: &[Rational], d: u32| {
        compare_root_sum(vals, d, &one, policy).ordering != Ordering::Greater
    };
    Ok(match case {
        Case222::Empty => verdict(true, "no observed entries".into()),
        Case222::Single => verdict(v[0] <= one, "entry at most one".into()),
        Case222::Edge => verdict(&v[0] + &v[1] <= one, "sum at most one".into()),
        Case222::FaceDiagonal => verdict(roots(&v, 2), "square roots sum to at most one".into()),
        Case222::Antipodal => verdict(roots(&v, 3), "cube roots sum to at most one".into()),
        Case222::Face => {
            // A slice of the tensor is a 2x2 matrix with the third row free.
            let m = make_partial_matrix(
                3,
                2,
                [
                    (0, 0, v[0].clone()),
                    (0, 1, v[1].clone()),
                    (1, 0, v[2].clone()),
                ],
            )?;
            let cert = decide_with(&m, &DecideOptions::default());
            verdict(
                cert.is_completable(),
                "face slice completes as a matrix".into(),
            )
        }
        Case222::EdgeAndAntipode => {
            let (a, b, c) = (&v[0], &v[1], &v[2]);
            if a.is_positive() {
                let s = a + b;
                let t = c * &s / a;
                verdict(
                    roots(&[s, t], 2),
                    "square-root condition on the merged edge".into(),
                )
            } else if b.is_positive() && c.is_positive() {
                verdict(false, "zero entry forces the antipode to vanish".into())
            } else {
                verdict(b.max(c) <= &one, "remaining entry at most one".into())
            }
        }
        Case222::Triangle => {
            let positive: Vec<Rational> = v.iter().filter(|x| x.is_positive()).cloned().collect();
            match positive.len() {
                3 => {
                    let cubic = triangle_cubic(&v);
                    let count = cubic.count_roots_in(&Rational::zero(), &one);
                    verdict(count > 0, format!("cubic has {count} roots in [0, 1]"))
                }
                2 => verdict(
                    roots(&positive, 2),
                    "square roots sum to at most one".into(),
                ),
                1 => verdict(positive[0] <= one, "entry at most one".into()),
                _ => verdict(true, "all observed entries vanish".into()),
            }
        }
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Rank2Pattern {
    /// Missing entries at `(2,1)` and `(2,2)`.
    A,
    /// Missing entries at `(1,1)` and `(2,2)`.
    B,
}

#[derive(Debug, Clone)]
pub enum Rank2Outcome {
    Completion {
        matrix: Vec<Vec<AI>>,
        /// Every admissible value of the first missing entry.
        x: Vec<AI>,
    },
    NotCompletable,
}

impl Rank2Outcome {
    pub fn is_completion(&self) -> bool {
        matches!(self, Self::Completion { .. })
    }
}

fn det3(m: &[[UPoly; 3]; 3]) -> UPoly {
    let minor = |c0: usize, c1: usize| &(&m[1][c0] * &m[2][c1]) - &(&m[1][c1] * &m[2][c0]);
    &(&(&m[0][0] * &minor(1, 2)) - &(&m[0][1] * &minor(0, 2))) + &(&m[0][2] * &minor(0, 1))
}

/// Seven observed values `a..g` of a 3x3 simplex matrix of rank at most two;
/// the missing entries are `X` and `R - X` with `R = 1 - Σ`.
pub fn complete_rank2_3x3(values: &[Rational; 7], pattern: Rank2Pattern) -> Result<Rank2Outcome> {
    if values.iter().any(Signed::is_negative) {
        return Err(Error::InvalidArgument("values must be nonnegative".into()));
    }
    let r = Rational::one() - values.iter().sum::<Rational>();
    if r.is_negative() {
        return Err(Error::InvalidArgument("values sum to more than one".into()));
    }
    let [a, b, c, d, e, f, g] = values.clone().map(UPoly::constant);
    let x = UPoly::x();
    let rest = &UPoly::constant(r.clone()) - &x;
    let (grid, cells) = match pattern {
        Rank2Pattern::A => ([[a, b, c], [d, e, f], [g, x, rest]], [(2, 1), (2, 2)]),
        Rank2Pattern::B => ([[a, b, c], [d, x, f], [g, e, rest]], [(1, 1), (2, 2)]),
    };
    let det = det3(&grid);
    if pattern == Rank2Pattern::A && det.degree().is_none_or(|k| k == 0) {
        return Err(Error::DegenerateDenominator);
    }
    let zero = Rational::zero();
    let admissible: Vec<AI> = match det.degree() {
        None => vec![AI::zero()],
        Some(0) => Vec::new(),
        Some(1) => {
            let c = det.coeffs();
            let root = -&c[0] / &c[1];
            if zero <= root && root <= r {
                vec![AI::exact(root)]
            } else {
                Vec::new()
            }
        }
        Some(_) => quadratic_roots_in(&det, &r),
    };
    let Some(first) = admissible.first().cloned() else {
        return Ok(Rank2Outcome::NotCompletable);
    };
    let mut matrix: Vec<Vec<AI>> = vec![vec![AI::zero(); 3]; 3];
    let positions: Vec<(usize, usize)> = (0..3)
        .flat_map(|i| (0..3).map(move |j| (i, j)))
        .filter(|p| !cells.contains(p))
        .collect();
    for (p, v) in positions.iter().zip(values) {
        matrix[p.0][p.1] = AI::exact(v.clone());
    }
    matrix[cells[0].0][cells[0].1] = first.clone();
    matrix[cells[1].0][cells[1].1] = &AI::exact(r) - &first;
    Ok(Rank2Outcome::Completion {
        matrix,
        x: admissible,
    })
}

/// Roots of a quadratic inside `[0, r]`, certified by Sturm counts.
fn quadratic_roots_in(p: &UPoly, r: &Rational) -> Vec<AI> {
    let zero = Rational::zero();
    let c = p.coeffs();
    let disc = &c[1] * &c[1] - Rational::from_integer(4.into()) * &c[2] * &c[0];
    if disc.is_negative() || p.count_roots_in(&zero, r) == 0 {
        return Vec::new();
    }
    let two_a = &c[2] * Rational::from_integer(2.into());
    if let Some(s) = crate::numeric::exact_root(&disc, 2) {
        let mut roots: Vec<Rational> = vec![(-&c[1] - &s) / &two_a, (-&c[1] + &s) / &two_a];
        roots.sort();
        roots.dedup();
        return roots
            .into_iter()
            .filter(|x| &zero <= x && x <= r)
            .map(AI::exact)
            .collect();
    }
    // Irrational roots never sit on the rational endpoints.
    let mut bits = 64;
    loop {
        let sq = AI::sqrt_of(&disc, bits);
        let minus_b = AI::exact(-&c[1]);
        let two_a = AI::exact(two_a.clone());
        let mut roots = vec![
            (&minus_b - &sq)
                .checked_div(&two_a)
                .expect("nonzero leading coefficient"),
            (&minus_b + &sq)
                .checked_div(&two_a)
                .expect("nonzero leading coefficient"),
        ];
        roots.sort_by(|x, y| x.lower().cmp(y.lower()));
        let decided = roots.iter().all(|x| {
            let inside = x.lower() >= &zero && x.upper() <= r;
            let outside = x.upper() < &zero || x.lower() > r;
            inside || outside
        });
        if decided {
            return roots
                .into_iter()
                .filter(|x| x.lower() >= &zero && x.upper() <= r)
                .collect();
        }
        bits *= 2;
    }
}
