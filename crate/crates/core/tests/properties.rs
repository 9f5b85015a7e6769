use std::cmp::Ordering;

use num_traits::{One, Zero};
use proptest::prelude::*;

use simplexcomp::complete::{
    classify_completions, complete_pair_walk, sample_family, CompletionKind,
};
use simplexcomp::decide::{decide, decide_positive};
use simplexcomp::graph::BipartiteGraph;
use simplexcomp::model::{
    make_partial_matrix, verify_completion, PartialMatrix, RankOneFactorization, Verdict,
};
use simplexcomp::numeric::{compare_sqrt_sum, rat, AlgebraicInterval, Rational};
use simplexcomp::optimize::{optimize_distance, OptimizationProblem, Sense, TParametrization};
use simplexcomp::reduce::{complete_by_cycles, contract_blocks, propagate_zeros, ZeroPropagation};
use simplexcomp::semialg::{boundary_polynomial, membership_with_polynomial, Chamber};
use simplexcomp::tensor::{
    complete_diagonal_tensor, complete_rank2_3x3, decide_diagonal_tensor, DiagonalTensorInstance,
    Rank2Outcome, Rank2Pattern,
};

fn normalize(raw: &[u32]) -> Vec<Rational> {
    let total: u32 = raw.iter().sum();
    raw.iter().map(|&x| rat(x as i64, total as i64)).collect()
}

/// Simplex vector with some zero coordinates allowed.
fn simplex(n: usize) -> impl Strategy<Value = Vec<Rational>> {
    prop::collection::vec(prop_oneof![1 => Just(0u32), 4 => 1u32..50], n)
        .prop_filter("nonzero", |v| v.iter().any(|&x| x > 0))
        .prop_map(|v| normalize(&v))
}

fn positive_simplex(n: usize) -> impl Strategy<Value = Vec<Rational>> {
    prop::collection::vec(1u32..50, n).prop_map(|v| normalize(&v))
}

fn pattern(m: usize, n: usize) -> impl Strategy<Value = Vec<bool>> {
    prop::collection::vec(prop::bool::weighted(0.45), m * n)
}

fn project(u: &[Rational], v: &[Rational], mask: &[bool]) -> PartialMatrix {
    let n = v.len();
    make_partial_matrix(
        u.len(),
        n,
        (0..u.len())
            .flat_map(|i| (0..n).map(move |j| (i, j)))
            .filter(|&(i, j)| mask[i * n + j])
            .map(|(i, j)| (i, j, &u[i] * &v[j])),
    )
    .unwrap()
}

/// Rank-one projection with random shape.
fn rank_one_instance() -> impl Strategy<Value = PartialMatrix> {
    (1usize..=5, 1usize..=5).prop_flat_map(|(m, n)| {
        (simplex(m), simplex(n), pattern(m, n)).prop_map(|(u, v, mask)| project(&u, &v, &mask))
    })
}

/// Arbitrary partial matrix with entries in [0, 1/2], not necessarily completable.
fn arbitrary_instance() -> impl Strategy<Value = PartialMatrix> {
    (1usize..=4, 1usize..=4).prop_flat_map(|(m, n)| {
        prop::collection::vec(
            prop_oneof![1 => Just(None), 1 => Just(Some(0u32)), 3 => (1u32..60).prop_map(Some)],
            m * n,
        )
        .prop_map(move |cells| {
            make_partial_matrix(
                m,
                n,
                cells
                    .iter()
                    .enumerate()
                    .filter_map(|(k, c)| c.map(|x| (k / n, k % n, rat(x as i64, 120)))),
            )
            .unwrap()
        })
    })
}

/// Diagonal with `Σ√a_i = c < 1`.
fn interior_diagonal(lo: usize, hi: usize) -> impl Strategy<Value = Vec<Rational>> {
    (lo..=hi, 6i64..19).prop_flat_map(|(n, c)| {
        positive_simplex(n).prop_map(move |r| {
            let c = rat(c, 20);
            r.iter().map(|x| (x * &c) * (x * &c)).collect()
        })
    })
}

fn permutation(n: usize) -> impl Strategy<Value = Vec<usize>> {
    Just((0..n).collect::<Vec<_>>()).prop_shuffle()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn rational_arithmetic_is_exact(a in -1000i64..1000, b in 1i64..1000, c in -1000i64..1000, d in 1i64..1000) {
        let x = rat(a, b);
        let y = rat(c, d);
        prop_assert_eq!(&(&x + &y) - &y, x.clone());
        if !y.is_zero() {
            prop_assert_eq!(&(&x * &y) / &y, x);
        }
    }

    #[test]
    fn single_sqrt_matches_squared_comparison(b in 0i64..500, t in 1i64..30) {
        let b = rat(b, 100);
        let t = rat(t, 10);
        prop_assert_eq!(compare_sqrt_sum(std::slice::from_ref(&b), &t), b.cmp(&(&t * &t)));
    }

    #[test]
    fn perfect_square_sums_compare_exactly(r in prop::collection::vec(0i64..20, 1..5), t in 1i64..60) {
        let q = 20;
        let b: Vec<Rational> = r.iter().map(|&x| rat(x * x, q * q)).collect();
        let sum: i64 = r.iter().sum();
        let threshold = rat(t, q);
        prop_assert_eq!(compare_sqrt_sum(&b, &threshold), rat(sum, q).cmp(&threshold));
    }

    #[test]
    fn components_partition_vertices(m in rank_one_instance()) {
        let g = BipartiteGraph::from_partial_matrix(&m);
        let s = g.components();
        let covered: usize = s.edge_components.iter().map(|c| c.rows.len() + c.cols.len()).sum();
        prop_assert_eq!(covered + s.isolated_count(), m.nrows() + m.ncols());
    }

    #[test]
    fn cycle_basis_has_betti_size(m in rank_one_instance()) {
        let g = BipartiteGraph::from_partial_matrix(&m);
        let s = g.components();
        let vertices = m.nrows() + m.ncols();
        let components = s.edge_components.len() + s.isolated_count();
        let cycles = g.fundamental_cycles();
        prop_assert_eq!(cycles.len() + vertices, g.edge_count() + components);
        for c in &cycles {
            prop_assert!(c.is_valid());
            for e in &c.edges {
                prop_assert!(m.is_specified(e.0, e.1));
            }
        }
    }

    #[test]
    fn closure_is_idempotent(m in rank_one_instance()) {
        let g = BipartiteGraph::from_partial_matrix(&m);
        let closure = g.transitive_closure();
        prop_assert!(m.pattern().is_subset(&closure));
        let again = BipartiteGraph::from_pattern(m.nrows(), m.ncols(), closure.iter().copied());
        prop_assert_eq!(again.transitive_closure(), closure);
    }

    #[test]
    fn zero_propagation_is_a_closure(m in rank_one_instance()) {
        let ZeroPropagation::Ok { filled, zero_rows, zero_cols } = propagate_zeros(&m) else {
            return Err(TestCaseError::fail("rank-one projection violates zero propagation"));
        };
        let ZeroPropagation::Ok { filled: twice, zero_rows: r2, zero_cols: c2 } = propagate_zeros(&filled) else {
            return Err(TestCaseError::fail("second pass violates"));
        };
        prop_assert_eq!(twice, filled);
        prop_assert_eq!(r2, zero_rows);
        prop_assert_eq!(c2, zero_cols);
    }

    #[test]
    fn cycle_completion_has_vanishing_minors(
        (u, v, mask) in (2usize..=5, 2usize..=5)
            .prop_flat_map(|(m, n)| (positive_simplex(m), positive_simplex(n), pattern(m, n)))
    ) {
        let m = project(&u, &v, &mask);
        let done = complete_by_cycles(&m).unwrap();
        let f = &done.matrix;
        for (&(i, j), x) in f.entries() {
            prop_assert_eq!(x, &(&u[i] * &v[j]));
        }
        for i in 0..f.nrows() {
            for k in i + 1..f.nrows() {
                for j in 0..f.ncols() {
                    for l in j + 1..f.ncols() {
                        if let (Some(a), Some(b), Some(c), Some(d)) = (f.get(i, j), f.get(i, l), f.get(k, j), f.get(k, l)) {
                            prop_assert_eq!(a * d, b * c);
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn block_factors_reproduce_filled_entries(m in rank_one_instance()) {
        let Ok(red) = contract_blocks(&m) else { return Ok(()); };
        for block in &red.block_factors {
            for (r, p) in block.rows.iter().zip(&block.row_weights) {
                for (c, q) in block.cols.iter().zip(&block.col_weights) {
                    if let Some(x) = red.filled.get(*r, *c) {
                        prop_assert_eq!(x, &(&block.block_sum * p * q));
                    }
                }
            }
        }
    }

    #[test]
    fn rank_one_projections_are_completable(m in rank_one_instance()) {
        let cert = decide(&m);
        prop_assert_eq!(cert.verdict, Verdict::Completable);
        prop_assert!(verify_completion(&m, cert.witness().unwrap(), 1e-9).unwrap());
    }

    #[test]
    fn completable_verdicts_carry_verified_witnesses(m in arbitrary_instance()) {
        let cert = decide(&m);
        if cert.is_completable() {
            let f = cert.witness().unwrap();
            prop_assert!(verify_completion(&m, f, 1e-9).unwrap());
            let (u, v) = (f.u_f64(), f.v_f64());
            prop_assert!(u.iter().chain(&v).all(|x| *x >= 0.0));
            prop_assert!((u.iter().sum::<f64>() - 1.0).abs() < 1e-12);
            prop_assert!((v.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn verdict_is_invariant_under_permutation_and_transpose(
        (m, rows, cols) in arbitrary_instance().prop_flat_map(|m| {
            let (r, c) = (m.nrows(), m.ncols());
            (Just(m), permutation(r), permutation(c))
        })
    ) {
        let base = decide(&m).verdict;
        prop_assert_eq!(decide(&m.permuted(&rows, &cols).unwrap()).verdict, base);
        prop_assert_eq!(decide(&m.transpose()).verdict, base);
    }

    #[test]
    fn positive_decider_agrees(m in arbitrary_instance()) {
        if !m.has_zero() {
            prop_assert_eq!(decide_positive(&m).unwrap().verdict, decide(&m).verdict);
        } else {
            prop_assert!(decide_positive(&m).is_err());
        }
    }

    #[test]
    fn empty_kind_iff_not_completable(m in arbitrary_instance()) {
        let kind = classify_completions(&m).unwrap().kind;
        prop_assert_eq!(
            matches!(kind, CompletionKind::Empty),
            decide(&m).verdict == Verdict::NotCompletable
        );
        for f in kind.points() {
            prop_assert!(verify_completion(&m, &f, 1e-9).unwrap());
        }
    }

    #[test]
    fn verification_is_monotone_in_eps(m in arbitrary_instance(), u in positive_simplex(4), v in positive_simplex(4), e in 1u32..12) {
        let f = RankOneFactorization::from_exact(u[..m.nrows()].to_vec(), v[..m.ncols()].to_vec());
        let eps = 10f64.powi(-(e as i32));
        if verify_completion(&m, &f, eps).unwrap() {
            prop_assert!(verify_completion(&m, &f, eps * 10.0).unwrap());
            prop_assert!(verify_completion(&m, &f, 1.0).unwrap());
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn pair_walk_roots_lie_in_range(a in interior_diagonal(2, 4)) {
        let walk = complete_pair_walk(&a[0], &a[1], &a[2..]).unwrap();
        let s = &walk.params.s_value;
        let lo = AlgebraicInterval::sqrt_of(&a[0], 128).checked_div(s).unwrap();
        let hi = AlgebraicInterval::sqrt_of(&a[1], 128).checked_div(s).unwrap();
        for root in &walk.params.roots {
            prop_assert!(root.lower() >= &-lo.upper().clone());
            prop_assert!(root.upper() <= hi.upper());
        }
        let m = PartialMatrix::diagonal(&a).unwrap();
        let [p, q] = &walk.completions;
        prop_assert!(p.max_entry_distance(q) > 0.0);
        prop_assert!(verify_completion(&m, p, 1e-9).unwrap());
        prop_assert!(verify_completion(&m, q, 1e-9).unwrap());
    }

    #[test]
    fn family_samples_verify(a in interior_diagonal(3, 5), seed in any::<u64>()) {
        let m = PartialMatrix::diagonal(&a).unwrap();
        for f in sample_family(&m, 4, seed).unwrap() {
            prop_assert!(verify_completion(&m, &f, 1e-9).unwrap());
        }
        let again = sample_family(&m, 4, seed).unwrap();
        prop_assert_eq!(sample_family(&m, 4, seed).unwrap(), again);
    }

    #[test]
    fn analytic_gradients_match_differences(a in interior_diagonal(3, 5), shift in prop::collection::vec(-1.0f64..1.0, 4)) {
        let problem = OptimizationProblem::new(PartialMatrix::diagonal(&a).unwrap());
        let tp = TParametrization::new(&problem).unwrap();
        let k = tp.dimension();
        let centre_min = a.iter().map(|x| simplexcomp::numeric::to_f64(x).sqrt()).fold(f64::INFINITY, f64::min);
        let t: Vec<f64> = shift[..k].iter().map(|x| x * centre_min * 0.1).collect();
        let (df, dd) = tp.gradients(&t).unwrap();
        let h = 1e-6;
        for i in 0..k {
            let mut up = t.clone();
            let mut down = t.clone();
            up[i] += h;
            down[i] -= h;
            let (fu, du) = tp.values(&up).unwrap();
            let (fd, dn) = tp.values(&down).unwrap();
            let nf = (fu - fd) / (2.0 * h);
            let nd = (du - dn) / (2.0 * h);
            prop_assert!((nf - df[i]).abs() <= 1e-5 * nf.abs().max(1.0), "f: {} vs {}", nf, df[i]);
            prop_assert!((nd - dd[i]).abs() <= 1e-5 * nd.abs().max(1.0), "d: {} vs {}", nd, dd[i]);
        }
    }

    #[test]
    fn order_two_tensors_match_matrices(a in prop::collection::vec(0i64..400, 1..6)) {
        let a: Vec<Rational> = a.into_iter().map(|x| rat(x, 1000)).collect();
        prop_assume!(a.iter().any(|x| !x.is_zero()));
        let t = DiagonalTensorInstance::new(2, a.clone()).unwrap();
        prop_assert_eq!(decide_diagonal_tensor(&t).verdict, decide(&PartialMatrix::diagonal(&a).unwrap()).verdict);
    }

    #[test]
    fn tensor_completions_multiply_back(d in 2u32..5, a in prop::collection::vec(1i64..200, 2..5)) {
        let a: Vec<Rational> = a.into_iter().map(|x| rat(x, 10_000)).collect();
        let t = DiagonalTensorInstance::new(d, a.clone()).unwrap();
        prop_assume!(decide_diagonal_tensor(&t).is_completable());
        let factors = complete_diagonal_tensor(&t).unwrap();
        prop_assert_eq!(factors.len(), d as usize);
        for f in &factors {
            let xs: Vec<f64> = f.iter().map(AlgebraicInterval::to_f64).collect();
            prop_assert!(xs.iter().all(|x| *x >= -1e-12));
            prop_assert!((xs.iter().sum::<f64>() - 1.0).abs() <= 1e-12);
        }
        for (i, ai) in a.iter().enumerate() {
            let product: f64 = factors.iter().map(|f| f[i].to_f64()).product();
            prop_assert!((product - simplexcomp::numeric::to_f64(ai)).abs() <= 1e-10);
        }
    }

    #[test]
    fn rank_two_completions_are_singular(
        p in 1i64..10,
        u1 in positive_simplex(3), v1 in positive_simplex(3),
        u2 in positive_simplex(3), v2 in positive_simplex(3),
    ) {
        let w = rat(p, 10);
        let full: Vec<Vec<Rational>> = (0..3)
            .map(|i| (0..3).map(|j| &w * &u1[i] * &v1[j] + (Rational::one() - &w) * &u2[i] * &v2[j]).collect())
            .collect();
        let hidden = [(2, 1), (2, 2)];
        let seen: Vec<Rational> = (0..3)
            .flat_map(|i| (0..3).map(move |j| (i, j)))
            .filter(|c| !hidden.contains(c))
            .map(|(i, j)| full[i][j].clone())
            .collect();
        let values: [Rational; 7] = seen.try_into().unwrap();
        let Ok(outcome) = complete_rank2_3x3(&values, Rank2Pattern::A) else { return Ok(()); };
        let Rank2Outcome::Completion { matrix, .. } = outcome else {
            return Err(TestCaseError::fail("rank-two projection rejected"));
        };
        let e: Vec<Vec<Rational>> = matrix
            .iter()
            .map(|row| row.iter().map(|x| x.as_exact().cloned().unwrap()).collect())
            .collect();
        let det = &e[0][0] * (&e[1][1] * &e[2][2] - &e[1][2] * &e[2][1])
            - &e[0][1] * (&e[1][0] * &e[2][2] - &e[1][2] * &e[2][0])
            + &e[0][2] * (&e[1][0] * &e[2][1] - &e[1][1] * &e[2][0]);
        prop_assert!(det.is_zero());
        prop_assert_eq!(e.iter().flatten().sum::<Rational>(), Rational::one());
        prop_assert_eq!(&e[2][1], &full[2][1]);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn min_objective_is_below_max(a in interior_diagonal(3, 3), seed in any::<u64>()) {
        let m = PartialMatrix::diagonal(&a).unwrap();
        let mut problem = OptimizationProblem::new(m.clone());
        problem.restarts = 8;
        problem.seed = seed;
        let lo = optimize_distance(&problem).unwrap();
        problem.sense = Sense::Max;
        let hi = optimize_distance(&problem).unwrap();
        prop_assert!(lo.objective <= hi.objective + 1e-9);
        for c in lo.candidates.iter().chain(&hi.candidates) {
            prop_assert!(verify_completion(&m, &c.factorization, 1e-8).unwrap());
        }
        let target = problem.target_matrix().unwrap();
        let CompletionKind::Family { base_point, .. } = classify_completions(&m).unwrap().kind else {
            return Err(TestCaseError::fail("not a family"));
        };
        let base = simplexcomp::optimize::distance(&base_point, &target);
        prop_assert!(lo.objective <= base + 1e-9 && base <= hi.objective + 1e-9);
    }

    #[test]
    fn membership_agrees_with_tensor_decision(d in 2u32..4, x in prop::collection::vec(0i64..300, 2..4)) {
        let n = x.len();
        prop_assume!(!(d == 3 && n == 3));
        let point: Vec<Rational> = x.into_iter().map(|v| rat(v, 1000)).collect();
        prop_assume!(point.iter().any(|v| !v.is_zero()));
        let p = boundary_polynomial(d, n).unwrap();
        let mem = membership_with_polynomial(&p, d, &point).unwrap();
        let t = DiagonalTensorInstance::new(d, point).unwrap();
        prop_assert_eq!(mem.chamber != Chamber::Outside, decide_diagonal_tensor(&t).is_completable());
    }

    #[test]
    fn boundary_points_lie_on_the_polynomial(d in 2u32..4, r in prop::collection::vec(1u32..30, 2..4)) {
        let n = r.len();
        prop_assume!(!(d == 3 && n == 3));
        let r = normalize(&r);
        let point: Vec<Rational> = r.iter().map(|ri| (0..d).fold(Rational::one(), |acc, _| acc * ri)).collect();
        let p = boundary_polynomial(d, n).unwrap();
        let mem = membership_with_polynomial(&p, d, &point).unwrap();
        prop_assert_eq!(mem.chamber, Chamber::Boundary);
        prop_assert_eq!(mem.polynomial_sign, Ordering::Equal);
    }
}

#[test]
fn transposed_optimum_scores_identically() {
    let m = PartialMatrix::diagonal(&[rat(1, 4), rat(1, 25), rat(1, 36)]).unwrap();
    let problem = OptimizationProblem::new(m);
    let r = optimize_distance(&problem).unwrap();
    let target = problem.target_matrix().unwrap();
    let d = simplexcomp::optimize::distance(&r.best, &target);
    let dt = simplexcomp::optimize::distance(&r.best.transpose(), &target);
    assert!((d - dt).abs() < 1e-12);
}
