//! Distance optimization over the completion set.
//!
//! A family is parametrized by block row masses `α`, isolated row masses `ρ`
//! and isolated column masses `γ`, with `Σα + Σρ = 1` and `Σ b/α + Σγ = 1`.
//! Local search is projected gradient descent on that surface with a log
//! barrier on `ρ, γ`, followed by Newton on the Lagrange system when there are
//! no isolated lines.

use num_traits::{One, Signed, Zero};

use crate::complete::{classify_completions, sample_reduced, CompletionKind};
use crate::error::{Error, Result};
use crate::model::{verify_completion, PartialMatrix, RankOneFactorization};
use crate::numeric::{from_f64, to_f64, Rational};
use crate::reduce::{BlockFactor, ReducedForm};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sense {
    Min,
    Max,
}

#[derive(Debug, Clone)]
pub struct OptimizationProblem {
    pub matrix: PartialMatrix,
    /// Full target matrix; `None` means uniform `1/(mn)`.
    pub target: Option<Vec<Vec<f64>>>,
    pub sense: Sense,
    pub restarts: usize,
    pub seed: u64,
    pub tolerance: f64,
}

impl OptimizationProblem {
    pub fn new(matrix: PartialMatrix) -> Self {
        Self {
            matrix,
            target: None,
            sense: Sense::Min,
            restarts: 64,
            seed: 0,
            tolerance: 1e-8,
        }
    }

    pub fn target_matrix(&self) -> Result<Vec<Vec<f64>>> {
        let (m, n) = (self.matrix.nrows(), self.matrix.ncols());
        match &self.target {
            None => Ok(vec![vec![1.0 / (m * n) as f64; n]; m]),
            Some(t) => {
                if t.len() != m || t.iter().any(|row| row.len() != n) {
                    return Err(Error::DimensionMismatch {
                        expected: format!("{m}x{n}"),
                        found: format!("{}x{}", t.len(), t.first().map_or(0, Vec::len)),
                    });
                }
                if t.iter().flatten().any(|x| !x.is_finite() || *x < 0.0) {
                    return Err(Error::InvalidArgument(
                        "target entries must be finite and nonnegative".into(),
                    ));
                }
                Ok(t.clone())
            }
        }
    }
}

#[derive(Debug, Clone)]
pub struct Candidate {
    pub factorization: RankOneFactorization,
    pub objective: f64,
    pub converged: bool,
    /// Stationarity measure at the candidate; zero for isolated completions.
    pub residual: f64,
    /// Walk parameters `t` when the candidate comes from a family without
    /// isolated lines.
    pub parameters: Vec<f64>,
}

#[derive(Debug, Clone)]
pub struct OptimizationResult {
    pub best: RankOneFactorization,
    pub objective: f64,
    pub candidates: Vec<Candidate>,
}

pub fn distance(f: &RankOneFactorization, target: &[Vec<f64>]) -> f64 {
    let m = f.matrix_f64();
    m.iter()
        .zip(target)
        .flat_map(|(r, t)| r.iter().zip(t).map(|(x, y)| (x - y) * (x - y)))
        .sum::<f64>()
        .sqrt()
}

/// Smooth model of one family.
#[derive(Debug, Clone)]
struct Landscape {
    nrows: usize,
    ncols: usize,
    /// Per block: rows with weights, columns with weights, and the block sum.
    blocks: Vec<(Vec<(usize, f64)>, Vec<(usize, f64)>, f64)>,
    b_exact: Vec<Rational>,
    exact_blocks: Vec<BlockFactor>,
    iso_rows: Vec<usize>,
    iso_cols: Vec<usize>,
    target: Vec<Vec<f64>>,
    sign: f64,
}

impl Landscape {
    fn new(red: &ReducedForm, target: &[Vec<f64>], sense: Sense) -> Self {
        let blocks = red
            .block_factors
            .iter()
            .map(|bf| {
                (
                    bf.rows
                        .iter()
                        .copied()
                        .zip(bf.row_weights.iter().map(to_f64))
                        .collect(),
                    bf.cols
                        .iter()
                        .copied()
                        .zip(bf.col_weights.iter().map(to_f64))
                        .collect(),
                    to_f64(&bf.block_sum),
                )
            })
            .collect();
        Self {
            nrows: red.filled.nrows(),
            ncols: red.filled.ncols(),
            blocks,
            b_exact: red.contracted_diagonal.clone(),
            exact_blocks: red.block_factors.clone(),
            iso_rows: red.isolated_rows(),
            iso_cols: red.isolated_cols(),
            target: target.to_vec(),
            sign: if sense == Sense::Min { 1.0 } else { -1.0 },
        }
    }

    fn s(&self) -> usize {
        self.blocks.len()
    }

    fn ir(&self) -> usize {
        self.iso_rows.len()
    }

    fn dim(&self) -> usize {
        self.s() + self.ir() + self.iso_cols.len()
    }

    fn factors(&self, y: &[f64]) -> (Vec<f64>, Vec<f64>) {
        let s = self.s();
        let mut u = vec![0.0; self.nrows];
        let mut v = vec![0.0; self.ncols];
        for (k, (rows, cols, b)) in self.blocks.iter().enumerate() {
            for &(r, p) in rows {
                u[r] = y[k] * p;
            }
            for &(c, q) in cols {
                v[c] = b / y[k] * q;
            }
        }
        for (t, &r) in self.iso_rows.iter().enumerate() {
            u[r] = y[s + t];
        }
        for (t, &c) in self.iso_cols.iter().enumerate() {
            v[c] = y[s + self.ir() + t];
        }
        (u, v)
    }

    fn residuals(&self, u: &[f64], v: &[f64]) -> Vec<Vec<f64>> {
        u.iter()
            .zip(&self.target)
            .map(|(ui, t)| v.iter().zip(t).map(|(vj, tij)| ui * vj - tij).collect())
            .collect()
    }

    /// Squared distance.
    fn dist2(&self, y: &[f64]) -> f64 {
        let (u, v) = self.factors(y);
        self.residuals(&u, &v).iter().flatten().map(|r| r * r).sum()
    }

    fn grad_dist2(&self, y: &[f64]) -> Vec<f64> {
        let s = self.s();
        let (u, v) = self.factors(y);
        let res = self.residuals(&u, &v);
        let gu: Vec<f64> = res
            .iter()
            .map(|row| 2.0 * row.iter().zip(&v).map(|(r, vj)| r * vj).sum::<f64>())
            .collect();
        let gv: Vec<f64> = (0..self.ncols)
            .map(|j| 2.0 * res.iter().zip(&u).map(|(row, ui)| row[j] * ui).sum::<f64>())
            .collect();
        let mut g = vec![0.0; self.dim()];
        for (k, (rows, cols, b)) in self.blocks.iter().enumerate() {
            let a = y[k];
            g[k] = rows.iter().map(|&(r, p)| gu[r] * p).sum::<f64>()
                - cols
                    .iter()
                    .map(|&(c, q)| gv[c] * q * b / (a * a))
                    .sum::<f64>();
        }
        for (t, &r) in self.iso_rows.iter().enumerate() {
            g[s + t] = gu[r];
        }
        for (t, &c) in self.iso_cols.iter().enumerate() {
            g[s + self.ir() + t] = gv[c];
        }
        g
    }

    fn constraints(&self, y: &[f64]) -> [f64; 2] {
        let s = self.s();
        let ir = self.ir();
        let c1 = y[..s + ir].iter().sum::<f64>() - 1.0;
        let c2 = self
            .blocks
            .iter()
            .zip(y)
            .map(|((_, _, b), a)| b / a)
            .sum::<f64>()
            + y[s + ir..].iter().sum::<f64>()
            - 1.0;
        [c1, c2]
    }

    fn jacobian(&self, y: &[f64]) -> [Vec<f64>; 2] {
        let s = self.s();
        let ir = self.ir();
        let n = self.dim();
        let mut j1 = vec![0.0; n];
        let mut j2 = vec![0.0; n];
        for t in 0..s + ir {
            j1[t] = 1.0;
        }
        for (k, (_, _, b)) in self.blocks.iter().enumerate() {
            j2[k] = -b / (y[k] * y[k]);
        }
        for t in s + ir..n {
            j2[t] = 1.0;
        }
        [j1, j2]
    }

    fn bounded(&self) -> std::ops::Range<usize> {
        self.s()..self.dim()
    }

    fn interior(&self, y: &[f64]) -> bool {
        y.iter().all(|x| *x > 0.0 && x.is_finite())
    }

    fn phi(&self, y: &[f64], mu: f64) -> f64 {
        let barrier: f64 = y[self.bounded()].iter().map(|x| x.ln()).sum();
        self.sign * self.dist2(y) - mu * barrier
    }

    fn grad_phi(&self, y: &[f64], mu: f64) -> Vec<f64> {
        let mut g: Vec<f64> = self
            .grad_dist2(y)
            .into_iter()
            .map(|x| self.sign * x)
            .collect();
        for t in self.bounded() {
            g[t] -= mu / y[t];
        }
        g
    }

    /// Newton steps back onto both constraints along the minimum-norm correction.
    fn restore(&self, mut y: Vec<f64>) -> Option<Vec<f64>> {
        for _ in 0..40 {
            if !self.interior(&y) {
                return None;
            }
            let c = self.constraints(&y);
            if c[0].abs() < 1e-15 && c[1].abs() < 1e-15 {
                return Some(y);
            }
            let j = self.jacobian(&y);
            let corr = min_norm_solve(&j, c)?;
            for (yi, d) in y.iter_mut().zip(corr) {
                *yi -= d;
            }
        }
        let c = self.constraints(&y);
        (self.interior(&y) && c[0].abs() < 1e-12 && c[1].abs() < 1e-12).then_some(y)
    }

    /// Projected gradient descent for a fixed barrier weight. Returns the final
    /// point, the norm of the last projected gradient and whether the descent
    /// settled before the iteration limit.
    fn descend(&self, mut y: Vec<f64>, mu: f64) -> (Vec<f64>, f64, bool) {
        let mut eta = 1e-2;
        let mut gnorm = f64::INFINITY;
        let mut stalled = 0;
        for _ in 0..4000 {
            let g = self.grad_phi(&y, mu);
            let j = self.jacobian(&y);
            let Some(gp) = project(&j, &g) else { break };
            gnorm = gp.iter().map(|x| x * x).sum::<f64>().sqrt();
            if gnorm < 1e-14 {
                return (y, gnorm, true);
            }
            let f0 = self.phi(&y, mu);
            let mut accepted = None;
            while eta > 1e-20 {
                let trial: Vec<f64> = y.iter().zip(&gp).map(|(a, d)| a - eta * d).collect();
                if let Some(next) = self.restore(trial) {
                    let f1 = self.phi(&next, mu);
                    if f1 <= f0 - 1e-4 * eta * gnorm * gnorm {
                        accepted = Some((next, f1));
                        break;
                    }
                }
                eta *= 0.5;
            }
            let Some((next, f1)) = accepted else {
                return (y, gnorm, true);
            };
            stalled = if f0 - f1 < 1e-17 * (1.0 + f0.abs()) {
                stalled + 1
            } else {
                0
            };
            y = next;
            eta *= 2.0;
            if stalled >= 5 {
                return (y, gnorm, true);
            }
        }
        (y, gnorm, false)
    }

    /// Newton iteration on `∇D = λ ∇f + ν 1`, `Σα = 1`, `f = 1`.
    fn polish(&self, y: &[f64]) -> Vec<f64> {
        let s = self.s();
        let lagrange = |z: &[f64]| -> Vec<f64> {
            let a = &z[..s];
            let g = self.grad_dist2(a);
            let j = self.jacobian(a);
            let c = self.constraints(a);
            let mut out: Vec<f64> = (0..s).map(|k| g[k] - z[s] * j[1][k] - z[s + 1]).collect();
            out.extend(c);
            out
        };
        let g = self.grad_dist2(y);
        let j = self.jacobian(y);
        let Some(mult) = least_squares_2(&j, &g) else {
            return y.to_vec();
        };
        let mut z: Vec<f64> = y.to_vec();
        z.push(mult[1]);
        z.push(mult[0]);
        let norm = |v: &[f64]| v.iter().map(|x| x * x).sum::<f64>().sqrt();
        let mut r = lagrange(&z);
        for _ in 0..60 {
            let rn = norm(&r);
            if rn < 1e-15 {
                break;
            }
            let n = z.len();
            let mut jac = vec![vec![0.0; n]; n];
            for c in 0..n {
                let h = 1e-7 * z[c].abs().max(1e-3);
                let mut zp = z.clone();
                let mut zm = z.clone();
                zp[c] += h;
                zm[c] -= h;
                let (rp, rm) = (lagrange(&zp), lagrange(&zm));
                for row in 0..n {
                    jac[row][c] = (rp[row] - rm[row]) / (2.0 * h);
                }
            }
            let Some(step) = solve(jac, r.iter().map(|x| -x).collect()) else {
                break;
            };
            let mut scale = 1.0;
            let mut improved = false;
            while scale > 1e-6 {
                let trial: Vec<f64> = z.iter().zip(&step).map(|(a, d)| a + scale * d).collect();
                if self.interior(&trial[..s]) {
                    let rt = lagrange(&trial);
                    if norm(&rt) < rn {
                        z = trial;
                        r = rt;
                        improved = true;
                        break;
                    }
                }
                scale *= 0.5;
            }
            if !improved {
                break;
            }
        }
        z.truncate(s);
        z
    }

    fn from_factorization(&self, f: &RankOneFactorization) -> Vec<f64> {
        let u = f.u_f64();
        let v = f.v_f64();
        let mut y: Vec<f64> = self
            .blocks
            .iter()
            .map(|(rows, _, _)| rows.iter().map(|&(r, _)| u[r]).sum())
            .collect();
        y.extend(self.iso_rows.iter().map(|&r| u[r]));
        y.extend(self.iso_cols.iter().map(|&c| v[c]));
        y
    }

    /// Exact rational factorization at `y`: masses are rounded, the last row
    /// mass absorbs the first constraint and column masses follow exactly.
    fn exact_point(&self, y: &[f64]) -> RankOneFactorization {
        let s = self.s();
        let ir = self.ir();
        let mut w: Vec<Rational> = y[..s + ir].iter().map(|x| from_f64(*x)).collect();
        let last = w.len() - 1;
        let rest: Rational = w[..last].iter().sum();
        w[last] = Rational::one() - rest;
        let beta: Vec<Rational> = self.b_exact.iter().zip(&w).map(|(b, a)| b / a).collect();
        let mut gamma: Vec<Rational> = y[s + ir..].iter().map(|x| from_f64(x.max(0.0))).collect();
        if let Some(lastg) = gamma.len().checked_sub(1) {
            let rest: Rational =
                gamma[..lastg].iter().sum::<Rational>() + beta.iter().sum::<Rational>();
            let left = Rational::one() - rest;
            gamma[lastg] = if left.is_negative() {
                Rational::zero()
            } else {
                left
            };
        }
        let (u, v) = self.spread(&w[..s], &beta, &w[s..], &gamma);
        RankOneFactorization::from_exact(u, v)
    }

    fn spread(
        &self,
        alpha: &[Rational],
        beta: &[Rational],
        rho: &[Rational],
        gamma: &[Rational],
    ) -> (Vec<Rational>, Vec<Rational>) {
        let mut u = vec![Rational::zero(); self.nrows];
        let mut v = vec![Rational::zero(); self.ncols];
        for (k, bf) in self.exact_blocks.iter().enumerate() {
            for (&r, p) in bf.rows.iter().zip(&bf.row_weights) {
                u[r] = &alpha[k] * p;
            }
            for (&c, q) in bf.cols.iter().zip(&bf.col_weights) {
                v[c] = &beta[k] * q;
            }
        }
        for (t, &r) in self.iso_rows.iter().enumerate() {
            u[r] = rho[t].clone();
        }
        for (t, &c) in self.iso_cols.iter().enumerate() {
            v[c] = gamma[t].clone();
        }
        (u, v)
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// `J^T (J J^T)^{-1} c`, with the Gram matrix regularized when nearly singular.
fn min_norm_solve(j: &[Vec<f64>; 2], c: [f64; 2]) -> Option<Vec<f64>> {
    let g11 = dot(&j[0], &j[0]);
    let g12 = dot(&j[0], &j[1]);
    let g22 = dot(&j[1], &j[1]);
    let det = g11 * g22 - g12 * g12;
    let lam = if det.abs() > 1e-14 * (g11 * g22).max(1e-300) {
        [
            (g22 * c[0] - g12 * c[1]) / det,
            (g11 * c[1] - g12 * c[0]) / det,
        ]
    } else if g11 > 0.0 && c[1].abs() < 1e-15 {
        [c[0] / g11, 0.0]
    } else {
        return None;
    };
    Some(
        j[0].iter()
            .zip(&j[1])
            .map(|(a, b)| a * lam[0] + b * lam[1])
            .collect(),
    )
}

fn project(j: &[Vec<f64>; 2], g: &[f64]) -> Option<Vec<f64>> {
    let corr = min_norm_solve(j, [dot(&j[0], g), dot(&j[1], g)])?;
    Some(g.iter().zip(corr).map(|(a, b)| a - b).collect())
}

/// Coefficients `(c1, c2)` minimizing `|g - c1 j0 - c2 j1|`.
fn least_squares_2(j: &[Vec<f64>; 2], g: &[f64]) -> Option<[f64; 2]> {
    let g11 = dot(&j[0], &j[0]);
    let g12 = dot(&j[0], &j[1]);
    let g22 = dot(&j[1], &j[1]);
    let det = g11 * g22 - g12 * g12;
    if det.abs() < 1e-300 {
        return None;
    }
    let (r0, r1) = (dot(&j[0], g), dot(&j[1], g));
    Some([(g22 * r0 - g12 * r1) / det, (g11 * r1 - g12 * r0) / det])
}

/// Gaussian elimination with partial pivoting.
fn solve(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Option<Vec<f64>> {
    let n = b.len();
    for col in 0..n {
        let piv = (col..n).max_by(|&x, &y| a[x][col].abs().total_cmp(&a[y][col].abs()))?;
        if a[piv][col].abs() < 1e-300 {
            return None;
        }
        a.swap(col, piv);
        b.swap(col, piv);
        for row in col + 1..n {
            let f = a[row][col] / a[col][col];
            for k in col..n {
                a[row][k] -= f * a[col][k];
            }
            b[row] -= f * b[col];
        }
    }
    let mut x = vec![0.0; n];
    for row in (0..n).rev() {
        let s: f64 = (row + 1..n).map(|k| a[row][k] * x[k]).sum();
        x[row] = (b[row] - s) / a[row][row];
    }
    Some(x)
}

/// Walk coordinates `α_k = √b_k/S + t_k` for `k < s`, with the last block
/// taking up the slack. Only for families without isolated lines.
#[derive(Debug, Clone)]
pub struct TParametrization {
    land: Landscape,
    centre: Vec<f64>,
}

impl TParametrization {
    pub fn new(problem: &OptimizationProblem) -> Result<Self> {
        let target = problem.target_matrix()?;
        match classify_completions(&problem.matrix)?.kind {
            CompletionKind::Family { reduced, .. }
                if reduced.isolated_count() == 0 && !problem.matrix.has_zero() =>
            {
                Ok(Self::from_reduced(&reduced, &target, problem.sense))
            }
            _ => Err(Error::NotAFamily),
        }
    }

    fn from_reduced(red: &ReducedForm, target: &[Vec<f64>], sense: Sense) -> Self {
        let land = Landscape::new(red, target, sense);
        let sq: Vec<f64> = land.blocks.iter().map(|(_, _, b)| b.sqrt()).collect();
        let total: f64 = sq.iter().sum();
        let centre = sq.iter().map(|x| x / total).collect();
        Self { land, centre }
    }

    /// Number of walk parameters, `s - 1`.
    pub fn dimension(&self) -> usize {
        self.centre.len() - 1
    }

    pub fn alpha(&self, t: &[f64]) -> Result<Vec<f64>> {
        if t.len() != self.dimension() {
            return Err(Error::DimensionMismatch {
                expected: self.dimension().to_string(),
                found: t.len().to_string(),
            });
        }
        let mut a: Vec<f64> = self.centre.clone();
        let last = a.len() - 1;
        for (k, tk) in t.iter().enumerate() {
            a[k] += tk;
            a[last] -= tk;
        }
        if a.iter().any(|x| *x <= 0.0) {
            return Err(Error::InvalidArgument(
                "parameters leave the simplex interior".into(),
            ));
        }
        Ok(a)
    }

    pub fn parameters_of(&self, f: &RankOneFactorization) -> Vec<f64> {
        let y = self.land.from_factorization(f);
        (0..self.dimension())
            .map(|k| y[k] - self.centre[k])
            .collect()
    }

    /// `(f(t), d(t))`.
    pub fn values(&self, t: &[f64]) -> Result<(f64, f64)> {
        let a = self.alpha(t)?;
        Ok((
            self.land.constraints(&a)[1] + 1.0,
            self.land.dist2(&a).sqrt(),
        ))
    }

    /// `(∂f/∂t, ∂d/∂t)`.
    pub fn gradients(&self, t: &[f64]) -> Result<(Vec<f64>, Vec<f64>)> {
        let a = self.alpha(t)?;
        let s = a.len();
        let jf = &self.land.jacobian(&a)[1];
        let gd2 = self.land.grad_dist2(&a);
        let d = self.land.dist2(&a).sqrt();
        let df = (0..s - 1).map(|k| jf[k] - jf[s - 1]).collect();
        let dd = (0..s - 1)
            .map(|k| (gd2[k] - gd2[s - 1]) / (2.0 * d))
            .collect();
        Ok((df, dd))
    }

    /// Largest absolute 2x2 minor of the matrix with rows `∂f/∂t` and `∂d/∂t`.
    pub fn residual(&self, t: &[f64]) -> Result<f64> {
        let (df, dd) = self.gradients(t)?;
        if df.len() == 1 {
            return Ok(dd[0].abs());
        }
        let mut worst: f64 = 0.0;
        for k in 0..df.len() {
            for l in k + 1..df.len() {
                worst = worst.max((df[k] * dd[l] - df[l] * dd[k]).abs());
            }
        }
        Ok(worst)
    }
}

pub fn stationarity_residual(t: &[f64], problem: &OptimizationProblem) -> Result<f64> {
    TParametrization::new(problem)?.residual(t)
}

fn lex_key(f: &RankOneFactorization) -> Vec<i64> {
    f.u_f64()
        .into_iter()
        .chain(f.v_f64())
        .map(|x| (x * 1e9).round() as i64)
        .collect()
}

fn family_candidates(
    red: &ReducedForm,
    target: &[Vec<f64>],
    problem: &OptimizationProblem,
) -> Result<Vec<Candidate>> {
    let land = Landscape::new(red, target, problem.sense);
    let starts = sample_reduced(red, problem.restarts.max(1), problem.seed)?;
    let tpar = (land.iso_rows.is_empty() && land.iso_cols.is_empty() && land.s() >= 2)
        .then(|| TParametrization::from_reduced(red, target, problem.sense));
    let mut out = Vec::new();
    for start in starts {
        let y0 = land.from_factorization(&start.factorization);
        let Some(mut y) = land.restore(y0) else {
            continue;
        };
        let mut gnorm = f64::INFINITY;
        let mut settled = false;
        let schedule: &[f64] = if land.bounded().is_empty() {
            &[0.0]
        } else {
            &[1e-4, 1e-6, 1e-8, 1e-10, 1e-12]
        };
        for &mu in schedule {
            (y, gnorm, settled) = land.descend(y, mu);
        }
        let (residual, parameters, converged) = match &tpar {
            Some(tp) => {
                y = land.polish(&y);
                let t: Vec<f64> = (0..tp.dimension()).map(|k| y[k] - tp.centre[k]).collect();
                let r = tp.residual(&t).unwrap_or(f64::INFINITY);
                (r, t, r < problem.tolerance)
            }
            None => (gnorm, Vec::new(), settled),
        };
        let f = land.exact_point(&y);
        if !verify_completion(&red.filled, &f, 1e-8)? {
            continue;
        }
        out.push(Candidate {
            objective: distance(&f, target),
            factorization: f,
            converged,
            residual,
            parameters,
        });
    }
    Ok(out)
}

fn point_candidates(points: Vec<RankOneFactorization>, target: &[Vec<f64>]) -> Vec<Candidate> {
    points
        .into_iter()
        .map(|f| Candidate {
            objective: distance(&f, target),
            factorization: f,
            converged: true,
            residual: 0.0,
            parameters: Vec::new(),
        })
        .collect()
}

/// Multistart search for the completion closest to (or farthest from) the target.
pub fn optimize_distance(problem: &OptimizationProblem) -> Result<OptimizationResult> {
    let target = problem.target_matrix()?;
    let desc = classify_completions(&problem.matrix)?;
    let kinds: Vec<CompletionKind> = if desc.branches.is_empty() {
        vec![desc.kind]
    } else {
        desc.branches.into_iter().map(|b| b.description).collect()
    };
    let mut all = Vec::new();
    for kind in kinds {
        match kind {
            CompletionKind::Empty => {}
            CompletionKind::Family { reduced, .. } => {
                all.extend(family_candidates(&reduced, &target, problem)?)
            }
            other => all.extend(point_candidates(other.points(), &target)),
        }
    }
    if all.is_empty() {
        return Err(Error::NoCompletions);
    }
    let mut candidates: Vec<Candidate> = Vec::new();
    for c in all {
        match candidates
            .iter_mut()
            .find(|d| d.factorization.max_entry_distance(&c.factorization) < 1e-6)
        {
            Some(d) => {
                if !d.converged && c.converged {
                    *d = c;
                }
            }
            None => candidates.push(c),
        }
    }
    let sign = if problem.sense == Sense::Min {
        1.0
    } else {
        -1.0
    };
    candidates.sort_by(|a, b| {
        b.converged
            .cmp(&a.converged)
            .then((sign * a.objective).total_cmp(&(sign * b.objective)))
            .then_with(|| lex_key(&a.factorization).cmp(&lex_key(&b.factorization)))
    });
    if !candidates[0].converged {
        return Err(Error::DidNotConverge);
    }
    // Near-ties are broken lexicographically.
    let best_obj = candidates[0].objective;
    let best = candidates
        .iter()
        .filter(|c| c.converged && (c.objective - best_obj).abs() < 1e-12)
        .min_by(|a, b| lex_key(&a.factorization).cmp(&lex_key(&b.factorization)))
        .expect("at least one converged candidate");
    Ok(OptimizationResult {
        best: best.factorization.clone(),
        objective: best.objective,
        candidates,
    })
}

impl OptimizationResult {
    pub fn converged_count(&self) -> usize {
        self.candidates.iter().filter(|c| c.converged).count()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::rat;

    fn walk_example() -> OptimizationProblem {
        OptimizationProblem::new(
            PartialMatrix::diagonal(&[rat(1, 4), rat(1, 25), rat(1, 36)]).unwrap(),
        )
    }

    #[test]
    fn minimum_distance_example() {
        let mut p = walk_example();
        p.restarts = 16;
        let r = optimize_distance(&p).unwrap();
        assert!((r.objective - 0.276).abs() < 0.005, "{}", r.objective);
        let m = r.best.matrix_f64();
        let expect = [
            [0.250, 0.049, 0.215],
            [0.204, 0.040, 0.176],
            [0.032, 0.006, 0.028],
        ];
        let close = |t: bool| {
            (0..3).all(|i| {
                (0..3).all(|j| {
                    let x = if t { m[j][i] } else { m[i][j] };
                    (x - expect[i][j]).abs() < 1.5e-3
                })
            })
        };
        assert!(close(false) || close(true), "{m:?}");
        let best = r
            .candidates
            .iter()
            .find(|c| c.factorization == r.best)
            .unwrap();
        assert!(best.residual < 1e-8);
    }

    #[test]
    fn unique_instance_scores_its_completion() {
        let m =
            PartialMatrix::diagonal(&[rat(4, 25), rat(9, 100), rat(1, 25), rat(1, 100)]).unwrap();
        let r = optimize_distance(&OptimizationProblem::new(m)).unwrap();
        assert_eq!(r.candidates.len(), 1);
        let bad = PartialMatrix::diagonal(&[rat(1, 2), rat(1, 2)]).unwrap();
        assert_eq!(
            optimize_distance(&OptimizationProblem::new(bad)).unwrap_err(),
            Error::NoCompletions
        );
    }

    #[test]
    fn gradients_match_differences() {
        let tp = TParametrization::new(&walk_example()).unwrap();
        let t = [0.03, -0.02];
        let (df, dd) = tp.gradients(&t).unwrap();
        let h = 1e-6;
        for k in 0..2 {
            let mut tp_ = t;
            let mut tm = t;
            tp_[k] += h;
            tm[k] -= h;
            let (fp, dp) = tp.values(&tp_).unwrap();
            let (fm, dm) = tp.values(&tm).unwrap();
            assert!(((fp - fm) / (2.0 * h) - df[k]).abs() <= 1e-5 * df[k].abs().max(1.0));
            assert!(((dp - dm) / (2.0 * h) - dd[k]).abs() <= 1e-5 * dd[k].abs().max(1.0));
        }
        assert!(tp.residual(&t).unwrap() > 0.0);
    }

    #[test]
    fn isolated_lines_are_handled() {
        let m = crate::model::make_partial_matrix(2, 3, [(0, 0, rat(1, 9)), (1, 1, rat(1, 16))])
            .unwrap();
        let mut p = OptimizationProblem::new(m.clone());
        p.restarts = 8;
        let lo = optimize_distance(&p).unwrap();
        p.sense = Sense::Max;
        let hi = optimize_distance(&p).unwrap();
        assert!(lo.objective <= hi.objective);
        assert!(verify_completion(&m, &lo.best, 1e-8).unwrap());
    }
}
