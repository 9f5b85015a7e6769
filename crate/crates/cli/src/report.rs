use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use simplexcomp::complete::Branch;
use simplexcomp::model::{Evidence, PartialMatrix, RankOneFactorization, Verdict};
use simplexcomp::numeric::{to_f64, AlgebraicInterval};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum EvidenceReport {
    Witness,
    CycleViolation {
        cycle: Vec<(usize, usize)>,
        lhs: String,
        rhs: String,
    },
    ThreeLineViolation {
        positions: Vec<(usize, usize)>,
    },
    NormExcess {
        lower: String,
        upper: String,
    },
    SumNotOne {
        sum: String,
    },
    TensorWitness,
    Criterion {
        detail: String,
    },
}

impl EvidenceReport {
    pub fn from_evidence(e: &Evidence) -> Self {
        match e {
            Evidence::Witness(_) => Self::Witness,
            Evidence::CycleViolation { cycle, lhs, rhs } => Self::CycleViolation {
                cycle: cycle.edges.clone(),
                lhs: lhs.to_string(),
                rhs: rhs.to_string(),
            },
            Evidence::ThreeLineViolation(p) => Self::ThreeLineViolation {
                positions: p.to_vec(),
            },
            Evidence::NormExcess(i) => Self::NormExcess {
                lower: i.lower().to_string(),
                upper: i.upper().to_string(),
            },
            Evidence::SumNotOne(s) => Self::SumNotOne { sum: s.to_string() },
            Evidence::TensorWitness(_) => Self::TensorWitness,
            Evidence::Criterion(s) => Self::Criterion { detail: s.clone() },
        }
    }

    fn describe(&self) -> String {
        match self {
            Self::Witness => "witness".into(),
            Self::CycleViolation { cycle, lhs, rhs } => {
                format!("cycle violation on {cycle:?}: {lhs} != {rhs}")
            }
            Self::ThreeLineViolation { positions } => format!(
                "zero at {:?} with positive entries at {:?} and {:?}",
                positions[0], positions[1], positions[2]
            ),
            Self::NormExcess { lower, upper } => format!(
                "root sum in [{:.12}, {:.12}] exceeds 1",
                parse_f64(lower),
                parse_f64(upper)
            ),
            Self::SumNotOne { sum } => format!("single block sums to {sum}, not 1"),
            Self::TensorWitness => "tensor witness".into(),
            Self::Criterion { detail } => detail.clone(),
        }
    }
}

fn parse_f64(s: &str) -> f64 {
    simplexcomp::numeric::parse_rational(s)
        .map(|q| to_f64(&q))
        .unwrap_or(f64::NAN)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompletionReport {
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub u: Vec<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub v: Vec<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub matrix: Vec<Vec<String>>,
    /// One vector per mode, for tensors.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub factors: Vec<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub verified: Option<bool>,
}

impl CompletionReport {
    pub fn matrix(f: &RankOneFactorization, m: Option<(&PartialMatrix, f64)>) -> Self {
        let matrix = (0..f.nrows())
            .map(|i| (0..f.ncols()).map(|j| certified(&f.entry(i, j))).collect())
            .collect();
        Self {
            u: f.u.iter().map(certified).collect(),
            v: f.v.iter().map(certified).collect(),
            matrix,
            factors: Vec::new(),
            verified: m
                .map(|(m, eps)| simplexcomp::model::verify_completion(m, f, eps).unwrap_or(false)),
        }
    }

    pub fn tensor(factors: &[Vec<AlgebraicInterval>]) -> Self {
        Self {
            u: Vec::new(),
            v: Vec::new(),
            matrix: Vec::new(),
            factors: factors
                .iter()
                .map(|f| f.iter().map(certified).collect())
                .collect(),
            verified: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BranchReport {
    pub rows: Vec<usize>,
    pub cols: Vec<usize>,
    pub minimal: bool,
    pub kind: String,
}

impl BranchReport {
    pub fn from_branch(b: &Branch) -> Self {
        Self {
            rows: b.support.rows.iter().copied().collect(),
            cols: b.support.cols.iter().copied().collect(),
            minimal: b.minimal,
            kind: b.description.name().to_string(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub verdict: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub evidence: Option<EvidenceReport>,
    pub completions: Vec<CompletionReport>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub objective: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kind: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dimension: Option<usize>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub branches: Vec<BranchReport>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub boundary: Option<bool>,
}

impl Report {
    pub fn new(verdict: Verdict) -> Self {
        Self {
            verdict: verdict_name(verdict).into(),
            evidence: None,
            completions: Vec::new(),
            objective: None,
            seed: None,
            kind: None,
            dimension: None,
            branches: Vec::new(),
            boundary: None,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "verdict: {}", self.verdict);
        if let Some(kind) = &self.kind {
            match self.dimension {
                Some(d) => {
                    let _ = writeln!(out, "kind: {kind} (dimension {d})");
                }
                None => {
                    let _ = writeln!(out, "kind: {kind}");
                }
            }
        }
        if let Some(e) = &self.evidence {
            let _ = writeln!(out, "evidence: {}", e.describe());
        }
        if let Some(b) = self.boundary {
            let _ = writeln!(out, "boundary: {b}");
        }
        for b in &self.branches {
            let _ = writeln!(
                out,
                "branch: zero rows {:?}, zero cols {:?}{} -> {}",
                b.rows,
                b.cols,
                if b.minimal { " (minimal)" } else { "" },
                b.kind
            );
        }
        if let Some(obj) = self.objective {
            let _ = writeln!(out, "objective: {obj:.6}");
        }
        if let Some(seed) = self.seed {
            let _ = writeln!(out, "seed: {seed}");
        }
        for (k, c) in self.completions.iter().enumerate() {
            let _ = writeln!(out, "completion {}:", k + 1);
            if !c.factors.is_empty() {
                for (j, f) in c.factors.iter().enumerate() {
                    let _ = writeln!(out, "  factor {}: {}", j + 1, f.join(" "));
                }
                continue;
            }
            let _ = writeln!(out, "  u: {}", c.u.join(" "));
            let _ = writeln!(out, "  v: {}", c.v.join(" "));
            for row in &c.matrix {
                let cells: Vec<String> = row
                    .iter()
                    .map(|x| format!("{:>10.6}", parse_f64(x)))
                    .collect();
                let _ = writeln!(out, "  {}", cells.join(" "));
            }
            if let Some(ok) = c.verified {
                let _ = writeln!(out, "  verified: {ok}");
            }
        }
        out
    }
}

pub fn verdict_name(v: Verdict) -> &'static str {
    match v {
        Verdict::Completable => "completable",
        Verdict::NotCompletable => "not_completable",
    }
}

/// Short exact values as fractions; anything else as decimals cut to their
/// certified digits.
pub fn certified(x: &AlgebraicInterval) -> String {
    if let Some(q) = x.as_exact() {
        if q.denom().bits() <= 40 {
            return q.to_string();
        }
        return format!("{:.15}", to_f64(q));
    }
    let width = to_f64(&x.width());
    let digits = if width > 0.0 {
        ((-width.log10()).floor() as i64 - 1).clamp(1, 15) as usize
    } else {
        15
    };
    format!("{:.*}", digits, x.to_f64())
}

#[cfg(test)]
mod tests {
    use super::*;
    use simplexcomp::numeric::rat;

    #[test]
    fn exact_values_print_as_fractions() {
        assert_eq!(certified(&AlgebraicInterval::exact(rat(4, 25))), "4/25");
        let float_like = AlgebraicInterval::from_f64(0.1);
        assert_eq!(certified(&float_like), "0.100000000000000");
    }

    #[test]
    fn enclosures_print_certified_digits() {
        let s = certified(&AlgebraicInterval::sqrt_of(&rat(2, 1), 20));
        assert!(s.starts_with("1.414"));
        assert!(s.len() < 12);
    }

    #[test]
    fn report_round_trips() {
        let mut r = Report::new(Verdict::NotCompletable);
        r.evidence = Some(EvidenceReport::ThreeLineViolation {
            positions: vec![(0, 0), (0, 1), (1, 0)],
        });
        r.seed = Some(3);
        let back: Report = serde_json::from_str(&r.to_json()).unwrap();
        assert_eq!(back, r);
    }
}
