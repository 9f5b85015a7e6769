//! `simplexcomp` command-line tool.
//!
//! Exit codes: 0 completable (or success), 1 not completable, 2 input error.

mod instance;
mod report;

use std::cmp::Ordering;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use simplexcomp::complete::{
    classify_completions_with, complete_pair_walk, sample_family_points, CompletionKind,
};
use simplexcomp::decide::{decide_with, DecideOptions};
use simplexcomp::model::{Evidence, Verdict};
use simplexcomp::numeric::{compare_root_sum, PrecisionPolicy, Rational};
use simplexcomp::optimize::{optimize_distance, OptimizationProblem, Sense};
use simplexcomp::semialg::boundary_polynomial_with_cap;
use simplexcomp::tensor::{
    complete_diagonal_tensor, decide_diagonal_tensor_with, DiagonalTensorInstance,
};

use instance::{load_matrix, load_target, parse_list, InputError};
use report::{BranchReport, CompletionReport, EvidenceReport, Report};

#[derive(Parser)]
#[command(
    name = "simplexcomp",
    version,
    about = "Rank-one completion of partial matrices in the probability simplex"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args)]
struct Precision {
    /// Precision cap in bits for certified root comparisons.
    #[arg(long, env = "SIMPLEXCOMP_PRECISION", default_value_t = 4096)]
    precision: u32,
}

impl Precision {
    fn policy(&self) -> PrecisionPolicy {
        let start = PrecisionPolicy::default().start_bits.min(self.precision);
        PrecisionPolicy::new(start, self.precision)
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum SenseArg {
    Min,
    Max,
}

#[derive(Subcommand)]
enum Command {
    /// Decide whether a partial matrix has a rank-one simplex completion.
    Check {
        file: PathBuf,
        #[command(flatten)]
        precision: Precision,
        #[arg(long)]
        json: bool,
    },
    /// Describe the completion set and print witnesses or samples.
    Complete {
        file: PathBuf,
        /// Print every isolated completion, or the walk completions of a family.
        #[arg(long, conflicts_with = "sample")]
        all: bool,
        /// Draw this many points of a family as tab-separated rows.
        #[arg(long)]
        sample: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Tolerance used to verify printed completions.
        #[arg(long, default_value_t = 1e-9)]
        eps: f64,
        #[command(flatten)]
        precision: Precision,
        #[arg(long)]
        json: bool,
    },
    /// Find the completion closest to (or farthest from) a target matrix.
    Optimize {
        file: PathBuf,
        /// `uniform` or a JSON file holding the full target matrix.
        #[arg(long, default_value = "uniform")]
        target: String,
        #[arg(long, value_enum, default_value = "min")]
        sense: SenseArg,
        #[arg(long, default_value_t = 64)]
        restarts: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        json: bool,
    },
    /// Decide a diagonal tensor of order d.
    Tensor {
        #[arg(long)]
        order: u32,
        /// Comma-separated diagonal, e.g. `1/27,1/27,1/27`.
        #[arg(long, allow_hyphen_values = true)]
        diag: String,
        #[command(flatten)]
        precision: Precision,
        #[arg(long)]
        json: bool,
    },
    /// Print the boundary polynomial of the order-d, size-n diagonal region.
    Poly {
        #[arg(long)]
        order: u32,
        #[arg(long)]
        size: usize,
        /// Largest degree to attempt.
        #[arg(long, default_value_t = simplexcomp::semialg::DEFAULT_DEGREE_CAP)]
        cap: u64,
    },
}

/// Text for stdout plus the exit code.
type Outcome = Result<(String, u8), InputError>;

fn emit(report: &Report, json: bool) -> String {
    if json {
        report.to_json() + "\n"
    } else {
        report.to_text()
    }
}

fn code(v: Verdict) -> u8 {
    match v {
        Verdict::Completable => 0,
        Verdict::NotCompletable => 1,
    }
}

fn check(file: &Path, precision: &Precision, json: bool) -> Outcome {
    let m = load_matrix(file)?;
    let opts = DecideOptions {
        policy: precision.policy(),
        ..DecideOptions::default()
    };
    let cert = decide_with(&m, &opts);
    let mut r = Report::new(cert.verdict);
    r.evidence = Some(EvidenceReport::from_evidence(&cert.evidence));
    if let Some(f) = cert.witness() {
        r.completions
            .push(CompletionReport::matrix(f, Some((&m, 1e-9))));
    }
    Ok((emit(&r, json), code(cert.verdict)))
}

struct CompleteArgs<'a> {
    file: &'a Path,
    all: bool,
    sample: Option<usize>,
    seed: u64,
    eps: f64,
    precision: &'a Precision,
    json: bool,
}

fn complete(a: CompleteArgs<'_>) -> Outcome {
    let m = load_matrix(a.file)?;
    let desc = classify_completions_with(&m, a.precision.policy())?;
    let verdict = if matches!(desc.kind, CompletionKind::Empty) {
        Verdict::NotCompletable
    } else {
        Verdict::Completable
    };
    let mut r = Report::new(verdict);
    r.kind = Some(desc.kind.name().to_string());
    r.branches = desc
        .branches
        .iter()
        .map(BranchReport::from_branch)
        .collect();
    if let CompletionKind::Family { dimension, .. } = &desc.kind {
        r.dimension = Some(*dimension);
    }
    if verdict == Verdict::NotCompletable {
        let cert = decide_with(
            &m,
            &DecideOptions {
                policy: a.precision.policy(),
                ..DecideOptions::default()
            },
        );
        r.evidence = Some(EvidenceReport::from_evidence(&cert.evidence));
        return Ok((emit(&r, a.json), 1));
    }
    let check = Some((&m, a.eps));
    if let Some(k) = a.sample {
        let samples = sample_family_points(&m, k, a.seed)?;
        r.seed = Some(a.seed);
        if a.json {
            r.completions = samples
                .iter()
                .map(|s| CompletionReport::matrix(&s.factorization, check))
                .collect();
            return Ok((emit(&r, true), 0));
        }
        let (rows, cols) = (m.nrows(), m.ncols());
        let mut out = format!("# seed {}\nt", a.seed);
        for i in 0..rows {
            let _ = write!(out, "\tu{i}");
        }
        for j in 0..cols {
            let _ = write!(out, "\tv{j}");
        }
        out.push('\n');
        for s in &samples {
            let _ = write!(out, "{}", simplexcomp::numeric::to_f64(&s.lambda));
            for x in s
                .factorization
                .u_f64()
                .iter()
                .chain(&s.factorization.v_f64())
            {
                let _ = write!(out, "\t{x}");
            }
            out.push('\n');
        }
        return Ok((out, 0));
    }
    let mut points = match &desc.kind {
        CompletionKind::Family {
            base_point,
            reduced,
            ..
        } => {
            let mut pts = vec![base_point.clone()];
            let b = &reduced.contracted_diagonal;
            if a.all && reduced.isolated_count() == 0 && b.len() >= 2 {
                if let Ok(walk) = complete_pair_walk(&b[0], &b[1], &b[2..]) {
                    pts = walk
                        .completions
                        .iter()
                        .map(|c| reduced.expand(&c.u, &c.v, &[], &[]))
                        .collect();
                }
            }
            pts
        }
        other => other.points(),
    };
    if !a.all {
        points.truncate(1);
    }
    r.evidence = Some(EvidenceReport::Witness);
    r.completions = points
        .iter()
        .map(|f| CompletionReport::matrix(f, check))
        .collect();
    Ok((emit(&r, a.json), 0))
}

fn optimize(
    file: &Path,
    target: &str,
    sense: SenseArg,
    restarts: usize,
    seed: u64,
    json: bool,
) -> Outcome {
    let m = load_matrix(file)?;
    let mut problem = OptimizationProblem::new(m.clone());
    if target != "uniform" {
        problem.target = Some(load_target(&PathBuf::from(target), m.nrows(), m.ncols())?);
    }
    problem.sense = match sense {
        SenseArg::Min => Sense::Min,
        SenseArg::Max => Sense::Max,
    };
    problem.restarts = restarts;
    problem.seed = seed;
    match optimize_distance(&problem) {
        Ok(res) => {
            let mut r = Report::new(Verdict::Completable);
            r.evidence = Some(EvidenceReport::Witness);
            r.completions
                .push(CompletionReport::matrix(&res.best, Some((&m, 1e-8))));
            r.objective = Some(res.objective);
            r.seed = Some(seed);
            Ok((emit(&r, json), 0))
        }
        Err(simplexcomp::Error::NoCompletions) | Err(simplexcomp::Error::NotCompletable) => {
            let cert = simplexcomp::decide::decide(&m);
            let mut r = Report::new(Verdict::NotCompletable);
            r.evidence = Some(EvidenceReport::from_evidence(&cert.evidence));
            r.seed = Some(seed);
            Ok((emit(&r, json), 1))
        }
        Err(e) => Err(e.into()),
    }
}

fn tensor(order: u32, diag: &str, precision: &Precision, json: bool) -> Outcome {
    let a = parse_list(diag)?;
    let t = DiagonalTensorInstance::new(order, a.clone())?;
    let policy = precision.policy();
    let cert = decide_diagonal_tensor_with(&t, policy);
    let mut r = Report::new(cert.verdict);
    r.evidence = Some(EvidenceReport::from_evidence(&cert.evidence));
    r.boundary = Some(
        compare_root_sum(&a, order, &Rational::from_integer(1.into()), policy).ordering
            == Ordering::Equal,
    );
    match &cert.evidence {
        Evidence::TensorWitness(f) => r.completions.push(CompletionReport::tensor(f)),
        _ if cert.is_completable() => {
            if let Ok(f) = complete_diagonal_tensor(&t) {
                r.completions.push(CompletionReport::tensor(&f));
            }
        }
        _ => {}
    }
    Ok((emit(&r, json), code(cert.verdict)))
}

fn poly(order: u32, size: usize, cap: u64) -> Outcome {
    let p = boundary_polynomial_with_cap(order, size, cap)?;
    Ok((p.to_text(), 0))
}

fn run(cli: Cli) -> Outcome {
    match &cli.command {
        Command::Check {
            file,
            precision,
            json,
        } => check(file, precision, *json),
        Command::Complete {
            file,
            all,
            sample,
            seed,
            eps,
            precision,
            json,
        } => complete(CompleteArgs {
            file,
            all: *all,
            sample: *sample,
            seed: *seed,
            eps: *eps,
            precision,
            json: *json,
        }),
        Command::Optimize {
            file,
            target,
            sense,
            restarts,
            seed,
            json,
        } => optimize(file, target, *sense, *restarts, *seed, *json),
        Command::Tensor {
            order,
            diag,
            precision,
            json,
        } => tensor(*order, diag, precision, *json),
        Command::Poly { order, size, cap } => poly(*order, *size, *cap),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok((out, status)) => {
            print!("{out}");
            ExitCode::from(status)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
