use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use parapres_core::harness::{self, CandidateFamily, MinerConfig, VerifyBudget, VerifyConfig};
use parapres_core::io::{self, Header};
use parapres_core::operator::{self, DEFAULT_ENUMERATION_BUDGET};
use parapres_core::preserver::{self, ClassifyBudget};
use parapres_core::{with_scalar, Error, Field, Magnitude, Mode, PNorm, Scalar, ScalarConfig};

const FORMATS: &str = "\
Input files (indices are 0-based, operators vectorize column-major):
  vector          {\"field\": \"real\", \"data\": [0, 1]}
  operator        {\"m\": 2, \"n\": 1, \"p\": 1, \"field\": \"real\", \"data\": [[0], [1]]}
  super-operator  {\"m\": 2, \"n\": 1, \"p\": 1, \"field\": \"real\", \"vec\": \"col-major\",
                   \"matrix\": [[-3, 1], [0, 0]]}
Exact reals are integers, decimals or \"p/q\" strings; complex entries are
[re, im]. \"field\", \"mode\" and \"p\" may be omitted; values given both on the
command line and in a file must agree.

Exit status: 0 positive verdict, 1 negative verdict (witness in the report),
2 usage or input error (one line on stderr). The seed defaults to 0x5EED and
may be set through PARAPRES_SEED; --seed wins over the environment.";

#[derive(Parser, Debug)]
#[command(name = "parapres", version, about = "Parallel and TEA pairs of operators on l1 / l-infinity, and their preservers", after_help = FORMATS)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Scalar field: real or complex.
    #[arg(long, global = true)]
    field: Option<Field>,
    /// Arithmetic: exact (rationals, real only) or float.
    #[arg(long, global = true)]
    mode: Option<Mode>,
    /// Exponent: 1 or inf.
    #[arg(long, global = true)]
    p: Option<PNorm>,
    /// Relative norm tolerance (float mode).
    #[arg(long, global = true)]
    norm_tol: Option<f64>,
    /// Angular phase tolerance in radians (float mode).
    #[arg(long, global = true)]
    phase_tol: Option<f64>,
    /// Random seed, decimal or 0x-prefixed hex.
    #[arg(long, global = true, env = "PARAPRES_SEED", default_value = "0x5EED", value_parser = parse_seed)]
    seed: u64,
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    jobs: Option<usize>,
    /// Write the JSON report here instead of standard output.
    #[arg(long, short = 'o', global = true)]
    output: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Norm of a vector or operator.
    Norm { input: PathBuf },
    /// Are two vectors or operators parallel?
    CheckParallel { a: PathBuf, b: PathBuf },
    /// Do two vectors or operators attain the triangle equality?
    CheckTea { a: PathBuf, b: PathBuf },
    /// Is the input an extreme point of its unit ball?
    CheckExtreme { input: PathBuf },
    /// Is the input a smooth point?
    CheckSmooth { input: PathBuf },
    /// List every extreme contraction of the real m x n operators.
    EnumerateExtremes {
        #[arg(long)]
        m: usize,
        #[arg(long)]
        n: usize,
        /// Refuse to produce more than this many operators.
        #[arg(long, default_value_t = DEFAULT_ENUMERATION_BUDGET)]
        budget: usize,
    },
    /// Rank, preservation and isometry verdicts for a super-operator.
    Classify {
        map: PathBuf,
        #[command(flatten)]
        budget: SampleArgs,
    },
    /// Classify random candidate maps and flag any inconsistency.
    Mine {
        #[arg(long, default_value_t = 2)]
        m: usize,
        #[arg(long, default_value_t = 2)]
        n: usize,
        /// random-dense, random-rank1 or isometry-perturbation.
        #[arg(long, default_value = "random-dense")]
        family: CandidateFamily,
        /// Perturbation size for isometry-perturbation.
        #[arg(long, default_value_t = 0.0)]
        epsilon: f64,
        #[arg(long, default_value_t = 100)]
        candidates: usize,
        #[command(flatten)]
        budget: SampleArgs,
    },
    /// Run the ten-item verification battery.
    VerifyTheorem {
        #[arg(long, default_value_t = 2)]
        m: usize,
        #[arg(long, default_value_t = 2)]
        n: usize,
        /// Comma-separated item numbers to run (default: all).
        #[arg(long, value_delimiter = ',')]
        items: Option<Vec<usize>>,
        #[command(flatten)]
        budget: VerifyArgs,
    },
    /// Reproduce the rank-one map T(a,b) = (-3a+b)(1,0).
    PaperExample {
        /// Random pairs for the parallel-preservation sample.
        #[arg(long, default_value_t = 1_000)]
        trials: usize,
    },
}

#[derive(Args, Debug)]
struct SampleArgs {
    /// Random pairs per preservation check.
    #[arg(long, default_value_t = harness::DEFAULT_TRIALS)]
    trials: usize,
    /// Random operators for the isometry check.
    #[arg(long, default_value_t = 1_000)]
    isometry_samples: usize,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    #[arg(long, default_value_t = harness::DEFAULT_TRIALS)]
    trials: usize,
    #[arg(long, default_value_t = 1_000)]
    isometry_samples: usize,
    #[arg(long, default_value_t = harness::DEFAULT_SPAN_BUDGET)]
    span_budget: usize,
    #[arg(long, default_value_t = 1_000)]
    oracle_pairs: usize,
    #[arg(long, default_value_t = 10_000)]
    grid_points: usize,
    #[arg(long, default_value_t = 20)]
    isometries: usize,
    #[arg(long, default_value_t = 50)]
    rank_one: usize,
    #[arg(long, default_value_t = 100)]
    candidates: usize,
    #[arg(long, default_value_t = 100)]
    span_pairs: usize,
}

fn parse_seed(s: &str) -> Result<u64, String> {
    let t = s.trim();
    let parsed = match t.strip_prefix("0x").or_else(|| t.strip_prefix("0X")) {
        Some(hex) => u64::from_str_radix(hex, 16),
        None => t.parse(),
    };
    parsed.map_err(|e| format!("invalid seed {s:?}: {e}"))
}

/// Failure modes of a run: a usage/input error (exit 2).
struct Fatal(String);

impl From<Error> for Fatal {
    fn from(e: Error) -> Self {
        Fatal(e.to_string())
    }
}

type Run<T> = Result<T, Fatal>;

struct Doc {
    path: String,
    value: Value,
    header: Header,
}

fn load(path: &Path) -> Run<Doc> {
    let text = std::fs::read_to_string(path).map_err(|e| Fatal(format!("cannot read {}: {e}", path.display())))?;
    let value = io::parse_document(&text).map_err(|e| Fatal(format!("{}: {e}", path.display())))?;
    let header = io::header(&value).map_err(|e| Fatal(format!("{}: {e}", path.display())))?;
    Ok(Doc { path: path.display().to_string(), value, header })
}

struct Ctx {
    cli_header: Header,
    norm_tol: Option<f64>,
    phase_tol: Option<f64>,
    seed: u64,
}

impl Ctx {
    fn resolve(&self, docs: &[&Doc]) -> Run<(ScalarConfig, PNorm)> {
        let mut h = self.cli_header;
        for d in docs {
            h = h.merge(d.header).map_err(|e| Fatal(format!("{}: {e}", d.path)))?;
        }
        Ok((h.config(self.norm_tol, self.phase_tol)?, h.p_or_default()))
    }

    fn report(&self, command: &str, cfg: &ScalarConfig, p: PNorm, inputs: &[&Doc], result: Value) -> Value {
        json!({
            "command": command,
            "version": harness::VERSION,
            "config": {
                "field": cfg.field,
                "mode": cfg.mode,
                "norm_tol": cfg.norm_tol,
                "phase_tol": cfg.phase_tol,
                "p": p,
            },
            "seed": self.seed,
            "inputs": inputs.iter().map(|d| d.path.clone()).collect::<Vec<_>>(),
            "result": result,
        })
    }
}

fn check_kinds(a: &Doc, b: &Doc) -> Run<bool> {
    let (oa, ob) = (io::is_operator(&a.value), io::is_operator(&b.value));
    if oa != ob {
        return Err(Fatal(format!("{} and {} are not both vectors or both operators", a.path, b.path)));
    }
    Ok(oa)
}

/// Returns the report and whether the verdict is positive.
fn pair_check(ctx: &Ctx, a: &Doc, b: &Doc, tea: bool) -> Run<(Value, bool)> {
    let (cfg, p) = ctx.resolve(&[a, b])?;
    let command = if tea { "check-tea" } else { "check-parallel" };
    let (result, holds) = if check_kinds(a, b)? {
        with_scalar!(cfg, S => {
            let x = io::operator_from_json::<S>(&a.value, p, cfg)?;
            let y = io::operator_from_json::<S>(&b.value, p, cfg)?;
            let verdict = if tea { x.tea(&y)? } else { x.parallel(&y)? };
            let phases = x.feasible_phases(&y)?;
            let mut r = verdict.to_json();
            r["kind"] = json!("operator");
            r["feasible"] = phases.to_json();
            (r, verdict.holds)
        })
    } else {
        with_scalar!(cfg, S => {
            let x = io::vector_from_json::<S>(&a.value, cfg)?;
            let y = io::vector_from_json::<S>(&b.value, cfg)?;
            let phases = x.feasible_phases(&y, p)?;
            let holds = if tea { phases.contains_one(&cfg) } else { !phases.is_empty() };
            let r = json!({
                "kind": "vector",
                "holds": holds,
                "phases": phases.to_json(),
                "representative": phases.representative().map(|r: S| r.phase_json()),
            });
            (r, holds)
        })
    };
    Ok((ctx.report(command, &cfg, p, &[a, b], result), holds))
}

fn single_check(ctx: &Ctx, doc: &Doc, smooth: bool) -> Run<(Value, bool)> {
    let (cfg, p) = ctx.resolve(&[doc])?;
    let command = if smooth { "check-smooth" } else { "check-extreme" };
    let holds = if io::is_operator(&doc.value) {
        with_scalar!(cfg, S => {
            let a = io::operator_from_json::<S>(&doc.value, p, cfg)?;
            if smooth { a.is_smooth()? } else { a.is_extreme_contraction() }
        })
    } else {
        with_scalar!(cfg, S => {
            let x = io::vector_from_json::<S>(&doc.value, cfg)?;
            if smooth { x.is_smooth(p)? } else { x.is_extreme(p) }
        })
    };
    let key = if smooth { "smooth" } else { "extreme" };
    Ok((ctx.report(command, &cfg, p, &[doc], json!({ key: holds, "holds": holds })), holds))
}

fn norm(ctx: &Ctx, doc: &Doc) -> Run<Value> {
    let (cfg, p) = ctx.resolve(&[doc])?;
    let value = if io::is_operator(&doc.value) {
        with_scalar!(cfg, S => io::operator_from_json::<S>(&doc.value, p, cfg)?.norm().mag_json())
    } else {
        with_scalar!(cfg, S => io::vector_from_json::<S>(&doc.value, cfg)?.norm(p).mag_json())
    };
    Ok(ctx.report("norm", &cfg, p, &[doc], json!({ "norm": value })))
}

fn run(cli: Cli) -> Run<(Value, bool)> {
    if let Some(j) = cli.jobs {
        rayon::ThreadPoolBuilder::new()
            .num_threads(j)
            .build_global()
            .map_err(|e| Fatal(format!("cannot start {j} workers: {e}")))?;
    }
    let ctx = Ctx {
        cli_header: Header { field: cli.field, mode: cli.mode, p: cli.p },
        norm_tol: cli.norm_tol,
        phase_tol: cli.phase_tol,
        seed: cli.seed,
    };
    // Reject contradictory flags even for subcommands with a fixed configuration.
    ctx.resolve(&[])?;
    let seed = cli.seed;
    match cli.command {
        Command::Norm { input } => Ok((norm(&ctx, &load(&input)?)?, true)),
        Command::CheckParallel { a, b } => pair_check(&ctx, &load(&a)?, &load(&b)?, false),
        Command::CheckTea { a, b } => pair_check(&ctx, &load(&a)?, &load(&b)?, true),
        Command::CheckExtreme { input } => single_check(&ctx, &load(&input)?, false),
        Command::CheckSmooth { input } => single_check(&ctx, &load(&input)?, true),
        Command::EnumerateExtremes { m, n, budget } => {
            let (cfg, p) = ctx.resolve(&[])?;
            if cfg.field != Field::Real {
                return Err(Fatal("enumerate-extremes needs the real field".into()));
            }
            let list: Vec<Value> = with_scalar!(cfg, S => {
                operator::enumerate_extreme_contractions::<S>(m, n, p, cfg, budget)?
                    .iter()
                    .map(|s| s.to_json()["data"].clone())
                    .collect()
            });
            let result = json!({"m": m, "n": n, "count": list.len(), "expected": operator::extreme_contraction_count(m, n), "operators": list});
            Ok((ctx.report("enumerate-extremes", &cfg, p, &[], result), true))
        }
        Command::Classify { map, budget } => {
            let doc = load(&map)?;
            let (cfg, p) = ctx.resolve(&[&doc])?;
            let b = ClassifyBudget { trials: budget.trials, isometry_samples: budget.isometry_samples };
            let record = with_scalar!(cfg, S => {
                let t = io::map_from_json::<S>(&doc.value, p, cfg)?;
                preserver::classify(&t, b, seed)?.to_json()
            });
            let ok = record["theorem_consistent"].as_bool() == Some(true);
            Ok((ctx.report("classify", &cfg, p, &[&doc], record), ok))
        }
        Command::Mine { m, n, family, epsilon, candidates, budget } => {
            let (cfg, p) = ctx.resolve(&[])?;
            let family = match family {
                CandidateFamily::IsometryPerturbation(_) => CandidateFamily::IsometryPerturbation(epsilon),
                other => other,
            };
            let mc = MinerConfig {
                m,
                n,
                p,
                scalar: cfg,
                candidates,
                family,
                budget: ClassifyBudget { trials: budget.trials, isometry_samples: budget.isometry_samples },
                seed,
            };
            let (report, ok) = with_scalar!(cfg, S => {
                let r = harness::mine::<S>(&mc)?;
                (r.to_json(), r.summary.inconsistent == 0)
            });
            Ok((ctx.report("mine", &cfg, p, &[], report), ok))
        }
        Command::VerifyTheorem { m, n, items, budget } => {
            let (cfg, p) = ctx.resolve(&[])?;
            let mut vc = VerifyConfig::new(m, n, p, cfg, seed);
            vc.items = items;
            vc.budget = VerifyBudget {
                trials: budget.trials,
                isometry_samples: budget.isometry_samples,
                span_budget: budget.span_budget,
                oracle_pairs: budget.oracle_pairs,
                grid_points: budget.grid_points,
                isometries: budget.isometries,
                rank_one: budget.rank_one,
                candidates: budget.candidates,
                span_pairs: budget.span_pairs,
            };
            let report = harness::verify_theorem(&vc)?;
            Ok((ctx.report("verify-theorem", &cfg, p, &[], report.to_json()), report.passed))
        }
        Command::PaperExample { trials } => {
            let ex = harness::paper_example_rank1(trials, seed)?;
            let cfg = ScalarConfig::exact();
            Ok((ctx.report("paper-example", &cfg, PNorm::One, &[], ex.to_json()), ex.matches()))
        }
    }
}

fn one_line(s: &str) -> String {
    s.split_whitespace().collect::<Vec<_>>().join(" ")
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                print!("{e}");
                return ExitCode::SUCCESS;
            }
            let text = e.to_string();
            let head: Vec<&str> = text
                .lines()
                .take_while(|l| !l.starts_with("Usage:") && !l.starts_with("For more information"))
                .collect();
            eprintln!("{}", one_line(&head.join(" ")));
            return ExitCode::from(2);
        }
    };
    let output = cli.output.clone();
    match run(cli) {
        Ok((report, positive)) => {
            let text = serde_json::to_string_pretty(&report).expect("report serializes") + "\n";
            match output {
                Some(path) => {
                    if let Err(e) = std::fs::write(&path, text) {
                        eprintln!("cannot write {}: {}", path.display(), one_line(&e.to_string()));
                        return ExitCode::from(2);
                    }
                }
                None => print!("{text}"),
            }
            if positive {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(Fatal(msg)) => {
            eprintln!("error: {}", one_line(&msg));
            ExitCode::from(2)
        }
    }
}
