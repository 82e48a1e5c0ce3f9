use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use solvrank::catalog;
use solvrank::encode::{mu_partial, EncodeError, Enumerator};
use solvrank::func::{eval, eval_deriv, FuncError, FuncExpr};
use solvrank::ivp::{
    construct_enclosure, covers_csv, example1_rhs, example1_solution, example1_t0, validate_tuples, EnclosureConfig,
    IvpError,
};
use solvrank::kw::{kw_rank_lower_bound, kw_runs, runs_csv, KWGridConfig, KwError};
use solvrank::removed::{removed_sequence, solvable_rank_capped, stages_json, cap_from_env, RemovedError};
use solvrank::rigor::{int, parse_rational, to_decimal, Rational};
use solvrank::tree::{limsup_rank, random_nonempty_tree, tree_of_rank, TreeSchema};
use solvrank::{Exec, Ordinal};

const MISMATCH: u8 = 1;
const BAD_INPUT: u8 = 2;
const UNSUPPORTED: u8 = 3;
const CAP_EXCEEDED: u8 = 4;
const STEP_FAILURE: u8 = 5;

#[derive(Parser)]
#[command(name = "solvrank", version, about = "Limsup ranks, solvable ranks and validated enclosures")]
struct Cli {
    /// Run data-parallel loops on one thread.
    #[arg(long, global = true)]
    sequential: bool,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Limsup rank of a tree schema such as "(~())".
    RankTree { schema: String },
    /// Solvable rank of a function: a JSON file, inline JSON, or a catalog name.
    RankSolvable {
        func: String,
        /// Where to write the removed-stage JSON.
        #[arg(long)]
        stages: Option<PathBuf>,
        /// Unfolding depth for tree stages in the JSON.
        #[arg(long, default_value_t = 2)]
        depth: usize,
    },
    /// Checks solvable rank = limsup rank + 1 on generated schemas.
    VerifyCorrespondence {
        /// Largest limsup rank to generate, e.g. 3 or w+2.
        #[arg(long)]
        max_rank: String,
        #[arg(long, default_value_t = 7)]
        seed: u64,
        /// Random schemas drawn in addition to one canonical tree per rank.
        #[arg(long, default_value_t = 21)]
        random: usize,
        /// Self-test: corrupt the first expectation.
        #[arg(long, hide = true)]
        inject_mismatch: bool,
    },
    /// Validated enclosure of the worked discontinuous IVP.
    SolveIvp {
        /// Only `example1` is available.
        example: String,
        /// Step size: p/q, a decimal, or 2^-k.
        #[arg(long)]
        h: String,
        #[arg(long)]
        out: PathBuf,
        /// End time (the start is fixed at -2).
        #[arg(long, default_value = "2", allow_hyphen_values = true)]
        t1: String,
        #[arg(long, default_value = "11/10")]
        inflation: String,
        /// Abort once a cover is wider than this.
        #[arg(long, default_value = "10")]
        max_width: String,
    },
    /// Grid lower bound for the Kechris-Woodin rank.
    KwEstimate {
        func: String,
        /// JSON configuration; defaults are used when omitted.
        #[arg(long)]
        config: Option<PathBuf>,
        /// Where to write the retained points CSV.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Rigorous enclosure of f(x) or f'(x).
    Eval {
        func: String,
        #[arg(long, allow_hyphen_values = true)]
        x: String,
        #[arg(long, default_value = "2^-30")]
        eps: String,
        #[arg(long)]
        deriv: bool,
    },
    /// Exact partial sum of Σ 2^{-h(i)}.
    Mu {
        /// `identity`, `halting`, or a file of naturals.
        #[arg(long)]
        enumerator: String,
        #[arg(long)]
        n: u64,
        /// Step budget for the halting enumerator.
        #[arg(long)]
        budget: Option<u64>,
    },
    /// Lists the reference catalog as JSON.
    Catalog,
}

/// A failure carrying its exit code.
struct Fail(u8, String);

type Run = Result<(), Fail>;

fn bad(msg: impl std::fmt::Display) -> Fail {
    Fail(BAD_INPUT, msg.to_string())
}

fn parse_q(s: &str, what: &str) -> Result<Rational, Fail> {
    parse_rational(s).ok_or_else(|| bad(format!("bad {what}: {s}")))
}

fn load_func(arg: &str) -> Result<FuncExpr, Fail> {
    let text = if arg.trim_start().starts_with('{') {
        arg.to_string()
    } else if Path::new(arg).is_file() {
        fs::read_to_string(arg).map_err(|e| bad(format!("{arg}: {e}")))?
    } else if let Some(entry) = catalog::lookup(arg) {
        return Ok(entry.func);
    } else {
        return Err(bad(format!("{arg}: not a file, inline JSON or catalog name")));
    };
    FuncExpr::from_json(&text).map_err(|e| bad(format!("{arg}: {e}")))
}

fn write(path: &Path, contents: &str) -> Run {
    fs::write(path, contents).map_err(|e| bad(format!("{}: {e}", path.display())))
}

fn removed_fail(e: RemovedError) -> Fail {
    match e {
        RemovedError::CapExceeded(cap) => Fail(CAP_EXCEEDED, format!("solvable rank exceeds the cap {cap}")),
        RemovedError::Func(FuncError::OutOfDomain(_) | FuncError::InvalidInterval { .. }) => bad(e),
        other => Fail(UNSUPPORTED, other.to_string()),
    }
}

fn rank_solvable(func: &str, stages: Option<&Path>, depth: usize) -> Run {
    let y = load_func(func)?;
    let rank = solvable_rank_capped(&y, &cap_from_env()).map_err(removed_fail)?;
    println!("{rank}");
    if let Some(path) = stages {
        let seq = removed_sequence(&y, &rank).map_err(removed_fail)?;
        let doc = stages_json(&rank, &seq, depth);
        write(path, &(serde_json::to_string_pretty(&doc).expect("json") + "\n"))?;
    }
    Ok(())
}

/// Canonical trees of every reachable rank up to `max`, then random ones.
fn correspondence_trees(max: &Ordinal, seed: u64, random: usize) -> Vec<TreeSchema> {
    let mut out = vec![TreeSchema::Empty];
    // reachable ranks are the successors below w^2: w·c + k with k >= 1
    let top_c = max.coefficient(1);
    let mut ranks = Vec::new();
    for c in 0..=top_c {
        for k in 1..=4u64 {
            let r = if c == 0 { Ordinal::finite(k) } else { Ordinal::from_terms(&[(1, c), (0, k)]).expect("normal form") };
            if &r <= max {
                ranks.push(r);
            }
        }
    }
    out.extend(ranks.iter().filter_map(|r| tree_of_rank(r).ok()));
    if !max.is_zero() {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut drawn = 0;
        let mut tries = 0;
        while drawn < random && tries < 100 * random.max(1) {
            tries += 1;
            let t = random_nonempty_tree(&mut rng, 4);
            if &limsup_rank(&t) <= max {
                out.push(t);
                drawn += 1;
            }
        }
    }
    out
}

fn verify_correspondence(max_rank: &str, seed: u64, random: usize, inject: bool, exec: Exec) -> Run {
    let max: Ordinal = max_rank.parse().map_err(|e| bad(format!("bad rank {max_rank}: {e}")))?;
    let trees = correspondence_trees(&max, seed, random);
    let cap = cap_from_env();
    let results = exec.map(&trees, |t| {
        let expect = limsup_rank(t).successor();
        (expect, solvable_rank_capped(&FuncExpr::cantor(t.clone()), &cap))
    });
    for (i, (t, (expect, got))) in trees.iter().zip(results).enumerate() {
        let expect = if inject && i == 0 { expect.successor() } else { expect };
        match got {
            Ok(g) if g == expect => {}
            Ok(g) => {
                return Err(Fail(MISMATCH, format!("mismatch on {t}: solvable rank {g}, expected {expect}")));
            }
            Err(e) => return Err(Fail(MISMATCH, format!("mismatch on {t}: {e}"))),
        }
    }
    println!("all {} entries pass (max rank {max}, seed {seed})", trees.len());
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn solve_ivp(example: &str, h: &str, out: &Path, t1: &str, inflation: &str, max_width: &str, exec: Exec) -> Run {
    if example != "example1" {
        return Err(bad(format!("unknown example {example}; only example1 is available")));
    }
    let mut cfg = EnclosureConfig::new(parse_q(h, "step")?);
    cfg.inflation = parse_q(inflation, "inflation")?;
    cfg.max_width = parse_q(max_width, "width bound")?;
    let t1 = parse_q(t1, "end time")?;
    let rhs = example1_rhs();
    let t0 = example1_t0();
    let y0 = example1_solution(&t0);
    let enc = construct_enclosure(&rhs, &y0, &t0, &t1, &cfg).map_err(|e| match e {
        IvpError::InvalidInput(_) => bad(e),
        other => Fail(STEP_FAILURE, other.to_string()),
    })?;
    write(out, &covers_csv(&enc.covers))?;
    // with no steps the only cover is the initial box itself
    let failure = if enc.tuples.is_empty() {
        None
    } else {
        validate_tuples(&rhs, &Ordinal::finite(2), &y0, &enc.tuples, exec).first_failure()
    };
    println!("steps: {}", enc.tuples.len());
    println!("max cover width: {}", to_decimal(&enc.max_width(), 6, false));
    println!("final cover width: {}", to_decimal(&enc.final_width(), 6, false));
    match &failure {
        None => println!("validation: all five conditions hold"),
        Some(f) => println!("validation: FAILED ({f})"),
    }
    match enc.first_miss(example1_solution) {
        None if failure.is_none() => {
            println!("containment: closed-form solution inside every cover");
            Ok(())
        }
        None => Err(Fail(MISMATCH, "tuples failed validation".into())),
        Some(i) => Err(Fail(MISMATCH, format!("containment: solution leaves the cover at t = {}", enc.covers[i].t))),
    }
}

fn kw_fail(e: KwError) -> Fail {
    match e {
        KwError::Func(FuncError::Unsupported(_) | FuncError::Unresolved(_)) => Fail(UNSUPPORTED, e.to_string()),
        other => bad(other),
    }
}

fn kw_estimate(func: &str, config: Option<&Path>, out: Option<&Path>, exec: Exec) -> Run {
    let y = load_func(func)?;
    let cfg = match config {
        Some(p) => {
            let text = fs::read_to_string(p).map_err(|e| bad(format!("{}: {e}", p.display())))?;
            KWGridConfig::from_json(&text).map_err(bad)?
        }
        None => KWGridConfig::default(),
    };
    if let Some(path) = out {
        let runs = kw_runs(&y, &cfg, exec).map_err(kw_fail)?;
        write(path, &runs_csv(&runs))?;
    }
    println!("{}", kw_rank_lower_bound(&y, &cfg, exec).map_err(kw_fail)?);
    Ok(())
}

fn eval_cmd(func: &str, x: &str, eps: &str, deriv: bool) -> Run {
    let y = load_func(func)?;
    let x = parse_q(x, "point")?;
    let eps = parse_q(eps, "tolerance")?;
    if eps <= int(0) {
        return Err(bad("tolerance must be positive"));
    }
    let r = if deriv { eval_deriv(&y, &x, &eps) } else { eval(&y, &x, &eps) }.map_err(|e| match e {
        FuncError::Unsupported(_) | FuncError::Unresolved(_) => Fail(UNSUPPORTED, e.to_string()),
        other => bad(other),
    })?;
    println!("[{}, {}]", r.lo, r.hi);
    println!("[{}, {}]", to_decimal(&r.lo, 20, true), to_decimal(&r.hi, 20, false));
    Ok(())
}

fn mu_cmd(enumerator: &str, n: u64, budget: Option<u64>) -> Run {
    let h = match Enumerator::builtin(enumerator) {
        Some(Enumerator::Halting { budget: b }) => Enumerator::Halting { budget: budget.unwrap_or(b) },
        Some(h) => h,
        None => {
            let text = fs::read_to_string(enumerator).map_err(|e| bad(format!("{enumerator}: {e}")))?;
            Enumerator::parse_table(&text).map_err(bad)?
        }
    };
    let mu = mu_partial(&h, n).map_err(|e: EncodeError| bad(e))?;
    println!("{mu}");
    println!("{}", to_decimal(&mu, 40, true));
    Ok(())
}

fn run(cli: Cli) -> Run {
    let exec = if cli.sequential { Exec::Sequential } else { Exec::Parallel };
    match cli.cmd {
        Cmd::RankTree { schema } => {
            let t: TreeSchema = schema.parse().map_err(bad)?;
            println!("{}", limsup_rank(&t));
            Ok(())
        }
        Cmd::RankSolvable { func, stages, depth } => rank_solvable(&func, stages.as_deref(), depth),
        Cmd::VerifyCorrespondence { max_rank, seed, random, inject_mismatch } => {
            verify_correspondence(&max_rank, seed, random, inject_mismatch, exec)
        }
        Cmd::SolveIvp { example, h, out, t1, inflation, max_width } => {
            solve_ivp(&example, &h, &out, &t1, &inflation, &max_width, exec)
        }
        Cmd::KwEstimate { func, config, out } => kw_estimate(&func, config.as_deref(), out.as_deref(), exec),
        Cmd::Eval { func, x, eps, deriv } => eval_cmd(&func, &x, &eps, deriv),
        Cmd::Mu { enumerator, n, budget } => mu_cmd(&enumerator, n, budget),
        Cmd::Catalog => {
            let doc = json!({ "format_version": 1, "entries": catalog::catalog() });
            println!("{}", serde_json::to_string_pretty(&doc).expect("json"));
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Fail(code, msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(code)
        }
    }
}
