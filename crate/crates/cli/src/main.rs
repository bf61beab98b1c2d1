//! `chorefair`: solve, verify, generate and the counterexample walkthrough.
//!
//! Exit codes: 0 verified, 1 guarantee or verdict failure, 2 bad input.

mod io;

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use chorefair::fairness::check;
use chorefair::ido::partial_ido_2efx_traced;
use chorefair::oracles::{generate_instance, validate_oracle, Check, CheckLimits, Family};
use chorefair::rational::{format_rational, int, parse_rational};
use chorefair::round_robin::{efx_factor, round_robin_allocate};
use chorefair::tefx::{tefx_three_group_traced, GroupSpec};
use chorefair::three_agent::{three_agent_2efx_traced, Route};
use chorefair::verify::{counterexample_instance, exhaustive_search_limited, rival_counterexample_run, DEFAULT_ENUM_LIMIT};
use chorefair::{Allocation, CostOracle, Criterion, Error, Instance};
use clap::{Parser, Subcommand, ValueEnum};

use crate::io::{ReportFile, ResultFile};

#[derive(Parser)]
#[command(name = "chorefair", version, about = "Approximate-EFX and tEFX allocation of indivisible chores")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Algorithm {
    #[value(name = "three-agent-2efx")]
    ThreeAgent2efx,
    #[value(name = "partial-ido-2efx")]
    PartialIdo2efx,
    RoundRobin,
    TefxTwoGroup,
    TefxThreeGroup,
    Exhaustive,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
#[value(rename_all = "snake_case")]
enum FamilyName {
    Additive,
    AdditiveRatio,
    CappedAdditive,
    MaxOfAdditive,
    KPartialIdo,
    IdenticalGroups,
    Counterexample,
}

#[derive(clap::Args, Clone)]
struct SolveArgs {
    #[arg(long, value_enum)]
    algorithm: Algorithm,
    /// Round-robin picking order, 1-based agents (default 1,2,..,n).
    #[arg(long, value_delimiter = ',')]
    order: Option<Vec<usize>>,
    /// tEFX groups, 1-based agents.
    #[arg(long, value_delimiter = ',')]
    group1: Vec<usize>,
    #[arg(long, value_delimiter = ',')]
    group2: Vec<usize>,
    #[arg(long)]
    group3: Option<usize>,
    /// Criterion to verify against, e.g. efx, tefx, alpha_efx(5/2)
    /// (default: the algorithm's guarantee).
    #[arg(long)]
    criterion: Option<String>,
    /// Record the algorithm's trace in the result.
    #[arg(long)]
    trace: bool,
    /// Record wall-clock timings (makes output run-dependent).
    #[arg(long)]
    timings: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Run an algorithm on an instance file and verify its output.
    Solve {
        #[arg(long)]
        instance: PathBuf,
        #[arg(long)]
        output: Option<PathBuf>,
        #[command(flatten)]
        args: SolveArgs,
    },
    /// Check an allocation against a criterion; prints the report as JSON.
    Verify {
        #[arg(long)]
        instance: PathBuf,
        #[arg(long)]
        allocation: PathBuf,
        #[arg(long, default_value = "efx")]
        criterion: String,
        #[arg(long)]
        alpha: Option<String>,
    },
    /// Write a seeded instance file.
    Gen {
        #[command(flatten)]
        gen: GenArgs,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Side-by-side rival run and own algorithm on the counterexample family.
    ReproCounterexample {
        #[arg(long)]
        m1: String,
        #[arg(long)]
        m2: String,
    },
    /// Generate and solve a seed range, one result file per seed, in parallel.
    Batch {
        #[command(flatten)]
        gen: GenArgs,
        /// Inclusive-exclusive range, e.g. 0..100.
        #[arg(long)]
        seeds: String,
        #[arg(long)]
        out_dir: PathBuf,
        #[arg(long, default_value_t = 4)]
        jobs: usize,
        #[command(flatten)]
        args: SolveArgs,
    },
}

#[derive(clap::Args, Clone)]
struct GenArgs {
    #[arg(long, value_enum)]
    family: FamilyName,
    #[arg(long, default_value_t = 3)]
    n: usize,
    #[arg(long, default_value_t = 6)]
    m: usize,
    #[arg(long)]
    alpha: Option<String>,
    #[arg(long)]
    k: Option<usize>,
    #[arg(long, value_delimiter = ',')]
    groups: Vec<usize>,
    #[arg(long)]
    m1: Option<String>,
    #[arg(long)]
    m2: Option<String>,
}

/// Failure carrying its exit code.
struct Fail(u8, String);

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        let code = if matches!(e, Error::GuaranteeViolated { .. }) { 1 } else { 2 };
        Fail(code, e.to_string())
    }
}

fn input(msg: impl Into<String>) -> Fail {
    Fail(2, msg.into())
}

fn enum_limit() -> Result<u64, Fail> {
    match std::env::var("CHOREFAIR_MAX_ENUM") {
        Ok(v) => v.trim().parse().map_err(|_| input(format!("CHOREFAIR_MAX_ENUM must be a non-negative integer, got {v:?}"))),
        Err(_) => Ok(DEFAULT_ENUM_LIMIT),
    }
}

fn one_based(list: &[usize], n: usize, what: &str) -> Result<Vec<usize>, Fail> {
    list.iter()
        .map(|&a| if a >= 1 && a <= n { Ok(a - 1) } else { Err(input(format!("{what}: agent {a} out of range 1..={n}"))) })
        .collect()
}

/// Monotone and subadditive where checkable; structured oracles are both
/// by construction.
fn require_subadditive(inst: &Instance) -> Result<(), Fail> {
    for (i, o) in inst.oracles().iter().enumerate() {
        if !matches!(o, CostOracle::TabulatedMonotone { .. }) {
            continue;
        }
        let report = validate_oracle(o, &[Check::Monotone, Check::Subadditive], &CheckLimits::default())?;
        if !report.all_passed() {
            return Err(input(format!("agent {} cost function is not monotone and subadditive", i + 1)));
        }
    }
    Ok(())
}

struct Solved {
    allocation: Option<Allocation>,
    criterion: Criterion,
    /// Whether the algorithm promises the criterion on this input.
    guaranteed: bool,
    trace: Vec<String>,
}

fn solve(inst: &Instance, args: &SolveArgs) -> Result<Solved, Fail> {
    let n = inst.n();
    let mut trace = Vec::new();
    let (allocation, criterion, guaranteed) = match args.algorithm {
        Algorithm::ThreeAgent2efx => {
            require_subadditive(inst)?;
            let run = three_agent_2efx_traced(inst)?;
            trace.push(format!("route: {}", match &run.route {
                Route::Exhaustive => "exhaustive (m <= 5)".to_string(),
                Route::Direct => "case construction".to_string(),
                Route::Perturbed { reason } => format!("perturbed instance after: {reason}"),
                Route::ExhaustiveFallback { reason } => format!("exhaustive fallback after: {reason}"),
            }));
            if let Some(o) = &run.outcome {
                let roles: Vec<String> = o.context.roles.0.iter().map(|a| (a + 1).to_string()).collect();
                trace.push(format!("case {} with roles ({})", o.case, roles.join(",")));
                trace.extend(o.branches.iter().cloned());
                trace.extend(o.certificates.iter().map(|c| format!("certificate: {c}")));
            }
            if let Some(e) = &run.extension {
                trace.extend(e.render().lines().map(str::to_string));
            }
            (Some(run.allocation), Criterion::AlphaEfx(int(2)), true)
        }
        Algorithm::PartialIdo2efx => {
            require_subadditive(inst)?;
            let out = partial_ido_2efx_traced(inst)?;
            trace.push(format!("seed {}", out.seed));
            trace.extend(out.extension.render().lines().map(str::to_string));
            (Some(out.extension.allocation), Criterion::AlphaEfx(int(2)), true)
        }
        Algorithm::RoundRobin => {
            let order = match &args.order {
                Some(o) => one_based(o, n, "--order")?,
                None => (0..n).collect(),
            };
            if let Some(i) = inst.oracles().iter().position(|o| !o.is_additive()) {
                return Err(input(format!("round-robin needs additive costs; agent {} is not additive", i + 1)));
            }
            let (x, rr) = round_robin_allocate(inst, &order)?;
            trace.extend(rr.picks.iter().map(|p| format!("round {}: agent {} picks c{}", p.round + 1, p.agent + 1, p.chore + 1)));
            let ratio = inst.oracles().iter().map(|o| o.ratio_bound()).collect::<Result<Vec<_>, _>>()?.into_iter().max().expect("n >= 1");
            if ratio <= int(2) {
                (Some(x), Criterion::Tefx, rr.in_guarantee_scope())
            } else {
                match efx_factor(&ratio, inst.m(), n) {
                    Some(f) => (Some(x), Criterion::AlphaEfx(f), rr.in_guarantee_scope()),
                    None => (Some(x), Criterion::efx(), false),
                }
            }
        }
        Algorithm::TefxTwoGroup | Algorithm::TefxThreeGroup => {
            if args.algorithm == Algorithm::TefxTwoGroup && args.group3.is_some() {
                return Err(input("tefx-two-group takes --group1 and --group2 only"));
            }
            let groups = GroupSpec {
                group1: one_based(&args.group1, n, "--group1")?,
                group2: one_based(&args.group2, n, "--group2")?,
                group3: args.group3.map(|a| one_based(&[a], n, "--group3")).transpose()?.map(|v| v[0]),
            };
            let run = tefx_three_group_traced(inst, &groups)?;
            trace.push(format!("positions ({})", run.positions.iter().map(|b| b.to_string()).collect::<Vec<_>>().join(",")));
            for (k, phi, swapped) in &run.trace.levels {
                trace.push(format!("level k={k}: potential {phi}, feasible position {} moved to {}", swapped + 1, n - k + 1));
            }
            for mv in &run.trace.moves {
                trace.push(format!(
                    "k={}: c{} from position {} to {}, potential {} -> {}",
                    mv.k,
                    mv.chore + 1,
                    mv.from + 1,
                    mv.to + 1,
                    mv.phi_before,
                    mv.phi_after
                ));
            }
            if let Some(p) = run.group3_pick {
                trace.push(format!("group 3 takes position {}", p + 1));
            }
            (Some(run.allocation), Criterion::Tefx, true)
        }
        Algorithm::Exhaustive => {
            let c = io::parse_criterion(args.criterion.as_deref().unwrap_or("efx"), None)?;
            let x = exhaustive_search_limited(inst, &c, enum_limit()?)?;
            if x.is_none() {
                trace.push(format!("no allocation satisfies {c}"));
            }
            (x, c, false)
        }
    };
    let criterion = match &args.criterion {
        Some(c) if args.algorithm != Algorithm::Exhaustive => io::parse_criterion(c, None)?,
        _ => criterion,
    };
    Ok(Solved { allocation, criterion, guaranteed, trace })
}

/// Builds the result file; the exit code is 1 when the checked criterion
/// fails and was promised (or explicitly requested).
fn result_for(inst: &Instance, args: &SolveArgs, seed: Option<u64>) -> Result<(ResultFile, u8), Fail> {
    let start = Instant::now();
    let solved = solve(inst, args)?;
    let solve_ms = start.elapsed().as_secs_f64() * 1e3;
    let start = Instant::now();
    let (allocation, pool, report) = match &solved.allocation {
        Some(x) => {
            let r = check(x, inst, &solved.criterion)?;
            (Some(x.to_one_based()), x.pool().to_one_based(), ReportFile::from(&r))
        }
        None => (None, inst.all_chores().to_one_based(), ReportFile { criterion: solved.criterion.to_string(), verdict: false, witnesses: vec![] }),
    };
    let verify_ms = start.elapsed().as_secs_f64() * 1e3;
    let failing = !report.verdict && (solved.guaranteed || args.criterion.is_some() || solved.allocation.is_none());
    let file = ResultFile {
        algorithm: args.algorithm.to_possible_value().expect("named").get_name().to_string(),
        seed,
        allocation,
        pool,
        criterion: report.criterion,
        verdict: report.verdict,
        witnesses: report.witnesses,
        trace: args.trace.then_some(solved.trace),
        timings: args.timings.then(|| BTreeMap::from([("solve_ms".to_string(), solve_ms), ("verify_ms".to_string(), verify_ms)])),
    };
    Ok((file, if failing { 1 } else { 0 }))
}

fn emit(path: Option<&Path>, text: &str) -> Result<(), Fail> {
    match path {
        Some(p) => io::write_atomic(p, text).map_err(|e| input(format!("{}: {e}", p.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn q(s: &str, what: &str) -> Result<chorefair::Rational, Fail> {
    parse_rational(s).map_err(|e| input(format!("{what}: {e}")))
}

fn generate(g: &GenArgs, seed: Option<u64>) -> Result<Instance, Fail> {
    let family = match g.family {
        FamilyName::Counterexample => {
            let (m1, m2) = (g.m1.as_deref().ok_or_else(|| input("counterexample needs --m1"))?, g.m2.as_deref().ok_or_else(|| input("counterexample needs --m2"))?);
            return Ok(counterexample_instance(q(m1, "--m1")?, q(m2, "--m2")?)?);
        }
        FamilyName::Additive => Family::Additive,
        FamilyName::AdditiveRatio => Family::AdditiveRatio(q(g.alpha.as_deref().ok_or_else(|| input("additive_ratio needs --alpha"))?, "--alpha")?),
        FamilyName::CappedAdditive => Family::CappedAdditive,
        FamilyName::MaxOfAdditive => Family::MaxOfAdditive,
        FamilyName::KPartialIdo => Family::KPartialIdo(g.k.unwrap_or(g.n.saturating_sub(1).max(1))),
        FamilyName::IdenticalGroups => Family::IdenticalGroups(if g.groups.is_empty() { vec![g.n] } else { g.groups.clone() }),
    };
    let seed = seed.ok_or_else(|| input("--seed is required for random families"))?;
    Ok(generate_instance(&family, g.n, g.m, seed)?)
}

fn parse_seeds(s: &str) -> Result<std::ops::Range<u64>, Fail> {
    let bad = || input(format!("--seeds must look like 0..100, got {s:?}"));
    let (a, b) = s.split_once("..").ok_or_else(bad)?;
    Ok(a.trim().parse().map_err(|_| bad())?..b.trim().parse().map_err(|_| bad())?)
}

fn run(cli: Cli) -> Result<u8, Fail> {
    match cli.command {
        Command::Solve { instance, output, args } => {
            let inst = io::read_instance(&instance)?;
            let (file, code) = result_for(&inst, &args, None)?;
            emit(output.as_deref(), &io::to_json(&file))?;
            Ok(code)
        }
        Command::Verify { instance, allocation, criterion, alpha } => {
            let inst = io::read_instance(&instance)?;
            let text = std::fs::read_to_string(&allocation).map_err(|e| input(format!("{}: {e}", allocation.display())))?;
            let x = io::parse_allocation(&text, inst.m())?;
            if x.n() != inst.n() {
                return Err(input(format!("allocation has {} bundles for {} agents", x.n(), inst.n())));
            }
            let c = io::parse_criterion(&criterion, alpha.as_deref())?;
            let report = check(&x, &inst, &c)?;
            print!("{}", io::to_json(&ReportFile::from(&report)));
            Ok(if report.verdict { 0 } else { 1 })
        }
        Command::Gen { gen, seed, output } => {
            let inst = generate(&gen, seed)?;
            emit(output.as_deref(), &io::to_json(&io::InstanceFile::from_instance(&inst)))?;
            Ok(0)
        }
        Command::ReproCounterexample { m1, m2 } => {
            let (m1, m2) = (q(&m1, "--m1")?, q(&m2, "--m2")?);
            let rival = rival_counterexample_run(m1, m2)?;
            let own = three_agent_2efx_traced(&rival.instance)?;
            let two = int(2);
            let own2 = check(&own.allocation, &rival.instance, &Criterion::AlphaEfx(two.clone()))?;
            let own1 = check(&own.allocation, &rival.instance, &Criterion::efx())?;
            let rival2 = check(rival.allocation(), &rival.instance, &Criterion::AlphaEfx(two.clone()))?;
            println!("rival procedure");
            println!("  seed {}", rival.seed);
            println!("  placement order {}", rival.order.iter().map(|c| format!("c{}", c + 1)).collect::<Vec<_>>().join(" "));
            for (t, g) in rival.graphs.iter().enumerate() {
                println!("  graph {}: {g}", t + 1);
            }
            println!("  allocation {}", rival.allocation());
            println!("  ratio {}", format_rational(&rival.ratio));
            println!("  2-EFX {}{}", rival2.verdict, rival2.witnesses.first().map(|w| format!(", witness {w}")).unwrap_or_default());
            println!("own algorithm");
            if let Some(o) = &own.outcome {
                println!("  case {}", o.case);
            }
            println!("  allocation {}", own.allocation);
            println!("  EFX {}", own1.verdict);
            println!("  2-EFX {}", own2.verdict);
            Ok(if rival.ratio > two && own2.verdict { 0 } else { 1 })
        }
        Command::Batch { gen, seeds, out_dir, jobs, args } => {
            let seeds: Vec<u64> = parse_seeds(&seeds)?.collect();
            std::fs::create_dir_all(&out_dir).map_err(|e| input(format!("{}: {e}", out_dir.display())))?;
            let jobs = jobs.max(1);
            let codes: Vec<Result<u8, Fail>> = std::thread::scope(|s| {
                let handles: Vec<_> = (0..jobs)
                    .map(|w| {
                        let (seeds, gen, args, out_dir) = (&seeds, &gen, &args, &out_dir);
                        s.spawn(move || {
                            seeds
                                .iter()
                                .skip(w)
                                .step_by(jobs)
                                .map(|&seed| {
                                    let inst = generate(gen, Some(seed))?;
                                    let (file, code) = result_for(&inst, args, Some(seed))?;
                                    let path = out_dir.join(format!("seed-{seed}.json"));
                                    io::write_atomic(&path, &io::to_json(&file)).map_err(|e| input(format!("{}: {e}", path.display())))?;
                                    Ok(code)
                                })
                                .collect::<Vec<_>>()
                        })
                    })
                    .collect();
                handles.into_iter().flat_map(|h| h.join().expect("worker panicked")).collect()
            });
            let mut worst = 0;
            for c in codes {
                match c {
                    Ok(code) => worst = worst.max(code),
                    Err(Fail(code, msg)) => {
                        eprintln!("error: {msg}");
                        worst = worst.max(code);
                    }
                }
            }
            Ok(worst)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(Fail(code, msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(code)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use clap::CommandFactory;

    #[test]
    fn argument_definitions_are_consistent() {
        Cli::command().debug_assert();
    }

    #[test]
    fn seed_ranges() {
        assert_eq!(parse_seeds("3..7").ok(), Some(3..7));
        assert!(parse_seeds("3-7").is_err());
        assert!(parse_seeds("a..7").is_err());
    }
}
