//! `coweak`: decides strong, weak, delay, and custom pattern-based
//! equivalences on weighted and Segala transition systems.
//!
//! Exit codes: 0 = property holds / result computed; 1 = property fails
//! (witness in the report); 2 = input or validation error; 3 = inexact or
//! partial result refused.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use coweak::formats::{parse_partition, parse_segala_system, parse_weighted_system, pattern_for};
use coweak::process::elaborate_process_file;
use coweak::report::{
    class_names, exit_code, table_entries, MetaDoc, Report, SegalaWitnessDoc, WitnessDoc,
};
use coweak_core::bisim::{check_bisimulation, largest_bisimulation, CompareScope, InexactSolve};
use coweak_core::fixpoint::{path_oracle, saturate, Oplus, SolveOptions, Strategy, Target};
use coweak_core::pattern::PatternAutomaton;
use coweak_core::segala::{check_segala_equivalence, check_weak_prob_bisim, SegalaVerdict};
use coweak_core::system::{Partition, WeightedSystem};
use coweak_core::transform::{check_saturation_reduction, check_semi_strong, TransformError};

#[derive(Parser)]
#[command(
    name = "coweak",
    about = "Pattern-based bisimulation checking for weighted transition systems",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum OplusArg {
    Join,
    Sum,
}

impl From<OplusArg> for Oplus {
    fn from(o: OplusArg) -> Oplus {
        match o {
            OplusArg::Join => Oplus::Join,
            OplusArg::Sum => Oplus::Sum,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum StrategyArg {
    Auto,
    Iterate,
    Exact,
}

impl From<StrategyArg> for Strategy {
    fn from(s: StrategyArg) -> Strategy {
        match s {
            StrategyArg::Auto => Strategy::Auto,
            StrategyArg::Iterate => Strategy::Iterate,
            StrategyArg::Exact => Strategy::ExactLinear,
        }
    }
}

#[derive(Args)]
struct CommonArgs {
    /// Transition system: .wts text or .proc process terms
    #[arg(long)]
    system: PathBuf,
    /// Built-in pattern name (strong|weak|delay) or a pattern JSON path
    #[arg(long, default_value = "weak")]
    pattern: String,
    /// Continuous operation combining base case and extension
    #[arg(long, value_enum, default_value = "join")]
    oplus: OplusArg,
    /// Solver selection
    #[arg(long, value_enum, default_value = "auto")]
    strategy: StrategyArg,
    /// Iteration budget for the Kleene solver
    #[arg(long, default_value_t = 10_000)]
    max_iter: usize,
    /// Quiet window before still-growing natural entries widen to infinity
    /// (defaults to the unknown count)
    #[arg(long)]
    widen_after: Option<usize>,
    /// Compare behaviour only at the named observables, not the full
    /// derivative closure
    #[arg(long)]
    observables_only: bool,
    /// Emit compact JSON (the default; kept for explicitness)
    #[arg(long, conflicts_with = "pretty")]
    json: bool,
    /// Pretty-print the JSON report
    #[arg(long)]
    pretty: bool,
    /// Write the report to a file instead of stdout
    #[arg(long)]
    output: Option<PathBuf>,
}

impl CommonArgs {
    fn options(&self) -> SolveOptions {
        SolveOptions {
            strategy: self.strategy.into(),
            max_iter: self.max_iter,
            widen_after: self.widen_after,
        }
    }

    fn scope(&self) -> CompareScope {
        if self.observables_only {
            CompareScope::ObservablesOnly
        } else {
            CompareScope::ReachableClosure
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Check whether a partition is a pattern bisimulation
    Check {
        #[command(flatten)]
        common: CommonArgs,
        /// Partition JSON ({"blocks": [["x"], ["y"]]})
        #[arg(long)]
        partition: PathBuf,
    },
    /// Compute the largest pattern bisimulation by refinement
    Largest {
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Solve the behaviour map with the identity target (the saturated
    /// system)
    Saturate {
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Depth-truncated prefix-minimal path sums (the reference lower bound)
    Oracle {
        #[command(flatten)]
        common: CommonArgs,
        /// Optional partition; defaults to one class per state
        #[arg(long)]
        partition: Option<PathBuf>,
        #[arg(long, default_value_t = 30)]
        depth: usize,
    },
    /// Validate a reduction theorem instance (saturation or continuation)
    Compare {
        #[command(flatten)]
        common: CommonArgs,
        #[arg(long)]
        partition: PathBuf,
        #[arg(long, value_enum)]
        mode: CompareMode,
    },
    /// Weak probabilistic bisimulation on a Segala system
    Segala {
        /// Segala system in the sstep dialect
        #[arg(long)]
        system: PathBuf,
        #[arg(long)]
        partition: PathBuf,
        /// Iteration cap for the weak transition sets
        #[arg(long, default_value_t = 64)]
        cap: usize,
        #[arg(long, value_enum, default_value = "weak")]
        mode: SegalaMode,
        /// Emit compact JSON (the default; kept for explicitness)
        #[arg(long, conflicts_with = "pretty")]
        json: bool,
        #[arg(long)]
        pretty: bool,
        /// Write the report to a file instead of stdout
        #[arg(long)]
        output: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum CompareMode {
    Red,
    Semistrong,
}

#[derive(Clone, Copy, ValueEnum)]
enum SegalaMode {
    /// Verdict for the given partition
    Weak,
    /// Dual-route verdict: weak matching vs the pattern route on the
    /// convex-set translation
    Equivalence,
}

struct Failure {
    message: String,
    code: i32,
}

impl Failure {
    fn input(message: impl Into<String>) -> Failure {
        Failure {
            message: message.into(),
            code: exit_code::INPUT,
        }
    }

    fn inexact(e: &InexactSolve) -> Failure {
        Failure {
            message: e.to_string(),
            code: exit_code::INEXACT,
        }
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path)
        .map_err(|e| Failure::input(format!("cannot read {}: {e}", path.display())))
}

/// Loads a system from `.wts` text or, for `.proc` files, by elaborating
/// process terms.
fn load_system(path: &Path) -> Result<WeightedSystem, Failure> {
    let text = read(path)?;
    if path.extension().is_some_and(|e| e == "proc") {
        let (sys, _roots) =
            elaborate_process_file(&text).map_err(|e| Failure::input(e.to_string()))?;
        Ok(sys)
    } else {
        parse_weighted_system(&text).map_err(|e| Failure::input(e.to_string()))
    }
}

fn load_pattern(selector: &str, sys: &WeightedSystem) -> Result<PatternAutomaton, Failure> {
    let json_text = if matches!(selector, "strong" | "weak" | "delay") {
        None
    } else {
        Some(read(Path::new(selector))?)
    };
    let tau = sys.tau().map(|t| sys.labels()[t].as_str());
    pattern_for(selector, json_text.as_deref(), sys.labels(), tau)
        .map_err(|e| Failure::input(e.to_string()))
}

fn load_partition(path: &Path, sys_states: &[String]) -> Result<Partition, Failure> {
    let text = read(path)?;
    parse_partition(&text, sys_states).map_err(|e| Failure::input(e.to_string()))
}

struct Emitted {
    report: Report,
    pretty: bool,
    code: i32,
    output: Option<PathBuf>,
}

fn run(cli: Cli) -> Result<Emitted, Failure> {
    match cli.command {
        Command::Check { common, partition } => {
            let sys = load_system(&common.system)?;
            let pattern = load_pattern(&common.pattern, &sys)?;
            let partition = load_partition(&partition, sys.states())?;
            let oplus: Oplus = common.oplus.into();
            let verdict = check_bisimulation(
                &sys,
                &pattern,
                &partition,
                oplus,
                &common.options(),
                common.scope(),
            )
            .map_err(|e| Failure::inexact(&e))?;
            let table = coweak_core::fixpoint::solve(
                &sys,
                &pattern,
                Target::Quotient(&partition),
                oplus,
                &common.options(),
            );
            let keys = class_names(&partition);
            let code = if verdict.holds {
                exit_code::OK
            } else {
                exit_code::FAILS
            };
            Ok(Emitted {
                report: Report::Check {
                    system: common.system.display().to_string(),
                    pattern: common.pattern.clone(),
                    oplus: oplus.name().to_string(),
                    holds: verdict.holds,
                    witness: verdict
                        .witness
                        .as_ref()
                        .map(|w| WitnessDoc::new(w, sys.states(), &pattern, &keys)),
                    meta: MetaDoc::from(&table.meta),
                },
                pretty: common.pretty,
                code,
                output: common.output.clone(),
            })
        }
        Command::Largest { common } => {
            let sys = load_system(&common.system)?;
            let pattern = load_pattern(&common.pattern, &sys)?;
            let oplus: Oplus = common.oplus.into();
            let partition =
                largest_bisimulation(&sys, &pattern, oplus, &common.options(), common.scope())
                    .map_err(|e| Failure::inexact(&e))?;
            let blocks = partition
                .blocks()
                .iter()
                .map(|b| b.iter().map(|&s| sys.states()[s].clone()).collect())
                .collect();
            Ok(Emitted {
                report: Report::Largest {
                    system: common.system.display().to_string(),
                    pattern: common.pattern.clone(),
                    oplus: oplus.name().to_string(),
                    blocks,
                },
                pretty: common.pretty,
                code: exit_code::OK,
                output: common.output.clone(),
            })
        }
        Command::Saturate { common } => {
            let sys = load_system(&common.system)?;
            let pattern = load_pattern(&common.pattern, &sys)?;
            let oplus: Oplus = common.oplus.into();
            let table = saturate(&sys, &pattern, oplus, &common.options());
            if !table.meta.exact {
                return Err(Failure {
                    message: "saturation did not stabilise exactly".into(),
                    code: exit_code::INEXACT,
                });
            }
            let entries = table_entries(&table, sys.states(), &pattern, sys.states());
            Ok(Emitted {
                report: Report::Saturate {
                    system: common.system.display().to_string(),
                    pattern: common.pattern.clone(),
                    oplus: oplus.name().to_string(),
                    strategy: table.meta.strategy_used.clone(),
                    entries,
                    meta: MetaDoc::from(&table.meta),
                },
                pretty: common.pretty,
                code: exit_code::OK,
                output: common.output.clone(),
            })
        }
        Command::Oracle {
            common,
            partition,
            depth,
        } => {
            let sys = load_system(&common.system)?;
            let pattern = load_pattern(&common.pattern, &sys)?;
            let (table, keys) = match partition {
                Some(path) => {
                    let partition = load_partition(&path, sys.states())?;
                    let table = path_oracle(&sys, &pattern, Target::Quotient(&partition), depth);
                    (table, class_names(&partition))
                }
                None => {
                    let table = path_oracle(&sys, &pattern, Target::Identity, depth);
                    (table, sys.states().to_vec())
                }
            };
            let entries = table_entries(&table, sys.states(), &pattern, &keys);
            Ok(Emitted {
                report: Report::Oracle {
                    system: common.system.display().to_string(),
                    pattern: common.pattern.clone(),
                    depth,
                    entries,
                },
                pretty: common.pretty,
                code: exit_code::OK,
                output: common.output.clone(),
            })
        }
        Command::Compare {
            common,
            partition,
            mode,
        } => {
            let sys = load_system(&common.system)?;
            let pattern = load_pattern(&common.pattern, &sys)?;
            let partition = load_partition(&partition, sys.states())?;
            let oplus: Oplus = common.oplus.into();
            let (mode_name, bisim_holds, kernel_holds, agree, largest_agrees) = match mode {
                CompareMode::Red => {
                    let report = check_saturation_reduction(
                        &sys,
                        &pattern,
                        oplus,
                        &partition,
                        &common.options(),
                        common.scope(),
                    )
                    .map_err(|e| match e {
                        TransformError::Inexact(ref i) => Failure::inexact(i),
                        other => Failure::input(other.to_string()),
                    })?;
                    (
                        "red",
                        report.bisim_holds,
                        report.kernel_holds,
                        report.agree,
                        Some(report.largest_agrees),
                    )
                }
                CompareMode::Semistrong => {
                    let report = check_semi_strong(
                        &sys,
                        &pattern,
                        &partition,
                        &common.options(),
                        common.scope(),
                    )
                    .map_err(|e| match e {
                        TransformError::Inexact(ref i) => Failure::inexact(i),
                        other => Failure::input(other.to_string()),
                    })?;
                    (
                        "semistrong",
                        report.bisim_holds,
                        report.kernel_holds,
                        report.agree,
                        None,
                    )
                }
            };
            let code = if agree {
                exit_code::OK
            } else {
                exit_code::FAILS
            };
            Ok(Emitted {
                report: Report::Compare {
                    system: common.system.display().to_string(),
                    pattern: common.pattern.clone(),
                    mode: mode_name.to_string(),
                    // the continuation reduction is defined for join only
                    oplus: match mode {
                        CompareMode::Red => oplus.name().to_string(),
                        CompareMode::Semistrong => Oplus::Join.name().to_string(),
                    },
                    bisim_holds,
                    kernel_holds,
                    agree,
                    largest_agrees,
                },
                pretty: common.pretty,
                code,
                output: common.output.clone(),
            })
        }
        Command::Segala {
            system,
            partition,
            cap,
            mode,
            json: _,
            pretty,
            output,
        } => {
            let text = read(&system)?;
            let sys = parse_segala_system(&text).map_err(|e| Failure::input(e.to_string()))?;
            let partition = {
                let text = read(&partition)?;
                parse_partition(&text, sys.states()).map_err(|e| Failure::input(e.to_string()))?
            };
            match mode {
                SegalaMode::Weak => {
                    let verdict = check_weak_prob_bisim(&sys, &partition, cap);
                    let (name, witness, code) = describe_segala(&verdict, &sys);
                    Ok(Emitted {
                        report: Report::Segala {
                            system: system.display().to_string(),
                            mode: "weak".into(),
                            verdict: name,
                            witness,
                            iterations: cap,
                            pattern_verdict: None,
                            agree: None,
                        },
                        pretty,
                        code,
                        output: output.clone(),
                    })
                }
                SegalaMode::Equivalence => {
                    let report = check_segala_equivalence(&sys, &partition, cap);
                    let (name, witness, _) = describe_segala(&report.weak_verdict, &sys);
                    let (pattern_name, ..) = describe_segala(&report.pattern_verdict, &sys);
                    let code = if !report.weak_verdict.is_definite()
                        || !report.pattern_verdict.is_definite()
                    {
                        exit_code::INEXACT
                    } else if report.agree {
                        exit_code::OK
                    } else {
                        exit_code::FAILS
                    };
                    Ok(Emitted {
                        report: Report::Segala {
                            system: system.display().to_string(),
                            mode: "equivalence".into(),
                            verdict: name,
                            witness,
                            iterations: cap,
                            pattern_verdict: Some(pattern_name),
                            agree: Some(report.agree),
                        },
                        pretty,
                        code,
                        output: output.clone(),
                    })
                }
            }
        }
    }
}

fn describe_segala(
    verdict: &SegalaVerdict,
    sys: &coweak_core::segala::SegalaSystem,
) -> (String, Option<SegalaWitnessDoc>, i32) {
    match verdict {
        SegalaVerdict::Holds => ("holds".into(), None, exit_code::OK),
        SegalaVerdict::Fails { left, right, label } => (
            "fails".into(),
            Some(SegalaWitnessDoc {
                left: sys.states()[*left].clone(),
                right: sys.states()[*right].clone(),
                label: sys.labels()[*label].clone(),
            }),
            exit_code::FAILS,
        ),
        SegalaVerdict::Unknown { .. } => ("unknown".into(), None, exit_code::INEXACT),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(emitted) => {
            let text = emitted.report.render(emitted.pretty);
            match &emitted.output {
                Some(path) => {
                    if let Err(e) = std::fs::write(path, text + "\n") {
                        println!(
                            "{}",
                            Report::Error {
                                message: format!("cannot write {}: {e}", path.display()),
                            }
                            .render(false)
                        );
                        return ExitCode::from(exit_code::INPUT as u8);
                    }
                }
                None => println!("{text}"),
            }
            ExitCode::from(emitted.code as u8)
        }
        Err(failure) => {
            let report = Report::Error {
                message: failure.message,
            };
            println!("{}", report.render(false));
            ExitCode::from(failure.code as u8)
        }
    }
}
