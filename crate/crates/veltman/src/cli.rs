//! Command-line surface: file IO, dispatch into the library modules, and
//! JSON/DOT report emission. Reports are deterministic for identical
//! inputs and seed.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::fs;
use std::path::PathBuf;

use clap::{Parser, Subcommand};
use serde_json::json;

use crate::decide::{
    decide_bounded, ilw_decide, BoundedOracle, SearchOptions, Verdict, MAX_BOUND,
};
use crate::formula::{adequate_set, parse, print, Formula};
use crate::gen::{random_gen_model, random_model, seeded_rng, GenCondition};
use crate::genmodel::GeneralisedModel;
use crate::labels::{
    self, full_closure_phi, harness_labelling, q_labels, semantic_assuring, Label, LabelPrinciple,
};
use crate::model::{OrdinaryModel, Principle};
use crate::proofcheck::{check_proof, parse_script, Logic};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 64;
pub const EXIT_IO: i32 = 66;
pub const EXIT_INTERNAL: i32 = 70;

const SCHEMA_VERSION: u32 = 1;

#[derive(Parser)]
#[command(name = "veltman")]
#[command(about = "Workbench for interpretability logics over Veltman semantics")]
#[command(version)]
struct Cli {
    /// Seed for all randomized commands
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Parse a formula and print its normal form
    Parse {
        #[arg(long)]
        formula: String,
        /// Emit a JSON report instead of plain text
        #[arg(long)]
        json: bool,
    },
    /// Evaluate a formula at a world of a model
    Eval {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        world: String,
        #[arg(long)]
        formula: String,
    },
    /// Check the frame and model invariants of a model file
    Validate {
        #[arg(long)]
        model: PathBuf,
    },
    /// Check frame conditions (P, M, M0, R, W; generalised P and W)
    Conditions {
        #[arg(long)]
        model: PathBuf,
        /// Check a single principle instead of all
        #[arg(long)]
        principle: Option<String>,
        /// For the generalised W condition: quantify targets over all
        /// supersets of the generators
        #[arg(long)]
        strict: bool,
    },
    /// Decide a formula over a logic's frame class
    Decide {
        #[arg(long, default_value = "ILW")]
        logic: String,
        #[arg(long, default_value_t = 3)]
        bound: usize,
        #[arg(long)]
        formula: String,
        /// Use bounded refutation search even for ILW (the default for
        /// ILW is the constructive route)
        #[arg(long)]
        search_only: bool,
        /// Write the countermodel as JSON
        #[arg(long)]
        emit: Option<PathBuf>,
        /// Write the countermodel as DOT
        #[arg(long)]
        dot: Option<PathBuf>,
    },
    /// Assuring-label check and box-set report for a world pair
    Labels {
        #[arg(long)]
        model: PathBuf,
        /// Lower world of the pair
        #[arg(long)]
        lower: String,
        /// Upper world of the pair
        #[arg(long)]
        upper: String,
        /// Comma-separated label formulas
        #[arg(long, default_value = "")]
        label: String,
        /// Comma-separated pool; defaults to the adequate set of the
        /// label members and model variables, truncated to 32
        #[arg(long)]
        pool: Option<String>,
    },
    /// Full-label closure inside the adequate set of a formula
    Closure {
        /// Formula whose adequate set is the universe
        #[arg(long)]
        formula: String,
        /// Comma-separated members of the maximal set
        #[arg(long)]
        gamma: String,
        /// Comma-separated label to close
        #[arg(long, default_value = "")]
        label: String,
        #[arg(long, default_value = "ILW")]
        logic: String,
        #[arg(long, default_value_t = 3)]
        bound: usize,
    },
    /// Iterated label sequence along a chain of worlds
    Qlabels {
        #[arg(long)]
        model: PathBuf,
        /// Comma-separated chain, source first
        #[arg(long)]
        chain: String,
        /// Semicolon-separated labels, each comma-separated
        #[arg(long)]
        labels: String,
        #[arg(long)]
        pivot: String,
        #[arg(long)]
        pool: Option<String>,
    },
    /// Labelling-lemma harness over seeded random models
    Harness {
        /// One of P, Pfull, M, M0, R, Rfull, RTrans
        #[arg(long)]
        principle: String,
        #[arg(long, default_value_t = 200)]
        trials: usize,
        /// Number of random models to draw
        #[arg(long, default_value_t = 20)]
        models: usize,
        /// Worlds per random model
        #[arg(long, default_value_t = 5)]
        worlds: usize,
        /// Pool size cap
        #[arg(long, default_value_t = 6)]
        pool_size: usize,
    },
    /// Check a Hilbert-style proof script
    ProofCheck {
        #[arg(long)]
        script: PathBuf,
        /// Ambient hypotheses referenced by hyp:k steps
        #[arg(long = "hypothesis")]
        hypotheses: Vec<String>,
    },
    /// Render a model file as DOT
    ExportDot {
        #[arg(long)]
        model: PathBuf,
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
    /// Generate a seeded random model of a frame class
    GenModel {
        /// Frame class: none, P, M, M0, R, W, genP, genW
        #[arg(long, default_value = "none")]
        class: String,
        #[arg(long, default_value_t = 5)]
        worlds: usize,
        #[arg(long, default_value = "p,q")]
        vars: String,
    },
}

enum CliError {
    Usage(String),
    Io(String),
    Internal(String),
}

impl CliError {
    fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Io(_) => EXIT_IO,
            CliError::Internal(_) => EXIT_INTERNAL,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Usage(m) | CliError::Io(m) | CliError::Internal(m) => m,
        }
    }
}

fn usage<E: std::fmt::Display>(e: E) -> CliError {
    CliError::Usage(e.to_string())
}

pub fn run(args: impl Iterator<Item = OsString>) -> i32 {
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            // clap handles --help/--version through this path
            let benign = matches!(
                e.kind(),
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion
            );
            let _ = e.print();
            return if benign { EXIT_OK } else { EXIT_USAGE };
        }
    };
    match dispatch(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {}", e.message());
            e.exit_code()
        }
    }
}

enum AnyModel {
    Ordinary(OrdinaryModel),
    Generalised(GeneralisedModel),
}

fn load_model(path: &PathBuf) -> Result<AnyModel, CliError> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    let value: serde_json::Value =
        serde_json::from_str(&text).map_err(|e| usage(format!("{}: {e}", path.display())))?;
    match value.get("type").and_then(|v| v.as_str()) {
        Some("ordinary") => Ok(AnyModel::Ordinary(
            OrdinaryModel::from_json(&text).map_err(usage)?,
        )),
        Some("generalised") => Ok(AnyModel::Generalised(
            GeneralisedModel::from_json(&text).map_err(usage)?,
        )),
        other => Err(usage(format!(
            "{}: unknown model type {:?}",
            path.display(),
            other
        ))),
    }
}

fn parse_formula(text: &str) -> Result<Formula, CliError> {
    parse(text).map_err(usage)
}

fn parse_formula_list(text: &str) -> Result<Vec<Formula>, CliError> {
    text.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(parse_formula)
        .collect()
}

fn ceiling() -> usize {
    std::env::var("VELTMAN_CEILING")
        .ok()
        .and_then(|v| v.parse().ok())
        .map(|v: usize| v.min(MAX_BOUND))
        .unwrap_or(MAX_BOUND)
}

fn check_bound(bound: usize) -> Result<(), CliError> {
    let cap = ceiling();
    if bound == 0 || bound > cap {
        return Err(usage(format!("bound must be between 1 and {cap}")));
    }
    Ok(())
}

/// Default pool: adequate set of the given seeds, truncated.
fn default_pool(seeds: &[Formula], cap: usize) -> Vec<Formula> {
    let conj = seeds
        .iter()
        .cloned()
        .reduce(Formula::and)
        .unwrap_or_else(Formula::top);
    let mut pool: Vec<Formula> = adequate_set(&conj).formulas().to_vec();
    pool.truncate(cap);
    pool
}

fn dispatch(cli: Cli) -> Result<i32, CliError> {
    match cli.command {
        Command::Parse { formula, json } => {
            let f = parse_formula(&formula)?;
            if json {
                println!(
                    "{}",
                    json!({
                        "schema_version": SCHEMA_VERSION,
                        "input": formula,
                        "printed": print(&f),
                        "size": f.size(),
                        "variables": f.variables(),
                    })
                );
            } else {
                println!("{}", print(&f));
            }
            Ok(EXIT_OK)
        }
        Command::Eval {
            model,
            world,
            formula,
        } => {
            let f = parse_formula(&formula)?;
            let value = match load_model(&model)? {
                AnyModel::Ordinary(m) => {
                    m.validate()
                        .map_err(|v| usage(format!("invalid model: {v}")))?;
                    m.force_named(&world, &f).map_err(usage)?
                }
                AnyModel::Generalised(m) => {
                    m.validate()
                        .map_err(|v| usage(format!("invalid model: {v}")))?;
                    m.force_named(&world, &f).map_err(usage)?
                }
            };
            println!("{value}");
            Ok(EXIT_OK)
        }
        Command::Validate { model } => match load_model(&model)? {
            AnyModel::Ordinary(m) => match m.validate() {
                Ok(()) => {
                    println!("ok");
                    Ok(EXIT_OK)
                }
                Err(v) => {
                    println!("violation: {v}");
                    Ok(1)
                }
            },
            AnyModel::Generalised(m) => match m.validate() {
                Ok(()) => {
                    println!("ok");
                    Ok(EXIT_OK)
                }
                Err(v) => {
                    println!("violation: {v}");
                    Ok(1)
                }
            },
        },
        Command::Conditions {
            model,
            principle,
            strict,
        } => {
            let mut report = BTreeMap::new();
            match load_model(&model)? {
                AnyModel::Ordinary(m) => {
                    m.validate()
                        .map_err(|v| usage(format!("invalid model: {v}")))?;
                    let selected: Vec<Principle> = match &principle {
                        None => Principle::ALL.to_vec(),
                        Some(name) => vec![name.parse().map_err(usage)?],
                    };
                    for p in selected {
                        let entry = match m.check_condition(p) {
                            Ok(()) => json!("ok"),
                            Err(ce) => json!({ "counterexample": ce.worlds }),
                        };
                        report.insert(p.name().to_string(), entry);
                    }
                }
                AnyModel::Generalised(m) => {
                    m.validate()
                        .map_err(|v| usage(format!("invalid model: {v}")))?;
                    let wanted =
                        |name: &str| principle.is_none() || principle.as_deref() == Some(name);
                    if wanted("P") {
                        let entry = match m.check_gen_p() {
                            Ok(()) => json!("ok"),
                            Err(ce) => json!({
                                "counterexample": ce.worlds,
                                "set": ce.set,
                            }),
                        };
                        report.insert("P_gen".to_string(), entry);
                    }
                    if wanted("W") {
                        let entry = match m.check_gen_w(strict) {
                            Ok(()) => json!("ok"),
                            Err(ce) => json!({
                                "counterexample": ce.worlds,
                                "set": ce.set,
                            }),
                        };
                        report.insert("W_gen".to_string(), entry);
                    }
                }
            }
            println!(
                "{}",
                json!({ "schema_version": SCHEMA_VERSION, "conditions": report })
            );
            Ok(EXIT_OK)
        }
        Command::Decide {
            logic,
            bound,
            formula,
            search_only,
            emit,
            dot,
        } => {
            check_bound(bound)?;
            let logic: Logic = logic.parse().map_err(usage)?;
            let g = parse_formula(&formula)?;
            // decide's own exit contract: 0 provable, 1 countermodel, 2 error
            let outcome = if logic == Logic::Ilw && !search_only {
                ilw_decide(&g, bound).map(|out| out.result)
            } else {
                decide_bounded(&g, logic, bound, SearchOptions::default())
            };
            let result = match outcome {
                Ok(result) => result,
                Err(e) => {
                    eprintln!("error: {e}");
                    return Ok(2);
                }
            };
            match result.verdict {
                Verdict::ProvableUpToBound => {
                    println!(
                        "{}",
                        json!({
                            "schema_version": SCHEMA_VERSION,
                            "verdict": "provable-up-to-bound",
                            "logic": logic.name(),
                            "bound": result.bound,
                        })
                    );
                    Ok(EXIT_OK)
                }
                Verdict::Countermodel => {
                    let model = result.model.expect("countermodel carries a model");
                    let designated = result.designated.expect("designated world");
                    if let Some(path) = &emit {
                        fs::write(path, model.to_json())
                            .map_err(|e| CliError::Io(e.to_string()))?;
                    }
                    if let Some(path) = &dot {
                        fs::write(path, model.to_dot()).map_err(|e| CliError::Io(e.to_string()))?;
                    }
                    println!(
                        "{}",
                        json!({
                            "schema_version": SCHEMA_VERSION,
                            "verdict": "countermodel",
                            "logic": logic.name(),
                            "bound": result.bound,
                            "worlds": model.n_worlds(),
                            "designated": designated,
                        })
                    );
                    Ok(1)
                }
            }
        }
        Command::Labels {
            model,
            lower,
            upper,
            label,
            pool,
        } => {
            let m = match load_model(&model)? {
                AnyModel::Ordinary(m) => m,
                AnyModel::Generalised(_) => return Err(usage("labels requires an ordinary model")),
            };
            m.validate()
                .map_err(|v| usage(format!("invalid model: {v}")))?;
            let x = m.world_index(&lower).map_err(usage)?;
            let y = m.world_index(&upper).map_err(usage)?;
            let label: Label = parse_formula_list(&label)?.into_iter().collect();
            let pool = match pool {
                Some(text) => parse_formula_list(&text)?,
                None => {
                    let mut seeds: Vec<Formula> = label.iter().cloned().collect();
                    for var in m.valuation().keys() {
                        seeds.push(Formula::var(var));
                    }
                    default_pool(&seeds, 32)
                }
            };
            let assuring = semantic_assuring(&m, x, y, &label, &pool);
            let failing = labels::assuring_failure(&m, x, y, &label, &pool).map(|f| print(&f));
            let boxdot: Vec<String> = labels::boxdotset(&m, x, &label, &pool)
                .iter()
                .map(print)
                .collect();
            let boxes: Vec<String> = labels::boxset(&m, x, &label, &pool)
                .iter()
                .map(print)
                .collect();
            println!(
                "{}",
                json!({
                    "schema_version": SCHEMA_VERSION,
                    "lower": lower,
                    "upper": upper,
                    "label": label.iter().map(print).collect::<Vec<_>>(),
                    "assuring": assuring,
                    "failing": failing,
                    "boxdotset": boxdot,
                    "boxset": boxes,
                })
            );
            Ok(if assuring { EXIT_OK } else { 1 })
        }
        Command::Closure {
            formula,
            gamma,
            label,
            logic,
            bound,
        } => {
            check_bound(bound)?;
            let logic: Logic = logic.parse().map_err(usage)?;
            let phi = adequate_set(&parse_formula(&formula)?);
            let gamma = parse_formula_list(&gamma)?;
            let label: Label = parse_formula_list(&label)?.into_iter().collect();
            let mut oracle = BoundedOracle { logic, bound };
            let closed = full_closure_phi(&label, &gamma, &phi, &mut oracle)
                .map_err(|e| CliError::Internal(e.to_string()))?;
            println!(
                "{}",
                json!({
                    "schema_version": SCHEMA_VERSION,
                    "universe_size": phi.len(),
                    "label": label.iter().map(print).collect::<Vec<_>>(),
                    "closure": closed.iter().map(print).collect::<Vec<_>>(),
                })
            );
            Ok(EXIT_OK)
        }
        Command::Qlabels {
            model,
            chain,
            labels,
            pivot,
            pool,
        } => {
            let m = match load_model(&model)? {
                AnyModel::Ordinary(m) => m,
                AnyModel::Generalised(_) => {
                    return Err(usage("qlabels requires an ordinary model"))
                }
            };
            m.validate()
                .map_err(|v| usage(format!("invalid model: {v}")))?;
            let chain: Vec<usize> = chain
                .split(',')
                .map(str::trim)
                .filter(|s| !s.is_empty())
                .map(|name| m.world_index(name).map_err(usage))
                .collect::<Result<_, _>>()?;
            let base_labels: Vec<Label> = labels
                .split(';')
                .map(|part| parse_formula_list(part).map(|fs| fs.into_iter().collect::<Label>()))
                .collect::<Result<_, _>>()?;
            let pivot = parse_formula(&pivot)?;
            let pool = match pool {
                Some(text) => parse_formula_list(&text)?,
                None => default_pool(std::slice::from_ref(&pivot), 32),
            };
            let seq = q_labels(&m, &chain, &base_labels, &pivot, &pool).map_err(usage)?;
            let levels: Vec<Vec<String>> = seq
                .q
                .iter()
                .map(|q| q.iter().map(print).collect())
                .collect();
            println!(
                "{}",
                json!({
                    "schema_version": SCHEMA_VERSION,
                    "pivot": print(&pivot),
                    "q": levels,
                })
            );
            Ok(EXIT_OK)
        }
        Command::Harness {
            principle,
            trials,
            models,
            worlds,
            pool_size,
        } => {
            let principle: LabelPrinciple = principle.parse().map_err(usage)?;
            let mut rng = seeded_rng(cli.seed);
            let vars = ["p", "q"];
            let mut pool = default_pool(
                &[Formula::rhd(Formula::var("p"), Formula::var("q"))],
                pool_size,
            );
            pool.truncate(pool_size);
            let mut all = Vec::new();
            for _ in 0..models {
                let m = random_model(
                    &mut rng,
                    worlds.clamp(2, 8),
                    &vars,
                    Some(principle.frame_condition()),
                );
                let violations = harness_labelling(principle, &m, &pool, trials, &mut rng)
                    .map_err(|e| CliError::Internal(e.to_string()))?;
                all.extend(violations);
            }
            println!(
                "{}",
                json!({
                    "schema_version": SCHEMA_VERSION,
                    "principle": principle.name(),
                    "models": models,
                    "trials": trials,
                    "violations": all,
                })
            );
            Ok(if all.is_empty() { EXIT_OK } else { 1 })
        }
        Command::ProofCheck { script, hypotheses } => {
            let text = fs::read_to_string(&script)
                .map_err(|e| CliError::Io(format!("{}: {e}", script.display())))?;
            let parsed = parse_script(&text).map_err(usage)?;
            let hyps: Vec<Formula> = hypotheses
                .iter()
                .map(|h| parse_formula(h))
                .collect::<Result<_, _>>()?;
            match check_proof(&parsed, &hyps) {
                Ok(()) => {
                    println!(
                        "ok ({} steps, logic {})",
                        parsed.steps.len(),
                        parsed.logic.name()
                    );
                    Ok(EXIT_OK)
                }
                Err(e) => {
                    println!("rejected: {e}");
                    Ok(1)
                }
            }
        }
        Command::ExportDot { model, out } => {
            let dot = match load_model(&model)? {
                AnyModel::Ordinary(m) => m.to_dot(),
                AnyModel::Generalised(m) => m.to_dot(),
            };
            match out {
                Some(path) => fs::write(path, dot).map_err(|e| CliError::Io(e.to_string()))?,
                None => print!("{dot}"),
            }
            Ok(EXIT_OK)
        }
        Command::GenModel {
            class,
            worlds,
            vars,
        } => {
            let mut rng = seeded_rng(cli.seed);
            let vars: Vec<&str> = vars.split(',').map(str::trim).collect();
            let output = match class.as_str() {
                "none" => random_model(&mut rng, worlds.clamp(1, 16), &vars, None).to_json(),
                "genP" => {
                    random_gen_model(&mut rng, worlds.clamp(1, 8), &vars, Some(GenCondition::P))
                        .to_json()
                }
                "genW" => {
                    random_gen_model(&mut rng, worlds.clamp(1, 8), &vars, Some(GenCondition::W))
                        .to_json()
                }
                name => {
                    let principle: Principle = name.parse().map_err(usage)?;
                    random_model(&mut rng, worlds.clamp(1, 16), &vars, Some(principle)).to_json()
                }
            };
            println!("{output}");
            Ok(EXIT_OK)
        }
    }
}
