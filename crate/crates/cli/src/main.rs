//! Command-line front end: validation, plays, attribution, anticipation,
//! dominance and regret reports, strategy recommendation, explanation
//! narratives, and the randomized theorem checker.

mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::json;

use output::{
    history_json, history_text, joint_json, joint_text, outcome_json, outcome_text,
    print_structured, score_json, strategy_json, Format,
};
use valor_core::ltlf::parse_formula;
use valor_core::oracle::{fuzz, InstanceCaps};
use valor_core::responsibility::{self, ResponsibilityKind};
use valor_core::scenario::{self, LoadedScenario};
use valor_core::strategy::{self, JointStrategy, Strategy};
use valor_core::system::AgentId;

#[derive(Parser)]
#[command(
    name = "valor",
    version,
    about = "Value-aware strategy analysis and responsibility attribution"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Load a scenario, run its diagnostics and report the result.
    Validate(ValidateArgs),
    /// Play a full joint strategy and show the resulting history.
    Play(PlayArgs),
    /// Attribute responsibility to an agent under a fixed joint strategy.
    Attribute(AttributeArgs),
    /// Anticipate the worst-case responsibility of a strategy.
    Anticipate(AnticipateArgs),
    /// Report the dominance relation and the non-dominated strategies.
    Dominance(DominanceArgs),
    /// Report anticipated regret and the regret-minimising strategies.
    Regret(RegretArgs),
    /// Recommend strategies minimising both notions of responsibility.
    Recommend(RecommendArgs),
    /// Check the analysis laws on randomly generated instances.
    Fuzz(FuzzArgs),
    /// Explain a strategy choice by pairwise worst-case comparison.
    Explain(ExplainArgs),
}

#[derive(Args)]
struct Common {
    /// Scenario or matrix document to load.
    #[arg(long)]
    scenario: PathBuf,
    /// Output mode.
    #[arg(long, value_enum, default_value = "text")]
    format: Format,
}

#[derive(Args)]
struct ValidateArgs {
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct PlayArgs {
    #[command(flatten)]
    common: Common,
    /// Joint strategy as comma-separated agent=strategy pairs.
    #[arg(long)]
    joint: String,
}

#[derive(Args)]
struct AttributeArgs {
    #[command(flatten)]
    common: Common,
    #[arg(long)]
    joint: String,
    /// Agent under attribution.
    #[arg(long)]
    agent: String,
    /// Responsibility notion to report.
    #[arg(long, value_enum, default_value = "passive")]
    kind: KindArg,
    /// Also decide liability for this formula.
    #[arg(long)]
    liability: Option<String>,
}

#[derive(Args)]
struct AnticipateArgs {
    #[command(flatten)]
    common: Common,
    #[arg(long)]
    agent: String,
    /// Strategy name or enumeration index.
    #[arg(long)]
    strategy: String,
    #[arg(long, value_enum, default_value = "passive")]
    kind: KindArg,
    /// List every witness tied for the anticipated class.
    #[arg(long)]
    all_witnesses: bool,
    /// Also print the union of single-value blames over all histories, a
    /// non-normative diagnostic.
    #[arg(long)]
    naive_union: bool,
}

#[derive(Args)]
struct DominanceArgs {
    #[command(flatten)]
    common: Common,
    #[arg(long)]
    agent: String,
}

#[derive(Args)]
struct RegretArgs {
    #[command(flatten)]
    common: Common,
    #[arg(long)]
    agent: String,
    /// Restrict the report to one strategy.
    #[arg(long)]
    strategy: Option<String>,
    #[arg(long)]
    all_witnesses: bool,
    /// Collapse strategies with identical outcome rows.
    #[arg(long)]
    dedupe: bool,
}

#[derive(Args)]
struct RecommendArgs {
    #[command(flatten)]
    common: Common,
    #[arg(long)]
    agent: String,
    #[arg(long)]
    dedupe: bool,
}

#[derive(Args)]
struct FuzzArgs {
    /// Number of seeded instances.
    #[arg(long, default_value_t = 10)]
    count: usize,
    /// Base seed; required in structured mode.
    #[arg(long)]
    seed: Option<u64>,
    /// Cap overrides, e.g. agents=2,props=3,horizon=2,pure_random=true.
    #[arg(long)]
    caps: Option<String>,
    /// Worker threads.
    #[arg(long, default_value_t = 1)]
    jobs: usize,
    #[arg(long, value_enum, default_value = "text")]
    format: Format,
}

#[derive(Args)]
struct ExplainArgs {
    #[command(flatten)]
    common: Common,
    #[arg(long)]
    agent: String,
    #[arg(long)]
    strategy: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
enum KindArg {
    Passive,
    Inexcusable,
}

impl From<KindArg> for ResponsibilityKind {
    fn from(kind: KindArg) -> Self {
        match kind {
            KindArg::Passive => ResponsibilityKind::Passive,
            KindArg::Inexcusable => ResponsibilityKind::Inexcusable,
        }
    }
}

/// Failure with its process exit code: 2 for validation and usage
/// problems, 3 for a failed theorem check, 1 for internal errors.
struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Failure { code: 2, message: message.into() }
    }

    fn theorem(message: impl Into<String>) -> Self {
        Failure { code: 3, message: message.into() }
    }
}

impl<E: std::error::Error> From<E> for Failure {
    fn from(error: E) -> Self {
        // every library error a command surfaces is a problem with the
        // inputs, not with the tool
        Failure::usage(error.to_string())
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match std::panic::catch_unwind(std::panic::AssertUnwindSafe(|| run(cli))) {
        Ok(Ok(())) => ExitCode::SUCCESS,
        Ok(Err(failure)) => {
            eprintln!("error: {}", failure.message);
            ExitCode::from(failure.code)
        }
        Err(_) => {
            eprintln!("error: internal error");
            ExitCode::from(1)
        }
    }
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Validate(args) => cmd_validate(args),
        Command::Play(args) => cmd_play(args),
        Command::Attribute(args) => cmd_attribute(args),
        Command::Anticipate(args) => cmd_anticipate(args),
        Command::Dominance(args) => cmd_dominance(args),
        Command::Regret(args) => cmd_regret(args),
        Command::Recommend(args) => cmd_recommend(args),
        Command::Fuzz(args) => cmd_fuzz(args),
        Command::Explain(args) => cmd_explain(args),
    }
}

fn load(common: &Common) -> Result<LoadedScenario, Failure> {
    Ok(scenario::load_path(&common.scenario)?)
}

fn resolve_agent(loaded: &LoadedScenario, name: &str) -> Result<AgentId, Failure> {
    loaded
        .scenario
        .system
        .agent_id(name)
        .ok_or_else(|| Failure::usage(format!("unknown agent '{name}'")))
}

/// Parses `agent=strategy,agent=strategy` into a full joint strategy.
fn resolve_joint(loaded: &LoadedScenario, spec: &str) -> Result<JointStrategy, Failure> {
    let mut strategies: Vec<Strategy> = Vec::new();
    for pair in spec.split(',') {
        let (agent_name, selector) = pair
            .split_once('=')
            .ok_or_else(|| Failure::usage(format!("joint entry '{pair}' is not agent=strategy")))?;
        let agent = resolve_agent(loaded, agent_name.trim())?;
        if strategies.iter().any(|s| s.owner() == agent) {
            return Err(Failure::usage(format!("agent '{agent_name}' appears twice in --joint")));
        }
        strategies.push(loaded.resolve_strategy(agent, selector.trim())?);
    }
    for (i, agent) in loaded.scenario.system.agents.iter().enumerate() {
        if !strategies.iter().any(|s| s.owner() == AgentId(i)) {
            return Err(Failure::usage(format!("--joint is missing a strategy for '{agent}'")));
        }
    }
    Ok(JointStrategy::new(strategies))
}

fn cmd_validate(args: ValidateArgs) -> Result<(), Failure> {
    let loaded = load(&args.common)?;
    let counts: Vec<(String, u64)> = loaded
        .scenario
        .agent_ids()
        .map(|a| {
            let count = loaded
                .scenario
                .decision_space(a)
                .map(|s| s.strategy_count())
                .unwrap_or(0);
            (loaded.scenario.system.agents[a.0].clone(), count)
        })
        .collect();
    match args.common.format {
        Format::Text => {
            println!("scenario '{}': OK", loaded.name);
            println!(
                "  agents: {} | propositions: {} | actions: {} | horizon: {}",
                loaded.scenario.system.agents.join(", "),
                loaded.scenario.system.propositions.len(),
                loaded.scenario.system.actions.len(),
                loaded.scenario.horizon
            );
            println!(
                "  values: {} in {} level(s)",
                loaded.scenario.values.value_count(),
                loaded.scenario.values.level_count()
            );
            let strategies: Vec<String> =
                counts.iter().map(|(a, c)| format!("{a}={c}")).collect();
            println!("  strategies: {}", strategies.join(" "));
            if loaded.warnings.is_empty() {
                println!("  warnings: none");
            } else {
                for warning in &loaded.warnings {
                    println!("  warning: {warning}");
                }
            }
        }
        Format::Structured => {
            print_structured(&json!({
                "command": "validate",
                "scenario": loaded.name,
                "agents": loaded.scenario.system.agents,
                "propositions": loaded.scenario.system.propositions,
                "actions": loaded.scenario.system.actions,
                "horizon": loaded.scenario.horizon,
                "levels": loaded.scenario.values.level_count(),
                "values": loaded.scenario.values.value_count(),
                "strategy_counts": counts
                    .iter()
                    .map(|(a, c)| (a.clone(), json!(c)))
                    .collect::<serde_json::Map<_, _>>(),
                "warnings": loaded
                    .warnings
                    .iter()
                    .map(|w| w.to_string())
                    .collect::<Vec<_>>(),
            }));
        }
    }
    Ok(())
}

fn cmd_play(args: PlayArgs) -> Result<(), Failure> {
    let loaded = load(&args.common)?;
    let joint = resolve_joint(&loaded, &args.joint)?;
    let history = loaded.scenario.play(&joint)?;
    let sat = valor_core::values::satset(&history, &loaded.scenario.values);
    let score = valor_core::values::score_vector(&sat, &loaded.scenario.values)
        .expect("satset scores against its own base");
    match args.common.format {
        Format::Text => {
            println!("play of {}:", joint_text(&loaded, &joint));
            for line in history_text(&loaded, &history) {
                println!("{line}");
            }
            println!("satset: {} score {}", outcome_text(&loaded, &sat), score);
        }
        Format::Structured => {
            print_structured(&json!({
                "command": "play",
                "scenario": loaded.name,
                "joint": joint_json(&loaded, &joint),
                "history": history_json(&loaded, &history),
                "satset": outcome_json(&loaded, &sat),
                "score": score_json(&score),
            }));
        }
    }
    Ok(())
}

fn cmd_attribute(args: AttributeArgs) -> Result<(), Failure> {
    let loaded = load(&args.common)?;
    let agent = resolve_agent(&loaded, &args.agent)?;
    let joint = resolve_joint(&loaded, &args.joint)?;
    let kind: ResponsibilityKind = args.kind.into();
    let records = responsibility::attributions(&loaded.scenario, &joint, agent)?;
    let admitted: Vec<&responsibility::Attribution> = records
        .iter()
        .filter(|a| kind == ResponsibilityKind::Passive || a.inexcusable)
        .collect();
    let distinct: std::collections::BTreeSet<_> =
        admitted.iter().map(|a| a.outcome.clone()).collect();
    let strong_excuses: Vec<Option<responsibility::Excuse>> = records
        .iter()
        .map(|record| {
            if record.negative {
                responsibility::strong_excuse(&loaded.scenario, &joint, agent, &record.via)
                    .expect("negative attributions admit the excuse query")
            } else {
                None
            }
        })
        .collect();

    let liability = match &args.liability {
        Some(text) => {
            let formula = parse_formula(text)?;
            Some((text.clone(), responsibility::liable(&loaded.scenario, &joint, agent, &formula)?))
        }
        None => None,
    };

    match args.common.format {
        Format::Text => {
            println!(
                "{} responsibility of {} under {}:",
                kind.label(),
                args.agent,
                joint_text(&loaded, &joint)
            );
            for (record, strong) in records.iter().zip(&strong_excuses) {
                let mut line = format!(
                    "  {} score {} via {}",
                    outcome_text(&loaded, &record.outcome),
                    record.score,
                    loaded.strategy_label(&record.via)
                );
                if let Some(excuse) = &record.weak_excuse {
                    line.push_str(&format!(" [weak excuse: {}]", joint_text(&loaded, excuse)));
                }
                if let Some(excuse) = strong {
                    line.push_str(&format!(
                        " [strong excuse: {}; strict-gain, non-strict-margin reading]",
                        joint_text(&loaded, &excuse.witness)
                    ));
                }
                if kind == ResponsibilityKind::Inexcusable && !record.inexcusable {
                    line.push_str(" [blocked]");
                }
                println!("{line}");
            }
            let rendered: Vec<String> =
                distinct.iter().map(|o| outcome_text(&loaded, o)).collect();
            println!("attributed outcome sets: {}", rendered.join(", "));
            if let Some((formula, witness)) = &liability {
                match witness {
                    Some(accuser) => println!(
                        "liable for '{formula}' via {}",
                        loaded.strategy_label(accuser)
                    ),
                    None => println!("not liable for '{formula}'"),
                }
            }
        }
        Format::Structured => {
            print_structured(&json!({
                "command": "attribute",
                "scenario": loaded.name,
                "agent": args.agent,
                "kind": kind.label(),
                "joint": joint_json(&loaded, &joint),
                "attributions": records
                    .iter()
                    .zip(&strong_excuses)
                    .map(|(record, strong)| {
                        json!({
                            "outcome": outcome_json(&loaded, &record.outcome),
                            "score": score_json(&record.score),
                            "via": strategy_json(&loaded, &record.via),
                            "negative": record.negative,
                            "weak_excuse": record
                                .weak_excuse
                                .as_ref()
                                .map(|e| joint_json(&loaded, e)),
                            "strong_excuse": strong
                                .as_ref()
                                .map(|e| joint_json(&loaded, &e.witness)),
                            "strong_excuse_reading": "strict-gain, non-strict-margin",
                            "inexcusable": record.inexcusable,
                        })
                    })
                    .collect::<Vec<_>>(),
                "attributed": distinct
                    .iter()
                    .map(|o| outcome_json(&loaded, o))
                    .collect::<Vec<_>>(),
                "liability": liability.as_ref().map(|(formula, witness)| {
                    json!({
                        "formula": formula,
                        "liable": witness.is_some(),
                        "via": witness.as_ref().map(|w| strategy_json(&loaded, w)),
                    })
                }),
            }));
        }
    }
    Ok(())
}

fn cmd_anticipate(args: AnticipateArgs) -> Result<(), Failure> {
    let loaded = load(&args.common)?;
    let agent = resolve_agent(&loaded, &args.agent)?;
    let strategy = loaded.resolve_strategy(agent, &args.strategy)?;
    let kind: ResponsibilityKind = args.kind.into();
    let worst = responsibility::anticipate(&loaded.scenario, agent, &strategy, kind)?;
    let witnesses = if args.all_witnesses {
        responsibility::anticipate_witnesses(&loaded.scenario, agent, &strategy, kind)?
    } else {
        vec![worst.clone()]
    };
    let naive_union = if args.naive_union {
        Some(responsibility::naive_union_diagnostic(&loaded.scenario, agent, &strategy)?)
    } else {
        None
    };
    match args.common.format {
        Format::Text => {
            println!(
                "anticipated {} responsibility of {} with {}: {} score {}",
                kind.label(),
                args.agent,
                loaded.strategy_label(&strategy),
                outcome_text(&loaded, &worst.outcome),
                worst.score
            );
            for witness in &witnesses {
                println!(
                    "  witness: opponents {} accusation {} outcome {}",
                    joint_text(&loaded, &witness.opponents),
                    loaded.strategy_label(&witness.accusation),
                    outcome_text(&loaded, &witness.outcome)
                );
            }
            if let Some(union) = &naive_union {
                println!(
                    "  union of single-value blames over all histories \
                     (non-normative diagnostic): {}",
                    outcome_text(&loaded, union)
                );
            }
        }
        Format::Structured => {
            print_structured(&json!({
                "command": "anticipate",
                "scenario": loaded.name,
                "agent": args.agent,
                "kind": kind.label(),
                "strategy": strategy_json(&loaded, &strategy),
                "outcome": outcome_json(&loaded, &worst.outcome),
                "score": score_json(&worst.score),
                "witnesses": witnesses
                    .iter()
                    .map(|w| {
                        json!({
                            "opponents": joint_json(&loaded, &w.opponents),
                            "accusation": strategy_json(&loaded, &w.accusation),
                            "outcome": outcome_json(&loaded, &w.outcome),
                        })
                    })
                    .collect::<Vec<_>>(),
                "naive_union_diagnostic": naive_union
                    .as_ref()
                    .map(|u| json!({
                        "normative": false,
                        "union": outcome_json(&loaded, u),
                    })),
            }));
        }
    }
    Ok(())
}

fn cmd_dominance(args: DominanceArgs) -> Result<(), Failure> {
    let loaded = load(&args.common)?;
    let agent = resolve_agent(&loaded, &args.agent)?;
    let all = strategy::enumerate_strategies(&loaded.scenario, agent)?;
    let mut pairs = Vec::new();
    for s in &all {
        for c in &all {
            if s != c && strategy::weakly_dominates(&loaded.scenario, agent, s, c)? {
                pairs.push((s.clone(), c.clone()));
            }
        }
    }
    let non_dominated = strategy::non_dominated_set(&loaded.scenario, agent)?;
    match args.common.format {
        Format::Text => {
            println!("dominance for {} ({} strategies):", args.agent, all.len());
            if pairs.is_empty() {
                println!("  no non-trivial weak dominance");
            }
            for (s, c) in &pairs {
                println!(
                    "  {} <= {}",
                    loaded.strategy_label(s),
                    loaded.strategy_label(c)
                );
            }
            let labels: Vec<String> =
                non_dominated.iter().map(|s| loaded.strategy_label(s)).collect();
            println!("non-dominated: {}", labels.join(", "));
        }
        Format::Structured => {
            print_structured(&json!({
                "command": "dominance",
                "scenario": loaded.name,
                "agent": args.agent,
                "weakly_dominated_pairs": pairs
                    .iter()
                    .map(|(s, c)| {
                        json!({
                            "below": strategy_json(&loaded, s),
                            "above": strategy_json(&loaded, c),
                        })
                    })
                    .collect::<Vec<_>>(),
                "non_dominated": non_dominated
                    .iter()
                    .map(|s| strategy_json(&loaded, s))
                    .collect::<Vec<_>>(),
            }));
        }
    }
    Ok(())
}

fn cmd_regret(args: RegretArgs) -> Result<(), Failure> {
    let loaded = load(&args.common)?;
    let agent = resolve_agent(&loaded, &args.agent)?;
    let subjects: Vec<Strategy> = match &args.strategy {
        Some(selector) => vec![loaded.resolve_strategy(agent, selector)?],
        None => {
            let all = strategy::enumerate_strategies(&loaded.scenario, agent)?;
            if args.dedupe {
                strategy::dedupe_by_outcome(&loaded.scenario, agent)?
                    .into_iter()
                    .filter(|s| all.contains(s))
                    .collect()
            } else {
                all
            }
        }
    };
    let minimising = strategy::regret_minimising_set(&loaded.scenario, agent)?;

    let mut entries = Vec::new();
    for subject in &subjects {
        let worst = strategy::anticipated_regret(&loaded.scenario, agent, subject)?;
        let witnesses = if args.all_witnesses {
            strategy::anticipated_regret_witnesses(&loaded.scenario, agent, subject)?
        } else {
            vec![worst.clone()]
        };
        entries.push((subject.clone(), worst, witnesses));
    }

    match args.common.format {
        Format::Text => {
            println!("anticipated regret for {}:", args.agent);
            for (subject, worst, witnesses) in &entries {
                println!(
                    "  {}: {} score {}",
                    loaded.strategy_label(subject),
                    outcome_text(&loaded, &worst.regret),
                    worst.score
                );
                for witness in witnesses {
                    println!(
                        "    witness: opponents {} alternative {} regret {}",
                        joint_text(&loaded, &witness.opponents),
                        loaded.strategy_label(&witness.alternative),
                        outcome_text(&loaded, &witness.regret)
                    );
                }
            }
            let labels: Vec<String> =
                minimising.iter().map(|s| loaded.strategy_label(s)).collect();
            println!("regret-minimising: {}", labels.join(", "));
        }
        Format::Structured => {
            print_structured(&json!({
                "command": "regret",
                "scenario": loaded.name,
                "agent": args.agent,
                "strategies": entries
                    .iter()
                    .map(|(subject, worst, witnesses)| {
                        json!({
                            "strategy": strategy_json(&loaded, subject),
                            "regret": outcome_json(&loaded, &worst.regret),
                            "score": score_json(&worst.score),
                            "witnesses": witnesses
                                .iter()
                                .map(|w| {
                                    json!({
                                        "opponents": joint_json(&loaded, &w.opponents),
                                        "alternative": strategy_json(&loaded, &w.alternative),
                                        "regret": outcome_json(&loaded, &w.regret),
                                    })
                                })
                                .collect::<Vec<_>>(),
                        })
                    })
                    .collect::<Vec<_>>(),
                "regret_minimising": minimising
                    .iter()
                    .map(|s| strategy_json(&loaded, s))
                    .collect::<Vec<_>>(),
            }));
        }
    }
    Ok(())
}

fn cmd_recommend(args: RecommendArgs) -> Result<(), Failure> {
    let loaded = load(&args.common)?;
    let agent = resolve_agent(&loaded, &args.agent)?;
    let regret_min = strategy::regret_minimising_set(&loaded.scenario, agent)?;
    let non_dominated = strategy::non_dominated_set(&loaded.scenario, agent)?;
    let recommended = responsibility::recommend(&loaded.scenario, agent)?;
    if recommended.is_empty() {
        return Err(Failure::theorem(
            "the regret-minimising and non-dominated sets do not intersect",
        ));
    }
    let maybe_dedupe = |set: Vec<Strategy>| -> Result<Vec<Strategy>, Failure> {
        if args.dedupe {
            let representatives = strategy::dedupe_by_outcome(&loaded.scenario, agent)?;
            Ok(set.into_iter().filter(|s| representatives.contains(s)).collect())
        } else {
            Ok(set)
        }
    };
    let regret_min = maybe_dedupe(regret_min)?;
    let non_dominated = maybe_dedupe(non_dominated)?;
    let recommended = maybe_dedupe(recommended)?;

    match args.common.format {
        Format::Text => {
            let render = |set: &[Strategy]| -> String {
                set.iter().map(|s| loaded.strategy_label(s)).collect::<Vec<_>>().join(", ")
            };
            println!("recommendation for {}:", args.agent);
            println!("  regret-minimising: {}", render(&regret_min));
            println!("  non-dominated: {}", render(&non_dominated));
            println!("  recommended: {}", render(&recommended));
        }
        Format::Structured => {
            print_structured(&json!({
                "command": "recommend",
                "scenario": loaded.name,
                "agent": args.agent,
                "regret_minimising": regret_min
                    .iter()
                    .map(|s| strategy_json(&loaded, s))
                    .collect::<Vec<_>>(),
                "non_dominated": non_dominated
                    .iter()
                    .map(|s| strategy_json(&loaded, s))
                    .collect::<Vec<_>>(),
                "recommended": recommended
                    .iter()
                    .map(|s| strategy_json(&loaded, s))
                    .collect::<Vec<_>>(),
            }));
        }
    }
    Ok(())
}

fn parse_caps(spec: &str) -> Result<InstanceCaps, Failure> {
    let mut caps = InstanceCaps::default();
    for pair in spec.split(',') {
        let (key, value) = pair
            .split_once('=')
            .ok_or_else(|| Failure::usage(format!("cap entry '{pair}' is not key=value")))?;
        let parse_usize = || {
            value
                .trim()
                .parse::<usize>()
                .map_err(|_| Failure::usage(format!("cap '{key}' needs a number, got '{value}'")))
        };
        match key.trim() {
            "agents" => caps.max_agents = parse_usize()?,
            "props" => caps.max_propositions = parse_usize()?,
            "actions" => caps.max_actions = parse_usize()?,
            "horizon" => caps.max_horizon = parse_usize()?,
            "depth" => caps.max_formula_depth = parse_usize()?,
            "levels" => caps.max_levels = parse_usize()?,
            "values" => caps.max_values_per_level = parse_usize()?,
            "ceiling" => {
                caps.strategy_ceiling = value.trim().parse::<u64>().map_err(|_| {
                    Failure::usage(format!("cap 'ceiling' needs a number, got '{value}'"))
                })?;
            }
            "pure_random" => {
                caps.pure_random = value.trim().parse::<bool>().map_err(|_| {
                    Failure::usage(format!("cap 'pure_random' needs true/false, got '{value}'"))
                })?;
            }
            other => return Err(Failure::usage(format!("unknown cap '{other}'"))),
        }
    }
    Ok(caps)
}

fn cmd_fuzz(args: FuzzArgs) -> Result<(), Failure> {
    if args.count == 0 {
        return Err(Failure::usage("--count must be at least 1"));
    }
    let seed = match (args.seed, args.format) {
        (Some(seed), _) => seed,
        (None, Format::Text) => 0,
        (None, Format::Structured) => {
            return Err(Failure::usage("structured fuzz output requires an explicit --seed"));
        }
    };
    let caps = match &args.caps {
        Some(spec) => parse_caps(spec)?,
        None => InstanceCaps::default(),
    };
    let report = fuzz(args.count, &caps, seed, args.jobs.max(1))?;
    match args.format {
        Format::Text => print!("{}", report.render_text()),
        Format::Structured => {
            print_structured(&json!({
                "command": "fuzz",
                "base_seed": report.base_seed,
                "count": report.instances.len(),
                "passed": report.passed(),
                "instances": report
                    .instances
                    .iter()
                    .map(|r| {
                        json!({
                            "seed": r.seed,
                            "descriptor": r.descriptor,
                            "passed": r.passed(),
                            "skipped": r.skipped,
                            "failed_claims": r
                                .claims
                                .iter()
                                .filter(|c| !c.passed)
                                .map(|c| json!({"name": c.name, "detail": c.detail}))
                                .collect::<Vec<_>>(),
                            "findings": r.findings,
                        })
                    })
                    .collect::<Vec<_>>(),
            }));
        }
    }
    if report.passed() {
        Ok(())
    } else {
        Err(Failure::theorem(format!("{} instance(s) failed", report.failures())))
    }
}

fn cmd_explain(args: ExplainArgs) -> Result<(), Failure> {
    let loaded = load(&args.common)?;
    let agent = resolve_agent(&loaded, &args.agent)?;
    let strategy = loaded.resolve_strategy(agent, &args.strategy)?;
    let comparisons = responsibility::rival_comparisons(&loaded.scenario, agent, &strategy)?;
    let label = loaded.strategy_label(&strategy);

    let avoidable = comparisons
        .iter()
        .any(|c| c.own_regret.violated().next().is_some());

    match args.common.format {
        Format::Text => {
            println!("explanation for {} playing {label}:", args.agent);
            if comparisons.is_empty() {
                println!("  no rival strategies to compare against.");
            }
            if !avoidable && !comparisons.is_empty() {
                println!("  no avoidable violations in any worst case.");
            }
            for versus in &comparisons {
                let rival = loaded.strategy_label(&versus.rival);
                println!(
                    "  against {rival}: worst-case regret {} score {} (opponents {})",
                    outcome_text(&loaded, &versus.own_regret),
                    versus.own_score,
                    joint_text(&loaded, &versus.own_witness)
                );
                println!(
                    "    {rival}'s own worst case against {label}: {} score {}",
                    outcome_text(&loaded, &versus.rival_regret),
                    versus.rival_score
                );
                let shared: Vec<String> = versus
                    .own_regret
                    .violated()
                    .filter(|v| versus.rival_regret.contains(v))
                    .map(|v| loaded.scenario.values.name_of(v.value).to_string())
                    .collect();
                if !shared.is_empty() {
                    println!(
                        "    both {label} and {rival} risk violating {}",
                        shared.join(", ")
                    );
                }
                let compensation: Vec<String> = versus
                    .own_regret
                    .iter()
                    .filter(|s| s.sign == valor_core::values::Sign::Satisfied)
                    .map(|s| loaded.scenario.values.name_of(s.value).to_string())
                    .collect();
                if !compensation.is_empty() {
                    println!(
                        "    {label} compensates by satisfying {}",
                        compensation.join(", ")
                    );
                }
                if versus.rival_dominates && !versus.dominates_rival {
                    println!("    {rival} weakly dominates {label}");
                }
            }
        }
        Format::Structured => {
            print_structured(&json!({
                "command": "explain",
                "scenario": loaded.name,
                "agent": args.agent,
                "strategy": strategy_json(&loaded, &strategy),
                "avoidable_violations": avoidable,
                "rivals": comparisons
                    .iter()
                    .map(|versus| {
                        json!({
                            "rival": strategy_json(&loaded, &versus.rival),
                            "own_regret": outcome_json(&loaded, &versus.own_regret),
                            "own_score": score_json(&versus.own_score),
                            "own_witness": joint_json(&loaded, &versus.own_witness),
                            "rival_regret": outcome_json(&loaded, &versus.rival_regret),
                            "rival_score": score_json(&versus.rival_score),
                            "rival_dominates": versus.rival_dominates,
                            "dominates_rival": versus.dominates_rival,
                        })
                    })
                    .collect::<Vec<_>>(),
            }));
        }
    }
    Ok(())
}
