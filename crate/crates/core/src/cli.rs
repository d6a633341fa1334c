//! The `ssmg` command line: one subcommand per capability, a JSON report on
//! standard output and a short summary on standard error.

use crate::analysis::{
    best_response_value, finite_state_payoff, payoff_string, stationary_payoff, verify_finite_state_ne, verify_ne,
    NeVerdict, Thresholds,
};
use crate::format::{game_to_json, load_game, load_profile, profile_to_json, save_game, save_profile};
use crate::game::{validate, InitializedGame};
use crate::profile::{FiniteStateProfile, Profile, StationaryProfile};
use crate::rational::{format_rational, parse_rational, parse_vector, Rational};
use crate::reductions::{
    bounded_payoff, counter_game, example_game, example_profile, gen_2cm_game, gen_sat_game, gen_sqrtsum_game,
    gp_max_payoff, intended_2cm_profile, parse_2cm, parse_dimacs, parse_sqrtsum, segment_probability,
    sqrtsum_threshold_check, update_holds, Label, RealBound, SqrtSumInstance, DEFAULT_COUNTER_CAP, EXAMPLE_NAMES,
};
use crate::solvers::{solve_posne, solve_statne, PosNeOutcome, SolverConfig, SolverError, StatNeOutcome, DEFAULT_POSNE_CAP};
use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::{json, Value};
use std::ffi::OsString;
use std::fmt;
use std::path::{Path, PathBuf};
use std::time::Instant;

pub const DEFAULT_STATNE_CAP: u64 = 1 << 16;
pub const DEFAULT_PRECISION: u32 = 64;

#[derive(Parser, Debug, Serialize)]
#[command(name = "ssmg", version, about = "Exact analysis of simple stochastic multiplayer games")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone, Default, Serialize)]
pub struct ThresholdArgs {
    /// lower payoff bounds, e.g. `1,0,1/2`
    #[arg(long)]
    pub x: Option<String>,
    /// upper payoff bounds
    #[arg(long)]
    pub y: Option<String>,
    /// shorthand for x = (1,0,…,0), y = (1,…,1)
    #[arg(long)]
    pub player0_wins: bool,
}

#[derive(Args, Debug, Clone, Serialize)]
#[group(required = true, multiple = false)]
pub struct InstanceArgs {
    /// file holding `d1 d2 … dn ; k`
    #[arg(long)]
    pub input: Option<PathBuf>,
    /// the instance inline, e.g. `"1 1 ; 2"`
    #[arg(long)]
    pub instance: Option<String>,
}

#[derive(Subcommand, Debug, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    /// Check a game file against the structural rules
    Validate {
        #[arg(long)]
        game: PathBuf,
    },
    /// Exact payoff of a profile
    Payoff {
        #[arg(long)]
        game: PathBuf,
        #[arg(long)]
        profile: PathBuf,
    },
    /// Best-response value of each player against a profile
    BestResponse {
        #[arg(long)]
        game: PathBuf,
        #[arg(long)]
        profile: PathBuf,
        /// report only this player
        #[arg(long)]
        player: Option<String>,
    },
    /// Check that a profile is an equilibrium with payoff inside the thresholds
    VerifyNe {
        #[arg(long)]
        game: PathBuf,
        #[arg(long)]
        profile: PathBuf,
        #[command(flatten)]
        thresholds: ThresholdArgs,
    },
    /// Search for a positional equilibrium
    SolvePosne {
        #[arg(long)]
        game: PathBuf,
        #[command(flatten)]
        thresholds: ThresholdArgs,
        /// give up when the game has more positional profiles than this
        #[arg(long, default_value_t = DEFAULT_POSNE_CAP)]
        cap: u64,
        /// write the profile found here
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Search for a stationary equilibrium with an external solver
    SolveStatne {
        #[arg(long)]
        game: PathBuf,
        #[command(flatten)]
        thresholds: ThresholdArgs,
        /// give up when the game has more supports than this
        #[arg(long, default_value_t = DEFAULT_STATNE_CAP)]
        cap: u64,
        /// solver command line; `{file}` is replaced by the query path
        #[arg(long, default_value = "z3 {file}")]
        solver_cmd: String,
        #[arg(long, default_value_t = 1)]
        jobs: usize,
        /// keep the query files in this directory
        #[arg(long)]
        keep_dir: Option<PathBuf>,
        /// write the profile found here
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Game from a DIMACS CNF formula
    GenSat {
        #[arg(long)]
        cnf: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Game from a square-root-sum instance
    GenSqrtsum {
        #[command(flatten)]
        instance: InstanceArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Game from a two-counter machine
    #[command(name = "gen-2cm")]
    #[serde(rename = "gen-2cm")]
    Gen2cm {
        #[arg(long)]
        machine: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Decide a square-root-sum instance through its payoff comparison
    SqrtsumCheck {
        #[command(flatten)]
        instance: InstanceArgs,
        /// binary digits for the per-gadget maximal payoffs
        #[arg(long, default_value_t = DEFAULT_PRECISION)]
        precision: u32,
    },
    /// Winning probability over two consecutive counter gadgets
    SegmentCheck {
        /// counter 1 or 2
        #[arg(long, default_value_t = 1)]
        counter: u8,
        /// label of the next stage: init, inc1, dec2, zero1, ...
        #[arg(long)]
        label: String,
        #[arg(long)]
        c: u64,
        #[arg(long)]
        c_next: u64,
    },
    /// Truncated exploration of a pure profile
    BoundedPayoff {
        #[arg(long, required_unless_present = "machine")]
        game: Option<PathBuf>,
        #[arg(long, requires = "game")]
        profile: Option<PathBuf>,
        /// use the counter-machine game and its intended profile instead
        #[arg(long, conflicts_with = "game")]
        machine: Option<PathBuf>,
        /// stages of the computation the intended profile follows
        #[arg(long, default_value_t = 40)]
        stages: usize,
        /// exploration depth in steps
        #[arg(long, default_value_t = 200)]
        horizon: usize,
    },
    /// Write one of the built-in example games and its documented profile
    Example {
        /// prop1, prop2 or prop3
        name: String,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        profile_out: Option<PathBuf>,
    },
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Validate { .. } => "validate",
            Command::Payoff { .. } => "payoff",
            Command::BestResponse { .. } => "best-response",
            Command::VerifyNe { .. } => "verify-ne",
            Command::SolvePosne { .. } => "solve-posne",
            Command::SolveStatne { .. } => "solve-statne",
            Command::GenSat { .. } => "gen-sat",
            Command::GenSqrtsum { .. } => "gen-sqrtsum",
            Command::Gen2cm { .. } => "gen-2cm",
            Command::SqrtsumCheck { .. } => "sqrtsum-check",
            Command::SegmentCheck { .. } => "segment-check",
            Command::BoundedPayoff { .. } => "bounded-payoff",
            Command::Example { .. } => "example",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Yes,
    No,
    Error,
    CapExceeded,
    SolverUnavailable,
}

impl Verdict {
    pub fn exit_code(self) -> i32 {
        match self {
            Verdict::Yes => 0,
            Verdict::No => 1,
            Verdict::Error => 2,
            Verdict::CapExceeded => 3,
            Verdict::SolverUnavailable => 4,
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Verdict::Yes => "yes",
            Verdict::No => "no",
            Verdict::Error => "error",
            Verdict::CapExceeded => "cap-exceeded",
            Verdict::SolverUnavailable => "solver-unavailable",
        };
        f.write_str(s)
    }
}

/// What every run prints on standard output.
#[derive(Debug, Clone, Serialize)]
pub struct RunReport {
    pub command: String,
    pub verdict: Verdict,
    pub result: Value,
    pub elapsed_ms: u64,
    pub flags: Value,
    /// one-line human summary, echoed on standard error
    #[serde(skip)]
    pub summary: String,
}

impl RunReport {
    pub fn exit_code(&self) -> i32 {
        self.verdict.exit_code()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serialises")
    }
}

struct Outcome {
    verdict: Verdict,
    result: Value,
    summary: String,
}

impl Outcome {
    fn new(verdict: Verdict, result: Value, summary: impl Into<String>) -> Self {
        Outcome {
            verdict,
            result,
            summary: summary.into(),
        }
    }
}

type CliResult = Result<Outcome, String>;

/// Parses `args` (program name first) and runs the command. Usage errors
/// come back as reports with verdict `error`; `--help` and `--version`
/// come back as `Err` with the text to print.
pub fn run_args<I, T>(args: I) -> Result<RunReport, String>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    match Cli::try_parse_from(args) {
        Ok(cli) => Ok(run(&cli.command)),
        Err(e) => match e.kind() {
            clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => Err(e.to_string()),
            _ => Ok(RunReport {
                command: String::new(),
                verdict: Verdict::Error,
                result: json!({ "message": e.to_string() }),
                elapsed_ms: 0,
                flags: Value::Null,
                summary: e.to_string().lines().next().unwrap_or_default().trim_start_matches("error: ").to_string(),
            }),
        },
    }
}

pub fn run(command: &Command) -> RunReport {
    let start = Instant::now();
    let outcome = dispatch(command).unwrap_or_else(|message| {
        Outcome::new(Verdict::Error, json!({ "message": message.clone() }), message)
    });
    RunReport {
        command: command.name().to_string(),
        verdict: outcome.verdict,
        result: outcome.result,
        elapsed_ms: start.elapsed().as_millis() as u64,
        flags: serde_json::to_value(command).unwrap_or(Value::Null),
        summary: outcome.summary,
    }
}

fn dispatch(command: &Command) -> CliResult {
    match command {
        Command::Validate { game } => cmd_validate(game),
        Command::Payoff { game, profile } => cmd_payoff(game, profile),
        Command::BestResponse { game, profile, player } => cmd_best_response(game, profile, player.as_deref()),
        Command::VerifyNe {
            game,
            profile,
            thresholds,
        } => cmd_verify_ne(game, profile, thresholds),
        Command::SolvePosne {
            game,
            thresholds,
            cap,
            out,
        } => cmd_solve_posne(game, thresholds, *cap, out.as_deref()),
        Command::SolveStatne {
            game,
            thresholds,
            cap,
            solver_cmd,
            jobs,
            keep_dir,
            out,
        } => {
            let config = SolverConfig {
                command: solver_cmd.clone(),
                jobs: *jobs,
                keep_dir: keep_dir.clone(),
            };
            cmd_solve_statne(game, thresholds, *cap, &config, out.as_deref())
        }
        Command::GenSat { cnf, out } => {
            let f = parse_dimacs(&read(cnf)?).map_err(|e| e.to_string())?;
            let ig = gen_sat_game(&f).map_err(|e| e.to_string())?;
            emit_game(&ig, out.as_deref(), "SAT game")
        }
        Command::GenSqrtsum { instance, out } => {
            let ig = gen_sqrtsum_game(&read_instance(instance)?).map_err(|e| e.to_string())?;
            emit_game(&ig, out.as_deref(), "square-root-sum game")
        }
        Command::Gen2cm { machine, out } => {
            let m = parse_2cm(&read(machine)?).map_err(|e| e.to_string())?;
            let ig = gen_2cm_game(&m).map_err(|e| e.to_string())?;
            emit_game(&ig, out.as_deref(), "counter-machine game")
        }
        Command::SqrtsumCheck { instance, precision } => cmd_sqrtsum_check(&read_instance(instance)?, *precision),
        Command::SegmentCheck {
            counter,
            label,
            c,
            c_next,
        } => cmd_segment_check(*counter, label, *c, *c_next),
        Command::BoundedPayoff {
            game,
            profile,
            machine,
            stages,
            horizon,
        } => cmd_bounded(game.as_deref(), profile.as_deref(), machine.as_deref(), *stages, *horizon),
        Command::Example {
            name,
            out,
            profile_out,
        } => cmd_example(name, out.as_deref(), profile_out.as_deref()),
    }
}

fn read(path: &Path) -> Result<String, String> {
    std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))
}

fn read_instance(args: &InstanceArgs) -> Result<SqrtSumInstance, String> {
    let text = match (&args.input, &args.instance) {
        (Some(p), _) => read(p)?,
        (None, Some(s)) => s.clone(),
        (None, None) => return Err("give --input or --instance".into()),
    };
    parse_sqrtsum(&text).map_err(|e| e.to_string())
}

fn game(path: &Path) -> Result<InitializedGame, String> {
    load_game(path).map_err(|e| e.to_string())
}

fn profile(ig: &InitializedGame, path: &Path) -> Result<Profile, String> {
    load_profile(ig, path).map_err(|e| e.to_string())
}

fn thresholds(ig: &InitializedGame, args: &ThresholdArgs) -> Result<Thresholds, String> {
    let n = ig.num_players();
    if args.player0_wins {
        if args.x.is_some() || args.y.is_some() {
            return Err("--player0-wins cannot be combined with --x or --y".into());
        }
        return Ok(Thresholds::player0_wins(n));
    }
    let unconstrained = Thresholds::unconstrained(n);
    let vector = |s: &Option<String>, default: Vec<Rational>| match s {
        Some(s) => parse_vector(s).map_err(|e| e.to_string()),
        None => Ok(default),
    };
    let x = vector(&args.x, unconstrained.lower)?;
    let y = vector(&args.y, unconstrained.upper)?;
    Thresholds::new(n, x, y).map_err(|e| e.to_string())
}

fn by_player(ig: &InitializedGame, values: &[Rational]) -> Value {
    let map: serde_json::Map<String, Value> = values
        .iter()
        .enumerate()
        .map(|(i, v)| (ig.player_name(i).to_string(), Value::String(format_rational(v))))
        .collect();
    Value::Object(map)
}

fn json_of(text: &str) -> Value {
    serde_json::from_str(text).expect("emitted JSON parses")
}

fn real(b: &RealBound) -> Value {
    match b.value() {
        Some(q) => json!({ "exact": format_rational(q) }),
        None => json!({
            "lower": format_rational(&b.lower),
            "upper": format_rational(&b.upper),
            "approx": b.midpoint_f64(),
            "radius": b.radius_f64(),
        }),
    }
}

fn as_stationary(ig: &InitializedGame, p: &Profile) -> Option<StationaryProfile> {
    match p {
        Profile::Positional(p) => Some(p.to_stationary()),
        Profile::Stationary(p) => Some(p.clone()),
        Profile::FiniteState(p) if p.is_memoryless() => Some(p.initial_positional(ig).to_stationary()),
        Profile::FiniteState(_) => None,
    }
}

fn check_ne(ig: &InitializedGame, p: &Profile, t: &Thresholds) -> Result<NeVerdict, String> {
    match (as_stationary(ig, p), p) {
        (Some(sp), _) => verify_ne(ig, &sp, t),
        (None, Profile::FiniteState(fsp)) => verify_finite_state_ne(ig, fsp, t),
        (None, _) => unreachable!(),
    }
    .map_err(|e| e.to_string())
}

fn cmd_validate(path: &Path) -> CliResult {
    let text = read(path)?;
    let (vg, initial) = crate::format::parse_vector_game(&text).map_err(|e| e.to_string())?;
    let g = vg.desugar().map_err(|e| e.to_string())?;
    let violations: Vec<String> = validate(&g).iter().map(|v| v.to_string()).collect();
    let known = g.vertex_index(&initial).is_some();
    let ok = violations.is_empty() && known;
    let mut problems = violations;
    if !known {
        problems.push(format!("initial vertex `{initial}` does not exist"));
    }
    let summary = if ok {
        format!("valid: {} vertices, {} players", g.num_vertices(), g.num_players())
    } else {
        format!("{} violation(s)", problems.len())
    };
    Ok(Outcome::new(
        if ok { Verdict::Yes } else { Verdict::No },
        json!({ "violations": problems, "vertices": g.num_vertices(), "players": g.players() }),
        summary,
    ))
}

fn cmd_payoff(game_path: &Path, profile_path: &Path) -> CliResult {
    let ig = game(game_path)?;
    let p = profile(&ig, profile_path)?;
    let payoff = match (as_stationary(&ig, &p), &p) {
        (Some(sp), _) => stationary_payoff(&ig, &sp),
        (None, Profile::FiniteState(fsp)) => finite_state_payoff(&ig, fsp),
        (None, _) => unreachable!(),
    }
    .map_err(|e| e.to_string())?;
    let s = payoff_string(&payoff);
    Ok(Outcome::new(
        Verdict::Yes,
        json!({ "kind": p.kind(), "payoff": s, "by_player": by_player(&ig, &payoff) }),
        format!("payoff ({s})"),
    ))
}

fn cmd_best_response(game_path: &Path, profile_path: &Path, player: Option<&str>) -> CliResult {
    let ig = game(game_path)?;
    let p = profile(&ig, profile_path)?;
    let players: Vec<usize> = match player {
        Some(name) => vec![ig
            .player_index(name)
            .ok_or_else(|| format!("unknown player `{name}`"))?],
        None => (0..ig.num_players()).collect(),
    };
    let values: Vec<Rational> = match as_stationary(&ig, &p) {
        Some(sp) => players
            .iter()
            .map(|&i| best_response_value(&ig, &sp, i).map(|r| r[ig.initial()].clone()))
            .collect::<Result<_, _>>()
            .map_err(|e| e.to_string())?,
        None => {
            let v = check_ne(&ig, &p, &Thresholds::unconstrained(ig.num_players()))?;
            players.iter().map(|&i| v.deviations[i].clone()).collect()
        }
    };
    let map: serde_json::Map<String, Value> = players
        .iter()
        .zip(&values)
        .map(|(&i, v)| (ig.player_name(i).to_string(), Value::String(format_rational(v))))
        .collect();
    Ok(Outcome::new(
        Verdict::Yes,
        json!({ "best_response": map }),
        format!("best responses ({})", payoff_string(&values)),
    ))
}

fn cmd_verify_ne(game_path: &Path, profile_path: &Path, t: &ThresholdArgs) -> CliResult {
    let ig = game(game_path)?;
    let p = profile(&ig, profile_path)?;
    let t = thresholds(&ig, t)?;
    let v = check_ne(&ig, &p, &t)?;
    let improving: Vec<&str> = v.improving_players().into_iter().map(|i| ig.player_name(i)).collect();
    let summary = format!(
        "payoff ({}); {}{}",
        payoff_string(&v.payoff),
        if v.is_equilibrium { "equilibrium" } else { "not an equilibrium" },
        if v.thresholds_met { "" } else { "; thresholds missed" }
    );
    Ok(Outcome::new(
        if v.accepted() { Verdict::Yes } else { Verdict::No },
        json!({
            "payoff": payoff_string(&v.payoff),
            "by_player": by_player(&ig, &v.payoff),
            "best_response": by_player(&ig, &v.deviations),
            "is_equilibrium": v.is_equilibrium,
            "thresholds_met": v.thresholds_met,
            "improving_players": improving,
        }),
        summary,
    ))
}

fn cmd_solve_posne(game_path: &Path, t: &ThresholdArgs, cap: u64, out: Option<&Path>) -> CliResult {
    let ig = game(game_path)?;
    let t = thresholds(&ig, t)?;
    match solve_posne(&ig, &t, cap).map_err(|e| e.to_string())? {
        PosNeOutcome::Found { profile, payoff } => {
            let p = Profile::Positional(profile);
            if let Some(path) = out {
                save_profile(&ig, &p, path).map_err(|e| e.to_string())?;
            }
            Ok(Outcome::new(
                Verdict::Yes,
                json!({ "payoff": payoff_string(&payoff), "profile": json_of(&profile_to_json(&ig, &p)) }),
                format!("positional equilibrium with payoff ({})", payoff_string(&payoff)),
            ))
        }
        PosNeOutcome::NotFound { leaves } => Ok(Outcome::new(
            Verdict::No,
            json!({ "profiles_checked": leaves }),
            "no positional equilibrium within the thresholds",
        )),
        PosNeOutcome::CapExceeded { count } => Ok(Outcome::new(
            Verdict::CapExceeded,
            json!({ "profiles": count.to_string(), "cap": cap }),
            format!("{count} positional profiles exceed the cap {cap}"),
        )),
    }
}

fn cmd_solve_statne(
    game_path: &Path,
    t: &ThresholdArgs,
    cap: u64,
    config: &SolverConfig,
    out: Option<&Path>,
) -> CliResult {
    let ig = game(game_path)?;
    let t = thresholds(&ig, t)?;
    match solve_statne(&ig, &t, config, cap) {
        Ok(StatNeOutcome::Found(report)) => {
            let edges: Vec<Value> = report
                .support
                .render(&ig)
                .into_iter()
                .map(|(v, w)| json!([v, w]))
                .collect();
            let profile = report.profile.map(Profile::Stationary);
            if let (Some(path), Some(p)) = (out, &profile) {
                save_profile(&ig, p, path).map_err(|e| e.to_string())?;
            }
            Ok(Outcome::new(
                Verdict::Yes,
                json!({
                    "support_index": report.index,
                    "support": edges,
                    "profile": profile.as_ref().map(|p| json_of(&profile_to_json(&ig, p))),
                    "witness": format!("{:?}", report.witness).to_lowercase(),
                }),
                format!("stationary equilibrium on support #{}", report.index),
            ))
        }
        Ok(StatNeOutcome::NotFound { supports }) => Ok(Outcome::new(
            Verdict::No,
            json!({ "supports_checked": supports }),
            "no stationary equilibrium within the thresholds",
        )),
        Ok(StatNeOutcome::CapExceeded { count }) => Ok(Outcome::new(
            Verdict::CapExceeded,
            json!({ "supports": count.to_string(), "cap": cap }),
            format!("{count} supports exceed the cap {cap}"),
        )),
        Err(SolverError::Unavailable(cmd)) => Ok(Outcome::new(
            Verdict::SolverUnavailable,
            json!({ "solver": cmd }),
            format!("solver `{cmd}` is not available"),
        )),
        Err(e) => Err(e.to_string()),
    }
}

fn emit_game(ig: &InitializedGame, out: Option<&Path>, what: &str) -> CliResult {
    let mut result = json!({
        "vertices": ig.num_vertices(),
        "players": ig.players(),
        "initial": ig.name(ig.initial()),
    });
    match out {
        Some(path) => {
            save_game(ig, path).map_err(|e| e.to_string())?;
            result["path"] = json!(path.display().to_string());
        }
        None => result["game"] = json_of(&game_to_json(ig)),
    }
    Ok(Outcome::new(
        Verdict::Yes,
        result,
        format!("{what}: {} vertices", ig.num_vertices()),
    ))
}

fn cmd_sqrtsum_check(inst: &SqrtSumInstance, precision: u32) -> CliResult {
    let check = sqrtsum_threshold_check(inst);
    let gadgets: Vec<Value> = inst
        .continuation_probabilities()
        .iter()
        .map(|p| {
            let g = gp_max_payoff(p, precision).map_err(|e| e.to_string())?;
            Ok(json!({ "p": format_rational(p), "max_payoff": real(&g.value), "x": real(&g.x) }))
        })
        .collect::<Result<_, String>>()?;
    let rel = if check.tie {
        "="
    } else if check.yes {
        ">"
    } else {
        "<"
    };
    Ok(Outcome::new(
        if check.yes { Verdict::Yes } else { Verdict::No },
        json!({
            "lhs": real(&check.lhs),
            "rhs": format_rational(&check.rhs),
            "tie": check.tie,
            "bits": check.bits,
            "gadgets": gadgets,
        }),
        format!("sum of roots {rel} {}", inst.k()),
    ))
}

fn cmd_segment_check(j: u8, label: &str, c: u64, c_next: u64) -> CliResult {
    if j != 1 && j != 2 {
        return Err(format!("counter must be 1 or 2, not {j}"));
    }
    let label: Label = label.parse()?;
    let p = segment_probability(j, label, c, c_next).map_err(|e| e.to_string())?;
    let quarter = parse_rational("1/4").unwrap();
    let hits = p.as_ref() == Some(&quarter);
    let holds = update_holds(j, label, c, c_next);
    Ok(Outcome::new(
        if hits { Verdict::Yes } else { Verdict::No },
        json!({
            "probability": p.as_ref().map(format_rational),
            "equals_quarter": hits,
            "update_holds": holds,
        }),
        match &p {
            Some(q) => format!("probability {}", format_rational(q)),
            None => format!("the {label} gadget cannot loop"),
        },
    ))
}

fn cmd_bounded(
    game_path: Option<&Path>,
    profile_path: Option<&Path>,
    machine: Option<&Path>,
    stages: usize,
    horizon: usize,
) -> CliResult {
    let (ig, fsp, note): (InitializedGame, FiniteStateProfile, Value) = match (game_path, machine) {
        (_, Some(m)) => {
            let m = parse_2cm(&read(m)?).map_err(|e| e.to_string())?;
            let cg = counter_game(&m, false).map_err(|e| e.to_string())?;
            let ip = intended_2cm_profile(&cg, stages, DEFAULT_COUNTER_CAP).map_err(|e| e.to_string())?;
            let note = json!({ "stages": ip.configs.len(), "halted": ip.halted });
            (cg.game, ip.profile, note)
        }
        (Some(g), None) => {
            let ig = game(g)?;
            let p = match profile_path {
                Some(path) => profile(&ig, path)?,
                None => return Err("--profile is required with --game".into()),
            };
            let fsp = match p {
                Profile::Positional(p) => p.to_finite_state(&ig),
                Profile::FiniteState(f) => f,
                Profile::Stationary(s) => match s.as_positional() {
                    Some(p) => p.to_finite_state(&ig),
                    None => return Err("bounded exploration needs a pure profile".into()),
                },
            };
            (ig, fsp, Value::Null)
        }
        (None, None) => return Err("give --game and --profile, or --machine".into()),
    };
    let bounds = bounded_payoff(&ig, &fsp, horizon);
    let map: serde_json::Map<String, Value> = bounds
        .iter()
        .enumerate()
        .map(|(i, b)| {
            (
                ig.player_name(i).to_string(),
                json!({ "lower": format_rational(&b.lower), "upper": format_rational(&b.upper) }),
            )
        })
        .collect();
    let open = bounds.first().map(|b| b.width()).unwrap_or_default();
    Ok(Outcome::new(
        Verdict::Yes,
        json!({ "horizon": horizon, "bounds": map, "unexplored": format_rational(&open), "intended": note }),
        format!("explored {horizon} steps, unexplored mass {}", format_rational(&open)),
    ))
}

fn cmd_example(name: &str, out: Option<&Path>, profile_out: Option<&Path>) -> CliResult {
    let ig = example_game(name).map_err(|e| format!("{e}; choose one of {}", EXAMPLE_NAMES.join(", ")))?;
    let p = example_profile(name, &ig).map_err(|e| e.to_string())?;
    let mut result = json!({ "name": name, "vertices": ig.num_vertices(), "profile_kind": p.kind() });
    match out {
        Some(path) => {
            save_game(&ig, path).map_err(|e| e.to_string())?;
            result["path"] = json!(path.display().to_string());
        }
        None => result["game"] = json_of(&game_to_json(&ig)),
    }
    if let Some(path) = profile_out {
        save_profile(&ig, &p, path).map_err(|e| e.to_string())?;
        result["profile_path"] = json!(path.display().to_string());
    }
    Ok(Outcome::new(Verdict::Yes, result, format!("example {name}: {} vertices", ig.num_vertices())))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exit_codes_are_fixed() {
        let codes: Vec<i32> = [
            Verdict::Yes,
            Verdict::No,
            Verdict::Error,
            Verdict::CapExceeded,
            Verdict::SolverUnavailable,
        ]
        .iter()
        .map(|v| v.exit_code())
        .collect();
        assert_eq!(codes, vec![0, 1, 2, 3, 4]);
    }

    #[test]
    fn missing_file_is_an_input_error() {
        let r = run_args(["ssmg", "payoff", "--game", "/nonexistent/game.json", "--profile", "p.json"]).unwrap();
        assert_eq!(r.verdict, Verdict::Error);
        assert_eq!(r.exit_code(), 2);
    }

    #[test]
    fn usage_errors_exit_with_two() {
        let r = run_args(["ssmg", "verify-ne"]).unwrap();
        assert_eq!(r.exit_code(), 2);
        assert!(run_args(["ssmg", "--help"]).is_err());
    }

    #[test]
    fn segment_report() {
        let r = run_args(["ssmg", "segment-check", "--label", "inc1", "--c", "0", "--c-next", "1"]).unwrap();
        assert_eq!(r.verdict, Verdict::Yes);
        assert_eq!(r.result["probability"], "1/4");
        assert_eq!(r.result["update_holds"], true);
    }

    #[test]
    fn sqrtsum_report() {
        let r = run_args(["ssmg", "sqrtsum-check", "--instance", "2 2 ; 3"]).unwrap();
        assert_eq!(r.verdict, Verdict::No);
        let r = run_args(["ssmg", "sqrtsum-check", "--instance", "1 1 ; 2"]).unwrap();
        assert_eq!(r.verdict, Verdict::Yes);
        assert_eq!(r.result["lhs"]["exact"], "5/32");
    }
}
