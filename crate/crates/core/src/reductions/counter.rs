use super::bounded::bounded_payoff;
use super::ReductionError;
use crate::game::{GameBuilder, InitializedGame, PlayerId, VertexId};
use crate::profile::{FiniteStateProfile, FiniteStateStrategy};
use crate::rational::{int, ratio, Rational};
use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

pub const DEFAULT_COUNTER_CAP: u64 = 1_000;

/// One machine instruction. Instruction numbers are 1-based.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Instruction {
    /// increment counter `counter`, continue at `next`
    Inc { counter: u8, next: usize },
    /// if counter `counter` is zero continue at `zero`, otherwise decrement
    /// it and continue at `dec`
    Test { counter: u8, zero: usize, dec: usize },
    Halt,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TwoCounterMachine {
    instructions: Vec<Instruction>,
}

/// Instruction number and the two counter values.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Config {
    pub instruction: usize,
    pub counters: [u64; 2],
}

impl TwoCounterMachine {
    pub fn new(instructions: Vec<Instruction>) -> Result<Self, ReductionError> {
        let m = instructions.len();
        if m == 0 {
            return Err(ReductionError::Machine("no instructions".into()));
        }
        let target = |k: usize, at: usize| {
            if k == 0 || k > m {
                Err(ReductionError::Machine(format!("instruction {at} jumps to {k}, outside 1..={m}")))
            } else {
                Ok(())
            }
        };
        let counter = |j: u8, at: usize| {
            if j == 1 || j == 2 {
                Ok(())
            } else {
                Err(ReductionError::Machine(format!("instruction {at} names counter {j}")))
            }
        };
        for (k, ins) in instructions.iter().enumerate() {
            let at = k + 1;
            match *ins {
                Instruction::Inc { counter: j, next } => {
                    counter(j, at)?;
                    target(next, at)?;
                }
                Instruction::Test { counter: j, zero, dec } => {
                    counter(j, at)?;
                    target(zero, at)?;
                    target(dec, at)?;
                    if zero == dec {
                        return Err(ReductionError::Machine(format!(
                            "instruction {at} has equal branch targets"
                        )));
                    }
                }
                Instruction::Halt => {}
            }
        }
        Ok(TwoCounterMachine { instructions })
    }

    pub fn instructions(&self) -> &[Instruction] {
        &self.instructions
    }

    pub fn instruction(&self, i: usize) -> Instruction {
        self.instructions[i - 1]
    }

    pub fn start() -> Config {
        Config {
            instruction: 1,
            counters: [0, 0],
        }
    }

    /// The successor configuration and the label of the update, or `None`
    /// at a halt instruction.
    pub fn step(&self, c: Config) -> Option<(Config, Label)> {
        let mut counters = c.counters;
        match self.instruction(c.instruction) {
            Instruction::Inc { counter, next } => {
                counters[counter as usize - 1] += 1;
                Some((Config { instruction: next, counters }, Label::Inc(counter)))
            }
            Instruction::Test { counter, zero, dec } => {
                let x = &mut counters[counter as usize - 1];
                if *x == 0 {
                    Some((Config { instruction: zero, counters }, Label::Zero(counter)))
                } else {
                    *x -= 1;
                    Some((Config { instruction: dec, counters }, Label::Dec(counter)))
                }
            }
            Instruction::Halt => None,
        }
    }
}

/// Reads one instruction per line: `inc j k`, `test j k l` or `halt`.
/// Blank lines and `#` comments are skipped.
pub fn parse_2cm(text: &str) -> Result<TwoCounterMachine, ReductionError> {
    let mut out = Vec::new();
    for (k, raw) in text.lines().enumerate() {
        let err = |message: String| ReductionError::Parse { line: k + 1, message };
        let line = raw.split('#').next().unwrap().trim();
        if line.is_empty() {
            continue;
        }
        let parts: Vec<&str> = line.split_whitespace().collect();
        let num = |s: &str| s.parse::<usize>().map_err(|_| err(format!("bad number `{s}`")));
        let ctr = |s: &str| s.parse::<u8>().map_err(|_| err(format!("bad counter `{s}`")));
        let ins = match parts.as_slice() {
            ["inc", j, k] => Instruction::Inc {
                counter: ctr(j)?,
                next: num(k)?,
            },
            ["test", j, k, l] => Instruction::Test {
                counter: ctr(j)?,
                zero: num(k)?,
                dec: num(l)?,
            },
            ["halt"] => Instruction::Halt,
            _ => return Err(err(format!("unknown instruction `{line}`"))),
        };
        out.push(ins);
    }
    TwoCounterMachine::new(out)
}

/// The kind of counter update that led into a configuration.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Label {
    Init,
    Inc(u8),
    Dec(u8),
    Zero(u8),
}

impl Label {
    pub const ALL: [Label; 7] = [
        Label::Init,
        Label::Inc(1),
        Label::Inc(2),
        Label::Dec(1),
        Label::Dec(2),
        Label::Zero(1),
        Label::Zero(2),
    ];

    /// Whether the counter gadget for counter `j` has the grey loop.
    fn loops(self, j: u8) -> bool {
        !matches!(self, Label::Init) && self != Label::Zero(j)
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Label::Init => write!(f, "init"),
            Label::Inc(j) => write!(f, "inc{j}"),
            Label::Dec(j) => write!(f, "dec{j}"),
            Label::Zero(j) => write!(f, "zero{j}"),
        }
    }
}

impl FromStr for Label {
    type Err = String;

    /// Accepts `init`, `inc1`, `inc(1)` and the like.
    fn from_str(s: &str) -> Result<Self, String> {
        let t: String = s.chars().filter(|c| !"() ".contains(*c)).collect();
        if t == "init" {
            return Ok(Label::Init);
        }
        let (kind, j) = t.split_at(t.len().saturating_sub(1));
        let j = match j {
            "1" => 1,
            "2" => 2,
            _ => return Err(format!("unknown label `{s}`")),
        };
        match kind {
            "inc" => Ok(Label::Inc(j)),
            "dec" => Ok(Label::Dec(j)),
            "zero" => Ok(Label::Zero(j)),
            _ => Err(format!("unknown label `{s}`")),
        }
    }
}

/// Whether counter `j` moving from `c` to `c_next` is the update that
/// `label` prescribes. `init` and `zero(j)` both pin the counter to zero.
pub fn update_holds(j: u8, label: Label, c: u64, c_next: u64) -> bool {
    match label {
        Label::Inc(k) if k == j => c_next == c + 1,
        Label::Dec(k) if k == j => c >= 1 && c_next == c - 1,
        Label::Zero(k) if k == j => c == 0 && c_next == 0,
        Label::Init => c == 0 && c_next == 0,
        _ => c_next == c,
    }
}

/// Player indices: `0`, then `A1_0, B1_0, A2_0, B2_0, A1_1, B1_1, A2_1, B2_1`.
fn a_player(j: u8, t: u8) -> PlayerId {
    1 + 4 * t as usize + 2 * (j as usize - 1)
}

fn b_player(j: u8, t: u8) -> PlayerId {
    a_player(j, t) + 1
}

const PLAYERS: [&str; 9] = ["0", "A1_0", "B1_0", "A2_0", "B2_0", "A1_1", "B1_1", "A2_1", "B2_1"];

/// Vertices of a simulation gadget.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SGadget {
    /// the four chain vertices, the first one black
    pub chain: [VertexId; 4],
    pub split: VertexId,
}

/// Vertices of a counter gadget.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CGadget {
    pub entry: VertexId,
    pub grey: Option<VertexId>,
}

/// A generated counter-machine game with its gadget index.
#[derive(Debug, Clone)]
pub struct CounterGame {
    pub game: InitializedGame,
    pub machine: TwoCounterMachine,
    /// keyed by (parity, instruction, label)
    pub s: BTreeMap<(u8, usize, Label), SGadget>,
    /// keyed by (parity, counter, label)
    pub c: BTreeMap<(u8, u8, Label), CGadget>,
    /// keyed by (parity, instruction, label)
    pub i: BTreeMap<(u8, usize, Label), VertexId>,
    /// the added initial choice and its owner, if any
    pub entry: Option<(VertexId, PlayerId)>,
}

impl CounterGame {
    pub fn black(&self, t: u8, i: usize, label: Label) -> Option<VertexId> {
        self.s.get(&(t, i, label)).map(|g| g.chain[0])
    }
}

struct Gadgets {
    b: GameBuilder,
    extra: Option<PlayerId>,
    s: BTreeMap<(u8, usize, Label), SGadget>,
    c: BTreeMap<(u8, u8, Label), CGadget>,
    i: BTreeMap<(u8, usize, Label), VertexId>,
    pending: Vec<(u8, usize, Label)>,
}

impl Gadgets {
    fn new(extra: bool) -> Self {
        let mut players: Vec<&str> = PLAYERS.to_vec();
        if extra {
            players.push("1");
        }
        Gadgets {
            b: GameBuilder::new(&players),
            extra: extra.then_some(PLAYERS.len()),
            s: BTreeMap::new(),
            c: BTreeMap::new(),
            i: BTreeMap::new(),
            pending: Vec::new(),
        }
    }

    /// A terminal won by player 0 and the given players.
    fn counter_terminal(&mut self, name: String, others: [PlayerId; 2]) -> VertexId {
        let mut winners = vec![0, others[0], others[1]];
        winners.extend(self.extra);
        self.b.winning_terminal(name, &winners)
    }

    fn exit_terminal(&mut self, name: String, share: Rational) -> VertexId {
        let mut payoff = vec![int(0)];
        payoff.extend(std::iter::repeat(share).take(8));
        if self.extra.is_some() {
            payoff.push(int(0));
        }
        self.b.payoff_terminal(name, payoff)
    }

    fn counter_gadget(&mut self, t: u8, j: u8, label: Label) -> CGadget {
        if let Some(&g) = self.c.get(&(t, j, label)) {
            return g;
        }
        let p = format!("C{t}[{j},{label}]");
        let u = 1 - t;
        let aa = [a_player(j, t), a_player(j, u)];
        let ab = [a_player(j, t), b_player(j, u)];
        let bb = [b_player(j, t), b_player(j, u)];
        let exits = match label {
            Label::Inc(k) if k == j => [aa, ab, ab],
            Label::Dec(k) if k == j => [ab, ab, aa],
            _ => [ab, aa, ab],
        };
        let entry = self.b.owned(format!("{p}.c0"), 0);
        let steps: Vec<VertexId> = (1..=3).map(|k| self.b.stochastic(format!("{p}.s{k}"))).collect();
        let ends: Vec<VertexId> = (0..3)
            .map(|k| self.counter_terminal(format!("{p}.t{}", k + 1), exits[k]))
            .collect();
        let last = self.counter_terminal(format!("{p}.t4"), bb);
        let half = ratio(1, 2);
        self.b.edge(entry, steps[0]);
        for k in 0..3 {
            let next = if k < 2 { steps[k + 1] } else { last };
            self.b
                .prob_edge(steps[k], next, half.clone())
                .prob_edge(steps[k], ends[k], half.clone());
        }
        let grey = label.loops(j).then(|| {
            let g = self.b.stochastic(format!("{p}.grey"));
            let out = self.counter_terminal(format!("{p}.grey.exit"), ab);
            self.b.edge(entry, g);
            self.b.prob_edge(g, out, half.clone()).prob_edge(g, entry, half.clone());
            g
        });
        let g = CGadget { entry, grey };
        self.c.insert((t, j, label), g);
        g
    }

    fn sim_gadget(&mut self, t: u8, i: usize, label: Label) -> VertexId {
        if let Some(g) = self.s.get(&(t, i, label)) {
            return g.chain[0];
        }
        let p = format!("S{t}[{i},{label}]");
        let tags = ["A1", "B1", "A2", "B2"];
        let owners = [a_player(1, t), b_player(1, t), a_player(2, t), b_player(2, t)];
        let chain: Vec<VertexId> = (0..4).map(|k| self.b.owned(format!("{p}.{}", tags[k]), owners[k])).collect();
        let split = self.b.stochastic(format!("{p}.split"));
        for k in 0..4 {
            let share = if k % 2 == 0 { ratio(1, 3) } else { ratio(1, 6) };
            let exit = self.exit_terminal(format!("{p}.{}.exit", tags[k]), share);
            let next = if k < 3 { chain[k + 1] } else { split };
            self.b.edge(chain[k], next).edge(chain[k], exit);
        }
        let c1 = self.counter_gadget(t, 1, label);
        let c2 = self.counter_gadget(t, 2, label);
        let iv = self.b.owned(format!("I{t}[{i},{label}]"), 0);
        self.i.insert((t, i, label), iv);
        self.pending.push((t, i, label));
        self.b
            .prob_edge(split, iv, ratio(1, 2))
            .prob_edge(split, c1.entry, ratio(1, 4))
            .prob_edge(split, c2.entry, ratio(1, 4));
        self.s.insert(
            (t, i, label),
            SGadget {
                chain: [chain[0], chain[1], chain[2], chain[3]],
                split,
            },
        );
        chain[0]
    }

    fn wire_instructions(&mut self, m: &TwoCounterMachine) {
        while let Some((t, i, label)) = self.pending.pop() {
            let iv = self.i[&(t, i, label)];
            let u = 1 - t;
            match m.instruction(i) {
                Instruction::Inc { counter, next } => {
                    let w = self.sim_gadget(u, next, Label::Inc(counter));
                    self.b.edge(iv, w);
                }
                Instruction::Test { counter, zero, dec } => {
                    let z = self.sim_gadget(u, zero, Label::Zero(counter));
                    let d = self.sim_gadget(u, dec, Label::Dec(counter));
                    self.b.edge(iv, z).edge(iv, d);
                }
                Instruction::Halt => {
                    let h = self.b.terminal(format!("I{t}[{i},{label}].halt"));
                    self.b.edge(iv, h);
                }
            }
        }
    }
}

/// Builds every gadget reachable from the black vertex of `S0[1,init]`.
/// With `extra_player`, a tenth player `1` gets a new initial vertex `v1`
/// that either enters the simulation or exits to a terminal only that player wins,
/// and it also wins wherever player 0 wins.
pub fn counter_game(m: &TwoCounterMachine, extra_player: bool) -> Result<CounterGame, ReductionError> {
    let mut g = Gadgets::new(extra_player);
    let v0 = g.sim_gadget(0, 1, Label::Init);
    g.wire_instructions(m);
    let (initial, entry) = match g.extra {
        Some(p) => {
            let v1 = g.b.owned("v1", p);
            let exit = g.b.winning_terminal("v1.exit", &[p]);
            g.b.edge(v1, v0).edge(v1, exit);
            (v1, Some((v1, p)))
        }
        None => (v0, None),
    };
    let game = InitializedGame::new(g.b.build().desugar()?, initial)?;
    Ok(CounterGame {
        game,
        machine: m.clone(),
        s: g.s,
        c: g.c,
        i: g.i,
        entry,
    })
}

/// The nine-player game simulating `m`.
pub fn gen_2cm_game(m: &TwoCounterMachine) -> Result<InitializedGame, ReductionError> {
    Ok(counter_game(m, false)?.game)
}

/// A finite truncation of the equilibrium that follows the computation.
#[derive(Debug, Clone)]
pub struct IntendedProfile {
    pub profile: FiniteStateProfile,
    /// the simulated configurations, in order
    pub configs: Vec<Config>,
    /// label of each configuration (the update that led into it)
    pub labels: Vec<Label>,
    /// the machine reached a halt instruction within the horizon
    pub halted: bool,
    pub horizon: usize,
}

impl IntendedProfile {
    /// Counter values, i.e. grey-loop counts, at each stage.
    pub fn loop_counts(&self) -> Vec<[u64; 2]> {
        self.configs.iter().map(|c| c.counters).collect()
    }
}

/// Player 0 follows the first `horizon` configurations of the computation:
/// its memory is the number of black vertices seen (capped just past the
/// horizon) and the number of grey loops taken in the current counter
/// gadget. Every other player moves down the chain. Past the horizon
/// player 0 takes the lowest-index successor everywhere.
pub fn intended_2cm_profile(cg: &CounterGame, horizon: usize, counter_cap: u64) -> Result<IntendedProfile, ReductionError> {
    let m = &cg.machine;
    let mut configs = vec![TwoCounterMachine::start()];
    let mut labels = vec![Label::Init];
    let mut halted = false;
    while configs.len() < horizon {
        match m.step(*configs.last().unwrap()) {
            Some((c, l)) => {
                if c.counters.iter().any(|&x| x > counter_cap) {
                    return Err(ReductionError::CounterCapExceeded {
                        step: configs.len(),
                        cap: counter_cap,
                    });
                }
                configs.push(c);
                labels.push(l);
            }
            None => {
                halted = true;
                break;
            }
        }
    }
    if !halted && configs.len() == horizon && matches!(m.instruction(configs[horizon - 1].instruction), Instruction::Halt) {
        halted = true;
    }
    let top = configs.iter().flat_map(|c| c.counters).max().unwrap_or(0) as usize;
    let stages = configs.len();
    let width = top + 1;
    let mem = |n: usize, k: usize| n * width + k;
    let game = &cg.game;

    let mut zero = FiniteStateStrategy {
        memory: (0..=stages + 1)
            .flat_map(|n| (0..width).map(move |k| format!("n{n}m{k}")))
            .collect(),
        initial: 0,
        update: BTreeMap::new(),
        choice: BTreeMap::new(),
    };
    for s in cg.s.values() {
        for n in 0..=stages + 1 {
            for k in 0..width {
                zero.update.insert((mem(n, k), s.chain[0]), mem((n + 1).min(stages + 1), 0));
            }
        }
    }
    for (s, (cfg, &label)) in configs.iter().zip(&labels).enumerate() {
        let n = s + 1;
        let t = (s % 2) as u8;
        for j in [1u8, 2] {
            let g = cg.c[&(t, j, label)];
            let Some(grey) = g.grey else { continue };
            let c = cfg.counters[j as usize - 1] as usize;
            for k in 0..c {
                zero.choice.insert((mem(n, k), g.entry), grey);
                zero.update.insert((mem(n, k), grey), mem(n, k + 1));
            }
        }
        let iv = cg.i[&(t, cfg.instruction, label)];
        let target = match m.instruction(cfg.instruction) {
            Instruction::Inc { counter, next } => cg.black(1 - t, next, Label::Inc(counter)),
            Instruction::Test { counter, zero: z, dec } => {
                if cfg.counters[counter as usize - 1] == 0 {
                    cg.black(1 - t, z, Label::Zero(counter))
                } else {
                    cg.black(1 - t, dec, Label::Dec(counter))
                }
            }
            Instruction::Halt => None,
        };
        if let Some(w) = target {
            for k in 0..width {
                zero.choice.insert((mem(n, k), iv), w);
            }
        }
    }

    let mut strategies = vec![zero];
    for _ in 1..game.num_players() {
        strategies.push(FiniteStateStrategy::memoryless());
    }
    for s in cg.s.values() {
        for k in 0..4 {
            let v = s.chain[k];
            let next = if k < 3 { s.chain[k + 1] } else { s.split };
            let owner = game.owner(v).unwrap();
            strategies[owner].choice.insert((0, v), next);
        }
    }
    if let Some((v1, p)) = cg.entry {
        let v0 = cg.black(0, 1, Label::Init).unwrap();
        strategies[p].choice.insert((0, v1), v0);
    }
    Ok(IntendedProfile {
        profile: FiniteStateProfile::new(game, strategies)?,
        configs,
        labels,
        halted,
        horizon,
    })
}

/// The probability that player `A_j` of the current parity wins inside the
/// counter gadget of the current stage or the one of the next stage, when
/// player 0 loops `c` and `c_next` times through their grey vertices and
/// the next stage carries `label`. Evaluated on a game assembled from the
/// same gadgets, entered with probabilities 1/4 and 1/8. `None` when
/// `c_next > 0` but the next gadget has no loop.
pub fn segment_probability(j: u8, label: Label, c: u64, c_next: u64) -> Result<Option<Rational>, ReductionError> {
    if !label.loops(j) && c_next > 0 {
        return Ok(None);
    }
    let mut g = Gadgets::new(false);
    let root = g.b.stochastic("root");
    let rest = g.b.terminal("rest");
    let here = g.counter_gadget(0, j, Label::Inc(j));
    let next = g.counter_gadget(1, j, label);
    g.b.prob_edge(root, here.entry, ratio(1, 4))
        .prob_edge(root, next.entry, ratio(1, 8))
        .prob_edge(root, rest, ratio(5, 8));
    let ig = InitializedGame::new(g.b.build().desugar()?, root)?;

    let top = c.max(c_next) as usize;
    let mut zero = FiniteStateStrategy {
        memory: (0..=top).map(|k| format!("m{k}")).collect(),
        initial: 0,
        update: BTreeMap::new(),
        choice: BTreeMap::new(),
    };
    for (gadget, loops) in [(here, c as usize), (next, c_next as usize)] {
        if let Some(grey) = gadget.grey {
            for k in 0..loops {
                zero.choice.insert((k, gadget.entry), grey);
                zero.update.insert((k, grey), k + 1);
            }
        }
    }
    let mut strategies = vec![zero];
    strategies.extend((1..PLAYERS.len()).map(|_| FiniteStateStrategy::memoryless()));
    let profile = FiniteStateProfile::new(&ig, strategies)?;
    let bounds = bounded_payoff(&ig, &profile, 2 * top + 8);
    let b = &bounds[a_player(j, 0)];
    debug_assert_eq!(b.lower, b.upper);
    Ok(Some(b.lower.clone()))
}
