//! Game graphs: player-owned, stochastic and terminal vertices.
//!
//! A [`Game`] is assembled with a [`GameBuilder`], which yields a
//! [`VectorPayoffGame`]: terminals may carry either 0/1 membership in the
//! winning sets or an arbitrary rational payoff vector. [`VectorPayoffGame::desugar`]
//! replaces every payoff vector by a uniform lottery over 0/1 terminals.
//!
//! Terminals are stored with an explicit self-loop (probability 1 for
//! stochastic terminals, unlabelled for owned ones).

use crate::rational::{format_rational, is_probability, Rational};
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

/// Dense vertex index.
pub type VertexId = usize;
/// Dense player index; player 0 is the first listed player.
pub type PlayerId = usize;

/// Upper bound on the number of branches introduced for one payoff vector.
pub const DEFAULT_LOTTERY_CAP: u64 = 1_000_000;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Edge {
    pub to: VertexId,
    /// `Some` iff the source vertex is stochastic.
    pub prob: Option<Rational>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum GameError {
    #[error("game violates {} structural rule(s): {}", .0.len(), join_violations(.0))]
    Invalid(Vec<Violation>),
    #[error("unknown vertex `{0}`")]
    UnknownVertex(String),
    #[error("unknown player `{0}`")]
    UnknownPlayer(String),
    #[error("duplicate vertex id `{0}`")]
    DuplicateVertex(String),
    #[error("duplicate player id `{0}`")]
    DuplicatePlayer(String),
    #[error("payoff at `{vertex}` for player {player} is {value}, outside [0,1]")]
    PayoffOutOfRange {
        vertex: String,
        player: String,
        value: String,
    },
    #[error("payoff vertex `{0}` is not a terminal")]
    PayoffNotTerminal(String),
    #[error("vertex `{0}` has both a payoff vector and winning-set membership")]
    PayoffAndWinSet(String),
    #[error("payoff at `{vertex}` needs {branches} lottery branches, above the cap of {cap}")]
    LotteryTooLarge {
        vertex: String,
        branches: String,
        cap: u64,
    },
}

fn join_violations(v: &[Violation]) -> String {
    v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join("; ")
}

/// One broken structural rule. Vertices are reported by name.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    UnknownOwner { vertex: String, owner: PlayerId },
    EdgeTargetOutOfRange { from: String, to: VertexId },
    LabelledOwnedEdge { from: String, to: String },
    UnlabelledStochasticEdge { from: String, to: String },
    DuplicateEdge { from: String, to: String },
    ProbOutOfRange { from: String, to: String, prob: String },
    ProbSumViolation { vertex: String, sum: String },
    EmptySuccessors { vertex: String },
    TerminalNotSink { player: String, vertex: String },
    WinSetOutOfRange { player: String, vertex: VertexId },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::UnknownOwner { vertex, owner } => {
                write!(f, "vertex `{vertex}` owned by unknown player #{owner}")
            }
            Violation::EdgeTargetOutOfRange { from, to } => {
                write!(f, "edge from `{from}` to nonexistent vertex #{to}")
            }
            Violation::LabelledOwnedEdge { from, to } => {
                write!(f, "edge `{from}` -> `{to}` carries a probability but `{from}` is owned")
            }
            Violation::UnlabelledStochasticEdge { from, to } => {
                write!(f, "edge `{from}` -> `{to}` lacks a probability but `{from}` is stochastic")
            }
            Violation::DuplicateEdge { from, to } => {
                write!(f, "more than one edge `{from}` -> `{to}`")
            }
            Violation::ProbOutOfRange { from, to, prob } => {
                write!(f, "edge `{from}` -> `{to}` has probability {prob} outside [0,1]")
            }
            Violation::ProbSumViolation { vertex, sum } => {
                write!(f, "outgoing probabilities of `{vertex}` sum to {sum}, not 1")
            }
            Violation::EmptySuccessors { vertex } => {
                write!(f, "vertex `{vertex}` has no successor")
            }
            Violation::TerminalNotSink { player, vertex } => {
                write!(f, "vertex `{vertex}` in the winning set of `{player}` is not a sink")
            }
            Violation::WinSetOutOfRange { player, vertex } => {
                write!(f, "winning set of `{player}` names nonexistent vertex #{vertex}")
            }
        }
    }
}

/// A simple stochastic multiplayer game with 0/1 terminal payoffs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Game {
    players: Vec<String>,
    names: Vec<String>,
    owner: Vec<Option<PlayerId>>,
    edges: Vec<Vec<Edge>>,
    win_sets: Vec<BTreeSet<VertexId>>,
    succ: Vec<Vec<VertexId>>,
    index: HashMap<String, VertexId>,
}

impl Game {
    /// Assembles a game from raw parts without checking the structural rules;
    /// run [`validate`] on the result.
    pub fn from_parts(
        players: Vec<String>,
        names: Vec<String>,
        owner: Vec<Option<PlayerId>>,
        edges: Vec<Vec<Edge>>,
        win_sets: Vec<BTreeSet<VertexId>>,
    ) -> Game {
        assert_eq!(names.len(), owner.len());
        assert_eq!(names.len(), edges.len());
        assert_eq!(players.len(), win_sets.len());
        let index = names
            .iter()
            .enumerate()
            .map(|(k, n)| (n.clone(), k))
            .collect();
        let succ = edges
            .iter()
            .enumerate()
            .map(|(v, out)| {
                let mut s: Vec<VertexId> = out
                    .iter()
                    .filter(|e| match (&owner[v], &e.prob) {
                        (_, Some(p)) => p > &Rational::zero(),
                        (_, None) => true,
                    })
                    .map(|e| e.to)
                    .collect();
                s.sort_unstable();
                s.dedup();
                s
            })
            .collect();
        Game {
            players,
            names,
            owner,
            edges,
            win_sets,
            succ,
            index,
        }
    }

    pub fn num_players(&self) -> usize {
        self.players.len()
    }

    pub fn players(&self) -> &[String] {
        &self.players
    }

    pub fn player_name(&self, i: PlayerId) -> &str {
        &self.players[i]
    }

    pub fn player_index(&self, name: &str) -> Option<PlayerId> {
        self.players.iter().position(|p| p == name)
    }

    pub fn num_vertices(&self) -> usize {
        self.names.len()
    }

    pub fn vertices(&self) -> std::ops::Range<VertexId> {
        0..self.names.len()
    }

    pub fn name(&self, v: VertexId) -> &str {
        &self.names[v]
    }

    pub fn vertex_index(&self, name: &str) -> Option<VertexId> {
        self.index.get(name).copied()
    }

    pub fn owner(&self, v: VertexId) -> Option<PlayerId> {
        self.owner[v]
    }

    pub fn is_stochastic(&self, v: VertexId) -> bool {
        self.owner[v].is_none()
    }

    pub fn edges(&self, v: VertexId) -> &[Edge] {
        &self.edges[v]
    }

    /// The successor set `vΔ`, ascending by vertex index.
    pub fn successors(&self, v: VertexId) -> &[VertexId] {
        &self.succ[v]
    }

    /// Transition probability of a stochastic vertex (0 when there is no edge).
    pub fn prob(&self, v: VertexId, w: VertexId) -> Rational {
        self.edges[v]
            .iter()
            .find(|e| e.to == w)
            .and_then(|e| e.prob.clone())
            .unwrap_or_else(Rational::zero)
    }

    /// `vΔ = {v}`.
    pub fn is_terminal(&self, v: VertexId) -> bool {
        self.succ[v].len() == 1 && self.succ[v][0] == v
    }

    pub fn win_set(&self, i: PlayerId) -> &BTreeSet<VertexId> {
        &self.win_sets[i]
    }

    pub fn wins(&self, i: PlayerId, v: VertexId) -> bool {
        self.win_sets[i].contains(&v)
    }

    /// Owned vertices, ascending.
    pub fn owned_vertices(&self) -> impl Iterator<Item = VertexId> + '_ {
        self.vertices().filter(move |&v| self.owner[v].is_some())
    }

    /// Owned vertices with a real choice (more than one successor).
    pub fn choice_vertices(&self) -> impl Iterator<Item = VertexId> + '_ {
        self.owned_vertices().filter(move |&v| self.succ[v].len() > 1)
    }

    pub fn vertices_of(&self, i: PlayerId) -> impl Iterator<Item = VertexId> + '_ {
        self.vertices().filter(move |&v| self.owner[v] == Some(i))
    }
}

/// Checks every structural rule; an empty list means the game is valid.
pub fn validate(game: &Game) -> Vec<Violation> {
    let mut out = Vec::new();
    let n = game.num_vertices();
    let name = |v: VertexId| -> String {
        if v < n {
            game.names[v].clone()
        } else {
            format!("#{v}")
        }
    };
    for v in game.vertices() {
        if let Some(o) = game.owner[v] {
            if o >= game.num_players() {
                out.push(Violation::UnknownOwner {
                    vertex: name(v),
                    owner: o,
                });
            }
        }
        let mut seen = BTreeSet::new();
        let mut sum = Rational::zero();
        for e in &game.edges[v] {
            if e.to >= n {
                out.push(Violation::EdgeTargetOutOfRange {
                    from: name(v),
                    to: e.to,
                });
                continue;
            }
            if !seen.insert(e.to) {
                out.push(Violation::DuplicateEdge {
                    from: name(v),
                    to: name(e.to),
                });
            }
            match (game.owner[v], &e.prob) {
                (Some(_), Some(_)) => out.push(Violation::LabelledOwnedEdge {
                    from: name(v),
                    to: name(e.to),
                }),
                (None, None) => out.push(Violation::UnlabelledStochasticEdge {
                    from: name(v),
                    to: name(e.to),
                }),
                (None, Some(p)) => {
                    if !is_probability(p) {
                        out.push(Violation::ProbOutOfRange {
                            from: name(v),
                            to: name(e.to),
                            prob: format_rational(p),
                        });
                    }
                    sum += p;
                }
                (Some(_), None) => {}
            }
        }
        if game.owner[v].is_none() && !game.edges[v].is_empty() && !sum.is_one() {
            out.push(Violation::ProbSumViolation {
                vertex: name(v),
                sum: format_rational(&sum),
            });
        }
        if game.succ[v].is_empty() {
            out.push(Violation::EmptySuccessors { vertex: name(v) });
        }
    }
    for (i, set) in game.win_sets.iter().enumerate() {
        for &v in set {
            if v >= n {
                out.push(Violation::WinSetOutOfRange {
                    player: game.players[i].clone(),
                    vertex: v,
                });
            } else if !game.is_terminal(v) {
                out.push(Violation::TerminalNotSink {
                    player: game.players[i].clone(),
                    vertex: name(v),
                });
            }
        }
    }
    out
}

/// A validated game with a designated initial vertex.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InitializedGame {
    game: Game,
    initial: VertexId,
}

impl InitializedGame {
    pub fn new(game: Game, initial: VertexId) -> Result<Self, GameError> {
        let violations = validate(&game);
        if !violations.is_empty() {
            return Err(GameError::Invalid(violations));
        }
        if initial >= game.num_vertices() {
            return Err(GameError::UnknownVertex(format!("#{initial}")));
        }
        Ok(InitializedGame { game, initial })
    }

    pub fn with_initial_name(game: Game, initial: &str) -> Result<Self, GameError> {
        let v = game
            .vertex_index(initial)
            .ok_or_else(|| GameError::UnknownVertex(initial.to_string()))?;
        Self::new(game, v)
    }

    pub fn game(&self) -> &Game {
        &self.game
    }

    pub fn initial(&self) -> VertexId {
        self.initial
    }

    pub fn into_parts(self) -> (Game, VertexId) {
        (self.game, self.initial)
    }
}

impl std::ops::Deref for InitializedGame {
    type Target = Game;
    fn deref(&self) -> &Game {
        &self.game
    }
}

/// A game whose terminals may carry rational payoff vectors.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VectorPayoffGame {
    pub game: Game,
    pub payoffs: BTreeMap<VertexId, Vec<Rational>>,
}

impl VectorPayoffGame {
    pub fn desugar(&self) -> Result<Game, GameError> {
        self.desugar_with_cap(DEFAULT_LOTTERY_CAP)
    }

    /// Replaces each payoff vector `p` by a stochastic vertex with `D`
    /// equiprobable 0/1 terminals (`D` = lcm of the denominators of `p`),
    /// `p_i * D` of which belong to `F_i`. All-integer vectors stay terminal.
    pub fn desugar_with_cap(&self, cap: u64) -> Result<Game, GameError> {
        let g = &self.game;
        let np = g.num_players();
        let mut names = g.names.clone();
        let mut owner = g.owner.clone();
        let mut edges = g.edges.clone();
        let mut win_sets = g.win_sets.clone();
        let mut taken: BTreeSet<String> = names.iter().cloned().collect();
        for (&v, payoff) in &self.payoffs {
            if !g.is_terminal(v) {
                return Err(GameError::PayoffNotTerminal(g.names[v].clone()));
            }
            if (0..np).any(|i| g.win_sets[i].contains(&v)) {
                return Err(GameError::PayoffAndWinSet(g.names[v].clone()));
            }
            let mut denom = BigInt::one();
            for (i, p) in payoff.iter().enumerate() {
                if !is_probability(p) {
                    return Err(GameError::PayoffOutOfRange {
                        vertex: g.names[v].clone(),
                        player: g.players[i].clone(),
                        value: format_rational(p),
                    });
                }
                denom = denom.lcm(p.denom());
            }
            let branches = match denom.to_u64() {
                Some(d) if d <= cap => d,
                _ => {
                    return Err(GameError::LotteryTooLarge {
                        vertex: g.names[v].clone(),
                        branches: denom.to_string(),
                        cap,
                    })
                }
            };
            // winners[i] = number of branches won by player i
            let winners: Vec<u64> = payoff
                .iter()
                .map(|p| (p * Rational::from_integer(denom.clone())).to_integer().to_u64().unwrap())
                .collect();
            if branches == 1 {
                for (i, &w) in winners.iter().enumerate() {
                    if w == 1 {
                        win_sets[i].insert(v);
                    }
                }
                continue;
            }
            let share = Rational::new(BigInt::one(), denom.clone());
            let mut out = Vec::with_capacity(branches as usize);
            for k in 0..branches {
                let mut name = format!("{}#{}", g.names[v], k);
                while taken.contains(&name) {
                    name.push('\'');
                }
                taken.insert(name.clone());
                let t = names.len();
                names.push(name);
                owner.push(None);
                edges.push(vec![Edge {
                    to: t,
                    prob: Some(Rational::one()),
                }]);
                for (i, &w) in winners.iter().enumerate() {
                    if k < w {
                        win_sets[i].insert(t);
                    }
                }
                out.push(Edge {
                    to: t,
                    prob: Some(share.clone()),
                });
            }
            owner[v] = None;
            edges[v] = out;
        }
        Ok(Game::from_parts(
            g.players.clone(),
            names,
            owner,
            edges,
            win_sets,
        ))
    }
}

/// Incremental construction of games. Vertices are indexed in creation order.
#[derive(Debug, Clone, Default)]
pub struct GameBuilder {
    players: Vec<String>,
    names: Vec<String>,
    owner: Vec<Option<PlayerId>>,
    edges: Vec<Vec<Edge>>,
    win_sets: Vec<BTreeSet<VertexId>>,
    payoffs: BTreeMap<VertexId, Vec<Rational>>,
}

impl GameBuilder {
    pub fn new<S: AsRef<str>>(players: &[S]) -> Self {
        GameBuilder {
            players: players.iter().map(|p| p.as_ref().to_string()).collect(),
            win_sets: vec![BTreeSet::new(); players.len()],
            ..Default::default()
        }
    }

    pub fn num_players(&self) -> usize {
        self.players.len()
    }

    pub fn num_vertices(&self) -> usize {
        self.names.len()
    }

    fn push(&mut self, name: impl Into<String>, owner: Option<PlayerId>) -> VertexId {
        self.names.push(name.into());
        self.owner.push(owner);
        self.edges.push(Vec::new());
        self.names.len() - 1
    }

    pub fn owned(&mut self, name: impl Into<String>, player: PlayerId) -> VertexId {
        self.push(name, Some(player))
    }

    pub fn stochastic(&mut self, name: impl Into<String>) -> VertexId {
        self.push(name, None)
    }

    /// A stochastic sink (self-loop with probability 1) in no winning set.
    pub fn terminal(&mut self, name: impl Into<String>) -> VertexId {
        let v = self.push(name, None);
        self.edges[v].push(Edge {
            to: v,
            prob: Some(Rational::one()),
        });
        v
    }

    /// A sink won by exactly the given players.
    pub fn winning_terminal(&mut self, name: impl Into<String>, winners: &[PlayerId]) -> VertexId {
        let v = self.terminal(name);
        for &i in winners {
            self.win_sets[i].insert(v);
        }
        v
    }

    /// A sink carrying a rational payoff vector (one entry per player).
    pub fn payoff_terminal(&mut self, name: impl Into<String>, payoff: Vec<Rational>) -> VertexId {
        assert_eq!(payoff.len(), self.players.len());
        let v = self.terminal(name);
        self.payoffs.insert(v, payoff);
        v
    }

    /// An unlabelled edge out of an owned vertex.
    pub fn edge(&mut self, from: VertexId, to: VertexId) -> &mut Self {
        self.edges[from].push(Edge { to, prob: None });
        self
    }

    pub fn prob_edge(&mut self, from: VertexId, to: VertexId, p: Rational) -> &mut Self {
        self.edges[from].push(Edge { to, prob: Some(p) });
        self
    }

    pub fn add_win(&mut self, player: PlayerId, v: VertexId) -> &mut Self {
        self.win_sets[player].insert(v);
        self
    }

    /// Raw access used by the file loader.
    pub(crate) fn set_payoff(&mut self, v: VertexId, payoff: Vec<Rational>) {
        self.payoffs.insert(v, payoff);
    }

    pub(crate) fn push_edge(&mut self, from: VertexId, edge: Edge) {
        self.edges[from].push(edge);
    }

    pub(crate) fn has_edges(&self, v: VertexId) -> bool {
        !self.edges[v].is_empty()
    }

    pub(crate) fn owner_of(&self, v: VertexId) -> Option<PlayerId> {
        self.owner[v]
    }

    pub fn build(self) -> VectorPayoffGame {
        VectorPayoffGame {
            game: Game::from_parts(
                self.players,
                self.names,
                self.owner,
                self.edges,
                self.win_sets,
            ),
            payoffs: self.payoffs,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, ratio};

    fn two_player() -> GameBuilder {
        GameBuilder::new(&["0", "1"])
    }

    #[test]
    fn detects_probability_sum_violation() {
        let mut b = two_player();
        let s = b.stochastic("s");
        let a = b.terminal("a");
        let c = b.terminal("c");
        b.prob_edge(s, a, ratio(1, 2)).prob_edge(s, c, ratio(1, 3));
        let g = b.build().game;
        let v = validate(&g);
        assert_eq!(
            v,
            vec![Violation::ProbSumViolation {
                vertex: "s".into(),
                sum: "5/6".into()
            }]
        );
    }

    #[test]
    fn detects_terminal_not_sink() {
        let mut b = two_player();
        let t = b.winning_terminal("t", &[0]);
        let u = b.terminal("u");
        b.prob_edge(t, u, int(0));
        // probabilities still sum to 1; the zero edge is harmless, so add a real one
        let g = b.build().game;
        assert!(validate(&g).is_empty());

        let mut b = two_player();
        let t = b.owned("t", 0);
        let u = b.terminal("u");
        b.edge(t, t).edge(t, u).add_win(0, t);
        let v = validate(&b.build().game);
        assert_eq!(
            v,
            vec![Violation::TerminalNotSink {
                player: "0".into(),
                vertex: "t".into()
            }]
        );
    }

    #[test]
    fn detects_labelling_errors_and_empty_successors() {
        let mut b = two_player();
        let o = b.owned("o", 0);
        let s = b.stochastic("s");
        let e = b.stochastic("e");
        b.prob_edge(o, s, int(1));
        b.edge(s, o);
        let _ = e;
        let v = validate(&b.build().game);
        assert!(v.contains(&Violation::LabelledOwnedEdge {
            from: "o".into(),
            to: "s".into()
        }));
        assert!(v.contains(&Violation::UnlabelledStochasticEdge {
            from: "s".into(),
            to: "o".into()
        }));
        assert!(v.contains(&Violation::EmptySuccessors { vertex: "e".into() }));
    }

    #[test]
    fn desugars_half_payoff_into_two_branches() {
        let mut b = two_player();
        let t = b.payoff_terminal("t", vec![ratio(1, 2), int(0)]);
        let g = b.build().desugar().unwrap();
        assert!(validate(&g).is_empty());
        assert!(g.is_stochastic(t));
        assert_eq!(g.successors(t).len(), 2);
        let branches: Vec<_> = g.successors(t).to_vec();
        for &w in &branches {
            assert_eq!(g.prob(t, w), ratio(1, 2));
            assert!(g.is_terminal(w));
            assert!(!g.wins(1, w));
        }
        assert_eq!(branches.iter().filter(|&&w| g.wins(0, w)).count(), 1);
    }

    #[test]
    fn all_ones_payoff_stays_a_single_terminal() {
        let mut b = two_player();
        let t = b.payoff_terminal("t", vec![int(1), int(1)]);
        let g = b.build().desugar().unwrap();
        assert_eq!(g.num_vertices(), 1);
        assert!(g.is_terminal(t) && g.wins(0, t) && g.wins(1, t));
    }

    #[test]
    fn desugar_rejects_out_of_range_and_huge_lotteries() {
        let mut b = two_player();
        b.payoff_terminal("t", vec![ratio(3, 2), int(0)]);
        assert!(matches!(
            b.build().desugar(),
            Err(GameError::PayoffOutOfRange { .. })
        ));
        let mut b = two_player();
        b.payoff_terminal("t", vec![ratio(1, 1009), ratio(1, 1013)]);
        assert!(matches!(
            b.build().desugar_with_cap(1000),
            Err(GameError::LotteryTooLarge { .. })
        ));
    }

    #[test]
    fn lottery_names_avoid_collisions() {
        let mut b = two_player();
        b.payoff_terminal("t", vec![ratio(1, 2), int(0)]);
        b.terminal("t#0");
        let g = b.build().desugar().unwrap();
        assert!(validate(&g).is_empty());
        assert!(g.vertex_index("t#0'").is_some());
    }
}
