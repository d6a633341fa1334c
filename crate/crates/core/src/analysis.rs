//! Exact payoffs, best responses and equilibrium checks.

use crate::game::{Edge, Game, GameError, InitializedGame, PlayerId, VertexId};
use crate::math::{lp_min, solve_system, LinearProgram, LinearSystem, LpOutcome, MathError, Relation};
use crate::profile::{FiniteStateProfile, ProfileError, StationaryProfile};
use crate::rational::{format_rational, is_probability, Rational};
use num_traits::{One, Zero};
use petgraph::algo::tarjan_scc;
use petgraph::graph::DiGraph;
use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};

/// Reachability probability of each player's winning set.
pub type PayoffVector = Vec<Rational>;

/// One value per vertex, indexed by vertex id.
pub type ValueVector = Vec<Rational>;

/// Successor distribution of one vertex, positive entries only.
pub(crate) type Row = Vec<(VertexId, Rational)>;

pub const DEFAULT_MEMORY_CAP: usize = 100_000;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum AnalysisError {
    #[error("product of game and memory exceeds {cap} states")]
    MemoryBlowup { cap: usize },
    #[error(transparent)]
    Profile(#[from] ProfileError),
    #[error(transparent)]
    Math(#[from] MathError),
    #[error(transparent)]
    Game(#[from] GameError),
    #[error("best-response programme for player {0} has no optimum")]
    NoOptimum(PlayerId),
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ThresholdError {
    #[error("threshold vectors have lengths {0} and {1}, expected {2}")]
    Length(usize, usize, usize),
    #[error("threshold component {0} is outside [0, 1]")]
    Range(usize),
    #[error("lower threshold exceeds upper threshold for player {0}")]
    Order(usize),
}

/// Componentwise payoff bounds `lower ≤ payoff ≤ upper`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Thresholds {
    pub lower: PayoffVector,
    pub upper: PayoffVector,
}

impl Thresholds {
    pub fn new(players: usize, lower: PayoffVector, upper: PayoffVector) -> Result<Self, ThresholdError> {
        if lower.len() != players || upper.len() != players {
            return Err(ThresholdError::Length(lower.len(), upper.len(), players));
        }
        for i in 0..players {
            if !is_probability(&lower[i]) || !is_probability(&upper[i]) {
                return Err(ThresholdError::Range(i));
            }
            if lower[i] > upper[i] {
                return Err(ThresholdError::Order(i));
            }
        }
        Ok(Thresholds { lower, upper })
    }

    /// `x = 0`, `y = 1`.
    pub fn unconstrained(players: usize) -> Self {
        Thresholds {
            lower: vec![Rational::zero(); players],
            upper: vec![Rational::one(); players],
        }
    }

    /// Player 0 must win almost surely; the others are unconstrained.
    pub fn player0_wins(players: usize) -> Self {
        let mut t = Self::unconstrained(players);
        if players > 0 {
            t.lower[0] = Rational::one();
        }
        t
    }

    pub fn contains(&self, payoff: &[Rational]) -> bool {
        payoff
            .iter()
            .zip(self.lower.iter().zip(&self.upper))
            .all(|(z, (x, y))| x <= z && z <= y)
    }

    pub fn is_trivial(&self, i: PlayerId) -> bool {
        self.lower[i].is_zero() && self.upper[i].is_one()
    }
}

/// Outcome of an equilibrium check.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NeVerdict {
    pub is_equilibrium: bool,
    pub thresholds_met: bool,
    pub payoff: PayoffVector,
    /// best-response value of each player at the initial vertex
    pub deviations: PayoffVector,
}

impl NeVerdict {
    /// Players who can strictly improve by deviating.
    pub fn improving_players(&self) -> Vec<PlayerId> {
        (0..self.payoff.len())
            .filter(|&i| self.deviations[i] > self.payoff[i])
            .collect()
    }

    /// Equilibrium with payoff inside the thresholds.
    pub fn accepted(&self) -> bool {
        self.is_equilibrium && self.thresholds_met
    }
}

// ---------------------------------------------------------------------------
// graph helpers

/// Outgoing row of a stochastic or terminal vertex.
pub(crate) fn game_row(game: &Game, v: VertexId) -> Row {
    if game.is_stochastic(v) {
        game.edges(v)
            .iter()
            .filter_map(|e| match &e.prob {
                Some(p) if !p.is_zero() => Some((e.to, p.clone())),
                _ => None,
            })
            .collect()
    } else {
        game.successors(v)
            .iter()
            .map(|&w| (w, Rational::one()))
            .take(1)
            .collect()
    }
}

/// Markov-chain rows induced by a stationary profile.
pub(crate) fn stationary_rows(game: &Game, profile: &StationaryProfile) -> Vec<Row> {
    game.vertices()
        .map(|v| {
            if game.owner(v).is_some() {
                profile.distribution(v).to_vec()
            } else {
                game_row(game, v)
            }
        })
        .collect()
}

/// Vertices from which a target is reachable, given the successor lists.
pub(crate) fn backward_closure<F, I>(n: usize, succ: F, targets: &[bool]) -> Vec<bool>
where
    F: Fn(VertexId) -> I,
    I: IntoIterator<Item = VertexId>,
{
    let mut pred: Vec<Vec<VertexId>> = vec![Vec::new(); n];
    for v in 0..n {
        for w in succ(v) {
            pred[w].push(v);
        }
    }
    let mut seen = targets.to_vec();
    let mut queue: VecDeque<VertexId> = (0..n).filter(|&v| targets[v]).collect();
    while let Some(w) = queue.pop_front() {
        for &v in &pred[w] {
            if !seen[v] {
                seen[v] = true;
                queue.push_back(v);
            }
        }
    }
    seen
}

/// Vertices reachable from `start`.
pub(crate) fn forward_closure<F, I>(n: usize, succ: F, start: VertexId) -> Vec<bool>
where
    F: Fn(VertexId) -> I,
    I: IntoIterator<Item = VertexId>,
{
    let mut seen = vec![false; n];
    seen[start] = true;
    let mut stack = vec![start];
    while let Some(v) = stack.pop() {
        for w in succ(v) {
            if !seen[w] {
                seen[w] = true;
                stack.push(w);
            }
        }
    }
    seen
}

fn win_mask(game: &Game, i: PlayerId) -> Vec<bool> {
    let mut m = vec![false; game.num_vertices()];
    for &v in game.win_set(i) {
        m[v] = true;
    }
    m
}

/// Probability of reaching `targets` from every vertex of the chain.
///
/// Values are pinned to 1 on targets and 0 where targets are unreachable;
/// the remaining system is nonsingular. With `domain`, only vertices inside
/// it are solved for (the domain must be closed under successors) and all
/// other entries are 0.
pub(crate) fn reach_values(rows: &[Row], targets: &[bool], domain: Option<&[bool]>) -> Result<ValueVector, MathError> {
    let n = rows.len();
    let can = backward_closure(n, |v| rows[v].iter().map(|e| e.0), targets);
    let mut index = vec![usize::MAX; n];
    let mut unknowns = Vec::new();
    for v in 0..n {
        if can[v] && !targets[v] && domain.map_or(true, |d| d[v]) {
            index[v] = unknowns.len();
            unknowns.push(v);
        }
    }
    let k = unknowns.len();
    let mut matrix = vec![vec![Rational::zero(); k]; k];
    let mut rhs = vec![Rational::zero(); k];
    for (r, &v) in unknowns.iter().enumerate() {
        matrix[r][r] += Rational::one();
        for (w, p) in &rows[v] {
            if targets[*w] {
                rhs[r] += p;
            } else if index[*w] != usize::MAX {
                matrix[r][index[*w]] -= p;
            }
        }
    }
    let sol = solve_system(&LinearSystem::new(matrix, rhs))?;
    let mut out = vec![Rational::zero(); n];
    for v in 0..n {
        if targets[v] && domain.map_or(true, |d| d[v]) {
            out[v] = Rational::one();
        }
    }
    for (r, &v) in unknowns.iter().enumerate() {
        out[v] = sol[r].clone();
    }
    Ok(out)
}

fn chain_payoff(game: &Game, rows: &[Row], v0: VertexId) -> Result<PayoffVector, MathError> {
    let n = game.num_vertices();
    let domain = forward_closure(n, |v| rows[v].iter().map(|e| e.0), v0);
    (0..game.num_players())
        .map(|i| Ok(reach_values(rows, &win_mask(game, i), Some(&domain))?[v0].clone()))
        .collect()
}

// ---------------------------------------------------------------------------
// stationary profiles

/// `R_i`: vertices from which `F_i` is reachable along positive-probability
/// edges of the profile.
pub fn reachable_support(game: &Game, profile: &StationaryProfile, player: PlayerId) -> BTreeSet<VertexId> {
    let rows = stationary_rows(game, profile);
    let can = backward_closure(
        game.num_vertices(),
        |v| rows[v].iter().map(|e| e.0),
        &win_mask(game, player),
    );
    (0..game.num_vertices()).filter(|&v| can[v]).collect()
}

/// Exact payoff of a stationary profile from the initial vertex.
pub fn stationary_payoff(ig: &InitializedGame, profile: &StationaryProfile) -> Result<PayoffVector, AnalysisError> {
    let rows = stationary_rows(ig, profile);
    Ok(chain_payoff(ig, &rows, ig.initial())?)
}

/// Reachability value of every vertex for one player under a stationary profile.
pub fn stationary_values(game: &Game, profile: &StationaryProfile, player: PlayerId) -> Result<ValueVector, AnalysisError> {
    let rows = stationary_rows(game, profile);
    Ok(reach_values(&rows, &win_mask(game, player), None)?)
}

/// Optimal reachability values of `player` when every other vertex follows
/// `other_row`; `from` restricts the programme to vertices reachable from it.
pub(crate) fn best_response_core<F>(
    game: &Game,
    player: PlayerId,
    other_row: F,
    from: Option<VertexId>,
) -> Result<ValueVector, AnalysisError>
where
    F: Fn(VertexId) -> Row,
{
    let n = game.num_vertices();
    let rows: Vec<Row> = (0..n)
        .map(|v| {
            if game.owner(v) == Some(player) {
                game.successors(v).iter().map(|&w| (w, Rational::one())).collect()
            } else {
                other_row(v)
            }
        })
        .collect();
    let targets = win_mask(game, player);
    let can = backward_closure(n, |v| rows[v].iter().map(|e| e.0), &targets);
    let domain = from.map(|v0| forward_closure(n, |v| rows[v].iter().map(|e| e.0), v0));
    let inside = |v: VertexId| domain.as_ref().map_or(true, |d| d[v]);

    let mut index = vec![usize::MAX; n];
    let mut vars = Vec::new();
    for v in 0..n {
        if can[v] && !targets[v] && inside(v) {
            index[v] = vars.len();
            vars.push(v);
        }
    }
    let mut lp = LinearProgram::new(vars.len()).all_nonneg();
    for (k, &v) in vars.iter().enumerate() {
        lp.objective[k] = Rational::one();
        if game.owner(v) == Some(player) {
            for (w, _) in &rows[v] {
                if targets[*w] {
                    lp.add_sparse(&[(k, Rational::one())], Relation::Ge, Rational::one());
                } else if index[*w] != usize::MAX && *w != v {
                    lp.add_sparse(
                        &[(k, Rational::one()), (index[*w], -Rational::one())],
                        Relation::Ge,
                        Rational::zero(),
                    );
                }
            }
        } else {
            let mut terms: BTreeMap<usize, Rational> = BTreeMap::from([(k, Rational::one())]);
            let mut bound = Rational::zero();
            for (w, p) in &rows[v] {
                if targets[*w] {
                    bound += p;
                } else if index[*w] != usize::MAX {
                    *terms.entry(index[*w]).or_insert_with(Rational::zero) -= p;
                }
            }
            let terms: Vec<(usize, Rational)> = terms.into_iter().collect();
            lp.add_sparse(&terms, Relation::Eq, bound);
        }
    }
    let point = match lp_min(&lp)? {
        LpOutcome::Optimal { point, .. } => point,
        _ => return Err(AnalysisError::NoOptimum(player)),
    };
    let mut out = vec![Rational::zero(); n];
    for v in 0..n {
        if targets[v] && inside(v) {
            out[v] = Rational::one();
        }
    }
    for (k, &v) in vars.iter().enumerate() {
        out[v] = point[k].clone();
    }
    Ok(out)
}

/// Optimal values `r^i` of the MDP where `player` controls its vertices and
/// everyone else follows `profile`.
pub fn best_response_value(
    ig: &InitializedGame,
    profile: &StationaryProfile,
    player: PlayerId,
) -> Result<ValueVector, AnalysisError> {
    best_response_core(ig, player, |v| stationary_row(ig, profile, v), None)
}

fn stationary_row(game: &Game, profile: &StationaryProfile, v: VertexId) -> Row {
    if game.owner(v).is_some() {
        profile.distribution(v).to_vec()
    } else {
        game_row(game, v)
    }
}

/// Checks `r^i_{v0} = z^i_{v0}` for every player and the payoff thresholds.
pub fn verify_ne(ig: &InitializedGame, profile: &StationaryProfile, t: &Thresholds) -> Result<NeVerdict, AnalysisError> {
    let payoff = stationary_payoff(ig, profile)?;
    let v0 = ig.initial();
    let deviations = (0..ig.num_players())
        .map(|i| {
            best_response_core(ig, i, |v| stationary_row(ig, profile, v), Some(v0)).map(|r| r[v0].clone())
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(verdict(payoff, deviations, t))
}

fn verdict(payoff: PayoffVector, deviations: PayoffVector, t: &Thresholds) -> NeVerdict {
    NeVerdict {
        is_equilibrium: payoff == deviations,
        thresholds_met: t.contains(&payoff),
        payoff,
        deviations,
    }
}

// ---------------------------------------------------------------------------
// finite-state profiles

/// The game played on (vertex, joint memory) pairs reachable from the start.
#[derive(Debug, Clone)]
pub struct ProductGame {
    pub game: InitializedGame,
    /// original vertex and joint memory of each product state
    pub states: Vec<(VertexId, Vec<usize>)>,
}

/// Builds the product of a game with the memories of every player except
/// `deviator`; the deviator keeps its vertices as free choices, every other
/// owned vertex becomes a deterministic stochastic vertex.
pub fn build_product(
    ig: &InitializedGame,
    profile: &FiniteStateProfile,
    deviator: Option<PlayerId>,
    cap: usize,
) -> Result<ProductGame, AnalysisError> {
    let game: &Game = ig;
    let tracked = |j: PlayerId| Some(j) != deviator;
    let mut init_mem = profile.initial_memory();
    if let Some(d) = deviator {
        init_mem[d] = 0;
    }
    let mut ids: HashMap<(VertexId, Vec<usize>), VertexId> = HashMap::new();
    let mut states: Vec<(VertexId, Vec<usize>)> = Vec::new();
    let mut edges: Vec<Vec<Edge>> = Vec::new();
    let start = (ig.initial(), init_mem);
    ids.insert(start.clone(), 0);
    states.push(start);

    let mut next = 0;
    while next < states.len() {
        let (v, mem) = states[next].clone();
        let mut out: Vec<(VertexId, Vec<usize>, Option<Rational>)> = Vec::new();
        if game.is_terminal(v) {
            let p = game.is_stochastic(v).then(Rational::one);
            out.push((v, mem.clone(), p));
        } else {
            let updated: Vec<usize> = (0..game.num_players())
                .map(|j| if tracked(j) { profile.strategy(j).next_memory(mem[j], v) } else { mem[j] })
                .collect();
            match game.owner(v) {
                Some(j) if !tracked(j) => {
                    for &w in game.successors(v) {
                        out.push((w, updated.clone(), None));
                    }
                }
                Some(j) => {
                    let w = profile.strategy(j).choose(game, mem[j], v);
                    out.push((w, updated, Some(Rational::one())));
                }
                None => {
                    for (w, p) in game_row(game, v) {
                        out.push((w, updated.clone(), Some(p)));
                    }
                }
            }
        }
        let mut row = Vec::with_capacity(out.len());
        for (w, m, p) in out {
            let key = (w, m);
            let id = match ids.get(&key) {
                Some(&id) => id,
                None => {
                    let id = states.len();
                    if id >= cap {
                        return Err(AnalysisError::MemoryBlowup { cap });
                    }
                    ids.insert(key.clone(), id);
                    states.push(key);
                    id
                }
            };
            row.push(Edge { to: id, prob: p });
        }
        edges.push(row);
        next += 1;
    }

    let names: Vec<String> = states
        .iter()
        .map(|(v, m)| {
            let mem: Vec<String> = m.iter().map(|x| x.to_string()).collect();
            format!("{}@{}", game.name(*v), mem.join("."))
        })
        .collect();
    let owner: Vec<Option<PlayerId>> = states
        .iter()
        .map(|(v, _)| match game.owner(*v) {
            Some(j) if !tracked(j) => Some(j),
            Some(_) if game.is_terminal(*v) => game.owner(*v),
            _ => None,
        })
        .collect();
    let win_sets: Vec<BTreeSet<VertexId>> = (0..game.num_players())
        .map(|i| (0..states.len()).filter(|&s| game.wins(i, states[s].0)).collect())
        .collect();
    let product = Game::from_parts(game.players().to_vec(), names, owner, edges, win_sets);
    Ok(ProductGame {
        game: InitializedGame::new(product, 0)?,
        states,
    })
}

/// Exact payoff of a finite-state profile, via the product chain.
pub fn finite_state_payoff(ig: &InitializedGame, profile: &FiniteStateProfile) -> Result<PayoffVector, AnalysisError> {
    finite_state_payoff_capped(ig, profile, DEFAULT_MEMORY_CAP)
}

pub fn finite_state_payoff_capped(
    ig: &InitializedGame,
    profile: &FiniteStateProfile,
    cap: usize,
) -> Result<PayoffVector, AnalysisError> {
    let product = build_product(ig, profile, None, cap)?;
    let pg = &product.game;
    let rows: Vec<Row> = pg.vertices().map(|v| game_row(pg, v)).collect();
    Ok(chain_payoff(pg, &rows, 0)?)
}

/// Equilibrium check for a finite-state profile: each deviator optimises
/// over the product of the game with the other players' memories.
pub fn verify_finite_state_ne(
    ig: &InitializedGame,
    profile: &FiniteStateProfile,
    t: &Thresholds,
) -> Result<NeVerdict, AnalysisError> {
    verify_finite_state_ne_capped(ig, profile, t, DEFAULT_MEMORY_CAP)
}

pub fn verify_finite_state_ne_capped(
    ig: &InitializedGame,
    profile: &FiniteStateProfile,
    t: &Thresholds,
    cap: usize,
) -> Result<NeVerdict, AnalysisError> {
    let payoff = finite_state_payoff_capped(ig, profile, cap)?;
    let deviations = (0..ig.num_players())
        .map(|i| {
            let product = build_product(ig, profile, Some(i), cap)?;
            let pg = &product.game;
            let r = best_response_core(pg, i, |v| game_row(pg, v), Some(0))?;
            Ok(r[0].clone())
        })
        .collect::<Result<Vec<_>, AnalysisError>>()?;
    Ok(verdict(payoff, deviations, t))
}

// ---------------------------------------------------------------------------
// terminal classes

/// Where the play of a stationary profile ends up.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TerminalDistribution {
    /// probability of being absorbed in each terminal vertex
    pub terminals: BTreeMap<VertexId, Rational>,
    /// probability of being trapped in each bottom component without terminals,
    /// keyed by its smallest vertex
    pub traps: BTreeMap<VertexId, Rational>,
}

impl TerminalDistribution {
    pub fn nontermination(&self) -> Rational {
        self.traps.values().fold(Rational::zero(), |a, b| a + b)
    }

    pub fn total(&self) -> Rational {
        self.terminals.values().fold(self.nontermination(), |a, b| a + b)
    }
}

/// Absorption probabilities of every bottom strongly connected component
/// reachable from the initial vertex.
pub fn terminal_distribution(ig: &InitializedGame, profile: &StationaryProfile) -> Result<TerminalDistribution, AnalysisError> {
    let rows = stationary_rows(ig, profile);
    let n = ig.num_vertices();
    let v0 = ig.initial();
    let domain = forward_closure(n, |v| rows[v].iter().map(|e| e.0), v0);

    let mut graph = DiGraph::<VertexId, ()>::new();
    let nodes: Vec<_> = (0..n).map(|v| graph.add_node(v)).collect();
    for v in 0..n {
        if domain[v] {
            for (w, _) in &rows[v] {
                graph.add_edge(nodes[v], nodes[*w], ());
            }
        }
    }
    let mut comp_of = vec![usize::MAX; n];
    let comps: Vec<Vec<VertexId>> = tarjan_scc(&graph)
        .into_iter()
        .map(|c| {
            let mut c: Vec<VertexId> = c.into_iter().map(|x| graph[x]).collect();
            c.sort_unstable();
            c
        })
        .filter(|c| domain[c[0]])
        .collect();
    for (k, c) in comps.iter().enumerate() {
        for &v in c {
            comp_of[v] = k;
        }
    }
    let mut out = TerminalDistribution {
        terminals: BTreeMap::new(),
        traps: BTreeMap::new(),
    };
    for (k, c) in comps.iter().enumerate() {
        let bottom = c.iter().all(|&v| rows[v].iter().all(|(w, _)| comp_of[*w] == k));
        if !bottom {
            continue;
        }
        let mut targets = vec![false; n];
        for &v in c {
            targets[v] = true;
        }
        let mass = reach_values(&rows, &targets, Some(&domain))?[v0].clone();
        if c.len() == 1 && ig.is_terminal(c[0]) {
            out.terminals.insert(c[0], mass);
        } else {
            out.traps.insert(c[0], mass);
        }
    }
    Ok(out)
}

/// Renders a payoff vector as `"1, 1/2, 1/2"`.
pub fn payoff_string(p: &[Rational]) -> String {
    p.iter().map(format_rational).collect::<Vec<_>>().join(", ")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::GameBuilder;
    use crate::profile::{FiniteStateStrategy, PositionalProfile};
    use crate::rational::{int, ratio};

    /// Three-player game: v0 (1) → v1 or (0,1/2,0); v1 (2) → v2 or (0,0,1/2);
    /// v2 (0) → (1,1,0) or (1,0,1).
    fn three_player_choice() -> InitializedGame {
        let mut b = GameBuilder::new(&["0", "1", "2"]);
        let v0 = b.owned("v0", 1);
        let v1 = b.owned("v1", 2);
        let v2 = b.owned("v2", 0);
        let e1 = b.payoff_terminal("e1", vec![int(0), ratio(1, 2), int(0)]);
        let e2 = b.payoff_terminal("e2", vec![int(0), int(0), ratio(1, 2)]);
        let a = b.winning_terminal("a", &[0, 1]);
        let c = b.winning_terminal("c", &[0, 2]);
        b.edge(v0, v1).edge(v0, e1).edge(v1, v2).edge(v1, e2).edge(v2, a).edge(v2, c);
        InitializedGame::new(b.build().desugar().unwrap(), v0).unwrap()
    }

    fn mixed(ig: &InitializedGame) -> StationaryProfile {
        let v = |s: &str| ig.vertex_index(s).unwrap();
        StationaryProfile::new(
            ig,
            &BTreeMap::from([
                (v("v0"), BTreeMap::from([(v("v1"), int(1))])),
                (v("v1"), BTreeMap::from([(v("v2"), int(1))])),
                (v("v2"), BTreeMap::from([(v("a"), ratio(1, 2)), (v("c"), ratio(1, 2))])),
            ]),
        )
        .unwrap()
    }

    #[test]
    fn mixed_profile_is_an_equilibrium() {
        let ig = three_player_choice();
        let p = mixed(&ig);
        let payoff = stationary_payoff(&ig, &p).unwrap();
        // path enumeration: v0 → v1 → v2, then a or c with 1/2 each
        assert_eq!(payoff, vec![int(1), ratio(1, 2), ratio(1, 2)]);
        let t = Thresholds::new(3, vec![int(1), int(0), int(0)], vec![int(1); 3]).unwrap();
        let verdict = verify_ne(&ig, &p, &t).unwrap();
        assert!(verdict.is_equilibrium && verdict.thresholds_met);
        let r0 = reachable_support(&ig, &p, 0);
        for s in ["v0", "v1", "v2"] {
            assert!(r0.contains(&ig.vertex_index(s).unwrap()));
        }
    }

    #[test]
    fn pure_choice_invites_deviation() {
        let ig = three_player_choice();
        let v = |s: &str| ig.vertex_index(s).unwrap();
        let p = PositionalProfile::new(
            &ig,
            &BTreeMap::from([(v("v0"), v("v1")), (v("v1"), v("v2")), (v("v2"), v("a"))]),
        )
        .unwrap()
        .to_stationary();
        let verdict = verify_ne(&ig, &p, &Thresholds::unconstrained(3)).unwrap();
        assert!(!verdict.is_equilibrium);
        assert_eq!(verdict.payoff[2], int(0));
        assert_eq!(verdict.deviations[2], ratio(1, 2));
        assert_eq!(verdict.improving_players(), vec![2]);
    }

    #[test]
    fn winning_edge_is_found() {
        let mut b = GameBuilder::new(&["0"]);
        let v = b.owned("v", 0);
        let w = b.winning_terminal("w", &[0]);
        let l = b.terminal("l");
        b.edge(v, l).edge(v, w);
        let ig = InitializedGame::new(b.build().desugar().unwrap(), v).unwrap();
        let p = PositionalProfile::new(&ig, &BTreeMap::from([(v, l)])).unwrap().to_stationary();
        let r = best_response_value(&ig, &p, 0).unwrap();
        assert_eq!(r[v], int(1));
        assert_eq!(stationary_payoff(&ig, &p).unwrap(), vec![int(0)]);
    }

    #[test]
    fn all_terminal_game_is_trivially_stable() {
        let mut b = GameBuilder::new(&["0", "1"]);
        let t = b.winning_terminal("t", &[0]);
        b.terminal("u");
        let ig = InitializedGame::new(b.build().desugar().unwrap(), t).unwrap();
        let p = StationaryProfile::forced(&ig).unwrap();
        let verdict = verify_ne(&ig, &p, &Thresholds::unconstrained(2)).unwrap();
        assert!(verdict.is_equilibrium);
        assert_eq!(verdict.payoff, vec![int(1), int(0)]);
    }

    #[test]
    fn player_without_vertices_gets_chain_values() {
        let ig = three_player_choice();
        let p = mixed(&ig);
        // give player 1 nothing to do by checking against the chain values
        let chain = stationary_values(&ig, &p, 0).unwrap();
        let br = best_response_value(&ig, &p, 0).unwrap();
        assert!(chain.iter().zip(&br).all(|(a, b)| a <= b));
    }

    #[test]
    fn parity_memory_on_a_cycle() {
        // a ↔ b cycle owned by player 0; with even parity it stays on the
        // cycle, with odd parity at b it exits to the winning terminal.
        let mut b = GameBuilder::new(&["0"]);
        let a = b.owned("a", 0);
        let s = b.stochastic("s");
        let w = b.winning_terminal("w", &[0]);
        let l = b.terminal("l");
        b.edge(a, s).edge(a, w);
        b.prob_edge(s, a, ratio(1, 2)).prob_edge(s, l, ratio(1, 2));
        let ig = InitializedGame::new(b.build().desugar().unwrap(), a).unwrap();
        let mut strat = FiniteStateStrategy::memoryless();
        strat.memory = vec!["even".into(), "odd".into()];
        strat.update.insert((0, a), 1);
        strat.update.insert((1, a), 0);
        strat.choice.insert((0, a), s);
        strat.choice.insert((1, a), w);
        let fsp = FiniteStateProfile::new(&ig, vec![strat]).unwrap();
        // chain oracle: x = 1/2 * (prob of winning from a with odd memory) = 1/2 * 1
        let payoff = finite_state_payoff(&ig, &fsp).unwrap();
        assert_eq!(payoff, vec![ratio(1, 2)]);
        let product = build_product(&ig, &fsp, None, 100).unwrap();
        assert_eq!(product.states.len(), 5);
        let verdict = verify_finite_state_ne(&ig, &fsp, &Thresholds::unconstrained(1)).unwrap();
        assert_eq!(verdict.deviations, vec![int(1)]);
        assert!(!verdict.is_equilibrium);
    }

    #[test]
    fn memory_cap_is_enforced() {
        let ig = three_player_choice();
        let pos = PositionalProfile::new(
            &ig,
            &BTreeMap::from([(0, 1), (1, 2), (2, ig.vertex_index("a").unwrap())]),
        )
        .unwrap();
        let fsp = pos.to_finite_state(&ig);
        assert!(matches!(
            finite_state_payoff_capped(&ig, &fsp, 2),
            Err(AnalysisError::MemoryBlowup { cap: 2 })
        ));
        assert_eq!(
            finite_state_payoff(&ig, &fsp).unwrap(),
            stationary_payoff(&ig, &pos.to_stationary()).unwrap()
        );
    }

    #[test]
    fn distribution_sums_to_one_with_traps() {
        let mut b = GameBuilder::new(&["0"]);
        let s = b.stochastic("s");
        let x = b.stochastic("x");
        let y = b.stochastic("y");
        let w = b.winning_terminal("w", &[0]);
        b.prob_edge(s, x, ratio(1, 3)).prob_edge(s, w, ratio(2, 3));
        b.prob_edge(x, y, int(1)).prob_edge(y, x, int(1));
        let ig = InitializedGame::new(b.build().desugar().unwrap(), s).unwrap();
        let p = StationaryProfile::forced(&ig).unwrap();
        let d = terminal_distribution(&ig, &p).unwrap();
        assert_eq!(d.nontermination(), ratio(1, 3));
        assert_eq!(d.total(), int(1));
    }
}
