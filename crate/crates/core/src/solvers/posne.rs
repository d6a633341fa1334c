use crate::analysis::{
    best_response_core, forward_closure, game_row, reach_values, AnalysisError, PayoffVector, Row,
    Thresholds,
};
use crate::game::{InitializedGame, PlayerId, VertexId};
use crate::profile::PositionalProfile;
use crate::rational::Rational;
use num_bigint::BigUint;
use num_traits::{One, ToPrimitive};
use std::collections::HashMap;

pub const DEFAULT_POSNE_CAP: u64 = 1 << 22;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PosNeOutcome {
    Found { profile: PositionalProfile, payoff: PayoffVector },
    /// every profile was ruled out; `leaves` counts the fully assigned
    /// profiles that had to be checked
    NotFound { leaves: u64 },
    CapExceeded { count: BigUint },
}

/// `Π |vΔ|` over owned vertices.
pub fn positional_profile_count(game: &crate::game::Game) -> BigUint {
    game.owned_vertices()
        .fold(BigUint::one(), |acc, v| acc * BigUint::from(game.successors(v).len()))
}

/// Exhaustive search for a positional equilibrium with payoff inside the
/// thresholds. Profiles are visited in lexicographic order of (vertex,
/// successor), so the first hit is the smallest such profile; subtrees
/// whose payoff bounds already miss the thresholds are skipped.
pub fn solve_posne(ig: &InitializedGame, t: &Thresholds, cap: u64) -> Result<PosNeOutcome, AnalysisError> {
    let count = positional_profile_count(ig);
    if count.to_u64().map_or(true, |c| c > cap) {
        return Ok(PosNeOutcome::CapExceeded { count });
    }
    let mut search = Search::new(ig, t);
    match search.dfs(0)? {
        Some((choice, payoff)) => Ok(PosNeOutcome::Found {
            profile: PositionalProfile::from_raw(choice),
            payoff,
        }),
        None => Ok(PosNeOutcome::NotFound { leaves: search.leaves }),
    }
}

struct Search<'a> {
    ig: &'a InitializedGame,
    t: &'a Thresholds,
    choices: Vec<VertexId>,
    rows: Vec<Row>,
    choice: Vec<Option<VertexId>>,
    targets: Vec<Vec<bool>>,
    bounded: Vec<PlayerId>,
    cache: HashMap<(PlayerId, Vec<VertexId>), Rational>,
    leaves: u64,
}

impl<'a> Search<'a> {
    fn new(ig: &'a InitializedGame, t: &'a Thresholds) -> Self {
        let n = ig.num_vertices();
        let choices: Vec<VertexId> = ig.choice_vertices().collect();
        let mut choice = vec![None; n];
        let rows = (0..n)
            .map(|v| match ig.owner(v) {
                Some(_) if ig.successors(v).len() > 1 => Vec::new(),
                Some(_) => {
                    choice[v] = Some(ig.successors(v)[0]);
                    vec![(ig.successors(v)[0], Rational::one())]
                }
                None => game_row(ig, v),
            })
            .collect();
        let targets = (0..ig.num_players())
            .map(|i| (0..n).map(|v| ig.wins(i, v)).collect())
            .collect();
        let bounded = (0..ig.num_players()).filter(|&i| !t.is_trivial(i)).collect();
        Search {
            ig,
            t,
            choices,
            rows,
            choice,
            targets,
            bounded,
            cache: HashMap::new(),
            leaves: 0,
        }
    }

    fn reach_domain(&self) -> Vec<bool> {
        forward_closure(
            self.rows.len(),
            |v| self.rows[v].iter().map(|e| e.0),
            self.ig.initial(),
        )
    }

    /// False when no completion of the current partial profile can meet the
    /// thresholds. Unassigned choice vertices have empty rows, so they act
    /// as absorbing states: reaching `F_i` before them bounds the payoff from
    /// below, reaching `F_i` or them bounds it from above.
    fn feasible(&self, domain: &[bool]) -> Result<bool, AnalysisError> {
        let v0 = self.ig.initial();
        let open: Vec<bool> = (0..self.rows.len())
            .map(|v| domain[v] && self.rows[v].is_empty() && self.ig.owner(v).is_some())
            .collect();
        for &i in &self.bounded {
            let lo = reach_values(&self.rows, &self.targets[i], Some(domain))?[v0].clone();
            if lo > self.t.upper[i] {
                return Ok(false);
            }
            let upper_targets: Vec<bool> = self.targets[i].iter().zip(&open).map(|(a, b)| *a || *b).collect();
            let hi = reach_values(&self.rows, &upper_targets, Some(domain))?[v0].clone();
            if hi < self.t.lower[i] {
                return Ok(false);
            }
        }
        Ok(true)
    }

    fn dfs(&mut self, depth: usize) -> Result<Option<(Vec<Option<VertexId>>, PayoffVector)>, AnalysisError> {
        if depth == self.choices.len() {
            return self.leaf();
        }
        let v = self.choices[depth];
        for k in 0..self.ig.successors(v).len() {
            let w = self.ig.successors(v)[k];
            self.rows[v] = vec![(w, Rational::one())];
            self.choice[v] = Some(w);
            let domain = self.reach_domain();
            // an unreachable vertex leaves the bounds of the parent unchanged
            if domain[v] && !self.bounded.is_empty() && !self.feasible(&domain)? {
                continue;
            }
            if let Some(hit) = self.dfs(depth + 1)? {
                return Ok(Some(hit));
            }
        }
        self.rows[v] = Vec::new();
        self.choice[v] = None;
        Ok(None)
    }

    fn leaf(&mut self) -> Result<Option<(Vec<Option<VertexId>>, PayoffVector)>, AnalysisError> {
        self.leaves += 1;
        let ig = self.ig;
        let v0 = ig.initial();
        let n = self.rows.len();
        let domain = self.reach_domain();
        let mut values = Vec::with_capacity(ig.num_players());
        for i in 0..ig.num_players() {
            values.push(reach_values(&self.rows, &self.targets[i], None)?);
        }
        let payoff: PayoffVector = values.iter().map(|z| z[v0].clone()).collect();
        if !self.t.contains(&payoff) {
            return Ok(None);
        }
        // a profitable one-shot switch at a visited vertex refutes the profile
        for v in (0..n).filter(|&v| domain[v]) {
            if let Some(i) = ig.owner(v) {
                let z = &values[i];
                if ig.successors(v).iter().any(|&w| z[w] > z[v]) {
                    return Ok(None);
                }
            }
        }
        for i in 0..ig.num_players() {
            if payoff[i] == Rational::one() {
                continue;
            }
            let key: Vec<VertexId> = self
                .choices
                .iter()
                .filter(|&&v| ig.owner(v) != Some(i))
                .map(|&v| self.choice[v].unwrap())
                .collect();
            let key = (i, key);
            let best = match self.cache.get(&key) {
                Some(r) => r.clone(),
                None => {
                    let rows = &self.rows;
                    let r = best_response_core(ig, i, |v| rows[v].clone(), Some(v0))?[v0].clone();
                    self.cache.insert(key, r.clone());
                    r
                }
            };
            if best != payoff[i] {
                return Ok(None);
            }
        }
        Ok(Some((self.choice.clone(), payoff)))
    }
}
