//! Strategy profiles: positional, stationary and pure finite-state.

use crate::game::{Game, PlayerId, VertexId};
use crate::rational::{format_rational, Rational};
use num_traits::{One, Signed, Zero};
use std::collections::BTreeMap;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ProfileError {
    #[error("vertex `{0}` is not owned by any player")]
    NotOwned(String),
    #[error("no choice given for owned vertex `{0}`")]
    MissingChoice(String),
    #[error("`{to}` is not a successor of `{from}`")]
    NotASuccessor { from: String, to: String },
    #[error("negative probability {prob} on `{from}` -> `{to}`")]
    NegativeProbability { from: String, to: String, prob: String },
    #[error("distribution at `{vertex}` sums to {sum}, not 1")]
    NotADistribution { vertex: String, sum: String },
    #[error("player #{0} does not exist")]
    UnknownPlayer(PlayerId),
    #[error("memory state #{state} out of range for player `{player}`")]
    UnknownMemory { player: String, state: usize },
    #[error("vertex `{vertex}` is not owned by player `{player}`")]
    WrongOwner { player: String, vertex: String },
}

/// One successor per owned vertex.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PositionalProfile {
    choice: Vec<Option<VertexId>>,
}

impl PositionalProfile {
    /// Owned vertices with a single successor may be omitted from `choices`.
    pub fn new(game: &Game, choices: &BTreeMap<VertexId, VertexId>) -> Result<Self, ProfileError> {
        let mut choice = vec![None; game.num_vertices()];
        for (&v, &w) in choices {
            if game.owner(v).is_none() {
                return Err(ProfileError::NotOwned(game.name(v).into()));
            }
            if !game.successors(v).contains(&w) {
                return Err(ProfileError::NotASuccessor {
                    from: game.name(v).into(),
                    to: game.name(w).into(),
                });
            }
            choice[v] = Some(w);
        }
        for v in game.owned_vertices() {
            if choice[v].is_none() {
                match game.successors(v) {
                    [w] => choice[v] = Some(*w),
                    _ => return Err(ProfileError::MissingChoice(game.name(v).into())),
                }
            }
        }
        Ok(PositionalProfile { choice })
    }

    /// Builds a profile from a total per-vertex choice vector without checks;
    /// used by enumeration, which only produces valid choices.
    pub(crate) fn from_raw(choice: Vec<Option<VertexId>>) -> Self {
        PositionalProfile { choice }
    }

    pub fn choice(&self, v: VertexId) -> Option<VertexId> {
        self.choice[v]
    }

    pub fn choices(&self) -> BTreeMap<VertexId, VertexId> {
        self.choice
            .iter()
            .enumerate()
            .filter_map(|(v, c)| c.map(|w| (v, w)))
            .collect()
    }

    pub fn to_stationary(&self) -> StationaryProfile {
        StationaryProfile {
            dist: self
                .choice
                .iter()
                .map(|c| match c {
                    Some(w) => vec![(*w, Rational::one())],
                    None => Vec::new(),
                })
                .collect(),
        }
    }

    /// The same behaviour as a one-memory-state finite-state profile.
    pub fn to_finite_state(&self, game: &Game) -> FiniteStateProfile {
        let strategies = (0..game.num_players())
            .map(|i| FiniteStateStrategy {
                memory: vec!["m".to_string()],
                initial: 0,
                update: BTreeMap::new(),
                choice: game
                    .vertices_of(i)
                    .filter_map(|v| self.choice[v].map(|w| ((0, v), w)))
                    .collect(),
            })
            .collect();
        FiniteStateProfile { strategies }
    }
}

/// One probability distribution over `vΔ` per owned vertex.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StationaryProfile {
    /// positive entries only, ascending by target; empty for non-owned vertices
    dist: Vec<Vec<(VertexId, Rational)>>,
}

impl StationaryProfile {
    /// Owned vertices with a single successor may be omitted. Entries equal
    /// to zero are accepted and dropped; negative entries, targets outside
    /// `vΔ` and sums other than 1 are rejected.
    pub fn new(
        game: &Game,
        dists: &BTreeMap<VertexId, BTreeMap<VertexId, Rational>>,
    ) -> Result<Self, ProfileError> {
        let mut dist = vec![Vec::new(); game.num_vertices()];
        let mut given = vec![false; game.num_vertices()];
        for (&v, d) in dists {
            if game.owner(v).is_none() {
                return Err(ProfileError::NotOwned(game.name(v).into()));
            }
            let mut sum = Rational::zero();
            let mut entries = Vec::new();
            for (&w, p) in d {
                if !game.successors(v).contains(&w) {
                    return Err(ProfileError::NotASuccessor {
                        from: game.name(v).into(),
                        to: game.name(w).into(),
                    });
                }
                if p.is_negative() {
                    return Err(ProfileError::NegativeProbability {
                        from: game.name(v).into(),
                        to: game.name(w).into(),
                        prob: format_rational(p),
                    });
                }
                sum += p;
                if !p.is_zero() {
                    entries.push((w, p.clone()));
                }
            }
            if !sum.is_one() {
                return Err(ProfileError::NotADistribution {
                    vertex: game.name(v).into(),
                    sum: format_rational(&sum),
                });
            }
            dist[v] = entries;
            given[v] = true;
        }
        for v in game.owned_vertices() {
            if !given[v] {
                match game.successors(v) {
                    [w] => dist[v] = vec![(*w, Rational::one())],
                    _ => return Err(ProfileError::MissingChoice(game.name(v).into())),
                }
            }
        }
        Ok(StationaryProfile { dist })
    }

    /// A profile for a game without owned choices (or where every owned
    /// vertex has a single successor).
    pub fn forced(game: &Game) -> Result<Self, ProfileError> {
        Self::new(game, &BTreeMap::new())
    }

    pub fn distribution(&self, v: VertexId) -> &[(VertexId, Rational)] {
        &self.dist[v]
    }

    pub fn prob(&self, v: VertexId, w: VertexId) -> Rational {
        self.dist[v]
            .iter()
            .find(|(t, _)| *t == w)
            .map(|(_, p)| p.clone())
            .unwrap_or_else(Rational::zero)
    }

    pub fn distributions(&self) -> BTreeMap<VertexId, BTreeMap<VertexId, Rational>> {
        self.dist
            .iter()
            .enumerate()
            .filter(|(_, d)| !d.is_empty())
            .map(|(v, d)| (v, d.iter().cloned().collect()))
            .collect()
    }

    /// True when every distribution is a point mass.
    pub fn as_positional(&self) -> Option<PositionalProfile> {
        let mut choice = Vec::with_capacity(self.dist.len());
        for d in &self.dist {
            match d.as_slice() {
                [] => choice.push(None),
                [(w, _)] => choice.push(Some(*w)),
                _ => return None,
            }
        }
        Some(PositionalProfile { choice })
    }

    /// Replaces the distributions at the given vertices.
    pub fn with_distributions(
        &self,
        game: &Game,
        replace: &BTreeMap<VertexId, BTreeMap<VertexId, Rational>>,
    ) -> Result<Self, ProfileError> {
        let mut all = self.distributions();
        for (v, d) in replace {
            all.insert(*v, d.clone());
        }
        Self::new(game, &all)
    }
}

/// A pure strategy implemented by a Mealy machine: on reaching vertex `v`
/// with memory `m`, an owned vertex moves to `choice(m, v)` and the memory
/// becomes `update(m, v)`.
///
/// Missing `update` entries leave the memory unchanged; missing `choice`
/// entries select the lowest-index successor.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiniteStateStrategy {
    pub memory: Vec<String>,
    pub initial: usize,
    pub update: BTreeMap<(usize, VertexId), usize>,
    pub choice: BTreeMap<(usize, VertexId), VertexId>,
}

impl FiniteStateStrategy {
    pub fn memoryless() -> Self {
        FiniteStateStrategy {
            memory: vec!["m".to_string()],
            initial: 0,
            update: BTreeMap::new(),
            choice: BTreeMap::new(),
        }
    }

    pub fn next_memory(&self, m: usize, v: VertexId) -> usize {
        self.update.get(&(m, v)).copied().unwrap_or(m)
    }

    pub fn choose(&self, game: &Game, m: usize, v: VertexId) -> VertexId {
        self.choice
            .get(&(m, v))
            .copied()
            .unwrap_or_else(|| game.successors(v)[0])
    }
}

/// One finite-state strategy per player.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiniteStateProfile {
    strategies: Vec<FiniteStateStrategy>,
}

impl FiniteStateProfile {
    pub fn new(game: &Game, strategies: Vec<FiniteStateStrategy>) -> Result<Self, ProfileError> {
        if strategies.len() != game.num_players() {
            return Err(ProfileError::UnknownPlayer(strategies.len()));
        }
        for (i, s) in strategies.iter().enumerate() {
            let pname = game.player_name(i).to_string();
            let check_mem = |m: usize| {
                if m >= s.memory.len() {
                    Err(ProfileError::UnknownMemory {
                        player: pname.clone(),
                        state: m,
                    })
                } else {
                    Ok(())
                }
            };
            check_mem(s.initial)?;
            for (&(m, _), &m2) in &s.update {
                check_mem(m)?;
                check_mem(m2)?;
            }
            for (&(m, v), &w) in &s.choice {
                check_mem(m)?;
                if game.owner(v) != Some(i) {
                    return Err(ProfileError::WrongOwner {
                        player: pname.clone(),
                        vertex: game.name(v).into(),
                    });
                }
                if !game.successors(v).contains(&w) {
                    return Err(ProfileError::NotASuccessor {
                        from: game.name(v).into(),
                        to: game.name(w).into(),
                    });
                }
            }
        }
        Ok(FiniteStateProfile { strategies })
    }

    pub fn strategy(&self, i: PlayerId) -> &FiniteStateStrategy {
        &self.strategies[i]
    }

    pub fn strategies(&self) -> &[FiniteStateStrategy] {
        &self.strategies
    }

    pub fn initial_memory(&self) -> Vec<usize> {
        self.strategies.iter().map(|s| s.initial).collect()
    }

    pub fn is_memoryless(&self) -> bool {
        self.strategies.iter().all(|s| s.memory.len() == 1)
    }

    /// The positional profile played from the initial memory states.
    pub fn initial_positional(&self, game: &Game) -> PositionalProfile {
        let mut choice = vec![None; game.num_vertices()];
        for v in game.owned_vertices() {
            let i = game.owner(v).unwrap();
            let s = &self.strategies[i];
            choice[v] = Some(s.choose(game, s.initial, v));
        }
        PositionalProfile { choice }
    }
}

/// Any of the three profile kinds.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Profile {
    Positional(PositionalProfile),
    Stationary(StationaryProfile),
    FiniteState(FiniteStateProfile),
}

impl Profile {
    pub fn kind(&self) -> &'static str {
        match self {
            Profile::Positional(_) => "positional",
            Profile::Stationary(_) => "stationary",
            Profile::FiniteState(_) => "finite-state",
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::GameBuilder;
    use crate::rational::ratio;

    fn small() -> Game {
        let mut b = GameBuilder::new(&["0", "1"]);
        let v = b.owned("v", 0);
        let a = b.winning_terminal("a", &[0]);
        let c = b.winning_terminal("c", &[1]);
        let u = b.owned("u", 1);
        b.edge(v, a).edge(v, c).edge(u, a);
        b.build().game
    }

    #[test]
    fn forced_vertices_are_filled_in() {
        let g = small();
        let p = PositionalProfile::new(&g, &BTreeMap::from([(0, 1)])).unwrap();
        assert_eq!(p.choice(3), Some(1));
        assert!(matches!(
            PositionalProfile::new(&g, &BTreeMap::new()),
            Err(ProfileError::MissingChoice(_))
        ));
    }

    #[test]
    fn stationary_rejects_bad_distributions() {
        let g = small();
        let neg = BTreeMap::from([(0, BTreeMap::from([(1, ratio(3, 2)), (2, ratio(-1, 2))]))]);
        assert!(matches!(
            StationaryProfile::new(&g, &neg),
            Err(ProfileError::NegativeProbability { .. })
        ));
        let short = BTreeMap::from([(0, BTreeMap::from([(1, ratio(1, 3))]))]);
        assert!(matches!(
            StationaryProfile::new(&g, &short),
            Err(ProfileError::NotADistribution { .. })
        ));
        let off = BTreeMap::from([(0, BTreeMap::from([(3, ratio(1, 1))]))]);
        assert!(matches!(
            StationaryProfile::new(&g, &off),
            Err(ProfileError::NotASuccessor { .. })
        ));
        let ok = BTreeMap::from([(0, BTreeMap::from([(1, ratio(1, 2)), (2, ratio(1, 2))]))]);
        let p = StationaryProfile::new(&g, &ok).unwrap();
        assert!(p.as_positional().is_none());
        assert_eq!(p.prob(0, 2), ratio(1, 2));
    }

    #[test]
    fn finite_state_checks_ownership() {
        let g = small();
        let mut s = FiniteStateStrategy::memoryless();
        s.choice.insert((0, 0), 1);
        let err = FiniteStateProfile::new(&g, vec![FiniteStateStrategy::memoryless(), s]);
        assert!(matches!(err, Err(ProfileError::WrongOwner { .. })));
    }
}
