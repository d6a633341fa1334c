use crate::analysis::backward_closure;
use crate::game::{Game, VertexId};
use num_bigint::BigUint;
use num_traits::One;
use std::collections::BTreeSet;

/// The edges a stationary profile plays with positive probability.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Support {
    pub edges: BTreeSet<(VertexId, VertexId)>,
}

impl Support {
    pub fn contains(&self, v: VertexId, w: VertexId) -> bool {
        self.edges.contains(&(v, w))
    }

    /// Successors of `v` inside the support, ascending.
    pub fn successors(&self, v: VertexId) -> impl Iterator<Item = VertexId> + '_ {
        self.edges.range((v, 0)..=(v, VertexId::MAX)).map(|e| e.1)
    }

    /// Checks the support shape: exactly the positive edges at stochastic
    /// vertices, a nonempty subset of `vΔ` at owned ones.
    pub fn check(&self, game: &Game) -> Result<(), String> {
        for &(v, w) in &self.edges {
            if v >= game.num_vertices() || !game.successors(v).contains(&w) {
                return Err(format!("edge ({v}, {w}) is not a game edge"));
            }
        }
        for v in game.vertices() {
            let here: Vec<VertexId> = self.successors(v).collect();
            if game.is_stochastic(v) {
                if here != game.successors(v) {
                    return Err(format!("support at stochastic vertex `{}` differs from its edges", game.name(v)));
                }
            } else if here.is_empty() {
                return Err(format!("support at `{}` is empty", game.name(v)));
            }
        }
        Ok(())
    }

    pub fn render(&self, game: &Game) -> Vec<(String, String)> {
        self.edges
            .iter()
            .map(|&(v, w)| (game.name(v).to_string(), game.name(w).to_string()))
            .collect()
    }
}

/// `Π (2^|vΔ| − 1)` over owned vertices.
pub fn support_count(game: &Game) -> BigUint {
    game.owned_vertices().fold(BigUint::one(), |acc, v| {
        acc * ((BigUint::one() << game.successors(v).len()) - BigUint::one())
    })
}

/// Every support exactly once. Owned vertices are counters in index order
/// (the first one most significant); each counts through the nonempty
/// subsets of its successor list by ascending bitmask.
pub fn enumerate_supports(game: &Game) -> impl Iterator<Item = Support> + '_ {
    let owned: Vec<VertexId> = game.owned_vertices().collect();
    let limits: Vec<u64> = owned
        .iter()
        .map(|&v| {
            let k = game.successors(v).len();
            assert!(k < 64, "vertex `{}` has too many successors to enumerate", game.name(v));
            (1u64 << k) - 1
        })
        .collect();
    let fixed: BTreeSet<(VertexId, VertexId)> = game
        .vertices()
        .filter(|&v| game.is_stochastic(v))
        .flat_map(|v| game.successors(v).iter().map(move |&w| (v, w)))
        .collect();
    let mut masks: Option<Vec<u64>> = Some(vec![1; owned.len()]);
    std::iter::from_fn(move || {
        let current = masks.clone()?;
        let mut edges = fixed.clone();
        for (k, &v) in owned.iter().enumerate() {
            for (b, &w) in game.successors(v).iter().enumerate() {
                if current[k] >> b & 1 == 1 {
                    edges.insert((v, w));
                }
            }
        }
        // advance the mixed-radix counter, least significant last
        let mut next = current;
        let mut k = next.len();
        masks = loop {
            if k == 0 {
                break None;
            }
            k -= 1;
            if next[k] < limits[k] {
                next[k] += 1;
                break Some(next);
            }
            next[k] = 1;
        };
        Some(Support { edges })
    })
}

/// `R_i` for every player: vertices that reach `F_i` in the graph `(V, S)`.
pub fn reach_sets(game: &Game, s: &Support) -> Vec<BTreeSet<VertexId>> {
    let n = game.num_vertices();
    let mut succ: Vec<Vec<VertexId>> = vec![Vec::new(); n];
    for &(v, w) in &s.edges {
        succ[v].push(w);
    }
    (0..game.num_players())
        .map(|i| {
            let targets: Vec<bool> = (0..n).map(|v| game.wins(i, v)).collect();
            let can = backward_closure(n, |v| succ[v].iter().copied(), &targets);
            (0..n).filter(|&v| can[v]).collect()
        })
        .collect()
}
