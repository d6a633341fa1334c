use crate::game::{InitializedGame, VertexId};
use crate::profile::FiniteStateProfile;
use crate::rational::Rational;
use num_traits::{One, Zero};
use std::collections::HashMap;

/// An interval guaranteed to contain one player's payoff.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BoundedPayoff {
    pub lower: Rational,
    pub upper: Rational,
}

impl BoundedPayoff {
    pub fn width(&self) -> Rational {
        &self.upper - &self.lower
    }

    pub fn contains(&self, q: &Rational) -> bool {
        &self.lower <= q && q <= &self.upper
    }
}

/// Follows the play of a pure profile for `horizon` steps, pushing
/// probability mass forward over (vertex, joint memory) states. Mass
/// absorbed in a terminal counts for its winners; mass still moving after
/// the horizon is unexplored and widens every interval by the same amount.
pub fn bounded_payoff(ig: &InitializedGame, profile: &FiniteStateProfile, horizon: usize) -> Vec<BoundedPayoff> {
    let np = ig.num_players();
    let mut won = vec![Rational::zero(); np];
    let mut frontier: HashMap<(VertexId, Vec<usize>), Rational> = HashMap::new();
    frontier.insert((ig.initial(), profile.initial_memory()), Rational::one());
    for _ in 0..horizon {
        if frontier.is_empty() {
            break;
        }
        let mut next: HashMap<(VertexId, Vec<usize>), Rational> = HashMap::new();
        for ((v, mem), mass) in frontier {
            if ig.is_terminal(v) {
                for (i, w) in won.iter_mut().enumerate() {
                    if ig.wins(i, v) {
                        *w += &mass;
                    }
                }
                continue;
            }
            let updated: Vec<usize> = (0..np)
                .map(|j| profile.strategy(j).next_memory(mem[j], v))
                .collect();
            match ig.owner(v) {
                Some(j) => {
                    let w = profile.strategy(j).choose(ig, mem[j], v);
                    *next.entry((w, updated)).or_insert_with(Rational::zero) += mass;
                }
                None => {
                    for &w in ig.successors(v) {
                        let share = &mass * ig.prob(v, w);
                        *next.entry((w, updated.clone())).or_insert_with(Rational::zero) += share;
                    }
                }
            }
        }
        frontier = next;
    }
    let open = frontier.values().fold(Rational::zero(), |a, b| a + b);
    won.into_iter()
        .map(|lower| BoundedPayoff {
            upper: &lower + &open,
            lower,
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::GameBuilder;
    use crate::rational::{int, ratio};

    fn coin_loop() -> (InitializedGame, FiniteStateProfile) {
        let mut b = GameBuilder::new(&["0"]);
        let s = b.stochastic("s");
        let win = b.winning_terminal("win", &[0]);
        b.prob_edge(s, s, ratio(1, 2)).prob_edge(s, win, ratio(1, 2));
        let ig = InitializedGame::new(b.build().desugar().unwrap(), s).unwrap();
        let p = FiniteStateProfile::new(&ig, vec![crate::profile::FiniteStateStrategy::memoryless()]).unwrap();
        (ig, p)
    }

    #[test]
    fn zero_horizon_knows_nothing() {
        let (ig, p) = coin_loop();
        assert_eq!(
            bounded_payoff(&ig, &p, 0),
            vec![BoundedPayoff {
                lower: int(0),
                upper: int(1)
            }]
        );
    }

    #[test]
    fn intervals_shrink_towards_the_value() {
        let (ig, p) = coin_loop();
        let b = bounded_payoff(&ig, &p, 3);
        assert_eq!(b[0].lower, ratio(3, 4));
        assert_eq!(b[0].width(), ratio(1, 4));
        assert!(b[0].contains(&int(1)));
    }

    #[test]
    fn terminal_start_is_decided_at_once() {
        let mut b = GameBuilder::new(&["0", "1"]);
        let t = b.winning_terminal("t", &[0]);
        let ig = InitializedGame::new(b.build().desugar().unwrap(), t).unwrap();
        let p = FiniteStateProfile::new(
            &ig,
            vec![
                crate::profile::FiniteStateStrategy::memoryless(),
                crate::profile::FiniteStateStrategy::memoryless(),
            ],
        )
        .unwrap();
        let r = bounded_payoff(&ig, &p, 1);
        assert_eq!((r[0].lower.clone(), r[0].upper.clone()), (int(1), int(1)));
        assert_eq!((r[1].lower.clone(), r[1].upper.clone()), (int(0), int(0)));
    }
}
