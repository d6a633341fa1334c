use super::counter::{counter_game, intended_2cm_profile, Instruction, TwoCounterMachine, DEFAULT_COUNTER_CAP};
use super::ReductionError;
use crate::game::{GameBuilder, InitializedGame};
use crate::profile::{FiniteStateProfile, FiniteStateStrategy, Profile, StationaryProfile};
use crate::rational::{int, ratio};
use std::collections::BTreeMap;

pub const EXAMPLE_NAMES: [&str; 3] = ["prop1", "prop2", "prop3"];

/// Stages of the computation followed by the shipped `prop3` profile.
const PROP3_HORIZON: usize = 40;

/// The built-in example games:
/// - `prop1`: a finite-state equilibrium where player 0 wins, but no
///   stationary one where player 0 wins with positive probability;
/// - `prop2`: a stationary equilibrium where player 0 wins, but no pure one
///   where player 0 wins with positive probability;
/// - `prop3`: the single-increment counter machine game behind a new
///   initial choice for player `1`.
pub fn example_game(name: &str) -> Result<InitializedGame, ReductionError> {
    match name {
        "prop1" => prop1(),
        "prop2" => prop2(),
        "prop3" => Ok(counter_game(&inc_machine(), true)?.game),
        _ => Err(ReductionError::UnknownExample(name.to_string())),
    }
}

/// The profile documented with each example game.
pub fn example_profile(name: &str, ig: &InitializedGame) -> Result<Profile, ReductionError> {
    let id = |v: &str| ig.vertex_index(v).ok_or_else(|| ReductionError::UnknownExample(format!("{name}: {v}")));
    match name {
        "prop1" => {
            // players 1 and 2 let the play through once, then leave
            let once = |at: &str, on: &str, off: &str, pass: (&str, &str)| -> Result<FiniteStateStrategy, ReductionError> {
                let (v, w) = (id(at)?, id(pass.0)?);
                Ok(FiniteStateStrategy {
                    memory: vec!["first".into(), "later".into()],
                    initial: 0,
                    update: BTreeMap::from([((0, v), 1)]),
                    choice: BTreeMap::from([
                        ((0, v), id(on)?),
                        ((1, v), id(off)?),
                        ((0, w), id(pass.1)?),
                        ((1, w), id(pass.1)?),
                    ]),
                })
            };
            let p1 = once("v2", "v3", "v2.exit", ("v0", "v1"))?;
            let p2 = once("v3", "v4", "v3.exit", ("v1", "v2"))?;
            let fsp = FiniteStateProfile::new(ig, vec![FiniteStateStrategy::memoryless(), p1, p2])?;
            Ok(Profile::FiniteState(fsp))
        }
        "prop2" => {
            let half = ratio(1, 2);
            let choices = BTreeMap::from([
                (id("v0")?, BTreeMap::from([(id("v1")?, int(1))])),
                (id("v1")?, BTreeMap::from([(id("v2")?, int(1))])),
                (id("v2")?, BTreeMap::from([(id("v2.a")?, half.clone()), (id("v2.b")?, half)])),
            ]);
            Ok(Profile::Stationary(StationaryProfile::new(ig, &choices)?))
        }
        "prop3" => {
            let cg = counter_game(&inc_machine(), true)?;
            Ok(Profile::FiniteState(
                intended_2cm_profile(&cg, PROP3_HORIZON, DEFAULT_COUNTER_CAP)?.profile,
            ))
        }
        _ => Err(ReductionError::UnknownExample(name.to_string())),
    }
}

fn inc_machine() -> TwoCounterMachine {
    TwoCounterMachine::new(vec![Instruction::Inc { counter: 1, next: 1 }]).expect("valid machine")
}

fn prop1() -> Result<InitializedGame, ReductionError> {
    let mut b = GameBuilder::new(&["0", "1", "2"]);
    let v: Vec<_> = [(0, Some(1)), (1, Some(2)), (2, Some(1)), (3, Some(2)), (4, None)]
        .iter()
        .map(|&(k, owner)| match owner {
            Some(p) => b.owned(format!("v{k}"), p),
            None => b.stochastic(format!("v{k}")),
        })
        .collect();
    let pay = |a: i64, b: i64, c: i64, d: i64| vec![ratio(a, d), ratio(b, d), ratio(c, d)];
    let e0 = b.payoff_terminal("v0.exit", pay(0, 1, 0, 2));
    let e1 = b.payoff_terminal("v1.exit", pay(0, 0, 1, 2));
    let e2 = b.winning_terminal("v2.exit", &[0, 2]);
    let e3 = b.terminal("v3.exit");
    let e4 = b.winning_terminal("v4.exit", &[0, 1]);
    b.edge(v[0], v[1]).edge(v[0], e0);
    b.edge(v[1], v[2]).edge(v[1], e1);
    b.edge(v[2], v[3]).edge(v[2], e2);
    b.edge(v[3], v[4]).edge(v[3], e3);
    b.prob_edge(v[4], v[2], ratio(1, 2)).prob_edge(v[4], e4, ratio(1, 2));
    Ok(InitializedGame::new(b.build().desugar()?, v[0])?)
}

fn prop2() -> Result<InitializedGame, ReductionError> {
    let mut b = GameBuilder::new(&["0", "1", "2"]);
    let v0 = b.owned("v0", 1);
    let v1 = b.owned("v1", 2);
    let v2 = b.owned("v2", 0);
    let a = b.winning_terminal("v2.a", &[0, 1]);
    let c = b.winning_terminal("v2.b", &[0, 2]);
    let e0 = b.payoff_terminal("v0.exit", vec![int(0), ratio(1, 2), int(0)]);
    let e1 = b.payoff_terminal("v1.exit", vec![int(0), int(0), ratio(1, 2)]);
    b.edge(v0, v1).edge(v0, e0);
    b.edge(v1, v2).edge(v1, e1);
    b.edge(v2, a).edge(v2, c);
    Ok(InitializedGame::new(b.build().desugar()?, v0)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analysis::{finite_state_payoff, stationary_payoff};
    use crate::game::validate;

    #[test]
    fn examples_validate() {
        for name in EXAMPLE_NAMES {
            let ig = example_game(name).unwrap();
            assert!(validate(&ig).is_empty(), "{name}");
        }
        assert!(example_game("prop4").is_err());
    }

    #[test]
    fn documented_payoffs() {
        let ig = example_game("prop1").unwrap();
        let Profile::FiniteState(p) = example_profile("prop1", &ig).unwrap() else {
            panic!()
        };
        assert_eq!(finite_state_payoff(&ig, &p).unwrap(), vec![int(1), ratio(1, 2), ratio(1, 2)]);
        let ig = example_game("prop2").unwrap();
        let Profile::Stationary(p) = example_profile("prop2", &ig).unwrap() else {
            panic!()
        };
        assert_eq!(stationary_payoff(&ig, &p).unwrap(), vec![int(1), ratio(1, 2), ratio(1, 2)]);
    }

    #[test]
    fn prop3_has_a_private_exit() {
        let ig = example_game("prop3").unwrap();
        let p = ig.player_index("1").unwrap();
        let v1 = ig.initial();
        assert_eq!(ig.owner(v1), Some(p));
        let exit = ig.vertex_index("v1.exit").unwrap();
        assert!(ig.successors(v1).contains(&exit));
        assert!((0..ig.num_players()).all(|i| ig.wins(i, exit) == (i == p)));
        assert!(ig.win_set(0).is_subset(ig.win_set(p)));
    }
}
