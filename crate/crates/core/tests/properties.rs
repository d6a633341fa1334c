mod common;

use common::{chain_rows, payoff_oracle, random_game, random_stationary};
use num_traits::{One, Zero};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use ssmg::analysis::{
    best_response_value, finite_state_payoff, stationary_payoff, stationary_values, terminal_distribution, verify_ne,
    Thresholds,
};
use ssmg::game::{GameBuilder, InitializedGame};
use ssmg::profile::{PositionalProfile, StationaryProfile};
use ssmg::rational::{ratio, to_f64, Rational};
use ssmg::reductions::bounded_payoff;
use ssmg::solvers::{build_statne_formula, enumerate_supports, Support};
use std::collections::{BTreeMap, BTreeSet};

fn game_and_profile(seed: u64, max_vertices: usize) -> (InitializedGame, StationaryProfile) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let ig = random_game(&mut rng, max_vertices);
    let sp = random_stationary(&mut rng, &ig);
    (ig, sp)
}

fn random_positional(seed: u64, ig: &InitializedGame) -> PositionalProfile {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let choices: BTreeMap<usize, usize> = ig
        .owned_vertices()
        .map(|v| {
            let succ = ig.successors(v);
            (v, succ[rng.gen_range(0..succ.len())])
        })
        .collect();
    PositionalProfile::new(ig, &choices).unwrap()
}

/// The same game with players renamed so that old player `i` becomes `perm[i]`.
fn permute_players(ig: &InitializedGame, perm: &[usize]) -> InitializedGame {
    let n = ig.num_players();
    let mut names = vec![String::new(); n];
    for i in 0..n {
        names[perm[i]] = ig.player_name(i).to_string();
    }
    let mut b = GameBuilder::new(&names);
    for v in ig.vertices() {
        if ig.is_terminal(v) && ig.owner(v).is_none() {
            let winners: Vec<usize> = (0..n).filter(|&i| ig.wins(i, v)).map(|i| perm[i]).collect();
            b.winning_terminal(ig.name(v), &winners);
        } else {
            match ig.owner(v) {
                Some(i) => b.owned(ig.name(v), perm[i]),
                None => b.stochastic(ig.name(v)),
            };
            for i in (0..n).filter(|&i| ig.wins(i, v)) {
                b.add_win(perm[i], v);
            }
        }
    }
    for v in ig.vertices().filter(|&v| !ig.is_terminal(v) || ig.owner(v).is_some()) {
        for &w in ig.successors(v) {
            if ig.owner(v).is_some() {
                b.edge(v, w);
            } else {
                b.prob_edge(v, w, ig.prob(v, w));
            }
        }
    }
    InitializedGame::new(b.build().desugar().unwrap(), ig.initial()).unwrap()
}

fn support_of(ig: &InitializedGame, sp: &StationaryProfile) -> Support {
    let rows = chain_rows(ig, sp);
    let edges = ig
        .vertices()
        .flat_map(|v| rows[v].iter().filter(|(_, p)| !p.is_zero()).map(move |(w, _)| (v, *w)))
        .collect();
    Support { edges }
}

fn alpha_env(ig: &InitializedGame, sp: &StationaryProfile) -> BTreeMap<String, Rational> {
    let mut env = BTreeMap::new();
    for v in ig.vertices() {
        for &w in ig.successors(v) {
            let p = match ig.owner(v) {
                Some(_) => sp.prob(v, w),
                None => ig.prob(v, w),
            };
            env.insert(format!("alpha_{v}_{w}"), p);
        }
    }
    env
}

/// Maximal reachability value for player `i` by value iteration in floats.
fn float_best_response(ig: &InitializedGame, sp: &StationaryProfile, i: usize) -> f64 {
    let rows = chain_rows(ig, sp);
    let mut x: Vec<f64> = ig.vertices().map(|v| if ig.wins(i, v) { 1.0 } else { 0.0 }).collect();
    for _ in 0..200_000 {
        let mut delta: f64 = 0.0;
        for v in ig.vertices() {
            if ig.wins(i, v) {
                continue;
            }
            let new = if ig.owner(v) == Some(i) {
                ig.successors(v).iter().map(|&w| x[w]).fold(0.0, f64::max)
            } else {
                rows[v].iter().map(|(w, p)| to_f64(p) * x[*w]).sum()
            };
            delta = delta.max((new - x[v]).abs());
            x[v] = new;
        }
        if delta < 1e-15 {
            break;
        }
    }
    x[ig.initial()]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn absorbed_and_trapped_mass_sum_to_one(seed in any::<u64>()) {
        let (ig, sp) = game_and_profile(seed, 9);
        let d = terminal_distribution(&ig, &sp).unwrap();
        prop_assert!(d.total().is_one());
        let payoff = stationary_payoff(&ig, &sp).unwrap();
        for (i, p) in payoff.iter().enumerate() {
            let won: Rational = d.terminals.iter().filter(|(t, _)| ig.wins(i, **t)).map(|(_, m)| m.clone()).sum();
            prop_assert_eq!(&won, p);
        }
    }

    #[test]
    fn best_response_dominates_the_payoff(seed in any::<u64>()) {
        let (ig, sp) = game_and_profile(seed, 9);
        let payoff = stationary_payoff(&ig, &sp).unwrap();
        for i in 0..ig.num_players() {
            let br = best_response_value(&ig, &sp, i).unwrap();
            prop_assert!(br[ig.initial()] >= payoff[i]);
            prop_assert!(br.iter().all(|x| !x.is_negative_or_above_one()));
        }
    }

    #[test]
    fn payoff_matches_elimination_oracle(seed in any::<u64>()) {
        let (ig, sp) = game_and_profile(seed, 9);
        prop_assert_eq!(stationary_payoff(&ig, &sp).unwrap(), payoff_oracle(&ig, &sp));
    }

    #[test]
    fn renaming_players_permutes_payoffs(seed in any::<u64>(), rot in 0usize..3) {
        let (ig, sp) = game_and_profile(seed, 8);
        let n = ig.num_players();
        let perm: Vec<usize> = (0..n).map(|i| (i + rot) % n).collect();
        let renamed = permute_players(&ig, &perm);
        let sp2 = StationaryProfile::new(&renamed, &sp.distributions()).unwrap();
        let before = stationary_payoff(&ig, &sp).unwrap();
        let after = stationary_payoff(&renamed, &sp2).unwrap();
        for i in 0..n {
            prop_assert_eq!(&before[i], &after[perm[i]]);
            let a = best_response_value(&ig, &sp, i).unwrap();
            let b = best_response_value(&renamed, &sp2, perm[i]).unwrap();
            prop_assert_eq!(a, b);
        }
    }

    #[test]
    fn one_state_automata_agree_with_positional_play(seed in any::<u64>()) {
        let (ig, _) = game_and_profile(seed, 9);
        let p = random_positional(seed ^ 0xff, &ig);
        let fsp = p.to_finite_state(&ig);
        prop_assert_eq!(finite_state_payoff(&ig, &fsp).unwrap(), stationary_payoff(&ig, &p.to_stationary()).unwrap());
    }

    #[test]
    fn support_constraints_hold_exactly_on_the_profile_support(seed in any::<u64>(), pick in 0usize..64) {
        let (ig, sp) = game_and_profile(seed, 6);
        let t = Thresholds::unconstrained(ig.num_players());
        let own = support_of(&ig, &sp);
        let supports: Vec<Support> = enumerate_supports(&ig).take(64).collect();
        let other = &supports[pick % supports.len()];
        let env = alpha_env(&ig, &sp);
        for s in [&own, other] {
            let f = build_statne_formula(&ig, &t, s).unwrap();
            prop_assert!(f.is_well_formed());
            prop_assert_eq!(f.eval_parts(&env, &["phi"]).unwrap(), s == &own);
        }
    }

    #[test]
    fn formula_truth_matches_the_equilibrium_check(seed in any::<u64>(), x0 in 0i64..=4) {
        let (ig, sp) = game_and_profile(seed, 6);
        let n = ig.num_players();
        let mut lower = vec![Rational::zero(); n];
        lower[0] = ratio(x0, 4);
        let t = Thresholds::new(n, lower, vec![Rational::one(); n]).unwrap();
        let mut env = alpha_env(&ig, &sp);
        for i in 0..n {
            let z = stationary_values(&ig, &sp, i).unwrap();
            let r = best_response_value(&ig, &sp, i).unwrap();
            for v in ig.vertices() {
                env.insert(format!("z_{i}_{v}"), z[v].clone());
                env.insert(format!("r_{i}_{v}"), r[v].clone());
            }
        }
        let f = build_statne_formula(&ig, &t, &support_of(&ig, &sp)).unwrap();
        prop_assert_eq!(f.eval(&env).unwrap(), verify_ne(&ig, &sp, &t).unwrap().accepted());
    }

    #[test]
    fn lotteries_keep_expected_payoffs(weights in prop::collection::vec(1i64..6, 1..4), seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut b = GameBuilder::new(&["0", "1"]);
        let root = b.stochastic("root");
        let total: i64 = weights.iter().sum();
        let mut expected = vec![Rational::zero(); 2];
        for (k, &w) in weights.iter().enumerate() {
            let pay: Vec<Rational> = (0..2).map(|_| ratio(rng.gen_range(0..=6), rng.gen_range(1..=6)).min(Rational::one())).collect();
            for i in 0..2 {
                expected[i] += ratio(w, total) * &pay[i];
            }
            let t = b.payoff_terminal(format!("t{k}"), pay);
            b.prob_edge(root, t, ratio(w, total));
        }
        let ig = InitializedGame::new(b.build().desugar().unwrap(), root).unwrap();
        let sp = StationaryProfile::forced(&ig).unwrap();
        prop_assert_eq!(stationary_payoff(&ig, &sp).unwrap(), expected);
    }

    #[test]
    fn exact_best_response_matches_float_iteration(seed in any::<u64>()) {
        let (ig, sp) = game_and_profile(seed, 9);
        for i in 0..ig.num_players() {
            let exact = to_f64(&best_response_value(&ig, &sp, i).unwrap()[ig.initial()]);
            let approx = float_best_response(&ig, &sp, i);
            prop_assert!((exact - approx).abs() < 1e-6, "player {}: {} vs {}", i, exact, approx);
        }
    }

    #[test]
    fn bounded_intervals_nest_and_narrow(seed in any::<u64>(), h in 0usize..12, extra in 0usize..12) {
        let (ig, _) = game_and_profile(seed, 9);
        let p = random_positional(seed.rotate_left(7), &ig);
        let fsp = p.to_finite_state(&ig);
        let exact = stationary_payoff(&ig, &p.to_stationary()).unwrap();
        let short = bounded_payoff(&ig, &fsp, h);
        let long = bounded_payoff(&ig, &fsp, h + extra);
        for i in 0..ig.num_players() {
            prop_assert!(short[i].lower <= long[i].lower && long[i].upper <= short[i].upper);
            prop_assert!(long[i].width() <= short[i].width());
            prop_assert!(long[i].contains(&exact[i]));
        }
    }
}

trait UnitInterval {
    fn is_negative_or_above_one(&self) -> bool;
}

impl UnitInterval for Rational {
    fn is_negative_or_above_one(&self) -> bool {
        self < &Rational::zero() || self > &Rational::one()
    }
}

#[test]
fn supports_of_sampled_profiles_are_enumerated() {
    let (ig, sp) = game_and_profile(7, 6);
    let own = support_of(&ig, &sp);
    let all: BTreeSet<Support> = enumerate_supports(&ig).collect();
    assert!(all.contains(&own));
}
