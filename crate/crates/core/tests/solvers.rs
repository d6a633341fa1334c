mod common;

use common::{best_response_oracle, payoff_oracle, posne_oracle, random_game};
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use ssmg::analysis::{verify_ne, Thresholds};
use ssmg::game::{GameBuilder, InitializedGame};
use ssmg::rational::{int, ratio, Rational};
use ssmg::reductions::example_game;
use ssmg::solvers::{
    enumerate_supports, positional_profile_count, solve_posne, solve_statne, support_count, PosNeOutcome,
    SolverConfig, SolverError, StatNeOutcome, WitnessCheck, DEFAULT_POSNE_CAP,
};

fn random_thresholds(rng: &mut ChaCha8Rng, players: usize) -> Thresholds {
    let lower: Vec<Rational> = (0..players).map(|_| ratio(rng.gen_range(0..=2), 4)).collect();
    let upper: Vec<Rational> = lower.iter().map(|x| (x + ratio(rng.gen_range(1..=4), 4)).min(int(1))).collect();
    Thresholds::new(players, lower, upper).unwrap()
}

#[test]
fn positional_search_agrees_with_enumeration() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x9051);
    let mut found = 0;
    for g in 0..200 {
        let ig = random_game(&mut rng, 8);
        let t = random_thresholds(&mut rng, ig.num_players());
        let outcome = solve_posne(&ig, &t, DEFAULT_POSNE_CAP).unwrap();
        let expected = posne_oracle(&ig, &t.lower, &t.upper);
        match outcome {
            PosNeOutcome::Found { profile, payoff } => {
                found += 1;
                assert!(expected, "game {g}: search found a profile the enumeration rejects");
                let sp = profile.to_stationary();
                assert_eq!(payoff, payoff_oracle(&ig, &sp));
                assert!(verify_ne(&ig, &sp, &t).unwrap().accepted());
                for i in 0..ig.num_players() {
                    assert_eq!(best_response_oracle(&ig, &sp, i), payoff[i], "game {g}, player {i}");
                }
            }
            PosNeOutcome::NotFound { .. } => assert!(!expected, "game {g}: search missed an equilibrium"),
            PosNeOutcome::CapExceeded { .. } => panic!("game {g}: cap hit"),
        }
    }
    assert!(found > 20 && found < 200, "{found} searches succeeded");
}

#[test]
fn cap_is_reported_not_swallowed() {
    let ig = example_game("prop1").unwrap();
    assert_eq!(positional_profile_count(&ig), 16u32.into());
    let outcome = solve_posne(&ig, &Thresholds::unconstrained(3), 15).unwrap();
    assert!(matches!(outcome, PosNeOutcome::CapExceeded { .. }));
}

#[test]
fn supports_are_distinct_and_complete() {
    let ig = example_game("prop2").unwrap();
    let all: Vec<_> = enumerate_supports(&ig).collect();
    assert_eq!(support_count(&ig), (all.len() as u32).into());
    assert_eq!(all.len(), 27);
    let distinct: std::collections::BTreeSet<_> = all.iter().collect();
    assert_eq!(distinct.len(), all.len());
    assert!(all.iter().all(|s| s.check(&ig).is_ok()));
}

fn solver() -> Option<SolverConfig> {
    ["/usr/local/bin/z3", "z3"]
        .into_iter()
        .find(|c| std::process::Command::new(c).arg("-version").output().is_ok_and(|o| o.status.success()))
        .map(|c| SolverConfig {
            command: format!("{c} {{file}}"),
            jobs: 2,
            keep_dir: None,
        })
}

#[test]
fn missing_solver_is_reported() {
    let ig = example_game("prop2").unwrap();
    let config = SolverConfig {
        command: "definitely-not-a-solver {file}".into(),
        ..SolverConfig::default()
    };
    let r = solve_statne(&ig, &Thresholds::player0_wins(3), &config, 1000);
    assert!(matches!(r, Err(SolverError::Unavailable(_))));
}

#[test]
fn stationary_search_with_solver() {
    let Some(config) = solver() else {
        eprintln!("no solver installed; skipping");
        return;
    };
    let ig = example_game("prop2").unwrap();
    match solve_statne(&ig, &Thresholds::player0_wins(3), &config, 1000).unwrap() {
        StatNeOutcome::Found(report) => {
            assert_eq!(report.witness, WitnessCheck::Verified);
            let p = report.profile.unwrap();
            assert!(verify_ne(&ig, &p, &Thresholds::player0_wins(3)).unwrap().accepted());
        }
        other => panic!("{other:?}"),
    }

    let mut b = GameBuilder::new(&["0"]);
    let t = b.winning_terminal("t", &[0]);
    let ig = InitializedGame::new(b.build().desugar().unwrap(), t).unwrap();
    let th = Thresholds::new(1, vec![int(1)], vec![int(1)]).unwrap();
    assert!(matches!(solve_statne(&ig, &th, &config, 10).unwrap(), StatNeOutcome::Found(_)));

    let mut b = GameBuilder::new(&["0", "1"]);
    let s = b.stochastic("s");
    let w = b.winning_terminal("w", &[0]);
    let l = b.winning_terminal("l", &[1]);
    b.prob_edge(s, w, ratio(1, 3)).prob_edge(s, l, ratio(2, 3));
    let ig = InitializedGame::new(b.build().desugar().unwrap(), s).unwrap();
    let th = Thresholds::new(2, vec![ratio(1, 3), ratio(2, 3)], vec![ratio(1, 3), ratio(2, 3)]).unwrap();
    assert!(matches!(solve_statne(&ig, &th, &config, 10).unwrap(), StatNeOutcome::Found(_)));
    let th = Thresholds::new(2, vec![ratio(1, 2), Rational::zero()], vec![int(1), int(1)]).unwrap();
    assert!(matches!(solve_statne(&ig, &th, &config, 10).unwrap(), StatNeOutcome::NotFound { supports: 1 }));
}
