//! A two-state automaton profile is an equilibrium in which player 0 wins,
//! while no positional profile gives player 0 anything.

use ssmg::analysis::{payoff_string, verify_finite_state_ne, Thresholds};
use ssmg::profile::Profile;
use ssmg::rational::{int, ratio};
use ssmg::reductions::{example_game, example_profile};
use ssmg::solvers::{solve_posne, DEFAULT_POSNE_CAP};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let ig = example_game("prop1")?;
    let Profile::FiniteState(fsp) = example_profile("prop1", &ig)? else {
        unreachable!()
    };
    let v = verify_finite_state_ne(&ig, &fsp, &Thresholds::player0_wins(3))?;
    println!("automaton profile: payoff ({}), accepted {}", payoff_string(&v.payoff), v.accepted());

    let t = Thresholds::new(3, vec![ratio(1, 100), int(0), int(0)], vec![int(1); 3])?;
    println!("positional search, player 0 at least 1/100: {:?}", solve_posne(&ig, &t, DEFAULT_POSNE_CAP)?);
    Ok(())
}
