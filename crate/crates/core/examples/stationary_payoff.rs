//! Exact payoff, best responses and absorption probabilities of the mixed
//! profile in the three-player example where player 0 randomises.

use ssmg::analysis::{best_response_value, payoff_string, stationary_payoff, terminal_distribution, verify_ne, Thresholds};
use ssmg::profile::Profile;
use ssmg::rational::format_rational;
use ssmg::reductions::{example_game, example_profile};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let ig = example_game("prop2")?;
    let Profile::Stationary(sp) = example_profile("prop2", &ig)? else {
        unreachable!()
    };
    println!("payoff: ({})", payoff_string(&stationary_payoff(&ig, &sp)?));
    for i in 0..ig.num_players() {
        let br = best_response_value(&ig, &sp, i)?;
        println!("player {i} best response: {}", format_rational(&br[ig.initial()]));
    }
    for (t, mass) in terminal_distribution(&ig, &sp)?.terminals {
        println!("  ends in {:<10} with probability {}", ig.name(t), format_rational(&mass));
    }
    let verdict = verify_ne(&ig, &sp, &Thresholds::player0_wins(3))?;
    println!("equilibrium where player 0 wins: {}", verdict.accepted());
    Ok(())
}
