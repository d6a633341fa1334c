//! Builds a small game with a vector payoff, round-trips it through JSON and
//! prints the validation result.

use ssmg::format::{game_to_json, parse_game};
use ssmg::game::{validate, GameBuilder, InitializedGame};
use ssmg::rational::ratio;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut b = GameBuilder::new(&["alice", "bob"]);
    let start = b.owned("start", 0);
    let coin = b.stochastic("coin");
    let split = b.payoff_terminal("split", vec![ratio(1, 3), ratio(2, 3)]);
    let alice = b.winning_terminal("alice-wins", &[0]);
    let nobody = b.terminal("nobody");
    b.edge(start, coin).edge(start, split);
    b.prob_edge(coin, alice, ratio(1, 2)).prob_edge(coin, nobody, ratio(1, 2));

    let ig = InitializedGame::new(b.build().desugar()?, start)?;
    let text = game_to_json(&ig);
    let back = parse_game(&text)?;
    println!("{} vertices after desugaring, {} violations", back.num_vertices(), validate(&back).len());
    for v in back.vertices().filter(|&v| back.name(v).starts_with("split")) {
        println!("  {}", back.name(v));
    }
    Ok(())
}
