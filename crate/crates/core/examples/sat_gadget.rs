//! Turns a CNF formula into a two-player game and searches it for a
//! positional equilibrium paying (1, 1/2).

use ssmg::analysis::{payoff_string, Thresholds};
use ssmg::rational::{int, ratio};
use ssmg::reductions::{gen_sat_game, parse_dimacs, sat_equilibrium_profile};
use ssmg::solvers::{solve_posne, PosNeOutcome, DEFAULT_POSNE_CAP};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let t = Thresholds::new(2, vec![int(1), ratio(1, 2)], vec![int(1), ratio(1, 2)])?;
    for text in ["p cnf 2 2\n1 -2 0\n2 0\n", "p cnf 1 2\n1 0\n-1 0\n"] {
        let f = parse_dimacs(text)?;
        let ig = gen_sat_game(&f)?;
        print!("{:?}: {} vertices, ", f.clauses(), ig.num_vertices());
        match solve_posne(&ig, &t, DEFAULT_POSNE_CAP)? {
            PosNeOutcome::Found { payoff, .. } => println!("equilibrium with payoff ({})", payoff_string(&payoff)),
            other => println!("{other:?}"),
        }
    }
    let f = parse_dimacs("p cnf 2 2\n1 -2 0\n2 0\n")?;
    let ig = gen_sat_game(&f)?;
    let p = sat_equilibrium_profile(&ig, &f, &[true, true])?;
    println!("assignment profile chooses {} edges", p.choices().len());
    Ok(())
}
