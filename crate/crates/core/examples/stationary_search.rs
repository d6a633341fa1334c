//! Support enumeration with an external real-arithmetic solver. Prints the
//! query for one support when no solver is installed.

use ssmg::analysis::Thresholds;
use ssmg::rational::format_rational;
use ssmg::reductions::example_game;
use ssmg::solvers::{build_statne_formula, enumerate_supports, solve_statne, SolverConfig, SolverError, StatNeOutcome};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let ig = example_game("prop2")?;
    let t = Thresholds::player0_wins(3);
    match solve_statne(&ig, &t, &SolverConfig::default(), 1000) {
        Ok(StatNeOutcome::Found(r)) => {
            println!("support #{}: {:?}", r.index, r.support.render(&ig));
            if let Some(p) = r.profile {
                for (w, q) in p.distribution(ig.vertex_index("v2").unwrap()) {
                    println!("  v2 -> {}: {}", ig.name(*w), format_rational(q));
                }
            }
            println!("witness: {:?}", r.witness);
        }
        Ok(other) => println!("{other:?}"),
        Err(SolverError::Unavailable(cmd)) => {
            println!("`{cmd}` not found; first query would be:");
            let s = enumerate_supports(&ig).next().expect("at least one support");
            print!("{}", build_statne_formula(&ig, &t, &s)?.to_smtlib());
        }
        Err(e) => return Err(e.into()),
    }
    Ok(())
}
