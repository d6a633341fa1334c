//! Counter-machine gadgets: the two-gadget winning probability, and the
//! truncated play of the intended profile.

use ssmg::rational::format_rational;
use ssmg::reductions::{bounded_payoff, counter_game, intended_2cm_profile, parse_2cm, segment_probability, Label};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    println!("inc1 segment probabilities (rows c, columns next c):");
    for c in 0..4 {
        let row: Vec<String> = (0..5)
            .map(|d| segment_probability(1, Label::Inc(1), c, d).map(|p| p.map_or("-".into(), |p| format_rational(&p))))
            .collect::<Result<_, _>>()?;
        println!("  {c}: {}", row.join("  "));
    }

    let m = parse_2cm("inc 1 2\ninc 1 3\ntest 1 5 4\ninc 2 3\nhalt\n")?;
    let cg = counter_game(&m, false)?;
    let ip = intended_2cm_profile(&cg, 12, 100)?;
    println!("configurations: {:?}", ip.loop_counts());
    println!("halted: {}", ip.halted);
    for h in [20, 60, 120] {
        let b = bounded_payoff(&cg.game, &ip.profile, h);
        println!("  depth {h:>3}: player 0 in [{}, {}]", format_rational(&b[0].lower), format_rational(&b[0].upper));
    }
    Ok(())
}
