//! Square-root-sum instances: the certified comparison and the closed-form
//! gadget maxima behind it.

use ssmg::rational::format_rational;
use ssmg::reductions::{gen_sqrtsum_game, gp_max_payoff, sqrtsum_threshold_check, SqrtSumInstance};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    for (d, k) in [(vec![1, 1], 2), (vec![2, 2], 3), (vec![2, 3], 3), (vec![7, 11, 13], 10)] {
        let inst = SqrtSumInstance::new(d.clone(), k)?;
        let c = sqrtsum_threshold_check(&inst);
        println!(
            "{d:?} vs {k}: {} (lhs ~ {:.12}, rhs {}, {} bits)",
            if c.yes { "yes" } else { "no" },
            c.lhs.midpoint_f64(),
            format_rational(&c.rhs),
            c.bits
        );
        for p in inst.continuation_probabilities() {
            let g = gp_max_payoff(&p, 48)?;
            println!("  p = {}: max payoff ~ {:.12}", format_rational(&p), g.value.midpoint_f64());
        }
        println!("  game has {} vertices", gen_sqrtsum_game(&inst)?.num_vertices());
    }
    Ok(())
}
