use super::ReductionError;
use crate::game::{GameBuilder, InitializedGame, VertexId};
use crate::profile::PositionalProfile;
use crate::rational::{pow2_inv, ratio, Rational};
use std::collections::BTreeMap;

/// A formula in conjunctive normal form over variables `1..=num_vars`.
/// Literals are signed variable indices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CnfFormula {
    num_vars: usize,
    clauses: Vec<Vec<i64>>,
}

impl CnfFormula {
    /// Duplicate literals inside a clause are merged.
    pub fn new(num_vars: usize, clauses: Vec<Vec<i64>>) -> Result<Self, ReductionError> {
        if clauses.is_empty() {
            return Err(ReductionError::Formula("no clauses".into()));
        }
        let mut out = Vec::with_capacity(clauses.len());
        for (j, c) in clauses.into_iter().enumerate() {
            if c.is_empty() {
                return Err(ReductionError::Formula(format!("clause {} is empty", j + 1)));
            }
            let mut lits: Vec<i64> = Vec::with_capacity(c.len());
            for l in c {
                if l == 0 || l.unsigned_abs() as usize > num_vars {
                    return Err(ReductionError::Formula(format!(
                        "literal {l} in clause {} is not over variables 1..={num_vars}",
                        j + 1
                    )));
                }
                if !lits.contains(&l) {
                    lits.push(l);
                }
            }
            out.push(lits);
        }
        Ok(CnfFormula {
            num_vars,
            clauses: out,
        })
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn clauses(&self) -> &[Vec<i64>] {
        &self.clauses
    }

    /// `assignment[k]` is the value of variable `k + 1`.
    pub fn satisfied_by(&self, assignment: &[bool]) -> bool {
        self.first_unsatisfied(assignment).is_none()
    }

    fn first_unsatisfied(&self, assignment: &[bool]) -> Option<usize> {
        self.clauses
            .iter()
            .position(|c| !c.iter().any(|&l| literal_value(l, assignment)))
    }
}

fn literal_value(l: i64, assignment: &[bool]) -> bool {
    let x = assignment[l.unsigned_abs() as usize - 1];
    if l > 0 {
        x
    } else {
        !x
    }
}

/// `X3` for the literal `3`, `notX3` for `-3`.
pub fn literal_name(l: i64) -> String {
    if l > 0 {
        format!("X{l}")
    } else {
        format!("notX{}", -l)
    }
}

/// Reads DIMACS CNF: `c` comment lines, one `p cnf <vars> <clauses>` header,
/// then zero-terminated clauses that may span lines.
pub fn parse_dimacs(text: &str) -> Result<CnfFormula, ReductionError> {
    let mut header: Option<(usize, usize)> = None;
    let mut clauses = Vec::new();
    let mut current: Vec<i64> = Vec::new();
    for (k, line) in text.lines().enumerate() {
        let line_no = k + 1;
        let err = |message: String| ReductionError::Parse {
            line: line_no,
            message,
        };
        let line = line.trim();
        if line.is_empty() || line.starts_with('c') {
            continue;
        }
        if line.starts_with('%') {
            break;
        }
        if let Some(rest) = line.strip_prefix('p') {
            let parts: Vec<&str> = rest.split_whitespace().collect();
            if header.is_some() {
                return Err(err("second problem line".into()));
            }
            match parts.as_slice() {
                ["cnf", n, m] => {
                    let n = n.parse().map_err(|_| err(format!("bad variable count `{n}`")))?;
                    let m = m.parse().map_err(|_| err(format!("bad clause count `{m}`")))?;
                    header = Some((n, m));
                }
                _ => return Err(err("expected `p cnf <variables> <clauses>`".into())),
            }
            continue;
        }
        if header.is_none() {
            return Err(err("clause before the problem line".into()));
        }
        for tok in line.split_whitespace() {
            let l: i64 = tok.parse().map_err(|_| err(format!("bad literal `{tok}`")))?;
            if l == 0 {
                clauses.push(std::mem::take(&mut current));
            } else {
                current.push(l);
            }
        }
    }
    let (n, m) = header.ok_or(ReductionError::Parse {
        line: 0,
        message: "missing problem line".into(),
    })?;
    if !current.is_empty() {
        clauses.push(current);
    }
    if clauses.len() != m {
        return Err(ReductionError::Parse {
            line: 0,
            message: format!("header announces {m} clauses, found {}", clauses.len()),
        });
    }
    CnfFormula::new(n, clauses)
}

/// The two-player game whose positional (and stationary) equilibria with
/// payoff `(1, 1/2)` correspond to satisfying assignments.
pub fn gen_sat_game(f: &CnfFormula) -> Result<InitializedGame, ReductionError> {
    let n = f.num_vars;
    let m = f.clauses.len();
    let mut b = GameBuilder::new(&["0", "1"]);
    let v0 = b.stochastic("v0");
    let phi = b.stochastic("phi");
    let out = b.winning_terminal("v0.exit", &[0]);
    let phi_win = b.winning_terminal("phi.exit", &[0, 1]);
    let clause_vs: Vec<VertexId> = (1..=m).map(|j| b.owned(format!("C{j}"), 1)).collect();

    let mut gadgets: BTreeMap<i64, VertexId> = BTreeMap::new();
    for x in 1..=n as i64 {
        for l in [x, -x] {
            let name = literal_name(l);
            let entry = b.owned(name.clone(), 0);
            let top = b.owned(format!("{name}.top"), 1);
            let good = b.stochastic(format!("{name}.good"));
            let bot = b.stochastic(format!("{name}.bot"));
            let leave = b.winning_terminal(format!("{name}.leave"), &[1]);
            let win = b.winning_terminal(format!("{name}.win"), &[0, 1]);
            let lose = b.winning_terminal(format!("{name}.lose"), &[0]);
            b.edge(entry, top).edge(entry, bot);
            b.edge(top, good).edge(top, leave);
            b.prob_edge(good, entry, ratio(1, 2)).prob_edge(good, win, ratio(1, 2));
            b.prob_edge(bot, entry, ratio(1, 2)).prob_edge(bot, lose, ratio(1, 2));
            gadgets.insert(l, entry);
        }
    }

    let edge_prob = pow2_inv(n as u32 + 1);
    b.prob_edge(v0, phi, edge_prob.clone()).prob_edge(v0, out, edge_prob);
    for x in 1..=n as i64 {
        let p = pow2_inv(x as u32 + 1);
        b.prob_edge(v0, gadgets[&x], p.clone());
        b.prob_edge(v0, gadgets[&-x], p);
    }
    let share = Rational::new(1.into(), (m as i64 + 1).into());
    for (j, c) in f.clauses.iter().enumerate() {
        b.prob_edge(phi, clause_vs[j], share.clone());
        let mut lits = c.clone();
        lits.sort_by_key(|l| gadgets[l]);
        for l in lits {
            b.edge(clause_vs[j], gadgets[&l]);
        }
    }
    b.prob_edge(phi, phi_win, share);
    Ok(InitializedGame::new(b.build().desugar()?, v0)?)
}

/// The equilibrium built from a satisfying assignment: player 0 heads for
/// the ⊤-vertex exactly at true literals, player 1 never leaves and sends
/// each clause to its lowest-index true literal.
pub fn sat_equilibrium_profile(
    ig: &InitializedGame,
    f: &CnfFormula,
    assignment: &[bool],
) -> Result<PositionalProfile, ReductionError> {
    if assignment.len() != f.num_vars {
        return Err(ReductionError::Formula(format!(
            "assignment has {} values for {} variables",
            assignment.len(),
            f.num_vars
        )));
    }
    if let Some(j) = f.first_unsatisfied(assignment) {
        return Err(ReductionError::NotSatisfying(j + 1));
    }
    let id = |name: &str| {
        ig.vertex_index(name)
            .ok_or_else(|| ReductionError::Formula(format!("game has no vertex `{name}`")))
    };
    let mut choices = BTreeMap::new();
    for x in 1..=f.num_vars as i64 {
        for l in [x, -x] {
            let name = literal_name(l);
            let entry = id(&name)?;
            let target = if literal_value(l, assignment) {
                id(&format!("{name}.top"))?
            } else {
                id(&format!("{name}.bot"))?
            };
            choices.insert(entry, target);
            choices.insert(id(&format!("{name}.top"))?, id(&format!("{name}.good"))?);
        }
    }
    for (j, c) in f.clauses.iter().enumerate() {
        let l = c
            .iter()
            .copied()
            .filter(|&l| literal_value(l, assignment))
            .min_by_key(|l| (l.unsigned_abs(), *l < 0))
            .unwrap();
        choices.insert(id(&format!("C{}", j + 1))?, id(&literal_name(l))?);
    }
    Ok(PositionalProfile::new(ig, &choices)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analysis::{stationary_payoff, verify_ne, Thresholds};
    use crate::game::validate;
    use crate::rational::int;

    fn names(ig: &InitializedGame, v: VertexId) -> Vec<String> {
        ig.successors(v).iter().map(|&w| ig.name(w).to_string()).collect()
    }

    #[test]
    fn single_variable_shape() {
        let f = CnfFormula::new(1, vec![vec![1]]).unwrap();
        let ig = gen_sat_game(&f).unwrap();
        assert!(validate(&ig).is_empty());
        let v0 = ig.initial();
        assert_eq!(ig.successors(v0).len(), 4);
        for &w in ig.successors(v0) {
            assert_eq!(ig.prob(v0, w), ratio(1, 4));
        }
        assert_eq!(ig.vertices().filter(|&v| ig.name(v).starts_with('C')).count(), 1);
    }

    #[test]
    fn clause_edges_follow_literals() {
        let f = CnfFormula::new(2, vec![vec![1, -2], vec![2]]).unwrap();
        let ig = gen_sat_game(&f).unwrap();
        assert_eq!(names(&ig, ig.vertex_index("C1").unwrap()), vec!["X1", "notX2"]);
        assert_eq!(names(&ig, ig.vertex_index("C2").unwrap()), vec!["X2"]);
    }

    #[test]
    fn satisfying_profile_is_an_equilibrium() {
        let t = Thresholds::new(2, vec![int(1), ratio(1, 2)], vec![int(1), ratio(1, 2)]).unwrap();
        for (f, a) in [
            (CnfFormula::new(1, vec![vec![1]]).unwrap(), vec![true]),
            (CnfFormula::new(2, vec![vec![1, 2], vec![1, -2]]).unwrap(), vec![true, false]),
        ] {
            let ig = gen_sat_game(&f).unwrap();
            let sp = sat_equilibrium_profile(&ig, &f, &a).unwrap().to_stationary();
            assert_eq!(stationary_payoff(&ig, &sp).unwrap(), vec![int(1), ratio(1, 2)]);
            assert!(verify_ne(&ig, &sp, &t).unwrap().accepted());
        }
    }

    #[test]
    fn rejects_bad_input() {
        let f = CnfFormula::new(1, vec![vec![1]]).unwrap();
        let ig = gen_sat_game(&f).unwrap();
        assert_eq!(
            sat_equilibrium_profile(&ig, &f, &[false]),
            Err(ReductionError::NotSatisfying(1))
        );
        assert!(CnfFormula::new(1, vec![]).is_err());
        assert!(CnfFormula::new(1, vec![vec![2]]).is_err());
    }

    #[test]
    fn dimacs_round() {
        let f = parse_dimacs("c demo\np cnf 3 2\n1 -3 0\n2\n3 0\n").unwrap();
        assert_eq!(f.clauses(), &[vec![1, -3], vec![2, 3]]);
        assert!(parse_dimacs("p cnf 1 2\n1 0\n").is_err());
        assert!(parse_dimacs("1 0\n").is_err());
    }
}
