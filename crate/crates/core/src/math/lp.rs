use super::MathError;
use crate::rational::Rational;
use num_traits::{Signed, Zero};
use std::collections::BTreeSet;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    Le,
    Eq,
    Ge,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Constraint {
    pub coeffs: Vec<Rational>,
    pub relation: Relation,
    pub bound: Rational,
}

impl Constraint {
    pub fn new(coeffs: Vec<Rational>, relation: Relation, bound: Rational) -> Self {
        Constraint {
            coeffs,
            relation,
            bound,
        }
    }

    pub fn is_satisfied_by(&self, x: &[Rational]) -> bool {
        let lhs: Rational = self
            .coeffs
            .iter()
            .zip(x)
            .filter(|(a, _)| !a.is_zero())
            .map(|(a, v)| a * v)
            .sum();
        match self.relation {
            Relation::Le => lhs <= self.bound,
            Relation::Eq => lhs == self.bound,
            Relation::Ge => lhs >= self.bound,
        }
    }
}

/// Minimise `objective · x` subject to `constraints`; variables listed in
/// `nonneg` are bounded below by 0, all others are free.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LinearProgram {
    pub objective: Vec<Rational>,
    pub constraints: Vec<Constraint>,
    pub nonneg: BTreeSet<usize>,
}

impl LinearProgram {
    pub fn new(num_vars: usize) -> Self {
        LinearProgram {
            objective: vec![Rational::zero(); num_vars],
            constraints: Vec::new(),
            nonneg: BTreeSet::new(),
        }
    }

    pub fn num_vars(&self) -> usize {
        self.objective.len()
    }

    pub fn all_nonneg(mut self) -> Self {
        self.nonneg = (0..self.num_vars()).collect();
        self
    }

    pub fn add(&mut self, coeffs: Vec<Rational>, relation: Relation, bound: Rational) {
        self.constraints.push(Constraint::new(coeffs, relation, bound));
    }

    /// Adds a constraint given as sparse `(variable, coefficient)` terms.
    pub fn add_sparse(&mut self, terms: &[(usize, Rational)], relation: Relation, bound: Rational) {
        let mut coeffs = vec![Rational::zero(); self.num_vars()];
        for (j, a) in terms {
            coeffs[*j] += a;
        }
        self.add(coeffs, relation, bound);
    }

    /// True when `x` satisfies every constraint and sign restriction exactly.
    pub fn is_feasible(&self, x: &[Rational]) -> bool {
        x.len() == self.num_vars()
            && self.nonneg.iter().all(|&j| !x[j].is_negative())
            && self.constraints.iter().all(|c| c.is_satisfied_by(x))
    }

    fn check_dimensions(&self) -> Result<(), MathError> {
        let n = self.num_vars();
        if let Some(k) = self.constraints.iter().position(|c| c.coeffs.len() != n) {
            return Err(MathError::Dimension(format!(
                "constraint {k} has {} coefficients, expected {n}",
                self.constraints[k].coeffs.len()
            )));
        }
        if let Some(&j) = self.nonneg.iter().find(|&&j| j >= n) {
            return Err(MathError::Dimension(format!("nonneg index {j} out of range")));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LpOutcome {
    Optimal { point: Vec<Rational>, value: Rational },
    Infeasible,
    Unbounded,
}

impl LpOutcome {
    pub fn optimal(self) -> Option<(Vec<Rational>, Rational)> {
        match self {
            LpOutcome::Optimal { point, value } => Some((point, value)),
            _ => None,
        }
    }
}

struct Tableau {
    rows: Vec<Vec<Rational>>,
    rhs: Vec<Rational>,
    basis: Vec<usize>,
    /// reduced costs of the current phase
    cost: Vec<Rational>,
    forbidden: Vec<bool>,
}

enum Step {
    Optimal,
    Unbounded,
    Pivoted,
}

impl Tableau {
    fn pivot(&mut self, r: usize, c: usize) {
        let inv = self.rows[r][c].recip();
        for x in self.rows[r].iter_mut() {
            if !x.is_zero() {
                *x *= &inv;
            }
        }
        self.rhs[r] *= &inv;
        let prow = self.rows[r].clone();
        let prhs = self.rhs[r].clone();
        let nz: Vec<usize> = (0..prow.len()).filter(|&j| !prow[j].is_zero()).collect();
        for k in 0..self.rows.len() {
            if k == r || self.rows[k][c].is_zero() {
                continue;
            }
            let f = self.rows[k][c].clone();
            for &j in &nz {
                let d = &f * &prow[j];
                self.rows[k][j] -= d;
            }
            let d = &f * &prhs;
            self.rhs[k] -= d;
        }
        if !self.cost[c].is_zero() {
            let f = self.cost[c].clone();
            for &j in &nz {
                let d = &f * &prow[j];
                self.cost[j] -= d;
            }
        }
        self.basis[r] = c;
    }

    /// One iteration of Bland's rule: lowest-index entering column, ties in
    /// the ratio test broken by lowest basic index.
    fn step(&mut self) -> Step {
        let entering = (0..self.cost.len()).find(|&j| !self.forbidden[j] && self.cost[j].is_negative());
        let Some(c) = entering else {
            return Step::Optimal;
        };
        let mut best: Option<(usize, Rational)> = None;
        for r in 0..self.rows.len() {
            let a = &self.rows[r][c];
            if a.is_positive() {
                let ratio = &self.rhs[r] / a;
                let better = match &best {
                    None => true,
                    Some((br, bv)) => ratio < *bv || (ratio == *bv && self.basis[r] < self.basis[*br]),
                };
                if better {
                    best = Some((r, ratio));
                }
            }
        }
        match best {
            None => Step::Unbounded,
            Some((r, _)) => {
                self.pivot(r, c);
                Step::Pivoted
            }
        }
    }

    fn run(&mut self) -> Step {
        loop {
            match self.step() {
                Step::Pivoted => continue,
                other => return other,
            }
        }
    }

    fn set_costs(&mut self, costs: &[Rational]) {
        let mut d = costs.to_vec();
        for (r, &b) in self.basis.iter().enumerate() {
            let cb = &costs[b];
            if cb.is_zero() {
                continue;
            }
            for (j, a) in self.rows[r].iter().enumerate() {
                if !a.is_zero() {
                    d[j] -= cb * a;
                }
            }
        }
        self.cost = d;
    }
}

/// Two-phase primal simplex over the rationals with Bland's anti-cycling rule.
pub fn lp_min(lp: &LinearProgram) -> Result<LpOutcome, MathError> {
    lp.check_dimensions()?;
    let n = lp.num_vars();
    // column layout: one column per nonneg variable, two per free variable
    let mut col_of: Vec<(usize, Option<usize>)> = Vec::with_capacity(n);
    let mut ncols = 0;
    for j in 0..n {
        if lp.nonneg.contains(&j) {
            col_of.push((ncols, None));
            ncols += 1;
        } else {
            col_of.push((ncols, Some(ncols + 1)));
            ncols += 2;
        }
    }
    let structural = ncols;
    let m = lp.constraints.len();
    let slack_count = lp
        .constraints
        .iter()
        .filter(|c| c.relation != Relation::Eq)
        .count();
    let first_art = structural + slack_count;
    let art_count = lp
        .constraints
        .iter()
        .filter(|c| {
            let flip = c.bound.is_negative();
            let rel = effective_relation(c.relation, flip);
            rel != Relation::Le
        })
        .count();
    let total = first_art + art_count;

    let mut rows = vec![vec![Rational::zero(); total]; m];
    let mut rhs = vec![Rational::zero(); m];
    let mut basis = vec![0; m];
    let mut next_slack = structural;
    let mut next_art = first_art;
    for (r, c) in lp.constraints.iter().enumerate() {
        let flip = c.bound.is_negative();
        let sign = if flip { -Rational::from_integer(1.into()) } else { Rational::from_integer(1.into()) };
        for (j, a) in c.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            let v = &sign * a;
            let (p, q) = col_of[j];
            if let Some(q) = q {
                rows[r][q] = -v.clone();
            }
            rows[r][p] = v;
        }
        rhs[r] = &sign * &c.bound;
        let rel = effective_relation(c.relation, flip);
        if c.relation != Relation::Eq {
            rows[r][next_slack] = match rel {
                Relation::Le => Rational::from_integer(1.into()),
                _ => Rational::from_integer((-1).into()),
            };
            if rel == Relation::Le {
                basis[r] = next_slack;
            }
            next_slack += 1;
        }
        if rel != Relation::Le {
            rows[r][next_art] = Rational::from_integer(1.into());
            basis[r] = next_art;
            next_art += 1;
        }
    }

    let mut t = Tableau {
        rows,
        rhs,
        basis,
        cost: Vec::new(),
        forbidden: vec![false; total],
    };

    if art_count > 0 {
        let mut c1 = vec![Rational::zero(); total];
        for x in c1[first_art..].iter_mut() {
            *x = Rational::from_integer(1.into());
        }
        t.set_costs(&c1);
        if let Step::Unbounded = t.run() {
            unreachable!("phase one objective is bounded below by zero");
        }
        let infeasibility: Rational = t
            .basis
            .iter()
            .zip(&t.rhs)
            .filter(|(b, _)| **b >= first_art)
            .map(|(_, v)| v.clone())
            .sum();
        if infeasibility.is_positive() {
            return Ok(LpOutcome::Infeasible);
        }
        // drive zero-level artificials out of the basis; drop redundant rows
        let mut r = 0;
        while r < t.rows.len() {
            if t.basis[r] >= first_art {
                if let Some(c) = (0..first_art).find(|&j| !t.rows[r][j].is_zero()) {
                    t.pivot(r, c);
                    r += 1;
                } else {
                    t.rows.remove(r);
                    t.rhs.remove(r);
                    t.basis.remove(r);
                }
            } else {
                r += 1;
            }
        }
        for f in t.forbidden[first_art..].iter_mut() {
            *f = true;
        }
    }

    let mut c2 = vec![Rational::zero(); total];
    for (j, a) in lp.objective.iter().enumerate() {
        let (p, q) = col_of[j];
        c2[p] = a.clone();
        if let Some(q) = q {
            c2[q] = -a.clone();
        }
    }
    t.set_costs(&c2);
    if let Step::Unbounded = t.run() {
        return Ok(LpOutcome::Unbounded);
    }

    let mut col_val = vec![Rational::zero(); total];
    for (r, &b) in t.basis.iter().enumerate() {
        col_val[b] = t.rhs[r].clone();
    }
    let point: Vec<Rational> = col_of
        .iter()
        .map(|&(p, q)| match q {
            None => col_val[p].clone(),
            Some(q) => &col_val[p] - &col_val[q],
        })
        .collect();
    let value = lp
        .objective
        .iter()
        .zip(&point)
        .filter(|(a, _)| !a.is_zero())
        .map(|(a, x)| a * x)
        .sum();
    Ok(LpOutcome::Optimal { point, value })
}

fn effective_relation(rel: Relation, flip: bool) -> Relation {
    match (rel, flip) {
        (Relation::Le, true) => Relation::Ge,
        (Relation::Ge, true) => Relation::Le,
        (r, _) => r,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, ratio};

    #[test]
    fn minimise_single_bounded_variable() {
        let mut lp = LinearProgram::new(1);
        lp.objective = vec![int(1)];
        lp.add(vec![int(1)], Relation::Ge, int(3));
        let (x, v) = lp_min(&lp).unwrap().optimal().unwrap();
        assert_eq!(x, vec![int(3)]);
        assert_eq!(v, int(3));
    }

    #[test]
    fn contradictory_bounds_are_infeasible() {
        let mut lp = LinearProgram::new(1).all_nonneg();
        lp.objective = vec![int(1)];
        lp.add(vec![int(1)], Relation::Le, int(-1));
        assert_eq!(lp_min(&lp).unwrap(), LpOutcome::Infeasible);
    }

    #[test]
    fn free_variable_without_lower_bound_is_unbounded() {
        let mut lp = LinearProgram::new(1);
        lp.objective = vec![int(1)];
        lp.add(vec![int(1)], Relation::Le, int(5));
        assert_eq!(lp_min(&lp).unwrap(), LpOutcome::Unbounded);
    }

    #[test]
    fn three_vertex_chain_reachability() {
        // v0 -(1/2)-> win, v0 -(1/2)-> sink. Variables z_v0, z_win, z_sink.
        // Oracle: the only path into F_0 is v0 -> win, probability 1/2.
        let oracle = ratio(1, 2) * int(1);
        let mut lp = LinearProgram::new(3).all_nonneg();
        lp.objective = vec![int(1), int(1), int(1)];
        lp.add_sparse(&[(1, int(1))], Relation::Eq, int(1));
        lp.add_sparse(&[(0, int(1)), (1, ratio(-1, 2)), (2, ratio(-1, 2))], Relation::Eq, int(0));
        lp.add_sparse(&[(2, int(1)), (2, int(-1))], Relation::Eq, int(0));
        let (x, _) = lp_min(&lp).unwrap().optimal().unwrap();
        assert_eq!(x[0], oracle);
        assert_eq!(x[2], int(0));
        assert!(lp.is_feasible(&x));
    }

    #[test]
    fn redundant_equalities_are_dropped() {
        let mut lp = LinearProgram::new(2).all_nonneg();
        lp.objective = vec![int(1), int(2)];
        lp.add(vec![int(1), int(1)], Relation::Eq, int(4));
        lp.add(vec![int(2), int(2)], Relation::Eq, int(8));
        let (x, v) = lp_min(&lp).unwrap().optimal().unwrap();
        assert_eq!(x, vec![int(4), int(0)]);
        assert_eq!(v, int(4));
    }

    #[test]
    fn degenerate_cycling_example_terminates() {
        // Beale's example, cycles under the textbook largest-coefficient rule.
        let mut lp = LinearProgram::new(4).all_nonneg();
        lp.objective = vec![ratio(-3, 4), int(150), ratio(-1, 50), int(6)];
        lp.add(vec![ratio(1, 4), int(-60), ratio(-1, 25), int(9)], Relation::Le, int(0));
        lp.add(vec![ratio(1, 2), int(-90), ratio(-1, 50), int(3)], Relation::Le, int(0));
        lp.add(vec![int(0), int(0), int(1), int(0)], Relation::Le, int(1));
        let (x, v) = lp_min(&lp).unwrap().optimal().unwrap();
        assert_eq!(v, ratio(-1, 20));
        assert!(lp.is_feasible(&x));
    }

    #[test]
    fn dimension_errors() {
        let mut lp = LinearProgram::new(2);
        lp.add(vec![int(1)], Relation::Le, int(1));
        assert!(matches!(lp_min(&lp), Err(MathError::Dimension(_))));
    }
}
