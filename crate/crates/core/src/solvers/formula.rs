use super::support::{reach_sets, Support};
use crate::analysis::Thresholds;
use crate::game::{InitializedGame, VertexId};
use crate::rational::Rational;
use num_traits::{One, Signed, Zero};
use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum FormulaError {
    #[error("invalid support: {0}")]
    InvalidSupport(String),
    #[error("variable `{0}` has no value")]
    Unassigned(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Term {
    Var(String),
    Const(Rational),
    Sum(Vec<Term>),
    Product(Box<Term>, Box<Term>),
}

impl Term {
    fn var(name: &str) -> Term {
        Term::Var(name.to_string())
    }

    fn eval(&self, env: &BTreeMap<String, Rational>) -> Result<Rational, FormulaError> {
        Ok(match self {
            Term::Var(x) => env.get(x).cloned().ok_or_else(|| FormulaError::Unassigned(x.clone()))?,
            Term::Const(q) => q.clone(),
            Term::Sum(ts) => {
                let mut acc = Rational::zero();
                for t in ts {
                    acc += t.eval(env)?;
                }
                acc
            }
            Term::Product(a, b) => a.eval(env)? * b.eval(env)?,
        })
    }

    fn vars<'a>(&'a self, out: &mut Vec<&'a str>) {
        match self {
            Term::Var(x) => out.push(x),
            Term::Const(_) => {}
            Term::Sum(ts) => ts.iter().for_each(|t| t.vars(out)),
            Term::Product(a, b) => {
                a.vars(out);
                b.vars(out);
            }
        }
    }

    fn smt(&self, out: &mut String) {
        match self {
            Term::Var(x) => out.push_str(x),
            Term::Const(q) => out.push_str(&smt_rational(q)),
            Term::Sum(ts) => match ts.as_slice() {
                [] => out.push('0'),
                [t] => t.smt(out),
                _ => {
                    out.push_str("(+");
                    for t in ts {
                        out.push(' ');
                        t.smt(out);
                    }
                    out.push(')');
                }
            },
            Term::Product(a, b) => {
                out.push_str("(* ");
                a.smt(out);
                out.push(' ');
                b.smt(out);
                out.push(')');
            }
        }
    }
}

fn smt_rational(q: &Rational) -> String {
    let abs = q.abs();
    let body = if abs.denom().is_one() {
        abs.numer().to_string()
    } else {
        format!("(/ {} {})", abs.numer(), abs.denom())
    };
    if q.is_negative() {
        format!("(- {body})")
    } else {
        body
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Comparison {
    Le,
    Lt,
    Eq,
    Ge,
    Gt,
}

impl Comparison {
    fn symbol(self) -> &'static str {
        match self {
            Comparison::Le => "<=",
            Comparison::Lt => "<",
            Comparison::Eq => "=",
            Comparison::Ge => ">=",
            Comparison::Gt => ">",
        }
    }

    fn holds(self, a: &Rational, b: &Rational) -> bool {
        match self {
            Comparison::Le => a <= b,
            Comparison::Lt => a < b,
            Comparison::Eq => a == b,
            Comparison::Ge => a >= b,
            Comparison::Gt => a > b,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Atom {
    pub lhs: Term,
    pub cmp: Comparison,
    pub rhs: Term,
}

/// A named group of conjuncts.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Part {
    pub label: String,
    pub atoms: Vec<Atom>,
}

/// An existentially closed conjunction of polynomial (in)equalities over
/// the reals.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RealFormula {
    pub declarations: Vec<String>,
    pub parts: Vec<Part>,
}

impl RealFormula {
    pub fn atoms(&self) -> impl Iterator<Item = &Atom> {
        self.parts.iter().flat_map(|p| p.atoms.iter())
    }

    pub fn part(&self, label: &str) -> Option<&Part> {
        self.parts.iter().find(|p| p.label == label)
    }

    /// Every variable is declared once and every occurring variable is declared.
    pub fn is_well_formed(&self) -> bool {
        let declared: BTreeSet<&str> = self.declarations.iter().map(String::as_str).collect();
        if declared.len() != self.declarations.len() {
            return false;
        }
        let mut used = Vec::new();
        for a in self.atoms() {
            a.lhs.vars(&mut used);
            a.rhs.vars(&mut used);
        }
        used.iter().all(|x| declared.contains(x))
    }

    /// Evaluates the conjunction of the atoms in the given parts (all parts
    /// when `only` is empty).
    pub fn eval_parts(&self, env: &BTreeMap<String, Rational>, only: &[&str]) -> Result<bool, FormulaError> {
        for p in &self.parts {
            if !only.is_empty() && !only.contains(&p.label.as_str()) {
                continue;
            }
            for a in &p.atoms {
                if !a.cmp.holds(&a.lhs.eval(env)?, &a.rhs.eval(env)?) {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }

    pub fn eval(&self, env: &BTreeMap<String, Rational>) -> Result<bool, FormulaError> {
        self.eval_parts(env, &[])
    }

    /// SMT-LIB 2 text in the QF_NRA logic.
    pub fn to_smtlib(&self) -> String {
        let mut out = String::new();
        out.push_str("(set-option :produce-models true)\n(set-logic QF_NRA)\n");
        for x in &self.declarations {
            writeln!(out, "(declare-fun {x} () Real)").unwrap();
        }
        for p in &self.parts {
            writeln!(out, "; {}", p.label).unwrap();
            for a in &p.atoms {
                out.push_str("(assert (");
                out.push_str(a.cmp.symbol());
                out.push(' ');
                a.lhs.smt(&mut out);
                out.push(' ');
                a.rhs.smt(&mut out);
                out.push_str("))\n");
            }
        }
        out.push_str("(check-sat)\n(get-model)\n");
        out
    }
}

pub(crate) fn alpha(v: VertexId, w: VertexId) -> String {
    format!("alpha_{v}_{w}")
}

pub(crate) fn rvar(i: usize, v: VertexId) -> String {
    format!("r_{i}_{v}")
}

pub(crate) fn zvar(i: usize, v: VertexId) -> String {
    format!("z_{i}_{v}")
}

fn atom(lhs: Term, cmp: Comparison, rhs: Term) -> Atom {
    Atom { lhs, cmp, rhs }
}

fn konst(q: Rational) -> Term {
    Term::Const(q)
}

/// The sentence whose satisfiability is equivalent to the existence of a
/// stationary equilibrium with support `s` and payoff within `t`.
///
/// Probability variables exist only for game edges; the remaining pairs
/// would be pinned to 0 and are left out.
pub fn build_statne_formula(ig: &InitializedGame, t: &Thresholds, s: &Support) -> Result<RealFormula, FormulaError> {
    s.check(ig).map_err(FormulaError::InvalidSupport)?;
    let game = &**ig;
    let reach = reach_sets(game, s);
    let np = game.num_players();
    let v0 = ig.initial();
    let edge_sum = |v: VertexId, var: &dyn Fn(VertexId) -> String| {
        Term::Sum(
            game.successors(v)
                .iter()
                .map(|&w| Term::Product(Box::new(Term::var(&alpha(v, w))), Box::new(Term::var(&var(w)))))
                .collect(),
        )
    };

    let mut declarations = Vec::new();
    for v in game.vertices() {
        for &w in game.successors(v) {
            declarations.push(alpha(v, w));
        }
    }
    for i in 0..np {
        declarations.extend(game.vertices().map(|v| rvar(i, v)));
    }
    for i in 0..np {
        declarations.extend(game.vertices().map(|v| zvar(i, v)));
    }

    let mut phi = Vec::new();
    for v in game.vertices() {
        if game.owner(v).is_some() {
            for &w in game.successors(v) {
                phi.push(atom(Term::var(&alpha(v, w)), Comparison::Ge, konst(Rational::zero())));
            }
            let sum = Term::Sum(game.successors(v).iter().map(|&w| Term::var(&alpha(v, w))).collect());
            phi.push(atom(sum, Comparison::Eq, konst(Rational::one())));
        } else {
            for &w in game.successors(v) {
                phi.push(atom(Term::var(&alpha(v, w)), Comparison::Eq, konst(game.prob(v, w))));
            }
        }
        for &w in game.successors(v) {
            let cmp = if s.contains(v, w) { Comparison::Gt } else { Comparison::Eq };
            phi.push(atom(Term::var(&alpha(v, w)), cmp, konst(Rational::zero())));
        }
    }
    let mut parts = vec![Part {
        label: "phi".into(),
        atoms: phi,
    }];

    for i in 0..np {
        let z = |v: VertexId| zvar(i, v);
        let r = |v: VertexId| rvar(i, v);
        let mut eta = Vec::new();
        for &v in game.win_set(i) {
            eta.push(atom(Term::var(&z(v)), Comparison::Eq, konst(Rational::one())));
        }
        for v in game.vertices().filter(|v| !reach[i].contains(v)) {
            eta.push(atom(Term::var(&z(v)), Comparison::Eq, konst(Rational::zero())));
        }
        for v in game.vertices().filter(|&v| !game.wins(i, v)) {
            eta.push(atom(Term::var(&z(v)), Comparison::Eq, edge_sum(v, &z)));
        }

        let mut theta = Vec::new();
        for v in game.vertices() {
            theta.push(atom(Term::var(&r(v)), Comparison::Ge, konst(Rational::zero())));
        }
        for &v in game.win_set(i) {
            theta.push(atom(Term::var(&r(v)), Comparison::Eq, konst(Rational::one())));
        }
        for v in game.vertices() {
            if game.owner(v) == Some(i) {
                for &w in game.successors(v) {
                    theta.push(atom(Term::var(&r(v)), Comparison::Ge, Term::var(&r(w))));
                }
            } else {
                theta.push(atom(Term::var(&r(v)), Comparison::Eq, edge_sum(v, &r)));
            }
        }

        let bounds = vec![
            atom(Term::var(&r(v0)), Comparison::Le, Term::var(&z(v0))),
            atom(konst(t.lower[i].clone()), Comparison::Le, Term::var(&z(v0))),
            atom(Term::var(&z(v0)), Comparison::Le, konst(t.upper[i].clone())),
        ];
        parts.push(Part {
            label: format!("eta {i}"),
            atoms: eta,
        });
        parts.push(Part {
            label: format!("theta {i}"),
            atoms: theta,
        });
        parts.push(Part {
            label: format!("bounds {i}"),
            atoms: bounds,
        });
    }
    Ok(RealFormula { declarations, parts })
}
