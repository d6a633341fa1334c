use super::ReductionError;
use crate::game::{GameBuilder, InitializedGame, VertexId};
use crate::rational::{int, ratio, to_f64, Rational};
use num_bigint::{BigInt, BigUint, Sign};
use num_traits::{Signed, Zero};

/// An instance `Σ √d_i ≥ k` with `n > 0`, every `d_i > 0` and `k ≤ Σ d_i`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SqrtSumInstance {
    d: Vec<u64>,
    k: u64,
}

impl SqrtSumInstance {
    pub fn new(d: Vec<u64>, k: u64) -> Result<Self, ReductionError> {
        if d.is_empty() {
            return Err(ReductionError::Instance("no numbers".into()));
        }
        if d.contains(&0) {
            return Err(ReductionError::Instance("numbers must be positive".into()));
        }
        let total: u64 = d.iter().sum();
        if k > total {
            return Err(ReductionError::Instance(format!("k = {k} exceeds the sum {total}")));
        }
        Ok(SqrtSumInstance { d, k })
    }

    pub fn numbers(&self) -> &[u64] {
        &self.d
    }

    pub fn k(&self) -> u64 {
        self.k
    }

    pub fn total(&self) -> u64 {
        self.d.iter().sum()
    }

    /// `p_i = 1 − d_i / (2d²)` for each number.
    pub fn continuation_probabilities(&self) -> Vec<Rational> {
        let d = self.total() as i64;
        self.d
            .iter()
            .map(|&di| int(1) - ratio(di as i64, 2 * d * d))
            .collect()
    }
}

/// Reads `"d1 d2 … dn ; k"`.
pub fn parse_sqrtsum(text: &str) -> Result<SqrtSumInstance, ReductionError> {
    let err = |message: String| ReductionError::Parse { line: 1, message };
    let (left, right) = text
        .trim()
        .split_once(';')
        .ok_or_else(|| err("expected `d1 d2 … dn ; k`".into()))?;
    let d = left
        .split_whitespace()
        .map(|t| t.parse::<u64>().map_err(|_| err(format!("bad number `{t}`"))))
        .collect::<Result<Vec<_>, _>>()?;
    let k = right.trim();
    let k = k.parse::<u64>().map_err(|_| err(format!("bad bound `{k}`")))?;
    SqrtSumInstance::new(d, k)
}

/// A closed interval known to contain a real number.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RealBound {
    pub lower: Rational,
    pub upper: Rational,
}

impl RealBound {
    pub fn exact(q: Rational) -> Self {
        RealBound {
            lower: q.clone(),
            upper: q,
        }
    }

    pub fn is_exact(&self) -> bool {
        self.lower == self.upper
    }

    pub fn value(&self) -> Option<&Rational> {
        self.is_exact().then_some(&self.lower)
    }

    pub fn contains(&self, q: &Rational) -> bool {
        &self.lower <= q && q <= &self.upper
    }

    pub fn midpoint(&self) -> Rational {
        (&self.lower + &self.upper) / int(2)
    }

    pub fn radius(&self) -> Rational {
        (&self.upper - &self.lower) / int(2)
    }

    pub fn midpoint_f64(&self) -> f64 {
        to_f64(&self.midpoint())
    }

    pub fn radius_f64(&self) -> f64 {
        to_f64(&self.radius())
    }

    fn map_increasing(&self, f: impl Fn(&Rational) -> Rational) -> RealBound {
        RealBound {
            lower: f(&self.lower),
            upper: f(&self.upper),
        }
    }

    fn map_decreasing(&self, f: impl Fn(&Rational) -> Rational) -> RealBound {
        RealBound {
            lower: f(&self.upper),
            upper: f(&self.lower),
        }
    }
}

fn to_biguint(x: &BigInt) -> BigUint {
    x.to_biguint().expect("non-negative")
}

fn exact_sqrt(x: &BigUint) -> Option<BigUint> {
    let s = x.sqrt();
    (&s * &s == *x).then_some(s)
}

/// `√q` for `q ≥ 0`: exact when `q` is the square of a rational, otherwise
/// an interval of width `2^-bits / denom(q)`.
pub fn sqrt_bounds(q: &Rational, bits: u32) -> RealBound {
    assert!(!q.is_negative(), "square root of a negative number");
    let a = to_biguint(q.numer());
    let b = to_biguint(q.denom());
    if let (Some(sa), Some(sb)) = (exact_sqrt(&a), exact_sqrt(&b)) {
        return RealBound::exact(Rational::new(BigInt::from(sa), BigInt::from(sb)));
    }
    // √(a/b) = √(a·b) / b
    let scaled: BigUint = (&a * &b) << (2 * bits as usize);
    let s = scaled.sqrt();
    let den = BigInt::from(b) << bits as usize;
    RealBound {
        lower: Rational::new(BigInt::from_biguint(Sign::Plus, s.clone()), den.clone()),
        upper: Rational::new(BigInt::from_biguint(Sign::Plus, s + 1u32), den),
    }
}

/// The maximal payoff player 3 can get in a stationary equilibrium of the
/// gadget with continuation probability `p`, and the exit probability that
/// attains it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GpMaxPayoff {
    pub value: RealBound,
    pub x: RealBound,
}

/// `(√(2−2p) − p + 1)/(2p + 2)` with optimiser `(1 − √(2−2p))/p`, exact when
/// `2 − 2p` is a rational square and otherwise certified to about `bits`
/// binary digits.
pub fn gp_max_payoff(p: &Rational, bits: u32) -> Result<GpMaxPayoff, ReductionError> {
    if *p < ratio(1, 2) || *p >= int(1) {
        return Err(ReductionError::Domain(crate::rational::format_rational(p)));
    }
    let root = sqrt_bounds(&(int(2) - int(2) * p), bits);
    let value = root.map_increasing(|s| (s - p + int(1)) / (int(2) * p + int(2)));
    let x = root.map_decreasing(|s| (int(1) - s) / p);
    Ok(GpMaxPayoff { value, x })
}

/// Decision of `Σ √d_i ≥ k` through the equivalent payoff comparison
/// `Σ √d_i/(4dn) + 1/(8dn)` against `(2k+1)/(8dn)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SqrtSumCheck {
    pub lhs: RealBound,
    pub rhs: Rational,
    pub yes: bool,
    /// the two sides are equal
    pub tie: bool,
    /// binary digits used per root; zero when every root is an integer
    pub bits: u32,
}

pub fn sqrtsum_threshold_check(inst: &SqrtSumInstance) -> SqrtSumCheck {
    let d = inst.total() as i64;
    let n = inst.d.len() as i64;
    let k = Rational::from_integer(BigInt::from(inst.k));
    let scale = |s: &Rational| s / int(4 * d * n) + ratio(1, 8 * d * n);
    let rhs = (int(2) * &k + int(1)) / int(8 * d * n);

    let integer_roots: Option<Vec<BigUint>> = inst.d.iter().map(|&x| exact_sqrt(&BigUint::from(x))).collect();
    if let Some(roots) = integer_roots {
        let sum = Rational::from_integer(BigInt::from(roots.into_iter().fold(BigUint::zero(), |a, b| a + b)));
        return SqrtSumCheck {
            lhs: RealBound::exact(scale(&sum)),
            rhs,
            yes: sum >= k,
            tie: sum == k,
            bits: 0,
        };
    }
    // a sum of square roots with a non-square radicand is irrational, so it
    // differs from k and refinement terminates
    let mut bits = 16;
    loop {
        let mut lo = Rational::zero();
        let mut hi = Rational::zero();
        for &x in &inst.d {
            let r = sqrt_bounds(&Rational::from_integer(BigInt::from(x)), bits);
            lo += r.lower;
            hi += r.upper;
        }
        if lo > k || hi < k {
            return SqrtSumCheck {
                lhs: RealBound {
                    lower: scale(&lo),
                    upper: scale(&hi),
                },
                rhs,
                yes: lo > k,
                tie: false,
                bits,
            };
        }
        bits *= 2;
    }
}

/// The four-player game with a stationary equilibrium where player 0 wins
/// almost surely iff `Σ √d_i ≥ k`.
pub fn gen_sqrtsum_game(inst: &SqrtSumInstance) -> Result<InitializedGame, ReductionError> {
    let d = inst.total() as i64;
    let n = inst.d.len() as i64;
    let v = |a: Rational, b: Rational, c: Rational, e: Rational| vec![a, b, c, e];
    let mut b = GameBuilder::new(&["0", "1", "2", "3"]);
    let v0 = b.owned("v0", 3);
    let v1 = b.stochastic("v1");
    let exit = b.payoff_terminal("v0.exit", v(int(0), int(0), int(0), ratio(2 * inst.k as i64 + 1, 8 * d * n)));
    let base = b.winning_terminal("v1.exit", &[0]);
    b.edge(v0, v1).edge(v0, exit);
    b.prob_edge(v1, base, ratio(1, 4 * d * n));
    for (i, (&di, p)) in inst.d.iter().zip(inst.continuation_probabilities()).enumerate() {
        let s = gadget(&mut b, &format!("G{}", i + 1), &p);
        b.prob_edge(v1, s, ratio(4 * d * d - di as i64, 4 * d * d * n));
    }
    Ok(InitializedGame::new(b.build().desugar()?, v0)?)
}

/// One copy of the cycle gadget; returns its entry vertex.
fn gadget(b: &mut GameBuilder, prefix: &str, p: &Rational) -> VertexId {
    let q = int(1) - p;
    let half = ratio(1, 2);
    let (zero, one) = (int(0), int(1));
    let s = b.owned(format!("{prefix}.s"), 1);
    let q1 = b.stochastic(format!("{prefix}.q1"));
    let s1 = b.owned(format!("{prefix}.s1"), 0);
    let t = b.owned(format!("{prefix}.t"), 2);
    let q2 = b.stochastic(format!("{prefix}.q2"));
    let s2 = b.owned(format!("{prefix}.s2"), 0);
    let s_exit = b.payoff_terminal(format!("{prefix}.s.exit"), vec![one.clone(), half.clone(), zero.clone(), zero.clone()]);
    let q1_exit = b.payoff_terminal(format!("{prefix}.q1.exit"), vec![one.clone(), zero.clone(), zero.clone(), one.clone()]);
    let s1_exit = b.payoff_terminal(format!("{prefix}.s1.exit"), vec![one.clone(), one.clone(), zero.clone(), zero.clone()]);
    let t_exit = b.payoff_terminal(format!("{prefix}.t.exit"), vec![one.clone(), zero.clone(), half, zero.clone()]);
    let q2_exit = b.winning_terminal(format!("{prefix}.q2.exit"), &[0]);
    let s2_exit = b.payoff_terminal(format!("{prefix}.s2.exit"), vec![one.clone(), zero.clone(), one, zero]);
    b.edge(s, q1).edge(s, s_exit);
    b.prob_edge(q1, s1, p.clone()).prob_edge(q1, q1_exit, q.clone());
    b.edge(s1, t).edge(s1, s1_exit);
    b.edge(t, q2).edge(t, t_exit);
    b.prob_edge(q2, s2, p.clone()).prob_edge(q2, q2_exit, q);
    b.edge(s2, s).edge(s2, s2_exit);
    s
}
