#![allow(dead_code)]

use num_traits::{One, Zero};
use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use ssmg::game::{GameBuilder, InitializedGame};
use ssmg::profile::{PositionalProfile, StationaryProfile};
use ssmg::rational::{ratio, Rational};
use std::collections::{BTreeMap, BTreeSet};

pub type Rows = Vec<Vec<(usize, Rational)>>;

/// Transition rows of the Markov chain a stationary profile induces.
pub fn chain_rows(ig: &InitializedGame, sp: &StationaryProfile) -> Rows {
    ig.vertices()
        .map(|v| match ig.owner(v) {
            Some(_) => sp.distribution(v).to_vec(),
            None => ig.successors(v).iter().map(|&w| (w, ig.prob(v, w))).collect(),
        })
        .collect()
}

/// Probability of reaching `targets` from every vertex, by plain
/// Gauss-Jordan elimination on the vertices that can reach them.
pub fn reach_probabilities(rows: &Rows, targets: &BTreeSet<usize>) -> Vec<Rational> {
    let n = rows.len();
    let mut can = vec![false; n];
    for &t in targets {
        can[t] = true;
    }
    loop {
        let mut changed = false;
        for v in 0..n {
            if !can[v] && rows[v].iter().any(|(w, p)| can[*w] && !p.is_zero()) {
                can[v] = true;
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
    let unknown: Vec<usize> = (0..n).filter(|&v| can[v] && !targets.contains(&v)).collect();
    let col: BTreeMap<usize, usize> = unknown.iter().enumerate().map(|(k, &v)| (v, k)).collect();
    let m = unknown.len();
    let mut a = vec![vec![Rational::zero(); m + 1]; m];
    for (r, &v) in unknown.iter().enumerate() {
        a[r][r] += Rational::one();
        for (w, p) in &rows[v] {
            if targets.contains(w) {
                a[r][m] += p;
            } else if let Some(&c) = col.get(w) {
                a[r][c] -= p;
            }
        }
    }
    for c in 0..m {
        let piv = (c..m).find(|&r| !a[r][c].is_zero()).expect("nonsingular");
        a.swap(c, piv);
        let inv = Rational::one() / &a[c][c];
        for x in a[c].iter_mut() {
            *x *= &inv;
        }
        for r in 0..m {
            if r != c && !a[r][c].is_zero() {
                let f = a[r][c].clone();
                for k in c..=m {
                    let d = &f * &a[c][k];
                    a[r][k] -= d;
                }
            }
        }
    }
    let mut x = vec![Rational::zero(); n];
    for &t in targets {
        x[t] = Rational::one();
    }
    for (r, &v) in unknown.iter().enumerate() {
        x[v] = a[r][m].clone();
    }
    x
}

pub fn payoff_oracle(ig: &InitializedGame, sp: &StationaryProfile) -> Vec<Rational> {
    let rows = chain_rows(ig, sp);
    (0..ig.num_players())
        .map(|i| reach_probabilities(&rows, ig.win_set(i))[ig.initial()].clone())
        .collect()
}

/// Every way to fix one successor at each vertex in `vertices`.
pub fn all_choices(ig: &InitializedGame, vertices: &[usize]) -> Vec<BTreeMap<usize, usize>> {
    let mut out = vec![BTreeMap::new()];
    for &v in vertices {
        out = out
            .into_iter()
            .flat_map(|m| {
                ig.successors(v).iter().map(move |&w| {
                    let mut m = m.clone();
                    m.insert(v, w);
                    m
                })
            })
            .collect();
    }
    out
}

/// Best payoff player `i` reaches by a positional deviation from `sp`.
pub fn best_response_oracle(ig: &InitializedGame, sp: &StationaryProfile, i: usize) -> Rational {
    let mine: Vec<usize> = ig.vertices_of(i).collect();
    let base = chain_rows(ig, sp);
    all_choices(ig, &mine)
        .into_iter()
        .map(|c| {
            let mut rows = base.clone();
            for (v, w) in c {
                rows[v] = vec![(w, Rational::one())];
            }
            reach_probabilities(&rows, ig.win_set(i))[ig.initial()].clone()
        })
        .max()
        .unwrap()
}

/// Whether some positional profile is an equilibrium whose payoff lies in
/// `[lower, upper]`, by enumerating all of them.
pub fn posne_oracle(ig: &InitializedGame, lower: &[Rational], upper: &[Rational]) -> bool {
    let owned: Vec<usize> = ig.owned_vertices().collect();
    all_choices(ig, &owned).into_iter().any(|c| {
        let sp = PositionalProfile::new(ig, &c).unwrap().to_stationary();
        let pay = payoff_oracle(ig, &sp);
        (0..pay.len()).all(|i| lower[i] <= pay[i] && pay[i] <= upper[i])
            && (0..pay.len()).all(|i| best_response_oracle(ig, &sp, i) == pay[i])
    })
}

/// A random game with at most `max_vertices` vertices and small-denominator
/// probabilities. Roughly a third of the vertices are terminals.
pub fn random_game(rng: &mut ChaCha8Rng, max_vertices: usize) -> InitializedGame {
    let players = rng.gen_range(1..=3usize);
    let names: Vec<String> = (0..players).map(|i| i.to_string()).collect();
    let mut b = GameBuilder::new(&names);
    let n = rng.gen_range(2..=max_vertices);
    let terminals = rng.gen_range(1..=(n / 3).max(1));
    let inner = n - terminals;
    let mut kinds = Vec::new();
    for k in 0..inner {
        let v = if rng.gen_bool(0.6) {
            (b.owned(format!("u{k}"), rng.gen_range(0..players)), false)
        } else {
            (b.stochastic(format!("s{k}")), true)
        };
        kinds.push(v);
    }
    let mut ts = Vec::new();
    for k in 0..terminals {
        let winners: Vec<usize> = (0..players).filter(|_| rng.gen_bool(0.5)).collect();
        ts.push(b.winning_terminal(format!("t{k}"), &winners));
    }
    let all: Vec<usize> = kinds.iter().map(|k| k.0).chain(ts.iter().copied()).collect();
    for &(v, is_stochastic) in &kinds {
        let deg = rng.gen_range(1..=3usize.min(all.len()));
        let mut succ: Vec<usize> = all.choose_multiple(rng, deg).copied().collect();
        succ.sort_unstable();
        if is_stochastic {
            let weights: Vec<i64> = succ.iter().map(|_| rng.gen_range(1..=4)).collect();
            let total: i64 = weights.iter().sum();
            for (&w, &k) in succ.iter().zip(&weights) {
                b.prob_edge(v, w, ratio(k, total));
            }
        } else {
            for &w in &succ {
                b.edge(v, w);
            }
        }
    }
    let game = b.build().desugar().expect("random game is valid");
    let v0 = kinds.first().map_or(ts[0], |k| k.0);
    InitializedGame::new(game, v0).unwrap()
}

/// A random stationary profile with a random support at each owned vertex.
pub fn random_stationary(rng: &mut ChaCha8Rng, ig: &InitializedGame) -> StationaryProfile {
    let mut choices = BTreeMap::new();
    for v in ig.owned_vertices() {
        let succ = ig.successors(v);
        let k = rng.gen_range(1..=succ.len());
        let picked: Vec<usize> = succ.choose_multiple(rng, k).copied().collect();
        let weights: Vec<i64> = picked.iter().map(|_| rng.gen_range(1..=3)).collect();
        let total: i64 = weights.iter().sum();
        let dist: BTreeMap<usize, Rational> = picked.iter().zip(&weights).map(|(&w, &x)| (w, ratio(x, total))).collect();
        choices.insert(v, dist);
    }
    StationaryProfile::new(ig, &choices).unwrap()
}
