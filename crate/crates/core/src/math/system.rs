use super::MathError;
use crate::rational::Rational;
use num_traits::{One, Zero};

/// Dense square system `matrix · x = rhs`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LinearSystem {
    pub matrix: Vec<Vec<Rational>>,
    pub rhs: Vec<Rational>,
}

impl LinearSystem {
    pub fn new(matrix: Vec<Vec<Rational>>, rhs: Vec<Rational>) -> Self {
        LinearSystem { matrix, rhs }
    }

    pub fn identity(n: usize, rhs: Vec<Rational>) -> Self {
        let matrix = (0..n)
            .map(|r| {
                (0..n)
                    .map(|c| if r == c { Rational::one() } else { Rational::zero() })
                    .collect()
            })
            .collect();
        LinearSystem { matrix, rhs }
    }
}

/// Gauss-Jordan elimination over the rationals.
pub fn solve_system(sys: &LinearSystem) -> Result<Vec<Rational>, MathError> {
    let n = sys.rhs.len();
    if sys.matrix.len() != n || sys.matrix.iter().any(|row| row.len() != n) {
        return Err(MathError::Dimension(format!(
            "expected a {n}x{n} matrix for {n} right-hand sides"
        )));
    }
    let mut a: Vec<Vec<Rational>> = sys
        .matrix
        .iter()
        .zip(&sys.rhs)
        .map(|(row, b)| {
            let mut r = row.clone();
            r.push(b.clone());
            r
        })
        .collect();

    for col in 0..n {
        let pivot = (col..n)
            .find(|&r| !a[r][col].is_zero())
            .ok_or(MathError::SingularSystem)?;
        a.swap(col, pivot);
        let inv = a[col][col].recip();
        if !inv.is_one() {
            for x in a[col][col..].iter_mut() {
                *x *= &inv;
            }
        }
        let pivot_row = a[col].clone();
        let nonzero: Vec<usize> = (col..=n).filter(|&c| !pivot_row[c].is_zero()).collect();
        for (r, row) in a.iter_mut().enumerate() {
            if r == col || row[col].is_zero() {
                continue;
            }
            let f = row[col].clone();
            for &c in &nonzero {
                let d = &f * &pivot_row[c];
                row[c] -= d;
            }
        }
    }
    Ok(a.into_iter().map(|mut row| row.pop().unwrap()).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, ratio};

    #[test]
    fn identity_returns_rhs() {
        let b = vec![ratio(1, 3), int(-2), int(7)];
        let sys = LinearSystem::identity(3, b.clone());
        assert_eq!(solve_system(&sys).unwrap(), b);
    }

    #[test]
    fn geometric_cycle_exit() {
        // z = 1/2 * z + 1/2: the v2 -> v4 cycle exiting with probability 1/2.
        // Oracle: sum_k (1/2)^k * 1/2 over k = 0..60 differs from 1 by 2^-61.
        let mut partial = Rational::zero();
        let mut term = ratio(1, 2);
        for _ in 0..61 {
            partial += &term;
            term *= ratio(1, 2);
        }
        assert_eq!(int(1) - &partial, crate::rational::pow2_inv(61));

        let sys = LinearSystem::new(vec![vec![int(1) - ratio(1, 2)]], vec![ratio(1, 2)]);
        assert_eq!(solve_system(&sys).unwrap(), vec![int(1)]);
    }

    #[test]
    fn rank_deficient_is_singular() {
        let sys = LinearSystem::new(
            vec![vec![int(1), int(2)], vec![int(1), int(2)]],
            vec![int(1), int(1)],
        );
        assert_eq!(solve_system(&sys), Err(MathError::SingularSystem));
    }

    #[test]
    fn rejects_non_square() {
        let sys = LinearSystem::new(vec![vec![int(1), int(2)]], vec![int(1)]);
        assert!(matches!(solve_system(&sys), Err(MathError::Dimension(_))));
    }
}
