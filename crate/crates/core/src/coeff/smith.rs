//! Smith normal form over the integers.
//!
//! Pivoting always selects the nonzero entry of smallest absolute value in the
//! active submatrix, ties going to the lowest (row, col) in row-major order, so
//! the transforms are reproducible run to run.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::IntegerMatrix;

/// `u * a * v == d` with `u`, `v` unimodular and `d` diagonal, `d_1 | d_2 | ...`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SmithForm {
    pub u: IntegerMatrix,
    pub d: IntegerMatrix,
    pub v: IntegerMatrix,
}

impl SmithForm {
    /// Nonzero diagonal entries, in order.
    pub fn invariant_factors(&self) -> Vec<BigInt> {
        diagonal_nonzero(&self.d)
    }

    pub fn rank(&self) -> usize {
        self.invariant_factors().len()
    }
}

pub fn smith_normal_form(a: &IntegerMatrix) -> SmithForm {
    let mut d = a.clone();
    let mut u = IntegerMatrix::identity(a.rows());
    let mut v = IntegerMatrix::identity(a.cols());
    reduce(&mut d, Some((&mut u, &mut v)));
    SmithForm { u, d, v }
}

/// Invariant factors only, skipping the transform bookkeeping.
pub fn invariant_factors(a: &IntegerMatrix) -> Vec<BigInt> {
    let mut d = a.clone();
    reduce(&mut d, None);
    diagonal_nonzero(&d)
}

fn diagonal_nonzero(d: &IntegerMatrix) -> Vec<BigInt> {
    (0..d.rows().min(d.cols()))
        .map(|i| d.get(i, i).clone())
        .take_while(|x| !x.is_zero())
        .collect()
}

fn find_pivot(d: &IntegerMatrix, t: usize) -> Option<(usize, usize)> {
    let mut best: Option<(usize, usize, BigInt)> = None;
    for i in t..d.rows() {
        for j in t..d.cols() {
            let x = d.get(i, j);
            if x.is_zero() {
                continue;
            }
            let ax = x.abs();
            if best.as_ref().is_none_or(|(_, _, b)| ax < *b) {
                best = Some((i, j, ax));
            }
        }
    }
    best.map(|(i, j, _)| (i, j))
}

fn reduce(d: &mut IntegerMatrix, mut uv: Option<(&mut IntegerMatrix, &mut IntegerMatrix)>) {
    let steps = d.rows().min(d.cols());
    for t in 0..steps {
        loop {
            let Some((pi, pj)) = find_pivot(d, t) else {
                return;
            };
            d.swap_rows(t, pi);
            d.swap_cols(t, pj);
            if let Some((u, v)) = uv.as_mut() {
                u.swap_rows(t, pi);
                v.swap_cols(t, pj);
            }
            let pivot = d.get(t, t).clone();
            let mut clean = true;
            for i in t + 1..d.rows() {
                let q = d.get(i, t).div_floor(&pivot);
                if !q.is_zero() {
                    let f = -q;
                    d.add_row_multiple(i, t, &f);
                    if let Some((u, _)) = uv.as_mut() {
                        u.add_row_multiple(i, t, &f);
                    }
                }
                if !d.get(i, t).is_zero() {
                    clean = false;
                }
            }
            for j in t + 1..d.cols() {
                let q = d.get(t, j).div_floor(&pivot);
                if !q.is_zero() {
                    let f = -q;
                    d.add_col_multiple(j, t, &f);
                    if let Some((_, v)) = uv.as_mut() {
                        v.add_col_multiple(j, t, &f);
                    }
                }
                if !d.get(t, j).is_zero() {
                    clean = false;
                }
            }
            if !clean {
                continue;
            }
            // pivot must divide the rest of the active block
            let offender = (t + 1..d.rows())
                .find(|&i| (t + 1..d.cols()).any(|j| !d.get(i, j).is_multiple_of(&pivot)));
            if let Some(i) = offender {
                let one = BigInt::one();
                d.add_row_multiple(t, i, &one);
                if let Some((u, _)) = uv.as_mut() {
                    u.add_row_multiple(t, i, &one);
                }
                continue;
            }
            break;
        }
        if d.get(t, t).is_negative() {
            d.negate_row(t);
            if let Some((u, _)) = uv.as_mut() {
                u.negate_row(t);
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(rows: &[&[i64]]) -> IntegerMatrix {
        IntegerMatrix::from_rows(rows).unwrap()
    }

    fn check(a: &IntegerMatrix) -> SmithForm {
        let s = smith_normal_form(a);
        assert_eq!(s.u.mul(a).unwrap().mul(&s.v).unwrap(), s.d);
        assert!(s.u.is_unimodular());
        assert!(s.v.is_unimodular());
        s
    }

    #[test]
    fn zero_matrix_is_fixed() {
        let s = check(&m(&[&[0]]));
        assert_eq!(s.d, m(&[&[0]]));
    }

    #[test]
    fn two_by_two_example() {
        // det = -8 and gcd of entries = 2, so the factors are 2 and 4
        let s = check(&m(&[&[2, 4], &[6, 8]]));
        assert_eq!(s.d, m(&[&[2, 0], &[0, 4]]));
    }

    #[test]
    fn identity_is_fixed() {
        let s = check(&IntegerMatrix::identity(3));
        assert_eq!(s.d, IntegerMatrix::identity(3));
    }

    #[test]
    fn rectangular_and_divisibility_fixup() {
        // diag(2,3) needs the divisibility repair step: SNF is diag(1,6)
        let s = check(&m(&[&[2, 0], &[0, 3]]));
        assert_eq!(s.d, m(&[&[1, 0], &[0, 6]]));
        let s = check(&m(&[&[1, 2, 3], &[4, 5, 6]]));
        assert_eq!(s.invariant_factors(), vec![BigInt::from(1), BigInt::from(3)]);
        let s = check(&IntegerMatrix::zeros(0, 4));
        assert!(s.invariant_factors().is_empty());
    }

    #[test]
    fn factors_without_transforms_agree() {
        let a = m(&[&[4, -6, 2], &[8, 3, -1], &[0, 0, 5]]);
        assert_eq!(invariant_factors(&a), smith_normal_form(&a).invariant_factors());
    }
}
