//! Seeded random inputs: filtered differentials and torus perturbations.

use num_bigint::BigInt;
use num_rational::Rational64;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::coeff::IntegerMatrix;
use crate::jcat::{ChainComplexData, Components};
use crate::morse::{Term, TrigPolynomial};

/// A chain complex together with the higher components of a filtered
/// differential extending it.
#[derive(Debug, Clone)]
pub struct FilteredSample {
    pub complex: ChainComplexData,
    pub higher: Components,
}

/// Bounds for [`random_filtered_complex`].
#[derive(Debug, Clone, Copy)]
pub struct SynthBounds {
    pub max_rank: usize,
    pub max_top_degree: usize,
    pub max_entry: i64,
}

impl Default for SynthBounds {
    fn default() -> Self {
        Self {
            max_rank: 5,
            max_top_degree: 4,
            max_entry: 3,
        }
    }
}

struct Graded {
    level: Vec<usize>,
    d: Vec<Vec<i64>>,
}

impl Graded {
    // D <- E D E⁻¹ for E = 1 + c·e_ij
    fn conjugate(&mut self, i: usize, j: usize, c: i64) {
        let n = self.d.len();
        for k in 0..n {
            let v = self.d[j][k];
            self.d[i][k] += c * v;
        }
        for k in 0..n {
            let v = self.d[k][i];
            self.d[k][j] -= c * v;
        }
    }

    fn max_abs(&self) -> i64 {
        self.d.iter().flatten().map(|x| x.abs()).max().unwrap_or(0)
    }

    fn block(&self, p: usize, q: usize) -> IntegerMatrix {
        let rows: Vec<usize> = (0..self.level.len()).filter(|&i| self.level[i] == q).collect();
        let cols: Vec<usize> = (0..self.level.len()).filter(|&i| self.level[i] == p).collect();
        let entries = rows
            .iter()
            .flat_map(|&r| cols.iter().map(move |&c| (r, c)))
            .map(|(r, c)| BigInt::from(self.d[r][c]))
            .collect();
        IntegerMatrix::new(rows.len(), cols.len(), entries).expect("block shape")
    }
}

/// Random filtration-lowering differential `D` with `D² = 0`, entries in
/// `[-max_entry, max_entry]`. `D` is a matching of generators in adjacent
/// levels, conjugated by filtration-preserving unipotent matrices; its
/// adjacent components form the complex and the rest are returned as
/// higher components.
pub fn random_filtered_complex(seed: u64, bounds: SynthBounds) -> FilteredSample {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let top = rng.gen_range(1..=bounds.max_top_degree.max(1));
    let ranks: Vec<usize> = (0..=top).map(|_| rng.gen_range(1..=bounds.max_rank.max(1))).collect();
    let level: Vec<usize> = ranks.iter().enumerate().flat_map(|(p, &r)| std::iter::repeat_n(p, r)).collect();
    let n = level.len();
    let mut g = Graded {
        level: level.clone(),
        d: vec![vec![0; n]; n],
    };

    let mut used = vec![false; n];
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut rng);
    for &src in &order {
        if used[src] || level[src] == 0 || !rng.gen_bool(0.6) {
            continue;
        }
        let targets: Vec<usize> = (0..n).filter(|&t| !used[t] && level[t] + 1 == level[src]).collect();
        if let Some(&t) = targets.choose(&mut rng) {
            let k = rng.gen_range(1..=bounds.max_entry.max(1)) * if rng.gen_bool(0.5) { 1 } else { -1 };
            g.d[t][src] = k;
            used[src] = true;
            used[t] = true;
        }
    }

    for _ in 0..4 * n {
        let (i, j) = (rng.gen_range(0..n), rng.gen_range(0..n));
        if i == j || level[i] > level[j] {
            continue;
        }
        let c = if rng.gen_bool(0.5) { 1 } else { -1 };
        g.conjugate(i, j, c);
        if g.max_abs() > bounds.max_entry {
            g.conjugate(i, j, -c);
        }
    }

    let bases: Vec<Vec<String>> = ranks
        .iter()
        .enumerate()
        .map(|(p, &r)| (0..r).map(|i| format!("e{p}_{i}")).collect())
        .collect();
    let boundaries = (1..=top).map(|p| g.block(p, p - 1)).collect();
    let complex = ChainComplexData::new(bases, boundaries).expect("adjacent components square to zero");
    let mut higher = Components::new();
    for p in 2..=top {
        for q in 0..p - 1 {
            higher.insert((p, q), g.block(p, q));
        }
    }
    FilteredSample { complex, higher }
}

/// `cos 2πx + cos 2πy` plus one to three terms with frequencies of
/// Euclidean norm at most 2 and coefficients in `[-1/10, 1/10]`.
pub fn perturbed_torus(seed: u64) -> TrigPolynomial {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let freqs: Vec<[i64; 2]> = (-2i64..=2)
        .flat_map(|a| (-2i64..=2).map(move |b| [a, b]))
        .filter(|&[a, b]| (1..=4).contains(&(a * a + b * b)))
        .collect();
    let mut terms = vec![
        Term::cos(vec![1, 0], Rational64::from_integer(1)),
        Term::cos(vec![0, 1], Rational64::from_integer(1)),
    ];
    for _ in 0..rng.gen_range(1..=3) {
        let k = freqs.choose(&mut rng).expect("nonempty");
        let c = Rational64::new(rng.gen_range(-10..=10), 100);
        let s = Rational64::new(rng.gen_range(-10..=10), 100);
        terms.push(Term::new(k.to_vec(), c, s));
    }
    TrigPolynomial::new(2, terms).expect("base terms are live")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coeff::CoefficientRing;
    use crate::jcat::{check_realization, realize};

    #[test]
    fn samples_realize_and_stay_bounded() {
        for seed in 0..40 {
            let s = random_filtered_complex(seed, SynthBounds::default());
            assert!(s.complex.ranks().iter().all(|&r| (1..=5).contains(&r)));
            assert!(s.complex.num_groups() <= 5);
            let all = s.complex.boundaries().iter().chain(s.higher.values());
            assert!(all.flat_map(|m| m.entries().iter()).all(|x| x.magnitude() <= &3u32.into()));
            let x = realize(&s.complex, &CoefficientRing::Integers, Some(&s.higher)).unwrap();
            assert!(check_realization(&x, &s.complex).passed());
        }
    }

    #[test]
    fn deterministic_per_seed() {
        let a = random_filtered_complex(7, SynthBounds::default());
        let b = random_filtered_complex(7, SynthBounds::default());
        assert_eq!(a.complex, b.complex);
        assert_eq!(a.higher, b.higher);
        assert_eq!(perturbed_torus(3), perturbed_torus(3));
    }

    #[test]
    fn conjugation_produces_higher_components() {
        let nonzero = (0..40)
            .map(|s| random_filtered_complex(s, SynthBounds::default()))
            .filter(|s| s.higher.values().any(|m| !m.is_zero()))
            .count();
        assert!(nonzero > 0);
    }
}
