use std::cmp::Ordering;

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use rayon::prelude::*;
use serde::Serialize;

use super::{Convention, MorseError, NumericalConfig, TrigPolynomial};

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct CriticalPoint {
    pub id: String,
    /// Representative in `[0,1)ⁿ`.
    pub position: Vec<f64>,
    pub value: f64,
    /// Ascending.
    pub hessian_eigenvalues: Vec<f64>,
    pub index: usize,
    #[serde(skip)]
    eigenvectors: Vec<Vec<f64>>,
}

impl CriticalPoint {
    pub fn pos(&self) -> DVector<f64> {
        DVector::from_column_slice(&self.position)
    }

    pub fn dim(&self) -> usize {
        self.position.len()
    }

    pub fn min_abs_eigenvalue(&self) -> f64 {
        self.hessian_eigenvalues.iter().map(|l| l.abs()).fold(f64::INFINITY, f64::min)
    }

    fn basis(&self, range: std::ops::Range<usize>) -> DMatrix<f64> {
        let cols: Vec<DVector<f64>> = range.map(|i| DVector::from_column_slice(&self.eigenvectors[i])).collect();
        if cols.is_empty() {
            return DMatrix::zeros(self.dim(), 0);
        }
        DMatrix::from_columns(&cols)
    }

    /// Ordered basis of the unstable eigenspace (most negative eigenvalue first).
    pub fn unstable_basis(&self, convention: Convention) -> DMatrix<f64> {
        let mut e = self.basis(0..self.index);
        if convention == Convention::Reversed && self.index > 0 {
            e.column_mut(0).neg_mut();
        }
        e
    }

    /// Ordered basis of the stable eigenspace (smallest positive eigenvalue first).
    pub fn stable_basis(&self) -> DMatrix<f64> {
        self.basis(self.index..self.dim())
    }

    /// Orthogonal projector onto the stable eigenspace.
    pub fn stable_projector(&self) -> DMatrix<f64> {
        let s = self.stable_basis();
        &s * s.transpose()
    }
}

/// Componentwise representative of `x - y` in `[-1/2, 1/2)ⁿ`.
pub fn torus_diff(x: &[f64], y: &[f64]) -> Vec<f64> {
    x.iter().zip(y).map(|(a, b)| a - b - (a - b).round()).collect()
}

pub fn torus_distance(x: &[f64], y: &[f64]) -> f64 {
    torus_diff(x, y).iter().map(|d| d * d).sum::<f64>().sqrt()
}

fn wrap_unit(x: f64) -> f64 {
    let r = x.rem_euclid(1.0);
    if r >= 1.0 {
        0.0
    } else {
        r
    }
}

/// Eigen decomposition with ascending eigenvalues and sign-normalized vectors
/// (first component of magnitude above 1e-9 positive).
pub(crate) fn sorted_eigen(h: &DMatrix<f64>) -> (Vec<f64>, Vec<Vec<f64>>) {
    let eig = SymmetricEigen::new(h.clone());
    let mut order: Vec<usize> = (0..h.nrows()).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]).then(i.cmp(&j)));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = order
        .iter()
        .map(|&i| {
            let mut v: Vec<f64> = eig.eigenvectors.column(i).iter().copied().collect();
            if v.iter().find(|c| c.abs() > 1e-9).is_some_and(|&c| c < 0.0) {
                v.iter_mut().for_each(|c| *c = -*c);
            }
            v
        })
        .collect();
    (values, vectors)
}

fn pseudo_inverse_step(h: &DMatrix<f64>, g: &DVector<f64>) -> DVector<f64> {
    let eig = SymmetricEigen::new(h.clone());
    let scale = eig.eigenvalues.iter().map(|l| l.abs()).fold(0.0, f64::max);
    let mut step = DVector::zeros(g.len());
    for (i, &l) in eig.eigenvalues.iter().enumerate() {
        if l.abs() > 1e-12 * scale.max(1.0) {
            let v = eig.eigenvectors.column(i);
            step -= v * (v.dot(g) / l);
        }
    }
    step
}

fn newton(f: &TrigPolynomial, seed: DVector<f64>, cfg: &NumericalConfig) -> Option<DVector<f64>> {
    let mut x = seed;
    for _ in 0..cfg.newton_max_iter {
        let j = f.jet(x.as_slice());
        if j.grad.norm() <= cfg.grad_tol {
            return Some(x);
        }
        let mut step = pseudo_inverse_step(&j.hess, &j.grad);
        let len = step.norm();
        if len > 0.05 {
            step *= 0.05 / len;
        }
        if len == 0.0 {
            return None;
        }
        x += step;
    }
    None
}

/// Newton from a lattice of seeds, deduplicated modulo `ℤⁿ`, checked for
/// nondegeneracy and for vanishing Euler characteristic.
pub fn find_critical_points(f: &TrigPolynomial, cfg: &NumericalConfig) -> Result<Vec<CriticalPoint>, MorseError> {
    cfg.validate()?;
    let n = f.dim();
    let g = cfg.grid_resolution;
    let total = g.pow(n as u32);
    let seeds: Vec<DVector<f64>> = (0..total)
        .map(|mut s| {
            let mut x = DVector::zeros(n);
            for i in 0..n {
                x[i] = (s % g) as f64 / g as f64;
                s /= g;
            }
            x
        })
        .collect();
    let converged: Vec<Option<DVector<f64>>> = seeds.into_par_iter().map(|s| newton(f, s, cfg)).collect();

    let mut reps: Vec<Vec<f64>> = Vec::new();
    for x in converged.into_iter().flatten() {
        let p: Vec<f64> = x.iter().map(|&c| wrap_unit(c)).collect();
        if !reps.iter().any(|r| torus_distance(r, &p) < cfg.dedupe_radius) {
            reps.push(p);
        }
    }

    let mut points = Vec::with_capacity(reps.len());
    for p in reps {
        let j = f.jet(&p);
        let (values, vectors) = sorted_eigen(&j.hess);
        let points_min = values.iter().map(|l| l.abs()).fold(f64::INFINITY, f64::min);
        if points_min < cfg.nondeg_tol {
            return Err(MorseError::NotMorse {
                position: p,
                eigenvalue: points_min,
            });
        }
        let index = values.iter().filter(|&&l| l < 0.0).count();
        points.push(CriticalPoint {
            id: String::new(),
            position: p,
            value: j.value,
            hessian_eigenvalues: values,
            index,
            eigenvectors: vectors,
        });
    }

    let euler: i64 = points.iter().map(|c| if c.index % 2 == 0 { 1 } else { -1 }).sum();
    if euler != 0 {
        let mut counts = vec![0usize; n + 1];
        for c in &points {
            counts[c.index] += 1;
        }
        return Err(MorseError::EulerMismatch { sum: euler, counts });
    }

    points.sort_by(|a, b| {
        b.index
            .cmp(&a.index)
            .then(b.value.total_cmp(&a.value))
            .then_with(|| {
                a.position
                    .iter()
                    .zip(&b.position)
                    .map(|(x, y)| x.total_cmp(y))
                    .find(|o| *o != Ordering::Equal)
                    .unwrap_or(Ordering::Equal)
            })
    });
    for (i, c) in points.iter_mut().enumerate() {
        c.id = format!("c{i}");
    }
    Ok(points)
}

/// Smallest torus distance between two distinct critical points.
pub fn min_separation(points: &[CriticalPoint]) -> f64 {
    let mut best = f64::INFINITY;
    for (i, a) in points.iter().enumerate() {
        for b in &points[i + 1..] {
            best = best.min(torus_distance(&a.position, &b.position));
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::morse::Term;
    use num_rational::Rational64;

    #[test]
    fn standard_torus() {
        let f = TrigPolynomial::standard(2);
        let c = find_critical_points(&f, &NumericalConfig::default()).unwrap();
        let got: Vec<(usize, Vec<f64>)> = c.iter().map(|c| (c.index, c.position.clone())).collect();
        let want = [(2, [0.0, 0.0]), (1, [0.0, 0.5]), (1, [0.5, 0.0]), (0, [0.5, 0.5])];
        assert_eq!(got.len(), 4);
        for ((gi, gp), (wi, wp)) in got.iter().zip(want) {
            assert_eq!(*gi, wi);
            assert!(torus_distance(gp, &wp) < 1e-9, "{gp:?} vs {wp:?}");
        }
        assert_eq!(c[0].id, "c0");
    }

    #[test]
    fn circle() {
        let c = find_critical_points(&TrigPolynomial::standard(1), &NumericalConfig::default()).unwrap();
        assert_eq!(c.iter().map(|c| c.index).collect::<Vec<_>>(), [1, 0]);
    }

    #[test]
    fn degenerate_is_rejected() {
        let f = TrigPolynomial::new(2, vec![Term::cos(vec![1, 0], Rational64::from_integer(1))]).unwrap();
        assert!(matches!(
            find_critical_points(&f, &NumericalConfig::default()),
            Err(MorseError::NotMorse { .. })
        ));
    }

    #[test]
    fn coarse_grid_misses_points() {
        // seeds 0 and 1/2 both sit on maxima of cos 8πx
        let f = TrigPolynomial::new(1, vec![Term::cos(vec![4], Rational64::from_integer(1))]).unwrap();
        let cfg = NumericalConfig {
            grid_resolution: 2,
            ..Default::default()
        };
        assert!(matches!(
            find_critical_points(&f, &cfg),
            Err(MorseError::EulerMismatch { sum: -2, .. })
        ));
    }

    #[test]
    fn higher_frequency_circle() {
        let f = TrigPolynomial::new(1, vec![Term::cos(vec![5], Rational64::from_integer(1))]).unwrap();
        let cfg = NumericalConfig {
            grid_resolution: 64,
            ..Default::default()
        };
        assert_eq!(find_critical_points(&f, &cfg).unwrap().len(), 10);
    }

    #[test]
    fn bases_follow_convention() {
        let c = find_critical_points(&TrigPolynomial::standard(2), &NumericalConfig::default()).unwrap();
        let s = &c[1];
        let e = s.unstable_basis(Convention::Standard);
        assert_eq!(e.shape(), (2, 1));
        assert!(e[(0, 0)] > 0.0 || (e[(0, 0)].abs() < 1e-9 && e[(1, 0)] > 0.0));
        let r = s.unstable_basis(Convention::Reversed);
        assert_eq!(r, -e);
        assert_eq!(s.stable_basis().shape(), (2, 1));
    }
}
