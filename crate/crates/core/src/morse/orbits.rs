use std::cmp::Ordering;
use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;
use serde::Serialize;

use crate::flowcat::{BrokenFlow, ModuliComponent};

use super::critical::min_separation;
use super::integrate::{Direction, Integrator, Landing, Trajectory};
use super::{Convention, CriticalPoint, MorseError, NumericalConfig, TrigPolynomial};

/// A rigid connecting orbit `from -> to`, in unwrapped coordinates starting at
/// the representative of `from`.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct FlowLine {
    pub id: String,
    pub from: String,
    pub to: String,
    /// Unit vector at `from`.
    pub departure: Vec<f64>,
    /// Unit vector from the lifted `to` towards the last sample.
    pub arrival: Vec<f64>,
    /// The orbit ends at `position(to) + lift`.
    pub lift: Vec<i64>,
    pub sign: i64,
    #[serde(skip)]
    pub samples: Vec<(f64, Vec<f64>)>,
    #[serde(skip)]
    pub(crate) from_idx: usize,
    #[serde(skip)]
    pub(crate) to_idx: usize,
}

impl FlowLine {
    /// Distance from `q` to the sampled polyline.
    pub fn distance_to(&self, q: &[f64]) -> f64 {
        let q = DVector::from_column_slice(q);
        let pts: Vec<DVector<f64>> = self.samples.iter().map(|(_, x)| DVector::from_column_slice(x)).collect();
        if pts.len() == 1 {
            return (&pts[0] - &q).norm();
        }
        pts.windows(2)
            .map(|w| {
                let d = &w[1] - &w[0];
                let len2 = d.norm_squared();
                let s = if len2 > 0.0 { ((&q - &w[0]).dot(&d) / len2).clamp(0.0, 1.0) } else { 0.0 };
                (&w[0] + d * s - &q).norm()
            })
            .fold(f64::INFINITY, f64::min)
    }
}

/// Generic landing of a scan sample, or capture by a separating point.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SampleLabel {
    Basin(Landing),
    Separatrix(Landing),
}

/// One side of a basin boundary on the scanned circle.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BoundarySide {
    pub basin: Landing,
    /// Side of the separating point the neighbouring orbits pass on, measured
    /// along its one-dimensional exit direction.
    pub side: i8,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Boundary {
    pub theta: f64,
    /// Angle within `bisectionTol` of `theta` whose orbit passes the separator closest.
    pub near_theta: f64,
    pub separator: Landing,
    /// Closest approach of the neighbouring orbits to the separator.
    pub approach: f64,
    /// Stable branch the neighbours arrive along, for forward scans whose
    /// separator has a one-dimensional stable space; 0 otherwise.
    pub branch: i8,
    pub below: BoundarySide,
    pub above: BoundarySide,
}

/// Basin partition of the circle of radius `ε` in a two-dimensional
/// unstable (forward) or stable (backward) eigenspace.
#[derive(Debug, Clone)]
pub struct Scan {
    pub center: usize,
    pub dir: Direction,
    pub basis: DMatrix<f64>,
    pub samples: Vec<(f64, SampleLabel)>,
    /// Sorted by angle in `[0, 2π)`.
    pub boundaries: Vec<Boundary>,
}

pub struct MorseSolver<'a> {
    pub f: &'a TrigPolynomial,
    pub crit: &'a [CriticalPoint],
    pub cfg: &'a NumericalConfig,
}

fn lift_vec(l: &[i64]) -> DVector<f64> {
    DVector::from_iterator(l.len(), l.iter().map(|&k| k as f64))
}

fn sub_lift(a: &[i64], b: &[i64]) -> Vec<i64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

fn neg_lift(a: &[i64]) -> Vec<i64> {
    a.iter().map(|x| -x).collect()
}

fn det_sign(m: &DMatrix<f64>) -> Result<i64, MorseError> {
    let d = m.determinant();
    if !d.is_finite() || d.abs() < 1e-9 {
        return Err(MorseError::MorseSmaleViolation(format!(
            "degenerate orientation comparison (determinant {d:e})"
        )));
    }
    Ok(if d > 0.0 { 1 } else { -1 })
}

fn stack(first: &DVector<f64>, rest: &DMatrix<f64>) -> DMatrix<f64> {
    let mut w = DMatrix::zeros(first.len(), 1 + rest.ncols());
    w.set_column(0, first);
    for j in 0..rest.ncols() {
        w.set_column(j + 1, &rest.column(j));
    }
    w
}

impl<'a> MorseSolver<'a> {
    pub fn new(f: &'a TrigPolynomial, crit: &'a [CriticalPoint], cfg: &'a NumericalConfig) -> Result<Self, MorseError> {
        cfg.validate()?;
        let sep = min_separation(crit);
        if cfg.sphere_radius >= 0.5 * sep {
            return Err(MorseError::InvalidConfig(format!(
                "sphereRadius {} is not below half the minimal critical-point distance {sep}",
                cfg.sphere_radius
            )));
        }
        Ok(Self { f, crit, cfg })
    }

    fn integrator(&self, origin: usize, dir: Direction, land_index: usize) -> Integrator<'_> {
        Integrator {
            f: self.f,
            crit: self.crit,
            cfg: self.cfg,
            dir,
            land_index,
            origin,
        }
    }

    fn conv(&self) -> Convention {
        self.cfg.convention
    }

    /// `W = [motion direction into b, ordered unstable basis of b]`.
    fn arrival_frame(&self, y: &DVector<f64>, b: &Landing) -> Result<DMatrix<f64>, MorseError> {
        let c = &self.crit[b.crit];
        let disp = y - (c.pos() + lift_vec(&b.lift));
        let ps = c.stable_projector() * disp;
        let n = ps.norm();
        if n == 0.0 {
            return Err(MorseError::MorseSmaleViolation(format!("orbit arrives at {} off its stable space", c.id)));
        }
        Ok(stack(&(-ps / n), &c.unstable_basis(self.conv())))
    }

    /// Sign of the transported unstable frame against the arrival frame.
    fn transported_sign(&self, tr: &Trajectory) -> Result<i64, MorseError> {
        let v = tr.frame.as_ref().expect("frame was transported");
        let w = self.arrival_frame(tr.last(), &tr.end)?;
        if w.ncols() != v.ncols() {
            return Err(MorseError::MorseSmaleViolation(format!(
                "index gap to {} is not one",
                self.crit[tr.end.crit].id
            )));
        }
        let wtw = w.transpose() * &w;
        let inv = wtw
            .try_inverse()
            .ok_or_else(|| MorseError::MorseSmaleViolation("singular arrival frame".into()))?;
        let coeffs = inv * w.transpose() * v;
        det_sign(&coeffs)
    }

    fn flow_from_trajectory(&self, a: usize, tr: &Trajectory, departure: DVector<f64>, sign: i64) -> FlowLine {
        let b = &self.crit[tr.end.crit];
        let end = b.pos() + lift_vec(&tr.end.lift);
        let arr = tr.last() - end;
        FlowLine {
            id: String::new(),
            from: self.crit[a].id.clone(),
            to: b.id.clone(),
            departure: departure.iter().copied().collect(),
            arrival: arr.normalize().iter().copied().collect(),
            lift: tr.end.lift.clone(),
            sign,
            samples: tr.samples.iter().map(|(t, x)| (*t, x.iter().copied().collect())).collect(),
            from_idx: a,
            to_idx: tr.end.crit,
        }
    }

    /// Rigid flows out of an index-one point: shots along `±e₁`.
    pub fn shots_forward(&self, a: usize) -> Result<Vec<FlowLine>, MorseError> {
        let ca = &self.crit[a];
        assert_eq!(ca.index, 1, "forward shots need index one");
        let e = ca.unstable_basis(self.conv());
        let e1 = e.column(0).clone_owned();
        let ig = self.integrator(a, Direction::Forward, 0);
        let mut out = Vec::new();
        for s in [1.0, -1.0] {
            let u = &e1 * s;
            let tr = ig.run(ca.pos() + &u * self.cfg.sphere_radius, Some(e.clone()))?;
            if tr.captured {
                return Err(MorseError::MorseSmaleViolation(format!(
                    "orbit from {} runs into {} of index {}",
                    ca.id,
                    self.crit[tr.end.crit].id,
                    self.crit[tr.end.crit].index
                )));
            }
            let sign = self.transported_sign(&tr)?;
            out.push(self.flow_from_trajectory(a, &tr, u, sign));
        }
        Ok(out)
    }

    /// Rigid flows from maxima into `b`, where `b` has a one-dimensional
    /// stable space: backward shots along `±v`.
    pub fn shots_backward(&self, b: usize) -> Result<Vec<FlowLine>, MorseError> {
        let cb = &self.crit[b];
        let n = cb.dim();
        assert_eq!(cb.index + 1, n, "backward shots need a one-dimensional stable space");
        let v = cb.stable_basis().column(0).clone_owned();
        let ig = self.integrator(b, Direction::Backward, n);
        let mut out = Vec::new();
        for s in [1.0, -1.0] {
            let u = &v * s;
            let tr = ig.run(cb.pos() + &u * self.cfg.sphere_radius, None)?;
            if tr.captured {
                return Err(MorseError::MorseSmaleViolation(format!(
                    "backward orbit from {} runs into {}",
                    cb.id, self.crit[tr.end.crit].id
                )));
            }
            let a = tr.end.crit;
            let ca = &self.crit[a];
            // forward lift of a -> b is minus the backward landing lift
            let shift = lift_vec(&tr.end.lift);
            let total = tr.samples.last().map(|s| s.0).unwrap_or(0.0);
            let mut samples: Vec<(f64, Vec<f64>)> = tr
                .samples
                .iter()
                .rev()
                .map(|(t, x)| (total - t, (x - &shift).iter().copied().collect()))
                .collect();
            // finish the descent from the seed into b
            let tail = self
                .integrator(a, Direction::Forward, cb.index)
                .run(cb.pos() + &u * self.cfg.sphere_radius, None)?;
            if tail.captured || tail.end.crit != b || tail.end.lift.iter().any(|&k| k != 0) {
                return Err(MorseError::IntegrationFailure(format!(
                    "stable seed at {} does not return to it",
                    cb.id
                )));
            }
            samples.extend(
                tail.samples
                    .iter()
                    .skip(1)
                    .map(|(t, x)| (total + t, (x - &shift).iter().copied().collect())),
            );
            let first = DVector::from_column_slice(&samples[0].1);
            let departure = (first - ca.pos()).normalize();
            let w = stack(&(-&u), &cb.unstable_basis(self.conv()));
            let sign = det_sign(&ca.unstable_basis(self.conv()))? * det_sign(&w)?;
            out.push(FlowLine {
                id: String::new(),
                from: ca.id.clone(),
                to: cb.id.clone(),
                departure: departure.iter().copied().collect(),
                arrival: u.iter().copied().collect(),
                lift: neg_lift(&tr.end.lift),
                sign,
                samples,
                from_idx: a,
                to_idx: b,
            });
        }
        Ok(out)
    }

    fn scan_geometry(&self, center: usize, dir: Direction) -> (DMatrix<f64>, usize, usize) {
        let c = &self.crit[center];
        match dir {
            Direction::Forward => (c.unstable_basis(self.conv()), c.index - 2, c.index - 1),
            Direction::Backward => (c.stable_basis(), c.index + 2, c.index + 1),
        }
    }

    fn circle_point(basis: &DMatrix<f64>, theta: f64) -> DVector<f64> {
        basis.column(0) * theta.cos() + basis.column(1) * theta.sin()
    }

    /// One-dimensional exit direction of a separating point, independent of convention.
    fn exit_direction(&self, sep: usize, dir: Direction) -> DVector<f64> {
        let c = &self.crit[sep];
        match dir {
            Direction::Forward => c.unstable_basis(Convention::Standard).column(c.index - 1).clone_owned(),
            Direction::Backward => c.stable_basis().column(0).clone_owned(),
        }
    }

    fn label(&self, tr: &Trajectory, boundary_index: usize, center: usize) -> Result<SampleLabel, MorseError> {
        if !tr.captured {
            return Ok(SampleLabel::Basin(tr.end.clone()));
        }
        let c = &self.crit[tr.end.crit];
        if c.index == boundary_index {
            Ok(SampleLabel::Separatrix(tr.end.clone()))
        } else {
            Err(MorseError::MorseSmaleViolation(format!(
                "orbit from {} runs into {} of index {}",
                self.crit[center].id, c.id, c.index
            )))
        }
    }

    /// Partitions the circle at `center` into landing basins, locating every
    /// basin boundary to `bisectionTol` in angle.
    pub fn scan(&self, center: usize, dir: Direction) -> Result<Scan, MorseError> {
        let (basis, land, sep_index) = self.scan_geometry(center, dir);
        if basis.ncols() != 2 {
            return Err(MorseError::InvalidConfig(format!(
                "circle scan at {} needs a two-dimensional eigenspace",
                self.crit[center].id
            )));
        }
        let ig = self.integrator(center, dir, land);
        let p = self.crit[center].pos();
        let eps = self.cfg.sphere_radius;
        let shoot = |theta: f64| ig.run(&p + Self::circle_point(&basis, theta) * eps, None);
        let n = self.cfg.circle_samples;
        let thetas: Vec<f64> = (0..n).map(|j| 2.0 * PI * j as f64 / n as f64).collect();
        let runs: Vec<Result<Trajectory, MorseError>> = thetas.par_iter().map(|&t| shoot(t)).collect();
        let mut trs = Vec::with_capacity(n);
        for r in runs {
            trs.push(r?);
        }
        let labels: Vec<SampleLabel> = trs
            .iter()
            .map(|tr| self.label(tr, sep_index, center))
            .collect::<Result<_, _>>()?;

        enum Task {
            Bisect(usize),
            Exact(usize),
        }
        let mut tasks = Vec::new();
        for j in 0..n {
            let k = (j + 1) % n;
            match (&labels[j], &labels[k]) {
                (SampleLabel::Basin(x), SampleLabel::Basin(y)) if x != y => tasks.push(Task::Bisect(j)),
                _ => {}
            }
            if matches!(labels[j], SampleLabel::Separatrix(_)) {
                tasks.push(Task::Exact(j));
            }
        }
        let resolved: Vec<Result<Vec<Boundary>, MorseError>> = tasks
            .par_iter()
            .map(|task| match *task {
                Task::Bisect(j) => {
                    let hi_theta = if j + 1 == n { 2.0 * PI } else { thetas[j + 1] };
                    self.bisect(&shoot, (thetas[j], trs[j].clone()), (hi_theta, trs[(j + 1) % n].clone()), sep_index, dir)
                }
                Task::Exact(j) => self.exact_boundary(&shoot, thetas[j], &trs[j], sep_index, dir).map(|b| vec![b]),
            })
            .collect();
        let mut boundaries: Vec<Boundary> = Vec::new();
        for mut b in resolved.into_iter().collect::<Result<Vec<_>, _>>()?.into_iter().flatten() {
            b.theta = b.theta.rem_euclid(2.0 * PI);
            b.near_theta = b.near_theta.rem_euclid(2.0 * PI);
            let dup = boundaries.iter().any(|o| {
                let d = (o.theta - b.theta).abs();
                d.min(2.0 * PI - d) < 10.0 * self.cfg.bisection_tol
            });
            if !dup {
                boundaries.push(b);
            }
        }
        boundaries.sort_by(|x, y| x.theta.total_cmp(&y.theta));
        Ok(Scan {
            center,
            dir,
            basis,
            samples: thetas.into_iter().zip(labels).collect(),
            boundaries,
        })
    }

    fn side_of(&self, tr: &Trajectory, sep: &Landing, dir: Direction) -> Result<BoundarySide, MorseError> {
        if tr.captured {
            return Err(MorseError::MorseSmaleViolation("boundary neighbour is not generic".into()));
        }
        let a = tr.closest[sep.crit]
            .as_ref()
            .ok_or_else(|| MorseError::MorseSmaleViolation("no approach to separating point".into()))?;
        if a.lift != sep.lift {
            return Err(MorseError::MorseSmaleViolation(format!(
                "boundary neighbours pass different translates of {}",
                self.crit[sep.crit].id
            )));
        }
        let s = a.displacement.dot(&self.exit_direction(sep.crit, dir));
        Ok(BoundarySide {
            basin: tr.end.clone(),
            side: if s >= 0.0 { 1 } else { -1 },
        })
    }

    fn branch(&self, tr: &Trajectory, sep: &Landing, dir: Direction) -> i8 {
        let c = &self.crit[sep.crit];
        if dir != Direction::Forward || c.index + 1 != c.dim() {
            return 0;
        }
        let v = c.stable_basis().column(0).clone_owned();
        match tr.closest[sep.crit].as_ref() {
            Some(a) if a.displacement.dot(&v) >= 0.0 => 1,
            Some(_) => -1,
            None => 0,
        }
    }

    fn exact_boundary<F>(&self, shoot: &F, theta: f64, tr: &Trajectory, sep_index: usize, dir: Direction) -> Result<Boundary, MorseError>
    where
        F: Fn(f64) -> Result<Trajectory, MorseError>,
    {
        let sep = tr.end.clone();
        debug_assert_eq!(self.crit[sep.crit].index, sep_index);
        // strongly contracting separators capture near neighbours, so widen
        // the offset until both sides escape, staying well inside the sample spacing
        let limit = PI / (2.0 * self.cfg.circle_samples as f64);
        let mut eta = 10.0 * self.cfg.bisection_tol;
        let (lo, hi) = loop {
            let lo = shoot(theta - eta)?;
            let hi = shoot(theta + eta)?;
            if !lo.captured && !hi.captured {
                break (lo, hi);
            }
            eta *= 10.0;
            if eta > limit {
                return Err(MorseError::MorseSmaleViolation(format!(
                    "separatrix at angle {theta} is not isolated"
                )));
            }
        };
        Ok(Boundary {
            theta,
            near_theta: theta,
            approach: 0.0,
            branch: self.branch(tr, &sep, dir),
            below: self.side_of(&lo, &sep, dir)?,
            above: self.side_of(&hi, &sep, dir)?,
            separator: sep,
        })
    }

    fn bisect<F>(
        &self,
        shoot: &F,
        lo: (f64, Trajectory),
        hi: (f64, Trajectory),
        sep_index: usize,
        dir: Direction,
    ) -> Result<Vec<Boundary>, MorseError>
    where
        F: Fn(f64) -> Result<Trajectory, MorseError>,
    {
        let (mut lo, mut hi) = (lo, hi);
        // past bisectionTol, keep refining while no separator is within δ
        // (strongly anisotropic saddles) until the angle stops resolving
        loop {
            let resolved = hi.0 - lo.0 <= self.cfg.bisection_tol
                && self
                    .separator_distances(&lo.1, &hi.1, sep_index)
                    .first()
                    .is_some_and(|&(d, _)| d < self.cfg.landing_radius);
            let mid = 0.5 * (lo.0 + hi.0);
            if resolved || mid <= lo.0 || mid >= hi.0 {
                break;
            }
            let tr = shoot(mid)?;
            if tr.captured {
                if self.crit[tr.end.crit].index == sep_index {
                    return Ok(vec![self.exact_boundary(shoot, mid, &tr, sep_index, dir)?]);
                }
                return Err(MorseError::MorseSmaleViolation(format!(
                    "orbit runs into {} of index {}",
                    self.crit[tr.end.crit].id, self.crit[tr.end.crit].index
                )));
            }
            if tr.end == lo.1.end {
                lo = (mid, tr);
            } else if tr.end == hi.1.end {
                hi = (mid, tr);
            } else {
                // a narrow third basin: resolve both of its ends
                let mut out = self.bisect(shoot, lo, (mid, tr.clone()), sep_index, dir)?;
                out.extend(self.bisect(shoot, (mid, tr), hi, sep_index, dir)?);
                return Ok(out);
            }
        }
        // the separating point is the one both neighbours pass closest
        let best = self.separator_distances(&lo.1, &hi.1, sep_index);
        let Some(&(d0, i0)) = best.first() else {
            return Err(MorseError::MorseSmaleViolation("basin boundary without a separating point".into()));
        };
        if best.get(1).is_some_and(|&(d1, _)| d1 < 10.0 * d0) {
            let (d1, i1) = best[1];
            return Err(MorseError::MorseSmaleViolation(format!(
                "ambiguous separating point near angle {}: {} at {d0:.3e}, {} at {d1:.3e}; the separatrix may not be resolvable in double precision",
                lo.0, self.crit[i0].id, self.crit[i1].id
            )));
        }
        let lift = lo.1.closest[i0]
            .as_ref()
            .or(hi.1.closest[i0].as_ref())
            .map(|a| a.lift.clone())
            .expect("approach recorded");
        let sep = Landing { crit: i0, lift };
        let dist = |t: &Trajectory| t.closest[i0].as_ref().map_or(f64::INFINITY, |a| a.distance);
        let near_theta = if dist(&lo.1) <= dist(&hi.1) { lo.0 } else { hi.0 };
        Ok(vec![Boundary {
            theta: 0.5 * (lo.0 + hi.0),
            near_theta,
            approach: d0,
            branch: self.branch(&lo.1, &sep, dir),
            below: self.side_of(&lo.1, &sep, dir)?,
            above: self.side_of(&hi.1, &sep, dir)?,
            separator: sep,
        }])
    }

    /// Distance at which both neighbours pass each point of the separating
    /// index, nearest first. Points passed by one neighbour only lie
    /// downstream of the split and rank behind the separator.
    fn separator_distances(&self, lo: &Trajectory, hi: &Trajectory, sep_index: usize) -> Vec<(f64, usize)> {
        let mut best: Vec<(f64, usize)> = self
            .crit
            .iter()
            .enumerate()
            .filter(|(_, c)| c.index == sep_index)
            .filter_map(|(i, _)| {
                let d = [lo, hi]
                    .iter()
                    .map(|t| t.closest[i].as_ref().map_or(f64::INFINITY, |a| a.distance))
                    .fold(0.0, f64::max);
                d.is_finite().then_some((d, i))
            })
            .collect();
        best.sort_by(|x, y| x.0.total_cmp(&y.0).then(x.1.cmp(&y.1)));
        best
    }

    /// Rigid flows from the center of a forward scan: one per basin boundary.
    pub fn flows_from_scan(&self, scan: &Scan) -> Result<Vec<FlowLine>, MorseError> {
        assert_eq!(scan.dir, Direction::Forward);
        let a = scan.center;
        let ca = &self.crit[a];
        let e = ca.unstable_basis(self.conv());
        let ig = self.integrator(a, Direction::Forward, ca.index - 1);
        let runs: Vec<Result<FlowLine, MorseError>> = scan
            .boundaries
            .par_iter()
            .map(|b| {
                let u = Self::circle_point(&scan.basis, b.near_theta);
                let tr = ig.run(ca.pos() + &u * self.cfg.sphere_radius, Some(e.clone()))?;
                if tr.captured || tr.end != b.separator {
                    return Err(MorseError::MorseSmaleViolation(format!(
                        "separatrix from {} at angle {} misses {}",
                        ca.id, b.theta, self.crit[b.separator.crit].id
                    )));
                }
                let sign = self.transported_sign(&tr)?;
                Ok(self.flow_from_trajectory(a, &tr, u, sign))
            })
            .collect();
        runs.into_iter().collect()
    }

    /// Rigid flows out of `a` into points of index one less. Flows into points
    /// with a one-dimensional stable space come from backward shots, which stay
    /// well conditioned where forward separatrices do not.
    pub fn flows_from(&self, a: usize) -> Result<Vec<FlowLine>, MorseError> {
        let ca = &self.crit[a];
        let n = ca.dim();
        match ca.index {
            0 => Ok(Vec::new()),
            1 => self.shots_forward(a),
            2 if n == 3 => self.flows_from_scan(&self.scan(a, Direction::Forward)?),
            _ => {
                debug_assert_eq!(ca.index, n);
                let mut out = Vec::new();
                for (b, cb) in self.crit.iter().enumerate() {
                    if cb.index + 1 == n {
                        out.extend(self.shots_backward(b)?.into_iter().filter(|f| f.from_idx == a));
                    }
                }
                Ok(out)
            }
        }
    }

    /// Interval and circle components of the one-dimensional moduli space
    /// between the scan center and `target` (forward) or `target` and the
    /// scan center (backward), with arc ends matched to broken flows in `flows`.
    pub fn moduli_family(&self, scan: &Scan, flows: &[FlowLine], target: usize) -> Result<Vec<ModuliComponent>, MorseError> {
        let bs = &scan.boundaries;
        if bs.is_empty() {
            let all_target = scan
                .samples
                .iter()
                .all(|(_, l)| matches!(l, SampleLabel::Basin(b) if b.crit == target));
            return Ok(if all_target { vec![ModuliComponent::Circle] } else { Vec::new() });
        }
        let mut out = Vec::new();
        for k in 0..bs.len() {
            let (start, end) = (&bs[k], &bs[(k + 1) % bs.len()]);
            let basin = &start.above.basin;
            if *basin != end.below.basin {
                return Err(MorseError::MorseSmaleViolation(format!(
                    "arc after angle {} lands in two basins",
                    start.theta
                )));
            }
            if basin.crit != target {
                continue;
            }
            let e0 = self.broken_flow(scan, start, start.above.side, basin, flows)?;
            let e1 = self.broken_flow(scan, end, end.below.side, basin, flows)?;
            out.push(ModuliComponent::Interval { ends: [e0, e1] });
        }
        Ok(out)
    }

    fn broken_flow<'f>(
        &self,
        scan: &Scan,
        b: &Boundary,
        side: i8,
        basin: &Landing,
        flows: &'f [FlowLine],
    ) -> Result<BrokenFlow, MorseError> {
        let s = b.separator.crit;
        let u = Self::circle_point(&scan.basis, b.theta);
        let exit = self.exit_direction(s, scan.dir);
        let on_side = |v: &[f64]| {
            let d: f64 = v.iter().zip(exit.iter()).map(|(x, y)| x * y).sum();
            (d >= 0.0) == (side > 0)
        };
        let unmatched = |what: &str| {
            MorseError::UnmatchedEndpoint(format!(
                "{what} for the arc end at angle {} of {} through {}",
                b.theta, self.crit[scan.center].id, self.crit[s].id
            ))
        };
        let pick = |cands: Vec<&'f FlowLine>, what: &str| -> Result<&'f FlowLine, MorseError> {
            match cands.as_slice() {
                [one] => Ok(*one),
                [] => Err(unmatched(&format!("no {what}"))),
                _ => Err(unmatched(&format!("ambiguous {what}"))),
            }
        };
        match scan.dir {
            Direction::Forward => {
                let a = scan.center;
                let mut cands: Vec<&FlowLine> = flows
                    .iter()
                    .filter(|f| f.from_idx == a && f.to_idx == s && f.lift == b.separator.lift)
                    .collect();
                if b.branch != 0 {
                    // the flow along the stable branch the neighbours came in on
                    let v = self.crit[s].stable_basis().column(0).clone_owned();
                    cands.retain(|f| {
                        let d: f64 = f.arrival.iter().zip(v.iter()).map(|(x, y)| x * y).sum();
                        (d >= 0.0) == (b.branch > 0)
                    });
                } else {
                    cands.retain(|f| {
                        let d: f64 = f.departure.iter().zip(u.iter()).map(|(x, y)| (x - y).powi(2)).sum();
                        d.sqrt() <= self.cfg.match_tol
                    });
                }
                let first = pick(cands, "rigid flow into the separator")?;
                let want = sub_lift(&basin.lift, &first.lift);
                let mut cands: Vec<&FlowLine> = flows
                    .iter()
                    .filter(|f| f.from_idx == s && f.to_idx == basin.crit && f.lift == want)
                    .collect();
                if cands.len() > 1 {
                    cands.retain(|f| on_side(&f.departure));
                }
                let second = pick(cands, "second flow")?;
                Ok(BrokenFlow::new(&first.id, &second.id))
            }
            Direction::Backward => {
                let c = scan.center;
                let cc = &self.crit[c];
                let l2 = neg_lift(&b.separator.lift);
                let q = cc.pos() + lift_vec(&l2) + &u * self.cfg.sphere_radius;
                let mut near: Vec<(f64, &FlowLine)> = flows
                    .iter()
                    .filter(|f| f.from_idx == s && f.to_idx == c && f.lift == l2)
                    .map(|f| (f.distance_to(q.as_slice()), f))
                    .filter(|(d, _)| *d <= 0.1 * self.cfg.sphere_radius)
                    .collect();
                near.sort_by(|x, y| x.0.partial_cmp(&y.0).unwrap_or(Ordering::Equal));
                let lower = pick(near.into_iter().map(|(_, f)| f).collect(), "rigid flow through the boundary point")?;
                let want = sub_lift(&b.separator.lift, &basin.lift);
                let mut cands: Vec<&FlowLine> = flows
                    .iter()
                    .filter(|f| f.from_idx == basin.crit && f.to_idx == s && f.lift == want)
                    .collect();
                if cands.len() > 1 {
                    cands.retain(|f| on_side(&f.arrival));
                }
                let upper = pick(cands, "upper flow")?;
                Ok(BrokenFlow::new(&upper.id, &lower.id))
            }
        }
    }
}

/// Lexicographic order treating components within 1e-9 as equal, so that
/// rounding noise in a vanishing component cannot decide the order.
fn lex_with_tolerance(a: &[f64], b: &[f64]) -> Ordering {
    a.iter()
        .zip(b)
        .find(|(p, q)| (*p - *q).abs() > 1e-9)
        .map_or(Ordering::Equal, |(p, q)| p.total_cmp(q))
}

/// Sorts flows by endpoint order then departure, and names them `a-b-k`.
pub(crate) fn assign_ids(flows: &mut [FlowLine]) {
    flows.sort_by(|x, y| {
        x.from_idx
            .cmp(&y.from_idx)
            .then(x.to_idx.cmp(&y.to_idx))
            .then_with(|| lex_with_tolerance(&x.departure, &y.departure))
    });
    let mut k = 0;
    for i in 0..flows.len() {
        if i > 0 && (flows[i].from_idx, flows[i].to_idx) != (flows[i - 1].from_idx, flows[i - 1].to_idx) {
            k = 0;
        }
        flows[i].id = format!("{}-{}-{k}", flows[i].from, flows[i].to);
        k += 1;
    }
}

/// Rigid flows from `a` to `b`, `μ(a) - μ(b) = 1`, identified by position in `crit`.
pub fn connecting_orbits(
    f: &TrigPolynomial,
    crit: &[CriticalPoint],
    a: usize,
    b: usize,
    cfg: &NumericalConfig,
) -> Result<Vec<FlowLine>, MorseError> {
    if crit[a].index != crit[b].index + 1 {
        return Err(MorseError::MorseSmaleViolation(format!(
            "{} and {} are not index-adjacent",
            crit[a].id, crit[b].id
        )));
    }
    let solver = MorseSolver::new(f, crit, cfg)?;
    let mut flows: Vec<FlowLine> = solver.flows_from(a)?.into_iter().filter(|fl| fl.to_idx == b).collect();
    assign_ids(&mut flows);
    Ok(flows)
}
