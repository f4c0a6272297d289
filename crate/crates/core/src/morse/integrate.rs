use nalgebra::{DMatrix, DVector};

use super::{CriticalPoint, MorseError, NumericalConfig, TrigPolynomial};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    /// `dγ/dt = -∇f`
    Forward,
    /// `dγ/dt = +∇f`
    Backward,
}

impl Direction {
    fn sign(self) -> f64 {
        match self {
            Direction::Forward => 1.0,
            Direction::Backward => -1.0,
        }
    }
}

/// Where a trajectory stopped: critical point and integer translate.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Landing {
    pub crit: usize,
    pub lift: Vec<i64>,
}

#[derive(Debug, Clone)]
pub struct Approach {
    pub distance: f64,
    pub lift: Vec<i64>,
    /// Position relative to the lifted critical point.
    pub displacement: DVector<f64>,
}

#[derive(Debug, Clone)]
pub struct Trajectory {
    pub end: Landing,
    /// Stopped inside the capture radius of a point outside the landing index.
    pub captured: bool,
    pub samples: Vec<(f64, DVector<f64>)>,
    pub frame: Option<DMatrix<f64>>,
    /// Closest approach to each critical point outside the landing index.
    pub closest: Vec<Option<Approach>>,
}

impl Trajectory {
    pub fn last(&self) -> &DVector<f64> {
        &self.samples.last().expect("trajectory has samples").1
    }
}

pub struct Integrator<'a> {
    pub f: &'a TrigPolynomial,
    pub crit: &'a [CriticalPoint],
    pub cfg: &'a NumericalConfig,
    pub dir: Direction,
    /// Index whose critical points end the trajectory at the landing radius.
    pub land_index: usize,
    /// Critical point the trajectory leaves; never tracked.
    pub origin: usize,
}

// Fehlberg tableau; the field is autonomous so the nodes are not needed
const A: [[f64; 5]; 6] = [
    [0.0, 0.0, 0.0, 0.0, 0.0],
    [0.25, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 32.0, 9.0 / 32.0, 0.0, 0.0, 0.0],
    [1932.0 / 2197.0, -7200.0 / 2197.0, 7296.0 / 2197.0, 0.0, 0.0],
    [439.0 / 216.0, -8.0, 3680.0 / 513.0, -845.0 / 4104.0, 0.0],
    [-8.0 / 27.0, 2.0, -3544.0 / 2565.0, 1859.0 / 4104.0, -11.0 / 40.0],
];
const B4: [f64; 6] = [25.0 / 216.0, 0.0, 1408.0 / 2565.0, 2197.0 / 4104.0, -0.2, 0.0];
const B5: [f64; 6] = [16.0 / 135.0, 0.0, 6656.0 / 12825.0, 28561.0 / 56430.0, -9.0 / 50.0, 2.0 / 55.0];

/// Orientation-preserving Gram-Schmidt on the columns.
pub fn orthonormalize(v: &mut DMatrix<f64>) {
    for j in 0..v.ncols() {
        for i in 0..j {
            let d = v.column(i).dot(&v.column(j));
            let qi = v.column(i).clone_owned();
            v.column_mut(j).axpy(-d, &qi, 1.0);
        }
        let n = v.column(j).norm();
        if n > 0.0 {
            v.column_mut(j).scale_mut(1.0 / n);
        }
    }
}

impl Integrator<'_> {
    fn rhs(&self, x: &DVector<f64>, v: Option<&DMatrix<f64>>) -> (DVector<f64>, Option<DMatrix<f64>>) {
        let s = -self.dir.sign();
        let j = self.f.jet(x.as_slice());
        let dv = v.map(|v| (&j.hess * v) * s);
        (j.grad * s, dv)
    }

    fn lift_of(&self, x: &DVector<f64>, c: &CriticalPoint) -> (Vec<i64>, DVector<f64>) {
        let lift: Vec<i64> = x.iter().zip(&c.position).map(|(a, p)| (a - p).round() as i64).collect();
        let disp = DVector::from_iterator(x.len(), x.iter().zip(&c.position).zip(&lift).map(|((a, p), k)| a - p - *k as f64));
        (lift, disp)
    }

    /// Integrates from `start` until landing or capture.
    pub fn run(&self, start: DVector<f64>, frame: Option<DMatrix<f64>>) -> Result<Trajectory, MorseError> {
        let cfg = self.cfg;
        let mut x = start;
        let mut frame = frame;
        if let Some(v) = frame.as_mut() {
            orthonormalize(v);
        }
        let mut t = 0.0;
        let mut h = cfg.h_max * 0.1;
        let mut fx = self.f.value(x.as_slice());
        let mut samples = vec![(t, x.clone())];
        let mut closest: Vec<Option<Approach>> = vec![None; self.crit.len()];
        loop {
            if let Some(end) = self.check(&x, &mut closest) {
                return Ok(Trajectory {
                    captured: self.crit[end.crit].index != self.land_index,
                    end,
                    samples,
                    frame,
                    closest,
                });
            }
            if t > cfg.max_flow_time {
                return Err(MorseError::IntegrationFailure(format!(
                    "no landing within flow time {} from {:?}",
                    cfg.max_flow_time,
                    samples[0].1.as_slice()
                )));
            }
            loop {
                let mut kx: Vec<DVector<f64>> = Vec::with_capacity(6);
                let mut kv: Vec<Option<DMatrix<f64>>> = Vec::with_capacity(6);
                for s in 0..6 {
                    let mut xs = x.clone();
                    let mut vs = frame.clone();
                    for r in 0..s {
                        xs.axpy(h * A[s][r], &kx[r], 1.0);
                        if let (Some(vs), Some(k)) = (vs.as_mut(), kv[r].as_ref()) {
                            *vs += k * (h * A[s][r]);
                        }
                    }
                    let (dx, dv) = self.rhs(&xs, vs.as_ref());
                    kx.push(dx);
                    kv.push(dv);
                }
                let mut x4 = x.clone();
                let mut x5 = x.clone();
                for s in 0..6 {
                    x4.axpy(h * B4[s], &kx[s], 1.0);
                    x5.axpy(h * B5[s], &kx[s], 1.0);
                }
                let err = (&x5 - &x4).amax();
                if err <= cfg.step_tol || h <= cfg.h_min {
                    if let Some(v) = frame.as_mut() {
                        for s in 0..6 {
                            if let Some(k) = kv[s].as_ref() {
                                *v += k * (h * B4[s]);
                            }
                        }
                        orthonormalize(v);
                    }
                    let fnew = self.f.value(x4.as_slice());
                    let tie = 1e-12 * fx.abs().max(1.0);
                    let increased = match self.dir {
                        Direction::Forward => fnew > fx + tie,
                        Direction::Backward => fnew < fx - tie,
                    };
                    if increased {
                        return Err(MorseError::IntegrationFailure(format!(
                            "f is not monotone along the trajectory at t = {t}"
                        )));
                    }
                    x = x4;
                    fx = fnew;
                    t += h;
                    samples.push((t, x.clone()));
                    h = next_step(h, err, cfg);
                    break;
                }
                h = next_step(h, err, cfg);
            }
        }
    }

    fn check(&self, x: &DVector<f64>, closest: &mut [Option<Approach>]) -> Option<Landing> {
        for (i, c) in self.crit.iter().enumerate() {
            if i == self.origin {
                continue;
            }
            let (lift, disp) = self.lift_of(x, c);
            let d = disp.norm();
            if c.index == self.land_index {
                if d < self.cfg.landing_radius {
                    return Some(Landing { crit: i, lift });
                }
                continue;
            }
            if closest[i].as_ref().is_none_or(|a| d < a.distance) {
                closest[i] = Some(Approach {
                    distance: d,
                    lift: lift.clone(),
                    displacement: disp,
                });
            }
            if d < self.cfg.capture_radius {
                return Some(Landing { crit: i, lift });
            }
        }
        None
    }
}

fn next_step(h: f64, err: f64, cfg: &NumericalConfig) -> f64 {
    let factor = if err == 0.0 {
        4.0
    } else {
        (0.9 * (cfg.step_tol / err).powf(0.2)).clamp(0.1, 4.0)
    };
    (h * factor).clamp(cfg.h_min, cfg.h_max)
}
