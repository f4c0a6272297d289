use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use num_rational::Rational64;
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use super::MorseError;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Term {
    pub freq: Vec<i64>,
    pub cos: Rational64,
    pub sin: Rational64,
}

impl Term {
    pub fn new(freq: Vec<i64>, cos: Rational64, sin: Rational64) -> Self {
        Self { freq, cos, sin }
    }

    pub fn cos(freq: Vec<i64>, c: Rational64) -> Self {
        Self::new(freq, c, Rational64::zero())
    }
}

/// `f(x) = Σ c cos(2π k·x) + s sin(2π k·x)` on the flat torus `Tⁿ`, `n ≤ 3`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TrigPolynomial {
    dim: usize,
    terms: Vec<Term>,
}

/// Value, gradient and Hessian at a point.
#[derive(Debug, Clone)]
pub struct Jet {
    pub value: f64,
    pub grad: DVector<f64>,
    pub hess: DMatrix<f64>,
}

impl TrigPolynomial {
    pub fn new(dim: usize, terms: Vec<Term>) -> Result<Self, MorseError> {
        if !(1..=3).contains(&dim) {
            return Err(MorseError::InvalidFunction(format!("dimension {dim} not in 1..=3")));
        }
        for t in &terms {
            if t.freq.len() != dim {
                return Err(MorseError::InvalidFunction(format!(
                    "frequency {:?} has length {}, expected {dim}",
                    t.freq,
                    t.freq.len()
                )));
            }
        }
        let live = terms
            .iter()
            .any(|t| t.freq.iter().any(|&k| k != 0) && !(t.cos.is_zero() && t.sin.is_zero()));
        if !live {
            return Err(MorseError::InvalidFunction("no nonconstant term".into()));
        }
        Ok(Self { dim, terms })
    }

    /// `cos 2πx₁ + ... + cos 2πxₙ`.
    pub fn standard(dim: usize) -> Self {
        let terms = (0..dim)
            .map(|i| {
                let mut k = vec![0; dim];
                k[i] = 1;
                Term::cos(k, Rational64::from_integer(1))
            })
            .collect();
        Self::new(dim, terms).expect("standard function is valid")
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    fn phase(&self, t: &Term, x: &[f64]) -> f64 {
        2.0 * PI * t.freq.iter().zip(x).map(|(&k, &xi)| k as f64 * xi).sum::<f64>()
    }

    pub fn value(&self, x: &[f64]) -> f64 {
        self.terms
            .iter()
            .map(|t| {
                let th = self.phase(t, x);
                ratio_f64(t.cos) * th.cos() + ratio_f64(t.sin) * th.sin()
            })
            .sum()
    }

    pub fn gradient(&self, x: &[f64]) -> DVector<f64> {
        let mut g = DVector::zeros(self.dim);
        for t in &self.terms {
            let th = self.phase(t, x);
            let w = 2.0 * PI * (-ratio_f64(t.cos) * th.sin() + ratio_f64(t.sin) * th.cos());
            for (i, &k) in t.freq.iter().enumerate() {
                g[i] += w * k as f64;
            }
        }
        g
    }

    pub fn jet(&self, x: &[f64]) -> Jet {
        let n = self.dim;
        let mut value = 0.0;
        let mut grad = DVector::zeros(n);
        let mut hess = DMatrix::zeros(n, n);
        for t in &self.terms {
            let th = self.phase(t, x);
            let (s, c) = th.sin_cos();
            let (a, b) = (ratio_f64(t.cos), ratio_f64(t.sin));
            value += a * c + b * s;
            let w1 = 2.0 * PI * (-a * s + b * c);
            let w2 = -4.0 * PI * PI * (a * c + b * s);
            for i in 0..n {
                grad[i] += w1 * t.freq[i] as f64;
                for j in 0..n {
                    hess[(i, j)] += w2 * (t.freq[i] * t.freq[j]) as f64;
                }
            }
        }
        Jet { value, grad, hess }
    }

    pub fn to_json(&self) -> serde_json::Value {
        let raw = FunctionJson {
            dim: self.dim,
            terms: self
                .terms
                .iter()
                .map(|t| TermJson {
                    freq: t.freq.clone(),
                    cos: CoeffJson::from_ratio(t.cos),
                    sin: CoeffJson::from_ratio(t.sin),
                })
                .collect(),
        };
        serde_json::to_value(raw).expect("function serializes")
    }

    pub fn from_json(value: &serde_json::Value) -> Result<Self, MorseError> {
        let raw: FunctionJson = serde_json::from_value(value.clone()).map_err(|e| MorseError::Json(e.to_string()))?;
        let terms = raw
            .terms
            .into_iter()
            .map(|t| Ok(Term::new(t.freq, t.cos.to_ratio()?, t.sin.to_ratio()?)))
            .collect::<Result<Vec<_>, MorseError>>()?;
        Self::new(raw.dim, terms)
    }

    pub fn from_str_json(s: &str) -> Result<Self, MorseError> {
        let v: serde_json::Value = serde_json::from_str(s).map_err(|e| MorseError::Json(e.to_string()))?;
        Self::from_json(&v)
    }
}

fn ratio_f64(r: Rational64) -> f64 {
    r.to_f64().expect("i64 ratio converts")
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct FunctionJson {
    dim: usize,
    terms: Vec<TermJson>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct TermJson {
    freq: Vec<i64>,
    #[serde(default)]
    cos: CoeffJson,
    #[serde(default)]
    sin: CoeffJson,
}

/// Coefficient as an integer, a float or a `"p/q"` string.
#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum CoeffJson {
    Int(i64),
    Float(f64),
    Text(String),
}

impl Default for CoeffJson {
    fn default() -> Self {
        CoeffJson::Int(0)
    }
}

impl CoeffJson {
    fn from_ratio(r: Rational64) -> Self {
        if r.is_integer() {
            CoeffJson::Int(*r.numer())
        } else {
            CoeffJson::Text(format!("{}/{}", r.numer(), r.denom()))
        }
    }

    fn to_ratio(&self) -> Result<Rational64, MorseError> {
        match self {
            CoeffJson::Int(i) => Ok(Rational64::from_integer(*i)),
            CoeffJson::Float(f) => Rational64::approximate_float(*f)
                .ok_or_else(|| MorseError::InvalidFunction(format!("coefficient {f} is not representable"))),
            CoeffJson::Text(s) => {
                let bad = || MorseError::InvalidFunction(format!("bad coefficient {s:?}"));
                match s.split_once('/') {
                    Some((p, q)) => {
                        let p: i64 = p.trim().parse().map_err(|_| bad())?;
                        let q: i64 = q.trim().parse().map_err(|_| bad())?;
                        if q == 0 {
                            return Err(bad());
                        }
                        Ok(Rational64::new(p, q))
                    }
                    None => s.trim().parse::<i64>().map(Rational64::from_integer).map_err(|_| bad()),
                }
            }
        }
    }
}
