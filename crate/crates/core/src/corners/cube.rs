use std::collections::BTreeSet;
use std::fmt;

use num_rational::BigRational;
use num_traits::{Signed, Zero};

use crate::report::Report;

use super::CornerError;

/// An object of the poset `2^k`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CubeObject {
    bits: Vec<bool>,
}

impl CubeObject {
    pub fn new(bits: Vec<bool>) -> Self {
        Self { bits }
    }

    pub fn zero(k: usize) -> Self {
        Self { bits: vec![false; k] }
    }

    /// Bit `i` of `code` is slot `i`.
    pub fn from_code(k: usize, code: u64) -> Self {
        Self {
            bits: (0..k).map(|i| code >> i & 1 == 1).collect(),
        }
    }

    pub fn all(k: usize) -> impl Iterator<Item = CubeObject> {
        (0..1u64 << k).map(move |c| Self::from_code(k, c))
    }

    pub fn k(&self) -> usize {
        self.bits.len()
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    pub fn get(&self, i: usize) -> bool {
        self.bits[i]
    }

    pub fn le(&self, other: &Self) -> bool {
        self.k() == other.k() && self.bits.iter().zip(&other.bits).all(|(a, b)| !a || *b)
    }

    pub fn concat(&self, other: &Self) -> Self {
        let mut bits = self.bits.clone();
        bits.extend_from_slice(&other.bits);
        Self { bits }
    }

    /// Copy with every slot outside `range` cleared.
    pub fn restrict(&self, range: std::ops::Range<usize>) -> Self {
        Self {
            bits: self
                .bits
                .iter()
                .enumerate()
                .map(|(i, &b)| b && range.contains(&i))
                .collect(),
        }
    }
}

impl fmt::Display for CubeObject {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in &self.bits {
            write!(f, "{}", if b { '1' } else { '0' })?;
        }
        Ok(())
    }
}

/// Number of zero coordinates of a point of the positive orthant.
pub fn corner_code(x: &[BigRational]) -> Result<usize, CornerError> {
    if let Some(c) = x.iter().find(|c| c.is_negative()) {
        return Err(CornerError::NegativeCoordinate(c.to_string()));
    }
    Ok(x.iter().filter(|c| c.is_zero()).count())
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FaceSample {
    pub point: Vec<BigRational>,
    pub labels: BTreeSet<usize>,
}

/// Face labels `1..=k` assigned to sample points of the model orthant.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FaceStructure {
    pub k: usize,
    pub samples: Vec<FaceSample>,
}

impl FaceStructure {
    /// Face `j` holds exactly the points whose `j`-th coordinate is zero.
    pub fn canonical(k: usize, points: Vec<Vec<BigRational>>) -> Self {
        let samples = points
            .into_iter()
            .map(|p| {
                let labels = p
                    .iter()
                    .enumerate()
                    .filter(|(_, c)| c.is_zero())
                    .map(|(j, _)| j + 1)
                    .collect();
                FaceSample { point: p, labels }
            })
            .collect();
        Self { k, samples }
    }
}

pub fn validate_k_structure(f: &FaceStructure) -> Report {
    let mut report = Report::new(format!("<{}>-structure", f.k));
    let mut model = Vec::new();
    let mut codes = Vec::with_capacity(f.samples.len());
    for (i, s) in f.samples.iter().enumerate() {
        if s.point.len() != f.k {
            model.push(format!("sample {i} has {} coordinates", s.point.len()));
        }
        if let Some(&j) = s.labels.iter().find(|&&j| j == 0 || j > f.k) {
            model.push(format!("sample {i} carries label {j} outside 1..={}", f.k));
        }
        match corner_code(&s.point) {
            Ok(c) => codes.push(Some(c)),
            Err(e) => {
                model.push(format!("sample {i}: {e}"));
                codes.push(None);
            }
        }
    }
    report.check("samples lie in the model", model);

    let mut card = Vec::new();
    let mut cover = Vec::new();
    let mut faces = Vec::new();
    for (i, (s, c)) in f.samples.iter().zip(&codes).enumerate() {
        let Some(c) = *c else { continue };
        let n = s.labels.len();
        if n != c {
            card.push(format!("sample {i} has corner code {c} but {n} faces"));
        }
        if c > 0 && n == 0 {
            cover.push(format!("boundary sample {i} lies on no face"));
        }
        if n >= 2 && c < 2 {
            faces.push(format!("sample {i} lies on faces {:?} with corner code {c}", s.labels));
        }
    }
    report.check("each point lies on c(x) faces", card);
    report.check("faces cover the boundary", cover);
    report.check("face intersections are corners", faces);
    report
}
