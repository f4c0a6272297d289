use std::collections::BTreeMap;

use crate::report::Report;

use super::{CornerError, CubeObject};

/// Sign assignment on `2^k`, the ±1 shadow of the ring-spectrum diagram.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SignDiagram {
    k: usize,
    signs: BTreeMap<CubeObject, i8>,
}

impl SignDiagram {
    /// Takes every object of `2^k`; values must be ±1.
    pub fn new(k: usize, signs: BTreeMap<CubeObject, i8>) -> Result<Self, CornerError> {
        if signs.len() != 1 << k || signs.keys().any(|a| a.k() != k) {
            return Err(CornerError::InvalidSignDiagram(format!(
                "expected an assignment on all {} objects of 2^{k}",
                1u64 << k
            )));
        }
        if let Some((a, s)) = signs.iter().find(|(_, s)| s.abs() != 1) {
            return Err(CornerError::InvalidSignDiagram(format!("sign {s} at {a}")));
        }
        Ok(Self { k, signs })
    }

    /// Trivial diagram, `+1` everywhere.
    pub fn trivial(k: usize) -> Self {
        Self {
            k,
            signs: CubeObject::all(k).map(|a| (a, 1)).collect(),
        }
    }

    /// Diagram determined by a unit on each maximal run of ones: the value at
    /// `a` is the product of `unit(start, end)` over the runs `[start, end)` of `a`.
    pub fn from_block_units(k: usize, unit: impl Fn(usize, usize) -> i8) -> Result<Self, CornerError> {
        let mut signs = BTreeMap::new();
        for a in CubeObject::all(k) {
            let mut s = 1i8;
            let mut i = 0;
            while i < k {
                if a.get(i) {
                    let start = i;
                    while i < k && a.get(i) {
                        i += 1;
                    }
                    s *= unit(start, i);
                } else {
                    i += 1;
                }
            }
            signs.insert(a, s);
        }
        Self::new(k, signs)
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn sign(&self, a: &CubeObject) -> i64 {
        self.signs[a] as i64
    }

    pub fn set(&mut self, a: &CubeObject, s: i8) {
        if let Some(v) = self.signs.get_mut(a) {
            *v = s;
        }
    }

    /// `m_{k,r}`: the diagram on `2^{k+r}` with value `σ(a)·τ(b)` at `(a, b)`.
    pub fn pair(&self, other: &SignDiagram) -> SignDiagram {
        let mut signs = BTreeMap::new();
        for a in CubeObject::all(self.k) {
            for b in CubeObject::all(other.k) {
                signs.insert(a.concat(&b), self.signs[&a] * other.signs[&b]);
            }
        }
        SignDiagram {
            k: self.k + other.k,
            signs,
        }
    }
}

/// Unit at the minimal object, and splitting at every zero slot `i`:
/// `σ(a) = σ(a restricted to slots < i) · σ(a restricted to slots > i)`.
pub fn validate_sign_diagram(d: &SignDiagram) -> Report {
    let mut report = Report::new("sign diagram");
    let zero = CubeObject::zero(d.k());
    let unit = if d.sign(&zero) == 1 {
        Vec::new()
    } else {
        vec![format!("sign {} at the minimal object", d.sign(&zero))]
    };
    report.check("unit at minimal object", unit);
    let mut mult = Vec::new();
    for a in CubeObject::all(d.k()) {
        for i in (0..d.k()).filter(|&i| !a.get(i)) {
            let left = a.restrict(0..i);
            let right = a.restrict(i + 1..d.k());
            if d.sign(&a) != d.sign(&left) * d.sign(&right) {
                mult.push(format!("{a} does not split at slot {i}"));
            }
        }
    }
    report.check("multiplicative at zero slots", mult);
    report
}
