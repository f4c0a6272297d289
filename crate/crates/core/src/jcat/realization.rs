use std::collections::BTreeMap;

use serde::Serialize;

use crate::coeff::bigint_json::{RawRows, Rows};
use crate::coeff::{homology, CoefficientRing, HomologyGroup, IntegerMatrix};
use crate::report::Report;

use super::{ChainComplexData, JError};

/// Differential components `D_{p,q}`, `p > q`, keyed by `(p, q)`.
pub type Components = BTreeMap<(usize, usize), IntegerMatrix>;

/// One filtration level's contribution: a free summand on `basis` in internal degree `degree`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Level {
    pub degree: i64,
    pub basis: Vec<String>,
}

/// Filtered differential module `X_0 ⊆ X_1 ⊆ ... ⊆ X_n` over a coefficient
/// ring. The total differential is the block matrix of components `D_{p,q}`
/// lowering filtration from `p` to `q`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FilteredRealization {
    ring: CoefficientRing,
    levels: Vec<Level>,
    components: Components,
}

/// Builds the filtered object of `complex` with `D_{p,p-1} = ∂_p` and the supplied
/// higher components (missing ones are zero).
pub fn realize(
    complex: &ChainComplexData,
    ring: &CoefficientRing,
    higher: Option<&Components>,
) -> Result<FilteredRealization, JError> {
    ring.validate()?;
    let levels: Vec<Level> = complex
        .bases()
        .iter()
        .enumerate()
        .map(|(k, b)| Level {
            degree: k as i64,
            basis: b.clone(),
        })
        .collect();
    let ranks = complex.ranks();
    let mut components = Components::new();
    for p in 1..levels.len() {
        for q in 0..p {
            let m = if q + 1 == p {
                complex.boundary(p).cloned().expect("boundary exists for every level above 0")
            } else {
                IntegerMatrix::zeros(ranks[q], ranks[p])
            };
            components.insert((p, q), m);
        }
    }
    if let Some(higher) = higher {
        for (&(p, q), m) in higher {
            if p >= levels.len() || q + 2 > p {
                return Err(JError::Shape(format!(
                    "higher component ({p},{q}) must satisfy p >= q + 2 within {} levels",
                    levels.len()
                )));
            }
            if m.shape() != (ranks[q], ranks[p]) {
                return Err(JError::Shape(format!(
                    "component ({p},{q}) is {}x{}, expected {}x{}",
                    m.rows(),
                    m.cols(),
                    ranks[q],
                    ranks[p]
                )));
            }
            components.insert((p, q), m.clone());
        }
    }
    let x = FilteredRealization {
        ring: ring.clone(),
        levels,
        components,
    };
    if let Some(&(p, r)) = x.square_defects()?.first() {
        return Err(JError::TotalDifferentialSquareNonzero { p, r });
    }
    Ok(x)
}

impl FilteredRealization {
    pub fn ring(&self) -> &CoefficientRing {
        &self.ring
    }

    pub fn levels(&self) -> &[Level] {
        &self.levels
    }

    pub fn components(&self) -> &Components {
        &self.components
    }

    pub fn component(&self, p: usize, q: usize) -> Option<&IntegerMatrix> {
        self.components.get(&(p, q))
    }

    /// Overwrites one component without re-checking the differential; use
    /// [`check_realization`] to diagnose the result.
    pub fn set_component(&mut self, p: usize, q: usize, m: IntegerMatrix) -> Result<(), JError> {
        let want = match (self.levels.get(q), self.levels.get(p)) {
            (Some(lq), Some(lp)) if p > q => (lq.basis.len(), lp.basis.len()),
            _ => return Err(JError::Shape(format!("no component ({p},{q})"))),
        };
        if m.shape() != want {
            return Err(JError::Shape(format!(
                "component ({p},{q}) must be {}x{}",
                want.0, want.1
            )));
        }
        self.components.insert((p, q), m);
        Ok(())
    }

    fn offsets(&self) -> Vec<usize> {
        let mut acc = 0;
        let mut out = Vec::with_capacity(self.levels.len() + 1);
        for l in &self.levels {
            out.push(acc);
            acc += l.basis.len();
        }
        out.push(acc);
        out
    }

    /// Block matrix of the total differential on `⊕_p C_p`.
    pub fn total_differential(&self) -> IntegerMatrix {
        let off = self.offsets();
        let n = *off.last().unwrap_or(&0);
        let mut d = IntegerMatrix::zeros(n, n);
        for (&(p, q), m) in &self.components {
            for r in 0..m.rows() {
                for c in 0..m.cols() {
                    d.set(off[q] + r, off[p] + c, m.get(r, c).clone());
                }
            }
        }
        d
    }

    /// Pairs `(p, r)` where `Σ_{p>q>r} D_{q,r} D_{p,q} ≠ 0`.
    pub fn square_defects(&self) -> Result<Vec<(usize, usize)>, JError> {
        let n = self.levels.len();
        let mut bad = Vec::new();
        for p in 0..n {
            for r in 0..p {
                let mut acc = IntegerMatrix::zeros(self.levels[r].basis.len(), self.levels[p].basis.len());
                for q in r + 1..p {
                    let (Some(dpq), Some(dqr)) = (self.components.get(&(p, q)), self.components.get(&(q, r)))
                    else {
                        continue;
                    };
                    let prod = dqr.mul(dpq)?;
                    let mut sum = IntegerMatrix::zeros(acc.rows(), acc.cols());
                    for i in 0..acc.rows() {
                        for j in 0..acc.cols() {
                            sum.set(i, j, acc.get(i, j) + prod.get(i, j));
                        }
                    }
                    acc = sum;
                }
                if !acc.is_zero() {
                    bad.push((p, r));
                }
            }
        }
        Ok(bad)
    }

    pub fn has_higher_components(&self) -> bool {
        self.components
            .iter()
            .any(|(&(p, q), m)| q + 1 < p && !m.is_zero())
    }

    /// Homology of the total differential as a single (ungraded) module.
    pub fn total_homology(&self) -> Result<HomologyGroup, JError> {
        let d = self.total_differential();
        Ok(homology(&d, &d, &self.ring)?)
    }

    /// Degreewise homology read off the total differential; only defined when
    /// all higher components vanish, so that the total differential is graded.
    pub fn graded_total_homology(&self) -> Result<Option<Vec<HomologyGroup>>, JError> {
        if self.has_higher_components() {
            return Ok(None);
        }
        let d = self.total_differential();
        let off = self.offsets();
        let range = |k: usize| -> Vec<usize> { (off[k]..off[k + 1]).collect() };
        let n = self.levels.len();
        let mut out = Vec::with_capacity(n);
        for k in 0..n {
            let here = range(k);
            let d_in = if k + 1 < n {
                d.select(&here, &range(k + 1))
            } else {
                IntegerMatrix::zeros(here.len(), 0)
            };
            let d_out = if k > 0 {
                d.select(&range(k - 1), &here)
            } else {
                IntegerMatrix::zeros(0, here.len())
            };
            out.push(homology(&d_in, &d_out, &self.ring)?);
        }
        Ok(Some(out))
    }

    pub fn to_json(&self) -> serde_json::Value {
        let bases: Vec<&Vec<String>> = self.levels.iter().map(|l| &l.basis).collect();
        let components: BTreeMap<String, Rows> = self
            .components
            .iter()
            .map(|(&(p, q), m)| (format!("{p},{q}"), Rows(m)))
            .collect();
        serde_json::json!({
            "ring": self.ring.to_string(),
            "bases": bases,
            "components": components,
        })
    }

    pub fn from_json(value: &serde_json::Value) -> Result<Self, JError> {
        let ring: CoefficientRing = value
            .get("ring")
            .and_then(|r| r.as_str())
            .ok_or_else(|| JError::Json("missing ring".into()))?
            .parse()?;
        let bases: Vec<Vec<String>> = serde_json::from_value(
            value.get("bases").cloned().ok_or_else(|| JError::Json("missing bases".into()))?,
        )
        .map_err(|e| JError::Json(e.to_string()))?;
        let levels: Vec<Level> = bases
            .into_iter()
            .enumerate()
            .map(|(k, basis)| Level {
                degree: k as i64,
                basis,
            })
            .collect();
        let ranks: Vec<usize> = levels.iter().map(|l| l.basis.len()).collect();
        let components = parse_components(value.get("components"), &ranks)?;
        Ok(Self {
            ring,
            levels,
            components,
        })
    }
}

/// Reads a `{"p,q": rows}` map, shaping each matrix against `ranks`.
pub fn parse_components(value: Option<&serde_json::Value>, ranks: &[usize]) -> Result<Components, JError> {
    let mut out = Components::new();
    let Some(value) = value else {
        return Ok(out);
    };
    let map: BTreeMap<String, RawRows> =
        serde_json::from_value(value.clone()).map_err(|e| JError::Json(e.to_string()))?;
    for (key, rows) in map {
        let (p, q) = key
            .split_once(',')
            .and_then(|(p, q)| Some((p.trim().parse::<usize>().ok()?, q.trim().parse::<usize>().ok()?)))
            .ok_or_else(|| JError::Json(format!("bad component key {key:?}")))?;
        if p <= q || p >= ranks.len() {
            return Err(JError::Shape(format!("component key {key:?} out of range")));
        }
        out.insert((p, q), IntegerMatrix::from_big_rows(ranks[q], ranks[p], rows.0)?);
    }
    Ok(out)
}

/// Checks the two realization conditions against `complex`: every subquotient
/// is free on the right basis in the right degree, and every adjacent
/// component equals `∂ ⊗ 1` entrywise over the ring.
pub fn check_realization(x: &FilteredRealization, complex: &ChainComplexData) -> Report {
    let mut report = Report::new("realization");
    let ring = x.ring();

    let mut sub = Vec::new();
    if x.levels().len() != complex.num_groups() {
        sub.push(format!(
            "{} filtration levels for {} chain groups",
            x.levels().len(),
            complex.num_groups()
        ));
    }
    for (k, level) in x.levels().iter().enumerate() {
        if level.degree != k as i64 {
            sub.push(format!("level {k} sits in degree {}", level.degree));
        }
        if level.basis.as_slice() != complex.basis(k) {
            sub.push(format!("level {k} basis {:?} differs from {:?}", level.basis, complex.basis(k)));
        }
    }
    report.check("subquotients free on bases", sub);

    let mut attach = Vec::new();
    for i in 1..complex.num_groups() {
        let expected = complex.boundary(i).expect("boundary in range");
        let Some(got) = x.component(i, i - 1) else {
            attach.push(format!("component ({i},{}) missing", i - 1));
            continue;
        };
        if got.shape() != expected.shape() {
            attach.push(format!(
                "component ({i},{}) is {}x{}, boundary is {}x{}",
                i - 1,
                got.rows(),
                got.cols(),
                expected.rows(),
                expected.cols()
            ));
            continue;
        }
        for r in 0..got.rows() {
            for c in 0..got.cols() {
                let (a, b) = (ring.reduce(got.get(r, c)), ring.reduce(expected.get(r, c)));
                if a != b {
                    attach.push(format!("D[{i},{}] entry ({r},{c}): {a} != {b}", i - 1));
                }
            }
        }
    }
    report.check("attaching maps equal boundary", attach);

    let sq = match x.square_defects() {
        Ok(v) => v.into_iter().map(|(p, r)| format!("D^2 nonzero from level {p} to {r}")).collect(),
        Err(e) => vec![e.to_string()],
    };
    report.check("total differential squares to zero", sq);
    report
}

#[cfg(test)]
mod tests {
    use super::*;

    fn labels(prefix: &str, n: usize) -> Vec<String> {
        (0..n).map(|i| format!("{prefix}{i}")).collect()
    }

    fn torus_complex() -> ChainComplexData {
        ChainComplexData::new(
            vec![labels("m", 1), labels("s", 2), labels("M", 1)],
            vec![IntegerMatrix::zeros(1, 2), IntegerMatrix::zeros(2, 1)],
        )
        .unwrap()
    }

    #[test]
    fn torus_realization_passes() {
        let c = torus_complex();
        let x = realize(&c, &CoefficientRing::Integers, None).unwrap();
        assert!(x.total_differential().is_zero());
        let report = check_realization(&x, &c);
        assert!(report.passed(), "{report}");
        let hs = x.graded_total_homology().unwrap().unwrap();
        assert_eq!(hs, c.homology(&CoefficientRing::Integers).unwrap());
    }

    #[test]
    fn acyclic_two_term_complex() {
        let c = ChainComplexData::new(
            vec![labels("a", 1), labels("b", 1)],
            vec![IntegerMatrix::from_rows(&[[1]]).unwrap()],
        )
        .unwrap();
        let x = realize(&c, &CoefficientRing::Integers, None).unwrap();
        assert!(check_realization(&x, &c).passed());
        assert!(x.total_homology().unwrap().is_trivial());
        let hs = x.graded_total_homology().unwrap().unwrap();
        assert!(hs.iter().all(HomologyGroup::is_trivial));
    }

    #[test]
    fn tampered_component_is_reported_at_its_entry() {
        let c = torus_complex();
        let mut x = realize(&c, &CoefficientRing::Integers, None).unwrap();
        x.set_component(2, 1, IntegerMatrix::from_rows(&[[0], [1]]).unwrap()).unwrap();
        let report = check_realization(&x, &c);
        assert!(!report.passed());
        assert_eq!(report.failures_of("attaching maps equal boundary"), ["D[2,1] entry (1,0): 1 != 0"]);
        assert!(report.outcome("total differential squares to zero").unwrap().passed);
    }

    #[test]
    fn empty_complex_passes_vacuously() {
        let c = ChainComplexData::zero();
        let x = realize(&c, &CoefficientRing::Rationals, None).unwrap();
        assert!(check_realization(&x, &c).passed());
    }

    #[test]
    fn higher_components_must_square_to_zero() {
        let ones = |n| (0..n).map(|_| IntegerMatrix::zeros(1, 1)).collect::<Vec<_>>();
        let c = ChainComplexData::new(
            vec![labels("a", 1), labels("b", 1), labels("c", 1)],
            ones(2),
        )
        .unwrap();
        let mut higher = Components::new();
        higher.insert((2, 0), IntegerMatrix::from_rows(&[[3]]).unwrap());
        let x = realize(&c, &CoefficientRing::Integers, Some(&higher)).unwrap();
        assert!(x.has_higher_components());
        assert!(x.graded_total_homology().unwrap().is_none());
        assert_eq!(x.total_homology().unwrap(), HomologyGroup::with_torsion(1, &[3]));

        // D_{2,0} D_{3,2} = 1 with ∂_3 = 1
        let mut d = ones(3);
        d[2] = IntegerMatrix::from_rows(&[[1]]).unwrap();
        let c3 = ChainComplexData::new(
            vec![labels("a", 1), labels("b", 1), labels("c", 1), labels("d", 1)],
            d,
        )
        .unwrap();
        let mut bad = Components::new();
        bad.insert((2, 0), IntegerMatrix::from_rows(&[[1]]).unwrap());
        assert_eq!(
            realize(&c3, &CoefficientRing::Integers, Some(&bad)).unwrap_err(),
            JError::TotalDifferentialSquareNonzero { p: 3, r: 0 }
        );
        // with ∂_1 = 1, D_{3,1} = -1 cancels it
        bad.insert((3, 1), IntegerMatrix::from_rows(&[[-1]]).unwrap());
        let mut d = ones(3);
        d[0] = IntegerMatrix::from_rows(&[[1]]).unwrap();
        d[2] = IntegerMatrix::from_rows(&[[1]]).unwrap();
        let c3 = ChainComplexData::new(
            vec![labels("a", 1), labels("b", 1), labels("c", 1), labels("d", 1)],
            d,
        )
        .unwrap();
        let x = realize(&c3, &CoefficientRing::Integers, Some(&bad)).unwrap();
        assert!(check_realization(&x, &c3).passed());
    }

    #[test]
    fn json_roundtrip() {
        let c = torus_complex();
        let mut higher = Components::new();
        higher.insert((2, 0), IntegerMatrix::from_rows(&[[5]]).unwrap());
        let x = realize(&c, &CoefficientRing::modular(3).unwrap(), Some(&higher)).unwrap();
        let v = x.to_json();
        assert_eq!(v["components"]["2,0"], serde_json::json!([[5]]));
        assert_eq!(FilteredRealization::from_json(&v).unwrap(), x);
    }

    #[test]
    fn adjacent_keys_are_not_higher() {
        let c = torus_complex();
        let mut h = Components::new();
        h.insert((2, 1), IntegerMatrix::zeros(2, 1));
        assert!(matches!(realize(&c, &CoefficientRing::Integers, Some(&h)), Err(JError::Shape(_))));
    }
}
