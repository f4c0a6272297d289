use serde::{Deserialize, Serialize};

use crate::coeff::bigint_json::{RawRows, Rows};
use crate::coeff::{complex_homology, CoefficientRing, HomologyGroup, IntegerMatrix};

use super::JError;

/// Based chain complex `C_0 <- C_1 <- ... <- C_n` of free abelian groups.
/// `boundary(i)` is `∂_i : C_i -> C_{i-1}`, shaped `|B_{i-1}| x |B_i|`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChainComplexData {
    bases: Vec<Vec<String>>,
    boundaries: Vec<IntegerMatrix>,
}

impl ChainComplexData {
    pub fn new(bases: Vec<Vec<String>>, boundaries: Vec<IntegerMatrix>) -> Result<Self, JError> {
        let expected = bases.len().saturating_sub(1);
        if boundaries.len() != expected {
            return Err(JError::Shape(format!(
                "{} chain groups need {expected} boundaries, got {}",
                bases.len(),
                boundaries.len()
            )));
        }
        for (k, d) in boundaries.iter().enumerate() {
            let i = k + 1;
            let want = (bases[i - 1].len(), bases[i].len());
            if d.shape() != want {
                return Err(JError::Shape(format!(
                    "boundary {i} is {}x{}, expected {}x{}",
                    d.rows(),
                    d.cols(),
                    want.0,
                    want.1
                )));
            }
        }
        for i in 2..=boundaries.len() {
            let comp = boundaries[i - 2].mul(&boundaries[i - 1])?;
            if !comp.is_zero() {
                return Err(JError::BoundaryCompositeNonzero { degree: i });
            }
        }
        Ok(Self { bases, boundaries })
    }

    /// Complex with a single empty chain group.
    pub fn zero() -> Self {
        Self {
            bases: vec![Vec::new()],
            boundaries: Vec::new(),
        }
    }

    /// Top degree `n`; `None` when there are no chain groups at all.
    pub fn top_degree(&self) -> Option<usize> {
        self.bases.len().checked_sub(1)
    }

    pub fn num_groups(&self) -> usize {
        self.bases.len()
    }

    pub fn bases(&self) -> &[Vec<String>] {
        &self.bases
    }

    pub fn basis(&self, i: usize) -> &[String] {
        self.bases.get(i).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn ranks(&self) -> Vec<usize> {
        self.bases.iter().map(Vec::len).collect()
    }

    /// `∂_i` for `1 <= i <= n`.
    pub fn boundary(&self, i: usize) -> Option<&IntegerMatrix> {
        i.checked_sub(1).and_then(|k| self.boundaries.get(k))
    }

    pub fn boundaries(&self) -> &[IntegerMatrix] {
        &self.boundaries
    }

    pub fn homology(&self, ring: &CoefficientRing) -> Result<Vec<HomologyGroup>, JError> {
        Ok(complex_homology(&self.ranks(), &self.boundaries, ring)?)
    }

    pub fn to_json(&self) -> serde_json::Value {
        #[derive(Serialize)]
        struct Out<'a> {
            bases: &'a [Vec<String>],
            boundaries: Vec<Rows<'a>>,
        }
        serde_json::to_value(Out {
            bases: &self.bases,
            boundaries: self.boundaries.iter().map(Rows).collect(),
        })
        .expect("complex serializes")
    }

    pub fn from_json(value: &serde_json::Value) -> Result<Self, JError> {
        #[derive(Deserialize)]
        struct In {
            bases: Vec<Vec<String>>,
            #[serde(default)]
            boundaries: Vec<RawRows>,
        }
        let raw: In = serde_json::from_value(value.clone()).map_err(|e| JError::Json(e.to_string()))?;
        let expected = raw.bases.len().saturating_sub(1);
        if raw.boundaries.len() != expected {
            return Err(JError::Shape(format!(
                "{} chain groups need {expected} boundaries, got {}",
                raw.bases.len(),
                raw.boundaries.len()
            )));
        }
        let boundaries = raw
            .boundaries
            .into_iter()
            .enumerate()
            .map(|(k, rows)| {
                IntegerMatrix::from_big_rows(raw.bases[k].len(), raw.bases[k + 1].len(), rows.0)
                    .map_err(JError::from)
            })
            .collect::<Result<Vec<_>, _>>()?;
        Self::new(raw.bases, boundaries)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn labels(prefix: &str, n: usize) -> Vec<String> {
        (0..n).map(|i| format!("{prefix}{i}")).collect()
    }

    #[test]
    fn rejects_nonzero_composite() {
        let d1 = IntegerMatrix::from_rows(&[[1]]).unwrap();
        let d2 = IntegerMatrix::from_rows(&[[1]]).unwrap();
        let err = ChainComplexData::new(vec![labels("a", 1), labels("b", 1), labels("c", 1)], vec![d1, d2]);
        assert_eq!(err.unwrap_err(), JError::BoundaryCompositeNonzero { degree: 2 });
    }

    #[test]
    fn rejects_bad_shapes() {
        let d1 = IntegerMatrix::zeros(2, 1);
        assert!(matches!(
            ChainComplexData::new(vec![labels("a", 1), labels("b", 1)], vec![d1]),
            Err(JError::Shape(_))
        ));
    }

    #[test]
    fn json_roundtrip_with_empty_groups() {
        let c = ChainComplexData::new(
            vec![labels("v", 1), vec![], labels("f", 2)],
            vec![IntegerMatrix::zeros(1, 0), IntegerMatrix::zeros(0, 2)],
        )
        .unwrap();
        let v = c.to_json();
        assert_eq!(v.to_string(), r#"{"bases":[["v0"],[],["f0","f1"]],"boundaries":[[[]],[]]}"#);
        assert_eq!(ChainComplexData::from_json(&v).unwrap(), c);
    }

    #[test]
    fn zero_complex() {
        let z = ChainComplexData::zero();
        assert_eq!(z.top_degree(), Some(0));
        assert_eq!(z.homology(&CoefficientRing::Integers).unwrap(), vec![HomologyGroup::default()]);
    }
}
