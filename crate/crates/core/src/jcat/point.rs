use std::fmt;

use num_rational::BigRational;
use num_traits::{Signed, Zero};

use super::JError;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum JPayload {
    /// The basepoint of the one-point compactification.
    Infinity,
    /// `t_i` for `i = target+1 .. source-1`, in increasing `i`.
    Coords(Vec<BigRational>),
}

/// A morphism `source -> target` of the category J, `source >= target`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct JPoint {
    source: i64,
    target: i64,
    payload: JPayload,
}

impl JPoint {
    pub fn identity(n: i64) -> Self {
        Self {
            source: n,
            target: n,
            payload: JPayload::Coords(Vec::new()),
        }
    }

    /// The basepoint of `J(n,m)^+`; only exists for `n > m`.
    pub fn infinity(n: i64, m: i64) -> Result<Self, JError> {
        if n <= m {
            return Err(JError::InvalidMorphism(format!(
                "J({n},{m}) has no basepoint"
            )));
        }
        Ok(Self {
            source: n,
            target: m,
            payload: JPayload::Infinity,
        })
    }

    /// A finite point of `J(n,m)` with `coords[k] = t_{m+1+k}`.
    pub fn new(n: i64, m: i64, coords: Vec<BigRational>) -> Result<Self, JError> {
        if n < m {
            return Err(JError::InvalidMorphism(format!("no morphisms {n} -> {m}")));
        }
        let expected = if n == m { 0 } else { (n - m - 1) as usize };
        if coords.len() != expected {
            return Err(JError::InvalidMorphism(format!(
                "J({n},{m}) has {expected} coordinates, got {}",
                coords.len()
            )));
        }
        if let Some(c) = coords.iter().find(|c| c.is_negative()) {
            return Err(JError::NegativeCoordinate(c.to_string()));
        }
        Ok(Self {
            source: n,
            target: m,
            payload: JPayload::Coords(coords),
        })
    }

    /// Builds a point from `(i, t_i)` pairs; indices must lie strictly inside `(m, n)`.
    pub fn from_sparse(n: i64, m: i64, entries: &[(i64, BigRational)]) -> Result<Self, JError> {
        if n < m {
            return Err(JError::InvalidMorphism(format!("no morphisms {n} -> {m}")));
        }
        let len = if n == m { 0 } else { (n - m - 1) as usize };
        let mut coords = vec![BigRational::zero(); len];
        for (i, t) in entries {
            if *i <= m || *i >= n {
                return Err(JError::IndexOutOfRange { index: *i, low: m, high: n });
            }
            coords[(*i - m - 1) as usize] = t.clone();
        }
        Self::new(n, m, coords)
    }

    pub fn source(&self) -> i64 {
        self.source
    }

    pub fn target(&self) -> i64 {
        self.target
    }

    pub fn payload(&self) -> &JPayload {
        &self.payload
    }

    pub fn is_infinity(&self) -> bool {
        matches!(self.payload, JPayload::Infinity)
    }

    pub fn is_identity(&self) -> bool {
        self.source == self.target
    }

    /// `t_i`, zero outside the support window; `None` at the basepoint.
    pub fn coordinate(&self, i: i64) -> Option<BigRational> {
        match &self.payload {
            JPayload::Infinity => None,
            JPayload::Coords(c) => {
                if i > self.target && i < self.source {
                    Some(c[(i - self.target - 1) as usize].clone())
                } else {
                    Some(BigRational::zero())
                }
            }
        }
    }
}

impl fmt::Display for JPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.payload {
            JPayload::Infinity => write!(f, "J({},{})[inf]", self.source, self.target),
            JPayload::Coords(c) => {
                write!(f, "J({},{})(", self.source, self.target)?;
                for (k, t) in c.iter().enumerate() {
                    if k > 0 {
                        write!(f, ", ")?;
                    }
                    write!(f, "t{}={}", self.target + 1 + k as i64, t)?;
                }
                write!(f, ")")
            }
        }
    }
}

/// Composite of `g : n -> m` after `f : m -> p`, by addition of sequences.
pub fn compose(g: &JPoint, f: &JPoint) -> Result<JPoint, JError> {
    if g.target != f.source {
        return Err(JError::SourceTargetMismatch {
            outer_target: g.target,
            inner_source: f.source,
        });
    }
    if g.is_identity() {
        return Ok(f.clone());
    }
    if f.is_identity() {
        return Ok(g.clone());
    }
    let (n, p) = (g.source, f.target);
    match (&g.payload, &f.payload) {
        (JPayload::Coords(gc), JPayload::Coords(fc)) => {
            // supports (p,m) and (m,n) are disjoint; t_m stays zero
            let mut coords = Vec::with_capacity((n - p - 1) as usize);
            coords.extend(fc.iter().cloned());
            coords.push(BigRational::zero());
            coords.extend(gc.iter().cloned());
            JPoint::new(n, p, coords)
        }
        _ => JPoint::infinity(n, p),
    }
}

/// Whether `x` lies in the image of `J(n,m) x J(m,p) -> J(n,p)`, i.e. `t_m = 0`.
pub fn in_face_image(x: &JPoint, m: i64) -> Result<bool, JError> {
    if m <= x.target || m >= x.source {
        return Err(JError::IndexOutOfRange {
            index: m,
            low: x.target,
            high: x.source,
        });
    }
    Ok(x.coordinate(m).is_some_and(|t| t.is_zero()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn disjoint_support_addition() {
        let g = JPoint::from_sparse(5, 3, &[(4, q(3, 2))]).unwrap();
        let f = JPoint::from_sparse(3, 1, &[(2, q(1, 4))]).unwrap();
        let h = compose(&g, &f).unwrap();
        assert_eq!((h.source(), h.target()), (5, 1));
        assert_eq!(h.payload(), &JPayload::Coords(vec![q(1, 4), q(0, 1), q(3, 2)]));
    }

    #[test]
    fn basepoint_absorbs() {
        let g = JPoint::infinity(5, 3).unwrap();
        let f = JPoint::from_sparse(3, 1, &[(2, q(1, 4))]).unwrap();
        assert!(compose(&g, &f).unwrap().is_infinity());
        let g = JPoint::from_sparse(5, 3, &[]).unwrap();
        let f = JPoint::infinity(3, 1).unwrap();
        assert!(compose(&g, &f).unwrap().is_infinity());
    }

    #[test]
    fn adjacent_structure_maps_compose_into_face() {
        let g = JPoint::new(2, 1, vec![]).unwrap();
        let f = JPoint::new(1, 0, vec![]).unwrap();
        let h = compose(&g, &f).unwrap();
        assert_eq!(h.payload(), &JPayload::Coords(vec![q(0, 1)]));
        assert!(in_face_image(&h, 1).unwrap());
    }

    #[test]
    fn identities_are_units() {
        let x = JPoint::from_sparse(4, 0, &[(1, q(2, 1)), (3, q(5, 7))]).unwrap();
        assert_eq!(compose(&JPoint::identity(4), &x).unwrap(), x);
        assert_eq!(compose(&x, &JPoint::identity(0)).unwrap(), x);
        assert!(JPoint::infinity(3, 3).is_err());
    }

    #[test]
    fn mismatch_and_range_errors() {
        let g = JPoint::new(5, 3, vec![q(1, 1)]).unwrap();
        let f = JPoint::new(2, 0, vec![q(1, 1)]).unwrap();
        assert!(matches!(compose(&g, &f), Err(JError::SourceTargetMismatch { .. })));
        let x = JPoint::from_sparse(5, 1, &[(2, q(1, 4)), (4, q(3, 2))]).unwrap();
        assert!(in_face_image(&x, 3).unwrap());
        assert!(!in_face_image(&x, 2).unwrap());
        assert!(matches!(in_face_image(&x, 1), Err(JError::IndexOutOfRange { .. })));
        assert!(matches!(in_face_image(&x, 5), Err(JError::IndexOutOfRange { .. })));
        assert!(!in_face_image(&JPoint::infinity(5, 1).unwrap(), 3).unwrap());
        assert!(JPoint::from_sparse(5, 1, &[(1, q(1, 1))]).is_err());
        assert!(matches!(JPoint::new(3, 1, vec![q(-1, 2)]), Err(JError::NegativeCoordinate(_))));
    }
}
