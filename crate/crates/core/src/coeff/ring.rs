use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use super::CoeffError;

/// Coefficient ring standing in for the coefficients of a ring spectrum.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "camelCase")]
pub enum CoefficientRing {
    Integers,
    ModularIntegers {
        modulus: u64,
    },
    Rationals,
    /// `Z[b, 1/b]` with `|b| = generator_degree`, truncated to the powers
    /// `-truncation ..= truncation` of `b`.
    #[serde(rename_all = "camelCase")]
    LaurentGraded {
        generator_degree: u32,
        truncation: u32,
    },
}

impl CoefficientRing {
    pub fn modular(m: u64) -> Result<Self, CoeffError> {
        if m < 2 {
            return Err(CoeffError::InvalidRing(format!("modulus must be >= 2, got {m}")));
        }
        Ok(Self::ModularIntegers { modulus: m })
    }

    pub fn laurent(generator_degree: u32, truncation: u32) -> Result<Self, CoeffError> {
        if generator_degree == 0 || !generator_degree.is_multiple_of(2) {
            return Err(CoeffError::InvalidRing(format!(
                "generator degree must be a positive even integer, got {generator_degree}"
            )));
        }
        if truncation == 0 {
            return Err(CoeffError::InvalidRing("truncation must be positive".into()));
        }
        Ok(Self::LaurentGraded {
            generator_degree,
            truncation,
        })
    }

    /// Re-checks the invariants; used after deserialization.
    pub fn validate(&self) -> Result<(), CoeffError> {
        match *self {
            Self::ModularIntegers { modulus } => Self::modular(modulus).map(|_| ()),
            Self::LaurentGraded {
                generator_degree,
                truncation,
            } => Self::laurent(generator_degree, truncation).map(|_| ()),
            _ => Ok(()),
        }
    }

    pub fn is_field(&self) -> bool {
        match *self {
            Self::Rationals => true,
            Self::ModularIntegers { modulus } => is_prime(modulus),
            _ => false,
        }
    }

    /// Image of an integer in the ring (as an integer representative).
    pub fn reduce(&self, x: &BigInt) -> BigInt {
        match *self {
            Self::ModularIntegers { modulus } => x.mod_floor(&BigInt::from(modulus)),
            _ => x.clone(),
        }
    }

    /// Powers of the periodicity generator present in the window; `[0]` for ungraded rings.
    pub fn window_powers(&self) -> Vec<i64> {
        match *self {
            Self::LaurentGraded { truncation, .. } => {
                let h = i64::from(truncation);
                (-h..=h).collect()
            }
            _ => vec![0],
        }
    }

    pub fn generator_degree(&self) -> Option<i64> {
        match *self {
            Self::LaurentGraded {
                generator_degree, ..
            } => Some(i64::from(generator_degree)),
            _ => None,
        }
    }

    /// The monomial `b^power` of a Laurent window.
    pub fn monomial(&self, power: i64) -> Result<LaurentElement, CoeffError> {
        LaurentElement::monomial(self, BigInt::from(1), power)
    }
}

impl fmt::Display for CoefficientRing {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Integers => write!(f, "z"),
            Self::ModularIntegers { modulus } => write!(f, "zmod:{modulus}"),
            Self::Rationals => write!(f, "q"),
            Self::LaurentGraded {
                generator_degree,
                truncation,
            } => write!(f, "laurent:{generator_degree}:{truncation}"),
        }
    }
}

impl FromStr for CoefficientRing {
    type Err = CoeffError;

    /// Parses `z`, `q`, `zmod:M` or `laurent:D:W`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let parts: Vec<&str> = s.trim().split(':').collect();
        let num = |p: &str| {
            p.parse::<u64>()
                .map_err(|_| CoeffError::InvalidRing(format!("bad number {p:?} in ring {s:?}")))
        };
        match parts.as_slice() {
            ["z"] | ["Z"] => Ok(Self::Integers),
            ["q"] | ["Q"] => Ok(Self::Rationals),
            ["zmod", m] => Self::modular(num(m)?),
            ["laurent", d, w] => {
                let d = u32::try_from(num(d)?).map_err(|_| CoeffError::InvalidRing(s.into()))?;
                let w = u32::try_from(num(w)?).map_err(|_| CoeffError::InvalidRing(s.into()))?;
                Self::laurent(d, w)
            }
            _ => Err(CoeffError::InvalidRing(format!(
                "unknown ring {s:?}; expected z, q, zmod:M or laurent:D:W"
            ))),
        }
    }
}

fn is_prime(m: u64) -> bool {
    if m < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= m {
        if m.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

/// Element of a truncated Laurent ring; every operation either stays inside
/// the power window or fails with [`CoeffError::WindowOverflow`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LaurentElement {
    generator_degree: u32,
    truncation: u32,
    coeffs: BTreeMap<i64, BigInt>,
}

impl LaurentElement {
    fn window(ring: &CoefficientRing) -> Result<(u32, u32), CoeffError> {
        match *ring {
            CoefficientRing::LaurentGraded {
                generator_degree,
                truncation,
            } => Ok((generator_degree, truncation)),
            ref other => Err(CoeffError::InvalidRing(format!(
                "{other} has no Laurent generator"
            ))),
        }
    }

    pub fn zero(ring: &CoefficientRing) -> Result<Self, CoeffError> {
        let (generator_degree, truncation) = Self::window(ring)?;
        Ok(Self {
            generator_degree,
            truncation,
            coeffs: BTreeMap::new(),
        })
    }

    pub fn monomial(ring: &CoefficientRing, coeff: BigInt, power: i64) -> Result<Self, CoeffError> {
        let mut e = Self::zero(ring)?;
        e.check_power(power)?;
        if !coeff.is_zero() {
            e.coeffs.insert(power, coeff);
        }
        Ok(e)
    }

    fn check_power(&self, power: i64) -> Result<(), CoeffError> {
        if power.abs() > i64::from(self.truncation) {
            return Err(CoeffError::WindowOverflow {
                power,
                truncation: self.truncation,
            });
        }
        Ok(())
    }

    fn same_ring(&self, other: &Self) -> Result<(), CoeffError> {
        if (self.generator_degree, self.truncation) != (other.generator_degree, other.truncation) {
            return Err(CoeffError::InvalidRing("Laurent elements from different windows".into()));
        }
        Ok(())
    }

    pub fn coefficient(&self, power: i64) -> BigInt {
        self.coeffs.get(&power).cloned().unwrap_or_default()
    }

    /// Internal degrees `power * |b|` carrying nonzero coefficients.
    pub fn degrees(&self) -> Vec<i64> {
        self.coeffs
            .keys()
            .map(|p| p * i64::from(self.generator_degree))
            .collect()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn add(&self, other: &Self) -> Result<Self, CoeffError> {
        self.same_ring(other)?;
        let mut out = self.clone();
        for (p, c) in &other.coeffs {
            let e = out.coeffs.entry(*p).or_default();
            *e += c;
            if e.is_zero() {
                out.coeffs.remove(p);
            }
        }
        Ok(out)
    }

    pub fn mul(&self, other: &Self) -> Result<Self, CoeffError> {
        self.same_ring(other)?;
        let mut out = Self {
            coeffs: BTreeMap::new(),
            ..self.clone()
        };
        for (p, a) in &self.coeffs {
            for (q, b) in &other.coeffs {
                let power = p + q;
                out.check_power(power)?;
                let e = out.coeffs.entry(power).or_default();
                *e += a * b;
            }
        }
        out.coeffs.retain(|_, c| !c.is_zero());
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_display_roundtrip() {
        for s in ["z", "q", "zmod:6", "laurent:2:3"] {
            let r: CoefficientRing = s.parse().unwrap();
            assert_eq!(r.to_string(), s);
        }
        assert!("zmod:1".parse::<CoefficientRing>().is_err());
        assert!("laurent:3:2".parse::<CoefficientRing>().is_err());
        assert!("laurent:2:0".parse::<CoefficientRing>().is_err());
        assert!("r".parse::<CoefficientRing>().is_err());
    }

    #[test]
    fn fields() {
        assert!(CoefficientRing::Rationals.is_field());
        assert!(CoefficientRing::modular(7).unwrap().is_field());
        assert!(!CoefficientRing::modular(6).unwrap().is_field());
        assert!(!CoefficientRing::Integers.is_field());
    }

    #[test]
    fn laurent_window_is_enforced() {
        let ring = CoefficientRing::laurent(2, 2).unwrap();
        let b = ring.monomial(1).unwrap();
        let b2 = b.mul(&b).unwrap();
        assert_eq!(b2.degrees(), vec![4]);
        assert!(matches!(
            b2.mul(&b),
            Err(CoeffError::WindowOverflow { power: 3, truncation: 2 })
        ));
        let binv = ring.monomial(-1).unwrap();
        let one = b.mul(&binv).unwrap();
        assert_eq!(one.coefficient(0), BigInt::from(1));
        assert!(ring.monomial(-3).is_err());
        let sum = b.add(&binv).unwrap().add(&b).unwrap();
        assert_eq!(sum.coefficient(1), BigInt::from(2));
        assert!(CoefficientRing::Integers.monomial(0).is_err());
    }

    #[test]
    fn modular_reduction_is_nonnegative() {
        let r = CoefficientRing::modular(5).unwrap();
        assert_eq!(r.reduce(&BigInt::from(-7)), BigInt::from(3));
        assert_eq!(CoefficientRing::Integers.reduce(&BigInt::from(-7)), BigInt::from(-7));
    }
}
