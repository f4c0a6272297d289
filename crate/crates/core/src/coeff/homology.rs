use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::One;
use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use super::matrix::bigint_json::Big;
use super::smith::invariant_factors;
use super::{CoeffError, CoefficientRing, IntegerMatrix};

/// A finitely generated module presented as `R^free ⊕ ⊕ R/(d_j)`.
///
/// Over `Z` and `Q` the free part is a genuine free rank. Over `Z/m` it counts
/// the summands isomorphic to `Z/m` itself and `torsion` lists the proper
/// cyclic summands, so over a prime field it is just the dimension.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct HomologyGroup {
    pub free_rank: usize,
    pub torsion: Vec<BigInt>,
}

impl HomologyGroup {
    pub fn free(rank: usize) -> Self {
        Self {
            free_rank: rank,
            torsion: Vec::new(),
        }
    }

    pub fn with_torsion(rank: usize, torsion: &[i64]) -> Self {
        Self {
            free_rank: rank,
            torsion: torsion.iter().map(|&t| BigInt::from(t)).collect(),
        }
    }

    pub fn is_trivial(&self) -> bool {
        self.free_rank == 0 && self.torsion.is_empty()
    }

    pub fn divisibility_chain_holds(&self) -> bool {
        self.torsion.iter().all(|d| *d >= BigInt::from(2))
            && self.torsion.windows(2).all(|w| w[1].is_multiple_of(&w[0]))
    }

    /// Direct sum, renormalized to invariant-factor form.
    pub fn direct_sum(&self, other: &HomologyGroup) -> HomologyGroup {
        let orders: Vec<BigInt> = self.torsion.iter().chain(&other.torsion).cloned().collect();
        HomologyGroup {
            free_rank: self.free_rank + other.free_rank,
            torsion: normalize_cyclic(&orders),
        }
    }

    /// Human-readable form such as `Z^2 + Z/2`.
    pub fn describe(&self, ring: &CoefficientRing) -> String {
        let base = match ring {
            CoefficientRing::Integers | CoefficientRing::LaurentGraded { .. } => "Z".to_string(),
            CoefficientRing::Rationals => "Q".to_string(),
            CoefficientRing::ModularIntegers { modulus } => format!("Z/{modulus}"),
        };
        let mut parts = Vec::new();
        match self.free_rank {
            0 => {}
            1 => parts.push(base.clone()),
            r => parts.push(format!("({base})^{r}")),
        }
        parts.extend(self.torsion.iter().map(|d| format!("Z/{d}")));
        if parts.is_empty() {
            "0".into()
        } else {
            parts.join(" + ")
        }
    }
}

impl Serialize for HomologyGroup {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("HomologyGroup", 2)?;
        st.serialize_field("freeRank", &self.free_rank)?;
        let t: Vec<Big> = self.torsion.iter().map(Big).collect();
        st.serialize_field("torsion", &t)?;
        st.end()
    }
}

/// Invariant factors (> 1) of `⊕ Z/(orders)`, via the Smith form of the diagonal.
fn normalize_cyclic(orders: &[BigInt]) -> Vec<BigInt> {
    let diag: Vec<BigInt> = orders.iter().filter(|d| !d.is_one()).cloned().collect();
    if diag.is_empty() {
        return Vec::new();
    }
    let m = IntegerMatrix::diagonal(diag.len(), diag.len(), &diag);
    invariant_factors(&m).into_iter().filter(|d| !d.is_one()).collect()
}

fn check_pair(d_in: &IntegerMatrix, d_out: &IntegerMatrix) -> Result<(), CoeffError> {
    if d_out.cols() != d_in.rows() {
        return Err(CoeffError::DimensionMismatch(format!(
            "outgoing boundary has {} columns but incoming boundary has {} rows",
            d_out.cols(),
            d_in.rows()
        )));
    }
    if !d_out.mul(d_in)?.is_zero() {
        return Err(CoeffError::CompositeNonzero);
    }
    Ok(())
}

/// Integral homology at the middle term of `C_{k+1} --d_in--> C_k --d_out--> C_{k-1}`,
/// together with the torsion of the next-lower group (needed for Tor terms).
struct IntegralPiece {
    free_rank: usize,
    torsion: Vec<BigInt>,
    lower_torsion: Vec<BigInt>,
}

fn integral_piece(d_in: &IntegerMatrix, d_out: &IntegerMatrix) -> IntegralPiece {
    let n = d_in.rows();
    let in_factors = invariant_factors(d_in);
    let out_factors = invariant_factors(d_out);
    IntegralPiece {
        free_rank: n - out_factors.len() - in_factors.len(),
        torsion: in_factors.into_iter().filter(|d| !d.is_one()).collect(),
        lower_torsion: out_factors.into_iter().filter(|d| !d.is_one()).collect(),
    }
}

/// `H = ker(d_out) / im(d_in)` with coefficients in `ring`, computed over `Z`
/// through Smith forms and converted by universal coefficients. For a Laurent
/// window the result is the sum over all window degrees; see
/// [`graded_homology`] for the per-degree pieces.
pub fn homology(
    d_in: &IntegerMatrix,
    d_out: &IntegerMatrix,
    ring: &CoefficientRing,
) -> Result<HomologyGroup, CoeffError> {
    check_pair(d_in, d_out)?;
    let piece = integral_piece(d_in, d_out);
    Ok(match *ring {
        CoefficientRing::Integers => HomologyGroup {
            free_rank: piece.free_rank,
            torsion: piece.torsion,
        },
        CoefficientRing::Rationals => HomologyGroup::free(piece.free_rank),
        CoefficientRing::ModularIntegers { modulus } => {
            let m = BigInt::from(modulus);
            // H ⊗ Z/m ⊕ Tor(H_{k-1}, Z/m)
            let mut orders: Vec<BigInt> = vec![m.clone(); piece.free_rank];
            orders.extend(piece.torsion.iter().map(|d| d.gcd(&m)));
            orders.extend(piece.lower_torsion.iter().map(|d| d.gcd(&m)));
            let factors = normalize_cyclic(&orders);
            let free_rank = factors.iter().filter(|d| **d == m).count();
            HomologyGroup {
                free_rank,
                torsion: factors.into_iter().filter(|d| *d != m).collect(),
            }
        }
        CoefficientRing::LaurentGraded { .. } => {
            let copies = ring.window_powers().len();
            let torsion: Vec<BigInt> = (0..copies).flat_map(|_| piece.torsion.clone()).collect();
            HomologyGroup {
                free_rank: piece.free_rank * copies,
                torsion: normalize_cyclic(&torsion),
            }
        }
    })
}

/// Homology in chain degree `degree`, split by total degree `degree + j*|b|`
/// over the window powers `j`. Ungraded rings give a single entry.
pub fn graded_homology(
    d_in: &IntegerMatrix,
    d_out: &IntegerMatrix,
    ring: &CoefficientRing,
    degree: i64,
) -> Result<Vec<(i64, HomologyGroup)>, CoeffError> {
    match ring.generator_degree() {
        None => Ok(vec![(degree, homology(d_in, d_out, ring)?)]),
        Some(g) => {
            let h = homology(d_in, d_out, &CoefficientRing::Integers)?;
            Ok(ring
                .window_powers()
                .into_iter()
                .map(|j| (degree + j * g, h.clone()))
                .collect())
        }
    }
}

/// Homology of a whole complex `C_0 <- C_1 <- ... <- C_n` given the ranks and
/// the boundaries `∂_i : C_i -> C_{i-1}` for `i = 1..=n`.
pub fn complex_homology(
    ranks: &[usize],
    boundaries: &[IntegerMatrix],
    ring: &CoefficientRing,
) -> Result<Vec<HomologyGroup>, CoeffError> {
    if ranks.is_empty() {
        return Ok(Vec::new());
    }
    if boundaries.len() + 1 != ranks.len() {
        return Err(CoeffError::DimensionMismatch(format!(
            "{} chain groups need {} boundaries, got {}",
            ranks.len(),
            ranks.len() - 1,
            boundaries.len()
        )));
    }
    (0..ranks.len())
        .map(|k| {
            let d_out = if k == 0 {
                IntegerMatrix::zeros(0, ranks[0])
            } else {
                boundaries[k - 1].clone()
            };
            let d_in = if k + 1 < ranks.len() {
                boundaries[k].clone()
            } else {
                IntegerMatrix::zeros(ranks[k], 0)
            };
            homology(&d_in, &d_out, ring)
        })
        .collect()
}

/// Σ (-1)^i x_i for a sequence of counts.
pub fn euler_characteristic(counts: impl IntoIterator<Item = usize>) -> i64 {
    counts
        .into_iter()
        .enumerate()
        .map(|(i, c)| if i % 2 == 0 { c as i64 } else { -(c as i64) })
        .sum()
}
