use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::de::{self, Deserializer, SeqAccess, Visitor};
use serde::ser::{SerializeSeq, Serializer};
use serde::{Deserialize, Serialize};

use super::CoeffError;

/// Dense row-major matrix of arbitrary-precision integers.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct IntegerMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<BigInt>,
}

impl IntegerMatrix {
    pub fn new(rows: usize, cols: usize, entries: Vec<BigInt>) -> Result<Self, CoeffError> {
        if entries.len() != rows * cols {
            return Err(CoeffError::DimensionMismatch(format!(
                "{rows}x{cols} matrix needs {} entries, got {}",
                rows * cols,
                entries.len()
            )));
        }
        Ok(Self { rows, cols, entries })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            entries: vec![BigInt::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.entries[i * n + i] = BigInt::one();
        }
        m
    }

    /// Builds a matrix from small-integer rows. An empty row list gives a 0x0 matrix.
    pub fn from_rows<R: AsRef<[i64]>>(rows: &[R]) -> Result<Self, CoeffError> {
        let cols = rows.first().map(|r| r.as_ref().len()).unwrap_or(0);
        let mut entries = Vec::with_capacity(rows.len() * cols);
        for (i, r) in rows.iter().enumerate() {
            let r = r.as_ref();
            if r.len() != cols {
                return Err(CoeffError::DimensionMismatch(format!(
                    "row {i} has {} entries, expected {cols}",
                    r.len()
                )));
            }
            entries.extend(r.iter().map(|&x| BigInt::from(x)));
        }
        Ok(Self {
            rows: rows.len(),
            cols,
            entries,
        })
    }

    /// Builds a matrix from big-integer rows with an explicit shape, so that
    /// matrices with zero rows or zero columns keep their other dimension.
    pub fn from_big_rows(rows: usize, cols: usize, data: Vec<Vec<BigInt>>) -> Result<Self, CoeffError> {
        // a 0-column matrix may be written either as [] or as a list of empty rows
        let degenerate_ok = match (rows, cols) {
            (0, _) => data.is_empty(),
            (_, 0) => data.is_empty() || (data.len() == rows && data.iter().all(Vec::is_empty)),
            _ => true,
        };
        if !degenerate_ok {
            return Err(CoeffError::DimensionMismatch(format!(
                "expected an empty {rows}x{cols} matrix"
            )));
        }
        if rows == 0 || cols == 0 {
            return Ok(Self::zeros(rows, cols));
        }
        if data.len() != rows {
            return Err(CoeffError::DimensionMismatch(format!(
                "expected {rows} rows, got {}",
                data.len()
            )));
        }
        let mut entries = Vec::with_capacity(rows * cols);
        for (i, r) in data.into_iter().enumerate() {
            if r.len() != cols {
                return Err(CoeffError::DimensionMismatch(format!(
                    "row {i} has {} entries, expected {cols}",
                    r.len()
                )));
            }
            entries.extend(r);
        }
        Ok(Self { rows, cols, entries })
    }

    pub fn diagonal(rows: usize, cols: usize, diag: &[BigInt]) -> Self {
        let mut m = Self::zeros(rows, cols);
        for (i, d) in diag.iter().enumerate().take(rows.min(cols)) {
            m.set(i, i, d.clone());
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn get(&self, i: usize, j: usize) -> &BigInt {
        &self.entries[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: BigInt) {
        self.entries[i * self.cols + j] = v;
    }

    pub fn entries(&self) -> &[BigInt] {
        &self.entries
    }

    pub fn row(&self, i: usize) -> &[BigInt] {
        &self.entries[i * self.cols..(i + 1) * self.cols]
    }

    pub fn to_rows(&self) -> Vec<Vec<BigInt>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(Zero::is_zero)
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.set(j, i, self.get(i, j).clone());
            }
        }
        t
    }

    pub fn mul(&self, rhs: &IntegerMatrix) -> Result<IntegerMatrix, CoeffError> {
        if self.cols != rhs.rows {
            return Err(CoeffError::DimensionMismatch(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, rhs.rows, rhs.cols
            )));
        }
        let mut out = Self::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..rhs.cols {
                    let b = rhs.get(k, j);
                    if !b.is_zero() {
                        out.entries[i * rhs.cols + j] += a * b;
                    }
                }
            }
        }
        Ok(out)
    }

    /// Submatrix on the given row and column index lists.
    pub fn select(&self, rows: &[usize], cols: &[usize]) -> IntegerMatrix {
        let mut out = Self::zeros(rows.len(), cols.len());
        for (a, &i) in rows.iter().enumerate() {
            for (b, &j) in cols.iter().enumerate() {
                out.set(a, b, self.get(i, j).clone());
            }
        }
        out
    }

    /// Determinant by fraction-free (Bareiss) elimination.
    pub fn determinant(&self) -> Result<BigInt, CoeffError> {
        if self.rows != self.cols {
            return Err(CoeffError::DimensionMismatch(format!(
                "determinant of non-square {}x{} matrix",
                self.rows, self.cols
            )));
        }
        let n = self.rows;
        if n == 0 {
            return Ok(BigInt::one());
        }
        let mut a = self.to_rows();
        let mut sign = BigInt::one();
        let mut prev = BigInt::one();
        for k in 0..n - 1 {
            if a[k][k].is_zero() {
                match (k + 1..n).find(|&r| !a[r][k].is_zero()) {
                    Some(r) => {
                        a.swap(k, r);
                        sign = -sign;
                    }
                    None => return Ok(BigInt::zero()),
                }
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let v = &a[i][j] * &a[k][k] - &a[i][k] * &a[k][j];
                    a[i][j] = v / &prev;
                }
            }
            prev = a[k][k].clone();
        }
        Ok(sign * a[n - 1][n - 1].clone())
    }

    pub fn is_unimodular(&self) -> bool {
        matches!(self.determinant(), Ok(d) if d.abs().is_one())
    }

    pub fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.entries.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    pub fn swap_cols(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for i in 0..self.rows {
            self.entries.swap(i * self.cols + a, i * self.cols + b);
        }
    }

    /// row[target] += factor * row[source]
    pub fn add_row_multiple(&mut self, target: usize, source: usize, factor: &BigInt) {
        if factor.is_zero() {
            return;
        }
        for j in 0..self.cols {
            let s = self.entries[source * self.cols + j].clone();
            if !s.is_zero() {
                self.entries[target * self.cols + j] += factor * s;
            }
        }
    }

    /// col[target] += factor * col[source]
    pub fn add_col_multiple(&mut self, target: usize, source: usize, factor: &BigInt) {
        if factor.is_zero() {
            return;
        }
        for i in 0..self.rows {
            let s = self.entries[i * self.cols + source].clone();
            if !s.is_zero() {
                self.entries[i * self.cols + target] += factor * s;
            }
        }
    }

    pub fn negate_row(&mut self, i: usize) {
        for j in 0..self.cols {
            let v = std::mem::take(&mut self.entries[i * self.cols + j]);
            self.entries[i * self.cols + j] = -v;
        }
    }

    pub fn negate_col(&mut self, j: usize) {
        for i in 0..self.rows {
            let v = std::mem::take(&mut self.entries[i * self.cols + j]);
            self.entries[i * self.cols + j] = -v;
        }
    }
}

impl fmt::Debug for IntegerMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "IntegerMatrix({}x{})", self.rows, self.cols)?;
        f.debug_list().entries(self.to_rows()).finish()
    }
}

impl fmt::Display for IntegerMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for i in 0..self.rows {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "[")?;
            for (j, v) in self.row(i).iter().enumerate() {
                if j > 0 {
                    write!(f, ", ")?;
                }
                write!(f, "{v}")?;
            }
            write!(f, "]")?;
        }
        write!(f, "]")
    }
}

/// JSON helpers: integers are written as numbers when they fit in `i64`
/// and as decimal strings otherwise; both forms are accepted on input.
pub mod bigint_json {
    use super::*;

    pub struct Big<'a>(pub &'a BigInt);

    impl Serialize for Big<'_> {
        fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
            match i64::try_from(self.0) {
                Ok(v) => s.serialize_i64(v),
                Err(_) => s.serialize_str(&self.0.to_string()),
            }
        }
    }

    pub struct OwnedBig(pub BigInt);

    impl<'de> Deserialize<'de> for OwnedBig {
        fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
            struct V;
            impl Visitor<'_> for V {
                type Value = OwnedBig;
                fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                    f.write_str("an integer or a decimal integer string")
                }
                fn visit_i64<E: de::Error>(self, v: i64) -> Result<OwnedBig, E> {
                    Ok(OwnedBig(BigInt::from(v)))
                }
                fn visit_u64<E: de::Error>(self, v: u64) -> Result<OwnedBig, E> {
                    Ok(OwnedBig(BigInt::from(v)))
                }
                fn visit_f64<E: de::Error>(self, v: f64) -> Result<OwnedBig, E> {
                    if v.fract() == 0.0 && v.abs() < 9.0e15 {
                        Ok(OwnedBig(BigInt::from(v as i64)))
                    } else {
                        Err(E::custom(format!("non-integer matrix entry {v}")))
                    }
                }
                fn visit_str<E: de::Error>(self, v: &str) -> Result<OwnedBig, E> {
                    v.trim()
                        .parse::<BigInt>()
                        .map(OwnedBig)
                        .map_err(|e| E::custom(format!("bad integer {v:?}: {e}")))
                }
            }
            d.deserialize_any(V)
        }
    }

    pub struct Rows<'a>(pub &'a IntegerMatrix);

    impl Serialize for Rows<'_> {
        fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
            let m = self.0;
            let mut seq = s.serialize_seq(Some(m.rows()))?;
            for i in 0..m.rows() {
                let row: Vec<Big> = m.row(i).iter().map(Big).collect();
                seq.serialize_element(&row)?;
            }
            seq.end()
        }
    }

    /// Raw nested rows read from JSON; the shape is fixed later against a basis.
    #[derive(Debug, Clone, Default)]
    pub struct RawRows(pub Vec<Vec<BigInt>>);

    impl<'de> Deserialize<'de> for RawRows {
        fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
            struct V;
            impl<'de> Visitor<'de> for V {
                type Value = RawRows;
                fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                    f.write_str("a list of integer rows")
                }
                fn visit_seq<A: SeqAccess<'de>>(self, mut seq: A) -> Result<RawRows, A::Error> {
                    let mut rows = Vec::new();
                    while let Some(row) = seq.next_element::<Vec<OwnedBig>>()? {
                        rows.push(row.into_iter().map(|b| b.0).collect());
                    }
                    Ok(RawRows(rows))
                }
            }
            d.deserialize_seq(V)
        }
    }

    pub fn to_value(v: &BigInt) -> serde_json::Value {
        serde_json::to_value(Big(v)).expect("integer serializes")
    }

    pub fn matrix_to_value(m: &IntegerMatrix) -> serde_json::Value {
        serde_json::to_value(Rows(m)).expect("matrix serializes")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn product_and_shape_errors() {
        let a = IntegerMatrix::from_rows(&[[1, 2], [3, 4]]).unwrap();
        let b = IntegerMatrix::from_rows(&[[0, 1], [1, 0]]).unwrap();
        let ab = a.mul(&b).unwrap();
        assert_eq!(ab, IntegerMatrix::from_rows(&[[2, 1], [4, 3]]).unwrap());
        let c = IntegerMatrix::zeros(3, 1);
        assert!(matches!(a.mul(&c), Err(CoeffError::DimensionMismatch(_))));
    }

    #[test]
    fn empty_shapes_multiply() {
        let a = IntegerMatrix::zeros(2, 0);
        let b = IntegerMatrix::zeros(0, 3);
        let ab = a.mul(&b).unwrap();
        assert_eq!(ab.shape(), (2, 3));
        assert!(ab.is_zero());
    }

    #[test]
    fn bareiss_determinant() {
        let a = IntegerMatrix::from_rows(&[[2, 4], [6, 8]]).unwrap();
        assert_eq!(a.determinant().unwrap(), BigInt::from(-8));
        let b = IntegerMatrix::from_rows(&[[0, 1, 2], [1, 0, 3], [4, -3, 8]]).unwrap();
        assert_eq!(b.determinant().unwrap(), BigInt::from(-2));
        assert!(IntegerMatrix::identity(4).is_unimodular());
    }

    #[test]
    fn degenerate_rows_roundtrip() {
        let m = IntegerMatrix::from_big_rows(0, 3, vec![]).unwrap();
        assert_eq!(m.shape(), (0, 3));
        let m = IntegerMatrix::from_big_rows(2, 0, vec![vec![], vec![]]).unwrap();
        assert_eq!(m.shape(), (2, 0));
        let m = IntegerMatrix::from_big_rows(2, 0, vec![]).unwrap();
        assert_eq!(m.shape(), (2, 0));
        assert!(IntegerMatrix::from_big_rows(2, 2, vec![vec![BigInt::one()]]).is_err());
    }

    #[test]
    fn json_big_entries() {
        let big: BigInt = "123456789012345678901234567890".parse().unwrap();
        let m = IntegerMatrix::new(1, 2, vec![BigInt::from(-3), big.clone()]).unwrap();
        let v = bigint_json::matrix_to_value(&m);
        assert_eq!(v.to_string(), r#"[[-3,"123456789012345678901234567890"]]"#);
        let raw: bigint_json::RawRows = serde_json::from_value(v).unwrap();
        let back = IntegerMatrix::from_big_rows(1, 2, raw.0).unwrap();
        assert_eq!(back, m);
    }
}
