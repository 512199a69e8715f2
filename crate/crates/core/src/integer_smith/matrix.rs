use std::fmt;
use std::ops::{Index, IndexMut, Mul};

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use super::SmithError;

/// Dense row-major matrix of arbitrary-precision integers.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(into = "Vec<Vec<String>>", try_from = "Vec<Vec<String>>")]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    data: Vec<BigInt>,
}

impl IntMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        IntMatrix { rows, cols, data: vec![BigInt::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = BigInt::one();
        }
        m
    }

    /// Builds from nested rows. All rows must have the same length; an empty
    /// outer vector gives a 0×0 matrix.
    pub fn from_rows<T: Into<BigInt> + Clone>(rows: &[Vec<T>]) -> Result<Self, SmithError> {
        let cols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != cols) {
            return Err(SmithError::Ragged);
        }
        let data = rows.iter().flat_map(|r| r.iter().cloned().map(Into::into)).collect();
        Ok(IntMatrix { rows: rows.len(), cols, data })
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> BigInt) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        IntMatrix { rows, cols, data }
    }

    pub fn diagonal(rows: usize, cols: usize, diag: &[BigInt]) -> Self {
        let mut m = Self::zeros(rows, cols);
        for (i, d) in diag.iter().enumerate().take(rows.min(cols)) {
            m[(i, i)] = d.clone();
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Zero::is_zero)
    }

    pub fn row(&self, i: usize) -> &[BigInt] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn to_nested(&self) -> Vec<Vec<BigInt>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn transpose(&self) -> IntMatrix {
        IntMatrix::from_fn(self.cols, self.rows, |i, j| self[(j, i)].clone())
    }

    /// Deletes row `r`.
    pub fn without_row(&self, r: usize) -> IntMatrix {
        IntMatrix::from_fn(self.rows - 1, self.cols, |i, j| {
            self[(if i < r { i } else { i + 1 }, j)].clone()
        })
    }

    /// Deletes row `r` and column `c`.
    pub fn without_row_col(&self, r: usize, c: usize) -> IntMatrix {
        IntMatrix::from_fn(self.rows - 1, self.cols - 1, |i, j| {
            self[(if i < r { i } else { i + 1 }, if j < c { j } else { j + 1 })].clone()
        })
    }

    /// Submatrix on the given row and column index lists.
    pub fn select(&self, rows: &[usize], cols: &[usize]) -> IntMatrix {
        IntMatrix::from_fn(rows.len(), cols.len(), |i, j| self[(rows[i], cols[j])].clone())
    }

    pub fn scaled(&self, c: &BigInt) -> IntMatrix {
        IntMatrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(|x| x * c).collect() }
    }

    pub fn max_abs_bits(&self) -> u64 {
        self.data.iter().map(|x| x.bits()).max().unwrap_or(0)
    }

    pub(crate) fn swap_rows(&mut self, a: usize, b: usize) {
        if a != b {
            for j in 0..self.cols {
                self.data.swap(a * self.cols + j, b * self.cols + j);
            }
        }
    }

    pub(crate) fn swap_cols(&mut self, a: usize, b: usize) {
        if a != b {
            for i in 0..self.rows {
                self.data.swap(i * self.cols + a, i * self.cols + b);
            }
        }
    }

    /// row[dst] -= q · row[src]
    pub(crate) fn sub_row_multiple(&mut self, dst: usize, src: usize, q: &BigInt) {
        for j in 0..self.cols {
            let delta = q * &self.data[src * self.cols + j];
            self.data[dst * self.cols + j] -= delta;
        }
    }

    /// col[dst] -= q · col[src]
    pub(crate) fn sub_col_multiple(&mut self, dst: usize, src: usize, q: &BigInt) {
        for i in 0..self.rows {
            let delta = q * &self.data[i * self.cols + src];
            self.data[i * self.cols + dst] -= delta;
        }
    }

    pub(crate) fn negate_row(&mut self, i: usize) {
        for j in 0..self.cols {
            let x = &mut self.data[i * self.cols + j];
            *x = -std::mem::take(x);
        }
    }

    pub fn entries(&self) -> &[BigInt] {
        &self.data
    }

    /// Squared Euclidean norm of each row.
    pub(crate) fn row_norms_squared(&self) -> Vec<BigInt> {
        (0..self.rows).map(|i| self.row(i).iter().map(|x| x * x).sum()).collect()
    }

    pub fn abs_max(&self) -> BigInt {
        self.data.iter().map(Signed::abs).max().unwrap_or_default()
    }
}

impl Index<(usize, usize)> for IntMatrix {
    type Output = BigInt;

    fn index(&self, (i, j): (usize, usize)) -> &BigInt {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for IntMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut BigInt {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.data[i * self.cols + j]
    }
}

impl Mul for &IntMatrix {
    type Output = IntMatrix;

    fn mul(self, rhs: &IntMatrix) -> IntMatrix {
        assert_eq!(self.cols, rhs.rows, "dimension mismatch");
        IntMatrix::from_fn(self.rows, rhs.cols, |i, j| {
            (0..self.cols).map(|k| &self[(i, k)] * &rhs[(k, j)]).sum()
        })
    }
}

impl From<IntMatrix> for Vec<Vec<String>> {
    fn from(m: IntMatrix) -> Self {
        (0..m.rows).map(|i| m.row(i).iter().map(|x| x.to_str_radix(10)).collect()).collect()
    }
}

impl TryFrom<Vec<Vec<String>>> for IntMatrix {
    type Error = SmithError;

    fn try_from(raw: Vec<Vec<String>>) -> Result<Self, Self::Error> {
        let parsed = raw
            .iter()
            .map(|row| {
                row.iter()
                    .map(|s| s.trim().parse::<BigInt>().map_err(|_| SmithError::Parse(s.clone())))
                    .collect::<Result<Vec<_>, _>>()
            })
            .collect::<Result<Vec<_>, _>>()?;
        IntMatrix::from_rows(&parsed)
    }
}

impl fmt::Display for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.rows {
            let row: Vec<String> = self.row(i).iter().map(|x| x.to_string()).collect();
            writeln!(f, "[{}]", row.join(", "))?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deletions() {
        let m = IntMatrix::from_rows(&[vec![1, 2, 3], vec![4, 5, 6], vec![7, 8, 9]]).unwrap();
        assert_eq!(m.without_row(1), IntMatrix::from_rows(&[vec![1, 2, 3], vec![7, 8, 9]]).unwrap());
        assert_eq!(m.without_row_col(0, 2), IntMatrix::from_rows(&[vec![4, 5], vec![7, 8]]).unwrap());
        assert_eq!(m.transpose()[(0, 2)], BigInt::from(7));
    }

    #[test]
    fn ragged_rejected() {
        assert_eq!(IntMatrix::from_rows(&[vec![1, 2], vec![3]]), Err(SmithError::Ragged));
        let empty: IntMatrix = IntMatrix::from_rows::<i64>(&[]).unwrap();
        assert_eq!((empty.rows(), empty.cols()), (0, 0));
    }

    #[test]
    fn json_uses_decimal_strings() {
        let big: BigInt = "123456789012345678901234567890".parse().unwrap();
        let m = IntMatrix::from_rows(&[vec![BigInt::from(-3), big]]).unwrap();
        let json = serde_json::to_string(&m).unwrap();
        assert_eq!(json, r#"[["-3","123456789012345678901234567890"]]"#);
        assert_eq!(serde_json::from_str::<IntMatrix>(&json).unwrap(), m);
        assert!(serde_json::from_str::<IntMatrix>(r#"[["x"]]"#).is_err());
    }

    #[test]
    fn product() {
        let a = IntMatrix::from_rows(&[vec![1, 2], vec![3, 4]]).unwrap();
        let i = IntMatrix::identity(2);
        assert_eq!(&a * &i, a);
        assert_eq!((&a * &a)[(1, 1)], BigInt::from(22));
    }
}
