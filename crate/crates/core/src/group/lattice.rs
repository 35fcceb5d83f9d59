use serde::{Deserialize, Serialize};

use super::GroupError;

/// Dense integer matrix, row-major.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "Vec<Vec<i64>>", into = "Vec<Vec<i64>>")]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    data: Vec<i64>,
}

impl IntMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        IntMatrix { rows, cols, data: vec![0; rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = 1;
        }
        m
    }

    /// Scalar multiple of the identity.
    pub fn scalar(n: usize, s: i64) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = s;
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<i64>>) -> Result<Self, GroupError> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return Err(GroupError::Dimension("ragged matrix rows".into()));
        }
        Ok(IntMatrix { rows: r, cols: c, data: rows.into_iter().flatten().collect() })
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

    pub fn get(&self, i: usize, j: usize) -> i64 {
        self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: i64) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[i64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn to_rows(&self) -> Vec<Vec<i64>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn mul(&self, other: &IntMatrix) -> Result<IntMatrix, GroupError> {
        if self.cols != other.rows {
            return Err(GroupError::Dimension(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = IntMatrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for j in 0..other.cols {
                let mut acc: i64 = 0;
                for k in 0..self.cols {
                    acc = self
                        .get(i, k)
                        .checked_mul(other.get(k, j))
                        .and_then(|p| acc.checked_add(p))
                        .ok_or(GroupError::Overflow("matrix product"))?;
                }
                out.set(i, j, acc);
            }
        }
        Ok(out)
    }

    pub fn mul_vec(&self, v: &[i64]) -> Result<Vec<i64>, GroupError> {
        if v.len() != self.cols {
            return Err(GroupError::Dimension(format!(
                "vector of length {} against {} columns",
                v.len(),
                self.cols
            )));
        }
        (0..self.rows)
            .map(|i| {
                self.row(i).iter().zip(v).try_fold(0i64, |acc, (a, b)| {
                    a.checked_mul(*b)
                        .and_then(|p| acc.checked_add(p))
                        .ok_or(GroupError::Overflow("matrix-vector product"))
                })
            })
            .collect()
    }

    pub fn sub(&self, other: &IntMatrix) -> IntMatrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        IntMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect(),
        }
    }

    /// Vertical concatenation.
    pub fn stack(blocks: &[IntMatrix], cols: usize) -> IntMatrix {
        let mut data = Vec::new();
        let mut rows = 0;
        for b in blocks {
            assert_eq!(b.cols, cols);
            data.extend_from_slice(&b.data);
            rows += b.rows;
        }
        IntMatrix { rows, cols, data }
    }

    /// Determinant by fraction-free (Bareiss) elimination.
    pub fn determinant(&self) -> Result<i64, GroupError> {
        if !self.is_square() {
            return Err(GroupError::Dimension("determinant of non-square matrix".into()));
        }
        let n = self.rows;
        if n == 0 {
            return Ok(1);
        }
        let mut a: Vec<Vec<i128>> =
            (0..n).map(|i| self.row(i).iter().map(|&x| x as i128).collect()).collect();
        let mut sign = 1i128;
        let mut prev = 1i128;
        for k in 0..n - 1 {
            if a[k][k] == 0 {
                match (k + 1..n).find(|&i| a[i][k] != 0) {
                    Some(i) => {
                        a.swap(i, k);
                        sign = -sign;
                    }
                    None => return Ok(0),
                }
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) / prev;
                }
            }
            prev = a[k][k];
        }
        i64::try_from(sign * a[n - 1][n - 1]).map_err(|_| GroupError::Overflow("determinant"))
    }

    /// Rank over ℚ.
    pub fn rank(&self) -> usize {
        self.cols - self.integer_kernel().len()
    }

    /// A ℤ-basis of `{x ∈ ℤ^cols : A x = 0}` in reduced row-echelon (Hermite) form.
    ///
    /// Unimodular column operations bring `A` to column-echelon form while the
    /// same operations are tracked on an identity block; the tracked columns
    /// whose `A`-part vanished span the kernel.
    pub fn integer_kernel(&self) -> Vec<Vec<i64>> {
        let n = self.cols;
        let m = self.rows;
        // columns of the augmented matrix [A; I]
        let mut cols: Vec<Vec<i128>> = (0..n)
            .map(|j| {
                let mut c: Vec<i128> = (0..m).map(|i| self.get(i, j) as i128).collect();
                c.extend((0..n).map(|k| i128::from(k == j)));
                c
            })
            .collect();
        let mut pivot = 0;
        for row in 0..m {
            if pivot == n {
                break;
            }
            loop {
                // smallest non-zero |entry| among remaining columns
                let best = (pivot..n)
                    .filter(|&j| cols[j][row] != 0)
                    .min_by_key(|&j| cols[j][row].abs());
                let Some(b) = best else { break };
                cols.swap(pivot, b);
                let p = cols[pivot][row];
                let mut done = true;
                for j in pivot + 1..n {
                    let q = cols[j][row].div_euclid(p);
                    if q != 0 {
                        let src = cols[pivot].clone();
                        for (x, y) in cols[j].iter_mut().zip(&src) {
                            *x -= q * y;
                        }
                    }
                    if cols[j][row] != 0 {
                        done = false;
                    }
                }
                if done {
                    pivot += 1;
                    break;
                }
            }
        }
        let basis: Vec<Vec<i128>> = cols[pivot..].iter().map(|c| c[m..].to_vec()).collect();
        hermite_rows(basis).into_iter().map(|r| r.into_iter().map(|x| x as i64).collect()).collect()
    }
}

/// Row Hermite normal form of a list of independent integer vectors:
/// positive pivots, entries above each pivot reduced into `[0, pivot)`.
fn hermite_rows(mut rows: Vec<Vec<i128>>) -> Vec<Vec<i128>> {
    let Some(width) = rows.first().map(Vec::len) else {
        return rows;
    };
    let mut r = 0;
    for col in 0..width {
        if r == rows.len() {
            break;
        }
        loop {
            let best = (r..rows.len())
                .filter(|&i| rows[i][col] != 0)
                .min_by_key(|&i| rows[i][col].abs());
            let Some(b) = best else { break };
            rows.swap(r, b);
            let p = rows[r][col];
            let mut done = true;
            for i in r + 1..rows.len() {
                let q = rows[i][col].div_euclid(p);
                if q != 0 {
                    let src = rows[r].clone();
                    for (x, y) in rows[i].iter_mut().zip(&src) {
                        *x -= q * y;
                    }
                }
                if rows[i][col] != 0 {
                    done = false;
                }
            }
            if done {
                if rows[r][col] < 0 {
                    for x in rows[r].iter_mut() {
                        *x = -*x;
                    }
                }
                let p = rows[r][col];
                for i in 0..r {
                    let q = rows[i][col].div_euclid(p);
                    if q != 0 {
                        let src = rows[r].clone();
                        for (x, y) in rows[i].iter_mut().zip(&src) {
                            *x -= q * y;
                        }
                    }
                }
                r += 1;
                break;
            }
        }
    }
    rows.retain(|row| row.iter().any(|&x| x != 0));
    rows
}

impl TryFrom<Vec<Vec<i64>>> for IntMatrix {
    type Error = GroupError;
    fn try_from(rows: Vec<Vec<i64>>) -> Result<Self, Self::Error> {
        IntMatrix::from_rows(rows)
    }
}

impl From<IntMatrix> for Vec<Vec<i64>> {
    fn from(m: IntMatrix) -> Self {
        m.to_rows()
    }
}
