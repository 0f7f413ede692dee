//! Row-major dense matrix of `f64`.
//!
//! Rows are samples and columns are features everywhere in the crate. Every
//! constructor and operation rejects non-finite values, so a `Matrix` that
//! exists holds only finite numbers.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawMatrix", into = "RawMatrix")]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct RawMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl TryFrom<RawMatrix> for Matrix {
    type Error = Error;

    fn try_from(raw: RawMatrix) -> Result<Self> {
        Matrix::new(raw.rows, raw.cols, raw.data)
    }
}

impl From<Matrix> for RawMatrix {
    fn from(m: Matrix) -> Self {
        RawMatrix {
            rows: m.rows,
            cols: m.cols,
            data: m.data,
        }
    }
}

fn check_finite(data: &[f64], op: &'static str) -> Result<()> {
    if data.iter().all(|v| v.is_finite()) {
        Ok(())
    } else {
        Err(Error::NonFinite(op))
    }
}

impl Matrix {
    pub fn new(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::Shape {
                op: "Matrix::new",
                left: format!("{rows}×{cols}"),
                right: format!("{} values", data.len()),
            });
        }
        check_finite(&data, "Matrix::new")?;
        Ok(Self { rows, cols, data })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = 1.0;
        }
        m
    }

    /// Builds a matrix from equal-length rows.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        let mut data = Vec::with_capacity(rows.len() * cols);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != cols {
                return Err(Error::Shape {
                    op: "Matrix::from_rows",
                    left: format!("row 0 has {cols} values"),
                    right: format!("row {i} has {}", row.len()),
                });
            }
            data.extend_from_slice(row);
        }
        Self::new(rows.len(), cols, data)
    }

    pub fn row_vector(values: &[f64]) -> Result<Self> {
        Self::new(1, values.len(), values.to_vec())
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    #[inline]
    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> f64 {
        self.data[r * self.cols + c]
    }

    pub fn row(&self, r: usize) -> &[f64] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.data
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    /// Writes a single entry. Rejects non-finite values.
    pub fn set(&mut self, r: usize, c: usize, value: f64) -> Result<()> {
        if !value.is_finite() {
            return Err(Error::NonFinite("Matrix::set"));
        }
        self.data[r * self.cols + c] = value;
        Ok(())
    }

    pub fn matmul(&self, other: &Matrix) -> Result<Matrix> {
        if self.cols != other.rows {
            return Err(Error::shape("matmul", self.shape(), other.shape()));
        }
        let (n, k, m) = (self.rows, self.cols, other.cols);
        let mut out = vec![0.0; n * m];
        for i in 0..n {
            let out_row = &mut out[i * m..(i + 1) * m];
            for p in 0..k {
                let a = self.data[i * k + p];
                if a == 0.0 {
                    continue;
                }
                let b_row = &other.data[p * m..(p + 1) * m];
                for (o, &b) in out_row.iter_mut().zip(b_row) {
                    *o += a * b;
                }
            }
        }
        check_finite(&out, "matmul")?;
        Ok(Matrix {
            rows: n,
            cols: m,
            data: out,
        })
    }

    /// Adds a `1 × cols` row vector to every row.
    pub fn add_row_broadcast(&self, bias: &Matrix) -> Result<Matrix> {
        if bias.rows != 1 || bias.cols != self.cols {
            return Err(Error::shape("add_row_broadcast", self.shape(), bias.shape()));
        }
        let mut data = self.data.clone();
        if self.cols > 0 {
            for row in data.chunks_exact_mut(self.cols) {
                for (v, b) in row.iter_mut().zip(&bias.data) {
                    *v += b;
                }
            }
        }
        check_finite(&data, "add_row_broadcast")?;
        Ok(Matrix { data, ..*self })
    }

    pub fn transpose(&self) -> Matrix {
        let mut data = vec![0.0; self.data.len()];
        for i in 0..self.rows {
            for j in 0..self.cols {
                data[j * self.rows + i] = self.data[i * self.cols + j];
            }
        }
        Matrix {
            rows: self.cols,
            cols: self.rows,
            data,
        }
    }

    /// Column index of the largest entry in each row; ties go to the lower index.
    pub fn argmax_rows(&self) -> Vec<usize> {
        if self.cols == 0 {
            return Vec::new();
        }
        self.data
            .chunks_exact(self.cols)
            .map(|row| {
                let mut best = 0;
                for (j, &v) in row.iter().enumerate().skip(1) {
                    if v > row[best] {
                        best = j;
                    }
                }
                best
            })
            .collect()
    }

    /// Sum of each column as a `1 × cols` matrix.
    pub fn column_sums(&self) -> Matrix {
        let mut sums = vec![0.0; self.cols];
        if self.cols > 0 {
            for row in self.data.chunks_exact(self.cols) {
                for (s, v) in sums.iter_mut().zip(row) {
                    *s += v;
                }
            }
        }
        Matrix {
            rows: 1,
            cols: self.cols,
            data: sums,
        }
    }

    /// Elementwise product.
    pub fn hadamard(&self, other: &Matrix) -> Result<Matrix> {
        self.zip_with(other, "hadamard", |a, b| a * b)
    }

    pub fn sub(&self, other: &Matrix) -> Result<Matrix> {
        self.zip_with(other, "sub", |a, b| a - b)
    }

    pub fn scale(&self, factor: f64) -> Result<Matrix> {
        self.map("scale", |v| v * factor)
    }

    /// Applies `f` elementwise, failing if any output is non-finite.
    pub fn map(&self, op: &'static str, f: impl Fn(f64) -> f64) -> Result<Matrix> {
        let data: Vec<f64> = self.data.iter().map(|&v| f(v)).collect();
        check_finite(&data, op)?;
        Ok(Matrix { data, ..*self })
    }

    fn zip_with(
        &self,
        other: &Matrix,
        op: &'static str,
        f: impl Fn(f64, f64) -> f64,
    ) -> Result<Matrix> {
        if self.shape() != other.shape() {
            return Err(Error::shape(op, self.shape(), other.shape()));
        }
        let data: Vec<f64> = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(&a, &b)| f(a, b))
            .collect();
        check_finite(&data, op)?;
        Ok(Matrix { data, ..*self })
    }

    /// Keeps the listed rows, in the given order.
    pub fn select_rows(&self, indices: &[usize]) -> Matrix {
        let mut data = Vec::with_capacity(indices.len() * self.cols);
        for &i in indices {
            data.extend_from_slice(self.row(i));
        }
        Matrix {
            rows: indices.len(),
            cols: self.cols,
            data,
        }
    }

    /// Keeps the listed columns, in the given order.
    pub fn select_cols(&self, indices: &[usize]) -> Matrix {
        let mut data = Vec::with_capacity(self.rows * indices.len());
        for i in 0..self.rows {
            let row = self.row(i);
            data.extend(indices.iter().map(|&j| row[j]));
        }
        Matrix {
            rows: self.rows,
            cols: indices.len(),
            data,
        }
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    pub(crate) fn as_mut_slice(&mut self) -> &mut [f64] {
        &mut self.data
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::SeededRng;

    fn random(rng: &mut SeededRng, rows: usize, cols: usize) -> Matrix {
        let data = (0..rows * cols).map(|_| rng.uniform() * 2.0 - 1.0).collect();
        Matrix::new(rows, cols, data).unwrap()
    }

    fn m(rows: &[&[f64]]) -> Matrix {
        Matrix::from_rows(&rows.iter().map(|r| r.to_vec()).collect::<Vec<_>>()).unwrap()
    }

    #[test]
    fn identity_product() {
        let b = m(&[&[3.0, 4.0], &[5.0, 6.0]]);
        assert_eq!(Matrix::identity(2).matmul(&b).unwrap(), b);
    }

    #[test]
    fn inner_product() {
        let r = m(&[&[1.0, 2.0]]).matmul(&m(&[&[3.0], &[4.0]])).unwrap();
        assert_eq!(r.as_slice(), &[11.0]);
    }

    #[test]
    fn matmul_matches_triple_loop() {
        let mut rng = SeededRng::new(7);
        let a = random(&mut rng, 7, 5);
        let b = random(&mut rng, 5, 3);
        let c = a.matmul(&b).unwrap();
        for i in 0..7 {
            for j in 0..3 {
                let mut s = 0.0;
                for p in 0..5 {
                    s += a.get(i, p) * b.get(p, j);
                }
                assert!((c.get(i, j) - s).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn matmul_shape_error_names_both() {
        let err = Matrix::zeros(2, 3).matmul(&Matrix::zeros(2, 3)).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("2×3") && msg.matches("2×3").count() == 2, "{msg}");
    }

    #[test]
    fn matmul_overflow_is_rejected() {
        let a = Matrix::new(1, 1, vec![1e200]).unwrap();
        assert!(matches!(a.matmul(&a), Err(Error::NonFinite(_))));
    }

    #[test]
    fn broadcast_cases() {
        let a = m(&[&[1.0, 1.0], &[2.0, 2.0]]);
        assert_eq!(a.add_row_broadcast(&Matrix::zeros(1, 2)).unwrap(), a);
        let r = m(&[&[1.0, 1.0]])
            .add_row_broadcast(&m(&[&[5.0, -5.0]]))
            .unwrap();
        assert_eq!(r.as_slice(), &[6.0, -4.0]);
        assert!(a.add_row_broadcast(&Matrix::zeros(1, 3)).is_err());
        assert!(a.add_row_broadcast(&Matrix::zeros(2, 2)).is_err());
    }

    #[test]
    fn broadcast_matches_loop() {
        let mut rng = SeededRng::new(3);
        let a = random(&mut rng, 4, 3);
        let b = random(&mut rng, 1, 3);
        let r = a.add_row_broadcast(&b).unwrap();
        for i in 0..4 {
            for j in 0..3 {
                assert_eq!(r.get(i, j), a.get(i, j) + b.get(0, j));
            }
        }
    }

    #[test]
    fn transpose_cases() {
        let a = m(&[&[1.0, 2.0, 3.0]]);
        assert_eq!(a.transpose(), m(&[&[1.0], &[2.0], &[3.0]]));
        let mut rng = SeededRng::new(11);
        let r = random(&mut rng, 4, 6);
        assert_eq!(r.transpose().transpose(), r);
        assert!((r.transpose().frobenius_norm() - r.frobenius_norm()).abs() < 1e-12);
    }

    #[test]
    fn argmax_cases() {
        assert_eq!(m(&[&[0.1, 0.9]]).argmax_rows(), vec![1]);
        assert_eq!(m(&[&[0.5, 0.5]]).argmax_rows(), vec![0]);
        assert!(Matrix::zeros(0, 0).argmax_rows().is_empty());
        let mut rng = SeededRng::new(5);
        let r = random(&mut rng, 10, 2);
        let scan: Vec<usize> = (0..10)
            .map(|i| if r.get(i, 1) > r.get(i, 0) { 1 } else { 0 })
            .collect();
        assert_eq!(r.argmax_rows(), scan);
    }

    #[test]
    fn rejects_non_finite() {
        assert!(Matrix::new(1, 2, vec![1.0, f64::NAN]).is_err());
        assert!(Matrix::new(1, 2, vec![1.0]).is_err());
        let mut a = Matrix::zeros(1, 1);
        assert!(a.set(0, 0, f64::INFINITY).is_err());
    }

    #[test]
    fn serde_rejects_bad_length() {
        let bad = r#"{"rows":2,"cols":2,"data":[1.0]}"#;
        assert!(serde_json::from_str::<Matrix>(bad).is_err());
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn mat(rows: usize, cols: usize) -> impl Strategy<Value = Matrix> {
            proptest::collection::vec(-10.0f64..10.0, rows * cols)
                .prop_map(move |d| Matrix::new(rows, cols, d).unwrap())
        }

        proptest! {
            #[test]
            fn associativity(a in mat(3, 4), b in mat(4, 2), c in mat(2, 5)) {
                let left = a.matmul(&b).unwrap().matmul(&c).unwrap();
                let right = a.matmul(&b.matmul(&c).unwrap()).unwrap();
                let scale = left.frobenius_norm().max(1.0);
                for (x, y) in left.as_slice().iter().zip(right.as_slice()) {
                    prop_assert!((x - y).abs() <= 1e-9 * scale);
                }
            }

            #[test]
            fn transpose_of_product(a in mat(3, 4), b in mat(4, 2)) {
                let lhs = a.matmul(&b).unwrap().transpose();
                let rhs = b.transpose().matmul(&a.transpose()).unwrap();
                for (x, y) in lhs.as_slice().iter().zip(rhs.as_slice()) {
                    prop_assert!((x - y).abs() <= 1e-12);
                }
            }
        }
    }
}
