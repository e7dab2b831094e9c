//! Dense matrices over K with exact Gaussian elimination.

use serde::{Serialize, Serializer};

use crate::coefficients::{FieldDesc, KElem, Valuation, Q};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Mat {
    rows: usize,
    cols: usize,
    data: Vec<KElem>,
}

impl Mat {
    pub fn zeros(f: &FieldDesc, rows: usize, cols: usize) -> Self {
        Mat {
            rows,
            cols,
            data: vec![f.zero(); rows * cols],
        }
    }

    pub fn identity(f: &FieldDesc, n: usize) -> Self {
        Self::scalar(f, n, f.one())
    }

    /// c·I.
    pub fn scalar(f: &FieldDesc, n: usize, c: KElem) -> Self {
        let mut m = Self::zeros(f, n, n);
        for i in 0..n {
            m.data[i * n + i] = c.clone();
        }
        m
    }

    pub fn diag(f: &FieldDesc, entries: Vec<KElem>) -> Self {
        let n = entries.len();
        let mut m = Self::zeros(f, n, n);
        for (i, c) in entries.into_iter().enumerate() {
            m.data[i * n + i] = c;
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<KElem>>) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::ShapeMismatch("ragged matrix rows".into()));
        }
        Ok(Mat {
            rows: r,
            cols: c,
            data: rows.into_iter().flatten().collect(),
        })
    }

    pub fn from_fn(rows: usize, cols: usize, mut g: impl FnMut(usize, usize) -> KElem) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(g(i, j));
            }
        }
        Mat { rows, cols, data }
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

    pub fn get(&self, i: usize, j: usize) -> &KElem {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: KElem) {
        self.data[i * self.cols + j] = v;
    }

    pub fn entries(&self) -> &[KElem] {
        &self.data
    }

    pub fn column(&self, j: usize) -> Vec<KElem> {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn from_columns(f: &FieldDesc, rows: usize, cols: &[Vec<KElem>]) -> Self {
        let mut m = Self::zeros(f, rows, cols.len());
        for (j, col) in cols.iter().enumerate() {
            for (i, v) in col.iter().enumerate() {
                m.set(i, j, v.clone());
            }
        }
        m
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(KElem::is_zero)
    }

    pub fn is_identity(&self, f: &FieldDesc) -> bool {
        self.is_square() && *self == Self::identity(f, self.rows)
    }

    /// Whether the matrix is c·I for some c; returns c.
    pub fn as_scalar(&self) -> Option<&KElem> {
        if !self.is_square() || self.rows == 0 {
            return None;
        }
        let c = self.get(0, 0);
        for i in 0..self.rows {
            for j in 0..self.cols {
                let v = self.get(i, j);
                if (i == j && v != c) || (i != j && !v.is_zero()) {
                    return None;
                }
            }
        }
        Some(c)
    }

    fn check_same(&self, other: &Mat) -> Result<()> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::ShapeMismatch(format!(
                "{}x{} vs {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        Ok(())
    }

    pub fn add(&self, f: &FieldDesc, other: &Mat) -> Result<Mat> {
        self.check_same(other)?;
        Ok(self.zip(other, |a, b| f.add(a, b)))
    }

    pub fn sub(&self, f: &FieldDesc, other: &Mat) -> Result<Mat> {
        self.check_same(other)?;
        Ok(self.zip(other, |a, b| f.sub(a, b)))
    }

    fn zip(&self, other: &Mat, g: impl Fn(&KElem, &KElem) -> KElem) -> Mat {
        Mat {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| g(a, b)).collect(),
        }
    }

    pub fn neg(&self, f: &FieldDesc) -> Mat {
        self.map(|a| f.neg(a))
    }

    pub fn scale(&self, f: &FieldDesc, c: &KElem) -> Mat {
        self.map(|a| f.mul(c, a))
    }

    pub fn scale_q(&self, f: &FieldDesc, c: &Q) -> Mat {
        self.map(|a| f.scale(a, c))
    }

    pub fn map(&self, g: impl Fn(&KElem) -> KElem) -> Mat {
        Mat {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(g).collect(),
        }
    }

    pub fn mul(&self, f: &FieldDesc, other: &Mat) -> Result<Mat> {
        if self.cols != other.rows {
            return Err(Error::ShapeMismatch(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = Mat::zeros(f, self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = other.get(k, j);
                    if b.is_zero() {
                        continue;
                    }
                    let idx = i * out.cols + j;
                    out.data[idx] = f.add(&out.data[idx], &f.mul(a, b));
                }
            }
        }
        Ok(out)
    }

    /// M + c·I.
    pub fn add_scalar(&self, f: &FieldDesc, c: &KElem) -> Mat {
        let mut m = self.clone();
        for i in 0..self.rows.min(self.cols) {
            let idx = i * self.cols + i;
            m.data[idx] = f.add(&m.data[idx], c);
        }
        m
    }

    pub fn trace(&self, f: &FieldDesc) -> KElem {
        (0..self.rows.min(self.cols)).fold(f.zero(), |acc, i| f.add(&acc, self.get(i, i)))
    }

    pub fn transpose(&self) -> Mat {
        Mat::from_fn(self.cols, self.rows, |i, j| self.get(j, i).clone())
    }

    pub fn commutes(&self, f: &FieldDesc, other: &Mat) -> Result<bool> {
        Ok(self.mul(f, other)? == other.mul(f, self)?)
    }

    /// Minimum valuation over the entries.
    pub fn min_valuation(&self, f: &FieldDesc) -> Valuation {
        self.data
            .iter()
            .map(|a| f.valuation(a))
            .min()
            .unwrap_or(Valuation::Infinite)
    }

    /// Reduced row echelon form; returns the pivot columns.
    pub fn rref(&mut self, f: &FieldDesc) -> Vec<usize> {
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..self.cols {
            if r == self.rows {
                break;
            }
            let Some(piv) = (r..self.rows).find(|&i| !self.get(i, c).is_zero()) else {
                continue;
            };
            self.swap_rows(r, piv);
            let inv = f.inv(self.get(r, c)).expect("pivot is nonzero");
            for j in c..self.cols {
                let v = f.mul(self.get(r, j), &inv);
                self.set(r, j, v);
            }
            for i in 0..self.rows {
                if i == r || self.get(i, c).is_zero() {
                    continue;
                }
                let factor = self.get(i, c).clone();
                for j in c..self.cols {
                    let v = f.sub(self.get(i, j), &f.mul(&factor, self.get(r, j)));
                    self.set(i, j, v);
                }
            }
            pivots.push(c);
            r += 1;
        }
        pivots
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    pub fn rank(&self, f: &FieldDesc) -> usize {
        self.clone().rref(f).len()
    }

    /// Basis of the right kernel, as column vectors.
    pub fn kernel(&self, f: &FieldDesc) -> Vec<Vec<KElem>> {
        let mut m = self.clone();
        let pivots = m.rref(f);
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivots.contains(c)).collect();
        free.iter()
            .map(|&fc| {
                let mut v = vec![f.zero(); self.cols];
                v[fc] = f.one();
                for (r, &pc) in pivots.iter().enumerate() {
                    v[pc] = f.neg(m.get(r, fc));
                }
                v
            })
            .collect()
    }

    pub fn inverse(&self, f: &FieldDesc) -> Result<Mat> {
        if !self.is_square() {
            return Err(Error::ShapeMismatch("inverse of a non-square matrix".into()));
        }
        let n = self.rows;
        if n == 1 {
            let a = self.get(0, 0);
            if a.is_zero() {
                return Err(Error::NonUnit("singular matrix".into()));
            }
            return Ok(Mat::from_fn(1, 1, |_, _| f.inv(a).unwrap()));
        }
        let mut aug = Mat::from_fn(n, 2 * n, |i, j| {
            if j < n {
                self.get(i, j).clone()
            } else if j - n == i {
                f.one()
            } else {
                f.zero()
            }
        });
        let pivots = aug.rref(f);
        if pivots.len() < n || pivots[n - 1] != n - 1 {
            return Err(Error::NonUnit("singular matrix".into()));
        }
        Ok(Mat::from_fn(n, n, |i, j| aug.get(i, j + n).clone()))
    }

    pub fn pow(&self, f: &FieldDesc, n: u32) -> Result<Mat> {
        let mut acc = Mat::identity(f, self.rows);
        for _ in 0..n {
            acc = acc.mul(f, self)?;
        }
        Ok(acc)
    }

    /// Coefficients (low-to-high, monic) of det(x·I − M), by Faddeev–LeVerrier.
    pub fn charpoly(&self, f: &FieldDesc) -> Vec<KElem> {
        let n = self.rows;
        let mut coeffs = vec![f.zero(); n + 1];
        coeffs[n] = f.one();
        let mut mk = Mat::zeros(f, n, n);
        for k in 1..=n {
            // M_k = A·M_{k−1} + c_{n−k+1}·I, c_{n−k} = −tr(A·M_k)/k
            mk = self
                .mul(f, &mk)
                .expect("square")
                .add_scalar(f, &coeffs[n - k + 1]);
            let am = self.mul(f, &mk).expect("square");
            let c = f.scale(&am.trace(f), &Q::new((-1).into(), (k as i64).into()));
            coeffs[n - k] = c;
        }
        coeffs
    }

    pub fn to_strings(&self) -> Vec<Vec<Vec<String>>> {
        (0..self.rows)
            .map(|i| (0..self.cols).map(|j| self.get(i, j).to_strings()).collect())
            .collect()
    }
}

impl Serialize for Mat {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_strings().serialize(s)
    }
}

/// Parses a matrix given as nested arrays of field elements (each a rational
/// string or an array of coordinate strings).
pub fn mat_from_raw(f: &FieldDesc, raw: &[Vec<crate::coefficients::RawKElem>]) -> Result<Mat> {
    let rows = raw
        .iter()
        .map(|row| {
            row.iter()
                .map(|x| f.elem_from_strings(&x.0))
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    Mat::from_rows(rows)
}
