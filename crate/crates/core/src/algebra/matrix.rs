//! Matrices over [`BiLaurent`] and over [`UniPoly`], with exact determinants.

use std::fmt;
use std::ops::Mul;

use num_traits::Zero;

use super::bilaurent::BiLaurent;
use super::rational::Rational;
use super::unipoly::UniPoly;
use crate::error::{Error, Result};

/// Largest dimension accepted by the cofactor-expansion determinant.
pub const MAX_COFACTOR_DIM: usize = 12;

/// Rectangular matrix with [`BiLaurent`] entries, stored row-major.
#[derive(Clone, PartialEq, Eq)]
pub struct LaurentMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<BiLaurent>,
}

impl LaurentMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            entries: vec![BiLaurent::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_fn(n, n, |i, j| if i == j { BiLaurent::one() } else { BiLaurent::zero() })
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> BiLaurent) -> Self {
        let mut entries = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                entries.push(f(i, j));
            }
        }
        Self { rows, cols, entries }
    }

    pub fn from_rows(rows: Vec<Vec<BiLaurent>>) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::Dimension("ragged rows".into()));
        }
        Ok(Self {
            rows: r,
            cols: c,
            entries: rows.into_iter().flatten().collect(),
        })
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

    pub fn get(&self, i: usize, j: usize) -> &BiLaurent {
        &self.entries[i * self.cols + j]
    }

    pub fn get_checked(&self, i: usize, j: usize) -> Result<&BiLaurent> {
        if i >= self.rows || j >= self.cols {
            return Err(self.out_of_range(i, j));
        }
        Ok(self.get(i, j))
    }

    pub fn set(&mut self, i: usize, j: usize, v: BiLaurent) {
        self.entries[i * self.cols + j] = v;
    }

    pub fn entry_mut(&mut self, i: usize, j: usize) -> &mut BiLaurent {
        &mut self.entries[i * self.cols + j]
    }

    fn out_of_range(&self, row: usize, col: usize) -> Error {
        Error::IndexOutOfRange {
            row,
            col,
            rows: self.rows,
            cols: self.cols,
        }
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self.get(j, i).clone())
    }

    pub fn map(&self, f: impl Fn(&BiLaurent) -> BiLaurent) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.iter().map(f).collect(),
        }
    }

    /// `self - x·E`.
    pub fn sub_x_identity(&self) -> Result<Self> {
        if !self.is_square() {
            return Err(Error::Dimension("x-shift of a non-square matrix".into()));
        }
        let mut out = self.clone();
        for i in 0..self.rows {
            let e = out.entry_mut(i, i);
            *e = &*e - &BiLaurent::x();
        }
        Ok(out)
    }

    pub fn try_mul(&self, rhs: &Self) -> Result<Self> {
        if self.cols != rhs.rows {
            return Err(Error::Dimension(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, rhs.rows, rhs.cols
            )));
        }
        Ok(Self::from_fn(self.rows, rhs.cols, |i, j| {
            let mut acc = BiLaurent::zero();
            for k in 0..self.cols {
                let a = self.get(i, k);
                let b = rhs.get(k, j);
                if !a.is_zero() && !b.is_zero() {
                    acc = acc + a * b;
                }
            }
            acc
        }))
    }

    /// Submatrix with row `i` and column `j` removed (0-based).
    pub fn minor_matrix(&self, i: usize, j: usize) -> Result<Self> {
        if i >= self.rows || j >= self.cols {
            return Err(self.out_of_range(i, j));
        }
        let mut entries = Vec::with_capacity((self.rows - 1) * (self.cols - 1));
        for r in (0..self.rows).filter(|&r| r != i) {
            for c in (0..self.cols).filter(|&c| c != j) {
                entries.push(self.get(r, c).clone());
            }
        }
        Ok(Self {
            rows: self.rows - 1,
            cols: self.cols - 1,
            entries,
        })
    }

    /// Submatrix keeping the listed rows and columns, in order.
    pub fn select(&self, rows: &[usize], cols: &[usize]) -> Self {
        Self::from_fn(rows.len(), cols.len(), |i, j| self.get(rows[i], cols[j]).clone())
    }

    /// Exact determinant. Uses fraction-free Bareiss elimination over `Q[x]`
    /// when no entry depends on `y`, memoized cofactor expansion otherwise.
    pub fn det(&self) -> Result<BiLaurent> {
        if !self.is_square() {
            return Err(Error::Dimension(format!(
                "determinant of a non-square {}x{} matrix",
                self.rows, self.cols
            )));
        }
        if self.entries.iter().all(BiLaurent::is_y_free) {
            let pm = PolyMatrix::from_fn(self.rows, |i, j| {
                self.get(i, j).to_x_poly().expect("checked y-free")
            });
            return Ok(BiLaurent::from_x_poly(&pm.det()));
        }
        self.det_cofactor()
    }

    /// Laplace expansion row by row, memoized on the set of used columns.
    pub fn det_cofactor(&self) -> Result<BiLaurent> {
        let n = self.rows;
        if n > MAX_COFACTOR_DIM {
            return Err(Error::Dimension(format!(
                "cofactor determinant limited to {MAX_COFACTOR_DIM}x{MAX_COFACTOR_DIM}, got {n}x{n}"
            )));
        }
        let mut layer: Vec<(u32, BiLaurent)> = vec![(0, BiLaurent::one())];
        for r in 0..n {
            let mut next: std::collections::BTreeMap<u32, BiLaurent> = Default::default();
            for (mask, val) in &layer {
                for c in 0..n {
                    if mask & (1 << c) != 0 {
                        continue;
                    }
                    let a = self.get(r, c);
                    if a.is_zero() {
                        continue;
                    }
                    let larger_used = (mask >> (c + 1)).count_ones();
                    let term = val * a;
                    let term = if larger_used % 2 == 1 { -term } else { term };
                    let slot = next.entry(mask | (1 << c)).or_default();
                    *slot = &*slot + &term;
                }
            }
            layer = next.into_iter().filter(|(_, v)| !v.is_zero()).collect();
        }
        Ok(layer.pop().map(|(_, v)| v).unwrap_or_default())
    }

    /// `(-1)^(i+j)` times the `(i, j)` minor (0-based indices; the parity is
    /// the same as for 1-based ones).
    pub fn minor_signed(&self, i: usize, j: usize) -> Result<BiLaurent> {
        if !self.is_square() {
            return Err(Error::Dimension("signed minor of a non-square matrix".into()));
        }
        let d = self.minor_matrix(i, j)?.det()?;
        Ok(if (i + j) % 2 == 1 { -d } else { d })
    }

    /// `S · self · S^{-1}` for the cyclic shift `S` with `S[0][n-1] = y^{-1}`
    /// and `S[i][i-1] = 1`, i.e. the operator acting on
    /// `(y^{-1} v_n, v_1, …, v_{n-1})`.
    pub fn conjugate_by_cyclic_shift(&self) -> Result<Self> {
        let n = self.rows;
        let s = Self::from_fn(n, n, |i, j| {
            if i == 0 && j == n - 1 {
                BiLaurent::y_inv()
            } else if i >= 1 && j == i - 1 {
                BiLaurent::one()
            } else {
                BiLaurent::zero()
            }
        });
        let s_inv = Self::from_fn(n, n, |i, j| {
            if i == n - 1 && j == 0 {
                BiLaurent::y()
            } else if j >= 1 && i == j - 1 {
                BiLaurent::one()
            } else {
                BiLaurent::zero()
            }
        });
        s.try_mul(self)?.try_mul(&s_inv)
    }

    pub fn entries(&self) -> &[BiLaurent] {
        &self.entries
    }
}

impl Mul<&LaurentMatrix> for &LaurentMatrix {
    type Output = LaurentMatrix;
    /// # Panics
    /// On incompatible dimensions; use [`LaurentMatrix::try_mul`] to handle them.
    fn mul(self, rhs: &LaurentMatrix) -> LaurentMatrix {
        self.try_mul(rhs).expect("incompatible matrix dimensions")
    }
}

impl fmt::Debug for LaurentMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "LaurentMatrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            let row: Vec<String> = (0..self.cols).map(|j| self.get(i, j).to_string()).collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        write!(f, "]")
    }
}

/// Square matrix over `Q[x]`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct PolyMatrix {
    n: usize,
    entries: Vec<UniPoly>,
}

impl PolyMatrix {
    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> UniPoly) -> Self {
        let mut entries = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                entries.push(f(i, j));
            }
        }
        Self { n, entries }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> &UniPoly {
        &self.entries[i * self.n + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: UniPoly) {
        self.entries[i * self.n + j] = v;
    }

    /// Bareiss fraction-free elimination; every intermediate division is exact.
    pub fn det(&self) -> UniPoly {
        let n = self.n;
        if n == 0 {
            return UniPoly::one();
        }
        let mut a: Vec<Vec<UniPoly>> = (0..n)
            .map(|i| (0..n).map(|j| self.get(i, j).clone()).collect())
            .collect();
        let mut negate = false;
        let mut prev = UniPoly::one();
        for k in 0..n - 1 {
            if a[k][k].is_zero() {
                let Some(p) = (k + 1..n).find(|&i| !a[i][k].is_zero()) else {
                    return UniPoly::zero();
                };
                a.swap(k, p);
                negate = !negate;
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let num = &(&a[i][j] * &a[k][k]) - &(&a[i][k] * &a[k][j]);
                    a[i][j] = num
                        .exact_div(&prev)
                        .expect("Bareiss step must divide exactly");
                }
                a[i][k] = UniPoly::zero();
            }
            prev = a[k][k].clone();
        }
        let d = a[n - 1][n - 1].clone();
        if negate {
            -d
        } else {
            d
        }
    }
}

/// Determinant of a rational matrix given row-major.
pub fn det_rational(rows: &[Vec<Rational>]) -> Rational {
    let n = rows.len();
    let pm = PolyMatrix::from_fn(n, |i, j| UniPoly::constant(rows[i][j].clone()));
    let d = pm.det();
    if d.is_zero() {
        Rational::zero()
    } else {
        d.coeff(0)
    }
}
