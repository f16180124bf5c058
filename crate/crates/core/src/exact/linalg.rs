//! Dense exact vectors and matrices, Gaussian elimination and nullspaces.

use std::fmt;
use std::ops::{Deref, DerefMut, Index, IndexMut};

use num_traits::{One, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::rat::{display_rat, rat_seq, Rat};
use crate::error::{shape, Result};

/// Dense vector of exact rationals.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct RVec(Vec<Rat>);

impl RVec {
    pub fn new(entries: Vec<Rat>) -> Self {
        RVec(entries)
    }

    pub fn zeros(len: usize) -> Self {
        RVec(vec![Rat::zero(); len])
    }

    /// Standard basis vector `e_index` of length `len`.
    pub fn unit(len: usize, index: usize) -> Self {
        let mut v = Self::zeros(len);
        v.0[index] = Rat::one();
        v
    }

    pub fn from_i64(entries: &[i64]) -> Self {
        RVec(entries.iter().map(|&x| super::rat::int(x)).collect())
    }

    pub fn into_inner(self) -> Vec<Rat> {
        self.0
    }

    fn check_len(&self, other: &RVec, op: &str) -> Result<()> {
        if self.len() != other.len() {
            return Err(shape(format!(
                "{op}: vector lengths {} and {}",
                self.len(),
                other.len()
            )));
        }
        Ok(())
    }

    pub fn dot(&self, other: &RVec) -> Result<Rat> {
        self.check_len(other, "dot")?;
        Ok(dot(&self.0, &other.0))
    }

    pub fn add(&self, other: &RVec) -> Result<RVec> {
        self.check_len(other, "add")?;
        Ok(RVec(self.iter().zip(other.iter()).map(|(a, b)| a + b).collect()))
    }

    pub fn sub(&self, other: &RVec) -> Result<RVec> {
        self.check_len(other, "sub")?;
        Ok(RVec(self.iter().zip(other.iter()).map(|(a, b)| a - b).collect()))
    }

    pub fn scale(&self, factor: &Rat) -> RVec {
        RVec(self.iter().map(|x| x * factor).collect())
    }

    pub fn is_zero(&self) -> bool {
        self.iter().all(Zero::is_zero)
    }

    pub fn sum(&self) -> Rat {
        self.iter().fold(Rat::zero(), |acc, x| acc + x)
    }
}

pub(crate) fn dot(a: &[Rat], b: &[Rat]) -> Rat {
    a.iter()
        .zip(b)
        .filter(|(x, y)| !x.is_zero() && !y.is_zero())
        .fold(Rat::zero(), |acc, (x, y)| acc + x * y)
}

impl Deref for RVec {
    type Target = [Rat];
    fn deref(&self) -> &[Rat] {
        &self.0
    }
}

impl DerefMut for RVec {
    fn deref_mut(&mut self) -> &mut [Rat] {
        &mut self.0
    }
}

impl From<Vec<Rat>> for RVec {
    fn from(v: Vec<Rat>) -> Self {
        RVec(v)
    }
}

impl FromIterator<Rat> for RVec {
    fn from_iter<I: IntoIterator<Item = Rat>>(iter: I) -> Self {
        RVec(iter.into_iter().collect())
    }
}

impl fmt::Display for RVec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, x) in self.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{}", display_rat(x))?;
        }
        write!(f, ")")
    }
}

impl Serialize for RVec {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        rat_seq::serialize(&self.0, s)
    }
}

impl<'de> Deserialize<'de> for RVec {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        rat_seq::deserialize(d).map(RVec)
    }
}

/// Dense row-major matrix of exact rationals.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RMat {
    rows: usize,
    cols: usize,
    data: Vec<Rat>,
}

impl RMat {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        RMat {
            rows,
            cols,
            data: vec![Rat::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Rat::one();
        }
        m
    }

    /// Builds a matrix from rows; all rows must have `cols` entries.
    pub fn from_rows(rows: Vec<RVec>, cols: usize) -> Result<Self> {
        let n = rows.len();
        let mut data = Vec::with_capacity(n * cols);
        for (i, r) in rows.into_iter().enumerate() {
            if r.len() != cols {
                return Err(shape(format!("row {i} has {} entries, expected {cols}", r.len())));
            }
            data.extend(r.into_inner());
        }
        Ok(RMat { rows: n, cols, data })
    }

    /// Builds a matrix whose columns are the given vectors.
    pub fn from_columns(columns: &[RVec], rows: usize) -> Result<Self> {
        let mut m = Self::zeros(rows, columns.len());
        for (j, c) in columns.iter().enumerate() {
            if c.len() != rows {
                return Err(shape(format!("column {j} has {} entries, expected {rows}", c.len())));
            }
            for i in 0..rows {
                m[(i, j)] = c[i].clone();
            }
        }
        Ok(m)
    }

    pub fn from_i64(rows: &[&[i64]]) -> Result<Self> {
        let cols = rows.first().map_or(0, |r| r.len());
        Self::from_rows(rows.iter().map(|r| RVec::from_i64(r)).collect(), cols)
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

    pub fn row(&self, i: usize) -> &[Rat] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_vec(&self, i: usize) -> RVec {
        RVec::new(self.row(i).to_vec())
    }

    pub fn column(&self, j: usize) -> RVec {
        (0..self.rows).map(|i| self[(i, j)].clone()).collect()
    }

    pub fn row_vecs(&self) -> Vec<RVec> {
        (0..self.rows).map(|i| self.row_vec(i)).collect()
    }

    /// Entries in row-major order.
    pub fn entries(&self) -> &[Rat] {
        &self.data
    }

    /// Reshapes a row-major vector of `rows * cols` entries.
    pub fn from_flat(rows: usize, cols: usize, flat: RVec) -> Result<Self> {
        if flat.len() != rows * cols {
            return Err(shape(format!("cannot reshape {} entries to {rows}x{cols}", flat.len())));
        }
        Ok(RMat {
            rows,
            cols,
            data: flat.into_inner(),
        })
    }

    pub fn transpose(&self) -> RMat {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)].clone();
            }
        }
        t
    }

    pub fn mul_vec(&self, v: &RVec) -> Result<RVec> {
        if v.len() != self.cols {
            return Err(shape(format!(
                "matrix {}x{} times vector of length {}",
                self.rows,
                self.cols,
                v.len()
            )));
        }
        Ok((0..self.rows).map(|i| dot(self.row(i), v)).collect())
    }

    pub fn mul(&self, other: &RMat) -> Result<RMat> {
        if self.cols != other.rows {
            return Err(shape(format!(
                "matrix {}x{} times matrix {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = &other[(k, j)];
                    if !b.is_zero() {
                        out[(i, j)] += a * b;
                    }
                }
            }
        }
        Ok(out)
    }

    fn zip_with(&self, other: &RMat, op: &str, f: impl Fn(&Rat, &Rat) -> Rat) -> Result<RMat> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(shape(format!(
                "{op}: {}x{} and {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        Ok(RMat {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| f(a, b)).collect(),
        })
    }

    pub fn add(&self, other: &RMat) -> Result<RMat> {
        self.zip_with(other, "add", |a, b| a + b)
    }

    pub fn sub(&self, other: &RMat) -> Result<RMat> {
        self.zip_with(other, "sub", |a, b| a - b)
    }

    pub fn scale(&self, factor: &Rat) -> RMat {
        RMat {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|x| x * factor).collect(),
        }
    }

    pub fn is_identity(&self) -> bool {
        self.is_square()
            && (0..self.rows).all(|i| {
                (0..self.cols).all(|j| {
                    let x = &self[(i, j)];
                    if i == j {
                        x.is_one()
                    } else {
                        x.is_zero()
                    }
                })
            })
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Zero::is_zero)
    }

    pub fn rank(&self) -> usize {
        let mut rows: Vec<Vec<Rat>> = (0..self.rows).map(|i| self.row(i).to_vec()).collect();
        rref(&mut rows, self.cols).len()
    }
}

impl Index<(usize, usize)> for RMat {
    type Output = Rat;
    fn index(&self, (i, j): (usize, usize)) -> &Rat {
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for RMat {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Rat {
        &mut self.data[i * self.cols + j]
    }
}

impl fmt::Display for RMat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let cells: Vec<String> = self.data.iter().map(display_rat).collect();
        let width = cells.iter().map(String::len).max().unwrap_or(1);
        for i in 0..self.rows {
            write!(f, "[")?;
            for j in 0..self.cols {
                if j > 0 {
                    write!(f, " ")?;
                }
                write!(f, "{:>width$}", cells[i * self.cols + j])?;
            }
            writeln!(f, "]")?;
        }
        Ok(())
    }
}

/// Reduces `rows` in place to reduced row echelon form, pivoting only on
/// the first `pivot_cols` columns. Returns the pivot column of each
/// nonzero row; rows past the returned length are zero in those columns.
pub(crate) fn rref(rows: &mut [Vec<Rat>], pivot_cols: usize) -> Vec<usize> {
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..pivot_cols {
        if r == rows.len() {
            break;
        }
        let Some(p) = (r..rows.len()).find(|&i| !rows[i][c].is_zero()) else {
            continue;
        };
        rows.swap(r, p);
        let inv = rows[r][c].recip();
        for x in rows[r].iter_mut() {
            if !x.is_zero() {
                *x *= &inv;
            }
        }
        for i in 0..rows.len() {
            if i == r || rows[i][c].is_zero() {
                continue;
            }
            let factor = rows[i][c].clone();
            let (pivot_row, target) = if i < r {
                let (a, b) = rows.split_at_mut(r);
                (&b[0], &mut a[i])
            } else {
                let (a, b) = rows.split_at_mut(i);
                (&a[r], &mut b[0])
            };
            for (t, p) in target.iter_mut().zip(pivot_row.iter()) {
                if !p.is_zero() {
                    *t -= &factor * p;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

/// Solution of `A x = b`: one particular solution plus a basis of the
/// homogeneous solutions.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LinearSolution {
    pub particular: RVec,
    pub nullspace_basis: Vec<RVec>,
    pub rank: usize,
}

/// Exact Gaussian elimination. `Ok(None)` means the system is inconsistent.
pub fn solve_linear(a: &RMat, b: &RVec) -> Result<Option<LinearSolution>> {
    if a.rows() != b.len() {
        return Err(shape(format!(
            "system has {} rows but right-hand side has {} entries",
            a.rows(),
            b.len()
        )));
    }
    let n = a.cols();
    let mut aug: Vec<Vec<Rat>> = (0..a.rows())
        .map(|i| {
            let mut row = a.row(i).to_vec();
            row.push(b[i].clone());
            row
        })
        .collect();
    let pivots = rref(&mut aug, n);
    if aug[pivots.len()..].iter().any(|row| !row[n].is_zero()) {
        return Ok(None);
    }
    let mut particular = RVec::zeros(n);
    for (r, &c) in pivots.iter().enumerate() {
        particular[c] = aug[r][n].clone();
    }
    Ok(Some(LinearSolution {
        particular,
        nullspace_basis: kernel_from_rref(&aug, &pivots, n),
        rank: pivots.len(),
    }))
}

fn kernel_from_rref(rows: &[Vec<Rat>], pivots: &[usize], n: usize) -> Vec<RVec> {
    let mut is_pivot = vec![false; n];
    for &c in pivots {
        is_pivot[c] = true;
    }
    (0..n)
        .filter(|&f| !is_pivot[f])
        .map(|f| {
            let mut v = RVec::zeros(n);
            v[f] = Rat::one();
            for (r, &c) in pivots.iter().enumerate() {
                v[c] = -rows[r][f].clone();
            }
            v
        })
        .collect()
}

/// Basis of `{x : A x = 0}`; empty iff `A` has full column rank.
pub fn nullspace(a: &RMat) -> Vec<RVec> {
    let mut rows: Vec<Vec<Rat>> = (0..a.rows()).map(|i| a.row(i).to_vec()).collect();
    let pivots = rref(&mut rows, a.cols());
    kernel_from_rref(&rows, &pivots, a.cols())
}

/// Rank of a set of equal-length vectors.
pub fn rank_of(vectors: &[RVec]) -> usize {
    independent_subset(vectors).len()
}

/// Indices of a maximal linearly independent subset, chosen greedily in order.
pub fn independent_subset(vectors: &[RVec]) -> Vec<usize> {
    let Some(first) = vectors.first() else {
        return Vec::new();
    };
    let n = first.len();
    let mut basis: Vec<Vec<Rat>> = Vec::new();
    let mut chosen = Vec::new();
    for (idx, v) in vectors.iter().enumerate() {
        let mut rows = basis.clone();
        rows.push(v.to_vec());
        if rref(&mut rows, n).len() > basis.len() {
            basis.push(v.to_vec());
            chosen.push(idx);
        }
    }
    chosen
}
