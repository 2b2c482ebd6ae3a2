//! Dense matrices over GF(p).
//!
//! Entries are `u8` digits stored row-major. Rank, row reduction, inversion
//! and kernels take the bit-packed path from [`crate::gf2`] over GF(2) when
//! the matrix fits in machine words; the `*_generic` variants are kept
//! public so both paths can be compared.

use std::fmt;

use crate::error::{Error, Result};
use crate::field::{FieldElem, FieldOrder};
use crate::gf2::{self, BitMat};

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Mat {
    rows: usize,
    cols: usize,
    order: FieldOrder,
    data: Vec<u8>,
}

/// The four blocks `[[K, C], [L, A]]` of a matrix split after `r` rows and
/// `r` columns.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Blocks {
    pub k: Mat,
    pub c: Mat,
    pub l: Mat,
    pub a: Mat,
}

impl Mat {
    pub fn zeros(rows: usize, cols: usize, order: FieldOrder) -> Self {
        Mat {
            rows,
            cols,
            order,
            data: vec![0; rows * cols],
        }
    }

    pub fn identity(n: usize, order: FieldOrder) -> Self {
        let mut m = Mat::zeros(n, n, order);
        for i in 0..n {
            m.data[i * n + i] = 1;
        }
        m
    }

    /// `J_r`: the identity block `I_r` padded with zeros.
    pub fn j_r(r: usize, rows: usize, cols: usize, order: FieldOrder) -> Self {
        let mut m = Mat::zeros(rows, cols, order);
        for i in 0..r.min(rows).min(cols) {
            m.data[i * cols + i] = 1;
        }
        m
    }

    /// Elementary matrix with a single 1 at `(i, j)`.
    pub fn unit(rows: usize, cols: usize, i: usize, j: usize, order: FieldOrder) -> Self {
        let mut m = Mat::zeros(rows, cols, order);
        m.data[i * cols + j] = 1;
        m
    }

    pub fn from_digits(rows: usize, cols: usize, order: FieldOrder, data: Vec<u8>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::Shape(format!(
                "{} entries for a {rows}x{cols} matrix",
                data.len()
            )));
        }
        if let Some(bad) = data.iter().find(|&&d| d >= order.get()) {
            return Err(Error::OutOfRange(format!("digit {bad} in {order}")));
        }
        Ok(Mat {
            rows,
            cols,
            order,
            data,
        })
    }

    /// Builds a matrix from integer rows, reducing every entry mod p.
    pub fn from_rows<R: AsRef<[i64]>>(order: FieldOrder, rows: &[R]) -> Result<Self> {
        let cols = rows.first().map_or(0, |r| r.as_ref().len());
        let mut data = Vec::with_capacity(rows.len() * cols);
        for r in rows {
            let r = r.as_ref();
            if r.len() != cols {
                return Err(Error::Shape("ragged rows".into()));
            }
            let p = order.get() as i64;
            data.extend(r.iter().map(|&x| x.rem_euclid(p) as u8));
        }
        Ok(Mat {
            rows: rows.len(),
            cols,
            order,
            data,
        })
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

    pub fn order(&self) -> FieldOrder {
        self.order
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> u8 {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: u8) {
        debug_assert!(v < self.order.get());
        self.data[i * self.cols + j] = v;
    }

    pub fn elem(&self, i: usize, j: usize) -> FieldElem {
        FieldElem::new(self.get(i, j) as u32, self.order)
    }

    pub fn row(&self, i: usize) -> &[u8] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<u8> {
        (0..self.rows).map(|i| self.get(i, j)).collect()
    }

    /// Row-major vectorization.
    pub fn digits(&self) -> &[u8] {
        &self.data
    }

    pub fn into_digits(self) -> Vec<u8> {
        self.data
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&d| d == 0)
    }

    pub fn transpose(&self) -> Mat {
        let mut t = Mat::zeros(self.cols, self.rows, self.order);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.data[j * self.rows + i] = self.get(i, j);
            }
        }
        t
    }

    fn check_same(&self, other: &Mat) -> Result<()> {
        if self.order != other.order {
            return Err(Error::FieldMismatch(self.order.get(), other.order.get()));
        }
        Ok(())
    }

    pub fn add(&self, other: &Mat) -> Result<Mat> {
        self.check_same(other)?;
        if self.shape() != other.shape() {
            return Err(Error::Shape(format!("{:?} + {:?}", self.shape(), other.shape())));
        }
        let o = self.order;
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(&a, &b)| o.add(a, b))
            .collect();
        Ok(Mat { data, ..*self })
    }

    pub fn sub(&self, other: &Mat) -> Result<Mat> {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Mat {
        let o = self.order;
        Mat {
            data: self.data.iter().map(|&a| o.neg(a)).collect(),
            ..*self
        }
    }

    pub fn scale(&self, s: u8) -> Mat {
        let o = self.order;
        Mat {
            data: self.data.iter().map(|&a| o.mul(a, s)).collect(),
            ..*self
        }
    }

    pub fn mul(&self, other: &Mat) -> Result<Mat> {
        self.check_same(other)?;
        if self.cols != other.rows {
            return Err(Error::Shape(format!(
                "{:?} * {:?}",
                self.shape(),
                other.shape()
            )));
        }
        let mut out = Mat::zeros(self.rows, other.cols, self.order);
        mul_into(
            &self.data,
            &other.data,
            &mut out.data,
            self.rows,
            self.cols,
            other.cols,
            self.order,
        );
        Ok(out)
    }

    /// Matrix-vector product.
    pub fn apply(&self, x: &[u8]) -> Result<Vec<u8>> {
        if x.len() != self.cols {
            return Err(Error::Shape(format!("{}x{} times {}", self.rows, self.cols, x.len())));
        }
        let o = self.order;
        Ok((0..self.rows)
            .map(|i| dot(self.row(i), x, o))
            .collect())
    }

    fn packable(&self) -> bool {
        self.order.is_binary() && self.cols <= 64 && self.rows <= 64
    }

    pub fn rank(&self) -> usize {
        if self.packable() {
            BitMat::from_mat(self).rank()
        } else {
            self.rank_generic()
        }
    }

    pub fn rank_generic(&self) -> usize {
        let mut d = self.data.clone();
        rref_in_place(&mut d, self.rows, self.cols, self.order, None).len()
    }

    /// Reduced row echelon form `R` and invertible `T` with `T * self = R`.
    ///
    /// Pivots are taken as the first nonzero entry of the leftmost remaining
    /// column, scanning rows top to bottom.
    pub fn rref(&self) -> (Mat, Mat) {
        if self.packable() {
            let (r, t) = BitMat::from_mat(self).rref_with_transform();
            (r.to_mat(), t.to_mat())
        } else {
            self.rref_generic()
        }
    }

    pub fn rref_generic(&self) -> (Mat, Mat) {
        let mut r = self.data.clone();
        let mut t = Mat::identity(self.rows, self.order).data;
        rref_in_place(&mut r, self.rows, self.cols, self.order, Some(&mut t));
        (
            Mat { data: r, ..*self },
            Mat {
                rows: self.rows,
                cols: self.rows,
                order: self.order,
                data: t,
            },
        )
    }

    pub fn inverse(&self) -> Result<Mat> {
        if !self.is_square() {
            return Err(Error::Shape(format!("inverse of {:?}", self.shape())));
        }
        if self.packable() {
            return BitMat::from_mat(self)
                .inverse()
                .map(|t| t.to_mat())
                .ok_or(Error::Singular);
        }
        self.inverse_generic()
    }

    pub fn inverse_generic(&self) -> Result<Mat> {
        if !self.is_square() {
            return Err(Error::Shape(format!("inverse of {:?}", self.shape())));
        }
        let (r, t) = self.rref_generic();
        if r == Mat::identity(self.rows, self.order) {
            Ok(t)
        } else {
            Err(Error::Singular)
        }
    }

    pub fn is_invertible(&self) -> bool {
        self.is_square() && self.rank() == self.rows
    }

    /// Determinant by elimination. Panics on non-square input.
    pub fn det(&self) -> u8 {
        assert!(self.is_square(), "determinant of a non-square matrix");
        det_by_elimination(&self.data, self.rows, self.order)
    }

    /// The matrix of cofactors `N~`, satisfying `M * N~^T = det(M) * I`.
    pub fn adjugate(&self) -> Result<Mat> {
        if !self.is_square() {
            return Err(Error::Shape(format!("cofactors of {:?}", self.shape())));
        }
        let n = self.rows;
        let o = self.order;
        if n == 0 {
            return Ok(self.clone());
        }
        if n == 1 {
            return Ok(Mat::identity(1, o));
        }
        if n > 4 {
            if let Ok(inv) = self.inverse() {
                // N~^T = det * M^-1
                return Ok(inv.transpose().scale(self.det()));
            }
        }
        let mut out = Mat::zeros(n, n, o);
        let mut minor = vec![0u8; (n - 1) * (n - 1)];
        for i in 0..n {
            for j in 0..n {
                let mut k = 0;
                for a in (0..n).filter(|&a| a != i) {
                    for b in (0..n).filter(|&b| b != j) {
                        minor[k] = self.get(a, b);
                        k += 1;
                    }
                }
                let d = if n - 1 <= 4 {
                    det_by_expansion(&minor, n - 1, o)
                } else {
                    det_by_elimination(&minor, n - 1, o)
                };
                let d = if (i + j) % 2 == 1 { o.neg(d) } else { d };
                out.data[i * n + j] = d;
            }
        }
        Ok(out)
    }

    /// Basis of the null space `{x : M x = 0}`, one vector per free column,
    /// in reduced (canonical) form.
    pub fn kernel_basis(&self) -> Vec<Vec<u8>> {
        if self.packable() {
            let cols = self.cols;
            let mut ker: Vec<u64> = BitMat::from_mat(self).kernel();
            gf2::rref_rows(&mut ker, cols, None);
            return ker.into_iter().map(|v| gf2::unpack_digits(v, cols)).collect();
        }
        self.kernel_basis_generic()
    }

    pub fn kernel_basis_generic(&self) -> Vec<Vec<u8>> {
        let mut ker = kernel_of_rows(&self.data, self.rows, self.cols, self.order);
        let dim = ker.len();
        let mut flat: Vec<u8> = ker.drain(..).flatten().collect();
        rref_in_place(&mut flat, dim, self.cols, self.order, None);
        flat.chunks(self.cols.max(1)).take(dim).map(|c| c.to_vec()).collect()
    }

    /// Canonical (reduced echelon) basis of the column space.
    pub fn image_basis(&self) -> Vec<Vec<u8>> {
        let t = self.transpose();
        let (r, _) = t.rref();
        let rank = r.nonzero_rows();
        (0..rank).map(|i| r.row(i).to_vec()).collect()
    }

    fn nonzero_rows(&self) -> usize {
        (0..self.rows)
            .filter(|&i| self.row(i).iter().any(|&d| d != 0))
            .count()
    }

    pub fn submatrix(&self, r0: usize, r1: usize, c0: usize, c1: usize) -> Mat {
        let mut out = Mat::zeros(r1 - r0, c1 - c0, self.order);
        for i in r0..r1 {
            for j in c0..c1 {
                out.data[(i - r0) * (c1 - c0) + (j - c0)] = self.get(i, j);
            }
        }
        out
    }

    /// Splits into `[[K, C], [L, A]]` with `K` of size `r x r`.
    pub fn block_extract(&self, r: usize) -> Result<Blocks> {
        if r > self.rows.min(self.cols) {
            return Err(Error::Shape(format!(
                "block size {r} exceeds {}x{}",
                self.rows, self.cols
            )));
        }
        Ok(Blocks {
            k: self.submatrix(0, r, 0, r),
            c: self.submatrix(0, r, r, self.cols),
            l: self.submatrix(r, self.rows, 0, r),
            a: self.submatrix(r, self.rows, r, self.cols),
        })
    }

    pub fn block_compose(blocks: &Blocks) -> Result<Mat> {
        let Blocks { k, c, l, a } = blocks;
        let r = k.rows;
        if k.cols != r
            || c.rows != r
            || l.cols != r
            || a.rows != l.rows
            || a.cols != c.cols
        {
            return Err(Error::Shape("inconsistent block shapes".into()));
        }
        let orders = [k.order, c.order, l.order, a.order];
        if orders.iter().any(|&o| o != k.order) {
            return Err(Error::FieldMismatch(k.order.get(), a.order.get()));
        }
        let rows = r + l.rows;
        let cols = r + c.cols;
        let mut out = Mat::zeros(rows, cols, k.order);
        for i in 0..rows {
            for j in 0..cols {
                let v = match (i < r, j < r) {
                    (true, true) => k.get(i, j),
                    (true, false) => c.get(i, j - r),
                    (false, true) => l.get(i - r, j),
                    (false, false) => a.get(i - r, j - r),
                };
                out.data[i * cols + j] = v;
            }
        }
        Ok(out)
    }

    /// Horizontal concatenation `[self | other]`.
    pub fn hcat(&self, other: &Mat) -> Result<Mat> {
        self.check_same(other)?;
        if self.rows != other.rows {
            return Err(Error::Shape("hcat with different row counts".into()));
        }
        let cols = self.cols + other.cols;
        let mut data = Vec::with_capacity(self.rows * cols);
        for i in 0..self.rows {
            data.extend_from_slice(self.row(i));
            data.extend_from_slice(other.row(i));
        }
        Ok(Mat {
            rows: self.rows,
            cols,
            order: self.order,
            data,
        })
    }

    /// Vertical concatenation.
    pub fn vcat(&self, other: &Mat) -> Result<Mat> {
        self.check_same(other)?;
        if self.cols != other.cols {
            return Err(Error::Shape("vcat with different column counts".into()));
        }
        let mut data = self.data.clone();
        data.extend_from_slice(&other.data);
        Ok(Mat {
            rows: self.rows + other.rows,
            cols: self.cols,
            order: self.order,
            data,
        })
    }

    /// Matrix whose columns are the given vectors.
    pub fn from_columns(rows: usize, order: FieldOrder, columns: &[Vec<u8>]) -> Mat {
        let cols = columns.len();
        let mut m = Mat::zeros(rows, cols, order);
        for (j, c) in columns.iter().enumerate() {
            for (i, &v) in c.iter().enumerate() {
                m.data[i * cols + j] = v;
            }
        }
        m
    }
}

impl fmt::Debug for Mat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Mat{}x{}[{}](", self.rows, self.cols, self.order)?;
        for i in 0..self.rows {
            if i > 0 {
                write!(f, "; ")?;
            }
            for (j, d) in self.row(i).iter().enumerate() {
                if j > 0 {
                    write!(f, " ")?;
                }
                write!(f, "{d}")?;
            }
        }
        write!(f, ")")
    }
}

impl fmt::Display for Mat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.rows {
            let line: Vec<String> = self.row(i).iter().map(|d| d.to_string()).collect();
            writeln!(f, "{}", line.join(" "))?;
        }
        Ok(())
    }
}

#[inline]
pub(crate) fn dot(a: &[u8], b: &[u8], o: FieldOrder) -> u8 {
    let s: u32 = a.iter().zip(b).map(|(&x, &y)| x as u32 * y as u32).sum();
    o.reduce(s)
}

/// `out = a (n x k) * b (k x m)`.
#[inline]
pub(crate) fn mul_into(a: &[u8], b: &[u8], out: &mut [u8], n: usize, k: usize, m: usize, o: FieldOrder) {
    for i in 0..n {
        for j in 0..m {
            let mut s = 0u32;
            for t in 0..k {
                s += a[i * k + t] as u32 * b[t * m + j] as u32;
            }
            out[i * m + j] = o.reduce(s);
        }
    }
}

/// Gauss-Jordan elimination on a row-major buffer. Returns pivot columns;
/// the nonzero rows of the result come first. Row operations are mirrored
/// on `transform` (a `rows x rows` buffer) when given.
pub(crate) fn rref_in_place(
    data: &mut [u8],
    rows: usize,
    cols: usize,
    o: FieldOrder,
    mut transform: Option<&mut [u8]>,
) -> Vec<usize> {
    let mut pivots = Vec::new();
    let mut next = 0;
    for c in 0..cols {
        if next == rows {
            break;
        }
        let Some(found) = (next..rows).find(|&i| data[i * cols + c] != 0) else {
            continue;
        };
        if found != next {
            swap_rows(data, cols, next, found);
            if let Some(t) = transform.as_deref_mut() {
                swap_rows(t, rows, next, found);
            }
        }
        let inv = o.inv(data[next * cols + c]);
        if inv != 1 {
            for v in &mut data[next * cols..(next + 1) * cols] {
                *v = o.mul(*v, inv);
            }
            if let Some(t) = transform.as_deref_mut() {
                for v in &mut t[next * rows..(next + 1) * rows] {
                    *v = o.mul(*v, inv);
                }
            }
        }
        for i in 0..rows {
            if i == next {
                continue;
            }
            let f = data[i * cols + c];
            if f == 0 {
                continue;
            }
            let nf = o.neg(f);
            for j in 0..cols {
                let p = data[next * cols + j];
                if p != 0 {
                    data[i * cols + j] = o.mul_add(nf, p, data[i * cols + j]);
                }
            }
            if let Some(t) = transform.as_deref_mut() {
                for j in 0..rows {
                    let p = t[next * rows + j];
                    if p != 0 {
                        t[i * rows + j] = o.mul_add(nf, p, t[i * rows + j]);
                    }
                }
            }
        }
        pivots.push(c);
        next += 1;
    }
    pivots
}

fn swap_rows(data: &mut [u8], cols: usize, a: usize, b: usize) {
    if a == b {
        return;
    }
    let (lo, hi) = (a.min(b), a.max(b));
    let (head, tail) = data.split_at_mut(hi * cols);
    head[lo * cols..(lo + 1) * cols].swap_with_slice(&mut tail[..cols]);
}

/// Null space of the `rows x cols` matrix in `data`, not necessarily reduced.
pub(crate) fn kernel_of_rows(data: &[u8], rows: usize, cols: usize, o: FieldOrder) -> Vec<Vec<u8>> {
    let mut r = data.to_vec();
    let pivots = rref_in_place(&mut r, rows, cols, o, None);
    let mut is_pivot = vec![false; cols];
    for &c in &pivots {
        is_pivot[c] = true;
    }
    let mut out = Vec::new();
    for free in (0..cols).filter(|&c| !is_pivot[c]) {
        let mut v = vec![0u8; cols];
        v[free] = 1;
        for (i, &c) in pivots.iter().enumerate() {
            v[c] = o.neg(r[i * cols + free]);
        }
        out.push(v);
    }
    out
}

fn det_by_elimination(data: &[u8], n: usize, o: FieldOrder) -> u8 {
    let mut a = data.to_vec();
    let mut det = 1u8;
    for c in 0..n {
        let Some(found) = (c..n).find(|&i| a[i * n + c] != 0) else {
            return 0;
        };
        if found != c {
            swap_rows(&mut a, n, c, found);
            det = o.neg(det);
        }
        let piv = a[c * n + c];
        det = o.mul(det, piv);
        let inv = o.inv(piv);
        for i in c + 1..n {
            let f = o.mul(a[i * n + c], inv);
            if f == 0 {
                continue;
            }
            let nf = o.neg(f);
            for j in c..n {
                a[i * n + j] = o.mul_add(nf, a[c * n + j], a[i * n + j]);
            }
        }
    }
    det
}

/// Laplace expansion along the first row.
fn det_by_expansion(data: &[u8], n: usize, o: FieldOrder) -> u8 {
    match n {
        0 => 1,
        1 => data[0],
        2 => o.sub(o.mul(data[0], data[3]), o.mul(data[1], data[2])),
        _ => {
            let mut acc = 0u8;
            let mut minor = vec![0u8; (n - 1) * (n - 1)];
            for j in 0..n {
                if data[j] == 0 {
                    continue;
                }
                let mut k = 0;
                for a in 1..n {
                    for b in (0..n).filter(|&b| b != j) {
                        minor[k] = data[a * n + b];
                        k += 1;
                    }
                }
                let term = o.mul(data[j], det_by_expansion(&minor, n - 1, o));
                acc = if j % 2 == 0 { o.add(acc, term) } else { o.sub(acc, term) };
            }
            acc
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const F2: FieldOrder = FieldOrder::F2;
    const F3: FieldOrder = FieldOrder::F3;

    fn m(o: FieldOrder, rows: &[&[i64]]) -> Mat {
        Mat::from_rows(o, rows).unwrap()
    }

    // Cofactor-expansion determinant written independently of the
    // elimination routine, used as the oracle for full rank.
    fn oracle_det3(a: &Mat) -> i64 {
        let g = |i, j| a.get(i, j) as i64;
        g(0, 0) * (g(1, 1) * g(2, 2) - g(1, 2) * g(2, 1))
            - g(0, 1) * (g(1, 0) * g(2, 2) - g(1, 2) * g(2, 0))
            + g(0, 2) * (g(1, 0) * g(2, 1) - g(1, 1) * g(2, 0))
    }

    #[test]
    fn rank_examples() {
        assert_eq!(Mat::zeros(3, 3, F2).rank(), 0);
        assert_eq!(Mat::j_r(2, 3, 3, F2).rank(), 2);
        let a = m(F2, &[&[1, 0, 0], &[1, 1, 0], &[0, 1, 1]]);
        assert_ne!(oracle_det3(&a).rem_euclid(2), 0);
        assert_eq!(a.rank(), 3);
        assert_eq!(a.rank_generic(), 3);
    }

    #[test]
    fn rref_examples() {
        let id = Mat::identity(3, F3);
        assert_eq!(id.rref(), (id.clone(), id.clone()));

        let a = m(F2, &[&[1, 1], &[1, 1]]);
        let (r, t) = a.rref();
        assert_eq!(r, m(F2, &[&[1, 1], &[0, 0]]));
        assert_eq!(t.mul(&a).unwrap(), r);

        let b = m(F3, &[&[0, 1], &[1, 0]]);
        let (r, t) = b.rref();
        assert_eq!(r, Mat::identity(2, F3));
        assert_eq!(t, m(F3, &[&[0, 1], &[1, 0]]));
    }

    #[test]
    fn inverse_examples() {
        let id = Mat::identity(4, FieldOrder::F5);
        assert_eq!(id.inverse().unwrap(), id);
        let u = m(F2, &[&[1, 1], &[0, 1]]);
        assert_eq!(u.mul(&u).unwrap(), Mat::identity(2, F2));
        assert_eq!(u.inverse().unwrap(), u);
        assert_eq!(m(F2, &[&[1, 1], &[1, 1]]).inverse(), Err(Error::Singular));
        assert!(matches!(Mat::zeros(2, 3, F2).inverse(), Err(Error::Shape(_))));
    }

    #[test]
    fn adjugate_examples() {
        let a = m(F3, &[&[1, 2], &[0, 1]]);
        // cofactors of (a b; c d) are (d -c; -b a)
        assert_eq!(a.adjugate().unwrap(), m(F3, &[&[1, 0], &[1, 1]]));
        let id = Mat::identity(2, F3);
        assert_eq!(id.adjugate().unwrap(), id);
        // trace-zero 2x2 over GF(2): N~^T = N
        for bits in 0..16u8 {
            let d: Vec<u8> = (0..4).map(|k| (bits >> k) & 1).collect();
            let n = Mat::from_digits(2, 2, F2, d).unwrap();
            if o_trace(&n) == 0 {
                assert_eq!(n.adjugate().unwrap().transpose(), n);
            }
        }
    }

    fn o_trace(n: &Mat) -> u8 {
        n.order().add(n.get(0, 0), n.get(1, 1))
    }

    #[test]
    fn adjugate_identity_large() {
        let o = FieldOrder::F7;
        let a = m(
            o,
            &[
                &[1, 2, 0, 3, 1],
                &[0, 1, 4, 0, 2],
                &[5, 0, 1, 1, 0],
                &[0, 3, 0, 1, 6],
                &[2, 0, 0, 0, 1],
            ],
        );
        let adj = a.adjugate().unwrap();
        let lhs = a.mul(&adj.transpose()).unwrap();
        assert_eq!(lhs, Mat::identity(5, o).scale(a.det()));
    }

    #[test]
    fn kernel_and_image_examples() {
        let z = Mat::zeros(3, 3, F2);
        assert_eq!(z.kernel_basis().len(), 3);
        assert!(z.image_basis().is_empty());

        let j = Mat::j_r(2, 3, 3, F2);
        assert_eq!(j.kernel_basis(), vec![vec![0, 0, 1]]);
        assert_eq!(j.image_basis(), vec![vec![1, 0, 0], vec![0, 1, 0]]);

        let r1 = m(F2, &[&[1, 1, 1], &[0, 0, 0], &[0, 0, 0]]);
        let k = r1.kernel_basis();
        assert_eq!(k.len(), 2);
        for v in &k {
            assert!(r1.apply(v).unwrap().iter().all(|&x| x == 0));
        }
        assert_eq!(r1.image_basis(), vec![vec![1, 0, 0]]);
    }

    #[test]
    fn blocks_round_trip() {
        let j = Mat::j_r(2, 4, 3, F3);
        let b = j.block_extract(2).unwrap();
        assert_eq!(b.k, Mat::identity(2, F3));
        assert!(b.c.is_zero() && b.l.is_zero() && b.a.is_zero());
        assert_eq!(Mat::block_compose(&b).unwrap(), j);

        let x = m(F3, &[&[1, 2, 0], &[2, 2, 1], &[0, 1, 1], &[2, 0, 1]]);
        for r in 0..=3 {
            assert_eq!(Mat::block_compose(&x.block_extract(r).unwrap()).unwrap(), x);
        }
        assert!(x.block_extract(4).is_err());
    }

    #[test]
    fn j3_generator_blocks() {
        // a = b = 1, c = d = e = 0 in the exceptional 3x3 space
        let g = m(F2, &[&[1, 0, 0], &[0, 1, 0], &[0, 0, 0]]);
        let b = g.block_extract(2).unwrap();
        assert_eq!(b.k, Mat::identity(2, F2));
        assert_eq!(b.a.get(0, 0), 0);
    }
}
