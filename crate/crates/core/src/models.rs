//! Model spaces: `R(s, t)`, the exceptional space `J_3(F_2)`, `H_r`, `K_r`,
//! trace-zero and triangular matrices.

use crate::error::{Error, Result};
use crate::field::FieldOrder;
use crate::matrix::Mat;
use crate::space::MatSpace;

fn from_cells(n: usize, p: usize, order: FieldOrder, cell: impl Fn(usize, usize) -> bool) -> MatSpace {
    let mats: Vec<Mat> = (0..n)
        .flat_map(|i| (0..p).map(move |j| (i, j)))
        .filter(|&(i, j)| cell(i, j))
        .map(|(i, j)| Mat::unit(n, p, i, j, order))
        .collect();
    MatSpace::span(n, p, order, &mats).expect("unit matrices of the right shape")
}

/// `R(s, t)`: the `n x p` matrices whose bottom-right `(n-s) x (p-t)` block is zero.
pub fn model_r(s: usize, t: usize, n: usize, p: usize, order: FieldOrder) -> Result<MatSpace> {
    if s > n || t > p {
        return Err(Error::OutOfRange(format!("R({s},{t}) in {n}x{p} matrices")));
    }
    Ok(from_cells(n, p, order, |i, j| i < s || j < t))
}

/// The 5-dimensional rank-2 space of 3x3 matrices over GF(2)
/// `[[a, 0, 0], [c, b, 0], [d, e, a+b]]`.
pub fn model_j3() -> MatSpace {
    let o = FieldOrder::F2;
    let gen = |rows: [[i64; 3]; 3]| Mat::from_rows(o, &rows).expect("3x3");
    let a = gen([[1, 0, 0], [0, 0, 0], [0, 0, 1]]);
    let b = gen([[0, 0, 0], [0, 1, 0], [0, 0, 1]]);
    let c = gen([[0, 0, 0], [1, 0, 0], [0, 0, 0]]);
    let d = gen([[0, 0, 0], [0, 0, 0], [1, 0, 0]]);
    let e = gen([[0, 0, 0], [0, 0, 0], [0, 1, 0]]);
    MatSpace::span(3, 3, o, &[a, b, c, d, e]).expect("3x3 generators")
}

/// Same as [`model_j3`], rejecting any field other than GF(2).
pub fn model_j3_over(order: FieldOrder) -> Result<MatSpace> {
    if !order.is_binary() {
        return Err(Error::OutOfRange(format!("J_3 is defined over GF(2), not {order}")));
    }
    Ok(model_j3())
}

/// `H_r = {[[N, C], [0, alpha]]}`: stabilizes the hyperplane spanned by the
/// first `r - 1` basis vectors.
pub fn model_hr(r: usize, order: FieldOrder) -> Result<MatSpace> {
    if r == 0 {
        return Err(Error::OutOfRange("H_r needs r >= 1".into()));
    }
    Ok(from_cells(r, r, order, |i, j| i + 1 < r || j + 1 == r))
}

/// `K_r = {[[alpha, L], [0, N]]}`: stabilizes the line spanned by `e_1`.
pub fn model_kr(r: usize, order: FieldOrder) -> Result<MatSpace> {
    if r == 0 {
        return Err(Error::OutOfRange("K_r needs r >= 1".into()));
    }
    Ok(from_cells(r, r, order, |i, j| i == 0 || j >= 1))
}

/// Trace-zero `n x n` matrices.
pub fn model_sl(n: usize, order: FieldOrder) -> Result<MatSpace> {
    if n == 0 {
        return Err(Error::OutOfRange("sl_0".into()));
    }
    let mut mats: Vec<Mat> = (0..n)
        .flat_map(|i| (0..n).map(move |j| (i, j)))
        .filter(|&(i, j)| i != j)
        .map(|(i, j)| Mat::unit(n, n, i, j, order))
        .collect();
    for i in 0..n - 1 {
        let mut m = Mat::unit(n, n, i, i, order);
        m.set(n - 1, n - 1, order.neg(1));
        mats.push(m);
    }
    MatSpace::span(n, n, order, &mats)
}

/// Upper-triangular `n x n` matrices.
pub fn model_tplus(n: usize, order: FieldOrder) -> Result<MatSpace> {
    if n == 0 {
        return Err(Error::OutOfRange("T_0".into()));
    }
    Ok(from_cells(n, n, order, |i, j| i <= j))
}

/// Lower-triangular `n x n` matrices.
pub fn model_tminus(n: usize, order: FieldOrder) -> Result<MatSpace> {
    if n == 0 {
        return Err(Error::OutOfRange("T_0".into()));
    }
    Ok(from_cells(n, n, order, |i, j| i >= j))
}
