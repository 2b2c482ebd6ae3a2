//! Linear subspaces of `Mat_{n,p}(GF(q))`.

use std::fmt;
use std::ops::ControlFlow;

use crate::error::{Error, Result};
use crate::field::FieldOrder;
use crate::gf2;
use crate::matrix::{rref_in_place, Mat};
use crate::vecspace::VecSpace;

/// Default cap on the number of members a full enumeration may visit.
pub const DEFAULT_MEMBER_BUDGET: u64 = 1 << 24;

/// A linear subspace of `n x p` matrices, stored as the canonical basis of
/// its row-major vectorizations in `GF(q)^{n p}`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MatSpace {
    rows: usize,
    cols: usize,
    space: VecSpace,
}

impl MatSpace {
    pub fn zero(rows: usize, cols: usize, order: FieldOrder) -> Self {
        MatSpace {
            rows,
            cols,
            space: VecSpace::zero(rows * cols, order),
        }
    }

    pub fn full(rows: usize, cols: usize, order: FieldOrder) -> Self {
        MatSpace {
            rows,
            cols,
            space: VecSpace::full(rows * cols, order),
        }
    }

    /// The span of `mats`, all of which must be `rows x cols` over `order`.
    pub fn span(rows: usize, cols: usize, order: FieldOrder, mats: &[Mat]) -> Result<Self> {
        let mut flat = Vec::with_capacity(mats.len() * rows * cols);
        for m in mats {
            if m.shape() != (rows, cols) {
                return Err(Error::Shape(format!(
                    "{}x{} matrix in a space of {rows}x{cols} matrices",
                    m.rows(),
                    m.cols()
                )));
            }
            if m.order() != order {
                return Err(Error::FieldMismatch(m.order().get(), order.get()));
            }
            flat.extend_from_slice(m.digits());
        }
        Ok(MatSpace {
            rows,
            cols,
            space: VecSpace::from_flat(rows * cols, order, flat, mats.len()),
        })
    }

    /// Span of a non-empty list, taking the shape from the first matrix.
    pub fn from_spanning(mats: &[Mat]) -> Result<Self> {
        let first = mats
            .first()
            .ok_or_else(|| Error::Shape("empty spanning list has no shape".into()))?;
        Self::span(first.rows(), first.cols(), first.order(), mats)
    }

    pub fn from_vecspace(rows: usize, cols: usize, space: VecSpace) -> Result<Self> {
        if space.ambient_dim() != rows * cols {
            return Err(Error::Shape(format!(
                "GF(q)^{} is not the vectorization of {rows}x{cols}",
                space.ambient_dim()
            )));
        }
        Ok(MatSpace { rows, cols, space })
    }

    pub fn from_vectors<V: AsRef<[u8]>>(rows: usize, cols: usize, order: FieldOrder, vectors: &[V]) -> Result<Self> {
        Self::from_vecspace(rows, cols, VecSpace::span(rows * cols, order, vectors)?)
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
        self.space.order()
    }

    pub fn dim(&self) -> usize {
        self.space.dim()
    }

    pub fn codim(&self) -> usize {
        self.space.codim()
    }

    pub fn vecspace(&self) -> &VecSpace {
        &self.space
    }

    /// Canonical basis vectors (row-major vectorizations).
    pub fn basis_vectors(&self) -> &[Vec<u8>] {
        self.space.basis()
    }

    pub fn basis(&self) -> Vec<Mat> {
        self.space
            .basis()
            .iter()
            .map(|v| self.to_mat(v.clone()))
            .collect()
    }

    fn to_mat(&self, v: Vec<u8>) -> Mat {
        Mat::from_digits(self.rows, self.cols, self.order(), v).expect("vector of matching length")
    }

    /// Concatenated digits of the canonical basis.
    pub fn digit_string(&self) -> String {
        self.space
            .basis()
            .iter()
            .flatten()
            .map(|d| char::from(b'0' + d))
            .collect()
    }

    fn check(&self, other: &MatSpace) -> Result<()> {
        if self.shape() != other.shape() || self.order() != other.order() {
            return Err(Error::Ambient(format!(
                "{}x{} over {} vs {}x{} over {}",
                self.rows,
                self.cols,
                self.order(),
                other.rows,
                other.cols,
                other.order()
            )));
        }
        Ok(())
    }

    pub fn contains(&self, m: &Mat) -> bool {
        m.shape() == self.shape() && m.order() == self.order() && self.space.contains(m.digits())
    }

    pub fn is_subspace_of(&self, other: &MatSpace) -> bool {
        self.shape() == other.shape() && self.space.is_subspace_of(&other.space)
    }

    pub fn sum(&self, other: &MatSpace) -> Result<MatSpace> {
        self.check(other)?;
        Ok(MatSpace {
            space: self.space.sum(&other.space)?,
            ..*self
        })
    }

    pub fn intersect(&self, other: &MatSpace) -> Result<MatSpace> {
        self.check(other)?;
        Ok(MatSpace {
            space: self.space.intersect(&other.space)?,
            ..*self
        })
    }

    /// Orthogonal for the trace form `(A, B) -> tr(A^T B)`, which is the
    /// dot product of vectorizations.
    pub fn orthogonal(&self) -> MatSpace {
        MatSpace {
            space: self.space.orthogonal(),
            ..*self
        }
    }

    pub fn transpose(&self) -> MatSpace {
        let mats: Vec<Mat> = self.basis().iter().map(Mat::transpose).collect();
        MatSpace::span(self.cols, self.rows, self.order(), &mats).expect("transposed shapes agree")
    }

    /// Number of members, `q^dim`.
    pub fn cardinality(&self) -> u128 {
        self.space.cardinality()
    }

    pub fn check_budget(&self, budget: u64) -> Result<()> {
        let needed = self.cardinality();
        if needed > budget as u128 {
            return Err(Error::budget(needed, budget));
        }
        Ok(())
    }

    /// Members in coefficient-odometer order (last basis coefficient fastest).
    pub fn members(&self) -> impl Iterator<Item = Mat> + '_ {
        self.space.members().map(move |v| self.to_mat(v))
    }

    /// Visits every member as a row-major digit slice, odometer order.
    /// The current member is updated in place between steps.
    pub fn try_for_each_member<B>(&self, mut f: impl FnMut(&[u8]) -> ControlFlow<B>) -> Option<B> {
        let o = self.order();
        let basis = self.space.basis();
        let mut digits = vec![0u8; basis.len()];
        let mut cur = vec![0u8; self.rows * self.cols];
        let q = o.get();
        loop {
            if let ControlFlow::Break(b) = f(&cur) {
                return Some(b);
            }
            // odometer step: every touched digit moves by +1 mod q
            let mut k = digits.len();
            loop {
                if k == 0 {
                    return None;
                }
                k -= 1;
                for (x, &y) in cur.iter_mut().zip(&basis[k]) {
                    *x = o.add(*x, y);
                }
                digits[k] += 1;
                if digits[k] < q {
                    break;
                }
                digits[k] = 0;
            }
        }
    }

    /// Maximal rank of a member.
    pub fn space_rank(&self, budget: u64) -> Result<usize> {
        self.check_budget(budget)?;
        let cap = self.rows.min(self.cols);
        if let Some(packed) = self.packed_basis() {
            let mut best = 0;
            for_each_packed_member(&packed, |m| {
                best = best.max(gf2::packed_matrix_rank(m, self.rows, self.cols));
                if best == cap {
                    ControlFlow::Break(())
                } else {
                    ControlFlow::Continue(())
                }
            });
            return Ok(best);
        }
        let mut best = 0;
        let mut buf = vec![0u8; self.rows * self.cols];
        self.try_for_each_member(|m| {
            best = best.max(digit_rank(m, &mut buf, self.rows, self.cols, self.order()));
            if best == cap {
                ControlFlow::Break(())
            } else {
                ControlFlow::Continue(())
            }
        });
        Ok(best)
    }

    /// Whether every member has rank at most `r`, stopping at the first
    /// member that exceeds it.
    pub fn rank_at_most(&self, r: usize, budget: u64) -> Result<bool> {
        self.check_budget(budget)?;
        if r >= self.rows.min(self.cols) {
            return Ok(true);
        }
        if let Some(packed) = self.packed_basis() {
            return Ok(packed_rank_at_most(&packed, self.rows, self.cols, r));
        }
        let mut buf = vec![0u8; self.rows * self.cols];
        let exceeded = self.try_for_each_member(|m| {
            if digit_rank(m, &mut buf, self.rows, self.cols, self.order()) > r {
                ControlFlow::Break(())
            } else {
                ControlFlow::Continue(())
            }
        });
        Ok(exceeded.is_none())
    }

    /// Number of members of each rank `0..=min(n, p)`.
    pub fn rank_distribution(&self, budget: u64) -> Result<Vec<u64>> {
        self.check_budget(budget)?;
        let mut hist = vec![0u64; self.rows.min(self.cols) + 1];
        if let Some(packed) = self.packed_basis() {
            for_each_packed_member(&packed, |m| {
                hist[gf2::packed_matrix_rank(m, self.rows, self.cols)] += 1;
                ControlFlow::<()>::Continue(())
            });
            return Ok(hist);
        }
        let mut buf = vec![0u8; self.rows * self.cols];
        self.try_for_each_member(|m| {
            hist[digit_rank(m, &mut buf, self.rows, self.cols, self.order())] += 1;
            ControlFlow::<()>::Continue(())
        });
        Ok(hist)
    }

    /// Span of the members having exactly rank `r`.
    pub fn span_of_rank(&self, r: usize, budget: u64) -> Result<MatSpace> {
        self.check_budget(budget)?;
        let mut buf = vec![0u8; self.rows * self.cols];
        let mut found = VecSpace::zero(self.rows * self.cols, self.order());
        let mut pending: Vec<Vec<u8>> = Vec::new();
        self.try_for_each_member(|m| {
            if digit_rank(m, &mut buf, self.rows, self.cols, self.order()) == r && !found.contains(m) {
                pending.push(m.to_vec());
                found = VecSpace::span(self.rows * self.cols, self.order(), &pending).expect("matching lengths");
                if found.dim() == self.dim() {
                    return ControlFlow::Break(());
                }
            }
            ControlFlow::Continue(())
        });
        MatSpace::from_vecspace(self.rows, self.cols, found)
    }

    /// Span of the rank-one members.
    pub fn rank_one_span(&self, budget: u64) -> Result<MatSpace> {
        self.span_of_rank(1, budget)
    }

    /// Whether the members of rank exactly `r` span the whole space.
    pub fn spanned_by_rank(&self, r: usize, budget: u64) -> Result<bool> {
        Ok(self.span_of_rank(r, budget)?.dim() == self.dim())
    }

    /// `sum of im M` over the space, a subspace of `GF(q)^n`.
    pub fn sum_of_images(&self) -> VecSpace {
        let cols: Vec<Vec<u8>> = self
            .basis()
            .iter()
            .flat_map(|m| (0..m.cols()).map(move |j| m.column(j)))
            .collect();
        VecSpace::span(self.rows, self.order(), &cols).expect("column lengths agree")
    }

    /// `intersection of Ker M` over the space, a subspace of `GF(q)^p`.
    pub fn common_kernel(&self) -> VecSpace {
        let o = self.order();
        let stacked: Vec<u8> = self.space.basis().iter().flatten().copied().collect();
        let rows = self.dim() * self.rows;
        let ker = crate::matrix::kernel_of_rows(&stacked, rows, self.cols, o);
        VecSpace::span(self.cols, o, &ker).expect("kernel vectors")
    }

    /// Basis packed into words when over GF(2) with `n p <= 64` and `n <= 8`.
    pub fn packed_basis(&self) -> Option<Vec<u64>> {
        (self.order().is_binary() && self.rows * self.cols <= 64 && self.rows <= 8)
            .then(|| self.space.basis().iter().map(|v| gf2::pack_digits(v)).collect())
    }

    /// Image of a member under the linear map defined on the basis.
    pub(crate) fn combine(&self, coeffs: &[u8]) -> Mat {
        self.to_mat(self.space.combine(coeffs))
    }

    /// Coordinates of a member in the canonical basis.
    pub fn coordinates(&self, m: &Mat) -> Option<Vec<u8>> {
        if !self.contains(m) {
            return None;
        }
        let pivots = self.space.pivots();
        // In reduced echelon form the coordinate on basis k is the entry at pivot k.
        let coeffs: Vec<u8> = pivots.iter().map(|&p| m.digits()[p]).collect();
        debug_assert_eq!(self.space.combine(&coeffs), m.digits());
        Some(coeffs)
    }
}

impl fmt::Debug for MatSpace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "MatSpace[{}x{} over {}, dim {}]{{{}}}",
            self.rows,
            self.cols,
            self.order(),
            self.dim(),
            self.digit_string()
        )
    }
}

/// Rank of a row-major digit matrix, using `buf` as scratch.
#[inline]
pub(crate) fn digit_rank(m: &[u8], buf: &mut [u8], rows: usize, cols: usize, o: FieldOrder) -> usize {
    buf.copy_from_slice(m);
    rref_in_place(buf, rows, cols, o, None).len()
}

/// Visits all members of a packed GF(2) space in Gray-code order.
#[inline]
pub(crate) fn for_each_packed_member<B>(basis: &[u64], mut f: impl FnMut(u64) -> ControlFlow<B>) -> Option<B> {
    let mut cur = 0u64;
    if let ControlFlow::Break(b) = f(cur) {
        return Some(b);
    }
    let total = 1u64 << basis.len();
    for i in 1..total {
        cur ^= basis[i.trailing_zeros() as usize];
        if let ControlFlow::Break(b) = f(cur) {
            return Some(b);
        }
    }
    None
}

#[inline]
pub(crate) fn packed_rank_at_most(basis: &[u64], rows: usize, cols: usize, r: usize) -> bool {
    for_each_packed_member(basis, |m| {
        if gf2::packed_matrix_rank(m, rows, cols) > r {
            ControlFlow::Break(())
        } else {
            ControlFlow::Continue(())
        }
    })
    .is_none()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models;

    const F2: FieldOrder = FieldOrder::F2;
    const F3: FieldOrder = FieldOrder::F3;

    #[test]
    fn span_examples() {
        let z = MatSpace::span(2, 2, F2, &[]).unwrap();
        assert_eq!(z.dim(), 0);
        let a = Mat::from_rows(F2, &[[1, 1], [0, 1]]).unwrap();
        assert_eq!(MatSpace::from_spanning(&[a.clone(), a.clone()]).unwrap().dim(), 1);
        assert!(MatSpace::span(2, 3, F2, &[a]).is_err());
    }

    #[test]
    fn lattice_examples() {
        let r10 = models::model_r(1, 0, 2, 2, F2).unwrap();
        let r01 = models::model_r(0, 1, 2, 2, F2).unwrap();
        assert_eq!(r10.sum(&r01).unwrap().dim(), 3);
        let i = r10.intersect(&r01).unwrap();
        assert_eq!(i.dim(), 1);
        assert_eq!(r10.intersect(&r10).unwrap(), r10);
        let j3 = models::model_j3();
        assert!(!j3.contains(&Mat::identity(3, F2)));
    }

    #[test]
    fn orthogonal_examples() {
        assert_eq!(MatSpace::full(2, 3, F3).orthogonal(), MatSpace::zero(2, 3, F3));
        // W = {[a 0; c b; d e]} has W^perp = span(E_12)
        let w = MatSpace::span(
            3,
            2,
            F2,
            &[
                Mat::unit(3, 2, 0, 0, F2),
                Mat::unit(3, 2, 1, 0, F2),
                Mat::unit(3, 2, 1, 1, F2),
                Mat::unit(3, 2, 2, 0, F2),
                Mat::unit(3, 2, 2, 1, F2),
            ],
        )
        .unwrap();
        let perp = w.orthogonal();
        assert_eq!(perp, MatSpace::span(3, 2, F2, &[Mat::unit(3, 2, 0, 1, F2)]).unwrap());
    }

    #[test]
    fn rank_examples() {
        let j3 = models::model_j3();
        assert_eq!(j3.space_rank(DEFAULT_MEMBER_BUDGET).unwrap(), 2);
        assert_eq!(MatSpace::zero(3, 3, F2).space_rank(1).unwrap(), 0);
        let r11 = models::model_r(1, 1, 3, 3, F2).unwrap();
        assert_eq!(r11.space_rank(DEFAULT_MEMBER_BUDGET).unwrap(), 2);
        assert!(matches!(
            MatSpace::full(3, 3, F2).space_rank(100),
            Err(Error::BudgetExceeded { .. })
        ));
    }

    #[test]
    fn packed_and_generic_member_paths_agree() {
        let j3 = models::model_j3();
        let mut generic = vec![0u64; 4];
        let mut buf = vec![0u8; 9];
        j3.try_for_each_member(|m| {
            generic[digit_rank(m, &mut buf, 3, 3, F2)] += 1;
            ControlFlow::<()>::Continue(())
        });
        assert_eq!(j3.rank_distribution(u64::MAX).unwrap(), generic);
        assert_eq!(generic.iter().sum::<u64>(), 32);
        assert_eq!(generic[3], 0);
    }

    #[test]
    fn member_walk_matches_odometer() {
        let v = models::model_sl(2, F3).unwrap();
        let mut walked = Vec::new();
        v.try_for_each_member(|m| {
            walked.push(m.to_vec());
            ControlFlow::<()>::Continue(())
        });
        let listed: Vec<Vec<u8>> = v.members().map(|m| m.into_digits()).collect();
        assert_eq!(walked, listed);
        assert_eq!(listed.len(), 27);
    }

    #[test]
    fn images_and_kernels() {
        let r02 = models::model_r(0, 2, 3, 3, F2).unwrap();
        assert_eq!(r02.common_kernel(), VecSpace::span(3, F2, &[vec![0, 0, 1]]).unwrap());
        let r20 = models::model_r(2, 0, 3, 3, F2).unwrap();
        assert_eq!(
            r20.sum_of_images(),
            VecSpace::span(3, F2, &[vec![1, 0, 0], vec![0, 1, 0]]).unwrap()
        );
        let j3 = models::model_j3();
        assert_eq!(j3.common_kernel().dim(), 0);
        assert_eq!(j3.sum_of_images().dim(), 3);
    }

    #[test]
    fn rank_one_spans() {
        assert_eq!(MatSpace::zero(2, 2, F2).rank_one_span(16).unwrap().dim(), 0);
        assert_eq!(MatSpace::full(2, 2, F2).rank_one_span(16).unwrap().dim(), 4);
        let id = MatSpace::span(2, 2, F2, &[Mat::identity(2, F2)]).unwrap();
        assert_eq!(id.rank_one_span(16).unwrap().dim(), 0);
    }

    #[test]
    fn spanned_by_nonsingular() {
        let t2 = models::model_tplus(2, F2).unwrap();
        assert!(!t2.spanned_by_rank(2, 64).unwrap());
        let sl2 = models::model_sl(2, F2).unwrap();
        assert!(sl2.spanned_by_rank(2, 64).unwrap());
        // four invertible matrices spanning Mat_2(F3)
        let gens = [
            Mat::from_rows(F3, &[[1, 0], [0, 1]]).unwrap(),
            Mat::from_rows(F3, &[[1, 1], [0, 1]]).unwrap(),
            Mat::from_rows(F3, &[[1, 0], [1, 1]]).unwrap(),
            Mat::from_rows(F3, &[[2, 1], [1, 1]]).unwrap(),
        ];
        assert!(gens.iter().all(Mat::is_invertible));
        assert_eq!(MatSpace::from_spanning(&gens).unwrap().dim(), 4);
        assert!(MatSpace::full(2, 2, F3).spanned_by_rank(2, 100).unwrap());
    }

    #[test]
    fn coordinates_round_trip() {
        let j3 = models::model_j3();
        for m in j3.members() {
            let c = j3.coordinates(&m).unwrap();
            assert_eq!(j3.combine(&c), m);
        }
        assert!(j3.coordinates(&Mat::identity(3, F2)).is_none());
    }
}
