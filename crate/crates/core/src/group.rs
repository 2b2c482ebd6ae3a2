//! The action of `GL_n x GL_p` (and transposition) on spaces of matrices.
//!
//! A witness `(P, Q, t)` sends a space `V` to `P (V^T if t else V) Q^-1`.
//! Canonical forms and equivalence tests are exact: they enumerate the
//! whole group, so budgets keep them to small shapes.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::FieldOrder;
use crate::matrix::{mul_into, Mat};
use crate::par::{self, Parallelism};
use crate::space::{MatSpace, DEFAULT_MEMBER_BUDGET};
use crate::vecspace::{Odometer, VecSpace};

/// Default cap on the number of group elements a search may visit.
pub const DEFAULT_GROUP_BUDGET: u64 = 1 << 20;

/// `(P, Q, transposed)` acting by `V -> P (V^T if transposed else V) Q^-1`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct EquivalenceWitness {
    p: Mat,
    q: Mat,
    transposed: bool,
}

impl EquivalenceWitness {
    pub fn new(p: Mat, q: Mat, transposed: bool) -> Result<Self> {
        if p.order() != q.order() {
            return Err(Error::FieldMismatch(p.order().get(), q.order().get()));
        }
        if !p.is_invertible() || !q.is_invertible() {
            return Err(Error::Singular);
        }
        Ok(EquivalenceWitness { p, q, transposed })
    }

    /// The identity on `rows x cols` matrices.
    pub fn identity(rows: usize, cols: usize, order: FieldOrder) -> Self {
        EquivalenceWitness {
            p: Mat::identity(rows, order),
            q: Mat::identity(cols, order),
            transposed: false,
        }
    }

    /// Plain transposition of `rows x cols` matrices.
    pub fn transpose_only(rows: usize, cols: usize, order: FieldOrder) -> Self {
        EquivalenceWitness {
            p: Mat::identity(cols, order),
            q: Mat::identity(rows, order),
            transposed: true,
        }
    }

    /// Similarity `V -> S V S^-1`.
    pub fn similarity(s: Mat) -> Result<Self> {
        Self::new(s.clone(), s, false)
    }

    pub fn p(&self) -> &Mat {
        &self.p
    }

    pub fn q(&self) -> &Mat {
        &self.q
    }

    pub fn transposed(&self) -> bool {
        self.transposed
    }

    pub fn order(&self) -> FieldOrder {
        self.p.order()
    }

    /// Shape of the matrices this witness accepts.
    pub fn source_shape(&self) -> (usize, usize) {
        if self.transposed {
            (self.q.rows(), self.p.rows())
        } else {
            (self.p.rows(), self.q.rows())
        }
    }

    pub fn target_shape(&self) -> (usize, usize) {
        (self.p.rows(), self.q.rows())
    }

    pub fn apply_mat(&self, m: &Mat) -> Result<Mat> {
        if m.shape() != self.source_shape() {
            return Err(Error::Shape(format!(
                "witness acts on {:?}, got {:?}",
                self.source_shape(),
                m.shape()
            )));
        }
        let x = if self.transposed { m.transpose() } else { m.clone() };
        self.p.mul(&x)?.mul(&self.q.inverse()?)
    }

    /// `then . self`: first `self`, then `then`.
    pub fn then(&self, then: &EquivalenceWitness) -> Result<EquivalenceWitness> {
        if then.source_shape() != self.target_shape() {
            return Err(Error::Shape("witnesses do not compose".into()));
        }
        if !then.transposed {
            Ok(EquivalenceWitness {
                p: then.p.mul(&self.p)?,
                q: then.q.mul(&self.q)?,
                transposed: self.transposed,
            })
        } else {
            // P2 (P1 X Q1^-1)^T Q2^-1 = (P2 Q1^-T) X^T (Q2 P1^-T)^-1
            Ok(EquivalenceWitness {
                p: then.p.mul(&self.q.inverse()?.transpose())?,
                q: then.q.mul(&self.p.inverse()?.transpose())?,
                transposed: !self.transposed,
            })
        }
    }

    pub fn inverse(&self) -> Result<EquivalenceWitness> {
        if self.transposed {
            // W = P V^T Q^-1  =>  V = Q^T W^T (P^T)^-1
            Ok(EquivalenceWitness {
                p: self.q.transpose(),
                q: self.p.transpose(),
                transposed: true,
            })
        } else {
            Ok(EquivalenceWitness {
                p: self.p.inverse()?,
                q: self.q.inverse()?,
                transposed: false,
            })
        }
    }

    /// Digit rows of `P` and `Q`, for reports.
    pub fn to_record(&self) -> WitnessRecord {
        WitnessRecord {
            p: rows_of(&self.p),
            q: rows_of(&self.q),
            transposed: self.transposed,
        }
    }
}

fn rows_of(m: &Mat) -> Vec<String> {
    (0..m.rows())
        .map(|i| {
            m.row(i)
                .iter()
                .map(|d| d.to_string())
                .collect::<Vec<_>>()
                .join(" ")
        })
        .collect()
}

/// Serializable form of a witness.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WitnessRecord {
    pub p: Vec<String>,
    pub q: Vec<String>,
    pub transposed: bool,
}

pub fn apply_witness(v: &MatSpace, w: &EquivalenceWitness) -> Result<MatSpace> {
    if w.order() != v.order() {
        return Err(Error::FieldMismatch(w.order().get(), v.order().get()));
    }
    let images = v
        .basis()
        .iter()
        .map(|m| w.apply_mat(m))
        .collect::<Result<Vec<_>>>()?;
    let (r, c) = w.target_shape();
    MatSpace::span(r, c, v.order(), &images)
}

/// `|GL_n(GF(q))| = prod_{i<n} (q^n - q^i)`, saturating.
pub fn gl_order(n: usize, order: FieldOrder) -> u128 {
    let q = order.get() as u128;
    let qn = q.saturating_pow(n as u32);
    (0..n).fold(1u128, |acc, i| acc.saturating_mul(qn - q.pow(i as u32)))
}

/// The invertible `n x n` matrices, found by filtering all `q^(n^2)`
/// matrices in odometer order.
pub fn enumerate_gl(n: usize, order: FieldOrder, budget: u64) -> Result<impl Iterator<Item = Mat>> {
    let total = (order.get() as u128).saturating_pow((n * n) as u32);
    if total > budget as u128 {
        return Err(Error::budget(total, budget));
    }
    Ok(Odometer::new(n * n, order).filter_map(move |d| {
        let m = Mat::from_digits(n, n, order, d).expect("n*n digits");
        m.is_invertible().then_some(m)
    }))
}

/// All elements of the equivalence group for one ambient shape, with
/// `Q^-1` precomputed.
#[derive(Clone, Debug)]
pub struct EquivalenceGroup {
    rows: usize,
    cols: usize,
    order: FieldOrder,
    left: Vec<Mat>,
    right: Vec<Mat>,
    right_inv: Vec<Mat>,
    with_transpose: bool,
}

impl EquivalenceGroup {
    /// The group acting on `rows x cols` matrices; transposition is
    /// included exactly when the shape is square.
    pub fn for_shape(rows: usize, cols: usize, order: FieldOrder, budget: u64) -> Result<Self> {
        Self::new(rows, cols, order, rows == cols, budget)
    }

    pub fn new(rows: usize, cols: usize, order: FieldOrder, with_transpose: bool, budget: u64) -> Result<Self> {
        if with_transpose && rows != cols {
            return Err(Error::Shape("transposition needs a square shape".into()));
        }
        let size = gl_order(rows, order)
            .saturating_mul(gl_order(cols, order))
            .saturating_mul(if with_transpose { 2 } else { 1 });
        if size > budget as u128 {
            return Err(Error::budget(size, budget));
        }
        let cap = u64::MAX;
        let left: Vec<Mat> = enumerate_gl(rows, order, cap)?.collect();
        let right: Vec<Mat> = if cols == rows {
            left.clone()
        } else {
            enumerate_gl(cols, order, cap)?.collect()
        };
        let right_inv = right.iter().map(|q| q.inverse().expect("invertible")).collect();
        Ok(EquivalenceGroup {
            rows,
            cols,
            order,
            left,
            right,
            right_inv,
            with_transpose,
        })
    }

    pub fn len(&self) -> usize {
        self.left.len() * self.right.len() * if self.with_transpose { 2 } else { 1 }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    fn split(&self, idx: usize) -> (bool, usize, usize) {
        let per = self.left.len() * self.right.len();
        let t = idx >= per;
        let rest = idx % per;
        (t, rest / self.right.len(), rest % self.right.len())
    }

    pub fn witness(&self, idx: usize) -> EquivalenceWitness {
        let (t, i, j) = self.split(idx);
        EquivalenceWitness {
            p: self.left[i].clone(),
            q: self.right[j].clone(),
            transposed: t,
        }
    }

    /// Image of `v` under element `idx`. `v` must have this group's shape.
    pub fn apply(&self, idx: usize, v: &MatSpace) -> MatSpace {
        debug_assert_eq!(v.shape(), (self.rows, self.cols));
        let (t, i, j) = self.split(idx);
        let (n, p, o) = (self.rows, self.cols, self.order);
        let pm = self.left[i].digits();
        let qi = self.right_inv[j].digits();
        let mut flat = Vec::with_capacity(v.dim() * n * p);
        let mut tmp = vec![0u8; n * p];
        let mut xt = vec![0u8; n * p];
        let mut out = vec![0u8; n * p];
        for b in v.basis_vectors() {
            let x: &[u8] = if t {
                for a in 0..n {
                    for c in 0..p {
                        xt[c * n + a] = b[a * p + c];
                    }
                }
                &xt
            } else {
                b
            };
            mul_into(pm, x, &mut tmp, n, n, p, o);
            mul_into(&tmp, qi, &mut out, n, p, p, o);
            flat.extend_from_slice(&out);
        }
        let space = VecSpace::from_flat(n * p, o, flat, v.dim());
        MatSpace::from_vecspace(n, p, space).expect("same shape")
    }

    /// Every space in the orbit of `v`, each with the first element index
    /// mapping `v` onto it.
    pub fn orbit(&self, v: &MatSpace, mode: Parallelism) -> HashMap<MatSpace, usize> {
        let parts = par::map_ranges(self.len(), 4096, mode, |range| {
            let mut local: Vec<(MatSpace, usize)> = Vec::new();
            let mut seen: HashMap<MatSpace, ()> = HashMap::new();
            for idx in range {
                let img = self.apply(idx, v);
                if seen.insert(img.clone(), ()).is_none() {
                    local.push((img, idx));
                }
            }
            local
        });
        let mut out = HashMap::new();
        for (space, idx) in parts.into_iter().flatten() {
            out.entry(space).or_insert(idx);
        }
        out
    }
}

/// Orbit-invariant data used to rule out equivalence cheaply.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SpaceInvariants {
    pub dim: usize,
    pub image_dim: usize,
    pub kernel_dim: usize,
    /// Member counts per rank; `None` if the space is too large to enumerate.
    pub rank_histogram: Option<Vec<u64>>,
}

pub fn invariants(v: &MatSpace) -> SpaceInvariants {
    SpaceInvariants {
        dim: v.dim(),
        image_dim: v.sum_of_images().dim(),
        kernel_dim: v.common_kernel().dim(),
        rank_histogram: v.rank_distribution(DEFAULT_MEMBER_BUDGET).ok(),
    }
}

/// Canonical representative of an orbit and a witness reaching it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CanonicalForm {
    pub space: MatSpace,
    pub witness: EquivalenceWitness,
}

/// The least image of `v` (by canonical digit string) over the whole group.
pub fn canonical_form(v: &MatSpace, budget: u64) -> Result<CanonicalForm> {
    canonical_form_with(v, budget, Parallelism::Rayon)
}

pub fn canonical_form_with(v: &MatSpace, budget: u64, mode: Parallelism) -> Result<CanonicalForm> {
    let group = EquivalenceGroup::for_shape(v.rows(), v.cols(), v.order(), budget)?;
    Ok(canonical_form_in(&group, v, mode))
}

pub fn canonical_form_in(group: &EquivalenceGroup, v: &MatSpace, mode: Parallelism) -> CanonicalForm {
    let best = par::map_ranges(group.len(), 2048, mode, |range| {
        range
            .map(|idx| (group.apply(idx, v), idx))
            .min_by(|a, b| a.0.cmp(&b.0))
    })
    .into_iter()
    .flatten()
    .min_by(|a, b| a.0.cmp(&b.0).then(a.1.cmp(&b.1)))
    .expect("group is non-empty");
    CanonicalForm {
        space: best.0,
        witness: group.witness(best.1),
    }
}

/// A witness `w` with `apply_witness(a, w) == b`, or `None` if the spaces
/// lie in different orbits.
///
/// Spaces of transposed shapes (`n x p` vs `p x n`, `n != p`) are compared
/// through an explicit transposition.
pub fn are_equivalent(a: &MatSpace, b: &MatSpace, budget: u64) -> Result<Option<EquivalenceWitness>> {
    are_equivalent_with(a, b, budget, Parallelism::Rayon)
}

pub fn are_equivalent_with(
    a: &MatSpace,
    b: &MatSpace,
    budget: u64,
    mode: Parallelism,
) -> Result<Option<EquivalenceWitness>> {
    if a.order() != b.order() {
        return Err(Error::FieldMismatch(a.order().get(), b.order().get()));
    }
    if a.shape() == b.shape() {
        if a.dim() != b.dim() {
            return Ok(None);
        }
        let inv_b = invariants(b);
        let plain = invariants(a) == inv_b;
        let square = a.rows() == a.cols();
        let mirrored = square && invariants(&a.transpose()) == inv_b;
        if !plain && !mirrored {
            return Ok(None);
        }
        let group = EquivalenceGroup::for_shape(a.rows(), a.cols(), a.order(), budget)?;
        let per = group.len() / if square { 2 } else { 1 };
        let (start, end) = match (plain, mirrored) {
            (true, true) => (0, group.len()),
            (true, false) => (0, per),
            (false, true) => (per, group.len()),
            (false, false) => unreachable!(),
        };
        let found = par::find_first(end - start, mode, |k| {
            (group.apply(start + k, a) == *b).then_some(())
        });
        Ok(found.map(|(k, ())| group.witness(start + k)))
    } else if a.shape() == (b.cols(), b.rows()) {
        let at = a.transpose();
        let to_at = EquivalenceWitness::transpose_only(a.rows(), a.cols(), a.order());
        match are_equivalent_with(&at, b, budget, mode)? {
            Some(w) => Ok(Some(to_at.then(&w)?)),
            None => Ok(None),
        }
    } else {
        Err(Error::Ambient(format!(
            "{:?} and {:?} are not related by transposition",
            a.shape(),
            b.shape()
        )))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models;

    const F2: FieldOrder = FieldOrder::F2;
    const F3: FieldOrder = FieldOrder::F3;

    fn brute_force_gl_count(n: usize, o: FieldOrder) -> usize {
        // independent of the elimination code: determinant by permutation sum
        fn det(m: &[u8], n: usize, o: FieldOrder) -> u8 {
            fn perms(k: usize) -> Vec<Vec<usize>> {
                if k == 0 {
                    return vec![vec![]];
                }
                let mut out = Vec::new();
                for p in perms(k - 1) {
                    for pos in 0..=p.len() {
                        let mut q = p.clone();
                        q.insert(pos, k - 1);
                        out.push(q);
                    }
                }
                out
            }
            let mut acc = 0i64;
            for p in perms(n) {
                let inversions = (0..n)
                    .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
                    .filter(|&(i, j)| p[i] > p[j])
                    .count();
                let prod: i64 = (0..n).map(|i| m[i * n + p[i]] as i64).product();
                acc += if inversions % 2 == 0 { prod } else { -prod };
            }
            acc.rem_euclid(o.get() as i64) as u8
        }
        Odometer::new(n * n, o).filter(|m| det(m, n, o) != 0).count()
    }

    #[test]
    fn gl_counts() {
        for (n, expect) in [(1, 1), (2, 6), (3, 168)] {
            assert_eq!(brute_force_gl_count(n, F2), expect);
            assert_eq!(enumerate_gl(n, F2, 1 << 20).unwrap().count(), expect);
            assert_eq!(gl_order(n, F2), expect as u128);
        }
        assert_eq!(enumerate_gl(2, F3, 100).unwrap().count(), brute_force_gl_count(2, F3));
        assert!(enumerate_gl(3, F2, 100).is_err());
    }

    #[test]
    fn identity_and_transpose_witnesses() {
        let r = models::model_r(2, 1, 4, 3, F3).unwrap();
        let id = EquivalenceWitness::identity(4, 3, F3);
        assert_eq!(apply_witness(&r, &id).unwrap(), r);
        let t = EquivalenceWitness::transpose_only(4, 3, F3);
        assert_eq!(apply_witness(&r, &t).unwrap(), models::model_r(1, 2, 3, 4, F3).unwrap());
    }

    #[test]
    fn j3_and_transpose_are_similar() {
        // swap rows 1 and 3 and columns 1 and 3
        let s = Mat::from_rows(F2, &[[0, 0, 1], [0, 1, 0], [1, 0, 0]]).unwrap();
        let sim = EquivalenceWitness::similarity(s).unwrap();
        let upper = models::model_sl(3, F2)
            .unwrap()
            .intersect(&models::model_tplus(3, F2).unwrap())
            .unwrap();
        assert_eq!(apply_witness(&upper, &sim).unwrap(), models::model_j3());
        assert_eq!(upper, models::model_j3().transpose());
    }

    #[test]
    fn composition_and_inverse() {
        let p1 = Mat::from_rows(F3, &[[1, 2], [0, 1]]).unwrap();
        let q1 = Mat::from_rows(F3, &[[2, 0], [1, 1]]).unwrap();
        let p2 = Mat::from_rows(F3, &[[0, 1], [1, 1]]).unwrap();
        let q2 = Mat::from_rows(F3, &[[1, 1], [2, 0]]).unwrap();
        let v = MatSpace::from_spanning(&[
            Mat::from_rows(F3, &[[1, 2], [0, 0]]).unwrap(),
            Mat::from_rows(F3, &[[0, 1], [1, 0]]).unwrap(),
        ])
        .unwrap();
        for t1 in [false, true] {
            for t2 in [false, true] {
                let w1 = EquivalenceWitness::new(p1.clone(), q1.clone(), t1).unwrap();
                let w2 = EquivalenceWitness::new(p2.clone(), q2.clone(), t2).unwrap();
                let step = apply_witness(&apply_witness(&v, &w1).unwrap(), &w2).unwrap();
                assert_eq!(apply_witness(&v, &w1.then(&w2).unwrap()).unwrap(), step);
                let back = apply_witness(&apply_witness(&v, &w1).unwrap(), &w1.inverse().unwrap()).unwrap();
                assert_eq!(back, v);
            }
        }
    }

    #[test]
    fn singular_witness_rejected() {
        let s = Mat::from_rows(F2, &[[1, 1], [1, 1]]).unwrap();
        assert_eq!(EquivalenceWitness::new(s, Mat::identity(2, F2), false), Err(Error::Singular));
    }

    #[test]
    fn group_apply_matches_witness() {
        let g = EquivalenceGroup::for_shape(2, 2, F3, DEFAULT_GROUP_BUDGET).unwrap();
        assert_eq!(g.len(), 48 * 48 * 2);
        let v = models::model_tplus(2, F3).unwrap();
        for idx in (0..g.len()).step_by(97) {
            assert_eq!(g.apply(idx, &v), apply_witness(&v, &g.witness(idx)).unwrap());
        }
    }

    #[test]
    fn canonical_forms() {
        let j3 = models::model_j3();
        let c1 = canonical_form(&j3, DEFAULT_GROUP_BUDGET).unwrap();
        assert_eq!(apply_witness(&j3, &c1.witness).unwrap(), c1.space);
        let c2 = canonical_form(&j3.transpose(), DEFAULT_GROUP_BUDGET).unwrap();
        assert_eq!(c1.space, c2.space);
        let r11 = models::model_r(1, 1, 3, 3, F2).unwrap();
        assert_ne!(canonical_form(&r11, DEFAULT_GROUP_BUDGET).unwrap().space, c1.space);
        assert!(canonical_form(&j3, 1000).is_err());
    }

    #[test]
    fn equivalence_examples() {
        let j3 = models::model_j3();
        let w = are_equivalent(&j3, &j3, DEFAULT_GROUP_BUDGET).unwrap().unwrap();
        assert_eq!(apply_witness(&j3, &w).unwrap(), j3);

        let upper_t = models::model_sl(3, F2)
            .unwrap()
            .intersect(&models::model_tplus(3, F2).unwrap())
            .unwrap()
            .transpose();
        let w = are_equivalent(&j3, &upper_t, DEFAULT_GROUP_BUDGET).unwrap().unwrap();
        assert_eq!(apply_witness(&j3, &w).unwrap(), upper_t);

        let r20 = models::model_r(2, 0, 3, 3, F2).unwrap();
        let r02 = models::model_r(0, 2, 3, 3, F2).unwrap();
        // transposition is part of the group for square shapes
        let w = are_equivalent(&r20, &r02, DEFAULT_GROUP_BUDGET).unwrap().unwrap();
        assert!(w.transposed());
        // without transposition the two are separated by their image dimensions
        let g = EquivalenceGroup::new(3, 3, F2, false, DEFAULT_GROUP_BUDGET).unwrap();
        assert!((0..g.len()).all(|i| g.apply(i, &r20) != r02));
    }

    #[test]
    fn equivalence_across_transposed_shapes() {
        let a = models::model_r(2, 0, 3, 2, F2).unwrap();
        let b = models::model_r(0, 2, 2, 3, F2).unwrap();
        let w = are_equivalent(&a, &b, DEFAULT_GROUP_BUDGET).unwrap().unwrap();
        assert_eq!(apply_witness(&a, &w).unwrap(), b);
        assert!(are_equivalent(&a, &MatSpace::zero(2, 2, F2), DEFAULT_GROUP_BUDGET).is_err());
    }

    #[test]
    fn orbit_of_r11_in_m3() {
        let g = EquivalenceGroup::for_shape(3, 3, F2, DEFAULT_GROUP_BUDGET).unwrap();
        let r11 = models::model_r(1, 1, 3, 3, F2).unwrap();
        let orbit = g.orbit(&r11, Parallelism::Rayon);
        // one line for the images of a plane, one plane of sources: 7 * 7
        assert_eq!(orbit.len(), 49);
        for (space, idx) in &orbit {
            assert_eq!(g.apply(*idx, &r11), *space);
        }
    }
}
