//! Subspaces of GF(p)^m with a canonical reduced-echelon basis.

use std::fmt;

use crate::error::{Error, Result};
use crate::field::FieldOrder;
use crate::matrix::{kernel_of_rows, rref_in_place};

/// A subspace of `GF(order)^m`.
///
/// The basis is always the nonzero rows of the reduced row echelon form of
/// any spanning set, so two `VecSpace`s are equal exactly when their stored
/// bases are.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct VecSpace {
    ambient: usize,
    order: FieldOrder,
    basis: Vec<Vec<u8>>,
}

impl VecSpace {
    pub fn zero(ambient: usize, order: FieldOrder) -> Self {
        VecSpace {
            ambient,
            order,
            basis: Vec::new(),
        }
    }

    pub fn full(ambient: usize, order: FieldOrder) -> Self {
        let basis = (0..ambient)
            .map(|i| {
                let mut v = vec![0; ambient];
                v[i] = 1;
                v
            })
            .collect();
        VecSpace {
            ambient,
            order,
            basis,
        }
    }

    pub fn span<V: AsRef<[u8]>>(ambient: usize, order: FieldOrder, vectors: &[V]) -> Result<Self> {
        let mut flat = Vec::with_capacity(vectors.len() * ambient);
        for v in vectors {
            let v = v.as_ref();
            if v.len() != ambient {
                return Err(Error::Shape(format!(
                    "vector of length {} in GF({})^{ambient}",
                    v.len(),
                    order.get()
                )));
            }
            if v.iter().any(|&d| d >= order.get()) {
                return Err(Error::OutOfRange(format!("digit outside {order}")));
            }
            flat.extend_from_slice(v);
        }
        Ok(Self::from_flat(ambient, order, flat, vectors.len()))
    }

    /// Canonicalizes `rows` vectors stored back to back in `flat`.
    pub(crate) fn from_flat(ambient: usize, order: FieldOrder, mut flat: Vec<u8>, rows: usize) -> Self {
        let rank = rref_in_place(&mut flat, rows, ambient, order, None).len();
        let basis = if ambient == 0 {
            Vec::new()
        } else {
            flat.chunks(ambient).take(rank).map(<[u8]>::to_vec).collect()
        };
        VecSpace {
            ambient,
            order,
            basis,
        }
    }

    /// Wraps rows that are already the nonzero rows of a reduced echelon form.
    pub(crate) fn from_canonical(ambient: usize, order: FieldOrder, basis: Vec<Vec<u8>>) -> Self {
        debug_assert_eq!(Self::from_flat(ambient, order, basis.concat(), basis.len()).basis, basis);
        VecSpace {
            ambient,
            order,
            basis,
        }
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient
    }

    pub fn codim(&self) -> usize {
        self.ambient - self.dim()
    }

    pub fn order(&self) -> FieldOrder {
        self.order
    }

    pub fn basis(&self) -> &[Vec<u8>] {
        &self.basis
    }

    pub fn pivots(&self) -> Vec<usize> {
        self.basis
            .iter()
            .map(|v| v.iter().position(|&d| d != 0).expect("nonzero basis row"))
            .collect()
    }

    fn check(&self, other: &VecSpace) -> Result<()> {
        if self.ambient != other.ambient || self.order != other.order {
            return Err(Error::Ambient(format!(
                "GF({})^{} vs GF({})^{}",
                self.order.get(),
                self.ambient,
                other.order.get(),
                other.ambient
            )));
        }
        Ok(())
    }

    /// Reduces `v` against the basis; the result is zero iff `v` lies in the space.
    pub fn reduce(&self, v: &[u8]) -> Vec<u8> {
        let o = self.order;
        let mut w = v.to_vec();
        for b in &self.basis {
            let p = b.iter().position(|&d| d != 0).unwrap();
            let f = w[p];
            if f != 0 {
                let nf = o.neg(f);
                for (x, &y) in w.iter_mut().zip(b) {
                    *x = o.mul_add(nf, y, *x);
                }
            }
        }
        w
    }

    pub fn contains(&self, v: &[u8]) -> bool {
        v.len() == self.ambient && self.reduce(v).iter().all(|&d| d == 0)
    }

    pub fn is_subspace_of(&self, other: &VecSpace) -> bool {
        self.ambient == other.ambient && self.basis.iter().all(|b| other.contains(b))
    }

    pub fn sum(&self, other: &VecSpace) -> Result<VecSpace> {
        self.check(other)?;
        let rows = self.dim() + other.dim();
        let flat: Vec<u8> = self.basis.iter().chain(&other.basis).flatten().copied().collect();
        Ok(Self::from_flat(self.ambient, self.order, flat, rows))
    }

    /// Orthogonal complement for the standard dot product.
    pub fn orthogonal(&self) -> VecSpace {
        let flat: Vec<u8> = self.basis.iter().flatten().copied().collect();
        let ker = kernel_of_rows(&flat, self.dim(), self.ambient, self.order);
        let rows = ker.len();
        Self::from_flat(self.ambient, self.order, ker.concat(), rows)
    }

    pub fn intersect(&self, other: &VecSpace) -> Result<VecSpace> {
        self.check(other)?;
        Ok(self.orthogonal().sum(&other.orthogonal())?.orthogonal())
    }

    /// All members, in coefficient-odometer order.
    pub fn members(&self) -> impl Iterator<Item = Vec<u8>> + '_ {
        Odometer::new(self.dim(), self.order).map(move |coeffs| self.combine(&coeffs))
    }

    pub fn combine(&self, coeffs: &[u8]) -> Vec<u8> {
        let o = self.order;
        let mut v = vec![0u8; self.ambient];
        for (c, b) in coeffs.iter().zip(&self.basis) {
            if *c != 0 {
                for (x, &y) in v.iter_mut().zip(b) {
                    *x = o.mul_add(*c, y, *x);
                }
            }
        }
        v
    }

    /// `order^dim`, saturating.
    pub fn cardinality(&self) -> u128 {
        (self.order.get() as u128).saturating_pow(self.dim() as u32)
    }
}

impl fmt::Debug for VecSpace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "VecSpace[{}^{}](", self.order, self.ambient)?;
        for (i, b) in self.basis.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            for d in b {
                write!(f, "{d}")?;
            }
        }
        write!(f, ")")
    }
}

/// Mixed-radix counter over `len` digits in `0..order`, last digit fastest.
#[derive(Clone, Debug)]
pub struct Odometer {
    digits: Vec<u8>,
    order: u8,
    done: bool,
}

impl Odometer {
    pub fn new(len: usize, order: FieldOrder) -> Self {
        Odometer {
            digits: vec![0; len],
            order: order.get(),
            done: false,
        }
    }

    /// Starts at the `index`-th assignment (big-endian in base `order`).
    pub fn starting_at(len: usize, order: FieldOrder, mut index: u128) -> Self {
        let mut digits = vec![0u8; len];
        let q = order.get() as u128;
        for d in digits.iter_mut().rev() {
            *d = (index % q) as u8;
            index /= q;
        }
        Odometer {
            digits,
            order: order.get(),
            done: index != 0,
        }
    }

    /// Advances in place; returns `false` once all assignments are exhausted.
    pub fn advance(&mut self) -> bool {
        for d in self.digits.iter_mut().rev() {
            *d += 1;
            if *d < self.order {
                return true;
            }
            *d = 0;
        }
        self.done = true;
        false
    }

    pub fn current(&self) -> &[u8] {
        &self.digits
    }
}

impl Iterator for Odometer {
    type Item = Vec<u8>;
    fn next(&mut self) -> Option<Vec<u8>> {
        if self.done {
            return None;
        }
        let out = self.digits.clone();
        self.advance();
        Some(out)
    }
}
