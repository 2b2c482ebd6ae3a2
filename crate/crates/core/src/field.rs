//! Small prime fields GF(p), p in {2, 3, 5, 7}.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Order of a supported prime field.
///
/// Elements of GF(p) are stored everywhere as `u8` digits in `0..p`; this
/// type carries the modulus and the arithmetic on such digits.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "u32", into = "u32")]
pub struct FieldOrder(u8);

impl FieldOrder {
    pub const F2: FieldOrder = FieldOrder(2);
    pub const F3: FieldOrder = FieldOrder(3);
    pub const F5: FieldOrder = FieldOrder(5);
    pub const F7: FieldOrder = FieldOrder(7);

    /// Accepts only the primes 2, 3, 5 and 7.
    pub fn new(p: u32) -> Result<Self> {
        match p {
            2 | 3 | 5 | 7 => Ok(FieldOrder(p as u8)),
            _ => Err(Error::UnsupportedField(p)),
        }
    }

    #[inline]
    pub fn get(self) -> u8 {
        self.0
    }

    #[inline]
    pub fn is_binary(self) -> bool {
        self.0 == 2
    }

    #[inline]
    pub fn add(self, a: u8, b: u8) -> u8 {
        let s = a + b;
        if s >= self.0 {
            s - self.0
        } else {
            s
        }
    }

    #[inline]
    pub fn sub(self, a: u8, b: u8) -> u8 {
        if a >= b {
            a - b
        } else {
            a + self.0 - b
        }
    }

    #[inline]
    pub fn neg(self, a: u8) -> u8 {
        if a == 0 {
            0
        } else {
            self.0 - a
        }
    }

    #[inline]
    pub fn mul(self, a: u8, b: u8) -> u8 {
        (a * b) % self.0
    }

    /// Multiplicative inverse of a nonzero digit.
    #[inline]
    pub fn inv(self, a: u8) -> u8 {
        debug_assert!(a != 0 && a < self.0);
        INV_TABLES[self.0 as usize][a as usize]
    }

    /// Reduces an arbitrary non-negative accumulator.
    #[inline]
    pub fn reduce(self, a: u32) -> u8 {
        (a % self.0 as u32) as u8
    }

    /// `a * b + c`, all digits.
    #[inline]
    pub fn mul_add(self, a: u8, b: u8, c: u8) -> u8 {
        ((a as u16 * b as u16 + c as u16) % self.0 as u16) as u8
    }

    /// Number of field elements as a u64.
    #[inline]
    pub fn size(self) -> u64 {
        self.0 as u64
    }

    /// `order^exp`, or `None` on overflow.
    pub fn checked_pow(self, exp: usize) -> Option<u64> {
        let exp = u32::try_from(exp).ok()?;
        (self.0 as u64).checked_pow(exp)
    }
}

// Inverse tables indexed by [p][a].
const INV_TABLES: [[u8; 7]; 8] = [
    [0; 7],
    [0; 7],
    [0, 1, 0, 0, 0, 0, 0],
    [0, 1, 2, 0, 0, 0, 0],
    [0; 7],
    [0, 1, 3, 2, 4, 0, 0],
    [0; 7],
    [0, 1, 4, 5, 2, 3, 6],
];

impl fmt::Display for FieldOrder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GF({})", self.0)
    }
}

impl TryFrom<u32> for FieldOrder {
    type Error = Error;
    fn try_from(p: u32) -> Result<Self> {
        FieldOrder::new(p)
    }
}

impl From<FieldOrder> for u32 {
    fn from(o: FieldOrder) -> u32 {
        o.0 as u32
    }
}

/// A single element of GF(p).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct FieldElem {
    value: u8,
    order: FieldOrder,
}

impl FieldElem {
    pub fn new(value: u32, order: FieldOrder) -> Self {
        FieldElem {
            value: (value % order.get() as u32) as u8,
            order,
        }
    }

    pub fn zero(order: FieldOrder) -> Self {
        FieldElem { value: 0, order }
    }

    pub fn one(order: FieldOrder) -> Self {
        FieldElem { value: 1, order }
    }

    pub fn value(self) -> u8 {
        self.value
    }

    pub fn order(self) -> FieldOrder {
        self.order
    }

    pub fn is_zero(self) -> bool {
        self.value == 0
    }

    pub fn inverse(self) -> Option<Self> {
        (self.value != 0).then(|| FieldElem {
            value: self.order.inv(self.value),
            order: self.order,
        })
    }
}

impl std::ops::Add for FieldElem {
    type Output = FieldElem;
    fn add(self, rhs: Self) -> Self {
        debug_assert_eq!(self.order, rhs.order);
        FieldElem {
            value: self.order.add(self.value, rhs.value),
            order: self.order,
        }
    }
}

impl std::ops::Sub for FieldElem {
    type Output = FieldElem;
    fn sub(self, rhs: Self) -> Self {
        debug_assert_eq!(self.order, rhs.order);
        FieldElem {
            value: self.order.sub(self.value, rhs.value),
            order: self.order,
        }
    }
}

impl std::ops::Mul for FieldElem {
    type Output = FieldElem;
    fn mul(self, rhs: Self) -> Self {
        debug_assert_eq!(self.order, rhs.order);
        FieldElem {
            value: self.order.mul(self.value, rhs.value),
            order: self.order,
        }
    }
}

impl std::ops::Neg for FieldElem {
    type Output = FieldElem;
    fn neg(self) -> Self {
        FieldElem {
            value: self.order.neg(self.value),
            order: self.order,
        }
    }
}

impl fmt::Display for FieldElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value)
    }
}
