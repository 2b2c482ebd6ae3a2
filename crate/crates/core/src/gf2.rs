//! Bit-packed kernels for GF(2).
//!
//! A row is a `u64` with bit `j` holding column `j`, so every routine here
//! requires at most 64 columns. Row operations are single XORs.

use crate::field::FieldOrder;
use crate::matrix::Mat;

/// Dense GF(2) matrix with one machine word per row.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct BitMat {
    rows: usize,
    cols: usize,
    bits: Vec<u64>,
}

impl BitMat {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        assert!(cols <= 64, "BitMat supports at most 64 columns");
        BitMat {
            rows,
            cols,
            bits: vec![0; rows],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = BitMat::zeros(n, n);
        for (i, row) in m.bits.iter_mut().enumerate() {
            *row = 1 << i;
        }
        m
    }

    pub fn from_rows(cols: usize, bits: Vec<u64>) -> Self {
        assert!(cols <= 64);
        debug_assert!(bits.iter().all(|&r| cols == 64 || r >> cols == 0));
        BitMat {
            rows: bits.len(),
            cols,
            bits,
        }
    }

    /// Packs a GF(2) matrix. Panics on other fields or more than 64 columns.
    pub fn from_mat(m: &Mat) -> Self {
        assert!(m.order().is_binary());
        let bits = (0..m.rows())
            .map(|i| pack_digits(m.row(i)))
            .collect();
        BitMat::from_rows(m.cols(), bits)
    }

    pub fn to_mat(&self) -> Mat {
        let mut data = Vec::with_capacity(self.rows * self.cols);
        for &r in &self.bits {
            data.extend((0..self.cols).map(|j| ((r >> j) & 1) as u8));
        }
        Mat::from_digits(self.rows, self.cols, FieldOrder::F2, data).expect("binary digits")
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row_bits(&self) -> &[u64] {
        &self.bits
    }

    pub fn rank(&self) -> usize {
        let mut rows = self.bits.clone();
        rank_rows(&mut rows)
    }

    /// Reduced row echelon form and a transform `T` with `T * self = R`.
    pub fn rref_with_transform(&self) -> (BitMat, BitMat) {
        let mut r = self.bits.clone();
        let mut t = BitMat::identity(self.rows).bits;
        rref_rows(&mut r, self.cols, Some(&mut t));
        (
            BitMat::from_rows(self.cols, r),
            BitMat::from_rows(self.rows, t),
        )
    }

    pub fn inverse(&self) -> Option<BitMat> {
        if self.rows != self.cols {
            return None;
        }
        let (r, t) = self.rref_with_transform();
        (r == BitMat::identity(self.rows)).then_some(t)
    }

    /// Null-space basis as packed column vectors (bit `j` = coordinate `j`).
    pub fn kernel(&self) -> Vec<u64> {
        let mut r = self.bits.clone();
        let pivots = rref_rows(&mut r, self.cols, None);
        let mut pivot_row = [usize::MAX; 64];
        for (i, &c) in pivots.iter().enumerate() {
            pivot_row[c] = i;
        }
        let mut out = Vec::new();
        for (free, &row) in pivot_row.iter().enumerate().take(self.cols) {
            if row != usize::MAX {
                continue;
            }
            let mut v = 1u64 << free;
            for (i, &c) in pivots.iter().enumerate() {
                if (r[i] >> free) & 1 == 1 {
                    v |= 1 << c;
                }
            }
            out.push(v);
        }
        out
    }
}

#[inline]
pub fn pack_digits(digits: &[u8]) -> u64 {
    debug_assert!(digits.len() <= 64);
    digits
        .iter()
        .enumerate()
        .fold(0u64, |acc, (j, &d)| acc | ((d as u64 & 1) << j))
}

#[inline]
pub fn unpack_digits(bits: u64, len: usize) -> Vec<u8> {
    (0..len).map(|j| ((bits >> j) & 1) as u8).collect()
}

/// Rank of a set of packed rows; the rows are clobbered.
#[inline]
pub fn rank_rows(rows: &mut [u64]) -> usize {
    let mut rank = 0;
    for i in 0..rows.len() {
        let pivot = rows[i];
        if pivot == 0 {
            continue;
        }
        rank += 1;
        let low = pivot & pivot.wrapping_neg();
        for r in rows[i + 1..].iter_mut() {
            if *r & low != 0 {
                *r ^= pivot;
            }
        }
    }
    rank
}

/// Rank of the `rows x cols` matrix packed row-major into `m`
/// (bit `i * cols + j` holds entry `(i, j)`), with `rows <= 8`.
#[inline]
pub fn packed_matrix_rank(m: u64, rows: usize, cols: usize) -> usize {
    debug_assert!(rows <= 8 && rows * cols <= 64);
    let mask = if cols == 64 { u64::MAX } else { (1u64 << cols) - 1 };
    let mut buf = [0u64; 8];
    for (i, slot) in buf.iter_mut().enumerate().take(rows) {
        *slot = (m >> (i * cols)) & mask;
    }
    rank_rows(&mut buf[..rows])
}

/// Gauss-Jordan on packed rows, pivoting on the lowest column first.
/// Returns pivot columns; when `transform` is given the same row
/// operations are replayed on it.
pub fn rref_rows(rows: &mut [u64], cols: usize, mut transform: Option<&mut [u64]>) -> Vec<usize> {
    let mut pivots = Vec::new();
    let mut next = 0;
    for c in 0..cols {
        if next == rows.len() {
            break;
        }
        let bit = 1u64 << c;
        let Some(found) = (next..rows.len()).find(|&i| rows[i] & bit != 0) else {
            continue;
        };
        rows.swap(next, found);
        if let Some(t) = transform.as_deref_mut() {
            t.swap(next, found);
        }
        let pivot = rows[next];
        let tpivot = transform.as_deref().map(|t| t[next]);
        for i in 0..rows.len() {
            if i != next && rows[i] & bit != 0 {
                rows[i] ^= pivot;
                if let (Some(t), Some(tp)) = (transform.as_deref_mut(), tpivot) {
                    t[i] ^= tp;
                }
            }
        }
        pivots.push(c);
        next += 1;
    }
    pivots
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn packed_rank_matches_small_cases() {
        // rows (1,0,0),(1,1,0),(0,1,1)
        let m = 0b001 | (0b011 << 3) | (0b110 << 6);
        assert_eq!(packed_matrix_rank(m, 3, 3), 3);
        assert_eq!(packed_matrix_rank(0, 3, 3), 0);
        // two equal rows
        assert_eq!(packed_matrix_rank(0b011 | (0b011 << 3), 3, 3), 1);
    }

    #[test]
    fn kernel_of_rank_one() {
        let m = BitMat::from_rows(3, vec![0b111, 0, 0]);
        let k = m.kernel();
        assert_eq!(k.len(), 2);
        for v in k {
            assert_eq!((v & 0b111).count_ones() % 2, 0);
        }
    }

    #[test]
    fn inverse_of_unipotent() {
        let m = BitMat::from_rows(2, vec![0b11, 0b10]);
        assert_eq!(m.inverse().unwrap(), m);
        assert!(BitMat::from_rows(2, vec![0b11, 0b11]).inverse().is_none());
    }
}
