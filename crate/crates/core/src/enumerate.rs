//! Grassmannian enumeration by reduced-echelon pivot profile.
//!
//! A `d`-dimensional subspace of `GF(q)^m` has exactly one reduced row
//! echelon basis. Choosing the pivot columns and then the free entries
//! (those right of a pivot and outside the other pivot columns) therefore
//! lists every subspace once, with no deduplication.

use std::ops::Range;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::field::FieldOrder;
use crate::space::{packed_rank_at_most, MatSpace};
use crate::vecspace::{Odometer, VecSpace};

/// Default cap on the number of subspaces a campaign may visit.
pub const DEFAULT_CAMPAIGN_BUDGET: u64 = 1 << 25;

/// Free entries per work unit when sweeps are split across workers.
pub const DEFAULT_CHUNK: u128 = 1 << 14;

/// Number of `d`-dimensional subspaces of `GF(q)^m`, saturating.
pub fn gaussian_binomial(m: usize, d: usize, order: FieldOrder) -> u128 {
    if d > m {
        return 0;
    }
    let q = order.get() as u128;
    let mut num = 1u128;
    let mut den = 1u128;
    for i in 0..d {
        let top = q.saturating_pow((m - i) as u32) - 1;
        let bottom = q.saturating_pow((i + 1) as u32) - 1;
        num = match num.checked_mul(top) {
            Some(v) => v,
            None => return u128::MAX,
        };
        den *= bottom;
        let g = gcd(num, den);
        num /= g;
        den /= g;
    }
    num / den
}

fn gcd(mut a: u128, mut b: u128) -> u128 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// Pivot columns of a reduced echelon basis together with its free cells.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PivotProfile {
    ambient: usize,
    pivots: Vec<usize>,
    /// `(row, column)` of each free entry, row-major.
    free: Vec<(usize, usize)>,
}

impl PivotProfile {
    pub fn new(ambient: usize, pivots: Vec<usize>) -> Self {
        let free = pivots
            .iter()
            .enumerate()
            .flat_map(|(i, &c)| {
                let pivots = &pivots;
                (c + 1..ambient)
                    .filter(move |j| !pivots.contains(j))
                    .map(move |j| (i, j))
            })
            .collect();
        PivotProfile {
            ambient,
            pivots,
            free,
        }
    }

    pub fn pivots(&self) -> &[usize] {
        &self.pivots
    }

    pub fn free_cells(&self) -> usize {
        self.free.len()
    }

    /// `q^free`, saturating.
    pub fn count(&self, order: FieldOrder) -> u128 {
        (order.get() as u128).saturating_pow(self.free.len() as u32)
    }

    fn rows_from_digits(&self, digits: &[u8]) -> Vec<Vec<u8>> {
        let mut rows: Vec<Vec<u8>> = self
            .pivots
            .iter()
            .map(|&c| {
                let mut v = vec![0u8; self.ambient];
                v[c] = 1;
                v
            })
            .collect();
        for (&(i, j), &d) in self.free.iter().zip(digits) {
            rows[i][j] = d;
        }
        rows
    }

    /// The subspace whose free entries are `digits` (row-major).
    pub fn subspace(&self, digits: &[u8], order: FieldOrder) -> VecSpace {
        VecSpace::from_canonical(self.ambient, order, self.rows_from_digits(digits))
    }

    /// Subspaces with free-entry index in `range`, in odometer order.
    pub fn iter_range(&self, range: Range<u128>, order: FieldOrder) -> impl Iterator<Item = VecSpace> + '_ {
        let len = range.end.saturating_sub(range.start);
        Odometer::starting_at(self.free.len(), order, range.start)
            .take(len as usize)
            .map(move |d| self.subspace(&d, order))
    }

    /// Packed GF(2) bases (bit `j` of word `i` is entry `j` of row `i`) for
    /// indices in `range`; the first free cell is the most significant bit.
    pub fn for_each_packed(&self, range: Range<u128>, mut f: impl FnMut(&[u64])) {
        debug_assert!(self.ambient <= 64);
        let base: Vec<u64> = self.pivots.iter().map(|&c| 1u64 << c).collect();
        let cells: Vec<(usize, u64)> = self.free.iter().map(|&(i, j)| (i, 1u64 << j)).collect();
        let nfree = cells.len();
        let mut rows = base.clone();
        for k in range {
            rows.copy_from_slice(&base);
            for (t, &(i, bit)) in cells.iter().enumerate() {
                if (k >> (nfree - 1 - t)) & 1 == 1 {
                    rows[i] |= bit;
                }
            }
            f(&rows);
        }
    }
}

/// All `d`-subsets of `0..m` in lexicographic order, as pivot profiles.
pub fn pivot_profiles(m: usize, d: usize) -> Vec<PivotProfile> {
    let mut out = Vec::new();
    let mut combo: Vec<usize> = (0..d).collect();
    if d > m {
        return out;
    }
    loop {
        out.push(PivotProfile::new(m, combo.clone()));
        // next combination
        let mut i = d;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            if combo[i] < m - d + i {
                combo[i] += 1;
                for k in i + 1..d {
                    combo[k] = combo[k - 1] + 1;
                }
                break;
            }
        }
    }
}

fn check_count(m: usize, d: usize, order: FieldOrder, budget: u64) -> Result<u128> {
    let total = gaussian_binomial(m, d, order);
    if total > budget as u128 {
        return Err(Error::budget(total, budget));
    }
    Ok(total)
}

/// Every `d`-dimensional subspace of `GF(order)^m` exactly once, in
/// lexicographic pivot-profile order.
pub fn subspace_iter(m: usize, d: usize, order: FieldOrder, budget: u64) -> Result<impl Iterator<Item = VecSpace>> {
    check_count(m, d, order, budget)?;
    Ok(pivot_profiles(m, d).into_iter().flat_map(move |prof| {
        let end = prof.count(order);
        let items: Vec<VecSpace> = prof.iter_range(0..end, order).collect();
        items
    }))
}

/// A slice of one profile's odometer.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WorkUnit {
    pub profile: usize,
    pub range: Range<u128>,
}

/// Splits the sweep over `profiles` into units of at most `chunk` subspaces,
/// in enumeration order.
pub fn partition(profiles: &[PivotProfile], order: FieldOrder, chunk: u128) -> Vec<WorkUnit> {
    let chunk = chunk.max(1);
    let mut units = Vec::new();
    for (idx, prof) in profiles.iter().enumerate() {
        let total = prof.count(order);
        let mut start = 0;
        while start < total {
            let end = (start + chunk).min(total);
            units.push(WorkUnit {
                profile: idx,
                range: start..end,
            });
            start = end;
        }
    }
    units
}

/// Sampler drawing uniform `d`-dimensional subspaces.
///
/// Profiles are weighted by their sizes, so the distribution is uniform
/// over subspaces. Sample `i` uses its own ChaCha stream, which makes the
/// sequence independent of how samples are split among workers.
#[derive(Clone, Debug)]
pub struct SubspaceSampler {
    profiles: Vec<PivotProfile>,
    cumulative: Vec<u128>,
    order: FieldOrder,
    seed: u64,
}

impl SubspaceSampler {
    pub fn new(m: usize, d: usize, order: FieldOrder, seed: u64) -> Result<Self> {
        if d > m {
            return Err(Error::OutOfRange(format!("dimension {d} in GF(q)^{m}")));
        }
        let profiles = pivot_profiles(m, d);
        let mut acc = 0u128;
        let cumulative = profiles
            .iter()
            .map(|p| {
                acc = acc.saturating_add(p.count(order));
                acc
            })
            .collect();
        Ok(SubspaceSampler {
            profiles,
            cumulative,
            order,
            seed,
        })
    }

    pub fn sample(&self, index: u64) -> VecSpace {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(index);
        let total = *self.cumulative.last().expect("at least one profile");
        let pick = rng.gen_range(0..total);
        let k = self.cumulative.partition_point(|&c| c <= pick);
        let prof = &self.profiles[k];
        let q = self.order.get();
        let digits: Vec<u8> = (0..prof.free_cells()).map(|_| rng.gen_range(0..q)).collect();
        prof.subspace(&digits, self.order)
    }
}

/// The `d`-dimensional subspaces of `n x p` matrices whose members all
/// have rank at most `r`.
pub fn bounded_rank_iter(
    n: usize,
    p: usize,
    order: FieldOrder,
    d: usize,
    r: usize,
    budget: u64,
) -> Result<impl Iterator<Item = MatSpace>> {
    let all = subspace_iter(n * p, d, order, budget)?;
    Ok(all.filter_map(move |v| {
        let space = MatSpace::from_vecspace(n, p, v).expect("ambient is n*p");
        let ok = match space.packed_basis() {
            Some(packed) => packed_rank_at_most(&packed, n, p, r),
            None => space.rank_at_most(r, u64::MAX).expect("unbounded budget"),
        };
        ok.then_some(space)
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashSet;

    const F2: FieldOrder = FieldOrder::F2;
    const F3: FieldOrder = FieldOrder::F3;

    /// Spans of all d-tuples of vectors, deduplicated.
    fn brute_force_count(m: usize, d: usize, o: FieldOrder) -> usize {
        let vectors: Vec<Vec<u8>> = Odometer::new(m, o).collect();
        let mut seen = HashSet::new();
        let mut idx = vec![0usize; d];
        loop {
            let vs: Vec<&Vec<u8>> = idx.iter().map(|&i| &vectors[i]).collect();
            let s = VecSpace::span(m, o, &vs).unwrap();
            if s.dim() == d {
                seen.insert(s);
            }
            let mut k = d;
            loop {
                if k == 0 {
                    return seen.len();
                }
                k -= 1;
                idx[k] += 1;
                if idx[k] < vectors.len() {
                    break;
                }
                idx[k] = 0;
            }
        }
    }

    #[test]
    fn small_counts_match_brute_force() {
        assert_eq!(brute_force_count(4, 2, F2), 35);
        for (m, d, o) in [(4, 2, F2), (3, 1, F3), (3, 2, F3), (5, 2, F2), (4, 3, F2)] {
            let listed: Vec<VecSpace> = subspace_iter(m, d, o, 1 << 20).unwrap().collect();
            let distinct: HashSet<_> = listed.iter().cloned().collect();
            assert_eq!(listed.len(), distinct.len());
            assert_eq!(listed.len(), brute_force_count(m, d, o));
            assert!(listed.iter().all(|v| v.dim() == d));
        }
    }

    #[test]
    fn profile_sizes_add_up() {
        for (m, d, o) in [(6, 3, F2), (5, 2, F3), (9, 5, F2)] {
            let sum: u128 = pivot_profiles(m, d).iter().map(|p| p.count(o)).sum();
            assert_eq!(sum, gaussian_binomial(m, d, o));
        }
        assert_eq!(gaussian_binomial(9, 5, F2), 3_309_747);
        assert_eq!(gaussian_binomial(9, 6, F2), 788_035);
        assert_eq!(gaussian_binomial(3, 4, F2), 0);
    }

    #[test]
    fn packed_units_match_generic() {
        let profiles = pivot_profiles(6, 3);
        let units = partition(&profiles, F2, 5);
        let mut packed = Vec::new();
        for u in &units {
            profiles[u.profile].for_each_packed(u.range.clone(), |rows| {
                let v: Vec<Vec<u8>> = rows.iter().map(|&w| crate::gf2::unpack_digits(w, 6)).collect();
                packed.push(VecSpace::span(6, F2, &v).unwrap());
            });
        }
        let generic: Vec<VecSpace> = subspace_iter(6, 3, F2, 1 << 20).unwrap().collect();
        assert_eq!(packed, generic);
    }

    #[test]
    fn sampler_is_reproducible() {
        let s = SubspaceSampler::new(6, 3, F3, 7).unwrap();
        let a: Vec<_> = (0..20).map(|i| s.sample(i)).collect();
        let b: Vec<_> = (0..20).rev().map(|i| s.sample(i)).rev().collect();
        assert_eq!(a, b);
        assert!(a.iter().all(|v| v.dim() == 3));
    }

    #[test]
    fn rank_one_survivors_are_confined() {
        // (2, 2, F2, d = 2, r = 1): survivors are exactly the spaces with a
        // common kernel line or a common image line
        let survivors: Vec<MatSpace> = bounded_rank_iter(2, 2, F2, 2, 1, 1 << 20).unwrap().collect();
        let all: Vec<MatSpace> = subspace_iter(4, 2, F2, 1 << 20)
            .unwrap()
            .map(|v| MatSpace::from_vecspace(2, 2, v).unwrap())
            .collect();
        let confined: Vec<MatSpace> = all
            .iter()
            .filter(|v| v.sum_of_images().dim() <= 1 || v.common_kernel().dim() >= 1)
            .cloned()
            .collect();
        assert_eq!(survivors, confined);
        assert_eq!(survivors.len(), 6);
    }

    #[test]
    fn flanders_bound_in_m3() {
        assert_eq!(bounded_rank_iter(3, 3, F2, 7, 2, 1 << 20).unwrap().count(), 0);
        let r02 = crate::models::model_r(0, 2, 3, 3, F2).unwrap();
        assert!(bounded_rank_iter(3, 3, F2, 6, 2, 1 << 20).unwrap().any(|v| v == r02));
    }
}
