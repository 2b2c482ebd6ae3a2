//! Verification campaigns: exhaustive or sampled sweeps that classify every
//! space in range and collect the ones breaking the statement under test.
//!
//! Sweeps are split into work units in enumeration order and merged in the
//! same order, so reports do not depend on the number of workers.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt;
use std::ops::ControlFlow;
use std::str::FromStr;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::classify::{regime, representation_solver, Classifier, LabelKind, Regime};
use crate::enumerate::{
    gaussian_binomial, partition, pivot_profiles, PivotProfile, SubspaceSampler, WorkUnit, DEFAULT_CAMPAIGN_BUDGET,
    DEFAULT_CHUNK,
};
use crate::error::{Error, Result};
use crate::field::FieldOrder;
use crate::gf2;
use crate::group::{EquivalenceGroup, DEFAULT_GROUP_BUDGET};
use crate::matrix::Mat;
use crate::par::{self, Parallelism};
use crate::space::{for_each_packed_member, packed_rank_at_most, MatSpace};
use crate::vecspace::{Odometer, VecSpace};

/// Violating spaces kept in a report; the count is always exact.
pub const MAX_STORED_VIOLATIONS: usize = 256;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Theorem {
    #[serde(rename = "Square_a")]
    SquareA,
    #[serde(rename = "Square_b")]
    SquareB,
    #[serde(rename = "Rect_a")]
    RectA,
    #[serde(rename = "Rect_b")]
    RectB,
    M3F2,
    FlandersBound,
    GenInverse,
    ReprLemma,
    NoncomkerM3F2,
}

impl Theorem {
    pub const ALL: [Theorem; 9] = [
        Theorem::SquareA,
        Theorem::SquareB,
        Theorem::RectA,
        Theorem::RectB,
        Theorem::M3F2,
        Theorem::FlandersBound,
        Theorem::GenInverse,
        Theorem::ReprLemma,
        Theorem::NoncomkerM3F2,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Theorem::SquareA => "Square_a",
            Theorem::SquareB => "Square_b",
            Theorem::RectA => "Rect_a",
            Theorem::RectB => "Rect_b",
            Theorem::M3F2 => "M3F2",
            Theorem::FlandersBound => "FlandersBound",
            Theorem::GenInverse => "GenInverse",
            Theorem::ReprLemma => "ReprLemma",
            Theorem::NoncomkerM3F2 => "NoncomkerM3F2",
        }
    }

    fn classifies(self) -> bool {
        matches!(
            self,
            Theorem::SquareA | Theorem::SquareB | Theorem::RectA | Theorem::RectB | Theorem::M3F2
        )
    }
}

impl fmt::Display for Theorem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Theorem {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Theorem::ALL
            .into_iter()
            .find(|t| t.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::InvalidCampaign(format!("unknown theorem {s:?}")))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum Mode {
    Exhaustive,
    OrbitReduced,
    Sampled { count: u64, seed: u64 },
}

/// What to verify. For `GenInverse` and `ReprLemma`, `target_dim` is the
/// smallest dimension swept; every larger dimension up to the ambient one
/// is included. For `ReprLemma` the spaces live in `n x r` matrices and
/// `p` is the column count of the map's values.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CampaignSpec {
    pub theorem: Theorem,
    pub n: usize,
    pub p: usize,
    pub r: usize,
    pub order: FieldOrder,
    pub target_dim: usize,
    pub mode: Mode,
}

/// Execution knobs that do not change the verdict.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CampaignOptions {
    /// Cap on visited subspaces (and, for map campaigns, visited maps).
    pub budget: u64,
    pub group_budget: u64,
    pub parallelism: Parallelism,
    pub chunk: u128,
}

impl Default for CampaignOptions {
    fn default() -> Self {
        CampaignOptions {
            budget: DEFAULT_CAMPAIGN_BUDGET,
            group_budget: DEFAULT_GROUP_BUDGET,
            parallelism: Parallelism::Rayon,
            chunk: DEFAULT_CHUNK,
        }
    }
}

/// One orbit among the survivors.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CensusClass {
    /// The least space of the orbit, i.e. its canonical form.
    pub representative: MatSpace,
    /// Number of survivors in the orbit.
    pub size: u64,
    pub labels: Vec<LabelKind>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Census {
    pub survivors: u64,
    pub classes: Vec<CensusClass>,
}

impl Census {
    /// Classes carrying more than one of the confined / primitive /
    /// exceptional buckets.
    pub fn overlapping_classes(&self) -> usize {
        self.classes
            .iter()
            .filter(|c| {
                let confined = c.labels.contains(&LabelKind::ImageConfined) || c.labels.contains(&LabelKind::KernelConfined);
                let primitive = c.labels.contains(&LabelKind::PrimitiveCol) || c.labels.contains(&LabelKind::PrimitiveRow);
                let exceptional = c.labels.contains(&LabelKind::ExceptionalJ3);
                [confined, primitive, exceptional].iter().filter(|&&b| b).count() > 1
            })
            .count()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CampaignReport {
    pub spec: CampaignSpec,
    pub visited: u64,
    pub survivors: u64,
    /// Spaces (or classes, in orbit-reduced mode) per label.
    pub label_census: BTreeMap<LabelKind, u64>,
    /// Extra counters specific to the statement under test.
    pub counters: BTreeMap<String, u64>,
    pub census: Option<Census>,
    pub violation_count: u64,
    pub violations: Vec<MatSpace>,
    pub elapsed_ms: u64,
    pub deterministic: bool,
}

impl CampaignReport {
    pub fn passed(&self) -> bool {
        self.violation_count == 0
    }
}

/// Merged per-unit results.
#[derive(Default)]
struct Tally {
    visited: u64,
    survivors: u64,
    labels: BTreeMap<LabelKind, u64>,
    counters: BTreeMap<String, u64>,
    violation_count: u64,
    violations: Vec<MatSpace>,
    kept: Vec<MatSpace>,
}

impl Tally {
    fn violation(&mut self, v: MatSpace) {
        self.violation_count += 1;
        if self.violations.len() < MAX_STORED_VIOLATIONS {
            self.violations.push(v);
        }
    }

    fn bump(&mut self, key: &str, by: u64) {
        *self.counters.entry(key.to_string()).or_default() += by;
    }

    fn merge(mut self, other: Tally) -> Tally {
        self.visited += other.visited;
        self.survivors += other.survivors;
        for (k, v) in other.labels {
            *self.labels.entry(k).or_default() += v;
        }
        for (k, v) in other.counters {
            *self.counters.entry(k).or_default() += v;
        }
        self.violation_count += other.violation_count;
        for v in other.violations {
            if self.violations.len() < MAX_STORED_VIOLATIONS {
                self.violations.push(v);
            }
        }
        self.kept.extend(other.kept);
        self
    }
}

fn merge_all(parts: Vec<Tally>) -> Tally {
    parts.into_iter().fold(Tally::default(), Tally::merge)
}

fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidCampaign(msg.into())
}

/// The dimension a campaign targets when none is given: the first
/// dimension the statement covers.
pub fn default_target_dim(theorem: Theorem, n: usize, p: usize, r: usize) -> usize {
    let threshold = crate::classify::dimension_threshold(n, p, r);
    match theorem {
        Theorem::SquareA | Theorem::RectA => threshold + 1,
        Theorem::SquareB | Theorem::RectB => threshold,
        Theorem::M3F2 | Theorem::NoncomkerM3F2 => 5,
        Theorem::FlandersBound => r * n.max(p) + 1,
        Theorem::GenInverse => (n * n + 2).saturating_sub(n),
        Theorem::ReprLemma => (n * r + 2).saturating_sub(n),
    }
}

/// Checks ranges and feasibility before anything is enumerated.
pub fn validate(spec: &CampaignSpec, opts: &CampaignOptions) -> Result<()> {
    let CampaignSpec { theorem, n, p, r, order, target_dim: d, mode } = *spec;
    if n == 0 || p == 0 {
        return Err(invalid("empty shape"));
    }
    if let Mode::Sampled { count, .. } = mode {
        if count == 0 {
            return Err(invalid("sampled mode needs a positive count"));
        }
        if count > opts.budget {
            return Err(Error::budget(count as u128, opts.budget));
        }
        if !matches!(theorem, Theorem::FlandersBound) && !theorem.classifies() {
            return Err(invalid(format!("{theorem} does not support sampled mode")));
        }
    }
    if mode == Mode::OrbitReduced && !(theorem.classifies() || theorem == Theorem::FlandersBound) {
        return Err(invalid(format!("{theorem} does not support orbit-reduced mode")));
    }
    let reg = regime(n, p, r, order, d);
    let want = |expected: Regime| -> Result<()> {
        if reg != expected {
            return Err(invalid(format!(
                "{theorem} needs the {expected:?} case, but n={n} p={p} r={r} dim={d} over {order} is {reg:?}"
            )));
        }
        Ok(())
    };
    match theorem {
        Theorem::SquareA => want(Regime::SquareStrict)?,
        Theorem::SquareB => want(Regime::SquareLimit)?,
        Theorem::RectA => want(Regime::RectStrict)?,
        Theorem::RectB => want(Regime::RectLimit)?,
        Theorem::M3F2 => {
            if (n, p, r, order, d) != (3, 3, 2, FieldOrder::F2, 5) {
                return Err(invalid("M3F2 is the case n = p = 3, r = 2, GF(2), dim 5"));
            }
        }
        Theorem::FlandersBound => {
            if d <= r * n.max(p) || d > n * p {
                return Err(invalid(format!("FlandersBound needs r*max(n,p) < dim <= n*p, got dim {d}")));
            }
        }
        Theorem::GenInverse => {
            if n != p {
                return Err(invalid("GenInverse needs square matrices"));
            }
            if d > n * n || n * n - d + 1 >= n {
                return Err(invalid(format!("GenInverse needs codim < n - 1, got dim {d} for n = {n}")));
            }
        }
        Theorem::ReprLemma => {
            if r == 0 || d > n * r || d + n < n * r + 2 {
                return Err(invalid(format!("ReprLemma needs n*r - n + 2 <= dim <= n*r, got dim {d}")));
            }
        }
        Theorem::NoncomkerM3F2 => {
            if (n, p, r, order, d) != (3, 3, 2, FieldOrder::F2, 5) {
                return Err(invalid("NoncomkerM3F2 is the case n = p = 3, r = 2, GF(2), dim W = 5"));
            }
        }
    }
    if matches!(mode, Mode::Exhaustive | Mode::OrbitReduced) {
        let visited = planned_visits(spec);
        if visited > opts.budget as u128 {
            return Err(Error::budget(visited, opts.budget));
        }
    }
    Ok(())
}

/// Subspaces (plus maps, for map campaigns) an exhaustive run visits.
fn planned_visits(spec: &CampaignSpec) -> u128 {
    let CampaignSpec { theorem, n, p, r, order, target_dim: d, .. } = *spec;
    let q = order.get() as u128;
    match theorem {
        Theorem::GenInverse => (d..=n * n).map(|k| gaussian_binomial(n * n, k, order)).sum(),
        Theorem::ReprLemma => (d..=n * r)
            .map(|k| gaussian_binomial(n * r, k, order).saturating_mul(q.saturating_pow((n * p * k) as u32)))
            .fold(0u128, u128::saturating_add),
        Theorem::NoncomkerM3F2 => gaussian_binomial(6, 5, order).saturating_mul(q.saturating_pow(15)),
        _ => gaussian_binomial(n * p, d, order),
    }
}

/// Runs a campaign with default options.
pub fn run_campaign(spec: &CampaignSpec) -> Result<CampaignReport> {
    run_campaign_with(spec, &CampaignOptions::default())
}

pub fn run_campaign_with(spec: &CampaignSpec, opts: &CampaignOptions) -> Result<CampaignReport> {
    validate(spec, opts)?;
    let start = Instant::now();
    let (tally, census) = match spec.theorem {
        Theorem::GenInverse => (gen_inverse(spec, opts)?, None),
        Theorem::ReprLemma => (repr_lemma(spec, opts)?, None),
        Theorem::NoncomkerM3F2 => (noncomker(spec, opts)?, None),
        _ => bounded_rank_campaign(spec, opts)?,
    };
    Ok(CampaignReport {
        spec: *spec,
        visited: tally.visited,
        survivors: tally.survivors,
        label_census: tally.labels,
        counters: tally.counters,
        census,
        violation_count: tally.violation_count,
        violations: tally.violations,
        elapsed_ms: start.elapsed().as_millis() as u64,
        deterministic: true,
    })
}

fn packable(n: usize, p: usize, order: FieldOrder) -> bool {
    order.is_binary() && n * p <= 64 && n <= 8
}

fn unpack_space(rows: &[u64], n: usize, p: usize) -> MatSpace {
    let vecs: Vec<Vec<u8>> = rows.iter().map(|&w| gf2::unpack_digits(w, n * p)).collect();
    let space = VecSpace::from_canonical(n * p, FieldOrder::F2, vecs);
    MatSpace::from_vecspace(n, p, space).expect("n*p ambient")
}

/// Calls `f` on every rank-bounded space of one work unit.
#[allow(clippy::too_many_arguments)]
fn for_each_survivor(
    prof: &PivotProfile,
    unit: &WorkUnit,
    n: usize,
    p: usize,
    r: usize,
    order: FieldOrder,
    tally: &mut Tally,
    mut f: impl FnMut(MatSpace, &mut Tally),
) {
    if packable(n, p, order) {
        prof.for_each_packed(unit.range.clone(), |rows| {
            tally.visited += 1;
            if packed_rank_at_most(rows, n, p, r) {
                tally.survivors += 1;
                f(unpack_space(rows, n, p), tally);
            }
        });
    } else {
        for v in prof.iter_range(unit.range.clone(), order) {
            tally.visited += 1;
            let space = MatSpace::from_vecspace(n, p, v).expect("n*p ambient");
            if space.rank_at_most(r, u64::MAX).expect("unbounded budget") {
                tally.survivors += 1;
                f(space, tally);
            }
        }
    }
}

fn classify_into(classifier: &Classifier, v: MatSpace, tally: &mut Tally) -> Result<()> {
    let res = classifier.classify_bounded(&v)?;
    for k in res.kinds() {
        *tally.labels.entry(k).or_default() += 1;
    }
    if res.is_counterexample() {
        tally.violation(v);
    }
    Ok(())
}

fn build_classifier(spec: &CampaignSpec, opts: &CampaignOptions) -> Result<Classifier> {
    let CampaignSpec { n, p, r, order, .. } = *spec;
    match Classifier::with_orbit_tables(n, p, r, order, opts.group_budget, opts.parallelism) {
        Ok(c) => Ok(c),
        Err(Error::BudgetExceeded { .. }) => Ok(Classifier::new(n, p, r, order, opts.group_budget)),
        Err(e) => Err(e),
    }
}

fn bounded_rank_campaign(spec: &CampaignSpec, opts: &CampaignOptions) -> Result<(Tally, Option<Census>)> {
    let CampaignSpec { theorem, n, p, r, order, target_dim: d, mode } = *spec;
    let classifier = if theorem.classifies() {
        Some(build_classifier(spec, opts)?)
    } else {
        None
    };
    let keep = mode == Mode::OrbitReduced;
    let handle = |v: MatSpace, t: &mut Tally| -> Result<()> {
        if keep {
            t.kept.push(v);
            return Ok(());
        }
        match &classifier {
            Some(c) => classify_into(c, v, t),
            None => {
                // any survivor breaks the dimension bound
                t.violation(v);
                Ok(())
            }
        }
    };
    let tally = match mode {
        Mode::Sampled { count, seed } => {
            let sampler = SubspaceSampler::new(n * p, d, order, seed)?;
            let parts = par::map_ranges(count as usize, 1024, opts.parallelism, |range| -> Result<Tally> {
                let mut t = Tally::default();
                for i in range {
                    let space = MatSpace::from_vecspace(n, p, sampler.sample(i as u64)).expect("n*p ambient");
                    t.visited += 1;
                    if space.rank_at_most(r, u64::MAX)? {
                        t.survivors += 1;
                        handle(space, &mut t)?;
                    }
                }
                Ok(t)
            });
            let mut t = merge_all(parts.into_iter().collect::<Result<Vec<_>>>()?);
            t.bump("samples", count);
            t.bump("seed", seed);
            t
        }
        _ => {
            let profiles = pivot_profiles(n * p, d);
            let units = partition(&profiles, order, opts.chunk);
            let parts = par::map_items(&units, opts.parallelism, |unit| -> Result<Tally> {
                let mut t = Tally::default();
                let mut err = None;
                for_each_survivor(&profiles[unit.profile], unit, n, p, r, order, &mut t, |v, tl| {
                    if err.is_none() {
                        if let Err(e) = handle(v, tl) {
                            err = Some(e);
                        }
                    }
                });
                match err {
                    Some(e) => Err(e),
                    None => Ok(t),
                }
            });
            merge_all(parts.into_iter().collect::<Result<Vec<_>>>()?)
        }
    };
    if !keep {
        return Ok((tally, None));
    }
    // orbit-reduced: one classification per class
    let mut tally = tally;
    let kept = std::mem::take(&mut tally.kept);
    let group = EquivalenceGroup::for_shape(n, p, order, opts.group_budget)?;
    let mut census = census_of(&group, &kept, opts.parallelism);
    if let Some(c) = &classifier {
        for class in census.classes.iter_mut() {
            let res = c.classify_bounded(&class.representative)?;
            class.labels = res.kinds();
            for k in &class.labels {
                *tally.labels.entry(*k).or_default() += 1;
            }
            if res.is_counterexample() {
                tally.violation(class.representative.clone());
            }
        }
    } else {
        for class in &census.classes {
            tally.violation(class.representative.clone());
        }
    }
    tally.bump("classes", census.classes.len() as u64);
    Ok((tally, Some(census)))
}

/// Splits `spaces` into orbits, in order of first appearance, then sorts
/// classes by representative.
fn census_of(group: &EquivalenceGroup, spaces: &[MatSpace], mode: Parallelism) -> Census {
    let mut seen: HashSet<MatSpace> = HashSet::new();
    let mut classes = Vec::new();
    for v in spaces {
        if seen.contains(v) {
            continue;
        }
        let orbit: HashMap<MatSpace, usize> = group.orbit(v, mode);
        let representative = orbit.keys().min().expect("orbit contains v").clone();
        let size = orbit.len() as u64;
        seen.extend(orbit.into_keys());
        classes.push(CensusClass {
            representative,
            size,
            labels: Vec::new(),
        });
    }
    classes.sort_by(|a, b| a.representative.cmp(&b.representative));
    Census {
        survivors: spaces.len() as u64,
        classes,
    }
}

/// Equivalence classes of the `d`-dimensional rank-at-most-`r` spaces of
/// `n x p` matrices, with their labels.
pub fn orbit_census(n: usize, p: usize, order: FieldOrder, d: usize, r: usize, budget: u64) -> Result<Census> {
    orbit_census_with(n, p, order, d, r, budget, Parallelism::Rayon)
}

pub fn orbit_census_with(
    n: usize,
    p: usize,
    order: FieldOrder,
    d: usize,
    r: usize,
    budget: u64,
    mode: Parallelism,
) -> Result<Census> {
    let total = gaussian_binomial(n * p, d, order);
    if total > DEFAULT_CAMPAIGN_BUDGET as u128 {
        return Err(Error::budget(total, DEFAULT_CAMPAIGN_BUDGET));
    }
    let group = EquivalenceGroup::for_shape(n, p, order, budget)?;
    let classifier = match Classifier::with_orbit_tables(n, p, r, order, budget, mode) {
        Ok(c) => c,
        Err(_) => Classifier::new(n, p, r, order, budget),
    };
    let profiles = pivot_profiles(n * p, d);
    let units = partition(&profiles, order, DEFAULT_CHUNK);
    let parts = par::map_items(&units, mode, |unit| {
        let mut t = Tally::default();
        for_each_survivor(&profiles[unit.profile], unit, n, p, r, order, &mut t, |v, tl| tl.kept.push(v));
        t
    });
    let kept = merge_all(parts).kept;
    let mut census = census_of(&group, &kept, mode);
    for class in census.classes.iter_mut() {
        class.labels = classifier.classify_bounded(&class.representative)?.kinds();
    }
    Ok(census)
}

/// Invertible members of a square space, as inverses.
fn inverses(v: &MatSpace) -> Vec<Mat> {
    v.members().filter_map(|m| m.inverse().ok()).collect()
}

fn gen_inverse(spec: &CampaignSpec, opts: &CampaignOptions) -> Result<Tally> {
    let CampaignSpec { n, order, target_dim, .. } = *spec;
    let xs: Vec<Vec<u8>> = Odometer::new(n, order).skip(1).collect();
    let mut parts = Vec::new();
    for d in target_dim..=n * n {
        let profiles = pivot_profiles(n * n, d);
        let units = partition(&profiles, order, opts.chunk);
        parts.extend(par::map_items(&units, opts.parallelism, |unit| {
            let mut t = Tally::default();
            for v in profiles[unit.profile].iter_range(unit.range.clone(), order) {
                t.visited += 1;
                t.survivors += 1;
                let space = MatSpace::from_vecspace(n, n, v).expect("n*n ambient");
                let inv = inverses(&space);
                let all_full = xs.iter().all(|x| {
                    let images: Vec<Vec<u8>> = inv.iter().map(|a| a.apply(x).expect("length n")).collect();
                    VecSpace::span(n, order, &images).expect("length n").dim() == n
                });
                t.bump("vectors_checked", xs.len() as u64);
                if !all_full {
                    t.violation(space);
                }
            }
            t
        }));
    }
    Ok(merge_all(parts))
}

/// Admissibility of `phi` (`im phi(M) inside im M` for all `M`) over GF(2),
/// with `[M | phi(M)]` packed as `n x (r + pc)` matrices.
struct PackedMaps {
    n: usize,
    width: usize,
    /// Members of `W` in Gray-code order, widened to `width` columns.
    gray_steps: Vec<usize>,
    member_ranks: Vec<usize>,
}

impl PackedMaps {
    fn new(w: &MatSpace, pc: usize) -> Self {
        let (n, r) = w.shape();
        let width = r + pc;
        let widened: Vec<u64> = w.basis().iter().map(|m| widen(m, width)).collect();
        let mut member_ranks = Vec::with_capacity(1 << widened.len());
        let mut gray_steps = Vec::with_capacity(1 << widened.len());
        let mut idx = 0usize;
        for_each_packed_member(&widened, |m| {
            if idx > 0 {
                gray_steps.push((idx as u64).trailing_zeros() as usize);
            }
            idx += 1;
            member_ranks.push(gf2::packed_matrix_rank(m, n, width));
            ControlFlow::<()>::Continue(())
        });
        PackedMaps {
            n,
            width,
            gray_steps,
            member_ranks,
        }
    }

    /// `phi_bits[i]`: image of basis `i`, already shifted to the value columns.
    fn admissible(&self, base: &[u64], phi_bits: &[u64]) -> bool {
        let mut cur_m = 0u64;
        let mut cur_phi = 0u64;
        if gf2::packed_matrix_rank(cur_m | cur_phi, self.n, self.width) != self.member_ranks[0] {
            return false;
        }
        for (k, &step) in self.gray_steps.iter().enumerate() {
            cur_m ^= base[step];
            cur_phi ^= phi_bits[step];
            if gf2::packed_matrix_rank(cur_m | cur_phi, self.n, self.width) != self.member_ranks[k + 1] {
                return false;
            }
        }
        true
    }
}

/// Packs an `n x r` matrix into the left columns of an `n x width` layout.
fn widen(m: &Mat, width: usize) -> u64 {
    let mut bits = 0u64;
    for i in 0..m.rows() {
        for j in 0..m.cols() {
            if m.get(i, j) != 0 {
                bits |= 1 << (i * width + j);
            }
        }
    }
    bits
}

/// `phi` given by the digits `digits`: basis `i` maps to the `n x pc`
/// matrix stored at `digits[i * n * pc..]`.
fn map_from_digits(digits: &[u8], dim: usize, n: usize, pc: usize, order: FieldOrder) -> Vec<Mat> {
    (0..dim)
        .map(|i| Mat::from_digits(n, pc, order, digits[i * n * pc..(i + 1) * n * pc].to_vec()).expect("n*pc digits"))
        .collect()
}

fn map_bits(digits: &[u8], dim: usize, n: usize, r: usize, pc: usize) -> Vec<u64> {
    let width = r + pc;
    (0..dim)
        .map(|i| {
            let block = &digits[i * n * pc..(i + 1) * n * pc];
            let mut bits = 0u64;
            for a in 0..n {
                for j in 0..pc {
                    if block[a * pc + j] != 0 {
                        bits |= 1 << (a * width + r + j);
                    }
                }
            }
            bits
        })
        .collect()
}

fn admissible_generic(w: &MatSpace, phi: &[Mat]) -> bool {
    crate::classify::rank_preservation_check(w, phi, u64::MAX).expect("shapes checked")
}

/// `phi(M) = M C` on every member.
fn represents(w: &MatSpace, phi: &[Mat], c: &Mat) -> bool {
    Odometer::new(w.dim(), w.order()).all(|coeffs| {
        let m = w.combine(&coeffs);
        let mut f = Mat::zeros(m.rows(), c.cols(), w.order());
        for (k, b) in coeffs.iter().zip(phi) {
            if *k != 0 {
                f = f.add(&b.scale(*k)).expect("same shape");
            }
        }
        m.mul(c).map(|x| x == f).unwrap_or(false)
    })
}

fn repr_lemma(spec: &CampaignSpec, opts: &CampaignOptions) -> Result<Tally> {
    let CampaignSpec { n, p: pc, r, order, target_dim, .. } = *spec;
    let mut parts = Vec::new();
    for d in target_dim..=n * r {
        let spaces: Vec<MatSpace> = crate::enumerate::subspace_iter(n * r, d, order, opts.budget)?
            .map(|v| MatSpace::from_vecspace(n, r, v).expect("n*r ambient"))
            .collect();
        parts.extend(par::map_items(&spaces, opts.parallelism, |w| {
            let mut t = Tally::default();
            t.visited += 1;
            let packed = (packable(n, r + pc, order)).then(|| {
                let maps = PackedMaps::new(w, pc);
                let base: Vec<u64> = w.basis().iter().map(|m| widen(m, r + pc)).collect();
                (maps, base)
            });
            let mut failed = false;
            for digits in Odometer::new(d * n * pc, order) {
                t.bump("maps_checked", 1);
                let ok = match &packed {
                    Some((maps, base)) => maps.admissible(base, &map_bits(&digits, d, n, r, pc)),
                    None => admissible_generic(w, &map_from_digits(&digits, d, n, pc, order)),
                };
                if !ok {
                    continue;
                }
                t.survivors += 1;
                let phi = map_from_digits(&digits, d, n, pc, order);
                let solved = representation_solver(w, &phi).map(|c| represents(w, &phi, &c));
                if !matches!(solved, Ok(true)) {
                    failed = true;
                    t.bump("solver_failures", 1);
                }
            }
            if failed {
                t.violation(w.clone());
            }
            t
        }));
    }
    let mut t = merge_all(parts);
    let maps = t.counters.get("maps_checked").copied().unwrap_or(0);
    t.counters.insert("admissible_maps".into(), t.survivors);
    t.counters.insert("maps_checked".into(), maps);
    Ok(t)
}

fn noncomker(spec: &CampaignSpec, opts: &CampaignOptions) -> Result<Tally> {
    let (n, r, pc) = (3usize, 2usize, 1usize);
    let order = FieldOrder::F2;
    let classifier = build_classifier(spec, opts)?;
    let spaces: Vec<MatSpace> = crate::enumerate::subspace_iter(n * r, spec.target_dim, order, opts.budget)?
        .map(|v| MatSpace::from_vecspace(n, r, v).expect("n*r ambient"))
        .collect();
    let parts = par::map_items(&spaces, opts.parallelism, |w| -> Result<Tally> {
        let mut t = Tally::default();
        let d = w.dim();
        let base: Vec<u64> = w.basis().iter().map(|m| widen(m, r + pc)).collect();
        for digits in Odometer::new(d * n * pc, order) {
            t.visited += 1;
            let bits = map_bits(&digits, d, n, r, pc);
            let lifted: Vec<u64> = base.iter().zip(&bits).map(|(a, b)| a | b).collect();
            if !packed_rank_at_most(&lifted, n, r + pc, 2) {
                continue;
            }
            t.survivors += 1;
            let v = unpack_lifted(&lifted, n, r + pc);
            let res = classifier.classify_bounded(&v)?;
            for k in res.kinds() {
                *t.labels.entry(k).or_default() += 1;
            }
            if !(res.has(LabelKind::KernelConfined) || res.has(LabelKind::ExceptionalJ3)) {
                t.violation(v);
            }
        }
        Ok(t)
    });
    let mut t = merge_all(parts.into_iter().collect::<Result<Vec<_>>>()?);
    t.bump("subspaces_w", spaces.len() as u64);
    Ok(t)
}

fn unpack_lifted(rows: &[u64], n: usize, p: usize) -> MatSpace {
    let vecs: Vec<Vec<u8>> = rows.iter().map(|&w| gf2::unpack_digits(w, n * p)).collect();
    MatSpace::from_vectors(n, p, FieldOrder::F2, &vecs).expect("n*p vectors")
}

#[cfg(test)]
mod tests {
    use super::*;

    const F2: FieldOrder = FieldOrder::F2;

    fn spec(theorem: Theorem, n: usize, p: usize, r: usize, d: usize, mode: Mode) -> CampaignSpec {
        CampaignSpec {
            theorem,
            n,
            p,
            r,
            order: F2,
            target_dim: d,
            mode,
        }
    }

    #[test]
    fn default_dims() {
        assert_eq!(default_target_dim(Theorem::SquareA, 3, 3, 2), 6);
        assert_eq!(default_target_dim(Theorem::SquareB, 3, 3, 1), 3);
        assert_eq!(default_target_dim(Theorem::RectB, 3, 2, 1), 2);
        assert_eq!(default_target_dim(Theorem::FlandersBound, 3, 3, 2), 7);
        assert_eq!(default_target_dim(Theorem::GenInverse, 3, 3, 0), 8);
        assert_eq!(default_target_dim(Theorem::ReprLemma, 3, 1, 2), 5);
    }

    #[test]
    fn theorem_names_round_trip() {
        for t in Theorem::ALL {
            assert_eq!(t.name().parse::<Theorem>().unwrap(), t);
            assert_eq!(serde_json::to_string(&t).unwrap(), format!("\"{}\"", t.name()));
        }
        assert!("Square_c".parse::<Theorem>().is_err());
    }

    #[test]
    fn validation_rejects_wrong_cases() {
        let o = CampaignOptions::default();
        assert!(validate(&spec(Theorem::SquareA, 3, 3, 2, 5, Mode::Exhaustive), &o).is_err());
        assert!(validate(&spec(Theorem::SquareB, 3, 3, 2, 5, Mode::Exhaustive), &o).is_err());
        assert!(validate(&spec(Theorem::M3F2, 3, 3, 2, 5, Mode::Exhaustive), &o).is_ok());
        assert!(validate(&spec(Theorem::FlandersBound, 3, 3, 2, 6, Mode::Exhaustive), &o).is_err());
        assert!(validate(&spec(Theorem::GenInverse, 3, 3, 0, 7, Mode::Exhaustive), &o).is_err());
        assert!(validate(&spec(Theorem::ReprLemma, 3, 1, 2, 4, Mode::Exhaustive), &o).is_err());
        let tiny = CampaignOptions { budget: 100, ..o };
        assert!(matches!(
            validate(&spec(Theorem::M3F2, 3, 3, 2, 5, Mode::Exhaustive), &tiny),
            Err(Error::BudgetExceeded { .. })
        ));
    }

    #[test]
    fn square_rank_one_small() {
        // 2x2, r = 1: threshold 2, dim 3 is the strict case
        // dim 3 exceeds r * max(n, p), so nothing survives
        let rep = run_campaign(&spec(Theorem::SquareA, 2, 2, 1, 3, Mode::Exhaustive)).unwrap();
        assert!(rep.passed());
        assert_eq!(rep.survivors, 0);
        let rep = run_campaign(&spec(Theorem::FlandersBound, 2, 2, 1, 3, Mode::Exhaustive)).unwrap();
        assert!(rep.passed());
        assert_eq!(rep.visited, 15);
        assert_eq!(rep.survivors, 0);
    }

    #[test]
    fn rect_campaigns_pass() {
        let b = run_campaign(&spec(Theorem::RectB, 3, 2, 1, 2, Mode::Exhaustive)).unwrap();
        assert!(b.passed());
        assert_eq!(b.visited, gaussian_binomial(6, 2, F2) as u64);
        let a = run_campaign(&spec(Theorem::RectA, 3, 2, 1, 3, Mode::Exhaustive)).unwrap();
        assert!(a.passed());
        let orbit = run_campaign(&spec(Theorem::RectB, 3, 2, 1, 2, Mode::OrbitReduced)).unwrap();
        assert_eq!(orbit.passed(), b.passed());
        let census = orbit.census.unwrap();
        assert_eq!(census.classes.iter().map(|c| c.size).sum::<u64>(), b.survivors);
    }

    #[test]
    fn worker_count_does_not_change_reports() {
        let s = spec(Theorem::RectB, 3, 2, 1, 2, Mode::Exhaustive);
        let seq = run_campaign_with(&s, &CampaignOptions { parallelism: Parallelism::Sequential, chunk: 7, ..Default::default() }).unwrap();
        let par = run_campaign_with(&s, &CampaignOptions { chunk: 3, ..Default::default() }).unwrap();
        assert_eq!(CampaignReport { elapsed_ms: 0, ..seq }, CampaignReport { elapsed_ms: 0, ..par });
    }

    #[test]
    fn sampled_mode_is_reproducible() {
        let s = spec(Theorem::FlandersBound, 3, 2, 1, 4, Mode::Sampled { count: 200, seed: 11 });
        let a = run_campaign(&s).unwrap();
        let b = run_campaign_with(&s, &CampaignOptions { parallelism: Parallelism::Sequential, ..Default::default() }).unwrap();
        assert_eq!(a.visited, 200);
        assert_eq!(a.survivors, 0);
        assert_eq!(CampaignReport { elapsed_ms: 0, ..a }, CampaignReport { elapsed_ms: 0, ..b });
    }

    #[test]
    fn gen_inverse_small() {
        // n = 2: codim < 1 means only the full space
        let rep = run_campaign(&spec(Theorem::GenInverse, 2, 2, 0, 4, Mode::Exhaustive)).unwrap();
        assert!(rep.passed());
        assert_eq!(rep.visited, 1);
    }

    #[test]
    fn repr_lemma_small() {
        // W inside Mat_{2,1}: n r - n + 2 = 2, so only W = Mat_{2,1}
        let rep = run_campaign(&CampaignSpec {
            theorem: Theorem::ReprLemma,
            n: 2,
            p: 1,
            r: 1,
            order: F2,
            target_dim: 2,
            mode: Mode::Exhaustive,
        })
        .unwrap();
        assert!(rep.passed());
        assert_eq!(rep.counters["maps_checked"], 16);
        // admissible maps are exactly M -> M c, c in GF(2)
        assert_eq!(rep.counters["admissible_maps"], 2);
    }
}
