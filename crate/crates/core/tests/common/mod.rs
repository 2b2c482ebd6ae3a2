//! Property suites shared by the `properties` and `acceptance` targets.
//!
//! Each suite runs under a fixed seed so failures reproduce exactly.

#![allow(dead_code)]

use std::collections::HashMap;
use std::sync::{Mutex, OnceLock};

use boundedrank::classify::{consecutive_planes_avoid, nice_basis, Classifier, LabelKind};
use boundedrank::group::{apply_witness, canonical_form_in, EquivalenceGroup, EquivalenceWitness, DEFAULT_GROUP_BUDGET};
use boundedrank::par::Parallelism;
use boundedrank::{FieldOrder, Mat, MatSpace, VecSpace};
use proptest::prelude::*;
use proptest::test_runner::{Config, RngSeed, TestCaseError, TestRunner};

pub const CASES: u32 = 1000;
pub const SEED: u64 = 20_261_018;

pub fn config() -> Config {
    Config {
        cases: CASES,
        rng_seed: RngSeed::Fixed(SEED),
        failure_persistence: None,
        max_global_rejects: 100_000,
        ..Config::default()
    }
}

fn field() -> impl Strategy<Value = FieldOrder> {
    prop_oneof![Just(FieldOrder::F2), Just(FieldOrder::F3), Just(FieldOrder::F5), Just(FieldOrder::F7)]
}

fn small_field() -> impl Strategy<Value = FieldOrder> {
    prop_oneof![Just(FieldOrder::F2), Just(FieldOrder::F3)]
}

fn digits(len: usize, o: FieldOrder) -> impl Strategy<Value = Vec<u8>> {
    prop::collection::vec(0..o.get(), len)
}

pub fn mat(rows: usize, cols: usize, o: FieldOrder) -> impl Strategy<Value = Mat> {
    digits(rows * cols, o).prop_map(move |d| Mat::from_digits(rows, cols, o, d).unwrap())
}

fn invertible(n: usize, o: FieldOrder) -> impl Strategy<Value = Mat> {
    mat(n, n, o).prop_filter("singular", Mat::is_invertible)
}

/// A space spanned by up to `max_gens` random matrices.
pub fn space(rows: usize, cols: usize, o: FieldOrder, max_gens: usize) -> impl Strategy<Value = MatSpace> {
    prop::collection::vec(mat(rows, cols, o), 0..=max_gens).prop_map(move |ms| MatSpace::span(rows, cols, o, &ms).unwrap())
}

fn vecspace(ambient: usize, o: FieldOrder, max_gens: usize) -> impl Strategy<Value = VecSpace> {
    prop::collection::vec(digits(ambient, o), 0..=max_gens).prop_map(move |vs| VecSpace::span(ambient, o, &vs).unwrap())
}

/// Witnesses for `rows x cols` spaces; transposition only when square.
fn witness(rows: usize, cols: usize, o: FieldOrder) -> impl Strategy<Value = EquivalenceWitness> {
    let flip = if rows == cols { any::<bool>().boxed() } else { Just(false).boxed() };
    (invertible(rows, o), invertible(cols, o), flip).prop_map(|(p, q, t)| EquivalenceWitness::new(p, q, t).unwrap())
}

fn shape_and_space(max_gens: usize) -> impl Strategy<Value = (MatSpace, EquivalenceWitness, EquivalenceWitness)> {
    (small_field(), 1usize..=3, 1usize..=3).prop_flat_map(move |(o, n, p)| {
        (space(n, p, o, max_gens), witness(n, p, o), witness(n, p, o))
    })
}

fn check(cond: bool, msg: impl FnOnce() -> String) -> Result<(), TestCaseError> {
    if cond {
        Ok(())
    } else {
        Err(TestCaseError::fail(msg()))
    }
}

/// Identity, inverse and composition laws of the witness action.
pub fn group_action_laws(runner: &mut TestRunner) -> Result<(), String> {
    runner
        .run(&shape_and_space(4), |(v, a, b)| {
            let (n, p) = v.shape();
            let id = EquivalenceWitness::identity(n, p, v.order());
            check(apply_witness(&v, &id).unwrap() == v, || "identity moved the space".into())?;
            let av = apply_witness(&v, &a).unwrap();
            check(apply_witness(&av, &a.inverse().unwrap()).unwrap() == v, || "inverse did not undo".into())?;
            let stepwise = apply_witness(&av, &b).unwrap();
            let composed = apply_witness(&v, &a.then(&b).unwrap()).unwrap();
            check(stepwise == composed, || format!("composition mismatch for {v:?}"))?;
            check(av.dim() == v.dim(), || "dimension changed".into())
        })
        .map_err(|e| e.to_string())
}

/// Built once per key and leaked, so suites can share them.
type Cache<K, V> = OnceLock<Mutex<HashMap<K, &'static V>>>;

fn group_for(rows: usize, cols: usize, o: FieldOrder) -> &'static EquivalenceGroup {
    static GROUPS: Cache<(usize, usize, u8), EquivalenceGroup> = OnceLock::new();
    let mut map = GROUPS.get_or_init(Default::default).lock().unwrap();
    map.entry((rows, cols, o.get()))
        .or_insert_with(|| Box::leak(Box::new(EquivalenceGroup::for_shape(rows, cols, o, DEFAULT_GROUP_BUDGET).unwrap())))
}

/// The canonical form is constant on orbits and its witness reaches it.
pub fn canonical_form_invariance(runner: &mut TestRunner) -> Result<(), String> {
    let shapes = prop_oneof![
        Just((2usize, 2usize, FieldOrder::F2)),
        Just((2, 3, FieldOrder::F2)),
        Just((3, 2, FieldOrder::F2)),
        Just((2, 2, FieldOrder::F3)),
    ];
    let strat = shapes.prop_flat_map(|(n, p, o)| (space(n, p, o, 4), witness(n, p, o)));
    runner
        .run(&strat, |(v, w)| {
            let (n, p) = v.shape();
            let g = group_for(n, p, v.order());
            let cf = canonical_form_in(g, &v, Parallelism::Sequential);
            check(apply_witness(&v, &cf.witness).unwrap() == cf.space, || "witness misses the form".into())?;
            let moved = apply_witness(&v, &w).unwrap();
            let cf2 = canonical_form_in(g, &moved, Parallelism::Sequential);
            check(cf.space == cf2.space, || format!("forms differ for {v:?} and {moved:?}"))
        })
        .map_err(|e| e.to_string())
}

fn classifier_for(rows: usize, cols: usize, r: usize) -> &'static Classifier {
    static TABLES: Cache<(usize, usize, usize), Classifier> = OnceLock::new();
    let mut map = TABLES.get_or_init(Default::default).lock().unwrap();
    map.entry((rows, cols, r)).or_insert_with(|| {
        let c = Classifier::with_orbit_tables(rows, cols, r, FieldOrder::F2, DEFAULT_GROUP_BUDGET, Parallelism::Rayon).unwrap();
        Box::leak(Box::new(c))
    })
}

/// Transposing a space mirrors its labels.
pub fn classify_duality(runner: &mut TestRunner) -> Result<(), String> {
    let shapes = prop_oneof![Just((3usize, 3usize)), Just((3, 2)), Just((2, 3)), Just((2, 2))];
    // low-rank generators give bounded-rank spaces of interesting size
    let strat = shapes.prop_flat_map(|(n, p)| {
        let o = FieldOrder::F2;
        prop::collection::vec((digits(n, o), digits(p, o)), 1..=4).prop_map(move |gens| {
            let ms: Vec<Mat> = gens
                .iter()
                .map(|(x, y)| {
                    let col = Mat::from_digits(n, 1, o, x.clone()).unwrap();
                    let row = Mat::from_digits(1, p, o, y.clone()).unwrap();
                    col.mul(&row).unwrap()
                })
                .collect();
            MatSpace::span(n, p, o, &ms).unwrap()
        })
    });
    runner
        .run(&strat, |v| {
            let (n, p) = v.shape();
            // classify at the space's own rank; full-rank spaces carry no bound
            let r = v.space_rank(1 << 20).unwrap();
            if r == 0 || r >= n.min(p) {
                return Ok(());
            }
            let a = classifier_for(n, p, r).classify_bounded(&v).unwrap();
            let t = v.transpose();
            let b = classifier_for(p, n, r).classify_bounded(&t).unwrap();
            let mut mirrored: Vec<LabelKind> = a.kinds().into_iter().map(LabelKind::mirrored).collect();
            mirrored.sort();
            let mut kinds = b.kinds();
            kinds.sort();
            check(kinds == mirrored, || format!("{v:?}: {:?} vs transpose {:?}", a.kinds(), b.kinds()))
        })
        .map_err(|e| e.to_string())
}

/// `(V^perp)^perp = V` and `dim V + dim V^perp = m`.
pub fn orthogonal_biduality(runner: &mut TestRunner) -> Result<(), String> {
    let strat = (field(), 1usize..=8).prop_flat_map(|(o, m)| vecspace(m, o, m + 1));
    runner
        .run(&strat, |v| {
            let perp = v.orthogonal();
            check(perp.dim() + v.dim() == v.ambient_dim(), || "dimensions do not add up".into())?;
            check(perp.orthogonal() == v, || format!("biduality fails for {v:?}"))
        })
        .map_err(|e| e.to_string())
}

/// `rank + dim ker = cols`, with the kernel really annihilated.
pub fn rank_nullity(runner: &mut TestRunner) -> Result<(), String> {
    let strat = (field(), 1usize..=7, 1usize..=7).prop_flat_map(|(o, n, p)| mat(n, p, o));
    runner
        .run(&strat, |m| {
            let ker = m.kernel_basis();
            check(m.rank() + ker.len() == m.cols(), || format!("rank-nullity fails for {m:?}"))?;
            check(m.image_basis().len() == m.rank(), || "image dimension differs from rank".into())?;
            for k in &ker {
                check(m.apply(k).unwrap().iter().all(|&d| d == 0), || "kernel vector not annihilated".into())?;
            }
            Ok(())
        })
        .map_err(|e| e.to_string())
}

/// `M * N~^T = N~^T * M = det(M) I` for the cofactor matrix `N~`.
pub fn adjugate_identity(runner: &mut TestRunner) -> Result<(), String> {
    let strat = (field(), 1usize..=5).prop_flat_map(|(o, n)| mat(n, n, o));
    runner
        .run(&strat, |m| {
            let n = m.rows();
            let o = m.order();
            let cof_t = m.adjugate().unwrap().transpose();
            let scalar = Mat::identity(n, o).scale(m.det());
            check(m.mul(&cof_t).unwrap() == scalar, || format!("M N~^T != det I for {m:?}"))?;
            check(cof_t.mul(&m).unwrap() == scalar, || format!("N~^T M != det I for {m:?}"))
        })
        .map_err(|e| e.to_string())
}

/// The basis is a basis and consecutive planes avoid `H`.
pub fn nice_basis_planes(runner: &mut TestRunner) -> Result<(), String> {
    let strat = (field(), 2usize..=7)
        .prop_flat_map(|(o, n)| vecspace(n, o, n))
        .prop_filter("codim at least 2", |h| h.codim() >= 2);
    runner
        .run(&strat, |h| {
            let basis = nice_basis(&h).unwrap();
            let n = h.ambient_dim();
            check(basis.len() == n, || "wrong basis length".into())?;
            check(VecSpace::span(n, h.order(), &basis).unwrap().dim() == n, || "not a basis".into())?;
            check(consecutive_planes_avoid(&h, &basis), || format!("a plane meets {h:?}"))
        })
        .map_err(|e| e.to_string())
}

/// Bit-packed GF(2) routines agree with the generic ones.
pub fn packed_matches_generic(runner: &mut TestRunner) -> Result<(), String> {
    let strat = (1usize..=8, 1usize..=8).prop_flat_map(|(n, p)| (mat(n, p, FieldOrder::F2), space(n.min(3), p.min(3), FieldOrder::F2, 5)));
    runner
        .run(&strat, |(m, v)| {
            check(m.rank() == m.rank_generic(), || format!("rank differs for {m:?}"))?;
            check(m.rref() == m.rref_generic(), || format!("rref differs for {m:?}"))?;
            check(m.kernel_basis() == m.kernel_basis_generic(), || format!("kernel differs for {m:?}"))?;
            if m.is_square() {
                check(m.inverse().ok() == m.inverse_generic().ok(), || format!("inverse differs for {m:?}"))?;
            }
            let generic = v.members().map(|x| x.rank_generic()).max().unwrap_or(0);
            check(v.space_rank(1 << 20).unwrap() == generic, || format!("space rank differs for {v:?}"))?;
            for r in 0..=3 {
                check(v.rank_at_most(r, 1 << 20).unwrap() == (generic <= r), || "bounded-rank test differs".into())?;
            }
            Ok(())
        })
        .map_err(|e| e.to_string())
}

pub type Suite = fn(&mut TestRunner) -> Result<(), String>;

pub const SUITES: [(&str, Suite); 8] = [
    ("group action laws", group_action_laws),
    ("canonical form orbit invariance", canonical_form_invariance),
    ("classify duality under transpose", classify_duality),
    ("orthogonal biduality", orthogonal_biduality),
    ("rank-nullity", rank_nullity),
    ("adjugate identity", adjugate_identity),
    ("nice basis plane conditions", nice_basis_planes),
    ("packed vs generic GF(2)", packed_matches_generic),
];

pub fn run_suite(suite: Suite) -> Result<(), String> {
    suite(&mut TestRunner::new(config()))
}
