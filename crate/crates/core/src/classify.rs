//! Theorem-driven classification of bounded-rank spaces and the
//! constructive steps behind it: the representation solver, common kernels,
//! nice bases, inverse orbits, stabilized subspaces and the reduction
//! diagnostics.

use std::collections::HashMap;
use std::ops::ControlFlow;

use serde::{Deserialize, Serialize};

use crate::enumerate::subspace_iter;
use crate::error::{Error, Result};
use crate::field::FieldOrder;
use crate::group::{apply_witness, are_equivalent, EquivalenceGroup, EquivalenceWitness};
use crate::matrix::{rref_in_place, Mat};
use crate::models;
use crate::par::Parallelism;
use crate::space::{MatSpace, DEFAULT_MEMBER_BUDGET};
use crate::vecspace::VecSpace;

/// One conclusion about a space.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Label {
    /// Every member's image lies in this subspace of dimension at most `r`.
    ImageConfined(VecSpace),
    /// Every member vanishes on this subspace of dimension at least `p - r`.
    KernelConfined(VecSpace),
    /// Equivalent to `R(1, r-1)`; the witness maps the space onto the model.
    PrimitiveCol(EquivalenceWitness),
    /// Equivalent to `R(r-1, 1)`.
    PrimitiveRow(EquivalenceWitness),
    /// Equivalent to the exceptional 3x3 space over GF(2).
    ExceptionalJ3(EquivalenceWitness),
    /// The dimension is below the applicable bound, or no bound applies.
    BelowThreshold,
    /// The hypotheses hold but no admissible conclusion does.
    Counterexample,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum LabelKind {
    ImageConfined,
    KernelConfined,
    PrimitiveCol,
    PrimitiveRow,
    ExceptionalJ3,
    BelowThreshold,
    Counterexample,
}

impl LabelKind {
    pub fn name(self) -> &'static str {
        match self {
            LabelKind::ImageConfined => "ImageConfined",
            LabelKind::KernelConfined => "KernelConfined",
            LabelKind::PrimitiveCol => "PrimitiveCol",
            LabelKind::PrimitiveRow => "PrimitiveRow",
            LabelKind::ExceptionalJ3 => "ExceptionalJ3",
            LabelKind::BelowThreshold => "BelowThreshold",
            LabelKind::Counterexample => "Counterexample",
        }
    }

    /// The label a transposed space carries.
    pub fn mirrored(self) -> LabelKind {
        match self {
            LabelKind::ImageConfined => LabelKind::KernelConfined,
            LabelKind::KernelConfined => LabelKind::ImageConfined,
            LabelKind::PrimitiveCol => LabelKind::PrimitiveRow,
            LabelKind::PrimitiveRow => LabelKind::PrimitiveCol,
            other => other,
        }
    }
}

impl Label {
    pub fn kind(&self) -> LabelKind {
        match self {
            Label::ImageConfined(_) => LabelKind::ImageConfined,
            Label::KernelConfined(_) => LabelKind::KernelConfined,
            Label::PrimitiveCol(_) => LabelKind::PrimitiveCol,
            Label::PrimitiveRow(_) => LabelKind::PrimitiveRow,
            Label::ExceptionalJ3(_) => LabelKind::ExceptionalJ3,
            Label::BelowThreshold => LabelKind::BelowThreshold,
            Label::Counterexample => LabelKind::Counterexample,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClassificationResult {
    pub rows: usize,
    pub cols: usize,
    pub order: FieldOrder,
    pub rank_bound: usize,
    pub dim: usize,
    /// Sorted by kind, at most one of each.
    pub labels: Vec<Label>,
}

impl ClassificationResult {
    pub fn kinds(&self) -> Vec<LabelKind> {
        self.labels.iter().map(Label::kind).collect()
    }

    pub fn has(&self, kind: LabelKind) -> bool {
        self.labels.iter().any(|l| l.kind() == kind)
    }

    pub fn label(&self, kind: LabelKind) -> Option<&Label> {
        self.labels.iter().find(|l| l.kind() == kind)
    }

    pub fn is_counterexample(&self) -> bool {
        self.has(LabelKind::Counterexample)
    }
}

/// Which statement covers a space of a given shape, rank bound and dimension.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Regime {
    /// `r` is outside `1..min(n, p)`: nothing is claimed.
    Unsupported,
    /// Dimension under the bound: nothing is claimed.
    Below,
    SquareStrict,
    SquareLimit,
    /// `n = p = 3`, `r = 2` over GF(2) at dimension 5.
    SquareExceptional,
    RectStrict,
    RectLimit,
}

/// `n r - r + 1 + p - n` for the larger side `n`; equals `n r - r + 1` when square.
pub fn dimension_threshold(n: usize, p: usize, r: usize) -> usize {
    let (big, small) = (n.max(p), n.min(p));
    big * r + 1 + small - r - big
}

pub fn regime(n: usize, p: usize, r: usize, order: FieldOrder, dim: usize) -> Regime {
    if r == 0 || r >= n.min(p) {
        return Regime::Unsupported;
    }
    let thr = dimension_threshold(n, p, r);
    match (n == p, dim.cmp(&thr)) {
        (_, std::cmp::Ordering::Less) => Regime::Below,
        (true, std::cmp::Ordering::Greater) => Regime::SquareStrict,
        (true, std::cmp::Ordering::Equal) => {
            if n == 3 && r == 2 && order.is_binary() {
                Regime::SquareExceptional
            } else {
                Regime::SquareLimit
            }
        }
        (false, std::cmp::Ordering::Greater) => Regime::RectStrict,
        (false, std::cmp::Ordering::Equal) => Regime::RectLimit,
    }
}

/// Whether the labels found satisfy the conclusion of the statement in force.
pub fn conclusion_holds(n: usize, p: usize, r: usize, dim: usize, regime: Regime, kinds: &[LabelKind]) -> bool {
    let has = |k: LabelKind| kinds.contains(&k);
    // orient as if n >= p, reading the labels of the transpose when n < p
    let flip = n < p;
    let view = |k: LabelKind| if flip { has(k.mirrored()) } else { has(k) };
    let confined = has(LabelKind::ImageConfined) || has(LabelKind::KernelConfined);
    let primitive = has(LabelKind::PrimitiveCol) || has(LabelKind::PrimitiveRow);
    let (big, small) = (n.max(p), n.min(p));
    match regime {
        Regime::Unsupported | Regime::Below => true,
        Regime::SquareStrict => confined,
        Regime::SquareLimit => confined || primitive,
        Regime::SquareExceptional => confined || primitive || has(LabelKind::ExceptionalJ3),
        Regime::RectStrict => view(LabelKind::KernelConfined),
        Regime::RectLimit => {
            view(LabelKind::KernelConfined)
                || view(LabelKind::PrimitiveCol)
                || (view(LabelKind::ImageConfined) && dim == r * small && (big == small + 1 || r == 1))
        }
    }
}

fn exceptional_shape(n: usize, p: usize, r: usize, order: FieldOrder) -> bool {
    n == 3 && p == 3 && r == 2 && order.is_binary()
}

/// Model spaces a space of this shape is compared against.
fn comparison_models(n: usize, p: usize, r: usize, order: FieldOrder) -> Vec<(LabelKind, MatSpace)> {
    let mut out = Vec::new();
    if r >= 1 && r <= n.min(p) {
        if let Ok(m) = models::model_r(1, r - 1, n, p, order) {
            out.push((LabelKind::PrimitiveCol, m));
        }
        if let Ok(m) = models::model_r(r - 1, 1, n, p, order) {
            out.push((LabelKind::PrimitiveRow, m));
        }
    }
    if exceptional_shape(n, p, r, order) {
        out.push((LabelKind::ExceptionalJ3, models::model_j3()));
    }
    out
}

#[derive(Debug)]
struct OrbitTables {
    group: EquivalenceGroup,
    /// For each model, every space in its orbit with a group index sending
    /// the model onto it.
    orbits: Vec<HashMap<MatSpace, usize>>,
}

/// Classifier for one ambient shape and rank bound.
///
/// With orbit tables, model equivalence becomes a hash lookup, which is
/// what the exhaustive campaigns use.
#[derive(Debug)]
pub struct Classifier {
    rows: usize,
    cols: usize,
    r: usize,
    order: FieldOrder,
    group_budget: u64,
    member_budget: u64,
    models: Vec<(LabelKind, MatSpace)>,
    tables: Option<OrbitTables>,
}

impl Classifier {
    pub fn new(rows: usize, cols: usize, r: usize, order: FieldOrder, group_budget: u64) -> Self {
        Classifier {
            rows,
            cols,
            r,
            order,
            group_budget,
            member_budget: DEFAULT_MEMBER_BUDGET,
            models: comparison_models(rows, cols, r, order),
            tables: None,
        }
    }

    /// Precomputes the orbit of every comparison model.
    pub fn with_orbit_tables(
        rows: usize,
        cols: usize,
        r: usize,
        order: FieldOrder,
        group_budget: u64,
        mode: Parallelism,
    ) -> Result<Self> {
        let mut c = Self::new(rows, cols, r, order, group_budget);
        let group = EquivalenceGroup::for_shape(rows, cols, order, group_budget)?;
        let orbits = c.models.iter().map(|(_, m)| group.orbit(m, mode)).collect();
        c.tables = Some(OrbitTables { group, orbits });
        Ok(c)
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn rank_bound(&self) -> usize {
        self.r
    }

    pub fn group(&self) -> Option<&EquivalenceGroup> {
        self.tables.as_ref().map(|t| &t.group)
    }

    /// Checks `rk V <= r`, then classifies.
    pub fn classify(&self, v: &MatSpace) -> Result<ClassificationResult> {
        self.check_space(v)?;
        if !v.rank_at_most(self.r, self.member_budget)? {
            return Err(Error::Precondition(format!("space has rank above {}", self.r)));
        }
        self.classify_bounded(v)
    }

    fn check_space(&self, v: &MatSpace) -> Result<()> {
        if v.shape() != (self.rows, self.cols) {
            return Err(Error::Shape(format!(
                "classifier for {}x{} given a {}x{} space",
                self.rows,
                self.cols,
                v.rows(),
                v.cols()
            )));
        }
        if v.order() != self.order {
            return Err(Error::FieldMismatch(v.order().get(), self.order.get()));
        }
        Ok(())
    }

    /// Classifies a space already known to have rank at most `r`.
    pub fn classify_bounded(&self, v: &MatSpace) -> Result<ClassificationResult> {
        self.check_space(v)?;
        let (n, p, r) = (self.rows, self.cols, self.r);
        let mut labels = Vec::new();
        let images = v.sum_of_images();
        if images.dim() <= r {
            labels.push(Label::ImageConfined(images));
        }
        let kernel = v.common_kernel();
        if kernel.dim() + r >= p {
            labels.push(Label::KernelConfined(kernel));
        }
        for (k, (kind, model)) in self.models.iter().enumerate() {
            if model.dim() != v.dim() {
                continue;
            }
            let witness = match &self.tables {
                Some(t) => match t.orbits[k].get(v) {
                    Some(&idx) => Some(t.group.witness(idx).inverse()?),
                    None => None,
                },
                None => are_equivalent(v, model, self.group_budget)?,
            };
            if let Some(w) = witness {
                labels.push(match kind {
                    LabelKind::PrimitiveCol => Label::PrimitiveCol(w),
                    LabelKind::PrimitiveRow => Label::PrimitiveRow(w),
                    _ => Label::ExceptionalJ3(w),
                });
            }
        }
        let reg = regime(n, p, r, self.order, v.dim());
        let kinds: Vec<LabelKind> = labels.iter().map(Label::kind).collect();
        if matches!(reg, Regime::Below | Regime::Unsupported) {
            labels.push(Label::BelowThreshold);
        } else if !conclusion_holds(n, p, r, v.dim(), reg, &kinds) {
            labels.push(Label::Counterexample);
        }
        labels.sort_by_key(Label::kind);
        Ok(ClassificationResult {
            rows: n,
            cols: p,
            order: self.order,
            rank_bound: r,
            dim: v.dim(),
            labels,
        })
    }
}

/// Classifies `v` under the rank bound `r`, searching the group directly.
pub fn classify(v: &MatSpace, r: usize, budget: u64) -> Result<ClassificationResult> {
    Classifier::new(v.rows(), v.cols(), r, v.order(), budget).classify(v)
}

fn check_map(w: &MatSpace, phi: &[Mat]) -> Result<usize> {
    if phi.len() != w.dim() {
        return Err(Error::Shape(format!(
            "{} images given for a {}-dimensional space",
            phi.len(),
            w.dim()
        )));
    }
    let cols = phi.first().map_or(0, Mat::cols);
    for m in phi {
        if m.rows() != w.rows() || m.cols() != cols {
            return Err(Error::Shape("images must share one shape with the rows of W".into()));
        }
        if m.order() != w.order() {
            return Err(Error::FieldMismatch(m.order().get(), w.order().get()));
        }
    }
    Ok(cols)
}

/// `phi(M)` for the member with coordinates `coeffs`.
fn apply_map(phi: &[Mat], coeffs: &[u8], rows: usize, cols: usize, order: FieldOrder) -> Mat {
    let mut out = Mat::zeros(rows, cols, order);
    for (c, m) in coeffs.iter().zip(phi) {
        if *c != 0 {
            out = out.add(&m.scale(*c)).expect("same shape");
        }
    }
    out
}

/// Whether `rk [M | phi(M)] = rk M` for every member `M` of `w`.
pub fn rank_preservation_check(w: &MatSpace, phi: &[Mat], budget: u64) -> Result<bool> {
    let cols = check_map(w, phi)?;
    w.check_budget(budget)?;
    for coeffs in crate::vecspace::Odometer::new(w.dim(), w.order()) {
        let m = w.combine(&coeffs);
        let f = apply_map(phi, &coeffs, w.rows(), cols, w.order());
        if m.hcat(&f)?.rank() != m.rank() {
            return Ok(false);
        }
    }
    Ok(true)
}

/// A matrix `C` with `phi(M) = M C` on the basis of `w` (hence on all of `w`).
///
/// When several exist, the free parameters of the reduced echelon
/// parametrization of the solution set are all zero.
pub fn representation_solver(w: &MatSpace, phi: &[Mat]) -> Result<Mat> {
    let pc = check_map(w, phi)?;
    let (n, r, o) = (w.rows(), w.cols(), w.order());
    let basis = w.basis();
    for (b, f) in basis.iter().zip(phi) {
        if b.hcat(f)?.rank() != b.rank() {
            return Err(Error::Precondition(format!(
                "image of phi(M) not inside image of M for basis matrix\n{b}"
            )));
        }
    }
    // unknown x = vec(C), x[k * pc + j] = C[k][j]; one equation per entry of B C
    let unknowns = r * pc;
    let width = unknowns + 1;
    let mut rows: Vec<u8> = Vec::with_capacity(basis.len() * n * pc * width);
    for (b, f) in basis.iter().zip(phi) {
        for a in 0..n {
            for j in 0..pc {
                let mut eq = vec![0u8; width];
                for k in 0..r {
                    eq[k * pc + j] = b.get(a, k);
                }
                eq[unknowns] = f.get(a, j);
                rows.extend(eq);
            }
        }
    }
    let count = rows.len() / width;
    let pivots = rref_in_place(&mut rows, count, width, o, None);
    let mut x = vec![0u8; unknowns];
    for (i, &c) in pivots.iter().enumerate() {
        if c == unknowns {
            return Err(Error::NoSolution);
        }
        x[c] = rows[i * width + unknowns];
    }
    Mat::from_digits(r, pc, o, x)
}

/// The common kernel `im [C; -I]` obtained from the representation `phi(M) = M C`.
pub fn common_kernel_from_rep(w: &MatSpace, phi: &[Mat]) -> Result<VecSpace> {
    let c = representation_solver(w, phi)?;
    let o = w.order();
    let pc = c.cols();
    let a = c.vcat(&Mat::identity(pc, o).neg())?;
    for (b, f) in w.basis().iter().zip(phi) {
        debug_assert!(b.hcat(f)?.mul(&a)?.is_zero());
    }
    let cols: Vec<Vec<u8>> = (0..pc).map(|j| a.column(j)).collect();
    VecSpace::span(a.rows(), o, &cols)
}

/// Extends `space` by unit vectors until it reaches dimension `target`.
fn extend_with_units(space: &VecSpace, target: usize) -> Vec<Vec<u8>> {
    let n = space.ambient_dim();
    let mut cur = space.clone();
    let mut added = Vec::new();
    for j in 0..n {
        if cur.dim() >= target {
            break;
        }
        let mut e = vec![0u8; n];
        e[j] = 1;
        if !cur.contains(&e) {
            cur = cur.sum(&VecSpace::span(n, space.order(), &[e.clone()]).expect("unit")).expect("same ambient");
            added.push(e);
        }
    }
    added
}

/// A basis `(e_1, ..., e_n)` such that every plane `span(e_i, e_{i+1})`
/// meets `h` only in zero.
pub fn nice_basis(h: &VecSpace) -> Result<Vec<Vec<u8>>> {
    let n = h.ambient_dim();
    let o = h.order();
    if h.codim() < 2 {
        return Err(Error::CodimTooSmall(h.codim()));
    }
    // H' contains H and has codimension exactly 2
    let mut h_basis: Vec<Vec<u8>> = h.basis().to_vec();
    h_basis.extend(extend_with_units(h, n - 2));
    let h2 = VecSpace::span(n, o, &h_basis)?;
    let mut hu = h_basis.clone();
    hu.extend(extend_with_units(&h2, n));

    // the model: sum of even-position and of odd-position coordinates vanish
    let mut eqs = vec![0u8; 2 * n];
    for j in 0..n {
        eqs[(j % 2) * n + j] = 1;
    }
    let z = crate::matrix::kernel_of_rows(&eqs, 2, n, o);
    let model = VecSpace::span(n, o, &z)?;
    let mut zw = z.clone();
    zw.extend(extend_with_units(&model, n));

    let p = Mat::from_columns(n, o, &hu).mul(&Mat::from_columns(n, o, &zw).inverse()?)?;
    Ok((0..n).map(|j| p.column(j)).collect())
}

/// Whether each plane spanned by consecutive vectors meets `h` trivially.
pub fn consecutive_planes_avoid(h: &VecSpace, basis: &[Vec<u8>]) -> bool {
    basis.windows(2).all(|pair| match VecSpace::span(h.ambient_dim(), h.order(), pair) {
        Ok(plane) => plane.dim() == 2 && h.intersect(&plane).map(|i| i.dim() == 0).unwrap_or(false),
        Err(_) => false,
    })
}

/// `span { A^-1 x : A in v invertible }`.
pub fn inverse_orbit_span(v: &MatSpace, x: &[u8], budget: u64) -> Result<VecSpace> {
    let n = v.rows();
    if v.cols() != n {
        return Err(Error::Shape("inverse orbits need square matrices".into()));
    }
    if x.len() != n {
        return Err(Error::Shape(format!("vector of length {} for {n}x{n} matrices", x.len())));
    }
    if x.iter().all(|&d| d == 0) {
        return Err(Error::OutOfRange("x must be nonzero".into()));
    }
    v.check_budget(budget)?;
    let o = v.order();
    let mut span = VecSpace::zero(n, o);
    v.try_for_each_member(|digits| {
        let a = Mat::from_digits(n, n, o, digits.to_vec()).expect("n*n digits");
        if let Ok(inv) = a.inverse() {
            let y = inv.apply(x).expect("length n");
            if !span.contains(&y) {
                span = span.sum(&VecSpace::span(n, o, &[y]).expect("length n")).expect("same ambient");
                if span.dim() == n {
                    return ControlFlow::Break(());
                }
            }
        }
        ControlFlow::Continue(())
    });
    Ok(span)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum StabilizedModel {
    /// Stabilizes a hyperplane.
    Hr,
    /// Stabilizes a line.
    Kr,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StabilizedSubspace {
    pub subspace: VecSpace,
    pub model: StabilizedModel,
    /// A similarity `(S, S)` sending the space onto the model.
    pub witness: EquivalenceWitness,
}

/// The first nontrivial proper subspace (by dimension, then enumeration
/// order) stabilized by every invertible member of `y`, with the model it
/// forces.
pub fn stabilized_subspace_analysis(y: &MatSpace, budget: u64) -> Result<Option<StabilizedSubspace>> {
    let r = y.rows();
    if y.cols() != r {
        return Err(Error::Shape("stabilized subspaces need square matrices".into()));
    }
    if r == 0 || y.dim() != r * r - r + 1 {
        return Err(Error::Precondition(format!(
            "dimension {} is not r^2 - r + 1 for r = {r}",
            y.dim()
        )));
    }
    y.check_budget(budget)?;
    let o = y.order();
    let invertible: Vec<Mat> = y.members().filter(Mat::is_invertible).collect();
    for d in 1..r {
        for f in subspace_iter(r, d, o, budget)? {
            let stable = invertible.iter().all(|a| {
                f.basis()
                    .iter()
                    .all(|v| f.contains(&a.apply(v).expect("length r")))
            });
            if !stable {
                continue;
            }
            let mut cols = f.basis().to_vec();
            cols.extend(extend_with_units(&f, r));
            let s = Mat::from_columns(r, o, &cols).inverse()?;
            let witness = EquivalenceWitness::similarity(s)?;
            let image = apply_witness(y, &witness)?;
            let candidates = if d == 1 {
                [StabilizedModel::Kr, StabilizedModel::Hr]
            } else {
                [StabilizedModel::Hr, StabilizedModel::Kr]
            };
            for model in candidates {
                let target = match model {
                    StabilizedModel::Hr => models::model_hr(r, o)?,
                    StabilizedModel::Kr => models::model_kr(r, o)?,
                };
                if image == target {
                    return Ok(Some(StabilizedSubspace {
                        subspace: f,
                        model,
                        witness,
                    }));
                }
            }
            return Err(Error::Precondition(format!(
                "a {d}-dimensional subspace is stabilized but the space is similar to neither model"
            )));
        }
    }
    Ok(None)
}

/// Blocks `[[K, C], [L, alpha]]` of a matrix, `K` being `r x r`.
fn blocks(m: &Mat, r: usize) -> (Mat, Mat, Mat, Mat) {
    let (n, p) = m.shape();
    (
        m.submatrix(0, r, 0, r),
        m.submatrix(0, r, r, p),
        m.submatrix(r, n, 0, r),
        m.submatrix(r, n, r, p),
    )
}

/// The matrices of `v` with zeros in the given blocks.
fn with_zero_cells(v: &MatSpace, zero: impl Fn(usize, usize) -> bool) -> Result<MatSpace> {
    let (n, p) = v.shape();
    let o = v.order();
    let units: Vec<Mat> = (0..n)
        .flat_map(|i| (0..p).map(move |j| (i, j)))
        .filter(|&(i, j)| !zero(i, j))
        .map(|(i, j)| Mat::unit(n, p, i, j, o))
        .collect();
    v.intersect(&MatSpace::span(n, p, o, &units)?)
}

fn projection(v: &MatSpace, pick: impl Fn(&Mat) -> Mat, rows: usize, cols: usize) -> Result<MatSpace> {
    let mats: Vec<Mat> = v.basis().iter().map(pick).collect();
    MatSpace::span(rows, cols, v.order(), &mats)
}

/// The block data of a rank-`r` space normalized to contain `J_r`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReductionDiagnostics {
    pub rank: usize,
    pub normalized: MatSpace,
    /// Sends the input space onto `normalized`.
    pub witness: EquivalenceWitness,
    /// Top-left blocks of all members.
    pub k_space: MatSpace,
    /// Members with zero top-left block.
    pub w: MatSpace,
    /// Members of `w` with zero bottom-left block.
    pub h: MatSpace,
    /// Members of `w` with zero top-right block.
    pub h_prime: MatSpace,
    /// Sum of the images of the top-right blocks of `h`.
    pub g: VecSpace,
    pub qdim: usize,
    pub dim_k: usize,
    pub dim_l_of_w: usize,
    pub dim_c_of_h: usize,
    pub dimension_identity: bool,
    /// `L K^-1 C = alpha` for members with invertible top-left block.
    pub eq1: bool,
    /// `L(M) C(M) = alpha(M)` on `w`.
    pub eq2: bool,
    /// `L(M) C(N) + L(N) C(M) = 0` on `w x w`.
    pub eq3: bool,
    /// `L(M) P^-1 C(N) = 0` for `M` in `w`, `N` in `h`, `P` invertible in `k_space`.
    pub eq4: bool,
    /// The stabilized subspace of `k_space` when it has dimension `r^2 - r + 1`.
    pub stabilized: Option<StabilizedSubspace>,
}

/// The witness `(T, (U^T)^-1)` with `T m U^T = J_r`, from two reductions.
fn normalizing_witness(m: &Mat) -> Result<EquivalenceWitness> {
    let (reduced, t) = m.rref();
    let (_, u) = reduced.transpose().rref();
    EquivalenceWitness::new(t, u.transpose().inverse()?, false)
}

pub fn reduction_diagnostics(v: &MatSpace, r: usize) -> Result<ReductionDiagnostics> {
    let (n, p) = v.shape();
    let o = v.order();
    let budget = DEFAULT_MEMBER_BUDGET;
    if r == 0 || r >= n || r >= p {
        return Err(Error::OutOfRange(format!("need 0 < r < min(n, p), got r = {r} for {n}x{p}")));
    }
    if v.space_rank(budget)? != r {
        return Err(Error::Precondition(format!("space rank is not {r}")));
    }
    let first = v
        .members()
        .find(|m| m.rank() == r)
        .expect("a member reaches the space rank");
    let witness = normalizing_witness(&first)?;
    let nv = apply_witness(v, &witness)?;
    debug_assert!(nv.contains(&Mat::j_r(r, n, p, o)));

    let in_k = |i: usize, j: usize| i < r && j < r;
    let in_l = |i: usize, j: usize| i >= r && j < r;
    let in_c = |i: usize, j: usize| i < r && j >= r;
    let w = with_zero_cells(&nv, in_k)?;
    let h = with_zero_cells(&nv, |i, j| in_k(i, j) || in_l(i, j))?;
    let h_prime = with_zero_cells(&nv, |i, j| in_k(i, j) || in_c(i, j))?;
    let k_space = projection(&nv, |m| blocks(m, r).0, r, r)?;
    let l_of_w = projection(&w, |m| blocks(m, r).2, n - r, r)?;
    let c_of_h = projection(&h, |m| blocks(m, r).1, r, p - r)?;
    let g = c_of_h.sum_of_images();
    let dim_identity = nv.dim() == k_space.dim() + l_of_w.dim() + c_of_h.dim();

    let checked = |count: u128| -> Result<()> {
        if count > budget as u128 {
            return Err(Error::budget(count, budget));
        }
        Ok(())
    };
    checked(nv.cardinality())?;
    let eq1 = nv.members().all(|m| {
        let (k, c, l, a) = blocks(&m, r);
        match k.inverse() {
            Ok(ki) => l.mul(&ki).and_then(|x| x.mul(&c)).map(|x| x == a).unwrap_or(false),
            Err(_) => true,
        }
    });
    let w_members: Vec<(Mat, Mat, Mat)> = w
        .members()
        .map(|m| {
            let (_, c, l, a) = blocks(&m, r);
            (l, c, a)
        })
        .collect();
    let eq2 = w_members.iter().all(|(l, c, a)| l.mul(c).map(|x| x == *a).unwrap_or(false));
    checked(w.cardinality().saturating_mul(w.cardinality()))?;
    let eq3 = w_members.iter().all(|(lm, cm, _)| {
        w_members.iter().all(|(ln, cn, _)| {
            let s = lm.mul(cn).and_then(|x| x.add(&ln.mul(cm)?));
            s.map(|x| x.is_zero()).unwrap_or(false)
        })
    });
    let k_inverses: Vec<Mat> = k_space.members().filter_map(|k| k.inverse().ok()).collect();
    checked(
        w.cardinality()
            .saturating_mul(h.cardinality())
            .saturating_mul(k_space.cardinality()),
    )?;
    let h_blocks: Vec<Mat> = h.members().map(|m| blocks(&m, r).1).collect();
    let eq4 = w_members.iter().all(|(lm, _, _)| {
        k_inverses.iter().all(|pi| {
            let lp = lm.mul(pi).expect("r x r");
            h_blocks.iter().all(|cn| lp.mul(cn).map(|x| x.is_zero()).unwrap_or(false))
        })
    });
    let stabilized = if k_space.dim() == r * r - r + 1 {
        stabilized_subspace_analysis(&k_space, budget)?
    } else {
        None
    };
    Ok(ReductionDiagnostics {
        rank: r,
        normalized: nv,
        witness,
        dim_k: k_space.dim(),
        k_space,
        w,
        h,
        h_prime,
        qdim: g.dim(),
        g,
        dim_l_of_w: l_of_w.dim(),
        dim_c_of_h: c_of_h.dim(),
        dimension_identity: dim_identity,
        eq1,
        eq2,
        eq3,
        eq4,
        stabilized,
    })
}

/// Outcome of the final case split for spaces in the sparse normal form.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum GateOutcome {
    /// Equivalent to `R(1, r-1)`.
    Primitive(EquivalenceWitness),
    /// Equivalent to the exceptional 3x3 space over GF(2).
    Exceptional(EquivalenceWitness),
    /// Neither: the preconditions hold but no conclusion does.
    Counterexample,
}

/// Resolves a space whose top-left blocks form `K_r` and which contains
/// every matrix `[[0, 0, L], [0, 0, 0], [0, C, 0]]`.
pub fn lastlemma_gate(y: &MatSpace, r: usize, budget: u64) -> Result<GateOutcome> {
    let (n, p) = y.shape();
    let o = y.order();
    if !(r >= 1 && p > r && n >= p) {
        return Err(Error::Precondition(format!("need n >= p > r >= 1, got {n}x{p}, r = {r}")));
    }
    let k = projection(y, |m| m.submatrix(0, r, 0, r), r, r)?;
    if k != models::model_kr(r, o)? {
        return Err(Error::Precondition("top-left blocks are not K_r".into()));
    }
    let top = (r..p).map(|j| (0, j));
    let bottom = (r..n).flat_map(|i| (1..r).map(move |j| (i, j)));
    if let Some((i, j)) = top.chain(bottom).find(|&(i, j)| !y.contains(&Mat::unit(n, p, i, j, o))) {
        return Err(Error::Precondition(format!("unit matrix E({i},{j}) is missing")));
    }
    if let Some(w) = are_equivalent(y, &models::model_r(1, r - 1, n, p, o)?, budget)? {
        return Ok(GateOutcome::Primitive(w));
    }
    if exceptional_shape(n, p, r, o) {
        if let Some(w) = are_equivalent(y, &models::model_j3(), budget)? {
            return Ok(GateOutcome::Exceptional(w));
        }
    }
    Ok(GateOutcome::Counterexample)
}
