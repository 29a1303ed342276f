//! Geometry of single quadrics of a GM family: maximal isotropic spaces through
//! a fixed one, fibers of the first quadratic fibration, the conic of kernels of
//! `W^⊥`, and the correspondence between lines on a GM threefold and points of
//! `P(V5)`.
//!
//! Subspaces of `W` are given in coordinates of the RREF basis of `W`; points of
//! `P(V6)` in the original coordinates.

use std::fmt;

use crate::epw::stratum_of;
use crate::error::{bail, Result};
use crate::field::{Field, QuadraticClosure};
use crate::gm::{plane_of, skew_matrix, wedge_v5, GmInstance};
use crate::linalg::{normalize, Matrix, QuadraticForm, Subspace};

/// How the two isotropic lines of a binary form are defined.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Rationality {
    /// Two distinct lines over the base field.
    Split,
    /// Two conjugate lines over the quadratic extension.
    Inert,
    /// One line of multiplicity two.
    Double,
}

impl fmt::Display for Rationality {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Rationality::Split => "split",
            Rationality::Inert => "inert",
            Rationality::Double => "double",
        })
    }
}

/// Rationality of the zero set of `a x² + 2b xy + c y²` (not identically zero).
pub fn binary_rationality<F: Field>(f: &F, a: &F::Elem, b: &F::Elem, c: &F::Elem) -> Result<Rationality> {
    let disc = f.sub(&f.mul(b, b), &f.mul(a, c));
    if f.is_zero(&disc) {
        return Ok(Rationality::Double);
    }
    Ok(if f.sqrt(&disc)?.is_some() {
        Rationality::Split
    } else {
        Rationality::Inert
    })
}

/// Isotropic vectors `x r1 + y r2` of `a x² + 2b xy + c y²`, one per line, sorted by
/// the root `x/y` in element order with `y = 0` last.
fn isotropic_lines<F: Field>(f: &F, a: &F::Elem, b: &F::Elem, c: &F::Elem) -> Result<Vec<(F::Elem, F::Elem)>> {
    if f.is_zero(a) && f.is_zero(b) && f.is_zero(c) {
        bail!(InvalidInput, "binary form is zero");
    }
    let disc = f.sub(&f.mul(b, b), &f.mul(a, c));
    let Some(root) = f.sqrt(&disc)? else {
        bail!(Precondition, "isotropic lines are not defined over {}", f.spec());
    };
    let mut out: Vec<(F::Elem, F::Elem)> = Vec::new();
    if f.is_zero(a) {
        // a = 0: y = 0 and 2b x + c y = 0
        out.push((f.neg(c), f.add(b, b)));
        out.push((f.one(), f.zero()));
    } else {
        let nb = f.neg(b);
        for r in [f.add(&nb, &root), f.sub(&nb, &root)] {
            let x = f.div(&r, a).expect("nonzero");
            out.push((x, f.one()));
        }
    }
    let key = |p: &(F::Elem, F::Elem)| -> (bool, u64) {
        if f.is_zero(&p.1) {
            (true, 0)
        } else {
            let t = f.div(&p.0, &p.1).expect("nonzero");
            (false, f.index_of(&t).unwrap_or(0))
        }
    };
    out.sort_by_key(|p| key(p));
    if f.is_zero(&disc) {
        out.truncate(1);
    }
    Ok(out)
}

/// The maximal isotropic spaces of a corank-2 form through an isotropic space.
#[derive(Debug, Clone)]
pub struct TwoSpaces<F: QuadraticClosure> {
    pub rationality: Rationality,
    pub kernel: Subspace<F>,
    /// Over the quadratic extension, in sheet order; one entry when double.
    pub spaces: Vec<Subspace<F::Ext>>,
    pub multiplicities: Vec<usize>,
    /// The same spaces over the base field when they are rational.
    pub rational: Vec<Subspace<F>>,
}

impl<F: QuadraticClosure> TwoSpaces<F> {
    pub fn count_with_multiplicity(&self) -> usize {
        self.multiplicities.iter().sum()
    }
}

fn embed_form<F: QuadraticClosure>(f: &F, q: &QuadraticForm<F>) -> QuadraticForm<F::Ext> {
    let e = f.extension();
    QuadraticForm::new(q.gram().map(&e, |x| f.embed(x))).expect("symmetric")
}

fn embed_space<F: QuadraticClosure>(f: &F, s: &Subspace<F>) -> Subspace<F::Ext> {
    let e = f.extension();
    s.map_field(&e, |x| f.embed(x))
}

/// Spaces of dimension `dim pi + 3` containing `pi` on which `q` vanishes, for a
/// form of corank 2 and an isotropic `pi` meeting the kernel trivially.
pub fn two_spaces_through<F: QuadraticClosure>(q: &QuadraticForm<F>, pi: &Subspace<F>) -> Result<TwoSpaces<F>> {
    let f = q.field();
    if q.corank() != 2 {
        bail!(Precondition, "form has corank {}, expected 2", q.corank());
    }
    if pi.ambient() != q.dim() {
        bail!(Dimension, "subspace of {} in a form on {}", pi.ambient(), q.dim());
    }
    if !q.vanishes_on(pi) {
        bail!(Precondition, "subspace is not isotropic");
    }
    let kernel = q.kernel();
    if kernel.intersect(pi)?.dim() != 0 {
        bail!(Integrity, "isotropic subspace meets the kernel of the form");
    }
    if 2 * pi.dim() + 4 != q.dim() {
        bail!(
            Dimension,
            "form on {} with an isotropic subspace of dimension {}",
            q.dim(),
            pi.dim()
        );
    }
    let base = pi.sum(&kernel)?;
    let perp = q.perp(pi)?;
    // complete a basis of base to one of perp with two vectors
    let mut extra = Vec::new();
    let mut cur = base.clone();
    for x in perp.basis_vecs() {
        if !cur.contains(&x) {
            cur = cur.sum(&Subspace::from_rows(f, q.dim(), vec![x.clone()]))?;
            extra.push(x);
        }
    }
    if extra.len() != 2 {
        bail!(Integrity, "residual space has dimension {}", extra.len());
    }
    let (r1, r2) = (&extra[0], &extra[1]);
    let a = q.bilinear(r1, r1);
    let b = q.bilinear(r1, r2);
    let c = q.bilinear(r2, r2);
    let rationality = binary_rationality(f, &a, &b, &c)?;
    if rationality == Rationality::Double && f.is_zero(&a) && f.is_zero(&b) && f.is_zero(&c) {
        bail!(Integrity, "residual plane is totally isotropic");
    }
    let e = f.extension();
    let lift = |x: &F::Elem| f.embed(x);
    let lines = isotropic_lines(&e, &lift(&a), &lift(&b), &lift(&c))?;
    let base_e = embed_space(f, &base);
    let r1e: Vec<_> = r1.iter().map(lift).collect();
    let r2e: Vec<_> = r2.iter().map(lift).collect();
    let mut spaces = Vec::new();
    for (x, y) in &lines {
        let v: Vec<_> = r1e
            .iter()
            .zip(&r2e)
            .map(|(s, t)| e.add(&e.mul(x, s), &e.mul(y, t)))
            .collect();
        spaces.push(base_e.sum(&Subspace::from_rows(&e, q.dim(), vec![v]))?);
    }
    let multiplicities = if spaces.len() == 1 { vec![2] } else { vec![1, 1] };
    let mut rational = Vec::new();
    if rationality != Rationality::Inert {
        for (x, y) in isotropic_lines(f, &a, &b, &c)? {
            let v: Vec<_> = r1
                .iter()
                .zip(r2)
                .map(|(s, t)| f.add(&f.mul(&x, s), &f.mul(&y, t)))
                .collect();
            rational.push(base.sum(&Subspace::from_rows(f, q.dim(), vec![v]))?);
        }
    }
    let qe = embed_form(f, q);
    for s in &spaces {
        if !qe.vanishes_on(s) || s.dim() != pi.dim() + 3 {
            bail!(Integrity, "lifted space fails isotropy or dimension");
        }
    }
    Ok(TwoSpaces {
        rationality,
        kernel,
        spaces,
        multiplicities,
        rational,
    })
}

/// Whether all five Plücker forms and `Q(v0)` vanish on a subspace of `W`.
pub fn lies_on_x<F: Field>(gm: &GmInstance<F>, s: &Subspace<F>) -> bool {
    gm.plucker.iter().all(|q| q.vanishes_on(s)) && gm.q0.vanishes_on(s)
}

/// The two sheets over a point `v` of `Y²_A` off `P(V5)`: the maximal isotropic
/// spaces of `Q_v` through `pi0 ⊂ X`.
pub fn double_cover_fiber<F: QuadraticClosure>(
    gm: &GmInstance<F>,
    pi0: &Subspace<F>,
    v: &[F::Elem],
) -> Result<TwoSpaces<F>> {
    if !lies_on_x(gm, pi0) {
        bail!(Precondition, "base space does not lie on X");
    }
    let k = stratum_of(&gm.lagrangian, v)?;
    if k != 2 {
        bail!(Precondition, "point has stratum {k}, expected 2");
    }
    let q = crate::gm::quadric_at(gm, v)?;
    two_spaces_through(&q, pi0)
}

/// Fibers of the first quadratic fibration, named after the rows of the tables.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum FiberLabel {
    SmoothQuadric,
    CorankOneQuadric,
    TwoPlanes,
    DoublePlane,
    TwoReducedPoints,
    DoublePoint,
    Line,
    SmoothConic,
    TwoLines,
    DoubleLine,
    Unexpected,
}

impl fmt::Display for FiberLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            FiberLabel::SmoothQuadric => "smooth_quadric",
            FiberLabel::CorankOneQuadric => "corank1_quadric",
            FiberLabel::TwoPlanes => "two_planes",
            FiberLabel::DoublePlane => "double_plane",
            FiberLabel::TwoReducedPoints => "two_points",
            FiberLabel::DoublePoint => "double_point",
            FiberLabel::Line => "line",
            FiberLabel::SmoothConic => "smooth_conic",
            FiberLabel::TwoLines => "two_lines",
            FiberLabel::DoubleLine => "double_line",
            FiberLabel::Unexpected => "unexpected",
        })
    }
}

/// The label the tables assign to `(stratum, Σ1 membership)`.
pub fn predicted_label(n: usize, stratum: usize, sigma1: bool) -> FiberLabel {
    match (n, stratum, sigma1) {
        (5, 0, _) => FiberLabel::SmoothQuadric,
        (5, 1, _) => FiberLabel::CorankOneQuadric,
        (5, 2, _) => FiberLabel::TwoPlanes,
        (5, 3, _) => FiberLabel::DoublePlane,
        (3, 0, false) => FiberLabel::TwoReducedPoints,
        (3, 1, false) => FiberLabel::DoublePoint,
        (3, 2, false) => FiberLabel::Line,
        (3, 1, true) => FiberLabel::SmoothConic,
        (3, 2, true) => FiberLabel::TwoLines,
        (3, 3, _) => FiberLabel::DoubleLine,
        _ => FiberLabel::Unexpected,
    }
}

fn computed_label(n: usize, section_dim: usize, rank: usize) -> FiberLabel {
    match (n, section_dim, rank) {
        (5, 4, 4) => FiberLabel::SmoothQuadric,
        (5, 4, 3) => FiberLabel::CorankOneQuadric,
        (5, 4, 2) => FiberLabel::TwoPlanes,
        (5, 4, 1) => FiberLabel::DoublePlane,
        (3, 2, 2) => FiberLabel::TwoReducedPoints,
        (3, 2, 1) => FiberLabel::DoublePoint,
        (3, 2, 0) => FiberLabel::Line,
        (3, 3, 3) => FiberLabel::SmoothConic,
        (3, 3, 2) => FiberLabel::TwoLines,
        (3, 3, 1) => FiberLabel::DoubleLine,
        _ => FiberLabel::Unexpected,
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FiberClassification<F: Field> {
    pub point: Vec<F::Elem>,
    pub stratum: usize,
    /// `None` for fivefolds.
    pub sigma1: Option<bool>,
    /// `dim(W ∩ (v ∧ V5))`.
    pub section_dim: usize,
    /// Corank of `Q(v0)` on the section.
    pub corank: usize,
    pub label: FiberLabel,
    pub predicted: FiberLabel,
    /// For rank-2 fibers, whether the two components are rational.
    pub rationality: Option<Rationality>,
    /// The two planes (W coordinates) of a rank-2 fivefold fiber, when rational.
    pub planes: Vec<Subspace<F>>,
}

impl<F: Field> FiberClassification<F> {
    pub fn consistent(&self) -> bool {
        self.label == self.predicted && self.label != FiberLabel::Unexpected
    }
}

/// `W ∩ (v ∧ V5)` in W coordinates for `v` in V5 coordinates.
pub fn section_at<F: Field>(gm: &GmInstance<F>, u: &[F::Elem]) -> Result<Subspace<F>> {
    let s = gm.w.intersect(&wedge_v5(gm.field(), u))?;
    gm.in_w_coords(&s)
}

/// Maximal isotropic spaces of a form whose reduction by the kernel is a
/// nondegenerate binary form: kernel plus each isotropic line.
fn split_rank_two<F: Field>(q: &QuadraticForm<F>, s: &Subspace<F>) -> Result<(Rationality, Vec<Subspace<F>>)> {
    let f = q.field();
    let r = q.restrict_to(s)?;
    let (ker, red, comp) = r.corank_reduce();
    if red.dim() != 2 || red.rank() != 2 {
        bail!(Precondition, "form does not have rank 2");
    }
    let g = red.gram();
    let rat = binary_rationality(f, g.get(0, 0), g.get(0, 1), g.get(1, 1))?;
    let mut out = Vec::new();
    if rat == Rationality::Split {
        let dim = s.dim();
        for (x, y) in isotropic_lines(f, g.get(0, 0), g.get(0, 1), g.get(1, 1))? {
            let mut v = vec![f.zero(); dim];
            v[comp[0]] = x;
            v[comp[1]] = y;
            let local = ker.sum(&Subspace::from_rows(f, dim, vec![v]))?;
            out.push(Subspace::from_matrix(&local.basis().mul(s.basis())?));
        }
    }
    Ok((rat, out))
}

/// Classifies `ρ1^{-1}([v])` for `v ∈ V5` on an ordinary GM threefold or fivefold.
pub fn rho1_fiber_classify<F: Field>(gm: &GmInstance<F>, v: &[F::Elem]) -> Result<FiberClassification<F>> {
    let f = gm.field();
    let u = gm.to_v5(v)?;
    if u.iter().all(|x| f.is_zero(x)) {
        bail!(InvalidInput, "zero vector");
    }
    if gm.n != 3 && gm.n != 5 {
        bail!(
            Precondition,
            "fiber tables cover threefolds and fivefolds, not n = {}",
            gm.n
        );
    }
    let stratum = stratum_of(&gm.lagrangian, v)?;
    let sigma1 = (gm.n == 3).then(|| in_sigma1(gm, &u)).transpose()?;
    let s = section_at(gm, &u)?;
    let rank = if s.dim() == 0 { 0 } else { gm.q0.restrict_to(&s)?.rank() };
    let label = computed_label(gm.n, s.dim(), rank);
    let mut rationality = None;
    let mut planes = Vec::new();
    if rank == 2 {
        let (r, sp) = split_rank_two(&gm.q0, &s)?;
        rationality = Some(r);
        if gm.n == 5 {
            planes = sp;
        }
    }
    Ok(FiberClassification {
        point: normalize(f, v).expect("nonzero"),
        stratum,
        sigma1,
        section_dim: s.dim(),
        corank: s.dim() - rank,
        label,
        predicted: predicted_label(gm.n, stratum, sigma1.unwrap_or(false)),
        rationality,
        planes,
    })
}

fn pencil<F: Field>(gm: &GmInstance<F>) -> Result<[Matrix<F>; 2]> {
    if gm.w_perp.dim() != 2 {
        bail!(Precondition, "W^⊥ has dimension {}, expected a pencil", gm.w_perp.dim());
    }
    let f = gm.field();
    let b = gm.w_perp.basis_vecs();
    Ok([skew_matrix(f, &b[0]), skew_matrix(f, &b[1])])
}

/// Whether `u ∈ V5` is the kernel of a member of the pencil `W^⊥`.
pub fn in_sigma1<F: Field>(gm: &GmInstance<F>, u: &[F::Elem]) -> Result<bool> {
    let [s1, s2] = pencil(gm)?;
    let m = Matrix::from_rows(gm.field(), 5, vec![s1.mul_vec(u), s2.mul_vec(u)])?;
    Ok(m.rank() < 2)
}

/// Signed 4x4 sub-Pfaffians of a 5x5 skew matrix; they span its kernel when it
/// has rank 4.
pub fn pfaffian_kernel<F: Field>(f: &F, m: &Matrix<F>) -> Vec<F::Elem> {
    (0..5)
        .map(|i| {
            let idx: Vec<usize> = (0..5).filter(|&j| j != i).collect();
            let g = |a: usize, b: usize| m.get(idx[a], idx[b]).clone();
            let pf = f.add(
                &f.sub(&f.mul(&g(0, 1), &g(2, 3)), &f.mul(&g(0, 2), &g(1, 3))),
                &f.mul(&g(0, 3), &g(1, 2)),
            );
            if i % 2 == 0 {
                pf
            } else {
                f.neg(&pf)
            }
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct Sigma1Conic<F: Field> {
    /// Basis of `W^⊥` as skew forms on V5.
    pub pencil: [Matrix<F>; 2],
    /// `k(λ, μ) = λ² k[0] + λμ k[1] + μ² k[2]` spans the kernel of `λ S1 + μ S2`.
    pub kernel_map: [Vec<F::Elem>; 3],
    /// The plane of `V5` containing the conic.
    pub span: Subspace<F>,
    /// The conic in coordinates of `span`.
    pub conic: QuadraticForm<F>,
    /// Pencil members checked for a one-dimensional kernel.
    pub members_checked: u64,
    pub samples: usize,
}

impl<F: Field> Sigma1Conic<F> {
    pub fn kernel_at(&self, f: &F, lam: &F::Elem, mu: &F::Elem) -> Vec<F::Elem> {
        let [a, b, c] = &self.kernel_map;
        (0..5)
            .map(|i| {
                let x = f.mul(&f.mul(lam, lam), &a[i]);
                let y = f.mul(&f.mul(lam, mu), &b[i]);
                let z = f.mul(&f.mul(mu, mu), &c[i]);
                f.add(&f.add(&x, &y), &z)
            })
            .collect()
    }
}

fn pencil_params<F: Field>(f: &F, count: u64) -> Vec<(F::Elem, F::Elem)> {
    let mut out = vec![(f.one(), f.zero())];
    let mut i = 0;
    while (out.len() as u64) < count && f.order().is_none_or(|q| i < q) {
        out.push((f.element(i), f.one()));
        i += 1;
    }
    out
}

/// The conic of kernels of the pencil `W^⊥` on a GM threefold.
pub fn sigma1_conic<F: Field>(gm: &GmInstance<F>) -> Result<Sigma1Conic<F>> {
    let f = gm.field();
    let [s1, s2] = pencil(gm)?;
    let member = |lam: &F::Elem, mu: &F::Elem| s1.scale(lam).add(&s2.scale(mu)).expect("shape");
    let members = f.order().map_or(64, |q| q + 1);
    for (lam, mu) in pencil_params(f, members) {
        let m = member(&lam, &mu);
        let k = 5 - m.rank();
        if k != 1 {
            bail!(Integrity, "pencil member with {k}-dimensional kernel; X is singular");
        }
    }
    let k1 = pfaffian_kernel(f, &s1);
    let k3 = pfaffian_kernel(f, &s2);
    let k13 = pfaffian_kernel(f, &s1.add(&s2)?);
    let k2: Vec<F::Elem> = (0..5).map(|i| f.sub(&f.sub(&k13[i], &k1[i]), &k3[i])).collect();
    let kernel_map = [k1, k2, k3];
    let span = Subspace::from_rows(f, 5, kernel_map.to_vec());
    if span.dim() != 3 {
        bail!(Integrity, "kernels span a space of dimension {}", span.dim());
    }
    let proto = Sigma1Conic {
        pencil: [s1.clone(), s2.clone()],
        kernel_map,
        span: span.clone(),
        conic: QuadraticForm::zero(f, 3),
        members_checked: members,
        samples: 0,
    };
    let params = pencil_params(f, 7);
    let mut rows = Vec::new();
    for (lam, mu) in &params {
        let k = proto.kernel_at(f, lam, mu);
        if !member(lam, mu).mul_vec(&k).iter().all(|x| f.is_zero(x)) {
            bail!(Integrity, "Pfaffian vector is not in the kernel");
        }
        let x = span.coords(&k).expect("in span");
        rows.push(vec![
            f.mul(&x[0], &x[0]),
            f.mul(&x[0], &x[1]),
            f.mul(&x[0], &x[2]),
            f.mul(&x[1], &x[1]),
            f.mul(&x[1], &x[2]),
            f.mul(&x[2], &x[2]),
        ]);
    }
    let fit = Matrix::from_rows(f, 6, rows)?.kernel();
    if fit.dim() != 1 {
        bail!(Integrity, "kernel points lie on {} independent conics", fit.dim());
    }
    let c = fit.basis_vecs().remove(0);
    let two = f.from_i64(2);
    let g = Matrix::from_rows(
        f,
        3,
        vec![
            vec![f.mul(&two, &c[0]), c[1].clone(), c[2].clone()],
            vec![c[1].clone(), f.mul(&two, &c[3]), c[4].clone()],
            vec![c[2].clone(), c[4].clone(), f.mul(&two, &c[5])],
        ],
    )?;
    let conic = QuadraticForm::new(g)?;
    if conic.rank() != 3 {
        bail!(Integrity, "fitted conic has rank {}", conic.rank());
    }
    Ok(Sigma1Conic {
        conic,
        samples: params.len(),
        ..proto
    })
}

/// `L_v = W ∩ (v ∧ V5)` for a point of `Y²_{A,V5}` off `Σ1`, in W coordinates.
pub fn line_of_point<F: Field>(gm: &GmInstance<F>, v: &[F::Elem]) -> Result<Subspace<F>> {
    let u = gm.to_v5(v)?;
    if gm.n != 3 {
        bail!(Precondition, "lines of points are defined on threefolds");
    }
    let k = stratum_of(&gm.lagrangian, v)?;
    if k != 2 {
        bail!(Precondition, "point has stratum {k}, expected 2");
    }
    if in_sigma1(gm, &u)? {
        bail!(Precondition, "point lies on the conic Σ1");
    }
    let s = section_at(gm, &u)?;
    if s.dim() != 2 {
        bail!(Integrity, "dim W ∩ (v ∧ V5) = {}, expected 2", s.dim());
    }
    Ok(s)
}

/// `[V1] = [U ∩ U']` for two points of a line `P(L) ⊂ Gr(2,V5)` (W coordinates).
pub fn sigma_of_line<F: Field>(gm: &GmInstance<F>, l: &Subspace<F>) -> Result<Vec<F::Elem>> {
    let f = gm.field();
    if l.dim() != 2 {
        bail!(Dimension, "a line needs a 2-dimensional subspace, got {}", l.dim());
    }
    let pts = gm.from_w_coords(l).basis_vecs();
    let mut planes = Vec::new();
    for p in &pts {
        match plane_of(f, p) {
            Some(u) => planes.push(u),
            None => bail!(Precondition, "line point is not on the Grassmannian"),
        }
    }
    let v1 = planes[0].intersect(&planes[1])?;
    if v1.dim() != 1 {
        bail!(Precondition, "planes of the line meet in dimension {}", v1.dim());
    }
    let v = gm.v5_to_v6(&v1.basis_vecs()[0]);
    Ok(normalize(f, &v).expect("nonzero"))
}

/// Why a point of `Y^{≥2}_{A,V5}` is not an admissible boundary point for a line
/// `L0` with `σ(L0) = [v0]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Exclusion {
    NotInHyperplane,
    StratumNotTwo(usize),
    SameAsBase,
    OnSigma1,
    LineMeetsBase,
}

impl fmt::Display for Exclusion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Exclusion::NotInHyperplane => f.write_str("point is not in P(V5)"),
            Exclusion::StratumNotTwo(k) => write!(f, "stratum {k} instead of 2"),
            Exclusion::SameAsBase => f.write_str("point equals σ(L0)"),
            Exclusion::OnSigma1 => f.write_str("point lies on Σ1"),
            Exclusion::LineMeetsBase => f.write_str("line L_v meets L0"),
        }
    }
}

/// Checks the exclusions for a threefold boundary point.
pub fn boundary_exclusion<F: Field>(
    gm: &GmInstance<F>,
    l0: &Subspace<F>,
    v0: &[F::Elem],
    v: &[F::Elem],
) -> Result<Option<Exclusion>> {
    let f = gm.field();
    let Ok(u) = gm.to_v5(v) else {
        return Ok(Some(Exclusion::NotInHyperplane));
    };
    let k = stratum_of(&gm.lagrangian, v)?;
    if k != 2 {
        return Ok(Some(Exclusion::StratumNotTwo(k)));
    }
    if normalize(f, v) == normalize(f, v0) {
        return Ok(Some(Exclusion::SameAsBase));
    }
    if in_sigma1(gm, &u)? {
        return Ok(Some(Exclusion::OnSigma1));
    }
    let lv = section_at(gm, &u)?;
    if lv.intersect(l0)?.dim() != 0 {
        return Ok(Some(Exclusion::LineMeetsBase));
    }
    Ok(None)
}

/// `W ∩ (⟨v0, v⟩ ∧ V5)` for an admissible boundary point `v` of a GM threefold
/// with nice line `L0`, `σ(L0) = [v0]`; W coordinates, dimension 5.
pub fn splitting_section<F: Field>(
    gm: &GmInstance<F>,
    l0: &Subspace<F>,
    v0: &[F::Elem],
    v: &[F::Elem],
) -> Result<Subspace<F>> {
    let f = gm.field();
    if let Some(e) = boundary_exclusion(gm, l0, v0, v)? {
        bail!(Precondition, "excluded boundary point: {e}");
    }
    let u0 = gm.to_v5(v0)?;
    let u = gm.to_v5(v)?;
    let v2v5 = wedge_v5(f, &u0).sum(&wedge_v5(f, &u))?;
    let s = gm.in_w_coords(&gm.w.intersect(&v2v5)?)?;
    if s.dim() != 5 {
        bail!(
            Integrity,
            "dim W ∩ (V2 ∧ V5) = {}; P(W) is not transverse to P(V2 ∧ V5)",
            s.dim()
        );
    }
    if !s.contains_space(l0) {
        bail!(Integrity, "section does not contain L0");
    }
    if !gm.plucker_on_w(&u).vanishes_on(&s) {
        bail!(Integrity, "section is not isotropic for Q_v");
    }
    Ok(s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::PrimeField;
    use crate::linalg::Matrix;

    fn hyperbolic(f: &PrimeField, pairs: usize, kernel: usize) -> QuadraticForm<PrimeField> {
        let n = 2 * pairs + kernel;
        let mut g = Matrix::zeros(f, n, n);
        for i in 0..pairs {
            g.set(2 * i, 2 * i + 1, 1);
            g.set(2 * i + 1, 2 * i, 1);
        }
        QuadraticForm::new(g).unwrap()
    }

    fn unit(n: usize, i: usize) -> Vec<u64> {
        let mut v = vec![0; n];
        v[i] = 1;
        v
    }

    #[test]
    fn hyperbolic_solutions() {
        let f = PrimeField::new(7).unwrap();
        // s = 1: dim 8, corank 2, pi = <e0, e2>
        let q = hyperbolic(&f, 3, 2);
        let pi = Subspace::from_rows(&f, 8, vec![unit(8, 0), unit(8, 2)]);
        let t = two_spaces_through(&q, &pi).unwrap();
        assert_eq!(t.rationality, Rationality::Split);
        assert_eq!(t.rational.len(), 2);
        let expect_a = Subspace::from_rows(&f, 8, vec![unit(8, 0), unit(8, 2), unit(8, 4), unit(8, 6), unit(8, 7)]);
        let expect_b = Subspace::from_rows(&f, 8, vec![unit(8, 0), unit(8, 2), unit(8, 5), unit(8, 6), unit(8, 7)]);
        assert!(t.rational.contains(&expect_a) && t.rational.contains(&expect_b));
        assert_eq!(t.count_with_multiplicity(), 2);
        for s in &t.rational {
            assert!(q.vanishes_on(s) && s.contains_space(&pi) && s.contains_space(&t.kernel));
        }
    }

    #[test]
    fn inert_residual_plane() {
        let f = PrimeField::new(7).unwrap();
        // residual plane x² - 3y² with 3 a non-square mod 7
        let mut g = Matrix::zeros(&f, 8, 8);
        for i in 0..2 {
            g.set(2 * i, 2 * i + 1, 1);
            g.set(2 * i + 1, 2 * i, 1);
        }
        g.set(4, 4, 1);
        g.set(5, 5, f.neg(&3));
        let q = QuadraticForm::new(g).unwrap();
        let pi = Subspace::from_rows(&f, 8, vec![unit(8, 0), unit(8, 2)]);
        let t = two_spaces_through(&q, &pi).unwrap();
        assert_eq!(t.rationality, Rationality::Inert);
        assert!(t.rational.is_empty());
        assert_eq!(t.spaces.len(), 2);
        assert_ne!(t.spaces[0], t.spaces[1]);
        let e = f.extension();
        let qe = QuadraticForm::new(q.gram().map(&e, |x| f.embed(x))).unwrap();
        for s in &t.spaces {
            assert!(qe.vanishes_on(s));
            assert_eq!(s.dim(), 5);
        }
    }

    #[test]
    fn bad_inputs() {
        let f = PrimeField::new(7).unwrap();
        let q = hyperbolic(&f, 3, 2);
        let in_kernel = Subspace::from_rows(&f, 8, vec![unit(8, 0), unit(8, 6)]);
        assert!(matches!(
            two_spaces_through(&q, &in_kernel),
            Err(crate::Error::Integrity(_))
        ));
        let q1 = hyperbolic(&f, 4, 0);
        let pi = Subspace::from_rows(&f, 8, vec![unit(8, 0), unit(8, 2)]);
        assert!(two_spaces_through(&q1, &pi).is_err());
    }

    #[test]
    fn pfaffian_vector_is_kernel() {
        let f = PrimeField::new(11).unwrap();
        let mut rng = <rand_chacha::ChaCha8Rng as rand::SeedableRng>::seed_from_u64(3);
        for _ in 0..20 {
            let s: Vec<u64> = (0..10).map(|_| f.random(&mut rng)).collect();
            let m = skew_matrix(&f, &s);
            let k = pfaffian_kernel(&f, &m);
            assert!(m.mul_vec(&k).iter().all(|&x| x == 0));
            if m.rank() == 4 {
                assert!(k.iter().any(|&x| x != 0));
            }
        }
    }

    #[test]
    fn labels_cover_tables() {
        assert_eq!(predicted_label(5, 2, false), FiberLabel::TwoPlanes);
        assert_eq!(predicted_label(3, 2, true), FiberLabel::TwoLines);
        assert_eq!(predicted_label(3, 0, true), FiberLabel::Unexpected);
        assert_eq!(computed_label(3, 2, 0), FiberLabel::Line);
    }
}
