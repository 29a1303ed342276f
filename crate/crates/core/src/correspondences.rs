//! Fibers of the correspondences between GM varieties and the double EPW surface:
//! quintic curve and surface fibers over `Y²_A ∖ P(V5)`, the cubic scroll fibers
//! over the boundary curve, the cycle decompositions there, and the data of the
//! elementary transformation along a line.

use crate::epw::{dual_stratum_of, stratum_of};
use crate::error::{bail, Result};
use crate::fibers::{double_cover_fiber, in_sigma1, line_of_point, sigma_of_line, splitting_section, Rationality};
use crate::field::{Field, QuadraticClosure};
use crate::gm::{build_gm, plucker_coords, wedge_v5_matrix, GmInstance};
use crate::ideal::GradedIdeal;
use crate::lagrangian::{dual, LagrangianInstance};
use crate::linalg::{normalize, QuadraticForm, Subspace};

/// Degree through which fiber ideals are computed.
pub const FIBER_TOP: usize = 5;

/// Hilbert function of a linear section of `Gr(2,5)` of dimension `d`, `t = 0..=5`.
pub const CURVE_TABLE: [usize; 6] = [1, 5, 10, 15, 20, 25];
pub const SURFACE_TABLE: [usize; 6] = [1, 6, 16, 31, 51, 76];
/// Hyperplane section of `P¹ × P²` and `P¹ × P²` itself.
pub const SCROLL_SURFACE_TABLE: [usize; 5] = [1, 5, 12, 22, 35];
pub const SCROLL_THREEFOLD_TABLE: [usize; 6] = [1, 6, 18, 40, 75, 126];
/// The sextic curve `C_y`, the residual quintic and the quartic surface scroll.
pub const SEXTIC_CURVE_TABLE: [usize; 5] = [1, 5, 11, 17, 23];
pub const RESIDUAL_CURVE_TABLE: [usize; 5] = [1, 5, 10, 15, 20];
pub const SEXTIC_SURFACE_TABLE: [usize; 6] = [1, 6, 17, 34, 57, 86];
pub const QUARTIC_SCROLL_TABLE: [usize; 5] = [1, 6, 15, 28, 45];

fn embed_forms<F: QuadraticClosure>(f: &F, qs: &[QuadraticForm<F>]) -> Vec<QuadraticForm<F::Ext>> {
    let e = f.extension();
    qs.iter()
        .map(|q| QuadraticForm::new(q.gram().map(&e, |x| f.embed(x))).expect("symmetric"))
        .collect()
}

/// Coordinates of `sub` in the basis of `space`.
fn relative<F: Field>(space: &Subspace<F>, sub: &Subspace<F>) -> Result<Subspace<F>> {
    let rows = sub
        .basis_vecs()
        .iter()
        .map(|x| space.coords(x))
        .collect::<Option<Vec<_>>>();
    let Some(rows) = rows else {
        bail!(Integrity, "subspace is not contained in the ambient space");
    };
    Ok(Subspace::from_rows(space.field(), space.dim(), rows))
}

/// The fiber of `Z` over a point of `Y²_A ∖ P(V5)`.
#[derive(Debug, Clone)]
pub struct ZFiber<F: QuadraticClosure> {
    pub point: Vec<F::Elem>,
    pub sheet: usize,
    pub rationality: Rationality,
    /// The linear space `P(E)` in W coordinates, over the quadratic extension.
    pub space: Subspace<F::Ext>,
    /// Ideal of `Gr(2,V5) ∩ P(E)` in coordinates of the basis of `E`.
    pub ideal: GradedIdeal<F::Ext>,
    pub table: Vec<usize>,
    pub contains_base: bool,
}

/// `Gr(2,V5) ∩ P(E)` for the sheet-th maximal isotropic space `E ⊃ pi0` of `Q_v`.
pub fn z_fiber<F: QuadraticClosure>(
    gm: &GmInstance<F>,
    pi0: &Subspace<F>,
    v: &[F::Elem],
    sheet: usize,
) -> Result<ZFiber<F>> {
    let f = gm.field();
    let spaces = double_cover_fiber(gm, pi0, v)?;
    let Some(space) = spaces.spaces.get(sheet).cloned() else {
        bail!(
            InvalidInput,
            "sheet {sheet} of a fiber with {} spaces",
            spaces.spaces.len()
        );
    };
    let e = f.extension();
    let pl = embed_forms(f, &gm.plucker);
    let ideal = GradedIdeal::of_quadrics_on(&pl, &space, FIBER_TOP)?;
    let base = relative(&space, &pi0.map_field(&e, |x| f.embed(x)))?;
    let contains_base = ideal.vanishes_on(&base)?;
    Ok(ZFiber {
        point: normalize(f, v).expect("nonzero"),
        sheet,
        rationality: spaces.rationality,
        table: ideal.hilbert_function(),
        space,
        ideal,
        contains_base,
    })
}

/// Scroll fiber over a boundary point of a GM threefold.
#[derive(Debug, Clone)]
pub struct ThreefoldScroll<F: Field> {
    pub point: Vec<F::Elem>,
    /// `W ∩ (⟨v0, v⟩ ∧ V5)`, W coordinates.
    pub space: Subspace<F>,
    /// Ideal of `Gr(2,V5) ∩ P(space)` in coordinates of `space`.
    pub ideal: GradedIdeal<F>,
    pub table: Vec<usize>,
    pub contains_l0: bool,
    pub contains_lv: bool,
    /// `[v0 ∧ v] ∉ P(W)`.
    pub vertex_avoided: bool,
    pub l0: Subspace<F>,
    pub lv: Subspace<F>,
}

pub fn threefold_scroll<F: Field>(
    gm: &GmInstance<F>,
    l0: &Subspace<F>,
    v0: &[F::Elem],
    v: &[F::Elem],
) -> Result<ThreefoldScroll<F>> {
    let f = gm.field();
    let space = splitting_section(gm, l0, v0, v)?;
    let u0 = gm.to_v5(v0)?;
    let u = gm.to_v5(v)?;
    let vertex = plucker_coords(f, &u0, &u);
    let vertex_avoided = !gm.w.contains(&vertex);
    let ideal = GradedIdeal::of_quadrics_on(&gm.plucker, &space, FIBER_TOP + 1)?;
    let lv = line_of_point(gm, v)?;
    let l0_rel = relative(&space, l0)?;
    let lv_rel = relative(&space, &lv)?;
    Ok(ThreefoldScroll {
        point: normalize(f, v).expect("nonzero"),
        table: ideal.hilbert_function(),
        contains_l0: ideal.vanishes_on(&l0_rel)?,
        contains_lv: ideal.vanishes_on(&lv_rel)?,
        vertex_avoided,
        space,
        ideal,
        l0: l0_rel,
        lv: lv_rel,
    })
}

/// Scroll fiber over a boundary point of a GM fivefold.
#[derive(Debug, Clone)]
pub struct FivefoldScroll<F: Field> {
    pub point: Vec<F::Elem>,
    /// `Π0 + Π_y`, W coordinates.
    pub space: Subspace<F>,
    pub ideal: GradedIdeal<F>,
    pub table: Vec<usize>,
    pub pi0: Subspace<F>,
    pub piy: Subspace<F>,
    pub contains_planes: bool,
}

pub fn fivefold_scroll<F: Field>(
    gm: &GmInstance<F>,
    pi0: &Subspace<F>,
    v: &[F::Elem],
    piy: &Subspace<F>,
) -> Result<FivefoldScroll<F>> {
    let f = gm.field();
    if gm.n != 5 {
        bail!(Precondition, "fivefold scroll fibers need n = 5, got {}", gm.n);
    }
    if pi0.intersect(piy)?.dim() != 0 {
        bail!(Precondition, "the plane over the point meets Π0");
    }
    let space = pi0.sum(piy)?;
    let ideal = GradedIdeal::of_quadrics_on(&gm.plucker, &space, FIBER_TOP + 1)?;
    let a = relative(&space, pi0)?;
    let b = relative(&space, piy)?;
    Ok(FivefoldScroll {
        point: normalize(f, v).expect("nonzero"),
        table: ideal.hilbert_function(),
        contains_planes: ideal.vanishes_on(&a)? && ideal.vanishes_on(&b)?,
        space,
        ideal,
        pi0: a,
        piy: b,
    })
}

/// Outcome of a pointwise cycle decomposition check.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CycleReport {
    pub point: Vec<String>,
    pub scroll_table: Vec<usize>,
    pub section_table: Vec<usize>,
    pub residual_table: Vec<usize>,
    /// Hilbert function of the intersection of the residual with the removed
    /// components (threefold: `Z ∩ L_v`).
    pub meet_table: Vec<usize>,
    pub failures: Vec<String>,
}

impl CycleReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

fn expect_table(failures: &mut Vec<String>, what: &str, got: &[usize], want: &[usize]) {
    let n = want.len().min(got.len());
    if got[..n] != want[..n] || got.len() < want.len() {
        failures.push(format!("{what}: Hilbert function {got:?}, expected {want:?}"));
    }
}

/// Second difference of a Hilbert function at its last entry: the degree of a
/// surface, read off where the function is already polynomial.
fn surface_degree(h: &[usize]) -> i64 {
    let n = h.len();
    h[n - 1] as i64 - 2 * h[n - 2] as i64 + h[n - 3] as i64
}

fn format_point<F: Field>(f: &F, v: &[F::Elem]) -> Vec<String> {
    v.iter().map(|x| f.format(x)).collect()
}

/// `C_y = Z_y + L_v` on a GM threefold at an admissible boundary point `v`.
pub fn threefold_cycle_check<F: Field>(
    gm: &GmInstance<F>,
    l0: &Subspace<F>,
    v0: &[F::Elem],
    v: &[F::Elem],
) -> Result<CycleReport> {
    let f = gm.field();
    let scroll = threefold_scroll(gm, l0, v0, v)?;
    let mut failures = Vec::new();
    expect_table(&mut failures, "scroll", &scroll.table, &SCROLL_SURFACE_TABLE);
    if !scroll.contains_l0 {
        failures.push("scroll does not contain L0".into());
    }
    if !scroll.contains_lv {
        failures.push("scroll does not contain L_v".into());
    }
    if !scroll.vertex_avoided {
        failures.push("vertex v0 ∧ v lies in P(W)".into());
    }
    let q0 = gm.q0.restrict_to(&scroll.space)?;
    let mut quads: Vec<QuadraticForm<F>> = gm
        .plucker
        .iter()
        .map(|q| q.restrict_to(&scroll.space))
        .collect::<Result<_>>()?;
    quads.push(q0);
    let full = Subspace::full(f, scroll.space.dim());
    let c = GradedIdeal::of_quadrics_on(&quads, &full, FIBER_TOP)?;
    let c_table = c.hilbert_function();
    expect_table(&mut failures, "C_y", &c_table, &SEXTIC_CURVE_TABLE);
    let il = GradedIdeal::of_subspace(&scroll.lv, FIBER_TOP)?;
    if !c.contained_in(&il)? {
        failures.push("I(C_y) is not contained in I(L_v)".into());
    }
    let z = c.colon_subspace(&scroll.lv)?;
    let z_table = z.hilbert_function();
    expect_table(&mut failures, "residual quintic", &z_table, &RESIDUAL_CURVE_TABLE);
    if !c.truncate(z.top()).contained_in(&z)? {
        failures.push("I(C_y) is not contained in I(Z_y)".into());
    }
    let il_z = il.truncate(z.top());
    let union = z.intersect(&il_z)?;
    if !union.agrees_with(&c.truncate(z.top()))? {
        failures.push("I(C_y) differs from I(Z_y) ∩ I(L_v)".into());
    }
    let meet = z.sum(&il_z)?.hilbert_function();
    if meet.iter().skip(1).any(|&x| x != 2) {
        failures.push(format!("Z_y ∩ L_v has Hilbert function {meet:?}, expected length 2"));
    }
    let line: Vec<usize> = (0..=z.top()).map(|t| t + 1).collect();
    for t in 0..=z.top() {
        if c_table[t] + meet[t] != z_table[t] + line[t] {
            failures.push(format!(
                "h_C({t}) = {} but h_Z + h_L - h_(Z∩L) = {}",
                c_table[t],
                z_table[t] + line[t] - meet[t]
            ));
        }
    }
    Ok(CycleReport {
        point: format_point(f, v),
        scroll_table: scroll.table,
        section_table: c_table,
        residual_table: z_table,
        meet_table: meet,
        failures,
    })
}

/// `S_y = Π0 + Π_y + S'_y` on a GM fivefold at a boundary point.
pub fn fivefold_cycle_check<F: Field>(
    gm: &GmInstance<F>,
    pi0: &Subspace<F>,
    v: &[F::Elem],
    piy: &Subspace<F>,
) -> Result<CycleReport> {
    let f = gm.field();
    let scroll = fivefold_scroll(gm, pi0, v, piy)?;
    let mut failures = Vec::new();
    expect_table(&mut failures, "scroll", &scroll.table, &SCROLL_THREEFOLD_TABLE);
    if !scroll.contains_planes {
        failures.push("scroll does not contain both planes".into());
    }
    let mut quads: Vec<QuadraticForm<F>> = gm
        .plucker
        .iter()
        .map(|q| q.restrict_to(&scroll.space))
        .collect::<Result<_>>()?;
    quads.push(gm.q0.restrict_to(&scroll.space)?);
    let full = Subspace::full(f, scroll.space.dim());
    let s = GradedIdeal::of_quadrics_on(&quads, &full, FIBER_TOP + 1)?;
    let s_table = s.hilbert_function();
    expect_table(&mut failures, "S_y", &s_table, &SEXTIC_SURFACE_TABLE);
    if !s.vanishes_on(&scroll.pi0)? || !s.vanishes_on(&scroll.piy)? {
        failures.push("S_y does not contain both planes".into());
    }
    let residual = s.colon_subspace(&scroll.pi0)?.colon_subspace(&scroll.piy)?;
    let r_table = residual.hilbert_function();
    expect_table(&mut failures, "residual scroll", &r_table, &QUARTIC_SCROLL_TABLE);
    if residual.piece(1).dim() != 0 {
        failures.push("residual surface is degenerate".into());
    }
    if residual.vanishes_on(&scroll.pi0)? || residual.vanishes_on(&scroll.piy)? {
        failures.push("residual surface contains one of the planes".into());
    }
    let top = residual.top();
    let planes = GradedIdeal::of_subspace(&scroll.pi0, top)?.intersect(&GradedIdeal::of_subspace(&scroll.piy, top)?)?;
    let union = planes.intersect(&residual)?;
    if !union.agrees_with(&s.truncate(top))? {
        failures.push("I(S_y) differs from I(Π0) ∩ I(Π_y) ∩ I(S'_y)".into());
    }
    let meet = residual.sum(&planes)?.hilbert_function();
    let plane_degree = 2;
    if surface_degree(&s_table) != surface_degree(&r_table) + plane_degree {
        failures.push(format!(
            "degrees do not add up: {} != {} + {plane_degree}",
            surface_degree(&s_table),
            surface_degree(&r_table)
        ));
    }
    Ok(CycleReport {
        point: format_point(f, v),
        scroll_table: scroll.table,
        section_table: s_table,
        residual_table: r_table,
        meet_table: meet,
        failures,
    })
}

/// Data of the elementary transformation of a GM threefold along the line
/// `L0 = P(V1 ∧ V3)`, and of its result.
#[derive(Debug, Clone)]
pub struct LineTransformData<F: Field> {
    pub v1: Vec<F::Elem>,
    pub phi: Vec<F::Elem>,
    pub v1_stratum: usize,
    pub v5_dual_stratum: usize,
    /// `A ∩ (V1 ∧ ∧²V5) = 0`.
    pub transverse: bool,
    /// Basis of `V3`, V6 coordinates.
    pub v3: Subspace<F>,
    pub gm: GmInstance<F>,
    /// `L0` in W coordinates.
    pub l0: Subspace<F>,
    pub l0_nice: bool,
    pub dual_instance: LagrangianInstance<F>,
    pub dual_gm: GmInstance<F>,
    /// `V5^⊥ ∧ V3^⊥` in W' coordinates; equals the line of `[V5^⊥]` on the other side.
    pub l0_dual: Subspace<F>,
    pub l0_dual_nice: bool,
}

/// `V1 ∧ (V1 ∧ ∧²V5)` as a subspace of `∧³V6`.
fn v1_wedge_v5_planes<F: Field>(f: &F, v1: &[F::Elem], v5: &Subspace<F>) -> Result<Subspace<F>> {
    use crate::exterior::{basis_masks, wedge_sign};
    let b = v5.basis_vecs();
    let mut rows = Vec::new();
    for i in 0..b.len() {
        for j in i + 1..b.len() {
            let mut out = vec![f.zero(); 20];
            for (a, x) in v1.iter().enumerate() {
                for (c, y) in b[i].iter().enumerate() {
                    for (d, z) in b[j].iter().enumerate() {
                        let coef = f.mul(&f.mul(x, y), z);
                        if f.is_zero(&coef) {
                            continue;
                        }
                        let (ma, mc, md) = (1u8 << a, 1u8 << c, 1u8 << d);
                        let Some(s1) = wedge_sign(ma, mc) else { continue };
                        let Some(s2) = wedge_sign(ma | mc, md) else { continue };
                        let k = basis_masks(3).iter().position(|&m| m == ma | mc | md).expect("3-mask");
                        let term = if s1 * s2 > 0 { coef } else { f.neg(&coef) };
                        out[k] = f.add(&out[k], &term);
                    }
                }
            }
            rows.push(out);
        }
    }
    Ok(Subspace::from_rows(f, 20, rows))
}

/// Checks `V1 ⊂ V5`, `[V1] ∈ Y²_A`, `[V5] ∈ Y²_{A^⊥}`, `A ∩ (V1 ∧ ∧²V5) = 0`, and
/// builds both sides of the transformation.
pub fn line_transform_data<F: Field>(
    inst: &LagrangianInstance<F>,
    v1: &[F::Elem],
    phi: &[F::Elem],
) -> Result<LineTransformData<F>> {
    let f = &inst.field;
    let v1 = normalize(f, v1).ok_or_else(|| crate::Error::InvalidInput("V1 is zero".into()))?;
    let phi = normalize(f, phi).ok_or_else(|| crate::Error::InvalidInput("V5 is zero".into()))?;
    let pairing = v1
        .iter()
        .zip(&phi)
        .fold(f.zero(), |acc, (a, b)| f.add(&acc, &f.mul(a, b)));
    if !f.is_zero(&pairing) {
        bail!(Precondition, "V1 is not contained in V5");
    }
    let v1_stratum = stratum_of(inst, &v1)?;
    if v1_stratum != 2 {
        bail!(Precondition, "[V1] has stratum {v1_stratum}, expected 2");
    }
    let v5_dual_stratum = dual_stratum_of(inst, &phi)?;
    if v5_dual_stratum != 2 {
        bail!(Precondition, "[V5] has dual stratum {v5_dual_stratum}, expected 2");
    }
    let v5 = crate::epw::hyperplane_basis(f, &phi)?;
    let transverse = inst.a.intersect(&v1_wedge_v5_planes(f, &v1, &v5)?)?.dim() == 0;
    if !transverse {
        bail!(Precondition, "A meets V1 ∧ ∧²V5");
    }
    let gm = build_gm(inst, &phi)?;
    let u1 = gm.to_v5(&v1)?;
    let l0 = line_of_point(&gm, &v1)?;
    let l0_nice = !in_sigma1(&gm, &u1)?;
    // V3 = {x ∈ V5 : u1 ∧ x ∈ L0}
    let l0_full = gm.from_w_coords(&l0);
    let quotient = l0_full.annihilator();
    let m = wedge_v5_matrix(f, &u1).mul(&quotient.basis().transpose())?;
    let v3_5 = m.transpose().kernel();
    if v3_5.dim() != 3 {
        bail!(Integrity, "dim V3 = {}, expected 3", v3_5.dim());
    }
    let v3 = Subspace::from_rows(f, 6, v3_5.basis_vecs().iter().map(|x| gm.v5_to_v6(x)).collect());

    let provenance = inst.provenance.clone();
    let dual_instance = dual(inst)?.as_instance(&provenance)?;
    let dual_gm = build_gm(&dual_instance, &v1)?;
    let phi5 = dual_gm.to_v5(&phi)?;
    let v3_perp = v3.annihilator();
    let mut rows = Vec::new();
    for psi in v3_perp.basis_vecs() {
        let p5 = dual_gm.to_v5(&psi)?;
        rows.push(plucker_coords(f, &phi5, &p5));
    }
    let l0_dual = dual_gm.in_w_coords(&Subspace::from_rows(f, 10, rows))?;
    let line_dual = line_of_point(&dual_gm, &phi)?;
    if line_dual != l0_dual {
        bail!(Integrity, "P(V5^⊥ ∧ V3^⊥) is not the line of [V5^⊥]");
    }
    if sigma_of_line(&dual_gm, &l0_dual)? != phi {
        bail!(Integrity, "σ(L0') differs from [V5^⊥]");
    }
    let l0_dual_nice = !in_sigma1(&dual_gm, &phi5)?;
    Ok(LineTransformData {
        v1,
        phi,
        v1_stratum,
        v5_dual_stratum,
        transverse,
        v3,
        gm,
        l0,
        l0_nice,
        dual_instance,
        dual_gm,
        l0_dual,
        l0_dual_nice,
    })
}

impl<F: Field> LineTransformData<F> {
    /// The same data read from the other side: `(A^⊥, V5^⊥, V1^⊥)`.
    pub fn transform(&self) -> Result<LineTransformData<F>> {
        line_transform_data(&self.dual_instance, &self.phi, &self.v1)
    }

    /// Whether transforming twice returns the original Lagrangian, flag and `V3`.
    pub fn is_involution(&self, original: &LagrangianInstance<F>) -> Result<bool> {
        let back = self.transform()?.transform()?;
        Ok(back.dual_instance.a == self.dual_instance.a
            && back.gm.lagrangian.a == original.a
            && back.v1 == self.v1
            && back.phi == self.phi
            && back.v3 == self.v3
            && back.l0 == self.l0)
    }
}
