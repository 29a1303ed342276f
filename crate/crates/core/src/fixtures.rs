//! Deterministic searches for GM threefolds and fivefolds with the auxiliary data
//! the correspondence checks need: a nice line or a plane over a point of
//! `Y²_{A,V5}`, the admissible boundary points, and points of `Y²_A ∖ P(V5)`.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::epw::{dual_stratify, stratify, StratifyOptions};
use crate::error::{bail, Result};
use crate::fibers::{boundary_exclusion, in_sigma1, line_of_point, rho1_fiber_classify, sigma1_conic, Exclusion};
use crate::field::{Field, QuadraticClosure};
use crate::gm::{build_gm, GmInstance};
use crate::lagrangian::{decomposable_search, random_instance, LagrangianInstance, NdvStatus, ScanOptions};
use crate::linalg::{dot, Matrix, Subspace};

/// Seeds tried by the searches, starting from the requested one.
pub const SEED_WINDOW: u64 = 16;
/// Candidate hyperplanes tried per seed for fivefolds.
const FIVEFOLD_HYPERPLANES: usize = 48;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FixtureOptions {
    /// Stop at the first configuration with this many admissible boundary points.
    pub min_boundary: usize,
    /// Skip instances where a rational decomposable vector turns up.
    pub ndv_check: bool,
    pub chunks: usize,
}

impl Default for FixtureOptions {
    fn default() -> Self {
        FixtureOptions {
            min_boundary: 10,
            ndv_check: true,
            chunks: 64,
        }
    }
}

/// Points of `Y^{≥2}_A` sorted by stratum.
#[derive(Debug, Clone)]
pub struct DoublePoints<F: Field> {
    pub stratum_two: Vec<Vec<F::Elem>>,
    pub higher: Vec<Vec<F::Elem>>,
}

pub fn double_points<F: Field>(inst: &LagrangianInstance<F>, chunks: usize) -> Result<DoublePoints<F>> {
    let opts = StratifyOptions {
        keep_all_from: Some(2),
        chunks,
        ..StratifyOptions::default()
    };
    let rep = stratify(inst, &opts)?;
    let mut higher = Vec::new();
    for (&k, pts) in &rep.witnesses {
        if k > 2 {
            higher.extend(pts.iter().cloned());
        }
    }
    Ok(DoublePoints {
        stratum_two: rep.points(2).to_vec(),
        higher,
    })
}

fn ndv_ok<F: QuadraticClosure>(inst: &LagrangianInstance<F>, opts: &FixtureOptions) -> Result<bool> {
    if !opts.ndv_check {
        return Ok(true);
    }
    let scan = ScanOptions {
        chunks: opts.chunks,
        ..ScanOptions::default()
    };
    Ok(decomposable_search(inst, 1, &scan)?.status != NdvStatus::WitnessFound)
}

fn split_by<F: Field>(f: &F, pts: &[Vec<F::Elem>], phi: &[F::Elem]) -> (Vec<Vec<F::Elem>>, Vec<Vec<F::Elem>>) {
    pts.iter().cloned().partition(|v| f.is_zero(&dot(f, v, phi)))
}

/// A GM threefold with a nice line `L0`, `σ(L0) = [base_point]`.
#[derive(Debug, Clone)]
pub struct ThreefoldFixture<F: Field> {
    pub seed: u64,
    pub gm: GmInstance<F>,
    pub base_point: Vec<F::Elem>,
    /// W coordinates.
    pub l0: Subspace<F>,
    /// Points of `Y^{≥2}_{A,V5}` passing every exclusion.
    pub boundary: Vec<Vec<F::Elem>>,
    pub excluded: Vec<(Vec<F::Elem>, Exclusion)>,
    /// Stratum-2 points of `P(V6) ∖ P(V5)`.
    pub off_hyperplane: Vec<Vec<F::Elem>>,
}

fn threefold_at<F: Field>(
    gm: &GmInstance<F>,
    seed: u64,
    on: &[Vec<F::Elem>],
    on_higher: &[Vec<F::Elem>],
    off: &[Vec<F::Elem>],
    base: &[F::Elem],
) -> Result<Option<ThreefoldFixture<F>>> {
    let u = gm.to_v5(base)?;
    if in_sigma1(gm, &u)? {
        return Ok(None);
    }
    let l0 = line_of_point(gm, base)?;
    let mut boundary = Vec::new();
    let mut excluded = Vec::new();
    for v in on.iter().chain(on_higher) {
        match boundary_exclusion(gm, &l0, base, v)? {
            None => boundary.push(v.clone()),
            Some(e) => excluded.push((v.clone(), e)),
        }
    }
    Ok(Some(ThreefoldFixture {
        seed,
        gm: gm.clone(),
        base_point: base.to_vec(),
        l0,
        boundary,
        excluded,
        off_hyperplane: off.to_vec(),
    }))
}

/// Searches seeds `seed..seed + SEED_WINDOW` for a smooth GM threefold with a
/// nice line, preferring many admissible boundary points.
pub fn threefold_fixture<F: QuadraticClosure>(f: &F, seed: u64, opts: &FixtureOptions) -> Result<ThreefoldFixture<F>> {
    let mut best: Option<ThreefoldFixture<F>> = None;
    for s in seed..seed + SEED_WINDOW {
        let inst = random_instance(s, f);
        if !ndv_ok(&inst, opts)? {
            continue;
        }
        let pts = double_points(&inst, opts.chunks)?;
        let dopts = StratifyOptions {
            keep_all_from: Some(2),
            chunks: opts.chunks,
            ..StratifyOptions::default()
        };
        let drep = dual_stratify(&inst, &dopts)?;
        for phi in drep.points(2) {
            let gm = build_gm(&inst, phi)?;
            if sigma1_conic(&gm).is_err() {
                continue;
            }
            let (on, off) = split_by(f, &pts.stratum_two, phi);
            let (on_higher, _) = split_by(f, &pts.higher, phi);
            for base in &on {
                let Some(fx) = threefold_at(&gm, s, &on, &on_higher, &off, base)? else {
                    continue;
                };
                if best.as_ref().is_none_or(|b| fx.boundary.len() > b.boundary.len()) {
                    best = Some(fx);
                }
                if best.as_ref().is_some_and(|b| b.boundary.len() >= opts.min_boundary) {
                    return Ok(best.expect("set"));
                }
            }
        }
    }
    match best {
        Some(b) => Ok(b),
        None => bail!(
            Precondition,
            "no threefold with a nice line for seeds {seed}..{}",
            seed + SEED_WINDOW
        ),
    }
}

fn seed_of<F: Field>(gm: &GmInstance<F>) -> u64 {
    match gm.lagrangian.provenance {
        crate::lagrangian::Provenance::Seed(s) => s,
        _ => 0,
    }
}

/// Threefold data for a given GM threefold. Without `base`, the point of
/// `Y²_{A,V5}` with the most admissible boundary points is used.
pub fn threefold_data<F: Field>(
    gm: &GmInstance<F>,
    base: Option<&[F::Elem]>,
    chunks: usize,
) -> Result<ThreefoldFixture<F>> {
    if gm.n != 3 {
        bail!(Precondition, "GM variety of dimension {}, expected a threefold", gm.n);
    }
    let f = gm.field();
    let pts = double_points(&gm.lagrangian, chunks)?;
    let (on, off) = split_by(f, &pts.stratum_two, &gm.phi);
    let (on_higher, _) = split_by(f, &pts.higher, &gm.phi);
    if let Some(b) = base {
        if !on.iter().any(|v| v.as_slice() == b) {
            bail!(Precondition, "base point is not a stratum-2 point of P(V5)");
        }
        return match threefold_at(gm, seed_of(gm), &on, &on_higher, &off, b)? {
            Some(fx) => Ok(fx),
            None => bail!(Precondition, "the line of the base point is not nice"),
        };
    }
    let mut best: Option<ThreefoldFixture<F>> = None;
    for b in &on {
        if let Some(fx) = threefold_at(gm, seed_of(gm), &on, &on_higher, &off, b)? {
            if best.as_ref().is_none_or(|x| fx.boundary.len() > x.boundary.len()) {
                best = Some(fx);
            }
        }
    }
    match best {
        Some(b) => Ok(b),
        None => bail!(Precondition, "no stratum-2 point of P(V5) with a nice line"),
    }
}

/// A GM fivefold with a plane `Π0` of the `ρ1` fiber over `[base_point]`.
#[derive(Debug, Clone)]
pub struct FivefoldFixture<F: Field> {
    pub seed: u64,
    pub gm: GmInstance<F>,
    pub base_point: Vec<F::Elem>,
    pub pi0: Subspace<F>,
    /// Points of `Y²_{A,V5}` with a rational plane disjoint from `Π0`, with that plane.
    pub boundary: Vec<(Vec<F::Elem>, Subspace<F>)>,
    pub off_hyperplane: Vec<Vec<F::Elem>>,
}

impl<F: Field> FivefoldFixture<F> {
    /// Number of distinct points among the boundary pairs.
    pub fn boundary_points(&self) -> usize {
        let mut pts: Vec<&Vec<F::Elem>> = self.boundary.iter().map(|(v, _)| v).collect();
        pts.dedup();
        pts.len()
    }
}

fn fivefold_at<F: Field>(
    gm: &GmInstance<F>,
    seed: u64,
    on: &[Vec<F::Elem>],
    off: &[Vec<F::Elem>],
    base: &[F::Elem],
) -> Result<Option<FivefoldFixture<F>>> {
    let c = rho1_fiber_classify(gm, base)?;
    let Some(pi0) = c.planes.first().cloned() else {
        return Ok(None);
    };
    let mut boundary = Vec::new();
    for v in on {
        if v.as_slice() == base {
            continue;
        }
        let cv = rho1_fiber_classify(gm, v)?;
        for p in cv.planes {
            if p.intersect(&pi0)?.dim() == 0 {
                boundary.push((v.clone(), p));
            }
        }
    }
    Ok(Some(FivefoldFixture {
        seed,
        gm: gm.clone(),
        base_point: base.to_vec(),
        pi0,
        boundary,
        off_hyperplane: off.to_vec(),
    }))
}

/// Fivefold data for a given GM fivefold, choosing the base point like
/// [`threefold_data`].
pub fn fivefold_data<F: Field>(
    gm: &GmInstance<F>,
    base: Option<&[F::Elem]>,
    chunks: usize,
) -> Result<FivefoldFixture<F>> {
    if gm.n != 5 {
        bail!(Precondition, "GM variety of dimension {}, expected a fivefold", gm.n);
    }
    let f = gm.field();
    let pts = double_points(&gm.lagrangian, chunks)?;
    let (on, off) = split_by(f, &pts.stratum_two, &gm.phi);
    if let Some(b) = base {
        if !on.iter().any(|v| v.as_slice() == b) {
            bail!(Precondition, "base point is not a stratum-2 point of P(V5)");
        }
        return match fivefold_at(gm, seed_of(gm), &on, &off, b)? {
            Some(fx) => Ok(fx),
            None => bail!(Precondition, "no rational plane over the base point"),
        };
    }
    let mut best: Option<FivefoldFixture<F>> = None;
    for b in &on {
        if let Some(fx) = fivefold_at(gm, seed_of(gm), &on, &off, b)? {
            if best.as_ref().is_none_or(|x| fx.boundary_points() > x.boundary_points()) {
                best = Some(fx);
            }
        }
    }
    match best {
        Some(b) => Ok(b),
        None => bail!(Precondition, "no stratum-2 point of P(V5) with a rational plane"),
    }
}

/// Searches seeds for a GM fivefold (`ℓ = 0`) whose hyperplane passes through
/// many points of `Y²_A`.
pub fn fivefold_fixture<F: QuadraticClosure>(f: &F, seed: u64, opts: &FixtureOptions) -> Result<FivefoldFixture<F>> {
    let mut best: Option<FivefoldFixture<F>> = None;
    for s in seed..seed + SEED_WINDOW {
        let inst = random_instance(s, f);
        if !ndv_ok(&inst, opts)? {
            continue;
        }
        let pts = double_points(&inst, opts.chunks)?;
        if pts.stratum_two.len() < 5 {
            continue;
        }
        let mut rng = ChaCha8Rng::seed_from_u64(s);
        for _ in 0..FIVEFOLD_HYPERPLANES {
            let pick: Vec<Vec<F::Elem>> = pts.stratum_two.choose_multiple(&mut rng, 5).cloned().collect();
            let ker = Matrix::from_rows(f, 6, pick)?.kernel();
            if ker.dim() != 1 {
                continue;
            }
            let phi = ker.basis_vecs().remove(0);
            if crate::epw::dual_stratum_of(&inst, &phi)? != 0 {
                continue;
            }
            let gm = build_gm(&inst, &phi)?;
            let (on, off) = split_by(f, &pts.stratum_two, &phi);
            for base in &on {
                let Some(fx) = fivefold_at(&gm, s, &on, &off, base)? else {
                    continue;
                };
                if best.as_ref().is_none_or(|b| fx.boundary_points() > b.boundary_points()) {
                    best = Some(fx);
                }
                if best.as_ref().is_some_and(|b| b.boundary_points() >= opts.min_boundary) {
                    return Ok(best.expect("set"));
                }
            }
        }
    }
    match best {
        Some(b) => Ok(b),
        None => bail!(
            Precondition,
            "no fivefold with a rational plane for seeds {seed}..{}",
            seed + SEED_WINDOW
        ),
    }
}
