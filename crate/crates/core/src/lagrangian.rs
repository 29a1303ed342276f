//! Lagrangian subspaces of ∧³V6: construction, validation, duality and the
//! search for decomposable vectors.

use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{bail, Error, Result};
use crate::exterior::{basis_masks, complement3, is_decomposable, omega_gram};
use crate::field::{reduce_rational, Field, PrimeField, QuadraticClosure, Rationals};
use crate::linalg::{normalize, Matrix, Subspace};
use crate::projective::{chunk_ranges, point_count, ProjectiveSpace};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NdvStatus {
    VerifiedOverField,
    WitnessFound,
    Unknown,
}

impl fmt::Display for NdvStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            NdvStatus::VerifiedOverField => "verified_over_field",
            NdvStatus::WitnessFound => "witness_found",
            NdvStatus::Unknown => "unknown",
        })
    }
}

impl std::str::FromStr for NdvStatus {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "verified_over_field" => NdvStatus::VerifiedOverField,
            "witness_found" => NdvStatus::WitnessFound,
            "unknown" => NdvStatus::Unknown,
            _ => bail!(Parse, "unknown ndv status '{s}'"),
        })
    }
}

/// Where an instance came from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Provenance {
    Seed(u64),
    Graph,
    Dual(Box<Provenance>),
    Constructed(String),
    File(String),
}

impl fmt::Display for Provenance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Provenance::Seed(s) => write!(f, "seed:{s}"),
            Provenance::Graph => write!(f, "graph"),
            Provenance::Dual(p) => write!(f, "dual:{p}"),
            Provenance::Constructed(s) => write!(f, "constructed:{s}"),
            Provenance::File(s) => write!(f, "file:{s}"),
        }
    }
}

impl Provenance {
    pub fn parse(s: &str) -> Provenance {
        if let Some(r) = s.strip_prefix("seed:") {
            if let Ok(n) = r.parse() {
                return Provenance::Seed(n);
            }
        }
        if s == "graph" {
            return Provenance::Graph;
        }
        if let Some(r) = s.strip_prefix("dual:") {
            return Provenance::Dual(Box::new(Provenance::parse(r)));
        }
        if let Some(r) = s.strip_prefix("constructed:") {
            return Provenance::Constructed(r.to_string());
        }
        Provenance::File(s.strip_prefix("file:").unwrap_or(s).to_string())
    }
}

/// A ten-dimensional subspace of ∧³V6 with its validation flags.
#[derive(Debug, Clone, PartialEq)]
pub struct LagrangianInstance<F: Field> {
    pub field: F,
    pub a: Subspace<F>,
    pub is_lagrangian: bool,
    pub ndv: NdvStatus,
    pub provenance: Provenance,
}

impl<F: Field> LagrangianInstance<F> {
    /// Wraps a subspace, checking its dimension and the Lagrangian condition.
    pub fn from_subspace(a: Subspace<F>, provenance: Provenance) -> Result<Self> {
        let is_lagrangian = validate_lagrangian(&a)?;
        Ok(LagrangianInstance {
            field: a.field().clone(),
            a,
            is_lagrangian,
            ndv: NdvStatus::Unknown,
            provenance,
        })
    }

    pub fn basis_vecs(&self) -> Vec<Vec<F::Elem>> {
        self.a.basis_vecs()
    }
}

/// `L = span{e_0ij}`: the degree-3 basis masks containing index 0.
pub fn chart_l_masks() -> Vec<u8> {
    basis_masks(3).iter().copied().filter(|m| m & 1 != 0).collect()
}

/// The standard Lagrangian `L = e_0 ∧ ∧²⟨e_1..e_5⟩`.
pub fn chart_l<F: Field>(f: &F) -> Subspace<F> {
    let idx: Vec<usize> = (0..20).filter(|&i| basis_masks(3)[i] & 1 != 0).collect();
    Subspace::coordinate(f, 20, &idx)
}

/// The Lagrangian `{x ⊕ T_m x}` over the splitting `L ⊕ L'`, with `L'` spanned by
/// the dual basis of `L` under ω.
pub fn graph_lagrangian<F: Field>(m: &Matrix<F>) -> Result<LagrangianInstance<F>> {
    let f = m.field().clone();
    if m.rows() != 10 || m.cols() != 10 {
        bail!(
            Dimension,
            "graph chart needs a 10x10 matrix, got {}x{}",
            m.rows(),
            m.cols()
        );
    }
    if !m.is_symmetric() {
        bail!(InvalidInput, "graph chart needs a symmetric matrix");
    }
    let l_idx: Vec<usize> = (0..20).filter(|&i| basis_masks(3)[i] & 1 != 0).collect();
    // ω(e_I, s e_{I^c}) = 1 for s the sign of e_I ∧ e_{I^c}
    let dual: Vec<(usize, i8)> = l_idx.iter().map(|&i| complement3(i)).collect();
    let mut rows = Vec::with_capacity(10);
    for a in 0..10 {
        let mut row = vec![f.zero(); 20];
        row[l_idx[a]] = f.one();
        for (c, &(j, s)) in dual.iter().enumerate() {
            let v = m.get(c, a);
            row[j] = if s > 0 { v.clone() } else { f.neg(v) };
        }
        rows.push(row);
    }
    let a = Subspace::from_rows(&f, 20, rows);
    let mut inst = LagrangianInstance::from_subspace(a, Provenance::Graph)?;
    if !inst.is_lagrangian {
        bail!(Integrity, "graph of a symmetric matrix failed the Lagrangian check");
    }
    inst.ndv = NdvStatus::Unknown;
    Ok(inst)
}

/// Restricted Gram matrix of ω on `a`.
pub fn restricted_gram<F: Field>(a: &Subspace<F>) -> Matrix<F> {
    let f = a.field();
    let b = a.basis();
    b.mul(&omega_gram(f))
        .and_then(|x| x.mul(&b.transpose()))
        .expect("20 columns")
}

pub fn validate_lagrangian<F: Field>(a: &Subspace<F>) -> Result<bool> {
    if a.ambient() != 20 || a.dim() != 10 {
        bail!(
            Dimension,
            "expected a 10-dimensional subspace of a 20-dimensional space, got {} in {}",
            a.dim(),
            a.ambient()
        );
    }
    Ok(restricted_gram(a).is_zero())
}

/// Seeded instance: a uniformly random symmetric 10x10 matrix in the graph chart.
pub fn random_instance<F: Field>(seed: u64, f: &F) -> LagrangianInstance<F> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let m = Matrix::random_symmetric(f, 10, &mut rng);
    let mut inst = graph_lagrangian(&m).expect("symmetric by construction");
    inst.provenance = Provenance::Seed(seed);
    inst
}

/// `A^⊥ ⊂ ∧³V6^∨`, in the dual coordinates of the lexicographic basis.
#[derive(Debug, Clone, PartialEq)]
pub struct DualLagrangian<F: Field> {
    pub annihilator: Subspace<F>,
}

pub fn dual<F: Field>(inst: &LagrangianInstance<F>) -> Result<DualLagrangian<F>> {
    if !inst.is_lagrangian {
        bail!(Precondition, "dual of a subspace that is not Lagrangian");
    }
    Ok(DualLagrangian {
        annihilator: inst.a.annihilator(),
    })
}

impl<F: Field> DualLagrangian<F> {
    /// Image under `∧³V6^∨ ≅ ∧³V6`, `ξ = ω(a, ·)`.
    pub fn omega_identified(&self) -> Subspace<F> {
        let f = self.annihilator.field();
        let inv = omega_gram(f).inverse().expect("ω is nondegenerate");
        self.annihilator.image(&inv).expect("20 columns")
    }

    /// The identification recovers `A`, as it must for a Lagrangian.
    pub fn identity_holds(&self, a: &Subspace<F>) -> bool {
        self.omega_identified() == *a
    }

    /// The annihilator as an instance of its own (it is Lagrangian for the same
    /// coordinate form).
    pub fn as_instance(&self, provenance: &Provenance) -> Result<LagrangianInstance<F>> {
        LagrangianInstance::from_subspace(self.annihilator.clone(), Provenance::Dual(Box::new(provenance.clone())))
    }
}

/// What a decomposable-vector scan covered.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ScanRecord {
    /// Extension degrees scanned exhaustively.
    pub exhaustive_degrees: Vec<u32>,
    pub sampled_points: u64,
    pub line_points: u64,
    pub sample_seed: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DecomposableWitness {
    pub extension_degree: u32,
    /// Element of A (coefficients in the lexicographic basis, formatted).
    pub element: Vec<String>,
    /// Its 3-dimensional kernel, basis rows formatted.
    pub factors: Vec<Vec<String>>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SearchOutcome {
    pub witness: Option<DecomposableWitness>,
    pub status: NdvStatus,
    pub record: ScanRecord,
}

#[derive(Debug, Clone, Copy)]
pub struct ScanOptions {
    /// Largest number of projective points scanned exhaustively.
    pub budget: u128,
    pub samples: u64,
    pub sample_seed: u64,
    pub chunks: usize,
}

impl Default for ScanOptions {
    fn default() -> Self {
        ScanOptions {
            budget: 3_000_000,
            samples: 1_000_000,
            sample_seed: 0x5eed,
            chunks: 64,
        }
    }
}

fn combine<F: Field>(f: &F, basis: &[Vec<F::Elem>], x: &[F::Elem], out: &mut [F::Elem]) {
    for o in out.iter_mut() {
        *o = f.zero();
    }
    for (xi, row) in x.iter().zip(basis) {
        if f.is_zero(xi) {
            continue;
        }
        for (o, r) in out.iter_mut().zip(row) {
            *o = f.mul_add(o, xi, r);
        }
    }
}

fn witness_of<F: Field>(f: &F, omega: &[F::Elem], ker: &Subspace<F>, e: u32) -> DecomposableWitness {
    DecomposableWitness {
        extension_degree: e,
        element: omega.iter().map(|x| f.format(x)).collect(),
        factors: ker.basis().to_strings(),
    }
}

/// First decomposable element of `P(A)` in canonical point order.
fn exhaustive_scan<F: Field>(
    f: &F,
    basis: &[Vec<F::Elem>],
    chunks: usize,
) -> Result<Option<(Vec<F::Elem>, Subspace<F>)>> {
    let space = ProjectiveSpace::new(f, basis.len())?;
    let ranges = chunk_ranges(space.count(), chunks);
    let hits: Vec<(u128, Vec<F::Elem>, Subspace<F>)> = ranges
        .par_iter()
        .filter_map(|&(s, e)| {
            let mut omega = vec![f.zero(); 20];
            for i in s..e {
                let x = space.point(i);
                combine(f, basis, &x, &mut omega);
                if let Ok(Some(k)) = is_decomposable(f, &omega) {
                    return Some((i, omega, k));
                }
            }
            None
        })
        .collect();
    Ok(hits.into_iter().min_by_key(|h| h.0).map(|(_, w, k)| (w, k)))
}

/// Seeded sample plus the ten lines through consecutive basis vectors.
fn layered_scan<F: Field>(
    f: &F,
    basis: &[Vec<F::Elem>],
    opts: &ScanOptions,
) -> Result<(Option<(Vec<F::Elem>, Subspace<F>)>, u64, u64)> {
    const BLOCK: u64 = 1 << 15;
    let blocks = opts.samples.div_ceil(BLOCK);
    let hits: Vec<(u64, Vec<F::Elem>, Subspace<F>)> = (0..blocks)
        .into_par_iter()
        .filter_map(|b| {
            let mut rng = ChaCha8Rng::seed_from_u64(opts.sample_seed);
            rng.set_stream(b);
            let mut omega = vec![f.zero(); 20];
            let n = BLOCK.min(opts.samples - b * BLOCK);
            for j in 0..n {
                let x: Vec<F::Elem> = loop {
                    let x: Vec<F::Elem> = (0..basis.len()).map(|_| f.random(&mut rng)).collect();
                    if x.iter().any(|c| !f.is_zero(c)) {
                        break x;
                    }
                };
                combine(f, basis, &x, &mut omega);
                if let Ok(Some(k)) = is_decomposable(f, &omega) {
                    return Some((b * BLOCK + j, omega, k));
                }
            }
            None
        })
        .collect();
    if let Some((_, w, k)) = hits.into_iter().min_by_key(|h| h.0) {
        return Ok((Some((w, k)), opts.samples, 0));
    }
    let q = f.order().expect("finite field");
    let line = ProjectiveSpace::new(f, 2)?;
    let mut line_points = 0;
    let mut omega = vec![f.zero(); 20];
    for i in 0..basis.len() {
        let j = (i + 1) % basis.len();
        let pair = vec![basis[i].clone(), basis[j].clone()];
        for st in line.iter() {
            combine(f, &pair, &st, &mut omega);
            line_points += 1;
            if let Some(k) = is_decomposable(f, &omega)? {
                return Ok((Some((omega, k)), opts.samples, line_points));
            }
        }
    }
    debug_assert_eq!(line_points, 10 * (q + 1));
    Ok((None, opts.samples, line_points))
}

/// Looks for decomposable vectors in `P(A)(F_{q^e})` for `e = 1..=d`.
///
/// Degree 1 is exhaustive within the budget and layered otherwise. Higher
/// degrees are always exhaustive, so they fail when over budget; use
/// [`available_effort`] to pick `d`.
pub fn decomposable_search<F: QuadraticClosure>(
    inst: &LagrangianInstance<F>,
    d: u32,
    opts: &ScanOptions,
) -> Result<SearchOutcome> {
    let f = &inst.field;
    let Some(q) = f.order() else {
        bail!(UnsupportedField, "decomposable search needs a finite field");
    };
    if !(1..=3).contains(&d) {
        bail!(InvalidInput, "effort {d} outside 1..=3");
    }
    let basis = inst.basis_vecs();
    let mut record = ScanRecord::default();
    let mut status = NdvStatus::Unknown;
    for e in 1..=d {
        let size = (q as u128)
            .checked_pow(e)
            .map(|qe| point_count_u128(qe, 10))
            .unwrap_or(u128::MAX);
        if e == 1 {
            if size <= opts.budget {
                if let Some((w, k)) = exhaustive_scan(f, &basis, opts.chunks)? {
                    return Ok(found(f, &w, &k, 1, record));
                }
                record.exhaustive_degrees.push(1);
                status = NdvStatus::VerifiedOverField;
            } else {
                let (hit, sampled, lines) = layered_scan(f, &basis, opts)?;
                record.sampled_points = sampled;
                record.line_points = lines;
                record.sample_seed = Some(opts.sample_seed);
                if let Some((w, k)) = hit {
                    return Ok(found(f, &w, &k, 1, record));
                }
            }
        } else if size > opts.budget {
            return Err(Error::BudgetExceeded {
                what: format!("P(A) over the degree-{e} extension"),
                size,
                limit: opts.budget,
            });
        } else if e == 2 {
            let ext = f.extension();
            let eb: Vec<Vec<_>> = basis.iter().map(|r| r.iter().map(|x| f.embed(x)).collect()).collect();
            if let Some((w, k)) = exhaustive_scan(&ext, &eb, opts.chunks)? {
                return Ok(found(&ext, &w, &k, 2, record));
            }
            record.exhaustive_degrees.push(2);
        } else {
            bail!(UnsupportedField, "cubic extensions are not implemented");
        }
    }
    Ok(SearchOutcome {
        witness: None,
        status,
        record,
    })
}

/// Largest effort whose extension scans fit in the budget (at least 1).
pub fn available_effort(q: u64, budget: u128) -> u32 {
    let mut d = 1;
    while d < 3 && point_count_u128((q as u128).pow(d + 1), 10) <= budget {
        d += 1;
    }
    d
}

fn point_count_u128(q: u128, n: u32) -> u128 {
    let mut acc: u128 = 0;
    let mut pw: u128 = 1;
    for _ in 0..n {
        acc = acc.saturating_add(pw);
        pw = pw.saturating_mul(q);
    }
    acc
}

fn found<F: Field>(f: &F, w: &[F::Elem], k: &Subspace<F>, e: u32, record: ScanRecord) -> SearchOutcome {
    let w = normalize(f, w).expect("nonzero");
    SearchOutcome {
        witness: Some(witness_of(f, &w, k, e)),
        status: NdvStatus::WitnessFound,
        record,
    }
}

/// Runs the search and records the status on the instance.
pub fn certify<F: QuadraticClosure>(
    inst: &mut LagrangianInstance<F>,
    d: u32,
    opts: &ScanOptions,
) -> Result<SearchOutcome> {
    let out = decomposable_search(inst, d, opts)?;
    inst.ndv = out.status;
    Ok(out)
}

/// Reduction of a rational instance modulo `p`.
pub fn reduce_mod(inst: &LagrangianInstance<Rationals>, p: u64) -> Result<LagrangianInstance<PrimeField>> {
    let f = PrimeField::new(p)?;
    let mut rows = Vec::with_capacity(10);
    for r in inst.a.basis_vecs() {
        let mut row = Vec::with_capacity(20);
        for x in &r {
            match reduce_rational(x, &f) {
                Some(v) => row.push(v),
                None => bail!(InvalidInput, "{p} divides a denominator of the basis"),
            }
        }
        rows.push(row);
    }
    let a = Subspace::from_rows(&f, 20, rows);
    if a.dim() != 10 {
        bail!(InvalidInput, "basis drops rank modulo {p}");
    }
    LagrangianInstance::from_subspace(a, inst.provenance.clone())
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RationalNdvReport {
    pub per_prime: Vec<(u64, std::result::Result<NdvStatus, String>)>,
    /// Witnesses were found modulo every working prime.
    pub warning: bool,
}

pub const WORKING_PRIMES: [u64; 3] = [7, 11, 13];

/// NDV evidence for a rational instance through its reductions.
pub fn rational_ndv_check(inst: &LagrangianInstance<Rationals>, opts: &ScanOptions) -> RationalNdvReport {
    let per_prime: Vec<_> = WORKING_PRIMES
        .iter()
        .map(|&p| {
            let r = reduce_mod(inst, p)
                .and_then(|red| decomposable_search(&red, 1, opts))
                .map(|o| o.status)
                .map_err(|e| e.to_string());
            (p, r)
        })
        .collect();
    let warning = per_prime.iter().all(|(_, r)| matches!(r, Ok(NdvStatus::WitnessFound)));
    RationalNdvReport { per_prime, warning }
}

/// Random nonzero vector.
pub fn random_nonzero<F: Field, R: Rng + ?Sized>(f: &F, n: usize, rng: &mut R) -> Vec<F::Elem> {
    loop {
        let v: Vec<F::Elem> = (0..n).map(|_| f.random(rng)).collect();
        if v.iter().any(|x| !f.is_zero(x)) {
            return v;
        }
    }
}

/// Number of points of `P(A)` over the degree-e extension of `F_q`.
pub fn lagrangian_point_count(q: u64, e: u32) -> u128 {
    point_count((q as u128).pow(e) as u64, 10)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exterior::{wedge_map_image, Multivector};
    use crate::field::QuadExt;

    fn f7() -> PrimeField {
        PrimeField::new(7).unwrap()
    }

    #[test]
    fn zero_matrix_gives_l() {
        let f = f7();
        let inst = graph_lagrangian(&Matrix::zeros(&f, 10, 10)).unwrap();
        assert_eq!(inst.a, chart_l(&f));
        assert_eq!(inst.a, wedge_map_image(&f, &[1, 0, 0, 0, 0, 0]).unwrap());
    }

    #[test]
    fn identity_graph_is_lagrangian() {
        let f = f7();
        let inst = graph_lagrangian(&Matrix::identity(&f, 10)).unwrap();
        assert!(inst.is_lagrangian);
        assert!(graph_lagrangian(&Matrix::from_i64(&f, &[&[0, 1], &[0, 0]])).is_err());
        let mut m = Matrix::zeros(&f, 10, 10);
        m.set(0, 1, 1);
        assert!(graph_lagrangian(&m).is_err());
    }

    #[test]
    fn graph_chart_is_injective_on_samples() {
        let f = f7();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let mut seen = Vec::new();
        for _ in 0..30 {
            let m = Matrix::random_symmetric(&f, 10, &mut rng);
            let inst = graph_lagrangian(&m).unwrap();
            assert!(inst.is_lagrangian);
            for (m2, a2) in &seen {
                if *m2 != m {
                    assert_ne!(*a2, inst.a);
                }
            }
            seen.push((m, inst.a));
        }
    }

    #[test]
    fn generic_subspace_is_not_lagrangian() {
        let f = f7();
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let a = Subspace::from_matrix(&Matrix::random(&f, 10, 20, &mut rng));
        assert!(!validate_lagrangian(&a).unwrap());
        let l = chart_l(&f);
        let mut rows = l.basis_vecs();
        let mut swapped = vec![0; 20];
        swapped[19] = 1; // e345 pairs with e012 ∈ L
        rows[9] = swapped;
        assert!(!validate_lagrangian(&Subspace::from_rows(&f, 20, rows)).unwrap());
        assert!(validate_lagrangian(&Subspace::full(&f, 20)).is_err());
    }

    #[test]
    fn dual_identity() {
        let f = f7();
        let l = graph_lagrangian(&Matrix::zeros(&f, 10, 10)).unwrap();
        let d = dual(&l).unwrap();
        assert_eq!(d.annihilator.dim(), 10);
        // the annihilator of L is spanned by the dual coordinates of indices outside L
        let outside: Vec<usize> = (0..20).filter(|&i| basis_masks(3)[i] & 1 == 0).collect();
        assert_eq!(d.annihilator, Subspace::coordinate(&f, 20, &outside));
        assert!(d.identity_holds(&l.a));
        for seed in 0..20 {
            let inst = random_instance(seed, &f);
            let d = dual(&inst).unwrap();
            assert!(d.identity_holds(&inst.a));
            assert!(d.as_instance(&inst.provenance).unwrap().is_lagrangian);
        }
    }

    #[test]
    fn seeds_are_deterministic_and_distinct() {
        let f = f7();
        assert_eq!(random_instance(3, &f), random_instance(3, &f));
        let mut bases: Vec<Subspace<PrimeField>> = (0..100).map(|s| random_instance(s, &f).a).collect();
        let n = bases.len();
        bases.dedup();
        let distinct: std::collections::HashSet<String> = bases.iter().map(|b| format!("{b:?}")).collect();
        assert_eq!(distinct.len(), n);
    }

    #[test]
    fn l_contains_decomposables() {
        let f = PrimeField::new(3).unwrap();
        let l = graph_lagrangian(&Matrix::zeros(&f, 10, 10)).unwrap();
        let out = decomposable_search(&l, 1, &ScanOptions::default()).unwrap();
        assert_eq!(out.status, NdvStatus::WitnessFound);
        let w = out.witness.unwrap();
        let elem: Vec<u64> = w.element.iter().map(|s| f.parse(s).unwrap()).collect();
        assert!(l.a.contains(&elem));
        assert!(is_decomposable(&f, &elem).unwrap().is_some());
        // the first point of P(L) in canonical order is e_045
        let e045 = Multivector::basis(&f, &[0, 4, 5]).unwrap().into_coeffs();
        assert_eq!(elem, e045);
    }

    #[test]
    fn exhaustive_over_f3() {
        let f = PrimeField::new(3).unwrap();
        assert_eq!(lagrangian_point_count(3, 1), 29524);
        let mut verified = 0;
        for seed in 0..6 {
            let mut inst = random_instance(seed, &f);
            let out = certify(&mut inst, 1, &ScanOptions::default()).unwrap();
            match out.status {
                NdvStatus::VerifiedOverField => {
                    assert_eq!(out.record.exhaustive_degrees, vec![1]);
                    verified += 1;
                }
                NdvStatus::WitnessFound => {
                    let w = out.witness.unwrap();
                    let elem: Vec<u64> = w.element.iter().map(|s| f.parse(s).unwrap()).collect();
                    assert!(inst.a.contains(&elem));
                }
                NdvStatus::Unknown => panic!("exhaustive scan left status unknown"),
            }
            assert_eq!(inst.ndv, out.status);
        }
        assert!(verified > 0);
    }

    #[test]
    fn layered_scan_when_over_budget() {
        let f = f7();
        let inst = random_instance(1, &f);
        let opts = ScanOptions {
            budget: 1000,
            samples: 20_000,
            ..ScanOptions::default()
        };
        let out = decomposable_search(&inst, 1, &opts).unwrap();
        assert_eq!(out.record.sampled_points, 20_000);
        if out.witness.is_none() {
            assert_eq!(out.record.line_points, 80);
            assert_eq!(out.status, NdvStatus::Unknown);
        }
        let again = decomposable_search(&inst, 1, &opts).unwrap();
        assert_eq!(out, again);
    }

    #[test]
    fn extension_degree_over_budget_is_reported() {
        let f = PrimeField::new(3).unwrap();
        let inst = (0..)
            .map(|s| random_instance(s, &f))
            .find(|i| {
                decomposable_search(i, 1, &ScanOptions::default())
                    .unwrap()
                    .witness
                    .is_none()
            })
            .unwrap();
        let err = decomposable_search(&inst, 2, &ScanOptions::default()).unwrap_err();
        match err {
            Error::BudgetExceeded { size, .. } => assert_eq!(size, lagrangian_point_count(3, 2)),
            other => panic!("unexpected {other:?}"),
        }
        assert_eq!(available_effort(3, 3_000_000), 1);
        assert_eq!(available_effort(3, 500_000_000), 2);
    }

    #[test]
    fn extension_scan_finds_decomposables_of_l() {
        // tiny budget check on the extension path: L over F_3 has witnesses over F_9 too
        let f = PrimeField::new(3).unwrap();
        let l = graph_lagrangian(&Matrix::zeros(&f, 10, 10)).unwrap();
        let e = QuadExt::new(3).unwrap();
        let eb: Vec<Vec<_>> = l
            .basis_vecs()
            .iter()
            .map(|r| r.iter().map(|x| f.embed(x)).collect())
            .collect();
        let hit = exhaustive_scan(&e, &eb[8..], 4).unwrap();
        assert!(hit.is_some());
    }

    #[test]
    fn rational_instance_reduces() {
        let q = Rationals;
        let inst = random_instance(4, &q);
        assert!(inst.is_lagrangian);
        let red = reduce_mod(&inst, 11).unwrap();
        assert!(red.is_lagrangian);
        let rep = rational_ndv_check(
            &inst,
            &ScanOptions {
                budget: 0,
                samples: 2000,
                ..ScanOptions::default()
            },
        );
        assert_eq!(rep.per_prime.len(), 3);
        let l = graph_lagrangian(&Matrix::zeros(&q, 10, 10)).unwrap();
        let rep = rational_ndv_check(
            &l,
            &ScanOptions {
                budget: 0,
                samples: 100,
                ..ScanOptions::default()
            },
        );
        assert!(rep.warning);
    }
}
