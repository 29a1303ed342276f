//! EPW stratifications of P(V6) and P(V6^∨), hyperplane slices, and the sextic
//! restricted to a line.

use std::collections::BTreeMap;

use rand::Rng;
use rayon::prelude::*;

use crate::error::{bail, Result};
use crate::exterior::{basis_masks, complement3, mask_index, wedge3_of_hyperplane, wedge_map_image, wedge_sign};
use crate::field::{Field, FieldSpec};
use crate::lagrangian::{dual, random_nonzero, LagrangianInstance};
use crate::linalg::{normalize, Matrix, Subspace};
use crate::poly::Poly;
use crate::projective::{chunk_ranges, ProjectiveSpace};

/// The six 10x15 matrices `T_m[i][j] = ω(a_i, e_m ∧ f_j)`, so that the pairing
/// matrix of `A` against `F_v` is `Σ v_m T_m`.
#[derive(Debug, Clone)]
pub struct PairingTensor<F: Field> {
    field: F,
    t: Vec<Vec<Vec<F::Elem>>>,
}

impl<F: Field> PairingTensor<F> {
    pub fn new(a: &Subspace<F>) -> Self {
        let f = a.field().clone();
        let rows = a.basis_vecs();
        let omega = crate::exterior::omega_gram(&f);
        let mut t = vec![vec![vec![f.zero(); 15]; rows.len()]; 6];
        for (m, tm) in t.iter_mut().enumerate() {
            for (j, &fj) in basis_masks(2).iter().enumerate() {
                let Some(s1) = wedge_sign(1 << m, fj) else {
                    continue;
                };
                let idx = mask_index(fj | (1 << m));
                // ω(a, e_J) = s2 * a[J^c] with s2 the sign of e_{J^c} ∧ e_J
                let (c, _) = complement3(idx);
                let s2 = omega.get(c, idx).clone();
                for (i, row) in rows.iter().enumerate() {
                    let mut val = f.mul(&row[c], &s2);
                    if s1 < 0 {
                        val = f.neg(&val);
                    }
                    tm[i][j] = val;
                }
            }
        }
        PairingTensor { field: f, t }
    }

    pub fn pairing_matrix(&self, v: &[F::Elem]) -> Matrix<F> {
        let f = &self.field;
        let n = self.t[0].len();
        let mut data = vec![f.zero(); n * 15];
        for (m, vm) in v.iter().enumerate() {
            if f.is_zero(vm) {
                continue;
            }
            for i in 0..n {
                for j in 0..15 {
                    let d = &mut data[i * 15 + j];
                    *d = f.mul_add(d, vm, &self.t[m][i][j]);
                }
            }
        }
        Matrix::from_vec(f, n, 15, data).expect("shape")
    }

    /// `dim(A ∩ F_v) = 10 - rank` of the pairing matrix.
    pub fn stratum(&self, v: &[F::Elem]) -> usize {
        let mut m = self.pairing_matrix(v);
        10 - m.rref_in_place().len()
    }
}

fn check_point<F: Field>(f: &F, v: &[F::Elem]) -> Result<()> {
    if v.len() != 6 {
        bail!(Dimension, "point with {} coordinates", v.len());
    }
    if v.iter().all(|x| f.is_zero(x)) {
        bail!(InvalidInput, "zero vector is not a point");
    }
    Ok(())
}

/// `dim(A ∩ F_v)` by subspace intersection.
pub fn stratum_by_intersection<F: Field>(a: &Subspace<F>, v: &[F::Elem]) -> Result<usize> {
    let fv = wedge_map_image(a.field(), v)?;
    Ok(a.intersect(&fv)?.dim())
}

/// `k = dim(A ∩ (v ∧ ∧²V6))`, computed by intersection and by the pairing rank;
/// a disagreement is an integrity error.
pub fn stratum_of<F: Field>(inst: &LagrangianInstance<F>, v: &[F::Elem]) -> Result<usize> {
    check_point(&inst.field, v)?;
    let k1 = stratum_by_intersection(&inst.a, v)?;
    let k2 = PairingTensor::new(&inst.a).stratum(v);
    if k1 != k2 {
        bail!(Integrity, "stratum paths disagree: intersection {k1}, pairing {k2}");
    }
    Ok(k1)
}

/// `dim(A ∩ ∧³ker(phi))`.
pub fn dual_stratum_of<F: Field>(inst: &LagrangianInstance<F>, phi: &[F::Elem]) -> Result<usize> {
    check_point(&inst.field, phi)?;
    Ok(inst.a.intersect(&wedge3_of_hyperplane(&inst.field, phi)?)?.dim())
}

#[derive(Debug, Clone, PartialEq)]
pub struct StratifyOptions {
    /// Witnesses kept per stratum.
    pub witness_cap: usize,
    /// Strata at or above this index keep every witness.
    pub keep_all_from: Option<usize>,
    pub chunks: usize,
}

impl Default for StratifyOptions {
    fn default() -> Self {
        StratifyOptions {
            witness_cap: 32,
            keep_all_from: None,
            chunks: 256,
        }
    }
}

impl StratifyOptions {
    fn cap(&self, k: usize) -> usize {
        match self.keep_all_from {
            Some(t) if k >= t => usize::MAX,
            _ => self.witness_cap,
        }
    }
}

/// Counts and witnesses per stratum index over a finite field.
#[derive(Debug, Clone, PartialEq)]
pub struct StratificationReport<F: Field> {
    pub field: FieldSpec,
    pub instance: String,
    /// Strata of `P(V6^∨)` rather than `P(V6)`.
    pub dual: bool,
    /// Restricted to `P(V5)` for the given hyperplane.
    pub hyperplane: Option<Vec<F::Elem>>,
    pub counts: BTreeMap<usize, u64>,
    pub witnesses: BTreeMap<usize, Vec<Vec<F::Elem>>>,
    pub total: u128,
    pub exhaustive: bool,
}

impl<F: Field> StratificationReport<F> {
    pub fn count(&self, k: usize) -> u64 {
        self.counts.get(&k).copied().unwrap_or(0)
    }

    pub fn count_at_least(&self, k: usize) -> u64 {
        self.counts.range(k..).map(|(_, c)| c).sum()
    }

    pub fn points(&self, k: usize) -> &[Vec<F::Elem>] {
        self.witnesses.get(&k).map_or(&[], |v| v.as_slice())
    }
}

struct Partial<E> {
    counts: [u64; 11],
    witnesses: Vec<Vec<Vec<E>>>,
}

/// Scans every point of a projective space, `points(i)` giving the i-th point in
/// `V6` coordinates, with the fast pairing path and an intersection replay on
/// every point of positive stratum.
fn scan<F: Field>(
    f: &F,
    tensor: &PairingTensor<F>,
    count: u128,
    point: impl Fn(u128) -> Vec<F::Elem> + Sync,
    replay: impl Fn(&[F::Elem]) -> Result<usize> + Sync,
    opts: &StratifyOptions,
) -> Result<(BTreeMap<usize, u64>, BTreeMap<usize, Vec<Vec<F::Elem>>>)> {
    let ranges = chunk_ranges(count, opts.chunks);
    let partials: Vec<Result<Partial<F::Elem>>> = ranges
        .par_iter()
        .map(|&(s, e)| {
            let mut p = Partial {
                counts: [0; 11],
                witnesses: vec![Vec::new(); 11],
            };
            for i in s..e {
                let v = point(i);
                let k = tensor.stratum(&v);
                if k > 0 {
                    let k2 = replay(&v)?;
                    if k2 != k {
                        bail!(
                            Integrity,
                            "stratum paths disagree at {:?}: pairing {k}, intersection {k2}",
                            v.iter().map(|x| f.format(x)).collect::<Vec<_>>()
                        );
                    }
                }
                p.counts[k] += 1;
                if p.witnesses[k].len() < opts.cap(k) {
                    p.witnesses[k].push(v);
                }
            }
            Ok(p)
        })
        .collect();
    let mut counts = BTreeMap::new();
    let mut witnesses: BTreeMap<usize, Vec<Vec<F::Elem>>> = BTreeMap::new();
    for p in partials {
        let p = p?;
        for k in 0..11 {
            if p.counts[k] == 0 {
                continue;
            }
            *counts.entry(k).or_insert(0) += p.counts[k];
            let w = witnesses.entry(k).or_default();
            let room = opts.cap(k).saturating_sub(w.len());
            w.extend(p.witnesses[k].iter().take(room).cloned());
        }
    }
    Ok((counts, witnesses))
}

/// Exhaustive stratification of `P(V6)(F_q)`.
pub fn stratify<F: Field>(inst: &LagrangianInstance<F>, opts: &StratifyOptions) -> Result<StratificationReport<F>> {
    let f = &inst.field;
    let space = ProjectiveSpace::new(f, 6)?;
    let tensor = PairingTensor::new(&inst.a);
    let (counts, witnesses) = scan(
        f,
        &tensor,
        space.count(),
        |i| space.point(i),
        |v| stratum_by_intersection(&inst.a, v),
        opts,
    )?;
    Ok(StratificationReport {
        field: f.spec(),
        instance: inst.provenance.to_string(),
        dual: false,
        hyperplane: None,
        counts,
        witnesses,
        total: space.count(),
        exhaustive: true,
    })
}

/// Exhaustive stratification of `P(V6^∨)(F_q)` by `dim(A ∩ ∧³V5)`.
///
/// The fast path is the primal pairing rank for the annihilator of `A`, using
/// `dim(A^⊥ ∩ (phi ∧ ∧²V6^∨)) = dim(A ∩ ∧³ker phi)`; positive strata are replayed
/// by direct intersection.
pub fn dual_stratify<F: Field>(
    inst: &LagrangianInstance<F>,
    opts: &StratifyOptions,
) -> Result<StratificationReport<F>> {
    let f = &inst.field;
    let d = dual(inst)?;
    let space = ProjectiveSpace::new(f, 6)?;
    let tensor = PairingTensor::new(&d.annihilator);
    let (counts, witnesses) = scan(
        f,
        &tensor,
        space.count(),
        |i| space.point(i),
        |phi| dual_stratum_of(inst, phi),
        opts,
    )?;
    Ok(StratificationReport {
        field: f.spec(),
        instance: inst.provenance.to_string(),
        dual: true,
        hyperplane: None,
        counts,
        witnesses,
        total: space.count(),
        exhaustive: true,
    })
}

/// Basis of `ker(phi)` as RREF rows.
pub fn hyperplane_basis<F: Field>(f: &F, phi: &[F::Elem]) -> Result<Subspace<F>> {
    check_point(f, phi)?;
    Ok(Matrix::from_rows(f, 6, vec![phi.to_vec()])?.kernel())
}

/// Stratification of `P(V5)(F_q)` with `V5 = ker(phi)`; points are reported in
/// `V6` coordinates.
pub fn hyperplane_slice<F: Field>(
    inst: &LagrangianInstance<F>,
    phi: &[F::Elem],
    opts: &StratifyOptions,
) -> Result<StratificationReport<F>> {
    let f = &inst.field;
    let v5 = hyperplane_basis(f, phi)?;
    let space = ProjectiveSpace::new(f, 5)?;
    let tensor = PairingTensor::new(&inst.a);
    let (counts, witnesses) = scan(
        f,
        &tensor,
        space.count(),
        |i| {
            let x = space.point(i);
            normalize(f, &v5.basis().vec_mul(&x)).expect("nonzero")
        },
        |v| stratum_by_intersection(&inst.a, v),
        opts,
    )?;
    Ok(StratificationReport {
        field: f.spec(),
        instance: inst.provenance.to_string(),
        dual: false,
        hyperplane: Some(phi.to_vec()),
        counts,
        witnesses,
        total: space.count(),
        exhaustive: true,
    })
}

/// The sextic equation restricted to the line `v(t) = v0 + t v1`.
#[derive(Debug, Clone, PartialEq)]
pub struct SexticOnLine<F: Field> {
    pub v0: Vec<F::Elem>,
    pub v1: Vec<F::Elem>,
    /// Coordinate whose complement indexes the bivector columns.
    pub chart: usize,
    /// `det M(t)` before removing the chart factor.
    pub determinant: Poly<F>,
    pub sextic: Poly<F>,
}

impl<F: Field> SexticOnLine<F> {
    pub fn point(&self, f: &F, t: &F::Elem) -> Vec<F::Elem> {
        self.v0.iter().zip(&self.v1).map(|(a, b)| f.mul_add(a, t, b)).collect()
    }
}

/// Builds `M(t)_{ij} = ω(a_i, v(t) ∧ η_j)` with `η_j` the bivectors avoiding the
/// chart index, interpolates `det M(t)` from 11 values and divides out the
/// fourth power of the chart coordinate.
pub fn sextic_on_line<F: Field>(
    inst: &LagrangianInstance<F>,
    v0: &[F::Elem],
    v1: &[F::Elem],
) -> Result<SexticOnLine<F>> {
    let f = &inst.field;
    check_point(f, v0)?;
    check_point(f, v1)?;
    if Matrix::from_rows(f, 6, vec![v0.to_vec(), v1.to_vec()])?.rank() < 2 {
        bail!(InvalidInput, "line needs two independent points");
    }
    if let Some(q) = f.order() {
        if q < 11 {
            bail!(
                UnsupportedField,
                "{} has fewer than 11 elements; use an extension",
                f.spec()
            );
        }
    }
    let chart = (0..6)
        .find(|&c| !f.is_zero(&v0[c]) || !f.is_zero(&v1[c]))
        .expect("nonzero point");
    let etas: Vec<usize> = basis_masks(2)
        .iter()
        .enumerate()
        .filter(|(_, &m)| m & (1 << chart) == 0)
        .map(|(j, _)| j)
        .collect();
    let tensor = PairingTensor::new(&inst.a);
    let nodes: Vec<F::Elem> = (0..11).map(|i| f.element(i)).collect();
    let mut values = Vec::with_capacity(11);
    let line = SexticOnLine {
        v0: v0.to_vec(),
        v1: v1.to_vec(),
        chart,
        determinant: Poly::zero(f),
        sextic: Poly::zero(f),
    };
    let rows: Vec<usize> = (0..10).collect();
    for t in &nodes {
        let p = tensor.pairing_matrix(&line.point(f, t));
        values.push(p.submatrix(&rows, &etas).det()?);
    }
    let det = Poly::interpolate(f, &nodes, &values)?;
    let ell = Poly::linear(f, v0[chart].clone(), v1[chart].clone());
    let (sextic, rem) = det.divrem(&ell.pow(4))?;
    if !rem.is_zero() {
        bail!(
            Integrity,
            "chart factor does not divide the determinant (chart {chart})"
        );
    }
    if sextic.degree().is_some_and(|d| d > 6) {
        bail!(Integrity, "quotient of degree {:?} exceeds 6", sextic.degree());
    }
    Ok(SexticOnLine {
        determinant: det,
        sextic,
        ..line
    })
}

/// Random line whose second point lies off `Y_A`, obtained by moving `v1` along
/// the line if needed.
pub fn random_line<F: Field, R: Rng + ?Sized>(
    inst: &LagrangianInstance<F>,
    rng: &mut R,
) -> Result<(Vec<F::Elem>, Vec<F::Elem>)> {
    let f = &inst.field;
    let tensor = PairingTensor::new(&inst.a);
    for _ in 0..1000 {
        let v0 = random_nonzero(f, 6, rng);
        let v1 = random_nonzero(f, 6, rng);
        if Matrix::from_rows(f, 6, vec![v0.clone(), v1.clone()])?.rank() < 2 {
            continue;
        }
        for i in 0..f.order().unwrap_or(64).min(64) {
            let c = f.element(i);
            let w: Vec<F::Elem> = v1.iter().zip(&v0).map(|(b, a)| f.mul_add(b, &c, a)).collect();
            if tensor.stratum(&w) == 0 {
                return Ok((v0, w));
            }
        }
    }
    bail!(Precondition, "no line with a point off Y_A found")
}

/// Compares the roots of the sextic with the strata of the affine points of the
/// line; returns the number of affine points checked.
pub fn check_roots_against_strata<F: Field>(inst: &LagrangianInstance<F>, s: &SexticOnLine<F>) -> Result<u64> {
    let f = &inst.field;
    let Some(q) = f.order() else {
        bail!(UnsupportedField, "pointwise root check needs a finite field");
    };
    let roots: BTreeMap<u64, usize> = s
        .sextic
        .roots()?
        .into_iter()
        .map(|(r, m)| (f.index_of(&r).expect("finite"), m))
        .collect();
    for i in 0..q {
        let t = f.element(i);
        let k = stratum_of(inst, &s.point(f, &t))?;
        let m = roots.get(&i).copied().unwrap_or(0);
        if (k > 0) != (m > 0) {
            bail!(
                Integrity,
                "at t = {} stratum {k} but root multiplicity {m}",
                f.format(&t)
            );
        }
        if m < k {
            bail!(
                Integrity,
                "at t = {} root multiplicity {m} below stratum {k}",
                f.format(&t)
            );
        }
    }
    let inf = stratum_of(inst, &s.v1)?;
    if (inf > 0) != (s.sextic.degree() != Some(6)) {
        bail!(
            Integrity,
            "degree {:?} inconsistent with stratum {inf} at infinity",
            s.sextic.degree()
        );
    }
    Ok(q)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::PrimeField;
    use crate::lagrangian::{graph_lagrangian, random_instance};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn e(i: usize) -> Vec<u64> {
        let mut v = vec![0; 6];
        v[i] = 1;
        v
    }

    #[test]
    fn strata_of_l() {
        let f = PrimeField::new(7).unwrap();
        let l = graph_lagrangian(&Matrix::zeros(&f, 10, 10)).unwrap();
        assert_eq!(stratum_of(&l, &e(0)).unwrap(), 10);
        assert_eq!(stratum_of(&l, &e(1)).unwrap(), 4);
        assert_eq!(dual_stratum_of(&l, &e(0)).unwrap(), 0);
        let cube = crate::lagrangian::LagrangianInstance::from_subspace(
            wedge3_of_hyperplane(&f, &e(0)).unwrap(),
            crate::lagrangian::Provenance::Constructed("cube".into()),
        )
        .unwrap();
        assert_eq!(dual_stratum_of(&cube, &e(0)).unwrap(), 10);
    }

    #[test]
    fn random_points_agree_and_scale() {
        let f = PrimeField::new(7).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for seed in 0..5 {
            let inst = random_instance(seed, &f);
            for _ in 0..40 {
                let v = random_nonzero(&f, 6, &mut rng);
                let k = stratum_of(&inst, &v).unwrap();
                assert!(k <= 3);
                let w: Vec<u64> = v.iter().map(|x| f.mul(x, &3)).collect();
                assert_eq!(stratum_of(&inst, &w).unwrap(), k);
            }
        }
    }

    #[test]
    fn stratify_f3() {
        let f = PrimeField::new(3).unwrap();
        let inst = random_instance(0, &f);
        let r = stratify(&inst, &StratifyOptions::default()).unwrap();
        assert_eq!(r.counts.values().sum::<u64>(), 364);
        let l = graph_lagrangian(&Matrix::zeros(&f, 10, 10)).unwrap();
        let r = stratify(&l, &StratifyOptions::default()).unwrap();
        assert_eq!(r.count(10), 1);
        assert_eq!(r.points(10), &[e(0)]);
        assert!(r.count_at_least(4) > 0);
    }

    #[test]
    fn dual_strata_match_annihilator_strata() {
        let f = PrimeField::new(7).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for seed in 0..4 {
            let inst = random_instance(seed, &f);
            let d = dual(&inst).unwrap().as_instance(&inst.provenance).unwrap();
            for _ in 0..25 {
                let phi = random_nonzero(&f, 6, &mut rng);
                assert_eq!(dual_stratum_of(&inst, &phi).unwrap(), stratum_of(&d, &phi).unwrap());
            }
        }
        let inst = random_instance(9, &PrimeField::new(3).unwrap());
        let r = dual_stratify(&inst, &StratifyOptions::default()).unwrap();
        assert_eq!(r.total, 364);
        assert!(r.dual);
    }

    #[test]
    fn witness_order_independent_of_chunking() {
        let f = PrimeField::new(3).unwrap();
        let inst = random_instance(2, &f);
        let a = stratify(
            &inst,
            &StratifyOptions {
                chunks: 1,
                ..Default::default()
            },
        )
        .unwrap();
        let b = stratify(
            &inst,
            &StratifyOptions {
                chunks: 97,
                witness_cap: 32,
                keep_all_from: None,
            },
        )
        .unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn slice_counts() {
        let f = PrimeField::new(3).unwrap();
        let inst = random_instance(1, &f);
        let phi = vec![0, 0, 0, 0, 0, 1];
        let r = hyperplane_slice(&inst, &phi, &StratifyOptions::default()).unwrap();
        assert_eq!(r.counts.values().sum::<u64>(), 121);
        for (k, pts) in &r.witnesses {
            for p in pts {
                assert_eq!(p[5], 0);
                assert_eq!(stratum_of(&inst, p).unwrap(), *k);
            }
        }
    }

    #[test]
    fn sextic_roots_match_strata() {
        let f = PrimeField::new(13).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for seed in 0..3 {
            let inst = random_instance(seed, &f);
            for _ in 0..3 {
                let (v0, v1) = random_line(&inst, &mut rng).unwrap();
                let s = sextic_on_line(&inst, &v0, &v1).unwrap();
                assert_eq!(s.sextic.degree(), Some(6));
                check_roots_against_strata(&inst, &s).unwrap();
            }
        }
        assert!(sextic_on_line(&random_instance(0, &PrimeField::new(7).unwrap()), &e(0), &e(1)).is_err());
    }

    #[test]
    fn reparameterized_line_gives_proportional_sextic() {
        let f = PrimeField::new(11).unwrap();
        let inst = random_instance(6, &f);
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let (v0, v1) = random_line(&inst, &mut rng).unwrap();
        let s = sextic_on_line(&inst, &v0, &v1).unwrap();
        // v0 + 2 v1 + t (3 v1) is v(2 + 3t)
        let w0: Vec<u64> = v0.iter().zip(&v1).map(|(a, b)| f.mul_add(a, &2, b)).collect();
        let w1: Vec<u64> = v1.iter().map(|b| f.mul(b, &3)).collect();
        let s2 = sextic_on_line(&inst, &w0, &w1).unwrap();
        let vals: Vec<(u64, u64)> = (0..11)
            .map(|t| (s2.sextic.eval(&t), s.sextic.eval(&f.add(&2, &f.mul(&3, &t)))))
            .collect();
        let (a, b) = vals.iter().find(|(x, _)| *x != 0).copied().unwrap();
        let ratio = f.mul(&a, &f.inv(&b).unwrap());
        for (x, y) in vals {
            assert_eq!(x, f.mul(&ratio, &y));
        }
    }
}
