//! Randomized property checks over small prime fields, replayable from a seed.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::epw::{dual_stratify, random_line, sextic_on_line, stratum_by_intersection, stratum_of, StratifyOptions};
use crate::error::Result;
use crate::exterior::{is_decomposable, wedge3_of_hyperplane, wedge_map_image, wedge_vectors};
use crate::fibers::{rho1_fiber_classify, two_spaces_through};
use crate::field::{Field, PrimeField, QuadraticClosure};
use crate::gm::{build_gm, plucker_quadric, quadric_at, sample_points, wedge3_matrix, GmInstance};
use crate::lagrangian::{
    chart_l, decomposable_search, dual, graph_lagrangian, random_instance, random_nonzero, validate_lagrangian,
    LagrangianInstance, NdvStatus, Provenance, ScanOptions,
};
use crate::linalg::{Matrix, QuadraticForm, Subspace};
use crate::poly::Poly;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PropertyResult {
    pub name: &'static str,
    pub prime: u64,
    pub cases: u64,
    pub passed: bool,
    pub detail: String,
}

type Check = std::result::Result<(), String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Check {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn invertible<R: Rng>(f: &PrimeField, n: usize, rng: &mut R) -> Matrix<PrimeField> {
    loop {
        let m = Matrix::random(f, n, n, rng);
        if m.rank() == n {
            return m;
        }
    }
}

fn random_space<R: Rng>(f: &PrimeField, n: usize, rng: &mut R) -> Subspace<PrimeField> {
    let k = rng.gen_range(0..=n);
    Subspace::from_matrix(&Matrix::random(f, k, n, rng))
}

struct Shared {
    inst: LagrangianInstance<PrimeField>,
    gm: GmInstance<PrimeField>,
    threefold: Option<GmInstance<PrimeField>>,
}

fn shared(f: &PrimeField, seed: u64) -> Result<Shared> {
    let inst = random_instance(seed, f);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let phi = random_nonzero(f, 6, &mut rng);
    let gm = build_gm(&inst, &phi)?;
    let mut threefold = None;
    if f.modulus() <= 5 {
        for s in seed..seed + 8 {
            let i = random_instance(s, f);
            let rep = dual_stratify(&i, &StratifyOptions::default())?;
            if let Some(phi) = rep.points(2).first() {
                threefold = Some(build_gm(&i, phi)?);
                break;
            }
        }
    }
    Ok(Shared { inst, gm, threefold })
}

fn off_v5<R: Rng>(gm: &GmInstance<PrimeField>, rng: &mut R) -> Vec<u64> {
    let f = gm.field();
    loop {
        let v = random_nonzero(f, 6, rng);
        if !f.is_zero(&gm.split(&v).0) {
            return v;
        }
    }
}

fn rref_idempotent(f: &PrimeField, _: &Shared, rng: &mut ChaCha8Rng) -> Result<Check> {
    let (r, c) = (rng.gen_range(1..8), rng.gen_range(1..8));
    let m = Matrix::random(f, r, c, rng);
    let (once, _) = m.rref();
    let (twice, _) = once.rref();
    Ok(ensure(once == twice, || format!("{r}x{c} matrix")))
}

fn rank_nullity(f: &PrimeField, _: &Shared, rng: &mut ChaCha8Rng) -> Result<Check> {
    let (r, c) = (rng.gen_range(1..9), rng.gen_range(1..9));
    let m = Matrix::random(f, r, c, rng);
    Ok(ensure(m.rank() + m.kernel().dim() == c, || format!("{r}x{c} matrix")))
}

fn modular_law(f: &PrimeField, _: &Shared, rng: &mut ChaCha8Rng) -> Result<Check> {
    let n = rng.gen_range(1..9);
    let u = random_space(f, n, rng);
    let w = random_space(f, n, rng);
    let lhs = u.sum(&w)?.dim() + u.intersect(&w)?.dim();
    Ok(ensure(lhs == u.dim() + w.dim(), || {
        format!("dims {} and {} in {n}", u.dim(), w.dim())
    }))
}

fn congruence_corank(f: &PrimeField, _: &Shared, rng: &mut ChaCha8Rng) -> Result<Check> {
    let n = rng.gen_range(1..9);
    let k = rng.gen_range(0..=n);
    // a symmetric matrix of rank at most k
    let b = Matrix::random(f, k, n, rng);
    let d = Matrix::random_symmetric(f, k, rng);
    let g = b.transpose().mul(&d)?.mul(&b)?;
    let p = invertible(f, n, rng);
    let h = p.mul(&g)?.mul(&p.transpose())?;
    let (q, r) = (QuadraticForm::new(g)?, QuadraticForm::new(h)?);
    Ok(ensure(q.corank() == r.corank(), || {
        format!("coranks {} and {}", q.corank(), r.corank())
    }))
}

fn fv_lagrangian(f: &PrimeField, _: &Shared, rng: &mut ChaCha8Rng) -> Result<Check> {
    let v = random_nonzero(f, 6, rng);
    let fv = wedge_map_image(f, &v)?;
    let hyper = wedge3_of_hyperplane(f, &v)?;
    Ok(ensure(
        fv.dim() == 10 && validate_lagrangian(&fv)? && hyper.dim() == 10 && validate_lagrangian(&hyper)?,
        || format!("v = {v:?}"),
    ))
}

fn fv_meet(f: &PrimeField, _: &Shared, rng: &mut ChaCha8Rng) -> Result<Check> {
    let v = random_nonzero(f, 6, rng);
    let w = random_nonzero(f, 6, rng);
    if Matrix::from_rows(f, 6, vec![v.clone(), w.clone()])?.rank() < 2 {
        return Ok(Ok(()));
    }
    let d = wedge_map_image(f, &v)?.intersect(&wedge_map_image(f, &w)?)?.dim();
    Ok(ensure(d == 4, || format!("dim {d} for {v:?}, {w:?}")))
}

fn decomposable_invariance(f: &PrimeField, _: &Shared, rng: &mut ChaCha8Rng) -> Result<Check> {
    let m = invertible(f, 6, rng);
    let w3 = wedge3_matrix(&m);
    let vs: Vec<Vec<u64>> = (0..3).map(|_| random_nonzero(f, 6, rng)).collect();
    let pure = wedge_vectors(f, &vs);
    let generic: Vec<u64> = (0..20).map(|_| f.random(rng)).collect();
    for w in [pure, generic] {
        if w.iter().all(|x| *x == 0) {
            continue;
        }
        let before = is_decomposable(f, &w)?.is_some();
        let after = is_decomposable(f, &w3.vec_mul(&w))?.is_some();
        if before != after {
            return Ok(Err(format!("decomposability changed for {w:?}")));
        }
    }
    Ok(Ok(()))
}

fn graph_valid(f: &PrimeField, _: &Shared, rng: &mut ChaCha8Rng) -> Result<Check> {
    let m = Matrix::random_symmetric(f, 10, rng);
    let inst = graph_lagrangian(&m)?;
    let d = dual(&inst)?;
    Ok(ensure(
        inst.is_lagrangian && d.identity_holds(&inst.a) && validate_lagrangian(&d.annihilator)?,
        || "graph Lagrangian or its dual failed".into(),
    ))
}

fn witness_replay(f: &PrimeField, _: &Shared, rng: &mut ChaCha8Rng) -> Result<Check> {
    // a random GL(6) image of L still contains decomposable vectors
    let m = invertible(f, 6, rng);
    let a = chart_l(f).image(&wedge3_matrix(&m))?;
    let inst = LagrangianInstance::from_subspace(a, Provenance::Graph)?;
    let opts = ScanOptions {
        chunks: 8,
        ..ScanOptions::default()
    };
    let out = decomposable_search(&inst, 1, &opts)?;
    let Some(w) = out.witness else {
        return Ok(Err("no witness on a transform of L".into()));
    };
    let elem: Vec<u64> = w.element.iter().map(|s| f.parse(s)).collect::<Result<_>>()?;
    Ok(ensure(
        out.status == NdvStatus::WitnessFound && inst.a.contains(&elem) && is_decomposable(f, &elem)?.is_some(),
        || format!("witness {:?} does not replay", w.element),
    ))
}

fn strata_paths(f: &PrimeField, s: &Shared, rng: &mut ChaCha8Rng) -> Result<Check> {
    let v = random_nonzero(f, 6, rng);
    let a = stratum_of(&s.inst, &v)?;
    let b = stratum_by_intersection(&s.inst.a, &v)?;
    Ok(ensure(a == b, || format!("strata {a} and {b} at {v:?}")))
}

fn strata_scaling(f: &PrimeField, s: &Shared, rng: &mut ChaCha8Rng) -> Result<Check> {
    let v = random_nonzero(f, 6, rng);
    let c = f.element(rng.gen_range(1..f.modulus()));
    let w: Vec<u64> = v.iter().map(|x| f.mul(x, &c)).collect();
    Ok(ensure(stratum_of(&s.inst, &v)? == stratum_of(&s.inst, &w)?, || {
        format!("{v:?} scaled by {c}")
    }))
}

fn sextic_reparam(f: &PrimeField, s: &Shared, rng: &mut ChaCha8Rng) -> Result<Check> {
    let (v0, v1) = random_line(&s.inst, rng)?;
    let c = f.element(rng.gen_range(2..f.modulus()));
    let cv0: Vec<u64> = v0.iter().map(|x| f.mul(x, &c)).collect();
    let s1 = sextic_on_line(&s.inst, &v0, &v1)?.sextic;
    let s2 = sextic_on_line(&s.inst, &cv0, &v1)?.sextic;
    // c v0 + t v1 is proportional to v0 + (t/c) v1
    let ci = f.inv(&c).expect("nonzero");
    let coeffs: Vec<u64> = s1
        .coeffs()
        .iter()
        .enumerate()
        .map(|(i, a)| f.mul(a, &f.pow(&ci, i as u64)))
        .collect();
    let s1c = Poly::new(f, coeffs);
    Ok(ensure(s1c.monic() == s2.monic(), || {
        format!("line {v0:?}, {v1:?}, c = {c}")
    }))
}

fn kernel_formula(_: &PrimeField, s: &Shared, rng: &mut ChaCha8Rng) -> Result<Check> {
    let v = off_v5(&s.gm, rng);
    let k = stratum_of(&s.gm.lagrangian, &v)?;
    let c = quadric_at(&s.gm, &v)?.corank();
    Ok(ensure(k == c, || format!("corank {c}, stratum {k} at {v:?}")))
}

fn affine_linearity(f: &PrimeField, s: &Shared, rng: &mut ChaCha8Rng) -> Result<Check> {
    let v = off_v5(&s.gm, rng);
    let u5 = random_nonzero(f, 5, rng);
    let u = s.gm.v5_to_v6(&u5);
    let w: Vec<u64> = v.iter().zip(&u).map(|(a, b)| f.add(a, b)).collect();
    let lhs = quadric_at(&s.gm, &w)?.sub(&quadric_at(&s.gm, &v)?)?;
    let rhs = plucker_quadric(&s.gm, &u)?;
    Ok(ensure(lhs.gram() == rhs.gram(), || format!("v = {v:?}, u = {u5:?}")))
}

fn x_points(_: &PrimeField, s: &Shared, _: &mut ChaCha8Rng) -> Result<Check> {
    let rep = sample_points(&s.gm, 8)?;
    for p in &rep.points {
        let y =
            s.gm.w_coords(&p.plucker)
                .ok_or_else(|| crate::Error::Integrity("point off W".into()))?;
        let on =
            s.gm.plucker
                .iter()
                .chain(std::iter::once(&s.gm.q0))
                .all(|q| q.eval(&y) == 0);
        if !on {
            return Ok(Err(format!("point {:?} off a quadric", p.plane)));
        }
    }
    Ok(Ok(()))
}

fn classification(f: &PrimeField, s: &Shared, rng: &mut ChaCha8Rng) -> Result<Check> {
    let Some(gm) = &s.threefold else {
        return Ok(Err("no threefold available".into()));
    };
    let u = random_nonzero(f, 5, rng);
    let c = rho1_fiber_classify(gm, &gm.v5_to_v6(&u))?;
    Ok(ensure(c.consistent(), || {
        format!("point {u:?}: {} vs {}", c.label, c.predicted)
    }))
}

fn two_spaces(f: &PrimeField, _: &Shared, rng: &mut ChaCha8Rng) -> Result<Check> {
    let k = rng.gen_range(1..=3);
    let n = 2 * k + 4;
    // hyperbolic on the first 2k+2 coordinates, kernel on the last two
    let mut g = Matrix::zeros(f, n, n);
    for i in 0..k + 1 {
        g.set(i, k + 1 + i, 1);
        g.set(k + 1 + i, i, 1);
    }
    let p = invertible(f, n, rng);
    let h = p.mul(&g)?.mul(&p.transpose())?;
    let q = QuadraticForm::new(h)?;
    // x h x^T = (x p) g (x p)^T, so rows of p^{-1} pull the standard isotropic space back
    let pinv = p.inverse().expect("invertible");
    let pi = Subspace::from_rows(f, n, (0..k).map(|i| pinv.row(i).to_vec()).collect());
    let t = two_spaces_through(&q, &pi)?;
    let e = f.extension();
    let qe = QuadraticForm::new(q.gram().map(&e, |x| f.embed(x)))?;
    let pie = pi.map_field(&e, |x| f.embed(x));
    let ok = t.count_with_multiplicity() == 2
        && t.spaces
            .iter()
            .all(|s| s.dim() == k + 3 && qe.vanishes_on(s) && s.contains_space(&pie));
    Ok(ensure(ok, || format!("k = {k}, {:?}", t.rationality)))
}

type PropFn = fn(&PrimeField, &Shared, &mut ChaCha8Rng) -> Result<Check>;

struct Property {
    name: &'static str,
    run: PropFn,
    /// Largest prime the property runs on.
    max_prime: u64,
    min_prime: u64,
    /// Case count cap, for the expensive ones.
    cap: Option<u64>,
}

const fn prop(name: &'static str, run: PropFn) -> Property {
    Property {
        name,
        run,
        max_prime: u64::MAX,
        min_prime: 0,
        cap: None,
    }
}

fn catalogue() -> Vec<Property> {
    vec![
        prop("rref idempotent", rref_idempotent),
        prop("rank nullity", rank_nullity),
        prop("modular dimension law", modular_law),
        prop("corank under congruence", congruence_corank),
        prop("F_v and wedge3 of a hyperplane are Lagrangian", fv_lagrangian),
        prop("F_v meets F_w in dimension 4", fv_meet),
        prop("decomposability is GL6 invariant", decomposable_invariance),
        prop("graph Lagrangian and omega identification", graph_valid),
        Property {
            cap: Some(5),
            ..prop("decomposable witness replay", witness_replay)
        },
        prop("strata agree on both paths", strata_paths),
        prop("strata are scale invariant", strata_scaling),
        Property {
            min_prime: 11,
            cap: Some(20),
            ..prop("sextic under reparametrization", sextic_reparam)
        },
        prop("corank equals stratum", kernel_formula),
        prop("quadric family is affine-linear", affine_linearity),
        Property {
            max_prime: 5,
            cap: Some(1),
            ..prop("points of X lie on the quadrics", x_points)
        },
        Property {
            max_prime: 5,
            ..prop("fiber classification", classification)
        },
        prop("two isotropic spaces through a subspace", two_spaces),
    ]
}

/// Runs every property on each prime with `cases` random cases (fewer for the
/// expensive ones). Properties that do not apply to a prime are skipped.
pub fn property_suite(primes: &[u64], cases: usize, seed: u64) -> Result<Vec<PropertyResult>> {
    let mut out = Vec::new();
    for &p in primes {
        let f = PrimeField::new(p)?;
        let sh = shared(&f, seed)?;
        for (i, prop) in catalogue().into_iter().enumerate() {
            if p > prop.max_prime || p < prop.min_prime {
                continue;
            }
            let n = prop.cap.map_or(cases as u64, |c| c.min(cases as u64));
            let mut rng = ChaCha8Rng::seed_from_u64(seed ^ (p << 32) ^ i as u64);
            let mut result = PropertyResult {
                name: prop.name,
                prime: p,
                cases: 0,
                passed: true,
                detail: String::new(),
            };
            for case in 0..n {
                let r = (prop.run)(&f, &sh, &mut rng).unwrap_or_else(|e| Err(format!("error: {e}")));
                result.cases += 1;
                if let Err(msg) = r {
                    result.passed = false;
                    result.detail = format!("case {case}: {msg}");
                    break;
                }
            }
            out.push(result);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quick_suite_passes() {
        let res = property_suite(&[3, 5], 5, 1).unwrap();
        for r in &res {
            assert!(r.passed, "{} over F_{}: {}", r.name, r.prime, r.detail);
        }
        assert!(res.iter().any(|r| r.name == "fiber classification"));
    }

    #[test]
    fn omega_gram_is_skew() {
        let f = PrimeField::new(7).unwrap();
        assert!(crate::exterior::omega_gram(&f).is_skew());
    }
}
