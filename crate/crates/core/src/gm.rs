//! Gushel–Mukai data: the space `W`, the quadric family on `W`, point sampling on
//! `X = Gr(2,V5) ∩ P(W) ∩ Q`, and Hilbert polynomials of sections of the cone over
//! `Gr(2,5)`.
//!
//! All computations happen in an adapted basis `f1,...,f6` of `V6` with
//! `f1 = v0` the first standard vector outside `V5` and `f2,...,f6` the RREF basis
//! of `V5`. Coordinates on `∧²V5` and `∧³V5` are the lexicographic ones with
//! respect to `f2,...,f6`.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rayon::prelude::*;

use crate::epw::hyperplane_basis;
use crate::error::{bail, Result};
use crate::exterior::{basis_masks, mask_index, wedge_sign};
use crate::field::{Field, Rationals};
use crate::lagrangian::LagrangianInstance;
use crate::linalg::{Matrix, QuadraticForm, Subspace};
use crate::poly::Poly;
use crate::projective::chunk_ranges;

const V5_MASK: u8 = 0b11_1110;

/// Masks of the degree-k basis of `∧^k V5`, as subsets of bits 1..5.
pub fn v5_masks(k: usize) -> Vec<u8> {
    basis_masks(k).iter().copied().filter(|m| m & 1 == 0).collect()
}

fn v5_index(k: usize, mask: u8) -> usize {
    v5_masks(k).iter().position(|&m| m == mask).expect("mask in V5")
}

/// `vol5(x ∧ y)` for `x ∈ ∧³V5`, `y ∈ ∧²V5`.
pub fn vol5_pair<F: Field>(f: &F, x: &[F::Elem], y: &[F::Elem]) -> F::Elem {
    let m3 = v5_masks(3);
    let m2 = v5_masks(2);
    let mut acc = f.zero();
    for (i, &mi) in m3.iter().enumerate() {
        let j = v5_index(2, V5_MASK ^ mi);
        let t = f.mul(&x[i], &y[j]);
        acc = if wedge_sign(mi, m2[j]).expect("disjoint") > 0 {
            f.add(&acc, &t)
        } else {
            f.sub(&acc, &t)
        };
    }
    acc
}

/// Gram matrix of `(w, w') ↦ vol5(u ∧ w ∧ w')` on `∧²V5`, `u` in `V5` coordinates.
pub fn plucker_gram<F: Field>(f: &F, u: &[F::Elem]) -> Matrix<F> {
    let m2 = v5_masks(2);
    let mut g = Matrix::zeros(f, 10, 10);
    for (m, um) in u.iter().enumerate() {
        if f.is_zero(um) {
            continue;
        }
        let bit = 1u8 << (m + 1);
        for (a, &ja) in m2.iter().enumerate() {
            let Some(s1) = wedge_sign(bit, ja) else { continue };
            for (b, &jb) in m2.iter().enumerate() {
                if bit | ja | jb != V5_MASK || (bit | ja) & jb != 0 {
                    continue;
                }
                let s = s1 * wedge_sign(bit | ja, jb).expect("disjoint");
                let cur = g.get(a, b).clone();
                g.set(a, b, if s > 0 { f.add(&cur, um) } else { f.sub(&cur, um) });
            }
        }
    }
    g
}

/// Plücker coordinates in `∧²V5` of the span of two vectors of `V5`.
pub fn plucker_coords<F: Field>(f: &F, r: &[F::Elem], s: &[F::Elem]) -> Vec<F::Elem> {
    let mut out = Vec::with_capacity(10);
    for a in 0..5 {
        for b in a + 1..5 {
            out.push(f.sub(&f.mul(&r[a], &s[b]), &f.mul(&r[b], &s[a])));
        }
    }
    out
}

/// Matrix of `x ↦ u ∧ x` from `V5` to `∧²V5` on row vectors.
pub fn wedge_v5_matrix<F: Field>(f: &F, u: &[F::Elem]) -> Matrix<F> {
    let rows: Vec<Vec<F::Elem>> = (0..5)
        .map(|j| {
            let mut e = vec![f.zero(); 5];
            e[j] = f.one();
            plucker_coords(f, u, &e)
        })
        .collect();
    Matrix::from_rows(f, 10, rows).expect("shape")
}

/// `u ∧ V5` as a subspace of `∧²V5`.
pub fn wedge_v5<F: Field>(f: &F, u: &[F::Elem]) -> Subspace<F> {
    Subspace::from_matrix(&wedge_v5_matrix(f, u))
}

/// The 2-plane of `V5` of a decomposable nonzero `w ∈ ∧²V5`, if it is decomposable.
pub fn plane_of<F: Field>(f: &F, w: &[F::Elem]) -> Option<Subspace<F>> {
    // x ∧ w = 0 in ∧³V5
    let m3 = v5_masks(3);
    let m2 = v5_masks(2);
    let mut m = Matrix::zeros(f, 5, 10);
    for x in 0..5 {
        let bit = 1u8 << (x + 1);
        for (j, &mj) in m2.iter().enumerate() {
            if let Some(s) = wedge_sign(bit, mj) {
                let c = m3.iter().position(|&t| t == bit | mj).expect("mask");
                let v = if s > 0 { w[j].clone() } else { f.neg(&w[j]) };
                m.set(x, c, f.add(m.get(x, c), &v));
            }
        }
    }
    let ker = m.transpose().kernel();
    (ker.dim() == 2).then_some(ker)
}

/// Skew 5x5 matrix of a form in `∧²V5^∨`.
pub fn skew_matrix<F: Field>(f: &F, s: &[F::Elem]) -> Matrix<F> {
    let mut m = Matrix::zeros(f, 5, 5);
    let mut k = 0;
    for a in 0..5 {
        for b in a + 1..5 {
            m.set(a, b, s[k].clone());
            m.set(b, a, f.neg(&s[k]));
            k += 1;
        }
    }
    m
}

/// Lagrangian data `(V6, V5, A)` with the derived GM structure.
#[derive(Debug, Clone)]
pub struct GmInstance<F: Field> {
    pub lagrangian: LagrangianInstance<F>,
    /// `V5 = ker(phi)`.
    pub phi: Vec<F::Elem>,
    /// Rows `f1,...,f6` in the original coordinates.
    pub basis: Matrix<F>,
    pub basis_inv: Matrix<F>,
    /// `A` in the adapted basis.
    pub a_adapted: Subspace<F>,
    /// `dim(A ∩ ∧³V5)`.
    pub ell: usize,
    /// Dimension of the ordinary GM variety, `5 - ell`.
    pub n: usize,
    /// `A ∩ ∧³V5` in `∧³V5` coordinates.
    pub intersection: Subspace<F>,
    /// `W ⊂ ∧²V5`.
    pub w: Subspace<F>,
    /// `W^⊥ ⊂ ∧²V5^∨`.
    pub w_perp: Subspace<F>,
    /// The quadric at `v0`, on RREF coordinates of `W`.
    pub q0: QuadraticForm<F>,
    /// Plücker forms of `f2,...,f6` restricted to `W`.
    pub plucker: Vec<QuadraticForm<F>>,
}

/// `∧³M` acting on row vectors of `∧³V6`.
pub fn wedge3_matrix<F: Field>(m: &Matrix<F>) -> Matrix<F> {
    let f = m.field();
    let masks = basis_masks(3);
    let idx = |mask: u8| crate::exterior::mask_indices(mask);
    let mut out = Matrix::zeros(f, 20, 20);
    for (i, &mi) in masks.iter().enumerate() {
        for (j, &mj) in masks.iter().enumerate() {
            out.set(i, j, m.submatrix(&idx(mi), &idx(mj)).det().expect("square"));
        }
    }
    out
}

// Sign of the chart term in the quadric at v0; fixed by the kernel formula.
const Q0_SIGN: i64 = -1;

/// Builds the GM data of `(A, ker phi)`.
pub fn build_gm<F: Field>(inst: &LagrangianInstance<F>, phi: &[F::Elem]) -> Result<GmInstance<F>> {
    let f = &inst.field;
    if !inst.is_lagrangian {
        bail!(Precondition, "GM data needs a Lagrangian subspace");
    }
    let v5 = hyperplane_basis(f, phi)?;
    let lead = phi.iter().position(|x| !f.is_zero(x)).expect("nonzero");
    let mut f1 = vec![f.zero(); 6];
    f1[lead] = f.one();
    let mut rows = vec![f1];
    rows.extend(v5.basis_vecs());
    let basis = Matrix::from_rows(f, 6, rows)?;
    let basis_inv = basis.inverse().expect("adapted basis");
    let a_adapted = inst.a.image(&wedge3_matrix(&basis_inv))?;

    // Split a = a' + f1 ∧ beta.
    let m3 = basis_masks(3);
    let beta_of =
        |a: &[F::Elem]| -> Vec<F::Elem> { v5_masks(2).iter().map(|&j| a[mask_index(j | 1)].clone()).collect() };
    let prime_of = |a: &[F::Elem]| -> Vec<F::Elem> {
        v5_masks(3)
            .iter()
            .map(|&j| a[m3.iter().position(|&t| t == j).unwrap()].clone())
            .collect()
    };
    let joined: Vec<Vec<F::Elem>> = a_adapted
        .basis_vecs()
        .iter()
        .map(|a| {
            let mut r = beta_of(a);
            r.extend(prime_of(a));
            r
        })
        .collect();
    let (red, _) = Matrix::from_rows(f, 20, joined)?.rref();
    let mut w_rows = Vec::new();
    let mut c_rows = Vec::new();
    let mut i_rows = Vec::new();
    for r in red.row_vecs() {
        if let Some(p) = r.iter().position(|x| !f.is_zero(x)) {
            if p < 10 {
                w_rows.push(r[..10].to_vec());
                c_rows.push(r[10..].to_vec());
            } else {
                i_rows.push(r[10..].to_vec());
            }
        }
    }
    let ell = i_rows.len();
    if ell > 3 {
        bail!(Precondition, "dim(A ∩ ∧³V5) = {ell} exceeds 3; not GM data");
    }
    let w = Subspace::from_rows(f, 10, w_rows.clone());
    debug_assert_eq!(w.basis_vecs(), w_rows);
    let intersection = Subspace::from_rows(f, 10, i_rows);
    let dw = w.dim();
    let sign = f.from_i64(Q0_SIGN);
    let mut g0 = Matrix::zeros(f, dw, dw);
    for j in 0..dw {
        for k in 0..dw {
            g0.set(j, k, f.mul(&sign, &vol5_pair(f, &c_rows[j], &w_rows[k])));
        }
    }
    let q0 = match QuadraticForm::new(g0) {
        Ok(q) => q,
        Err(_) => bail!(Integrity, "quadric at v0 is not symmetric; A is not Lagrangian"),
    };
    let plucker = (0..5)
        .map(|m| {
            let mut u = vec![f.zero(); 5];
            u[m] = f.one();
            QuadraticForm::new(plucker_gram(f, &u)).and_then(|q| q.restrict(w.basis()))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(GmInstance {
        lagrangian: inst.clone(),
        phi: phi.to_vec(),
        basis,
        basis_inv,
        a_adapted,
        ell,
        n: 5 - ell,
        intersection,
        w_perp: w.annihilator(),
        w,
        q0,
        plucker,
    })
}

impl<F: Field> GmInstance<F> {
    pub fn field(&self) -> &F {
        &self.lagrangian.field
    }

    pub fn v0(&self) -> Vec<F::Elem> {
        self.basis.row(0).to_vec()
    }

    /// Adapted coordinates `(lambda, u)` of a vector of `V6`.
    pub fn split(&self, v: &[F::Elem]) -> (F::Elem, Vec<F::Elem>) {
        let y = self.basis_inv.vec_mul(v);
        (y[0].clone(), y[1..].to_vec())
    }

    /// Original coordinates of `u ∈ V5` given in adapted coordinates.
    pub fn v5_to_v6(&self, u: &[F::Elem]) -> Vec<F::Elem> {
        let f = self.field();
        let mut y = vec![f.zero()];
        y.extend_from_slice(u);
        self.basis.vec_mul(&y)
    }

    /// V5 coordinates of a vector of V6 lying in V5.
    pub fn to_v5(&self, v: &[F::Elem]) -> Result<Vec<F::Elem>> {
        let (lam, u) = self.split(v);
        if !self.field().is_zero(&lam) {
            bail!(InvalidInput, "vector does not lie in V5");
        }
        Ok(u)
    }

    /// Plücker form of `u` restricted to `W`; `u` given in V5 coordinates.
    pub fn plucker_on_w(&self, u: &[F::Elem]) -> QuadraticForm<F> {
        let f = self.field();
        let mut acc = QuadraticForm::zero(f, self.w.dim());
        for (m, um) in u.iter().enumerate() {
            acc = acc.add(&self.plucker[m].scale(um)).expect("same dim");
        }
        acc
    }

    /// Coordinates in the RREF basis of `W` of a vector of `∧²V5`.
    pub fn w_coords(&self, x: &[F::Elem]) -> Option<Vec<F::Elem>> {
        self.w.coords(x)
    }

    /// A subspace of `W` (in `∧²V5` coordinates) expressed in `W` coordinates.
    pub fn in_w_coords(&self, s: &Subspace<F>) -> Result<Subspace<F>> {
        let rows = s
            .basis_vecs()
            .iter()
            .map(|x| self.w_coords(x))
            .collect::<Option<Vec<_>>>();
        let Some(rows) = rows else {
            bail!(InvalidInput, "subspace is not contained in W");
        };
        Ok(Subspace::from_rows(self.field(), self.w.dim(), rows))
    }

    /// `∧²V5` coordinates of a subspace given in `W` coordinates.
    pub fn from_w_coords(&self, s: &Subspace<F>) -> Subspace<F> {
        Subspace::from_rows(
            self.field(),
            10,
            s.basis_vecs().iter().map(|x| self.w.basis().vec_mul(x)).collect(),
        )
    }
}

/// The Plücker quadric of `u ∈ V5` (original coordinates) restricted to `W`.
pub fn plucker_quadric<F: Field>(gm: &GmInstance<F>, u: &[F::Elem]) -> Result<QuadraticForm<F>> {
    let u5 = gm.to_v5(u)?;
    if u5.iter().all(|x| gm.field().is_zero(x)) {
        bail!(InvalidInput, "zero vector");
    }
    Ok(gm.plucker_on_w(&u5))
}

/// The quadric of the family at `v = lambda v0 + u`, `lambda ≠ 0`:
/// `lambda Q(v0) + P_u`.
pub fn quadric_at<F: Field>(gm: &GmInstance<F>, v: &[F::Elem]) -> Result<QuadraticForm<F>> {
    let f = gm.field();
    if v.len() != 6 {
        bail!(Dimension, "vector with {} coordinates", v.len());
    }
    let (lam, u) = gm.split(v);
    if f.is_zero(&lam) {
        bail!(InvalidInput, "vector lies in V5");
    }
    gm.q0.scale(&lam).add(&gm.plucker_on_w(&u))
}

/// Row-reduced 2x5 representatives of `Gr(2, F_q^5)`, indexed in lexicographic
/// order of pivot pairs.
#[derive(Debug, Clone)]
pub struct Grassmannian25<F: Field> {
    field: F,
    q: u64,
    blocks: Vec<(usize, usize, u128)>,
}

impl<F: Field> Grassmannian25<F> {
    pub fn new(f: &F) -> Result<Self> {
        let Some(q) = f.order() else {
            bail!(UnsupportedField, "enumeration over an infinite field");
        };
        let mut blocks = Vec::new();
        for p1 in 0..5 {
            for p2 in p1 + 1..5 {
                let free = (4 - p1 - 1) + (4 - p2);
                blocks.push((p1, p2, (q as u128).pow(free as u32)));
            }
        }
        Ok(Grassmannian25 {
            field: f.clone(),
            q,
            blocks,
        })
    }

    pub fn count(&self) -> u128 {
        self.blocks.iter().map(|b| b.2).sum()
    }

    pub fn point(&self, index: u128) -> [Vec<F::Elem>; 2] {
        let f = &self.field;
        let q = self.q as u128;
        let mut idx = index;
        for &(p1, p2, n) in &self.blocks {
            if idx >= n {
                idx -= n;
                continue;
            }
            let mut r = vec![f.zero(); 5];
            let mut s = vec![f.zero(); 5];
            r[p1] = f.one();
            s[p2] = f.one();
            for c in (p2 + 1..5).rev() {
                s[c] = f.element((idx % q) as u64);
                idx /= q;
            }
            for c in (p1 + 1..5).rev() {
                if c == p2 {
                    continue;
                }
                r[c] = f.element((idx % q) as u64);
                idx /= q;
            }
            return [r, s];
        }
        panic!("Grassmannian index out of range");
    }
}

/// A point of `X(F_q)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SamplePoint<F: Field> {
    /// Row-reduced basis of the 2-plane in `V5` coordinates.
    pub plane: [Vec<F::Elem>; 2],
    /// Plücker coordinates in `∧²V5`.
    pub plucker: Vec<F::Elem>,
    pub jacobian_rank: usize,
    pub smooth: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SampleReport<F: Field> {
    pub candidates: u128,
    pub points: Vec<SamplePoint<F>>,
}

/// Rank of the gradients of the five Plücker forms and `Q(v0)` at `y ∈ W`.
pub fn jacobian_rank<F: Field>(gm: &GmInstance<F>, y: &[F::Elem]) -> usize {
    let rows: Vec<Vec<F::Elem>> = gm
        .plucker
        .iter()
        .chain(std::iter::once(&gm.q0))
        .map(|q| q.gram().vec_mul(y))
        .collect();
    Matrix::from_rows(gm.field(), gm.w.dim(), rows).expect("shape").rank()
}

/// Enumerates `Gr(2,V5)(F_q)` and keeps the planes in `P(W) ∩ Q(v0)`.
pub fn sample_points<F: Field>(gm: &GmInstance<F>, chunks: usize) -> Result<SampleReport<F>> {
    let f = gm.field();
    let gr = Grassmannian25::new(f)?;
    let perp = gm.w_perp.basis_vecs();
    let found: Vec<Vec<SamplePoint<F>>> = chunk_ranges(gr.count(), chunks)
        .par_iter()
        .map(|&(s, e)| {
            let mut out = Vec::new();
            for i in s..e {
                let [r, t] = gr.point(i);
                let p = plucker_coords(f, &r, &t);
                if !perp.iter().all(|a| f.is_zero(&crate::linalg::dot(f, a, &p))) {
                    continue;
                }
                let y = gm.w_coords(&p).expect("in W");
                if !f.is_zero(&gm.q0.eval(&y)) {
                    continue;
                }
                let jacobian_rank = jacobian_rank(gm, &y);
                out.push(SamplePoint {
                    plane: [r, t],
                    plucker: p,
                    jacobian_rank,
                    smooth: jacobian_rank == 4,
                });
            }
            out
        })
        .collect();
    Ok(SampleReport {
        candidates: gr.count(),
        points: found.into_iter().flatten().collect(),
    })
}

/// Hilbert data of a section of the cone over `Gr(2,5)` by `h` hyperplanes and
/// `c` quadrics, from the series `(1 - 5s² + 5s³ - s⁵)(1 - s²)^c / (1 - s)^(16-h)`.
#[derive(Debug, Clone, PartialEq)]
pub struct HilbertData {
    pub hyperplanes: usize,
    pub quadrics: usize,
    pub ambient_dim: usize,
    pub dimension: usize,
    /// Coefficients in `t`, constant term first.
    pub polynomial: Vec<BigRational>,
    /// `h(0), ..., h(6)`.
    pub table: Vec<BigInt>,
}

impl HilbertData {
    pub fn degree(&self) -> BigRational {
        let d = self.dimension;
        let lead = self.polynomial.get(d).cloned().unwrap_or_else(BigRational::zero);
        let fact: BigInt = (1..=d as u64).map(BigInt::from).product();
        lead * BigRational::from_integer(fact)
    }
}

fn binom(n: i64, k: i64) -> BigInt {
    if k < 0 || n < k {
        return BigInt::zero();
    }
    let mut r = BigInt::one();
    for i in 0..k {
        r = r * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    r
}

fn series_value(num: &[i64], d: usize, t: i64) -> BigInt {
    num.iter()
        .enumerate()
        .map(|(i, &k)| BigInt::from(k) * binom(t - i as i64 + d as i64 - 1, d as i64 - 1))
        .sum()
}

pub fn hilbert_polynomial(h: usize, c: usize) -> Result<HilbertData> {
    if h > 15 || h + c > 12 {
        bail!(
            InvalidInput,
            "{h} hyperplanes and {c} quadrics leave no transverse section"
        );
    }
    let d = 16 - h;
    let mut num = vec![1i64, 0, -5, 5, 0, -1];
    for _ in 0..c {
        let mut next = vec![0i64; num.len() + 2];
        for (i, &a) in num.iter().enumerate() {
            next[i] += a;
            next[i + 2] -= a;
        }
        num = next;
    }
    let table = (0..=6).map(|t| series_value(&num, d, t)).collect();
    let q = Rationals;
    let start = num.len() as i64;
    let xs: Vec<BigRational> = (start..start + d as i64).map(|t| q.from_i64(t)).collect();
    let ys: Vec<BigRational> = (start..start + d as i64)
        .map(|t| BigRational::from_integer(series_value(&num, d, t)))
        .collect();
    let poly = Poly::interpolate(&q, &xs, &ys)?;
    Ok(HilbertData {
        hyperplanes: h,
        quadrics: c,
        ambient_dim: 15 - h,
        dimension: 12 - h - c,
        polynomial: poly.coeffs().to_vec(),
        table,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::epw::stratum_of;
    use crate::field::PrimeField;
    use crate::lagrangian::{graph_lagrangian, random_instance, random_nonzero};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn e(i: usize) -> Vec<u64> {
        let mut v = vec![0; 6];
        v[i] = 1;
        v
    }

    #[test]
    fn plucker_examples() {
        let f = PrimeField::new(7).unwrap();
        let g = plucker_gram(&f, &[1, 0, 0, 0, 0]);
        let q = QuadraticForm::new(g.clone()).unwrap();
        // V5 = <e2..e6>: w = e34 is index of {2,3} among 2-subsets of {1..5}
        let idx = |a: usize, b: usize| v5_index(2, (1 << a) | (1 << b));
        let mut w = vec![0; 10];
        w[idx(2, 3)] = 1;
        assert_eq!(q.eval(&w), 0);
        w[idx(4, 5)] = 1;
        assert_eq!(q.eval(&w), 2);
        let ker = q.kernel();
        assert_eq!(ker, wedge_v5(&f, &[1, 0, 0, 0, 0]));
        assert_eq!(ker.dim(), 4);
    }

    #[test]
    fn plucker_forms_vanish_on_decomposables() {
        let f = PrimeField::new(11).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..20 {
            let r = random_nonzero(&f, 5, &mut rng);
            let s = random_nonzero(&f, 5, &mut rng);
            let p = plucker_coords(&f, &r, &s);
            for m in 0..5 {
                let mut u = vec![0; 5];
                u[m] = 1;
                assert_eq!(QuadraticForm::new(plucker_gram(&f, &u)).unwrap().eval(&p), 0);
            }
            if p.iter().any(|&x| x != 0) {
                let plane = plane_of(&f, &p).unwrap();
                assert!(plane.contains(&r) && plane.contains(&s));
            }
        }
    }

    #[test]
    fn dimensions_of_w() {
        let f = PrimeField::new(7).unwrap();
        let inst = random_instance(0, &f);
        let gm = build_gm(&inst, &e(0)).unwrap();
        assert_eq!(gm.w.dim(), 10 - gm.ell);
        assert_eq!(gm.n, 5 - gm.ell);
        let l = graph_lagrangian(&Matrix::zeros(&f, 10, 10)).unwrap();
        // L ∩ ∧³<e1..e5> = span{e0ij} ∩ ... = 0
        let gm = build_gm(&l, &e(0)).unwrap();
        assert_eq!((gm.ell, gm.n, gm.w.dim()), (0, 5, 10));
        let cube = LagrangianInstance::from_subspace(
            crate::exterior::wedge3_of_hyperplane(&f, &e(0)).unwrap(),
            crate::lagrangian::Provenance::Constructed("cube".into()),
        )
        .unwrap();
        assert!(build_gm(&cube, &e(0)).is_err());
    }

    #[test]
    fn kernel_formula_and_linearity() {
        let f = PrimeField::new(7).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for seed in 0..4 {
            let inst = random_instance(seed, &f);
            let phi = random_nonzero(&f, 6, &mut rng);
            let gm = build_gm(&inst, &phi).unwrap();
            let q0 = quadric_at(&gm, &gm.v0()).unwrap();
            assert_eq!(q0, gm.q0);
            for _ in 0..30 {
                let v = random_nonzero(&f, 6, &mut rng);
                if let Ok(q) = quadric_at(&gm, &v) {
                    assert_eq!(q.corank(), stratum_of(&inst, &v).unwrap());
                }
                let u5 = random_nonzero(&f, 5, &mut rng);
                let u = gm.v5_to_v6(&u5);
                let v = gm.v0().iter().zip(&u).map(|(a, b)| f.add(a, b)).collect::<Vec<_>>();
                let diff = quadric_at(&gm, &v).unwrap().sub(&gm.q0).unwrap();
                assert_eq!(diff, plucker_quadric(&gm, &u).unwrap());
                // the family is linear in v, so scaling v scales the form
                let c = 3;
                let cv: Vec<u64> = v.iter().map(|x| f.mul(x, &c)).collect();
                assert_eq!(quadric_at(&gm, &cv).unwrap(), quadric_at(&gm, &v).unwrap().scale(&c));
            }
            assert!(quadric_at(&gm, &gm.v5_to_v6(&[1, 0, 0, 0, 0])).is_err());
        }
    }

    #[test]
    fn grassmannian_count() {
        let f = PrimeField::new(3).unwrap();
        let g = Grassmannian25::new(&f).unwrap();
        assert_eq!(g.count(), 1210);
        let mut seen = std::collections::HashSet::new();
        for i in 0..g.count() {
            let [r, s] = g.point(i);
            let p = crate::linalg::normalize(&f, &plucker_coords(&f, &r, &s)).unwrap();
            assert!(seen.insert(p));
        }
    }

    #[test]
    fn hilbert_tables() {
        let z = |v: &[i64]| v.iter().map(|&x| BigInt::from(x)).collect::<Vec<_>>();
        let r = |n: i64, d: i64| BigRational::new(n.into(), d.into());
        let c = hilbert_polynomial(11, 0).unwrap();
        assert_eq!(c.table[..6], z(&[1, 5, 10, 15, 20, 25])[..]);
        assert_eq!(c.polynomial, vec![r(0, 1), r(5, 1)]);
        let s = hilbert_polynomial(10, 0).unwrap();
        assert_eq!(s.table[..6], z(&[1, 6, 16, 31, 51, 76])[..]);
        assert_eq!(s.polynomial, vec![r(1, 1), r(5, 2), r(5, 2)]);
        let t = hilbert_polynomial(8, 1).unwrap();
        assert_eq!(t.dimension, 3);
        assert_eq!(t.polynomial[3], r(10, 6));
        assert_eq!(t.degree(), r(10, 1));
        assert!(hilbert_polynomial(12, 1).is_err());
    }

    #[test]
    fn fivefold_points_are_smooth() {
        let f = PrimeField::new(3).unwrap();
        let opts = crate::lagrangian::ScanOptions::default();
        let inst = (0..)
            .map(|seed| random_instance(seed, &f))
            .find(|i| {
                crate::lagrangian::decomposable_search(i, 1, &opts).unwrap().status
                    == crate::lagrangian::NdvStatus::VerifiedOverField
            })
            .unwrap();
        let phi = (0..364u128)
            .map(|i| crate::projective::ProjectiveSpace::new(&f, 6).unwrap().point(i))
            .find(|phi| crate::epw::dual_stratum_of(&inst, phi).unwrap() == 0)
            .unwrap();
        let gm = build_gm(&inst, &phi).unwrap();
        assert_eq!(gm.n, 5);
        let r = sample_points(&gm, 8).unwrap();
        assert_eq!(r.candidates, 1210);
        assert!(!r.points.is_empty());
        assert!(r.points.iter().all(|p| p.smooth));
        for p in &r.points {
            let y = gm.w_coords(&p.plucker).unwrap();
            assert!(gm.plucker.iter().all(|q| q.eval(&y) == 0));
        }
    }

    #[test]
    fn decomposable_vector_gives_singular_point() {
        let f = PrimeField::new(5).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let mut m = Matrix::random_symmetric(&f, 10, &mut rng);
        for i in 0..10 {
            m.set(0, i, 0);
            m.set(i, 0, 0);
        }
        let inst = graph_lagrangian(&m).unwrap();
        let phi = vec![1, 2, 3, 4, 1, 2];
        let gm = build_gm(&inst, &phi).unwrap();
        let r = sample_points(&gm, 8).unwrap();
        // <e0, e1, e2> meets V5 in a plane, which is a singular point of X
        let u = Subspace::from_rows(&f, 6, vec![e(0), e(1), e(2)]);
        let v5 = hyperplane_basis(&f, &phi).unwrap();
        let meet = u.intersect(&v5).unwrap().basis_vecs();
        let a = gm.to_v5(&meet[0]).unwrap();
        let b = gm.to_v5(&meet[1]).unwrap();
        let target = crate::linalg::normalize(&f, &plucker_coords(&f, &a, &b)).unwrap();
        let hit = r
            .points
            .iter()
            .find(|p| crate::linalg::normalize(&f, &p.plucker).unwrap() == target)
            .unwrap();
        assert!(!hit.smooth);
    }
}
