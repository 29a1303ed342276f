//! Exterior algebra of a six-dimensional space.
//!
//! Basis vectors of the degree-k piece are the k-subsets of {0,...,5} as
//! bitmasks, in lexicographic order of their increasing index tuples.

use std::sync::OnceLock;

use crate::error::{bail, Result};
use crate::field::Field;
use crate::linalg::{Matrix, Subspace};

pub const DIM: usize = 6;
pub const FULL_MASK: u8 = 0b11_1111;

struct Tables {
    masks: [Vec<u8>; DIM + 1],
    index: [[u8; 64]; DIM + 1],
}

fn tables() -> &'static Tables {
    static T: OnceLock<Tables> = OnceLock::new();
    T.get_or_init(|| {
        let mut masks: [Vec<u8>; DIM + 1] = Default::default();
        let mut index = [[u8::MAX; 64]; DIM + 1];
        fn rec(start: usize, k: usize, cur: u8, out: &mut Vec<u8>) {
            if k == 0 {
                out.push(cur);
                return;
            }
            for i in start..DIM {
                rec(i + 1, k - 1, cur | (1 << i), out);
            }
        }
        for k in 0..=DIM {
            rec(0, k, 0, &mut masks[k]);
            for (i, &m) in masks[k].iter().enumerate() {
                index[k][m as usize] = i as u8;
            }
        }
        Tables { masks, index }
    })
}

/// Binomial coefficient C(6, k).
pub fn graded_dim(k: usize) -> usize {
    tables().masks[k].len()
}

/// Basis masks of the degree-k piece in canonical order.
pub fn basis_masks(k: usize) -> &'static [u8] {
    &tables().masks[k]
}

/// Position of a basis mask inside its graded piece.
pub fn mask_index(mask: u8) -> usize {
    let k = mask.count_ones() as usize;
    tables().index[k][mask as usize] as usize
}

/// Indices of the set bits, increasing.
pub fn mask_indices(mask: u8) -> Vec<usize> {
    (0..DIM).filter(|i| mask & (1 << i) != 0).collect()
}

/// `e_a ∧ e_b = sign * e_{a|b}`; `None` when the index sets overlap.
/// The sign is `(-1)^#{(i, j) : i in a, j in b, i > j}`.
pub fn wedge_sign(a: u8, b: u8) -> Option<i8> {
    if a & b != 0 {
        return None;
    }
    let mut inversions = 0u32;
    for j in 0..DIM {
        if b & (1 << j) != 0 {
            inversions += (a >> (j + 1)).count_ones();
        }
    }
    Some(if inversions % 2 == 0 { 1 } else { -1 })
}

#[derive(Debug, Clone, PartialEq)]
pub struct Multivector<F: Field> {
    degree: usize,
    coeffs: Vec<F::Elem>,
}

impl<F: Field> Multivector<F> {
    pub fn new(degree: usize, coeffs: Vec<F::Elem>) -> Result<Self> {
        if degree > DIM {
            bail!(Dimension, "degree {degree} exceeds {DIM}");
        }
        if coeffs.len() != graded_dim(degree) {
            bail!(
                Dimension,
                "{} coefficients for degree {degree}, expected {}",
                coeffs.len(),
                graded_dim(degree)
            );
        }
        Ok(Multivector { degree, coeffs })
    }

    pub fn zero(field: &F, degree: usize) -> Self {
        Multivector {
            degree,
            coeffs: vec![field.zero(); graded_dim(degree)],
        }
    }

    /// Basis element `e_I` for the 0-based index set `indices`, with the sign of
    /// sorting them.
    pub fn basis(field: &F, indices: &[usize]) -> Result<Self> {
        let mut v = Multivector::<F>::vector(field, &{
            let mut e = vec![field.zero(); DIM];
            e[indices[0]] = field.one();
            e
        });
        for &i in &indices[1..] {
            let mut e = vec![field.zero(); DIM];
            e[i] = field.one();
            v = v.wedge(field, &Multivector::vector(field, &e))?;
        }
        Ok(v)
    }

    pub fn vector(_field: &F, v: &[F::Elem]) -> Self {
        assert_eq!(v.len(), DIM);
        Multivector {
            degree: 1,
            coeffs: v.to_vec(),
        }
    }

    pub fn degree(&self) -> usize {
        self.degree
    }
    pub fn coeffs(&self) -> &[F::Elem] {
        &self.coeffs
    }
    pub fn into_coeffs(self) -> Vec<F::Elem> {
        self.coeffs
    }

    pub fn is_zero(&self, field: &F) -> bool {
        self.coeffs.iter().all(|c| field.is_zero(c))
    }

    pub fn wedge(&self, field: &F, other: &Self) -> Result<Self> {
        Ok(Multivector {
            degree: self.degree + other.degree,
            coeffs: wedge_coeffs(field, self.degree, &self.coeffs, other.degree, &other.coeffs)?,
        })
    }
}

/// Wedge product on raw coefficient vectors.
pub fn wedge_coeffs<F: Field>(f: &F, k: usize, a: &[F::Elem], l: usize, b: &[F::Elem]) -> Result<Vec<F::Elem>> {
    if k + l > DIM {
        bail!(Dimension, "wedge of degrees {k} and {l} exceeds {DIM}");
    }
    let mut out = vec![f.zero(); graded_dim(k + l)];
    for (i, &ma) in basis_masks(k).iter().enumerate() {
        if f.is_zero(&a[i]) {
            continue;
        }
        for (j, &mb) in basis_masks(l).iter().enumerate() {
            if f.is_zero(&b[j]) {
                continue;
            }
            if let Some(s) = wedge_sign(ma, mb) {
                let idx = mask_index(ma | mb);
                let t = f.mul(&a[i], &b[j]);
                out[idx] = if s > 0 {
                    f.add(&out[idx], &t)
                } else {
                    f.sub(&out[idx], &t)
                };
            }
        }
    }
    Ok(out)
}

/// Complementary basis element of a degree-3 mask and the sign of `e_I ∧ e_{I^c}`.
pub fn complement3(i: usize) -> (usize, i8) {
    let m = basis_masks(3)[i];
    let c = FULL_MASK ^ m;
    (mask_index(c), wedge_sign(m, c).expect("disjoint"))
}

/// The symplectic form `ω(a, b) = vol(a ∧ b)` on degree-3 coefficient vectors.
pub fn omega<F: Field>(f: &F, a: &[F::Elem], b: &[F::Elem]) -> F::Elem {
    let mut acc = f.zero();
    for i in 0..20 {
        if f.is_zero(&a[i]) {
            continue;
        }
        let (j, s) = complement3(i);
        let s = omega_sign(s);
        let t = f.mul(&a[i], &b[j]);
        acc = if s > 0 { f.add(&acc, &t) } else { f.sub(&acc, &t) };
    }
    acc
}

#[cfg(not(feature = "inject-omega-fault"))]
#[inline]
fn omega_sign(s: i8) -> i8 {
    s
}

// Mutation control: a single flipped sign breaks antisymmetry of ω.
#[cfg(feature = "inject-omega-fault")]
#[inline]
fn omega_sign(s: i8) -> i8 {
    if s > 0 {
        -s
    } else {
        s
    }
}

/// Gram matrix of ω in the lexicographic basis of the degree-3 piece.
pub fn omega_gram<F: Field>(f: &F) -> Matrix<F> {
    let mut g = Matrix::zeros(f, 20, 20);
    for i in 0..20 {
        let (j, s) = complement3(i);
        let s = omega_sign(s);
        g.set(i, j, if s > 0 { f.one() } else { f.neg(&f.one()) });
    }
    g
}

/// Matrix of `x ↦ v ∧ x` from degree k to degree k+1, acting on row vectors.
pub fn left_wedge_matrix<F: Field>(f: &F, v: &[F::Elem], k: usize) -> Matrix<F> {
    let rows = graded_dim(k);
    let cols = graded_dim(k + 1);
    let mut m = Matrix::zeros(f, rows, cols);
    for (r, &mx) in basis_masks(k).iter().enumerate() {
        for (i, vi) in v.iter().enumerate() {
            if f.is_zero(vi) {
                continue;
            }
            if let Some(s) = wedge_sign(1 << i, mx) {
                let c = mask_index(mx | (1 << i));
                let val = if s > 0 { vi.clone() } else { f.neg(vi) };
                m.set(r, c, val);
            }
        }
    }
    m
}

fn check_nonzero<F: Field>(f: &F, v: &[F::Elem], what: &str) -> Result<()> {
    if v.len() != DIM {
        bail!(Dimension, "{what} has {} coordinates, expected {DIM}", v.len());
    }
    if v.iter().all(|x| f.is_zero(x)) {
        bail!(InvalidInput, "{what} is zero");
    }
    Ok(())
}

/// `F_v = v ∧ ∧²V6`, a 10-dimensional subspace of ∧³V6.
pub fn wedge_map_image<F: Field>(f: &F, v: &[F::Elem]) -> Result<Subspace<F>> {
    check_nonzero(f, v, "vector")?;
    Ok(Subspace::from_matrix(&left_wedge_matrix(f, v, 2)))
}

/// Wedge of several vectors: coefficient on `e_I` is the minor on the columns `I`.
pub fn wedge_vectors<F: Field>(f: &F, vs: &[Vec<F::Elem>]) -> Vec<F::Elem> {
    let k = vs.len();
    let m = Matrix::from_rows(f, DIM, vs.to_vec()).expect("vectors of length 6");
    let rows: Vec<usize> = (0..k).collect();
    basis_masks(k)
        .iter()
        .map(|&mask| m.submatrix(&rows, &mask_indices(mask)).det().expect("square"))
        .collect()
}

/// `∧³(ker phi)` for a nonzero functional `phi`.
pub fn wedge3_of_hyperplane<F: Field>(f: &F, phi: &[F::Elem]) -> Result<Subspace<F>> {
    check_nonzero(f, phi, "functional")?;
    let ker = Matrix::from_rows(f, DIM, vec![phi.to_vec()])?.kernel();
    Ok(wedge3_of_space(f, &ker))
}

/// `∧³U` for a subspace `U ⊂ V6`.
pub fn wedge3_of_space<F: Field>(f: &F, u: &Subspace<F>) -> Subspace<F> {
    let b = u.basis_vecs();
    let mut rows = Vec::new();
    for i in 0..b.len() {
        for j in i + 1..b.len() {
            for k in j + 1..b.len() {
                rows.push(wedge_vectors(f, &[b[i].clone(), b[j].clone(), b[k].clone()]));
            }
        }
    }
    Subspace::from_rows(f, 20, rows)
}

/// 6x15 matrix of `v ↦ v ∧ omega` on row vectors.
pub fn decomposability_matrix<F: Field>(f: &F, omega: &[F::Elem]) -> Matrix<F> {
    let mut m = Matrix::zeros(f, DIM, 15);
    for i in 0..DIM {
        for (t, &mt) in basis_masks(3).iter().enumerate() {
            if f.is_zero(&omega[t]) {
                continue;
            }
            if let Some(s) = wedge_sign(1 << i, mt) {
                let c = mask_index(mt | (1 << i));
                let val = if s > 0 { omega[t].clone() } else { f.neg(&omega[t]) };
                m.set(i, c, val);
            }
        }
    }
    m
}

/// Whether a nonzero degree-3 element is `u1∧u2∧u3`; the witness is `⟨u1,u2,u3⟩`,
/// the kernel of `v ↦ v∧omega`.
pub fn is_decomposable<F: Field>(f: &F, omega: &[F::Elem]) -> Result<Option<Subspace<F>>> {
    if omega.len() != 20 {
        bail!(Dimension, "degree-3 element with {} coefficients", omega.len());
    }
    if omega.iter().all(|x| f.is_zero(x)) {
        bail!(InvalidInput, "zero element");
    }
    if quick_minor_nonzero(f, omega) {
        return Ok(None);
    }
    let ker = decomposability_matrix(f, omega).transpose().kernel();
    Ok((ker.dim() == 3).then_some(ker))
}

// Two 4x4 minors of the decomposability matrix that do not vanish at
// e012 + e345; a nonzero one certifies rank >= 4, hence no decomposition.
const QUICK_MINORS: [([usize; 4], [u8; 4]); 2] = [
    ([0, 1, 3, 4], [0b111001, 0b111010, 0b001111, 0b010111]),
    ([1, 2, 4, 5], [0b111010, 0b111100, 0b010111, 0b100111]),
];

fn quick_minor_nonzero<F: Field>(f: &F, omega: &[F::Elem]) -> bool {
    QUICK_MINORS.iter().any(|(rows, cols)| {
        let mut m: [[F::Elem; 4]; 4] = std::array::from_fn(|_| std::array::from_fn(|_| f.zero()));
        for (r, &i) in rows.iter().enumerate() {
            for (c, &mj) in cols.iter().enumerate() {
                if mj & (1 << i) == 0 {
                    continue;
                }
                let rest = mj ^ (1 << i);
                let s = wedge_sign(1 << i, rest).expect("disjoint");
                let w = &omega[mask_index(rest)];
                m[r][c] = if s > 0 { w.clone() } else { f.neg(w) };
            }
        }
        !f.is_zero(&det4(f, &m))
    })
}

fn det4<F: Field>(f: &F, m: &[[F::Elem; 4]; 4]) -> F::Elem {
    // expansion by 2x2 minors of the first two rows
    let d2 = |r: usize, a: usize, b: usize| f.sub(&f.mul(&m[r][a], &m[r + 1][b]), &f.mul(&m[r][b], &m[r + 1][a]));
    let pairs = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)];
    let mut acc = f.zero();
    for &(a, b) in &pairs {
        let (c, d) = match (a, b) {
            (0, 1) => (2, 3),
            (0, 2) => (1, 3),
            (0, 3) => (1, 2),
            (1, 2) => (0, 3),
            (1, 3) => (0, 2),
            _ => (0, 1),
        };
        let sign_neg = (a + b) % 2 == 0; // (-1)^{a+b+0+1}
        let t = f.mul(&d2(0, a, b), &d2(2, c, d));
        acc = if sign_neg { f.sub(&acc, &t) } else { f.add(&acc, &t) };
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{PrimeField, Rationals};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn e(f: &PrimeField, idx: &[usize]) -> Vec<u64> {
        Multivector::basis(f, idx).unwrap().into_coeffs()
    }

    #[test]
    fn graded_dimensions() {
        let dims: Vec<usize> = (0..=6).map(graded_dim).collect();
        assert_eq!(dims, vec![1, 6, 15, 20, 15, 6, 1]);
        assert_eq!(basis_masks(3)[0], 0b000111);
        assert_eq!(basis_masks(3)[19], 0b111000);
        assert_eq!(mask_indices(basis_masks(3)[1]), vec![0, 1, 3]);
    }

    #[test]
    fn wedge_examples() {
        let f = PrimeField::new(7).unwrap();
        let e12 = Multivector::basis(&f, &[0, 1]).unwrap();
        let e34 = Multivector::basis(&f, &[2, 3]).unwrap();
        assert_eq!(
            e12.wedge(&f, &e34).unwrap(),
            Multivector::basis(&f, &[0, 1, 2, 3]).unwrap()
        );
        let e1 = Multivector::basis(&f, &[0]).unwrap();
        assert!(e1.wedge(&f, &e12).unwrap().is_zero(&f));
        let a = Multivector::basis(&f, &[0, 1, 2]).unwrap();
        let b = Multivector::basis(&f, &[3, 4, 5]).unwrap();
        assert_eq!(a.wedge(&f, &b).unwrap().coeffs(), &[1]);
        assert!(a.wedge(&f, &Multivector::zero(&f, 4)).is_err());
        // e_2 ∧ e_1 = -e_12
        let e21 = Multivector::basis(&f, &[1, 0]).unwrap();
        assert_eq!(e21.coeffs()[0], 6);
    }

    #[test]
    fn graded_anticommutativity() {
        let f = PrimeField::new(11).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for (k, l) in [(1, 1), (1, 2), (2, 2), (1, 3), (3, 3), (2, 3)] {
            let a: Vec<u64> = (0..graded_dim(k)).map(|_| f.random(&mut rng)).collect();
            let b: Vec<u64> = (0..graded_dim(l)).map(|_| f.random(&mut rng)).collect();
            let ab = wedge_coeffs(&f, k, &a, l, &b).unwrap();
            let ba = wedge_coeffs(&f, l, &b, k, &a).unwrap();
            let expect: Vec<u64> = if (k * l) % 2 == 0 {
                ba
            } else {
                ba.iter().map(|x| f.neg(x)).collect()
            };
            assert_eq!(ab, expect);
        }
    }

    #[test]
    fn omega_properties() {
        let f = PrimeField::new(13).unwrap();
        assert_eq!(omega(&f, &e(&f, &[0, 1, 2]), &e(&f, &[3, 4, 5])), 1);
        let g = omega_gram(&f);
        assert_eq!(g.rank(), 20);
        assert_eq!(g.transpose(), g.scale(&f.neg(&1)));
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..50 {
            let a: Vec<u64> = (0..20).map(|_| f.random(&mut rng)).collect();
            let b: Vec<u64> = (0..20).map(|_| f.random(&mut rng)).collect();
            assert_eq!(omega(&f, &a, &a), 0);
            assert_eq!(omega(&f, &a, &b), f.neg(&omega(&f, &b, &a)));
            let w = wedge_coeffs(&f, 3, &a, 3, &b).unwrap();
            assert_eq!(w[0], omega(&f, &a, &b));
        }
    }

    #[test]
    fn f_v_is_lagrangian() {
        let f = PrimeField::new(11).unwrap();
        let g = omega_gram(&f);
        let fe1 = wedge_map_image(&f, &[1, 0, 0, 0, 0, 0]).unwrap();
        let expect = Subspace::from_rows(
            &f,
            20,
            basis_masks(3)
                .iter()
                .filter(|&&m| m & 1 != 0)
                .map(|&m| e(&f, &mask_indices(m)))
                .collect(),
        );
        assert_eq!(fe1, expect);
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..100 {
            let v: Vec<u64> = (0..6).map(|_| f.random(&mut rng)).collect();
            if v.iter().all(|&x| x == 0) {
                continue;
            }
            let fv = wedge_map_image(&f, &v).unwrap();
            assert_eq!(fv.dim(), 10);
            let b = fv.basis();
            assert!(b.mul(&g).unwrap().mul(&b.transpose()).unwrap().is_zero());
            let scaled: Vec<u64> = v.iter().map(|x| f.mul(x, &5)).collect();
            assert_eq!(wedge_map_image(&f, &scaled).unwrap(), fv);
        }
        assert!(wedge_map_image(&f, &[0; 6]).is_err());
    }

    #[test]
    fn two_wedge_images_meet_in_dim_four() {
        let f = PrimeField::new(7).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..30 {
            let v: Vec<u64> = (0..6).map(|_| f.random(&mut rng)).collect();
            let w: Vec<u64> = (0..6).map(|_| f.random(&mut rng)).collect();
            let m = Matrix::from_rows(&f, 6, vec![v.clone(), w.clone()]).unwrap();
            if m.rank() < 2 {
                continue;
            }
            let i = wedge_map_image(&f, &v)
                .unwrap()
                .intersect(&wedge_map_image(&f, &w).unwrap())
                .unwrap();
            assert_eq!(i.dim(), 4);
        }
    }

    #[test]
    fn hyperplane_cube() {
        let f = PrimeField::new(7).unwrap();
        let s = wedge3_of_hyperplane(&f, &[1, 0, 0, 0, 0, 0]).unwrap();
        let expect = Subspace::from_rows(
            &f,
            20,
            basis_masks(3)
                .iter()
                .filter(|&&m| m & 1 == 0)
                .map(|&m| e(&f, &mask_indices(m)))
                .collect(),
        );
        assert_eq!(s, expect);
        let g = omega_gram(&f);
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        for _ in 0..100 {
            let phi: Vec<u64> = (0..6).map(|_| f.random(&mut rng)).collect();
            if phi.iter().all(|&x| x == 0) {
                continue;
            }
            let s = wedge3_of_hyperplane(&f, &phi).unwrap();
            assert_eq!(s.dim(), 10);
            let b = s.basis();
            assert!(b.mul(&g).unwrap().mul(&b.transpose()).unwrap().is_zero());
        }
    }

    #[test]
    fn decomposability_examples() {
        let f = PrimeField::new(11).unwrap();
        let w = is_decomposable(&f, &e(&f, &[0, 1, 2])).unwrap().unwrap();
        assert_eq!(w, Subspace::coordinate(&f, 6, &[0, 1, 2]));
        let a: Vec<u64> = e(&f, &[0, 1, 2])
            .iter()
            .zip(e(&f, &[3, 4, 5]))
            .map(|(x, y)| f.add(x, &y))
            .collect();
        assert!(is_decomposable(&f, &a).unwrap().is_none());
        assert_eq!(decomposability_matrix(&f, &a).rank(), 6);
        let b: Vec<u64> = e(&f, &[0, 1, 2])
            .iter()
            .zip(e(&f, &[0, 3, 4]))
            .map(|(x, y)| f.add(x, &y))
            .collect();
        assert!(is_decomposable(&f, &b).unwrap().is_none());
        // kernel is exactly ⟨e1⟩
        assert_eq!(
            decomposability_matrix(&f, &b).transpose().kernel(),
            Subspace::coordinate(&f, 6, &[0])
        );
        assert!(is_decomposable(&f, &[0; 20]).is_err());
    }

    #[test]
    fn decomposability_under_basis_change() {
        let f = PrimeField::new(5).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for trial in 0..60 {
            let g = loop {
                let g = Matrix::random(&f, 6, 6, &mut rng);
                if g.inverse().is_some() {
                    break g;
                }
            };
            let vs: Vec<Vec<u64>> = (0..3).map(|_| (0..6).map(|_| f.random(&mut rng)).collect()).collect();
            let omega_dec = wedge_vectors(&f, &vs);
            if omega_dec.iter().all(|&x| x == 0) {
                continue;
            }
            let moved: Vec<Vec<u64>> = vs.iter().map(|v| g.vec_mul(v)).collect();
            let omega_moved = wedge_vectors(&f, &moved);
            assert!(is_decomposable(&f, &omega_dec).unwrap().is_some());
            let w = is_decomposable(&f, &omega_moved).unwrap().unwrap();
            assert_eq!(w, Subspace::from_rows(&f, 6, moved.clone()));
            // a random element: fast certificate and full rank test agree
            let r: Vec<u64> = (0..20).map(|_| f.random(&mut rng)).collect();
            if r.iter().any(|&x| x != 0) {
                let full = decomposability_matrix(&f, &r).transpose().kernel().dim() == 3;
                assert_eq!(is_decomposable(&f, &r).unwrap().is_some(), full, "trial {trial}");
            }
        }
    }

    #[test]
    fn quick_minor_is_a_determinant() {
        let q = Rationals;
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        for _ in 0..20 {
            let w: Vec<_> = (0..20).map(|_| q.random(&mut rng)).collect();
            let m = decomposability_matrix(&q, &w);
            for (rows, cols) in QUICK_MINORS.iter() {
                let cidx: Vec<usize> = cols.iter().map(|&c| mask_index(c)).collect();
                let sub = m.submatrix(rows, &cidx);
                let mut arr: [[_; 4]; 4] = Default::default();
                for r in 0..4 {
                    for c in 0..4 {
                        arr[r][c] = sub.get(r, c).clone();
                    }
                }
                assert_eq!(det4(&q, &arr), sub.det().unwrap());
            }
        }
        let a: Vec<_> = (0..20)
            .map(|i| if i == 0 || i == 19 { q.one() } else { q.zero() })
            .collect();
        assert!(quick_minor_nonzero(&q, &a));
    }
}
