//! Dense exact linear algebra: matrices, reduced row echelon form, subspaces.

use std::fmt;

use rand::Rng;

use crate::error::{bail, Result};
use crate::field::Field;

#[derive(Clone, PartialEq)]
pub struct Matrix<F: Field> {
    field: F,
    rows: usize,
    cols: usize,
    data: Vec<F::Elem>,
}

impl<F: Field> fmt::Debug for Matrix<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Matrix {}x{} over {}", self.rows, self.cols, self.field.spec())?;
        for r in 0..self.rows {
            let row: Vec<String> = self.row(r).iter().map(|x| self.field.format(x)).collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        Ok(())
    }
}

impl<F: Field> Matrix<F> {
    pub fn zeros(field: &F, rows: usize, cols: usize) -> Self {
        Matrix {
            field: field.clone(),
            rows,
            cols,
            data: vec![field.zero(); rows * cols],
        }
    }

    pub fn identity(field: &F, n: usize) -> Self {
        let mut m = Self::zeros(field, n, n);
        for i in 0..n {
            m.set(i, i, field.one());
        }
        m
    }

    pub fn from_vec(field: &F, rows: usize, cols: usize, data: Vec<F::Elem>) -> Result<Self> {
        if data.len() != rows * cols {
            bail!(Dimension, "{} entries for a {rows}x{cols} matrix", data.len());
        }
        Ok(Matrix {
            field: field.clone(),
            rows,
            cols,
            data,
        })
    }

    /// Builds a matrix from rows of equal length; `cols` is used when `rows` is empty.
    pub fn from_rows(field: &F, cols: usize, rows: Vec<Vec<F::Elem>>) -> Result<Self> {
        let n = rows.len();
        let mut data = Vec::with_capacity(n * cols);
        for r in rows {
            if r.len() != cols {
                bail!(Dimension, "row of length {} where {cols} expected", r.len());
            }
            data.extend(r);
        }
        Self::from_vec(field, n, cols, data)
    }

    pub fn from_i64(field: &F, rows: &[&[i64]]) -> Self {
        let cols = rows.first().map_or(0, |r| r.len());
        let data = rows
            .iter()
            .flat_map(|r| {
                assert_eq!(r.len(), cols, "ragged rows");
                r.iter().map(|&x| field.from_i64(x))
            })
            .collect();
        Matrix {
            field: field.clone(),
            rows: rows.len(),
            cols,
            data,
        }
    }

    pub fn random<R: Rng + ?Sized>(field: &F, rows: usize, cols: usize, rng: &mut R) -> Self {
        let data = (0..rows * cols).map(|_| field.random(rng)).collect();
        Matrix {
            field: field.clone(),
            rows,
            cols,
            data,
        }
    }

    pub fn random_symmetric<R: Rng + ?Sized>(field: &F, n: usize, rng: &mut R) -> Self {
        let mut m = Self::zeros(field, n, n);
        for i in 0..n {
            for j in i..n {
                let x = field.random(rng);
                m.set(i, j, x.clone());
                m.set(j, i, x);
            }
        }
        m
    }

    pub fn field(&self) -> &F {
        &self.field
    }
    pub fn rows(&self) -> usize {
        self.rows
    }
    pub fn cols(&self) -> usize {
        self.cols
    }
    pub fn data(&self) -> &[F::Elem] {
        &self.data
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> &F::Elem {
        &self.data[r * self.cols + c]
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, x: F::Elem) {
        self.data[r * self.cols + c] = x;
    }

    pub fn row(&self, r: usize) -> &[F::Elem] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn row_vecs(&self) -> Vec<Vec<F::Elem>> {
        (0..self.rows).map(|r| self.row(r).to_vec()).collect()
    }

    pub fn column(&self, c: usize) -> Vec<F::Elem> {
        (0..self.rows).map(|r| self.get(r, c).clone()).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(&self.field, self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                t.set(c, r, self.get(r, c).clone());
            }
        }
        t
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        if self.cols != other.rows {
            bail!(
                Dimension,
                "cannot multiply {}x{} by {}x{}",
                self.rows,
                self.cols,
                other.rows,
                other.cols
            );
        }
        let f = &self.field;
        let mut out = Self::zeros(f, self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if f.is_zero(a) {
                    continue;
                }
                for j in 0..other.cols {
                    let v = f.mul_add(out.get(i, j), a, other.get(k, j));
                    out.set(i, j, v);
                }
            }
        }
        Ok(out)
    }

    pub fn mul_vec(&self, x: &[F::Elem]) -> Vec<F::Elem> {
        assert_eq!(x.len(), self.cols);
        let f = &self.field;
        (0..self.rows).map(|r| dot(f, self.row(r), x)).collect()
    }

    /// `x^T * self` for a row vector `x`.
    pub fn vec_mul(&self, x: &[F::Elem]) -> Vec<F::Elem> {
        assert_eq!(x.len(), self.rows);
        let f = &self.field;
        let mut out = vec![f.zero(); self.cols];
        for (r, xr) in x.iter().enumerate() {
            if f.is_zero(xr) {
                continue;
            }
            for (c, o) in out.iter_mut().enumerate() {
                *o = f.mul_add(o, xr, self.get(r, c));
            }
        }
        out
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.zip(other, |f, a, b| f.add(a, b))
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.zip(other, |f, a, b| f.sub(a, b))
    }

    fn zip(&self, other: &Self, op: impl Fn(&F, &F::Elem, &F::Elem) -> F::Elem) -> Result<Self> {
        if self.rows != other.rows || self.cols != other.cols {
            bail!(Dimension, "shape mismatch");
        }
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| op(&self.field, a, b))
            .collect();
        Ok(Matrix {
            field: self.field.clone(),
            rows: self.rows,
            cols: self.cols,
            data,
        })
    }

    pub fn scale(&self, s: &F::Elem) -> Self {
        let data = self.data.iter().map(|a| self.field.mul(a, s)).collect();
        Matrix {
            field: self.field.clone(),
            rows: self.rows,
            cols: self.cols,
            data,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|x| self.field.is_zero(x))
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn is_symmetric(&self) -> bool {
        self.is_square() && (0..self.rows).all(|i| (0..i).all(|j| self.get(i, j) == self.get(j, i)))
    }

    pub fn is_skew(&self) -> bool {
        let f = &self.field;
        self.is_square()
            && (0..self.rows)
                .all(|i| f.is_zero(self.get(i, i)) && (0..i).all(|j| *self.get(i, j) == f.neg(self.get(j, i))))
    }

    /// Rows `rows` and columns `cols` of `self`.
    pub fn submatrix(&self, rows: &[usize], cols: &[usize]) -> Self {
        let data = rows
            .iter()
            .flat_map(|&r| cols.iter().map(move |&c| self.get(r, c).clone()))
            .collect();
        Matrix {
            field: self.field.clone(),
            rows: rows.len(),
            cols: cols.len(),
            data,
        }
    }

    pub fn vstack(&self, other: &Self) -> Result<Self> {
        if self.cols != other.cols {
            bail!(Dimension, "vstack of {} and {} columns", self.cols, other.cols);
        }
        let mut data = self.data.clone();
        data.extend(other.data.iter().cloned());
        Self::from_vec(&self.field, self.rows + other.rows, self.cols, data)
    }

    /// In-place reduction to reduced row echelon form; returns the pivot columns.
    pub fn rref_in_place(&mut self) -> Vec<usize> {
        let f = self.field.clone();
        let (rows, cols) = (self.rows, self.cols);
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..cols {
            if r == rows {
                break;
            }
            let Some(pr) = (r..rows).find(|&i| !f.is_zero(self.get(i, c))) else {
                continue;
            };
            if pr != r {
                for j in 0..cols {
                    self.data.swap(pr * cols + j, r * cols + j);
                }
            }
            let inv = f.inv(self.get(r, c)).expect("nonzero pivot");
            for j in c..cols {
                let v = f.mul(self.get(r, j), &inv);
                self.set(r, j, v);
            }
            for i in 0..rows {
                if i == r {
                    continue;
                }
                let factor = self.get(i, c).clone();
                if f.is_zero(&factor) {
                    continue;
                }
                for j in c..cols {
                    let v = f.sub(self.get(i, j), &f.mul(&factor, self.get(r, j)));
                    self.set(i, j, v);
                }
            }
            pivots.push(c);
            r += 1;
        }
        pivots
    }

    /// Reduced row echelon form and rank.
    pub fn rref(&self) -> (Self, usize) {
        let mut m = self.clone();
        let rank = m.rref_in_place().len();
        (m, rank)
    }

    pub fn rank(&self) -> usize {
        // eliminate along the shorter side
        if self.rows > self.cols {
            self.transpose().rref().1
        } else {
            self.rref().1
        }
    }

    /// Null space `{x : self * x = 0}`.
    pub fn kernel(&self) -> Subspace<F> {
        let f = &self.field;
        let mut m = self.clone();
        let pivots = m.rref_in_place();
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivots.contains(c)).collect();
        let mut basis = Vec::with_capacity(free.len());
        for &fc in &free {
            let mut x = vec![f.zero(); self.cols];
            x[fc] = f.one();
            for (r, &pc) in pivots.iter().enumerate() {
                x[pc] = f.neg(m.get(r, fc));
            }
            basis.push(x);
        }
        Subspace::from_rows(f, self.cols, basis)
    }

    pub fn det(&self) -> Result<F::Elem> {
        if !self.is_square() {
            bail!(Dimension, "determinant of a {}x{} matrix", self.rows, self.cols);
        }
        let f = self.field.clone();
        let n = self.rows;
        let mut m = self.clone();
        let mut det = f.one();
        for c in 0..n {
            let Some(pr) = (c..n).find(|&i| !f.is_zero(m.get(i, c))) else {
                return Ok(f.zero());
            };
            if pr != c {
                for j in 0..n {
                    m.data.swap(pr * n + j, c * n + j);
                }
                det = f.neg(&det);
            }
            let piv = m.get(c, c).clone();
            det = f.mul(&det, &piv);
            let inv = f.inv(&piv).expect("nonzero pivot");
            for i in c + 1..n {
                let factor = f.mul(m.get(i, c), &inv);
                if f.is_zero(&factor) {
                    continue;
                }
                for j in c..n {
                    let v = f.sub(m.get(i, j), &f.mul(&factor, m.get(c, j)));
                    m.set(i, j, v);
                }
            }
        }
        Ok(det)
    }

    pub fn inverse(&self) -> Option<Self> {
        if !self.is_square() {
            return None;
        }
        let n = self.rows;
        let f = &self.field;
        let mut aug = Self::zeros(f, n, 2 * n);
        for i in 0..n {
            for j in 0..n {
                aug.set(i, j, self.get(i, j).clone());
            }
            aug.set(i, n + i, f.one());
        }
        let pivots = aug.rref_in_place();
        if pivots.len() < n || pivots[n - 1] != n - 1 {
            return None;
        }
        let cols: Vec<usize> = (n..2 * n).collect();
        let rows: Vec<usize> = (0..n).collect();
        Some(aug.submatrix(&rows, &cols))
    }

    /// Entries as strings in row-major order.
    pub fn to_strings(&self) -> Vec<Vec<String>> {
        (0..self.rows)
            .map(|r| self.row(r).iter().map(|x| self.field.format(x)).collect())
            .collect()
    }

    pub fn from_strings(field: &F, cols: usize, rows: &[Vec<String>]) -> Result<Self> {
        let parsed = rows
            .iter()
            .map(|r| r.iter().map(|s| field.parse(s)).collect::<Result<Vec<_>>>())
            .collect::<Result<Vec<_>>>()?;
        Self::from_rows(field, cols, parsed)
    }

    /// Applies `g` entrywise, moving to another field.
    pub fn map<G: Field>(&self, g: &G, op: impl Fn(&F::Elem) -> G::Elem) -> Matrix<G> {
        Matrix {
            field: g.clone(),
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(op).collect(),
        }
    }
}

pub fn dot<F: Field>(f: &F, a: &[F::Elem], b: &[F::Elem]) -> F::Elem {
    a.iter().zip(b).fold(f.zero(), |acc, (x, y)| f.mul_add(&acc, x, y))
}

pub fn axpy<F: Field>(f: &F, y: &mut [F::Elem], a: &F::Elem, x: &[F::Elem]) {
    if f.is_zero(a) {
        return;
    }
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi = f.mul_add(yi, a, xi);
    }
}

pub fn scale_vec<F: Field>(f: &F, a: &F::Elem, x: &[F::Elem]) -> Vec<F::Elem> {
    x.iter().map(|xi| f.mul(a, xi)).collect()
}

pub fn is_zero_vec<F: Field>(f: &F, x: &[F::Elem]) -> bool {
    x.iter().all(|a| f.is_zero(a))
}

/// Scales a nonzero vector so its first nonzero entry is 1.
pub fn normalize<F: Field>(f: &F, x: &[F::Elem]) -> Option<Vec<F::Elem>> {
    let lead = x.iter().find(|a| !f.is_zero(a))?;
    let inv = f.inv(lead)?;
    Some(scale_vec(f, &inv, x))
}

/// A linear subspace of `F^ambient`, stored as the nonzero rows of its RREF basis.
#[derive(Clone, PartialEq)]
pub struct Subspace<F: Field> {
    ambient: usize,
    basis: Matrix<F>,
    pivots: Vec<usize>,
}

impl<F: Field> fmt::Debug for Subspace<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Subspace(dim {} in {}) {:?}", self.dim(), self.ambient, self.basis)
    }
}

impl<F: Field> Subspace<F> {
    pub fn from_matrix(m: &Matrix<F>) -> Self {
        let mut b = m.clone();
        let pivots = b.rref_in_place();
        let keep: Vec<usize> = (0..pivots.len()).collect();
        let all: Vec<usize> = (0..m.cols()).collect();
        Subspace {
            ambient: m.cols(),
            basis: b.submatrix(&keep, &all),
            pivots,
        }
    }

    /// Span of the given vectors.
    pub fn from_rows(field: &F, ambient: usize, rows: Vec<Vec<F::Elem>>) -> Self {
        let m = Matrix::from_rows(field, ambient, rows).expect("vectors of ambient length");
        Self::from_matrix(&m)
    }

    pub fn zero(field: &F, ambient: usize) -> Self {
        Subspace {
            ambient,
            basis: Matrix::zeros(field, 0, ambient),
            pivots: vec![],
        }
    }

    pub fn full(field: &F, ambient: usize) -> Self {
        Subspace {
            ambient,
            basis: Matrix::identity(field, ambient),
            pivots: (0..ambient).collect(),
        }
    }

    /// Span of standard basis vectors.
    pub fn coordinate(field: &F, ambient: usize, coords: &[usize]) -> Self {
        let rows = coords
            .iter()
            .map(|&i| {
                let mut v = vec![field.zero(); ambient];
                v[i] = field.one();
                v
            })
            .collect();
        Self::from_rows(field, ambient, rows)
    }

    pub fn field(&self) -> &F {
        self.basis.field()
    }
    pub fn ambient(&self) -> usize {
        self.ambient
    }
    pub fn dim(&self) -> usize {
        self.basis.rows()
    }
    pub fn basis(&self) -> &Matrix<F> {
        &self.basis
    }
    pub fn basis_vecs(&self) -> Vec<Vec<F::Elem>> {
        self.basis.row_vecs()
    }
    pub fn pivots(&self) -> &[usize] {
        &self.pivots
    }

    fn check_ambient(&self, other: &Self) -> Result<()> {
        if self.ambient != other.ambient {
            bail!(
                Dimension,
                "ambient dimensions {} and {} differ",
                self.ambient,
                other.ambient
            );
        }
        Ok(())
    }

    /// Coordinates of `x` in the RREF basis, if `x` lies in the subspace.
    pub fn coords(&self, x: &[F::Elem]) -> Option<Vec<F::Elem>> {
        let c: Vec<F::Elem> = self.pivots.iter().map(|&p| x[p].clone()).collect();
        let recon = self.basis.vec_mul(&c);
        (recon == x).then_some(c)
    }

    pub fn contains(&self, x: &[F::Elem]) -> bool {
        self.coords(x).is_some()
    }

    pub fn contains_space(&self, other: &Self) -> bool {
        (0..other.dim()).all(|r| self.contains(other.basis.row(r)))
    }

    pub fn sum(&self, other: &Self) -> Result<Self> {
        self.check_ambient(other)?;
        Ok(Self::from_matrix(&self.basis.vstack(&other.basis)?))
    }

    /// Annihilator in the dual space, in dual coordinates.
    pub fn annihilator(&self) -> Self {
        self.basis.kernel()
    }

    pub fn intersect(&self, other: &Self) -> Result<Self> {
        self.check_ambient(other)?;
        // kernel of [B1; -B2]^T gives the pairs (x, y) with x B1 = y B2
        let f = self.field();
        let (d1, d2) = (self.dim(), other.dim());
        if d1 == 0 || d2 == 0 {
            return Ok(Self::zero(f, self.ambient));
        }
        let stacked = self.basis.vstack(&other.basis.scale(&f.neg(&f.one())))?;
        let rel = stacked.transpose().kernel();
        let rows = rel
            .basis_vecs()
            .into_iter()
            .map(|c| self.basis.vec_mul(&c[..d1]))
            .collect();
        Ok(Self::from_rows(f, self.ambient, rows))
    }

    /// Image of the subspace under `x -> x * m` (vectors as rows).
    pub fn image(&self, m: &Matrix<F>) -> Result<Self> {
        if m.rows() != self.ambient {
            bail!(Dimension, "map from {} applied to ambient {}", m.rows(), self.ambient);
        }
        Ok(Self::from_matrix(&self.basis.mul(m)?))
    }

    /// Standard basis vectors spanning a complement.
    pub fn complement_coords(&self) -> Vec<usize> {
        (0..self.ambient).filter(|c| !self.pivots.contains(c)).collect()
    }

    pub fn map_field<G: Field>(&self, g: &G, op: impl Fn(&F::Elem) -> G::Elem) -> Subspace<G> {
        Subspace::from_matrix(&self.basis.map(g, op))
    }
}

/// Symmetric bilinear form given by its Gram matrix.
#[derive(Clone, PartialEq)]
pub struct QuadraticForm<F: Field> {
    gram: Matrix<F>,
}

impl<F: Field> fmt::Debug for QuadraticForm<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "QuadraticForm {:?}", self.gram)
    }
}

impl<F: Field> QuadraticForm<F> {
    pub fn new(gram: Matrix<F>) -> Result<Self> {
        if !gram.is_symmetric() {
            bail!(InvalidInput, "Gram matrix is not symmetric");
        }
        Ok(QuadraticForm { gram })
    }

    pub fn zero(field: &F, dim: usize) -> Self {
        QuadraticForm {
            gram: Matrix::zeros(field, dim, dim),
        }
    }

    pub fn gram(&self) -> &Matrix<F> {
        &self.gram
    }
    pub fn field(&self) -> &F {
        self.gram.field()
    }
    pub fn dim(&self) -> usize {
        self.gram.rows()
    }
    pub fn rank(&self) -> usize {
        self.gram.rank()
    }
    pub fn corank(&self) -> usize {
        self.dim() - self.rank()
    }
    pub fn kernel(&self) -> Subspace<F> {
        self.gram.kernel()
    }

    pub fn bilinear(&self, x: &[F::Elem], y: &[F::Elem]) -> F::Elem {
        dot(self.field(), x, &self.gram.mul_vec(y))
    }

    pub fn eval(&self, x: &[F::Elem]) -> F::Elem {
        self.bilinear(x, x)
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        Ok(QuadraticForm {
            gram: self.gram.add(&other.gram)?,
        })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        Ok(QuadraticForm {
            gram: self.gram.sub(&other.gram)?,
        })
    }

    pub fn scale(&self, s: &F::Elem) -> Self {
        QuadraticForm {
            gram: self.gram.scale(s),
        }
    }

    /// Form pulled back along the rows of `basis`: `B G B^T`.
    pub fn restrict(&self, basis: &Matrix<F>) -> Result<Self> {
        let g = basis.mul(&self.gram)?.mul(&basis.transpose())?;
        Ok(QuadraticForm { gram: g })
    }

    pub fn restrict_to(&self, s: &Subspace<F>) -> Result<Self> {
        self.restrict(s.basis())
    }

    pub fn vanishes_on(&self, s: &Subspace<F>) -> bool {
        s.dim() == 0 || self.restrict_to(s).map(|q| q.gram.is_zero()).unwrap_or(false)
    }

    /// Kernel and the induced nondegenerate form on a coordinate complement of it,
    /// which represents the quotient by the kernel.
    pub fn corank_reduce(&self) -> (Subspace<F>, QuadraticForm<F>, Vec<usize>) {
        let ker = self.kernel();
        let comp = ker.complement_coords();
        let reduced = QuadraticForm {
            gram: self.gram.submatrix(&comp, &comp),
        };
        (ker, reduced, comp)
    }

    /// Orthogonal complement of a subspace with respect to the form.
    pub fn perp(&self, s: &Subspace<F>) -> Result<Subspace<F>> {
        if s.dim() == 0 {
            return Ok(Subspace::full(self.field(), self.dim()));
        }
        Ok(s.basis().mul(&self.gram)?.kernel())
    }

    pub fn to_strings(&self) -> Vec<Vec<String>> {
        self.gram.to_strings()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{PrimeField, QuadExt, Rationals};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn det_by_expansion<F: Field>(m: &Matrix<F>) -> F::Elem {
        let f = m.field();
        let n = m.rows();
        if n == 0 {
            return f.one();
        }
        let mut acc = f.zero();
        for c in 0..n {
            let rows: Vec<usize> = (1..n).collect();
            let cols: Vec<usize> = (0..n).filter(|&j| j != c).collect();
            let term = f.mul(m.get(0, c), &det_by_expansion(&m.submatrix(&rows, &cols)));
            acc = if c % 2 == 0 {
                f.add(&acc, &term)
            } else {
                f.sub(&acc, &term)
            };
        }
        acc
    }

    #[test]
    fn rref_basic() {
        let q = Rationals;
        let id = Matrix::<Rationals>::identity(&q, 2);
        assert_eq!(id.rref(), (id.clone(), 2));
        let m = Matrix::from_i64(&q, &[&[1, 2], &[2, 4]]);
        let (r, rank) = m.rref();
        assert_eq!(rank, 1);
        assert_eq!(r, Matrix::from_i64(&q, &[&[1, 2], &[0, 0]]));
    }

    #[test]
    fn rank_agrees_with_minor_oracle() {
        let f = PrimeField::new(11).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..20 {
            let m = Matrix::random(&f, 10, 15, &mut rng);
            let (r, rank) = m.rref();
            assert_eq!(rank, 10);
            assert_eq!(r.rref().0, r);
            // any nonzero 4x4 minor certifies rank >= 4 on that block
            let sub = m.submatrix(&[0, 1, 2, 3], &[0, 1, 2, 3]);
            let d = det_by_expansion(&sub);
            assert_eq!(sub.rank() == 4, d != 0);
            assert_eq!(sub.det().unwrap(), d);
        }
    }

    #[test]
    fn kernel_basics() {
        let f = PrimeField::new(7).unwrap();
        assert_eq!(Matrix::identity(&f, 4).kernel().dim(), 0);
        assert_eq!(Matrix::zeros(&f, 3, 3).kernel().dim(), 3);
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..50 {
            let m = Matrix::random(&f, 5, 5, &mut rng);
            let s = m.sub(&m.transpose()).unwrap();
            assert!(s.is_skew());
            let k = s.kernel();
            assert_eq!(k.dim() % 2, 1);
            // principal 4x4 blocks of a skew matrix have square determinant (Pfaffian squared)
            let sub = s.submatrix(&[0, 1, 2, 3], &[0, 1, 2, 3]);
            let pf = f.sub(
                &f.add(
                    &f.mul(sub.get(0, 1), sub.get(2, 3)),
                    &f.mul(sub.get(0, 3), sub.get(1, 2)),
                ),
                &f.mul(sub.get(0, 2), sub.get(1, 3)),
            );
            assert_eq!(sub.det().unwrap(), f.mul(&pf, &pf));
            for v in k.basis_vecs() {
                assert!(is_zero_vec(&f, &s.mul_vec(&v)));
            }
        }
    }

    fn modular_law<F: Field>(f: &F, seed: u64) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for trial in 0..20 {
            let a = 3 + trial % 8;
            let u = Subspace::from_matrix(&Matrix::random(f, a, 20, &mut rng));
            let v = Subspace::from_matrix(&Matrix::random(f, 10, 20, &mut rng));
            let i = u.intersect(&v).unwrap();
            let s = u.sum(&v).unwrap();
            assert_eq!(u.dim() + v.dim(), i.dim() + s.dim());
            assert!(u.contains_space(&i) && v.contains_space(&i));
            assert_eq!(u.annihilator().annihilator(), u);
            assert_eq!(u.intersect(&u).unwrap(), u);
            assert_eq!(u.sum(&u).unwrap(), u);
        }
    }

    #[test]
    fn modular_law_all_fields() {
        modular_law(&PrimeField::new(5).unwrap(), 1);
        modular_law(&QuadExt::new(3).unwrap(), 2);
        modular_law(&Rationals, 3);
    }

    #[test]
    fn complementary_coordinates() {
        let f = PrimeField::new(3).unwrap();
        let u = Subspace::coordinate(&f, 5, &[0, 1]);
        let v = Subspace::coordinate(&f, 5, &[2, 3, 4]);
        assert_eq!(u.intersect(&v).unwrap().dim(), 0);
        assert_eq!(u.sum(&v).unwrap(), Subspace::full(&f, 5));
        let w = Subspace::coordinate(&f, 4, &[0]);
        assert!(u.intersect(&w).is_err());
    }

    #[test]
    fn inverse_and_det() {
        let q = Rationals;
        let m = Matrix::from_i64(&q, &[&[2, 1, 0], &[1, 3, 1], &[0, 1, 4]]);
        let inv = m.inverse().unwrap();
        assert_eq!(m.mul(&inv).unwrap(), Matrix::identity(&q, 3));
        assert_eq!(m.det().unwrap(), q.from_i64(18));
        assert!(Matrix::from_i64(&q, &[&[1, 2], &[2, 4]]).inverse().is_none());
    }

    #[test]
    fn corank_reduce_examples() {
        let f = PrimeField::new(7).unwrap();
        let nd = QuadraticForm::new(Matrix::identity(&f, 3)).unwrap();
        let (k, red, _) = nd.corank_reduce();
        assert_eq!(k.dim(), 0);
        assert_eq!(red, nd);
        let (k, red, _) = QuadraticForm::zero(&f, 3).corank_reduce();
        assert_eq!((k.dim(), red.dim()), (3, 0));
        // x*y on a 4-space: Gram has 1/2 off the diagonal
        let h = f.inv(&2).unwrap();
        let mut g = Matrix::zeros(&f, 4, 4);
        g.set(0, 1, h);
        g.set(1, 0, h);
        let q = QuadraticForm::new(g).unwrap();
        let (k, red, _) = q.corank_reduce();
        assert_eq!(k.dim(), 2);
        assert_eq!(red.corank(), 0);
        // hyperbolic plane: isotropic vectors exist and the discriminant is -1 up to squares
        let d = red.gram().det().unwrap();
        assert!(f.sqrt(&f.neg(&d)).unwrap().is_some());
        assert_eq!(red.eval(&[1, 0]), 0);
    }

    #[test]
    fn congruence_preserves_corank() {
        let f = PrimeField::new(13).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..30 {
            let b = Matrix::random(&f, 6, 3, &mut rng);
            let g = b.mul(&b.transpose()).unwrap();
            let q = QuadraticForm::new(g).unwrap();
            let p = loop {
                let p = Matrix::random(&f, 6, 6, &mut rng);
                if p.inverse().is_some() {
                    break p;
                }
            };
            assert_eq!(q.restrict(&p).unwrap().corank(), q.corank());
        }
    }
}
