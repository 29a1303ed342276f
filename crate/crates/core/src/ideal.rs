//! Homogeneous ideals in a polynomial ring, handled degree by degree with dense
//! linear algebra. An ideal is stored as its graded pieces `I_0, ..., I_d`, each a
//! subspace of the space of forms of that degree.

use std::collections::HashMap;

use crate::error::{bail, Error, Result};
use crate::field::Field;
use crate::linalg::{Matrix, QuadraticForm, Subspace};

/// Largest number of variables accepted (projective dimension 9).
pub const MAX_VARS: usize = 10;
/// Largest degree accepted.
pub const MAX_DEGREE: usize = 7;

/// Monomials of one degree in lex order, largest exponent of `x0` first.
#[derive(Debug, Clone)]
pub struct Monomials {
    pub nvars: usize,
    pub degree: usize,
    pub exps: Vec<Vec<u8>>,
    index: HashMap<Vec<u8>, usize>,
}

impl Monomials {
    pub fn new(nvars: usize, degree: usize) -> Self {
        let mut exps = Vec::new();
        let mut cur = vec![0u8; nvars];
        fill(&mut exps, &mut cur, 0, degree);
        let index = exps.iter().enumerate().map(|(i, e)| (e.clone(), i)).collect();
        Monomials {
            nvars,
            degree,
            exps,
            index,
        }
    }

    pub fn len(&self) -> usize {
        self.exps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.exps.is_empty()
    }

    pub fn index(&self, e: &[u8]) -> Option<usize> {
        self.index.get(e).copied()
    }
}

fn fill(out: &mut Vec<Vec<u8>>, cur: &mut Vec<u8>, var: usize, left: usize) {
    if cur.is_empty() {
        if left == 0 {
            out.push(Vec::new());
        }
        return;
    }
    if var + 1 == cur.len() {
        cur[var] = left as u8;
        out.push(cur.clone());
        cur[var] = 0;
        return;
    }
    for k in (0..=left).rev() {
        cur[var] = k as u8;
        fill(out, cur, var + 1, left - k);
    }
    cur[var] = 0;
}

/// Number of monomials of degree `t` in `n` variables.
pub fn monomial_count(n: usize, t: usize) -> usize {
    if n == 0 {
        return usize::from(t == 0);
    }
    let mut c: u128 = 1;
    for i in 0..(n - 1) as u128 {
        c = c * (t as u128 + 1 + i) / (i + 1);
    }
    c as usize
}

/// A homogeneous form as a coefficient vector over [`Monomials`].
#[derive(Debug, Clone, PartialEq)]
pub struct Form<F: Field> {
    pub degree: usize,
    pub coeffs: Vec<F::Elem>,
}

impl<F: Field> Form<F> {
    pub fn linear(coeffs: Vec<F::Elem>) -> Self {
        Form { degree: 1, coeffs }
    }

    /// `x G xᵀ` for a symmetric Gram matrix.
    pub fn from_quadratic(q: &QuadraticForm<F>) -> Self {
        let f = q.field();
        let n = q.dim();
        let mons = Monomials::new(n, 2);
        let mut coeffs = vec![f.zero(); mons.len()];
        let g = q.gram();
        for i in 0..n {
            for j in i..n {
                let mut e = vec![0u8; n];
                e[i] += 1;
                e[j] += 1;
                let c = if i == j {
                    g.get(i, i).clone()
                } else {
                    f.add(g.get(i, j), g.get(j, i))
                };
                coeffs[mons.index(&e).expect("degree 2")] = c;
            }
        }
        Form { degree: 2, coeffs }
    }

    /// Value at a point.
    pub fn eval(&self, f: &F, x: &[F::Elem]) -> F::Elem {
        let mons = Monomials::new(x.len(), self.degree);
        let mut acc = f.zero();
        for (e, c) in mons.exps.iter().zip(&self.coeffs) {
            if f.is_zero(c) {
                continue;
            }
            let mut t = c.clone();
            for (xi, &k) in x.iter().zip(e) {
                t = f.mul(&t, &f.pow(xi, k as u64));
            }
            acc = f.add(&acc, &t);
        }
        acc
    }
}

/// Matrix of multiplication by each variable, `S_t -> S_{t+1}`, as index maps.
fn shift_maps(src: &Monomials, dst: &Monomials) -> Vec<Vec<usize>> {
    (0..src.nvars)
        .map(|v| {
            src.exps
                .iter()
                .map(|e| {
                    let mut e = e.clone();
                    e[v] += 1;
                    dst.index(&e).expect("degree t+1")
                })
                .collect()
        })
        .collect()
}

/// Products of a linear form with the basis of `S_t`, as rows over `S_{t+1}`.
fn times_linear<F: Field>(f: &F, l: &[F::Elem], maps: &[Vec<usize>], dst_len: usize) -> Matrix<F> {
    let src_len = maps[0].len();
    let mut m = Matrix::zeros(f, src_len, dst_len);
    for (v, c) in l.iter().enumerate() {
        if f.is_zero(c) {
            continue;
        }
        for (i, &j) in maps[v].iter().enumerate() {
            let x = f.add(m.get(i, j), c);
            m.set(i, j, x);
        }
    }
    m
}

/// A homogeneous ideal known in degrees `0..=top`.
#[derive(Debug, Clone, PartialEq)]
pub struct GradedIdeal<F: Field> {
    field: F,
    nvars: usize,
    pieces: Vec<Subspace<F>>,
}

fn check_size(nvars: usize, top: usize) -> Result<()> {
    if nvars == 0 || nvars > MAX_VARS {
        bail!(InvalidInput, "{nvars} variables outside 1..={MAX_VARS}");
    }
    if top > MAX_DEGREE {
        return Err(Error::BudgetExceeded {
            what: "graded pieces".into(),
            size: top as u128,
            limit: MAX_DEGREE as u128,
        });
    }
    Ok(())
}

impl<F: Field> GradedIdeal<F> {
    /// The ideal generated by `gens`, through degree `top`.
    pub fn generated(field: &F, nvars: usize, gens: &[Form<F>], top: usize) -> Result<Self> {
        check_size(nvars, top)?;
        let f = field;
        let mut pieces: Vec<Subspace<F>> = Vec::with_capacity(top + 1);
        let mut prev_mons = Monomials::new(nvars, 0);
        for t in 0..=top {
            let mons = Monomials::new(nvars, t);
            let mut rows: Vec<Vec<F::Elem>> = Vec::new();
            if t > 0 {
                let maps = shift_maps(&prev_mons, &mons);
                let prev = &pieces[t - 1];
                for b in prev.basis_vecs() {
                    for map in &maps {
                        let mut r = vec![f.zero(); mons.len()];
                        for (i, c) in b.iter().enumerate() {
                            r[map[i]] = c.clone();
                        }
                        rows.push(r);
                    }
                }
            }
            for g in gens.iter().filter(|g| g.degree == t) {
                if g.coeffs.len() != mons.len() {
                    bail!(
                        Dimension,
                        "form of degree {t} has {} coefficients, expected {}",
                        g.coeffs.len(),
                        mons.len()
                    );
                }
                rows.push(g.coeffs.clone());
            }
            pieces.push(Subspace::from_rows(f, mons.len(), rows));
            prev_mons = mons;
        }
        Ok(GradedIdeal {
            field: f.clone(),
            nvars,
            pieces,
        })
    }

    /// The ideal of the projective subspace `P(s)`, `s ⊂ F^nvars`.
    pub fn of_subspace(s: &Subspace<F>, top: usize) -> Result<Self> {
        let gens: Vec<Form<F>> = s.basis().kernel().basis_vecs().into_iter().map(Form::linear).collect();
        Self::generated(s.field(), s.ambient(), &gens, top)
    }

    /// Ideal generated by restrictions of quadratic forms to `P(s)`, in
    /// coordinates of the basis of `s`.
    pub fn of_quadrics_on(quadrics: &[QuadraticForm<F>], s: &Subspace<F>, top: usize) -> Result<Self> {
        let mut gens = Vec::with_capacity(quadrics.len());
        for q in quadrics {
            gens.push(Form::from_quadratic(&q.restrict_to(s)?));
        }
        Self::generated(s.field(), s.dim(), &gens, top)
    }

    pub fn field(&self) -> &F {
        &self.field
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn top(&self) -> usize {
        self.pieces.len() - 1
    }

    pub fn piece(&self, t: usize) -> &Subspace<F> {
        &self.pieces[t]
    }

    /// `h(t) = dim S_t - dim I_t` for `t = 0..=top`.
    pub fn hilbert_function(&self) -> Vec<usize> {
        self.pieces.iter().map(|p| p.ambient() - p.dim()).collect()
    }

    fn check_compatible(&self, other: &Self) -> Result<usize> {
        if self.nvars != other.nvars {
            bail!(Dimension, "ideals in {} and {} variables", self.nvars, other.nvars);
        }
        Ok(self.top().min(other.top()))
    }

    /// Degree-wise intersection.
    pub fn intersect(&self, other: &Self) -> Result<Self> {
        let top = self.check_compatible(other)?;
        let mut pieces = Vec::with_capacity(top + 1);
        for t in 0..=top {
            pieces.push(self.pieces[t].intersect(&other.pieces[t])?);
        }
        Ok(GradedIdeal {
            field: self.field.clone(),
            nvars: self.nvars,
            pieces,
        })
    }

    /// Degree-wise sum.
    pub fn sum(&self, other: &Self) -> Result<Self> {
        let top = self.check_compatible(other)?;
        let mut pieces = Vec::with_capacity(top + 1);
        for t in 0..=top {
            pieces.push(self.pieces[t].sum(&other.pieces[t])?);
        }
        Ok(GradedIdeal {
            field: self.field.clone(),
            nvars: self.nvars,
            pieces,
        })
    }

    /// `I_t ⊆ J_t` for every common degree.
    pub fn contained_in(&self, other: &Self) -> Result<bool> {
        let top = self.check_compatible(other)?;
        Ok((0..=top).all(|t| other.pieces[t].contains_space(&self.pieces[t])))
    }

    /// Equality in every common degree.
    pub fn agrees_with(&self, other: &Self) -> Result<bool> {
        let top = self.check_compatible(other)?;
        Ok((0..=top).all(|t| self.pieces[t] == other.pieces[t]))
    }

    /// Whether every form of the ideal vanishes on `P(s)`.
    pub fn vanishes_on(&self, s: &Subspace<F>) -> Result<bool> {
        if s.ambient() != self.nvars {
            bail!(Dimension, "subspace of {} in {} variables", s.ambient(), self.nvars);
        }
        let lin = Self::of_subspace(s, self.top())?;
        self.contained_in(&lin)
    }

    /// `(I : J)` for `J` generated by linear forms, through degree `top - 1`.
    pub fn colon_linear(&self, linear: &[Vec<F::Elem>]) -> Result<Self> {
        let f = &self.field;
        if self.top() == 0 {
            bail!(InvalidInput, "colon needs the ideal in degree 1 at least");
        }
        if linear.iter().any(|l| l.len() != self.nvars) {
            bail!(Dimension, "linear form with the wrong number of variables");
        }
        let mut pieces = Vec::with_capacity(self.top());
        for t in 0..self.top() {
            let src = Monomials::new(self.nvars, t);
            let dst = Monomials::new(self.nvars, t + 1);
            let maps = shift_maps(&src, &dst);
            // functionals on S_{t+1} vanishing on I_{t+1}
            let ann = self.pieces[t + 1].annihilator();
            let annt = ann.basis().transpose();
            let mut block: Option<Matrix<F>> = None;
            for l in linear {
                let m = times_linear(f, l, &maps, dst.len()).mul(&annt)?;
                block = Some(match block {
                    None => m,
                    Some(b) => hstack(&b, &m),
                });
            }
            let piece = match block {
                None => Subspace::full(f, src.len()),
                Some(b) => b.transpose().kernel(),
            };
            pieces.push(piece);
        }
        Ok(GradedIdeal {
            field: f.clone(),
            nvars: self.nvars,
            pieces,
        })
    }

    /// `(I : I(P(s)))`.
    pub fn colon_subspace(&self, s: &Subspace<F>) -> Result<Self> {
        self.colon_linear(&s.basis().kernel().basis_vecs())
    }

    /// Truncation to degrees `0..=top`.
    pub fn truncate(&self, top: usize) -> Self {
        GradedIdeal {
            field: self.field.clone(),
            nvars: self.nvars,
            pieces: self.pieces[..=top.min(self.top())].to_vec(),
        }
    }
}

fn hstack<F: Field>(a: &Matrix<F>, b: &Matrix<F>) -> Matrix<F> {
    a.transpose().vstack(&b.transpose()).expect("same rows").transpose()
}

/// Binomial table `C(t + n - 1, n - 1)` for `t = 0..=top`, the Hilbert function
/// of the zero ideal.
pub fn free_table(nvars: usize, top: usize) -> Vec<usize> {
    (0..=top).map(|t| monomial_count(nvars, t)).collect()
}
