//! Univariate polynomials over an exact field.

use std::fmt;

use crate::error::{bail, Result};
use crate::field::Field;

/// Coefficients from the constant term up; no trailing zeros.
#[derive(Clone, PartialEq)]
pub struct Poly<F: Field> {
    field: F,
    coeffs: Vec<F::Elem>,
}

impl<F: Field> fmt::Debug for Poly<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let c: Vec<String> = self.coeffs.iter().map(|x| self.field.format(x)).collect();
        write!(f, "Poly[{}]", c.join(", "))
    }
}

impl<F: Field> Poly<F> {
    pub fn new(field: &F, mut coeffs: Vec<F::Elem>) -> Self {
        while coeffs.last().is_some_and(|c| field.is_zero(c)) {
            coeffs.pop();
        }
        Poly {
            field: field.clone(),
            coeffs,
        }
    }

    pub fn zero(field: &F) -> Self {
        Self::new(field, vec![])
    }

    /// `a + b t`
    pub fn linear(field: &F, a: F::Elem, b: F::Elem) -> Self {
        Self::new(field, vec![a, b])
    }

    pub fn coeffs(&self) -> &[F::Elem] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading(&self) -> Option<&F::Elem> {
        self.coeffs.last()
    }

    pub fn eval(&self, t: &F::Elem) -> F::Elem {
        let f = &self.field;
        self.coeffs
            .iter()
            .rev()
            .fold(f.zero(), |acc, c| f.add(&f.mul(&acc, t), c))
    }

    pub fn mul(&self, other: &Self) -> Self {
        let f = &self.field;
        if self.is_zero() || other.is_zero() {
            return Self::zero(f);
        }
        let mut out = vec![f.zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] = f.mul_add(&out[i + j], a, b);
            }
        }
        Self::new(f, out)
    }

    pub fn pow(&self, e: u32) -> Self {
        let f = &self.field;
        (0..e).fold(Self::new(f, vec![f.one()]), |acc, _| acc.mul(self))
    }

    /// Quotient and remainder.
    pub fn divrem(&self, d: &Self) -> Result<(Self, Self)> {
        let f = &self.field;
        let Some(dd) = d.degree() else {
            bail!(InvalidInput, "division by the zero polynomial");
        };
        let lead_inv = f.inv(d.leading().expect("nonzero")).expect("nonzero leading");
        let mut rem = self.coeffs.clone();
        let n = self.coeffs.len();
        if n <= dd {
            return Ok((Self::zero(f), self.clone()));
        }
        let mut quot = vec![f.zero(); n - dd];
        for k in (0..n - dd).rev() {
            let c = f.mul(&rem[k + dd], &lead_inv);
            if f.is_zero(&c) {
                continue;
            }
            for (j, dj) in d.coeffs.iter().enumerate() {
                rem[k + j] = f.sub(&rem[k + j], &f.mul(&c, dj));
            }
            quot[k] = c;
        }
        rem.truncate(dd);
        Ok((Self::new(f, quot), Self::new(f, rem)))
    }

    /// Scaled so the leading coefficient is 1.
    pub fn monic(&self) -> Self {
        let f = &self.field;
        match self.leading() {
            None => self.clone(),
            Some(l) => {
                let inv = f.inv(l).expect("nonzero");
                Self::new(f, self.coeffs.iter().map(|c| f.mul(c, &inv)).collect())
            }
        }
    }

    /// Newton interpolation through the points `(xs[i], ys[i])` with distinct `xs`.
    pub fn interpolate(field: &F, xs: &[F::Elem], ys: &[F::Elem]) -> Result<Self> {
        let f = field;
        if xs.len() != ys.len() {
            bail!(Dimension, "{} nodes and {} values", xs.len(), ys.len());
        }
        let n = xs.len();
        let mut dd = ys.to_vec();
        for j in 1..n {
            for i in (j..n).rev() {
                let den = f.sub(&xs[i], &xs[i - j]);
                let Some(inv) = f.inv(&den) else {
                    bail!(InvalidInput, "repeated interpolation node");
                };
                dd[i] = f.mul(&f.sub(&dd[i], &dd[i - 1]), &inv);
            }
        }
        let mut acc = Self::zero(f);
        for i in (0..n).rev() {
            let shift = Self::linear(f, f.neg(&xs[i]), f.one());
            acc = acc.mul(&shift);
            let mut c = acc.coeffs.clone();
            if c.is_empty() {
                c.push(f.zero());
            }
            c[0] = f.add(&c[0], &dd[i]);
            acc = Self::new(f, c);
        }
        Ok(acc)
    }

    /// Roots in a finite field with their multiplicities, in element order.
    pub fn roots(&self) -> Result<Vec<(F::Elem, usize)>> {
        let f = &self.field;
        let Some(q) = f.order() else {
            bail!(UnsupportedField, "root enumeration needs a finite field");
        };
        if self.is_zero() {
            bail!(InvalidInput, "every element is a root of the zero polynomial");
        }
        let mut out = Vec::new();
        for i in 0..q {
            let r = f.element(i);
            let mut m = 0;
            let mut cur = self.clone();
            let lin = Self::linear(f, f.neg(&r), f.one());
            while !cur.is_zero() && f.is_zero(&cur.eval(&r)) {
                cur = cur.divrem(&lin)?.0;
                m += 1;
            }
            if m > 0 {
                out.push((r, m));
            }
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{PrimeField, Rationals};

    #[test]
    fn interpolation_recovers_polynomial() {
        let f = PrimeField::new(13).unwrap();
        let p = Poly::new(&f, vec![3, 0, 5, 1, 12]);
        let xs: Vec<u64> = (0..7).collect();
        let ys: Vec<u64> = xs.iter().map(|x| p.eval(x)).collect();
        assert_eq!(Poly::interpolate(&f, &xs, &ys).unwrap(), p);
    }

    #[test]
    fn division_is_exact_for_products() {
        let q = Rationals;
        let a = Poly::new(&q, vec![q.from_i64(1), q.from_i64(2), q.from_i64(-3)]);
        let b = Poly::linear(&q, q.from_i64(5), q.from_i64(7));
        let (quot, rem) = a.mul(&b.pow(2)).divrem(&b.pow(2)).unwrap();
        assert!(rem.is_zero());
        assert_eq!(quot, a);
        let (_, rem) = a.divrem(&b).unwrap();
        assert_eq!(rem.degree(), Some(0));
    }

    #[test]
    fn roots_with_multiplicity() {
        let f = PrimeField::new(7).unwrap();
        // (t-2)^3 (t-5) (t^2 + 1), and t^2+1 has no roots mod 7
        let p = Poly::linear(&f, 5, 1)
            .pow(3)
            .mul(&Poly::linear(&f, 2, 1))
            .mul(&Poly::new(&f, vec![1, 0, 1]));
        assert_eq!(p.roots().unwrap(), vec![(2, 3), (5, 1)]);
    }
}
