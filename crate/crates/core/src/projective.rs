//! Enumeration of projective spaces over finite fields.
//!
//! Points are represented by vectors whose first nonzero entry is 1. They are
//! ordered lexicographically with respect to the field's element order, and
//! every point has an index in `0..count`, so a scan can be split into
//! contiguous index ranges.

use crate::error::{bail, Result};
use crate::field::Field;

#[derive(Debug, Clone)]
pub struct ProjectiveSpace<F: Field> {
    field: F,
    n: usize,
    q: u64,
}

impl<F: Field> ProjectiveSpace<F> {
    /// Projectivization of `F^n`.
    pub fn new(field: &F, n: usize) -> Result<Self> {
        let Some(q) = field.order() else {
            bail!(UnsupportedField, "enumeration over an infinite field");
        };
        if n == 0 {
            bail!(InvalidInput, "projectivization of the zero space");
        }
        Ok(ProjectiveSpace {
            field: field.clone(),
            n,
            q,
        })
    }

    pub fn vector_dim(&self) -> usize {
        self.n
    }

    /// `(q^n - 1)/(q - 1)`
    pub fn count(&self) -> u128 {
        point_count(self.q, self.n)
    }

    /// The point with the given index.
    pub fn point(&self, index: u128) -> Vec<F::Elem> {
        let f = &self.field;
        let q = self.q as u128;
        let mut idx = index;
        let mut block = 1u128;
        for lead in (0..self.n).rev() {
            if idx < block {
                let mut v = vec![f.zero(); self.n];
                v[lead] = f.one();
                let mut rest = idx;
                for c in (lead + 1..self.n).rev() {
                    v[c] = f.element((rest % q) as u64);
                    rest /= q;
                }
                return v;
            }
            idx -= block;
            block *= q;
        }
        panic!("point index {index} out of range");
    }

    /// Index of a normalized point.
    pub fn index_of(&self, v: &[F::Elem]) -> Option<u128> {
        let f = &self.field;
        let q = self.q as u128;
        let lead = v.iter().position(|x| !f.is_zero(x))?;
        if !f.is_one(&v[lead]) {
            return None;
        }
        let mut offset = 0u128;
        let mut block = 1u128;
        for _ in (lead + 1..self.n).rev() {
            offset += block;
            block *= q;
        }
        let mut digits = 0u128;
        for x in &v[lead + 1..] {
            digits = digits * q + f.index_of(x)? as u128;
        }
        Some(offset + digits)
    }

    /// Points with indices in `start..end`, in order.
    pub fn range(&self, start: u128, end: u128) -> impl Iterator<Item = Vec<F::Elem>> + '_ {
        (start..end.min(self.count())).map(move |i| self.point(i))
    }

    pub fn iter(&self) -> impl Iterator<Item = Vec<F::Elem>> + '_ {
        self.range(0, self.count())
    }
}

pub fn point_count(q: u64, n: usize) -> u128 {
    let q = q as u128;
    (0..n).map(|i| q.pow(i as u32)).sum()
}

/// Splits `0..count` into at most `chunks` contiguous ranges.
pub fn chunk_ranges(count: u128, chunks: usize) -> Vec<(u128, u128)> {
    let chunks = (chunks.max(1) as u128).min(count.max(1));
    let size = count.div_ceil(chunks);
    (0..chunks)
        .map(|i| (i * size, ((i + 1) * size).min(count)))
        .filter(|(a, b)| a < b)
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{PrimeField, QuadExt};

    #[test]
    fn counts_and_order() {
        let f = PrimeField::new(3).unwrap();
        let p5 = ProjectiveSpace::new(&f, 6).unwrap();
        assert_eq!(p5.count(), 364);
        let pts: Vec<Vec<u64>> = p5.iter().collect();
        assert_eq!(pts.len(), 364);
        assert!(pts.windows(2).all(|w| w[0] < w[1]));
        for (i, p) in pts.iter().enumerate() {
            assert_eq!(p5.index_of(p), Some(i as u128));
            let lead = p.iter().find(|&&x| x != 0).unwrap();
            assert_eq!(*lead, 1);
        }
    }

    #[test]
    fn extension_enumeration() {
        let e = QuadExt::new(3).unwrap();
        let p = ProjectiveSpace::new(&e, 3).unwrap();
        assert_eq!(p.count(), 91);
        for i in 0..91 {
            assert_eq!(p.index_of(&p.point(i)), Some(i));
        }
    }

    #[test]
    fn chunks_cover() {
        let r = chunk_ranges(100, 7);
        assert_eq!(r.first().unwrap().0, 0);
        assert_eq!(r.last().unwrap().1, 100);
        assert!(r.windows(2).all(|w| w[0].1 == w[1].0));
        assert_eq!(chunk_ranges(3, 10).len(), 3);
    }
}
