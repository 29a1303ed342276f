//! Exact fields: the rationals, prime fields F_p and their quadratic extensions.

use std::fmt::{self, Debug};
use std::hash::Hash;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rand::Rng;

use crate::error::{bail, Error, Result};

/// Which field a computation runs over.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FieldSpec {
    Rationals,
    Prime(u64),
    PrimeSquare(u64),
}

impl fmt::Display for FieldSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FieldSpec::Rationals => write!(f, "rationals"),
            FieldSpec::Prime(p) => write!(f, "prime:{p}"),
            FieldSpec::PrimeSquare(p) => write!(f, "prime_square:{p}"),
        }
    }
}

impl FromStr for FieldSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s == "rationals" || s == "Q" {
            return Ok(FieldSpec::Rationals);
        }
        let parse_p = |t: &str| -> Result<u64> {
            let p: u64 = t.parse().map_err(|_| Error::Parse(format!("bad modulus '{t}'")))?;
            check_modulus(p)?;
            Ok(p)
        };
        if let Some(rest) = s.strip_prefix("prime_square:") {
            return Ok(FieldSpec::PrimeSquare(parse_p(rest)?));
        }
        if let Some(rest) = s.strip_prefix("prime:") {
            return Ok(FieldSpec::Prime(parse_p(rest)?));
        }
        Ok(FieldSpec::Prime(parse_p(s)?))
    }
}

impl FieldSpec {
    /// Number of elements, `None` for the rationals.
    pub fn order(&self) -> Option<u64> {
        match *self {
            FieldSpec::Rationals => None,
            FieldSpec::Prime(p) => Some(p),
            FieldSpec::PrimeSquare(p) => Some(p * p),
        }
    }
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

fn check_modulus(p: u64) -> Result<()> {
    if !is_prime(p) {
        bail!(UnsupportedField, "{p} is not prime");
    }
    if p == 2 {
        bail!(UnsupportedField, "characteristic 2 is excluded");
    }
    if p >= 1 << 31 {
        bail!(UnsupportedField, "modulus {p} exceeds 2^31");
    }
    Ok(())
}

/// Arithmetic of an exact field. Elements are plain values; the field object
/// carries the modulus.
pub trait Field: Clone + Debug + PartialEq + Send + Sync + 'static {
    type Elem: Clone + Debug + PartialEq + Eq + Hash + Send + Sync + 'static;

    fn spec(&self) -> FieldSpec;
    fn zero(&self) -> Self::Elem;
    fn one(&self) -> Self::Elem;
    fn from_i64(&self, n: i64) -> Self::Elem;
    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn sub(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn neg(&self, a: &Self::Elem) -> Self::Elem;
    fn inv(&self, a: &Self::Elem) -> Option<Self::Elem>;
    fn is_zero(&self, a: &Self::Elem) -> bool;
    fn random<R: Rng + ?Sized>(&self, rng: &mut R) -> Self::Elem;
    /// Field size for finite fields.
    fn order(&self) -> Option<u64>;
    /// The `index`-th element in the canonical enumeration (0 and 1 come first).
    fn element(&self, index: u64) -> Self::Elem;
    /// Inverse of [`Field::element`] for finite fields.
    fn index_of(&self, a: &Self::Elem) -> Option<u64>;
    fn sqrt(&self, a: &Self::Elem) -> Result<Option<Self::Elem>>;
    fn format(&self, a: &Self::Elem) -> String;
    fn parse(&self, s: &str) -> Result<Self::Elem>;

    fn is_one(&self, a: &Self::Elem) -> bool {
        *a == self.one()
    }

    fn div(&self, a: &Self::Elem, b: &Self::Elem) -> Option<Self::Elem> {
        self.inv(b).map(|bi| self.mul(a, &bi))
    }

    fn pow(&self, a: &Self::Elem, mut e: u64) -> Self::Elem {
        let mut base = a.clone();
        let mut acc = self.one();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(&acc, &base);
            }
            base = self.mul(&base, &base);
            e >>= 1;
        }
        acc
    }

    /// `a + b*c`
    fn mul_add(&self, a: &Self::Elem, b: &Self::Elem, c: &Self::Elem) -> Self::Elem {
        self.add(a, &self.mul(b, c))
    }
}

/// Fields that come with a chosen quadratic extension.
pub trait QuadraticClosure: Field {
    type Ext: Field;
    fn extension(&self) -> Self::Ext;
    fn embed(&self, a: &Self::Elem) -> <Self::Ext as Field>::Elem;
}

/// Square roots in a finite field of odd order.
fn tonelli_shanks<F: Field>(f: &F, a: &F::Elem) -> Option<F::Elem> {
    if f.is_zero(a) {
        return Some(f.zero());
    }
    let q = f.order().expect("finite field");
    let half = (q - 1) / 2;
    if !f.is_one(&f.pow(a, half)) {
        return None;
    }
    let mut s = q - 1;
    let mut e = 0u32;
    while s % 2 == 0 {
        s /= 2;
        e += 1;
    }
    let minus_one = f.neg(&f.one());
    let z = (2..q)
        .map(|i| f.element(i))
        .find(|z| f.pow(z, half) == minus_one)
        .expect("odd-order field has a non-residue");
    let mut m = e;
    let mut c = f.pow(&z, s);
    let mut t = f.pow(a, s);
    let mut r = f.pow(a, s.div_ceil(2));
    while !f.is_one(&t) {
        let mut i = 0;
        let mut t2 = t.clone();
        while !f.is_one(&t2) {
            t2 = f.mul(&t2, &t2);
            i += 1;
        }
        let mut b = c.clone();
        for _ in 0..(m - i - 1) {
            b = f.mul(&b, &b);
        }
        m = i;
        c = f.mul(&b, &b);
        t = f.mul(&t, &c);
        r = f.mul(&r, &b);
    }
    Some(r)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PrimeField {
    p: u64,
}

impl PrimeField {
    pub fn new(p: u64) -> Result<Self> {
        check_modulus(p)?;
        Ok(PrimeField { p })
    }

    pub fn modulus(&self) -> u64 {
        self.p
    }

    pub fn is_square(&self, a: u64) -> bool {
        a == 0 || self.pow(&a, (self.p - 1) / 2) == 1
    }

    /// Smallest positive non-square, the fixed generator of the quadratic extension.
    pub fn smallest_nonsquare(&self) -> u64 {
        (2..self.p).find(|&a| !self.is_square(a)).expect("p >= 3")
    }
}

impl Field for PrimeField {
    type Elem = u64;

    fn spec(&self) -> FieldSpec {
        FieldSpec::Prime(self.p)
    }
    #[inline]
    fn zero(&self) -> u64 {
        0
    }
    #[inline]
    fn one(&self) -> u64 {
        1
    }
    fn from_i64(&self, n: i64) -> u64 {
        n.rem_euclid(self.p as i64) as u64
    }
    #[inline]
    fn add(&self, a: &u64, b: &u64) -> u64 {
        let s = a + b;
        if s >= self.p {
            s - self.p
        } else {
            s
        }
    }
    #[inline]
    fn sub(&self, a: &u64, b: &u64) -> u64 {
        if a >= b {
            a - b
        } else {
            a + self.p - b
        }
    }
    #[inline]
    fn mul(&self, a: &u64, b: &u64) -> u64 {
        a * b % self.p
    }
    #[inline]
    fn neg(&self, a: &u64) -> u64 {
        if *a == 0 {
            0
        } else {
            self.p - a
        }
    }
    fn inv(&self, a: &u64) -> Option<u64> {
        if *a == 0 {
            return None;
        }
        let (mut r0, mut r1) = (self.p as i64, *a as i64);
        let (mut t0, mut t1) = (0i64, 1i64);
        while r1 != 0 {
            let q = r0 / r1;
            (r0, r1) = (r1, r0 - q * r1);
            (t0, t1) = (t1, t0 - q * t1);
        }
        Some(t0.rem_euclid(self.p as i64) as u64)
    }
    #[inline]
    fn is_zero(&self, a: &u64) -> bool {
        *a == 0
    }
    fn random<R: Rng + ?Sized>(&self, rng: &mut R) -> u64 {
        rng.gen_range(0..self.p)
    }
    fn order(&self) -> Option<u64> {
        Some(self.p)
    }
    fn element(&self, index: u64) -> u64 {
        index % self.p
    }
    fn index_of(&self, a: &u64) -> Option<u64> {
        Some(*a)
    }
    fn sqrt(&self, a: &u64) -> Result<Option<u64>> {
        Ok(tonelli_shanks(self, a))
    }
    fn format(&self, a: &u64) -> String {
        a.to_string()
    }
    fn parse(&self, s: &str) -> Result<u64> {
        let n: i64 = s
            .trim()
            .parse()
            .map_err(|_| Error::Parse(format!("bad element '{s}' for F_{}", self.p)))?;
        Ok(self.from_i64(n))
    }
}

impl QuadraticClosure for PrimeField {
    type Ext = QuadExt;
    fn extension(&self) -> QuadExt {
        QuadExt::new(self.p).expect("modulus already validated")
    }
    fn embed(&self, a: &u64) -> Fp2 {
        Fp2 { a: *a, b: 0 }
    }
}

/// Element `a + b*w` of F_{p^2}, with `w^2` the fixed non-square.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Fp2 {
    pub a: u64,
    pub b: u64,
}

/// F_{p^2} = F_p[w]/(w^2 - n) with n the smallest positive non-square of F_p.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct QuadExt {
    base: PrimeField,
    n: u64,
}

impl QuadExt {
    pub fn new(p: u64) -> Result<Self> {
        let base = PrimeField::new(p)?;
        Ok(QuadExt {
            base,
            n: base.smallest_nonsquare(),
        })
    }

    pub fn base(&self) -> PrimeField {
        self.base
    }

    /// The non-square `w^2`.
    pub fn generator_square(&self) -> u64 {
        self.n
    }

    /// Generator `w`.
    pub fn w(&self) -> Fp2 {
        Fp2 { a: 0, b: 1 }
    }

    /// Galois conjugate `a - b*w`.
    pub fn conj(&self, x: &Fp2) -> Fp2 {
        Fp2 {
            a: x.a,
            b: self.base.neg(&x.b),
        }
    }

    /// The element lies in the prime subfield.
    pub fn in_base(&self, x: &Fp2) -> bool {
        x.b == 0
    }
}

impl Field for QuadExt {
    type Elem = Fp2;

    fn spec(&self) -> FieldSpec {
        FieldSpec::PrimeSquare(self.base.p)
    }
    fn zero(&self) -> Fp2 {
        Fp2 { a: 0, b: 0 }
    }
    fn one(&self) -> Fp2 {
        Fp2 { a: 1, b: 0 }
    }
    fn from_i64(&self, n: i64) -> Fp2 {
        Fp2 {
            a: self.base.from_i64(n),
            b: 0,
        }
    }
    fn add(&self, x: &Fp2, y: &Fp2) -> Fp2 {
        let f = &self.base;
        Fp2 {
            a: f.add(&x.a, &y.a),
            b: f.add(&x.b, &y.b),
        }
    }
    fn sub(&self, x: &Fp2, y: &Fp2) -> Fp2 {
        let f = &self.base;
        Fp2 {
            a: f.sub(&x.a, &y.a),
            b: f.sub(&x.b, &y.b),
        }
    }
    fn mul(&self, x: &Fp2, y: &Fp2) -> Fp2 {
        let p = self.base.p;
        let bd = x.b * y.b % p;
        Fp2 {
            a: (x.a * y.a + bd * self.n) % p,
            b: (x.a * y.b + x.b * y.a) % p,
        }
    }
    fn neg(&self, x: &Fp2) -> Fp2 {
        Fp2 {
            a: self.base.neg(&x.a),
            b: self.base.neg(&x.b),
        }
    }
    fn inv(&self, x: &Fp2) -> Option<Fp2> {
        let f = &self.base;
        // (a + bw)(a - bw) = a^2 - n b^2 lies in F_p
        let norm = f.sub(&f.mul(&x.a, &x.a), &f.mul(&self.n, &f.mul(&x.b, &x.b)));
        let ni = f.inv(&norm)?;
        Some(Fp2 {
            a: f.mul(&x.a, &ni),
            b: f.mul(&f.neg(&x.b), &ni),
        })
    }
    fn is_zero(&self, x: &Fp2) -> bool {
        x.a == 0 && x.b == 0
    }
    fn random<R: Rng + ?Sized>(&self, rng: &mut R) -> Fp2 {
        Fp2 {
            a: self.base.random(rng),
            b: self.base.random(rng),
        }
    }
    fn order(&self) -> Option<u64> {
        Some(self.base.p * self.base.p)
    }
    fn element(&self, index: u64) -> Fp2 {
        let p = self.base.p;
        let i = index % (p * p);
        Fp2 { a: i % p, b: i / p }
    }
    fn index_of(&self, x: &Fp2) -> Option<u64> {
        Some(x.a + x.b * self.base.p)
    }
    fn sqrt(&self, a: &Fp2) -> Result<Option<Fp2>> {
        Ok(tonelli_shanks(self, a))
    }
    fn format(&self, x: &Fp2) -> String {
        if x.b == 0 {
            x.a.to_string()
        } else {
            format!("{}+{}w", x.a, x.b)
        }
    }
    fn parse(&self, s: &str) -> Result<Fp2> {
        let s = s.trim();
        if let Some(body) = s.strip_suffix('w') {
            let (a, b) = match body.rsplit_once('+') {
                Some((a, b)) => (a, b),
                None => ("0", body),
            };
            let b = if b.is_empty() { "1" } else { b };
            return Ok(Fp2 {
                a: self.base.parse(a)?,
                b: self.base.parse(b)?,
            });
        }
        Ok(Fp2 {
            a: self.base.parse(s)?,
            b: 0,
        })
    }
}

/// The field of rational numbers with arbitrary-precision fractions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Rationals;

impl Field for Rationals {
    type Elem = BigRational;

    fn spec(&self) -> FieldSpec {
        FieldSpec::Rationals
    }
    fn zero(&self) -> BigRational {
        BigRational::zero()
    }
    fn one(&self) -> BigRational {
        BigRational::one()
    }
    fn from_i64(&self, n: i64) -> BigRational {
        BigRational::from_integer(BigInt::from(n))
    }
    fn add(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a + b
    }
    fn sub(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a - b
    }
    fn mul(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a * b
    }
    fn neg(&self, a: &BigRational) -> BigRational {
        -a
    }
    fn inv(&self, a: &BigRational) -> Option<BigRational> {
        if a.is_zero() {
            None
        } else {
            Some(a.recip())
        }
    }
    fn is_zero(&self, a: &BigRational) -> bool {
        a.is_zero()
    }
    /// Small fractions with numerator in [-9, 9] and denominator in [1, 4].
    fn random<R: Rng + ?Sized>(&self, rng: &mut R) -> BigRational {
        let n: i64 = rng.gen_range(-9..=9);
        let d: i64 = rng.gen_range(1..=4);
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }
    fn order(&self) -> Option<u64> {
        None
    }
    /// Enumerates the integers 0, 1, -1, 2, -2, ...
    fn element(&self, index: u64) -> BigRational {
        let k = index.div_ceil(2) as i64;
        self.from_i64(if index % 2 == 1 { k } else { -k })
    }
    fn index_of(&self, _a: &BigRational) -> Option<u64> {
        None
    }
    fn sqrt(&self, _a: &BigRational) -> Result<Option<BigRational>> {
        bail!(UnsupportedField, "square roots over the rationals")
    }
    fn format(&self, a: &BigRational) -> String {
        a.to_string()
    }
    fn parse(&self, s: &str) -> Result<BigRational> {
        let s = s.trim();
        let bad = || Error::Parse(format!("bad rational '{s}'"));
        let r = match s.split_once('/') {
            Some((n, d)) => {
                let n: BigInt = n.parse().map_err(|_| bad())?;
                let d: BigInt = d.parse().map_err(|_| bad())?;
                if d.is_zero() {
                    return Err(bad());
                }
                BigRational::new(n, d)
            }
            None => BigRational::from_integer(s.parse().map_err(|_| bad())?),
        };
        Ok(r)
    }
}

/// Reduce a rational modulo p; `None` when p divides the denominator.
pub fn reduce_rational(r: &BigRational, f: &PrimeField) -> Option<u64> {
    let p = BigInt::from(f.modulus());
    let m = |x: &BigInt| -> u64 {
        let r = ((x % &p) + &p) % &p;
        r.abs().to_string().parse().expect("fits")
    };
    let num = m(r.numer());
    let den = m(r.denom());
    f.inv(&den).map(|di| f.mul(&num, &di))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn spec_roundtrip() {
        for s in [FieldSpec::Rationals, FieldSpec::Prime(7), FieldSpec::PrimeSquare(11)] {
            assert_eq!(s.to_string().parse::<FieldSpec>().unwrap(), s);
        }
        assert!("prime:2".parse::<FieldSpec>().is_err());
        assert!("prime:9".parse::<FieldSpec>().is_err());
        assert_eq!("13".parse::<FieldSpec>().unwrap(), FieldSpec::Prime(13));
    }

    #[test]
    fn prime_inverse_and_sqrt() {
        let f = PrimeField::new(7).unwrap();
        for a in 1..7 {
            assert_eq!(f.mul(&a, &f.inv(&a).unwrap()), 1);
        }
        assert_eq!(f.sqrt(&0).unwrap(), Some(0));
        let r = f.sqrt(&4).unwrap().unwrap();
        assert!(r == 2 || r == 5);
        assert_eq!(f.sqrt(&3).unwrap(), None);
    }

    #[test]
    fn nonsquare_has_root_in_extension() {
        // squares of F_7 are {1,2,4}
        let f = PrimeField::new(7).unwrap();
        let squares: Vec<u64> = (1..7).map(|x| x * x % 7).collect();
        assert!(!squares.contains(&3));
        let e = f.extension();
        for a in 0..7u64 {
            let x = f.embed(&a);
            let r = e.sqrt(&x).unwrap().expect("every F_p element is a square in F_p^2");
            assert_eq!(e.mul(&r, &r), x);
        }
    }

    #[test]
    fn extension_axioms() {
        let e = QuadExt::new(11).unwrap();
        assert_eq!(e.generator_square(), 2);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..200 {
            let (x, y, z) = (e.random(&mut rng), e.random(&mut rng), e.random(&mut rng));
            assert_eq!(e.mul(&x, &e.add(&y, &z)), e.add(&e.mul(&x, &y), &e.mul(&x, &z)));
            if !e.is_zero(&x) {
                assert_eq!(e.mul(&x, &e.inv(&x).unwrap()), e.one());
            }
            assert_eq!(e.parse(&e.format(&x)).unwrap(), x);
            assert_eq!(e.element(e.index_of(&x).unwrap()), x);
        }
        let w = e.w();
        assert_eq!(e.mul(&w, &w), e.from_i64(2));
    }

    #[test]
    fn extension_sqrt_everywhere() {
        let e = QuadExt::new(5).unwrap();
        let mut squares = 0;
        for i in 0..25 {
            let x = e.element(i);
            if let Some(r) = e.sqrt(&x).unwrap() {
                assert_eq!(e.mul(&r, &r), x);
                squares += 1;
            }
        }
        assert_eq!(squares, 13);
    }

    #[test]
    fn rationals_format_and_parse() {
        let q = Rationals;
        let x = q.parse("3/7").unwrap();
        assert_eq!(q.format(&x), "3/7");
        assert_eq!(q.format(&q.parse("-4/2").unwrap()), "-2");
        assert!(q.sqrt(&x).is_err());
        assert!(q.parse("1/0").is_err());
        let f = PrimeField::new(7).unwrap();
        assert_eq!(reduce_rational(&x, &f), None);
    }

    #[test]
    fn rational_reduction() {
        let q = Rationals;
        let f = PrimeField::new(11).unwrap();
        let x = q.parse("3/7").unwrap();
        let r = reduce_rational(&x, &f).unwrap();
        assert_eq!(f.mul(&r, &7), 3);
        assert_eq!(reduce_rational(&q.parse("-1/2").unwrap(), &f), Some(5));
        assert_eq!(reduce_rational(&q.parse("1/11").unwrap(), &f), None);
    }
}
