//! Arithmetic in GF(p^s) in the coordinate representation.
//!
//! An element is a digit vector `(d_0, ..., d_{s-1})` over `Z_p`. Its index
//! `d_0 + d_1 p + ... + d_{s-1} p^{s-1}` is the canonical integer label used by
//! every table in the crate. Addition is digit-wise; multiplication treats the
//! digits as polynomial coefficients reduced modulo a monic irreducible
//! polynomial of degree `s`.

use std::fmt;

use crate::error::{Error, Result};

/// An element of GF(p^s).
///
/// Stores the element's index together with `(p, s)` so that operands from
/// different fields are caught instead of silently combined.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GfElement {
    p: u16,
    s: u16,
    index: u32,
}

impl GfElement {
    pub fn index(self) -> usize {
        self.index as usize
    }

    pub fn p(self) -> u32 {
        self.p as u32
    }

    pub fn s(self) -> usize {
        self.s as usize
    }

    /// Little-endian digits: digit `l` multiplies `p^l` in the index.
    pub fn digits(self) -> Vec<u32> {
        let p = self.p as u32;
        let mut rest = self.index;
        (0..self.s)
            .map(|_| {
                let d = rest % p;
                rest /= p;
                d
            })
            .collect()
    }

    pub fn is_zero(self) -> bool {
        self.index == 0
    }

    /// The trivial absolute value: 1 for nonzero elements, 0 for zero.
    pub fn modulus(self) -> u32 {
        u32::from(!self.is_zero())
    }

    /// Space-separated digit string `"d0 d1 ... d(s-1)"`.
    pub fn to_text(self) -> String {
        self.digits().iter().map(|d| d.to_string()).collect::<Vec<_>>().join(" ")
    }
}

impl fmt::Display for GfElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({})", self.to_text())
    }
}

pub fn is_prime(n: u32) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

// Polynomials over Z_p as little-endian coefficient vectors.

fn poly_trim(mut a: Vec<u32>) -> Vec<u32> {
    while a.last() == Some(&0) {
        a.pop();
    }
    a
}

fn poly_rem(a: &[u32], m: &[u32], p: u32) -> Vec<u32> {
    // m is monic
    let deg_m = m.len() - 1;
    let mut r = a.to_vec();
    while r.len() > deg_m {
        let lead = *r.last().unwrap();
        let shift = r.len() - 1 - deg_m;
        if lead != 0 {
            for (i, &c) in m.iter().enumerate() {
                r[shift + i] = (r[shift + i] + p - (lead * c) % p) % p;
            }
        }
        r.pop();
    }
    r
}

fn poly_mul(a: &[u32], b: &[u32], p: u32) -> Vec<u32> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![0u32; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        for (j, &y) in b.iter().enumerate() {
            out[i + j] = (out[i + j] + x * y) % p;
        }
    }
    out
}

/// Exhaustive trial division by every monic polynomial of degree `1..=deg/2`.
pub fn is_irreducible(poly: &[u32], p: u32) -> bool {
    let poly = poly_trim(poly.to_vec());
    if poly.len() < 2 || *poly.last().unwrap() != 1 {
        return false;
    }
    let deg = poly.len() - 1;
    for d in 1..=deg / 2 {
        let count = (p as usize).pow(d as u32);
        for low in 0..count {
            let mut divisor = Vec::with_capacity(d + 1);
            let mut rest = low;
            for _ in 0..d {
                divisor.push((rest % p as usize) as u32);
                rest /= p as usize;
            }
            divisor.push(1);
            if poly_trim(poly_rem(&poly, &divisor, p)).is_empty() {
                return false;
            }
        }
    }
    true
}

/// The first monic irreducible polynomial of degree `s` in lexicographic order
/// of its coefficients (constant term varies fastest). For `(2, 2)` this is
/// `t^2 + t + 1`; for `s = 1` it is `t`.
pub fn default_reduction_poly(p: u32, s: usize) -> Option<Vec<u32>> {
    let count = (p as usize).checked_pow(s as u32)?;
    (0..count).find_map(|low| {
        let mut poly = Vec::with_capacity(s + 1);
        let mut rest = low;
        for _ in 0..s {
            poly.push((rest % p as usize) as u32);
            rest /= p as usize;
        }
        poly.push(1);
        is_irreducible(&poly, p).then_some(poly)
    })
}

/// Parameters of GF(p^s).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FieldParams {
    pub p: u32,
    pub s: usize,
    /// Monic, little-endian, degree `s`. Only multiplication needs it.
    pub reduction_poly: Option<Vec<u32>>,
}

/// GF(p^s) with precomputed operation tables over element indices.
#[derive(Clone, Debug)]
pub struct GaloisField {
    params: FieldParams,
    order: usize,
    add: Vec<u32>,
    neg: Vec<u32>,
    dot: Vec<u32>,
    mul: Option<Vec<u32>>,
}

impl PartialEq for GaloisField {
    fn eq(&self, other: &Self) -> bool {
        self.params == other.params
    }
}

/// Largest field order accepted; tables are `order^2` entries each.
pub const MAX_ORDER: usize = 1 << 12;

impl GaloisField {
    pub fn new(params: FieldParams) -> Result<Self> {
        let FieldParams { p, s, .. } = params;
        if !is_prime(p) || p > u16::MAX as u32 {
            return Err(Error::Configuration(format!("p = {p} is not a supported prime")));
        }
        if s == 0 {
            return Err(Error::Configuration("extension degree s must be at least 1".into()));
        }
        let order = (p as usize)
            .checked_pow(s as u32)
            .filter(|&q| q <= MAX_ORDER)
            .ok_or_else(|| Error::Configuration(format!("field order {p}^{s} is too large")))?;
        if let Some(poly) = &params.reduction_poly {
            if poly.len() != s + 1 || poly[s] != 1 || poly.iter().any(|&c| c >= p) {
                return Err(Error::Configuration(format!(
                    "reduction polynomial {poly:?} is not monic of degree {s} over Z_{p}"
                )));
            }
            if !is_irreducible(poly, p) {
                return Err(Error::Configuration(format!("reduction polynomial {poly:?} is reducible over Z_{p}")));
            }
        }

        let digits: Vec<Vec<u32>> = (0..order).map(|i| index_to_digits(i, p, s)).collect();
        let to_index = |d: &[u32]| digits_to_index(d, p);

        let mut add = vec![0u32; order * order];
        let mut dot = vec![0u32; order * order];
        let mut neg = vec![0u32; order];
        for i in 0..order {
            let ni: Vec<u32> = digits[i].iter().map(|&d| (p - d) % p).collect();
            neg[i] = to_index(&ni) as u32;
            for j in 0..order {
                let sum: Vec<u32> = digits[i].iter().zip(&digits[j]).map(|(&a, &b)| (a + b) % p).collect();
                add[i * order + j] = to_index(&sum) as u32;
                dot[i * order + j] = digits[i].iter().zip(&digits[j]).fold(0, |acc, (&a, &b)| (acc + a * b) % p);
            }
        }

        let mul = params.reduction_poly.as_ref().map(|poly| {
            let mut table = vec![0u32; order * order];
            for i in 0..order {
                for j in 0..order {
                    let prod = poly_rem(&poly_mul(&digits[i], &digits[j], p), poly, p);
                    let mut prod = poly_trim(prod);
                    prod.resize(s, 0);
                    table[i * order + j] = to_index(&prod) as u32;
                }
            }
            table
        });

        Ok(Self { params, order, add, neg, dot, mul })
    }

    /// GF(p^s) with the default reduction polynomial.
    pub fn with_default_poly(p: u32, s: usize) -> Result<Self> {
        if !is_prime(p) {
            return Err(Error::Configuration(format!("p = {p} is not prime")));
        }
        let reduction_poly = default_reduction_poly(p, s);
        Self::new(FieldParams { p, s, reduction_poly })
    }

    /// Additive structure only; `mul` reports a configuration error.
    pub fn additive(p: u32, s: usize) -> Result<Self> {
        Self::new(FieldParams { p, s, reduction_poly: None })
    }

    pub fn params(&self) -> &FieldParams {
        &self.params
    }

    pub fn p(&self) -> u32 {
        self.params.p
    }

    pub fn s(&self) -> usize {
        self.params.s
    }

    /// `p^s`.
    pub fn order(&self) -> usize {
        self.order
    }

    fn make(&self, index: usize) -> GfElement {
        GfElement { p: self.params.p as u16, s: self.params.s as u16, index: index as u32 }
    }

    pub fn zero(&self) -> GfElement {
        self.make(0)
    }

    pub fn one(&self) -> GfElement {
        self.make(1)
    }

    pub fn from_index(&self, index: usize) -> Result<GfElement> {
        if index >= self.order {
            return Err(Error::Range { index, bound: self.order });
        }
        Ok(self.make(index))
    }

    pub fn from_digits(&self, digits: &[u32]) -> Result<GfElement> {
        if digits.len() != self.s() {
            return Err(Error::Parameter(format!("expected {} digits, got {}", self.s(), digits.len())));
        }
        if let Some(&d) = digits.iter().find(|&&d| d >= self.p()) {
            return Err(Error::Parameter(format!("digit {d} is not in Z_{}", self.p())));
        }
        Ok(self.make(digits_to_index(digits, self.p())))
    }

    /// Parses the `"d0 d1 ... d(s-1)"` text form.
    pub fn parse_element(&self, text: &str) -> Result<GfElement> {
        let digits = text
            .split_whitespace()
            .map(|t| t.parse::<u32>())
            .collect::<std::result::Result<Vec<_>, _>>()
            .map_err(|e| Error::Parameter(format!("bad digit in {text:?}: {e}")))?;
        self.from_digits(&digits)
    }

    pub fn elements(&self) -> impl Iterator<Item = GfElement> + '_ {
        (0..self.order).map(|i| self.make(i))
    }

    pub fn index(&self, a: GfElement) -> Result<usize> {
        self.check(a)?;
        Ok(a.index())
    }

    fn check(&self, a: GfElement) -> Result<()> {
        if a.p() != self.p() || a.s() != self.s() {
            return Err(Error::Parameter(format!(
                "element of GF({}^{}) used in GF({}^{})",
                a.p(),
                a.s(),
                self.p(),
                self.s()
            )));
        }
        Ok(())
    }

    pub fn add(&self, a: GfElement, b: GfElement) -> Result<GfElement> {
        self.check(a)?;
        self.check(b)?;
        Ok(self.make(self.add_idx(a.index(), b.index())))
    }

    pub fn neg(&self, a: GfElement) -> Result<GfElement> {
        self.check(a)?;
        Ok(self.make(self.neg_idx(a.index())))
    }

    pub fn sub(&self, a: GfElement, b: GfElement) -> Result<GfElement> {
        let nb = self.neg(b)?;
        self.add(a, nb)
    }

    pub fn mul(&self, a: GfElement, b: GfElement) -> Result<GfElement> {
        self.check(a)?;
        self.check(b)?;
        let table = self.mul_table()?;
        Ok(self.make(table[a.index() * self.order + b.index()] as usize))
    }

    /// Multiplicative inverse; `None` for zero.
    pub fn inv(&self, a: GfElement) -> Result<Option<GfElement>> {
        self.check(a)?;
        let table = self.mul_table()?;
        let row = &table[a.index() * self.order..(a.index() + 1) * self.order];
        Ok(row.iter().position(|&v| v == 1).map(|j| self.make(j)))
    }

    /// Coordinate scalar product `sum_l h^(l) a^(l) mod p`.
    pub fn dot(&self, h: GfElement, a: GfElement) -> Result<u32> {
        self.check(h)?;
        self.check(a)?;
        Ok(self.dot_idx(h.index(), a.index()))
    }

    fn mul_table(&self) -> Result<&[u32]> {
        self.mul
            .as_deref()
            .ok_or_else(|| Error::Configuration("no reduction polynomial configured for multiplication".into()))
    }

    pub fn has_mul(&self) -> bool {
        self.mul.is_some()
    }

    // Unchecked index-level operations for table-driven code.

    #[inline]
    pub fn add_idx(&self, a: usize, b: usize) -> usize {
        self.add[a * self.order + b] as usize
    }

    #[inline]
    pub fn neg_idx(&self, a: usize) -> usize {
        self.neg[a] as usize
    }

    #[inline]
    pub fn sub_idx(&self, a: usize, b: usize) -> usize {
        self.add_idx(a, self.neg_idx(b))
    }

    #[inline]
    pub fn dot_idx(&self, a: usize, b: usize) -> u32 {
        self.dot[a * self.order + b]
    }

    /// Panics if the field has no reduction polynomial.
    #[inline]
    pub fn mul_idx(&self, a: usize, b: usize) -> usize {
        self.mul.as_ref().expect("field has no multiplication")[a * self.order + b] as usize
    }
}

pub fn index_to_digits(mut index: usize, p: u32, s: usize) -> Vec<u32> {
    (0..s)
        .map(|_| {
            let d = (index % p as usize) as u32;
            index /= p as usize;
            d
        })
        .collect()
}

pub fn digits_to_index(digits: &[u32], p: u32) -> usize {
    digits.iter().rev().fold(0usize, |acc, &d| acc * p as usize + d as usize)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gf(p: u32, s: usize) -> GaloisField {
        GaloisField::with_default_poly(p, s).unwrap()
    }

    #[test]
    fn add_examples() {
        let f3 = gf(3, 1);
        let two = f3.from_digits(&[2]).unwrap();
        assert_eq!(f3.add(two, two).unwrap().digits(), vec![1]);

        let f4 = gf(2, 2);
        let a = f4.from_digits(&[1, 0]).unwrap();
        let b = f4.from_digits(&[1, 1]).unwrap();
        assert_eq!(f4.add(a, b).unwrap().digits(), vec![0, 1]);
        assert_eq!(f4.add(b, f4.zero()).unwrap(), b);
    }

    #[test]
    fn mul_examples() {
        let f4 = gf(2, 2);
        assert_eq!(f4.params().reduction_poly, Some(vec![1, 1, 1]));
        let t = f4.from_digits(&[0, 1]).unwrap();
        // t * t = t^2 = t + 1 mod t^2 + t + 1
        assert_eq!(f4.mul(t, t).unwrap().digits(), vec![1, 1]);
        for a in f4.elements() {
            assert_eq!(f4.mul(a, f4.one()).unwrap(), a);
        }

        let f3 = gf(3, 1);
        let two = f3.from_digits(&[2]).unwrap();
        assert_eq!(f3.mul(two, two).unwrap().digits(), vec![1]);
    }

    #[test]
    fn dot_examples() {
        let f4 = gf(2, 2);
        let e = |d: &[u32]| f4.from_digits(d).unwrap();
        assert_eq!(f4.dot(e(&[1, 1]), e(&[1, 1])).unwrap(), 0);
        assert_eq!(f4.dot(e(&[1, 0]), e(&[0, 1])).unwrap(), 0);
        let f3 = gf(3, 1);
        assert_eq!(f3.dot(f3.from_digits(&[2]).unwrap(), f3.from_digits(&[2]).unwrap()).unwrap(), 1);
    }

    #[test]
    fn index_examples() {
        let f4 = gf(2, 2);
        assert_eq!(f4.from_digits(&[1, 0]).unwrap().index(), 1);
        assert_eq!(f4.from_digits(&[0, 1]).unwrap().index(), 2);
        assert_eq!(f4.from_digits(&[0, 0]).unwrap().index(), 0);
        assert_eq!(f4.from_index(4), Err(Error::Range { index: 4, bound: 4 }));
    }

    #[test]
    fn mismatched_fields_are_rejected() {
        let f4 = gf(2, 2);
        let f3 = gf(3, 1);
        assert!(matches!(f4.add(f4.one(), f3.one()), Err(Error::Parameter(_))));
        assert!(matches!(f3.dot(f4.one(), f3.one()), Err(Error::Parameter(_))));
        assert!(matches!(f4.from_digits(&[2, 0]), Err(Error::Parameter(_))));
    }

    #[test]
    fn configuration_errors() {
        assert!(matches!(GaloisField::with_default_poly(4, 1), Err(Error::Configuration(_))));
        // t^2 + 1 = (t + 1)^2 over Z_2
        let reducible = FieldParams { p: 2, s: 2, reduction_poly: Some(vec![1, 0, 1]) };
        assert!(matches!(GaloisField::new(reducible), Err(Error::Configuration(_))));
        let additive = GaloisField::additive(2, 2).unwrap();
        assert!(matches!(additive.mul(additive.one(), additive.one()), Err(Error::Configuration(_))));
        assert!(additive.add(additive.one(), additive.one()).unwrap().is_zero());
    }

    #[test]
    fn default_polys() {
        assert_eq!(default_reduction_poly(3, 2), Some(vec![1, 0, 1]));
        assert_eq!(default_reduction_poly(5, 1), Some(vec![0, 1]));
        assert!(is_irreducible(&[1, 1, 0, 1], 2));
        assert!(!is_irreducible(&[0, 1, 1], 2));
    }

    #[test]
    fn modulus_and_text() {
        let f9 = gf(3, 2);
        for a in f9.elements() {
            assert_eq!(a.modulus() == 0, a.is_zero());
            assert_eq!(f9.parse_element(&a.to_text()).unwrap(), a);
        }
        assert_eq!(f9.from_digits(&[2, 1]).unwrap().to_text(), "2 1");
    }
}
