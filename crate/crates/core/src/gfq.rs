//! Arithmetic in GF(p^d).
//!
//! Elements are encoded as a single integer in `[0, q)` whose base-`p`
//! digits are the polynomial-basis coefficients, lowest degree first:
//! the value `sum c_i p^i` stands for `sum c_i x^i` modulo the field's
//! defining polynomial. The defining polynomial is the lexicographically
//! smallest monic irreducible of degree `d` over GF(p), comparing
//! coefficients from `c_0` upwards, so a given `(p, d)` always produces the
//! same field.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default cap on the field order.
pub const DEFAULT_MAX_ORDER: u64 = 256;

/// Fields up to this order carry precomputed lookup tables.
const TABLE_MAX_ORDER: u64 = 256;

/// A field element, encoded as its polynomial-basis index.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Felt(pub u32);

impl Felt {
    pub const ZERO: Felt = Felt(0);
    pub const ONE: Felt = Felt(1);

    #[inline]
    pub fn value(self) -> u32 {
        self.0
    }

    #[inline]
    pub fn is_zero(self) -> bool {
        self.0 == 0
    }
}

impl fmt::Display for Felt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

struct Tables {
    add: Vec<u32>,
    mul: Vec<u32>,
    neg: Vec<u32>,
    inv: Vec<u32>,
}

struct FieldInner {
    p: u32,
    d: u32,
    q: u32,
    modulus: Vec<u32>,
    tables: Option<Tables>,
}

/// The finite field GF(p^d). Cheap to clone; immutable once built.
#[derive(Clone)]
pub struct Field(Arc<FieldInner>);

/// Serialized description of a field: `{p, d, modulus: [c_0..c_d]}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FieldRecord {
    pub p: u32,
    pub d: u32,
    pub modulus: Vec<u32>,
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut i = 2u64;
    while i * i <= n {
        if n.is_multiple_of(i) {
            return false;
        }
        i += 1;
    }
    true
}

/// Splits `q` into `(p, d)` with `q = p^d`, `p` prime.
pub fn prime_power(q: u64) -> Option<(u64, u32)> {
    if q < 2 {
        return None;
    }
    let p = (2..=q).find(|&c| q.is_multiple_of(c) && is_prime(c))?;
    let mut rest = q;
    let mut d = 0;
    while rest.is_multiple_of(p) {
        rest /= p;
        d += 1;
    }
    (rest == 1).then_some((p, d))
}

impl Field {
    /// Builds GF(p^d) under the default order cap.
    pub fn new(p: u64, d: u32) -> Result<Field> {
        Field::with_cap(p, d, DEFAULT_MAX_ORDER)
    }

    pub fn with_cap(p: u64, d: u32, max_order: u64) -> Result<Field> {
        if !is_prime(p) {
            return Err(Error::NonPrimeCharacteristic(p));
        }
        if d == 0 {
            return Err(Error::ZeroDegree);
        }
        let order = (p as u128).checked_pow(d).unwrap_or(u128::MAX);
        if order > max_order as u128 || order > u32::MAX as u128 {
            return Err(Error::FieldTooLarge { order, cap: max_order });
        }
        let prime = Field::build(p as u32, 1, vec![0, 1]);
        if d == 1 {
            return Ok(prime);
        }
        let modulus = smallest_irreducible(&prime, d as usize);
        Ok(Field::build(
            p as u32,
            d,
            modulus.into_iter().map(Felt::value).collect(),
        ))
    }

    /// Builds the field of order `q`, which must be a prime power.
    pub fn from_order(q: u64) -> Result<Field> {
        Field::from_order_with_cap(q, DEFAULT_MAX_ORDER)
    }

    pub fn from_order_with_cap(q: u64, max_order: u64) -> Result<Field> {
        let (p, d) = prime_power(q).ok_or(Error::NotPrimePower(q))?;
        Field::with_cap(p, d, max_order)
    }

    /// Rebuilds a field from its serialized record, checking that the
    /// recorded modulus is the canonical one.
    pub fn from_record(record: &FieldRecord, max_order: u64) -> Result<Field> {
        let field = Field::with_cap(record.p as u64, record.d, max_order)?;
        if field.modulus() != record.modulus.as_slice() {
            return Err(Error::InvalidCertificate(format!(
                "modulus {:?} is not the canonical modulus {:?}",
                record.modulus,
                field.modulus()
            )));
        }
        Ok(field)
    }

    fn build(p: u32, d: u32, modulus: Vec<u32>) -> Field {
        let q = p.pow(d);
        let mut inner = FieldInner { p, d, q, modulus, tables: None };
        if (q as u64) <= TABLE_MAX_ORDER {
            inner.tables = Some(build_tables(&inner));
        }
        Field(Arc::new(inner))
    }

    #[inline]
    pub fn p(&self) -> u32 {
        self.0.p
    }

    #[inline]
    pub fn d(&self) -> u32 {
        self.0.d
    }

    #[inline]
    pub fn q(&self) -> u32 {
        self.0.q
    }

    /// Coefficients `[c_0, ..., c_d]` of the defining polynomial.
    pub fn modulus(&self) -> &[u32] {
        &self.0.modulus
    }

    pub fn has_tables(&self) -> bool {
        self.0.tables.is_some()
    }

    pub fn record(&self) -> FieldRecord {
        FieldRecord { p: self.p(), d: self.d(), modulus: self.0.modulus.clone() }
    }

    /// Checked conversion from an integer encoding.
    pub fn elem(&self, value: u64) -> Result<Felt> {
        if value < self.q() as u64 {
            Ok(Felt(value as u32))
        } else {
            Err(Error::ElementOutOfRange { value, order: self.q() as u64 })
        }
    }

    pub fn contains(&self, a: Felt) -> bool {
        a.0 < self.q()
    }

    pub fn elements(&self) -> impl Iterator<Item = Felt> {
        (0..self.q()).map(Felt)
    }

    #[inline]
    pub fn add(&self, a: Felt, b: Felt) -> Felt {
        debug_assert!(self.contains(a) && self.contains(b));
        match &self.0.tables {
            Some(t) => Felt(t.add[(a.0 * self.0.q + b.0) as usize]),
            None => Felt(add_slow(&self.0, a.0, b.0)),
        }
    }

    #[inline]
    pub fn neg(&self, a: Felt) -> Felt {
        debug_assert!(self.contains(a));
        match &self.0.tables {
            Some(t) => Felt(t.neg[a.0 as usize]),
            None => Felt(neg_slow(&self.0, a.0)),
        }
    }

    #[inline]
    pub fn sub(&self, a: Felt, b: Felt) -> Felt {
        self.add(a, self.neg(b))
    }

    #[inline]
    pub fn mul(&self, a: Felt, b: Felt) -> Felt {
        debug_assert!(self.contains(a) && self.contains(b));
        match &self.0.tables {
            Some(t) => Felt(t.mul[(a.0 * self.0.q + b.0) as usize]),
            None => Felt(mul_slow(&self.0, a.0, b.0)),
        }
    }

    pub fn inv(&self, a: Felt) -> Result<Felt> {
        if a.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(match &self.0.tables {
            Some(t) => Felt(t.inv[a.0 as usize]),
            None => self.pow(a, self.q() as u64 - 2),
        })
    }

    pub fn div(&self, a: Felt, b: Felt) -> Result<Felt> {
        Ok(self.mul(a, self.inv(b)?))
    }

    pub fn pow(&self, a: Felt, mut e: u64) -> Felt {
        let mut base = a;
        let mut acc = Felt::ONE;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        acc
    }

    /// Multiplicative order of a non-zero element.
    pub fn order_of(&self, a: Felt) -> Option<u32> {
        if a.is_zero() || !self.contains(a) {
            return None;
        }
        let mut x = a;
        let mut k = 1;
        while x != Felt::ONE {
            x = self.mul(x, a);
            k += 1;
        }
        Some(k)
    }
}

impl PartialEq for Field {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0)
            || (self.0.p == other.0.p && self.0.d == other.0.d && self.0.modulus == other.0.modulus)
    }
}

impl Eq for Field {}

impl fmt::Debug for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GF({}^{}) mod {:?}", self.p(), self.d(), self.modulus())
    }
}

fn digits(inner: &FieldInner, mut v: u32) -> Vec<u32> {
    let mut out = vec![0; inner.d as usize];
    for c in out.iter_mut() {
        *c = v % inner.p;
        v /= inner.p;
    }
    out
}

fn undigits(inner: &FieldInner, coeffs: &[u32]) -> u32 {
    coeffs.iter().rev().fold(0, |acc, &c| acc * inner.p + c)
}

fn add_slow(inner: &FieldInner, a: u32, b: u32) -> u32 {
    let (x, y) = (digits(inner, a), digits(inner, b));
    let sum: Vec<u32> = x.iter().zip(&y).map(|(s, t)| (s + t) % inner.p).collect();
    undigits(inner, &sum)
}

fn neg_slow(inner: &FieldInner, a: u32) -> u32 {
    let neg: Vec<u32> = digits(inner, a).iter().map(|&c| (inner.p - c) % inner.p).collect();
    undigits(inner, &neg)
}

fn mul_slow(inner: &FieldInner, a: u32, b: u32) -> u32 {
    let p = inner.p as u64;
    let d = inner.d as usize;
    let (x, y) = (digits(inner, a), digits(inner, b));
    let mut prod = vec![0u64; 2 * d];
    for (i, &s) in x.iter().enumerate() {
        for (j, &t) in y.iter().enumerate() {
            prod[i + j] = (prod[i + j] + s as u64 * t as u64) % p;
        }
    }
    // reduce with the monic modulus, highest degree first
    for k in (d..2 * d).rev() {
        let c = prod[k];
        if c == 0 {
            continue;
        }
        prod[k] = 0;
        for (i, &m) in inner.modulus[..d].iter().enumerate() {
            let idx = k - d + i;
            prod[idx] = (prod[idx] + (p - c) * m as u64) % p;
        }
    }
    let coeffs: Vec<u32> = prod[..d].iter().map(|&c| c as u32).collect();
    undigits(inner, &coeffs)
}

fn build_tables(inner: &FieldInner) -> Tables {
    let q = inner.q as usize;
    let mut add = vec![0; q * q];
    let mut neg = vec![0; q];
    for a in 0..q as u32 {
        neg[a as usize] = neg_slow(inner, a);
        for b in 0..q as u32 {
            add[a as usize * q + b as usize] = add_slow(inner, a, b);
        }
    }
    // multiplication through discrete logs of a primitive element
    let generator = (2..q as u32)
        .find(|&g| {
            let mut x = g;
            let mut order = 1;
            while x != 1 {
                x = mul_slow(inner, x, g);
                order += 1;
            }
            order == q - 1
        })
        .unwrap_or(1);
    let mut exp = vec![1u32; q - 1];
    let mut log = vec![0usize; q];
    for i in 1..q - 1 {
        exp[i] = mul_slow(inner, exp[i - 1], generator);
    }
    for (i, &x) in exp.iter().enumerate() {
        log[x as usize] = i;
    }
    let mut mul = vec![0; q * q];
    let mut inv = vec![0; q];
    for a in 1..q {
        inv[a] = exp[(q - 1 - log[a]) % (q - 1)];
        for b in 1..q {
            mul[a * q + b] = exp[(log[a] + log[b]) % (q - 1)];
        }
    }
    Tables { add, mul, neg, inv }
}

/// Polynomials over a [`Field`], as coefficient vectors lowest degree first.
pub mod poly {
    use super::{Felt, Field};

    pub fn trim(mut a: Vec<Felt>) -> Vec<Felt> {
        while a.last().is_some_and(|c| c.is_zero()) {
            a.pop();
        }
        a
    }

    pub fn degree(a: &[Felt]) -> Option<usize> {
        a.iter().rposition(|c| !c.is_zero())
    }

    pub fn mul(field: &Field, a: &[Felt], b: &[Felt]) -> Vec<Felt> {
        if a.is_empty() || b.is_empty() {
            return Vec::new();
        }
        let mut out = vec![Felt::ZERO; a.len() + b.len() - 1];
        for (i, &x) in a.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (j, &y) in b.iter().enumerate() {
                out[i + j] = field.add(out[i + j], field.mul(x, y));
            }
        }
        trim(out)
    }

    /// Remainder of `a` modulo a non-zero `m`.
    pub fn rem(field: &Field, a: &[Felt], m: &[Felt]) -> Vec<Felt> {
        let dm = degree(m).expect("modulus must be non-zero");
        let lead_inv = field.inv(m[dm]).expect("leading coefficient is non-zero");
        let mut r = trim(a.to_vec());
        while let Some(dr) = degree(&r) {
            if dr < dm {
                break;
            }
            let factor = field.mul(r[dr], lead_inv);
            for (i, &c) in m.iter().enumerate().take(dm + 1) {
                let idx = dr - dm + i;
                r[idx] = field.sub(r[idx], field.mul(factor, c));
            }
            r = trim(r);
        }
        r
    }

    /// All monic polynomials of the given degree, ordered by their
    /// coefficients compared from the constant term upwards.
    pub fn monic_of_degree(field: &Field, degree: usize) -> impl Iterator<Item = Vec<Felt>> + '_ {
        let q = field.q() as u64;
        let count = q.pow(degree as u32);
        (0..count).map(move |mut idx| {
            let mut coeffs = vec![Felt::ZERO; degree + 1];
            for i in (0..degree).rev() {
                coeffs[i] = Felt((idx % q) as u32);
                idx /= q;
            }
            coeffs[degree] = Felt::ONE;
            coeffs
        })
    }

    /// Irreducibility by trial division against every monic polynomial of
    /// degree at most half the input degree.
    pub fn is_irreducible(field: &Field, f: &[Felt]) -> bool {
        let Some(df) = degree(f) else {
            return false;
        };
        if df == 0 {
            return false;
        }
        (1..=df / 2).all(|k| monic_of_degree(field, k).all(|g| !rem(field, f, &g).is_empty()))
    }
}

/// Lexicographically smallest monic irreducible polynomial of the given
/// degree over `field`, coefficients compared low degree first.
pub fn smallest_irreducible(field: &Field, degree: usize) -> Vec<Felt> {
    poly::monic_of_degree(field, degree)
        .find(|f| poly::is_irreducible(field, f))
        .expect("irreducible polynomials exist in every degree")
}

/// GF(q^n) built as GF(q)[y]/(g) over a base field GF(q), with `g` the
/// smallest monic irreducible of degree `n` over the base. Elements are
/// encoded as integers whose base-`q` digits are the coefficients of
/// `1, y, ..., y^(n-1)`.
#[derive(Clone, Debug)]
pub struct ExtensionField {
    base: Field,
    degree: usize,
    modulus: Vec<Felt>,
    order: u64,
}

/// Extensions are only built for element counts up to this size.
pub const MAX_EXTENSION_ORDER: u64 = 1 << 24;

impl ExtensionField {
    pub fn new(base: &Field, degree: usize) -> Result<ExtensionField> {
        if degree == 0 {
            return Err(Error::IncompatibleExtension("degree must be at least 1".into()));
        }
        let order = (base.q() as u64)
            .checked_pow(degree as u32)
            .filter(|&o| o <= MAX_EXTENSION_ORDER)
            .ok_or_else(|| {
                Error::IncompatibleExtension(format!(
                    "GF({}^{}) is too large to enumerate",
                    base.q(),
                    degree
                ))
            })?;
        Ok(ExtensionField {
            base: base.clone(),
            degree,
            modulus: smallest_irreducible(base, degree),
            order,
        })
    }

    pub fn base(&self) -> &Field {
        &self.base
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn order(&self) -> u64 {
        self.order
    }

    pub fn modulus(&self) -> &[Felt] {
        &self.modulus
    }

    pub fn coeffs(&self, m: u64) -> Vec<Felt> {
        let q = self.base.q() as u64;
        let mut m = m;
        (0..self.degree)
            .map(|_| {
                let c = Felt((m % q) as u32);
                m /= q;
                c
            })
            .collect()
    }

    pub fn encode(&self, coeffs: &[Felt]) -> u64 {
        let q = self.base.q() as u64;
        coeffs.iter().rev().fold(0, |acc, c| acc * q + c.0 as u64)
    }

    pub fn add(&self, a: u64, b: u64) -> u64 {
        let (x, y) = (self.coeffs(a), self.coeffs(b));
        let sum: Vec<Felt> = x.iter().zip(&y).map(|(&s, &t)| self.base.add(s, t)).collect();
        self.encode(&sum)
    }

    pub fn sub(&self, a: u64, b: u64) -> u64 {
        let (x, y) = (self.coeffs(a), self.coeffs(b));
        let diff: Vec<Felt> = x.iter().zip(&y).map(|(&s, &t)| self.base.sub(s, t)).collect();
        self.encode(&diff)
    }

    pub fn mul(&self, a: u64, b: u64) -> u64 {
        let prod = poly::mul(&self.base, &self.coeffs(a), &self.coeffs(b));
        let mut r = poly::rem(&self.base, &prod, &self.modulus);
        r.resize(self.degree, Felt::ZERO);
        self.encode(&r)
    }

    /// Multiplies by the generator `y` of the polynomial basis.
    pub fn mul_by_y(&self, a: u64) -> u64 {
        let mut shifted = vec![Felt::ZERO];
        shifted.extend(self.coeffs(a));
        let mut r = poly::rem(&self.base, &shifted, &self.modulus);
        r.resize(self.degree, Felt::ZERO);
        self.encode(&r)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn prime_fields_use_x_as_modulus() {
        for p in [2, 3, 5, 7] {
            let f = Field::new(p, 1).unwrap();
            assert_eq!(f.modulus(), &[0, 1]);
            assert_eq!(f.q(), p as u32);
        }
    }

    #[test]
    fn gf4_modulus_is_x2_x_1() {
        let f = Field::new(2, 2).unwrap();
        assert_eq!(f.modulus(), &[1, 1, 1]);
    }

    #[test]
    fn canonical_moduli_for_small_fields() {
        // low-degree-first order: x^3+x^2+1 precedes x^3+x+1
        assert_eq!(Field::new(2, 3).unwrap().modulus(), &[1, 0, 1, 1]);
        assert_eq!(Field::new(3, 2).unwrap().modulus(), &[1, 0, 1]);
        assert_eq!(Field::new(2, 4).unwrap().modulus(), &[1, 0, 0, 1, 1]);
    }

    #[test]
    fn rejects_bad_parameters() {
        assert_eq!(Field::new(4, 1).unwrap_err(), Error::NonPrimeCharacteristic(4));
        assert!(matches!(Field::new(2, 9), Err(Error::FieldTooLarge { .. })));
        assert!(Field::with_cap(2, 9, 512).is_ok());
        assert_eq!(Field::new(2, 0).unwrap_err(), Error::ZeroDegree);
        assert_eq!(Field::from_order(6).unwrap_err(), Error::NotPrimePower(6));
    }

    #[test]
    fn gf4_x_squared_is_x_plus_1() {
        let f = Field::new(2, 2).unwrap();
        assert_eq!(f.mul(Felt(2), Felt(2)), Felt(3));
    }

    #[test]
    fn gf3_inverse_of_two() {
        let f = Field::new(3, 1).unwrap();
        assert_eq!(f.inv(Felt(2)).unwrap(), Felt(2));
        assert_eq!(f.inv(Felt(0)), Err(Error::DivisionByZero));
    }

    #[test]
    fn additive_inverse() {
        for q in [2, 3, 4, 5, 8, 9, 16] {
            let f = Field::from_order(q).unwrap();
            for a in f.elements() {
                assert_eq!(f.add(a, f.neg(a)), Felt::ZERO);
            }
        }
    }

    #[test]
    fn slow_path_matches_tables() {
        for q in [2, 9, 64, 256] {
            let f = Field::from_order(q).unwrap();
            for a in f.elements() {
                for b in f.elements() {
                    assert_eq!(f.mul(a, b).0, mul_slow(&f.0, a.0, b.0));
                    assert_eq!(f.add(a, b).0, add_slow(&f.0, a.0, b.0));
                }
            }
        }
        let big = Field::with_cap(2, 9, 512).unwrap();
        assert!(!big.has_tables());
        let a = Felt(300);
        assert_eq!(big.mul(a, big.inv(a).unwrap()), Felt::ONE);
    }

    // Field axioms exhaustively for every field of order at most 16.
    #[test]
    fn field_axioms_exhaustive() {
        for q in [2, 3, 4, 5, 7, 8, 9, 11, 13, 16] {
            let f = Field::from_order(q).unwrap();
            for a in f.elements() {
                for b in f.elements() {
                    assert_eq!(f.add(a, b), f.add(b, a));
                    assert_eq!(f.mul(a, b), f.mul(b, a));
                    for c in f.elements() {
                        assert_eq!(f.add(f.add(a, b), c), f.add(a, f.add(b, c)));
                        assert_eq!(f.mul(f.mul(a, b), c), f.mul(a, f.mul(b, c)));
                        assert_eq!(f.mul(a, f.add(b, c)), f.add(f.mul(a, b), f.mul(a, c)));
                    }
                }
                if !a.is_zero() {
                    assert_eq!(f.mul(a, f.inv(a).unwrap()), Felt::ONE);
                }
            }
        }
    }

    #[test]
    fn multiplicative_group_is_cyclic() {
        for q in [2, 3, 4, 5, 7, 8, 9, 16, 25, 27, 32, 49, 64, 81, 128, 256] {
            let f = Field::from_order(q).unwrap();
            let has_generator = f.elements().any(|a| f.order_of(a) == Some(q as u32 - 1));
            assert!(has_generator, "GF({q}) has no primitive element");
        }
    }

    #[test]
    fn frobenius_is_additive() {
        for q in [2, 3, 4, 5, 7, 8, 9, 16] {
            let f = Field::from_order(q).unwrap();
            let p = f.p() as u64;
            for a in f.elements() {
                for b in f.elements() {
                    assert_eq!(f.pow(f.add(a, b), p), f.add(f.pow(a, p), f.pow(b, p)));
                }
            }
        }
    }

    #[test]
    fn modulus_is_irreducible_by_trial_division() {
        for q in [4, 8, 9, 16, 25, 27, 32, 64, 128, 256] {
            let f = Field::from_order(q).unwrap();
            let prime = Field::new(f.p() as u64, 1).unwrap();
            let m: Vec<Felt> = f.modulus().iter().map(|&c| Felt(c)).collect();
            assert!(poly::is_irreducible(&prime, &m));
        }
    }

    #[test]
    fn record_round_trip_rejects_foreign_modulus() {
        let f = Field::new(2, 3).unwrap();
        assert_eq!(Field::from_record(&f.record(), 256).unwrap(), f);
        let mut bad = f.record();
        bad.modulus = vec![1, 1, 0, 1];
        assert!(Field::from_record(&bad, 256).is_err());
    }

    #[test]
    fn extension_over_prime_field_matches_direct_field() {
        let base = Field::new(2, 1).unwrap();
        let ext = ExtensionField::new(&base, 2).unwrap();
        let direct = Field::new(2, 2).unwrap();
        for a in 0..4u64 {
            for b in 0..4u64 {
                assert_eq!(ext.mul(a, b), direct.mul(Felt(a as u32), Felt(b as u32)).0 as u64);
            }
        }
    }

    #[test]
    fn extension_over_gf4_is_a_field() {
        let base = Field::from_order(4).unwrap();
        let ext = ExtensionField::new(&base, 2).unwrap();
        assert_eq!(ext.order(), 16);
        for a in 1..16 {
            assert!((1..16).any(|b| ext.mul(a, b) == 1), "{a} has no inverse");
            assert_eq!(ext.mul_by_y(a), ext.mul(a, 4));
        }
    }
}
