//! Finite fields `F_p` and `F_{p^m}`.
//!
//! Elements are stored as a single integer code `c_0 + c_1 p + ... + c_{m-1} p^{m-1}`
//! where `c_i` is the coefficient of `x^i` in the polynomial basis. Multiplication
//! goes through discrete log tables, which is fine for the tiny fields used here.

use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, Mutex, OnceLock};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const MAX_FIELD_SIZE: u64 = 1 << 22;

/// An immutable description of `F_{p^m}`.
#[derive(Debug)]
pub struct FieldSpec {
    p: u32,
    m: u32,
    q: u32,
    modulus: Vec<u32>,
    exp: Vec<u32>,
    log: Vec<u32>,
}

pub type Field = Arc<FieldSpec>;

pub fn is_prime(n: u64) -> bool {
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

fn field_cache() -> &'static Mutex<HashMap<(u32, u32), Field>> {
    static CACHE: OnceLock<Mutex<HashMap<(u32, u32), Field>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

/// Builds `F_{p^m}` with the least irreducible monic modulus.
///
/// Candidates `x^m + c_{m-1} x^{m-1} + ... + c_0` are ordered by the integer
/// `c_0 + c_1 p + ... + c_{m-1} p^{m-1}`. For `m = 1` this picks `x`.
pub fn field_make(p: u32, m: u32) -> Result<Field> {
    if p == 2 {
        return Err(Error::OddPrimeRequired);
    }
    if !is_prime(p as u64) {
        return Err(Error::OddPrimeRequired);
    }
    if m == 0 {
        return Err(Error::Invalid("extension degree must be at least 1".into()));
    }
    let q = (p as u64).checked_pow(m).ok_or(Error::FieldTooLarge)?;
    if q > MAX_FIELD_SIZE {
        return Err(Error::FieldTooLarge);
    }
    if let Some(f) = field_cache().lock().unwrap().get(&(p, m)) {
        return Ok(f.clone());
    }
    let spec = Arc::new(FieldSpec::build(p, m, q as u32));
    field_cache().lock().unwrap().insert((p, m), spec.clone());
    Ok(spec)
}

fn poly_rem(a: &[u32], b: &[u32], p: u32) -> Vec<u32> {
    // b monic
    let mut r = a.to_vec();
    let db = b.len() - 1;
    while r.len() > db {
        let lead = *r.last().unwrap();
        let shift = r.len() - 1 - db;
        if lead != 0 {
            for (i, &bi) in b.iter().enumerate() {
                let t = (lead as u64 * bi as u64) % p as u64;
                r[shift + i] = ((r[shift + i] as u64 + p as u64 - t) % p as u64) as u32;
            }
        }
        r.pop();
    }
    r
}

fn digits(mut k: u64, p: u32, len: usize) -> Vec<u32> {
    let mut out = Vec::with_capacity(len);
    for _ in 0..len {
        out.push((k % p as u64) as u32);
        k /= p as u64;
    }
    out
}

fn is_irreducible(f: &[u32], p: u32) -> bool {
    let m = f.len() - 1;
    for d in 1..=m / 2 {
        let count = (p as u64).pow(d as u32);
        for k in 0..count {
            let mut g = digits(k, p, d);
            g.push(1);
            if poly_rem(f, &g, p).iter().all(|&c| c == 0) {
                return false;
            }
        }
    }
    true
}

impl FieldSpec {
    fn build(p: u32, m: u32, q: u32) -> FieldSpec {
        let mut modulus = Vec::new();
        for k in 0..q as u64 {
            let mut f = digits(k, p, m as usize);
            f.push(1);
            if m == 1 || is_irreducible(&f, p) {
                modulus = f;
                break;
            }
        }
        let mut spec = FieldSpec {
            p,
            m,
            q,
            modulus,
            exp: Vec::new(),
            log: Vec::new(),
        };
        let order = q - 1;
        for g in 1..q {
            let mut powers = Vec::with_capacity(order as usize);
            let mut x = 1u32;
            let mut ok = true;
            for i in 0..order {
                if i > 0 && x == 1 {
                    ok = false;
                    break;
                }
                powers.push(x);
                x = spec.mul_slow(x, g);
            }
            if ok && x == 1 {
                let mut log = vec![0u32; q as usize];
                for (i, &v) in powers.iter().enumerate() {
                    log[v as usize] = i as u32;
                }
                spec.exp = powers;
                spec.log = log;
                break;
            }
        }
        spec
    }

    fn mul_slow(&self, a: u32, b: u32) -> u32 {
        let m = self.m as usize;
        let da = digits(a as u64, self.p, m);
        let db = digits(b as u64, self.p, m);
        let mut prod = vec![0u32; 2 * m - 1];
        for i in 0..m {
            for j in 0..m {
                prod[i + j] = ((prod[i + j] as u64 + da[i] as u64 * db[j] as u64) % self.p as u64) as u32;
            }
        }
        let r = poly_rem(&prod, &self.modulus, self.p);
        self.encode(&r)
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn m(&self) -> u32 {
        self.m
    }

    /// Number of elements `p^m`.
    pub fn size(&self) -> u32 {
        self.q
    }

    /// Coefficients `c_0..c_m` of the monic modulus (last entry is 1).
    pub fn modulus(&self) -> &[u32] {
        &self.modulus
    }

    pub fn encode(&self, coeffs: &[u32]) -> u32 {
        let mut code = 0u64;
        for &c in coeffs.iter().take(self.m as usize).rev() {
            code = code * self.p as u64 + (c % self.p) as u64;
        }
        code as u32
    }

    pub fn decode(&self, code: u32) -> Vec<u32> {
        digits(code as u64, self.p, self.m as usize)
    }

    /// Image of an integer in the prime field.
    pub fn from_int(&self, n: i64) -> u32 {
        n.rem_euclid(self.p as i64) as u32
    }

    #[inline]
    pub fn add(&self, a: u32, b: u32) -> u32 {
        if self.m == 1 {
            let s = a + b;
            return if s >= self.p { s - self.p } else { s };
        }
        let (mut a, mut b) = (a, b);
        let mut out = 0u32;
        let mut place = 1u32;
        for _ in 0..self.m {
            let s = (a % self.p + b % self.p) % self.p;
            out += s * place;
            place = place.wrapping_mul(self.p);
            a /= self.p;
            b /= self.p;
        }
        out
    }

    #[inline]
    pub fn neg(&self, a: u32) -> u32 {
        if self.m == 1 {
            return if a == 0 { 0 } else { self.p - a };
        }
        let mut a = a;
        let mut out = 0u32;
        let mut place = 1u32;
        for _ in 0..self.m {
            let d = a % self.p;
            out += ((self.p - d) % self.p) * place;
            place = place.wrapping_mul(self.p);
            a /= self.p;
        }
        out
    }

    #[inline]
    pub fn sub(&self, a: u32, b: u32) -> u32 {
        self.add(a, self.neg(b))
    }

    #[inline]
    pub fn mul(&self, a: u32, b: u32) -> u32 {
        if a == 0 || b == 0 {
            return 0;
        }
        if self.m == 1 {
            return ((a as u64 * b as u64) % self.p as u64) as u32;
        }
        let order = self.q - 1;
        let e = (self.log[a as usize] + self.log[b as usize]) % order;
        self.exp[e as usize]
    }

    pub fn inv(&self, a: u32) -> Result<u32> {
        if a == 0 {
            return Err(Error::ZeroInverse);
        }
        let order = self.q - 1;
        let l = self.log[a as usize];
        Ok(self.exp[((order - l) % order) as usize])
    }

    pub fn pow(&self, a: u32, e: i64) -> Result<u32> {
        if a == 0 {
            return match e.cmp(&0) {
                Ordering::Greater => Ok(0),
                Ordering::Equal => Ok(1),
                Ordering::Less => Err(Error::ZeroInverse),
            };
        }
        let order = (self.q - 1) as i64;
        let l = self.log[a as usize] as i64;
        let idx = ((l as i128 * e as i128).rem_euclid(order as i128)) as usize;
        Ok(self.exp[idx])
    }

    /// Discrete logarithm with respect to the fixed generator.
    pub fn log(&self, a: u32) -> Result<u32> {
        if a == 0 {
            return Err(Error::ZeroInverse);
        }
        Ok(self.log[a as usize])
    }

    pub fn generator(&self) -> u32 {
        self.exp[if self.q > 2 { 1 } else { 0 }]
    }

    /// The subfield `F_p` embeds as codes `0..p`.
    pub fn in_prime_field(&self, a: u32) -> bool {
        a < self.p
    }
}

/// An element of a finite field together with its field.
#[derive(Clone)]
pub struct FieldElem {
    field: Field,
    code: u32,
}

impl fmt::Debug for FieldElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

impl fmt::Display for FieldElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let c = self.coeffs();
        if c[1..].iter().all(|&d| d == 0) {
            return write!(f, "{}", c[0]);
        }
        let parts: Vec<String> = c.iter().map(|d| d.to_string()).collect();
        write!(f, "[{}]", parts.join(","))
    }
}

impl PartialEq for FieldElem {
    fn eq(&self, other: &Self) -> bool {
        self.field.p == other.field.p && self.field.m == other.field.m && self.code == other.code
    }
}

impl Eq for FieldElem {}

impl std::hash::Hash for FieldElem {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        (self.field.p, self.field.m, self.code).hash(state);
    }
}

impl PartialOrd for FieldElem {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Orders by coefficient vector `(c_0, c_1, ...)`.
impl Ord for FieldElem {
    fn cmp(&self, other: &Self) -> Ordering {
        (self.field.p, self.field.m)
            .cmp(&(other.field.p, other.field.m))
            .then_with(|| self.coeffs().cmp(&other.coeffs()))
    }
}

impl FieldElem {
    pub fn from_code(field: &Field, code: u32) -> FieldElem {
        assert!(code < field.q, "code out of range");
        FieldElem {
            field: field.clone(),
            code,
        }
    }

    pub fn from_int(field: &Field, n: i64) -> FieldElem {
        FieldElem::from_code(field, field.from_int(n))
    }

    pub fn from_coeffs(field: &Field, coeffs: &[u32]) -> Result<FieldElem> {
        if coeffs.len() != field.m as usize || coeffs.iter().any(|&c| c >= field.p) {
            return Err(Error::Invalid(format!(
                "expected {} coefficients in [0, {})",
                field.m, field.p
            )));
        }
        Ok(FieldElem::from_code(field, field.encode(coeffs)))
    }

    pub fn zero(field: &Field) -> FieldElem {
        FieldElem::from_code(field, 0)
    }

    pub fn one(field: &Field) -> FieldElem {
        FieldElem::from_code(field, 1)
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn code(&self) -> u32 {
        self.code
    }

    pub fn coeffs(&self) -> Vec<u32> {
        self.field.decode(self.code)
    }

    pub fn is_zero(&self) -> bool {
        self.code == 0
    }

    pub fn is_one(&self) -> bool {
        self.code == 1
    }

    fn same(&self, other: &FieldElem) -> Result<()> {
        if self.field.p != other.field.p || self.field.m != other.field.m {
            return Err(Error::FieldMismatch);
        }
        Ok(())
    }

    fn with(&self, code: u32) -> FieldElem {
        FieldElem {
            field: self.field.clone(),
            code,
        }
    }

    pub fn add(&self, other: &FieldElem) -> FieldElem {
        self.same(other).expect("field mismatch");
        self.with(self.field.add(self.code, other.code))
    }

    pub fn sub(&self, other: &FieldElem) -> FieldElem {
        self.same(other).expect("field mismatch");
        self.with(self.field.sub(self.code, other.code))
    }

    pub fn neg(&self) -> FieldElem {
        self.with(self.field.neg(self.code))
    }

    pub fn mul(&self, other: &FieldElem) -> FieldElem {
        self.same(other).expect("field mismatch");
        self.with(self.field.mul(self.code, other.code))
    }

    pub fn inv(&self) -> Result<FieldElem> {
        Ok(self.with(self.field.inv(self.code)?))
    }

    pub fn div(&self, other: &FieldElem) -> Result<FieldElem> {
        self.same(other)?;
        Ok(self.mul(&other.inv()?))
    }

    pub fn pow(&self, e: i64) -> Result<FieldElem> {
        Ok(self.with(self.field.pow(self.code, e)?))
    }

    /// `+1` or `-1` if the element is a sign, otherwise `None`.
    pub fn as_sign(&self) -> Option<i8> {
        if self.code == 1 {
            Some(1)
        } else if self.code == self.field.neg(1) {
            Some(-1)
        } else {
            None
        }
    }

    pub fn to_repr(&self) -> FieldElemRepr {
        FieldElemRepr {
            p: self.field.p,
            m: self.field.m,
            coeffs: self.coeffs(),
        }
    }

    pub fn from_repr(r: &FieldElemRepr) -> Result<FieldElem> {
        let f = field_make(r.p, r.m)?;
        FieldElem::from_coeffs(&f, &r.coeffs)
    }
}

/// Wire format `{"p": .., "m": .., "coeffs": [..]}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FieldElemRepr {
    pub p: u32,
    pub m: u32,
    pub coeffs: Vec<u32>,
}

impl Serialize for FieldElem {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_repr().serialize(s)
    }
}

impl<'de> Deserialize<'de> for FieldElem {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let r = FieldElemRepr::deserialize(d)?;
        FieldElem::from_repr(&r).map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FieldOp {
    Add,
    Mul,
    Inv,
    Pow(i64),
}

/// Single entry point for the four basic operations; `b` is ignored by
/// `Inv` and `Pow`.
pub fn field_arith(a: &FieldElem, b: &FieldElem, op: FieldOp) -> Result<FieldElem> {
    a.same(b)?;
    match op {
        FieldOp::Add => Ok(a.add(b)),
        FieldOp::Mul => Ok(a.mul(b)),
        FieldOp::Inv => a.inv(),
        FieldOp::Pow(e) => a.pow(e),
    }
}

/// All `y` with `y^n = x`, sorted by coefficient vector. Brute force.
pub fn nth_roots(x: &FieldElem, n: u64) -> Result<Vec<FieldElem>> {
    if x.is_zero() {
        return Err(Error::NonzeroRequired);
    }
    if n == 0 {
        return Err(Error::Invalid("n must be positive".into()));
    }
    let f = x.field();
    let mut out: Vec<FieldElem> = (1..f.q)
        .filter(|&y| f.pow(y, n as i64).unwrap() == x.code)
        .map(|y| FieldElem::from_code(f, y))
        .collect();
    out.sort();
    Ok(out)
}

/// `p`-adic valuation of a nonzero rational.
pub fn valuation(x: &BigRational, p: u32) -> Result<i64> {
    if x.is_zero() {
        return Err(Error::NonzeroRequired);
    }
    Ok(int_valuation(x.numer(), p) - int_valuation(x.denom(), p))
}

fn int_valuation(n: &BigInt, p: u32) -> i64 {
    let pb = BigInt::from(p);
    let mut n = n.abs();
    let mut v = 0;
    loop {
        let (q, r) = n.div_rem(&pb);
        if !r.is_zero() {
            return v;
        }
        n = q;
        v += 1;
    }
}

/// Residue mod `p` of the unit part `x / p^{v(x)}`, as an integer in `1..p`.
pub fn unit_residue(x: &BigRational, p: u32) -> Result<u32> {
    let v = valuation(x, p)?;
    let pb = BigInt::from(p);
    let mut num = x.numer().clone();
    let mut den = x.denom().clone();
    if v > 0 {
        num /= num_traits::pow(pb.clone(), v as usize);
    } else if v < 0 {
        den /= num_traits::pow(pb.clone(), (-v) as usize);
    }
    let n = num.mod_floor(&pb).to_u32().unwrap();
    let d = den.mod_floor(&pb).to_u32().unwrap();
    let f = field_make(p, 1)?;
    Ok(f.mul(n, f.inv(d)?))
}

/// Reduction mod `p` of a `p`-adic unit, embedded in `field`.
pub fn omega_of_unit(u: &BigRational, field: &Field) -> Result<FieldElem> {
    let p = field.p;
    if valuation(u, p)? != 0 {
        return Err(Error::NotAUnit);
    }
    Ok(FieldElem::from_code(field, unit_residue(u, p)?))
}

/// `n!` in `F_p`.
pub fn factorial_mod(n: u32, field: &Field) -> FieldElem {
    let mut acc = 1u32;
    for k in 1..=n {
        acc = field.mul(acc, field.from_int(k as i64));
    }
    FieldElem::from_code(field, acc)
}

/// Legendre symbol of an integer not divisible by `p`.
pub fn legendre(a: i64, p: u32) -> i8 {
    let f = field_make(p, 1).expect("odd prime");
    let x = f.from_int(a);
    assert!(x != 0, "legendre of a multiple of p");
    if f.pow(x, ((p - 1) / 2) as i64).unwrap() == 1 {
        1
    } else {
        -1
    }
}

/// Least positive integer that is not a square mod `p`.
pub fn least_nonsquare(p: u32) -> u32 {
    (2..p).find(|&u| legendre(u as i64, p) == -1).expect("odd prime has a non-square")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn prime_field_modulus_is_x() {
        let f = field_make(3, 1).unwrap();
        assert_eq!(f.modulus(), &[0, 1]);
    }

    #[test]
    fn rejects_bad_characteristic() {
        assert_eq!(field_make(2, 1).unwrap_err(), Error::OddPrimeRequired);
        assert!(field_make(4, 1).is_err());
        assert!(field_make(9, 1).is_err());
    }

    #[test]
    fn small_arithmetic() {
        let f5 = field_make(5, 1).unwrap();
        let four = FieldElem::from_int(&f5, 4);
        assert_eq!(four.inv().unwrap(), four);
        let f3 = field_make(3, 1).unwrap();
        let two = FieldElem::from_int(&f3, 2);
        assert_eq!(two.add(&two), FieldElem::one(&f3));
        assert_eq!(FieldElem::zero(&f3).inv().unwrap_err(), Error::ZeroInverse);
    }

    #[test]
    fn group_order_kills_everything() {
        let f = field_make(5, 2).unwrap();
        for c in 1..f.size() {
            let a = FieldElem::from_code(&f, c);
            assert!(a.pow(24).unwrap().is_one());
            assert!(a.mul(&a.inv().unwrap()).is_one());
            assert_eq!(a.pow(-3).unwrap(), a.pow(3).unwrap().inv().unwrap());
        }
    }

    #[test]
    fn fourth_roots_of_four_in_f5_are_missing() {
        let f = field_make(5, 1).unwrap();
        let four = FieldElem::from_int(&f, 4);
        assert!(nth_roots(&four, 4).unwrap().is_empty());
        let one = FieldElem::one(&f);
        assert_eq!(nth_roots(&one, 1).unwrap(), vec![one.clone()]);
    }

    #[test]
    fn omega_examples() {
        let f3 = field_make(3, 1).unwrap();
        let f5 = field_make(5, 1).unwrap();
        let r = |n: i64, d: i64| BigRational::new(n.into(), d.into());
        assert_eq!(omega_of_unit(&r(2, 1), &f3).unwrap().code(), 2);
        assert_eq!(omega_of_unit(&r(1, 2), &f5).unwrap().code(), 3);
        assert_eq!(omega_of_unit(&r(10, 1), &f5).unwrap_err(), Error::NotAUnit);
    }

    #[test]
    fn factorials() {
        let f = field_make(5, 1).unwrap();
        assert!(factorial_mod(0, &f).is_one());
        assert_eq!(factorial_mod(2, &f).code(), 2);
        assert_eq!(factorial_mod(4, &f).code(), 4);
    }

    #[test]
    fn serde_roundtrip() {
        let f = field_make(5, 4).unwrap();
        let a = FieldElem::from_code(&f, 123);
        let s = serde_json::to_string(&a).unwrap();
        assert!(s.contains("\"coeffs\""));
        let b: FieldElem = serde_json::from_str(&s).unwrap();
        assert_eq!(a, b);
    }
}
