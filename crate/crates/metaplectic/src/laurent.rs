//! Truncated Laurent series over `F_{p^m}` with explicit `X`-adic precision.
//!
//! A series with precision `N` knows every coefficient of `X^e` for `e < N`
//! exactly and nothing beyond. Series that are known exactly (monomials in a
//! structure matrix, for instance) carry the sentinel precision [`EXACT`].

use std::collections::BTreeMap;
use std::fmt;

use serde::ser::SerializeMap;
use serde::{Deserialize, Serialize};

use crate::coeff::{Field, FieldElem, FieldElemRepr};
use crate::error::{Error, Result};

/// Precision of an exactly known series.
pub const EXACT: i64 = 1 << 61;

fn clamp(x: i64) -> i64 {
    if x >= EXACT / 2 {
        EXACT
    } else {
        x
    }
}

pub fn is_exact(prec: i64) -> bool {
    prec >= EXACT / 2
}

/// `binom(n, k) mod p` by Lucas' theorem.
pub fn binom_mod(mut n: u64, mut k: u64, p: u32) -> u32 {
    let p64 = p as u64;
    let mut acc = 1u64;
    while k > 0 || n > 0 {
        let (nd, kd) = (n % p64, k % p64);
        if kd > nd {
            return 0;
        }
        acc = acc * small_binom(nd, kd, p64) % p64;
        n /= p64;
        k /= p64;
        if acc == 0 {
            return 0;
        }
    }
    acc as u32
}

fn small_binom(n: u64, k: u64, p: u64) -> u64 {
    let mut num = 1u64;
    let mut den = 1u64;
    for i in 0..k {
        num = num * ((n - i) % p) % p;
        den = den * ((i + 1) % p) % p;
    }
    // den is a unit mod p since k < p
    num * modinv(den, p) % p
}

fn modinv(a: u64, p: u64) -> u64 {
    let mut r = 1u64;
    let mut b = a % p;
    let mut e = p - 2;
    while e > 0 {
        if e & 1 == 1 {
            r = r * b % p;
        }
        b = b * b % p;
        e >>= 1;
    }
    r
}

/// An element of `Z_p^x` represented by a positive integer prime to `p`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct GammaUnit(u64);

impl GammaUnit {
    pub fn new(c: u64, p: u32) -> Result<GammaUnit> {
        if c == 0 || c.is_multiple_of(p as u64) {
            return Err(Error::NotAUnit);
        }
        Ok(GammaUnit(c))
    }

    /// A positive representative of a signed unit, valid for every series of
    /// precision at most `prec` (binomials only see digits below `p^M`,
    /// `M = ceil(log_p prec) + 1`).
    pub fn from_signed(c: i64, p: u32, prec: i64) -> Result<GammaUnit> {
        let modulus = unit_modulus(p, prec);
        let r = (c as i128).rem_euclid(modulus as i128) as u64;
        GammaUnit::new(r, p)
    }

    /// A representative of `c^{-1}` modulo `p^M`, `M = ceil(log_p prec) + 1`.
    pub fn inverse(&self, p: u32, prec: i64) -> GammaUnit {
        let modulus = unit_modulus(p, prec);
        let inv = modinv_general(self.0 % modulus, modulus);
        GammaUnit(inv)
    }

    pub fn value(&self) -> u64 {
        self.0
    }
}

fn unit_modulus(p: u32, prec: i64) -> u64 {
    let mut m = 1u64;
    let target = prec.max(1) as u64;
    while m < target {
        m *= p as u64;
    }
    m * p as u64
}

fn modinv_general(a: u64, m: u64) -> u64 {
    let (mut old_r, mut r) = (a as i128, m as i128);
    let (mut old_s, mut s) = (1i128, 0i128);
    while r != 0 {
        let q = old_r / r;
        (old_r, r) = (r, old_r - q * r);
        (old_s, s) = (s, old_s - q * s);
    }
    old_s.rem_euclid(m as i128) as u64
}

#[derive(Clone)]
pub struct LaurentSeries {
    field: Field,
    val: i64,
    coeffs: Vec<u32>,
    prec: i64,
}

impl fmt::Debug for LaurentSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

impl fmt::Display for LaurentSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut terms = Vec::new();
        for (i, &c) in self.coeffs.iter().enumerate() {
            if c == 0 {
                continue;
            }
            let e = self.val + i as i64;
            let cs = FieldElem::from_code(&self.field, c).to_string();
            terms.push(match e {
                0 => cs,
                1 => format!("{}*X", cs),
                _ => format!("{}*X^{}", cs, e),
            });
        }
        if terms.is_empty() {
            terms.push("0".into());
        }
        if is_exact(self.prec) {
            write!(f, "{}", terms.join(" + "))
        } else {
            write!(f, "{} + O(X^{})", terms.join(" + "), self.prec)
        }
    }
}

impl PartialEq for LaurentSeries {
    fn eq(&self, other: &Self) -> bool {
        self.field.p() == other.field.p()
            && self.field.m() == other.field.m()
            && self.prec == other.prec
            && self.val == other.val
            && self.coeffs == other.coeffs
    }
}

impl LaurentSeries {
    /// Builds `sum_i codes[i] X^{val + i} + O(X^prec)`.
    pub fn from_codes(field: &Field, val: i64, codes: &[u32], prec: i64) -> LaurentSeries {
        let prec = clamp(prec);
        let mut s = LaurentSeries {
            field: field.clone(),
            val,
            coeffs: codes.to_vec(),
            prec,
        };
        s.normalize();
        s
    }

    pub fn from_terms(field: &Field, terms: &[(i64, FieldElem)], prec: i64) -> LaurentSeries {
        if terms.is_empty() {
            return LaurentSeries::zero(field, prec);
        }
        let lo = terms.iter().map(|t| t.0).min().unwrap();
        let hi = terms.iter().map(|t| t.0).max().unwrap();
        let mut codes = vec![0u32; (hi - lo + 1) as usize];
        for (e, c) in terms {
            let i = (e - lo) as usize;
            codes[i] = field.add(codes[i], c.code());
        }
        LaurentSeries::from_codes(field, lo, &codes, prec)
    }

    pub fn zero(field: &Field, prec: i64) -> LaurentSeries {
        let prec = clamp(prec);
        LaurentSeries {
            field: field.clone(),
            val: prec,
            coeffs: Vec::new(),
            prec,
        }
    }

    pub fn one(field: &Field) -> LaurentSeries {
        LaurentSeries::monomial(field, 1, 0, EXACT)
    }

    /// `c X^e + O(X^prec)`.
    pub fn monomial(field: &Field, code: u32, e: i64, prec: i64) -> LaurentSeries {
        LaurentSeries::from_codes(field, e, &[code], prec)
    }

    pub fn constant(c: &FieldElem, prec: i64) -> LaurentSeries {
        LaurentSeries::monomial(c.field(), c.code(), 0, prec)
    }

    /// `X^e`, known exactly.
    pub fn x_pow(field: &Field, e: i64) -> LaurentSeries {
        LaurentSeries::monomial(field, 1, e, EXACT)
    }

    fn normalize(&mut self) {
        if !is_exact(self.prec) {
            let keep = (self.prec - self.val).max(0) as usize;
            if self.coeffs.len() > keep {
                self.coeffs.truncate(keep);
            }
        }
        while self.coeffs.last() == Some(&0) {
            self.coeffs.pop();
        }
        let lead = self.coeffs.iter().position(|&c| c != 0);
        match lead {
            None => {
                self.coeffs.clear();
                self.val = self.prec;
            }
            Some(k) => {
                if k > 0 {
                    self.coeffs.drain(..k);
                    self.val += k as i64;
                }
            }
        }
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn p(&self) -> u32 {
        self.field.p()
    }

    /// Valuation of a nonzero series; for a zero series this is its precision.
    pub fn valuation(&self) -> i64 {
        self.val
    }

    pub fn precision(&self) -> i64 {
        self.prec
    }

    pub fn is_exact(&self) -> bool {
        is_exact(self.prec)
    }

    /// True if every known coefficient vanishes.
    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_monomial(&self) -> bool {
        self.coeffs.len() == 1
    }

    /// Coefficient code of `X^e` (zero outside the stored window).
    pub fn coeff_code(&self, e: i64) -> u32 {
        if e < self.val {
            return 0;
        }
        let i = (e - self.val) as usize;
        self.coeffs.get(i).copied().unwrap_or(0)
    }

    pub fn coeff(&self, e: i64) -> FieldElem {
        FieldElem::from_code(&self.field, self.coeff_code(e))
    }

    pub fn leading_coeff(&self) -> Option<FieldElem> {
        self.coeffs.first().map(|&c| FieldElem::from_code(&self.field, c))
    }

    /// Nonzero terms `(exponent, code)`.
    pub fn terms(&self) -> impl Iterator<Item = (i64, u32)> + '_ {
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(_, &c)| c != 0)
            .map(move |(i, &c)| (self.val + i as i64, c))
    }

    /// Forgets everything from `X^prec` on.
    pub fn truncate(&self, prec: i64) -> LaurentSeries {
        if prec >= self.prec {
            return self.clone();
        }
        LaurentSeries::from_codes(&self.field, self.val, &self.coeffs, prec)
    }

    pub fn neg(&self) -> LaurentSeries {
        let codes: Vec<u32> = self.coeffs.iter().map(|&c| self.field.neg(c)).collect();
        LaurentSeries::from_codes(&self.field, self.val, &codes, self.prec)
    }

    pub fn scale(&self, c: &FieldElem) -> LaurentSeries {
        self.scale_code(c.code())
    }

    pub fn scale_code(&self, c: u32) -> LaurentSeries {
        if c == 0 {
            return LaurentSeries::zero(&self.field, self.prec);
        }
        let codes: Vec<u32> = self.coeffs.iter().map(|&a| self.field.mul(a, c)).collect();
        LaurentSeries::from_codes(&self.field, self.val, &codes, self.prec)
    }

    /// Multiplication by `X^k`.
    pub fn shift(&self, k: i64) -> LaurentSeries {
        let prec = if self.is_exact() { EXACT } else { self.prec + k };
        if self.is_zero() {
            return LaurentSeries::zero(&self.field, prec);
        }
        LaurentSeries::from_codes(&self.field, self.val + k, &self.coeffs, prec)
    }

    pub fn add(&self, other: &LaurentSeries) -> LaurentSeries {
        let prec = self.prec.min(other.prec);
        if self.is_zero() {
            return other.truncate(prec).with_prec_floor(prec);
        }
        if other.is_zero() {
            return self.truncate(prec).with_prec_floor(prec);
        }
        let lo = self.val.min(other.val);
        let hi = (self.val + self.coeffs.len() as i64).max(other.val + other.coeffs.len() as i64);
        let hi = if is_exact(prec) { hi } else { hi.min(prec) };
        if hi <= lo {
            return LaurentSeries::zero(&self.field, prec);
        }
        let mut codes = vec![0u32; (hi - lo) as usize];
        for (e, c) in self.terms() {
            if e < hi {
                codes[(e - lo) as usize] = c;
            }
        }
        for (e, c) in other.terms() {
            if e < hi {
                let i = (e - lo) as usize;
                codes[i] = self.field.add(codes[i], c);
            }
        }
        LaurentSeries::from_codes(&self.field, lo, &codes, prec)
    }

    fn with_prec_floor(mut self, prec: i64) -> LaurentSeries {
        if prec < self.prec {
            self.prec = prec;
            self.normalize();
        }
        self
    }

    pub fn sub(&self, other: &LaurentSeries) -> LaurentSeries {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &LaurentSeries) -> LaurentSeries {
        let v1 = self.val;
        let v2 = other.val;
        let prec = clamp(
            (self.prec.saturating_add(v2)).min(other.prec.saturating_add(v1)),
        );
        let prec = if self.is_exact() && other.is_exact() {
            EXACT
        } else if is_exact(prec) {
            // one factor is an exact zero
            EXACT
        } else {
            prec
        };
        if self.is_zero() || other.is_zero() {
            return LaurentSeries::zero(&self.field, prec);
        }
        let full = self.coeffs.len() + other.coeffs.len() - 1;
        let len = if is_exact(prec) {
            full
        } else {
            ((prec - v1 - v2).max(0) as usize).min(full)
        };
        let codes = convolve(&self.field, &self.coeffs, &other.coeffs, len);
        LaurentSeries::from_codes(&self.field, v1 + v2, &codes, prec)
    }

    /// Inverse of a nonzero series. An exact series that is not a monomial
    /// has an infinite inverse, so its result is truncated at `cap`.
    pub fn inv_capped(&self, cap: i64) -> Result<LaurentSeries> {
        if self.is_zero() {
            return Err(Error::NotInvertible);
        }
        let v = self.val;
        let a0inv = self.field.inv(self.coeffs[0])?;
        if self.is_monomial() && self.is_exact() {
            return Ok(LaurentSeries::monomial(&self.field, a0inv, -v, EXACT));
        }
        let natural = if self.is_exact() { EXACT } else { self.prec - 2 * v };
        let prec = natural.min(clamp(cap));
        if is_exact(prec) {
            return Err(Error::InsufficientPrecision);
        }
        let len = (prec + v).max(0) as usize;
        let unit = unit_inverse(&self.field, &self.coeffs, a0inv, len);
        Ok(LaurentSeries::from_codes(&self.field, -v, &unit, prec))
    }

    /// Inverse at the precision the input supports.
    pub fn invert(&self) -> Result<LaurentSeries> {
        self.inv_capped(EXACT)
    }

    /// `self^e` for any integer `e`, truncated at `cap`.
    pub fn pow_capped(&self, e: i64, cap: i64) -> Result<LaurentSeries> {
        if e == 0 {
            return Ok(LaurentSeries::one(&self.field).truncate(cap));
        }
        if self.is_zero() {
            if e < 0 {
                return Err(Error::NotInvertible);
            }
            let prec = if self.is_exact() { EXACT } else { self.prec.saturating_mul(e).min(EXACT) };
            return Ok(LaurentSeries::zero(&self.field, prec.min(cap)));
        }
        let v = self.val;
        let a0 = self.coeffs[0];
        let lead = self.field.pow(a0, e)?;
        if self.is_monomial() && self.is_exact() {
            return Ok(LaurentSeries::monomial(&self.field, lead, v * e, EXACT).truncate(cap));
        }
        let rel = if self.is_exact() { EXACT } else { self.prec - v };
        let budget = if is_exact(cap) { EXACT } else { cap - v * e };
        let len = rel.min(budget);
        if is_exact(len) {
            if e < 0 {
                return Err(Error::InsufficientPrecision);
            }
            // exact polynomial power
            let mut acc = vec![1u32];
            for _ in 0..e {
                let l = acc.len() + self.coeffs.len() - 1;
                acc = convolve(&self.field, &acc, &self.coeffs, l);
            }
            return Ok(LaurentSeries::from_codes(&self.field, v * e, &acc, EXACT));
        }
        let len = len.max(0) as usize;
        let mut base: Vec<u32> = self.coeffs.iter().take(len).copied().collect();
        if e < 0 {
            let a0inv = self.field.inv(a0)?;
            base = unit_inverse(&self.field, &base, a0inv, len);
        }
        let unit = unit_pow(&self.field, &base, e.unsigned_abs(), len);
        let prec = (v * e + len as i64).min(clamp(cap));
        Ok(LaurentSeries::from_codes(&self.field, v * e, &unit, prec))
    }

    pub fn pow(&self, e: i64) -> Result<LaurentSeries> {
        self.pow_capped(e, EXACT)
    }

    /// `f(X) -> f(X^p)` with coefficients fixed.
    pub fn frobenius_phi(&self) -> LaurentSeries {
        let p = self.p() as i64;
        let prec = if self.is_exact() { EXACT } else { self.prec * p };
        if self.is_zero() {
            return LaurentSeries::zero(&self.field, prec);
        }
        let mut codes = vec![0u32; (self.coeffs.len() - 1) * p as usize + 1];
        for (i, &c) in self.coeffs.iter().enumerate() {
            codes[i * p as usize] = c;
        }
        LaurentSeries::from_codes(&self.field, self.val * p, &codes, prec)
    }

    /// `f(X) -> f((1+X)^c - 1)`, truncated at `cap`.
    pub fn gamma_act(&self, c: GammaUnit, cap: i64) -> Result<LaurentSeries> {
        if c.value() == 1 {
            return Ok(self.truncate(cap));
        }
        let prec = self.prec.min(clamp(cap));
        if self.is_zero() {
            return Ok(LaurentSeries::zero(&self.field, prec));
        }
        if is_exact(prec) {
            return Err(Error::InsufficientPrecision);
        }
        let v = self.val;
        let rel = (prec - v).max(0) as usize;
        if rel == 0 {
            return Ok(LaurentSeries::zero(&self.field, prec));
        }
        let f = &self.field;
        let p = f.p();
        let g: Vec<u32> = self.coeffs.iter().take(rel).copied().collect();
        // g(X) = sum_j G_j (1+X)^j, then g(gamma X) = sum_j G_j (1+X)^{cj}
        let mut big_g = vec![0u32; g.len()];
        for (k, &gk) in g.iter().enumerate() {
            if gk == 0 {
                continue;
            }
            for (j, slot) in big_g.iter_mut().enumerate().take(k + 1) {
                let b = binom_mod(k as u64, j as u64, p);
                if b == 0 {
                    continue;
                }
                let mut t = f.mul(gk, b);
                if (k - j) % 2 == 1 {
                    t = f.neg(t);
                }
                *slot = f.add(*slot, t);
            }
        }
        let mut comp = vec![0u32; rel];
        for (j, &gj) in big_g.iter().enumerate() {
            if gj == 0 {
                continue;
            }
            let n = c.value() * j as u64;
            for (i, slot) in comp.iter_mut().enumerate() {
                let b = binom_mod(n, i as u64, p);
                if b != 0 {
                    *slot = f.add(*slot, f.mul(gj, b));
                }
            }
        }
        if v != 0 {
            // w = ((1+X)^c - 1) / X
            let w: Vec<u32> = (0..rel).map(|i| binom_mod(c.value(), i as u64 + 1, p)).collect();
            let wv = if v > 0 {
                unit_pow(f, &w, v as u64, rel)
            } else {
                let w0inv = f.inv(w[0])?;
                let winv = unit_inverse(f, &w, w0inv, rel);
                unit_pow(f, &winv, (-v) as u64, rel)
            };
            comp = convolve(f, &comp, &wv, rel);
        }
        Ok(LaurentSeries::from_codes(f, v, &comp, prec))
    }

    /// Agreement up to the smaller of the two precisions.
    pub fn agrees_with(&self, other: &LaurentSeries) -> bool {
        let prec = self.prec.min(other.prec);
        let diff = self.sub(other);
        diff.truncate(prec).is_zero()
    }

    /// The common precision used by [`agrees_with`](Self::agrees_with).
    pub fn common_precision(&self, other: &LaurentSeries) -> i64 {
        self.prec.min(other.prec)
    }

    pub fn is_one_unit(&self) -> bool {
        !self.is_zero() && self.val == 0 && self.coeffs[0] == 1
    }

    /// Substitutes `X -> X^{1/p}` in a series supported on multiples of `p`.
    pub fn frobenius_unphi(&self) -> Option<LaurentSeries> {
        let p = self.p() as i64;
        if self.terms().any(|(e, _)| e.rem_euclid(p) != 0) {
            return None;
        }
        let prec = if self.is_exact() { EXACT } else { self.prec.div_euclid(p) };
        let terms: Vec<(i64, FieldElem)> = self
            .terms()
            .map(|(e, c)| (e / p, FieldElem::from_code(&self.field, c)))
            .collect();
        Some(LaurentSeries::from_terms(&self.field, &terms, prec))
    }

    pub fn to_repr(&self) -> LaurentRepr {
        let coeffs = self
            .terms()
            .map(|(e, c)| (e.to_string(), FieldElem::from_code(&self.field, c).to_repr()))
            .collect();
        LaurentRepr {
            p: self.field.p(),
            m: self.field.m(),
            valuation: self.val,
            precision: if self.is_exact() { None } else { Some(self.prec) },
            coeffs,
        }
    }

    pub fn from_repr(r: &LaurentRepr) -> Result<LaurentSeries> {
        let f = crate::coeff::field_make(r.p, r.m)?;
        let mut terms = Vec::new();
        for (e, c) in &r.coeffs {
            let e: i64 = e
                .parse()
                .map_err(|_| Error::Invalid(format!("bad exponent {}", e)))?;
            terms.push((e, FieldElem::from_repr(c)?));
        }
        Ok(LaurentSeries::from_terms(&f, &terms, r.precision.unwrap_or(EXACT)))
    }
}

/// Random series `sum_{val <= e < prec} c_e X^e` with uniform coefficients.
pub fn random_series<R: rand::Rng>(rng: &mut R, field: &Field, val: i64, prec: i64) -> LaurentSeries {
    let len = (prec - val).max(0) as usize;
    let codes: Vec<u32> = (0..len).map(|_| rng.gen_range(0..field.size())).collect();
    LaurentSeries::from_codes(field, val, &codes, prec)
}

/// Random element of `1 + X k[[X]]` known below `prec`.
pub fn random_one_unit<R: rand::Rng>(rng: &mut R, field: &Field, prec: i64) -> LaurentSeries {
    let len = prec.max(1) as usize;
    let mut codes: Vec<u32> = (0..len).map(|_| rng.gen_range(0..field.size())).collect();
    codes[0] = 1;
    LaurentSeries::from_codes(field, 0, &codes, prec)
}

/// Wire format. A missing precision means the series is exact.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LaurentRepr {
    pub p: u32,
    pub m: u32,
    pub valuation: i64,
    pub precision: Option<i64>,
    pub coeffs: BTreeMap<String, FieldElemRepr>,
}

impl Serialize for LaurentSeries {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let r = self.to_repr();
        let mut map = s.serialize_map(Some(3))?;
        map.serialize_entry("valuation", &r.valuation)?;
        map.serialize_entry("precision", &r.precision)?;
        let coeffs: Vec<(String, FieldElemRepr)> = self
            .terms()
            .map(|(e, c)| (e.to_string(), FieldElem::from_code(&self.field, c).to_repr()))
            .collect();
        map.serialize_entry("coeffs", &OrderedMap(&coeffs))?;
        map.end()
    }
}

struct OrderedMap<'a>(&'a [(String, FieldElemRepr)]);

impl Serialize for OrderedMap<'_> {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut map = s.serialize_map(Some(self.0.len()))?;
        for (k, v) in self.0 {
            map.serialize_entry(k, v)?;
        }
        map.end()
    }
}

/// Truncated product of two coefficient vectors.
pub(crate) fn convolve(f: &Field, a: &[u32], b: &[u32], len: usize) -> Vec<u32> {
    let mut out = vec![0u32; len];
    if a.is_empty() || b.is_empty() || len == 0 {
        return out;
    }
    if f.m() == 1 {
        let p = f.p() as u64;
        let mut acc = vec![0u64; len];
        for (i, &x) in a.iter().enumerate() {
            if x == 0 || i >= len {
                continue;
            }
            let x = x as u64;
            let lim = (len - i).min(b.len());
            for (j, &y) in b[..lim].iter().enumerate() {
                acc[i + j] += x * y as u64;
            }
            // keep the accumulators bounded
            if i % 1024 == 1023 {
                for s in acc.iter_mut() {
                    *s %= p;
                }
            }
        }
        for (o, s) in out.iter_mut().zip(acc) {
            *o = (s % p) as u32;
        }
        return out;
    }
    for (i, &x) in a.iter().enumerate() {
        if x == 0 || i >= len {
            continue;
        }
        let lim = (len - i).min(b.len());
        for (j, &y) in b[..lim].iter().enumerate() {
            if y != 0 {
                out[i + j] = f.add(out[i + j], f.mul(x, y));
            }
        }
    }
    out
}

/// First `len` coefficients of `1/a` for a unit `a` with `a[0]^{-1} = a0inv`.
pub(crate) fn unit_inverse(f: &Field, a: &[u32], a0inv: u32, len: usize) -> Vec<u32> {
    let mut b = vec![0u32; len];
    if len == 0 {
        return b;
    }
    b[0] = a0inv;
    for k in 1..len {
        let mut s = 0u32;
        for i in 1..=k.min(a.len() - 1) {
            if a[i] != 0 && b[k - i] != 0 {
                s = f.add(s, f.mul(a[i], b[k - i]));
            }
        }
        b[k] = f.neg(f.mul(s, a0inv));
    }
    b
}

pub(crate) fn unit_pow(f: &Field, a: &[u32], mut e: u64, len: usize) -> Vec<u32> {
    let mut result = vec![0u32; len.max(1)];
    result[0] = 1;
    result.truncate(len);
    let mut base: Vec<u32> = a.iter().take(len).copied().collect();
    while e > 0 {
        if e & 1 == 1 {
            result = convolve(f, &result, &base, len);
        }
        e >>= 1;
        if e > 0 {
            base = convolve(f, &base, &base, len);
        }
    }
    result
}

/// The unique `g` in `1 + X k[[X]]` with `g^n = f`, by Newton iteration.
pub fn one_unit_root(f: &LaurentSeries, n: u64) -> Result<LaurentSeries> {
    let p = f.p() as u64;
    if n == 0 || n.is_multiple_of(p) {
        return Err(Error::RootNotUnique);
    }
    if !f.is_one_unit() {
        return Err(Error::NotOneUnit);
    }
    if f.is_exact() && f.is_monomial() {
        return Ok(LaurentSeries::one(f.field()));
    }
    if f.is_exact() {
        return Err(Error::InsufficientPrecision);
    }
    let field = f.field();
    let len = f.precision().max(0) as usize;
    let target: Vec<u32> = (0..len).map(|i| f.coeff_code(i as i64)).collect();
    let ninv = field.inv(field.from_int((n % p) as i64))?;
    let nm1 = field.from_int(((n - 1) % p) as i64);
    // g <- ((n-1) g + f g^{1-n}) / n doubles the number of correct digits
    let mut g = vec![0u32; len];
    if len > 0 {
        g[0] = 1;
    }
    let mut correct = 1usize;
    while correct < len {
        correct = (2 * correct).min(len);
        let gpow = unit_pow(field, &g, n - 1, correct);
        let ginv = unit_inverse(field, &gpow, field.inv(gpow[0])?, correct);
        let fg = convolve(field, &target[..correct], &ginv, correct);
        for i in 0..correct {
            let t = field.add(field.mul(nm1, g[i]), fg[i]);
            g[i] = field.mul(t, ninv);
        }
    }
    Ok(LaurentSeries::from_codes(field, 0, &g, f.precision()))
}

/// Components `g_0..g_{p-1}` with `f = sum_i (1+X)^i g_i(X^p)`.
///
/// Coefficients are grouped by exponent mod `p` and the inverse Pascal matrix
/// is applied. Each component is known below `floor(N / p)`.
pub fn phi_basis_decompose(f: &LaurentSeries) -> Vec<LaurentSeries> {
    let field = f.field();
    let p = f.p() as i64;
    let prec = if f.is_exact() { EXACT } else { f.precision().div_euclid(p) };
    if f.is_zero() {
        return (0..p).map(|_| LaurentSeries::zero(field, prec)).collect();
    }
    // F_j(Y) with f = sum_j X^j F_j(X^p)
    let mut parts: Vec<Vec<(i64, u32)>> = vec![Vec::new(); p as usize];
    for (e, c) in f.terms() {
        let j = e.rem_euclid(p);
        parts[j as usize].push((e.div_euclid(p), c));
    }
    let mut out = Vec::with_capacity(p as usize);
    for i in 0..p {
        let mut terms: BTreeMap<i64, u32> = BTreeMap::new();
        // X^j = sum_i binom(j, i) (-1)^{j-i} (1+X)^i
        for j in i..p {
            let b = binom_mod(j as u64, i as u64, p as u32);
            if b == 0 {
                continue;
            }
            let sign_b = if (j - i) % 2 == 1 { field.neg(b) } else { b };
            for &(e, c) in &parts[j as usize] {
                let slot = terms.entry(e).or_insert(0);
                *slot = field.add(*slot, field.mul(c, sign_b));
            }
        }
        let terms: Vec<(i64, FieldElem)> = terms
            .into_iter()
            .map(|(e, c)| (e, FieldElem::from_code(field, c)))
            .collect();
        out.push(LaurentSeries::from_terms(field, &terms, prec));
    }
    out
}

/// Inverse of [`phi_basis_decompose`].
pub fn phi_basis_assemble(parts: &[LaurentSeries]) -> LaurentSeries {
    let field = parts[0].field().clone();
    let mut acc = LaurentSeries::zero(&field, EXACT);
    for (i, g) in parts.iter().enumerate() {
        let binom_poly = LaurentSeries::from_codes(
            &field,
            0,
            &(0..=i).map(|k| binom_mod(i as u64, k as u64, field.p())).collect::<Vec<_>>(),
            EXACT,
        );
        acc = acc.add(&binom_poly.mul(&g.frobenius_phi()));
    }
    acc
}

/// `psi` on `k((X))`: the zeroth component of the decomposition.
pub fn psi_ring(f: &LaurentSeries) -> LaurentSeries {
    phi_basis_decompose(f).swap_remove(0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coeff::field_make;

    fn f3() -> Field {
        field_make(3, 1).unwrap()
    }

    #[test]
    fn lucas_small() {
        assert_eq!(binom_mod(5, 2, 3), 1); // 10 mod 3
        assert_eq!(binom_mod(9, 3, 3), 0);
        assert_eq!(binom_mod(10, 1, 3), 1);
    }

    #[test]
    fn frobenius_examples() {
        let f = f3();
        let s = LaurentSeries::from_codes(&f, 1, &[1, 1], 10);
        let t = s.frobenius_phi();
        assert_eq!(t.coeff_code(3), 1);
        assert_eq!(t.coeff_code(6), 1);
        assert_eq!(t.precision(), 30);
        let f5 = field_make(5, 1).unwrap();
        let x = LaurentSeries::x_pow(&f5, -1);
        assert_eq!(x.frobenius_phi(), LaurentSeries::x_pow(&f5, -5));
    }

    #[test]
    fn inverse_of_one_plus_x() {
        let f = f3();
        let s = LaurentSeries::from_codes(&f, 0, &[1, 1], 4);
        let inv = s.invert().unwrap();
        assert_eq!(inv, LaurentSeries::from_codes(&f, 0, &[1, 2, 1, 2], 4));
        assert_eq!(LaurentSeries::zero(&f, 4).invert().unwrap_err(), Error::NotInvertible);
        let x = LaurentSeries::x_pow(&f, 1);
        assert_eq!(x.invert().unwrap(), LaurentSeries::x_pow(&f, -1));
    }

    #[test]
    fn gamma_examples() {
        let f = f3();
        let x = LaurentSeries::monomial(&f, 1, 1, 10);
        let g = x.gamma_act(GammaUnit::new(2, 3).unwrap(), 10).unwrap();
        assert_eq!(g, LaurentSeries::from_codes(&f, 1, &[2, 1], 10));
        let g = x.gamma_act(GammaUnit::new(3 + 1, 3).unwrap(), 10).unwrap();
        assert_eq!(g.coeff_code(1), 1);
        let f5 = field_make(5, 1).unwrap();
        // c = p is not a unit, but (1+X)^p - 1 = X^p is what a non-unit would do
        assert!(GammaUnit::new(5, 5).is_err());
        let _ = f5;
    }

    #[test]
    fn gamma_on_negative_powers() {
        let f = f3();
        let c = GammaUnit::new(2, 3).unwrap();
        let xinv = LaurentSeries::monomial(&f, 1, -1, 12);
        let g = xinv.gamma_act(c, 12).unwrap();
        let x = LaurentSeries::monomial(&f, 1, 1, 14);
        let gx = x.gamma_act(c, 14).unwrap();
        let prod = g.mul(&gx);
        assert!(prod.agrees_with(&LaurentSeries::one(&f)));
    }

    #[test]
    fn root_examples() {
        let f = f3();
        let one_plus_x = LaurentSeries::from_codes(&f, 0, &[1, 1], 4);
        let g = one_unit_root(&one_plus_x, 2).unwrap();
        assert_eq!(g.coeff_code(0), 1);
        assert_eq!(g.coeff_code(1), 2);
        assert_eq!(g.coeff_code(2), 1);
        assert!(g.pow(2).unwrap().agrees_with(&one_plus_x));
        assert_eq!(one_unit_root(&one_plus_x, 3).unwrap_err(), Error::RootNotUnique);
        let two = LaurentSeries::from_codes(&f, 0, &[2, 1], 4);
        assert_eq!(one_unit_root(&two, 2).unwrap_err(), Error::NotOneUnit);
        let sq = LaurentSeries::from_codes(&f, 0, &[1, 2, 1], 8);
        assert_eq!(one_unit_root(&sq, 2).unwrap(), LaurentSeries::from_codes(&f, 0, &[1, 1], 8));
    }

    #[test]
    fn decompose_examples() {
        let f = f3();
        let one = LaurentSeries::monomial(&f, 1, 0, 30);
        let parts = phi_basis_decompose(&one);
        assert_eq!(parts[0].coeff_code(0), 1);
        assert!(parts[1].is_zero() && parts[2].is_zero());
        let xp1 = LaurentSeries::monomial(&f, 1, 2, 30);
        let parts = phi_basis_decompose(&xp1);
        assert_eq!(parts[0].coeff_code(0), 1);
        let xinv = LaurentSeries::monomial(&f, 1, -1, 30);
        let parts = phi_basis_decompose(&xinv);
        assert_eq!(parts[0], LaurentSeries::monomial(&f, 1, -1, 10));
    }

    #[test]
    fn serde_shape() {
        let f = f3();
        let s = LaurentSeries::from_codes(&f, -2, &[1, 0, 2], 5);
        let v = serde_json::to_value(&s).unwrap();
        assert_eq!(v["valuation"], -2);
        assert_eq!(v["precision"], 5);
        assert_eq!(v["coeffs"]["0"]["coeffs"][0], 2);
    }
}
