//! Parameterized Galois representations `omega^a mu_lambda (x) Ind(omega_n^h)`.
//!
//! The tame twist is folded into the exponent, `H = h + a (p^n - 1)/(p - 1)`,
//! and only `Lam = lambda^n` is kept, so a representation is `(n, H, Lam)`.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::chars::TameChar;
use crate::coeff::{Field, FieldElem};
use crate::error::{Error, Result};
use crate::metagroup::QuadCharParams;

pub fn pow_u64(p: u32, n: u32) -> u64 {
    (p as u64).pow(n)
}

/// `p^n - 1`.
pub fn order(p: u32, n: u32) -> u64 {
    pow_u64(p, n) - 1
}

/// `(p^n - 1)/(p - 1)`, the exponent of `omega` inside `omega_n`.
pub fn omega_exponent(p: u32, n: u32) -> u64 {
    order(p, n) / (p as u64 - 1)
}

/// `(p^2 + 1)/2`.
pub fn half_p2_plus_1(p: u32) -> u64 {
    pow_u64(p, 2).div_ceil(2)
}

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct InducedParams {
    pub n: u32,
    #[serde(rename = "H")]
    pub h: u64,
    #[serde(rename = "Lam")]
    pub lam: FieldElem,
}

impl fmt::Debug for InducedParams {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Ind_{}(H={}, Lam={})", self.n, self.h, self.lam)
    }
}

impl InducedParams {
    /// Reduces `h` modulo `p^n - 1`.
    pub fn new(n: u32, h: i128, lam: FieldElem) -> Result<InducedParams> {
        if lam.is_zero() {
            return Err(Error::NonzeroRequired);
        }
        if n == 0 {
            return Err(Error::Invalid("n must be positive".into()));
        }
        let ord = order(lam.field().p(), n) as i128;
        Ok(InducedParams { n, h: h.rem_euclid(ord) as u64, lam })
    }

    /// `omega^a (x) Ind(omega_n^h)` with `Lam`.
    pub fn with_twist(n: u32, h: i128, a: i128, lam: FieldElem) -> Result<InducedParams> {
        let q = omega_exponent(lam.field().p(), n) as i128;
        InducedParams::new(n, h + a * q, lam)
    }

    pub fn p(&self) -> u32 {
        self.lam.field().p()
    }

    pub fn field(&self) -> &Field {
        self.lam.field()
    }

    pub fn order(&self) -> u64 {
        order(self.p(), self.n)
    }

    /// Twist by a tame character: `omega^a` shifts `H`, `mu_nu` scales `Lam` by `nu^n`.
    pub fn twist(&self, chi: &TameChar) -> InducedParams {
        let q = omega_exponent(self.p(), self.n) as i128;
        InducedParams::new(
            self.n,
            self.h as i128 + chi.tame_exp as i128 * q,
            self.lam.mul(&chi.unram.pow(self.n as i64).unwrap()),
        )
        .unwrap()
    }

    pub fn dual(&self) -> InducedParams {
        InducedParams::new(self.n, -(self.h as i128), self.lam.inv().unwrap()).unwrap()
    }
}

/// Least element of the Frobenius orbit `{p^i H}`.
pub fn canonicalize(x: &InducedParams) -> InducedParams {
    let ord = x.order() as u128;
    let p = x.p() as u128;
    let mut best = x.h;
    let mut cur = x.h as u128;
    for _ in 1..x.n {
        cur = cur * p % ord;
        best = best.min(cur as u64);
    }
    InducedParams { n: x.n, h: best, lam: x.lam.clone() }
}

pub fn iso_test(a: &InducedParams, b: &InducedParams) -> Result<bool> {
    if a.n != b.n || a.p() != b.p() {
        return Err(Error::Incomparable);
    }
    Ok(canonicalize(a) == canonicalize(b))
}

fn divisors(n: u32) -> Vec<u32> {
    (1..n).filter(|d| n.is_multiple_of(*d)).collect()
}

/// No `(p^n - 1)/(p^d - 1)` with `d` a proper divisor of `n` divides `h`.
pub fn primitive(h: u64, n: u32, p: u32) -> Result<bool> {
    if h < 1 || h > order(p, n) - 1 {
        return Err(Error::ExponentRange);
    }
    Ok(divisors(n).into_iter().all(|d| !h.is_multiple_of(order(p, n) / order(p, d))))
}

pub fn quad_twist(x: &InducedParams, eps: &QuadCharParams) -> InducedParams {
    x.twist(&TameChar::from_quad(eps, x.field()))
}

/// For `n = 4`: whether `H` is irreducible and fixed by twisting with `omega^{(p-1)/2}`.
pub fn is_twist_invariant_irreducible(x: &InducedParams) -> bool {
    if x.n != 4 || x.h == 0 {
        return false;
    }
    if !primitive(x.h, 4, x.p()).unwrap_or(false) {
        return false;
    }
    let ord = x.order() as u128;
    let half = ord / 2;
    (1..4).any(|i| ((pow_u64(x.p(), i) as u128 - 1) * x.h as u128) % ord == half)
}

/// Odd `h'` in `[3, 2p-1]` classifying an irreducible, twist-invariant `n = 4` parameter up to twist.
pub fn twist_invariant_class(x: &InducedParams) -> Option<u64> {
    if !is_twist_invariant_irreducible(x) {
        return None;
    }
    let k = half_p2_plus_1(x.p());
    if !x.h.is_multiple_of(k) {
        return None;
    }
    let h = x.h / k;
    if h.is_multiple_of(2) {
        return None;
    }
    let (_, hp) = reduce_odd_exponent(h as i64, x.p()).ok()?;
    Some(hp)
}

/// Reduction `Ind(omega_4^{K h}) = omega^a (x) Ind(omega_4^{K h'})`, `K = (p^2+1)/2`,
/// with `h'` odd in `[3, 2p-1]`. Returns `(a mod p-1, h')`.
pub fn reduce_odd_exponent(h: i64, p: u32) -> Result<(u32, u64)> {
    if h.rem_euclid(2) == 0 {
        return Err(Error::OddRequired);
    }
    let p = p as i64;
    let modulus = 2 * (p * p - 1);
    let mut h = h.rem_euclid(modulus);
    // cumulative twist: Ind(K h_input) = omega^twist (x) Ind(K h)
    let mut twist = 0i64;
    let h2 = h / (p * p);
    if h2 == 1 {
        let a = (p - 1) / 2;
        h -= 2 * a * (p + 1);
        twist += a;
    }
    let h0 = h % p;
    let h1 = (h / p) % p;
    let a = h1.div_euclid(2);
    let h1p = h1 - 2 * a;
    let mut hp = h - 2 * a * (p + 1);
    twist += a;
    let h0p = h0 - 2 * a;
    if h1p == 0 && h0p < 0 {
        hp += 2 * (p + 1);
        twist -= 1;
        if h0p == -1 {
            // 2p + 1 and p(2p + 1) = p + 2 lie in one Frobenius orbit
            hp = (p * hp).rem_euclid(modulus);
        }
    }
    if hp == 1 {
        hp = p;
    }
    debug_assert!(hp % 2 == 1 && hp >= 3 && hp < 2 * p);
    Ok((twist.rem_euclid(p - 1) as u32, hp as u64))
}

/// `Ind(omega_4^{K h})`, `K = (p^2+1)/2`, standing for induction from `Q_{p^2}(sqrt p)`.
pub fn lfield_param(h: i64, field: &Field) -> Result<InducedParams> {
    if h.rem_euclid(2) == 0 {
        return Err(Error::ReducibleForEvenExponent);
    }
    let k = half_p2_plus_1(field.p()) as i128;
    InducedParams::new(4, k * h as i128, FieldElem::one(field))
}

/// All `H` in `[0, p^4 - 1)` that are primitive and `omega^{(p-1)/2}`-invariant.
pub fn qualifying_exponents(field: &Field) -> Vec<u64> {
    let ord = order(field.p(), 4);
    (1..ord)
        .filter(|&h| {
            is_twist_invariant_irreducible(&InducedParams {
                n: 4,
                h,
                lam: FieldElem::one(field),
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coeff::field_make;

    fn ind(p: u32, h: i128) -> InducedParams {
        InducedParams::new(4, h, FieldElem::one(&field_make(p, 1).unwrap())).unwrap()
    }

    #[test]
    fn canonical_examples() {
        assert_eq!(canonicalize(&ind(3, 75)).h, 25);
        assert_eq!(canonicalize(&ind(3, 0)).h, 0);
        let c = canonicalize(&ind(3, 25));
        assert_eq!(canonicalize(&c), c);
        assert!(iso_test(&ind(3, 75), &ind(3, 25)).unwrap());
        let f = field_make(3, 1).unwrap();
        let two = InducedParams::new(2, 1, FieldElem::one(&f)).unwrap();
        assert_eq!(iso_test(&two, &ind(3, 1)).unwrap_err(), Error::Incomparable);
    }

    #[test]
    fn primitive_examples() {
        assert!(primitive(1, 4, 5).unwrap());
        assert!(!primitive(26, 4, 5).unwrap());
        assert!(primitive(15, 4, 3).unwrap());
        assert_eq!(primitive(0, 4, 3).unwrap_err(), Error::ExponentRange);
    }

    #[test]
    fn quad_twist_examples() {
        let x = ind(5, 39);
        assert_eq!(quad_twist(&x, &QuadCharParams::trivial()), x);
        assert_eq!(quad_twist(&x, &QuadCharParams { unram: -1, tame: 0 }), x);
        assert_eq!(quad_twist(&x, &QuadCharParams { unram: 1, tame: 2 }).h, 39 + 312);
    }

    #[test]
    fn twist_invariant_class_examples() {
        assert_eq!(twist_invariant_class(&ind(5, 39)), Some(3));
        assert_eq!(twist_invariant_class(&ind(5, 26)), None);
        assert_eq!(twist_invariant_class(&ind(5, 26 * 3)), None);
    }

    #[test]
    fn reduction_examples() {
        assert_eq!(reduce_odd_exponent(1, 3).unwrap().1, 3);
        assert_eq!(reduce_odd_exponent(15, 3).unwrap().1, 5);
        assert_eq!(reduce_odd_exponent(4, 3).unwrap_err(), Error::OddRequired);
    }

    #[test]
    fn lfield_examples() {
        let f3 = field_make(3, 1).unwrap();
        let f5 = field_make(5, 1).unwrap();
        assert_eq!(lfield_param(1, &f3).unwrap().h, 5);
        assert_eq!(lfield_param(3, &f5).unwrap().h, 39);
        assert_eq!(lfield_param(2, &f5).unwrap_err(), Error::ReducibleForEvenExponent);
    }

    #[test]
    fn qualifying_are_odd_multiples() {
        for p in [3u32, 5, 7] {
            let f = field_make(p, 1).unwrap();
            let k = half_p2_plus_1(p);
            let q = qualifying_exponents(&f);
            let expected: Vec<u64> = (1..order(p, 4)).filter(|h| h % k == 0 && (h / k) % 2 == 1).collect();
            assert_eq!(q, expected);
        }
    }

    #[test]
    fn reduction_is_verified_exhaustively() {
        for p in [3u32, 5, 7] {
            let f = field_make(p, 1).unwrap();
            let k = half_p2_plus_1(p) as i128;
            let one = FieldElem::one(&f);
            for h in (1..=2 * (order(p, 2) as i64)).step_by(2) {
                let (a, hp) = reduce_odd_exponent(h, p).unwrap();
                let lhs = InducedParams::new(4, k * h as i128, one.clone()).unwrap();
                let rhs = InducedParams::with_twist(4, k * hp as i128, a as i128, one.clone()).unwrap();
                assert!(iso_test(&lhs, &rhs).unwrap(), "p={} h={} -> a={} h'={}", p, h, a, hp);
            }
        }
    }
}
